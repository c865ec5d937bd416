use mdpd_wasm::demo::{bump_field, diagram_view, distance_view, jcn_view};

#[test]
fn fields_are_normalized_and_reproducible() {
    let a = bump_field(16, 7).unwrap();
    let b = bump_field(16, 7).unwrap();
    assert_eq!(a, b);
    for f in a.fields() {
        let (lo, hi) = f.range().unwrap();
        assert_eq!((lo, hi), (0.0, 1.0));
    }
}

#[test]
fn jcn_labels_every_vertex() {
    let v = jcn_view(12, 1, 4).unwrap();
    assert_eq!(v.contour.len(), 144);
    assert!(v.contour.iter().all(|&c| c < v.nodes));
    assert!(v.nodes >= 2);
}

#[test]
fn diagram_has_the_global_extended_point() {
    let v = diagram_view(12, 2, 6).unwrap();
    assert!(v.points.iter().any(|p| p.kind == "extended 0"));
    assert!(v.mdpd_points > 0);
}

#[test]
fn distance_is_zero_on_the_diagonal_and_symmetric() {
    assert_eq!(distance_view(10, 3, 3, 4, 2.0).unwrap().value, 0.0);
    let ab = distance_view(10, 3, 4, 4, 2.0).unwrap().value;
    let ba = distance_view(10, 4, 3, 4, 2.0).unwrap().value;
    assert!(ab > 0.0);
    assert_eq!(ab, ba);
}
