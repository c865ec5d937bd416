//! Carrier refinement ahead of quantization.
//!
//! Vertex quantization only sees level bands that contain vertices. Where an edge jumps
//! over a band, the band's vertices on either side stay disconnected and bands two levels
//! apart become adjacent. Splitting every such edge at its midpoint (fields and positions
//! interpolated linearly, so the piecewise-linear fields are unchanged) until no edge spans
//! more than one level per field restores the band structure of the interpolated fields.

use std::collections::HashMap;

use crate::error::Result;
use crate::jcn::QuantizationSpec;
use crate::mesh::{Carrier, MultiField, SimplicialMesh, VertexField};

/// Rounds of bisection before giving up on an edge; each round halves the jump.
const MAX_ROUNDS: usize = 40;

/// Refine a mesh carrier so that adjacent vertices differ by at most one level in every
/// field. Grid carriers and meshes with tetrahedra are returned unchanged.
pub fn refine_for_quantization(mf: &MultiField, spec: &QuantizationSpec) -> Result<MultiField> {
    let Carrier::Mesh(mesh) = mf.carrier() else {
        return Ok(mf.clone());
    };
    if mesh.simplices().iter().any(|s| s.len() > 3) {
        log::warn!("refinement skipped: the mesh has simplices of dimension > 2");
        return Ok(mf.clone());
    }
    let mut vertices = mesh.vertices().to_vec();
    let mut simplices: Vec<Vec<usize>> = mesh.simplices().to_vec();
    let mut values: Vec<Vec<f64>> = mf.fields().iter().map(|f| f.values.clone()).collect();

    for _ in 0..MAX_ROUNDS {
        let levels: Vec<Vec<u32>> = values
            .iter()
            .zip(&spec.fields)
            .map(|(vals, q)| vals.iter().map(|&v| q.quantize(v).0).collect())
            .collect();
        let jumps = |a: usize, b: usize| levels.iter().any(|l| l[a].abs_diff(l[b]) > 1);

        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        for s in &simplices {
            for (i, &a) in s.iter().enumerate() {
                for &b in &s[i + 1..] {
                    let key = (a.min(b), a.max(b));
                    if jumps(a, b) && !mid.contains_key(&key) {
                        let m = vertices.len();
                        let (pa, pb) = (vertices[a], vertices[b]);
                        vertices.push([0, 1, 2].map(|k| 0.5 * (pa[k] + pb[k])));
                        for vals in values.iter_mut() {
                            let v = 0.5 * (vals[a] + vals[b]);
                            vals.push(v);
                        }
                        mid.insert(key, m);
                    }
                }
            }
        }
        if mid.is_empty() {
            break;
        }
        let split = |a: usize, b: usize| mid.get(&(a.min(b), a.max(b))).copied();
        let mut next = Vec::with_capacity(simplices.len() * 2);
        for s in &simplices {
            match s[..] {
                [a, b] => match split(a, b) {
                    Some(m) => {
                        next.push(vec![a, m]);
                        next.push(vec![m, b]);
                    }
                    None => next.push(s.clone()),
                },
                [a, b, c] => split_triangle([a, b, c], &split, &mut next),
                _ => next.push(s.clone()),
            }
        }
        simplices = next;
    }

    let mesh = SimplicialMesh::new(vertices, simplices)?;
    let fields = mf
        .fields()
        .iter()
        .zip(values)
        .map(|(f, v)| VertexField::new(f.name.clone(), v))
        .collect::<Result<Vec<_>>>()?;
    MultiField::new(Carrier::Mesh(mesh), fields)
}

fn split_triangle(
    t: [usize; 3],
    split: &impl Fn(usize, usize) -> Option<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    // rotate so that the split edges come first: (t0,t1), then (t1,t2)
    let edges = |t: [usize; 3]| [split(t[0], t[1]), split(t[1], t[2]), split(t[2], t[0])];
    let count = edges(t).iter().flatten().count();
    let rotations = [t, [t[1], t[2], t[0]], [t[2], t[0], t[1]]];
    match count {
        0 => out.push(t.to_vec()),
        1 => {
            let r = rotations
                .into_iter()
                .find(|&r| edges(r)[0].is_some())
                .unwrap();
            let m = edges(r)[0].unwrap();
            out.push(vec![r[0], m, r[2]]);
            out.push(vec![m, r[1], r[2]]);
        }
        2 => {
            let r = rotations
                .into_iter()
                .find(|&r| edges(r)[2].is_none())
                .unwrap();
            let [m01, m12, _] = edges(r);
            let (m01, m12) = (m01.unwrap(), m12.unwrap());
            out.push(vec![m01, r[1], m12]);
            out.push(vec![r[0], m01, m12]);
            out.push(vec![r[0], m12, r[2]]);
        }
        _ => {
            let [m01, m12, m20] = edges(t).map(Option::unwrap);
            out.push(vec![t[0], m01, m20]);
            out.push(vec![m01, t[1], m12]);
            out.push(vec![m20, m12, t[2]]);
            out.push(vec![m01, m12, m20]);
        }
    }
}
