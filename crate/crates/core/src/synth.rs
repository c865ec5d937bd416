//! Synthetic inputs: triangulated implicit surfaces and random grid multi-fields.
//!
//! Surfaces are extracted with marching tetrahedra over a lattice whose cubes are each
//! split into six tetrahedra along the main diagonal, so neighbouring cubes agree on their
//! shared faces and the output is a conforming mesh. Surface vertices are keyed by the
//! lattice edge they lie on.

use std::collections::HashMap;

use rand::Rng;

use crate::error::Result;
use crate::fields::{euclidean_field, geodesic_field};
use crate::mesh::{Carrier, MultiField, RegularGrid, SimplicialMesh, VertexField};
use crate::union_find::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    Sphere,
    Torus,
    DoubleTorus,
}

impl Shape {
    pub const ALL: [Shape; 3] = [Shape::Sphere, Shape::Torus, Shape::DoubleTorus];

    pub fn name(self) -> &'static str {
        match self {
            Shape::Sphere => "sphere",
            Shape::Torus => "torus",
            Shape::DoubleTorus => "double-torus",
        }
    }

    /// Signed distance-like function, negative inside.
    pub fn implicit(self, p: [f64; 3]) -> f64 {
        match self {
            Shape::Sphere => norm(p) - 1.0,
            Shape::Torus => torus(p, 0.0, 1.0, 0.4),
            Shape::DoubleTorus => torus(p, -1.1, 1.0, 0.35).min(torus(p, 1.1, 1.0, 0.35)),
        }
    }

    /// Axis-aligned box enclosing the surface with some margin.
    pub fn bounds(self) -> ([f64; 3], [f64; 3]) {
        match self {
            Shape::Sphere => ([-1.3; 3], [1.3; 3]),
            Shape::Torus => ([-1.6, -1.6, -0.6], [1.6, 1.6, 0.6]),
            Shape::DoubleTorus => ([-2.6, -1.5, -0.55], [2.6, 1.5, 0.55]),
        }
    }
}

fn norm(p: [f64; 3]) -> f64 {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
}

fn torus(p: [f64; 3], cx: f64, major: f64, minor: f64) -> f64 {
    let x = p[0] - cx;
    let ring = (x * x + p[1] * p[1]).sqrt() - major;
    (ring * ring + p[2] * p[2]).sqrt() - minor
}

/// Triangulate `{f < 0}` sampled on a lattice of spacing `h` starting at `lo`, keeping
/// the largest connected component.
pub fn marching_tetrahedra(
    f: impl Fn([f64; 3]) -> f64,
    lo: [f64; 3],
    hi: [f64; 3],
    h: f64,
) -> Result<SimplicialMesh> {
    let n: [usize; 3] = [0, 1, 2].map(|a| ((hi[a] - lo[a]) / h).ceil() as usize + 1);
    let index = |x: usize, y: usize, z: usize| x + n[0] * (y + n[1] * z);
    let pos = |i: usize| {
        let (x, y, z) = (i % n[0], (i / n[0]) % n[1], i / (n[0] * n[1]));
        [
            lo[0] + x as f64 * h,
            lo[1] + y as f64 * h,
            lo[2] + z as f64 * h,
        ]
    };
    let values: Vec<f64> = (0..n[0] * n[1] * n[2]).map(|i| f(pos(i))).collect();
    let inside = |i: usize| values[i] < 0.0;

    let mut vertices = Vec::new();
    let mut keyed: HashMap<(usize, usize), usize> = HashMap::new();
    let mut triangles = Vec::new();
    let mut cut = |a: usize, b: usize| -> usize {
        let key = (a.min(b), a.max(b));
        *keyed.entry(key).or_insert_with(|| {
            let (pa, pb) = (pos(a), pos(b));
            let t = values[a] / (values[a] - values[b]);
            vertices.push([0, 1, 2].map(|k| pa[k] + t * (pb[k] - pa[k])));
            vertices.len() - 1
        })
    };

    const PATHS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    for z in 0..n[2] - 1 {
        for y in 0..n[1] - 1 {
            for x in 0..n[0] - 1 {
                let corner = |bits: [usize; 3]| index(x + bits[0], y + bits[1], z + bits[2]);
                for path in PATHS {
                    let mut bits = [0; 3];
                    let mut tet = [corner(bits); 4];
                    for (k, &axis) in path.iter().enumerate() {
                        bits[axis] = 1;
                        tet[k + 1] = corner(bits);
                    }
                    let (ins, outs): (Vec<usize>, Vec<usize>) =
                        tet.iter().partition(|&&i| inside(i));
                    match (ins.len(), outs.len()) {
                        (1, 3) => {
                            let a = ins[0];
                            triangles.push([cut(a, outs[0]), cut(a, outs[1]), cut(a, outs[2])]);
                        }
                        (3, 1) => {
                            let a = outs[0];
                            triangles.push([cut(a, ins[0]), cut(a, ins[1]), cut(a, ins[2])]);
                        }
                        (2, 2) => {
                            let (a, b, c, d) = (ins[0], ins[1], outs[0], outs[1]);
                            let (ac, ad, bd, bc) = (cut(a, c), cut(a, d), cut(b, d), cut(b, c));
                            triangles.push([ac, ad, bd]);
                            triangles.push([ac, bd, bc]);
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    largest_component(vertices, &triangles)
}

fn largest_component(vertices: Vec<[f64; 3]>, triangles: &[[usize; 3]]) -> Result<SimplicialMesh> {
    let mut uf = UnionFind::new(vertices.len());
    for t in triangles {
        uf.union(t[0], t[1]);
        uf.union(t[1], t[2]);
    }
    let (labels, count) = uf.labels();
    let mut sizes = vec![0usize; count];
    for t in triangles {
        sizes[labels[t[0]]] += 1;
    }
    let keep = (0..count)
        .max_by_key(|&c| (sizes[c], std::cmp::Reverse(c)))
        .unwrap_or(0);
    let mut remap = vec![usize::MAX; vertices.len()];
    let mut kept = Vec::new();
    for (v, p) in vertices.into_iter().enumerate() {
        if labels[v] == keep {
            remap[v] = kept.len();
            kept.push(p);
        }
    }
    let tris: Vec<[usize; 3]> = triangles
        .iter()
        .filter(|t| labels[t[0]] == keep)
        .map(|t| t.map(|v| remap[v]))
        .collect();
    SimplicialMesh::from_triangles(kept, &tris)
}

/// Uniformly random rotation matrix (unit quaternion from three uniforms).
pub fn random_rotation(rng: &mut impl Rng) -> [[f64; 3]; 3] {
    let (u1, u2, u3): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
    let tau = std::f64::consts::TAU;
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let (w, x, y, z) = (
        a * (tau * u2).sin(),
        a * (tau * u2).cos(),
        b * (tau * u3).sin(),
        b * (tau * u3).cos(),
    );
    [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ]
}

/// How [`noisy_shape`] perturbs an instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Noise {
    /// Lattice spacing of the surface extraction.
    pub spacing: f64,
    /// Axis stretch: x is scaled by `1 + stretch·u`, z by `1 − stretch·u'` with `u, u'`
    /// uniform in `[0.5, 1]`. Breaks the symmetries that make the descriptor fields flat.
    pub stretch: f64,
    /// Largest vertex displacement as a fraction of the bounding-box diagonal.
    pub jitter: f64,
}

/// A noisy instance of `shape`: the shape is stretched along its axes, the sampling
/// lattice is shifted by a random sub-cell offset, every vertex is displaced by at most
/// `jitter` times the bounding-box diagonal and the mesh is rotated at random.
pub fn noisy_shape(shape: Shape, noise: Noise, rng: &mut impl Rng) -> Result<SimplicialMesh> {
    let h = noise.spacing;
    let scale = [
        1.0 + noise.stretch * rng.gen_range(0.5..=1.0),
        1.0,
        1.0 - noise.stretch * rng.gen_range(0.5..=1.0),
    ];
    let (lo, hi) = shape.bounds();
    let (lo, hi) = (
        [0, 1, 2].map(|a| lo[a] * scale[a]),
        [0, 1, 2].map(|a| hi[a] * scale[a]),
    );
    let shift: [f64; 3] = [0, 1, 2].map(|_| rng.gen_range(0.0..h));
    let lo = [0, 1, 2].map(|a| lo[a] - shift[a]);
    let implicit = |p: [f64; 3]| shape.implicit([0, 1, 2].map(|a| p[a] / scale[a]));
    let mesh = marching_tetrahedra(implicit, lo, hi, h)?;
    let radius = noise.jitter * bbox_diagonal(mesh.vertices());
    let vertices: Vec<[f64; 3]> = mesh
        .vertices()
        .iter()
        .map(|p| {
            let d = loop {
                let d: [f64; 3] = [0, 1, 2].map(|_| rng.gen_range(-1.0..1.0));
                if norm(d) <= 1.0 {
                    break d;
                }
            };
            [0, 1, 2].map(|a| p[a] + radius * d[a])
        })
        .collect();
    let jittered = SimplicialMesh::new(vertices, mesh.simplices().to_vec())?;
    Ok(jittered.transformed(random_rotation(rng), [0.0; 3]))
}

pub fn bbox_diagonal(points: &[[f64; 3]]) -> f64 {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in points {
        for a in 0..3 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    norm([0, 1, 2].map(|a| hi[a] - lo[a]))
}

/// `(μ_n, d2_n)` on a mesh.
pub fn descriptor_fields(mesh: &SimplicialMesh) -> Result<MultiField> {
    let geo = geodesic_field(mesh)?;
    let euc = euclidean_field(mesh)?;
    MultiField::new(Carrier::Mesh(mesh.clone()), vec![geo, euc])
}

/// Two i.i.d. uniform `[0, 1)` fields on an `nx × ny` grid.
pub fn random_grid_bivariate(nx: usize, ny: usize, rng: &mut impl Rng) -> MultiField {
    let grid = RegularGrid::new(nx, ny, 1);
    let n = grid.vertex_count();
    let fields = (0..2)
        .map(|k| {
            let values = (0..n).map(|_| rng.gen::<f64>()).collect();
            VertexField::new(format!("f{k}"), values).expect("finite values")
        })
        .collect();
    MultiField::new(Carrier::Grid(grid), fields).expect("matching lengths")
}
