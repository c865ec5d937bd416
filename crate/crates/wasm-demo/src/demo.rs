//! Plain-Rust side of the demo: everything the page shows, computed on small grids.

use mdpd::{
    mdrg_distance, Carrier, Kind, MultiField, Pipeline, QuantizationSpec, RegularGrid, Result,
    VertexField,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const MAX_SIZE: usize = 64;
pub const MAX_LEVELS: u32 = 32;

/// Sum of a few Gaussian bumps of random sign, centre and width, scaled to `[0, 1]`.
fn bumps(size: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let count = rng.gen_range(3..=6);
    let params: Vec<[f64; 4]> = (0..count)
        .map(|_| {
            let sign = if rng.gen_bool(0.7) { 1.0 } else { -0.6 };
            [rng.gen(), rng.gen(), rng.gen_range(0.08..0.25), sign]
        })
        .collect();
    let mut values: Vec<f64> = (0..size * size)
        .map(|i| {
            let (x, y) = ((i % size) as f64, (i / size) as f64);
            let s = (size - 1).max(1) as f64;
            params
                .iter()
                .map(|&[cx, cy, w, a]| {
                    let d2 = (x / s - cx).powi(2) + (y / s - cy).powi(2);
                    a * (-d2 / (2.0 * w * w)).exp()
                })
                .sum()
        })
        .collect();
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
            (l.min(v), h.max(v))
        });
    let span = if hi > lo { hi - lo } else { 1.0 };
    for v in &mut values {
        *v = (*v - lo) / span;
    }
    values
}

/// Bivariate field on a `size × size` grid, reproducible from `seed`.
pub fn bump_field(size: usize, seed: u64) -> Result<MultiField> {
    let size = size.clamp(2, MAX_SIZE);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f0 = bumps(size, &mut rng);
    let f1 = bumps(size, &mut rng);
    MultiField::new(
        Carrier::Grid(RegularGrid::new(size, size, 1)),
        vec![VertexField::new("f0", f0)?, VertexField::new("f1", f1)?],
    )
}

fn spec(levels: u32, fields: &[&MultiField]) -> Result<QuantizationSpec> {
    let l = levels.clamp(1, MAX_LEVELS);
    QuantizationSpec::from_corpus(fields.iter().copied(), &[l, l])
}

#[derive(Debug, Serialize)]
pub struct JcnView {
    pub size: usize,
    pub f0: Vec<f64>,
    pub f1: Vec<f64>,
    /// Joint contour of every grid vertex.
    pub contour: Vec<usize>,
    pub nodes: usize,
    pub edges: usize,
}

pub fn jcn_view(size: usize, seed: u64, levels: u32) -> Result<JcnView> {
    let mf = bump_field(size, seed)?;
    let jcn = mdpd::build_jcn(&mf, &spec(levels, &[&mf])?)?;
    let Carrier::Grid(grid) = mf.carrier() else {
        unreachable!("bump fields live on grids")
    };
    Ok(JcnView {
        size: grid.dims[0],
        f0: mf.fields()[0].values.clone(),
        f1: mf.fields()[1].values.clone(),
        contour: jcn.vertex_node.clone(),
        nodes: jcn.node_count(),
        edges: jcn.edges.len(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagramPoint {
    pub birth: f64,
    pub death: f64,
    pub kind: &'static str,
}

#[derive(Debug, Serialize)]
pub struct DiagramView {
    pub points: Vec<DiagramPoint>,
    pub reeb_nodes: usize,
    pub reeb_arcs: usize,
    pub mdpd_points: usize,
}

fn kind_name(kind: Kind, superlevel: bool) -> &'static str {
    match (kind, superlevel) {
        (Kind::Ordinary0, false) => "ordinary",
        (Kind::Ordinary0, true) => "ordinary (superlevel)",
        (Kind::Extended0, _) => "extended 0",
        (Kind::Extended1, _) => "extended 1",
    }
}

/// Persistence diagram of the first field's Reeb graph.
pub fn diagram_view(size: usize, seed: u64, levels: u32) -> Result<DiagramView> {
    let mf = bump_field(size, seed)?;
    let p = Pipeline::run(&mf, &spec(levels, &[&mf])?, None)?;
    let rg = &p.resolved.graph;
    Ok(DiagramView {
        points: p
            .diagrams
            .diagram
            .points()
            .iter()
            .map(|x| DiagramPoint {
                birth: x.birth,
                death: x.death,
                kind: kind_name(x.kind, x.superlevel),
            })
            .collect(),
        reeb_nodes: rg.node_count(),
        reeb_arcs: rg.arcs.len(),
        mdpd_points: p.mdpd()?.len(),
    })
}

#[derive(Debug, Serialize)]
pub struct DistanceView {
    pub value: f64,
    pub q: f64,
    pub points_a: usize,
    pub points_b: usize,
    pub levels_matched: usize,
}

/// Distance between the fields of two seeds, quantized over their joint range.
pub fn distance_view(
    size: usize,
    seed_a: u64,
    seed_b: u64,
    levels: u32,
    q: f64,
) -> Result<DistanceView> {
    let a = bump_field(size, seed_a)?;
    let b = bump_field(size, seed_b)?;
    let s = spec(levels, &[&a, &b])?;
    let (ma, mb) = (
        Pipeline::run(&a, &s, None)?.mdpd()?,
        Pipeline::run(&b, &s, None)?.mdpd()?,
    );
    let d = mdrg_distance(&ma, &mb, q)?;
    Ok(DistanceView {
        value: d.value,
        q,
        points_a: ma.len(),
        points_b: mb.len(),
        levels_matched: d.levels.len(),
    })
}
