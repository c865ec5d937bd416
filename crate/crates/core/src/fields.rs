//! Shape descriptor fields: normalized geodesic (μ_n) and Euclidean (d2_n) distance sums.
//!
//! Both integrate a distance over all vertices `u`, weighted by `w(u)`, one third of the
//! area of the triangles incident to `u`:
//!
//! ```text
//! raw(v) = Σ_u dist(v, u) · w(u)
//! ```
//!
//! and then min-max normalize into `[0, 1]`. Meshes without any triangle area (edge
//! graphs, degenerate soups) fall back to unit weights.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::mesh::{SimplicialMesh, VertexField};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub fn geodesic_field(mesh: &SimplicialMesh) -> Result<VertexField> {
    let n = mesh.vertex_count();
    if n == 0 {
        return Err(Error::EmptyMesh);
    }
    let adj = adjacency(mesh);
    if let Some(v) = unreachable_vertex(&adj) {
        return Err(Error::Disconnected(v));
    }
    let weights = area_weights(mesh);
    let raw = per_vertex(n, |v| {
        let dist = dijkstra(&adj, v);
        dist.iter().zip(&weights).map(|(d, w)| d * w).sum()
    });
    VertexField::new("geodesic", normalize(raw))
}

pub fn euclidean_field(mesh: &SimplicialMesh) -> Result<VertexField> {
    let n = mesh.vertex_count();
    if n < 2 {
        return Err(Error::DegenerateMesh);
    }
    let weights = area_weights(mesh);
    let pts = mesh.vertices();
    let raw = per_vertex(n, |v| {
        pts.iter()
            .zip(&weights)
            .map(|(u, w)| distance(&pts[v], u) * w)
            .sum()
    });
    VertexField::new("euclidean", normalize(raw))
}

/// One third of the incident triangle area per vertex, or all ones if the mesh has no area.
pub fn area_weights(mesh: &SimplicialMesh) -> Vec<f64> {
    let mut w = vec![0.0; mesh.vertex_count()];
    let pts = mesh.vertices();
    for [a, b, c] in mesh.triangles() {
        let area = triangle_area(&pts[a], &pts[b], &pts[c]);
        for i in [a, b, c] {
            w[i] += area / 3.0;
        }
    }
    if w.iter().sum::<f64>() <= 0.0 {
        w.iter_mut().for_each(|x| *x = 1.0);
    }
    w
}

/// Min-max normalize; an input that is constant up to rounding maps to all zeros.
pub fn normalize(mut values: Vec<f64>) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let flat = span <= 1e-12 * hi.abs().max(lo.abs());
    for v in values.iter_mut() {
        *v = if flat { 0.0 } else { (*v - lo) / span };
    }
    values
}

fn per_vertex(n: usize, f: impl Fn(usize) -> f64 + Sync + Send) -> Vec<f64> {
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

fn triangle_area(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> f64 {
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let x = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

fn adjacency(mesh: &SimplicialMesh) -> Vec<Vec<(usize, f64)>> {
    let pts = mesh.vertices();
    let mut adj = vec![Vec::new(); mesh.vertex_count()];
    for &(a, b) in mesh.edges() {
        let w = distance(&pts[a], &pts[b]);
        adj[a].push((b, w));
        adj[b].push((a, w));
    }
    adj
}

fn unreachable_vertex(adj: &[Vec<(usize, f64)>]) -> Option<usize> {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(u, _) in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen.iter().position(|s| !s)
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) fn dijkstra(adj: &[Vec<(usize, f64)>], source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry(0.0, source));
    while let Some(Entry(d, v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(u, w) in &adj[v] {
            let nd = d + w;
            if nd < dist[u] {
                dist[u] = nd;
                heap.push(Entry(nd, u));
            }
        }
    }
    dist
}
