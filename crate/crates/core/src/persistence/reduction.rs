//! Extended persistence by Z/2 boundary-matrix reduction on the coned graph.
//!
//! Filtration (cone apex `ω` first):
//! - ascending part: each node `v` in `(value, id)` order, followed by its arcs to lower
//!   nodes, each arc valued at its upper endpoint;
//! - descending part: each node `v` in reverse order contributes the cone edge `ωv`
//!   (value `f(v)`) followed by the cone triangles `ωe` over its arcs to higher nodes,
//!   valued at `f(v)`.

use super::degeneracy::{degrees, is_critical, ranks};
use super::{Kind, PersistenceDiagram, PersistencePoint};
use crate::error::{Error, Result};
use crate::mdrg::ReebGraph;

#[derive(Debug, Clone, Copy)]
enum Cell {
    Apex,
    Vertex,
    Arc,
    ConeEdge,
    ConeTriangle,
}

pub fn compute_reeb_pd(rg: &ReebGraph) -> Result<PersistenceDiagram> {
    let rank = ranks(rg);
    check_resolved(rg, &rank)?;

    let n = rg.nodes.len();
    let f = |v: usize| rg.nodes[v].value;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| rank[v]);

    let mut lower = vec![Vec::new(); n];
    let mut higher = vec![Vec::new(); n];
    for &(a, b) in &rg.arcs {
        let (lo, hi) = if rank[a] < rank[b] { (a, b) } else { (b, a) };
        lower[hi].push(lo);
        higher[lo].push(hi);
    }
    for l in lower.iter_mut().chain(higher.iter_mut()) {
        l.sort_by_key(|&w| rank[w]);
    }

    let size = 1 + 2 * (n + rg.arcs.len());
    let mut cells = Vec::with_capacity(size);
    let mut values = Vec::with_capacity(size);
    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(size);
    let mut vertex_idx = vec![0; n];
    let mut cone_idx = vec![0; n];
    let mut arc_idx = std::collections::HashMap::with_capacity(rg.arcs.len());

    cells.push(Cell::Apex);
    values.push(f64::NEG_INFINITY);
    columns.push(Vec::new());
    for &v in &order {
        vertex_idx[v] = cells.len();
        cells.push(Cell::Vertex);
        values.push(f(v));
        columns.push(Vec::new());
        for &u in &lower[v] {
            arc_idx.insert((u, v), cells.len());
            cells.push(Cell::Arc);
            values.push(f(v));
            columns.push(sorted(vec![vertex_idx[u], vertex_idx[v]]));
        }
    }
    for &v in order.iter().rev() {
        cone_idx[v] = cells.len();
        cells.push(Cell::ConeEdge);
        values.push(f(v));
        columns.push(vec![0, vertex_idx[v]]);
        for &w in higher[v].iter().rev() {
            cells.push(Cell::ConeTriangle);
            values.push(f(v));
            columns.push(sorted(vec![arc_idx[&(v, w)], cone_idx[v], cone_idx[w]]));
        }
    }

    let pairs = reduce(&mut columns);

    let mut points = Vec::new();
    for (i, j) in pairs {
        let (birth, death) = (values[i], values[j]);
        match (cells[i], cells[j]) {
            (Cell::Vertex, Cell::Arc) => {
                if birth < death {
                    points.push(PersistencePoint::new(birth, death, Kind::Ordinary0));
                }
            }
            (Cell::Vertex, Cell::ConeEdge) => {
                points.push(PersistencePoint::new(birth, death, Kind::Extended0));
            }
            (Cell::Arc, Cell::ConeTriangle) => {
                points.push(PersistencePoint::new(birth, death, Kind::Extended1));
            }
            (Cell::ConeEdge, Cell::ConeTriangle) => {
                // born at a maximum, killed at an up-fork: stored as (saddle, maximum)
                if death < birth {
                    points.push(PersistencePoint {
                        birth: death,
                        death: birth,
                        kind: Kind::Ordinary0,
                        superlevel: true,
                    });
                }
            }
            (a, b) => unreachable!("impossible pair {a:?} / {b:?}"),
        }
    }
    Ok(PersistenceDiagram::new(points))
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

/// Standard column reduction; returns `(low, column)` pairs.
fn reduce(columns: &mut [Vec<usize>]) -> Vec<(usize, usize)> {
    let mut owner: Vec<Option<usize>> = vec![None; columns.len()];
    let mut pairs = Vec::new();
    for j in 0..columns.len() {
        let mut col = std::mem::take(&mut columns[j]);
        while let Some(&low) = col.last() {
            match owner[low] {
                Some(k) => col = sym_diff(&col, &columns[k]),
                None => break,
            }
        }
        if let Some(&low) = col.last() {
            owner[low] = Some(j);
            pairs.push((low, j));
        }
        columns[j] = col;
    }
    pairs
}

fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn check_resolved(rg: &ReebGraph, rank: &[usize]) -> Result<()> {
    for &(a, b) in &rg.arcs {
        if rg.nodes[a].value == rg.nodes[b].value {
            return Err(Error::UnresolvedDegeneracy {
                node: a,
                reason: format!("flat arc to node {b}"),
            });
        }
    }
    let deg = degrees(rg, rank);
    let mut critical: Vec<usize> = (0..rg.nodes.len())
        .filter(|&v| is_critical(deg[v]))
        .collect();
    critical.sort_by_key(|&v| rank[v]);
    for w in critical.windows(2) {
        if rg.nodes[w[0]].value == rg.nodes[w[1]].value {
            return Err(Error::UnresolvedDegeneracy {
                node: w[1],
                reason: format!("critical value shared with node {}", w[0]),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::{resolve_degeneracies, sweep_pd0};

    fn graph(values: &[f64], arcs: &[(usize, usize)]) -> ReebGraph {
        let mut rg = ReebGraph::from_levels(0, 0.0, 1.0, &vec![0; values.len()], arcs);
        for (n, &v) in rg.nodes.iter_mut().zip(values) {
            n.value = v;
            n.level = v.floor() as u32;
        }
        rg
    }

    fn pts(d: &PersistenceDiagram) -> Vec<(f64, f64, Kind, bool)> {
        d.points()
            .iter()
            .map(|p| (p.birth, p.death, p.kind, p.superlevel))
            .collect()
    }

    #[test]
    fn monotone_arc() {
        let pd = compute_reeb_pd(&graph(&[0.0, 1.0], &[(0, 1)])).unwrap();
        assert_eq!(pts(&pd), vec![(0.0, 1.0, Kind::Extended0, false)]);
    }

    #[test]
    fn four_cycle() {
        let rg = graph(&[0.0, 1.0, 2.0, 3.0], &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        let pd = compute_reeb_pd(&rg).unwrap();
        assert_eq!(
            pts(&pd),
            vec![
                (0.0, 3.0, Kind::Extended0, false),
                (3.0, 0.0, Kind::Extended1, false)
            ]
        );
    }

    #[test]
    fn y_shape_has_ordinary_pairs_on_both_sides() {
        // two minima joined at a down-fork, then an up-fork splitting into two maxima
        let rg = graph(
            &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
            &[(0, 2), (1, 2), (2, 3), (3, 4), (3, 5)],
        );
        let pd = compute_reeb_pd(&rg).unwrap();
        assert_eq!(
            pts(&pd),
            vec![
                (1.0, 2.0, Kind::Ordinary0, false),
                (3.0, 4.0, Kind::Ordinary0, true),
                (0.0, 5.0, Kind::Extended0, false),
            ]
        );
    }

    #[test]
    fn one_extended0_per_component() {
        let rg = graph(&[0.0, 1.0, 2.0, 3.5], &[(0, 1)]);
        let pd = compute_reeb_pd(&rg).unwrap();
        let ext: Vec<_> = pd
            .of_kind(Kind::Extended0)
            .map(|p| (p.birth, p.death))
            .collect();
        assert_eq!(ext, vec![(0.0, 1.0), (2.0, 2.0), (3.5, 3.5)]);
    }

    #[test]
    fn unresolved_ties_are_rejected() {
        let rg = graph(&[0.0, 1.0, 1.0], &[(0, 1), (0, 2)]);
        assert!(matches!(
            compute_reeb_pd(&rg),
            Err(Error::UnresolvedDegeneracy { .. })
        ));
        let flat = graph(&[0.0, 0.0], &[(0, 1)]);
        assert!(compute_reeb_pd(&flat).is_err());
    }

    #[test]
    fn translation_shifts_every_point() {
        let rg = graph(
            &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
            &[(0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (1, 4)],
        );
        let mut moved = rg.clone();
        for n in moved.nodes.iter_mut() {
            n.value += 10.0;
        }
        let a = compute_reeb_pd(&rg).unwrap();
        let b = compute_reeb_pd(&moved).unwrap();
        for (p, q) in a.points().iter().zip(b.points()) {
            assert_eq!((p.birth + 10.0, p.death + 10.0), (q.birth, q.death));
        }
    }

    #[test]
    fn sweep_matches_reduction_on_zero_dimensional_part() {
        let rg = ReebGraph::from_levels(
            0,
            0.0,
            1.0,
            &[0, 3, 1, 2, 4, 2, 0, 5, 3],
            &[
                (0, 2),
                (2, 3),
                (3, 1),
                (1, 4),
                (2, 5),
                (5, 4),
                (6, 5),
                (4, 7),
                (3, 8),
                (6, 3),
            ],
        );
        let rg = resolve_degeneracies(&rg, 1e-3).unwrap();
        let full = compute_reeb_pd(&rg).unwrap();
        let zero: Vec<_> = full
            .points()
            .iter()
            .copied()
            .filter(|p| p.dim() == 0)
            .collect();
        let swept = PersistenceDiagram::new(sweep_pd0(&rg));
        assert_eq!(swept.points(), &zero[..]);
        assert_eq!(full.of_dim(1).count(), rg.cycle_rank());
    }
}
