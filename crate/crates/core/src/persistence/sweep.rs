//! Union-find sweeps for the zero-dimensional part of the diagram. Same `(value, id)`
//! order and conventions as the matrix reduction, so the outputs agree point for point.

use super::degeneracy::ranks;
use super::{Kind, PersistencePoint};
use crate::mdrg::ReebGraph;
use crate::union_find::UnionFind;

/// Ordinary pairs of the sublevel and superlevel sweeps plus one `Extended0` point per
/// component.
pub fn sweep_pd0(rg: &ReebGraph) -> Vec<PersistencePoint> {
    let n = rg.nodes.len();
    let rank = ranks(rg);
    let f = |v: usize| rg.nodes[v].value;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| rank[v]);
    let adj = rg.neighbours();

    let mut points = Vec::new();

    // sublevel: components remember their oldest (lowest) node
    let mut uf = UnionFind::new(n);
    let mut oldest: Vec<usize> = (0..n).collect();
    for &v in &order {
        let mut lower: Vec<usize> = adj[v]
            .iter()
            .copied()
            .filter(|&u| rank[u] < rank[v])
            .collect();
        lower.sort_by_key(|&u| rank[u]);
        for u in lower {
            let (ru, rv) = (uf.find(u), uf.find(v));
            if ru == rv {
                continue;
            }
            let (a, b) = (oldest[ru], oldest[rv]);
            let (elder, younger) = if rank[a] < rank[b] { (a, b) } else { (b, a) };
            if f(younger) < f(v) {
                points.push(PersistencePoint::new(f(younger), f(v), Kind::Ordinary0));
            }
            uf.union(ru, rv);
            let r = uf.find(v);
            oldest[r] = elder;
        }
    }
    let mut lowest = vec![usize::MAX; n];
    let mut highest = vec![usize::MAX; n];
    for &v in &order {
        let r = uf.find(v);
        if lowest[r] == usize::MAX {
            lowest[r] = v;
        }
        highest[r] = v;
    }
    for r in 0..n {
        if lowest[r] != usize::MAX {
            points.push(PersistencePoint::new(
                f(lowest[r]),
                f(highest[r]),
                Kind::Extended0,
            ));
        }
    }

    // superlevel: components remember their oldest (highest) node
    let mut uf = UnionFind::new(n);
    let mut oldest: Vec<usize> = (0..n).collect();
    for &v in order.iter().rev() {
        let mut upper: Vec<usize> = adj[v]
            .iter()
            .copied()
            .filter(|&u| rank[u] > rank[v])
            .collect();
        upper.sort_by_key(|&u| std::cmp::Reverse(rank[u]));
        for u in upper {
            let (ru, rv) = (uf.find(u), uf.find(v));
            if ru == rv {
                continue;
            }
            let (a, b) = (oldest[ru], oldest[rv]);
            let (elder, younger) = if rank[a] > rank[b] { (a, b) } else { (b, a) };
            if f(v) < f(younger) {
                points.push(PersistencePoint {
                    birth: f(v),
                    death: f(younger),
                    kind: Kind::Ordinary0,
                    superlevel: true,
                });
            }
            uf.union(ru, rv);
            let r = uf.find(v);
            oldest[r] = elder;
        }
    }
    points
}
