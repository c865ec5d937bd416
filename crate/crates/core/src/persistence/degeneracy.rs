use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::mdrg::{ReebGraph, ReebNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Degree {
    pub up: usize,
    pub down: usize,
}

/// Anything other than a regular `(1, 1)` node, including isolated nodes.
pub fn is_critical(d: Degree) -> bool {
    !(d.up == 1 && d.down == 1)
}

/// Number of critical nodes under the `(value, id)` order.
pub fn critical_count(rg: &ReebGraph) -> usize {
    let rank = ranks(rg);
    degrees(rg, &rank)
        .into_iter()
        .filter(|&d| is_critical(d))
        .count()
}

pub fn default_epsilon(width: f64) -> f64 {
    1e-6 * width
}

/// Position of every node in the `(value, id)` order.
pub(crate) fn ranks(rg: &ReebGraph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..rg.nodes.len()).collect();
    order.sort_by(|&a, &b| {
        rg.nodes[a]
            .value
            .total_cmp(&rg.nodes[b].value)
            .then(a.cmp(&b))
    });
    let mut rank = vec![0; order.len()];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    rank
}

pub(crate) fn degrees(rg: &ReebGraph, rank: &[usize]) -> Vec<Degree> {
    let mut deg = vec![Degree { up: 0, down: 0 }; rg.nodes.len()];
    for &(a, b) in &rg.arcs {
        let (lo, hi) = if rank[a] < rank[b] { (a, b) } else { (b, a) };
        deg[lo].up += 1;
        deg[hi].down += 1;
    }
    deg
}

struct Builder<'a> {
    nodes: Vec<ReebNode>,
    arcs: Vec<(usize, usize)>,
    epsilon: f64,
    origin: &'a ReebNode,
    offset: usize,
}

impl Builder<'_> {
    fn fresh(&mut self) -> usize {
        self.offset += 1;
        let id = self.nodes.len();
        self.nodes.push(ReebNode {
            id,
            level: self.origin.level,
            value: self.origin.value + self.offset as f64 * self.epsilon,
            members: Vec::new(),
            origin: Some(self.origin.id),
        });
        id
    }

    fn link(&mut self, a: usize, b: usize) {
        self.arcs.push((a, b));
    }
}

/// Splits every node with up- or down-degree above one into a chain of simple forks at
/// values `v, v + ε, v + 2ε, ...`, then nudges tied critical values apart in `(value, id)`
/// order. Original nodes keep their ids; chain nodes are appended.
///
/// Arcs must join nodes of different values, which holds for every graph extracted from a
/// JCN.
pub fn resolve_degeneracies(rg: &ReebGraph, epsilon: f64) -> Result<ReebGraph> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    if let Some(&(a, b)) = rg
        .arcs
        .iter()
        .find(|&&(a, b)| rg.nodes[a].value == rg.nodes[b].value)
    {
        return Err(Error::UnresolvedDegeneracy {
            node: a,
            reason: format!("flat arc to node {b}"),
        });
    }
    let rank = ranks(rg);
    let adj = rg.neighbours();

    let mut nodes = rg.nodes.clone();
    let mut inner_arcs = Vec::new();
    // (node, neighbour) -> node of the chain that carries the arc
    let mut attach: HashMap<(usize, usize), usize> = HashMap::new();

    for v in 0..rg.nodes.len() {
        let mut down: Vec<usize> = adj[v]
            .iter()
            .copied()
            .filter(|&w| rank[w] < rank[v])
            .collect();
        let mut up: Vec<usize> = adj[v]
            .iter()
            .copied()
            .filter(|&w| rank[w] > rank[v])
            .collect();
        if down.len() <= 1 && up.len() <= 1 {
            continue;
        }
        down.sort_by_key(|&w| rank[w]);
        up.sort_by_key(|&w| rank[w]);

        let mut b = Builder {
            nodes,
            arcs: Vec::new(),
            epsilon,
            origin: &rg.nodes[v],
            offset: 0,
        };
        let mut cur = v;
        match down.len() {
            0 => {
                // v stays the minimum, forks start above it
                let f = b.fresh();
                b.link(cur, f);
                cur = f;
            }
            1 => {
                attach.insert((v, down[0]), v);
            }
            d => {
                attach.insert((v, down[0]), v);
                attach.insert((v, down[1]), v);
                for &w in &down[2..] {
                    let next = b.fresh();
                    b.link(cur, next);
                    cur = next;
                    attach.insert((v, w), cur);
                }
                debug_assert_eq!(b.offset, d - 2);
                match up.len() {
                    0 => {
                        let top = b.fresh();
                        b.link(cur, top);
                    }
                    1 => {
                        attach.insert((v, up[0]), cur);
                    }
                    _ => {
                        let f = b.fresh();
                        b.link(cur, f);
                        cur = f;
                    }
                }
            }
        }
        if up.len() >= 2 {
            let u = up.len();
            for (j, &w) in up[..u - 1].iter().enumerate() {
                attach.insert((v, w), cur);
                if j + 2 < u {
                    let next = b.fresh();
                    b.link(cur, next);
                    cur = next;
                }
            }
            attach.insert((v, up[u - 1]), cur);
        }
        inner_arcs.extend(b.arcs);
        nodes = b.nodes;
    }

    let end = |v: usize, w: usize| attach.get(&(v, w)).copied().unwrap_or(v);
    let arcs: BTreeSet<(usize, usize)> = rg
        .arcs
        .iter()
        .map(|&(a, b)| (end(a, b), end(b, a)))
        .chain(inner_arcs)
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();

    let mut out = ReebGraph {
        field_index: rg.field_index,
        range_min: rg.range_min,
        width: rg.width,
        nodes,
        arcs: arcs.into_iter().collect(),
    };

    // tie-break critical values
    let rank = ranks(&out);
    let deg = degrees(&out, &rank);
    let mut critical: Vec<usize> = (0..out.nodes.len())
        .filter(|&v| is_critical(deg[v]))
        .collect();
    critical.sort_by_key(|&v| rank[v]);
    let mut prev = f64::NEG_INFINITY;
    for v in critical {
        let node = &mut out.nodes[v];
        if node.value <= prev {
            let nudged = prev + epsilon;
            if nudged <= prev {
                return Err(Error::InvalidEpsilon(epsilon));
            }
            node.value = nudged;
        }
        prev = node.value;
    }

    let limit = out.width / 2.0;
    for node in &out.nodes {
        let offset = node.value - out.level_value(node.level);
        if offset >= limit {
            return Err(Error::EpsilonTooLarge {
                epsilon,
                offset,
                limit,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn allowed(d: Degree) -> bool {
        matches!(
            (d.up, d.down),
            (0, 0) | (0, 1) | (1, 0) | (1, 1) | (2, 1) | (1, 2)
        )
    }

    fn check_resolved(rg: &ReebGraph) {
        let rank = ranks(rg);
        let deg = degrees(rg, &rank);
        assert!(deg.iter().all(|&d| allowed(d)), "{deg:?}");
        let mut vals: Vec<f64> = (0..rg.nodes.len())
            .filter(|&v| is_critical(deg[v]))
            .map(|v| rg.nodes[v].value)
            .collect();
        vals.sort_by(f64::total_cmp);
        assert!(vals.windows(2).all(|w| w[0] < w[1]), "{vals:?}");
    }

    #[test]
    fn morse_path_is_unchanged() {
        let rg = ReebGraph::from_levels(0, 0.0, 1.0, &[0, 1, 2], &[(0, 1), (1, 2)]);
        let out = resolve_degeneracies(&rg, 1e-3).unwrap();
        assert_eq!(out, rg);
    }

    #[test]
    fn triple_down_fork_splits_into_two() {
        // node 3 at level 2 has three down neighbours
        let rg = ReebGraph::from_levels(
            0,
            0.0,
            1.0,
            &[0, 0, 0, 2, 3],
            &[(0, 3), (1, 3), (2, 3), (3, 4)],
        );
        let out = resolve_degeneracies(&rg, 1e-3).unwrap();
        assert_eq!(out.node_count(), 6);
        assert_eq!(out.nodes[5].value, 2.0 + 1e-3);
        assert_eq!(out.nodes[5].origin, Some(3));
        assert_eq!(out.cycle_rank(), rg.cycle_rank());
        assert_eq!(out.component_count(), rg.component_count());
        check_resolved(&out);
    }

    #[test]
    fn tied_maxima_are_nudged() {
        let rg = ReebGraph::from_levels(0, 0.0, 1.0, &[0, 1, 1], &[(0, 1), (0, 2)]);
        let out = resolve_degeneracies(&rg, 1e-3).unwrap();
        // node 0 becomes a minimum plus an up-fork at 1e-3
        assert_eq!(out.node_count(), 4);
        assert_eq!(out.nodes[1].value, 1.0);
        assert_eq!(out.nodes[2].value, 1.0 + 1e-3);
        check_resolved(&out);
    }

    #[test]
    fn mixed_fork_keeps_topology() {
        // a node with two down and three up neighbours inside a cycle-rich graph
        let rg = ReebGraph::from_levels(
            0,
            0.0,
            1.0,
            &[0, 0, 1, 2, 2, 2, 3],
            &[
                (0, 2),
                (1, 2),
                (2, 3),
                (2, 4),
                (2, 5),
                (3, 6),
                (4, 6),
                (5, 6),
                (0, 6),
            ],
        );
        let out = resolve_degeneracies(&rg, 1e-3).unwrap();
        check_resolved(&out);
        assert_eq!(out.cycle_rank(), rg.cycle_rank());
        assert_eq!(out.component_count(), rg.component_count());
    }

    #[test]
    fn flat_arcs_are_rejected() {
        let rg = ReebGraph::from_levels(0, 0.0, 1.0, &[0, 0], &[(0, 1)]);
        assert!(matches!(
            resolve_degeneracies(&rg, 1e-3),
            Err(Error::UnresolvedDegeneracy { .. })
        ));
    }

    #[test]
    fn epsilon_bounds() {
        let rg = ReebGraph::from_levels(0, 0.0, 1.0, &[0, 1, 1, 1], &[(0, 1), (0, 2), (0, 3)]);
        assert!(matches!(
            resolve_degeneracies(&rg, 0.3),
            Err(Error::EpsilonTooLarge { .. })
        ));
        assert!(matches!(
            resolve_degeneracies(&rg, 0.0),
            Err(Error::InvalidEpsilon(_))
        ));
        assert!(resolve_degeneracies(&rg, 0.01).is_ok());
    }
}
