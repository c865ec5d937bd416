//! Multi-Dimensional Reeb Graph: a Reeb graph of the first field over the JCN, then, for
//! every node of it, the Reeb graph of the next field restricted to that node's joint
//! contours, recursively.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::Result;
use crate::jcn::JointContourNet;
use crate::union_find::UnionFind;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReebNode {
    pub id: usize,
    pub level: u32,
    /// `f̄` of the node: the lower boundary of its level, possibly nudged by degeneracy
    /// resolution.
    pub value: f64,
    /// JCN node ids contracted into this node; empty for nodes added by resolution.
    pub members: Vec<usize>,
    /// Id of the node this one was split from; `None` for nodes that come from the JCN.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub origin: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReebGraph {
    pub field_index: usize,
    pub range_min: f64,
    pub width: f64,
    pub nodes: Vec<ReebNode>,
    /// `(a, b)` with `a < b`, sorted and unique.
    pub arcs: Vec<(usize, usize)>,
}

impl ReebGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes that come straight from the JCN, as opposed to nodes added when splitting
    /// degenerate nodes. They always occupy the first ids.
    pub fn original_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.origin.is_none()).count()
    }

    pub fn level_value(&self, level: u32) -> f64 {
        self.range_min + level as f64 * self.width
    }

    pub fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(a, b) in &self.arcs {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn component_count(&self) -> usize {
        let mut uf = UnionFind::new(self.nodes.len());
        for &(a, b) in &self.arcs {
            uf.union(a, b);
        }
        uf.labels().1
    }

    /// `|arcs| - |nodes| + #components`.
    pub fn cycle_rank(&self) -> usize {
        self.arcs.len() + self.component_count() - self.nodes.len()
    }

    /// Builds a graph directly from node levels and arcs; values are the level boundaries.
    pub fn from_levels(
        field_index: usize,
        range_min: f64,
        width: f64,
        levels: &[u32],
        arcs: &[(usize, usize)],
    ) -> Self {
        let nodes = levels
            .iter()
            .enumerate()
            .map(|(id, &level)| ReebNode {
                id,
                level,
                value: range_min + level as f64 * width,
                members: vec![id],
                origin: None,
            })
            .collect();
        let arcs: BTreeSet<(usize, usize)> = arcs
            .iter()
            .filter(|(a, b)| a != b)
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        Self {
            field_index,
            range_min,
            width,
            nodes,
            arcs: arcs.into_iter().collect(),
        }
    }
}

/// Reeb graph of `field_index` over the JCN subgraph induced by `members` (JCN node ids).
pub fn extract_reeb(jcn: &JointContourNet, members: &[usize], field_index: usize) -> ReebGraph {
    let mut members = members.to_vec();
    members.sort_unstable();
    members.dedup();
    let local: BTreeMap<usize, usize> = members.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let level = |m: usize| jcn.nodes[m].levels[field_index];

    let mut inside = Vec::new();
    let mut uf = UnionFind::new(members.len());
    for &(a, b) in &jcn.edges {
        if let (Some(&la), Some(&lb)) = (local.get(&a), local.get(&b)) {
            inside.push((la, lb));
            if level(a) == level(b) {
                uf.union(la, lb);
            }
        }
    }
    let (labels, count) = uf.labels();

    let mut groups = vec![Vec::new(); count];
    for (i, &c) in labels.iter().enumerate() {
        groups[c].push(members[i]);
    }
    let q = &jcn.spec.fields[field_index];
    let nodes = groups
        .into_iter()
        .enumerate()
        .map(|(id, group)| {
            let l = level(group[0]);
            ReebNode {
                id,
                level: l,
                value: q.level_value(l),
                members: group,
                origin: None,
            }
        })
        .collect();
    let arcs: BTreeSet<(usize, usize)> = inside
        .into_iter()
        .filter_map(|(a, b)| {
            let (x, y) = (labels[a], labels[b]);
            (x != y).then(|| (x.min(y), x.max(y)))
        })
        .collect();

    ReebGraph {
        field_index,
        range_min: q.range_min,
        width: q.width(),
        nodes,
        arcs: arcs.into_iter().collect(),
    }
}

/// `children[p]` is the restricted graph of original node `p`; empty at the last field.
#[derive(Debug, Clone, PartialEq)]
pub struct Mdrg {
    pub graph: ReebGraph,
    pub children: Vec<Mdrg>,
}

#[derive(Serialize)]
struct MdrgJson<'a> {
    graph: &'a ReebGraph,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    children: BTreeMap<usize, MdrgJson<'a>>,
}

impl Mdrg {
    pub fn depth(&self) -> usize {
        1 + self.children.first().map_or(0, Mdrg::depth)
    }

    /// Apply `f` to every graph, keeping the hierarchy.
    pub fn try_map(&self, f: &(dyn Fn(&ReebGraph) -> Result<ReebGraph> + Sync)) -> Result<Mdrg> {
        Ok(Mdrg {
            graph: f(&self.graph)?,
            children: self
                .children
                .iter()
                .map(|c| c.try_map(f))
                .collect::<Result<_>>()?,
        })
    }

    /// Every graph, depth first, parents before children.
    pub fn graphs(&self) -> Vec<&ReebGraph> {
        let mut out = vec![&self.graph];
        for c in &self.children {
            out.extend(c.graphs());
        }
        out
    }

    fn json(&self) -> MdrgJson<'_> {
        MdrgJson {
            graph: &self.graph,
            children: self
                .children
                .iter()
                .enumerate()
                .map(|(i, c)| (i, c.json()))
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.json())?)
    }
}

pub fn build_mdrg(jcn: &JointContourNet) -> Mdrg {
    let all: Vec<usize> = (0..jcn.node_count()).collect();
    build_from(jcn, &all, 0)
}

fn build_from(jcn: &JointContourNet, members: &[usize], field_index: usize) -> Mdrg {
    let graph = extract_reeb(jcn, members, field_index);
    let next = field_index + 1;
    let children = if next < jcn.field_count() {
        #[cfg(feature = "parallel")]
        let it = graph.nodes.par_iter();
        #[cfg(not(feature = "parallel"))]
        let it = graph.nodes.iter();
        it.map(|node| build_from(jcn, &node.members, next))
            .collect()
    } else {
        Vec::new()
    };
    Mdrg { graph, children }
}
