//! Joint Contour Net: the quantized Reeb space of a multi-field.
//!
//! Joint contours are approximated on vertices: two vertices belong to the same node when
//! they share every quantized level and are connected through vertices with that same
//! level tuple.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::MultiField;
use crate::union_find::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldQuantization {
    pub range_min: f64,
    pub range_max: f64,
    pub levels: u32,
}

impl FieldQuantization {
    pub fn new(range_min: f64, range_max: f64, levels: u32) -> Result<Self> {
        if !(range_min.is_finite() && range_max.is_finite()) || range_max <= range_min {
            return Err(Error::InvalidQuantization(format!(
                "range [{range_min}, {range_max}] is empty"
            )));
        }
        if levels == 0 {
            return Err(Error::InvalidQuantization("levels must be >= 1".into()));
        }
        Ok(Self {
            range_min,
            range_max,
            levels,
        })
    }

    pub fn width(&self) -> f64 {
        (self.range_max - self.range_min) / self.levels as f64
    }

    /// `floor((value - min) / width)` clamped to `[0, levels - 1]`.
    /// The flag is true when clamping moved an out-of-range value.
    pub fn quantize(&self, value: f64) -> (u32, bool) {
        let raw = ((value - self.range_min) / self.width()).floor();
        let top = (self.levels - 1) as f64;
        let clamped = raw.clamp(0.0, top);
        let outside = value < self.range_min || value > self.range_max;
        (clamped as u32, outside)
    }

    /// Representative value of a level: its lower bin boundary.
    pub fn level_value(&self, level: u32) -> f64 {
        self.range_min + level as f64 * self.width()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizationSpec {
    pub fields: Vec<FieldQuantization>,
}

impl QuantizationSpec {
    pub fn new(fields: Vec<FieldQuantization>) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::InvalidQuantization("no fields".into()));
        }
        Ok(Self { fields })
    }

    /// Same level count for every field over the observed ranges of `mfs` taken jointly.
    /// A field that is constant over the whole corpus gets the range `[c, c + 1]`.
    pub fn from_corpus<'a>(
        mfs: impl IntoIterator<Item = &'a MultiField>,
        levels: &[u32],
    ) -> Result<Self> {
        let mut ranges: Vec<(f64, f64)> = vec![(f64::INFINITY, f64::NEG_INFINITY); levels.len()];
        let mut any = false;
        for mf in mfs {
            any = true;
            if mf.field_count() != levels.len() {
                return Err(Error::FieldCountMismatch {
                    spec: levels.len(),
                    fields: mf.field_count(),
                });
            }
            for (r, f) in ranges.iter_mut().zip(mf.fields()) {
                if let Some((lo, hi)) = f.range() {
                    r.0 = r.0.min(lo);
                    r.1 = r.1.max(hi);
                }
            }
        }
        if !any {
            return Err(Error::InvalidQuantization("empty corpus".into()));
        }
        let fields = ranges
            .into_iter()
            .zip(levels)
            .map(|((lo, hi), &q)| {
                if !lo.is_finite() {
                    return Err(Error::EmptyMesh);
                }
                let hi = if hi > lo { hi } else { lo + 1.0 };
                FieldQuantization::new(lo, hi, q)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(fields)
    }

    pub fn field_count(&self) -> usize {
        self.fields.len()
    }

    pub fn total_levels(&self) -> u64 {
        self.fields.iter().map(|f| f.levels as u64).product()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JcnNode {
    pub id: usize,
    pub levels: Vec<u32>,
    pub size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointContourNet {
    pub spec: QuantizationSpec,
    pub nodes: Vec<JcnNode>,
    /// `(a, b)` with `a < b`, sorted.
    pub edges: Vec<(usize, usize)>,
    /// Node id of every carrier vertex.
    pub vertex_node: Vec<usize>,
    /// Number of vertex values that fell outside their field range and were clamped.
    pub clamped: usize,
}

#[derive(Serialize, Deserialize)]
struct JcnJson {
    spec: QuantizationSpec,
    nodes: Vec<JcnNode>,
    edges: Vec<[usize; 2]>,
}

impl JointContourNet {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn field_count(&self) -> usize {
        self.spec.field_count()
    }

    pub fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn to_json(&self, with_members: bool) -> Result<String> {
        let doc = JcnJson {
            spec: self.spec.clone(),
            nodes: self
                .nodes
                .iter()
                .map(|n| JcnNode {
                    members: if with_members {
                        n.members.clone()
                    } else {
                        None
                    },
                    ..n.clone()
                })
                .collect(),
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }
}

pub fn build_jcn(mf: &MultiField, spec: &QuantizationSpec) -> Result<JointContourNet> {
    if spec.field_count() != mf.field_count() {
        return Err(Error::FieldCountMismatch {
            spec: spec.field_count(),
            fields: mf.field_count(),
        });
    }
    let n = mf.vertex_count();
    if n == 0 {
        return Err(Error::EmptyMesh);
    }

    let mut clamped = 0;
    let tuples: Vec<Vec<u32>> = (0..n)
        .map(|v| {
            mf.fields()
                .iter()
                .zip(&spec.fields)
                .map(|(f, q)| {
                    let (level, outside) = q.quantize(f.values[v]);
                    clamped += outside as usize;
                    level
                })
                .collect()
        })
        .collect();
    if clamped > 0 {
        log::warn!("{clamped} field values outside the quantization range were clamped");
    }

    let carrier_edges = mf.carrier().edges();
    let mut uf = UnionFind::new(n);
    for &(a, b) in &carrier_edges {
        if tuples[a] == tuples[b] {
            uf.union(a, b);
        }
    }
    let (vertex_node, count) = uf.labels();

    let mut members = vec![Vec::new(); count];
    for (v, &c) in vertex_node.iter().enumerate() {
        members[c].push(v);
    }
    let nodes = members
        .into_iter()
        .enumerate()
        .map(|(id, m)| JcnNode {
            id,
            levels: tuples[m[0]].clone(),
            size: m.len(),
            members: Some(m),
        })
        .collect();

    let edges: BTreeSet<(usize, usize)> = carrier_edges
        .iter()
        .filter_map(|&(a, b)| {
            let (x, y) = (vertex_node[a], vertex_node[b]);
            (x != y).then(|| (x.min(y), x.max(y)))
        })
        .collect();

    Ok(JointContourNet {
        spec: spec.clone(),
        nodes,
        edges: edges.into_iter().collect(),
        vertex_node,
        clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{Carrier, SimplicialMesh, VertexField};

    fn path(values: &[f64]) -> MultiField {
        let n = values.len();
        let mesh = SimplicialMesh::new(
            (0..n).map(|i| [i as f64, 0.0, 0.0]).collect(),
            (1..n).map(|i| vec![i - 1, i]).collect(),
        )
        .unwrap();
        MultiField::new(
            Carrier::Mesh(mesh),
            vec![VertexField::new("f", values.to_vec()).unwrap()],
        )
        .unwrap()
    }

    fn spec1(lo: f64, hi: f64, q: u32) -> QuantizationSpec {
        QuantizationSpec::new(vec![FieldQuantization::new(lo, hi, q).unwrap()]).unwrap()
    }

    #[test]
    fn quantize_examples() {
        let q = FieldQuantization::new(0.0, 1.0, 4).unwrap();
        assert_eq!(q.quantize(0.0), (0, false));
        assert_eq!(q.quantize(1.0), (3, false));
        assert_eq!(q.quantize(0.26), (1, false));
        assert_eq!(q.quantize(-0.5), (0, true));
        assert_eq!(q.quantize(7.0), (3, true));
    }

    #[test]
    fn invalid_specs() {
        assert!(FieldQuantization::new(1.0, 1.0, 2).is_err());
        assert!(FieldQuantization::new(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn single_edge_cases() {
        let same = build_jcn(&path(&[0.1, 0.2]), &spec1(0.0, 1.0, 2)).unwrap();
        assert_eq!((same.node_count(), same.edges.len()), (1, 0));
        let diff = build_jcn(&path(&[0.1, 0.9]), &spec1(0.0, 1.0, 2)).unwrap();
        assert_eq!((diff.node_count(), diff.edges.len()), (2, 1));
    }

    #[test]
    fn alternating_path() {
        let jcn = build_jcn(&path(&[0.0, 1.0, 0.0, 1.0, 0.0]), &spec1(0.0, 1.0001, 2)).unwrap();
        assert_eq!(jcn.node_count(), 5);
        assert_eq!(jcn.edges, vec![(0, 1), (1, 2), (2, 3), (3, 4)]);
        let levels: Vec<u32> = jcn.nodes.iter().map(|n| n.levels[0]).collect();
        assert_eq!(levels, vec![0, 1, 0, 1, 0]);
    }

    #[test]
    fn field_count_must_match() {
        let s =
            QuantizationSpec::new(vec![FieldQuantization::new(0.0, 1.0, 2).unwrap(); 2]).unwrap();
        assert!(matches!(
            build_jcn(&path(&[0.0, 1.0]), &s),
            Err(Error::FieldCountMismatch { .. })
        ));
    }

    #[test]
    fn json_omits_members_unless_asked() {
        let jcn = build_jcn(&path(&[0.1, 0.9]), &spec1(0.0, 1.0, 2)).unwrap();
        let plain: serde_json::Value = serde_json::from_str(&jcn.to_json(false).unwrap()).unwrap();
        assert!(plain["nodes"][0].get("members").is_none());
        assert_eq!(plain["edges"], serde_json::json!([[0, 1]]));
        let full: serde_json::Value = serde_json::from_str(&jcn.to_json(true).unwrap()).unwrap();
        assert_eq!(full["nodes"][1]["members"], serde_json::json!([1]));
    }
}
