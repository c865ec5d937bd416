//! Multi-Dimensional Persistence Diagram.
//!
//! For two fields, every point `x₁` of the first Reeb graph's diagram is combined with
//! every point of `PD(RG_{f₂^p})` for each first-level node `p` whose value lies in the
//! closed interval `pI(x₁)`. More fields nest the same construction.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jcn::QuantizationSpec;
use crate::mdrg::Mdrg;
use crate::persistence::{compute_reeb_pd, PersistenceDiagram, PersistencePoint};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Diagrams laid out like the [`Mdrg`] they were computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagramTree {
    pub diagram: PersistenceDiagram,
    pub children: Vec<DiagramTree>,
}

impl DiagramTree {
    /// Diagram of every graph in a degeneracy-resolved MDRG.
    pub fn compute(mdrg: &Mdrg) -> Result<Self> {
        let diagram = compute_reeb_pd(&mdrg.graph)?;
        #[cfg(feature = "parallel")]
        let it = mdrg.children.par_iter();
        #[cfg(not(feature = "parallel"))]
        let it = mdrg.children.iter();
        let children = it.map(DiagramTree::compute).collect::<Result<Vec<_>>>()?;
        Ok(Self { diagram, children })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MdpdPoint {
    pub factors: Vec<PersistencePoint>,
    /// MDRG node ids `p₁, …, p_{n−1}`, one per level of the hierarchy above the last.
    pub node_path: Vec<usize>,
    pub level_path: Vec<u32>,
}

impl MdpdPoint {
    pub fn dims(&self) -> Vec<u8> {
        self.factors.iter().map(PersistencePoint::dim).collect()
    }

    /// All `2n` coordinates `(b₁, d₁, …, b_n, d_n)`.
    pub fn coords(&self) -> impl Iterator<Item = f64> + '_ {
        self.factors.iter().flat_map(|p| [p.birth, p.death])
    }

    /// Product of the persistence interval lengths.
    pub fn persistence_measure(&self) -> f64 {
        self.factors
            .iter()
            .map(PersistencePoint::persistence)
            .product()
    }

    /// Half the largest factor persistence: the `L∞` distance to the diagonal point that
    /// projects every factor onto its midpoint.
    pub fn diagonal_distance(&self) -> f64 {
        0.5 * self
            .factors
            .iter()
            .map(PersistencePoint::persistence)
            .fold(0.0, f64::max)
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        let a = self
            .coords()
            .zip(other.coords())
            .map(|(x, y)| x.total_cmp(&y));
        self.node_path
            .cmp(&other.node_path)
            .then(self.level_path.cmp(&other.level_path))
            .then(self.dims().cmp(&other.dims()))
            .then(a.fold(Ordering::Equal, Ordering::then))
            .then_with(|| {
                let kinds = |p: &Self| -> Vec<_> {
                    p.factors.iter().map(|f| (f.kind, f.superlevel)).collect()
                };
                kinds(self).cmp(&kinds(other))
            })
            .then(self.factors.len().cmp(&other.factors.len()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mdpd {
    pub spec: QuantizationSpec,
    pub points: Vec<MdpdPoint>,
}

#[derive(Serialize, Deserialize)]
struct PointJson {
    factors: Vec<[f64; 2]>,
    dims: Vec<u8>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    kinds: Vec<crate::persistence::Kind>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    superlevel: Vec<bool>,
    node_path: Vec<usize>,
    level_path: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct MdpdJson {
    spec: QuantizationSpec,
    points: Vec<PointJson>,
}

impl Mdpd {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn field_count(&self) -> usize {
        self.spec.field_count()
    }

    /// Points attached to first-level node `p` (the subset `PD^p`).
    pub fn subset(&self, p: usize) -> impl Iterator<Item = &MdpdPoint> {
        self.points
            .iter()
            .filter(move |x| x.node_path.first() == Some(&p))
    }

    /// Orders points canonically so equal multisets compare equal.
    pub fn canonicalize(&mut self) {
        self.points.sort_by(MdpdPoint::total_cmp);
    }

    /// Lexicographic total order over canonical point lists.
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        let by_points = self
            .points
            .iter()
            .zip(&other.points)
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal);
        by_points.then(self.points.len().cmp(&other.points.len()))
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = MdpdJson {
            spec: self.spec.clone(),
            points: self
                .points
                .iter()
                .map(|p| PointJson {
                    factors: p.factors.iter().map(|f| [f.birth, f.death]).collect(),
                    dims: p.dims(),
                    kinds: p.factors.iter().map(|f| f.kind).collect(),
                    superlevel: p.factors.iter().map(|f| f.superlevel).collect(),
                    node_path: p.node_path.clone(),
                    level_path: p.level_path.clone(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        use crate::persistence::Kind;
        let doc: MdpdJson = serde_json::from_str(text)?;
        let points = doc
            .points
            .into_iter()
            .map(|p| {
                let n = p.factors.len();
                if p.dims.len() != n || p.node_path.len() + 1 != n || p.level_path.len() + 1 != n {
                    return Err(Error::InvalidMdpd("point with inconsistent lengths".into()));
                }
                let factors = p
                    .factors
                    .iter()
                    .enumerate()
                    .map(|(i, &[birth, death])| {
                        let kind = p.kinds.get(i).copied().unwrap_or(if p.dims[i] == 1 {
                            Kind::Extended1
                        } else {
                            Kind::Ordinary0
                        });
                        PersistencePoint {
                            birth,
                            death,
                            kind,
                            superlevel: p.superlevel.get(i).copied().unwrap_or(false),
                        }
                    })
                    .collect();
                Ok(MdpdPoint {
                    factors,
                    node_path: p.node_path,
                    level_path: p.level_path,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut out = Mdpd {
            spec: doc.spec,
            points,
        };
        out.canonicalize();
        Ok(out)
    }
}

/// `mdrg` must be degeneracy-resolved and `diagrams` computed from it. Membership uses the
/// resolved node values.
pub fn construct_mdpd(
    spec: &QuantizationSpec,
    mdrg: &Mdrg,
    diagrams: &DiagramTree,
) -> Result<Mdpd> {
    let n = spec.field_count();
    if n < 2 {
        return Err(Error::TooFewFields(n));
    }
    let mut points = Vec::new();
    collect(mdrg, diagrams, n, &mut points)?;
    let mut out = Mdpd {
        spec: spec.clone(),
        points,
    };
    out.canonicalize();
    Ok(out)
}

fn collect(
    mdrg: &Mdrg,
    diagrams: &DiagramTree,
    depth: usize,
    out: &mut Vec<MdpdPoint>,
) -> Result<()> {
    if depth == 1 {
        out.extend(diagrams.diagram.points().iter().map(|&x| MdpdPoint {
            factors: vec![x],
            node_path: Vec::new(),
            level_path: Vec::new(),
        }));
        return Ok(());
    }
    if mdrg.children.len() != diagrams.children.len() {
        return Err(Error::MissingDiagram(format!(
            "graph with {} children has {} child diagrams",
            mdrg.children.len(),
            diagrams.children.len()
        )));
    }
    // tails of every child, computed once
    let mut tails = Vec::with_capacity(mdrg.children.len());
    for (child, child_pd) in mdrg.children.iter().zip(&diagrams.children) {
        let mut sub = Vec::new();
        collect(child, child_pd, depth - 1, &mut sub)?;
        tails.push(sub);
    }
    for x in diagrams.diagram.points() {
        let (lo, hi) = x.interval();
        for (p, tail) in tails.iter().enumerate() {
            let node = &mdrg.graph.nodes[p];
            if node.value < lo || node.value > hi {
                continue;
            }
            for t in tail {
                let mut factors = Vec::with_capacity(t.factors.len() + 1);
                factors.push(*x);
                factors.extend_from_slice(&t.factors);
                let mut node_path = vec![p];
                node_path.extend_from_slice(&t.node_path);
                let mut level_path = vec![node.level];
                level_path.extend_from_slice(&t.level_path);
                out.push(MdpdPoint {
                    factors,
                    node_path,
                    level_path,
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jcn::FieldQuantization;
    use crate::mdrg::ReebGraph;
    use crate::persistence::Kind;

    fn spec() -> QuantizationSpec {
        QuantizationSpec::new(vec![FieldQuantization::new(0.0, 8.0, 8).unwrap(); 2]).unwrap()
    }

    fn leaf(levels: &[u32]) -> Mdrg {
        Mdrg {
            graph: ReebGraph::from_levels(1, 0.0, 1.0, levels, &[]),
            children: Vec::new(),
        }
    }

    fn pd(points: &[(f64, f64, Kind)]) -> PersistenceDiagram {
        PersistenceDiagram::new(
            points
                .iter()
                .map(|&(b, d, k)| PersistencePoint::new(b, d, k))
                .collect(),
        )
    }

    fn tree(root: PersistenceDiagram, children: Vec<PersistenceDiagram>) -> DiagramTree {
        DiagramTree {
            diagram: root,
            children: children
                .into_iter()
                .map(|d| DiagramTree {
                    diagram: d,
                    children: Vec::new(),
                })
                .collect(),
        }
    }

    #[test]
    fn one_by_one_product() {
        let mdrg = Mdrg {
            graph: ReebGraph::from_levels(0, 0.0, 1.0, &[0], &[]),
            children: vec![leaf(&[0])],
        };
        let d = tree(
            pd(&[(0.0, 1.0, Kind::Extended0)]),
            vec![pd(&[(0.2, 0.7, Kind::Ordinary0)])],
        );
        let m = construct_mdpd(&spec(), &mdrg, &d).unwrap();
        assert_eq!(m.len(), 1);
        let p = &m.points[0];
        assert_eq!(p.coords().collect::<Vec<_>>(), vec![0.0, 1.0, 0.2, 0.7]);
        assert_eq!(p.node_path, vec![0]);
        assert_eq!(p.dims(), vec![0, 0]);
    }

    #[test]
    fn node_outside_interval_contributes_nothing() {
        let mdrg = Mdrg {
            graph: ReebGraph::from_levels(0, 0.0, 1.0, &[2], &[]),
            children: vec![leaf(&[0])],
        };
        let d = tree(
            pd(&[(0.0, 1.0, Kind::Extended0)]),
            vec![pd(&[(0.2, 0.7, Kind::Ordinary0)])],
        );
        assert!(construct_mdpd(&spec(), &mdrg, &d).unwrap().is_empty());
    }

    #[test]
    fn interval_filter_over_two_nodes() {
        let mdrg = Mdrg {
            graph: ReebGraph::from_levels(0, 0.0, 1.0, &[1, 4], &[]),
            children: vec![leaf(&[0]), leaf(&[0])],
        };
        let d = tree(
            pd(&[(0.0, 3.0, Kind::Extended0), (1.0, 2.0, Kind::Ordinary0)]),
            vec![
                pd(&[(0.1, 0.5, Kind::Ordinary0)]),
                pd(&[(0.3, 0.9, Kind::Ordinary0)]),
            ],
        );
        let m = construct_mdpd(&spec(), &mdrg, &d).unwrap();
        assert_eq!(m.len(), 2);
        assert!(m.points.iter().all(|p| p.node_path == vec![0]));
        assert_eq!(m.subset(1).count(), 0);
    }

    #[test]
    fn measure_examples() {
        let mk = |a: (f64, f64), b: (f64, f64)| MdpdPoint {
            factors: vec![
                PersistencePoint::new(a.0, a.1, Kind::Ordinary0),
                PersistencePoint::new(b.0, b.1, Kind::Ordinary0),
            ],
            node_path: vec![0],
            level_path: vec![0],
        };
        assert_eq!(mk((0.0, 1.0), (0.0, 0.5)).persistence_measure(), 0.5);
        assert_eq!(mk((0.0, 1.0), (0.3, 0.3)).persistence_measure(), 0.0);
        assert_eq!(mk((3.0, 0.0), (0.25, 0.75)).persistence_measure(), 1.5);
    }

    #[test]
    fn single_field_is_refused() {
        let s = QuantizationSpec::new(vec![FieldQuantization::new(0.0, 1.0, 2).unwrap()]).unwrap();
        let mdrg = leaf(&[0]);
        let d = tree(pd(&[]), vec![]);
        assert!(matches!(
            construct_mdpd(&s, &mdrg, &d),
            Err(Error::TooFewFields(1))
        ));
    }

    #[test]
    fn missing_child_diagram() {
        let mdrg = Mdrg {
            graph: ReebGraph::from_levels(0, 0.0, 1.0, &[0, 1], &[(0, 1)]),
            children: vec![leaf(&[0]), leaf(&[0])],
        };
        let d = tree(pd(&[(0.0, 1.0, Kind::Extended0)]), vec![pd(&[])]);
        assert!(matches!(
            construct_mdpd(&spec(), &mdrg, &d),
            Err(Error::MissingDiagram(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let mdrg = Mdrg {
            graph: ReebGraph::from_levels(0, 0.0, 1.0, &[0], &[]),
            children: vec![leaf(&[0])],
        };
        let d = tree(
            pd(&[(0.0, 1.0, Kind::Extended0)]),
            vec![pd(&[(0.7, 0.2, Kind::Extended1)])],
        );
        let m = construct_mdpd(&spec(), &mdrg, &d).unwrap();
        let back = Mdpd::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
