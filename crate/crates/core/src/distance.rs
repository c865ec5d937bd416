//! Constrained Wasserstein distance between MDPDs, and the plain Wasserstein distance
//! between Reeb graph diagrams.
//!
//! Matchings must respect three rules:
//! - level consistency: points attached to first-level nodes may only match points whose
//!   node sits at the same quantized level;
//! - contour consistency: all points of one node travel to one node of the other side;
//! - dimension consistency: matched points have equal per-factor homology dimensions.
//!
//! Level consistency makes the global problem split per level: for every level a node-level
//! assignment is solved whose costs are the optimal point matchings between node subsets.
//! With more than two fields the same split repeats down the node path. Anything left
//! unmatched goes to the diagonal at cost `(½ · max factor persistence)^q`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::assignment::{hungarian, CostMatrix};
use crate::error::{Error, Result};
use crate::mdpd::{Mdpd, MdpdPoint};
use crate::mdrg::Mdrg;
use crate::partial_matching::partial_matching_cost;
use crate::persistence::{critical_count, PersistenceDiagram, PersistencePoint};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodePair {
    /// First-level node of the first MDPD, `None` for the diagonal.
    pub f: Option<usize>,
    /// First-level node of the second MDPD, `None` for the diagonal.
    pub g: Option<usize>,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelMatching {
    pub level: u32,
    pub cost: f64,
    pub pairs: Vec<NodePair>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceResult {
    pub value: f64,
    pub q: f64,
    pub levels: Vec<LevelMatching>,
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidQ(q))
    }
}

/// `‖a − b‖∞^q` over all coordinates.
pub fn point_cost(a: &MdpdPoint, b: &MdpdPoint, q: f64) -> f64 {
    let d = a
        .coords()
        .zip(b.coords())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    pow_q(d, q)
}

/// `x^q`, with the common exponents taken without `powf`.
fn pow_q(x: f64, q: f64) -> f64 {
    if q == 1.0 {
        x
    } else if q == 2.0 {
        x * x
    } else {
        x.powf(q)
    }
}

/// Cost of sending every point to its diagonal projection.
pub fn diagonal_cost(points: &[&MdpdPoint], q: f64) -> f64 {
    points.iter().map(|p| pow_q(p.diagonal_distance(), q)).sum()
}

/// Optimal matching cost (not yet rooted) between the point sets of two nodes on the same
/// first-field level.
pub fn inner_distance(a: &[&MdpdPoint], b: &[&MdpdPoint], q: f64) -> Result<f64> {
    check_q(q)?;
    let mut levels = a.iter().chain(b).filter_map(|p| p.level_path.first());
    if let Some(&first) = levels.next() {
        if let Some(&other) = levels.find(|&&l| l != first) {
            return Err(Error::LevelMismatch(first, other));
        }
    }
    Ok(match_groups(a, b, 1, q))
}

pub fn mdrg_distance(f: &Mdpd, g: &Mdpd, q: f64) -> Result<DistanceResult> {
    check_q(q)?;
    if f.spec != g.spec {
        return Err(Error::SpecMismatch);
    }
    if f.field_count() < 2 {
        return Err(Error::TooFewFields(f.field_count()));
    }
    if f == g {
        return Ok(DistanceResult {
            value: 0.0,
            q,
            levels: Vec::new(),
        });
    }
    // evaluate in a canonical argument order so that d(f, g) and d(g, f) agree bit for bit
    let swapped = f.total_cmp(g).is_gt();
    let (a, b) = if swapped { (g, f) } else { (f, g) };
    let mut levels = top_level(a, b, q);
    if swapped {
        for l in &mut levels {
            for p in &mut l.pairs {
                std::mem::swap(&mut p.f, &mut p.g);
            }
        }
    }
    let total: f64 = levels.iter().map(|l| l.cost).sum();
    Ok(DistanceResult {
        value: total.powf(1.0 / q),
        q,
        levels,
    })
}

type Groups<'a> = BTreeMap<u32, BTreeMap<usize, Vec<&'a MdpdPoint>>>;

/// Points keyed by the level and id of their node at `depth`.
fn group<'a>(points: impl IntoIterator<Item = &'a MdpdPoint>, depth: usize) -> Groups<'a> {
    let mut out: Groups = BTreeMap::new();
    for p in points {
        out.entry(p.level_path[depth])
            .or_default()
            .entry(p.node_path[depth])
            .or_default()
            .push(p);
    }
    out
}

fn top_level(a: &Mdpd, b: &Mdpd, q: f64) -> Vec<LevelMatching> {
    let ga = group(&a.points, 0);
    let gb = group(&b.points, 0);
    let mut all_levels: Vec<u32> = ga.keys().chain(gb.keys()).copied().collect();
    all_levels.sort_unstable();
    all_levels.dedup();
    let empty = BTreeMap::new();

    all_levels
        .into_iter()
        .map(|level| {
            let na: Vec<(usize, Vec<&MdpdPoint>)> = ga
                .get(&level)
                .unwrap_or(&empty)
                .clone()
                .into_iter()
                .collect();
            let nb: Vec<(usize, Vec<&MdpdPoint>)> = gb
                .get(&level)
                .unwrap_or(&empty)
                .clone()
                .into_iter()
                .collect();
            let (cost, matching) = assign(&na, &nb, 1, q);
            let pairs = matching
                .into_iter()
                .map(|(i, j, cost)| NodePair {
                    f: i.map(|i| na[i].0),
                    g: j.map(|j| nb[j].0),
                    cost,
                })
                .collect();
            LevelMatching { level, cost, pairs }
        })
        .collect()
}

type Matching = Vec<(Option<usize>, Option<usize>, f64)>;

/// Optimal assignment between node groups, each group allowed to go to the diagonal.
/// `depth` is where matching continues inside a matched pair of groups.
///
/// Inner matchings are evaluated lazily: the assignment is first solved on lower bounds,
/// bounds on matched pairs are replaced by exact costs, and this repeats until the optimum
/// only uses exact entries. Every other entry underestimates its true cost, so that
/// assignment is optimal for the exact matrix.
fn assign(
    na: &[(usize, Vec<&MdpdPoint>)],
    nb: &[(usize, Vec<&MdpdPoint>)],
    depth: usize,
    q: f64,
) -> (f64, Matching) {
    let (m, n) = (na.len(), nb.len());
    let da: Vec<f64> = na.iter().map(|(_, p)| diagonal_cost(p, q)).collect();
    let db: Vec<f64> = nb.iter().map(|(_, p)| diagonal_cost(p, q)).collect();

    let leaf = !na
        .iter()
        .chain(nb)
        .flat_map(|(_, p)| p)
        .any(|p| p.node_path.len() > depth);
    let (la, lb): (Vec<Leaf>, Vec<Leaf>) = if leaf {
        (
            na.iter().map(|(_, p)| Leaf::new(p, q)).collect(),
            nb.iter().map(|(_, p)| Leaf::new(p, q)).collect(),
        )
    } else {
        (Vec::new(), Vec::new())
    };
    let bound = |i: usize, j: usize| {
        if leaf {
            leaf_bound(&la[i], &lb[j])
        } else {
            leaf_bound(&Leaf::new(&na[i].1, q), &Leaf::new(&nb[j].1, q))
        }
    };
    let exact_cost = |i: usize, j: usize| {
        if leaf {
            leaf_cost(&la[i], &lb[j])
        } else {
            match_groups(&na[i].1, &nb[j].1, depth, q)
        }
    };

    let mut inner: Vec<f64> = (0..m * n).map(|x| bound(x / n, x % n)).collect();
    let mut exact = vec![false; m * n];
    let sol = loop {
        let costs = CostMatrix::with_diagonals(|i, j| inner[i * n + j], &da, &db)
            .expect("costs are finite and non-negative");
        let sol = hungarian(&costs);
        let mut refined = false;
        for (i, &j) in sol.columns.iter().enumerate() {
            if i < m && j < n && !exact[i * n + j] {
                inner[i * n + j] = exact_cost(i, j);
                exact[i * n + j] = true;
                refined = true;
            }
        }
        if !refined {
            break sol;
        }
    };

    let mut matching = Vec::new();
    for (i, &j) in sol.columns.iter().enumerate() {
        match (i < m, j < n) {
            (true, true) => matching.push((Some(i), Some(j), inner[i * n + j])),
            (true, false) => matching.push((Some(i), None, da[i])),
            (false, true) => matching.push((None, Some(j), db[j])),
            (false, false) => {}
        }
    }
    (sol.total, matching)
}

/// Matching cost between two point sets that already agree on the first `depth` nodes.
fn match_groups(a: &[&MdpdPoint], b: &[&MdpdPoint], depth: usize, q: f64) -> f64 {
    let deeper = a.iter().chain(b).any(|p| p.node_path.len() > depth);
    if !deeper {
        return leaf_cost(&Leaf::new(a, q), &Leaf::new(b, q));
    }
    let ga = group(a.iter().copied(), depth);
    let gb = group(b.iter().copied(), depth);
    let mut levels: Vec<u32> = ga.keys().chain(gb.keys()).copied().collect();
    levels.sort_unstable();
    levels.dedup();
    let empty = BTreeMap::new();
    levels
        .into_iter()
        .map(|level| {
            let na: Vec<_> = ga
                .get(&level)
                .unwrap_or(&empty)
                .clone()
                .into_iter()
                .collect();
            let nb: Vec<_> = gb
                .get(&level)
                .unwrap_or(&empty)
                .clone()
                .into_iter()
                .collect();
            assign(&na, &nb, depth + 1, q).0
        })
        .sum()
}

/// Points of one group split into classes of equal per-factor dimensions, with flattened
/// coordinates and `q`-th power diagonal costs.
struct Leaf {
    q: f64,
    classes: BTreeMap<Vec<u8>, Class>,
}

#[derive(Default)]
struct Class {
    stride: usize,
    coords: Vec<f64>,
    diag: Vec<f64>,
}

impl Class {
    fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.stride..(i + 1) * self.stride]
    }

    fn len(&self) -> usize {
        self.diag.len()
    }
}

impl Leaf {
    fn new(points: &[&MdpdPoint], q: f64) -> Self {
        let mut classes: BTreeMap<Vec<u8>, Class> = BTreeMap::new();
        for p in points {
            let c = classes.entry(p.dims()).or_default();
            c.stride = 2 * p.factors.len();
            c.coords.extend(p.coords());
            c.diag.push(pow_q(p.diagonal_distance(), q));
        }
        Self { q, classes }
    }

    /// Classes present on either side, with `None` where one side lacks the class.
    fn pairs<'a>(
        &'a self,
        other: &'a Leaf,
    ) -> impl Iterator<Item = (Option<&'a Class>, Option<&'a Class>)> {
        let mut keys: Vec<&Vec<u8>> = self.classes.keys().chain(other.classes.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|k| (self.classes.get(k), other.classes.get(k)))
    }
}

fn linf_q(x: &[f64], y: &[f64], q: f64) -> f64 {
    let d = x
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    pow_q(d, q)
}

fn class_costs(ca: &Class, cb: &Class, q: f64) -> Vec<f64> {
    (0..ca.len())
        .flat_map(|i| (0..cb.len()).map(move |j| linf_q(ca.point(i), cb.point(j), q)))
        .collect()
}

/// Point-level optimal matching.
fn leaf_cost(a: &Leaf, b: &Leaf) -> f64 {
    let q = a.q;
    a.pairs(b)
        .map(|pair| match pair {
            (Some(ca), Some(cb)) => {
                partial_matching_cost(&class_costs(ca, cb, q), &ca.diag, &cb.diag)
            }
            (Some(c), None) | (None, Some(c)) => c.diag.iter().sum(),
            (None, None) => 0.0,
        })
        .sum()
}

/// Lower bound on [`leaf_cost`] and on any constrained matching of the same points: every
/// point pays at least the cheaper of its diagonal and its nearest partner, counted from
/// either side.
fn leaf_bound(a: &Leaf, b: &Leaf) -> f64 {
    let q = a.q;
    a.pairs(b)
        .map(|pair| match pair {
            (Some(ca), Some(cb)) => {
                let mut best_b = cb.diag.clone();
                let mut sum_a = 0.0;
                for i in 0..ca.len() {
                    let x = ca.point(i);
                    let mut best = ca.diag[i];
                    for (j, bb) in best_b.iter_mut().enumerate() {
                        let c = linf_q(x, cb.point(j), q);
                        best = best.min(c);
                        *bb = bb.min(c);
                    }
                    sum_a += best;
                }
                sum_a.max(best_b.iter().sum())
            }
            (Some(c), None) | (None, Some(c)) => c.diag.iter().sum(),
            (None, None) => 0.0,
        })
        .sum()
}

/// Wasserstein distance between the dimension-`k` parts of two Reeb graph diagrams. Points
/// only match points of the same kind; the rest go to the diagonal.
pub fn reeb_wasserstein(
    f: &PersistenceDiagram,
    g: &PersistenceDiagram,
    k: u8,
    q: f64,
) -> Result<f64> {
    check_q(q)?;
    let key = |p: &PersistencePoint| (p.kind, p.superlevel);
    let mut classes: BTreeMap<_, (Vec<PersistencePoint>, Vec<PersistencePoint>)> = BTreeMap::new();
    for p in f.of_dim(k) {
        classes.entry(key(p)).or_default().0.push(*p);
    }
    for p in g.of_dim(k) {
        classes.entry(key(p)).or_default().1.push(*p);
    }
    let diag = |p: &PersistencePoint| pow_q(0.5 * p.persistence(), q);
    let total: f64 = classes
        .values()
        .map(|(a, b)| {
            let da: Vec<f64> = a.iter().map(diag).collect();
            let db: Vec<f64> = b.iter().map(diag).collect();
            let cost = |i: usize, j: usize| {
                let (x, y): (&PersistencePoint, &PersistencePoint) = (&a[i], &b[j]);
                pow_q((x.birth - y.birth).abs().max((x.death - y.death).abs()), q)
            };
            let costs = CostMatrix::with_diagonals(cost, &da, &db)
                .expect("costs are finite and non-negative");
            hungarian(&costs).total
        })
        .sum();
    Ok(total.powf(1.0 / q))
}

/// Quantities entering the stability bound for one multi-field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityTerms {
    /// Nodes of the first-field Reeb graph.
    pub nodes: usize,
    /// Critical nodes of the resolved first-field Reeb graph.
    pub critical: usize,
    /// Largest critical node count among the resolved restricted graphs.
    pub max_child_critical: usize,
    /// Largest amplitude `max − min` among the fields.
    pub amplitude: f64,
}

impl StabilityTerms {
    /// `resolved` must be the degeneracy-resolved MDRG of a bivariate field.
    pub fn new(resolved: &Mdrg, amplitudes: &[f64]) -> Self {
        Self {
            nodes: resolved.graph.original_count(),
            critical: critical_count(&resolved.graph),
            max_child_critical: resolved
                .children
                .iter()
                .map(|c| critical_count(&c.graph))
                .max()
                .unwrap_or(0),
            amplitude: amplitudes.iter().copied().fold(0.0, f64::max),
        }
    }
}

/// `((N_f·C_f·max C_f2 + N_g·C_g·max C_g2) · A^q)^{1/q}` with `A` the largest amplitude of
/// either multi-field.
pub fn stability_bound(f: &StabilityTerms, g: &StabilityTerms, q: f64) -> Result<f64> {
    check_q(q)?;
    let amp = f.amplitude.max(g.amplitude);
    let count = |t: &StabilityTerms| (t.nodes * t.critical * t.max_child_critical) as f64;
    Ok(((count(f) + count(g)) * amp.powf(q)).powf(1.0 / q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jcn::{FieldQuantization, QuantizationSpec};
    use crate::persistence::Kind;

    fn spec() -> QuantizationSpec {
        QuantizationSpec::new(vec![FieldQuantization::new(0.0, 4.0, 4).unwrap(); 2]).unwrap()
    }

    fn pt(a: (f64, f64, Kind), b: (f64, f64, Kind), node: usize, level: u32) -> MdpdPoint {
        MdpdPoint {
            factors: vec![
                PersistencePoint::new(a.0, a.1, a.2),
                PersistencePoint::new(b.0, b.1, b.2),
            ],
            node_path: vec![node],
            level_path: vec![level],
        }
    }

    fn mdpd(points: Vec<MdpdPoint>) -> Mdpd {
        let mut m = Mdpd {
            spec: spec(),
            points,
        };
        m.canonicalize();
        m
    }

    const O: Kind = Kind::Ordinary0;
    const E1: Kind = Kind::Extended1;

    #[test]
    fn reeb_wasserstein_examples() {
        let d = |pts: &[(f64, f64)]| {
            PersistenceDiagram::new(
                pts.iter()
                    .map(|&(b, e)| PersistencePoint::new(b, e, O))
                    .collect(),
            )
        };
        let a = d(&[(0.0, 2.0)]);
        assert_eq!(reeb_wasserstein(&a, &a, 0, 2.0).unwrap(), 0.0);
        assert_eq!(
            reeb_wasserstein(&d(&[(0.0, 1.0)]), &d(&[]), 0, 1.0).unwrap(),
            0.5
        );
        assert_eq!(
            reeb_wasserstein(&a, &d(&[(0.0, 1.0)]), 0, 1.0).unwrap(),
            1.0
        );
        assert!(reeb_wasserstein(&a, &a, 0, 0.0).is_err());
    }

    #[test]
    fn inner_examples() {
        let x = pt((0.0, 1.0, O), (0.0, 0.5, O), 0, 0);
        let y = pt((0.0, 1.0, O), (0.0, 0.3, O), 0, 0);
        assert_eq!(inner_distance(&[&x], &[&x], 1.0).unwrap(), 0.0);
        assert!((inner_distance(&[&x], &[&y], 1.0).unwrap() - 0.2).abs() < 1e-15);
        let z = pt((0.0, 1.0, O), (0.5, 0.0, E1), 0, 0);
        assert_eq!(inner_distance(&[&x], &[&z], 1.0).unwrap(), 1.0);
        let w = pt((0.0, 1.0, O), (0.0, 0.3, O), 0, 1);
        assert!(matches!(
            inner_distance(&[&x], &[&w], 1.0),
            Err(Error::LevelMismatch(0, 1))
        ));
    }

    #[test]
    fn diagonal_cost_examples() {
        let x = pt((0.0, 1.0, O), (0.0, 0.5, O), 0, 0);
        assert_eq!(diagonal_cost(&[], 1.0), 0.0);
        assert_eq!(diagonal_cost(&[&x], 1.0), 0.5);
        assert_eq!(diagonal_cost(&[&x], 2.0), 0.25);
    }

    #[test]
    fn distance_examples() {
        let a = mdpd(vec![pt((0.0, 1.0, O), (0.0, 0.5, O), 0, 0)]);
        let b = mdpd(vec![pt((0.0, 1.0, O), (0.0, 0.3, O), 0, 0)]);
        assert_eq!(mdrg_distance(&a, &a, 2.0).unwrap().value, 0.0);
        let d = mdrg_distance(&a, &b, 1.0).unwrap();
        assert!((d.value - 0.2).abs() < 1e-15);
        assert_eq!(d.levels.len(), 1);
        assert_eq!(d.levels[0].pairs[0].f, Some(0));
        assert_eq!(d.levels[0].pairs[0].g, Some(0));

        let c = mdpd(vec![pt((0.0, 1.0, O), (0.0, 0.5, O), 0, 1)]);
        let e = mdpd(vec![pt((0.0, 1.0, O), (0.0, 0.3, O), 0, 2)]);
        assert_eq!(mdrg_distance(&c, &e, 1.0).unwrap().value, 1.0);
    }

    #[test]
    fn spec_and_q_are_checked() {
        let a = mdpd(vec![]);
        let mut b = a.clone();
        b.spec.fields[0].levels = 8;
        assert!(matches!(
            mdrg_distance(&a, &b, 2.0),
            Err(Error::SpecMismatch)
        ));
        assert!(matches!(
            mdrg_distance(&a, &a, -1.0),
            Err(Error::InvalidQ(_))
        ));
    }

    #[test]
    fn transcript_follows_argument_order() {
        let a = mdpd(vec![pt((0.0, 1.0, O), (0.0, 0.5, O), 3, 0)]);
        let b = mdpd(vec![pt((0.0, 2.0, O), (0.0, 0.5, O), 7, 0)]);
        let ab = mdrg_distance(&a, &b, 2.0).unwrap();
        let ba = mdrg_distance(&b, &a, 2.0).unwrap();
        assert_eq!(ab.value, ba.value);
        assert_eq!(ab.levels[0].pairs[0].f, Some(3));
        assert_eq!(ba.levels[0].pairs[0].f, Some(7));
    }
}
