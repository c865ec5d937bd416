//! Minimum-cost matching of two point sets where any point may go to the diagonal instead.
//!
//! Large instances are solved on a sparse candidate graph (each point's nearest partners plus
//! its diagonal) with shortest augmenting paths and potentials. The final potentials certify
//! optimality for the full problem when no excluded pair has negative reduced cost;
//! otherwise the offending pairs join the graph and the solve is repeated.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::assignment::{min_cost, CostMatrix};

/// Below this many points per side the dense solver is used directly.
const DENSE_BELOW: usize = 12;
/// Nearest partners per point in the initial candidate graph.
const NEIGHBOURS: usize = 10;
/// Candidate-graph repairs before falling back to the dense solver.
const MAX_ROUNDS: usize = 4;

/// `costs` is `m × n` row-major; `da[i]`, `db[j]` are the diagonal costs.
pub fn partial_matching_cost(costs: &[f64], da: &[f64], db: &[f64]) -> f64 {
    let (m, n) = (da.len(), db.len());
    debug_assert_eq!(costs.len(), m * n);
    if m == 0 || n == 0 {
        return da.iter().chain(db).sum();
    }
    if m.max(n) < DENSE_BELOW {
        return dense(costs, da, db);
    }
    let mut cand = vec![vec![false; n]; m];
    seed_candidates(costs, m, n, &mut cand);
    for _ in 0..MAX_ROUNDS {
        let sol = Sparse::build(costs, da, db, &cand).solve();
        let violations = sol.violations(costs, da, db, &cand);
        if violations.is_empty() {
            return sol.total;
        }
        for (i, j) in violations {
            cand[i][j] = true;
        }
    }
    log::debug!("partial matching fell back to the dense solver ({m} x {n})");
    dense(costs, da, db)
}

fn dense(costs: &[f64], da: &[f64], db: &[f64]) -> f64 {
    let n = db.len();
    let m = CostMatrix::with_diagonals(|i, j| costs[i * n + j], da, db)
        .expect("costs are finite and non-negative");
    min_cost(&m)
}

fn seed_candidates(costs: &[f64], m: usize, n: usize, cand: &mut [Vec<bool>]) {
    let mut idx: Vec<usize> = Vec::new();
    let t = NEIGHBOURS;
    for (i, row) in cand.iter_mut().enumerate() {
        idx.clear();
        idx.extend(0..n);
        let key = |&j: &usize| (costs[i * n + j], j);
        if n > t {
            idx.select_nth_unstable_by(t, |a, b| key(a).partial_cmp(&key(b)).unwrap());
        }
        for &j in idx.iter().take(t) {
            row[j] = true;
        }
    }
    for j in 0..n {
        idx.clear();
        idx.extend(0..m);
        let key = |&i: &usize| (costs[i * n + j], i);
        if m > t {
            idx.select_nth_unstable_by(t, |a, b| key(a).partial_cmp(&key(b)).unwrap());
        }
        for &i in idx.iter().take(t) {
            cand[i][j] = true;
        }
    }
}

/// Rows are the `m` points of the first set then one dummy per point of the second set;
/// columns are the `n` points of the second set then one dummy per point of the first.
/// Row `i < m` reaches its own dummy column `n + i`; dummy row `m + j` reaches column `j`;
/// dummy row `m + j` reaches dummy column `n + i` whenever `(i, j)` is a candidate.
struct Sparse {
    m: usize,
    n: usize,
    adj: Vec<Vec<(usize, f64)>>,
}

struct Solution {
    m: usize,
    n: usize,
    u: Vec<f64>,
    v: Vec<f64>,
    total: f64,
}

impl Sparse {
    fn build(costs: &[f64], da: &[f64], db: &[f64], cand: &[Vec<bool>]) -> Self {
        let (m, n) = (da.len(), db.len());
        let mut adj = vec![Vec::new(); m + n];
        for i in 0..m {
            for j in (0..n).filter(|&j| cand[i][j]) {
                adj[i].push((j, costs[i * n + j]));
                adj[m + j].push((n + i, 0.0));
            }
            adj[i].push((n + i, da[i]));
        }
        for j in 0..n {
            adj[m + j].push((j, db[j]));
        }
        Self { m, n, adj }
    }

    fn solve(&self) -> Solution {
        let k = self.m + self.n;
        let mut u = vec![0.0; k];
        let mut v = vec![f64::INFINITY; k];
        let mut row_of: Vec<Option<usize>> = vec![None; k];
        let mut col_of: Vec<Option<usize>> = vec![None; k];

        // column reduction over the candidate edges, then greedy tight matches
        for edges in &self.adj {
            for &(j, c) in edges {
                v[j] = f64::min(v[j], c);
            }
        }
        for (r, edges) in self.adj.iter().enumerate() {
            if let Some(&(j, _)) = edges
                .iter()
                .find(|&&(j, c)| row_of[j].is_none() && c == v[j])
            {
                row_of[j] = Some(r);
                col_of[r] = Some(j);
            }
        }

        let mut dist = vec![f64::INFINITY; k];
        let mut pred = vec![usize::MAX; k];
        let mut done = vec![false; k];
        let mut visited: Vec<usize> = Vec::new();
        let mut heap = BinaryHeap::new();
        for s in 0..k {
            if col_of[s].is_some() {
                continue;
            }
            for &j in &visited {
                dist[j] = f64::INFINITY;
                done[j] = false;
            }
            visited.clear();
            heap.clear();
            let relax = |r: usize,
                         base: f64,
                         dist: &mut [f64],
                         pred: &mut [usize],
                         heap: &mut BinaryHeap<_>,
                         visited: &mut Vec<usize>,
                         done: &[bool],
                         u: &[f64],
                         v: &[f64]| {
                for &(j, c) in &self.adj[r] {
                    if done[j] {
                        continue;
                    }
                    let d = base + (c - u[r] - v[j]).max(0.0);
                    if d < dist[j] {
                        if dist[j] == f64::INFINITY {
                            visited.push(j);
                        }
                        dist[j] = d;
                        pred[j] = r;
                        heap.push(Reverse((Ordered(d), j)));
                    }
                }
            };
            relax(
                s,
                0.0,
                &mut dist,
                &mut pred,
                &mut heap,
                &mut visited,
                &done,
                &u,
                &v,
            );
            let end = loop {
                let Reverse((Ordered(d), j)) = heap.pop().expect("a perfect matching exists");
                if done[j] || d > dist[j] {
                    continue;
                }
                done[j] = true;
                match row_of[j] {
                    None => break j,
                    Some(r) => relax(
                        r,
                        d,
                        &mut dist,
                        &mut pred,
                        &mut heap,
                        &mut visited,
                        &done,
                        &u,
                        &v,
                    ),
                }
            };
            let total = dist[end];
            u[s] += total;
            for &j in &visited {
                if done[j] && j != end {
                    let r = row_of[j].expect("finalized columns other than the end are matched");
                    u[r] += total - dist[j];
                    v[j] -= total - dist[j];
                }
            }
            let mut j = end;
            loop {
                let r = pred[j];
                let prev = col_of[r];
                row_of[j] = Some(r);
                col_of[r] = Some(j);
                match prev {
                    Some(p) if r != s => j = p,
                    _ => break,
                }
            }
        }

        let total = (0..k)
            .map(|r| {
                let j = col_of[r].expect("perfect matching");
                self.adj[r]
                    .iter()
                    .find(|&&(c, _)| c == j)
                    .map_or(0.0, |&(_, c)| c)
            })
            .sum();
        Solution {
            m: self.m,
            n: self.n,
            u,
            v,
            total,
        }
    }
}

impl Solution {
    /// Excluded pairs whose real or mirrored dummy edge has negative reduced cost.
    fn violations(
        &self,
        costs: &[f64],
        da: &[f64],
        db: &[f64],
        cand: &[Vec<bool>],
    ) -> Vec<(usize, usize)> {
        let (m, n) = (self.m, self.n);
        let scale = costs
            .iter()
            .chain(da)
            .chain(db)
            .fold(1.0f64, |a, &b| a.max(b));
        let tol = 1e-12 * scale;
        let mut out = Vec::new();
        for i in 0..m {
            for j in (0..n).filter(|&j| !cand[i][j]) {
                let real = costs[i * n + j] - self.u[i] - self.v[j];
                let mirror = -self.u[m + j] - self.v[n + i];
                if real < -tol || mirror < -tol {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy)]
struct Ordered(f64);

impl PartialEq for Ordered {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for Ordered {}

impl PartialOrd for Ordered {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordered {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn instance(m: usize, n: usize, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let pts = |k: usize, rng: &mut ChaCha8Rng| -> Vec<[f64; 2]> {
            (0..k)
                .map(|_| {
                    let b: f64 = rng.gen();
                    [b, b + rng.gen::<f64>() * 0.3]
                })
                .collect()
        };
        let (a, b) = (pts(m, rng), pts(n, rng));
        let c =
            |p: [f64; 2], q: [f64; 2]| f64::max((p[0] - q[0]).abs(), (p[1] - q[1]).abs()).powi(2);
        let diag = |p: [f64; 2]| (0.5 * (p[1] - p[0])).powi(2);
        let costs = a
            .iter()
            .flat_map(|&p| b.iter().map(move |&q| c(p, q)))
            .collect();
        (
            costs,
            a.iter().map(|&p| diag(p)).collect(),
            b.iter().map(|&q| diag(q)).collect(),
        )
    }

    #[test]
    fn sparse_agrees_with_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let (m, n) = (rng.gen_range(48..120), rng.gen_range(48..120));
            let (c, da, db) = instance(m, n, &mut rng);
            let sparse = partial_matching_cost(&c, &da, &db);
            let exact = dense(&c, &da, &db);
            assert!(
                (sparse - exact).abs() <= 1e-12 * exact.max(1.0),
                "{sparse} vs {exact}"
            );
        }
    }

    #[test]
    fn empty_sides_go_to_the_diagonal() {
        assert_eq!(partial_matching_cost(&[], &[1.0, 2.0], &[]), 3.0);
        assert_eq!(partial_matching_cost(&[], &[], &[]), 0.0);
    }
}
