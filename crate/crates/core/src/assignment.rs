//! Balanced linear assignment via the Hungarian algorithm (shortest augmenting paths with
//! potentials, O(k³)), followed by a pass that picks the lexicographically smallest
//! optimal permutation so ties resolve deterministically.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Square matrix of finite, non-negative costs.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    k: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.len();
        let mut data = Vec::with_capacity(k * k);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidCost(format!(
                    "row {i} has {} entries, expected {k}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Self::from_data(k, data)
    }

    pub fn from_fn(k: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let data = (0..k * k).map(|x| f(x / k, x % k)).collect();
        Self::from_data(k, data)
    }

    /// Square problem for matching `a` (rows) against `b` (columns) where either side may
    /// instead go to the diagonal. Rows `m..m+n` are dummies for the columns of `b`,
    /// columns `n..n+m` are dummies for the rows of `a`; dummy–dummy costs zero.
    pub fn with_diagonals(
        cost: impl Fn(usize, usize) -> f64,
        row_diagonal: &[f64],
        col_diagonal: &[f64],
    ) -> Result<Self> {
        let (m, n) = (row_diagonal.len(), col_diagonal.len());
        Self::from_fn(m + n, |i, j| match (i < m, j < n) {
            (true, true) => cost(i, j),
            (true, false) => row_diagonal[i],
            (false, true) => col_diagonal[j],
            (false, false) => 0.0,
        })
    }

    fn from_data(k: usize, data: Vec<f64>) -> Result<Self> {
        if let Some(x) = data.iter().position(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::InvalidCost(format!(
                "entry ({}, {}) = {} is negative or not finite",
                x / k,
                x % k,
                data[x]
            )));
        }
        Ok(Self { k, data })
    }

    pub fn size(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.k + j]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// `columns[i]` is the column assigned to row `i`.
    pub columns: Vec<usize>,
    pub total: f64,
}

pub fn hungarian(costs: &CostMatrix) -> Assignment {
    let k = costs.size();
    if k == 0 {
        return Assignment {
            columns: Vec::new(),
            total: 0.0,
        };
    }
    let (columns, u, v) = solve(costs);
    let total = total_of(costs, &columns);

    let scale = costs.data.iter().copied().fold(1.0, f64::max);
    let tol = 1e-10 * scale;
    let tight = |i: usize, j: usize| costs.get(i, j) - u[i] - v[j] <= tol;
    let refined = lexicographic(k, columns.clone(), tight);
    let refined_total = total_of(costs, &refined);
    if refined_total <= total {
        Assignment {
            columns: refined,
            total: refined_total,
        }
    } else {
        Assignment { columns, total }
    }
}

/// Optimal total only, skipping the tie-breaking pass.
pub fn min_cost(costs: &CostMatrix) -> f64 {
    if costs.size() == 0 {
        return 0.0;
    }
    total_of(costs, &solve(costs).0)
}

fn total_of(costs: &CostMatrix, columns: &[usize]) -> f64 {
    columns
        .iter()
        .enumerate()
        .map(|(i, &j)| costs.get(i, j))
        .sum()
}

/// Returns the assignment and the row/column potentials.
fn solve(costs: &CostMatrix) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    let k = costs.size();
    let row = |i: usize| &costs.data[i * k..(i + 1) * k];
    // 1-based; index 0 is a virtual column/row
    let mut u = vec![0.0; k + 1];
    let mut v = vec![0.0; k + 1];
    let mut row_of = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];

    // column reduction: each column's minimum becomes its potential and the first row
    // attaining it takes the column if still free
    let mut matched = vec![false; k + 1];
    for j in 1..=k {
        let (mut best, mut arg) = (f64::INFINITY, 0);
        for i in 0..k {
            let c = costs.data[i * k + j - 1];
            if c < best {
                best = c;
                arg = i + 1;
            }
        }
        v[j] = best;
        if !matched[arg] {
            matched[arg] = true;
            row_of[j] = arg;
        }
    }

    let mut minv = vec![f64::INFINITY; k + 1];
    let mut used = vec![false; k + 1];
    for i in (1..=k).filter(|&i| !matched[i]) {
        row_of[0] = i;
        let mut j0 = 0;
        minv.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let r = row(i0 - 1);
            let ui = u[i0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=k {
                if used[j] {
                    continue;
                }
                let cur = r[j - 1] - ui - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut columns = vec![0; k];
    for j in 1..=k {
        columns[row_of[j] - 1] = j - 1;
    }
    (columns, u[1..].to_vec(), v[1..].to_vec())
}

/// Among perfect matchings on tight edges, walk rows in order and give each the smallest
/// column that still extends to a perfect matching, rotating along alternating cycles.
fn lexicographic(
    k: usize,
    mut col: Vec<usize>,
    tight: impl Fn(usize, usize) -> bool,
) -> Vec<usize> {
    let mut row = vec![0; k];
    for (i, &j) in col.iter().enumerate() {
        row[j] = i;
    }
    for i in 0..k {
        let target = col[i];

        // unfixed rows that can give up their column and still reach `target`
        let mut reach = vec![false; k];
        let mut queue = VecDeque::from([target]);
        while let Some(c) = queue.pop_front() {
            for r in i + 1..k {
                if !reach[r] && tight(r, c) {
                    reach[r] = true;
                    queue.push_back(col[r]);
                }
            }
        }
        let Some(j) = (0..k).find(|&j| tight(i, j) && (j == target || reach[row[j]])) else {
            continue;
        };
        if j == target {
            continue;
        }

        // alternating path start -> ... -> target; each row on it takes the next column
        let start = row[j];
        let mut prev = vec![usize::MAX; k];
        let mut seen = vec![false; k];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut last = None;
        while let Some(r) = queue.pop_front() {
            if tight(r, target) {
                last = Some(r);
                break;
            }
            for c in 0..k {
                let r2 = row[c];
                if c != col[r] && r2 > i && !seen[r2] && reach[r2] && tight(r, c) {
                    seen[r2] = true;
                    prev[r2] = r;
                    queue.push_back(r2);
                }
            }
        }
        let Some(mut cur) = last else {
            continue;
        };
        let mut take = target;
        loop {
            let old = col[cur];
            col[cur] = take;
            row[take] = cur;
            if cur == start {
                break;
            }
            take = old;
            cur = prev[cur];
        }
        col[i] = j;
        row[j] = i;
    }
    col
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve_rows(rows: Vec<Vec<f64>>) -> Assignment {
        hungarian(&CostMatrix::new(rows).unwrap())
    }

    #[test]
    fn examples() {
        assert_eq!(solve_rows(vec![vec![0.0]]).columns, vec![0]);
        let a = solve_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!((a.columns, a.total), (vec![1, 0], 0.0));
        let b = solve_rows(vec![vec![4.0, 1.0], vec![2.0, 3.0]]);
        assert_eq!((b.columns, b.total), (vec![1, 0], 3.0));
        assert_eq!(solve_rows(vec![]).total, 0.0);
    }

    #[test]
    fn ties_pick_the_lexicographically_smallest() {
        let a = solve_rows(vec![vec![1.0; 3]; 3]);
        assert_eq!(a.columns, vec![0, 1, 2]);
        let b = solve_rows(vec![
            vec![0.0, 0.0, 5.0],
            vec![0.0, 0.0, 5.0],
            vec![5.0, 5.0, 0.0],
        ]);
        assert_eq!(b.columns, vec![0, 1, 2]);
    }

    #[test]
    fn invalid_entries() {
        assert!(CostMatrix::new(vec![vec![-1.0]]).is_err());
        assert!(CostMatrix::new(vec![vec![f64::NAN]]).is_err());
        assert!(CostMatrix::new(vec![vec![0.0, 1.0]]).is_err());
    }

    #[test]
    fn diagonal_padding_layout() {
        let m = CostMatrix::with_diagonals(|_, _| 7.0, &[1.0], &[2.0, 3.0]).unwrap();
        assert_eq!(m.size(), 3);
        assert_eq!(m.get(0, 0), 7.0);
        assert_eq!(m.get(0, 2), 1.0);
        assert_eq!(m.get(1, 1), 3.0);
        assert_eq!(m.get(2, 2), 0.0);
        assert_eq!(hungarian(&m).total, 6.0);
        assert_eq!(min_cost(&m), 6.0);
    }
}
