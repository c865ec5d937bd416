//! Distance matrices over corpora and the retrieval measures NN, first tier, second tier,
//! E-measure and DCG.
//!
//! For a query `s` of class `C` (with `|C| > 1`), rank every other object by distance,
//! ties broken by object index. With `r_i = 1` when the `i`-th result is in `C`:
//! - NN = `r_1`;
//! - FT = `Σ_{i ≤ |C|−1} r_i / (|C| − 1)`, ST the same over the top `2(|C| − 1)`;
//! - E = `2·P·R / (P + R)` over the top `K` results, which simplifies to
//!   `2·Σ_{i ≤ K} r_i / (K + |C| − 1)`; `K` is capped at the number of other objects;
//! - DCG = `(r_1 + Σ_{i ≥ 2} r_i / log₂ i) / (1 + Σ_{i=2}^{|C|−1} 1 / log₂ i)`.
//!
//! Scores are averaged over queries; queries whose class has a single member are skipped.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::distance::mdrg_distance;
use crate::error::{Error, Result};
use crate::mdpd::Mdpd;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub const DEFAULT_E_MEASURE_K: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    pub ids: Vec<String>,
    /// Row-major `n × n` values.
    pub values: Vec<f64>,
}

impl DistanceMatrix {
    pub fn new(ids: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let n = ids.len();
        if values.len() != n * n {
            return Err(Error::InvalidMatrix(format!(
                "{} values for {n} ids",
                values.len()
            )));
        }
        let m = Self { ids, values };
        for i in 0..n {
            if m.get(i, i) != 0.0 {
                return Err(Error::InvalidMatrix(format!("non-zero diagonal at {i}")));
            }
            for j in 0..n {
                let d = m.get(i, j);
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidMatrix(format!("entry ({i}, {j}) = {d}")));
                }
                if d != m.get(j, i) {
                    return Err(Error::InvalidMatrix(format!("asymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ids.len() + j]
    }

    /// Elementwise mean of matrices over the same ids.
    pub fn mean(matrices: &[DistanceMatrix]) -> Result<Self> {
        let first = matrices
            .first()
            .ok_or_else(|| Error::InvalidMatrix("nothing to average".into()))?;
        if matrices.iter().any(|m| m.ids != first.ids) {
            return Err(Error::InvalidMatrix("matrices have different ids".into()));
        }
        let k = matrices.len() as f64;
        let values = (0..first.values.len())
            .map(|x| matrices.iter().map(|m| m.values[x]).sum::<f64>() / k)
            .collect();
        Ok(Self {
            ids: first.ids.clone(),
            values,
        })
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        let mut header = vec![String::new()];
        header.extend(self.ids.iter().cloned());
        wtr.write_record(&header)?;
        for (i, id) in self.ids.iter().enumerate() {
            let mut row = vec![id.clone()];
            row.extend((0..self.len()).map(|j| self.get(i, j).to_string()));
            wtr.write_record(&row)?;
        }
        wtr.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn read_csv(input: impl std::io::Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(input);
        let ids: Vec<String> = rdr.headers()?.iter().skip(1).map(str::to_owned).collect();
        let mut values = Vec::with_capacity(ids.len() * ids.len());
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            if record.get(0) != ids.get(i).map(String::as_str) {
                return Err(Error::parse(i + 2, "row id does not match the header"));
            }
            for v in record.iter().skip(1) {
                values.push(
                    v.parse()
                        .map_err(|_| Error::parse(i + 2, format!("invalid value `{v}`")))?,
                );
            }
        }
        Self::new(ids, values)
    }

    /// Binary greyscale PGM, min-max scaled, black for the smallest distance.
    pub fn write_pgm(&self, mut out: impl Write) -> std::io::Result<()> {
        let n = self.len();
        writeln!(out, "P5\n{n} {n}\n255")?;
        let pixels: Vec<u8> = self.scaled().map(|t| (t * 255.0).round() as u8).collect();
        out.write_all(&pixels)
    }

    /// Binary PPM with a blue (near) to white to red (far) diverging map.
    pub fn write_ppm(&self, mut out: impl Write) -> std::io::Result<()> {
        let n = self.len();
        writeln!(out, "P6\n{n} {n}\n255")?;
        let pixels: Vec<u8> = self.scaled().flat_map(diverging).collect();
        out.write_all(&pixels)
    }

    fn scaled(&self) -> impl Iterator<Item = f64> + '_ {
        let lo = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self
            .values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let span = hi - lo;
        self.values
            .iter()
            .map(move |&v| if span > 0.0 { (v - lo) / span } else { 0.0 })
    }
}

/// `t = 0` is blue `(59, 76, 192)`, `t = 0.5` white, `t = 1` red `(180, 4, 38)`.
fn diverging(t: f64) -> [u8; 3] {
    const BLUE: [f64; 3] = [59.0, 76.0, 192.0];
    const WHITE: [f64; 3] = [255.0, 255.0, 255.0];
    const RED: [f64; 3] = [180.0, 4.0, 38.0];
    let (a, b, s) = if t < 0.5 {
        (BLUE, WHITE, t * 2.0)
    } else {
        (WHITE, RED, (t - 0.5) * 2.0)
    };
    [0, 1, 2].map(|c| (a[c] + (b[c] - a[c]) * s).round() as u8)
}

/// Pairwise distances; the upper triangle is computed and mirrored.
pub fn distance_matrix(ids: Vec<String>, corpus: &[Mdpd], q: f64) -> Result<DistanceMatrix> {
    let n = corpus.len();
    if ids.len() != n {
        return Err(Error::InvalidMatrix(format!(
            "{} ids for {n} objects",
            ids.len()
        )));
    }
    if let Some(first) = corpus.first() {
        if corpus.iter().any(|m| m.spec != first.spec) {
            return Err(Error::SpecMismatch);
        }
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let compute =
        |&(i, j): &(usize, usize)| mdrg_distance(&corpus[i], &corpus[j], q).map(|d| d.value);
    #[cfg(feature = "parallel")]
    let dists: Vec<f64> = pairs.par_iter().map(compute).collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let dists: Vec<f64> = pairs.iter().map(compute).collect::<Result<_>>()?;

    let mut values = vec![0.0; n * n];
    for (&(i, j), d) in pairs.iter().zip(dists) {
        values[i * n + j] = d;
        values[j * n + i] = d;
    }
    Ok(DistanceMatrix { ids, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetrievalScores {
    pub nn: f64,
    pub first_tier: f64,
    pub second_tier: f64,
    pub e_measure: f64,
    pub dcg: f64,
    /// Queries that contributed (singleton classes are skipped).
    pub queries: usize,
}

/// Other objects ordered by distance to `query`, ties by index.
pub fn ranking(matrix: &DistanceMatrix, query: usize) -> Vec<usize> {
    let mut others: Vec<usize> = (0..matrix.len()).filter(|&j| j != query).collect();
    others.sort_by(|&a, &b| {
        matrix
            .get(query, a)
            .total_cmp(&matrix.get(query, b))
            .then(a.cmp(&b))
    });
    others
}

pub fn evaluate(matrix: &DistanceMatrix, labels: &[String], e_k: usize) -> Result<RetrievalScores> {
    let n = matrix.len();
    if labels.len() != n {
        return Err(Error::InvalidMatrix(format!(
            "{} labels for {n} objects",
            labels.len()
        )));
    }
    let mut sums = [0.0; 5];
    let mut queries = 0;
    let mut skipped = 0;
    for s in 0..n {
        let class = labels.iter().filter(|l| **l == labels[s]).count();
        if class < 2 {
            skipped += 1;
            continue;
        }
        let rel: Vec<f64> = ranking(matrix, s)
            .into_iter()
            .map(|j| if labels[j] == labels[s] { 1.0 } else { 0.0 })
            .collect();
        let c = class - 1;
        let hits = |k: usize| rel.iter().take(k).sum::<f64>();
        let k_e = e_k.min(n - 1);

        sums[0] += rel[0];
        sums[1] += hits(c) / c as f64;
        sums[2] += hits(2 * c) / c as f64;
        sums[3] += 2.0 * hits(k_e) / (k_e + c) as f64;
        let gain = |i: usize| {
            if i == 0 {
                1.0
            } else {
                1.0 / ((i + 1) as f64).log2()
            }
        };
        let dcg: f64 = rel.iter().enumerate().map(|(i, r)| r * gain(i)).sum();
        let ideal: f64 = (0..c).map(gain).sum();
        sums[4] += dcg / ideal;
        queries += 1;
    }
    if skipped > 0 {
        log::warn!("{skipped} queries skipped: their class has a single member");
    }
    let mean = |x: f64| if queries > 0 { x / queries as f64 } else { 0.0 };
    Ok(RetrievalScores {
        nn: mean(sums[0]),
        first_tier: mean(sums[1]),
        second_tier: mean(sums[2]),
        e_measure: mean(sums[3]),
        dcg: mean(sums[4]),
        queries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(n: usize, f: impl Fn(usize, usize) -> f64) -> DistanceMatrix {
        let ids = (0..n).map(|i| format!("o{i}")).collect();
        let values = (0..n * n)
            .map(|x| {
                let (i, j) = (x / n, x % n);
                if i == j {
                    0.0
                } else {
                    f(i.min(j), i.max(j))
                }
            })
            .collect();
        DistanceMatrix::new(ids, values).unwrap()
    }

    fn labels(l: &[&str]) -> Vec<String> {
        l.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn perfect_separation() {
        let m = matrix(4, |i, j| if i / 2 == j / 2 { 0.1 } else { 1.0 });
        let s = evaluate(&m, &labels(&["a", "a", "b", "b"]), 32).unwrap();
        assert_eq!(
            (s.nn, s.first_tier, s.second_tier, s.dcg),
            (1.0, 1.0, 1.0, 1.0)
        );
        assert_eq!(s.e_measure, 2.0 * 1.0 / 4.0);
    }

    #[test]
    fn single_class_is_always_nearest() {
        let m = matrix(5, |i, j| (i * 7 + j * 3) as f64);
        let s = evaluate(&m, &labels(&["x"; 5]), 32).unwrap();
        assert_eq!(s.nn, 1.0);
    }

    #[test]
    fn one_inversion() {
        // object 0's nearest neighbour is 2 (other class), then 1
        let m = matrix(4, |i, j| match (i, j) {
            (0, 1) => 0.5,
            (0, 2) => 0.2,
            (0, 3) => 0.9,
            (1, 2) => 0.8,
            (1, 3) => 0.7,
            (2, 3) => 0.1,
            _ => unreachable!(),
        });
        let s = evaluate(&m, &labels(&["a", "a", "b", "b"]), 32).unwrap();
        // rankings: 0: [2,1,3] 1: [0,3,2] 2: [3,0,1] 3: [2,1,0]
        assert_eq!(s.nn, 0.75);
        assert_eq!(s.first_tier, 0.75);
        assert_eq!(s.second_tier, 1.0);
        let dcg0 = 1.0 / 2f64.log2();
        assert!((s.dcg - (dcg0 + 3.0) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn singleton_queries_are_skipped() {
        let m = matrix(3, |_, _| 1.0);
        let s = evaluate(&m, &labels(&["a", "a", "b"]), 32).unwrap();
        assert_eq!(s.queries, 2);
    }

    #[test]
    fn csv_round_trip_and_images() {
        let m = matrix(3, |i, j| (i + j) as f64 * 0.5);
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf.clone())
            .unwrap()
            .starts_with(",o0,o1,o2\n"));
        assert_eq!(DistanceMatrix::read_csv(buf.as_slice()).unwrap(), m);

        let mut pgm = Vec::new();
        m.write_pgm(&mut pgm).unwrap();
        assert!(pgm.starts_with(b"P5\n3 3\n255\n"));
        assert_eq!(pgm.len(), 11 + 9);
        let mut ppm = Vec::new();
        m.write_ppm(&mut ppm).unwrap();
        assert_eq!(ppm.len(), 11 + 27);
        assert_eq!(diverging(0.0), [59, 76, 192]);
        assert_eq!(diverging(0.5), [255, 255, 255]);
        assert_eq!(diverging(1.0), [180, 4, 38]);
    }

    #[test]
    fn invalid_matrices() {
        let ids = vec!["a".to_string(), "b".to_string()];
        assert!(DistanceMatrix::new(ids.clone(), vec![0.0, 1.0, 2.0, 0.0]).is_err());
        assert!(DistanceMatrix::new(ids.clone(), vec![1.0, 1.0, 1.0, 0.0]).is_err());
        assert!(DistanceMatrix::new(ids, vec![0.0; 3]).is_err());
    }

    #[test]
    fn mean_of_matrices() {
        let a = matrix(2, |_, _| 1.0);
        let b = matrix(2, |_, _| 3.0);
        assert_eq!(DistanceMatrix::mean(&[a, b]).unwrap().get(0, 1), 2.0);
    }
}
