use crate::error::{Error, Result};
use crate::sum::pairwise_sum;
use std::fmt::Write;

/// Square sparse matrix in compressed row storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds the matrix from `(row, col, value)` triplets. Duplicates are
    /// summed in input order, so the result depends only on the triplet list.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Result<Self> {
        if let Some(t) = triplets.iter().find(|t| t.0 >= n || t.1 >= n) {
            return Err(Error::invalid(format!("triplet ({}, {}) outside a {n}x{n} matrix", t.0, t.1)));
        }
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(CsrMatrix { n, row_ptr, cols, values })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(c, v)| v * x[c]).sum()).collect()
    }

    /// `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let ay = self.matvec(y);
        dot(x, &ay)
    }

    pub fn transpose(&self) -> CsrMatrix {
        let t = (0..self.n).flat_map(|i| self.row(i).map(move |(c, v)| (c, i, v))).collect();
        CsrMatrix::from_triplets(self.n, t).expect("transpose of a valid matrix")
    }

    /// `(A + Aᵀ)/2`.
    pub fn symmetric_part(&self) -> CsrMatrix {
        let mut t: Vec<_> = (0..self.n).flat_map(|i| self.row(i).map(move |(c, v)| (i, c, 0.5 * v))).collect();
        t.extend((0..self.n).flat_map(|i| self.row(i).map(move |(c, v)| (c, i, 0.5 * v))));
        CsrMatrix::from_triplets(self.n, t).expect("symmetric part of a valid matrix")
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |A − Aᵀ| / max |A|`.
    pub fn asymmetry(&self) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            return 0.0;
        }
        let t = self.transpose();
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for (c, v) in self.row(i) {
                worst = worst.max((v - t.get(i, c)).abs());
            }
        }
        worst / m
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; self.n]; self.n];
        for (i, row) in a.iter_mut().enumerate() {
            for (c, v) in self.row(i) {
                row[c] = v;
            }
        }
        a
    }

    /// Coordinate list, one `row col value` line per stored entry.
    pub fn to_coo(&self) -> String {
        let mut s = String::new();
        for i in 0..self.n {
            for (c, v) in self.row(i) {
                writeln!(s, "{i} {c} {v:.16e}").unwrap();
            }
        }
        s
    }
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    let p: Vec<f64> = x.iter().zip(y).map(|(a, b)| a * b).collect();
    pairwise_sum(&p)
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let a = CsrMatrix::from_triplets(2, vec![(1, 0, 2.0), (0, 0, 1.0), (1, 0, 3.0), (0, 1, -1.0)]).unwrap();
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.get(1, 0), 5.0);
        assert_eq!(a.matvec(&[1.0, 2.0]), vec![-1.0, 5.0]);
        assert_eq!(a.to_coo().lines().count(), 3);
        assert!(a.asymmetry() > 0.5);
        assert_eq!(a.symmetric_part().asymmetry(), 0.0);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(CsrMatrix::from_triplets(2, vec![(2, 0, 1.0)]).is_err());
    }
}
