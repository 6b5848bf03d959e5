//! Sparse chain-level operators and finitely supported chains.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::complex::AbsoluteComplex;
use crate::error::{Error, Result};
use crate::exact::{integerize, q, q_to_f64, sparse_rank, QMatrix, Q};

/// Optional locality metadata attached to an operator.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct OperatorMeta {
    pub vicinality: Option<usize>,
    pub entry_bound: Option<f64>,
}

/// A sparse linear map from degree-`source_degree` chains to
/// degree-`target_degree` chains with exact rational entries.
///
/// Rows index target cells and columns index source cells, both by position
/// within their dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct CellOperator {
    pub source_degree: usize,
    pub target_degree: usize,
    rows: usize,
    cols: Vec<Vec<(usize, Q)>>,
    pub meta: OperatorMeta,
}

impl CellOperator {
    pub fn zero(source_degree: usize, target_degree: usize, rows: usize, cols: usize) -> Self {
        CellOperator { source_degree, target_degree, rows, cols: vec![Vec::new(); cols], meta: OperatorMeta::default() }
    }

    pub fn identity(degree: usize, n: usize) -> Self {
        let mut op = Self::zero(degree, degree, n, n);
        for (j, c) in op.cols.iter_mut().enumerate() {
            c.push((j, q(1)));
        }
        op
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(
        source_degree: usize,
        target_degree: usize,
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Q)>,
    ) -> Self {
        let mut acc: Vec<BTreeMap<usize, Q>> = vec![BTreeMap::new(); cols];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r}, {c}) out of range {rows}x{cols}");
            *acc[c].entry(r).or_insert_with(Q::zero) += v;
        }
        let cols = acc
            .into_iter()
            .map(|m| m.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        CellOperator { source_degree, target_degree, rows, cols, meta: OperatorMeta::default() }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &[(usize, Q)] {
        &self.cols[j]
    }

    pub fn get(&self, r: usize, c: usize) -> Q {
        self.cols[c]
            .binary_search_by_key(&r, |(i, _)| *i)
            .map_or_else(|_| Q::zero(), |k| self.cols[c][k].1.clone())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Q)> + '_ {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r, c, v)))
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    pub fn transpose(&self) -> Self {
        CellOperator::from_triplets(
            self.target_degree,
            self.source_degree,
            self.ncols(),
            self.rows,
            self.triplets().map(|(r, c, v)| (c, r, v.clone())),
        )
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &CellOperator) -> Result<Self> {
        if other.rows != self.ncols() {
            return Err(Error::DegreeMismatch(format!(
                "cannot compose {}x{} after {}x{}",
                self.rows,
                self.ncols(),
                other.rows,
                other.ncols()
            )));
        }
        let mut cols = Vec::with_capacity(other.ncols());
        for ocol in &other.cols {
            let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
            for (k, b) in ocol {
                for (r, a) in &self.cols[*k] {
                    *acc.entry(*r).or_insert_with(Q::zero) += a * b;
                }
            }
            cols.push(acc.into_iter().filter(|(_, v)| !v.is_zero()).collect());
        }
        Ok(CellOperator {
            source_degree: other.source_degree,
            target_degree: self.target_degree,
            rows: self.rows,
            cols,
            meta: OperatorMeta::default(),
        })
    }

    fn combine(&self, other: &CellOperator, sign: i64) -> Result<Self> {
        if self.rows != other.rows || self.ncols() != other.ncols() {
            return Err(Error::DegreeMismatch(format!(
                "shape {}x{} vs {}x{}",
                self.rows,
                self.ncols(),
                other.rows,
                other.ncols()
            )));
        }
        let s = q(sign);
        Ok(CellOperator::from_triplets(
            self.source_degree,
            self.target_degree,
            self.rows,
            self.ncols(),
            self.triplets()
                .map(|(r, c, v)| (r, c, v.clone()))
                .chain(other.triplets().map(|(r, c, v)| (r, c, v * &s))),
        ))
    }

    pub fn add(&self, other: &CellOperator) -> Result<Self> {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &CellOperator) -> Result<Self> {
        self.combine(other, -1)
    }

    pub fn scale(&self, s: &Q) -> Self {
        CellOperator::from_triplets(
            self.source_degree,
            self.target_degree,
            self.rows,
            self.ncols(),
            self.triplets().map(|(r, c, v)| (r, c, v * s)),
        )
    }

    pub fn apply(&self, x: &[Q]) -> Vec<Q> {
        assert_eq!(x.len(), self.ncols());
        let mut y = vec![Q::zero(); self.rows];
        for (c, col) in self.cols.iter().enumerate() {
            if x[c].is_zero() {
                continue;
            }
            for (r, v) in col {
                y[r.to_owned()] += v * &x[c];
            }
        }
        y
    }

    pub fn apply_f64(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols());
        let mut y = vec![0.0; self.rows];
        for (c, col) in self.cols.iter().enumerate() {
            for (r, v) in col {
                y[*r] += q_to_f64(v) * x[c];
            }
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.ncols());
        for (r, c, v) in self.triplets() {
            m[(r, c)] = q_to_f64(v);
        }
        m
    }

    pub fn to_qmatrix(&self) -> QMatrix {
        let mut m = QMatrix::zeros(self.rows, self.ncols());
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v.clone();
        }
        m
    }

    /// Exact rank over ℚ.
    pub fn rank(&self) -> usize {
        let vecs: Vec<_> = self.cols.iter().map(|c| integerize(c)).collect();
        sparse_rank(&vecs)
    }

    /// Nonzero count per column and per row.
    pub fn support_counts(&self) -> (Vec<usize>, Vec<usize>) {
        let col_counts: Vec<usize> = self.cols.iter().map(|c| c.len()).collect();
        let mut row_counts = vec![0; self.rows];
        for col in &self.cols {
            for (r, _) in col {
                row_counts[*r] += 1;
            }
        }
        (col_counts, row_counts)
    }

    pub fn max_abs_entry(&self) -> Q {
        self.triplets().map(|(_, _, v)| v.abs()).max().unwrap_or_else(Q::zero)
    }

    /// Maximum absolute column sum: the ℓ¹ → ℓ¹ operator norm.
    pub fn norm_1(&self) -> f64 {
        self.cols
            .iter()
            .map(|c| c.iter().map(|(_, v)| q_to_f64(v).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute row sum: the ℓ^∞ → ℓ^∞ operator norm.
    pub fn norm_inf(&self) -> f64 {
        let mut rows = vec![0.0; self.rows];
        for (r, _, v) in self.triplets() {
            rows[r] += q_to_f64(v).abs();
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    /// Largest singular value (ℓ² operator norm).
    pub fn norm_2(&self) -> f64 {
        if self.rows == 0 || self.ncols() == 0 || self.is_zero() {
            return 0.0;
        }
        let m = self.to_dense();
        let ata = m.transpose() * &m;
        let e = nalgebra::SymmetricEigen::new(ata);
        e.eigenvalues.iter().cloned().fold(0.0, f64::max).max(0.0).sqrt()
    }

    pub fn frobenius(&self) -> f64 {
        self.triplets().map(|(_, _, v)| q_to_f64(v).powi(2)).sum::<f64>().sqrt()
    }
}

/// Boundary matrix taking degree-`q+1` chains to degree-`q` chains; entry
/// `(τ, σ)` is the incidence number ε(τ, σ). Out of range degrees give the
/// zero operator of the right shape.
pub fn boundary_matrix(k: &AbsoluteComplex, q_deg: usize) -> CellOperator {
    let rows = k.count(q_deg);
    let src = k.cells_of_dim(q_deg + 1);
    CellOperator::from_triplets(
        q_deg + 1,
        q_deg,
        rows,
        src.len(),
        src.iter().enumerate().flat_map(|(j, &s)| {
            k.boundary(s)
                .iter()
                .filter(|(_, e)| *e != 0)
                .map(move |&(f, e)| (k.position(f), j, q(e)))
        }),
    )
}

/// Coboundary d_q: degree-`q` cochains to degree-`q+1` cochains, the
/// transpose of [`boundary_matrix`].
pub fn coboundary_matrix(k: &AbsoluteComplex, q_deg: usize) -> CellOperator {
    boundary_matrix(k, q_deg).transpose()
}

/// A finitely supported chain (or cochain) of a fixed degree, indexed by cell
/// position within that degree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SparseChain<T = f64> {
    pub degree: usize,
    pub coeffs: BTreeMap<usize, T>,
}

impl<T: Clone + PartialEq + Default> SparseChain<T> {
    pub fn new(degree: usize) -> Self {
        SparseChain { degree, coeffs: BTreeMap::new() }
    }

    pub fn from_dense(degree: usize, v: &[T]) -> Self {
        let zero = T::default();
        SparseChain {
            degree,
            coeffs: v.iter().enumerate().filter(|(_, x)| **x != zero).map(|(i, x)| (i, x.clone())).collect(),
        }
    }

    pub fn to_dense(&self, n: usize) -> Vec<T> {
        let mut v = vec![T::default(); n];
        for (i, x) in &self.coeffs {
            v[*i] = x.clone();
        }
        v
    }
}

impl SparseChain<f64> {
    /// (Σ |c_σ|^p)^{1/p}.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm(self.coeffs.values().copied(), p)
    }
}

pub fn lp_norm(values: impl IntoIterator<Item = f64>, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("p = {p} < 1")));
    }
    if p.is_infinite() {
        return Ok(values.into_iter().map(f64::abs).fold(0.0, f64::max));
    }
    Ok(values.into_iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_simplicial;

    #[test]
    fn lp_norm_examples() {
        assert_eq!(SparseChain::<f64>::new(0).lp_norm(2.0).unwrap(), 0.0);
        let c = SparseChain::from_dense(1, &[3.0, 4.0]);
        assert!((c.lp_norm(2.0).unwrap() - 5.0).abs() < 1e-15);
        let c = SparseChain::from_dense(1, &[1.0, 1.0, 1.0]);
        assert_eq!(c.lp_norm(1.0).unwrap(), 3.0);
        assert!(c.lp_norm(0.5).is_err());
    }

    #[test]
    fn single_edge_boundary() {
        let e = build_simplicial(&[vec![0, 1]]).unwrap();
        let b = boundary_matrix(&e, 0);
        assert_eq!((b.nrows(), b.ncols()), (2, 1));
        assert_eq!(b.get(0, 0), q(-1));
        assert_eq!(b.get(1, 0), q(1));
        let d = coboundary_matrix(&e, 0);
        assert_eq!((d.nrows(), d.ncols()), (1, 2));
        assert!(boundary_matrix(&e, 1).is_zero());
        assert_eq!(boundary_matrix(&e, 3).ncols(), 0);
    }

    #[test]
    fn circle_boundary_rank() {
        let c3 = build_simplicial(&[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        assert_eq!(boundary_matrix(&c3, 0).rank(), 2);
        let d0 = coboundary_matrix(&c3, 0);
        assert_eq!(d0, boundary_matrix(&c3, 0).transpose());
    }

    #[test]
    fn compose_and_norms() {
        let a = CellOperator::from_triplets(0, 0, 2, 2, [(0, 0, q(1)), (0, 1, q(2)), (1, 1, q(-3))]);
        let i = CellOperator::identity(0, 2);
        assert_eq!(a.compose(&i).unwrap(), a);
        assert_eq!(a.norm_1(), 5.0);
        assert_eq!(a.norm_inf(), 3.0);
        assert!(a.norm_2() <= a.frobenius() + 1e-12);
        assert!(a.sub(&a).unwrap().is_zero());
    }
}
