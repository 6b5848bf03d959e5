//! L_p norms, the combinatorial Hodge Laplacian, harmonic cochains, Hodge
//! decomposition, Betti numbers and spectral gaps.
//!
//! Betti numbers are exact (rank over ℚ). Spectra are floating point: a dense
//! symmetric solver below [`DENSE_LIMIT`] cells and Lanczos above it.

mod family;
mod lanczos;

pub use family::{gap_trend, CylinderFamily, DisjointTrianglesFamily, ExhaustionFamily, FnFamily, GapTrend, Verdict};
pub use lanczos::{lanczos_gap, SparseSym};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::complex::AbsoluteComplex;
use crate::error::{Error, Result};
use crate::operator::{boundary_matrix, coboundary_matrix, CellOperator, SparseChain};

/// Default relative kernel threshold: eigenvalues below `tol·‖Δ‖` count as 0.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Above this many degree-q cells the spectral gap uses Lanczos.
pub const DENSE_LIMIT: usize = 3000;

/// Δ_q = d_{q-1} ∂_{q-1} + ∂_q d_q, assembled exactly.
pub fn laplacian(k: &AbsoluteComplex, q: usize) -> CellOperator {
    let n = k.count(q);
    let mut lap = CellOperator::zero(q, q, n, n);
    if q > 0 {
        // d_{q-1} ∂_{q-1} = B_{q-1}ᵀ B_{q-1}
        let b = boundary_matrix(k, q - 1);
        lap = lap.add(&b.transpose().compose(&b).unwrap()).unwrap();
    }
    let b = boundary_matrix(k, q);
    lap = lap.add(&b.compose(&b.transpose()).unwrap()).unwrap();
    lap
}

/// Ascending eigenvalues and matching eigenvectors (columns) of a symmetric
/// matrix.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let e = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let values = order.iter().map(|&i| e.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| e.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Sorted eigenvalues of Δ_q.
pub fn spectrum(k: &AbsoluteComplex, q: usize) -> Vec<f64> {
    symmetric_eigen(&laplacian(k, q).to_dense()).0
}

/// Exact b_q = #q-cells − rank ∂_{q−1} − rank ∂_q over ℚ.
pub fn betti_number(k: &AbsoluteComplex, q: usize) -> usize {
    let n = k.count(q);
    let below = if q > 0 { boundary_matrix(k, q - 1).rank() } else { 0 };
    let above = boundary_matrix(k, q).rank();
    n - below - above
}

pub fn betti_numbers(k: &AbsoluteComplex) -> Vec<usize> {
    (0..=k.dim().unwrap_or(0)).map(|q| if k.is_empty() { 0 } else { betti_number(k, q) }).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Betti {
    pub q: usize,
    pub p: f64,
    pub value: usize,
    pub note: Option<String>,
}

/// dim H^{q,p}(K) for a finite complex. On finite complexes reduced and
/// unreduced cohomology agree and the dimension does not depend on p.
pub fn betti(k: &AbsoluteComplex, q: usize, p: f64) -> Result<Betti> {
    if !(p >= 1.0) || p.is_infinite() {
        return Err(Error::InvalidArgument(format!("p = {p} must satisfy 1 <= p < inf")));
    }
    let note = if p != 2.0 {
        Some("finite complex: dimension is independent of p; computed by exact rank".to_string())
    } else {
        None
    };
    Ok(Betti { q, p, value: betti_number(k, q), note })
}

fn dense_norm(values: &[f64]) -> f64 {
    values.iter().cloned().fold(0.0, |a: f64, b| a.max(b.abs()))
}

/// Orthonormal basis of ker Δ_q: eigenvectors with eigenvalue below
/// `tol·‖Δ_q‖`.
pub fn harmonic_space(k: &AbsoluteComplex, q: usize, tol: f64) -> Vec<SparseChain<f64>> {
    let n = k.count(q);
    if n == 0 {
        return Vec::new();
    }
    let lap = laplacian(k, q).to_dense();
    let (values, vectors) = symmetric_eigen(&lap);
    let norm = dense_norm(&values);
    let thresh = if norm == 0.0 { f64::INFINITY } else { tol * norm };
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v < thresh)
        .map(|(i, _)| {
            let col: Vec<f64> = vectors.column(i).iter().copied().collect();
            let mut chain = SparseChain::new(q);
            for (j, x) in col.into_iter().enumerate() {
                if x != 0.0 {
                    chain.coeffs.insert(j, x);
                }
            }
            chain
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct HodgeDecomposition {
    pub harmonic: SparseChain<f64>,
    pub exact: SparseChain<f64>,
    pub coexact: SparseChain<f64>,
    /// ‖h + e + c − input‖₂.
    pub reconstruction_error: f64,
    /// Least-squares residual of `exact` against im d_{q−1}.
    pub exact_residual: f64,
    /// Least-squares residual of `coexact` against im ∂_q.
    pub coexact_residual: f64,
}

impl HodgeDecomposition {
    pub fn max_inner_product(&self, n: usize) -> f64 {
        let h = DVector::from_vec(self.harmonic.to_dense(n));
        let e = DVector::from_vec(self.exact.to_dense(n));
        let c = DVector::from_vec(self.coexact.to_dense(n));
        h.dot(&e).abs().max(h.dot(&c).abs()).max(e.dot(&c).abs())
    }
}

/// Orthonormal basis of the column space of `m`.
fn column_space(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let u = svd.u.unwrap();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| smax > 0.0 && svd.singular_values[i] > 1e-10 * smax)
        .collect();
    DMatrix::from_fn(m.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

fn lstsq_residual(m: &DMatrix<f64>, target: &DVector<f64>) -> f64 {
    if m.ncols() == 0 {
        return target.norm();
    }
    let svd = m.clone().svd(true, true);
    let x = svd.solve(target, 1e-12).unwrap_or_else(|_| DVector::zeros(m.ncols()));
    (m * x - target).norm()
}

/// Orthogonal decomposition c = h + d a + ∂ b.
pub fn hodge_decompose(k: &AbsoluteComplex, q: usize, c: &SparseChain<f64>) -> Result<HodgeDecomposition> {
    if c.degree != q {
        return Err(Error::DegreeMismatch(format!("chain of degree {} given for q = {q}", c.degree)));
    }
    let n = k.count(q);
    if c.coeffs.keys().any(|&i| i >= n) {
        return Err(Error::InvalidArgument("chain index out of range".into()));
    }
    let input = DVector::from_vec(c.to_dense(n));
    let d_prev = if q > 0 { coboundary_matrix(k, q - 1).to_dense() } else { DMatrix::zeros(n, 0) };
    let b_next = boundary_matrix(k, q).to_dense();
    let ue = column_space(&d_prev);
    let uc = column_space(&b_next);
    let exact = &ue * (ue.transpose() * &input);
    let coexact = &uc * (uc.transpose() * &input);
    let harmonic = &input - &exact - &coexact;
    let recon = (&harmonic + &exact + &coexact - &input).norm();
    let exact_residual = lstsq_residual(&d_prev, &exact);
    let coexact_residual = lstsq_residual(&b_next, &coexact);
    let to_chain = |v: &DVector<f64>| SparseChain::from_dense(q, v.as_slice());
    Ok(HodgeDecomposition {
        harmonic: to_chain(&harmonic),
        exact: to_chain(&exact),
        coexact: to_chain(&coexact),
        reconstruction_error: recon,
        exact_residual,
        coexact_residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EigenSolver {
    Auto,
    Dense,
    Lanczos,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralGap {
    pub gap: f64,
    /// No q-cells at all.
    pub empty: bool,
    pub kernel_dim: usize,
    pub solver: EigenSolver,
}

/// Smallest eigenvalue of Δ_q above `tol·‖Δ_q‖`; 0 only when Δ_q = 0.
pub fn spectral_gap(k: &AbsoluteComplex, q: usize, tol: f64) -> SpectralGap {
    spectral_gap_with(k, q, tol, EigenSolver::Auto, 0)
}

pub fn spectral_gap_with(k: &AbsoluteComplex, q: usize, tol: f64, solver: EigenSolver, seed: u64) -> SpectralGap {
    let n = k.count(q);
    if n == 0 {
        return SpectralGap { gap: 0.0, empty: true, kernel_dim: 0, solver: EigenSolver::Dense };
    }
    let solver = match solver {
        EigenSolver::Auto if n > DENSE_LIMIT => EigenSolver::Lanczos,
        EigenSolver::Auto => EigenSolver::Dense,
        s => s,
    };
    let lap = laplacian(k, q);
    match solver {
        EigenSolver::Lanczos => {
            let sym = SparseSym::from_operator(&lap);
            let gap = lanczos_gap(&sym, tol, seed);
            SpectralGap { gap, empty: false, kernel_dim: betti_number(k, q), solver }
        }
        _ => {
            let (values, _) = symmetric_eigen(&lap.to_dense());
            let norm = dense_norm(&values);
            if norm == 0.0 {
                return SpectralGap { gap: 0.0, empty: false, kernel_dim: n, solver: EigenSolver::Dense };
            }
            let thresh = tol * norm;
            let kernel_dim = values.iter().filter(|&&v| v < thresh).count();
            let gap = values.iter().copied().find(|&v| v >= thresh).unwrap_or(0.0);
            SpectralGap { gap, empty: false, kernel_dim, solver: EigenSolver::Dense }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q as qq;
    use crate::fixtures;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    // Oracle: eigenvalues of [[1,-1],[-1,1]] are the roots of λ² − 2λ = 0.
    #[test]
    fn edge_laplacian() {
        let e = fixtures::edge();
        let l = laplacian(&e, 0);
        assert_eq!(l.get(0, 0), qq(1));
        assert_eq!(l.get(0, 1), qq(-1));
        assert!(close(&spectrum(&e, 0), &[0.0, 2.0], 1e-12));
        assert!((spectral_gap(&e, 0, DEFAULT_TOL).gap - 2.0).abs() < 1e-12);
    }

    // Oracle: the graph Laplacian of K₃ is 3I − J with spectrum {0, 3, 3};
    // Δ₁ = d₀∂₀ has the same nonzero spectrum plus one kernel vector.
    #[test]
    fn circle_laplacians() {
        let c = fixtures::circle3();
        assert!(close(&spectrum(&c, 0), &[0.0, 3.0, 3.0], 1e-12));
        assert!(close(&spectrum(&c, 1), &[0.0, 3.0, 3.0], 1e-12));
        assert!((spectral_gap(&c, 0, DEFAULT_TOL).gap - 3.0).abs() < 1e-12);
        let h = harmonic_space(&c, 1, DEFAULT_TOL);
        assert_eq!(h.len(), 1);
        // edges 0,1 / 0,2 / 1,2: the cycle is e01 − e02 + e12
        let v = h[0].to_dense(3);
        let s = v[0].signum();
        let expected = [1.0, -1.0, 1.0].map(|x: f64| x / 3f64.sqrt());
        assert!(close(&v.iter().map(|x| x * s).collect::<Vec<_>>(), &expected, 1e-12));
    }

    #[test]
    fn empty_degree_gap() {
        let g = spectral_gap(&fixtures::edge(), 2, DEFAULT_TOL);
        assert!(g.empty);
        assert_eq!(g.gap, 0.0);
    }

    #[test]
    fn betti_oracles() {
        assert_eq!(betti_numbers(&fixtures::torus()), vec![1, 2, 1]);
        assert_eq!(betti_numbers(&fixtures::octahedron()), vec![1, 0, 1]);
        assert_eq!(betti_numbers(&fixtures::rp2()), vec![1, 0, 0]);
        assert_eq!(betti(&fixtures::rp2(), 1, 3.0).unwrap().value, 0);
        assert!(betti(&fixtures::rp2(), 1, 0.5).is_err());
    }

    #[test]
    fn harmonic_dimensions() {
        assert!(harmonic_space(&fixtures::cone_disc(), 1, DEFAULT_TOL).is_empty());
        assert_eq!(harmonic_space(&fixtures::octahedron(), 2, DEFAULT_TOL).len(), 1);
    }

    #[test]
    fn decomposition_of_harmonic_and_exact_chains() {
        let c = fixtures::circle3();
        let h = &harmonic_space(&c, 1, DEFAULT_TOL)[0];
        let dec = hodge_decompose(&c, 1, h).unwrap();
        for (i, x) in h.to_dense(3).iter().enumerate() {
            assert!((dec.harmonic.to_dense(3)[i] - x).abs() < 1e-12);
        }
        assert!(dec.exact.lp_norm(2.0).unwrap() < 1e-12);
        // c = d(a) with a = (1, 0, 0)
        let d0 = coboundary_matrix(&c, 0);
        let da = SparseChain::from_dense(1, &d0.apply_f64(&[1.0, 0.0, 0.0]));
        let dec = hodge_decompose(&c, 1, &da).unwrap();
        assert!(dec.harmonic.lp_norm(2.0).unwrap() < 1e-12);
        assert!(dec.coexact.lp_norm(2.0).unwrap() < 1e-12);
        assert!(dec.exact_residual < 1e-9);
    }
}
