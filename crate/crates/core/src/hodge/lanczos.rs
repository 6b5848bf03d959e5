use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::q_to_f64;
use crate::operator::CellOperator;

/// Symmetric sparse matrix in row form, f64 entries.
#[derive(Clone, Debug)]
pub struct SparseSym {
    pub n: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseSym {
    pub fn from_operator(op: &CellOperator) -> Self {
        let mut rows = vec![Vec::new(); op.nrows()];
        for (r, c, v) in op.triplets() {
            rows[r].push((c, q_to_f64(v)));
        }
        SparseSym { n: op.nrows(), rows }
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (r, row) in self.rows.iter().enumerate() {
            y[r] = row.iter().map(|(c, v)| v * x[*c]).sum();
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Smallest eigenvalue above `tol·‖A‖` of a positive semidefinite sparse
/// matrix, by Lanczos with full reorthogonalization.
///
/// The start vector is `A r` for a seeded random `r`, which lies in
/// (ker A)^⊥; Ritz values below the kernel threshold are discarded.
pub fn lanczos_gap(a: &SparseSym, tol: f64, seed: u64) -> f64 {
    let n = a.n;
    if n == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut v0 = vec![0.0; n];
    a.apply(&r, &mut v0);
    if normalize(&mut v0) == 0.0 {
        return 0.0;
    }
    let max_steps = n.min(1500);
    let mut basis: Vec<Vec<f64>> = vec![v0];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut last = f64::NAN;
    for step in 0..max_steps {
        a.apply(&basis[step], &mut w);
        let al = dot(&w, &basis[step]);
        alpha.push(al);
        // full reorthogonalization, twice
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let be = normalize(&mut w);
        let done = be < 1e-12 * alpha.iter().cloned().fold(1.0, f64::max) || step + 1 == max_steps;
        if (step + 1) % 10 == 0 || done {
            let m = alpha.len();
            let t = DMatrix::from_fn(m, m, |i, j| {
                if i == j {
                    alpha[i]
                } else if i + 1 == j {
                    beta[i]
                } else if j + 1 == i {
                    beta[j]
                } else {
                    0.0
                }
            });
            let e = SymmetricEigen::new(t);
            let norm = e.eigenvalues.iter().cloned().fold(0.0, f64::max);
            let thresh = tol * norm;
            let mut best: Option<(f64, usize)> = None;
            for (i, &val) in e.eigenvalues.iter().enumerate() {
                if val >= thresh && best.is_none_or(|(b, _)| val < b) {
                    best = Some((val, i));
                }
            }
            if let Some((val, i)) = best {
                let resid = (be * e.eigenvectors[(m - 1, i)]).abs();
                if done || (resid < 1e-10 * norm.max(1.0) && (val - last).abs() < 1e-12 * norm.max(1.0)) {
                    return val;
                }
                last = val;
            } else if done {
                return 0.0;
            }
        }
        if done {
            break;
        }
        beta.push(be);
        basis.push(w.clone());
    }
    last
}
