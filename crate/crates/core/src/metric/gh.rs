use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{hausdorff_distance, FiniteMetricSpace};
use crate::error::{Error, Result};
use crate::exact::{q, q_from_f64, q_to_f64, Q};

pub const MAX_GH_ITERATIONS: usize = 200;

/// Cross distances ρ(x, y) gluing X and Y into one metric on X ⊔ Y.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibleExtension {
    pub cross: Vec<Vec<Q>>,
}

impl AdmissibleExtension {
    /// The metric on X ⊔ Y, X first. Fails unless every entry is positive and
    /// all triangle inequalities hold.
    pub fn union(&self, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<FiniteMetricSpace> {
        let (n, m) = (x.len(), y.len());
        if self.cross.len() != n || self.cross.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidArgument(format!("cross matrix must be {n}x{m}")));
        }
        let mut full = vec![vec![Q::zero(); n + m]; n + m];
        for i in 0..n + m {
            for j in 0..n + m {
                full[i][j] = match (i < n, j < n) {
                    (true, true) => x.d(i, j).clone(),
                    (false, false) => y.d(i - n, j - n).clone(),
                    (true, false) => self.cross[i][j - n].clone(),
                    (false, true) => self.cross[j][i - n].clone(),
                };
            }
        }
        FiniteMetricSpace::new(full)
    }

    /// d_H(X, Y) inside X ⊔ Y under this extension.
    pub fn hausdorff(&self, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<Q> {
        let u = self.union(x, y)?;
        let xs: Vec<usize> = (0..x.len()).collect();
        let ys: Vec<usize> = (x.len()..x.len() + y.len()).collect();
        hausdorff_distance(&u, &xs, &ys)
    }

    /// Metric closure of a correspondence: ρ(x, y) = min over (x', y') ∈ R of
    /// d(x, x') + ε + d(y', y). Admissible whenever dis R ≤ 2ε and ε > 0.
    pub fn from_correspondence(
        x: &FiniteMetricSpace,
        y: &FiniteMetricSpace,
        pairs: &[(usize, usize)],
        eps: &Q,
    ) -> Self {
        let cross = (0..x.len())
            .map(|a| {
                (0..y.len())
                    .map(|b| {
                        pairs
                            .iter()
                            .map(|&(a2, b2)| x.d(a, a2) + eps + y.d(b2, b))
                            .min()
                            .expect("correspondence is nonempty")
                    })
                    .collect()
            })
            .collect();
        AdmissibleExtension { cross }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GhInterval {
    #[serde(serialize_with = "super::ser_q")]
    pub lower: Q,
    #[serde(serialize_with = "super::ser_q")]
    pub upper: Q,
    pub iterations: usize,
    /// Correspondence witnessing the upper bound.
    pub correspondence: Vec<(usize, usize)>,
}

impl GhInterval {
    pub fn lower_f64(&self) -> f64 {
        q_to_f64(&self.lower)
    }
    pub fn upper_f64(&self) -> f64 {
        q_to_f64(&self.upper)
    }
    pub fn width(&self) -> Q {
        &self.upper - &self.lower
    }
    pub fn contains(&self, v: f64, slack: f64) -> bool {
        self.lower_f64() - slack <= v && v <= self.upper_f64() + slack
    }
}

/// Backtracking search for a correspondence with distortion ≤ `bound`.
struct Search<'a> {
    x: &'a FiniteMetricSpace,
    y: &'a FiniteMetricSpace,
    bound: Q,
    pairs: Vec<(usize, usize)>,
}

impl Search<'_> {
    fn compatible(&self, a: usize, b: usize) -> bool {
        self.pairs
            .iter()
            .all(|&(a2, b2)| (self.x.d(a, a2) - self.y.d(b, b2)).abs() <= self.bound)
    }

    /// Assign an image to every x in order, then cover the remaining y.
    fn assign(&mut self, a: usize) -> bool {
        if a == self.x.len() {
            return self.cover();
        }
        for b in 0..self.y.len() {
            if self.compatible(a, b) {
                self.pairs.push((a, b));
                if self.assign(a + 1) {
                    return true;
                }
                self.pairs.pop();
            }
        }
        false
    }

    fn cover(&mut self) -> bool {
        let Some(b) = (0..self.y.len()).find(|&b| !self.pairs.iter().any(|p| p.1 == b)) else {
            return true;
        };
        for a in 0..self.x.len() {
            if self.compatible(a, b) {
                self.pairs.push((a, b));
                if self.cover() {
                    return true;
                }
                self.pairs.pop();
            }
        }
        false
    }
}

fn feasible(x: &FiniteMetricSpace, y: &FiniteMetricSpace, eps: &Q) -> Option<Vec<(usize, usize)>> {
    let mut s = Search { x, y, bound: eps * q(2), pairs: Vec::new() };
    s.assign(0).then_some(s.pairs)
}

/// Brackets d_GH(X, Y) by bisection on ε over binary rationals. Each step asks
/// whether a correspondence of distortion ≤ 2ε exists, which is exactly when
/// an admissible extension realizes both ε-inclusions (up to ε > 0).
pub fn gh_distance(x: &FiniteMetricSpace, y: &FiniteMetricSpace, tol: f64) -> Result<GhInterval> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySubset);
    }
    let tol_q = q_from_f64(tol)
        .filter(|t| t.is_positive())
        .ok_or_else(|| Error::InvalidArgument(format!("tolerance must be positive, got {tol}")))?;
    if let Some(r) = feasible(x, y, &Q::zero()) {
        return Ok(GhInterval { lower: Q::zero(), upper: Q::zero(), iterations: 0, correspondence: r });
    }
    let half_diam = std::cmp::max(x.diameter(), y.diameter()) / q(2);
    let mut upper = Q::one();
    while upper < half_diam {
        upper *= q(2);
    }
    let mut witness = feasible(x, y, &upper).expect("X × Y has distortion at most the larger diameter");
    let mut lower = Q::zero();
    let mut iterations = 0;
    while &upper - &lower > tol_q {
        if iterations == MAX_GH_ITERATIONS {
            return Err(Error::GhNonConvergence { lower: q_to_f64(&lower), upper: q_to_f64(&upper) });
        }
        iterations += 1;
        let mid = (&lower + &upper) / q(2);
        match feasible(x, y, &mid) {
            Some(r) => {
                upper = mid;
                witness = r;
            }
            None => lower = mid,
        }
    }
    Ok(GhInterval { lower, upper, iterations, correspondence: witness })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point(a: i64) -> FiniteMetricSpace {
        FiniteMetricSpace::from_i64(&[vec![0, a], vec![a, 0]]).unwrap()
    }

    #[test]
    fn isometric_spaces_are_at_zero() {
        let x = FiniteMetricSpace::from_i64(&[vec![0, 1, 2], vec![1, 0, 1], vec![2, 1, 0]]).unwrap();
        let y = x.permuted(&[2, 0, 1]);
        let r = gh_distance(&x, &y, 1e-8).unwrap();
        assert!(r.upper <= q_from_f64(1e-8).unwrap());
        assert_eq!(r.lower, Q::zero());
    }

    #[test]
    fn point_to_space_is_half_diameter() {
        let p = FiniteMetricSpace::single_point();
        let y = FiniteMetricSpace::from_i64(&[vec![0, 3, 4], vec![3, 0, 5], vec![4, 5, 0]]).unwrap();
        let r = gh_distance(&p, &y, 1e-9).unwrap();
        assert!(r.contains(2.5, 0.0));
        assert!(q_to_f64(&r.width()) <= 1e-9);
    }

    #[test]
    fn two_point_spaces() {
        let r = gh_distance(&two_point(1), &two_point(3), 1e-9).unwrap();
        assert!(r.contains(1.0, 0.0));
    }

    #[test]
    fn witness_extension_is_admissible() {
        let x = two_point(1);
        let y = FiniteMetricSpace::from_i64(&[vec![0, 2, 2], vec![2, 0, 2], vec![2, 2, 0]]).unwrap();
        let r = gh_distance(&x, &y, 1e-6).unwrap();
        let ext = AdmissibleExtension::from_correspondence(&x, &y, &r.correspondence, &r.upper);
        assert!(ext.hausdorff(&x, &y).unwrap() <= r.upper);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let x = two_point(1);
        assert!(gh_distance(&x, &x, 0.0).is_err());
        assert!(gh_distance(&x, &two_point(2), -1.0).is_err());
    }
}
