//! Finite metric spaces, maps between them, and the Hausdorff,
//! Gromov–Hausdorff and Lipschitz distances.
//!
//! Distances are exact rationals. The Gromov–Hausdorff distance is bracketed
//! by bisection on binary rationals; the Lipschitz distances are exact
//! minima over enumerated maps, reported as `f64` because of the logarithm.

mod gh;
mod lipschitz;

pub use gh::{gh_distance, AdmissibleExtension, GhInterval, MAX_GH_ITERATIONS};
pub use lipschitz::{lipschitz_distance, lipschitz_top_distance, log_plus, DEFAULT_MAX_SIZE, MAX_BIJECTION_POINTS};

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{q_from_f64, q_to_f64, Q};

/// Tolerance for symmetry and triangle checks on input matrices.
pub const METRIC_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace {
    n: usize,
    dist: Vec<Q>,
}

impl FiniteMetricSpace {
    /// Validates a full distance matrix: zero diagonal, positive off-diagonal,
    /// symmetric and triangle inequality within [`METRIC_TOL`]. Entries that
    /// are asymmetric within tolerance are replaced by the upper-triangle
    /// value.
    pub fn new(matrix: Vec<Vec<Q>>) -> Result<Self> {
        Self::checked(matrix).map_err(|(_, msg)| Error::InvalidMetric(msg))
    }

    /// Like [`new`](Self::new), reporting the row at fault.
    pub(crate) fn checked(matrix: Vec<Vec<Q>>) -> std::result::Result<Self, (usize, String)> {
        let n = matrix.len();
        if n == 0 {
            return Err((0, "no points".into()));
        }
        let tol = q_from_f64(METRIC_TOL).unwrap();
        let mut dist = Vec::with_capacity(n * n);
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err((i, format!("row {i} has {} entries, expected {n}", row.len())));
            }
            for (j, x) in row.iter().enumerate() {
                if i == j && !x.is_zero() {
                    return Err((i, format!("d({i},{i}) = {x} is not zero")));
                }
                if i != j && !x.is_positive() {
                    return Err((i, format!("d({i},{j}) = {x} is not positive")));
                }
                if (x - &matrix[j][i]).abs() > tol {
                    return Err((i, format!("asymmetric entry d({i},{j}) != d({j},{i})")));
                }
                dist.push(if j >= i { x.clone() } else { matrix[j][i].clone() });
            }
        }
        let space = FiniteMetricSpace { n, dist };
        if let Some((i, j, k)) = space.triangle_violation(&tol) {
            return Err((i, format!("triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})")));
        }
        Ok(space)
    }

    pub fn from_f64(matrix: &[Vec<f64>]) -> Result<Self> {
        let m = matrix
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&x| q_from_f64(x).ok_or_else(|| Error::InvalidMetric(format!("non-finite entry {x}"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(m)
    }

    pub fn from_i64(matrix: &[Vec<i64>]) -> Result<Self> {
        Self::new(matrix.iter().map(|r| r.iter().map(|&x| crate::exact::q(x)).collect()).collect())
    }

    /// Points on the real line at the given coordinates.
    pub fn on_line(coords: &[Q]) -> Result<Self> {
        Self::new(coords.iter().map(|a| coords.iter().map(|b| (a - b).abs()).collect()).collect())
    }

    pub fn single_point() -> Self {
        FiniteMetricSpace { n: 1, dist: vec![Q::zero()] }
    }

    /// First triple `(i, j, k)` with d(i,k) > d(i,j) + d(j,k) + tol.
    fn triangle_violation(&self, tol: &Q) -> Option<(usize, usize, usize)> {
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    if self.d(i, k) > &(self.d(i, j) + self.d(j, k) + tol) {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn d(&self, i: usize, j: usize) -> &Q {
        &self.dist[i * self.n + j]
    }

    pub fn d_f64(&self, i: usize, j: usize) -> f64 {
        q_to_f64(self.d(i, j))
    }

    pub fn diameter(&self) -> Q {
        self.dist.iter().max().cloned().unwrap_or_else(Q::zero)
    }

    /// Sub-space on the given points, in the given order.
    pub fn subspace(&self, points: &[usize]) -> Result<Self> {
        Self::new(points.iter().map(|&i| points.iter().map(|&j| self.d(i, j).clone()).collect()).collect())
    }

    /// Same space with points permuted: new point `i` is old point `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n;
        let mut dist = Vec::with_capacity(n * n);
        for &i in perm {
            for &j in perm {
                dist.push(self.d(i, j).clone());
            }
        }
        FiniteMetricSpace { n, dist }
    }
}

/// d_H(X, Y) = max(max_x min_y d, max_y min_x d) inside `ambient`.
pub fn hausdorff_distance(ambient: &FiniteMetricSpace, x: &[usize], y: &[usize]) -> Result<Q> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySubset);
    }
    if let Some(p) = x.iter().chain(y).find(|&&p| p >= ambient.len()) {
        return Err(Error::InvalidArgument(format!("point {p} not in ambient space")));
    }
    let one_sided = |a: &[usize], b: &[usize]| {
        a.iter()
            .map(|&i| b.iter().map(|&j| ambient.d(i, j)).min().unwrap().clone())
            .max()
            .unwrap()
    };
    Ok(std::cmp::max(one_sided(x, y), one_sided(y, x)))
}

/// A total function between the points of two finite metric spaces.
#[derive(Clone, Debug)]
pub struct MetricMap<'a> {
    pub source: &'a FiniteMetricSpace,
    pub target: &'a FiniteMetricSpace,
    pub assignment: Vec<usize>,
}

impl<'a> MetricMap<'a> {
    pub fn new(source: &'a FiniteMetricSpace, target: &'a FiniteMetricSpace, assignment: Vec<usize>) -> Result<Self> {
        if assignment.len() != source.len() {
            return Err(Error::InvalidMap(format!(
                "{} images given for {} source points",
                assignment.len(),
                source.len()
            )));
        }
        if let Some(&y) = assignment.iter().find(|&&y| y >= target.len()) {
            return Err(Error::InvalidMap(format!("image {y} is not a target point")));
        }
        Ok(MetricMap { source, target, assignment })
    }

    pub fn identity(space: &'a FiniteMetricSpace) -> Self {
        MetricMap { source: space, target: space, assignment: (0..space.len()).collect() }
    }
}

/// max over distinct pairs of d(fx₁, fx₂)/d(x₁, x₂), or 0 below two points.
pub(crate) fn dil_or_zero(source: &FiniteMetricSpace, target: &FiniteMetricSpace, f: &[usize]) -> Q {
    let mut best = Q::zero();
    for i in 0..source.len() {
        for j in i + 1..source.len() {
            let r = target.d(f[i], f[j]) / source.d(i, j);
            if r > best {
                best = r;
            }
        }
    }
    best
}

pub fn dilatation(f: &MetricMap) -> Result<Q> {
    if f.source.len() < 2 {
        return Err(Error::DilatationUndefined);
    }
    Ok(dil_or_zero(f.source, f.target, &f.assignment))
}

/// Constants describing a map between finite spaces. The coarse/rough
/// properties are vacuous on finite spaces, so only the constants are
/// reported.
#[derive(Clone, Debug, Serialize)]
pub struct MapConstants {
    /// Minimal C with d(fx₁,fx₂) ≤ d(x₁,x₂) + C, clamped at 0.
    #[serde(serialize_with = "ser_q")]
    pub semilinearity: Q,
    /// Expansion table `(R, S(R))`: S(R) is the largest image distance over
    /// pairs at source distance ≤ R, sampled at every realized R.
    #[serde(serialize_with = "ser_q_pairs")]
    pub expansion: Vec<(Q, Q)>,
    #[serde(serialize_with = "ser_opt_q")]
    pub dilatation: Option<Q>,
}

pub(crate) fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(q_to_f64(x))
}

fn ser_opt_q<S: serde::Serializer>(x: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&q_to_f64(v)),
        None => s.serialize_none(),
    }
}

fn ser_q_pairs<S: serde::Serializer>(x: &[(Q, Q)], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(x.len()))?;
    for (a, b) in x {
        seq.serialize_element(&(q_to_f64(a), q_to_f64(b)))?;
    }
    seq.end()
}

pub fn classify_map(f: &MetricMap) -> MapConstants {
    let n = f.source.len();
    let mut c = Q::zero();
    let mut pairs: Vec<(Q, Q)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let dx = f.source.d(i, j).clone();
            let dy = f.target.d(f.assignment[i], f.assignment[j]).clone();
            let excess = &dy - &dx;
            if excess > c {
                c = excess;
            }
            pairs.push((dx, dy));
        }
    }
    pairs.sort();
    let mut expansion: Vec<(Q, Q)> = Vec::new();
    let mut running = Q::zero();
    for (r, s) in pairs {
        if s > running {
            running = s;
        }
        match expansion.last_mut() {
            Some(last) if last.0 == r => last.1 = running.clone(),
            _ => expansion.push((r, running.clone())),
        }
    }
    MapConstants {
        semilinearity: c,
        expansion,
        dilatation: dilatation(f).ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    fn line(coords: &[i64]) -> FiniteMetricSpace {
        FiniteMetricSpace::on_line(&coords.iter().map(|&c| q(c)).collect::<Vec<_>>()).unwrap()
    }

    /// Independent max–min enumeration.
    fn hausdorff_oracle(s: &FiniteMetricSpace, x: &[usize], y: &[usize]) -> f64 {
        let mut best: f64 = 0.0;
        for &a in x {
            best = best.max(y.iter().map(|&b| s.d_f64(a, b)).fold(f64::INFINITY, f64::min));
        }
        for &b in y {
            best = best.max(x.iter().map(|&a| s.d_f64(a, b)).fold(f64::INFINITY, f64::min));
        }
        best
    }

    #[test]
    fn hausdorff_on_a_line() {
        let s = line(&[0, 1, 2, 3]);
        assert_eq!(hausdorff_distance(&s, &[0, 1], &[0, 1]).unwrap(), q(0));
        assert_eq!(hausdorff_oracle(&s, &[0], &[0, 3]), 3.0);
        assert_eq!(hausdorff_distance(&s, &[0], &[0, 3]).unwrap(), q(3));
        assert_eq!(hausdorff_oracle(&s, &[0, 3], &[1, 2]), 1.0);
        assert_eq!(hausdorff_distance(&s, &[0, 3], &[1, 2]).unwrap(), q(1));
        assert!(matches!(hausdorff_distance(&s, &[], &[1]), Err(Error::EmptySubset)));
    }

    #[test]
    fn dilatation_examples() {
        let s = line(&[0, 1, 5]);
        assert_eq!(dilatation(&MetricMap::identity(&s)).unwrap(), q(1));
        let a = line(&[0, 1]);
        let b = line(&[0, 2]);
        assert_eq!(dilatation(&MetricMap::new(&a, &b, vec![0, 1]).unwrap()).unwrap(), q(2));
        assert_eq!(dilatation(&MetricMap::new(&s, &s, vec![2, 2, 2]).unwrap()).unwrap(), q(0));
        let p = FiniteMetricSpace::single_point();
        assert!(matches!(dilatation(&MetricMap::identity(&p)), Err(Error::DilatationUndefined)));
    }

    #[test]
    fn semilinearity_constants() {
        let s = line(&[0, 1, 5]);
        assert_eq!(classify_map(&MetricMap::identity(&s)).semilinearity, q(0));
        let a = line(&[0, 1]);
        let b = line(&[0, 2]);
        assert_eq!(classify_map(&MetricMap::new(&a, &b, vec![0, 1]).unwrap()).semilinearity, q(1));
        let c = classify_map(&MetricMap::new(&s, &s, vec![1, 1, 1]).unwrap());
        assert_eq!(c.semilinearity, q(0));
        assert!(c.expansion.iter().all(|(_, s)| *s == q(0)));
        let e = classify_map(&MetricMap::identity(&s)).expansion;
        assert_eq!(e, vec![(q(1), q(1)), (q(4), q(4)), (q(5), q(5))]);
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        assert!(FiniteMetricSpace::from_i64(&[vec![0, 1, 5], vec![1, 0, 1], vec![5, 1, 0]]).is_err());
        assert!(FiniteMetricSpace::from_i64(&[vec![0, 1], vec![2, 0]]).is_err());
        assert!(FiniteMetricSpace::from_i64(&[vec![0, 0], vec![0, 0]]).is_err());
        assert!(FiniteMetricSpace::from_i64(&[vec![0]]).is_ok());
    }
}
