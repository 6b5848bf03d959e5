//! Exact linear algebra over the rationals.
//!
//! Two tools live here: a sparse fraction-free elimination used for ranks of
//! large boundary matrices, and a small dense rational matrix used for
//! kernels, linear solves and congruence diagonalization.

use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::cmp::Reverse;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact conversion of a finite float into a rational.
pub fn q_from_f64(x: f64) -> Option<Q> {
    Q::from_float(x)
}

/// A sparse vector with integer entries, sorted by index, no explicit zeros.
pub type IntVec = Vec<(usize, BigInt)>;

/// Clears denominators of a sparse rational vector, returning a primitive
/// integer vector spanning the same line.
pub fn integerize(v: &[(usize, Q)]) -> IntVec {
    let mut lcm = BigInt::one();
    for (_, x) in v {
        lcm = lcm.lcm(x.denom());
    }
    let mut out: IntVec = v
        .iter()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (*i, (x * Q::from_integer(lcm.clone())).to_integer()))
        .collect();
    out.sort_by_key(|(i, _)| *i);
    let g = out.iter().fold(<BigInt as Zero>::zero(), |g, (_, x)| Integer::gcd(&g, x));
    if !Zero::is_zero(&g) && !g.is_one() {
        for (_, x) in out.iter_mut() {
            *x /= &g;
        }
    }
    out
}

trait ElimScalar: Clone + std::fmt::Debug {
    fn from_big(x: &BigInt) -> Option<Self>;
    fn is_zero(&self) -> bool;
    fn abs_key(&self) -> u128;
    fn zero() -> Self;
    /// `a*x - b*y`, `None` on overflow.
    fn comb(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self>;
    fn gcd(&self, other: &Self) -> Self;
    fn div(&self, d: &Self) -> Self;
    fn is_one_abs(&self) -> bool;
}

impl ElimScalar for i128 {
    fn from_big(x: &BigInt) -> Option<Self> {
        x.to_i128().filter(|v| v.unsigned_abs() < (1u128 << 100))
    }
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn abs_key(&self) -> u128 {
        self.unsigned_abs()
    }
    fn comb(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        a.checked_mul(*x)?.checked_sub(b.checked_mul(*y)?)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div(&self, d: &Self) -> Self {
        self / d
    }
    fn is_one_abs(&self) -> bool {
        self.unsigned_abs() == 1
    }
}

impl ElimScalar for BigInt {
    fn from_big(x: &BigInt) -> Option<Self> {
        Some(x.clone())
    }
    fn zero() -> Self {
        <BigInt as Zero>::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs_key(&self) -> u128 {
        self.abs().to_u128().unwrap_or(u128::MAX)
    }
    fn comb(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        Some(a * x - b * y)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div(&self, d: &Self) -> Self {
        self / d
    }
    fn is_one_abs(&self) -> bool {
        self.abs().is_one()
    }
}

struct Overflow;

fn rank_impl<T: ElimScalar>(vectors: &[IntVec]) -> Result<usize, Overflow> {
    let mut rows: Vec<Option<Vec<(usize, T)>>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut r = Vec::with_capacity(v.len());
        for (i, x) in v {
            r.push((*i, T::from_big(x).ok_or(Overflow)?));
        }
        rows.push(if r.is_empty() { None } else { Some(r) });
    }
    let mut col_rows: HashMap<usize, BTreeSet<usize>> = HashMap::new();
    let mut heap = BinaryHeap::new();
    for (ri, r) in rows.iter().enumerate() {
        if let Some(r) = r {
            for (c, _) in r {
                col_rows.entry(*c).or_default().insert(ri);
            }
            heap.push(Reverse((r.len(), ri)));
        }
    }
    let mut rank = 0;
    while let Some(Reverse((len, ri))) = heap.pop() {
        let Some(row) = rows[ri].as_ref() else { continue };
        if row.len() != len {
            continue;
        }
        let row = rows[ri].take().unwrap();
        for (c, _) in &row {
            if let Some(s) = col_rows.get_mut(c) {
                s.remove(&ri);
            }
        }
        // pivot column: fewest other rows, unit entries preferred
        let (pc, pv) = row
            .iter()
            .min_by_key(|(c, v)| {
                let n = col_rows.get(c).map_or(0, |s| s.len());
                (n, !v.is_one_abs(), v.abs_key())
            })
            .cloned()
            .unwrap();
        rank += 1;
        let targets: Vec<usize> = col_rows
            .get(&pc)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default();
        for ti in targets {
            let target = rows[ti].take().unwrap();
            let tv = target.iter().find(|(c, _)| *c == pc).unwrap().1.clone();
            let g = pv.gcd(&tv);
            let a = pv.div(&g);
            let b = tv.div(&g);
            let zero_like = T::zero();
            // merge: a*target - b*row
            let mut merged: Vec<(usize, T)> = Vec::with_capacity(target.len() + row.len());
            let (mut i, mut j) = (0, 0);
            while i < target.len() || j < row.len() {
                let ci = target.get(i).map(|e| e.0);
                let cj = row.get(j).map(|e| e.0);
                let (c, val) = match (ci, cj) {
                    (Some(x), Some(y)) if x == y => {
                        let v = T::comb(&a, &target[i].1, &b, &row[j].1).ok_or(Overflow)?;
                        i += 1;
                        j += 1;
                        (x, v)
                    }
                    (Some(x), Some(y)) if x < y => {
                        let v = T::comb(&a, &target[i].1, &b, &zero_like).ok_or(Overflow)?;
                        i += 1;
                        (x, v)
                    }
                    (Some(x), None) => {
                        let v = T::comb(&a, &target[i].1, &b, &zero_like).ok_or(Overflow)?;
                        i += 1;
                        (x, v)
                    }
                    (_, Some(y)) => {
                        let v = T::comb(&b, &zero_like, &b, &row[j].1).ok_or(Overflow)?;
                        j += 1;
                        (y, v)
                    }
                    (None, None) => unreachable!(),
                };
                if !val.is_zero() {
                    merged.push((c, val));
                } else {
                    if let Some(s) = col_rows.get_mut(&c) {
                        s.remove(&ti);
                    }
                }
            }
            // content reduction keeps entries small
            let mut g = merged.first().map(|e| e.1.clone());
            if let Some(g0) = g.as_mut() {
                for (_, v) in &merged[1..] {
                    *g0 = g0.gcd(v);
                }
                if !g0.is_one_abs() && !g0.is_zero() {
                    for (_, v) in merged.iter_mut() {
                        *v = v.div(g0);
                    }
                }
            }
            for (c, _) in &merged {
                col_rows.entry(*c).or_default().insert(ti);
            }
            if !merged.is_empty() {
                heap.push(Reverse((merged.len(), ti)));
                rows[ti] = Some(merged);
            }
        }
    }
    Ok(rank)
}

/// Exact rank over the rationals of the span of integer sparse vectors.
///
/// Fraction-free elimination with shortest-row pivoting; runs in `i128`
/// and restarts with arbitrary precision if an intermediate overflows.
pub fn sparse_rank(vectors: &[IntVec]) -> usize {
    match rank_impl::<i128>(vectors) {
        Ok(r) => r,
        Err(Overflow) => match rank_impl::<BigInt>(vectors) {
            Ok(r) => r,
            Err(Overflow) => unreachable!("bigint elimination cannot overflow"),
        },
    }
}

/// Dense rational matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Q>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_columns(rows: usize, columns: &[Vec<Q>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn column(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut s = Q::zero();
                for j in 0..self.cols {
                    let a = &self[(i, j)];
                    if !a.is_zero() && !v[j].is_zero() {
                        s += a * &v[j];
                    }
                }
                s
            })
            .collect()
    }

    /// Reduced row echelon form in place; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else { continue };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = self[(r, c)].recip();
            for j in c..self.cols {
                let v = &self[(r, j)] * &inv;
                self[(r, j)] = v;
            }
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone();
                for j in c..self.cols {
                    if self[(r, j)].is_zero() {
                        continue;
                    }
                    let v = &self[(i, j)] - &f * &self[(r, j)];
                    self[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the null space `{x : A x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![Q::zero(); self.cols];
                x[f] = Q::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    x[pc] = -m[(r, f)].clone();
                }
                x
            })
            .collect()
    }

    /// One solution of `A x = b`, or `None` if inconsistent.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Q::zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = aug[(r, self.cols)].clone();
        }
        Some(x)
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

/// Inertia `(positive, negative, zero)` of a symmetric rational matrix by
/// congruence diagonalization.
pub fn inertia(m: &QMatrix) -> (usize, usize, usize) {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    let mut a = m.clone();
    let (mut pos, mut neg) = (0, 0);
    let mut k = 0;
    while k < n {
        if a[(k, k)].is_zero() {
            if let Some(p) = (k + 1..n).find(|&i| !a[(i, i)].is_zero()) {
                swap_sym(&mut a, k, p);
            } else if let Some((i, j)) = (k..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !a[(i, j)].is_zero())
            {
                // row/col i += row/col j makes the diagonal 2 a_ij
                add_sym(&mut a, i, j);
                swap_sym(&mut a, k, i);
            } else {
                break;
            }
        }
        let d = a[(k, k)].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            if a[(i, k)].is_zero() {
                continue;
            }
            let f = &a[(i, k)] / &d;
            for j in k..n {
                let v = &a[(i, j)] - &f * &a[(k, j)];
                a[(i, j)] = v;
            }
            for j in k..n {
                let v = &a[(j, i)] - &f * &a[(j, k)];
                a[(j, i)] = v;
            }
        }
        k += 1;
    }
    (pos, neg, n - pos - neg)
}

fn swap_sym(a: &mut QMatrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    let n = a.rows;
    for c in 0..n {
        a.data.swap(i * n + c, j * n + c);
    }
    for r in 0..n {
        a.data.swap(r * n + i, r * n + j);
    }
}

fn add_sym(a: &mut QMatrix, i: usize, j: usize) {
    let n = a.rows;
    for c in 0..n {
        let v = &a[(i, c)] + &a[(j, c)];
        a[(i, c)] = v;
    }
    for r in 0..n {
        let v = &a[(r, i)] + &a[(r, j)];
        a[(r, i)] = v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qm(rows: usize, cols: usize, v: &[i64]) -> QMatrix {
        QMatrix { rows, cols, data: v.iter().map(|&x| q(x)).collect() }
    }

    fn to_vecs(m: &QMatrix) -> Vec<IntVec> {
        (0..m.rows)
            .map(|i| {
                let row: Vec<(usize, Q)> = (0..m.cols).map(|j| (j, m[(i, j)].clone())).collect();
                integerize(&row)
            })
            .collect()
    }

    #[test]
    fn sparse_and_dense_rank_agree() {
        let m = qm(3, 3, &[1, 2, 3, 4, 5, 6, 7, 8, 9]);
        assert_eq!(m.rank(), 2);
        assert_eq!(sparse_rank(&to_vecs(&m)), 2);
        let id = QMatrix::identity(4);
        assert_eq!(sparse_rank(&to_vecs(&id)), 4);
        assert_eq!(sparse_rank(&[]), 0);
    }

    #[test]
    fn kernel_and_solve() {
        let m = qm(2, 3, &[1, 1, 0, 0, 1, 1]);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).iter().all(|x| x.is_zero()));
        let x = m.solve(&[q(2), q(3)]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![q(2), q(3)]);
        let bad = qm(2, 1, &[1, 1]);
        assert!(bad.solve(&[q(1), q(2)]).is_none());
    }

    #[test]
    fn inertia_of_hyperbolic_plane() {
        assert_eq!(inertia(&qm(2, 2, &[0, 1, 1, 0])), (1, 1, 0));
        assert_eq!(inertia(&qm(2, 2, &[1, 0, 0, 1])), (2, 0, 0));
        assert_eq!(inertia(&qm(3, 3, &[0, 0, 0, 0, -2, 0, 0, 0, 0])), (0, 1, 2));
    }

    #[test]
    fn big_entries_fall_back_to_bigint() {
        let big = BigInt::from(1u64 << 62) * BigInt::from(1u64 << 62);
        let v = vec![vec![(0, big.clone()), (1, BigInt::from(1))], vec![(0, BigInt::from(3)), (1, big)]];
        assert_eq!(sparse_rank(&v), 2);
    }
}
