use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::Serialize;

use super::AbsoluteComplex;
use crate::error::{Error, Result};

/// A simplicial complex with vertex coordinates in some ℝ^d.
#[derive(Clone, Debug)]
pub struct GeometricComplex {
    pub complex: AbsoluteComplex,
    pub coords: HashMap<u32, Vec<f64>>,
}

impl GeometricComplex {
    pub fn new(complex: AbsoluteComplex, coords: HashMap<u32, Vec<f64>>) -> Result<Self> {
        if !complex.is_simplicial() {
            return Err(Error::InvalidComplex("geometric complex must be simplicial".into()));
        }
        let mut dim = None;
        for c in complex.cells_of_dim(0) {
            let v = complex.vertices(*c).unwrap()[0];
            let p = coords
                .get(&v)
                .ok_or_else(|| Error::InvalidComplex(format!("vertex {v} has no coordinates")))?;
            match dim {
                None => dim = Some(p.len()),
                Some(d) if d != p.len() => {
                    return Err(Error::InvalidComplex(format!("vertex {v} has {} coordinates, expected {d}", p.len())))
                }
                _ => {}
            }
        }
        Ok(GeometricComplex { complex, coords })
    }

    pub fn points(&self, cell: usize) -> Vec<Vec<f64>> {
        self.complex
            .vertices(cell)
            .unwrap()
            .iter()
            .map(|v| self.coords[v].clone())
            .collect()
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn diameter(points: &[Vec<f64>]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            d = d.max(dist(&points[i], &points[j]));
        }
    }
    d
}

fn edge_matrix(points: &[Vec<f64>]) -> DMatrix<f64> {
    let k = points.len() - 1;
    let d = points[0].len();
    DMatrix::from_fn(d, k, |r, c| points[c + 1][r] - points[0][r])
}

/// k-dimensional Euclidean volume of the simplex spanned by `points`, from
/// the Gram determinant of its edge vectors.
pub fn simplex_volume(points: &[Vec<f64>]) -> f64 {
    let k = points.len().saturating_sub(1);
    if k == 0 {
        return 1.0;
    }
    let e = edge_matrix(points);
    let gram = e.transpose() * &e;
    let det = gram.determinant().max(0.0);
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    det.sqrt() / fact
}

/// Fullness vol(σ)/diam(σ)^n. Degenerate simplices give 0.
pub fn fullness(points: &[Vec<f64>], n: usize) -> f64 {
    if points.len() <= 1 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let diam = diameter(points);
    if diam == 0.0 {
        return 0.0;
    }
    let k = points.len() - 1;
    let vol = simplex_volume(points);
    if vol / diam.powi(k as i32) < 1e-12 {
        return 0.0;
    }
    vol / diam.powi(n as i32)
}

/// Norms of the gradients of the barycentric coordinate functions of a
/// simplex, within its affine hull. `None` for degenerate simplices.
pub fn barycentric_gradient_norms(points: &[Vec<f64>]) -> Option<Vec<f64>> {
    let k = points.len() - 1;
    if k == 0 {
        return Some(vec![0.0]);
    }
    let e = edge_matrix(points);
    let gram = e.transpose() * &e;
    let inv = gram.try_inverse()?;
    // columns of e * inv are the gradients of φ_1..φ_k
    let grads = &e * inv;
    let mut norms = Vec::with_capacity(k + 1);
    let sum: nalgebra::DVector<f64> = grads.column_sum();
    norms.push(sum.norm());
    for c in 0..k {
        norms.push(grads.column(c).norm());
    }
    if norms.iter().any(|x| !x.is_finite()) {
        return None;
    }
    Some(norms)
}

/// Where a uniformity condition is worst.
#[derive(Clone, Debug, Serialize)]
pub struct UniformityWitness {
    pub cell: String,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct UniformityReport {
    /// a) fullness > Θ₀ for every top simplex.
    pub fullness_ok: bool,
    /// b) c₂ ≤ vol ≤ c₁ for every top simplex.
    pub volume_ok: bool,
    /// c) |∇φ_v| ≤ c for every vertex.
    pub gradient_ok: bool,
    pub min_fullness: Option<UniformityWitness>,
    pub min_volume: Option<UniformityWitness>,
    pub max_volume: Option<UniformityWitness>,
    pub max_gradient: Option<UniformityWitness>,
}

impl UniformityReport {
    pub fn passed(&self) -> bool {
        self.fullness_ok && self.volume_ok && self.gradient_ok
    }
}

/// Checks the three uniform-triangulation conditions literally on every top
/// simplex and vertex.
pub fn uniformity_check(g: &GeometricComplex, theta0: f64, c1: f64, c2: f64, c: f64) -> Result<UniformityReport> {
    let k = &g.complex;
    let mut report = UniformityReport {
        fullness_ok: true,
        volume_ok: true,
        gradient_ok: true,
        min_fullness: None,
        min_volume: None,
        max_volume: None,
        max_gradient: None,
    };
    let Some(n) = k.dim() else { return Ok(report) };
    // pure: every maximal cell has dimension n
    for cell in 0..k.num_cells() {
        if k.cell(cell).dim < n && k.coboundary(cell).is_empty() {
            return Err(Error::InvalidComplex(format!("not pure: {} is maximal of dimension {}", k.id(cell), k.cell(cell).dim)));
        }
    }
    let mut vertex_grad: HashMap<u32, f64> = HashMap::new();
    for &top in k.cells_of_dim(n) {
        let pts = g.points(top);
        let id = k.id(top).to_string();
        let f = fullness(&pts, n);
        if report.min_fullness.as_ref().is_none_or(|w| f < w.value) {
            report.min_fullness = Some(UniformityWitness { cell: id.clone(), value: f });
        }
        let vol = simplex_volume(&pts);
        if report.min_volume.as_ref().is_none_or(|w| vol < w.value) {
            report.min_volume = Some(UniformityWitness { cell: id.clone(), value: vol });
        }
        if report.max_volume.as_ref().is_none_or(|w| vol > w.value) {
            report.max_volume = Some(UniformityWitness { cell: id.clone(), value: vol });
        }
        let grads = barycentric_gradient_norms(&pts).unwrap_or_else(|| vec![f64::INFINITY; pts.len()]);
        for (v, gn) in k.vertices(top).unwrap().iter().zip(grads) {
            let e = vertex_grad.entry(*v).or_insert(0.0);
            *e = e.max(gn);
        }
    }
    let mut verts: Vec<_> = vertex_grad.into_iter().collect();
    verts.sort_by_key(|(v, _)| *v);
    for (v, gn) in verts {
        if report.max_gradient.as_ref().is_none_or(|w| gn > w.value) {
            report.max_gradient = Some(UniformityWitness { cell: v.to_string(), value: gn });
        }
    }
    report.fullness_ok = report.min_fullness.as_ref().is_none_or(|w| w.value > theta0);
    report.volume_ok = report.min_volume.as_ref().is_none_or(|w| w.value >= c2)
        && report.max_volume.as_ref().is_none_or(|w| w.value <= c1);
    report.gradient_ok = report.max_gradient.as_ref().is_none_or(|w| w.value <= c);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fullness_of_reference_triangles() {
        let eq = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]];
        assert!((fullness(&eq, 2) - 3f64.sqrt() / 4.0).abs() < 1e-12);
        let right = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!((fullness(&right, 2) - 0.25).abs() < 1e-12);
        let flat = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]];
        assert_eq!(fullness(&flat, 2), 0.0);
    }

    #[test]
    fn gradients_of_unit_right_triangle() {
        let right = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let g = barycentric_gradient_norms(&right).unwrap();
        assert!((g[0] - 2f64.sqrt()).abs() < 1e-12);
        assert!((g[1] - 1.0).abs() < 1e-12);
        assert!((g[2] - 1.0).abs() < 1e-12);
    }
}
