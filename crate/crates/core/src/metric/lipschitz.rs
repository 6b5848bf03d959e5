use itertools::Itertools;
use num_traits::Zero;
use rayon::prelude::*;

use super::{dil_or_zero, FiniteMetricSpace};
use crate::error::{Error, Result};
use crate::exact::{q_to_f64, Q};

/// Default point budget for d_L: 4-point spaces, i.e. 4^4·4^4 map pairs.
pub const DEFAULT_MAX_SIZE: usize = 4;
pub const MAX_BIJECTION_POINTS: usize = 9;

/// max(0, ln t).
pub fn log_plus(t: &Q) -> f64 {
    let v = q_to_f64(t);
    if v <= 1.0 {
        0.0
    } else {
        v.ln()
    }
}

/// All maps from an `n`-set to an `m`-set as assignment vectors.
fn all_maps(n: usize, m: usize) -> Vec<Vec<usize>> {
    (0..n).map(|_| 0..m).multi_cartesian_product().collect()
}

struct MapData {
    assignment: Vec<usize>,
    log_dil: f64,
}

fn map_data(src: &FiniteMetricSpace, dst: &FiniteMetricSpace) -> Vec<MapData> {
    all_maps(src.len(), dst.len())
        .into_iter()
        .map(|assignment| {
            let log_dil = log_plus(&dil_or_zero(src, dst, &assignment));
            MapData { assignment, log_dil }
        })
        .collect()
}

/// max over points p of d(g(f(p)), p).
fn displacement(space: &FiniteMetricSpace, f: &[usize], g: &[usize]) -> Q {
    (0..space.len()).map(|p| space.d(g[f[p]], p).clone()).max().unwrap_or_else(Q::zero)
}

/// Exact minimum over all map pairs Φ: X → Y, Ψ: Y → X of
/// log⁺ dil Φ + log⁺ dil Ψ + max d(ΨΦx, x) + max d(ΦΨy, y).
///
/// `max_size` bounds the enumeration at max_size^max_size squared pairs.
pub fn lipschitz_distance(x: &FiniteMetricSpace, y: &FiniteMetricSpace, max_size: usize) -> Result<f64> {
    let budget = (max_size as f64).powf(2.0 * max_size as f64);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let pairs = m.powf(n) * n.powf(m);
    if pairs > budget {
        return Err(Error::TooLarge {
            what: "d_L",
            detail: format!("{pairs} map pairs exceed budget {budget}"),
        });
    }
    let phis = map_data(x, y);
    let psis = map_data(y, x);
    let best = phis
        .par_iter()
        .map(|phi| {
            psis.iter()
                .map(|psi| {
                    let disp = displacement(x, &phi.assignment, &psi.assignment)
                        + displacement(y, &psi.assignment, &phi.assignment);
                    phi.log_dil + psi.log_dil + q_to_f64(&disp)
                })
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best)
}

/// Minimum over bijections Φ of log⁺ dil Φ + log⁺ dil Φ⁻¹; infinite when the
/// sizes differ.
pub fn lipschitz_top_distance(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<f64> {
    if x.len() != y.len() {
        return Ok(f64::INFINITY);
    }
    if x.len() > MAX_BIJECTION_POINTS {
        return Err(Error::TooLarge {
            what: "d_L,top",
            detail: format!("{}! bijections, limit is {MAX_BIJECTION_POINTS}!", x.len()),
        });
    }
    let n = x.len();
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let best = perms
        .par_iter()
        .map(|p| {
            let mut inv = vec![0; n];
            for (i, &j) in p.iter().enumerate() {
                inv[j] = i;
            }
            log_plus(&dil_or_zero(x, y, p)) + log_plus(&dil_or_zero(y, x, &inv))
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best)
}
