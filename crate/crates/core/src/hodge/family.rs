use serde::Serialize;

use super::{spectral_gap, DEFAULT_TOL};
use crate::complex::AbsoluteComplex;
use crate::error::{Error, Result};
use crate::fixtures;

/// Nested finite truncations standing in for an infinite complex.
pub trait ExhaustionFamily {
    fn label(&self) -> String;
    fn complex(&self, size: usize) -> Result<AbsoluteComplex>;
}

/// S¹_m × [0, N], triangulated strip of squares.
pub struct CylinderFamily {
    pub circumference: u32,
}

impl ExhaustionFamily for CylinderFamily {
    fn label(&self) -> String {
        format!("cylinder S1_{} x [0,N]", self.circumference)
    }
    fn complex(&self, size: usize) -> Result<AbsoluteComplex> {
        Ok(fixtures::cylinder(self.circumference, size as u32))
    }
}

/// N disjoint copies of a filled triangle.
pub struct DisjointTrianglesFamily;

impl ExhaustionFamily for DisjointTrianglesFamily {
    fn label(&self) -> String {
        "N disjoint triangles".into()
    }
    fn complex(&self, size: usize) -> Result<AbsoluteComplex> {
        Ok(fixtures::disjoint_triangles(size as u32))
    }
}

/// A family given by a closure.
pub struct FnFamily<F> {
    pub label: String,
    pub generator: F,
}

impl<F: Fn(usize) -> Result<AbsoluteComplex>> ExhaustionFamily for FnFamily<F> {
    fn label(&self) -> String {
        self.label.clone()
    }
    fn complex(&self, size: usize) -> Result<AbsoluteComplex> {
        (self.generator)(size)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "vanishing-gap evidence")]
    VanishingGap,
    #[serde(rename = "gap-persists evidence")]
    GapPersists,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::VanishingGap => "vanishing-gap evidence",
            Verdict::GapPersists => "gap-persists evidence",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GapTrend {
    pub family: String,
    pub q: usize,
    pub sizes: Vec<usize>,
    pub gaps: Vec<f64>,
    pub strictly_decreasing: bool,
    pub verdict: Verdict,
    /// Always true: finite truncations cannot decide the essential spectrum.
    pub heuristic: bool,
    pub notes: Vec<String>,
}

/// Checks that every cell of `small` appears in `big` with the same
/// dimension and the same incidences.
fn check_nested(small: &AbsoluteComplex, big: &AbsoluteComplex) -> Result<()> {
    for c in 0..small.num_cells() {
        let id = small.id(c);
        let Some(bc) = big.index_of(id) else {
            return Err(Error::NonNested(format!("cell {id} missing from larger complex")));
        };
        if big.cell(bc).dim != small.cell(c).dim {
            return Err(Error::NonNested(format!("cell {id} changes dimension")));
        }
        for &(f, e) in small.boundary(c) {
            let bf = big.index_of(small.id(f)).unwrap_or(usize::MAX);
            if bf == usize::MAX || big.incidence(bf, bc) != e {
                return Err(Error::NonNested(format!("incidence of {} in {id} changes", small.id(f))));
            }
        }
    }
    Ok(())
}

/// Spectral gaps of Δ_q along an exhaustion, with a heuristic verdict.
pub fn gap_trend(family: &dyn ExhaustionFamily, q: usize, sizes: &[usize]) -> Result<GapTrend> {
    if sizes.len() < 2 {
        return Err(Error::InvalidArgument("gap trend needs at least two sizes".into()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("sizes must be strictly increasing".into()));
    }
    let complexes: Vec<AbsoluteComplex> = sizes.iter().map(|&s| family.complex(s)).collect::<Result<_>>()?;
    for w in complexes.windows(2) {
        check_nested(&w[0], &w[1])?;
    }
    let gaps: Vec<f64> = complexes.iter().map(|k| spectral_gap(k, q, DEFAULT_TOL).gap).collect();
    let first = gaps[0];
    let last = *gaps.last().unwrap();
    let verdict = if last * 2.0 <= first {
        Verdict::VanishingGap
    } else if last >= 0.9 * first {
        Verdict::GapPersists
    } else {
        Verdict::Inconclusive
    };
    Ok(GapTrend {
        family: family.label(),
        q,
        sizes: sizes.to_vec(),
        strictly_decreasing: gaps.windows(2).all(|w| w[1] < w[0]),
        gaps,
        verdict,
        heuristic: true,
        notes: vec![
            "heuristic: finite truncations do not determine the essential spectrum".into(),
            "truncations are full subcomplexes with no boundary conditions; this may bias the trend".into(),
            "on finite complexes reduced and unreduced cohomology coincide".into(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_size_is_rejected() {
        assert!(gap_trend(&DisjointTrianglesFamily, 0, &[4]).is_err());
    }

    #[test]
    fn relabeling_family_is_not_nested() {
        let fam = FnFamily {
            label: "shifting".into(),
            generator: |n: usize| crate::complex::build_simplicial(&[vec![n as u32, n as u32 + 1]]),
        };
        assert!(matches!(gap_trend(&fam, 0, &[1, 2]), Err(Error::NonNested(_))));
    }

    #[test]
    fn triangles_keep_their_gap() {
        let t = gap_trend(&DisjointTrianglesFamily, 0, &[1, 2, 5]).unwrap();
        assert!(t.gaps.iter().all(|g| (g - 3.0).abs() < 1e-9));
        assert_eq!(t.verdict, Verdict::GapPersists);
    }
}
