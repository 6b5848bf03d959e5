//! Vicinal, local and nearly-local operators between cell complexes.
//!
//! Neighborhoods follow the closed-star construction: N(σ) is the closure of
//! the stars of the vertices of σ, iterated n times, with N⁽⁰⁾(σ) = {σ}.
//! Two cells are compared when some isomorphism of their radius-n
//! neighborhoods carries one to the other; such isomorphisms are found by
//! backtracking against one representative per class.

use std::collections::{BTreeSet, HashMap};

use num_traits::Signed;
use serde::Serialize;

use crate::complex::AbsoluteComplex;
use crate::error::{Error, Result};
use crate::exact::{q_to_f64, Q};
use crate::operator::CellOperator;

/// Largest total cell count accepted by [`classify_locality`].
pub const LOCALITY_CELL_BUDGET: usize = 2000;
/// Backtracking steps allowed per neighborhood comparison.
const ISO_STEP_BUDGET: usize = 200_000;

/// Smallest N bounding the nonzero count of every row and column, or `None`
/// when it exceeds `cap`.
pub fn vicinality(t: &CellOperator, cap: usize) -> Option<usize> {
    let n = support_bound(t);
    (n <= cap).then_some(n)
}

fn support_bound(t: &CellOperator) -> usize {
    let (cols, rows) = t.support_counts();
    cols.into_iter().chain(rows).max().unwrap_or(0)
}

/// Schur-test bound N·M on the ℓᵖ operator norm, valid for every 1 ≤ p ≤ ∞.
pub fn norm_bound_vicinal(t: &CellOperator) -> f64 {
    support_bound(t) as f64 * q_to_f64(&t.max_abs_entry())
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalityViolation {
    pub cell: String,
    pub other: String,
    pub radius: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalityReport {
    pub vicinality: Option<usize>,
    pub cap: usize,
    pub entry_bound: Option<f64>,
    /// Smallest radius at which the operator is local, if any up to the
    /// requested radius.
    pub local_radius: Option<usize>,
    pub nearly_local_constant: Option<f64>,
    pub norm_bound: Option<f64>,
    pub radius_checked: usize,
    /// Number of neighborhood classes at the radius used for the nearly-local
    /// constant.
    pub classes: usize,
    /// First pair of cells with isomorphic neighborhoods but incompatible
    /// images, at the largest radius checked.
    pub violation: Option<LocalityViolation>,
    /// False when some isomorphism search hit its step budget; the verdict is
    /// then "checked up to budget".
    pub complete: bool,
}

impl LocalityReport {
    pub fn is_local(&self) -> bool {
        self.local_radius.is_some()
    }
    pub fn is_nearly_local(&self) -> bool {
        self.nearly_local_constant.is_some()
    }
}

/// Cached face and star structure of a complex.
struct Structure<'a> {
    k: &'a AbsoluteComplex,
    closure: Vec<BTreeSet<usize>>,
    verts: Vec<Vec<usize>>,
    star: HashMap<usize, Vec<usize>>,
}

impl<'a> Structure<'a> {
    fn new(k: &'a AbsoluteComplex) -> Self {
        let closure: Vec<BTreeSet<usize>> = (0..k.num_cells()).map(|c| k.closure(c)).collect();
        let verts: Vec<Vec<usize>> = closure
            .iter()
            .map(|cl| cl.iter().copied().filter(|&x| k.cell(x).dim == 0).collect())
            .collect();
        let mut star: HashMap<usize, Vec<usize>> = HashMap::new();
        for (c, vs) in verts.iter().enumerate() {
            for &v in vs {
                star.entry(v).or_default().push(c);
            }
        }
        Structure { k, closure, verts, star }
    }

    fn neighborhood(&self, cell: usize, n: usize) -> BTreeSet<usize> {
        let mut cur = BTreeSet::from([cell]);
        for _ in 0..n {
            let mut next = BTreeSet::new();
            for &c in &cur {
                for v in &self.verts[c] {
                    for &s in &self.star[v] {
                        next.extend(self.closure[s].iter().copied());
                    }
                }
            }
            cur = next;
        }
        cur
    }
}

/// A neighborhood with local indices, cells sorted by dimension.
struct Local {
    cells: Vec<usize>,
    dim: Vec<usize>,
    faces: Vec<Vec<(usize, i64)>>,
    cofaces: Vec<usize>,
    /// Multiplicity of 1-cells joining two 0-cells, by local indices.
    adjacency: HashMap<(usize, usize), usize>,
    color: Vec<u64>,
    center: usize,
    center_closure: BTreeSet<usize>,
}

impl Local {
    fn new(s: &Structure, set: &BTreeSet<usize>, center: usize, colors: Option<&[u64]>) -> Self {
        let mut cells: Vec<usize> = set.iter().copied().collect();
        cells.sort_by_key(|&c| (s.k.cell(c).dim, !s.closure[center].contains(&c), c));
        let pos: HashMap<usize, usize> = cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let dim: Vec<usize> = cells.iter().map(|&c| s.k.cell(c).dim).collect();
        let faces: Vec<Vec<(usize, i64)>> = cells
            .iter()
            .map(|&c| {
                let mut f: Vec<(usize, i64)> = s
                    .k
                    .boundary(c)
                    .iter()
                    .filter_map(|&(f, e)| pos.get(&f).map(|&i| (i, e.abs())))
                    .collect();
                f.sort();
                f
            })
            .collect();
        let mut cofaces = vec![0; cells.len()];
        let mut adjacency = HashMap::new();
        for (i, fs) in faces.iter().enumerate() {
            for &(f, _) in fs {
                cofaces[f] += 1;
            }
            if dim[i] == 1 {
                let ends: Vec<usize> = fs.iter().map(|p| p.0).collect();
                let key = match ends[..] {
                    [a] => (a, a),
                    [a, b] => (a.min(b), a.max(b)),
                    _ => continue,
                };
                *adjacency.entry(key).or_insert(0) += 1;
            }
        }
        let center_closure = s.closure[center].iter().filter_map(|c| pos.get(c).copied()).collect();
        let color = cells.iter().map(|&c| colors.map_or(0, |k| k[c])).collect();
        Local { center: pos[&center], cells, dim, faces, cofaces, adjacency, color, center_closure }
    }

    fn signature(&self, i: usize) -> (usize, usize, usize, u64) {
        (self.dim[i], self.faces[i].len(), self.cofaces[i], self.color[i])
    }

    fn profile(&self) -> Vec<(usize, usize, usize, u64)> {
        let mut p: Vec<_> = (0..self.cells.len()).map(|i| self.signature(i)).collect();
        p.sort();
        p
    }

    fn adj(&self, a: usize, b: usize) -> usize {
        self.adjacency.get(&(a.min(b), a.max(b))).copied().unwrap_or(0)
    }
}

enum Iso {
    Found,
    Absent,
    Budget,
}

/// Searches for a face-preserving bijection `a → b` carrying the center of
/// `a` to the center of `b`.
fn isomorphic(a: &Local, b: &Local) -> Iso {
    if a.cells.len() != b.cells.len() || a.profile() != b.profile() {
        return Iso::Absent;
    }
    struct St<'x> {
        a: &'x Local,
        b: &'x Local,
        map: Vec<usize>,
        used: Vec<bool>,
        steps: usize,
    }
    fn go(st: &mut St, i: usize) -> Option<bool> {
        if i == st.a.cells.len() {
            return Some(true);
        }
        for j in 0..st.b.cells.len() {
            st.steps += 1;
            if st.steps > ISO_STEP_BUDGET {
                return None;
            }
            if st.used[j] || st.a.signature(i) != st.b.signature(j) {
                continue;
            }
            if (i == st.a.center) != (j == st.b.center)
                || st.a.center_closure.contains(&i) != st.b.center_closure.contains(&j)
            {
                continue;
            }
            let ok = if st.a.dim[i] == 0 {
                (0..i).filter(|&u| st.a.dim[u] == 0).all(|u| st.a.adj(u, i) == st.b.adj(st.map[u], j))
                    && st.a.adj(i, i) == st.b.adj(j, j)
            } else {
                let mut img: Vec<(usize, i64)> = st.a.faces[i].iter().map(|&(f, e)| (st.map[f], e)).collect();
                img.sort();
                img == st.b.faces[j]
            };
            if !ok {
                continue;
            }
            st.map[i] = j;
            st.used[j] = true;
            match go(st, i + 1) {
                Some(true) => return Some(true),
                None => return None,
                Some(false) => {}
            }
            st.used[j] = false;
        }
        Some(false)
    }
    let mut st = St { a, b, map: vec![usize::MAX; a.cells.len()], used: vec![false; b.cells.len()], steps: 0 };
    match go(&mut st, 0) {
        Some(true) => Iso::Found,
        Some(false) => Iso::Absent,
        None => Iso::Budget,
    }
}

/// Sorted absolute coefficients of T(σ): two images are related by a support
/// bijection commuting with the coefficients (up to orientation) exactly when
/// these agree.
fn image_profile(t: &CellOperator, j: usize) -> Vec<Q> {
    let mut v: Vec<Q> = t.column(j).iter().map(|(_, x)| x.abs()).collect();
    v.sort();
    v
}

struct Classes {
    /// (representative source position, member positions)
    groups: Vec<(usize, Vec<usize>)>,
    complete: bool,
}

fn classify(s: &Structure, t: &CellOperator, radius: usize, colors: Option<&[u64]>) -> Classes {
    let cells = s.k.cells_of_dim(t.source_degree);
    let mut groups: Vec<(usize, Local, Vec<usize>)> = Vec::new();
    let mut complete = true;
    for (j, &c) in cells.iter().enumerate() {
        let local = Local::new(s, &s.neighborhood(c, radius), c, colors);
        let mut placed = false;
        for (_, rep, members) in groups.iter_mut() {
            match isomorphic(rep, &local) {
                Iso::Found => {
                    members.push(j);
                    placed = true;
                    break;
                }
                Iso::Budget => complete = false,
                Iso::Absent => {}
            }
        }
        if !placed {
            groups.push((j, local, vec![j]));
        }
    }
    Classes { groups: groups.into_iter().map(|(r, _, m)| (r, m)).collect(), complete }
}

fn same_complex(a: &AbsoluteComplex, b: &AbsoluteComplex) -> bool {
    std::ptr::eq(a, b) || (a.num_cells() == b.num_cells() && (0..a.num_cells()).all(|c| a.id(c) == b.id(c)))
}

/// Checks conditions 1)–3) of locality for radii `0..=radius` and computes a
/// nearly-local constant from ℓ² norms of images within neighborhood classes.
pub fn classify_locality(
    t: &CellOperator,
    src: &AbsoluteComplex,
    tgt: &AbsoluteComplex,
    radius: usize,
    cap: usize,
) -> Result<LocalityReport> {
    classify_locality_colored(t, src, tgt, radius, cap, None)
}

/// As [`classify_locality`], but neighborhood isomorphisms must also preserve
/// the given labels on source cells (indexed by global cell index). Labels
/// carry extra structure the operator is allowed to depend on, such as the
/// carrier data of a subdivision.
pub fn classify_locality_colored(
    t: &CellOperator,
    src: &AbsoluteComplex,
    tgt: &AbsoluteComplex,
    radius: usize,
    cap: usize,
    colors: Option<&[u64]>,
) -> Result<LocalityReport> {
    if colors.is_some_and(|c| c.len() != src.num_cells()) {
        return Err(Error::InvalidArgument("one label per source cell required".into()));
    }
    if src.num_cells() + tgt.num_cells() > LOCALITY_CELL_BUDGET {
        return Err(Error::LocalityTooLarge(format!(
            "{} cells, budget is {LOCALITY_CELL_BUDGET}",
            src.num_cells() + tgt.num_cells()
        )));
    }
    if t.ncols() != src.count(t.source_degree) || t.nrows() != tgt.count(t.target_degree) {
        return Err(Error::DegreeMismatch(format!(
            "operator is {}x{}, complexes have {} target and {} source cells",
            t.nrows(),
            t.ncols(),
            tgt.count(t.target_degree),
            src.count(t.source_degree)
        )));
    }
    let vic = vicinality(t, cap);
    let s = Structure::new(src);
    let same = same_complex(src, tgt);
    let profiles: Vec<Vec<Q>> = (0..t.ncols()).map(|j| image_profile(t, j)).collect();
    let norms: Vec<f64> = (0..t.ncols())
        .map(|j| t.column(j).iter().map(|(_, x)| q_to_f64(x).powi(2)).sum::<f64>().sqrt())
        .collect();
    let src_cells = src.cells_of_dim(t.source_degree);

    let mut local_radius = None;
    let mut violation = None;
    let mut complete = true;
    let mut last = None;
    for n in 0..=radius {
        let classes = classify(&s, t, n, colors);
        complete &= classes.complete;
        let contained = !same
            || src_cells.iter().enumerate().all(|(j, &c)| {
                let nb = s.neighborhood(c, n);
                t.column(j).iter().all(|(r, _)| nb.contains(&tgt.global(t.target_degree, *r)))
            });
        violation = classes.groups.iter().find_map(|(rep, members)| {
            members.iter().find(|&&m| profiles[m] != profiles[*rep]).map(|&m| LocalityViolation {
                cell: src.id(src_cells[*rep]).to_string(),
                other: src.id(src_cells[m]).to_string(),
                radius: n,
            })
        });
        let found = contained && violation.is_none();
        last = Some(classes);
        if found {
            local_radius = vic.map(|_| n);
            break;
        }
    }
    let classes = last.expect("radius range is nonempty");

    let nearly_local_constant = vic.and_then(|_| {
        let mut c: f64 = 1.0;
        for (_, members) in &classes.groups {
            let hi = members.iter().map(|&m| norms[m]).fold(0.0, f64::max);
            let lo = members.iter().map(|&m| norms[m]).fold(f64::INFINITY, f64::min);
            if hi > 0.0 {
                if lo == 0.0 {
                    return None;
                }
                c = c.max(hi / lo);
            }
        }
        Some(c)
    });

    Ok(LocalityReport {
        vicinality: vic,
        cap,
        entry_bound: Some(q_to_f64(&t.max_abs_entry())),
        local_radius,
        nearly_local_constant,
        norm_bound: vic.map(|_| norm_bound_vicinal(t)),
        radius_checked: radius,
        classes: classes.groups.len(),
        violation,
        complete,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;
    use crate::fixtures;
    use crate::operator::{boundary_matrix, coboundary_matrix};

    #[test]
    fn vicinality_examples() {
        assert_eq!(vicinality(&CellOperator::identity(0, 4), 5), Some(1));
        let c3 = fixtures::circle3();
        assert_eq!(vicinality(&coboundary_matrix(&c3, 0), 5), Some(2));
        let ones = CellOperator::from_triplets(0, 0, 5, 5, (0..25).map(|i| (i / 5, i % 5, q(1))));
        assert_eq!(vicinality(&ones, 3), None);
    }

    #[test]
    fn schur_bounds() {
        assert_eq!(norm_bound_vicinal(&CellOperator::zero(0, 0, 3, 3)), 0.0);
        let d0 = coboundary_matrix(&fixtures::circle3(), 0);
        assert_eq!(norm_bound_vicinal(&d0), 2.0);
        assert!((d0.norm_2() - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn boundary_and_identity_radii() {
        let k = fixtures::octahedron();
        let r = classify_locality(&boundary_matrix(&k, 1), &k, &k, 3, 10).unwrap();
        assert_eq!(r.local_radius, Some(1));
        assert_eq!(r.nearly_local_constant, Some(1.0));
        let id = CellOperator::identity(1, k.count(1));
        assert_eq!(classify_locality(&id, &k, &k, 2, 10).unwrap().local_radius, Some(0));
    }

    #[test]
    fn coboundary_on_irregular_complex_needs_radius_one() {
        let k = fixtures::cone_disc();
        let r = classify_locality(&coboundary_matrix(&k, 0), &k, &k, 2, 10).unwrap();
        assert_eq!(r.local_radius, Some(1));
    }

    #[test]
    fn perturbed_coboundary_is_only_nearly_local() {
        let k = fixtures::cycle(12);
        let d0 = coboundary_matrix(&k, 0);
        let trips: Vec<_> = d0
            .triplets()
            .map(|(r, c, v)| (r, c, if (r, c) == (0, 0) { v * q(2) } else { v.clone() }))
            .collect();
        let t = CellOperator::from_triplets(0, 1, d0.nrows(), d0.ncols(), trips);
        let r = classify_locality(&t, &k, &k, 3, 10).unwrap();
        assert!(!r.is_local());
        assert!(r.violation.is_some());
        let c = r.nearly_local_constant.unwrap();
        assert!((c - (5f64 / 2.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let k = fixtures::cylinder(20, 20);
        let b = boundary_matrix(&k, 0);
        assert!(matches!(classify_locality(&b, &k, &k, 1, 10), Err(Error::LocalityTooLarge(_))));
    }
}
