//! Subdivisions of bounded degree, the block complex, the chain map Θ onto
//! the subdivision, vertex translations η back to the original complex, and
//! chain homotopy checks.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_traits::Zero;
use serde::Serialize;

use crate::complex::{simplex_id, sort_with_sign, validate_incidence, AbsoluteComplex};
use crate::error::{Error, Result};
use crate::exact::{integerize, q, sparse_rank, QMatrix, Q};
use crate::hodge::betti_numbers;
use crate::locality::classify_locality_colored;
use crate::operator::{boundary_matrix, CellOperator};

/// A complex K, a subdivision K′ and the carrier of every K′-cell.
#[derive(Clone, Debug)]
pub struct SubdivisionPair {
    pub k: AbsoluteComplex,
    pub kp: AbsoluteComplex,
    /// K-cell whose realization contains each K′-cell.
    pub carrier: Vec<usize>,
    /// Maximal number of q-cells of K′ inside one q-cell of K.
    pub degree_bounds: Vec<usize>,
}

impl SubdivisionPair {
    pub fn new(k: AbsoluteComplex, kp: AbsoluteComplex, carrier: Vec<usize>) -> Result<Self> {
        if !k.is_simplicial() || !kp.is_simplicial() {
            return Err(Error::InvalidSubdivision("both complexes must be simplicial".into()));
        }
        if carrier.len() != kp.num_cells() {
            return Err(Error::InvalidSubdivision("one carrier per subdivided cell required".into()));
        }
        for (c, &car) in carrier.iter().enumerate() {
            if car >= k.num_cells() || k.cell(car).dim < kp.cell(c).dim {
                return Err(Error::InvalidSubdivision(format!("bad carrier for {}", kp.id(c))));
            }
            for &(f, _) in kp.boundary(c) {
                if carrier[f] != car && !k.is_face(carrier[f], car) {
                    return Err(Error::InvalidSubdivision(format!(
                        "carrier of face {} is not a face of the carrier of {}",
                        kp.id(f),
                        kp.id(c)
                    )));
                }
            }
        }
        let top = k.dim().unwrap_or(0);
        let mut degree_bounds = vec![0; top + 1];
        let mut per_cell: HashMap<usize, usize> = HashMap::new();
        for (c, &car) in carrier.iter().enumerate() {
            if kp.cell(c).dim == k.cell(car).dim {
                *per_cell.entry(car).or_insert(0) += 1;
            }
        }
        for (car, n) in per_cell {
            let d = k.cell(car).dim;
            degree_bounds[d] = degree_bounds[d].max(n);
        }
        Ok(SubdivisionPair { k, kp, carrier, degree_bounds })
    }

    /// K′ = K with every cell carried by itself.
    pub fn identity(k: &AbsoluteComplex) -> Result<Self> {
        Self::new(k.clone(), k.clone(), (0..k.num_cells()).collect())
    }

    /// K′-cells of dimension `q` carried by the `q`-cell `cell`.
    pub fn fiber(&self, cell: usize) -> Vec<usize> {
        let q = self.k.cell(cell).dim;
        self.kp
            .cells_of_dim(q)
            .iter()
            .copied()
            .filter(|&c| self.carrier[c] == cell)
            .collect()
    }
}

/// Barycentric subdivision. A vertex of K′ is labeled by the global index of
/// the K-cell it is the barycenter of; simplices of K′ are strict flags.
pub fn barycentric_subdivide(k: &AbsoluteComplex) -> Result<SubdivisionPair> {
    if !k.is_simplicial() {
        return Err(Error::InvalidComplex("barycentric subdivision needs a simplicial complex".into()));
    }
    let mut flags: Vec<Vec<Vec<u32>>> = vec![Vec::new(); k.num_cells()];
    let mut order: Vec<usize> = (0..k.num_cells()).collect();
    order.sort_by_key(|&c| k.cell(c).dim);
    for &c in &order {
        let mut mine = vec![vec![c as u32]];
        for f in k.closure(c) {
            if f != c {
                mine.extend(flags[f].iter().map(|fl| {
                    let mut v = fl.clone();
                    v.push(c as u32);
                    v
                }));
            }
        }
        flags[c] = mine;
    }
    let all: Vec<Vec<u32>> = flags.into_iter().flatten().collect();
    let kp = crate::complex::build_simplicial(&all)?;
    let carrier = (0..kp.num_cells())
        .map(|c| {
            let vs = kp.vertices(c).unwrap();
            *vs.iter().max_by_key(|&&v| k.cell(v as usize).dim).unwrap() as usize
        })
        .collect();
    SubdivisionPair::new(k.clone(), kp, carrier)
}

/// The blocks B(σ) of a subdivision as a cell complex isomorphic to K.
#[derive(Clone, Debug)]
pub struct BlockComplex {
    pub complex: AbsoluteComplex,
    /// Block index of each K-cell.
    pub zeta: Vec<usize>,
    /// Orientation chain b of each block, indexed by K-cell: K′-cells of the
    /// block's top dimension with coefficients ±1.
    pub orientation: Vec<Vec<(usize, i64)>>,
}

/// Rank of H_q(B(σ), ∂B(σ)) for a `q`-cell σ: top-dimensional relative cycles
/// of the block.
pub fn block_relative_rank(s: &SubdivisionPair, cell: usize) -> usize {
    let fiber = s.fiber(cell);
    let cols: Vec<_> = fiber
        .iter()
        .map(|&c| {
            let v: Vec<(usize, Q)> = s
                .kp
                .boundary(c)
                .iter()
                .filter(|(f, _)| s.carrier[*f] == cell)
                .map(|&(f, e)| (f, q(e)))
                .collect();
            integerize(&v)
        })
        .collect();
    fiber.len() - sparse_rank(&cols)
}

fn chain_boundary(kp: &AbsoluteComplex, chain: &[(usize, i64)]) -> BTreeMap<usize, i64> {
    let mut out = BTreeMap::new();
    for &(c, g) in chain {
        for &(f, e) in kp.boundary(c) {
            *out.entry(f).or_insert(0) += g * e;
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

/// Orients every block so that ∂′b = Σ [σ_ν : σ] b_ν, working up from the
/// vertex blocks, and reads the block incidences back off ∂′b.
pub fn block_complex(s: &SubdivisionPair) -> Result<BlockComplex> {
    let k = &s.k;
    let mut orientation: Vec<Vec<(usize, i64)>> = vec![Vec::new(); k.num_cells()];
    let mut order: Vec<usize> = (0..k.num_cells()).collect();
    order.sort_by_key(|&c| (k.cell(c).dim, c));
    for &cell in &order {
        let fiber = s.fiber(cell);
        if fiber.is_empty() {
            return Err(Error::InvalidSubdivision(format!("cell {} carries no top cells", k.id(cell))));
        }
        if block_relative_rank(s, cell) != 1 {
            return Err(Error::InvalidSubdivision(format!(
                "block of {} does not have relative top homology of rank 1",
                k.id(cell)
            )));
        }
        // propagate signs across interior faces so they cancel
        let member: HashMap<usize, usize> = fiber.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut gamma = vec![0i64; fiber.len()];
        gamma[0] = 1;
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for &(f, e) in s.kp.boundary(fiber[i]) {
                if s.carrier[f] != cell {
                    continue;
                }
                for &(other, e2) in s.kp.coboundary(f) {
                    if let Some(&j) = member.get(&other) {
                        if gamma[j] == 0 {
                            gamma[j] = -gamma[i] * e * e2;
                            queue.push_back(j);
                        }
                    }
                }
            }
        }
        if gamma.contains(&0) {
            return Err(Error::InvalidSubdivision(format!("block of {} is disconnected", k.id(cell))));
        }
        let mut b: Vec<(usize, i64)> = fiber.iter().copied().zip(gamma).collect();
        if k.cell(cell).dim > 0 {
            let mut target: BTreeMap<usize, i64> = BTreeMap::new();
            for &(face, e) in k.boundary(cell) {
                for &(c, g) in &orientation[face] {
                    *target.entry(c).or_insert(0) += e * g;
                }
            }
            target.retain(|_, v| *v != 0);
            let got = chain_boundary(&s.kp, &b);
            if got != target {
                let neg: BTreeMap<usize, i64> = target.iter().map(|(&c, &v)| (c, -v)).collect();
                if got != neg {
                    return Err(Error::InvalidSubdivision(format!(
                        "boundary of block {} is not a combination of its face blocks",
                        k.id(cell)
                    )));
                }
                b.iter_mut().for_each(|x| x.1 = -x.1);
            }
        }
        orientation[cell] = b;
    }
    // incidences [B_ν : B]′ read off from ∂′b
    let mut incidences = Vec::new();
    for cell in 0..k.num_cells() {
        let d = chain_boundary(&s.kp, &orientation[cell]);
        for (&c, &v) in &d {
            let face = s.carrier[c];
            let g = orientation[face]
                .iter()
                .find(|(x, _)| *x == c)
                .map(|x| x.1)
                .ok_or_else(|| Error::InvalidSubdivision(format!("stray boundary cell {}", s.kp.id(c))))?;
            let coeff = v * g;
            if !incidences.contains(&(face, cell, coeff)) {
                incidences.push((face, cell, coeff));
            }
        }
    }
    let cells: Vec<(String, usize)> = (0..k.num_cells()).map(|c| (k.id(c).to_string(), k.cell(c).dim)).collect();
    let inc: Vec<(String, String, i64)> = incidences
        .into_iter()
        .map(|(f, c, v)| (k.id(f).to_string(), k.id(c).to_string(), v))
        .collect();
    let complex = AbsoluteComplex::from_cells(cells, inc)?;
    let zeta = (0..k.num_cells()).map(|c| complex.index_of(k.id(c)).unwrap()).collect();
    Ok(BlockComplex { complex, zeta, orientation })
}

/// True when ζ is a dimension-preserving bijection carrying every incidence
/// of K to the block incidence, and the block incidences are valid.
pub fn zeta_is_isomorphism(s: &SubdivisionPair, b: &BlockComplex) -> bool {
    let k = &s.k;
    let mut seen = BTreeSet::new();
    for c in 0..k.num_cells() {
        let z = b.zeta[c];
        if !seen.insert(z) || b.complex.cell(z).dim != k.cell(c).dim {
            return false;
        }
        for &(f, e) in k.boundary(c) {
            if b.complex.incidence(b.zeta[f], z) != e {
                return false;
            }
        }
        if b.complex.boundary(z).len() != k.boundary(c).iter().filter(|(_, e)| *e != 0).count() {
            return false;
        }
    }
    seen.len() == b.complex.num_cells() && validate_incidence(&b.complex).passed()
}

/// Θ_q: C_q(K) → C_q(K′), sending each cell to its block orientation chain.
pub fn theta_chain_map(s: &SubdivisionPair, b: &BlockComplex) -> Vec<CellOperator> {
    let top = s.k.dim().unwrap_or(0);
    (0..=top)
        .map(|q_deg| {
            let cells = s.k.cells_of_dim(q_deg);
            CellOperator::from_triplets(
                q_deg,
                q_deg,
                s.kp.count(q_deg),
                cells.len(),
                cells.iter().enumerate().flat_map(|(j, &c)| {
                    b.orientation[c].iter().map(move |&(x, g)| (s.kp.position(x), j, q(g)))
                }),
            )
        })
        .collect()
}

/// Vertex map of the vertex translation: each K′-vertex goes to the
/// lowest-labeled vertex of its carrier. Returned as K′ label → K label.
pub fn vertex_translation_map(s: &SubdivisionPair) -> HashMap<u32, u32> {
    s.kp
        .cells_of_dim(0)
        .iter()
        .map(|&v| {
            let label = s.kp.vertices(v).unwrap()[0];
            let target = *s.k.vertices(s.carrier[v]).unwrap().iter().min().unwrap();
            (label, target)
        })
        .collect()
}

/// Chain maps η_#: C_q(K′) → C_q(K) of the vertex translation; degenerate
/// images are dropped.
pub fn vertex_translation(s: &SubdivisionPair) -> Result<Vec<CellOperator>> {
    let eta = vertex_translation_map(s);
    let top = s.k.dim().unwrap_or(0);
    (0..=top)
        .map(|q_deg| {
            let mut trips = Vec::new();
            for (j, &c) in s.kp.cells_of_dim(q_deg).iter().enumerate() {
                let img: Vec<u32> = s.kp.vertices(c).unwrap().iter().map(|v| eta[v]).collect();
                let (sorted, sign) = sort_with_sign(&img);
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    continue;
                }
                let target = s.k.index_of(&simplex_id(&sorted)).ok_or_else(|| {
                    Error::InvalidSubdivision(format!("image of {} is not a simplex of K", s.kp.id(c)))
                })?;
                trips.push((s.k.position(target), j, q(sign)));
            }
            Ok(CellOperator::from_triplets(q_deg, q_deg, s.k.count(q_deg), s.kp.count(q_deg), trips))
        })
        .collect()
}

/// Labels of K′-cells recording which vertices the vertex translation
/// identifies; used as extra structure when checking locality of η_#.
pub fn translation_labels(s: &SubdivisionPair) -> Vec<u64> {
    let eta = vertex_translation_map(s);
    (0..s.kp.num_cells())
        .map(|c| {
            let img: Vec<u32> = s.kp.vertices(c).unwrap().iter().map(|v| eta[v]).collect();
            let mut code = 0u64;
            for i in 0..img.len() {
                for j in i + 1..img.len() {
                    code = code * 2 + u64::from(img[i] == img[j]);
                }
            }
            code
        })
        .collect()
}

/// Builds D with Θη_# − id = ∂′D + D∂′ on C(K′) by the acyclic carrier
/// construction: each D(σ′) is solved exactly inside the closed block of the
/// carrier of σ′, which is acyclic.
pub fn acyclic_carrier_homotopy(s: &SubdivisionPair, theta: &[CellOperator], eta: &[CellOperator]) -> Result<Vec<CellOperator>> {
    let kp = &s.kp;
    let top = s.k.dim().unwrap_or(0);
    let mut d: Vec<CellOperator> = Vec::new();
    for q_deg in 0..=top {
        let te = theta[q_deg].compose(&eta[q_deg])?;
        let prev_d = (q_deg > 0).then(|| d[q_deg - 1].compose(&boundary_matrix(kp, q_deg - 1))).transpose()?;
        let upper = kp.cells_of_dim(q_deg + 1);
        let mut trips = Vec::new();
        for (j, &c) in kp.cells_of_dim(q_deg).iter().enumerate() {
            let mut rhs: BTreeMap<usize, Q> = BTreeMap::new();
            for (r, v) in te.column(j) {
                *rhs.entry(*r).or_insert_with(Q::zero) += v;
            }
            *rhs.entry(j).or_insert_with(Q::zero) -= q(1);
            if let Some(pd) = &prev_d {
                for (r, v) in pd.column(j) {
                    *rhs.entry(*r).or_insert_with(Q::zero) -= v;
                }
            }
            rhs.retain(|_, v| !v.is_zero());
            if rhs.is_empty() {
                continue;
            }
            let block = s.k.closure(s.carrier[c]);
            let cols: Vec<usize> = (0..upper.len()).filter(|&i| block.contains(&s.carrier[upper[i]])).collect();
            let rows: Vec<usize> = (0..kp.count(q_deg))
                .filter(|&i| block.contains(&s.carrier[kp.global(q_deg, i)]))
                .collect();
            let row_pos: HashMap<usize, usize> = rows.iter().enumerate().map(|(a, &r)| (r, a)).collect();
            let mut m = QMatrix::zeros(rows.len(), cols.len());
            for (a, &ci) in cols.iter().enumerate() {
                for &(f, e) in kp.boundary(upper[ci]) {
                    m[(row_pos[&kp.position(f)], a)] = q(e);
                }
            }
            let mut b = vec![Q::zero(); rows.len()];
            for (r, v) in rhs {
                let Some(&a) = row_pos.get(&r) else {
                    return Err(Error::InvalidSubdivision(format!("homotopy target leaves the block of {}", kp.id(c))));
                };
                b[a] = v;
            }
            let x = m.solve(&b).ok_or_else(|| {
                Error::InvalidSubdivision(format!("closed block of {} is not acyclic", kp.id(c)))
            })?;
            for (a, v) in x.into_iter().enumerate() {
                if !v.is_zero() {
                    trips.push((cols[a], j, v));
                }
            }
        }
        d.push(CellOperator::from_triplets(q_deg, q_deg + 1, upper.len(), kp.count(q_deg), trips));
    }
    Ok(d)
}

#[derive(Clone, Debug, Serialize)]
pub struct SubdivisionReport {
    pub zeta_iso: bool,
    pub theta_chain_map: bool,
    pub theta_mono: bool,
    pub eta_theta_id: bool,
    pub betti_equal: bool,
    pub theta_homology_iso: bool,
    pub betti_k: Vec<usize>,
    pub betti_subdivided: Vec<usize>,
    pub degree_bounds: Vec<usize>,
    pub block_f_vector: Vec<usize>,
}

impl SubdivisionReport {
    pub fn passed(&self) -> bool {
        self.zeta_iso && self.theta_chain_map && self.theta_mono && self.eta_theta_id && self.betti_equal && self.theta_homology_iso
    }
}

fn chain_map_residual(k: &AbsoluteComplex, kp: &AbsoluteComplex, maps: &[CellOperator]) -> Result<bool> {
    for q_deg in 0..maps.len().saturating_sub(1) {
        let left = boundary_matrix(kp, q_deg).compose(&maps[q_deg + 1])?;
        let right = maps[q_deg].compose(&boundary_matrix(k, q_deg))?;
        if !left.sub(&right)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// dim Θ_*(H_q(K)) ⊂ H_q(K′), from exact ranks: rank[∂′ | ΘZ] − rank ∂′ for a
/// basis Z of q-cycles of K.
pub fn theta_homology_rank(s: &SubdivisionPair, theta: &[CellOperator], q_deg: usize) -> usize {
    let n = s.k.count(q_deg);
    let cycles: Vec<Vec<Q>> = if q_deg == 0 {
        (0..n).map(|i| (0..n).map(|j| if i == j { q(1) } else { Q::zero() }).collect()).collect()
    } else {
        boundary_matrix(&s.k, q_deg - 1).to_qmatrix().kernel()
    };
    let bnd = boundary_matrix(&s.kp, q_deg);
    let mut vecs: Vec<_> = (0..bnd.ncols()).map(|j| integerize(bnd.column(j))).collect();
    let base = sparse_rank(&vecs);
    for z in cycles {
        let img = theta[q_deg].apply(&z);
        let sparse: Vec<(usize, Q)> = img.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect();
        vecs.push(integerize(&sparse));
    }
    sparse_rank(&vecs) - base
}

/// Runs the barycentric pipeline end to end on `k`.
pub fn subdivision_invariance_check(s: &SubdivisionPair) -> Result<SubdivisionReport> {
    let blocks = block_complex(s)?;
    let theta = theta_chain_map(s, &blocks);
    let eta = vertex_translation(s)?;
    let theta_mono = theta.iter().all(|t| t.rank() == t.ncols());
    let eta_theta_id = theta
        .iter()
        .zip(&eta)
        .map(|(t, e)| e.compose(t).map(|m| m.sub(&CellOperator::identity(m.source_degree, m.ncols()))))
        .collect::<Result<Result<Vec<_>>>>()??
        .iter()
        .all(|r| r.is_zero());
    let betti_k = betti_numbers(&s.k);
    let betti_subdivided = betti_numbers(&s.kp);
    let theta_homology_iso = betti_k
        .iter()
        .enumerate()
        .all(|(q_deg, &b)| theta_homology_rank(s, &theta, q_deg) == b);
    Ok(SubdivisionReport {
        zeta_iso: zeta_is_isomorphism(s, &blocks),
        theta_chain_map: chain_map_residual(&s.k, &s.kp, &theta)?,
        theta_mono,
        eta_theta_id,
        betti_equal: betti_k == betti_subdivided,
        theta_homology_iso,
        betti_k,
        betti_subdivided,
        degree_bounds: s.degree_bounds.clone(),
        block_f_vector: blocks.complex.f_vector(),
    })
}

/// Data for a chain homotopy equivalence check between complexes A and B:
/// φ: C(A) → C(B), ψ: C(B) → C(A), and homotopies D1 on A, D2 on B, all
/// indexed by source degree.
pub struct HomotopyData<'a> {
    pub a: &'a AbsoluteComplex,
    pub b: &'a AbsoluteComplex,
    pub phi: &'a [CellOperator],
    pub psi: &'a [CellOperator],
    pub d1: &'a [CellOperator],
    pub d2: &'a [CellOperator],
    /// Extra structure on A- and B-cells for the locality check.
    pub a_labels: Option<&'a [u64]>,
    pub b_labels: Option<&'a [u64]>,
    pub radius: usize,
    pub cap: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomotopyReport {
    pub phi_chain_map: bool,
    pub psi_chain_map: bool,
    /// Largest entry of ∂φ − φ∂ and ∂ψ − ψ∂.
    pub chain_map_residual: f64,
    pub phi_local: bool,
    pub psi_local: bool,
    /// Largest entry of ψφ − id − ∂D1 − D1∂.
    pub residual_a: f64,
    /// Largest entry of φψ − id − ∂D2 − D2∂.
    pub residual_b: f64,
    /// Schur bounds on the homotopies, degree by degree.
    pub d1_norm_bounds: Vec<f64>,
    pub d2_norm_bounds: Vec<f64>,
    pub betti_a: Vec<usize>,
    pub betti_b: Vec<usize>,
    pub betti_equal: Option<bool>,
    pub verdict: String,
}

fn max_abs(op: &CellOperator) -> f64 {
    crate::exact::q_to_f64(&op.max_abs_entry())
}

fn chain_residual(src: &AbsoluteComplex, dst: &AbsoluteComplex, maps: &[CellOperator]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for q_deg in 0..maps.len().saturating_sub(1) {
        let left = boundary_matrix(dst, q_deg).compose(&maps[q_deg + 1])?;
        let right = maps[q_deg].compose(&boundary_matrix(src, q_deg))?;
        worst = worst.max(max_abs(&left.sub(&right)?));
    }
    Ok(worst)
}

/// Largest entry of gf − id − ∂D − D∂ on C(X) over all degrees.
fn homotopy_residual(x: &AbsoluteComplex, f: &[CellOperator], g: &[CellOperator], d: &[CellOperator]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for q_deg in 0..f.len() {
        let mut r = g[q_deg].compose(&f[q_deg])?.sub(&CellOperator::identity(q_deg, x.count(q_deg)))?;
        if let Some(dq) = d.get(q_deg) {
            r = r.sub(&boundary_matrix(x, q_deg).compose(dq)?)?;
        }
        if q_deg > 0 {
            if let Some(dp) = d.get(q_deg - 1) {
                r = r.sub(&dp.compose(&boundary_matrix(x, q_deg - 1))?)?;
            }
        }
        worst = worst.max(max_abs(&r));
    }
    Ok(worst)
}

pub const NOT_HOMOTOPY_PAIR: &str = "not a chain homotopy pair";
pub const HOMOTOPY_PAIR: &str = "chain homotopy equivalence";

/// Checks that φ, ψ are local chain maps and that D1, D2 are chain homotopies
/// ψφ ≃ id and φψ ≃ id, all exactly.
pub fn chain_homotopy_check(h: &HomotopyData) -> Result<HomotopyReport> {
    if h.phi.len() != h.psi.len() || h.phi.is_empty() {
        return Err(Error::DegreeMismatch("φ and ψ must cover the same degrees".into()));
    }
    for (q_deg, (p, s)) in h.phi.iter().zip(h.psi).enumerate() {
        if p.ncols() != h.a.count(q_deg) || p.nrows() != h.b.count(q_deg) || s.ncols() != h.b.count(q_deg) || s.nrows() != h.a.count(q_deg) {
            return Err(Error::DegreeMismatch(format!("chain maps in degree {q_deg} have the wrong shape")));
        }
    }
    let phi_res = chain_residual(h.a, h.b, h.phi)?;
    let psi_res = chain_residual(h.b, h.a, h.psi)?;
    let local = |ops: &[CellOperator], src, tgt, labels| -> Result<bool> {
        for op in ops {
            if !classify_locality_colored(op, src, tgt, h.radius, h.cap, labels)?.is_local() {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let phi_local = local(h.phi, h.a, h.b, h.a_labels)?;
    let psi_local = local(h.psi, h.b, h.a, h.b_labels)?;
    let residual_a = homotopy_residual(h.a, h.phi, h.psi, h.d1)?;
    let residual_b = homotopy_residual(h.b, h.psi, h.phi, h.d2)?;
    let ok = phi_res == 0.0 && psi_res == 0.0 && phi_local && psi_local && residual_a == 0.0 && residual_b == 0.0;
    let betti_a = betti_numbers(h.a);
    let betti_b = betti_numbers(h.b);
    Ok(HomotopyReport {
        phi_chain_map: phi_res == 0.0,
        psi_chain_map: psi_res == 0.0,
        chain_map_residual: phi_res.max(psi_res),
        phi_local,
        psi_local,
        residual_a,
        residual_b,
        d1_norm_bounds: h.d1.iter().map(crate::locality::norm_bound_vicinal).collect(),
        d2_norm_bounds: h.d2.iter().map(crate::locality::norm_bound_vicinal).collect(),
        betti_equal: ok.then(|| betti_a == betti_b),
        betti_a,
        betti_b,
        verdict: if ok { HOMOTOPY_PAIR } else { NOT_HOMOTOPY_PAIR }.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn barycentric_counts() {
        let e = barycentric_subdivide(&fixtures::edge()).unwrap();
        assert_eq!(e.kp.f_vector(), vec![3, 2]);
        assert_eq!(e.degree_bounds, vec![1, 2]);
        let t = barycentric_subdivide(&fixtures::triangle()).unwrap();
        assert_eq!(t.kp.f_vector(), vec![7, 12, 6]);
        assert_eq!(t.degree_bounds, vec![1, 2, 6]);
        let c = barycentric_subdivide(&fixtures::circle3()).unwrap();
        assert_eq!(c.kp.f_vector(), vec![6, 6]);
        assert!(c.kp.cells_of_dim(0).iter().all(|&v| c.kp.coboundary(v).len() == 2));
    }

    #[test]
    fn blocks_of_a_triangle() {
        let s = barycentric_subdivide(&fixtures::triangle()).unwrap();
        let b = block_complex(&s).unwrap();
        assert_eq!(b.complex.f_vector(), vec![3, 3, 1]);
        assert!(zeta_is_isomorphism(&s, &b));
        let e = barycentric_subdivide(&fixtures::edge()).unwrap();
        let edge = e.k.cells_of_dim(1)[0];
        assert_eq!(block_relative_rank(&e, edge), 1);
    }

    #[test]
    fn identity_subdivision_blocks_are_cells() {
        let k = fixtures::cone_disc();
        let s = SubdivisionPair::identity(&k).unwrap();
        let b = block_complex(&s).unwrap();
        for c in 0..k.num_cells() {
            assert_eq!(b.zeta[c], c);
            assert_eq!(b.orientation[c], vec![(c, 1)]);
        }
        let eta = vertex_translation(&s).unwrap();
        assert!(eta.iter().enumerate().all(|(q, e)| e.sub(&CellOperator::identity(q, k.count(q))).unwrap().is_zero()));
    }

    #[test]
    fn theta_on_the_circle() {
        let s = barycentric_subdivide(&fixtures::circle3()).unwrap();
        let b = block_complex(&s).unwrap();
        let theta = theta_chain_map(&s, &b);
        assert_eq!(theta[1].rank(), 3);
        assert!(chain_map_residual(&s.k, &s.kp, &theta).unwrap());
        let eta = vertex_translation(&s).unwrap();
        let id = eta[1].compose(&theta[1]).unwrap();
        assert!(id.sub(&CellOperator::identity(1, 3)).unwrap().is_zero());
        // edge block: two half edges with coefficients of the same orientation
        let edge = s.k.cells_of_dim(1)[0];
        assert_eq!(b.orientation[edge].len(), 2);
    }

    #[test]
    fn invariance_reports() {
        for k in [fixtures::point(), fixtures::circle3(), fixtures::torus(), fixtures::triangle()] {
            let s = barycentric_subdivide(&k).unwrap();
            let r = subdivision_invariance_check(&s).unwrap();
            assert!(r.passed(), "{r:?}");
        }
        let r = subdivision_invariance_check(&barycentric_subdivide(&fixtures::torus()).unwrap()).unwrap();
        assert_eq!(r.betti_k, vec![1, 2, 1]);
        assert_eq!(r.betti_subdivided, vec![1, 2, 1]);
    }

    fn circle_homotopy() -> (SubdivisionPair, Vec<CellOperator>, Vec<CellOperator>, Vec<CellOperator>) {
        let s = barycentric_subdivide(&fixtures::circle3()).unwrap();
        let b = block_complex(&s).unwrap();
        let theta = theta_chain_map(&s, &b);
        let eta = vertex_translation(&s).unwrap();
        let d2 = acyclic_carrier_homotopy(&s, &theta, &eta).unwrap();
        (s, theta, eta, d2)
    }

    #[test]
    fn theta_eta_are_homotopy_inverse() {
        let (s, theta, eta, d2) = circle_homotopy();
        let d1: Vec<CellOperator> = (0..2).map(|q| CellOperator::zero(q, q + 1, s.k.count(q + 1), s.k.count(q))).collect();
        let labels = translation_labels(&s);
        let r = chain_homotopy_check(&HomotopyData {
            a: &s.k,
            b: &s.kp,
            phi: &theta,
            psi: &eta,
            d1: &d1,
            d2: &d2,
            a_labels: None,
            b_labels: Some(&labels),
            radius: 2,
            cap: 16,
        })
        .unwrap();
        assert_eq!(r.verdict, HOMOTOPY_PAIR, "{r:?}");
        assert_eq!(r.betti_equal, Some(true));
    }

    #[test]
    fn identity_pair_passes_and_non_chain_map_fails() {
        let k = fixtures::circle3();
        let ids: Vec<CellOperator> = (0..2).map(|q| CellOperator::identity(q, k.count(q))).collect();
        let zeros: Vec<CellOperator> = (0..2).map(|q| CellOperator::zero(q, q + 1, k.count(q + 1), k.count(q))).collect();
        let r = chain_homotopy_check(&HomotopyData {
            a: &k, b: &k, phi: &ids, psi: &ids, d1: &zeros, d2: &zeros, a_labels: None, b_labels: None, radius: 1, cap: 8,
        })
        .unwrap();
        assert_eq!(r.verdict, HOMOTOPY_PAIR);
        let mut bad = ids.clone();
        bad[0] = CellOperator::from_triplets(0, 0, 3, 3, [(0, 0, q(1)), (1, 0, q(1)), (2, 2, q(1)), (1, 1, q(1))]);
        let r = chain_homotopy_check(&HomotopyData {
            a: &k, b: &k, phi: &bad, psi: &ids, d1: &zeros, d2: &zeros, a_labels: None, b_labels: None, radius: 1, cap: 8,
        })
        .unwrap();
        assert_eq!(r.verdict, NOT_HOMOTOPY_PAIR);
        assert!(r.chain_map_residual > 0.0);
    }
}
