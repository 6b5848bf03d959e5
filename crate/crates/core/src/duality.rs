//! Fundamental cycles, cup and cap products, Poincaré duality checks, and the
//! invariants of manifold pairs: the signature of the glued complex
//! K₁ ∪ −K, characteristic numbers of supplied classes, and the comparison
//! of two pairs over a common reference core.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::complex::{sort_with_sign, AbsoluteComplex, DeltaCell};
use crate::error::{Error, Result};
use crate::exact::{inertia, integerize, q, q_to_f64, sparse_rank, QMatrix, Q};
use crate::hodge::betti_number;
use crate::operator::{boundary_matrix, coboundary_matrix, SparseChain};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ring {
    Rational,
    Mod2,
}

fn reduce(x: Q, ring: Ring) -> Result<Q> {
    match ring {
        Ring::Rational => Ok(x),
        Ring::Mod2 => {
            if !x.is_integer() {
                return Err(Error::InvalidArgument(format!("{x} is not a mod-2 value")));
            }
            Ok(Q::from_integer(x.to_integer().mod_floor(&2.into())))
        }
    }
}

fn to_dense(chain: &SparseChain<Q>, n: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    for (&i, x) in &chain.coeffs {
        v[i] = x.clone();
    }
    v
}

fn to_sparse(degree: usize, v: Vec<Q>) -> SparseChain<Q> {
    SparseChain {
        degree,
        coeffs: v.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect(),
    }
}

/// A cochain known to be a cocycle in its coefficient ring.
#[derive(Clone, Debug)]
pub struct CocycleClass {
    pub degree: usize,
    pub representative: SparseChain<Q>,
    pub ring: Ring,
}

impl CocycleClass {
    /// Validates the cocycle condition on `k`; mod-2 values are reduced.
    pub fn new(k: &AbsoluteComplex, degree: usize, values: Vec<Q>, ring: Ring) -> Result<Self> {
        if values.len() != k.count(degree) {
            return Err(Error::DegreeMismatch(format!(
                "{} values for {} cells of degree {degree}",
                values.len(),
                k.count(degree)
            )));
        }
        let values = values.into_iter().map(|x| reduce(x, ring)).collect::<Result<Vec<_>>>()?;
        let d = coboundary_matrix(k, degree).apply(&values);
        for (i, x) in d.into_iter().enumerate() {
            if !reduce(x, ring)?.is_zero() {
                return Err(Error::NotCocycle(format!(
                    "coboundary is nonzero on {}",
                    k.id(k.global(degree + 1, i))
                )));
            }
        }
        Ok(CocycleClass { degree, representative: to_sparse(degree, values), ring })
    }

    /// Cochain given by cell ids.
    pub fn from_ids(k: &AbsoluteComplex, degree: usize, values: &BTreeMap<String, Q>, ring: Ring) -> Result<Self> {
        let mut dense = vec![Q::zero(); k.count(degree)];
        for (id, v) in values {
            let c = k.index_of(id).ok_or_else(|| Error::InvalidArgument(format!("unknown cell {id}")))?;
            if k.cell(c).dim != degree {
                return Err(Error::DegreeMismatch(format!("cell {id} is not of degree {degree}")));
            }
            dense[k.position(c)] = v.clone();
        }
        Self::new(k, degree, dense, ring)
    }

    /// The 0-cocycle with value 1 on every vertex.
    pub fn unit(k: &AbsoluteComplex, ring: Ring) -> Self {
        CocycleClass { degree: 0, representative: to_sparse(0, vec![Q::one(); k.count(0)]), ring }
    }

    pub fn values(&self, k: &AbsoluteComplex) -> Vec<Q> {
        to_dense(&self.representative, k.count(self.degree))
    }
}

/// ⟨a, c⟩ for a dense cochain and a sparse chain of the same degree.
pub fn evaluate(cochain: &[Q], chain: &SparseChain<Q>) -> Q {
    chain.coeffs.iter().map(|(&i, c)| &cochain[i] * c).sum()
}

/// Alexander–Whitney product of arbitrary cochains:
/// (a∪b)(v₀…v_{q+r}) = a(v₀…v_q)·b(v_q…v_{q+r}).
pub fn cup_values(k: &AbsoluteComplex, qa: usize, a: &[Q], rb: usize, b: &[Q]) -> Result<Vec<Q>> {
    if !k.is_simplicial() {
        return Err(Error::InvalidComplex("cup product needs ordered simplicial cells".into()));
    }
    Ok(k.cells_of_dim(qa + rb)
        .iter()
        .map(|&s| {
            let front = k.front_face(s, qa).unwrap();
            let back = k.back_face(s, rb).unwrap();
            &a[k.position(front)] * &b[k.position(back)]
        })
        .collect())
}

pub fn cup_product(k: &AbsoluteComplex, a: &CocycleClass, b: &CocycleClass) -> Result<CocycleClass> {
    if a.ring != b.ring {
        return Err(Error::RingMismatch);
    }
    let v = cup_values(k, a.degree, &a.values(k), b.degree, &b.values(k))?;
    CocycleClass::new(k, a.degree + b.degree, v, a.ring)
}

/// Cap product c ∩ α for an `n`-chain c and a `q`-cochain α: each n-cell
/// contributes α(back q-face) times its front (n−q)-face.
pub fn cap_values(k: &AbsoluteComplex, chain: &SparseChain<Q>, qa: usize, alpha: &[Q]) -> Result<Vec<Q>> {
    if !k.is_simplicial() {
        return Err(Error::InvalidComplex("cap product needs ordered simplicial cells".into()));
    }
    let n = chain.degree;
    let mut out = vec![Q::zero(); k.count(n - qa)];
    for (&i, c) in &chain.coeffs {
        let s = k.global(n, i);
        let front = k.front_face(s, n - qa).unwrap();
        let back = k.back_face(s, qa).unwrap();
        out[k.position(front)] += c * &alpha[k.position(back)];
    }
    Ok(out)
}

/// Checks that `k` is a closed `n`-pseudomanifold: every cell lies in an
/// `n`-cell and every `(n−1)`-cell has exactly two `n`-cofaces, each with
/// incidence ±1.
pub fn check_pseudomanifold(k: &AbsoluteComplex, n: usize) -> Result<()> {
    if k.dim() != Some(n) || k.count(n) == 0 {
        return Err(Error::NotPseudomanifold(format!("complex is not {n}-dimensional")));
    }
    for c in 0..k.num_cells() {
        let d = k.cell(c).dim;
        if d == n {
            continue;
        }
        let cof = k.coboundary(c);
        if cof.is_empty() {
            return Err(Error::NotPseudomanifold(format!("cell {} is not a face of a top cell", k.id(c))));
        }
        if d + 1 == n && (cof.len() != 2 || cof.iter().any(|(_, e)| e.abs() != 1)) {
            return Err(Error::NotPseudomanifold(format!(
                "cell {} has {} top-dimensional cofaces",
                k.id(c),
                cof.len()
            )));
        }
    }
    Ok(())
}

/// Fundamental cycle with coefficient +1 on the first `n`-cell.
pub fn fundamental_cycle(k: &AbsoluteComplex, n: usize) -> Result<SparseChain<Q>> {
    fundamental_cycle_seeded(k, n, 1)
}

/// ±1 on every `n`-cell with vanishing boundary, by breadth-first sign
/// propagation from the first `n`-cell, which gets `seed`.
pub fn fundamental_cycle_seeded(k: &AbsoluteComplex, n: usize, seed: i64) -> Result<SparseChain<Q>> {
    check_pseudomanifold(k, n)?;
    let facets = k.cells_of_dim(n);
    let mut sign = vec![0i64; facets.len()];
    sign[0] = seed.signum();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for &(f, e) in k.boundary(facets[i]) {
            for &(other, e2) in k.coboundary(f) {
                let j = k.position(other);
                if j == i {
                    continue;
                }
                let want = -sign[i] * e * e2;
                if sign[j] == 0 {
                    sign[j] = want;
                    queue.push_back(j);
                } else if sign[j] != want {
                    return Err(Error::NonOrientable);
                }
            }
        }
    }
    if sign.contains(&0) {
        return Err(Error::NotPseudomanifold("top cells are not connected through faces".into()));
    }
    let chain = to_sparse(n, sign.into_iter().map(q).collect());
    if n > 0 && boundary_matrix(k, n - 1).apply(&to_dense(&chain, k.count(n))).iter().any(|x| !x.is_zero()) {
        return Err(Error::NonOrientable);
    }
    Ok(chain)
}

/// Fundamental cycle in which the top cell with the ordered vertices `tuple`
/// is positively oriented.
pub fn fundamental_cycle_oriented(k: &AbsoluteComplex, n: usize, tuple: &[u32]) -> Result<SparseChain<Q>> {
    let (sorted, sign) = sort_with_sign(tuple);
    let facet = k
        .cells_of_dim(n)
        .iter()
        .copied()
        .find(|&c| k.vertices(c) == Some(sorted.as_slice()))
        .ok_or_else(|| Error::InvalidArgument(format!("{tuple:?} is not a top cell")))?;
    let mut z = fundamental_cycle(k, n)?;
    if z.coeffs[&k.position(facet)] != q(sign) {
        z.coeffs.values_mut().for_each(|x| *x = -x.clone());
    }
    Ok(z)
}

/// Sum of all `n`-cells, a cycle mod 2 on any closed pseudomanifold.
pub fn mod2_fundamental_cycle(k: &AbsoluteComplex, n: usize) -> Result<SparseChain<Q>> {
    check_pseudomanifold(k, n)?;
    Ok(to_sparse(n, vec![Q::one(); k.count(n)]))
}

/// Compact cores K₁ (`core1`) and K (`core0`) with an identification of
/// their boundaries, given as pairs of cell ids (core1 cell, core0 cell).
#[derive(Clone, Debug)]
pub struct ManifoldPairDescription {
    pub core1: AbsoluteComplex,
    pub core0: AbsoluteComplex,
    pub identification: Vec<(String, String)>,
    /// Ordered vertex tuple of a top cell of core1 declared positively
    /// oriented. Defaults to the first top cell in ascending order.
    pub orientation: Option<Vec<u32>>,
}

/// Cells on the boundary: `(n−1)`-cells with one top coface and their faces.
pub fn boundary_cells(k: &AbsoluteComplex, n: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    if n == 0 {
        return out;
    }
    for &c in k.cells_of_dim(n - 1) {
        if k.coboundary(c).len() == 1 {
            out.extend(k.closure(c));
        }
    }
    out
}

/// The closed complex K₁ ∪ −K with its fundamental cycle [K₁] − [K].
#[derive(Clone, Debug)]
pub struct GluedComplex {
    pub complex: AbsoluteComplex,
    pub fundamental: SparseChain<Q>,
    pub dim: usize,
    /// Glued index of every core1 cell.
    pub from_core1: Vec<usize>,
    /// Glued index of every core0 cell; boundary cells land on core1's.
    pub from_core0: Vec<usize>,
}

impl ManifoldPairDescription {
    /// Pairs every boundary cell of core1 with the boundary cell of core0
    /// carrying the same id.
    pub fn identity_identification(core1: &AbsoluteComplex, core0: &AbsoluteComplex) -> Vec<(String, String)> {
        let n = core1.dim().unwrap_or(0);
        let b0: BTreeSet<&str> = boundary_cells(core0, n).into_iter().map(|c| core0.id(c)).collect();
        boundary_cells(core1, n)
            .into_iter()
            .map(|c| core1.id(c))
            .filter(|id| b0.contains(id))
            .map(|id| (id.to_string(), id.to_string()))
            .collect()
    }

    /// The pair with the roles of the cores exchanged. The new orientation is
    /// the one on the old core0 compatible with core1 across the boundary,
    /// so the glued complex keeps its cells and its orientation reverses.
    pub fn swapped(&self) -> Result<Self> {
        let g = glue_pair(self)?;
        let n = g.dim;
        let facet = self.core0.cells_of_dim(n)[0];
        let verts = self.core0.vertices(facet).unwrap().to_vec();
        // glued orientation of this cell, expressed on core0's ascending tuple
        let gc = g.from_core0[facet];
        let coeff = g.fundamental.coeffs.get(&g.complex.position(gc)).cloned().unwrap_or_else(Q::zero);
        let relabel = glued_labels(self, &g)?;
        let tuple: Vec<u32> = verts.iter().map(|v| relabel[v]).collect();
        let (_, s) = sort_with_sign(&tuple);
        // [K] = −(glued cycle on core0 cells)
        let positive = -(coeff * q(s)) > Q::zero();
        let mut orient = verts;
        if !positive {
            orient.swap(0, 1);
        }
        Ok(ManifoldPairDescription {
            core1: self.core0.clone(),
            core0: self.core1.clone(),
            identification: self.identification.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
            orientation: Some(orient),
        })
    }

    /// Relabels the vertices of core1, keeping the identification and the
    /// orientation attached to the same cells.
    pub fn relabel_core1(&self, map: &HashMap<u32, u32>) -> Result<Self> {
        let (core1, transport) = self.core1.relabel(map)?;
        let identification = self
            .identification
            .iter()
            .map(|(a, b)| {
                let c = self.core1.index_of(a).ok_or_else(|| Error::BoundaryMismatch(vec![format!("core1:{a}")]))?;
                Ok((core1.id(transport[c].0).to_string(), b.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        let orientation = match &self.orientation {
            Some(t) => Some(t.iter().map(|v| map.get(v).copied().ok_or_else(|| Error::InvalidArgument(format!("vertex {v} not relabeled")))).collect::<Result<Vec<_>>>()?),
            None => {
                let f = self.core1.cells_of_dim(self.core1.dim().unwrap_or(0))[0];
                Some(self.core1.vertices(f).unwrap().iter().map(|v| map[v]).collect())
            }
        };
        Ok(ManifoldPairDescription { core1, core0: self.core0.clone(), identification, orientation })
    }
}

/// Glued label of every core0 vertex: boundary vertices take their core1
/// partner's label, interior vertices fresh labels above core1's.
fn glued_labels(p: &ManifoldPairDescription, g: &GluedComplex) -> Result<HashMap<u32, u32>> {
    let mut out = HashMap::new();
    for &v in p.core0.cells_of_dim(0) {
        let label = p.core0.vertices(v).unwrap()[0];
        let gv = g.from_core0[v];
        out.insert(label, g.complex.vertices(gv).unwrap()[0]);
    }
    Ok(out)
}

/// Glues core1 to core0 along the boundary identification and orients the
/// result by core1's orientation.
pub fn glue_pair(p: &ManifoldPairDescription) -> Result<GluedComplex> {
    let (k1, k0) = (&p.core1, &p.core0);
    if !k1.is_simplicial() || !k0.is_simplicial() || k1.cells().iter().chain(k0.cells()).any(|c| c.vertices.is_none()) {
        return Err(Error::InvalidComplex("cores must be simplicial".into()));
    }
    let n = k1.dim().ok_or_else(|| Error::InvalidComplex("core1 is empty".into()))?;
    if k0.dim() != Some(n) || n == 0 {
        return Err(Error::DegreeMismatch("cores must have the same positive dimension".into()));
    }
    let b1 = boundary_cells(k1, n);
    let b0 = boundary_cells(k0, n);
    let mut pair_of: HashMap<usize, usize> = HashMap::new();
    let mut matched0: BTreeSet<usize> = BTreeSet::new();
    let mut bad: Vec<String> = Vec::new();
    for (a, b) in &p.identification {
        match (k1.index_of(a).filter(|c| b1.contains(c)), k0.index_of(b).filter(|c| b0.contains(c))) {
            (Some(c1), Some(c0)) if !pair_of.contains_key(&c1) && !matched0.contains(&c0) => {
                pair_of.insert(c1, c0);
                matched0.insert(c0);
            }
            _ => bad.push(format!("{a}~{b}")),
        }
    }
    bad.extend(b1.iter().filter(|c| !pair_of.contains_key(c)).map(|&c| format!("core1:{}", k1.id(c))));
    bad.extend(b0.iter().filter(|c| !matched0.contains(c)).map(|&c| format!("core0:{}", k0.id(c))));
    if !bad.is_empty() {
        return Err(Error::BoundaryMismatch(bad));
    }
    // vertex map core0 label → core1 label on the boundary
    let mut inv: HashMap<u32, u32> = HashMap::new();
    for (&c1, &c0) in &pair_of {
        if k1.cell(c1).dim == 0 {
            inv.insert(k0.vertices(c0).unwrap()[0], k1.vertices(c1).unwrap()[0]);
        }
    }
    for (&c1, &c0) in &pair_of {
        let mut img: Vec<u32> = k0.vertices(c0).unwrap().iter().map(|v| inv[v]).collect();
        img.sort_unstable();
        if img != k1.vertices(c1).unwrap() {
            return Err(Error::BoundaryMismatch(vec![format!("{}~{}", k1.id(c1), k0.id(c0))]));
        }
    }
    let mut fresh = k1.cells().iter().flat_map(|c| c.vertices.clone().unwrap()).max().unwrap_or(0) + 1;
    let mut label0: HashMap<u32, u32> = HashMap::new();
    for &v in k0.cells_of_dim(0) {
        let l = k0.vertices(v).unwrap()[0];
        let new = match inv.get(&l) {
            Some(&x) => x,
            None => {
                fresh += 1;
                fresh - 1
            }
        };
        label0.insert(l, new);
    }

    let mut cells: Vec<DeltaCell> = Vec::new();
    let mut from_core1 = vec![usize::MAX; k1.num_cells()];
    let mut from_core0 = vec![usize::MAX; k0.num_cells()];
    for d in 0..=n {
        for &c in k1.cells_of_dim(d) {
            let faces = (0..if d > 0 { d + 1 } else { 0 }).map(|i| from_core1[k1.face(c, i).unwrap()]).collect();
            from_core1[c] = cells.len();
            cells.push(DeltaCell { id: format!("1:{}", k1.id(c)), vertices: k1.vertices(c).unwrap().to_vec(), faces });
        }
        for &c in k0.cells_of_dim(d) {
            if b0.contains(&c) {
                continue;
            }
            let orig = k0.vertices(c).unwrap();
            let mut sorted: Vec<u32> = orig.iter().map(|v| label0[v]).collect();
            sorted.sort_unstable();
            let mut faces = Vec::new();
            if d > 0 {
                for &omit in &sorted {
                    let j = orig.iter().position(|v| label0[v] == omit).unwrap();
                    faces.push(from_core0[k0.face(c, j).unwrap()]);
                }
            }
            from_core0[c] = cells.len();
            cells.push(DeltaCell { id: format!("0:{}", k0.id(c)), vertices: sorted, faces });
        }
        for &c in k0.cells_of_dim(d) {
            if let Some((&c1, _)) = pair_of.iter().find(|(_, &c0)| c0 == c) {
                from_core0[c] = from_core1[c1];
            }
        }
    }
    let complex = AbsoluteComplex::from_delta(cells)?;
    let mut fundamental = fundamental_cycle(&complex, n)?;

    let (facet, sign) = match &p.orientation {
        Some(t) => {
            let (sorted, s) = sort_with_sign(t);
            let f = k1
                .cells_of_dim(n)
                .iter()
                .copied()
                .find(|&c| k1.vertices(c).unwrap() == sorted.as_slice())
                .ok_or_else(|| Error::InvalidArgument(format!("orientation tuple {t:?} is not a top cell of core1")))?;
            (f, s)
        }
        None => (k1.cells_of_dim(n)[0], 1),
    };
    let at = complex.position(from_core1[facet]);
    if fundamental.coeffs[&at] != q(sign) {
        fundamental.coeffs.values_mut().for_each(|x| *x = -x.clone());
    }
    Ok(GluedComplex { complex, fundamental, dim: n, from_core1, from_core0 })
}

#[derive(Clone, Debug, Serialize)]
pub struct IntersectionForm {
    #[serde(serialize_with = "ser_q_matrix")]
    pub matrix: Vec<Vec<Q>>,
    pub positive: usize,
    pub negative: usize,
    pub nullity: usize,
    pub signature: i64,
}

fn ser_q_matrix<S: serde::Serializer>(m: &[Vec<Q>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let strs: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
    strs.serialize(s)
}

fn ser_q_string<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Basis of H_m(K; ℚ) as cycle vectors: kernel vectors of ∂ kept when they
/// are independent of the boundaries and of each other.
fn homology_basis(k: &AbsoluteComplex, m: usize) -> Vec<Vec<Q>> {
    let cycles = if m == 0 {
        (0..k.count(0)).map(|i| unit_vec(k.count(0), i)).collect()
    } else {
        boundary_matrix(k, m - 1).to_qmatrix().kernel()
    };
    let bnd = boundary_matrix(k, m);
    let mut vecs: Vec<_> = (0..bnd.ncols()).map(|j| integerize(bnd.column(j))).collect();
    let mut rank = sparse_rank(&vecs);
    let mut basis = Vec::new();
    for z in cycles {
        let sparse: Vec<(usize, Q)> = z.iter().cloned().enumerate().filter(|(_, x)| !x.is_zero()).collect();
        vecs.push(integerize(&sparse));
        let r = sparse_rank(&vecs);
        if r > rank {
            rank = r;
            basis.push(z);
        } else {
            vecs.pop();
        }
    }
    basis
}

/// Cocycles α_i with α_i(h_j) = δ_ij for a homology basis h.
fn dual_cocycles(k: &AbsoluteComplex, m: usize, basis: &[Vec<Q>]) -> Result<Vec<Vec<Q>>> {
    let d = coboundary_matrix(k, m);
    let nm = k.count(m);
    let rows = d.nrows() + basis.len();
    let mut a = QMatrix::zeros(rows, nm);
    for (r, c, v) in d.triplets() {
        a[(r, c)] = v.clone();
    }
    for (i, h) in basis.iter().enumerate() {
        for (j, x) in h.iter().enumerate() {
            a[(d.nrows() + i, j)] = x.clone();
        }
    }
    (0..basis.len())
        .map(|i| {
            let mut rhs = vec![Q::zero(); rows];
            rhs[d.nrows() + i] = Q::one();
            a.solve(&rhs).ok_or_else(|| Error::Numerical("dual cocycle system is inconsistent".into()))
        })
        .collect()
}

/// Intersection form on middle cohomology, with the default orientation.
pub fn intersection_form(k: &AbsoluteComplex) -> Result<IntersectionForm> {
    let n = k.dim().ok_or_else(|| Error::InvalidComplex("empty complex".into()))?;
    let z = fundamental_cycle(k, n)?;
    intersection_form_with(k, &z)
}

/// Q_ij = ⟨α_i ∪ α_j, z⟩ for dual cocycles of a middle homology basis, and
/// its signature by exact congruence diagonalization.
pub fn intersection_form_with(k: &AbsoluteComplex, z: &SparseChain<Q>) -> Result<IntersectionForm> {
    let n = z.degree;
    if n == 0 || n % 4 != 0 {
        return Err(Error::DegreeMismatch(format!("intersection form needs dimension divisible by 4, got {n}")));
    }
    let m = n / 2;
    let basis = homology_basis(k, m);
    let alphas = dual_cocycles(k, m, &basis)?;
    let b = alphas.len();
    let mut matrix = vec![vec![Q::zero(); b]; b];
    let mut qm = QMatrix::zeros(b, b);
    for i in 0..b {
        for j in 0..b {
            let v = evaluate(&cup_values(k, m, &alphas[i], m, &alphas[j])?, z);
            qm[(i, j)] = v.clone();
            matrix[i][j] = v;
        }
    }
    let (positive, negative, nullity) = inertia(&qm);
    Ok(IntersectionForm { matrix, positive, negative, nullity, signature: positive as i64 - negative as i64 })
}

/// σ(K₁ ∪ −K).
pub fn pair_signature(p: &ManifoldPairDescription) -> Result<IntersectionForm> {
    let g = glue_pair(p)?;
    intersection_form_with(&g.complex, &g.fundamental)
}

#[derive(Clone, Debug, Serialize)]
pub struct CharNumber {
    /// (class index, power) factors.
    pub monomial: Vec<(usize, usize)>,
    pub ring: Ring,
    #[serde(serialize_with = "ser_q_string")]
    pub value: Q,
}

impl CharNumber {
    pub fn value_f64(&self) -> f64 {
        q_to_f64(&self.value)
    }
}

/// Evaluates each monomial in the supplied classes on the fundamental cycle
/// `z` (rational classes) or on the mod-2 fundamental cycle.
pub fn char_numbers(
    k: &AbsoluteComplex,
    z: &SparseChain<Q>,
    classes: &[CocycleClass],
    monomials: &[Vec<(usize, usize)>],
) -> Result<Vec<CharNumber>> {
    let n = z.degree;
    for (i, c) in classes.iter().enumerate() {
        CocycleClass::new(k, c.degree, c.values(k), c.ring)
            .map_err(|e| Error::NotCocycle(format!("class {i}: {e}")))?;
    }
    monomials
        .iter()
        .map(|mono| {
            let mut ring = None;
            let mut total = 0;
            for &(i, pow) in mono {
                let c = classes.get(i).ok_or_else(|| Error::InvalidArgument(format!("no class {i}")))?;
                if ring.is_some_and(|r| r != c.ring) {
                    return Err(Error::RingMismatch);
                }
                ring = Some(c.ring);
                total += c.degree * pow;
            }
            let ring = ring.ok_or_else(|| Error::InvalidArgument("empty monomial".into()))?;
            if total != n {
                return Err(Error::DegreeMismatch(format!("monomial has degree {total}, complex has dimension {n}")));
            }
            let mut acc = CocycleClass::unit(k, ring);
            for &(i, pow) in mono {
                for _ in 0..pow {
                    acc = cup_product(k, &acc, &classes[i])?;
                }
            }
            let value = match ring {
                Ring::Rational => evaluate(&acc.values(k), z),
                Ring::Mod2 => reduce(evaluate(&acc.values(k), &mod2_fundamental_cycle(k, n)?), Ring::Mod2)?,
            };
            Ok(CharNumber { monomial: mono.clone(), ring, value })
        })
        .collect()
}

/// Characteristic numbers of a pair: supplied classes on K₁ ∪ −K evaluated on
/// its fundamental cycle.
pub fn pair_char_numbers(
    p: &ManifoldPairDescription,
    classes: &[CocycleClass],
    monomials: &[Vec<(usize, usize)>],
) -> Result<Vec<CharNumber>> {
    let g = glue_pair(p)?;
    char_numbers(&g.complex, &g.fundamental, classes, monomials)
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub dim: usize,
    pub betti: Vec<usize>,
    pub cobetti: Vec<usize>,
    pub symmetric: bool,
    /// Rank of α ↦ [K] ∩ α from q-cocycles to H_{n−q}.
    pub cap_ranks: Vec<usize>,
    pub passed: bool,
}

pub fn poincare_duality_check(k: &AbsoluteComplex) -> Result<DualityReport> {
    let n = k.dim().ok_or_else(|| Error::InvalidComplex("empty complex".into()))?;
    let z = fundamental_cycle(k, n)?;
    let betti: Vec<usize> = (0..=n).map(|q_deg| betti_number(k, q_deg)).collect();
    let d_rank = |q_deg: usize| coboundary_matrix(k, q_deg).rank();
    let cobetti: Vec<usize> = (0..=n)
        .map(|q_deg| k.count(q_deg) - d_rank(q_deg) - if q_deg > 0 { d_rank(q_deg - 1) } else { 0 })
        .collect();
    let symmetric = (0..=n).all(|q_deg| cobetti[q_deg] == betti[n - q_deg]);
    let mut cap_ranks = Vec::new();
    for q_deg in 0..=n {
        let cocycles: Vec<Vec<Q>> = if q_deg == n {
            (0..k.count(n)).map(|i| unit_vec(k.count(n), i)).collect()
        } else {
            coboundary_matrix(k, q_deg).to_qmatrix().kernel()
        };
        let target = n - q_deg;
        let bnd = boundary_matrix(k, target);
        let mut vecs: Vec<_> = (0..bnd.ncols()).map(|j| integerize(bnd.column(j))).collect();
        let base = sparse_rank(&vecs);
        for a in &cocycles {
            let c = cap_values(k, &z, q_deg, a)?;
            let sparse: Vec<(usize, Q)> = c.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect();
            vecs.push(integerize(&sparse));
        }
        cap_ranks.push(sparse_rank(&vecs) - base);
    }
    let passed = symmetric && cap_ranks == cobetti;
    Ok(DualityReport { dim: n, betti, cobetti, symmetric, cap_ranks, passed })
}

fn unit_vec(n: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = Q::one();
    v
}

/// Invariants requested for one pair: classes on its glued complex and the
/// monomials to evaluate.
#[derive(Clone, Debug, Default)]
pub struct InvariantRequest {
    pub classes: Vec<CocycleClass>,
    pub monomials: Vec<Vec<(usize, usize)>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairInvariants {
    pub signature: Option<i64>,
    pub numbers: Vec<CharNumber>,
}

pub const DISTINGUISHED: &str = "distinguished";
pub const NOT_DISTINGUISHED: &str = "not distinguished by supplied invariants";
pub const CONSISTENT: &str = "consistent with bordance";

#[derive(Clone, Debug, Serialize)]
pub struct BordismReport {
    pub a: PairInvariants,
    pub b: PairInvariants,
    /// Names of the invariants that differ.
    pub differing: Vec<String>,
    pub verdict: String,
    /// Set when nothing differs: equal invariants are necessary for
    /// bordance, never sufficient here.
    pub note: Option<String>,
}

fn same_core(a: &AbsoluteComplex, b: &AbsoluteComplex) -> bool {
    a.num_cells() == b.num_cells()
        && (0..a.num_cells()).all(|c| {
            let Some(d) = b.index_of(a.id(c)) else { return false };
            a.cell(c).dim == b.cell(d).dim
                && a.boundary(c).len() == b.boundary(d).len()
                && a.boundary(c).iter().all(|&(f, e)| b.index_of(a.id(f)).is_some_and(|g| b.incidence(g, d) == e))
        })
}

fn invariants(p: &ManifoldPairDescription, req: &InvariantRequest) -> Result<PairInvariants> {
    let g = glue_pair(p)?;
    let signature = if g.dim % 4 == 0 {
        Some(intersection_form_with(&g.complex, &g.fundamental)?.signature)
    } else {
        None
    };
    let numbers = char_numbers(&g.complex, &g.fundamental, &req.classes, &req.monomials)?;
    Ok(PairInvariants { signature, numbers })
}

/// Compares two pairs over the same reference core. Differing invariants
/// certify that the pairs are not bordant; equal ones decide nothing.
pub fn cs_bordism_compare(
    a: &ManifoldPairDescription,
    a_req: &InvariantRequest,
    b: &ManifoldPairDescription,
    b_req: &InvariantRequest,
) -> Result<BordismReport> {
    if !same_core(&a.core0, &b.core0) {
        return Err(Error::InvalidArgument("incompatible reference cores".into()));
    }
    if a_req.monomials != b_req.monomials {
        return Err(Error::InvalidArgument("both pairs must request the same monomials".into()));
    }
    let ia = invariants(a, a_req)?;
    let ib = invariants(b, b_req)?;
    let mut differing = Vec::new();
    if ia.signature != ib.signature {
        differing.push("signature".to_string());
    }
    for (x, y) in ia.numbers.iter().zip(&ib.numbers) {
        if x.value != y.value {
            differing.push(format!("monomial {:?}", x.monomial));
        }
    }
    let distinguished = !differing.is_empty();
    Ok(BordismReport {
        a: ia,
        b: ib,
        differing,
        verdict: if distinguished { DISTINGUISHED } else { NOT_DISTINGUISHED }.into(),
        note: (!distinguished).then(|| CONSISTENT.into()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn boundary_zero(k: &AbsoluteComplex, z: &SparseChain<Q>) -> bool {
        boundary_matrix(k, z.degree - 1).apply(&to_dense(z, k.count(z.degree))).iter().all(|x| x.is_zero())
    }

    #[test]
    fn fundamental_cycles() {
        let k = fixtures::octahedron();
        let z = fundamental_cycle(&k, 2).unwrap();
        assert_eq!(z.coeffs.len(), 8);
        assert!(boundary_zero(&k, &z));
        let neg = fundamental_cycle_seeded(&k, 2, -1).unwrap();
        assert!(z.coeffs.iter().all(|(i, x)| neg.coeffs[i] == -x.clone()));
        assert!(matches!(fundamental_cycle(&fixtures::rp2(), 2), Err(Error::NonOrientable)));
        assert!(matches!(fundamental_cycle(&fixtures::triangle(), 2), Err(Error::NotPseudomanifold(_))));
    }

    #[test]
    fn unit_is_neutral_for_cup() {
        let k = fixtures::torus();
        let basis = homology_basis(&k, 1);
        let alphas = dual_cocycles(&k, 1, &basis).unwrap();
        let a = CocycleClass::new(&k, 1, alphas[0].clone(), Ring::Rational).unwrap();
        let u = CocycleClass::unit(&k, Ring::Rational);
        assert_eq!(cup_product(&k, &u, &a).unwrap().values(&k), a.values(&k));
        assert!(matches!(
            cup_product(&k, &u, &CocycleClass::unit(&k, Ring::Mod2)),
            Err(Error::RingMismatch)
        ));
    }

    #[test]
    fn torus_cup_pairing() {
        let k = fixtures::torus();
        let z = fundamental_cycle(&k, 2).unwrap();
        let basis = homology_basis(&k, 1);
        assert_eq!(basis.len(), 2);
        let al = dual_cocycles(&k, 1, &basis).unwrap();
        let v = evaluate(&cup_values(&k, 1, &al[0], 1, &al[1]).unwrap(), &z);
        assert_eq!(v.abs(), q(1));
        let w = evaluate(&cup_values(&k, 1, &al[1], 1, &al[0]).unwrap(), &z);
        assert_eq!(w, -v);
    }

    #[test]
    fn non_cocycles_are_rejected() {
        let k = fixtures::circle3();
        let mut v = vec![Q::zero(); 3];
        v[0] = q(1);
        assert!(matches!(CocycleClass::new(&k, 0, v, Ring::Rational), Err(Error::NotCocycle(_))));
    }

    #[test]
    fn spheres_and_cp2_signatures() {
        let s4 = intersection_form(&fixtures::sphere(4)).unwrap();
        assert!(s4.matrix.is_empty());
        assert_eq!(s4.signature, 0);
        let cp2 = fixtures::cp2();
        let f = intersection_form(&cp2).unwrap();
        assert_eq!(f.matrix.len(), 1);
        assert_eq!(f.signature.abs(), 1);
        let z = fundamental_cycle_oriented(&cp2, 4, &fixtures::CP2_ORIENTATION).unwrap();
        let canonical = intersection_form_with(&cp2, &z).unwrap();
        assert_eq!(canonical.signature, 1);
        assert!(canonical.matrix[0][0] > Q::zero());
        let z = fundamental_cycle_seeded(&cp2, 4, -1).unwrap();
        assert_eq!(intersection_form_with(&cp2, &z).unwrap().signature, -f.signature);
        assert!(intersection_form(&fixtures::torus()).is_err());
    }

    #[test]
    fn two_discs_make_a_sphere() {
        let p = ManifoldPairDescription {
            core1: fixtures::cone_disc(),
            core0: fixtures::triangle(),
            identification: ManifoldPairDescription::identity_identification(&fixtures::cone_disc(), &fixtures::triangle()),
            orientation: None,
        };
        let g = glue_pair(&p).unwrap();
        assert_eq!(crate::hodge::betti_numbers(&g.complex), vec![1, 0, 1]);
        assert!(boundary_zero(&g.complex, &g.fundamental));
        let mut broken = p.clone();
        broken.identification.retain(|(a, _)| a != "0,1");
        match glue_pair(&broken) {
            Err(Error::BoundaryMismatch(cells)) => assert!(cells.iter().any(|c| c.contains("0,1"))),
            other => panic!("expected boundary mismatch, got {other:?}"),
        }
    }

    #[test]
    fn cp2_pair_signature_and_swap() {
        let p = fixtures::cp2_pair();
        assert_eq!(pair_signature(&p).unwrap().signature, 1);
        assert_eq!(pair_signature(&p.swapped().unwrap()).unwrap().signature, -1);
        assert_eq!(pair_signature(&fixtures::cp2_reference_double()).unwrap().signature, 0);
    }

    #[test]
    fn duality_on_fixtures() {
        let r = poincare_duality_check(&fixtures::octahedron()).unwrap();
        assert_eq!(r.betti, vec![1, 0, 1]);
        assert_eq!(r.cap_ranks, vec![1, 0, 1]);
        assert!(r.passed);
        let r = poincare_duality_check(&fixtures::torus()).unwrap();
        assert_eq!(r.cap_ranks, vec![1, 2, 1]);
        assert!(r.passed);
    }

    #[test]
    fn char_numbers_on_cp2_pair() {
        let p = fixtures::cp2_pair();
        let g = glue_pair(&p).unwrap();
        let k = &g.complex;
        let zero = CocycleClass::new(k, 2, vec![Q::zero(); k.count(2)], Ring::Rational).unwrap();
        let nums = pair_char_numbers(&p, &[zero], &[vec![(0, 2)]]).unwrap();
        assert_eq!(nums[0].value, Q::zero());
        // a 4-cocycle evaluating to 3 on the fundamental cycle
        let mut top = vec![Q::zero(); k.count(4)];
        let (&i, c) = g.fundamental.coeffs.iter().next().unwrap();
        top[i] = q(3) * c;
        let cls = CocycleClass::new(k, 4, top, Ring::Rational).unwrap();
        assert_eq!(pair_char_numbers(&p, &[cls], &[vec![(0, 1)]]).unwrap()[0].value, q(3));
        // mod-2 reduction of the middle dual class squares to 1
        let basis = homology_basis(k, 2);
        let alpha = dual_cocycles(k, 2, &basis).unwrap().remove(0);
        let w = CocycleClass::new(k, 2, alpha.into_iter().map(|x| x * Q::from_integer(1.into())).collect(), Ring::Mod2);
        let w = w.unwrap();
        assert_eq!(pair_char_numbers(&p, &[w], &[vec![(0, 2)]]).unwrap()[0].value, q(1));
        assert!(matches!(
            pair_char_numbers(&p, &[CocycleClass::unit(k, Ring::Rational)], &[vec![(0, 1)]]),
            Err(Error::DegreeMismatch(_))
        ));
    }

    #[test]
    fn bordism_verdicts() {
        let a = fixtures::cp2_pair();
        let b = fixtures::cp2_reference_double();
        let none = InvariantRequest::default();
        assert_eq!(cs_bordism_compare(&a, &none, &b, &none).unwrap().verdict, DISTINGUISHED);
        let same = cs_bordism_compare(&a, &none, &a, &none).unwrap();
        assert_eq!(same.verdict, NOT_DISTINGUISHED);
        assert_eq!(same.note.as_deref(), Some(CONSISTENT));
        let other = ManifoldPairDescription { core0: fixtures::triangle(), ..a.clone() };
        assert!(cs_bordism_compare(&a, &none, &other, &none).is_err());
    }
}
