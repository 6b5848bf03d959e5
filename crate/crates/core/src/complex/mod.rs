//! Absolute complexes: cells with a dimension, a face relation and integer
//! incidence numbers.
//!
//! Simplicial complexes (and the ordered simplicial cell complexes produced by
//! gluing) additionally carry an ascending vertex tuple per cell together with
//! the list of faces obtained by omitting each vertex in turn.

mod geometry;

pub use geometry::{fullness, uniformity_check, GeometricComplex, UniformityReport, UniformityWitness};

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};

/// A single cell: opaque id and explicit dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub id: String,
    pub dim: usize,
    /// Ascending vertex labels, for simplicial-type cells.
    pub vertices: Option<Vec<u32>>,
}

/// Canonical id of a simplex with the given ascending vertices.
pub fn simplex_id(vertices: &[u32]) -> String {
    vertices.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Clone, Debug)]
pub struct AbsoluteComplex {
    cells: Vec<Cell>,
    by_dim: Vec<Vec<usize>>,
    pos: Vec<usize>,
    index: HashMap<String, usize>,
    /// Codimension-one faces with incidence numbers (zero allowed when a
    /// face relation is declared without incidence).
    boundary: Vec<Vec<(usize, i64)>>,
    coboundary: Vec<Vec<(usize, i64)>>,
    /// Declared relations of codimension two or more.
    extra_faces: Vec<Vec<usize>>,
    /// `ordered_faces[c][i]` is the face of `c` omitting its `i`-th vertex.
    ordered_faces: Option<Vec<Vec<usize>>>,
}

/// Input cell for the delta-complex constructor: id, vertex tuple, and the
/// global indices of its faces in omit-vertex order.
#[derive(Clone, Debug)]
pub(crate) struct DeltaCell {
    pub id: String,
    pub vertices: Vec<u32>,
    pub faces: Vec<usize>,
}

impl AbsoluteComplex {
    /// An ordered simplicial cell complex. Cells must be listed so that faces
    /// precede cofaces; incidence of face `i` is `(-1)^i`.
    pub(crate) fn from_delta(cells: Vec<DeltaCell>) -> Result<Self> {
        let mut builder = Builder::default();
        let mut ordered = Vec::with_capacity(cells.len());
        for (gi, c) in cells.iter().enumerate() {
            let dim = c.vertices.len() - 1;
            if dim > 0 && c.faces.len() != c.vertices.len() {
                return Err(Error::InvalidComplex(format!("cell {} has wrong face count", c.id)));
            }
            builder.push(Cell { id: c.id.clone(), dim, vertices: Some(c.vertices.clone()) })?;
            for (i, &f) in c.faces.iter().enumerate() {
                if f >= gi {
                    return Err(Error::InvalidComplex(format!("face of {} listed after it", c.id)));
                }
                builder.relations.push((f, gi, if i % 2 == 0 { 1 } else { -1 }));
            }
            ordered.push(c.faces.clone());
        }
        let mut k = builder.finish()?;
        k.ordered_faces = Some(ordered);
        Ok(k)
    }

    /// A general absolute complex from cells and `(face, coface, incidence)`
    /// triples. Nonzero incidence requires a dimension jump of exactly one;
    /// zero incidence only declares the face relation.
    pub fn from_cells(cells: Vec<(String, usize)>, incidences: Vec<(String, String, i64)>) -> Result<Self> {
        let mut builder = Builder::default();
        for (id, dim) in cells {
            builder.push(Cell { id, dim, vertices: None })?;
        }
        for (f, c, e) in incidences {
            let fi = *builder
                .index
                .get(&f)
                .ok_or_else(|| Error::InvalidComplex(format!("unknown cell {f}")))?;
            let ci = *builder
                .index
                .get(&c)
                .ok_or_else(|| Error::InvalidComplex(format!("unknown cell {c}")))?;
            let (df, dc) = (builder.cells[fi].dim, builder.cells[ci].dim);
            if dc <= df {
                return Err(Error::InvalidComplex(format!("dimension not monotone along {f} < {c}")));
            }
            if e != 0 && dc != df + 1 {
                return Err(Error::InvalidComplex(format!(
                    "nonzero incidence between {f} and {c} whose dimensions differ by {}",
                    dc - df
                )));
            }
            builder.relations.push((fi, ci, e));
        }
        builder.finish()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Top dimension, `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.by_dim.len().checked_sub(1)
    }

    pub fn cell(&self, c: usize) -> &Cell {
        &self.cells[c]
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn id(&self, c: usize) -> &str {
        &self.cells[c].id
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Global indices of the `q`-cells, in canonical order.
    pub fn cells_of_dim(&self, q: usize) -> &[usize] {
        self.by_dim.get(q).map_or(&[], |v| v.as_slice())
    }

    pub fn count(&self, q: usize) -> usize {
        self.cells_of_dim(q).len()
    }

    /// Position of a cell among the cells of its dimension.
    pub fn position(&self, c: usize) -> usize {
        self.pos[c]
    }

    /// Global index of the `i`-th cell of dimension `q`.
    pub fn global(&self, q: usize, i: usize) -> usize {
        self.by_dim[q][i]
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.by_dim.iter().map(|v| v.len()).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.by_dim
            .iter()
            .enumerate()
            .map(|(q, v)| if q % 2 == 0 { v.len() as i64 } else { -(v.len() as i64) })
            .sum()
    }

    /// Codimension-one faces with their incidence numbers.
    pub fn boundary(&self, c: usize) -> &[(usize, i64)] {
        &self.boundary[c]
    }

    /// Codimension-one cofaces with their incidence numbers.
    pub fn coboundary(&self, c: usize) -> &[(usize, i64)] {
        &self.coboundary[c]
    }

    /// Incidence number ε(face, coface); zero when not incident.
    pub fn incidence(&self, face: usize, coface: usize) -> i64 {
        self.boundary[coface]
            .iter()
            .find(|(f, _)| *f == face)
            .map_or(0, |(_, e)| *e)
    }

    /// True when every cell carries a vertex tuple and ordered faces.
    pub fn is_simplicial(&self) -> bool {
        self.ordered_faces.is_some()
    }

    pub fn vertices(&self, c: usize) -> Option<&[u32]> {
        self.cells[c].vertices.as_deref()
    }

    /// Face of `c` omitting its `i`-th vertex.
    pub fn face(&self, c: usize, i: usize) -> Option<usize> {
        self.ordered_faces.as_ref().and_then(|f| f[c].get(i).copied())
    }

    /// Front `k`-face: the face spanned by the first `k + 1` vertices.
    pub fn front_face(&self, c: usize, k: usize) -> Option<usize> {
        let mut cur = c;
        while self.cells[cur].dim > k {
            let d = self.cells[cur].dim;
            cur = self.face(cur, d)?;
        }
        Some(cur)
    }

    /// Back `k`-face: the face spanned by the last `k + 1` vertices.
    pub fn back_face(&self, c: usize, k: usize) -> Option<usize> {
        let mut cur = c;
        while self.cells[cur].dim > k {
            cur = self.face(cur, 0)?;
        }
        Some(cur)
    }

    /// All cells `x <= c` (including `c`), i.e. the closure of `c`.
    pub fn closure(&self, c: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([c]);
        while let Some(x) = queue.pop_front() {
            if !seen.insert(x) {
                continue;
            }
            for (f, _) in &self.boundary[x] {
                queue.push_back(*f);
            }
            for f in &self.extra_faces[x] {
                queue.push_back(*f);
            }
        }
        seen
    }

    /// Strict face relation `x < y` (transitive closure of the stored data).
    pub fn is_face(&self, x: usize, y: usize) -> bool {
        x != y && self.cells[x].dim < self.cells[y].dim && self.closure(y).contains(&x)
    }

    /// The 0-cells in the closure of `c`.
    pub fn vertex_cells(&self, c: usize) -> Vec<usize> {
        self.closure(c).into_iter().filter(|&x| self.cells[x].dim == 0).collect()
    }

    /// Number of `(q+1)`-cofaces of each `q`-cell, maximised: I_q(K).
    pub fn ulf_degree(&self, q: usize) -> usize {
        self.cells_of_dim(q)
            .iter()
            .map(|&c| self.coboundary[c].len())
            .max()
            .unwrap_or(0)
    }

    /// Relabel vertices of a simplicial complex by `map`. Returns the new
    /// complex and, for every old cell, its new index together with the sign
    /// relating the old orientation to the new ascending orientation.
    pub fn relabel(&self, map: &HashMap<u32, u32>) -> Result<(AbsoluteComplex, Vec<(usize, i64)>)> {
        if !self.is_simplicial() {
            return Err(Error::InvalidComplex("relabel needs a simplicial complex".into()));
        }
        let facets: Vec<Vec<u32>> = self
            .cells
            .iter()
            .map(|c| {
                c.vertices
                    .as_ref()
                    .unwrap()
                    .iter()
                    .map(|v| map.get(v).copied().ok_or_else(|| Error::InvalidArgument(format!("vertex {v} not relabeled"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let k = build_simplicial(&facets)?;
        if k.num_cells() != self.num_cells() {
            return Err(Error::InvalidArgument("relabeling is not injective".into()));
        }
        let transport = facets
            .iter()
            .map(|tuple| {
                let (sorted, sign) = sort_with_sign(tuple);
                (k.index_of(&simplex_id(&sorted)).unwrap(), sign)
            })
            .collect();
        Ok((k, transport))
    }
}

/// Sorts a tuple of distinct labels, returning the permutation sign.
pub fn sort_with_sign(tuple: &[u32]) -> (Vec<u32>, i64) {
    let mut v = tuple.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    (v, sign)
}

#[derive(Default)]
struct Builder {
    cells: Vec<Cell>,
    index: HashMap<String, usize>,
    relations: Vec<(usize, usize, i64)>,
}

impl Builder {
    fn push(&mut self, cell: Cell) -> Result<()> {
        if self.index.insert(cell.id.clone(), self.cells.len()).is_some() {
            return Err(Error::InvalidComplex(format!("duplicate cell id {}", cell.id)));
        }
        self.cells.push(cell);
        Ok(())
    }

    fn finish(self) -> Result<AbsoluteComplex> {
        let n = self.cells.len();
        let mut boundary = vec![Vec::new(); n];
        let mut coboundary = vec![Vec::new(); n];
        let mut extra_faces = vec![Vec::new(); n];
        let mut seen = HashMap::new();
        for (f, c, e) in self.relations {
            if let Some(prev) = seen.insert((f, c), e) {
                if prev != e {
                    return Err(Error::InvalidComplex(format!(
                        "conflicting incidence for {} < {}",
                        self.cells[f].id, self.cells[c].id
                    )));
                }
                continue;
            }
            if self.cells[c].dim == self.cells[f].dim + 1 {
                boundary[c].push((f, e));
                coboundary[f].push((c, e));
            } else {
                extra_faces[c].push(f);
            }
        }
        let max_dim = self.cells.iter().map(|c| c.dim + 1).max().unwrap_or(0);
        let mut by_dim = vec![Vec::new(); max_dim];
        for (i, c) in self.cells.iter().enumerate() {
            by_dim[c.dim].push(i);
        }
        let mut pos = vec![0; n];
        for v in &by_dim {
            for (p, &c) in v.iter().enumerate() {
                pos[c] = p;
            }
        }
        for b in boundary.iter_mut().chain(coboundary.iter_mut()) {
            b.sort_unstable();
        }
        Ok(AbsoluteComplex {
            cells: self.cells,
            by_dim,
            pos,
            index: self.index,
            boundary,
            coboundary,
            extra_faces,
            ordered_faces: None,
        })
    }
}

/// Builds the simplicial complex generated by `facets`. Every simplex is
/// oriented by ascending vertex label and `[τ:σ] = (-1)^i` when `σ` omits the
/// `i`-th vertex of `τ`.
pub fn build_simplicial(facets: &[Vec<u32>]) -> Result<AbsoluteComplex> {
    let mut all: BTreeSet<(usize, Vec<u32>)> = BTreeSet::new();
    for f in facets {
        let mut s = f.clone();
        s.sort_unstable();
        if let Some(w) = s.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateVertex { vertex: w[0], facet: f.clone() });
        }
        if s.is_empty() {
            continue;
        }
        // every nonempty subset
        let k = s.len();
        for mask in 1u64..(1u64 << k) {
            let sub: Vec<u32> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| s[i]).collect();
            all.insert((sub.len(), sub));
        }
    }
    let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut cells = Vec::with_capacity(all.len());
    for (gi, (_, verts)) in all.into_iter().enumerate() {
        let faces = if verts.len() > 1 {
            (0..verts.len())
                .map(|i| {
                    let mut f = verts.clone();
                    f.remove(i);
                    index[&f]
                })
                .collect()
        } else {
            Vec::new()
        };
        index.insert(verts.clone(), gi);
        cells.push(DeltaCell { id: simplex_id(&verts), vertices: verts, faces });
    }
    AbsoluteComplex::from_delta(cells)
}

/// Outcome of checking Σ_z ε(x,z)ε(z,y) = 0 on every codimension-two pair.
#[derive(Clone, Debug, Serialize)]
pub struct IncidenceReport {
    pub pairs_checked: usize,
    /// Offending `(x, y, sum)` triples by cell id.
    pub failures: Vec<(String, String, i64)>,
}

impl IncidenceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn validate_incidence(k: &AbsoluteComplex) -> IncidenceReport {
    let mut pairs_checked = 0;
    let mut failures = Vec::new();
    for y in 0..k.num_cells() {
        let mut sums: BTreeMap<usize, i64> = BTreeMap::new();
        for &(z, e_zy) in k.boundary(y) {
            for &(x, e_xz) in k.boundary(z) {
                *sums.entry(x).or_default() += e_xz * e_zy;
            }
        }
        pairs_checked += sums.len();
        for (x, s) in sums {
            if s != 0 {
                failures.push((k.id(x).to_string(), k.id(y).to_string(), s));
            }
        }
    }
    IncidenceReport { pairs_checked, failures }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_vectors_of_small_complexes() {
        let c3 = build_simplicial(&[vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap();
        assert_eq!(c3.f_vector(), vec![3, 3]);
        let tri = build_simplicial(&[vec![0, 1, 2]]).unwrap();
        assert_eq!(tri.f_vector(), vec![3, 3, 1]);
        assert!(matches!(build_simplicial(&[vec![0, 0, 1]]), Err(Error::DuplicateVertex { vertex: 0, .. })));
    }

    #[test]
    fn simplicial_signs() {
        let tri = build_simplicial(&[vec![0, 1, 2]]).unwrap();
        let t = tri.index_of("0,1,2").unwrap();
        let e12 = tri.index_of("1,2").unwrap();
        let e02 = tri.index_of("0,2").unwrap();
        let e01 = tri.index_of("0,1").unwrap();
        assert_eq!(tri.incidence(e12, t), 1);
        assert_eq!(tri.incidence(e02, t), -1);
        assert_eq!(tri.incidence(e01, t), 1);
        assert_eq!(tri.front_face(t, 1), Some(e01));
        assert_eq!(tri.back_face(t, 1), Some(e12));
        assert!(validate_incidence(&tri).passed());
    }

    #[test]
    fn flipped_sign_is_reported() {
        let cells = vec![
            ("a".into(), 0),
            ("b".into(), 0),
            ("c".into(), 0),
            ("ab".into(), 1),
            ("bc".into(), 1),
            ("ac".into(), 1),
            ("t".into(), 2),
        ];
        let mut inc: Vec<(String, String, i64)> = vec![
            ("a".into(), "ab".into(), -1),
            ("b".into(), "ab".into(), 1),
            ("b".into(), "bc".into(), -1),
            ("c".into(), "bc".into(), 1),
            ("a".into(), "ac".into(), -1),
            ("c".into(), "ac".into(), 1),
            ("bc".into(), "t".into(), 1),
            ("ac".into(), "t".into(), -1),
            ("ab".into(), "t".into(), 1),
        ];
        let ok = AbsoluteComplex::from_cells(cells.clone(), inc.clone()).unwrap();
        assert!(validate_incidence(&ok).passed());
        inc[6].2 = -1;
        let bad = AbsoluteComplex::from_cells(cells, inc).unwrap();
        let rep = validate_incidence(&bad);
        assert!(!rep.passed());
        assert!(rep.failures.iter().any(|(x, y, _)| y == "t" && (x == "b" || x == "c")));
    }

    #[test]
    fn ulf_degree_counts_cofaces() {
        let tri = build_simplicial(&[vec![0, 1, 2]]).unwrap();
        assert_eq!(tri.ulf_degree(1), 1);
        let c3 = build_simplicial(&[vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap();
        assert_eq!(c3.ulf_degree(0), 2);
        assert_eq!(c3.ulf_degree(5), 0);
    }

    #[test]
    fn general_cells_reject_bad_dimension_jumps() {
        let r = AbsoluteComplex::from_cells(
            vec![("v".into(), 0), ("f".into(), 2)],
            vec![("v".into(), "f".into(), 1)],
        );
        assert!(r.is_err());
        let ok = AbsoluteComplex::from_cells(
            vec![("v".into(), 0), ("f".into(), 2)],
            vec![("v".into(), "f".into(), 0)],
        )
        .unwrap();
        assert!(ok.is_face(0, 1));
        assert_eq!(ok.ulf_degree(0), 0);
    }

    #[test]
    fn relabel_tracks_orientation() {
        let e = build_simplicial(&[vec![0, 1]]).unwrap();
        let map = HashMap::from([(0, 5), (1, 2)]);
        let (k, t) = e.relabel(&map).unwrap();
        let edge = e.index_of("0,1").unwrap();
        assert_eq!(t[edge], (k.index_of("2,5").unwrap(), -1));
    }
}
