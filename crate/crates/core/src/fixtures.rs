//! Standard small triangulations used by the tests, the acceptance suite and
//! the CLI's built-in families.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::complex::{build_simplicial, AbsoluteComplex, GeometricComplex};
use crate::duality::ManifoldPairDescription;

fn build(facets: &[Vec<u32>]) -> AbsoluteComplex {
    build_simplicial(facets).expect("fixture facets are valid")
}

pub fn point() -> AbsoluteComplex {
    build(&[vec![0]])
}

pub fn edge() -> AbsoluteComplex {
    build(&[vec![0, 1]])
}

/// Cycle graph on `n ≥ 3` vertices.
pub fn cycle(n: u32) -> AbsoluteComplex {
    build(&(0..n).map(|i| vec![i, (i + 1) % n]).collect::<Vec<_>>())
}

pub fn circle3() -> AbsoluteComplex {
    cycle(3)
}

pub fn triangle() -> AbsoluteComplex {
    build(&[vec![0, 1, 2]])
}

/// Cone with apex 3 over the circle C₃: a contractible 2-disc.
pub fn cone_disc() -> AbsoluteComplex {
    build(&[vec![0, 1, 3], vec![1, 2, 3], vec![0, 2, 3]])
}

/// Facets of the octahedral 2-sphere: one vertex from each antipodal pair.
pub fn octahedron_facets() -> Vec<Vec<u32>> {
    let mut f = Vec::new();
    for a in [0, 1] {
        for b in [2, 3] {
            for c in [4, 5] {
                f.push(vec![a, b, c]);
            }
        }
    }
    f
}

pub fn octahedron() -> AbsoluteComplex {
    build(&octahedron_facets())
}

/// 6-vertex real projective plane.
pub fn rp2() -> AbsoluteComplex {
    build(&[
        vec![1, 2, 3],
        vec![1, 3, 4],
        vec![1, 4, 5],
        vec![1, 5, 6],
        vec![1, 2, 6],
        vec![2, 3, 5],
        vec![2, 4, 5],
        vec![2, 4, 6],
        vec![3, 4, 6],
        vec![3, 5, 6],
    ])
}

/// 7-vertex Császár (Möbius) torus.
pub fn torus() -> AbsoluteComplex {
    let mut f = Vec::new();
    for i in 0..7u32 {
        f.push(vec![i, (i + 1) % 7, (i + 3) % 7]);
        f.push(vec![i, (i + 2) % 7, (i + 3) % 7]);
    }
    build(&f)
}

/// Facets of Kühnel's 9-vertex complex projective plane.
pub fn cp2_facets() -> Vec<Vec<u32>> {
    [
        [1, 2, 3, 4, 5], [1, 2, 3, 4, 7], [1, 2, 3, 5, 8], [1, 2, 3, 7, 8], [1, 2, 4, 5, 6],
        [1, 2, 4, 6, 7], [1, 2, 5, 6, 8], [1, 2, 6, 7, 9], [1, 2, 6, 8, 9], [1, 2, 7, 8, 9],
        [1, 3, 4, 5, 9], [1, 3, 4, 7, 8], [1, 3, 4, 8, 9], [1, 3, 5, 6, 8], [1, 3, 5, 6, 9],
        [1, 3, 6, 8, 9], [1, 4, 5, 6, 7], [1, 4, 5, 7, 9], [1, 4, 7, 8, 9], [1, 5, 6, 7, 9],
        [2, 3, 4, 5, 9], [2, 3, 4, 6, 7], [2, 3, 4, 6, 9], [2, 3, 5, 7, 8], [2, 3, 5, 7, 9],
        [2, 3, 6, 7, 9], [2, 4, 5, 6, 8], [2, 4, 5, 8, 9], [2, 4, 6, 8, 9], [2, 5, 7, 8, 9],
        [3, 4, 6, 7, 8], [3, 4, 6, 8, 9], [3, 5, 6, 7, 8], [3, 5, 6, 7, 9], [4, 5, 6, 7, 8],
        [4, 5, 7, 8, 9],
    ]
    .iter()
    .map(|f| f.to_vec())
    .collect()
}

/// Ordered top cell of [`cp2`] giving the orientation in which the square of
/// a generator of H² evaluates positively.
pub const CP2_ORIENTATION: [u32; 5] = [2, 1, 3, 4, 5];

pub fn cp2() -> AbsoluteComplex {
    build(&cp2_facets())
}

/// Boundary of the `(n+1)`-simplex: the `(n+2)`-vertex `n`-sphere.
pub fn sphere(n: u32) -> AbsoluteComplex {
    let verts: Vec<u32> = (0..n + 2).collect();
    let facets: Vec<Vec<u32>> = (0..verts.len())
        .map(|skip| verts.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, v)| *v).collect())
        .collect();
    build(&facets)
}

/// Facets of the ball obtained by deleting the open star of `v` from a
/// closed combinatorial manifold given by `facets`.
pub fn delete_star(facets: &[Vec<u32>], v: u32) -> Vec<Vec<u32>> {
    facets.iter().filter(|f| !f.contains(&v)).cloned().collect()
}

/// Facets of the closed star of `v`, with `v` relabeled to `apex`.
pub fn star_as_cone(facets: &[Vec<u32>], v: u32, apex: u32) -> Vec<Vec<u32>> {
    facets
        .iter()
        .filter(|f| f.contains(&v))
        .map(|f| f.iter().map(|&x| if x == v { apex } else { x }).collect())
        .collect()
}

/// Triangulated cylinder S¹_m × [0, n]: vertex `(i, j)` has label `j·m + i`,
/// so the complexes for increasing `n` are nested with stable ids.
pub fn cylinder_facets(m: u32, n: u32) -> Vec<Vec<u32>> {
    let v = |i: u32, j: u32| j * m + (i % m);
    let mut f = Vec::new();
    for j in 0..n {
        for i in 0..m {
            f.push(vec![v(i, j), v(i + 1, j), v(i + 1, j + 1)]);
            f.push(vec![v(i, j), v(i, j + 1), v(i + 1, j + 1)]);
        }
    }
    f
}

pub fn cylinder(m: u32, n: u32) -> AbsoluteComplex {
    build(&cylinder_facets(m, n))
}

/// `n` disjoint filled triangles, copy `k` on vertices `3k..3k+2`.
pub fn disjoint_triangles(n: u32) -> AbsoluteComplex {
    build(&(0..n).map(|k| vec![3 * k, 3 * k + 1, 3 * k + 2]).collect::<Vec<_>>())
}

/// Patch of the equilateral triangular lattice with unit edges: `cols × rows`
/// rhombi, each split into an up and a down triangle.
pub fn equilateral_patch(cols: u32, rows: u32) -> GeometricComplex {
    let h = 3f64.sqrt() / 2.0;
    let label = |i: u32, j: u32| j * (cols + 1) + i;
    let mut coords = HashMap::new();
    for j in 0..=rows {
        for i in 0..=cols {
            coords.insert(label(i, j), vec![i as f64 + 0.5 * j as f64, h * j as f64]);
        }
    }
    let mut f = Vec::new();
    for j in 0..rows {
        for i in 0..cols {
            f.push(vec![label(i, j), label(i + 1, j), label(i, j + 1)]);
            f.push(vec![label(i + 1, j), label(i + 1, j + 1), label(i, j + 1)]);
        }
    }
    GeometricComplex::new(build(&f), coords).expect("lattice coordinates are complete")
}

/// Random simplicial complex with at most `max_cells` cells, generated from
/// random facets of dimension ≤ 3 on a small vertex set.
pub fn random_simplicial(seed: u64, max_cells: usize) -> AbsoluteComplex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nverts: u32 = rng.gen_range(3..=10);
    let mut facets: Vec<Vec<u32>> = Vec::new();
    let mut current = build(&[vec![0]]);
    for _ in 0..40 {
        let k = rng.gen_range(1..=4usize);
        let mut f: Vec<u32> = Vec::new();
        while f.len() < k.min(nverts as usize) {
            let v = rng.gen_range(0..nverts);
            if !f.contains(&v) {
                f.push(v);
            }
        }
        facets.push(f);
        let candidate = build(&facets);
        if candidate.num_cells() > max_cells {
            facets.pop();
            break;
        }
        current = candidate;
    }
    current
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_shapes() {
        assert_eq!(octahedron().f_vector(), vec![6, 12, 8]);
        assert_eq!(rp2().f_vector(), vec![6, 15, 10]);
        assert_eq!(torus().f_vector(), vec![7, 21, 14]);
        assert_eq!(cp2().f_vector(), vec![9, 36, 84, 90, 36]);
        assert_eq!(sphere(4).f_vector(), vec![6, 15, 20, 15, 6]);
        assert_eq!(cylinder(6, 4).f_vector(), vec![30, 78, 48]);
        assert_eq!(torus().euler_characteristic(), 0);
    }

    #[test]
    fn random_complexes_respect_cap() {
        for s in 0..20 {
            assert!(random_simplicial(s, 200).num_cells() <= 200);
        }
    }
}

/// CP² split at vertex 9: the complement of its open star against the star
/// itself as reference core, oriented so the glued signature is +1.
pub fn cp2_pair() -> ManifoldPairDescription {
    let core1 = build(&delete_star(&cp2_facets(), 9));
    let core0 = cp2_reference_core();
    let identification = ManifoldPairDescription::identity_identification(&core1, &core0);
    // the ascending first facet is negatively oriented for this sign
    let first = core1.cells_of_dim(4)[0];
    let mut orientation = core1.vertices(first).unwrap().to_vec();
    orientation.swap(0, 1);
    ManifoldPairDescription { core1, core0, identification, orientation: Some(orientation) }
}

/// The reference core of [`cp2_pair`]: the closed star of vertex 9.
pub fn cp2_reference_core() -> AbsoluteComplex {
    build(&star_as_cone(&cp2_facets(), 9, 9))
}

/// The reference core glued to a copy of itself: a 4-sphere.
pub fn cp2_reference_double() -> ManifoldPairDescription {
    let core = cp2_reference_core();
    let identification = ManifoldPairDescription::identity_identification(&core, &core);
    ManifoldPairDescription { core1: core.clone(), core0: core, identification, orientation: None }
}
