//! Half-space polytopes `{x : <x, n_j> <= k_j}` with primitive integer
//! conormals, their vertices, the Delzant condition, and chambers of
//! combinatorially equivalent offset vectors.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{dim_err, Error, Result};
use crate::exact::{
    self, dot, int_determinant, is_primitive, kernel_direction, rank, RatMatrix, RatVector,
    Rational,
};

/// All `size`-element subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < size - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if size <= n {
        go(0, n, size, &mut Vec::with_capacity(size), &mut out);
    }
    out
}

/// Dimension of the affine hull of a nonempty point set.
pub(crate) fn affine_rank(points: &[&RatVector]) -> usize {
    let Some((base, rest)) = points.split_first() else {
        return 0;
    };
    let diffs: Vec<RatVector> = rest
        .iter()
        .map(|p| p.iter().zip(base.iter()).map(|(a, b)| a - b).collect())
        .collect();
    rank(&diffs)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Vertex {
    #[serde(with = "exact::serde_rational::vec")]
    pub point: RatVector,
    /// Sorted indices of the facets whose equality holds at `point`.
    pub active: Vec<usize>,
}

/// A bounded, full-dimensional polytope in half-space form.
///
/// The vertex list is computed once at construction and is sorted
/// lexicographically by point.
#[derive(Clone, Debug)]
pub struct HalfSpaceSystem {
    dim: usize,
    conormals: Vec<Vec<BigInt>>,
    conormals_q: Vec<RatVector>,
    offsets: RatVector,
    vertices: Vec<Vertex>,
}

impl PartialEq for HalfSpaceSystem {
    fn eq(&self, other: &Self) -> bool {
        self.conormals == other.conormals && self.offsets == other.offsets
    }
}

impl Eq for HalfSpaceSystem {}

impl HalfSpaceSystem {
    pub fn new(conormals: Vec<Vec<BigInt>>, offsets: RatVector) -> Result<Self> {
        let m = conormals.len();
        let Some(n) = conormals.first().map(Vec::len) else {
            return dim_err("no facets");
        };
        if n == 0 {
            return dim_err("conormals must have positive dimension");
        }
        if conormals.iter().any(|c| c.len() != n) {
            return dim_err("conormals of differing dimension");
        }
        if offsets.len() != m {
            return dim_err(format!("{} offsets for {m} facets", offsets.len()));
        }
        if m < n + 1 {
            return Err(Error::Geometry(format!(
                "{m} facets cannot bound a polytope in dimension {n}"
            )));
        }
        for (j, c) in conormals.iter().enumerate() {
            if c.iter().all(Zero::is_zero) {
                return Err(Error::Domain(format!("conormal {j} is zero")));
            }
            if !is_primitive(c) {
                return Err(Error::Domain(format!("conormal {j} is not primitive")));
            }
        }
        let conormals_q: Vec<RatVector> = conormals
            .iter()
            .map(|c| exact::to_rational_vector(c))
            .collect();
        check_bounded(&conormals_q, n)?;
        let vertices = compute_vertices(&conormals_q, &offsets, n)?;
        if vertices.is_empty() {
            return Err(Error::Geometry("feasible set is empty".into()));
        }
        let pts: Vec<&RatVector> = vertices.iter().map(|v| &v.point).collect();
        if affine_rank(&pts) != n {
            return Err(Error::Geometry("polytope is not full-dimensional".into()));
        }
        Ok(Self {
            dim: n,
            conormals,
            conormals_q,
            offsets,
            vertices,
        })
    }

    /// Convenience constructor from small integer conormals.
    pub fn from_i64(conormals: &[Vec<i64>], offsets: RatVector) -> Result<Self> {
        Self::new(
            conormals.iter().map(|c| exact::int_vector(c)).collect(),
            offsets,
        )
    }

    /// Same conormals, new offsets.
    pub fn with_offsets(&self, offsets: RatVector) -> Result<Self> {
        Self::new(self.conormals.clone(), offsets)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facet_count(&self) -> usize {
        self.conormals.len()
    }

    pub fn conormals(&self) -> &[Vec<BigInt>] {
        &self.conormals
    }

    pub fn conormal_q(&self, j: usize) -> &RatVector {
        &self.conormals_q[j]
    }

    pub fn offsets(&self) -> &RatVector {
        &self.offsets
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Indices into [`Self::vertices`] of the vertices lying on facet `j`.
    pub fn facet_vertex_indices(&self, j: usize) -> Vec<usize> {
        self.vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| v.active.binary_search(&j).is_ok())
            .map(|(i, _)| i)
            .collect()
    }

    /// Whether facet `j` is a genuine `(n-1)`-dimensional face.
    pub fn facet_is_proper(&self, j: usize) -> bool {
        let idx = self.facet_vertex_indices(j);
        let pts: Vec<&RatVector> = idx.iter().map(|&i| &self.vertices[i].point).collect();
        !pts.is_empty() && affine_rank(&pts) == self.dim - 1
    }

    pub fn is_simple(&self) -> bool {
        self.vertices.iter().all(|v| v.active.len() == self.dim)
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.conormals_q
            .iter()
            .zip(&self.offsets)
            .all(|(c, k)| dot(c, x) <= *k)
    }

    pub fn contains_strictly(&self, x: &[Rational]) -> bool {
        self.conormals_q
            .iter()
            .zip(&self.offsets)
            .all(|(c, k)| dot(c, x) < *k)
    }

    /// Offsets after translating the polytope by `a`: `k'_i = k_i + <a, n_i>`.
    pub fn translate_offsets(&self, a: &[Rational]) -> Result<RatVector> {
        if a.len() != self.dim {
            return dim_err(format!("translation of length {} in dimension {}", a.len(), self.dim));
        }
        Ok(self
            .conormals_q
            .iter()
            .zip(&self.offsets)
            .map(|(c, k)| k + dot(c, a))
            .collect())
    }

    /// The system with offsets scaled by `s` (the dilate `s * polytope`).
    pub fn scaled(&self, s: &Rational) -> Result<Self> {
        self.with_offsets(self.offsets.iter().map(|k| k * s).collect())
    }
}

fn check_bounded(conormals: &[RatVector], n: usize) -> Result<()> {
    if rank(conormals) < n {
        return Err(Error::Geometry("recession cone contains a line".into()));
    }
    // The recession cone is pointed, so it is nontrivial iff it has an
    // extreme ray, and every extreme ray is cut out by n-1 independent
    // tight constraints.
    for subset in combinations(conormals.len(), n - 1) {
        let rows: Vec<RatVector> = subset.iter().map(|&j| conormals[j].clone()).collect();
        let d = kernel_direction(&rows, n)?;
        if d.iter().all(Zero::is_zero) {
            continue;
        }
        let vals: Vec<Rational> = conormals.iter().map(|c| dot(c, &d)).collect();
        if vals.iter().all(|v| !v.is_positive()) || vals.iter().all(|v| !v.is_negative()) {
            return Err(Error::Geometry("feasible set is unbounded".into()));
        }
    }
    Ok(())
}

fn compute_vertices(conormals: &[RatVector], offsets: &[Rational], n: usize) -> Result<Vec<Vertex>> {
    let mut found: BTreeMap<RatVector, ()> = BTreeMap::new();
    for subset in combinations(conormals.len(), n) {
        let mat = RatMatrix::from_rows(subset.iter().map(|&j| conormals[j].clone()).collect())?;
        let rhs: RatVector = subset.iter().map(|&j| offsets[j].clone()).collect();
        let Some(x) = exact::solve(&mat, &rhs)? else {
            continue;
        };
        if conormals.iter().zip(offsets).all(|(c, k)| dot(c, &x) <= *k) {
            found.insert(x, ());
        }
    }
    Ok(found
        .into_keys()
        .map(|point| {
            let active = conormals
                .iter()
                .zip(offsets)
                .enumerate()
                .filter(|(_, (c, k))| dot(c, &point) == **k)
                .map(|(j, _)| j)
                .collect();
            Vertex { point, active }
        })
        .collect())
}

/// Vertices of the polytope with their active facet sets.
pub fn enumerate_vertices(sys: &HalfSpaceSystem) -> Vec<Vertex> {
    sys.vertices().to_vec()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DelzantCheck {
    pub delzant: bool,
    /// Describes the first failure; empty when the polytope is Delzant.
    pub diagnostics: Vec<String>,
}

/// Simple, every facet proper, and the active conormals at each vertex form
/// a lattice basis.
pub fn is_delzant(sys: &HalfSpaceSystem) -> DelzantCheck {
    let fail = |msg: String| DelzantCheck {
        delzant: false,
        diagnostics: vec![msg],
    };
    let n = sys.dim();
    for (i, v) in sys.vertices().iter().enumerate() {
        let pt: Vec<String> = v.point.iter().map(exact::format_rational).collect();
        if v.active.len() != n {
            return fail(format!(
                "vertex {i} ({}) lies on {} facets {:?}, expected {n}",
                pt.join(", "),
                v.active.len(),
                v.active
            ));
        }
        let rows: Vec<Vec<BigInt>> = v.active.iter().map(|&j| sys.conormals()[j].clone()).collect();
        let det = int_determinant(&rows);
        if !det.abs().is_one() {
            return fail(format!(
                "vertex {i} ({}) has active conormals {:?} with determinant {det}",
                pt.join(", "),
                v.active
            ));
        }
    }
    if let Some(j) = (0..sys.facet_count()).find(|&j| !sys.facet_is_proper(j)) {
        return fail(format!("facet {j} is not (n-1)-dimensional"));
    }
    DelzantCheck {
        delzant: true,
        diagnostics: Vec::new(),
    }
}

/// Vertex-facet incidences of a simple polytope.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CombinatorialType {
    pub incidences: BTreeSet<Vec<usize>>,
}

pub fn combinatorial_type(sys: &HalfSpaceSystem) -> Result<CombinatorialType> {
    if !sys.is_simple() {
        return Err(Error::Geometry("polytope is not simple".into()));
    }
    Ok(CombinatorialType {
        incidences: sys.vertices().iter().map(|v| v.active.clone()).collect(),
    })
}

/// Offsets analogous to a reference simple polytope.
#[derive(Clone, Debug)]
pub struct Chamber {
    reference: HalfSpaceSystem,
    ctype: CombinatorialType,
}

impl Chamber {
    pub fn new(reference: HalfSpaceSystem) -> Result<Self> {
        let ctype = combinatorial_type(&reference)?;
        Ok(Self { reference, ctype })
    }

    pub fn reference(&self) -> &HalfSpaceSystem {
        &self.reference
    }

    pub fn ctype(&self) -> &CombinatorialType {
        &self.ctype
    }

    pub fn facet_count(&self) -> usize {
        self.reference.facet_count()
    }

    pub fn dim(&self) -> usize {
        self.reference.dim()
    }

    /// The polytope at `offsets`, which must lie in the chamber.
    pub fn system_at(&self, offsets: &[Rational]) -> Result<HalfSpaceSystem> {
        if !same_chamber(self, offsets) {
            return Err(Error::Geometry("offsets lie outside the chamber".into()));
        }
        self.reference.with_offsets(offsets.to_vec())
    }
}

/// Whether `offsets` give a polytope with the reference's vertex-facet
/// incidences. Degenerate candidates yield `false`.
///
/// Each reference incidence set is solved and must be a simple vertex
/// (strict inequality on every other facet). Edges of a simple polytope join
/// vertices whose incidence sets differ in one facet, so if every reference
/// vertex survives, the vertex graph closes on itself and no other vertex or
/// unbounded edge can exist.
pub fn same_chamber(ch: &Chamber, offsets: &[Rational]) -> bool {
    let sys = &ch.reference;
    if offsets.len() != sys.facet_count() {
        return false;
    }
    for inc in &ch.ctype.incidences {
        let Ok(mat) = RatMatrix::from_rows(inc.iter().map(|&j| sys.conormals_q[j].clone()).collect())
        else {
            return false;
        };
        let rhs: RatVector = inc.iter().map(|&j| offsets[j].clone()).collect();
        let Ok(Some(x)) = exact::solve(&mat, &rhs) else {
            return false;
        };
        let ok = (0..sys.facet_count())
            .filter(|j| inc.binary_search(j).is_err())
            .all(|j| dot(&sys.conormals_q[j], &x) < offsets[j]);
        if !ok {
            return false;
        }
    }
    true
}

pub fn translate_offsets(sys: &HalfSpaceSystem, a: &[Rational]) -> Result<RatVector> {
    sys.translate_offsets(a)
}

/// Bookkeeping from a sampling run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SamplingStats {
    pub attempts: usize,
    pub rejections: usize,
    pub shrinks: usize,
}

/// Spread of the reference polytope: the largest coordinate range over its
/// vertices.
pub(crate) fn extent(sys: &HalfSpaceSystem) -> Rational {
    (0..sys.dim())
        .map(|i| {
            let coords = sys.vertices().iter().map(|v| &v.point[i]);
            let lo = coords.clone().min().cloned().unwrap_or_else(Rational::zero);
            let hi = coords.max().cloned().unwrap_or_else(Rational::zero);
            hi - lo
        })
        .max()
        .unwrap_or_else(Rational::one)
}

const SAMPLE_GRAIN: i64 = 64;
const REJECTIONS_BEFORE_SHRINK: usize = 8;

/// Deterministic chamber samples: the reference offsets first, then seeded
/// rational perturbations of them that stay in the chamber.
pub fn sample_chamber(ch: &Chamber, count: usize, seed: u64) -> Result<Vec<RatVector>> {
    sample_chamber_with_stats(ch, count, seed).map(|(s, _)| s)
}

pub fn sample_chamber_with_stats(
    ch: &Chamber,
    count: usize,
    seed: u64,
) -> Result<(Vec<RatVector>, SamplingStats)> {
    if count == 0 {
        return Err(Error::Domain("sample count must be positive".into()));
    }
    let reference = ch.reference.offsets();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut radius = extent(&ch.reference) / exact::int(8);
    let budget = 64 * count + 256;
    let mut stats = SamplingStats::default();
    let mut seen: BTreeSet<RatVector> = BTreeSet::new();
    let mut out = vec![reference.clone()];
    seen.insert(reference.clone());
    let mut streak = 0;
    while out.len() < count {
        if stats.attempts >= budget {
            return Err(Error::Sampling(format!(
                "found {} of {count} chamber samples in {budget} attempts",
                out.len()
            )));
        }
        stats.attempts += 1;
        let candidate: RatVector = reference
            .iter()
            .map(|k| {
                let u = rng.random_range(-SAMPLE_GRAIN..=SAMPLE_GRAIN);
                k + &radius * exact::rat(u, SAMPLE_GRAIN)
            })
            .collect();
        if !seen.contains(&candidate) && same_chamber(ch, &candidate) {
            seen.insert(candidate.clone());
            out.push(candidate);
            streak = 0;
        } else {
            stats.rejections += 1;
            streak += 1;
            if streak == REJECTIONS_BEFORE_SHRINK {
                radius /= exact::int(2);
                stats.shrinks += 1;
                streak = 0;
            }
        }
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat, rat_vector};
    use proptest::prelude::*;

    fn simplex2() -> HalfSpaceSystem {
        HalfSpaceSystem::from_i64(&[vec![-1, 0], vec![0, -1], vec![1, 1]], rat_vector(&[0, 0, 1]))
            .unwrap()
    }

    fn hirzebruch(k: i64, tau: Rational, lambda: Rational) -> HalfSpaceSystem {
        HalfSpaceSystem::from_i64(
            &[vec![-1, 0], vec![0, -1], vec![0, 1], vec![1, k]],
            vec![int(0), int(0), lambda, tau],
        )
        .unwrap()
    }

    fn points(sys: &HalfSpaceSystem) -> BTreeSet<RatVector> {
        sys.vertices().iter().map(|v| v.point.clone()).collect()
    }

    #[test]
    fn simplex_vertices() {
        let expected: BTreeSet<_> = [vec![0, 0], vec![1, 0], vec![0, 1]]
            .iter()
            .map(|p| rat_vector(p))
            .collect();
        assert_eq!(points(&simplex2()), expected);
    }

    #[test]
    fn hirzebruch_trapezoid_vertices() {
        let sys = hirzebruch(1, int(2), int(1));
        let expected: BTreeSet<_> = [vec![0, 0], vec![0, 1], vec![2, 0], vec![1, 1]]
            .iter()
            .map(|p| rat_vector(p))
            .collect();
        assert_eq!(points(&sys), expected);
        assert!(is_delzant(&sys).delzant);
    }

    #[test]
    fn rejects_unbounded_empty_and_flat() {
        let half_plane = HalfSpaceSystem::from_i64(
            &[vec![-1, 0], vec![0, -1], vec![1, 0]],
            rat_vector(&[0, 0, 1]),
        );
        assert!(matches!(half_plane, Err(Error::Geometry(_))));
        let empty = HalfSpaceSystem::from_i64(
            &[vec![-1, 0], vec![0, -1], vec![1, 1]],
            rat_vector(&[-1, 0, -1]),
        );
        assert!(matches!(empty, Err(Error::Geometry(_))));
        let point = HalfSpaceSystem::from_i64(
            &[vec![-1, 0], vec![0, -1], vec![1, 1]],
            rat_vector(&[0, 0, 0]),
        );
        assert!(matches!(point, Err(Error::Geometry(_))));
        let not_primitive = HalfSpaceSystem::from_i64(
            &[vec![-1, 0], vec![0, -1], vec![2, 2]],
            rat_vector(&[0, 0, 1]),
        );
        assert!(matches!(not_primitive, Err(Error::Domain(_))));
        let interval = HalfSpaceSystem::from_i64(&[vec![-1], vec![1]], rat_vector(&[0, 3])).unwrap();
        assert_eq!(interval.vertices().len(), 2);
    }

    #[test]
    fn skewed_square_is_not_delzant() {
        // unit square with the conormal of x1 <= 1 replaced by (1,2)
        let sys = HalfSpaceSystem::from_i64(
            &[vec![-1, 0], vec![0, -1], vec![1, 2], vec![0, 1]],
            rat_vector(&[0, 0, 1, 1]),
        )
        .unwrap();
        let check = is_delzant(&sys);
        assert!(!check.delzant);
        assert!(check.diagnostics[0].contains("determinant -2"), "{:?}", check.diagnostics);
        assert!(check.diagnostics[0].contains("0, 1/2"));
    }

    #[test]
    fn simplex_combinatorial_type() {
        let t = combinatorial_type(&simplex2()).unwrap();
        let expected: BTreeSet<Vec<usize>> = [vec![0, 1], vec![0, 2], vec![1, 2]].into_iter().collect();
        assert_eq!(t.incidences, expected);
    }

    #[test]
    fn hirzebruch_combinatorial_type() {
        let t = combinatorial_type(&hirzebruch(1, int(2), int(1))).unwrap();
        let expected: BTreeSet<Vec<usize>> =
            [vec![0, 1], vec![0, 2], vec![1, 3], vec![2, 3]].into_iter().collect();
        assert_eq!(t.incidences, expected);
    }

    #[test]
    fn non_simple_type_is_error() {
        // square pyramid apex has 4 active facets
        let pyramid = HalfSpaceSystem::from_i64(
            &[vec![0, 0, -1], vec![1, 0, 1], vec![-1, 0, 1], vec![0, 1, 1], vec![0, -1, 1]],
            rat_vector(&[0, 1, 1, 1, 1]),
        )
        .unwrap();
        assert!(!pyramid.is_simple());
        assert!(combinatorial_type(&pyramid).is_err());
        assert!(!is_delzant(&pyramid).delzant);
    }

    #[test]
    fn translate_offsets_examples() {
        let sys = simplex2();
        assert_eq!(sys.translate_offsets(&rat_vector(&[0, 0])).unwrap(), *sys.offsets());
        assert_eq!(sys.translate_offsets(&rat_vector(&[1, 0])).unwrap(), rat_vector(&[-1, 0, 2]));
        assert!(sys.translate_offsets(&rat_vector(&[1])).is_err());
    }

    #[test]
    fn same_chamber_examples() {
        let ch = Chamber::new(hirzebruch(1, int(2), int(1))).unwrap();
        assert!(same_chamber(&ch, ch.reference().offsets()));
        // lambda = 3 with tau = 2 makes sigma negative
        assert!(!same_chamber(&ch, &rat_vector(&[0, 0, 3, 2])));
        // sigma = 0 collapses the top edge
        assert!(!same_chamber(&ch, &rat_vector(&[0, 0, 2, 2])));
        let moved = ch.reference().translate_offsets(&[rat(5, 3), rat(-7, 2)]).unwrap();
        assert!(same_chamber(&ch, &moved));
        assert!(!same_chamber(&ch, &rat_vector(&[0, 0, 1])));
    }

    #[test]
    fn sample_chamber_behaviour() {
        let ch = Chamber::new(hirzebruch(1, int(2), int(1))).unwrap();
        assert_eq!(sample_chamber(&ch, 1, 0).unwrap(), vec![ch.reference().offsets().clone()]);
        let s = sample_chamber(&ch, 10, 7).unwrap();
        assert_eq!(s.len(), 10);
        let distinct: BTreeSet<_> = s.iter().cloned().collect();
        assert_eq!(distinct.len(), 10);
        assert!(s.iter().all(|k| same_chamber(&ch, k)));
        assert_eq!(s, sample_chamber(&ch, 10, 7).unwrap());
        assert_ne!(s, sample_chamber(&ch, 10, 8).unwrap());
        assert!(matches!(sample_chamber(&ch, 0, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn roomy_chamber_accepts_first_draws() {
        // square far from every wall relative to the perturbation radius
        let square = HalfSpaceSystem::from_i64(
            &[vec![-1, 0], vec![0, -1], vec![1, 0], vec![0, 1]],
            rat_vector(&[0, 0, 4, 4]),
        )
        .unwrap();
        let ch = Chamber::new(square).unwrap();
        let (s, stats) = sample_chamber_with_stats(&ch, 25, 3).unwrap();
        assert_eq!(s.len(), 25);
        assert_eq!(stats.rejections, 0);
        assert_eq!(stats.attempts, 24);
    }

    #[test]
    fn narrow_chamber_shrinks_radius() {
        // unit square with four tiny corner cuts
        let e = rat(1, 1000);
        let octagon = HalfSpaceSystem::from_i64(
            &[
                vec![-1, 0],
                vec![0, -1],
                vec![1, 0],
                vec![0, 1],
                vec![-1, -1],
                vec![1, -1],
                vec![1, 1],
                vec![-1, 1],
            ],
            vec![int(0), int(0), int(1), int(1), -&e, int(1) - &e, int(2) - &e, int(1) - &e],
        )
        .unwrap();
        let ch = Chamber::new(octagon).unwrap();
        let (s, stats) = sample_chamber_with_stats(&ch, 12, 1).unwrap();
        assert_eq!(s.len(), 12);
        assert!(stats.shrinks > 0);
        assert!(s.iter().all(|k| same_chamber(&ch, k)));
    }

    fn rational_vec(n: usize) -> impl Strategy<Value = RatVector> {
        proptest::collection::vec((-12i64..=12, 1i64..=6).prop_map(|(p, q)| rat(p, q)), n)
    }

    proptest! {
        #[test]
        fn type_invariant_under_translation(a in rational_vec(2), k in 1i64..4, tau in 4i64..9) {
            let sys = hirzebruch(k, int(tau), int(1));
            let moved = sys.with_offsets(sys.translate_offsets(&a).unwrap()).unwrap();
            prop_assert_eq!(combinatorial_type(&sys).unwrap(), combinatorial_type(&moved).unwrap());
        }

        #[test]
        fn vertices_independent_of_facet_order(perm_seed in 0usize..24, tau in 3i64..7) {
            let conormals = vec![vec![-1, 0], vec![0, -1], vec![0, 1], vec![1, 2]];
            let offsets = vec![int(0), int(0), int(1), int(tau)];
            let base = HalfSpaceSystem::from_i64(&conormals, offsets.clone()).unwrap();
            let mut order: Vec<usize> = (0..4).collect();
            let mut s = perm_seed;
            for i in (1..4).rev() {
                order.swap(i, s % (i + 1));
                s /= i + 1;
            }
            let permuted = HalfSpaceSystem::from_i64(
                &order.iter().map(|&i| conormals[i].clone()).collect::<Vec<_>>(),
                order.iter().map(|&i| offsets[i].clone()).collect(),
            ).unwrap();
            prop_assert_eq!(points(&base), points(&permuted));
            for v in permuted.vertices() {
                let relabeled: BTreeSet<usize> = v.active.iter().map(|&j| order[j]).collect();
                let original = base.vertices().iter().find(|w| w.point == v.point).unwrap();
                prop_assert_eq!(relabeled, original.active.iter().cloned().collect::<BTreeSet<_>>());
            }
        }

        #[test]
        fn fast_chamber_test_matches_full_construction(d in rational_vec(4)) {
            let ch = Chamber::new(hirzebruch(2, int(3), int(1))).unwrap();
            let offsets: RatVector = ch.reference().offsets().iter().zip(&d).map(|(k, e)| k + e).collect();
            let slow = ch.reference()
                .with_offsets(offsets.clone())
                .ok()
                .and_then(|s| combinatorial_type(&s).ok())
                .is_some_and(|t| &t == ch.ctype());
            prop_assert_eq!(same_chamber(&ch, &offsets), slow);
        }

        #[test]
        fn delzant_vertices_are_unimodular(k in 1i64..5, lambda in 1i64..4, extra in 1i64..4) {
            let sys = hirzebruch(k, int(k * lambda + extra), int(lambda));
            prop_assert!(is_delzant(&sys).delzant);
            for v in sys.vertices() {
                prop_assert_eq!(v.active.len(), 2);
                let rows: Vec<Vec<BigInt>> = v.active.iter().map(|&j| sys.conormals()[j].clone()).collect();
                prop_assert!(int_determinant(&rows).abs().is_one());
            }
        }
    }
}
