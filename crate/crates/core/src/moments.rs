//! Exact volumes and moments up to degree two, for polytopes and (in the
//! lattice-normalized measure) for their facets.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{dim_err, Error, Result};
use crate::exact::{self, determinant, dot, factorial, from_bigint, RatMatrix, RatVector, Rational};
use crate::polytope::{affine_rank, HalfSpaceSystem};

/// Highest moment degree to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Degree {
    Volume = 0,
    First = 1,
    Second = 2,
}

impl TryFrom<u8> for Degree {
    type Error = Error;

    fn try_from(d: u8) -> Result<Self> {
        match d {
            0 => Ok(Degree::Volume),
            1 => Ok(Degree::First),
            2 => Ok(Degree::Second),
            _ => Err(Error::Domain(format!("moment degree {d} is not supported"))),
        }
    }
}

/// A `d`-simplex in `R^n`, where `d = n` or `d = n - 1`. Facet pieces carry
/// the primitive conormal of their hyperplane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddedSimplex {
    vertices: Vec<RatVector>,
    normal: Option<Vec<BigInt>>,
}

impl EmbeddedSimplex {
    pub fn new(vertices: Vec<RatVector>, normal: Option<Vec<BigInt>>) -> Result<Self> {
        let Some(n) = vertices.first().map(Vec::len) else {
            return dim_err("simplex without vertices");
        };
        if vertices.iter().any(|v| v.len() != n) {
            return dim_err("simplex vertices of differing dimension");
        }
        let d = vertices.len() - 1;
        match &normal {
            None if d != n => {
                return dim_err(format!("{d}-simplex in R^{n} needs a hyperplane normal"))
            }
            Some(nu) => {
                if d + 1 != n || nu.len() != n {
                    return dim_err(format!("normal given for a {d}-simplex in R^{n}"));
                }
                if !exact::is_primitive(nu) {
                    return Err(Error::Domain("simplex normal is not primitive".into()));
                }
                let level = exact::dot_int(&vertices[0], nu);
                if vertices.iter().any(|v| exact::dot_int(v, nu) != level) {
                    return Err(Error::Geometry("simplex does not lie in its hyperplane".into()));
                }
            }
            None => {}
        }
        Ok(Self { vertices, normal })
    }

    /// Intrinsic dimension.
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[RatVector] {
        &self.vertices
    }

    pub fn normal(&self) -> Option<&[BigInt]> {
        self.normal.as_deref()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MomentData {
    pub dim: usize,
    /// Euclidean volume, or lattice-normalized volume for facets.
    #[serde(with = "exact::serde_rational")]
    pub volume: Rational,
    /// `∫ x_i`, present for degree >= 1.
    #[serde(with = "exact::serde_rational::option_vec")]
    pub first: Option<RatVector>,
    /// `∫ x_i x_j`, present for degree 2.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "serialize_second")]
    pub second: Option<Vec<RatVector>>,
}

fn serialize_second<S: serde::Serializer>(
    v: &Option<Vec<RatVector>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let rows: Option<Vec<Vec<String>>> = v
        .as_ref()
        .map(|rows| rows.iter().map(|r| r.iter().map(exact::format_rational).collect()).collect());
    serde::Serialize::serialize(&rows, s)
}

impl MomentData {
    pub(crate) fn zero(dim: usize, ambient: usize, degree: Degree) -> Self {
        Self {
            dim,
            volume: Rational::zero(),
            first: (degree >= Degree::First).then(|| vec![Rational::zero(); ambient]),
            second: (degree >= Degree::Second)
                .then(|| vec![vec![Rational::zero(); ambient]; ambient]),
        }
    }

    pub(crate) fn accumulate(&mut self, other: &MomentData) {
        self.volume += &other.volume;
        if let (Some(a), Some(b)) = (&mut self.first, &other.first) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        if let (Some(a), Some(b)) = (&mut self.second, &other.second) {
            for (ra, rb) in a.iter_mut().zip(b) {
                for (x, y) in ra.iter_mut().zip(rb) {
                    *x += y;
                }
            }
        }
    }

    /// `∫ <x, b>`; requires first moments.
    pub fn first_dot(&self, b: &[BigInt]) -> Rational {
        exact::dot_int(self.first.as_ref().expect("first moments computed"), b)
    }

    /// First moments divided by volume.
    pub fn centroid(&self) -> Option<RatVector> {
        let first = self.first.as_ref()?;
        if self.volume.is_zero() {
            return None;
        }
        Some(first.iter().map(|f| f / &self.volume).collect())
    }
}

pub fn simplex_moments(s: &EmbeddedSimplex, degree: Degree) -> Result<MomentData> {
    let pts: Vec<&RatVector> = s.vertices.iter().collect();
    moments_of_points(&pts, s.normal(), degree)
}

/// Moments of the simplex spanned by `pts`; with `normal`, lattice-normalized
/// moments of a codimension-one simplex.
pub(crate) fn moments_of_points(
    pts: &[&RatVector],
    normal: Option<&[BigInt]>,
    degree: Degree,
) -> Result<MomentData> {
    let d = pts.len() - 1;
    let n = pts[0].len();
    let v0 = pts[0];
    let mut rows: Vec<RatVector> = pts[1..]
        .iter()
        .map(|v| v.iter().zip(v0).map(|(a, b)| a - b).collect())
        .collect();
    let denom = match normal {
        None => from_bigint(&factorial(d as u32)),
        Some(nu) => {
            let nu_q = exact::to_rational_vector(nu);
            let norm2 = dot(&nu_q, &nu_q);
            rows.push(nu_q);
            norm2 * from_bigint(&factorial(d as u32))
        }
    };
    let det = if n == 0 {
        Rational::from_integer(1.into())
    } else {
        determinant(&RatMatrix::from_rows(rows)?)?
    };
    if det.is_zero() {
        return Err(Error::Geometry("degenerate simplex".into()));
    }
    let volume = det.abs() / denom;
    let sums: RatVector = (0..n).map(|i| pts.iter().map(|v| &v[i]).sum()).collect();
    let count = exact::int((d + 1) as i64);
    let first = (degree >= Degree::First)
        .then(|| sums.iter().map(|t| &volume * t / &count).collect::<RatVector>());
    let second = (degree >= Degree::Second).then(|| {
        let scale = &volume / exact::int(((d + 1) * (d + 2)) as i64);
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let pair: Rational = pts.iter().map(|v| &v[i] * &v[j]).sum();
                        &scale * (pair + &sums[i] * &sums[j])
                    })
                    .collect()
            })
            .collect()
    });
    Ok(MomentData {
        dim: d,
        volume,
        first,
        second,
    })
}

/// Which vertex each face is coned from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseVertex {
    /// Lexicographically smallest vertex of the face.
    Smallest,
    /// Lexicographically largest vertex of the face.
    Largest,
}

/// Codimension-one faces of the face with vertex indices `face` (dimension
/// `dim`), each as a sorted vertex-index list.
fn subfaces(sys: &HalfSpaceSystem, face: &[usize], dim: usize) -> Vec<Vec<usize>> {
    let mut out = BTreeSet::new();
    for j in 0..sys.facet_count() {
        let sub: Vec<usize> = face
            .iter()
            .copied()
            .filter(|&i| sys.vertices()[i].active.binary_search(&j).is_ok())
            .collect();
        if sub.is_empty() || sub.len() == face.len() {
            continue;
        }
        let pts: Vec<&RatVector> = sub.iter().map(|&i| &sys.vertices()[i].point).collect();
        if affine_rank(&pts) + 1 == dim {
            out.insert(sub);
        }
    }
    out.into_iter().collect()
}

fn triangulate_face(
    sys: &HalfSpaceSystem,
    face: &[usize],
    dim: usize,
    base: BaseVertex,
    out: &mut Vec<Vec<usize>>,
) {
    // vertex indices follow lexicographic point order
    let apex = match base {
        BaseVertex::Smallest => face[0],
        BaseVertex::Largest => face[face.len() - 1],
    };
    if dim == 0 {
        out.push(vec![apex]);
        return;
    }
    for sub in subfaces(sys, face, dim) {
        if sub.binary_search(&apex).is_ok() {
            continue;
        }
        let mut pieces = Vec::new();
        triangulate_face(sys, &sub, dim - 1, base, &mut pieces);
        for mut p in pieces {
            p.insert(0, apex);
            out.push(p);
        }
    }
}

fn to_simplices(
    sys: &HalfSpaceSystem,
    pieces: Vec<Vec<usize>>,
    normal: Option<&Vec<BigInt>>,
) -> Result<Vec<EmbeddedSimplex>> {
    pieces
        .into_iter()
        .map(|p| {
            EmbeddedSimplex::new(
                p.iter().map(|&i| sys.vertices()[i].point.clone()).collect(),
                normal.cloned(),
            )
        })
        .collect()
}

/// Triangulation of the polytope as lists of vertex indices.
pub(crate) fn body_pieces(sys: &HalfSpaceSystem, base: BaseVertex) -> Vec<Vec<usize>> {
    let all: Vec<usize> = (0..sys.vertices().len()).collect();
    let mut pieces = Vec::new();
    triangulate_face(sys, &all, sys.dim(), base, &mut pieces);
    pieces
}

/// Triangulation of facet `j` as lists of vertex indices.
pub(crate) fn facet_pieces(sys: &HalfSpaceSystem, j: usize, base: BaseVertex) -> Result<Vec<Vec<usize>>> {
    if j >= sys.facet_count() {
        return dim_err(format!("facet {j} of {}", sys.facet_count()));
    }
    if !sys.facet_is_proper(j) {
        return Err(Error::Geometry(format!("facet {j} is empty or lower-dimensional")));
    }
    let face = sys.facet_vertex_indices(j);
    let mut pieces = Vec::new();
    triangulate_face(sys, &face, sys.dim() - 1, base, &mut pieces);
    Ok(pieces)
}

/// Cone triangulation of the polytope from its lexicographically smallest
/// vertex, recursing through the faces that avoid the apex.
pub fn triangulate(sys: &HalfSpaceSystem) -> Result<Vec<EmbeddedSimplex>> {
    triangulate_with(sys, BaseVertex::Smallest)
}

pub fn triangulate_with(sys: &HalfSpaceSystem, base: BaseVertex) -> Result<Vec<EmbeddedSimplex>> {
    to_simplices(sys, body_pieces(sys, base), None)
}

/// Triangulation of facet `j` into `(n-1)`-simplices carrying its conormal.
pub fn triangulate_facet(
    sys: &HalfSpaceSystem,
    j: usize,
    base: BaseVertex,
) -> Result<Vec<EmbeddedSimplex>> {
    let pieces = facet_pieces(sys, j, base)?;
    to_simplices(sys, pieces, Some(&sys.conormals()[j]))
}

fn sum_moments(simplices: &[EmbeddedSimplex], dim: usize, ambient: usize, degree: Degree) -> Result<MomentData> {
    let mut total = MomentData::zero(dim, ambient, degree);
    for s in simplices {
        total.accumulate(&simplex_moments(s, degree)?);
    }
    Ok(total)
}

pub fn polytope_moments(sys: &HalfSpaceSystem, degree: Degree) -> Result<MomentData> {
    sum_moments(&triangulate(sys)?, sys.dim(), sys.dim(), degree)
}

/// Lattice-normalized moments of facet `j`.
pub fn facet_lattice_moments(sys: &HalfSpaceSystem, j: usize, degree: Degree) -> Result<MomentData> {
    let pieces = triangulate_facet(sys, j, BaseVertex::Smallest)?;
    sum_moments(&pieces, sys.dim() - 1, sys.dim(), degree)
}

pub fn center_of_mass(sys: &HalfSpaceSystem) -> Result<RatVector> {
    polytope_moments(sys, Degree::First)?
        .centroid()
        .ok_or_else(|| Error::Geometry("polytope has zero volume".into()))
}

pub fn facet_center_of_mass(sys: &HalfSpaceSystem, j: usize) -> Result<RatVector> {
    facet_lattice_moments(sys, j, Degree::First)?
        .centroid()
        .ok_or_else(|| Error::Geometry(format!("facet {j} has zero measure")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, int_vector, pow, rat, rat_vector};
    use crate::polytope::is_delzant;
    use proptest::prelude::*;

    fn standard_simplex(n: usize, tau: &Rational) -> EmbeddedSimplex {
        let mut vs = vec![vec![Rational::zero(); n]];
        for i in 0..n {
            let mut v = vec![Rational::zero(); n];
            v[i] = tau.clone();
            vs.push(v);
        }
        EmbeddedSimplex::new(vs, None).unwrap()
    }

    fn hirzebruch(k: i64, tau: Rational, lambda: Rational) -> HalfSpaceSystem {
        HalfSpaceSystem::from_i64(
            &[vec![-1, 0], vec![0, -1], vec![0, 1], vec![1, k]],
            vec![int(0), int(0), lambda, tau],
        )
        .unwrap()
    }

    fn shoelace(poly: &[RatVector]) -> Rational {
        let n = poly.len();
        let twice: Rational = (0..n)
            .map(|i| {
                let (a, b) = (&poly[i], &poly[(i + 1) % n]);
                &a[0] * &b[1] - &b[0] * &a[1]
            })
            .sum();
        twice.abs() / int(2)
    }

    fn fact(n: u32) -> Rational {
        from_bigint(&factorial(n))
    }

    #[test]
    fn standard_simplex_moments() {
        for n in 1..=4u32 {
            for tau in [int(1), int(2), rat(5, 3)] {
                let m = simplex_moments(&standard_simplex(n as usize, &tau), Degree::Second).unwrap();
                assert_eq!(m.volume, pow(&tau, n) / fact(n));
                let first = m.first.as_ref().unwrap();
                let second = m.second.as_ref().unwrap();
                for i in 0..n as usize {
                    assert_eq!(first[i], pow(&tau, n + 1) / fact(n + 1));
                    assert_eq!(second[i][i], int(2) * pow(&tau, n + 2) / fact(n + 2));
                    for j in 0..n as usize {
                        if i != j {
                            assert_eq!(second[i][j], pow(&tau, n + 2) / fact(n + 2));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn weighted_simplex_moments() {
        let c = [rat(1, 2), int(3), rat(2, 5)];
        let tau = rat(7, 4);
        let mut vs = vec![vec![Rational::zero(); 3]];
        for i in 0..3 {
            let mut v = vec![Rational::zero(); 3];
            v[i] = &tau / &c[i];
            vs.push(v);
        }
        let m = simplex_moments(&EmbeddedSimplex::new(vs, None).unwrap(), Degree::First).unwrap();
        let prod: Rational = c.iter().map(|ci| &tau / ci).product();
        assert_eq!(m.volume, &prod / fact(3));
        for j in 0..3 {
            assert_eq!(m.first.as_ref().unwrap()[j], &tau / &c[j] * &prod / fact(4));
        }
    }

    #[test]
    fn primitive_segment_has_lattice_length_one() {
        let s = EmbeddedSimplex::new(
            vec![rat_vector(&[0, 0]), rat_vector(&[3, -2])],
            Some(int_vector(&[2, 3])),
        )
        .unwrap();
        assert_eq!(simplex_moments(&s, Degree::Volume).unwrap().volume, int(1));
    }

    #[test]
    fn simplex_validation() {
        assert!(EmbeddedSimplex::new(vec![rat_vector(&[0, 0]), rat_vector(&[1, 0])], None).is_err());
        assert!(EmbeddedSimplex::new(
            vec![rat_vector(&[0, 0]), rat_vector(&[1, 1])],
            Some(int_vector(&[0, 1]))
        )
        .is_err());
        let flat = EmbeddedSimplex::new(
            vec![rat_vector(&[0, 0]), rat_vector(&[1, 1]), rat_vector(&[2, 2])],
            None,
        )
        .unwrap();
        assert!(matches!(simplex_moments(&flat, Degree::Volume), Err(Error::Geometry(_))));
    }

    #[test]
    fn triangle_is_one_simplex() {
        let sys = HalfSpaceSystem::from_i64(&[vec![-1, 0], vec![0, -1], vec![1, 1]], rat_vector(&[0, 0, 1]))
            .unwrap();
        assert_eq!(triangulate(&sys).unwrap().len(), 1);
    }

    #[test]
    fn trapezoid_triangulation_matches_shoelace() {
        for (k, tau, lambda) in [(1, int(2), int(1)), (2, int(5), rat(3, 2)), (3, rat(7, 2), rat(1, 2))] {
            let sys = hirzebruch(k, tau.clone(), lambda.clone());
            let pieces = triangulate(&sys).unwrap();
            assert_eq!(pieces.len(), 2);
            let sigma = &tau - int(k) * &lambda;
            let quad = vec![
                vec![int(0), int(0)],
                vec![tau.clone(), int(0)],
                vec![sigma, lambda.clone()],
                vec![int(0), lambda.clone()],
            ];
            let area = shoelace(&quad);
            assert_eq!(area, &tau * &lambda - int(k) * &lambda * &lambda / int(2));
            assert_eq!(polytope_moments(&sys, Degree::Volume).unwrap().volume, area);
        }
        assert_eq!(
            polytope_moments(&hirzebruch(1, int(2), int(1)), Degree::Volume).unwrap().volume,
            rat(3, 2)
        );
    }

    #[test]
    fn hirzebruch_center_of_mass() {
        let (k, tau, lambda) = (int(2), int(5), rat(3, 2));
        let sys = hirzebruch(2, tau.clone(), lambda.clone());
        let den = int(3) * (int(2) * &tau - &k * &lambda);
        let x = (int(3) * &tau * &tau - int(3) * &k * &tau * &lambda + &k * &k * &lambda * &lambda) / &den;
        let y = (int(3) * &lambda * &tau - int(2) * &k * &lambda * &lambda) / &den;
        assert_eq!(center_of_mass(&sys).unwrap(), vec![x, y]);
        assert_eq!(center_of_mass(&hirzebruch(1, int(2), int(1))).unwrap(), vec![rat(7, 9), rat(4, 9)]);
    }

    #[test]
    fn simplex_center_of_mass() {
        let sys = HalfSpaceSystem::from_i64(
            &[vec![-1, 0, 0], vec![0, -1, 0], vec![0, 0, -1], vec![1, 1, 1]],
            vec![int(0), int(0), int(0), rat(5, 2)],
        )
        .unwrap();
        assert_eq!(center_of_mass(&sys).unwrap(), vec![rat(5, 8); 3]);
    }

    #[test]
    fn facet_examples() {
        let tri = HalfSpaceSystem::from_i64(&[vec![-1, 0], vec![0, -1], vec![1, 1]], rat_vector(&[0, 0, 1]))
            .unwrap();
        assert_eq!(facet_center_of_mass(&tri, 1).unwrap(), vec![rat(1, 2), int(0)]);
        let square = HalfSpaceSystem::from_i64(
            &[vec![-1, 0], vec![0, -1], vec![1, 0], vec![0, 1]],
            rat_vector(&[0, 0, 1, 1]),
        )
        .unwrap();
        for j in 0..4 {
            assert_eq!(facet_lattice_moments(&square, j, Degree::Volume).unwrap().volume, int(1));
        }
        // slant facet of the triangle: lattice length 1 (not sqrt 2)
        assert_eq!(facet_lattice_moments(&tri, 2, Degree::Volume).unwrap().volume, int(1));
        assert!(facet_lattice_moments(&tri, 3, Degree::Volume).is_err());
    }

    #[test]
    fn redundant_facet_has_no_moments() {
        let sys = HalfSpaceSystem::from_i64(
            &[vec![-1, 0], vec![0, -1], vec![1, 1], vec![1, 0]],
            rat_vector(&[0, 0, 1, 5]),
        )
        .unwrap();
        assert!(matches!(
            facet_lattice_moments(&sys, 3, Degree::Volume),
            Err(Error::Geometry(_))
        ));
    }

    #[test]
    fn truncated_simplex_ceiling_centroid() {
        // x_j >= 0, x3 <= lambda, sum <= tau with tau = 3, lambda = 1, sigma = 2
        let sys = HalfSpaceSystem::from_i64(
            &[vec![-1, 0, 0], vec![0, -1, 0], vec![0, 0, -1], vec![0, 0, 1], vec![1, 1, 1]],
            rat_vector(&[0, 0, 0, 1, 3]),
        )
        .unwrap();
        // ceiling is S_2(2) at height 1: centroid (2/3, 2/3, 1)
        assert_eq!(facet_center_of_mass(&sys, 3).unwrap(), vec![rat(2, 3), rat(2, 3), int(1)]);
        // brute force: the ceiling is one triangle, average of its vertices
        let face: Vec<_> = sys
            .facet_vertex_indices(3)
            .iter()
            .map(|&i| sys.vertices()[i].point.clone())
            .collect();
        assert_eq!(face.len(), 3);
        let avg: RatVector = (0..3).map(|i| face.iter().map(|v| &v[i]).sum::<Rational>() / int(3)).collect();
        assert_eq!(facet_center_of_mass(&sys, 3).unwrap(), avg);
    }

    fn random_delzant() -> impl Strategy<Value = HalfSpaceSystem> {
        prop_oneof![
            (1i64..4, 1i64..5, 1i64..4).prop_map(|(k, l, extra)| hirzebruch(k, int(k * l + extra), int(l))),
            (1i64..4, 1i64..4).prop_map(|(t, l)| {
                HalfSpaceSystem::from_i64(
                    &[vec![-1, 0, 0], vec![0, -1, 0], vec![0, 0, -1], vec![0, 0, 1], vec![1, 1, 1]],
                    vec![int(0), int(0), int(0), int(l), int(t + l)],
                )
                .unwrap()
            }),
            (1i64..4, 1i64..4, -1i64..3).prop_map(|(t, l, a)| {
                HalfSpaceSystem::from_i64(
                    &[vec![-1, 0, 0], vec![0, -1, 0], vec![1, 1, 0], vec![0, 0, -1], vec![-a, 0, 1]],
                    vec![int(0), int(0), int(t), int(0), int(l + 2 * t)],
                )
                .unwrap()
            }),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn base_vertex_choice_is_immaterial(sys in random_delzant()) {
            let a = sum_moments(&triangulate_with(&sys, BaseVertex::Smallest).unwrap(), sys.dim(), sys.dim(), Degree::Second).unwrap();
            let b = sum_moments(&triangulate_with(&sys, BaseVertex::Largest).unwrap(), sys.dim(), sys.dim(), Degree::Second).unwrap();
            prop_assert_eq!(a, b);
            for j in 0..sys.facet_count() {
                let fa = triangulate_facet(&sys, j, BaseVertex::Smallest).unwrap();
                let fb = triangulate_facet(&sys, j, BaseVertex::Largest).unwrap();
                let n = sys.dim();
                prop_assert_eq!(sum_moments(&fa, n - 1, n, Degree::Second).unwrap(), sum_moments(&fb, n - 1, n, Degree::Second).unwrap());
            }
        }

        #[test]
        fn minkowski_facet_closure(sys in random_delzant()) {
            prop_assert!(is_delzant(&sys).delzant);
            let n = sys.dim();
            let mut total = vec![Rational::zero(); n];
            for j in 0..sys.facet_count() {
                let vol = facet_lattice_moments(&sys, j, Degree::Volume).unwrap().volume;
                for (t, c) in total.iter_mut().zip(sys.conormal_q(j)) {
                    *t += &vol * c;
                }
            }
            prop_assert!(total.iter().all(Zero::is_zero));
        }

        #[test]
        fn centroid_is_interior(sys in random_delzant()) {
            prop_assert!(sys.contains_strictly(&center_of_mass(&sys).unwrap()));
            for j in 0..sys.facet_count() {
                let c = facet_center_of_mass(&sys, j).unwrap();
                prop_assert!(sys.contains(&c));
                prop_assert_eq!(dot(sys.conormal_q(j), &c), sys.offsets()[j].clone());
            }
        }

        #[test]
        fn translation_covariance(sys in random_delzant(), a in proptest::collection::vec((-6i64..6, 1i64..4), 3)) {
            let a: RatVector = a.into_iter().take(sys.dim()).map(|(p, q)| rat(p, q)).collect();
            let moved = sys.with_offsets(sys.translate_offsets(&a).unwrap()).unwrap();
            let m0 = polytope_moments(&sys, Degree::First).unwrap();
            let m1 = polytope_moments(&moved, Degree::First).unwrap();
            prop_assert_eq!(&m0.volume, &m1.volume);
            for i in 0..sys.dim() {
                prop_assert_eq!(&m1.first.as_ref().unwrap()[i], &(&m0.first.as_ref().unwrap()[i] + &m0.volume * &a[i]));
            }
            let c0 = center_of_mass(&sys).unwrap();
            let c1 = center_of_mass(&moved).unwrap();
            for i in 0..sys.dim() {
                prop_assert_eq!(&c1[i], &(&c0[i] + &a[i]));
            }
        }
    }
}
