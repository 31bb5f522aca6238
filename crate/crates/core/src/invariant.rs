//! The characteristic number `I(k; b)` of the circle action generated by `b`,
//! computed from facet integrals of the normalized Hamiltonian.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{dim_err, Error, Result};
use crate::exact::{self, dot, dot_int, factorial, from_bigint, pow, RatMatrix, RatVector, Rational};
use crate::moments::{self, BaseVertex, Degree, MomentData};
use crate::polytope::{is_delzant, Chamber, HalfSpaceSystem};

pub const INFINITE_ORDER_LABEL: &str = "nonzero I certifies infinite order in π₁(Ham)";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FacetTerm {
    pub index: usize,
    /// `(n-1)!` times the lattice volume of the facet.
    #[serde(with = "exact::serde_rational")]
    pub phi: Rational,
    /// `(n-1)!` times the lattice integral of `<x, b>` over the facet.
    #[serde(with = "exact::serde_rational")]
    pub phi_prime: Rational,
    /// `<Cm, b> * phi - phi_prime`.
    #[serde(with = "exact::serde_rational")]
    pub term: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    #[serde(with = "exact::serde_rational::vec")]
    pub cm: RatVector,
    #[serde(with = "exact::serde_rational")]
    pub cm_dot_b: Rational,
    pub facets: Vec<FacetTerm>,
    #[serde(with = "exact::serde_rational")]
    pub value: Rational,
    pub infinite_order_flag: bool,
    pub infinite_order_label: &'static str,
    /// Set when the polytope is not Delzant and the value is only formal.
    pub formal: bool,
}

/// The `b`-independent integrals behind `I`: volume and first moments of the
/// polytope and of each facet (lattice-normalized).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacetIntegrals {
    dim: usize,
    volume: Rational,
    first: RatVector,
    facet_volume: Vec<Rational>,
    facet_first: Vec<RatVector>,
}

impl FacetIntegrals {
    /// Computes the integrals without checking the Delzant condition.
    /// Facets of zero measure contribute nothing.
    pub fn compute(sys: &HalfSpaceSystem) -> Result<Self> {
        let body = moments::polytope_moments(sys, Degree::First)?;
        let n = sys.dim();
        let mut facet_volume = Vec::with_capacity(sys.facet_count());
        let mut facet_first = Vec::with_capacity(sys.facet_count());
        for j in 0..sys.facet_count() {
            if sys.facet_is_proper(j) {
                let m = moments::facet_lattice_moments(sys, j, Degree::First)?;
                facet_volume.push(m.volume);
                facet_first.push(m.first.expect("first moments requested"));
            } else {
                facet_volume.push(Rational::zero());
                facet_first.push(vec![Rational::zero(); n]);
            }
        }
        Self::assemble(n, body, facet_volume, facet_first)
    }

    fn assemble(
        dim: usize,
        body: MomentData,
        facet_volume: Vec<Rational>,
        facet_first: Vec<RatVector>,
    ) -> Result<Self> {
        if body.volume.is_zero() {
            return Err(Error::Geometry("polytope has zero volume".into()));
        }
        Ok(Self {
            dim,
            volume: body.volume,
            first: body.first.expect("first moments requested"),
            facet_volume,
            facet_first,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn volume(&self) -> &Rational {
        &self.volume
    }

    pub fn center_of_mass(&self) -> RatVector {
        self.first.iter().map(|f| f / &self.volume).collect()
    }

    pub fn facet_volumes(&self) -> &[Rational] {
        &self.facet_volume
    }

    pub fn facet_first_moments(&self) -> &[RatVector] {
        &self.facet_first
    }

    pub fn cm_dot(&self, b: &[BigInt]) -> Result<Rational> {
        self.check_b(b)?;
        Ok(dot_int(&self.first, b) / &self.volume)
    }

    fn check_b(&self, b: &[BigInt]) -> Result<()> {
        if b.len() != self.dim {
            return dim_err(format!("b has length {} in dimension {}", b.len(), self.dim));
        }
        Ok(())
    }

    /// `I(k; b)` alone.
    pub fn value(&self, b: &[BigInt]) -> Result<Rational> {
        let cm_b = self.cm_dot(b)?;
        let sum: Rational = self
            .facet_volume
            .iter()
            .zip(&self.facet_first)
            .map(|(v, f)| &cm_b * v - dot_int(f, b))
            .sum();
        Ok(sum * from_bigint(&factorial(self.dim as u32)))
    }

    pub fn report(&self, b: &[BigInt], formal: bool) -> Result<InvariantReport> {
        let cm_dot_b = self.cm_dot(b)?;
        let scale = from_bigint(&factorial(self.dim as u32 - 1));
        let facets: Vec<FacetTerm> = self
            .facet_volume
            .iter()
            .zip(&self.facet_first)
            .enumerate()
            .map(|(index, (v, f))| {
                let phi = v * &scale;
                let phi_prime = dot_int(f, b) * &scale;
                let term = &cm_dot_b * &phi - &phi_prime;
                FacetTerm {
                    index,
                    phi,
                    phi_prime,
                    term,
                }
            })
            .collect();
        let value = exact::int(self.dim as i64) * facets.iter().map(|t| &t.term).sum::<Rational>();
        Ok(InvariantReport {
            cm: self.center_of_mass(),
            cm_dot_b,
            facets,
            infinite_order_flag: !value.is_zero(),
            infinite_order_label: INFINITE_ORDER_LABEL,
            value,
            formal,
        })
    }
}

fn require_delzant(sys: &HalfSpaceSystem) -> Result<()> {
    let check = is_delzant(sys);
    if check.delzant {
        Ok(())
    } else {
        Err(Error::NotDelzant(check.diagnostics.join("; ")))
    }
}

/// `I(k; b)` with its per-facet breakdown. Non-Delzant input is rejected.
pub fn characteristic_number(sys: &HalfSpaceSystem, b: &[BigInt]) -> Result<InvariantReport> {
    characteristic_number_with(sys, b, false)
}

/// As [`characteristic_number`]; with `formal` set, non-Delzant simple
/// polytopes are evaluated anyway and the report is marked formal.
pub fn characteristic_number_with(
    sys: &HalfSpaceSystem,
    b: &[BigInt],
    formal: bool,
) -> Result<InvariantReport> {
    if b.len() != sys.dim() {
        return dim_err(format!("b has length {} in dimension {}", b.len(), sys.dim()));
    }
    let marked = match require_delzant(sys) {
        Ok(()) => false,
        Err(e) if !formal => return Err(e),
        Err(_) => {
            if !sys.is_simple() {
                return Err(Error::Geometry("formal evaluation needs a simple polytope".into()));
            }
            true
        }
    };
    FacetIntegrals::compute(sys)?.report(b, marked)
}

/// The constant making `<x, b> + c` average to zero over the polytope.
pub fn normalized_hamiltonian_offset(sys: &HalfSpaceSystem, b: &[BigInt]) -> Result<Rational> {
    require_delzant(sys)?;
    if b.len() != sys.dim() {
        return dim_err(format!("b has length {} in dimension {}", b.len(), sys.dim()));
    }
    let cm = moments::center_of_mass(sys)?;
    Ok(-dot_int(&cm, b))
}

fn value(sys: &HalfSpaceSystem, b: &[BigInt]) -> Result<Rational> {
    Ok(characteristic_number(sys, b)?.value)
}

pub fn check_translation_invariance(sys: &HalfSpaceSystem, b: &[BigInt], a: &[Rational]) -> Result<bool> {
    let moved = sys.with_offsets(sys.translate_offsets(a)?)?;
    Ok(value(&moved, b)? == value(sys, b)?)
}

pub fn check_additivity_in_b(sys: &HalfSpaceSystem, b1: &[BigInt], b2: &[BigInt]) -> Result<bool> {
    if b1.len() != b2.len() {
        return dim_err("b1 and b2 differ in length");
    }
    let sum: Vec<BigInt> = b1.iter().zip(b2).map(|(x, y)| x + y).collect();
    Ok(value(sys, &sum)? == value(sys, b1)? + value(sys, b2)?)
}

pub fn check_scaling_homogeneity(sys: &HalfSpaceSystem, b: &[BigInt], s: &Rational) -> Result<bool> {
    if !s.is_positive() {
        return Err(Error::Domain("scale factor must be positive".into()));
    }
    let scaled = sys.scaled(s)?;
    Ok(value(&scaled, b)? == pow(s, sys.dim() as u32) * value(sys, b)?)
}

/// `n! * sum_j latvol(F_j) * (<Cm, b> - <Cm(F_j), b>)`, an independent
/// evaluation route through facet centroids.
pub fn centroid_form(sys: &HalfSpaceSystem, b: &[BigInt]) -> Result<Rational> {
    let cm_b = dot_int(&moments::center_of_mass(sys)?, b);
    let mut sum = Rational::zero();
    for j in 0..sys.facet_count() {
        let vol = moments::facet_lattice_moments(sys, j, Degree::Volume)?.volume;
        let fc = moments::facet_center_of_mass(sys, j)?;
        sum += vol * (&cm_b - dot_int(&fc, b));
    }
    Ok(sum * from_bigint(&factorial(sys.dim() as u32)))
}

/// Evaluates moments anywhere in a chamber by reusing the reference
/// polytope's combinatorics: each vertex is a fixed linear image of the
/// offsets on its facets, and the reference triangulations stay valid.
#[derive(Clone, Debug)]
pub struct ChamberEvaluator {
    chamber: Chamber,
    vertex_maps: Vec<(Vec<usize>, Vec<RatVector>)>,
    body: Vec<Vec<usize>>,
    facets: Vec<Vec<Vec<usize>>>,
    formal: bool,
}

impl ChamberEvaluator {
    /// Rejects non-Delzant chambers unless `formal` is set.
    pub fn new(chamber: &Chamber, formal: bool) -> Result<Self> {
        let sys = chamber.reference();
        let marked = match require_delzant(sys) {
            Ok(()) => false,
            Err(e) if !formal => return Err(e),
            Err(_) => true,
        };
        let n = sys.dim();
        let mut vertex_maps = Vec::with_capacity(sys.vertices().len());
        for v in sys.vertices() {
            let mat = RatMatrix::from_rows(v.active.iter().map(|&j| sys.conormal_q(j).clone()).collect())?;
            let unit: Vec<RatVector> = (0..n)
                .map(|c| (0..n).map(|r| exact::int((r == c) as i64)).collect())
                .collect();
            let cols = exact::solve_many(&mat, &unit)?
                .ok_or_else(|| Error::Geometry("singular vertex cone".into()))?;
            let rows = (0..n).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
            vertex_maps.push((v.active.clone(), rows));
        }
        let body = moments::body_pieces(sys, BaseVertex::Smallest);
        let facets = (0..sys.facet_count())
            .map(|j| moments::facet_pieces(sys, j, BaseVertex::Smallest))
            .collect::<Result<_>>()?;
        Ok(Self {
            chamber: chamber.clone(),
            vertex_maps,
            body,
            facets,
            formal: marked,
        })
    }

    pub fn chamber(&self) -> &Chamber {
        &self.chamber
    }

    pub fn is_formal(&self) -> bool {
        self.formal
    }

    fn vertices_at(&self, k: &[Rational]) -> Vec<RatVector> {
        self.vertex_maps
            .iter()
            .map(|(active, rows)| {
                let local: RatVector = active.iter().map(|&j| k[j].clone()).collect();
                rows.iter().map(|r| dot(r, &local)).collect()
            })
            .collect()
    }

    /// Whether `k` lies in the chamber.
    pub fn contains(&self, k: &[Rational]) -> bool {
        let sys = self.chamber.reference();
        if k.len() != sys.facet_count() {
            return false;
        }
        self.vertex_maps.iter().zip(self.vertices_at(k)).all(|((active, _), x)| {
            (0..sys.facet_count())
                .filter(|j| active.binary_search(j).is_err())
                .all(|j| dot(sys.conormal_q(j), &x) < k[j])
        })
    }

    pub fn integrals_at(&self, k: &[Rational]) -> Result<FacetIntegrals> {
        if !self.contains(k) {
            return Err(Error::Geometry("offsets lie outside the chamber".into()));
        }
        let sys = self.chamber.reference();
        let n = sys.dim();
        let pts = self.vertices_at(k);
        let sum = |pieces: &[Vec<usize>], normal: Option<&[BigInt]>, d: usize| -> Result<MomentData> {
            let mut total = MomentData::zero(d, n, Degree::First);
            for piece in pieces {
                let verts: Vec<&RatVector> = piece.iter().map(|&i| &pts[i]).collect();
                total.accumulate(&moments::moments_of_points(&verts, normal, Degree::First)?);
            }
            Ok(total)
        };
        let body = sum(&self.body, None, n)?;
        let mut facet_volume = Vec::with_capacity(self.facets.len());
        let mut facet_first = Vec::with_capacity(self.facets.len());
        for (j, pieces) in self.facets.iter().enumerate() {
            let m = sum(pieces, Some(&sys.conormals()[j]), n - 1)?;
            facet_volume.push(m.volume);
            facet_first.push(m.first.expect("first moments requested"));
        }
        FacetIntegrals::assemble(n, body, facet_volume, facet_first)
    }

    pub fn cm_dot_at(&self, k: &[Rational], b: &[BigInt]) -> Result<Rational> {
        self.integrals_at(k)?.cm_dot(b)
    }

    pub fn invariant_at(&self, k: &[Rational], b: &[BigInt]) -> Result<Rational> {
        self.integrals_at(k)?.value(b)
    }

    pub fn report_at(&self, k: &[Rational], b: &[BigInt]) -> Result<InvariantReport> {
        self.integrals_at(k)?.report(b, self.formal)
    }
}
