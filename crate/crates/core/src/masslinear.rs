//! Mass linearity: whether `k -> <Cm(Δ(k)), b>` is linear on a chamber, and
//! the polynomial form of `I` on the chamber when it is.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{dim_err, Error, Result};
use crate::exact::{self, dot, int, RatMatrix, RatVector, Rational};
use crate::invariant::ChamberEvaluator;
use crate::polytope::{extent, sample_chamber, Chamber};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SamplingConfig {
    /// Validation points; `None` means `(n + 3) * m`.
    pub validation: Option<usize>,
    pub seed: u64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            validation: None,
            seed: 0,
        }
    }
}

impl SamplingConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            validation: None,
            seed,
        }
    }

    fn validation_count(&self, ch: &Chamber) -> usize {
        self.validation
            .unwrap_or((ch.dim() + 3) * ch.facet_count())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    #[serde(with = "exact::serde_rational::vec")]
    pub offsets: RatVector,
    #[serde(with = "exact::serde_rational")]
    pub observed: Rational,
    #[serde(with = "exact::serde_rational")]
    pub predicted: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearityVerdict {
    pub linear: bool,
    /// `γ` with `<Cm, b> = Σ γ_j k_j`, present iff linear.
    #[serde(with = "exact::serde_rational::option_vec")]
    pub coefficients: Option<RatVector>,
    /// Constant term of the fitted affine function; zero whenever linear.
    #[serde(with = "exact::serde_rational")]
    pub intercept: Rational,
    /// First validation point where the fit fails, present iff not linear.
    pub witness: Option<Witness>,
    /// The `m + 1` points used for the fit.
    #[serde(serialize_with = "serialize_points")]
    pub frame: Vec<RatVector>,
    /// The points used to validate it.
    #[serde(serialize_with = "serialize_points")]
    pub validation: Vec<RatVector>,
}

fn serialize_points<S: serde::Serializer>(pts: &[RatVector], s: S) -> std::result::Result<S::Ok, S::Error> {
    let text: Vec<Vec<String>> = pts
        .iter()
        .map(|p| p.iter().map(exact::format_rational).collect())
        .collect();
    text.serialize(s)
}

fn check_b(ch: &Chamber, b: &[BigInt]) -> Result<()> {
    if b.len() != ch.dim() {
        return dim_err(format!("b has length {} in dimension {}", b.len(), ch.dim()));
    }
    Ok(())
}

const MAX_HALVINGS: usize = 64;

/// Fits an affine function of `k` to `<Cm, b>` through an affine frame at the
/// reference offsets, then checks it exactly on a seeded validation grid.
pub fn is_mass_linear(ch: &Chamber, b: &[BigInt], cfg: &SamplingConfig) -> Result<LinearityVerdict> {
    check_b(ch, b)?;
    let ev = ChamberEvaluator::new(ch, true)?;
    let k0 = ch.reference().offsets().clone();
    let v0 = ev.cm_dot_at(&k0, b)?;
    let start = extent(ch.reference()) / int(8);
    let mut frame = vec![k0.clone()];
    let mut gamma = Vec::with_capacity(k0.len());
    for j in 0..k0.len() {
        let mut delta = start.clone();
        let mut found = None;
        for _ in 0..MAX_HALVINGS {
            let mut k = k0.clone();
            k[j] += &delta;
            if ev.contains(&k) {
                found = Some(k);
                break;
            }
            delta /= int(2);
        }
        let k = found.ok_or_else(|| Error::Sampling(format!("no frame point along facet {j}")))?;
        gamma.push((ev.cm_dot_at(&k, b)? - &v0) / &delta);
        frame.push(k);
    }
    let intercept = &v0 - dot(&gamma, &k0);
    let count = cfg.validation_count(ch);
    let mut validation = sample_chamber(ch, count + 1, cfg.seed)?;
    validation.remove(0);
    let observed: Vec<Rational> = validation
        .par_iter()
        .map(|k| ev.cm_dot_at(k, b))
        .collect::<Result<_>>()?;
    let witness = validation.iter().zip(observed).find_map(|(k, obs)| {
        let predicted = dot(&gamma, k) + &intercept;
        (obs != predicted).then(|| Witness {
            offsets: k.clone(),
            observed: obs,
            predicted,
        })
    });
    let linear = witness.is_none();
    if linear && !intercept.is_zero() {
        return Err(Error::Consistency(format!(
            "exact affine fit with nonzero intercept {}",
            exact::format_rational(&intercept)
        )));
    }
    Ok(LinearityVerdict {
        linear,
        coefficients: linear.then_some(gamma),
        intercept,
        witness,
        frame,
        validation,
    })
}

/// The fitted `γ`; a domain error when the pair is not mass linear.
pub fn mass_linear_coefficients(ch: &Chamber, b: &[BigInt]) -> Result<RatVector> {
    let v = is_mass_linear(ch, b, &SamplingConfig::default())?;
    v.coefficients
        .ok_or_else(|| Error::Domain("the pair is not mass linear".into()))
}

/// A polynomial in the `m` offsets, stored by exponent vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChamberPolynomial {
    pub vars: usize,
    pub degree: usize,
    pub terms: BTreeMap<Vec<u32>, Rational>,
}

#[derive(Serialize)]
struct TermOut<'a> {
    exponents: &'a [u32],
    coeff: String,
}

impl Serialize for ChamberPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let terms: Vec<TermOut> = self
            .terms
            .iter()
            .map(|(e, c)| TermOut {
                exponents: e,
                coeff: exact::format_rational(c),
            })
            .collect();
        let mut st = s.serialize_struct("ChamberPolynomial", 3)?;
        st.serialize_field("vars", &self.vars)?;
        st.serialize_field("degree", &self.degree)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

impl ChamberPolynomial {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.terms
            .keys()
            .all(|e| e.iter().sum::<u32>() as usize == self.degree)
    }

    pub fn evaluate(&self, k: &[Rational]) -> Rational {
        self.terms
            .iter()
            .map(|(e, c)| c * monomial(e, k))
            .sum()
    }
}

fn monomial(e: &[u32], k: &[Rational]) -> Rational {
    e.iter()
        .zip(k)
        .filter(|(p, _)| **p > 0)
        .map(|(p, x)| exact::pow(x, *p))
        .product()
}

/// Exponent vectors of all degree-`d` monomials in `m` variables, in
/// lexicographically decreasing order.
pub fn homogeneous_exponents(m: usize, d: usize) -> Vec<Vec<u32>> {
    if m == 0 {
        return if d == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    if m == 1 {
        return vec![vec![d as u32]];
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in homogeneous_exponents(m - 1, d - first) {
            rest.insert(0, first as u32);
            out.push(rest);
        }
    }
    out
}

fn lcm_of_denominators(k: &[Rational]) -> BigInt {
    use num_integer::Integer;
    k.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Integer chamber points near a scaled copy of the reference, for
/// interpolation: `count` distinct points drawn with a seeded generator.
fn lattice_points(ev: &ChamberEvaluator, count: usize, seed: u64) -> Result<Vec<RatVector>> {
    let ch = ev.chamber();
    let reference = ch.reference().offsets();
    let base = lcm_of_denominators(reference);
    let spread: i64 = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scale = BigInt::from(4);
    for _ in 0..12 {
        let centre: RatVector = reference
            .iter()
            .map(|k| k * exact::from_bigint(&(&base * &scale)))
            .collect();
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::with_capacity(count);
        let budget = 16 * count + 64;
        for _ in 0..budget {
            let k: RatVector = centre
                .iter()
                .map(|c| c + int(rng.random_range(-spread..=spread)))
                .collect();
            if ev.contains(&k) && seen.insert(k.clone()) {
                out.push(k);
                if out.len() == count {
                    return Ok(out);
                }
            }
        }
        scale *= 2;
    }
    Err(Error::Sampling(format!("could not place {count} lattice points in the chamber")))
}

/// For several mass linear `b` at once: the homogeneous degree-`n` polynomial
/// agreeing with `I(k; b)` on a spanning set of chamber points, verified on
/// held-out points.
pub fn interpolate_invariants(ch: &Chamber, bs: &[Vec<BigInt>]) -> Result<Vec<ChamberPolynomial>> {
    for b in bs {
        check_b(ch, b)?;
        if !is_mass_linear(ch, b, &SamplingConfig::default())?.linear {
            return Err(Error::Domain(
                "interpolation needs a mass linear pair; I is not polynomial otherwise".into(),
            ));
        }
    }
    let ev = ChamberEvaluator::new(ch, false)?;
    let (m, n) = (ch.facet_count(), ch.dim());
    let exps = homogeneous_exponents(m, n);
    let holdout = 2 * m;
    for attempt in 0..4u64 {
        let pts = lattice_points(&ev, exps.len() + holdout, attempt)?;
        let (fit, check) = pts.split_at(exps.len());
        let rows: Vec<RatVector> = fit
            .iter()
            .map(|k| exps.iter().map(|e| monomial(e, k)).collect())
            .collect();
        let values: Vec<Vec<Rational>> = pts
            .par_iter()
            .map(|k| {
                let integrals = ev.integrals_at(k)?;
                bs.iter().map(|b| integrals.value(b)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let rhs: Vec<RatVector> = (0..bs.len())
            .map(|c| values[..exps.len()].iter().map(|row| row[c].clone()).collect())
            .collect();
        let Some(sols) = exact::solve_many(&RatMatrix::from_rows(rows)?, &rhs)? else {
            continue;
        };
        let mut out = Vec::with_capacity(bs.len());
        for (c, sol) in sols.into_iter().enumerate() {
            let poly = ChamberPolynomial {
                vars: m,
                degree: n,
                terms: exps
                    .iter()
                    .cloned()
                    .zip(sol)
                    .filter(|(_, q)| !q.is_zero())
                    .collect(),
            };
            for (k, row) in check.iter().zip(&values[exps.len()..]) {
                if poly.evaluate(k) != row[c] {
                    return Err(Error::Consistency(
                        "interpolated polynomial misses a held-out chamber point".into(),
                    ));
                }
            }
            out.push(poly);
        }
        return Ok(out);
    }
    Err(Error::Sampling("interpolation points were never unisolvent".into()))
}

pub fn interpolate_invariant(ch: &Chamber, b: &[BigInt]) -> Result<ChamberPolynomial> {
    Ok(interpolate_invariants(ch, &[b.to_vec()])?.remove(0))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlabReport {
    pub pair: (usize, usize),
    /// Coefficients of `I` along the line, in powers of the slab width.
    #[serde(with = "exact::serde_rational::vec")]
    pub line_polynomial: RatVector,
    /// `I` at zero slab width `k_a + k_i = 0`.
    #[serde(with = "exact::serde_rational")]
    pub at_collapse: Rational,
    /// `I` where `k_a - k_i = 0` on the same line.
    #[serde(with = "exact::serde_rational")]
    pub at_difference: Rational,
}

impl SlabReport {
    pub fn divisible(&self) -> bool {
        self.at_collapse.is_zero()
    }
}

fn horner(c: &[Rational], x: &Rational) -> Rational {
    c.iter().rev().fold(Rational::zero(), |acc, ci| acc * x + ci)
}

/// Restricts `I` to the line moving only `k_a`, so the slab width
/// `w = k_a + k_i` varies with all other offsets fixed, and interpolates it
/// as a polynomial of degree `n` in `w`.
pub fn slab_divisibility(ch: &Chamber, b: &[BigInt], pair: (usize, usize)) -> Result<SlabReport> {
    check_b(ch, b)?;
    let (a, i) = pair;
    let sys = ch.reference();
    if a >= sys.facet_count() || i >= sys.facet_count() || a == i {
        return dim_err(format!("facet pair ({a}, {i}) is out of range"));
    }
    let opposite = sys.conormals()[a]
        .iter()
        .zip(&sys.conormals()[i])
        .all(|(x, y)| x == &-y);
    if !opposite {
        return Err(Error::Domain(format!("facets {a} and {i} are not antipodal")));
    }
    if !is_mass_linear(ch, b, &SamplingConfig::default())?.linear {
        return Err(Error::Domain("slab divisibility needs a mass linear pair".into()));
    }
    let ev = ChamberEvaluator::new(ch, false)?;
    let k0 = sys.offsets();
    let w0 = &k0[a] + &k0[i];
    let n = sys.dim();
    let needed = n + 3;
    let denom = 4 * needed as i64;
    let mut samples = Vec::with_capacity(needed);
    for j in (1..=denom).rev() {
        let w = &w0 * exact::rat(j, denom);
        let mut k = k0.clone();
        k[a] = &w - &k0[i];
        if ev.contains(&k) {
            samples.push((w, ev.invariant_at(&k, b)?));
            if samples.len() == needed {
                break;
            }
        }
    }
    if samples.len() < needed {
        return Err(Error::Sampling("too few chamber points along the slab line".into()));
    }
    let (fit, check) = samples.split_at(n + 1);
    let rows: Vec<RatVector> = fit
        .iter()
        .map(|(w, _)| (0..=n as u32).map(|e| exact::pow(w, e)).collect())
        .collect();
    let rhs: RatVector = fit.iter().map(|(_, v)| v.clone()).collect();
    let coeffs = exact::solve(&RatMatrix::from_rows(rows)?, &rhs)?
        .ok_or_else(|| Error::Consistency("degenerate slab samples".into()))?;
    if check.iter().any(|(w, v)| horner(&coeffs, w) != *v) {
        return Err(Error::Consistency("I is not polynomial along the slab line".into()));
    }
    // k_a - k_i = 0 on this line means w = 2 k_i
    let w_diff = int(2) * &k0[i];
    Ok(SlabReport {
        pair,
        at_collapse: coeffs[0].clone(),
        at_difference: horner(&coeffs, &w_diff),
        line_polynomial: coeffs,
    })
}

pub fn check_slab_divisibility(ch: &Chamber, b: &[BigInt], pair: (usize, usize)) -> Result<bool> {
    Ok(slab_divisibility(ch, b, pair)?.divisible())
}

/// Antipodal facet pairs `(a, i)` with `a < i`.
pub fn antipodal_pairs(ch: &Chamber) -> Vec<(usize, usize)> {
    let cs = ch.reference().conormals();
    let mut out = Vec::new();
    for a in 0..cs.len() {
        for i in a + 1..cs.len() {
            if cs[a].iter().zip(&cs[i]).all(|(x, y)| x == &-y) {
                out.push((a, i));
            }
        }
    }
    out
}
