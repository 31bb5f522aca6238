//! The three model families with their closed forms: simplex bundles over a
//! segment, Hirzebruch trapezoids and truncated simplices (plus the plain
//! simplex).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{dim_err, Error, Result};
use crate::exact::{self, factorial, from_bigint, int, pow, IntVector, RatVector, Rational};
use crate::invariant::{characteristic_number, ChamberEvaluator};
use crate::polytope::{combinatorial_type, Chamber, CombinatorialType, HalfSpaceSystem};

fn require_positive(name: &str, q: &Rational) -> Result<()> {
    if q.is_positive() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive, got {}", exact::format_rational(q))))
    }
}

fn b_len(b: &[BigInt], n: usize) -> Result<()> {
    if b.len() != n {
        return dim_err(format!("b has length {}, expected {n}", b.len()));
    }
    Ok(())
}

fn unit(n: usize, i: usize) -> IntVector {
    (0..n).map(|j| BigInt::from((i == j) as i64)).collect()
}

fn invariant(sys: &HalfSpaceSystem, b: &[BigInt]) -> Result<Rational> {
    Ok(characteristic_number(sys, b)?.value)
}

// ---------------------------------------------------------------------------
// Simplex bundles

/// `Δ_p` bundle over a segment with twisting `a`: conormals `-e_1..-e_p`,
/// `e_1+..+e_p`, `-e_{p+1}`, `e_{p+1} - Σ a_i e_i` with offsets
/// `0,..,0, τ, 0, λ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaPBundleSpec {
    pub p: usize,
    #[serde(with = "exact::serde_int_vec")]
    pub a: IntVector,
    #[serde(with = "exact::serde_rational")]
    pub lambda: Rational,
    #[serde(with = "exact::serde_rational")]
    pub tau: Rational,
}

/// How the two candidate chamber inequalities compare with the geometry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ChamberReadings {
    /// `λ + a_i > 0` for all i.
    pub offset_reading: bool,
    /// `λ + a_i τ > 0` for all i (the ceiling vertex heights).
    pub height_reading: bool,
    /// The constructed polytope has the combinatorics of the prism.
    pub geometric: bool,
}

impl ChamberReadings {
    pub fn readings_agree(&self) -> bool {
        self.offset_reading == self.height_reading
    }
}

impl DeltaPBundleSpec {
    pub fn new(p: usize, a: IntVector, lambda: Rational, tau: Rational) -> Result<Self> {
        let spec = Self { p, a, lambda, tau };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_i64(p: usize, a: &[i64], lambda: Rational, tau: Rational) -> Result<Self> {
        Self::new(p, exact::int_vector(a), lambda, tau)
    }

    fn validate(&self) -> Result<()> {
        if self.p < 2 {
            return Err(Error::Domain(format!("bundle family needs p >= 2, got {}", self.p)));
        }
        if self.a.len() != self.p {
            return dim_err(format!("a has length {}, expected {}", self.a.len(), self.p));
        }
        require_positive("lambda", &self.lambda)?;
        require_positive("tau", &self.tau)
    }

    pub fn dim(&self) -> usize {
        self.p + 1
    }

    /// Sum of the twisting integers.
    pub fn a_sum(&self) -> BigInt {
        self.a.iter().sum()
    }

    pub fn with_params(&self, lambda: Rational, tau: Rational) -> Result<Self> {
        Self::new(self.p, self.a.clone(), lambda, tau)
    }

    pub fn conormals(&self) -> Vec<IntVector> {
        let p = self.p;
        let mut out = Vec::with_capacity(p + 3);
        for i in 0..p {
            let mut v = vec![BigInt::zero(); p + 1];
            v[i] = BigInt::from(-1);
            out.push(v);
        }
        let mut slant = vec![BigInt::one(); p + 1];
        slant[p] = BigInt::zero();
        out.push(slant);
        out.push(unit(p + 1, p).into_iter().map(|x| -x).collect());
        let mut top: IntVector = self.a.iter().map(|x| -x).collect();
        top.push(BigInt::one());
        out.push(top);
        out
    }

    pub fn offsets(&self) -> RatVector {
        let mut k = vec![Rational::zero(); self.p];
        k.push(self.tau.clone());
        k.push(Rational::zero());
        k.push(self.lambda.clone());
        k
    }

    pub fn chamber_readings(&self) -> ChamberReadings {
        ChamberReadings {
            offset_reading: self.a.iter().all(|ai| (&self.lambda + from_bigint(ai)).is_positive()),
            height_reading: self
                .a
                .iter()
                .all(|ai| (&self.lambda + from_bigint(ai) * &self.tau).is_positive()),
            geometric: make_delta_p_bundle(self).is_ok(),
        }
    }
}

pub fn make_delta_p_bundle(spec: &DeltaPBundleSpec) -> Result<HalfSpaceSystem> {
    spec.validate()?;
    let sys = HalfSpaceSystem::new(spec.conormals(), spec.offsets())?;
    let prism = combinatorial_type(&sys).is_ok_and(|t| t == prism_type(spec.p));
    if !prism {
        return Err(Error::Geometry(format!(
            "bundle parameters do not give a prism over the {}-simplex",
            spec.p
        )));
    }
    Ok(sys)
}

/// Vertex-facet incidences of `Δ_p × Δ_1` in the bundle's facet order.
fn prism_type(p: usize) -> CombinatorialType {
    let coords: Vec<usize> = (0..p).collect();
    let mut base = vec![coords.clone()];
    for i in 0..p {
        let mut s: Vec<usize> = coords.iter().copied().filter(|&j| j != i).collect();
        s.push(p);
        base.push(s);
    }
    let incidences = base
        .into_iter()
        .flat_map(|s| {
            [p + 1, p + 2].map(|level| {
                let mut v = s.clone();
                v.push(level);
                v
            })
        })
        .collect();
    CombinatorialType { incidences }
}

struct BundleSums {
    a_sum: Rational,
    b_sum: Rational,
    a_dot_b: Rational,
    a_dot_a: Rational,
    top: Rational,
}

fn bundle_sums(spec: &DeltaPBundleSpec, b: &[BigInt]) -> Result<BundleSums> {
    b_len(b, spec.p + 1)?;
    let a: RatVector = exact::to_rational_vector(&spec.a);
    let bh: RatVector = exact::to_rational_vector(&b[..spec.p]);
    Ok(BundleSums {
        a_sum: a.iter().sum(),
        b_sum: bh.iter().sum(),
        a_dot_b: exact::dot(&a, &bh),
        a_dot_a: exact::dot(&a, &a),
        top: from_bigint(&b[spec.p]),
    })
}

/// The two parts of `Z(b)`: the contribution of the base directions
/// `b_1..b_p` and that of the fibre direction `b_{p+1}`.
pub fn bundle_z_parts(spec: &DeltaPBundleSpec, b: &[BigInt]) -> Result<(Rational, Rational)> {
    let s = bundle_sums(spec, b)?;
    let p1 = int(spec.p as i64 + 1);
    let base = int(2) * (&p1 * &s.a_dot_b - &s.a_sum * &s.b_sum);
    let fibre = &s.top * (&p1 * &s.a_dot_a - &s.a_sum * &s.a_sum);
    Ok((base, fibre))
}

/// `Z(b) = (p+1) a·(2 b̂ + b a) - A (2B + b A)`.
pub fn bundle_z(spec: &DeltaPBundleSpec, b: &[BigInt]) -> Result<Rational> {
    let (base, fibre) = bundle_z_parts(spec, b)?;
    Ok(base + fibre)
}

fn bundle_den(spec: &DeltaPBundleSpec) -> Rational {
    int(spec.p as i64 + 1) * &spec.lambda + &spec.tau * from_bigint(&spec.a_sum())
}

/// `K(λ, τ) = τ^{p+1}/(p+2) · (τ/(λ(p+1) + τA) - 1)`.
pub fn bundle_k(spec: &DeltaPBundleSpec) -> Result<Rational> {
    let den = bundle_den(spec);
    if den.is_zero() {
        return Err(Error::Domain("λ(p+1) + τA vanishes".into()));
    }
    let p = spec.p as u32;
    Ok(pow(&spec.tau, p + 1) / int(p as i64 + 2) * (&spec.tau / den - Rational::one()))
}

/// Closed form of `<Cm, b>`.
pub fn bundle_cm(spec: &DeltaPBundleSpec, b: &[BigInt]) -> Result<Rational> {
    let s = bundle_sums(spec, b)?;
    let den = bundle_den(spec);
    if den.is_zero() {
        return Err(Error::Domain("λ(p+1) + τA vanishes".into()));
    }
    let (lambda, tau) = (&spec.lambda, &spec.tau);
    let p1 = int(spec.p as i64 + 1);
    let p2 = int(spec.p as i64 + 2);
    let base = tau / &p2 * (lambda * &p2 * &s.b_sum + tau * (&s.a_sum * &s.b_sum + &s.a_dot_b)) / &den;
    let fibre_num = &p1 * &p2 * lambda * lambda
        + int(2) * &p2 * &s.a_sum * lambda * tau
        + (&s.a_dot_a + &s.a_sum * &s.a_sum) * tau * tau;
    let fibre = &s.top / int(2) * fibre_num / (&p2 * &den);
    Ok(base + fibre)
}

/// `I = K(λ, τ) · Z(b)`.
pub fn bundle_invariant(spec: &DeltaPBundleSpec, b: &[BigInt]) -> Result<Rational> {
    Ok(bundle_k(spec)? * bundle_z(spec, b)?)
}

// ---------------------------------------------------------------------------
// Hirzebruch trapezoids

/// Facets `x_1 >= 0`, `x_2 >= 0`, `x_2 <= λ`, `x_1 + k x_2 <= τ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HirzebruchSpec {
    pub k: i64,
    #[serde(with = "exact::serde_rational")]
    pub tau: Rational,
    #[serde(with = "exact::serde_rational")]
    pub lambda: Rational,
}

impl HirzebruchSpec {
    pub fn new(k: i64, tau: Rational, lambda: Rational) -> Result<Self> {
        let spec = Self { k, tau, lambda };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::Domain(format!("k must be a positive integer, got {}", self.k)));
        }
        require_positive("tau", &self.tau)?;
        require_positive("lambda", &self.lambda)
    }

    pub fn sigma(&self) -> Rational {
        &self.tau - int(self.k) * &self.lambda
    }

    pub fn with_params(&self, lambda: Rational, tau: Rational) -> Result<Self> {
        Self::new(self.k, tau, lambda)
    }
}

pub fn make_hirzebruch(spec: &HirzebruchSpec) -> Result<HalfSpaceSystem> {
    spec.validate()?;
    if !spec.sigma().is_positive() {
        return Err(Error::Geometry("σ = τ - kλ must be positive".into()));
    }
    HalfSpaceSystem::from_i64(
        &[vec![-1, 0], vec![0, -1], vec![0, 1], vec![1, spec.k]],
        vec![int(0), int(0), spec.lambda.clone(), spec.tau.clone()],
    )
}

pub fn hirzebruch_cm(spec: &HirzebruchSpec) -> RatVector {
    let (t, l, k) = (&spec.tau, &spec.lambda, &int(spec.k));
    let den = int(3) * (int(2) * t - k * l);
    vec![
        (int(3) * t * t - int(3) * k * t * l + k * k * l * l) / &den,
        (int(3) * l * t - int(2) * k * l * l) / &den,
    ]
}

/// `2 b_2 = k b_1`.
pub fn hirzebruch_mass_linear(k: i64, b: &[BigInt]) -> bool {
    b.len() == 2 && BigInt::from(2) * &b[1] == BigInt::from(k) * &b[0]
}

/// The factor `b_1 - 2 b_2 / k` relating `I(b)` to `I(e_1)`.
pub fn hirzebruch_loop_factor(k: i64, b: &[BigInt]) -> Result<Rational> {
    b_len(b, 2)?;
    Ok(from_bigint(&b[0]) - int(2) * from_bigint(&b[1]) / int(k))
}

pub fn hirzebruch_loop_ratio_check(spec: &HirzebruchSpec, b: &[BigInt]) -> Result<bool> {
    let sys = make_hirzebruch(spec)?;
    let lhs = invariant(&sys, b)?;
    let rhs = hirzebruch_loop_factor(spec.k, b)? * invariant(&sys, &unit(2, 0))?;
    Ok(lhs == rhs)
}

// ---------------------------------------------------------------------------
// Truncated simplices

/// `S_n(τ)` cut by `x_n <= λ`; facets `x_j >= 0` (j = 1..n), then the
/// ceiling `x_n <= λ`, then the slant `x_1 + .. + x_n <= τ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedSimplexSpec {
    pub n: usize,
    #[serde(with = "exact::serde_rational")]
    pub tau: Rational,
    #[serde(with = "exact::serde_rational")]
    pub lambda: Rational,
}

impl TruncatedSimplexSpec {
    pub fn new(n: usize, tau: Rational, lambda: Rational) -> Result<Self> {
        let spec = Self { n, tau, lambda };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Domain(format!("truncated simplex needs n >= 2, got {}", self.n)));
        }
        require_positive("tau", &self.tau)?;
        require_positive("lambda", &self.lambda)
    }

    pub fn sigma(&self) -> Rational {
        &self.tau - &self.lambda
    }

    pub fn epsilon(&self) -> Rational {
        self.sigma() / &self.tau
    }

    pub fn with_params(&self, lambda: Rational, tau: Rational) -> Result<Self> {
        Self::new(self.n, tau, lambda)
    }
}

fn negated_units(n: usize) -> Vec<IntVector> {
    (0..n).map(|i| unit(n, i).into_iter().map(|x| -x).collect()).collect()
}

pub fn make_truncated_simplex(spec: &TruncatedSimplexSpec) -> Result<HalfSpaceSystem> {
    spec.validate()?;
    if !spec.sigma().is_positive() {
        return Err(Error::Geometry("σ = τ - λ must be positive".into()));
    }
    let n = spec.n;
    let mut conormals = negated_units(n);
    conormals.push(unit(n, n - 1));
    conormals.push(vec![BigInt::one(); n]);
    let mut offsets = vec![Rational::zero(); n];
    offsets.push(spec.lambda.clone());
    offsets.push(spec.tau.clone());
    HalfSpaceSystem::new(conormals, offsets)
}

pub fn truncated_cm(spec: &TruncatedSimplexSpec) -> RatVector {
    let n = spec.n as u32;
    let (t, s) = (&spec.tau, &spec.sigma());
    let den = pow(t, n) - pow(s, n);
    let diag = (pow(t, n + 1) - pow(s, n + 1)) / int(n as i64 + 1);
    let mut cm = vec![&diag / &den; spec.n];
    cm[spec.n - 1] = (&diag - &spec.lambda * pow(s, n)) / &den;
    cm
}

/// `n b_n = b_1 + .. + b_{n-1}`.
pub fn truncated_mass_linear(n: usize, b: &[BigInt]) -> bool {
    b.len() == n && n >= 1 && BigInt::from(n) * &b[n - 1] == b[..n - 1].iter().sum::<BigInt>()
}

/// `n b_n - (b_1 + .. + b_{n-1})`.
pub fn truncated_criterion(b: &[BigInt]) -> BigInt {
    let n = b.len();
    BigInt::from(n) * &b[n - 1] - b[..n - 1].iter().sum::<BigInt>()
}

/// Coefficient of `ε^{n-1}` in `I` along `σ = ετ`:
/// `n! (n b_n - Σ_{j<n} b_j) τ^n / ((n+1)(n-2)!)`.
pub fn truncated_leading_coefficient(n: usize, tau: &Rational, b: &[BigInt]) -> Result<Rational> {
    if n < 3 {
        return Err(Error::Domain(format!("leading coefficient needs n >= 3, got {n}")));
    }
    b_len(b, n)?;
    let n32 = n as u32;
    Ok(from_bigint(&factorial(n32)) * from_bigint(&truncated_criterion(b)) * pow(tau, n32)
        / (int(n as i64 + 1) * from_bigint(&factorial(n32 - 2))))
}

/// Power series of `num / den` up to `count` terms; `den[0]` must be nonzero.
pub fn series_quotient(num: &[Rational], den: &[Rational], count: usize) -> Result<RatVector> {
    let Some(d0) = den.first().filter(|d| !d.is_zero()) else {
        return Err(Error::Domain("series denominator has zero constant term".into()));
    };
    let mut out: RatVector = Vec::with_capacity(count);
    for i in 0..count {
        let mut c = num.get(i).cloned().unwrap_or_else(Rational::zero);
        for j in 1..=i.min(den.len() - 1) {
            c -= &den[j] * &out[i - j];
        }
        out.push(c / d0);
    }
    Ok(out)
}

/// Fits `P/Q` with `deg P <= num_deg`, `deg Q <= den_deg`, `Q(0) = 1` through
/// `fit` and checks it exactly on `holdout`.
pub fn fit_rational_function(
    fit: &[(Rational, Rational)],
    holdout: &[(Rational, Rational)],
    num_deg: usize,
    den_deg: usize,
) -> Result<(RatVector, RatVector)> {
    let unknowns = num_deg + 1 + den_deg;
    if fit.len() < unknowns {
        return dim_err(format!("{} points for {unknowns} unknowns", fit.len()));
    }
    let rows: Vec<RatVector> = fit
        .iter()
        .map(|(x, y)| {
            let mut row = Vec::with_capacity(unknowns);
            let mut xp = Rational::one();
            for _ in 0..=num_deg {
                row.push(xp.clone());
                xp *= x;
            }
            let mut xp = x.clone();
            for _ in 0..den_deg {
                row.push(-(y * &xp));
                xp *= x;
            }
            row
        })
        .collect();
    let rhs: RatVector = fit.iter().map(|(_, y)| y.clone()).collect();
    let sol = exact::solve_consistent(&rows, &rhs)?
        .ok_or_else(|| Error::Consistency("no rational function fits the samples".into()))?;
    let num = sol[..=num_deg].to_vec();
    let mut den = vec![Rational::one()];
    den.extend_from_slice(&sol[num_deg + 1..]);
    let eval = |c: &[Rational], x: &Rational| c.iter().rev().fold(Rational::zero(), |acc, ci| acc * x + ci);
    for (x, y) in holdout {
        let q = eval(&den, x);
        if q.is_zero() || eval(&num, x) / q != *y {
            return Err(Error::Consistency(format!(
                "reconstruction misses held-out point {}",
                exact::format_rational(x)
            )));
        }
    }
    Ok((num, den))
}

/// Taylor coefficients `c_0..c_{count-1}` in `ε = σ/τ` of `I(τ, τ(1-ε); b)` for
/// fixed `τ`, recovered by exact rational-function reconstruction from
/// samples along the ray.
pub fn truncated_epsilon_coefficients(
    n: usize,
    tau: &Rational,
    b: &[BigInt],
    count: usize,
) -> Result<RatVector> {
    b_len(b, n)?;
    let reference = TruncatedSimplexSpec::new(n, tau.clone(), tau / int(2))?;
    let ch = Chamber::new(make_truncated_simplex(&reference)?)?;
    let ev = ChamberEvaluator::new(&ch, false)?;
    let (num_deg, den_deg) = (2 * n, n);
    let fit_count = num_deg + den_deg + 1;
    let total = fit_count + 2;
    let mut pts = Vec::with_capacity(total);
    for i in 1..=total {
        let eps = exact::rat(i as i64, total as i64 + 1);
        let spec = TruncatedSimplexSpec::new(n, tau.clone(), tau * (Rational::one() - &eps))?;
        let k = make_truncated_simplex(&spec)?.offsets().clone();
        pts.push((eps, ev.invariant_at(&k, b)?));
    }
    let (num, den) = fit_rational_function(&pts[..fit_count], &pts[fit_count..], num_deg, den_deg)?;
    series_quotient(&num, &den, count)
}

/// The `ε^{n-1}` coefficient extracted by reconstruction.
pub fn reconstructed_leading_coefficient(n: usize, tau: &Rational, b: &[BigInt]) -> Result<Rational> {
    if n < 2 {
        return Err(Error::Domain("n must be at least 2".into()));
    }
    Ok(truncated_epsilon_coefficients(n, tau, b, n)?.pop().expect("n coefficients"))
}

/// `I(b) = (Σ_{j<n} b_j - n b_n) · I(e_1)` on the truncated simplex; for
/// n = 3 this reads `I(e_1) = I(e_2) = -I(e_3)/3`.
pub fn truncated_loop_ratio_check(spec: &TruncatedSimplexSpec, b: &[BigInt]) -> Result<bool> {
    let sys = make_truncated_simplex(spec)?;
    b_len(b, spec.n)?;
    let lhs = invariant(&sys, b)?;
    let rhs = -from_bigint(&truncated_criterion(b)) * invariant(&sys, &unit(spec.n, 0))?;
    Ok(lhs == rhs)
}

// ---------------------------------------------------------------------------
// Plain simplices

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplexSpec {
    pub n: usize,
    #[serde(with = "exact::serde_rational")]
    pub tau: Rational,
}

impl SimplexSpec {
    pub fn new(n: usize, tau: Rational) -> Result<Self> {
        if n < 1 {
            return Err(Error::Domain("simplex needs n >= 1".into()));
        }
        require_positive("tau", &tau)?;
        Ok(Self { n, tau })
    }
}

/// `S_n(τ)`: facets `x_j >= 0`, then `x_1 + .. + x_n <= τ`.
pub fn make_simplex(spec: &SimplexSpec) -> Result<HalfSpaceSystem> {
    SimplexSpec::new(spec.n, spec.tau.clone())?;
    let mut conormals = negated_units(spec.n);
    conormals.push(vec![BigInt::one(); spec.n]);
    let mut offsets = vec![Rational::zero(); spec.n];
    offsets.push(spec.tau.clone());
    HalfSpaceSystem::new(conormals, offsets)
}

pub fn simplex_invariant_zero_check(n: usize, tau: &Rational, b: &[BigInt]) -> Result<bool> {
    if n < 2 {
        return Err(Error::Domain("n must be at least 2".into()));
    }
    let sys = make_simplex(&SimplexSpec::new(n, tau.clone())?)?;
    Ok(invariant(&sys, b)?.is_zero())
}

// ---------------------------------------------------------------------------
// Dispatch over families

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilySpec {
    DeltaPBundle(DeltaPBundleSpec),
    Hirzebruch(HirzebruchSpec),
    TruncatedSimplex(TruncatedSimplexSpec),
    Simplex(SimplexSpec),
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::DeltaPBundle(_) => "delta-p-bundle",
            FamilySpec::Hirzebruch(_) => "hirzebruch",
            FamilySpec::TruncatedSimplex(_) => "truncated-simplex",
            FamilySpec::Simplex(_) => "simplex",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FamilySpec::DeltaPBundle(s) => s.p + 1,
            FamilySpec::Hirzebruch(_) => 2,
            FamilySpec::TruncatedSimplex(s) => s.n,
            FamilySpec::Simplex(s) => s.n,
        }
    }

    /// Checks the parameter ranges each constructor relies on.
    pub fn validate(&self) -> Result<()> {
        match self {
            FamilySpec::DeltaPBundle(s) => s.validate(),
            FamilySpec::Hirzebruch(s) => s.validate(),
            FamilySpec::TruncatedSimplex(s) => s.validate(),
            FamilySpec::Simplex(s) => SimplexSpec::new(s.n, s.tau.clone()).map(drop),
        }
    }

    pub fn build(&self) -> Result<HalfSpaceSystem> {
        match self {
            FamilySpec::DeltaPBundle(s) => make_delta_p_bundle(s),
            FamilySpec::Hirzebruch(s) => make_hirzebruch(s),
            FamilySpec::TruncatedSimplex(s) => make_truncated_simplex(s),
            FamilySpec::Simplex(s) => make_simplex(s),
        }
    }

    /// Replaces the named parameters (`tau`, `lambda`); unknown names are a
    /// domain error, and the simplex has no `lambda`.
    pub fn with_param(&self, name: &str, value: Rational) -> Result<Self> {
        let bad = || Error::Domain(format!("family {} has no parameter {name}", self.name()));
        let mut out = self.clone();
        match (&mut out, name) {
            (FamilySpec::DeltaPBundle(s), "tau") => s.tau = value,
            (FamilySpec::DeltaPBundle(s), "lambda") => s.lambda = value,
            (FamilySpec::Hirzebruch(s), "tau") => s.tau = value,
            (FamilySpec::Hirzebruch(s), "lambda") => s.lambda = value,
            (FamilySpec::TruncatedSimplex(s), "tau") => s.tau = value,
            (FamilySpec::TruncatedSimplex(s), "lambda") => s.lambda = value,
            (FamilySpec::Simplex(s), "tau") => s.tau = value,
            _ => return Err(bad()),
        }
        Ok(out)
    }

    /// The family's own mass-linearity criterion.
    pub fn closed_form_mass_linear(&self, b: &[BigInt]) -> Result<bool> {
        b_len(b, self.dim())?;
        Ok(match self {
            FamilySpec::DeltaPBundle(s) => bundle_z(s, b)?.is_zero(),
            FamilySpec::Hirzebruch(s) => hirzebruch_mass_linear(s.k, b),
            FamilySpec::TruncatedSimplex(s) => truncated_mass_linear(s.n, b),
            FamilySpec::Simplex(_) => true,
        })
    }

    /// Closed-form `<Cm, b>`.
    pub fn closed_form_cm_dot(&self, b: &[BigInt]) -> Result<Rational> {
        b_len(b, self.dim())?;
        let cm = match self {
            FamilySpec::DeltaPBundle(s) => return bundle_cm(s, b),
            FamilySpec::Hirzebruch(s) => hirzebruch_cm(s),
            FamilySpec::TruncatedSimplex(s) => truncated_cm(s),
            FamilySpec::Simplex(s) => vec![&s.tau / int(s.n as i64 + 1); s.n],
        };
        Ok(exact::dot_int(&cm, b))
    }

    /// Closed-form invariant. The bundle uses `K·Z` and the simplex is zero;
    /// the trapezoid and the truncated simplex use their loop-ratio identities,
    /// which express `I(b)` through the single value `I(e_1)`.
    pub fn closed_form_invariant(&self, b: &[BigInt]) -> Result<Rational> {
        b_len(b, self.dim())?;
        match self {
            FamilySpec::DeltaPBundle(s) => bundle_invariant(s, b),
            FamilySpec::Simplex(_) => Ok(Rational::zero()),
            FamilySpec::Hirzebruch(s) => {
                let base = invariant(&make_hirzebruch(s)?, &unit(2, 0))?;
                Ok(hirzebruch_loop_factor(s.k, b)? * base)
            }
            FamilySpec::TruncatedSimplex(s) => {
                let base = invariant(&make_truncated_simplex(s)?, &unit(s.n, 0))?;
                Ok(-from_bigint(&truncated_criterion(b)) * base)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Cross-family coherence

/// A coordinate permutation `perm` (new coordinate `i` is old coordinate
/// `perm[i]`) carrying `from` onto `to` as sets of half-spaces, trying the
/// identity first.
pub fn coordinate_correspondence(from: &HalfSpaceSystem, to: &HalfSpaceSystem) -> Option<Vec<usize>> {
    let n = from.dim();
    if to.dim() != n || to.facet_count() != from.facet_count() {
        return None;
    }
    let target: std::collections::BTreeSet<(IntVector, Rational)> = to
        .conormals()
        .iter()
        .cloned()
        .zip(to.offsets().iter().cloned())
        .collect();
    permutations(n).into_iter().find(|perm| {
        from.conormals().iter().zip(from.offsets()).all(|(c, k)| {
            let moved: IntVector = perm.iter().map(|&i| c[i].clone()).collect();
            target.contains(&(moved, k.clone()))
        })
    })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in (0..=rest.len()).rev() {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coherence {
    pub permutation: Vec<usize>,
    pub truncated_value: Rational,
    pub hirzebruch_value: Rational,
}

impl Coherence {
    pub fn holds(&self) -> bool {
        self.truncated_value == self.hirzebruch_value
    }
}

/// Compares `I` of the truncated simplex (n = 2) with that of the k = 1
/// trapezoid at the same `(τ, λ)`, with `b` carried through the coordinate
/// correspondence between the two systems.
pub fn truncated_hirzebruch_coherence(tau: &Rational, lambda: &Rational, b: &[BigInt]) -> Result<Coherence> {
    b_len(b, 2)?;
    let trunc = make_truncated_simplex(&TruncatedSimplexSpec::new(2, tau.clone(), lambda.clone())?)?;
    let hirz = make_hirzebruch(&HirzebruchSpec::new(1, tau.clone(), lambda.clone())?)?;
    let perm = coordinate_correspondence(&trunc, &hirz)
        .ok_or_else(|| Error::Consistency("no coordinate correspondence".into()))?;
    let moved: IntVector = perm.iter().map(|&i| b[i].clone()).collect();
    Ok(Coherence {
        truncated_value: invariant(&trunc, b)?,
        hirzebruch_value: invariant(&hirz, &moved)?,
        permutation: perm,
    })
}
