//! Named check suites over the family grids, shared by the command line and
//! the acceptance tests.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{self, factorial, from_bigint, int, int_vector, pow, rat, IntVector, RatVector, Rational};
use crate::families::{
    bundle_cm, bundle_invariant, bundle_k, bundle_z, hirzebruch_cm, hirzebruch_loop_ratio_check,
    hirzebruch_mass_linear, make_delta_p_bundle, make_hirzebruch, make_simplex, make_truncated_simplex,
    reconstructed_leading_coefficient, truncated_cm, truncated_hirzebruch_coherence,
    truncated_leading_coefficient, truncated_mass_linear, DeltaPBundleSpec, HirzebruchSpec, SimplexSpec,
    TruncatedSimplexSpec,
};
use crate::invariant::{characteristic_number, FacetIntegrals};
use crate::masslinear::{antipodal_pairs, check_slab_divisibility, interpolate_invariants, is_mass_linear, SamplingConfig};
use crate::moments::{polytope_moments, Degree};
use crate::polytope::{same_chamber, Chamber, HalfSpaceSystem};

/// Suite names accepted by [`run_suite`], in run order for `"all"`.
pub const SUITES: &[&str] = &[
    "lemma-moments",
    "bundle-factorization",
    "bundle-equivalence",
    "hirzebruch",
    "truncated",
    "structural",
    "coherence",
    "equivalences",
    "performance",
];

/// Ceiling for a single invariant computation in the performance suite.
pub const SINGLE_INVARIANT_LIMIT: Duration = Duration::from_secs(1);

const MAX_FAILURES_KEPT: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: usize,
    pub total: usize,
    /// The first few failing cases.
    pub failures: Vec<String>,
}

impl CheckOutcome {
    pub fn ok(&self) -> bool {
        self.passed == self.total && self.total > 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckOutcome>,
    pub elapsed_ms: u128,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::ok)
    }

    pub fn counts(&self) -> (usize, usize) {
        self.checks
            .iter()
            .fold((0, 0), |(p, t), c| (p + c.passed, t + c.total))
    }
}

/// Accumulates named pass/fail tallies.
#[derive(Default)]
struct Tally {
    checks: Vec<CheckOutcome>,
}

type Case = (bool, String);

impl Tally {
    fn record(&mut self, name: &str, cases: impl IntoIterator<Item = Case>) {
        let idx = match self.checks.iter().position(|c| c.name == name) {
            Some(i) => i,
            None => {
                self.checks.push(CheckOutcome {
                    name: name.to_string(),
                    passed: 0,
                    total: 0,
                    failures: Vec::new(),
                });
                self.checks.len() - 1
            }
        };
        let check = &mut self.checks[idx];
        for (ok, label) in cases {
            check.total += 1;
            if ok {
                check.passed += 1;
            } else if check.failures.len() < MAX_FAILURES_KEPT {
                check.failures.push(label);
            }
        }
    }

    fn merge(&mut self, cases: Vec<(&'static str, Case)>) {
        for (name, case) in cases {
            self.record(name, [case]);
        }
    }
}

fn case(r: Result<bool>, label: impl FnOnce() -> String) -> Case {
    match r {
        Ok(true) => (true, String::new()),
        Ok(false) => (false, label()),
        Err(e) => (false, format!("{}: {e}", label())),
    }
}

fn fmt_b(b: &[BigInt]) -> String {
    format!("b=({})", b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

fn fmt_q(q: &Rational) -> String {
    exact::format_rational(q)
}

// ---------------------------------------------------------------------------
// Grids

pub mod grids {
    use super::*;

    pub fn bundle_twists() -> Vec<IntVector> {
        [&[1, 0][..], &[2, -1], &[0, 0], &[1, 1, 1], &[2, 0, -1]]
            .iter()
            .map(|a| int_vector(a))
            .collect()
    }

    pub fn bundle_lambdas() -> Vec<Rational> {
        vec![rat(5, 2), int(3), rat(7, 2), int(5)]
    }

    pub fn bundle_taus() -> Vec<Rational> {
        vec![rat(1, 3), int(1), rat(3, 2), int(2)]
    }

    /// Ten directions per dimension, with pure base, pure fibre and mixed
    /// entries.
    pub fn bundle_directions(p: usize) -> Vec<IntVector> {
        let rows: &[&[i64]] = match p {
            2 => &[
                &[1, 0, 0],
                &[0, 1, 0],
                &[0, 0, 1],
                &[1, 2, 0],
                &[0, 1, 1],
                &[1, 1, -1],
                &[4, 5, 0],
                &[1, 3, 1],
                &[3, 2, -1],
                &[2, -1, 3],
            ],
            3 => &[
                &[1, 0, 0, 0],
                &[0, 0, 0, 1],
                &[1, 1, 1, -2],
                &[1, -1, 0, 0],
                &[3, 0, 0, -2],
                &[1, 7, 0, 0],
                &[0, -5, 1, 0],
                &[1, 2, 1, 0],
                &[0, 0, 1, 1],
                &[2, -1, 1, 3],
            ],
            _ => &[],
        };
        rows.iter().map(|r| int_vector(r)).collect()
    }

    /// Grid instances grouped by twist.
    pub fn bundle_instances() -> Result<Vec<(IntVector, Vec<DeltaPBundleSpec>)>> {
        bundle_twists()
            .into_iter()
            .map(|a| {
                let p = a.len();
                let mut specs = Vec::new();
                for l in bundle_lambdas() {
                    for t in bundle_taus() {
                        specs.push(DeltaPBundleSpec::new(p, a.clone(), l.clone(), t)?);
                    }
                }
                Ok((a, specs))
            })
            .collect()
    }

    pub fn hirzebruch_ks() -> Vec<i64> {
        vec![1, 2, 3]
    }

    pub fn hirzebruch_instances(k: i64) -> Result<Vec<HirzebruchSpec>> {
        let mut out = Vec::new();
        for t in [int(7), int(8), rat(19, 2), int(11)] {
            for l in [rat(1, 2), int(1), rat(3, 2), int(2)] {
                out.push(HirzebruchSpec::new(k, t.clone(), l)?);
            }
        }
        Ok(out)
    }

    /// Six directions containing a mass linear one for each `k` in 1..=3.
    pub fn hirzebruch_directions() -> Vec<IntVector> {
        [&[1, 0][..], &[0, 1], &[1, 1], &[2, 1], &[2, 3], &[3, -2]]
            .iter()
            .map(|b| int_vector(b))
            .collect()
    }

    pub fn truncated_dims() -> Vec<usize> {
        vec![2, 3, 4]
    }

    pub fn truncated_instances(n: usize) -> Result<Vec<TruncatedSimplexSpec>> {
        let mut out = Vec::new();
        for t in [int(2), rat(5, 2), int(3), int(4)] {
            for l in [rat(1, 2), int(1), rat(3, 2), rat(7, 4)] {
                out.push(TruncatedSimplexSpec::new(n, t.clone(), l)?);
            }
        }
        Ok(out)
    }

    /// Six directions per dimension, two of them mass linear.
    pub fn truncated_directions(n: usize) -> Vec<IntVector> {
        let rows: &[&[i64]] = match n {
            2 => &[&[1, 0], &[0, 1], &[2, 1], &[1, 1], &[4, 2], &[-3, 1]],
            3 => &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 2, 1], &[1, 0, 1], &[4, -1, 1]],
            4 => &[
                &[1, 0, 0, 0],
                &[0, 0, 0, 1],
                &[1, 1, 2, 1],
                &[4, 0, 0, 1],
                &[1, 2, 3, 4],
                &[0, -2, 1, 0],
            ],
            _ => &[],
        };
        rows.iter().map(|r| int_vector(r)).collect()
    }

    pub fn simplex_taus() -> Vec<Rational> {
        vec![int(1), int(2), rat(5, 3)]
    }
}

// ---------------------------------------------------------------------------
// Simplex moments

fn unit_simplex(n: usize, tau: &Rational) -> Result<HalfSpaceSystem> {
    make_simplex(&SimplexSpec::new(n, tau.clone())?)
}

/// `{x >= 0, Σ c_i x_i <= τ}` written with a primitive integral conormal.
fn weighted_simplex(c: &[Rational], tau: &Rational) -> Result<HalfSpaceSystem> {
    use num_integer::Integer;
    let n = c.len();
    let l = c.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let scaled: Vec<BigInt> = c.iter().map(|q| (q * from_bigint(&l)).to_integer()).collect();
    let g = scaled.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let mut conormals: Vec<IntVector> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from(-((i == j) as i64))).collect())
        .collect();
    conormals.push(scaled.iter().map(|x| x / &g).collect());
    let mut offsets = vec![Rational::zero(); n];
    offsets.push(tau * from_bigint(&l) / from_bigint(&g));
    HalfSpaceSystem::new(conormals, offsets)
}

fn simplex_moment_checks(t: &mut Tally) -> Result<()> {
    for n in 1..=4usize {
        for tau in grids::simplex_taus() {
            let label = || format!("n={n} tau={}", fmt_q(&tau));
            let m = polytope_moments(&unit_simplex(n, &tau)?, Degree::Second)?;
            let f = |k: u32| from_bigint(&factorial(k));
            let nn = n as u32;
            t.record("volume tau^n/n!", [(m.volume == pow(&tau, nn) / f(nn), label())]);
            let first = m.first.as_ref().expect("requested");
            t.record(
                "first moment tau^(n+1)/(n+1)!",
                (0..n).map(|i| (first[i] == pow(&tau, nn + 1) / f(nn + 1), label())),
            );
            let second = m.second.as_ref().expect("requested");
            let mut cases = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    let expected = if i == j {
                        int(2) * pow(&tau, nn + 2) / f(nn + 2)
                    } else {
                        pow(&tau, nn + 2) / f(nn + 2)
                    };
                    cases.push((second[i][j] == expected, format!("{} i={i} j={j}", label())));
                }
            }
            t.record("second moments 2tau^(n+2)/(n+2)! and tau^(n+2)/(n+2)!", cases);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for n in 1..=4usize {
        for _ in 0..5 {
            let c: RatVector = (0..n)
                .map(|_| rat(rng.random_range(1..=9), rng.random_range(1..=9)))
                .collect();
            let tau = grids::simplex_taus()[rng.random_range(0..3)].clone();
            let label = || {
                format!(
                    "c=({}) tau={}",
                    c.iter().map(fmt_q).collect::<Vec<_>>().join(","),
                    fmt_q(&tau)
                )
            };
            let m = polytope_moments(&weighted_simplex(&c, &tau)?, Degree::First)?;
            let prod: Rational = c.iter().map(|ci| &tau / ci).product();
            let nn = n as u32;
            t.record(
                "weighted simplex volume",
                [(m.volume == &prod / from_bigint(&factorial(nn)), label())],
            );
            let first = m.first.as_ref().expect("requested");
            t.record(
                "weighted simplex first moments",
                (0..n).map(|j| {
                    let expected = &tau / &c[j] * &prod / from_bigint(&factorial(nn + 1));
                    (first[j] == expected, label())
                }),
            );
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Bundles

fn bundle_label(s: &DeltaPBundleSpec) -> String {
    format!(
        "a=({}) lambda={} tau={}",
        s.a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
        fmt_q(&s.lambda),
        fmt_q(&s.tau)
    )
}

fn factorization_checks(t: &mut Tally) -> Result<()> {
    let specs: Vec<DeltaPBundleSpec> = grids::bundle_instances()?
        .into_iter()
        .flat_map(|(_, s)| s)
        .collect();
    let results: Vec<Vec<(&'static str, Case)>> = specs
        .par_iter()
        .map(|spec| {
            let mut out = Vec::new();
            let label = bundle_label(spec);
            let integrals = make_delta_p_bundle(spec).and_then(|sys| FacetIntegrals::compute(&sys));
            let integrals = match integrals {
                Ok(fi) => fi,
                Err(e) => {
                    out.push(("bundle instance builds", (false, format!("{label}: {e}"))));
                    return out;
                }
            };
            out.push(("bundle instance builds", (true, String::new())));
            for b in grids::bundle_directions(spec.p) {
                let lbl = || format!("{label} {}", fmt_b(&b));
                let product = bundle_k(spec).and_then(|k| Ok(k * bundle_z(spec, &b)?));
                let closed = bundle_invariant(spec, &b);
                out.push((
                    "generic I = K * Z",
                    case(
                        (|| Ok(integrals.value(&b)? == product? && closed? == integrals.value(&b)?))(),
                        lbl,
                    ),
                ));
                out.push((
                    "generic <Cm, b> = closed form",
                    case((|| Ok(integrals.cm_dot(&b)? == bundle_cm(spec, &b)?))(), lbl),
                ));
            }
            out
        })
        .collect();
    for r in results {
        t.merge(r);
    }
    Ok(())
}

fn bundle_equivalence_checks(t: &mut Tally) -> Result<()> {
    for (a, specs) in grids::bundle_instances()? {
        let p = a.len();
        let reference = &specs[0];
        let ch = Chamber::new(make_delta_p_bundle(reference)?)?;
        t.record(
            "grid points share the reference chamber",
            specs.iter().map(|s| (same_chamber(&ch, &s.offsets()), bundle_label(s))),
        );
        let bs = grids::bundle_directions(p);
        let cfg = SamplingConfig::default();
        let verdicts: Vec<Result<bool>> = bs
            .iter()
            .map(|b| is_mass_linear(&ch, b, &cfg).map(|v| v.linear))
            .collect();
        let z_zero: Vec<bool> = bs
            .iter()
            .map(|b| bundle_z(reference, b).map(|z| z.is_zero()))
            .collect::<Result<_>>()?;
        t.record(
            "is_mass_linear <=> Z(b) = 0",
            bs.iter().zip(&verdicts).zip(&z_zero).map(|((b, v), z)| {
                let ok = v.as_ref().is_ok_and(|v| v == z);
                (ok, format!("{} {}", bundle_label(reference), fmt_b(b)))
            }),
        );
        let linear: Vec<IntVector> = bs
            .iter()
            .zip(&z_zero)
            .filter(|(_, z)| **z)
            .map(|(b, _)| b.clone())
            .collect();
        if !linear.is_empty() {
            let polys = interpolate_invariants(&ch, &linear);
            let cases: Vec<Case> = match &polys {
                Ok(ps) => linear
                    .iter()
                    .zip(ps)
                    .map(|(b, poly)| (poly.is_zero(), format!("a={a:?} {}", fmt_b(b))))
                    .collect(),
                Err(e) => vec![(false, format!("a={a:?}: {e}"))],
            };
            t.record("Z(b) = 0 => interpolated I polynomial is zero", cases);
        }
        let nonlinear: Vec<&IntVector> = bs.iter().zip(&z_zero).filter(|(_, z)| !**z).map(|(b, _)| b).collect();
        let cases: Vec<Case> = specs
            .par_iter()
            .map(|s| {
                let fi = make_delta_p_bundle(s).and_then(|sys| FacetIntegrals::compute(&sys));
                nonlinear
                    .iter()
                    .map(|b| {
                        case(
                            fi.as_ref()
                                .map_err(Clone::clone)
                                .and_then(|fi| Ok(!fi.value(b)?.is_zero())),
                            || format!("{} {}", bundle_label(s), fmt_b(b)),
                        )
                    })
                    .collect::<Vec<_>>()
            })
            .flatten()
            .collect();
        t.record("Z(b) != 0 => I nonzero at every grid point", cases);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Hirzebruch

fn hirzebruch_label(s: &HirzebruchSpec) -> String {
    format!("k={} tau={} lambda={}", s.k, fmt_q(&s.tau), fmt_q(&s.lambda))
}

fn hirzebruch_equivalence_checks(t: &mut Tally) -> Result<()> {
    let bs = grids::hirzebruch_directions();
    for k in grids::hirzebruch_ks() {
        let specs = grids::hirzebruch_instances(k)?;
        let ch = Chamber::new(make_hirzebruch(&specs[0])?)?;
        t.record(
            "trapezoid grid shares one chamber",
            specs.iter().map(|s| {
                let off = make_hirzebruch(s).map(|sys| sys.offsets().clone());
                (off.is_ok_and(|o| same_chamber(&ch, &o)), hirzebruch_label(s))
            }),
        );
        let cases: Vec<Case> = specs
            .par_iter()
            .flat_map(|s| {
                let fi = make_hirzebruch(s).and_then(|sys| FacetIntegrals::compute(&sys));
                bs.iter()
                    .map(|b| {
                        let r = fi
                            .as_ref()
                            .map_err(Clone::clone)
                            .and_then(|fi| Ok(fi.value(b)?.is_zero() == hirzebruch_mass_linear(k, b)));
                        case(r, || format!("{} {}", hirzebruch_label(s), fmt_b(b)))
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        t.record("trapezoid I = 0 <=> 2 b2 = k b1", cases);
        t.record(
            "trapezoid is_mass_linear <=> 2 b2 = k b1",
            bs.iter().map(|b| {
                let r = is_mass_linear(&ch, b, &SamplingConfig::default())
                    .map(|v| v.linear == hirzebruch_mass_linear(k, b));
                case(r, || format!("k={k} {}", fmt_b(b)))
            }),
        );
    }
    Ok(())
}

fn hirzebruch_checks(t: &mut Tally) -> Result<()> {
    let bs = grids::hirzebruch_directions();
    for k in grids::hirzebruch_ks() {
        let specs = grids::hirzebruch_instances(k)?;
        let cases: Vec<Vec<(&'static str, Case)>> = specs
            .par_iter()
            .map(|s| {
                let mut out = Vec::new();
                let cm = make_hirzebruch(s).and_then(|sys| crate::moments::center_of_mass(&sys));
                out.push((
                    "trapezoid Cm closed form",
                    case(cm.map(|c| c == hirzebruch_cm(s)), || hirzebruch_label(s)),
                ));
                for b in &bs {
                    out.push((
                        "I(b) = (b1 - 2 b2 / k) I(e1)",
                        case(hirzebruch_loop_ratio_check(s, b), || {
                            format!("{} {}", hirzebruch_label(s), fmt_b(b))
                        }),
                    ));
                }
                out
            })
            .collect();
        for c in cases {
            t.merge(c);
        }
    }
    hirzebruch_equivalence_checks(t)
}

// ---------------------------------------------------------------------------
// Truncated simplices

fn truncated_label(s: &TruncatedSimplexSpec) -> String {
    format!("n={} tau={} lambda={}", s.n, fmt_q(&s.tau), fmt_q(&s.lambda))
}

fn truncated_equivalence_checks(t: &mut Tally) -> Result<()> {
    for n in grids::truncated_dims() {
        let specs = grids::truncated_instances(n)?;
        let bs = grids::truncated_directions(n);
        let ch = Chamber::new(make_truncated_simplex(&specs[0])?)?;
        t.record(
            "truncated grid shares one chamber",
            specs.iter().map(|s| {
                let off = make_truncated_simplex(s).map(|sys| sys.offsets().clone());
                (off.is_ok_and(|o| same_chamber(&ch, &o)), truncated_label(s))
            }),
        );
        let cases: Vec<Case> = specs
            .par_iter()
            .flat_map(|s| {
                let fi = make_truncated_simplex(s).and_then(|sys| FacetIntegrals::compute(&sys));
                bs.iter()
                    .map(|b| {
                        let r = fi
                            .as_ref()
                            .map_err(Clone::clone)
                            .and_then(|fi| Ok(fi.value(b)?.is_zero() == truncated_mass_linear(n, b)));
                        case(r, || format!("{} {}", truncated_label(s), fmt_b(b)))
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        t.record("truncated I = 0 <=> n b_n = sum b_j", cases);
        t.record(
            "truncated is_mass_linear <=> n b_n = sum b_j",
            bs.iter().map(|b| {
                let r = is_mass_linear(&ch, b, &SamplingConfig::default())
                    .map(|v| v.linear == truncated_mass_linear(n, b));
                case(r, || format!("n={n} {}", fmt_b(b)))
            }),
        );
    }
    Ok(())
}

fn truncated_checks(t: &mut Tally) -> Result<()> {
    for n in grids::truncated_dims() {
        let specs = grids::truncated_instances(n)?;
        let cases: Vec<Case> = specs
            .par_iter()
            .map(|s| {
                let cm = make_truncated_simplex(s).and_then(|sys| crate::moments::center_of_mass(&sys));
                case(cm.map(|c| c == truncated_cm(s)), || truncated_label(s))
            })
            .collect();
        t.record("truncated Cm closed form", cases);
        let mut cases = Vec::new();
        for tau in grids::simplex_taus() {
            let fi = unit_simplex(n, &tau).and_then(|sys| FacetIntegrals::compute(&sys))?;
            for b in grids::truncated_directions(n) {
                cases.push(case(fi.value(&b).map(|v| v.is_zero()), || {
                    format!("n={n} tau={} {}", fmt_q(&tau), fmt_b(&b))
                }));
            }
        }
        t.record("simplex I vanishes", cases);
        if n >= 3 {
            let mut jobs = Vec::new();
            for tau in [int(1), rat(3, 2)] {
                for b in grids::truncated_directions(n) {
                    jobs.push((tau.clone(), b));
                }
            }
            let cases: Vec<Case> = jobs
                .par_iter()
                .map(|(tau, b)| {
                    let r = (|| {
                        Ok(reconstructed_leading_coefficient(n, tau, b)?
                            == truncated_leading_coefficient(n, tau, b)?)
                    })();
                    case(r, || format!("n={n} tau={} {}", fmt_q(tau), fmt_b(b)))
                })
                .collect();
            t.record("eps^(n-1) coefficient by reconstruction", cases);
        }
        if n == 3 {
            let cases: Vec<Case> = specs
                .par_iter()
                .map(|s| {
                    let r = (|| {
                        let fi = FacetIntegrals::compute(&make_truncated_simplex(s)?)?;
                        let e = |i: usize| fi.value(&(0..3).map(|j| BigInt::from((i == j) as i64)).collect::<Vec<_>>());
                        let (e1, e2, e3) = (e(0)?, e(1)?, e(2)?);
                        Ok(e1 == e2 && e1 == -e3 / int(3))
                    })();
                    case(r, || truncated_label(s))
                })
                .collect();
            t.record("n=3 loop ratios I(e1) = I(e2) = -I(e3)/3", cases);
        }
    }
    truncated_equivalence_checks(t)
}

// ---------------------------------------------------------------------------
// Structural properties

struct Instance {
    label: String,
    system: HalfSpaceSystem,
    directions: Vec<IntVector>,
    /// Mass linear directions to test slab divisibility with, if any.
    slab_directions: Vec<IntVector>,
}

fn all_instances() -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for (_, specs) in grids::bundle_instances()? {
        for s in specs {
            out.push(Instance {
                label: bundle_label(&s),
                system: make_delta_p_bundle(&s)?,
                directions: grids::bundle_directions(s.p),
                slab_directions: Vec::new(),
            });
        }
    }
    for k in grids::hirzebruch_ks() {
        for s in grids::hirzebruch_instances(k)? {
            let bs = grids::hirzebruch_directions();
            out.push(Instance {
                label: hirzebruch_label(&s),
                system: make_hirzebruch(&s)?,
                slab_directions: bs.iter().filter(|b| hirzebruch_mass_linear(k, b)).cloned().collect(),
                directions: bs,
            });
        }
    }
    for n in grids::truncated_dims() {
        for s in grids::truncated_instances(n)? {
            let bs = grids::truncated_directions(n);
            out.push(Instance {
                label: truncated_label(&s),
                system: make_truncated_simplex(&s)?,
                slab_directions: bs.iter().filter(|b| truncated_mass_linear(n, b)).cloned().collect(),
                directions: bs,
            });
        }
    }
    Ok(out)
}

fn random_shift(rng: &mut ChaCha8Rng, n: usize) -> RatVector {
    (0..n)
        .map(|_| rat(rng.random_range(-9..=9), rng.random_range(1..=5)))
        .collect()
}

fn structural_instance(inst: &Instance, shifts: &[RatVector]) -> Result<Vec<(&'static str, Case)>> {
    let sys = &inst.system;
    let n = sys.dim();
    let fi = FacetIntegrals::compute(sys)?;
    let values: Vec<Rational> = inst.directions.iter().map(|b| fi.value(b)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    let lbl = |b: &[BigInt]| format!("{} {}", inst.label, fmt_b(b));
    for a in shifts {
        let moved = FacetIntegrals::compute(&sys.with_offsets(sys.translate_offsets(a)?)?)?;
        for (b, v) in inst.directions.iter().zip(&values) {
            out.push((
                "translation invariance",
                case(moved.value(b).map(|w| &w == v), || {
                    format!("{} a=({})", lbl(b), a.iter().map(fmt_q).collect::<Vec<_>>().join(","))
                }),
            ));
        }
    }
    let d = &inst.directions;
    for i in 0..d.len() {
        let j = (i + 1) % d.len();
        let sum: IntVector = d[i].iter().zip(&d[j]).map(|(x, y)| x + y).collect();
        out.push((
            "additivity in b",
            case(fi.value(&sum).map(|v| v == &values[i] + &values[j]), || {
                format!("{} + {}", lbl(&d[i]), fmt_b(&d[j]))
            }),
        ));
    }
    for s in [int(2), int(3)] {
        let scaled = FacetIntegrals::compute(&sys.scaled(&s)?)?;
        let factor = pow(&s, n as u32);
        for (b, v) in d.iter().zip(&values) {
            out.push((
                "scaling I(s k) = s^n I(k)",
                case(scaled.value(b).map(|w| w == v * &factor), || format!("{} s={}", lbl(b), fmt_q(&s))),
            ));
        }
    }
    let mut closure = vec![Rational::zero(); n];
    for (j, vol) in fi.facet_volumes().iter().enumerate() {
        for (c, x) in closure.iter_mut().zip(sys.conormal_q(j)) {
            *c += vol * x;
        }
    }
    out.push((
        "Minkowski facet closure",
        (closure.iter().all(Zero::is_zero), inst.label.clone()),
    ));
    if !inst.slab_directions.is_empty() {
        let ch = Chamber::new(sys.clone())?;
        for pair in antipodal_pairs(&ch) {
            for b in &inst.slab_directions {
                out.push((
                    "slab divisibility for mass linear pairs",
                    case(check_slab_divisibility(&ch, b, pair), || format!("{} pair={pair:?}", lbl(b))),
                ));
            }
        }
    }
    Ok(out)
}

fn structural_checks(t: &mut Tally) -> Result<()> {
    let instances = all_instances()?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let shifts: Vec<Vec<RatVector>> = instances
        .iter()
        .map(|inst| (0..3).map(|_| random_shift(&mut rng, inst.system.dim())).collect())
        .collect();
    let results: Vec<Vec<(&'static str, Case)>> = instances
        .par_iter()
        .zip(&shifts)
        .map(|(inst, a)| {
            structural_instance(inst, a)
                .unwrap_or_else(|e| vec![("structural instance evaluates", (false, format!("{}: {e}", inst.label)))])
        })
        .collect();
    for r in results {
        t.merge(r);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Coherence

fn coherence_checks(t: &mut Tally) -> Result<()> {
    let specs = grids::truncated_instances(2)?;
    let mut bs = grids::truncated_directions(2);
    bs.extend(grids::hirzebruch_directions());
    bs.sort();
    bs.dedup();
    let cases: Vec<Case> = specs
        .par_iter()
        .flat_map(|s| {
            bs.iter()
                .map(|b| {
                    case(
                        truncated_hirzebruch_coherence(&s.tau, &s.lambda, b).map(|c| c.holds()),
                        || format!("tau={} lambda={} {}", fmt_q(&s.tau), fmt_q(&s.lambda), fmt_b(b)),
                    )
                })
                .collect::<Vec<_>>()
        })
        .collect();
    t.record("truncated n=2 equals trapezoid k=1", cases);
    Ok(())
}

// ---------------------------------------------------------------------------
// Performance

/// Instances with `n <= 4` and `m <= 8` used for timing single invariants.
pub fn timing_instances() -> Result<Vec<(String, HalfSpaceSystem, IntVector)>> {
    let mut out = Vec::new();
    let bundle = DeltaPBundleSpec::new(3, int_vector(&[2, 0, -1]), int(5), rat(3, 2))?;
    out.push(("bundle p=3".into(), make_delta_p_bundle(&bundle)?, int_vector(&[2, -1, 1, 3])));
    let trunc = TruncatedSimplexSpec::new(4, int(4), rat(7, 4))?;
    out.push(("truncated n=4".into(), make_truncated_simplex(&trunc)?, int_vector(&[1, 2, 3, 4])));
    // product of two trapezoids: n = 4, m = 8
    let mut conormals = Vec::new();
    let mut offsets = Vec::new();
    for (k, tau, lambda) in [(1i64, int(3), int(1)), (2, rat(11, 2), int(2))] {
        let h = make_hirzebruch(&HirzebruchSpec::new(k, tau, lambda)?)?;
        let first = conormals.is_empty();
        for (c, o) in h.conormals().iter().zip(h.offsets()) {
            let mut row = vec![BigInt::zero(); 4];
            let shift = if first { 0 } else { 2 };
            row[shift] = c[0].clone();
            row[shift + 1] = c[1].clone();
            conormals.push(row);
            offsets.push(o.clone());
        }
    }
    out.push((
        "trapezoid product n=4 m=8".into(),
        HalfSpaceSystem::new(conormals, offsets)?,
        int_vector(&[1, -2, 3, 1]),
    ));
    Ok(out)
}

fn performance_checks(t: &mut Tally) -> Result<()> {
    for (label, sys, b) in timing_instances()? {
        let start = Instant::now();
        let r = characteristic_number(&sys, &b);
        let elapsed = start.elapsed();
        let ok = r.is_ok() && elapsed < SINGLE_INVARIANT_LIMIT;
        t.record(
            "single invariant under 1 s",
            [(ok, format!("{label}: {} ms {:?}", elapsed.as_millis(), r.err()))],
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------------

/// Runs a named suite; unknown names are a parse error.
pub fn run_suite(name: &str) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut t = Tally::default();
    match name {
        "lemma-moments" => simplex_moment_checks(&mut t)?,
        "bundle-factorization" => factorization_checks(&mut t)?,
        "bundle-equivalence" => bundle_equivalence_checks(&mut t)?,
        "hirzebruch" => hirzebruch_checks(&mut t)?,
        "truncated" => truncated_checks(&mut t)?,
        "structural" => structural_checks(&mut t)?,
        "coherence" => coherence_checks(&mut t)?,
        "equivalences" => {
            bundle_equivalence_checks(&mut t)?;
            hirzebruch_equivalence_checks(&mut t)?;
            truncated_equivalence_checks(&mut t)?;
        }
        "performance" => performance_checks(&mut t)?,
        other => {
            return Err(Error::Parse(format!(
                "unknown suite {other:?}; known suites: {}",
                SUITES.join(", ")
            )))
        }
    }
    Ok(SuiteReport {
        suite: name.to_string(),
        checks: t.checks,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_a_parse_error() {
        assert!(matches!(run_suite("nope"), Err(Error::Parse(_))));
    }

    #[test]
    fn grids_have_the_advertised_shape() {
        let bundles = grids::bundle_instances().unwrap();
        assert_eq!(bundles.len(), 5);
        assert!(bundles.iter().all(|(_, s)| s.len() == 16));
        for p in [2, 3] {
            let bs = grids::bundle_directions(p);
            assert_eq!(bs.len(), 10);
            assert!(bs.iter().all(|b| b.len() == p + 1));
        }
        for k in grids::hirzebruch_ks() {
            assert_eq!(grids::hirzebruch_instances(k).unwrap().len(), 16);
            assert!(grids::hirzebruch_directions().iter().any(|b| hirzebruch_mass_linear(k, b)));
        }
        for n in grids::truncated_dims() {
            let bs = grids::truncated_directions(n);
            assert_eq!(bs.len(), 6);
            assert!(bs.iter().any(|b| truncated_mass_linear(n, b)));
            assert!(bs.iter().any(|b| !truncated_mass_linear(n, b)));
        }
    }

    #[test]
    fn weighted_simplex_is_primitive() {
        let sys = weighted_simplex(&[rat(1, 2), rat(3, 4)], &int(3)).unwrap();
        assert_eq!(sys.conormals()[2], int_vector(&[2, 3]));
        assert_eq!(sys.offsets()[2], int(12));
    }

    #[test]
    fn tally_keeps_first_failures() {
        let mut t = Tally::default();
        t.record("x", (0..10).map(|i| (i % 2 == 0, format!("{i}"))));
        assert_eq!(t.checks[0].passed, 5);
        assert_eq!(t.checks[0].total, 10);
        assert_eq!(t.checks[0].failures.len(), MAX_FAILURES_KEPT);
        assert!(!t.checks[0].ok());
    }

    #[test]
    fn simplex_moment_suite_passes() {
        let r = run_suite("lemma-moments").unwrap();
        assert!(r.passed(), "{:?}", r.checks);
    }

    #[test]
    fn coherence_suite_passes() {
        let r = run_suite("coherence").unwrap();
        assert!(r.passed(), "{:?}", r.checks);
    }
}
