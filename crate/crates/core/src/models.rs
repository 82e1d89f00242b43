//! The three problem families and their hypothesis validators.
//!
//! Every family defines a nonlinearity `g(t, u)` for `u > 0`, singular as
//! `u -> 0+`:
//!
//! - Lazer–Solimini: `g = u^-p` (`p > 0`)
//! - MEMS: `g = b u + a(t) u^-p` (`p > 0`, weight `a(t) > 0`)
//! - condensed matter: `g = a (u^-4 - u^-3)`
//!
//! `validate` reports the standing hypotheses of the corresponding existence
//! theorems (spring range, slope cap against omega^2 = (2pi/T)^2, damping vs
//! forcing size). Failures are informational: the continuation may still run,
//! and one of the stock examples deliberately violates its smallness
//! condition.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{EvalError, Expression};

/// Grid used for construction-time quadrature checks (means, norms, sign
/// sampling). Independent of the solver grid.
const VALIDATION_STEPS: usize = 4096;

/// Quadrature mean of the forcing must be below this for "zero average".
pub const ZERO_AVERAGE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("nonlinearity evaluated at non-positive u = {u}")]
    NonPositiveState { u: f64 },
    #[error("period must be positive and finite, got {period}")]
    BadPeriod { period: f64 },
    #[error("parameter `{name}` must be finite")]
    NonFiniteParameter { name: &'static str },
    #[error("exponent p must be positive, got {p}")]
    NonPositiveExponent { p: f64 },
    #[error("forcing mean {mean:.3e} exceeds the zero-average tolerance {tol:.0e}")]
    ForcingNotZeroAverage { mean: f64, tol: f64 },
    #[error("weight a(t) must stay positive; sampled {value:.6e} at t = {t:.6}")]
    NonPositiveWeight { t: f64, value: f64 },
    #[error("homotopy parameter k = {k} outside [0, 1]")]
    BadHomotopy { k: f64 },
    #[error("signal evaluation failed: {0}")]
    SignalEval(#[from] EvalError),
}

/// One harmonic of a Fourier-encoded signal:
/// `cos_coeff * cos(k omega t) + sin_coeff * sin(k omega t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierTerm {
    pub harmonic: u32,
    pub cos_coeff: f64,
    pub sin_coeff: f64,
}

/// A T-periodic scalar function of t, either parsed expression text or an
/// explicit harmonic list. Fourier terms are interpreted against the
/// problem's own base frequency omega = 2pi/T.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PeriodicSignal {
    Expression(Expression),
    Fourier(Vec<FourierTerm>),
}

impl PeriodicSignal {
    pub fn zero() -> Self {
        PeriodicSignal::Fourier(Vec::new())
    }

    pub fn constant(value: f64) -> Self {
        PeriodicSignal::Fourier(vec![FourierTerm {
            harmonic: 0,
            cos_coeff: value,
            sin_coeff: 0.0,
        }])
    }

    pub fn eval(&self, t: f64, omega: f64) -> Result<f64, EvalError> {
        match self {
            PeriodicSignal::Expression(expr) => expr.eval(t),
            PeriodicSignal::Fourier(terms) => {
                let mut sum = 0.0;
                for term in terms {
                    let phase = term.harmonic as f64 * omega * t;
                    sum += term.cos_coeff * phase.cos() + term.sin_coeff * phase.sin();
                }
                Ok(sum)
            }
        }
    }

    fn eval_raw(&self, t: f64, omega: f64) -> f64 {
        self.eval(t, omega).unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Family {
    LazerSolimini { p: f64 },
    Mems { b: f64, p: f64, a: PeriodicSignal },
    CondensedMatter { a: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::LazerSolimini { .. } => "lazer_solimini",
            Family::Mems { .. } => "mems",
            Family::CondensedMatter { .. } => "condensed_matter",
        }
    }
}

/// An immutable, validated problem instance
/// `u'' + c u' + g(t, u) = mu + e(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemDef {
    family: Family,
    damping: f64,
    period: f64,
    forcing: PeriodicSignal,
    omega: f64,
    /// max of e over the validation grid.
    forcing_max: f64,
    /// L2 norm of e over one period (not normalized by T).
    forcing_l2: f64,
    /// Quadrature mean of e (reported by the validator).
    forcing_mean: f64,
}

impl ProblemDef {
    pub fn new(
        family: Family,
        damping: f64,
        period: f64,
        forcing: PeriodicSignal,
    ) -> Result<Self, ModelError> {
        if !(period.is_finite() && period > 0.0) {
            return Err(ModelError::BadPeriod { period });
        }
        if !damping.is_finite() {
            return Err(ModelError::NonFiniteParameter { name: "c" });
        }
        match &family {
            Family::LazerSolimini { p } => {
                if !p.is_finite() {
                    return Err(ModelError::NonFiniteParameter { name: "p" });
                }
                if *p <= 0.0 {
                    return Err(ModelError::NonPositiveExponent { p: *p });
                }
            }
            Family::Mems { b, p, a } => {
                if !b.is_finite() {
                    return Err(ModelError::NonFiniteParameter { name: "b" });
                }
                if !p.is_finite() {
                    return Err(ModelError::NonFiniteParameter { name: "p" });
                }
                if *p <= 0.0 {
                    return Err(ModelError::NonPositiveExponent { p: *p });
                }
                check_weight_positive(a, period)?;
            }
            Family::CondensedMatter { a } => {
                if !a.is_finite() {
                    return Err(ModelError::NonFiniteParameter { name: "a" });
                }
            }
        }

        let omega = 2.0 * std::f64::consts::PI / period;
        let stats = signal_stats(&forcing, omega, period)?;
        if stats.mean.abs() > ZERO_AVERAGE_TOL {
            return Err(ModelError::ForcingNotZeroAverage {
                mean: stats.mean,
                tol: ZERO_AVERAGE_TOL,
            });
        }

        Ok(ProblemDef {
            family,
            damping,
            period,
            forcing,
            omega,
            forcing_max: stats.max,
            forcing_l2: stats.l2,
            forcing_mean: stats.mean,
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn forcing(&self) -> &PeriodicSignal {
        &self.forcing
    }

    /// max of e(t) over the validation grid.
    pub fn forcing_max(&self) -> f64 {
        self.forcing_max
    }

    /// L2[0,T] norm of e.
    pub fn forcing_l2(&self) -> f64 {
        self.forcing_l2
    }

    /// Forcing value at t; evaluation failures surface as NaN, which the
    /// integrator then reports as a blow-up at that time.
    pub fn e_at(&self, t: f64) -> f64 {
        self.forcing.eval_raw(t, self.omega)
    }

    pub fn g(&self, t: f64, u: f64) -> Result<f64, ModelError> {
        if u <= 0.0 {
            return Err(ModelError::NonPositiveState { u });
        }
        Ok(self.g_raw(t, u))
    }

    pub fn g_u(&self, t: f64, u: f64) -> Result<f64, ModelError> {
        if u <= 0.0 {
            return Err(ModelError::NonPositiveState { u });
        }
        Ok(self.g_u_raw(t, u))
    }

    /// Homotopy-scaled nonlinearity k*g; k = 1 is the full problem.
    pub fn g_homotopy(&self, k: f64, t: f64, u: f64) -> Result<f64, ModelError> {
        if !(0.0..=1.0).contains(&k) {
            return Err(ModelError::BadHomotopy { k });
        }
        Ok(k * self.g(t, u)?)
    }

    pub fn g_u_homotopy(&self, k: f64, t: f64, u: f64) -> Result<f64, ModelError> {
        if !(0.0..=1.0).contains(&k) {
            return Err(ModelError::BadHomotopy { k });
        }
        Ok(k * self.g_u(t, u)?)
    }

    /// Unchecked g; non-positive u or a failed weight evaluation yields NaN.
    pub(crate) fn g_raw(&self, t: f64, u: f64) -> f64 {
        if u <= 0.0 {
            return f64::NAN;
        }
        match &self.family {
            Family::LazerSolimini { p } => u.powf(-p),
            Family::Mems { b, p, a } => b * u + a.eval_raw(t, self.omega) * u.powf(-p),
            Family::CondensedMatter { a } => {
                let inv = 1.0 / u;
                let inv3 = inv * inv * inv;
                a * (inv3 * inv - inv3)
            }
        }
    }

    /// Unchecked g_u, same conventions as [`Self::g_raw`].
    pub(crate) fn g_u_raw(&self, t: f64, u: f64) -> f64 {
        if u <= 0.0 {
            return f64::NAN;
        }
        match &self.family {
            Family::LazerSolimini { p } => -p * u.powf(-p - 1.0),
            Family::Mems { b, p, a } => {
                b - p * a.eval_raw(t, self.omega) * u.powf(-p - 1.0)
            }
            Family::CondensedMatter { a } => {
                let inv = 1.0 / u;
                let inv4 = inv * inv * inv * inv;
                a * (3.0 * inv4 - 4.0 * inv4 * inv)
            }
        }
    }

    /// Supremum of g_u over u > 0 (the slope that competes with omega^2):
    /// 0 for Lazer–Solimini (approached as u -> infinity), b for MEMS, and
    /// a * 3^5 / 5^5 for condensed matter (the interior critical slope at
    /// u = 5/3).
    pub fn slope_sup(&self) -> f64 {
        match &self.family {
            Family::LazerSolimini { .. } => 0.0,
            Family::Mems { b, .. } => *b,
            Family::CondensedMatter { a } => a * 243.0 / 3125.0,
        }
    }

    /// A-priori lower bound on u from the singular term: any solution with
    /// offset mu satisfies u > (mu + max e)^(-1/p) for the Lazer–Solimini
    /// family. None when mu + max e <= 0 or for the other families.
    pub fn lower_bound_guard(&self, mu: f64) -> Option<f64> {
        match &self.family {
            Family::LazerSolimini { p } => {
                let m = mu + self.forcing_max;
                if m > 0.0 {
                    Some(m.powf(-1.0 / p))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let omega_sq = self.omega * self.omega;
        let mut checks = vec![HypothesisCheck {
            name: "forcing-zero-average".into(),
            status: CheckStatus::Pass,
            lhs: self.forcing_mean.abs(),
            rhs: ZERO_AVERAGE_TOL,
            detail: "|mean of e| within the zero-average tolerance".into(),
        }];

        let slope = self.slope_sup();
        checks.push(HypothesisCheck {
            name: "slope-cap".into(),
            status: if slope < omega_sq { CheckStatus::Pass } else { CheckStatus::Fail },
            lhs: slope,
            rhs: omega_sq,
            detail: "sup of g_u must stay below omega^2 = (2pi/T)^2".into(),
        });

        match &self.family {
            Family::LazerSolimini { .. } => {}
            Family::Mems { b, a, .. } => {
                checks.push(HypothesisCheck {
                    name: "spring-range".into(),
                    status: if *b > 0.0 && *b < omega_sq {
                        CheckStatus::Pass
                    } else {
                        CheckStatus::Fail
                    },
                    lhs: *b,
                    rhs: omega_sq,
                    detail: "spring constant must satisfy 0 < b < omega^2".into(),
                });
                let min_a = sample_min(a, self.omega, self.period);
                checks.push(HypothesisCheck {
                    name: "weight-positive".into(),
                    status: if min_a > 0.0 { CheckStatus::Pass } else { CheckStatus::Fail },
                    lhs: min_a,
                    rhs: 0.0,
                    detail: "sampled minimum of the weight a(t)".into(),
                });
            }
            Family::CondensedMatter { .. } => {
                let check = if self.damping == 0.0 {
                    HypothesisCheck {
                        name: "damping-dominates-forcing".into(),
                        status: CheckStatus::NotApplicable,
                        lhs: f64::INFINITY,
                        rhs: 1.0,
                        detail: "sqrt(3T) ||e||_2 / |c| < 1 requires c != 0".into(),
                    }
                } else {
                    let lhs = (3.0 * self.period).sqrt() * self.forcing_l2
                        / self.damping.abs();
                    HypothesisCheck {
                        name: "damping-dominates-forcing".into(),
                        status: if lhs < 1.0 { CheckStatus::Pass } else { CheckStatus::Fail },
                        lhs,
                        rhs: 1.0,
                        detail: "sqrt(3T) ||e||_2 / |c| must stay below 1".into(),
                    }
                };
                checks.push(check);
            }
        }

        ValidationReport { omega_sq, checks }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub status: CheckStatus,
    /// The computed quantity being compared.
    pub lhs: f64,
    /// The threshold it is compared against.
    pub rhs: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub omega_sq: f64,
    pub checks: Vec<HypothesisCheck>,
}

impl ValidationReport {
    pub fn failures(&self) -> impl Iterator<Item = &HypothesisCheck> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }

    pub fn has_failures(&self) -> bool {
        self.failures().next().is_some()
    }
}

struct SignalStats {
    mean: f64,
    max: f64,
    l2: f64,
}

/// Simpson mean / max / L2 norm of a signal over one period on the
/// validation grid.
fn signal_stats(
    signal: &PeriodicSignal,
    omega: f64,
    period: f64,
) -> Result<SignalStats, ModelError> {
    let n = VALIDATION_STEPS;
    let h = period / n as f64;
    let mut integral = 0.0;
    let mut integral_sq = 0.0;
    let mut max = f64::NEG_INFINITY;
    for i in 0..=n {
        let t = period * (i as f64 / n as f64);
        let v = signal.eval(t, omega)?;
        if !v.is_finite() {
            return Err(EvalError::NonFinite { t }.into());
        }
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        integral += w * v;
        integral_sq += w * v * v;
        max = max.max(v);
    }
    Ok(SignalStats {
        mean: integral * h / (3.0 * period),
        max,
        l2: (integral_sq * h / 3.0).sqrt(),
    })
}

fn check_weight_positive(a: &PeriodicSignal, period: f64) -> Result<(), ModelError> {
    let omega = 2.0 * std::f64::consts::PI / period;
    let n = VALIDATION_STEPS;
    for i in 0..=n {
        let t = period * (i as f64 / n as f64);
        let v = a.eval(t, omega)?;
        if !(v > 0.0) {
            return Err(ModelError::NonPositiveWeight { t, value: v });
        }
    }
    Ok(())
}

fn sample_min(signal: &PeriodicSignal, omega: f64, period: f64) -> f64 {
    let n = VALIDATION_STEPS;
    let mut min = f64::INFINITY;
    for i in 0..=n {
        let t = period * (i as f64 / n as f64);
        min = min.min(signal.eval_raw(t, omega));
    }
    min
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expr(text: &str) -> PeriodicSignal {
        PeriodicSignal::Expression(Expression::parse(text).unwrap())
    }

    fn lazer(p: f64, c: f64, period: f64, e: PeriodicSignal) -> ProblemDef {
        ProblemDef::new(Family::LazerSolimini { p }, c, period, e).unwrap()
    }

    #[test]
    fn nonlinearity_values() {
        let ls = lazer(0.5, 0.5, 1.2, PeriodicSignal::zero());
        assert!((ls.g(0.0, 4.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((ls.g_u(0.0, 4.0).unwrap() + 1.0 / 16.0).abs() < 1e-15);

        let mems = ProblemDef::new(
            Family::Mems { b: 2.0, p: 3.0, a: PeriodicSignal::constant(2.0) },
            0.5,
            0.8,
            PeriodicSignal::zero(),
        )
        .unwrap();
        assert!((mems.g(0.0, 1.0).unwrap() - 4.0).abs() < 1e-15);
        assert!((mems.g_u(0.0, 1.0).unwrap() + 4.0).abs() < 1e-15);

        let cm = ProblemDef::new(
            Family::CondensedMatter { a: 3.0 },
            0.3,
            1.0,
            PeriodicSignal::zero(),
        )
        .unwrap();
        assert!(cm.g(0.0, 1.0).unwrap().abs() < 1e-15);
        assert!((cm.g(0.0, 2.0).unwrap() + 3.0 / 16.0).abs() < 1e-15);
        // g_u changes sign at u = 4/3.
        assert!(cm.g_u(0.0, 4.0 / 3.0).unwrap().abs() < 1e-12);
        assert!(cm.g_u(0.0, 1.2).unwrap() < 0.0);
        assert!(cm.g_u(0.0, 1.5).unwrap() > 0.0);
    }

    #[test]
    fn domain_errors_on_nonpositive_u() {
        let ls = lazer(1.0, 0.0, 1.0, PeriodicSignal::zero());
        assert!(matches!(ls.g(0.0, 0.0), Err(ModelError::NonPositiveState { .. })));
        assert!(matches!(ls.g_u(0.0, -1.0), Err(ModelError::NonPositiveState { .. })));
        assert!(ls.g_raw(0.0, 0.0).is_nan());
    }

    #[test]
    fn homotopy_scaling() {
        let ls = lazer(1.0, 0.0, 1.0, PeriodicSignal::zero());
        assert_eq!(ls.g_homotopy(0.0, 0.0, 2.0).unwrap(), 0.0);
        assert_eq!(ls.g_homotopy(1.0, 0.0, 2.0).unwrap(), ls.g(0.0, 2.0).unwrap());
        assert!((ls.g_homotopy(0.5, 0.0, 2.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(ls.g_homotopy(1.5, 0.0, 2.0), Err(ModelError::BadHomotopy { .. })));
        assert!(matches!(ls.g_homotopy(-0.1, 0.0, 2.0), Err(ModelError::BadHomotopy { .. })));
    }

    #[test]
    fn finite_difference_matches_slope() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_0002);
        let problems = vec![
            lazer(0.5, 0.5, 1.2, PeriodicSignal::zero()),
            lazer(3.0, 0.0, 1.0, PeriodicSignal::zero()),
            ProblemDef::new(
                Family::Mems { b: 2.0, p: 3.0, a: expr("2+cos(2*pi*t/0.8)^3") },
                0.5,
                0.8,
                PeriodicSignal::zero(),
            )
            .unwrap(),
            ProblemDef::new(
                Family::CondensedMatter { a: 3.0 },
                0.3,
                1.0,
                PeriodicSignal::zero(),
            )
            .unwrap(),
        ];
        for prob in &problems {
            for _ in 0..1000 {
                let t = rng.gen_range(0.0..prob.period());
                let u = rng.gen_range(0.05..10.0);
                let h = 1e-5 * u;
                let fd = (prob.g(t, u + h).unwrap() - prob.g(t, u - h).unwrap()) / (2.0 * h);
                let slope = prob.g_u(t, u).unwrap();
                let tol = 1e-6 * slope.abs().max(1.0);
                assert!(
                    (fd - slope).abs() <= tol,
                    "family {} at (t={t:.4}, u={u:.4}): fd {fd} vs g_u {slope}",
                    prob.family().name()
                );
            }
        }
    }

    #[test]
    fn forcing_must_have_zero_average() {
        let err = ProblemDef::new(
            Family::LazerSolimini { p: 1.0 },
            0.0,
            2.0 * std::f64::consts::PI,
            expr("1+sin(t)"),
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::ForcingNotZeroAverage { .. }));
        // A pure sinusoid passes.
        assert!(ProblemDef::new(
            Family::LazerSolimini { p: 1.0 },
            0.0,
            2.0 * std::f64::consts::PI,
            expr("sin(t)"),
        )
        .is_ok());
    }

    #[test]
    fn weight_must_stay_positive() {
        let err = ProblemDef::new(
            Family::Mems { b: 2.0, p: 3.0, a: expr("cos(2*pi*t/0.8)") },
            0.5,
            0.8,
            PeriodicSignal::zero(),
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::NonPositiveWeight { .. }));
    }

    #[test]
    fn validation_arithmetic_for_stock_examples() {
        // MEMS example: T = 0.8 gives omega^2 ~ 61.685 and b = 2 passes.
        let mems = ProblemDef::new(
            Family::Mems { b: 2.0, p: 3.0, a: expr("2+cos(2*pi*t/0.8)^3") },
            0.5,
            0.8,
            expr("5*sin(2*pi*t/0.8)"),
        )
        .unwrap();
        let report = mems.validate();
        assert!((report.omega_sq - 61.685).abs() < 1e-2);
        let spring = report.checks.iter().find(|c| c.name == "spring-range").unwrap();
        assert_eq!(spring.status, CheckStatus::Pass);
        assert!(!report.has_failures());

        // Condensed-matter example: slope cap 3 * 3^5 / 5^5 = 0.23328 passes
        // against 4 pi^2, while the damping/forcing smallness fails at ~32.66.
        let cm = ProblemDef::new(
            Family::CondensedMatter { a: 3.0 },
            0.3,
            1.0,
            expr("8*cos(2*pi*t)"),
        )
        .unwrap();
        let report = cm.validate();
        assert!((report.omega_sq - 39.478).abs() < 1e-2);
        let slope = report.checks.iter().find(|c| c.name == "slope-cap").unwrap();
        assert_eq!(slope.status, CheckStatus::Pass);
        assert!((slope.lhs - 0.23328).abs() < 1e-10);
        let damping = report
            .checks
            .iter()
            .find(|c| c.name == "damping-dominates-forcing")
            .unwrap();
        assert_eq!(damping.status, CheckStatus::Fail);
        assert!((damping.lhs - 32.66).abs() < 0.01);
        assert!((cm.forcing_l2() - 32.0_f64.sqrt()).abs() < 1e-9);

        // Same parameters without damping: the check is not applicable.
        let undamped = ProblemDef::new(
            Family::CondensedMatter { a: 3.0 },
            0.0,
            1.0,
            expr("8*cos(2*pi*t)"),
        )
        .unwrap();
        let report = undamped.validate();
        let damping = report
            .checks
            .iter()
            .find(|c| c.name == "damping-dominates-forcing")
            .unwrap();
        assert_eq!(damping.status, CheckStatus::NotApplicable);
    }

    #[test]
    fn lower_bound_guard_formula() {
        let ls = lazer(0.5, 0.5, 1.2, expr("6*sin(2*pi*t/1.2)"));
        let eps = ls.lower_bound_guard(3.0).unwrap();
        assert!((eps - 1.0 / 81.0).abs() < 1e-12);

        let flat = lazer(1.0, 0.0, 1.0, PeriodicSignal::zero());
        assert_eq!(flat.lower_bound_guard(0.0), None);

        let ls2 = lazer(2.0, 0.0, 1.0, expr("2*sin(2*pi*t)"));
        let eps = ls2.lower_bound_guard(2.0).unwrap();
        assert!((eps - 0.5).abs() < 1e-12);

        let mems = ProblemDef::new(
            Family::Mems { b: 2.0, p: 3.0, a: PeriodicSignal::constant(1.0) },
            0.5,
            0.8,
            PeriodicSignal::zero(),
        )
        .unwrap();
        assert_eq!(mems.lower_bound_guard(5.0), None);
    }

    #[test]
    fn fourier_signals_evaluate() {
        let sig = PeriodicSignal::Fourier(vec![
            FourierTerm { harmonic: 1, cos_coeff: 0.0, sin_coeff: 6.0 },
        ]);
        let omega = 2.0 * std::f64::consts::PI / 1.2;
        // Matches the expression form of the same forcing.
        let as_expr = expr("6*sin(2*pi*t/1.2)");
        for i in 0..=24 {
            let t = 1.2 * i as f64 / 24.0;
            let a = sig.eval(t, omega).unwrap();
            let b = as_expr.eval(t, omega).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }
}
