//! Independent checks on computed curves and individual solutions.
//!
//! Nothing here reuses the Newton machinery's own residuals: a point is
//! re-verified by integrating the full nonlinear equation from its initial
//! data on a finer grid, a curve's shape is classified from the raw
//! `(xi, mu)` samples, and analytic a-priori bounds are recomputed from the
//! problem data. The checks are intentionally redundant with the solver so
//! that agreement actually means something.

use serde::Serialize;
use thiserror::Error;

use crate::continuation::{
    self, ContinuationConfig, ContinuationError, PeriodicSolution, SolutionCurve,
};
use crate::ivp::{self, IvpError};
use crate::models::{Family, ProblemDef};

/// `solve_at_mu` accepts a probe once its offset is this close to the target.
pub const MU_MATCH_TOL: f64 = 1e-7;

/// Offsets must reproduce the averaged nonlinearity to this accuracy.
pub const MU_IDENTITY_TOL: f64 = 1e-7;

/// Adjacent curve offsets closer than this (relative to the curve scale)
/// count as a plateau rather than a rise or fall.
pub const PLATEAU_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("shape analysis needs at least 5 points, got {given}")]
    TooFewPoints { given: usize },
    #[error("re-integration failed: {0}")]
    Reintegration(#[from] IvpError),
    #[error("probe correction failed: {0}")]
    Probe(#[from] ContinuationError),
    #[error("offset bisection stalled at xi = {xi:.8}: |mu - target| = {gap:.3e}")]
    RootNotResolved { xi: f64, gap: f64 },
}

/// Outcome of re-integrating a solution point from its initial data.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IvpVerification {
    /// `|u(T) - u(0)|` of the re-integrated orbit.
    pub periodicity_gap: f64,
    /// `|u'(T) - u'(0)|`.
    pub derivative_gap: f64,
    /// `|mean(u) - xi|`.
    pub mean_gap: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Integrates `u'' + c u' + g(t, u) = mu + e(t)` from `(u0, du0)` over one
/// period with `steps` RK4 steps and reports the periodicity and mean gaps.
/// This exercises none of the linearized machinery, so it catches a wrong
/// `mu` or a wrong initial state directly.
pub fn verify_ivp(
    prob: &ProblemDef,
    xi: f64,
    mu: f64,
    u0: f64,
    du0: f64,
    steps: usize,
    tol: f64,
) -> Result<IvpVerification, VerifyError> {
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1];
        dy[1] = mu + prob.e_at(t) - prob.damping() * y[1] - prob.g_raw(t, y[0]);
    };
    let traj = ivp::integrate(rhs, &[u0, du0], prob.period(), steps)?;
    let first = traj.state(0);
    let last = traj.state(traj.steps());
    let periodicity_gap = (last[0] - first[0]).abs();
    let derivative_gap = (last[1] - first[1]).abs();
    let mean_gap = (traj.mean(0) - xi).abs();
    let passed = periodicity_gap <= tol && derivative_gap <= tol && mean_gap <= tol;
    Ok(IvpVerification { periodicity_gap, derivative_gap, mean_gap, tol, passed })
}

/// [`verify_ivp`] for a computed solution, refining its own grid by
/// `multiplier` (3 is the conventional choice).
pub fn verify_solution(
    prob: &ProblemDef,
    sol: &PeriodicSolution,
    multiplier: usize,
    tol: f64,
) -> Result<IvpVerification, VerifyError> {
    verify_ivp(
        prob,
        sol.xi,
        sol.mu,
        sol.u0(),
        sol.du0(),
        sol.deviation.steps() * multiplier.max(1),
        tol,
    )
}

/// Quadrature ratio `int f'^2 / (omega^2 int f^2)` over one period, with
/// `omega = 2pi/period`. For zero-mean `f` the Wirtinger inequality puts the
/// exact value at or above 1, with equality on the first harmonic. `None`
/// when `f` vanishes identically (on the grid).
pub fn wirtinger_ratio<F, G>(f: F, df: G, period: f64, steps: usize) -> Option<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let n = steps.max(4) + steps % 2;
    let h = period / n as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..=n {
        let t = period * (i as f64 / n as f64);
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let fv = f(t);
        let dv = df(t);
        num += w * dv * dv;
        den += w * fv * fv;
    }
    num *= h / 3.0;
    den *= h / 3.0;
    if den == 0.0 {
        return None;
    }
    let omega = 2.0 * std::f64::consts::PI / period;
    Some(num / (omega * omega * den))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeClass {
    MonotoneDecreasing,
    SingleInteriorMinimum,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    Decreasing,
    Flat,
    Increasing,
}

/// Discrete shape summary of a `(xi, mu)` curve.
#[derive(Debug, Clone, Serialize)]
pub struct ShapeReport {
    pub classification: ShapeClass,
    /// Location and value of the smallest sampled offset.
    pub xi_min: f64,
    pub mu_min: f64,
    /// Central second difference at the minimum when it is interior.
    pub second_diff_at_min: Option<f64>,
    /// Sample pairs that move against the V-pattern anchored at the minimum.
    pub monotone_violations: usize,
    pub endpoint_trends: (Trend, Trend),
    /// Interpolated `xi` values where `mu` changes sign, ascending.
    pub zero_crossings: Vec<f64>,
}

/// Classifies the curve as monotone-decreasing, single-interior-minimum or
/// other, using a plateau tolerance relative to the offset scale. Points are
/// sorted by `xi` internally; at least 5 are required.
pub fn shape_report_points(points: &[(f64, f64)]) -> Result<ShapeReport, VerifyError> {
    if points.len() < 5 {
        return Err(VerifyError::TooFewPoints { given: points.len() });
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));

    let scale = pts.iter().fold(1.0_f64, |m, p| m.max(p.1.abs()));
    let tau = PLATEAU_TOL * scale;

    let idx_min = pts
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .expect("non-empty");
    let (xi_min, mu_min) = pts[idx_min];

    let mut violations = 0;
    for (i, pair) in pts.windows(2).enumerate() {
        let d = pair[1].1 - pair[0].1;
        if i < idx_min {
            if d > tau {
                violations += 1;
            }
        } else if d < -tau {
            violations += 1;
        }
    }

    let descended = pts[0].1 - mu_min > tau;
    let ascended = pts[pts.len() - 1].1 - mu_min > tau;
    let classification = if violations > 0 {
        ShapeClass::Other
    } else if descended && ascended {
        ShapeClass::SingleInteriorMinimum
    } else if descended {
        ShapeClass::MonotoneDecreasing
    } else {
        ShapeClass::Other
    };

    let second_diff_at_min = if idx_min > 0 && idx_min < pts.len() - 1 {
        Some(pts[idx_min - 1].1 - 2.0 * mu_min + pts[idx_min + 1].1)
    } else {
        None
    };

    let trend = |d: f64| {
        if d > tau {
            Trend::Increasing
        } else if d < -tau {
            Trend::Decreasing
        } else {
            Trend::Flat
        }
    };
    let endpoint_trends = (
        trend(pts[1].1 - pts[0].1),
        trend(pts[pts.len() - 1].1 - pts[pts.len() - 2].1),
    );

    let mut zero_crossings = Vec::new();
    let mut prev_signed: Option<(f64, f64)> = None;
    for &(xi, mu) in &pts {
        if mu == 0.0 {
            zero_crossings.push(xi);
            prev_signed = None;
            continue;
        }
        if let Some((pxi, pmu)) = prev_signed {
            if (pmu < 0.0) != (mu < 0.0) {
                zero_crossings.push(pxi + (0.0 - pmu) * (xi - pxi) / (mu - pmu));
            }
        }
        prev_signed = Some((xi, mu));
    }

    Ok(ShapeReport {
        classification,
        xi_min,
        mu_min,
        second_diff_at_min,
        monotone_violations: violations,
        endpoint_trends,
        zero_crossings,
    })
}

/// [`shape_report_points`] on a traced curve.
pub fn shape_report(curve: &SolutionCurve) -> Result<ShapeReport, VerifyError> {
    shape_report_points(&curve.xi_mu())
}

/// Finds every solution of `phi(xi) = mu_star` along the traced curve by
/// bisecting each bracketing sample interval, warm-starting the Newton
/// probes from the nearest accepted solution. Points already matching
/// within [`MU_MATCH_TOL`] are returned as-is.
pub fn solve_at_mu(
    prob: &ProblemDef,
    cfg: &ContinuationConfig,
    curve: &SolutionCurve,
    mu_star: f64,
) -> Result<Vec<PeriodicSolution>, VerifyError> {
    let mut found: Vec<PeriodicSolution> = Vec::new();
    let probe_cfg = ContinuationConfig {
        newton_iters: cfg.newton_iters.max(6),
        ..cfg.clone()
    };

    for point in &curve.points {
        if (point.mu - mu_star).abs() <= MU_MATCH_TOL {
            found.push(point.clone());
        }
    }

    for pair in curve.points.windows(2) {
        let (lo, hi) = (&pair[0], &pair[1]);
        if (lo.mu - mu_star) * (hi.mu - mu_star) >= 0.0 {
            continue;
        }
        let mut lo_xi = lo.xi;
        let mut hi_xi = hi.xi;
        let lo_sign = lo.mu < mu_star;
        // Rolling warm start: the latest probe is always inside the bracket.
        let mut warm = if (lo.mu - mu_star).abs() <= (hi.mu - mu_star).abs() {
            lo.clone()
        } else {
            hi.clone()
        };
        let mut resolved = false;
        for _ in 0..80 {
            let mid = 0.5 * (lo_xi + hi_xi);
            let sol = continuation::newton_iterate(
                prob,
                &probe_cfg,
                1.0,
                mid,
                &warm.deviation,
                probe_cfg.newton_iters,
            )?;
            let gap = sol.mu - mu_star;
            warm = sol;
            if gap.abs() <= MU_MATCH_TOL {
                found.push(warm.clone());
                resolved = true;
                break;
            }
            if (gap < 0.0) == lo_sign {
                lo_xi = mid;
            } else {
                hi_xi = mid;
            }
            if hi_xi - lo_xi < 1e-13 * hi_xi.abs().max(1.0) {
                break;
            }
        }
        if !resolved {
            return Err(VerifyError::RootNotResolved {
                xi: warm.xi,
                gap: (warm.mu - mu_star).abs(),
            });
        }
    }

    found.sort_by(|a, b| a.xi.total_cmp(&b.xi));
    // Exact point matches and bracket roots can coincide; keep one per site.
    found.dedup_by(|b, a| (a.xi - b.xi).abs() < 0.5 * cfg.delta_xi);
    Ok(found)
}

/// Simpson mean of `g(t, u(t))` along a computed solution.
fn mean_g_along(prob: &ProblemDef, sol: &PeriodicSolution) -> f64 {
    let traj = &sol.deviation;
    let n = traj.steps();
    let h = traj.period() / n as f64;
    let mut sum = 0.0;
    for i in 0..=n {
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let t = traj.grid_time(i);
        sum += w * prob.g_raw(t, sol.xi + traj.state(i)[0]);
    }
    sum * h / (3.0 * traj.period())
}

fn max_abs_g_along(prob: &ProblemDef, sol: &PeriodicSolution) -> f64 {
    let traj = &sol.deviation;
    let mut max = 0.0_f64;
    for i in 0..=traj.steps() {
        let t = traj.grid_time(i);
        max = max.max(prob.g_raw(t, sol.xi + traj.state(i)[0]).abs());
    }
    max
}

/// `|mu - mean of g along the orbit|`: the averaged equation makes these
/// equal exactly, because `U` has zero mean and `e` has zero average.
pub fn mu_identity_gap(prob: &ProblemDef, sol: &PeriodicSolution) -> f64 {
    (sol.mu - mean_g_along(prob, sol)).abs()
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    pub name: String,
    /// Quantity measured on the solution.
    pub lhs: f64,
    /// Analytic bound it is compared against.
    pub rhs: f64,
    pub satisfied: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub checks: Vec<BoundCheck>,
}

impl BoundReport {
    pub fn all_satisfied(&self) -> bool {
        self.checks.iter().all(|c| c.satisfied)
    }
}

/// A-priori bounds evaluated on one computed solution:
///
/// - offset identity `mu = mean g` (quadrature tolerance),
/// - offset bound `|mu| <= max |g|`,
/// - for the damped condensed-matter family, the deviation bound
///   `sup |U| <= sqrt(T) ||e||_2 / (2 sqrt(3) |c|)`,
/// - for Lazer–Solimini, the singular floor `min u >= (mu + max e)^(-1/p)`.
pub fn bound_checks(prob: &ProblemDef, sol: &PeriodicSolution) -> BoundReport {
    let mut checks = Vec::new();

    let identity = mu_identity_gap(prob, sol);
    checks.push(BoundCheck {
        name: "offset-identity".into(),
        lhs: identity,
        rhs: MU_IDENTITY_TOL,
        satisfied: identity <= MU_IDENTITY_TOL,
        detail: "averaging the equation forces mu to equal the mean of g".into(),
    });

    let max_g = max_abs_g_along(prob, sol);
    checks.push(BoundCheck {
        name: "offset-bound".into(),
        lhs: sol.mu.abs(),
        rhs: max_g + 1e-9,
        satisfied: sol.mu.abs() <= max_g + 1e-9,
        detail: "|mu| cannot exceed the sup of |g| along the orbit".into(),
    });

    if let Family::CondensedMatter { .. } = prob.family() {
        if prob.damping() != 0.0 {
            let bound = prob.period().sqrt() * prob.forcing_l2()
                / (2.0 * 3.0_f64.sqrt() * prob.damping().abs());
            let sup = sol.deviation_sup();
            checks.push(BoundCheck {
                name: "deviation-bound".into(),
                lhs: sup,
                rhs: bound,
                satisfied: sup <= bound + 1e-9,
                detail: "damped oscillations obey sup|U| <= sqrt(T)||e||_2/(2 sqrt(3)|c|)"
                    .into(),
            });
        }
    }

    if let Some(floor) = prob.lower_bound_guard(sol.mu) {
        let (min_u, _) = sol.u_extrema();
        checks.push(BoundCheck {
            name: "singular-floor".into(),
            lhs: min_u,
            rhs: floor,
            satisfied: min_u >= floor - 1e-9,
            detail: "at its minimum, u'' >= 0 forces u^-p <= mu + max e".into(),
        });
    }

    BoundReport { checks }
}
