//! Global continuation of T-periodic solutions in the average `xi`.
//!
//! A periodic solution of `u'' + c u' + g(t, u) = mu + e(t)` is written as
//! `u = xi + U` with `mean(U) = 0`, which makes the pair `(U, mu)` a function
//! of the average `xi` alone. Because `xi` parameterizes the whole solution
//! curve `mu = phi(xi)` monotonically, stepping in `xi` needs no fold
//! detection: the tracer walks a uniform `xi` grid, warm-starting each
//! Newton correction from the neighbouring deviation `U`.
//!
//! Each Newton iterate linearizes `g` around the current `u = xi + U_prev`
//! and solves one zero-average linear periodic problem (see [`crate::linper`])
//! for the corrected deviation together with its offset `mu`. Iterations
//! abort early if any sampled `u` falls under the positivity floor, since
//! the nonlinearities are singular at `u = 0`.
//!
//! Step control is deliberately simple: a correction that errors out or
//! fails to reach `newton_tol` halves the `xi` step up to a budget, and the
//! step doubles back toward the nominal size after successes. Accepted curve
//! points therefore always carry residuals at or below the tolerance.
//! Tracing stops with an explicit [`StopReason`] instead of an error, so a
//! partial curve is still returned when the solver runs into the singular
//! end of the branch or `|mu|` exceeds its cap.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ivp::DenseTrajectory;
use crate::linper::{self, LinearPeriodicProblem, LinperError};
use crate::models::ProblemDef;

/// A correction whose residual still exceeds this after its iteration budget
/// is treated as divergent rather than merely inaccurate.
pub const NONCONVERGENCE_CEILING: f64 = 1e-3;

/// Iteration budget for cold starts and for the final homotopy stage, which
/// have no nearby solution to lean on.
pub const INIT_ITERATION_BUDGET: usize = 25;

/// Iteration budget for the intermediate homotopy stages; each stage only
/// needs to hand the next one a usable guess.
const HOMOTOPY_STAGE_BUDGET: usize = 8;

#[derive(Debug, Error)]
pub enum ContinuationError {
    #[error(
        "iterate at xi = {xi:.6} dipped to u = {value:.6e} at t = {t:.6}, \
         below the positivity floor {floor:.1e}"
    )]
    PositivityViolation { xi: f64, t: f64, value: f64, floor: f64 },
    #[error(
        "Newton correction at xi = {xi:.6} stalled at residual {residual:.3e} \
         after {iters} iteration(s) (ceiling {ceiling:.1e})"
    )]
    NonConvergence { xi: f64, residual: f64, iters: usize, ceiling: f64 },
    #[error("linear periodic solve failed at xi = {xi:.6}: {source}")]
    Linear {
        xi: f64,
        #[source]
        source: LinperError,
    },
}

/// How the first point of a trace is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    /// Newton from the zero deviation, `U = 0`.
    Cold,
    /// Ramp the nonlinearity in as `k g(t, u)`, `k = j / stages`, starting
    /// from the exactly solvable linear problem at `k = 0`.
    Homotopy { stages: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ContinuationConfig {
    /// Nominal `xi` step between curve points.
    pub delta_xi: f64,
    /// Newton iteration budget per continuation step.
    pub newton_iters: usize,
    /// Residual at which a correction counts as converged.
    pub newton_tol: f64,
    /// RK4 steps per period for every linear solve.
    pub grid_steps: usize,
    /// Iterates must keep `u = xi + U` at or above this floor.
    pub positivity_floor: f64,
    pub init_mode: InitMode,
    /// Tracing stops (point included) once `|mu|` exceeds this.
    pub mu_cap: f64,
    /// How many times a failing step may halve before the trace gives up.
    pub max_step_halvings: u32,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        ContinuationConfig {
            delta_xi: 0.1,
            newton_iters: 2,
            newton_tol: 1e-9,
            grid_steps: 2048,
            positivity_floor: 1e-4,
            init_mode: InitMode::Cold,
            mu_cap: 1e4,
            max_step_halvings: 6,
        }
    }
}

/// One point of the solution curve: the deviation `U` (zero mean) plus the
/// offset `mu` at a fixed average `xi`.
#[derive(Debug, Clone)]
pub struct PeriodicSolution {
    pub xi: f64,
    pub mu: f64,
    /// `U` as a trajectory with states `(U, U')`.
    pub deviation: DenseTrajectory,
    /// Final Newton residual: max of the last increment's sup norm, the
    /// periodicity defect and the mean defect of the accepted iterate.
    pub residual: f64,
    pub newton_iters_used: usize,
}

impl PeriodicSolution {
    pub fn u_at(&self, t: f64) -> f64 {
        self.xi + self.deviation.sample_component(t, 0).unwrap_or(f64::NAN)
    }

    pub fn du_at(&self, t: f64) -> f64 {
        self.deviation.sample_component(t, 1).unwrap_or(f64::NAN)
    }

    pub fn u0(&self) -> f64 {
        self.xi + self.deviation.state(0)[0]
    }

    pub fn du0(&self) -> f64 {
        self.deviation.state(0)[1]
    }

    /// Min and max of `u` over the grid nodes.
    pub fn u_extrema(&self) -> (f64, f64) {
        let (lo, hi) = self.deviation.component_extrema(0);
        (self.xi + lo, self.xi + hi)
    }

    /// Sup norm of the deviation over the grid nodes.
    pub fn deviation_sup(&self) -> f64 {
        let (lo, hi) = self.deviation.component_extrema(0);
        lo.abs().max(hi.abs())
    }
}

/// Curve points in trace order (ascending or descending `xi`).
#[derive(Debug, Clone, Default)]
pub struct SolutionCurve {
    pub points: Vec<PeriodicSolution>,
}

impl SolutionCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn xi_mu(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.xi, p.mu)).collect()
    }
}

/// Why a trace ended where it did.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    ReachedTarget,
    /// `|mu|` crossed the cap; the offending point is kept on the curve.
    MuCapExceeded { xi: f64, mu: f64 },
    /// Step halving ran out; `xi` is the last successful average and
    /// `cause` the error that kept repeating at the smallest step.
    StepBudgetExhausted { xi: f64, cause: String },
}

#[derive(Debug)]
pub struct TraceResult {
    pub curve: SolutionCurve,
    pub stop: StopReason,
}

/// Result of tracing both directions away from an interior anchor.
#[derive(Debug)]
pub struct SpanTrace {
    /// Points in ascending `xi`, the anchor included once.
    pub curve: SolutionCurve,
    pub stop_lower: StopReason,
    pub stop_upper: StopReason,
}

fn zero_deviation(prob: &ProblemDef, cfg: &ContinuationConfig) -> Result<DenseTrajectory, ContinuationError> {
    DenseTrajectory::from_samples(prob.period(), cfg.grid_steps, 2, |_, _, _| {})
        .map_err(|source| ContinuationError::Linear {
            xi: f64::NAN,
            source: LinperError::Integration(source),
        })
}

fn deviation_at(traj: &DenseTrajectory, t: f64) -> f64 {
    traj.sample_component(t, 0).unwrap_or(f64::NAN)
}

/// Scans `u = xi + U` at the nodes and half-nodes (exactly the times RK4
/// evaluates coefficients at) against the positivity floor. NaN fails too.
fn check_positivity(
    cfg: &ContinuationConfig,
    xi: f64,
    deviation: &DenseTrajectory,
) -> Result<(), ContinuationError> {
    let n = deviation.steps();
    let period = deviation.period();
    for i in 0..=2 * n {
        let t = period * (i as f64 / (2 * n) as f64);
        let u = xi + deviation_at(deviation, t);
        if !(u >= cfg.positivity_floor) {
            return Err(ContinuationError::PositivityViolation {
                xi,
                t,
                value: u,
                floor: cfg.positivity_floor,
            });
        }
    }
    Ok(())
}

fn sup_node_diff(a: &DenseTrajectory, b: &DenseTrajectory) -> f64 {
    debug_assert_eq!(a.steps(), b.steps());
    let mut sup: f64 = 0.0;
    for i in 0..=a.steps() {
        sup = sup.max((a.state(i)[0] - b.state(i)[0]).abs());
    }
    sup
}

/// Newton iteration on the deviation at fixed `xi` for the homotopy-scaled
/// nonlinearity `k g`. Accepts the iterate once the residual reaches
/// `newton_tol`, or after `budget` iterations provided the residual is at
/// most [`NONCONVERGENCE_CEILING`].
pub(crate) fn newton_iterate(
    prob: &ProblemDef,
    cfg: &ContinuationConfig,
    k: f64,
    xi: f64,
    init: &DenseTrajectory,
    budget: usize,
) -> Result<PeriodicSolution, ContinuationError> {
    assert!(budget >= 1, "iteration budget must be positive");
    let period = prob.period();
    let mut current = init.clone();
    let mut mu = f64::NAN;
    let mut residual = f64::INFINITY;
    let mut iters_used = 0;

    for iter in 1..=budget {
        check_positivity(cfg, xi, &current)?;
        let (result, increment) = {
            let prev = &current;
            let coeff = move |t: f64| k * prob.g_u_raw(t, xi + deviation_at(prev, t));
            let forcing = move |t: f64| {
                let dev = deviation_at(prev, t);
                let u = xi + dev;
                prob.e_at(t) - k * prob.g_raw(t, u) + k * prob.g_u_raw(t, u) * dev
            };
            let linear = LinearPeriodicProblem {
                coeff: &coeff,
                damping: prob.damping(),
                forcing: &forcing,
                period,
                steps: cfg.grid_steps,
            };
            let result = linper::solve_zero_average(&linear)
                .map_err(|source| ContinuationError::Linear { xi, source })?;
            let increment = sup_node_diff(&result.trajectory, prev);
            (result, increment)
        };
        mu = result.mu;
        residual = increment
            .max(result.periodicity_defect)
            .max(result.mean_defect);
        current = result.trajectory;
        iters_used = iter;
        if residual <= cfg.newton_tol {
            break;
        }
    }

    // NaN residuals fail this comparison and are rejected alongside stalls.
    if !(residual <= NONCONVERGENCE_CEILING) {
        return Err(ContinuationError::NonConvergence {
            xi,
            residual,
            iters: iters_used,
            ceiling: NONCONVERGENCE_CEILING,
        });
    }
    // The accepted deviation must respect the floor itself, not just the
    // iterate it was linearized around.
    check_positivity(cfg, xi, &current)?;
    Ok(PeriodicSolution {
        xi,
        mu,
        deviation: current,
        residual,
        newton_iters_used: iters_used,
    })
}

/// One Newton correction of the full problem (`k = 1`) from an explicit
/// initial deviation, using the per-step iteration budget of the config.
pub fn newton_correct(
    prob: &ProblemDef,
    cfg: &ContinuationConfig,
    xi: f64,
    init: &DenseTrajectory,
) -> Result<PeriodicSolution, ContinuationError> {
    newton_iterate(prob, cfg, 1.0, xi, init, cfg.newton_iters)
}

/// The exactly solvable `k = 0` member of the homotopy:
/// `U'' + c U' = mu + e(t)` with zero mean, whose offset is `mu = 0` because
/// the forcing has zero average.
pub fn linear_base_solution(
    prob: &ProblemDef,
    cfg: &ContinuationConfig,
    xi: f64,
) -> Result<PeriodicSolution, ContinuationError> {
    let coeff = |_: f64| 0.0;
    let forcing = |t: f64| prob.e_at(t);
    let linear = LinearPeriodicProblem {
        coeff: &coeff,
        damping: prob.damping(),
        forcing: &forcing,
        period: prob.period(),
        steps: cfg.grid_steps,
    };
    let result = linper::solve_zero_average(&linear)
        .map_err(|source| ContinuationError::Linear { xi, source })?;
    Ok(PeriodicSolution {
        xi,
        mu: result.mu,
        deviation: result.trajectory,
        residual: result.periodicity_defect.max(result.mean_defect),
        newton_iters_used: 0,
    })
}

/// Produces the anchor solution at `xi` according to the configured
/// [`InitMode`].
pub fn init_solution(
    prob: &ProblemDef,
    cfg: &ContinuationConfig,
    xi: f64,
) -> Result<PeriodicSolution, ContinuationError> {
    match cfg.init_mode {
        InitMode::Cold => {
            let zero = zero_deviation(prob, cfg)?;
            newton_iterate(prob, cfg, 1.0, xi, &zero, INIT_ITERATION_BUDGET)
        }
        InitMode::Homotopy { stages } => {
            let stages = stages.max(1);
            let mut current = linear_base_solution(prob, cfg, xi)?;
            for j in 1..=stages {
                let k = j as f64 / stages as f64;
                let budget = if j == stages {
                    INIT_ITERATION_BUDGET
                } else {
                    HOMOTOPY_STAGE_BUDGET
                };
                current = newton_iterate(prob, cfg, k, xi, &current.deviation, budget)?;
            }
            Ok(current)
        }
    }
}

/// Continues an existing solution to `xi_end`, stepping by `delta_xi` and
/// halving on failures. The anchor becomes the first curve point; the stop
/// reason records whether the target was reached.
pub fn trace_from(
    prob: &ProblemDef,
    cfg: &ContinuationConfig,
    anchor: PeriodicSolution,
    xi_end: f64,
) -> TraceResult {
    let dir = if xi_end >= anchor.xi { 1.0 } else { -1.0 };
    // Step size persists across steps: it halves on failures and doubles on
    // successes (capped at the nominal size), so a hard stretch of the curve
    // is walked with small steps instead of re-spending the halving budget
    // from the nominal size at every step. The floor keeps a trace from
    // creeping forever toward a singular point it can never pass.
    let step_floor = cfg.delta_xi * 1e-6;
    let mut step_size = cfg.delta_xi;
    let mut points = vec![anchor];
    let stop = loop {
        let last_xi = points.last().expect("anchor present").xi;
        let remaining = (xi_end - last_xi) * dir;
        if remaining <= 1e-12 * cfg.delta_xi.max(1.0) {
            break StopReason::ReachedTarget;
        }
        let mut step = step_size.min(remaining);
        // Land exactly on the target instead of leaving a sliver step.
        if remaining <= step_size * (1.0 + 1e-9) {
            step = remaining;
        }
        let warm = points.len() - 1;
        let mut halvings = 0;
        let outcome = loop {
            let xi_next = if step == remaining {
                xi_end
            } else {
                last_xi + dir * step
            };
            // Curve points must meet `newton_tol`; a correction that merely
            // stays under the divergence ceiling is rejected like any other
            // failure so the wall regions get walked with smaller steps.
            let attempt = newton_iterate(
                prob,
                cfg,
                1.0,
                xi_next,
                &points[warm].deviation,
                cfg.newton_iters,
            )
            .and_then(|sol| {
                if sol.residual > cfg.newton_tol {
                    Err(ContinuationError::NonConvergence {
                        xi: xi_next,
                        residual: sol.residual,
                        iters: sol.newton_iters_used,
                        ceiling: cfg.newton_tol,
                    })
                } else {
                    Ok(sol)
                }
            });
            match attempt {
                Ok(sol) => break Ok(sol),
                Err(err) => {
                    if halvings >= cfg.max_step_halvings || step * 0.5 < step_floor {
                        break Err(err);
                    }
                    halvings += 1;
                    step *= 0.5;
                }
            }
        };
        match outcome {
            Ok(sol) => {
                step_size = (2.0 * step).min(cfg.delta_xi);
                let (xi, mu) = (sol.xi, sol.mu);
                points.push(sol);
                if mu.abs() > cfg.mu_cap {
                    break StopReason::MuCapExceeded { xi, mu };
                }
            }
            Err(err) => {
                break StopReason::StepBudgetExhausted {
                    xi: last_xi,
                    cause: err.to_string(),
                }
            }
        }
    };
    TraceResult { curve: SolutionCurve { points }, stop }
}

/// Initializes at `xi_start` and traces to `xi_end`. Curve points are in
/// trace order, so `xi_end < xi_start` yields a descending curve.
pub fn trace_curve(
    prob: &ProblemDef,
    cfg: &ContinuationConfig,
    xi_start: f64,
    xi_end: f64,
) -> Result<TraceResult, ContinuationError> {
    let anchor = init_solution(prob, cfg, xi_start)?;
    Ok(trace_from(prob, cfg, anchor, xi_end))
}

/// Initializes at an interior anchor and traces outward to both ends,
/// returning a single ascending curve with the anchor included once.
pub fn trace_span(
    prob: &ProblemDef,
    cfg: &ContinuationConfig,
    xi_anchor: f64,
    xi_lo: f64,
    xi_hi: f64,
) -> Result<SpanTrace, ContinuationError> {
    assert!(
        xi_lo <= xi_anchor && xi_anchor <= xi_hi,
        "anchor {xi_anchor} outside [{xi_lo}, {xi_hi}]"
    );
    let anchor = init_solution(prob, cfg, xi_anchor)?;
    let down = trace_from(prob, cfg, anchor.clone(), xi_lo);
    let up = trace_from(prob, cfg, anchor, xi_hi);

    let mut points: Vec<PeriodicSolution> = down.curve.points;
    points.reverse();
    // The anchor sits at the end of the reversed down-leg and at the head of
    // the up-leg; keep one copy.
    points.pop();
    points.extend(up.curve.points);
    Ok(SpanTrace {
        curve: SolutionCurve { points },
        stop_lower: down.stop,
        stop_upper: up.stop,
    })
}
