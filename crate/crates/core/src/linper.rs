//! Linear T-periodic problems `L[y] = y'' + c y' + b(t) y = f(t)`.
//!
//! Both solvers assemble the periodic solution from initial-value
//! integrations of the same equation:
//!
//! - [`solve_periodic`]: one particular solution `Y` (initial data `(0, 1)`)
//!   plus the two homogeneous solutions `y1` (`(0, 1)`) and `y2` (`(1, 0)`).
//!   The periodicity conditions `y(0) = y(T)`, `y'(0) = y'(T)` fix the
//!   combination coefficients through a 2x2 system, which is singular exactly
//!   when the homogeneous equation admits a nontrivial periodic solution.
//!
//! - [`solve_zero_average`]: solves `L[y] = mu + f` for the pair `(mu, y)`
//!   with periodic `y` of zero mean. Writing `y = Y_f + mu Y_1 + c1 y1 + c2 y2`
//!   (where `Y_f`, `Y_1` are zero-initial-data responses to `f` and to the
//!   constant 1) turns periodicity plus the mean constraint into one 3x3
//!   system in `(c1, c2, mu)`. The augmented system stays regular even when
//!   `L` itself is resonant on periodic functions — e.g. `b == 0`, the base
//!   case of homotopy initialization — so no case split is needed.
//!
//! Singularity is decided on the condition-scaled determinant (determinant
//! divided by the product of row norms clamped to at least 1) against
//! [`RESONANCE_THRESHOLD`].

use thiserror::Error;

use crate::ivp::{self, DenseTrajectory, IvpError};

/// Condition-scaled determinant below this value is treated as resonance.
pub const RESONANCE_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum LinperError {
    #[error("homogeneous problem is (numerically) resonant: scaled determinant {scaled_det:.3e}")]
    Resonance { scaled_det: f64 },
    #[error("augmented periodicity/mean system is singular: scaled determinant {scaled_det:.3e}")]
    SingularSystem { scaled_det: f64 },
    #[error("unit response has (numerically) zero mean; two-stage split is unusable")]
    DegenerateUnitResponse,
    #[error(transparent)]
    Integration(#[from] IvpError),
}

/// Coefficient data for `y'' + c y' + b(t) y = f(t)` on `[0, T]`.
pub struct LinearPeriodicProblem<'a> {
    /// `b(t)`, the (possibly sign-changing) stiffness coefficient.
    pub coeff: &'a dyn Fn(f64) -> f64,
    /// `c`, the constant damping/friction coefficient.
    pub damping: f64,
    /// `f(t)`, the drive term.
    pub forcing: &'a dyn Fn(f64) -> f64,
    pub period: f64,
    pub steps: usize,
}

#[derive(Debug)]
pub struct PeriodicSolveResult {
    /// States are `(y, y')`; derivatives hold `(y', y'')`.
    pub trajectory: DenseTrajectory,
    /// `|y(T) - y(0)| + |y'(T) - y'(0)|` of the assembled solution.
    pub periodicity_defect: f64,
}

#[derive(Debug)]
pub struct ZeroAverageResult {
    pub mu: f64,
    /// States are `(y, y')`; derivatives hold `(y', y'')`.
    pub trajectory: DenseTrajectory,
    pub periodicity_defect: f64,
    /// `|mean(y)|` of the assembled solution.
    pub mean_defect: f64,
}

enum Drive {
    Forcing,
    Unit,
    None,
}

fn integrate_basis(
    prob: &LinearPeriodicProblem<'_>,
    drive: Drive,
    y0: f64,
    dy0: f64,
) -> Result<DenseTrajectory, IvpError> {
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        let g = match drive {
            Drive::Forcing => (prob.forcing)(t),
            Drive::Unit => 1.0,
            Drive::None => 0.0,
        };
        dy[0] = y[1];
        dy[1] = g - prob.damping * y[1] - (prob.coeff)(t) * y[0];
    };
    ivp::integrate(rhs, &[y0, dy0], prob.period, prob.steps)
}

fn end_state(traj: &DenseTrajectory) -> (f64, f64) {
    let s = traj.state(traj.steps());
    (s[0], s[1])
}

fn periodicity_defect(traj: &DenseTrajectory) -> f64 {
    let first = traj.state(0);
    let last = traj.state(traj.steps());
    (last[0] - first[0]).abs() + (last[1] - first[1]).abs()
}

/// Solves `L[y] = f` with periodic boundary conditions. Fails with
/// [`LinperError::Resonance`] when the homogeneous problem admits a
/// (numerically) nontrivial periodic solution.
pub fn solve_periodic(
    prob: &LinearPeriodicProblem<'_>,
) -> Result<PeriodicSolveResult, LinperError> {
    let particular = integrate_basis(prob, Drive::Forcing, 0.0, 1.0)?;
    let hom1 = integrate_basis(prob, Drive::None, 0.0, 1.0)?;
    let hom2 = integrate_basis(prob, Drive::None, 1.0, 0.0)?;

    let (yp_end, dyp_end) = end_state(&particular);
    let (y1_end, dy1_end) = end_state(&hom1);
    let (y2_end, dy2_end) = end_state(&hom2);

    // y = Y + c1 y1 + c2 y2 with y(0) = c2, y'(0) = 1 + c1.
    let a = [[y1_end, y2_end - 1.0], [dy1_end - 1.0, dy2_end]];
    let b = [-yp_end, 1.0 - dyp_end];
    let (scaled_det, solution) = solve2(a, b);
    let Some([c1, c2]) = solution else {
        return Err(LinperError::Resonance { scaled_det });
    };

    let trajectory = DenseTrajectory::linear_combination(&[
        (1.0, &particular),
        (c1, &hom1),
        (c2, &hom2),
    ]);
    let defect = periodicity_defect(&trajectory);
    Ok(PeriodicSolveResult { trajectory, periodicity_defect: defect })
}

/// Solves `L[y] = mu + f` for `(mu, y)` with periodic `y` of zero mean,
/// through the augmented 3x3 system described in the module docs.
pub fn solve_zero_average(
    prob: &LinearPeriodicProblem<'_>,
) -> Result<ZeroAverageResult, LinperError> {
    let resp_f = integrate_basis(prob, Drive::Forcing, 0.0, 0.0)?;
    let resp_unit = integrate_basis(prob, Drive::Unit, 0.0, 0.0)?;
    let hom1 = integrate_basis(prob, Drive::None, 0.0, 1.0)?;
    let hom2 = integrate_basis(prob, Drive::None, 1.0, 0.0)?;

    let (rf_end, drf_end) = end_state(&resp_f);
    let (ru_end, dru_end) = end_state(&resp_unit);
    let (y1_end, dy1_end) = end_state(&hom1);
    let (y2_end, dy2_end) = end_state(&hom2);

    // Unknowns x = (c1, c2, mu); y = Y_f + mu Y_1 + c1 y1 + c2 y2.
    // Rows: value periodicity, slope periodicity, zero mean.
    let a = [
        [y1_end, y2_end - 1.0, ru_end],
        [dy1_end - 1.0, dy2_end, dru_end],
        [hom1.mean(0), hom2.mean(0), resp_unit.mean(0)],
    ];
    let b = [-rf_end, -drf_end, -resp_f.mean(0)];
    let (scaled_det, solution) = solve3(a, b);
    let Some([c1, c2, mu]) = solution else {
        return Err(LinperError::SingularSystem { scaled_det });
    };

    let trajectory = DenseTrajectory::linear_combination(&[
        (1.0, &resp_f),
        (mu, &resp_unit),
        (c1, &hom1),
        (c2, &hom2),
    ]);
    let defect = periodicity_defect(&trajectory);
    let mean_defect = trajectory.mean(0).abs();
    Ok(ZeroAverageResult { mu, trajectory, periodicity_defect: defect, mean_defect })
}

/// Cross-check path for the zero-average problem, usable only away from
/// resonance: solve `L[y_f] = f` and `L[y_u] = 1` periodically, then take
/// `mu = -mean(y_f) / mean(y_u)` and `y = y_f + mu y_u`.
pub fn solve_zero_average_two_stage(
    prob: &LinearPeriodicProblem<'_>,
) -> Result<ZeroAverageResult, LinperError> {
    let part_f = solve_periodic(prob)?;
    let unit_forcing = |_: f64| 1.0;
    let unit_prob = LinearPeriodicProblem {
        coeff: prob.coeff,
        damping: prob.damping,
        forcing: &unit_forcing,
        period: prob.period,
        steps: prob.steps,
    };
    let part_u = solve_periodic(&unit_prob)?;
    let mean_u = part_u.trajectory.mean(0);
    if mean_u.abs() < 1e-14 {
        return Err(LinperError::DegenerateUnitResponse);
    }
    let mu = -part_f.trajectory.mean(0) / mean_u;
    let trajectory = DenseTrajectory::linear_combination(&[
        (1.0, &part_f.trajectory),
        (mu, &part_u.trajectory),
    ]);
    let defect = periodicity_defect(&trajectory);
    let mean_defect = trajectory.mean(0).abs();
    Ok(ZeroAverageResult { mu, trajectory, periodicity_defect: defect, mean_defect })
}

fn solve2(a: [[f64; 2]; 2], b: [f64; 2]) -> (f64, Option<[f64; 2]>) {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let r0 = a[0][0].abs().max(a[0][1].abs()).max(1.0);
    let r1 = a[1][0].abs().max(a[1][1].abs()).max(1.0);
    let scaled = det.abs() / (r0 * r1);
    if scaled < RESONANCE_THRESHOLD {
        return (scaled, None);
    }
    let x0 = (b[0] * a[1][1] - b[1] * a[0][1]) / det;
    let x1 = (a[0][0] * b[1] - a[1][0] * b[0]) / det;
    (scaled, Some([x0, x1]))
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> (f64, Option<[f64; 3]>) {
    let scale: f64 = a
        .iter()
        .map(|row| row.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0))
        .product();
    let mut det = 1.0;
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if pivot != col {
            a.swap(col, pivot);
            b.swap(col, pivot);
            det = -det;
        }
        let p = a[col][col];
        if p == 0.0 {
            return (0.0, None);
        }
        det *= p;
        for row in col + 1..3 {
            let factor = a[row][col] / p;
            for k in col..3 {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let scaled = det.abs() / scale;
    if scaled < RESONANCE_THRESHOLD {
        return (scaled, None);
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut s = b[row];
        for k in row + 1..3 {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    (scaled, Some(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TAU: f64 = 2.0 * std::f64::consts::PI;

    fn problem<'a>(
        coeff: &'a dyn Fn(f64) -> f64,
        damping: f64,
        forcing: &'a dyn Fn(f64) -> f64,
        period: f64,
    ) -> LinearPeriodicProblem<'a> {
        LinearPeriodicProblem { coeff, damping, forcing, period, steps: 2048 }
    }

    fn sup_error(traj: &DenseTrajectory, reference: impl Fn(f64) -> f64) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..=traj.steps() {
            let t = traj.grid_time(i);
            worst = worst.max((traj.state(i)[0] - reference(t)).abs());
        }
        worst
    }

    /// Sup over interval midpoints of |y'' + c y' + b y - mu - f|, with y''
    /// taken from the Hermite interpolant of the slope component.
    fn equation_residual(
        traj: &DenseTrajectory,
        coeff: impl Fn(f64) -> f64,
        damping: f64,
        forcing: impl Fn(f64) -> f64,
        mu: f64,
    ) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..traj.steps() {
            let t = 0.5 * (traj.grid_time(i) + traj.grid_time(i + 1));
            let y = traj.sample_component(t, 0).unwrap();
            let dy = traj.sample_component(t, 1).unwrap();
            let ddy = traj.sample_derivative(t, 1).unwrap();
            worst = worst.max((ddy + damping * dy + coeff(t) * y - mu - forcing(t)).abs());
        }
        worst
    }

    #[test]
    fn harmonic_balance_periodic_solution() {
        // y'' + 2y = sin t on [0, 2pi]: the unique periodic solution is
        // sin t itself, since (2 - 1) * B = 1 fixes the sine amplitude.
        let coeff = |_: f64| 2.0;
        let forcing = |t: f64| t.sin();
        let prob = problem(&coeff, 0.0, &forcing, TAU);
        let sol = solve_periodic(&prob).unwrap();
        assert!(sup_error(&sol.trajectory, |t| t.sin()) < 1e-8);
        assert!(sol.periodicity_defect < 1e-9);
    }

    #[test]
    fn resonant_problem_is_rejected() {
        // y'' + y with T = 2pi: sin and cos are periodic homogeneous
        // solutions, so the periodicity system is singular.
        let coeff = |_: f64| 1.0;
        let forcing = |t: f64| t.sin();
        let prob = problem(&coeff, 0.0, &forcing, TAU);
        match solve_periodic(&prob) {
            Err(LinperError::Resonance { scaled_det }) => {
                assert!(scaled_det < RESONANCE_THRESHOLD)
            }
            other => panic!("expected resonance, got {other:?}"),
        }
    }

    #[test]
    fn zero_forcing_gives_zero_solution() {
        let coeff = |_: f64| 2.0;
        let forcing = |_: f64| 0.0;
        let prob = problem(&coeff, 0.5, &forcing, TAU);
        let sol = solve_periodic(&prob).unwrap();
        assert!(sup_error(&sol.trajectory, |_| 0.0) < 1e-12);
    }

    #[test]
    fn zero_average_recovers_pure_sine() {
        // y'' + 2y = mu + sin t: mu = 0 and y = sin t (already mean-free).
        let coeff = |_: f64| 2.0;
        let forcing = |t: f64| t.sin();
        let prob = problem(&coeff, 0.0, &forcing, TAU);
        let sol = solve_zero_average(&prob).unwrap();
        assert!(sol.mu.abs() < 1e-10);
        assert!(sup_error(&sol.trajectory, |t| t.sin()) < 1e-8);
        assert!(sol.mean_defect < 1e-10);
        assert!(sol.periodicity_defect < 1e-9);
    }

    #[test]
    fn zero_average_handles_vanishing_coefficient() {
        // y'' + y' = mu + sin t: integrating over a period forces mu = 0,
        // and the zero-mean periodic solution is -(sin t + cos t)/2. The
        // plain periodicity system is singular here (constants are periodic
        // homogeneous solutions); the augmented system is not.
        let coeff = |_: f64| 0.0;
        let forcing = |t: f64| t.sin();
        let prob = problem(&coeff, 1.0, &forcing, TAU);
        let sol = solve_zero_average(&prob).unwrap();
        assert!(sol.mu.abs() < 1e-10);
        assert!(sup_error(&sol.trajectory, |t| -0.5 * (t.sin() + t.cos())) < 1e-8);
        assert!(sol.mean_defect < 1e-10);

        // And the fully degenerate b == 0, c == 0 case: y'' = mu + sin t
        // gives mu = 0, y = -sin t.
        let undamped = problem(&coeff, 0.0, &forcing, TAU);
        let sol = solve_zero_average(&undamped).unwrap();
        assert!(sol.mu.abs() < 1e-10);
        assert!(sup_error(&sol.trajectory, |t| -t.sin()) < 1e-8);
    }

    #[test]
    fn plain_periodic_solve_rejects_vanishing_coefficient() {
        let coeff = |_: f64| 0.0;
        let forcing = |t: f64| t.sin();
        let prob = problem(&coeff, 1.0, &forcing, TAU);
        assert!(matches!(solve_periodic(&prob), Err(LinperError::Resonance { .. })));
    }

    #[test]
    fn variable_coefficient_solution_satisfies_equation() {
        let period = 0.8;
        let omega = TAU / period;
        let coeff = move |t: f64| 2.0 + (omega * t).cos().powi(3);
        let forcing = move |t: f64| 5.0 * (omega * t).sin();
        let prob = problem(&coeff, 0.5, &forcing, period);
        let sol = solve_zero_average(&prob).unwrap();
        assert!(sol.mean_defect < 1e-10);
        assert!(sol.periodicity_defect < 1e-9);
        assert!(equation_residual(&sol.trajectory, coeff, 0.5, forcing, sol.mu) < 1e-6);
    }

    #[test]
    fn zero_average_is_linear_in_the_forcing() {
        let period = 1.2;
        let omega = TAU / period;
        let coeff = move |t: f64| -0.3 + 0.2 * (omega * t).sin();
        let f1 = move |t: f64| (omega * t).sin();
        let f2 = move |t: f64| 0.7 * (2.0 * omega * t).cos() - 0.1;
        let fsum = move |t: f64| f1(t) + f2(t);

        let s1 = solve_zero_average(&problem(&coeff, 0.4, &f1, period)).unwrap();
        let s2 = solve_zero_average(&problem(&coeff, 0.4, &f2, period)).unwrap();
        let ssum = solve_zero_average(&problem(&coeff, 0.4, &fsum, period)).unwrap();

        assert!((ssum.mu - (s1.mu + s2.mu)).abs() < 1e-10);
        let mut worst = 0.0_f64;
        for i in 0..=ssum.trajectory.steps() {
            let combined = s1.trajectory.state(i)[0] + s2.trajectory.state(i)[0];
            worst = worst.max((ssum.trajectory.state(i)[0] - combined).abs());
        }
        assert!(worst < 1e-9, "linearity defect {worst}");
    }

    #[test]
    fn two_stage_split_agrees_away_from_resonance() {
        let period = 1.2;
        let omega = TAU / period;
        let coeff = move |t: f64| -1.5 + 0.5 * (omega * t).cos();
        let forcing = move |t: f64| 3.0 * (omega * t).sin() + (2.0 * omega * t).cos();
        let prob = problem(&coeff, 0.5, &forcing, period);
        let direct = solve_zero_average(&prob).unwrap();
        let split = solve_zero_average_two_stage(&prob).unwrap();
        assert!((direct.mu - split.mu).abs() < 1e-10);
        let mut worst = 0.0_f64;
        for i in 0..=direct.trajectory.steps() {
            worst = worst
                .max((direct.trajectory.state(i)[0] - split.trajectory.state(i)[0]).abs());
        }
        assert!(worst < 1e-9, "path disagreement {worst}");
    }

    #[test]
    fn below_omega_squared_coefficients_never_resonate() {
        // One-sided nonresonance: if b(t) stays below (2pi/T)^2 the
        // augmented solve must succeed, whatever the sign of b or c.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_0001);
        for _ in 0..60 {
            let period = rng.gen_range(0.5..3.0);
            let omega = TAU / period;
            let omega_sq = omega * omega;
            let base = rng.gen_range(-2.0 * omega_sq..0.85 * omega_sq);
            let wobble = rng.gen_range(0.0..0.1 * omega_sq);
            let phase: f64 = rng.gen_range(0.0..TAU);
            let cap = 0.9 * omega_sq;
            let coeff = move |t: f64| {
                let v = base + wobble * (omega * t + phase).sin();
                v.min(cap)
            };
            let damping = rng.gen_range(-2.0..2.0);
            let amp = rng.gen_range(0.1..5.0);
            let forcing = move |t: f64| amp * (omega * t).sin();
            let prob = LinearPeriodicProblem {
                coeff: &coeff,
                damping,
                forcing: &forcing,
                period,
                steps: 512,
            };
            let sol = solve_zero_average(&prob);
            assert!(
                sol.is_ok(),
                "unexpected singularity: base {base:.3}, damping {damping:.3}, T {period:.3}"
            );
        }
    }
}
