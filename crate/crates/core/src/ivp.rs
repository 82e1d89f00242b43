//! Fixed-step classical RK4 over one period `[0, T]` with dense output.
//!
//! The trajectory stores states and right-hand-side values at every node;
//! off-grid queries interpolate with the cubic Hermite polynomial of the
//! enclosing step, which preserves the integrator's fourth-order accuracy.
//! Means are composite-Simpson averages, so the step count is kept even.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IvpError {
    #[error("state became non-finite at t = {t:.6}")]
    Blowup { t: f64 },
    #[error("sample time {t} lies outside [0, {period}]")]
    OutOfRange { t: f64, period: f64 },
    #[error("step count {given} is below the minimum of 4")]
    TooFewSteps { given: usize },
    #[error("period must be positive and finite, got {period}")]
    BadPeriod { period: f64 },
    #[error("initial state must be finite and non-empty")]
    BadInitialState,
}

/// Uniform-grid trajectory of a first-order system on `[0, T]`.
#[derive(Debug, Clone)]
pub struct DenseTrajectory {
    period: f64,
    steps: usize,
    dim: usize,
    /// `(steps + 1) * dim`, node-major.
    states: Vec<f64>,
    /// Right-hand side at each node, same layout as `states`.
    derivs: Vec<f64>,
}

/// Integrates `y' = rhs(t, y)` from `y0` over `[0, period]` in `steps`
/// fixed RK4 steps. `steps` is rounded up to an even count (minimum 4) and
/// the actual value is recorded on the trajectory.
pub fn integrate<F>(
    mut rhs: F,
    y0: &[f64],
    period: f64,
    steps: usize,
) -> Result<DenseTrajectory, IvpError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if !(period.is_finite() && period > 0.0) {
        return Err(IvpError::BadPeriod { period });
    }
    if steps < 4 {
        return Err(IvpError::TooFewSteps { given: steps });
    }
    if y0.is_empty() || y0.iter().any(|v| !v.is_finite()) {
        return Err(IvpError::BadInitialState);
    }
    let steps = steps + steps % 2;
    let dim = y0.len();
    let h = period / steps as f64;

    let mut states = Vec::with_capacity((steps + 1) * dim);
    let mut derivs = Vec::with_capacity((steps + 1) * dim);
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut stage = vec![0.0; dim];

    let node_time = |i: usize| period * (i as f64 / steps as f64);

    rhs(0.0, &y, &mut k1);
    states.extend_from_slice(&y);
    derivs.extend_from_slice(&k1);

    for i in 0..steps {
        let t = node_time(i);
        // k1 is already the rhs at the current node.
        for j in 0..dim {
            stage[j] = y[j] + 0.5 * h * k1[j];
        }
        rhs(t + 0.5 * h, &stage, &mut k2);
        for j in 0..dim {
            stage[j] = y[j] + 0.5 * h * k2[j];
        }
        rhs(t + 0.5 * h, &stage, &mut k3);
        for j in 0..dim {
            stage[j] = y[j] + h * k3[j];
        }
        rhs(t + h, &stage, &mut k4);
        for j in 0..dim {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        let t_next = node_time(i + 1);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(IvpError::Blowup { t: t_next });
        }
        rhs(t_next, &y, &mut k1);
        if k1.iter().any(|v| !v.is_finite()) {
            return Err(IvpError::Blowup { t: t_next });
        }
        states.extend_from_slice(&y);
        derivs.extend_from_slice(&k1);
    }

    Ok(DenseTrajectory { period, steps, dim, states, derivs })
}

impl DenseTrajectory {
    /// Builds a trajectory by sampling known values and time-derivatives at
    /// the grid nodes. `fill(t, state, deriv)` writes both slices for node
    /// time `t`. Same grid conventions as [`integrate`].
    pub fn from_samples<F>(
        period: f64,
        steps: usize,
        dim: usize,
        mut fill: F,
    ) -> Result<DenseTrajectory, IvpError>
    where
        F: FnMut(f64, &mut [f64], &mut [f64]),
    {
        if !(period.is_finite() && period > 0.0) {
            return Err(IvpError::BadPeriod { period });
        }
        if steps < 4 {
            return Err(IvpError::TooFewSteps { given: steps });
        }
        let steps = steps + steps % 2;
        let mut states = vec![0.0; (steps + 1) * dim];
        let mut derivs = vec![0.0; (steps + 1) * dim];
        for i in 0..=steps {
            let t = period * (i as f64 / steps as f64);
            fill(
                t,
                &mut states[i * dim..(i + 1) * dim],
                &mut derivs[i * dim..(i + 1) * dim],
            );
        }
        Ok(DenseTrajectory { period, steps, dim, states, derivs })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid_time(&self, i: usize) -> f64 {
        self.period * (i as f64 / self.steps as f64)
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.dim..(i + 1) * self.dim]
    }

    pub fn deriv(&self, i: usize) -> &[f64] {
        &self.derivs[i * self.dim..(i + 1) * self.dim]
    }

    fn locate(&self, t: f64) -> Result<(usize, f64, f64), IvpError> {
        if !t.is_finite() || t < 0.0 || t > self.period {
            return Err(IvpError::OutOfRange { t, period: self.period });
        }
        let mut i = ((t / self.period) * self.steps as f64) as usize;
        if i >= self.steps {
            i = self.steps - 1;
        }
        // Guard against rounding placing t just outside the nominal cell.
        if t < self.grid_time(i) && i > 0 {
            i -= 1;
        } else if t > self.grid_time(i + 1) && i + 1 < self.steps {
            i += 1;
        }
        let t0 = self.grid_time(i);
        let t1 = self.grid_time(i + 1);
        Ok((i, (t - t0) / (t1 - t0), t1 - t0))
    }

    /// Cubic-Hermite interpolation of the full state at `t`.
    pub fn sample(&self, t: f64) -> Result<Vec<f64>, IvpError> {
        let (i, s, h) = self.locate(t)?;
        Ok((0..self.dim).map(|j| self.hermite(i, s, h, j)).collect())
    }

    /// Cubic-Hermite interpolation of one component at `t`.
    pub fn sample_component(&self, t: f64, component: usize) -> Result<f64, IvpError> {
        let (i, s, h) = self.locate(t)?;
        Ok(self.hermite(i, s, h, component))
    }

    /// Derivative (in t) of the Hermite interpolant of one component.
    pub fn sample_derivative(&self, t: f64, component: usize) -> Result<f64, IvpError> {
        let (i, s, h) = self.locate(t)?;
        let y0 = self.state(i)[component];
        let y1 = self.state(i + 1)[component];
        let m0 = self.deriv(i)[component];
        let m1 = self.deriv(i + 1)[component];
        let d00 = 6.0 * s * s - 6.0 * s;
        let d10 = 3.0 * s * s - 4.0 * s + 1.0;
        let d01 = -d00;
        let d11 = 3.0 * s * s - 2.0 * s;
        Ok((d00 * y0 + d01 * y1) / h + d10 * m0 + d11 * m1)
    }

    fn hermite(&self, i: usize, s: f64, h: f64, j: usize) -> f64 {
        let y0 = self.state(i)[j];
        if s == 0.0 {
            return y0;
        }
        let y1 = self.state(i + 1)[j];
        if s == 1.0 {
            return y1;
        }
        let m0 = self.deriv(i)[j];
        let m1 = self.deriv(i + 1)[j];
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1
    }

    /// Composite-Simpson mean of one component over the period.
    pub fn mean(&self, component: usize) -> f64 {
        assert!(component < self.dim, "component {component} out of range");
        let h = self.period / self.steps as f64;
        let mut sum = 0.0;
        let mut carry = 0.0;
        let mut add = |value: f64| {
            // Kahan compensation keeps the fixed-order sum near machine accuracy.
            let y = value - carry;
            let t = sum + y;
            carry = (t - sum) - y;
            sum = t;
        };
        for i in 0..=self.steps {
            let w = if i == 0 || i == self.steps {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            add(w * self.state(i)[component]);
        }
        sum * h / (3.0 * self.period)
    }

    /// Min and max of one component over the grid nodes.
    pub fn component_extrema(&self, component: usize) -> (f64, f64) {
        assert!(component < self.dim, "component {component} out of range");
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..=self.steps {
            let v = self.state(i)[component];
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }

    /// Node-wise linear combination of trajectories that share a grid.
    /// States and derivatives combine together, which is exact when the
    /// parts solve the same linear ODE up to their drive terms.
    pub fn linear_combination(parts: &[(f64, &DenseTrajectory)]) -> DenseTrajectory {
        let (_, first) = parts.first().expect("at least one part");
        for (_, traj) in parts {
            assert_eq!(traj.steps, first.steps, "grid mismatch");
            assert_eq!(traj.dim, first.dim, "dimension mismatch");
            assert!(
                (traj.period - first.period).abs() <= f64::EPSILON * first.period.abs(),
                "period mismatch"
            );
        }
        let len = first.states.len();
        let mut states = vec![0.0; len];
        let mut derivs = vec![0.0; len];
        for (weight, traj) in parts {
            for k in 0..len {
                states[k] += weight * traj.states[k];
                derivs[k] += weight * traj.derivs[k];
            }
        }
        DenseTrajectory {
            period: first.period,
            steps: first.steps,
            dim: first.dim,
            states,
            derivs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_endpoint() {
        let traj = integrate(|_, y, dy| dy[0] = -y[0], &[1.0], 1.0, 200).unwrap();
        let got = traj.state(traj.steps())[0];
        assert!((got - (-1.0_f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn harmonic_oscillator_endpoint() {
        let rhs = |_: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let tau = 2.0 * std::f64::consts::PI;
        let traj = integrate(rhs, &[1.0, 0.0], tau, 2048).unwrap();
        let end = traj.state(traj.steps());
        assert!((end[0] - 1.0).abs() < 1e-10);
        assert!(end[1].abs() < 1e-10);
    }

    #[test]
    fn blowup_reported_near_singular_time() {
        // y' = y^2 from y(0) = 1 blows up at t = 1.
        let err = integrate(|_, y, dy| dy[0] = y[0] * y[0], &[1.0], 2.0, 1000).unwrap_err();
        match err {
            IvpError::Blowup { t } => assert!((0.9..1.2).contains(&t), "blowup at t = {t}"),
            other => panic!("expected blowup, got {other:?}"),
        }
    }

    #[test]
    fn odd_step_counts_round_up() {
        let traj = integrate(|_, _, dy| dy[0] = 1.0, &[0.0], 1.0, 101).unwrap();
        assert_eq!(traj.steps(), 102);
        assert!(matches!(
            integrate(|_, _, dy| dy[0] = 1.0, &[0.0], 1.0, 3),
            Err(IvpError::TooFewSteps { given: 3 })
        ));
    }

    #[test]
    fn sampling_is_exact_on_nodes_and_linear_states() {
        let rhs = |t: f64, _: &[f64], dy: &mut [f64]| dy[0] = t.cos();
        let traj = integrate(rhs, &[0.0], 2.0, 64).unwrap();
        for i in 0..=traj.steps() {
            let t = traj.grid_time(i);
            assert_eq!(traj.sample_component(t, 0).unwrap(), traj.state(i)[0]);
        }
        // y' = 2 gives the line y = 2t; Hermite is exact on cubics.
        let line = integrate(|_, _, dy| dy[0] = 2.0, &[0.0], 1.0, 16).unwrap();
        for k in 0..=40 {
            let t = k as f64 / 40.0;
            assert!((line.sample_component(t, 0).unwrap() - 2.0 * t).abs() < 1e-14);
        }
    }

    #[test]
    fn sampling_matches_cubic_exactly() {
        // y = t^3 - t solves y' = 3t^2 - 1.
        let traj = integrate(|t, _, dy| dy[0] = 3.0 * t * t - 1.0, &[0.0], 1.0, 8).unwrap();
        for k in 0..=33 {
            let t = k as f64 / 33.0;
            let want = t.powi(3) - t;
            assert!((traj.sample_component(t, 0).unwrap() - want).abs() < 1e-13);
            assert!((traj.sample_derivative(t, 0).unwrap() - (3.0 * t * t - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn out_of_range_samples_error() {
        let traj = integrate(|_, _, dy| dy[0] = 0.0, &[1.0], 1.0, 8).unwrap();
        assert!(matches!(traj.sample(1.5), Err(IvpError::OutOfRange { .. })));
        assert!(matches!(traj.sample(-0.1), Err(IvpError::OutOfRange { .. })));
        assert!(traj.sample(0.0).is_ok());
        assert!(traj.sample(1.0).is_ok());
    }

    #[test]
    fn mean_of_constant_and_harmonics() {
        let tau = 2.0 * std::f64::consts::PI;
        let rhs = |_: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let traj = integrate(rhs, &[0.0, 1.0], tau, 256).unwrap();
        // sin has zero mean; the tolerance covers the integrator's own
        // global error (~1e-8 at this resolution), which dominates the
        // quadrature error by orders of magnitude.
        assert!(traj.mean(0).abs() < 1e-7);

        let flat = integrate(|_, _, dy| dy[0] = 0.0, &[3.5], 1.0, 64).unwrap();
        assert!((flat.mean(0) - 3.5).abs() < 1e-15);
    }

    #[test]
    fn mean_is_spectrally_exact_for_low_harmonics() {
        // Fill a trajectory whose component is a degree-8 trig polynomial on
        // an N = 64 grid (degree <= N/4); Simpson must be exact to 1e-13.
        let tau = 2.0 * std::f64::consts::PI;
        let n = 64;
        let f = |t: f64| {
            1.25 + (t).sin() + 0.5 * (3.0 * t).cos() - 0.25 * (8.0 * t).sin()
        };
        let df = |t: f64| (t).cos() - 1.5 * (3.0 * t).sin() - 2.0 * (8.0 * t).cos();
        // Integrating y' = df reproduces f at the nodes only up to the
        // accumulated quadrature error of the 8th harmonic, so this first
        // check runs on a finer grid with a correspondingly loose tolerance.
        let traj = integrate(|t, _, dy| dy[0] = df(t), &[f(0.0)], tau, 512).unwrap();
        assert!((traj.mean(0) - 1.25).abs() < 1e-6);

        // Pure quadrature check with exact node values, no integrator error:
        let exact = DenseTrajectory {
            period: tau,
            steps: n,
            dim: 1,
            states: (0..=n).map(|i| f(tau * i as f64 / n as f64)).collect(),
            derivs: (0..=n).map(|i| df(tau * i as f64 / n as f64)).collect(),
        };
        assert!((exact.mean(0) - 1.25).abs() < 1e-13);
    }

    #[test]
    fn fourth_order_convergence_ratio() {
        // Error(N) / Error(2N) should sit in [12, 20] for smooth problems.

        // Analytic reference: exponential decay.
        let rhs_exp = |_: f64, y: &[f64], dy: &mut [f64]| dy[0] = -y[0];
        let coarse = integrate(rhs_exp, &[1.0], 1.0, 64).unwrap();
        let fine = integrate(rhs_exp, &[1.0], 1.0, 128).unwrap();
        let truth = (-1.0_f64).exp();
        let ratio = (coarse.state(coarse.steps())[0] - truth).abs()
            / (fine.state(fine.steps())[0] - truth).abs();
        assert!((12.0..=20.0).contains(&ratio), "exp ratio {ratio}");

        // Numerical reference from a much finer grid: forced logistic growth.
        let rhs_log =
            |t: f64, y: &[f64], dy: &mut [f64]| dy[0] = y[0] * (1.0 - y[0]) + 0.1 * t.sin();
        let reference = integrate(rhs_log, &[0.2], 2.0, 16384).unwrap();
        let truth = reference.state(reference.steps())[0];
        let coarse = integrate(rhs_log, &[0.2], 2.0, 64).unwrap();
        let fine = integrate(rhs_log, &[0.2], 2.0, 128).unwrap();
        let ratio = (coarse.state(coarse.steps())[0] - truth).abs()
            / (fine.state(fine.steps())[0] - truth).abs();
        assert!((12.0..=20.0).contains(&ratio), "logistic ratio {ratio}");
    }

    #[test]
    fn linear_combination_combines_states_and_derivs() {
        let a = integrate(|t, _, dy| dy[0] = t.cos(), &[0.0], 1.0, 32).unwrap();
        let b = integrate(|t, _, dy| dy[0] = t.sin(), &[1.0], 1.0, 32).unwrap();
        let combo = DenseTrajectory::linear_combination(&[(2.0, &a), (-0.5, &b)]);
        for i in 0..=combo.steps() {
            let want_state = 2.0 * a.state(i)[0] - 0.5 * b.state(i)[0];
            let want_deriv = 2.0 * a.deriv(i)[0] - 0.5 * b.deriv(i)[0];
            assert_eq!(combo.state(i)[0], want_state);
            assert_eq!(combo.deriv(i)[0], want_deriv);
        }
    }
}
