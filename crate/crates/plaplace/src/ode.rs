//! Embedded Dormand-Prince 5(4) stepper for the two-component radial system,
//! with cubic-Hermite dense output and first-zero event capture.

use crate::error::{Error, Result};

pub(crate) type State = [f64; 2];

/// Accepted-step record of an adaptive integration: states and derivatives
/// at step endpoints, interpolated in between by cubic Hermite.
#[derive(Debug, Clone)]
pub(crate) struct Trajectory {
    pub rs: Vec<f64>,
    pub ys: Vec<State>,
    pub ds: Vec<State>,
}

impl Trajectory {
    pub fn start(&self) -> f64 {
        self.rs[0]
    }

    pub fn final_state(&self) -> State {
        *self.ys.last().unwrap()
    }

    /// Hermite interpolation of the state at `r`, clamped to the covered span.
    pub fn eval(&self, r: f64) -> State {
        let n = self.rs.len();
        if r <= self.rs[0] {
            return self.ys[0];
        }
        if r >= self.rs[n - 1] {
            return self.ys[n - 1];
        }
        // index of the cell [rs[i], rs[i+1]] containing r
        let i = match self.rs.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
            Ok(j) => return self.ys[j],
            Err(j) => j - 1,
        };
        let h = self.rs[i + 1] - self.rs[i];
        let t = (r - self.rs[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let blend = |c: usize| {
            h00 * self.ys[i][c]
                + h10 * h * self.ds[i][c]
                + h01 * self.ys[i + 1][c]
                + h11 * h * self.ds[i + 1][c]
        };
        [blend(0), blend(1)]
    }
}

/// What terminates the integration besides reaching the right endpoint.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Stop {
    AtEnd,
    /// Stop at the first sign change of component 0.
    ZeroOfU,
}

#[derive(Debug)]
pub(crate) struct Outcome {
    pub trajectory: Trajectory,
    /// Index i such that u changes sign on [rs[i], rs[i+1]].
    pub event_step: Option<usize>,
}

pub(crate) struct StepperOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
// b - b_hat, error estimator weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn min_step_at(r: f64) -> f64 {
    16.0 * f64::EPSILON * r.abs().max(1e-30)
}

/// Integrates y' = rhs(r, y) from (r0, y0) to r_end, recording every
/// accepted step. rhs must be defined on [r0, r_end].
pub(crate) fn integrate<F>(
    rhs: &F,
    r0: f64,
    y0: State,
    r_end: f64,
    opts: &StepperOptions,
    stop: Stop,
) -> Result<Outcome>
where
    F: Fn(f64, State) -> State,
{
    assert!(r_end > r0, "integration span must be forward");
    let mut r = r0;
    let mut y = y0;
    let mut k1 = rhs(r, y);
    if !finite(&k1) {
        return Err(Error::NonFinite { r });
    }

    let mut traj = Trajectory {
        rs: vec![r],
        ys: vec![y],
        ds: vec![k1],
    };

    // start well inside both the span and the handoff radius; the
    // controller grows it geometrically once the error estimate permits
    let mut h = (1e-4 * (r_end - r0))
        .min(0.5 * r0)
        .max(4.0 * min_step_at(r0));
    let mut steps = 0usize;

    loop {
        if r >= r_end {
            return Ok(Outcome { trajectory: traj, event_step: None });
        }
        if steps >= opts.max_steps {
            return Err(Error::StepFailure { r, h });
        }
        steps += 1;

        let h_try = h.min(r_end - r);
        if h_try <= min_step_at(r) {
            // landing within rounding of the endpoint
            if r_end - r <= 4.0 * min_step_at(r_end) {
                return Ok(Outcome { trajectory: traj, event_step: None });
            }
            return Err(Error::StepFailure { r, h: h_try });
        }

        // stages
        let mut k = [[0.0f64; 2]; 7];
        k[0] = k1;
        for s in 1..6 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s - 1][j];
                if a != 0.0 {
                    ys[0] += h_try * a * kj[0];
                    ys[1] += h_try * a * kj[1];
                }
            }
            k[s] = rhs(r + C[s] * h_try, ys);
        }
        let mut y_new = y;
        for (j, kj) in k.iter().enumerate().take(6) {
            if B[j] != 0.0 {
                y_new[0] += h_try * B[j] * kj[0];
                y_new[1] += h_try * B[j] * kj[1];
            }
        }
        k[6] = rhs(r + h_try, y_new);

        // weighted RMS error norm
        let mut err_sq = 0.0;
        for c in 0..2 {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[c];
            }
            e *= h_try;
            let sc = opts.atol + opts.rtol * y[c].abs().max(y_new[c].abs());
            err_sq += (e / sc) * (e / sc);
        }
        let err = (err_sq / 2.0).sqrt();

        if !err.is_finite() || !finite(&y_new) {
            // reject hard; state blew through the floating range mid-step
            h = 0.25 * h_try;
            if h <= min_step_at(r) {
                return Err(Error::NonFinite { r });
            }
            continue;
        }

        if err <= 1.0 {
            // accept
            r += h_try;
            y = y_new;
            k1 = k[6]; // FSAL
            traj.rs.push(r);
            traj.ys.push(y);
            traj.ds.push(k1);

            let m = traj.rs.len() - 1;
            if let Stop::ZeroOfU = stop {
                let u_prev = traj.ys[m - 1][0];
                let u_new = traj.ys[m][0];
                if u_prev != 0.0 && (u_prev > 0.0) != (u_new > 0.0) || u_new == 0.0 {
                    return Ok(Outcome { trajectory: traj, event_step: Some(m - 1) });
                }
            }

            let fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
            h = h_try * fac;
        } else {
            let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 0.9);
            h = h_try * fac;
            if h <= min_step_at(r) {
                return Err(Error::StepFailure { r, h });
            }
        }
    }
}

fn finite(y: &State) -> bool {
    y[0].is_finite() && y[1].is_finite()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> StepperOptions {
        StepperOptions { rtol: 1e-10, atol: 1e-12, max_steps: 1_000_000 }
    }

    #[test]
    fn harmonic_oscillator_round_trip() {
        // y'' = -y as a first-order system; y(0)=1, y'(0)=0 -> cos
        let rhs = |_r: f64, y: State| [y[1], -y[0]];
        let tau = 2.0 * std::f64::consts::PI;
        let out = integrate(&rhs, 1e-8, [1.0, 0.0], tau, &opts(), Stop::AtEnd).unwrap();
        let yf = out.trajectory.final_state();
        assert!((yf[0] - 1.0).abs() < 1e-8, "cos(2pi): {}", yf[0]);
        assert!(yf[1].abs() < 1e-8, "sin(2pi): {}", yf[1]);
    }

    #[test]
    fn dense_output_accuracy() {
        let rhs = |_r: f64, y: State| [y[1], -y[0]];
        let out = integrate(&rhs, 1e-8, [1.0, 0.0], 3.0, &opts(), Stop::AtEnd).unwrap();
        for i in 0..=30 {
            let r = 0.1 + 2.8 * i as f64 / 30.0;
            let y = out.trajectory.eval(r);
            assert!((y[0] - r.cos()).abs() < 1e-7, "at {r}: {} vs {}", y[0], r.cos());
        }
    }

    #[test]
    fn event_detects_first_zero_of_cos() {
        let rhs = |_r: f64, y: State| [y[1], -y[0]];
        let out = integrate(&rhs, 1e-8, [1.0, 0.0], 10.0, &opts(), Stop::ZeroOfU).unwrap();
        let i = out.event_step.expect("cos crosses zero before 10");
        let (a, b) = (out.trajectory.rs[i], out.trajectory.rs[i + 1]);
        let half_pi = std::f64::consts::FRAC_PI_2;
        assert!(a <= half_pi && half_pi <= b, "bracket [{a}, {b}]");
    }

    #[test]
    fn step_failure_on_blowup() {
        // y' = y^2 from y(0)=1 blows up at r=1
        let rhs = |_r: f64, y: State| [y[0] * y[0], 0.0];
        let err = integrate(&rhs, 1e-8, [1.0, 0.0], 2.0, &opts(), Stop::AtEnd).unwrap_err();
        assert!(
            matches!(err, Error::StepFailure { .. } | Error::NonFinite { .. }),
            "{err:?}"
        );
    }
}
