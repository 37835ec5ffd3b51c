//! Radial p-Laplace initial-value integration and two-point shooting.
//!
//! The equation phi_p(u')' + (n-1)/r phi_p(u') + f(u) = 0 is integrated as
//! the first-order system in (u, w) with w = r^{n-1} phi_p(u'):
//!
//! ```text
//! u' = phi_p_inv(w / r^{n-1}),   w' = -r^{n-1} f(u),
//! ```
//!
//! which is regular away from the origin even for p != 2. The origin itself
//! is crossed with a series start on [0, r0] forced by the integral form
//! (r^{n-1} phi_p(u'))' = -r^{n-1} f(u).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::PowerSumNonlinearity;
use crate::ode::{self, Stop, StepperOptions, Trajectory};

/// phi_p(t) = t|t|^{p-2}, the p-Laplace flux function; phi_p(0) = 0.
pub fn phi_p(t: f64, p: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * t.abs().powf(p - 2.0)
    }
}

/// Inverse of phi_p: sign(s)|s|^{1/(p-1)}.
pub fn phi_p_inv(s: f64, p: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        s.signum() * s.abs().powf(1.0 / (p - 1.0))
    }
}

/// phi_p'(t) = (p-1)|t|^{p-2}; unbounded at 0 for p < 2, zero for p > 2.
pub fn phi_p_prime(t: f64, p: f64) -> f64 {
    (p - 1.0) * t.abs().powf(p - 2.0)
}

/// The radial problem on a ball: dimension n, operator exponent p,
/// nonlinearity f, and ball radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProblem {
    pub n: f64,
    pub p: f64,
    pub nl: PowerSumNonlinearity,
    pub radius: f64,
}

impl RadialProblem {
    pub fn new(n: f64, p: f64, nl: PowerSumNonlinearity) -> Result<Self> {
        Self::with_radius(n, p, nl, 1.0)
    }

    pub fn with_radius(n: f64, p: f64, nl: PowerSumNonlinearity, radius: f64) -> Result<Self> {
        let prob = Self { n, p, nl, radius };
        prob.validate()?;
        Ok(prob)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0) || !self.p.is_finite() {
            return Err(Error::PreconditionViolation(format!("p = {} must exceed 1", self.p)));
        }
        if !(self.n >= 2.0) || !self.n.is_finite() {
            return Err(Error::PreconditionViolation(format!(
                "dimension n = {} must be at least 2",
                self.n
            )));
        }
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::PreconditionViolation(format!(
                "radius = {} must be positive",
                self.radius
            )));
        }
        self.nl.validate()
    }
}

/// Tolerances and grid parameters for integration, shooting, and events.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverControls {
    /// Relative tolerance of the embedded 5(4) pair.
    pub rtol: f64,
    /// Absolute tolerance of the embedded 5(4) pair.
    pub atol: f64,
    /// Shooting stops once |u(radius; alpha)| falls below this.
    pub bvp_tol: f64,
    /// Resolution limit of the shooting parameter.
    pub alpha_tol: f64,
    /// |u| threshold when refining a zero crossing on dense output.
    pub event_tol: f64,
    /// first_zero gives up past this radius.
    pub r_max: f64,
    /// Uniform resampling grid size (odd, for Simpson).
    pub sample_points: usize,
    pub max_steps: usize,
    /// Series window as a fraction of the problem radius.
    pub series_fraction: f64,
    /// Subdivisions used to hunt for a sign change inside a shooting bracket.
    pub scan_points: usize,
}

impl Default for SolverControls {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            bvp_tol: 1e-10,
            alpha_tol: 1e-12,
            event_tol: 1e-12,
            r_max: 100.0,
            sample_points: 2049,
            max_steps: 2_000_000,
            series_fraction: 1e-4,
            scan_points: 64,
        }
    }
}

impl SolverControls {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rtol", self.rtol),
            ("bvp_tol", self.bvp_tol),
            ("alpha_tol", self.alpha_tol),
            ("event_tol", self.event_tol),
            ("r_max", self.r_max),
            ("series_fraction", self.series_fraction),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::PreconditionViolation(format!(
                    "{name} = {v} must be positive and finite"
                )));
            }
        }
        if !(self.atol >= 0.0) || !self.atol.is_finite() {
            return Err(Error::PreconditionViolation(format!(
                "atol = {} must be nonnegative and finite",
                self.atol
            )));
        }
        if self.series_fraction > 0.5 {
            return Err(Error::PreconditionViolation(format!(
                "series_fraction = {} must not exceed 0.5",
                self.series_fraction
            )));
        }
        if self.sample_points < 3 {
            return Err(Error::PreconditionViolation(format!(
                "sample_points = {} must be at least 3",
                self.sample_points
            )));
        }
        if self.scan_points < 2 || self.max_steps == 0 {
            return Err(Error::PreconditionViolation(
                "scan_points must be >= 2 and max_steps nonzero".into(),
            ));
        }
        Ok(())
    }

    fn stepper(&self) -> StepperOptions {
        StepperOptions { rtol: self.rtol, atol: self.atol, max_steps: self.max_steps }
    }
}

/// A sampled trajectory of the radial equation on [0, r_end].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    /// Strictly increasing from 0 to the integration endpoint.
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub uprime: Vec<f64>,
    /// Shooting amplitude u(0).
    pub alpha: f64,
    /// |u| at the last grid point.
    pub boundary_defect: f64,
}

impl RadialSolution {
    pub fn radius(&self) -> f64 {
        *self.grid.last().unwrap()
    }
}

/// Series expansion used on [0, r0]: phi_p(u'(r)) = -f(alpha) r / n + O(r^2).
struct SeriesStart {
    alpha: f64,
    f_alpha: f64,
    n: f64,
    p: f64,
    r0: f64,
}

impl SeriesStart {
    fn new(prob: &RadialProblem, alpha: f64, ctl: &SolverControls) -> Self {
        let f_alpha = prob.nl.eval_f(alpha);
        let m = 1.0 / (prob.p - 1.0);
        let mut r0 = ctl.series_fraction * prob.radius;
        if f_alpha != 0.0 {
            // shrink the window so the leading correction stays ~1e-6 of alpha;
            // keeps the expansion valid through steep boundary layers at large
            // amplitude, where the default window would overshoot
            let cap = (1e-6 * alpha.abs().max(ctl.atol) * (m + 1.0)
                * (prob.n / f_alpha.abs()).powf(m))
            .powf(1.0 / (m + 1.0));
            if cap < r0 {
                r0 = cap;
            }
        }
        Self { alpha, f_alpha, n: prob.n, p: prob.p, r0: r0.max(1e-100) }
    }

    fn u(&self, r: f64) -> f64 {
        if self.f_alpha == 0.0 {
            return self.alpha;
        }
        let m = 1.0 / (self.p - 1.0);
        self.alpha
            - self.f_alpha.signum() * (self.f_alpha.abs() / self.n).powf(m) * r.powf(m + 1.0)
                / (m + 1.0)
    }

    fn uprime(&self, r: f64) -> f64 {
        -phi_p_inv(self.f_alpha * r / self.n, self.p)
    }

    fn w(&self, r: f64) -> f64 {
        -self.f_alpha * r.powf(self.n) / self.n
    }
}

/// A raw integration: the series window plus the adaptive trajectory.
pub(crate) struct RawSolution {
    series: SeriesStart,
    traj: Trajectory,
    event_step: Option<usize>,
}

impl RawSolution {
    pub(crate) fn final_u(&self) -> f64 {
        self.traj.final_state()[0]
    }

    /// (u, u') at any r in [0, end]; u' is recovered from w exactly.
    pub(crate) fn eval(&self, r: f64, prob: &RadialProblem) -> (f64, f64) {
        if r <= 0.0 {
            return (self.series.alpha, 0.0);
        }
        if r < self.traj.start() {
            return (self.series.u(r), self.series.uprime(r));
        }
        let y = self.traj.eval(r);
        (y[0], phi_p_inv(y[1] / r.powf(prob.n - 1.0), prob.p))
    }
}

fn rhs_for(prob: &RadialProblem) -> impl Fn(f64, [f64; 2]) -> [f64; 2] + '_ {
    let n = prob.n;
    let p = prob.p;
    move |r: f64, y: [f64; 2]| {
        let rn1 = r.powf(n - 1.0);
        [phi_p_inv(y[1] / rn1, p), -rn1 * prob.nl.eval_f(y[0])]
    }
}

pub(crate) fn integrate_raw(
    prob: &RadialProblem,
    alpha: f64,
    r_end: f64,
    ctl: &SolverControls,
    stop: Stop,
) -> Result<RawSolution> {
    prob.validate()?;
    ctl.validate()?;
    if !alpha.is_finite() {
        return Err(Error::PreconditionViolation("alpha must be finite".into()));
    }
    if !(r_end > 0.0) || !r_end.is_finite() {
        return Err(Error::PreconditionViolation(format!("r_end = {r_end} must be positive")));
    }
    let mut series = SeriesStart::new(prob, alpha, ctl);
    if series.r0 >= 0.5 * r_end {
        series.r0 = 0.5 * r_end;
    }
    let r0 = series.r0;
    let y0 = [series.u(r0), series.w(r0)];
    let rhs = rhs_for(prob);
    let out = ode::integrate(&rhs, r0, y0, r_end, &ctl.stepper(), stop)?;
    Ok(RawSolution { series, traj: out.trajectory, event_step: out.event_step })
}

/// Integrates the initial-value problem u(0) = alpha, u'(0) = 0 out to
/// `r_end`, resampling the dense output onto a uniform grid of
/// `ctl.sample_points` points.
pub fn integrate_ivp(
    prob: &RadialProblem,
    alpha: f64,
    r_end: f64,
    ctl: &SolverControls,
) -> Result<RadialSolution> {
    let raw = integrate_raw(prob, alpha, r_end, ctl, Stop::AtEnd)?;
    Ok(resample(&raw, prob, alpha, r_end, ctl.sample_points))
}

fn resample(
    raw: &RawSolution,
    prob: &RadialProblem,
    alpha: f64,
    r_end: f64,
    points: usize,
) -> RadialSolution {
    let m = points.max(3);
    let mut grid = Vec::with_capacity(m);
    let mut u = Vec::with_capacity(m);
    let mut uprime = Vec::with_capacity(m);
    for i in 0..m {
        let r = r_end * i as f64 / (m - 1) as f64;
        let (ui, upi) = if i == 0 {
            (alpha, 0.0)
        } else if i == m - 1 {
            let y = raw.traj.final_state();
            (y[0], phi_p_inv(y[1] / r.powf(prob.n - 1.0), prob.p))
        } else {
            raw.eval(r, prob)
        };
        grid.push(r);
        u.push(ui);
        uprime.push(upi);
    }
    let boundary_defect = u.last().unwrap().abs();
    RadialSolution { grid, u, uprime, alpha, boundary_defect }
}

/// Solves u(radius) = 0 by shooting on the amplitude alpha.
///
/// The bracket is first scanned for a sign change of the shooting map
/// (logarithmically when it spans decades), then the crossing is refined by
/// a bisection/secant hybrid until |u(radius)| <= ctl.bvp_tol.
pub fn shoot_bvp(
    prob: &RadialProblem,
    alpha_lo: f64,
    alpha_hi: f64,
    ctl: &SolverControls,
) -> Result<RadialSolution> {
    prob.validate()?;
    if !(alpha_lo < alpha_hi) {
        return Err(Error::PreconditionViolation(format!(
            "bracket [{alpha_lo}, {alpha_hi}] must be increasing"
        )));
    }
    let shot = |a: f64| -> Result<f64> {
        Ok(integrate_raw(prob, a, prob.radius, ctl, Stop::AtEnd)?.final_u())
    };

    // scan the bracket for a sign change
    let k = ctl.scan_points.max(2);
    let log_spaced = alpha_lo > 0.0 && alpha_hi / alpha_lo > 10.0;
    let sample = |i: usize| -> f64 {
        let t = i as f64 / (k - 1) as f64;
        if log_spaced {
            (alpha_lo.ln() + t * (alpha_hi.ln() - alpha_lo.ln())).exp()
        } else {
            alpha_lo + t * (alpha_hi - alpha_lo)
        }
    };
    let mut bracket = None;
    let mut a_prev = sample(0);
    let mut g_prev = shot(a_prev)?;
    if g_prev.abs() <= ctl.bvp_tol {
        // already a solution (eigenvalue-type maps vanish for every alpha)
        bracket = Some((a_prev, g_prev, a_prev, g_prev));
    }
    if bracket.is_none() {
        for i in 1..k {
            let a = sample(i);
            let g = shot(a)?;
            if g.abs() <= ctl.bvp_tol || (g_prev > 0.0) != (g > 0.0) {
                bracket = Some((a_prev, g_prev, a, g));
                break;
            }
            a_prev = a;
            g_prev = g;
        }
    }
    let (mut a, mut ga, mut b, mut gb) = match bracket {
        Some(t) => t,
        None => return Err(Error::NoBracket { lo: alpha_lo, hi: alpha_hi }),
    };

    // bisection with secant acceleration inside the bracket
    let mut best = if ga.abs() <= gb.abs() { (a, ga) } else { (b, gb) };
    for iter in 0..200 {
        if best.1.abs() <= ctl.bvp_tol {
            break;
        }
        if (b - a).abs() <= ctl.alpha_tol.max(f64::EPSILON * a.abs().max(b.abs())) && iter > 0 {
            // interval exhausted; fall through to the tolerance check below
            break;
        }
        let mid = 0.5 * (a + b);
        let secant = if gb != ga { b - gb * (b - a) / (gb - ga) } else { mid };
        let inside = secant > a.min(b) && secant < a.max(b);
        let c = if inside && iter % 3 != 2 { secant } else { mid };
        let gc = shot(c)?;
        if gc.abs() < best.1.abs() {
            best = (c, gc);
        }
        if gc == 0.0 {
            best = (c, gc);
            break;
        }
        if (ga > 0.0) != (gc > 0.0) {
            b = c;
            gb = gc;
        } else {
            a = c;
            ga = gc;
        }
    }
    if best.1.abs() > ctl.bvp_tol {
        return Err(Error::ShootingStall { defect: best.1.abs(), tol: ctl.bvp_tol });
    }
    integrate_ivp(prob, best.0, prob.radius, ctl)
}

/// Integrates outward from u(0) = alpha until the first sign change of u
/// and refines the crossing on dense output.
///
/// Returns (rho0, u'(rho0)).
pub fn first_zero(prob: &RadialProblem, alpha: f64, ctl: &SolverControls) -> Result<(f64, f64)> {
    if !(alpha > 0.0) {
        return Err(Error::PreconditionViolation(format!("alpha = {alpha} must be positive")));
    }
    let raw = integrate_raw(prob, alpha, ctl.r_max, ctl, Stop::ZeroOfU)?;
    let step = match raw.event_step {
        Some(i) => i,
        None => return Err(Error::NoZero { r_max: ctl.r_max }),
    };
    let (mut ra, mut rb) = (raw.traj.rs[step], raw.traj.rs[step + 1]);
    let mut ua = raw.traj.ys[step][0];
    let mut rho = rb;
    // bisect all the way to interval collapse: the crossing location is then
    // resolved to rounding, not just to where |u| drops below event_tol,
    // which matters for small amplitudes where u' at the zero is tiny
    for _ in 0..128 {
        rho = 0.5 * (ra + rb);
        let (um, _) = raw.eval(rho, prob);
        if um == 0.0 || (rb - ra) <= f64::EPSILON * rb.abs() {
            break;
        }
        if (ua > 0.0) == (um > 0.0) {
            ra = rho;
            ua = um;
        } else {
            rb = rho;
        }
    }
    let (u_rho, slope) = raw.eval(rho, prob);
    if u_rho.abs() > ctl.event_tol.max(1e-9 * alpha.abs()) {
        return Err(Error::PreconditionViolation(format!(
            "zero refinement stalled: |u({rho})| = {:.3e}",
            u_rho.abs()
        )));
    }
    Ok((rho, slope))
}
