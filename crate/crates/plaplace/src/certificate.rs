//! Non-existence certificates for u'' + (2/r)u' + lambda u + u|u|^{p-1} = 0
//! on the unit ball in R^3.
//!
//! The certificate builds the weight psi = sin(sqrt(4 lambda) r) and checks
//! the condition system that turns the simplified n = 3 identity into a
//! contradiction for nontrivial solutions:
//!
//!   psi(0) = 0,  psi(1) >= 0,  psi''' + 4 lambda psi' = 0,
//!   2(p-1) psi r - (p+3) psi' r^2 > 0 on (0, 1].
//!
//! The positivity condition reduces, with theta = sqrt(4 lambda) r and
//! gamma = (p+3)/(2(p-1)), to sin(theta) - gamma theta cos(theta) > 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::PowerSumNonlinearity;
use crate::ode::Stop;
use crate::solver::{integrate_raw, RadialProblem, SolverControls};

/// gamma = (p+3)/(2(p-1)); lies in (0, 1] exactly when p >= 5.
pub fn gamma_of_p(p: f64) -> f64 {
    (p + 3.0) / (2.0 * (p - 1.0))
}

/// sin(theta) - gamma * theta * cos(theta), the positivity margin of the
/// certificate after substituting theta = sqrt(4 lambda) r.
pub fn theta_inequality_margin(gamma: f64, theta: f64) -> f64 {
    theta.sin() - gamma * theta * theta.cos()
}

/// Numerical slack admitted on psi(1) >= 0 and on the ODE residual; the
/// analytic values are exact, so only rounding passes through here.
const PSI1_SLACK: f64 = 1e-12;
const ODE_RESIDUAL_TOL: f64 = 1e-10;

/// Evaluation of the certificate's condition system at one (lambda, p).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub lambda: f64,
    pub p: f64,
    /// psi(0); must be 0.
    pub psi0: f64,
    /// psi(1) = sin(sqrt(4 lambda)); must be >= 0.
    pub psi1: f64,
    /// max over the grid of |psi''' + 4 lambda psi'| (rounding only for the
    /// sine weight).
    pub ode_residual_max: f64,
    /// min over the (0, 1] grid of 2(p-1) psi r - (p+3) psi' r^2; must be
    /// strictly positive.
    pub positivity_min: f64,
    /// min over the grid of sin(theta) - gamma theta cos(theta).
    pub theta_margin_min: f64,
    pub pass: bool,
    /// Name of the first failing condition when pass is false.
    pub failed_condition: Option<String>,
}

/// Checks the condition system for psi = sin(sqrt(4 lambda) r) on a uniform
/// grid of `grid_size` points over (0, 1].
///
/// A failing condition yields pass = false, never an error.
pub fn certify_nonexistence(lambda: f64, p: f64, grid_size: usize) -> Result<CertificateReport> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::PreconditionViolation(format!("lambda = {lambda} must be positive")));
    }
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::PreconditionViolation(format!("p = {p} must exceed 1")));
    }
    let m = grid_size.max(2);
    let omega = (4.0 * lambda).sqrt();
    let gamma = gamma_of_p(p);
    let psi0 = 0.0f64.sin();
    let psi1 = omega.sin();

    let mut ode_residual_max = 0.0f64;
    let mut positivity_min = f64::INFINITY;
    let mut theta_margin_min = f64::INFINITY;
    for i in 1..=m {
        let r = i as f64 / m as f64;
        let (s, c) = (omega * r).sin_cos();
        let dpsi = omega * c;
        let d3psi = -omega.powi(3) * c;
        ode_residual_max = ode_residual_max.max((d3psi + 4.0 * lambda * dpsi).abs());
        let positivity = 2.0 * (p - 1.0) * s * r - (p + 3.0) * dpsi * r * r;
        positivity_min = positivity_min.min(positivity);
        theta_margin_min = theta_margin_min.min(theta_inequality_margin(gamma, omega * r));
    }

    let mut failed = None;
    if psi0 != 0.0 {
        failed = Some("psi(0) = 0".to_string());
    } else if psi1 < -PSI1_SLACK {
        failed = Some("psi(1) >= 0".to_string());
    } else if ode_residual_max > ODE_RESIDUAL_TOL * (1.0 + (4.0 * lambda).powf(1.5)) {
        failed = Some("psi''' + 4 lambda psi' = 0".to_string());
    } else if !(positivity_min > 0.0) {
        failed = Some("2(p-1) psi r - (p+3) psi' r^2 > 0".to_string());
    }

    Ok(CertificateReport {
        lambda,
        p,
        psi0,
        psi1,
        ode_residual_max,
        positivity_min,
        theta_margin_min,
        pass: failed.is_none(),
        failed_condition: failed,
    })
}

/// One amplitude of an empirical shooting sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub alpha: f64,
    /// u(1; alpha) when the integration succeeded.
    pub u_end: Option<f64>,
    pub error: Option<String>,
}

/// Numerical cross-check of a certificate: shoots the problem at each
/// amplitude and looks for a sign change of u(1; alpha).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub lambda: f64,
    pub p: f64,
    pub entries: Vec<SweepEntry>,
    /// True when u(1; alpha) changes sign (or hits zero) across the sweep,
    /// i.e. a Dirichlet solution candidate exists between two amplitudes.
    pub candidate_found: bool,
}

/// Integrates u'' + (2/r)u' + lambda u + u|u|^{p-1} = 0 for each positive
/// amplitude and records the sign of u(1).
///
/// Per-amplitude integrator failures are recorded in the entry, not raised.
pub fn empirical_shooting_sweep(
    lambda: f64,
    p: f64,
    alphas: &[f64],
    ctl: &SolverControls,
) -> Result<SweepReport> {
    if !(lambda > 0.0) || !(p > 1.0) {
        return Err(Error::PreconditionViolation(
            "sweep needs lambda > 0 and p > 1".into(),
        ));
    }
    let nl = PowerSumNonlinearity::single_power(lambda, p);
    let prob = RadialProblem::new(3.0, 2.0, nl)?;
    let mut entries = Vec::with_capacity(alphas.len());
    let mut last_sign: Option<bool> = None;
    let mut candidate_found = false;
    for &alpha in alphas {
        if alpha == 0.0 {
            continue; // trivial solution, excluded from the report
        }
        match integrate_raw(&prob, alpha, 1.0, ctl, Stop::AtEnd) {
            Ok(raw) => {
                let u1 = raw.final_u();
                if u1 == 0.0 {
                    candidate_found = true;
                } else {
                    let sign = u1 > 0.0;
                    if let Some(prev) = last_sign {
                        if prev != sign {
                            candidate_found = true;
                        }
                    }
                    last_sign = Some(sign);
                }
                entries.push(SweepEntry { alpha, u_end: Some(u1), error: None });
            }
            Err(e) => {
                entries.push(SweepEntry { alpha, u_end: None, error: Some(e.to_string()) });
            }
        }
    }
    Ok(SweepReport { lambda, p, entries, candidate_found })
}

/// Log-spaced amplitudes for sweeps, endpoints included.
pub fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}
