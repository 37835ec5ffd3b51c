//! Solution curves in the (lambda, u(0)) plane by shoot-and-scale.
//!
//! For u'' + (2/r)u' + lambda u + u|u|^{q-1} = 0 on the unit ball, the
//! substitution u = lambda^{1/(q-1)} z followed by rho = sqrt(lambda) r
//! removes lambda entirely:
//!
//! ```text
//! z'' + (2/rho) z' + z + z|z|^{q-1} = 0.
//! ```
//!
//! Each shooting amplitude a = z(0) then produces one curve point: the
//! first zero rho0 of the profile gives lambda = rho0^2 and
//! u(0) = lambda^{1/(q-1)} a.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::PowerSumNonlinearity;
use crate::ode::Stop;
use crate::solver::{first_zero, integrate_raw, RadialProblem, RadialSolution, SolverControls};

/// A point on the solution curve of the q-power problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// Shooting amplitude z(0) of the scaled profile.
    pub amplitude_a: f64,
    /// First zero of the profile.
    pub rho0: f64,
    /// lambda = rho0^2.
    pub lambda: f64,
    /// u(0) = lambda^{1/(q-1)} * amplitude_a, the solution maximum.
    pub u0: f64,
}

/// beta = 1/(q-1), the unique exponent making u = lambda^beta z remove
/// lambda from the nonlinearity (beta = 1/4 at the critical power q = 5).
pub fn scaling_exponent(q: f64) -> f64 {
    1.0 / (q - 1.0)
}

fn profile_problem(q: f64) -> Result<RadialProblem> {
    RadialProblem::new(3.0, 2.0, PowerSumNonlinearity::single_power(1.0, q))
}

/// Traces the solution curve over the given positive amplitudes.
pub fn trace_curve(q: f64, amplitudes: &[f64], ctl: &SolverControls) -> Result<Vec<CurvePoint>> {
    if !(q > 1.0) {
        return Err(Error::PreconditionViolation(format!("q = {q} must exceed 1")));
    }
    let prob = profile_problem(q)?;
    let beta = scaling_exponent(q);
    let mut out = Vec::with_capacity(amplitudes.len());
    for &a in amplitudes {
        if !(a > 0.0) {
            return Err(Error::PreconditionViolation(format!("amplitude {a} must be positive")));
        }
        let (rho0, _) = first_zero(&prob, a, ctl)?;
        let lambda = rho0 * rho0;
        out.push(CurvePoint { amplitude_a: a, rho0, lambda, u0: lambda.powf(beta) * a });
    }
    Ok(out)
}

/// The profile of one curve point rescaled back to the unit ball, i.e.
/// the solution u of the original problem at that point's lambda, sampled
/// on `ctl.sample_points` uniform grid points.
pub fn curve_point_solution(
    q: f64,
    a: f64,
    ctl: &SolverControls,
) -> Result<(CurvePoint, RadialSolution)> {
    if !(q > 1.0) || !(a > 0.0) {
        return Err(Error::PreconditionViolation(
            "curve point needs q > 1 and a > 0".into(),
        ));
    }
    let prob = profile_problem(q)?;
    let beta = scaling_exponent(q);
    let (rho0, _) = first_zero(&prob, a, ctl)?;
    let lambda = rho0 * rho0;
    let point = CurvePoint { amplitude_a: a, rho0, lambda, u0: lambda.powf(beta) * a };

    // re-integrate the profile to rho0 and pull back: u(r) = lambda^beta z(sqrt(lambda) r)
    let raw = integrate_raw(&prob, a, rho0, ctl, Stop::AtEnd)?;
    let m = ctl.sample_points.max(3);
    let sqrt_lam = rho0;
    let scale_u = lambda.powf(beta);
    let scale_up = lambda.powf(beta + 0.5);
    let mut grid = Vec::with_capacity(m);
    let mut u = Vec::with_capacity(m);
    let mut uprime = Vec::with_capacity(m);
    for i in 0..m {
        let r = i as f64 / (m - 1) as f64;
        let (z, zp) = raw.eval(sqrt_lam * r, &prob);
        grid.push(r);
        u.push(scale_u * z);
        uprime.push(if i == 0 { 0.0 } else { scale_up * zp });
    }
    let boundary_defect = u.last().unwrap().abs();
    let alpha = u[0];
    Ok((point, RadialSolution { grid, u, uprime, alpha, boundary_defect }))
}

/// Interior local extrema of lambda along the curve, refined by a
/// three-point parabola in log-amplitude. Returns (amplitude, lambda) per
/// turning point; empty when lambda is monotone.
///
/// Differences below 1e-6 of the curve's lambda range count as flat, so
/// solver noise on nearly constant stretches does not register as extrema.
pub fn find_turning_points(curve: &[CurvePoint]) -> Vec<(f64, f64)> {
    let span = curve
        .iter()
        .map(|p| p.lambda)
        .fold(0.0f64, |acc, l| acc.max(l.abs()));
    find_turning_points_with_tol(curve, 1e-6 * span)
}

/// `find_turning_points` with an explicit flatness threshold on consecutive
/// lambda differences.
pub fn find_turning_points_with_tol(curve: &[CurvePoint], tol: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    if curve.len() < 3 {
        return out;
    }
    // sign of the last lambda difference that exceeded the noise floor,
    // and the index it ended at
    let mut last: Option<(bool, usize)> = None;
    for i in 0..curve.len() - 1 {
        let d = curve[i + 1].lambda - curve[i].lambda;
        if d.abs() <= tol {
            continue;
        }
        let rising = d > 0.0;
        if let Some((was_rising, at)) = last {
            if was_rising != rising {
                // extremum somewhere in [at, i+1]
                let slice = &curve[at..=i + 1];
                let (k, _) = slice
                    .iter()
                    .enumerate()
                    .map(|(k, p)| (k, p.lambda))
                    .fold((0usize, slice[0].lambda), |best, (k, l)| {
                        let better = if rising { l < best.1 } else { l > best.1 };
                        if better {
                            (k, l)
                        } else {
                            best
                        }
                    });
                let j = at + k;
                out.push(refine_extremum(curve, j));
            }
        }
        last = Some((rising, i + 1));
    }
    out
}

fn refine_extremum(curve: &[CurvePoint], j: usize) -> (f64, f64) {
    if j == 0 || j + 1 >= curve.len() {
        return (curve[j].amplitude_a, curve[j].lambda);
    }
    let x0 = curve[j - 1].amplitude_a.ln();
    let x1 = curve[j].amplitude_a.ln();
    let x2 = curve[j + 1].amplitude_a.ln();
    let (y0, y1, y2) = (curve[j - 1].lambda, curve[j].lambda, curve[j + 1].lambda);
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let second = (d12 - d01) / (x2 - x0);
    if second == 0.0 {
        return (curve[j].amplitude_a, y1);
    }
    let xv = 0.5 * (x0 + x1) - d01 / (2.0 * second);
    if !xv.is_finite() || xv < x0 || xv > x2 {
        return (curve[j].amplitude_a, y1);
    }
    let yv = y0 + d01 * (xv - x0) + second * (xv - x0) * (xv - x1);
    (xv.exp(), yv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::logspace;
    use std::f64::consts::PI;

    #[test]
    fn scaling_exponent_values() {
        assert!((scaling_exponent(5.0) - 0.25).abs() < 1e-15);
        assert!((scaling_exponent(6.0) - 0.2).abs() < 1e-15);
        assert!((scaling_exponent(3.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn scaling_removes_lambda_from_the_profile() {
        // cross-check of the reduction: integrating the unscaled equation at
        // the lambda produced by a profile point reproduces u(0) = lambda^beta a
        let ctl = SolverControls::default();
        let a = 1.0;
        let (point, _) = curve_point_solution(5.0, a, &ctl).unwrap();
        let nl = PowerSumNonlinearity::single_power(point.lambda, 5.0);
        let prob = RadialProblem::new(3.0, 2.0, nl).unwrap();
        let sol = crate::solver::shoot_bvp(&prob, 0.5 * point.u0, 2.0 * point.u0, &ctl).unwrap();
        let rel = (sol.alpha - point.u0).abs() / point.u0;
        assert!(rel < 1e-6, "u(0) mismatch: {} vs {}", sol.alpha, point.u0);
    }

    #[test]
    fn small_amplitude_limit_is_first_eigenvalue() {
        let ctl = SolverControls::default();
        let pts = trace_curve(5.0, &[1e-4], &ctl).unwrap();
        assert!((pts[0].lambda - PI * PI).abs() < 1e-3, "lambda {}", pts[0].lambda);
    }

    #[test]
    fn critical_curve_is_monotone_toward_quarter_eigenvalue() {
        let ctl = SolverControls::default();
        let pts = trace_curve(5.0, &logspace(1e-2, 1e2, 17), &ctl).unwrap();
        for w in pts.windows(2) {
            assert!(w[1].lambda < w[0].lambda, "lambda must decrease along a");
            assert!(w[1].u0 > w[0].u0, "u0 must grow along a");
        }
        assert!(pts.last().unwrap().lambda > PI * PI / 4.0);
        assert!(find_turning_points(&pts).is_empty());
    }

    #[test]
    fn supercritical_curve_turns_near_its_known_minimum() {
        let ctl = SolverControls::default();
        let pts = trace_curve(6.0, &logspace(0.5, 10.0, 41), &ctl).unwrap();
        let turning = find_turning_points(&pts);
        assert!(!turning.is_empty(), "expected a turning point");
        let (_, lam) = turning[0];
        assert!((lam - 5.91).abs() < 0.05, "first turning point at {lam}");
    }

    #[test]
    fn synthetic_monotone_curve_has_no_turning_points() {
        let pts: Vec<CurvePoint> = (1..=20)
            .map(|i| {
                let a = i as f64;
                CurvePoint { amplitude_a: a, rho0: (1.0 / a).sqrt(), lambda: 1.0 / a, u0: a }
            })
            .collect();
        assert!(find_turning_points(&pts).is_empty());
    }

    #[test]
    fn rescaled_profile_satisfies_classical_identity() {
        let ctl = SolverControls::default();
        let (point, sol) = curve_point_solution(5.0, 2.0, &ctl).unwrap();
        let nl = PowerSumNonlinearity::single_power(point.lambda, 5.0);
        let prob = RadialProblem::new(3.0, 2.0, nl).unwrap();
        let rep = crate::identity::identity_residual_classical(&sol, &prob).unwrap();
        assert!(rep.relative_residual < 1e-5, "rel {}", rep.relative_residual);
    }
}
