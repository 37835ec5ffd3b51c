//! Pohozhaev-type integral identities evaluated as numerical residuals.
//!
//! The general form, for a solution u of the radial p-Laplace problem and
//! any C^2 weight psi, equates
//!
//! ```text
//! int_0^1 [ (p F(u) - u f(u)) (psi r^{n-1})'
//!           + p psi' u f(u) r^{n-1}
//!           - phi_p(u') u L[psi] r^{n-3} ] dr
//! ```
//!
//! with (p-1) phi_p(u'(1)) psi(1) u'(1), where
//! L[psi] = (p-1) r^2 psi'' - (n-1) r psi' + (n-1) psi. Specializations
//! (n = 3 simplified form, psi = r classical form, psi = r^{n-1}
//! energy-only form) are evaluated by their own routines so they can be
//! cross-checked against the general one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{simpson, uniform_spacing};
use crate::solver::{phi_p, phi_p_prime, RadialProblem, RadialSolution};
use crate::testfn::TestFunction;

/// |u'| below which phi_p'(u') is treated as singular/degenerate for p != 2.
pub const DERIVATIVE_GUARD: f64 = 1e-6;

/// Outcome of one identity evaluation.
///
/// `residual` is exactly `lhs - rhs`. `relative_residual` normalizes by the
/// largest of |lhs|, |rhs|, and the L1 mass of the integrand, so it stays
/// meaningful when the two sides cancel to zero (e.g. weights with
/// psi(1) = 0, where both sides of the identity vanish).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub relative_residual: f64,
    /// L1 mass of the integrand, the scale the residual is judged against.
    pub scale: f64,
    pub quadrature_points: usize,
}

impl IdentityReport {
    fn new(lhs: f64, rhs: f64, scale: f64, points: usize) -> Self {
        let residual = lhs - rhs;
        let denom = lhs.abs().max(rhs.abs()).max(scale).max(1e-300);
        IdentityReport {
            lhs,
            rhs,
            residual,
            relative_residual: residual.abs() / denom,
            scale,
            quadrature_points: points,
        }
    }
}

/// L[psi] = (p-1) r^2 psi'' - (n-1) r psi' + (n-1) psi.
///
/// Vanishes identically for psi = r, and for psi = r^{n-1} when p = 2; in
/// general L[r^{n-1}] = (n-1)(n-2)(p-2) r^{n-1}.
pub fn l_operator(psi: &TestFunction, r: f64, n: f64, p: f64) -> f64 {
    (p - 1.0) * r * r * psi.d2psi(r) - (n - 1.0) * r * psi.dpsi(r) + (n - 1.0) * psi.psi(r)
}

fn require_unit_ball(sol: &RadialSolution, prob: &RadialProblem) -> Result<()> {
    if (prob.radius - 1.0).abs() > 1e-9 || (sol.radius() - 1.0).abs() > 1e-9 {
        return Err(Error::DomainMismatch(format!(
            "identity is stated on the unit ball; got radius {}",
            sol.radius()
        )));
    }
    Ok(())
}

/// Residual of the generalized identity for an arbitrary C^2 weight.
pub fn identity_residual_general(
    sol: &RadialSolution,
    prob: &RadialProblem,
    psi: &TestFunction,
) -> Result<IdentityReport> {
    require_unit_ball(sol, prob)?;
    let h = uniform_spacing(&sol.grid)?;
    let (n, p) = (prob.n, prob.p);
    let m = sol.grid.len();
    let mut integrand = Vec::with_capacity(m);
    let mut magnitude = Vec::with_capacity(m);
    for i in 0..m {
        let r = sol.grid[i];
        let u = sol.u[i];
        let up = sol.uprime[i];
        if r == 0.0 {
            // limits: psi' r^{n-1} -> 0 and phi_p(u') = O(r) kills the
            // r^{n-3} factor; only (n-1) psi(0) r^{n-2} survives at n = 2
            let fu = prob.nl.eval_f(u);
            let big_f = prob.nl.eval_big_f(u);
            let t1 = if (n - 2.0).abs() < 1e-12 {
                (p * big_f - u * fu) * (n - 1.0) * psi.psi(0.0)
            } else {
                0.0
            };
            integrand.push(t1);
            magnitude.push(t1.abs());
            continue;
        }
        let fu = prob.nl.eval_f(u);
        let big_f = prob.nl.eval_big_f(u);
        let rn1 = r.powf(n - 1.0);
        let d_psi_rn1 = psi.dpsi(r) * rn1 + (n - 1.0) * psi.psi(r) * r.powf(n - 2.0);
        let t1 = (p * big_f - u * fu) * d_psi_rn1;
        let t2 = p * psi.dpsi(r) * u * fu * rn1;
        let t3 = phi_p(up, p) * u * l_operator(psi, r, n, p) * r.powf(n - 3.0);
        integrand.push(t1 + t2 - t3);
        magnitude.push(t1.abs() + t2.abs() + t3.abs());
    }
    let lhs = simpson(&integrand, h)?;
    let scale = simpson(&magnitude, h)?;
    let up1 = *sol.uprime.last().unwrap();
    let rhs = (p - 1.0) * phi_p(up1, p) * psi.psi(1.0) * up1;
    Ok(IdentityReport::new(lhs, rhs, scale, m))
}

/// Residual of the simplified n = 3, p = 2 identity, which trades the
/// u u' L[psi] term for (1/2) u^2 psi''' r^2 via one integration by parts.
/// Requires psi(0) = 0 and third-derivative data.
pub fn identity_residual_n3(
    sol: &RadialSolution,
    prob: &RadialProblem,
    psi: &TestFunction,
) -> Result<IdentityReport> {
    require_unit_ball(sol, prob)?;
    if (prob.n - 3.0).abs() > 1e-12 || (prob.p - 2.0).abs() > 1e-12 {
        return Err(Error::PreconditionViolation(format!(
            "simplified identity needs n = 3, p = 2; got n = {}, p = {}",
            prob.n, prob.p
        )));
    }
    if psi.psi(0.0).abs() > 1e-12 {
        return Err(Error::PreconditionViolation(
            "simplified identity needs psi(0) = 0".into(),
        ));
    }
    let h = uniform_spacing(&sol.grid)?;
    let m = sol.grid.len();
    let mut integrand = Vec::with_capacity(m);
    let mut magnitude = Vec::with_capacity(m);
    for i in 0..m {
        let r = sol.grid[i];
        let u = sol.u[i];
        let fu = prob.nl.eval_f(u);
        let big_f = prob.nl.eval_big_f(u);
        let (d_psi_r2, dpsi_r2) = if r == 0.0 {
            (0.0, 0.0) // psi(0) = 0 and psi' r^2 -> 0 for every C^2-on-(0,1] weight
        } else {
            (psi.dpsi(r) * r * r + 2.0 * psi.psi(r) * r, psi.dpsi(r) * r * r)
        };
        let t1 = 2.0 * d_psi_r2 * big_f;
        let t2 = (2.0 * dpsi_r2 - d_psi_r2) * u * fu;
        let t3 = 0.5 * u * u * psi.d3psi_times_r2(r);
        integrand.push(t1 + t2 + t3);
        magnitude.push(t1.abs() + t2.abs() + t3.abs());
    }
    let lhs = simpson(&integrand, h)?;
    let scale = simpson(&magnitude, h)?;
    let up1 = *sol.uprime.last().unwrap();
    let rhs = psi.psi(1.0) * up1 * up1;
    Ok(IdentityReport::new(lhs, rhs, scale, m))
}

/// Classical Pohozhaev identity (psi = r, p = 2):
/// int [2n F + (2-n) u f(u)] r^{n-1} dr = u'(1)^2.
pub fn identity_residual_classical(
    sol: &RadialSolution,
    prob: &RadialProblem,
) -> Result<IdentityReport> {
    require_unit_ball(sol, prob)?;
    if (prob.p - 2.0).abs() > 1e-12 {
        return Err(Error::PreconditionViolation(format!(
            "classical identity needs p = 2; got p = {}",
            prob.p
        )));
    }
    let h = uniform_spacing(&sol.grid)?;
    let n = prob.n;
    let m = sol.grid.len();
    let mut integrand = Vec::with_capacity(m);
    let mut magnitude = Vec::with_capacity(m);
    for i in 0..m {
        let r = sol.grid[i];
        let u = sol.u[i];
        let rn1 = if r == 0.0 { 0.0 } else { r.powf(n - 1.0) };
        let t1 = 2.0 * n * prob.nl.eval_big_f(u) * rn1;
        let t2 = (2.0 - n) * u * prob.nl.eval_f(u) * rn1;
        integrand.push(t1 + t2);
        magnitude.push(t1.abs() + t2.abs());
    }
    let lhs = simpson(&integrand, h)?;
    let scale = simpson(&magnitude, h)?;
    let up1 = *sol.uprime.last().unwrap();
    Ok(IdentityReport::new(lhs, up1 * up1, scale, m))
}

/// Energy-only identity from the weight psi = r^{n-1} (p = 2, n >= 3):
/// (4n-4) int F(u) r^{2n-3} dr = u'(1)^2.
pub fn identity_residual_peletier_serrin(
    sol: &RadialSolution,
    prob: &RadialProblem,
) -> Result<IdentityReport> {
    require_unit_ball(sol, prob)?;
    if (prob.p - 2.0).abs() > 1e-12 || prob.n < 3.0 - 1e-12 {
        return Err(Error::PreconditionViolation(format!(
            "energy identity needs p = 2 and n >= 3; got n = {}, p = {}",
            prob.n, prob.p
        )));
    }
    let h = uniform_spacing(&sol.grid)?;
    let n = prob.n;
    let m = sol.grid.len();
    let mut integrand = Vec::with_capacity(m);
    for i in 0..m {
        let r = sol.grid[i];
        let rpow = if r == 0.0 { 0.0 } else { r.powf(2.0 * n - 3.0) };
        integrand.push((4.0 * n - 4.0) * prob.nl.eval_big_f(sol.u[i]) * rpow);
    }
    let lhs = simpson(&integrand, h)?;
    let scale: f64 = simpson(&integrand.iter().map(|v| v.abs()).collect::<Vec<_>>(), h)?;
    let up1 = *sol.uprime.last().unwrap();
    Ok(IdentityReport::new(lhs, up1 * up1, scale, m))
}

/// (u, u') interpolated off-grid from a resampled solution.
///
/// u uses cubic Hermite on (u, u'); u' uses cubic Hermite on (u', u'')
/// with u'' supplied by the differential equation itself, falling back to
/// the derivative of the u-interpolant where phi_p' degenerates.
fn sample_u_up(sol: &RadialSolution, prob: &RadialProblem, x: f64) -> (f64, f64) {
    let h = (sol.radius() - sol.grid[0]) / (sol.grid.len() - 1) as f64;
    let mut i = ((x - sol.grid[0]) / h).floor() as usize;
    i = i.min(sol.grid.len() - 2);
    let (r0, r1) = (sol.grid[i], sol.grid[i + 1]);
    let t = (x - r0) / h;
    let (t2, t3) = (t * t, t * t * t);
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let u = h00 * sol.u[i] + h10 * h * sol.uprime[i] + h01 * sol.u[i + 1] + h11 * h * sol.uprime[i + 1];

    let second = |r: f64, u: f64, up: f64| -> Option<f64> {
        if r == 0.0 {
            if (prob.p - 2.0).abs() < 1e-12 {
                return Some(-prob.nl.eval_f(u) / prob.n);
            }
            return None;
        }
        let denom = phi_p_prime(up, prob.p);
        if !denom.is_finite() || denom.abs() < 1e-14 {
            return None;
        }
        Some(-(prob.nl.eval_f(u) + (prob.n - 1.0) / r * phi_p(up, prob.p)) / denom)
    };
    let upp0 = second(r0, sol.u[i], sol.uprime[i]);
    let upp1 = second(r1, sol.u[i + 1], sol.uprime[i + 1]);
    let up = match (upp0, upp1) {
        (Some(a), Some(b)) => {
            h00 * sol.uprime[i] + h10 * h * a + h01 * sol.uprime[i + 1] + h11 * h * b
        }
        _ => {
            // derivative of the u-interpolant
            let g00 = (6.0 * t2 - 6.0 * t) / h;
            let g10 = 3.0 * t2 - 4.0 * t + 1.0;
            let g01 = (6.0 * t - 6.0 * t2) / h;
            let g11 = 3.0 * t2 - 2.0 * t;
            g00 * sol.u[i] + g10 * sol.uprime[i] + g01 * sol.u[i + 1] + g11 * sol.uprime[i + 1]
        }
    };
    (u, up)
}

/// Central-difference residual of the linearized equation satisfied by
/// v = psi u':
///
/// ```text
/// (phi_p'(u') v')' + (n-1)/r phi_p'(u') v' + f'(u) v
///   + p psi' f(u) - phi_p(u') L[psi] / r^2  ->  0
/// ```
///
/// The residual decays as O(h^2); the nested stencil spans [r-2h, r+2h].
pub fn v_equation_residual(
    sol: &RadialSolution,
    prob: &RadialProblem,
    psi: &TestFunction,
    r: f64,
    h: f64,
) -> Result<f64> {
    v_equation_residual_with_guard(sol, prob, psi, r, h, DERIVATIVE_GUARD)
}

/// As `v_equation_residual` with an explicit |u'| exclusion threshold for
/// p != 2.
pub fn v_equation_residual_with_guard(
    sol: &RadialSolution,
    prob: &RadialProblem,
    psi: &TestFunction,
    r: f64,
    h: f64,
    guard: f64,
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::PreconditionViolation(format!("h = {h} must be positive")));
    }
    if r - 2.0 * h <= 0.0 || r + 2.0 * h >= sol.radius() {
        return Err(Error::PreconditionViolation(format!(
            "stencil [r-2h, r+2h] = [{}, {}] must stay inside (0, {})",
            r - 2.0 * h,
            r + 2.0 * h,
            sol.radius()
        )));
    }
    let (n, p) = (prob.n, prob.p);
    let stencil = [r - 2.0 * h, r - h, r, r + h, r + 2.0 * h];
    let mut u_at = [0.0; 5];
    let mut up_at = [0.0; 5];
    for (j, &x) in stencil.iter().enumerate() {
        let (u, up) = sample_u_up(sol, prob, x);
        if (p - 2.0).abs() > 1e-12 && up.abs() < guard {
            return Err(Error::DerivativeSingularity { r: x, uprime_abs: up.abs() });
        }
        u_at[j] = u;
        up_at[j] = up;
    }
    let v = |j: usize| psi.psi(stencil[j]) * up_at[j];
    // g = phi_p'(u') v', with v' by central differences
    let g = |j: usize| phi_p_prime(up_at[j], p) * (v(j + 1) - v(j - 1)) / (2.0 * h);
    let dg = (g(3) - g(1)) / (2.0 * h);
    Ok(dg + (n - 1.0) / r * g(2) + prob.nl.eval_fprime(u_at[2]) * v(2)
        + p * psi.dpsi(r) * prob.nl.eval_f(u_at[2])
        - phi_p(up_at[2], p) * l_operator(psi, r, n, p) / (r * r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::PowerSumNonlinearity;
    use crate::solver::{integrate_ivp, SolverControls};
    use std::f64::consts::PI;

    fn linear_solution() -> (RadialProblem, RadialSolution) {
        let prob = RadialProblem::new(3.0, 2.0, PowerSumNonlinearity::linear(PI * PI)).unwrap();
        let sol = integrate_ivp(&prob, 1.0, 1.0, &SolverControls::default()).unwrap();
        (prob, sol)
    }

    fn zero_solution(prob: &RadialProblem) -> RadialSolution {
        integrate_ivp(prob, 0.0, 1.0, &SolverControls::default()).unwrap()
    }

    #[test]
    fn l_operator_kernel_and_monomial() {
        let psi_r = TestFunction::monomial(1.0);
        for &(r, n, p) in &[(0.3, 3.0, 2.0), (0.7, 4.0, 3.5), (1.0, 2.0, 1.5)] {
            assert_eq!(l_operator(&psi_r, r, n, p), 0.0);
        }
        // psi = r^{n-1} at p = 2 is the other kernel element
        for &n in &[3.0, 4.0, 5.0] {
            let psi = TestFunction::monomial(n - 1.0);
            for &r in &[0.2, 0.5, 1.0] {
                assert!(l_operator(&psi, r, n, 2.0).abs() < 1e-13 * (1.0 + r.powf(n - 1.0)));
            }
        }
        // general p: L[r^{n-1}] = (n-1)(n-2)(p-2) r^{n-1}
        for &n in &[3.0f64, 4.0, 5.0] {
            for &p in &[1.5f64, 3.0, 4.0] {
                let psi = TestFunction::monomial(n - 1.0);
                for &r in &[0.25f64, 0.8] {
                    let expect = (n - 1.0) * (n - 2.0) * (p - 2.0) * r.powf(n - 1.0);
                    let got = l_operator(&psi, r, n, p);
                    assert!((got - expect).abs() < 1e-12 * (1.0 + expect.abs()), "{got} vs {expect}");
                }
            }
        }
    }

    #[test]
    fn rlogr_is_in_the_n2_kernel() {
        let psi = TestFunction::RLogR;
        for &r in &[0.1, 0.4, 0.9] {
            assert!(l_operator(&psi, r, 2.0, 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn general_identity_on_zero_solution() {
        let prob = RadialProblem::new(3.0, 2.0, PowerSumNonlinearity::linear(1.0)).unwrap();
        let sol = zero_solution(&prob);
        let rep = identity_residual_general(&sol, &prob, &TestFunction::monomial(1.0)).unwrap();
        assert_eq!(rep.lhs, 0.0);
        assert_eq!(rep.rhs, 0.0);
        assert_eq!(rep.relative_residual, 0.0);
    }

    #[test]
    fn general_identity_linear_oracle_psi_r() {
        // lhs = rhs = 1 analytically for u = sin(pi r)/(pi r), psi = r
        let (prob, sol) = linear_solution();
        let rep = identity_residual_general(&sol, &prob, &TestFunction::monomial(1.0)).unwrap();
        assert!((rep.lhs - 1.0).abs() < 1e-6, "lhs {}", rep.lhs);
        assert!((rep.rhs - 1.0).abs() < 1e-6, "rhs {}", rep.rhs);
    }

    #[test]
    fn classical_equals_general_for_psi_r() {
        let (prob, sol) = linear_solution();
        let general = identity_residual_general(&sol, &prob, &TestFunction::monomial(1.0)).unwrap();
        let classical = identity_residual_classical(&sol, &prob).unwrap();
        assert!((general.lhs - classical.lhs).abs() < 1e-12);
        assert!((general.rhs - classical.rhs).abs() < 1e-12);
    }

    #[test]
    fn n3_identity_sine_weight_and_cross_check() {
        let (prob, sol) = linear_solution();
        let psi = TestFunction::sine_scaled(2.0 * PI);
        let rep = identity_residual_n3(&sol, &prob, &psi).unwrap();
        assert!(rep.relative_residual < 1e-6, "rel {}", rep.relative_residual);

        let psi3 = TestFunction::monomial(3.0);
        let a = identity_residual_n3(&sol, &prob, &psi3).unwrap();
        let b = identity_residual_general(&sol, &prob, &psi3).unwrap();
        assert!((a.lhs - b.lhs).abs() < 1e-8, "{} vs {}", a.lhs, b.lhs);
        assert!((a.rhs - b.rhs).abs() < 1e-12);
    }

    #[test]
    fn n3_identity_rejects_wrong_setting() {
        let (prob, sol) = linear_solution();
        let bad_prob = RadialProblem::new(4.0, 2.0, prob.nl.clone()).unwrap();
        assert!(matches!(
            identity_residual_n3(&sol, &bad_prob, &TestFunction::monomial(1.0)),
            Err(Error::PreconditionViolation(_))
        ));
        let psi_const = TestFunction::Polynomial { coeffs: vec![1.0] };
        assert!(matches!(
            identity_residual_n3(&sol, &prob, &psi_const),
            Err(Error::PreconditionViolation(_))
        ));
    }

    #[test]
    fn classical_identity_linear_oracle() {
        let (prob, sol) = linear_solution();
        let rep = identity_residual_classical(&sol, &prob).unwrap();
        assert!((rep.lhs - 1.0).abs() < 1e-6, "lhs {}", rep.lhs);
        assert!((rep.rhs - 1.0).abs() < 1e-6, "rhs {}", rep.rhs);
    }

    #[test]
    fn peletier_serrin_linear_oracle() {
        let (prob, sol) = linear_solution();
        let rep = identity_residual_peletier_serrin(&sol, &prob).unwrap();
        assert!((rep.lhs - 1.0).abs() < 1e-6, "lhs {}", rep.lhs);
        assert!((rep.rhs - 1.0).abs() < 1e-6, "rhs {}", rep.rhs);
        assert!(rep.relative_residual < 1e-6);
    }

    #[test]
    fn domain_mismatch_detected() {
        let prob = RadialProblem::new(3.0, 2.0, PowerSumNonlinearity::linear(1.0)).unwrap();
        let ctl = SolverControls::default();
        let sol = integrate_ivp(&prob, 1.0, 2.0, &ctl).unwrap();
        assert!(matches!(
            identity_residual_general(&sol, &prob, &TestFunction::monomial(1.0)),
            Err(Error::DomainMismatch(_))
        ));
    }

    #[test]
    fn v_equation_linear_case_second_order() {
        let (prob, sol) = linear_solution();
        let psi = TestFunction::monomial(1.0);
        let r1 = v_equation_residual(&sol, &prob, &psi, 0.5, 0.02).unwrap();
        let r2 = v_equation_residual(&sol, &prob, &psi, 0.5, 0.01).unwrap();
        let ratio = r1.abs() / r2.abs().max(1e-300);
        assert!(ratio > 3.2 && ratio < 4.8, "ratio {ratio} ({r1} -> {r2})");
    }

    #[test]
    fn v_equation_zero_weight_is_zero() {
        let (prob, sol) = linear_solution();
        let psi = TestFunction::Polynomial { coeffs: vec![0.0] };
        let res = v_equation_residual(&sol, &prob, &psi, 0.4, 0.01).unwrap();
        assert_eq!(res, 0.0);
    }

    #[test]
    fn v_equation_guards_stencil() {
        let (prob, sol) = linear_solution();
        let psi = TestFunction::monomial(1.0);
        assert!(v_equation_residual(&sol, &prob, &psi, 0.01, 0.02).is_err());
        assert!(v_equation_residual(&sol, &prob, &psi, 0.99, 0.02).is_err());
    }

    #[test]
    fn eq3_scaling_relation_holds() {
        // t phi_p'(t) = (p-1) phi_p(t) over random (t, p), p in (1, 6]
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x9e3779b9);
        for _ in 0..10_000 {
            let t: f64 = rng.gen_range(-10.0..10.0);
            let p: f64 = rng.gen_range(1.0f64..6.0) + 1e-9;
            let lhs = t * phi_p_prime(t, p);
            let rhs = (p - 1.0) * phi_p(t, p);
            assert!(
                (lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0),
                "t={t} p={p}: {lhs} vs {rhs}"
            );
        }
    }
}
