//! Numerical laboratory for radial p-Laplace boundary-value problems on the
//! unit ball:
//!
//! - shooting solver for phi_p(u')' + (n-1)/r phi_p(u') + f(u) = 0 with
//!   u'(0) = u(radius) = 0, integrated from the singular origin by a series
//!   handoff and an embedded 5(4) Runge-Kutta pair;
//! - the generalized Pohozhaev identity and its classical, n = 3, and
//!   energy-only specializations, evaluated as quadrature residuals;
//! - non-existence certificates from the sine test-function family, with an
//!   empirical shooting sweep as a cross-check;
//! - solution curves in the (lambda, u(0)) plane by shoot-and-scale, with
//!   turning-point location.

// `!(x > 0.0)` is the NaN-rejecting form wanted in parameter checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificate;
pub mod curve;
pub mod error;
pub mod identity;
pub mod io;
pub mod nonlinearity;
mod ode;
pub mod quadrature;
pub mod solver;
pub mod testfn;

pub use certificate::{
    certify_nonexistence, empirical_shooting_sweep, gamma_of_p, theta_inequality_margin,
    CertificateReport, SweepReport,
};
pub use curve::{
    curve_point_solution, find_turning_points, scaling_exponent, trace_curve, CurvePoint,
};
pub use error::{Error, Result};
pub use identity::{
    identity_residual_classical, identity_residual_general, identity_residual_n3,
    identity_residual_peletier_serrin, l_operator, v_equation_residual, IdentityReport,
};
pub use nonlinearity::PowerSumNonlinearity;
pub use solver::{
    first_zero, integrate_ivp, phi_p, phi_p_inv, phi_p_prime, shoot_bvp, RadialProblem,
    RadialSolution, SolverControls,
};
pub use testfn::TestFunction;
