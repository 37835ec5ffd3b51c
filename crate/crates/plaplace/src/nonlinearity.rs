//! Power-sum nonlinearities f(u) = lambda*u + sum c_i * u|u|^{q_i - 1}.
//!
//! The odd extension u|u|^{q-1} is used for every power term, so f is odd,
//! F is even, and non-integer exponents are allowed. The antiderivative F
//! and the derivative f' are closed-form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// f(u) = lambda*u + sum of c * u|u|^{q-1} over the power terms.
///
/// Invariant: every exponent q > 1, so f is C^1 and f(0) = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSumNonlinearity {
    pub lambda: f64,
    /// (coefficient, exponent) pairs; exponents need not be integers.
    pub terms: Vec<(f64, f64)>,
}

impl PowerSumNonlinearity {
    pub fn new(lambda: f64, terms: Vec<(f64, f64)>) -> Result<Self> {
        let nl = Self { lambda, terms };
        nl.validate()?;
        Ok(nl)
    }

    /// Purely linear f(u) = lambda*u.
    pub fn linear(lambda: f64) -> Self {
        Self { lambda, terms: Vec::new() }
    }

    /// f(u) = lambda*u + u|u|^{q-1}, the single-power form.
    pub fn single_power(lambda: f64, q: f64) -> Self {
        Self { lambda, terms: vec![(1.0, q)] }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.lambda.is_finite() {
            return Err(Error::PreconditionViolation("lambda must be finite".into()));
        }
        for &(c, q) in &self.terms {
            if !c.is_finite() || !q.is_finite() {
                return Err(Error::PreconditionViolation(
                    "nonlinearity coefficients must be finite".into(),
                ));
            }
            if q <= 1.0 {
                return Err(Error::PreconditionViolation(format!(
                    "power exponent q = {q} must exceed 1"
                )));
            }
        }
        Ok(())
    }

    /// f(u) = lambda*u + sum c u|u|^{q-1}.
    pub fn eval_f(&self, u: f64) -> f64 {
        let mut v = self.lambda * u;
        let au = u.abs();
        for &(c, q) in &self.terms {
            v += c * u * au.powf(q - 1.0);
        }
        v
    }

    /// Exact antiderivative F(u) = lambda*u^2/2 + sum c|u|^{q+1}/(q+1), F(0) = 0.
    pub fn eval_big_f(&self, u: f64) -> f64 {
        let mut v = 0.5 * self.lambda * u * u;
        let au = u.abs();
        for &(c, q) in &self.terms {
            v += c * au.powf(q + 1.0) / (q + 1.0);
        }
        v
    }

    /// f'(u) = lambda + sum c q |u|^{q-1}; finite everywhere since q > 1.
    pub fn eval_fprime(&self, u: f64) -> f64 {
        let mut v = self.lambda;
        let au = u.abs();
        for &(c, q) in &self.terms {
            v += c * q * au.powf(q - 1.0);
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn f_examples() {
        let nl = PowerSumNonlinearity::single_power(1.0, 5.0);
        assert_eq!(nl.eval_f(0.0), 0.0);
        assert_eq!(nl.eval_f(2.0), 34.0); // 2 + 2*16
        let nl0 = PowerSumNonlinearity::single_power(0.0, 5.0);
        assert_eq!(nl0.eval_f(-1.0), -1.0);
    }

    #[test]
    fn big_f_examples() {
        let nl = PowerSumNonlinearity::single_power(1.0, 5.0);
        assert_eq!(nl.eval_big_f(0.0), 0.0);
        assert!((nl.eval_big_f(2.0) - (2.0 + 64.0 / 6.0)).abs() < 1e-12);
        let pisq = std::f64::consts::PI * std::f64::consts::PI;
        let lin = PowerSumNonlinearity::linear(pisq);
        assert!((lin.eval_big_f(1.0) - pisq / 2.0).abs() < 1e-15);
    }

    #[test]
    fn fprime_examples() {
        let nl = PowerSumNonlinearity::single_power(1.0, 5.0);
        assert_eq!(nl.eval_fprime(0.0), 1.0);
        assert_eq!(nl.eval_fprime(1.0), 6.0);
        // independent check by central differences, (f(u+h)-f(u-h))/2h
        let nl2 = PowerSumNonlinearity::new(0.0, vec![(2.0, 3.0)]).unwrap();
        let u = -2.0;
        assert_eq!(nl2.eval_fprime(u), 24.0);
        let fd = |h: f64| (nl2.eval_f(u + h) - nl2.eval_f(u - h)) / (2.0 * h);
        let e1 = (fd(1e-3) - 24.0).abs();
        let e2 = (fd(5e-4) - 24.0).abs();
        assert!(e1 / e2 > 3.5 && e1 / e2 < 4.5, "O(h^2): {e1} vs {e2}");
    }

    #[test]
    fn rejects_small_exponent() {
        assert!(PowerSumNonlinearity::new(1.0, vec![(1.0, 1.0)]).is_err());
        assert!(PowerSumNonlinearity::new(1.0, vec![(1.0, 0.5)]).is_err());
        assert!(PowerSumNonlinearity::new(f64::NAN, vec![]).is_err());
    }

    #[test]
    fn fprime_matches_central_differences_second_order() {
        let nl = PowerSumNonlinearity::new(0.7, vec![(1.3, 5.0), (-0.2, 2.5)]).unwrap();
        for &u in &[0.3, 1.0, -1.7, 2.4] {
            let fd = |h: f64| (nl.eval_f(u + h) - nl.eval_f(u - h)) / (2.0 * h);
            let exact = nl.eval_fprime(u);
            let e1 = (fd(1e-3) - exact).abs();
            let e2 = (fd(5e-4) - exact).abs();
            assert!(e2 < e1, "refining h must reduce the error at u = {u}");
            let ratio = e1 / e2.max(1e-14);
            assert!(ratio > 3.0, "Richardson ratio {ratio} too small at u = {u}");
        }
    }

    proptest! {
        #[test]
        fn f_is_odd_and_big_f_is_even(u in -50.0f64..50.0) {
            let nl = PowerSumNonlinearity::new(1.0, vec![(1.0, 5.0), (0.5, 2.0)]).unwrap();
            prop_assert!((nl.eval_f(-u) + nl.eval_f(u)).abs() <= 1e-12 * (1.0 + nl.eval_f(u).abs()));
            prop_assert!((nl.eval_big_f(-u) - nl.eval_big_f(u)).abs()
                <= 1e-12 * (1.0 + nl.eval_big_f(u).abs()));
        }

        #[test]
        fn big_f_prime_is_f(u in -5.0f64..5.0) {
            // Richardson ratio of the central-difference error is ~4 when h halves.
            let nl = PowerSumNonlinearity::new(0.3, vec![(2.0, 4.0)]).unwrap();
            let fd = |h: f64| (nl.eval_big_f(u + h) - nl.eval_big_f(u - h)) / (2.0 * h);
            let f = nl.eval_f(u);
            let e1 = (fd(1e-3) - f).abs();
            let e2 = (fd(5e-4) - f).abs();
            // only assert where the h^2 term is above rounding noise
            if e1 > 1e-10 {
                let ratio = e1 / e2.max(1e-300);
                prop_assert!(ratio > 3.2 && ratio < 4.8, "ratio {}", ratio);
            }
        }
    }
}
