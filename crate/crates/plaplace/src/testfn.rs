//! Test functions psi(r) with analytic derivatives up to third order.
//!
//! The identity machinery only ever needs psi on (0, 1]; the r log r
//! variant takes its limit value 0 at the origin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A weight function with exact derivatives, used by the identity engine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TestFunction {
    /// psi = r^k for a real exponent k.
    Monomial { k: f64 },
    /// psi = sin(omega * r).
    SineScaled { omega: f64 },
    /// psi = r ln r, with psi(0) = 0 by limit.
    RLogR,
    /// psi = sum of coeffs[i] * r^i.
    Polynomial { coeffs: Vec<f64> },
}

impl TestFunction {
    pub fn monomial(k: f64) -> Self {
        TestFunction::Monomial { k }
    }

    pub fn sine_scaled(omega: f64) -> Self {
        TestFunction::SineScaled { omega }
    }

    pub fn psi(&self, r: f64) -> f64 {
        match self {
            TestFunction::Monomial { k } => r.powf(*k),
            TestFunction::SineScaled { omega } => (omega * r).sin(),
            TestFunction::RLogR => {
                if r > 0.0 {
                    r * r.ln()
                } else {
                    0.0
                }
            }
            TestFunction::Polynomial { coeffs } => horner(coeffs, r),
        }
    }

    pub fn dpsi(&self, r: f64) -> f64 {
        match self {
            TestFunction::Monomial { k } => k * r.powf(k - 1.0),
            TestFunction::SineScaled { omega } => omega * (omega * r).cos(),
            TestFunction::RLogR => r.ln() + 1.0,
            TestFunction::Polynomial { coeffs } => horner(&derive(coeffs), r),
        }
    }

    pub fn d2psi(&self, r: f64) -> f64 {
        match self {
            TestFunction::Monomial { k } => k * (k - 1.0) * r.powf(k - 2.0),
            TestFunction::SineScaled { omega } => -omega * omega * (omega * r).sin(),
            TestFunction::RLogR => 1.0 / r,
            TestFunction::Polynomial { coeffs } => horner(&derive(&derive(coeffs)), r),
        }
    }

    pub fn d3psi(&self, r: f64) -> f64 {
        match self {
            TestFunction::Monomial { k } => k * (k - 1.0) * (k - 2.0) * r.powf(k - 3.0),
            TestFunction::SineScaled { omega } => -omega.powi(3) * (omega * r).cos(),
            TestFunction::RLogR => -1.0 / (r * r),
            TestFunction::Polynomial { coeffs } => horner(&derive(&derive(&derive(coeffs))), r),
        }
    }

    /// psi'''(r) * r^2, continued to r = 0 by its limit.
    ///
    /// Needed by the simplified n = 3 identity, whose integrand carries
    /// exactly this combination; it stays bounded for r log r even though
    /// psi''' alone does not.
    pub fn d3psi_times_r2(&self, r: f64) -> f64 {
        if r > 0.0 {
            return self.d3psi(r) * r * r;
        }
        match self {
            TestFunction::RLogR => -1.0,
            TestFunction::Monomial { k } => {
                // k(k-1)(k-2) r^{k-1} -> 0 for k >= 1, diverges below
                if *k >= 1.0 {
                    0.0
                } else {
                    f64::NAN
                }
            }
            _ => 0.0,
        }
    }

    /// Parses a psi description string.
    ///
    /// Accepted forms: `r`, `r^K`, `sin:OMEGA`, `rlogr`, `poly:C0,C1,...`.
    pub fn parse(spec: &str) -> Result<Self> {
        let s = spec.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty test-function spec".into()));
        }
        if s == "r" {
            return Ok(TestFunction::Monomial { k: 1.0 });
        }
        if s.eq_ignore_ascii_case("rlogr") {
            return Ok(TestFunction::RLogR);
        }
        if let Some(rest) = s.strip_prefix("r^") {
            let k: f64 = rest
                .parse()
                .map_err(|_| Error::Parse(format!("bad monomial exponent {rest:?}")))?;
            if !k.is_finite() {
                return Err(Error::Parse("monomial exponent must be finite".into()));
            }
            return Ok(TestFunction::Monomial { k });
        }
        if let Some(rest) = s.strip_prefix("sin:") {
            let omega: f64 = rest
                .parse()
                .map_err(|_| Error::Parse(format!("bad sine frequency {rest:?}")))?;
            if !omega.is_finite() {
                return Err(Error::Parse("sine frequency must be finite".into()));
            }
            return Ok(TestFunction::SineScaled { omega });
        }
        if let Some(rest) = s.strip_prefix("poly:") {
            let coeffs: std::result::Result<Vec<f64>, _> =
                rest.split(',').map(|t| t.trim().parse::<f64>()).collect();
            let coeffs =
                coeffs.map_err(|_| Error::Parse(format!("bad polynomial coefficients {rest:?}")))?;
            if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::Parse("polynomial needs finite coefficients".into()));
            }
            return Ok(TestFunction::Polynomial { coeffs });
        }
        Err(Error::Parse(format!(
            "unknown test function {s:?}; expected r, r^K, sin:OMEGA, rlogr, or poly:C0,C1,..."
        )))
    }

    /// Short display name used in report tables.
    pub fn label(&self) -> String {
        match self {
            TestFunction::Monomial { k } if (*k - 1.0).abs() < 1e-14 => "r".to_string(),
            TestFunction::Monomial { k } => format!("r^{k}"),
            TestFunction::SineScaled { omega } => format!("sin({omega:.6}r)"),
            TestFunction::RLogR => "r*ln(r)".to_string(),
            TestFunction::Polynomial { coeffs } => format!("poly{coeffs:?}"),
        }
    }
}

fn horner(coeffs: &[f64], r: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * r + c)
}

fn derive(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * i as f64)
        .collect()
}
