//! Composite Simpson quadrature on uniform grids.

use crate::error::{Error, Result};

/// Composite Simpson rule over an odd number of uniformly spaced samples.
///
/// `h` is the spacing between consecutive samples; the error is O(h^4) for
/// C^4 integrands and the rule is exact on cubics.
pub fn simpson(values: &[f64], h: f64) -> Result<f64> {
    let n = values.len();
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::BadGrid(format!(
            "composite Simpson needs an odd sample count >= 3, got {n}"
        )));
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::BadGrid(format!("spacing must be positive and finite, got {h}")));
    }
    let mut odd = 0.0;
    let mut even = 0.0;
    for (i, &v) in values.iter().enumerate().skip(1).take(n - 2) {
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    Ok(h / 3.0 * (values[0] + values[n - 1] + 4.0 * odd + 2.0 * even))
}

/// Simpson rule with an explicit grid; rejects non-uniform spacing.
pub fn simpson_over_grid(grid: &[f64], values: &[f64]) -> Result<f64> {
    if grid.len() != values.len() {
        return Err(Error::BadGrid(format!(
            "grid length {} != values length {}",
            grid.len(),
            values.len()
        )));
    }
    let h = uniform_spacing(grid)?;
    simpson(values, h)
}

/// Returns the spacing of a uniform grid, or BadGrid if spacing drifts by
/// more than ~1e-9 of the span.
pub fn uniform_spacing(grid: &[f64]) -> Result<f64> {
    if grid.len() < 2 {
        return Err(Error::BadGrid("grid needs at least 2 points".into()));
    }
    let span = grid[grid.len() - 1] - grid[0];
    if !(span > 0.0) {
        return Err(Error::BadGrid("grid must be increasing".into()));
    }
    let h = span / (grid.len() - 1) as f64;
    let tol = 1e-9 * span.max(1.0);
    for w in grid.windows(2) {
        if ((w[1] - w[0]) - h).abs() > tol {
            return Err(Error::BadGrid(format!(
                "non-uniform spacing: expected {h:.6e}, found {:.6e}",
                w[1] - w[0]
            )));
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn constant_integrates_to_one() {
        let g = grid(2049);
        let v = vec![1.0; g.len()];
        assert!((simpson_over_grid(&g, &v).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sin_squared_is_half() {
        let g = grid(2049);
        let v: Vec<f64> = g.iter().map(|&r| (PI * r).sin().powi(2)).collect();
        assert!((simpson_over_grid(&g, &v).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exact_on_cubics() {
        let g = grid(5);
        let v: Vec<f64> = g.iter().map(|&r| r * r * r).collect();
        assert!((simpson_over_grid(&g, &v).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_even_count_and_nonuniform() {
        assert!(matches!(simpson(&[1.0, 1.0], 0.5), Err(Error::BadGrid(_))));
        assert!(matches!(simpson(&[1.0; 4], 0.1), Err(Error::BadGrid(_))));
        let g = [0.0, 0.3, 1.0];
        assert!(matches!(simpson_over_grid(&g, &[1.0; 3]), Err(Error::BadGrid(_))));
    }

    #[test]
    fn fourth_order_convergence() {
        // integral of e^r over [0,1]
        let exact = std::f64::consts::E - 1.0;
        let err = |n: usize| {
            let g = grid(n);
            let v: Vec<f64> = g.iter().map(|&r| r.exp()).collect();
            (simpson_over_grid(&g, &v).unwrap() - exact).abs()
        };
        let ratio = err(65) / err(129);
        assert!(ratio > 12.0 && ratio < 20.0, "expected ~16, got {ratio}");
    }
}
