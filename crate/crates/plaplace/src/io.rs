//! File formats: solution CSV/JSON, nonlinearity JSON, curve CSV.
//!
//! Writers emit full double precision (17 significant digits) and a fixed
//! column order, so identical inputs produce byte-identical files. Parsers
//! are strict: they validate shape, finiteness, and grid monotonicity and
//! never panic on malformed input.

use serde::{Deserialize, Serialize};

use crate::curve::CurvePoint;
use crate::error::{Error, Result};
use crate::nonlinearity::PowerSumNonlinearity;
use crate::solver::{RadialSolution, SolverControls};

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

const SOLUTION_HEADER: &str = "r,u,uprime";
const CURVE_HEADER: &str = "a,rho0,lambda,u0";

/// Writes the `r,u,uprime` sample table.
pub fn write_solution_csv(sol: &RadialSolution) -> String {
    let mut out = String::with_capacity(64 * sol.grid.len());
    out.push_str(SOLUTION_HEADER);
    out.push('\n');
    for i in 0..sol.grid.len() {
        out.push_str(&fmt(sol.grid[i]));
        out.push(',');
        out.push_str(&fmt(sol.u[i]));
        out.push(',');
        out.push_str(&fmt(sol.uprime[i]));
        out.push('\n');
    }
    out
}

/// Parses a solution CSV produced by `write_solution_csv` (or compatible).
///
/// Requires the exact header, three finite fields per row, a strictly
/// increasing grid starting at 0, and at least two rows. alpha and the
/// boundary defect are reconstructed from the samples.
pub fn parse_solution_csv(text: &str) -> Result<RadialSolution> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end_matches('\r') == SOLUTION_HEADER => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header {SOLUTION_HEADER:?}, found {other:?}"
            )))
        }
    }
    let mut grid = Vec::new();
    let mut u = Vec::new();
    let mut uprime = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let mut take = |name: &str| -> Result<f64> {
            let raw = fields
                .next()
                .ok_or_else(|| Error::Parse(format!("row {}: missing {name}", lineno + 2)))?;
            let v: f64 = raw
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: bad {name} {raw:?}", lineno + 2)))?;
            if !v.is_finite() {
                return Err(Error::Parse(format!("row {}: non-finite {name}", lineno + 2)));
            }
            Ok(v)
        };
        let r = take("r")?;
        let uu = take("u")?;
        let up = take("uprime")?;
        if fields.next().is_some() {
            return Err(Error::Parse(format!("row {}: too many fields", lineno + 2)));
        }
        grid.push(r);
        u.push(uu);
        uprime.push(up);
    }
    validate_samples(&grid, &u, &uprime)?;
    let alpha = u[0];
    let boundary_defect = u.last().unwrap().abs();
    Ok(RadialSolution { grid, u, uprime, alpha, boundary_defect })
}

fn validate_samples(grid: &[f64], u: &[f64], uprime: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::Parse("solution needs at least two samples".into()));
    }
    if grid.len() != u.len() || grid.len() != uprime.len() {
        return Err(Error::Parse("grid, u, uprime must have equal lengths".into()));
    }
    if grid[0] != 0.0 {
        return Err(Error::Parse(format!("grid must start at 0, found {}", grid[0])));
    }
    for w in grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Parse(format!(
                "grid must be strictly increasing; {} after {}",
                w[1], w[0]
            )));
        }
    }
    if grid.iter().chain(u).chain(uprime).any(|v| !v.is_finite()) {
        return Err(Error::Parse("samples must be finite".into()));
    }
    Ok(())
}

/// Solution plus the controls that produced it, as stored in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub alpha: f64,
    pub boundary_defect: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub controls: Option<SolverControls>,
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub uprime: Vec<f64>,
}

pub fn write_solution_json(sol: &RadialSolution, controls: Option<&SolverControls>) -> String {
    let record = SolutionRecord {
        alpha: sol.alpha,
        boundary_defect: sol.boundary_defect,
        controls: controls.cloned(),
        grid: sol.grid.clone(),
        u: sol.u.clone(),
        uprime: sol.uprime.clone(),
    };
    serde_json::to_string_pretty(&record).expect("solution record serializes")
}

pub fn parse_solution_json(bytes: &[u8]) -> Result<(RadialSolution, Option<SolverControls>)> {
    let record: SolutionRecord =
        serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))?;
    validate_samples(&record.grid, &record.u, &record.uprime)?;
    if !record.alpha.is_finite() || !record.boundary_defect.is_finite() {
        return Err(Error::Parse("alpha and boundary_defect must be finite".into()));
    }
    let sol = RadialSolution {
        grid: record.grid,
        u: record.u,
        uprime: record.uprime,
        alpha: record.alpha,
        boundary_defect: record.boundary_defect,
    };
    Ok((sol, record.controls))
}

/// Nonlinearity spec: {"lambda": <real>, "terms": [[c, q], ...]}.
pub fn parse_nonlinearity_json(bytes: &[u8]) -> Result<PowerSumNonlinearity> {
    let nl: PowerSumNonlinearity =
        serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))?;
    nl.validate()?;
    Ok(nl)
}

pub fn write_nonlinearity_json(nl: &PowerSumNonlinearity) -> String {
    serde_json::to_string(nl).expect("nonlinearity serializes")
}

/// Curve table `a,rho0,lambda,u0`, one row per traced amplitude.
pub fn write_curve_csv(curve: &[CurvePoint]) -> String {
    let mut out = String::with_capacity(80 * curve.len());
    out.push_str(CURVE_HEADER);
    out.push('\n');
    for pt in curve {
        out.push_str(&fmt(pt.amplitude_a));
        out.push(',');
        out.push_str(&fmt(pt.rho0));
        out.push(',');
        out.push_str(&fmt(pt.lambda));
        out.push(',');
        out.push_str(&fmt(pt.u0));
        out.push('\n');
    }
    out
}

/// Two-column `lambda u0` data, ready for `plot "file" with lines`.
pub fn write_curve_gnuplot(curve: &[CurvePoint]) -> String {
    let mut out = String::with_capacity(48 * curve.len());
    out.push_str("# lambda u0\n");
    for pt in curve {
        out.push_str(&fmt(pt.lambda));
        out.push(' ');
        out.push_str(&fmt(pt.u0));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_solution() -> RadialSolution {
        RadialSolution {
            grid: vec![0.0, 0.5, 1.0],
            u: vec![1.0, 0.6, -1e-11],
            uprime: vec![0.0, -0.9, -1.2],
            alpha: 1.0,
            boundary_defect: 1e-11,
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let sol = sample_solution();
        let text = write_solution_csv(&sol);
        let back = parse_solution_csv(&text).unwrap();
        assert_eq!(back.grid, sol.grid);
        assert_eq!(back.u, sol.u);
        assert_eq!(back.uprime, sol.uprime);
        assert_eq!(back.alpha, sol.alpha);
    }

    #[test]
    fn csv_rejects_malformed_inputs() {
        assert!(parse_solution_csv("").is_err());
        assert!(parse_solution_csv("x,y,z\n0,1,0\n").is_err());
        assert!(parse_solution_csv("r,u,uprime\n0,1\n").is_err());
        assert!(parse_solution_csv("r,u,uprime\n0,1,0,9\n").is_err());
        assert!(parse_solution_csv("r,u,uprime\n0,nan,0\n1,0,0\n").is_err());
        assert!(parse_solution_csv("r,u,uprime\n0.5,1,0\n1,0,0\n").is_err(), "grid must start at 0");
        assert!(parse_solution_csv("r,u,uprime\n0,1,0\n0,0,0\n").is_err(), "grid must increase");
    }

    #[test]
    fn json_round_trip_with_controls() {
        let sol = sample_solution();
        let ctl = SolverControls::default();
        let text = write_solution_json(&sol, Some(&ctl));
        let (back, back_ctl) = parse_solution_json(text.as_bytes()).unwrap();
        assert_eq!(back, sol);
        assert_eq!(back_ctl, Some(ctl));
    }

    #[test]
    fn nonlinearity_json_round_trip_and_validation() {
        let nl = PowerSumNonlinearity::new(9.8696, vec![(1.0, 5.0), (0.25, 2.0)]).unwrap();
        let text = write_nonlinearity_json(&nl);
        assert_eq!(parse_nonlinearity_json(text.as_bytes()).unwrap(), nl);
        assert!(parse_nonlinearity_json(br#"{"lambda":1.0,"terms":[[1.0,0.5]]}"#).is_err());
        assert!(parse_nonlinearity_json(b"{").is_err());
    }

    #[test]
    fn curve_outputs_have_expected_shape() {
        let pts = vec![CurvePoint { amplitude_a: 1.0, rho0: 3.0, lambda: 9.0, u0: 1.7 }];
        let csv = write_curve_csv(&pts);
        assert!(csv.starts_with("a,rho0,lambda,u0\n"));
        assert_eq!(csv.lines().count(), 2);
        let gp = write_curve_gnuplot(&pts);
        assert!(gp.starts_with("# lambda u0\n"));
        assert_eq!(gp.lines().nth(1).unwrap().split(' ').count(), 2);
    }

    proptest! {
        #[test]
        fn csv_round_trip_preserves_samples(
            n in 2usize..40,
            seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut grid = vec![0.0f64];
            for i in 1..n {
                grid.push(grid[i - 1] + rng.gen_range(1e-6..1.0));
            }
            let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1e6..1e6)).collect();
            let uprime: Vec<f64> = (0..n).map(|_| rng.gen_range(-1e6..1e6)).collect();
            let sol = RadialSolution {
                alpha: u[0],
                boundary_defect: u[n - 1].abs(),
                grid, u, uprime,
            };
            let back = parse_solution_csv(&write_solution_csv(&sol)).unwrap();
            prop_assert_eq!(back, sol);
        }

        #[test]
        fn parser_never_panics(text in "\\PC*") {
            let _ = parse_solution_csv(&text);
            let _ = parse_nonlinearity_json(text.as_bytes());
            let _ = parse_solution_json(text.as_bytes());
            let _ = crate::testfn::TestFunction::parse(&text);
        }
    }
}
