use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::parallel::map_slice;
use crate::qcore::channel::ChoiMatrix;
use crate::qcore::io::{matrix_to_json, StateJson};
use crate::qcore::matrix::ComplexMatrix;
use crate::qcore::state::DensityMatrix;
use crate::rdsolve::{
    classical_rd, solve_lagrangian_point, solve_r_eac, ClassicalSource, Flavor, RDPoint, SolverConfig,
};

/// How the curve is sampled.
#[derive(Clone, Debug, PartialEq)]
pub enum CurveMode {
    /// Distortion targets, ascending.
    Grid(Vec<f64>),
    /// Multipliers in bits per unit distortion, descending; each yields the
    /// point where the curve has that slope.
    LambdaSweep(Vec<f64>),
}

impl CurveMode {
    /// `n` equispaced points from `a` to `b` inclusive.
    pub fn linspace(a: f64, b: f64, n: usize) -> Self {
        let pts = match n {
            0 => vec![],
            1 => vec![a],
            _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
        };
        CurveMode::Grid(pts)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveFailure {
    pub index: usize,
    pub value: f64,
    pub error: Error,
}

#[derive(Clone, Debug)]
pub struct RDCurve {
    /// The source; classical sources appear as the diagonal of their pmf.
    pub source: DensityMatrix,
    pub flavor: Flavor,
    /// Sorted by distortion.
    pub points: Vec<RDPoint>,
    /// Grid entries that failed; non-empty means the curve is partial.
    pub failures: Vec<CurveFailure>,
}

/// Slack allowed in the monotonicity and convexity checks, relative to the
/// per-point certified tolerance.
fn shape_slack(config: &SolverConfig) -> f64 {
    4.0 * config.tol + 1e-9
}

impl RDCurve {
    pub fn is_partial(&self) -> bool {
        !self.failures.is_empty()
    }

    /// Checks that rates are non-increasing and convex in the distortion.
    pub fn check_shape(&self, slack: f64) -> Result<()> {
        for w in self.points.windows(2) {
            if w[1].rate > w[0].rate + slack {
                return Err(Error::CurveShape(format!(
                    "rate increases from {} at D = {} to {} at D = {}",
                    w[0].rate, w[0].d, w[1].rate, w[1].d
                )));
            }
        }
        for w in self.points.windows(3) {
            let (a, b, c) = (&w[0], &w[1], &w[2]);
            if c.d <= a.d {
                continue;
            }
            let t = (b.d - a.d) / (c.d - a.d);
            let chord = (1.0 - t) * a.rate + t * c.rate;
            if b.rate > chord + slack {
                return Err(Error::CurveShape(format!("convexity violated at D = {} by {:.3e}", b.d, b.rate - chord)));
            }
        }
        Ok(())
    }

    /// CSV with columns `D,rate_bits,lambda,gap`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("D,rate_bits,lambda,gap\n");
        for p in &self.points {
            out.push_str(&format!("{},{},{},{}\n", format_sig(p.d), format_sig(p.rate), format_sig(p.lambda), format_sig(p.gap)));
        }
        out
    }

    pub fn to_json(&self, include_choi: bool) -> Value {
        let points: Vec<Value> = self
            .points
            .iter()
            .map(|p| {
                let mut v = json!({
                    "D": p.d,
                    "rate_bits": p.rate,
                    "lambda": p.lambda,
                    "gap": p.gap,
                    "achieved_distortion": p.achieved_distortion,
                    "constraint_active": p.constraint_active,
                });
                if include_choi {
                    v["choi"] = json!({
                        "dim_in": p.choi.dim_in(),
                        "dim_out": p.choi.dim_out(),
                        "mat": matrix_to_json(p.choi.matrix()),
                    });
                }
                v
            })
            .collect();
        let failures: Vec<Value> = self
            .failures
            .iter()
            .map(|f| json!({"index": f.index, "value": f.value, "error": f.error.kind(), "message": f.error.to_string()}))
            .collect();
        json!({
            "flavor": self.flavor,
            "source": StateJson::from_state(&self.source),
            "partial": self.is_partial(),
            "points": points,
            "failures": failures,
        })
    }
}

/// `%g`-style formatting with nine significant digits.
pub fn format_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn collect(results: Vec<Result<RDPoint>>, values: &[f64]) -> Result<(Vec<RDPoint>, Vec<CurveFailure>)> {
    let mut points = Vec::new();
    let mut failures = Vec::new();
    for (index, (r, &value)) in results.into_iter().zip(values).enumerate() {
        match r {
            Ok(p) => points.push(p),
            Err(error) => failures.push(CurveFailure { index, value, error }),
        }
    }
    if points.is_empty() {
        if let Some(f) = failures.first() {
            return Err(f.error.clone());
        }
    }
    Ok((points, failures))
}

/// Rate–distortion curve of a quantum source.
///
/// Points are solved independently (concurrently under
/// [`crate::parallel::Execution::Parallel`]) and the shape of the finished
/// curve is verified before it is returned.
pub fn rd_curve(rho: &DensityMatrix, mode: &CurveMode, flavor: Flavor, config: &SolverConfig) -> Result<RDCurve> {
    if flavor == Flavor::Classical {
        return Err(Error::InvalidParameter("classical curves take a classical source".into()));
    }
    let (values, results) = match mode {
        CurveMode::Grid(grid) => {
            if grid.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::InvalidParameter("distortion grid must be sorted".into()));
            }
            (grid.clone(), map_slice(config.execution, grid, |&d| solve_r_eac(rho, d, config)))
        }
        CurveMode::LambdaSweep(lambdas) => {
            if lambdas.windows(2).any(|w| w[1] > w[0]) {
                return Err(Error::InvalidParameter("multiplier schedule must be decreasing".into()));
            }
            (lambdas.clone(), map_slice(config.execution, lambdas, |&l| solve_lagrangian_point(rho, l, config)))
        }
    };
    let (mut points, failures) = collect(results, &values)?;
    if flavor == Flavor::Eaq {
        points = points.into_iter().map(RDPoint::halved).collect();
    }
    points.sort_by(|a, b| a.d.total_cmp(&b.d));
    let curve = RDCurve { source: rho.clone(), flavor, points, failures };
    curve.check_shape(shape_slack(config))?;
    Ok(curve)
}

/// Rate–distortion curve of a classical source on a distortion grid.
pub fn classical_rd_curve(source: &ClassicalSource, grid: &[f64], config: &SolverConfig) -> Result<RDCurve> {
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("distortion grid must be sorted".into()));
    }
    let (nu, nv) = (source.pmf().len(), source.reproduction_size());
    let results = map_slice(config.execution, grid, |&d| {
        let p = classical_rd(source, d, config)?;
        // The test channel q(û|u) as a diagonal Choi matrix.
        let mut diag = vec![0.0; nu * nv];
        for u in 0..nu {
            for v in 0..nv {
                diag[u * nv + v] = p.conditional[u][v];
            }
        }
        let choi = ChoiMatrix::from_matrix_unchecked(nu, nv, ComplexMatrix::from_real_diag(&diag));
        Ok(RDPoint {
            d,
            rate: p.rate,
            lambda: p.lambda,
            choi,
            gap: p.gap,
            achieved_distortion: p.achieved_distortion,
            constraint_active: (p.achieved_distortion - d).abs() <= 1e-6,
        })
    });
    let (points, failures) = collect(results, grid)?;
    let src = DensityMatrix::from_matrix_unchecked(ComplexMatrix::from_real_diag(source.pmf()));
    let curve = RDCurve { source: src, flavor: Flavor::Classical, points, failures };
    curve.check_shape(shape_slack(config))?;
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(2.0), "2");
        assert_eq!(format_sig(0.75), "0.75");
        assert_eq!(format_sig(0.531004406), "0.531004406");
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333");
        assert_eq!(format_sig(1.5e-7), "1.5e-07");
        assert_eq!(format_sig(123456789012.0), "1.23456789e+11");
        assert_eq!(format_sig(f64::INFINITY), "inf");
        assert_eq!(format_sig(-0.05), "-0.05");
    }

    #[test]
    fn maximally_mixed_endpoints_and_halving() {
        let rho = DensityMatrix::maximally_mixed(2);
        let cfg = SolverConfig::default();
        let eac = rd_curve(&rho, &CurveMode::Grid(vec![0.0, 0.75]), Flavor::Eac, &cfg).unwrap();
        assert!((eac.points[0].rate - 2.0).abs() < 1e-9);
        assert_eq!(eac.points[1].rate, 0.0);
        let eaq = rd_curve(&rho, &CurveMode::Grid(vec![0.0, 0.75]), Flavor::Eaq, &cfg).unwrap();
        assert_eq!(eaq.points[0].rate, eac.points[0].rate / 2.0);
        let csv = eaq.to_csv();
        assert!(csv.starts_with("D,rate_bits,lambda,gap\n0,1,inf,0\n0.75,0,0,0\n"), "{csv}");
    }

    #[test]
    fn lambda_sweep_traces_the_same_curve() {
        let rho = DensityMatrix::diagonal(&[0.8, 0.2]).unwrap();
        let cfg = SolverConfig::default();
        let sweep = rd_curve(&rho, &CurveMode::LambdaSweep(vec![8.0, 4.0, 2.0]), Flavor::Eac, &cfg).unwrap();
        for p in &sweep.points {
            let direct = solve_r_eac(&rho, p.d, &cfg).unwrap();
            assert!((direct.rate - p.rate).abs() < 1e-5, "{} vs {}", direct.rate, p.rate);
        }
    }

    #[test]
    fn unsorted_grid_rejected() {
        let rho = DensityMatrix::maximally_mixed(2);
        let r = rd_curve(&rho, &CurveMode::Grid(vec![0.5, 0.1]), Flavor::Eac, &SolverConfig::default());
        assert!(matches!(r, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn classical_curve_shape() {
        let src = ClassicalSource::hamming(vec![0.5, 0.5]).unwrap();
        let grid: Vec<f64> = (0..11).map(|k| 0.05 * k as f64).collect();
        let c = classical_rd_curve(&src, &grid, &SolverConfig::default()).unwrap();
        assert_eq!(c.points.len(), 11);
        assert!((c.points[2].rate - 0.531004).abs() < 1e-5);
    }
}
