//! Log-log slope fits and gnuplot data for control-norm blow-up plots.

use std::fmt::Write as _;

use crate::error::{BenchError, Result};
use crate::sweep::SweepTable;
use crate::table::format_sci;

/// Least-squares slope of `log(value)` against `log(T)`.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(BenchError::Config(
            "slope fit needs at least two points".into(),
        ));
    }
    if let Some(p) = points
        .iter()
        .find(|(t, v)| !(t.is_finite() && v.is_finite() && *t > 0.0 && *v > 0.0))
    {
        return Err(BenchError::Config(format!(
            "slope fit needs positive coordinates, got {p:?}"
        )));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(BenchError::Config(
            "slope fit needs distinct T values".into(),
        ));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Whitespace-separated columns `T energy unorm T^(-3/2)`.
pub fn loglog_data(table: &SweepTable) -> String {
    let mut out = String::from("# T energy unorm T^(-3/2)\n");
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{} {} {} {}",
            format_sci(r.t_final),
            format_sci(r.energy),
            format_sci(r.unorm),
            format_sci(r.t_final.powf(-1.5))
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::SweepRow;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = (1..6)
            .map(|k| {
                let t = 2f64.powi(-k);
                (t, 3.0 * t.powf(-1.5))
            })
            .collect();
        assert!((fit_loglog_slope(&pts).unwrap() + 1.5).abs() < 1e-12);
    }

    #[test]
    fn constant_values() {
        let pts = [(1.0, 2.0), (2.0, 2.0), (4.0, 2.0)];
        assert!(fit_loglog_slope(&pts).unwrap().abs() < 1e-15);
    }

    #[test]
    fn bad_points() {
        assert!(fit_loglog_slope(&[(1.0, 1.0)]).is_err());
        assert!(fit_loglog_slope(&[(1.0, 1.0), (2.0, 0.0)]).is_err());
        assert!(fit_loglog_slope(&[(1.0, 1.0), (1.0, 2.0)]).is_err());
    }

    #[test]
    fn data_file_columns() {
        let table = SweepTable {
            config: None,
            rows: vec![
                SweepRow {
                    t_final: 0.25,
                    energy: 1e-3,
                    energy_rate: None,
                    unorm: 10.0,
                    unorm_rate: None,
                },
                SweepRow {
                    t_final: 0.125,
                    energy: 2e-3,
                    energy_rate: Some(-1.0),
                    unorm: 30.0,
                    unorm_rate: Some(-1.58),
                },
            ],
        };
        let text = loglog_data(&table);
        let rows: Vec<Vec<f64>> = text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| l.split_whitespace().map(|v| v.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0], vec![0.25, 1e-3, 10.0, 8.0]);
        assert!((rows[1][3] - 0.125f64.powf(-1.5)).abs() < 1e-3);
    }
}
