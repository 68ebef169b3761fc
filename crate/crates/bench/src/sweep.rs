//! One controlled run per horizon `T`, assembled into a rate table.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use plate_nc::fdm::{FdGrid, FdmNorm, FdmScheme};
use plate_nc::fem::{read_mesh, FemScheme, FemSpace};
use plate_nc::{make_time_grid, run_null_control, NullControlScheme, RunReport, StatePair};

use crate::config::{NormChoice, Scheme, SweepConfig};
use crate::error::{BenchError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "T")]
    pub t_final: f64,
    pub energy: f64,
    pub energy_rate: Option<f64>,
    pub unorm: f64,
    pub unorm_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<SweepConfig>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Rows from per-`T` reports; rates are `log2` of consecutive ratios.
    pub fn from_reports(config: Option<SweepConfig>, reports: &[RunReport]) -> Self {
        let rate = |a: f64, b: f64| {
            (a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()).then(|| (a / b).log2())
        };
        let rows = reports
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let prev = k.checked_sub(1).map(|p| &reports[p]);
                SweepRow {
                    t_final: r.t_final,
                    energy: r.terminal_energy,
                    energy_rate: prev.and_then(|p| rate(p.terminal_energy, r.terminal_energy)),
                    unorm: r.control_norm,
                    unorm_rate: prev.and_then(|p| rate(p.control_norm, r.control_norm)),
                }
            })
            .collect();
        Self { config, rows }
    }

    pub fn unorm_rates(&self) -> Vec<Option<f64>> {
        self.rows.iter().skip(1).map(|r| r.unorm_rate).collect()
    }

    pub fn energy_rates(&self) -> Vec<Option<f64>> {
        self.rows.iter().skip(1).map(|r| r.energy_rate).collect()
    }
}

enum BuiltScheme {
    Fdm(FdmScheme),
    Fem(FemScheme),
}

impl BuiltScheme {
    fn as_dyn(&self) -> &dyn NullControlScheme {
        match self {
            BuiltScheme::Fdm(s) => s,
            BuiltScheme::Fem(s) => s,
        }
    }
}

fn build(config: &SweepConfig) -> Result<(BuiltScheme, StatePair)> {
    let (v0, w0) = config.init.functions()?;
    let check = |name: &str, x: &[f64]| {
        if x.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(BenchError::Config(format!(
                "{name} is not finite on the grid"
            )))
        }
    };
    let (scheme, initial) = match config.scheme {
        Scheme::Fdm => {
            let norm = match config.norm {
                NormChoice::Euclidean => FdmNorm::Euclidean,
                NormChoice::GridL2 => FdmNorm::GridL2,
            };
            let s = FdmScheme::new(
                FdGrid::new(config.n, config.side)?,
                config.dt,
                config.rho,
                norm,
            )?;
            let init = StatePair::new(s.sample(&v0), s.sample(&w0))?;
            (BuiltScheme::Fdm(s), init)
        }
        Scheme::Fem => {
            let space = match &config.mesh {
                Some((nodes, elements)) => FemSpace::new(read_mesh(nodes, elements)?)?,
                None => FemSpace::structured(config.n, config.side)?,
            };
            let s = FemScheme::new(space, config.dt, config.rho)?;
            let init = StatePair::new(s.interpolate(&v0), s.interpolate(&w0))?;
            (BuiltScheme::Fem(s), init)
        }
    };
    check("v0", &initial.v)?;
    check("w0", &initial.w)?;
    Ok((scheme, initial))
}

/// Runs every `T` of the configuration; the scheme is factored once and the
/// rows are computed in parallel, in table order.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepTable> {
    config.validate()?;
    let (scheme, initial) = build(config)?;
    let scheme = scheme.as_dyn();
    let reports = config
        .t_list
        .par_iter()
        .map(|&t_final| {
            let steps = plate_nc::types::steps_for(t_final, config.dt)
                .map_err(|e| BenchError::Config(e.to_string()))?;
            let grid = make_time_grid(t_final, steps)?;
            log::info!("{} T = {t_final}: {steps} steps", config.scheme);
            run_null_control(scheme, &grid, &initial)
                .map(|run| run.report)
                .map_err(|source| BenchError::Solver { t_final, source })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable::from_reports(Some(config.clone()), &reports))
}
