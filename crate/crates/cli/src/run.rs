//! Turns a validated experiment config into sweep plans, runs them,
//! and assembles the CSV: one run for a plain sweep, one run per
//! variant joined wide, or a chain of single-point energy runs for
//! ratio sweeps.

use thiserror::Error;
use wigner_core::phasetime::{run_sweep, set_parameter, Grid, SweepPlan, SweepTable};
use wigner_core::Error as EngineError;

use crate::config::{ConfigError, ExperimentConfig, SweptTarget, resolve_path};
use crate::csv::{assemble, CsvTable};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Engine(#[from] EngineError),
}

type Result<T> = std::result::Result<T, RunError>;

/// Runs the experiment and returns its CSV table.
pub fn execute(cfg: &ExperimentConfig) -> Result<CsvTable> {
    let tokens: Vec<String> = cfg.observables.iter().map(|o| o.token.clone()).collect();
    let observables: Vec<_> = cfg.observables.iter().map(|o| o.observable).collect();
    let grid = Grid {
        start: cfg.sweep.start,
        stop: cfg.sweep.stop,
        step: cfg.sweep.step,
    };

    let (runs, parameter_values) = match resolve_path(&cfg.sweep.path, &cfg.system)? {
        SweptTarget::EnergyRatio => ratio_runs(cfg, &observables, grid)?,
        target => {
            let swept = match target {
                SweptTarget::Energy => "energy".to_string(),
                SweptTarget::Param(canonical) => canonical,
                SweptTarget::EnergyRatio => unreachable!("matched above"),
            };
            plain_runs(cfg, &observables, grid, swept)?
        }
    };
    Ok(assemble(&cfg.sweep.path, &parameter_values, &tokens, &runs))
}

type Runs = Vec<(Option<String>, SweepTable)>;

/// One sweep per variant (or a single untagged sweep), all over the
/// same grid.
fn plain_runs(
    cfg: &ExperimentConfig,
    observables: &[wigner_core::phasetime::Observable],
    grid: Grid,
    swept: String,
) -> Result<(Runs, Vec<f64>)> {
    let variant_values: Vec<Option<&str>> = match &cfg.sweep.variant_path {
        None => vec![None],
        Some(_) => cfg.sweep.variants.iter().map(|v| Some(v.as_str())).collect(),
    };
    let mut runs = Runs::new();
    for literal in variant_values {
        let mut system = cfg.system.clone();
        let mut energy = cfg.energy;
        let suffix = match (literal, &cfg.sweep.variant_path) {
            (Some(literal), Some(vpath)) => {
                let value: f64 = literal.parse().map_err(|_| {
                    ConfigError::Parse(format!("variant `{literal}` is not a number"))
                })?;
                match resolve_path(vpath, &cfg.system).map_err(RunError::Config)? {
                    SweptTarget::Energy => energy = value,
                    SweptTarget::Param(canonical) => {
                        set_parameter(&mut system, &canonical, value)?
                    }
                    SweptTarget::EnergyRatio => {
                        return Err(ConfigError::Parse(
                            "`E_over_V` cannot be a variant path".into(),
                        )
                        .into())
                    }
                }
                Some(format!("{vpath}={literal}"))
            }
            _ => None,
        };
        let plan = SweepPlan {
            system,
            swept: swept.clone(),
            grid,
            observables: observables.to_vec(),
            energy,
        };
        runs.push((suffix, run_sweep(&plan)?));
    }
    let parameter_values = runs[0].1.rows.iter().map(|row| row.parameter).collect();
    Ok((runs, parameter_values))
}

/// A ratio sweep: each grid point is the ratio of incident energy to
/// the (shared) barrier height, evaluated as a one-point energy sweep
/// so that per-row error markers survive.
fn ratio_runs(
    cfg: &ExperimentConfig,
    observables: &[wigner_core::phasetime::Observable],
    grid: Grid,
) -> Result<(Runs, Vec<f64>)> {
    let height = match &cfg.system {
        wigner_core::phasetime::SystemSpec::Ring(ring) => ring.barrier1.v_re,
        _ => unreachable!("ratio sweeps resolve only on two-lead rings"),
    };
    let ratios = grid.points()?;
    let mut rows = Vec::with_capacity(ratios.len());
    let mut columns = Vec::new();
    let mut parameter_name = String::from("energy");
    for &ratio in &ratios {
        let energy = ratio * height;
        let plan = SweepPlan {
            system: cfg.system.clone(),
            swept: "energy".to_string(),
            grid: Grid {
                start: energy,
                stop: energy,
                step: 1.0,
            },
            observables: observables.to_vec(),
            energy: cfg.energy,
        };
        let table = run_sweep(&plan)?;
        columns = table.columns;
        parameter_name = table.parameter_name;
        // With no observables requested each sub-run is header-only, and
        // so is the joined table.
        rows.extend(table.rows);
    }
    let parameter_values: Vec<f64> = ratios[..rows.len()].to_vec();
    let stitched = SweepTable {
        parameter_name,
        columns,
        rows,
    };
    Ok((vec![(None, stitched)], parameter_values))
}
