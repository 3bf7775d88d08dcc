//! Experiment harness for `fracmix-core`: configuration files and presets,
//! simulation and spectrum runs with their CSV/binary artifacts, decay fits
//! and plot data.

pub mod config;
pub mod experiment;
pub mod output;
pub mod plot;
pub mod presets;

use fracmix_core::fracdiff::{caputo_exponential_analytic, ScalarDiffusiveState, TestFunction};
use fracmix_core::DiffusiveGrid;

pub use config::{emit_config, load_config, parse_config, ConfigError, ExperimentConfig};
pub use experiment::{run_experiment, run_spectrum, Bundle};
pub use plot::emit_plotdata;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleRow {
    pub t: f64,
    pub diffusive: f64,
    pub analytic: f64,
    pub rel_error: f64,
}

/// Compares the diffusive realization driven by `f'` with the direct
/// evaluation of the weighted fractional derivative at each of `times`.
pub fn oracle_table(
    f: TestFunction,
    order: f64,
    eta: f64,
    grid: DiffusiveGrid,
    dt: f64,
    times: &[f64],
) -> fracmix_core::Result<Vec<OracleRow>> {
    let mut state = ScalarDiffusiveState::new(grid, eta)?;
    let mut sorted = times.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut n = 0usize;
    let mut rows = Vec::with_capacity(sorted.len());
    for t in sorted {
        let target = (t / dt).round() as usize;
        while n < target {
            let (t0, t1) = (n as f64 * dt, (n + 1) as f64 * dt);
            state.step(0.5 * (f.derivative(t0) + f.derivative(t1)), dt);
            n += 1;
        }
        let diffusive = state.output();
        let analytic = caputo_exponential_analytic(f, order, eta, t)?;
        let rel_error = if analytic != 0.0 {
            ((diffusive - analytic) / analytic).abs()
        } else {
            diffusive.abs()
        };
        rows.push(OracleRow {
            t,
            diffusive,
            analytic,
            rel_error,
        });
    }
    Ok(rows)
}
