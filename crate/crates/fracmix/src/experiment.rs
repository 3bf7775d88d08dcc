//! Running configured simulations and spectrum analyses and writing their
//! artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use fracmix_core::decay::{fit_decay, DecayFit};
use fracmix_core::initial::Profile;
use fracmix_core::operators::assemble_generator;
use fracmix_core::spectrum::{
    dominant_eigenvalues, full_spectrum_with_limit, stability_trend, SpectrumReport, TrendSolver,
    TrendTable,
};
use fracmix_core::{Complex64, EnergyRecord, GridSpec, Integrator, OperatorSet};

use crate::config::{ExperimentConfig, SnapshotFormat, SolverKind};
use crate::output::{self, csv_writer, fmt, EnergyWriter};

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub step: usize,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl Snapshot {
    pub fn sum(&self) -> Vec<f64> {
        self.u.iter().zip(&self.v).map(|(a, b)| a + b).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub steps: usize,
    pub initial_energy: EnergyRecord,
    pub final_energy: EnergyRecord,
    pub wall_time: f64,
    pub factorizations: usize,
    pub warnings: Vec<String>,
    pub decay: Option<DecayFit>,
}

/// Everything a simulation produced, in memory and on disk under `dir`.
#[derive(Debug, Clone)]
pub struct Bundle {
    pub dir: PathBuf,
    pub grid: GridSpec,
    pub order: f64,
    pub decay_window: Option<[f64; 2]>,
    pub energy: Vec<EnergyRecord>,
    pub snapshots: Vec<Snapshot>,
    pub summary: Summary,
}

fn time_tag(t: f64) -> String {
    format!("t{t}")
}

/// Runs the configured simulation, writing `energy.csv`, snapshots,
/// `summary.txt` and the effective `config.toml` into `run.output_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Bundle> {
    cfg.validate()?;
    let dir = cfg.run.output_dir.clone();
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let energy_path = dir.join("energy.csv");
    let mut writer = EnergyWriter::create(&energy_path)?;
    fs::write(dir.join("config.toml"), crate::config::emit_config(cfg))
        .with_context(|| format!("writing {}", dir.join("config.toml").display()))?;

    let mut warnings = Vec::new();
    let grid = cfg.grid_spec()?;
    let params = cfg.material_params()?;
    if !params.elasticity_ok() {
        warnings.push("elasticity matrix is not positive definite".to_string());
    }
    let np = cfg.newmark_params()?;
    let modes = cfg.mode_grid()?;
    let start = Instant::now();
    let ops = OperatorSet::new(&params, &grid, &modes, &np)?;
    if !ops.uses_cholesky() {
        warnings.push("step matrix is indefinite; solved with pivoted LU".to_string());
    }
    let mut it = Integrator::new(ops, modes)?;
    let sample = |p| Profile::from(p).sample(&grid);
    let init = &cfg.initial;
    let mut state = it.initialize(
        &sample(init.u0),
        &sample(init.v0),
        &sample(init.u1),
        &sample(init.v1),
    )?;

    let dt = np.dt();
    let steps = ((cfg.run.t_final / dt) - 1e-9).ceil().max(0.0) as usize;
    let mut wanted: Vec<(usize, f64)> = cfg
        .run
        .snapshot_times
        .iter()
        .map(|&t| (((t / dt).round() as usize).min(steps), t))
        .collect();
    wanted.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let snap_dir = dir.join("snapshots");
    if !wanted.is_empty() {
        fs::create_dir_all(&snap_dir)
            .with_context(|| format!("creating {}", snap_dir.display()))?;
    }
    let mut next = 0;
    let mut snapshots = Vec::new();
    let mut energy = Vec::new();
    let variant = cfg.run.energy_variant.into();

    for n in 0..=steps {
        if n > 0 {
            it.step(&mut state)?;
        }
        if n % cfg.run.cadence == 0 || n == steps {
            let rec = it.energy(&state, variant);
            if !rec.total.is_finite() {
                bail!(
                    "energy became non-finite at step {n} (t = {}); the configuration is unstable",
                    state.t
                );
            }
            writer.write(&rec)?;
            energy.push(rec);
        }
        while next < wanted.len() && wanted[next].0 == n {
            let snap = Snapshot {
                t: wanted[next].1,
                step: n,
                u: state.first().to_vec(),
                v: state.second().to_vec(),
            };
            write_snapshot(&snap_dir, &grid, &snap, cfg.run.snapshot_format)?;
            snapshots.push(snap);
            next += 1;
        }
    }
    writer.finish()?;
    let wall_time = start.elapsed().as_secs_f64();

    let decay = match cfg.decay.window {
        Some([a, b]) => {
            let pts: Vec<(f64, f64)> = energy.iter().map(|r| (r.t, r.total)).collect();
            match fit_decay(&pts, (a, b), cfg.material.order) {
                Ok(f) => Some(f),
                Err(e) => {
                    warnings.push(format!("decay fit skipped: {e}"));
                    None
                }
            }
        }
        None => None,
    };
    for w in &warnings {
        log::warn!("{w}");
    }
    let summary = Summary {
        steps,
        initial_energy: energy[0],
        final_energy: *energy.last().expect("at least the initial record"),
        wall_time,
        factorizations: it.operators().factorization_count(),
        warnings,
        decay,
    };
    fs::write(dir.join("summary.txt"), render_summary(&summary))
        .with_context(|| format!("writing {}", dir.join("summary.txt").display()))?;
    Ok(Bundle {
        dir,
        grid,
        order: cfg.material.order,
        decay_window: cfg.decay.window,
        energy,
        snapshots,
        summary,
    })
}

fn write_snapshot(dir: &Path, grid: &GridSpec, s: &Snapshot, format: SnapshotFormat) -> Result<()> {
    let tag = time_tag(s.t);
    if matches!(format, SnapshotFormat::Csv | SnapshotFormat::Both) {
        output::write_field_csv(&dir.join(format!("u_{tag}.csv")), grid, &s.u)?;
        output::write_field_csv(&dir.join(format!("v_{tag}.csv")), grid, &s.v)?;
        output::write_field_csv(&dir.join(format!("sum_{tag}.csv")), grid, &s.sum())?;
    }
    if matches!(format, SnapshotFormat::Binary | SnapshotFormat::Both) {
        output::write_snapshot_binary(&dir.join(format!("state_{tag}.bin")), grid, &[&s.u, &s.v])?;
    }
    Ok(())
}

pub fn render_summary(s: &Summary) -> String {
    let mut out = String::new();
    let e = |r: &EnergyRecord| {
        format!(
            "t = {}, kinetic = {}, elastic = {}, diffusive = {}, total = {}",
            r.t,
            fmt(r.kinetic),
            fmt(r.elastic),
            fmt(r.diffusive),
            fmt(r.total)
        )
    };
    let _ = writeln!(out, "steps = {}", s.steps);
    let _ = writeln!(out, "factorizations = {}", s.factorizations);
    let _ = writeln!(out, "wall_time_s = {:.3}", s.wall_time);
    let _ = writeln!(out, "initial_energy: {}", e(&s.initial_energy));
    let _ = writeln!(out, "final_energy: {}", e(&s.final_energy));
    if let Some(d) = &s.decay {
        let _ = writeln!(
            out,
            "decay_fit: window = [{}, {}], slope = {:.6}, intercept = {:.6}, r2 = {:.6}, points = {}, excluded = {}",
            d.window.0, d.window.1, d.slope, d.intercept, d.r_squared, d.points_used, d.points_excluded
        );
        for r in &d.references {
            let _ = writeln!(
                out,
                "reference_slope {:.6}: rms_residual = {:.6}",
                r.slope, r.rms_residual
            );
        }
    }
    for w in &s.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

/// One eigenvalue with its residual when it came from the Krylov solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen {
    pub value: Complex64,
    pub residual: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SpectrumOutput {
    pub size: usize,
    pub eigenvalues: Vec<Eigen>,
    /// Present for dense solves.
    pub report: Option<SpectrumReport>,
    pub trend: Option<TrendTable>,
}

/// Eigenvalues of the configured generator, written to `spectrum.csv`
/// (`re,im,residual`) and, with `spectrum.mode_counts` set, the trend of the
/// dominant eigenvalue to `trend.csv`.
pub fn run_spectrum(cfg: &ExperimentConfig) -> Result<SpectrumOutput> {
    cfg.validate()?;
    let dir = &cfg.run.output_dir;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let grid = cfg.grid_spec()?;
    let params = cfg.material_params()?;
    let modes = cfg.mode_grid()?;
    let a = assemble_generator(&params, &grid, (!modes.is_empty()).then_some(&modes))?;
    let sc = &cfg.spectrum;
    let (eigenvalues, report): (Vec<Eigen>, Option<SpectrumReport>) = match sc.solver {
        SolverKind::Dense => {
            let r = full_spectrum_with_limit(&a, sc.dense_limit)?;
            let ev = r
                .eigenvalues
                .iter()
                .map(|&value| Eigen {
                    value,
                    residual: None,
                })
                .collect();
            (ev, Some(r))
        }
        SolverKind::Krylov => {
            let r = dominant_eigenvalues(&a, &sc.krylov_options())?;
            if !r.converged {
                log::warn!(
                    "Krylov iteration stopped after {} restarts without converging",
                    r.restarts
                );
            }
            let ev = r
                .eigenpairs
                .iter()
                .map(|p| Eigen {
                    value: p.value,
                    residual: Some(p.residual),
                })
                .collect();
            (ev, None)
        }
    };
    let mut w = csv_writer(&dir.join("spectrum.csv"))?;
    w.write_record(["re", "im", "residual"])?;
    for e in &eigenvalues {
        w.write_record([
            fmt(e.value.re),
            fmt(e.value.im),
            e.residual.map(fmt).unwrap_or_default(),
        ])?;
    }
    w.flush()?;

    let trend = if sc.mode_counts.is_empty() {
        None
    } else {
        let base = fracmix_core::DiffusiveGrid::new(cfg.material.order, 1, cfg.diffusive.spacing)?;
        let solver = match sc.solver {
            SolverKind::Dense => TrendSolver::Dense {
                limit: sc.dense_limit,
            },
            SolverKind::Krylov => TrendSolver::Krylov(sc.krylov_options()),
        };
        let t = stability_trend(&params, &grid, &base, &sc.mode_counts, &solver);
        let mut w = csv_writer(&dir.join("trend.csv"))?;
        w.write_record(["M", "re_dominant", "im_dominant"])?;
        for row in &t.rows {
            match &row.dominant {
                Ok(z) => w.write_record([row.modes.to_string(), fmt(z.re), fmt(z.im)])?,
                Err(e) => {
                    log::warn!("trend row M = {} failed: {e}", row.modes);
                    w.write_record([row.modes.to_string(), String::new(), String::new()])?
                }
            }
        }
        w.flush()?;
        Some(t)
    };
    Ok(SpectrumOutput {
        size: a.nrows(),
        eigenvalues,
        report,
        trend,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ProfileConfig;
    use crate::presets::preset;

    fn small(dir: &Path) -> ExperimentConfig {
        let mut cfg = preset("example1-desk").unwrap();
        cfg.grid.nx = 6;
        cfg.grid.ny = 6;
        cfg.diffusive.modes = 5;
        cfg.run.t_final = 0.5;
        cfg.run.cadence = 10;
        cfg.run.snapshot_times = vec![0.0, 0.25, 0.5];
        cfg.run.snapshot_format = SnapshotFormat::Both;
        cfg.run.output_dir = dir.to_path_buf();
        cfg
    }

    #[test]
    fn artifacts_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let b = run_experiment(&small(dir.path())).unwrap();
        assert_eq!(b.summary.steps, 50);
        assert_eq!(b.energy.len(), 6);
        assert_eq!(b.summary.factorizations, 1);
        assert_eq!(
            b.snapshots.iter().map(|s| s.step).collect::<Vec<_>>(),
            vec![0, 25, 50]
        );
        for f in [
            "energy.csv",
            "summary.txt",
            "config.toml",
            "snapshots/sum_t0.25.csv",
            "snapshots/state_t0.5.bin",
        ] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let back = crate::config::load_config(&dir.path().join("config.toml")).unwrap();
        assert_eq!(back, small(dir.path()));
    }

    #[test]
    fn zero_data_gives_zero_snapshots() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small(dir.path());
        cfg.initial.u0 = ProfileConfig::Zero;
        cfg.initial.v0 = ProfileConfig::Zero;
        let b = run_experiment(&cfg).unwrap();
        assert!(b
            .snapshots
            .iter()
            .all(|s| s.u.iter().chain(&s.v).all(|&x| x == 0.0)));
        assert!(b.energy.iter().all(|r| r.total == 0.0));
    }

    #[test]
    fn unwritable_output_fails_before_computing() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "").unwrap();
        let mut cfg = small(dir.path());
        cfg.run.output_dir = blocker.join("sub");
        assert!(run_experiment(&cfg).is_err());
    }

    #[test]
    fn dense_spectrum_of_reduced_example2() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = preset("example2-desk").unwrap();
        cfg.grid.nx = 4;
        cfg.grid.ny = 4;
        cfg.run.output_dir = dir.path().to_path_buf();
        let s = run_spectrum(&cfg).unwrap();
        assert_eq!(s.size, 2 * 5 * 16);
        assert_eq!(s.eigenvalues.len(), s.size);
        assert!(s.eigenvalues.iter().all(|e| e.value.re < 0.0));
        assert_eq!(s.trend.unwrap().real_part_decreasing(), Some(true));
        let text = fs::read_to_string(dir.path().join("trend.csv")).unwrap();
        assert!(text.starts_with("M,re_dominant,im_dominant\n1,"));
    }
}
