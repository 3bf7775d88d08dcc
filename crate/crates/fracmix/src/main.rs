use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fracmix::config::SolverKind;
use fracmix::output::{fmt, read_energy_csv};
use fracmix::{
    emit_config, emit_plotdata, load_config, oracle_table, presets, run_experiment, run_spectrum,
};
use fracmix_core::decay::fit_decay;
use fracmix_core::fracdiff::TestFunction;
use fracmix_core::DiffusiveGrid;

#[derive(Parser)]
#[command(version, about = "Mixture wave simulations with fractional damping")]
struct Cli {
    /// Accept unknown configuration keys with a warning.
    #[arg(long, global = true)]
    lenient: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation and write energy, snapshots, summary and plot data.
    Simulate {
        config: PathBuf,
        /// Override run.output_dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenvalues of the generator matrix.
    Spectrum {
        config: PathBuf,
        #[command(flatten)]
        solver: SolverFlags,
        /// Number of eigenvalues for the Krylov solver.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Least-squares log-log slope of an energy CSV.
    DecayFit {
        energy: PathBuf,
        /// `t_min,t_max`
        #[arg(long, value_parser = parse_window)]
        window: (f64, f64),
        /// Fractional order, for the reference slope -1/(1 - alpha).
        #[arg(long)]
        alpha: f64,
    },
    /// Diffusive realization versus the direct fractional derivative.
    Oracle {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        eta: f64,
        #[arg(long, value_enum)]
        f: FunctionArg,
        #[arg(long, default_value_t = 4000)]
        modes: usize,
        #[arg(long, default_value_t = 0.05)]
        spacing: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Comma-separated output times.
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75,1")]
        times: Vec<f64>,
    },
    /// Print or write a built-in preset as a configuration file.
    Preset {
        name: String,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(multiple = false)]
struct SolverFlags {
    #[arg(long)]
    dense: bool,
    #[arg(long)]
    krylov: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FunctionArg {
    Identity,
    Quadratic,
    Exponential,
}

impl From<FunctionArg> for TestFunction {
    fn from(f: FunctionArg) -> Self {
        match f {
            FunctionArg::Identity => TestFunction::Identity,
            FunctionArg::Quadratic => TestFunction::Quadratic,
            FunctionArg::Exponential => TestFunction::Exponential,
        }
    }
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected `t_min,t_max`")?;
    let p = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
    Ok((p(a)?, p(b)?))
}

fn load(path: &PathBuf, lenient: bool) -> Result<fracmix::ExperimentConfig> {
    if lenient {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(fracmix::parse_config(&text, false)?)
    } else {
        Ok(load_config(path)?)
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate { config, out } => {
            let mut cfg = load(&config, cli.lenient)?;
            if let Some(out) = out {
                cfg.run.output_dir = out;
            }
            let bundle = run_experiment(&cfg)?;
            emit_plotdata(&bundle, None)?;
            print!("{}", fracmix::experiment::render_summary(&bundle.summary));
            println!("output: {}", bundle.dir.display());
        }
        Command::Spectrum {
            config,
            solver,
            k,
            seed,
            out,
        } => {
            let mut cfg = load(&config, cli.lenient)?;
            if solver.dense {
                cfg.spectrum.solver = SolverKind::Dense;
            }
            if solver.krylov {
                cfg.spectrum.solver = SolverKind::Krylov;
            }
            if let Some(k) = k {
                cfg.spectrum.k = k;
            }
            if let Some(seed) = seed {
                cfg.spectrum.seed = seed;
            }
            if let Some(out) = out {
                cfg.run.output_dir = out;
            }
            let s = run_spectrum(&cfg)?;
            let values: Vec<_> = s.eigenvalues.iter().map(|e| e.value).collect();
            fracmix::plot::emit_scatter(&cfg.run.output_dir.join("plots"), &values)?;
            println!("size = {}", s.size);
            if let Some(r) = &s.report {
                println!("max_real_part = {}", fmt(r.max_real_part));
                println!("stability = {:?}", r.stability());
                println!(
                    "on_imaginary_axis = {} (tolerance {:.3e})",
                    r.n_imaginary_axis, r.tolerance
                );
            }
            let mut top = values.clone();
            top.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
            for z in top.iter().take(cfg.spectrum.k) {
                println!(
                    "dominant {} {}{}i",
                    fmt(z.re),
                    if z.im < 0.0 { "-" } else { "+" },
                    fmt(z.im.abs())
                );
            }
            if let Some(t) = &s.trend {
                println!("M,re_dominant,im_dominant");
                for row in &t.rows {
                    match &row.dominant {
                        Ok(z) => println!("{},{},{}", row.modes, fmt(z.re), fmt(z.im)),
                        Err(e) => println!("{},,  # {e}", row.modes),
                    }
                }
            }
            println!("output: {}", cfg.run.output_dir.display());
        }
        Command::DecayFit {
            energy,
            window,
            alpha,
        } => {
            let pts = read_energy_csv(&energy)?;
            let fit = fit_decay(&pts, window, alpha)?;
            println!("window = [{}, {}]", window.0, window.1);
            println!("slope = {:.10}", fit.slope);
            println!("intercept = {:.10}", fit.intercept);
            println!("r2 = {:.12}", fit.r_squared);
            println!("points_used = {}", fit.points_used);
            println!("points_excluded = {}", fit.points_excluded);
            for r in &fit.references {
                println!(
                    "reference_slope {:.6}: rms_residual = {:.6e}",
                    r.slope, r.rms_residual
                );
            }
        }
        Command::Oracle {
            alpha,
            eta,
            f,
            modes,
            spacing,
            dt,
            times,
        } => {
            if times.iter().any(|t| t.is_nan() || *t < 0.0) {
                bail!("output times must be non-negative");
            }
            let grid = DiffusiveGrid::new(alpha, modes, spacing)?;
            let rows = oracle_table(f.into(), alpha, eta, grid, dt, &times)?;
            println!("t,diffusive,analytic,rel_error");
            for r in rows {
                println!(
                    "{},{},{},{}",
                    fmt(r.t),
                    fmt(r.diffusive),
                    fmt(r.analytic),
                    fmt(r.rel_error)
                );
            }
        }
        Command::Preset { name, emit } => {
            let cfg = presets::preset(&name).with_context(|| {
                format!(
                    "unknown preset `{name}` (available: {})",
                    presets::NAMES.join(", ")
                )
            })?;
            let text = emit_config(&cfg);
            match emit {
                Some(path) => {
                    std::fs::write(&path, &text)
                        .with_context(|| format!("writing {}", path.display()))?;
                    log::info!("wrote {}", path.display());
                }
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}
