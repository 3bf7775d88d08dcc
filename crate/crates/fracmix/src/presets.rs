//! Built-in experiment presets.
//!
//! `example1`, `example2` and `example3` follow the published experiments
//! where their parameters are stated. The `-desk` variants shrink the grid,
//! mode count and horizon so they run in seconds to minutes.

use std::path::PathBuf;

use crate::config::{
    DecayConfig, DiffusiveConfig, ExperimentConfig, GridConfig, InitialConfig, MaterialConfig,
    NewmarkConfig, ProfileConfig, RunConfig, SnapshotFormat, SolverKind, SpectrumConfig,
    VariantConfig,
};

pub const NAMES: [&str; 6] = [
    "example1",
    "example2",
    "example3",
    "example1-desk",
    "example2-desk",
    "example3-desk",
];

fn unit_square(n: usize) -> GridConfig {
    GridConfig {
        lx: 1.0,
        ly: 1.0,
        nx: n,
        ny: n,
    }
}

/// Positive definite elasticity used wherever the stated one is unusable.
fn stable_material(eta: f64) -> MaterialConfig {
    MaterialConfig {
        rho1: 1.0,
        rho2: 1.0,
        a11: 1.0,
        a12: 0.1,
        a22: 1.0,
        coupling: 1.0,
        order: 0.5,
        eta,
    }
}

fn example1() -> ExperimentConfig {
    ExperimentConfig {
        grid: unit_square(200),
        // Indefinite as stated (a11 a22 - a12^2 < 0); loading warns.
        material: MaterialConfig {
            rho1: 1.0,
            rho2: 1.0,
            a11: 0.1,
            a12: -0.5,
            a22: 0.1,
            coupling: 1.0,
            order: 0.5,
            eta: 0.0,
        },
        diffusive: DiffusiveConfig {
            modes: 1000,
            spacing: 0.1,
        },
        newmark: NewmarkConfig {
            beta: 0.25,
            gamma: 0.5,
            dt: 0.01,
        },
        run: RunConfig {
            t_final: 10.0,
            cadence: 1,
            damping: true,
            energy_variant: VariantConfig::Quadrature,
            snapshot_times: vec![1.0, 3.0, 10.0],
            snapshot_format: SnapshotFormat::Csv,
            output_dir: PathBuf::from("out/example1"),
        },
        initial: InitialConfig::default(),
        spectrum: SpectrumConfig::default(),
        decay: DecayConfig::default(),
    }
}

fn example2() -> ExperimentConfig {
    let mut cfg = example1();
    cfg.grid = unit_square(100);
    cfg.material = stable_material(0.1);
    cfg.diffusive.modes = 3;
    cfg.run.output_dir = PathBuf::from("out/example2");
    cfg.spectrum = SpectrumConfig {
        solver: SolverKind::Krylov,
        k: 2,
        mode_counts: vec![1, 2, 3],
        ..SpectrumConfig::default()
    };
    cfg
}

fn example3() -> ExperimentConfig {
    let cone = |center| ProfileConfig::Cone {
        center,
        radius: 0.1,
    };
    ExperimentConfig {
        grid: unit_square(200),
        material: stable_material(1.0),
        diffusive: DiffusiveConfig {
            modes: 1000,
            spacing: 0.1,
        },
        newmark: NewmarkConfig {
            beta: 0.25,
            gamma: 0.5,
            dt: 0.01,
        },
        run: RunConfig {
            t_final: 1e4,
            cadence: 10,
            damping: true,
            energy_variant: VariantConfig::Quadrature,
            snapshot_times: vec![100.0, 1e4],
            snapshot_format: SnapshotFormat::Csv,
            output_dir: PathBuf::from("out/example3"),
        },
        initial: InitialConfig {
            u0: cone([0.5, 0.5]),
            v0: ProfileConfig::Zero,
            u1: ProfileConfig::Zero,
            v1: ProfileConfig::Bump6 {
                center: [0.5, 0.5],
                radius: 0.1,
            },
        },
        spectrum: SpectrumConfig::default(),
        decay: DecayConfig {
            window: Some([100.0, 1e4]),
        },
    }
}

pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let cfg = match name {
        "example1" => example1(),
        "example2" => example2(),
        "example3" => example3(),
        "example1-desk" => {
            let mut cfg = example1();
            cfg.grid = unit_square(20);
            cfg.material = stable_material(0.0);
            cfg.diffusive.modes = 100;
            cfg.run.output_dir = PathBuf::from("out/example1-desk");
            cfg
        }
        "example2-desk" => {
            let mut cfg = example2();
            cfg.grid = unit_square(10);
            cfg.diffusive.spacing = 1.0;
            cfg.spectrum.solver = SolverKind::Dense;
            cfg.run.output_dir = PathBuf::from("out/example2-desk");
            cfg
        }
        "example3-desk" => {
            let mut cfg = example3();
            cfg.grid = unit_square(20);
            cfg.diffusive.modes = 100;
            cfg.run.t_final = 1e3;
            cfg.run.snapshot_times = vec![100.0, 1e3];
            cfg.run.output_dir = PathBuf::from("out/example3-desk");
            cfg.decay.window = Some([100.0, 1e3]);
            cfg
        }
        _ => return None,
    };
    Some(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves_and_validates() {
        for name in NAMES {
            let cfg = preset(name).unwrap();
            cfg.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(preset("example4").is_none());
    }

    #[test]
    fn example1_matches_the_stated_parameters() {
        let c = preset("example1").unwrap();
        assert_eq!((c.material.rho1, c.material.rho2), (1.0, 1.0));
        assert_eq!(
            (c.material.a11, c.material.a12, c.material.a22),
            (0.1, -0.5, 0.1)
        );
        assert_eq!(c.material.coupling, 1.0);
        assert_eq!((c.grid.nx, c.grid.ny), (200, 200));
        assert_eq!((c.diffusive.modes, c.diffusive.spacing), (1000, 0.1));
        assert_eq!((c.newmark.dt, c.run.t_final), (0.01, 10.0));
        assert_eq!(
            c.initial.u0,
            ProfileConfig::Gaussian {
                center: [0.5, 0.0],
                sigma: 0.01,
                amplitude: 1.0
            }
        );
        assert!(!c.material_params().unwrap().elasticity_ok());
    }

    #[test]
    fn example3_cone_and_bump() {
        let c = preset("example3").unwrap();
        let (u0, v1): (
            fracmix_core::initial::Profile,
            fracmix_core::initial::Profile,
        ) = (c.initial.u0.into(), c.initial.v1.into());
        assert!((u0.eval(0.5, 0.5) - 1.0).abs() < 1e-15);
        assert!((u0.eval(0.55, 0.5) - 0.5).abs() < 1e-12);
        assert_eq!(u0.eval(0.7, 0.5), 0.0);
        let (x, y) = (0.53, 0.46);
        let expect = (1.0 - 100.0 * (x - 0.5f64).powi(2) - 100.0 * (y - 0.5f64).powi(2)).powi(3);
        assert!((v1.eval(x, y) - expect).abs() < 1e-12);
        assert_eq!(v1.eval(0.5, 0.65), 0.0);
    }
}
