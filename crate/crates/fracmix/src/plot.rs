//! Plot-ready CSV files and minimal SVG renderings of them.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use fracmix_core::{Complex64, GridSpec};

use crate::experiment::Bundle;
use crate::output::{csv_writer, fmt, write_field_csv};

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 50.0;

/// Writes the energy curves, the `u + v` heatmaps at the snapshot times and,
/// if given, the eigenvalue scatter into `<bundle dir>/plots`. Returns the
/// paths written.
pub fn emit_plotdata(bundle: &Bundle, spectrum: Option<&[Complex64]>) -> Result<Vec<PathBuf>> {
    let dir = bundle.dir.join("plots");
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();

    let lin: Vec<(f64, f64)> = bundle.energy.iter().map(|r| (r.t, r.total)).collect();
    let path = dir.join("energy_linear.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["t", "total"])?;
    for &(t, e) in &lin {
        w.write_record([fmt(t), fmt(e)])?;
    }
    w.flush()?;
    written.push(path);
    let path = dir.join("energy_linear.svg");
    write_svg(&path, &line_plot(&[("total", &lin)], false, "t", "E"))?;
    written.push(path);

    let log: Vec<(f64, f64)> = lin
        .iter()
        .copied()
        .filter(|&(t, e)| t > 0.0 && e > 0.0)
        .collect();
    let anchor = match bundle.decay_window {
        Some([a, _]) => log.iter().find(|p| p.0 >= a).copied(),
        None => log.first().copied(),
    };
    let path = dir.join("energy_loglog.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["t", "total", "c1_over_t", "c2_over_t2"])?;
    let (c1, c2) = anchor.map_or((0.0, 0.0), |(t, e)| (e * t, e * t * t));
    for &(t, e) in &log {
        w.write_record([fmt(t), fmt(e), fmt(c1 / t), fmt(c2 / (t * t))])?;
    }
    w.flush()?;
    written.push(path);
    let r1: Vec<(f64, f64)> = log.iter().map(|&(t, _)| (t, c1 / t)).collect();
    let r2: Vec<(f64, f64)> = log.iter().map(|&(t, _)| (t, c2 / (t * t))).collect();
    let path = dir.join("energy_loglog.svg");
    write_svg(
        &path,
        &line_plot(
            &[("total", &log), ("C1/t", &r1), ("C2/t^2", &r2)],
            true,
            "t",
            "E",
        ),
    )?;
    written.push(path);

    for s in &bundle.snapshots {
        let sum = s.sum();
        let path = dir.join(format!("heatmap_sum_t{}.csv", s.t));
        write_field_csv(&path, &bundle.grid, &sum)?;
        written.push(path);
        let path = dir.join(format!("heatmap_sum_t{}.svg", s.t));
        write_svg(&path, &heatmap(&bundle.grid, &sum))?;
        written.push(path);
    }

    if let Some(ev) = spectrum {
        written.extend(emit_scatter(&dir, ev)?);
    }
    Ok(written)
}

/// Eigenvalue scatter as `eigenvalues.csv` (`re,im`) and `eigenvalues.svg`.
pub fn emit_scatter(dir: &Path, ev: &[Complex64]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join("eigenvalues.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["re", "im"])?;
    for z in ev {
        w.write_record([fmt(z.re), fmt(z.im)])?;
    }
    w.flush()?;
    let svg_path = dir.join("eigenvalues.svg");
    write_svg(&svg_path, &scatter(ev))?;
    Ok(vec![path, svg_path])
}

fn write_svg(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            (lo, hi) = (lo - 0.5, hi + 0.5);
        }
        Self { lo, hi, log }
    }

    /// Position in [0, 1], or `None` outside the log domain.
    fn unit(&self, v: f64) -> Option<f64> {
        let v = if self.log {
            if v <= 0.0 {
                return None;
            }
            v.log10()
        } else {
            v
        };
        Some((v - self.lo) / (self.hi - self.lo))
    }

    fn label(&self, at: f64) -> String {
        let v = self.lo + at * (self.hi - self.lo);
        if self.log {
            format!("1e{v:.1}")
        } else {
            format!("{v:.3e}")
        }
    }
}

fn frame(out: &mut String, x: &Axis, y: &Axis, xl: &str, yl: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let (x0, y0, x1, y1) = (PAD, H - PAD, W - PAD, PAD);
    let _ = writeln!(
        out,
        r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let px = x0 + f * (x1 - x0);
        let py = y0 - f * (y0 - y1);
        let _ = writeln!(
            out,
            r#"<text x="{px}" y="{}" text-anchor="middle">{}</text>"#,
            y0 + 15.0,
            x.label(f)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{py}" text-anchor="end">{}</text>"#,
            x0 - 4.0,
            y.label(f)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{xl}</text>"#,
        W / 2.0,
        H - 10.0
    );
    let _ = writeln!(out, r#"<text x="12" y="{}">{yl}</text>"#, H / 2.0);
}

fn to_px(x: &Axis, y: &Axis, p: (f64, f64)) -> Option<(f64, f64)> {
    let (u, v) = (x.unit(p.0)?, y.unit(p.1)?);
    Some((PAD + u * (W - 2.0 * PAD), H - PAD - v * (H - 2.0 * PAD)))
}

const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn line_plot(series: &[(&str, &[(f64, f64)])], log: bool, xl: &str, yl: &str) -> String {
    let x = Axis::new(series.iter().flat_map(|s| s.1.iter().map(|p| p.0)), log);
    let y = Axis::new(series.iter().flat_map(|s| s.1.iter().map(|p| p.1)), log);
    let mut out = String::new();
    frame(&mut out, &x, &y, xl, yl);
    for (k, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut d = String::new();
        for (px, py) in pts.iter().filter_map(|&p| to_px(&x, &y, p)) {
            let _ = write!(d, "{px:.2},{py:.2} ");
        }
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" points="{}"/>"#,
            d.trim_end()
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" fill="{color}">{name}</text>"#,
            W - PAD - 60.0,
            PAD + 15.0 * (k as f64 + 1.0)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn scatter(ev: &[Complex64]) -> String {
    let x = Axis::new(ev.iter().map(|z| z.re), false);
    let y = Axis::new(ev.iter().map(|z| z.im), false);
    let mut out = String::new();
    frame(&mut out, &x, &y, "Re", "Im");
    for z in ev {
        if let Some((px, py)) = to_px(&x, &y, (z.re, z.im)) {
            let _ = writeln!(
                out,
                r#"<circle cx="{px:.2}" cy="{py:.2}" r="1.5" fill="{}"/>"#,
                COLORS[0]
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Blue-white-red map symmetric about zero, `y` increasing upwards.
fn heatmap(grid: &GridSpec, field: &[f64]) -> String {
    let (nx, ny) = (grid.nx(), grid.ny());
    let scale = field.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (cw, ch) = ((W - 2.0 * PAD) / nx as f64, (H - 2.0 * PAD) / ny as f64);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}">"#
    );
    for (k, &v) in field.iter().enumerate() {
        let (i, j) = (k % nx, k / nx);
        let s = if scale > 0.0 { v / scale } else { 0.0 };
        let c = |t: f64| (255.0 * (1.0 - t.abs())).round() as u8;
        let (r, g, b) = if s >= 0.0 {
            (255, c(s), c(s))
        } else {
            (c(s), c(s), 255)
        };
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({r},{g},{b})"/>"#,
            PAD + i as f64 * cw,
            H - PAD - (j + 1) as f64 * ch,
            cw + 0.05,
            ch + 0.05
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::run_experiment;
    use crate::presets::preset;

    fn bundle(dir: &Path, snaps: Vec<f64>) -> Bundle {
        let mut cfg = preset("example1-desk").unwrap();
        cfg.grid.nx = 5;
        cfg.grid.ny = 5;
        cfg.diffusive.modes = 4;
        cfg.run.t_final = 0.3;
        cfg.run.snapshot_times = snaps;
        cfg.run.output_dir = dir.to_path_buf();
        run_experiment(&cfg).unwrap()
    }

    #[test]
    fn without_snapshots_only_energy_files() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_plotdata(&bundle(dir.path(), vec![]), None).unwrap();
        let names: Vec<String> = files
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        assert_eq!(
            names,
            [
                "energy_linear.csv",
                "energy_linear.svg",
                "energy_loglog.csv",
                "energy_loglog.svg"
            ]
        );
    }

    #[test]
    fn loglog_rows_are_in_the_log_domain() {
        let dir = tempfile::tempdir().unwrap();
        let b = bundle(dir.path(), vec![0.1]);
        emit_plotdata(
            &b,
            Some(&[Complex64::new(-1.0, 2.0), Complex64::new(-1.0, -2.0)]),
        )
        .unwrap();
        let mut rdr = csv::Reader::from_path(dir.path().join("plots/energy_loglog.csv")).unwrap();
        let mut rows = 0;
        for r in rdr.records() {
            let r = r.unwrap();
            let t: f64 = r[0].parse().unwrap();
            let e: f64 = r[1].parse().unwrap();
            assert!(t > 0.0 && e > 0.0);
            rows += 1;
        }
        assert_eq!(rows, b.energy.len() - 1);
        assert!(dir.path().join("plots/heatmap_sum_t0.1.svg").exists());
        assert!(dir.path().join("plots/eigenvalues.svg").exists());
    }
}
