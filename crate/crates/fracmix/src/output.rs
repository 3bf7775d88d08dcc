//! CSV and binary file formats.
//!
//! Floating-point values are written with `{:.16e}` (17 significant digits),
//! which round-trips every `f64` exactly.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use fracmix_core::{EnergyRecord, GridSpec};

pub const ENERGY_HEADER: [&str; 5] = ["t", "kinetic", "elastic", "diffusive", "total"];

/// Magic bytes of the binary snapshot format.
pub const MAGIC: &[u8; 4] = b"MXW1";
/// Bytes before the data: magic, `nx` and `ny` as `u64`, component count as
/// `u32`, all little-endian.
pub const HEADER_LEN: usize = 24;

pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(file)))
}

/// Streams energy records to a CSV file as they are produced.
pub struct EnergyWriter {
    inner: csv::Writer<BufWriter<File>>,
    path: std::path::PathBuf,
}

impl EnergyWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let mut inner = csv_writer(path)?;
        inner
            .write_record(ENERGY_HEADER)
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(Self {
            inner,
            path: path.to_path_buf(),
        })
    }

    pub fn write(&mut self, r: &EnergyRecord) -> Result<()> {
        self.inner
            .write_record([r.t, r.kinetic, r.elastic, r.diffusive, r.total].map(fmt))
            .with_context(|| format!("writing {}", self.path.display()))
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner
            .flush()
            .with_context(|| format!("writing {}", self.path.display()))
    }
}

pub fn write_energy_csv(path: &Path, records: &[EnergyRecord]) -> Result<()> {
    let mut w = EnergyWriter::create(path)?;
    for r in records {
        w.write(r)?;
    }
    w.finish()
}

/// Reads `(t, total)` pairs from an energy CSV; other columns are ignored.
pub fn read_energy_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut rdr =
        csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .with_context(|| format!("{} has no `{name}` column", path.display()))
    };
    let (it, ie) = (col("t")?, col("total")?);
    let mut out = Vec::new();
    for (line, row) in rdr.records().enumerate() {
        let row = row.with_context(|| format!("reading {}", path.display()))?;
        let parse = |i: usize| -> Result<f64> {
            let s = row.get(i).unwrap_or("").trim();
            s.parse()
                .with_context(|| format!("{}: row {}: bad number `{s}`", path.display(), line + 2))
        };
        out.push((parse(it)?, parse(ie)?));
    }
    Ok(out)
}

/// One scalar field as `ny` rows of `nx` values, `y` increasing downwards.
/// The header row holds the x coordinates of the cell centers.
pub fn write_field_csv(path: &Path, grid: &GridSpec, field: &[f64]) -> Result<()> {
    ensure!(
        field.len() == grid.len(),
        "field has {} values for a {}-cell grid",
        field.len(),
        grid.len()
    );
    let mut w = csv_writer(path)?;
    let header: Vec<String> = (1..=grid.nx()).map(|i| fmt(grid.center(i, 1).0)).collect();
    w.write_record(&header)?;
    for row in field.chunks(grid.nx()) {
        w.write_record(row.iter().map(|&x| fmt(x)))?;
    }
    w.flush()
        .with_context(|| format!("writing {}", path.display()))
}

pub fn write_snapshot_binary(path: &Path, grid: &GridSpec, components: &[&[f64]]) -> Result<()> {
    for c in components {
        ensure!(
            c.len() == grid.len(),
            "component length {} does not match the grid",
            c.len()
        );
    }
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    let mut header = Vec::with_capacity(HEADER_LEN);
    header.extend_from_slice(MAGIC);
    header.extend_from_slice(&(grid.nx() as u64).to_le_bytes());
    header.extend_from_slice(&(grid.ny() as u64).to_le_bytes());
    header.extend_from_slice(&(components.len() as u32).to_le_bytes());
    w.write_all(&header)?;
    for c in components {
        for x in *c {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    w.flush()
        .with_context(|| format!("writing {}", path.display()))
}

/// Returns `(nx, ny, components)`.
pub fn read_snapshot_binary(path: &Path) -> Result<(usize, usize, Vec<Vec<f64>>)> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .with_context(|| format!("reading {}", path.display()))?;
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        bail!("{} is not an MXW1 snapshot", path.display());
    }
    let u64_at = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().unwrap()) as usize;
    let (nx, ny) = (u64_at(4), u64_at(12));
    let count = u32::from_le_bytes(bytes[20..24].try_into().unwrap()) as usize;
    let n = nx * ny;
    ensure!(
        bytes.len() == HEADER_LEN + 8 * n * count,
        "{}: expected {} data bytes, found {}",
        path.display(),
        8 * n * count,
        bytes.len() - HEADER_LEN
    );
    let values: Vec<f64> = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
        .collect();
    Ok((
        nx,
        ny,
        values.chunks(n.max(1)).map(<[f64]>::to_vec).collect(),
    ))
}
