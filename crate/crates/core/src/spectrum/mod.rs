//! Eigenvalue analysis of generator matrices.
//!
//! [`full_spectrum`] computes every eigenvalue with a dense real Schur
//! decomposition and is limited to moderate sizes; [`dominant_eigenvalues`]
//! finds the few of largest modulus with a Krylov method and works on any
//! [`LinearOperator`].

mod hessenberg;
mod krylov;

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::operators::{assemble_generator, DiffusiveGrid, MaterialParams};
use crate::sparse::{CsrMatrix, DEFAULT_DENSE_LIMIT};

pub use krylov::{dominant_eigenvalues, KrylovOptions, KrylovResult, RitzPair};

/// Relative factor of the default classification tolerance `1e-10 |A|_inf`.
pub const DEFAULT_RELATIVE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    /// Every eigenvalue has real part below `-tolerance`.
    Asymptotic,
    /// The largest real part lies within `tolerance` of zero.
    Marginal,
    Unstable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Complex64>,
    pub max_real_part: f64,
    /// The eigenvalues of largest modulus (a conjugate pair counts twice).
    pub dominant: Vec<Complex64>,
    pub n_imaginary_axis: usize,
    pub size: usize,
    pub tolerance: f64,
}

impl SpectrumReport {
    pub fn from_eigenvalues(eigenvalues: Vec<Complex64>, size: usize, tolerance: f64) -> Self {
        let max_real_part = eigenvalues
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        let max_mod = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut dominant: Vec<Complex64> = eigenvalues
            .iter()
            .copied()
            .filter(|z| z.norm() >= max_mod * (1.0 - 1e-9))
            .collect();
        dominant.sort_by(|a, b| b.im.total_cmp(&a.im));
        let n_imaginary_axis = eigenvalues
            .iter()
            .filter(|z| z.re.abs() <= tolerance)
            .count();
        Self {
            eigenvalues,
            max_real_part,
            dominant,
            n_imaginary_axis,
            size,
            tolerance,
        }
    }

    pub fn stability(&self) -> Stability {
        if self.max_real_part < -self.tolerance {
            Stability::Asymptotic
        } else if self.max_real_part <= self.tolerance {
            Stability::Marginal
        } else {
            Stability::Unstable
        }
    }

    /// Every eigenvalue with `|Im| > tol` has its conjugate within `tol`.
    pub fn is_conjugate_symmetric(&self, tol: f64) -> bool {
        self.eigenvalues.iter().all(|z| {
            z.im.abs() <= tol
                || self
                    .eigenvalues
                    .iter()
                    .any(|w| (w - z.conj()).norm() <= tol)
        })
    }

    /// The dominant eigenvalue in the upper half-plane.
    pub fn dominant_upper(&self) -> Option<Complex64> {
        self.dominant.first().copied()
    }
}

/// All eigenvalues of `a` by a dense non-symmetric solver, refusing matrices
/// larger than [`DEFAULT_DENSE_LIMIT`].
pub fn full_spectrum(a: &CsrMatrix) -> Result<SpectrumReport> {
    full_spectrum_with_limit(a, DEFAULT_DENSE_LIMIT)
}

pub fn full_spectrum_with_limit(a: &CsrMatrix, limit: usize) -> Result<SpectrumReport> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(crate::error::invalid!("spectrum of a non-square matrix"));
    }
    let dense = a.to_dense(limit).map_err(|_| {
        Error::Capacity(format!(
            "{n}x{n} exceeds the dense eigensolver limit {limit}; use dominant_eigenvalues"
        ))
    })?;
    let eigenvalues: Vec<Complex64> = dense
        .eigenvalues()
        .map_err(|e| Error::NoConvergence(format!("dense eigensolve on {n}x{n}: {e:?}")))?;
    if eigenvalues
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::NumericalBreakdown {
            step: 0,
            reason: "non-finite eigenvalue".into(),
        });
    }
    let tolerance = DEFAULT_RELATIVE_TOLERANCE * a.norm_inf();
    Ok(SpectrumReport::from_eigenvalues(eigenvalues, n, tolerance))
}

/// Eigensolver used per row of a [`stability_trend`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrendSolver {
    Dense { limit: usize },
    Krylov(KrylovOptions),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendRow {
    pub modes: usize,
    /// Dominant eigenvalue in the upper half-plane, or why it is missing.
    pub dominant: Result<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendTable {
    pub rows: Vec<TrendRow>,
}

impl TrendTable {
    /// `Some(true)` if the real part of the dominant eigenvalue strictly
    /// decreases down the table; `None` with fewer than two usable rows.
    pub fn real_part_decreasing(&self) -> Option<bool> {
        let re: Vec<f64> = self
            .rows
            .iter()
            .filter_map(|r| r.dominant.as_ref().ok().map(|z| z.re))
            .collect();
        if re.len() < 2 || re.len() != self.rows.len() {
            return None;
        }
        Some(re.windows(2).all(|w| w[1] < w[0]))
    }

    /// `(max - min) / max` of `|Im|` over the usable rows.
    pub fn imaginary_spread(&self) -> Option<f64> {
        let im: Vec<f64> = self
            .rows
            .iter()
            .filter_map(|r| r.dominant.as_ref().ok().map(|z| z.im.abs()))
            .collect();
        if im.is_empty() {
            return None;
        }
        let hi = im.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = im.iter().copied().fold(f64::INFINITY, f64::min);
        Some((hi - lo) / hi)
    }
}

/// Dominant eigenvalue of the damped generator for each mode count in
/// `mode_counts`, keeping the order and spacing of `base`.
pub fn stability_trend(
    params: &MaterialParams,
    grid: &GridSpec,
    base: &DiffusiveGrid,
    mode_counts: &[usize],
    solver: &TrendSolver,
) -> TrendTable {
    let rows = mode_counts
        .iter()
        .map(|&m| TrendRow {
            modes: m,
            dominant: trend_row(params, grid, base, m, solver),
        })
        .collect();
    TrendTable { rows }
}

fn trend_row(
    params: &MaterialParams,
    grid: &GridSpec,
    base: &DiffusiveGrid,
    modes: usize,
    solver: &TrendSolver,
) -> Result<Complex64> {
    let d = DiffusiveGrid::new(base.order(), modes, base.spacing())?;
    let a = assemble_generator(params, grid, Some(&d))?;
    match solver {
        TrendSolver::Dense { limit } => full_spectrum_with_limit(&a, *limit)?
            .dominant_upper()
            .ok_or_else(|| Error::NoConvergence("empty spectrum".into())),
        TrendSolver::Krylov(opts) => {
            let mut opts = *opts;
            opts.k = opts.k.max(2);
            let r = dominant_eigenvalues(&a, &opts)?;
            if !r.converged {
                return Err(Error::NoConvergence(format!(
                    "Krylov iteration for M = {modes} after {} restarts",
                    r.restarts
                )));
            }
            let top = r.eigenpairs[0].value;
            Ok(if top.im < 0.0 { top.conj() } else { top })
        }
    }
}
