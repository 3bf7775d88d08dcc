//! Direct solvers for banded systems.
//!
//! The stiffness-type matrices of the grid have a bandwidth of about twice
//! the x-cell count once the two fields are interleaved, so a band
//! factorization is both simple and close to optimal in fill. Symmetric
//! positive definite systems use a band Cholesky factorization; anything else
//! falls back to band LU with partial pivoting.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::sqrt;
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    Cholesky,
    Lu,
}

/// Lower band of `L` in `A = L L^T`, row by row.
#[derive(Debug, Clone)]
struct BandCholesky {
    n: usize,
    bw: usize,
    // l[i * (bw + 1) + (j + bw - i)] = L[i][j] for i - bw <= j <= i
    l: Vec<f64>,
}

impl BandCholesky {
    fn factor(a: &CsrMatrix, bw: usize) -> Option<Self> {
        let n = a.nrows();
        let w = bw + 1;
        let mut l = vec![0.0; n * w];
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i {
                    l[i * w + (j + bw - i)] = v;
                }
            }
        }
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let k0 = lo.max(j.saturating_sub(bw));
                let mut s = l[i * w + (j + bw - i)];
                for k in k0..j {
                    s -= l[i * w + (k + bw - i)] * l[j * w + (k + bw - j)];
                }
                if i == j {
                    if !(s > 0.0) || !s.is_finite() {
                        return None;
                    }
                    l[i * w + bw] = sqrt(s);
                } else {
                    l[i * w + (j + bw - i)] = s / l[j * w + bw];
                }
            }
        }
        Some(Self { n, bw, l })
    }

    fn solve_in_place(&self, b: &mut [f64]) {
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        for i in 0..n {
            let mut s = b[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.l[i * w + (k + bw - i)] * b[k];
            }
            b[i] = s / self.l[i * w + bw];
        }
        for i in (0..n).rev() {
            let x = b[i] / self.l[i * w + bw];
            b[i] = x;
            for k in i.saturating_sub(bw)..i {
                b[k] -= self.l[i * w + (k + bw - i)] * x;
            }
        }
    }
}

/// Column-major band LU with partial pivoting (the classic `gbtf2` layout:
/// `kl` extra rows absorb fill from row interchanges).
#[derive(Debug, Clone)]
struct BandLu {
    n: usize,
    kl: usize,
    kv: usize,
    ldab: usize,
    ab: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandLu {
    fn factor(a: &CsrMatrix, kl: usize, ku: usize) -> Result<Self> {
        let n = a.nrows();
        let kv = kl + ku;
        let ldab = 2 * kl + ku + 1;
        let mut ab = vec![0.0; ldab * n];
        for i in 0..n {
            for (j, v) in a.row(i) {
                ab[(kv + i - j) + j * ldab] = v;
            }
        }
        let at = |i: usize, c: usize| (kv + i - c) + c * ldab;
        let mut pivots = vec![0usize; n];
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut jp = 0;
            let mut best = ab[at(j, j)].abs();
            for r in 1..=km {
                let v = ab[at(j + r, j)].abs();
                if v > best {
                    best = v;
                    jp = r;
                }
            }
            pivots[j] = j + jp;
            if best == 0.0 || !best.is_finite() {
                return Err(Error::NumericalBreakdown {
                    step: 0,
                    reason: format!("singular system matrix (zero pivot in column {j})"),
                });
            }
            ju = ju.max((j + ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    ab.swap(at(j, c), at(j + jp, c));
                }
            }
            let pivot = ab[at(j, j)];
            for r in 1..=km {
                ab[at(j + r, j)] /= pivot;
            }
            for c in j + 1..=ju {
                let ujc = ab[at(j, c)];
                if ujc != 0.0 {
                    for r in 1..=km {
                        ab[at(j + r, c)] -= ab[at(j + r, j)] * ujc;
                    }
                }
            }
        }
        Ok(Self {
            n,
            kl,
            kv,
            ldab,
            ab,
            pivots,
        })
    }

    fn solve_in_place(&self, b: &mut [f64]) {
        let (n, kl, kv, ldab) = (self.n, self.kl, self.kv, self.ldab);
        let at = |i: usize, c: usize| (kv + i - c) + c * ldab;
        for j in 0..n {
            let p = self.pivots[j];
            if p != j {
                b.swap(j, p);
            }
            let bj = b[j];
            for r in 1..=kl.min(n - 1 - j) {
                b[j + r] -= self.ab[at(j + r, j)] * bj;
            }
        }
        for j in (0..n).rev() {
            let x = b[j] / self.ab[at(j, j)];
            b[j] = x;
            for i in j.saturating_sub(kv)..j {
                b[i] -= self.ab[at(i, j)] * x;
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Factor {
    Cholesky(BandCholesky),
    Lu(BandLu),
}

/// A factored square matrix, optionally under a symmetric reordering that
/// narrows its band.
#[derive(Debug, Clone)]
pub struct BandedSolver {
    // perm[i] = position of original unknown i in the factored ordering
    perm: Option<Vec<usize>>,
    factor: Factor,
}

impl BandedSolver {
    pub fn new(a: &CsrMatrix, perm: Option<Vec<usize>>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(crate::error::invalid!("cannot factor a non-square matrix"));
        }
        let reordered;
        let a = match &perm {
            Some(p) => {
                reordered = a.permute_symmetric(p)?;
                &reordered
            }
            None => a,
        };
        let bw = a.bandwidth();
        let factor = match a
            .is_symmetric()
            .then(|| BandCholesky::factor(a, bw))
            .flatten()
        {
            Some(ch) => Factor::Cholesky(ch),
            None => Factor::Lu(BandLu::factor(a, bw, bw)?),
        };
        Ok(Self { perm, factor })
    }

    pub fn kind(&self) -> FactorKind {
        match self.factor {
            Factor::Cholesky(_) => FactorKind::Cholesky,
            Factor::Lu(_) => FactorKind::Lu,
        }
    }

    /// Solves `A x = b`, overwriting `b` with `x`. `work` is resized as needed.
    pub fn solve_in_place(&self, b: &mut [f64], work: &mut Vec<f64>) {
        match &self.perm {
            None => self.solve_ordered(b),
            Some(p) => {
                work.resize(b.len(), 0.0);
                for (i, &pi) in p.iter().enumerate() {
                    work[pi] = b[i];
                }
                self.solve_ordered(work);
                for (i, &pi) in p.iter().enumerate() {
                    b[i] = work[pi];
                }
            }
        }
    }

    fn solve_ordered(&self, b: &mut [f64]) {
        match &self.factor {
            Factor::Cholesky(f) => f.solve_in_place(b),
            Factor::Lu(f) => f.solve_in_place(b),
        }
    }
}
