//! Largest-modulus eigenvalues of a real operator by thick-restart Arnoldi.
//!
//! All basis vectors stay real. At each restart the wanted Ritz vectors of
//! the projected matrix are split into real and imaginary parts, which span
//! the same invariant subspace as the conjugate pairs; an orthonormal basis
//! of that span seeds the next cycle.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::hessenberg::{eigenvalues, Dense};
use crate::error::{invalid, Result};
use crate::math::{axpy, dot, norm2};
use crate::sparse::LinearOperator;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOptions {
    /// Number of eigenvalues wanted.
    pub k: usize,
    pub max_restarts: usize,
    /// Required residual `|A x - lambda x| / |x|`.
    pub tol: f64,
    /// Basis size; `None` picks `max(2k + 1, k + 20)`, capped at the dimension.
    pub subspace: Option<usize>,
    pub seed: u64,
}

impl KrylovOptions {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            max_restarts: 300,
            tol: 1e-8,
            subspace: None,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RitzPair {
    pub value: Complex64,
    /// Explicitly computed residual norm of the normalized Ritz vector.
    pub residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrylovResult {
    /// Sorted by decreasing modulus.
    pub eigenpairs: Vec<RitzPair>,
    pub restarts: usize,
    pub matvecs: usize,
    pub converged: bool,
}

impl KrylovResult {
    pub fn values(&self) -> Vec<Complex64> {
        self.eigenpairs.iter().map(|p| p.value).collect()
    }
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|_| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0)
        .collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    v
}

/// Two passes of classical Gram-Schmidt; returns the removed coefficients.
fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut coeffs = vec![0.0; basis.len()];
    for _ in 0..2 {
        for (i, b) in basis.iter().enumerate() {
            let c = dot(b, w);
            axpy(-c, b, w);
            coeffs[i] += c;
        }
    }
    coeffs
}

/// Eigenvector of the small real matrix `g` for `theta`, by inverse iteration
/// in complex arithmetic. Normalized to unit 2-norm.
fn ritz_vector(g: &Dense, theta: Complex64) -> Vec<Complex64> {
    let m = g.n;
    let gnorm = g
        .data
        .iter()
        .fold(0.0f64, |acc, x| acc.max(x.abs()))
        .max(1e-300);
    let tiny = f64::EPSILON * gnorm;
    // LU with partial pivoting of g - theta I.
    let mut lu: Vec<Complex64> = g.data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    for i in 0..m {
        lu[i * m + i] -= theta;
    }
    let mut piv: Vec<usize> = (0..m).collect();
    for c in 0..m {
        let mut best = c;
        for r in c + 1..m {
            if lu[r * m + c].norm() > lu[best * m + c].norm() {
                best = r;
            }
        }
        if best != c {
            for j in 0..m {
                lu.swap(c * m + j, best * m + j);
            }
            piv.swap(c, best);
        }
        if lu[c * m + c].norm() < tiny {
            lu[c * m + c] = Complex64::new(tiny, 0.0);
        }
        let d = lu[c * m + c];
        for r in c + 1..m {
            let f = lu[r * m + c] / d;
            lu[r * m + c] = f;
            if f != Complex64::new(0.0, 0.0) {
                for j in c + 1..m {
                    let u = lu[c * m + j];
                    lu[r * m + j] -= f * u;
                }
            }
        }
    }
    let mut y: Vec<Complex64> = (0..m)
        .map(|i| Complex64::new(1.0 + 0.1 * (i % 7) as f64, 0.05 * (i % 3) as f64))
        .collect();
    for _ in 0..3 {
        let mut b: Vec<Complex64> = piv.iter().map(|&p| y[p]).collect();
        for i in 0..m {
            for j in 0..i {
                let l = lu[i * m + j];
                let bj = b[j];
                b[i] -= l * bj;
            }
        }
        for i in (0..m).rev() {
            for j in i + 1..m {
                let u = lu[i * m + j];
                let bj = b[j];
                b[i] -= u * bj;
            }
            b[i] /= lu[i * m + i];
        }
        let nrm = libm::sqrt(b.iter().map(|z| z.norm_sqr()).sum::<f64>());
        y = b.into_iter().map(|z| z / nrm).collect();
    }
    y
}

/// Orders eigenvalues by decreasing modulus with the positive-imaginary
/// member of each pair first.
fn by_modulus(values: &[Complex64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (values[a], values[b]);
        y.norm().total_cmp(&x.norm()).then(y.im.total_cmp(&x.im))
    });
    order
}

/// The `k` eigenvalues of largest modulus of a real square operator.
///
/// Non-convergence after `max_restarts` is not an error: the best Ritz
/// values are returned with `converged == false`.
pub fn dominant_eigenvalues<A: LinearOperator + ?Sized>(
    a: &A,
    opts: &KrylovOptions,
) -> Result<KrylovResult> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(invalid!("operator is not square"));
    }
    if opts.k == 0 || opts.k > n {
        return Err(invalid!("k must lie in 1..={n}, got {}", opts.k));
    }
    if !(opts.tol > 0.0) {
        return Err(invalid!("tolerance must be positive"));
    }
    let m = opts
        .subspace
        .unwrap_or((2 * opts.k + 1).max(opts.k + 20))
        .min(n)
        .max(opts.k);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut matvecs = 0usize;

    // basis v[0..=m], projected matrix h is (m + 1) x m row-major
    let mut v: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    v.push(random_unit(n, &mut rng));
    let mut h = vec![0.0; (m + 1) * m];
    let mut p = 0usize;
    let mut w = vec![0.0; n];
    let mut restarts = 0usize;

    loop {
        // Extend the factorization A V_m = V_m G + v_m h[m][m-1] e^T.
        for j in p..m {
            a.apply(&v[j], &mut w);
            matvecs += 1;
            let coeffs = orthogonalize(&mut w, &v[..=j]);
            for (i, c) in coeffs.iter().enumerate() {
                h[i * m + j] += c;
            }
            let beta = norm2(&w);
            let scale = h[..(j + 1) * m]
                .iter()
                .fold(0.0f64, |acc, x| acc.max(x.abs()));
            if beta <= 1e-13 * scale.max(f64::MIN_POSITIVE) {
                // Invariant subspace found; continue with a fresh direction.
                h[(j + 1) * m + j] = 0.0;
                let mut fresh = if j + 1 < n {
                    random_unit(n, &mut rng)
                } else {
                    vec![0.0; n]
                };
                if j + 1 < n {
                    orthogonalize(&mut fresh, &v[..=j]);
                    let nf = norm2(&fresh);
                    fresh.iter_mut().for_each(|x| *x /= nf);
                }
                v.push(fresh);
            } else {
                h[(j + 1) * m + j] = beta;
                v.push(w.iter().map(|x| x / beta).collect());
            }
        }

        let mut g = Dense::zeros(m);
        g.data.copy_from_slice(&h[..m * m]);
        let theta = eigenvalues(&g)?;
        let order = by_modulus(&theta);
        let beta_m = h[m * m + (m - 1)];

        // Residual estimates of the wanted pairs.
        let wanted: Vec<usize> = order[..opts.k].to_vec();
        let vecs: Vec<Vec<Complex64>> = wanted.iter().map(|&i| ritz_vector(&g, theta[i])).collect();
        let estimates_ok = vecs
            .iter()
            .all(|y| (beta_m * y[m - 1].norm()).abs() <= 0.1 * opts.tol);
        let last = restarts >= opts.max_restarts;
        if estimates_ok || last || m == n {
            let eigenpairs: Vec<RitzPair> = wanted
                .iter()
                .zip(&vecs)
                .map(|(&i, y)| {
                    let residual = explicit_residual(a, &v[..m], y, theta[i]);
                    RitzPair {
                        value: theta[i],
                        residual,
                        converged: residual <= opts.tol,
                    }
                })
                .collect();
            matvecs += 2 * eigenpairs.len();
            let converged = eigenpairs.iter().all(|p| p.converged);
            if converged || last || m == n {
                return Ok(KrylovResult {
                    eigenpairs,
                    restarts,
                    matvecs,
                    converged,
                });
            }
        }

        // Thick restart: keep the wanted pairs plus a buffer, never
        // splitting a conjugate pair.
        let mut keep = (opts.k + (m - opts.k) / 2).min(m - 1).max(opts.k);
        while keep < m && keep > 0 && theta[order[keep - 1]].im > 0.0 {
            // the conjugate of the last kept value sits right after it
            keep += 1;
        }
        if keep >= m {
            keep = m - 1;
            while keep > 0 && theta[order[keep - 1]].im > 0.0 {
                keep -= 1;
            }
        }
        let mut columns: Vec<Vec<f64>> = Vec::with_capacity(keep);
        for &i in &order[..keep] {
            if theta[i].im < 0.0 {
                continue;
            }
            let y = ritz_vector(&g, theta[i]);
            columns.push(y.iter().map(|z| z.re).collect());
            if theta[i].im > 0.0 {
                columns.push(y.iter().map(|z| z.im).collect());
            }
        }
        let mut z: Vec<Vec<f64>> = Vec::with_capacity(columns.len());
        for mut c in columns {
            let before = norm2(&c);
            orthogonalize(&mut c, &z);
            let after = norm2(&c);
            if after > 1e-8 * before {
                c.iter_mut().for_each(|x| *x /= after);
                z.push(c);
            }
        }
        let new_p = z.len();

        // W = V_m Z, S = Z^T G Z, residual row beta_m Z[m-1, :]
        let mut new_v: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        for zc in &z {
            let mut col = vec![0.0; n];
            for (j, &coef) in zc.iter().enumerate() {
                if coef != 0.0 {
                    axpy(coef, &v[j], &mut col);
                }
            }
            new_v.push(col);
        }
        let mut gz = vec![vec![0.0; m]; new_p];
        for (c, zc) in z.iter().enumerate() {
            for i in 0..m {
                gz[c][i] = (0..m).map(|j| g.at(i, j) * zc[j]).sum();
            }
        }
        h.iter_mut().for_each(|x| *x = 0.0);
        for r in 0..new_p {
            for c in 0..new_p {
                h[r * m + c] = dot(&z[r], &gz[c]);
            }
        }
        for c in 0..new_p {
            h[new_p * m + c] = beta_m * z[c][m - 1];
        }
        new_v.push(v.swap_remove(m));
        v = new_v;
        p = new_p;
        restarts += 1;
    }
}

fn explicit_residual<A: LinearOperator + ?Sized>(
    a: &A,
    basis: &[Vec<f64>],
    y: &[Complex64],
    theta: Complex64,
) -> f64 {
    let n = a.nrows();
    let mut xr = vec![0.0; n];
    let mut xi = vec![0.0; n];
    for (b, c) in basis.iter().zip(y) {
        axpy(c.re, b, &mut xr);
        axpy(c.im, b, &mut xi);
    }
    let mut ar = vec![0.0; n];
    let mut ai = vec![0.0; n];
    a.apply(&xr, &mut ar);
    a.apply(&xi, &mut ai);
    // (A - theta)(xr + i xi)
    let mut res2 = 0.0;
    for j in 0..n {
        let re = ar[j] - (theta.re * xr[j] - theta.im * xi[j]);
        let im = ai[j] - (theta.re * xi[j] + theta.im * xr[j]);
        res2 += re * re + im * im;
    }
    let x2 = dot(&xr, &xr) + dot(&xi, &xi);
    libm::sqrt(res2 / x2)
}
