//! Eigenvalues of small dense real matrices: Householder reduction to upper
//! Hessenberg form followed by the Francis double-shift QR iteration.
//!
//! Used on the projected matrices inside the Krylov iteration.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::sqrt;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Dense {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Dense {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// In-place similarity reduction to upper Hessenberg form.
pub(crate) fn reduce_to_hessenberg(a: &mut Dense) {
    let n = a.n;
    if n < 3 {
        return;
    }
    let mut v = vec![0.0; n];
    for k in 0..n - 2 {
        let mut norm2 = 0.0;
        for i in k + 1..n {
            norm2 += a.at(i, k) * a.at(i, k);
        }
        if norm2 == 0.0 {
            continue;
        }
        let x0 = a.at(k + 1, k);
        let alpha = if x0 >= 0.0 { -sqrt(norm2) } else { sqrt(norm2) };
        // v = x - alpha e1, H = I - 2 v v^T / (v^T v)
        for i in k + 1..n {
            v[i] = a.at(i, k);
        }
        v[k + 1] -= alpha;
        let vtv = norm2 - x0 * x0 + v[k + 1] * v[k + 1];
        if vtv == 0.0 {
            continue;
        }
        let scale = 2.0 / vtv;
        // A <- H A (rows k+1..n)
        for j in k..n {
            let mut s = 0.0;
            for i in k + 1..n {
                s += v[i] * a.at(i, j);
            }
            s *= scale;
            for i in k + 1..n {
                *a.at_mut(i, j) -= s * v[i];
            }
        }
        // A <- A H (columns k+1..n)
        for i in 0..n {
            let mut s = 0.0;
            for j in k + 1..n {
                s += a.at(i, j) * v[j];
            }
            s *= scale;
            for j in k + 1..n {
                *a.at_mut(i, j) -= s * v[j];
            }
        }
        for i in k + 2..n {
            *a.at_mut(i, k) = 0.0;
        }
    }
}

#[inline]
fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Iterations allowed per eigenvalue before giving up.
const MAX_ITS: usize = 60;

/// Eigenvalues of an upper Hessenberg matrix (destroyed). Complex
/// conjugate pairs are returned adjacent, positive imaginary part first.
pub(crate) fn hessenberg_eigenvalues(h: &mut Dense) -> Result<Vec<Complex64>> {
    let n = h.n;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    if n == 0 {
        return Ok(out);
    }
    // 1-based view to keep the classic index arithmetic readable.
    let idx = |i: isize, j: isize| ((i - 1) as usize) * n + (j - 1) as usize;
    let a = &mut h.data;
    let mut anorm = 0.0;
    for i in 1..=n as isize {
        for j in core::cmp::max(i - 1, 1)..=n as isize {
            anorm += a[idx(i, j)].abs();
        }
    }
    let mut nn = n as isize;
    let mut t = 0.0;
    let (mut p, mut q, mut r) = (0.0f64, 0.0f64, 0.0f64);
    let (mut x, mut y, mut z, mut w): (f64, f64, f64, f64);
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = a[idx(l - 1, l - 1)].abs() + a[idx(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[idx(l, l - 1)].abs() + s == s {
                    a[idx(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            x = a[idx(nn, nn)];
            if l == nn {
                out[(nn - 1) as usize] = Complex64::new(x + t, 0.0);
                nn -= 1;
            } else {
                y = a[idx(nn - 1, nn - 1)];
                w = a[idx(nn, nn - 1)] * a[idx(nn - 1, nn)];
                if l == nn - 1 {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = sqrt(q.abs());
                    x += t;
                    if q >= 0.0 {
                        z = p + sign(z, p);
                        let hi = x + z;
                        let lo = if z != 0.0 { x - w / z } else { hi };
                        out[(nn - 2) as usize] = Complex64::new(hi, 0.0);
                        out[(nn - 1) as usize] = Complex64::new(lo, 0.0);
                    } else {
                        out[(nn - 2) as usize] = Complex64::new(x + p, z);
                        out[(nn - 1) as usize] = Complex64::new(x + p, -z);
                    }
                    nn -= 2;
                } else {
                    if its == MAX_ITS {
                        return Err(Error::NoConvergence(format!(
                            "QR iteration stalled with {nn} eigenvalues remaining"
                        )));
                    }
                    if its == 10 || its == 20 || its == 40 {
                        // exceptional shift
                        t += x;
                        for i in 1..=nn {
                            a[idx(i, i)] -= x;
                        }
                        let s = a[idx(nn, nn - 1)].abs() + a[idx(nn - 1, nn - 2)].abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    let mut m = nn - 2;
                    while m >= l {
                        z = a[idx(m, m)];
                        let rr = x - z;
                        let ss = y - z;
                        p = (rr * ss - w) / a[idx(m + 1, m)] + a[idx(m, m + 1)];
                        q = a[idx(m + 1, m + 1)] - z - rr - ss;
                        r = a[idx(m + 2, m + 1)];
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a[idx(m, m - 1)].abs() * (q.abs() + r.abs());
                        let v = p.abs()
                            * (a[idx(m - 1, m - 1)].abs() + z.abs() + a[idx(m + 1, m + 1)].abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m + 2..=nn {
                        a[idx(i, i - 2)] = 0.0;
                        if i != m + 2 {
                            a[idx(i, i - 3)] = 0.0;
                        }
                    }
                    let mut k = m;
                    while k < nn {
                        if k != m {
                            p = a[idx(k, k - 1)];
                            q = a[idx(k + 1, k - 1)];
                            r = 0.0;
                            if k != nn - 1 {
                                r = a[idx(k + 2, k - 1)];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign(sqrt(p * p + q * q + r * r), p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    a[idx(k, k - 1)] = -a[idx(k, k - 1)];
                                }
                            } else {
                                a[idx(k, k - 1)] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                p = a[idx(k, j)] + q * a[idx(k + 1, j)];
                                if k != nn - 1 {
                                    p += r * a[idx(k + 2, j)];
                                    a[idx(k + 2, j)] -= p * z;
                                }
                                a[idx(k + 1, j)] -= p * y;
                                a[idx(k, j)] -= p * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                p = x * a[idx(i, k)] + y * a[idx(i, k + 1)];
                                if k != nn - 1 {
                                    p += z * a[idx(i, k + 2)];
                                    a[idx(i, k + 2)] -= p * r;
                                }
                                a[idx(i, k + 1)] -= p * q;
                                a[idx(i, k)] -= p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if l >= nn - 1 {
                break;
            }
        }
    }
    Ok(out)
}

/// Eigenvalues of a general dense matrix (copied).
pub(crate) fn eigenvalues(a: &Dense) -> Result<Vec<Complex64>> {
    let mut h = a.clone();
    reduce_to_hessenberg(&mut h);
    hessenberg_eigenvalues(&mut h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    fn random_dense(n: usize, seed: u64) -> Dense {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut d = Dense::zeros(n);
        for x in d.data.iter_mut() {
            *x = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
        }
        d
    }

    #[test]
    fn hessenberg_reduction_preserves_similarity_invariants() {
        let a = random_dense(9, 1);
        let mut h = a.clone();
        reduce_to_hessenberg(&mut h);
        for i in 2..9 {
            for j in 0..i - 1 {
                assert_eq!(h.at(i, j), 0.0);
            }
        }
        let trace = |d: &Dense| (0..d.n).map(|i| d.at(i, i)).sum::<f64>();
        assert!((trace(&a) - trace(&h)).abs() < 1e-13);
        let fro = |d: &Dense| d.data.iter().map(|x| x * x).sum::<f64>();
        assert!((fro(&a) - fro(&h)).abs() < 1e-12);
    }

    #[test]
    fn companion_matrix_roots() {
        // x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3)
        let mut c = Dense::zeros(3);
        c.data = vec![6.0, -11.0, 6.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        let ev = sorted(eigenvalues(&c).unwrap());
        for (e, want) in ev.iter().zip([1.0, 2.0, 3.0]) {
            assert!((e.re - want).abs() < 1e-12 && e.im == 0.0);
        }
        // x^2 + 1
        let mut r = Dense::zeros(2);
        r.data = vec![0.0, -1.0, 1.0, 0.0];
        let ev = eigenvalues(&r).unwrap();
        assert_eq!(ev[0], Complex64::new(0.0, 1.0));
        assert_eq!(ev[1], Complex64::new(0.0, -1.0));
    }

    #[test]
    fn agrees_with_nalgebra_on_random_matrices() {
        for (n, seed) in [(1, 3), (4, 4), (17, 5), (40, 6), (80, 7)] {
            let a = random_dense(n, seed);
            let ours = sorted(eigenvalues(&a).unwrap());
            let m = DMatrix::from_row_slice(n, n, &a.data);
            let theirs = sorted(m.complex_eigenvalues().iter().copied().collect());
            for (x, y) in ours.iter().zip(&theirs) {
                assert!((x - y).norm() < 1e-9, "n = {n}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn conjugate_pairs_are_adjacent() {
        let a = random_dense(30, 11);
        let ev = eigenvalues(&a).unwrap();
        let mut i = 0;
        while i < ev.len() {
            if ev[i].im != 0.0 {
                assert!(ev[i].im > 0.0);
                assert_eq!(ev[i + 1], ev[i].conj());
                i += 2;
            } else {
                i += 1;
            }
        }
    }
}
