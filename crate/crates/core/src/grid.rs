//! Uniform cell-centered mesh of a rectangle and the five-point Laplacian
//! with homogeneous Dirichlet data.
//!
//! Cell `(i, j)` (1-based, `i` along x) has center `((i - 1/2) dx, (j - 1/2) dy)`
//! and flat index `k = (j - 1) * nx + (i - 1)`, so x varies fastest. Values
//! outside the interior are ghost zeros.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    lx: f64,
    ly: f64,
    nx: usize,
    ny: usize,
}

impl GridSpec {
    pub fn new(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(lx > 0.0 && lx.is_finite()) || !(ly > 0.0 && ly.is_finite()) {
            return Err(invalid!(
                "domain lengths must be positive, got ({lx}, {ly})"
            ));
        }
        if nx == 0 || ny == 0 {
            return Err(invalid!("cell counts must be at least 1, got ({nx}, {ny})"));
        }
        // Room for both fields plus the largest generator we may assemble.
        if nx.checked_mul(ny).and_then(|n| n.checked_mul(2)).is_none() {
            return Err(Error::Capacity(format!(
                "{nx}x{ny} grid overflows the index type"
            )));
        }
        Ok(Self { lx, ly, nx, ny })
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    /// Unknowns per scalar field.
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat index of the 1-based cell `(i, j)`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!((1..=self.nx).contains(&i) && (1..=self.ny).contains(&j));
        (j - 1) * self.nx + (i - 1)
    }

    /// Inverse of [`GridSpec::index`].
    pub fn cell(&self, k: usize) -> (usize, usize) {
        (k % self.nx + 1, k / self.nx + 1)
    }

    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        ((i as f64 - 0.5) * self.dx(), (j as f64 - 0.5) * self.dy())
    }

    /// Cell centers in flat-index order.
    pub fn centers(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (1..=self.ny).flat_map(move |j| (1..=self.nx).map(move |i| self.center(i, j)))
    }

    /// Matrix-free application of the discrete Laplacian.
    pub fn apply_laplacian(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.len() {
            return Err(invalid!(
                "field has {} values, grid has {} cells",
                u.len(),
                self.len()
            ));
        }
        let (nx, ny) = (self.nx, self.ny);
        let cx = 1.0 / (self.dx() * self.dx());
        let cy = 1.0 / (self.dy() * self.dy());
        let mut out = vec![0.0; u.len()];
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                let west = if i > 0 { u[k - 1] } else { 0.0 };
                let east = if i + 1 < nx { u[k + 1] } else { 0.0 };
                let south = if j > 0 { u[k - nx] } else { 0.0 };
                let north = if j + 1 < ny { u[k + nx] } else { 0.0 };
                // Column order, matching a CSR row product bit for bit.
                out[k] = (((cy * south + cx * west) + (-2.0 * cx - 2.0 * cy) * u[k]) + cx * east)
                    + cy * north;
            }
        }
        Ok(out)
    }

    /// Assembled form of [`GridSpec::apply_laplacian`].
    pub fn laplacian_matrix(&self) -> CsrMatrix {
        let (nx, ny) = (self.nx, self.ny);
        let cx = 1.0 / (self.dx() * self.dx());
        let cy = 1.0 / (self.dy() * self.dy());
        let mut triplets = Vec::with_capacity(5 * self.len());
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                if j > 0 {
                    triplets.push((k, k - nx, cy));
                }
                if i > 0 {
                    triplets.push((k, k - 1, cx));
                }
                triplets.push((k, k, -2.0 * cx - 2.0 * cy));
                if i + 1 < nx {
                    triplets.push((k, k + 1, cx));
                }
                if j + 1 < ny {
                    triplets.push((k, k + nx, cy));
                }
            }
        }
        CsrMatrix::from_triplets(self.len(), self.len(), &triplets)
            .expect("stencil indices are in range")
    }
}
