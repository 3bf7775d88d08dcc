//! Mass, stiffness and damping operators of the semi-discrete equations of
//! motion, the factored left-hand side of the time step, and the first-order
//! generator matrix used for spectral analysis.
//!
//! Both fields share one grid; a mixture vector stacks the `u` block (first
//! `nx * ny` entries) on top of the `v` block.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::sync::atomic::{AtomicUsize, Ordering};

use crate::banded::{BandedSolver, FactorKind};
use crate::error::{invalid, Error, Result};
use crate::grid::GridSpec;
use crate::integrator::NewmarkParams;
use crate::math::{powf, sin};
use crate::sparse::CsrMatrix;

/// Physical coefficients of the damped mixture system.
///
/// `coupling` is the zero-order exchange coefficient in `coupling * (u - v)`;
/// `order` is the fractional order of the damping and `eta` its exponential
/// weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    pub rho1: f64,
    pub rho2: f64,
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
    pub coupling: f64,
    pub order: f64,
    pub eta: f64,
}

impl MaterialParams {
    /// Validates ranges. An indefinite elasticity matrix is accepted (see
    /// [`MaterialParams::elasticity_ok`]) but logged as a warning.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        rho1: f64,
        rho2: f64,
        a11: f64,
        a12: f64,
        a22: f64,
        coupling: f64,
        order: f64,
        eta: f64,
    ) -> Result<Self> {
        let p = Self {
            rho1,
            rho2,
            a11,
            a12,
            a22,
            coupling,
            order,
            eta,
        };
        p.validate()?;
        if !p.elasticity_ok() {
            log::warn!(
                "elasticity matrix [[{a11}, {a12}], [{a12}, {a22}]] is not positive definite \
                 (a11 = {a11}, a11*a22 - a12^2 = {}); the undamped problem is ill-posed and \
                 solutions may grow without bound",
                a11 * a22 - a12 * a12
            );
        }
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.rho1,
            self.rho2,
            self.a11,
            self.a12,
            self.a22,
            self.coupling,
            self.order,
            self.eta,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return Err(invalid!("material parameters must be finite"));
        }
        if !(self.rho1 > 0.0 && self.rho2 > 0.0) {
            return Err(invalid!("densities must be positive"));
        }
        if !(self.order > 0.0 && self.order < 1.0) {
            return Err(invalid!(
                "fractional order must lie in (0, 1), got {}",
                self.order
            ));
        }
        if self.eta < 0.0 {
            return Err(invalid!("eta must be non-negative, got {}", self.eta));
        }
        if self.coupling < 0.0 {
            return Err(invalid!(
                "coupling must be non-negative, got {}",
                self.coupling
            ));
        }
        Ok(())
    }

    /// `a11 > 0` and `a11 a22 - a12^2 > 0`.
    pub fn elasticity_ok(&self) -> bool {
        self.a11 > 0.0 && self.a11 * self.a22 - self.a12 * self.a12 > 0.0
    }
}

/// Truncated quadrature of the diffusive representation: nodes
/// `xi_l = l * spacing` for `l = 1..=M`, kernel weights
/// `mu_l = xi_l^((2 order - 1) / 2)` and the constant `sin(order pi) / pi`.
///
/// Only the positive half-line is stored; the symmetric factor 2 is applied
/// wherever the quadrature is used.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusiveGrid {
    order: f64,
    spacing: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    constant: f64,
}

impl DiffusiveGrid {
    pub fn new(order: f64, modes: usize, spacing: f64) -> Result<Self> {
        if modes == 0 {
            return Err(invalid!("at least one diffusive mode is required"));
        }
        let mut grid = Self::empty(order)?;
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(invalid!("mode spacing must be positive, got {spacing}"));
        }
        let exponent = (2.0 * order - 1.0) / 2.0;
        grid.spacing = spacing;
        grid.nodes = (1..=modes).map(|l| l as f64 * spacing).collect();
        grid.weights = grid.nodes.iter().map(|&xi| powf(xi, exponent)).collect();
        Ok(grid)
    }

    /// A grid with no modes: damping switched off.
    pub fn empty(order: f64) -> Result<Self> {
        if !(order > 0.0 && order < 1.0) {
            return Err(invalid!("fractional order must lie in (0, 1), got {order}"));
        }
        Ok(Self {
            order,
            spacing: 0.0,
            nodes: Vec::new(),
            weights: Vec::new(),
            constant: sin(order * PI) / PI,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `sin(order pi) / pi`
    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// Largest resolved frequency, `M * spacing`.
    pub fn truncation_radius(&self) -> f64 {
        self.len() as f64 * self.spacing
    }

    /// Relaxation rate `xi_l^2 + eta` of mode `l` (0-based).
    pub fn relaxation(&self, l: usize, eta: f64) -> f64 {
        self.nodes[l] * self.nodes[l] + eta
    }

    /// Scalar `c` of the folded damping matrix `c * I`:
    /// `dt * C * sum_l 2 mu_l^2 dxi / (2 + dt (xi_l^2 + eta))`.
    pub fn damping_coefficient(&self, dt: f64, eta: f64) -> f64 {
        let sum: f64 = (0..self.len())
            .map(|l| {
                let mu = self.weights[l];
                2.0 * mu * mu * self.spacing / (2.0 + dt * self.relaxation(l, eta))
            })
            .sum();
        dt * self.constant * sum
    }
}

/// `diag(rho1 I, rho2 I)` as a vector.
pub fn assemble_mass(p: &MaterialParams, g: &GridSpec) -> Vec<f64> {
    let n = g.len();
    let mut m = vec![p.rho1; 2 * n];
    m[n..].fill(p.rho2);
    m
}

/// Block stiffness `-[[a11 L, a12 L], [a12 L, a22 L]] + coupling [[I, -I], [-I, I]]`
/// with `L` the grid Laplacian.
pub fn assemble_stiffness(p: &MaterialParams, g: &GridSpec) -> CsrMatrix {
    let n = g.len();
    let lap = g.laplacian_matrix();
    let mut triplets = Vec::with_capacity(4 * lap.nnz() + 4 * n);
    for k in 0..n {
        for (m, v) in lap.row(k) {
            triplets.push((k, m, -(p.a11 * v)));
            triplets.push((k, n + m, -(p.a12 * v)));
            triplets.push((n + k, m, -(p.a12 * v)));
            triplets.push((n + k, n + m, -(p.a22 * v)));
        }
        if p.coupling != 0.0 {
            triplets.push((k, k, p.coupling));
            triplets.push((k, n + k, -p.coupling));
            triplets.push((n + k, k, -p.coupling));
            triplets.push((n + k, n + k, p.coupling));
        }
    }
    CsrMatrix::from_triplets(2 * n, 2 * n, &triplets).expect("block indices are in range")
}

/// Interleaves the `u` and `v` blocks so that the two unknowns of one cell
/// are adjacent; this shrinks the band of `K` from `nx * ny` to about `2 nx`.
fn interleave(n: usize) -> Vec<usize> {
    (0..2 * n)
        .map(|i| if i < n { 2 * i } else { 2 * (i - n) + 1 })
        .collect()
}

/// Everything a time step needs, assembled and factored once.
#[derive(Debug)]
pub struct OperatorSet {
    grid: GridSpec,
    params: MaterialParams,
    newmark: NewmarkParams,
    mass: Vec<f64>,
    stiffness: CsrMatrix,
    damping: f64,
    system: CsrMatrix,
    solver: BandedSolver,
    factorizations: AtomicUsize,
    solves: AtomicUsize,
}

impl OperatorSet {
    /// Assembles `M`, `K`, the damping scalar and factors
    /// `M + gamma dt C_augm + beta dt^2 K`.
    pub fn new(
        params: &MaterialParams,
        grid: &GridSpec,
        modes: &DiffusiveGrid,
        newmark: &NewmarkParams,
    ) -> Result<Self> {
        params.validate()?;
        let mass = assemble_mass(params, grid);
        let stiffness = assemble_stiffness(params, grid);
        let (beta, gamma, dt) = (newmark.beta(), newmark.gamma(), newmark.dt());
        let damping = modes.damping_coefficient(dt, params.eta);
        let lhs_diag: Vec<f64> = mass.iter().map(|m| m + gamma * dt * damping).collect();
        let system =
            CsrMatrix::diagonal(&lhs_diag).linear_combination(1.0, &stiffness, beta * dt * dt)?;
        let solver =
            BandedSolver::new(&system, Some(interleave(grid.len()))).map_err(|e| match e {
                Error::NumericalBreakdown { reason, .. } => Error::NumericalBreakdown {
                    step: 0,
                    reason: format!("factoring the step matrix: {reason}"),
                },
                other => other,
            })?;
        if solver.kind() == FactorKind::Lu {
            log::info!("step matrix is not positive definite; using pivoted band LU");
        }
        Ok(Self {
            grid: *grid,
            params: *params,
            newmark: *newmark,
            mass,
            stiffness,
            damping,
            system,
            solver,
            factorizations: AtomicUsize::new(1),
            solves: AtomicUsize::new(0),
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn params(&self) -> &MaterialParams {
        &self.params
    }

    pub fn newmark(&self) -> &NewmarkParams {
        &self.newmark
    }

    /// Diagonal of `M`.
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn stiffness(&self) -> &CsrMatrix {
        &self.stiffness
    }

    /// The scalar `c` with `C_augm = c I`.
    pub fn damping(&self) -> f64 {
        self.damping
    }

    pub fn system_matrix(&self) -> &CsrMatrix {
        &self.system
    }

    pub fn uses_cholesky(&self) -> bool {
        self.solver.kind() == FactorKind::Cholesky
    }

    /// Solves with the cached factorization, overwriting `rhs`.
    pub fn solve_in_place(&self, rhs: &mut [f64], work: &mut Vec<f64>) {
        self.solves.fetch_add(1, Ordering::Relaxed);
        self.solver.solve_in_place(rhs, work);
    }

    /// Number of factorizations performed for this operator set.
    pub fn factorization_count(&self) -> usize {
        self.factorizations.load(Ordering::Relaxed)
    }

    pub fn solve_count(&self) -> usize {
        self.solves.load(Ordering::Relaxed)
    }
}

/// First-order generator over the state `(U, U', Phi_1, .., Phi_M)`, each
/// block of size `2 nx ny`:
///
/// ```text
/// [ 0          I     0                  ..  0                  ]
/// [ -M^-1 K    0     -C dxi mu_1 M^-1   ..  -C dxi mu_M M^-1   ]
/// [ 0          mu_1  -(xi_1^2 + eta)    ..  0                  ]
/// [ ..                                                          ]
/// [ 0          mu_M  0                  ..  -(xi_M^2 + eta)    ]
/// ```
///
/// With `modes = None` (or an empty grid) this is the undamped wave operator
/// `[[0, I], [-M^-1 K, 0]]` of size `4 nx ny`.
pub fn assemble_generator(
    params: &MaterialParams,
    grid: &GridSpec,
    modes: Option<&DiffusiveGrid>,
) -> Result<CsrMatrix> {
    params.validate()?;
    let n2 = 2 * grid.len();
    let m = modes.map_or(0, DiffusiveGrid::len);
    let size = (m + 2)
        .checked_mul(n2)
        .ok_or_else(|| Error::Capacity(format!("generator with {m} modes overflows")))?;
    let mass = assemble_mass(params, grid);
    let stiffness = assemble_stiffness(params, grid);

    let mut triplets = Vec::with_capacity(n2 * (1 + 2 * m) + stiffness.nnz() + m * n2);
    for i in 0..n2 {
        triplets.push((i, n2 + i, 1.0));
    }
    for i in 0..n2 {
        let inv_mass = 1.0 / mass[i];
        for (j, v) in stiffness.row(i) {
            triplets.push((n2 + i, j, -v * inv_mass));
        }
    }
    if let Some(d) = modes {
        let c = d.constant() * d.spacing();
        for l in 0..m {
            let mu = d.weights()[l];
            let relax = d.relaxation(l, params.eta);
            let block = (2 + l) * n2;
            for i in 0..n2 {
                triplets.push((n2 + i, block + i, -c * mu / mass[i]));
                triplets.push((block + i, n2 + i, mu));
                triplets.push((block + i, block + i, -relax));
            }
        }
    }
    CsrMatrix::from_triplets(size, size, &triplets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{DMatrix, SymmetricEigen};

    fn na(m: faer::Mat<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    fn params(a11: f64, a12: f64, a22: f64, coupling: f64) -> MaterialParams {
        MaterialParams::new(1.0, 1.0, a11, a12, a22, coupling, 0.5, 0.0).unwrap()
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn paper_mode_grid() {
        let d = DiffusiveGrid::new(0.5, 1000, 0.1).unwrap();
        assert_eq!(d.len(), 1000);
        assert_relative_eq!(d.nodes()[0], 0.1);
        assert_relative_eq!(d.nodes()[999], 100.0, max_relative = 1e-14);
        assert!(d.weights().iter().all(|&w| w == 1.0));
        assert_relative_eq!(d.constant(), 0.318_309_886_183_790_7, max_relative = 1e-15);
    }

    #[test]
    fn single_mode_grid() {
        let d = DiffusiveGrid::new(0.5, 1, 1.0).unwrap();
        assert_eq!(d.nodes(), &[1.0]);
        assert_eq!(d.weights(), &[1.0]);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn quarter_order_weights() {
        let d = DiffusiveGrid::new(0.25, 2, 2.0).unwrap();
        assert_eq!(d.nodes(), &[2.0, 4.0]);
        assert_relative_eq!(
            d.weights()[0],
            0.840_896_415_253_714_5,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            d.weights()[1],
            0.707_106_781_186_547_6,
            max_relative = 1e-14
        );
    }

    #[test]
    fn weight_monotonicity_follows_order() {
        for (order, sign) in [(0.2, -1.0), (0.5, 0.0), (0.8, 1.0)] {
            let d = DiffusiveGrid::new(order, 20, 0.3).unwrap();
            for w in d.weights().windows(2) {
                let diff: f64 = w[1] - w[0];
                if sign == 0.0 {
                    assert_eq!(diff, 0.0);
                } else {
                    assert!(diff * sign > 0.0);
                }
            }
        }
    }

    #[test]
    fn constant_is_bounded_by_inverse_pi() {
        for order in [0.01, 0.25, 0.5, 0.75, 0.99] {
            let c = DiffusiveGrid::empty(order).unwrap().constant();
            assert!(c > 0.0 && c <= 1.0 / PI + 1e-16);
        }
    }

    #[test]
    fn bad_mode_grids_rejected() {
        assert!(DiffusiveGrid::new(0.0, 3, 1.0).is_err());
        assert!(DiffusiveGrid::new(1.0, 3, 1.0).is_err());
        assert!(DiffusiveGrid::new(0.5, 0, 1.0).is_err());
        assert!(DiffusiveGrid::new(0.5, 3, 0.0).is_err());
    }

    #[test]
    fn material_validation() {
        assert!(MaterialParams::new(0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.5, 0.0).is_err());
        assert!(MaterialParams::new(1.0, 1.0, 1.0, 0.0, 1.0, -1.0, 0.5, 0.0).is_err());
        assert!(MaterialParams::new(1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 1.5, 0.0).is_err());
        assert!(MaterialParams::new(1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.5, -0.1).is_err());
        // Indefinite elasticity is accepted and flagged.
        let p = MaterialParams::new(1.0, 1.0, 0.1, -0.5, 0.1, 1.0, 0.5, 0.0).unwrap();
        assert!(!p.elasticity_ok());
        assert!(params(1.0, 0.1, 1.0, 1.0).elasticity_ok());
    }

    #[test]
    fn mass_blocks() {
        let g = GridSpec::new(1.0, 1.0, 1, 1).unwrap();
        let p = MaterialParams::new(2.0, 3.0, 1.0, 0.0, 1.0, 0.0, 0.5, 0.0).unwrap();
        assert_eq!(assemble_mass(&p, &g), vec![2.0, 3.0]);
        let g = GridSpec::new(1.0, 1.0, 3, 2).unwrap();
        assert_eq!(
            assemble_mass(&params(1.0, 0.0, 1.0, 0.0), &g),
            vec![1.0; 12]
        );
    }

    #[test]
    fn decoupled_stiffness_is_block_laplacian() {
        let g = GridSpec::new(1.0, 1.0, 3, 3).unwrap();
        let k = assemble_stiffness(&params(1.0, 0.0, 1.0, 0.0), &g);
        let lap = g.laplacian_matrix();
        let n = g.len();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(k.get(i, j), -lap.get(i, j));
                assert_eq!(k.get(n + i, n + j), -lap.get(i, j));
                assert_eq!(k.get(i, n + j), 0.0);
            }
        }
    }

    #[test]
    fn single_cell_stiffness_with_coupling() {
        let g = GridSpec::new(1.0, 1.0, 1, 1).unwrap();
        let k = assemble_stiffness(&params(1.0, 0.0, 1.0, 1.0), &g);
        let d = na(k.to_dense(4).unwrap());
        assert_eq!(d.as_slice(), &[5.0, -1.0, -1.0, 5.0]);
    }

    #[test]
    fn stiffness_quadratic_form_term_by_term() {
        // Independent evaluation through stencil applications.
        let g = GridSpec::new(1.0, 2.0, 4, 3).unwrap();
        let p = MaterialParams::new(1.0, 1.0, 1.3, -0.4, 0.9, 0.7, 0.5, 0.0).unwrap();
        let k = assemble_stiffness(&p, &g);
        let n = g.len();
        let u: Vec<f64> = (0..n).map(|i| (i as f64 * 1.7).sin()).collect();
        let v: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3 + 1.0).cos()).collect();
        let lu = g.apply_laplacian(&u).unwrap();
        let lv = g.apply_laplacian(&v).unwrap();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let expected = -p.a11 * dot(&u, &lu) - 2.0 * p.a12 * dot(&u, &lv) - p.a22 * dot(&v, &lv)
            + p.coupling
                * u.iter()
                    .zip(&v)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>();
        let mut w = u.clone();
        w.extend_from_slice(&v);
        let got = dot(&w, &k.mul_vec(&w));
        assert_relative_eq!(got, expected, max_relative = 1e-12);
    }

    #[test]
    fn stiffness_symmetric_and_psd_for_valid_elasticity() {
        for (nx, ny) in [(2, 2), (4, 4), (8, 8), (5, 3)] {
            let g = GridSpec::new(1.0, 1.0, nx, ny).unwrap();
            let k = assemble_stiffness(&params(1.0, 0.1, 1.0, 1.0), &g);
            assert!(k.is_symmetric());
            let eig = SymmetricEigen::new(na(k.to_dense(256).unwrap())).eigenvalues;
            let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
            assert!(min >= -1e-10 * k.norm_inf());
        }
    }

    #[test]
    fn damping_coefficient_by_hand() {
        let d = DiffusiveGrid::new(0.5, 1, 1.0).unwrap();
        assert_relative_eq!(
            d.damping_coefficient(1.0, 0.0),
            2.0 / (3.0 * PI),
            max_relative = 1e-15
        );
        assert_eq!(
            DiffusiveGrid::empty(0.5)
                .unwrap()
                .damping_coefficient(0.1, 0.0),
            0.0
        );
    }

    #[test]
    fn damping_coefficient_grows_with_modes_and_is_bounded() {
        let dt = 0.01;
        let mut last = 0.0;
        for m in 1..40 {
            let d = DiffusiveGrid::new(0.3, m, 0.25).unwrap();
            let c = d.damping_coefficient(dt, 0.5);
            assert!(c > last);
            last = c;
            let bound: f64 =
                d.weights().iter().map(|w| w * w * d.spacing()).sum::<f64>() * d.constant();
            assert!(c / dt <= bound);
        }
    }

    #[test]
    fn operator_set_counts_one_factorization() {
        let g = GridSpec::new(1.0, 1.0, 4, 4).unwrap();
        let p = params(1.0, 0.1, 1.0, 1.0);
        let d = DiffusiveGrid::new(0.5, 5, 0.5).unwrap();
        let np = NewmarkParams::new(0.25, 0.5, 0.01).unwrap();
        let ops = OperatorSet::new(&p, &g, &d, &np).unwrap();
        assert!(ops.uses_cholesky());
        assert_eq!(ops.factorization_count(), 1);
        assert_eq!(ops.mass(), &vec![1.0; 32][..]);
        assert!(ops.system_matrix().is_symmetric());
        let mut rhs: Vec<f64> = (0..32).map(|i| i as f64).collect();
        let b = rhs.clone();
        ops.solve_in_place(&mut rhs, &mut Vec::new());
        let back = ops.system_matrix().mul_vec(&rhs);
        for (x, y) in back.iter().zip(&b) {
            assert_relative_eq!(x, y, epsilon = 1e-11);
        }
        assert_eq!(ops.solve_count(), 1);
    }

    #[test]
    fn indefinite_elasticity_still_factors() {
        let g = GridSpec::new(1.0, 1.0, 20, 20).unwrap();
        let p = params(0.1, -0.5, 0.1, 1.0);
        let np = NewmarkParams::new(0.25, 0.5, 0.1).unwrap();
        let ops = OperatorSet::new(&p, &g, &DiffusiveGrid::empty(0.5).unwrap(), &np).unwrap();
        assert!(!ops.uses_cholesky());
    }

    #[test]
    fn generator_block_layout() {
        let g = GridSpec::new(1.0, 1.0, 1, 1).unwrap();
        let p = MaterialParams::new(2.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.5, 0.3).unwrap();
        let d = DiffusiveGrid::new(0.5, 1, 1.0).unwrap();
        let a = na(assemble_generator(&p, &g, Some(&d))
            .unwrap()
            .to_dense(64)
            .unwrap());
        assert_eq!(a.nrows(), 6);
        // velocity map
        assert_eq!(a[(0, 2)], 1.0);
        assert_eq!(a[(1, 3)], 1.0);
        // -M^-1 K with K = diag(4, 4), rho1 = 2
        assert_eq!(a[(2, 0)], -2.0);
        assert_eq!(a[(3, 1)], -4.0);
        // damping block, mass-normalized
        assert_relative_eq!(a[(2, 4)], -1.0 / PI / 2.0);
        assert_relative_eq!(a[(3, 5)], -1.0 / PI);
        // mode rows
        assert_eq!(a[(4, 2)], 1.0);
        assert_eq!(a[(4, 4)], -1.3);
        let undamped = assemble_generator(&p, &g, None).unwrap();
        assert_eq!(undamped.nrows(), 4);
    }
}
