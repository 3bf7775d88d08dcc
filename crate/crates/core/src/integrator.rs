//! Newmark-beta time stepping for the displacements coupled to a
//! Crank-Nicolson update of the diffusive modes, with energy monitoring.
//!
//! The mode update is folded into the momentum balance, so each step is one
//! solve with the matrix `M + gamma dt c I + beta dt^2 K` factored once in
//! [`OperatorSet`]. With `(beta, gamma) = (1/4, 1/2)` and a consistent
//! initial acceleration the quadrature energy satisfies
//!
//! ```text
//! E^{n+1} - E^n = -2 dt C dxi sum_l (xi_l^2 + eta) |Phi_l^{n+1/2}|^2
//! ```
//!
//! so it is conserved without damping and non-increasing with it.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::math::{axpy, dot};
use crate::operators::{DiffusiveGrid, OperatorSet};
use crate::sparse::LinearOperator;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewmarkParams {
    beta: f64,
    gamma: f64,
    dt: f64,
}

impl NewmarkParams {
    pub fn new(beta: f64, gamma: f64, dt: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&beta) {
            return Err(invalid!("Newmark beta must lie in [0, 1/2], got {beta}"));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(invalid!("Newmark gamma must lie in [0, 1], got {gamma}"));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid!("time step must be positive, got {dt}"));
        }
        Ok(Self { beta, gamma, dt })
    }

    /// Average acceleration, `(1/4, 1/2)`.
    pub fn average_acceleration(dt: f64) -> Result<Self> {
        Self::new(0.25, 0.5, dt)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }
}

/// Discrete state at `t = step * dt`.
///
/// `u`, `v`, `a` hold displacement, velocity and acceleration with the first
/// field's block before the second's. `phi` holds the modes one after the
/// other, each laid out like `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub a: Vec<f64>,
    pub phi: Vec<f64>,
    pub step: usize,
    pub t: f64,
}

impl SimState {
    pub fn dofs(&self) -> usize {
        self.u.len()
    }

    pub fn mode(&self, l: usize) -> &[f64] {
        let n = self.dofs();
        &self.phi[l * n..(l + 1) * n]
    }

    /// Displacement of the first field.
    pub fn first(&self) -> &[f64] {
        &self.u[..self.dofs() / 2]
    }

    /// Displacement of the second field.
    pub fn second(&self) -> &[f64] {
        &self.u[self.dofs() / 2..]
    }
}

/// Which discrete mode energy to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnergyVariant {
    /// `C dxi sum_l |Phi_l|^2`, the quadrature of the continuous mode energy.
    #[default]
    Quadrature,
    /// `C/2 sum_l mu_l |Phi_l|^2`.
    Paper,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord {
    pub t: f64,
    pub kinetic: f64,
    pub elastic: f64,
    pub diffusive: f64,
    pub total: f64,
    pub variant: EnergyVariant,
}

/// Receives the state at the configured cadence during [`Integrator::run`].
pub trait Observer {
    type Error;

    fn observe(&mut self, state: &SimState, energy: &EnergyRecord) -> Result<(), Self::Error>;
}

impl<F, E> Observer for F
where
    F: FnMut(&SimState, &EnergyRecord) -> Result<(), E>,
{
    type Error = E;

    fn observe(&mut self, state: &SimState, energy: &EnergyRecord) -> Result<(), E> {
        self(state, energy)
    }
}

/// Observer that does nothing.
pub struct NoObserver;

impl Observer for NoObserver {
    type Error = core::convert::Infallible;

    fn observe(&mut self, _: &SimState, _: &EnergyRecord) -> Result<(), Self::Error> {
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError<E> {
    #[error(transparent)]
    Step(#[from] Error),
    #[error("observer failed: {0}")]
    Observer(E),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub t_final: f64,
    /// Observe every `cadence` steps; the final state is always observed.
    pub cadence: usize,
    pub variant: EnergyVariant,
}

/// Time stepper bound to one factored operator set and mode grid.
#[derive(Debug)]
pub struct Integrator {
    ops: OperatorSet,
    modes: DiffusiveGrid,
    // per-mode Crank-Nicolson ratio (2 - dt a) / (2 + dt a)
    ratio: Vec<f64>,
    // per-mode velocity gain 2 dt mu / (2 + dt a)
    gain: Vec<f64>,
    rhs: Vec<f64>,
    work: Vec<f64>,
    scratch: Vec<f64>,
}

impl Integrator {
    pub fn new(ops: OperatorSet, modes: DiffusiveGrid) -> Result<Self> {
        let expected = ops.damping();
        let check = modes.damping_coefficient(ops.newmark().dt(), ops.params().eta);
        if check != expected {
            return Err(invalid!(
                "mode grid does not match the one the operators were built with"
            ));
        }
        let dt = ops.newmark().dt();
        let eta = ops.params().eta;
        let (ratio, gain) = (0..modes.len())
            .map(|l| {
                let a = modes.relaxation(l, eta);
                (
                    (2.0 - dt * a) / (2.0 + dt * a),
                    2.0 * dt * modes.weights()[l] / (2.0 + dt * a),
                )
            })
            .unzip();
        let n = ops.mass().len();
        Ok(Self {
            ops,
            modes,
            ratio,
            gain,
            rhs: vec![0.0; n],
            work: Vec::new(),
            scratch: vec![0.0; n],
        })
    }

    pub fn operators(&self) -> &OperatorSet {
        &self.ops
    }

    pub fn modes(&self) -> &DiffusiveGrid {
        &self.modes
    }

    /// Builds the state at `t = 0` from the two displacement and two velocity
    /// fields; modes start at rest and the acceleration solves
    /// `M a = -K u`.
    pub fn initialize(&self, u0: &[f64], v0: &[f64], u1: &[f64], v1: &[f64]) -> Result<SimState> {
        let n = self.ops.grid().len();
        for (name, f) in [("u0", u0), ("v0", v0), ("u1", u1), ("v1", v1)] {
            if f.len() != n {
                return Err(invalid!(
                    "{name} has {} values, grid has {n} cells",
                    f.len()
                ));
            }
        }
        let u: Vec<f64> = u0.iter().chain(v0).copied().collect();
        let v: Vec<f64> = u1.iter().chain(v1).copied().collect();
        let mut a = self.ops.stiffness().mul_vec(&u);
        for (ai, m) in a.iter_mut().zip(self.ops.mass()) {
            *ai = -*ai / m;
        }
        Ok(SimState {
            phi: vec![0.0; self.modes.len() * u.len()],
            u,
            v,
            a,
            step: 0,
            t: 0.0,
        })
    }

    /// Advances `state` by one step.
    pub fn step(&mut self, state: &mut SimState) -> Result<()> {
        let n = self.rhs.len();
        if state.u.len() != n || state.phi.len() != self.modes.len() * n {
            return Err(invalid!("state does not match the operator dimensions"));
        }
        let np = *self.ops.newmark();
        let (beta, gamma, dt) = (np.beta(), np.gamma(), np.dt());
        let c = self.ops.damping();
        let mode_scale = 2.0 * self.modes.constant() * self.modes.spacing();

        // predictor U + dt U' + (1/2 - beta) dt^2 U''
        let pred = &mut self.scratch;
        for i in 0..n {
            pred[i] = state.u[i] + dt * state.v[i] + (0.5 - beta) * dt * dt * state.a[i];
        }
        self.ops.stiffness().apply(pred, &mut self.rhs);
        for i in 0..n {
            self.rhs[i] = -self.rhs[i] - c * (2.0 * state.v[i] + (1.0 - gamma) * dt * state.a[i]);
        }
        for l in 0..self.modes.len() {
            let mu_tilde = self.modes.weights()[l] * self.ratio[l];
            axpy(
                -mode_scale * mu_tilde,
                &state.phi[l * n..(l + 1) * n],
                &mut self.rhs,
            );
        }

        self.ops.solve_in_place(&mut self.rhs, &mut self.work);
        let a_new = &self.rhs;
        if let Some(i) = a_new.iter().position(|x| !x.is_finite()) {
            return Err(Error::NumericalBreakdown {
                step: state.step + 1,
                reason: format!("non-finite acceleration at unknown {i}"),
            });
        }

        // scratch <- U'^{n+1/2}
        for i in 0..n {
            let v_new = state.v[i] + (1.0 - gamma) * dt * state.a[i] + gamma * dt * a_new[i];
            state.u[i] +=
                dt * state.v[i] + (0.5 - beta) * dt * dt * state.a[i] + beta * dt * dt * a_new[i];
            self.scratch[i] = 0.5 * (state.v[i] + v_new);
            state.v[i] = v_new;
            state.a[i] = a_new[i];
        }
        for l in 0..self.modes.len() {
            let (r, g) = (self.ratio[l], self.gain[l]);
            for (p, vh) in state.phi[l * n..(l + 1) * n].iter_mut().zip(&self.scratch) {
                *p = r * *p + g * vh;
            }
        }
        state.step += 1;
        state.t = state.step as f64 * dt;
        Ok(())
    }

    pub fn energy(&self, state: &SimState, variant: EnergyVariant) -> EnergyRecord {
        let n = state.u.len();
        let kinetic = 0.5
            * state
                .v
                .iter()
                .zip(self.ops.mass())
                .map(|(v, m)| m * v * v)
                .sum::<f64>();
        let ku = self.ops.stiffness().mul_vec(&state.u);
        let elastic = 0.5 * dot(&state.u, &ku);
        let diffusive = (0..self.modes.len())
            .map(|l| {
                let phi = &state.phi[l * n..(l + 1) * n];
                let norm2 = dot(phi, phi);
                match variant {
                    EnergyVariant::Quadrature => self.modes.spacing() * norm2,
                    EnergyVariant::Paper => 0.5 * self.modes.weights()[l] * norm2,
                }
            })
            .sum::<f64>()
            * self.modes.constant();
        EnergyRecord {
            t: state.t,
            kinetic,
            elastic,
            diffusive,
            total: kinetic + elastic + diffusive,
            variant,
        }
    }

    /// Steps until `t_final`, observing at the cadence, and returns the
    /// observed energy series (the initial state included).
    pub fn run<O: Observer>(
        &mut self,
        state: &mut SimState,
        options: &RunOptions,
        observer: &mut O,
    ) -> Result<Vec<EnergyRecord>, RunError<O::Error>> {
        let dt = self.ops.newmark().dt();
        if options.cadence == 0 {
            return Err(invalid!("observer cadence must be at least 1").into());
        }
        let remaining = (options.t_final - state.t) / dt;
        if !(remaining > -1e-9) || !remaining.is_finite() {
            return Err(invalid!(
                "final time {} precedes the current time {}",
                options.t_final,
                state.t
            )
            .into());
        }
        // Tolerate round-off in t_final / dt.
        let steps = libm::ceil(remaining - 1e-9).max(0.0) as usize;
        let mut series = Vec::with_capacity(steps / options.cadence + 2);
        let record = self.energy(state, options.variant);
        observer
            .observe(state, &record)
            .map_err(RunError::Observer)?;
        series.push(record);
        for k in 1..=steps {
            self.step(state)?;
            if k % options.cadence == 0 || k == steps {
                let record = self.energy(state, options.variant);
                observer
                    .observe(state, &record)
                    .map_err(RunError::Observer)?;
                series.push(record);
            }
        }
        Ok(series)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::initial::Profile;
    use crate::operators::MaterialParams;
    use approx::assert_relative_eq;

    fn integrator(g: &GridSpec, p: &MaterialParams, modes: DiffusiveGrid, dt: f64) -> Integrator {
        let np = NewmarkParams::average_acceleration(dt).unwrap();
        let ops = OperatorSet::new(p, g, &modes, &np).unwrap();
        Integrator::new(ops, modes).unwrap()
    }

    fn valid(order: f64, eta: f64) -> MaterialParams {
        MaterialParams::new(1.0, 1.0, 1.0, 0.1, 1.0, 1.0, order, eta).unwrap()
    }

    #[test]
    fn newmark_ranges() {
        assert!(NewmarkParams::new(0.6, 0.5, 0.1).is_err());
        assert!(NewmarkParams::new(0.25, 1.5, 0.1).is_err());
        assert!(NewmarkParams::new(0.25, 0.5, 0.0).is_err());
        let np = NewmarkParams::average_acceleration(0.01).unwrap();
        assert_eq!((np.beta(), np.gamma()), (0.25, 0.5));
    }

    #[test]
    fn zero_state_stays_zero() {
        let g = GridSpec::new(1.0, 1.0, 4, 4).unwrap();
        let mut it = integrator(
            &g,
            &valid(0.5, 0.0),
            DiffusiveGrid::new(0.5, 3, 1.0).unwrap(),
            0.1,
        );
        let z = vec![0.0; 16];
        let mut s = it.initialize(&z, &z, &z, &z).unwrap();
        for _ in 0..5 {
            it.step(&mut s).unwrap();
        }
        assert!(s
            .u
            .iter()
            .chain(&s.v)
            .chain(&s.a)
            .chain(&s.phi)
            .all(|&x| x == 0.0));
        let e = it.energy(&s, EnergyVariant::Quadrature);
        assert_eq!(
            (e.kinetic, e.elastic, e.diffusive, e.total),
            (0.0, 0.0, 0.0, 0.0)
        );
        assert_eq!(s.step, 5);
    }

    #[test]
    fn initial_acceleration_is_the_stencil() {
        let g = GridSpec::new(1.0, 1.0, 6, 5).unwrap();
        let p = MaterialParams::new(1.0, 1.0, 0.7, 0.0, 1.3, 0.0, 0.5, 0.0).unwrap();
        let it = integrator(&g, &p, DiffusiveGrid::empty(0.5).unwrap(), 0.01);
        let u0: Vec<f64> = (0..30).map(|k| (k as f64 * 0.4).sin()).collect();
        let v0: Vec<f64> = (0..30).map(|k| (k as f64 * 0.9).cos()).collect();
        let z = vec![0.0; 30];
        let s = it.initialize(&u0, &v0, &z, &z).unwrap();
        let lu = g.apply_laplacian(&u0).unwrap();
        let lv = g.apply_laplacian(&v0).unwrap();
        for k in 0..30 {
            assert_relative_eq!(s.a[k], 0.7 * lu[k], max_relative = 1e-13, epsilon = 1e-12);
            assert_relative_eq!(
                s.a[30 + k],
                1.3 * lv[k],
                max_relative = 1e-13,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn initialize_rejects_bad_lengths() {
        let g = GridSpec::new(1.0, 1.0, 2, 2).unwrap();
        let it = integrator(
            &g,
            &valid(0.5, 0.0),
            DiffusiveGrid::empty(0.5).unwrap(),
            0.1,
        );
        let z = vec![0.0; 4];
        assert!(matches!(
            it.initialize(&z, &z[..3], &z, &z),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn kinetic_energy_example() {
        let g = GridSpec::new(1.0, 1.0, 1, 1).unwrap();
        let p = MaterialParams::new(2.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.5, 0.0).unwrap();
        let it = integrator(&g, &p, DiffusiveGrid::empty(0.5).unwrap(), 0.1);
        let s = it.initialize(&[0.0], &[0.0], &[1.0], &[0.0]).unwrap();
        let e = it.energy(&s, EnergyVariant::Paper);
        assert_eq!(e.kinetic, 1.0);
        assert_eq!(e.total, 1.0);
    }

    #[test]
    fn diffusive_energy_variants() {
        let g = GridSpec::new(1.0, 1.0, 1, 1).unwrap();
        let modes = DiffusiveGrid::new(0.25, 2, 0.5).unwrap();
        let it = integrator(&g, &valid(0.25, 0.0), modes.clone(), 0.1);
        let mut s = it.initialize(&[0.0], &[0.0], &[0.0], &[0.0]).unwrap();
        s.phi = vec![1.0, 2.0, 3.0, 4.0];
        let c = modes.constant();
        let q = it.energy(&s, EnergyVariant::Quadrature);
        assert_relative_eq!(q.diffusive, c * 0.5 * 30.0, max_relative = 1e-15);
        let p = it.energy(&s, EnergyVariant::Paper);
        let mu = modes.weights();
        assert_relative_eq!(
            p.diffusive,
            0.5 * c * (mu[0] * 5.0 + mu[1] * 25.0),
            max_relative = 1e-15
        );
    }

    #[test]
    fn amplification_of_undamped_oscillator_has_unit_modulus() {
        // One cell, decoupled fields: u'' + 4 u = 0. The average-acceleration
        // amplification matrix on (u, v) has eigenvalues
        // (1 - w^2 dt^2/4 +- i w dt) / (1 + w^2 dt^2/4).
        let g = GridSpec::new(1.0, 1.0, 1, 1).unwrap();
        let p = MaterialParams::new(1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.5, 0.0).unwrap();
        for dt in [0.01, 0.3, 1.0, 5.0] {
            let mut it = integrator(&g, &p, DiffusiveGrid::empty(0.5).unwrap(), dt);
            let mut cols = [[0.0; 2]; 2];
            for (j, (u, v)) in [(1.0, 0.0), (0.0, 1.0)].into_iter().enumerate() {
                let mut s = it.initialize(&[u], &[0.0], &[v], &[0.0]).unwrap();
                it.step(&mut s).unwrap();
                cols[j] = [s.u[0], s.v[0]];
            }
            let (a, b, c, d) = (cols[0][0], cols[1][0], cols[0][1], cols[1][1]);
            let det: f64 = a * d - b * c;
            let tr = a + d;
            // complex pair with |lambda|^2 = det
            assert!(tr * tr < 4.0 * det);
            assert_relative_eq!(det, 1.0, max_relative = 1e-13);
            let w2dt2 = 4.0 * dt * dt;
            assert_relative_eq!(
                tr,
                2.0 * (1.0 - w2dt2 / 4.0) / (1.0 + w2dt2 / 4.0),
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn discrete_energy_identity() {
        let g = GridSpec::new(1.0, 1.0, 5, 4).unwrap();
        let modes = DiffusiveGrid::new(0.4, 6, 0.8).unwrap();
        let eta = 0.3;
        let dt = 0.02;
        let mut it = integrator(&g, &valid(0.4, eta), modes.clone(), dt);
        let u0 = Profile::Cone {
            center: [0.5, 0.5],
            radius: 0.4,
        }
        .sample(&g);
        let z = vec![0.0; 20];
        let mut s = it.initialize(&u0, &z, &z, &u0).unwrap();
        let n = 40;
        for _ in 0..30 {
            let before = s.clone();
            let e0 = it.energy(&s, EnergyVariant::Quadrature).total;
            it.step(&mut s).unwrap();
            let e1 = it.energy(&s, EnergyVariant::Quadrature).total;
            let mut loss = 0.0;
            for l in 0..modes.len() {
                let a = modes.relaxation(l, eta);
                let half: f64 = before
                    .mode(l)
                    .iter()
                    .zip(s.mode(l))
                    .map(|(p, q)| 0.25 * (p + q) * (p + q))
                    .sum();
                loss += a * half;
            }
            loss *= 2.0 * dt * modes.constant() * modes.spacing();
            assert_relative_eq!(e1 - e0, -loss, epsilon = 1e-12 * e0, max_relative = 1e-8);
            assert_eq!(s.phi.len(), modes.len() * n);
        }
    }

    #[test]
    fn time_reversal_returns_initial_state() {
        let g = GridSpec::new(1.0, 1.0, 8, 8).unwrap();
        let mut it = integrator(
            &g,
            &valid(0.5, 0.0),
            DiffusiveGrid::empty(0.5).unwrap(),
            0.01,
        );
        let u0 = Profile::Gaussian {
            center: [0.4, 0.5],
            sigma: 0.1,
            amplitude: 1.0,
        }
        .sample(&g);
        let v0 = Profile::Bump6 {
            center: [0.5, 0.6],
            radius: 0.3,
        }
        .sample(&g);
        let z = vec![0.0; 64];
        let mut s = it.initialize(&u0, &v0, &z, &v0).unwrap();
        let start = s.clone();
        for _ in 0..200 {
            it.step(&mut s).unwrap();
        }
        s.v.iter_mut().for_each(|x| *x = -*x);
        for _ in 0..200 {
            it.step(&mut s).unwrap();
        }
        let scale = start
            .u
            .iter()
            .chain(&start.v)
            .fold(0.0f64, |m, x| m.max(x.abs()));
        for (x, y) in s.u.iter().zip(&start.u) {
            assert!((x - y).abs() <= 1e-8 * scale);
        }
        for (x, y) in s.v.iter().zip(&start.v) {
            assert!((x + y).abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn run_zero_steps_and_cadence() {
        let g = GridSpec::new(1.0, 1.0, 3, 3).unwrap();
        let modes = DiffusiveGrid::new(0.5, 2, 1.0).unwrap();
        let mut it = integrator(&g, &valid(0.5, 0.0), modes, 0.01);
        let u0 = vec![1.0; 9];
        let z = vec![0.0; 9];
        let mut s = it.initialize(&u0, &z, &z, &z).unwrap();
        let opts = RunOptions {
            t_final: 0.0,
            cadence: 1,
            variant: EnergyVariant::Quadrature,
        };
        let series = it.run(&mut s, &opts, &mut NoObserver).unwrap();
        assert_eq!(series.len(), 1);

        let mut seen = Vec::new();
        let mut obs = |st: &SimState, _: &EnergyRecord| -> Result<(), ()> {
            seen.push(st.step);
            Ok(())
        };
        let opts = RunOptions {
            t_final: 0.1,
            cadence: 3,
            variant: EnergyVariant::Quadrature,
        };
        let series = it.run(&mut s, &opts, &mut obs).unwrap();
        assert_eq!(seen, vec![0, 3, 6, 9, 10]);
        assert_eq!(series.len(), 5);
        assert_relative_eq!(s.t, 0.1, max_relative = 1e-15);
        assert_eq!(it.operators().factorization_count(), 1);
        assert_eq!(it.operators().solve_count(), 10);
    }

    #[test]
    fn observer_error_aborts() {
        let g = GridSpec::new(1.0, 1.0, 2, 2).unwrap();
        let mut it = integrator(
            &g,
            &valid(0.5, 0.0),
            DiffusiveGrid::empty(0.5).unwrap(),
            0.1,
        );
        let z = vec![0.0; 4];
        let mut s = it.initialize(&z, &z, &z, &z).unwrap();
        let mut obs = |st: &SimState, _: &EnergyRecord| {
            if st.step == 2 {
                Err("disk full")
            } else {
                Ok(())
            }
        };
        let opts = RunOptions {
            t_final: 1.0,
            cadence: 1,
            variant: EnergyVariant::Quadrature,
        };
        assert!(matches!(
            it.run(&mut s, &opts, &mut obs),
            Err(RunError::Observer("disk full"))
        ));
        assert_eq!(s.step, 2);
    }

    #[test]
    fn run_rejects_past_final_time() {
        let g = GridSpec::new(1.0, 1.0, 2, 2).unwrap();
        let mut it = integrator(
            &g,
            &valid(0.5, 0.0),
            DiffusiveGrid::empty(0.5).unwrap(),
            0.1,
        );
        let z = vec![0.0; 4];
        let mut s = it.initialize(&z, &z, &z, &z).unwrap();
        it.step(&mut s).unwrap();
        let opts = RunOptions {
            t_final: 0.0,
            cadence: 1,
            variant: EnergyVariant::Quadrature,
        };
        assert!(matches!(
            it.run(&mut s, &opts, &mut NoObserver),
            Err(RunError::Step(Error::InvalidArgument(_)))
        ));
    }
}
