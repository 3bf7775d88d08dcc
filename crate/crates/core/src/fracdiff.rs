//! Scalar diffusive realization of the exponentially weighted Caputo
//! derivative
//!
//! ```text
//! D^{a,eta} f(t) = 1/Gamma(1-a) int_0^t exp(-eta (t-s)) (t-s)^(-a) f'(s) ds
//! ```
//!
//! and an independent quadrature oracle for it.

use alloc::vec;
use alloc::vec::Vec;
use core::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::math::{exp, gamma, powf};
use crate::operators::DiffusiveGrid;

/// Test functions with hard-coded derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFunction {
    /// `f(t) = t`
    Identity,
    /// `f(t) = t^2`
    Quadratic,
    /// `f(t) = exp(-t)`
    Exponential,
}

impl TestFunction {
    pub fn value(self, t: f64) -> f64 {
        match self {
            TestFunction::Identity => t,
            TestFunction::Quadratic => t * t,
            TestFunction::Exponential => exp(-t),
        }
    }

    pub fn derivative(self, t: f64) -> f64 {
        match self {
            TestFunction::Identity => 1.0,
            TestFunction::Quadratic => 2.0 * t,
            TestFunction::Exponential => -exp(-t),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TestFunction::Identity => "identity",
            TestFunction::Quadratic => "quadratic",
            TestFunction::Exponential => "exponential",
        }
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(TestFunction::Identity),
            "quadratic" => Ok(TestFunction::Quadratic),
            "exponential" => Ok(TestFunction::Exponential),
            other => Err(invalid!(
                "unknown test function '{other}' (expected identity, quadratic or exponential)"
            )),
        }
    }
}

/// Absolute tolerance of the oracle quadrature.
pub const ORACLE_TOLERANCE: f64 = 1e-10;

/// Reference value of `D^{order,eta} f(t)`.
///
/// Closed forms are used for polynomial `f` with `eta = 0`; otherwise the
/// substitution `t - s = z^(1/(1-order))` removes the endpoint singularity and
/// the smooth remainder is integrated adaptively.
pub fn caputo_exponential_analytic(f: TestFunction, order: f64, eta: f64, t: f64) -> Result<f64> {
    if !(order > 0.0 && order < 1.0) {
        return Err(invalid!("fractional order must lie in (0, 1), got {order}"));
    }
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(invalid!("eta must be non-negative, got {eta}"));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid!("time must be non-negative, got {t}"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if eta == 0.0 {
        match f {
            TestFunction::Identity => return Ok(powf(t, 1.0 - order) / gamma(2.0 - order)),
            TestFunction::Quadratic => return Ok(2.0 * powf(t, 2.0 - order) / gamma(3.0 - order)),
            TestFunction::Exponential => {}
        }
    }
    caputo_by_quadrature(f, order, eta, t)
}

/// The quadrature branch of [`caputo_exponential_analytic`], exposed so the
/// closed forms can be cross-checked.
pub fn caputo_by_quadrature(f: TestFunction, order: f64, eta: f64, t: f64) -> Result<f64> {
    let p = 1.0 / (1.0 - order);
    let upper = powf(t, 1.0 - order);
    // w = z^p, dw = p z^(p-1) dz and w^(-order) dw = p dz.
    let integrand = |z: f64| {
        let w = powf(z, p);
        p * exp(-eta * w) * f.derivative(t - w)
    };
    let integral = adaptive_gauss_kronrod(integrand, 0.0, upper, ORACLE_TOLERANCE, 60)?;
    Ok(integral / gamma(1.0 - order))
}

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive bisection with a global absolute error budget.
pub fn adaptive_gauss_kronrod<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut stack = vec![(a, b, tol, 0u32)];
    let mut total = 0.0;
    while let Some((lo, hi, budget, depth)) = stack.pop() {
        let (value, err) = gauss_kronrod_15(&f, lo, hi);
        if !value.is_finite() {
            return Err(Error::NoConvergence("non-finite integrand".into()));
        }
        if err <= budget || depth >= max_depth {
            if err > budget {
                return Err(Error::NoConvergence(alloc::format!(
                    "quadrature error {err:e} above budget {budget:e} on [{lo}, {hi}]"
                )));
            }
            total += value;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, 0.5 * budget, depth + 1));
            stack.push((lo, mid, 0.5 * budget, depth + 1));
        }
    }
    Ok(total)
}

/// Mode values `phi_l` of the diffusive realization driven by a scalar
/// velocity, advanced with the Crank-Nicolson relaxation update.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarDiffusiveState {
    grid: DiffusiveGrid,
    eta: f64,
    phi: Vec<f64>,
    t: f64,
}

impl ScalarDiffusiveState {
    /// All modes start at rest.
    pub fn new(grid: DiffusiveGrid, eta: f64) -> Result<Self> {
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(invalid!("eta must be non-negative, got {eta}"));
        }
        let phi = vec![0.0; grid.len()];
        Ok(Self {
            grid,
            eta,
            phi,
            t: 0.0,
        })
    }

    pub fn grid(&self) -> &DiffusiveGrid {
        &self.grid
    }

    pub fn modes(&self) -> &[f64] {
        &self.phi
    }

    pub fn modes_mut(&mut self) -> &mut [f64] {
        &mut self.phi
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// `phi^{n+1} = ((2 - dt a) phi^n + 2 dt mu f'_{n+1/2}) / (2 + dt a)`
    /// with `a = xi^2 + eta`.
    pub fn step(&mut self, f_dot_half: f64, dt: f64) {
        let mu = self.grid.weights();
        for (l, phi) in self.phi.iter_mut().enumerate() {
            let a = self.grid.relaxation(l, self.eta);
            *phi = ((2.0 - dt * a) * *phi + 2.0 * dt * mu[l] * f_dot_half) / (2.0 + dt * a);
        }
        self.t += dt;
    }

    /// `2 C dxi sum_l mu_l phi_l`
    pub fn output(&self) -> f64 {
        let mu = self.grid.weights();
        let s: f64 = self.phi.iter().zip(mu).map(|(p, m)| m * p).sum();
        2.0 * self.grid.constant() * self.grid.spacing() * s
    }
}

/// Drives the modes with `f'` from 0 to `t_end` (in `round(t_end / dt)`
/// steps, midpoint-averaged derivative) and returns the diffusive output.
pub fn diffusive_response(
    f: TestFunction,
    grid: DiffusiveGrid,
    eta: f64,
    dt: f64,
    t_end: f64,
) -> Result<f64> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid!("time step must be positive, got {dt}"));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(invalid!("end time must be non-negative, got {t_end}"));
    }
    let steps = libm::round(t_end / dt) as usize;
    let mut state = ScalarDiffusiveState::new(grid, eta)?;
    for n in 0..steps {
        let (t0, t1) = (n as f64 * dt, (n + 1) as f64 * dt);
        state.step(0.5 * (f.derivative(t0) + f.derivative(t1)), dt);
    }
    Ok(state.output())
}
