//! Parametric initial profiles sampled at cell centers.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::grid::GridSpec;
use crate::math::{exp, sqrt};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    Zero,
    /// `amplitude / (sigma sqrt 2) * exp(-|x - c|^2 / (2 sigma^2))`
    Gaussian {
        center: [f64; 2],
        sigma: f64,
        amplitude: f64,
    },
    /// `1 - |x - c| / radius` inside the disk, 0 outside.
    Cone {
        center: [f64; 2],
        radius: f64,
    },
    /// `(1 - |x - c|^2 / radius^2)^3` inside the disk, 0 outside.
    Bump6 {
        center: [f64; 2],
        radius: f64,
    },
}

impl Profile {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Profile::Zero => true,
            Profile::Gaussian {
                center,
                sigma,
                amplitude,
            } => sigma > 0.0 && sigma.is_finite() && amplitude.is_finite() && finite2(center),
            Profile::Cone { center, radius } | Profile::Bump6 { center, radius } => {
                radius > 0.0 && radius.is_finite() && finite2(center)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(invalid!("invalid profile parameters: {self:?}"))
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Gaussian {
                center,
                sigma,
                amplitude,
            } => {
                let r2 = dist2(center, x, y);
                amplitude / (sigma * sqrt(2.0)) * exp(-r2 / (2.0 * sigma * sigma))
            }
            Profile::Cone { center, radius } => {
                let r = sqrt(dist2(center, x, y));
                if r < radius {
                    1.0 - r / radius
                } else {
                    0.0
                }
            }
            Profile::Bump6 { center, radius } => {
                let r2 = dist2(center, x, y);
                if r2 < radius * radius {
                    let s = 1.0 - r2 / (radius * radius);
                    s * s * s
                } else {
                    0.0
                }
            }
        }
    }

    /// Values at every cell center, in grid order.
    pub fn sample(&self, g: &GridSpec) -> Vec<f64> {
        g.centers().map(|(x, y)| self.eval(x, y)).collect()
    }
}

fn finite2(c: [f64; 2]) -> bool {
    c[0].is_finite() && c[1].is_finite()
}

fn dist2(c: [f64; 2], x: f64, y: f64) -> f64 {
    let (dx, dy) = (x - c[0], y - c[1]);
    dx * dx + dy * dy
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_peak_uses_sqrt2_normalization() {
        let p = Profile::Gaussian {
            center: [0.5, 0.0],
            sigma: 0.01,
            amplitude: 1.0,
        };
        assert_relative_eq!(p.eval(0.5, 0.0), 100.0 / 2f64.sqrt(), max_relative = 1e-15);
        assert!(p.eval(0.5, 0.1) < 1e-18);
    }

    #[test]
    fn cone_and_bump() {
        let cone = Profile::Cone {
            center: [0.5, 0.5],
            radius: 0.1,
        };
        assert_eq!(cone.eval(0.5, 0.5), 1.0);
        assert_relative_eq!(cone.eval(0.55, 0.5), 0.5, max_relative = 1e-12);
        assert_eq!(cone.eval(0.7, 0.5), 0.0);
        let bump = Profile::Bump6 {
            center: [0.5, 0.5],
            radius: 0.1,
        };
        // (1 - 100 (x - 1/2)^2 - 100 (y - 1/2)^2)^3
        let (x, y) = (0.53, 0.46);
        let s: f64 = 1.0 - 100.0 * (x - 0.5) * (x - 0.5) - 100.0 * (y - 0.5) * (y - 0.5);
        assert_relative_eq!(bump.eval(x, y), s.powi(3), max_relative = 1e-12);
        assert_eq!(bump.eval(0.5, 0.65), 0.0);
    }

    #[test]
    fn sampling_follows_grid_order() {
        let g = GridSpec::new(1.0, 1.0, 4, 3).unwrap();
        let field = Profile::Cone {
            center: [0.0, 0.0],
            radius: 10.0,
        }
        .sample(&g);
        assert_eq!(field.len(), 12);
        let (x, y) = g.center(3, 2);
        assert_eq!(field[g.index(3, 2)], 1.0 - (x * x + y * y).sqrt() / 10.0);
        assert!(Profile::Zero.sample(&g).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn invalid_parameters() {
        assert!(Profile::Cone {
            center: [0.5, 0.5],
            radius: 0.0
        }
        .validate()
        .is_err());
        assert!(Profile::Gaussian {
            center: [f64::NAN, 0.0],
            sigma: 1.0,
            amplitude: 1.0
        }
        .validate()
        .is_err());
    }
}
