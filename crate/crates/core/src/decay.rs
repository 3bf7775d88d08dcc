//! Power-law fits of energy decay on log-log axes.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::math::{log10, sqrt};

/// Minimum number of usable points in the fit window.
pub const MIN_POINTS: usize = 10;

/// A reference decay exponent and how well a line of that slope fits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSlope {
    pub slope: f64,
    /// Intercept of the best line with the fixed slope.
    pub intercept: f64,
    /// Root-mean-square deviation of `log10 E` from that line.
    pub rms_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub window: (f64, f64),
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points_used: usize,
    /// Points in the window dropped because `E <= 0`.
    pub points_excluded: usize,
    /// `-1/(1 - order)` (weighted case) and `-1` (unweighted case).
    pub references: [ReferenceSlope; 2],
}

/// Least-squares fit of `log10 E = slope log10 t + intercept` over the
/// points with `t` in `window`.
pub fn fit_decay(points: &[(f64, f64)], window: (f64, f64), order: f64) -> Result<DecayFit> {
    let (t_min, t_max) = window;
    if !(t_min > 0.0 && t_max > t_min && t_max.is_finite()) {
        return Err(invalid!(
            "decay window must satisfy 0 < t_min < t_max, got [{t_min}, {t_max}]"
        ));
    }
    if !(order > 0.0 && order < 1.0) {
        return Err(invalid!("fractional order must lie in (0, 1), got {order}"));
    }
    let mut excluded = 0;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(t, e) in points {
        if t < t_min || t > t_max {
            continue;
        }
        if e > 0.0 && e.is_finite() {
            xs.push(log10(t));
            ys.push(log10(e));
        } else {
            excluded += 1;
        }
    }
    let n = xs.len();
    if n < MIN_POINTS {
        return Err(invalid!(
            "decay fit needs at least {MIN_POINTS} positive energies in [{t_min}, {t_max}], found {n}"
        ));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(invalid!("all points in the decay window share one time"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    let reference = |s: f64| {
        let b = my - s * mx;
        let ss: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| {
                let r = y - (s * x + b);
                r * r
            })
            .sum();
        ReferenceSlope {
            slope: s,
            intercept: b,
            rms_residual: sqrt(ss / nf),
        }
    };
    Ok(DecayFit {
        window,
        slope,
        intercept,
        r_squared,
        points_used: n,
        points_excluded: excluded,
        references: [reference(-1.0 / (1.0 - order)), reference(-1.0)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|k| 10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64))
            .collect()
    }

    #[test]
    fn exact_power_law() {
        let pts: Vec<_> = logspace(1.0, 4.0, 200)
            .into_iter()
            .map(|t| (t, 7.0 / (t * t)))
            .collect();
        let fit = fit_decay(&pts, (10.0, 1e4), 0.5).unwrap();
        assert!((fit.slope + 2.0).abs() <= 1e-10);
        assert!(fit.r_squared >= 1.0 - 1e-12);
        assert_relative_eq!(fit.intercept, 7f64.log10(), max_relative = 1e-10);
        assert_eq!(fit.references[0].slope, -2.0);
        assert!(fit.references[0].rms_residual < 1e-10);
        assert!(fit.references[1].rms_residual > 0.1);
    }

    #[test]
    fn dominant_term_wins() {
        let pts: Vec<_> = logspace(2.0, 4.0, 100)
            .into_iter()
            .map(|t| (t, 3.0 / t + 1e-6 / (t * t * t)))
            .collect();
        let fit = fit_decay(&pts, (1e2, 1e4), 0.5).unwrap();
        assert!(fit.slope > -1.05 && fit.slope < -0.95);
    }

    #[test]
    fn non_positive_energies_are_counted() {
        let mut pts: Vec<_> = logspace(0.0, 2.0, 30)
            .into_iter()
            .map(|t| (t, 1.0 / t))
            .collect();
        pts[5].1 = 0.0;
        pts[7].1 = -1.0;
        let fit = fit_decay(&pts, (1.0, 100.0), 0.5).unwrap();
        assert_eq!(fit.points_excluded, 2);
        assert_eq!(fit.points_used, 28);
    }

    #[test]
    fn insufficient_data() {
        let pts: Vec<_> = (1..=9).map(|t| (t as f64, 1.0)).collect();
        assert!(fit_decay(&pts, (1.0, 10.0), 0.5).is_err());
        assert!(fit_decay(&pts, (0.0, 10.0), 0.5).is_err());
    }

    proptest! {
        #[test]
        fn slope_is_scale_invariant(c in 1e-6f64..1e6, p in 0.2f64..3.0, noise in 0.0f64..0.3) {
            let pts: Vec<_> = logspace(0.5, 3.0, 40)
                .into_iter()
                .enumerate()
                .map(|(k, t)| (t, t.powf(-p) * (1.0 + noise * ((k as f64) * 1.3).sin().abs())))
                .collect();
            let scaled: Vec<_> = pts.iter().map(|&(t, e)| (t, c * e)).collect();
            let a = fit_decay(&pts, (1.0, 1e3), 0.5).unwrap();
            let b = fit_decay(&scaled, (1.0, 1e3), 0.5).unwrap();
            prop_assert!((a.slope - b.slope).abs() <= 1e-9 * a.slope.abs().max(1.0));
            prop_assert!((b.intercept - a.intercept - c.log10()).abs() <= 1e-9);
            prop_assert!((0.0..=1.0).contains(&a.r_squared));
        }
    }
}
