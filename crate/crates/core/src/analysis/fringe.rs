use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DEGENERATE_CONTRAST: f64 = 1e-12;

/// Least-squares fit of `C cos(theta + phase_shift) + offset`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FringeFit {
    pub contrast: f64,
    /// In `(-pi, pi]`.
    pub phase_shift: f64,
    pub offset: f64,
    /// RMS deviation of the samples from the fitted model.
    pub residual: f64,
}

impl FringeFit {
    pub fn model(&self, theta: f64) -> f64 {
        self.contrast * (theta + self.phase_shift).cos() + self.offset
    }

    /// `(y - offset) / C`.
    pub fn normalize(&self, y: f64) -> f64 {
        (y - self.offset) / self.contrast
    }
}

pub(crate) fn wrap_phase(x: f64) -> f64 {
    let r = (x + PI).rem_euclid(2.0 * PI) - PI;
    if r <= -PI {
        r + 2.0 * PI
    } else {
        r
    }
}

/// Fits `y = a cos(theta) + b sin(theta) + c` by linear least squares and
/// returns `C = hypot(a, b)`, `phase_shift = atan2(-b, a)`, `offset = c`.
///
/// Needs at least three samples whose spread, counting one sample spacing,
/// covers a full period.
pub fn fit_fringe(samples: &[(f64, f64)]) -> Result<FringeFit> {
    let n = samples.len();
    if n < 3 {
        return Err(Error::validation(format!("fringe fit needs at least 3 samples, got {n}")));
    }
    if samples.iter().any(|(t, y)| !t.is_finite() || !y.is_finite()) {
        return Err(Error::validation("fringe samples must be finite"));
    }
    let (lo, hi) = samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (t, _)| (lo.min(*t), hi.max(*t)));
    let coverage = (hi - lo) * n as f64 / (n - 1) as f64;
    if coverage < 2.0 * PI * (1.0 - 1e-9) {
        return Err(Error::validation(format!("fringe samples span {coverage:.4} rad, less than one period")));
    }
    let design = DMatrix::from_fn(n, 3, |i, j| {
        let t = samples[i].0;
        match j {
            0 => t.cos(),
            1 => t.sin(),
            _ => 1.0,
        }
    });
    let y = DVector::from_iterator(n, samples.iter().map(|s| s.1));
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-10 * smax) {
        return Err(Error::validation("fringe design matrix is rank deficient"));
    }
    let coef = svd.solve(&y, 1e-14 * smax).map_err(Error::validation)?;
    let (a, b, c) = (coef[0], coef[1], coef[2]);
    let contrast = a.hypot(b);
    if contrast < DEGENERATE_CONTRAST {
        return Err(Error::DegenerateFringe(contrast));
    }
    let resid = &y - design * &coef;
    Ok(FringeFit {
        contrast,
        phase_shift: wrap_phase((-b).atan2(a)),
        offset: c,
        residual: (resid.norm_squared() / n as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn grid(n: usize, periods: f64) -> Vec<f64> {
        (0..n).map(|k| 2.0 * PI * periods * k as f64 / n as f64).collect()
    }

    #[test]
    fn exact_recovery() {
        let samples: Vec<_> = grid(64, 2.0).into_iter().map(|t| (t, 0.8 * (t + 0.3).cos() + 0.1)).collect();
        let fit = fit_fringe(&samples).unwrap();
        assert_abs_diff_eq!(fit.contrast, 0.8, epsilon = 1e-10);
        assert_abs_diff_eq!(fit.phase_shift, 0.3, epsilon = 1e-10);
        assert_abs_diff_eq!(fit.offset, 0.1, epsilon = 1e-10);
        assert!(fit.residual < 1e-12);
        assert_abs_diff_eq!(fit.model(1.0), 0.8 * 1.3f64.cos() + 0.1, epsilon = 1e-10);
    }

    #[test]
    fn flat_signal_is_degenerate() {
        let samples: Vec<_> = grid(32, 1.0).into_iter().map(|t| (t, 0.0)).collect();
        assert!(matches!(fit_fringe(&samples), Err(Error::DegenerateFringe(_))));
        let samples: Vec<_> = grid(32, 1.0).into_iter().map(|t| (t, 0.4)).collect();
        assert!(matches!(fit_fringe(&samples), Err(Error::DegenerateFringe(_))));
    }

    #[test]
    fn rejects_short_or_repeated_abscissae() {
        assert!(matches!(fit_fringe(&[(0.0, 1.0), (1.0, 0.0)]), Err(Error::Validation(_))));
        let same = vec![(0.0, 1.0); 10];
        assert!(matches!(fit_fringe(&same), Err(Error::Validation(_))));
        let narrow: Vec<_> = (0..20).map(|k| (0.1 * k as f64, 0.0)).collect();
        assert!(matches!(fit_fringe(&narrow), Err(Error::Validation(_))));
    }

    #[test]
    fn negative_cosine_has_phase_pi() {
        let samples: Vec<_> = grid(64, 2.0).into_iter().map(|t| (t, -t.cos())).collect();
        let fit = fit_fringe(&samples).unwrap();
        assert_abs_diff_eq!(fit.phase_shift, PI, epsilon = 1e-12);
    }

    #[test]
    fn noisy_contrast_monte_carlo() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let mut worst: f64 = 0.0;
        for _ in 0..200 {
            let samples: Vec<_> = grid(64, 2.0)
                .into_iter()
                .map(|t| (t, 0.6 * (t - 1.1).cos() + 0.05 + rng.gen_range(-1e-3..1e-3)))
                .collect();
            let fit = fit_fringe(&samples).unwrap();
            worst = worst.max((fit.contrast - 0.6).abs());
        }
        assert!(worst < 1e-3, "{worst}");
    }

    proptest! {
        #[test]
        fn synthesize_then_fit_is_identity(c in 0.01f64..2.0, phi in -3.1f64..3.1, off in -1.0f64..1.0,
                                           n in 8usize..128, periods in 1.0f64..4.0) {
            let samples: Vec<_> = grid(n, periods).into_iter().map(|t| (t, c * (t + phi).cos() + off)).collect();
            let fit = fit_fringe(&samples).unwrap();
            prop_assert!((fit.contrast - c).abs() < 1e-10);
            prop_assert!((fit.phase_shift - phi).abs() < 1e-10);
            prop_assert!((fit.offset - off).abs() < 1e-10);
        }
    }
}
