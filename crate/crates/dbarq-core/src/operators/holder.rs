//! Holder exponent estimation by upper-envelope regression over dyadic
//! separations.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::stats::{ols, quantile, Prng};

/// Result of a Holder fit.
#[derive(Debug, Clone, Copy)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HolderEstimate {
    /// fitted exponent (envelope slope), clamped to [0, 1]
    pub alpha: f64,
    /// envelope intercept, the seminorm estimate
    pub norm: f64,
    pub pair_count: usize,
    /// whether differences were divided by |log h| first
    pub log_corrected: bool,
    /// the field was constant to rounding; alpha forced to 1
    pub degenerate: bool,
}

/// Default dyadic separations `2^-3 .. 2^-12`.
pub fn dyadic_scales(lo: u32, hi: u32) -> Vec<f64> {
    (lo..=hi).map(|j| 0.5f64.powi(j as i32)).collect()
}

/// Fit the Holder exponent of `u` from pairs produced by `pair_sampler`
/// (given a target separation, it returns a pair of points at that
/// separation, or `None` when the geometry does not allow one).
///
/// Per scale the 90th percentile of `|u(a) - u(b)|` forms the envelope;
/// `log envelope` against `log h` is fitted by least squares. With
/// `with_log`, differences are divided by `|log h|` first (the log-corrected
/// space at the critical exponent).
pub fn holder_fit<P, U, S>(
    u: U,
    mut pair_sampler: S,
    scales: &[f64],
    pairs_per_scale: usize,
    with_log: bool,
    rng: &mut Prng,
) -> HolderEstimate
where
    U: Fn(&P) -> C64,
    S: FnMut(f64, &mut Prng) -> Option<(P, P)>,
{
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut total_pairs = 0usize;
    let mut max_diff: f64 = 0.0;
    for &h in scales {
        let mut diffs = Vec::with_capacity(pairs_per_scale);
        let mut attempts = 0usize;
        while diffs.len() < pairs_per_scale && attempts < 20 * pairs_per_scale {
            attempts += 1;
            if let Some((a, b)) = pair_sampler(h, rng) {
                let mut d = (u(&a) - u(&b)).norm();
                if with_log {
                    d /= h.ln().abs();
                }
                diffs.push(d);
            }
        }
        if diffs.len() < pairs_per_scale / 2 {
            continue;
        }
        total_pairs += diffs.len();
        let q = quantile(&mut diffs, 0.9);
        max_diff = max_diff.max(q);
        if q > 1e-14 {
            xs.push(h.ln());
            ys.push(q.ln());
        }
    }
    if xs.len() < 2 || max_diff <= 1e-13 {
        return HolderEstimate {
            alpha: 1.0,
            norm: 0.0,
            pair_count: total_pairs,
            log_corrected: with_log,
            degenerate: true,
        };
    }
    let (slope, intercept) = ols(&xs, &ys);
    HolderEstimate {
        alpha: slope.clamp(0.0, 1.0),
        norm: intercept.exp(),
        pair_count: total_pairs,
        log_corrected: with_log,
        degenerate: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{stream, RngExt};

    /// pairs in the real interval (0, 1) at separation h
    fn interval_pairs(h: f64, rng: &mut Prng) -> Option<(f64, f64)> {
        use rand::Rng;
        let x: f64 = rng.random::<f64>() * (1.0 - h);
        Some((x, x + h))
    }

    #[test]
    fn lipschitz_model_reads_one() {
        // u = Re z along a line: alpha ~ 1
        let mut rng = stream(91, 0);
        let est = holder_fit(
            |x: &f64| C64::new(*x, 0.0),
            interval_pairs,
            &dyadic_scales(3, 12),
            800,
            false,
            &mut rng,
        );
        assert!(!est.degenerate);
        assert!((est.alpha - 1.0).abs() <= 0.03, "alpha {}", est.alpha);
    }

    #[test]
    fn sqrt_model_reads_half() {
        // u(x) = |1 - 2x|^{1/2} near its crease: envelope slope 1/2.
        // Oracle: on pairs straddling x = 1/2 at separation h the difference
        // is about sqrt(h); the 90th percentile envelope tracks h^{1/2}.
        let mut rng = stream(92, 0);
        let sampler = |h: f64, rng: &mut Prng| -> Option<(f64, f64)> {
            use rand::Rng;
            // anchor near the crease at comparable scale to capture the
            // envelope-attaining pairs
            let x = 0.5 + (rng.random::<f64>() - 0.5) * 4.0 * h;
            Some((x, x + h))
        };
        let est = holder_fit(
            |x: &f64| C64::new((1.0 - 2.0 * x).abs().sqrt(), 0.0),
            sampler,
            &dyadic_scales(3, 12),
            800,
            false,
            &mut rng,
        );
        assert!(
            (est.alpha - 0.5).abs() <= 0.05,
            "alpha {} norm {}",
            est.alpha,
            est.norm
        );
    }

    #[test]
    fn constant_field_flagged_degenerate() {
        let mut rng = stream(93, 0);
        let est = holder_fit(
            |_: &f64| C64::new(3.25, 0.0),
            interval_pairs,
            &dyadic_scales(3, 10),
            200,
            false,
            &mut rng,
        );
        assert!(est.degenerate);
        assert_eq!(est.alpha, 1.0);
        assert_eq!(est.norm, 0.0);
    }

    #[test]
    fn log_correction_mode() {
        // u(x) = sqrt(x) |log x| against pairs (0, h): the raw difference is
        // sqrt(h) |log h|; dividing by |log h| leaves exactly h^{1/2}
        let mut rng = stream(94, 0);
        let sampler = |h: f64, rng: &mut Prng| -> Option<(f64, f64)> {
            let _ = rng.normal();
            Some((0.0, h))
        };
        let est = holder_fit(
            |x: &f64| {
                if *x <= 0.0 {
                    C64::ZERO
                } else {
                    C64::new(x.sqrt() * x.ln().abs(), 0.0)
                }
            },
            sampler,
            &dyadic_scales(4, 12),
            50,
            true,
            &mut rng,
        );
        assert!((est.alpha - 0.5).abs() <= 1e-6, "alpha {}", est.alpha);
    }
}
