//! Statistical utilities: RNG extensions, error estimation, fits, and a small
//! dense least-squares solver.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic RNG used throughout; seeded per independent stream.
pub type Prng = ChaCha8Rng;

/// Stream `k` of a master seed. Batches drawn from distinct streams are
/// independent and merge associatively.
pub fn stream(master_seed: u64, k: u64) -> Prng {
    Prng::seed_from_u64(master_seed ^ k.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Extra sampling primitives on top of `rand::Rng`.
pub trait RngExt: Rng {
    /// Uniform on (0, 1), never exactly 0.
    fn unit_open(&mut self) -> f64 {
        loop {
            let u: f64 = self.random();
            if u > 0.0 {
                return u;
            }
        }
    }

    /// Standard normal via Box-Muller.
    fn normal(&mut self) -> f64 {
        let u1 = self.unit_open();
        let u2: f64 = self.random();
        (-2.0 * u1.ln()).sqrt() * (core::f64::consts::TAU * u2).cos()
    }

    /// Standard exponential.
    fn exponential(&mut self) -> f64 {
        -self.unit_open().ln()
    }

    /// Gamma(shape, 1) via Marsaglia-Tsang, boosted for shape < 1.
    fn gamma(&mut self, shape: f64) -> f64 {
        assert!(shape > 0.0);
        if shape < 1.0 {
            let u = self.unit_open();
            return self.gamma(shape + 1.0) * u.powf(1.0 / shape);
        }
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / (9.0 * d).sqrt();
        loop {
            let x = self.normal();
            let v = 1.0 + c * x;
            if v <= 0.0 {
                continue;
            }
            let v3 = v * v * v;
            let u = self.unit_open();
            if u < 1.0 - 0.0331 * x.powi(4) || u.ln() < 0.5 * x * x + d * (1.0 - v3 + v3.ln()) {
                return d * v3;
            }
        }
    }

    /// Beta(a, b).
    fn beta(&mut self, a: f64, b: f64) -> f64 {
        let x = self.gamma(a);
        let y = self.gamma(b);
        x / (x + y)
    }

    /// Uniformly random point on the unit sphere of R^d.
    fn unit_vector(&mut self, d: usize) -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..d).map(|_| self.normal()).collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 1e-12 {
                return v.into_iter().map(|x| x / n).collect();
            }
        }
    }
}

impl<R: Rng + ?Sized> RngExt for R {}

/// Running weighted mean with total mass; merges associatively.
#[derive(Debug, Clone, Copy, Default)]
pub struct WeightedSum {
    pub sum: f64,
    pub mass: f64,
}

impl WeightedSum {
    pub fn push(&mut self, value: f64, weight: f64) {
        self.sum += value * weight;
        self.mass += weight;
    }

    pub fn merge(&mut self, other: &WeightedSum) {
        self.sum += other.sum;
        self.mass += other.mass;
    }
}

/// Jackknife standard error of a sum estimator `T = sum_j s_j` over `k`
/// equal-size blocks.
///
/// Leave-one-out estimates are `T_(j) = (T - s_j) k/(k-1)`; the delete-1
/// jackknife variance `(k-1)/k sum (T_(j) - mean)^2` reduces to
/// `k/(k-1) sum (s_j - mean(s))^2`.
pub fn jackknife_stderr(block_sums: &[f64]) -> f64 {
    let k = block_sums.len();
    if k < 2 {
        return f64::NAN;
    }
    let kf = k as f64;
    let mean = block_sums.iter().sum::<f64>() / kf;
    let ss: f64 = block_sums.iter().map(|s| (s - mean) * (s - mean)).sum();
    (kf / (kf - 1.0) * ss).sqrt()
}

/// Mean and standard error of i.i.d. samples.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F1 - F2|`.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_unstable_by(|x, y| x.partial_cmp(y).expect("finite"));
    b.sort_unstable_by(|x, y| x.partial_cmp(y).expect("finite"));
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let x = a[i].min(b[j]);
        while i < na && a[i] <= x {
            i += 1;
        }
        while j < nb && b[j] <= x {
            j += 1;
        }
        let diff = (i as f64 / na as f64 - j as f64 / nb as f64).abs();
        if diff > d {
            d = diff;
        }
    }
    d
}

/// Critical value of the two-sample KS statistic at significance `alpha`
/// (asymptotic): `c(alpha) sqrt((n1+n2)/(n1 n2))` with `c(0.01) = 1.628`.
pub fn ks_critical(alpha_one_percent: bool, n1: usize, n2: usize) -> f64 {
    let c = if alpha_one_percent { 1.628 } else { 1.358 };
    c * ((n1 + n2) as f64 / (n1 as f64 * n2 as f64)).sqrt()
}

/// Ordinary least squares slope/intercept of y against x.
pub fn ols(x: &[f64], y: &[f64]) -> (f64, f64) {
    debug_assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// p-th quantile (0..=1) of a sample, linear interpolation.
pub fn quantile(xs: &mut [f64], p: f64) -> f64 {
    assert!(!xs.is_empty());
    xs.sort_unstable_by(|x, y| x.partial_cmp(y).expect("finite"));
    let r = p.clamp(0.0, 1.0) * (xs.len() - 1) as f64;
    let lo = r.floor() as usize;
    let hi = r.ceil() as usize;
    if lo == hi {
        xs[lo]
    } else {
        xs[lo] + (r - lo as f64) * (xs[hi] - xs[lo])
    }
}

/// Dense least squares `argmin |A x - b|` via normal equations with full
/// pivoting; returns the solution and a crude condition estimate of `A^T A`
/// (ratio of extreme pivots).
pub fn least_squares(a: &[Vec<f64>], b: &[f64]) -> Option<(Vec<f64>, f64)> {
    let rows = a.len();
    if rows == 0 {
        return None;
    }
    let cols = a[0].len();
    debug_assert_eq!(rows, b.len());
    // normal equations G x = r
    let mut g = vec![vec![0.0f64; cols]; cols];
    let mut r = vec![0.0f64; cols];
    for (row, &bi) in a.iter().zip(b) {
        for j in 0..cols {
            r[j] += row[j] * bi;
            for k in 0..cols {
                g[j][k] += row[j] * row[k];
            }
        }
    }
    solve_spd(&mut g, &mut r).map(|cond| (r, cond))
}

/// Gaussian elimination with partial pivoting on a symmetric system; solution
/// lands in `b`. Returns the pivot-ratio condition estimate.
fn solve_spd(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<f64> {
    let n = b.len();
    let mut max_piv: f64 = 0.0;
    let mut min_piv = f64::INFINITY;
    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).expect("finite"))?;
        if pivot == 0.0 {
            return None;
        }
        max_piv = max_piv.max(pivot);
        min_piv = min_piv.min(pivot);
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                let v = a[col][c];
                a[r][c] -= f * v;
            }
            b[r] -= f * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for c in col + 1..n {
            s -= a[col][c] * b[c];
        }
        b[col] = s / a[col][col];
    }
    Some(max_piv / min_piv)
}

/// log of the modified Bessel function of the first kind `I_nu(x)`, `x > 0`.
///
/// Power series for moderate arguments, uniform asymptotic expansion beyond.
/// Only small orders (`nu <= ~5`) are needed, for von Mises-Fisher densities.
pub fn log_bessel_i(nu: f64, x: f64) -> f64 {
    assert!(x > 0.0 && nu >= 0.0);
    if x < 30.0 + nu * nu {
        // I_nu(x) = (x/2)^nu sum_k (x^2/4)^k / (k! Gamma(nu+k+1))
        let q = 0.25 * x * x;
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        for k in 1..400 {
            term *= q / (k as f64 * (nu + k as f64));
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        nu * (0.5 * x).ln() - ln_gamma(nu + 1.0) + sum.ln()
    } else {
        // leading asymptotics e^x / sqrt(2 pi x) with first correction
        let mu = 4.0 * nu * nu;
        let corr = 1.0 - (mu - 1.0) / (8.0 * x);
        x - 0.5 * (core::f64::consts::TAU * x).ln() + corr.max(1e-3).ln()
    }
}

/// Nelder-Mead simplex minimization of `f` from `x0` with initial step `h`.
/// Returns the best point and value after `max_iter` iterations or when the
/// simplex diameter falls below `tol`.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    h: f64,
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, f64) {
    let d = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] += h;
        let v = f(&x);
        simplex.push((x, v));
    }
    let centroid = |sx: &[(Vec<f64>, f64)]| -> Vec<f64> {
        let mut c = vec![0.0; d];
        for (x, _) in sx.iter().take(d) {
            for (ci, xi) in c.iter_mut().zip(x) {
                *ci += xi / d as f64;
            }
        }
        c
    };
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite objective"));
        let diam: f64 = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        if diam < tol {
            break;
        }
        let c = centroid(&simplex);
        let worst = simplex[d].clone();
        let reflect: Vec<f64> = c.iter().zip(&worst.0).map(|(ci, wi)| 2.0 * ci - wi).collect();
        let fr = f(&reflect);
        if fr < simplex[0].1 {
            let expand: Vec<f64> = c.iter().zip(&worst.0).map(|(ci, wi)| 3.0 * ci - 2.0 * wi).collect();
            let fe = f(&expand);
            simplex[d] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (reflect, fr);
        } else {
            let contract: Vec<f64> = c
                .iter()
                .zip(&worst.0)
                .map(|(ci, wi)| 0.5 * (ci + wi))
                .collect();
            let fc = f(&contract);
            if fc < worst.1 {
                simplex[d] = (contract, fc);
            } else {
                // shrink toward the best vertex
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = entry
                        .0
                        .iter()
                        .zip(&best)
                        .map(|(xi, bi)| 0.5 * (xi + bi))
                        .collect();
                    let v = f(&x);
                    *entry = (x, v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite objective"));
    simplex[0].clone()
}

/// Lanczos log-gamma (g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = core::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (core::f64::consts::TAU).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn normal_and_gamma_moments() {
        let mut rng = stream(7, 0);
        let n = 200_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let x = rng.normal();
            sum += x;
            sumsq += x * x;
        }
        assert!(sum.abs() / (n as f64) < 0.01);
        assert_abs_diff_eq!(sumsq / n as f64, 1.0, epsilon = 0.02);

        let shape = 2.5;
        let mut g = 0.0;
        for _ in 0..n {
            g += rng.gamma(shape);
        }
        assert_abs_diff_eq!(g / n as f64, shape, epsilon = 0.03);
    }

    #[test]
    fn ks_detects_shift() {
        let mut rng = stream(11, 0);
        let mut a: Vec<f64> = (0..5_000).map(|_| rng.normal()).collect();
        let mut b: Vec<f64> = (0..5_000).map(|_| rng.normal()).collect();
        let d_same = ks_two_sample(&mut a, &mut b);
        assert!(d_same < ks_critical(true, 5_000, 5_000));
        let mut c: Vec<f64> = (0..5_000).map(|_| rng.normal() + 0.2).collect();
        let d_diff = ks_two_sample(&mut a, &mut c);
        assert!(d_diff > ks_critical(true, 5_000, 5_000));
    }

    #[test]
    fn least_squares_recovers_coefficients() {
        let mut rng = stream(3, 0);
        let truth = [2.0, -1.0, 0.5];
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for _ in 0..50 {
            let r: Vec<f64> = (0..3).map(|_| rng.normal()).collect();
            let y: f64 = r.iter().zip(&truth).map(|(a, b)| a * b).sum();
            rows.push(r);
            rhs.push(y + 1e-9 * rng.normal());
        }
        let (x, cond) = least_squares(&rows, &rhs).unwrap();
        for (xi, ti) in x.iter().zip(&truth) {
            assert_abs_diff_eq!(xi, ti, epsilon = 1e-6);
        }
        assert!(cond < 1e3);
    }

    #[test]
    fn ols_slope() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [3.0, 5.0, 7.0, 9.0];
        let (s, b) = ols(&x, &y);
        assert_abs_diff_eq!(s, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ln_gamma_known_values() {
        assert_abs_diff_eq!(ln_gamma(1.0), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ln_gamma(5.0), 24.0f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(
            ln_gamma(0.5),
            0.5 * core::f64::consts::PI.ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn bessel_i_series_values() {
        // I_0(1) = 1.2660658777520084, I_1(2) = 1.5906368546373291
        assert_abs_diff_eq!(log_bessel_i(0.0, 1.0), 1.2660658777520084f64.ln(), epsilon = 1e-10);
        assert_abs_diff_eq!(log_bessel_i(1.0, 2.0), 1.5906368546373291f64.ln(), epsilon = 1e-10);
        // I_{1/2}(x) = sqrt(2/(pi x)) sinh(x)
        let x = 3.7;
        let exact = (2.0 / (core::f64::consts::PI * x)).sqrt() * x.sinh();
        assert_abs_diff_eq!(log_bessel_i(0.5, x), exact.ln(), epsilon = 1e-10);
    }

    #[test]
    fn quantile_interpolates() {
        let mut xs = [4.0, 1.0, 3.0, 2.0];
        assert_abs_diff_eq!(quantile(&mut xs, 0.5), 2.5, epsilon = 1e-15);
        assert_abs_diff_eq!(quantile(&mut xs, 1.0), 4.0, epsilon = 1e-15);
    }
}
