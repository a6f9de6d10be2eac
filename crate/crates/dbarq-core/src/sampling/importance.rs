//! Importance samplers with exact densities for the concentrated kernels.
//!
//! Every sampler here factors through the same product structure as the base
//! boundary/volume samplers (radial scale, octant scales, sphere and frame
//! factors), so mixture densities are exact likelihood ratios against the
//! base law and the resulting defensive-mixture estimators are unbiased with
//! bounded weights.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::geometry::{norm, BlockIndex};
use crate::sampling::{sphere_area, t_jacobian_density};
use crate::stats::{log_bessel_i, ln_gamma, Prng, RngExt};

/// Sample the von Mises-Fisher distribution on `S^{d-1}` with mean direction
/// `mu` and concentration `kappa` (Wood's rejection algorithm).
pub fn sample_vmf(mu: &[f64], kappa: f64, rng: &mut Prng) -> Vec<f64> {
    let d = mu.len();
    debug_assert!(d >= 2);
    if kappa < 1e-9 {
        return rng.unit_vector(d);
    }
    let dm1 = (d - 1) as f64;
    let b = (-2.0 * kappa + (4.0 * kappa * kappa + dm1 * dm1).sqrt()) / dm1;
    let x0 = (1.0 - b) / (1.0 + b);
    let c = kappa * x0 + dm1 * (1.0 - x0 * x0).ln();
    let w = loop {
        let z = rng.beta(0.5 * dm1, 0.5 * dm1);
        let w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
        let u: f64 = rng.unit_open();
        if kappa * w + dm1 * (1.0 - x0 * w).ln() - c >= u.ln() {
            break w;
        }
    };
    // uniform direction orthogonal to mu
    let xi = {
        let raw = rng.unit_vector(d);
        let dot: f64 = raw.iter().zip(mu).map(|(a, b)| a * b).sum();
        let mut t: Vec<f64> = raw.iter().zip(mu).map(|(a, b)| a - dot * b).collect();
        let nt = t.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nt < 1e-12 {
            // fell on the axis: retry deterministically off-axis
            let mut e = vec![0.0; d];
            let k = mu
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).expect("finite"))
                .map(|(i, _)| i)
                .unwrap_or(0);
            e[k] = 1.0;
            let dot: f64 = e.iter().zip(mu).map(|(a, b)| a * b).sum();
            t = e.iter().zip(mu).map(|(a, b)| a - dot * b).collect();
            let nt = t.iter().map(|x| x * x).sum::<f64>().sqrt();
            t.iter().map(|x| x / nt).collect::<Vec<f64>>()
        } else {
            t.into_iter().map(|x| x / nt).collect()
        }
    };
    let s = (1.0 - w * w).max(0.0).sqrt();
    mu.iter().zip(&xi).map(|(m, x)| w * m + s * x).collect()
}

/// Log-density of the von Mises-Fisher law with respect to the surface
/// measure of `S^{d-1}`:
/// `kappa x.mu + log C_d(kappa)`, `C_d = kappa^{d/2-1} / ((2 pi)^{d/2}
/// I_{d/2-1}(kappa))`.
pub fn log_vmf_pdf(x: &[f64], mu: &[f64], kappa: f64) -> f64 {
    let d = x.len() as f64;
    if kappa < 1e-9 {
        return -sphere_area(x.len()).ln();
    }
    let dot: f64 = x.iter().zip(mu).map(|(a, b)| a * b).sum();
    let nu = 0.5 * d - 1.0;
    let log_c = nu * kappa.ln() - 0.5 * d * (core::f64::consts::TAU).ln() - log_bessel_i(nu, kappa);
    kappa * dot + log_c
}

/// Uniform log-density on `S^{d-1}`.
pub fn log_uniform_sphere(d: usize) -> f64 {
    -sphere_area(d).ln()
}

/// Decompose a nonzero quadric-sphere point into its orthonormal frame
/// `z = (u + iv)/sqrt 2`.
pub fn frame_of(z: &[C64]) -> (Vec<f64>, Vec<f64>) {
    let s = core::f64::consts::SQRT_2;
    let u: Vec<f64> = z.iter().map(|c| c.re * s).collect();
    let v: Vec<f64> = z.iter().map(|c| c.im * s).collect();
    (u, v)
}

/// Cap distribution on the quadric sphere `dM_n`: a von Mises-Fisher chain on
/// the frame `(u, v)` concentrated at the frame of a target point.
#[derive(Debug, Clone)]
pub struct QuadricCap {
    pub target_u: Vec<f64>,
    pub target_v: Vec<f64>,
    pub kappa: f64,
}

impl QuadricCap {
    pub fn at(z_target: &[C64], kappa: f64) -> Self {
        let (u, v) = frame_of(z_target);
        QuadricCap { target_u: u, target_v: v, kappa }
    }

    pub fn sample(&self, rng: &mut Prng) -> Vec<C64> {
        let d = self.target_u.len();
        let u = sample_vmf(&self.target_u, self.kappa, rng);
        // project the v-target into u-perp and renormalize
        let vdir = project_unit(&self.target_v, &u);
        // sample on the (d-1)-sphere of u-perp: build an orthonormal basis of
        // u-perp, apply a vMF in that basis
        let basis = orthonormal_complement(&u);
        let mu_local: Vec<f64> = basis.iter().map(|b| dot(&vdir, b)).collect();
        let mu_norm = mu_local.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mu_local: Vec<f64> = mu_local.iter().map(|x| x / mu_norm).collect();
        let v_local = sample_vmf(&mu_local, self.kappa, rng);
        let mut v = vec![0.0; d];
        for (coef, b) in v_local.iter().zip(&basis) {
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi += coef * bi;
            }
        }
        let inv = core::f64::consts::FRAC_1_SQRT_2;
        u.iter()
            .zip(&v)
            .map(|(a, b)| C64::new(a * inv, b * inv))
            .collect()
    }

    /// Log-likelihood ratio of this cap law against the invariant measure
    /// `sigma_n`, at an arbitrary quadric-sphere point.
    pub fn log_ratio(&self, z: &[C64]) -> f64 {
        let (u, v) = frame_of(z);
        let d = u.len();
        let r1 = log_vmf_pdf(&u, &self.target_u, self.kappa) - log_uniform_sphere(d);
        let vdir = project_unit(&self.target_v, &u);
        // v lives on the (d-1)-sphere of u-perp; express both in that sphere
        let basis = orthonormal_complement(&u);
        let v_local: Vec<f64> = basis.iter().map(|b| dot(&v, b)).collect();
        let mut mu_local: Vec<f64> = basis.iter().map(|b| dot(&vdir, b)).collect();
        let mn = mu_local.iter().map(|x| x * x).sum::<f64>().sqrt();
        for m in mu_local.iter_mut() {
            *m /= mn;
        }
        let r2 = log_vmf_pdf(&v_local, &mu_local, self.kappa) - log_uniform_sphere(d - 1);
        r1 + r2
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn project_unit(target: &[f64], u: &[f64]) -> Vec<f64> {
    let d = dot(target, u);
    let mut t: Vec<f64> = target.iter().zip(u).map(|(a, b)| a - d * b).collect();
    let nt = t.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nt < 1e-9 {
        // degenerate: pick any unit vector orthogonal to u
        let mut e = vec![0.0; u.len()];
        let k = u
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).expect("finite"))
            .map(|(i, _)| i)
            .unwrap_or(0);
        e[k] = 1.0;
        let du = dot(&e, u);
        t = e.iter().zip(u).map(|(a, b)| a - du * b).collect();
        let nt = t.iter().map(|x| x * x).sum::<f64>().sqrt();
        return t.into_iter().map(|x| x / nt).collect();
    }
    t.into_iter().map(|x| x / nt).collect()
}

/// Orthonormal basis of the orthogonal complement of a unit vector.
fn orthonormal_complement(u: &[f64]) -> Vec<Vec<f64>> {
    let d = u.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    for j in 0..d {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        let du = dot(&e, u);
        let mut t: Vec<f64> = e.iter().zip(u).map(|(a, b)| a - du * b).collect();
        for b in &basis {
            let db = dot(&t, b);
            for (ti, bi) in t.iter_mut().zip(b) {
                *ti -= db * bi;
            }
        }
        let nt = t.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nt > 1e-9 {
            basis.push(t.into_iter().map(|x| x / nt).collect());
            if basis.len() == d - 1 {
                break;
            }
        }
    }
    basis
}

/// Tilted octant-scale distribution: the base cone-Jacobian law with boosted
/// Dirichlet parameters concentrating at a target `t`.
#[derive(Debug, Clone)]
pub struct TiltedScales {
    pub shape: BlockIndex,
    /// Gamma shape parameters per block (base `l, n, m` plus the boost)
    pub params: [f64; 3],
}

impl TiltedScales {
    pub fn at(shape: BlockIndex, target: [f64; 3], boost: f64) -> Self {
        let base = [shape.l as f64, shape.n as f64, shape.m as f64];
        let params = [
            if shape.l > 0 { base[0] + boost * target[0] * target[0] } else { 0.0 },
            base[1] + boost * target[1] * target[1],
            base[2] + boost * target[2] * target[2],
        ];
        TiltedScales { shape, params }
    }

    pub fn sample(&self, rng: &mut Prng) -> [f64; 3] {
        let g1 = if self.shape.l > 0 { rng.gamma(self.params[0]) } else { 0.0 };
        let g2 = rng.gamma(self.params[1]);
        let g3 = rng.gamma(self.params[2]);
        let s = g1 + g2 + g3;
        [(g1 / s).sqrt(), (g2 / s).sqrt(), (g3 / s).sqrt()]
    }

    /// Log-density with respect to the octant surface measure.
    pub fn log_pdf(&self, t: &[f64; 3]) -> f64 {
        let mut ln_z = ln_gamma(self.params[1]) + ln_gamma(self.params[2])
            - ln_gamma(self.params.iter().sum::<f64>())
            - core::f64::consts::LN_2;
        let mut ld = 0.0;
        if self.shape.l > 0 {
            ln_z += ln_gamma(self.params[0]) - core::f64::consts::LN_2;
            ld += (2.0 * self.params[0] - 1.0) * t[0].ln();
        }
        ld += (2.0 * self.params[1] - 1.0) * t[1].ln();
        ld += (2.0 * self.params[2] - 1.0) * t[2].ln();
        ld - ln_z
    }

    /// Log-likelihood ratio against the base cone-Jacobian law.
    pub fn log_ratio(&self, t: &[f64; 3]) -> f64 {
        self.log_pdf(t) - t_jacobian_density(self.shape, t).ln()
    }
}

/// Boosted radial law for volume points: mixture of the base `t^{2|N|-1}`
/// density with a uniform layer on `(1 - width, 1)`.
#[derive(Debug, Clone)]
pub struct BoostedRadial {
    pub two_n: f64,
    pub width: f64,
    pub boost_prob: f64,
}

impl BoostedRadial {
    pub fn new(shape: BlockIndex, width: f64, boost_prob: f64) -> Self {
        BoostedRadial {
            two_n: 2.0 * shape.total() as f64,
            width,
            boost_prob,
        }
    }

    pub fn sample(&self, rng: &mut Prng) -> f64 {
        if rng.random::<f64>() < self.boost_prob {
            1.0 - self.width * rng.random::<f64>()
        } else {
            rng.unit_open().powf(1.0 / self.two_n)
        }
    }

    /// Density with respect to Lebesgue on (0, 1), normalized.
    pub fn pdf(&self, t: f64) -> f64 {
        let base = self.two_n * t.powf(self.two_n - 1.0);
        let layer = if t > 1.0 - self.width { 1.0 / self.width } else { 0.0 };
        (1.0 - self.boost_prob) * base + self.boost_prob * layer
    }

    /// Likelihood ratio against the base radial law `2|N| t^{2|N|-1}`.
    pub fn log_ratio(&self, t: f64) -> f64 {
        (self.pdf(t) / (self.two_n * t.powf(self.two_n - 1.0))).ln()
    }
}

/// Cap-concentrated law on `dM_N`: frame caps on the quadric factors, a vMF
/// cap on the `x` sphere, and tilted octant scales, all anchored at a target
/// boundary point.
#[derive(Debug, Clone)]
pub struct BoundaryCap {
    pub shape: BlockIndex,
    pub scales: TiltedScales,
    pub x_cap: Option<(Vec<f64>, f64)>,
    pub z_cap: QuadricCap,
    pub w_cap: QuadricCap,
}

impl BoundaryCap {
    /// Anchor at a boundary point with angular concentration `kappa` and
    /// scale boost `kappa_t`.
    pub fn at(shape: BlockIndex, anchor: &[C64], kappa: f64, kappa_t: f64) -> Self {
        let x = &anchor[shape.x_range()];
        let z = &anchor[shape.z_range()];
        let w = &anchor[shape.w_range()];
        let t = [norm(x), norm(z), norm(w)];
        let x_cap = if shape.l > 0 {
            let mut flat = Vec::with_capacity(2 * shape.l);
            for c in x {
                flat.push(c.re / t[0]);
                flat.push(c.im / t[0]);
            }
            Some((flat, kappa))
        } else {
            None
        };
        let zu: Vec<C64> = z.iter().map(|c| c / t[1]).collect();
        let wu: Vec<C64> = w.iter().map(|c| c / t[2]).collect();
        BoundaryCap {
            shape,
            scales: TiltedScales::at(shape, t, kappa_t),
            x_cap: x_cap.map(|(f, k)| (f, k)),
            z_cap: QuadricCap::at(&zu, kappa),
            w_cap: QuadricCap::at(&wu, kappa),
        }
    }

    pub fn sample(&self, rng: &mut Prng) -> Vec<C64> {
        let t = self.scales.sample(rng);
        let mut coords = Vec::with_capacity(self.shape.ambient_dim());
        if let Some((mu, kappa)) = &self.x_cap {
            let flat = sample_vmf(mu, *kappa, rng);
            for p in flat.chunks_exact(2) {
                coords.push(C64::new(p[0], p[1]) * t[0]);
            }
        }
        for c in self.z_cap.sample(rng) {
            coords.push(c * t[1]);
        }
        for c in self.w_cap.sample(rng) {
            coords.push(c * t[2]);
        }
        coords
    }

    /// Log-likelihood ratio of the cap law against the base boundary law, at
    /// an arbitrary boundary point.
    pub fn log_ratio(&self, theta: &[C64]) -> f64 {
        let shape = self.shape;
        let x = &theta[shape.x_range()];
        let z = &theta[shape.z_range()];
        let w = &theta[shape.w_range()];
        let t = [norm(x), norm(z), norm(w)];
        let mut lr = self.scales.log_ratio(&t);
        if let Some((mu, kappa)) = &self.x_cap {
            let mut flat = Vec::with_capacity(2 * shape.l);
            for c in x {
                flat.push(c.re / t[0]);
                flat.push(c.im / t[0]);
            }
            lr += log_vmf_pdf(&flat, mu, *kappa) - log_uniform_sphere(2 * shape.l);
        }
        let zu: Vec<C64> = z.iter().map(|c| c / t[1]).collect();
        let wu: Vec<C64> = w.iter().map(|c| c / t[2]).collect();
        lr += self.z_cap.log_ratio(&zu);
        lr += self.w_cap.log_ratio(&wu);
        lr
    }
}
