//! Pointwise evaluation of the integral kernels: the Martinelli-Bochner pair
//! `(A, B_k)`, the Charpentier section and its `D` function, the reproducing
//! kernel `R`, the kernel-difference functional `Delta`, the Cauchy-type
//! comparison kernel `K_{lambda,Z}`, and the two equivalence surrogates.
//!
//! Every scalar constant that the source formulas leave unnamed is a field of
//! [`KernelConstants`]; nothing here hardcodes a normalization. Singular
//! evaluations (coincident points, Cauchy pole) are explicit errors so that
//! integration layers can decide their own exclusion policy.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::geometry::{bullet, herm, norm_sq, BlockIndex};

/// Calibrated scalar constants of the kernel formulas.
///
/// `a*` are the three group constants of `A`, `b*` those of the `B_k` groups
/// (i)/(ii)/(iii), `r*` those of `R`. `s_mb` and `s_rep` are the overall
/// constants of the boundary Martinelli-Bochner and boundary reproducing
/// terms; calibration normalizes them to 1 and lets the group constants carry
/// the scale (the products are the only identifiable quantities).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KernelConstants {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub s_mb: f64,
    pub s_rep: f64,
}

impl Default for KernelConstants {
    fn default() -> Self {
        KernelConstants {
            a1: 1.0,
            a2: 1.0,
            a3: 1.0,
            b1: 1.0,
            b2: 1.0,
            b3: 1.0,
            r1: 1.0,
            r2: 1.0,
            r3: 1.0,
            s_mb: 1.0,
            s_rep: 1.0,
        }
    }
}

/// A kernel was evaluated at (or too close to) its singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingularEval;

impl core::fmt::Display for SingularEval {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "kernel evaluated at its singularity")
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SingularEval {}

/// The three per-group factors of `A` before constants; `A = a1 g1 + a2 g2 +
/// a3 g3`.
pub fn eval_a_groups(shape: BlockIndex, theta: &[C64], zp: &[C64]) -> [C64; 3] {
    let (xi, zeta, eta) = split(shape, theta);
    let (x, z, w) = split(shape, zp);

    let zeta_sq = norm_sq(zeta);
    let eta_sq = norm_sq(eta);
    let z_zetabar = herm_c(z, zeta); // z . conj(zeta)
    let w_etabar = herm_c(w, eta);
    let fz = C64::new(zeta_sq, 0.0) + z_zetabar;
    let fw = C64::new(eta_sq, 0.0) + w_etabar;

    // (|xi|^2 - conj(x).xi)
    let g1_head = C64::new(norm_sq(xi), 0.0) - herm_c(xi, x);
    let g1 = g1_head * fz * fw;

    // -|z.zeta|^2 + |z.conj(zeta)|^2 - |zeta|^2 (|zeta|^2 + z.conj(zeta) - conj(z).zeta)
    let z_zeta = bullet_c(z, zeta);
    let g2_head = C64::new(z_zetabar.norm_sqr() - z_zeta.norm_sqr(), 0.0)
        - zeta_sq * (C64::new(zeta_sq, 0.0) + z_zetabar - z_zetabar.conj());
    let g2 = g2_head * fw;

    let w_eta = bullet_c(w, eta);
    let g3_head = C64::new(w_etabar.norm_sqr() - w_eta.norm_sqr(), 0.0)
        - eta_sq * (C64::new(eta_sq, 0.0) + w_etabar - w_etabar.conj());
    let g3 = g3_head * fz;

    [g1, g2, g3]
}

/// The polynomial `A(Theta, Z)` of the Martinelli-Bochner boundary kernel.
pub fn eval_a(shape: BlockIndex, theta: &[C64], zp: &[C64], c: &KernelConstants) -> C64 {
    let [g1, g2, g3] = eval_a_groups(shape, theta, zp);
    g1 * c.a1 + g2 * c.a2 + g3 * c.a3
}

/// Which constant group an ambient coordinate index belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BGroup {
    X,
    Z,
    W,
}

pub fn b_group(shape: BlockIndex, k: usize) -> BGroup {
    if k < shape.l {
        BGroup::X
    } else if k < shape.l + shape.n + 1 {
        BGroup::Z
    } else {
        BGroup::W
    }
}

/// `B_k(Theta, Z)` without its group constant (so calibration can fit the
/// three constants as linear coefficients).
pub fn eval_b_raw(shape: BlockIndex, k: usize, theta: &[C64], zp: &[C64]) -> C64 {
    assert!(k < shape.ambient_dim(), "component index out of range");
    let (xi, zeta, eta) = split(shape, theta);
    let (x, z, w) = split(shape, zp);
    let fz = C64::new(norm_sq(zeta), 0.0) + herm_c(z, zeta);
    let fw = C64::new(norm_sq(eta), 0.0) + herm_c(w, eta);
    match b_group(shape, k) {
        BGroup::X => (xi[k] - x[k]).conj() * fz * fw,
        BGroup::Z => {
            let j = k - shape.l;
            let head = (z[j] - zeta[j]).conj() * fz
                - (z[j] + zeta[j]) * bullet_diff(z, zeta, z).conj();
            head * fw
        }
        BGroup::W => {
            let i = k - shape.l - shape.n - 1;
            let head = (w[i] - eta[i]).conj() * fw
                - (w[i] + eta[i]) * bullet_diff(w, eta, w).conj();
            head * fz
        }
    }
}

/// `B_k(Theta, Z)` with its calibrated group constant.
pub fn eval_b(shape: BlockIndex, k: usize, theta: &[C64], zp: &[C64], c: &KernelConstants) -> C64 {
    let raw = eval_b_raw(shape, k, theta, zp);
    match b_group(shape, k) {
        BGroup::X => raw * c.b1,
        BGroup::Z => raw * c.b2,
        BGroup::W => raw * c.b3,
    }
}

/// The Charpentier section `s0(Theta, Z) = conj(Theta)(1 - Theta.conj(Z)) -
/// conj(Z)(1 - |Theta|^2)`.
pub fn charpentier_s0(theta: &[C64], zp: &[C64]) -> Vec<C64> {
    let tz = herm(theta, zp); // Theta . conj(Z)
    let tt = norm_sq(theta);
    let f1 = C64::ONE - tz;
    let f2 = 1.0 - tt;
    theta
        .iter()
        .zip(zp)
        .map(|(t, z)| t.conj() * f1 - z.conj() * f2)
        .collect()
}

/// The section-based `D`: `s0(Theta,Z) . (Theta - Z)`. Returned as complex,
/// but it is real-valued: expanding the bullet product gives exactly
/// `|1 - Theta.conj(Z)|^2 - (1-|Theta|^2)(1-|Z|^2)`, i.e. [`eval_d`].
pub fn charpentier_d_section(theta: &[C64], zp: &[C64]) -> C64 {
    let s0 = charpentier_s0(theta, zp);
    let diff: Vec<C64> = theta.iter().zip(zp).map(|(t, z)| t - z).collect();
    bullet(&s0, &diff).expect("equal lengths")
}

/// The real `D` function: `|1 - Theta.conj(Z)|^2 - (1-|Theta|^2)(1-|Z|^2)`.
pub fn eval_d(theta: &[C64], zp: &[C64]) -> f64 {
    let tz = herm(theta, zp);
    (C64::ONE - tz).norm_sqr() - (1.0 - norm_sq(theta)) * (1.0 - norm_sq(zp))
}

/// Group factors of the reproducing kernel `R`; `R = (r1|xi|^2 + r2|zeta|^2 +
/// r3|eta|^2) (|zeta|^2 + z.conj(zeta)) (|eta|^2 + w.conj(eta))`.
pub fn eval_r_groups(shape: BlockIndex, theta: &[C64], zp: &[C64]) -> [C64; 3] {
    let (xi, zeta, eta) = split(shape, theta);
    let (_, z, w) = split(shape, zp);
    let fz = C64::new(norm_sq(zeta), 0.0) + herm_c(z, zeta);
    let fw = C64::new(norm_sq(eta), 0.0) + herm_c(w, eta);
    let tail = fz * fw;
    [
        tail * norm_sq(xi),
        tail * norm_sq(zeta),
        tail * norm_sq(eta),
    ]
}

pub fn eval_r(shape: BlockIndex, theta: &[C64], zp: &[C64], c: &KernelConstants) -> C64 {
    let [g1, g2, g3] = eval_r_groups(shape, theta, zp);
    g1 * c.r1 + g2 * c.r2 + g3 * c.r3
}

/// `Delta(Theta, Z, Z')`: the summed absolute kernel differences used by the
/// second scaling law, with calibrated `B` constants.
pub fn eval_delta(
    shape: BlockIndex,
    theta: &[C64],
    zp: &[C64],
    zq: &[C64],
    c: &KernelConstants,
) -> Result<f64, SingularEval> {
    let dz: f64 = dist(theta, zp);
    let dq: f64 = dist(theta, zq);
    if dz < 1e-14 || dq < 1e-14 {
        return Err(SingularEval);
    }
    let two_n = 2 * shape.total() as i32;
    let pz = dz.powi(two_n);
    let pq = dq.powi(two_n);
    let (_, zeta, eta) = split(shape, theta);
    let denom = norm_sq(zeta) * norm_sq(eta);
    if denom == 0.0 {
        return Err(SingularEval);
    }
    let mut sum = 0.0;
    for k in 0..shape.ambient_dim() {
        let bk_z = eval_b(shape, k, theta, zp, c);
        let bk_q = eval_b(shape, k, theta, zq, c);
        sum += (bk_z / pz - bk_q / pq).norm();
    }
    Ok(sum / denom)
}

/// `K_{lambda,Z}(Theta) = |1 - Theta.conj(Z)|^{-(|N|+1+lambda)}`.
pub fn eval_k_lambda(
    shape: BlockIndex,
    theta: &[C64],
    zp: &[C64],
    lambda: f64,
) -> Result<f64, SingularEval> {
    let d = (C64::ONE - herm(theta, zp)).norm();
    if d < 1e-300 {
        return Err(SingularEval);
    }
    Ok(d.powf(-(shape.total() as f64 + 1.0 + lambda)))
}

/// Right-hand side of the first Bonami-Charpentier equivalence:
/// `(1-|Z|^2) + (1-|Theta|^2) + |Im Theta.conj(Z)| + |Theta-Z|^2`.
pub fn equiv_surrogate_61(theta: &[C64], zp: &[C64]) -> f64 {
    (1.0 - norm_sq(zp)) + (1.0 - norm_sq(theta)) + herm(theta, zp).im.abs() + dist_sq(theta, zp)
}

/// Right-hand side of the second equivalence (the `D` surrogate):
/// `(1-|Z|^2)|Theta-Z|^2 + (|Theta|^2-|Z|^2)^2 + |Im Theta.conj(Z)|^2 +
/// |Theta-Z|^4`.
pub fn equiv_surrogate_62(theta: &[C64], zp: &[C64]) -> f64 {
    let d2 = dist_sq(theta, zp);
    let ns = norm_sq(theta) - norm_sq(zp);
    (1.0 - norm_sq(zp)) * d2 + ns * ns + herm(theta, zp).im.powi(2) + d2 * d2
}

/// Martinelli-Bochner boundary kernel against a 0-form value:
/// `s_mb A(Theta,Z) / (|Z-Theta|^{2|N|} |zeta|^2 |eta|^2)`.
pub fn mb_boundary_kernel(
    shape: BlockIndex,
    theta: &[C64],
    zp: &[C64],
    c: &KernelConstants,
) -> Result<C64, SingularEval> {
    let d = dist(theta, zp);
    if d < 1e-14 {
        return Err(SingularEval);
    }
    let (_, zeta, eta) = split(shape, theta);
    let denom = d.powi(2 * shape.total() as i32) * norm_sq(zeta) * norm_sq(eta);
    if denom == 0.0 {
        return Err(SingularEval);
    }
    Ok(eval_a(shape, theta, zp, c) * (c.s_mb / denom))
}

/// Boundary reproducing kernel `s_rep R(Theta,Z) / ((1 - Z.conj(Theta))^{|N|}
/// |zeta|^2 |eta|^2)`; holomorphic in `Z`.
pub fn reproducing_kernel(
    shape: BlockIndex,
    theta: &[C64],
    zp: &[C64],
    c: &KernelConstants,
) -> Result<C64, SingularEval> {
    // (1 - Z . conj(Theta))
    let base = C64::ONE - herm(zp, theta);
    if base.norm() < 1e-300 {
        return Err(SingularEval);
    }
    let (_, zeta, eta) = split(shape, theta);
    let denom = norm_sq(zeta) * norm_sq(eta);
    if denom == 0.0 {
        return Err(SingularEval);
    }
    let pow = base.powi(shape.total() as i32);
    Ok(eval_r(shape, theta, zp, c) * (c.s_rep / denom) / pow)
}

fn split(shape: BlockIndex, v: &[C64]) -> (&[C64], &[C64], &[C64]) {
    debug_assert_eq!(v.len(), shape.ambient_dim());
    (
        &v[shape.x_range()],
        &v[shape.z_range()],
        &v[shape.w_range()],
    )
}

// `a . conj(b)` for block slices (bullet with the second slot conjugated).
fn herm_c(a: &[C64], b: &[C64]) -> C64 {
    herm(a, b)
}

fn bullet_c(a: &[C64], b: &[C64]) -> C64 {
    bullet(a, b).expect("equal block lengths")
}

// `a . (b - c)` without allocating.
fn bullet_diff(a: &[C64], b: &[C64], c: &[C64]) -> C64 {
    a.iter()
        .zip(b.iter().zip(c))
        .map(|(ai, (bi, ci))| ai * (bi - ci))
        .sum()
}

pub fn dist_sq(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum()
}

pub fn dist(a: &[C64], b: &[C64]) -> f64 {
    dist_sq(a, b).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::AmbientPoint;
    use crate::sampling::{boundary_batch, sample_boundary_point};
    use crate::stats::{stream, Prng, RngExt};
    use alloc::vec;
    use alloc::vec::Vec;
    use approx::assert_abs_diff_eq;

    const SHAPE: BlockIndex = BlockIndex { l: 1, n: 2, m: 2 };

    fn random_ball_point(dim: usize, rng: &mut Prng) -> Vec<C64> {
        loop {
            let v: Vec<C64> = (0..dim)
                .map(|_| C64::new(rng.normal() * 0.4, rng.normal() * 0.4))
                .collect();
            if norm_sq(&v) < 1.0 {
                return v;
            }
        }
    }

    fn random_ambient_pair(rng: &mut Prng) -> (Vec<C64>, Vec<C64>) {
        let d = SHAPE.ambient_dim();
        (random_ball_point(d, rng), random_ball_point(d, rng))
    }

    #[test]
    fn a_collapses_at_origin() {
        let mut rng = stream(21, 0);
        let theta = sample_boundary_point(SHAPE, rng_mut(&mut rng));
        let zero = vec![C64::ZERO; SHAPE.ambient_dim()];
        let c = KernelConstants::default();
        let a = eval_a(SHAPE, &theta, &zero, &c);
        let (xi, zeta, eta) = split(SHAPE, &theta);
        let expect = norm_sq(xi) * norm_sq(zeta) * norm_sq(eta)
            - norm_sq(zeta).powi(2) * norm_sq(eta)
            - norm_sq(eta).powi(2) * norm_sq(zeta);
        assert_abs_diff_eq!(a.re, expect, epsilon = 1e-13);
        assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-13);
    }

    fn rng_mut(r: &mut Prng) -> &mut Prng {
        r
    }

    #[test]
    fn a_linear_in_constants() {
        let mut rng = stream(22, 0);
        let (theta, zp) = random_ambient_pair(&mut rng);
        let c1 = KernelConstants { a1: 0.3, a2: -1.2, a3: 2.0, ..Default::default() };
        let c2 = KernelConstants { a1: 0.6, a2: -2.4, a3: 4.0, ..Default::default() };
        let v1 = eval_a(SHAPE, &theta, &zp, &c1);
        let v2 = eval_a(SHAPE, &theta, &zp, &c2);
        assert!((v2 - v1 * 2.0).norm() <= 1e-12 * v1.norm().max(1.0));
    }

    #[test]
    fn b_vanishing_cases() {
        let mut rng = stream(23, 0);
        let (theta, mut zp) = random_ambient_pair(&mut rng);
        let c = KernelConstants::default();
        // group (i) at Theta = Z
        let b0 = eval_b(SHAPE, 0, &theta, &theta, &c);
        assert!(b0.norm() <= 1e-14);
        // group (ii) at zeta = z: both z_j - zeta_j and z.(zeta - z) vanish
        for (zi, ti) in zp[SHAPE.z_range()]
            .to_vec()
            .iter_mut()
            .zip(theta[SHAPE.z_range()].to_vec())
        {
            *zi = ti;
        }
        let zr = SHAPE.z_range();
        let theta_z: Vec<C64> = theta[zr.clone()].to_vec();
        zp[zr].copy_from_slice(&theta_z);
        for k in SHAPE.z_range() {
            let b = eval_b(SHAPE, k, &theta, &zp, &c);
            assert!(b.norm() <= 1e-13, "B_{k} = {b} should vanish at zeta = z");
        }
    }

    #[test]
    fn b_growth_bound_empirical() {
        let mut rng = stream(24, 0);
        let c = KernelConstants::default();
        let mut worst: f64 = 0.0;
        for _ in 0..10_000 {
            let (theta, zp) = random_ambient_pair(&mut rng);
            let (_, zeta, eta) = split(SHAPE, &theta);
            let (_, z, w) = split(SHAPE, &zp);
            let bound = dist(&theta, &zp)
                * (norm_sq(zeta) + norm_sq(z).sqrt() * norm_sq(zeta).sqrt())
                * (norm_sq(eta) + norm_sq(w).sqrt() * norm_sq(eta).sqrt());
            if bound < 1e-12 {
                continue;
            }
            for k in 0..SHAPE.ambient_dim() {
                let b = eval_b(SHAPE, k, &theta, &zp, &c).norm();
                worst = worst.max(b / bound);
            }
        }
        // empirical constant for the analogous growth bound; reported, and
        // sanity-checked to be finite and of moderate size
        assert!(worst.is_finite() && worst < 100.0, "empirical growth ratio {worst}");
    }

    #[test]
    fn b_annihilates_conormal_directions() {
        // sum over the z-group of B_k * conj(zeta_j) vanishes when z.z = 0;
        // the volume kernel is insensitive to conormal components of the form
        let mut rng = stream(25, 0);
        let c = KernelConstants::default();
        for _ in 0..100 {
            let theta = sample_boundary_point(SHAPE, &mut rng);
            let zp = sample_boundary_point(SHAPE, &mut rng);
            let mut acc = C64::ZERO;
            for k in SHAPE.z_range() {
                let j = k - SHAPE.l;
                acc += eval_b(SHAPE, k, &theta, &zp, &c) * theta[SHAPE.z_range()][j].conj();
            }
            assert!(acc.norm() <= 1e-12, "conormal contraction {acc}");
        }
    }

    #[test]
    fn d_identities() {
        let mut rng = stream(26, 0);
        for _ in 0..2_000 {
            let (theta, zp) = random_ambient_pair(&mut rng);
            let section = charpentier_d_section(&theta, &zp);
            let real = eval_d(&theta, &zp);
            // the section form is identically the real D function
            assert_abs_diff_eq!(section.re, real, epsilon = 1e-12);
            assert_abs_diff_eq!(section.im, 0.0, epsilon = 1e-12);
            // D >= 0 and symmetric
            assert!(real >= -1e-12);
            assert_abs_diff_eq!(real, eval_d(&zp, &theta), epsilon = 1e-12);
        }
        // coincident points and zero
        let z = random_ball_point(SHAPE.ambient_dim(), &mut rng);
        assert_abs_diff_eq!(eval_d(&z, &z), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(charpentier_d_section(&z, &z).norm(), 0.0, epsilon = 1e-14);
        let zero = vec![C64::ZERO; SHAPE.ambient_dim()];
        assert_abs_diff_eq!(
            charpentier_d_section(&z, &zero).re,
            norm_sq(&z),
            epsilon = 1e-14
        );
    }

    #[test]
    fn d_section_matches_on_sphere() {
        let mut rng = stream(27, 0);
        for _ in 0..200 {
            let theta = sample_boundary_point(SHAPE, &mut rng);
            let zp = random_ball_point(SHAPE.ambient_dim(), &mut rng);
            let section = charpentier_d_section(&theta, &zp);
            assert_abs_diff_eq!(section.im, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(
                section.re,
                (C64::ONE - herm(&theta, &zp)).norm_sqr(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn r_at_origin_and_holomorphy() {
        let mut rng = stream(28, 0);
        let theta = sample_boundary_point(SHAPE, &mut rng);
        let zero = vec![C64::ZERO; SHAPE.ambient_dim()];
        let c = KernelConstants { r1: 0.7, r2: -0.2, r3: 1.5, ..Default::default() };
        let (xi, zeta, eta) = split(SHAPE, &theta);
        let expect = (c.r1 * norm_sq(xi) + c.r2 * norm_sq(zeta) + c.r3 * norm_sq(eta))
            * norm_sq(zeta)
            * norm_sq(eta);
        let got = eval_r(SHAPE, &theta, &zero, &c);
        assert_abs_diff_eq!(got.re, expect, epsilon = 1e-13);
        assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-13);

        // Cauchy-Riemann residual of Z -> R(Theta, Z) in each coordinate:
        // d/d(conj Z_k) = (d/dRe + i d/dIm)/2 must vanish for a holomorphic map
        let zp = random_ball_point(SHAPE.ambient_dim(), &mut rng);
        let h = 1e-4;
        for k in 0..SHAPE.ambient_dim() {
            let mut zp_re_p = zp.clone();
            zp_re_p[k] += C64::new(h, 0.0);
            let mut zp_re_m = zp.clone();
            zp_re_m[k] -= C64::new(h, 0.0);
            let mut zp_im_p = zp.clone();
            zp_im_p[k] += C64::new(0.0, h);
            let mut zp_im_m = zp.clone();
            zp_im_m[k] -= C64::new(0.0, h);
            let d_re = (eval_r(SHAPE, &theta, &zp_re_p, &c) - eval_r(SHAPE, &theta, &zp_re_m, &c))
                / (2.0 * h);
            let d_im = (eval_r(SHAPE, &theta, &zp_im_p, &c) - eval_r(SHAPE, &theta, &zp_im_m, &c))
                / (2.0 * h);
            let dbar = (d_re + C64::new(0.0, 1.0) * d_im) * 0.5;
            assert!(dbar.norm() <= 1e-6, "CR residual {} at coordinate {k}", dbar.norm());
        }
    }

    #[test]
    fn delta_symmetry_and_trivial_zero() {
        let mut rng = stream(29, 0);
        let c = KernelConstants::default();
        let theta = sample_boundary_point(SHAPE, &mut rng);
        let (zp, zq) = random_ambient_pair(&mut rng);
        assert_abs_diff_eq!(
            eval_delta(SHAPE, &theta, &zp, &zp, &c).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        let d1 = eval_delta(SHAPE, &theta, &zp, &zq, &c).unwrap();
        let d2 = eval_delta(SHAPE, &theta, &zq, &zp, &c).unwrap();
        assert_abs_diff_eq!(d1, d2, epsilon = 1e-12 * d1.abs().max(1.0));
        assert!(eval_delta(SHAPE, &theta, &theta, &zq, &c).is_err());
    }

    #[test]
    fn delta_far_field_decay() {
        // |Theta - Z| >= 2C|Z - Z'| regime: Delta <= const |Z-Z'| (1 +
        // |z|/|zeta| + |w|/|eta|)^3 |Theta - Z|^{-2|N|}; empirical constant
        let mut rng = stream(30, 0);
        let c = KernelConstants::default();
        let mut worst: f64 = 0.0;
        let mut count = 0;
        while count < 2_000 {
            let theta = sample_boundary_point(SHAPE, &mut rng);
            let zp = random_ball_point(SHAPE.ambient_dim(), &mut rng);
            // Z' close to Z
            let mut zq = zp.clone();
            for q in zq.iter_mut() {
                *q += C64::new(rng.normal(), rng.normal()) * 0.01;
            }
            let sep = dist(&zp, &zq);
            if dist(&theta, &zp) < 4.0 * sep {
                continue;
            }
            count += 1;
            let (_, zeta, eta) = split(SHAPE, &theta);
            let (_, z, w) = split(SHAPE, &zp);
            let weight = 1.0
                + (norm_sq(z) / norm_sq(zeta)).sqrt()
                + (norm_sq(w) / norm_sq(eta)).sqrt();
            let bound = sep * weight.powi(3)
                * dist(&theta, &zp).powi(-(2 * SHAPE.total() as i32))
                + sep * weight.powi(3) * dist(&theta, &zq).powi(-(2 * SHAPE.total() as i32));
            let delta = eval_delta(SHAPE, &theta, &zp, &zq, &c).unwrap();
            worst = worst.max(delta / bound);
        }
        assert!(worst.is_finite() && worst < 500.0, "far-field ratio {worst}");
    }

    #[test]
    fn k_lambda_values() {
        let mut rng = stream(31, 0);
        let theta = sample_boundary_point(SHAPE, &mut rng);
        let zero = vec![C64::ZERO; SHAPE.ambient_dim()];
        assert_abs_diff_eq!(
            eval_k_lambda(SHAPE, &theta, &zero, 0.7).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        // Theta = Z with |Z|^2 = 1 - delta gives delta^{-(|N|+1+lambda)}
        let delta = 0.1;
        let scale = (1.0 - delta).sqrt();
        let zp: Vec<C64> = theta.iter().map(|t| t * scale).collect();
        let lam = 0.5;
        let got = eval_k_lambda(SHAPE, &zp, &zp, lam).unwrap();
        let expect = (1.0 - (1.0 - delta)).powf(-(SHAPE.total() as f64 + 1.0 + lam));
        assert_abs_diff_eq!(got / expect, 1.0, epsilon = 1e-10);
        // lambda -> 0 continuity at fixed pair
        let k1 = eval_k_lambda(SHAPE, &theta, &zp, 1e-9).unwrap();
        let k0 = eval_k_lambda(SHAPE, &theta, &zp, 0.0).unwrap();
        assert_abs_diff_eq!(k1 / k0, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn surrogates_basic() {
        let mut rng = stream(32, 0);
        let zp = random_ball_point(SHAPE.ambient_dim(), &mut rng);
        // at Theta = Z: surrogate_61 = 2(1-|Z|^2), ratio vs |1-|Z|^2| in [1/2, 2]
        let s61 = equiv_surrogate_61(&zp, &zp);
        let lhs = (1.0 - norm_sq(&zp)).abs();
        let ratio = lhs / s61;
        assert!((0.5..=2.0).contains(&ratio));
        assert_abs_diff_eq!(equiv_surrogate_62(&zp, &zp), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eval_d(&zp, &zp), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn surrogate_61_equivalence_sweep() {
        // the ratio |1 - Theta.conj(Z)| / surrogate stays in a fixed bracket
        // over random ball pairs; the empirical constant is reported
        let mut rng = stream(33, 0);
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for _ in 0..100_000 {
            let (theta, zp) = random_ambient_pair(&mut rng);
            let lhs = (C64::ONE - herm(&theta, &zp)).norm();
            let rhs = equiv_surrogate_61(&theta, &zp);
            let r = lhs / rhs;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        assert!(lo > 0.0 && hi.is_finite());
        assert!(hi / lo < 100.0, "equivalence bracket [{lo}, {hi}]");
        // D vs surrogate 62
        let mut lo2 = f64::INFINITY;
        let mut hi2: f64 = 0.0;
        for _ in 0..100_000 {
            let (theta, zp) = random_ambient_pair(&mut rng);
            let lhs = eval_d(&theta, &zp).max(1e-300);
            let rhs = equiv_surrogate_62(&theta, &zp).max(1e-300);
            let r = lhs / rhs;
            lo2 = lo2.min(r);
            hi2 = hi2.max(r);
        }
        assert!(hi2 / lo2 < 100.0, "D bracket [{lo2}, {hi2}]");
    }

    #[test]
    fn polynomial_degree_audit() {
        // A, B_k, R are polynomial in (Theta, conj Theta, Z, conj Z) of low
        // total degree: 8th-order finite differences along a random complex
        // line in (Theta, Z) jointly must vanish
        let mut rng = stream(34, 0);
        let (theta0, zp0) = random_ambient_pair(&mut rng);
        let dir_t: Vec<C64> = (0..SHAPE.ambient_dim())
            .map(|_| C64::new(rng.normal(), rng.normal()) * 0.05)
            .collect();
        let dir_z: Vec<C64> = (0..SHAPE.ambient_dim())
            .map(|_| C64::new(rng.normal(), rng.normal()) * 0.05)
            .collect();
        let c = KernelConstants::default();
        let eval_line = |s: f64, which: usize| -> C64 {
            let theta: Vec<C64> = theta0.iter().zip(&dir_t).map(|(a, d)| a + d * s).collect();
            let zp: Vec<C64> = zp0.iter().zip(&dir_z).map(|(a, d)| a + d * s).collect();
            match which {
                0 => eval_a(SHAPE, &theta, &zp, &c),
                1 => eval_b(SHAPE, SHAPE.l + 1, &theta, &zp, &c),
                _ => eval_r(SHAPE, &theta, &zp, &c),
            }
        };
        // 9-point forward difference of order 8 kills polynomials of degree <= 7
        let binom = [1.0, -8.0, 28.0, -56.0, 70.0, -56.0, 28.0, -8.0, 1.0];
        for which in 0..3 {
            let mut acc = C64::ZERO;
            let mut scale = 0.0f64;
            for (j, b) in binom.iter().enumerate() {
                let v = eval_line(j as f64, which);
                acc += v * *b;
                scale = scale.max(v.norm());
            }
            assert!(
                acc.norm() <= 1e-8 * scale.max(1.0),
                "8th difference {} for kernel {which}",
                acc.norm()
            );
        }
    }

    #[test]
    fn b_group_ii_homogeneity() {
        // under zeta -> t zeta, z -> t z the z-group of B scales by t^3 while
        // the eta factor is unchanged
        let mut rng = stream(35, 0);
        let c = KernelConstants::default();
        let (theta, zp) = random_ambient_pair(&mut rng);
        let t = 1.7;
        let mut theta_s = theta.clone();
        let mut zp_s = zp.clone();
        for k in SHAPE.z_range() {
            theta_s[k] *= t;
            zp_s[k] *= t;
        }
        for k in SHAPE.z_range() {
            let b = eval_b(SHAPE, k, &theta, &zp, &c);
            let bs = eval_b(SHAPE, k, &theta_s, &zp_s, &c);
            assert!((bs - b * t.powi(3)).norm() <= 1e-10 * b.norm().max(1.0));
        }
    }

    #[test]
    fn mb_and_reproducing_kernels_are_finite_on_batches() {
        let mut rng = stream(36, 0);
        let c = KernelConstants::default();
        let batch = boundary_batch(SHAPE, 1_000, &mut rng);
        let probe = {
            let mut p = AmbientPoint::zero(SHAPE);
            p.coords[0] = C64::new(0.3, 0.0);
            p.coords[SHAPE.l] = C64::new(0.2, 0.1);
            p.coords[SHAPE.l + 1] = C64::new(0.1, -0.2);
            p
        };
        for (theta, _) in batch.iter() {
            assert!(mb_boundary_kernel(SHAPE, theta, &probe.coords, &c)
                .unwrap()
                .norm()
                .is_finite());
            assert!(reproducing_kernel(SHAPE, theta, &probe.coords, &c)
                .unwrap()
                .norm()
                .is_finite());
        }
    }
}
