//! Finite-difference verification that a numerical solution satisfies
//! `dbar u = f` tangentially along the quadric manifold.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::geometry::{reproject, tangent_basis, AmbientPoint, BlockIndex};
use crate::operators::forms::Form01;

/// Antiholomorphic directional derivative `sum_k (du/d conj(Theta_k)) conj(v_k)`
/// of a scalar field along a complex tangent vector `v`, by centered
/// differences along quadric-projected curves:
/// `(D_v u + i D_{iv} u) / 2`.
pub fn antiholo_derivative<U: Fn(&[C64]) -> C64>(
    u: U,
    z: &AmbientPoint,
    v: &[C64],
    h: f64,
) -> C64 {
    let d_re = directional_diff(&u, z, v, h, C64::ONE);
    let d_im = directional_diff(&u, z, v, h, C64::new(0.0, 1.0));
    (d_re + C64::new(0.0, 1.0) * d_im) * 0.5
}

/// Holomorphic directional derivative `sum_k (du/dTheta_k) v_k` by the
/// complementary combination `(D_v u - i D_{iv} u) / 2`.
pub fn holo_derivative<U: Fn(&[C64]) -> C64>(u: U, z: &AmbientPoint, v: &[C64], h: f64) -> C64 {
    let d_re = directional_diff(&u, z, v, h, C64::ONE);
    let d_im = directional_diff(&u, z, v, h, C64::new(0.0, 1.0));
    (d_re - C64::new(0.0, 1.0) * d_im) * 0.5
}

fn directional_diff<U: Fn(&[C64]) -> C64>(
    u: &U,
    z: &AmbientPoint,
    v: &[C64],
    h: f64,
    phase: C64,
) -> C64 {
    let step = |s: f64| -> Vec<C64> {
        let coords: Vec<C64> = z
            .coords
            .iter()
            .zip(v)
            .map(|(zi, vi)| zi + vi * phase * s)
            .collect();
        let p = AmbientPoint::new(coords, z.shape).expect("shape preserved");
        // quadric projection keeps the curve on the manifold; for tangent v
        // the correction is O(s^2), preserving the first derivative
        match reproject(&p, 1e-12) {
            Ok(q) => q.coords,
            Err(_) => p.coords,
        }
    };
    let plus = step(h);
    let minus = step(-h);
    (u(&plus) - u(&minus)) / (2.0 * h)
}

/// Maximum discrepancy between the tangential dbar of `u_num` and the form
/// contraction over an orthonormal complex tangent basis at `z`.
pub fn dbar_residual_tangential<U: Fn(&[C64]) -> C64>(
    u_num: U,
    f: &Form01,
    z: &AmbientPoint,
    h: f64,
) -> f64 {
    let basis = tangent_basis(z);
    let mut worst: f64 = 0.0;
    for v in &basis {
        let d = antiholo_derivative(&u_num, z, v, h);
        let target = f.contract_conj(&z.coords, v);
        worst = worst.max((d - target).norm());
    }
    worst
}

/// Plain flat-space dbar residual on the domain side: centered differences in
/// every coordinate of `C^{|N|}`, no projection.
pub fn dbar_residual_domain<U: Fn(&[C64]) -> C64>(
    u_num: U,
    f_component: impl Fn(usize, &[C64]) -> C64,
    zt: &[C64],
    shape: BlockIndex,
    h: f64,
) -> f64 {
    let dim = shape.domain_dim();
    let mut worst: f64 = 0.0;
    for k in 0..dim {
        let mut p_re = zt.to_vec();
        p_re[k] += C64::new(h, 0.0);
        let mut m_re = zt.to_vec();
        m_re[k] -= C64::new(h, 0.0);
        let mut p_im = zt.to_vec();
        p_im[k] += C64::new(0.0, h);
        let mut m_im = zt.to_vec();
        m_im[k] -= C64::new(0.0, h);
        let d_re = (u_num(&p_re) - u_num(&m_re)) / (2.0 * h);
        let d_im = (u_num(&p_im) - u_num(&m_im)) / (2.0 * h);
        let dbar = (d_re + C64::new(0.0, 1.0) * d_im) * 0.5;
        worst = worst.max((dbar - f_component(k, zt)).norm());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::stream;

    fn probe_points(shape: BlockIndex, count: usize, seed: u64) -> Vec<AmbientPoint> {
        let mut rng = stream(seed, 0);
        (0..count)
            .map(|_| {
                let t = crate::sampling::sample_boundary_point(shape, &mut rng);
                AmbientPoint::new(t.iter().map(|c| c * 0.55).collect(), shape).unwrap()
            })
            .collect()
    }

    #[test]
    fn holomorphic_gives_tiny_residual() {
        let shape = BlockIndex::new(1, 2, 2);
        let f = Form01::zero(shape);
        for z in probe_points(shape, 10, 71) {
            // u = z1^2 + x1 w1, holomorphic: residual is O(h^2)
            let r = dbar_residual_tangential(
                |t| t[shape.l] * t[shape.l] + t[0] * t[shape.l + shape.n + 1],
                &f,
                &z,
                1e-4,
            );
            assert!(r <= 1e-6, "holomorphic residual {r}");
        }
    }

    #[test]
    fn exact_pairs_have_small_residual() {
        let shape = BlockIndex::new(1, 2, 2);
        let z1 = shape.l;
        // u = conj(z1), f = d conj(z1)
        let f = Form01::conj_coordinate(shape, z1);
        for z in probe_points(shape, 10, 72) {
            let r = dbar_residual_tangential(|t| t[z1].conj(), &f, &z, 1e-4);
            assert!(r <= 1e-6, "conj pair residual {r}");
        }
        // u = |z1|^2, f = z1 d conj(z1)
        let f2 = Form01::with_potential(
            shape,
            move |k, t| if k == z1 { t[z1] } else { C64::ZERO },
            move |t| C64::new(t[z1].norm_sqr(), 0.0),
        );
        for z in probe_points(shape, 10, 73) {
            let r = dbar_residual_tangential(|t| C64::new(t[z1].norm_sqr(), 0.0), &f2, &z, 1e-4);
            assert!(r <= 1e-6, "|z1|^2 residual {r}");
        }
    }

    #[test]
    fn domain_residual_flat_pairs() {
        let shape = BlockIndex::new(0, 2, 2);
        let mut rng = stream(74, 0);
        for _ in 0..10 {
            let zt: Vec<C64> = (0..shape.domain_dim())
                .map(|_| C64::new(rng.normal(), rng.normal()) * 0.2)
                .collect();
            // u = conj(z~1) w~1: dbar = w~1 d conj(z~1)
            let r = dbar_residual_domain(
                |p| p[0].conj() * p[2],
                |k, p| if k == 0 { p[2] } else { C64::ZERO },
                &zt,
                shape,
                1e-4,
            );
            assert!(r <= 1e-7, "flat residual {r}");
        }
    }

    use crate::stats::RngExt;
}
