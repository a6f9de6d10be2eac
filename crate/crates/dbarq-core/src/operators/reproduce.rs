//! Boundary integral operators: the reproducing (Cauchy-type) term and the
//! Martinelli-Bochner boundary term.

use num_complex::Complex64 as C64;

use crate::geometry::AmbientPoint;
use crate::kernels::{mb_boundary_kernel, reproducing_kernel, KernelConstants};
use crate::sampling::{integrate, IntegralEstimate, SampleBatch};

/// `int_{dM_N} R(Theta,Z)/(1-Z.conj(Theta))^{|N|} u(Theta)
/// dsigma/(|zeta|^2|eta|^2)`, scaled by the calibrated constant. Reproduces
/// boundary values of dbar-closed functions at interior points.
pub fn reproduce_boundary<U: Fn(&[C64]) -> C64>(
    u: U,
    zp: &AmbientPoint,
    c: &KernelConstants,
    batch: &SampleBatch,
) -> IntegralEstimate {
    integrate(batch, |theta| {
        match reproducing_kernel(zp.shape, theta, &zp.coords, c) {
            Ok(k) => k * u(theta),
            Err(_) => C64::new(f64::NAN, 0.0),
        }
    })
}

/// The Martinelli-Bochner boundary term
/// `int_{dM_N} A(Theta,Z)/|Z-Theta|^{2|N|} u(Theta) dsigma/(|zeta|^2|eta|^2)`.
pub fn mb_boundary<U: Fn(&[C64]) -> C64>(
    u: U,
    zp: &AmbientPoint,
    c: &KernelConstants,
    batch: &SampleBatch,
) -> IntegralEstimate {
    integrate(batch, |theta| {
        match mb_boundary_kernel(zp.shape, theta, &zp.coords, c) {
            Ok(k) => k * u(theta),
            Err(_) => C64::new(f64::NAN, 0.0),
        }
    })
}
