//! The dbar solution operators: the Martinelli-Bochner volume operator `J2`,
//! the potential-mode operator `T2`, and the transferred operator `T` on the
//! flat domain.

#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64 as C64;

use crate::geometry::{lift, norm_sq, AmbientPoint, DomainPoint, GeometryError, LiftBranch};
use crate::kernels::{dist, eval_b, KernelConstants};
use crate::operators::forms::{DomainForm, Form01};
use crate::operators::nearfield::SingularVolumeEngine;
use crate::operators::reproduce::reproduce_boundary;
use crate::sampling::SampleBatch;

/// Operator-layer failure modes.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorError {
    /// potential-mode operator invoked on a form without a potential
    MissingPotential,
    /// lift undefined on the degenerate slices
    Geometry(GeometryError),
}

impl core::fmt::Display for OperatorError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            OperatorError::MissingPotential => write!(f, "form carries no potential"),
            OperatorError::Geometry(g) => write!(f, "{g}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for OperatorError {}

impl From<GeometryError> for OperatorError {
    fn from(g: GeometryError) -> Self {
        OperatorError::Geometry(g)
    }
}

/// The Martinelli-Bochner volume solution operator:
/// `J2 f(Z) = int_{M_N} sum_k B_k(Theta,Z) f_k(Theta) / (|Z-Theta|^{2|N|}
/// |zeta|^2 |eta|^2) dV(Theta)`, evaluated with the engine's near-field
/// densification and moving exclusion ball.
pub fn solve_j2(
    f: &Form01,
    engine: &SingularVolumeEngine<'_>,
    eval_z: &[C64],
    c: &KernelConstants,
) -> C64 {
    let shape = f.shape;
    let two_n = 2 * shape.total() as i32;
    engine.integrate(eval_z, |theta| {
        let zeta = &theta[shape.z_range()];
        let eta = &theta[shape.w_range()];
        let denom = dist(theta, eval_z).powi(two_n) * norm_sq(zeta) * norm_sq(eta);
        if denom == 0.0 {
            return C64::ZERO;
        }
        let mut acc = C64::ZERO;
        for k in 0..shape.ambient_dim() {
            let fk = f.component(k, theta);
            if fk != C64::ZERO {
                acc += eval_b(shape, k, theta, eval_z, c) * fk;
            }
        }
        acc / denom
    })
}

/// Potential-mode solution: `T2 f(Z) = u0(Z) - int_{dM_N} R-kernel u0 dsigma`.
/// Agrees with the canonical solution operator on the manifold; the output
/// differs from `u0` by a function holomorphic on `M_N`.
pub fn solve_t2_potential(
    f: &Form01,
    zp: &AmbientPoint,
    c: &KernelConstants,
    boundary: &SampleBatch,
) -> Result<(C64, f64), OperatorError> {
    if !f.has_potential() {
        return Err(OperatorError::MissingPotential);
    }
    let u0 = |theta: &[C64]| f.potential(theta).expect("potential present");
    let est = reproduce_boundary(u0, zp, c, boundary);
    Ok((u0(&zp.coords) - est.value, est.std_error))
}

/// The transferred operator on the flat domain: pull the form back through
/// the proper map, lift the evaluation point (branch choice is immaterial up
/// to Monte Carlo error), and evaluate the potential-mode solution.
pub fn solve_t_omega(
    domain_form: &DomainForm,
    zt: &DomainPoint,
    branch: LiftBranch,
    c: &KernelConstants,
    boundary: &SampleBatch,
) -> Result<(C64, f64), OperatorError> {
    let lifted = lift(zt, branch)?;
    let pulled = domain_form.pullback();
    solve_t2_potential(&pulled, &lifted, c, boundary)
}
