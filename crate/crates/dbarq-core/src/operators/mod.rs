//! Solution operators for the dbar-equation and the statistical experiments
//! that verify their properties.
//!
//! The operator layer works in two routes. The potential route evaluates
//! `T2 f = u0 - (boundary reproducing integral of u0)` when the input form
//! carries a known potential; by the Cauchy-type representation this agrees
//! with the canonical solution on the manifold. The Martinelli-Bochner route
//! `J2` integrates the volume kernel directly and applies to compactly
//! supported data. Calibration pins every kernel constant by least squares
//! against reproducing identities; the remaining modules measure Holder
//! exponents, sharpness discriminators, and the scaling laws.

pub mod calibrate;
pub mod forms;
pub mod holder;
pub mod nearfield;
pub mod probes;
pub mod reproduce;
pub mod residual;
pub mod scaling;
pub mod sharpness;
pub mod solve;
pub mod stokes;

pub use calibrate::{calibrate, Calibration, CalibrationError};
pub use forms::{DomainForm, Form01, Support};
pub use holder::{holder_fit, HolderEstimate};
pub use nearfield::{NearFieldBatch, SingularVolumeEngine};
pub use reproduce::{mb_boundary, reproduce_boundary};
pub use residual::{dbar_residual_domain, dbar_residual_tangential};
pub use sharpness::{sharpness_discriminator, SharpnessCase, SharpnessFamily};
pub use scaling::{scaling_experiment_71, scaling_experiment_72, ScalingFit, WeightExponents};
pub use solve::{solve_j2, solve_t2_potential, solve_t_omega};
pub use stokes::{prop93_boundary_slope, stokes_check, StokesRow};
