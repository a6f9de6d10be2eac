//! Numerical core for the dbar-equation on quadric manifolds.
//!
//! The geometry is the product quadric `H_N = C^l x H_n x H_m` (null quadrics
//! `z.z = 0`, `w.w = 0`), its intersection `M_N` with the unit ball of
//! `C^{|N|+2}`, and the convex domain `Omega_N` in `C^{|N|}` reached through
//! the proper map `F_N`. On top of that sit the invariant-measure samplers,
//! the Martinelli-Bochner and Cauchy-type kernels, and the solution operators
//! for `dbar u = f`, together with the statistical machinery (calibration,
//! Holder fits, scaling-law experiments) used to verify their properties at
//! desk scale.
//!
//! The crate is `no_std`-compatible (with `alloc`); enable the `libm` feature
//! instead of `std` for float math on bare targets. Everything is pure: RNG
//! state is explicit, all operator inputs are immutable values.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod charts;
pub mod geometry;
pub mod kernels;
pub mod operators;
pub mod sampling;
pub mod stats;

pub use geometry::{AmbientPoint, BlockIndex, DomainPoint, GeometryError};
pub use kernels::KernelConstants;
pub use sampling::{MeasureTag, RadialRule, SampleBatch};
