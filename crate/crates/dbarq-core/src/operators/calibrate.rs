//! Least-squares calibration of the kernel constants against the reproducing
//! identities.
//!
//! Stage A fits the boundary constants: the Martinelli-Bochner groups
//! `(a1, a2, a3)` and the reproducing-kernel groups `(r1, r2, r3)` so that
//! holomorphic monomials are reproduced from their boundary values at the
//! probe points. Stage B fits the volume groups `(b1, b2, b3)`: for
//! antiholomorphic potentials `u0` the volume term must equal
//! `u0(Z) - (MB boundary term of u0)(Z)`. A held-out family gates the result.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::geometry::{herm, norm_sq, AmbientPoint, BlockIndex};
use crate::kernels::{b_group, dist, eval_a_groups, eval_b_raw, eval_r_groups, BGroup, KernelConstants};
use crate::operators::forms::{calibration_monomials, calibration_potentials, holdout_family, Form01};
use crate::operators::nearfield::SingularVolumeEngine;
use crate::operators::probes::calibration_probes;
use crate::operators::reproduce::{mb_boundary, reproduce_boundary};
use crate::sampling::SampleBatch;
use crate::stats::least_squares;

/// Calibration output: the constants plus the diagnostics that gate them.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Calibration {
    pub constants: KernelConstants,
    /// pivot-ratio condition estimates of the three least-squares systems
    pub condition_a: f64,
    pub condition_r: f64,
    pub condition_b: f64,
    /// max relative residual over the held-out family
    pub holdout_residual: f64,
    pub seed: u64,
    pub boundary_samples: usize,
    pub volume_samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CalibrationError {
    IllConditioned(f64),
    ResidualTooLarge(f64),
    SolveFailed,
}

impl core::fmt::Display for CalibrationError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CalibrationError::IllConditioned(c) => write!(f, "calibration system condition {c:.3e}"),
            CalibrationError::ResidualTooLarge(r) => {
                write!(f, "held-out residual {r:.3} exceeds 5%")
            }
            CalibrationError::SolveFailed => write!(f, "least-squares solve failed"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CalibrationError {}

const COND_LIMIT: f64 = 1e8;
const RESIDUAL_LIMIT: f64 = 0.05;

/// Group integrals of the MB boundary kernel and the reproducing kernel
/// against a family of scalar fields, at one probe.
fn boundary_group_integrals<U: Fn(&[C64]) -> C64>(
    shape: BlockIndex,
    zp: &AmbientPoint,
    batch: &SampleBatch,
    fields: &[U],
) -> (Vec<[C64; 3]>, Vec<[C64; 3]>) {
    let two_n = 2 * shape.total() as i32;
    let n_pow = shape.total() as i32;
    let mut mb = vec![[C64::ZERO; 3]; fields.len()];
    let mut rep = vec![[C64::ZERO; 3]; fields.len()];
    for (theta, w) in batch.iter() {
        let zeta = &theta[shape.z_range()];
        let eta = &theta[shape.w_range()];
        let block_w = norm_sq(zeta) * norm_sq(eta);
        if block_w == 0.0 {
            continue;
        }
        let mb_denom = dist(theta, &zp.coords).powi(two_n) * block_w;
        let rep_denom = (C64::ONE - herm(&zp.coords, theta)).powi(n_pow) * block_w;
        let ag = eval_a_groups(shape, theta, &zp.coords);
        let rg = eval_r_groups(shape, theta, &zp.coords);
        for (j, u) in fields.iter().enumerate() {
            let uv = u(theta) * w;
            for i in 0..3 {
                mb[j][i] += ag[i] * uv / mb_denom;
                rep[j][i] += rg[i] * uv / rep_denom;
            }
        }
    }
    (mb, rep)
}

/// Group-resolved volume integrals `sum_{k in group} B_k^{raw} f_k / (...)`
/// around one probe.
fn volume_group_integrals(
    shape: BlockIndex,
    form: &Form01,
    engine: &SingularVolumeEngine<'_>,
    zp: &AmbientPoint,
) -> [C64; 3] {
    let two_n = 2 * shape.total() as i32;
    let mut out = [C64::ZERO; 3];
    for (idx, group) in [BGroup::X, BGroup::Z, BGroup::W].into_iter().enumerate() {
        out[idx] = engine.integrate(&zp.coords, |theta| {
            let zeta = &theta[shape.z_range()];
            let eta = &theta[shape.w_range()];
            let denom = dist(theta, &zp.coords).powi(two_n) * norm_sq(zeta) * norm_sq(eta);
            if denom == 0.0 {
                return C64::ZERO;
            }
            let mut acc = C64::ZERO;
            for k in 0..shape.ambient_dim() {
                if b_group(shape, k) == group {
                    let fk = form.component(k, theta);
                    if fk != C64::ZERO {
                        acc += eval_b_raw(shape, k, theta, &zp.coords) * fk;
                    }
                }
            }
            acc / denom
        });
    }
    out
}

/// Append the real/imaginary split of one complex equation
/// `sum_i x_i g_i = target`.
fn push_complex_equation(rows: &mut Vec<Vec<f64>>, rhs: &mut Vec<f64>, g: &[C64; 3], target: C64) {
    rows.push(vec![g[0].re, g[1].re, g[2].re]);
    rhs.push(target.re);
    rows.push(vec![g[0].im, g[1].im, g[2].im]);
    rhs.push(target.im);
}

/// Calibrate all kernel constants on the given batches.
///
/// `h` is the exclusion radius of the singular volume integrals and `k_near`
/// the size of each probe's near-field batch.
pub fn calibrate(
    shape: BlockIndex,
    boundary: &SampleBatch,
    volume: &SampleBatch,
    h: f64,
    k_near: usize,
    seed: u64,
) -> Result<Calibration, CalibrationError> {
    let probes = calibration_probes(shape, seed);
    let monomials = calibration_monomials(shape);
    let fields: Vec<_> = monomials.iter().map(|(_, f)| f).collect();

    // Stage A: boundary constants
    let mut rows_a = Vec::new();
    let mut rhs_a = Vec::new();
    let mut rows_r = Vec::new();
    let mut rhs_r = Vec::new();
    for zp in &probes {
        let (mb, rep) = boundary_group_integrals(shape, zp, boundary, &fields);
        for (j, (_, u)) in monomials.iter().enumerate() {
            let target = u(&zp.coords);
            push_complex_equation(&mut rows_a, &mut rhs_a, &mb[j], target);
            push_complex_equation(&mut rows_r, &mut rhs_r, &rep[j], target);
        }
    }
    let (a_fit, cond_a) = least_squares(&rows_a, &rhs_a).ok_or(CalibrationError::SolveFailed)?;
    let (r_fit, cond_r) = least_squares(&rows_r, &rhs_r).ok_or(CalibrationError::SolveFailed)?;
    if cond_a > COND_LIMIT || cond_r > COND_LIMIT {
        return Err(CalibrationError::IllConditioned(cond_a.max(cond_r)));
    }
    let mut constants = KernelConstants {
        a1: a_fit[0],
        a2: a_fit[1],
        a3: a_fit[2],
        r1: r_fit[0],
        r2: r_fit[1],
        r3: r_fit[2],
        ..KernelConstants::default()
    };

    // Stage B: volume constants from the potential family
    let potentials = calibration_potentials(shape);
    let mut rows_b = Vec::new();
    let mut rhs_b = Vec::new();
    let mut rng = crate::stats::stream(seed, 4242);
    for zp in &probes {
        let engine = SingularVolumeEngine::new(volume, zp, h, k_near, &mut rng);
        for (_, form) in &potentials {
            let u0 = |theta: &[C64]| form.potential(theta).expect("potential");
            let bdry_term = mb_boundary(u0, zp, &constants, boundary).value;
            let target = u0(&zp.coords) - bdry_term;
            let groups = volume_group_integrals(shape, form, &engine, zp);
            push_complex_equation(&mut rows_b, &mut rhs_b, &groups, target);
        }
    }
    let (b_fit, cond_b) = least_squares(&rows_b, &rhs_b).ok_or(CalibrationError::SolveFailed)?;
    if cond_b > COND_LIMIT {
        return Err(CalibrationError::IllConditioned(cond_b));
    }
    constants.b1 = b_fit[0];
    constants.b2 = b_fit[1];
    constants.b3 = b_fit[2];

    // Held-out validation
    let (holo, anti) = holdout_family(shape);
    let mut worst: f64 = 0.0;
    for zp in &probes {
        for (_, u) in &holo {
            let scale = u(&zp.coords).norm().max(1.0);
            let via_mb = mb_boundary(|t| u(t), zp, &constants, boundary).value;
            let via_rep = reproduce_boundary(|t| u(t), zp, &constants, boundary).value;
            worst = worst.max((via_mb - u(&zp.coords)).norm() / scale);
            worst = worst.max((via_rep - u(&zp.coords)).norm() / scale);
        }
    }
    let mut rng2 = crate::stats::stream(seed, 777_001);
    for zp in probes.iter().take(4) {
        let engine = SingularVolumeEngine::new(volume, zp, h, k_near, &mut rng2);
        for (_, form) in &anti {
            let u0 = |theta: &[C64]| form.potential(theta).expect("potential");
            let scale = u0(&zp.coords).norm().max(1.0);
            let bdry_term = mb_boundary(u0, zp, &constants, boundary).value;
            let vol_term = crate::operators::solve::solve_j2(form, &engine, &zp.coords, &constants);
            worst = worst.max((bdry_term + vol_term - u0(&zp.coords)).norm() / scale);
        }
    }
    if worst > RESIDUAL_LIMIT {
        return Err(CalibrationError::ResidualTooLarge(worst));
    }

    Ok(Calibration {
        constants,
        condition_a: cond_a,
        condition_r: cond_r,
        condition_b: cond_b,
        holdout_residual: worst,
        seed,
        boundary_samples: boundary.len(),
        volume_samples: volume.len(),
    })
}
