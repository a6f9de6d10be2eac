//! Probe points for calibration and residual tests: interior points at fixed
//! radii that stay away from the degenerate slices `zeta = 0`, `eta = 0`.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use crate::geometry::{AmbientPoint, BlockIndex};
use crate::stats::stream;

/// `count` probe points cycling through the given radii, drawn from the
/// boundary sampler conditioned on all block scales clearing `min_t` (so the
/// kernels' `1/(|zeta|^2 |eta|^2)` weights stay tame at the probes).
pub fn probe_points(
    shape: BlockIndex,
    count: usize,
    radii: &[f64],
    min_t: f64,
    seed: u64,
) -> Vec<AmbientPoint> {
    let mut rng = stream(seed, 777);
    let mut out = Vec::with_capacity(count);
    let mut i = 0;
    while out.len() < count {
        let t = crate::sampling::sample_t_jacobian(shape, &mut rng);
        let min_block = if shape.l > 0 {
            t[0].min(t[1]).min(t[2])
        } else {
            t[1].min(t[2])
        };
        if min_block < min_t {
            continue;
        }
        let theta = crate::sampling::sample_boundary_point_with_t(shape, t, &mut rng);
        let r = radii[i % radii.len()];
        i += 1;
        let coords = theta.iter().map(|c| c * r).collect();
        out.push(AmbientPoint::new(coords, shape).expect("ambient"));
    }
    out
}

/// The default calibration probe set: 8 points at radii 0.3 and 0.5.
pub fn calibration_probes(shape: BlockIndex, seed: u64) -> Vec<AmbientPoint> {
    probe_points(shape, 8, &[0.3, 0.5], 0.25, seed)
}
