//! `(0,1)`-forms given by component evaluators, optionally carrying a known
//! potential, plus the standard test families.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::geometry::{forward_map, AmbientPoint, BlockIndex};

type ComponentFn = dyn Fn(usize, &[C64]) -> C64 + Send + Sync;
type ScalarFn = dyn Fn(&[C64]) -> C64 + Send + Sync;

/// Support descriptor of a form on the manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    Full,
    /// supported within `|Theta| <= 1 - margin`
    CompactMargin(f64),
}

/// A `(0,1)`-form on ambient space: per-coordinate coefficients
/// `f = sum_k f_k d(conj Theta_k)`, optionally with a potential `u0`
/// satisfying `dbar u0 = f`.
#[derive(Clone)]
pub struct Form01 {
    pub shape: BlockIndex,
    pub support: Support,
    components: Arc<ComponentFn>,
    potential: Option<Arc<ScalarFn>>,
}

impl Form01 {
    pub fn new<F>(shape: BlockIndex, f: F) -> Self
    where
        F: Fn(usize, &[C64]) -> C64 + Send + Sync + 'static,
    {
        Form01 {
            shape,
            support: Support::Full,
            components: Arc::new(f),
            potential: None,
        }
    }

    pub fn with_potential<F, U>(shape: BlockIndex, f: F, u0: U) -> Self
    where
        F: Fn(usize, &[C64]) -> C64 + Send + Sync + 'static,
        U: Fn(&[C64]) -> C64 + Send + Sync + 'static,
    {
        Form01 {
            shape,
            support: Support::Full,
            components: Arc::new(f),
            potential: Some(Arc::new(u0)),
        }
    }

    pub fn zero(shape: BlockIndex) -> Self {
        Form01::with_potential(shape, |_, _| C64::ZERO, |_| C64::ZERO)
    }

    pub fn component(&self, k: usize, theta: &[C64]) -> C64 {
        (self.components)(k, theta)
    }

    pub fn components_len(&self) -> usize {
        self.shape.ambient_dim()
    }

    pub fn potential(&self, theta: &[C64]) -> Option<C64> {
        self.potential.as_ref().map(|u| u(theta))
    }

    pub fn has_potential(&self) -> bool {
        self.potential.is_some()
    }

    /// Contraction `sum_k f_k conj(v_k)` of the form against the conjugate of
    /// a tangent vector (the antiholomorphic directional pairing).
    pub fn contract_conj(&self, theta: &[C64], v: &[C64]) -> C64 {
        (0..self.components_len())
            .map(|k| self.component(k, theta) * v[k].conj())
            .sum()
    }

    /// Multiply by a smooth radial cutoff that is 1 on `|Theta| <= r0` and 0
    /// on `|Theta| >= r1`; the potential (when present) is multiplied too and
    /// the components pick up the `u0 dbar(chi)` correction.
    pub fn with_radial_cutoff(&self, r0: f64, r1: f64) -> Form01 {
        assert!(0.0 < r0 && r0 < r1);
        let inner = self.clone();
        let inner_u = self.potential.clone();
        let comp = move |k: usize, theta: &[C64]| -> C64 {
            let r = theta.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let chi = cutoff(r, r0, r1);
            let mut out = inner.component(k, theta) * chi;
            if let Some(u) = &inner_u {
                let dchi = cutoff_deriv(r, r0, r1);
                if dchi != 0.0 && r > 0.0 {
                    // dbar_k |Theta| = Theta_k / (2 |Theta|)
                    out += u(theta) * dchi * theta[k] / (2.0 * r);
                }
            }
            out
        };
        let pot = self.potential.clone().map(|u| {
            let f: Arc<ScalarFn> = Arc::new(move |theta: &[C64]| {
                let r = theta.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                u(theta) * cutoff(r, r0, r1)
            });
            f
        });
        Form01 {
            shape: self.shape,
            support: Support::CompactMargin(1.0 - r1),
            components: Arc::new(comp),
            potential: pot,
        }
    }

    /// The potential `u0 = conj(Theta_k)` with `f = d(conj Theta_k)`.
    pub fn conj_coordinate(shape: BlockIndex, index: usize) -> Form01 {
        assert!(index < shape.ambient_dim());
        Form01::with_potential(
            shape,
            move |k, _| if k == index { C64::ONE } else { C64::ZERO },
            move |theta| theta[index].conj(),
        )
    }

    /// The potential `u0 = conj(Theta_a) Theta_b` with
    /// `f = Theta_b d(conj Theta_a)`.
    pub fn conj_times_coordinate(shape: BlockIndex, a: usize, b: usize) -> Form01 {
        assert!(a < shape.ambient_dim() && b < shape.ambient_dim());
        Form01::with_potential(
            shape,
            move |k, theta| if k == a { theta[b] } else { C64::ZERO },
            move |theta| theta[a].conj() * theta[b],
        )
    }

    /// Audit `dbar u0 = f` by centered tangential differences at the given
    /// points; returns the maximum absolute discrepancy over all points and
    /// tangent directions. Requires the potential.
    pub fn audit_potential(&self, points: &[AmbientPoint], h: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for p in points {
            let basis = crate::geometry::tangent_basis(p);
            for v in &basis {
                let d = crate::operators::residual::antiholo_derivative(
                    |theta| self.potential(theta).expect("potential present"),
                    p,
                    v,
                    h,
                );
                let target = self.contract_conj(&p.coords, v);
                worst = worst.max((d - target).norm());
            }
        }
        worst
    }
}

/// Quintic smoothstep cutoff: 1 below `r0`, 0 above `r1`, C^2 in between.
pub fn cutoff(r: f64, r0: f64, r1: f64) -> f64 {
    let t = ((r1 - r) / (r1 - r0)).clamp(0.0, 1.0);
    t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
}

/// Derivative of [`cutoff`] with respect to `r`.
pub fn cutoff_deriv(r: f64, r0: f64, r1: f64) -> f64 {
    let span = r1 - r0;
    let t = (r1 - r) / span;
    if !(0.0..=1.0).contains(&t) {
        return 0.0;
    }
    let ds = 30.0 * t * t * (1.0 + t * (-2.0 + t));
    -ds / span
}

/// A `(0,1)`-form on the flat domain side `C^{|N|}`, with potential.
#[derive(Clone)]
pub struct DomainForm {
    pub shape: BlockIndex,
    components: Arc<ComponentFn>,
    potential: Arc<ScalarFn>,
}

impl DomainForm {
    pub fn new<F, U>(shape: BlockIndex, f: F, u0: U) -> Self
    where
        F: Fn(usize, &[C64]) -> C64 + Send + Sync + 'static,
        U: Fn(&[C64]) -> C64 + Send + Sync + 'static,
    {
        DomainForm {
            shape,
            components: Arc::new(f),
            potential: Arc::new(u0),
        }
    }

    pub fn component(&self, j: usize, zt: &[C64]) -> C64 {
        (self.components)(j, zt)
    }

    pub fn potential(&self, zt: &[C64]) -> C64 {
        (self.potential)(zt)
    }

    /// Pull back through the proper map: the potential composes with `F_N`
    /// and the components transform by the (diagonal, constant) holomorphic
    /// Jacobian -- `1/sqrt 2` on the x-block, identity on the kept quadric
    /// coordinates, zero on the dropped ones.
    pub fn pullback(&self) -> Form01 {
        let inner = self.clone();
        let shape = self.shape;
        let comp = move |k: usize, theta: &[C64]| -> C64 {
            let ap = AmbientPoint::new(theta.to_vec(), shape).expect("ambient point");
            let zt = forward_map(&ap);
            match ambient_to_domain_index(shape, k) {
                Some((j, factor)) => inner.component(j, &zt.coords) * factor,
                None => C64::ZERO,
            }
        };
        let inner_u = self.clone();
        let pot = move |theta: &[C64]| -> C64 {
            let ap = AmbientPoint::new(theta.to_vec(), shape).expect("ambient point");
            inner_u.potential(&forward_map(&ap).coords)
        };
        Form01::with_potential(shape, comp, pot)
    }
}

/// Map an ambient coordinate index to the domain index it projects to under
/// `F_N`, with the conjugated Jacobian factor; dropped coordinates give None.
pub fn ambient_to_domain_index(shape: BlockIndex, k: usize) -> Option<(usize, f64)> {
    let inv_sqrt2 = core::f64::consts::FRAC_1_SQRT_2;
    if k < shape.l {
        Some((k, inv_sqrt2))
    } else if k < shape.l + shape.n {
        Some((k, 1.0))
    } else if k == shape.l + shape.n {
        None // dropped z_{n+1}
    } else if k < shape.l + shape.n + 1 + shape.m {
        Some((k - 1, 1.0))
    } else {
        None // dropped w_{m+1}
    }
}

/// Ambient index of the first coordinate of each block, used by test
/// families: `(x1, z1, w1)`; `x1` is `None` when `l = 0`.
pub fn block_heads(shape: BlockIndex) -> (Option<usize>, usize, usize) {
    let x = if shape.l > 0 { Some(0) } else { None };
    (x, shape.l, shape.l + shape.n + 1)
}

/// Holomorphic monomials used for boundary calibration; low degree, spread
/// across blocks. Returns labelled closures.
pub fn calibration_monomials(
    shape: BlockIndex,
) -> Vec<(&'static str, Box<dyn Fn(&[C64]) -> C64 + Send + Sync>)> {
    let (x1, z1, w1) = block_heads(shape);
    let mut fam: Vec<(&'static str, Box<dyn Fn(&[C64]) -> C64 + Send + Sync>)> = vec![
        ("1", Box::new(|_: &[C64]| C64::ONE)),
        ("z1", Box::new(move |t: &[C64]| t[z1])),
        ("w1", Box::new(move |t: &[C64]| t[w1])),
        ("z1*w1", Box::new(move |t: &[C64]| t[z1] * t[w1])),
    ];
    match x1 {
        Some(x) => {
            fam.push(("x1", Box::new(move |t: &[C64]| t[x])));
            fam.push(("x1*z1", Box::new(move |t: &[C64]| t[x] * t[z1])));
        }
        None => {
            fam.push(("z2", Box::new(move |t: &[C64]| t[z1 + 1])));
            fam.push(("z2*w1", Box::new(move |t: &[C64]| t[z1 + 1] * t[w1])));
        }
    }
    fam
}

/// Potential-mode family used to fit the volume-kernel constants:
/// antiholomorphic potentials whose forms excite each `B` group.
pub fn calibration_potentials(shape: BlockIndex) -> Vec<(&'static str, Form01)> {
    let (x1, z1, w1) = block_heads(shape);
    let mut fam = vec![
        ("conj(z1)", Form01::conj_coordinate(shape, z1)),
        ("conj(w1)", Form01::conj_coordinate(shape, w1)),
        (
            "conj(z1)*w1",
            Form01::conj_times_coordinate(shape, z1, w1),
        ),
    ];
    match x1 {
        Some(x) => fam.push(("conj(x1)", Form01::conj_coordinate(shape, x))),
        None => fam.push(("conj(z2)", Form01::conj_coordinate(shape, z1 + 1))),
    }
    fam
}

/// Held-out validation family: holomorphic monomials not in the calibration
/// set (checked through the boundary term alone) and antiholomorphic
/// potentials (checked through the full identity).
pub fn holdout_family(
    shape: BlockIndex,
) -> (
    Vec<(&'static str, Box<dyn Fn(&[C64]) -> C64 + Send + Sync>)>,
    Vec<(&'static str, Form01)>,
) {
    let (x1, z1, w1) = block_heads(shape);
    let mut holo: Vec<(&'static str, Box<dyn Fn(&[C64]) -> C64 + Send + Sync>)> = vec![(
        "z1*z2",
        Box::new(move |t: &[C64]| t[z1] * t[z1 + 1]),
    )];
    match x1 {
        Some(x) => holo.push(("x1^2", Box::new(move |t: &[C64]| t[x] * t[x]))),
        None => holo.push(("w2^2", Box::new(move |t: &[C64]| t[w1 + 1] * t[w1 + 1]))),
    }
    let mut anti = vec![("conj(w2)", Form01::conj_coordinate(shape, w1 + 1))];
    match x1 {
        Some(x) => anti.push((
            "conj(x1)*w1",
            Form01::conj_times_coordinate(shape, x, w1),
        )),
        None => anti.push((
            "conj(w1)*z1",
            Form01::conj_times_coordinate(shape, w1, z1),
        )),
    }
    (holo, anti)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::stream;

    #[test]
    fn cutoff_shape_and_derivative() {
        assert_eq!(cutoff(0.2, 0.5, 0.8), 1.0);
        assert_eq!(cutoff(0.9, 0.5, 0.8), 0.0);
        let mid = cutoff(0.65, 0.5, 0.8);
        assert!(mid > 0.0 && mid < 1.0);
        // FD check of the derivative
        let h = 1e-6;
        for r in [0.55, 0.65, 0.75] {
            let fd = (cutoff(r + h, 0.5, 0.8) - cutoff(r - h, 0.5, 0.8)) / (2.0 * h);
            assert!((fd - cutoff_deriv(r, 0.5, 0.8)).abs() < 1e-6);
        }
    }

    #[test]
    fn potential_audit_exact_pairs() {
        let shape = BlockIndex::new(1, 2, 2);
        let mut rng = stream(61, 0);
        let points: Vec<AmbientPoint> = (0..20)
            .map(|_| {
                let theta = crate::sampling::sample_boundary_point(shape, &mut rng);
                AmbientPoint::new(theta.iter().map(|c| c * 0.6).collect(), shape).unwrap()
            })
            .collect();
        let f = Form01::conj_coordinate(shape, shape.l); // u0 = conj(z1)
        let worst = f.audit_potential(&points, 1e-4);
        assert!(worst < 1e-5, "conj coordinate audit {worst}");
        let f2 = Form01::conj_times_coordinate(shape, shape.l, shape.l + shape.n + 1);
        let worst2 = f2.audit_potential(&points, 1e-4);
        assert!(worst2 < 1e-5, "bilinear audit {worst2}");
        // cutoff versions stay consistent
        let f3 = f.with_radial_cutoff(0.5, 0.8);
        let worst3 = f3.audit_potential(&points, 1e-4);
        assert!(worst3 < 1e-4, "cutoff audit {worst3}");
    }

    #[test]
    fn pullback_transforms_components() {
        let shape = BlockIndex::new(1, 2, 2);
        // domain potential u0 = conj(x~1) with f~_0 = 1
        let form = DomainForm::new(
            shape,
            |j, _| if j == 0 { C64::ONE } else { C64::ZERO },
            |zt| zt[0].conj(),
        );
        let pulled = form.pullback();
        let mut rng = stream(62, 0);
        let theta = crate::sampling::sample_boundary_point(shape, &mut rng);
        // u0 pullback = conj(x1)/sqrt2; component 0 = 1/sqrt2 * 1 (chain rule
        // with conjugated holomorphic factor)
        let u = pulled.potential(&theta).unwrap();
        assert!((u - theta[0].conj() * core::f64::consts::FRAC_1_SQRT_2).norm() < 1e-14);
        let c0 = pulled.component(0, &theta);
        assert!((c0 - C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0)).norm() < 1e-14);
        // dropped coordinate components vanish
        assert_eq!(pulled.component(shape.l + shape.n, &theta), C64::ZERO);
        // and the pulled-back pair still satisfies dbar u = f tangentially
        let points: Vec<AmbientPoint> = (0..10)
            .map(|_| {
                let t = crate::sampling::sample_boundary_point(shape, &mut rng);
                AmbientPoint::new(t.iter().map(|c| c * 0.5).collect(), shape).unwrap()
            })
            .collect();
        assert!(pulled.audit_potential(&points, 1e-4) < 1e-5);
    }
}
