//! The sharpness families and the circle-average discriminator.
//!
//! Each family pairs an explicit potential `u0 = |g|^2 h^{-s}` (`g` a
//! coordinate, `h` an affine holomorphic function vanishing at one boundary
//! point) with the circle of points `Z_{lambda, c}`. For any solution `u` of
//! `dbar u = dbar u0`, the circle average of `u` minus its center value
//! telescopes the holomorphic part away, leaving the closed form
//! `mu^2 h_lambda^{-s}` exactly; the divergence rate as the circle approaches
//! the boundary rules out Holder exponents above the optimal one.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::geometry::{omega_functional, BlockIndex, DomainPoint};
use crate::operators::forms::DomainForm;
use crate::stats::ols;

/// Which boundary-point construction applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SharpnessCase {
    /// `n > 2`: the singular coordinate sits in the z-block
    One,
    /// `l >= 1`: the singular coordinate is `x1`
    Two,
    /// `N = (0,2,2)`: the minimal shape, anchored at `1/sqrt 2`
    Three,
}

/// The explicit extremal family for a block shape at integrability `p`.
#[derive(Debug, Clone, Copy)]
pub struct SharpnessFamily {
    pub shape: BlockIndex,
    pub case: SharpnessCase,
    pub p: f64,
    /// the denominator exponent `s = 1/2 + (|N|+3)/p` (or `1/2 + 6/p`)
    pub s: f64,
    /// fixed circle radius of the singular coordinate
    pub mu: f64,
}

impl SharpnessFamily {
    /// Select the case that the shape supports: the z-block construction
    /// needs `n > 2`, the x-block one needs `l >= 1`, and `(0,2,2)` has its
    /// own geometry.
    pub fn for_shape(shape: BlockIndex, p: f64, mu: f64) -> Self {
        let case = if shape.l == 0 && shape.n == 2 && shape.m == 2 {
            SharpnessCase::Three
        } else if shape.n > 2 {
            SharpnessCase::One
        } else {
            assert!(shape.l >= 1, "no sharpness construction for this shape");
            SharpnessCase::Two
        };
        let s = match case {
            SharpnessCase::Three => 0.5 + 6.0 / p,
            _ => 0.5 + (shape.total() as f64 + 3.0) / p,
        };
        SharpnessFamily { shape, case, p, s, mu }
    }

    /// Domain index of the singular coordinate `g`.
    pub fn g_index(&self) -> usize {
        match self.case {
            SharpnessCase::One => self.shape.l + 2,
            SharpnessCase::Two => 0,
            SharpnessCase::Three => 0,
        }
    }

    /// The affine holomorphic denominator `h`.
    pub fn h_value(&self, zt: &[C64]) -> C64 {
        let l = self.shape.l;
        let n = self.shape.n;
        let i = C64::new(0.0, 1.0);
        match self.case {
            SharpnessCase::One | SharpnessCase::Two => {
                let z1 = zt[l];
                let z2 = zt[l + 1];
                let w1 = zt[l + n];
                let w2 = zt[l + n + 1];
                C64::ONE - z1 * 0.5 + i * z2 * 0.5 - w1 * 0.5 + i * w2 * 0.5
            }
            SharpnessCase::Three => {
                let inv = core::f64::consts::FRAC_1_SQRT_2;
                let w1 = zt[2];
                let w2 = zt[3];
                C64::ONE - w1 * inv + i * w2 * inv
            }
        }
    }

    /// `u0(Z~) = |g|^2 h^{-s}`.
    pub fn potential(&self, zt: &[C64]) -> C64 {
        let g = zt[self.g_index()];
        self.h_value(zt).powf(-self.s) * g.norm_sqr()
    }

    /// The form `f = dbar u0`, with the potential attached.
    pub fn domain_form(&self) -> DomainForm {
        let fam = *self;
        let g_idx = self.g_index();
        DomainForm::new(
            self.shape,
            move |j, zt| {
                if j == g_idx {
                    fam.h_value(zt).powf(-fam.s) * zt[g_idx]
                } else {
                    C64::ZERO
                }
            },
            move |zt| fam.potential(zt),
        )
    }

    /// The circle point `Z_{lambda, c}`.
    pub fn circle_point(&self, lambda: f64, c: C64) -> DomainPoint {
        let shape = self.shape;
        let i = C64::new(0.0, 1.0);
        let (mut x, mut z, mut w) = (
            vec![C64::ZERO; shape.l],
            vec![C64::ZERO; shape.n],
            vec![C64::ZERO; shape.m],
        );
        match self.case {
            SharpnessCase::One => {
                z[0] = C64::new(lambda, 0.0);
                z[1] = i * lambda;
                z[2] = c * self.mu;
                w[0] = C64::new(0.5, 0.0);
                w[1] = i * 0.5;
            }
            SharpnessCase::Two => {
                x[0] = c * self.mu;
                z[0] = C64::new(lambda, 0.0);
                z[1] = i * lambda;
                w[0] = C64::new(0.5, 0.0);
                w[1] = i * 0.5;
            }
            SharpnessCase::Three => {
                z[0] = c * self.mu;
                w[0] = C64::new(lambda, 0.0);
                w[1] = i * lambda;
            }
        }
        DomainPoint::from_blocks(&x, &z, &w, shape)
    }

    /// Distance-to-boundary parameter the rate is measured against:
    /// `1/2 - lambda` (cases 1, 2) or `1/sqrt 2 - lambda` (case 3).
    pub fn base(&self, lambda: f64) -> f64 {
        match self.case {
            SharpnessCase::Three => core::f64::consts::FRAC_1_SQRT_2 - lambda,
            _ => 0.5 - lambda,
        }
    }

    /// Value of `h` along the circle: `base` (cases 1, 2) or
    /// `sqrt 2 * base` (case 3).
    pub fn h_at(&self, lambda: f64) -> f64 {
        match self.case {
            SharpnessCase::Three => core::f64::consts::SQRT_2 * self.base(lambda),
            _ => self.base(lambda),
        }
    }

    /// The closed-form discriminator value `mu^2 h_lambda^{-s}`.
    pub fn closed_form(&self, lambda: f64) -> f64 {
        self.mu * self.mu * self.h_at(lambda).powf(-self.s)
    }

    /// Admissible lambda grid: `count` points spread over the case's range.
    pub fn lambda_grid(&self, count: usize) -> Vec<f64> {
        let (lo, hi) = match self.case {
            SharpnessCase::Three => {
                let s = core::f64::consts::FRAC_1_SQRT_2;
                (0.5 * s + 1e-3, s - 1e-3)
            }
            _ => (0.25 + 1e-3, 0.5 - 1e-3),
        };
        (0..count)
            .map(|k| lo + (hi - lo) * k as f64 / (count - 1).max(1) as f64)
            .collect()
    }

    /// Whether the full circle at this lambda stays inside the domain.
    pub fn circle_in_domain(&self, lambda: f64) -> bool {
        // the functional is maximal at |c| = 1 and depends only on |c|
        omega_functional(&self.circle_point(lambda, C64::ONE)) < 1.0 - 1e-9
    }
}

/// One row of the discriminator table.
#[derive(Debug, Clone, Copy)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiscriminatorRow {
    pub lambda: f64,
    /// trapezoid circle average minus center value
    pub computed: f64,
    pub closed_form: f64,
    /// grid point left out because the circle exits the domain
    pub skipped: bool,
}

/// Evaluate the circle-average discriminator of a scalar field over the
/// lambda grid with an `nodes`-point trapezoid rule (spectrally accurate for
/// smooth periodic integrands).
pub fn sharpness_discriminator<U: FnMut(&DomainPoint) -> C64>(
    mut u: U,
    family: &SharpnessFamily,
    lambdas: &[f64],
    nodes: usize,
) -> Vec<DiscriminatorRow> {
    let mut out = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        if !family.circle_in_domain(lambda) {
            out.push(DiscriminatorRow {
                lambda,
                computed: f64::NAN,
                closed_form: family.closed_form(lambda),
                skipped: true,
            });
            continue;
        }
        let mut avg = C64::ZERO;
        for j in 0..nodes {
            let theta = core::f64::consts::TAU * j as f64 / nodes as f64;
            let c = C64::new(theta.cos(), theta.sin());
            avg += u(&family.circle_point(lambda, c));
        }
        avg /= nodes as f64;
        let center = u(&family.circle_point(lambda, C64::ZERO));
        out.push(DiscriminatorRow {
            lambda,
            computed: (avg - center).re,
            closed_form: family.closed_form(lambda),
            skipped: false,
        });
    }
    out
}

/// Log-log slope of the discriminator against the base `h_lambda`; the exact
/// rate is `-s`.
pub fn discriminator_slope(family: &SharpnessFamily, rows: &[DiscriminatorRow]) -> f64 {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for r in rows {
        if !r.skipped && r.computed > 0.0 {
            xs.push(family.base(r.lambda).ln());
            ys.push(r.computed.ln());
        }
    }
    ols(&xs, &ys).0
}
