//! Block geometry of the quadric manifolds and the proper map to the domain.
//!
//! Points of the ambient space `C^{|N|+2}` split as `Z = (x, z, w)` with
//! `x` in `C^l`, `z` in `C^{n+1}`, `w` in `C^{m+1}`. The manifold `H_N` is cut
//! out by the bilinear constraints `z.z = 0`, `w.w = 0` (with `z, w != 0`),
//! and `M_N` is its intersection with the open unit ball.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

pub type C64 = Complex64;

/// Relative tolerance on `|v.v| / |v|^2` below which a block counts as null.
pub const QUADRIC_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum GeometryError {
    /// Two vectors fed to a bilinear operation have different lengths.
    DimensionMismatch { left: usize, right: usize },
    /// A point has the wrong dimension for the given block shape.
    ShapeMismatch { expected: usize, got: usize },
    /// Newton projection onto the null quadric did not converge.
    ProjectionFailed { defect: f64 },
    /// The lift to the quadric is undefined on the slices `z = 0` or `w = 0`.
    DegenerateSlice,
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            GeometryError::ShapeMismatch { expected, got } => {
                write!(f, "shape mismatch: expected dimension {expected}, got {got}")
            }
            GeometryError::ProjectionFailed { defect } => {
                write!(f, "quadric projection did not converge (defect {defect:.3e})")
            }
            GeometryError::DegenerateSlice => {
                write!(f, "lift undefined on the degenerate slices z=0 or w=0")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GeometryError {}

/// Block shape `N = (1,...,1, n, m)`: `l` singleton blocks, then one block of
/// size `n >= 2` and one of size `m >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlockIndex {
    pub l: usize,
    pub n: usize,
    pub m: usize,
}

impl BlockIndex {
    pub fn new(l: usize, n: usize, m: usize) -> Self {
        assert!(n >= 2 && m >= 2, "block sizes require n >= 2 and m >= 2");
        BlockIndex { l, n, m }
    }

    /// `|N| = l + n + m`.
    pub fn total(&self) -> usize {
        self.l + self.n + self.m
    }

    /// Ambient dimension `|N| + 2`.
    pub fn ambient_dim(&self) -> usize {
        self.total() + 2
    }

    /// Domain dimension `|N|` (the space the proper map lands in).
    pub fn domain_dim(&self) -> usize {
        self.total()
    }

    /// Range of ambient indices of the x-block: `0..l`.
    pub fn x_range(&self) -> core::ops::Range<usize> {
        0..self.l
    }

    /// Range of ambient indices of the z-block: `l..l+n+1`.
    pub fn z_range(&self) -> core::ops::Range<usize> {
        self.l..self.l + self.n + 1
    }

    /// Range of ambient indices of the w-block: `l+n+1..|N|+2`.
    pub fn w_range(&self) -> core::ops::Range<usize> {
        self.l + self.n + 1..self.ambient_dim()
    }

    /// Holder exponent of the optimal solution under `L^p` data.
    ///
    /// `1/2 - 6/p` in the exceptional shape `(0,2,2)`, `1/2 - (|N|+3)/p`
    /// otherwise.
    pub fn alpha_exponent(&self, p: f64) -> f64 {
        if self.l == 0 && self.n == 2 && self.m == 2 {
            0.5 - 6.0 / p
        } else {
            0.5 - (self.total() as f64 + 3.0) / p
        }
    }
}

/// Point of the ambient space `C^{|N|+2}` with the `(x, z, w)` split.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientPoint {
    pub coords: Vec<C64>,
    pub shape: BlockIndex,
}

impl AmbientPoint {
    pub fn new(coords: Vec<C64>, shape: BlockIndex) -> Result<Self, GeometryError> {
        if coords.len() != shape.ambient_dim() {
            return Err(GeometryError::ShapeMismatch {
                expected: shape.ambient_dim(),
                got: coords.len(),
            });
        }
        Ok(AmbientPoint { coords, shape })
    }

    pub fn zero(shape: BlockIndex) -> Self {
        AmbientPoint {
            coords: vec![C64::ZERO; shape.ambient_dim()],
            shape,
        }
    }

    /// Assemble from the three blocks.
    pub fn from_blocks(x: &[C64], z: &[C64], w: &[C64], shape: BlockIndex) -> Self {
        debug_assert_eq!(x.len(), shape.l);
        debug_assert_eq!(z.len(), shape.n + 1);
        debug_assert_eq!(w.len(), shape.m + 1);
        let mut coords = Vec::with_capacity(shape.ambient_dim());
        coords.extend_from_slice(x);
        coords.extend_from_slice(z);
        coords.extend_from_slice(w);
        AmbientPoint { coords, shape }
    }

    pub fn x(&self) -> &[C64] {
        &self.coords[self.shape.x_range()]
    }

    pub fn z(&self) -> &[C64] {
        &self.coords[self.shape.z_range()]
    }

    pub fn w(&self) -> &[C64] {
        &self.coords[self.shape.w_range()]
    }

    pub fn norm_sq(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `(|z.z|, |w.w|)`; the point is on the quadric pair iff both are small
    /// (relative to the block norms) and both blocks are nonzero.
    pub fn quadric_defect(&self) -> (f64, f64) {
        let dz = bullet(self.z(), self.z()).expect("equal lengths").norm();
        let dw = bullet(self.w(), self.w()).expect("equal lengths").norm();
        (dz, dw)
    }

    /// Whether both quadric constraints hold to the relative tolerance.
    pub fn on_quadric(&self, rel_tol: f64) -> bool {
        let (dz, dw) = self.quadric_defect();
        let nz = norm_sq(self.z());
        let nw = norm_sq(self.w());
        nz > 0.0 && nw > 0.0 && dz <= rel_tol * nz && dw <= rel_tol * nw
    }

    /// Euclidean distance to another point of the same shape.
    pub fn dist(&self, other: &AmbientPoint) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Point of the domain side `C^{|N|}` with the `(x~, z~, w~)` split.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainPoint {
    pub coords: Vec<C64>,
    pub shape: BlockIndex,
}

impl DomainPoint {
    pub fn new(coords: Vec<C64>, shape: BlockIndex) -> Result<Self, GeometryError> {
        if coords.len() != shape.domain_dim() {
            return Err(GeometryError::ShapeMismatch {
                expected: shape.domain_dim(),
                got: coords.len(),
            });
        }
        Ok(DomainPoint { coords, shape })
    }

    pub fn zero(shape: BlockIndex) -> Self {
        DomainPoint {
            coords: vec![C64::ZERO; shape.domain_dim()],
            shape,
        }
    }

    pub fn from_blocks(x: &[C64], z: &[C64], w: &[C64], shape: BlockIndex) -> Self {
        debug_assert_eq!(x.len(), shape.l);
        debug_assert_eq!(z.len(), shape.n);
        debug_assert_eq!(w.len(), shape.m);
        let mut coords = Vec::with_capacity(shape.domain_dim());
        coords.extend_from_slice(x);
        coords.extend_from_slice(z);
        coords.extend_from_slice(w);
        DomainPoint { coords, shape }
    }

    pub fn x(&self) -> &[C64] {
        &self.coords[0..self.shape.l]
    }

    pub fn z(&self) -> &[C64] {
        &self.coords[self.shape.l..self.shape.l + self.shape.n]
    }

    pub fn w(&self) -> &[C64] {
        &self.coords[self.shape.l + self.shape.n..self.shape.domain_dim()]
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn dist(&self, other: &DomainPoint) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Bilinear product `a.b = sum a_j b_j` (no conjugation).
pub fn bullet(a: &[C64], b: &[C64]) -> Result<C64, GeometryError> {
    if a.len() != b.len() {
        return Err(GeometryError::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter().zip(b).map(|(x, y)| x * y).sum())
}

/// Hermitian product `sum a_j conj(b_j)`.
pub fn herm(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn norm_sq(a: &[C64]) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    norm_sq(a).sqrt()
}

/// Defining functional of the domain: membership in `Omega_N` is `rho < 1`.
///
/// `rho(Z~) = 2|x~|^2 + |z~|^2 + |z~.z~| + |w~|^2 + |w~.w~|`.
pub fn omega_functional(p: &DomainPoint) -> f64 {
    let zz = bullet(p.z(), p.z()).expect("equal lengths");
    let ww = bullet(p.w(), p.w()).expect("equal lengths");
    2.0 * norm_sq(p.x()) + norm_sq(p.z()) + zz.norm() + norm_sq(p.w()) + ww.norm()
}

/// Newton projection of a single block onto its null quadric `v.v = 0`.
///
/// Corrects along the conjugate gradient direction: `v <- v + t conj(v)` with
/// the scalar `t` solving `(v + t conj(v)).(v + t conj(v)) = 0` to first
/// order. Converges quadratically when `|v.v|` is small relative to `|v|^2`.
pub fn project_to_quadric(v: &[C64], tol: f64) -> Result<Vec<C64>, GeometryError> {
    let mut out: Vec<C64> = v.to_vec();
    let max_iter = 40;
    for _ in 0..max_iter {
        let vv = bullet(&out, &out).expect("equal lengths");
        let ns = norm_sq(&out);
        if ns == 0.0 {
            return Err(GeometryError::ProjectionFailed { defect: vv.norm() });
        }
        if vv.norm() <= tol * ns {
            return Ok(out);
        }
        // d/dt (v + t vbar).(v + t vbar) at t=0 is 2 |v|^2 (plus t^2 vbar.vbar).
        let t = -vv / (2.0 * ns);
        for c in out.iter_mut() {
            let cc = *c;
            *c = cc + t * cc.conj();
        }
    }
    let vv = bullet(&out, &out).expect("equal lengths");
    let ns = norm_sq(&out);
    if ns > 0.0 && vv.norm() <= tol * ns {
        Ok(out)
    } else {
        Err(GeometryError::ProjectionFailed {
            defect: if ns > 0.0 { vv.norm() / ns } else { f64::INFINITY },
        })
    }
}

/// Project the z- and w-blocks of an ambient point back onto the quadric pair.
pub fn reproject(p: &AmbientPoint, tol: f64) -> Result<AmbientPoint, GeometryError> {
    let z = project_to_quadric(p.z(), tol)?;
    let w = project_to_quadric(p.w(), tol)?;
    Ok(AmbientPoint::from_blocks(p.x(), &z, &w, p.shape))
}

/// The proper map `F_N`: scales x by `1/sqrt(2)`, drops the last coordinate of
/// each quadric block.
pub fn forward_map(p: &AmbientPoint) -> DomainPoint {
    let s = p.shape;
    let inv_sqrt2 = core::f64::consts::FRAC_1_SQRT_2;
    let x: Vec<C64> = p.x().iter().map(|c| c * inv_sqrt2).collect();
    let z = &p.z()[..s.n];
    let w = &p.w()[..s.m];
    DomainPoint::from_blocks(&x, z, w, s)
}

/// Branch choice for the right inverse of `F_N`: sign of the reconstructed
/// last coordinate in each quadric block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiftBranch {
    pub z_plus: bool,
    pub w_plus: bool,
}

impl LiftBranch {
    pub const PLUS_PLUS: LiftBranch = LiftBranch { z_plus: true, w_plus: true };

    pub fn all() -> [LiftBranch; 4] {
        [
            LiftBranch { z_plus: true, w_plus: true },
            LiftBranch { z_plus: true, w_plus: false },
            LiftBranch { z_plus: false, w_plus: true },
            LiftBranch { z_plus: false, w_plus: false },
        ]
    }
}

/// Right inverse of `F_N`: `x` is scaled back by `sqrt(2)` and the dropped
/// coordinates are reconstructed as `+-i sqrt(z~.z~)` (principal root), so the
/// lift lands on the quadric pair exactly. Undefined on `z~ = 0` or `w~ = 0`.
pub fn lift(p: &DomainPoint, branch: LiftBranch) -> Result<AmbientPoint, GeometryError> {
    let s = p.shape;
    if norm_sq(p.z()) == 0.0 || norm_sq(p.w()) == 0.0 {
        return Err(GeometryError::DegenerateSlice);
    }
    let sqrt2 = core::f64::consts::SQRT_2;
    let x: Vec<C64> = p.x().iter().map(|c| c * sqrt2).collect();

    let zz = bullet(p.z(), p.z()).expect("equal lengths");
    let ww = bullet(p.w(), p.w()).expect("equal lengths");
    let i = C64::new(0.0, 1.0);
    let z_last = i * zz.sqrt() * if branch.z_plus { 1.0 } else { -1.0 };
    let w_last = i * ww.sqrt() * if branch.w_plus { 1.0 } else { -1.0 };

    let mut z: Vec<C64> = p.z().to_vec();
    z.push(z_last);
    let mut w: Vec<C64> = p.w().to_vec();
    w.push(w_last);
    Ok(AmbientPoint::from_blocks(&x, &z, &w, s))
}

/// Orthonormal basis (over C) of the complex tangent space of `H_N` at `Z`:
/// vectors `(a, b, c)` with `b.z = 0` and `c.w = 0`.
///
/// The z-part of the tangent space is the bullet-orthogonal complement of
/// `conj(z)` within `C^{n+1}` (because `d(z.z)(b) = 2 z.b`), and similarly for
/// the w-part. Orthonormality is with respect to the Hermitian inner product.
pub fn tangent_basis(p: &AmbientPoint) -> Vec<Vec<C64>> {
    let s = p.shape;
    let dim = s.ambient_dim();
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(s.total());

    for k in 0..s.l {
        let mut v = vec![C64::ZERO; dim];
        v[k] = C64::ONE;
        basis.push(v);
    }
    // b.z = 0 means b is Hermitian-orthogonal to conj(z).
    let zbar: Vec<C64> = p.z().iter().map(|c| c.conj()).collect();
    for b in complement_basis(&zbar) {
        let mut v = vec![C64::ZERO; dim];
        v[s.z_range()].copy_from_slice(&b);
        basis.push(v);
    }
    let wbar: Vec<C64> = p.w().iter().map(|c| c.conj()).collect();
    for c in complement_basis(&wbar) {
        let mut v = vec![C64::ZERO; dim];
        v[s.w_range()].copy_from_slice(&c);
        basis.push(v);
    }
    basis
}

/// Hermitian-orthonormal basis of the orthogonal complement of a nonzero
/// vector, via Gram-Schmidt on the standard basis.
fn complement_basis(a: &[C64]) -> Vec<Vec<C64>> {
    let k = a.len();
    let na = norm(a);
    assert!(na > 0.0, "complement of the zero vector");
    let unit: Vec<C64> = a.iter().map(|c| c / na).collect();
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(k - 1);
    for j in 0..k {
        let mut v = vec![C64::ZERO; k];
        v[j] = C64::ONE;
        // remove component along `unit`, then along previous basis vectors
        let proj = herm(&v, &unit);
        for (vi, ui) in v.iter_mut().zip(&unit) {
            *vi -= proj * ui;
        }
        for b in &basis {
            let proj = herm(&v, b);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= proj * bi;
            }
        }
        let nv = norm(&v);
        if nv > 1e-9 {
            for vi in v.iter_mut() {
                *vi /= nv;
            }
            basis.push(v);
            if basis.len() == k - 1 {
                break;
            }
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn bullet_basics() {
        let i = c(0.0, 1.0);
        let one = c(1.0, 0.0);
        assert_abs_diff_eq!(
            bullet(&[one, i], &[one, i]).unwrap().norm(),
            0.0,
            epsilon = 1e-15
        );
        assert_eq!(bullet(&[one, c(0.0, 0.0)], &[c(0.0, 0.0), one]).unwrap(), C64::ZERO);
        assert_eq!(
            bullet(&[c(1.0, 0.0), c(2.0, 0.0)], &[c(3.0, 0.0), c(4.0, 0.0)]).unwrap(),
            c(11.0, 0.0)
        );
        assert!(matches!(
            bullet(&[one], &[one, one]),
            Err(GeometryError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn quadric_defect_examples() {
        let s = BlockIndex::new(0, 2, 2);
        let inv = 1.0 / 2.0f64.sqrt();
        let z = [c(inv, 0.0), c(0.0, inv), c(0.0, 0.0)];
        let p = AmbientPoint::from_blocks(&[], &z, &z, s);
        let (dz, _) = p.quadric_defect();
        assert!(dz <= 1e-14);

        let z1 = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let p1 = AmbientPoint::from_blocks(&[], &z1, &z, s);
        assert_abs_diff_eq!(p1.quadric_defect().0, 1.0, epsilon = 1e-15);

        // (3, 4i, 0)/5: |z.z| = |9/25 - 16/25| = 7/25
        let z2 = [c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)];
        let p2 = AmbientPoint::from_blocks(&[], &z2, &z, s);
        assert_abs_diff_eq!(p2.quadric_defect().0, 0.28, epsilon = 1e-15);
    }

    #[test]
    fn omega_functional_examples() {
        let s = BlockIndex::new(0, 2, 2);
        assert_eq!(omega_functional(&DomainPoint::zero(s)), 0.0);
        let p = DomainPoint::from_blocks(
            &[],
            &[c(0.5, 0.0), c(0.0, 0.0)],
            &[c(0.0, 0.0), c(0.0, 0.0)],
            s,
        );
        // |z|^2 + |z.z| = 1/4 + 1/4
        assert_abs_diff_eq!(omega_functional(&p), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn forward_map_coordinates() {
        let s = BlockIndex::new(1, 2, 2);
        let h = 0.5;
        let p = AmbientPoint::from_blocks(
            &[c(h, 0.0)],
            &[c(h, 0.0), c(0.0, h), c(0.0, 0.0)],
            &[c(h, 0.0), c(0.0, h), c(0.0, 0.0)],
            s,
        );
        let q = forward_map(&p);
        assert_abs_diff_eq!(q.coords[0].re, 0.5 / 2.0f64.sqrt(), epsilon = 1e-15);
        assert_eq!(q.coords[1], c(0.5, 0.0));
        assert_eq!(q.coords[2], c(0.0, 0.5));
        assert_eq!(q.coords[3], c(0.5, 0.0));
        assert_eq!(q.coords[4], c(0.0, 0.5));
        assert_eq!(forward_map(&AmbientPoint::zero(s)), DomainPoint::zero(s));
    }

    #[test]
    fn lift_roundtrip_and_quadric() {
        let s = BlockIndex::new(0, 2, 2);
        let p = DomainPoint::from_blocks(
            &[],
            &[c(0.5, 0.0), c(0.0, 0.0)],
            &[c(0.3, 0.1), c(0.2, -0.4)],
            s,
        );
        for br in LiftBranch::all() {
            let up = lift(&p, br).unwrap();
            let (dz, dw) = up.quadric_defect();
            assert!(dz <= 1e-12 && dw <= 1e-12);
            let back = forward_map(&up);
            assert!(back.dist(&p) <= 1e-12);
        }
        // z~ = (1/2, 0): reconstructed coordinate is +- i/2
        let up = lift(&p, LiftBranch::PLUS_PLUS).unwrap();
        assert_abs_diff_eq!(up.z()[2].im, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(up.z()[2].re, 0.0, epsilon = 1e-15);

        let degenerate = DomainPoint::from_blocks(
            &[],
            &[c(0.0, 0.0), c(0.0, 0.0)],
            &[c(0.3, 0.0), c(0.0, 0.0)],
            s,
        );
        assert!(matches!(
            lift(&degenerate, LiftBranch::PLUS_PLUS),
            Err(GeometryError::DegenerateSlice)
        ));
    }

    #[test]
    fn projection_near_null() {
        let v = [c(1.0, 0.0), c(0.0, 1.0 + 1e-3), c(0.0, 0.0)];
        let out = project_to_quadric(&v, 1e-12).unwrap();
        let vv = bullet(&out, &out).unwrap();
        assert!(vv.norm() <= 1e-12 * norm_sq(&out));
        let moved: f64 = v
            .iter()
            .zip(&out)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(moved <= 1e-2);
        // idempotent
        let again = project_to_quadric(&out, 1e-12).unwrap();
        let moved2: f64 = out
            .iter()
            .zip(&again)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(moved2 <= 1e-11);
    }

    #[test]
    fn projection_far_from_null_errors() {
        // Newton from (1, 0) shrinks toward the cone vertex and never reaches
        // the quadric: reported as a projection failure.
        let v = [c(1.0, 0.0), c(0.0, 0.0)];
        assert!(project_to_quadric(&v, 1e-12).is_err());
    }

    #[test]
    fn tangent_basis_is_tangent_and_orthonormal() {
        let s = BlockIndex::new(1, 2, 2);
        let p = AmbientPoint::from_blocks(
            &[c(0.2, 0.1)],
            &[c(0.5, 0.0), c(0.0, 0.5), c(0.0, 0.0)],
            &[c(0.3, 0.0), c(0.0, 0.3), c(0.0, 0.0)],
            s,
        );
        let basis = tangent_basis(&p);
        assert_eq!(basis.len(), s.total());
        for (i, v) in basis.iter().enumerate() {
            let vz = &v[s.z_range()];
            let vw = &v[s.w_range()];
            assert!(bullet(vz, p.z()).unwrap().norm() <= 1e-12);
            assert!(bullet(vw, p.w()).unwrap().norm() <= 1e-12);
            for (j, u) in basis.iter().enumerate() {
                let g = herm(v, u);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(g.norm(), expect, epsilon = 1e-10);
            }
        }
    }
}
