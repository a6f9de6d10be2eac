//! Local coordinate systems on the null quadrics and the comparability
//! pairing between points of `M_N` and points of flat balls in `C^{|N|}`.
//!
//! A chart at a base point `z` near the quadric sphere trades the two
//! coordinates `(z_j, z_k)` selected by the anchor sets `E_jk` for the single
//! combination `(zeta_j conj(z_j) + zeta_k conj(z_k)) / sqrt(|z_j|^2+|z_k|^2)`,
//! keeping all other coordinates. The map preserves `zeta . conj(z)` exactly
//! and is two-sided norm-comparable on its patch.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use rand::Rng;

use crate::geometry::{bullet, norm, norm_sq, project_to_quadric, AmbientPoint, BlockIndex};
use crate::stats::{nelder_mead, Prng, RngExt};

/// Numerical estimate of the Lemma-4.3 constant: the minimum over the quadric
/// sphere of `max_{j<k} |Im(z_j conj(z_k))|`, by multi-start Nelder-Mead over
/// the frame parametrization. The returned value is the smallest objective
/// found (an upper bound on the true constant), so callers keep a margin.
pub fn compute_c0(n: usize, starts: usize, seed: u64) -> f64 {
    let d = n + 1;
    let objective = |params: &[f64]| -> f64 {
        // params -> (u, v) in R^d x R^d -> orthonormal frame -> z
        let u_raw = &params[..d];
        let v_raw = &params[d..];
        let nu = u_raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nu < 1e-9 {
            return 1.0;
        }
        let u: Vec<f64> = u_raw.iter().map(|x| x / nu).collect();
        let mut v: Vec<f64> = v_raw.to_vec();
        let dot: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
        for (vi, ui) in v.iter_mut().zip(&u) {
            *vi -= dot * ui;
        }
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nv < 1e-9 {
            return 1.0;
        }
        let z: Vec<C64> = u
            .iter()
            .zip(&v)
            .map(|(a, b)| C64::new(*a, b / nv) * core::f64::consts::FRAC_1_SQRT_2)
            .collect();
        max_im_pair(&z)
    };
    let mut best = f64::INFINITY;
    let mut rng = crate::stats::stream(seed, 90);
    for _ in 0..starts {
        let x0: Vec<f64> = (0..2 * d).map(|_| rng.normal()).collect();
        let (_, val) = nelder_mead(objective, &x0, 0.3, 1e-10, 4000);
        if val < best {
            best = val;
        }
    }
    best
}

/// `max_{j<k} |Im(z_j conj(z_k))|`.
pub fn max_im_pair(z: &[C64]) -> f64 {
    let mut best: f64 = 0.0;
    for j in 0..z.len() {
        for k in j + 1..z.len() {
            best = best.max((z[j] * z[k].conj()).im.abs());
        }
    }
    best
}

/// Index pair attaining `max_im_pair` (lexicographic tie-break).
pub fn anchor_pair(z: &[C64]) -> (usize, usize) {
    let mut best = (0usize, 1usize);
    let mut val: f64 = -1.0;
    for j in 0..z.len() {
        for k in j + 1..z.len() {
            let v = (z[j] * z[k].conj()).im.abs();
            if v > val + 1e-15 {
                val = v;
                best = (j, k);
            }
        }
    }
    best
}

/// Why a chart could not be built at a base point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartUnavailable {
    /// The base point is zero or numerically so.
    ZeroBase,
    /// `z/|z|` is farther than the audited thickness from the quadric sphere.
    OutsideNeighborhood,
    /// No anchor pair clears the working constant.
    NoAnchor,
}

/// Audited constants for one quadric block, shared read-only by chart users.
#[derive(Debug, Clone)]
pub struct ChartContext {
    /// complex dimension of the quadric (block size n or m)
    pub n: usize,
    /// Lemma-4.3 estimate; anchors must clear `0.9 * c0`
    pub c0: f64,
    /// audited thickness of the quadric-sphere neighborhood
    pub delta: f64,
    /// patch radius constant: charts live on `|zeta - z| < |z|/c1`
    pub c1: f64,
    /// flat-side patch constant, set to `2 c1` and audited
    pub c2: f64,
}

impl ChartContext {
    /// Build the context for block size `n`: estimate the anchor constant and
    /// pick the largest thickness in `{0.3, 0.2, 0.1, 0.05}` passing the
    /// norm-bound and injectivity audit.
    pub fn build(n: usize, seed: u64) -> Self {
        let starts = if n <= 2 { 24 } else { 40 };
        let c0 = compute_c0(n, starts, seed);
        let mut chosen = None;
        for &delta in &[0.3, 0.2, 0.1, 0.05] {
            let candidate = ChartContext {
                n,
                c0,
                delta,
                c1: delta_to_c1(delta),
                c2: 2.0 * delta_to_c1(delta),
            };
            if candidate.audit(seed ^ 0xA0D1) {
                chosen = Some(candidate);
                break;
            }
        }
        chosen.unwrap_or(ChartContext {
            n,
            c0,
            delta: 0.05,
            c1: delta_to_c1(0.05),
            c2: 2.0 * delta_to_c1(0.05),
        })
    }

    /// 10^3-point audit of the two-sided norm bound and injectivity spot
    /// checks on random charts with this thickness.
    fn audit(&self, seed: u64) -> bool {
        let mut rng = crate::stats::stream(seed, self.n as u64);
        for _ in 0..250 {
            let zhat = crate::sampling::sample_sigma_n(self.n, &mut rng);
            // base point within delta of the quadric sphere (not necessarily null)
            let mut base: Vec<C64> = zhat.clone();
            let off = self.delta * 0.9 * rng.random::<f64>();
            for c in base.iter_mut() {
                *c += C64::new(rng.normal(), rng.normal()) * (off / (2.0 * (self.n as f64 + 1.0)).sqrt());
            }
            let chart = match Chart::build(&base, self) {
                Ok(c) => c,
                Err(_) => continue,
            };
            let r = norm(&base) / self.c1;
            let mut images: Vec<(Vec<C64>, Vec<C64>)> = Vec::new();
            for _ in 0..4 {
                let zeta = match perturb_on_quadric(&zhat, r * 0.9, &mut rng) {
                    Ok(z) => z,
                    Err(_) => continue,
                };
                if crate::kernels::dist(&zeta, &base) >= r {
                    continue;
                }
                let img = chart.apply(&zeta);
                let nz = norm(&zeta);
                let ni = norm(&img);
                if !(nz / 2.0 <= ni + 1e-12 && ni <= nz + 1e-12) {
                    return false;
                }
                images.push((zeta, img));
            }
            for a in 0..images.len() {
                for b in a + 1..images.len() {
                    let din = crate::kernels::dist(&images[a].0, &images[b].0);
                    let dout = crate::kernels::dist(&images[a].1, &images[b].1);
                    if din > 1e-9 && dout <= 1e-12 {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// `C1 = max(1/(2 delta), 1/delta + 1) + 1`, the two patch-radius constraints
/// from the construction.
fn delta_to_c1(delta: f64) -> f64 {
    (1.0 / (2.0 * delta)).max(1.0 / delta + 1.0) + 1.0
}

/// One local coordinate chart at a base point.
#[derive(Debug, Clone)]
pub struct Chart {
    /// base point in `C^{n+1}` (near the cone over the quadric sphere)
    pub base: Vec<C64>,
    /// anchor index pair, `j < k`
    pub pair: (usize, usize),
    /// dilation scale `|base|` (the chart formula is scale invariant; kept
    /// for diagnostics)
    pub scale: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Chart {
    /// Build the chart at `z`: check the neighborhood condition, pick the
    /// anchor pair on the normalized quadric projection, and record patch
    /// constants from the context.
    pub fn build(z: &[C64], ctx: &ChartContext) -> Result<Chart, ChartUnavailable> {
        let nz = norm(z);
        if nz < 1e-12 {
            return Err(ChartUnavailable::ZeroBase);
        }
        let unit: Vec<C64> = z.iter().map(|c| c / nz).collect();
        // distance of z/|z| to the quadric sphere, via projection
        let anchor = match project_to_quadric(&unit, 1e-12) {
            Ok(p) => {
                let np = norm(&p);
                p.into_iter().map(|c| c / np).collect::<Vec<C64>>()
            }
            Err(_) => return Err(ChartUnavailable::OutsideNeighborhood),
        };
        if crate::kernels::dist(&unit, &anchor) > ctx.delta {
            return Err(ChartUnavailable::OutsideNeighborhood);
        }
        let (j, k) = anchor_pair(&anchor);
        if (anchor[j] * anchor[k].conj()).im.abs() < 0.9 * ctx.c0 {
            return Err(ChartUnavailable::NoAnchor);
        }
        Ok(Chart {
            base: z.to_vec(),
            pair: (j, k),
            scale: nz,
            c1: ctx.c1,
            c2: ctx.c2,
        })
    }

    /// Apply the chart: `C^{n+1} -> C^n`. Keeps every coordinate except the
    /// anchor pair and inserts the combination
    /// `(zeta_j conj(z_j) + zeta_k conj(z_k)) / sqrt(|z_j|^2 + |z_k|^2)`
    /// so that it lands at slot `k - 1`.
    pub fn apply(&self, zeta: &[C64]) -> Vec<C64> {
        let (j, k) = self.pair;
        let zj = self.base[j];
        let zk = self.base[k];
        let denom = (zj.norm_sqr() + zk.norm_sqr()).sqrt();
        let combo = (zeta[j] * zj.conj() + zeta[k] * zk.conj()) / denom;
        let mut out: Vec<C64> = Vec::with_capacity(zeta.len() - 1);
        for (idx, c) in zeta.iter().enumerate() {
            if idx != j && idx != k {
                out.push(*c);
            }
        }
        out.insert(k - 1, combo);
        out
    }

    /// Patch radius on the quadric side: `|z| / C1`.
    pub fn patch_radius(&self) -> f64 {
        self.scale / self.c1
    }

    /// Image of the base point; has the same norm as the base.
    pub fn image_of_base(&self) -> Vec<C64> {
        self.apply(&self.base)
    }

    /// Real Jacobian of the chart in the local coordinates that drop the
    /// dependent coordinate `zeta_j`; closed form from the construction.
    pub fn jacobian_closed_form(&self, zeta: &[C64]) -> f64 {
        let (j, k) = self.pair;
        let zj = self.base[j];
        let zk = self.base[k];
        let num = (zeta[j] * zk.conj() - zeta[k] * zj.conj()).norm_sqr();
        num / (zeta[j].norm_sqr() * (zj.norm_sqr() + zk.norm_sqr()))
    }
}

/// Random quadric point at distance about `scale` from `z` (tangent step plus
/// Newton reprojection); `z` must be on the quadric.
pub fn perturb_on_quadric(
    z: &[C64],
    scale: f64,
    rng: &mut Prng,
) -> Result<Vec<C64>, crate::geometry::GeometryError> {
    let d = z.len();
    // tangent direction: b with b.z = 0
    let dir: Vec<C64> = (0..d).map(|_| C64::new(rng.normal(), rng.normal())).collect();
    let zz = norm_sq(z);
    let coef = bullet(&dir, z).expect("equal lengths") / zz;
    // subtract the bullet component along conj(z)
    let tangent: Vec<C64> = dir
        .iter()
        .zip(z)
        .map(|(v, zi)| v - coef * zi.conj())
        .collect();
    let nt = norm(&tangent);
    if nt < 1e-9 {
        return Err(crate::geometry::GeometryError::ProjectionFailed { defect: 0.0 });
    }
    let stepped: Vec<C64> = z
        .iter()
        .zip(&tangent)
        .map(|(zi, ti)| zi + ti * (scale / nt))
        .collect();
    project_to_quadric(&stepped, 1e-12)
}

/// A comparable pair `(Z, Z~)` as in the reduction-of-estimates setup, plus
/// the chart data needed to pair integration variables.
#[derive(Debug, Clone)]
pub struct ComparabilityContext {
    pub shape: BlockIndex,
    pub zp: AmbientPoint,
    /// comparable flat point in `C^{|N|}`
    pub zt: Vec<C64>,
    pub chart_z: Option<Chart>,
    pub chart_w: Option<Chart>,
    /// comparability mode `i` used by partner generation
    pub mode: u8,
}

/// Build `Z~` comparable with `Z`: `x~ = x`; each quadric block maps through
/// its chart when one exists, otherwise to a norm-matched canonical (or
/// random) direction.
pub fn comparable_pair(
    zp: &AmbientPoint,
    ctx_n: &ChartContext,
    ctx_m: &ChartContext,
    mode: u8,
    randomize: bool,
    rng: &mut Prng,
) -> ComparabilityContext {
    let shape = zp.shape;
    let mut zt: Vec<C64> = Vec::with_capacity(shape.domain_dim());
    zt.extend_from_slice(zp.x());

    let chart_z = Chart::build(zp.z(), ctx_n).ok();
    zt.extend(block_image(zp.z(), &chart_z, shape.n, randomize, rng));
    let chart_w = Chart::build(zp.w(), ctx_m).ok();
    zt.extend(block_image(zp.w(), &chart_w, shape.m, randomize, rng));

    ComparabilityContext {
        shape,
        zp: zp.clone(),
        zt,
        chart_z,
        chart_w,
        mode,
    }
}

fn block_image(
    block: &[C64],
    chart: &Option<Chart>,
    out_dim: usize,
    randomize: bool,
    rng: &mut Prng,
) -> Vec<C64> {
    match chart {
        Some(c) => c.apply(block),
        None => {
            let nb = norm(block);
            if randomize {
                random_cn_direction(out_dim, nb, rng)
            } else {
                let mut v = vec![C64::ZERO; out_dim];
                v[0] = C64::new(nb, 0.0);
                v
            }
        }
    }
}

fn random_cn_direction(dim: usize, scale: f64, rng: &mut Prng) -> Vec<C64> {
    let raw = rng.unit_vector(2 * dim);
    raw.chunks_exact(2)
        .map(|p| C64::new(p[0], p[1]) * scale)
        .collect()
}

/// Produce a flat-side partner `Theta~ in C^{|N|}` i-comparable with an
/// integration point `Theta` of `M_N` under the fixed comparable pair.
///
/// Per quadric block the three-case rule applies: the chart image when the
/// point sits in the chart patch (the chart wins on overlaps), a norm-matched
/// random direction when the block norm exceeds `sqrt(2)` times the base
/// norm, and otherwise a random point of the constrained annulus, with the
/// extra norm cap when `i = 1`.
pub fn i_comparable_partner(
    theta: &AmbientPoint,
    ctx: &ComparabilityContext,
    rng: &mut Prng,
) -> Vec<C64> {
    let shape = ctx.shape;
    let mut out: Vec<C64> = Vec::with_capacity(shape.domain_dim());
    out.extend_from_slice(theta.x());

    let zt_block = &ctx.zt[shape.l..shape.l + shape.n];
    out.extend(partner_block(
        theta.z(),
        ctx.zp.z(),
        zt_block,
        &ctx.chart_z,
        shape.n,
        ctx.mode,
        rng,
    ));
    let wt_block = &ctx.zt[shape.l + shape.n..];
    out.extend(partner_block(
        theta.w(),
        ctx.zp.w(),
        wt_block,
        &ctx.chart_w,
        shape.m,
        ctx.mode,
        rng,
    ));
    out
}

fn partner_block(
    zeta: &[C64],
    z: &[C64],
    zt: &[C64],
    chart: &Option<Chart>,
    out_dim: usize,
    mode: u8,
    rng: &mut Prng,
) -> Vec<C64> {
    let nz = norm(z);
    let nzeta = norm(zeta);
    // chart case wins whenever the point lies in the patch
    if let Some(c) = chart {
        if crate::kernels::dist(zeta, z) < c.patch_radius() {
            return c.apply(zeta);
        }
    }
    if nzeta > core::f64::consts::SQRT_2 * nz {
        return random_cn_direction(out_dim, nzeta, rng);
    }
    // constrained annulus: |zeta~| <= sqrt(2) |z~|, |zeta~ - z~| > |z~|/C2,
    // and |zeta~| <= |zeta| when i = 1
    let nzt = norm(zt);
    let c2 = chart.as_ref().map(|c| c.c2).unwrap_or(24.0);
    let cap = if mode == 1 {
        nzeta.min(core::f64::consts::SQRT_2 * nzt)
    } else {
        core::f64::consts::SQRT_2 * nzt
    };
    for _ in 0..1000 {
        let s = cap * rng.random::<f64>();
        let cand = random_cn_direction(out_dim, s, rng);
        let d: f64 = cand
            .iter()
            .zip(zt)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if d > nzt / c2 {
            return cand;
        }
    }
    // the annulus constraint excludes only a tiny ball; reaching this means
    // the base is degenerate, fall back to a norm match
    random_cn_direction(out_dim, cap, rng)
}
