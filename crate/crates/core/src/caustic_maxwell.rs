//! BR-caustics (unions of momentary focal curves) and BR-Maxwell sets
//! (self-intersections of the momentary fronts).
//!
//! Maxwell points are found by sampling both front sheets, bucketing the
//! samples in a flat 4D spatial hash, and refining nearby pairs with a
//! damped Gauss-Newton iteration on `LS(s1, mu1) = LS(s2, mu2)`.

use std::collections::BTreeMap;

use nalgebra::{Matrix4, Vector4};
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::frames::{frames_along, vj_nth, FrameError};
use crate::fronts::{focal_from_jet, FocalGap, FocalSample, FrontError, SignChoice};
use crate::jet::{Jet, Scalar};
use crate::pseudo_metric::{det_with_spatial_basis, inner_generic, wedge_generic, SemiVector};
use crate::singularities::height_from;
use crate::tolerances::{SampleGrid, Tolerances};
use crate::worldsheet::{MomentaryCurve, SheetError, WorldSheet};

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CausticCloud {
    pub samples: Vec<FocalSample>,
    pub gaps: Vec<FocalGap>,
    /// Largest of `|H|, |H_s|, |H_ss|` at the samples.
    pub max_residual: f64,
    /// Samples whose residual exceeds `focal_residual_tol`.
    pub failed: usize,
}

impl CausticCloud {
    fn extend(&mut self, other: CausticCloud) {
        self.samples.extend(other.samples);
        self.gaps.extend(other.gaps);
        self.max_residual = self.max_residual.max(other.max_residual);
        self.failed += other.failed;
    }
}

/// Focal curve samples of one slice for the given signs, residual-checked.
pub fn caustic_slice(
    curve: &MomentaryCurve<'_>,
    signs: &[SignChoice],
    n_s: usize,
    tol: &Tolerances,
) -> Result<CausticCloud, FrameError> {
    let ss = curve.arc_samples(n_s);
    let frames = frames_along(curve, &ss, tol)?;
    let mut out = CausticCloud::default();
    for &sign in signs {
        let mut gap: Option<(f64, f64)> = None;
        for fj in &frames {
            match focal_from_jet(fj, sign, tol) {
                Ok(sample) => {
                    if let Some((s0, s1)) = gap.take() {
                        out.gaps.push(FocalGap {
                            t: curve.t(),
                            sign,
                            s_start: s0,
                            s_end: s1,
                        });
                    }
                    let direct: [SemiVector; 5] = std::array::from_fn(|k| vj_nth(&fj.gamma, k));
                    let he = height_from(fj, &sample.point, &direct);
                    let r = he.h.abs().max(he.dh_frame[0].abs()).max(he.dh_frame[1].abs());
                    out.max_residual = out.max_residual.max(r);
                    if !(r <= tol.focal_residual_tol) {
                        out.failed += 1;
                    }
                    out.samples.push(sample);
                }
                Err(FrontError::ParabolicPoint { .. }) => {
                    gap = Some(match gap {
                        Some((s0, _)) => (s0, fj.sigma),
                        None => (fj.sigma, fj.sigma),
                    });
                }
                Err(FrontError::Frame(e)) => return Err(e),
            }
        }
        if let Some((s0, s1)) = gap {
            out.gaps.push(FocalGap {
                t: curve.t(),
                sign,
                s_start: s0,
                s_end: s1,
            });
        }
    }
    Ok(out)
}

/// Caustic over explicit `t` values.
pub fn br_caustic_slices(
    sheet: &WorldSheet,
    ts: &[f64],
    n_s: usize,
    signs: &[SignChoice],
    tol: &Tolerances,
) -> Result<CausticCloud, FrameError> {
    let slices: Vec<CausticCloud> = ts
        .par_iter()
        .map(|&t| {
            let curve = sheet.curve(t, tol)?;
            caustic_slice(&curve, signs, n_s, tol)
        })
        .collect::<Result<_, _>>()?;
    let mut out = CausticCloud::default();
    for s in slices {
        out.extend(s);
    }
    Ok(out)
}

/// Union of the focal curves of both signs over the grid's `t` values.
pub fn br_caustic(sheet: &WorldSheet, grid: &SampleGrid, tol: &Tolerances) -> Result<CausticCloud, FrameError> {
    br_caustic_slices(sheet, &grid.t_values(sheet.t_range()), grid.n_s, &SignChoice::BOTH, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum MaxwellKind {
    CrossSheet,
    SameSheet,
    BaseCurve,
    FocalConcentration,
}

impl MaxwellKind {
    pub fn name(self) -> &'static str {
        match self {
            MaxwellKind::CrossSheet => "CrossSheet",
            MaxwellKind::SameSheet => "SameSheet",
            MaxwellKind::BaseCurve => "BaseCurve",
            MaxwellKind::FocalConcentration => "FocalConcentration",
        }
    }
}

/// Ray parameters of a front point; `s` is arc length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Preimage {
    pub s: f64,
    pub mu: f64,
    pub sign: SignChoice,
}

impl Preimage {
    fn key(&self) -> (SignChoice, f64, f64) {
        (self.sign, self.s, self.mu)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MaxwellSample {
    pub t: f64,
    pub point: SemiVector,
    pub preimages: [Preimage; 2],
    pub kind: MaxwellKind,
    /// Euclidean distance between the two front points after refinement.
    pub residual: f64,
}

/// Pair-search bookkeeping for one or more slices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct MaxwellStats {
    pub front_samples: usize,
    pub candidate_pairs: usize,
    pub refined_pairs: usize,
    pub converged: usize,
    pub trivial: usize,
    /// Same-sheet iterations that slid onto the diagonal `s1 = s2`.
    pub collapsed: usize,
    /// Same-sheet solutions whose preimage gap is within their uncertainty.
    pub uncertified: usize,
}

impl MaxwellStats {
    fn add(&mut self, o: &MaxwellStats) {
        self.front_samples += o.front_samples;
        self.candidate_pairs += o.candidate_pairs;
        self.refined_pairs += o.refined_pairs;
        self.converged += o.converged;
        self.trivial += o.trivial;
        self.collapsed += o.collapsed;
        self.uncertified += o.uncertified;
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MaxwellSet {
    pub samples: Vec<MaxwellSample>,
    pub stats: MaxwellStats,
}

/// Front ray at original parameter `u`: `(Gamma, v, dGamma/du, dv/du)` with
/// `v = b +- n`. Independent of how the curve is parametrized.
pub fn ray_derivatives(sheet: &WorldSheet, u: f64, t: f64, sign: SignChoice) -> Result<[SemiVector; 4], SheetError> {
    let (g, gt) = sheet.s_jets(u, t)?;
    let gu = g.map(|j| j.derivative());
    let speed = inner_generic(&gu, &gu);
    if speed.c[0] <= 0.0 {
        return Err(SheetError::NotSpacelike {
            s: u,
            t,
            norm_sq: speed.c[0],
        });
    }
    let inv = <Jet as Scalar>::constant(1.0) / speed.sqrt();
    let tv = gu.map(|j| j * inv);
    let w = wedge_generic(&g, &tv, &gt);
    let q = inner_generic(&w, &w);
    let q = if q.c[0] < 0.0 { -q } else { q };
    let inv = <Jet as Scalar>::constant(1.0) / q.sqrt();
    let n = w.map(|j| j * inv);
    let mut b = wedge_generic(&g, &n, &tv);
    if det_with_spatial_basis(&SemiVector(g.map(|j| j.c[0])), &SemiVector(b.map(|j| j.c[0]))) < 0.0 {
        b = b.map(|j| -j);
    }
    let e = sign.eps();
    let v: [Jet; 4] = std::array::from_fn(|i| b[i] + n[i].scale(e));
    Ok([vj_nth(&g, 0), vj_nth(&v, 0), vj_nth(&g, 1), vj_nth(&v, 1)])
}

struct SliceContext<'a> {
    curve: &'a MomentaryCurve<'a>,
    sheet: &'a WorldSheet,
    t: f64,
    u_range: (f64, f64),
    closed: bool,
    mu_lo: f64,
    mu_hi: f64,
}

impl SliceContext<'_> {
    fn period(&self) -> f64 {
        self.u_range.1 - self.u_range.0
    }

    fn wrap(&self, u: f64) -> Option<f64> {
        let (a, b) = self.u_range;
        if self.closed {
            Some(a + (u - a).rem_euclid(self.period()))
        } else if u >= a && u <= b {
            Some(u)
        } else {
            None
        }
    }

    fn param_gap(&self, u1: f64, u2: f64) -> f64 {
        let d = (u1 - u2).abs();
        if self.closed {
            d.min(self.period() - d)
        } else {
            d
        }
    }
}

/// Number of consecutive contracting steps after which a same-sheet
/// iteration is treated as sliding onto the diagonal `u1 = u2`.
const COLLAPSE_STEPS: usize = 3;
const COLLAPSE_RATIO: f64 = 0.9;
/// A same-sheet solution is kept only if its preimage gap exceeds this
/// multiple of its positional uncertainty `residual / sv3`.
const CERTIFY_FACTOR: f64 = 10.0;
/// Preimage bins per curve used when thinning candidate pairs.
const THIN_BINS: usize = 16;

enum Outcome {
    Converged(Refined),
    Collapsed,
    Failed,
}

/// Converged intersection of two front rays.
struct Refined {
    x: [f64; 4],
    point: SemiVector,
    residual: f64,
    /// Singular values of the final Jacobian, largest first.
    sv: [f64; 4],
}

type Residual = (Vector4<f64>, Matrix4<f64>, SemiVector);

fn pair_residual(ctx: &SliceContext<'_>, x: &[f64; 4], signs: [SignChoice; 2]) -> Result<Residual, SheetError> {
    let r1 = ray_derivatives(ctx.sheet, x[0], ctx.t, signs[0])?;
    let r2 = ray_derivatives(ctx.sheet, x[2], ctx.t, signs[1])?;
    let p1 = r1[0] + x[1] * r1[1];
    let p2 = r2[0] + x[3] * r2[1];
    let f = Vector4::from_fn(|i, _| p1.0[i] - p2.0[i]);
    let d1 = r1[2] + x[1] * r1[3];
    let d2 = r2[2] + x[3] * r2[3];
    let j = Matrix4::from_fn(|i, k| match k {
        0 => d1.0[i],
        1 => r1[1].0[i],
        2 => -d2.0[i],
        _ => -r2[1].0[i],
    });
    Ok((f, j, p1))
}

/// Gauss-Newton step from the lightly regularized normal equations; close
/// to the minimum-norm step when the Jacobian is rank deficient.
fn gauss_newton_step(f: &Vector4<f64>, j: &Matrix4<f64>) -> Option<Vector4<f64>> {
    let mut jtj = j.transpose() * j;
    let scale = (0..4).map(|i| jtj[(i, i)]).fold(0.0, f64::max);
    if !(scale > 0.0 && scale.is_finite()) {
        return None;
    }
    for i in 0..4 {
        jtj[(i, i)] += 1e-14 * scale;
    }
    jtj.cholesky().map(|c| c.solve(&(-(j.transpose() * f))))
}

/// Damped Gauss-Newton on `Gamma(u1) + mu1 v1(u1) - Gamma(u2) - mu2 v2(u2) = 0`
/// in the original curve parameter.
fn refine_pair(
    ctx: &SliceContext<'_>,
    start: [f64; 4],
    signs: [SignChoice; 2],
    target: f64,
    max_iter: usize,
) -> Result<Outcome, SheetError> {
    let same = signs[0] == signs[1];
    let mut x = start;
    let (mut f, mut j, mut p) = pair_residual(ctx, &x, signs)?;
    let mut norm = f.norm();
    let mut gap = ctx.param_gap(x[0], x[2]);
    let mut contracting = 0;
    for _ in 0..max_iter {
        if norm <= target {
            break;
        }
        let Some(step) = gauss_newton_step(&f, &j) else {
            return Ok(Outcome::Failed);
        };
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial = [
                x[0] + alpha * step[0],
                x[1] + alpha * step[1],
                x[2] + alpha * step[2],
                x[3] + alpha * step[3],
            ];
            let (Some(u1), Some(u2)) = (ctx.wrap(trial[0]), ctx.wrap(trial[2])) else {
                alpha *= 0.5;
                continue;
            };
            let trial = [u1, trial[1], u2, trial[3]];
            let (f2, j2, p2) = pair_residual(ctx, &trial, signs)?;
            let n2 = f2.norm();
            if n2 < norm {
                x = trial;
                (f, j, p) = (f2, j2, p2);
                norm = n2;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            return Ok(Outcome::Failed);
        }
        if same {
            let g = ctx.param_gap(x[0], x[2]);
            contracting = if g < COLLAPSE_RATIO * gap { contracting + 1 } else { 0 };
            gap = g;
            if contracting >= COLLAPSE_STEPS {
                return Ok(Outcome::Collapsed);
            }
        }
    }
    if norm > target {
        return Ok(Outcome::Failed);
    }
    let mut sv: Vec<f64> = j.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(Outcome::Converged(Refined {
        x,
        point: p,
        residual: norm,
        sv: [sv[0], sv[1], sv[2], sv[3]],
    }))
}

#[derive(Clone, Copy)]
struct RaySample {
    gamma: SemiVector,
    v: SemiVector,
}

/// Indices of one front sample: `(sign index, s index, mu index)`.
type SampleIx = (usize, usize, usize);

fn distinct(a: SampleIx, b: SampleIx, n_s: usize, closed: bool) -> bool {
    if a.0 != b.0 {
        return true;
    }
    let d = a.1.abs_diff(b.1);
    let d = if closed { d.min(n_s - d) } else { d };
    d >= 2
}

type Cell = [i64; 4];

fn cell_of(p: &SemiVector, h: f64) -> Cell {
    p.0.map(|x| (x / h).floor() as i64)
}

/// The 40 neighbor offsets that are lexicographically positive, so that
/// every unordered pair of adjacent cells is visited once.
fn forward_offsets() -> Vec<Cell> {
    let mut out = Vec::with_capacity(40);
    for code in 0..81i64 {
        let mut c = code;
        let mut off = [0i64; 4];
        for d in off.iter_mut() {
            *d = c % 3 - 1;
            c /= 3;
        }
        if off > [0; 4] {
            out.push(off);
        }
    }
    out
}

fn offset(c: &Cell, o: &Cell) -> Cell {
    [c[0] + o[0], c[1] + o[1], c[2] + o[2], c[3] + o[3]]
}

/// All index pairs `(i, j)`, `i < j`, of points within Euclidean distance
/// `h` of each other that satisfy `keep`.
fn close_pairs<F>(points: &[SemiVector], h: f64, keep: F) -> Vec<(usize, usize, f64)>
where
    F: Fn(usize, usize) -> bool + Sync,
{
    let mut table: FxHashMap<Cell, Vec<usize>> = FxHashMap::default();
    for (idx, p) in points.iter().enumerate() {
        table.entry(cell_of(p, h)).or_default().push(idx);
    }
    let mut cells: Vec<(&Cell, &Vec<usize>)> = table.iter().collect();
    cells.sort_by(|a, b| a.0.cmp(b.0));
    let offsets = forward_offsets();
    let test = |a: usize, b: usize, out: &mut Vec<(usize, usize, f64)>| {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        if keep(a, b) {
            let d = points[a].euclid_dist(&points[b]);
            if d <= h {
                out.push((a, b, d));
            }
        }
    };
    let mut pairs: Vec<(usize, usize, f64)> = cells
        .par_iter()
        .flat_map_iter(|(c, bucket)| {
            let mut found = Vec::new();
            for (k, &a) in bucket.iter().enumerate() {
                for &b in &bucket[k + 1..] {
                    test(a, b, &mut found);
                }
            }
            for o in &offsets {
                if let Some(other) = table.get(&offset(c, o)) {
                    for &a in bucket.iter() {
                        for &b in other {
                            test(a, b, &mut found);
                        }
                    }
                }
            }
            found
        })
        .collect();
    pairs.sort_by_key(|x| (x.0, x.1));
    pairs
}

/// Sign pair, midpoint cell and the two coarse preimage bins.
type ThinKey = (usize, usize, Cell, usize, usize);

/// Self-intersections of the momentary fronts at one `t`.
pub fn maxwell_momentary(
    sheet: &WorldSheet,
    t: f64,
    grid: &SampleGrid,
    signs: &[SignChoice],
    tol: &Tolerances,
) -> Result<MaxwellSet, FrameError> {
    let curve = sheet.curve(t, tol)?;
    let closed = curve.is_closed();
    let sigmas = curve.arc_samples(grid.n_s);
    let n_s = sigmas.len();
    let us: Vec<f64> = sigmas.iter().map(|&s| curve.param_of(s)).collect::<Result<_, _>>()?;
    let mus = grid.mu_values();
    let mu_step = (grid.mu_range.1 - grid.mu_range.0) / (grid.n_mu.max(2) - 1) as f64;
    let ctx = SliceContext {
        curve: &curve,
        sheet,
        t,
        u_range: sheet.s_range(),
        closed,
        mu_lo: grid.mu_range.0 - mu_step,
        mu_hi: grid.mu_range.1 + mu_step,
    };

    let rays: Vec<Vec<RaySample>> = signs
        .iter()
        .map(|&sign| {
            us.par_iter()
                .map(|&u| {
                    let r = ray_derivatives(sheet, u, t, sign)?;
                    Ok(RaySample { gamma: r[0], v: r[1] })
                })
                .collect::<Result<Vec<_>, SheetError>>()
        })
        .collect::<Result<_, _>>()?;

    let mut ids: Vec<SampleIx> = Vec::with_capacity(signs.len() * n_s * mus.len());
    let mut points: Vec<SemiVector> = Vec::with_capacity(ids.capacity());
    for (si, r) in rays.iter().enumerate() {
        for (i, ray) in r.iter().enumerate() {
            for (k, &mu) in mus.iter().enumerate() {
                ids.push((si, i, k));
                points.push(ray.gamma + mu * ray.v);
            }
        }
    }

    let h = grid.hash_cell;
    let candidates = close_pairs(&points, h, |p, q| distinct(ids[p], ids[q], n_s, closed));

    // One representative pair per sign pair, midpoint cell and coarse
    // preimage bins: the closest one.
    let bins = THIN_BINS.min(n_s);
    let mut best: BTreeMap<ThinKey, (f64, usize, usize)> = BTreeMap::new();
    for &(pi, qi, d) in &candidates {
        let (ia, ib) = (ids[pi], ids[qi]);
        let mid = 0.5 * (points[pi] + points[qi]);
        let key = (ia.0, ib.0, cell_of(&mid, 0.5 * h), ia.1 * bins / n_s, ib.1 * bins / n_s);
        let entry = best.entry(key).or_insert((d, pi, qi));
        if d < entry.0 {
            *entry = (d, pi, qi);
        }
    }
    let pairs: Vec<(usize, usize)> = best.values().map(|&(_, p, q)| (p, q)).collect();

    let target = 0.1 * grid.refine_tol;
    let outcomes: Vec<(Outcome, [SignChoice; 2])> = pairs
        .par_iter()
        .map(|&(pi, qi)| {
            let (a, b) = (ids[pi], ids[qi]);
            let start = [us[a.1], mus[a.2], us[b.1], mus[b.2]];
            let sgn = [signs[a.0], signs[b.0]];
            Ok((refine_pair(&ctx, start, sgn, target, 40)?, sgn))
        })
        .collect::<Result<_, SheetError>>()?;

    let mut stats = MaxwellStats {
        front_samples: points.len(),
        candidate_pairs: candidates.len(),
        refined_pairs: pairs.len(),
        ..MaxwellStats::default()
    };
    let mut kept = Vec::new();
    for (outcome, sgn) in outcomes {
        let sol = match outcome {
            Outcome::Converged(r) => r,
            Outcome::Collapsed => {
                stats.collapsed += 1;
                continue;
            }
            Outcome::Failed => continue,
        };
        stats.converged += 1;
        if [sol.x[1], sol.x[3]].iter().any(|&m| m < ctx.mu_lo || m > ctx.mu_hi) {
            continue;
        }
        let kind = classify_solution(&ctx, &sol, sgn, grid.refine_tol)?;
        if sgn[0] == sgn[1] && kind != MaxwellKind::FocalConcentration {
            let gap = ctx.param_gap(sol.x[0], sol.x[2]);
            if gap <= tol.preimage_sep {
                stats.trivial += 1;
                continue;
            }
            if gap <= CERTIFY_FACTOR * sol.residual / sol.sv[2] {
                stats.uncertified += 1;
                continue;
            }
        }
        kept.push(RawSolution {
            x: sol.x,
            point: sol.point,
            residual: sol.residual,
            signs: sgn,
            kind,
        });
    }
    let clustered = cluster(kept, 2.0 * grid.refine_tol);
    let mut samples: Vec<MaxwellSample> = clustered
        .iter()
        .map(|sol| finish_sample(&ctx, sol))
        .collect::<Result<_, SheetError>>()?;
    sort_samples(&mut samples);
    Ok(MaxwellSet { samples, stats })
}

/// Kind of a converged intersection. A preimage sits at its own focal
/// point when `|mu - 1/kappa| * |v|` is within `10 * refine_tol`, with
/// `kappa = -<v_u, Gamma_u> / <Gamma_u, Gamma_u>`.
fn classify_solution(
    ctx: &SliceContext<'_>,
    sol: &Refined,
    signs: [SignChoice; 2],
    refine_tol: f64,
) -> Result<MaxwellKind, SheetError> {
    let near = 10.0 * refine_tol;
    let (mu1, mu2) = (sol.x[1], sol.x[3]);
    if mu1.abs() <= near && mu2.abs() <= near {
        return Ok(MaxwellKind::BaseCurve);
    }
    for (u, mu, sign) in [(sol.x[0], mu1, signs[0]), (sol.x[2], mu2, signs[1])] {
        let [_, v, gu, vu] = ray_derivatives(ctx.sheet, u, ctx.t, sign)?;
        let kappa = -vu.inner(&gu) / gu.inner(&gu);
        if kappa != 0.0 && (mu - 1.0 / kappa).abs() * v.euclid_norm() <= near {
            return Ok(MaxwellKind::FocalConcentration);
        }
    }
    Ok(if signs[0] != signs[1] {
        MaxwellKind::CrossSheet
    } else {
        MaxwellKind::SameSheet
    })
}

#[derive(Clone, Copy)]
struct RawSolution {
    x: [f64; 4],
    point: SemiVector,
    residual: f64,
    signs: [SignChoice; 2],
    kind: MaxwellKind,
}

/// Groups solutions whose points lie within `radius` of each other and
/// keeps the one with the smallest residual from each group.
fn cluster(mut sols: Vec<RawSolution>, radius: f64) -> Vec<RawSolution> {
    sols.sort_by(|a, b| {
        a.residual.total_cmp(&b.residual).then_with(|| {
            a.x.iter()
                .zip(&b.x)
                .fold(std::cmp::Ordering::Equal, |o, (p, q)| o.then(p.total_cmp(q)))
        })
    });
    let mut table: FxHashMap<Cell, Vec<usize>> = FxHashMap::default();
    let mut out: Vec<RawSolution> = Vec::new();
    'next: for sol in sols {
        let c = cell_of(&sol.point, radius);
        for code in 0..81i64 {
            let mut k = code;
            let mut cell = c;
            for d in cell.iter_mut() {
                *d += k % 3 - 1;
                k /= 3;
            }
            if let Some(bucket) = table.get(&cell) {
                if bucket.iter().any(|&k| out[k].point.euclid_dist(&sol.point) <= radius) {
                    continue 'next;
                }
            }
        }
        table.entry(c).or_default().push(out.len());
        out.push(sol);
    }
    out
}

fn finish_sample(ctx: &SliceContext<'_>, sol: &RawSolution) -> Result<MaxwellSample, SheetError> {
    let mut pre = [
        Preimage {
            s: ctx.curve.arc_of(sol.x[0])?,
            mu: sol.x[1],
            sign: sol.signs[0],
        },
        Preimage {
            s: ctx.curve.arc_of(sol.x[2])?,
            mu: sol.x[3],
            sign: sol.signs[1],
        },
    ];
    if cmp_key(&pre[1], &pre[0]).is_lt() {
        pre.swap(0, 1);
    }
    Ok(MaxwellSample {
        t: ctx.t,
        point: sol.point,
        preimages: pre,
        kind: sol.kind,
        residual: sol.residual,
    })
}

fn cmp_key(a: &Preimage, b: &Preimage) -> std::cmp::Ordering {
    let (sa, xa, ma) = a.key();
    let (sb, xb, mb) = b.key();
    sa.cmp(&sb).then(xa.total_cmp(&xb)).then(ma.total_cmp(&mb))
}

/// Canonical output order: `(t, s1, mu1)`, then the remaining fields.
pub fn sort_samples(samples: &mut [MaxwellSample]) {
    samples.sort_by(|a, b| {
        a.t.total_cmp(&b.t)
            .then(a.preimages[0].s.total_cmp(&b.preimages[0].s))
            .then(a.preimages[0].mu.total_cmp(&b.preimages[0].mu))
            .then(a.preimages[0].sign.cmp(&b.preimages[0].sign))
            .then(cmp_key(&a.preimages[1], &b.preimages[1]))
            .then(a.kind.cmp(&b.kind))
    });
}

/// Maxwell samples of every `t`-slice of the grid.
pub fn maxwell_unfolded(sheet: &WorldSheet, grid: &SampleGrid, tol: &Tolerances) -> Result<MaxwellSet, FrameError> {
    maxwell_slices(sheet, &grid.t_values(sheet.t_range()), grid, &SignChoice::BOTH, tol)
}

pub fn maxwell_slices(
    sheet: &WorldSheet,
    ts: &[f64],
    grid: &SampleGrid,
    signs: &[SignChoice],
    tol: &Tolerances,
) -> Result<MaxwellSet, FrameError> {
    let slices: Vec<MaxwellSet> = ts
        .par_iter()
        .map(|&t| maxwell_momentary(sheet, t, grid, signs, tol))
        .collect::<Result<_, _>>()?;
    let mut out = MaxwellSet::default();
    for s in slices {
        out.stats.add(&s.stats);
        out.samples.extend(s.samples);
    }
    sort_samples(&mut out.samples);
    Ok(out)
}

/// Caustic and Maxwell set together.
pub fn discriminant(
    sheet: &WorldSheet,
    grid: &SampleGrid,
    tol: &Tolerances,
) -> Result<(CausticCloud, MaxwellSet), FrameError> {
    Ok((br_caustic(sheet, grid, tol)?, maxwell_unfolded(sheet, grid, tol)?))
}
