//! AdS height function, the invariant `sigma+-`, front singularity
//! classification, swallowtail root finding and the versality determinant.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::frames::{frame_jet, frames_along, vj_nth, FrameData, FrameError, FrameJet};
use crate::fronts::{focal_jet, kappa_jet, null_direction, FrontError, SignChoice};
use crate::jet::{Jet, Scalar};
use crate::pseudo_metric::{inner, SemiVector};
use crate::tolerances::{linspace, Tolerances};
use crate::worldsheet::MomentaryCurve;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SingularityError {
    #[error("no usable chart: both timelike components of lambda are below {floor} ({lm1}, {l0})")]
    ChartDegenerate { lm1: f64, l0: f64, floor: f64 },
    #[error(transparent)]
    Front(#[from] FrontError),
}

impl From<FrameError> for SingularityError {
    fn from(e: FrameError) -> Self {
        SingularityError::Front(FrontError::Frame(e))
    }
}

/// `sigma+-` as a jet in the arc-length parameter (valid to order 1):
/// `(kappa_n +- kappa_g) tau_g -+ (kappa_n' +- kappa_g')`.
pub fn sigma_jet(fj: &FrameJet, sign: SignChoice) -> Jet {
    let e = sign.eps();
    let kg = fj.kappa_g;
    let kn = fj.kappa_n;
    (kn + kg.scale(e)) * fj.tau_g - (kn.derivative() + kg.derivative().scale(e)).scale(e)
}

/// `sigma+-` from frame values.
pub fn sigma_from(f: &FrameData, sign: SignChoice) -> f64 {
    let e = sign.eps();
    (f.kappa_n + e * f.kappa_g) * f.tau_g - e * (f.dkappa_n + e * f.dkappa_g)
}

pub fn sigma(curve: &MomentaryCurve<'_>, s: f64, sign: SignChoice, tol: &Tolerances) -> Result<f64, FrameError> {
    Ok(sigma_jet(&frame_jet(curve, s, tol)?, sign).c[0])
}

pub fn dsigma(curve: &MomentaryCurve<'_>, s: f64, sign: SignChoice, tol: &Tolerances) -> Result<f64, FrameError> {
    Ok(sigma_jet(&frame_jet(curve, s, tol)?, sign).derivative_at(1))
}

/// Coefficient of `t` in the frame expansion of the third derivative of `Gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThirdOrderCoefficient {
    /// `1 + kappa_g^2 - kappa_n^2`, from the Frenet-Serret formulae.
    Derived,
    /// `1 + kappa_g^2 + kappa_n^2`.
    Printed,
}

impl ThirdOrderCoefficient {
    pub fn value(self, f: &FrameData) -> f64 {
        match self {
            ThirdOrderCoefficient::Derived => 1.0 + f.kappa_g * f.kappa_g - f.kappa_n * f.kappa_n,
            ThirdOrderCoefficient::Printed => 1.0 + f.kappa_g * f.kappa_g + f.kappa_n * f.kappa_n,
        }
    }
}

/// `d^3 Gamma / ds^3` expanded in the frame.
pub fn gamma_third(f: &FrameData, coef: ThirdOrderCoefficient) -> SemiVector {
    coef.value(f) * f.tvec + (f.kappa_n * f.tau_g - f.dkappa_g) * f.bvec + (f.dkappa_n - f.kappa_g * f.tau_g) * f.nvec
}

/// Height function `H = <Gamma, lambda> + 1` and its `s`-derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeightEval {
    pub s: f64,
    pub t: f64,
    pub lambda: SemiVector,
    pub h: f64,
    /// `H_s, H_ss, H_sss` from the frame closed forms.
    pub dh_frame: [f64; 3],
    /// `H_s ... H_ssss` from the symbolic derivative trees.
    pub dh_direct: [f64; 4],
    /// `H` from the symbolic route.
    pub h_direct: f64,
}

impl HeightEval {
    /// `d^k H / ds^k`, `k = 1..=4`; frame route up to 3, symbolic for 4.
    pub fn dh(&self, k: usize) -> f64 {
        if k <= 3 {
            self.dh_frame[k - 1]
        } else {
            self.dh_direct[k - 1]
        }
    }

    /// Largest scale-relative disagreement of the two routes on `H, H_s, H_ss`.
    pub fn route_disagreement(&self) -> f64 {
        let scale = 1.0 + self.lambda.euclid_norm();
        let mut worst = (self.h - self.h_direct).abs();
        for k in 0..2 {
            worst = worst.max((self.dh_frame[k] - self.dh_direct[k]).abs());
        }
        worst / scale
    }
}

pub fn height_from(fj: &FrameJet, lambda: &SemiVector, direct: &[SemiVector; 5]) -> HeightEval {
    let f = fj.data();
    let gss = f.gamma - f.kappa_g * f.bvec + f.kappa_n * f.nvec;
    HeightEval {
        s: f.s,
        t: f.t,
        lambda: *lambda,
        h: inner(&f.gamma, lambda) + 1.0,
        dh_frame: [
            inner(&f.tvec, lambda),
            inner(&gss, lambda),
            inner(&gamma_third(&f, ThirdOrderCoefficient::Derived), lambda),
        ],
        h_direct: inner(&direct[0], lambda) + 1.0,
        dh_direct: std::array::from_fn(|k| inner(&direct[k + 1], lambda)),
    }
}

pub fn height(
    curve: &MomentaryCurve<'_>,
    s: f64,
    lambda: &SemiVector,
    tol: &Tolerances,
) -> Result<HeightEval, FrameError> {
    let fj = frame_jet(curve, s, tol)?;
    let direct = curve.symbolic_derivatives(s)?;
    Ok(height_from(&fj, lambda, &direct))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SingularityClass {
    RegularFrontPoint,
    CuspidalEdge,
    Swallowtail,
    DegenerateOrHigher,
    ConstantFocal,
}

/// Classification of the front singularity over one curve point, given
/// whether `sigma` vanishes along the whole curve.
pub fn classify_jet(fj: &FrameJet, sign: SignChoice, constant_focal: bool, tol: &Tolerances) -> SingularityClass {
    if !(kappa_jet(fj, sign).c[0].abs() > tol.kappa_floor) {
        return SingularityClass::RegularFrontPoint;
    }
    if constant_focal {
        return SingularityClass::ConstantFocal;
    }
    let sj = sigma_jet(fj, sign);
    if sj.c[0].abs() > tol.swallowtail_tol {
        SingularityClass::CuspidalEdge
    } else if sj.derivative_at(1).abs() >= tol.dsigma_floor {
        SingularityClass::Swallowtail
    } else {
        SingularityClass::DegenerateOrHigher
    }
}

/// Largest `|sigma|` over `n` evenly spaced curve points.
pub fn max_abs_sigma(
    curve: &MomentaryCurve<'_>,
    sign: SignChoice,
    n: usize,
    tol: &Tolerances,
) -> Result<f64, FrameError> {
    let (a, b) = curve.arc_range();
    let frames = frames_along(curve, &linspace(a, b, n), tol)?;
    Ok(frames
        .iter()
        .map(|fj| sigma_jet(fj, sign).c[0].abs())
        .fold(0.0, f64::max))
}

pub fn classify_point(
    curve: &MomentaryCurve<'_>,
    s: f64,
    sign: SignChoice,
    n_scan: usize,
    tol: &Tolerances,
) -> Result<SingularityClass, FrameError> {
    let constant = max_abs_sigma(curve, sign, n_scan, tol)? <= tol.constant_focal_tol;
    Ok(classify_jet(&frame_jet(curve, s, tol)?, sign, constant, tol))
}

/// Refined zero of a scalar function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Root {
    pub s: f64,
    pub value: f64,
    pub derivative: f64,
}

/// Zeros of `f` on `[a, b]` from sign changes over `n` samples, refined by
/// Newton steps kept inside the bracket (bisection when a step leaves it).
/// `f` returns the value and the derivative. Samples already within `tol`
/// of zero count as roots.
pub fn find_roots<E, F>(f: F, a: f64, b: f64, n: usize, tol: f64) -> Result<Vec<Root>, E>
where
    F: Fn(f64) -> Result<(f64, f64), E> + Sync,
    E: Send,
{
    let xs = linspace(a, b, n.max(2));
    let vals: Vec<(f64, f64)> = xs.par_iter().map(|&x| f(x)).collect::<Result<_, _>>()?;
    let is_zero = |v: f64| v.abs() <= tol;
    let mut brackets = Vec::new();
    for i in 0..xs.len() {
        if is_zero(vals[i].0) {
            brackets.push((xs[i], xs[i], vals[i]));
        } else if i + 1 < xs.len() && !is_zero(vals[i + 1].0) && vals[i].0.signum() != vals[i + 1].0.signum() {
            brackets.push((xs[i], xs[i + 1], vals[i]));
        }
    }
    let roots: Vec<Root> = brackets
        .par_iter()
        .map(|&(lo, hi, v0)| {
            if lo == hi {
                return Ok(Root {
                    s: lo,
                    value: v0.0,
                    derivative: v0.1,
                });
            }
            refine_root(&f, lo, hi, tol)
        })
        .collect::<Result<_, _>>()?;
    let span = (b - a).abs().max(1.0);
    let mut out: Vec<Root> = Vec::with_capacity(roots.len());
    for r in roots {
        match out.last_mut() {
            Some(last) if (r.s - last.s).abs() <= 1e-9 * span => {
                if r.value.abs() < last.value.abs() {
                    *last = r;
                }
            }
            _ => out.push(r),
        }
    }
    Ok(out)
}

fn refine_root<E, F>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> Result<Root, E>
where
    F: Fn(f64) -> Result<(f64, f64), E>,
{
    let (flo, _) = f(lo)?;
    let lo_sign = flo.signum();
    let mut x = 0.5 * (lo + hi);
    let mut best = Root {
        s: x,
        value: f64::INFINITY,
        derivative: f64::NAN,
    };
    for _ in 0..200 {
        let (v, d) = f(x)?;
        if v.abs() < best.value.abs() {
            best = Root {
                s: x,
                value: v,
                derivative: d,
            };
        }
        if v.abs() <= 0.01 * tol || hi - lo <= 4.0 * f64::EPSILON * (1.0 + x.abs()) {
            break;
        }
        if v.signum() == lo_sign {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - v / d;
        x = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Ok(best)
}

/// Zeros of `sigma+-` along the curve; empty when `sigma` vanishes
/// identically (constant focal point).
pub fn sigma_roots(
    curve: &MomentaryCurve<'_>,
    sign: SignChoice,
    n: usize,
    tol: &Tolerances,
) -> Result<Vec<Root>, FrameError> {
    if max_abs_sigma(curve, sign, n, tol)? <= tol.constant_focal_tol {
        return Ok(Vec::new());
    }
    scan_sigma_roots(curve, sign, n, tol)
}

fn scan_sigma_roots(
    curve: &MomentaryCurve<'_>,
    sign: SignChoice,
    n: usize,
    tol: &Tolerances,
) -> Result<Vec<Root>, FrameError> {
    let (a, b) = curve.arc_range();
    find_roots(
        |s| {
            let sj = sigma_jet(&frame_jet(curve, s, tol)?, sign);
            Ok((sj.c[0], sj.derivative_at(1)))
        },
        a,
        b,
        n,
        tol.root_tol,
    )
}

/// `(|l'|, angle between l'' and b +- n)` at a curve point. The angle is
/// between lines, in `[0, pi/2]`; it is NaN when `l''` vanishes.
pub fn tangency_from(fj: &FrameJet, sign: SignChoice, tol: &Tolerances) -> Result<(f64, f64), FrontError> {
    let l = focal_jet(fj, sign, tol)?;
    let dir = null_direction(&fj.data(), sign);
    Ok((vj_nth(&l, 1).euclid_norm(), line_angle(&vj_nth(&l, 2), &dir)))
}

pub fn cusp_tangency_check(
    curve: &MomentaryCurve<'_>,
    s: f64,
    sign: SignChoice,
    tol: &Tolerances,
) -> Result<(f64, f64), FrontError> {
    tangency_from(&frame_jet(curve, s, tol)?, sign, tol)
}

/// Euclidean angle between the lines spanned by `u` and `v`.
pub fn line_angle(u: &SemiVector, v: &SemiVector) -> f64 {
    let nu = u.euclid_norm();
    let nv = v.euclid_norm();
    if nu == 0.0 || nv == 0.0 {
        return f64::NAN;
    }
    let dot: f64 = (0..4).map(|i| u.0[i] * v.0[i]).sum::<f64>() / (nu * nv);
    let perp = *u - (dot * nu / nv) * *v;
    (perp.euclid_norm() / nu).atan2(dot.abs())
}

/// Local chart of AdS^3 solving for one timelike component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Chart {
    /// Eliminates `lambda_-1`.
    Minus1,
    /// Eliminates `lambda_0`.
    Zero,
}

impl Chart {
    fn index(self) -> usize {
        match self {
            Chart::Minus1 => 0,
            Chart::Zero => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Versality {
    pub det: f64,
    /// `1 / lambda_c` for the eliminated component `c`.
    pub reference: f64,
    pub chart: Chart,
}

impl Versality {
    /// `| |det * lambda_c| - 1 |`.
    pub fn mismatch(&self) -> f64 {
        ((self.det / self.reference).abs() - 1.0).abs()
    }
}

pub const CHART_FLOOR: f64 = 1e-6;

/// Determinant of the chart Jacobian of `(H, H_s, H_ss)` with respect to
/// `lambda` at the focal point. With `chart = None` the timelike component
/// of largest magnitude is eliminated.
pub fn versality_from(
    fj: &FrameJet,
    sign: SignChoice,
    chart: Option<Chart>,
    tol: &Tolerances,
) -> Result<Versality, SingularityError> {
    let lambda = crate::frames::vj_nth(&focal_jet(fj, sign, tol)?, 0);
    let (lm1, l0) = (lambda.0[0], lambda.0[1]);
    if lm1.abs() < CHART_FLOOR && l0.abs() < CHART_FLOOR {
        return Err(SingularityError::ChartDegenerate {
            lm1,
            l0,
            floor: CHART_FLOOR,
        });
    }
    let chart = chart.unwrap_or(if lm1.abs() >= l0.abs() {
        Chart::Minus1
    } else {
        Chart::Zero
    });
    let c = chart.index();
    if lambda.0[c].abs() < CHART_FLOOR {
        return Err(SingularityError::ChartDegenerate {
            lm1,
            l0,
            floor: CHART_FLOOR,
        });
    }
    let eta = crate::pseudo_metric::SIGNATURE;
    let xs = [vj_nth(&fj.gamma, 0), vj_nth(&fj.gamma, 1), vj_nth(&fj.gamma, 2)];
    let cols: Vec<usize> = (0..4).filter(|&j| j != c).collect();
    let mut a = nalgebra::Matrix3::<f64>::zeros();
    for (row, x) in xs.iter().enumerate() {
        for (col, &j) in cols.iter().enumerate() {
            a[(row, col)] = eta[j] * (x.0[j] - x.0[c] * lambda.0[j] / lambda.0[c]);
        }
    }
    Ok(Versality {
        det: a.determinant(),
        reference: 1.0 / lambda.0[c],
        chart,
    })
}

pub fn versality_determinant(
    curve: &MomentaryCurve<'_>,
    s: f64,
    sign: SignChoice,
    chart: Option<Chart>,
    tol: &Tolerances,
) -> Result<Versality, SingularityError> {
    versality_from(&frame_jet(curve, s, tol)?, sign, chart, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntryResiduals {
    pub h: f64,
    pub h_s: f64,
    pub h_ss: f64,
    pub h_sss: f64,
    pub ell_prime_norm: f64,
    pub ell_pp_angle: f64,
}

impl EntryResiduals {
    const UNDEFINED: EntryResiduals = EntryResiduals {
        h: f64::NAN,
        h_s: f64::NAN,
        h_ss: f64::NAN,
        h_sss: f64::NAN,
        ell_prime_norm: f64::NAN,
        ell_pp_angle: f64::NAN,
    };
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SingularityEntry {
    pub s: f64,
    pub class: SingularityClass,
    pub sigma: f64,
    pub dsigma: f64,
    pub residuals: EntryResiduals,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularityReport {
    pub t: f64,
    pub sign: SignChoice,
    pub entries: Vec<SingularityEntry>,
}

impl SingularityReport {
    pub fn count(&self, class: SingularityClass) -> usize {
        self.entries.iter().filter(|e| e.class == class).count()
    }
}

fn entry(fj: &FrameJet, sign: SignChoice, constant: bool, tol: &Tolerances) -> SingularityEntry {
    let sj = sigma_jet(fj, sign);
    let class = classify_jet(fj, sign, constant, tol);
    let residuals = match focal_jet(fj, sign, tol) {
        Ok(l) => {
            let lambda = vj_nth(&l, 0);
            let direct: [SemiVector; 5] = std::array::from_fn(|k| vj_nth(&fj.gamma, k));
            let he = height_from(fj, &lambda, &direct);
            let (lp, angle) = tangency_from(fj, sign, tol).unwrap_or((f64::NAN, f64::NAN));
            EntryResiduals {
                h: he.h,
                h_s: he.dh_frame[0],
                h_ss: he.dh_frame[1],
                h_sss: he.dh_frame[2],
                ell_prime_norm: lp,
                ell_pp_angle: angle,
            }
        }
        Err(_) => EntryResiduals::UNDEFINED,
    };
    SingularityEntry {
        s: fj.sigma,
        class,
        sigma: sj.c[0],
        dsigma: sj.derivative_at(1),
        residuals,
    }
}

/// Classifies the front over `n` evenly spaced curve points plus every
/// refined zero of `sigma`, sorted by parameter.
pub fn analyze_curve(
    curve: &MomentaryCurve<'_>,
    sign: SignChoice,
    n: usize,
    tol: &Tolerances,
) -> Result<SingularityReport, FrameError> {
    let (a, b) = curve.arc_range();
    let closed = curve.is_closed();
    let grid = curve.arc_samples(n.max(2));
    let frames = frames_along(curve, &grid, tol)?;
    let constant = frames
        .iter()
        .all(|fj| sigma_jet(fj, sign).c[0].abs() <= tol.constant_focal_tol);
    let mut params: Vec<f64> = grid.clone();
    if !constant {
        let roots = scan_sigma_roots(curve, sign, n, tol)?;
        let span = (b - a).abs().max(1.0);
        for mut r in roots {
            if closed && (r.s - b).abs() <= 1e-9 * span {
                r.s = a;
            }
            match params.iter().position(|&p| (p - r.s).abs() <= 1e-9 * span) {
                Some(i) => params[i] = r.s,
                None => params.push(r.s),
            }
        }
        params.sort_by(|x, y| x.total_cmp(y));
    }
    let entries: Vec<SingularityEntry> = params
        .par_iter()
        .map(|&s| {
            let mut fj = frame_jet(curve, s, tol)?;
            // Match the continuity-adjusted normal of the nearest grid frame.
            let k = grid.partition_point(|&g| g < s).min(grid.len() - 1);
            let reference = crate::frames::vj_nth(&frames[k].nvec, 0);
            if inner(&reference, &vj_nth(&fj.nvec, 0)) < 0.0 {
                fj.flip_normal();
            }
            Ok(entry(&fj, sign, constant, tol))
        })
        .collect::<Result<_, FrameError>>()?;
    Ok(SingularityReport {
        t: curve.t(),
        sign,
        entries,
    })
}
