//! World sheets in AdS^3: embeddings `(s, t) -> Gamma(s, t)` given by four
//! expressions, their causal validation, and the arc-length handling of the
//! momentary curves `t = const`.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{ExprError, ExprVector4, Var};
use crate::jet::{Jet, Scalar, JET_ORDER};
use crate::pseudo_metric::{inner, inner_generic, SemiVector};
use crate::tolerances::{linspace, Tolerances};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SheetError {
    #[error("component {component}: {source}")]
    Parse {
        component: &'static str,
        #[source]
        source: ExprError,
    },
    #[error(transparent)]
    Eval(#[from] ExprError),
    #[error("invalid {which} range [{lo}, {hi}]")]
    Range { which: &'static str, lo: f64, hi: f64 },
    #[error("momentary curve is not spacelike at s = {s}, t = {t} (<Gamma_s,Gamma_s> = {norm_sq})")]
    NotSpacelike { s: f64, t: f64, norm_sq: f64 },
    #[error("parameter is not arc length at s = {s}, t = {t} (|<Gamma_s,Gamma_s> - 1| = {residual})")]
    NotArcLength { s: f64, t: f64, residual: f64 },
    #[error("arc-length parameter {sigma} outside [0, {length}]")]
    OutOfRange { sigma: f64, length: f64 },
    #[error("unknown arc-length mode '{0}'")]
    UnknownMode(String),
}

pub const COMPONENT_KEYS: [&str; 4] = ["x_m1", "x_0", "x_1", "x_2"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ArcLengthMode {
    Assume,
    Reparametrize,
    Reject,
}

impl ArcLengthMode {
    pub fn name(self) -> &'static str {
        match self {
            ArcLengthMode::Assume => "assume",
            ArcLengthMode::Reparametrize => "reparametrize",
            ArcLengthMode::Reject => "reject",
        }
    }
}

impl fmt::Display for ArcLengthMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ArcLengthMode {
    type Err = SheetError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        arc_length_strategy_by_name(s)
            .map(|st| st.mode())
            .ok_or_else(|| SheetError::UnknownMode(s.to_string()))
    }
}

/// A candidate world sheet. Immutable after construction.
#[derive(Debug)]
pub struct WorldSheet {
    sources: [String; 4],
    embedding: ExprVector4,
    d_ds: ExprVector4,
    d_dt: ExprVector4,
    higher_ds: OnceLock<Vec<ExprVector4>>,
    s_range: (f64, f64),
    t_range: (f64, f64),
    mode: ArcLengthMode,
}

impl WorldSheet {
    pub fn new(
        components: [&str; 4],
        s_range: (f64, f64),
        t_range: (f64, f64),
        mode: ArcLengthMode,
    ) -> Result<Self, SheetError> {
        for (which, (lo, hi)) in [("s", s_range), ("t", t_range)] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) || (which == "s" && lo == hi) {
                return Err(SheetError::Range { which, lo, hi });
            }
        }
        let embedding = ExprVector4::parse(components).map_err(|(i, source)| SheetError::Parse {
            component: COMPONENT_KEYS[i],
            source,
        })?;
        Ok(WorldSheet {
            sources: components.map(str::to_string),
            d_ds: embedding.differentiate(Var::S),
            d_dt: embedding.differentiate(Var::T),
            embedding,
            higher_ds: OnceLock::new(),
            s_range,
            t_range,
            mode,
        })
    }

    pub fn sources(&self) -> &[String; 4] {
        &self.sources
    }

    pub fn embedding(&self) -> &ExprVector4 {
        &self.embedding
    }

    pub fn s_range(&self) -> (f64, f64) {
        self.s_range
    }

    pub fn t_range(&self) -> (f64, f64) {
        self.t_range
    }

    pub fn mode(&self) -> ArcLengthMode {
        self.mode
    }

    pub fn with_mode(&self, mode: ArcLengthMode) -> WorldSheet {
        let components: [&str; 4] = std::array::from_fn(|i| self.sources[i].as_str());
        WorldSheet::new(components, self.s_range, self.t_range, mode).expect("already validated")
    }

    pub fn point(&self, s: f64, t: f64) -> Result<SemiVector, ExprError> {
        Ok(SemiVector(self.embedding.eval(s, t)?))
    }

    pub fn partial_s(&self, s: f64, t: f64) -> Result<SemiVector, ExprError> {
        Ok(SemiVector(self.d_ds.eval(s, t)?))
    }

    pub fn partial_t(&self, s: f64, t: f64) -> Result<SemiVector, ExprError> {
        Ok(SemiVector(self.d_dt.eval(s, t)?))
    }

    /// Taylor jets in `s` of `Gamma` and `Gamma_t` about `s0`.
    pub fn s_jets(&self, s0: f64, t: f64) -> Result<([Jet; 4], [Jet; 4]), ExprError> {
        Ok((self.embedding.eval_s_jet(s0, t)?, self.d_dt.eval_s_jet(s0, t)?))
    }

    /// Symbolic trees of `d^k Gamma / ds^k`, `k = 0..=JET_ORDER`.
    fn s_derivative_trees(&self) -> &[ExprVector4] {
        self.higher_ds.get_or_init(|| {
            let mut out = vec![self.embedding.clone(), self.d_ds.clone()];
            for k in 2..=JET_ORDER {
                let next = out[k - 1].differentiate(Var::S);
                out.push(next);
            }
            out
        })
    }

    /// `d^k Gamma / ds^k (s, t)` for `k = 0..=4` from the symbolic trees.
    pub fn symbolic_s_derivatives(&self, s: f64, t: f64) -> Result<[SemiVector; JET_ORDER + 1], ExprError> {
        let trees = self.s_derivative_trees();
        let mut out = [SemiVector::ZERO; JET_ORDER + 1];
        for (o, tree) in out.iter_mut().zip(trees) {
            *o = SemiVector(tree.eval(s, t)?);
        }
        Ok(out)
    }

    /// Runs the causal checks on an `n_s x n_t` grid.
    pub fn validate(&self, n_s: usize, n_t: usize, tol: &Tolerances) -> Result<ValidationReport, ExprError> {
        let ss = linspace(self.s_range.0, self.s_range.1, n_s.max(2));
        let ts = linspace(self.t_range.0, self.t_range.1, n_t.max(1));
        let nodes: Vec<(f64, f64)> = ts.iter().flat_map(|&t| ss.iter().map(move |&s| (s, t))).collect();
        let samples: Vec<NodeSample> = nodes
            .par_iter()
            .map(|&(s, t)| NodeSample::at(self, s, t))
            .collect::<Result<_, _>>()?;

        let check_arc = arc_length_strategy(self.mode).checks_arc_length();
        let mut checks = vec![
            Check::new(CheckKind::OnAds, tol.ads_tol, Bound::AtMost),
            Check::new(CheckKind::Spacelike, tol.spacelike_tol, Bound::Above),
            Check::new(CheckKind::TimelikePlane, -tol.timelike_tol, Bound::Below),
        ];
        if check_arc {
            checks.push(Check::new(CheckKind::ArcLength, tol.arc_tol, Bound::AtMost));
        }
        for ns in &samples {
            checks[0].observe(ns.ads_residual, ns.s, ns.t);
            checks[1].observe(ns.speed_sq, ns.s, ns.t);
            checks[2].observe(ns.gram, ns.s, ns.t);
            if check_arc {
                checks[3].observe((ns.speed_sq - 1.0).abs(), ns.s, ns.t);
            }
        }
        let checks: Vec<CheckResult> = checks.into_iter().map(Check::finish).collect();
        Ok(ValidationReport {
            passed: checks.iter().all(|c| c.passed),
            mode: self.mode,
            n_s: ss.len(),
            n_t: ts.len(),
            checks,
        })
    }

    /// Momentary curve at `t`, parametrized per the sheet's arc-length mode.
    pub fn curve(&self, t: f64, tol: &Tolerances) -> Result<MomentaryCurve<'_>, SheetError> {
        arc_length_strategy(self.mode).momentary_curve(self, t, tol)
    }
}

struct NodeSample {
    s: f64,
    t: f64,
    ads_residual: f64,
    speed_sq: f64,
    gram: f64,
}

impl NodeSample {
    fn at(w: &WorldSheet, s: f64, t: f64) -> Result<Self, ExprError> {
        let g = w.point(s, t)?;
        let gs = w.partial_s(s, t)?;
        let gt = w.partial_t(s, t)?;
        let ss = inner(&gs, &gs);
        let tt = inner(&gt, &gt);
        let st = inner(&gs, &gt);
        Ok(NodeSample {
            s,
            t,
            ads_residual: (inner(&g, &g) + 1.0).abs(),
            speed_sq: ss,
            gram: ss * tt - st * st,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// `|<Gamma,Gamma> + 1|`
    OnAds,
    /// `<Gamma_s, Gamma_s>`
    Spacelike,
    /// Gram determinant of `{Gamma_s, Gamma_t}`.
    TimelikePlane,
    /// `|<Gamma_s, Gamma_s> - 1|`
    ArcLength,
}

#[derive(Clone, Copy)]
enum Bound {
    AtMost,
    Above,
    Below,
}

struct Check {
    kind: CheckKind,
    threshold: f64,
    bound: Bound,
    worst: Option<(f64, f64, f64)>,
}

impl Check {
    fn new(kind: CheckKind, threshold: f64, bound: Bound) -> Self {
        Check {
            kind,
            threshold,
            bound,
            worst: None,
        }
    }

    fn observe(&mut self, v: f64, s: f64, t: f64) {
        let worse = match (self.worst, self.bound) {
            (None, _) => true,
            (Some((w, ..)), Bound::AtMost | Bound::Below) => v > w || v.is_nan(),
            (Some((w, ..)), Bound::Above) => v < w || v.is_nan(),
        };
        if worse {
            self.worst = Some((v, s, t));
        }
    }

    fn finish(self) -> CheckResult {
        let (v, s, t) = self.worst.unwrap_or((f64::NAN, f64::NAN, f64::NAN));
        let passed = match self.bound {
            Bound::AtMost => v <= self.threshold,
            Bound::Above => v > self.threshold,
            Bound::Below => v < self.threshold,
        };
        let failure = (!passed).then(|| match self.kind {
            CheckKind::OnAds => "embedding leaves AdS^3".to_string(),
            CheckKind::Spacelike => "momentary curve is not spacelike".to_string(),
            CheckKind::TimelikePlane => "tangent plane is not timelike".to_string(),
            CheckKind::ArcLength => "s is not an arc-length parameter".to_string(),
        });
        CheckResult {
            check: self.kind,
            worst: v,
            at: [s, t],
            threshold: self.threshold,
            passed,
            failure,
        }
    }
}

/// Worst observation of one check over the grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub check: CheckKind,
    /// Largest residual for bounded-above checks, smallest value for
    /// `spacelike`, largest Gram determinant for `timelike_plane`.
    pub worst: f64,
    pub at: [f64; 2],
    pub threshold: f64,
    pub passed: bool,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub mode: ArcLengthMode,
    pub n_s: usize,
    pub n_t: usize,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn check(&self, kind: CheckKind) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.check == kind)
    }
}

// Gauss-Legendre, 8 points on [-1, 1].
#[allow(clippy::excessive_precision)]
const GL_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
#[allow(clippy::excessive_precision)]
const GL_W: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn gauss8<F: FnMut(f64) -> Result<f64, SheetError>>(f: &mut F, a: f64, b: f64) -> Result<f64, SheetError> {
    let m = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GL_X.iter().zip(GL_W) {
        acc += w * (f(m - h * x)? + f(m + h * x)?);
    }
    Ok(acc * h)
}

fn adaptive_gauss<F: FnMut(f64) -> Result<f64, SheetError>>(
    f: &mut F,
    a: f64,
    b: f64,
    whole: f64,
    depth: u32,
) -> Result<f64, SheetError> {
    let m = 0.5 * (a + b);
    let left = gauss8(f, a, m)?;
    let right = gauss8(f, m, b)?;
    let refined = left + right;
    if depth == 0 || (refined - whole).abs() <= 1e-15 * refined.abs().max(1e-3) {
        return Ok(refined);
    }
    Ok(adaptive_gauss(f, a, m, left, depth - 1)? + adaptive_gauss(f, m, b, right, depth - 1)?)
}

/// Monotone map between the original parameter `s` and arc length `sigma`
/// along one momentary curve. Node values come from adaptive Gauss-Legendre
/// quadrature of the speed; evaluation between nodes starts from a cubic
/// Hermite guess and is polished by Newton steps on the exact integral.
#[derive(Clone, Debug)]
pub struct ArcLengthMap {
    t: f64,
    s_nodes: Vec<f64>,
    sigma_nodes: Vec<f64>,
    speed_nodes: Vec<f64>,
}

impl ArcLengthMap {
    pub fn build(w: &WorldSheet, t: f64, n_nodes: usize) -> Result<Self, SheetError> {
        let (lo, hi) = w.s_range;
        let s_nodes = linspace(lo, hi, n_nodes.max(2));
        let mut speed = |s: f64| -> Result<f64, SheetError> {
            let gs = w.partial_s(s, t)?;
            let q = inner(&gs, &gs);
            if q <= 0.0 {
                return Err(SheetError::NotSpacelike { s, t, norm_sq: q });
            }
            Ok(q.sqrt())
        };
        let mut sigma_nodes = Vec::with_capacity(s_nodes.len());
        let mut speed_nodes = Vec::with_capacity(s_nodes.len());
        let mut acc = 0.0;
        for (i, &s) in s_nodes.iter().enumerate() {
            if i > 0 {
                let a = s_nodes[i - 1];
                let whole = gauss8(&mut speed, a, s)?;
                acc += adaptive_gauss(&mut speed, a, s, whole, 12)?;
            }
            sigma_nodes.push(acc);
            speed_nodes.push(speed(s)?);
        }
        Ok(ArcLengthMap {
            t,
            s_nodes,
            sigma_nodes,
            speed_nodes,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn length(&self) -> f64 {
        *self.sigma_nodes.last().expect("at least two nodes")
    }

    fn interval_of_sigma(&self, sigma: f64) -> usize {
        let k = self.sigma_nodes.partition_point(|&v| v <= sigma);
        k.clamp(1, self.sigma_nodes.len() - 1) - 1
    }

    fn interval_of_s(&self, s: f64) -> usize {
        let k = self.s_nodes.partition_point(|&v| v <= s);
        k.clamp(1, self.s_nodes.len() - 1) - 1
    }

    /// Cubic Hermite interpolant of `s(sigma)` through the nodes.
    pub fn cubic(&self, sigma: f64) -> f64 {
        let i = self.interval_of_sigma(sigma);
        let (x0, x1) = (self.sigma_nodes[i], self.sigma_nodes[i + 1]);
        let (y0, y1) = (self.s_nodes[i], self.s_nodes[i + 1]);
        let (d0, d1) = (1.0 / self.speed_nodes[i], 1.0 / self.speed_nodes[i + 1]);
        let h = x1 - x0;
        let u = (sigma - x0) / h;
        let h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
        let h10 = u * (1.0 - u) * (1.0 - u);
        let h01 = u * u * (3.0 - 2.0 * u);
        let h11 = u * u * (u - 1.0);
        h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
    }

    fn speed(&self, w: &WorldSheet, s: f64) -> Result<f64, SheetError> {
        let gs = w.partial_s(s, self.t)?;
        let q = inner(&gs, &gs);
        if q <= 0.0 {
            return Err(SheetError::NotSpacelike {
                s,
                t: self.t,
                norm_sq: q,
            });
        }
        Ok(q.sqrt())
    }

    pub fn sigma_of_s(&self, w: &WorldSheet, s: f64) -> Result<f64, SheetError> {
        let i = self.interval_of_s(s);
        let mut f = |x: f64| self.speed(w, x);
        Ok(self.sigma_nodes[i] + gauss8(&mut f, self.s_nodes[i], s)?)
    }

    pub fn s_of_sigma(&self, w: &WorldSheet, sigma: f64) -> Result<f64, SheetError> {
        let len = self.length();
        let slack = 1e-9 * (1.0 + len);
        if !(sigma >= -slack && sigma <= len + slack) {
            return Err(SheetError::OutOfRange { sigma, length: len });
        }
        let mut s = self.cubic(sigma);
        for _ in 0..8 {
            let i = self.interval_of_s(s);
            let mut f = |x: f64| self.speed(w, x);
            let g = self.sigma_nodes[i] + gauss8(&mut f, self.s_nodes[i], s)? - sigma;
            let step = g / self.speed(w, s)?;
            s -= step;
            if step.abs() <= 4.0 * f64::EPSILON * (1.0 + s.abs()) {
                break;
            }
        }
        Ok(s)
    }

    /// Taylor jet of `s(sigma)` about the point where `s = s0`, from the
    /// ODE `ds/dsigma = 1 / sqrt(<Gamma_s, Gamma_s>)` by Picard iteration on jets.
    pub fn s_jet(&self, w: &WorldSheet, s0: f64) -> Result<Jet, SheetError> {
        let (gamma, _) = w.s_jets(s0, self.t)?;
        let gs = gamma.map(|j| j.derivative());
        let q = inner_generic(&gs, &gs);
        if q.c[0] <= 0.0 {
            return Err(SheetError::NotSpacelike {
                s: s0,
                t: self.t,
                norm_sq: q.c[0],
            });
        }
        let g = <Jet as Scalar>::constant(1.0) / q.sqrt();
        let mut sj = Jet::from_coeffs([s0, 0.0, 0.0, 0.0, 0.0]);
        for _ in 0..JET_ORDER {
            sj = g.compose(&sj).integral(s0);
        }
        Ok(sj)
    }
}

/// Jets in the arc-length parameter of `Gamma` and of `Gamma_t` (taken at
/// fixed original parameter; only its component normal to the tangent is
/// used downstream, which is parametrization independent).
#[derive(Clone, Copy, Debug)]
pub struct CurveJets {
    pub gamma: [Jet; 4],
    pub gamma_t: [Jet; 4],
}

/// A momentary curve `t = const` parametrized by arc length.
#[derive(Clone, Debug)]
pub struct MomentaryCurve<'a> {
    sheet: &'a WorldSheet,
    t: f64,
    map: Option<ArcLengthMap>,
}

impl<'a> MomentaryCurve<'a> {
    /// Uses `s` itself as the arc-length parameter.
    pub fn assume_arc_length(sheet: &'a WorldSheet, t: f64) -> Self {
        MomentaryCurve { sheet, t, map: None }
    }

    pub fn with_map(sheet: &'a WorldSheet, map: ArcLengthMap) -> Self {
        MomentaryCurve {
            sheet,
            t: map.t(),
            map: Some(map),
        }
    }

    pub fn sheet(&self) -> &'a WorldSheet {
        self.sheet
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn map(&self) -> Option<&ArcLengthMap> {
        self.map.as_ref()
    }

    /// Range of the arc-length parameter.
    pub fn arc_range(&self) -> (f64, f64) {
        match &self.map {
            None => self.sheet.s_range,
            Some(m) => (0.0, m.length()),
        }
    }

    pub fn length(&self) -> f64 {
        let (a, b) = self.arc_range();
        b - a
    }

    /// Original parameter `s` at arc length `sigma`.
    pub fn param_of(&self, sigma: f64) -> Result<f64, SheetError> {
        match &self.map {
            None => Ok(sigma),
            Some(m) => m.s_of_sigma(self.sheet, sigma),
        }
    }

    /// Arc length at original parameter `s`.
    pub fn arc_of(&self, s: f64) -> Result<f64, SheetError> {
        match &self.map {
            None => Ok(s),
            Some(m) => m.sigma_of_s(self.sheet, s),
        }
    }

    pub fn point(&self, sigma: f64) -> Result<SemiVector, SheetError> {
        let s = self.param_of(sigma)?;
        Ok(self.sheet.point(s, self.t)?)
    }

    pub fn jets(&self, sigma: f64) -> Result<CurveJets, SheetError> {
        let s0 = self.param_of(sigma)?;
        let (gamma, gamma_t) = self.sheet.s_jets(s0, self.t)?;
        match &self.map {
            None => Ok(CurveJets { gamma, gamma_t }),
            Some(m) => {
                let sj = m.s_jet(self.sheet, s0)?;
                Ok(CurveJets {
                    gamma: gamma.map(|j| j.compose(&sj)),
                    gamma_t: gamma_t.map(|j| j.compose(&sj)),
                })
            }
        }
    }

    /// `d^k Gamma / dsigma^k`, `k = 0..=4`, from the symbolic derivative trees.
    pub fn symbolic_derivatives(&self, sigma: f64) -> Result<[SemiVector; JET_ORDER + 1], SheetError> {
        let s0 = self.param_of(sigma)?;
        let d = self.sheet.symbolic_s_derivatives(s0, self.t)?;
        match &self.map {
            None => Ok(d),
            Some(m) => {
                let sj = m.s_jet(self.sheet, s0)?;
                let comps: [Jet; 4] = std::array::from_fn(|i| {
                    let ds: Vec<f64> = d.iter().map(|v| v.0[i]).collect();
                    Jet::from_derivatives(&ds).compose(&sj)
                });
                Ok(std::array::from_fn(|k| SemiVector(comps.map(|j| j.derivative_at(k)))))
            }
        }
    }

    /// `n` arc-length sample positions; closed curves omit the repeated end.
    pub fn arc_samples(&self, n: usize) -> Vec<f64> {
        let (a, b) = self.arc_range();
        if self.is_closed() {
            let n = n.max(1);
            (0..n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
        } else {
            linspace(a, b, n.max(2))
        }
    }

    /// True when the curve closes up with matching tangent direction.
    pub fn is_closed(&self) -> bool {
        let (a, b) = self.sheet.s_range;
        let t = self.t;
        match (
            self.sheet.point(a, t),
            self.sheet.point(b, t),
            self.sheet.partial_s(a, t),
            self.sheet.partial_s(b, t),
        ) {
            (Ok(pa), Ok(pb), Ok(va), Ok(vb)) => pa.euclid_dist(&pb) <= 1e-9 && va.euclid_dist(&vb) <= 1e-9,
            _ => false,
        }
    }
}

/// How a sheet's momentary curves obtain their arc-length parametrization.
pub trait ArcLengthStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn mode(&self) -> ArcLengthMode;
    /// Whether validation includes the `|<Gamma_s,Gamma_s> - 1|` check.
    fn checks_arc_length(&self) -> bool;
    fn momentary_curve<'a>(
        &self,
        sheet: &'a WorldSheet,
        t: f64,
        tol: &Tolerances,
    ) -> Result<MomentaryCurve<'a>, SheetError>;
}

/// Trusts that `s` is arc length; the validation check reports violations.
pub struct AssumeArcLength;

/// Builds a numeric arc-length map per momentary curve.
pub struct Reparametrize;

/// Refuses to build a momentary curve whose parameter is not arc length.
pub struct RejectNonArcLength;

impl ArcLengthStrategy for AssumeArcLength {
    fn name(&self) -> &'static str {
        "assume"
    }
    fn mode(&self) -> ArcLengthMode {
        ArcLengthMode::Assume
    }
    fn checks_arc_length(&self) -> bool {
        true
    }
    fn momentary_curve<'a>(
        &self,
        sheet: &'a WorldSheet,
        t: f64,
        _tol: &Tolerances,
    ) -> Result<MomentaryCurve<'a>, SheetError> {
        Ok(MomentaryCurve::assume_arc_length(sheet, t))
    }
}

impl ArcLengthStrategy for Reparametrize {
    fn name(&self) -> &'static str {
        "reparametrize"
    }
    fn mode(&self) -> ArcLengthMode {
        ArcLengthMode::Reparametrize
    }
    fn checks_arc_length(&self) -> bool {
        false
    }
    fn momentary_curve<'a>(
        &self,
        sheet: &'a WorldSheet,
        t: f64,
        tol: &Tolerances,
    ) -> Result<MomentaryCurve<'a>, SheetError> {
        let map = ArcLengthMap::build(sheet, t, tol.arc_node_count())?;
        Ok(MomentaryCurve::with_map(sheet, map))
    }
}

impl ArcLengthStrategy for RejectNonArcLength {
    fn name(&self) -> &'static str {
        "reject"
    }
    fn mode(&self) -> ArcLengthMode {
        ArcLengthMode::Reject
    }
    fn checks_arc_length(&self) -> bool {
        true
    }
    fn momentary_curve<'a>(
        &self,
        sheet: &'a WorldSheet,
        t: f64,
        tol: &Tolerances,
    ) -> Result<MomentaryCurve<'a>, SheetError> {
        let (a, b) = sheet.s_range;
        for s in linspace(a, b, tol.arc_node_count()) {
            let gs = sheet.partial_s(s, t)?;
            let residual = (inner(&gs, &gs) - 1.0).abs();
            if !(residual <= tol.arc_tol) {
                return Err(SheetError::NotArcLength { s, t, residual });
            }
        }
        Ok(MomentaryCurve::assume_arc_length(sheet, t))
    }
}

static ASSUME: AssumeArcLength = AssumeArcLength;
static REPARAMETRIZE: Reparametrize = Reparametrize;
static REJECT: RejectNonArcLength = RejectNonArcLength;

/// All registered arc-length strategies.
pub fn arc_length_strategies() -> [&'static dyn ArcLengthStrategy; 3] {
    [&ASSUME, &REPARAMETRIZE, &REJECT]
}

pub fn arc_length_strategy(mode: ArcLengthMode) -> &'static dyn ArcLengthStrategy {
    match mode {
        ArcLengthMode::Assume => &ASSUME,
        ArcLengthMode::Reparametrize => &REPARAMETRIZE,
        ArcLengthMode::Reject => &REJECT,
    }
}

pub fn arc_length_strategy_by_name(name: &str) -> Option<&'static dyn ArcLengthStrategy> {
    arc_length_strategies().into_iter().find(|s| s.name() == name)
}
