//! Momentary lightlike fronts `LS+-`, nullcone Gauss images, nullcone
//! principal curvatures and focal curves `LF+-`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::frames::{frame_jet, frames_along, vj_add, vj_scale, vj_value, FrameData, FrameError, FrameJet, VJet};
use crate::jet::{Jet, Scalar};
use crate::pseudo_metric::SemiVector;
use crate::singularities::sigma_jet;
use crate::tolerances::Tolerances;
use crate::worldsheet::MomentaryCurve;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrontError {
    #[error("parabolic point at s = {s}, t = {t}: kappa = {kappa}")]
    ParabolicPoint { s: f64, t: f64, kappa: f64 },
    #[error(transparent)]
    Frame(#[from] FrameError),
}

impl From<crate::worldsheet::SheetError> for FrontError {
    fn from(e: crate::worldsheet::SheetError) -> Self {
        FrontError::Frame(FrameError::Sheet(e))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SignChoice {
    Plus,
    Minus,
}

impl SignChoice {
    pub const BOTH: [SignChoice; 2] = [SignChoice::Plus, SignChoice::Minus];

    pub fn eps(self) -> f64 {
        match self {
            SignChoice::Plus => 1.0,
            SignChoice::Minus => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SignChoice::Plus => "plus",
            SignChoice::Minus => "minus",
        }
    }
}

impl fmt::Display for SignChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SignChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plus" | "+" => Ok(SignChoice::Plus),
            "minus" | "-" => Ok(SignChoice::Minus),
            other => Err(format!("unknown sign '{other}' (expected plus or minus)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrontSample {
    pub s: f64,
    pub t: f64,
    pub mu: f64,
    pub sign: SignChoice,
    pub point: SemiVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FocalSample {
    pub s: f64,
    pub t: f64,
    pub sign: SignChoice,
    pub point: SemiVector,
    pub kappa: f64,
    pub sigma: f64,
}

/// `b + n` or `b - n` from frame values.
pub fn null_direction(f: &FrameData, sign: SignChoice) -> SemiVector {
    f.bvec + sign.eps() * f.nvec
}

pub fn null_direction_jet(fj: &FrameJet, sign: SignChoice) -> VJet {
    vj_add(&fj.bvec, &fj.nvec.map(|j| j.scale(sign.eps())))
}

/// `kappa_g + kappa_n` or `kappa_g - kappa_n` as a jet.
pub fn kappa_jet(fj: &FrameJet, sign: SignChoice) -> Jet {
    fj.kappa_g + fj.kappa_n.scale(sign.eps())
}

pub fn front_point_from(f: &FrameData, mu: f64, sign: SignChoice) -> FrontSample {
    FrontSample {
        s: f.s,
        t: f.t,
        mu,
        sign,
        point: f.gamma + mu * null_direction(f, sign),
    }
}

pub fn front_point(
    curve: &MomentaryCurve<'_>,
    s: f64,
    mu: f64,
    sign: SignChoice,
    tol: &Tolerances,
) -> Result<FrontSample, FrontError> {
    let f = frame_jet(curve, s, tol)?.data();
    Ok(front_point_from(&f, mu, sign))
}

/// Front point together with the foliation parameter as a fifth coordinate.
pub fn unfolded_front_point(
    curve: &MomentaryCurve<'_>,
    s: f64,
    mu: f64,
    sign: SignChoice,
    tol: &Tolerances,
) -> Result<(FrontSample, f64), FrontError> {
    let p = front_point(curve, s, mu, sign, tol)?;
    Ok((p, curve.t()))
}

pub fn nullcone_gauss(
    curve: &MomentaryCurve<'_>,
    s: f64,
    sign: SignChoice,
    tol: &Tolerances,
) -> Result<SemiVector, FrontError> {
    Ok(null_direction(&frame_jet(curve, s, tol)?.data(), sign))
}

pub fn principal_curvature(
    curve: &MomentaryCurve<'_>,
    s: f64,
    sign: SignChoice,
    tol: &Tolerances,
) -> Result<f64, FrontError> {
    let f = frame_jet(curve, s, tol)?.data();
    Ok(f.kappa_g + sign.eps() * f.kappa_n)
}

/// Focal curve `l = Gamma + (b +- n) / kappa` as a jet (valid to order 2).
pub fn focal_jet(fj: &FrameJet, sign: SignChoice, tol: &Tolerances) -> Result<VJet, FrontError> {
    let kappa = kappa_jet(fj, sign);
    if !(kappa.c[0].abs() > tol.kappa_floor) {
        return Err(FrontError::ParabolicPoint {
            s: fj.sigma,
            t: fj.t,
            kappa: kappa.c[0],
        });
    }
    let dir = null_direction_jet(fj, sign);
    Ok(vj_add(
        &fj.gamma,
        &vj_scale(&dir, <Jet as Scalar>::constant(1.0) / kappa),
    ))
}

pub fn focal_from_jet(fj: &FrameJet, sign: SignChoice, tol: &Tolerances) -> Result<FocalSample, FrontError> {
    let l = focal_jet(fj, sign, tol)?;
    Ok(FocalSample {
        s: fj.sigma,
        t: fj.t,
        sign,
        point: vj_value(&l),
        kappa: kappa_jet(fj, sign).c[0],
        sigma: sigma_jet(fj, sign).c[0],
    })
}

pub fn focal_point(
    curve: &MomentaryCurve<'_>,
    s: f64,
    sign: SignChoice,
    tol: &Tolerances,
) -> Result<FocalSample, FrontError> {
    focal_from_jet(&frame_jet(curve, s, tol)?, sign, tol)
}

/// Closed form of the focal-curve tangent `dl/ds`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FocalTangentForm {
    /// `sigma / kappa^2 (b +- n)`, from the Frenet-Serret formulae.
    Derived,
    /// `-sigma / kappa^2 (n +- b)`.
    Printed,
}

pub fn focal_tangent(
    f: &FrameData,
    sign: SignChoice,
    form: FocalTangentForm,
    tol: &Tolerances,
) -> Result<SemiVector, FrontError> {
    let e = sign.eps();
    let kappa = f.kappa_g + e * f.kappa_n;
    if !(kappa.abs() > tol.kappa_floor) {
        return Err(FrontError::ParabolicPoint { s: f.s, t: f.t, kappa });
    }
    let k = crate::singularities::sigma_from(f, sign) / (kappa * kappa);
    Ok(match form {
        FocalTangentForm::Derived => k * (f.bvec + e * f.nvec),
        FocalTangentForm::Printed => -k * (f.nvec + e * f.bvec),
    })
}

/// Parameter interval on which the focal point is undefined.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FocalGap {
    pub t: f64,
    pub sign: SignChoice,
    pub s_start: f64,
    pub s_end: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FocalCurve {
    pub samples: Vec<FocalSample>,
    pub gaps: Vec<FocalGap>,
}

/// Samples `n_samples` parameters evenly across the curve (both ends
/// included), skipping parabolic points and recording them as gaps.
pub fn focal_curve(
    curve: &MomentaryCurve<'_>,
    sign: SignChoice,
    n_samples: usize,
    tol: &Tolerances,
) -> Result<FocalCurve, FrameError> {
    let ss = curve.arc_samples(n_samples);
    let results: Vec<Result<FocalSample, FrontError>> = frames_along(curve, &ss, tol)?
        .iter()
        .map(|fj| focal_from_jet(fj, sign, tol))
        .collect();
    let mut out = FocalCurve::default();
    let mut open_gap: Option<(f64, f64)> = None;
    for (s, r) in ss.iter().zip(results) {
        match r {
            Ok(sample) => {
                if let Some((start, end)) = open_gap.take() {
                    out.gaps.push(FocalGap {
                        t: curve.t(),
                        sign,
                        s_start: start,
                        s_end: end,
                    });
                }
                out.samples.push(sample);
            }
            Err(FrontError::ParabolicPoint { .. }) => {
                open_gap = Some(match open_gap {
                    Some((start, _)) => (start, *s),
                    None => (*s, *s),
                });
            }
            Err(FrontError::Frame(e)) => return Err(e),
        }
    }
    if let Some((start, end)) = open_gap {
        out.gaps.push(FocalGap {
            t: curve.t(),
            sign,
            s_start: start,
            s_end: end,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::pseudo_metric::{inner, on_ads};
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    #[test]
    fn hopf_front_point_and_gauss_image() {
        let w = fixtures::hopf_torus();
        let tol = Tolerances::default();
        let c = w.curve(0.0, &tol).unwrap();
        let p = front_point(&c, 0.0, 1.0, SignChoice::Plus, &tol).unwrap();
        let want = SemiVector::new(SQRT_2 - 1.0, 1.0, 1.0 - SQRT_2, 0.0);
        assert!(p.point.euclid_dist(&want) < 1e-14);
        let g = nullcone_gauss(&c, 0.0, SignChoice::Plus, &tol).unwrap();
        assert!(g.euclid_dist(&SemiVector::new(-1.0, 1.0, -SQRT_2, 0.0)) < 1e-14);
        assert!(g.norm_sq().abs() < 1e-14);
        let (u, t) = unfolded_front_point(&c, 0.0, 1.0, SignChoice::Plus, &tol).unwrap();
        assert_eq!((u, t), (p, 0.0));
    }

    #[test]
    fn hopf_focal_points() {
        let w = fixtures::hopf_torus();
        let tol = Tolerances::default();
        let c = w.curve(0.0, &tol).unwrap();
        assert!((principal_curvature(&c, 0.0, SignChoice::Minus, &tol).unwrap() + SQRT_2).abs() < 1e-14);
        assert!((principal_curvature(&c, 0.0, SignChoice::Plus, &tol).unwrap() - SQRT_2).abs() < 1e-14);
        let f = focal_point(&c, 0.0, SignChoice::Minus, &tol).unwrap();
        assert!(
            f.point
                .euclid_dist(&SemiVector::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0, 0.0))
                < 1e-14
        );
        let f = focal_point(&c, 0.0, SignChoice::Plus, &tol).unwrap();
        assert!(
            f.point
                .euclid_dist(&SemiVector::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 0.0))
                < 1e-14
        );
        let fc = focal_curve(&c, SignChoice::Minus, 50, &tol).unwrap();
        assert!(fc.gaps.is_empty());
        for s in &fc.samples {
            assert!(s.point.euclid_dist(&fc.samples[0].point) <= 1e-8);
            assert!(on_ads(&s.point, 1e-12));
        }
    }

    #[test]
    fn front_points_stay_on_ads_with_null_rays() {
        let w = fixtures::perturbed_torus();
        let tol = Tolerances::default();
        let c = w.curve(0.4, &tol).unwrap();
        for k in 0..20 {
            let s = c.length() * k as f64 / 20.0;
            for sign in SignChoice::BOTH {
                let p = front_point(&c, s, -2.0 + 0.2 * k as f64, sign, &tol).unwrap();
                assert!(on_ads(&p.point, 1e-10));
                let d = p.point - c.point(s).unwrap();
                assert!(inner(&d, &d).abs() <= 1e-9 * (1.0 + d.euclid_norm().powi(2)));
            }
        }
    }

    #[test]
    fn parabolic_samples_become_gaps() {
        let w = fixtures::perturbed_torus();
        let tol = Tolerances::default();
        let c = w.curve(0.0, &tol).unwrap();
        let kappas: Vec<f64> = (0..64)
            .map(|k| {
                principal_curvature(&c, c.length() * k as f64 / 63.0, SignChoice::Plus, &tol)
                    .unwrap()
                    .abs()
            })
            .collect();
        let lo = kappas.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = kappas.iter().cloned().fold(0.0, f64::max);
        assert!(hi > lo);
        let mut floor = tol.clone();
        floor.kappa_floor = 0.5 * (lo + hi);
        let fc = focal_curve(&c, SignChoice::Plus, 64, &floor).unwrap();
        assert!(!fc.gaps.is_empty());
        assert!(!fc.samples.is_empty());
        for g in &fc.gaps {
            assert!(g.s_start <= g.s_end);
            assert!(fc.samples.iter().all(|s| s.s < g.s_start || s.s > g.s_end));
        }
        floor.kappa_floor = 2.0 * hi + 1.0;
        let fc = focal_curve(&c, SignChoice::Plus, 10, &floor).unwrap();
        assert!(fc.samples.is_empty());
        assert_eq!(fc.gaps.len(), 1);
        let fj = frame_jet(&c, 1.0, &tol).unwrap();
        assert!(matches!(
            focal_from_jet(&fj, SignChoice::Plus, &floor),
            Err(FrontError::ParabolicPoint { .. })
        ));
    }

    #[test]
    fn sign_parsing() {
        assert_eq!("plus".parse::<SignChoice>().unwrap(), SignChoice::Plus);
        assert_eq!("minus".parse::<SignChoice>().unwrap(), SignChoice::Minus);
        assert!("both".parse::<SignChoice>().is_err());
    }
}
