//! The adapted pseudo-orthonormal frame `{Gamma, b, n, t}` along momentary
//! curves and the curvature triple `(kappa_g, kappa_n, tau_g)`.
//!
//! Conventions: `t = Gamma_s`, `n = (Gamma ^ t ^ Gamma_t) / |.|`, and
//! `b = Gamma ^ n ^ t`, negated when needed so that `det(Gamma, b, e_1, e_2) > 0`.
//! Then `kappa_g = <t_s, b>`, `kappa_n = <t_s, n>`, `tau_g = <b_s, n>`.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::jet::{Jet, Scalar};
use crate::pseudo_metric::{det_with_spatial_basis, inner, inner_generic, wedge_generic, SemiVector};
use crate::tolerances::Tolerances;
use crate::worldsheet::{CurveJets, MomentaryCurve, SheetError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("degenerate frame at s = {s}, t = {t}: |Gamma ^ t ^ Gamma_t| = {norm}")]
    DegenerateFrame { s: f64, t: f64, norm: f64 },
    #[error(transparent)]
    Sheet(#[from] SheetError),
}

impl From<crate::expr::ExprError> for FrameError {
    fn from(e: crate::expr::ExprError) -> Self {
        FrameError::Sheet(SheetError::Eval(e))
    }
}

pub type VJet = [Jet; 4];

pub(crate) fn vj_value(v: &VJet) -> SemiVector {
    SemiVector(v.map(|j| j.c[0]))
}

pub(crate) fn vj_deriv(v: &VJet) -> VJet {
    v.map(|j| j.derivative())
}

/// k-th derivative of a vector jet at the expansion point.
pub(crate) fn vj_nth(v: &VJet, k: usize) -> SemiVector {
    SemiVector(v.map(|j| j.derivative_at(k)))
}

pub(crate) fn vj_scale(v: &VJet, k: Jet) -> VJet {
    v.map(|j| j * k)
}

pub(crate) fn vj_add(a: &VJet, b: &VJet) -> VJet {
    std::array::from_fn(|i| a[i] + b[i])
}

/// Frame and curvatures as Taylor jets in the arc-length parameter.
///
/// Valid orders: `t`, `n`, `b` to 3; the curvatures to 2.
#[derive(Clone, Copy, Debug)]
pub struct FrameJet {
    pub sigma: f64,
    pub t: f64,
    pub gamma: VJet,
    pub tvec: VJet,
    pub nvec: VJet,
    pub bvec: VJet,
    pub kappa_g: Jet,
    pub kappa_n: Jet,
    pub tau_g: Jet,
}

impl FrameJet {
    /// Builds the frame from arc-length jets of `Gamma` and `Gamma_t`.
    pub fn from_curve_jets(cj: &CurveJets, sigma: f64, t: f64, tol: &Tolerances) -> Result<Self, FrameError> {
        let gamma = cj.gamma;
        let tvec = vj_deriv(&gamma);
        let w = wedge_generic(&gamma, &tvec, &cj.gamma_t);
        let q = inner_generic(&w, &w);
        let norm = q.c[0].abs().sqrt();
        if !(norm >= tol.frame_degenerate) {
            return Err(FrameError::DegenerateFrame { s: sigma, t, norm });
        }
        let q = if q.c[0] < 0.0 { -q } else { q };
        let nvec = vj_scale(&w, <Jet as Scalar>::constant(1.0) / q.sqrt());
        let mut bvec = wedge_generic(&gamma, &nvec, &tvec);
        if det_with_spatial_basis(&vj_value(&gamma), &vj_value(&bvec)) < 0.0 {
            bvec = bvec.map(|j| -j);
        }
        let ts = vj_deriv(&tvec);
        let bs = vj_deriv(&bvec);
        Ok(FrameJet {
            sigma,
            t,
            kappa_g: inner_generic(&ts, &bvec),
            kappa_n: inner_generic(&ts, &nvec),
            tau_g: inner_generic(&bs, &nvec),
            gamma,
            tvec,
            nvec,
            bvec,
        })
    }

    /// Reverses `n`, which reverses `kappa_n` and `tau_g`; `b` is unchanged.
    pub fn flip_normal(&mut self) {
        self.nvec = self.nvec.map(|j| -j);
        self.kappa_n = -self.kappa_n;
        self.tau_g = -self.tau_g;
    }

    pub fn data(&self) -> FrameData {
        FrameData {
            s: self.sigma,
            t: self.t,
            gamma: vj_value(&self.gamma),
            tvec: vj_value(&self.tvec),
            nvec: vj_value(&self.nvec),
            bvec: vj_value(&self.bvec),
            kappa_g: self.kappa_g.c[0],
            kappa_n: self.kappa_n.c[0],
            tau_g: self.tau_g.c[0],
            dkappa_g: self.kappa_g.derivative_at(1),
            dkappa_n: self.kappa_n.derivative_at(1),
            dtau_g: self.tau_g.derivative_at(1),
            d2kappa_g: self.kappa_g.derivative_at(2),
            d2kappa_n: self.kappa_n.derivative_at(2),
        }
    }
}

/// Frame and curvatures at one point, `s` being the arc-length parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrameData {
    pub s: f64,
    pub t: f64,
    pub gamma: SemiVector,
    pub tvec: SemiVector,
    pub nvec: SemiVector,
    pub bvec: SemiVector,
    pub kappa_g: f64,
    pub kappa_n: f64,
    pub tau_g: f64,
    pub dkappa_g: f64,
    pub dkappa_n: f64,
    pub dtau_g: f64,
    pub d2kappa_g: f64,
    pub d2kappa_n: f64,
}

impl FrameData {
    /// Largest deviation of the frame Gram matrix from `diag(-1,-1,1,1)`.
    pub fn gram_residual(&self) -> f64 {
        let f = [self.gamma, self.bvec, self.nvec, self.tvec];
        let target = [-1.0, -1.0, 1.0, 1.0];
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in i..4 {
                let want = if i == j { target[i] } else { 0.0 };
                worst = worst.max((inner(&f[i], &f[j]) - want).abs());
            }
        }
        worst
    }

    pub fn adaptedness(&self) -> f64 {
        det_with_spatial_basis(&self.gamma, &self.bvec)
    }
}

pub fn frame_jet(curve: &MomentaryCurve<'_>, sigma: f64, tol: &Tolerances) -> Result<FrameJet, FrameError> {
    let cj = curve.jets(sigma)?;
    FrameJet::from_curve_jets(&cj, sigma, curve.t(), tol)
}

/// Frame at arc-length parameter `sigma` on the momentary curve.
pub fn frame_at(curve: &MomentaryCurve<'_>, sigma: f64, tol: &Tolerances) -> Result<FrameData, FrameError> {
    Ok(frame_jet(curve, sigma, tol)?.data())
}

/// Frame jets at increasing parameters along one curve. The normal is kept
/// continuous: a sign reversal between neighbours is undone and logged.
pub fn frames_along(curve: &MomentaryCurve<'_>, sigmas: &[f64], tol: &Tolerances) -> Result<Vec<FrameJet>, FrameError> {
    let mut out: Vec<FrameJet> = sigmas
        .par_iter()
        .map(|&s| frame_jet(curve, s, tol))
        .collect::<Result<_, _>>()?;
    for i in 1..out.len() {
        let prev = vj_value(&out[i - 1].nvec);
        if inner(&prev, &vj_value(&out[i].nvec)) <= 0.0 {
            log::warn!(
                "normal reversed between s = {} and s = {} at t = {}; flipping",
                out[i - 1].sigma,
                out[i].sigma,
                curve.t()
            );
            out[i].flip_normal();
        }
    }
    Ok(out)
}

/// Euclidean norms of the four Frenet-Serret residuals
/// `[Gamma_s - t, b_s - (tau_g n - kappa_g t), n_s - (tau_g b - kappa_n t),
/// t_s - (Gamma - kappa_g b + kappa_n n)]`.
///
/// `Gamma_s` comes from the symbolic derivative trees; the other left sides
/// are derivatives of the frame jets.
pub fn frenet_residual(curve: &MomentaryCurve<'_>, sigma: f64, tol: &Tolerances) -> Result<[f64; 4], FrameError> {
    let fj = frame_jet(curve, sigma, tol)?;
    let d = fj.data();
    let sym = curve.symbolic_derivatives(sigma)?;
    let bs = vj_nth(&fj.bvec, 1);
    let ns = vj_nth(&fj.nvec, 1);
    let ts = vj_nth(&fj.tvec, 1);
    let r_gamma = sym[1] - d.tvec;
    let r_b = bs - (d.tau_g * d.nvec - d.kappa_g * d.tvec);
    let r_n = ns - (d.tau_g * d.bvec - d.kappa_n * d.tvec);
    let r_t = ts - (d.gamma - d.kappa_g * d.bvec + d.kappa_n * d.nvec);
    Ok([
        r_gamma.euclid_norm(),
        r_b.euclid_norm(),
        r_n.euclid_norm(),
        r_t.euclid_norm(),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use std::f64::consts::SQRT_2;

    fn close(a: SemiVector, b: SemiVector, tol: f64) -> bool {
        a.euclid_dist(&b) <= tol
    }

    #[test]
    fn hopf_frame_at_origin() {
        let w = fixtures::hopf_torus();
        let tol = Tolerances::default();
        let c = w.curve(0.0, &tol).unwrap();
        let f = frame_at(&c, 0.0, &tol).unwrap();
        assert!(close(f.gamma, SemiVector::new(SQRT_2, 0.0, 1.0, 0.0), 1e-15));
        assert!(close(f.tvec, SemiVector::new(0.0, 0.0, 0.0, 1.0), 1e-15));
        assert!(close(f.bvec, SemiVector::new(0.0, 1.0, 0.0, 0.0), 1e-15));
        assert!(close(f.nvec, SemiVector::new(-1.0, 0.0, -SQRT_2, 0.0), 1e-15));
        assert!(f.kappa_g.abs() < 1e-14);
        assert!((f.kappa_n - SQRT_2).abs() < 1e-14);
        assert!(f.tau_g.abs() < 1e-14);
        assert!(f.adaptedness() > 0.0);
    }

    #[test]
    fn hopf_frenet_residual_vanishes() {
        let w = fixtures::hopf_torus();
        let tol = Tolerances::default();
        for &t in &[-0.7, 0.0, 0.9] {
            let c = w.curve(t, &tol).unwrap();
            for k in 0..10 {
                let r = frenet_residual(&c, 0.6 * k as f64, &tol).unwrap();
                assert!(r.iter().all(|&x| x <= 1e-12), "{r:?}");
            }
        }
    }

    #[test]
    fn perturbed_frame_is_pseudo_orthonormal() {
        let w = fixtures::perturbed_torus();
        let tol = Tolerances::default();
        let c = w.curve(0.3, &tol).unwrap();
        let sigmas: Vec<f64> = (0..40).map(|k| c.length() * k as f64 / 40.0).collect();
        let frames = frames_along(&c, &sigmas, &tol).unwrap();
        for fj in &frames {
            let d = fj.data();
            assert!(d.gram_residual() <= 1e-10, "{}", d.gram_residual());
            assert!(d.adaptedness() > 0.0);
        }
        for pair in frames.windows(2) {
            assert!(inner(&vj_value(&pair[0].nvec), &vj_value(&pair[1].nvec)) > 0.0);
        }
    }

    #[test]
    fn flip_normal_negates_kappa_n_and_tau_g() {
        let w = fixtures::perturbed_torus();
        let tol = Tolerances::default();
        let c = w.curve(0.0, &tol).unwrap();
        let mut fj = frame_jet(&c, 1.0, &tol).unwrap();
        let before = fj.data();
        fj.flip_normal();
        let after = fj.data();
        assert_eq!(after.kappa_n, -before.kappa_n);
        assert_eq!(after.tau_g, -before.tau_g);
        assert_eq!(after.nvec, -before.nvec);
        assert_eq!(after.bvec, before.bvec);
    }

    #[test]
    fn degenerate_plane_is_reported() {
        // Gamma_t parallel to Gamma_s: the tangent plane collapses.
        let w = crate::worldsheet::WorldSheet::new(
            ["sqrt(2)", "0", "cos(s + t)", "sin(s + t)"],
            (0.0, 6.0),
            (0.0, 1.0),
            crate::worldsheet::ArcLengthMode::Assume,
        )
        .unwrap();
        let tol = Tolerances::default();
        let c = w.curve(0.0, &tol).unwrap();
        assert!(matches!(
            frame_at(&c, 1.0, &tol),
            Err(FrameError::DegenerateFrame { .. })
        ));
    }
}
