//! Slow reference computations used to cross-check the main pipeline:
//! finite differences, dense critical-point scans of the height function,
//! all-pairs proximity search and an independent intersection refiner.
//!
//! Nothing here reuses the jet or Gauss-Newton machinery of the pipeline.

use nalgebra::{Matrix3, SymmetricEigen};
use serde::Serialize;
use thiserror::Error;

use crate::fronts::{focal_point, front_point, FrontError, SignChoice};
use crate::pseudo_metric::SemiVector;
use crate::tolerances::Tolerances;
use crate::worldsheet::{MomentaryCurve, SheetError, WorldSheet};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("finite-difference order must be 2 or 4, got {0}")]
    InvalidOrder(u8),
    #[error("finite-difference step {0} outside [1e-6, 1e-2]")]
    InvalidStep(f64),
    #[error("derivative order {0} not in 1..=4")]
    InvalidDerivative(usize),
    #[error("evaluation failed: {0}")]
    Evaluation(String),
    #[error(transparent)]
    Sheet(#[from] SheetError),
    #[error(transparent)]
    Front(#[from] FrontError),
}

/// Central finite-difference scheme.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FDScheme {
    order: u8,
    step: f64,
}

impl FDScheme {
    pub fn new(order: u8, step: f64) -> Result<Self, OracleError> {
        if order != 2 && order != 4 {
            return Err(OracleError::InvalidOrder(order));
        }
        if !(1e-6..=1e-2).contains(&step) {
            return Err(OracleError::InvalidStep(step));
        }
        Ok(FDScheme { order, step })
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Order-4 scheme with the customary step for a `k`-th derivative.
    pub fn default_for(k: usize) -> Self {
        let step = match k {
            0 | 1 => 1e-3,
            2 => 2e-3,
            3 => 5e-3,
            _ => 1e-2,
        };
        FDScheme { order: 4, step }
    }

    /// `(offsets, weights, divisor)`: the derivative is
    /// `sum w_i f(x + o_i h) / (divisor h^k)`.
    fn stencil(&self, k: usize) -> Result<(&'static [i32], &'static [f64], f64), OracleError> {
        Ok(match (self.order, k) {
            (2, 1) => (&[-1, 1], &[-1.0, 1.0], 2.0),
            (2, 2) => (&[-1, 0, 1], &[1.0, -2.0, 1.0], 1.0),
            (2, 3) => (&[-2, -1, 1, 2], &[-1.0, 2.0, -2.0, 1.0], 2.0),
            (2, 4) => (&[-2, -1, 0, 1, 2], &[1.0, -4.0, 6.0, -4.0, 1.0], 1.0),
            (4, 1) => (&[-2, -1, 1, 2], &[1.0, -8.0, 8.0, -1.0], 12.0),
            (4, 2) => (&[-2, -1, 0, 1, 2], &[-1.0, 16.0, -30.0, 16.0, -1.0], 12.0),
            (4, 3) => (&[-3, -2, -1, 1, 2, 3], &[1.0, -8.0, 13.0, -13.0, 8.0, -1.0], 8.0),
            (4, 4) => (
                &[-3, -2, -1, 0, 1, 2, 3],
                &[-1.0, 12.0, -39.0, 56.0, -39.0, 12.0, -1.0],
                6.0,
            ),
            (_, k) => return Err(OracleError::InvalidDerivative(k)),
        })
    }
}

impl Default for FDScheme {
    fn default() -> Self {
        FDScheme::default_for(1)
    }
}

/// `k`-th derivative of a scalar function at `x`.
pub fn fd_derivative<F, E>(f: F, x: f64, k: usize, scheme: FDScheme) -> Result<f64, OracleError>
where
    F: Fn(f64) -> Result<f64, E>,
    E: std::fmt::Display,
{
    let (offsets, weights, div) = scheme.stencil(k)?;
    let h = scheme.step;
    let mut acc = 0.0;
    for (&o, &w) in offsets.iter().zip(weights) {
        acc += w * f(x + o as f64 * h).map_err(|e| OracleError::Evaluation(e.to_string()))?;
    }
    Ok(acc / (div * h.powi(k as i32)))
}

/// `k`-th derivative of a vector-valued function at `x`.
pub fn fd_vector<F, E>(f: F, x: f64, k: usize, scheme: FDScheme) -> Result<SemiVector, OracleError>
where
    F: Fn(f64) -> Result<SemiVector, E>,
    E: std::fmt::Display,
{
    let (offsets, weights, div) = scheme.stencil(k)?;
    let h = scheme.step;
    let mut acc = [0.0; 4];
    for (&o, &w) in offsets.iter().zip(weights) {
        let v = f(x + o as f64 * h).map_err(|e| OracleError::Evaluation(e.to_string()))?;
        for (a, c) in acc.iter_mut().zip(v.0) {
            *a += w * c;
        }
    }
    let scale = div * h.powi(k as i32);
    Ok(SemiVector(acc.map(|a| a / scale)))
}

/// Determinant of a 4x4 matrix by cofactor expansion along the first row.
pub fn det4(m: &[[f64; 4]; 4]) -> f64 {
    let minor = |col: usize| {
        let mut r = [[0.0; 3]; 3];
        for (i, row) in m[1..].iter().enumerate() {
            let mut k = 0;
            for (j, &v) in row.iter().enumerate() {
                if j != col {
                    r[i][k] = v;
                    k += 1;
                }
            }
        }
        r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
    };
    (0..4)
        .map(|j| if j % 2 == 0 { 1.0 } else { -1.0 } * m[0][j] * minor(j))
        .sum()
}

/// Critical point of `s -> H(s) = <Gamma(s, t), lambda> + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalPoint {
    /// Arc length along the momentary curve.
    pub s: f64,
    pub h: f64,
}

/// Dense scan of sign changes of `dH/ds` along the momentary curve at `t`,
/// refined by bisection to an interval of `1e-10`. Derivatives come from
/// finite differences of point evaluations.
pub fn height_critical_scan(
    w: &WorldSheet,
    t: f64,
    lambda: &SemiVector,
    n: usize,
    tol: &Tolerances,
) -> Result<Vec<CriticalPoint>, OracleError> {
    let curve = w.curve(t, tol)?;
    let (a, b) = curve.arc_range();
    let closed = curve.is_closed();
    let h = |s: f64| -> Result<f64, SheetError> {
        let s = if closed { a + (s - a).rem_euclid(b - a) } else { s };
        Ok(curve.point(s)?.inner(lambda) + 1.0)
    };
    let hs = |s: f64| fd_derivative(h, s, 1, FDScheme::default_for(1));
    let n = n.max(2);
    let nodes: Vec<f64> = if closed {
        (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
    } else {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    };
    let values: Vec<f64> = nodes.iter().map(|&s| hs(s)).collect::<Result<_, _>>()?;
    let mut out: Vec<CriticalPoint> = Vec::new();
    for i in 0..nodes.len() - 1 {
        let (mut lo, mut hi) = (nodes[i], nodes[i + 1]);
        let (mut flo, fhi) = (values[i], values[i + 1]);
        if flo == 0.0 {
            out.push(CriticalPoint { s: lo, h: h(lo)? });
            continue;
        }
        if fhi == 0.0 || flo.signum() == fhi.signum() {
            continue;
        }
        while hi - lo > 1e-10 {
            let mid = 0.5 * (lo + hi);
            let fm = hs(mid)?;
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if fm.signum() == flo.signum() {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        let s = 0.5 * (lo + hi);
        out.push(CriticalPoint { s, h: h(s)? });
    }
    if !closed {
        let last = *nodes.last().unwrap_or(&b);
        if values.last() == Some(&0.0) {
            out.push(CriticalPoint { s: last, h: h(last)? });
        }
    }
    Ok(out)
}

/// Exhaustive search for pairs `(i, j)` with `|a_i - b_j| <= eps` (flat
/// Euclidean distance) that pass `distinct`. Pass the same cloud twice and
/// a `distinct` that requires `i < j` for a self-search.
pub fn allpairs_intersections<F>(a: &[SemiVector], b: &[SemiVector], eps: f64, distinct: F) -> Vec<(usize, usize, f64)>
where
    F: Fn(usize, usize) -> bool,
{
    let mut out = Vec::new();
    for (i, p) in a.iter().enumerate() {
        for (j, q) in b.iter().enumerate() {
            if !distinct(i, j) {
                continue;
            }
            let d = p.euclid_dist(q);
            if d <= eps {
                out.push((i, j, d));
            }
        }
    }
    out
}

/// Front sample of the oracle cloud.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CloudPoint {
    pub s_index: usize,
    pub s: f64,
    pub mu: f64,
    pub sign: SignChoice,
    pub point: SemiVector,
}

/// Front samples on a periodic (or end-inclusive, for open curves)
/// arc-length grid, evaluated through the frame route.
pub fn front_cloud(
    curve: &MomentaryCurve<'_>,
    n_s: usize,
    mus: &[f64],
    signs: &[SignChoice],
    tol: &Tolerances,
) -> Result<Vec<CloudPoint>, OracleError> {
    let (a, b) = curve.arc_range();
    let closed = curve.is_closed();
    let mut out = Vec::with_capacity(signs.len() * n_s * mus.len());
    for &sign in signs {
        for i in 0..n_s {
            let s = if closed {
                a + (b - a) * i as f64 / n_s as f64
            } else {
                a + (b - a) * i as f64 / (n_s - 1).max(1) as f64
            };
            for &mu in mus {
                let point = front_point(curve, s, mu, sign, tol)?.point;
                out.push(CloudPoint {
                    s_index: i,
                    s,
                    mu,
                    sign,
                    point,
                });
            }
        }
    }
    Ok(out)
}

/// Intersection found by [`refine_intersection`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleIntersection {
    pub s1: f64,
    pub mu1: f64,
    pub sign1: SignChoice,
    pub s2: f64,
    pub mu2: f64,
    pub sign2: SignChoice,
    pub point: SemiVector,
    pub residual: f64,
    /// Distinct preimages with a gap well above the positional uncertainty,
    /// or a focal concentration.
    pub certified: bool,
    pub focal: bool,
}

fn solve3(m: &Matrix3<f64>, r: &[f64; 3]) -> Option<[f64; 3]> {
    let det = m.determinant();
    if det.abs() < 1e-300 || !det.is_finite() {
        return None;
    }
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let mut mk = *m;
        for i in 0..3 {
            mk[(i, k)] = r[i];
        }
        *o = mk.determinant() / det;
    }
    Some(out)
}

/// Levenberg-Marquardt on `LS(s1, mu1) = LS(s2, mu2)` with `s1` held fixed
/// and a finite-difference Jacobian through [`front_point`].
pub fn refine_intersection(
    curve: &MomentaryCurve<'_>,
    start: (&CloudPoint, &CloudPoint),
    refine_tol: f64,
    tol: &Tolerances,
) -> Result<Option<OracleIntersection>, OracleError> {
    let (p, q) = start;
    let (sign1, sign2) = (p.sign, q.sign);
    let s1 = p.s;
    let (a, b) = curve.arc_range();
    let period = b - a;
    let closed = curve.is_closed();
    let wrap = |s: f64| {
        if closed {
            a + (s - a).rem_euclid(period)
        } else {
            s.clamp(a, b)
        }
    };
    let base1 = front_point(curve, s1, 0.0, sign1, tol)?.point;
    let dir1 = front_point(curve, s1, 1.0, sign1, tol)?.point - base1;
    let resid = |x: &[f64; 3]| -> Result<(SemiVector, SemiVector), OracleError> {
        let p1 = base1 + x[0] * dir1;
        let p2 = front_point(curve, wrap(x[1]), x[2], sign2, tol)?.point;
        Ok((p1 - p2, p1))
    };
    let jac = |x: &[f64; 3]| -> Result<[[f64; 3]; 4], OracleError> {
        let mut j = [[0.0; 3]; 4];
        for k in 0..3 {
            let hk = 1e-6 * (1.0 + x[k].abs());
            let mut xp = *x;
            let mut xm = *x;
            xp[k] += hk;
            xm[k] -= hk;
            let fp = resid(&xp)?.0;
            let fm = resid(&xm)?.0;
            for (i, row) in j.iter_mut().enumerate() {
                row[k] = (fp.0[i] - fm.0[i]) / (2.0 * hk);
            }
        }
        Ok(j)
    };
    let mut x = [p.mu, q.s, q.mu];
    let (mut f, mut pt) = resid(&x)?;
    let mut norm = f.euclid_norm();
    let mut lambda = 1e-3;
    for _ in 0..40 {
        if norm <= 1e-12 {
            break;
        }
        let j = jac(&x)?;
        let mut jtj = Matrix3::<f64>::zeros();
        let mut jtf = [0.0; 3];
        for r in 0..4 {
            for c in 0..3 {
                jtf[c] -= j[r][c] * f.0[r];
                for d in 0..3 {
                    jtj[(c, d)] += j[r][c] * j[r][d];
                }
            }
        }
        let mut improved = false;
        for _ in 0..20 {
            let mut m = jtj;
            for c in 0..3 {
                m[(c, c)] += lambda * (jtj[(c, c)] + 1e-12);
            }
            let Some(d) = solve3(&m, &jtf) else {
                lambda *= 10.0;
                continue;
            };
            let trial = [x[0] + d[0], x[1] + d[1], x[2] + d[2]];
            let (f2, p2) = resid(&trial)?;
            let n2 = f2.euclid_norm();
            if n2 < norm {
                x = trial;
                x[1] = wrap(x[1]);
                f = f2;
                pt = p2;
                norm = n2;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    if norm > refine_tol {
        return Ok(None);
    }
    let near = 10.0 * refine_tol;
    let mut focal = false;
    for (s, mu, sign) in [(s1, x[0], sign1), (x[1], x[2], sign2)] {
        if let Ok(fp) = focal_point(curve, s, sign, tol) {
            let here = front_point(curve, s, mu, sign, tol)?.point;
            focal |= here.euclid_dist(&fp.point) <= near;
        }
    }
    let certified = if focal || sign1 != sign2 {
        true
    } else {
        let d = (x[1] - s1).abs();
        let gap = if closed { d.min(period - d) } else { d };
        let j = jac(&x)?;
        let mut jtj = Matrix3::<f64>::zeros();
        for row in &j {
            for c in 0..3 {
                for d in 0..3 {
                    jtj[(c, d)] += row[c] * row[d];
                }
            }
        }
        let smallest = SymmetricEigen::new(jtj).eigenvalues.min().max(0.0).sqrt();
        gap > tol.preimage_sep && gap > 10.0 * norm.max(1e-14) / smallest
    };
    Ok(Some(OracleIntersection {
        s1,
        mu1: x[0],
        sign1,
        s2: x[1],
        mu2: x[2],
        sign2,
        point: pt,
        residual: norm,
        certified,
        focal,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn scheme_validation() {
        assert!(FDScheme::new(3, 1e-3).is_err());
        assert!(FDScheme::new(4, 1e-7).is_err());
        assert!(FDScheme::new(2, 0.1).is_err());
        assert!(FDScheme::new(4, 1e-2).is_ok());
    }

    #[test]
    fn simple_derivatives() {
        let sq = |x: f64| Ok::<_, String>(x * x);
        let d = fd_derivative(sq, 1.0, 1, FDScheme::new(4, 1e-3).unwrap()).unwrap();
        assert!((d - 2.0).abs() <= 1e-10);
        let sin = |x: f64| Ok::<_, String>(x.sin());
        let d3 = fd_derivative(sin, 0.0, 3, FDScheme::default_for(3)).unwrap();
        assert!((d3 + 1.0).abs() <= 1e-6);
        assert!(fd_derivative(sin, 0.0, 5, FDScheme::default()).is_err());
    }

    #[test]
    fn observed_convergence_order() {
        let f = |x: f64| Ok::<_, String>((1.3 * x).sin() * x.exp());
        let exact = |x: f64| 1.3 * (1.3 * x).cos() * x.exp() + (1.3 * x).sin() * x.exp();
        for order in [2u8, 4] {
            let e1 = (fd_derivative(f, 0.4, 1, FDScheme::new(order, 1e-2).unwrap()).unwrap() - exact(0.4)).abs();
            let e2 = (fd_derivative(f, 0.4, 1, FDScheme::new(order, 5e-3).unwrap()).unwrap() - exact(0.4)).abs();
            let observed = (e1 / e2).log2();
            assert!((observed - order as f64).abs() <= 0.3, "order {order}: {observed}");
        }
    }

    #[test]
    fn det4_matches_known_values() {
        let id = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        assert_eq!(det4(&id), 1.0);
        let m = [
            [2.0, 0.0, 1.0, 3.0],
            [1.0, 1.0, 0.0, 2.0],
            [0.0, 4.0, 1.0, 1.0],
            [3.0, 1.0, 2.0, 0.0],
        ];
        let n = nalgebra::Matrix4::from_fn(|i, j| m[i][j]);
        assert!((det4(&m) - n.determinant()).abs() <= 1e-12);
    }

    #[test]
    fn scan_finds_front_preimage() {
        let w = fixtures::hopf_torus();
        let tol = Tolerances::default();
        let curve = w.curve(0.0, &tol).unwrap();
        let lambda = front_point(&curve, 1.0, 0.5, SignChoice::Plus, &tol).unwrap().point;
        let crit = height_critical_scan(&w, 0.0, &lambda, 400, &tol).unwrap();
        let hit = crit
            .iter()
            .find(|c| (c.s - 1.0).abs() <= 1e-8)
            .expect("critical point at s = 1");
        assert!(hit.h.abs() <= 1e-8);
    }

    #[test]
    fn allpairs_trivial_cases() {
        let cloud: Vec<SemiVector> = (0..10).map(|i| SemiVector([i as f64, 0.0, 0.0, 0.0])).collect();
        assert!(allpairs_intersections(&cloud, &cloud, 1e-12, |i, j| i < j).is_empty());
        let shifted: Vec<SemiVector> = cloud.iter().map(|p| *p + SemiVector([0.0, 5.0, 0.0, 0.0])).collect();
        assert!(allpairs_intersections(&cloud, &shifted, 0.5, |_, _| true).is_empty());
        assert_eq!(allpairs_intersections(&cloud, &cloud, 0.5, |_, _| true).len(), 10);
    }
}
