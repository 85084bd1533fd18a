//! Semi-Euclidean linear algebra on R^4 with index 2.
//!
//! Components are ordered `(x_-1, x_0, x_1, x_2)`; the first two directions
//! are timelike. Anti-de Sitter 3-space is the quadric `<x,x> = -1`.

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jet::Scalar;

/// Default absolute threshold for classifying unit-scale vectors as null.
pub const DEFAULT_NULL_TOL: f64 = 1e-10;

/// Metric signature per component.
pub const SIGNATURE: [f64; 4] = [-1.0, -1.0, 1.0, 1.0];

const ZERO_THRESHOLD: f64 = f64::EPSILON;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("zero vector has no causal type")]
    ZeroVector,
    #[error("vector has non-finite component {0:?}")]
    NonFinite([f64; 4]),
    #[error("hyperplane normal must be nonzero")]
    ZeroNormal,
}

/// A point or vector of R^4_2.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SemiVector(pub [f64; 4]);

impl SemiVector {
    pub const ZERO: SemiVector = SemiVector([0.0; 4]);

    pub const fn new(xm1: f64, x0: f64, x1: f64, x2: f64) -> Self {
        SemiVector([xm1, x0, x1, x2])
    }

    /// Checked constructor enforcing finite components.
    pub fn try_new(c: [f64; 4]) -> Result<Self, MetricError> {
        if c.iter().all(|v| v.is_finite()) {
            Ok(SemiVector(c))
        } else {
            Err(MetricError::NonFinite(c))
        }
    }

    /// Canonical basis vector `e_i` for `i` in `-1..=2`.
    pub fn basis(i: i32) -> Self {
        assert!((-1..=2).contains(&i), "basis index {i} out of range");
        let mut c = [0.0; 4];
        c[(i + 1) as usize] = 1.0;
        SemiVector(c)
    }

    pub fn components(&self) -> [f64; 4] {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn inner(&self, other: &SemiVector) -> f64 {
        inner(self, other)
    }

    pub fn norm_sq(&self) -> f64 {
        inner(self, self)
    }

    /// `sqrt(|<x,x>|)`.
    pub fn pseudo_norm(&self) -> f64 {
        self.norm_sq().abs().sqrt()
    }

    /// Flat Euclidean norm of the component array.
    pub fn euclid_norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn euclid_dist(&self, other: &SemiVector) -> f64 {
        (*self - *other).euclid_norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

impl Index<usize> for SemiVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for SemiVector {
    type Output = SemiVector;
    fn add(self, o: SemiVector) -> SemiVector {
        SemiVector(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl AddAssign for SemiVector {
    fn add_assign(&mut self, o: SemiVector) {
        *self = *self + o;
    }
}

impl Sub for SemiVector {
    type Output = SemiVector;
    fn sub(self, o: SemiVector) -> SemiVector {
        SemiVector(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Neg for SemiVector {
    type Output = SemiVector;
    fn neg(self) -> SemiVector {
        SemiVector(self.0.map(|v| -v))
    }
}

impl Mul<SemiVector> for f64 {
    type Output = SemiVector;
    fn mul(self, v: SemiVector) -> SemiVector {
        SemiVector(v.0.map(|x| self * x))
    }
}

/// Causal character of a nonzero vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CausalType {
    Spacelike,
    Null,
    Timelike,
}

/// `HP(normal, offset) = { x : <x, normal> = offset }`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hyperplane {
    normal: SemiVector,
    offset: f64,
}

impl Hyperplane {
    pub fn new(normal: SemiVector, offset: f64) -> Result<Self, MetricError> {
        if normal.euclid_norm() <= ZERO_THRESHOLD {
            return Err(MetricError::ZeroNormal);
        }
        Ok(Hyperplane { normal, offset })
    }

    pub fn normal(&self) -> SemiVector {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Tangent hyperplane `HP(lambda, -1)` of AdS at `lambda`.
    pub fn ads_tangent(lambda: SemiVector) -> Result<Self, MetricError> {
        Hyperplane::new(lambda, -1.0)
    }

    pub fn contains(&self, x: &SemiVector, tol: f64) -> bool {
        hyperplane_contains(self, x, tol)
    }
}

/// Pseudo scalar product `-x_-1 y_-1 - x_0 y_0 + x_1 y_1 + x_2 y_2`.
pub fn inner(x: &SemiVector, y: &SemiVector) -> f64 {
    inner_generic(&x.0, &y.0)
}

pub fn inner_generic<T: Scalar>(x: &[T; 4], y: &[T; 4]) -> T {
    -(x[0] * y[0]) - x[1] * y[1] + x[2] * y[2] + x[3] * y[3]
}

pub fn causal_type(x: &SemiVector, null_tol: f64) -> Result<CausalType, MetricError> {
    if x.0.iter().all(|v| v.abs() <= ZERO_THRESHOLD) {
        return Err(MetricError::ZeroVector);
    }
    let q = x.norm_sq();
    Ok(if q < -null_tol {
        CausalType::Timelike
    } else if q.abs() <= null_tol {
        CausalType::Null
    } else {
        CausalType::Spacelike
    })
}

/// Pseudo-orthogonal wedge of three vectors: the formal determinant whose
/// first row is `(-e_-1, -e_0, e_1, e_2)`. Satisfies
/// `<x, wedge(a,b,c)> = det(x, a, b, c)`.
pub fn wedge(x1: &SemiVector, x2: &SemiVector, x3: &SemiVector) -> SemiVector {
    SemiVector(wedge_generic(&x1.0, &x2.0, &x3.0))
}

pub fn wedge_generic<T: Scalar>(a: &[T; 4], b: &[T; 4], c: &[T; 4]) -> [T; 4] {
    // 2x2 minors of rows (b, c).
    let m = |i: usize, j: usize| b[i] * c[j] - b[j] * c[i];
    let m01 = m(0, 1);
    let m02 = m(0, 2);
    let m03 = m(0, 3);
    let m12 = m(1, 2);
    let m13 = m(1, 3);
    let m23 = m(2, 3);
    // Cofactors of the first row, expanded along the row of `a`.
    let c0 = a[1] * m23 - a[2] * m13 + a[3] * m12;
    let c1 = -(a[0] * m23 - a[2] * m03 + a[3] * m02);
    let c2 = a[0] * m13 - a[1] * m03 + a[3] * m01;
    let c3 = -(a[0] * m12 - a[1] * m02 + a[2] * m01);
    [-c0, -c1, c2, c3]
}

pub fn on_ads(x: &SemiVector, tol: f64) -> bool {
    (x.norm_sq() + 1.0).abs() <= tol
}

pub fn on_nullcone(x: &SemiVector, vertex: &SemiVector, tol: f64) -> bool {
    let d = *x - *vertex;
    d.norm_sq().abs() <= tol
}

pub fn hyperplane_contains(h: &Hyperplane, x: &SemiVector, tol: f64) -> bool {
    (inner(x, &h.normal) - h.offset).abs() <= tol
}

/// Orientation determinant `det(a, b, e_1, e_2)`.
pub fn det_with_spatial_basis(a: &SemiVector, b: &SemiVector) -> f64 {
    a.0[0] * b.0[1] - a.0[1] * b.0[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: i32) -> SemiVector {
        SemiVector::basis(i)
    }

    #[test]
    fn inner_examples() {
        assert_eq!(inner(&e(-1), &e(-1)), -1.0);
        assert_eq!(
            inner(
                &SemiVector::new(1.0, 0.0, 2.0, 0.0),
                &SemiVector::new(3.0, 0.0, 1.0, 0.0)
            ),
            -1.0
        );
        let v = SemiVector::new(1.0, 0.0, 1.0, 0.0);
        assert_eq!(inner(&v, &v), 0.0);
    }

    #[test]
    fn causal_examples() {
        assert_eq!(causal_type(&e(1), DEFAULT_NULL_TOL), Ok(CausalType::Spacelike));
        assert_eq!(causal_type(&e(-1), DEFAULT_NULL_TOL), Ok(CausalType::Timelike));
        assert_eq!(
            causal_type(&SemiVector::new(1.0, 0.0, 1.0, 0.0), DEFAULT_NULL_TOL),
            Ok(CausalType::Null)
        );
        assert_eq!(
            causal_type(&SemiVector::ZERO, DEFAULT_NULL_TOL),
            Err(MetricError::ZeroVector)
        );
    }

    #[test]
    fn wedge_basis_examples() {
        assert_eq!(wedge(&e(0), &e(1), &e(2)), -e(-1));
        assert_eq!(wedge(&e(-1), &e(1), &e(2)), e(0));
    }

    #[test]
    fn wedge_degenerate_is_zero() {
        let a = SemiVector::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(wedge(&a, &a, &e(2)), SemiVector::ZERO);
    }

    #[test]
    fn ads_membership() {
        assert!(on_ads(&SemiVector::new(1.0, 0.0, 0.0, 0.0), 1e-12));
        assert!(!on_ads(&SemiVector::new(0.0, 0.0, 1.0, 0.0), 1e-12));
        assert!(on_ads(&SemiVector::new(2f64.sqrt(), 0.0, 1.0, 0.0), 1e-12));
    }

    #[test]
    fn nullcone_membership() {
        let v = SemiVector::new(0.3, -1.0, 2.0, 0.5);
        assert!(on_nullcone(&v, &v, 0.0));
        assert!(on_nullcone(
            &SemiVector::new(1.0, 0.0, 1.0, 0.0),
            &SemiVector::ZERO,
            1e-12
        ));
        assert!(!on_nullcone(&e(1), &SemiVector::ZERO, 1e-12));
    }

    #[test]
    fn hyperplane_examples() {
        let h = Hyperplane::new(e(1), 0.0).unwrap();
        assert!(h.contains(&e(-1), 1e-12));
        let lam = SemiVector::new(2f64.sqrt(), 0.0, 1.0, 0.0);
        assert!(Hyperplane::ads_tangent(lam).unwrap().contains(&lam, 1e-12));
        assert!(!Hyperplane::new(e(1), 1.0).unwrap().contains(&e(-1), 1e-12));
        assert_eq!(Hyperplane::new(SemiVector::ZERO, 1.0), Err(MetricError::ZeroNormal));
    }

    #[test]
    fn try_new_rejects_nan() {
        assert!(SemiVector::try_new([0.0, f64::NAN, 0.0, 0.0]).is_err());
        assert!(SemiVector::try_new([0.0, 1.0, 0.0, 0.0]).is_ok());
    }
}
