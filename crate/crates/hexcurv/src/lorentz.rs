//! Vector primitives of Minkowski space R^{2,1}.
//!
//! The quadratic form is `x*x = x1^2 + x2^2 - x3^2` with metric `J = diag(1, 1, -1)`.
//! Time-like unit vectors with `x3 > 0` are points of the hyperboloid model of
//! the hyperbolic plane; a space-like unit vector `z` stands for the geodesic
//! `z^perp`. Nothing here normalizes implicitly.

use crate::error::{Error, Result};
use crate::tol;
use std::ops::{Add, Mul, Neg, Sub};

/// A vector of R^{2,1}.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MinkowskiVec {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

/// Causal type of a vector, by the sign of `x*x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CausalClass {
    TimeLike,
    SpaceLike,
    LightLike,
}

impl CausalClass {
    /// Exponent `beta` of `tanh^beta h`: `+1` time-like, `-1` space-like, `None` light-like.
    pub fn beta(self) -> Option<i32> {
        match self {
            CausalClass::TimeLike => Some(1),
            CausalClass::SpaceLike => Some(-1),
            CausalClass::LightLike => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CausalClass::TimeLike => "time-like",
            CausalClass::SpaceLike => "space-like",
            CausalClass::LightLike => "light-like",
        }
    }
}

impl MinkowskiVec {
    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        MinkowskiVec { x1, x2, x3 }
    }

    /// Lorentz inner product `self * other`.
    #[inline]
    pub fn dot(self, other: Self) -> f64 {
        self.x1 * other.x1 + self.x2 * other.x2 - self.x3 * other.x3
    }

    /// Lorentz cross product `J (self x other)`.
    #[inline]
    pub fn cross(self, other: Self) -> Self {
        MinkowskiVec {
            x1: self.x2 * other.x3 - self.x3 * other.x2,
            x2: self.x3 * other.x1 - self.x1 * other.x3,
            x3: -(self.x1 * other.x2 - self.x2 * other.x1),
        }
    }

    /// `self * self`.
    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    /// Euclidean length, used only for scale-free comparisons.
    #[inline]
    pub fn euclid_norm(self) -> f64 {
        (self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }

    /// Rescale to unit Euclidean length.
    pub fn euclid_unit(self) -> Self {
        self * (1.0 / self.euclid_norm())
    }

    /// Rescale a time-like vector to `x*x = -1` with `x3 > 0`.
    pub fn normalize_time_like(self) -> Self {
        let s = 1.0 / (-self.norm_sq()).sqrt();
        if self.x3 < 0.0 {
            self * -s
        } else {
            self * s
        }
    }

    /// Rescale a space-like vector to `x*x = 1`.
    pub fn normalize_space_like(self) -> Self {
        self * (1.0 / self.norm_sq().sqrt())
    }
}

impl Add for MinkowskiVec {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        MinkowskiVec::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl Sub for MinkowskiVec {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        MinkowskiVec::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl Mul<f64> for MinkowskiVec {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        MinkowskiVec::new(self.x1 * s, self.x2 * s, self.x3 * s)
    }
}

impl Neg for MinkowskiVec {
    type Output = Self;
    fn neg(self) -> Self {
        MinkowskiVec::new(-self.x1, -self.x2, -self.x3)
    }
}

/// Lorentz inner product `a*b = a1 b1 + a2 b2 - a3 b3`.
pub fn minkowski_dot(a: MinkowskiVec, b: MinkowskiVec) -> f64 {
    a.dot(b)
}

/// Lorentz cross product `a (x) b = J (a x b)`, orthogonal to both inputs.
pub fn minkowski_cross(a: MinkowskiVec, b: MinkowskiVec) -> MinkowskiVec {
    a.cross(b)
}

/// Classify by the sign of `a*a`, with a light-like bucket of width [`tol::CAUSAL`].
pub fn causal_class(a: MinkowskiVec) -> CausalClass {
    let q = a.norm_sq();
    if q < -tol::CAUSAL {
        CausalClass::TimeLike
    } else if q > tol::CAUSAL {
        CausalClass::SpaceLike
    } else {
        CausalClass::LightLike
    }
}

/// Signed distance `s` from the point `y` to the geodesic `z^perp`, with `sinh s = -(y*z)`.
///
/// `s` is negative exactly when `y*z > 0`, i.e. when `y` lies on the same side as `z`.
pub fn dist_point_to_geodesic(y: MinkowskiVec, z: MinkowskiVec) -> Result<f64> {
    if !y.is_finite() || !z.is_finite() {
        return Err(Error::Precondition("non-finite input".into()));
    }
    if (y.norm_sq() + 1.0).abs() > tol::NORM || y.x3 <= 0.0 {
        return Err(Error::Precondition(
            "y must satisfy y*y = -1 with y3 > 0".into(),
        ));
    }
    if (z.norm_sq() - 1.0).abs() > tol::NORM {
        return Err(Error::Precondition("z must satisfy z*z = 1".into()));
    }
    Ok((-y.dot(z)).asinh())
}

/// A vector spanning `Span(p.0, p.1) ∩ Span(q.0, q.1)`, computed as `(p1 (x) p2) (x) (q1 (x) q2)`.
///
/// The result is not normalized.
pub fn plane_intersection(
    p: (MinkowskiVec, MinkowskiVec),
    q: (MinkowskiVec, MinkowskiVec),
) -> Result<MinkowskiVec> {
    let np = p.0.cross(p.1);
    let nq = q.0.cross(q.1);
    if np.euclid_norm() <= tol::RANK * p.0.euclid_norm() * p.1.euclid_norm() {
        return Err(Error::DegenerateSpan);
    }
    if nq.euclid_norm() <= tol::RANK * q.0.euclid_norm() * q.1.euclid_norm() {
        return Err(Error::DegenerateSpan);
    }
    let v = np.cross(nq);
    if v.euclid_norm() <= tol::RANK * np.euclid_norm() * nq.euclid_norm() {
        return Err(Error::CoincidentPlanes);
    }
    Ok(v)
}
