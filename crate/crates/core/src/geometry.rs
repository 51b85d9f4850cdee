//! Plane and torus primitives.
//!
//! Positions live on the unit torus `R^2 / Z^2`. Straight flights are
//! computed in the lifted plane with [`Vec2`] and reduced back afterwards.

use std::f64::consts::TAU;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A vector in the lifted plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Counter-clockwise rotation by a quarter turn.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn rotate(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

fn reduce(c: f64) -> f64 {
    let r = c.rem_euclid(1.0);
    // rem_euclid of a tiny negative number rounds up to exactly 1.0
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// A point of the unit torus, coordinates always in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct TorusPoint {
    x: f64,
    y: f64,
}

impl TorusPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self {
            x: reduce(x),
            y: reduce(y),
        }
    }

    pub fn x(self) -> f64 {
        self.x
    }

    pub fn y(self) -> f64 {
        self.y
    }

    pub fn as_vec(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn from_vec(v: Vec2) -> Self {
        Self::new(v.x, v.y)
    }

    /// Shortest displacement from `self` to `other` over all torus copies.
    pub fn displacement_to(self, other: TorusPoint) -> Vec2 {
        let dx = other.x - self.x;
        let dy = other.y - self.y;
        Vec2::new(dx - dx.round(), dy - dy.round())
    }

    pub fn distance(self, other: TorusPoint) -> f64 {
        self.displacement_to(other).norm()
    }
}

impl From<[f64; 2]> for TorusPoint {
    fn from(a: [f64; 2]) -> Self {
        TorusPoint::new(a[0], a[1])
    }
}

impl From<TorusPoint> for [f64; 2] {
    fn from(p: TorusPoint) -> Self {
        [p.x, p.y]
    }
}

/// A direction on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector {
    ux: f64,
    uy: f64,
}

impl UnitVector {
    pub const UNIT_NORM_TOL: f64 = 1e-12;

    /// Normalizes `(ux, uy)`. Returns `None` for the zero vector.
    pub fn new(ux: f64, uy: f64) -> Option<Self> {
        let n = ux.hypot(uy);
        if n == 0.0 || !n.is_finite() {
            return None;
        }
        Some(Self {
            ux: ux / n,
            uy: uy / n,
        })
    }

    pub fn from_vec(v: Vec2) -> Option<Self> {
        Self::new(v.x, v.y)
    }

    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { ux: c, uy: s }
    }

    pub fn ux(self) -> f64 {
        self.ux
    }

    pub fn uy(self) -> f64 {
        self.uy
    }

    pub fn as_vec(self) -> Vec2 {
        Vec2::new(self.ux, self.uy)
    }

    /// Angle in `[0, 2*pi)`.
    pub fn angle(self) -> f64 {
        let a = self.uy.atan2(self.ux);
        if a < 0.0 {
            let w = a + TAU;
            if w >= TAU {
                0.0
            } else {
                w
            }
        } else {
            a
        }
    }

    pub fn dot(self, other: UnitVector) -> f64 {
        self.ux * other.ux + self.uy * other.uy
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> UnitVector {
        UnitVector {
            ux: -self.ux,
            uy: -self.uy,
        }
    }

    pub fn rotate(self, angle: f64) -> UnitVector {
        let v = self.as_vec().rotate(angle);
        UnitVector { ux: v.x, uy: v.y }
    }

    /// Signed angle in `(-pi, pi]` turning `self` onto `other`.
    pub fn signed_angle_to(self, other: UnitVector) -> f64 {
        self.as_vec().cross(other.as_vec()).atan2(self.dot(other))
    }
}
