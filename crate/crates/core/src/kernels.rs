//! Free-space kernels: the Newtonian potential, the Biot–Savart kernel and
//! its algebraically regularized (Rosenhead–Moore) blob version.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const INV_2PI: f64 = 0.5 / PI;

/// A point or vector in the plane. Serialized as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn from_polar(r: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Vec2::new(r * c, r * s)
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the planar cross product.
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Counterclockwise rotation by a right angle: `(-y, x)`.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    #[inline]
    pub fn rotate(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl SubAssign for Vec2 {
    #[inline]
    fn sub_assign(&mut self, o: Vec2) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl std::iter::Sum for Vec2 {
    fn sum<I: Iterator<Item = Vec2>>(iter: I) -> Vec2 {
        iter.fold(Vec2::ZERO, |a, b| a + b)
    }
}

/// `G(z) = -log|z| / 2π`.
pub fn newtonian_potential(z: Vec2) -> Result<f64> {
    let r2 = z.norm_sq();
    if r2 == 0.0 {
        return Err(Error::Singular(z));
    }
    Ok(-0.5 * INV_2PI * r2.ln())
}

/// `K(z) = z^⊥ / (2π |z|²)`, the rotated gradient `-∇^⊥G`.
pub fn biot_savart_kernel(z: Vec2) -> Result<Vec2> {
    let r2 = z.norm_sq();
    if r2 == 0.0 {
        return Err(Error::Singular(z));
    }
    Ok(z.perp() * (INV_2PI / r2))
}

/// Regularized kernel `z^⊥ / (2π (|z|² + δ²))`. Vanishes at `z = 0`, so a
/// particle induces no velocity on itself.
#[inline]
pub fn blob_kernel(z: Vec2, blob: f64) -> Vec2 {
    debug_assert!(blob > 0.0, "blob radius must be positive");
    z.perp() * (INV_2PI / (z.norm_sq() + blob * blob))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn potential_values() {
        assert_eq!(newtonian_potential(Vec2::new(1.0, 0.0)).unwrap(), 0.0);
        let v = newtonian_potential(Vec2::new((-2.0 * PI).exp(), 0.0)).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
        let a = newtonian_potential(Vec2::new(0.3, 0.4)).unwrap();
        let b = newtonian_potential(Vec2::new(0.5, 0.0)).unwrap();
        assert!((a - b).abs() < 1e-15);
        assert!(matches!(newtonian_potential(Vec2::ZERO), Err(Error::Singular(_))));
    }

    #[test]
    fn kernel_values() {
        let k = biot_savart_kernel(Vec2::new(1.0, 0.0)).unwrap();
        assert_eq!(k.x, 0.0);
        assert!((k.y - 1.0 / (2.0 * PI)).abs() < 1e-16);
        assert!(biot_savart_kernel(Vec2::ZERO).is_err());
        assert_eq!(blob_kernel(Vec2::ZERO, 0.1), Vec2::ZERO);
    }

    #[test]
    fn blob_error_bound_sweep() {
        // |K_δ(z) - K(z)| = δ²/(2π |z| (|z|²+δ²)) ≤ δ²/(2π|z|³).
        let mut state = 0x1234_5678_u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..2000 {
            let blob = 1e-3 + next() * 0.2;
            let r = blob * (1.0 + 20.0 * next());
            let z = Vec2::from_polar(r, 2.0 * PI * next());
            let diff = (blob_kernel(z, blob) - biot_savart_kernel(z).unwrap()).norm();
            assert!(diff <= blob * blob / (2.0 * PI * r.powi(3)) * (1.0 + 1e-12));
        }
    }

    proptest! {
        #[test]
        fn kernels_are_odd_and_orthogonal(x in -10.0f64..10.0, y in -10.0f64..10.0, blob in 1e-6f64..1.0) {
            let z = Vec2::new(x, y);
            prop_assume!(z.norm() > 1e-8);
            let k = biot_savart_kernel(z).unwrap();
            let km = biot_savart_kernel(-z).unwrap();
            prop_assert!(rel_close(k.x, -km.x, 1e-14) && rel_close(k.y, -km.y, 1e-14));
            prop_assert!(z.dot(k).abs() <= 1e-14 * z.norm() * k.norm());
            let kb = blob_kernel(z, blob);
            let kbm = blob_kernel(-z, blob);
            prop_assert!(rel_close(kb.x, -kbm.x, 1e-14) && rel_close(kb.y, -kbm.y, 1e-14));
            prop_assert!(z.dot(kb).abs() <= 1e-14 * z.norm() * kb.norm());
        }
    }
}
