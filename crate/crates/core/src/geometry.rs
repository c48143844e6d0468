//! Rigid-transform algebra: vectors, unit-quaternion rotations and poses.
//!
//! Lengths are millimetres and angles radians throughout the crate.
//! Rotations are stored as unit quaternions with `w >= 0`; every constructor
//! and every composition renormalizes.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::Real;

/// 3-vector, serialized as a `[x, y, z]` array.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Serialize> Serialize for Vec3<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [&self.x, &self.y, &self.z].serialize(s)
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Vec3<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        <[T; 3]>::deserialize(d).map(Self::from)
    }
}

impl<T> From<[T; 3]> for Vec3<T> {
    fn from([x, y, z]: [T; 3]) -> Self {
        Self { x, y, z }
    }
}

impl<T> From<Vec3<T>> for [T; 3] {
    fn from(v: Vec3<T>) -> Self {
        [v.x, v.y, v.z]
    }
}

impl<T: Real> Vec3<T> {
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn from_f64(x: f64, y: f64, z: f64) -> Self {
        Self::new(T::lit(x), T::lit(y), T::lit(z))
    }

    pub fn dot(&self, o: &Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(&self, o: &Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_squared(&self) -> T {
        self.dot(self)
    }

    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    /// Unit vector in the same direction, or `None` for a (near) zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n > T::epsilon() {
            Some(*self / n)
        } else {
            None
        }
    }

    /// Componentwise product.
    pub fn scale_by(&self, s: &Self) -> Self {
        Self::new(self.x * s.x, self.y * s.y, self.z * s.z)
    }

    /// Largest absolute componentwise difference.
    pub fn max_abs_diff(&self, o: &Self) -> T {
        (self.x - o.x)
            .abs()
            .max((self.y - o.y).abs())
            .max((self.z - o.z).abs())
    }

    pub fn distance(&self, o: &Self) -> T {
        (*self - *o).norm()
    }

    pub fn cast<U: Real>(&self) -> Vec3<U> {
        Vec3::new(
            U::lit(self.x.to_f64_lossy()),
            U::lit(self.y.to_f64_lossy()),
            U::lit(self.z.to_f64_lossy()),
        )
    }

    pub fn to_array(self) -> [T; 3] {
        self.into()
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> AddAssign for Vec3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl<T: Real> Div<T> for Vec3<T> {
    type Output = Self;
    fn div(self, s: T) -> Self {
        Self::new(self.x / s, self.y / s, self.z / s)
    }
}

/// A 3D rotation stored as a unit quaternion `(w, x, y, z)` with `w >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation<T> {
    w: T,
    x: T,
    y: T,
    z: T,
}

impl<T: Real> Rotation<T> {
    pub fn identity() -> Self {
        Self {
            w: T::one(),
            x: T::zero(),
            y: T::zero(),
            z: T::zero(),
        }
    }

    /// Builds a rotation from raw quaternion components, normalizing and
    /// forcing the `w >= 0` hemisphere. Returns `None` for a zero quaternion
    /// or non-finite input.
    pub fn from_quaternion(w: T, x: T, y: T, z: T) -> Option<Self> {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        if !n.is_finite() || n <= T::epsilon() {
            return None;
        }
        Some(Self::canonical(w / n, x / n, y / n, z / n))
    }

    fn canonical(w: T, x: T, y: T, z: T) -> Self {
        if w < T::zero() {
            Self {
                w: -w,
                x: -x,
                y: -y,
                z: -z,
            }
        } else {
            Self { w, x, y, z }
        }
    }

    fn renormalized(w: T, x: T, y: T, z: T) -> Self {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        Self::canonical(w / n, x / n, y / n, z / n)
    }

    /// Right-handed rotation of `angle` radians about `axis`. The axis is
    /// normalized; a zero axis yields the identity.
    pub fn from_axis_angle(axis: &Vec3<T>, angle: T) -> Self {
        let Some(a) = axis.normalized() else {
            return Self::identity();
        };
        let half = angle / (T::one() + T::one());
        let (s, c) = half.sin_cos();
        Self::renormalized(c, a.x * s, a.y * s, a.z * s)
    }

    pub fn rz(angle: T) -> Self {
        Self::from_axis_angle(&Vec3::new(T::zero(), T::zero(), T::one()), angle)
    }

    pub fn w(&self) -> T {
        self.w
    }

    pub fn components(&self) -> [T; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn norm(&self) -> T {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Hamilton product `self * other`: applies `other` first, then `self`.
    pub fn compose(&self, o: &Self) -> Self {
        let (a, b) = (self, o);
        Self::renormalized(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }

    pub fn inverse(&self) -> Self {
        Self {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    pub fn rotate(&self, v: &Vec3<T>) -> Vec3<T> {
        // v' = v + 2w (q x v) + 2 q x (q x v)
        let q = Vec3::new(self.x, self.y, self.z);
        let two = T::one() + T::one();
        let t = q.cross(v) * two;
        *v + t * self.w + q.cross(&t)
    }

    /// Row-major 3x3 rotation matrix.
    pub fn to_matrix(&self) -> [[T; 3]; 3] {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        let one = T::one();
        let two = one + one;
        [
            [
                one - two * (y * y + z * z),
                two * (x * y - w * z),
                two * (x * z + w * y),
            ],
            [
                two * (x * y + w * z),
                one - two * (x * x + z * z),
                two * (y * z - w * x),
            ],
            [
                two * (x * z - w * y),
                two * (y * z + w * x),
                one - two * (x * x + y * y),
            ],
        ]
    }

    /// Angle of the rotation in `[0, pi]`.
    pub fn angle(&self) -> T {
        let two = T::one() + T::one();
        two * self.w.min(T::one()).acos()
    }

    pub fn cast<U: Real>(&self) -> Rotation<U> {
        let c = |v: T| U::lit(v.to_f64_lossy());
        Rotation::renormalized(c(self.w), c(self.x), c(self.y), c(self.z))
    }
}

impl<T: Real> Default for Rotation<T> {
    fn default() -> Self {
        Self::identity()
    }
}

/// Rigid transform mapping points from a source frame into a target frame:
/// `p' = R p + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose<T> {
    pub rotation: Rotation<T>,
    pub translation: Vec3<T>,
}

impl<T: Real> Pose<T> {
    pub fn new(rotation: Rotation<T>, translation: Vec3<T>) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    pub fn identity() -> Self {
        Self::new(Rotation::identity(), Vec3::zero())
    }

    pub fn translation(x: T, y: T, z: T) -> Self {
        Self::new(Rotation::identity(), Vec3::new(x, y, z))
    }

    pub fn from_rotation(rotation: Rotation<T>) -> Self {
        Self::new(rotation, Vec3::zero())
    }

    /// `self ∘ other`: the result maps points from `other`'s source frame
    /// into `self`'s target frame.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            rotation: self.rotation.compose(&other.rotation),
            translation: self.rotation.rotate(&other.translation) + self.translation,
        }
    }

    pub fn inverse(&self) -> Self {
        let r = self.rotation.inverse();
        Self {
            rotation: r,
            translation: -r.rotate(&self.translation),
        }
    }

    pub fn transform_point(&self, q: &Vec3<T>) -> Vec3<T> {
        self.rotation.rotate(q) + self.translation
    }

    pub fn transform_vector(&self, v: &Vec3<T>) -> Vec3<T> {
        self.rotation.rotate(v)
    }

    /// Largest componentwise difference over quaternion and translation.
    pub fn max_abs_diff(&self, o: &Self) -> T {
        let a = self.rotation.components();
        let b = o.rotation.components();
        a.iter().zip(b.iter()).fold(
            self.translation.max_abs_diff(&o.translation),
            |m, (p, q)| m.max((*p - *q).abs()),
        )
    }

    pub fn cast<U: Real>(&self) -> Pose<U> {
        Pose::new(self.rotation.cast(), self.translation.cast())
    }
}

impl<T: Real> Default for Pose<T> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<T: Real> Mul for Pose<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.compose(&rhs)
    }
}

pub fn compose<T: Real>(a: &Pose<T>, b: &Pose<T>) -> Pose<T> {
    a.compose(b)
}

pub fn invert<T: Real>(p: &Pose<T>) -> Pose<T> {
    p.inverse()
}

pub fn transform_point<T: Real>(p: &Pose<T>, q: &Vec3<T>) -> Vec3<T> {
    p.transform_point(q)
}
