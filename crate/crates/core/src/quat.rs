//! Quaternions, dual quaternions and Study parameters.
//!
//! A rigid transformation with rotation quaternion `p` and translation `t` is
//! the dual quaternion `p + ε·½·t·p`. Products compose transformations in the
//! same order as homogeneous matrices: `a * b` applies `b` first.
//!
//! The quaternion types are generic over a [`Ring`] so the same code carries
//! numeric values and joint-parametrized polynomial entries.

use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::scalar::{Ring, Scalar};

/// Default tolerance for membership checks (Study quadric, non-zero primal part).
pub const MEMBERSHIP_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuatError {
    #[error("dual quaternion is not invertible (primal norm² {primal_norm_sq:e}, Study residual {residual:e})")]
    NotInvertible { primal_norm_sq: f64, residual: f64 },
    #[error("rotation axis must have unit length, got norm {0}")]
    BadAxis(f64),
    #[error("matrix is not a rigid transformation (deviation {0:e})")]
    NotRigid(f64),
    #[error("all eight Study coordinates are zero")]
    ZeroPoint,
}

/// Quaternion `w + x·i + y·j + z·k`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion<R> {
    pub w: R,
    pub x: R,
    pub y: R,
    pub z: R,
}

impl<R: Ring> Quaternion<R> {
    pub fn new(w: R, x: R, y: R, z: R) -> Self {
        Self { w, x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(R::zero(), R::zero(), R::zero(), R::zero())
    }

    pub fn one() -> Self {
        Self::new(R::one(), R::zero(), R::zero(), R::zero())
    }

    pub fn from_array([w, x, y, z]: [R; 4]) -> Self {
        Self { w, x, y, z }
    }

    pub fn to_array(&self) -> [R; 4] {
        [self.w.clone(), self.x.clone(), self.y.clone(), self.z.clone()]
    }

    pub fn conjugate(&self) -> Self {
        Self::new(self.w.clone(), -self.x.clone(), -self.y.clone(), -self.z.clone())
    }

    pub fn scale(&self, s: &R) -> Self {
        Self::new(
            self.w.clone() * s.clone(),
            self.x.clone() * s.clone(),
            self.y.clone() * s.clone(),
            self.z.clone() * s.clone(),
        )
    }

    /// Hamilton product `p₀q₀ − p·q + (p₀q + q₀p + p×q)`.
    pub fn mul_ref(&self, q: &Self) -> Self {
        let p = self;
        let (p0, p1, p2, p3) = (&p.w, &p.x, &p.y, &p.z);
        let (q0, q1, q2, q3) = (&q.w, &q.x, &q.y, &q.z);
        let m = |a: &R, b: &R| a.clone() * b.clone();
        Self {
            w: m(p0, q0) - m(p1, q1) - m(p2, q2) - m(p3, q3),
            x: m(p0, q1) + m(q0, p1) + m(p2, q3) - m(p3, q2),
            y: m(p0, q2) + m(q0, p2) + m(p3, q1) - m(p1, q3),
            z: m(p0, q3) + m(q0, p3) + m(p1, q2) - m(p2, q1),
        }
    }
}

impl<R: Ring> Add for Quaternion<R> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<R: Ring> Sub for Quaternion<R> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<R: Ring> Neg for Quaternion<R> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl<R: Ring> Mul for Quaternion<R> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.mul_ref(&o)
    }
}

impl<T: Scalar> Quaternion<T> {
    pub fn norm_sq(&self) -> T {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn dot(&self, o: &Self) -> T {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn vector(&self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn pure(v: [T; 3]) -> Self {
        Self::new(T::zero(), v[0], v[1], v[2])
    }

    /// Unit quaternion `cos(θ/2) + sin(θ/2)·n`.
    pub fn from_axis_angle(axis: [T; 3], theta: T) -> Self {
        let half = theta / T::lit(2.0);
        let (s, c) = half.sin_cos();
        Self::new(c, s * axis[0], s * axis[1], s * axis[2])
    }

    /// Rotation matrix of `self / |self|`.
    pub fn rotation_matrix(&self) -> [[T; 3]; 3] {
        let n = self.norm_sq();
        let two = T::lit(2.0);
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        [
            [
                (w * w + x * x - y * y - z * z) / n,
                two * (x * y - w * z) / n,
                two * (x * z + w * y) / n,
            ],
            [
                two * (x * y + w * z) / n,
                (w * w - x * x + y * y - z * z) / n,
                two * (y * z - w * x) / n,
            ],
            [
                two * (x * z - w * y) / n,
                two * (y * z + w * x) / n,
                (w * w - x * x - y * y + z * z) / n,
            ],
        ]
    }
}

/// Dual quaternion `primal + ε·dual` with `ε² = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DualQuaternion<R> {
    pub primal: Quaternion<R>,
    pub dual: Quaternion<R>,
}

impl<R: Ring> DualQuaternion<R> {
    pub fn new(primal: Quaternion<R>, dual: Quaternion<R>) -> Self {
        Self { primal, dual }
    }

    pub fn zero() -> Self {
        Self::new(Quaternion::zero(), Quaternion::zero())
    }

    pub fn one() -> Self {
        Self::new(Quaternion::one(), Quaternion::zero())
    }

    /// Coordinates in the fixed order `(x₀,x₁,x₂,x₃,y₀,y₁,y₂,y₃)`.
    pub fn to_array(&self) -> [R; 8] {
        let [x0, x1, x2, x3] = self.primal.to_array();
        let [y0, y1, y2, y3] = self.dual.to_array();
        [x0, x1, x2, x3, y0, y1, y2, y3]
    }

    pub fn from_array(c: [R; 8]) -> Self {
        let [x0, x1, x2, x3, y0, y1, y2, y3] = c;
        Self::new(Quaternion::new(x0, x1, x2, x3), Quaternion::new(y0, y1, y2, y3))
    }

    /// Componentwise quaternion conjugation `p* + ε·q*`.
    pub fn conjugate(&self) -> Self {
        Self::new(self.primal.conjugate(), self.dual.conjugate())
    }

    pub fn scale(&self, s: &R) -> Self {
        Self::new(self.primal.scale(s), self.dual.scale(s))
    }

    /// `(p + εq)(s + εt) = ps + ε(pt + qs)`.
    pub fn mul_ref(&self, o: &Self) -> Self {
        Self::new(
            self.primal.mul_ref(&o.primal),
            self.primal.mul_ref(&o.dual) + self.dual.mul_ref(&o.primal),
        )
    }

    /// Product of a sequence of factors, left to right.
    pub fn product<'a, I>(factors: I) -> Self
    where
        I: IntoIterator<Item = &'a Self>,
        R: 'a,
    {
        factors.into_iter().fold(Self::one(), |acc, f| acc.mul_ref(f))
    }
}

impl<R: Ring> Add for DualQuaternion<R> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.primal + o.primal, self.dual + o.dual)
    }
}

impl<R: Ring> Sub for DualQuaternion<R> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.primal - o.primal, self.dual - o.dual)
    }
}

impl<R: Ring> Neg for DualQuaternion<R> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.primal, -self.dual)
    }
}

impl<R: Ring> Mul for DualQuaternion<R> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.mul_ref(&o)
    }
}

impl<T: Scalar> DualQuaternion<T> {
    /// Rigid transformation rotating by `theta` about the unit `axis` through the
    /// origin, followed by translation `t`.
    pub fn from_rotation_translation(axis: [T; 3], theta: T, t: [T; 3]) -> Result<Self, QuatError> {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if (n - T::one()).abs() > T::lit(MEMBERSHIP_TOL) {
            return Err(QuatError::BadAxis(n.as_f64()));
        }
        let p = Quaternion::from_axis_angle(axis, theta);
        Ok(Self::from_rotation_quaternion(p, t))
    }

    /// `p + ε·½·t·p` for an arbitrary (not necessarily unit) rotation quaternion.
    pub fn from_rotation_quaternion(p: Quaternion<T>, t: [T; 3]) -> Self {
        let half = T::lit(0.5);
        let dual = Quaternion::pure(t).mul_ref(&p).scale(&half);
        Self::new(p, dual)
    }

    pub fn translation(t: [T; 3]) -> Self {
        Self::from_rotation_quaternion(Quaternion::one(), t)
    }

    /// `p₀q₀ + p·q`, zero exactly on the Study quadric.
    pub fn study_form(&self) -> T {
        self.primal.dot(&self.dual)
    }

    /// Scale-invariant Study residual, see [`StudyPoint::study_residual`].
    pub fn study_residual(&self) -> T {
        let c = self.to_array();
        let m = c.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
        if m == T::zero() {
            return T::zero();
        }
        self.study_form().abs() / (m * m)
    }

    /// `|σ| = σσ*`, which is the real number `|p|²` on the Study quadric.
    pub fn norm(&self) -> T {
        self.primal.norm_sq()
    }

    /// Group inverse `σ*/|σ|` for elements of the rigid-motion subgroup.
    pub fn inverse(&self) -> Result<Self, QuatError> {
        self.inverse_with_tol(T::lit(MEMBERSHIP_TOL))
    }

    pub fn inverse_with_tol(&self, tol: T) -> Result<Self, QuatError> {
        let n = self.primal.norm_sq();
        let residual = self.study_residual();
        let m = self.to_array().iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
        if m == T::zero() || n <= tol * m * m || residual > tol {
            return Err(QuatError::NotInvertible {
                primal_norm_sq: n.as_f64(),
                residual: residual.as_f64(),
            });
        }
        let inv = T::one() / n;
        Ok(self.conjugate().scale(&inv))
    }

    /// Translation vector `2·q·p*/|p|²`.
    pub fn translation_vector(&self) -> [T; 3] {
        let n = self.primal.norm_sq();
        let t = self.dual.mul_ref(&self.primal.conjugate());
        let two = T::lit(2.0);
        [two * t.x / n, two * t.y / n, two * t.z / n]
    }

    /// Applies the rigid transformation to a point.
    pub fn transform_point(&self, v: [T; 3]) -> [T; 3] {
        let n = self.primal.norm_sq();
        let r = self
            .primal
            .mul_ref(&Quaternion::pure(v))
            .mul_ref(&self.primal.conjugate());
        let t = self.translation_vector();
        [r.x / n + t[0], r.y / n + t[1], r.z / n + t[2]]
    }

    /// Homogeneous 4×4 matrix of the transformation. The primal part must be non-zero.
    pub fn to_matrix(&self) -> [[T; 4]; 4] {
        let r = self.primal.rotation_matrix();
        let t = self.translation_vector();
        let mut m = [[T::zero(); 4]; 4];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = r[i][j];
            }
            m[i][3] = t[i];
        }
        m[3][3] = T::one();
        m
    }

    /// Unit dual quaternion of a homogeneous rigid transformation matrix.
    pub fn from_matrix(m: &[[T; 4]; 4]) -> Result<Self, QuatError> {
        Self::from_matrix_with_tol(m, T::lit(MEMBERSHIP_TOL))
    }

    pub fn from_matrix_with_tol(m: &[[T; 4]; 4], tol: T) -> Result<Self, QuatError> {
        let mut dev = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = T::zero();
                for k in 0..3 {
                    s += m[k][i] * m[k][j];
                }
                let target = if i == j { T::one() } else { T::zero() };
                dev = dev.max((s - target).abs());
            }
        }
        for (j, target) in [T::zero(), T::zero(), T::zero(), T::one()].iter().enumerate() {
            dev = dev.max((m[3][j] - *target).abs());
        }
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        dev = dev.max((det - T::one()).abs());
        if !(dev <= tol) {
            return Err(QuatError::NotRigid(dev.as_f64()));
        }
        // Shepperd: pick the largest diagonal combination for stability.
        let quarter = T::lit(0.25);
        let one = T::one();
        let tr = m[0][0] + m[1][1] + m[2][2];
        let candidates = [tr, m[0][0], m[1][1], m[2][2]];
        let mut best = 0;
        for k in 1..4 {
            if candidates[k] > candidates[best] {
                best = k;
            }
        }
        let p = match best {
            0 => {
                let s = (one + tr).sqrt() * T::lit(2.0);
                Quaternion::new(
                    quarter * s,
                    (m[2][1] - m[1][2]) / s,
                    (m[0][2] - m[2][0]) / s,
                    (m[1][0] - m[0][1]) / s,
                )
            }
            1 => {
                let s = (one + m[0][0] - m[1][1] - m[2][2]).sqrt() * T::lit(2.0);
                Quaternion::new(
                    (m[2][1] - m[1][2]) / s,
                    quarter * s,
                    (m[0][1] + m[1][0]) / s,
                    (m[0][2] + m[2][0]) / s,
                )
            }
            2 => {
                let s = (one + m[1][1] - m[0][0] - m[2][2]).sqrt() * T::lit(2.0);
                Quaternion::new(
                    (m[0][2] - m[2][0]) / s,
                    (m[0][1] + m[1][0]) / s,
                    quarter * s,
                    (m[1][2] + m[2][1]) / s,
                )
            }
            _ => {
                let s = (one + m[2][2] - m[0][0] - m[1][1]).sqrt() * T::lit(2.0);
                Quaternion::new(
                    (m[1][0] - m[0][1]) / s,
                    (m[0][2] + m[2][0]) / s,
                    (m[1][2] + m[2][1]) / s,
                    quarter * s,
                )
            }
        };
        let n = p.norm_sq().sqrt();
        let p = p.scale(&(one / n));
        Ok(Self::from_rotation_quaternion(p, [m[0][3], m[1][3], m[2][3]]))
    }

    pub fn max_abs(&self) -> T {
        self.to_array().iter().fold(T::zero(), |acc, v| acc.max(v.abs()))
    }
}

/// Homogeneous Study parameters `(x₀:x₁:x₂:x₃:y₀:y₁:y₂:y₃)` of a point of P⁷.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyPoint<T> {
    coords: [T; 8],
}

impl<T: Scalar> StudyPoint<T> {
    pub fn new(coords: [T; 8]) -> Result<Self, QuatError> {
        if coords.iter().all(|c| *c == T::zero()) {
            return Err(QuatError::ZeroPoint);
        }
        Ok(Self { coords })
    }

    pub fn from_dual_quaternion(dq: &DualQuaternion<T>) -> Result<Self, QuatError> {
        Self::new(dq.to_array())
    }

    pub fn to_dual_quaternion(&self) -> DualQuaternion<T> {
        DualQuaternion::from_array(self.coords)
    }

    pub fn coords(&self) -> &[T; 8] {
        &self.coords
    }

    pub fn primal(&self) -> [T; 4] {
        [self.coords[0], self.coords[1], self.coords[2], self.coords[3]]
    }

    pub fn dual(&self) -> [T; 4] {
        [self.coords[4], self.coords[5], self.coords[6], self.coords[7]]
    }

    pub fn max_abs(&self) -> T {
        self.coords.iter().fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    /// `|Σ xᵢyᵢ| / (max |coordinate|)²`, invariant under rescaling.
    pub fn study_residual(&self) -> T {
        let m = self.max_abs();
        let s = (0..4).fold(T::zero(), |acc, i| acc + self.coords[i] * self.coords[i + 4]);
        s.abs() / (m * m)
    }

    /// Whether the point lies in the image of SE(3) within `tol`.
    pub fn is_rigid(&self, tol: T) -> bool {
        let m = self.max_abs();
        let xs = (0..4).fold(T::zero(), |acc, i| acc + self.coords[i] * self.coords[i]);
        self.study_residual() <= tol && xs > tol * m * m
    }

    pub fn scaled(&self, s: T) -> Result<Self, QuatError> {
        let mut c = self.coords;
        c.iter_mut().for_each(|v| *v *= s);
        Self::new(c)
    }

    /// Representative whose largest-magnitude coordinate equals `+1`.
    pub fn canonical(&self) -> Self {
        let mut k = 0;
        for i in 1..8 {
            if self.coords[i].abs() > self.coords[k].abs() {
                k = i;
            }
        }
        let s = T::one() / self.coords[k];
        let mut c = self.coords;
        c.iter_mut().for_each(|v| *v *= s);
        c[k] = T::one();
        Self { coords: c }
    }

    /// Minimal-norm correction of the dual part onto the Study quadric:
    /// `y ← y − (x·y / x·x)·x`. Returns the corrected point and the size of the
    /// correction relative to the largest coordinate.
    pub fn project_to_quadric(&self) -> Result<(Self, T), QuatError> {
        let x = self.primal();
        let xx = x.iter().fold(T::zero(), |acc, v| acc + *v * *v);
        let m = self.max_abs();
        if xx <= T::lit(MEMBERSHIP_TOL) * m * m {
            return Err(QuatError::NotInvertible {
                primal_norm_sq: (xx / (m * m)).as_f64(),
                residual: self.study_residual().as_f64(),
            });
        }
        let xy = (0..4).fold(T::zero(), |acc, i| acc + x[i] * self.coords[i + 4]);
        let k = xy / xx;
        let mut c = self.coords;
        let mut corr = T::zero();
        for i in 0..4 {
            let d = k * x[i];
            c[i + 4] -= d;
            corr += d * d;
        }
        Ok((Self { coords: c }, corr.sqrt() / m))
    }

    /// Distance between two points of P⁷: Euclidean distance of the unit-norm
    /// representatives, with the sign chosen to minimise it.
    pub fn projective_distance(&self, other: &Self) -> T {
        let na = self.coords.iter().fold(T::zero(), |acc, v| acc + *v * *v).sqrt();
        let nb = other.coords.iter().fold(T::zero(), |acc, v| acc + *v * *v).sqrt();
        let (mut dp, mut dm) = (T::zero(), T::zero());
        for i in 0..8 {
            let a = self.coords[i] / na;
            let b = other.coords[i] / nb;
            dp += (a - b) * (a - b);
            dm += (a + b) * (a + b);
        }
        dp.min(dm).sqrt()
    }
}
