//! Denavit–Hartenberg chains, joint factors and forward kinematics.
//!
//! Link `i` contributes `σᵢ = R_z(vᵢ)·T_z(dᵢ)·T_x(aᵢ)·R_x(lᵢ)` with half-angle
//! tangents `vᵢ = tan(θᵢ/2)`, `lᵢ = tan(αᵢ/2)`. Rotations use the unnormalized
//! representative `1 + v·k`, so every factor is affine in its joint variable.

use std::fmt;

use thiserror::Error;

use crate::poly::Poly1;
use crate::quat::{DualQuaternion, QuatError, Quaternion, StudyPoint, MEMBERSHIP_TOL};
use crate::scalar::{deg_from_half_tan, half_tan_deg, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("row {row}: a {joint} joint needs exactly `{expected}` variable")]
    VariableMismatch { row: usize, joint: JointType, expected: &'static str },
    #[error("row {row}: {field} is an odd multiple of 180°, which the half-angle model excludes")]
    HalfTurn { row: usize, field: &'static str },
    #[error("{0}; move the offset into the base or end-effector frame")]
    NotNormalized(String),
    #[error("joint pattern {0} is not supported (expected RRPRRR, RRPPRR, RRRPRR or RRRRRR)")]
    UnsupportedPattern(String),
    #[error("row {row}: non-finite value in {field}")]
    NonFinite { row: usize, field: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JointType {
    Revolute,
    Prismatic,
}

impl JointType {
    pub fn letter(self) -> char {
        match self {
            JointType::Revolute => 'R',
            JointType::Prismatic => 'P',
        }
    }
}

impl fmt::Display for JointType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JointType::Revolute => "revolute",
            JointType::Prismatic => "prismatic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[allow(clippy::upper_case_acronyms)]
pub enum Pattern {
    RRPRRR,
    RRPPRR,
    RRRPRR,
    RRRRRR,
}

impl Pattern {
    pub fn from_types(t: [JointType; 6]) -> Result<Self, ChainError> {
        let s: String = t.iter().map(|j| j.letter()).collect();
        match s.as_str() {
            "RRPRRR" => Ok(Pattern::RRPRRR),
            "RRPPRR" => Ok(Pattern::RRPPRR),
            "RRRPRR" => Ok(Pattern::RRRPRR),
            "RRRRRR" => Ok(Pattern::RRRRRR),
            _ => Err(ChainError::UnsupportedPattern(s)),
        }
    }

    pub fn types(self) -> [JointType; 6] {
        use JointType::{Prismatic as P, Revolute as R};
        match self {
            Pattern::RRPRRR => [R, R, P, R, R, R],
            Pattern::RRPPRR => [R, R, P, P, R, R],
            Pattern::RRRPRR => [R, R, R, P, R, R],
            Pattern::RRRRRR => [R, R, R, R, R, R],
        }
    }

    pub fn all() -> [Pattern; 4] {
        [Pattern::RRPRRR, Pattern::RRPPRR, Pattern::RRRPRR, Pattern::RRRRRR]
    }

    /// Conventional manipulator name, e.g. `2RP3R`.
    pub fn manipulator_name(self) -> &'static str {
        match self {
            Pattern::RRPRRR => "2RP3R",
            Pattern::RRPPRR => "2R2P2R",
            Pattern::RRRPRR => "3RP2R",
            Pattern::RRRRRR => "6R",
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.types().iter().map(|j| j.letter()).collect();
        f.write_str(&s)
    }
}

/// One Denavit–Hartenberg row. Angles are kept in degrees exactly as given so
/// chain files round-trip; half-angle tangents are cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DhRow<T> {
    joint: JointType,
    theta_deg: Option<T>,
    d: Option<T>,
    a: T,
    alpha_deg: T,
    l: T,
    v: Option<T>,
}

fn is_half_turn<T: Scalar>(deg: T) -> bool {
    let r = (deg / T::lit(360.0)).fract().abs();
    (r - T::lit(0.5)).abs() < T::lit(1e-12)
}

impl<T: Scalar> DhRow<T> {
    /// `row` is the 1-based index used in error messages.
    pub fn new(
        row: usize,
        joint: JointType,
        theta_deg: Option<T>,
        d: Option<T>,
        a: T,
        alpha_deg: T,
    ) -> Result<Self, ChainError> {
        match (joint, theta_deg.is_some(), d.is_some()) {
            (JointType::Revolute, false, true) | (JointType::Prismatic, true, false) => {}
            (JointType::Revolute, _, _) => {
                return Err(ChainError::VariableMismatch { row, joint, expected: "theta" })
            }
            (JointType::Prismatic, _, _) => {
                return Err(ChainError::VariableMismatch { row, joint, expected: "d" })
            }
        }
        for (field, v) in [("theta", theta_deg), ("d", d), ("a", Some(a)), ("alpha", Some(alpha_deg))] {
            if v.is_some_and(|x| !x.is_finite()) {
                return Err(ChainError::NonFinite { row, field });
            }
        }
        if is_half_turn(alpha_deg) {
            return Err(ChainError::HalfTurn { row, field: "alpha" });
        }
        if theta_deg.is_some_and(is_half_turn) {
            return Err(ChainError::HalfTurn { row, field: "theta" });
        }
        Ok(Self {
            joint,
            theta_deg,
            d,
            a,
            alpha_deg,
            l: half_tan_deg(alpha_deg),
            v: theta_deg.map(half_tan_deg),
        })
    }

    pub fn revolute(d: T, a: T, alpha_deg: T) -> Result<Self, ChainError> {
        Self::new(0, JointType::Revolute, None, Some(d), a, alpha_deg)
    }

    pub fn prismatic(theta_deg: T, a: T, alpha_deg: T) -> Result<Self, ChainError> {
        Self::new(0, JointType::Prismatic, Some(theta_deg), None, a, alpha_deg)
    }

    pub fn joint(&self) -> JointType {
        self.joint
    }

    /// Fixed rotation angle in degrees, `None` for a revolute joint.
    pub fn theta_deg(&self) -> Option<T> {
        self.theta_deg
    }

    /// Fixed offset, `None` for a prismatic joint.
    pub fn d(&self) -> Option<T> {
        self.d
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn alpha_deg(&self) -> T {
        self.alpha_deg
    }

    pub fn alpha(&self) -> T {
        self.alpha_deg.to_radians()
    }

    /// `tan(α/2)`.
    pub fn l(&self) -> T {
        self.l
    }

    /// `tan(θ/2)` when θ is fixed.
    pub fn v(&self) -> Option<T> {
        self.v
    }

    /// The fixed z-part: `T_z(d)` for a revolute joint, `R_z(v)` for a prismatic one.
    pub fn fixed_z(&self) -> DualQuaternion<T> {
        match self.joint {
            JointType::Revolute => trans_z(self.d.unwrap_or(T::zero())),
            JointType::Prismatic => rot_z(self.v.unwrap_or(T::zero())),
        }
    }

    /// `T_x(a)·R_x(l)`.
    pub fn x_part(&self) -> DualQuaternion<T> {
        trans_x(self.a).mul_ref(&rot_x(self.l))
    }

    /// `Z·X`, everything in `σᵢ` except the joint factor.
    pub fn fixed_part(&self) -> DualQuaternion<T> {
        self.fixed_z().mul_ref(&self.x_part())
    }
}

/// `R_z` with half-angle tangent `v`: `1 + v·k`.
pub fn rot_z<T: Scalar>(v: T) -> DualQuaternion<T> {
    DualQuaternion::new(Quaternion::new(T::one(), T::zero(), T::zero(), v), Quaternion::zero())
}

/// `R_x` with half-angle tangent `l`: `1 + l·i`.
pub fn rot_x<T: Scalar>(l: T) -> DualQuaternion<T> {
    DualQuaternion::new(Quaternion::new(T::one(), l, T::zero(), T::zero()), Quaternion::zero())
}

/// Translation by `d` along z: `1 + ε·(d/2)·k`.
pub fn trans_z<T: Scalar>(d: T) -> DualQuaternion<T> {
    DualQuaternion::new(Quaternion::one(), Quaternion::new(T::zero(), T::zero(), T::zero(), d / T::lit(2.0)))
}

/// Translation by `a` along x: `1 + ε·(a/2)·i`.
pub fn trans_x<T: Scalar>(a: T) -> DualQuaternion<T> {
    DualQuaternion::new(Quaternion::one(), Quaternion::new(T::zero(), a / T::lit(2.0), T::zero(), T::zero()))
}

/// Joint factor `J(x) = A + x·B` for a joint of the given type, with the variable
/// entering as `sign·x`. Returns `(A, B)`.
pub fn joint_basis<T: Scalar>(joint: JointType, sign: T) -> (DualQuaternion<T>, DualQuaternion<T>) {
    let z = Quaternion::zero();
    let b = match joint {
        JointType::Revolute => DualQuaternion::new(Quaternion::new(T::zero(), T::zero(), T::zero(), sign), z),
        JointType::Prismatic => {
            DualQuaternion::new(z, Quaternion::new(T::zero(), T::zero(), T::zero(), sign / T::lit(2.0)))
        }
    };
    (DualQuaternion::one(), b)
}

pub fn joint_factor<T: Scalar>(joint: JointType, value: T, sign: T) -> DualQuaternion<T> {
    let (a, b) = joint_basis(joint, sign);
    a + b.scale(&value)
}

/// The joint factor with a polynomial variable.
pub fn joint_factor_poly<T: Scalar>(joint: JointType, sign: T) -> DualQuaternion<Poly1<T>> {
    let (a, b) = joint_basis(joint, sign);
    lift(&a) + lift(&b).scale(&Poly1::x())
}

/// Constant dual quaternion with polynomial entries.
pub fn lift<T: Scalar>(q: &DualQuaternion<T>) -> DualQuaternion<Poly1<T>> {
    DualQuaternion::from_array(q.to_array().map(Poly1::constant))
}

/// Evaluates every entry of a polynomial dual quaternion.
pub fn eval_poly_dq<T: Scalar>(q: &DualQuaternion<Poly1<T>>, x: T) -> DualQuaternion<T> {
    DualQuaternion::from_array(q.to_array().map(|p| p.eval(x)))
}

/// `σᵢ` at the given joint value (half-angle tangent or offset).
pub fn sigma_i<T: Scalar>(row: &DhRow<T>, value: T) -> DualQuaternion<T> {
    joint_factor(row.joint, value, T::one()).mul_ref(&row.fixed_part())
}

/// `σᵢ` with entries affine in the row's joint variable.
pub fn sigma_i_poly<T: Scalar>(row: &DhRow<T>) -> DualQuaternion<Poly1<T>> {
    joint_factor_poly(row.joint, T::one()).mul_ref(&lift(&row.fixed_part()))
}

/// Six validated rows in normalized form (`d₁ = d₆ = 0`, `a₆ = α₆ = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec<T> {
    rows: [DhRow<T>; 6],
    pattern: Pattern,
    name: Option<String>,
}

impl<T: Scalar> ChainSpec<T> {
    pub fn new(rows: [DhRow<T>; 6]) -> Result<Self, ChainError> {
        let pattern = Pattern::from_types(rows.map(|r| r.joint))?;
        let zero = T::zero();
        if rows[0].d != Some(zero) {
            return Err(ChainError::NotNormalized("d1 must be 0".into()));
        }
        if rows[5].d != Some(zero) {
            return Err(ChainError::NotNormalized("d6 must be 0".into()));
        }
        if rows[5].a != zero {
            return Err(ChainError::NotNormalized("a6 must be 0".into()));
        }
        if rows[5].l != zero {
            return Err(ChainError::NotNormalized("alpha6 must be 0".into()));
        }
        Ok(Self { rows, pattern, name: None })
    }

    /// Builds a chain from `(type, θ°, d, a, α°)` tuples, `None` marking the variable.
    pub fn from_table(rows: &[(char, Option<T>, Option<T>, T, T); 6]) -> Result<Self, ChainError> {
        let mut out = Vec::with_capacity(6);
        for (i, (c, th, d, a, al)) in rows.iter().enumerate() {
            let joint = if *c == 'P' { JointType::Prismatic } else { JointType::Revolute };
            out.push(DhRow::new(i + 1, joint, *th, *d, *a, *al)?);
        }
        Self::new([out[0], out[1], out[2], out[3], out[4], out[5]])
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn rows(&self) -> &[DhRow<T>; 6] {
        &self.rows
    }

    /// Row by 1-based joint index.
    pub fn row(&self, joint: usize) -> &DhRow<T> {
        &self.rows[joint - 1]
    }

    pub fn pattern(&self) -> Pattern {
        self.pattern
    }

    /// `σ₁σ₂σ₃` at the given left joint values.
    pub fn left_product(&self, j: &JointVector<T>) -> DualQuaternion<T> {
        (0..3).fold(DualQuaternion::one(), |acc, i| acc.mul_ref(&sigma_i(&self.rows[i], j.values[i])))
    }

    /// `σ₄σ₅σ₆` at the given right joint values.
    pub fn right_product(&self, j: &JointVector<T>) -> DualQuaternion<T> {
        (3..6).fold(DualQuaternion::one(), |acc, i| acc.mul_ref(&sigma_i(&self.rows[i], j.values[i])))
    }
}

/// Six joint values: half-angle tangents for revolute joints, offsets for
/// prismatic ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointVector<T> {
    pub values: [T; 6],
}

impl<T: Scalar> JointVector<T> {
    pub fn from_internal(values: [T; 6]) -> Self {
        Self { values }
    }

    /// From degrees (revolute) and lengths (prismatic).
    pub fn from_external(chain: &ChainSpec<T>, ext: [T; 6]) -> Result<Self, ChainError> {
        let mut values = ext;
        for (i, row) in chain.rows.iter().enumerate() {
            if row.joint == JointType::Revolute {
                if is_half_turn(ext[i]) {
                    return Err(ChainError::HalfTurn { row: i + 1, field: "theta" });
                }
                values[i] = half_tan_deg(ext[i]);
            }
        }
        Ok(Self { values })
    }

    /// Degrees for revolute joints in `(−180, 180)`, lengths for prismatic ones.
    pub fn to_external(&self, chain: &ChainSpec<T>) -> [T; 6] {
        let mut out = self.values;
        for (i, row) in chain.rows.iter().enumerate() {
            if row.joint == JointType::Revolute {
                out[i] = deg_from_half_tan(self.values[i]);
            }
        }
        out
    }

    /// Largest per-joint difference in internal (half-tangent / length) units.
    pub fn max_diff(&self, o: &Self) -> T {
        (0..6).fold(T::zero(), |m, i| m.max((self.values[i] - o.values[i]).abs()))
    }
}

/// `σ₁σ₂⋯σ₆` as a Study point.
pub fn forward_kinematics<T: Scalar>(chain: &ChainSpec<T>, joints: &JointVector<T>) -> StudyPoint<T> {
    let dq = chain.left_product(joints).mul_ref(&chain.right_product(joints));
    StudyPoint::from_dual_quaternion(&dq).expect("a product of rigid motions is non-zero")
}

/// `σ_E·σ₆*·σ₅*·σ₄*`, the pose of frame F₄ implied by the end-effector pose and
/// the last three joints. Only `joints.values[3..6]` are read.
pub fn right_chain_pose<T: Scalar>(
    chain: &ChainSpec<T>,
    ee: &StudyPoint<T>,
    joints: &JointVector<T>,
) -> Result<StudyPoint<T>, QuatError> {
    if !ee.is_rigid(T::lit(MEMBERSHIP_TOL)) {
        return Err(QuatError::NotInvertible {
            primal_norm_sq: ee.primal().iter().map(|x| x.as_f64() * x.as_f64()).sum(),
            residual: ee.study_residual().as_f64(),
        });
    }
    let mut acc = ee.to_dual_quaternion();
    for i in (3..6).rev() {
        acc = acc.mul_ref(&sigma_i(&chain.rows[i], joints.values[i]).conjugate());
    }
    StudyPoint::from_dual_quaternion(&acc)
}
