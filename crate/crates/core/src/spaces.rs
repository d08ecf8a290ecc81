//! Parametrized linear 3-spaces containing three-joint workspaces.
//!
//! A three-joint side is written as `base·J_a·F_a·J_b·F_b·J_c·F_c`, where each
//! `J` is affine in its joint variable and the `F` are fixed. Leaving out one
//! outer joint leaves a two-joint segment whose kinematic image spans a linear
//! 3-space of P⁷. Pulling that space back through the remaining factors gives
//! four hyperplanes whose coefficients are polynomials in the left-out joint.
//!
//! For the right side the chain is read backwards from the end-effector:
//! `σ_E·σ₆*·σ₅*·σ₄*`, so its joints enter with a negative sign.

use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::chain::{joint_basis, joint_factor, joint_factor_poly, lift, rot_x, trans_x, ChainSpec, JointType};
use crate::linalg::{dot, nullspace, svd, Matrix, RANK_TOL};
use crate::poly::Poly1;
use crate::quat::{DualQuaternion, StudyPoint};
use crate::scalar::Scalar;

/// Relative tolerance of the numeric Study-membership test of a family.
pub const STUDY_SPAN_TOL: f64 = 1e-9;
/// Absolute tolerance for the symbolic DH degeneracy conditions.
pub const DH_COND_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("two-joint segment image spans only a {span}-dimensional space ({what})")]
    DegenerateSegment { span: usize, what: String },
    #[error("{side} side: no usable linear-space family ({reason})")]
    Unsupported { side: Side, reason: String },
    #[error("every kernel element of the {joint} system has zero {joint}-part; infinitely many {joint} values")]
    NoParametrizedKernel { joint: JointParam },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// Which outer joint of a side parametrizes a family: `Outer` is joint 1 or 6,
/// `Inner` is joint 3 or 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyEnd {
    Outer,
    Inner,
}

/// A joint variable: `v` for revolute joints, `d` for prismatic ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct JointParam {
    pub joint: usize,
    pub kind: JointType,
}

impl fmt::Display for JointParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.kind {
            JointType::Revolute => 'v',
            JointType::Prismatic => 'd',
        };
        write!(f, "{c}{}", self.joint)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[allow(clippy::upper_case_acronyms)]
pub enum SegmentKind {
    RR,
    RP,
    PR,
    PP,
}

impl SegmentKind {
    pub fn from_types(a: JointType, b: JointType) -> Self {
        use JointType::*;
        match (a, b) {
            (Revolute, Revolute) => SegmentKind::RR,
            (Revolute, Prismatic) => SegmentKind::RP,
            (Prismatic, Revolute) => SegmentKind::PR,
            (Prismatic, Prismatic) => SegmentKind::PP,
        }
    }

    pub fn types(self) -> (JointType, JointType) {
        use JointType::*;
        match self {
            SegmentKind::RR => (Revolute, Revolute),
            SegmentKind::RP => (Revolute, Prismatic),
            SegmentKind::PR => (Prismatic, Revolute),
            SegmentKind::PP => (Prismatic, Prismatic),
        }
    }
}

/// Hyperplane `Σ cᵢ(x)·Xᵢ = 0` with coefficients polynomial in one joint variable.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamLinearForm<T> {
    pub coeffs: [Poly1<T>; 8],
    /// `None` for forms with constant coefficients.
    pub param: Option<JointParam>,
}

impl<T: Scalar> ParamLinearForm<T> {
    pub fn constant(c: [T; 8]) -> Self {
        Self { coeffs: c.map(Poly1::constant), param: None }
    }

    pub fn eval_coeffs(&self, x: T) -> [T; 8] {
        std::array::from_fn(|i| self.coeffs[i].eval(x))
    }

    pub fn apply(&self, x: T, point: &[T; 8]) -> T {
        dot(&self.eval_coeffs(x), point)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().filter_map(|c| c.degree()).max().unwrap_or(0)
    }
}

impl<T: Scalar> fmt::Display for ParamLinearForm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; 8] = ["x0", "x1", "x2", "x3", "y0", "y1", "y2", "y3"];
        let var = self.param.map(|p| p.to_string()).unwrap_or_else(|| "·".into());
        let mut first = true;
        for (c, n) in self.coeffs.iter().zip(NAMES) {
            if c.coeffs().is_empty() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "(")?;
            for (k, v) in c.coeffs().iter().enumerate() {
                if k > 0 {
                    write!(f, " {:+.6e}·{var}", v.as_f64())?;
                    if k > 1 {
                        write!(f, "^{k}")?;
                    }
                } else {
                    write!(f, "{:.6e}", v.as_f64())?;
                }
            }
            write!(f, ")·{n}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A side as `base·J_a·F_a·J_b·F_b·J_c·F_c`.
#[derive(Debug, Clone)]
pub struct ThreeChain<T> {
    pub side: Side,
    pub base: DualQuaternion<T>,
    pub joints: [JointType; 3],
    /// `+1` on the left side, `−1` on the right.
    pub sign: T,
    pub fixed: [DualQuaternion<T>; 3],
    /// DH indices of joints a, b, c.
    pub ids: [usize; 3],
    /// `(a, l)` of the link between joints a and b, and between b and c.
    pub links: [(T, T); 2],
}

impl<T: Scalar> ThreeChain<T> {
    /// `σ₁σ₂σ₃`.
    pub fn left(chain: &ChainSpec<T>) -> Self {
        let r = chain.rows();
        Self {
            side: Side::Left,
            base: DualQuaternion::one(),
            joints: [r[0].joint(), r[1].joint(), r[2].joint()],
            sign: T::one(),
            fixed: [r[0].fixed_part(), r[1].fixed_part(), r[2].fixed_part()],
            ids: [1, 2, 3],
            links: [(r[0].a(), r[0].l()), (r[1].a(), r[1].l())],
        }
    }

    /// `σ_E·σ₆*·σ₅*·σ₄*`. Uses `σᵢ* = Xᵢ*·Zᵢ*·Jᵢ*` and `σ₆ = J₆` in normalized form.
    pub fn right(chain: &ChainSpec<T>, ee: &DualQuaternion<T>) -> Self {
        let r = chain.rows();
        let f = |i: usize| r[i].x_part().conjugate().mul_ref(&r[i].fixed_z().conjugate());
        Self {
            side: Side::Right,
            base: *ee,
            joints: [r[5].joint(), r[4].joint(), r[3].joint()],
            sign: -T::one(),
            fixed: [f(4), f(3), DualQuaternion::one()],
            ids: [6, 5, 4],
            links: [(r[4].a(), r[4].l()), (r[3].a(), r[3].l())],
        }
    }

    pub fn param(&self, k: usize) -> JointParam {
        JointParam { joint: self.ids[k], kind: self.joints[k] }
    }

    pub fn joint(&self, k: usize, x: T) -> DualQuaternion<T> {
        joint_factor(self.joints[k], x, self.sign)
    }

    /// The side's pose of frame F₄ at joint values `(a, b, c)`.
    pub fn point(&self, x: [T; 3]) -> DualQuaternion<T> {
        let mut acc = self.base;
        for k in 0..3 {
            acc = acc.mul_ref(&self.joint(k, x[k])).mul_ref(&self.fixed[k]);
        }
        acc
    }

    /// Coefficient vectors of the trilinear map `(a, b, c) ↦ point`, indexed by
    /// the exponent bitmask `e₀ + 2e₁ + 4e₂`.
    pub fn trilinear_coefficients(&self) -> [[T; 8]; 8] {
        let bases: Vec<_> = (0..3).map(|k| joint_basis(self.joints[k], self.sign)).collect();
        std::array::from_fn(|mask| {
            let mut acc = self.base;
            for k in 0..3 {
                let j = if mask >> k & 1 == 1 { bases[k].1 } else { bases[k].0 };
                acc = acc.mul_ref(&j).mul_ref(&self.fixed[k]);
            }
            acc.to_array()
        })
    }
}

/// Kernel forms, image span and Study membership of `J₁(s)·F·J₂(t)`.
#[derive(Debug, Clone)]
pub struct SegmentSpace<T> {
    pub kernel: Vec<[T; 8]>,
    /// Rows `[st, s, t, 1]` of monomial coefficient vectors.
    pub image: Matrix<T>,
    pub in_study_quadric: bool,
}

pub fn segment_space<T: Scalar>(
    j1: JointType,
    f: &DualQuaternion<T>,
    j2: JointType,
    sign: T,
) -> Result<SegmentSpace<T>, SpaceError> {
    let (a1, b1) = joint_basis(j1, sign);
    let (a2, b2) = joint_basis(j2, sign);
    let term = |x: &DualQuaternion<T>, y: &DualQuaternion<T>| x.mul_ref(f).mul_ref(y).to_array();
    let image = Matrix::from_rows(&[term(&b1, &b2), term(&b1, &a2), term(&a1, &b2), term(&a1, &a2)]);
    let ker = nullspace(&image, T::lit(RANK_TOL));
    if ker.len() > 4 {
        return Err(SpaceError::DegenerateSegment {
            span: 8 - ker.len(),
            what: format!("{}{} segment", j1.letter(), j2.letter()),
        });
    }
    let kernel = ker.iter().map(|v| std::array::from_fn(|i| v[i])).collect();
    Ok(SegmentSpace { in_study_quadric: span_in_study_quadric(&image), kernel, image })
}

/// Polarized Study form `Σ xᵢy'ᵢ + x'ᵢyᵢ`.
pub fn study_bilinear<T: Scalar>(p: &[T], q: &[T]) -> T {
    (0..4).fold(T::zero(), |s, i| s + p[i] * q[i + 4] + p[i + 4] * q[i])
}

/// Whether the row span of `m` lies in the Study quadric: the Gram matrix of
/// the polarized Study form on an orthonormal basis of the span vanishes.
pub fn span_in_study_quadric<T: Scalar>(m: &Matrix<T>) -> bool {
    let d = svd(m);
    let smax = d.s[0];
    let basis: Vec<Vec<T>> = (0..m.cols())
        .filter(|&k| d.s[k] > T::lit(RANK_TOL) * smax)
        .map(|k| d.v.column(k))
        .collect();
    let mut g = T::zero();
    for p in &basis {
        for q in &basis {
            g = g.max(study_bilinear(p, q).abs());
        }
    }
    g <= T::lit(STUDY_SPAN_TOL)
}

/// Four constant forms vanishing on the stripped segment
/// `J₁(s)·T_x(a)·R_x(l)·J₂(t)`.
pub fn two_joint_space<T: Scalar>(kind: SegmentKind, a: T, l: T) -> Result<Vec<ParamLinearForm<T>>, SpaceError> {
    let (j1, j2) = kind.types();
    let f = trans_x(a).mul_ref(&rot_x(l));
    let s = segment_space(j1, &f, j2, T::one())?;
    Ok(s.kernel.into_iter().map(ParamLinearForm::constant).collect())
}

/// The 4×8 matrix of monomial coefficients of the stripped segment, rows
/// ordered `[st, s, t, 1]` and scaled by 4 (integral entries for unit
/// parameters). Its kernel is [`two_joint_space`].
pub fn coefficient_matrix_a<T: Scalar>(kind: SegmentKind, a: T, l: T) -> Matrix<T> {
    let (j1, j2) = kind.types();
    let (a1, b1) = joint_basis(j1, T::one());
    let (a2, b2) = joint_basis(j2, T::one());
    let f = trans_x(a).mul_ref(&rot_x(l));
    let four = T::lit(4.0);
    let term = |x: &DualQuaternion<T>, y: &DualQuaternion<T>| x.mul_ref(&f).mul_ref(y).to_array().map(|c| c * four);
    Matrix::from_rows(&[term(&b1, &b2), term(&b1, &a2), term(&a1, &b2), term(&a1, &a2)])
}

/// Matrix of the linear map `X ↦ g·X·h` on Study coordinates, column `j` being
/// the image of the `j`-th basis dual quaternion.
pub fn action_matrix<T: Scalar>(
    g: &DualQuaternion<Poly1<T>>,
    h: &DualQuaternion<Poly1<T>>,
) -> [[Poly1<T>; 8]; 8] {
    let cols: Vec<[Poly1<T>; 8]> = (0..8)
        .map(|j| {
            let e = DualQuaternion::from_array(std::array::from_fn(|i| {
                if i == j {
                    Poly1::constant(T::one())
                } else {
                    Poly1::constant(T::zero())
                }
            }));
            g.mul_ref(&e).mul_ref(h).to_array()
        })
        .collect();
    std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i].clone()))
}

/// Pulls forms back through `X ↦ g·X·h`: the new form is `L∘M` with `M` the
/// action matrix. With `g = a*`, `h = b*` this turns forms on `Y` into forms on
/// `X = a·Y·b`, since conjugates are projective inverses.
pub fn conjugate_family<T: Scalar>(
    forms: &[ParamLinearForm<T>],
    g: &DualQuaternion<Poly1<T>>,
    h: &DualQuaternion<Poly1<T>>,
    param: Option<JointParam>,
) -> Vec<ParamLinearForm<T>> {
    let m = action_matrix(g, h);
    forms
        .iter()
        .map(|l| {
            let coeffs = std::array::from_fn(|j| {
                (0..8).fold(Poly1::zero(), |acc: Poly1<T>, i| &acc + &(&l.coeffs[i] * &m[i][j]))
            });
            ParamLinearForm { coeffs, param: param.or(l.param) }
        })
        .collect()
}

/// One parametrized family `T(x)` of four hyperplanes.
#[derive(Debug, Clone)]
pub struct LinearSpaceFamily<T> {
    pub side: Side,
    pub end: FamilyEnd,
    pub param: JointParam,
    pub forms: Vec<ParamLinearForm<T>>,
    pub segment: SegmentKind,
    /// Numeric test: the segment span lies in the Study quadric.
    pub in_study_quadric: bool,
    /// The DH condition for the same property.
    pub symbolic_in_study_quadric: bool,
    /// Human-readable DH condition, e.g. `a5=0`.
    pub condition: String,
}

impl<T: Scalar> LinearSpaceFamily<T> {
    pub fn label(&self) -> String {
        format!("T({})", self.param)
    }

    /// The 4×8 coefficient matrix at parameter value `x`.
    pub fn evaluate(&self, x: T) -> Matrix<T> {
        let rows: Vec<[T; 8]> = self.forms.iter().map(|f| f.eval_coeffs(x)).collect();
        Matrix::from_rows(&rows)
    }

    /// Largest relative form residual at a point.
    pub fn residual(&self, x: T, point: &[T; 8]) -> T {
        let pn = crate::linalg::norm(point);
        self.forms.iter().fold(T::zero(), |m, f| {
            let c = f.eval_coeffs(x);
            let cn = crate::linalg::norm(&c);
            m.max(dot(&c, point).abs() / (cn * pn))
        })
    }
}

fn symbolic_condition<T: Scalar>(kind: SegmentKind, link: (T, T), row: usize) -> (bool, String) {
    let tol = T::lit(DH_COND_TOL);
    let (a, l) = link;
    match kind {
        SegmentKind::RR => {
            let hit_a = a.abs() <= tol;
            let hit_l = l.abs() <= tol;
            let text = match (hit_a, hit_l) {
                (true, true) => format!("a{row}=l{row}=0"),
                (true, false) => format!("a{row}=0"),
                (false, true) => format!("l{row}=0"),
                (false, false) => format!("a{row}≠0, l{row}≠0"),
            };
            (hit_a || hit_l, text)
        }
        SegmentKind::RP | SegmentKind::PR => {
            let hit = (l.abs() - T::one()).abs() <= tol;
            (hit, if hit { format!("l{row}=±1") } else { format!("l{row}≠±1") })
        }
        SegmentKind::PP => (true, "two prismatic joints".into()),
    }
}

/// Builds the family parametrized by the given outer joint of a side.
pub fn family<T: Scalar>(three: &ThreeChain<T>, end: FamilyEnd) -> Result<LinearSpaceFamily<T>, SpaceError> {
    let (seg_joints, fixed_idx, param_idx) = match end {
        FamilyEnd::Outer => ((1, 2), 1, 0),
        FamilyEnd::Inner => ((0, 1), 0, 2),
    };
    let seg = segment_space(three.joints[seg_joints.0], &three.fixed[fixed_idx], three.joints[seg_joints.1], three.sign)?;
    let segment = SegmentKind::from_types(three.joints[seg_joints.0], three.joints[seg_joints.1]);
    let param = three.param(param_idx);
    let jp = joint_factor_poly(three.joints[param_idx], three.sign);
    let (g, h) = match end {
        FamilyEnd::Outer => {
            let left = lift(&three.base).mul_ref(&jp).mul_ref(&lift(&three.fixed[0]));
            (left.conjugate(), lift(&three.fixed[2]).conjugate())
        }
        FamilyEnd::Inner => {
            let right = lift(&three.fixed[1]).mul_ref(&jp).mul_ref(&lift(&three.fixed[2]));
            (lift(&three.base).conjugate(), right.conjugate())
        }
    };
    let base_forms: Vec<_> = seg.kernel.iter().map(|k| ParamLinearForm::constant(*k)).collect();
    let forms = conjugate_family(&base_forms, &g, &h, Some(param));
    // The link inside the segment: between joints b and c for the outer family,
    // between a and b for the inner one. Report it with its DH row number.
    let (link, row) = match (three.side, end) {
        (Side::Left, FamilyEnd::Outer) => (three.links[1], 2),
        (Side::Left, FamilyEnd::Inner) => (three.links[0], 1),
        (Side::Right, FamilyEnd::Outer) => (three.links[1], 4),
        (Side::Right, FamilyEnd::Inner) => (three.links[0], 5),
    };
    let (symbolic, condition) = symbolic_condition(segment, link, row);
    Ok(LinearSpaceFamily {
        side: three.side,
        end,
        param,
        forms,
        segment,
        in_study_quadric: seg.in_study_quadric,
        symbolic_in_study_quadric: symbolic,
        condition,
    })
}

/// Both candidate families of one side.
#[derive(Debug, Clone)]
pub struct FamilyCandidates<T> {
    pub side: Side,
    pub outer: Result<LinearSpaceFamily<T>, SpaceError>,
    pub inner: Result<LinearSpaceFamily<T>, SpaceError>,
}

impl<T: Scalar> FamilyCandidates<T> {
    /// The outer-joint family unless it lies in the Study quadric, else the inner one.
    pub fn preferred(&self) -> Result<&LinearSpaceFamily<T>, SpaceError> {
        for c in [&self.outer, &self.inner] {
            if let Ok(f) = c {
                if !f.in_study_quadric {
                    return Ok(f);
                }
            }
        }
        let describe = |c: &Result<LinearSpaceFamily<T>, SpaceError>| match c {
            Ok(f) => format!("{} in Study quadric ({})", f.label(), f.condition),
            Err(e) => e.to_string(),
        };
        Err(SpaceError::Unsupported {
            side: self.side,
            reason: format!("{}; {}", describe(&self.outer), describe(&self.inner)),
        })
    }

    /// The family other than `chosen`, if it could be built.
    pub fn complement(&self, chosen: &LinearSpaceFamily<T>) -> Option<&LinearSpaceFamily<T>> {
        match chosen.end {
            FamilyEnd::Outer => self.inner.as_ref().ok(),
            FamilyEnd::Inner => self.outer.as_ref().ok(),
        }
    }
}

/// `T(v₁)` and `T(d₃)` / `T(v₃)`.
pub fn left_families<T: Scalar>(chain: &ChainSpec<T>) -> FamilyCandidates<T> {
    let three = ThreeChain::left(chain);
    FamilyCandidates {
        side: Side::Left,
        outer: family(&three, FamilyEnd::Outer),
        inner: family(&three, FamilyEnd::Inner),
    }
}

/// `T(v₆)` and `T(v₄)` / `T(d₄)`, pulled back through `σ_E*`.
pub fn right_families<T: Scalar>(chain: &ChainSpec<T>, ee: &StudyPoint<T>) -> FamilyCandidates<T> {
    let three = ThreeChain::right(chain, &ee.to_dual_quaternion());
    FamilyCandidates {
        side: Side::Right,
        outer: family(&three, FamilyEnd::Outer),
        inner: family(&three, FamilyEnd::Inner),
    }
}

/// Linear system for one joint of a side: the kernel of `B` gives forms
/// `(c + x·c')·X` that vanish on the side's workspace exactly when `x` is the
/// value of that joint.
#[derive(Debug, Clone)]
pub struct MiddleJointSystem<T> {
    pub joint: JointParam,
    /// Rows are monomials in the three joint variables, columns the 16 unknowns `(c, c')`.
    pub b: Matrix<T>,
    /// Exponents `(a, b, c)` of each row's monomial.
    pub monomials: Vec<[usize; 3]>,
    /// Kernel elements with a non-zero `c'` part.
    pub kernel: Vec<[T; 16]>,
}

impl<T: Scalar> MiddleJointSystem<T> {
    /// Least-squares joint value at a workspace point over all kernel forms;
    /// `None` when every `c'·P` vanishes.
    pub fn solve(&self, p: &[T; 8]) -> Option<T> {
        let pn = crate::linalg::norm(p);
        let (mut num, mut den) = (T::zero(), T::zero());
        for k in &self.kernel {
            let a = dot(&k[..8], p) / pn;
            let b = dot(&k[8..], p) / pn;
            num += a * b;
            den += b * b;
        }
        if den <= T::lit(1e-20) {
            return None;
        }
        Some(-num / den)
    }

    /// The kernel element with the largest `c'` part as a form linear in the joint.
    pub fn form(&self) -> ParamLinearForm<T> {
        let best = self
            .kernel
            .iter()
            .max_by(|x, y| {
                let nx = crate::linalg::norm(&x[8..]);
                let ny = crate::linalg::norm(&y[8..]);
                nx.partial_cmp(&ny).unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty kernel");
        ParamLinearForm {
            coeffs: std::array::from_fn(|i| Poly1::linear(best[i], best[8 + i])),
            param: Some(self.joint),
        }
    }
}

/// Builds the system for joint `k` (0, 1 or 2) of a side.
pub fn joint_form_system<T: Scalar>(three: &ThreeChain<T>, k: usize) -> Result<MiddleJointSystem<T>, SpaceError> {
    let c = three.trilinear_coefficients();
    let mut monomials: Vec<[usize; 3]> = Vec::new();
    let mut rows: Vec<[T; 16]> = Vec::new();
    let mut row_of = |e: [usize; 3], rows: &mut Vec<[T; 16]>| -> usize {
        if let Some(i) = monomials.iter().position(|m| *m == e) {
            i
        } else {
            monomials.push(e);
            rows.push([T::zero(); 16]);
            rows.len() - 1
        }
    };
    for mask in 0..8usize {
        let e = [mask & 1, mask >> 1 & 1, mask >> 2 & 1];
        let r = row_of(e, &mut rows);
        for i in 0..8 {
            rows[r][i] += c[mask][i];
        }
        let mut e2 = e;
        e2[k] += 1;
        let r = row_of(e2, &mut rows);
        for i in 0..8 {
            rows[r][8 + i] += c[mask][i];
        }
    }
    let keep: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].iter().any(|v| *v != T::zero())).collect();
    let monomials: Vec<[usize; 3]> = keep.iter().map(|&i| monomials[i]).collect();
    let rows: Vec<[T; 16]> = keep.iter().map(|&i| rows[i]).collect();
    let b = Matrix::from_rows(&rows);
    let mut bn = b.clone();
    bn.normalize_rows();
    let kernel: Vec<[T; 16]> = nullspace(&bn, T::lit(RANK_TOL))
        .into_iter()
        .filter(|v| crate::linalg::norm(&v[8..]) > T::lit(1e-8))
        .map(|v| std::array::from_fn(|i| v[i]))
        .collect();
    let joint = three.param(k);
    if kernel.is_empty() {
        return Err(SpaceError::NoParametrizedKernel { joint });
    }
    Ok(MiddleJointSystem { joint, b, monomials, kernel })
}

/// The form for the middle joint (`v₂` on the left, `v₅` on the right).
pub fn middle_joint_form<T: Scalar>(three: &ThreeChain<T>) -> Result<MiddleJointSystem<T>, SpaceError> {
    joint_form_system(three, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rp_matrix_first_row() {
        let a = coefficient_matrix_a(SegmentKind::RP, -0.425f64, 0.0);
        let expect = [0.0, 0.0, 0.0, 0.0, -2.0, 0.0, 0.0, 0.0];
        for j in 0..8 {
            assert!((a[(0, j)] - expect[j]).abs() < 1e-15, "{:?}", a.row(0));
        }
    }

    #[test]
    fn rp_matrix_symbolic_rows() {
        let (a2, l2) = (0.7f64, -0.3);
        let m = coefficient_matrix_a(SegmentKind::RP, a2, l2);
        let expect = [
            [0.0, 0.0, 0.0, 0.0, -2.0, 2.0 * l2, 0.0, 0.0],
            [0.0, 0.0, 4.0 * l2, 4.0, 0.0, 0.0, 2.0 * a2, -2.0 * a2 * l2],
            [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -2.0 * l2, 2.0],
            [4.0, 4.0 * l2, 0.0, 0.0, -2.0 * a2 * l2, 2.0 * a2, 0.0, 0.0],
        ];
        for i in 0..4 {
            for j in 0..8 {
                assert!((m[(i, j)] - expect[i][j]).abs() < 1e-14, "row {i}: {:?}", m.row(i));
            }
        }
    }

    #[test]
    fn degenerate_rr_segment() {
        let e = two_joint_space(SegmentKind::RR, 0.0, 0.0);
        assert!(matches!(e, Err(SpaceError::DegenerateSegment { span: 2, .. })));
    }

    #[test]
    fn identity_pullback_keeps_forms() {
        let forms = two_joint_space(SegmentKind::RP, 0.3, 0.2).unwrap();
        let one = lift(&DualQuaternion::<f64>::one());
        let out = conjugate_family(&forms, &one, &one, None);
        assert_eq!(out, forms);
    }
}
