//! The elimination pipeline.
//!
//! One family `T(u)` from the left side and one `T(w)` from the right give an
//! 8×8 matrix `M(u, w)` of hyperplanes whose rows are affine in `u` (first four)
//! or `w` (last four). Seven rows define a kernel point `P(u, w)` by Cramer's
//! rule; the Study quadric and the eighth row give `f(u, w)` and `g(u, w)`.
//!
//! Real roots in `u` are searched on the half-angle chart `u = tan(θ/2)`,
//! `θ ∈ (−π, π)`, where `f` and `g` are replaced by their homogenizations in
//! `(cos θ/2, sin θ/2)`. The eliminant is evaluated pointwise as a principal
//! subresultant coefficient, which stays meaningful when `f` and `g` share a
//! factor in `w`, and its sign changes are bisected.

use std::collections::HashMap;

use thiserror::Error;

use crate::chain::{forward_kinematics, ChainSpec, JointVector};
use crate::linalg::{self, norm, Matrix, RANK_TOL};
use crate::poly::{principal_subresultant, real_roots, resultant_degree_bound, subresultant_matrix, Poly2, PolyError};
use crate::quat::{QuatError, StudyPoint};
use crate::scalar::Scalar;
use crate::spaces::{
    joint_form_system, left_families, middle_joint_form, right_families, FamilyCandidates, FamilyEnd,
    LinearSpaceFamily, MiddleJointSystem, SpaceError, ThreeChain,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("pose is not on the Study quadric (residual {residual:e} > tolerance {tolerance:e})")]
    NotOnStudyQuadric { residual: f64, tolerance: f64 },
    #[error(transparent)]
    Pose(#[from] QuatError),
    #[error("degenerate chain: {0}")]
    DegenerateChain(#[from] SpaceError),
    #[error("the stacked hyperplanes are not in general position (rank {rank} < 8): infinitely many solutions")]
    SingularSystem { rank: usize },
    #[error("every 7×7 minor vanishes for the chosen subset")]
    ZeroKernel,
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("joint {joint} cannot be solved linearly at this pose")]
    UnsolvableLinear { joint: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions<T> {
    /// Largest accepted Study residual of the input pose.
    pub pose_tolerance: T,
    /// Largest accepted projective distance between FK of a solution and the pose.
    pub accept_tolerance: T,
    /// Force the dropped hyperplane (0..8) instead of iterating 7, 6, … 0.
    pub dropped_form: Option<usize>,
    /// Number of samples of `θ ∈ (−π, π)` in the root search.
    pub samples: usize,
    /// Joint-space distance under which two solutions are merged.
    pub dedup_tolerance: T,
}

impl<T: Scalar> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            pose_tolerance: T::lit(1e-3),
            accept_tolerance: T::lit(1e-6),
            dropped_form: None,
            samples: 1440,
            dedup_tolerance: T::lit(1e-6),
        }
    }
}

/// One verified inverse-kinematics solution.
#[derive(Debug, Clone, PartialEq)]
pub struct IkSolution<T> {
    pub joints: JointVector<T>,
    /// Degrees for revolute joints, lengths for prismatic ones.
    pub external: [T; 6],
    /// Projective distance between the FK pose and the target.
    pub residual: T,
    /// Pose of frame F₄.
    pub f4_pose: StudyPoint<T>,
    pub u: T,
    pub w: T,
}

/// Diagnostics of a solver run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveMeta {
    pub left_family: String,
    pub right_family: String,
    pub dropped_form: usize,
    pub subset: Vec<usize>,
    pub f_degrees: (usize, usize),
    pub g_degrees: (usize, usize),
    /// Degree of the common `w`-factor of `f` and `g` (0 in the generic case).
    pub gcd_degree: usize,
    pub resultant_degree_bound: usize,
    pub u_roots: Vec<f64>,
    pub candidates: usize,
    pub rejected: usize,
    pub pose_correction: f64,
    pub notes: Vec<String>,
}

impl SolveMeta {
    pub fn families(&self) -> String {
        format!("{}/{}", self.left_family, self.right_family)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IkOutput<T> {
    pub solutions: Vec<IkSolution<T>>,
    pub meta: SolveMeta,
}

/// Stacked hyperplanes: rows 0..4 are affine in `u`, rows 4..8 in `w`. Rows are
/// scaled to unit largest coefficient.
#[derive(Debug, Clone)]
pub struct FormMatrix<T> {
    pub rows: Vec<[Poly2<T>; 8]>,
}

impl<T: Scalar> FormMatrix<T> {
    pub fn new(tu: &LinearSpaceFamily<T>, tw: &LinearSpaceFamily<T>) -> Self {
        let mut rows = Vec::with_capacity(8);
        for (fam, is_u) in [(tu, true), (tw, false)] {
            for form in &fam.forms {
                let m = form.coeffs.iter().fold(T::zero(), |m, c| m.max(c.max_abs()));
                let s = if m > T::zero() { T::one() / m } else { T::one() };
                rows.push(std::array::from_fn(|j| {
                    let c = form.coeffs[j].scale(s);
                    if is_u {
                        Poly2::from_u(&c)
                    } else {
                        Poly2::from_w(&c)
                    }
                }));
            }
        }
        Self { rows }
    }

    pub fn evaluate(&self, u: T, w: T) -> Matrix<T> {
        let rows: Vec<[T; 8]> = self.rows.iter().map(|r| std::array::from_fn(|j| r[j].evaluate(u, w))).collect();
        Matrix::from_rows(&rows)
    }
}

const GENERAL_POSITION_SAMPLES: [(f64, f64); 5] = [(0.3, -0.7), (1.3, 0.4), (-0.9, 2.1), (0.05, -1.6), (-2.4, -0.2)];

/// Rank test of the stacked 8×8 coefficient matrix at five fixed `(u, w)`
/// samples; singular at all of them means the hyperplanes are dependent.
pub fn check_general_position<T: Scalar>(
    tu: &LinearSpaceFamily<T>,
    tw: &LinearSpaceFamily<T>,
) -> Result<(), SolverError> {
    let m = FormMatrix::new(tu, tw);
    let mut best = 0;
    for (u, w) in GENERAL_POSITION_SAMPLES {
        let mut e = m.evaluate(T::lit(u), T::lit(w));
        e.normalize_rows();
        best = best.max(linalg::rank(&e, T::lit(RANK_TOL)));
    }
    if best < 8 {
        Err(SolverError::SingularSystem { rank: best })
    } else {
        Ok(())
    }
}

/// Cramer kernel `Pᵢ = (−1)ⁱ·det(minor without column i)` of the seven rows in
/// `subset`. Degrees are trimmed at `1e-12` relative.
pub fn kernel_point<T: Scalar>(m: &FormMatrix<T>, subset: &[usize]) -> Result<Vec<Poly2<T>>, SolverError> {
    assert_eq!(subset.len(), 7);
    let rows: Vec<&[Poly2<T>; 8]> = subset.iter().map(|&r| &m.rows[r]).collect();
    let mut memo: HashMap<u8, Poly2<T>> = HashMap::new();
    // Determinant of rows `8 − |cols|`..7 restricted to the column bitmask.
    fn minor<T: Scalar>(rows: &[&[Poly2<T>; 8]], cols: u8, memo: &mut HashMap<u8, Poly2<T>>) -> Poly2<T> {
        let k = 7 - cols.count_ones() as usize;
        if k == 7 {
            return Poly2::constant(T::one());
        }
        if let Some(v) = memo.get(&cols) {
            return v.clone();
        }
        let mut acc = Poly2::zero();
        let mut idx = 0;
        for c in 0..8 {
            if cols >> c & 1 == 0 {
                continue;
            }
            let e = &rows[k][c];
            if !e.is_zero() {
                let sub = minor(rows, cols & !(1 << c), memo);
                let term = e * &sub;
                acc = if idx % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            idx += 1;
        }
        memo.insert(cols, acc.clone());
        acc
    }
    let p: Vec<Poly2<T>> = (0..8)
        .map(|i| {
            let d = minor(&rows, 0xff & !(1u8 << i), &mut memo);
            if i % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect();
    let scale = p.iter().fold(T::zero(), |m, q| m.max(q.max_abs()));
    if scale == T::zero() {
        return Err(SolverError::ZeroKernel);
    }
    let cut = T::lit(1e-12) * scale;
    let p: Vec<Poly2<T>> = p.iter().map(|q| trim_below(q, cut)).collect();
    if p.iter().all(|q| q.is_zero()) {
        return Err(SolverError::ZeroKernel);
    }
    Ok(p)
}

fn trim_below<T: Scalar>(p: &Poly2<T>, cut: T) -> Poly2<T> {
    let m = p.max_abs();
    if m <= cut {
        return Poly2::zero();
    }
    p.trim_degrees(cut / m)
}

/// `f = Σ xᵢ·yᵢ` with `P = (x₀, …, x₃, y₀, …, y₃)`.
pub fn study_substitution<T: Scalar>(p: &[Poly2<T>]) -> Poly2<T> {
    (0..4).fold(Poly2::zero(), |acc, i| &acc + &(&p[i] * &p[i + 4]))
}

/// `g`: the dropped hyperplane evaluated at `P`.
pub fn leftover_form<T: Scalar>(p: &[Poly2<T>], m: &FormMatrix<T>, dropped: usize) -> Result<Poly2<T>, SolverError> {
    let g = (0..8).fold(Poly2::zero(), |acc, j| &acc + &(&m.rows[dropped][j] * &p[j]));
    let scale = p.iter().fold(T::zero(), |s, q| s.max(q.max_abs()));
    let g = trim_below(&g, T::lit(1e-12) * scale);
    if g.is_zero() {
        return Err(SolverError::InternalInconsistency(format!(
            "form {dropped} vanishes identically on the kernel of the other seven"
        )));
    }
    Ok(g)
}

/// The eliminated system for one choice of seven hyperplanes.
#[derive(Debug, Clone)]
pub struct EliminationState<T> {
    pub subset: Vec<usize>,
    pub dropped: usize,
    pub p: Vec<Poly2<T>>,
    pub f: Poly2<T>,
    pub g: Poly2<T>,
}

/// Iterates the dropped row 7, 6, … 0 (or only `forced`) until `f ≢ 0`.
pub fn eliminate<T: Scalar>(m: &FormMatrix<T>, forced: Option<usize>) -> Result<EliminationState<T>, SolverError> {
    let order: Vec<usize> = match forced {
        Some(d) => vec![d],
        None => (0..8).rev().collect(),
    };
    let mut last_err = SolverError::ZeroKernel;
    for dropped in order {
        let subset: Vec<usize> = (0..8).filter(|&r| r != dropped).collect();
        let p = match kernel_point(m, &subset) {
            Ok(p) => p,
            Err(e) => {
                last_err = e;
                continue;
            }
        };
        let scale = p.iter().fold(T::zero(), |s, q| s.max(q.max_abs()));
        let f = trim_below(&study_substitution(&p), T::lit(1e-12) * scale * scale);
        if f.is_zero() {
            last_err = SolverError::InternalInconsistency("f vanishes for every subset".into());
            continue;
        }
        let g = leftover_form(&p, m, dropped)?;
        return Ok(EliminationState { subset, dropped, p, f, g });
    }
    Err(last_err)
}

/// Values and derivatives of `sⁱ·c^(d−i)`, `s = sin(t/2)`, `c = cos(t/2)`.
fn half_angle_basis<T: Scalar>(t: T, d: usize) -> (Vec<T>, Vec<T>) {
    let (s, c) = (t / T::lit(2.0)).sin_cos();
    let pw = |x: T, n: isize| if n < 0 { T::zero() } else { x.powi(n as i32) };
    let half = T::lit(0.5);
    let mut v = Vec::with_capacity(d + 1);
    let mut dv = Vec::with_capacity(d + 1);
    for i in 0..=d {
        let (ii, dd) = (i as isize, d as isize);
        v.push(pw(s, ii) * pw(c, dd - ii));
        let a = if i > 0 { T::lit(i as f64) * pw(s, ii - 1) * pw(c, dd - ii + 1) } else { T::zero() };
        let b = if i < d { T::lit((d - i) as f64) * pw(s, ii + 1) * pw(c, dd - ii - 1) } else { T::zero() };
        dv.push(half * (a - b));
    }
    (v, dv)
}

/// `f` on the half-angle chart in both variables.
struct Chart<'a, T> {
    f: &'a Poly2<T>,
    du: usize,
    dw: usize,
}

impl<'a, T: Scalar> Chart<'a, T> {
    fn new(f: &'a Poly2<T>) -> Self {
        Self { f, du: f.deg_u().unwrap_or(0), dw: f.deg_w().unwrap_or(0) }
    }

    fn coeff_norm(&self) -> T {
        let mut s = T::zero();
        for i in 0..=self.du {
            for j in 0..=self.dw {
                s += self.f.coeff(i, j).abs();
            }
        }
        s
    }

    /// Coefficients in `w` of the homogenization in `u` at angle `t`.
    fn w_coeffs(&self, t: T) -> Vec<T> {
        let (bu, _) = half_angle_basis(t, self.du);
        (0..=self.dw)
            .map(|j| (0..=self.du).fold(T::zero(), |s, i| s + self.f.coeff(i, j) * bu[i]))
            .collect()
    }

    /// Value, absolute scale and gradient of the bihomogenization at `(t, p)`.
    fn eval(&self, t: T, p: T) -> (T, T, T, T) {
        let (bu, dbu) = half_angle_basis(t, self.du);
        let (bw, dbw) = half_angle_basis(p, self.dw);
        let (mut v, mut sc, mut gt, mut gp) = (T::zero(), T::zero(), T::zero(), T::zero());
        for i in 0..=self.du {
            for j in 0..=self.dw {
                let c = self.f.coeff(i, j);
                v += c * bu[i] * bw[j];
                sc += (c * bu[i] * bw[j]).abs();
                gt += c * dbu[i] * bw[j];
                gp += c * bu[i] * dbw[j];
            }
        }
        (v, sc, gt, gp)
    }
}

fn normalized_det<T: Scalar>(mut m: Matrix<T>) -> T {
    if m.rows() == 0 {
        return T::one();
    }
    m.normalize_rows();
    linalg::det(&m)
}

/// Real solutions `(u, w)` of `f = g = 0` and the data of the search.
#[derive(Debug, Clone, PartialEq)]
pub struct UwRoots<T> {
    pub pairs: Vec<(T, T)>,
    pub u_roots: Vec<T>,
    pub gcd_degree: usize,
}

/// Solves `f(u, w) = g(u, w) = 0` over the reals. `samples` is the size of the
/// angle grid of the root search.
pub fn solve_uw<T: Scalar>(f: &Poly2<T>, g: &Poly2<T>, samples: usize) -> Result<UwRoots<T>, SolverError> {
    let (cf, cg) = (Chart::new(f), Chart::new(g));
    if cf.dw == 0 && cg.dw == 0 {
        return Err(PolyError::BothConstantInW.into());
    }
    let pi = T::PI();
    // Degree of the common w-factor: numerically zero singular values of the
    // Sylvester matrix at generic angles.
    let mut k = usize::MAX;
    if cf.dw > 0 && cg.dw > 0 {
        for t in [0.3, 1.1, -2.0, 2.5] {
            let mut s = subresultant_matrix(&cf.w_coeffs(T::lit(t)), &cg.w_coeffs(T::lit(t)), 0);
            s.normalize_rows();
            let sv = linalg::singular_values(&s);
            let kk = sv.iter().filter(|&&x| x < T::lit(1e-9) * sv[0]).count();
            k = k.min(kk);
        }
        k = k.min(cf.dw.min(cg.dw));
    } else {
        k = 0;
    }
    let phi = |t: T| -> T {
        if cg.dw == 0 {
            return cg.w_coeffs(t)[0];
        }
        if cf.dw == 0 {
            return cf.w_coeffs(t)[0];
        }
        normalized_det(subresultant_matrix(&cf.w_coeffs(t), &cg.w_coeffs(t), k))
    };
    let n = samples.max(16);
    let step = T::lit(2.0) * pi / T::lit(n as f64);
    let grid: Vec<T> = (0..n).map(|i| -pi + (T::lit(i as f64) + T::lit(0.5)) * step).collect();
    let vals: Vec<T> = grid.iter().map(|&t| phi(t)).collect();
    let mut thetas: Vec<T> = Vec::new();
    for i in 0..n - 1 {
        let (a, b) = (vals[i], vals[i + 1]);
        if a == T::zero() {
            thetas.push(grid[i]);
            continue;
        }
        if (a > T::zero()) != (b > T::zero()) && b != T::zero() {
            thetas.push(bisect(&phi, grid[i], grid[i + 1], a));
        }
    }
    // Touching roots: local minima of |φ| without a sign change.
    for i in 1..n - 1 {
        let (a, b, c) = (vals[i - 1].abs(), vals[i].abs(), vals[i + 1].abs());
        let same = (vals[i - 1] > T::zero()) == (vals[i] > T::zero()) && (vals[i] > T::zero()) == (vals[i + 1] > T::zero());
        if same && b <= a && b < c {
            let t = golden_min(&|t| phi(t).abs(), grid[i - 1], grid[i + 1]);
            if phi(t).abs() <= T::lit(1e-4) * a.max(c) {
                thetas.push(t);
            }
        }
    }
    thetas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    thetas.dedup_by(|a, b| (*a - *b).abs() <= T::lit(1e-12));

    let mut pairs: Vec<(T, T)> = Vec::new();
    for &t in &thetas {
        let (lead, other) = if cg.dw > 0 { (&cg, &cf) } else { (&cf, &cg) };
        let wc = lead.w_coeffs(t);
        let wp = crate::poly::Poly1::new(wc);
        if wp.degree().is_none() {
            continue;
        }
        let roots = match real_roots(&wp, T::lit(1e-10)) {
            Ok(r) => r,
            Err(_) => continue,
        };
        for r in roots {
            let w = r.value;
            let p = T::lit(2.0) * w.atan();
            let (ov, os, _, _) = other.eval(t, p);
            if ov.abs() > T::lit(1e-3) * os + T::lit(1e-10) * other.coeff_norm() {
                continue;
            }
            let (t2, p2) = newton_polish(&cf, &cg, t, p);
            let (u2, w2) = ((t2 / T::lit(2.0)).tan(), (p2 / T::lit(2.0)).tan());
            if !pairs.iter().any(|(a, b)| (*a - u2).abs() <= T::lit(1e-10) * T::one().max(u2.abs()) && (*b - w2).abs() <= T::lit(1e-10) * T::one().max(w2.abs())) {
                pairs.push((u2, w2));
            }
        }
    }
    Ok(UwRoots {
        pairs,
        u_roots: thetas.iter().map(|t| (*t / T::lit(2.0)).tan()).collect(),
        gcd_degree: k,
    })
}

fn bisect<T: Scalar, F: Fn(T) -> T>(phi: &F, mut a: T, mut b: T, mut fa: T) -> T {
    for _ in 0..200 {
        let m = (a + b) / T::lit(2.0);
        if m <= a || m >= b {
            break;
        }
        let fm = phi(m);
        if fm == T::zero() {
            return m;
        }
        if (fm > T::zero()) == (fa > T::zero()) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    (a + b) / T::lit(2.0)
}

fn golden_min<T: Scalar, F: Fn(T) -> T>(h: &F, mut a: T, mut b: T) -> T {
    let r = T::lit(0.618_033_988_749_894_8);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (h(x1), h(x2));
    for _ in 0..120 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = h(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = h(x2);
        }
        if b - a <= T::epsilon() * T::lit(4.0) {
            break;
        }
    }
    (a + b) / T::lit(2.0)
}

/// Newton iteration on the bihomogenized `(f, g)` in angle coordinates; keeps
/// the iterate with the smallest scaled residual.
fn newton_polish<T: Scalar>(cf: &Chart<'_, T>, cg: &Chart<'_, T>, t0: T, p0: T) -> (T, T) {
    let resid = |t: T, p: T| {
        let (fv, fs, _, _) = cf.eval(t, p);
        let (gv, gs, _, _) = cg.eval(t, p);
        let tiny = T::min_positive_value();
        (fv.abs() / fs.max(tiny)).max(gv.abs() / gs.max(tiny))
    };
    let (mut t, mut p) = (t0, p0);
    let mut best = (t0, p0, resid(t0, p0));
    for _ in 0..12 {
        let (fv, _, ft, fp) = cf.eval(t, p);
        let (gv, _, gt, gp) = cg.eval(t, p);
        let det = ft * gp - fp * gt;
        if det == T::zero() || !det.is_finite() {
            break;
        }
        let dt = (fv * gp - fp * gv) / det;
        let dp = (ft * gv - fv * gt) / det;
        t -= dt;
        p -= dp;
        if !(t.is_finite() && p.is_finite()) {
            break;
        }
        let r = resid(t, p);
        if r < best.2 {
            best = (t, p, r);
        }
        if dt.abs().max(dp.abs()) <= T::epsilon() * T::lit(4.0) {
            break;
        }
    }
    (best.0, best.1)
}

/// Back-substitution of the four joints not given by `(u, w)`.
pub struct Recovery<T> {
    left: ThreeChain<T>,
    right: ThreeChain<T>,
    left_end: FamilyEnd,
    right_end: FamilyEnd,
    left_complement: Option<LinearSpaceFamily<T>>,
    right_complement: Option<LinearSpaceFamily<T>>,
    left_middle: Result<MiddleJointSystem<T>, SpaceError>,
    right_middle: Result<MiddleJointSystem<T>, SpaceError>,
    left_other: Result<MiddleJointSystem<T>, SpaceError>,
    right_other: Result<MiddleJointSystem<T>, SpaceError>,
}

impl<T: Scalar> Recovery<T> {
    pub fn new(
        chain: &ChainSpec<T>,
        ee: &StudyPoint<T>,
        left: (&FamilyCandidates<T>, &LinearSpaceFamily<T>),
        right: (&FamilyCandidates<T>, &LinearSpaceFamily<T>),
    ) -> Self {
        let lt = ThreeChain::left(chain);
        let rt = ThreeChain::right(chain, &ee.to_dual_quaternion());
        let other = |end: FamilyEnd| match end {
            FamilyEnd::Outer => 2,
            FamilyEnd::Inner => 0,
        };
        Self {
            left_middle: middle_joint_form(&lt),
            right_middle: middle_joint_form(&rt),
            left_other: joint_form_system(&lt, other(left.1.end)),
            right_other: joint_form_system(&rt, other(right.1.end)),
            left_complement: left.0.complement(left.1).cloned(),
            right_complement: right.0.complement(right.1).cloned(),
            left_end: left.1.end,
            right_end: right.1.end,
            left: lt,
            right: rt,
        }
    }

    /// Family parameters `(u, w)` of a joint vector.
    pub fn uw_of(&self, q: &JointVector<T>) -> (T, T) {
        let idx = |three: &ThreeChain<T>, end: FamilyEnd| match end {
            FamilyEnd::Outer => three.ids[0] - 1,
            FamilyEnd::Inner => three.ids[2] - 1,
        };
        (q.values[idx(&self.left, self.left_end)], q.values[idx(&self.right, self.right_end)])
    }

    /// Joint values for a kernel point `P(u*, w*)`.
    pub fn recover(&self, p: &[T; 8], u: T, w: T) -> Result<JointVector<T>, SolverError> {
        let mut values = [T::zero(); 6];
        for (three, end, comp, middle, other, x) in [
            (&self.left, self.left_end, &self.left_complement, &self.left_middle, &self.left_other, u),
            (&self.right, self.right_end, &self.right_complement, &self.right_middle, &self.right_other, w),
        ] {
            let (known, unknown) = match end {
                FamilyEnd::Outer => (0, 2),
                FamilyEnd::Inner => (2, 0),
            };
            let outer = comp
                .as_ref()
                .and_then(|fam| solve_from_family(fam, p))
                .or_else(|| other.as_ref().ok().and_then(|s| s.solve(p)))
                .ok_or_else(|| SolverError::UnsolvableLinear { joint: three.param(unknown).to_string() })?;
            let mid = middle
                .as_ref()
                .map_err(|e| SolverError::DegenerateChain(e.clone()))?
                .solve(p)
                .ok_or_else(|| SolverError::UnsolvableLinear { joint: three.param(1).to_string() })?;
            let mut vals = [T::zero(); 3];
            vals[known] = x;
            vals[unknown] = outer;
            vals[1] = mid;
            for k in 0..3 {
                values[three.ids[k] - 1] = vals[k];
            }
        }
        Ok(JointVector::from_internal(values))
    }
}

/// Solves `α·P + x·β·P = 0` with the form of largest relative `|β·P|`.
fn solve_from_family<T: Scalar>(fam: &LinearSpaceFamily<T>, p: &[T; 8]) -> Option<T> {
    let pn = norm(p);
    let mut best: Option<(T, T)> = None;
    for f in &fam.forms {
        let a: [T; 8] = std::array::from_fn(|i| f.coeffs[i].coeff(0));
        let b: [T; 8] = std::array::from_fn(|i| f.coeffs[i].coeff(1));
        let scale = (norm(&a) + norm(&b)) * pn;
        if scale == T::zero() {
            continue;
        }
        let (ap, bp) = (linalg::dot(&a, p), linalg::dot(&b, p));
        let q = bp.abs() / scale;
        if q > T::lit(1e-9) && best.map_or(true, |(bq, _)| q > bq) {
            best = Some((q, -ap / bp));
        }
    }
    best.map(|(_, x)| x)
}

/// Complete inverse kinematics of `chain` at pose `ee`.
pub fn solve_ik<T: Scalar>(
    chain: &ChainSpec<T>,
    ee: &StudyPoint<T>,
    opts: &SolverOptions<T>,
) -> Result<IkOutput<T>, SolverError> {
    let residual = ee.study_residual();
    if residual > opts.pose_tolerance {
        return Err(SolverError::NotOnStudyQuadric {
            residual: residual.as_f64(),
            tolerance: opts.pose_tolerance.as_f64(),
        });
    }
    let (ee, correction) = ee.canonical().project_to_quadric()?;
    let ee = ee.canonical();
    let mut meta = SolveMeta { pose_correction: correction.as_f64(), ..Default::default() };

    let lc = left_families(chain);
    let rc = right_families(chain, &ee);
    let tu = lc.preferred()?;
    let tw = rc.preferred()?;
    meta.left_family = tu.label();
    meta.right_family = tw.label();
    check_general_position(tu, tw)?;

    let m = FormMatrix::new(tu, tw);
    let state = eliminate(&m, opts.dropped_form)?;
    meta.dropped_form = state.dropped;
    meta.subset = state.subset.clone();
    let degs = |p: &Poly2<T>| (p.deg_u().unwrap_or(0), p.deg_w().unwrap_or(0));
    meta.f_degrees = degs(&state.f);
    meta.g_degrees = degs(&state.g);
    meta.resultant_degree_bound = resultant_degree_bound(&state.f, &state.g);
    if state.g.deg_u().unwrap_or(0) == 0 && state.g.deg_w().unwrap_or(0) == 0 {
        meta.notes.push("leftover form is a non-zero constant: no solutions through this subset".into());
        return Ok(IkOutput { solutions: Vec::new(), meta });
    }

    let uw = solve_uw(&state.f, &state.g, opts.samples)?;
    meta.gcd_degree = uw.gcd_degree;
    meta.u_roots = uw.u_roots.iter().map(|x| x.as_f64()).collect();
    meta.candidates = uw.pairs.len();

    let rec = Recovery::new(chain, &ee, (&lc, tu), (&rc, tw));
    let mut solutions: Vec<IkSolution<T>> = Vec::new();
    for &(u, w) in &uw.pairs {
        match verify_candidate(&m, &rec, chain, &ee, u, w, opts) {
            Ok(s) => {
                if !solutions.iter().any(|o| o.joints.max_diff(&s.joints) <= opts.dedup_tolerance) {
                    solutions.push(s);
                }
            }
            Err(reason) => {
                meta.rejected += 1;
                meta.notes.push(format!("rejected (u={:.9e}, w={:.9e}): {reason}", u.as_f64(), w.as_f64()));
            }
        }
    }
    solutions.sort_by(|a, b| a.external[0].partial_cmp(&b.external[0]).unwrap_or(std::cmp::Ordering::Equal));
    if solutions.is_empty() {
        meta.notes.push("no real solutions (solutions with a joint at 180° are not representable)".into());
    }
    Ok(IkOutput { solutions, meta })
}

fn verify_candidate<T: Scalar>(
    m: &FormMatrix<T>,
    rec: &Recovery<T>,
    chain: &ChainSpec<T>,
    ee: &StudyPoint<T>,
    u: T,
    w: T,
    opts: &SolverOptions<T>,
) -> Result<IkSolution<T>, String> {
    let (p, form_residual) = kernel_at(m, u, w);
    let pmax = p.iter().fold(T::zero(), |a, x| a.max(x.abs()));
    let xmax = p[..4].iter().fold(T::zero(), |a, x| a.max(x.abs()));
    if xmax < T::lit(1e-8) * pmax {
        return Err("primal part of P vanishes".into());
    }
    let loose = T::lit(1e-5);
    if form_residual > loose {
        return Err(format!("hyperplane residual {:.3e}", form_residual.as_f64()));
    }
    let study = StudyPoint::new(p).map_err(|e| e.to_string())?.study_residual();
    if study > loose {
        return Err(format!("P off the Study quadric ({:.3e})", study.as_f64()));
    }
    let joints = rec.recover(&p, u, w).map_err(|e| e.to_string())?;
    let (joints, residual) = polish_joints(chain, ee, joints);
    if !(residual <= opts.accept_tolerance) {
        return Err(format!("FK residual {:.3e}", residual.as_f64()));
    }
    let (u, w) = rec.uw_of(&joints);
    let f4 = StudyPoint::from_dual_quaternion(&chain.left_product(&joints)).map_err(|e| e.to_string())?;
    let mut e = m.evaluate(u, w);
    e.normalize_rows();
    let c = f4.coords();
    let cn = norm(c);
    let form_residual = e.mul_vec(c).iter().fold(T::zero(), |a, x| a.max(x.abs())) / cn;
    if form_residual > T::lit(1e-8) {
        return Err(format!("hyperplane residual {:.3e} after polishing", form_residual.as_f64()));
    }
    Ok(IkSolution { external: joints.to_external(chain), joints, residual, f4_pose: f4, u, w })
}

/// Unit kernel vector of the row-normalized `M(u, w)` and its residual.
fn kernel_at<T: Scalar>(m: &FormMatrix<T>, u: T, w: T) -> ([T; 8], T) {
    let mut e = m.evaluate(u, w);
    e.normalize_rows();
    let (pv, _) = linalg::smallest_right_vector(&e);
    let p: [T; 8] = std::array::from_fn(|i| pv[i]);
    let r = e.mul_vec(&p).iter().fold(T::zero(), |a, x| a.max(x.abs()));
    (p, r)
}

fn unit<T: Scalar>(c: &[T; 8]) -> [T; 8] {
    let n = norm(c);
    c.map(|x| x / n)
}

/// Gauss–Newton on the projective FK residual in half-tangent coordinates.
/// Returns the best iterate and its projective distance to `ee`.
pub fn polish_joints<T: Scalar>(chain: &ChainSpec<T>, ee: &StudyPoint<T>, q: JointVector<T>) -> (JointVector<T>, T) {
    let target = unit(ee.coords());
    let resid = |q: &JointVector<T>| -> [T; 8] {
        let f = unit(forward_kinematics(chain, q).coords());
        let sgn = if linalg::dot(&f, &target) < T::zero() { -T::one() } else { T::one() };
        std::array::from_fn(|i| sgn * f[i] - target[i])
    };
    let mut best = q;
    let mut best_r = resid(&q);
    let mut best_n = norm(&best_r);
    let h0 = T::epsilon().cbrt();
    for _ in 0..10 {
        if best_n == T::zero() {
            break;
        }
        let mut jac = Matrix::zeros(8, 6);
        for k in 0..6 {
            let h = h0 * (T::one() + best.values[k].abs());
            let (mut qp, mut qm) = (best, best);
            qp.values[k] += h;
            qm.values[k] -= h;
            let (rp, rm) = (resid(&qp), resid(&qm));
            for i in 0..8 {
                jac[(i, k)] = (rp[i] - rm[i]) / (h + h);
            }
        }
        let rhs = best_r.map(|x| -x);
        let step = linalg::lstsq(&jac, &rhs, T::lit(1e-12));
        let mut cand = best;
        for k in 0..6 {
            cand.values[k] += step[k];
        }
        let r = resid(&cand);
        let n = norm(&r);
        if !(n < best_n) {
            break;
        }
        best = cand;
        best_r = r;
        best_n = n;
    }
    let d = forward_kinematics(chain, &best).projective_distance(ee);
    (best, d)
}

/// Convenience: `principal_subresultant` of `f(u*, ·)` and `g(u*, ·)` with formal degrees.
pub fn eliminant_at<T: Scalar>(f: &Poly2<T>, g: &Poly2<T>, u: T, k: usize) -> T {
    let (dwf, dwg) = (f.deg_w().unwrap_or(0), g.deg_w().unwrap_or(0));
    principal_subresultant(
        &crate::poly::formal_w_coeffs(f, u, dwf),
        &crate::poly::formal_w_coeffs(g, u, dwg),
        k,
    )
}
