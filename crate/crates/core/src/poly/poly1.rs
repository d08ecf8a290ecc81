use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalar::Scalar;

/// Dense univariate polynomial with ascending coefficients.
///
/// Exact-zero leading coefficients are always dropped, so the zero polynomial
/// has an empty coefficient vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly1<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Poly1<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| *c == T::zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// `a + b·x`.
    pub fn linear(a: T, b: T) -> Self {
        Self::new(vec![a, b])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::linear(T::zero(), T::one())
    }

    /// Monic polynomial with the given real roots.
    pub fn from_roots(roots: &[T]) -> Self {
        roots.iter().fold(Self::one(), |acc, r| acc * Self::linear(-*r, T::one()))
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Coefficient of `xⁱ` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).copied().unwrap_or(T::zero())
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> T {
        self.coeffs.last().copied().unwrap_or(T::zero())
    }

    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, x: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * x + *c)
    }

    /// `Σ |cᵢ|·|x|ⁱ`, the natural magnitude against which `eval(x)` is compared.
    pub fn eval_scale(&self, x: T) -> T {
        let ax = x.abs();
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * ax + c.abs())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| *c * T::lit(i as f64))
                .collect(),
        )
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.coeffs.iter().map(|c| *c * s).collect())
    }

    /// Zeroes every coefficient with magnitude below `rel_eps·max|coeff|`, then
    /// drops zero leading terms.
    pub fn trim(&self, rel_eps: T) -> Self {
        let cut = rel_eps * self.max_abs();
        Self::new(
            self.coeffs
                .iter()
                .map(|c| if c.abs() < cut { T::zero() } else { *c })
                .collect(),
        )
    }

    /// Drops leading coefficients below `rel_eps·max|coeff|` but keeps the
    /// interior untouched.
    pub fn trim_leading(&self, rel_eps: T) -> Self {
        let cut = rel_eps * self.max_abs();
        let mut c = self.coeffs.clone();
        while c.last().is_some_and(|v| v.abs() <= cut) {
            c.pop();
        }
        Self::new(c)
    }

    pub fn monic(&self) -> Self {
        let l = self.leading();
        if l == T::zero() {
            return self.clone();
        }
        self.scale(T::one() / l)
    }

    /// Euclidean division. Panics when dividing by the zero polynomial.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let Some(nd) = self.degree() else {
            return (Self::zero(), Self::zero());
        };
        if nd < dd {
            return (Self::zero(), self.clone());
        }
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        let mut q = vec![T::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let c = r[k + dd] / lead;
            q[k] = c;
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k + j] -= c * *dc;
            }
            r[k + dd] = T::zero();
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    /// Numerical monic gcd. Remainders are trimmed relative to `rel_eps` times the
    /// larger input scale, so near-common factors are treated as common.
    pub fn gcd(&self, other: &Self, rel_eps: T) -> Self {
        let normalized = |p: &Self| {
            let m = p.max_abs();
            if m == T::zero() {
                p.clone()
            } else {
                p.scale(T::one() / m)
            }
        };
        let mut a = normalized(self);
        let mut b = normalized(other);
        if a.is_zero() {
            return b.monic();
        }
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        loop {
            if b.is_zero() {
                return a.monic();
            }
            let (_, r) = a.div_rem(&b);
            if r.max_abs() <= rel_eps {
                return b.monic();
            }
            a = b;
            b = normalized(&r).trim_leading(rel_eps);
        }
    }

    pub fn compose_linear(&self, a: T, b: T) -> Self {
        // p(a + b·x)
        let lin = Self::linear(a, b);
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, c| acc * lin.clone() + Self::constant(*c))
    }
}

impl<T: Scalar> fmt::Display for Poly1<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == T::zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}·x")?,
                _ => write!(f, "{c}·x^{i}")?,
            }
        }
        Ok(())
    }
}

fn add_slices<T: Scalar>(a: &[T], b: &[T], sign: T) -> Vec<T> {
    let mut r = vec![T::zero(); a.len().max(b.len())];
    for (i, v) in a.iter().enumerate() {
        r[i] += *v;
    }
    for (i, v) in b.iter().enumerate() {
        r[i] += sign * *v;
    }
    r
}

fn mul_slices<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![T::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == T::zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            r[i + j] += *x * *y;
        }
    }
    r
}

impl<'a, T: Scalar> Add<&'a Poly1<T>> for &'a Poly1<T> {
    type Output = Poly1<T>;
    fn add(self, o: &Poly1<T>) -> Poly1<T> {
        Poly1::new(add_slices(&self.coeffs, &o.coeffs, T::one()))
    }
}

impl<'a, T: Scalar> Sub<&'a Poly1<T>> for &'a Poly1<T> {
    type Output = Poly1<T>;
    fn sub(self, o: &Poly1<T>) -> Poly1<T> {
        Poly1::new(add_slices(&self.coeffs, &o.coeffs, -T::one()))
    }
}

impl<'a, T: Scalar> Mul<&'a Poly1<T>> for &'a Poly1<T> {
    type Output = Poly1<T>;
    fn mul(self, o: &Poly1<T>) -> Poly1<T> {
        Poly1::new(mul_slices(&self.coeffs, &o.coeffs))
    }
}

impl<T: Scalar> Add for Poly1<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        &self + &o
    }
}

impl<T: Scalar> Sub for Poly1<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        &self - &o
    }
}

impl<T: Scalar> Mul for Poly1<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        &self * &o
    }
}

impl<T: Scalar> Neg for Poly1<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl<T: Scalar> Zero for Poly1<T> {
    fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<T: Scalar> One for Poly1<T> {
    fn one() -> Self {
        Self { coeffs: vec![T::one()] }
    }
}
