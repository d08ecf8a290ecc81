use std::ops::{Add, Mul, Neg, Sub};

use super::Poly1;
use crate::scalar::Scalar;

/// Dense bivariate polynomial `Σ c[i][j]·uⁱ·wʲ`.
///
/// The coefficient grid is rectangular; trailing all-zero rows and columns are
/// removed on construction so `deg_u`/`deg_w` are exact for the stored values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly2<T> {
    c: Vec<Vec<T>>,
}

impl<T: Scalar> Poly2<T> {
    pub fn new(c: Vec<Vec<T>>) -> Self {
        let nw = c.iter().map(Vec::len).max().unwrap_or(0);
        let mut c: Vec<Vec<T>> = c
            .into_iter()
            .map(|mut r| {
                r.resize(nw, T::zero());
                r
            })
            .collect();
        while c.last().is_some_and(|r| r.iter().all(|v| *v == T::zero())) {
            c.pop();
        }
        let mut nw = c.iter().map(Vec::len).max().unwrap_or(0);
        while nw > 0 && c.iter().all(|r| r[nw - 1] == T::zero()) {
            nw -= 1;
        }
        for r in c.iter_mut() {
            r.truncate(nw);
        }
        if nw == 0 {
            c.clear();
        }
        Self { c }
    }

    pub fn zero() -> Self {
        Self { c: Vec::new() }
    }

    pub fn constant(v: T) -> Self {
        Self::new(vec![vec![v]])
    }

    pub fn u() -> Self {
        Self::new(vec![vec![T::zero()], vec![T::one()]])
    }

    pub fn w() -> Self {
        Self::new(vec![vec![T::zero(), T::one()]])
    }

    /// Embeds a polynomial in `u` (constant in `w`).
    pub fn from_u(p: &Poly1<T>) -> Self {
        Self::new(p.coeffs().iter().map(|c| vec![*c]).collect())
    }

    /// Embeds a polynomial in `w` (constant in `u`).
    pub fn from_w(p: &Poly1<T>) -> Self {
        Self::new(vec![p.coeffs().to_vec()])
    }

    pub fn coeffs(&self) -> &[Vec<T>] {
        &self.c
    }

    pub fn coeff(&self, i: usize, j: usize) -> T {
        self.c.get(i).and_then(|r| r.get(j)).copied().unwrap_or(T::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn deg_u(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn deg_w(&self) -> Option<usize> {
        self.c.first().and_then(|r| r.len().checked_sub(1))
    }

    pub fn max_abs(&self) -> T {
        self.c.iter().flatten().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.c.iter().map(|r| r.iter().map(|v| *v * s).collect()).collect())
    }

    pub fn evaluate(&self, u: T, w: T) -> T {
        self.evaluate_partial(u).eval(w)
    }

    /// `f(u*, ·)` as a polynomial in `w`.
    pub fn evaluate_partial(&self, u: T) -> Poly1<T> {
        let nw = self.deg_w().map_or(0, |d| d + 1);
        let mut out = vec![T::zero(); nw];
        for row in self.c.iter().rev() {
            for j in 0..nw {
                out[j] = out[j] * u + row[j];
            }
        }
        Poly1::new(out)
    }

    /// `f(·, w*)` as a polynomial in `u`.
    pub fn evaluate_partial_w(&self, w: T) -> Poly1<T> {
        Poly1::new(
            self.c
                .iter()
                .map(|r| r.iter().rev().fold(T::zero(), |acc, c| acc * w + *c))
                .collect(),
        )
    }

    /// Zeroes coefficients below `rel_eps·max|coeff|`, then drops empty rows and
    /// columns at the top.
    pub fn trim(&self, rel_eps: T) -> Self {
        let cut = rel_eps * self.max_abs();
        Self::new(
            self.c
                .iter()
                .map(|r| r.iter().map(|v| if v.abs() < cut { T::zero() } else { *v }).collect())
                .collect(),
        )
    }

    /// Drops top rows/columns whose entries are all below `rel_eps·max|coeff|`,
    /// leaving interior coefficients untouched.
    pub fn trim_degrees(&self, rel_eps: T) -> Self {
        let cut = rel_eps * self.max_abs();
        let mut c = self.c.clone();
        while c.last().is_some_and(|r| r.iter().all(|v| v.abs() <= cut)) {
            c.pop();
        }
        let mut nw = c.first().map_or(0, Vec::len);
        while nw > 0 && c.iter().all(|r| r[nw - 1].abs() <= cut) {
            nw -= 1;
        }
        for r in c.iter_mut() {
            r.truncate(nw);
        }
        Self::new(c)
    }

    pub fn partial_u(&self) -> Self {
        Self::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, r)| r.iter().map(|v| *v * T::lit(i as f64)).collect())
                .collect(),
        )
    }

    pub fn partial_w(&self) -> Self {
        Self::new(
            self.c
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .skip(1)
                        .map(|(j, v)| *v * T::lit(j as f64))
                        .collect()
                })
                .collect(),
        )
    }

    fn combine(&self, o: &Self, sign: T) -> Self {
        let nu = self.c.len().max(o.c.len());
        let nw = self.deg_w().max(o.deg_w()).map_or(0, |d| d + 1);
        let mut r = vec![vec![T::zero(); nw]; nu];
        for (i, row) in self.c.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                r[i][j] += *v;
            }
        }
        for (i, row) in o.c.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                r[i][j] += sign * *v;
            }
        }
        Self::new(r)
    }
}

impl<'a, T: Scalar> Add<&'a Poly2<T>> for &'a Poly2<T> {
    type Output = Poly2<T>;
    fn add(self, o: &Poly2<T>) -> Poly2<T> {
        self.combine(o, T::one())
    }
}

impl<'a, T: Scalar> Sub<&'a Poly2<T>> for &'a Poly2<T> {
    type Output = Poly2<T>;
    fn sub(self, o: &Poly2<T>) -> Poly2<T> {
        self.combine(o, -T::one())
    }
}

impl<'a, T: Scalar> Mul<&'a Poly2<T>> for &'a Poly2<T> {
    type Output = Poly2<T>;
    fn mul(self, o: &Poly2<T>) -> Poly2<T> {
        if self.is_zero() || o.is_zero() {
            return Poly2::zero();
        }
        let (au, aw) = (self.c.len(), self.c[0].len());
        let (bu, bw) = (o.c.len(), o.c[0].len());
        let mut r = vec![vec![T::zero(); aw + bw - 1]; au + bu - 1];
        for i in 0..au {
            for j in 0..aw {
                let a = self.c[i][j];
                if a == T::zero() {
                    continue;
                }
                for k in 0..bu {
                    for l in 0..bw {
                        r[i + k][j + l] += a * o.c[k][l];
                    }
                }
            }
        }
        Poly2::new(r)
    }
}

impl<T: Scalar> Add for Poly2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        &self + &o
    }
}

impl<T: Scalar> Sub for Poly2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        &self - &o
    }
}

impl<T: Scalar> Mul for Poly2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        &self * &o
    }
}

impl<T: Scalar> Neg for Poly2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type P2 = Poly2<f64>;

    #[test]
    fn difference_of_squares() {
        let (u, w) = (P2::u(), P2::w());
        let p = (&u + &w) * (&u - &w);
        assert_eq!(p, &(&u * &u) - &(&w * &w));
        assert_eq!(p.deg_u(), Some(2));
        assert_eq!(p.deg_w(), Some(2));
    }

    #[test]
    fn evaluation() {
        let p = &(&P2::u() * &P2::w()) + &P2::constant(1.0);
        assert_eq!(p.evaluate(2.0, 3.0), 7.0);
        assert_eq!(p.evaluate_partial(2.0).eval(3.0), 7.0);
        assert_eq!(p.evaluate_partial_w(3.0).eval(2.0), 7.0);
    }

    #[test]
    fn trimming() {
        let p = P2::new(vec![vec![1.0, 1e-20], vec![1e-19, 0.0]]);
        assert_eq!(p.trim(1e-12), P2::constant(1.0));
        assert_eq!(p.trim_degrees(1e-12), P2::constant(1.0));
        assert!(P2::zero().trim(1e-9).is_zero());
    }

    #[test]
    fn partials() {
        // u²w + 3w²
        let p = P2::new(vec![vec![0.0, 0.0, 3.0], vec![0.0; 3], vec![0.0, 1.0, 0.0]]);
        assert_eq!(p.partial_u().evaluate(2.0, 5.0), 20.0);
        assert_eq!(p.partial_w().evaluate(2.0, 5.0), 34.0);
    }
}
