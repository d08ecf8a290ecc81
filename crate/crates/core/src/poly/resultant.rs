use num_traits::{One, Zero};
use super::{Poly1, Poly2, PolyError};
use crate::linalg::{det, Matrix};
use crate::scalar::Scalar;

/// Sylvester matrix of two polynomials given by ascending coefficients with
/// formal degrees `p.len() − 1` and `q.len() − 1`. The `p` block comes first and
/// columns run from the highest power down.
pub fn sylvester_matrix<T: Scalar>(p: &[T], q: &[T]) -> Matrix<T> {
    subresultant_matrix(p, q, 0)
}

/// Matrix whose determinant is the `k`-th principal subresultant coefficient:
/// `n − k` shifted rows of `p`, `m − k` shifted rows of `q`, truncated to the
/// first `m + n − 2k` columns.
pub fn subresultant_matrix<T: Scalar>(p: &[T], q: &[T], k: usize) -> Matrix<T> {
    let m = p.len() - 1;
    let n = q.len() - 1;
    assert!(k <= m.min(n) || m + n == 0);
    let size = m + n - 2 * k;
    let mut s = Matrix::zeros(size, size);
    for i in 0..n - k {
        for (t, c) in p.iter().rev().enumerate() {
            if i + t < size {
                s[(i, i + t)] = *c;
            }
        }
    }
    for i in 0..m - k {
        for (t, c) in q.iter().rev().enumerate() {
            if i + t < size {
                s[(n - k + i, i + t)] = *c;
            }
        }
    }
    s
}

/// Resultant of two univariate polynomials with the given formal degrees.
pub fn sylvester_det<T: Scalar>(p: &[T], q: &[T]) -> T {
    if p.len() + q.len() == 2 {
        return T::one();
    }
    det(&sylvester_matrix(p, q))
}

/// `k`-th principal subresultant coefficient; `k = 0` is the resultant.
pub fn principal_subresultant<T: Scalar>(p: &[T], q: &[T], k: usize) -> T {
    let m = subresultant_matrix(p, q, k);
    if m.rows() == 0 {
        return T::one();
    }
    det(&m)
}

/// Coefficients of `f(u*, ·)` padded to the formal `w`-degree of `f`.
pub(crate) fn formal_w_coeffs<T: Scalar>(f: &Poly2<T>, u: T, dw: usize) -> Vec<T> {
    let mut c = f.evaluate_partial(u).into_coeffs();
    c.resize(dw + 1, T::zero());
    c
}

/// A-priori `u`-degree bound of `Res_w(f, g)`.
pub fn resultant_degree_bound<T: Scalar>(f: &Poly2<T>, g: &Poly2<T>) -> usize {
    let (fu, fw) = (f.deg_u().unwrap_or(0), f.deg_w().unwrap_or(0));
    let (gu, gw) = (g.deg_u().unwrap_or(0), g.deg_w().unwrap_or(0));
    gw * fu + fw * gu
}

/// `Res_w(f, g)` as a polynomial in `u`, by evaluation at Chebyshev nodes and
/// interpolation. The result is trimmed at `1e-9` relative.
pub fn sylvester_resultant_w<T: Scalar>(f: &Poly2<T>, g: &Poly2<T>) -> Result<Poly1<T>, PolyError> {
    sylvester_resultant_w_on(f, g, T::one())
}

/// As [`sylvester_resultant_w`], sampling on `[−radius, radius]`.
pub fn sylvester_resultant_w_on<T: Scalar>(
    f: &Poly2<T>,
    g: &Poly2<T>,
    radius: T,
) -> Result<Poly1<T>, PolyError> {
    if f.is_zero() || g.is_zero() {
        return Ok(Poly1::zero());
    }
    let (fw, gw) = (f.deg_w().unwrap_or(0), g.deg_w().unwrap_or(0));
    if fw == 0 && gw == 0 {
        return Err(PolyError::BothConstantInW);
    }
    let d = resultant_degree_bound(f, g);
    let n = d + 1;
    let pi = T::PI();
    let nodes: Vec<T> = (0..n)
        .map(|k| (pi * (T::lit(k as f64) + T::lit(0.5)) / T::lit(n as f64)).cos())
        .collect();
    let values: Vec<T> = nodes
        .iter()
        .map(|t| {
            let u = *t * radius;
            sylvester_det(&formal_w_coeffs(f, u, fw), &formal_w_coeffs(g, u, gw))
        })
        .collect();
    let cheb = chebyshev_coefficients(&nodes, &values);
    let r = chebyshev_to_monomial(&cheb).compose_linear(T::zero(), T::one() / radius);
    Ok(r.trim(T::lit(1e-9)))
}

/// Chebyshev coefficients of the interpolant through values at the
/// first-kind nodes.
fn chebyshev_coefficients<T: Scalar>(nodes: &[T], values: &[T]) -> Vec<T> {
    let n = nodes.len();
    let two = T::lit(2.0);
    (0..n)
        .map(|j| {
            let mut s = T::zero();
            for k in 0..n {
                // T_j(cos φ) = cos(jφ)
                let phi = nodes[k].acos();
                s += values[k] * (T::lit(j as f64) * phi).cos();
            }
            let a = two * s / T::lit(n as f64);
            if j == 0 {
                a / two
            } else {
                a
            }
        })
        .collect()
}

fn chebyshev_to_monomial<T: Scalar>(a: &[T]) -> Poly1<T> {
    let mut t_prev = Poly1::one();
    let mut t_cur = Poly1::x();
    let two_x = Poly1::linear(T::zero(), T::lit(2.0));
    let mut out = Poly1::zero();
    for (j, c) in a.iter().enumerate() {
        let tj = match j {
            0 => Poly1::one(),
            1 => Poly1::x(),
            _ => {
                let next = &(&two_x * &t_cur) - &t_prev;
                t_prev = std::mem::replace(&mut t_cur, next);
                t_cur.clone()
            }
        };
        out = &out + &tj.scale(*c);
    }
    out
}
