use num_traits::Zero;

use super::{Poly1, PolyError};
use crate::scalar::Scalar;

/// A real root with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealRoot<T> {
    pub value: T,
    pub multiplicity: usize,
}

fn sturm_sequence<T: Scalar>(p: &Poly1<T>, rel_eps: T) -> Vec<Poly1<T>> {
    let mut seq = vec![p.clone(), p.derivative()];
    loop {
        let n = seq.len();
        let b = &seq[n - 1];
        if b.degree().map_or(true, |d| d == 0) {
            break;
        }
        let (_, r) = seq[n - 2].div_rem(b);
        let scale = seq[n - 2].max_abs().max(b.max_abs());
        let r = r.trim_leading(rel_eps * scale / r.max_abs().max(T::min_positive_value()));
        if r.max_abs() <= rel_eps * scale {
            break;
        }
        let m = r.max_abs();
        seq.push(-r.scale(T::one() / m));
    }
    seq
}

fn sign_changes<T: Scalar>(seq: &[Poly1<T>], x: T) -> usize {
    let mut last = T::zero();
    let mut count = 0;
    for p in seq {
        let v = p.eval(x);
        if v == T::zero() {
            continue;
        }
        if last != T::zero() && (v > T::zero()) != (last > T::zero()) {
            count += 1;
        }
        last = v;
    }
    count
}

/// Cauchy bound: every root satisfies `|x| < 1 + max |aᵢ / aₙ|`.
pub fn cauchy_bound<T: Scalar>(p: &Poly1<T>) -> T {
    let lead = p.leading().abs();
    let n = p.degree().unwrap_or(0);
    let m = (0..n).fold(T::zero(), |m, i| m.max(p.coeff(i).abs() / lead));
    T::one() + m
}

struct Isolator<'a, T> {
    seq: &'a [Poly1<T>],
    out: Vec<(T, T)>,
}

impl<T: Scalar> Isolator<'_, T> {
    fn run(&mut self, a: T, b: T, va: usize, vb: usize, depth: usize) {
        if va <= vb {
            return;
        }
        let width_tol = T::lit(1e-14) * T::one().max(a.abs()).max(b.abs());
        if va - vb == 1 || b - a <= width_tol || depth > 200 {
            self.out.push((a, b));
            return;
        }
        let mut mid = (a + b) / T::lit(2.0);
        if self.seq[0].eval(mid) == T::zero() {
            mid += (b - a) * T::lit(1e-3);
        }
        let vm = sign_changes(self.seq, mid);
        self.run(a, mid, va, vm, depth + 1);
        self.run(mid, b, vm, vb, depth + 1);
    }
}

/// Refines a simple root of `q` bracketed by `[a, b]`.
fn refine<T: Scalar>(q: &Poly1<T>, mut a: T, mut b: T) -> T {
    let mut fa = q.eval(a);
    let fb = q.eval(b);
    if fa == T::zero() {
        return a;
    }
    if fb == T::zero() {
        return b;
    }
    if (fa > T::zero()) == (fb > T::zero()) {
        // No sign change visible in floating point: take the point of smallest |q|.
        let n = 64;
        let mut best = a;
        for k in 0..=n {
            let x = a + (b - a) * T::lit(k as f64 / n as f64);
            if q.eval(x).abs() < q.eval(best).abs() {
                best = x;
            }
        }
        return best;
    }
    let tol = T::lit(1e-13);
    for _ in 0..300 {
        let m = (a + b) / T::lit(2.0);
        if b - a <= tol * T::one().max(m.abs()) || m <= a || m >= b {
            break;
        }
        let fm = q.eval(m);
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
    let x = (a + b) / T::lit(2.0);
    let d = q.derivative().eval(x);
    if d != T::zero() {
        let y = x - q.eval(x) / d;
        let slack = (b - a).max(T::epsilon() * T::one().max(x.abs()));
        if (y - x).abs() <= slack && q.eval(y).abs() <= q.eval(x).abs() {
            return y;
        }
    }
    x
}

/// Real roots of `p` in ascending order with multiplicities.
///
/// The square-free part is isolated with a Sturm sequence inside the Cauchy
/// bound and refined by bisection and one Newton step. Multiplicities come from
/// the chain `gₖ₊₁ = gcd(gₖ, gₖ')`: a root has multiplicity `m` when it is a
/// root of `g₀ … g_{m−1}`. `rel_eps` controls the numerical gcd.
pub fn real_roots<T: Scalar>(p: &Poly1<T>, rel_eps: T) -> Result<Vec<RealRoot<T>>, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let p = p.scale(T::one() / p.max_abs());
    if p.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let mut chain = vec![p.clone()];
    loop {
        let last = chain.last().unwrap();
        if last.degree().unwrap_or(0) == 0 {
            break;
        }
        let g = last.gcd(&last.derivative(), rel_eps);
        chain.push(g);
    }
    let g1 = &chain[1];
    let q = if g1.degree().unwrap_or(0) == 0 { p.clone() } else { p.div_rem(g1).0 };
    let q = q.scale(T::one() / q.max_abs());
    let seq = sturm_sequence(&q, T::epsilon() * T::lit(16.0));
    let bound = cauchy_bound(&q) + T::one();
    let mut iso = Isolator { seq: &seq, out: Vec::new() };
    let (va, vb) = (sign_changes(&seq, -bound), sign_changes(&seq, bound));
    iso.run(-bound, bound, va, vb, 0);
    let mut roots = Vec::new();
    for (a, b) in iso.out {
        let x = refine(&q, a, b);
        let mut mult = 1;
        for g in chain.iter().skip(1) {
            if g.degree().unwrap_or(0) == 0 {
                break;
            }
            let v = g.eval(x).abs();
            if v <= T::lit(1e-6) * g.eval_scale(x) {
                mult += 1;
            } else {
                break;
            }
        }
        roots.push(RealRoot { value: x, multiplicity: mult });
    }
    Ok(roots)
}

/// Real values where both `p` and `q` vanish within `tol` relative to their
/// natural evaluation scale. Candidates come from the input of smaller degree.
pub fn common_real_roots<T: Scalar>(p: &Poly1<T>, q: &Poly1<T>, tol: T) -> Result<Vec<T>, PolyError> {
    let pz = p.is_zero();
    let qz = q.is_zero();
    if pz && qz {
        return Err(PolyError::BothZero);
    }
    if pz || qz {
        let other = if pz { q } else { p };
        return Ok(real_roots(other, T::lit(1e-10))?.into_iter().map(|r| r.value).collect());
    }
    let (small, big) = if p.degree() <= q.degree() { (p, q) } else { (q, p) };
    if small.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let mut out: Vec<T> = Vec::new();
    for r in real_roots(small, T::lit(1e-10))? {
        let x = r.value;
        if big.eval(x).abs() <= tol * big.eval_scale(x) && small.eval(x).abs() <= tol * small.eval_scale(x) {
            if !out.iter().any(|y| (*y - x).abs() <= tol * T::one().max(x.abs())) {
                out.push(x);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Poly1<f64>;

    fn values(p: &P) -> Vec<f64> {
        real_roots(p, 1e-10).unwrap().iter().map(|r| r.value).collect()
    }

    #[test]
    fn simple_cases() {
        let v = values(&P::new(vec![-4.0, 0.0, 1.0]));
        assert_eq!(v.len(), 2);
        assert!((v[0] + 2.0).abs() < 1e-13 && (v[1] - 2.0).abs() < 1e-13);
        let v = values(&P::from_roots(&[3.0, 1.0, 2.0]));
        assert_eq!(v.len(), 3);
        for (a, b) in v.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(values(&P::new(vec![1.0, 0.0, 1.0])).is_empty());
        assert_eq!(real_roots(&P::zero(), 1e-10), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn multiplicities() {
        let p = P::from_roots(&[1.0, 1.0, 1.0, -2.0, 4.0, 4.0]);
        let r = real_roots(&p, 1e-10).unwrap();
        let m: Vec<usize> = r.iter().map(|x| x.multiplicity).collect();
        assert_eq!(m, vec![1, 3, 2]);
        assert!((r[1].value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn common_roots() {
        let p = P::from_roots(&[1.0, 5.0]);
        let q = P::from_roots(&[1.0, -2.0]);
        let c = common_real_roots(&p, &q, 1e-9).unwrap();
        assert_eq!(c.len(), 1);
        assert!((c[0] - 1.0).abs() < 1e-12);
        let x2 = P::new(vec![0.0, 0.0, 1.0]);
        let x2p1 = P::new(vec![1.0, 0.0, 1.0]);
        assert!(common_real_roots(&x2, &x2p1, 1e-9).unwrap().is_empty());
        assert_eq!(common_real_roots(&P::zero(), &P::zero(), 1e-9), Err(PolyError::BothZero));
    }
}
