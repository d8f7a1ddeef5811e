//! Hermite reduction: `a = f' + g` with `g` having only simple poles.

use super::gauss::GaussianRational as G;
use super::poly::Poly;
use super::ratfunc::RatFunc;
use super::{FieldElement, FieldError};

/// Solves `s*a + t*b = c` with `deg s < deg b`, assuming `gcd(a, b) = 1`.
fn solve_bezout(a: &Poly, b: &Poly, c: &Poly) -> (Poly, Poly) {
    let (g, s0, _) = a.ext_gcd(b);
    debug_assert!(g.is_one());
    let s = (&s0 * c).rem(b);
    let t = (c - &(&s * a)).exact_div(b);
    (s, t)
}

fn integrate_poly(p: &Poly) -> Poly {
    Poly::new(
        std::iter::once(G::zero())
            .chain(p.coeffs().iter().enumerate().map(|(k, c)| c / &G::from_int(k as i64 + 1)))
            .collect(),
    )
}

/// Splits a rational function `a = f' + g` where `g` is a proper fraction with
/// squarefree denominator. Returns `(f, g)`.
pub fn hermite_split_ratfunc(a: &RatFunc) -> (RatFunc, RatFunc) {
    let (q, mut num) = a.num().div_rem(a.den());
    let mut f = RatFunc::from_poly(integrate_poly(&q));
    let mut den = a.den().clone();
    if num.is_zero() {
        return (f, RatFunc::zero());
    }
    let (_, parts) = den.squarefree_decomposition();
    for (k, v) in parts.iter().enumerate().skip(1) {
        let i = k + 1;
        if v.is_constant() {
            continue;
        }
        let u = den.exact_div(&v.pow(i as u32));
        let uv = &u * &v.derivative();
        for j in (1..i).rev() {
            let jj = G::from_int(j as i64);
            let rhs = num.scale(&(-&jj).inv().unwrap());
            let (b, c) = solve_bezout(&uv, v, &rhs);
            f = &f + &RatFunc::new(b.clone(), v.pow(j as u32));
            num = &(-&c.scale(&jj)) - &(&u * &b.derivative());
        }
        den = &u * v;
    }
    (f, RatFunc::new(num, den))
}

/// Hermite split of a base element over the plain derivation: `a = derive(f) + g`.
pub fn hermite_split(a: &FieldElement) -> Result<(FieldElement, FieldElement), FieldError> {
    if !a.field().is_plain() {
        return Err(FieldError::UnsupportedTwistedDerivation);
    }
    if !a.is_base() {
        return Err(FieldError::UnsupportedRadical);
    }
    let (f, g) = hermite_split_ratfunc(a.a());
    Ok((FieldElement::from_ratfunc(a.field(), f), FieldElement::from_ratfunc(a.field(), g)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(n: &[i64], d: &[i64]) -> RatFunc {
        RatFunc::new(Poly::from_ints(n), Poly::from_ints(d))
    }

    #[test]
    fn splits_simple_example() {
        let (f, g) = hermite_split_ratfunc(&rf(&[1, 0, 1], &[0, 1]));
        assert_eq!(f, rf(&[0, 0, 1], &[2]));
        assert_eq!(g, rf(&[1], &[0, 1]));
    }

    #[test]
    fn removes_double_pole() {
        let (f, g) = hermite_split_ratfunc(&rf(&[1], &[0, 0, 1]));
        assert_eq!(f, rf(&[-1], &[0, 1]));
        assert!(g.is_zero());
    }

    #[test]
    fn reconstructs_high_multiplicity() {
        // (t^2+3) / ((t-1)^3 (t+2)^2 t)
        let den = &(&Poly::from_ints(&[-1, 1]).pow(3) * &Poly::from_ints(&[2, 1]).pow(2)) * &Poly::x();
        let a = RatFunc::new(Poly::from_ints(&[3, 0, 1]), den);
        let (f, g) = hermite_split_ratfunc(&a);
        assert_eq!(&f.derivative() + &g, a);
        assert!(g.den().is_squarefree());
    }
}
