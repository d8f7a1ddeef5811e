//! Rational functions over `Q(i)` in canonical form.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::gauss::GaussianRational as G;
use super::poly::Poly;

/// `num/den` with `gcd(num, den) = 1` and `den` monic. Zero is `0/1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl Default for RatFunc {
    fn default() -> Self {
        Self::zero()
    }
}

impl RatFunc {
    /// Builds `num/den` in canonical form. Panics if `den = 0`.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g), den.exact_div(&g))
        };
        let lc = d.lc();
        if !lc.is_one() {
            let inv = lc.inv().unwrap();
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        Self { num: n, den: d }
    }

    pub fn zero() -> Self {
        Self { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn from_poly(p: Poly) -> Self {
        Self { num: p, den: Poly::one() }
    }

    pub fn constant(c: G) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn x() -> Self {
        Self::from_poly(Poly::x())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The value as a constant when it lies in `Q(i)`.
    pub fn as_constant(&self) -> Option<G> {
        (self.den.is_one() && self.num.is_constant()).then(|| self.num.coeff(0))
    }

    pub fn inv(&self) -> Option<RatFunc> {
        if self.is_zero() {
            return None;
        }
        Some(RatFunc::new(self.den.clone(), self.num.clone()))
    }

    pub fn scale(&self, c: &G) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn derivative(&self) -> RatFunc {
        if self.den.is_one() {
            return RatFunc::from_poly(self.num.derivative());
        }
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFunc::new(n, &self.den * &self.den)
    }

    pub fn pow(&self, e: i32) -> RatFunc {
        if e < 0 {
            return self.inv().expect("negative power of zero").pow(-e);
        }
        RatFunc { num: self.num.pow(e as u32), den: self.den.pow(e as u32) }
    }

    pub fn conj(&self) -> RatFunc {
        RatFunc { num: self.num.conj(), den: self.den.conj() }
    }

    /// Evaluates at a point that is not a pole.
    pub fn eval(&self, x: &G) -> Option<G> {
        let d = self.den.eval(x);
        (!d.is_zero()).then(|| &self.num.eval(x) / &d)
    }

    /// Degree at infinity, `deg num - deg den` (`None` for zero).
    pub fn degree(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.num.deg() - self.den.deg())
    }

    pub fn display_in(&self, var: &str) -> String {
        let n = self.num.display_in(var).to_string();
        if self.den.is_one() {
            return n;
        }
        let n = if self.num.coeffs().iter().filter(|c| !c.is_zero()).count() > 1
            || !self.num.lc().is_real()
        {
            format!("({n})")
        } else {
            n
        };
        let d = self.den.display_in(var).to_string();
        let single_factor = self.den.coeffs().iter().filter(|c| !c.is_zero()).count() == 1
            && self.den.lc().is_one();
        if single_factor {
            format!("{n}/{d}")
        } else {
            format!("{n}/({d})")
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_in("t"))
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, o: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return RatFunc::new(&self.num + &o.num, self.den.clone());
        }
        let g = self.den.gcd(&o.den);
        let a = self.den.exact_div(&g);
        let b = o.den.exact_div(&g);
        let num = &(&self.num * &b) + &(&o.num * &a);
        RatFunc::new(num, &a * &o.den)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, o: &RatFunc) -> RatFunc {
        self + &(-o)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero();
        }
        // cross-cancel before multiplying to keep degrees small
        let g1 = self.num.gcd(&o.den);
        let g2 = o.num.gcd(&self.den);
        let n1 = self.num.exact_div(&g1);
        let d2 = o.den.exact_div(&g1);
        let n2 = o.num.exact_div(&g2);
        let d1 = self.den.exact_div(&g2);
        let num = &n1 * &n2;
        let den = &d1 * &d2;
        let lc = den.lc();
        if lc.is_one() {
            RatFunc { num, den }
        } else {
            let inv = lc.inv().unwrap();
            RatFunc { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    /// Panics on division by zero.
    fn div(self, o: &RatFunc) -> RatFunc {
        self * &o.inv().expect("rational function division by zero")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RatFunc {
            type Output = RatFunc;
            fn $m(self, o: RatFunc) -> RatFunc {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> Self {
        Self::from_poly(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> RatFunc {
        RatFunc::x()
    }

    #[test]
    fn canonical_form_reduces() {
        let r = RatFunc::new(Poly::from_ints(&[0, 2]), Poly::from_ints(&[0, 0, 4]));
        assert_eq!(r.num(), &Poly::from_ints(&[1]).scale(&G::from_ratio(1, 2)));
        assert_eq!(r.den(), &Poly::x());
    }

    #[test]
    fn quotient_rule() {
        let r = &RatFunc::one() / &t();
        assert_eq!(r.derivative(), -&(&RatFunc::one() / &(&t() * &t())));
    }

    #[test]
    fn cancellation() {
        let a = &RatFunc::one() / &t();
        assert!((&a - &a).is_zero());
    }
}
