//! The coefficient field `K = Q(i)(t)[sqrt(D)]` with derivation `w * d/dt`.

mod gauss;
mod hermite;
mod poly;
mod ratfunc;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

pub use gauss::GaussianRational;
pub use hermite::hermite_split;
pub use poly::{gcd_free_basis, multiplicity, Poly};
pub use ratfunc::RatFunc;

pub use gauss::ratio_to_f64;

use GaussianRational as G;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("unsupported extension: {0}")]
    UnsupportedExtension(String),
    #[error("operation requires the plain derivation d/dt")]
    UnsupportedTwistedDerivation,
    #[error("operation requires an element without radical part")]
    UnsupportedRadical,
}

/// Writes `p = s * c^2` with `s` squarefree.
pub fn squarefree_part(p: &Poly) -> Result<(Poly, Poly), FieldError> {
    if p.is_zero() {
        return Err(FieldError::ZeroPolynomial);
    }
    let (lc, parts) = p.squarefree_decomposition();
    let mut s = Poly::constant(lc);
    let mut c = Poly::one();
    for (k, f) in parts.iter().enumerate() {
        let m = k as u32 + 1;
        if m % 2 == 1 {
            s = &s * f;
        }
        if m >= 2 {
            c = &c * &f.pow(m / 2);
        }
    }
    Ok((s, c))
}

/// Square root of a Gaussian rational when it is of the form `q` or `q*i` with `q`
/// rational (enough for constants arising from squarefree parts).
fn sqrt_in_q_i(x: &G) -> Option<G> {
    fn sqrt_pos(r: &BigRational) -> Option<BigRational> {
        let n = r.numer().sqrt();
        let d = r.denom().sqrt();
        (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
    }
    let r = x.as_rational()?;
    if r.is_zero() {
        return Some(G::zero());
    }
    if r.is_positive() {
        sqrt_pos(r).map(G::from_rational)
    } else {
        sqrt_pos(&-r).map(|q| G::new(BigRational::zero(), q))
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Extension {
    /// `D` as given by the user; `sqrtD` in the grammar means its square root.
    raw: Poly,
    /// Squarefree part `s`, the polynomial actually adjoined.
    s: Poly,
    /// Cofactor with `raw = s * c^2`.
    c: Poly,
    /// `s' / (2 s)`.
    half_log_deriv: RatFunc,
}

/// Field descriptor: variable name, optional quadratic extension, derivation weight.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Field {
    var: String,
    ext: Option<Extension>,
    /// Twisted derivation `w * d/dt` with `w = weight.0 + weight.1 * sqrt(s)`.
    weight: (RatFunc, RatFunc),
    /// `sqrtD` expressed in canonical coordinates when the user's `D` is a perfect
    /// square (no genuine extension).
    sqrt_raw_rational: Option<RatFunc>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({}", self.var)?;
        if let Some(e) = &self.ext {
            write!(f, ", D={}", e.raw.display_in(&self.var))?;
        }
        write!(f, ")")
    }
}

impl Field {
    /// `Q(i)(var)` with the plain derivation.
    pub fn rational(var: &str) -> Arc<Field> {
        Arc::new(Field {
            var: var.to_string(),
            ext: None,
            weight: (RatFunc::one(), RatFunc::zero()),
            sqrt_raw_rational: None,
        })
    }

    /// `Q(i)(var)[sqrt(D)]` with the plain derivation; `D` is canonicalized to its
    /// squarefree part.
    pub fn with_extension(var: &str, d: &Poly) -> Result<Arc<Field>, FieldError> {
        let (s, c) = squarefree_part(d)?;
        if s.is_constant() {
            let root = sqrt_in_q_i(&s.coeff(0)).ok_or_else(|| {
                FieldError::UnsupportedExtension(format!(
                    "{} is a constant multiple of a square by a non-square constant",
                    d.display_in(var)
                ))
            })?;
            return Ok(Arc::new(Field {
                var: var.to_string(),
                ext: None,
                weight: (RatFunc::one(), RatFunc::zero()),
                sqrt_raw_rational: Some(RatFunc::from_poly(c.scale(&root))),
            }));
        }
        let half_log_deriv = &RatFunc::from_poly(s.derivative())
            / &RatFunc::from_poly(s.scale(&G::from_int(2)));
        Ok(Arc::new(Field {
            var: var.to_string(),
            ext: Some(Extension { raw: d.clone(), s, c, half_log_deriv }),
            weight: (RatFunc::one(), RatFunc::zero()),
            sqrt_raw_rational: None,
        }))
    }

    /// Same field with derivation `w * d/dt`. `w` must be a nonzero element of `self`.
    pub fn with_weight(self: &Arc<Self>, w: &FieldElement) -> Result<Arc<Field>, FieldError> {
        if !self.same(&w.field) {
            return Err(FieldError::MixedFields);
        }
        if w.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let mut f = (**self).clone();
        f.weight = (w.a.clone(), w.b.clone());
        Ok(Arc::new(f))
    }

    /// Same field with the plain derivation `d/dt`.
    pub fn plain(self: &Arc<Self>) -> Arc<Field> {
        if self.is_plain() {
            return self.clone();
        }
        let mut f = (**self).clone();
        f.weight = (RatFunc::one(), RatFunc::zero());
        Arc::new(f)
    }

    /// Same constants and derivation, without the extension.
    pub fn base(self: &Arc<Self>) -> Arc<Field> {
        if self.ext.is_none() {
            return self.clone();
        }
        Field::rational(&self.var)
    }

    pub fn same(&self, other: &Field) -> bool {
        std::ptr::eq(self, other) || self == other
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn has_extension(&self) -> bool {
        self.ext.is_some()
    }

    /// The user's `D` (before canonicalization).
    pub fn raw_extension(&self) -> Option<&Poly> {
        self.ext.as_ref().map(|e| &e.raw)
    }

    /// The squarefree polynomial `s` with `K = Q(i)(t)[sqrt(s)]`.
    pub fn radicand(&self) -> Option<&Poly> {
        self.ext.as_ref().map(|e| &e.s)
    }

    /// Cofactor `c` with `D = s c^2`.
    pub fn radical_cofactor(&self) -> Option<&Poly> {
        self.ext.as_ref().map(|e| &e.c)
    }

    /// `s'/(2s)`, the logarithmic derivative of `sqrt(s)` for `d/dt`.
    pub fn half_log_deriv(&self) -> Option<&RatFunc> {
        self.ext.as_ref().map(|e| &e.half_log_deriv)
    }

    pub fn is_plain(&self) -> bool {
        self.weight.0.is_one() && self.weight.1.is_zero()
    }

    pub fn weight(self: &Arc<Self>) -> FieldElement {
        FieldElement::from_parts(self, self.weight.0.clone(), self.weight.1.clone())
    }
}

/// An element `a + b*sqrt(s)` of a [`Field`].
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<Field>,
    a: RatFunc,
    b: RatFunc,
}

impl PartialEq for FieldElement {
    fn eq(&self, o: &Self) -> bool {
        self.field.same(&o.field) && self.a == o.a && self.b == o.b
    }
}

impl Eq for FieldElement {}

impl FieldElement {
    /// Panics if `b != 0` for a field without extension.
    pub fn from_parts(field: &Arc<Field>, a: RatFunc, b: RatFunc) -> Self {
        assert!(field.ext.is_some() || b.is_zero(), "radical part in a field without extension");
        Self { field: field.clone(), a, b }
    }

    pub fn from_ratfunc(field: &Arc<Field>, a: RatFunc) -> Self {
        Self::from_parts(field, a, RatFunc::zero())
    }

    pub fn from_poly(field: &Arc<Field>, p: Poly) -> Self {
        Self::from_ratfunc(field, RatFunc::from_poly(p))
    }

    pub fn zero(field: &Arc<Field>) -> Self {
        Self::from_ratfunc(field, RatFunc::zero())
    }

    pub fn one(field: &Arc<Field>) -> Self {
        Self::from_ratfunc(field, RatFunc::one())
    }

    pub fn constant(field: &Arc<Field>, c: G) -> Self {
        Self::from_ratfunc(field, RatFunc::constant(c))
    }

    pub fn int(field: &Arc<Field>, n: i64) -> Self {
        Self::constant(field, G::from_int(n))
    }

    /// The field variable `t`.
    pub fn var(field: &Arc<Field>) -> Self {
        Self::from_ratfunc(field, RatFunc::x())
    }

    /// `sqrt(s)` for the canonical radicand `s`. Panics without extension.
    pub fn sqrt_radicand(field: &Arc<Field>) -> Self {
        assert!(field.ext.is_some(), "field has no extension");
        Self::from_parts(field, RatFunc::zero(), RatFunc::one())
    }

    /// `sqrt(D)` for the user's `D`, i.e. `c * sqrt(s)`.
    pub fn sqrt_d(field: &Arc<Field>) -> Option<Self> {
        if let Some(r) = &field.sqrt_raw_rational {
            return Some(Self::from_ratfunc(field, r.clone()));
        }
        let e = field.ext.as_ref()?;
        Some(Self::from_parts(field, RatFunc::zero(), RatFunc::from_poly(e.c.clone())))
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    /// Rational part `a`.
    pub fn a(&self) -> &RatFunc {
        &self.a
    }

    /// Radical coefficient `b` (of `sqrt(s)`).
    pub fn b(&self) -> &RatFunc {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    /// True when the radical part vanishes.
    pub fn is_base(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_constant(&self) -> Option<G> {
        if self.b.is_zero() {
            self.a.as_constant()
        } else {
            None
        }
    }

    /// The same value viewed in another field with the same extension.
    pub fn rebase(&self, field: &Arc<Field>) -> Result<Self, FieldError> {
        if self.field.ext != field.ext {
            return Err(FieldError::MixedFields);
        }
        Ok(Self { field: field.clone(), a: self.a.clone(), b: self.b.clone() })
    }

    /// Galois conjugation `sqrt(s) -> -sqrt(s)`.
    pub fn conj(&self) -> Self {
        Self { field: self.field.clone(), a: self.a.clone(), b: -&self.b }
    }

    /// Complex conjugation of all constants.
    pub fn complex_conj(&self) -> Self {
        Self { field: self.field.clone(), a: self.a.conj(), b: self.b.conj() }
    }

    /// `a^2 - b^2 s`, the norm down to `Q(i)(t)`.
    pub fn norm(&self) -> RatFunc {
        match &self.field.ext {
            None => &self.a * &self.a,
            Some(e) => {
                &(&self.a * &self.a) - &(&(&self.b * &self.b) * &RatFunc::from_poly(e.s.clone()))
            }
        }
    }

    pub fn scale(&self, c: &G) -> Self {
        Self { field: self.field.clone(), a: self.a.scale(c), b: self.b.scale(c) }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, FieldError> {
        self.check(o)?;
        Ok(Self { field: self.field.clone(), a: &self.a + &o.a, b: &self.b + &o.b })
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self, FieldError> {
        self.check(o)?;
        Ok(Self { field: self.field.clone(), a: &self.a - &o.a, b: &self.b - &o.b })
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self, FieldError> {
        self.check(o)?;
        Ok(self.mul_unchecked(o))
    }

    pub fn try_div(&self, o: &Self) -> Result<Self, FieldError> {
        self.check(o)?;
        let inv = o.inv().ok_or(FieldError::DivisionByZero)?;
        Ok(self.mul_unchecked(&inv))
    }

    fn check(&self, o: &Self) -> Result<(), FieldError> {
        if self.field.same(&o.field) {
            Ok(())
        } else {
            Err(FieldError::MixedFields)
        }
    }

    fn mul_unchecked(&self, o: &Self) -> Self {
        let (a, b) = match &self.field.ext {
            None => (&self.a * &o.a, RatFunc::zero()),
            Some(e) => {
                if self.b.is_zero() {
                    (&self.a * &o.a, &self.a * &o.b)
                } else if o.b.is_zero() {
                    (&self.a * &o.a, &self.b * &o.a)
                } else {
                    let s = RatFunc::from_poly(e.s.clone());
                    (
                        &(&self.a * &o.a) + &(&(&self.b * &o.b) * &s),
                        &(&self.a * &o.b) + &(&self.b * &o.a),
                    )
                }
            }
        };
        Self { field: self.field.clone(), a, b }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.b.is_zero() {
            return Some(Self { field: self.field.clone(), a: self.a.inv()?, b: RatFunc::zero() });
        }
        let n = self.norm().inv()?;
        Some(Self { field: self.field.clone(), a: &self.a * &n, b: -&(&self.b * &n) })
    }

    pub fn pow(&self, e: i32) -> Self {
        if e < 0 {
            return self.inv().expect("negative power of zero").pow(-e);
        }
        let mut acc = Self::one(&self.field);
        let mut base = self.clone();
        let mut e = e as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Derivative with respect to `t`, ignoring the field's weight.
    pub fn derive_plain(&self) -> Self {
        let da = self.a.derivative();
        let db = match &self.field.ext {
            Some(e) if !self.b.is_zero() => &self.b.derivative() + &(&self.b * &e.half_log_deriv),
            _ => RatFunc::zero(),
        };
        Self { field: self.field.clone(), a: da, b: db }
    }

    /// The field derivation `w * d/dt`.
    pub fn derive(&self) -> Self {
        let d = self.derive_plain();
        if self.field.is_plain() {
            return d;
        }
        self.field.weight().mul_unchecked(&d)
    }

    /// Value at a point `t = x` for base elements (no radical part).
    pub fn eval_base(&self, x: &G) -> Option<G> {
        if !self.b.is_zero() {
            return None;
        }
        self.a.eval(x)
    }

    /// Serializes in the expression grammar (`sqrtD` is the user's square root).
    pub fn to_expr_string(&self) -> String {
        let var = &self.field.var;
        if self.b.is_zero() {
            return self.a.display_in(var);
        }
        let c = &self.field.ext.as_ref().unwrap().c;
        let coef = &self.b / &RatFunc::from_poly(c.clone());
        let term = if coef.is_one() {
            "sqrtD".to_string()
        } else if (-&coef).is_one() {
            "-sqrtD".to_string()
        } else {
            format!("({})*sqrtD", coef.display_in(var))
        };
        if self.a.is_zero() {
            return term;
        }
        let a = self.a.display_in(var);
        if term.starts_with('-') {
            format!("{a}{term}")
        } else {
            format!("{a}+{term}")
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr_string())
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr_string())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl $tr for &FieldElement {
            type Output = FieldElement;
            /// Panics on mixed fields (and on division by zero for `/`).
            fn $m(self, o: &FieldElement) -> FieldElement {
                self.$try(o).unwrap_or_else(|e| panic!("field arithmetic: {e}"))
            }
        }
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $m(self, o: FieldElement) -> FieldElement {
                (&self).$m(&o)
            }
        }
        impl $tr<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, o: &FieldElement) -> FieldElement {
                (&self).$m(o)
            }
        }
    };
}
binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);
binop!(Div, div, try_div);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { field: self.field.clone(), a: -&self.a, b: -&self.b }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}
