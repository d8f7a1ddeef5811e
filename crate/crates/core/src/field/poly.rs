//! Dense univariate polynomials over `Q(i)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::gauss::GaussianRational as G;

/// Coefficients are stored by increasing degree; the leading coefficient is nonzero
/// unless the polynomial is zero (empty coefficient vector).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<G>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<G>) -> Self {
        while coeffs.last().is_some_and(G::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(G::one())
    }

    pub fn constant(c: G) -> Self {
        Self::new(vec![c])
    }

    /// The indeterminate `t`.
    pub fn x() -> Self {
        Self::monomial(G::one(), 1)
    }

    pub fn monomial(c: G, k: usize) -> Self {
        let mut v = vec![G::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&n| G::from_int(n)).collect())
    }

    pub fn coeffs(&self) -> &[G] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> G {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the convention `deg 0 = -1`.
    pub fn deg(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn lc(&self) -> G {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn scale(&self, c: &G) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = self.lc().inv().unwrap();
        self.scale(&inv)
    }

    pub fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![G::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Poly::new(v)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &G::from_int(k as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &G) -> G {
        let mut acc = G::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// Substitutes `t -> t + c`.
    pub fn taylor_shift(&self, c: &G) -> Poly {
        let mut acc = Poly::zero();
        let lin = Poly::new(vec![c.clone(), G::one()]);
        for a in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &Poly::constant(a.clone());
        }
        acc
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
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

    pub fn conj(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(G::conj).collect())
    }

    pub fn real_part(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| G::from_rational(c.re.clone())).collect())
    }

    pub fn imag_part(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| G::from_rational(c.im.clone())).collect())
    }

    /// Euclidean division `self = q*d + r` with `deg r < deg d`. Panics if `d = 0`.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut r = self.coeffs.clone();
        let lc_inv = d.lc().inv().unwrap();
        let mut q = vec![G::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &lc_inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    let s = &c * dc;
                    r[k + j] -= &s;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    /// Exact quotient; panics (debug) when the division leaves a remainder.
    pub fn exact_div(&self, d: &Poly) -> Poly {
        let (q, r) = self.div_rem(d);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.rem(self).is_zero()
    }

    /// Monic gcd (zero only when both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn ext_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s2 = &s0 - &(&q * &s1);
            let t2 = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.lc().inv().unwrap();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Inverse of `self` modulo `m`, if it exists.
    pub fn inv_mod(&self, m: &Poly) -> Option<Poly> {
        let (g, s, _) = self.rem(m).ext_gcd(m);
        g.is_one().then(|| s.rem(m))
    }

    pub fn lcm(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        (self * other).exact_div(&self.gcd(other)).monic()
    }

    /// Yun's squarefree decomposition: returns `(c, [f1, f2, ...])` with
    /// `self = c * f1 * f2^2 * ...`, every `fi` monic and squarefree, pairwise coprime.
    pub fn squarefree_decomposition(&self) -> (G, Vec<Poly>) {
        assert!(!self.is_zero());
        let c = self.lc();
        let f = self.monic();
        if f.is_constant() {
            return (c, Vec::new());
        }
        let mut out = Vec::new();
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.exact_div(&a0);
        let mut cc = fp.exact_div(&a0);
        let mut d = &cc - &b.derivative();
        loop {
            let a = b.gcd(&d);
            out.push(a.clone());
            b = b.exact_div(&a);
            if b.is_constant() {
                break;
            }
            cc = d.exact_div(&a);
            d = &cc - &b.derivative();
        }
        while out.last().is_some_and(Poly::is_constant) {
            out.pop();
        }
        (c, out)
    }

    /// Monic squarefree part (product of the distinct monic irreducible factors).
    pub fn squarefree_kernel(&self) -> Poly {
        if self.is_constant() {
            return Poly::one();
        }
        self.monic().exact_div(&self.gcd(&self.derivative())).monic()
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).is_constant()
    }

    /// Resultant over `Q(i)` via the Euclidean remainder sequence.
    pub fn resultant(&self, other: &Poly) -> G {
        if self.is_zero() || other.is_zero() {
            return G::zero();
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        let mut acc = G::one();
        loop {
            let (da, db) = (a.deg(), b.deg());
            if db == 0 {
                return &acc * &b.lc().pow(da as u32);
            }
            let r = a.rem(&b);
            if r.is_zero() {
                return G::zero();
            }
            let dr = r.deg();
            if (da * db) % 2 == 1 {
                acc = -acc;
            }
            acc = &acc * &b.lc().pow((da - dr) as u32);
            a = b;
            b = r;
        }
    }

    /// Returns the coefficient vector scaled to a primitive integer polynomial (for
    /// rational-coefficient input); `None` when a coefficient is non-real.
    pub fn to_primitive_integer(&self) -> Option<Vec<BigInt>> {
        use num_integer::Integer;
        if self.coeffs.iter().any(|c| !c.is_real()) {
            return None;
        }
        let mut den = BigInt::one();
        for c in &self.coeffs {
            den = den.lcm(c.re.denom());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (&c.re * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        let mut g = BigInt::zero();
        for n in &ints {
            g = g.gcd(n);
        }
        if g.is_zero() {
            return Some(ints);
        }
        Some(ints.into_iter().map(|n| n / &g).collect())
    }

    pub fn display_in<'a>(&'a self, var: &'a str) -> PolyDisplay<'a> {
        PolyDisplay { p: self, var }
    }
}

pub struct PolyDisplay<'a> {
    p: &'a Poly,
    var: &'a str,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.p.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            // leading sign of real or purely imaginary coefficients
            let negative = if c.re.is_zero() { c.im < BigRational::zero() } else { c.im.is_zero() && c.re < BigRational::zero() };
            let mag = if negative { -c } else { c.clone() };
            if negative {
                write!(f, "-")?;
            } else if !first {
                write!(f, "+")?;
            }
            first = false;
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    write!(f, "{}", self.var)?;
                    if k > 1 {
                        write!(f, "^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_in("t"))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for k in 0..n {
            match (self.coeffs.get(k), o.coeffs.get(k)) {
                (Some(a), Some(b)) => v.push(a + b),
                (Some(a), None) => v.push(a.clone()),
                (None, Some(b)) => v.push(b.clone()),
                (None, None) => unreachable!(),
            }
        }
        Poly::new(v)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![G::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    v[i + j] += &(a * b);
                }
            }
        }
        Poly::new(v)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, o: Poly) -> Poly {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Splits a family of polynomials into a gcd-free basis: pairwise coprime monic
/// squarefree polynomials such that every input is, up to a constant, a product of
/// powers of basis elements.
pub fn gcd_free_basis(inputs: &[Poly]) -> Vec<Poly> {
    let mut basis: Vec<Poly> = Vec::new();
    for p in inputs {
        if p.is_constant() {
            continue;
        }
        let (_, parts) = p.squarefree_decomposition();
        for part in parts.into_iter().filter(|q| !q.is_constant()) {
            let mut pending = vec![part];
            while let Some(mut q) = pending.pop() {
                let mut i = 0;
                while i < basis.len() && !q.is_constant() {
                    let g = q.gcd(&basis[i]);
                    if g.is_constant() {
                        i += 1;
                        continue;
                    }
                    let b = basis.swap_remove(i);
                    let b_rest = b.exact_div(&g).monic();
                    q = q.exact_div(&g).monic();
                    if !b_rest.is_constant() {
                        pending.push(b_rest);
                    }
                    pending.push(g);
                    i = 0;
                }
                if !q.is_constant() {
                    basis.push(q);
                }
            }
        }
    }
    basis.sort_by(|a, b| a.deg().cmp(&b.deg()).then_with(|| format!("{a:?}").cmp(&format!("{b:?}"))));
    basis
}

/// Multiplicity of the squarefree `q` in `p` (`p != 0`).
pub fn multiplicity(p: &Poly, q: &Poly) -> u32 {
    let mut k = 0;
    let mut cur = p.clone();
    loop {
        let (quo, r) = cur.div_rem(q);
        if !r.is_zero() {
            return k;
        }
        cur = quo;
        k += 1;
    }
}
