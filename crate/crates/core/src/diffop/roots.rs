//! Rational roots of polynomials over `Q(i)`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::field::{multiplicity, GaussianRational as G, Poly};

/// Bound on `d(a_0) * d(a_n)` below which divisor candidates are enumerated.
const DIVISOR_PAIRS_LIMIT: usize = 20_000;

/// Distinct rational roots with multiplicities, sorted increasingly.
pub fn rational_roots(p: &Poly) -> Vec<(BigRational, usize)> {
    if p.is_zero() || p.is_constant() {
        return Vec::new();
    }
    let m = p.monic();
    let g = m.real_part().gcd(&m.imag_part());
    if g.is_constant() {
        return Vec::new();
    }
    let k = g.squarefree_kernel();
    let ints = k.to_primitive_integer().expect("real part has rational coefficients");
    let mut roots = integer_poly_roots(&ints);
    roots.sort();
    roots
        .into_iter()
        .map(|r| {
            let lin = Poly::new(vec![-G::from_rational(r.clone()), G::one()]);
            let mult = multiplicity(p, &lin) as usize;
            (r, mult)
        })
        .collect()
}

/// `q^n f(p/q)` for `f` with integer coefficients.
fn eval_homogeneous(a: &[BigInt], num: &BigInt, den: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    let mut qpow = BigInt::one();
    // Horner in p with q-powers accumulated from the top
    for c in a.iter().rev() {
        acc = acc * num + c * &qpow;
        qpow *= den;
    }
    acc
}

fn is_root(a: &[BigInt], r: &BigRational) -> bool {
    eval_homogeneous(a, r.numer(), r.denom()).is_zero()
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64()?;
    if n > 1_000_000_000_000 {
        return None;
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(BigInt::from(d));
            if d * d != n {
                large.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Some(small)
}

/// Rational roots of a squarefree integer polynomial (coefficients low to high).
fn integer_poly_roots(a: &[BigInt]) -> Vec<BigRational> {
    let mut a = a.to_vec();
    let mut out = Vec::new();
    if a[0].is_zero() {
        out.push(BigRational::zero());
        let lead = a.iter().position(|c| !c.is_zero()).unwrap();
        a.drain(..lead);
    }
    if a.len() <= 1 {
        return out;
    }
    if a.len() == 2 {
        out.push(BigRational::new(-a[0].clone(), a[1].clone()));
        return out;
    }
    let a0 = a[0].clone();
    let an = a.last().unwrap().clone();
    let mut found: Vec<BigRational> = Vec::new();
    match (divisors(&a0), divisors(&an)) {
        (Some(ps), Some(qs)) if ps.len() * qs.len() <= DIVISOR_PAIRS_LIMIT => {
            for q in &qs {
                for p in &ps {
                    if !p.gcd(q).is_one() {
                        continue;
                    }
                    for s in [p.clone(), -p.clone()] {
                        let r = BigRational::new(s, q.clone());
                        if is_root(&a, &r) {
                            found.push(r);
                        }
                    }
                }
            }
        }
        _ => found = numeric_candidates(&a),
    }
    out.extend(found);
    out
}

/// Roots found through floating-point root approximation followed by exact checks.
fn numeric_candidates(a: &[BigInt]) -> Vec<BigRational> {
    let a0 = &a[0];
    let an = a.last().unwrap();
    let mut out: Vec<BigRational> = Vec::new();
    for z in approximate_roots(a) {
        if z.im.abs() > 1e-4 * (1.0 + z.re.abs()) || !z.re.is_finite() {
            continue;
        }
        for r in convergents(z.re, an) {
            if r.is_zero() || out.contains(&r) {
                continue;
            }
            if (a0 % r.numer()).is_zero() && (an % r.denom()).is_zero() && is_root(a, &r) {
                out.push(r);
                break;
            }
        }
    }
    out
}

/// Continued-fraction convergents of `x` with denominators up to `|max_den|`.
fn convergents(x: f64, max_den: &BigInt) -> Vec<BigRational> {
    let limit = max_den.abs();
    let mut out = Vec::new();
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut y = x;
    for _ in 0..64 {
        let fl = y.floor();
        let ai = BigInt::from(fl as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        if k2 > limit {
            break;
        }
        out.push(BigRational::new(h2.clone(), k2.clone()));
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = y - fl;
        if frac.abs() < 1e-12 {
            break;
        }
        y = 1.0 / frac;
    }
    out
}

/// Simultaneous approximation of all complex roots (Aberth iteration).
fn approximate_roots(a: &[BigInt]) -> Vec<Complex64> {
    let n = a.len() - 1;
    let maxbits = a.iter().map(|c| c.bits()).max().unwrap_or(0) as i32;
    let shift = (maxbits - 60).max(0);
    let c: Vec<f64> = a
        .iter()
        .map(|x| {
            let r = BigRational::new(x.clone(), BigInt::one() << shift as usize);
            r.to_f64().unwrap_or(0.0)
        })
        .collect();
    let lead = c[n];
    let c: Vec<f64> = c.iter().map(|x| x / lead).collect();
    // Cauchy bound for the initial circle
    let radius = 1.0 + c[..n].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64))
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(c[n], 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for k in (0..n).rev() {
            dp = dp * x + p;
            p = p * x + c[k];
        }
        (p, dp)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j])).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}
