//! Local exponents at finite singular places and at infinity.

use std::fmt;

use num_rational::BigRational;

use super::roots::rational_roots;
use super::{DiffOp, DiffOpError};
use crate::field::{gcd_free_basis, multiplicity, GaussianRational as G, Poly, RatFunc};

#[derive(Clone, PartialEq, Eq)]
pub enum SingularPoint {
    /// The roots of a monic squarefree polynomial.
    Finite(Poly),
    Infinity,
}

impl SingularPoint {
    pub fn display_in(&self, var: &str) -> String {
        match self {
            SingularPoint::Finite(q) => q.display_in(var).to_string(),
            SingularPoint::Infinity => "infinity".to_string(),
        }
    }
}

impl fmt::Debug for SingularPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_in("t"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalExponents {
    pub point: SingularPoint,
    /// Rational exponents counted with multiplicity, increasing.
    pub exponents: Vec<BigRational>,
    /// Degree of the indicial polynomial.
    pub indicial_degree: usize,
    /// Number of exponents (with multiplicity) that are not rational.
    pub irrational: usize,
    /// Fuchs condition: the indicial polynomial has full degree.
    pub regular: bool,
}

impl LocalExponents {
    pub fn integer_exponents(&self) -> Vec<i64> {
        self.exponents.iter().filter(|e| e.is_integer()).map(|e| e.to_integer().try_into().unwrap_or(i64::MAX)).collect()
    }

    pub fn exponent_strings(&self) -> Vec<String> {
        self.exponents.iter().map(|e| e.to_string()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentReport {
    pub order: usize,
    /// Finite singular places first, infinity last.
    pub points: Vec<LocalExponents>,
}

impl ExponentReport {
    pub fn at(&self, q: &Poly) -> Option<&LocalExponents> {
        let q = q.monic();
        self.points.iter().find(|p| p.point == SingularPoint::Finite(q.clone()))
    }

    pub fn at_infinity(&self) -> &LocalExponents {
        self.points.last().expect("report always contains infinity")
    }

    pub fn is_fuchsian(&self) -> bool {
        self.points.iter().all(|p| p.regular)
    }
}

/// Coefficients of a base operator over the plain field, cleared to polynomials
/// without common content.
pub(crate) fn polynomial_coefficients(op: &DiffOp) -> Vec<Poly> {
    let parts: Vec<&RatFunc> = op.coeffs().iter().map(|c| c.a()).collect();
    let mut den = Poly::one();
    for p in &parts {
        den = den.lcm(p.den());
    }
    let polys: Vec<Poly> = parts.iter().map(|p| p.num() * &den.exact_div(p.den())).collect();
    let mut g = Poly::zero();
    for p in &polys {
        g = g.gcd(p);
    }
    polys.iter().map(|p| p.exact_div(&g)).collect()
}

/// Falling factorial `r (r - 1) ... (r - j + 1)` as a polynomial in `r`.
pub(crate) fn falling(j: usize) -> Poly {
    let mut acc = Poly::one();
    for k in 0..j {
        acc = &acc * &Poly::new(vec![G::from_int(-(k as i64)), G::one()]);
    }
    acc
}

fn from_roots(point: SingularPoint, indicial: &Poly, weight: usize, negate: bool, regular: bool) -> LocalExponents {
    let roots = rational_roots(indicial);
    let divisible = roots.iter().all(|(_, m)| m % weight == 0);
    let mut exponents = Vec::new();
    for (r, m) in roots {
        let m = if divisible { m / weight } else { m };
        let r = if negate { -r } else { r };
        exponents.extend(std::iter::repeat_n(r, m));
    }
    exponents.sort();
    let degree = indicial.degree().unwrap_or(0) / weight.max(1);
    LocalExponents {
        point,
        irrational: degree.saturating_sub(exponents.len()),
        exponents,
        indicial_degree: degree,
        regular,
    }
}

/// Indicial data at the roots of a monic squarefree `q` on which every nonzero
/// coefficient has uniform valuation.
fn at_factor(p: &[Poly], q: &Poly) -> LocalExponents {
    let n = p.len() - 1;
    let vals: Vec<Option<i64>> =
        p.iter().map(|c| (!c.is_zero()).then(|| multiplicity(c, q) as i64)).collect();
    let mu = vals.iter().enumerate().filter_map(|(j, v)| v.map(|v| v - j as i64)).min().unwrap();
    let dq = q.derivative();
    let mut terms: Vec<(usize, Poly)> = Vec::new();
    for (j, v) in vals.iter().enumerate() {
        if let Some(v) = v {
            if v - j as i64 == mu {
                let g = p[j].exact_div(&q.pow(*v as u32));
                let c = (&g * &dq.pow(*v as u32)).rem(q);
                terms.push((j, c));
            }
        }
    }
    let top = terms.iter().map(|(j, _)| *j).max().unwrap();
    let regular = top == n;
    let point = SingularPoint::Finite(q.clone());
    if terms.iter().all(|(_, c)| c.is_constant()) {
        let mut ind = Poly::zero();
        for (j, c) in &terms {
            ind = &ind + &falling(*j).scale(&c.coeff(0));
        }
        return from_roots(point, &ind, 1, false, regular);
    }
    // resultant in t of q and the indicial polynomial, interpolated in r
    let dq_deg = q.degree().unwrap();
    let deg = top * dq_deg;
    let xs: Vec<G> = (0..=deg as i64).map(G::from_int).collect();
    let ys: Vec<G> = xs
        .iter()
        .map(|r| {
            let mut acc = Poly::zero();
            for (j, c) in &terms {
                acc = &acc + &c.scale(&falling(*j).eval(r));
            }
            q.resultant(&acc)
        })
        .collect();
    let res = interpolate(&xs, &ys);
    from_roots(point, &res, dq_deg, false, regular)
}

fn interpolate(xs: &[G], ys: &[G]) -> Poly {
    let mut acc = Poly::zero();
    for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
        if yi.is_zero() {
            continue;
        }
        let mut basis = Poly::one();
        let mut den = G::one();
        for (j, xj) in xs.iter().enumerate() {
            if i != j {
                basis = &basis * &Poly::new(vec![-xj, G::one()]);
                den = &den * &(xi - xj);
            }
        }
        acc = &acc + &basis.scale(&(yi * &den.inv().unwrap()));
    }
    acc
}

fn at_infinity(p: &[Poly]) -> LocalExponents {
    let n = p.len() - 1;
    let nu = p.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(j, c)| c.deg() - j as i64).max().unwrap();
    let mut ind = Poly::zero();
    let mut top = 0;
    for (j, c) in p.iter().enumerate() {
        if !c.is_zero() && c.deg() - j as i64 == nu {
            ind = &ind + &falling(j).scale(&c.lc());
            top = j;
        }
    }
    from_roots(SingularPoint::Infinity, &ind, 1, true, top == n)
}

/// Operator with coefficients in `Q(i)(t)` and the plain derivation; for radical
/// coefficients the LCLM with the conjugate operator is used.
fn base_form(op: &DiffOp) -> Result<DiffOp, DiffOpError> {
    let plain = op.to_plain();
    if plain.is_base() {
        return Ok(plain);
    }
    let m = plain.lclm(&plain.sigma())?;
    if !m.is_base() {
        return Err(DiffOpError::Field(crate::field::FieldError::UnsupportedRadical));
    }
    Ok(m)
}

/// Local exponents of `op` at every finite singular place and at infinity.
pub fn local_exponents(op: &DiffOp) -> Result<ExponentReport, DiffOpError> {
    let base = base_form(op)?;
    let order = base.order().ok_or(DiffOpError::ZeroDivisor)?;
    let p = polynomial_coefficients(&base);
    let nonzero: Vec<Poly> = p.iter().filter(|c| !c.is_zero()).cloned().collect();
    let mut points = Vec::new();
    for q in gcd_free_basis(&nonzero) {
        if q.divides(&p[order]) {
            points.push(at_factor(&p, &q));
        }
    }
    points.push(at_infinity(&p));
    Ok(ExponentReport { order, points })
}

/// Local exponents at the roots of `q`, singular or not. When the coefficients do
/// not have uniform valuation along `q`, the data of the pieces is merged.
pub fn exponents_at(op: &DiffOp, q: &Poly) -> Result<LocalExponents, DiffOpError> {
    let base = base_form(op)?;
    base.order().ok_or(DiffOpError::ZeroDivisor)?;
    let p = polynomial_coefficients(&base);
    let q = q.squarefree_kernel().monic();
    let mut family: Vec<Poly> = p.iter().filter(|c| !c.is_zero()).cloned().collect();
    family.push(q.clone());
    let pieces: Vec<Poly> = gcd_free_basis(&family).into_iter().filter(|b| b.divides(&q)).collect();
    let mut parts = pieces.iter().map(|b| at_factor(&p, b));
    let mut merged = parts.next().expect("q is not constant");
    for part in parts {
        merged.exponents.extend(part.exponents);
        merged.irrational += part.irrational;
        merged.indicial_degree = merged.indicial_degree.max(part.indicial_degree);
        merged.regular &= part.regular;
    }
    merged.exponents.sort();
    merged.point = SingularPoint::Finite(q);
    Ok(merged)
}

pub(crate) fn int_exponent(e: &BigRational) -> Option<i64> {
    if e.is_integer() {
        e.to_integer().try_into().ok()
    } else {
        None
    }
}
