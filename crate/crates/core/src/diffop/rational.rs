//! Rational solutions of linear differential operators.


use super::exponents::{int_exponent, polynomial_coefficients};
use super::{exponents, DiffOp, DiffOpError, SolveOptions};
use crate::field::{gcd_free_basis, FieldElement, FieldError, GaussianRational as G, Poly, RatFunc};
use crate::linalg::linear_relations;

#[derive(Debug, Clone)]
pub struct RationalSolutionSpace {
    /// A `Q(i)`-basis of the solutions in the operator's field.
    pub basis: Vec<FieldElement>,
    /// Largest numerator degree that was searched, when a search took place.
    pub degree_bound: Option<i64>,
}

impl RationalSolutionSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// Solutions in `Q(i)(t)` of a base operator with the plain derivation.
fn base_solutions(op: &DiffOp, opts: SolveOptions) -> Result<(Vec<RatFunc>, Option<i64>), DiffOpError> {
    let Some(order) = op.order() else {
        return Err(DiffOpError::ZeroDivisor);
    };
    if order == 0 {
        return Ok((Vec::new(), None));
    }
    let p = polynomial_coefficients(op);
    let nonzero: Vec<Poly> = p.iter().filter(|c| !c.is_zero()).cloned().collect();
    let mut den = Poly::one();
    for q in gcd_free_basis(&nonzero) {
        if !q.divides(&p[order]) {
            continue;
        }
        let ex = exponents::exponents_at(op, &q)?;
        let Some(lowest) = ex.exponents.iter().filter_map(int_exponent).min() else {
            return Ok((Vec::new(), None));
        };
        if lowest < 0 {
            den = &den * &q.pow((-lowest) as u32);
        }
    }
    let inf = exponents::local_exponents(op)?;
    // exponents at infinity are minus the degrees of the possible leading terms
    let Some(top) = inf.at_infinity().exponents.iter().filter_map(int_exponent).map(|e| -e).max() else {
        return Ok((Vec::new(), None));
    };
    let bound = top + den.deg();
    if bound < 0 {
        return Ok((Vec::new(), Some(bound)));
    }
    if bound > opts.degree_cap as i64 {
        return Err(DiffOpError::BoundOverflow { bound, cap: opts.degree_cap });
    }
    let field = op.field();
    let inv_den = RatFunc::new(Poly::one(), den.clone());
    let candidates: Vec<FieldElement> = (0..=bound as usize)
        .map(|k| FieldElement::from_ratfunc(field, &RatFunc::from_poly(Poly::monomial(G::one(), k)) * &inv_den))
        .collect();
    let images: Vec<FieldElement> = candidates.iter().map(|y| op.apply(y)).collect();
    let sols = linear_relations(&images)
        .into_iter()
        .map(|rel| {
            let num = Poly::new(rel);
            &RatFunc::from_poly(num) * &inv_den
        })
        .collect();
    Ok((sols, Some(bound)))
}

/// A basis of the solutions of `op` lying in its coefficient field.
pub fn rational_solutions(op: &DiffOp, opts: SolveOptions) -> Result<RationalSolutionSpace, DiffOpError> {
    let field = op.field().clone();
    let plain = op.to_plain();
    let pf = plain.field().clone();
    let lift = |pieces: Vec<FieldElement>| -> Result<Vec<FieldElement>, DiffOpError> {
        Ok(pieces.into_iter().map(|y| y.rebase(&field)).collect::<Result<Vec<_>, FieldError>>()?)
    };
    if plain.is_base() {
        let base = plain.to_base().unwrap();
        let (a_sols, bound_a) = base_solutions(&base, opts)?;
        let mut basis: Vec<FieldElement> = a_sols.into_iter().map(|a| FieldElement::from_ratfunc(&pf, a)).collect();
        let mut bound = bound_a;
        if let Some(twisted) = plain.radical_twist() {
            let (b_sols, bound_b) = base_solutions(&twisted.to_base().unwrap(), opts)?;
            basis.extend(b_sols.into_iter().map(|b| FieldElement::from_parts(&pf, RatFunc::zero(), b)));
            bound = bound.max(bound_b);
        }
        return Ok(RationalSolutionSpace { basis: lift(basis)?, degree_bound: bound });
    }
    // radical coefficients: solve the conjugation-invariant LCLM, then cut down
    let m = plain.lclm(&plain.sigma())?;
    if !m.is_base() {
        return Err(FieldError::UnsupportedRadical.into());
    }
    let candidates = rational_solutions(&m, opts)?;
    let images: Vec<FieldElement> = candidates.basis.iter().map(|y| plain.apply(y)).collect();
    let basis: Vec<FieldElement> = linear_relations(&images)
        .into_iter()
        .map(|rel| {
            rel.iter()
                .zip(&candidates.basis)
                .filter(|(c, _)| !c.is_zero())
                .fold(FieldElement::zero(&pf), |acc, (c, y)| &acc + &y.scale(c))
        })
        .collect();
    Ok(RationalSolutionSpace { basis: lift(basis)?, degree_bound: candidates.degree_bound })
}
