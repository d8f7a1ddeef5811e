//! Linear differential operators `sum c_k D^k` over a [`Field`], where `D` is the
//! field's derivation and `D a = a D + a'`.

mod exponents;
mod rational;
mod risch;
mod roots;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::field::{Field, FieldElement, FieldError};
use crate::linalg::field_solve;

pub use exponents::{exponents_at, local_exponents, ExponentReport, LocalExponents, SingularPoint};
pub use rational::{rational_solutions, RationalSolutionSpace};
pub use risch::{
    integrable_combinations, limited_integration, risch_solve, LimitedIntegral, ParametricSolution,
    RischOutcome,
};
pub use roots::rational_roots;

/// Default bound on numerator degrees in undetermined-coefficient solving.
pub const DEFAULT_DEGREE_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiffOpError {
    #[error("operators belong to different fields")]
    MixedFields,
    #[error("division by the zero operator")]
    ZeroDivisor,
    #[error("degree bound {bound} exceeds the cap {cap}")]
    BoundOverflow { bound: i64, cap: usize },
    #[error("both inputs are zero")]
    DegenerateInput,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Options shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub degree_cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { degree_cap: DEFAULT_DEGREE_CAP }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct DiffOp {
    field: Arc<Field>,
    coeffs: Vec<FieldElement>,
}

impl DiffOp {
    /// Coefficients by increasing power of `D`; trailing zeros are dropped.
    pub fn new(field: &Arc<Field>, mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(FieldElement::is_zero) {
            coeffs.pop();
        }
        for c in &coeffs {
            assert!(c.field().same(field), "operator coefficient from another field");
        }
        Self { field: field.clone(), coeffs }
    }

    pub fn zero(field: &Arc<Field>) -> Self {
        Self { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn constant(c: FieldElement) -> Self {
        let f = c.field().clone();
        Self::new(&f, vec![c])
    }

    /// The derivation `D` itself.
    pub fn d(field: &Arc<Field>) -> Self {
        Self::new(field, vec![FieldElement::zero(field), FieldElement::one(field)])
    }

    /// `D - a`.
    pub fn first_order(a: &FieldElement) -> Self {
        let f = a.field().clone();
        Self::new(&f, vec![-a, FieldElement::one(&f)])
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> FieldElement {
        self.coeffs.get(k).cloned().unwrap_or_else(|| FieldElement::zero(&self.field))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Order; `None` for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> FieldElement {
        self.coeffs.last().cloned().unwrap_or_else(|| FieldElement::zero(&self.field))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.leading().inv().unwrap();
        self.left_scale(&inv)
    }

    /// `c * L`.
    pub fn left_scale(&self, c: &FieldElement) -> Self {
        Self::new(&self.field, self.coeffs.iter().map(|x| x * c).collect())
    }

    /// True when every coefficient lies in `Q(i)(t)`.
    pub fn is_base(&self) -> bool {
        self.coeffs.iter().all(FieldElement::is_base)
    }

    /// The same operator over `Q(i)(t)`, when no coefficient has a radical part.
    pub fn to_base(&self) -> Option<Self> {
        if !self.is_base() {
            return None;
        }
        let b = self.field.base();
        Some(Self::new(&b, self.coeffs.iter().map(|c| FieldElement::from_ratfunc(&b, c.a().clone())).collect()))
    }

    /// Applies the operator to a field element.
    pub fn apply(&self, y: &FieldElement) -> FieldElement {
        let mut acc = FieldElement::zero(&self.field);
        let mut dy = y.clone();
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                dy = dy.derive();
            }
            if !c.is_zero() {
                acc = &acc + &(c * &dy);
            }
        }
        acc
    }

    pub fn add(&self, o: &Self) -> Result<Self, DiffOpError> {
        self.check(o)?;
        let n = self.coeffs.len().max(o.coeffs.len());
        Ok(Self::new(&self.field, (0..n).map(|k| &self.coeff(k) + &o.coeff(k)).collect()))
    }

    pub fn sub(&self, o: &Self) -> Result<Self, DiffOpError> {
        self.check(o)?;
        let n = self.coeffs.len().max(o.coeffs.len());
        Ok(Self::new(&self.field, (0..n).map(|k| &self.coeff(k) - &o.coeff(k)).collect()))
    }

    fn check(&self, o: &Self) -> Result<(), DiffOpError> {
        if self.field.same(&o.field) {
            Ok(())
        } else {
            Err(DiffOpError::MixedFields)
        }
    }

    /// `D * L`.
    fn d_times(&self) -> Self {
        let mut out = vec![FieldElement::zero(&self.field); self.coeffs.len() + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k] = &out[k] + &c.derive();
            out[k + 1] = &out[k + 1] + c;
        }
        Self::new(&self.field, out)
    }

    /// Product in the operator ring: `(L1 L2)(y) = L1(L2(y))`.
    pub fn op_mul(&self, o: &Self) -> Result<Self, DiffOpError> {
        self.check(o)?;
        if self.is_zero() || o.is_zero() {
            return Ok(Self::zero(&self.field));
        }
        let n = self.coeffs.len() + o.coeffs.len() - 1;
        let mut acc = vec![FieldElement::zero(&self.field); n];
        let mut di = o.clone();
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                di = di.d_times();
            }
            if a.is_zero() {
                continue;
            }
            for (k, c) in di.coeffs.iter().enumerate() {
                if !c.is_zero() {
                    acc[k] = &acc[k] + &(a * c);
                }
            }
        }
        Ok(Self::new(&self.field, acc))
    }

    /// Right division: `L = Q R + rem` with `order(rem) < order(R)`.
    pub fn right_divide(&self, r: &Self) -> Result<(Self, Self), DiffOpError> {
        self.check(r)?;
        let n = r.order().ok_or(DiffOpError::ZeroDivisor)?;
        let lr_inv = r.leading().inv().unwrap();
        let mut rem = self.clone();
        let mut q = vec![FieldElement::zero(&self.field); self.coeffs.len().saturating_sub(n)];
        while let Some(m) = rem.order() {
            if m < n {
                break;
            }
            let c = &rem.leading() * &lr_inv;
            let mut shifted = r.clone();
            for _ in 0..m - n {
                shifted = shifted.d_times();
            }
            rem = rem.sub(&shifted.left_scale(&c))?;
            // guard against a leading term that did not cancel through cancellation noise
            debug_assert!(rem.order().is_none_or(|k| k < m));
            q[m - n] = &q[m - n] + &c;
        }
        Ok((Self::new(&self.field, q), rem))
    }

    /// Remainder of `D^k` modulo the monic operator `self`, for `k = 0..=upto`, as
    /// coefficient vectors of length `order`.
    fn power_remainders(&self, upto: usize) -> Vec<Vec<FieldElement>> {
        let m = self.monic();
        let n = m.order().unwrap();
        let zero = FieldElement::zero(&self.field);
        let mut cur = vec![zero.clone(); n];
        if n > 0 {
            cur[0] = FieldElement::one(&self.field);
        }
        let mut out = Vec::with_capacity(upto + 1);
        for k in 0..=upto {
            if k > 0 {
                // D * (sum c_j D^j) = sum c_j' D^j + c_j D^{j+1}
                let mut next = vec![zero.clone(); n + 1];
                for (j, c) in cur.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    next[j] = &next[j] + &c.derive();
                    next[j + 1] = &next[j + 1] + c;
                }
                let top = next.pop().unwrap();
                if !top.is_zero() {
                    for j in 0..n {
                        next[j] = &next[j] - &(&top * &m.coeffs[j]);
                    }
                }
                cur = next;
            }
            out.push(cur.clone());
        }
        out
    }

    /// Least common left multiple, monic.
    pub fn lclm(&self, o: &Self) -> Result<Self, DiffOpError> {
        self.check(o)?;
        let (n1, n2) = match (self.order(), o.order()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(DiffOpError::ZeroDivisor),
        };
        if n1 == 0 {
            return Ok(o.monic());
        }
        if n2 == 0 {
            return Ok(self.monic());
        }
        let r1 = self.power_remainders(n1 + n2);
        let r2 = o.power_remainders(n1 + n2);
        let vec_of = |k: usize| -> Vec<FieldElement> { r1[k].iter().chain(&r2[k]).cloned().collect() };
        for big_n in n1.max(n2)..=n1 + n2 {
            // columns: remainders of D^0..D^{N-1}; rhs: -remainder of D^N
            let rows: Vec<Vec<FieldElement>> = (0..n1 + n2)
                .map(|row| (0..big_n).map(|k| vec_of(k)[row].clone()).collect())
                .collect();
            let rhs: Vec<FieldElement> = vec_of(big_n).into_iter().map(|x| -x).collect();
            if let Some(c) = field_solve(&rows, &rhs) {
                let mut coeffs = c;
                coeffs.push(FieldElement::one(&self.field));
                return Ok(Self::new(&self.field, coeffs));
            }
        }
        unreachable!("LCLM order exceeds the sum of the orders")
    }

    /// LCLM of a nonempty family.
    pub fn lclm_many(ops: &[Self]) -> Result<Self, DiffOpError> {
        let mut it = ops.iter();
        let first = it.next().ok_or(DiffOpError::ZeroDivisor)?.monic();
        it.try_fold(first, |acc, op| acc.lclm(op))
    }

    /// Conjugates every coefficient under `sqrt(s) -> -sqrt(s)`.
    pub fn sigma(&self) -> Self {
        Self::new(&self.field, self.coeffs.iter().map(FieldElement::conj).collect())
    }

    /// Moves the coefficients to another field with the same extension.
    pub fn rebase(&self, field: &Arc<Field>) -> Result<Self, DiffOpError> {
        let c = self.coeffs.iter().map(|x| x.rebase(field)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(field, c))
    }

    /// Rewrites an operator in the twisted derivation `w d/dt` as an operator in
    /// `d/dt` over the plain field.
    pub fn to_plain(&self) -> Self {
        let plain = self.field.plain();
        if self.field.is_plain() {
            return self.clone();
        }
        let w = self.field.weight().rebase(&plain).unwrap();
        let wd = Self::new(&plain, vec![FieldElement::zero(&plain), w]);
        let mut acc = Self::zero(&plain);
        let mut power = Self::constant(FieldElement::one(&plain));
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                power = wd.op_mul(&power).unwrap();
            }
            if !c.is_zero() {
                acc = acc.add(&power.left_scale(&c.rebase(&plain).unwrap())).unwrap();
            }
        }
        acc
    }

    /// For `L` over the plain field, the operator `L~` with `L(B sqrt(s)) = sqrt(s) L~(B)`.
    pub fn radical_twist(&self) -> Option<Self> {
        let h = self.field.half_log_deriv()?.clone();
        let h = FieldElement::from_ratfunc(&self.field, h);
        let shifted = Self::new(&self.field, vec![h, FieldElement::one(&self.field)]);
        let mut acc = Self::zero(&self.field);
        let mut power = Self::constant(FieldElement::one(&self.field));
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                power = shifted.op_mul(&power).unwrap();
            }
            if !c.is_zero() {
                acc = acc.add(&power.left_scale(c)).unwrap();
            }
        }
        Some(acc)
    }

    /// Coefficients serialized in the expression grammar.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(FieldElement::to_expr_string).collect()
    }
}

impl fmt::Debug for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| format!("({c})*D^{k}"))
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}
