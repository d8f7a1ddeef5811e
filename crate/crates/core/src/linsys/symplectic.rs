//! Symplectic Gram-Schmidt.

use std::sync::Arc;

use super::{LinsysError, Matrix};
use crate::field::{Field, FieldElement};

/// A nondegenerate skew form `omega(u, v) = u^T W v`.
#[derive(Debug, Clone)]
pub struct SymplecticForm {
    matrix: Matrix,
}

impl SymplecticForm {
    /// The standard form with matrix `J` in dimension `2n`.
    pub fn standard(field: &Arc<Field>, n: usize) -> Self {
        Self { matrix: super::standard_j(field, n) }
    }

    pub fn new(matrix: Matrix) -> Result<Self, LinsysError> {
        if !matrix.is_square() {
            return Err(LinsysError::SizeMismatch("form matrix must be square".into()));
        }
        if matrix.rows() % 2 == 1 {
            return Err(LinsysError::OddDimension);
        }
        if !matrix.try_add(&matrix.transpose())?.is_zero() {
            return Err(LinsysError::DegenerateForm);
        }
        if matrix.det()?.is_zero() {
            return Err(LinsysError::DegenerateForm);
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn eval(&self, u: &[FieldElement], v: &[FieldElement]) -> FieldElement {
        let n = self.matrix.rows();
        let mut acc = FieldElement::zero(self.matrix.field());
        for i in 0..n {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..n {
                let w = self.matrix.get(i, j);
                if !w.is_zero() && !v[j].is_zero() {
                    acc = &acc + &(&(&u[i] * w) * &v[j]);
                }
            }
        }
        acc
    }
}

fn axpy(a: &FieldElement, x: &[FieldElement], y: &[FieldElement]) -> Vec<FieldElement> {
    y.iter().zip(x).map(|(yi, xi)| yi + &(a * xi)).collect()
}

/// Turns a basis into one in which the form has matrix `J`; output order is
/// `e_1..e_n, f_1..f_n`. The first vector is kept, and at each step the partner is
/// taken from the middle of the remaining list when possible.
pub fn symplectic_gram_schmidt(vectors: &[Vec<FieldElement>], form: &SymplecticForm) -> Result<Vec<Vec<FieldElement>>, LinsysError> {
    let dim = form.matrix.rows();
    if vectors.len() != dim || vectors.iter().any(|v| v.len() != dim) {
        return Err(LinsysError::SizeMismatch("need 2n vectors of length 2n".into()));
    }
    let field = form.matrix.field().clone();
    if Matrix::from_columns(&field, vectors).det()?.is_zero() {
        return Err(LinsysError::DependentInput);
    }
    let mut rest: Vec<Vec<FieldElement>> = vectors.to_vec();
    let mut es = Vec::new();
    let mut fs = Vec::new();
    while !rest.is_empty() {
        let e = rest.remove(0);
        let half = rest.len() / 2;
        let pick = if !form.eval(&e, &rest[half]).is_zero() {
            half
        } else {
            rest.iter().position(|v| !form.eval(&e, v).is_zero()).ok_or(LinsysError::DegenerateForm)?
        };
        let f = rest.remove(pick);
        let f = {
            let s = form.eval(&e, &f).inv().unwrap();
            f.iter().map(|x| x * &s).collect::<Vec<_>>()
        };
        rest = rest
            .into_iter()
            .map(|v| {
                let a = -&form.eval(&v, &f);
                let b = form.eval(&v, &e);
                axpy(&b, &f, &axpy(&a, &e, &v))
            })
            .collect();
        es.push(e);
        fs.push(f);
    }
    es.extend(fs);
    Ok(es)
}
