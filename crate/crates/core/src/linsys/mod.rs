//! Matrices over the field, gauge transformations and symplectic structure.

mod constant;
mod symplectic;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::expr::{parse_element, ParseError};
use crate::field::{Field, FieldElement};
use crate::linalg::{field_rref, size};

pub use constant::{
    associated_lie_algebra, bracket, recompose, verify_structure_tables, ConstLieAlgebra, ConstMatrix, Decomposition,
};
pub use symplectic::{symplectic_gram_schmidt, SymplecticForm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinsysError {
    #[error("gauge matrix is singular")]
    SingularGauge,
    #[error("matrix has odd dimension")]
    OddDimension,
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("symplectic form is degenerate on the given vectors")]
    DegenerateForm,
    #[error("input vectors are linearly dependent")]
    DependentInput,
    #[error("matrices belong to different fields")]
    MixedFields,
}

/// Dense matrix of field elements, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Arc<Field>,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl Matrix {
    pub fn new(field: &Arc<Field>, rows: usize, cols: usize, data: Vec<FieldElement>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        assert!(data.iter().all(|x| x.field().same(field)), "matrix entry from another field");
        Self { field: field.clone(), rows, cols, data }
    }

    pub fn from_rows(field: &Arc<Field>, rows: Vec<Vec<FieldElement>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::new(field, r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_columns(field: &Arc<Field>, cols: &[Vec<FieldElement>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        Self::new(field, r, c, (0..r).flat_map(|i| cols.iter().map(move |col| col[i].clone())).collect())
    }

    /// Parses a row-major grid of expression strings.
    pub fn parse(field: &Arc<Field>, rows: &[Vec<&str>]) -> Result<Self, ParseError> {
        let rows = rows
            .iter()
            .map(|row| row.iter().map(|s| parse_element(s, field)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_rows(field, rows))
    }

    pub fn zeros(field: &Arc<Field>, rows: usize, cols: usize) -> Self {
        Self::new(field, rows, cols, vec![FieldElement::zero(field); rows * cols])
    }

    pub fn identity(field: &Arc<Field>, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, FieldElement::one(field));
        }
        m
    }

    /// Embeds a constant matrix.
    pub fn from_const(field: &Arc<Field>, c: &ConstMatrix) -> Self {
        Self::new(field, c.rows(), c.cols(), c.entries().iter().map(|x| FieldElement::constant(field, x.clone())).collect())
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElement {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: FieldElement) {
        assert!(x.field().same(&self.field));
        self.data[i * self.cols + j] = x;
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<FieldElement> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(FieldElement::is_zero)
    }

    pub fn map(&self, f: impl Fn(&FieldElement) -> FieldElement) -> Self {
        Self::new(&self.field, self.rows, self.cols, self.data.iter().map(f).collect())
    }

    pub fn transpose(&self) -> Self {
        let data = (0..self.cols).flat_map(|j| (0..self.rows).map(move |i| (i, j))).map(|(i, j)| self.get(i, j).clone()).collect();
        Self::new(&self.field, self.cols, self.rows, data)
    }

    /// Entrywise derivation.
    pub fn derive(&self) -> Self {
        self.map(FieldElement::derive)
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        self.map(|x| x * c)
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x)
    }

    fn check_same(&self, o: &Self, rows: usize, cols: usize) -> Result<(), LinsysError> {
        if !self.field.same(&o.field) {
            return Err(LinsysError::MixedFields);
        }
        if rows != o.rows || cols != o.cols {
            return Err(LinsysError::SizeMismatch(format!("{}x{} vs {}x{}", rows, cols, o.rows, o.cols)));
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, LinsysError> {
        self.check_same(o, self.rows, self.cols)?;
        Ok(Self::new(&self.field, self.rows, self.cols, self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect()))
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self, LinsysError> {
        self.check_same(o, self.rows, self.cols)?;
        Ok(Self::new(&self.field, self.rows, self.cols, self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect()))
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self, LinsysError> {
        self.check_same(o, o.rows, o.cols)?;
        if self.cols != o.rows {
            return Err(LinsysError::SizeMismatch(format!("{}x{} times {}x{}", self.rows, self.cols, o.rows, o.cols)));
        }
        let mut out = Self::zeros(&self.field, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let v = &out.data[i * o.cols + j] + &(a * b);
                        out.data[i * o.cols + j] = v;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> FieldElement {
        (0..self.rows.min(self.cols)).fold(FieldElement::zero(&self.field), |acc, i| &acc + self.get(i, i))
    }

    /// Determinant by elimination with smallest-entry pivots.
    pub fn det(&self) -> Result<FieldElement, LinsysError> {
        if !self.is_square() {
            return Err(LinsysError::SizeMismatch("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut m: Vec<Vec<FieldElement>> = (0..n).map(|i| self.row(i)).collect();
        let mut det = FieldElement::one(&self.field);
        for c in 0..n {
            let Some(p) = (c..n).filter(|&i| !m[i][c].is_zero()).min_by_key(|&i| size(&m[i][c])) else {
                return Ok(FieldElement::zero(&self.field));
            };
            if p != c {
                m.swap(p, c);
                det = -&det;
            }
            det = &det * &m[c][c];
            let inv = m[c][c].inv().unwrap();
            for i in c + 1..n {
                if m[i][c].is_zero() {
                    continue;
                }
                let f = &m[i][c] * &inv;
                for j in c..n {
                    if !m[c][j].is_zero() {
                        m[i][j] = &m[i][j] - &(&f * &m[c][j]);
                    }
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Self, LinsysError> {
        if !self.is_square() {
            return Err(LinsysError::SizeMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let id = Self::identity(&self.field, n);
        let mut aug: Vec<Vec<FieldElement>> = (0..n).map(|i| [self.row(i), id.row(i)].concat()).collect();
        let pivots = field_rref(&mut aug, n);
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return Err(LinsysError::SingularGauge);
        }
        Ok(Self::from_rows(&self.field, aug.into_iter().map(|r| r[n..].to_vec()).collect()))
    }

    /// Moves the entries to another field with the same extension.
    pub fn rebase(&self, field: &Arc<Field>) -> Result<Self, crate::field::FieldError> {
        let data = self.data.iter().map(|x| x.rebase(field)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(field, self.rows, self.cols, data))
    }

    /// Row-major grid of expression strings.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| self.row(i).iter().map(FieldElement::to_expr_string).collect()).collect()
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for row in self.to_strings() {
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// `P[A] = P^{-1} (A P - P')`.
pub fn gauge(p: &Matrix, a: &Matrix) -> Result<Matrix, LinsysError> {
    if !p.is_square() || !a.is_square() || p.rows != a.rows {
        return Err(LinsysError::SizeMismatch("gauge needs square matrices of equal size".into()));
    }
    let inv = p.inverse()?;
    inv.try_mul(&a.try_mul(p)?.try_sub(&p.derive())?)
}

/// `[[0, I], [-I, 0]]` of size `2n`.
pub fn standard_j(field: &Arc<Field>, n: usize) -> Matrix {
    Matrix::from_const(field, &ConstMatrix::standard_j(n))
}

fn even_size(m: &Matrix) -> Result<usize, LinsysError> {
    if !m.is_square() {
        return Err(LinsysError::SizeMismatch("expected a square matrix".into()));
    }
    if m.rows % 2 == 1 {
        return Err(LinsysError::OddDimension);
    }
    Ok(m.rows / 2)
}

/// `A^T J + J A = 0`.
pub fn is_hamiltonian(a: &Matrix) -> Result<bool, LinsysError> {
    let n = even_size(a)?;
    let j = standard_j(a.field(), n);
    Ok(a.transpose().try_mul(&j)?.try_add(&j.try_mul(a)?)?.is_zero())
}

/// `P^T J P = J`.
pub fn is_symplectic(p: &Matrix) -> Result<bool, LinsysError> {
    let n = even_size(p)?;
    let j = standard_j(p.field(), n);
    Ok(p.transpose().try_mul(&j)?.try_mul(p)? == j)
}
