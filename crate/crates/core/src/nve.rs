//! Completion of a particular solution to a symplectic basis and extraction of the
//! normal variational equation.

use std::sync::Arc;

use thiserror::Error;

use crate::field::{Field, FieldElement};
use crate::linsys::{gauge, is_hamiltonian, is_symplectic, ConstMatrix, LinsysError, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NveError {
    #[error("the particular solution is zero")]
    ZeroSolution,
    #[error("the column does not solve the variational system (entry {0})")]
    NotASolution(usize),
    #[error("the variational matrix is not Hamiltonian")]
    NotHamiltonian,
    #[error("expected a 4x4 system and a column of length 4")]
    WrongSize,
    #[error("normalized system lost its expected zero pattern at ({0}, {1})")]
    PatternViolated(usize, usize),
    #[error(transparent)]
    Linsys(#[from] LinsysError),
}

/// Symplectic permutations sending `e1` to `e2`, `e3`, `e4`.
fn pivot_rotation(k: usize) -> ConstMatrix {
    let swap = ConstMatrix::from_ints(&[&[0, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]]);
    let rot = ConstMatrix::from_ints(&[&[0, 0, -1, 0], &[0, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 1]]);
    match k {
        1 => swap,
        2 => rot,
        3 => swap.mul(&rot),
        _ => ConstMatrix::identity(4),
    }
}

/// The explicit completion for `z1 != 0`.
fn completion_with_pivot(z: &[FieldElement]) -> Matrix {
    let f = z[0].field().clone();
    let zero = FieldElement::zero(&f);
    let one = FieldElement::one(&f);
    let inv = z[0].inv().unwrap();
    Matrix::from_rows(
        &f,
        vec![
            vec![z[0].clone(), zero.clone(), zero.clone(), zero.clone()],
            vec![z[1].clone(), one.clone(), zero.clone(), zero.clone()],
            vec![z[2].clone(), &z[3] * &inv, inv.clone(), -&(&z[1] * &inv)],
            vec![z[3].clone(), zero.clone(), zero, one],
        ],
    )
}

/// Symplectic matrix whose first column is `z`. For `z1 != 0` this is the matrix
/// with columns `z, (0,1,z4/z1,0), (0,0,1/z1,0), (0,0,-z2/z1,1)`; otherwise the
/// same construction after a constant symplectic permutation.
pub fn completion_matrix(z: &[FieldElement]) -> Result<Matrix, NveError> {
    if z.len() != 4 {
        return Err(NveError::WrongSize);
    }
    let k = z.iter().position(|x| !x.is_zero()).ok_or(NveError::ZeroSolution)?;
    if k == 0 {
        return Ok(completion_with_pivot(z));
    }
    let field = z[0].field().clone();
    let t = Matrix::from_const(&field, &pivot_rotation(k));
    let tinv = t.inverse()?;
    let col = Matrix::from_columns(&field, &[z.to_vec()]);
    let w = tinv.try_mul(&col)?.column(0);
    Ok(t.try_mul(&completion_with_pivot(&w))?)
}

/// Output of the normalization step: `A_N = P[A]` and the 2x2 block `N`.
#[derive(Debug, Clone)]
pub struct NormalizedSystem {
    pub p: Matrix,
    pub a_n: Matrix,
    pub n: Matrix,
}

impl NormalizedSystem {
    pub fn a12(&self) -> &FieldElement {
        self.a_n.get(0, 1)
    }

    pub fn a13(&self) -> &FieldElement {
        self.a_n.get(0, 2)
    }

    pub fn a14(&self) -> &FieldElement {
        self.a_n.get(0, 3)
    }

    pub fn field(&self) -> &Arc<Field> {
        self.a_n.field()
    }
}

/// Checks `D z = A z`.
pub fn check_solution(a: &Matrix, z: &[FieldElement]) -> Result<(), NveError> {
    if a.rows() != 4 || a.cols() != 4 || z.len() != 4 {
        return Err(NveError::WrongSize);
    }
    let col = Matrix::from_columns(a.field(), &[z.to_vec()]);
    let az = a.try_mul(&col)?;
    for (i, zi) in z.iter().enumerate() {
        if &zi.derive() != az.get(i, 0) {
            return Err(NveError::NotASolution(i + 1));
        }
    }
    Ok(())
}

/// `A_N = P[A]` with `P` the completion of `z`, and `N` read off rows and columns 2, 4.
pub fn normalize_variational(a: &Matrix, z: &[FieldElement]) -> Result<NormalizedSystem, NveError> {
    if a.rows() != 4 || a.cols() != 4 {
        return Err(NveError::WrongSize);
    }
    if !is_hamiltonian(a)? {
        return Err(NveError::NotHamiltonian);
    }
    check_solution(a, z)?;
    let p = completion_matrix(z)?;
    debug_assert!(is_symplectic(&p)?);
    let a_n = gauge(&p, a)?;
    for i in 0..4 {
        if !a_n.get(i, 0).is_zero() {
            return Err(NveError::PatternViolated(i + 1, 1));
        }
        if !a_n.get(2, i).is_zero() {
            return Err(NveError::PatternViolated(3, i + 1));
        }
    }
    let n = Matrix::from_rows(
        a.field(),
        vec![vec![a_n.get(1, 1).clone(), a_n.get(1, 3).clone()], vec![a_n.get(3, 1).clone(), a_n.get(3, 3).clone()]],
    );
    Ok(NormalizedSystem { p, a_n, n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_element;

    fn col(f: &Arc<Field>, xs: &[&str]) -> Vec<FieldElement> {
        xs.iter().map(|s| parse_element(s, f).unwrap()).collect()
    }

    #[test]
    fn completion_is_symplectic_for_every_pivot() {
        let f = Field::rational("t");
        for z in [["t", "1", "t^2", "2"], ["0", "t", "1", "0"], ["0", "0", "1/t", "t"], ["0", "0", "0", "t+1"]] {
            let z = col(&f, &z);
            let p = completion_matrix(&z).unwrap();
            assert!(is_symplectic(&p).unwrap());
            assert_eq!(p.column(0), z);
        }
        assert_eq!(completion_matrix(&col(&f, &["0", "0", "0", "0"])).unwrap_err(), NveError::ZeroSolution);
    }

    #[test]
    fn unit_column_gives_identity() {
        let f = Field::rational("t");
        let p = completion_matrix(&col(&f, &["1", "0", "0", "0"])).unwrap();
        assert_eq!(p, Matrix::identity(&f, 4));
    }
}
