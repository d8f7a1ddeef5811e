//! Constant matrices over `Q(i)` and the Lie algebra spanned by a system.

use std::fmt;

use super::{LinsysError, Matrix};
use crate::field::{FieldElement, GaussianRational as G};
use crate::linalg::{express_in, independent_subset, rank, rref};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ConstMatrix {
    rows: usize,
    cols: usize,
    data: Vec<G>,
}

impl ConstMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<G>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(n, n, vec![G::zero(); n * n])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = G::one();
        }
        m
    }

    /// Matrix unit `E_ij` (zero-based indices).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n);
        m.data[i * n + j] = G::one();
        m
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Self::new(r, c, rows.iter().flat_map(|row| row.iter().map(|&x| G::from_int(x))).collect())
    }

    /// `[[0, I], [-I, 0]]` of size `2n`.
    pub fn standard_j(n: usize) -> Self {
        let mut m = Self::zeros(2 * n);
        for i in 0..n {
            m.data[i * 2 * n + n + i] = G::one();
            m.data[(n + i) * 2 * n + i] = -G::one();
        }
        m
    }

    /// `E12 - E43`.
    pub fn m1() -> Self {
        Self::unit(4, 0, 1).sub(&Self::unit(4, 3, 2))
    }

    /// `E14 + E23`.
    pub fn m2() -> Self {
        Self::unit(4, 0, 3).add(&Self::unit(4, 1, 2))
    }

    /// `E13`.
    pub fn m3() -> Self {
        Self::unit(4, 0, 2)
    }

    /// `E24`.
    pub fn ma() -> Self {
        Self::unit(4, 1, 3)
    }

    /// `E22 - E44`.
    pub fn mm() -> Self {
        Self::unit(4, 1, 1).sub(&Self::unit(4, 3, 3))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &G {
        &self.data[i * self.cols + j]
    }

    pub fn entries(&self) -> &[G] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(G::is_zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.rows, self.cols, self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.rows, self.cols, self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &G) -> Self {
        Self::new(self.rows, self.cols, self.data.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows);
        let mut out = vec![G::zero(); self.rows * o.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    out[i * o.cols + j] += &(a * o.get(k, j));
                }
            }
        }
        Self::new(self.rows, o.cols, out)
    }

    pub fn transpose(&self) -> Self {
        let data = (0..self.cols).flat_map(|j| (0..self.rows).map(move |i| (i, j))).map(|(i, j)| self.get(i, j).clone()).collect();
        Self::new(self.cols, self.rows, data)
    }
}

impl fmt::Debug for ConstMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect::<Vec<_>>().join(", "))
            .collect();
        write!(f, "[[{}]]", rows.join("], ["))
    }
}

/// `MN - NM`.
pub fn bracket(m: &ConstMatrix, n: &ConstMatrix) -> Result<ConstMatrix, LinsysError> {
    if m.rows != m.cols || n.rows != n.cols || m.rows != n.rows {
        return Err(LinsysError::SizeMismatch("bracket needs square matrices of equal size".into()));
    }
    Ok(m.mul(n).sub(&n.mul(m)))
}

/// A finite-dimensional Lie algebra of constant matrices.
#[derive(Debug, Clone)]
pub struct ConstLieAlgebra {
    basis: Vec<ConstMatrix>,
    generators_count: usize,
}

/// Largest dimension for which the minimal generator count is searched exhaustively.
const GENERATOR_SEARCH_LIMIT: usize = 12;

impl ConstLieAlgebra {
    /// The Lie algebra generated by `gens` under brackets.
    pub fn generated_by(gens: &[ConstMatrix]) -> Self {
        let basis = close(gens);
        let generators_count = minimal_generators(&basis, gens.len());
        Self { basis, generators_count }
    }

    pub fn basis(&self) -> &[ConstMatrix] {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Smallest number of basis elements generating the algebra.
    pub fn generators_count(&self) -> usize {
        self.generators_count
    }

    pub fn contains(&self, m: &ConstMatrix) -> bool {
        let mut rows: Vec<Vec<G>> = self.basis.iter().map(|b| b.data.clone()).collect();
        let before = rank(&rows, m.data.len());
        rows.push(m.data.clone());
        rank(&rows, m.data.len()) == before
    }

    pub fn is_abelian(&self) -> bool {
        self.basis.iter().enumerate().all(|(i, a)| self.basis[i + 1..].iter().all(|b| bracket(a, b).unwrap().is_zero()))
    }

    /// Span-level equality.
    pub fn same_span(&self, o: &Self) -> bool {
        self.dimension() == o.dimension() && o.basis.iter().all(|m| self.contains(m))
    }
}

/// Basis of the bracket closure of `gens`, keeping the independent generators first.
fn close(gens: &[ConstMatrix]) -> Vec<ConstMatrix> {
    let Some(first) = gens.first() else {
        return Vec::new();
    };
    let len = first.data.len();
    let mut basis: Vec<ConstMatrix> = Vec::new();
    let mut echelon: Vec<Vec<G>> = Vec::new();
    let mut push = |m: ConstMatrix, basis: &mut Vec<ConstMatrix>| -> bool {
        if m.is_zero() {
            return false;
        }
        let mut rows = echelon.clone();
        rows.push(m.data.clone());
        let piv = rref(&mut rows, len);
        if piv.len() > echelon.len() {
            echelon = rows;
            basis.push(m);
            true
        } else {
            false
        }
    };
    for g in gens {
        push(g.clone(), &mut basis);
    }
    let mut i = 0;
    while i < basis.len() {
        for j in 0..i {
            let b = bracket(&basis[j], &basis[i]).unwrap();
            push(b, &mut basis);
        }
        i += 1;
    }
    basis
}

fn minimal_generators(basis: &[ConstMatrix], fallback: usize) -> usize {
    let d = basis.len();
    if d == 0 {
        return 0;
    }
    if d > GENERATOR_SEARCH_LIMIT {
        return fallback.min(d);
    }
    for size in 1..=d {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let subset: Vec<ConstMatrix> = idx.iter().map(|&i| basis[i].clone()).collect();
            if close(&subset).len() == d {
                return size;
            }
            // next combination
            let mut k = size;
            while k > 0 && idx[k - 1] == d - size + k - 1 {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            idx[k - 1] += 1;
            for l in k..size {
                idx[l] = idx[l - 1] + 1;
            }
        }
    }
    d
}

/// `A = sum a_i M_i` with the `a_i` independent over `Q(i)`.
pub type Decomposition = Vec<(FieldElement, ConstMatrix)>;

/// Writes `A` as `sum a_i M_i` and closes the `M_i` under brackets.
pub fn associated_lie_algebra(a: &Matrix) -> (Decomposition, ConstLieAlgebra) {
    let entries = a.entries();
    let chosen = independent_subset(entries);
    let coeffs: Vec<FieldElement> = chosen.iter().map(|&i| entries[i].clone()).collect();
    let mut mats = vec![vec![G::zero(); entries.len()]; coeffs.len()];
    for (pos, e) in entries.iter().enumerate() {
        if e.is_zero() {
            continue;
        }
        let c = express_in(&coeffs, e).expect("entry lies in the span of the chosen entries");
        for (k, ck) in c.into_iter().enumerate() {
            mats[k][pos] = ck;
        }
    }
    let decomposition: Decomposition = coeffs
        .into_iter()
        .zip(mats)
        .map(|(f, m)| (f, ConstMatrix::new(a.rows(), a.cols(), m)))
        .collect();
    let gens: Vec<ConstMatrix> = decomposition.iter().map(|(_, m)| m.clone()).collect();
    let algebra = ConstLieAlgebra::generated_by(&gens);
    (decomposition, algebra)
}

/// Rebuilds `sum a_i M_i`.
pub fn recompose(field: &std::sync::Arc<crate::field::Field>, d: &Decomposition, n: usize) -> Matrix {
    d.iter().fold(Matrix::zeros(field, n, n), |acc, (f, m)| {
        acc.try_add(&Matrix::from_const(field, m).scale(f)).unwrap()
    })
}

/// Checks the bracket tables of `{Ma, M1, M2, M3}` and `{Mm, M1, M2, M3}`, the
/// products `M1 M2 = -M2 M1 = M3`, the vanishing of the other products among
/// `M1, M2, M3`, and `Ma^2 = 0`. Returns the number of entries compared.
pub fn verify_structure_tables() -> Result<usize, String> {
    let (m1, m2, m3, ma, mm) = (ConstMatrix::m1(), ConstMatrix::m2(), ConstMatrix::m3(), ConstMatrix::ma(), ConstMatrix::mm());
    let zero = ConstMatrix::zeros(4);
    let s = |m: &ConstMatrix, k: i64| m.scale(&G::from_int(k));
    let additive = [
        [zero.clone(), s(&m2, -1), zero.clone(), zero.clone()],
        [m2.clone(), zero.clone(), s(&m3, 2), zero.clone()],
        [zero.clone(), s(&m3, -2), zero.clone(), zero.clone()],
        [zero.clone(), zero.clone(), zero.clone(), zero.clone()],
    ];
    let multiplicative = [
        [zero.clone(), s(&m1, -1), m2.clone(), zero.clone()],
        [m1.clone(), zero.clone(), s(&m3, 2), zero.clone()],
        [s(&m2, -1), s(&m3, -2), zero.clone(), zero.clone()],
        [zero.clone(), zero.clone(), zero.clone(), zero.clone()],
    ];
    let mut count = 1;
    for (head, table, label) in [(&ma, &additive, "Ma"), (&mm, &multiplicative, "Mm")] {
        let basis = [head, &m1, &m2, &m3];
        for (i, row) in table.iter().enumerate() {
            for (j, expected) in row.iter().enumerate() {
                let got = bracket(basis[i], basis[j]).map_err(|e| e.to_string())?;
                if &got != expected {
                    return Err(format!("bracket ({i}, {j}) of the {label} table"));
                }
                count += 1;
            }
        }
    }
    if !ma.mul(&ma).is_zero() {
        return Err("Ma^2".into());
    }
    let nil = [("M1", &m1), ("M2", &m2), ("M3", &m3)];
    for (a, x) in nil {
        for (b, y) in nil {
            let expected = match (a, b) {
                ("M1", "M2") => m3.clone(),
                ("M2", "M1") => s(&m3, -1),
                _ => zero.clone(),
            };
            if x.mul(y) != expected {
                return Err(format!("product {a} {b}"));
            }
            count += 1;
        }
    }
    Ok(count)
}
