//! Classification of trace-zero 2x2 systems: two, one or no solutions in the field,
//! exponential solutions, and the matching 2x2 reduction matrix.

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::diffop::{
    exponents_at, local_exponents, rational_solutions, risch_solve, DiffOp, DiffOpError, SingularPoint,
    SolveOptions,
};
use crate::field::{FieldElement, GaussianRational as G, Poly, RatFunc};
use crate::linalg::linear_relations;
use crate::linsys::{gauge, LinsysError, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KovacicError {
    #[error("the system matrix has nonzero trace")]
    NonZeroTrace,
    #[error("expected a 2x2 matrix")]
    WrongSize,
    #[error("no cyclic vector among the tried constant vectors")]
    DegenerateCyclicVector,
    #[error(transparent)]
    DiffOp(#[from] DiffOpError),
    #[error(transparent)]
    Linsys(#[from] LinsysError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum NveCase {
    /// Two independent solutions in the field: the identity component is trivial.
    Finite,
    /// Exactly one solution in the field: additive group.
    Additive,
    /// Two exponential solutions with rates `a` and `-a`: multiplicative group.
    Multiplicative,
    /// One exponential solution only: triangular.
    Borel,
    /// No solution of the searched shapes.
    FullOrUnknown,
}

/// Scalar form of a 2x2 system via a constant cyclic vector `lambda`.
#[derive(Debug, Clone)]
pub struct ScalarForm {
    /// `D^2 - c1 D - c0`, annihilating `u = lambda . Y`.
    pub operator: DiffOp,
    pub cyclic_vector: (i64, i64),
    /// Rows `lambda` and `lambda N`: `(u, Du) = basis * Y`.
    pub basis: Matrix,
}

impl ScalarForm {
    /// The vector solution whose scalar component is `u`.
    pub fn reconstruct(&self, u: &FieldElement) -> Vec<FieldElement> {
        self.from_rate(u, &u.derive())
    }

    /// `basis^{-1} (x, y)`.
    fn from_rate(&self, x: &FieldElement, y: &FieldElement) -> Vec<FieldElement> {
        let inv = self.basis.inverse().expect("cyclic basis is invertible");
        let v = Matrix::from_columns(self.basis.field(), &[vec![x.clone(), y.clone()]]);
        inv.try_mul(&v).unwrap().column(0)
    }
}

const CYCLIC_CANDIDATES: [(i64, i64); 5] = [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2)];

fn check_trace_zero(n: &Matrix) -> Result<(), KovacicError> {
    if n.rows() != 2 || n.cols() != 2 {
        return Err(KovacicError::WrongSize);
    }
    if !n.trace().is_zero() {
        return Err(KovacicError::NonZeroTrace);
    }
    Ok(())
}

/// Scalarizes `Y' = N Y` with the first constant cyclic vector that works.
pub fn system_to_scalar(n: &Matrix) -> Result<ScalarForm, KovacicError> {
    check_trace_zero(n)?;
    let f = n.field().clone();
    for (l0, l1) in CYCLIC_CANDIDATES {
        let r0 = Matrix::from_rows(&f, vec![vec![FieldElement::int(&f, l0), FieldElement::int(&f, l1)]]);
        let r1 = r0.try_mul(n)?;
        let r2 = r1.derive().try_add(&r1.try_mul(n)?)?;
        let basis = Matrix::from_rows(&f, vec![r0.row(0), r1.row(0)]);
        let Ok(inv) = basis.inverse() else {
            continue;
        };
        let c = r2.try_mul(&inv)?;
        let op = DiffOp::new(&f, vec![-c.get(0, 0), -c.get(0, 1), FieldElement::one(&f)]);
        return Ok(ScalarForm { operator: op, cyclic_vector: (l0, l1), basis });
    }
    Err(KovacicError::DegenerateCyclicVector)
}

/// Result of the classification.
#[derive(Debug, Clone)]
pub struct NveClassification {
    pub case: NveCase,
    /// Reduction matrix with determinant one.
    pub p: Matrix,
    /// `P[N]`.
    pub reduced: Matrix,
    /// Raw radicand of the working field's extension, if any.
    pub extension_used: Option<Poly>,
    pub witness: Witness,
}

#[derive(Debug, Clone, Default)]
pub struct Witness {
    /// Solutions in the field, as columns.
    pub solutions: Vec<Vec<FieldElement>>,
    /// Rate `a` of an exponential solution (`Y = exp(int a) W`).
    pub rate: Option<FieldElement>,
    /// Cyclic vector and scalar operator used.
    pub scalar: Option<(i64, i64)>,
    pub operator: Option<DiffOp>,
}

fn det_one(y1: &[FieldElement], y2: &[FieldElement]) -> Matrix {
    let f = y1[0].field().clone();
    let p = Matrix::from_columns(&f, &[y1.to_vec(), y2.to_vec()]);
    let d = p.det().unwrap();
    let y2: Vec<FieldElement> = y2.iter().map(|x| x / &d).collect();
    Matrix::from_columns(&f, &[y1.to_vec(), y2])
}

/// Second column with `det (w, f2) = 1`.
fn complete(w: &[FieldElement]) -> Vec<FieldElement> {
    let f = w[0].field();
    if !w[0].is_zero() {
        vec![FieldElement::zero(f), w[0].inv().unwrap()]
    } else {
        vec![-&w[1].inv().unwrap(), FieldElement::zero(f)]
    }
}

/// Classifies `Y' = N Y` and returns the reduction matrix of its case.
pub fn classify_and_reduce(n: &Matrix, opts: SolveOptions) -> Result<NveClassification, KovacicError> {
    check_trace_zero(n)?;
    let f = n.field().clone();
    let ext = f.raw_extension().cloned();
    if n.is_zero() {
        // no cyclic vector; constant columns solve it
        let id = Matrix::identity(&f, 2);
        let witness = Witness { solutions: vec![id.column(0), id.column(1)], ..Witness::default() };
        return Ok(NveClassification { case: NveCase::Finite, reduced: n.clone(), p: id, extension_used: ext, witness });
    }
    let scalar = system_to_scalar(n)?;
    let space = rational_solutions(&scalar.operator, opts)?;
    let mut witness = Witness {
        scalar: Some(scalar.cyclic_vector),
        operator: Some(scalar.operator.clone()),
        ..Witness::default()
    };
    let sols: Vec<Vec<FieldElement>> = space.basis.iter().map(|u| scalar.reconstruct(u)).collect();
    let finish = |case, p: Matrix, witness| -> Result<NveClassification, KovacicError> {
        let reduced = gauge(&p, n)?;
        Ok(NveClassification { case, p, reduced, extension_used: ext.clone(), witness })
    };
    match sols.len() {
        2 => {
            let (y1, y2) = echelon_pair(&sols);
            witness.solutions = vec![y1.clone(), y2.clone()];
            return finish(NveCase::Finite, det_one(&y1, &y2), witness);
        }
        1 => {
            let y1 = sols[0].clone();
            let f2 = complete(&y1);
            witness.solutions = vec![y1.clone()];
            return finish(NveCase::Additive, Matrix::from_columns(&f, &[y1, f2]), witness);
        }
        _ => {}
    }
    let zero = FieldElement::zero(&f);
    let one = FieldElement::one(&f);
    // already triangular: diagonalize with a Risch equation
    if n.get(1, 0).is_zero() || n.get(0, 1).is_zero() {
        let s = if n.get(1, 0).is_zero() {
            Matrix::identity(&f, 2)
        } else {
            Matrix::from_rows(&f, vec![vec![zero.clone(), -&one], vec![one.clone(), zero.clone()]])
        };
        let t = gauge(&s, n)?;
        let (case, p) = diagonalize_upper(&t, opts)?;
        witness.rate = Some(t.get(0, 0).clone());
        return finish(case, s.try_mul(&p)?, witness);
    }
    let rates = exponential_rates(&scalar.operator, opts)?;
    let mut found: Vec<(FieldElement, Vec<FieldElement>)> = Vec::new();
    for rate in rates {
        let w = scalar.from_rate(&one, &rate);
        // keep vectors independent over the field
        if let Some((_, w0)) = found.first() {
            let m = Matrix::from_columns(&f, &[w0.clone(), w.clone()]);
            if m.det()?.is_zero() {
                continue;
            }
        }
        found.push((rate, w));
        if found.len() == 2 {
            break;
        }
    }
    match found.len() {
        2 => {
            witness.rate = Some(found[0].0.clone());
            let p = det_one(&found[0].1, &found[1].1);
            finish(NveCase::Multiplicative, p, witness)
        }
        1 => {
            let (rate, w) = found.remove(0);
            witness.rate = Some(rate);
            let p0 = Matrix::from_columns(&f, &[w.clone(), complete(&w)]);
            let t = gauge(&p0, n)?;
            let (case, p) = diagonalize_upper(&t, opts)?;
            finish(case, p0.try_mul(&p)?, witness)
        }
        _ => finish(NveCase::FullOrUnknown, Matrix::identity(&f, 2), witness),
    }
}

/// Orders two independent solutions so that the second has first component zero
/// when some combination allows it.
fn echelon_pair(sols: &[Vec<FieldElement>]) -> (Vec<FieldElement>, Vec<FieldElement>) {
    let rel = linear_relations(&[sols[0][0].clone(), sols[1][0].clone()]);
    if let Some(c) = rel.first() {
        let comb: Vec<FieldElement> = (0..2).map(|i| &sols[0][i].scale(&c[0]) + &sols[1][i].scale(&c[1])).collect();
        let other = if c[1].is_zero() { sols[1].clone() } else { sols[0].clone() };
        return (other, comb);
    }
    (sols[0].clone(), sols[1].clone())
}

/// For upper triangular `T = [[a, b], [0, -a]]`, finds `g` with `Dg = 2 a g + b` so
/// that `[[1, g], [0, 1]]` diagonalizes `T`.
fn diagonalize_upper(t: &Matrix, opts: SolveOptions) -> Result<(NveCase, Matrix), KovacicError> {
    let f = t.field().clone();
    let a = t.get(0, 0);
    let b = t.get(0, 1);
    let g = if b.is_zero() {
        Some(FieldElement::zero(&f))
    } else {
        risch_solve(&(a + a), b, opts)?.solution
    };
    match g {
        Some(g) => {
            let p = Matrix::from_rows(&f, vec![vec![FieldElement::one(&f), g], vec![FieldElement::zero(&f), FieldElement::one(&f)]]);
            Ok((NveCase::Multiplicative, p))
        }
        None => Ok((NveCase::Borel, Matrix::identity(&f, 2))),
    }
}

/// Upper bound on exponent combinations tried in the exponential-solution search.
const COMBINATION_LIMIT: usize = 256;

/// Rates `Du/u` of solutions `u = prod q^e * z` of the scalar operator, with `e` local
/// exponents at the finite singular places and `z` rational. Only operators with
/// coefficients in `Q(i)(t)` after rewriting in `d/dt` are searched.
fn exponential_rates(op: &DiffOp, opts: SolveOptions) -> Result<Vec<FieldElement>, KovacicError> {
    let field = op.field().clone();
    let plain = op.to_plain();
    let Some(base) = plain.to_base() else {
        return Ok(Vec::new());
    };
    let bf = base.field().clone();
    let monic = base.monic();
    let c1 = -&monic.coeff(1);
    let c0 = -&monic.coeff(0);
    let report = local_exponents(&base)?;
    let mut choices: Vec<(Poly, Vec<BigRational>)> = Vec::new();
    for pt in &report.points {
        let SingularPoint::Finite(q) = &pt.point else { continue };
        let ex = exponents_at(&base, q)?;
        let mut classes: Vec<BigRational> = Vec::new();
        for e in &ex.exponents {
            let frac = e - BigRational::from_integer(e.floor().to_integer());
            if !classes.contains(&frac) {
                classes.push(frac);
            }
        }
        if classes.is_empty() {
            return Ok(Vec::new());
        }
        choices.push((q.clone(), classes));
    }
    let total: usize = choices.iter().map(|(_, c)| c.len()).product();
    if total > COMBINATION_LIMIT {
        return Ok(Vec::new());
    }
    let weight = field.weight().rebase(&plain.field().clone()).unwrap();
    let mut rates: Vec<FieldElement> = Vec::new();
    for idx in 0..total {
        let mut k = idx;
        let mut v = RatFunc::zero();
        for (q, classes) in &choices {
            let e = &classes[k % classes.len()];
            k /= classes.len();
            if !e.is_zero() {
                let log_d = RatFunc::new(q.derivative(), q.clone());
                v = &v + &log_d.scale(&G::from_rational(e.clone()));
            }
        }
        let v = FieldElement::from_ratfunc(&bf, v);
        // u = phi z with phi'/phi = v: z'' + (2v - c1) z' + (v' + v^2 - c1 v - c0) z = 0
        let m = DiffOp::new(
            &bf,
            vec![
                &(&(&v.derive() + &(&v * &v)) - &(&c1 * &v)) - &c0,
                &(&v + &v) - &c1,
                FieldElement::one(&bf),
            ],
        );
        for z in rational_solutions(&m, opts)?.basis {
            let rho = &v + &(&z.derive() / &z);
            let rho_plain = FieldElement::from_parts(plain.field(), rho.a().clone(), RatFunc::zero());
            let rate = (&rho_plain * &weight).rebase(&field).unwrap();
            if !rates.contains(&rate) {
                rates.push(rate);
            }
        }
    }
    Ok(rates)
}
