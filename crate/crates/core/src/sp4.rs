//! Lifting 2x2 reductions to `Sp(4)`, the three reduced shapes, and the abelianity
//! criteria with replayable certificates and obstructions.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::diffop::{
    integrable_combinations, local_exponents, rational_solutions, risch_solve, DiffOp, DiffOpError,
    ExponentReport, SolveOptions,
};
use crate::field::{hermite_split, Field, FieldElement, FieldError, GaussianRational as G};
use crate::kovacic2::{NveCase, NveClassification};
use crate::linsys::{associated_lie_algebra, gauge, ConstLieAlgebra, ConstMatrix, LinsysError, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Sp4Error {
    #[error("the 2x2 reduction matrix does not have determinant one")]
    NonUnimodular,
    #[error("the matrix does not have any reduced shape: {0}")]
    ShapeMismatch(String),
    #[error("the normal variational equation is not in an abelian case")]
    NotAbelianNve,
    #[error("simplification needs the plain derivation and coefficients in Q(i)(t)")]
    UnsupportedField,
    #[error("the associated Lie algebra is not abelian")]
    NotAbelian,
    #[error(transparent)]
    DiffOp(#[from] DiffOpError),
    #[error(transparent)]
    Linsys(#[from] LinsysError),
}

/// Embeds a unimodular 2x2 matrix in rows and columns 2 and 4.
pub fn lift_reduction(p: &Matrix) -> Result<Matrix, Sp4Error> {
    if p.rows() != 2 || p.cols() != 2 {
        return Err(Sp4Error::ShapeMismatch("expected a 2x2 reduction matrix".into()));
    }
    if !p.det()?.is_one() {
        return Err(Sp4Error::NonUnimodular);
    }
    let mut out = Matrix::identity(p.field(), 4);
    for (i, pi) in [1usize, 3].into_iter().enumerate() {
        for (j, pj) in [1usize, 3].into_iter().enumerate() {
            out.set(pi, pj, p.get(i, j).clone());
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ShapeCase {
    TrivialGN,
    AdditiveGN,
    MultiplicativeGN,
}

/// `B = a12 M1 + a14 M2 + a13 M3 (+ a24 Ma | + a22 Mm)`.
#[derive(Debug, Clone)]
pub struct ReducedShape {
    pub case: ShapeCase,
    pub a12: FieldElement,
    pub a13: FieldElement,
    pub a14: FieldElement,
    pub a24: Option<FieldElement>,
    pub a22: Option<FieldElement>,
}

impl ReducedShape {
    pub fn field(&self) -> &Arc<Field> {
        self.a12.field()
    }

    pub fn reconstruct(&self) -> Matrix {
        let f = self.field();
        let mut terms = vec![
            (&self.a12, ConstMatrix::m1()),
            (&self.a14, ConstMatrix::m2()),
            (&self.a13, ConstMatrix::m3()),
        ];
        if let Some(a) = &self.a24 {
            terms.push((a, ConstMatrix::ma()));
        }
        if let Some(a) = &self.a22 {
            terms.push((a, ConstMatrix::mm()));
        }
        combination(f, &terms)
    }

    /// Reads the shape off a matrix, without checking side conditions.
    pub fn read(b: &Matrix) -> Result<Self, Sp4Error> {
        if b.rows() != 4 || b.cols() != 4 {
            return Err(Sp4Error::ShapeMismatch("expected a 4x4 matrix".into()));
        }
        let a22 = b.get(1, 1).clone();
        let a24 = b.get(1, 3).clone();
        let case = match (a22.is_zero(), a24.is_zero()) {
            (true, true) => ShapeCase::TrivialGN,
            (true, false) => ShapeCase::AdditiveGN,
            (false, true) => ShapeCase::MultiplicativeGN,
            (false, false) => return Err(Sp4Error::ShapeMismatch("both M_a and M_m components present".into())),
        };
        let shape = ReducedShape {
            case,
            a12: b.get(0, 1).clone(),
            a13: b.get(0, 2).clone(),
            a14: b.get(0, 3).clone(),
            a24: (case == ShapeCase::AdditiveGN).then_some(a24),
            a22: (case == ShapeCase::MultiplicativeGN).then_some(a22),
        };
        if &shape.reconstruct() != b {
            return Err(Sp4Error::ShapeMismatch(format!("{b:?}")));
        }
        Ok(shape)
    }
}

fn combination(f: &Arc<Field>, terms: &[(&FieldElement, ConstMatrix)]) -> Matrix {
    terms.iter().fold(Matrix::zeros(f, 4, 4), |acc, (c, m)| {
        acc.try_add(&Matrix::from_const(f, m).scale(c)).unwrap()
    })
}

/// A failed side condition of the table and the gauge that removes it.
#[derive(Debug, Clone)]
pub struct SideCondition {
    pub description: String,
    /// `L` with `DL = a24`, or `E` with `DE = a22 E`.
    pub witness: FieldElement,
    pub gauge: Matrix,
}

/// The reduced shape of a system and the symplectic gauge leading to it.
#[derive(Debug, Clone)]
pub struct TableForm {
    pub shape: ReducedShape,
    pub b: Matrix,
    /// Gauge from the input matrix to `b`.
    pub p: Matrix,
    pub side_conditions: Vec<SideCondition>,
}

/// Reads the shape of `b`, checks the side conditions and reclassifies when one fails.
pub fn classify_shape(b: &Matrix, opts: SolveOptions) -> Result<TableForm, Sp4Error> {
    let f = b.field().clone();
    let mut b = b.clone();
    let mut p = Matrix::identity(&f, 4);
    let mut side_conditions = Vec::new();
    loop {
        let shape = ReducedShape::read(&b)?;
        let side = match shape.case {
            ShapeCase::TrivialGN => None,
            ShapeCase::AdditiveGN => {
                let a24 = shape.a24.clone().unwrap();
                let sol = integrable_combinations(&FieldElement::zero(&f), &[a24], opts)?;
                sol.pairs.first().map(|(c, h)| {
                    let l = h.scale(&c[0].inv().unwrap());
                    let q = Matrix::identity(&f, 4).try_add(&Matrix::from_const(&f, &ConstMatrix::ma()).scale(&l)).unwrap();
                    SideCondition { description: "the integral of a24 lies in the field".into(), witness: l, gauge: q }
                })
            }
            ShapeCase::MultiplicativeGN => {
                let a22 = shape.a22.clone().unwrap();
                let space = rational_solutions(&DiffOp::first_order(&a22), opts)?;
                space.basis.first().map(|e| {
                    let mut q = Matrix::identity(&f, 4);
                    q.set(1, 1, e.clone());
                    q.set(3, 3, e.inv().unwrap());
                    SideCondition { description: "exp(int a22) lies in the field".into(), witness: e.clone(), gauge: q }
                })
            }
        };
        match side {
            None => return Ok(TableForm { shape, b, p, side_conditions }),
            Some(sc) => {
                b = gauge(&sc.gauge, &b)?;
                p = p.try_mul(&sc.gauge)?;
                side_conditions.push(sc);
            }
        }
    }
}

/// `B = P_N[A_N]` with `P_N` lifted from the 2x2 classification, read into a shape.
pub fn table_form(a_n: &Matrix, cls: &NveClassification, opts: SolveOptions) -> Result<TableForm, Sp4Error> {
    if !matches!(cls.case, NveCase::Finite | NveCase::Additive | NveCase::Multiplicative) {
        return Err(Sp4Error::NotAbelianNve);
    }
    let p_n = lift_reduction(&cls.p)?;
    let b = gauge(&p_n, a_n)?;
    let mut form = classify_shape(&b, opts)?;
    form.p = p_n.try_mul(&form.p)?;
    Ok(form)
}

/// Maximal abelian subalgebra families of the theorem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    /// `span(M3)`.
    M3,
    /// `span(alpha1 M1 + alpha2 M2, M3)`.
    Line { alpha1: G, alpha2: G },
    /// `span(M2, M3, Ma)`.
    AdditiveFull,
    /// `span(Ma + alpha1 M1 + alpha2 M2, M3)`.
    AdditiveLine { alpha1: G, alpha2: G },
    /// `span(Mm, M3)`.
    Multiplicative,
}

impl Target {
    pub fn basis(&self) -> Vec<ConstMatrix> {
        let (m1, m2, m3, ma, mm) = (ConstMatrix::m1(), ConstMatrix::m2(), ConstMatrix::m3(), ConstMatrix::ma(), ConstMatrix::mm());
        match self {
            Target::M3 => vec![m3],
            Target::Line { alpha1, alpha2 } => vec![m1.scale(alpha1).add(&m2.scale(alpha2)), m3],
            Target::AdditiveFull => vec![m2, m3, ma],
            Target::AdditiveLine { alpha1, alpha2 } => vec![ma.add(&m1.scale(alpha1)).add(&m2.scale(alpha2)), m3],
            Target::Multiplicative => vec![mm, m3],
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Target::M3 => "span(M3)".into(),
            Target::Line { alpha1, alpha2 } => format!("span(({alpha1})*M1+({alpha2})*M2, M3)"),
            Target::AdditiveFull => "span(M2, M3, Ma)".into(),
            Target::AdditiveLine { alpha1, alpha2 } => format!("span(Ma+({alpha1})*M1+({alpha2})*M2, M3)"),
            Target::Multiplicative => "span(Mm, M3)".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AbelianityCertificate {
    pub condition: String,
    pub target: Target,
    pub y1: FieldElement,
    pub y2: FieldElement,
    pub p: Matrix,
    pub reduced: Matrix,
}

impl AbelianityCertificate {
    /// Recomputes the gauge and checks the reduced matrix against the target.
    pub fn replay(&self, b: &Matrix) -> Result<(), String> {
        let g = gauge(&self.p, b).map_err(|e| e.to_string())?;
        if g != self.reduced {
            return Err("gauge(P, B) differs from the stated reduced matrix".into());
        }
        check_in_target(&self.reduced, &self.target)
    }
}

fn check_in_target(reduced: &Matrix, target: &Target) -> Result<(), String> {
    check_in_span(reduced, &target.basis()).map_err(|e| format!("{e} ({})", target.describe()))
}

/// Every component of `reduced` lies in the span of `basis`, and its associated Lie
/// algebra is abelian.
pub fn check_in_span(reduced: &Matrix, basis: &[ConstMatrix]) -> Result<(), String> {
    let (dec, alg) = associated_lie_algebra(reduced);
    let span = ConstLieAlgebra::generated_by(basis);
    if let Some((_, m)) = dec.iter().find(|(_, m)| !span.contains(m)) {
        return Err(format!("component {m:?} outside the target span"));
    }
    if !alg.is_abelian() {
        return Err("associated Lie algebra is not abelian".into());
    }
    Ok(())
}

/// A first-order equation `Dy = f y + g` that has no solution in the field.
#[derive(Debug, Clone)]
pub struct RischInstance {
    pub f: FieldElement,
    pub g: FieldElement,
    pub operator: DiffOp,
}

/// `sum c_i g_i` has an antiderivative only for `c = 0`, or only with `c_0 = 0`.
#[derive(Debug, Clone)]
pub struct ParametricInstance {
    pub gs: Vec<FieldElement>,
    pub first_required: bool,
}

#[derive(Debug, Clone)]
pub struct Obstruction {
    pub statement: String,
    pub parametric: Vec<ParametricInstance>,
    /// Parameter-free operators `LCLM(D - g_i'/g_i) D` of the parametric instances.
    pub operators: Vec<DiffOp>,
    pub exponents: Vec<Option<ExponentReport>>,
    pub solutions: Vec<Vec<FieldElement>>,
    pub risch: Vec<RischInstance>,
}

impl Obstruction {
    fn new(statement: String) -> Self {
        Self { statement, parametric: Vec::new(), operators: Vec::new(), exponents: Vec::new(), solutions: Vec::new(), risch: Vec::new() }
    }

    fn add_parametric(&mut self, gs: Vec<FieldElement>, first_required: bool, op: DiffOp, opts: SolveOptions) -> Result<(), Sp4Error> {
        self.parametric.push(ParametricInstance { gs, first_required });
        let sols = rational_solutions(&op, opts)?.basis;
        self.exponents.push(local_exponents(&op).ok());
        self.solutions.push(sols);
        self.operators.push(op);
        Ok(())
    }

    /// Recomputes every solver call: the parametric instances give no admissible
    /// combination and the Risch instances have no solution.
    pub fn replay(&self, opts: SolveOptions) -> Result<(), String> {
        for ((inst, op), sols) in self.parametric.iter().zip(&self.operators).zip(&self.solutions) {
            let zero = FieldElement::zero(inst.gs[0].field());
            let sol = integrable_combinations(&zero, &inst.gs, opts).map_err(|e| e.to_string())?;
            if &sol.operator != op {
                return Err("the recomputed operator differs".into());
            }
            let s = rational_solutions(op, opts).map_err(|e| e.to_string())?;
            if s.basis.len() != sols.len() {
                return Err(format!("operator has {} rational solutions, {} recorded", s.basis.len(), sols.len()));
            }
            if sol.pairs.iter().any(|(c, _)| if inst.first_required { !c[0].is_zero() } else { c.iter().any(|x| !x.is_zero()) }) {
                return Err("an admissible combination has an antiderivative".into());
            }
        }
        for r in &self.risch {
            let out = risch_solve(&r.f, &r.g, opts).map_err(|e| e.to_string())?;
            if out.solution.is_some() {
                return Err("a Risch instance has a solution".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Abelian(Box<AbelianityCertificate>),
    NonAbelian(Box<Obstruction>),
    Inconclusive(String),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Abelian(_) => "Abelian",
            Verdict::NonAbelian(_) => "NonAbelian",
            Verdict::Inconclusive(_) => "Inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

fn unipotent(f: &Arc<Field>, y1: &FieldElement, y2: &FieldElement) -> Matrix {
    Matrix::identity(f, 4)
        .try_add(&combination(f, &[(y1, ConstMatrix::m1()), (y2, ConstMatrix::m2())]))
        .unwrap()
}

fn certify(b: &Matrix, condition: &str, target: Target, y1: FieldElement, y2: FieldElement) -> Result<Verdict, Sp4Error> {
    let f = b.field().clone();
    let p = unipotent(&f, &y1, &y2);
    let reduced = gauge(&p, b)?;
    check_in_target(&reduced, &target).map_err(Sp4Error::ShapeMismatch)?;
    Ok(Verdict::Abelian(Box::new(AbelianityCertificate { condition: condition.into(), target, y1, y2, p, reduced })))
}

/// Case `g_N = 0`: antiderivatives of `a12` and `a14`, or of a combination.
pub fn abelianity_trivial(shape: &ReducedShape, opts: SolveOptions) -> Result<Verdict, Sp4Error> {
    let f = shape.field().clone();
    let b = shape.reconstruct();
    let zero = FieldElement::zero(&f);
    let sol = integrable_combinations(&zero, &[shape.a12.clone(), shape.a14.clone()], opts)?;
    match sol.pairs.as_slice() {
        [(c1, h1), (c2, h2)] => {
            // unit coefficient vectors
            let det = &(&c1[0] * &c2[1]) - &(&c2[0] * &c1[1]);
            let inv = det.inv().unwrap();
            let y1 = &h1.scale(&(&c2[1] * &inv)) - &h2.scale(&(&c1[1] * &inv));
            let y2 = &h2.scale(&(&c1[0] * &inv)) - &h1.scale(&(&c2[0] * &inv));
            certify(&b, "both a12 and a14 have antiderivatives", Target::M3, y1, y2)
        }
        [(c, y)] => {
            // Dy = alpha2 a12 - alpha1 a14
            let alpha2 = c[0].clone();
            let alpha1 = -&c[1];
            let (u1, u2) = if alpha1.is_zero() {
                (y.scale(&alpha2.inv().unwrap()), zero.clone())
            } else if alpha2.is_zero() {
                (zero.clone(), -&y.scale(&alpha1.inv().unwrap()))
            } else {
                let two = G::from_int(2);
                (y.scale(&(&two * &alpha2).inv().unwrap()), -&y.scale(&(&two * &alpha1).inv().unwrap()))
            };
            certify(&b, "a combination alpha2 a12 - alpha1 a14 has an antiderivative", Target::Line { alpha1, alpha2 }, u1, u2)
        }
        _ => {
            let mut ob = Obstruction::new("no nonzero constant combination of a12 and a14 has an antiderivative in the field".into());
            ob.add_parametric(vec![shape.a12.clone(), shape.a14.clone()], false, sol.operator, opts)?;
            Ok(Verdict::NonAbelian(Box::new(ob)))
        }
    }
}

/// `(alpha, y)` with `Dy = a - alpha b`, when it exists; `b` has no antiderivative.
fn shifted_antiderivative(
    a: &FieldElement,
    b: &FieldElement,
    opts: SolveOptions,
) -> Result<(Option<(G, FieldElement)>, DiffOp), Sp4Error> {
    let zero = FieldElement::zero(a.field());
    let sol = integrable_combinations(&zero, &[a.clone(), b.clone()], opts)?;
    let found = sol.pairs.iter().find(|(c, _)| !c[0].is_zero()).map(|(c, h)| {
        let s = c[0].inv().unwrap();
        (-&(&c[1] * &s), h.scale(&s))
    });
    Ok((found, sol.operator))
}

/// Case `g_N = g_a`.
pub fn abelianity_additive(shape: &ReducedShape, opts: SolveOptions) -> Result<Verdict, Sp4Error> {
    let f = shape.field().clone();
    let b = shape.reconstruct();
    let zero = FieldElement::zero(&f);
    let a24 = shape.a24.clone().ok_or_else(|| Sp4Error::ShapeMismatch("additive shape without a24".into()))?;
    let first = integrable_combinations(&zero, std::slice::from_ref(&shape.a12), opts)?;
    if let Some((c, h)) = first.pairs.first() {
        let y1 = h.scale(&c[0].inv().unwrap());
        return certify(&b, "a12 has an antiderivative", Target::AdditiveFull, y1, zero);
    }
    let (step1, op1) = shifted_antiderivative(&shape.a12, &a24, opts)?;
    let Some((alpha1, y1)) = step1 else {
        let mut ob = Obstruction::new("no constant alpha1 makes a12 - alpha1 a24 integrable in the field".into());
        ob.add_parametric(vec![shape.a12.clone(), a24.clone()], true, op1, opts)?;
        return Ok(Verdict::NonAbelian(Box::new(ob)));
    };
    let rest = &shape.a14 - &(&a24 * &y1);
    let (step2, op2) = shifted_antiderivative(&rest, &a24, opts)?;
    let Some((alpha2, y2)) = step2 else {
        let mut ob = Obstruction::new("no constant alpha2 makes a14 - a24 y1 - alpha2 a24 integrable in the field".into());
        ob.add_parametric(vec![rest.clone(), a24.clone()], true, op2, opts)?;
        return Ok(Verdict::NonAbelian(Box::new(ob)));
    };
    certify(&b, "limited integration in alpha1 then alpha2", Target::AdditiveLine { alpha1, alpha2 }, y1, y2)
}

/// Case `g_N = g_m`.
pub fn abelianity_multiplicative(shape: &ReducedShape, opts: SolveOptions) -> Result<Verdict, Sp4Error> {
    let b = shape.reconstruct();
    let a22 = shape.a22.clone().ok_or_else(|| Sp4Error::ShapeMismatch("multiplicative shape without a22".into()))?;
    let r1 = risch_solve(&-&a22, &shape.a12, opts)?;
    let r2 = risch_solve(&a22, &shape.a14, opts)?;
    match (r1.solution, r2.solution) {
        (Some(y1), Some(y2)) => certify(&b, "both Risch equations are solvable", Target::Multiplicative, y1, y2),
        (s1, s2) => {
            let mut ob = Obstruction::new("the Risch system has no solution in the field".into());
            if s1.is_none() {
                ob.risch.push(RischInstance { f: -&a22, g: shape.a12.clone(), operator: r1.operator });
            }
            if s2.is_none() {
                ob.risch.push(RischInstance { f: a22.clone(), g: shape.a14.clone(), operator: r2.operator });
            }
            Ok(Verdict::NonAbelian(Box::new(ob)))
        }
    }
}

/// Runs the criterion matching the shape's case.
pub fn decide(shape: &ReducedShape, opts: SolveOptions) -> Result<Verdict, Sp4Error> {
    match shape.case {
        ShapeCase::TrivialGN => abelianity_trivial(shape, opts),
        ShapeCase::AdditiveGN => abelianity_additive(shape, opts),
        ShapeCase::MultiplicativeGN => abelianity_multiplicative(shape, opts),
    }
}

/// Abelian subalgebras of a target that may still be the Lie algebra of the group.
pub fn subalgebra_report(target: &Target) -> Vec<String> {
    let full = target.describe();
    match target {
        Target::Line { alpha1, alpha2 } => vec![
            "{0}".into(),
            full,
            format!("span(({alpha1})*M1+({alpha2})*M2)"),
            "span(M3)".into(),
        ],
        Target::M3 => vec!["{0}".into(), full],
        Target::AdditiveLine { .. } => vec![
            "{0}".into(),
            full,
            "span(alpha1*M1+alpha2*M2+alpha3*M3+Ma), (alpha1,alpha2,alpha3) in C^3".into(),
        ],
        Target::AdditiveFull => vec![
            "{0}".into(),
            full,
            "span(alpha2*M2+alpha3*M3, Ma), (alpha2,alpha3) in C^2".into(),
            "span(M2, alpha3*M3+Ma), alpha3 in C*".into(),
            "span(M3, alpha2*M2+Ma), alpha2 in C*".into(),
            "span(alpha2*M2+alpha3*M3+Ma), (alpha2,alpha3) in C^2".into(),
        ],
        Target::Multiplicative => vec!["{0}".into(), full, "span(Mm+alpha3*M3), alpha3 in C".into()],
    }
}

/// Removes the derivative parts of the coefficients on nilpotent directions of an
/// abelian system: `B = sum a_i M_i`, `a_i = f_i' + g_i`, `Q = exp(sum f_i M_i)`.
pub fn simplify_reduced(b: &Matrix) -> Result<(Matrix, Matrix), Sp4Error> {
    let field = b.field().clone();
    if !field.is_plain() || b.entries().iter().any(|x| !x.is_base()) {
        return Err(Sp4Error::UnsupportedField);
    }
    let (dec, alg) = associated_lie_algebra(b);
    if !alg.is_abelian() {
        return Err(Sp4Error::NotAbelian);
    }
    let n = b.rows();
    let mut x = Matrix::zeros(&field, n, n);
    for (a, m) in &dec {
        let nilpotent = (0..n).try_fold(m.clone(), |p, _| Some(p.mul(m))).is_some_and(|p| p.is_zero());
        if !nilpotent {
            continue;
        }
        let (fpart, _) = hermite_split(a).map_err(|e: FieldError| match e {
            FieldError::UnsupportedTwistedDerivation | FieldError::UnsupportedRadical => Sp4Error::UnsupportedField,
            other => Sp4Error::DiffOp(other.into()),
        })?;
        if !fpart.is_zero() {
            x = x.try_add(&Matrix::from_const(&field, m).scale(&fpart))?;
        }
    }
    // exp of a nilpotent matrix as a finite series
    let mut q = Matrix::identity(&field, n);
    let mut term = Matrix::identity(&field, n);
    for k in 1..=n {
        term = term.try_mul(&x)?.scale(&FieldElement::constant(&field, G::from_int(k as i64).inv().unwrap()));
        if term.is_zero() {
            break;
        }
        q = q.try_add(&term)?;
    }
    let simplified = gauge(&q, b)?;
    Ok((q, simplified))
}
