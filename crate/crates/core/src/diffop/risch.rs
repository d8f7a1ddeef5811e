//! Risch equations `D y = f y + g` and limited integration in the field.

use super::{rational_solutions, DiffOp, DiffOpError, SolveOptions};
use crate::field::{FieldElement, GaussianRational as G};
use crate::linalg::{independent_subset, linear_relations, rank};

/// Result of a Risch equation: a solution, or the operator whose rational
/// solutions were searched without success.
#[derive(Debug, Clone)]
pub struct RischOutcome {
    pub solution: Option<FieldElement>,
    /// Operator over the plain derivation whose rational solutions were computed.
    pub operator: DiffOp,
    /// Dimension of its rational solution space.
    pub searched_dimension: usize,
}

/// Moves `x` to the plain field and divides by the derivation weight, so that
/// `D y = f y + g` becomes `y' = F y + G`.
fn unweight(x: &FieldElement) -> FieldElement {
    let f = x.field();
    let plain = f.plain();
    let w = f.weight().rebase(&plain).unwrap();
    &x.rebase(&plain).unwrap() / &w
}

/// Decides whether `D y = f y + g` has a solution in the field.
pub fn risch_solve(f: &FieldElement, g: &FieldElement, opts: SolveOptions) -> Result<RischOutcome, DiffOpError> {
    if !f.field().same(g.field()) {
        return Err(DiffOpError::MixedFields);
    }
    let field = f.field().clone();
    let ff = unweight(f);
    let gg = unweight(g);
    let first = DiffOp::first_order(&ff);
    if gg.is_zero() {
        let space = rational_solutions(&first, opts)?;
        return Ok(RischOutcome {
            solution: Some(FieldElement::zero(&field)),
            operator: first,
            searched_dimension: space.dimension(),
        });
    }
    let pf = ff.field().clone();
    let left = DiffOp::new(&pf, vec![-gg.derive(), gg.clone()]);
    let op = left.op_mul(&first)?;
    let space = rational_solutions(&op, opts)?;
    let mut solution = None;
    for y in &space.basis {
        let c = &first.apply(y) / &gg;
        let c = c.as_constant().expect("(D - f) y / g is constant on this solution space");
        if !c.is_zero() {
            let y = y.scale(&c.inv().unwrap());
            solution = Some(y.rebase(&field)?);
            break;
        }
    }
    Ok(RischOutcome { solution, operator: op, searched_dimension: space.dimension() })
}

/// All `(c, h)` with `D h = f h + sum c_i g_i`, `c` constant.
#[derive(Debug, Clone)]
pub struct ParametricSolution {
    /// Pairs whose `c` vectors form a basis of the achievable coefficient vectors.
    pub pairs: Vec<(Vec<G>, FieldElement)>,
    /// Solutions of the homogeneous equation `D h = f h` found along the way.
    pub homogeneous: Vec<FieldElement>,
    /// The parameter-free operator whose rational solutions were computed.
    pub operator: DiffOp,
}

impl ParametricSolution {
    pub fn dimension(&self) -> usize {
        self.pairs.len()
    }
}

/// Solves `D h = f h + sum c_i g_i` for constants `c_i` and `h` in the field, through
/// the rational solutions of `LCLM(d - G_i'/G_i) (d - F)`.
pub fn integrable_combinations(
    f: &FieldElement,
    gs: &[FieldElement],
    opts: SolveOptions,
) -> Result<ParametricSolution, DiffOpError> {
    if gs.iter().any(|g| !g.field().same(f.field())) {
        return Err(DiffOpError::MixedFields);
    }
    let field = f.field().clone();
    let ff = unweight(f);
    let pf = ff.field().clone();
    let gg: Vec<FieldElement> = gs.iter().map(unweight).collect();
    let first = DiffOp::first_order(&ff);
    let factors: Vec<DiffOp> = independent_subset(&gg)
        .into_iter()
        .filter(|&i| !gg[i].is_zero())
        .map(|i| DiffOp::first_order(&(&gg[i].derive() / &gg[i])))
        .collect();
    let op = if factors.is_empty() { first.clone() } else { DiffOp::lclm_many(&factors)?.op_mul(&first)? };
    let space = rational_solutions(&op, opts)?;
    let mut family: Vec<FieldElement> = space.basis.iter().map(|y| first.apply(y)).collect();
    family.extend(gg.iter().cloned());
    let k = space.basis.len();
    let mut pairs: Vec<(Vec<G>, FieldElement)> = Vec::new();
    let mut homogeneous = Vec::new();
    for rel in linear_relations(&family) {
        let c: Vec<G> = rel[k..].iter().map(|x| -x).collect();
        let h = rel[..k]
            .iter()
            .zip(&space.basis)
            .filter(|(l, _)| !l.is_zero())
            .fold(FieldElement::zero(&pf), |acc, (l, y)| &acc + &y.scale(l));
        if c.iter().all(G::is_zero) {
            if !h.is_zero() {
                homogeneous.push(h.rebase(&field)?);
            }
            continue;
        }
        let mut rows: Vec<Vec<G>> = pairs.iter().map(|(c, _)| c.clone()).collect();
        rows.push(c.clone());
        if rank(&rows, gs.len()) == rows.len() {
            pairs.push((c, h.rebase(&field)?));
        }
    }
    Ok(ParametricSolution { pairs, homogeneous, operator: op })
}

/// A solution of `D h = f + beta g`.
#[derive(Debug, Clone)]
pub struct LimitedIntegral {
    pub beta: G,
    /// True when `g` alone has an antiderivative, so that any `beta` works.
    pub beta_free: bool,
    pub h: FieldElement,
}

/// Finds a constant `beta` and `h` in the field with `D h = f + beta g`.
pub fn limited_integration(
    f: &FieldElement,
    g: &FieldElement,
    opts: SolveOptions,
) -> Result<Option<LimitedIntegral>, DiffOpError> {
    if f.is_zero() && g.is_zero() {
        return Err(DiffOpError::DegenerateInput);
    }
    let zero = FieldElement::zero(f.field());
    if f.is_zero() {
        return Ok(Some(LimitedIntegral { beta: G::zero(), beta_free: true, h: zero }));
    }
    let sol = integrable_combinations(&zero, &[f.clone(), g.clone()], opts)?;
    match sol.pairs.as_slice() {
        [(c, h)] if !c[0].is_zero() => {
            let s = c[0].inv().unwrap();
            Ok(Some(LimitedIntegral { beta: &c[1] * &s, beta_free: false, h: h.scale(&s) }))
        }
        [(c1, h1), (c2, h2)] => {
            // combination with coefficient vector (1, 0)
            let det = &(&c1[0] * &c2[1]) - &(&c2[0] * &c1[1]);
            let inv = det.inv().unwrap();
            let l1 = &c2[1] * &inv;
            let l2 = -&(&c1[1] * &inv);
            Ok(Some(LimitedIntegral { beta: G::zero(), beta_free: true, h: &h1.scale(&l1) + &h2.scale(&l2) }))
        }
        _ => Ok(None),
    }
}
