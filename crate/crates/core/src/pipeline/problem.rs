//! Problem files: a TOML document with `field`, `hamiltonian` or `system`,
//! `curve` or `solution`, and optional `options` sections.

use std::collections::BTreeMap;
use std::ops::Range;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;

use crate::diffop::DEFAULT_DEGREE_CAP;
use crate::expr::{eval_element, parse, ExprRing, ParseError, ParseErrorKind};
use crate::field::{Field, FieldElement, FieldError, GaussianRational as G, Poly};
use crate::linsys::{standard_j, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{line}:{column}: {message}")]
    UnknownSymbol { line: usize, column: usize, message: String },
    #[error("inconsistent field: {0}")]
    InconsistentField(String),
    #[error("the curve does not solve the Hamiltonian system (component {0})")]
    NotASolution(usize),
    #[error("{0}")]
    Invalid(String),
}

/// Polynomial in `q1, q2, p1, p2` over `Q(i)`, exponents keyed in that order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MultiPoly {
    terms: BTreeMap<[u32; 4], G>,
}

pub const CANONICAL_VARIABLES: [&str; 4] = ["q1", "q2", "p1", "p2"];

impl MultiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: G) -> Self {
        let mut p = Self::zero();
        p.add_term([0; 4], c);
        p
    }

    pub fn variable(k: usize) -> Self {
        let mut e = [0; 4];
        e[k] = 1;
        let mut p = Self::zero();
        p.add_term(e, G::one());
        p
    }

    fn add_term(&mut self, e: [u32; 4], c: G) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(G::zero);
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; 4], &G)> {
        self.terms.iter()
    }

    pub fn partial(&self, k: usize) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if e[k] > 0 {
                let mut f = *e;
                f[k] -= 1;
                out.add_term(f, c * &G::from_int(e[k] as i64));
            }
        }
        out
    }

    pub fn eval(&self, at: &[FieldElement]) -> FieldElement {
        let field = at[0].field();
        let mut s = FieldElement::zero(field);
        for (e, c) in &self.terms {
            let mut term = FieldElement::constant(field, c.clone());
            for (x, &k) in at.iter().zip(e) {
                if k > 0 {
                    term = &term * &x.pow(k as i32);
                }
            }
            s = &s + &term;
        }
        s
    }

    /// Parses a polynomial in `q1, q2, p1, p2` and `i`.
    pub fn parse(src: &str) -> Result<Self, ParseError> {
        let ast = parse(src)?;
        let sym = |s: &str| -> Option<MultiPoly> {
            if s == "i" {
                return Some(MultiPoly::constant(G::i()));
            }
            CANONICAL_VARIABLES.iter().position(|v| *v == s).map(MultiPoly::variable)
        };
        let int = |n: &BigInt| MultiPoly::constant(G::from_rational(BigRational::from_integer(n.clone())));
        ast.eval(src, &sym, &int)
    }
}

impl ExprRing for MultiPoly {
    fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3]];
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
    /// Only division by nonzero constants.
    fn div(&self, o: &Self) -> Option<Self> {
        let c = o.terms.get(&[0; 4]).filter(|_| o.terms.len() == 1)?.inv()?;
        Some(Self { terms: self.terms.iter().map(|(e, x)| (*e, x * &c)).collect() })
    }
    fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
    fn pow(&self, e: i64) -> Option<Self> {
        if e < 0 {
            return None;
        }
        Some((0..e).fold(Self::constant(G::one()), |acc, _| acc.mul(self)))
    }
}

/// Textual description of the working field, kept for reports and replay.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub variable: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extension: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
}

impl FieldDescriptor {
    pub fn build(&self) -> Result<Arc<Field>, ProblemError> {
        let bad = |m: String| ProblemError::InconsistentField(m);
        if !self.variable.chars().all(|c| c.is_ascii_alphabetic()) || ["i", "sqrtD"].contains(&self.variable.as_str()) {
            return Err(bad(format!("'{}' cannot be the field variable", self.variable)));
        }
        let base = match &self.extension {
            None => Field::rational(&self.variable),
            Some(src) => Field::with_extension(&self.variable, &parse_polynomial(src, &self.variable)?)
                .map_err(|e: FieldError| bad(e.to_string()))?,
        };
        match &self.weight {
            None => Ok(base),
            Some(src) => {
                let w = parse_element_at(src, &base, None)?;
                base.with_weight(&w).map_err(|e| bad(e.to_string()))
            }
        }
    }

    /// The same field with the plain derivation.
    pub fn plain(&self) -> Self {
        Self { weight: None, ..self.clone() }
    }
}

/// A polynomial of `Q(i)[var]` written in the expression grammar.
pub fn parse_polynomial(src: &str, var: &str) -> Result<Poly, ProblemError> {
    let f = Field::rational(var);
    let e = parse_element_at(src, &f, None)?;
    if !e.a().den().is_one() {
        return Err(ProblemError::InconsistentField(format!("'{src}' is not a polynomial")));
    }
    Ok(e.a().num().clone())
}

fn locate(err: ParseError, origin: Option<(usize, usize)>) -> ProblemError {
    let (line, column) = match origin {
        Some((l, c)) if err.line == 1 => (l, c + err.column - 1),
        Some((l, _)) => (l + err.line - 1, err.column),
        None => (err.line, err.column),
    };
    match err.kind {
        ParseErrorKind::UnknownSymbol => ProblemError::UnknownSymbol { line, column, message: err.message },
        _ => ProblemError::Syntax { line, column, message: err.message },
    }
}

fn parse_element_at(src: &str, field: &Arc<Field>, origin: Option<(usize, usize)>) -> Result<FieldElement, ProblemError> {
    let ast = parse(src).map_err(|e| locate(e, origin))?;
    eval_element(&ast, src, field).map_err(|e| locate(e, origin))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemOptions {
    pub degree_cap: usize,
    pub simplify: bool,
}

impl Default for ProblemOptions {
    fn default() -> Self {
        Self { degree_cap: DEFAULT_DEGREE_CAP, simplify: true }
    }
}

#[derive(Debug, Clone)]
pub enum ProblemMode {
    /// `H` and an integral curve `z(t)`.
    Hamiltonian { h: MultiPoly, source: String, curve: Vec<FieldElement> },
    /// `Y' = AY` and a particular solution.
    System { a: Matrix, solution: Vec<FieldElement> },
}

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub name: Option<String>,
    pub descriptor: FieldDescriptor,
    pub field: Arc<Field>,
    pub mode: ProblemMode,
    pub options: ProblemOptions,
}

/// Command-line overrides applied before the field is built.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub extension: Option<String>,
    pub degree_cap: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    name: Option<String>,
    field: RawField,
    hamiltonian: Option<RawHamiltonian>,
    system: Option<RawSystem>,
    curve: Option<RawColumn>,
    solution: Option<RawColumn>,
    #[serde(default)]
    options: RawOptions,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    variable: String,
    extension: Option<String>,
    weight: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHamiltonian {
    #[serde(rename = "H")]
    h: Spanned<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    #[serde(rename = "A")]
    a: Vec<Vec<Spanned<String>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawColumn {
    z: Vec<Spanned<String>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOptions {
    degree_cap: Option<usize>,
    simplify: Option<bool>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |k| k + 1) + 1;
    (line, column)
}

/// Position of the first character inside a quoted TOML string.
fn origin(text: &str, span: Range<usize>) -> (usize, usize) {
    let (l, c) = line_col(text, span.start);
    (l, c + 1)
}

pub fn parse_problem(text: &str) -> Result<ProblemSpec, ProblemError> {
    parse_problem_with(text, &Overrides::default())
}

pub fn parse_problem_with(text: &str, overrides: &Overrides) -> Result<ProblemSpec, ProblemError> {
    let raw: RawProblem = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        ProblemError::Syntax { line, column, message: e.message().to_string() }
    })?;
    let descriptor = FieldDescriptor {
        variable: raw.field.variable,
        extension: overrides.extension.clone().or(raw.field.extension),
        weight: raw.field.weight,
    };
    let field = descriptor.build()?;
    let element = |s: &Spanned<String>| parse_element_at(s.get_ref(), &field, Some(origin(text, s.span())));
    let column = |c: &RawColumn| -> Result<Vec<FieldElement>, ProblemError> {
        if c.z.len() != 4 {
            return Err(ProblemError::Invalid(format!("expected 4 components, found {}", c.z.len())));
        }
        c.z.iter().map(element).collect()
    };
    let mode = match (&raw.hamiltonian, &raw.system) {
        (Some(h), None) => {
            let curve = raw.curve.as_ref().ok_or_else(|| ProblemError::Invalid("hamiltonian mode needs a [curve] section".into()))?;
            let poly = MultiPoly::parse(h.h.get_ref()).map_err(|e| locate(e, Some(origin(text, h.h.span()))))?;
            ProblemMode::Hamiltonian { h: poly, source: h.h.get_ref().clone(), curve: column(curve)? }
        }
        (None, Some(s)) => {
            let sol = raw.solution.as_ref().ok_or_else(|| ProblemError::Invalid("system mode needs a [solution] section".into()))?;
            if s.a.len() != 4 || s.a.iter().any(|r| r.len() != 4) {
                return Err(ProblemError::Invalid("A must be a 4x4 matrix".into()));
            }
            let rows = s.a.iter().map(|r| r.iter().map(element).collect::<Result<Vec<_>, _>>()).collect::<Result<Vec<_>, _>>()?;
            let a = Matrix::from_rows(&field, rows);
            ProblemMode::System { a, solution: column(sol)? }
        }
        _ => return Err(ProblemError::Invalid("exactly one of [hamiltonian] and [system] is required".into())),
    };
    let mut options = ProblemOptions::default();
    if let Some(c) = raw.options.degree_cap {
        options.degree_cap = c;
    }
    if let Some(s) = raw.options.simplify {
        options.simplify = s;
    }
    if let Some(c) = overrides.degree_cap {
        options.degree_cap = c;
    }
    Ok(ProblemSpec { name: raw.name, descriptor, field, mode, options })
}

/// The variational matrix and the particular solution `z'` it must carry.
pub fn build_variational(spec: &ProblemSpec) -> Result<(Matrix, Vec<FieldElement>), ProblemError> {
    let invalid = |e: crate::linsys::LinsysError| ProblemError::Invalid(e.to_string());
    match &spec.mode {
        ProblemMode::System { a, solution } => {
            crate::nve::check_solution(a, solution).map_err(|e| match e {
                crate::nve::NveError::NotASolution(k) => ProblemError::NotASolution(k),
                other => ProblemError::Invalid(other.to_string()),
            })?;
            Ok((a.clone(), solution.clone()))
        }
        ProblemMode::Hamiltonian { h, curve, .. } => {
            let f = &spec.field;
            let grad: Vec<MultiPoly> = (0..4).map(|k| h.partial(k)).collect();
            let j = standard_j(f, 2);
            let grad_at = Matrix::from_columns(f, &[grad.iter().map(|g| g.eval(curve)).collect()]);
            let flow = j.try_mul(&grad_at).map_err(invalid)?;
            let zp: Vec<FieldElement> = curve.iter().map(FieldElement::derive).collect();
            if let Some(k) = (0..4).find(|&k| flow.get(k, 0) != &zp[k]) {
                return Err(ProblemError::NotASolution(k));
            }
            let hess: Vec<Vec<FieldElement>> =
                (0..4).map(|r| (0..4).map(|c| grad[r].partial(c).eval(curve)).collect()).collect();
            let a = j.try_mul(&Matrix::from_rows(f, hess)).map_err(invalid)?;
            Ok((a, zp))
        }
    }
}
