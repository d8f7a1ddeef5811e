//! Report assembly, serialization and replay from serialized form.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::problem::{FieldDescriptor, ProblemMode, ProblemSpec};
use super::Stage;
use crate::diffop::{local_exponents, DiffOp, ExponentReport, SolveOptions};
use crate::expr::parse_element;
use crate::field::{Field, FieldElement};
use crate::kovacic2::NveClassification;
use crate::linsys::{gauge, ConstMatrix, Matrix};
use crate::nve::NormalizedSystem;
use crate::sp4::{
    check_in_span, subalgebra_report, Obstruction, ParametricInstance, RischInstance, TableForm, Verdict,
};
use crate::weinorman::FundamentalMatrixExpr;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

type Grid = Vec<Vec<String>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub problem: Option<String>,
    pub field: FieldDescriptor,
    /// `abelian`, `non_abelian` or `inconclusive`.
    pub verdict: String,
    pub conclusion: String,
    pub trail: Trail,
    pub nve: NveReport,
    pub matrices: BTreeMap<String, Grid>,
    pub identities: Vec<Identity>,
    pub certificate: Option<CertificateReport>,
    pub obstruction: Option<ObstructionReport>,
    pub fundamental: Option<FundamentalReport>,
    pub timings_ms: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trail {
    pub nve_case: String,
    pub table_row: Option<String>,
    pub side_conditions: Vec<String>,
    pub theorem_case: Option<String>,
    pub condition: Option<String>,
    pub target: Option<String>,
    pub subalgebras: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NveReport {
    pub case: String,
    pub cyclic_vector: Option<(i64, i64)>,
    pub scalar_operator: Option<Vec<String>>,
    pub solutions: Vec<Vec<String>>,
    pub rate: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Identity {
    /// `gauge(p, a) = result`, all named matrices.
    Gauge { p: String, a: String, result: String },
    /// The named matrix lies in the span of the basis and is abelian.
    InSpan { matrix: String, basis: Vec<Grid> },
    /// `D y = M y` for a column `y`.
    Solution { matrix: String, column: Vec<String> },
    /// The obstruction recomputes to the same failures.
    Obstruction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub condition: String,
    pub target: String,
    pub y1: String,
    pub y2: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub point: String,
    pub exponents: Vec<String>,
    pub regular: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorReport {
    /// Coefficients from order 0 upwards, plain derivation.
    pub coefficients: Vec<String>,
    pub monic: Vec<String>,
    pub exponents: Vec<PointReport>,
    pub exponent_sets: Vec<Vec<String>>,
    pub rational_solutions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RischReport {
    pub f: String,
    pub g: String,
    pub operator: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParametricReport {
    pub gs: Vec<String>,
    pub first_required: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub statement: String,
    /// Field of the operators and their solutions.
    pub operator_field: FieldDescriptor,
    pub parametric: Vec<ParametricReport>,
    pub operators: Vec<OperatorReport>,
    pub risch: Vec<RischReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FundamentalReport {
    pub primitives: Vec<String>,
    pub matrix: Grid,
    pub verified: bool,
}

pub(super) struct Parts<'a> {
    pub spec: &'a ProblemSpec,
    pub a: &'a Matrix,
    pub z_prime: &'a [FieldElement],
    pub normalized: &'a NormalizedSystem,
    pub classification: &'a NveClassification,
    pub p_n: Option<&'a Matrix>,
    pub table: Option<&'a TableForm>,
    pub verdict: &'a Verdict,
    pub simplified: Option<&'a (Matrix, Matrix)>,
    pub fundamental: Option<&'a (FundamentalMatrixExpr, bool)>,
    pub timings: BTreeMap<String, f64>,
}

fn strings(xs: &[FieldElement]) -> Vec<String> {
    xs.iter().map(FieldElement::to_expr_string).collect()
}

fn const_grid(field: &Arc<Field>, m: &ConstMatrix) -> Grid {
    Matrix::from_const(field, m).to_strings()
}

fn exponent_points(rep: &ExponentReport, var: &str) -> Vec<PointReport> {
    rep.points
        .iter()
        .map(|p| PointReport { point: p.point.display_in(var), exponents: p.exponent_strings(), regular: p.regular })
        .collect()
}

fn operator_report(op: &DiffOp, exps: Option<&ExponentReport>, sols: &[FieldElement]) -> OperatorReport {
    let var = op.field().var().to_string();
    let exponents = exps.map(|r| exponent_points(r, &var)).unwrap_or_default();
    OperatorReport {
        coefficients: op.to_strings(),
        monic: op.monic().to_strings(),
        exponent_sets: exponents.iter().map(|p| p.exponents.clone()).collect(),
        exponents,
        rational_solutions: strings(sols),
    }
}

pub(super) fn assemble(parts: Parts<'_>) -> Result<Report, String> {
    let Parts { spec, a, z_prime, normalized, classification: cls, p_n, table, verdict, simplified, fundamental, timings } =
        parts;
    let f = &spec.field;
    let hamiltonian = matches!(spec.mode, ProblemMode::Hamiltonian { .. });
    let mut matrices = BTreeMap::new();
    let mut identities = Vec::new();
    let mut put = |name: &str, m: &Matrix| {
        matrices.insert(name.to_string(), m.to_strings());
    };
    put("A", a);
    put("P_symplectic", &normalized.p);
    put("A_N", &normalized.a_n);
    put("N", &normalized.n);
    put("P_nve", &cls.p);
    put("N_reduced", &cls.reduced);
    let gauge_id = |p: &str, a: &str, r: &str| Identity::Gauge { p: p.into(), a: a.into(), result: r.into() };
    identities.push(Identity::Solution { matrix: "A".into(), column: strings(z_prime) });
    identities.push(gauge_id("P_symplectic", "A", "A_N"));
    identities.push(gauge_id("P_nve", "N", "N_reduced"));
    for col in &cls.witness.solutions {
        identities.push(Identity::Solution { matrix: "N".into(), column: strings(col) });
    }
    if let Some(p_n) = p_n {
        put("P_N", p_n);
    }
    let mut trail = Trail {
        nve_case: format!("{:?}", cls.case),
        table_row: None,
        side_conditions: Vec::new(),
        theorem_case: None,
        condition: None,
        target: None,
        subalgebras: Vec::new(),
    };
    if let Some(t) = table {
        put("P_table", &t.p);
        put("B", &t.b);
        identities.push(gauge_id("P_table", "A_N", "B"));
        trail.table_row = Some(format!("{:?}", t.shape.case));
        trail.side_conditions = t.side_conditions.iter().map(|s| s.description.clone()).collect();
        trail.theorem_case = Some(
            match t.shape.case {
                crate::sp4::ShapeCase::TrivialGN => "g_N = 0",
                crate::sp4::ShapeCase::AdditiveGN => "g_N = g_a",
                crate::sp4::ShapeCase::MultiplicativeGN => "g_N = g_m",
            }
            .to_string(),
        );
    }
    let mut certificate = None;
    let mut obstruction = None;
    match verdict {
        Verdict::Abelian(c) => {
            put("P_certificate", &c.p);
            put("reduced", &c.reduced);
            identities.push(gauge_id("P_certificate", "B", "reduced"));
            let total = normalized.p.try_mul(&table.unwrap().p).and_then(|x| x.try_mul(&c.p)).map_err(|e| e.to_string())?;
            put("P_total", &total);
            identities.push(gauge_id("P_total", "A", "reduced"));
            identities.push(Identity::InSpan {
                matrix: "reduced".into(),
                basis: c.target.basis().iter().map(|m| const_grid(f, m)).collect(),
            });
            trail.condition = Some(c.condition.clone());
            trail.target = Some(c.target.describe());
            trail.subalgebras = subalgebra_report(&c.target);
            certificate = Some(CertificateReport {
                condition: c.condition.clone(),
                target: c.target.describe(),
                y1: c.y1.to_expr_string(),
                y2: c.y2.to_expr_string(),
            });
            if let Some((q, s)) = simplified {
                put("Q_simplify", q);
                put("simplified", s);
                identities.push(gauge_id("Q_simplify", "reduced", "simplified"));
            }
        }
        Verdict::NonAbelian(o) => {
            trail.condition = Some(o.statement.clone());
            identities.push(Identity::Obstruction);
            let op_field = o.operators.first().map(|op| op.field().clone());
            let op_desc = match &op_field {
                Some(of) if of.is_plain() => spec.descriptor.plain(),
                _ => spec.descriptor.clone(),
            };
            obstruction = Some(ObstructionReport {
                statement: o.statement.clone(),
                operator_field: op_desc,
                parametric: o
                    .parametric
                    .iter()
                    .map(|p| ParametricReport { gs: strings(&p.gs), first_required: p.first_required })
                    .collect(),
                operators: o
                    .operators
                    .iter()
                    .zip(&o.exponents)
                    .zip(&o.solutions)
                    .map(|((op, e), s)| operator_report(op, e.as_ref(), s))
                    .collect(),
                risch: o
                    .risch
                    .iter()
                    .map(|r| RischReport { f: r.f.to_expr_string(), g: r.g.to_expr_string(), operator: r.operator.to_strings() })
                    .collect(),
            });
        }
        Verdict::Inconclusive(reason) => trail.condition = Some(reason.clone()),
    }
    let nve = NveReport {
        case: format!("{:?}", cls.case),
        cyclic_vector: cls.witness.scalar,
        scalar_operator: cls.witness.operator.as_ref().map(DiffOp::to_strings),
        solutions: cls.witness.solutions.iter().map(|c| strings(c)).collect(),
        rate: cls.witness.rate.as_ref().map(FieldElement::to_expr_string),
    };
    let subject = if hamiltonian { "the Hamiltonian system" } else { "the system" };
    let (label, conclusion) = match verdict {
        Verdict::Abelian(_) => (
            "abelian",
            format!("the Lie algebra of the variational equation is abelian: no obstruction to the integrability of {subject} at the first variational level"),
        ),
        Verdict::NonAbelian(_) => (
            "non_abelian",
            format!("the Lie algebra of the variational equation is not abelian: {subject} is not meromorphically Liouville integrable"),
        ),
        Verdict::Inconclusive(r) => ("inconclusive", format!("no decision: {r}")),
    };
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        problem: spec.name.clone(),
        field: spec.descriptor.clone(),
        verdict: label.into(),
        conclusion,
        trail,
        nve,
        matrices,
        identities,
        certificate,
        obstruction,
        fundamental: fundamental.map(|(u, ok)| FundamentalReport {
            primitives: u.primitives.describe(),
            matrix: u.to_strings(),
            verified: *ok,
        }),
        timings_ms: timings,
    })
}

/// Serializes a report; json is pretty-printed with keys in a fixed order.
pub fn emit_report(r: &Report, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => serde_json::to_string_pretty(r).expect("reports serialize") + "\n",
        ReportFormat::Text => text_report(r),
    }
}

fn grid_text(out: &mut String, name: &str, g: &Grid) {
    let _ = writeln!(out, "  {name} =");
    for row in g {
        let _ = writeln!(out, "    [{}]", row.join(", "));
    }
}

fn text_report(r: &Report) -> String {
    let mut out = String::new();
    let w = &mut out;
    if let Some(n) = &r.problem {
        let _ = writeln!(w, "problem: {n}");
    }
    let _ = writeln!(w, "verdict: {}", r.verdict);
    let _ = writeln!(w, "conclusion: {}", r.conclusion);
    let _ = writeln!(w, "trail:");
    let _ = writeln!(w, "  normal variational equation: {}", r.trail.nve_case);
    for (label, v) in [("table row", &r.trail.table_row), ("case", &r.trail.theorem_case), ("condition", &r.trail.condition), ("target", &r.trail.target)] {
        if let Some(v) = v {
            let _ = writeln!(w, "  {label}: {v}");
        }
    }
    for s in &r.trail.side_conditions {
        let _ = writeln!(w, "  side condition failed and was gauged away: {s}");
    }
    if !r.trail.subalgebras.is_empty() {
        let _ = writeln!(w, "  possible Lie algebras: {}", r.trail.subalgebras.join("; "));
    }
    if let Some(c) = &r.certificate {
        let _ = writeln!(w, "certificate: y1 = {}, y2 = {}", c.y1, c.y2);
    }
    if let Some(o) = &r.obstruction {
        let _ = writeln!(w, "obstruction: {}", o.statement);
        for op in &o.operators {
            let _ = writeln!(w, "  monic operator coefficients (order 0 up): [{}]", op.monic.join(", "));
            for p in &op.exponents {
                let _ = writeln!(w, "    exponents at {}: {{{}}}", p.point, p.exponents.join(", "));
            }
            let _ = writeln!(w, "    rational solutions: [{}]", op.rational_solutions.join(", "));
        }
        for rs in &o.risch {
            let _ = writeln!(w, "  no solution of y' = ({}) y + ({})", rs.f, rs.g);
        }
    }
    if let Some(fm) = &r.fundamental {
        let _ = writeln!(w, "fundamental matrix (verified: {}):", fm.verified);
        for p in &fm.primitives {
            let _ = writeln!(w, "  {p}");
        }
        grid_text(w, "U", &fm.matrix);
    }
    let _ = writeln!(w, "matrices:");
    for (name, g) in &r.matrices {
        grid_text(w, name, g);
    }
    out
}

/// Json for a run that stopped at `stage`.
pub fn error_report(stage: Stage, message: &str) -> String {
    let v = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "error": { "stage": stage, "message": message },
    });
    serde_json::to_string_pretty(&v).expect("json") + "\n"
}

fn parse_grid(field: &Arc<Field>, g: &Grid) -> Result<Matrix, String> {
    let rows = g
        .iter()
        .map(|r| r.iter().map(|s| parse_element(s, field).map_err(|e| e.to_string())).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_rows(field, rows))
}

fn parse_const(field: &Arc<Field>, g: &Grid) -> Result<ConstMatrix, String> {
    let m = parse_grid(field, g)?;
    let entries = m
        .entries()
        .iter()
        .map(|x| x.as_constant().ok_or_else(|| "basis entries must be constants".to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ConstMatrix::new(m.rows(), m.cols(), entries))
}

/// Rebuilds the field and re-checks every recorded identity; returns the number of checks.
pub fn replay_report(json: &str, opts: SolveOptions) -> Result<usize, String> {
    let r: Report = serde_json::from_str(json).map_err(|e| e.to_string())?;
    if r.schema_version != SCHEMA_VERSION {
        return Err(format!("unsupported schema version {}", r.schema_version));
    }
    let field = r.field.build().map_err(|e| e.to_string())?;
    let mut cache: BTreeMap<&str, Matrix> = BTreeMap::new();
    for (name, g) in &r.matrices {
        cache.insert(name, parse_grid(&field, g)?);
    }
    let get = |name: &str| cache.get(name).ok_or_else(|| format!("missing matrix {name}"));
    let mut checks = 0;
    for id in &r.identities {
        match id {
            Identity::Gauge { p, a, result } => {
                let g = gauge(get(p)?, get(a)?).map_err(|e| e.to_string())?;
                if &g != get(result)? {
                    return Err(format!("gauge({p}, {a}) differs from {result}"));
                }
            }
            Identity::InSpan { matrix, basis } => {
                let basis = basis.iter().map(|b| parse_const(&field, b)).collect::<Result<Vec<_>, _>>()?;
                check_in_span(get(matrix)?, &basis)?;
            }
            Identity::Solution { matrix, column } => {
                let m = get(matrix)?;
                let y = column.iter().map(|s| parse_element(s, &field).map_err(|e| e.to_string())).collect::<Result<Vec<_>, _>>()?;
                let col = Matrix::from_columns(&field, &[y]);
                let lhs = col.derive();
                if lhs != m.try_mul(&col).map_err(|e| e.to_string())? {
                    return Err(format!("column is not a solution of {matrix}"));
                }
            }
            Identity::Obstruction => {
                let o = r.obstruction.as_ref().ok_or("obstruction identity without obstruction")?;
                rebuild_obstruction(o, &field)?.replay(opts)?;
            }
        }
        checks += 1;
    }
    Ok(checks)
}

fn rebuild_obstruction(o: &ObstructionReport, field: &Arc<Field>) -> Result<Obstruction, String> {
    let op_field = o.operator_field.build().map_err(|e| e.to_string())?;
    let el = |s: &String, f: &Arc<Field>| parse_element(s, f).map_err(|e| e.to_string());
    let els = |xs: &[String], f: &Arc<Field>| xs.iter().map(|s| el(s, f)).collect::<Result<Vec<_>, _>>();
    let operators = o
        .operators
        .iter()
        .map(|op| Ok(DiffOp::new(&op_field, els(&op.coefficients, &op_field)?)))
        .collect::<Result<Vec<_>, String>>()?;
    Ok(Obstruction {
        statement: o.statement.clone(),
        parametric: o
            .parametric
            .iter()
            .map(|p| Ok(ParametricInstance { gs: els(&p.gs, field)?, first_required: p.first_required }))
            .collect::<Result<_, String>>()?,
        exponents: operators.iter().map(|op| local_exponents(op).ok()).collect(),
        solutions: o.operators.iter().map(|op| els(&op.rational_solutions, &op_field)).collect::<Result<_, _>>()?,
        operators,
        risch: o
            .risch
            .iter()
            .map(|rs| {
                Ok(RischInstance {
                    f: el(&rs.f, field)?,
                    g: el(&rs.g, field)?,
                    operator: DiffOp::new(field, els(&rs.operator, field)?),
                })
            })
            .collect::<Result<_, String>>()?,
    })
}
