//! End-to-end run: variational system, normal variational equation, reduction to a
//! table shape, the abelianity criterion, and a replayable report.

mod problem;
mod report;

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

pub use problem::{
    build_variational, parse_polynomial, parse_problem, parse_problem_with, FieldDescriptor, MultiPoly, Overrides,
    ProblemError, ProblemMode, ProblemOptions, ProblemSpec, CANONICAL_VARIABLES,
};
pub use report::{
    emit_report, error_report, replay_report, CertificateReport, FundamentalReport, Identity, NveReport,
    ObstructionReport, OperatorReport, PointReport, Report, ReportFormat, RischReport, Trail, SCHEMA_VERSION,
};

use crate::diffop::SolveOptions;
use crate::field::FieldElement;
use crate::kovacic2::{classify_and_reduce, NveCase, NveClassification};
use crate::linsys::{gauge, Matrix};
use crate::nve::{normalize_variational, NormalizedSystem};
use crate::sp4::{decide, lift_reduction, simplify_reduced, table_form, Sp4Error, TableForm, Verdict};
use crate::weinorman::{solve_abelian, verify_fundamental};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Parse,
    Variational,
    Normalize,
    Classify,
    Table,
    Abelianity,
    Simplify,
    Solve,
}

#[derive(Debug, Clone, Error)]
#[error("{stage:?}: {message}")]
pub struct PipelineError {
    pub stage: Stage,
    pub message: String,
    /// Input problems rather than failed invariants.
    pub user_error: bool,
}

impl PipelineError {
    fn at(stage: Stage, e: impl ToString) -> Self {
        Self { stage, message: e.to_string(), user_error: false }
    }
}

/// Every intermediate object of a run, kept for in-process replay.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub a: Matrix,
    pub z_prime: Vec<FieldElement>,
    pub normalized: NormalizedSystem,
    pub classification: NveClassification,
    pub table: Option<TableForm>,
    pub verdict: Verdict,
    pub simplified: Option<(Matrix, Matrix)>,
    pub report: Report,
}

fn timed<T>(timings: &mut BTreeMap<String, f64>, stage: Stage, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    let key = serde_json::to_value(stage).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    timings.insert(key, start.elapsed().as_secs_f64() * 1000.0);
    out
}

/// Stops after the classification of the normal variational equation.
pub fn classify_nve(spec: &ProblemSpec) -> Result<(NormalizedSystem, NveClassification), PipelineError> {
    let opts = SolveOptions { degree_cap: spec.options.degree_cap };
    let (a, z_prime) = build_variational(spec).map_err(|e| PipelineError {
        stage: Stage::Variational,
        message: e.to_string(),
        user_error: true,
    })?;
    let normalized = normalize_variational(&a, &z_prime).map_err(|e| PipelineError::at(Stage::Normalize, e))?;
    let cls = classify_and_reduce(&normalized.n, opts).map_err(|e| PipelineError::at(Stage::Classify, e))?;
    Ok((normalized, cls))
}

/// Runs every stage on a parsed problem.
pub fn run_pipeline(spec: &ProblemSpec) -> Result<PipelineRun, PipelineError> {
    let opts = SolveOptions { degree_cap: spec.options.degree_cap };
    let mut timings = BTreeMap::new();
    let (a, z_prime) = timed(&mut timings, Stage::Variational, || build_variational(spec)).map_err(|e| PipelineError {
        stage: Stage::Variational,
        message: e.to_string(),
        user_error: true,
    })?;
    let normalized = timed(&mut timings, Stage::Normalize, || normalize_variational(&a, &z_prime))
        .map_err(|e| PipelineError::at(Stage::Normalize, e))?;
    let classification = timed(&mut timings, Stage::Classify, || classify_and_reduce(&normalized.n, opts))
        .map_err(|e| PipelineError::at(Stage::Classify, e))?;

    let abelian_nve = matches!(classification.case, NveCase::Finite | NveCase::Additive | NveCase::Multiplicative);
    let table = if abelian_nve {
        Some(
            timed(&mut timings, Stage::Table, || table_form(&normalized.a_n, &classification, opts))
                .map_err(|e| PipelineError::at(Stage::Table, e))?,
        )
    } else {
        None
    };
    let verdict = match &table {
        Some(t) => timed(&mut timings, Stage::Abelianity, || decide(&t.shape, opts))
            .map_err(|e| PipelineError::at(Stage::Abelianity, e))?,
        None => Verdict::Inconclusive(format!(
            "the normal variational equation falls in the {:?} case, outside the abelian table",
            classification.case
        )),
    };
    let simplified = match (&verdict, spec.options.simplify) {
        (Verdict::Abelian(c), true) => match timed(&mut timings, Stage::Simplify, || simplify_reduced(&c.reduced)) {
            Ok(s) => Some(s),
            Err(Sp4Error::UnsupportedField) => None,
            Err(e) => return Err(PipelineError::at(Stage::Simplify, e)),
        },
        _ => None,
    };
    let fundamental = match &verdict {
        Verdict::Abelian(c) => {
            let u = timed(&mut timings, Stage::Solve, || solve_abelian(&c.reduced))
                .map_err(|e| PipelineError::at(Stage::Solve, e))?;
            let ok = verify_fundamental(&u, &c.reduced).map_err(|e| PipelineError::at(Stage::Solve, e))?;
            Some((u, ok))
        }
        _ => None,
    };
    let p_n = if abelian_nve {
        Some(lift_reduction(&classification.p).map_err(|e| PipelineError::at(Stage::Table, e))?)
    } else {
        None
    };
    let report = report::assemble(report::Parts {
        spec,
        a: &a,
        z_prime: &z_prime,
        normalized: &normalized,
        classification: &classification,
        p_n: p_n.as_ref(),
        table: table.as_ref(),
        verdict: &verdict,
        simplified: simplified.as_ref(),
        fundamental: fundamental.as_ref(),
        timings,
    })
    .map_err(|e| PipelineError::at(Stage::Abelianity, e))?;
    Ok(PipelineRun { a, z_prime, normalized, classification, table, verdict, simplified, report })
}

/// Re-checks every identity of a run on the live objects.
pub fn replay_run(run: &PipelineRun, opts: SolveOptions) -> Result<usize, String> {
    let mut checks = 0;
    let mut expect = |ok: bool, what: &str| -> Result<(), String> {
        checks += 1;
        ok.then_some(()).ok_or_else(|| format!("replay failed: {what}"))
    };
    let g = |p: &Matrix, a: &Matrix| gauge(p, a).map_err(|e| e.to_string());
    expect(g(&run.normalized.p, &run.a)? == run.normalized.a_n, "P[A] = A_N")?;
    expect(g(&run.classification.p, &run.normalized.n)? == run.classification.reduced, "P[N] = reduced NVE")?;
    if let Some(t) = &run.table {
        expect(g(&t.p, &run.normalized.a_n)? == t.b, "P_N[A_N] = B")?;
        expect(t.shape.reconstruct() == t.b, "shape reconstruction")?;
        match &run.verdict {
            Verdict::Abelian(c) => {
                c.replay(&t.b)?;
                expect(true, "certificate")?;
                let total = run.normalized.p.try_mul(&t.p).and_then(|x| x.try_mul(&c.p)).map_err(|e| e.to_string())?;
                expect(g(&total, &run.a)? == c.reduced, "total gauge")?;
            }
            Verdict::NonAbelian(o) => {
                o.replay(opts)?;
                expect(true, "obstruction")?;
            }
            Verdict::Inconclusive(_) => {}
        }
    }
    if let (Some((q, s)), Verdict::Abelian(c)) = (&run.simplified, &run.verdict) {
        expect(&g(q, &c.reduced)? == s, "simplification gauge")?;
    }
    Ok(checks)
}
