use std::process::Command;

use num_rational::BigRational;
use redform::diffop::{local_exponents, rational_solutions, DiffOp, SingularPoint, SolveOptions};
use redform::expr::parse_element;
use redform::field::{FieldElement, Poly};
use redform::pipeline::{parse_problem, run_pipeline};
use redform::sp4::Verdict;

use crate::Outcome;

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

/// Runs the binary and returns its exit code and parsed JSON report.
fn reduce(name: &str) -> (Option<i32>, serde_json::Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_redform"))
        .args(["reduce", &fixture(name), "--format", "json"])
        .output()
        .expect("binary runs");
    let json = serde_json::from_slice(&out.stdout).unwrap_or(serde_json::Value::Null);
    (out.status.code(), json)
}

fn ratios(xs: &[&str]) -> Vec<BigRational> {
    xs.iter().map(|s| s.parse().unwrap()).collect()
}

pub fn non_integrable_hill() -> Outcome {
    let mut out = Outcome::new();
    let (code, json) = reduce("hill_h1.toml");
    out.check(code == Some(3), format!("reduce exits with {code:?}, expected 3"));
    out.check(json["verdict"] == "non_abelian", format!("report verdict {}", json["verdict"]));

    let spec = parse_problem(&std::fs::read_to_string(fixture("hill_h1.toml")).unwrap()).unwrap();
    let run = run_pipeline(&spec).unwrap();
    let Verdict::NonAbelian(o) = &run.verdict else {
        out.check(false, format!("verdict is {}", run.verdict.label()));
        return out;
    };
    let op = o.operators[0].monic();
    let pf = op.field().clone();
    let e = |s: &str| parse_element(s, &pf).unwrap();
    let expected = DiffOp::new(
        &pf,
        vec![
            FieldElement::zero(&pf),
            e("3*t^2*(48*t^8-24*t^4+96*t^2-1)/(4*t^6-t^2+2)^2"),
            e("(44*t^6-3*t^2-2)/((4*t^6-t^2+2)*t)"),
            FieldElement::one(&pf),
        ],
    );
    out.check(op == expected, "monic obstruction operator differs from the displayed third-order operator");

    let sextic = Poly::from_ints(&[2, 0, -1, 0, 0, 0, 4]).monic();
    let wanted = [
        ("t", SingularPoint::Finite(Poly::x()), ratios(&["0", "1", "3"])),
        ("roots of 4t^6-t^2+2", SingularPoint::Finite(sextic), ratios(&["0", "1/2", "3/2"])),
        ("infinity", SingularPoint::Infinity, ratios(&["0", "0", "8"])),
    ];
    match local_exponents(&op) {
        Ok(report) => {
            for (label, point, exps) in wanted {
                match report.points.iter().find(|p| p.point == point) {
                    Some(p) if p.exponents == exps => out.note(format!("exponents at {label}: {:?} as expected", p.exponent_strings())),
                    Some(p) => out.check(
                        false,
                        format!(
                            "exponents at {label} are {:?}, expected {:?}",
                            p.exponent_strings(),
                            exps.iter().map(|x| x.to_string()).collect::<Vec<_>>()
                        ),
                    ),
                    None => out.check(false, format!("no exponent data at {label}")),
                }
            }
        }
        Err(err) => out.check(false, format!("local exponents: {err}")),
    }

    match rational_solutions(&op, SolveOptions::default()) {
        Ok(space) => out.check(
            space.dimension() == 1 && space.basis[0].as_constant().is_some(),
            format!("rational solutions {:?}, expected the constants", space.basis),
        ),
        Err(err) => out.check(false, format!("rational solutions: {err}")),
    }
    out
}

pub fn abelian_hill() -> Outcome {
    let mut out = Outcome::new();
    let (code, json) = reduce("hill_h0.toml");
    out.check(code == Some(0), format!("reduce exits with {code:?}, expected 0"));
    out.check(json["verdict"] == "abelian", format!("report verdict {}", json["verdict"]));

    let spec = parse_problem(&std::fs::read_to_string(fixture("hill_h0.toml")).unwrap()).unwrap();
    let run = run_pipeline(&spec).unwrap();
    let Verdict::Abelian(c) = &run.verdict else {
        out.check(false, format!("verdict is {}", run.verdict.label()));
        return out;
    };
    // sqrtD = t sqrt(4t^4 - 1) here, so t^2 sqrt(4t^4 - 1) = t sqrtD
    let expected = parse_element("(8*t^4-1)/(t*sqrtD)", &spec.field).unwrap();
    let y = if c.y1.is_zero() { &c.y2 } else { &c.y1 };
    out.check(!y.is_zero(), "the certificate has no non-trivial in-field solution");
    match (y * &expected.inv().unwrap()).as_constant() {
        Some(k) => out.note(format!("in-field solution is {k:?} * (8t^4-1)/(t^2 sqrt(4t^4-1))")),
        None => out.check(false, format!("in-field solution {y:?} is not a constant multiple of (8t^4-1)/(t sqrtD)")),
    }
    out
}
