use redform::diffop::SolveOptions;
use redform::expr::parse_element;
use redform::linsys::{is_hamiltonian, Matrix};
use redform::pipeline::{
    build_variational, emit_report, parse_problem, parse_problem_with, replay_report, replay_run, run_pipeline,
    Overrides, ProblemError, ReportFormat,
};

const HILL_H1: &str = include_str!("../../../fixtures/hill_h1.toml");
const HILL_H0: &str = include_str!("../../../fixtures/hill_h0.toml");
const M3: &str = include_str!("../../../fixtures/m3_system.toml");
const ZERO: &str = include_str!("../../../fixtures/zero_system.toml");

#[test]
fn hill_variational_matrix_matches_display() {
    let spec = parse_problem(HILL_H1).unwrap();
    assert_eq!(spec.descriptor.extension.as_deref(), Some("4*t^6 - t^2 + 2"));
    let (a, zp) = build_variational(&spec).unwrap();
    let expected = Matrix::parse(
        &spec.field,
        &[
            vec!["0", "-4*t^2", "0", "-i"],
            vec!["0", "0", "-i", "0"],
            vec!["0", "-i*(1-60*t^4)", "0", "0"],
            vec!["-i*(1-60*t^4)", "-8*i*t*sqrtD", "4*t^2", "0"],
        ],
    )
    .unwrap();
    assert_eq!(a, expected);
    assert!(is_hamiltonian(&a).unwrap());
    assert_eq!(zp[3], parse_element("i*(12*t^5-t)", &spec.field).unwrap());
}

#[test]
fn quadratic_hamiltonians() {
    let text = |h: &str, z: &str| {
        format!("[field]\nvariable = \"t\"\n[hamiltonian]\nH = \"{h}\"\n[curve]\nz = {z}\n")
    };
    // H = p1 p2 + q1 q2 with q1 = q2 = exp-free rational curve is impossible; q = 0, p = 0 is stationary
    let spec = parse_problem(&text("p1*p2 + q1*q2", r#"["0", "0", "0", "0"]"#)).unwrap();
    let (a, _) = build_variational(&spec).unwrap();
    assert!(a.entries().iter().all(|x| x.as_constant().is_some()));
    assert!(is_hamiltonian(&a).unwrap());
    let spec = parse_problem(&text("0", r#"["1", "2", "3", "4"]"#)).unwrap();
    assert!(build_variational(&spec).unwrap().0.is_zero());
    // H = p1^2/2: q1' = p1, so (t, 0, 1, 0) is a curve and (t^2, 0, 1, 0) is not
    assert!(build_variational(&parse_problem(&text("p1^2/2", r#"["t", "0", "1", "0"]"#)).unwrap()).is_ok());
    let bad = parse_problem(&text("p1^2/2", r#"["t^2", "0", "1", "0"]"#)).unwrap();
    assert_eq!(build_variational(&bad).unwrap_err(), ProblemError::NotASolution(0));
}

#[test]
fn parse_errors_are_located() {
    let broken = HILL_H1.replace("i*sqrtD\"]", "i*sqrtE\"]");
    match parse_problem(&broken).unwrap_err() {
        ProblemError::UnknownSymbol { line, column, .. } => {
            let (l, c) = HILL_H1.lines().enumerate().find_map(|(k, s)| s.find("i*sqrtD\"]").map(|c| (k + 1, c + 3))).unwrap();
            assert_eq!((line, column), (l, c));
        }
        e => panic!("{e:?}"),
    }
    assert!(matches!(parse_problem("[field\n").unwrap_err(), ProblemError::Syntax { line: 1, .. }));
    let weird = HILL_H1.replace("extension = \"4*t^6 - t^2 + 2\"", "extension = \"1/t\"");
    assert!(matches!(parse_problem(&weird).unwrap_err(), ProblemError::InconsistentField(_)));
}

#[test]
fn zero_system_is_valid_and_abelian() {
    let spec = parse_problem(ZERO).unwrap();
    let run = run_pipeline(&spec).unwrap();
    assert_eq!(run.report.verdict, "abelian");
}

#[test]
fn m3_system_is_abelian_with_identity_certificate() {
    let run = run_pipeline(&parse_problem(M3).unwrap()).unwrap();
    assert_eq!(run.report.verdict, "abelian");
    let id = vec![vec!["1", "0", "0", "0"], vec!["0", "1", "0", "0"], vec!["0", "0", "1", "0"], vec!["0", "0", "0", "1"]];
    let id: Vec<Vec<String>> = id.into_iter().map(|r| r.into_iter().map(String::from).collect()).collect();
    assert_eq!(run.report.matrices["P_total"], id);
    assert!(run.report.fundamental.as_ref().unwrap().verified);
    replay_run(&run, SolveOptions::default()).unwrap();
    let json = emit_report(&run.report, ReportFormat::Json);
    assert!(json.contains("\"verdict\": \"abelian\""));
    assert!(replay_report(&json, SolveOptions::default()).unwrap() >= 5);
}

#[test]
fn hill_h1_report() {
    let run = run_pipeline(&parse_problem(HILL_H1).unwrap()).unwrap();
    let r = &run.report;
    assert_eq!(r.verdict, "non_abelian");
    assert!(r.conclusion.contains("not meromorphically Liouville integrable"));
    let o = r.obstruction.as_ref().unwrap();
    assert_eq!(o.operators[0].rational_solutions.len(), 1);
    assert_eq!(o.operators[0].exponent_sets.last().unwrap(), &vec!["0", "0", "8"]);
    replay_run(&run, SolveOptions::default()).unwrap();
    let json = emit_report(r, ReportFormat::Json);
    replay_report(&json, SolveOptions::default()).unwrap();
    // identical input, identical report apart from timings
    let again = run_pipeline(&parse_problem(HILL_H1).unwrap()).unwrap().report;
    let strip = |mut r: redform::pipeline::Report| {
        r.timings_ms.clear();
        emit_report(&r, ReportFormat::Json)
    };
    assert_eq!(strip(r.clone()), strip(again));
    let text = emit_report(r, ReportFormat::Text);
    assert!(text.contains("verdict: non_abelian"));
}

#[test]
fn hill_h0_report() {
    let run = run_pipeline(&parse_problem(HILL_H0).unwrap()).unwrap();
    assert_eq!(run.report.verdict, "abelian");
    replay_run(&run, SolveOptions::default()).unwrap();
    replay_report(&emit_report(&run.report, ReportFormat::Json), SolveOptions::default()).unwrap();
}

#[test]
fn extension_override_and_degree_cap() {
    let ov = Overrides { extension: Some("4*t^6 - t^2".into()), degree_cap: Some(80) };
    let spec = parse_problem_with(HILL_H1, &ov).unwrap();
    assert_eq!(spec.options.degree_cap, 80);
    assert_eq!(run_pipeline(&spec).unwrap().report.verdict, "abelian");
}
