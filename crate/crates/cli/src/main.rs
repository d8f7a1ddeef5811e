//! Command-line front end: `reduce`, `classify-nve`, `verdict`, `replay`, `self-test`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use redform::diffop::{SolveOptions, DEFAULT_DEGREE_CAP};
use redform::linsys::verify_structure_tables;
use redform::pipeline::{
    classify_nve, emit_report, error_report, parse_problem, parse_problem_with, replay_report, replay_run, run_pipeline, Overrides,
    PipelineError, ProblemSpec, ReportFormat, Stage,
};
use redform::sp4::Verdict;

const HILL_H1: &str = include_str!("../../../fixtures/hill_h1.toml");
const HILL_H0: &str = include_str!("../../../fixtures/hill_h0.toml");

const EXIT_ABELIAN: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_INTERNAL: u8 = 2;
const EXIT_NON_ABELIAN: u8 = 3;
const EXIT_INCONCLUSIVE: u8 = 4;

#[derive(Parser)]
#[command(name = "redform", version, about = "Reduced forms and abelianity of variational equations in sp(4)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full reduction and print the report.
    Reduce(RunArgs),
    /// Classify and reduce the normal variational equation only.
    ClassifyNve(RunArgs),
    /// Print only the verdict and its conclusion.
    Verdict(RunArgs),
    /// Re-check every identity recorded in a json report.
    Replay {
        report: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEGREE_CAP)]
        degree_cap: usize,
    },
    /// Run the Hill pair and the bracket tables.
    SelfTest,
}

#[derive(Args)]
struct RunArgs {
    /// Problem file (TOML).
    problem: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Cap on degree bounds in rational-solution searches.
    #[arg(long)]
    degree_cap: Option<usize>,
    /// Override the field extension, as `D=<poly>`.
    #[arg(long, value_parser = parse_extension)]
    extension: Option<String>,
    /// Replay every identity of the run before printing.
    #[arg(long)]
    replay: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => ReportFormat::Json,
            Format::Text => ReportFormat::Text,
        }
    }
}

fn parse_extension(s: &str) -> Result<String, String> {
    s.strip_prefix("D=").map(|p| p.trim().to_string()).ok_or_else(|| "expected D=<poly>".to_string())
}

fn load(args: &RunArgs) -> Result<ProblemSpec, u8> {
    let text = std::fs::read_to_string(&args.problem).map_err(|e| {
        eprintln!("{}: {e}", args.problem.display());
        EXIT_USAGE
    })?;
    let ov = Overrides { extension: args.extension.clone(), degree_cap: args.degree_cap };
    parse_problem_with(&text, &ov).map_err(|e| {
        eprintln!("{}:{e}", args.problem.display());
        if matches!(args.format, Format::Json) {
            print!("{}", error_report(Stage::Parse, &e.to_string()));
        }
        EXIT_USAGE
    })
}

fn verdict_code(v: &Verdict) -> u8 {
    match v {
        Verdict::Abelian(_) => EXIT_ABELIAN,
        Verdict::NonAbelian(_) => EXIT_NON_ABELIAN,
        Verdict::Inconclusive(_) => EXIT_INCONCLUSIVE,
    }
}

fn failure(e: &PipelineError, format: Format) -> u8 {
    eprintln!("error: {e}");
    if matches!(format, Format::Json) {
        print!("{}", error_report(e.stage, &e.message));
    }
    if e.user_error { EXIT_USAGE } else { EXIT_INTERNAL }
}

fn classify(args: &RunArgs) -> u8 {
    let spec = match load(args) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let (normalized, cls) = match classify_nve(&spec) {
        Ok(r) => r,
        Err(e) => return failure(&e, args.format),
    };
    let grids = [("N", &normalized.n), ("P_nve", &cls.p), ("N_reduced", &cls.reduced)];
    match args.format {
        Format::Json => {
            let mut v = serde_json::json!({ "case": cls.case });
            for (name, m) in grids {
                v[name] = serde_json::json!(m.to_strings());
            }
            println!("{}", serde_json::to_string_pretty(&v).expect("json"));
        }
        Format::Text => {
            println!("normal variational equation: {:?}", cls.case);
            for (name, m) in grids {
                println!("{name} =");
                for row in m.to_strings() {
                    println!("  [{}]", row.join(", "));
                }
            }
        }
    }
    EXIT_ABELIAN
}

fn run(args: &RunArgs, mode: &Command) -> u8 {
    let spec = match load(args) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let run = match run_pipeline(&spec) {
        Ok(r) => r,
        Err(e) => return failure(&e, args.format),
    };
    if args.replay {
        match replay_run(&run, SolveOptions { degree_cap: spec.options.degree_cap }) {
            Ok(n) => eprintln!("replay: {n} identities hold"),
            Err(e) => {
                eprintln!("{e}");
                return EXIT_INTERNAL;
            }
        }
    }
    let r = &run.report;
    match (mode, args.format) {
        (Command::Reduce(_), f) => print!("{}", emit_report(r, f.into())),
        (Command::Verdict(_), Format::Json) => {
            let v = serde_json::json!({ "verdict": r.verdict, "conclusion": r.conclusion });
            println!("{}", serde_json::to_string_pretty(&v).expect("json"));
        }
        (Command::Verdict(_), Format::Text) => println!("{}: {}", r.verdict, r.conclusion),
        _ => unreachable!(),
    }
    verdict_code(&run.verdict)
}

fn replay(path: &Path, degree_cap: usize) -> u8 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return EXIT_USAGE;
        }
    };
    match replay_report(&text, SolveOptions { degree_cap }) {
        Ok(n) => {
            println!("replay: {n} identities hold");
            EXIT_ABELIAN
        }
        Err(e) => {
            eprintln!("replay failed: {e}");
            EXIT_INTERNAL
        }
    }
}

fn self_test() -> u8 {
    let mut ok = true;
    let mut line = |name: &str, pass: bool, detail: String| {
        ok &= pass;
        println!("{name}: {} {detail}", if pass { "ok" } else { "FAILED" });
    };
    match verify_structure_tables() {
        Ok(n) => line("bracket tables", true, format!("({n} entries)")),
        Err(e) => line("bracket tables", false, e),
    }
    let hill = [(HILL_H1, "hill h=1", "non_abelian"), (HILL_H0, "hill h=0", "abelian")];
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = hill
            .iter()
            .map(|(text, _, _)| {
                s.spawn(move || {
                    let spec = parse_problem(text).map_err(|e| e.to_string())?;
                    let run = run_pipeline(&spec).map_err(|e| e.to_string())?;
                    replay_run(&run, SolveOptions { degree_cap: spec.options.degree_cap })?;
                    Ok::<_, String>(run.report.verdict)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err("panicked".into()))).collect()
    });
    for ((_, name, expected), got) in hill.iter().zip(results) {
        match got {
            Ok(v) => line(name, v == *expected, format!("(verdict {v})")),
            Err(e) => line(name, false, e),
        }
    }
    if ok { EXIT_ABELIAN } else { EXIT_INTERNAL }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(dispatch(&cli.command))
}

fn dispatch(command: &Command) -> u8 {
    match command {
        Command::ClassifyNve(a) => classify(a),
        Command::Reduce(a) | Command::Verdict(a) => run(a, command),
        Command::Replay { report, degree_cap } => replay(report, *degree_cap),
        Command::SelfTest => self_test(),
    }
}
