//! End-to-end acceptance run. Prints one `criterion N: PASS|FAIL` line per
//! criterion and exits non-zero when any of them fails.

mod hill;
mod oracle;
mod properties;
mod theorem;

use std::process::ExitCode;
use std::time::Instant;

/// Outcome of one criterion: the failed sub-checks, empty on success.
#[derive(Default)]
pub struct Outcome {
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn new() -> Self {
        Self { failures: Vec::new(), notes: Vec::new() }
    }

    pub fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    pub fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }
}

fn main() -> ExitCode {
    let criteria: [(usize, fn() -> Outcome); 8] = [
        (1, hill::non_integrable_hill),
        (2, hill::abelian_hill),
        (3, theorem::simplification_example),
        (4, theorem::structure_tables),
        (5, properties::run),
        (6, oracle::run),
        (7, theorem::replay_fixtures),
        (8, theorem::wei_norman),
    ];
    let mut all = true;
    for (n, f) in criteria {
        let start = Instant::now();
        let out = match std::panic::catch_unwind(f) {
            Ok(out) => out,
            Err(e) => {
                let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
                let mut out = Outcome::new();
                out.failures.push(format!("panicked: {}", msg.unwrap_or_default()));
                out
            }
        };
        let ok = out.failures.is_empty();
        all &= ok;
        println!("criterion {n}: {}", if ok { "PASS" } else { "FAIL" });
        println!("    took {:.1}s", start.elapsed().as_secs_f64());
        for note in &out.notes {
            println!("    {note}");
        }
        for f in &out.failures {
            println!("    failed: {f}");
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
