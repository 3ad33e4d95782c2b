//! Checker and interpreter for a small Java subset.
//!
//! `javalite build DIR` parses and checks every source file under `DIR`;
//! `javalite test DIR --reports OUT` additionally runs all `@Test` methods
//! and writes Surefire-style XML reports.

pub mod builtins;
pub mod check;
pub mod interp;
pub mod program;
pub mod runner;
pub mod value;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use program::{Diagnostic, Program};
use runner::{Status, SuiteResult};

const STACK_BYTES: usize = 256 << 20;

#[derive(Parser, Debug)]
#[command(name = "javalite", about = "Checker and test runner for a small Java subset")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Parse and check every source file.
    Build {
        #[arg(default_value = ".")]
        dir: PathBuf,
    },
    /// Build, then run every `@Test` method.
    Test {
        #[arg(default_value = ".")]
        dir: PathBuf,
        #[arg(long)]
        reports: Option<PathBuf>,
        #[arg(long, default_value_t = runner::default_max_steps())]
        max_steps: u64,
    },
}

/// Loads and checks the tree under `dir`.
pub fn build(dir: &Path) -> Result<Program, Vec<Diagnostic>> {
    let program = Program::load(dir)?;
    let diags = check::check(&program);
    if diags.is_empty() {
        Ok(program)
    } else {
        Err(diags)
    }
}

pub enum TestRun {
    BuildFailed(Vec<Diagnostic>),
    Ran(Vec<SuiteResult>),
}

/// Builds and runs the tests under `dir` on a thread with a deep stack.
pub fn test(dir: &Path, max_steps: u64) -> TestRun {
    let dir = dir.to_path_buf();
    let handle = std::thread::Builder::new()
        .stack_size(STACK_BYTES)
        .spawn(move || match build(&dir) {
            Err(d) => TestRun::BuildFailed(d),
            Ok(p) => TestRun::Ran(runner::run_all(&p, max_steps)),
        })
        .expect("spawn test thread");
    handle.join().unwrap_or_else(|_| {
        TestRun::BuildFailed(vec![Diagnostic {
            path: PathBuf::new(),
            line: 0,
            column: 0,
            message: "interpreter panicked".into(),
        }])
    })
}

fn print_diags(diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("{d}");
    }
    eprintln!("{} error(s)", diags.len());
}

/// Entry point for the `javalite` binary. Returns the process exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match cli.cmd {
        Cmd::Build { dir } => match build(&dir) {
            Ok(p) => {
                println!("BUILD SUCCESS ({} classes)", p.classes.len());
                0
            }
            Err(d) => {
                print_diags(&d);
                println!("BUILD FAILURE");
                1
            }
        },
        Cmd::Test { dir, reports, max_steps } => match test(&dir, max_steps) {
            TestRun::BuildFailed(d) => {
                print_diags(&d);
                println!("BUILD FAILURE");
                1
            }
            TestRun::Ran(suites) => {
                if let Some(out) = &reports {
                    if let Err(e) = runner::write_reports(out, &suites) {
                        eprintln!("cannot write reports to {}: {e}", out.display());
                        return 1;
                    }
                }
                let mut bad = 0;
                let mut total = 0;
                for s in &suites {
                    for t in &s.tests {
                        total += 1;
                        match &t.status {
                            Status::Failed { kind, message } | Status::Errored { kind, message } => {
                                bad += 1;
                                println!("FAIL {}.{}: {kind}: {message}", t.class, t.name);
                            }
                            _ => {}
                        }
                    }
                }
                println!("Tests run: {total}, Failures/Errors: {bad}");
                i32::from(bad > 0)
            }
        },
    }
}
