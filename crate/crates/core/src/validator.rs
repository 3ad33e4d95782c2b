//! Candidate validation against a real project: splice the candidate into
//! an isolated copy, build, run the test suite, and check the size
//! condition of a simplification.

use std::collections::HashMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use quick_xml::events::Event;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use wait_timeout::ChildExt;

use crate::catalog::edit::line_start;
use crate::catalog::is_smaller;
use crate::gateway::CandidateSet;
use crate::metrics::{quality_delta, MetricsDelta};
use crate::syntax::{parse_method, significant_texts, token_equal, MethodUnit};

pub const DEFAULT_TIMEOUT_SECS: u64 = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResultMode {
    #[default]
    ExitCode,
    ReportFiles,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectConfig {
    pub root: PathBuf,
    pub build: String,
    pub test: String,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    #[serde(default)]
    pub mode: ResultMode,
    /// Directory (relative to the root) holding XML test reports in
    /// report-files mode.
    #[serde(default)]
    pub reports: Option<PathBuf>,
    /// Test-suite runs per candidate; every run must pass.
    #[serde(default = "default_reruns")]
    pub reruns: u32,
    /// Top-level entries not copied into workspaces.
    #[serde(default = "default_exclude")]
    pub exclude: Vec<String>,
}

fn default_timeout() -> u64 {
    DEFAULT_TIMEOUT_SECS
}

fn default_reruns() -> u32 {
    1
}

fn default_exclude() -> Vec<String> {
    vec![".git".into(), "target".into(), "build".into()]
}

impl ProjectConfig {
    pub fn new(root: impl Into<PathBuf>, build: impl Into<String>, test: impl Into<String>) -> Self {
        ProjectConfig {
            root: root.into(),
            build: build.into(),
            test: test.into(),
            timeout_secs: DEFAULT_TIMEOUT_SECS,
            mode: ResultMode::ExitCode,
            reports: None,
            reruns: 1,
            exclude: default_exclude(),
        }
    }

    pub fn check(&self) -> Result<(), ValidationError> {
        let bad = |m: &str| Err(ValidationError::Config(m.to_string()));
        if self.timeout_secs == 0 {
            return bad("timeout_secs must be positive");
        }
        if self.build.trim().is_empty() || self.test.trim().is_empty() {
            return bad("build and test commands must be non-empty");
        }
        if shlex::split(&self.build).is_none() || shlex::split(&self.test).is_none() {
            return bad("unbalanced quotes in a command");
        }
        if self.mode == ResultMode::ReportFiles && self.reports.is_none() {
            return bad("report-files mode needs a reports directory");
        }
        if self.reruns == 0 {
            return bad("reruns must be at least 1");
        }
        Ok(())
    }

    /// Loads a TOML or JSON config (by extension; TOML otherwise). A
    /// relative `root` is resolved against the config file's directory.
    pub fn load(path: &Path) -> Result<Self, ValidationError> {
        let text = std::fs::read_to_string(path).map_err(|source| ValidationError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg: ProjectConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| ValidationError::Config(e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| ValidationError::Config(e.to_string()))?
        };
        if cfg.root.is_relative() {
            let base = path.parent().unwrap_or(Path::new("."));
            cfg.root = base.join(&cfg.root);
        }
        cfg.check()?;
        Ok(cfg)
    }
}

#[derive(Debug, Error)]
pub enum ValidationError {
    #[error("bad project config: {0}")]
    Config(String),
    #[error("{path}: text at {start}..{end} is not the expected method")]
    SpanMismatch { path: PathBuf, start: usize, end: usize },
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot run {command:?}: {message}")]
    Spawn { command: String, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ValidationError + '_ {
    move |source| ValidationError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Where a method lives in its project.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodSite {
    /// Path relative to the project root.
    pub file: PathBuf,
    pub start: usize,
    pub end: usize,
}

impl MethodSite {
    /// Locates `method_name` (simple or qualified) in `file`.
    pub fn find(root: &Path, file: impl Into<PathBuf>, method_name: &str) -> Result<Self, ValidationError> {
        let file = file.into();
        let path = root.join(&file);
        let src = std::fs::read_to_string(&path).map_err(io_err(&path))?;
        let loc = crate::syntax::scan::find_methods(&src)
            .into_iter()
            .find(|m| m.qualified_name == method_name || m.qualified_name.rsplit('.').next() == Some(method_name))
            .ok_or(ValidationError::SpanMismatch {
                path: path.clone(),
                start: 0,
                end: 0,
            })?;
        Ok(MethodSite {
            file,
            start: loc.start,
            end: loc.end,
        })
    }

    /// The method text at this site, dedented to column 0.
    pub fn read(&self, root: &Path) -> Result<String, ValidationError> {
        let path = root.join(&self.file);
        let src = std::fs::read_to_string(&path).map_err(io_err(&path))?;
        let text = src.get(self.start..self.end).ok_or(ValidationError::SpanMismatch {
            path: path.clone(),
            start: self.start,
            end: self.end,
        })?;
        let col = self.start - line_start(&src, self.start);
        let mut out = crate::catalog::edit::dedent_tail(text, col);
        out.push('\n');
        Ok(out)
    }
}

/// An isolated copy of the project. Dropping it deletes the copy.
#[derive(Debug)]
pub struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    pub fn root(&self) -> &Path {
        self.dir.path()
    }
}

fn copy_tree(from: &Path, to: &Path, exclude: &[String]) -> Result<(), ValidationError> {
    let walker = walkdir::WalkDir::new(from).into_iter().filter_entry(|e| {
        e.depth() != 1 || !exclude.iter().any(|x| e.file_name() == x.as_str())
    });
    for entry in walker {
        let entry = entry.map_err(|e| ValidationError::Io {
            path: from.to_path_buf(),
            source: e.into(),
        })?;
        let rel = entry.path().strip_prefix(from).expect("walk stays under root");
        let dest = to.join(rel);
        if entry.file_type().is_dir() {
            std::fs::create_dir_all(&dest).map_err(io_err(&dest))?;
        } else if entry.file_type().is_file() {
            std::fs::copy(entry.path(), &dest).map_err(io_err(&dest))?;
        }
    }
    Ok(())
}

/// Re-indents lines after the first with `indent`.
fn indent_tail(text: &str, indent: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for (i, line) in text.split('\n').enumerate() {
        if i > 0 {
            out.push('\n');
            if !line.trim().is_empty() {
                out.push_str(indent);
            }
        }
        out.push_str(line);
    }
    out
}

/// Copies the project and replaces the method at `site` with `candidate`.
/// `expected` is the current method text (column-0 form) used to detect a
/// stale site.
pub fn splice(config: &ProjectConfig, site: &MethodSite, expected: &str, candidate: &str) -> Result<Workspace, ValidationError> {
    let src_path = config.root.join(&site.file);
    let src = std::fs::read_to_string(&src_path).map_err(io_err(&src_path))?;
    let mismatch = || ValidationError::SpanMismatch {
        path: src_path.clone(),
        start: site.start,
        end: site.end,
    };
    let current = site.read(&config.root).map_err(|_| mismatch())?;
    if !token_equal(&current, expected) {
        return Err(mismatch());
    }
    let indent = &src[line_start(&src, site.start)..site.start];
    if !indent.chars().all(char::is_whitespace) {
        return Err(mismatch());
    }
    let dir = tempfile::Builder::new()
        .prefix("simplikit-ws-")
        .tempdir()
        .map_err(io_err(&std::env::temp_dir()))?;
    copy_tree(&config.root, dir.path(), &config.exclude)?;
    let replaced = format!("{}{}{}", &src[..site.start], indent_tail(candidate.trim_end(), indent), &src[site.end..]);
    let dest = dir.path().join(&site.file);
    std::fs::write(&dest, replaced).map_err(io_err(&dest))?;
    Ok(Workspace { dir })
}

/// Copy of the unmodified project.
pub fn pristine(config: &ProjectConfig) -> Result<Workspace, ValidationError> {
    if !config.root.is_dir() {
        return Err(ValidationError::Io {
            path: config.root.clone(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "project root missing"),
        });
    }
    let dir = tempfile::Builder::new()
        .prefix("simplikit-ws-")
        .tempdir()
        .map_err(io_err(&std::env::temp_dir()))?;
    copy_tree(&config.root, dir.path(), &config.exclude)?;
    Ok(Workspace { dir })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutcome {
    /// `None` when killed by a signal or by the timeout.
    pub code: Option<i32>,
    pub timed_out: bool,
    pub output: String,
}

impl CommandOutcome {
    pub fn success(&self) -> bool {
        self.code == Some(0)
    }
}

/// Runs `command` (shell-style quoting, no shell) in `cwd` with a timeout.
pub fn run_command(command: &str, cwd: &Path, timeout: Duration) -> Result<CommandOutcome, ValidationError> {
    let spawn_err = |message: String| ValidationError::Spawn {
        command: command.to_string(),
        message,
    };
    let argv = shlex::split(command).filter(|a| !a.is_empty()).ok_or_else(|| spawn_err("unparseable command".into()))?;
    let mut child = Command::new(&argv[0])
        .args(&argv[1..])
        .current_dir(cwd)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| spawn_err(e.to_string()))?;
    let mut out = child.stdout.take().expect("piped");
    let mut err = child.stderr.take().expect("piped");
    let out_reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = out.read_to_string(&mut s);
        s
    });
    let err_reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = err.read_to_string(&mut s);
        s
    });
    let status = child.wait_timeout(timeout).map_err(|e| spawn_err(e.to_string()))?;
    let (code, timed_out) = match status {
        Some(s) => (s.code(), false),
        None => {
            let _ = child.kill();
            let _ = child.wait();
            (None, true)
        }
    };
    let mut output = out_reader.join().unwrap_or_default();
    output.push_str(&err_reader.join().unwrap_or_default());
    Ok(CommandOutcome { code, timed_out, output })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestStatus {
    Passed,
    Failed,
    Errored,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    pub id: String,
    pub status: TestStatus,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub errored: usize,
    pub skipped: usize,
    /// Per-test results; empty in exit-code mode.
    pub tests: Vec<TestCase>,
}

impl TestOutcome {
    pub fn from_cases(tests: Vec<TestCase>) -> Self {
        let count = |s: TestStatus| tests.iter().filter(|t| t.status == s).count();
        TestOutcome {
            total: tests.len(),
            passed: count(TestStatus::Passed),
            failed: count(TestStatus::Failed),
            errored: count(TestStatus::Errored),
            skipped: count(TestStatus::Skipped),
            tests,
        }
    }

    /// Exit-code mode sees the whole suite as a single test.
    pub fn from_exit(success: bool) -> Self {
        TestOutcome {
            total: 1,
            passed: usize::from(success),
            failed: usize::from(!success),
            ..TestOutcome::default()
        }
    }

    pub fn all_passed(&self) -> bool {
        self.total > 0 && self.failed == 0 && self.errored == 0
    }
}

fn attr(e: &quick_xml::events::BytesStart, name: &[u8]) -> Option<String> {
    e.attributes()
        .flatten()
        .find(|a| a.key.as_ref() == name)
        .and_then(|a| a.unescape_value().ok().map(|v| v.into_owned()))
}

/// Test cases from one JUnit-style XML report.
pub fn parse_junit_xml(xml: &str) -> Result<Vec<TestCase>, String> {
    let mut reader = quick_xml::Reader::from_str(xml);
    let mut out = Vec::new();
    let mut current: Option<TestCase> = None;
    loop {
        let ev = reader.read_event().map_err(|e| format!("at byte {}: {e}", reader.buffer_position()))?;
        match ev {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let empty = matches!(ev, Event::Empty(_));
                match e.name().as_ref() {
                    b"testcase" => {
                        let name = attr(e, b"name").unwrap_or_default();
                        let id = match attr(e, b"classname") {
                            Some(c) if !c.is_empty() => format!("{c}.{name}"),
                            _ => name,
                        };
                        let case = TestCase {
                            id,
                            status: TestStatus::Passed,
                        };
                        if empty {
                            out.push(case);
                        } else {
                            current = Some(case);
                        }
                    }
                    tag @ (b"failure" | b"error" | b"skipped") => {
                        if let Some(c) = current.as_mut() {
                            c.status = match tag {
                                b"failure" => TestStatus::Failed,
                                b"error" => TestStatus::Errored,
                                _ => TestStatus::Skipped,
                            };
                        }
                    }
                    _ => {}
                }
            }
            Event::End(ref e) if e.name().as_ref() == b"testcase" => {
                out.extend(current.take());
            }
            Event::Eof => break,
            _ => {}
        }
    }
    Ok(out)
}

pub fn read_reports(dir: &Path) -> Result<Vec<TestCase>, ValidationError> {
    let mut files: Vec<PathBuf> = walkdir::WalkDir::new(dir)
        .into_iter()
        .flatten()
        .filter(|e| e.file_type().is_file() && e.path().extension().is_some_and(|x| x == "xml"))
        .map(|e| e.into_path())
        .collect();
    files.sort();
    let mut cases = Vec::new();
    for f in files {
        let text = std::fs::read_to_string(&f).map_err(io_err(&f))?;
        cases.extend(parse_junit_xml(&text).map_err(|m| ValidationError::Io {
            path: f.clone(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidData, m),
        })?);
    }
    Ok(cases)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equivalence {
    pub compiled: bool,
    pub outcome: TestOutcome,
    pub timed_out: bool,
    /// Build and test output, for diagnostics.
    pub log: String,
}

impl Equivalence {
    pub fn test_equivalent(&self) -> bool {
        self.compiled && !self.timed_out && self.outcome.all_passed()
    }
}

/// Builds the workspace and runs its tests (`reruns` times) within the
/// configured timeout.
pub fn check_equivalence(root: &Path, config: &ProjectConfig) -> Result<Equivalence, ValidationError> {
    let deadline = Instant::now() + Duration::from_secs(config.timeout_secs);
    let remaining = || deadline.saturating_duration_since(Instant::now());
    let build = run_command(&config.build, root, remaining())?;
    let mut log = build.output.clone();
    if build.timed_out || !build.success() {
        return Ok(Equivalence {
            compiled: false,
            outcome: TestOutcome::default(),
            timed_out: build.timed_out,
            log,
        });
    }
    let mut outcome = TestOutcome::default();
    for _ in 0..config.reruns {
        if let (ResultMode::ReportFiles, Some(r)) = (config.mode, &config.reports) {
            let dir = root.join(r);
            if dir.exists() {
                std::fs::remove_dir_all(&dir).map_err(io_err(&dir))?;
            }
        }
        let test = run_command(&config.test, root, remaining())?;
        log.push_str(&test.output);
        if test.timed_out {
            return Ok(Equivalence {
                compiled: true,
                outcome,
                timed_out: true,
                log,
            });
        }
        outcome = match (config.mode, &config.reports) {
            (ResultMode::ReportFiles, Some(r)) => {
                let mut o = TestOutcome::from_cases(read_reports(&root.join(r))?);
                // A failing command with clean reports still fails the run.
                if !test.success() && o.all_passed() {
                    o.errored += 1;
                    o.total += 1;
                }
                o
            }
            _ => TestOutcome::from_exit(test.success()),
        };
        if !outcome.all_passed() {
            break;
        }
    }
    Ok(Equivalence {
        compiled: true,
        outcome,
        timed_out: false,
        log,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accepted,
    Rejected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    CompileFailure,
    TestFailure,
    NotSmaller,
    Unaltered,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub candidate_id: String,
    pub compiled: bool,
    pub outcome: Option<TestOutcome>,
    pub sloc: (usize, usize),
    pub tokens: (usize, usize),
    pub metrics: Option<MetricsDelta>,
    pub verdict: Verdict,
    pub reason: Option<RejectReason>,
    /// Infrastructure error text when validation could not run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ValidationReport {
    /// Acceptance requires compilation, a fully passing suite and the size
    /// condition.
    pub fn is_consistent(&self) -> bool {
        match self.verdict {
            Verdict::Rejected => true,
            Verdict::Accepted => {
                let (s0, s1) = self.sloc;
                let (t0, t1) = self.tokens;
                self.compiled
                    && self.outcome.as_ref().is_some_and(TestOutcome::all_passed)
                    && (s1 < s0 || (s1 == s0 && t1 < t0))
            }
        }
    }
}

/// Validates one candidate against `original` at `site`.
pub fn validate_one(
    id: &str,
    original: &MethodUnit,
    site: &MethodSite,
    candidate: &str,
    config: &ProjectConfig,
) -> ValidationReport {
    let mut report = ValidationReport {
        candidate_id: id.to_string(),
        compiled: false,
        outcome: None,
        sloc: (original.sloc, crate::syntax::sloc(candidate)),
        tokens: (original.token_count, crate::syntax::token_count(candidate)),
        metrics: None,
        verdict: Verdict::Rejected,
        reason: None,
        error: None,
    };
    if token_equal(&original.source, candidate) {
        report.reason = Some(RejectReason::Unaltered);
        return report;
    }
    let unit = match parse_method(candidate) {
        Ok(u) => u,
        Err(_) => {
            report.reason = Some(RejectReason::CompileFailure);
            return report;
        }
    };
    report.metrics = Some(quality_delta(original, &unit));
    if !is_smaller(original, &unit) {
        report.reason = Some(RejectReason::NotSmaller);
        return report;
    }
    let eq = splice(config, site, &original.source, candidate).and_then(|ws| check_equivalence(ws.root(), config));
    let eq = match eq {
        Ok(eq) => eq,
        Err(e) => {
            report.error = Some(e.to_string());
            report.reason = Some(RejectReason::CompileFailure);
            return report;
        }
    };
    report.compiled = eq.compiled;
    report.outcome = Some(eq.outcome.clone());
    report.reason = if eq.timed_out {
        Some(RejectReason::Timeout)
    } else if !eq.compiled {
        Some(RejectReason::CompileFailure)
    } else if !eq.outcome.all_passed() {
        Some(RejectReason::TestFailure)
    } else {
        None
    };
    if report.reason.is_none() {
        report.verdict = Verdict::Accepted;
    }
    report
}

/// Validates in set order and stops at the first accepted candidate.
pub fn validate_candidates(
    original: &MethodUnit,
    site: &MethodSite,
    set: &CandidateSet,
    config: &ProjectConfig,
) -> (Option<MethodUnit>, Vec<ValidationReport>) {
    let mut reports = Vec::new();
    for (i, c) in set.candidates.iter().enumerate() {
        let r = validate_one(&i.to_string(), original, site, &c.text, config);
        let accepted = r.verdict == Verdict::Accepted;
        reports.push(r);
        if accepted {
            let unit = parse_method(&c.text).expect("accepted candidates parse");
            return (Some(unit), reports);
        }
    }
    (None, reports)
}

/// Test-equivalence predicate for the reducer: splice, build and test,
/// memoized by significant tokens. Each call runs in its own workspace, so
/// calls are isolation-safe.
pub struct ProjectOracle {
    config: ProjectConfig,
    site: MethodSite,
    original: String,
    memo: Mutex<HashMap<Vec<String>, bool>>,
    runs: AtomicUsize,
}

pub fn as_oracle(config: &ProjectConfig, site: &MethodSite, original: &MethodUnit) -> ProjectOracle {
    ProjectOracle {
        config: config.clone(),
        site: site.clone(),
        original: original.source.clone(),
        memo: Mutex::new(HashMap::new()),
        runs: AtomicUsize::new(0),
    }
}

impl ProjectOracle {
    pub fn isolation_safe(&self) -> bool {
        true
    }

    /// Number of build-and-test runs performed (memo hits excluded).
    pub fn runs(&self) -> usize {
        self.runs.load(Ordering::SeqCst)
    }

    pub fn check(&self, unit: &MethodUnit) -> Result<bool, ValidationError> {
        let key: Vec<String> = significant_texts(&unit.source).into_iter().map(str::to_owned).collect();
        if let Some(&v) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(v);
        }
        self.runs.fetch_add(1, Ordering::SeqCst);
        let ws = splice(&self.config, &self.site, &self.original, &unit.source)?;
        let v = check_equivalence(ws.root(), &self.config)?.test_equivalent();
        self.memo.lock().expect("memo lock").insert(key, v);
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn junit_parsing() {
        let xml = r#"<?xml version="1.0"?>
<testsuite name="s" tests="4">
  <testcase classname="shop.CartTest" name="empty"/>
  <testcase classname="shop.CartTest" name="total"><failure message="expected 3"/></testcase>
  <testcase classname="shop.CartTest" name="boom"><error type="java.lang.RuntimeException"/></testcase>
  <testcase classname="shop.CartTest" name="later"><skipped/></testcase>
</testsuite>"#;
        let o = TestOutcome::from_cases(parse_junit_xml(xml).unwrap());
        assert_eq!((o.total, o.passed, o.failed, o.errored, o.skipped), (4, 1, 1, 1, 1));
        assert_eq!(o.tests[1].id, "shop.CartTest.total");
        assert!(!o.all_passed());
        assert!(parse_junit_xml("<testsuite><testcase name=\"a\"></testsuite>").is_err());
    }

    #[test]
    fn config_formats_and_checks() {
        let dir = tempfile::tempdir().unwrap();
        let toml_path = dir.path().join("p.toml");
        std::fs::write(&toml_path, "root = \"proj\"\nbuild = \"make\"\ntest = \"make test\"\nmode = \"report-files\"\nreports = \"out\"\n").unwrap();
        let cfg = ProjectConfig::load(&toml_path).unwrap();
        assert_eq!(cfg.root, dir.path().join("proj"));
        assert_eq!(cfg.timeout_secs, 300);
        assert_eq!(cfg.mode, ResultMode::ReportFiles);
        let json_path = dir.path().join("p.json");
        std::fs::write(&json_path, r#"{"root": "/x", "build": "b", "test": "t", "timeout_secs": 5}"#).unwrap();
        let cfg = ProjectConfig::load(&json_path).unwrap();
        assert_eq!((cfg.timeout_secs, cfg.mode), (5, ResultMode::ExitCode));
        std::fs::write(&json_path, r#"{"root": "/x", "build": "b", "test": "t", "timeout_secs": 0}"#).unwrap();
        assert!(matches!(ProjectConfig::load(&json_path), Err(ValidationError::Config(_))));
        std::fs::write(&json_path, r#"{"root": "/x", "build": "", "test": "t"}"#).unwrap();
        assert!(matches!(ProjectConfig::load(&json_path), Err(ValidationError::Config(_))));
    }

    fn project() -> (tempfile::TempDir, ProjectConfig, MethodSite, MethodUnit) {
        let dir = tempfile::tempdir().unwrap();
        let src = "class A {\n    int f() {\n        int unused = 0;\n        return 1;\n    }\n}\n";
        std::fs::write(dir.path().join("A.java"), src).unwrap();
        // "Build" succeeds when the file is present; "tests" pass while the
        // return statement survives.
        let cfg = ProjectConfig::new(dir.path(), "test -f A.java", "grep -q \"return 1;\" A.java");
        let site = MethodSite::find(dir.path(), "A.java", "f").unwrap();
        let original = parse_method(&site.read(dir.path()).unwrap()).unwrap();
        (dir, cfg, site, original)
    }

    #[test]
    fn splice_is_isolated_and_checks_span() {
        let (dir, cfg, site, original) = project();
        assert_eq!(original.source, "int f() {\n    int unused = 0;\n    return 1;\n}\n");
        let ws = splice(&cfg, &site, &original.source, "int f() {\n    return 1;\n}\n").unwrap();
        let spliced = std::fs::read_to_string(ws.root().join("A.java")).unwrap();
        assert_eq!(spliced, "class A {\n    int f() {\n        return 1;\n    }\n}\n");
        assert!(std::fs::read_to_string(dir.path().join("A.java")).unwrap().contains("unused"));
        let wrong = MethodSite { start: site.start + 1, ..site.clone() };
        assert!(matches!(splice(&cfg, &wrong, &original.source, "x"), Err(ValidationError::SpanMismatch { .. })));
    }

    #[test]
    fn verdicts() {
        let (_dir, cfg, site, original) = project();
        let good = validate_one("0", &original, &site, "int f() {\n    return 1;\n}\n", &cfg);
        assert_eq!(good.verdict, Verdict::Accepted, "{good:?}");
        assert!(good.is_consistent());
        let bigger = validate_one("1", &original, &site, "int f() {\n    int unused = 0;\n    return 1 + 0;\n}\n", &cfg);
        assert_eq!(bigger.reason, Some(RejectReason::NotSmaller));
        let tie = validate_one("1", &original, &site, "int f() {\n    int u = 0;\n    return 1;\n}\n", &cfg);
        assert_eq!(tie.reason, Some(RejectReason::NotSmaller));
        let fewer_tokens = validate_one("1", &original, &site, "int f() {\n    int unused;\n    return 1;\n}\n", &cfg);
        assert_eq!(fewer_tokens.verdict, Verdict::Accepted);
        let breaking = validate_one("1", &original, &site, "int f() {\n    return 2;\n}\n", &cfg);
        assert_eq!(breaking.reason, Some(RejectReason::TestFailure));
        let same = validate_one("2", &original, &site, &original.source, &cfg);
        assert_eq!(same.reason, Some(RejectReason::Unaltered));
        let broken = validate_one("3", &original, &site, "int f() { return", &cfg);
        assert_eq!(broken.reason, Some(RejectReason::CompileFailure));
    }

    #[test]
    fn timeout_is_reported() {
        let (_dir, mut cfg, site, original) = project();
        cfg.test = "sleep 5".into();
        cfg.timeout_secs = 1;
        let r = validate_one("0", &original, &site, "int f() {\n    return 1;\n}\n", &cfg);
        assert_eq!(r.reason, Some(RejectReason::Timeout));
        assert_eq!(r.verdict, Verdict::Rejected);
    }

    #[test]
    fn oracle_memo() {
        let (_dir, cfg, site, original) = project();
        let oracle = as_oracle(&cfg, &site, &original);
        assert!(oracle.check(&original).unwrap());
        let cand = parse_method("int f() {\n    return 1;\n}\n").unwrap();
        assert!(oracle.check(&cand).unwrap());
        assert!(oracle.check(&parse_method("int f() { return 1; }").unwrap()).unwrap());
        assert_eq!(oracle.runs(), 2);
        assert!(!oracle.check(&parse_method("int f() { return 0; }").unwrap()).unwrap());
    }
}
