//! JUnit-style discovery and execution of `@Test` methods, with XML reports
//! in the Surefire layout.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use quick_xml::escape::escape;
use simplikit_core::syntax::ast::{ExprKind, MethodDecl, TypeDeclKind};

use crate::interp::{Interp, Thrown, DEFAULT_MAX_STEPS};
use crate::program::{has_annotation, ClassInfo, Program};
use crate::value::Value;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Passed,
    Failed { kind: String, message: String },
    Errored { kind: String, message: String },
    Skipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub class: String,
    pub name: String,
    pub status: Status,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub class: String,
    pub tests: Vec<TestResult>,
    pub stdout: String,
}

impl SuiteResult {
    pub fn count(&self, f: impl Fn(&Status) -> bool) -> usize {
        self.tests.iter().filter(|t| f(&t.status)).count()
    }
}

/// `@Test(expected = X.class)` in JUnit 4 style.
fn expected_exception(m: &MethodDecl) -> Option<String> {
    let a = m.modifiers.annotations.iter().find(|a| a.name.rsplit('.').next() == Some("Test"))?;
    a.args.iter().find_map(|e| match &e.kind {
        ExprKind::Assign { target, value, .. } if target.as_name() == Some("expected") => match &value.kind {
            ExprKind::ClassLit(t) => Some(t.simple_name().to_string()),
            _ => None,
        },
        _ => None,
    })
}

fn describe(it: &mut Interp, v: &Value) -> (String, String) {
    let kind = v.class_name();
    let message = match v {
        Value::Object(o) => match o.fields.borrow().get("message").cloned() {
            Some(Value::Null) | None => String::new(),
            Some(m) => it.display(&m).unwrap_or_default(),
        },
        other => it.display(other).unwrap_or_default(),
    };
    (kind, message)
}

fn run_lifecycle<'p>(it: &mut Interp<'p>, class: &'p ClassInfo, this: &Value, names: &[&str]) -> Result<(), Thrown> {
    let program = it.program;
    for c in program.chain(&class.name).into_iter().rev() {
        for m in c.methods.iter().filter(|m| names.iter().any(|n| has_annotation(m, n))) {
            let this = (!m.modifiers.has("static")).then(|| this.clone());
            it.invoke(c, m, this, vec![])?;
        }
    }
    Ok(())
}

fn run_one<'p>(it: &mut Interp<'p>, class: &'p ClassInfo, m: &'p MethodDecl) -> Status {
    let result = (|| {
        let this = it.instantiate(&class.name, vec![])?;
        run_lifecycle(it, class, &this, &["BeforeEach", "Before"])?;
        let r = it.invoke(class, m, Some(this.clone()), vec![]);
        let after = run_lifecycle(it, class, &this, &["AfterEach", "After"]);
        r?;
        after
    })();
    let expected = expected_exception(m);
    match (result, expected) {
        (Ok(()), None) => Status::Passed,
        (Ok(()), Some(x)) => Status::Failed {
            kind: "AssertionError".into(),
            message: format!("Expected exception: {x}"),
        },
        (Err(Thrown::Exception(v)), Some(x)) if it.is_instance(&v, &x) => Status::Passed,
        (Err(Thrown::Exception(v)), _) => {
            let (kind, message) = describe(it, &v);
            if it.is_instance(&v, "AssertionError") {
                Status::Failed { kind, message }
            } else {
                Status::Errored { kind, message }
            }
        }
        (Err(Thrown::Fatal(msg)), _) => Status::Errored {
            kind: "InterpreterError".into(),
            message: msg,
        },
    }
}

pub fn run_class<'p>(program: &'p Program, class: &'p ClassInfo, max_steps: u64) -> SuiteResult {
    let mut it = Interp::new(program);
    it.max_steps = max_steps;
    let mut tests = Vec::new();
    let before_all = {
        let dummy = Value::Null;
        run_lifecycle(&mut it, class, &dummy, &["BeforeAll", "BeforeClass"])
    };
    for m in class.methods.iter().filter(|m| has_annotation(m, "Test")) {
        let start = Instant::now();
        let status = if has_annotation(m, "Disabled") || has_annotation(m, "Ignore") {
            Status::Skipped
        } else if let Err(e) = &before_all {
            Status::Errored {
                kind: "BeforeAllFailed".into(),
                message: format!("{e:?}"),
            }
        } else {
            it.steps = 0;
            run_one(&mut it, class, m)
        };
        tests.push(TestResult {
            class: class.name.clone(),
            name: m.name.name.clone(),
            status,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    SuiteResult {
        class: class.name.clone(),
        tests,
        stdout: std::mem::take(&mut it.stdout),
    }
}

pub fn run_all(program: &Program, max_steps: u64) -> Vec<SuiteResult> {
    program
        .classes
        .values()
        .filter(|c| c.is_test_class() && !is_abstract(c))
        .map(|c| run_class(program, c, max_steps))
        .collect()
}

fn is_abstract(c: &ClassInfo) -> bool {
    c.kind != TypeDeclKind::Class || c.methods.iter().any(|m| m.body.is_none() && !m.is_constructor())
}

pub fn suite_xml(s: &SuiteResult) -> String {
    let failures = s.count(|t| matches!(t, Status::Failed { .. }));
    let errors = s.count(|t| matches!(t, Status::Errored { .. }));
    let skipped = s.count(|t| matches!(t, Status::Skipped));
    let total: f64 = s.tests.iter().map(|t| t.seconds).sum();
    let mut x = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        x,
        "<testsuite name=\"{}\" tests=\"{}\" failures=\"{failures}\" errors=\"{errors}\" skipped=\"{skipped}\" time=\"{total:.3}\">",
        escape(s.class.as_str()),
        s.tests.len()
    );
    for t in &s.tests {
        let _ = write!(
            x,
            "  <testcase classname=\"{}\" name=\"{}\" time=\"{:.3}\"",
            escape(t.class.as_str()),
            escape(t.name.as_str()),
            t.seconds
        );
        match &t.status {
            Status::Passed => x.push_str("/>\n"),
            Status::Skipped => x.push_str(">\n    <skipped/>\n  </testcase>\n"),
            Status::Failed { kind, message } | Status::Errored { kind, message } => {
                let tag = if matches!(t.status, Status::Failed { .. }) { "failure" } else { "error" };
                let _ = write!(
                    x,
                    ">\n    <{tag} message=\"{}\" type=\"{}\">{}</{tag}>\n  </testcase>\n",
                    escape(message.as_str()),
                    escape(kind.as_str()),
                    escape(message.as_str())
                );
            }
        }
    }
    if !s.stdout.is_empty() {
        let _ = writeln!(x, "  <system-out>{}</system-out>", escape(s.stdout.as_str()));
    }
    x.push_str("</testsuite>\n");
    x
}

pub fn write_reports(dir: &Path, suites: &[SuiteResult]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for s in suites {
        std::fs::write(dir.join(format!("TEST-{}.xml", s.class)), suite_xml(s))?;
    }
    Ok(())
}

pub fn default_max_steps() -> u64 {
    DEFAULT_MAX_STEPS
}

#[cfg(test)]
mod tests {
    use super::*;
    use simplikit_core::validator::{read_reports, TestOutcome};

    fn suite(src: &str) -> SuiteResult {
        let mut p = Program::default();
        p.add_source("T.java".into(), src).unwrap();
        let mut all = run_all(&p, 100_000);
        assert_eq!(all.len(), 1);
        all.remove(0)
    }

    #[test]
    fn statuses_and_xml() {
        let s = suite(
            "class T {\n  int base;\n  @BeforeEach void setUp() { base = 40; }\n  @Test void ok() { assertEquals(42, base + 2); }\n  @Test void bad() { assertEquals(1, 2); }\n  @Test void boom() { int[] a = new int[1]; a[3] = 1; }\n  @Test void loops() { while (true) {} }\n  @Disabled @Test void off() {}\n  @Test void thrown() { assertThrows(ArithmeticException.class, () -> { int z = 1 / 0; }); }\n}\n",
        );
        let by = |n: &str| s.tests.iter().find(|t| t.name == n).unwrap().status.clone();
        assert_eq!(by("ok"), Status::Passed);
        assert!(matches!(by("bad"), Status::Failed { message, .. } if message == "expected: <1> but was: <2>"));
        assert!(matches!(by("boom"), Status::Errored { kind, .. } if kind == "ArrayIndexOutOfBoundsException"));
        assert!(matches!(by("loops"), Status::Errored { message, .. } if message.contains("step limit")));
        assert_eq!(by("off"), Status::Skipped);
        assert_eq!(by("thrown"), Status::Passed);
        let xml = suite_xml(&s);
        assert!(xml.contains("tests=\"6\" failures=\"1\" errors=\"2\" skipped=\"1\""));
        let dir = tempfile::tempdir().unwrap();
        write_reports(dir.path(), &[s]).unwrap();
        let parsed = TestOutcome::from_cases(read_reports(dir.path()).unwrap());
        assert_eq!((parsed.total, parsed.passed, parsed.failed, parsed.errored, parsed.skipped), (6, 2, 1, 2, 1));
    }
}
