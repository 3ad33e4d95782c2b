//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use serde::Deserialize;
use simplikit_core::corpus::{DatasetRecord, Validity};
use simplikit_core::localization::{HunkSummary, LocalizedPair};
use simplikit_core::syntax::parse_method;
use simplikit_core::validator::{MethodSite, ProjectConfig, ResultMode};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn javalite() -> &'static str {
    env!("CARGO_BIN_EXE_javalite")
}

pub fn simplikit() -> &'static str {
    env!("CARGO_BIN_EXE_simplikit")
}

/// Report-files config for a project checked by the bundled interpreter.
pub fn project_config(root: &Path) -> ProjectConfig {
    let mut cfg = ProjectConfig::new(
        root,
        format!("{} build .", javalite()),
        format!("{} test . --reports target/reports", javalite()),
    );
    cfg.timeout_secs = 60;
    cfg.mode = ResultMode::ReportFiles;
    cfg.reports = Some("target/reports".into());
    cfg
}

pub fn write_project_config(root: &Path, at: &Path) {
    let cfg = project_config(root);
    std::fs::write(at, toml::to_string(&cfg).unwrap()).unwrap();
}

#[derive(Debug, Clone, Deserialize)]
pub struct Pair {
    pub file: String,
    pub method: String,
    pub deletion: bool,
    pub simplified: String,
}

#[derive(Debug, Deserialize)]
struct PairFile {
    pair: Vec<Pair>,
}

pub struct CorpusEntry {
    pub pair: Pair,
    pub site: MethodSite,
    pub record: DatasetRecord,
}

pub fn corpus_root() -> PathBuf {
    fixtures().join("corpus-project")
}

/// The hand-written corpus as dataset records, originals read from the
/// corpus project.
pub fn corpus() -> Vec<CorpusEntry> {
    let text = std::fs::read_to_string(fixtures().join("corpus-pairs.toml")).unwrap();
    let pairs: PairFile = toml::from_str(&text).unwrap();
    let root = corpus_root();
    pairs
        .pair
        .into_iter()
        .map(|pair| {
            let site = MethodSite::find(&root, &pair.file, &pair.method).unwrap();
            let original = site.read(&root).unwrap();
            let o = parse_method(&original).unwrap();
            let s = parse_method(&pair.simplified).unwrap_or_else(|e| panic!("{}: {e}", pair.method));
            let lp = LocalizedPair::perfect(&o, &s);
            let record = DatasetRecord {
                project: "corpus".into(),
                commit: "fixture".into(),
                file_path: pair.file.clone(),
                method_name: pair.method.clone(),
                localized_original: lp.localized_original,
                hunks: lp.hunks.iter().map(HunkSummary::from).collect(),
                original,
                simplified: pair.simplified.clone(),
                split: None,
                validity: Validity::Valid,
                validity_reason: None,
                tokens: (o.token_count, s.token_count),
                sloc: (o.sloc, s.sloc),
            };
            CorpusEntry { pair, site, record }
        })
        .collect()
}

// ---- independent size oracle -------------------------------------------

/// Source with comments blanked out (newlines kept), string and char
/// literals left intact.
pub fn strip_comments(src: &str) -> String {
    let b = src.as_bytes();
    let mut out = String::with_capacity(src.len());
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c == b'/' && b.get(i + 1) == Some(&b'/') {
            while i < b.len() && b[i] != b'\n' {
                i += 1;
            }
        } else if c == b'/' && b.get(i + 1) == Some(&b'*') {
            i += 2;
            while i < b.len() && !(b[i] == b'*' && b.get(i + 1) == Some(&b'/')) {
                if b[i] == b'\n' {
                    out.push('\n');
                }
                i += 1;
            }
            i += 2;
            out.push(' ');
        } else if c == b'"' || c == b'\'' {
            let start = i;
            i += 1;
            while i < b.len() && b[i] != c {
                if b[i] == b'\\' {
                    i += 1;
                }
                i += 1;
            }
            i += 1;
            out.push_str(&src[start..i.min(b.len())]);
        } else {
            let ch = src[i..].chars().next().unwrap();
            out.push(ch);
            i += ch.len_utf8();
        }
    }
    out
}

/// Lines holding at least one non-comment token.
pub fn oracle_sloc(src: &str) -> usize {
    strip_comments(src).lines().filter(|l| !l.trim().is_empty()).count()
}

const OPERATORS: [&str; 25] = [
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=",
    "/=", "%=", "&=", "|=", "^=", "<<", ">>",
];

/// Significant tokens by maximal munch.
pub fn oracle_tokens(src: &str) -> Vec<String> {
    let s = strip_comments(src);
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' || c == b'$' {
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'$') {
                i += 1;
            }
        } else if c.is_ascii_digit() || (c == b'.' && b.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'.' || b[i] == b'_') {
                i += 1;
            }
        } else if c == b'"' || c == b'\'' {
            i += 1;
            while i < b.len() && b[i] != c {
                if b[i] == b'\\' {
                    i += 1;
                }
                i += 1;
            }
            i += 1;
        } else if let Some(op) = OPERATORS.iter().find(|op| s[i..].starts_with(**op)) {
            i += op.len();
        } else {
            i += s[i..].chars().next().unwrap().len_utf8();
        }
        out.push(s[start..i].to_string());
    }
    out
}

pub fn oracle_token_equal(a: &str, b: &str) -> bool {
    oracle_tokens(a) == oracle_tokens(b)
}

/// The size condition, checked with the independent counters.
pub fn oracle_smaller(before: &str, after: &str) -> bool {
    let (s0, s1) = (oracle_sloc(before), oracle_sloc(after));
    s1 < s0 || (s1 == s0 && oracle_tokens(after).len() < oracle_tokens(before).len())
}

// ---- independent equivalence oracle ------------------------------------

/// Counts from the Surefire XML files in `dir`, read with plain string
/// scanning.
pub fn count_report_xml(dir: &Path) -> (usize, usize) {
    let mut total = 0;
    let mut bad = 0;
    for e in std::fs::read_dir(dir).unwrap() {
        let text = std::fs::read_to_string(e.unwrap().path()).unwrap();
        total += text.matches("<testcase ").count();
        bad += text.matches("<failure ").count() + text.matches("<error ").count();
    }
    (total, bad)
}

fn copy_dir(from: &Path, to: &Path) {
    for e in walkdir::WalkDir::new(from) {
        let e = e.unwrap();
        let rel = e.path().strip_prefix(from).unwrap();
        if rel.starts_with("target") {
            continue;
        }
        let dest = to.join(rel);
        if e.file_type().is_dir() {
            std::fs::create_dir_all(&dest).unwrap();
        } else {
            std::fs::copy(e.path(), &dest).unwrap();
        }
    }
}

/// Copies the project, replaces `original` (found by indentation-insensitive
/// text search) with `candidate`, then builds and tests it. Returns whether
/// every test passed and at least one ran.
pub fn oracle_passes(root: &Path, file: &str, original: &str, candidate: &str) -> bool {
    let dir = tempfile::tempdir().unwrap();
    copy_dir(root, dir.path());
    let path = dir.path().join(file);
    let src = std::fs::read_to_string(&path).unwrap();
    let first = original.lines().next().unwrap().trim();
    let start = src.find(first).expect("method header in file");
    let indent = &src[src[..start].rfind('\n').map_or(0, |p| p + 1)..start];
    let indented: String = original
        .trim_end()
        .lines()
        .enumerate()
        .map(|(i, l)| if i == 0 || l.is_empty() { l.to_string() } else { format!("{indent}{l}") })
        .collect::<Vec<_>>()
        .join("\n");
    assert!(src[start..].starts_with(&indented), "original text of {file} not found verbatim");
    let replacement: String = candidate
        .trim_end()
        .lines()
        .enumerate()
        .map(|(i, l)| if i == 0 || l.is_empty() { l.to_string() } else { format!("{indent}{l}") })
        .collect::<Vec<_>>()
        .join("\n");
    let new_src = format!("{}{}{}", &src[..start], replacement, &src[start + indented.len()..]);
    std::fs::write(&path, new_src).unwrap();
    let reports = dir.path().join("oracle-reports");
    let status = Command::new(javalite())
        .args(["test", "."])
        .arg("--reports")
        .arg(&reports)
        .current_dir(dir.path())
        .output()
        .unwrap();
    if !reports.is_dir() {
        return false;
    }
    let (total, bad) = count_report_xml(&reports);
    status.status.success() && total > 0 && bad == 0
}
