//! Dataset construction from commit histories: keyword filtering, method
//! pair extraction around qualifying hunks, project-level splits and the
//! JSONL codec.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};
use std::path::Path;
use std::process::Command;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::catalog::edit::{column, dedent_tail};
use crate::catalog::is_smaller;
use crate::localization::{diff, diff_texts, encode_localized, qualifies_as_simplification, HunkSummary};
use crate::syntax::scan::{find_methods, MethodLocation};
use crate::syntax::{parse_method, token_equal, MethodUnit};
use crate::validator::{check_equivalence, pristine, ProjectConfig, ValidationError};

/// Significant-token cap applied to both sides of a pair.
pub const MAX_TOKENS: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangedFile {
    pub path: String,
    /// Empty for added files.
    pub before: String,
    /// Empty for deleted files.
    pub after: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitRecord {
    pub project: String,
    pub commit: String,
    pub message: String,
    pub files: Vec<ChangedFile>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Validation,
    Test,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Validity {
    #[default]
    Whole,
    Valid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub project: String,
    pub commit: String,
    pub file_path: String,
    pub method_name: String,
    pub original: String,
    pub simplified: String,
    pub localized_original: String,
    pub hunks: Vec<HunkSummary>,
    #[serde(default)]
    pub split: Option<Split>,
    #[serde(default)]
    pub validity: Validity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validity_reason: Option<String>,
    /// Significant tokens of (original, simplified).
    pub tokens: (usize, usize),
    pub sloc: (usize, usize),
}

impl DatasetRecord {
    pub fn id(&self) -> String {
        let short = &self.commit[..self.commit.len().min(10)];
        format!("{}@{}:{}#{}", self.project, short, self.file_path, self.method_name)
    }

    pub fn original_unit(&self) -> Result<MethodUnit, crate::syntax::SyntaxError> {
        parse_method(&self.original)
    }

    pub fn simplified_unit(&self) -> Result<MethodUnit, crate::syntax::SyntaxError> {
        parse_method(&self.simplified)
    }
}

static SIMPLIFY_WORD: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b(simplify|simplification|simplified)\b").expect("valid regex"));
static CODE_WORD: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\b(code|program)\b").expect("valid regex"));

pub fn message_matches(message: &str) -> bool {
    SIMPLIFY_WORD.is_match(message) && CODE_WORD.is_match(message)
}

pub fn touches_java(record: &CommitRecord) -> bool {
    record.files.iter().any(|f| f.path.ends_with(".java"))
}

/// Commits whose message names a simplification of code or a program and
/// that change at least one Java file.
pub fn filter_commits(records: impl IntoIterator<Item = CommitRecord>) -> Vec<CommitRecord> {
    records
        .into_iter()
        .filter(|r| message_matches(&r.message) && touches_java(r))
        .collect()
}

/// Counts of candidate pairs skipped by `extract_pairs`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractStats {
    pub unparseable: usize,
    pub unmatched: usize,
    pub over_limit: usize,
    pub unaltered: usize,
    pub not_simpler: usize,
}

impl ExtractStats {
    pub fn add(&mut self, other: &ExtractStats) {
        self.unparseable += other.unparseable;
        self.unmatched += other.unmatched;
        self.over_limit += other.over_limit;
        self.unaltered += other.unaltered;
        self.not_simpler += other.not_simpler;
    }

    pub fn skipped(&self) -> usize {
        self.unparseable + self.unmatched + self.over_limit + self.unaltered + self.not_simpler
    }
}

/// Method text cut from a file, re-indented so its first line sits at
/// column 0.
fn method_text(src: &str, loc: &MethodLocation) -> String {
    let text = &src[loc.start..loc.end];
    let mut out = dedent_tail(text, column(src, loc.start));
    out.push('\n');
    out
}

/// One record per (method, commit) for every method of the old file version
/// containing a qualifying hunk.
pub fn extract_pairs(commit: &CommitRecord) -> (Vec<DatasetRecord>, ExtractStats) {
    let mut out = Vec::new();
    let mut stats = ExtractStats::default();
    for file in commit.files.iter().filter(|f| f.path.ends_with(".java")) {
        if file.before.is_empty() || file.after.is_empty() {
            continue;
        }
        let before_methods = find_methods(&file.before);
        let after_methods = find_methods(&file.after);
        let mut touched: BTreeSet<usize> = BTreeSet::new();
        for hunk in diff_texts(&file.before, &file.after) {
            if !qualifies_as_simplification(&hunk) {
                continue;
            }
            for line in hunk.deleted_lines() {
                if let Some(i) = before_methods.iter().position(|m| m.contains_line(line)) {
                    touched.insert(i);
                }
            }
        }
        for i in touched {
            let old = &before_methods[i];
            let same = |m: &&MethodLocation| m.qualified_name == old.qualified_name;
            let new = after_methods
                .iter()
                .filter(same)
                .find(|m| m.params == old.params)
                .or_else(|| {
                    let mut named = after_methods.iter().filter(same);
                    match (named.next(), named.next()) {
                        (Some(only), None) => Some(only),
                        _ => None,
                    }
                });
            let Some(new) = new else {
                stats.unmatched += 1;
                continue;
            };
            let original = method_text(&file.before, old);
            let simplified = method_text(&file.after, new);
            let (Ok(o), Ok(s)) = (parse_method(&original), parse_method(&simplified)) else {
                stats.unparseable += 1;
                continue;
            };
            if o.token_count > MAX_TOKENS || s.token_count > MAX_TOKENS {
                stats.over_limit += 1;
                continue;
            }
            if token_equal(&original, &simplified) {
                stats.unaltered += 1;
                continue;
            }
            let hunks = diff(&o, &s);
            if !hunks.iter().any(qualifies_as_simplification) || !is_smaller(&o, &s) {
                stats.not_simpler += 1;
                continue;
            }
            out.push(DatasetRecord {
                project: commit.project.clone(),
                commit: commit.commit.clone(),
                file_path: file.path.clone(),
                method_name: old.qualified_name.clone(),
                localized_original: encode_localized(&original, &hunks, true),
                hunks: hunks.iter().map(HunkSummary::from).collect(),
                original,
                simplified,
                split: None,
                validity: Validity::Whole,
                validity_reason: None,
                tokens: (o.token_count, s.token_count),
                sloc: (o.sloc, s.sloc),
            });
        }
    }
    (out, stats)
}

/// Position of `project` in the seeded ordering.
pub fn project_hash(project: &str, seed: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(project.as_bytes());
    let digest = h.finalize();
    u64::from_be_bytes(digest[..8].try_into().expect("8 bytes"))
}

/// Project counts per split for `n` projects: train and validation are
/// rounded shares of 80% and 10%, test takes the rest.
pub fn split_sizes(n: usize) -> (usize, usize, usize) {
    let train = (n as f64 * 0.8).round() as usize;
    let valid = ((n as f64 * 0.1).round() as usize).min(n - train);
    (train, valid, n - train - valid)
}

/// Assigns each project (and every record in it) to one split. Projects are
/// ordered by a seeded hash and cut 8:1:1.
pub fn split(records: &mut [DatasetRecord], seed: u64) {
    let assignment: BTreeMap<String, Split> = assign_projects(records.iter().map(|r| r.project.as_str()), seed)
        .into_iter()
        .map(|(p, s)| (p.to_string(), s))
        .collect();
    for r in records.iter_mut() {
        r.split = Some(assignment[&r.project]);
    }
}

pub fn assign_projects<'a>(projects: impl IntoIterator<Item = &'a str>, seed: u64) -> BTreeMap<&'a str, Split> {
    let mut uniq: Vec<&str> = projects.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    uniq.sort_by_key(|p| (project_hash(p, seed), *p));
    let (train, valid, _) = split_sizes(uniq.len());
    uniq.into_iter()
        .enumerate()
        .map(|(i, p)| {
            let s = if i < train {
                Split::Train
            } else if i < train + valid {
                Split::Validation
            } else {
                Split::Test
            };
            (p, s)
        })
        .collect()
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("git {args}: {message}")]
    Git { args: String, message: String },
}

pub fn write_jsonl<T: Serialize>(mut w: impl Write, items: &[T]) -> std::io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads one JSON value per non-blank line.
pub fn read_jsonl<T: for<'de> Deserialize<'de>>(r: impl BufRead) -> Result<Vec<T>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|source| CorpusError::Io {
            path: "<stream>".into(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|source| CorpusError::Json { line: i + 1, source })?);
    }
    Ok(out)
}

pub fn read_jsonl_file<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CorpusError> {
    let f = std::fs::File::open(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_jsonl(std::io::BufReader::new(f))
}

/// How commits of a repository map to project ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProjectLayout {
    /// The whole repository is one project.
    Single(String),
    /// Each top-level directory is a project; a commit touching several
    /// yields one record per project.
    TopLevelDirs,
}

fn git(repo: &Path, args: &[&str]) -> Result<String, CorpusError> {
    let out = Command::new("git")
        .arg("-C")
        .arg(repo)
        .args(args)
        .output()
        .map_err(|e| CorpusError::Git {
            args: args.join(" "),
            message: e.to_string(),
        })?;
    if !out.status.success() {
        return Err(CorpusError::Git {
            args: args.join(" "),
            message: String::from_utf8_lossy(&out.stderr).trim().to_string(),
        });
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

/// Reads the first-parent history of HEAD, oldest first, through the git
/// command line.
pub fn commits_from_git(repo: &Path, layout: &ProjectLayout) -> Result<Vec<CommitRecord>, CorpusError> {
    let mut out = Vec::new();
    for hash in git(repo, &["rev-list", "--first-parent", "--reverse", "HEAD"])?.lines() {
        let message = git(repo, &["show", "-s", "--format=%B", hash])?.trim_end().to_string();
        let status = git(repo, &["diff-tree", "--root", "--no-commit-id", "-r", "--name-status", "--no-renames", hash])?;
        let mut by_project: BTreeMap<String, Vec<ChangedFile>> = BTreeMap::new();
        for line in status.lines() {
            let mut parts = line.split('\t');
            let (Some(kind), Some(path)) = (parts.next(), parts.next()) else { continue };
            let before = if kind == "A" {
                String::new()
            } else {
                git(repo, &["show", &format!("{hash}^:{path}")])?
            };
            let after = if kind == "D" {
                String::new()
            } else {
                git(repo, &["show", &format!("{hash}:{path}")])?
            };
            let project = match layout {
                ProjectLayout::Single(name) => name.clone(),
                ProjectLayout::TopLevelDirs => path.split('/').next().unwrap_or(path).to_string(),
            };
            by_project.entry(project).or_default().push(ChangedFile {
                path: path.to_string(),
                before,
                after,
            });
        }
        for (project, files) in by_project {
            out.push(CommitRecord {
                project,
                commit: hash.to_string(),
                message: message.clone(),
                files,
            });
        }
    }
    Ok(out)
}

/// Full mining pipeline over commit records.
pub fn mine(records: impl IntoIterator<Item = CommitRecord>) -> (Vec<DatasetRecord>, ExtractStats) {
    let mut out = Vec::new();
    let mut stats = ExtractStats::default();
    for c in filter_commits(records) {
        let (recs, s) = extract_pairs(&c);
        out.extend(recs);
        stats.add(&s);
    }
    (out, stats)
}

/// Marks `record` valid when the unmodified project builds and its suite
/// passes with at least one test; otherwise whole, with the reason.
pub fn mark_valid(mut record: DatasetRecord, config: &ProjectConfig) -> DatasetRecord {
    let reason = match pristine(config).and_then(|ws| check_equivalence(ws.root(), config)) {
        Err(ValidationError::Io { .. }) => Some("checkout-missing"),
        Err(_) => Some("build-failure"),
        Ok(eq) if eq.timed_out => Some("build-timeout"),
        Ok(eq) if !eq.compiled => Some("build-failure"),
        Ok(eq) if eq.outcome.total == 0 => Some("no-tests"),
        Ok(eq) if !eq.outcome.all_passed() => Some("test-failure"),
        Ok(_) => None,
    };
    record.validity = if reason.is_none() { Validity::Valid } else { Validity::Whole };
    record.validity_reason = reason.map(str::to_owned);
    record
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localization::strip_markers;
    use crate::test_fixtures::*;
    use proptest::prelude::*;

    fn commit(message: &str, path: &str) -> CommitRecord {
        CommitRecord {
            project: "p".into(),
            commit: "c0ffee".into(),
            message: message.into(),
            files: vec![ChangedFile {
                path: path.into(),
                before: "class A {}".into(),
                after: "class A { }".into(),
            }],
        }
    }

    #[test]
    fn keyword_filter() {
        let kept = |m: &str, p: &str| !filter_commits([commit(m, p)]).is_empty();
        assert!(kept("Simplify code in parser", "Foo.java"));
        assert!(kept("simplified program flow", "Foo.java"));
        assert!(kept("SIMPLIFICATION of the CODE", "a/B.java"));
        assert!(!kept("fix NPE", "Foo.java"));
        assert!(!kept("Simplify code in parser", "README.md"));
        assert!(!kept("simplify the parser", "Foo.java"));
        assert!(!kept("oversimplified codebase", "Foo.java"));
        assert!(!kept("simplifying code", "Foo.java"));
    }

    fn in_class(method: &str) -> String {
        let body: String = method.lines().map(|l| format!("    {l}\n")).collect();
        format!("package a;\n\npublic class Repo {{\n    private int n;\n\n{body}\n    void other() {{\n        n++;\n    }}\n}}\n")
    }

    fn java_commit(before: &str, after: &str) -> CommitRecord {
        CommitRecord {
            project: "audit".into(),
            commit: "0123456789abcdef".into(),
            message: "Simplify code".into(),
            files: vec![ChangedFile {
                path: "src/Repo.java".into(),
                before: in_class(before),
                after: in_class(after),
            }],
        }
    }

    #[test]
    fn inline_return_commit_yields_one_record() {
        let (recs, stats) = extract_pairs(&java_commit(AUDIT_LOGS, AUDIT_LOGS_SIMPLE));
        assert_eq!(stats.skipped(), 0);
        assert_eq!(recs.len(), 1);
        let r = &recs[0];
        assert_eq!(r.original, AUDIT_LOGS);
        assert_eq!(r.simplified, AUDIT_LOGS_SIMPLE);
        assert_eq!(r.method_name, "Repo.getAuditRequestLogs");
        assert_eq!(r.sloc, (4, 3));
        assert_eq!(r.hunks.len(), 1);
        assert!(r.localized_original.contains("<original>"));
        assert!(token_equal(&strip_markers(&r.localized_original).unwrap(), AUDIT_LOGS));
    }

    #[test]
    fn non_qualifying_hunk_gives_nothing() {
        let before = "int f() {\n    return a;\n}\n";
        let after = "int f() {\n    g();\n    return b;\n}\n";
        let (recs, _) = extract_pairs(&java_commit(before, after));
        assert!(recs.is_empty());
    }

    #[test]
    fn token_cap() {
        let big: String = (0..200).map(|i| format!("    g({i});\n")).collect();
        let before = format!("void f() {{\n    int unused = 0;\n{big}}}\n");
        let after = format!("void f() {{\n{big}}}\n");
        let (recs, stats) = extract_pairs(&java_commit(&before, &after));
        assert!(recs.is_empty());
        assert_eq!(stats.over_limit, 1);
    }

    #[test]
    fn split_counts_and_determinism() {
        let recs: Vec<DatasetRecord> = (0..10)
            .flat_map(|p| (0..3).map(move |k| record(&format!("proj{p}"), k)))
            .collect();
        let mut a = recs.clone();
        split(&mut a, 7);
        let mut b = recs;
        split(&mut b, 7);
        assert_eq!(a, b);
        let per_project: BTreeMap<&str, BTreeSet<Split>> = a.iter().fold(BTreeMap::new(), |mut m, r| {
            m.entry(r.project.as_str()).or_default().insert(r.split.unwrap());
            m
        });
        assert!(per_project.values().all(|s| s.len() == 1));
        let count = |s: Split| per_project.values().filter(|v| v.contains(&s)).count();
        assert_eq!((count(Split::Train), count(Split::Validation), count(Split::Test)), (8, 1, 1));
    }

    fn record(project: &str, k: usize) -> DatasetRecord {
        DatasetRecord {
            project: project.into(),
            commit: format!("{k:040}"),
            file_path: "A.java".into(),
            method_name: "A.f".into(),
            original: AUDIT_LOGS.into(),
            simplified: AUDIT_LOGS_SIMPLE.into(),
            localized_original: AUDIT_LOGS.into(),
            hunks: Vec::new(),
            split: None,
            validity: Validity::Whole,
            validity_reason: None,
            tokens: (14, 10),
            sloc: (4, 3),
        }
    }

    #[test]
    fn jsonl_round_trip_and_keys() {
        let mut r = record("p", 1);
        r.split = Some(Split::Validation);
        r.validity_reason = Some("no-tests".into());
        let mut buf = Vec::new();
        write_jsonl(&mut buf, std::slice::from_ref(&r)).unwrap();
        let line = String::from_utf8(buf.clone()).unwrap();
        for key in ["\"file_path\"", "\"method_name\"", "\"localized_original\"", "\"split\":\"validation\"", "\"validity\":\"whole\""] {
            assert!(line.contains(key), "{key} in {line}");
        }
        let back: Vec<DatasetRecord> = read_jsonl(&buf[..]).unwrap();
        assert_eq!(back, [r]);
    }

    #[test]
    fn validity_marking() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir(dir.path().join("reports")).unwrap();
        let mut cfg = ProjectConfig::new(dir.path(), "true", "true");
        assert_eq!(mark_valid(record("p", 0), &cfg).validity, Validity::Valid);
        cfg.build = "false".into();
        let r = mark_valid(record("p", 0), &cfg);
        assert_eq!((r.validity, r.validity_reason.as_deref()), (Validity::Whole, Some("build-failure")));
        cfg.build = "true".into();
        cfg.mode = crate::validator::ResultMode::ReportFiles;
        cfg.reports = Some("reports".into());
        let r = mark_valid(record("p", 0), &cfg);
        assert_eq!(r.validity_reason.as_deref(), Some("no-tests"));
        cfg.root = dir.path().join("missing");
        let r = mark_valid(record("p", 0), &cfg);
        assert_eq!(r.validity_reason.as_deref(), Some("checkout-missing"));
    }

    proptest! {
        #[test]
        fn split_sizes_within_one(n in 1usize..300) {
            let (t, v, s) = split_sizes(n);
            prop_assert_eq!(t + v + s, n);
            let nf = n as f64;
            prop_assert!((t as f64 - 0.8 * nf).abs() <= 1.0);
            prop_assert!((v as f64 - 0.1 * nf).abs() <= 1.0);
            prop_assert!((s as f64 - 0.1 * nf).abs() <= 1.0);
        }

        #[test]
        fn split_is_project_disjoint(projects in proptest::collection::vec("[a-e]{1,3}", 1..40), seed in any::<u64>()) {
            let m = assign_projects(projects.iter().map(String::as_str), seed);
            let again = assign_projects(projects.iter().rev().map(String::as_str), seed);
            prop_assert_eq!(m, again);
        }
    }
}
