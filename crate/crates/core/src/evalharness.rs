//! Scoring of generated candidates against ground truth and per-backend
//! aggregate tables.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::catalog::{classify, RuleId};
use crate::corpus::DatasetRecord;
use crate::metrics::{quality_delta, MetricsDelta};
use crate::syntax::lexer::{is_keyword, significant_texts};
use crate::syntax::{parse_method, MethodUnit, SyntaxNode};

pub const KEYWORD_WEIGHT: f64 = 5.0;
pub const MAX_N: usize = 4;
/// Printed with every table: the similarity score has three components.
pub const SIMSCORE_NOTE: &str = "simscore = mean(n-gram, keyword-weighted n-gram, subtree); dataflow match omitted";

pub fn perfect_prediction(candidate: &str, ground_truth: &str) -> bool {
    significant_texts(candidate) == significant_texts(ground_truth)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimScore {
    pub total: f64,
    pub ngram: f64,
    pub weighted_ngram: f64,
    pub subtree: f64,
}

fn ngram_counts<'a>(toks: &'a [&'a str], n: usize) -> HashMap<&'a [&'a str], usize> {
    let mut m = HashMap::new();
    if toks.len() >= n {
        for w in toks.windows(n) {
            *m.entry(w).or_insert(0) += 1;
        }
    }
    m
}

/// Clipped n-gram matches and candidate n-gram total, each n-gram weighted
/// by `weight` (applied to unigrams only; longer n-grams weigh 1).
fn precision_counts(cand: &[&str], refr: &[&str], n: usize, weight: &dyn Fn(&str) -> f64) -> (f64, f64) {
    let c = ngram_counts(cand, n);
    let r = ngram_counts(refr, n);
    let mut matched = 0.0;
    let mut total = 0.0;
    for (gram, &k) in &c {
        let w = if n == 1 { weight(gram[0]) } else { 1.0 };
        total += w * k as f64;
        matched += w * k.min(r.get(gram).copied().unwrap_or(0)) as f64;
    }
    (matched, total)
}

/// Geometric mean of 1..4-gram precisions times the brevity penalty.
/// Unigram precision is unsmoothed, so token-disjoint texts score 0; higher
/// orders use add-one smoothing.
fn bleu(cand: &[&str], refr: &[&str], weight: &dyn Fn(&str) -> f64) -> f64 {
    if cand.is_empty() || refr.is_empty() {
        return if cand.is_empty() && refr.is_empty() { 1.0 } else { 0.0 };
    }
    let mut log_sum = 0.0;
    for n in 1..=MAX_N {
        let (m, t) = precision_counts(cand, refr, n, weight);
        let p = if n == 1 {
            if m == 0.0 {
                return 0.0;
            }
            m / t
        } else {
            (m + 1.0) / (t + 1.0)
        };
        log_sum += p.ln();
    }
    let (c, r) = (cand.len() as f64, refr.len() as f64);
    let bp = if c >= r { 1.0 } else { (1.0 - r / c).exp() };
    bp * (log_sum / MAX_N as f64).exp()
}

/// Kind signature of `node` truncated below depth 3.
fn signature(node: &SyntaxNode, depth: usize, out: &mut String) {
    out.push_str(node.kind);
    if depth > 1 && !node.children.is_empty() {
        out.push('(');
        for (i, c) in node.children.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            signature(c, depth - 1, out);
        }
        out.push(')');
    }
}

fn subtree_signatures(root: &SyntaxNode) -> HashMap<String, usize> {
    let mut m = HashMap::new();
    let mut stack = vec![root];
    while let Some(n) = stack.pop() {
        let mut s = String::new();
        signature(n, 3, &mut s);
        *m.entry(s).or_insert(0) += 1;
        stack.extend(n.children.iter());
    }
    m
}

fn subtree_match(candidate: &str, ground_truth: &str) -> f64 {
    let (Ok(c), Ok(g)) = (parse_method(candidate), parse_method(ground_truth)) else {
        return 0.0;
    };
    let cs = subtree_signatures(&c.tree());
    let gs = subtree_signatures(&g.tree());
    let total: usize = gs.values().sum();
    let matched: usize = gs.iter().map(|(k, &n)| n.min(cs.get(k).copied().unwrap_or(0))).sum();
    matched as f64 / total as f64
}

pub fn simscore(candidate: &str, ground_truth: &str) -> SimScore {
    let c = significant_texts(candidate);
    let g = significant_texts(ground_truth);
    let ngram = bleu(&c, &g, &|_| 1.0);
    let weighted_ngram = bleu(&c, &g, &|t| if is_keyword(t) { KEYWORD_WEIGHT } else { 1.0 });
    let subtree = subtree_match(candidate, ground_truth);
    SimScore {
        total: (ngram + weighted_ngram + subtree) / 3.0,
        ngram,
        weighted_ngram,
        subtree,
    }
}

/// One generated candidate, as read from a predictions JSONL file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub record_id: String,
    pub backend: String,
    pub text: String,
    #[serde(default)]
    pub compiled: Option<bool>,
    #[serde(default)]
    pub test_equivalent: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub record_id: String,
    pub backend: String,
    pub perfect: bool,
    pub simscore: SimScore,
    pub compiled: bool,
    pub test_equivalent: bool,
    pub rules: Vec<RuleId>,
    pub metrics: Option<MetricsDelta>,
}

/// Scores `pred` against its record. A missing compile flag falls back to
/// "parses"; a missing equivalence flag to perfect prediction.
pub fn evaluate(pred: &Prediction, gold: &DatasetRecord) -> EvalRow {
    let perfect = perfect_prediction(&pred.text, &gold.simplified);
    let simscore = if perfect {
        SimScore {
            total: 1.0,
            ngram: 1.0,
            weighted_ngram: 1.0,
            subtree: 1.0,
        }
    } else {
        simscore(&pred.text, &gold.simplified)
    };
    let original: Option<MethodUnit> = parse_method(&gold.original).ok();
    let cand = parse_method(&pred.text).ok();
    let (rules, metrics) = match (&original, &cand) {
        (Some(o), Some(c)) => (classify(o, c), Some(quality_delta(o, c))),
        _ => (Vec::new(), None),
    };
    EvalRow {
        record_id: pred.record_id.clone(),
        backend: pred.backend.clone(),
        perfect,
        simscore,
        compiled: pred.compiled.unwrap_or(cand.is_some()),
        test_equivalent: pred.test_equivalent.unwrap_or(perfect),
        rules,
        metrics,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    pub median: f64,
    /// Sample standard deviation; 0 for fewer than two values.
    pub stdev: f64,
}

pub fn stats(values: &[f64]) -> Stats {
    if values.is_empty() {
        return Stats::default();
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len().is_multiple_of(2) {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    };
    let stdev = if values.len() < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Stats { mean, median, stdev }
}

/// Deltas (after minus before) over a subset of rows.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DeltaStats {
    pub count: usize,
    pub sloc: Stats,
    pub cyclomatic: Stats,
    pub cognitive: Stats,
}

fn delta_stats<'a>(rows: impl Iterator<Item = &'a EvalRow>) -> DeltaStats {
    let ms: Vec<&MetricsDelta> = rows.filter_map(|r| r.metrics.as_ref()).collect();
    let col = |f: &dyn Fn(&MetricsDelta) -> i64| stats(&ms.iter().map(|m| f(m) as f64).collect::<Vec<_>>());
    DeltaStats {
        count: ms.len(),
        sloc: col(&|m| m.sloc_delta()),
        cyclomatic: col(&|m| m.cyclomatic_delta()),
        cognitive: col(&|m| m.cognitive_delta()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendReport {
    pub backend: String,
    pub rows: usize,
    pub perfect: usize,
    pub perfect_ratio: f64,
    pub simscore: Stats,
    pub compile_rate: f64,
    pub test_equivalent_rate: f64,
    pub rule_histogram: BTreeMap<String, usize>,
    pub perfect_deltas: DeltaStats,
    pub equivalent_deltas: DeltaStats,
}

/// Per-backend tables, ordered by backend id. Row order does not matter.
pub fn aggregate(rows: &[EvalRow]) -> Vec<BackendReport> {
    let mut by_backend: BTreeMap<&str, Vec<&EvalRow>> = BTreeMap::new();
    for r in rows {
        by_backend.entry(&r.backend).or_default().push(r);
    }
    by_backend
        .into_iter()
        .map(|(backend, mut rs)| {
            // Sort so float sums are accumulated in a fixed order.
            rs.sort_by(|a, b| a.record_id.cmp(&b.record_id).then(a.simscore.total.total_cmp(&b.simscore.total)));
            let n = rs.len();
            let ratio = |k: usize| if n == 0 { 0.0 } else { k as f64 / n as f64 };
            let perfect = rs.iter().filter(|r| r.perfect).count();
            let mut hist = BTreeMap::new();
            for r in &rs {
                for rule in &r.rules {
                    *hist.entry(rule.code().to_string()).or_insert(0) += 1;
                }
            }
            BackendReport {
                backend: backend.to_string(),
                rows: n,
                perfect,
                perfect_ratio: ratio(perfect),
                simscore: stats(&rs.iter().map(|r| r.simscore.total).collect::<Vec<_>>()),
                compile_rate: ratio(rs.iter().filter(|r| r.compiled).count()),
                test_equivalent_rate: ratio(rs.iter().filter(|r| r.test_equivalent).count()),
                rule_histogram: hist,
                perfect_deltas: delta_stats(rs.iter().copied().filter(|r| r.perfect)),
                equivalent_deltas: delta_stats(rs.iter().copied().filter(|r| r.test_equivalent)),
            }
        })
        .collect()
}

fn render_rows(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(header.to_vec(), &mut out);
    line(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str).collect(), &mut out);
    for r in rows {
        line(r.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

/// Aligned-column text rendering of `aggregate`.
pub fn render_table(reports: &[BackendReport]) -> String {
    let mut out = format!("# {SIMSCORE_NOTE}\n");
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.backend.clone(),
                r.rows.to_string(),
                format!("{}/{:.2}%", r.perfect, r.perfect_ratio * 100.0),
                format!("{:.3}", r.simscore.mean),
                format!("{:.3}", r.simscore.median),
                format!("{:.3}", r.simscore.stdev),
                format!("{:.2}%", r.compile_rate * 100.0),
                format!("{:.2}%", r.test_equivalent_rate * 100.0),
            ]
        })
        .collect();
    out.push_str(&render_rows(
        &["backend", "rows", "PP #/%", "sim mean", "sim median", "sim stdev", "compiled", "test-equiv"],
        &rows,
    ));
    for r in reports {
        let _ = writeln!(out, "\n{} deltas (after - before): mean/median/stdev", r.backend);
        let mut drows = Vec::new();
        for (label, d) in [("perfect", &r.perfect_deltas), ("test-equivalent", &r.equivalent_deltas)] {
            for (metric, s) in [("sloc", d.sloc), ("cyclomatic", d.cyclomatic), ("cognitive", d.cognitive)] {
                drows.push(vec![
                    label.to_string(),
                    d.count.to_string(),
                    metric.to_string(),
                    format!("{:.3}", s.mean),
                    format!("{:.3}", s.median),
                    format!("{:.3}", s.stdev),
                ]);
            }
        }
        out.push_str(&render_rows(&["subset", "n", "metric", "mean", "median", "stdev"], &drows));
        if !r.rule_histogram.is_empty() {
            let hist: Vec<String> = r.rule_histogram.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(out, "rules: {}", hist.join(" "));
        }
    }
    out
}
