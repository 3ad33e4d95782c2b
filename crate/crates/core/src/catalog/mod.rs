//! Taxonomy-typed rewrites: discovery, application, candidate enumeration
//! and classification of observed simplifications.

pub(crate) mod edit;
mod rules;
mod scope;
pub mod taxonomy;

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use taxonomy::{rule_table_json, RuleId, RuleInfo, TAXONOMY};

use crate::localization::diff_texts;
use crate::syntax::ast::Span;
use crate::syntax::{normalized_lines, parse_method, significant_texts, MethodUnit, SyntaxError};

/// One applicable rewrite. `span` is the exact byte range replaced (it may
/// include surrounding whitespace); `node_span` is the syntax node, or run of
/// sibling nodes, the rewrite targets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rewrite {
    pub rule: RuleId,
    pub span: Span,
    pub node_span: Span,
    pub original: String,
    pub replacement: String,
    pub evidence: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogConfig {
    /// Minimum number of single-type imports from one package before they
    /// are merged into a wildcard.
    pub merge_imports_threshold: usize,
}

impl Default for CatalogConfig {
    fn default() -> Self {
        CatalogConfig {
            merge_imports_threshold: 5,
        }
    }
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("stale rewrite: {rule} expected {expected:?} at {start}..{end}")]
    StaleRewrite {
        rule: RuleId,
        start: usize,
        end: usize,
        expected: String,
    },
    #[error("rewrite {rule} produced an unparseable method: {source}")]
    Unparseable { rule: RuleId, source: SyntaxError },
}

pub fn applicable_rules(unit: &MethodUnit) -> Vec<Rewrite> {
    applicable_rules_with(unit, &CatalogConfig::default())
}

pub fn applicable_rules_with(unit: &MethodUnit, cfg: &CatalogConfig) -> Vec<Rewrite> {
    rules::collect(unit, cfg)
}

/// Replaces `rewrite.span` with its replacement and re-parses.
pub fn apply(unit: &MethodUnit, rewrite: &Rewrite) -> Result<MethodUnit, CatalogError> {
    let Span { start, end } = rewrite.span;
    if unit.source.get(start..end) != Some(rewrite.original.as_str()) {
        return Err(CatalogError::StaleRewrite {
            rule: rewrite.rule,
            start,
            end,
            expected: rewrite.original.clone(),
        });
    }
    let mut text = String::with_capacity(unit.source.len() + rewrite.replacement.len());
    text.push_str(&unit.source[..start]);
    text.push_str(&rewrite.replacement);
    text.push_str(&unit.source[end..]);
    let parsed = parse_method(&text).map_err(|source| CatalogError::Unparseable {
        rule: rewrite.rule,
        source,
    })?;
    Ok(parsed.located(unit.qualified_name.clone(), unit.file_span.0))
}

/// Size condition of a simplification: fewer source lines, or as many lines
/// and fewer significant tokens.
pub fn is_smaller(before: &MethodUnit, after: &MethodUnit) -> bool {
    after.sloc < before.sloc || (after.sloc == before.sloc && after.token_count < before.token_count)
}

/// A candidate with the rules applied to reach it, in order.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    pub unit: MethodUnit,
    pub rules: Vec<RuleId>,
}

/// Breadth-first closure of rule applications, capped at `budget` distinct
/// candidates. Every candidate is smaller than the unit it was derived from.
pub fn enumerate_candidates(unit: &MethodUnit, budget: usize) -> Vec<MethodUnit> {
    enumerate_derivations(unit, budget, |_| true)
        .into_iter()
        .map(|d| d.unit)
        .collect()
}

/// As `enumerate_candidates`, keeping only rewrites accepted by `keep`
/// (used to restrict rewrites to localized lines).
pub fn enumerate_derivations(
    unit: &MethodUnit,
    budget: usize,
    keep: impl Fn(&Rewrite) -> bool,
) -> Vec<Derivation> {
    let key = |u: &MethodUnit| significant_texts(&u.source).into_iter().map(str::to_owned).collect::<Vec<_>>();
    let mut seen: HashSet<Vec<String>> = HashSet::from([key(unit)]);
    let mut out = Vec::new();
    let mut queue = VecDeque::from([Derivation {
        unit: unit.clone(),
        rules: Vec::new(),
    }]);
    while let Some(parent) = queue.pop_front() {
        for rw in applicable_rules(&parent.unit) {
            if out.len() >= budget {
                return out;
            }
            if !keep(&rw) && parent.rules.is_empty() {
                continue;
            }
            let Ok(child) = apply(&parent.unit, &rw) else { continue };
            if !is_smaller(&parent.unit, &child) || !seen.insert(key(&child)) {
                continue;
            }
            let mut rules = parent.rules.clone();
            rules.push(rw.rule);
            let d = Derivation { unit: child, rules };
            out.push(d.clone());
            queue.push_back(d);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub labels: Vec<RuleId>,
    /// Residual hunks no rule or heuristic explains.
    pub unclassified: usize,
}

/// Taxonomy codes explaining the change from `original` to `simplified`.
pub fn classify(original: &MethodUnit, simplified: &MethodUnit) -> Vec<RuleId> {
    classify_detailed(original, simplified).labels
}

fn token_distance(a: &str, b: &str) -> usize {
    let ta = significant_texts(a);
    let tb = significant_texts(b);
    similar::capture_diff_slices(similar::Algorithm::Myers, &ta, &tb)
        .iter()
        .map(|op| match *op {
            similar::DiffOp::Equal { .. } => 0,
            similar::DiffOp::Delete { old_len, .. } => old_len,
            similar::DiffOp::Insert { new_len, .. } => new_len,
            similar::DiffOp::Replace { old_len, new_len, .. } => old_len + new_len,
        })
        .sum()
}

fn normalized_text(text: &str) -> String {
    normalized_lines(text).into_iter().map(|l| l + "\n").collect()
}

/// Greedy replay: repeatedly applies the executable rewrite that brings the
/// current program closest (in significant-token edit distance) to the
/// target, recording every rule reaching that same program. What remains is
/// attributed per hunk by heuristics.
pub fn classify_detailed(original: &MethodUnit, simplified: &MethodUnit) -> Classification {
    let mut labels: BTreeSet<RuleId> = BTreeSet::new();
    let mut cur = original.clone();
    let mut dist = token_distance(&cur.source, &simplified.source);
    for _ in 0..32 {
        if dist == 0 {
            break;
        }
        let mut best: Option<(usize, MethodUnit)> = None;
        let mut results: Vec<(RuleId, MethodUnit)> = Vec::new();
        for rw in applicable_rules(&cur) {
            let Ok(next) = apply(&cur, &rw) else { continue };
            let d = token_distance(&next.source, &simplified.source);
            if d < dist && best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((d, next.clone()));
            }
            results.push((rw.rule, next));
        }
        let Some((d, next)) = best else { break };
        let best_key = significant_texts(&next.source);
        for (rule, u) in &results {
            if significant_texts(&u.source) == best_key {
                labels.insert(*rule);
            }
        }
        cur = next;
        dist = d;
    }
    let mut unclassified = 0;
    let before = normalized_text(&cur.source);
    let after = normalized_text(&simplified.source);
    if before != after {
        if !cur.decl.is_void() && simplified.decl.is_void() {
            labels.insert(RuleId::of("T1.10"));
        }
        for h in diff_texts(&before, &after) {
            let del: Vec<&str> = h.deleted.iter().map(|l| l.text.as_str()).collect();
            let add: Vec<&str> = h.added.iter().map(|l| l.text.as_str()).collect();
            let del_text = del.join(" ");
            let add_text = add.join(" ");
            let label = if add.is_empty() {
                Some("T3.1")
            } else if add_text.contains("->") && del_text.contains("new ") && del_text.contains('{') {
                Some("T6.1")
            } else if (add_text.contains(". stream (") || add_text.contains(". forEach (")) && (del_text.contains("for (") || del_text.contains("while (")) {
                Some("T1.7")
            } else if add.iter().any(|l| l.starts_with("@ ")) && !del.iter().any(|l| l.starts_with("@ ")) {
                Some("T7.5")
            } else if del_text.split(' ').collect::<Vec<_>>() == add_text.split(' ').collect::<Vec<_>>() {
                Some("T7.2")
            } else {
                None
            };
            match label {
                Some(code) => {
                    labels.insert(RuleId::of(code));
                }
                None => unclassified += 1,
            }
        }
    }
    Classification {
        labels: labels.into_iter().collect(),
        unclassified,
    }
}
