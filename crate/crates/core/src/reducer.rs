//! Deletion-only reduction: ddmin over deletable regions of a method, and
//! the ideal-delta-debugging baseline.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::edit::removal_range;
use crate::syntax::ast::{MethodDecl, Span, Stmt, StmtKind};
use crate::syntax::lexer::significant_lines;
use crate::syntax::{normalized_lines, parse_method, significant_texts, MethodUnit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeletionKind {
    Statement,
    Import,
    Line,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    #[default]
    Statement,
    Line,
}

/// A region that may be deleted as a whole.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeletionUnit {
    pub kind: DeletionKind,
    pub span: Span,
    pub index: usize,
}

/// Deletable regions of `unit` in source order. Statement granularity yields
/// imports plus the top-level body statements; line granularity yields every
/// code line strictly between the body's opening and closing brace lines.
pub fn deletion_units(unit: &MethodUnit, granularity: Granularity) -> Vec<DeletionUnit> {
    let mut spans: Vec<(DeletionKind, Span)> = unit.imports.iter().map(|i| (DeletionKind::Import, i.span)).collect();
    match granularity {
        Granularity::Statement => {
            spans.extend(unit.body_stmts().iter().map(|s| (DeletionKind::Statement, s.span)));
        }
        Granularity::Line => {
            if let Some(body) = &unit.decl.body {
                let src = &unit.source;
                let first = line_of(src, body.span.start) + 1;
                let last = line_of(src, body.span.end.saturating_sub(1));
                let sig = significant_lines(src);
                let mut offset = 0;
                for (i, line) in src.split_inclusive('\n').enumerate() {
                    if i >= first && i < last && sig.get(i).copied().unwrap_or(false) {
                        spans.push((DeletionKind::Line, Span::new(offset, offset + line.len())));
                    }
                    offset += line.len();
                }
            }
        }
    }
    spans
        .into_iter()
        .enumerate()
        .map(|(index, (kind, span))| DeletionUnit { kind, span, index })
        .collect()
}

fn line_of(src: &str, off: usize) -> usize {
    src[..off].bytes().filter(|&b| b == b'\n').count()
}

/// Text of `unit` keeping only the units whose indices are in `keep`
/// (sorted ascending).
pub fn induced_text(unit: &MethodUnit, units: &[DeletionUnit], keep: &[usize]) -> String {
    let src = &unit.source;
    let mut ranges: Vec<Span> = units
        .iter()
        .filter(|u| keep.binary_search(&u.index).is_err())
        .map(|u| match u.kind {
            DeletionKind::Line => u.span,
            _ => removal_range(src, u.span),
        })
        .collect();
    ranges.sort_by_key(|r| r.start);
    let mut out = String::with_capacity(src.len());
    let mut pos = 0;
    for r in ranges {
        let start = r.start.max(pos);
        out.push_str(&src[pos..start]);
        pos = pos.max(r.end);
    }
    out.push_str(&src[pos..]);
    if !src.starts_with('\n') && out.starts_with('\n') {
        // The blank separator left behind by deleted imports.
        out = out.trim_start_matches('\n').to_string();
    }
    out
}

/// A method with a non-void return type whose body can fall off its end is
/// rejected before the oracle is consulted.
pub fn well_formed(unit: &MethodUnit) -> bool {
    decl_well_formed(&unit.decl)
}

/// False when a non-void method body can complete without returning.
pub fn decl_well_formed(decl: &MethodDecl) -> bool {
    match &decl.body {
        Some(b) if !decl.is_void() => !list_completes(&b.stmts),
        _ => true,
    }
}

fn list_completes(stmts: &[Stmt]) -> bool {
    stmts.iter().all(completes)
}

fn completes(s: &Stmt) -> bool {
    match &s.kind {
        StmtKind::Return(_) | StmtKind::Throw(_) => false,
        StmtKind::Block(b) => list_completes(&b.stmts),
        StmtKind::If {
            then_branch,
            else_branch: Some(e),
            ..
        } => completes(then_branch) || completes(e),
        StmtKind::While { cond, body } => !(cond.is_bool_literal(true) && !has_break(body)),
        StmtKind::Do { body, .. } => completes(body) || has_break(body),
        StmtKind::For { cond: None, body, .. } => has_break(body),
        StmtKind::Try { body, catches, finally, .. } => {
            let inner = list_completes(&body.stmts) || catches.iter().any(|c| list_completes(&c.body.stmts));
            inner && finally.as_ref().is_none_or(|f| list_completes(&f.stmts))
        }
        StmtKind::Synchronized { body, .. } => list_completes(&body.stmts),
        StmtKind::Labeled { body, .. } => completes(body) || has_break(body),
        _ => true,
    }
}

fn has_break(s: &Stmt) -> bool {
    crate::syntax::visit::stmts_in(std::slice::from_ref(s))
        .iter()
        .any(|t| matches!(t.kind, StmtKind::Break(_)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    /// Indices of the units kept in the attempted program.
    pub kept: Vec<usize>,
    pub verdict: bool,
    /// The verdict came from the memo or the local well-formedness check,
    /// not a fresh oracle call.
    pub cached: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub steps: Vec<TraceStep>,
    pub final_units: Vec<usize>,
    pub oracle_calls: usize,
}

#[derive(Debug, Error)]
pub enum ReduceError<E: std::error::Error + 'static> {
    #[error("the unreduced method does not satisfy the oracle")]
    InitialFails,
    #[error("oracle failed after {} steps: {source}", trace.steps.len())]
    Oracle {
        #[source]
        source: E,
        trace: ReductionTrace,
    },
}

/// Classic ddmin worst case for `n` units.
pub fn worst_case_calls(n: usize) -> usize {
    n * n + 3 * n
}

struct Run<'a, F> {
    unit: &'a MethodUnit,
    units: &'a [DeletionUnit],
    oracle: F,
    memo: HashMap<Vec<String>, bool>,
    trace: ReductionTrace,
}

impl<F, E> Run<'_, F>
where
    F: FnMut(&MethodUnit) -> Result<bool, E>,
{
    fn test(&mut self, kept: &[usize]) -> Result<bool, E> {
        let text = induced_text(self.unit, self.units, kept);
        let parsed = parse_method(&text)
            .ok()
            .filter(well_formed)
            .map(|u| u.located(self.unit.qualified_name.clone(), self.unit.file_span.0));
        let (verdict, cached) = match parsed {
            None => (false, true),
            Some(candidate) => {
                let key: Vec<String> = significant_texts(&candidate.source).into_iter().map(str::to_owned).collect();
                match self.memo.get(&key) {
                    Some(&v) => (v, true),
                    None => {
                        self.trace.oracle_calls += 1;
                        let v = (self.oracle)(&candidate)?;
                        self.memo.insert(key, v);
                        (v, false)
                    }
                }
            }
        };
        self.trace.steps.push(TraceStep {
            kept: kept.to_vec(),
            verdict,
            cached,
        });
        Ok(verdict)
    }
}

/// Splits `c` into `n` contiguous chunks of near-equal size.
fn partition(c: &[usize], n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(n);
    let mut start = 0;
    for i in 0..n {
        let end = start + (c.len() - start) / (n - i);
        out.push(c[start..end].to_vec());
        start = end;
    }
    out
}

/// ddmin over the statement-level deletion units of `unit`.
pub fn ddmin_reduce<F, E>(unit: &MethodUnit, oracle: F) -> Result<(MethodUnit, ReductionTrace), ReduceError<E>>
where
    F: FnMut(&MethodUnit) -> Result<bool, E>,
    E: std::error::Error + 'static,
{
    ddmin_reduce_with(unit, Granularity::Statement, oracle)
}

pub fn ddmin_reduce_with<F, E>(
    unit: &MethodUnit,
    granularity: Granularity,
    oracle: F,
) -> Result<(MethodUnit, ReductionTrace), ReduceError<E>>
where
    F: FnMut(&MethodUnit) -> Result<bool, E>,
    E: std::error::Error + 'static,
{
    let units = deletion_units(unit, granularity);
    let mut run = Run {
        unit,
        units: &units,
        oracle,
        memo: HashMap::new(),
        trace: ReductionTrace {
            steps: Vec::new(),
            final_units: Vec::new(),
            oracle_calls: 0,
        },
    };
    let all: Vec<usize> = (0..units.len()).collect();
    macro_rules! check {
        ($kept:expr) => {
            match run.test($kept) {
                Ok(v) => v,
                Err(source) => {
                    return Err(ReduceError::Oracle {
                        source,
                        trace: run.trace,
                    })
                }
            }
        };
    }
    if !check!(&all) {
        return Err(ReduceError::InitialFails);
    }
    let mut c = all;
    if !c.is_empty() && check!(&[]) {
        c.clear();
    }
    let mut n = 2;
    while c.len() >= 2 {
        let chunks = partition(&c, n);
        let mut reduced = false;
        for chunk in &chunks {
            if check!(chunk) {
                c = chunk.clone();
                n = 2;
                reduced = true;
                break;
            }
        }
        if !reduced && n > 2 {
            for chunk in &chunks {
                let complement: Vec<usize> = c.iter().copied().filter(|i| !chunk.contains(i)).collect();
                if check!(&complement) {
                    c = complement;
                    n = (n - 1).max(2);
                    reduced = true;
                    break;
                }
            }
        }
        if !reduced {
            if n >= c.len() {
                break;
            }
            n = (2 * n).min(c.len());
        }
    }
    // ddmin never tries dropping the last unit of a singleton configuration.
    if c.len() == 1 && check!(&[]) {
        c.clear();
    }
    let text = induced_text(unit, &units, &c);
    let reduced = parse_method(&text)
        .expect("accepted configuration parses")
        .located(unit.qualified_name.clone(), unit.file_span.0);
    run.trace.final_units = c;
    Ok((reduced, run.trace))
}

/// Ideal delta debugging: reproduces `ground_truth` when its code lines are a
/// subsequence of the original's, i.e. it is reachable by deletions alone.
pub fn idd(original: &MethodUnit, ground_truth: &MethodUnit) -> Option<MethodUnit> {
    let orig = normalized_lines(&original.source);
    let truth = normalized_lines(&ground_truth.source);
    let mut it = orig.iter();
    truth
        .iter()
        .all(|line| it.any(|o| o == line))
        .then(|| ground_truth.clone())
}
