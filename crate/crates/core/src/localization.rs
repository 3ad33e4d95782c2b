//! Line diffs between method versions, hunk qualification and the
//! simplified-line marker encoding.

use serde::{Deserialize, Serialize};
use similar::{Algorithm, DiffOp};
use thiserror::Error;

use crate::syntax::{lexer::significant_lines, MethodUnit};

pub const ORIGINAL_OPEN: &str = "<original>";
pub const ORIGINAL_CLOSE: &str = "</original>";
pub const SIMPLIFIED_OPEN: &str = "<simplified>";
pub const SIMPLIFIED_CLOSE: &str = "</simplified>";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffLine {
    /// 1-based line number in its own text.
    pub line: usize,
    pub text: String,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffHunk {
    /// 1-based line in the old text where the hunk starts (for pure
    /// insertions: the line the insertion precedes).
    pub old_start: usize,
    pub new_start: usize,
    pub deleted: Vec<DiffLine>,
    pub added: Vec<DiffLine>,
    pub significant_deleted: usize,
    pub significant_added: usize,
}

impl DiffHunk {
    pub fn deleted_lines(&self) -> impl Iterator<Item = usize> + '_ {
        self.deleted.iter().map(|l| l.line)
    }
}

/// Compact per-hunk counts stored with dataset records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HunkSummary {
    pub old_start: usize,
    pub deleted: usize,
    pub added: usize,
    pub significant_deleted: usize,
    pub significant_added: usize,
}

impl From<&DiffHunk> for HunkSummary {
    fn from(h: &DiffHunk) -> Self {
        HunkSummary {
            old_start: h.old_start,
            deleted: h.deleted.len(),
            added: h.added.len(),
            significant_deleted: h.significant_deleted,
            significant_added: h.significant_added,
        }
    }
}

/// Myers diff over lines compared with surrounding whitespace trimmed, so a
/// pure re-indentation is not a change. Adjacent delete/insert operations
/// form one hunk.
pub fn diff_texts(old: &str, new: &str) -> Vec<DiffHunk> {
    let old_lines: Vec<&str> = old.lines().collect();
    let new_lines: Vec<&str> = new.lines().collect();
    let old_key: Vec<&str> = old_lines.iter().map(|l| l.trim()).collect();
    let new_key: Vec<&str> = new_lines.iter().map(|l| l.trim()).collect();
    let old_sig = significant_lines(old);
    let new_sig = significant_lines(new);
    let ops = similar::capture_diff_slices(Algorithm::Myers, &old_key, &new_key);

    let mut hunks = Vec::new();
    let mut cur: Option<DiffHunk> = None;
    let line = |lines: &[&str], sig: &[bool], i: usize| DiffLine {
        line: i + 1,
        text: lines[i].to_string(),
        significant: sig.get(i).copied().unwrap_or(false),
    };
    for op in ops {
        let (old_idx, old_len, new_idx, new_len) = match op {
            DiffOp::Equal { .. } => {
                hunks.extend(cur.take());
                continue;
            }
            DiffOp::Delete {
                old_index,
                old_len,
                new_index,
            } => (old_index, old_len, new_index, 0),
            DiffOp::Insert {
                old_index,
                new_index,
                new_len,
            } => (old_index, 0, new_index, new_len),
            DiffOp::Replace {
                old_index,
                old_len,
                new_index,
                new_len,
            } => (old_index, old_len, new_index, new_len),
        };
        let h = cur.get_or_insert_with(|| DiffHunk {
            old_start: old_idx + 1,
            new_start: new_idx + 1,
            deleted: Vec::new(),
            added: Vec::new(),
            significant_deleted: 0,
            significant_added: 0,
        });
        for i in old_idx..old_idx + old_len {
            h.deleted.push(line(&old_lines, &old_sig, i));
        }
        for i in new_idx..new_idx + new_len {
            h.added.push(line(&new_lines, &new_sig, i));
        }
    }
    hunks.extend(cur);
    for h in &mut hunks {
        h.significant_deleted = h.deleted.iter().filter(|l| l.significant).count();
        h.significant_added = h.added.iter().filter(|l| l.significant).count();
    }
    hunks
}

pub fn diff(original: &MethodUnit, simplified: &MethodUnit) -> Vec<DiffHunk> {
    diff_texts(&original.source, &simplified.source)
}

/// A hunk is a simplification when it removes more significant lines than
/// it adds.
pub fn qualifies_as_simplification(hunk: &DiffHunk) -> bool {
    hunk.significant_deleted > hunk.significant_added
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalizedPair {
    pub localized_original: String,
    pub simplified: String,
    pub hunks: Vec<DiffHunk>,
}

impl LocalizedPair {
    /// Perfect localization: replays the ground-truth hunks as markers.
    pub fn perfect(original: &MethodUnit, simplified: &MethodUnit) -> Self {
        let hunks = diff(original, simplified);
        LocalizedPair {
            localized_original: encode_localized(&original.source, &hunks, true),
            simplified: simplified.source.clone(),
            hunks,
        }
    }
}

fn wrap(line: &str, open: &str, close: &str) -> String {
    let body = line.trim_start();
    let indent = &line[..line.len() - body.len()];
    format!("{indent}{open}{}{close}", body.trim_end())
}

/// Wraps each changed line of `original` in `<original>` markers. With
/// `with_simplified`, the replacement lines follow each hunk wrapped in
/// `<simplified>` markers (training form); without, only the original
/// markers are emitted (inference form).
pub fn encode_localized(original: &str, hunks: &[DiffHunk], with_simplified: bool) -> String {
    let lines: Vec<&str> = original.lines().collect();
    let mut out: Vec<String> = Vec::with_capacity(lines.len());
    let mut by_start: Vec<&DiffHunk> = hunks.iter().collect();
    by_start.sort_by_key(|h| h.old_start);
    let mut next = by_start.into_iter().peekable();
    let mut i = 0;
    loop {
        // Hunks anchored at this line (pure insertions included).
        while let Some(h) = next.next_if(|h| h.old_start == i + 1) {
            for d in &h.deleted {
                out.push(wrap(lines[d.line - 1], ORIGINAL_OPEN, ORIGINAL_CLOSE));
            }
            if with_simplified {
                for a in &h.added {
                    out.push(wrap(&a.text, SIMPLIFIED_OPEN, SIMPLIFIED_CLOSE));
                }
            }
            i += h.deleted.len();
        }
        if i >= lines.len() {
            break;
        }
        out.push(lines[i].to_string());
        i += 1;
    }
    // Insertions past the end of the original.
    for h in next {
        if with_simplified {
            for a in &h.added {
                out.push(wrap(&a.text, SIMPLIFIED_OPEN, SIMPLIFIED_CLOSE));
            }
        }
    }
    let mut s = out.join("\n");
    if original.ends_with('\n') {
        s.push('\n');
    }
    s
}

/// Inference-time localization without ground truth: marks every line
/// overlapped by an applicable catalog rewrite.
pub fn encode_heuristic(unit: &MethodUnit) -> String {
    let starts: Vec<usize> = std::iter::once(0)
        .chain(unit.source.match_indices('\n').map(|(i, _)| i + 1))
        .collect();
    let line_of = |off: usize| starts.partition_point(|&s| s <= off);
    let mut marked = std::collections::BTreeSet::new();
    for rw in crate::catalog::applicable_rules(unit) {
        let first = line_of(rw.node_span.start);
        let last = line_of(rw.node_span.end.saturating_sub(1).max(rw.node_span.start));
        marked.extend(first..=last);
    }
    let sig = significant_lines(&unit.source);
    let hunks: Vec<DiffHunk> = marked
        .into_iter()
        .filter(|&l| sig.get(l - 1).copied().unwrap_or(false))
        .map(|l| DiffHunk {
            old_start: l,
            new_start: l,
            deleted: vec![DiffLine {
                line: l,
                text: unit.source.lines().nth(l - 1).unwrap_or("").to_string(),
                significant: true,
            }],
            added: Vec::new(),
            significant_deleted: 1,
            significant_added: 0,
        })
        .collect();
    encode_localized(&unit.source, &hunks, false)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarkerError {
    #[error("malformed markers at byte {offset}: {message}")]
    Malformed { offset: usize, message: String },
}

/// Reconstructs the original text from a localized one: `<original>` tags
/// are dropped, `<simplified>` segments are dropped with their content, and
/// a line left blank by such a removal is dropped entirely.
pub fn strip_markers(text: &str) -> Result<String, MarkerError> {
    #[derive(PartialEq)]
    enum State {
        Plain,
        Original,
        Simplified,
    }
    let err = |offset: usize, message: &str| MarkerError::Malformed {
        offset,
        message: message.to_string(),
    };
    let mut state = State::Plain;
    let mut out = String::with_capacity(text.len());
    let mut line_start_out = 0;
    let mut line_had_simplified = false;
    let mut pos = 0;
    while pos < text.len() {
        let rest = &text[pos..];
        let (tag, new_state) = if rest.starts_with(ORIGINAL_OPEN) {
            (ORIGINAL_OPEN, Some((State::Plain, State::Original)))
        } else if rest.starts_with(ORIGINAL_CLOSE) {
            (ORIGINAL_CLOSE, Some((State::Original, State::Plain)))
        } else if rest.starts_with(SIMPLIFIED_OPEN) {
            (SIMPLIFIED_OPEN, Some((State::Plain, State::Simplified)))
        } else if rest.starts_with(SIMPLIFIED_CLOSE) {
            (SIMPLIFIED_CLOSE, Some((State::Simplified, State::Plain)))
        } else {
            ("", None)
        };
        if let Some((from, to)) = new_state {
            if state != from {
                return Err(err(pos, &format!("unexpected {tag}")));
            }
            if to == State::Simplified {
                line_had_simplified = true;
            }
            state = to;
            pos += tag.len();
            continue;
        }
        let ch = rest.chars().next().expect("non-empty");
        if ch == '\n' {
            if state != State::Plain {
                return Err(err(pos, "marker not closed on its line"));
            }
            if line_had_simplified && out[line_start_out..].trim().is_empty() {
                out.truncate(line_start_out);
            } else {
                out.push('\n');
                line_start_out = out.len();
            }
            line_had_simplified = false;
        } else if state != State::Simplified {
            out.push(ch);
        }
        pos += ch.len_utf8();
    }
    if state != State::Plain {
        return Err(err(text.len(), "marker not closed at end of text"));
    }
    if line_had_simplified && out[line_start_out..].trim().is_empty() {
        out.truncate(line_start_out);
    }
    Ok(out)
}
