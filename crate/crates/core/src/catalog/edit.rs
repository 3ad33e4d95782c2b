//! Byte-range text edits used to build rewrite replacements.

use crate::syntax::ast::Span;

/// Byte offset of the start of the line containing `off`.
pub fn line_start(src: &str, off: usize) -> usize {
    src[..off].rfind('\n').map_or(0, |i| i + 1)
}

/// Column (in bytes) of `off` within its line.
pub fn column(src: &str, off: usize) -> usize {
    off - line_start(src, off)
}

/// Range to delete when removing the node at `span`: whole lines when the
/// node is alone on them (a trailing `//` comment goes with it), otherwise
/// the node plus the spaces after it.
pub fn removal_range(src: &str, span: Span) -> Span {
    let ls = line_start(src, span.start);
    let before_blank = src[ls..span.start].chars().all(|c| c == ' ' || c == '\t');
    let line_end = src[span.end..].find('\n').map_or(src.len(), |i| span.end + i);
    let after = src[span.end..line_end].trim();
    let after_blank = after.is_empty() || (after.starts_with("//") && !after.contains("*/"));
    if before_blank && after_blank {
        let end = if line_end < src.len() { line_end + 1 } else { line_end };
        if end == src.len() && line_end == src.len() && ls > 0 {
            // Last line without a newline: take the preceding newline instead.
            return Span::new(ls - 1, end);
        }
        return Span::new(ls, end);
    }
    let trailing = src[span.end..line_end].len() - src[span.end..line_end].trim_start_matches([' ', '\t']).len();
    Span::new(span.start, span.end + trailing)
}

/// Text of `range` with `edits` applied. Edits must be disjoint and lie
/// within `range`.
pub fn compose(src: &str, range: Span, edits: &[(Span, String)]) -> String {
    let mut sorted: Vec<&(Span, String)> = edits.iter().collect();
    sorted.sort_by_key(|(s, _)| s.start);
    let mut out = String::new();
    let mut pos = range.start;
    for (span, text) in sorted {
        debug_assert!(range.contains(span) && span.start >= pos, "overlapping edit");
        out.push_str(&src[pos..span.start]);
        out.push_str(text);
        pos = span.end;
    }
    out.push_str(&src[pos..range.end]);
    out
}

/// Shifts every line after the first left by `remove` columns of leading
/// whitespace (never past non-whitespace). Text containing a text block is
/// returned unchanged since its whitespace is significant.
pub fn dedent_tail(text: &str, remove: usize) -> String {
    if remove == 0 || text.contains("\"\"\"") {
        return text.to_string();
    }
    let mut out = String::with_capacity(text.len());
    for (i, line) in text.split('\n').enumerate() {
        if i > 0 {
            out.push('\n');
            let ws = line.len() - line.trim_start_matches([' ', '\t']).len();
            out.push_str(&line[ws.min(remove)..]);
        } else {
            out.push_str(line);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn removal_of_own_line_and_inline_statement() {
        let src = "{\n    a();\n    b(); c();\n}";
        let a = src.find("a();").unwrap();
        assert_eq!(removal_range(src, Span::new(a, a + 4)), Span::new(2, 11));
        let b = src.find("b();").unwrap();
        let r = removal_range(src, Span::new(b, b + 4));
        assert_eq!(&src[r.start..r.end], "b(); ");
        let c = src.find("c();").unwrap();
        assert_eq!(removal_range(src, Span::new(c, c + 4)), Span::new(c, c + 4));
    }

    #[test]
    fn removal_takes_trailing_line_comment() {
        let src = "x;\n  int a = 1; // unused\ny;";
        let s = src.find("int").unwrap();
        let r = removal_range(src, Span::new(s, s + 10));
        assert_eq!(format!("{}{}", &src[..r.start], &src[r.end..]), "x;\ny;");
    }

    #[test]
    fn compose_and_dedent() {
        let src = "0123456789";
        let out = compose(src, Span::new(2, 8), &[(Span::new(5, 6), "X".into()), (Span::new(2, 3), String::new())]);
        assert_eq!(out, "34X67");
        assert_eq!(dedent_tail("{\n        a;\n    }", 4), "{\n    a;\n}");
        assert_eq!(dedent_tail("{\n  a;\n}", 4), "{\na;\n}");
        assert_eq!(column("ab\n   x", 6), 3);
    }
}
