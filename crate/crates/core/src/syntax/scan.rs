//! Tolerant brace-level scanner that locates method declarations in a whole
//! Java file without requiring the rest of the file to be in the supported
//! subset. Each located method can then be parsed on its own.

use super::lexer::{significant_tokens, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodLocation {
    /// `Outer.Inner.method`
    pub qualified_name: String,
    /// Parameter list text with whitespace and comments removed, e.g. `(int,String[])`.
    pub params: String,
    pub start: usize,
    pub end: usize,
    /// 1-based, inclusive.
    pub start_line: usize,
    pub end_line: usize,
}

impl MethodLocation {
    pub fn contains_line(&self, line: usize) -> bool {
        self.start_line <= line && line <= self.end_line
    }
}

/// Finds every method (and constructor) with a body declared directly in a
/// type body. Methods of anonymous or local classes are not reported.
pub fn find_methods(src: &str) -> Vec<MethodLocation> {
    let toks = significant_tokens(src);
    let mut out = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        i = scan_member(src, &toks, i, &mut Vec::new(), &mut out);
    }
    out
}

fn is_type_keyword(t: &Token) -> bool {
    (t.kind == TokenKind::Keyword && matches!(t.text, "class" | "interface" | "enum"))
        || (t.kind == TokenKind::Identifier && t.text == "record")
}

/// Index just past the `}` matching the `{` at `open`.
fn skip_braces(toks: &[Token], open: usize) -> usize {
    let mut depth = 0usize;
    let mut i = open;
    while i < toks.len() {
        match (toks[i].kind, toks[i].text) {
            (TokenKind::Punctuation, "{") => depth += 1,
            (TokenKind::Punctuation, "}") => {
                depth = depth.saturating_sub(1);
                if depth == 0 {
                    return i + 1;
                }
            }
            _ => {}
        }
        i += 1;
    }
    toks.len()
}

/// Scans one member (or top-level declaration) starting at `i`; returns the
/// index after it.
fn scan_member(
    src: &str,
    toks: &[Token],
    start: usize,
    path: &mut Vec<String>,
    out: &mut Vec<MethodLocation>,
) -> usize {
    let mut i = start;
    let mut paren = 0usize;
    // Header: tokens up to the first `{` or `;` outside parentheses.
    while i < toks.len() {
        let t = &toks[i];
        if t.kind == TokenKind::Punctuation {
            match t.text {
                "(" => paren += 1,
                ")" => paren = paren.saturating_sub(1),
                "{" | ";" | "}" if paren == 0 => break,
                _ => {}
            }
        }
        i += 1;
    }
    if i >= toks.len() {
        return toks.len();
    }
    let header = &toks[start..i];
    match toks[i].text {
        ";" | "}" => return i + 1,
        _ => {}
    }
    // `{` opens either a type body, a method body, an initializer, or an
    // initializer expression such as an anonymous class or array.
    if let Some(k) = header.iter().position(|t| is_type_keyword(t) && !is_annotation_decl(header, t)) {
        let name = header
            .get(k + 1)
            .filter(|t| t.kind == TokenKind::Identifier)
            .map_or("?", |t| t.text)
            .to_string();
        let is_enum = header[k].text == "enum";
        path.push(name);
        let end = scan_type_body(src, toks, i, path, is_enum, out);
        path.pop();
        return end;
    }
    if header.iter().any(|t| t.kind == TokenKind::Punctuation && t.text == "@")
        && header
            .iter()
            .any(|t| t.kind == TokenKind::Keyword && t.text == "interface")
    {
        return skip_braces(toks, i);
    }
    let body_end = skip_braces(toks, i);
    if let Some((name_idx, params)) = method_header(header) {
        if !path.is_empty() {
            let start_tok = &header[0];
            let last = &toks[body_end - 1];
            let mut qn = path.join(".");
            qn.push('.');
            qn.push_str(header[name_idx].text);
            out.push(MethodLocation {
                qualified_name: qn,
                params,
                start: start_tok.offset,
                end: last.end(),
                start_line: start_tok.line,
                end_line: last.line,
            });
        }
    }
    // Field initializers such as `x = new T() {...};` continue to the `;`.
    if header.iter().any(|t| t.text == "=") {
        let mut j = body_end;
        let mut depth = 0usize;
        while j < toks.len() {
            match toks[j].text {
                "{" | "(" => depth += 1,
                "}" | ")" if depth > 0 => depth -= 1,
                ";" if depth == 0 => return j + 1,
                "}" => return j,
                _ => {}
            }
            j += 1;
        }
        return toks.len();
    }
    body_end
}

fn is_annotation_decl(header: &[Token], t: &Token) -> bool {
    let idx = header.iter().position(|h| std::ptr::eq(h, t)).unwrap_or(0);
    idx > 0 && header[idx - 1].text == "@"
}

/// Recognizes `... name ( params ) [throws ...]` with no `=` or `new` before
/// the name. Returns the index of the name token and normalized parameters.
fn method_header(header: &[Token]) -> Option<(usize, String)> {
    // Find the last top-level parenthesized group.
    let mut depth = 0usize;
    let mut groups = Vec::new();
    let mut open = 0;
    for (k, t) in header.iter().enumerate() {
        if t.kind != TokenKind::Punctuation {
            continue;
        }
        match t.text {
            "(" => {
                if depth == 0 {
                    open = k;
                }
                depth += 1;
            }
            ")" => {
                depth = depth.saturating_sub(1);
                if depth == 0 {
                    groups.push((open, k));
                }
            }
            _ => {}
        }
    }
    // The parameter group is the last one before any `throws`.
    let throws_at = header
        .iter()
        .position(|t| t.kind == TokenKind::Keyword && t.text == "throws")
        .unwrap_or(header.len());
    let &(open, close) = groups.iter().rev().find(|(_, c)| *c < throws_at)?;
    if close + 1 != throws_at && close + 1 != header.len() {
        return None;
    }
    if open == 0 {
        return None;
    }
    let name_idx = open - 1;
    let name = &header[name_idx];
    if name.kind != TokenKind::Identifier {
        return None;
    }
    if name_idx > 0 && matches!(header[name_idx - 1].text, "@" | "." | "new") {
        return None;
    }
    if header[..name_idx]
        .iter()
        .any(|t| matches!(t.text, "=" | "new" | "->"))
    {
        return None;
    }
    Some((name_idx, param_types(&header[open + 1..close])))
}

/// `(int a, final List<String> b, T... c)` becomes `(int,List<String>,T...)`.
fn param_types(toks: &[Token]) -> String {
    let mut segments: Vec<Vec<&str>> = vec![Vec::new()];
    let mut depth = 0usize;
    let mut k = 0;
    while k < toks.len() {
        let t = &toks[k];
        match t.text {
            "@" => {
                // Skip the annotation name and any argument list.
                k += 1;
                while k + 1 < toks.len() && toks[k + 1].text == "." {
                    k += 2;
                }
                if toks.get(k + 1).is_some_and(|t| t.text == "(") {
                    let mut d = 0usize;
                    k += 1;
                    while k < toks.len() {
                        match toks[k].text {
                            "(" => d += 1,
                            ")" => {
                                d -= 1;
                                if d == 0 {
                                    break;
                                }
                            }
                            _ => {}
                        }
                        k += 1;
                    }
                }
            }
            "final" => {}
            "<" => {
                depth += 1;
                segments.last_mut().unwrap().push(t.text);
            }
            ">" | ">>" | ">>>" => {
                depth = depth.saturating_sub(t.text.len());
                segments.last_mut().unwrap().push(t.text);
            }
            "," if depth == 0 => segments.push(Vec::new()),
            _ => segments.last_mut().unwrap().push(t.text),
        }
        k += 1;
    }
    let types: Vec<String> = segments
        .into_iter()
        .filter(|s| !s.is_empty())
        .map(|mut s| {
            s.pop();
            s.concat()
        })
        .collect();
    format!("({})", types.join(","))
}

fn scan_type_body(
    src: &str,
    toks: &[Token],
    open: usize,
    path: &mut Vec<String>,
    is_enum: bool,
    out: &mut Vec<MethodLocation>,
) -> usize {
    let mut i = open + 1;
    if is_enum {
        // Skip enum constants up to the first top-level `;` (or the end).
        let mut depth = 0usize;
        while i < toks.len() {
            match toks[i].text {
                "(" | "{" => depth += 1,
                ")" => depth = depth.saturating_sub(1),
                "}" if depth == 0 => return i + 1,
                "}" => depth -= 1,
                ";" if depth == 0 => {
                    i += 1;
                    break;
                }
                _ => {}
            }
            i += 1;
        }
    }
    while i < toks.len() {
        let t = &toks[i];
        if t.kind == TokenKind::Punctuation && t.text == "}" {
            return i + 1;
        }
        if t.kind == TokenKind::Punctuation && t.text == ";" {
            i += 1;
            continue;
        }
        i = scan_member(src, toks, i, path, out);
    }
    toks.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FILE: &str = r#"package demo;

import java.util.*;

/** Docs. */
public class Outer {
    private int x = 1;
    private Runnable r = new Runnable() {
        public void run() { hidden(); }
    };
    static { init(); }

    @Deprecated
    public Outer(int x) { this.x = x; }

    // comment
    int get() throws Exception {
        return x;
    }

    abstract void none();

    enum Color { RED(1) { void paint() {} }, GREEN(2); Color(int v) {} int code() { return 0; } }

    static class Inner {
        <T> List<T> wrap(T t, int... more) { return Collections.singletonList(t); }
    }
}

interface Api { default String name() { return "api"; } }
"#;

    #[test]
    fn locates_members() {
        let found = find_methods(FILE);
        let names: Vec<_> = found.iter().map(|m| m.qualified_name.as_str()).collect();
        assert_eq!(
            names,
            [
                "Outer.Outer",
                "Outer.get",
                "Outer.Color.Color",
                "Outer.Color.code",
                "Outer.Inner.wrap",
                "Api.name"
            ]
        );
        let get = &found[1];
        assert_eq!(&FILE[get.start..get.end], "int get() throws Exception {\n        return x;\n    }");
        assert_eq!(get.params, "()");
        assert_eq!(found[4].params, "(T,int...)");
        assert!(found[0].contains_line(found[0].start_line));
        assert!(FILE[found[0].start..].starts_with("@Deprecated"));
    }
}
