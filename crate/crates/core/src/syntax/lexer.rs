//! Lossless lexer for the supported Java subset.
//!
//! Every byte of the input ends up in exactly one token, so concatenating the
//! token texts reproduces the input. Comments and whitespace are kept as
//! tokens but flagged non-significant.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Identifier,
    Keyword,
    Literal,
    Operator,
    Punctuation,
    Comment,
    Whitespace,
}

impl TokenKind {
    pub fn is_significant(self) -> bool {
        !matches!(self, TokenKind::Comment | TokenKind::Whitespace)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub kind: TokenKind,
    pub text: &'a str,
    /// 1-based line of the first byte.
    pub line: usize,
    /// Byte offset of the first byte.
    pub offset: usize,
}

impl<'a> Token<'a> {
    pub fn is_significant(&self) -> bool {
        self.kind.is_significant()
    }

    pub fn end(&self) -> usize {
        self.offset + self.text.len()
    }
}

/// Java reserved words. `true`, `false` and `null` are lexed as literals.
pub const JAVA_KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "try",
    "void",
    "volatile",
    "while",
];

pub fn is_keyword(word: &str) -> bool {
    JAVA_KEYWORDS.binary_search(&word).is_ok()
}

// Longest first so that maximal munch works with a linear scan.
const OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "==", ">=", "<=", "!=", "&&", "||", "++", "--",
    "<<", ">>", "+=", "-=", "*=", "/=", "&=", "|=", "^=", "%=", "=", ">", "<", "!", "~", "?", ":",
    "+", "-", "*", "/", "&", "|", "^", "%",
];

const PUNCTUATION: &[&str] = &["...", "::", "(", ")", "{", "}", "[", "]", ";", ",", ".", "@"];

/// Splits `text` into a lossless token stream. Never fails: bytes that start
/// no known token become single-character operator tokens.
pub fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut lexer = Lexer {
        src: text,
        pos: 0,
        line: 1,
        out: Vec::new(),
    };
    lexer.run();
    lexer.out
}

/// Significant tokens only.
pub fn significant_tokens(text: &str) -> Vec<Token<'_>> {
    tokenize(text)
        .into_iter()
        .filter(Token::is_significant)
        .collect()
}

/// Number of significant (non-comment, non-whitespace) tokens.
pub fn token_count(text: &str) -> usize {
    tokenize(text).iter().filter(|t| t.is_significant()).count()
}

/// The texts of the significant tokens, in order.
pub fn significant_texts(text: &str) -> Vec<&str> {
    tokenize(text)
        .into_iter()
        .filter(Token::is_significant)
        .map(|t| t.text)
        .collect()
}

/// True when both texts have the same significant token sequence.
pub fn token_equal(a: &str, b: &str) -> bool {
    significant_texts(a) == significant_texts(b)
}

/// Per-line significance: entry `i` is true when line `i + 1` holds at least
/// one byte of a significant token. A trailing newline does not open a new line.
pub fn significant_lines(text: &str) -> Vec<bool> {
    let line_count = line_count(text);
    let mut lines = vec![false; line_count];
    for tok in tokenize(text) {
        if !tok.is_significant() {
            continue;
        }
        let newlines = tok.text.bytes().filter(|&b| b == b'\n').count();
        for l in tok.line..=tok.line + newlines {
            if let Some(slot) = lines.get_mut(l - 1) {
                *slot = true;
            }
        }
    }
    lines
}

/// Significant tokens of each code line joined by single spaces, one entry
/// per line that has any.
pub fn normalized_lines(text: &str) -> Vec<String> {
    let mut lines: Vec<Vec<&str>> = Vec::new();
    for t in tokenize(text) {
        if !t.is_significant() {
            continue;
        }
        if lines.len() < t.line {
            lines.resize_with(t.line, Vec::new);
        }
        lines[t.line - 1].push(t.text);
    }
    lines.into_iter().filter(|l| !l.is_empty()).map(|l| l.join(" ")).collect()
}

/// Source lines of code: lines with at least one significant token.
pub fn sloc(text: &str) -> usize {
    significant_lines(text).into_iter().filter(|&b| b).count()
}

fn line_count(text: &str) -> usize {
    if text.is_empty() {
        return 0;
    }
    let n = text.bytes().filter(|&b| b == b'\n').count();
    if text.ends_with('\n') { n } else { n + 1 }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    out: Vec<Token<'a>>,
}

impl<'a> Lexer<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn push(&mut self, kind: TokenKind, len: usize) {
        let text = &self.src[self.pos..self.pos + len];
        self.out.push(Token {
            kind,
            text,
            line: self.line,
            offset: self.pos,
        });
        self.line += text.bytes().filter(|&b| b == b'\n').count();
        self.pos += len;
    }

    fn run(&mut self) {
        while self.pos < self.src.len() {
            let rest = self.rest();
            let c = rest.chars().next().expect("non-empty");
            if c.is_whitespace() {
                let len = rest
                    .char_indices()
                    .find(|(_, ch)| !ch.is_whitespace())
                    .map_or(rest.len(), |(i, _)| i);
                self.push(TokenKind::Whitespace, len);
            } else if rest.starts_with("//") {
                let len = rest.find('\n').unwrap_or(rest.len());
                self.push(TokenKind::Comment, len);
            } else if let Some(tail) = rest.strip_prefix("/*") {
                let len = tail.find("*/").map_or(rest.len(), |i| i + 4);
                self.push(TokenKind::Comment, len);
            } else if rest.starts_with("\"\"\"") {
                let len = text_block_len(rest);
                self.push(TokenKind::Literal, len);
            } else if c == '"' || c == '\'' {
                let len = quoted_len(rest, c);
                self.push(TokenKind::Literal, len);
            } else if c.is_ascii_digit()
                || (c == '.' && rest[1..].starts_with(|d: char| d.is_ascii_digit()))
            {
                let len = number_len(rest);
                self.push(TokenKind::Literal, len);
            } else if is_ident_start(c) {
                let len = rest
                    .char_indices()
                    .find(|(_, ch)| !is_ident_part(*ch))
                    .map_or(rest.len(), |(i, _)| i);
                let word = &rest[..len];
                let kind = if matches!(word, "true" | "false" | "null") {
                    TokenKind::Literal
                } else if is_keyword(word) {
                    TokenKind::Keyword
                } else {
                    TokenKind::Identifier
                };
                self.push(kind, len);
            } else if let Some(p) = PUNCTUATION.iter().find(|p| rest.starts_with(**p)) {
                self.push(TokenKind::Punctuation, p.len());
            } else if let Some(op) = OPERATORS.iter().find(|op| rest.starts_with(**op)) {
                self.push(TokenKind::Operator, op.len());
            } else {
                self.push(TokenKind::Operator, c.len_utf8());
            }
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$'
}

fn is_ident_part(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

fn quoted_len(rest: &str, quote: char) -> usize {
    let mut escaped = false;
    for (i, ch) in rest.char_indices().skip(1) {
        if ch == '\n' {
            // Unterminated: stop before the newline.
            return i;
        }
        if escaped {
            escaped = false;
        } else if ch == '\\' {
            escaped = true;
        } else if ch == quote {
            return i + ch.len_utf8();
        }
    }
    rest.len()
}

fn text_block_len(rest: &str) -> usize {
    let body = &rest[3..];
    let mut escaped = false;
    let bytes = body.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if escaped {
            escaped = false;
        } else if bytes[i] == b'\\' {
            escaped = true;
        } else if body[i..].starts_with("\"\"\"") {
            return 3 + i + 3;
        }
        i += 1;
    }
    rest.len()
}

fn number_len(rest: &str) -> usize {
    let bytes = rest.as_bytes();
    let mut i = 0;
    if rest.starts_with("0x") || rest.starts_with("0X") || rest.starts_with("0b") || rest.starts_with("0B")
    {
        i = 2;
        while i < bytes.len() && (bytes[i].is_ascii_hexdigit() || bytes[i] == b'_') {
            i += 1;
        }
        if i < bytes.len() && matches!(bytes[i], b'l' | b'L') {
            i += 1;
        }
        return i;
    }
    let digits = |i: &mut usize| {
        while *i < bytes.len() && (bytes[*i].is_ascii_digit() || bytes[*i] == b'_') {
            *i += 1;
        }
    };
    digits(&mut i);
    if i < bytes.len() && bytes[i] == b'.' && bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit()) {
        i += 1;
        digits(&mut i);
    } else if i < bytes.len()
        && bytes[i] == b'.'
        && !bytes.get(i + 1).is_some_and(|b| b.is_ascii_alphabetic() || *b == b'.')
    {
        // `1.` is a valid double literal.
        i += 1;
    }
    if i < bytes.len() && matches!(bytes[i], b'e' | b'E') {
        let mut j = i + 1;
        if j < bytes.len() && matches!(bytes[j], b'+' | b'-') {
            j += 1;
        }
        if j < bytes.len() && bytes[j].is_ascii_digit() {
            i = j;
            digits(&mut i);
        }
    }
    if i < bytes.len() && matches!(bytes[i], b'l' | b'L' | b'f' | b'F' | b'd' | b'D') {
        i += 1;
    }
    i
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<(TokenKind, &str)> {
        significant_tokens(text)
            .into_iter()
            .map(|t| (t.kind, t.text))
            .collect()
    }

    #[test]
    fn keyword_list_is_sorted() {
        let mut sorted = JAVA_KEYWORDS.to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, JAVA_KEYWORDS);
    }

    #[test]
    fn return_statement() {
        let toks = tokenize("return x;");
        assert_eq!(toks.len(), 4);
        assert_eq!(
            kinds("return x;"),
            vec![
                (TokenKind::Keyword, "return"),
                (TokenKind::Identifier, "x"),
                (TokenKind::Punctuation, ";"),
            ]
        );
        assert_eq!(toks[1].kind, TokenKind::Whitespace);
    }

    #[test]
    fn leading_line_comment_is_not_significant() {
        let toks = tokenize("// c\nint a;");
        assert_eq!(toks[0].kind, TokenKind::Comment);
        assert!(!toks[0].is_significant());
        assert_eq!(token_count("// c\nint a;"), 3);
        assert_eq!(toks.iter().find(|t| t.text == "int").unwrap().line, 2);
    }

    #[test]
    fn diamond_line_keeps_angle_brackets() {
        let texts = significant_texts("Set<String> conditionKeys = new HashSet<String>();");
        assert_eq!(
            texts,
            vec![
                "Set", "<", "String", ">", "conditionKeys", "=", "new", "HashSet", "<", "String",
                ">", "(", ")", ";"
            ]
        );
    }

    #[test]
    fn literals() {
        assert_eq!(
            kinds(r#"1_000L 0x1F 3.5e-2f .5 'a' '\'' "a\"b" true null"#)
                .iter()
                .map(|(k, _)| *k)
                .collect::<Vec<_>>(),
            vec![TokenKind::Literal; 9]
        );
    }

    #[test]
    fn text_block_is_one_token() {
        let src = "String s = \"\"\"\n  hi\n  \"\"\";";
        let toks = significant_texts(src);
        assert_eq!(toks.len(), 5);
        assert_eq!(sloc(src), 3);
    }

    #[test]
    fn shift_operators_use_maximal_munch() {
        assert_eq!(significant_texts("a >>>= b >> c"), vec!["a", ">>>=", "b", ">>", "c"]);
    }

    #[test]
    fn unknown_bytes_become_operators() {
        let toks = significant_tokens("a # b");
        assert_eq!(toks[1].kind, TokenKind::Operator);
        assert_eq!(toks[1].text, "#");
    }

    #[test]
    fn sloc_examples() {
        assert_eq!(sloc("\n\n// only comments\n"), 0);
        assert_eq!(sloc("int a; // trailing comment"), 1);
        assert_eq!(sloc("/* a\n b */ int x;\n/*\n*/\n"), 1);
        assert_eq!(sloc(""), 0);
        assert_eq!(token_count(""), 0);
        assert_eq!(token_count("return x;"), 3);
    }

    #[test]
    fn lossless_on_odd_input() {
        let src = "a /* unterminated";
        let joined: String = tokenize(src).iter().map(|t| t.text).collect();
        assert_eq!(joined, src);
        let src = "\"open string\nnext";
        let joined: String = tokenize(src).iter().map(|t| t.text).collect();
        assert_eq!(joined, src);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn concatenation_reproduces_input(s in "\\PC{0,80}") {
                let joined: String = tokenize(&s).iter().map(|t| t.text).collect();
                prop_assert_eq!(joined, s);
            }

            #[test]
            fn comments_and_blank_lines_do_not_change_counts(
                words in proptest::collection::vec("[a-z]{1,5}", 1..8),
                comment in "[a-z ]{0,10}",
            ) {
                let code = format!("int {} = 1;", words.join("_"));
                let noisy = format!("\n// {comment}\n{code} /* {comment} */\n\n");
                prop_assert_eq!(sloc(&code), sloc(&noisy));
                prop_assert_eq!(token_count(&code), token_count(&noisy));
            }
        }
    }
}
