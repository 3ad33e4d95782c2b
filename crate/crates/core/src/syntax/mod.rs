//! Lexing, parsing and printing of the supported Java subset.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod scan;
pub mod tree;
pub mod visit;

pub use lexer::{normalized_lines, significant_texts, sloc, token_count, token_equal, tokenize, Token, TokenKind};
pub use parser::SyntaxError;
pub use tree::SyntaxNode;

use ast::{ImportDecl, MethodDecl, Span, Stmt};

/// A parsed method: the unit every simplification operates on.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodUnit {
    pub qualified_name: String,
    pub source: String,
    pub imports: Vec<ImportDecl>,
    pub decl: MethodDecl,
    /// Byte range of the method inside its file; `(0, source.len())` when
    /// parsed standalone.
    pub file_span: (usize, usize),
    pub sloc: usize,
    pub token_count: usize,
}

impl MethodUnit {
    pub fn tree(&self) -> SyntaxNode {
        tree::method_tree(&self.imports, &self.decl)
    }

    pub fn name(&self) -> &str {
        &self.decl.name.name
    }

    /// `name(T1,T2)` as written.
    pub fn signature(&self) -> String {
        self.decl.signature(&self.source)
    }

    pub fn body_stmts(&self) -> &[Stmt] {
        self.decl.body.as_ref().map_or(&[], |b| &b.stmts)
    }

    pub fn text(&self, span: Span) -> &str {
        span.text(&self.source)
    }

    /// Attaches file context to a standalone parse.
    pub fn located(mut self, qualified_name: impl Into<String>, file_start: usize) -> Self {
        self.qualified_name = qualified_name.into();
        self.file_span = (file_start, file_start + self.source.len());
        self
    }
}

/// Parses one method declaration, optionally preceded by import declarations.
pub fn parse_method(text: &str) -> Result<MethodUnit, SyntaxError> {
    let frag = parser::parse_method_fragment(text)?;
    Ok(MethodUnit {
        qualified_name: frag.method.name.name.clone(),
        source: text.to_string(),
        imports: frag.imports,
        decl: frag.method,
        file_span: (0, text.len()),
        sloc: sloc(text),
        token_count: token_count(text),
    })
}

/// Source-preserving print: the method text exactly as held by the unit.
pub fn print(unit: &MethodUnit) -> String {
    unit.source.clone()
}

/// Canonical-style print of the whole unit (imports first).
pub fn print_canonical(unit: &MethodUnit) -> String {
    let mut out = String::new();
    for i in &unit.imports {
        out.push_str(&printer::import_to_string(i));
        out.push('\n');
    }
    out.push_str(&printer::method_to_string(&unit.source, &unit.decl));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) const AUDIT_LOGS: &str = "public Collection<AuditRequestLog> getAuditRequestLogs() {\n    Collection<AuditRequestLog> newList = repository.findAll();\n    return newList;\n}\n";
    const AUDIT_LOGS_SIMPLE: &str = "public Collection<AuditRequestLog> getAuditRequestLogs() {\n    return repository.findAll();\n}\n";

    #[test]
    fn repository_getter_parses_into_two_statements() {
        let u = parse_method(AUDIT_LOGS).unwrap();
        assert_eq!(u.body_stmts().len(), 2);
        let kinds: Vec<_> = u.tree().children.last().unwrap().children.iter().map(|c| c.kind).collect();
        assert_eq!(kinds, ["local-var-decl", "return"]);
        assert_eq!(u.sloc, 4);
        assert_eq!(parse_method(AUDIT_LOGS_SIMPLE).unwrap().sloc, 3);
    }

    #[test]
    fn empty_method_unit() {
        let u = parse_method("void f() {}").unwrap();
        assert_eq!(u.sloc, 1);
        assert!(u.body_stmts().is_empty());
        assert_eq!(print_canonical(&u), "void f() {\n}\n");
        assert_eq!(print(&u), "void f() {}");
    }

    #[test]
    fn malformed_initializer() {
        let err = parse_method("void f() { int x = ; }").unwrap_err();
        assert!(matches!(err, SyntaxError::Syntax { line: 1, column: 20, .. }));
    }

    #[test]
    fn boolean_comparison_round_trip() {
        let src = "boolean isValid(CacheObject co) {\n    if (false == co.isExpired()) {\n        return true;\n    }\n    return false;\n}";
        let u = parse_method(src).unwrap();
        assert!(token_equal(&print(&u), src));
        assert!(token_equal(&print_canonical(&u), src));
    }

    #[test]
    fn imports_are_part_of_unit() {
        let u = parse_method("import java.util.Arrays;\n\nvoid f(int[] a) { Arrays.fill(a, 0); }").unwrap();
        assert_eq!(u.imports.len(), 1);
        assert_eq!(u.tree().kind, "method-unit");
        assert!(print_canonical(&u).starts_with("import java.util.Arrays;\nvoid f(int[] a) {"));
    }

    /// Small generator of well-formed methods built from statement templates.
    fn method_strategy() -> impl Strategy<Value = String> {
        let stmt = prop_oneof![
            Just("int a = 1;".to_string()),
            Just("x += a * (b - 2);".to_string()),
            Just("if (a > b && c) { foo(a); } else { bar(); }".to_string()),
            Just("for (int i = 0; i < n; i++) total += xs.get(i);".to_string()),
            Just("for (String s : names) { out.add(s.trim()); }".to_string()),
            Just("while (!done) { done = step(); }".to_string()),
            Just("List<Map<String, Integer>> m = new ArrayList<>();".to_string()),
            Just("try { run(); } catch (IOException e) { log(e); } finally { close(); }".to_string()),
            Just("Runnable r = () -> System.out.println(\"hi\");".to_string()),
            Just("int v = flag ? 1 : -1;".to_string()),
            Just("switch (k) { case 1: a++; break; default: a--; }".to_string()),
            Just("Object o = (Object) names;".to_string()),
            Just("// comment\n".to_string()),
        ];
        prop::collection::vec(stmt, 0..8).prop_map(|stmts| {
            let mut s = String::from("int f(int n, List<String> names) throws IOException {\n");
            for st in stmts {
                s.push_str("    ");
                s.push_str(&st);
                s.push('\n');
            }
            s.push_str("    return n;\n}\n");
            s
        })
    }

    proptest! {
        #[test]
        fn canonical_print_is_token_equal(src in method_strategy()) {
            let u = parse_method(&src).unwrap();
            let printed = print_canonical(&u);
            prop_assert!(token_equal(&printed, &src), "{}", printed);
            let again = parse_method(&printed).unwrap();
            prop_assert_eq!(print_canonical(&again), printed);
        }

        #[test]
        fn tree_spans_are_nested_and_ordered(src in method_strategy()) {
            let u = parse_method(&src).unwrap();
            prop_assert!(u.tree().check_spans().is_ok());
        }
    }
}
