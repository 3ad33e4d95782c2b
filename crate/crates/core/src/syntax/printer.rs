//! Canonical pretty printer.
//!
//! Style: four-space indentation, one statement per line, one space around
//! binary operators, opening braces on the same line. Literal and type text is
//! copied from the source the nodes were parsed from, so the printer always
//! needs that source.

use super::ast::*;
use super::lexer::{significant_tokens, TokenKind};

const INDENT: &str = "    ";

pub struct Printer<'s> {
    src: &'s str,
    out: String,
    indent: usize,
}

impl<'s> Printer<'s> {
    pub fn new(src: &'s str) -> Self {
        Printer {
            src,
            out: String::new(),
            indent: 0,
        }
    }

    pub fn with_indent(src: &'s str, indent: usize) -> Self {
        Printer {
            src,
            out: String::new(),
            indent,
        }
    }

    pub fn finish(self) -> String {
        self.out
    }

    fn w(&mut self, s: &str) {
        self.out.push_str(s);
    }

    fn newline(&mut self) {
        self.out.push('\n');
        for _ in 0..self.indent {
            self.out.push_str(INDENT);
        }
    }

    fn line_start(&mut self) {
        for _ in 0..self.indent {
            self.out.push_str(INDENT);
        }
    }

    // ---- declarations --------------------------------------------------

    pub fn import(&mut self, i: &ImportDecl) {
        self.w("import ");
        if i.is_static {
            self.w("static ");
        }
        self.w(&i.path);
        if i.wildcard {
            self.w(".*");
        }
        self.w(";");
    }

    pub fn annotation(&mut self, a: &Annotation) {
        self.w("@");
        self.w(&a.name);
        if a.span.text(self.src).trim_end().ends_with(')') {
            self.w("(");
            self.expr_list(&a.args);
            self.w(")");
        }
    }

    /// Annotations on their own lines, then keywords on the current line.
    fn decl_modifiers(&mut self, m: &Modifiers) {
        for a in &m.annotations {
            self.annotation(a);
            self.newline();
        }
        for k in &m.keywords {
            self.w(k);
            self.w(" ");
        }
    }

    /// Everything on one line (parameters, locals, catch clauses).
    fn inline_modifiers(&mut self, m: &Modifiers) {
        for a in &m.annotations {
            self.annotation(a);
            self.w(" ");
        }
        for k in &m.keywords {
            self.w(k);
            self.w(" ");
        }
    }

    pub fn ty(&mut self, t: &TypeRef) {
        let text = type_text(t.span.text(self.src));
        self.w(&text);
    }

    fn type_params(&mut self, tps: &[TypeParam]) {
        if tps.is_empty() {
            return;
        }
        self.w("<");
        for (i, tp) in tps.iter().enumerate() {
            if i > 0 {
                self.w(", ");
            }
            self.w(&tp.name.name);
            for (j, b) in tp.bounds.iter().enumerate() {
                self.w(if j == 0 { " extends " } else { " & " });
                self.ty(b);
            }
        }
        self.w(">");
    }

    fn type_list(&mut self, ts: &[TypeRef]) {
        for (i, t) in ts.iter().enumerate() {
            if i > 0 {
                self.w(", ");
            }
            self.ty(t);
        }
    }

    pub fn param(&mut self, p: &Param) {
        self.inline_modifiers(&p.modifiers);
        self.ty(&p.ty);
        if p.varargs {
            self.w("...");
        }
        self.w(" ");
        self.w(&p.name.name);
    }

    pub fn method(&mut self, m: &MethodDecl) {
        self.decl_modifiers(&m.modifiers);
        if !m.type_params.is_empty() {
            self.type_params(&m.type_params);
            self.w(" ");
        }
        if let Some(rt) = &m.return_type {
            self.ty(rt);
            self.w(" ");
        }
        self.w(&m.name.name);
        self.w("(");
        for (i, p) in m.params.iter().enumerate() {
            if i > 0 {
                self.w(", ");
            }
            self.param(p);
        }
        self.w(")");
        if !m.throws.is_empty() {
            self.w(" throws ");
            self.type_list(&m.throws);
        }
        match &m.body {
            Some(b) => {
                self.w(" ");
                self.block(b);
            }
            None => self.w(";"),
        }
    }

    pub fn member(&mut self, m: &Member) {
        match m {
            Member::Field(f) => {
                self.decl_modifiers(&f.modifiers);
                self.ty(&f.ty);
                self.w(" ");
                self.declarators(&f.declarators);
                self.w(";");
            }
            Member::Method(md) => self.method(md),
            Member::Initializer { is_static, body, .. } => {
                if *is_static {
                    self.w("static ");
                }
                self.block(body);
            }
            Member::Type(t) => self.type_decl(t),
        }
    }

    pub fn type_decl(&mut self, t: &TypeDecl) {
        self.decl_modifiers(&t.modifiers);
        self.w(match t.kind {
            TypeDeclKind::Class => "class ",
            TypeDeclKind::Interface => "interface ",
            TypeDeclKind::Enum => "enum ",
            TypeDeclKind::Annotation => "@interface ",
        });
        self.w(&t.name.name);
        self.type_params(&t.type_params);
        if !t.extends.is_empty() {
            self.w(" extends ");
            self.type_list(&t.extends);
        }
        if !t.implements.is_empty() {
            self.w(" implements ");
            self.type_list(&t.implements);
        }
        self.w(" {");
        self.indent += 1;
        if t.kind == TypeDeclKind::Enum {
            self.newline();
            for (i, c) in t.enum_constants.iter().enumerate() {
                if i > 0 {
                    self.w(", ");
                }
                self.w(&c.name.name);
                if c.span.text(self.src).contains('(') && body_paren(c, self.src) {
                    self.w("(");
                    self.expr_list(&c.args);
                    self.w(")");
                }
                if let Some(b) = &c.body {
                    self.w(" ");
                    self.class_body_inner(b);
                }
            }
            self.w(";");
        }
        for m in &t.body.members {
            self.newline();
            self.member(m);
        }
        self.indent -= 1;
        self.newline();
        self.w("}");
    }

    fn class_body_inner(&mut self, b: &ClassBody) {
        self.w("{");
        self.indent += 1;
        for m in &b.members {
            self.newline();
            self.member(m);
        }
        self.indent -= 1;
        self.newline();
        self.w("}");
    }

    fn declarators(&mut self, ds: &[Declarator]) {
        for (i, d) in ds.iter().enumerate() {
            if i > 0 {
                self.w(", ");
            }
            self.w(&d.name.name);
            for _ in 0..d.dims {
                self.w("[]");
            }
            if let Some(init) = &d.init {
                self.w(" = ");
                self.expr(init);
            }
        }
    }

    pub fn local_var(&mut self, d: &LocalVarDecl) {
        self.inline_modifiers(&d.modifiers);
        self.ty(&d.ty);
        self.w(" ");
        self.declarators(&d.declarators);
    }

    // ---- statements ----------------------------------------------------

    pub fn block(&mut self, b: &Block) {
        self.w("{");
        self.indent += 1;
        for s in &b.stmts {
            self.newline();
            self.stmt(s);
        }
        self.indent -= 1;
        self.newline();
        self.w("}");
    }

    /// Body of `if`/loops: blocks stay on the header line, other statements
    /// go on their own indented line.
    fn sub_stmt(&mut self, s: &Stmt) {
        if let StmtKind::Block(b) = &s.kind {
            self.w(" ");
            self.block(b);
        } else {
            self.indent += 1;
            self.newline();
            self.stmt(s);
            self.indent -= 1;
        }
    }

    fn after_sub_stmt(&mut self, s: &Stmt) {
        if matches!(s.kind, StmtKind::Block(_)) {
            self.w(" ");
        } else {
            self.newline();
        }
    }

    pub fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::LocalVar(d) => {
                self.local_var(d);
                self.w(";");
            }
            StmtKind::Expr(e) => {
                self.expr(e);
                self.w(";");
            }
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                self.w("if (");
                self.expr(cond);
                self.w(")");
                self.sub_stmt(then_branch);
                if let Some(e) = else_branch {
                    self.after_sub_stmt(then_branch);
                    self.w("else");
                    if matches!(e.kind, StmtKind::If { .. }) {
                        self.w(" ");
                        self.stmt(e);
                    } else {
                        self.sub_stmt(e);
                    }
                }
            }
            StmtKind::For {
                init,
                cond,
                update,
                body,
            } => {
                self.w("for (");
                match init {
                    Some(ForInit::Decl(d)) => self.local_var(d),
                    Some(ForInit::Exprs(es)) => self.expr_list(es),
                    None => {}
                }
                self.w(";");
                if let Some(c) = cond {
                    self.w(" ");
                    self.expr(c);
                }
                self.w(";");
                if !update.is_empty() {
                    self.w(" ");
                    self.expr_list(update);
                }
                self.w(")");
                self.sub_stmt(body);
            }
            StmtKind::ForEach {
                modifiers,
                ty,
                name,
                iterable,
                body,
            } => {
                self.w("for (");
                self.inline_modifiers(modifiers);
                self.ty(ty);
                self.w(" ");
                self.w(&name.name);
                self.w(" : ");
                self.expr(iterable);
                self.w(")");
                self.sub_stmt(body);
            }
            StmtKind::While { cond, body } => {
                self.w("while (");
                self.expr(cond);
                self.w(")");
                self.sub_stmt(body);
            }
            StmtKind::Do { body, cond } => {
                self.w("do");
                self.sub_stmt(body);
                self.after_sub_stmt(body);
                self.w("while (");
                self.expr(cond);
                self.w(");");
            }
            StmtKind::Switch { selector, cases } => {
                self.w("switch (");
                self.expr(selector);
                self.w(") {");
                self.indent += 1;
                for c in cases {
                    self.newline();
                    if c.is_default {
                        self.w("default:");
                    } else {
                        self.w("case ");
                        self.expr_list(&c.labels);
                        self.w(":");
                    }
                    self.indent += 1;
                    for s in &c.body {
                        self.newline();
                        self.stmt(s);
                    }
                    self.indent -= 1;
                }
                self.indent -= 1;
                self.newline();
                self.w("}");
            }
            StmtKind::Try {
                resources,
                body,
                catches,
                finally,
            } => {
                self.w("try ");
                if !resources.is_empty() {
                    self.w("(");
                    for (i, r) in resources.iter().enumerate() {
                        if i > 0 {
                            self.w("; ");
                        }
                        match r {
                            Resource::Decl {
                                modifiers,
                                ty,
                                name,
                                init,
                                ..
                            } => {
                                self.inline_modifiers(modifiers);
                                self.ty(ty);
                                self.w(" ");
                                self.w(&name.name);
                                self.w(" = ");
                                self.expr(init);
                            }
                            Resource::Expr(e) => self.expr(e),
                        }
                    }
                    if resources_trailing_semicolon(s, self.src, resources) {
                        self.w(";");
                    }
                    self.w(") ");
                }
                self.block(body);
                for c in catches {
                    self.w(" catch (");
                    self.inline_modifiers(&c.modifiers);
                    for (i, t) in c.types.iter().enumerate() {
                        if i > 0 {
                            self.w(" | ");
                        }
                        self.ty(t);
                    }
                    self.w(" ");
                    self.w(&c.name.name);
                    self.w(") ");
                    self.block(&c.body);
                }
                if let Some(f) = finally {
                    self.w(" finally ");
                    self.block(f);
                }
            }
            StmtKind::Return(v) => {
                self.w("return");
                if let Some(e) = v {
                    self.w(" ");
                    self.expr(e);
                }
                self.w(";");
            }
            StmtKind::Throw(e) => {
                self.w("throw ");
                self.expr(e);
                self.w(";");
            }
            StmtKind::Break(l) | StmtKind::Continue(l) => {
                self.w(if matches!(s.kind, StmtKind::Break(_)) {
                    "break"
                } else {
                    "continue"
                });
                if let Some(l) = l {
                    self.w(" ");
                    self.w(&l.name);
                }
                self.w(";");
            }
            StmtKind::Block(b) => self.block(b),
            StmtKind::Labeled { label, body } => {
                self.w(&label.name);
                self.w(":");
                self.newline();
                self.stmt(body);
            }
            StmtKind::Synchronized { lock, body } => {
                self.w("synchronized (");
                self.expr(lock);
                self.w(") ");
                self.block(body);
            }
            StmtKind::Assert { cond, message } => {
                self.w("assert ");
                self.expr(cond);
                if let Some(m) = message {
                    self.w(" : ");
                    self.expr(m);
                }
                self.w(";");
            }
            StmtKind::Empty => self.w(";"),
        }
    }

    // ---- expressions ---------------------------------------------------

    fn expr_list(&mut self, es: &[Expr]) {
        for (i, e) in es.iter().enumerate() {
            if i > 0 {
                self.w(", ");
            }
            self.expr(e);
        }
    }

    pub fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Literal(_) => {
                let t = e.span.text(self.src);
                self.w(t);
            }
            ExprKind::Name(n) => self.w(n),
            ExprKind::This => self.w("this"),
            ExprKind::Super => self.w("super"),
            ExprKind::FieldAccess { target, name } => {
                self.expr(target);
                self.w(".");
                self.w(&name.name);
            }
            ExprKind::ArrayAccess { array, index } => {
                self.expr(array);
                self.w("[");
                self.expr(index);
                self.w("]");
            }
            ExprKind::Call {
                target,
                type_args,
                name,
                args,
            } => {
                if let Some(t) = target {
                    self.expr(t);
                    self.w(".");
                }
                if !type_args.is_empty() {
                    self.w("<");
                    self.type_list(type_args);
                    self.w(">");
                }
                self.w(&name.name);
                self.w("(");
                self.expr_list(args);
                self.w(")");
            }
            ExprKind::New { ty, args, body } => {
                self.w("new ");
                self.ty(ty);
                self.w("(");
                self.expr_list(args);
                self.w(")");
                if let Some(b) = body {
                    self.w(" ");
                    self.class_body_inner(b);
                }
            }
            ExprKind::NewArray {
                elem,
                sizes,
                dims,
                init,
            } => {
                self.w("new ");
                self.ty(elem);
                for s in sizes {
                    self.w("[");
                    self.expr(s);
                    self.w("]");
                }
                for _ in sizes.len()..*dims {
                    self.w("[]");
                }
                if let Some(elems) = init {
                    self.w(" ");
                    self.array_init(elems);
                }
            }
            ExprKind::ArrayInit(elems) => self.array_init(elems),
            ExprKind::Unary { op, operand } => {
                if op.is_postfix() {
                    self.expr(operand);
                    self.w(op.symbol());
                } else {
                    self.w(op.symbol());
                    let mut inner = Printer::with_indent(self.src, self.indent);
                    inner.expr(operand);
                    let text = inner.finish();
                    // `- -x` must not print as `--x`.
                    let sym = op.symbol().as_bytes()[0];
                    if text.as_bytes().first().is_some_and(|&b| b == sym && (b == b'+' || b == b'-')) {
                        self.w(" ");
                    }
                    self.w(&text);
                }
            }
            ExprKind::Binary { op, lhs, rhs } => {
                self.expr(lhs);
                self.w(" ");
                self.w(op.symbol());
                self.w(" ");
                self.expr(rhs);
            }
            ExprKind::Assign { op, target, value } => {
                self.expr(target);
                self.w(" ");
                if let Some(op) = op {
                    self.w(op.symbol());
                }
                self.w("= ");
                self.expr(value);
            }
            ExprKind::Ternary {
                cond,
                then_expr,
                else_expr,
            } => {
                self.expr(cond);
                self.w(" ? ");
                self.expr(then_expr);
                self.w(" : ");
                self.expr(else_expr);
            }
            ExprKind::InstanceOf { expr, ty, binding } => {
                self.expr(expr);
                self.w(" instanceof ");
                self.ty(ty);
                if let Some(b) = binding {
                    self.w(" ");
                    self.w(&b.name);
                }
            }
            ExprKind::Cast { ty, expr } => {
                self.w("(");
                self.ty(ty);
                self.w(") ");
                self.expr(expr);
            }
            ExprKind::Lambda { params, body } => {
                let parens = !(params.len() == 1 && matches!(params[0], LambdaParam::Inferred(_)))
                    || e.span.text(self.src).starts_with('(');
                if parens {
                    self.w("(");
                }
                for (i, p) in params.iter().enumerate() {
                    if i > 0 {
                        self.w(", ");
                    }
                    match p {
                        LambdaParam::Inferred(id) => self.w(&id.name),
                        LambdaParam::Typed(p) => self.param(p),
                    }
                }
                if parens {
                    self.w(")");
                }
                self.w(" -> ");
                match body {
                    LambdaBody::Expr(x) => self.expr(x),
                    LambdaBody::Block(b) => self.block(b),
                }
            }
            ExprKind::MethodRef { target, name } => {
                self.expr(target);
                self.w("::");
                self.w(&name.name);
            }
            ExprKind::ClassLit(t) => {
                self.ty(t);
                self.w(".class");
            }
            ExprKind::Paren(inner) => {
                self.w("(");
                self.expr(inner);
                self.w(")");
            }
        }
    }

    fn array_init(&mut self, elems: &[Expr]) {
        self.w("{");
        self.expr_list(elems);
        self.w("}");
    }
}

fn body_paren(c: &EnumConstant, src: &str) -> bool {
    let text = c.span.text(src);
    let after_name = &text[c.name.span.end - c.span.start..];
    after_name.trim_start().starts_with('(')
}

fn resources_trailing_semicolon(s: &Stmt, src: &str, resources: &[Resource]) -> bool {
    let last_end = resources.last().map_or(s.span.start, |r| r.span().end);
    let rest = &src[last_end..s.span.end];
    significant_tokens(rest)
        .first()
        .is_some_and(|t| t.text == ";")
}

/// Normalizes written type text to canonical spacing.
pub fn type_text(raw: &str) -> String {
    let toks = significant_tokens(raw);
    let mut out = String::new();
    let mut prev: Option<(&str, TokenKind)> = None;
    for t in toks {
        if let Some((p, pk)) = prev {
            let space = p == ","
                || t.text == "&"
                || p == "&"
                || (pk == TokenKind::Keyword && matches!(p, "extends" | "super"))
                || (t.kind == TokenKind::Keyword && matches!(t.text, "extends" | "super"));
            if space {
                out.push(' ');
            }
        }
        out.push_str(t.text);
        prev = Some((t.text, t.kind));
    }
    out
}

/// Canonical text of a whole method (with trailing newline).
pub fn method_to_string(src: &str, m: &MethodDecl) -> String {
    let mut p = Printer::new(src);
    p.method(m);
    let mut s = p.finish();
    s.push('\n');
    s
}

/// Canonical text of a statement printed at the given indentation level.
/// The first line carries no leading indentation.
pub fn stmt_to_string(src: &str, s: &Stmt, indent: usize) -> String {
    let mut p = Printer::with_indent(src, indent);
    p.stmt(s);
    p.finish()
}

pub fn expr_to_string(src: &str, e: &Expr) -> String {
    let mut p = Printer::new(src);
    p.expr(e);
    p.finish()
}

pub fn block_to_string(src: &str, b: &Block, indent: usize) -> String {
    let mut p = Printer::with_indent(src, indent);
    p.block(b);
    p.finish()
}

pub fn import_to_string(i: &ImportDecl) -> String {
    let mut p = Printer::new("");
    p.import(i);
    p.finish()
}

impl Printer<'_> {
    /// Writes a statement list, one per line, each prefixed with indentation.
    pub fn stmts_lines(&mut self, stmts: &[Stmt]) {
        for (i, s) in stmts.iter().enumerate() {
            if i > 0 {
                self.out.push('\n');
            }
            self.line_start();
            self.stmt(s);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::lexer::significant_texts;
    use crate::syntax::parser::parse_method_fragment;

    fn canon(src: &str) -> String {
        let m = parse_method_fragment(src).unwrap().method;
        method_to_string(src, &m)
    }

    #[test]
    fn empty_method() {
        assert_eq!(canon("void f() {}"), "void f() {\n}\n");
    }

    #[test]
    fn statements_one_per_line() {
        let out = canon("int f(int a){int b=a*2;if(b>3){return b;}else return -b;}");
        assert_eq!(
            out,
            "int f(int a) {\n    int b = a * 2;\n    if (b > 3) {\n        return b;\n    } else\n        return -b;\n}\n"
        );
    }

    #[test]
    fn unary_minus_spacing() {
        let out = canon("int f(int a){return - -a + -(-a);}");
        assert_eq!(significant_texts(&out), significant_texts("int f(int a){return - -a + -(-a);}"));
        assert!(out.contains("- -a"));
    }

    #[test]
    fn type_text_spacing() {
        assert_eq!(type_text("Map< String ,List<? extends  Number>>"), "Map<String, List<? extends Number>>");
    }

    #[test]
    fn round_trip_rich_method() {
        let src = r#"@Override
public <T extends Comparable<T>> List<T> sort(final List<T> xs, int... rest) throws IOException, InterruptedException {
    Map<String, List<Integer>> m = new HashMap<>();
    int[][] grid = new int[3][];
    String[] names = new String[] {"a", "b"};
    label:
    for (int i = 0, j = 1; i < xs.size(); i++, j--) {
        if (i % 2 == 0) continue label; else if (i > 10) break;
        else { j += i >> 1; }
    }
    for (T x : xs) System.out.println(x);
    do { rest[0]--; } while (rest[0] > 0);
    switch (rest.length) { case 0: case 1, 2: return xs; default: break; }
    try (Reader r = open(); Writer w = out()) { r.read(); } catch (IOException | RuntimeException e) { throw e; } finally { close(); }
    synchronized (this) { assert xs != null : "null"; }
    Runnable run = () -> { go(); };
    Function<T, String> f = x -> x.toString();
    Comparator<T> c = (a, b) -> a.compareTo(b);
    Object o = new Object() { @Override public String toString() { return "o"; } };
    boolean flag = o instanceof String s && !s.isEmpty() ? true : false;
    long l = (long) grid.length + ((int) 2.0);
    Class<?> k = String[].class;
    xs.stream().map(String::valueOf).forEach(System.out::println);
    return Collections.<T>emptyList();
}
"#;
        let out = canon(src);
        assert_eq!(significant_texts(&out), significant_texts(src), "{out}");
        // Canonical output is a fixed point.
        assert_eq!(canon(&out), out);
    }
}
