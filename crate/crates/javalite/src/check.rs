//! Compile-time checks standing in for `javac`: unresolved names and
//! methods, duplicate locals, unreachable statements and missing returns.
//! There is no type checking.

use std::collections::HashSet;

use simplikit_core::reducer::decl_well_formed;
use simplikit_core::syntax::ast::*;
use simplikit_core::syntax::visit::{for_each_child_expr, Child};

use crate::program::{ClassInfo, Diagnostic, Program};

const ASSERTIONS: &[&str] = &[
    "assertEquals",
    "assertNotEquals",
    "assertTrue",
    "assertFalse",
    "assertNull",
    "assertNotNull",
    "assertSame",
    "assertNotSame",
    "assertArrayEquals",
    "assertIterableEquals",
    "assertThrows",
    "assertDoesNotThrow",
    "fail",
];

pub fn check(program: &Program) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for class in program.classes.values() {
        for fd in &class.fields {
            for d in &fd.declarators {
                if let Some(init) = &d.init {
                    let mut c = Checker::new(program, class, fd.modifiers.has("static"));
                    c.expr(init);
                    out.extend(c.diags);
                }
            }
        }
        for (is_static, block) in &class.initializers {
            let mut c = Checker::new(program, class, *is_static);
            c.block(&block.stmts);
            out.extend(c.diags);
        }
        for m in &class.methods {
            let Some(body) = &m.body else { continue };
            let mut c = Checker::new(program, class, m.modifiers.has("static"));
            c.scopes.push(HashSet::new());
            for p in &m.params {
                c.declare(&p.name);
            }
            c.stmts(&body.stmts);
            if !decl_well_formed(m) {
                c.diags.push(class.diag(body.span.end.saturating_sub(1), "missing return statement"));
            }
            out.extend(c.diags);
        }
    }
    out.sort_by(|a, b| (&a.path, a.line, a.column).cmp(&(&b.path, b.line, b.column)));
    out
}

struct Checker<'a> {
    program: &'a Program,
    class: &'a ClassInfo,
    scopes: Vec<HashSet<String>>,
    diags: Vec<Diagnostic>,
    _is_static: bool,
}

impl<'a> Checker<'a> {
    fn new(program: &'a Program, class: &'a ClassInfo, is_static: bool) -> Self {
        Checker {
            program,
            class,
            scopes: vec![HashSet::new()],
            diags: Vec::new(),
            _is_static: is_static,
        }
    }

    fn error(&mut self, off: usize, msg: String) {
        self.diags.push(self.class.diag(off, msg));
    }

    fn declare(&mut self, id: &Ident) {
        if self.scopes.iter().any(|s| s.contains(&id.name)) {
            self.error(id.span.start, format!("variable {} is already defined", id.name));
        }
        if let Some(s) = self.scopes.last_mut() {
            s.insert(id.name.clone());
        }
    }

    /// Classes whose members are visible unqualified: the class chain plus
    /// every class of the same file (nested and enclosing types).
    fn visible_classes(&self) -> Vec<&'a ClassInfo> {
        let mut out: Vec<&'a ClassInfo> = self.program.chain(&self.class.name).into_iter().map(|c| &**c).collect();
        let mut i = 0;
        while i < out.len() {
            for iface in &out[i].interfaces {
                if let Some(c) = self.program.class(iface) {
                    if !out.iter().any(|o| o.name == c.name) {
                        out.push(c);
                    }
                }
            }
            i += 1;
        }
        for c in self.program.classes.values() {
            if c.path == self.class.path && !out.iter().any(|o| o.name == c.name) {
                out.push(c);
            }
        }
        out
    }

    fn name_resolves(&self, n: &str) -> bool {
        if self.scopes.iter().any(|s| s.contains(n)) {
            return true;
        }
        for c in self.visible_classes() {
            if c.fields.iter().any(|f| f.declarators.iter().any(|d| d.name.name == n))
                || c.enum_constants.iter().any(|e| e.name.name == n)
            {
                return true;
            }
        }
        for imp in self.class.imports.iter().filter(|i| i.is_static) {
            if imp.simple_name() == Some(n) {
                return true;
            }
            if imp.wildcard {
                let owner = imp.path.rsplit('.').next().unwrap_or(&imp.path);
                match self.program.class(owner) {
                    Some(c) if c.fields.iter().any(|f| f.declarators.iter().any(|d| d.name.name == n)) => return true,
                    Some(_) => {}
                    None => return true,
                }
            }
        }
        // Type names: project classes, and anything capitalized is assumed
        // to be a library class.
        self.program.class(n).is_some() || n.starts_with(char::is_uppercase)
    }

    fn method_resolves(&self, name: &str, arity: usize) -> bool {
        let fits = |m: &MethodDecl| {
            !m.is_constructor()
                && m.name.name == name
                && (m.params.len() == arity || m.params.last().is_some_and(|p| p.varargs) && arity + 1 >= m.params.len())
        };
        if self.visible_classes().iter().any(|c| c.methods.iter().any(fits)) {
            return true;
        }
        if self.class.superclass.as_deref().is_some_and(|s| self.program.class(s).is_none())
            && matches!(name, "getMessage" | "toString" | "hashCode" | "equals" | "getClass" | "getCause")
        {
            return true;
        }
        if matches!(name, "toString" | "hashCode" | "equals" | "getClass" | "name" | "ordinal" | "values" | "valueOf") {
            return true;
        }
        for imp in self.class.imports.iter().filter(|i| i.is_static) {
            if imp.simple_name() == Some(name) {
                return true;
            }
            if imp.wildcard {
                let owner = imp.path.rsplit('.').next().unwrap_or(&imp.path);
                match self.program.class(owner) {
                    Some(c) if c.methods.iter().any(fits) => return true,
                    Some(_) => {}
                    None => return true,
                }
            }
        }
        ASSERTIONS.contains(&name)
    }

    fn block(&mut self, stmts: &[Stmt]) {
        self.scopes.push(HashSet::new());
        self.stmts(stmts);
        self.scopes.pop();
    }

    fn stmts(&mut self, stmts: &[Stmt]) {
        let mut dead = false;
        for s in stmts {
            if dead {
                self.error(s.span.start, "unreachable statement".into());
                dead = false;
            }
            self.stmt(s);
            if matches!(
                s.kind,
                StmtKind::Return(_) | StmtKind::Throw(_) | StmtKind::Break(_) | StmtKind::Continue(_)
            ) {
                dead = true;
            }
        }
    }

    fn scoped(&mut self, s: &Stmt) {
        self.scopes.push(HashSet::new());
        self.stmt(s);
        self.scopes.pop();
    }

    fn local(&mut self, d: &LocalVarDecl) {
        for decl in &d.declarators {
            if let Some(init) = &decl.init {
                self.expr(init);
            }
            self.declare(&decl.name);
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::LocalVar(d) => self.local(d),
            StmtKind::Expr(e) | StmtKind::Throw(e) | StmtKind::Return(Some(e)) => self.expr(e),
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                self.expr(cond);
                self.scoped(then_branch);
                if let Some(e) = else_branch {
                    self.scoped(e);
                }
            }
            StmtKind::For {
                init,
                cond,
                update,
                body,
            } => {
                self.scopes.push(HashSet::new());
                match init {
                    Some(ForInit::Decl(d)) => self.local(d),
                    Some(ForInit::Exprs(es)) => es.iter().for_each(|e| self.expr(e)),
                    None => {}
                }
                if let Some(c) = cond {
                    self.expr(c);
                }
                update.iter().for_each(|e| self.expr(e));
                self.scoped(body);
                self.scopes.pop();
            }
            StmtKind::ForEach { name, iterable, body, .. } => {
                self.expr(iterable);
                self.scopes.push(HashSet::new());
                self.declare(name);
                self.scoped(body);
                self.scopes.pop();
            }
            StmtKind::While { cond, body } | StmtKind::Do { body, cond } => {
                self.expr(cond);
                self.scoped(body);
            }
            StmtKind::Switch { selector, cases } => {
                self.expr(selector);
                self.scopes.push(HashSet::new());
                for c in cases {
                    for l in &c.labels {
                        // Bare enum constant labels resolve against the selector type.
                        if l.as_name().is_none() {
                            self.expr(l);
                        }
                    }
                    self.stmts(&c.body);
                }
                self.scopes.pop();
            }
            StmtKind::Try {
                resources,
                body,
                catches,
                finally,
            } => {
                self.scopes.push(HashSet::new());
                for r in resources {
                    match r {
                        Resource::Decl { name, init, .. } => {
                            self.expr(init);
                            self.declare(name);
                        }
                        Resource::Expr(e) => self.expr(e),
                    }
                }
                self.block(&body.stmts);
                self.scopes.pop();
                for c in catches {
                    self.scopes.push(HashSet::new());
                    self.declare(&c.name);
                    self.block(&c.body.stmts);
                    self.scopes.pop();
                }
                if let Some(f) = finally {
                    self.block(&f.stmts);
                }
            }
            StmtKind::Block(b) => self.block(&b.stmts),
            StmtKind::Labeled { body, .. } => self.stmt(body),
            StmtKind::Synchronized { lock, body } => {
                self.expr(lock);
                self.block(&body.stmts);
            }
            StmtKind::Assert { cond, message } => {
                self.expr(cond);
                if let Some(m) = message {
                    self.expr(m);
                }
            }
            StmtKind::Return(None) | StmtKind::Break(_) | StmtKind::Continue(_) | StmtKind::Empty => {}
        }
    }

    fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Name(n) => {
                if !self.name_resolves(n) {
                    self.error(e.span.start, format!("cannot find symbol: variable {n}"));
                }
            }
            ExprKind::Call { target, name, args, .. } => {
                args.iter().for_each(|a| self.expr(a));
                match target.as_deref() {
                    None => {
                        let ok = matches!(name.name.as_str(), "this" | "super") || self.method_resolves(&name.name, args.len());
                        if !ok {
                            self.error(name.span.start, format!("cannot find symbol: method {}({} args)", name.name, args.len()));
                        }
                    }
                    Some(Expr { kind: ExprKind::This, .. }) => {
                        if !self.method_resolves(&name.name, args.len()) {
                            self.error(name.span.start, format!("cannot find symbol: method {}({} args)", name.name, args.len()));
                        }
                    }
                    Some(Expr { kind: ExprKind::Super, .. }) => {}
                    Some(t) => self.expr(t),
                }
            }
            ExprKind::Lambda { params, body } => {
                self.scopes.push(HashSet::new());
                for p in params {
                    self.declare(p.name());
                }
                match body {
                    LambdaBody::Expr(b) => self.expr(b),
                    LambdaBody::Block(b) => self.block(&b.stmts),
                }
                self.scopes.pop();
            }
            ExprKind::InstanceOf { expr, binding, .. } => {
                self.expr(expr);
                if let (Some(b), Some(s)) = (binding, self.scopes.last_mut()) {
                    s.insert(b.name.clone());
                }
            }
            ExprKind::New { args, .. } => args.iter().for_each(|a| self.expr(a)),
            ExprKind::MethodRef { target, .. } => self.expr(target),
            ExprKind::FieldAccess { target, .. } => {
                if !matches!(target.kind, ExprKind::This | ExprKind::Super) {
                    self.expr(target);
                }
            }
            _ => {
                let mut kids = Vec::new();
                for_each_child_expr(e, &mut |c| {
                    if let Child::Expr(x) = c {
                        kids.push(x);
                    }
                });
                for k in kids {
                    self.expr(k);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diags(src: &str) -> Vec<String> {
        let mut p = Program::default();
        p.add_source("A.java".into(), src).unwrap();
        check(&p).into_iter().map(|d| d.message).collect()
    }

    #[test]
    fn clean_class() {
        let src = "import java.util.*;\nclass A {\n  private int n = 1;\n  static final int K = 2;\n  int f(int x) {\n    List<Integer> xs = new ArrayList<>();\n    for (int i = 0; i < x; i++) { xs.add(i * K + n); }\n    xs.forEach(v -> System.out.println(v));\n    return g(xs.size());\n  }\n  int g(int y) { return Math.max(y, 0); }\n}\n";
        assert!(diags(src).is_empty(), "{:?}", diags(src));
    }

    #[test]
    fn reports_compile_errors() {
        let d = diags("class A {\n  int f() { int a = 1; return b; }\n  int g() { h(); int x = 0; int x = 1; }\n  void k() { return; k(); }\n}\n");
        assert!(d.contains(&"cannot find symbol: variable b".to_string()), "{d:?}");
        assert!(d.iter().any(|m| m.starts_with("cannot find symbol: method h")));
        assert!(d.contains(&"variable x is already defined".to_string()));
        assert!(d.contains(&"missing return statement".to_string()));
        assert!(d.contains(&"unreachable statement".to_string()));
    }

    #[test]
    fn deleted_declaration_is_a_compile_error() {
        assert!(!diags("class A { int f() { int t = 3; return t; } }").iter().any(|m| m.contains("variable")));
        assert!(diags("class A { int f() { return t; } }").iter().any(|m| m.contains("variable t")));
    }
}
