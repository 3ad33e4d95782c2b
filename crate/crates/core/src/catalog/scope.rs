//! Single-method name analysis: declarations, uses and assignments of
//! simple names. No resolution across files; shadowing is handled by the
//! rules refusing names declared more than once.

use std::collections::HashMap;

use crate::syntax::ast::*;
use crate::syntax::visit::{exprs_in_expr, exprs_in_stmts, stmts_in};

pub struct Scope<'a> {
    pub exprs: Vec<&'a Expr>,
    pub stmts: Vec<&'a Stmt>,
    /// Declaration sites per name (params, locals, loop and catch variables,
    /// lambda parameters, resources, pattern bindings).
    pub decls: HashMap<&'a str, usize>,
    /// Declared type per name, when declared exactly once with a type.
    pub types: HashMap<&'a str, (&'a TypeRef, bool)>,
}

impl<'a> Scope<'a> {
    pub fn of_method(m: &'a MethodDecl) -> Self {
        let body: &[Stmt] = m.body.as_ref().map_or(&[], |b| &b.stmts);
        let mut s = Scope {
            exprs: exprs_in_stmts(body),
            stmts: stmts_in(body),
            decls: HashMap::new(),
            types: HashMap::new(),
        };
        for p in &m.params {
            s.declare(&p.name.name, Some((&p.ty, p.varargs)));
        }
        let stmts = s.stmts.clone();
        for st in stmts {
            match &st.kind {
                StmtKind::LocalVar(d) | StmtKind::For { init: Some(ForInit::Decl(d)), .. } => {
                    for decl in &d.declarators {
                        let ty = (decl.dims == 0).then_some((&d.ty, false));
                        s.declare(&decl.name.name, ty);
                    }
                }
                StmtKind::ForEach { name, ty, .. } => s.declare(&name.name, Some((ty, false))),
                StmtKind::Try { resources, catches, .. } => {
                    for r in resources {
                        if let Resource::Decl { name, ty, .. } = r {
                            s.declare(&name.name, Some((ty, false)));
                        }
                    }
                    for c in catches {
                        s.declare(&c.name.name, None);
                    }
                }
                _ => {}
            }
        }
        let exprs = s.exprs.clone();
        for e in exprs {
            match &e.kind {
                ExprKind::Lambda { params, .. } => {
                    for p in params {
                        s.declare(&p.name().name, None);
                    }
                }
                ExprKind::InstanceOf { binding: Some(b), .. } => s.declare(&b.name, None),
                ExprKind::New { body: Some(cb), .. } => {
                    for mem in &cb.members {
                        match mem {
                            Member::Method(md) => md.params.iter().for_each(|p| s.declare(&p.name.name, None)),
                            Member::Field(fd) => fd.declarators.iter().for_each(|d| s.declare(&d.name.name, None)),
                            _ => {}
                        }
                    }
                }
                _ => {}
            }
        }
        s
    }

    fn declare(&mut self, name: &'a str, ty: Option<(&'a TypeRef, bool)>) {
        let n = self.decls.entry(name).or_insert(0);
        *n += 1;
        if *n == 1 {
            if let Some(t) = ty {
                self.types.insert(name, t);
            }
        } else {
            self.types.remove(name);
        }
    }

    pub fn decl_count(&self, name: &str) -> usize {
        self.decls.get(name).copied().unwrap_or(0)
    }

    pub fn is_local(&self, name: &str) -> bool {
        self.decl_count(name) > 0
    }

    /// Every `Name` expression referring to `name`.
    pub fn uses(&self, name: &str) -> Vec<&'a Expr> {
        self.exprs.iter().copied().filter(|e| e.as_name() == Some(name)).collect()
    }

    pub fn is_assigned(&self, name: &str) -> bool {
        self.exprs.iter().any(|e| assigns(e, name))
    }

    /// True if a call, object creation, assignment or increment occurs in an
    /// expression starting inside `range`.
    pub fn effects_within(&self, range: Span) -> bool {
        self.exprs
            .iter()
            .filter(|e| range.contains(&e.span))
            .any(|e| has_effect(e))
    }
}

/// Direct effect of this node alone (not its children).
pub fn has_effect(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Call { .. } | ExprKind::New { .. } | ExprKind::NewArray { .. } | ExprKind::Assign { .. } => true,
        ExprKind::Unary { op, .. } => op.is_mutation(),
        _ => false,
    }
}

/// Whether `e` itself writes the simple name `name`.
pub fn assigns(e: &Expr, name: &str) -> bool {
    match &e.kind {
        ExprKind::Assign { target, .. } => target.unparen().as_name() == Some(name),
        ExprKind::Unary { op, operand } if op.is_mutation() => operand.unparen().as_name() == Some(name),
        _ => false,
    }
}

/// Conservative side-effect-free whitelist: literals, names, `this`, field
/// access chains over those, class literals, casts and parentheses thereof.
pub fn is_pure_simple(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Literal(_) | ExprKind::Name(_) | ExprKind::This | ExprKind::ClassLit(_) => true,
        ExprKind::FieldAccess { target, .. } => is_pure_simple(target),
        ExprKind::Cast { expr, .. } | ExprKind::Paren(expr) => is_pure_simple(expr),
        _ => false,
    }
}

/// Simple names read by `e` (roots of field chains included).
pub fn names_in(e: &Expr) -> Vec<&str> {
    exprs_in_expr(e).into_iter().filter_map(Expr::as_name).collect()
}

pub fn contains_field_access(e: &Expr) -> bool {
    exprs_in_expr(e)
        .into_iter()
        .any(|x| matches!(x.kind, ExprKind::FieldAccess { .. }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_method;

    #[test]
    fn counts_declarations_and_uses() {
        let u = parse_method(
            "void f(int a) { int b = a; for (int i = 0; i < b; i++) { b += i; } Runnable r = () -> { int i = 2; }; try { } catch (Exception e) { } }",
        )
        .unwrap();
        let s = Scope::of_method(&u.decl);
        assert_eq!(s.decl_count("a"), 1);
        assert_eq!(s.decl_count("i"), 2);
        assert_eq!(s.decl_count("e"), 1);
        assert_eq!(s.uses("b").len(), 2);
        assert!(s.is_assigned("b"));
        assert!(!s.is_assigned("a"));
        assert_eq!(s.types["a"].0.name, "int");
        assert!(!s.types.contains_key("i"));
    }

    #[test]
    fn purity_whitelist() {
        let e = |t: &str| crate::syntax::parser::parse_expression(t).unwrap();
        assert!(is_pure_simple(&e("this.a.b")));
        assert!(is_pure_simple(&e("(String) x")));
        assert!(is_pure_simple(&e("42")));
        assert!(!is_pure_simple(&e("a.b()")));
        assert!(!is_pure_simple(&e("new X()")));
        assert!(!is_pure_simple(&e("a + 1")));
    }
}
