//! Read-only AST traversal.

use super::ast::*;

/// Every expression (pre-order) under a statement list, including those in
/// lambda bodies and anonymous class members.
pub fn exprs_in_stmts(stmts: &[Stmt]) -> Vec<&Expr> {
    let mut out = Vec::new();
    for s in stmts {
        collect_stmt(s, &mut out);
    }
    out
}

/// Every expression (pre-order) under `e`, including `e` itself.
pub fn exprs_in_expr(e: &Expr) -> Vec<&Expr> {
    let mut out = Vec::new();
    collect_expr(e, &mut out);
    out
}

/// Every statement (pre-order) nested in a statement list, including
/// statements inside lambda bodies and anonymous class members.
pub fn stmts_in(stmts: &[Stmt]) -> Vec<&Stmt> {
    fn go<'a>(s: &'a Stmt, out: &mut Vec<&'a Stmt>) {
        out.push(s);
        for_each_child_stmt_and_expr(s, &mut |c| match c {
            Child::Stmt(st) => go(st, out),
            Child::Expr(e) => go_expr(e, out),
        });
    }
    fn go_expr<'a>(e: &'a Expr, out: &mut Vec<&'a Stmt>) {
        for_each_child_expr(e, &mut |c| match c {
            Child::Stmt(st) => go(st, out),
            Child::Expr(x) => go_expr(x, out),
        });
    }
    let mut out = Vec::new();
    stmts.iter().for_each(|s| go(s, &mut out));
    out
}

fn collect_stmt<'a>(s: &'a Stmt, out: &mut Vec<&'a Expr>) {
    for_each_child_stmt_and_expr(s, &mut |child| match child {
        Child::Stmt(st) => collect_stmt(st, out),
        Child::Expr(e) => collect_expr(e, out),
    });
}

fn collect_expr<'a>(e: &'a Expr, out: &mut Vec<&'a Expr>) {
    out.push(e);
    for_each_child_expr(e, &mut |child| match child {
        Child::Stmt(st) => collect_stmt(st, out),
        Child::Expr(x) => collect_expr(x, out),
    });
}

/// A direct child of a statement or expression.
pub enum Child<'a> {
    Stmt(&'a Stmt),
    Expr(&'a Expr),
}

fn block_children<'a>(b: &'a Block, f: &mut dyn FnMut(Child<'a>)) {
    b.stmts.iter().for_each(|s| f(Child::Stmt(s)));
}

fn local_children<'a>(d: &'a LocalVarDecl, f: &mut dyn FnMut(Child<'a>)) {
    for decl in &d.declarators {
        if let Some(init) = &decl.init {
            f(Child::Expr(init));
        }
    }
}

fn member_children<'a>(m: &'a Member, f: &mut dyn FnMut(Child<'a>)) {
    match m {
        Member::Field(fd) => {
            for d in &fd.declarators {
                if let Some(init) = &d.init {
                    f(Child::Expr(init));
                }
            }
        }
        Member::Method(md) => {
            if let Some(b) = &md.body {
                block_children(b, f);
            }
        }
        Member::Initializer { body, .. } => block_children(body, f),
        Member::Type(t) => t.body.members.iter().for_each(|m| member_children(m, f)),
    }
}

/// Calls `f` on the direct children of `s` in source order.
pub fn for_each_child_stmt_and_expr<'a>(s: &'a Stmt, f: &mut dyn FnMut(Child<'a>)) {
    match &s.kind {
        StmtKind::LocalVar(d) => local_children(d, f),
        StmtKind::Expr(e) | StmtKind::Throw(e) => f(Child::Expr(e)),
        StmtKind::If {
            cond,
            then_branch,
            else_branch,
        } => {
            f(Child::Expr(cond));
            f(Child::Stmt(then_branch));
            if let Some(e) = else_branch {
                f(Child::Stmt(e));
            }
        }
        StmtKind::For {
            init,
            cond,
            update,
            body,
        } => {
            match init {
                Some(ForInit::Decl(d)) => local_children(d, f),
                Some(ForInit::Exprs(es)) => es.iter().for_each(|e| f(Child::Expr(e))),
                None => {}
            }
            if let Some(c) = cond {
                f(Child::Expr(c));
            }
            update.iter().for_each(|e| f(Child::Expr(e)));
            f(Child::Stmt(body));
        }
        StmtKind::ForEach { iterable, body, .. } => {
            f(Child::Expr(iterable));
            f(Child::Stmt(body));
        }
        StmtKind::While { cond, body } => {
            f(Child::Expr(cond));
            f(Child::Stmt(body));
        }
        StmtKind::Do { body, cond } => {
            f(Child::Stmt(body));
            f(Child::Expr(cond));
        }
        StmtKind::Switch { selector, cases } => {
            f(Child::Expr(selector));
            for c in cases {
                c.labels.iter().for_each(|e| f(Child::Expr(e)));
                c.body.iter().for_each(|s| f(Child::Stmt(s)));
            }
        }
        StmtKind::Try {
            resources,
            body,
            catches,
            finally,
        } => {
            for r in resources {
                match r {
                    Resource::Decl { init, .. } => f(Child::Expr(init)),
                    Resource::Expr(e) => f(Child::Expr(e)),
                }
            }
            block_children(body, f);
            for c in catches {
                block_children(&c.body, f);
            }
            if let Some(fin) = finally {
                block_children(fin, f);
            }
        }
        StmtKind::Return(e) => {
            if let Some(e) = e {
                f(Child::Expr(e));
            }
        }
        StmtKind::Break(_) | StmtKind::Continue(_) | StmtKind::Empty => {}
        StmtKind::Block(b) => block_children(b, f),
        StmtKind::Labeled { body, .. } => f(Child::Stmt(body)),
        StmtKind::Synchronized { lock, body } => {
            f(Child::Expr(lock));
            block_children(body, f);
        }
        StmtKind::Assert { cond, message } => {
            f(Child::Expr(cond));
            if let Some(m) = message {
                f(Child::Expr(m));
            }
        }
    }
}

/// Calls `f` on the direct children of `e` in source order.
pub fn for_each_child_expr<'a>(e: &'a Expr, f: &mut dyn FnMut(Child<'a>)) {
    match &e.kind {
        ExprKind::Literal(_) | ExprKind::Name(_) | ExprKind::This | ExprKind::Super | ExprKind::ClassLit(_) => {}
        ExprKind::FieldAccess { target, .. } => f(Child::Expr(target)),
        ExprKind::ArrayAccess { array, index } => {
            f(Child::Expr(array));
            f(Child::Expr(index));
        }
        ExprKind::Call { target, args, .. } => {
            if let Some(t) = target {
                f(Child::Expr(t));
            }
            args.iter().for_each(|a| f(Child::Expr(a)));
        }
        ExprKind::New { args, body, .. } => {
            args.iter().for_each(|a| f(Child::Expr(a)));
            if let Some(b) = body {
                b.members.iter().for_each(|m| member_children(m, f));
            }
        }
        ExprKind::NewArray { sizes, init, .. } => {
            sizes.iter().for_each(|a| f(Child::Expr(a)));
            if let Some(es) = init {
                es.iter().for_each(|a| f(Child::Expr(a)));
            }
        }
        ExprKind::ArrayInit(es) => es.iter().for_each(|a| f(Child::Expr(a))),
        ExprKind::Unary { operand, .. } => f(Child::Expr(operand)),
        ExprKind::Binary { lhs, rhs, .. } => {
            f(Child::Expr(lhs));
            f(Child::Expr(rhs));
        }
        ExprKind::Assign { target, value, .. } => {
            f(Child::Expr(target));
            f(Child::Expr(value));
        }
        ExprKind::Ternary {
            cond,
            then_expr,
            else_expr,
        } => {
            f(Child::Expr(cond));
            f(Child::Expr(then_expr));
            f(Child::Expr(else_expr));
        }
        ExprKind::InstanceOf { expr, .. } | ExprKind::Cast { expr, .. } => f(Child::Expr(expr)),
        ExprKind::Lambda { body, .. } => match body {
            LambdaBody::Expr(x) => f(Child::Expr(x)),
            LambdaBody::Block(b) => block_children(b, f),
        },
        ExprKind::MethodRef { target, .. } => f(Child::Expr(target)),
        ExprKind::Paren(inner) => f(Child::Expr(inner)),
    }
}

/// Every statement list in which statements are siblings: the given list,
/// nested blocks, switch-case bodies and lambda or anonymous-class bodies.
pub fn stmt_lists(stmts: &[Stmt]) -> Vec<&[Stmt]> {
    let mut out: Vec<&[Stmt]> = vec![stmts];
    for s in stmts_in(stmts) {
        match &s.kind {
            StmtKind::Block(b) => out.push(&b.stmts),
            StmtKind::Try {
                body,
                catches,
                finally,
                ..
            } => {
                out.push(&body.stmts);
                catches.iter().for_each(|c| out.push(&c.body.stmts));
                if let Some(f) = finally {
                    out.push(&f.stmts);
                }
            }
            StmtKind::Synchronized { body, .. } => out.push(&body.stmts),
            StmtKind::Switch { cases, .. } => cases.iter().for_each(|c| out.push(&c.body)),
            _ => {}
        }
        for_each_child_stmt_and_expr(s, &mut |c| {
            if let Child::Expr(e) = c {
                for x in exprs_in_expr(e) {
                    match &x.kind {
                        ExprKind::Lambda {
                            body: LambdaBody::Block(b),
                            ..
                        } => out.push(&b.stmts),
                        ExprKind::New { body: Some(cb), .. } => {
                            for m in &cb.members {
                                if let Member::Method(MethodDecl { body: Some(b), .. }) = m {
                                    out.push(&b.stmts);
                                }
                            }
                        }
                        _ => {}
                    }
                }
            }
        });
    }
    let mut seen = std::collections::HashSet::new();
    out.retain(|l| seen.insert((l.as_ptr(), l.len())));
    out
}
