//! Pattern matchers for the executable taxonomy rules. Each matcher only
//! proposes rewrites; applying them is `catalog::apply`.

use std::collections::{BTreeMap, HashSet};

use super::edit::{column, compose, dedent_tail, line_start, removal_range};
use super::scope::{assigns, contains_field_access, is_pure_simple, names_in, Scope};
use super::taxonomy::RuleId;
use super::{CatalogConfig, Rewrite};
use crate::syntax::ast::*;
use crate::syntax::lexer::{is_keyword, significant_texts, tokenize, TokenKind};
use crate::syntax::parser::parse_expression;
use crate::syntax::printer::type_text;
use crate::syntax::visit::{exprs_in_stmts, for_each_child_expr, stmt_lists, stmts_in, Child};
use crate::syntax::MethodUnit;

struct Ctx<'a> {
    unit: &'a MethodUnit,
    src: &'a str,
    scope: Scope<'a>,
    lists: Vec<&'a [Stmt]>,
    out: Vec<Rewrite>,
}

impl<'a> Ctx<'a> {
    fn text(&self, span: Span) -> &'a str {
        span.text(self.src)
    }

    fn push(&mut self, rule: &str, span: Span, node_span: Span, replacement: String, evidence: String) {
        self.out.push(Rewrite {
            rule: RuleId::of(rule),
            span,
            node_span,
            original: self.text(span).to_string(),
            replacement,
            evidence,
        });
    }

    fn remove(&mut self, rule: &str, node_span: Span, evidence: String) {
        let span = removal_range(self.src, node_span);
        self.push(rule, span, node_span, String::new(), evidence);
    }
}

pub(super) fn collect(unit: &MethodUnit, cfg: &CatalogConfig) -> Vec<Rewrite> {
    let mut ctx = Ctx {
        unit,
        src: &unit.source,
        scope: Scope::of_method(&unit.decl),
        lists: stmt_lists(unit.body_stmts()),
        out: Vec::new(),
    };
    simplify_return(&mut ctx);
    bool_simplify(&mut ctx);
    foreach(&mut ctx);
    merge_if(&mut ctx);
    ternary(&mut ctx);
    merge_catch(&mut ctx);
    remove_unneeded(&mut ctx);
    unused_imports(&mut ctx);
    dead_code(&mut ctx);
    inline_variable(&mut ctx);
    diamond(&mut ctx);
    merge_imports(&mut ctx, cfg.merge_imports_threshold);
    try_with_resources(&mut ctx);
    let mut out = ctx.out;
    out.sort_by_key(|r| (r.span.start, r.rule, r.span.end));
    out
}

fn single_declarator(s: &Stmt) -> Option<(&LocalVarDecl, &Declarator)> {
    match &s.kind {
        StmtKind::LocalVar(d) if d.declarators.len() == 1 && d.declarators[0].dims == 0 => Some((d, &d.declarators[0])),
        _ => None,
    }
}

/// A block holding exactly one statement stands for that statement.
fn single(s: &Stmt) -> &Stmt {
    match &s.kind {
        StmtKind::Block(b) if b.stmts.len() == 1 => &b.stmts[0],
        _ => s,
    }
}

fn paren_below(src: &str, e: &Expr, min_prec: u8) -> String {
    let t = e.span.text(src);
    if e.precedence() < min_prec {
        format!("({t})")
    } else {
        t.to_string()
    }
}

fn is_int_literal(src: &str, e: &Expr, value: &str) -> bool {
    matches!(e.kind, ExprKind::Literal(LitKind::Int)) && e.span.text(src) == value
}

/// Offset just past the `)` that closes a statement header before `body_start`.
fn header_close(src: &str, body_start: usize) -> usize {
    src[..body_start].rfind(')').map_or(body_start, |i| i + 1)
}

// ---- T1.1 ---------------------------------------------------------------

fn simplify_return(ctx: &mut Ctx) {
    let ret_ty = ctx.unit.decl.return_type.as_ref().map(|t| ctx.text(t.span));
    for list in ctx.lists.clone() {
        for pair in list.windows(2) {
            let Some((d, decl)) = single_declarator(&pair[0]) else { continue };
            let Some(init) = &decl.init else { continue };
            let StmtKind::Return(Some(ret)) = &pair[1].kind else { continue };
            let x = &decl.name.name;
            if ret.as_name() != Some(x.as_str())
                || ctx.scope.decl_count(x) != 1
                || ctx.scope.uses(x).len() != 1
                || !d.modifiers.annotations.is_empty()
                || matches!(init.kind, ExprKind::ArrayInit(_) | ExprKind::Lambda { .. } | ExprKind::MethodRef { .. })
            {
                continue;
            }
            // A primitive temporary may convert the value before an
            // `Object`-like return type boxes it.
            let decl_ty = ctx.text(d.ty.span);
            if d.ty.is_primitive() && ret_ty.is_none_or(|r| significant_texts(r) != significant_texts(decl_ty)) {
                continue;
            }
            let span = pair[0].span.to(pair[1].span);
            let replacement = format!("return {};", ctx.text(init.span));
            ctx.push("T1.1", span, span, replacement, format!("`{x}` is returned immediately and used nowhere else"));
        }
    }
}

// ---- T1.2 ---------------------------------------------------------------

fn negate(src: &str, e: &Expr) -> String {
    let inner = e.unparen();
    if let ExprKind::Unary { op: UnaryOp::Not, operand } = &inner.kind {
        return operand.span.text(src).to_string();
    }
    if let Some(t) = bool_fixpoint(src, inner) {
        if let Ok(simpler) = parse_expression(&t) {
            return negate(&t, &simpler);
        }
    }
    format!("!{}", paren_below(src, e, prec::UNARY))
}

fn bool_step(src: &str, e: &Expr) -> Option<String> {
    let t = |x: &Expr| x.span.text(src).to_string();
    match &e.kind {
        ExprKind::Binary { op: BinaryOp::Eq, lhs, rhs } => {
            if lhs.is_bool_literal(true) {
                Some(t(rhs))
            } else if lhs.is_bool_literal(false) {
                Some(negate(src, rhs))
            } else if rhs.is_bool_literal(true) {
                Some(t(lhs))
            } else if rhs.is_bool_literal(false) {
                Some(negate(src, lhs))
            } else {
                None
            }
        }
        ExprKind::Unary { op: UnaryOp::Not, operand } => match &operand.unparen().kind {
            ExprKind::Unary { op: UnaryOp::Not, operand: inner } => Some(t(inner)),
            _ => None,
        },
        ExprKind::Ternary {
            cond,
            then_expr,
            else_expr,
        } => {
            if then_expr.is_bool_literal(true) && else_expr.is_bool_literal(false) {
                Some(t(cond))
            } else if then_expr.is_bool_literal(false) && else_expr.is_bool_literal(true) {
                Some(negate(src, cond))
            } else {
                None
            }
        }
        _ => None,
    }
}

/// Applies the boolean rewrite set at the root of `e` until none matches.
pub(super) fn bool_fixpoint(src: &str, e: &Expr) -> Option<String> {
    let mut text = bool_step(src, e)?;
    for _ in 0..64 {
        let Ok(next) = parse_expression(&text) else { break };
        match bool_step(&text, &next) {
            Some(t) => text = t,
            None => break,
        }
    }
    Some(text)
}

fn bool_simplify(ctx: &mut Ctx) {
    let mut taken: Vec<Span> = Vec::new();
    for e in ctx.scope.exprs.clone() {
        if taken.iter().any(|s| s.contains(&e.span)) {
            continue;
        }
        if let Some(text) = bool_fixpoint(ctx.src, e) {
            taken.push(e.span);
            ctx.push("T1.2", e.span, e.span, text, "boolean literal comparison or double negation".into());
        }
    }
}

// ---- T1.3 ---------------------------------------------------------------

const INDEXED_LISTS: &[&str] = &["List", "ArrayList", "LinkedList", "Vector", "CopyOnWriteArrayList"];

fn foreach(ctx: &mut Ctx) {
    for st in ctx.scope.stmts.clone() {
        if let Some((replacement, evidence)) = foreach_one(ctx, st) {
            ctx.push("T1.3", st.span, st.span, replacement, evidence);
        }
    }
}

fn foreach_one(ctx: &Ctx, st: &Stmt) -> Option<(String, String)> {
    let src = ctx.src;
    let StmtKind::For {
        init: Some(ForInit::Decl(d)),
        cond: Some(cond),
        update,
        body,
    } = &st.kind
    else {
        return None;
    };
    let (_, decl) = single_declarator_of(d)?;
    if d.ty.name != "int" || d.ty.dims != 0 || !is_int_literal(src, decl.init.as_ref()?, "0") {
        return None;
    }
    let i = decl.name.name.as_str();
    let ExprKind::Binary {
        op: BinaryOp::Lt,
        lhs,
        rhs,
    } = &cond.kind
    else {
        return None;
    };
    if lhs.as_name() != Some(i) {
        return None;
    }
    let (is_list, x) = match &rhs.kind {
        ExprKind::Call {
            target: Some(t),
            name,
            args,
            ..
        } if name.name == "size" && args.is_empty() => (true, t.as_name()?),
        ExprKind::FieldAccess { target, name } if name.name == "length" => (false, target.as_name()?),
        _ => return None,
    };
    let [upd] = update.as_slice() else { return None };
    let increments = match &upd.kind {
        ExprKind::Unary { op, operand } => {
            matches!(op, UnaryOp::PostInc | UnaryOp::PreInc) && operand.as_name() == Some(i)
        }
        ExprKind::Assign {
            op: Some(BinaryOp::Add),
            target,
            value,
        } => target.as_name() == Some(i) && is_int_literal(src, value, "1"),
        _ => false,
    };
    if !increments {
        return None;
    }

    let body_exprs = exprs_in_stmts(std::slice::from_ref(body));
    let accesses: Vec<&Expr> = body_exprs
        .iter()
        .copied()
        .filter(|e| match &e.kind {
            ExprKind::Call {
                target: Some(t),
                name,
                args,
                type_args,
            } if is_list => {
                name.name == "get" && type_args.is_empty() && t.as_name() == Some(x) && args.len() == 1 && args[0].as_name() == Some(i)
            }
            ExprKind::ArrayAccess { array, index } if !is_list => array.as_name() == Some(x) && index.as_name() == Some(i),
            _ => false,
        })
        .collect();
    let count = |n: &str| body_exprs.iter().filter(|e| e.as_name() == Some(n)).count();
    if accesses.is_empty() || count(i) != accesses.len() || count(x) != accesses.len() {
        return None;
    }
    // Array elements must only be read.
    let written = body_exprs.iter().any(|e| match &e.kind {
        ExprKind::Assign { target, .. } => accesses.iter().any(|a| a.span == target.unparen().span),
        ExprKind::Unary { op, operand } if op.is_mutation() => accesses.iter().any(|a| a.span == operand.unparen().span),
        _ => false,
    });
    if written {
        return None;
    }

    let mut edits: Vec<(Span, String)> = Vec::new();
    let first_decl = match &body.kind {
        StmtKind::Block(b) => b.stmts.first().and_then(|s| {
            let (fd, fdecl) = single_declarator(s)?;
            let init = fdecl.init.as_ref()?;
            (accesses.iter().any(|a| a.span == init.span) && ctx.scope.decl_count(&fdecl.name.name) == 1)
                .then_some((s, fd, fdecl))
        }),
        _ => None,
    };
    let (elem_ty, var) = if let Some((s, fd, fdecl)) = first_decl {
        edits.push((removal_range(src, s.span), String::new()));
        let mut ty = String::new();
        for k in &fd.modifiers.keywords {
            ty.push_str(k);
            ty.push(' ');
        }
        ty.push_str(&type_text(ctx.text(fd.ty.span)));
        (ty, fdecl.name.name.clone())
    } else {
        let &(ty, varargs) = ctx.scope.types.get(x)?;
        let elem = if is_list {
            if !INDEXED_LISTS.contains(&ty.simple_name()) || ty.dims != 0 {
                return None;
            }
            match ty.args.as_deref() {
                Some([TypeArg::Type(t)]) => type_text(ctx.text(t.span)),
                _ => return None,
            }
        } else if varargs {
            type_text(ctx.text(ty.span))
        } else if ty.dims >= 1 {
            let t = type_text(ctx.text(ty.span));
            t.strip_suffix("[]")?.to_string()
        } else {
            return None;
        };
        (elem, fresh_name(src, x))
    };
    for a in &accesses {
        if !edits.iter().any(|(s, _)| s.contains(&a.span)) {
            edits.push((a.span, var.clone()));
        }
    }
    let gap_start = header_close(src, body.span.start);
    let rest = compose(src, Span::new(gap_start, body.span.end), &edits);
    let replacement = format!("for ({elem_ty} {var} : {x}){rest}");
    Some((replacement, format!("index `{i}` only selects elements of `{x}`")))
}

fn single_declarator_of(d: &LocalVarDecl) -> Option<(&LocalVarDecl, &Declarator)> {
    (d.declarators.len() == 1 && d.declarators[0].dims == 0).then(|| (d, &d.declarators[0]))
}

fn fresh_name(src: &str, collection: &str) -> String {
    let used: HashSet<&str> = tokenize(src)
        .into_iter()
        .filter(|t| t.kind == TokenKind::Identifier)
        .map(|t| t.text)
        .collect();
    let base = match collection.strip_suffix('s') {
        Some(b) if !b.is_empty() && !b.ends_with('s') && !is_keyword(b) => b.to_string(),
        _ => "item".to_string(),
    };
    let mut name = base.clone();
    let mut n = 2;
    while used.contains(name.as_str()) {
        name = format!("{base}{n}");
        n += 1;
    }
    name
}

// ---- T1.4 ---------------------------------------------------------------

fn merge_if(ctx: &mut Ctx) {
    let src = ctx.src;
    for st in ctx.scope.stmts.clone() {
        let StmtKind::If {
            cond: a,
            then_branch,
            else_branch: None,
        } = &st.kind
        else {
            continue;
        };
        let inner = match &then_branch.kind {
            StmtKind::If { .. } => &**then_branch,
            StmtKind::Block(b) if b.stmts.len() == 1 => {
                let s = &b.stmts[0];
                let before = &src[b.span.start + 1..s.span.start];
                let after = &src[s.span.end..b.span.end - 1];
                if !before.trim().is_empty() || !after.trim().is_empty() {
                    continue;
                }
                s
            }
            _ => continue,
        };
        let StmtKind::If {
            cond: b,
            then_branch: body,
            else_branch: None,
        } = &inner.kind
        else {
            continue;
        };
        let on_own_line = line_start(src, inner.span.start) != line_start(src, st.span.start);
        let shift = if on_own_line {
            column(src, inner.span.start).saturating_sub(column(src, st.span.start))
        } else {
            0
        };
        let close = header_close(src, body.span.start);
        let tail = dedent_tail(&src[close..body.span.end], shift);
        let replacement = format!(
            "if ({} && {}){tail}",
            paren_below(src, a, BinaryOp::And.precedence()),
            paren_below(src, b, BinaryOp::And.precedence() + 1)
        );
        ctx.push("T1.4", st.span, st.span, replacement, "nested ifs without else".into());
    }
}

// ---- T1.5 ---------------------------------------------------------------

fn ternary_text(src: &str, c: &Expr, a: &Expr, b: &Expr) -> String {
    format!(
        "{} ? {} : {}",
        paren_below(src, c, prec::TERNARY + 1),
        a.span.text(src),
        paren_below(src, b, prec::ASSIGN + 1)
    )
}

fn ternary(ctx: &mut Ctx) {
    let src = ctx.src;
    let non_void = !ctx.unit.decl.is_void();
    for st in ctx.scope.stmts.clone() {
        let StmtKind::If {
            cond: c,
            then_branch,
            else_branch: Some(else_branch),
        } = &st.kind
        else {
            continue;
        };
        match (&single(then_branch).kind, &single(else_branch).kind) {
            (StmtKind::Expr(x), StmtKind::Expr(y)) => {
                let (
                    ExprKind::Assign {
                        op: op1,
                        target: t1,
                        value: a,
                    },
                    ExprKind::Assign {
                        op: op2,
                        target: t2,
                        value: b,
                    },
                ) = (&x.kind, &y.kind)
                else {
                    continue;
                };
                let simple_target = match &t1.kind {
                    ExprKind::Name(_) => true,
                    ExprKind::FieldAccess { target, .. } => matches!(target.kind, ExprKind::This),
                    _ => false,
                };
                if op1 != op2 || !simple_target || significant_texts(ctx.text(t1.span)) != significant_texts(ctx.text(t2.span)) {
                    continue;
                }
                if matches!(a.kind, ExprKind::ArrayInit(_)) || matches!(b.kind, ExprKind::ArrayInit(_)) {
                    continue;
                }
                let op = op1.map_or("=".to_string(), |o| format!("{}=", o.symbol()));
                let replacement = format!("{} {op} {};", ctx.text(t1.span), ternary_text(src, c, a, b));
                ctx.push("T1.5", st.span, st.span, replacement, "both branches assign the same target".into());
            }
            (StmtKind::Return(Some(a)), StmtKind::Return(Some(b))) if non_void => {
                let replacement = format!("return {};", ternary_text(src, c, a, b));
                ctx.push("T1.5", st.span, st.span, replacement, "both branches return".into());
            }
            _ => {}
        }
    }
    if !non_void {
        return;
    }
    for list in ctx.lists.clone() {
        for pair in list.windows(2) {
            let StmtKind::If {
                cond: c,
                then_branch,
                else_branch: None,
            } = &pair[0].kind
            else {
                continue;
            };
            let (StmtKind::Return(Some(a)), StmtKind::Return(Some(b))) = (&single(then_branch).kind, &pair[1].kind) else {
                continue;
            };
            let span = pair[0].span.to(pair[1].span);
            let replacement = format!("return {};", ternary_text(src, c, a, b));
            ctx.push("T1.5", span, span, replacement, "guarded return followed by a return".into());
        }
    }
}

// ---- T1.9 ---------------------------------------------------------------

/// Parent links among common JDK exception types, by simple name.
const EXCEPTION_PARENTS: &[(&str, &str)] = &[
    ("Exception", "Throwable"),
    ("Error", "Throwable"),
    ("RuntimeException", "Exception"),
    ("IOException", "Exception"),
    ("FileNotFoundException", "IOException"),
    ("EOFException", "IOException"),
    ("MalformedURLException", "IOException"),
    ("UnsupportedEncodingException", "IOException"),
    ("UncheckedIOException", "RuntimeException"),
    ("IllegalArgumentException", "RuntimeException"),
    ("NumberFormatException", "IllegalArgumentException"),
    ("IllegalStateException", "RuntimeException"),
    ("NullPointerException", "RuntimeException"),
    ("ArithmeticException", "RuntimeException"),
    ("ClassCastException", "RuntimeException"),
    ("IndexOutOfBoundsException", "RuntimeException"),
    ("ArrayIndexOutOfBoundsException", "IndexOutOfBoundsException"),
    ("StringIndexOutOfBoundsException", "IndexOutOfBoundsException"),
    ("UnsupportedOperationException", "RuntimeException"),
    ("ConcurrentModificationException", "RuntimeException"),
    ("NoSuchElementException", "RuntimeException"),
    ("InterruptedException", "Exception"),
    ("CloneNotSupportedException", "Exception"),
    ("TimeoutException", "Exception"),
    ("ExecutionException", "Exception"),
    ("SQLException", "Exception"),
    ("ParseException", "Exception"),
    ("URISyntaxException", "Exception"),
    ("ReflectiveOperationException", "Exception"),
    ("ClassNotFoundException", "ReflectiveOperationException"),
    ("NoSuchMethodException", "ReflectiveOperationException"),
    ("NoSuchFieldException", "ReflectiveOperationException"),
    ("IllegalAccessException", "ReflectiveOperationException"),
    ("InstantiationException", "ReflectiveOperationException"),
    ("InvocationTargetException", "ReflectiveOperationException"),
    ("AssertionError", "Error"),
    ("VirtualMachineError", "Error"),
    ("OutOfMemoryError", "VirtualMachineError"),
    ("StackOverflowError", "VirtualMachineError"),
];

fn ancestors(name: &str) -> Vec<&str> {
    let mut out = vec![name];
    let mut cur = name;
    while let Some(&(_, p)) = EXCEPTION_PARENTS.iter().find(|(c, _)| *c == cur) {
        out.push(p);
        cur = p;
    }
    out
}

fn related(a: &str, b: &str) -> bool {
    ancestors(a).contains(&b) || ancestors(b).contains(&a)
}

fn merge_catch(ctx: &mut Ctx) {
    for st in ctx.scope.stmts.clone() {
        let StmtKind::Try { catches, .. } = &st.kind else { continue };
        for pair in catches.windows(2) {
            let (c1, c2) = (&pair[0], &pair[1]);
            if c1.name.name != c2.name.name
                || c1.modifiers.keywords != c2.modifiers.keywords
                || !c1.modifiers.annotations.is_empty()
                || !c2.modifiers.annotations.is_empty()
                || significant_texts(ctx.text(c1.body.span)) != significant_texts(ctx.text(c2.body.span))
            {
                continue;
            }
            let types: Vec<&TypeRef> = c1.types.iter().chain(&c2.types).collect();
            let clash = types.iter().enumerate().any(|(k, a)| {
                types[k + 1..]
                    .iter()
                    .any(|b| related(a.simple_name(), b.simple_name()))
            });
            let name = &c1.name.name;
            let reassigned = ctx
                .scope
                .exprs
                .iter()
                .any(|e| (c1.body.span.contains(&e.span) || c2.body.span.contains(&e.span)) && assigns(e, name));
            if clash || reassigned {
                continue;
            }
            let mut mods = String::new();
            for k in &c1.modifiers.keywords {
                mods.push_str(k);
                mods.push(' ');
            }
            let alts: Vec<String> = types.iter().map(|t| type_text(ctx.text(t.span))).collect();
            let replacement = format!("catch ({mods}{} {name}) {}", alts.join(" | "), ctx.text(c1.body.span));
            let span = c1.span.to(c2.span);
            ctx.push("T1.9", span, span, replacement, "adjacent handlers are token-identical".into());
        }
    }
}

// ---- T3.1 ---------------------------------------------------------------

fn remove_unneeded(ctx: &mut Ctx) {
    for list in ctx.lists.clone() {
        for s in list {
            if matches!(s.kind, StmtKind::Empty) {
                ctx.remove("T3.1", s.span, "empty statement".into());
                continue;
            }
            let Some((_, decl)) = single_declarator(s) else { continue };
            let x = &decl.name.name;
            let pure = decl
                .init
                .as_ref()
                .is_none_or(|e| is_pure_simple(e) || is_negated_literal(e));
            if pure && ctx.scope.decl_count(x) == 1 && ctx.scope.uses(x).is_empty() {
                ctx.remove("T3.1", s.span, format!("`{x}` is never used and its initializer has no effect"));
            }
        }
    }
}

fn is_negated_literal(e: &Expr) -> bool {
    matches!(&e.kind, ExprKind::Unary { op: UnaryOp::Neg | UnaryOp::Plus, operand } if matches!(operand.kind, ExprKind::Literal(_)))
}

// ---- T3.2 ---------------------------------------------------------------

fn unused_imports(ctx: &mut Ctx) {
    let imports = &ctx.unit.imports;
    if imports.is_empty() {
        return;
    }
    let idents: HashSet<&str> = tokenize(ctx.src)
        .into_iter()
        .filter(|t| t.kind == TokenKind::Identifier && !imports.iter().any(|i| i.span.start <= t.offset && t.offset < i.span.end))
        .map(|t| t.text)
        .collect();
    for imp in imports {
        let Some(name) = imp.simple_name() else { continue };
        if !idents.contains(name) {
            ctx.remove("T3.2", imp.span, format!("`{name}` is never referenced"));
        }
    }
}

// ---- T3.3 ---------------------------------------------------------------

fn dead_code(ctx: &mut Ctx) {
    let src = ctx.src;
    for list in ctx.lists.clone() {
        if let Some(k) = list.iter().position(|s| {
            matches!(
                s.kind,
                StmtKind::Return(_) | StmtKind::Throw(_) | StmtKind::Break(_) | StmtKind::Continue(_)
            )
        }) {
            if k + 1 < list.len() {
                let first = &list[k + 1];
                let last = &list[list.len() - 1];
                let span = Span::new(
                    removal_range(src, first.span).start,
                    removal_range(src, last.span).end,
                );
                ctx.push("T3.3", span, first.span.to(last.span), String::new(), "statements after an unconditional jump".into());
            }
        }
        for s in list {
            let StmtKind::If {
                cond,
                else_branch,
                ..
            } = &s.kind
            else {
                continue;
            };
            if !cond.is_bool_literal(false) {
                continue;
            }
            match else_branch.as_deref() {
                None => ctx.remove("T3.3", s.span, "branch guarded by `false`".into()),
                Some(Stmt {
                    kind: StmtKind::Block(b),
                    ..
                }) => {
                    if b.stmts.is_empty() {
                        ctx.remove("T3.3", s.span, "branch guarded by `false`".into());
                        continue;
                    }
                    let hoisted_clash = b.stmts.iter().any(|st| match &st.kind {
                        StmtKind::LocalVar(d) => d.declarators.iter().any(|x| ctx.scope.decl_count(&x.name.name) != 1),
                        _ => false,
                    });
                    if hoisted_clash {
                        continue;
                    }
                    let first = &b.stmts[0];
                    let last = &b.stmts[b.stmts.len() - 1];
                    let shift = if line_start(src, first.span.start) != line_start(src, s.span.start) {
                        column(src, first.span.start).saturating_sub(column(src, s.span.start))
                    } else {
                        0
                    };
                    let text = dedent_tail(&src[first.span.start..last.span.end], shift);
                    ctx.push("T3.3", s.span, s.span, text, "then-branch guarded by `false`".into());
                }
                Some(other) => {
                    ctx.push("T3.3", s.span, s.span, ctx.text(other.span).to_string(), "then-branch guarded by `false`".into());
                }
            }
        }
    }
}

// ---- T5.1 ---------------------------------------------------------------

fn literal_type(k: LitKind) -> Option<&'static str> {
    Some(match k {
        LitKind::Int => "int",
        LitKind::Long => "long",
        LitKind::Float => "float",
        LitKind::Double => "double",
        LitKind::Char => "char",
        LitKind::String | LitKind::TextBlock => "String",
        LitKind::True | LitKind::False => "boolean",
        LitKind::Null => return None,
    })
}

/// Whether substituting `init` for a variable of type `decl_ty` keeps the
/// static type at the use site.
fn same_static_type(ctx: &Ctx, init: &Expr, decl_ty: &str) -> bool {
    if decl_ty == "var" {
        return !matches!(init.unparen().kind, ExprKind::Literal(LitKind::Null));
    }
    match &init.kind {
        ExprKind::Paren(inner) => same_static_type(ctx, inner, decl_ty),
        ExprKind::Literal(k) => literal_type(*k) == Some(decl_ty),
        ExprKind::Unary { operand, .. } => match operand.kind {
            ExprKind::Literal(k) => literal_type(k) == Some(decl_ty),
            _ => false,
        },
        ExprKind::Name(n) => match ctx.scope.types.get(n.as_str()) {
            Some((t, false)) => type_text(ctx.text(t.span)) == decl_ty,
            Some((_, true)) => false,
            None => !ctx.scope.is_local(n),
        },
        ExprKind::Cast { ty, .. } => type_text(ctx.text(ty.span)) == decl_ty,
        ExprKind::FieldAccess { .. } | ExprKind::This | ExprKind::ClassLit(_) => true,
        _ => false,
    }
}

fn parent_of<'a>(exprs: &[&'a Expr], child: Span) -> Option<&'a Expr> {
    exprs.iter().copied().find(|p| {
        let mut hit = false;
        for_each_child_expr(p, &mut |c| {
            if let Child::Expr(x) = c {
                hit |= x.span == child;
            }
        });
        hit
    })
}

fn needs_parens(init: &Expr, parent: Option<&Expr>, use_span: Span) -> bool {
    let p = init.precedence();
    if p >= prec::POSTFIX {
        return false;
    }
    let Some(parent) = parent else { return false };
    match &parent.kind {
        ExprKind::Call { args, .. } | ExprKind::New { args, .. } => !args.iter().any(|a| a.span == use_span),
        ExprKind::ArrayInit(_) | ExprKind::Paren(_) | ExprKind::Lambda { .. } => false,
        ExprKind::Assign { value, .. } => value.span != use_span,
        ExprKind::ArrayAccess { index, .. } => index.span != use_span,
        ExprKind::Ternary { .. } => p <= prec::TERNARY,
        ExprKind::Binary { op, .. } => p <= op.precedence(),
        _ => true,
    }
}

fn inline_variable(ctx: &mut Ctx) {
    let src = ctx.src;
    for list in ctx.lists.clone() {
        for (d_idx, ds) in list.iter().enumerate() {
            let Some((d, decl)) = single_declarator(ds) else { continue };
            let Some(init) = &decl.init else { continue };
            let x = &decl.name.name;
            if !(is_pure_simple(init) || is_negated_literal(init))
                || ctx.scope.decl_count(x) != 1
                || ctx.scope.is_assigned(x)
                || !d.modifiers.annotations.is_empty()
            {
                continue;
            }
            let uses = ctx.scope.uses(x);
            let [use_expr] = uses.as_slice() else { continue };
            let Some(k) = list[d_idx + 1..]
                .iter()
                .position(|s| s.span.contains(&use_expr.span))
                .map(|p| p + d_idx + 1)
            else {
                continue;
            };
            if !same_static_type(ctx, init, &type_text(ctx.text(d.ty.span))) {
                continue;
            }
            let roots = names_in(init);
            if roots.iter().any(|r| ctx.scope.is_assigned(r)) {
                continue;
            }
            let literal_only = matches!(init.unparen().kind, ExprKind::Literal(_)) || is_negated_literal(init);
            let volatile = contains_field_access(init)
                || roots.iter().any(|r| !ctx.scope.is_local(r))
                || crate::syntax::visit::exprs_in_expr(init).iter().any(|e| matches!(e.kind, ExprKind::This));
            if volatile && !literal_only {
                if ctx.scope.effects_within(Span::new(ds.span.end, use_expr.span.start)) {
                    continue;
                }
                let target = &list[k];
                let deferred = stmts_in(std::slice::from_ref(target)).into_iter().any(|s| match &s.kind {
                    StmtKind::For { body, cond, update, .. } => {
                        body.span.contains(&use_expr.span)
                            || cond.as_ref().is_some_and(|c| c.span.contains(&use_expr.span))
                            || update.iter().any(|u| u.span.contains(&use_expr.span))
                    }
                    StmtKind::While { .. } | StmtKind::Do { .. } => s.span.contains(&use_expr.span),
                    StmtKind::ForEach { body, .. } => body.span.contains(&use_expr.span),
                    _ => false,
                }) || ctx.scope.exprs.iter().any(|e| {
                    matches!(e.kind, ExprKind::Lambda { .. } | ExprKind::New { body: Some(_), .. })
                        && e.span.contains(&use_expr.span)
                });
                if deferred {
                    continue;
                }
            }
            let init_text = ctx.text(init.span);
            let parent = parent_of(&ctx.scope.exprs, use_expr.span);
            let subst = if needs_parens(init, parent, use_expr.span) {
                format!("({init_text})")
            } else {
                init_text.to_string()
            };
            let removal = removal_range(src, ds.span);
            let span = Span::new(removal.start, list[k].span.end);
            let replacement = compose(src, span, &[(removal, String::new()), (use_expr.span, subst)]);
            let node_span = ds.span.to(list[k].span);
            ctx.push("T5.1", span, node_span, replacement, format!("`{x}` is used once and its initializer has no effect"));
        }
    }
}

// ---- T7.1 ---------------------------------------------------------------

fn diamond(ctx: &mut Ctx) {
    let mut sites: Vec<(&TypeRef, &Expr)> = Vec::new();
    for st in ctx.scope.stmts.clone() {
        match &st.kind {
            StmtKind::LocalVar(d) => {
                for decl in &d.declarators {
                    if let (Some(init), 0) = (&decl.init, decl.dims) {
                        sites.push((&d.ty, init));
                    }
                }
            }
            StmtKind::Return(Some(e)) => {
                if let Some(rt) = &ctx.unit.decl.return_type {
                    sites.push((rt, e));
                }
            }
            _ => {}
        }
    }
    for (declared, init) in sites {
        let ExprKind::New { ty, body: None, .. } = &init.kind else { continue };
        let (Some(dargs), Some(nargs)) = (&declared.args_span, &ty.args_span) else { continue };
        if ty.args.as_ref().is_none_or(|a| a.is_empty()) || declared.args.as_ref().is_none_or(|a| a.is_empty()) {
            continue;
        }
        if significant_texts(ctx.text(*dargs)) != significant_texts(ctx.text(*nargs)) {
            continue;
        }
        ctx.push("T7.1", *nargs, ty.span, "<>".into(), "type arguments repeat the declared type".into());
    }
}

// ---- T7.4 ---------------------------------------------------------------

fn merge_imports(ctx: &mut Ctx, threshold: usize) {
    let src = ctx.src;
    let imports = &ctx.unit.imports;
    let mut groups: BTreeMap<&str, Vec<&ImportDecl>> = BTreeMap::new();
    for imp in imports {
        if !imp.is_static && !imp.wildcard {
            groups.entry(imp.package()).or_default().push(imp);
        }
    }
    for (pkg, group) in groups {
        if pkg.is_empty() || group.len() < threshold.max(1) {
            continue;
        }
        if imports.iter().any(|i| i.wildcard && !i.is_static && i.path == pkg) {
            continue;
        }
        let mut edits = vec![(group[0].span, format!("import {pkg}.*;"))];
        let mut end = group[0].span.end;
        for imp in &group[1..] {
            let r = removal_range(src, imp.span);
            end = end.max(r.end);
            edits.push((r, String::new()));
        }
        let span = Span::new(group[0].span.start, end);
        let replacement = compose(src, span, &edits);
        let node_span = group[0].span.to(group[group.len() - 1].span);
        ctx.push("T7.4", span, node_span, replacement, format!("{} imports from `{pkg}`", group.len()));
    }
}

// ---- T7.6 ---------------------------------------------------------------

fn closes(s: &Stmt, r: &str) -> bool {
    matches!(&single(s).kind, StmtKind::Expr(Expr { kind: ExprKind::Call { target: Some(t), name, args, .. }, .. })
        if t.as_name() == Some(r) && name.name == "close" && args.is_empty())
}

fn null_guarded_close(s: &Stmt, r: &str) -> bool {
    let StmtKind::If {
        cond,
        then_branch,
        else_branch: None,
    } = &s.kind
    else {
        return false;
    };
    let ExprKind::Binary { op: BinaryOp::Ne, lhs, rhs } = &cond.unparen().kind else { return false };
    let is_null = |e: &Expr| matches!(e.kind, ExprKind::Literal(LitKind::Null));
    let guard = (lhs.as_name() == Some(r) && is_null(rhs)) || (rhs.as_name() == Some(r) && is_null(lhs));
    guard && closes(then_branch, r)
}

fn try_with_resources(ctx: &mut Ctx) {
    for list in ctx.lists.clone() {
        for pair in list.windows(2) {
            let Some((d, decl)) = single_declarator(&pair[0]) else { continue };
            let Some(init) = &decl.init else { continue };
            let StmtKind::Try {
                resources,
                body,
                catches,
                finally: Some(fin),
            } = &pair[1].kind
            else {
                continue;
            };
            let r = &decl.name.name;
            if !resources.is_empty() || !catches.is_empty() || matches!(init.kind, ExprKind::Literal(LitKind::Null)) {
                continue;
            }
            let [only] = fin.stmts.as_slice() else { continue };
            if !(closes(only, r) || null_guarded_close(only, r)) {
                continue;
            }
            if ctx.scope.decl_count(r) != 1
                || ctx.scope.is_assigned(r)
                || ctx
                    .scope
                    .uses(r)
                    .iter()
                    .any(|u| !body.span.contains(&u.span) && !fin.span.contains(&u.span))
            {
                continue;
            }
            let mut mods = String::new();
            for k in &d.modifiers.keywords {
                mods.push_str(k);
                mods.push(' ');
            }
            let replacement = format!(
                "try ({mods}{} {r} = {}) {}",
                type_text(ctx.text(d.ty.span)),
                ctx.text(init.span),
                ctx.text(body.span)
            );
            let span = pair[0].span.to(pair[1].span);
            ctx.push("T7.6", span, span, replacement, format!("`{r}` is only closed in the finally block"));
        }
    }
}
