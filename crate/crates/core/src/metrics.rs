//! Size and complexity metrics for methods.
//!
//! Cognitive complexity uses a fixed increment table:
//! - `if`, `switch`, loops, `catch` and `?:` add 1 plus the current nesting
//!   depth, and raise the nesting depth for their bodies;
//! - `else if` and `else` add 1 (no nesting bonus);
//! - each run of like logical operators (`&&` or `||`) in a condition adds 1;
//! - labelled `break`/`continue` add 1.
//!
//! Lambdas and anonymous class bodies do not change the nesting depth.

use serde::{Deserialize, Serialize};

use crate::syntax::ast::*;
use crate::syntax::visit::{exprs_in_stmts, for_each_child_expr, for_each_child_stmt_and_expr, stmts_in, Child};
use crate::syntax::MethodUnit;

pub fn cyclomatic(unit: &MethodUnit) -> u32 {
    cyclomatic_of(unit.body_stmts())
}

pub fn cyclomatic_of(stmts: &[Stmt]) -> u32 {
    let mut n = 1;
    for s in stmts_in(stmts) {
        n += match &s.kind {
            StmtKind::If { .. }
            | StmtKind::For { .. }
            | StmtKind::ForEach { .. }
            | StmtKind::While { .. }
            | StmtKind::Do { .. } => 1,
            StmtKind::Switch { cases, .. } => cases.iter().map(|c| c.labels.len() as u32).sum(),
            StmtKind::Try { catches, .. } => catches.len() as u32,
            _ => 0,
        };
    }
    for e in exprs_in_stmts(stmts) {
        n += match &e.kind {
            ExprKind::Ternary { .. } => 1,
            ExprKind::Binary { op, .. } if op.is_short_circuit() => 1,
            _ => 0,
        };
    }
    n
}

pub fn cognitive(unit: &MethodUnit) -> u32 {
    cognitive_of(unit.body_stmts())
}

pub fn cognitive_of(stmts: &[Stmt]) -> u32 {
    let mut c = Cognitive { total: 0 };
    for s in stmts {
        c.stmt(s, 0);
    }
    c.total
}

struct Cognitive {
    total: u32,
}

impl Cognitive {
    fn stmt(&mut self, s: &Stmt, nesting: u32) {
        match &s.kind {
            StmtKind::If { .. } => self.if_chain(s, nesting, false),
            StmtKind::For { .. } | StmtKind::ForEach { .. } | StmtKind::While { .. } | StmtKind::Do { .. } => {
                self.total += 1 + nesting;
                self.children(s, nesting, nesting + 1);
            }
            StmtKind::Switch { .. } => {
                self.total += 1 + nesting;
                self.children(s, nesting, nesting + 1);
            }
            StmtKind::Try {
                resources,
                body,
                catches,
                finally,
            } => {
                for r in resources {
                    match r {
                        Resource::Decl { init, .. } => self.expr(init, nesting),
                        Resource::Expr(e) => self.expr(e, nesting),
                    }
                }
                self.stmts(&body.stmts, nesting);
                for c in catches {
                    self.total += 1 + nesting;
                    self.stmts(&c.body.stmts, nesting + 1);
                }
                if let Some(f) = finally {
                    self.stmts(&f.stmts, nesting);
                }
            }
            StmtKind::Break(Some(_)) | StmtKind::Continue(Some(_)) => self.total += 1,
            _ => self.children(s, nesting, nesting),
        }
    }

    fn stmts(&mut self, stmts: &[Stmt], nesting: u32) {
        for s in stmts {
            self.stmt(s, nesting);
        }
    }

    /// Visits the children of `s`: expressions at `expr_nesting`, nested
    /// statements at `body_nesting`.
    fn children(&mut self, s: &Stmt, expr_nesting: u32, body_nesting: u32) {
        let mut kids = Vec::new();
        for_each_child_stmt_and_expr(s, &mut |c| kids.push(c));
        for c in kids {
            match c {
                Child::Stmt(st) => self.stmt(st, body_nesting),
                Child::Expr(e) => self.expr(e, expr_nesting),
            }
        }
    }

    fn if_chain(&mut self, s: &Stmt, nesting: u32, is_else_if: bool) {
        let StmtKind::If {
            cond,
            then_branch,
            else_branch,
        } = &s.kind
        else {
            return;
        };
        self.total += if is_else_if { 1 } else { 1 + nesting };
        self.expr(cond, nesting);
        self.stmt(then_branch, nesting + 1);
        if let Some(e) = else_branch {
            if matches!(e.kind, StmtKind::If { .. }) {
                self.if_chain(e, nesting, true);
            } else {
                self.total += 1;
                self.stmt(e, nesting + 1);
            }
        }
    }

    fn expr(&mut self, e: &Expr, nesting: u32) {
        match &e.kind {
            ExprKind::Ternary {
                cond,
                then_expr,
                else_expr,
            } => {
                self.total += 1 + nesting;
                self.expr(cond, nesting);
                self.expr(then_expr, nesting + 1);
                self.expr(else_expr, nesting + 1);
            }
            ExprKind::Binary { op, .. } if op.is_short_circuit() => {
                let mut ops = Vec::new();
                let mut operands = Vec::new();
                flatten_logical(e, &mut ops, &mut operands);
                self.total += logical_runs(&ops);
                for o in operands {
                    self.expr(o, nesting);
                }
            }
            _ => {
                let mut kids = Vec::new();
                for_each_child_expr(e, &mut |c| kids.push(c));
                for c in kids {
                    match c {
                        Child::Stmt(st) => self.stmt(st, nesting),
                        Child::Expr(x) => self.expr(x, nesting),
                    }
                }
            }
        }
    }
}

/// In-order operators of a maximal `&&`/`||` tree (parentheses are
/// transparent) and its non-logical operands.
fn flatten_logical<'a>(e: &'a Expr, ops: &mut Vec<BinaryOp>, operands: &mut Vec<&'a Expr>) {
    match &e.kind {
        ExprKind::Binary { op, lhs, rhs } if op.is_short_circuit() => {
            flatten_logical(lhs, ops, operands);
            ops.push(*op);
            flatten_logical(rhs, ops, operands);
        }
        ExprKind::Paren(inner) if is_logical(inner) => flatten_logical(inner, ops, operands),
        _ => operands.push(e),
    }
}

fn is_logical(e: &Expr) -> bool {
    match &e.unparen().kind {
        ExprKind::Binary { op, .. } => op.is_short_circuit(),
        _ => false,
    }
}

fn logical_runs(ops: &[BinaryOp]) -> u32 {
    let mut runs = 0;
    let mut prev = None;
    for &op in ops {
        if prev != Some(op) {
            runs += 1;
        }
        prev = Some(op);
    }
    runs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub sloc: usize,
    pub tokens: usize,
    pub cyclomatic: u32,
    pub cognitive: u32,
}

pub fn measure(unit: &MethodUnit) -> Metrics {
    Metrics {
        sloc: unit.sloc,
        tokens: unit.token_count,
        cyclomatic: cyclomatic(unit),
        cognitive: cognitive(unit),
    }
}

/// Before/after metrics of a method pair. Deltas are `after - before`;
/// reductions are `(before - after) / before` and absent when `before == 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsDelta {
    pub sloc_before: usize,
    pub sloc_after: usize,
    pub tokens_before: usize,
    pub tokens_after: usize,
    pub cyclomatic_before: u32,
    pub cyclomatic_after: u32,
    pub cognitive_before: u32,
    pub cognitive_after: u32,
    pub sloc_reduction: Option<f64>,
    pub token_reduction: Option<f64>,
    pub cyclomatic_reduction: Option<f64>,
    pub cognitive_reduction: Option<f64>,
}

fn reduction(before: f64, after: f64) -> Option<f64> {
    (before > 0.0).then(|| (before - after) / before)
}

impl MetricsDelta {
    pub fn between(before: Metrics, after: Metrics) -> Self {
        MetricsDelta {
            sloc_before: before.sloc,
            sloc_after: after.sloc,
            tokens_before: before.tokens,
            tokens_after: after.tokens,
            cyclomatic_before: before.cyclomatic,
            cyclomatic_after: after.cyclomatic,
            cognitive_before: before.cognitive,
            cognitive_after: after.cognitive,
            sloc_reduction: reduction(before.sloc as f64, after.sloc as f64),
            token_reduction: reduction(before.tokens as f64, after.tokens as f64),
            cyclomatic_reduction: reduction(before.cyclomatic as f64, after.cyclomatic as f64),
            cognitive_reduction: reduction(before.cognitive as f64, after.cognitive as f64),
        }
    }

    pub fn sloc_delta(&self) -> i64 {
        self.sloc_after as i64 - self.sloc_before as i64
    }

    pub fn token_delta(&self) -> i64 {
        self.tokens_after as i64 - self.tokens_before as i64
    }

    pub fn cyclomatic_delta(&self) -> i64 {
        self.cyclomatic_after as i64 - self.cyclomatic_before as i64
    }

    pub fn cognitive_delta(&self) -> i64 {
        self.cognitive_after as i64 - self.cognitive_before as i64
    }
}

pub fn quality_delta(original: &MethodUnit, simplified: &MethodUnit) -> MetricsDelta {
    MetricsDelta::between(measure(original), measure(simplified))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_method;
    use proptest::prelude::*;

    fn m(src: &str) -> MethodUnit {
        parse_method(src).unwrap()
    }

    use crate::test_fixtures::FIND_PRODUCT;

    #[test]
    fn straight_line() {
        let u = m("int f(int a) { int b = a + 1; return b * 2; }");
        assert_eq!(cyclomatic(&u), 1);
        assert_eq!(cognitive(&u), 0);
    }

    #[test]
    fn find_product_values() {
        let u = m(FIND_PRODUCT);
        assert_eq!(cyclomatic(&u), 3);
        assert_eq!(cognitive(&u), 3);
    }

    #[test]
    fn short_circuit_if() {
        let u = m("void f(boolean a, boolean b) { if (a && b) { go(); } }");
        assert_eq!(cyclomatic(&u), 3);
        assert_eq!(cognitive(&u), 2);
    }

    #[test]
    fn if_nested_in_for() {
        let u = m("void f(int[] xs) { for (int x : xs) { if (x > 0) { go(); } } }");
        assert_eq!(cognitive(&u), 3);
    }

    #[test]
    fn else_if_chain_and_logical_runs() {
        let u = m("void f(int a, boolean p, boolean q, boolean r) {
            if (a == 1) { x(); } else if (a == 2) { y(); } else { z(); }
            if (p && q || r && p) { w(); }
        }");
        // if 1, else-if 1, else 1; second if 1 + runs(&&,||,&&) 3
        assert_eq!(cognitive(&u), 7);
        // base 1 + 3 ifs + 3 short-circuit operators
        assert_eq!(cyclomatic(&u), 7);
    }

    #[test]
    fn switch_catch_ternary_labels() {
        let u = m("int f(int k) {
            outer:
            while (true) {
                switch (k) { case 1: case 2, 3: break outer; default: continue; }
            }
            try { run(); } catch (IOException e) { log(e); } catch (RuntimeException e) { k = k > 0 ? 1 : 2; }
            return k;
        }");
        // while 1, case labels 3, catches 2, ternary 1
        assert_eq!(cyclomatic(&u), 1 + 1 + 3 + 2 + 1);
        // while 1; switch 1+1; labelled break 1; catch 1; catch 1 + ternary 1+1
        assert_eq!(cognitive(&u), 1 + 2 + 1 + 1 + 1 + 2);
    }

    #[test]
    fn inlined_return_delta() {
        let before = m("public Collection<AuditRequestLog> getAuditRequestLogs() {\n    Collection<AuditRequestLog> newList = repository.findAll();\n    return newList;\n}");
        let after = m("public Collection<AuditRequestLog> getAuditRequestLogs() {\n    return repository.findAll();\n}");
        let d = quality_delta(&before, &after);
        assert_eq!((d.sloc_before, d.sloc_after), (4, 3));
        assert_eq!(d.sloc_delta(), -1);
        assert_eq!(d.sloc_reduction, Some(0.25));
    }

    #[test]
    fn identical_delta_is_zero() {
        let u = m(FIND_PRODUCT);
        let d = quality_delta(&u, &u);
        assert_eq!(d.sloc_delta(), 0);
        assert_eq!(d.token_delta(), 0);
        assert_eq!(d.cyclomatic_delta(), 0);
        assert_eq!(d.cognitive_delta(), 0);
    }

    #[test]
    fn boolean_comparison_delta() {
        let before = m("boolean f(CacheObject co) { if (false == co.isExpired()) { return true; } return false; }");
        let after = m("boolean f(CacheObject co) { if (!co.isExpired()) { return true; } return false; }");
        let d = quality_delta(&before, &after);
        assert_eq!(d.cyclomatic_delta(), 0);
        assert!(d.token_delta() < 0);
    }

    fn body_strategy() -> impl Strategy<Value = Vec<&'static str>> {
        prop::collection::vec(
            prop_oneof![
                Just("a = a + 1;"),
                Just("if (a > 0 && b) { a--; }"),
                Just("for (int i = 0; i < 3; i++) { if (i == a) { b = !b; } }"),
                Just("while (a < 10 || b) { a++; b = false; }"),
                Just("a = b ? 1 : 2;"),
                Just("try { go(); } catch (Exception e) { a = 0; }"),
                Just("switch (a) { case 1: a = 2; break; default: a = 3; }"),
            ],
            0..6,
        )
    }

    fn assemble(stmts: &[&str], sep: &str) -> String {
        let mut s = String::from("void f(int a, boolean b) {\n");
        for st in stmts {
            s.push_str(st);
            s.push_str(sep);
        }
        s.push_str("}\n");
        s
    }

    proptest! {
        #[test]
        fn metrics_invariant_under_comments(stmts in body_strategy()) {
            let plain = m(&assemble(&stmts, "\n"));
            let noisy = m(&assemble(&stmts, " // note\n\n/* block\n comment */\n"));
            prop_assert_eq!(measure(&plain), measure(&noisy));
            prop_assert!(cyclomatic(&plain) >= 1);
        }

        #[test]
        fn deleting_straight_line_statement_never_increases(stmts in body_strategy(), at in 0usize..6) {
            let mut with = stmts.clone();
            with.insert(at.min(stmts.len()), "a = a * 2;");
            let big = measure(&m(&assemble(&with, "\n")));
            let small = measure(&m(&assemble(&stmts, "\n")));
            prop_assert!(small.cyclomatic <= big.cyclomatic);
            prop_assert!(small.cognitive <= big.cognitive);
        }
    }
}
