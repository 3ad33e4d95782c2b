//! Untyped view of the syntax tree: node kinds, spans and children. Used for
//! structural comparisons and span bookkeeping where the typed AST would be
//! unwieldy.

use serde::Serialize;

use super::ast::*;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SyntaxNode {
    pub kind: &'static str,
    pub span: Span,
    pub children: Vec<SyntaxNode>,
}

impl SyntaxNode {
    fn leaf(kind: &'static str, span: Span) -> Self {
        SyntaxNode {
            kind,
            span,
            children: Vec::new(),
        }
    }

    /// Pre-order traversal.
    pub fn walk(&self) -> Vec<&SyntaxNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(n.children.iter().rev());
        }
        out
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(SyntaxNode::node_count).sum::<usize>()
    }

    /// True if some node in the tree has exactly this span.
    pub fn has_span(&self, span: Span) -> bool {
        if self.span == span {
            return true;
        }
        self.span.contains(&span) && self.children.iter().any(|c| c.has_span(span))
    }

    /// True if `span` is exactly a node's span or exactly covers a run of
    /// consecutive siblings.
    pub fn maps_span(&self, span: Span) -> bool {
        if self.has_span(span) {
            return true;
        }
        self.walk().into_iter().any(|n| {
            let kids = &n.children;
            kids.iter().enumerate().any(|(i, first)| {
                first.span.start == span.start && kids[i..].iter().any(|last| last.span.end == span.end)
            })
        })
    }

    /// Smallest node whose span contains `span`.
    pub fn covering(&self, span: Span) -> Option<&SyntaxNode> {
        if !self.span.contains(&span) {
            return None;
        }
        self.children
            .iter()
            .find_map(|c| c.covering(span))
            .or(Some(self))
    }

    /// Kind signature of the subtree truncated at `depth` levels
    /// (depth 1 is just this node's kind).
    pub fn signature(&self, depth: usize) -> String {
        if depth <= 1 || self.children.is_empty() {
            return self.kind.to_string();
        }
        let kids: Vec<String> = self.children.iter().map(|c| c.signature(depth - 1)).collect();
        format!("{}({})", self.kind, kids.join(","))
    }

    /// Checks the structural span invariants: children ordered, disjoint and
    /// contained in their parent. Returns the first offending node kind.
    pub fn check_spans(&self) -> Result<(), String> {
        let mut prev_end = self.span.start;
        for c in &self.children {
            if !self.span.contains(&c.span) {
                return Err(format!("{} not inside {}", c.kind, self.kind));
            }
            if c.span.start < prev_end {
                return Err(format!("{} overlaps previous sibling in {}", c.kind, self.kind));
            }
            prev_end = c.span.end;
            c.check_spans()?;
        }
        Ok(())
    }
}

pub fn method_tree(imports: &[ImportDecl], m: &MethodDecl) -> SyntaxNode {
    let method = method_node(m);
    if imports.is_empty() {
        return method;
    }
    let mut children: Vec<SyntaxNode> = imports
        .iter()
        .map(|i| SyntaxNode::leaf("import-decl", i.span))
        .collect();
    let start = imports[0].span.start;
    let end = method.span.end;
    children.push(method);
    SyntaxNode {
        kind: "method-unit",
        span: Span::new(start, end),
        children,
    }
}

pub fn method_node(m: &MethodDecl) -> SyntaxNode {
    let mut b = Builder::default();
    b.modifiers(&m.modifiers);
    for tp in &m.type_params {
        b.push(SyntaxNode::leaf("type-param", tp.span));
    }
    if let Some(rt) = &m.return_type {
        b.push(type_node(rt));
    }
    for p in &m.params {
        b.push(param_node(p));
    }
    for t in &m.throws {
        b.push(type_node(t));
    }
    if let Some(body) = &m.body {
        b.push(block_node(body));
    }
    b.finish("method-decl", m.span)
}

#[derive(Default)]
struct Builder {
    children: Vec<SyntaxNode>,
}

impl Builder {
    fn push(&mut self, n: SyntaxNode) {
        self.children.push(n);
    }

    fn expr(&mut self, e: &Expr) {
        self.push(expr_node(e));
    }

    fn modifiers(&mut self, m: &Modifiers) {
        for a in &m.annotations {
            let mut b = Builder::default();
            for arg in &a.args {
                b.expr(arg);
            }
            self.push(b.finish("annotation", a.span));
        }
    }

    fn finish(mut self, kind: &'static str, span: Span) -> SyntaxNode {
        self.children.sort_by_key(|c| (c.span.start, c.span.end));
        SyntaxNode {
            kind,
            span,
            children: self.children,
        }
    }
}

fn type_node(t: &TypeRef) -> SyntaxNode {
    SyntaxNode::leaf("type", t.span)
}

fn param_node(p: &Param) -> SyntaxNode {
    let mut b = Builder::default();
    b.modifiers(&p.modifiers);
    b.push(type_node(&p.ty));
    b.finish("param", p.span)
}

fn block_node(block: &Block) -> SyntaxNode {
    let mut b = Builder::default();
    for s in &block.stmts {
        b.push(stmt_node(s));
    }
    b.finish("block", block.span)
}

fn local_var_children(b: &mut Builder, d: &LocalVarDecl) {
    b.modifiers(&d.modifiers);
    b.push(type_node(&d.ty));
    for decl in &d.declarators {
        let mut db = Builder::default();
        if let Some(init) = &decl.init {
            db.expr(init);
        }
        b.push(db.finish("declarator", decl.span));
    }
}

pub fn stmt_node(s: &Stmt) -> SyntaxNode {
    let mut b = Builder::default();
    let kind = match &s.kind {
        StmtKind::LocalVar(d) => {
            local_var_children(&mut b, d);
            "local-var-decl"
        }
        StmtKind::Expr(e) => {
            b.expr(e);
            "expr-stmt"
        }
        StmtKind::If {
            cond,
            then_branch,
            else_branch,
        } => {
            b.expr(cond);
            b.push(stmt_node(then_branch));
            if let Some(e) = else_branch {
                b.push(stmt_node(e));
            }
            "if"
        }
        StmtKind::For {
            init,
            cond,
            update,
            body,
        } => {
            match init {
                Some(ForInit::Decl(d)) => {
                    let mut ib = Builder::default();
                    local_var_children(&mut ib, d);
                    let span = ib
                        .children
                        .iter()
                        .map(|c| c.span)
                        .reduce(Span::to)
                        .unwrap_or(d.ty.span);
                    b.push(ib.finish("local-var-decl", span));
                }
                Some(ForInit::Exprs(es)) => es.iter().for_each(|e| b.expr(e)),
                None => {}
            }
            if let Some(c) = cond {
                b.expr(c);
            }
            update.iter().for_each(|e| b.expr(e));
            b.push(stmt_node(body));
            "for"
        }
        StmtKind::ForEach {
            modifiers,
            ty,
            iterable,
            body,
            ..
        } => {
            b.modifiers(modifiers);
            b.push(type_node(ty));
            b.expr(iterable);
            b.push(stmt_node(body));
            "foreach"
        }
        StmtKind::While { cond, body } => {
            b.expr(cond);
            b.push(stmt_node(body));
            "while"
        }
        StmtKind::Do { body, cond } => {
            b.push(stmt_node(body));
            b.expr(cond);
            "do"
        }
        StmtKind::Switch { selector, cases } => {
            b.expr(selector);
            for c in cases {
                let mut cb = Builder::default();
                c.labels.iter().for_each(|e| cb.expr(e));
                for s in &c.body {
                    cb.push(stmt_node(s));
                }
                b.push(cb.finish("switch-case", c.span));
            }
            "switch"
        }
        StmtKind::Try {
            resources,
            body,
            catches,
            finally,
        } => {
            for r in resources {
                let mut rb = Builder::default();
                match r {
                    Resource::Decl {
                        modifiers, ty, init, ..
                    } => {
                        rb.modifiers(modifiers);
                        rb.push(type_node(ty));
                        rb.expr(init);
                    }
                    Resource::Expr(e) => rb.expr(e),
                }
                b.push(rb.finish("resource", r.span()));
            }
            b.push(block_node(body));
            for c in catches {
                let mut cb = Builder::default();
                cb.modifiers(&c.modifiers);
                c.types.iter().for_each(|t| cb.push(type_node(t)));
                cb.push(block_node(&c.body));
                b.push(cb.finish("catch-clause", c.span));
            }
            if let Some(f) = finally {
                let mut fb = Builder::default();
                fb.push(block_node(f));
                b.push(fb.finish("finally", f.span));
            }
            "try"
        }
        StmtKind::Return(v) => {
            if let Some(e) = v {
                b.expr(e);
            }
            "return"
        }
        StmtKind::Throw(e) => {
            b.expr(e);
            "throw"
        }
        StmtKind::Break(_) => "break",
        StmtKind::Continue(_) => "continue",
        StmtKind::Block(bl) => return block_node(bl),
        StmtKind::Labeled { body, .. } => {
            b.push(stmt_node(body));
            "labeled"
        }
        StmtKind::Synchronized { lock, body } => {
            b.expr(lock);
            b.push(block_node(body));
            "synchronized"
        }
        StmtKind::Assert { cond, message } => {
            b.expr(cond);
            if let Some(m) = message {
                b.expr(m);
            }
            "assert"
        }
        StmtKind::Empty => "empty",
    };
    b.finish(kind, s.span)
}

fn class_body_node(body: &ClassBody) -> SyntaxNode {
    let mut b = Builder::default();
    for m in &body.members {
        match m {
            Member::Method(md) => b.push(method_node(md)),
            Member::Field(f) => {
                let mut fb = Builder::default();
                fb.modifiers(&f.modifiers);
                fb.push(type_node(&f.ty));
                for d in &f.declarators {
                    let mut db = Builder::default();
                    if let Some(init) = &d.init {
                        db.expr(init);
                    }
                    fb.push(db.finish("declarator", d.span));
                }
                b.push(fb.finish("field-decl", f.span));
            }
            Member::Initializer { span, body, .. } => {
                let mut ib = Builder::default();
                ib.push(block_node(body));
                b.push(ib.finish("initializer", *span));
            }
            Member::Type(t) => b.push(SyntaxNode::leaf("type-decl", t.span)),
        }
    }
    b.finish("class-body", body.span)
}

pub fn expr_node(e: &Expr) -> SyntaxNode {
    let mut b = Builder::default();
    let kind = match &e.kind {
        ExprKind::Literal(_) => "literal",
        ExprKind::Name(_) => "name",
        ExprKind::This => "this",
        ExprKind::Super => "super",
        ExprKind::FieldAccess { target, .. } => {
            b.expr(target);
            "field-access"
        }
        ExprKind::ArrayAccess { array, index } => {
            b.expr(array);
            b.expr(index);
            "array-access"
        }
        ExprKind::Call { target, args, .. } => {
            if let Some(t) = target {
                b.expr(t);
            }
            args.iter().for_each(|a| b.expr(a));
            "call"
        }
        ExprKind::New { ty, args, body } => {
            b.push(type_node(ty));
            args.iter().for_each(|a| b.expr(a));
            if let Some(cb) = body {
                b.push(class_body_node(cb));
            }
            "object-creation"
        }
        ExprKind::NewArray {
            elem, sizes, init, ..
        } => {
            b.push(type_node(elem));
            sizes.iter().for_each(|a| b.expr(a));
            if let Some(es) = init {
                es.iter().for_each(|a| b.expr(a));
            }
            "array-creation"
        }
        ExprKind::ArrayInit(es) => {
            es.iter().for_each(|a| b.expr(a));
            "array-init"
        }
        ExprKind::Unary { operand, .. } => {
            b.expr(operand);
            "unary"
        }
        ExprKind::Binary { lhs, rhs, .. } => {
            b.expr(lhs);
            b.expr(rhs);
            "binary"
        }
        ExprKind::Assign { target, value, .. } => {
            b.expr(target);
            b.expr(value);
            "assign"
        }
        ExprKind::Ternary {
            cond,
            then_expr,
            else_expr,
        } => {
            b.expr(cond);
            b.expr(then_expr);
            b.expr(else_expr);
            "ternary"
        }
        ExprKind::InstanceOf { expr, ty, .. } => {
            b.expr(expr);
            b.push(type_node(ty));
            "instanceof"
        }
        ExprKind::Cast { ty, expr } => {
            b.push(type_node(ty));
            b.expr(expr);
            "cast"
        }
        ExprKind::Lambda { params, body } => {
            for p in params {
                match p {
                    LambdaParam::Inferred(id) => b.push(SyntaxNode::leaf("lambda-param", id.span)),
                    LambdaParam::Typed(p) => b.push(param_node(p)),
                }
            }
            match body {
                LambdaBody::Expr(x) => b.expr(x),
                LambdaBody::Block(bl) => b.push(block_node(bl)),
            }
            "lambda"
        }
        ExprKind::MethodRef { target, .. } => {
            b.expr(target);
            "method-ref"
        }
        ExprKind::ClassLit(t) => {
            b.push(type_node(t));
            "class-literal"
        }
        ExprKind::Paren(inner) => {
            b.expr(inner);
            "paren"
        }
    };
    b.finish(kind, e.span)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::parse_method_fragment;

    #[test]
    fn repository_getter_shape() {
        let src = "public Collection<AuditRequestLog> getAuditRequestLogs() {\n    Collection<AuditRequestLog> newList = repository.findAll();\n    return newList;\n}";
        let frag = parse_method_fragment(src).unwrap();
        let tree = method_tree(&frag.imports, &frag.method);
        assert_eq!(tree.kind, "method-decl");
        let body = tree.children.last().unwrap();
        let kinds: Vec<_> = body.children.iter().map(|c| c.kind).collect();
        assert_eq!(kinds, ["local-var-decl", "return"]);
        tree.check_spans().unwrap();
        assert_eq!(body.signature(2), "block(local-var-decl,return)");
    }

    #[test]
    fn covering_and_has_span() {
        let src = "void f() { g(1 + 2); }";
        let m = parse_method_fragment(src).unwrap().method;
        let tree = method_node(&m);
        let start = src.find("1 + 2").unwrap();
        let span = Span::new(start, start + 5);
        assert!(tree.has_span(span));
        assert_eq!(tree.covering(span).unwrap().kind, "binary");
        assert!(!tree.has_span(Span::new(start, start + 3)));
    }
}
