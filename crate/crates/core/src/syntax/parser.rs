//! Recursive-descent parser for the supported Java subset.

use thiserror::Error;

use super::ast::*;
use super::lexer::{tokenize, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported construct at {line}:{column}: {construct}")]
    Unsupported {
        line: usize,
        column: usize,
        construct: String,
    },
}

impl SyntaxError {
    pub fn line(&self) -> usize {
        match self {
            SyntaxError::Syntax { line, .. } | SyntaxError::Unsupported { line, .. } => *line,
        }
    }

    pub fn column(&self) -> usize {
        match self {
            SyntaxError::Syntax { column, .. } | SyntaxError::Unsupported { column, .. } => *column,
        }
    }
}

pub type ParseResult<T> = Result<T, SyntaxError>;

#[derive(Debug, Clone, Copy)]
struct PTok {
    kind: TokenKind,
    start: usize,
    end: usize,
}

/// A parsed method fragment: optional leading imports plus one method.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodFragment {
    pub imports: Vec<ImportDecl>,
    pub method: MethodDecl,
}

pub fn parse_method_fragment(src: &str) -> ParseResult<MethodFragment> {
    let mut p = Parser::new(src);
    let mut imports = Vec::new();
    while p.at_kw("import") {
        imports.push(p.import_decl()?);
    }
    let start = p.cur_start();
    let modifiers = p.modifiers()?;
    let method = p.method_after_modifiers(modifiers, start)?;
    if !p.at_eof() {
        return Err(p.error("expected end of input after method declaration"));
    }
    Ok(MethodFragment { imports, method })
}

pub fn parse_compilation_unit(src: &str) -> ParseResult<CompilationUnit> {
    let mut p = Parser::new(src);
    let start = p.cur_start();
    let mut package = None;
    let pkg_start = p.pos;
    p.modifiers()?;
    if p.at_kw("package") {
        p.bump();
        package = Some(p.qualified_name()?);
        p.expect(";")?;
    } else {
        p.pos = pkg_start;
        p.prev_end = 0;
    }
    let mut imports = Vec::new();
    while p.at_kw("import") {
        imports.push(p.import_decl()?);
    }
    let mut types = Vec::new();
    while !p.at_eof() {
        if p.eat(";") {
            continue;
        }
        let t_start = p.cur_start();
        let mods = p.modifiers()?;
        types.push(p.type_decl(mods, t_start)?);
    }
    Ok(CompilationUnit {
        span: Span::new(start, src.len()),
        package,
        imports,
        types,
    })
}

/// Parses a standalone expression (used by rewrite preconditions and tests).
pub fn parse_expression(src: &str) -> ParseResult<Expr> {
    let mut p = Parser::new(src);
    let e = p.expr()?;
    if !p.at_eof() {
        return Err(p.error("expected end of expression"));
    }
    Ok(e)
}

/// Parses a sequence of block statements (no surrounding braces).
pub fn parse_statements(src: &str) -> ParseResult<Vec<Stmt>> {
    let mut p = Parser::new(src);
    let mut out = Vec::new();
    while !p.at_eof() {
        out.push(p.block_stmt()?);
    }
    Ok(out)
}

const MODIFIER_KEYWORDS: &[&str] = &[
    "public",
    "protected",
    "private",
    "static",
    "final",
    "abstract",
    "native",
    "synchronized",
    "transient",
    "volatile",
    "strictfp",
    "default",
];

struct Parser<'a> {
    src: &'a str,
    toks: Vec<PTok>,
    pos: usize,
    prev_end: usize,
    line_starts: Vec<usize>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        let mut toks = Vec::new();
        for t in tokenize(src).into_iter().filter(|t| t.is_significant()) {
            // `>>`, `>=`, `>>>=` and friends are split into single `>` (and a
            // trailing `=`) so that nested type arguments close correctly; the
            // expression parser glues adjacent pieces back together.
            if t.kind == TokenKind::Operator && t.text.len() > 1 && t.text.starts_with('>') {
                for (i, ch) in t.text.char_indices() {
                    let _ = ch;
                    toks.push(PTok {
                        kind: TokenKind::Operator,
                        start: t.offset + i,
                        end: t.offset + i + 1,
                    });
                }
            } else {
                toks.push(PTok {
                    kind: t.kind,
                    start: t.offset,
                    end: t.end(),
                });
            }
        }
        let mut line_starts = vec![0];
        line_starts.extend(src.match_indices('\n').map(|(i, _)| i + 1));
        Parser {
            src,
            toks,
            pos: 0,
            prev_end: 0,
            line_starts,
        }
    }

    // ---- token helpers -------------------------------------------------

    fn peek_at(&self, n: usize) -> Option<PTok> {
        self.toks.get(self.pos + n).copied()
    }

    fn text_at(&self, n: usize) -> &'a str {
        self.peek_at(n).map_or("", |t| &self.src[t.start..t.end])
    }

    fn text(&self) -> &'a str {
        self.text_at(0)
    }

    fn kind_at(&self, n: usize) -> Option<TokenKind> {
        self.peek_at(n).map(|t| t.kind)
    }

    fn at_eof(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn at(&self, s: &str) -> bool {
        !self.at_eof() && self.text() == s && self.kind_at(0) != Some(TokenKind::Literal)
    }

    fn at_kw(&self, kw: &str) -> bool {
        self.kind_at(0) == Some(TokenKind::Keyword) && self.text() == kw
    }

    fn at_ident(&self) -> bool {
        self.kind_at(0) == Some(TokenKind::Identifier)
    }

    fn cur_start(&self) -> usize {
        self.peek_at(0).map_or(self.src.len(), |t| t.start)
    }

    fn bump(&mut self) -> PTok {
        let t = self.toks[self.pos];
        self.pos += 1;
        self.prev_end = t.end;
        t
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.at(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> ParseResult<PTok> {
        if self.at(s) {
            Ok(self.bump())
        } else {
            Err(self.error(&format!("expected `{s}`")))
        }
    }

    /// True when token `n` starts exactly where token `n - 1` ends.
    fn joined(&self, n: usize) -> bool {
        match (self.peek_at(n.wrapping_sub(1)), self.peek_at(n)) {
            (Some(a), Some(b)) if n > 0 => a.end == b.start,
            _ => false,
        }
    }

    fn position(&self, offset: usize) -> (usize, usize) {
        let line = match self.line_starts.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let col = self.src[self.line_starts[line]..offset].chars().count() + 1;
        (line + 1, col)
    }

    fn error(&self, message: &str) -> SyntaxError {
        let (line, column) = self.position(self.cur_start());
        let found = if self.at_eof() {
            "end of input".to_string()
        } else {
            format!("`{}`", self.text())
        };
        SyntaxError::Syntax {
            line,
            column,
            message: format!("{message}, found {found}"),
        }
    }

    fn unsupported(&self, construct: &str) -> SyntaxError {
        let (line, column) = self.position(self.cur_start());
        SyntaxError::Unsupported {
            line,
            column,
            construct: construct.to_string(),
        }
    }

    fn ident(&mut self) -> ParseResult<Ident> {
        if self.at_ident() {
            let t = self.bump();
            Ok(Ident {
                name: self.src[t.start..t.end].to_string(),
                span: Span::new(t.start, t.end),
            })
        } else {
            Err(self.error("expected identifier"))
        }
    }

    fn qualified_name(&mut self) -> ParseResult<String> {
        let mut name = self.ident()?.name;
        while self.at(".") && self.kind_at(1) == Some(TokenKind::Identifier) {
            self.bump();
            name.push('.');
            name.push_str(&self.ident()?.name);
        }
        Ok(name)
    }

    fn speculate<T>(&mut self, f: impl FnOnce(&mut Self) -> ParseResult<T>) -> Option<T> {
        let (pos, prev) = (self.pos, self.prev_end);
        match f(self) {
            Ok(v) => Some(v),
            Err(_) => {
                self.pos = pos;
                self.prev_end = prev;
                None
            }
        }
    }

    fn lookahead<T>(&mut self, f: impl FnOnce(&mut Self) -> ParseResult<T>) -> Option<T> {
        let (pos, prev) = (self.pos, self.prev_end);
        let r = f(self).ok();
        self.pos = pos;
        self.prev_end = prev;
        r
    }

    // ---- declarations --------------------------------------------------

    fn import_decl(&mut self) -> ParseResult<ImportDecl> {
        let start = self.expect("import")?.start;
        let is_static = if self.at_kw("static") {
            self.bump();
            true
        } else {
            false
        };
        let mut path = self.ident()?.name;
        let mut wildcard = false;
        while self.eat(".") {
            if self.eat("*") {
                wildcard = true;
                break;
            }
            path.push('.');
            path.push_str(&self.ident()?.name);
        }
        self.expect(";")?;
        Ok(ImportDecl {
            span: Span::new(start, self.prev_end),
            is_static,
            path,
            wildcard,
        })
    }

    fn annotation(&mut self) -> ParseResult<Annotation> {
        let start = self.expect("@")?.start;
        if self.at_kw("interface") {
            return Err(self.unsupported("annotation type declaration"));
        }
        let name = self.qualified_name()?;
        let mut args = Vec::new();
        if self.eat("(") {
            while !self.at(")") {
                if self.at("@") {
                    return Err(self.unsupported("nested annotation value"));
                }
                if self.at_ident() && self.text_at(1) == "=" {
                    let a_start = self.cur_start();
                    let key = self.ident()?;
                    self.bump();
                    let value = self.expr_or_array_init()?;
                    args.push(Expr {
                        span: Span::new(a_start, self.prev_end),
                        kind: ExprKind::Assign {
                            op: None,
                            target: Box::new(Expr {
                                span: key.span,
                                kind: ExprKind::Name(key.name),
                            }),
                            value: Box::new(value),
                        },
                    });
                } else {
                    args.push(self.expr_or_array_init()?);
                }
                if !self.eat(",") {
                    break;
                }
            }
            self.expect(")")?;
        }
        Ok(Annotation {
            span: Span::new(start, self.prev_end),
            name,
            args,
        })
    }

    fn modifiers(&mut self) -> ParseResult<Modifiers> {
        let mut m = Modifiers::default();
        loop {
            if self.at("@") && !(self.text_at(1) == "interface") {
                m.annotations.push(self.annotation()?);
            } else if self.kind_at(0) == Some(TokenKind::Keyword)
                && MODIFIER_KEYWORDS.contains(&self.text())
                && !(self.text() == "default" && self.text_at(1) == ":")
                && !(self.text() == "synchronized" && self.text_at(1) == "(")
            {
                m.keywords.push(self.bump_text());
            } else if self.at_ident()
                && ((self.text() == "sealed" && matches!(self.text_at(1), "class" | "interface" | "abstract"))
                    || (self.text() == "non" && self.text_at(1) == "-" && self.text_at(2) == "sealed"))
            {
                return Err(self.unsupported("sealed class modifier"));
            } else {
                return Ok(m);
            }
        }
    }

    fn bump_text(&mut self) -> String {
        let t = self.bump();
        self.src[t.start..t.end].to_string()
    }

    fn type_params(&mut self) -> ParseResult<Vec<TypeParam>> {
        let mut out = Vec::new();
        if !self.at("<") {
            return Ok(out);
        }
        self.bump();
        loop {
            let start = self.cur_start();
            if self.at("@") {
                return Err(self.unsupported("type parameter annotation"));
            }
            let name = self.ident()?;
            let mut bounds = Vec::new();
            if self.at_kw("extends") {
                self.bump();
                bounds.push(self.ty()?);
                while self.eat("&") {
                    bounds.push(self.ty()?);
                }
            }
            out.push(TypeParam {
                span: Span::new(start, self.prev_end),
                name,
                bounds,
            });
            if !self.eat(",") {
                break;
            }
        }
        self.expect(">")?;
        Ok(out)
    }

    fn type_decl(&mut self, modifiers: Modifiers, start: usize) -> ParseResult<TypeDecl> {
        let kind = if self.at_kw("class") {
            TypeDeclKind::Class
        } else if self.at_kw("interface") {
            TypeDeclKind::Interface
        } else if self.at_kw("enum") {
            TypeDeclKind::Enum
        } else if self.at("@") && self.text_at(1) == "interface" {
            return Err(self.unsupported("annotation type declaration"));
        } else if self.at_ident() && self.text() == "record" {
            return Err(self.unsupported("record declaration"));
        } else {
            return Err(self.error("expected type declaration"));
        };
        self.bump();
        let name = self.ident()?;
        let type_params = self.type_params()?;
        let mut extends = Vec::new();
        let mut implements = Vec::new();
        if self.at_kw("extends") {
            self.bump();
            extends.push(self.ty()?);
            while self.eat(",") {
                extends.push(self.ty()?);
            }
        }
        if self.at_kw("implements") {
            self.bump();
            implements.push(self.ty()?);
            while self.eat(",") {
                implements.push(self.ty()?);
            }
        }
        if self.at_ident() && self.text() == "permits" {
            return Err(self.unsupported("sealed class permits clause"));
        }
        let (enum_constants, body) = if kind == TypeDeclKind::Enum {
            self.enum_body()?
        } else {
            (Vec::new(), self.class_body()?)
        };
        Ok(TypeDecl {
            span: Span::new(start, self.prev_end),
            modifiers,
            kind,
            name,
            type_params,
            extends,
            implements,
            enum_constants,
            body,
        })
    }

    fn enum_body(&mut self) -> ParseResult<(Vec<EnumConstant>, ClassBody)> {
        let open = self.expect("{")?.start;
        let mut constants = Vec::new();
        while self.at_ident() || self.at("@") {
            let start = self.cur_start();
            while self.at("@") {
                self.annotation()?;
            }
            let name = self.ident()?;
            let args = if self.at("(") { self.arguments()? } else { Vec::new() };
            let body = if self.at("{") {
                Some(self.class_body()?)
            } else {
                None
            };
            constants.push(EnumConstant {
                span: Span::new(start, self.prev_end),
                name,
                args,
                body,
            });
            if !self.eat(",") {
                break;
            }
        }
        let mut members = Vec::new();
        if self.eat(";") {
            members = self.members_until_close()?;
        }
        self.expect("}")?;
        Ok((
            constants,
            ClassBody {
                span: Span::new(open, self.prev_end),
                members,
            },
        ))
    }

    fn class_body(&mut self) -> ParseResult<ClassBody> {
        let open = self.expect("{")?.start;
        let members = self.members_until_close()?;
        self.expect("}")?;
        Ok(ClassBody {
            span: Span::new(open, self.prev_end),
            members,
        })
    }

    fn members_until_close(&mut self) -> ParseResult<Vec<Member>> {
        let mut members = Vec::new();
        while !self.at("}") {
            if self.at_eof() {
                return Err(self.error("expected `}`"));
            }
            if self.eat(";") {
                continue;
            }
            members.push(self.member()?);
        }
        Ok(members)
    }

    fn member(&mut self) -> ParseResult<Member> {
        let start = self.cur_start();
        if self.at("{") || (self.at_kw("static") && self.text_at(1) == "{") {
            let is_static = self.at_kw("static");
            if is_static {
                self.bump();
            }
            let body = self.block()?;
            return Ok(Member::Initializer {
                span: Span::new(start, self.prev_end),
                is_static,
                body,
            });
        }
        let modifiers = self.modifiers()?;
        if self.at_kw("class")
            || self.at_kw("interface")
            || self.at_kw("enum")
            || (self.at("@") && self.text_at(1) == "interface")
            || (self.at_ident() && self.text() == "record" && self.kind_at(1) == Some(TokenKind::Identifier))
        {
            return Ok(Member::Type(self.type_decl(modifiers, start)?));
        }
        let is_method = self.at("<")
            || (self.at_ident() && self.text_at(1) == "(")
            || self
                .lookahead(|p| {
                    p.result_type()?;
                    p.ident()?;
                    if p.at("(") { Ok(()) } else { Err(p.error("")) }
                })
                .is_some();
        if is_method {
            return Ok(Member::Method(self.method_after_modifiers(modifiers, start)?));
        }
        let ty = self.ty()?;
        let declarators = self.declarators(None)?;
        self.expect(";")?;
        Ok(Member::Field(FieldDecl {
            span: Span::new(start, self.prev_end),
            modifiers,
            ty,
            declarators,
        }))
    }

    fn result_type(&mut self) -> ParseResult<TypeRef> {
        if self.at_kw("void") {
            let t = self.bump();
            return Ok(TypeRef {
                span: Span::new(t.start, t.end),
                name: "void".into(),
                args: None,
                args_span: None,
                dims: 0,
            });
        }
        self.ty()
    }

    fn method_after_modifiers(&mut self, modifiers: Modifiers, start: usize) -> ParseResult<MethodDecl> {
        let type_params = self.type_params()?;
        let return_type = if self.at_ident() && self.text_at(1) == "(" {
            None
        } else {
            Some(self.result_type()?)
        };
        let name = self.ident()?;
        self.expect("(")?;
        let mut params = Vec::new();
        while !self.at(")") {
            params.push(self.param()?);
            if !self.eat(",") {
                break;
            }
        }
        self.expect(")")?;
        if self.at("[") {
            return Err(self.unsupported("array dimensions after method parameters"));
        }
        let mut throws = Vec::new();
        if self.at_kw("throws") {
            self.bump();
            throws.push(self.ty()?);
            while self.eat(",") {
                throws.push(self.ty()?);
            }
        }
        let body = if self.eat(";") {
            None
        } else if self.at_kw("default") {
            return Err(self.unsupported("annotation element default"));
        } else {
            Some(self.block()?)
        };
        Ok(MethodDecl {
            span: Span::new(start, self.prev_end),
            modifiers,
            type_params,
            return_type,
            name,
            params,
            throws,
            body,
        })
    }

    fn param(&mut self) -> ParseResult<Param> {
        let start = self.cur_start();
        let modifiers = self.modifiers()?;
        let ty = self.ty()?;
        let varargs = self.eat("...");
        if self.at_kw("this") {
            return Err(self.unsupported("receiver parameter"));
        }
        let name = self.ident()?;
        if self.at("[") {
            return Err(self.unsupported("array dimensions after parameter name"));
        }
        Ok(Param {
            span: Span::new(start, self.prev_end),
            modifiers,
            ty,
            varargs,
            name,
        })
    }

    // ---- types ---------------------------------------------------------

    fn ty(&mut self) -> ParseResult<TypeRef> {
        let mut t = self.ty_no_dims()?;
        while self.at("[") && self.text_at(1) == "]" {
            self.bump();
            self.bump();
            t.dims += 1;
        }
        t.span.end = self.prev_end;
        Ok(t)
    }

    fn ty_no_dims(&mut self) -> ParseResult<TypeRef> {
        if self.at("@") {
            return Err(self.unsupported("type annotation"));
        }
        let start = self.cur_start();
        if self.kind_at(0) == Some(TokenKind::Keyword) && is_primitive_name(self.text()) && !self.at_kw("void")
        {
            let name = self.bump_text();
            return Ok(TypeRef {
                span: Span::new(start, self.prev_end),
                name,
                args: None,
                args_span: None,
                dims: 0,
            });
        }
        let mut name = self.ident()?.name;
        let mut args = None;
        let mut args_span = None;
        loop {
            if self.at("<") {
                let a_start = self.cur_start();
                args = Some(self.type_args()?);
                args_span = Some(Span::new(a_start, self.prev_end));
            }
            if self.at(".") && self.kind_at(1) == Some(TokenKind::Identifier) {
                self.bump();
                name.push('.');
                name.push_str(&self.ident()?.name);
            } else {
                break;
            }
        }
        Ok(TypeRef {
            span: Span::new(start, self.prev_end),
            name,
            args,
            args_span,
            dims: 0,
        })
    }

    fn type_args(&mut self) -> ParseResult<Vec<TypeArg>> {
        self.expect("<")?;
        let mut out = Vec::new();
        if self.eat(">") {
            return Ok(out);
        }
        loop {
            if self.at("?") {
                let start = self.bump().start;
                let bound = if self.at_kw("extends") {
                    self.bump();
                    Some((WildcardBound::Extends, Box::new(self.ty()?)))
                } else if self.at_kw("super") {
                    self.bump();
                    Some((WildcardBound::Super, Box::new(self.ty()?)))
                } else {
                    None
                };
                out.push(TypeArg::Wildcard {
                    span: Span::new(start, self.prev_end),
                    bound,
                });
            } else {
                out.push(TypeArg::Type(self.ty()?));
            }
            if !self.eat(",") {
                break;
            }
        }
        self.expect(">")?;
        Ok(out)
    }

    // ---- statements ----------------------------------------------------

    fn block(&mut self) -> ParseResult<Block> {
        let start = self.expect("{")?.start;
        let mut stmts = Vec::new();
        while !self.at("}") {
            if self.at_eof() {
                return Err(self.error("expected `}`"));
            }
            stmts.push(self.block_stmt()?);
        }
        self.bump();
        Ok(Block {
            span: Span::new(start, self.prev_end),
            stmts,
        })
    }

    fn looks_like_local_decl(&mut self) -> bool {
        let first_ok = self.at_ident()
            || (self.kind_at(0) == Some(TokenKind::Keyword) && is_primitive_name(self.text()) && !self.at_kw("void"));
        if !first_ok {
            return false;
        }
        self.lookahead(|p| {
            p.ty()?;
            p.ident()?;
            if p.at("=") && p.text_at(1) != "=" || p.at(";") || p.at(",") || p.at("[") || p.at(":") {
                Ok(())
            } else {
                Err(p.error(""))
            }
        })
        .is_some()
    }

    fn block_stmt(&mut self) -> ParseResult<Stmt> {
        let start = self.cur_start();
        if self.at_kw("class") || self.at_kw("interface") || self.at_kw("enum") {
            return Err(self.unsupported("local type declaration"));
        }
        if self.at_ident() && self.text() == "record" && self.kind_at(1) == Some(TokenKind::Identifier) && self.text_at(2) == "(" {
            return Err(self.unsupported("local record declaration"));
        }
        let has_mods = self.at("@") || self.at_kw("final") || self.at_kw("abstract") || self.at_kw("static");
        if has_mods || self.looks_like_local_decl() {
            let modifiers = self.modifiers()?;
            if self.at_kw("class") || self.at_kw("interface") || self.at_kw("enum") {
                return Err(self.unsupported("local type declaration"));
            }
            let decl = self.local_var_rest(modifiers)?;
            self.expect(";")?;
            return Ok(Stmt {
                span: Span::new(start, self.prev_end),
                kind: StmtKind::LocalVar(decl),
            });
        }
        self.stmt()
    }

    fn local_var_rest(&mut self, modifiers: Modifiers) -> ParseResult<LocalVarDecl> {
        let ty = self.ty()?;
        let declarators = self.declarators(None)?;
        Ok(LocalVarDecl {
            modifiers,
            ty,
            declarators,
        })
    }

    fn declarators(&mut self, first: Option<Ident>) -> ParseResult<Vec<Declarator>> {
        let mut out = Vec::new();
        let mut first = first;
        loop {
            let name = match first.take() {
                Some(n) => n,
                None => self.ident()?,
            };
            let start = name.span.start;
            let mut dims = 0;
            while self.at("[") && self.text_at(1) == "]" {
                self.bump();
                self.bump();
                dims += 1;
            }
            let init = if self.at("=") {
                self.bump();
                Some(self.expr_or_array_init()?)
            } else {
                None
            };
            out.push(Declarator {
                span: Span::new(start, self.prev_end),
                name,
                dims,
                init,
            });
            if !self.eat(",") {
                break;
            }
        }
        Ok(out)
    }

    fn expr_or_array_init(&mut self) -> ParseResult<Expr> {
        if self.at("{") {
            let start = self.cur_start();
            let elems = self.array_init_elems()?;
            Ok(Expr {
                span: Span::new(start, self.prev_end),
                kind: ExprKind::ArrayInit(elems),
            })
        } else {
            self.expr()
        }
    }

    fn array_init_elems(&mut self) -> ParseResult<Vec<Expr>> {
        self.expect("{")?;
        let mut elems = Vec::new();
        while !self.at("}") {
            elems.push(self.expr_or_array_init()?);
            if !self.eat(",") {
                break;
            }
        }
        self.expect("}")?;
        Ok(elems)
    }

    fn paren_expr(&mut self) -> ParseResult<Expr> {
        self.expect("(")?;
        let e = self.expr()?;
        self.expect(")")?;
        Ok(e)
    }

    fn stmt(&mut self) -> ParseResult<Stmt> {
        let start = self.cur_start();
        let kind = if self.at("{") {
            StmtKind::Block(self.block()?)
        } else if self.eat(";") {
            StmtKind::Empty
        } else if self.at_kw("if") {
            self.bump();
            let cond = self.paren_expr()?;
            let then_branch = Box::new(self.stmt()?);
            let else_branch = if self.at_kw("else") {
                self.bump();
                Some(Box::new(self.stmt()?))
            } else {
                None
            };
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            }
        } else if self.at_kw("for") {
            self.bump();
            return self.for_rest(start);
        } else if self.at_kw("while") {
            self.bump();
            let cond = self.paren_expr()?;
            let body = Box::new(self.stmt()?);
            StmtKind::While { cond, body }
        } else if self.at_kw("do") {
            self.bump();
            let body = Box::new(self.stmt()?);
            if !self.at_kw("while") {
                return Err(self.error("expected `while`"));
            }
            self.bump();
            let cond = self.paren_expr()?;
            self.expect(";")?;
            StmtKind::Do { body, cond }
        } else if self.at_kw("switch") {
            self.bump();
            let selector = self.paren_expr()?;
            let cases = self.switch_body()?;
            StmtKind::Switch { selector, cases }
        } else if self.at_kw("try") {
            self.bump();
            self.try_rest()?
        } else if self.at_kw("return") {
            self.bump();
            let value = if self.at(";") { None } else { Some(self.expr()?) };
            self.expect(";")?;
            StmtKind::Return(value)
        } else if self.at_kw("throw") {
            self.bump();
            let e = self.expr()?;
            self.expect(";")?;
            StmtKind::Throw(e)
        } else if self.at_kw("break") || self.at_kw("continue") {
            let is_break = self.at_kw("break");
            self.bump();
            let label = if self.at_ident() { Some(self.ident()?) } else { None };
            self.expect(";")?;
            if is_break {
                StmtKind::Break(label)
            } else {
                StmtKind::Continue(label)
            }
        } else if self.at_kw("synchronized") {
            self.bump();
            let lock = self.paren_expr()?;
            let body = self.block()?;
            StmtKind::Synchronized { lock, body }
        } else if self.at_kw("assert") {
            self.bump();
            let cond = self.expr()?;
            let message = if self.eat(":") { Some(self.expr()?) } else { None };
            self.expect(";")?;
            StmtKind::Assert { cond, message }
        } else if self.at_ident() && self.text_at(1) == ":" && self.text_at(2) != ":" {
            let label = self.ident()?;
            self.bump();
            let body = Box::new(self.stmt()?);
            StmtKind::Labeled { label, body }
        } else if self.at_ident() && self.text() == "yield" && self.kind_at(1) != Some(TokenKind::Punctuation) && self.text_at(1) != "=" {
            return Err(self.unsupported("yield statement"));
        } else if self.at_kw("else") || self.at_kw("catch") || self.at_kw("finally") || self.at_kw("case") {
            return Err(self.error("unexpected keyword"));
        } else {
            let e = self.expr()?;
            if !is_statement_expression(&e) {
                return Err(SyntaxError::Syntax {
                    line: self.position(e.span.start).0,
                    column: self.position(e.span.start).1,
                    message: "not a statement".into(),
                });
            }
            self.expect(";")?;
            StmtKind::Expr(e)
        };
        Ok(Stmt {
            span: Span::new(start, self.prev_end),
            kind,
        })
    }

    fn for_rest(&mut self, start: usize) -> ParseResult<Stmt> {
        self.expect("(")?;
        let has_mods = self.at("@") || self.at_kw("final");
        let mut init = None;
        if has_mods || self.looks_like_local_decl() {
            let modifiers = self.modifiers()?;
            let ty = self.ty()?;
            let name = self.ident()?;
            if self.eat(":") {
                let iterable = self.expr()?;
                self.expect(")")?;
                let body = Box::new(self.stmt()?);
                return Ok(Stmt {
                    span: Span::new(start, self.prev_end),
                    kind: StmtKind::ForEach {
                        modifiers,
                        ty,
                        name,
                        iterable,
                        body,
                    },
                });
            }
            let declarators = self.declarators(Some(name))?;
            init = Some(ForInit::Decl(LocalVarDecl {
                modifiers,
                ty,
                declarators,
            }));
        } else if !self.at(";") {
            let mut exprs = vec![self.expr()?];
            while self.eat(",") {
                exprs.push(self.expr()?);
            }
            init = Some(ForInit::Exprs(exprs));
        }
        self.expect(";")?;
        let cond = if self.at(";") { None } else { Some(self.expr()?) };
        self.expect(";")?;
        let mut update = Vec::new();
        if !self.at(")") {
            update.push(self.expr()?);
            while self.eat(",") {
                update.push(self.expr()?);
            }
        }
        self.expect(")")?;
        let body = Box::new(self.stmt()?);
        Ok(Stmt {
            span: Span::new(start, self.prev_end),
            kind: StmtKind::For {
                init,
                cond,
                update,
                body,
            },
        })
    }

    fn switch_body(&mut self) -> ParseResult<Vec<SwitchCase>> {
        self.expect("{")?;
        let mut cases = Vec::new();
        while !self.at("}") {
            let start = self.cur_start();
            let mut labels = Vec::new();
            let is_default;
            if self.at_kw("case") {
                self.bump();
                is_default = false;
                labels.push(self.ternary()?);
                while self.eat(",") {
                    labels.push(self.ternary()?);
                }
            } else if self.at_kw("default") {
                self.bump();
                is_default = true;
            } else {
                return Err(self.error("expected `case` or `default`"));
            }
            if self.at("-") && self.text_at(1) == ">" || self.at("->") {
                return Err(self.unsupported("switch rule (`case ->`)"));
            }
            self.expect(":")?;
            let mut body = Vec::new();
            while !self.at("}") && !self.at_kw("case") && !self.at_kw("default") {
                if self.at_eof() {
                    return Err(self.error("expected `}`"));
                }
                body.push(self.block_stmt()?);
            }
            cases.push(SwitchCase {
                span: Span::new(start, self.prev_end),
                labels,
                is_default,
                body,
            });
        }
        self.bump();
        Ok(cases)
    }

    fn try_rest(&mut self) -> ParseResult<StmtKind> {
        let mut resources = Vec::new();
        if self.eat("(") {
            while !self.at(")") {
                let start = self.cur_start();
                let has_mods = self.at("@") || self.at_kw("final");
                if has_mods || self.looks_like_local_decl() {
                    let modifiers = self.modifiers()?;
                    let ty = self.ty()?;
                    let name = self.ident()?;
                    self.expect("=")?;
                    let init = self.expr()?;
                    resources.push(Resource::Decl {
                        span: Span::new(start, self.prev_end),
                        modifiers,
                        ty,
                        name,
                        init,
                    });
                } else {
                    resources.push(Resource::Expr(self.expr()?));
                }
                if !self.eat(";") {
                    break;
                }
            }
            self.expect(")")?;
        }
        let body = self.block()?;
        let mut catches = Vec::new();
        while self.at_kw("catch") {
            let start = self.bump().start;
            self.expect("(")?;
            let modifiers = self.modifiers()?;
            let mut types = vec![self.ty()?];
            while self.eat("|") {
                types.push(self.ty()?);
            }
            let name = self.ident()?;
            self.expect(")")?;
            let body = self.block()?;
            catches.push(CatchClause {
                span: Span::new(start, self.prev_end),
                modifiers,
                types,
                name,
                body,
            });
        }
        let finally = if self.at_kw("finally") {
            self.bump();
            Some(self.block()?)
        } else {
            None
        };
        if catches.is_empty() && finally.is_none() && resources.is_empty() {
            return Err(self.error("expected `catch` or `finally`"));
        }
        Ok(StmtKind::Try {
            resources,
            body,
            catches,
            finally,
        })
    }

    // ---- expressions ---------------------------------------------------

    fn expr(&mut self) -> ParseResult<Expr> {
        if let Some(lambda) = self.try_lambda()? {
            return Ok(lambda);
        }
        let start = self.cur_start();
        let lhs = self.ternary()?;
        if let Some((op, n)) = self.assign_op() {
            if !matches!(
                lhs.unparen().kind,
                ExprKind::Name(_) | ExprKind::FieldAccess { .. } | ExprKind::ArrayAccess { .. }
            ) {
                return Err(self.error("invalid assignment target"));
            }
            for _ in 0..n {
                self.bump();
            }
            let value = self.expr_or_array_init_in_assign()?;
            return Ok(Expr {
                span: Span::new(start, self.prev_end),
                kind: ExprKind::Assign {
                    op,
                    target: Box::new(lhs),
                    value: Box::new(value),
                },
            });
        }
        Ok(lhs)
    }

    fn expr_or_array_init_in_assign(&mut self) -> ParseResult<Expr> {
        // Only annotation element values may use a bare `{...}` here.
        self.expr()
    }

    /// Returns the compound operator (or `None` for `=`) and token count.
    fn assign_op(&self) -> Option<(Option<BinaryOp>, usize)> {
        let t = self.text();
        if self.at_eof() || self.kind_at(0) != Some(TokenKind::Operator) {
            return None;
        }
        match t {
            "=" => Some((None, 1)),
            "+=" | "-=" | "*=" | "/=" | "%=" | "&=" | "|=" | "^=" | "<<=" => {
                Some((BinaryOp::from_symbol(&t[..t.len() - 1]), 1))
            }
            ">" => {
                // `>>=` and `>>>=` arrive split into single characters.
                if self.text_at(1) == ">" && self.joined(1) {
                    if self.text_at(2) == "=" && self.joined(2) {
                        return Some((Some(BinaryOp::Shr), 3));
                    }
                    if self.text_at(2) == ">" && self.joined(2) && self.text_at(3) == "=" && self.joined(3) {
                        return Some((Some(BinaryOp::UShr), 4));
                    }
                }
                None
            }
            _ => None,
        }
    }

    fn try_lambda(&mut self) -> ParseResult<Option<Expr>> {
        let start = self.cur_start();
        if self.at_ident() && self.text_at(1) == "->" {
            let id = self.ident()?;
            self.bump();
            let body = self.lambda_body()?;
            return Ok(Some(Expr {
                span: Span::new(start, self.prev_end),
                kind: ExprKind::Lambda {
                    params: vec![LambdaParam::Inferred(id)],
                    body,
                },
            }));
        }
        if !self.at("(") {
            return Ok(None);
        }
        // Find the matching parenthesis and check for `->` after it.
        let mut depth = 0usize;
        let mut i = 0;
        loop {
            match self.peek_at(i) {
                None => return Ok(None),
                Some(t) => {
                    let s = &self.src[t.start..t.end];
                    if t.kind == TokenKind::Punctuation && s == "(" {
                        depth += 1;
                    } else if t.kind == TokenKind::Punctuation && s == ")" {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                }
            }
            i += 1;
        }
        if self.text_at(i + 1) != "->" {
            return Ok(None);
        }
        self.bump();
        let mut params = Vec::new();
        while !self.at(")") {
            if self.at_ident() && (self.text_at(1) == "," || self.text_at(1) == ")") {
                params.push(LambdaParam::Inferred(self.ident()?));
            } else {
                params.push(LambdaParam::Typed(self.param()?));
            }
            if !self.eat(",") {
                break;
            }
        }
        self.expect(")")?;
        self.expect("->")?;
        let body = self.lambda_body()?;
        Ok(Some(Expr {
            span: Span::new(start, self.prev_end),
            kind: ExprKind::Lambda { params, body },
        }))
    }

    fn lambda_body(&mut self) -> ParseResult<LambdaBody> {
        if self.at("{") {
            Ok(LambdaBody::Block(self.block()?))
        } else {
            Ok(LambdaBody::Expr(Box::new(self.expr()?)))
        }
    }

    fn ternary(&mut self) -> ParseResult<Expr> {
        let start = self.cur_start();
        let cond = self.binary(3)?;
        if self.at("?") {
            self.bump();
            let then_expr = self.ternary_branch()?;
            self.expect(":")?;
            let else_expr = self.ternary_branch()?;
            return Ok(Expr {
                span: Span::new(start, self.prev_end),
                kind: ExprKind::Ternary {
                    cond: Box::new(cond),
                    then_expr: Box::new(then_expr),
                    else_expr: Box::new(else_expr),
                },
            });
        }
        Ok(cond)
    }

    fn ternary_branch(&mut self) -> ParseResult<Expr> {
        if let Some(l) = self.try_lambda()? {
            return Ok(l);
        }
        self.ternary()
    }

    /// Current binary operator, gluing split `>` pieces. Returns the operator
    /// and the number of tokens it spans.
    fn binary_op(&self) -> Option<(BinaryOp, usize)> {
        if self.at_eof() {
            return None;
        }
        let kind = self.kind_at(0)?;
        if kind != TokenKind::Operator {
            return None;
        }
        let t = self.text();
        if t == ">" {
            let g1 = self.text_at(1) == ">" && self.joined(1);
            let g2 = g1 && self.text_at(2) == ">" && self.joined(2);
            let eq = |n: usize| self.text_at(n) == "=" && self.joined(n);
            if g2 {
                if eq(3) {
                    return None;
                }
                return Some((BinaryOp::UShr, 3));
            }
            if g1 {
                if eq(2) {
                    return None;
                }
                return Some((BinaryOp::Shr, 2));
            }
            if eq(1) {
                return Some((BinaryOp::Ge, 2));
            }
            return Some((BinaryOp::Gt, 1));
        }
        BinaryOp::from_symbol(t).map(|op| (op, 1))
    }

    fn binary(&mut self, min_prec: u8) -> ParseResult<Expr> {
        let start = self.cur_start();
        let mut lhs = self.unary()?;
        loop {
            if self.at_kw("instanceof") {
                if prec::INSTANCEOF < min_prec {
                    break;
                }
                self.bump();
                if self.at_kw("final") {
                    return Err(self.unsupported("final pattern binding"));
                }
                let ty = self.ty()?;
                let binding = if self.at_ident() { Some(self.ident()?) } else { None };
                lhs = Expr {
                    span: Span::new(start, self.prev_end),
                    kind: ExprKind::InstanceOf {
                        expr: Box::new(lhs),
                        ty,
                        binding,
                    },
                };
                continue;
            }
            let Some((op, n)) = self.binary_op() else { break };
            let p = op.precedence();
            if p < min_prec {
                break;
            }
            for _ in 0..n {
                self.bump();
            }
            let rhs = self.binary(p + 1)?;
            lhs = Expr {
                span: Span::new(start, self.prev_end),
                kind: ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> ParseResult<Expr> {
        let start = self.cur_start();
        let op = if self.kind_at(0) == Some(TokenKind::Operator) {
            match self.text() {
                "-" => Some(UnaryOp::Neg),
                "+" => Some(UnaryOp::Plus),
                "!" => Some(UnaryOp::Not),
                "~" => Some(UnaryOp::BitNot),
                "++" => Some(UnaryOp::PreInc),
                "--" => Some(UnaryOp::PreDec),
                _ => None,
            }
        } else {
            None
        };
        if let Some(op) = op {
            self.bump();
            let operand = self.unary()?;
            return Ok(Expr {
                span: Span::new(start, self.prev_end),
                kind: ExprKind::Unary {
                    op,
                    operand: Box::new(operand),
                },
            });
        }
        if self.at("(") {
            if let Some(cast) = self.try_cast()? {
                return Ok(cast);
            }
        }
        self.postfix()
    }

    fn try_cast(&mut self) -> ParseResult<Option<Expr>> {
        let start = self.cur_start();
        let checkpoint = (self.pos, self.prev_end);
        let parsed = self.speculate(|p| {
            p.expect("(")?;
            let ty = p.ty()?;
            p.expect(")")?;
            Ok(ty)
        });
        let Some(ty) = parsed else { return Ok(None) };
        let next_ok = if ty.is_primitive() {
            // `(int) -x` is a cast; `(int) + x` too.
            !self.at_eof() && !self.at(")") && !self.at(";") && !self.at(",")
        } else {
            match self.kind_at(0) {
                Some(TokenKind::Identifier) | Some(TokenKind::Literal) => true,
                Some(TokenKind::Keyword) => {
                    matches!(self.text(), "this" | "super" | "new") || is_primitive_name(self.text())
                }
                Some(TokenKind::Punctuation) => self.at("("),
                Some(TokenKind::Operator) => matches!(self.text(), "!" | "~"),
                _ => false,
            }
        };
        if !next_ok {
            self.pos = checkpoint.0;
            self.prev_end = checkpoint.1;
            return Ok(None);
        }
        let operand = if let Some(l) = self.try_lambda()? {
            l
        } else {
            self.unary()?
        };
        Ok(Some(Expr {
            span: Span::new(start, self.prev_end),
            kind: ExprKind::Cast {
                ty,
                expr: Box::new(operand),
            },
        }))
    }

    fn arguments(&mut self) -> ParseResult<Vec<Expr>> {
        self.expect("(")?;
        let mut args = Vec::new();
        while !self.at(")") {
            args.push(self.expr()?);
            if !self.eat(",") {
                break;
            }
        }
        self.expect(")")?;
        Ok(args)
    }

    fn postfix(&mut self) -> ParseResult<Expr> {
        let start = self.cur_start();
        let mut e = self.primary()?;
        loop {
            if self.at(".") {
                self.bump();
                if self.at("<") {
                    let type_args: Vec<TypeRef> = self
                        .type_args()?
                        .into_iter()
                        .filter_map(|a| match a {
                            TypeArg::Type(t) => Some(t),
                            TypeArg::Wildcard { .. } => None,
                        })
                        .collect();
                    let name = self.ident()?;
                    let args = self.arguments()?;
                    e = Expr {
                        span: Span::new(start, self.prev_end),
                        kind: ExprKind::Call {
                            target: Some(Box::new(e)),
                            type_args,
                            name,
                            args,
                        },
                    };
                } else if self.at_kw("class") {
                    self.bump();
                    let ty = self.type_from_expr(&e)?;
                    e = Expr {
                        span: Span::new(start, self.prev_end),
                        kind: ExprKind::ClassLit(ty),
                    };
                } else if self.at_kw("this") {
                    let t = self.bump();
                    e = Expr {
                        span: Span::new(start, self.prev_end),
                        kind: ExprKind::FieldAccess {
                            target: Box::new(e),
                            name: Ident {
                                name: "this".into(),
                                span: Span::new(t.start, t.end),
                            },
                        },
                    };
                } else if self.at_kw("new") {
                    return Err(self.unsupported("qualified inner class creation"));
                } else {
                    let name = self.ident()?;
                    if self.at("(") {
                        let args = self.arguments()?;
                        e = Expr {
                            span: Span::new(start, self.prev_end),
                            kind: ExprKind::Call {
                                target: Some(Box::new(e)),
                                type_args: Vec::new(),
                                name,
                                args,
                            },
                        };
                    } else {
                        e = Expr {
                            span: Span::new(start, self.prev_end),
                            kind: ExprKind::FieldAccess {
                                target: Box::new(e),
                                name,
                            },
                        };
                    }
                }
            } else if self.at("[") {
                if self.text_at(1) == "]" {
                    // `String[].class` or `int[]::new`
                    let mut ty = self.type_from_expr(&e)?;
                    while self.at("[") && self.text_at(1) == "]" {
                        self.bump();
                        self.bump();
                        ty.dims += 1;
                    }
                    ty.span.end = self.prev_end;
                    if self.at(".") && self.text_at(1) == "class" {
                        self.bump();
                        self.bump();
                        e = Expr {
                            span: Span::new(start, self.prev_end),
                            kind: ExprKind::ClassLit(ty),
                        };
                        continue;
                    }
                    return Err(self.unsupported("array constructor reference"));
                }
                self.bump();
                let index = self.expr()?;
                self.expect("]")?;
                e = Expr {
                    span: Span::new(start, self.prev_end),
                    kind: ExprKind::ArrayAccess {
                        array: Box::new(e),
                        index: Box::new(index),
                    },
                };
            } else if self.at("::") {
                self.bump();
                let name = if self.at_kw("new") {
                    let t = self.bump();
                    Ident {
                        name: "new".into(),
                        span: Span::new(t.start, t.end),
                    }
                } else {
                    self.ident()?
                };
                e = Expr {
                    span: Span::new(start, self.prev_end),
                    kind: ExprKind::MethodRef {
                        target: Box::new(e),
                        name,
                    },
                };
            } else if self.at("++") || self.at("--") {
                let op = if self.at("++") {
                    UnaryOp::PostInc
                } else {
                    UnaryOp::PostDec
                };
                self.bump();
                e = Expr {
                    span: Span::new(start, self.prev_end),
                    kind: ExprKind::Unary {
                        op,
                        operand: Box::new(e),
                    },
                };
            } else {
                return Ok(e);
            }
        }
    }

    fn type_from_expr(&self, e: &Expr) -> ParseResult<TypeRef> {
        fn dotted(e: &Expr) -> Option<String> {
            match &e.kind {
                ExprKind::Name(n) => Some(n.clone()),
                ExprKind::FieldAccess { target, name } => {
                    Some(format!("{}.{}", dotted(target)?, name.name))
                }
                _ => None,
            }
        }
        match dotted(e) {
            Some(name) => Ok(TypeRef {
                span: e.span,
                name,
                args: None,
                args_span: None,
                dims: 0,
            }),
            None => Err(self.error("expected type name")),
        }
    }

    fn primary(&mut self) -> ParseResult<Expr> {
        let start = self.cur_start();
        let Some(kind) = self.kind_at(0) else {
            return Err(self.error("expected expression"));
        };
        let text = self.text();
        let mk = |p: &Self, kind: ExprKind| Expr {
            span: Span::new(start, p.prev_end),
            kind,
        };
        match kind {
            TokenKind::Literal => {
                self.bump();
                let lit = literal_kind(text);
                Ok(mk(self, ExprKind::Literal(lit)))
            }
            TokenKind::Identifier => {
                if text == "switch" {
                    return Err(self.unsupported("switch expression"));
                }
                let id = self.ident()?;
                if self.at("(") {
                    let args = self.arguments()?;
                    return Ok(mk(
                        self,
                        ExprKind::Call {
                            target: None,
                            type_args: Vec::new(),
                            name: id,
                            args,
                        },
                    ));
                }
                Ok(mk(self, ExprKind::Name(id.name)))
            }
            TokenKind::Keyword => match text {
                "this" | "super" => {
                    let t = self.bump();
                    if self.at("(") {
                        let args = self.arguments()?;
                        return Ok(mk(
                            self,
                            ExprKind::Call {
                                target: None,
                                type_args: Vec::new(),
                                name: Ident {
                                    name: text.to_string(),
                                    span: Span::new(t.start, t.end),
                                },
                                args,
                            },
                        ));
                    }
                    Ok(mk(
                        self,
                        if text == "this" {
                            ExprKind::This
                        } else {
                            ExprKind::Super
                        },
                    ))
                }
                "new" => self.creator(start),
                "switch" => Err(self.unsupported("switch expression")),
                _ if is_primitive_name(text) => {
                    // `int.class`, `int[].class`
                    let mut ty = self.ty()?;
                    if self.at(".") && self.text_at(1) == "class" {
                        self.bump();
                        self.bump();
                        ty.span.end = self.prev_end;
                        return Ok(mk(self, ExprKind::ClassLit(ty)));
                    }
                    if self.at("::") {
                        return Err(self.unsupported("array constructor reference"));
                    }
                    Err(self.error("expected `.class` after primitive type"))
                }
                _ => Err(self.error("expected expression")),
            },
            TokenKind::Punctuation if text == "(" => {
                self.bump();
                let inner = self.expr()?;
                self.expect(")")?;
                Ok(mk(self, ExprKind::Paren(Box::new(inner))))
            }
            _ => Err(self.error("expected expression")),
        }
    }

    fn creator(&mut self, start: usize) -> ParseResult<Expr> {
        self.expect("new")?;
        if self.at("<") {
            return Err(self.unsupported("constructor type arguments"));
        }
        let elem = self.ty_no_dims()?;
        if self.at("[") {
            let mut sizes = Vec::new();
            let mut dims = 0;
            while self.at("[") {
                self.bump();
                if self.at("]") {
                    self.bump();
                    dims += 1;
                } else {
                    if dims > sizes.len() {
                        return Err(self.error("array dimension after empty dimension"));
                    }
                    sizes.push(self.expr()?);
                    self.expect("]")?;
                    dims += 1;
                }
            }
            let init = if self.at("{") {
                if !sizes.is_empty() {
                    return Err(self.error("array initializer with explicit size"));
                }
                Some(self.array_init_elems()?)
            } else {
                if sizes.is_empty() {
                    return Err(self.error("expected array initializer"));
                }
                None
            };
            return Ok(Expr {
                span: Span::new(start, self.prev_end),
                kind: ExprKind::NewArray {
                    elem,
                    sizes,
                    dims,
                    init,
                },
            });
        }
        let args = self.arguments()?;
        let body = if self.at("{") {
            Some(self.class_body()?)
        } else {
            None
        };
        Ok(Expr {
            span: Span::new(start, self.prev_end),
            kind: ExprKind::New {
                ty: elem,
                args,
                body,
            },
        })
    }
}

fn literal_kind(text: &str) -> LitKind {
    match text {
        "true" => LitKind::True,
        "false" => LitKind::False,
        "null" => LitKind::Null,
        _ if text.starts_with("\"\"\"") => LitKind::TextBlock,
        _ if text.starts_with('"') => LitKind::String,
        _ if text.starts_with('\'') => LitKind::Char,
        _ => {
            let lower = text.to_ascii_lowercase();
            let is_hex = lower.starts_with("0x");
            if lower.ends_with('l') {
                LitKind::Long
            } else if !is_hex && lower.ends_with('f') {
                LitKind::Float
            } else if !is_hex && (lower.ends_with('d') || lower.contains('.') || lower.contains('e')) {
                LitKind::Double
            } else {
                LitKind::Int
            }
        }
    }
}

fn is_statement_expression(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Assign { .. } | ExprKind::Call { .. } | ExprKind::New { .. } => true,
        ExprKind::Unary { op, .. } => op.is_mutation(),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn method(src: &str) -> MethodDecl {
        parse_method_fragment(src).unwrap().method
    }

    fn body(src: &str) -> Vec<Stmt> {
        method(src).body.unwrap().stmts
    }

    #[test]
    fn empty_method() {
        let m = method("void f() {}");
        assert!(m.is_void());
        assert!(m.body.unwrap().stmts.is_empty());
    }

    #[test]
    fn malformed_initializer_reports_position() {
        let err = parse_method_fragment("void f() { int x = ; }").unwrap_err();
        match err {
            SyntaxError::Syntax { line, column, .. } => {
                assert_eq!(line, 1);
                assert_eq!(column, 20);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn generics_close_with_shift_token() {
        let stmts = body("void f() { Map<String, List<Integer>> m = new HashMap<>(); int y = a >> 2; y >>= 1; }");
        assert_eq!(stmts.len(), 3);
        let StmtKind::LocalVar(decl) = &stmts[0].kind else { panic!() };
        assert_eq!(decl.ty.name, "Map");
        assert_eq!(decl.ty.args.as_ref().unwrap().len(), 2);
        let Some(ExprKind::New { ty, .. }) = decl.declarators[0].init.as_ref().map(|e| &e.kind) else {
            panic!()
        };
        assert_eq!(ty.args, Some(Vec::new()));
        let StmtKind::LocalVar(d2) = &stmts[1].kind else { panic!() };
        assert!(matches!(
            d2.declarators[0].init.as_ref().unwrap().kind,
            ExprKind::Binary { op: BinaryOp::Shr, .. }
        ));
        let StmtKind::Expr(e) = &stmts[2].kind else { panic!() };
        assert!(matches!(e.kind, ExprKind::Assign { op: Some(BinaryOp::Shr), .. }));
    }

    #[test]
    fn less_than_in_for_condition() {
        let stmts = body("void f() { for (int i = 0; i < xs.size(); i++) { total += xs.get(i); } }");
        assert!(matches!(stmts[0].kind, StmtKind::For { .. }));
    }

    #[test]
    fn foreach_and_lambda_and_casts() {
        let src = "int f(List<Integer> numbers) {
            for (final Integer n : numbers) { run(() -> n + 1); }
            Runnable r = () -> { System.out.println(\"x\"); };
            Function<Integer, Integer> g = x -> x * 2;
            BiFunction<Integer, Integer, Integer> h = (a, b) -> a + b;
            long l = (long) numbers.size();
            Object o = (Object) \"s\";
            int k = (l) + 1;
            return (int) l;
        }";
        let stmts = body(src);
        assert!(matches!(stmts[0].kind, StmtKind::ForEach { .. }));
        let StmtKind::LocalVar(d) = &stmts[6].kind else { panic!() };
        assert!(matches!(d.declarators[0].init.as_ref().unwrap().kind, ExprKind::Binary { .. }));
    }

    #[test]
    fn switch_try_and_labels() {
        let src = "void f(int x) throws IOException {
            outer:
            for (;;) { break outer; }
            switch (x) { case 1: case 2, 3: foo(); break; default: bar(); }
            try (InputStream in = open()) { read(in); } catch (IOException | RuntimeException e) { log(e); } finally { done(); }
            synchronized (this) { x++; }
            do { x--; } while (x > 0);
            assert x == 0 : \"msg\";
        }";
        let stmts = body(src);
        assert_eq!(stmts.len(), 6);
        let StmtKind::Switch { cases, .. } = &stmts[1].kind else { panic!() };
        assert_eq!(cases.len(), 3);
        assert_eq!(cases[1].labels.len(), 2);
        let StmtKind::Try { resources, catches, finally, .. } = &stmts[2].kind else { panic!() };
        assert_eq!(resources.len(), 1);
        assert_eq!(catches[0].types.len(), 2);
        assert!(finally.is_some());
    }

    #[test]
    fn anonymous_class_and_arrays() {
        let src = "void f() {
            Runnable r = new Runnable() { @Override public void run() { go(); } };
            int[] a = {1, 2, 3};
            int[][] b = new int[3][];
            String[] c = new String[] {\"a\"};
            Class<?> k = String[].class;
            a[0] = b.length + c[0].length();
        }";
        assert_eq!(body(src).len(), 6);
    }

    #[test]
    fn imports_before_method() {
        let frag = parse_method_fragment("import java.util.List;\nimport static org.junit.Assert.*;\nvoid f() {}").unwrap();
        assert_eq!(frag.imports.len(), 2);
        assert!(frag.imports[1].is_static && frag.imports[1].wildcard);
        assert_eq!(frag.imports[0].simple_name(), Some("List"));
    }

    #[test]
    fn unsupported_constructs_are_reported() {
        let err = parse_method_fragment("int f(int x) { return switch (x) { default -> 1; }; }").unwrap_err();
        assert!(matches!(err, SyntaxError::Unsupported { .. }), "{err:?}");
        let err = parse_method_fragment("void f() { class Local {} }").unwrap_err();
        assert!(matches!(err, SyntaxError::Unsupported { .. }));
        let err = parse_method_fragment("void f(int x) { switch (x) { case 1 -> foo(); } }").unwrap_err();
        assert!(matches!(err, SyntaxError::Unsupported { .. }));
    }

    #[test]
    fn not_a_statement() {
        assert!(parse_method_fragment("void f() { a + b; }").is_err());
        assert!(parse_method_fragment("void f() { x == 1; }").is_err());
    }

    #[test]
    fn compilation_unit() {
        let src = "package demo;\nimport java.util.*;\n\n/** doc */\npublic class Foo<T> extends Bar implements Baz {\n  private static final int N = 3, M;\n  static { init(); }\n  public Foo(int n) { this(n, 1); }\n  <R> R map(Function<T, R> f) { return f.apply(null); }\n  abstract void g();\n  enum Color { RED, GREEN(1) { }, ; Color() {} Color(int x) {} }\n  interface I { default int h() { return 1; } }\n}\n";
        let cu = parse_compilation_unit(src).unwrap();
        assert_eq!(cu.package.as_deref(), Some("demo"));
        assert_eq!(cu.types[0].name.name, "Foo");
        assert_eq!(cu.types[0].body.members.len(), 7);
    }

    #[test]
    fn ternary_and_instanceof() {
        let e = parse_expression("a instanceof String s && s.isEmpty() ? x : y ? 1 : 2").unwrap();
        let ExprKind::Ternary { cond, else_expr, .. } = e.kind else { panic!() };
        assert!(matches!(cond.kind, ExprKind::Binary { op: BinaryOp::And, .. }));
        assert!(matches!(else_expr.kind, ExprKind::Ternary { .. }));
    }

    #[test]
    fn generic_method_call_and_method_refs() {
        let e = parse_expression("Collections.<String>emptyList().stream().map(String::trim).toArray()").unwrap();
        assert!(matches!(e.kind, ExprKind::Call { .. }));
        let e = parse_expression("a >= b").unwrap();
        assert!(matches!(e.kind, ExprKind::Binary { op: BinaryOp::Ge, .. }));
        let e = parse_expression("a >>> 3 > b").unwrap();
        assert!(matches!(e.kind, ExprKind::Binary { op: BinaryOp::Gt, .. }));
    }

    #[test]
    fn spans_nest() {
        let src = "int f(int a) { if (a > 0) { return a; } else return -a; }";
        let m = method(src);
        let b = m.body.unwrap();
        let StmtKind::If { then_branch, else_branch, .. } = &b.stmts[0].kind else { panic!() };
        assert!(b.stmts[0].span.contains(&then_branch.span));
        assert!(then_branch.span.end <= else_branch.as_ref().unwrap().span.start);
        assert_eq!(else_branch.as_ref().unwrap().span.text(src), "return -a;");
    }
}
