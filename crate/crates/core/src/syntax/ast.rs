//! Typed syntax tree for the supported Java subset. Every node carries the
//! byte span it was parsed from.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn text<'a>(&self, src: &'a str) -> &'a str {
        &src[self.start..self.end]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub span: Span,
    pub name: String,
    pub args: Vec<Expr>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Modifiers {
    pub annotations: Vec<Annotation>,
    pub keywords: Vec<String>,
}

impl Modifiers {
    pub fn has(&self, kw: &str) -> bool {
        self.keywords.iter().any(|k| k == kw)
    }

    pub fn is_empty(&self) -> bool {
        self.annotations.is_empty() && self.keywords.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeArg {
    Type(TypeRef),
    Wildcard {
        span: Span,
        bound: Option<(WildcardBound, Box<TypeRef>)>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WildcardBound {
    Extends,
    Super,
}

/// A (possibly qualified, possibly generic) type reference such as
/// `java.util.Map<String, List<Integer>>[]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeRef {
    pub span: Span,
    /// Dotted name, e.g. `Map.Entry`.
    pub name: String,
    /// `None`: no type arguments; `Some(empty)`: diamond `<>`.
    /// Arguments of every segment are attached to the last one.
    pub args: Option<Vec<TypeArg>>,
    pub args_span: Option<Span>,
    pub dims: usize,
}

impl TypeRef {
    pub fn simple_name(&self) -> &str {
        self.name.rsplit('.').next().unwrap_or(&self.name)
    }

    pub fn is_primitive(&self) -> bool {
        self.dims == 0 && is_primitive_name(&self.name)
    }
}

pub fn is_primitive_name(name: &str) -> bool {
    matches!(
        name,
        "boolean" | "byte" | "short" | "int" | "long" | "char" | "float" | "double" | "void"
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeParam {
    pub span: Span,
    pub name: Ident,
    pub bounds: Vec<TypeRef>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub span: Span,
    pub modifiers: Modifiers,
    pub ty: TypeRef,
    pub varargs: bool,
    pub name: Ident,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodDecl {
    pub span: Span,
    pub modifiers: Modifiers,
    pub type_params: Vec<TypeParam>,
    /// `None` for constructors.
    pub return_type: Option<TypeRef>,
    pub name: Ident,
    pub params: Vec<Param>,
    pub throws: Vec<TypeRef>,
    /// `None` for abstract and interface methods.
    pub body: Option<Block>,
}

impl MethodDecl {
    pub fn is_void(&self) -> bool {
        self.return_type
            .as_ref()
            .is_none_or(|t| t.name == "void" && t.dims == 0)
    }

    pub fn is_constructor(&self) -> bool {
        self.return_type.is_none()
    }

    /// `name(T1,T2)` using parameter type text as written.
    pub fn signature(&self, src: &str) -> String {
        let params: Vec<String> = self
            .params
            .iter()
            .map(|p| {
                let mut t: String = p.ty.span.text(src).split_whitespace().collect();
                if p.varargs {
                    t.push_str("...");
                }
                t
            })
            .collect();
        format!("{}({})", self.name.name, params.join(","))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub span: Span,
    pub stmts: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Declarator {
    pub span: Span,
    pub name: Ident,
    pub dims: usize,
    pub init: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalVarDecl {
    pub modifiers: Modifiers,
    pub ty: TypeRef,
    pub declarators: Vec<Declarator>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ForInit {
    Decl(LocalVarDecl),
    Exprs(Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchCase {
    pub span: Span,
    /// Empty for `default:`.
    pub labels: Vec<Expr>,
    pub is_default: bool,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatchClause {
    pub span: Span,
    pub modifiers: Modifiers,
    pub types: Vec<TypeRef>,
    pub name: Ident,
    pub body: Block,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Resource {
    Decl {
        span: Span,
        modifiers: Modifiers,
        ty: TypeRef,
        name: Ident,
        init: Expr,
    },
    Expr(Expr),
}

impl Resource {
    pub fn span(&self) -> Span {
        match self {
            Resource::Decl { span, .. } => *span,
            Resource::Expr(e) => e.span,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub span: Span,
    pub kind: StmtKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    LocalVar(LocalVarDecl),
    Expr(Expr),
    If {
        cond: Expr,
        then_branch: Box<Stmt>,
        else_branch: Option<Box<Stmt>>,
    },
    For {
        init: Option<ForInit>,
        cond: Option<Expr>,
        update: Vec<Expr>,
        body: Box<Stmt>,
    },
    ForEach {
        modifiers: Modifiers,
        ty: TypeRef,
        name: Ident,
        iterable: Expr,
        body: Box<Stmt>,
    },
    While {
        cond: Expr,
        body: Box<Stmt>,
    },
    Do {
        body: Box<Stmt>,
        cond: Expr,
    },
    Switch {
        selector: Expr,
        cases: Vec<SwitchCase>,
    },
    Try {
        resources: Vec<Resource>,
        body: Block,
        catches: Vec<CatchClause>,
        finally: Option<Block>,
    },
    Return(Option<Expr>),
    Throw(Expr),
    Break(Option<Ident>),
    Continue(Option<Ident>),
    Block(Block),
    Labeled {
        label: Ident,
        body: Box<Stmt>,
    },
    Synchronized {
        lock: Expr,
        body: Block,
    },
    Assert {
        cond: Expr,
        message: Option<Expr>,
    },
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LitKind {
    Int,
    Long,
    Float,
    Double,
    Char,
    String,
    TextBlock,
    True,
    False,
    Null,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Plus,
    Not,
    BitNot,
    PreInc,
    PreDec,
    PostInc,
    PostDec,
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Plus => "+",
            UnaryOp::Not => "!",
            UnaryOp::BitNot => "~",
            UnaryOp::PreInc | UnaryOp::PostInc => "++",
            UnaryOp::PreDec | UnaryOp::PostDec => "--",
        }
    }

    pub fn is_postfix(self) -> bool {
        matches!(self, UnaryOp::PostInc | UnaryOp::PostDec)
    }

    pub fn is_mutation(self) -> bool {
        matches!(
            self,
            UnaryOp::PreInc | UnaryOp::PreDec | UnaryOp::PostInc | UnaryOp::PostDec
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Or,
    And,
    BitOr,
    BitXor,
    BitAnd,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    Shl,
    Shr,
    UShr,
    Add,
    Sub,
    Mul,
    Div,
    Rem,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Or => "||",
            BinaryOp::And => "&&",
            BinaryOp::BitOr => "|",
            BinaryOp::BitXor => "^",
            BinaryOp::BitAnd => "&",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Gt => ">",
            BinaryOp::Le => "<=",
            BinaryOp::Ge => ">=",
            BinaryOp::Shl => "<<",
            BinaryOp::Shr => ">>",
            BinaryOp::UShr => ">>>",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Rem => "%",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 3,
            BinaryOp::And => 4,
            BinaryOp::BitOr => 5,
            BinaryOp::BitXor => 6,
            BinaryOp::BitAnd => 7,
            BinaryOp::Eq | BinaryOp::Ne => 8,
            BinaryOp::Lt | BinaryOp::Gt | BinaryOp::Le | BinaryOp::Ge => 9,
            BinaryOp::Shl | BinaryOp::Shr | BinaryOp::UShr => 10,
            BinaryOp::Add | BinaryOp::Sub => 11,
            BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem => 12,
        }
    }

    pub fn from_symbol(sym: &str) -> Option<BinaryOp> {
        Some(match sym {
            "||" => BinaryOp::Or,
            "&&" => BinaryOp::And,
            "|" => BinaryOp::BitOr,
            "^" => BinaryOp::BitXor,
            "&" => BinaryOp::BitAnd,
            "==" => BinaryOp::Eq,
            "!=" => BinaryOp::Ne,
            "<" => BinaryOp::Lt,
            ">" => BinaryOp::Gt,
            "<=" => BinaryOp::Le,
            ">=" => BinaryOp::Ge,
            "<<" => BinaryOp::Shl,
            ">>" => BinaryOp::Shr,
            ">>>" => BinaryOp::UShr,
            "+" => BinaryOp::Add,
            "-" => BinaryOp::Sub,
            "*" => BinaryOp::Mul,
            "/" => BinaryOp::Div,
            "%" => BinaryOp::Rem,
            _ => return None,
        })
    }

    pub fn is_short_circuit(self) -> bool {
        matches!(self, BinaryOp::And | BinaryOp::Or)
    }
}

/// Operator precedence levels used for parenthesization decisions.
pub mod prec {
    pub const LAMBDA: u8 = 0;
    pub const ASSIGN: u8 = 1;
    pub const TERNARY: u8 = 2;
    pub const INSTANCEOF: u8 = 9;
    pub const UNARY: u8 = 13;
    pub const POSTFIX: u8 = 14;
    pub const PRIMARY: u8 = 15;
}

#[derive(Debug, Clone, PartialEq)]
pub enum LambdaParam {
    Inferred(Ident),
    Typed(Param),
}

impl LambdaParam {
    pub fn name(&self) -> &Ident {
        match self {
            LambdaParam::Inferred(id) => id,
            LambdaParam::Typed(p) => &p.name,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LambdaBody {
    Expr(Box<Expr>),
    Block(Block),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub span: Span,
    pub kind: ExprKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Literal(LitKind),
    Name(String),
    This,
    Super,
    FieldAccess {
        target: Box<Expr>,
        name: Ident,
    },
    ArrayAccess {
        array: Box<Expr>,
        index: Box<Expr>,
    },
    Call {
        target: Option<Box<Expr>>,
        type_args: Vec<TypeRef>,
        name: Ident,
        args: Vec<Expr>,
    },
    New {
        ty: TypeRef,
        args: Vec<Expr>,
        body: Option<ClassBody>,
    },
    NewArray {
        elem: TypeRef,
        /// Sized dimensions; `dims` counts all brackets.
        sizes: Vec<Expr>,
        dims: usize,
        init: Option<Vec<Expr>>,
    },
    ArrayInit(Vec<Expr>),
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Assign {
        /// `None` for plain `=`, otherwise the compound operator.
        op: Option<BinaryOp>,
        target: Box<Expr>,
        value: Box<Expr>,
    },
    Ternary {
        cond: Box<Expr>,
        then_expr: Box<Expr>,
        else_expr: Box<Expr>,
    },
    InstanceOf {
        expr: Box<Expr>,
        ty: TypeRef,
        binding: Option<Ident>,
    },
    Cast {
        ty: TypeRef,
        expr: Box<Expr>,
    },
    Lambda {
        params: Vec<LambdaParam>,
        body: LambdaBody,
    },
    MethodRef {
        target: Box<Expr>,
        name: Ident,
    },
    ClassLit(TypeRef),
    Paren(Box<Expr>),
}

impl Expr {
    /// Precedence of the outermost operator of this expression.
    pub fn precedence(&self) -> u8 {
        match &self.kind {
            ExprKind::Lambda { .. } => prec::LAMBDA,
            ExprKind::Assign { .. } => prec::ASSIGN,
            ExprKind::Ternary { .. } => prec::TERNARY,
            ExprKind::Binary { op, .. } => op.precedence(),
            ExprKind::InstanceOf { .. } => prec::INSTANCEOF,
            ExprKind::Unary { op, .. } if op.is_postfix() => prec::POSTFIX,
            ExprKind::Unary { .. } | ExprKind::Cast { .. } => prec::UNARY,
            _ => prec::PRIMARY,
        }
    }

    /// Strips any number of enclosing parentheses.
    pub fn unparen(&self) -> &Expr {
        let mut e = self;
        while let ExprKind::Paren(inner) = &e.kind {
            e = inner;
        }
        e
    }

    pub fn as_name(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Name(n) => Some(n),
            _ => None,
        }
    }

    pub fn is_bool_literal(&self, value: bool) -> bool {
        matches!(
            (&self.unparen().kind, value),
            (ExprKind::Literal(LitKind::True), true) | (ExprKind::Literal(LitKind::False), false)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassBody {
    pub span: Span,
    pub members: Vec<Member>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDecl {
    pub span: Span,
    pub modifiers: Modifiers,
    pub ty: TypeRef,
    pub declarators: Vec<Declarator>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Member {
    Field(FieldDecl),
    Method(MethodDecl),
    Initializer { span: Span, is_static: bool, body: Block },
    Type(TypeDecl),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypeDeclKind {
    Class,
    Interface,
    Enum,
    Annotation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnumConstant {
    pub span: Span,
    pub name: Ident,
    pub args: Vec<Expr>,
    pub body: Option<ClassBody>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeDecl {
    pub span: Span,
    pub modifiers: Modifiers,
    pub kind: TypeDeclKind,
    pub name: Ident,
    pub type_params: Vec<TypeParam>,
    pub extends: Vec<TypeRef>,
    pub implements: Vec<TypeRef>,
    pub enum_constants: Vec<EnumConstant>,
    pub body: ClassBody,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImportDecl {
    pub span: Span,
    pub is_static: bool,
    /// Dotted path without the trailing `.*`.
    pub path: String,
    pub wildcard: bool,
}

impl ImportDecl {
    /// The simple name an import brings into scope; `None` for wildcards.
    pub fn simple_name(&self) -> Option<&str> {
        if self.wildcard {
            None
        } else {
            self.path.rsplit('.').next()
        }
    }

    /// Package (or enclosing type, for static imports) of the import.
    pub fn package(&self) -> &str {
        if self.wildcard {
            &self.path
        } else {
            self.path.rsplit_once('.').map_or("", |(p, _)| p)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompilationUnit {
    pub span: Span,
    pub package: Option<String>,
    pub imports: Vec<ImportDecl>,
    pub types: Vec<TypeDecl>,
}
