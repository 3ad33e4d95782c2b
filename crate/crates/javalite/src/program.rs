//! Source tree loading: every `.java` file parsed into class tables.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::rc::Rc;

use simplikit_core::syntax::ast::{
    Block, ClassBody, CompilationUnit, EnumConstant, FieldDecl, ImportDecl, Member, MethodDecl, TypeDecl, TypeDeclKind,
};
use simplikit_core::syntax::parser::parse_compilation_unit;

/// A compiler-style message anchored to a file position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: PathBuf,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: error: {}", self.path.display(), self.line, self.column, self.message)
    }
}

pub fn line_col(src: &str, off: usize) -> (usize, usize) {
    let before = &src[..off.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |p| before.len() - p - 1) + 1;
    (line, col)
}

#[derive(Debug)]
pub struct ClassInfo {
    pub name: String,
    pub path: PathBuf,
    pub src: Rc<str>,
    pub kind: TypeDeclKind,
    pub superclass: Option<String>,
    pub interfaces: Vec<String>,
    pub fields: Vec<FieldDecl>,
    /// Methods and constructors in declaration order.
    pub methods: Vec<MethodDecl>,
    pub initializers: Vec<(bool, Block)>,
    pub enum_constants: Vec<EnumConstant>,
    pub imports: Vec<ImportDecl>,
}

impl ClassInfo {
    pub fn diag(&self, off: usize, message: impl Into<String>) -> Diagnostic {
        let (line, column) = line_col(&self.src, off);
        Diagnostic {
            path: self.path.clone(),
            line,
            column,
            message: message.into(),
        }
    }

    pub fn constructors(&self) -> impl Iterator<Item = &MethodDecl> {
        self.methods.iter().filter(|m| m.is_constructor())
    }

    pub fn is_test_class(&self) -> bool {
        self.methods.iter().any(|m| has_annotation(m, "Test"))
    }
}

pub fn has_annotation(m: &MethodDecl, name: &str) -> bool {
    m.modifiers
        .annotations
        .iter()
        .any(|a| a.name == name || a.name.rsplit('.').next() == Some(name))
}

#[derive(Debug, Default)]
pub struct Program {
    /// Keyed by simple name; nested types are flattened.
    pub classes: BTreeMap<String, Rc<ClassInfo>>,
}

pub const DEFAULT_EXCLUDES: &[&str] = &["target", "build", "out", "reports"];

impl Program {
    /// Parses every `.java` file under `root`, skipping hidden and build
    /// output directories. Syntax errors and duplicate classes are reported
    /// together.
    pub fn load(root: &Path) -> Result<Program, Vec<Diagnostic>> {
        let mut files: Vec<PathBuf> = walkdir::WalkDir::new(root)
            .sort_by_file_name()
            .into_iter()
            .filter_entry(|e| {
                let name = e.file_name().to_string_lossy();
                e.depth() == 0 || !(name.starts_with('.') || (e.file_type().is_dir() && DEFAULT_EXCLUDES.contains(&name.as_ref())))
            })
            .filter_map(Result::ok)
            .filter(|e| e.file_type().is_file() && e.path().extension().is_some_and(|x| x == "java"))
            .map(|e| e.into_path())
            .collect();
        files.sort();
        let mut program = Program::default();
        let mut diags = Vec::new();
        for path in files {
            let src = match std::fs::read_to_string(&path) {
                Ok(s) => s,
                Err(e) => {
                    diags.push(Diagnostic {
                        path,
                        line: 0,
                        column: 0,
                        message: e.to_string(),
                    });
                    continue;
                }
            };
            let rel = path.strip_prefix(root).unwrap_or(&path).to_path_buf();
            if let Err(d) = program.add_source(rel, &src) {
                diags.extend(d);
            }
        }
        if diags.is_empty() {
            Ok(program)
        } else {
            Err(diags)
        }
    }

    pub fn add_source(&mut self, path: PathBuf, src: &str) -> Result<(), Vec<Diagnostic>> {
        let unit: CompilationUnit = parse_compilation_unit(src).map_err(|e| {
            vec![Diagnostic {
                path: path.clone(),
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            }]
        })?;
        let src: Rc<str> = src.into();
        let mut diags = Vec::new();
        let mut pending: Vec<&TypeDecl> = unit.types.iter().collect();
        while let Some(t) = pending.pop() {
            pending.extend(t.body.members.iter().filter_map(|m| match m {
                Member::Type(t) => Some(t),
                _ => None,
            }));
            let info = class_info(t, &path, &src, &unit.imports);
            if self.classes.contains_key(&info.name) {
                diags.push(info.diag(t.name.span.start, format!("duplicate class {}", info.name)));
                continue;
            }
            self.classes.insert(info.name.clone(), Rc::new(info));
        }
        if diags.is_empty() {
            Ok(())
        } else {
            Err(diags)
        }
    }

    pub fn class(&self, name: &str) -> Option<&Rc<ClassInfo>> {
        self.classes
            .get(name)
            .or_else(|| self.classes.get(name.rsplit('.').next().unwrap_or(name)))
    }

    /// `name` and its project superclasses, leaf first.
    pub fn chain(&self, name: &str) -> Vec<&Rc<ClassInfo>> {
        let mut out: Vec<&Rc<ClassInfo>> = Vec::new();
        let mut cur = self.class(name);
        while let Some(c) = cur {
            if out.iter().any(|o| o.name == c.name) {
                break;
            }
            out.push(c);
            cur = c.superclass.as_deref().and_then(|s| self.class(s));
        }
        out
    }

    /// Nearest non-project ancestor name (e.g. `RuntimeException`).
    pub fn builtin_root(&self, name: &str) -> Option<String> {
        self.chain(name).last().and_then(|c| c.superclass.clone()).filter(|s| self.class(s).is_none())
    }

    /// Whether project class `sub` is `sup` or extends/implements it.
    pub fn is_subtype(&self, sub: &str, sup: &str) -> bool {
        let sup = sup.rsplit('.').next().unwrap_or(sup);
        let mut stack = vec![sub.to_string()];
        let mut seen = Vec::new();
        while let Some(n) = stack.pop() {
            if n == sup {
                return true;
            }
            if seen.contains(&n) {
                continue;
            }
            seen.push(n.clone());
            if let Some(c) = self.class(&n) {
                stack.extend(c.superclass.iter().cloned());
                stack.extend(c.interfaces.iter().cloned());
            } else if let Some(s) = builtin_super(&n) {
                stack.push(s.to_string());
            }
        }
        false
    }
}

fn simple(name: &str) -> String {
    name.rsplit('.').next().unwrap_or(name).to_string()
}

fn class_info(t: &TypeDecl, path: &Path, src: &Rc<str>, imports: &[ImportDecl]) -> ClassInfo {
    let (superclass, interfaces) = match t.kind {
        TypeDeclKind::Interface => (None, t.extends.iter().map(|x| simple(&x.name)).collect()),
        _ => (
            t.extends.first().map(|x| simple(&x.name)),
            t.implements.iter().map(|x| simple(&x.name)).collect(),
        ),
    };
    let mut info = ClassInfo {
        name: t.name.name.clone(),
        path: path.to_path_buf(),
        src: src.clone(),
        kind: t.kind,
        superclass,
        interfaces,
        fields: Vec::new(),
        methods: Vec::new(),
        initializers: Vec::new(),
        enum_constants: t.enum_constants.clone(),
        imports: imports.to_vec(),
    };
    collect_members(&t.body, &mut info);
    info
}

fn collect_members(body: &ClassBody, info: &mut ClassInfo) {
    for m in &body.members {
        match m {
            Member::Field(f) => info.fields.push(f.clone()),
            Member::Method(m) => info.methods.push(m.clone()),
            Member::Initializer { is_static, body, .. } => info.initializers.push((*is_static, body.clone())),
            Member::Type(_) => {}
        }
    }
}

/// Superclass of builtin throwables and a few library types.
pub fn builtin_super(name: &str) -> Option<&'static str> {
    Some(match name {
        "Object" => return None,
        "Throwable" => "Object",
        "Exception" | "Error" => "Throwable",
        "RuntimeException" | "IOException" | "InterruptedException" | "CloneNotSupportedException" => "Exception",
        "FileNotFoundException" | "EOFException" => "IOException",
        "UncheckedIOException" => "RuntimeException",
        "IllegalArgumentException"
        | "IllegalStateException"
        | "NullPointerException"
        | "ArithmeticException"
        | "IndexOutOfBoundsException"
        | "ClassCastException"
        | "UnsupportedOperationException"
        | "NoSuchElementException"
        | "ConcurrentModificationException"
        | "NegativeArraySizeException" => "RuntimeException",
        "ArrayIndexOutOfBoundsException" | "StringIndexOutOfBoundsException" => "IndexOutOfBoundsException",
        "NumberFormatException" => "IllegalArgumentException",
        "AssertionError" | "StackOverflowError" | "OutOfMemoryError" => "Error",
        "AssertionFailedError" => "AssertionError",
        n if n.ends_with("Exception") => "RuntimeException",
        n if n.ends_with("Error") => "Error",
        _ => "Object",
    })
}

pub fn is_throwable_name(name: &str) -> bool {
    let mut cur = Some(name);
    while let Some(n) = cur {
        if n == "Throwable" {
            return true;
        }
        cur = builtin_super(n);
    }
    false
}
