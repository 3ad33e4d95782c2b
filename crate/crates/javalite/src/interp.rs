//! Tree-walking evaluation of method bodies.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use simplikit_core::syntax::ast::*;

use crate::builtins;
use crate::program::{ClassInfo, Program};
use crate::value::{
    display_builtin, parse_float_literal, parse_int_literal, unescape, Closure, ClosureBody, Object, Prim, Value,
};

pub const DEFAULT_MAX_STEPS: u64 = 5_000_000;
pub const MAX_DEPTH: usize = 400;

#[derive(Debug, Clone)]
pub enum Thrown {
    /// A Java exception object in flight.
    Exception(Value),
    /// The interpreter cannot continue (unsupported construct, step limit).
    Fatal(String),
}

pub type R<T> = Result<T, Thrown>;

#[derive(Debug)]
pub enum Flow {
    Normal,
    Break(Option<String>),
    Continue(Option<String>),
    Return(Value),
}

struct Slot {
    value: Value,
    prim: Option<Prim>,
}

pub struct Frame<'p> {
    class: &'p ClassInfo,
    this: Option<Value>,
    scopes: Vec<HashMap<String, Slot>>,
    src: Rc<str>,
}

impl<'p> Frame<'p> {
    fn declare(&mut self, name: &str, value: Value, prim: Option<Prim>) {
        let value = match prim {
            Some(p) => value.coerce(p),
            None => value,
        };
        if let Some(s) = self.scopes.last_mut() {
            s.insert(name.to_string(), Slot { value, prim });
        }
    }

    fn slot(&mut self, name: &str) -> Option<&mut Slot> {
        self.scopes.iter_mut().rev().find_map(|s| s.get_mut(name))
    }
}

enum Place {
    Local(String),
    Field(Rc<Object>, String),
    Static(String, String),
    Elem(Value, usize),
}

pub struct Interp<'p> {
    pub program: &'p Program,
    pub steps: u64,
    pub max_steps: u64,
    depth: usize,
    pub stdout: String,
    statics: HashMap<String, HashMap<String, Value>>,
    initialized: HashSet<String>,
}

fn prim_of(ty: &TypeRef) -> Option<Prim> {
    if ty.dims == 0 {
        Prim::of(&ty.name)
    } else {
        None
    }
}

fn default_for(ty: &TypeRef, extra_dims: usize) -> Value {
    if ty.dims + extra_dims > 0 {
        return Value::Null;
    }
    default_prim(Prim::of(&ty.name))
}

fn default_prim(p: Option<Prim>) -> Value {
    match p {
        Some(Prim::Boolean) => Value::Bool(false),
        Some(Prim::Long) => Value::Long(0),
        Some(Prim::Double | Prim::Float) => Value::Double(0.0),
        Some(Prim::Char) => Value::Char('\0'),
        Some(_) => Value::Int(0),
        None => Value::Null,
    }
}

pub fn truthy(v: &Value) -> R<bool> {
    match v {
        Value::Bool(b) => Ok(*b),
        other => Err(Thrown::Fatal(format!("expected boolean, found {}", other.class_name()))),
    }
}

impl<'p> Interp<'p> {
    pub fn new(program: &'p Program) -> Self {
        Interp {
            program,
            steps: 0,
            max_steps: DEFAULT_MAX_STEPS,
            depth: 0,
            stdout: String::new(),
            statics: HashMap::new(),
            initialized: HashSet::new(),
        }
    }

    fn tick(&mut self) -> R<()> {
        self.steps += 1;
        if self.steps > self.max_steps {
            return Err(Thrown::Fatal(format!("step limit of {} exceeded", self.max_steps)));
        }
        Ok(())
    }

    pub fn exception(&self, class: &str, message: Option<String>) -> Value {
        let mut fields = HashMap::new();
        fields.insert("message".to_string(), message.map_or(Value::Null, Value::str));
        Value::object(class, fields)
    }

    pub fn throw(&self, class: &str, message: impl Into<String>) -> Thrown {
        Thrown::Exception(self.exception(class, Some(message.into())))
    }

    fn class_info(&self, name: &str) -> R<&'p ClassInfo> {
        self.program
            .class(name)
            .map(|c| &**c)
            .ok_or_else(|| Thrown::Fatal(format!("unknown class {name}")))
    }

    fn frame(&self, class: &'p ClassInfo, this: Option<Value>) -> Frame<'p> {
        Frame {
            class,
            this,
            scopes: vec![HashMap::new()],
            src: class.src.clone(),
        }
    }

    // ---- classes, statics, objects

    fn ensure_static(&mut self, class: &str) -> R<()> {
        let Some(info) = self.program.class(class).map(|c| &**c) else {
            return Ok(());
        };
        if !self.initialized.insert(info.name.clone()) {
            return Ok(());
        }
        self.statics.entry(info.name.clone()).or_default();
        if let Some(sup) = &info.superclass {
            self.ensure_static(sup)?;
        }
        for (ordinal, c) in info.enum_constants.iter().enumerate() {
            let mut f = self.frame(info, None);
            let args = self.eval_args(&mut f, &c.args)?;
            let obj = self.new_object(info, args, Some((c.name.name.clone(), ordinal)))?;
            self.statics.entry(info.name.clone()).or_default().insert(c.name.name.clone(), obj);
        }
        let is_iface = info.kind == TypeDeclKind::Interface;
        for fd in &info.fields {
            if !(fd.modifiers.has("static") || is_iface) {
                continue;
            }
            for d in &fd.declarators {
                let prim = if d.dims == 0 { prim_of(&fd.ty) } else { None };
                let v = match &d.init {
                    Some(e) => {
                        let mut f = self.frame(info, None);
                        self.eval_init(&mut f, e, &fd.ty, d.dims)?
                    }
                    None => default_for(&fd.ty, d.dims),
                };
                let v = prim.map_or(v.clone(), |p| v.coerce(p));
                self.statics.entry(info.name.clone()).or_default().insert(d.name.name.clone(), v);
            }
        }
        for (is_static, block) in &info.initializers {
            if *is_static {
                let mut f = self.frame(info, None);
                self.exec_block(&mut f, &block.stmts)?;
            }
        }
        Ok(())
    }

    fn static_owner(&mut self, class: &str, name: &str) -> R<Option<String>> {
        let mut stack = vec![class.to_string()];
        while let Some(c) = stack.pop() {
            let Some(info) = self.program.class(&c) else { continue };
            self.ensure_static(&info.name)?;
            if self.statics.get(&info.name).is_some_and(|m| m.contains_key(name)) {
                return Ok(Some(info.name.clone()));
            }
            stack.extend(info.interfaces.iter().cloned());
            stack.extend(info.superclass.iter().cloned());
        }
        Ok(None)
    }

    fn field_prim(&self, class: &str, name: &str) -> Option<Prim> {
        for c in self.program.chain(class) {
            for fd in &c.fields {
                if let Some(d) = fd.declarators.iter().find(|d| d.name.name == name) {
                    return if d.dims == 0 { prim_of(&fd.ty) } else { None };
                }
            }
        }
        None
    }

    /// Allocates an instance of project class `info`, runs field
    /// initializers (root class first) and then the matching constructor.
    fn new_object(&mut self, info: &'p ClassInfo, args: Vec<Value>, enum_tag: Option<(String, usize)>) -> R<Value> {
        if info.kind == TypeDeclKind::Interface || info.kind == TypeDeclKind::Annotation {
            return Err(Thrown::Fatal(format!("cannot instantiate interface {}", info.name)));
        }
        self.ensure_static(&info.name)?;
        let obj = Rc::new(Object {
            class: info.name.clone(),
            fields: Default::default(),
        });
        if let Some((name, ordinal)) = enum_tag {
            let mut fields = obj.fields.borrow_mut();
            fields.insert("$name".into(), Value::str(name));
            fields.insert("$ordinal".into(), Value::Int(ordinal as i32));
        }
        let this = Value::Object(obj.clone());
        let chain: Vec<&'p ClassInfo> = self.program.chain(&info.name).into_iter().map(|c| &**c).collect();
        for c in chain.iter().rev() {
            for fd in c.fields.iter().filter(|f| !f.modifiers.has("static")) {
                for d in &fd.declarators {
                    let v = match &d.init {
                        Some(e) => {
                            let mut f = self.frame(c, Some(this.clone()));
                            self.eval_init(&mut f, e, &fd.ty, d.dims)?
                        }
                        None => default_for(&fd.ty, d.dims),
                    };
                    let prim = if d.dims == 0 { prim_of(&fd.ty) } else { None };
                    obj.fields
                        .borrow_mut()
                        .insert(d.name.name.clone(), prim.map_or(v.clone(), |p| v.coerce(p)));
                }
            }
            for (is_static, block) in &c.initializers {
                if !*is_static {
                    let mut f = self.frame(c, Some(this.clone()));
                    self.exec_block(&mut f, &block.stmts)?;
                }
            }
        }
        self.run_constructor(info, &this, args)?;
        Ok(this)
    }

    fn run_constructor(&mut self, info: &'p ClassInfo, this: &Value, args: Vec<Value>) -> R<()> {
        let ctors: Vec<&'p MethodDecl> = info.constructors().collect();
        if ctors.is_empty() {
            if !args.is_empty() {
                if info.superclass.as_deref().is_some_and(|s| self.program.class(s).is_none()) {
                    self.builtin_super_ctor(this, &args);
                    return Ok(());
                }
                return Err(Thrown::Fatal(format!("no constructor of {} takes {} arguments", info.name, args.len())));
            }
            return Ok(());
        }
        let m = self
            .pick_overload(&ctors, &args)
            .ok_or_else(|| Thrown::Fatal(format!("no constructor of {} matches {} arguments", info.name, args.len())))?;
        self.invoke(info, m, Some(this.clone()), args).map(|_| ())
    }

    fn builtin_super_ctor(&mut self, this: &Value, args: &[Value]) {
        if let (Value::Object(o), Some(first)) = (this, args.first()) {
            let msg = match first {
                Value::Str(_) | Value::Null => first.clone(),
                Value::Object(_) => Value::str(self.display(first).unwrap_or_default()),
                other => other.clone(),
            };
            o.fields.borrow_mut().insert("message".into(), msg);
        }
    }

    pub fn instantiate(&mut self, class: &str, args: Vec<Value>) -> R<Value> {
        if let Some(info) = self.program.class(class).map(|c| &**c) {
            return self.new_object(info, args, None);
        }
        if let Some(v) = builtins::construct(self, class, args)? {
            return Ok(v);
        }
        Err(Thrown::Fatal(format!("cannot instantiate {class}")))
    }

    // ---- instanceof and catch matching

    pub fn is_instance(&self, v: &Value, ty: &str) -> bool {
        let ty = ty.rsplit('.').next().unwrap_or(ty);
        match v {
            Value::Null => false,
            _ if ty == "Object" => true,
            Value::Object(o) => self.program.is_subtype(&o.class, ty),
            Value::Array(_) => ty.ends_with("[]"),
            Value::Closure(_) => true,
            other => other.builtin_types().contains(&ty),
        }
    }

    // ---- method dispatch

    fn pick_overload<'m>(&self, cands: &[&'m MethodDecl], args: &[Value]) -> Option<&'m MethodDecl> {
        let mut best: Option<(i32, &MethodDecl)> = None;
        for m in cands {
            let varargs = m.params.last().is_some_and(|p| p.varargs);
            let n = m.params.len();
            let arity_ok = if varargs { args.len() + 1 >= n } else { args.len() == n };
            if !arity_ok {
                continue;
            }
            let mut score = if varargs { 0 } else { 1 };
            for (p, a) in m.params.iter().zip(args) {
                let s = self.param_score(&p.ty, p.varargs, a);
                if s < 0 {
                    score = -1;
                    break;
                }
                score += s;
            }
            if score >= 0 && best.is_none_or(|(b, _)| score > b) {
                best = Some((score, m));
            }
        }
        best.map(|(_, m)| m)
    }

    fn param_score(&self, ty: &TypeRef, varargs: bool, v: &Value) -> i32 {
        if varargs || ty.dims > 0 {
            return if matches!(v, Value::Array(_) | Value::Null) || varargs { 1 } else { -1 };
        }
        let name = ty.simple_name();
        let exact = match (name, v) {
            ("int" | "Integer", Value::Int(_))
            | ("long" | "Long", Value::Long(_))
            | ("double" | "Double" | "float" | "Float", Value::Double(_))
            | ("char" | "Character", Value::Char(_))
            | ("boolean" | "Boolean", Value::Bool(_))
            | ("String", Value::Str(_)) => true,
            _ => false,
        };
        if exact {
            return 3;
        }
        match (name, v) {
            ("long" | "float" | "double", Value::Int(_) | Value::Char(_)) | ("double" | "float", Value::Long(_)) => 2,
            ("int" | "long" | "double" | "char" | "boolean" | "short" | "byte" | "float", _) => -1,
            ("String", Value::Null) => 1,
            ("String", _) => -1,
            (n, Value::Object(o)) if self.program.class(n).is_some() => {
                if self.program.is_subtype(&o.class, n) {
                    2
                } else {
                    -1
                }
            }
            _ => 1,
        }
    }

    /// Finds `name` on `class` or its project ancestors, preferring the
    /// closest declaration whose parameters fit `args`.
    fn find_method(&self, class: &str, name: &str, args: &[Value], want_static: Option<bool>) -> Option<(&'p ClassInfo, &'p MethodDecl)> {
        let mut chain: Vec<&'p ClassInfo> = self.program.chain(class).into_iter().map(|c| &**c).collect();
        // Interface default methods come after the class chain.
        let mut i = 0;
        while i < chain.len() {
            for iface in &chain[i].interfaces {
                if let Some(c) = self.program.class(iface) {
                    if !chain.iter().any(|x| x.name == c.name) {
                        chain.push(c);
                    }
                }
            }
            i += 1;
        }
        for c in chain {
            let cands: Vec<&'p MethodDecl> = c
                .methods
                .iter()
                .filter(|m| !m.is_constructor() && m.name.name == name && m.body.is_some())
                .filter(|m| want_static.is_none_or(|s| m.modifiers.has("static") == s))
                .collect();
            if let Some(m) = self.pick_overload(&cands, args) {
                return Some((c, m));
            }
        }
        None
    }

    pub fn invoke(&mut self, class: &'p ClassInfo, m: &'p MethodDecl, this: Option<Value>, mut args: Vec<Value>) -> R<Value> {
        self.tick()?;
        if self.depth >= MAX_DEPTH {
            return Err(self.throw("StackOverflowError", "call depth limit"));
        }
        let Some(body) = &m.body else {
            return Err(Thrown::Fatal(format!("{} has no body", m.name.name)));
        };
        if let Some(last) = m.params.last().filter(|p| p.varargs) {
            let fixed = m.params.len() - 1;
            let already_array = args.len() == m.params.len() && matches!(args[fixed], Value::Array(_) | Value::Null);
            if !already_array {
                let rest: Vec<Value> = args.drain(fixed.min(args.len())..).collect();
                let prim = Prim::of(&last.ty.name).filter(|_| last.ty.dims == 0);
                args.push(Value::array(rest.into_iter().map(|v| prim.map_or(v.clone(), |p| v.coerce(p))).collect()));
            }
        }
        let mut f = self.frame(class, if m.modifiers.has("static") { None } else { this });
        for (p, a) in m.params.iter().zip(args) {
            let prim = if p.varargs { None } else { prim_of(&p.ty) };
            f.declare(&p.name.name, a, prim);
        }
        self.depth += 1;
        let r = self.exec_stmts(&mut f, &body.stmts);
        self.depth -= 1;
        match r? {
            Flow::Return(v) => Ok(match m.return_type.as_ref().and_then(prim_of) {
                Some(p) => v.coerce(p),
                None => v,
            }),
            Flow::Normal => Ok(Value::Null),
            other => Err(Thrown::Fatal(format!("{other:?} escaped method {}", m.name.name))),
        }
    }

    /// Calls a static or instance method of a project class by name.
    pub fn call_static(&mut self, class: &str, name: &str, args: Vec<Value>) -> R<Value> {
        self.ensure_static(class)?;
        if let Some((c, m)) = self.find_method(class, name, &args, Some(true)) {
            return self.invoke(c, m, None, args);
        }
        let info = self.class_info(class)?;
        if info.kind == TypeDeclKind::Enum {
            match (name, args.as_slice()) {
                ("values", []) => {
                    let consts: Vec<Value> = info
                        .enum_constants
                        .iter()
                        .map(|c| self.statics[&info.name][&c.name.name].clone())
                        .collect();
                    return Ok(Value::array(consts));
                }
                ("valueOf", [Value::Str(s)]) => {
                    return self.statics[&info.name]
                        .get(&**s)
                        .cloned()
                        .ok_or_else(|| self.throw("IllegalArgumentException", format!("No enum constant {}.{s}", info.name)));
                }
                _ => {}
            }
        }
        Err(Thrown::Fatal(format!("no static method {class}.{name}/{}", args.len())))
    }

    pub fn call_method(&mut self, recv: Value, name: &str, args: Vec<Value>) -> R<Value> {
        match &recv {
            Value::Null => Err(self.throw("NullPointerException", format!("Cannot invoke \"{name}()\" because value is null"))),
            Value::Class(c) => {
                let c = c.to_string();
                if matches!(name, "getSimpleName" | "getName") && args.is_empty() {
                    return Ok(Value::str(c));
                }
                if self.program.class(&c).is_some() {
                    return self.call_static(&c, name, args);
                }
                match builtins::static_call(self, &c, name, args)? {
                    Some(v) => Ok(v),
                    None => Err(Thrown::Fatal(format!("unsupported static method {c}.{name}"))),
                }
            }
            Value::Object(o) => {
                let class = o.class.clone();
                if let Some((c, m)) = self.find_method(&class, name, &args, None) {
                    return self.invoke(c, m, Some(recv.clone()), args);
                }
                self.object_builtin(o.clone(), &recv, name, args)
            }
            Value::Closure(c) => {
                let c = c.clone();
                match name {
                    "equals" => Ok(Value::Bool(args.first().is_some_and(|a| a.identical(&recv)))),
                    _ => self.invoke_closure(&c, args),
                }
            }
            _ => match builtins::instance_call(self, recv.clone(), name, args)? {
                Some(v) => Ok(v),
                None => Err(Thrown::Fatal(format!("unsupported method {}.{name}", recv.class_name()))),
            },
        }
    }

    fn object_builtin(&mut self, o: Rc<Object>, recv: &Value, name: &str, args: Vec<Value>) -> R<Value> {
        let field = |n: &str| o.fields.borrow().get(n).cloned();
        Ok(match (name, args.as_slice()) {
            ("equals", [other]) => Value::Bool(recv.identical(other)),
            ("hashCode", []) => Value::Int((Rc::as_ptr(&o) as usize >> 4) as i32),
            ("toString", []) => Value::str(self.display(recv)?),
            ("getClass", []) => Value::Class(o.class.as_str().into()),
            ("name", []) if field("$name").is_some() => field("$name").unwrap_or(Value::Null),
            ("ordinal", []) if field("$ordinal").is_some() => field("$ordinal").unwrap_or(Value::Null),
            ("compareTo", [Value::Object(other)]) if field("$ordinal").is_some() => {
                let a = field("$ordinal").and_then(|v| v.as_i64()).unwrap_or(0);
                let b = other.fields.borrow().get("$ordinal").and_then(|v| v.as_i64()).unwrap_or(0);
                Value::Int((a - b) as i32)
            }
            ("getMessage" | "getLocalizedMessage", []) => field("message").unwrap_or(Value::Null),
            ("getCause", []) => field("cause").unwrap_or(Value::Null),
            ("close", []) => Value::Null,
            _ => return Err(Thrown::Fatal(format!("no method {}.{name}/{}", o.class, args.len()))),
        })
    }

    pub fn invoke_closure(&mut self, c: &Closure, args: Vec<Value>) -> R<Value> {
        self.tick()?;
        match c {
            Closure::Lambda {
                params,
                body,
                captured,
                this,
                class,
                src,
            } => {
                let info = self.class_info(class)?;
                let mut f = Frame {
                    class: info,
                    this: this.clone(),
                    scopes: vec![HashMap::new()],
                    src: src.clone(),
                };
                for (n, v) in captured {
                    f.declare(n, v.clone(), None);
                }
                f.scopes.push(HashMap::new());
                for (p, a) in params.iter().zip(args) {
                    f.declare(p, a, None);
                }
                if self.depth >= MAX_DEPTH {
                    return Err(self.throw("StackOverflowError", "call depth limit"));
                }
                self.depth += 1;
                let r = match body {
                    ClosureBody::Expr(e) => self.eval(&mut f, e),
                    ClosureBody::Block(b) => match self.exec_stmts(&mut f, &b.stmts) {
                        Ok(Flow::Return(v)) => Ok(v),
                        Ok(_) => Ok(Value::Null),
                        Err(e) => Err(e),
                    },
                };
                self.depth -= 1;
                r
            }
            Closure::MethodRef { target, name } => match target {
                Value::Class(cls) => {
                    let cls = cls.to_string();
                    if name == "new" {
                        return self.instantiate(&cls, args);
                    }
                    if self.program.class(&cls).is_some() {
                        if self.find_method(&cls, name, &args, Some(true)).is_some() {
                            return self.call_static(&cls, name, args);
                        }
                    } else if let Some(v) = builtins::static_call(self, &cls, name, args.clone())? {
                        return Ok(v);
                    }
                    let mut args = args.into_iter();
                    let recv = args.next().unwrap_or(Value::Null);
                    self.call_method(recv, name, args.collect())
                }
                recv => self.call_method(recv.clone(), name, args),
            },
        }
    }

    /// Calls a functional value: closures directly, objects through their
    /// single abstract method.
    pub fn call_function(&mut self, f: &Value, args: Vec<Value>) -> R<Value> {
        match f {
            Value::Closure(c) => self.invoke_closure(&c.clone(), args),
            Value::Object(o) => {
                let info = self.class_info(&o.class)?;
                let m = info
                    .methods
                    .iter()
                    .find(|m| !m.is_constructor() && !m.modifiers.has("static") && m.params.len() == args.len())
                    .ok_or_else(|| Thrown::Fatal(format!("{} is not a functional object", o.class)))?;
                self.invoke(info, m, Some(f.clone()), args)
            }
            Value::Null => Err(self.throw("NullPointerException", "function is null")),
            other => Err(Thrown::Fatal(format!("{} is not callable", other.class_name()))),
        }
    }

    // ---- equality, ordering, display used by builtins

    pub fn equals(&mut self, a: &Value, b: &Value) -> R<bool> {
        if let Value::Object(o) = a {
            if let Some((c, m)) = self.find_method(&o.class.clone(), "equals", std::slice::from_ref(b), Some(false)) {
                let r = self.invoke(c, m, Some(a.clone()), vec![b.clone()])?;
                return truthy(&r);
            }
            return Ok(a.identical(b));
        }
        Ok(match (a, b) {
            (Value::List(x), Value::List(y)) => {
                let (x, y) = (x.borrow().clone(), y.borrow().clone());
                if x.len() != y.len() {
                    return Ok(false);
                }
                for (p, q) in x.iter().zip(&y) {
                    if !self.equals(p, q)? {
                        return Ok(false);
                    }
                }
                true
            }
            _ => a.builtin_equals(b),
        })
    }

    pub fn hash_code(&mut self, v: &Value) -> R<i32> {
        if let Value::Object(o) = v {
            if let Some((c, m)) = self.find_method(&o.class.clone(), "hashCode", &[], Some(false)) {
                return Ok(self.invoke(c, m, Some(v.clone()), vec![])?.as_i64().unwrap_or(0) as i32);
            }
        }
        Ok(v.hash_code())
    }

    pub fn compare(&mut self, a: &Value, b: &Value, cmp: Option<&Value>) -> R<std::cmp::Ordering> {
        if let Some(c) = cmp.filter(|c| !c.is_null()) {
            let r = self.call_function(c, vec![a.clone(), b.clone()])?;
            return Ok(r.as_i64().unwrap_or(0).cmp(&0));
        }
        if let Some(o) = a.natural_cmp(b) {
            return Ok(o);
        }
        if let Value::Object(_) = a {
            let r = self.call_method(a.clone(), "compareTo", vec![b.clone()])?;
            return Ok(r.as_i64().unwrap_or(0).cmp(&0));
        }
        Err(self.throw("ClassCastException", format!("{} is not comparable", a.class_name())))
    }

    pub fn sort(&mut self, items: &mut [Value], cmp: Option<&Value>) -> R<()> {
        let mut err = None;
        items.sort_by(|a, b| {
            if err.is_some() {
                return std::cmp::Ordering::Equal;
            }
            self.compare(a, b, cmp).unwrap_or_else(|e| {
                err = Some(e);
                std::cmp::Ordering::Equal
            })
        });
        err.map_or(Ok(()), Err)
    }

    pub fn display(&mut self, v: &Value) -> R<String> {
        let mut out = String::new();
        let mut err = None;
        display_builtin(v, &mut out, &mut |obj, out| {
            if err.is_some() {
                return;
            }
            match self.display_object(obj) {
                Ok(s) => out.push_str(&s),
                Err(e) => err = Some(e),
            }
        });
        err.map_or(Ok(out), Err)
    }

    fn display_object(&mut self, v: &Value) -> R<String> {
        let Value::Object(o) = v else {
            return Ok(format!("{}$$Lambda", v.class_name()));
        };
        if let Some((c, m)) = self.find_method(&o.class.clone(), "toString", &[], Some(false)) {
            let r = self.invoke(c, m, Some(v.clone()), vec![])?;
            return self.display(&r);
        }
        let fields = o.fields.borrow();
        if let Some(Value::Str(n)) = fields.get("$name") {
            return Ok(n.to_string());
        }
        if let Some(msg) = fields.get("message") {
            return Ok(match msg {
                Value::Null => o.class.clone(),
                m => {
                    let mut s = String::new();
                    display_builtin(m, &mut s, &mut |_, _| {});
                    format!("{}: {s}", o.class)
                }
            });
        }
        Ok(format!("{}@{:x}", o.class, Rc::as_ptr(o) as usize & 0xffffff))
    }

    // ---- statements

    pub fn exec_block(&mut self, f: &mut Frame<'p>, stmts: &[Stmt]) -> R<Flow> {
        f.scopes.push(HashMap::new());
        let r = self.exec_stmts(f, stmts);
        f.scopes.pop();
        r
    }

    fn exec_stmts(&mut self, f: &mut Frame<'p>, stmts: &[Stmt]) -> R<Flow> {
        for s in stmts {
            match self.exec(f, s, None)? {
                Flow::Normal => {}
                other => return Ok(other),
            }
        }
        Ok(Flow::Normal)
    }

    fn local_decl(&mut self, f: &mut Frame<'p>, d: &LocalVarDecl) -> R<()> {
        for decl in &d.declarators {
            let prim = if decl.dims == 0 { prim_of(&d.ty) } else { None };
            let v = match &decl.init {
                Some(e) => self.eval_init(f, e, &d.ty, decl.dims)?,
                None => default_for(&d.ty, decl.dims),
            };
            f.declare(&decl.name.name, v, prim);
        }
        Ok(())
    }

    /// Initializer expression; bare `{...}` array initializers take their
    /// element type from the declaration.
    fn eval_init(&mut self, f: &mut Frame<'p>, e: &Expr, ty: &TypeRef, extra_dims: usize) -> R<Value> {
        match &e.kind {
            ExprKind::ArrayInit(items) => self.array_init(f, items, Prim::of(&ty.name), ty.dims + extra_dims),
            _ => self.eval(f, e),
        }
    }

    fn array_init(&mut self, f: &mut Frame<'p>, items: &[Expr], elem: Option<Prim>, dims: usize) -> R<Value> {
        let mut out = Vec::with_capacity(items.len());
        for it in items {
            let v = match &it.kind {
                ExprKind::ArrayInit(inner) => self.array_init(f, inner, elem, dims.saturating_sub(1))?,
                _ => {
                    let v = self.eval(f, it)?;
                    match elem {
                        Some(p) if dims <= 1 => v.coerce(p),
                        _ => v,
                    }
                }
            };
            out.push(v);
        }
        Ok(Value::array(out))
    }

    fn loop_step(flow: Flow, label: Option<&str>) -> Option<Flow> {
        match flow {
            Flow::Normal | Flow::Continue(None) => None,
            Flow::Continue(Some(l)) if label == Some(l.as_str()) => None,
            Flow::Break(None) => Some(Flow::Normal),
            Flow::Break(Some(l)) if label == Some(l.as_str()) => Some(Flow::Normal),
            other => Some(other),
        }
    }

    fn exec(&mut self, f: &mut Frame<'p>, s: &Stmt, label: Option<&str>) -> R<Flow> {
        self.tick()?;
        match &s.kind {
            StmtKind::LocalVar(d) => {
                self.local_decl(f, d)?;
                Ok(Flow::Normal)
            }
            StmtKind::Expr(e) => {
                self.eval(f, e)?;
                Ok(Flow::Normal)
            }
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                let c = self.eval(f, cond)?;
                if truthy(&c)? {
                    self.exec_scoped(f, then_branch)
                } else if let Some(e) = else_branch {
                    self.exec_scoped(f, e)
                } else {
                    Ok(Flow::Normal)
                }
            }
            StmtKind::For {
                init,
                cond,
                update,
                body,
            } => {
                f.scopes.push(HashMap::new());
                let r = self.exec_for(f, init.as_ref(), cond.as_ref(), update, body, label);
                f.scopes.pop();
                r
            }
            StmtKind::ForEach {
                ty, name, iterable, body, ..
            } => {
                let coll = self.eval(f, iterable)?;
                let items = self.iterate(&coll)?;
                let prim = prim_of(ty);
                for it in items {
                    self.tick()?;
                    f.scopes.push(HashMap::new());
                    f.declare(&name.name, it, prim);
                    let r = self.exec(f, body, None);
                    f.scopes.pop();
                    if let Some(out) = Self::loop_step(r?, label) {
                        return Ok(out);
                    }
                }
                Ok(Flow::Normal)
            }
            StmtKind::While { cond, body } => {
                loop {
                    self.tick()?;
                    let c = self.eval(f, cond)?;
                    if !truthy(&c)? {
                        return Ok(Flow::Normal);
                    }
                    let r = self.exec_scoped(f, body)?;
                    if let Some(out) = Self::loop_step(r, label) {
                        return Ok(out);
                    }
                }
            }
            StmtKind::Do { body, cond } => loop {
                self.tick()?;
                let r = self.exec_scoped(f, body)?;
                if let Some(out) = Self::loop_step(r, label) {
                    return Ok(out);
                }
                let c = self.eval(f, cond)?;
                if !truthy(&c)? {
                    return Ok(Flow::Normal);
                }
            },
            StmtKind::Switch { selector, cases } => self.exec_switch(f, selector, cases),
            StmtKind::Try {
                resources,
                body,
                catches,
                finally,
            } => self.exec_try(f, resources, body, catches, finally.as_ref()),
            StmtKind::Return(e) => {
                let v = match e {
                    Some(e) => self.eval(f, e)?,
                    None => Value::Null,
                };
                Ok(Flow::Return(v))
            }
            StmtKind::Throw(e) => {
                let v = self.eval(f, e)?;
                if v.is_null() {
                    return Err(self.throw("NullPointerException", "throw null"));
                }
                Err(Thrown::Exception(v))
            }
            StmtKind::Break(l) => Ok(Flow::Break(l.as_ref().map(|i| i.name.clone()))),
            StmtKind::Continue(l) => Ok(Flow::Continue(l.as_ref().map(|i| i.name.clone()))),
            StmtKind::Block(b) => self.exec_block(f, &b.stmts),
            StmtKind::Labeled { label: l, body } => match self.exec(f, body, Some(&l.name))? {
                Flow::Break(Some(x)) if x == l.name => Ok(Flow::Normal),
                other => Ok(other),
            },
            StmtKind::Synchronized { lock, body } => {
                self.eval(f, lock)?;
                self.exec_block(f, &body.stmts)
            }
            StmtKind::Assert { cond, message } => {
                let c = self.eval(f, cond)?;
                if !truthy(&c)? {
                    let msg = match message {
                        Some(m) => {
                            let v = self.eval(f, m)?;
                            Some(self.display(&v)?)
                        }
                        None => None,
                    };
                    return Err(Thrown::Exception(self.exception("AssertionError", msg)));
                }
                Ok(Flow::Normal)
            }
            StmtKind::Empty => Ok(Flow::Normal),
        }
    }

    fn exec_scoped(&mut self, f: &mut Frame<'p>, s: &Stmt) -> R<Flow> {
        f.scopes.push(HashMap::new());
        let r = self.exec(f, s, None);
        f.scopes.pop();
        r
    }

    fn exec_for(
        &mut self,
        f: &mut Frame<'p>,
        init: Option<&ForInit>,
        cond: Option<&Expr>,
        update: &[Expr],
        body: &Stmt,
        label: Option<&str>,
    ) -> R<Flow> {
        match init {
            Some(ForInit::Decl(d)) => self.local_decl(f, d)?,
            Some(ForInit::Exprs(es)) => {
                for e in es {
                    self.eval(f, e)?;
                }
            }
            None => {}
        }
        loop {
            self.tick()?;
            if let Some(c) = cond {
                let v = self.eval(f, c)?;
                if !truthy(&v)? {
                    return Ok(Flow::Normal);
                }
            }
            let r = self.exec_scoped(f, body)?;
            if let Some(out) = Self::loop_step(r, label) {
                return Ok(out);
            }
            for u in update {
                self.eval(f, u)?;
            }
        }
    }

    pub fn iterate(&mut self, coll: &Value) -> R<Vec<Value>> {
        Ok(match coll {
            Value::Array(a) | Value::List(a) => a.borrow().clone(),
            Value::Set(s) => s.borrow().items.clone(),
            Value::Map(m) => m.borrow().entries.iter().map(|(k, v)| Value::Entry(Rc::new((k.clone(), v.clone())))).collect(),
            Value::Null => return Err(self.throw("NullPointerException", "iterating over null")),
            Value::Object(_) => {
                let it = self.call_method(coll.clone(), "iterator", vec![])?;
                let mut out = Vec::new();
                while truthy(&self.call_method(it.clone(), "hasNext", vec![])?)? {
                    out.push(self.call_method(it.clone(), "next", vec![])?);
                    self.tick()?;
                }
                out
            }
            other => return Err(Thrown::Fatal(format!("cannot iterate over {}", other.class_name()))),
        })
    }

    fn exec_switch(&mut self, f: &mut Frame<'p>, selector: &Expr, cases: &[SwitchCase]) -> R<Flow> {
        let sel = self.eval(f, selector)?;
        if sel.is_null() {
            return Err(self.throw("NullPointerException", "switch on null"));
        }
        let enum_name = match &sel {
            Value::Object(o) => o.fields.borrow().get("$name").cloned(),
            _ => None,
        };
        let mut start = None;
        'find: for (i, c) in cases.iter().enumerate() {
            for l in &c.labels {
                let hit = match (&enum_name, l.as_name()) {
                    (Some(Value::Str(n)), Some(label)) => **n == *label,
                    _ => {
                        let lv = self.eval(f, l)?;
                        match (&sel, &lv) {
                            (a, b) if a.is_numeric() && b.is_numeric() => a.as_i64() == b.as_i64(),
                            (a, b) => a.builtin_equals(b),
                        }
                    }
                };
                if hit {
                    start = Some(i);
                    break 'find;
                }
            }
        }
        let Some(start) = start.or_else(|| cases.iter().position(|c| c.is_default)) else {
            return Ok(Flow::Normal);
        };
        f.scopes.push(HashMap::new());
        let mut result = Ok(Flow::Normal);
        for c in &cases[start..] {
            match self.exec_stmts(f, &c.body) {
                Ok(Flow::Normal) => {}
                Ok(Flow::Break(None)) => break,
                other => {
                    result = other;
                    break;
                }
            }
        }
        f.scopes.pop();
        result
    }

    fn exec_try(
        &mut self,
        f: &mut Frame<'p>,
        resources: &[Resource],
        body: &Block,
        catches: &[CatchClause],
        finally: Option<&Block>,
    ) -> R<Flow> {
        f.scopes.push(HashMap::new());
        let mut opened = Vec::new();
        let mut result: R<Flow> = Ok(Flow::Normal);
        for r in resources {
            let v = match r {
                Resource::Decl { name, init, ty, .. } => self.eval(f, init).inspect(|v| f.declare(&name.name, v.clone(), prim_of(ty))),
                Resource::Expr(e) => self.eval(f, e),
            };
            match v {
                Ok(v) => opened.push(v),
                Err(e) => {
                    result = Err(e);
                    break;
                }
            }
        }
        if result.is_ok() {
            result = self.exec_block(f, &body.stmts);
        }
        for v in opened.into_iter().rev() {
            if !v.is_null() {
                let closed = self.call_method(v, "close", vec![]);
                if let (Ok(_), Err(e)) = (&result, closed) {
                    result = Err(e);
                }
            }
        }
        f.scopes.pop();
        if let Err(Thrown::Exception(ex)) = &result {
            let ex = ex.clone();
            if let Some(c) = catches.iter().find(|c| c.types.iter().any(|t| self.is_instance(&ex, &t.name))) {
                f.scopes.push(HashMap::new());
                f.declare(&c.name.name, ex, None);
                result = self.exec_stmts(f, &c.body.stmts);
                f.scopes.pop();
            }
        }
        if let Some(fin) = finally {
            match self.exec_block(f, &fin.stmts) {
                Ok(Flow::Normal) => {}
                other => return other,
            }
        }
        result
    }

    // ---- expressions

    fn eval_args(&mut self, f: &mut Frame<'p>, args: &[Expr]) -> R<Vec<Value>> {
        args.iter().map(|a| self.eval(f, a)).collect()
    }

    fn literal(&self, f: &Frame<'p>, e: &Expr, kind: LitKind) -> R<Value> {
        let text = e.span.text(&f.src);
        let bad = |err: crate::value::LiteralError| Thrown::Fatal(err.to_string());
        Ok(match kind {
            LitKind::Int => parse_int_literal(text, false).map_err(bad)?,
            LitKind::Long => parse_int_literal(text, true).map_err(bad)?,
            LitKind::Float | LitKind::Double => parse_float_literal(text).map_err(bad)?,
            LitKind::Char => {
                let s = unescape(&text[1..text.len() - 1]).map_err(bad)?;
                Value::Char(s.chars().next().unwrap_or('\0'))
            }
            LitKind::String => Value::str(unescape(&text[1..text.len() - 1]).map_err(bad)?),
            LitKind::TextBlock => {
                let body = text.trim_start_matches("\"\"\"").trim_end_matches("\"\"\"");
                let body = body.strip_prefix('\n').unwrap_or(body);
                let indent = body
                    .lines()
                    .filter(|l| !l.trim().is_empty())
                    .map(|l| l.len() - l.trim_start().len())
                    .min()
                    .unwrap_or(0);
                let lines: Vec<&str> = body.lines().map(|l| l.get(indent..).unwrap_or("").trim_end()).collect();
                Value::str(unescape(&lines.join("\n")).map_err(bad)?)
            }
            LitKind::True => Value::Bool(true),
            LitKind::False => Value::Bool(false),
            LitKind::Null => Value::Null,
        })
    }

    fn lookup_name(&mut self, f: &mut Frame<'p>, n: &str) -> R<Value> {
        if let Some(s) = f.slot(n) {
            return Ok(s.value.clone());
        }
        if let Some(Value::Object(o)) = &f.this {
            if let Some(v) = o.fields.borrow().get(n) {
                return Ok(v.clone());
            }
        }
        let class = f.class.name.clone();
        if let Some(owner) = self.static_owner(&class, n)? {
            return Ok(self.statics[&owner][n].clone());
        }
        for imp in f.class.imports.iter().filter(|i| i.is_static && !i.wildcard) {
            if imp.simple_name() == Some(n) {
                let owner = imp.package().rsplit('.').next().unwrap_or("").to_string();
                if let Some(o) = self.static_owner(&owner, n)? {
                    return Ok(self.statics[&o][n].clone());
                }
            }
        }
        Ok(Value::Class(n.into()))
    }

    fn place(&mut self, f: &mut Frame<'p>, e: &Expr) -> R<Place> {
        match &e.unparen().kind {
            ExprKind::Name(n) => {
                if f.slot(n).is_some() {
                    return Ok(Place::Local(n.clone()));
                }
                if let Some(Value::Object(o)) = &f.this {
                    if o.fields.borrow().contains_key(n) {
                        return Ok(Place::Field(o.clone(), n.clone()));
                    }
                }
                let class = f.class.name.clone();
                match self.static_owner(&class, n)? {
                    Some(owner) => Ok(Place::Static(owner, n.clone())),
                    None => Err(Thrown::Fatal(format!("cannot assign to {n}"))),
                }
            }
            ExprKind::FieldAccess { target, name } => match self.eval(f, target)? {
                Value::Object(o) => Ok(Place::Field(o, name.name.clone())),
                Value::Class(c) => match self.static_owner(&c, &name.name)? {
                    Some(owner) => Ok(Place::Static(owner, name.name.clone())),
                    None => Err(Thrown::Fatal(format!("no static field {c}.{}", name.name))),
                },
                Value::Null => Err(self.throw("NullPointerException", format!("field {} of null", name.name))),
                other => Err(Thrown::Fatal(format!("cannot assign field of {}", other.class_name()))),
            },
            ExprKind::ArrayAccess { array, index } => {
                let arr = self.eval(f, array)?;
                let idx = self.eval(f, index)?;
                let i = idx.as_i64().ok_or_else(|| Thrown::Fatal("array index is not an integer".into()))?;
                match &arr {
                    Value::Array(a) => {
                        let len = a.borrow().len();
                        if i < 0 || i as usize >= len {
                            return Err(self.throw(
                                "ArrayIndexOutOfBoundsException",
                                format!("Index {i} out of bounds for length {len}"),
                            ));
                        }
                        Ok(Place::Elem(arr.clone(), i as usize))
                    }
                    Value::Null => Err(self.throw("NullPointerException", "array is null")),
                    other => Err(Thrown::Fatal(format!("{} is not an array", other.class_name()))),
                }
            }
            _ => Err(Thrown::Fatal("invalid assignment target".into())),
        }
    }

    fn read(&mut self, f: &mut Frame<'p>, p: &Place) -> R<Value> {
        Ok(match p {
            Place::Local(n) => f.slot(n).map(|s| s.value.clone()).unwrap_or(Value::Null),
            Place::Field(o, n) => o.fields.borrow().get(n).cloned().unwrap_or(Value::Null),
            Place::Static(c, n) => self.statics[c][n].clone(),
            Place::Elem(Value::Array(a), i) => a.borrow()[*i].clone(),
            Place::Elem(..) => Value::Null,
        })
    }

    fn write(&mut self, f: &mut Frame<'p>, p: &Place, v: Value) -> Value {
        match p {
            Place::Local(n) => {
                if let Some(s) = f.slot(n) {
                    let v = s.prim.map_or(v.clone(), |pr| v.coerce(pr));
                    s.value = v.clone();
                    return v;
                }
                v
            }
            Place::Field(o, n) => {
                let v = self.field_prim(&o.class, n).map_or(v.clone(), |pr| v.coerce(pr));
                o.fields.borrow_mut().insert(n.clone(), v.clone());
                v
            }
            Place::Static(c, n) => {
                let v = self.field_prim(c, n).map_or(v.clone(), |pr| v.coerce(pr));
                self.statics.entry(c.clone()).or_default().insert(n.clone(), v.clone());
                v
            }
            Place::Elem(Value::Array(a), i) => {
                let mut a = a.borrow_mut();
                let v = match (&a[*i], &v) {
                    (Value::Int(_), n) if n.is_numeric() => n.clone().coerce(Prim::Int),
                    (Value::Long(_), n) if n.is_numeric() => n.clone().coerce(Prim::Long),
                    (Value::Double(_), n) if n.is_numeric() => n.clone().coerce(Prim::Double),
                    (Value::Char(_), n) if n.is_numeric() => n.clone().coerce(Prim::Char),
                    _ => v,
                };
                a[*i] = v.clone();
                v
            }
            Place::Elem(..) => v,
        }
    }

    /// Coerces a compound-assignment or increment result back to the type
    /// of the value it replaces.
    fn same_kind(old: &Value, v: Value) -> Value {
        match old {
            Value::Int(_) => v.coerce(Prim::Int),
            Value::Long(_) => v.coerce(Prim::Long),
            Value::Double(_) => v.coerce(Prim::Double),
            Value::Char(_) => v.coerce(Prim::Char),
            _ => v,
        }
    }

    pub fn eval(&mut self, f: &mut Frame<'p>, e: &Expr) -> R<Value> {
        match &e.kind {
            ExprKind::Literal(k) => self.literal(f, e, *k),
            ExprKind::Name(n) => self.lookup_name(f, n),
            ExprKind::This => f.this.clone().ok_or_else(|| Thrown::Fatal("`this` in static context".into())),
            ExprKind::Super => f.this.clone().ok_or_else(|| Thrown::Fatal("`super` in static context".into())),
            ExprKind::Paren(inner) => self.eval(f, inner),
            ExprKind::FieldAccess { target, name } => {
                let t = self.eval(f, target)?;
                self.get_field(t, &name.name)
            }
            ExprKind::ArrayAccess { .. } => {
                let p = self.place(f, e)?;
                self.read(f, &p)
            }
            ExprKind::Call { target, name, args, .. } => self.eval_call(f, target.as_deref(), &name.name, args),
            ExprKind::New { ty, args, body } => {
                if body.is_some() {
                    return Err(Thrown::Fatal("anonymous classes are not supported".into()));
                }
                let args = self.eval_args(f, args)?;
                self.instantiate(ty.simple_name(), args)
            }
            ExprKind::NewArray { elem, sizes, dims, init } => {
                if let Some(items) = init {
                    return self.array_init(f, items, Prim::of(&elem.name), *dims);
                }
                let mut ns = Vec::new();
                for s in sizes {
                    let n = self.eval(f, s)?.as_i64().unwrap_or(0);
                    if n < 0 {
                        return Err(self.throw("NegativeArraySizeException", n.to_string()));
                    }
                    ns.push(n as usize);
                }
                let leaf = if *dims > ns.len() { Value::Null } else { default_prim(Prim::of(&elem.name)) };
                Ok(make_array(&ns, &leaf))
            }
            ExprKind::ArrayInit(items) => self.array_init(f, items, None, 1),
            ExprKind::Unary { op, operand } => self.eval_unary(f, *op, operand),
            ExprKind::Binary { op, lhs, rhs } => {
                let a = self.eval(f, lhs)?;
                match op {
                    BinaryOp::And => {
                        if !truthy(&a)? {
                            return Ok(Value::Bool(false));
                        }
                        let b = self.eval(f, rhs)?;
                        Ok(Value::Bool(truthy(&b)?))
                    }
                    BinaryOp::Or => {
                        if truthy(&a)? {
                            return Ok(Value::Bool(true));
                        }
                        let b = self.eval(f, rhs)?;
                        Ok(Value::Bool(truthy(&b)?))
                    }
                    _ => {
                        let b = self.eval(f, rhs)?;
                        self.binop(*op, a, b)
                    }
                }
            }
            ExprKind::Assign { op, target, value } => {
                let p = self.place(f, target)?;
                let v = match op {
                    None => self.eval(f, value)?,
                    Some(op) => {
                        let old = self.read(f, &p)?;
                        let rhs = self.eval(f, value)?;
                        let r = self.binop(*op, old.clone(), rhs)?;
                        Self::same_kind(&old, r)
                    }
                };
                Ok(self.write(f, &p, v))
            }
            ExprKind::Ternary {
                cond,
                then_expr,
                else_expr,
            } => {
                let c = self.eval(f, cond)?;
                if truthy(&c)? {
                    self.eval(f, then_expr)
                } else {
                    self.eval(f, else_expr)
                }
            }
            ExprKind::InstanceOf { expr, ty, binding } => {
                let v = self.eval(f, expr)?;
                let name = if ty.dims > 0 { format!("{}[]", ty.name) } else { ty.name.clone() };
                let hit = self.is_instance(&v, &name);
                if let (true, Some(b)) = (hit, binding) {
                    f.declare(&b.name, v, None);
                }
                Ok(Value::Bool(hit))
            }
            ExprKind::Cast { ty, expr } => {
                let v = self.eval(f, expr)?;
                match prim_of(ty) {
                    Some(p) => Ok(v.coerce(p)),
                    None => {
                        let name = ty.simple_name();
                        if ty.dims == 0
                            && !v.is_null()
                            && !self.is_instance(&v, name)
                            && (self.program.class(name).is_some() || matches!(name, "String" | "Integer" | "Long" | "Double"))
                        {
                            return Err(self.throw(
                                "ClassCastException",
                                format!("class {} cannot be cast to class {name}", v.class_name()),
                            ));
                        }
                        Ok(v)
                    }
                }
            }
            ExprKind::Lambda { params, body } => {
                let mut captured = Vec::new();
                for scope in &f.scopes {
                    for (k, s) in scope {
                        captured.push((k.clone(), s.value.clone()));
                    }
                }
                Ok(Value::Closure(Rc::new(Closure::Lambda {
                    params: params.iter().map(|p| p.name().name.clone()).collect(),
                    body: ClosureBody::from(body),
                    captured,
                    this: f.this.clone(),
                    class: f.class.name.clone(),
                    src: f.src.clone(),
                })))
            }
            ExprKind::MethodRef { target, name } => {
                let t = match &target.kind {
                    ExprKind::Name(n) if f.slot(n).is_none() && n.starts_with(char::is_uppercase) => Value::Class(n.as_str().into()),
                    _ => self.eval(f, target)?,
                };
                Ok(Value::Closure(Rc::new(Closure::MethodRef {
                    target: t,
                    name: name.name.clone(),
                })))
            }
            ExprKind::ClassLit(ty) => Ok(Value::Class(ty.simple_name().into())),
        }
    }

    fn get_field(&mut self, t: Value, name: &str) -> R<Value> {
        match &t {
            Value::Object(o) => {
                if let Some(v) = o.fields.borrow().get(name) {
                    return Ok(v.clone());
                }
                if let Some(owner) = self.static_owner(&o.class.clone(), name)? {
                    return Ok(self.statics[&owner][name].clone());
                }
                Err(Thrown::Fatal(format!("no field {}.{name}", o.class)))
            }
            Value::Array(a) if name == "length" => Ok(Value::Int(a.borrow().len() as i32)),
            Value::Class(c) => {
                let c = c.to_string();
                if self.program.class(&c).is_some() {
                    if let Some(owner) = self.static_owner(&c, name)? {
                        return Ok(self.statics[&owner][name].clone());
                    }
                    if self.program.class(name).is_some() {
                        return Ok(Value::Class(name.into()));
                    }
                    return Err(Thrown::Fatal(format!("no static field {c}.{name}")));
                }
                builtins::static_field(&c, name).ok_or_else(|| Thrown::Fatal(format!("unsupported static field {c}.{name}")))
            }
            Value::Null => Err(self.throw("NullPointerException", format!("Cannot read field \"{name}\" because value is null"))),
            other => Err(Thrown::Fatal(format!("no field {name} on {}", other.class_name()))),
        }
    }

    fn eval_call(&mut self, f: &mut Frame<'p>, target: Option<&Expr>, name: &str, args: &[Expr]) -> R<Value> {
        let argv = self.eval_args(f, args)?;
        match target {
            None => {
                if name == "this" || name == "super" {
                    return self.explicit_ctor_call(f, name, argv);
                }
                let class = f.class.name.clone();
                if let Some((c, m)) = self.find_method(&class, name, &argv, None) {
                    let this = if m.modifiers.has("static") { None } else { f.this.clone() };
                    return self.invoke(c, m, this, argv);
                }
                for imp in f.class.imports.iter().filter(|i| i.is_static) {
                    if imp.wildcard || imp.simple_name() == Some(name) {
                        let owner = if imp.wildcard { imp.path.as_str() } else { imp.package() };
                        let owner = owner.rsplit('.').next().unwrap_or(owner).to_string();
                        if self.program.class(&owner).is_some() {
                            if self.find_method(&owner, name, &argv, Some(true)).is_some() {
                                return self.call_static(&owner, name, argv);
                            }
                        } else if let Some(v) = builtins::static_call(self, &owner, name, argv.clone())? {
                            return Ok(v);
                        }
                    }
                }
                match builtins::static_call(self, "Assertions", name, argv)? {
                    Some(v) => Ok(v),
                    None => Err(Thrown::Fatal(format!("no method {name} in {class}"))),
                }
            }
            Some(t) if matches!(t.kind, ExprKind::Super) => {
                let this = f.this.clone();
                let sup = f.class.superclass.clone().unwrap_or_default();
                if let Some((c, m)) = self.find_method(&sup, name, &argv, None) {
                    return self.invoke(c, m, this, argv);
                }
                match this {
                    Some(Value::Object(o)) => self.object_builtin(o.clone(), &Value::Object(o), name, argv),
                    _ => Err(Thrown::Fatal(format!("no super method {name}"))),
                }
            }
            Some(t) => {
                let recv = self.eval(f, t)?;
                self.call_method(recv, name, argv)
            }
        }
    }

    fn explicit_ctor_call(&mut self, f: &mut Frame<'p>, which: &str, args: Vec<Value>) -> R<Value> {
        let this = f.this.clone().ok_or_else(|| Thrown::Fatal(format!("{which}() outside constructor")))?;
        let target = if which == "this" {
            Some(f.class)
        } else {
            f.class.superclass.as_deref().and_then(|s| self.program.class(s)).map(|c| &**c)
        };
        match target {
            Some(c) => self.run_constructor(c, &this, args)?,
            None => self.builtin_super_ctor(&this, &args),
        }
        Ok(Value::Null)
    }

    fn eval_unary(&mut self, f: &mut Frame<'p>, op: UnaryOp, operand: &Expr) -> R<Value> {
        if op.is_mutation() {
            let p = self.place(f, operand)?;
            let old = self.read(f, &p)?;
            let delta = if matches!(op, UnaryOp::PreInc | UnaryOp::PostInc) { 1 } else { -1 };
            let new = Self::same_kind(&old, self.binop(BinaryOp::Add, old.clone(), Value::Int(delta))?);
            let stored = self.write(f, &p, new);
            return Ok(if op.is_postfix() { old } else { stored });
        }
        let v = self.eval(f, operand)?;
        Ok(match (op, v) {
            (UnaryOp::Not, b) => Value::Bool(!truthy(&b)?),
            (UnaryOp::Neg, Value::Int(i)) => Value::Int(i.wrapping_neg()),
            (UnaryOp::Neg, Value::Char(c)) => Value::Int(-(c as i32)),
            (UnaryOp::Neg, Value::Long(l)) => Value::Long(l.wrapping_neg()),
            (UnaryOp::Neg, Value::Double(d)) => Value::Double(-d),
            (UnaryOp::Plus, Value::Char(c)) => Value::Int(c as i32),
            (UnaryOp::Plus, v) if v.is_numeric() => v,
            (UnaryOp::BitNot, Value::Int(i)) => Value::Int(!i),
            (UnaryOp::BitNot, Value::Char(c)) => Value::Int(!(c as i32)),
            (UnaryOp::BitNot, Value::Long(l)) => Value::Long(!l),
            (op, v) => return Err(Thrown::Fatal(format!("bad operand {} for {}", v.class_name(), op.symbol()))),
        })
    }

    pub fn binop(&mut self, op: BinaryOp, a: Value, b: Value) -> R<Value> {
        use BinaryOp::*;
        if op == Add && (matches!(a, Value::Str(_)) || matches!(b, Value::Str(_))) {
            let mut s = self.display(&a)?;
            s.push_str(&self.display(&b)?);
            return Ok(Value::str(s));
        }
        match op {
            Eq | Ne => {
                let same = match (&a, &b) {
                    (x, y) if x.is_numeric() && y.is_numeric() => {
                        if matches!(x, Value::Double(_)) || matches!(y, Value::Double(_)) {
                            x.as_f64() == y.as_f64()
                        } else {
                            x.as_i64() == y.as_i64()
                        }
                    }
                    _ => a.identical(&b),
                };
                return Ok(Value::Bool(same == (op == Eq)));
            }
            And | Or | BitAnd | BitOr | BitXor if matches!((&a, &b), (Value::Bool(_), Value::Bool(_))) => {
                let (Value::Bool(x), Value::Bool(y)) = (a, b) else { unreachable!() };
                return Ok(Value::Bool(match op {
                    And | BitAnd => x & y,
                    Or | BitOr => x | y,
                    _ => x ^ y,
                }));
            }
            _ => {}
        }
        if a.is_null() || b.is_null() {
            return Err(self.throw("NullPointerException", format!("null operand for {}", op.symbol())));
        }
        if !(a.is_numeric() && b.is_numeric()) {
            return Err(Thrown::Fatal(format!(
                "bad operands {} {} {}",
                a.class_name(),
                op.symbol(),
                b.class_name()
            )));
        }
        if matches!(op, Shl | Shr | UShr) {
            let n = b.as_i64().unwrap_or(0);
            return Ok(match a {
                Value::Long(x) => Value::Long(match op {
                    Shl => x.wrapping_shl((n & 63) as u32),
                    Shr => x >> (n & 63),
                    _ => ((x as u64) >> (n & 63)) as i64,
                }),
                other => {
                    let x = other.as_i64().unwrap_or(0) as i32;
                    Value::Int(match op {
                        Shl => x.wrapping_shl((n & 31) as u32),
                        Shr => x >> (n & 31),
                        _ => ((x as u32) >> (n & 31)) as i32,
                    })
                }
            });
        }
        let is_double = matches!(a, Value::Double(_)) || matches!(b, Value::Double(_));
        let is_long = matches!(a, Value::Long(_)) || matches!(b, Value::Long(_));
        if is_double {
            let (x, y) = (a.as_f64().unwrap_or(0.0), b.as_f64().unwrap_or(0.0));
            return Ok(match op {
                Add => Value::Double(x + y),
                Sub => Value::Double(x - y),
                Mul => Value::Double(x * y),
                Div => Value::Double(x / y),
                Rem => Value::Double(x % y),
                Lt => Value::Bool(x < y),
                Gt => Value::Bool(x > y),
                Le => Value::Bool(x <= y),
                Ge => Value::Bool(x >= y),
                _ => return Err(Thrown::Fatal(format!("bad operand double for {}", op.symbol()))),
            });
        }
        let (x, y) = (a.as_i64().unwrap_or(0), b.as_i64().unwrap_or(0));
        if matches!(op, Div | Rem) && y == 0 {
            return Err(self.throw("ArithmeticException", "/ by zero"));
        }
        let cmp = |r: bool| Ok(Value::Bool(r));
        if is_long {
            let r = match op {
                Add => x.wrapping_add(y),
                Sub => x.wrapping_sub(y),
                Mul => x.wrapping_mul(y),
                Div => x.wrapping_div(y),
                Rem => x.wrapping_rem(y),
                BitAnd => x & y,
                BitOr => x | y,
                BitXor => x ^ y,
                Lt => return cmp(x < y),
                Gt => return cmp(x > y),
                Le => return cmp(x <= y),
                Ge => return cmp(x >= y),
                _ => unreachable!(),
            };
            return Ok(Value::Long(r));
        }
        let (x, y) = (x as i32, y as i32);
        let r = match op {
            Add => x.wrapping_add(y),
            Sub => x.wrapping_sub(y),
            Mul => x.wrapping_mul(y),
            Div => x.wrapping_div(y),
            Rem => x.wrapping_rem(y),
            BitAnd => x & y,
            BitOr => x | y,
            BitXor => x ^ y,
            Lt => return cmp(x < y),
            Gt => return cmp(x > y),
            Le => return cmp(x <= y),
            Ge => return cmp(x >= y),
            _ => unreachable!(),
        };
        Ok(Value::Int(r))
    }
}

fn make_array(sizes: &[usize], leaf: &Value) -> Value {
    match sizes {
        [] => leaf.clone(),
        [n] => Value::array(vec![leaf.clone(); *n]),
        [n, rest @ ..] => Value::array((0..*n).map(|_| make_array(rest, leaf)).collect()),
    }
}
