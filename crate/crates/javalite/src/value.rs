//! Runtime values. Boxed and primitive numbers share one representation;
//! collections are shared, mutable and insertion ordered.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::rc::Rc;

use simplikit_core::syntax::ast::{Block, Expr, LambdaBody};

#[derive(Debug)]
pub struct Object {
    pub class: String,
    pub fields: RefCell<HashMap<String, Value>>,
}

#[derive(Debug, Default)]
pub struct MapData {
    pub entries: Vec<(Value, Value)>,
    /// Keys kept in natural order (TreeMap).
    pub sorted: bool,
}

#[derive(Debug, Default)]
pub struct SetData {
    pub items: Vec<Value>,
    pub sorted: bool,
}

#[derive(Debug)]
pub enum ClosureBody {
    Expr(Expr),
    Block(Block),
}

impl From<&LambdaBody> for ClosureBody {
    fn from(b: &LambdaBody) -> Self {
        match b {
            LambdaBody::Expr(e) => ClosureBody::Expr((**e).clone()),
            LambdaBody::Block(b) => ClosureBody::Block(b.clone()),
        }
    }
}

#[derive(Debug)]
pub enum Closure {
    Lambda {
        params: Vec<String>,
        body: ClosureBody,
        captured: Vec<(String, Value)>,
        this: Option<Value>,
        class: String,
        src: Rc<str>,
    },
    /// `Type::name` or `expr::name`.
    MethodRef { target: Value, name: String },
}

#[derive(Debug, Clone)]
pub enum Value {
    Null,
    Bool(bool),
    Int(i32),
    Long(i64),
    Double(f64),
    Char(char),
    Str(Rc<str>),
    Array(Rc<RefCell<Vec<Value>>>),
    List(Rc<RefCell<Vec<Value>>>),
    Map(Rc<RefCell<MapData>>),
    Set(Rc<RefCell<SetData>>),
    Entry(Rc<(Value, Value)>),
    Builder(Rc<RefCell<String>>),
    Object(Rc<Object>),
    Closure(Rc<Closure>),
    /// A class used as a value: static member access or `X.class`.
    Class(Rc<str>),
}

/// Primitive declared types; values are coerced on store.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prim {
    Boolean,
    Byte,
    Short,
    Int,
    Long,
    Char,
    Float,
    Double,
}

impl Prim {
    pub fn of(name: &str) -> Option<Prim> {
        Some(match name {
            "boolean" => Prim::Boolean,
            "byte" => Prim::Byte,
            "short" => Prim::Short,
            "int" => Prim::Int,
            "long" => Prim::Long,
            "char" => Prim::Char,
            "float" => Prim::Float,
            "double" => Prim::Double,
            _ => return None,
        })
    }
}

impl Value {
    pub fn str(s: impl Into<Rc<str>>) -> Value {
        Value::Str(s.into())
    }

    pub fn list(items: Vec<Value>) -> Value {
        Value::List(Rc::new(RefCell::new(items)))
    }

    pub fn array(items: Vec<Value>) -> Value {
        Value::Array(Rc::new(RefCell::new(items)))
    }

    pub fn map(sorted: bool) -> Value {
        Value::Map(Rc::new(RefCell::new(MapData {
            entries: Vec::new(),
            sorted,
        })))
    }

    pub fn set(sorted: bool) -> Value {
        Value::Set(Rc::new(RefCell::new(SetData {
            items: Vec::new(),
            sorted,
        })))
    }

    pub fn object(class: &str, fields: HashMap<String, Value>) -> Value {
        Value::Object(Rc::new(Object {
            class: class.to_string(),
            fields: RefCell::new(fields),
        }))
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, Value::Int(_) | Value::Long(_) | Value::Double(_) | Value::Char(_))
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i as i64),
            Value::Long(l) => Some(*l),
            Value::Char(c) => Some(*c as i64),
            Value::Double(d) => Some(*d as i64),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Double(d) => Some(*d),
            other => other.as_i64().map(|i| i as f64),
        }
    }

    /// Runtime class name as `getClass().getSimpleName()` would report it.
    pub fn class_name(&self) -> String {
        match self {
            Value::Null => "null".into(),
            Value::Bool(_) => "Boolean".into(),
            Value::Int(_) => "Integer".into(),
            Value::Long(_) => "Long".into(),
            Value::Double(_) => "Double".into(),
            Value::Char(_) => "Character".into(),
            Value::Str(_) => "String".into(),
            Value::Array(_) => "Object[]".into(),
            Value::List(_) => "ArrayList".into(),
            Value::Map(m) => if m.borrow().sorted { "TreeMap" } else { "HashMap" }.into(),
            Value::Set(s) => if s.borrow().sorted { "TreeSet" } else { "HashSet" }.into(),
            Value::Entry(_) => "Entry".into(),
            Value::Builder(_) => "StringBuilder".into(),
            Value::Object(o) => o.class.clone(),
            Value::Closure(_) => "Lambda".into(),
            Value::Class(_) => "Class".into(),
        }
    }

    /// Builtin supertypes, used by `instanceof` and catch matching.
    pub fn builtin_types(&self) -> &'static [&'static str] {
        match self {
            Value::Bool(_) => &["Boolean"],
            Value::Int(_) => &["Integer", "Number", "Comparable"],
            Value::Long(_) => &["Long", "Number", "Comparable"],
            Value::Double(_) => &["Double", "Number", "Comparable"],
            Value::Char(_) => &["Character", "Comparable"],
            Value::Str(_) => &["String", "CharSequence", "Comparable"],
            Value::List(_) => &["List", "ArrayList", "LinkedList", "Collection", "Iterable"],
            Value::Map(_) => &["Map", "HashMap", "TreeMap", "LinkedHashMap"],
            Value::Set(_) => &["Set", "HashSet", "TreeSet", "LinkedHashSet", "Collection", "Iterable"],
            Value::Builder(_) => &["StringBuilder", "CharSequence"],
            Value::Entry(_) => &["Entry", "Map.Entry"],
            _ => &[],
        }
    }

    pub fn coerce(self, prim: Prim) -> Value {
        match (prim, &self) {
            (Prim::Int, v) if v.is_numeric() => Value::Int(to_i64(v) as i32),
            (Prim::Short, v) if v.is_numeric() => Value::Int(to_i64(v) as i16 as i32),
            (Prim::Byte, v) if v.is_numeric() => Value::Int(to_i64(v) as i8 as i32),
            (Prim::Long, v) if v.is_numeric() => Value::Long(to_i64(v)),
            (Prim::Double | Prim::Float, v) if v.is_numeric() => Value::Double(v.as_f64().unwrap_or(0.0)),
            (Prim::Char, v) if v.is_numeric() => {
                Value::Char(char::from_u32(to_i64(v) as u32 & 0xFFFF).unwrap_or('\u{FFFD}'))
            }
            _ => self,
        }
    }

    pub fn identical(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Array(a), Value::Array(b)) | (Value::List(a), Value::List(b)) => Rc::ptr_eq(a, b),
            (Value::Map(a), Value::Map(b)) => Rc::ptr_eq(a, b),
            (Value::Set(a), Value::Set(b)) => Rc::ptr_eq(a, b),
            (Value::Builder(a), Value::Builder(b)) => Rc::ptr_eq(a, b),
            (Value::Object(a), Value::Object(b)) => Rc::ptr_eq(a, b),
            (Value::Closure(a), Value::Closure(b)) => Rc::ptr_eq(a, b),
            (Value::Entry(a), Value::Entry(b)) => Rc::ptr_eq(a, b),
            _ => self.builtin_equals(other),
        }
    }

    /// `equals` for everything except user objects, which compare by
    /// identity here (the interpreter dispatches user `equals` first).
    pub fn builtin_equals(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Null, Value::Null) => true,
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Long(a), Value::Long(b)) => a == b,
            (Value::Double(a), Value::Double(b)) => a == b,
            (Value::Char(a), Value::Char(b)) => a == b,
            (Value::Str(a), Value::Str(b)) => a == b,
            (Value::Class(a), Value::Class(b)) => a == b,
            (Value::List(a), Value::List(b)) => {
                Rc::ptr_eq(a, b) || {
                    let (a, b) = (a.borrow(), b.borrow());
                    a.len() == b.len() && a.iter().zip(b.iter()).all(|(x, y)| x.builtin_equals(y))
                }
            }
            (Value::Set(a), Value::Set(b)) => {
                Rc::ptr_eq(a, b) || {
                    let (a, b) = (a.borrow(), b.borrow());
                    a.items.len() == b.items.len() && a.items.iter().all(|x| b.items.iter().any(|y| x.builtin_equals(y)))
                }
            }
            (Value::Map(a), Value::Map(b)) => {
                Rc::ptr_eq(a, b) || {
                    let (a, b) = (a.borrow(), b.borrow());
                    a.entries.len() == b.entries.len()
                        && a.entries.iter().all(|(k, v)| {
                            b.entries.iter().any(|(k2, v2)| k.builtin_equals(k2) && v.builtin_equals(v2))
                        })
                }
            }
            (Value::Entry(a), Value::Entry(b)) => a.0.builtin_equals(&b.0) && a.1.builtin_equals(&b.1),
            _ => self.identical_ref(other),
        }
    }

    fn identical_ref(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Array(a), Value::Array(b)) => Rc::ptr_eq(a, b),
            (Value::Builder(a), Value::Builder(b)) => Rc::ptr_eq(a, b),
            (Value::Object(a), Value::Object(b)) => Rc::ptr_eq(a, b),
            (Value::Closure(a), Value::Closure(b)) => Rc::ptr_eq(a, b),
            _ => false,
        }
    }

    /// Natural ordering for sorting and `compareTo`; `None` when not
    /// comparable.
    pub fn natural_cmp(&self, other: &Value) -> Option<std::cmp::Ordering> {
        match (self, other) {
            (Value::Str(a), Value::Str(b)) => Some(a.cmp(b)),
            (Value::Bool(a), Value::Bool(b)) => Some(a.cmp(b)),
            (a, b) if a.is_numeric() && b.is_numeric() => {
                if matches!(a, Value::Double(_)) || matches!(b, Value::Double(_)) {
                    a.as_f64()?.partial_cmp(&b.as_f64()?)
                } else {
                    Some(a.as_i64()?.cmp(&b.as_i64()?))
                }
            }
            _ => None,
        }
    }

    pub fn hash_code(&self) -> i32 {
        match self {
            Value::Null => 0,
            Value::Bool(b) => if *b { 1231 } else { 1237 },
            Value::Int(i) => *i,
            Value::Long(l) => (*l ^ (*l >> 32)) as i32,
            Value::Double(d) => {
                let bits = d.to_bits() as i64;
                (bits ^ (bits >> 32)) as i32
            }
            Value::Char(c) => *c as i32,
            Value::Str(s) => s.encode_utf16().fold(0i32, |h, c| h.wrapping_mul(31).wrapping_add(c as i32)),
            Value::List(l) => l.borrow().iter().fold(1i32, |h, v| h.wrapping_mul(31).wrapping_add(v.hash_code())),
            other => other.class_name().len() as i32,
        }
    }
}

fn to_i64(v: &Value) -> i64 {
    match v {
        Value::Double(d) => {
            if d.is_nan() {
                0
            } else {
                *d as i64
            }
        }
        other => other.as_i64().unwrap_or(0),
    }
}

/// `Double.toString`.
pub fn format_double(d: f64) -> String {
    if d.is_nan() {
        return "NaN".into();
    }
    if d.is_infinite() {
        return if d > 0.0 { "Infinity" } else { "-Infinity" }.into();
    }
    let a = d.abs();
    if a == 0.0 || (1e-3..1e7).contains(&a) {
        let s = format!("{d}");
        if s.contains('.') {
            s
        } else {
            format!("{s}.0")
        }
    } else {
        let s = format!("{d:e}");
        let (mant, exp) = s.split_once('e').unwrap_or((&s, "0"));
        let mant = if mant.contains('.') { mant.to_string() } else { format!("{mant}.0") };
        format!("{mant}E{exp}")
    }
}

/// `String.valueOf` for builtin values. User objects are rendered by the
/// interpreter, which may call their `toString`.
pub fn display_builtin(v: &Value, out: &mut String, render_obj: &mut dyn FnMut(&Value, &mut String)) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Value::Long(l) => {
            let _ = write!(out, "{l}");
        }
        Value::Double(d) => out.push_str(&format_double(*d)),
        Value::Char(c) => out.push(*c),
        Value::Str(s) => out.push_str(s),
        Value::Builder(b) => out.push_str(&b.borrow()),
        Value::List(l) => seq(&l.borrow(), out, render_obj),
        Value::Set(s) => seq(&s.borrow().items, out, render_obj),
        Value::Map(m) => {
            out.push('{');
            for (i, (k, val)) in m.borrow().entries.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                display_builtin(k, out, render_obj);
                out.push('=');
                display_builtin(val, out, render_obj);
            }
            out.push('}');
        }
        Value::Entry(e) => {
            display_builtin(&e.0, out, render_obj);
            out.push('=');
            display_builtin(&e.1, out, render_obj);
        }
        Value::Array(a) => {
            let _ = write!(out, "[Ljava.lang.Object;@{:x}", Rc::as_ptr(a) as usize & 0xffffff);
        }
        Value::Class(c) => {
            let _ = write!(out, "class {c}");
        }
        Value::Object(_) | Value::Closure(_) => render_obj(v, out),
    }
}

fn seq(items: &[Value], out: &mut String, render_obj: &mut dyn FnMut(&Value, &mut String)) {
    out.push('[');
    for (i, v) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        display_builtin(v, out, render_obj);
    }
    out.push(']');
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("malformed literal {0:?}")]
pub struct LiteralError(pub String);

pub fn parse_int_literal(text: &str, long: bool) -> Result<Value, LiteralError> {
    let err = || LiteralError(text.to_string());
    let t: String = text.chars().filter(|&c| c != '_').collect();
    let t = t.trim_end_matches(['l', 'L']);
    let (digits, radix) = if let Some(h) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        (h, 16)
    } else if let Some(b) = t.strip_prefix("0b").or_else(|| t.strip_prefix("0B")) {
        (b, 2)
    } else if t.len() > 1 && t.starts_with('0') {
        (&t[1..], 8)
    } else {
        (t, 10)
    };
    let n = u64::from_str_radix(digits, radix).map_err(|_| err())?;
    if long {
        Ok(Value::Long(n as i64))
    } else if radix == 10 {
        // 2147483648 is only legal under unary minus; wrapping gives MIN.
        if n > 1 << 31 {
            return Err(err());
        }
        Ok(Value::Int(n as u32 as i32))
    } else {
        u32::try_from(n).map(|u| Value::Int(u as i32)).map_err(|_| err())
    }
}

pub fn parse_float_literal(text: &str) -> Result<Value, LiteralError> {
    let t: String = text.chars().filter(|&c| c != '_').collect();
    let t = t.trim_end_matches(['d', 'D', 'f', 'F']);
    t.parse::<f64>().map(Value::Double).map_err(|_| LiteralError(text.to_string()))
}

/// Resolves escapes in the body of a string or char literal.
pub fn unescape(body: &str) -> Result<String, LiteralError> {
    let mut out = String::new();
    let mut chars = body.chars().peekable();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        let e = chars.next().ok_or_else(|| LiteralError(body.to_string()))?;
        match e {
            'n' => out.push('\n'),
            't' => out.push('\t'),
            'r' => out.push('\r'),
            'b' => out.push('\u{8}'),
            'f' => out.push('\u{c}'),
            's' => out.push(' '),
            '0'..='7' => {
                let mut v = e.to_digit(8).unwrap_or(0);
                while let Some(d) = chars.peek().and_then(|c| c.to_digit(8)) {
                    if v * 8 + d > 0o377 {
                        break;
                    }
                    v = v * 8 + d;
                    chars.next();
                }
                out.push(char::from_u32(v).unwrap_or('\u{FFFD}'));
            }
            'u' => {
                while chars.peek() == Some(&'u') {
                    chars.next();
                }
                let hex: String = chars.by_ref().take(4).collect();
                let v = u32::from_str_radix(&hex, 16).map_err(|_| LiteralError(body.to_string()))?;
                out.push(char::from_u32(v).unwrap_or('\u{FFFD}'));
            }
            other => out.push(other),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        assert!(matches!(parse_int_literal("0x1F", false), Ok(Value::Int(31))));
        assert!(matches!(parse_int_literal("1_000L", true), Ok(Value::Long(1000))));
        assert!(matches!(parse_int_literal("0xFFFFFFFF", false), Ok(Value::Int(-1))));
        assert!(matches!(parse_int_literal("017", false), Ok(Value::Int(15))));
        assert!(parse_int_literal("4294967296", false).is_err());
        assert_eq!(unescape(r"a\tb\nA\\").unwrap(), "a\tb\nA\\");
        assert!(matches!(parse_float_literal("2.5f"), Ok(Value::Double(d)) if d == 2.5));
    }

    #[test]
    fn double_formatting() {
        assert_eq!(format_double(1.0), "1.0");
        assert_eq!(format_double(0.1), "0.1");
        assert_eq!(format_double(-2.5), "-2.5");
        assert_eq!(format_double(1e10), "1.0E10");
        assert_eq!(format_double(1.5e-5), "1.5E-5");
    }

    #[test]
    fn coercion_and_equality() {
        assert!(matches!(Value::Double(3.9).coerce(Prim::Int), Value::Int(3)));
        assert!(matches!(Value::Int(65).coerce(Prim::Char), Value::Char('A')));
        assert!(matches!(Value::Long(1 << 33).coerce(Prim::Int), Value::Int(0)));
        assert!(Value::list(vec![Value::Int(1)]).builtin_equals(&Value::list(vec![Value::Int(1)])));
        assert!(!Value::list(vec![]).identical(&Value::list(vec![])));
        assert_eq!(Value::str("ab").hash_code(), 3105);
    }
}
