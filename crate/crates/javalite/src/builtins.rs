//! The slice of the Java standard library the interpreter provides:
//! strings, boxed numbers, collections, `Math`, `System.out` and JUnit
//! assertions. Each entry point returns `Ok(None)` for unknown members.

use std::cell::RefCell;
use std::rc::Rc;

use crate::interp::{truthy, Interp, Thrown, R};
use crate::value::Value;

fn fatal(msg: impl Into<String>) -> Thrown {
    Thrown::Fatal(msg.into())
}

fn int_arg(it: &Interp, v: &Value) -> R<i64> {
    match v {
        Value::Int(_) | Value::Long(_) | Value::Char(_) => Ok(v.as_i64().unwrap_or(0)),
        Value::Null => Err(it.throw("NullPointerException", "null integer argument")),
        other => Err(fatal(format!("expected integer, found {}", other.class_name()))),
    }
}

fn str_arg(v: &Value) -> R<Rc<str>> {
    match v {
        Value::Str(s) => Ok(s.clone()),
        Value::Char(c) => Ok(c.to_string().into()),
        other => Err(fatal(format!("expected String, found {}", other.class_name()))),
    }
}

fn chars(s: &str) -> Vec<char> {
    s.chars().collect()
}

fn index_error(it: &Interp, class: &str, i: i64, len: usize) -> Thrown {
    it.throw(class, format!("Index {i} out of bounds for length {len}"))
}

pub fn static_field(class: &str, name: &str) -> Option<Value> {
    Some(match (class, name) {
        ("Integer", "MAX_VALUE") => Value::Int(i32::MAX),
        ("Integer", "MIN_VALUE") => Value::Int(i32::MIN),
        ("Long", "MAX_VALUE") => Value::Long(i64::MAX),
        ("Long", "MIN_VALUE") => Value::Long(i64::MIN),
        ("Double", "MAX_VALUE") => Value::Double(f64::MAX),
        ("Double", "MIN_VALUE") => Value::Double(f64::from_bits(1)),
        ("Double", "POSITIVE_INFINITY") => Value::Double(f64::INFINITY),
        ("Double", "NEGATIVE_INFINITY") => Value::Double(f64::NEG_INFINITY),
        ("Double", "NaN") => Value::Double(f64::NAN),
        ("Math", "PI") => Value::Double(std::f64::consts::PI),
        ("Math", "E") => Value::Double(std::f64::consts::E),
        ("System", "out") => Value::Class("System.out".into()),
        ("System", "err") => Value::Class("System.err".into()),
        ("Boolean", "TRUE") => Value::Bool(true),
        ("Boolean", "FALSE") => Value::Bool(false),
        _ => return None,
    })
}

pub fn construct(it: &mut Interp, class: &str, args: Vec<Value>) -> R<Option<Value>> {
    let copy_from = |it: &mut Interp, args: &[Value]| -> R<Vec<Value>> {
        match args.first() {
            Some(v @ (Value::List(_) | Value::Set(_) | Value::Array(_))) => it.iterate(v),
            _ => Ok(Vec::new()),
        }
    };
    Ok(Some(match class {
        "ArrayList" | "LinkedList" | "ArrayDeque" | "Stack" | "Vector" | "CopyOnWriteArrayList" => {
            Value::list(copy_from(it, &args)?)
        }
        "HashMap" | "LinkedHashMap" | "TreeMap" | "ConcurrentHashMap" | "Hashtable" => {
            let m = Value::map(class == "TreeMap");
            if let Some(Value::Map(src)) = args.first() {
                let entries = src.borrow().entries.clone();
                for (k, v) in entries {
                    map_put(it, &m, k, v)?;
                }
            }
            m
        }
        "HashSet" | "LinkedHashSet" | "TreeSet" => {
            let s = Value::set(class == "TreeSet");
            for v in copy_from(it, &args)? {
                set_add(it, &s, v)?;
            }
            s
        }
        "StringBuilder" | "StringBuffer" => {
            let init = match args.first() {
                Some(Value::Str(s)) => s.to_string(),
                _ => String::new(),
            };
            Value::Builder(Rc::new(RefCell::new(init)))
        }
        "String" => match args.first() {
            Some(Value::Array(a)) => Value::str(a.borrow().iter().filter_map(|c| match c {
                Value::Char(c) => Some(*c),
                _ => None,
            }).collect::<String>()),
            Some(Value::Str(s)) => Value::Str(s.clone()),
            _ => Value::str(""),
        },
        "Object" => Value::object("Object", Default::default()),
        "Integer" => args.first().cloned().unwrap_or(Value::Int(0)),
        n if crate::program::is_throwable_name(n) => {
            let ex = it.exception(n, None);
            if let Value::Object(o) = &ex {
                let mut fields = o.fields.borrow_mut();
                for a in &args {
                    match a {
                        Value::Str(_) => {
                            fields.insert("message".into(), a.clone());
                        }
                        Value::Object(_) => {
                            fields.insert("cause".into(), a.clone());
                        }
                        _ => {}
                    }
                }
            }
            ex
        }
        _ => return Ok(None),
    }))
}

fn list_items(v: &Value) -> Option<Vec<Value>> {
    match v {
        Value::List(l) | Value::Array(l) => Some(l.borrow().clone()),
        Value::Set(s) => Some(s.borrow().items.clone()),
        _ => None,
    }
}

fn position(it: &mut Interp, items: &[Value], x: &Value) -> R<Option<usize>> {
    for (i, v) in items.iter().enumerate() {
        if it.equals(x, v)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

fn map_find(it: &mut Interp, m: &Value, k: &Value) -> R<Option<usize>> {
    let Value::Map(m) = m else { return Ok(None) };
    let keys: Vec<Value> = m.borrow().entries.iter().map(|(k, _)| k.clone()).collect();
    position(it, &keys, k)
}

fn map_put(it: &mut Interp, m: &Value, k: Value, v: Value) -> R<Value> {
    let Value::Map(data) = m else { return Ok(Value::Null) };
    if let Some(i) = map_find(it, m, &k)? {
        return Ok(std::mem::replace(&mut data.borrow_mut().entries[i].1, v));
    }
    let sorted = data.borrow().sorted;
    if sorted {
        let keys: Vec<Value> = data.borrow().entries.iter().map(|(k, _)| k.clone()).collect();
        let mut at = keys.len();
        for (i, existing) in keys.iter().enumerate() {
            if it.compare(&k, existing, None)? == std::cmp::Ordering::Less {
                at = i;
                break;
            }
        }
        data.borrow_mut().entries.insert(at, (k, v));
    } else {
        data.borrow_mut().entries.push((k, v));
    }
    Ok(Value::Null)
}

fn set_add(it: &mut Interp, s: &Value, v: Value) -> R<bool> {
    let Value::Set(data) = s else { return Ok(false) };
    let items = data.borrow().items.clone();
    if position(it, &items, &v)?.is_some() {
        return Ok(false);
    }
    if data.borrow().sorted {
        let mut at = items.len();
        for (i, existing) in items.iter().enumerate() {
            if it.compare(&v, existing, None)? == std::cmp::Ordering::Less {
                at = i;
                break;
            }
        }
        data.borrow_mut().items.insert(at, v);
    } else {
        data.borrow_mut().items.push(v);
    }
    Ok(true)
}

/// `String.format` subset: `%[flags][width][.precision](s|d|f|x|c|b|n|%)`.
pub fn format_java(it: &mut Interp, fmt: &str, args: &[Value]) -> R<String> {
    let re = regex::Regex::new(r"%([-0+,]*)(\d+)?(?:\.(\d+))?([sdfxXcbn%])").expect("static regex");
    let mut out = String::new();
    let mut last = 0;
    let mut next = 0;
    for cap in re.captures_iter(fmt) {
        let m = cap.get(0).expect("whole match");
        out.push_str(&fmt[last..m.start()]);
        last = m.end();
        let flags = cap.get(1).map_or("", |x| x.as_str());
        let width: usize = cap.get(2).map_or(0, |x| x.as_str().parse().unwrap_or(0));
        let prec: Option<usize> = cap.get(3).and_then(|x| x.as_str().parse().ok());
        let conv = &cap[4];
        if conv == "n" {
            out.push('\n');
            continue;
        }
        if conv == "%" {
            out.push('%');
            continue;
        }
        let arg = args.get(next).cloned().ok_or_else(|| it.throw("MissingFormatArgumentException", format!("Format specifier '{}'", m.as_str())))?;
        next += 1;
        let body = match conv {
            "d" => {
                let n = int_arg(it, &arg)?;
                let s = n.abs().to_string();
                let s = if flags.contains(',') {
                    let b = s.as_bytes();
                    let mut g = String::new();
                    for (i, c) in b.iter().enumerate() {
                        if i > 0 && (b.len() - i) % 3 == 0 {
                            g.push(',');
                        }
                        g.push(*c as char);
                    }
                    g
                } else {
                    s
                };
                let sign = if n < 0 { "-" } else if flags.contains('+') { "+" } else { "" };
                format!("{sign}{s}")
            }
            "f" => {
                let x = arg.as_f64().ok_or_else(|| fatal("%f needs a number"))?;
                let s = format!("{:.*}", prec.unwrap_or(6), x);
                if flags.contains('+') && x >= 0.0 {
                    format!("+{s}")
                } else {
                    s
                }
            }
            "x" | "X" => {
                let n = int_arg(it, &arg)?;
                let s = match arg {
                    Value::Long(_) => format!("{:x}", n),
                    _ => format!("{:x}", n as i32),
                };
                if conv == "X" {
                    s.to_uppercase()
                } else {
                    s
                }
            }
            "c" => match arg {
                Value::Char(c) => c.to_string(),
                other => char::from_u32(int_arg(it, &other)? as u32).map(String::from).unwrap_or_default(),
            },
            "b" => match arg {
                Value::Null => "false".into(),
                Value::Bool(b) => b.to_string(),
                _ => "true".into(),
            },
            _ => {
                let s = it.display(&arg)?;
                match prec {
                    Some(p) => s.chars().take(p).collect(),
                    None => s,
                }
            }
        };
        let pad = width.saturating_sub(body.chars().count());
        if flags.contains('-') {
            out.push_str(&body);
            out.push_str(&" ".repeat(pad));
        } else if flags.contains('0') && matches!(conv, "d" | "f" | "x" | "X") {
            let (sign, digits) = body.split_at(if body.starts_with(['-', '+']) { 1 } else { 0 });
            out.push_str(sign);
            out.push_str(&"0".repeat(pad));
            out.push_str(digits);
        } else {
            out.push_str(&" ".repeat(pad));
            out.push_str(&body);
        }
    }
    out.push_str(&fmt[last..]);
    Ok(out)
}

fn assertion(it: &Interp, message: Option<&Value>, detail: String) -> Thrown {
    let prefix = match message {
        Some(Value::Str(m)) if !m.is_empty() => format!("{m} ==> "),
        _ => String::new(),
    };
    it.throw("AssertionFailedError", format!("{prefix}{detail}"))
}

fn assert_call(it: &mut Interp, junit4: bool, name: &str, mut args: Vec<Value>) -> R<Option<Value>> {
    // JUnit 4 puts the optional message first, Jupiter last.
    let split_msg = |args: &mut Vec<Value>, base: usize| -> Option<Value> {
        if args.len() > base {
            Some(if junit4 { args.remove(0) } else { args.pop().unwrap_or(Value::Null) })
        } else {
            None
        }
    };
    match name {
        "assertEquals" | "assertNotEquals" => {
            let delta = if args.len() == 3 && args.iter().all(Value::is_numeric) && matches!(args[2], Value::Double(_)) {
                args.pop().and_then(|d| d.as_f64())
            } else {
                None
            };
            let msg = split_msg(&mut args, 2);
            let [exp, act] = <[Value; 2]>::try_from(args).map_err(|_| fatal(format!("{name} arity")))?;
            let equal = match delta {
                Some(d) => (exp.as_f64().unwrap_or(0.0) - act.as_f64().unwrap_or(0.0)).abs() <= d,
                None => match (&exp, &act) {
                    (a, b) if a.is_numeric() && b.is_numeric() && !matches!(a, Value::Char(_)) => {
                        if matches!(a, Value::Double(_)) || matches!(b, Value::Double(_)) {
                            a.as_f64() == b.as_f64()
                        } else {
                            a.as_i64() == b.as_i64()
                        }
                    }
                    (Value::Null, b) => b.is_null(),
                    (a, b) => it.equals(a, b)?,
                },
            };
            if name == "assertEquals" && !equal {
                let (e, a) = (it.display(&exp)?, it.display(&act)?);
                return Err(assertion(it, msg.as_ref(), format!("expected: <{e}> but was: <{a}>")));
            }
            if name == "assertNotEquals" && equal {
                let a = it.display(&act)?;
                return Err(assertion(it, msg.as_ref(), format!("expected: not equal but was: <{a}>")));
            }
        }
        "assertTrue" | "assertFalse" => {
            let msg = split_msg(&mut args, 1);
            let c = args.first().ok_or_else(|| fatal("assertTrue arity"))?;
            let c = match c {
                Value::Closure(_) => it.call_function(c, vec![])?,
                v => v.clone(),
            };
            let want = name == "assertTrue";
            if truthy(&c)? != want {
                return Err(assertion(it, msg.as_ref(), format!("expected: <{want}> but was: <{}>", !want)));
            }
        }
        "assertNull" | "assertNotNull" => {
            let msg = split_msg(&mut args, 1);
            let v = args.first().ok_or_else(|| fatal("assertNull arity"))?;
            if v.is_null() != (name == "assertNull") {
                let shown = it.display(v)?;
                let detail = if name == "assertNull" { format!("expected: <null> but was: <{shown}>") } else { "expected: not <null>".into() };
                return Err(assertion(it, msg.as_ref(), detail));
            }
        }
        "assertSame" | "assertNotSame" => {
            let msg = split_msg(&mut args, 2);
            if args.len() != 2 {
                return Err(fatal("assertSame arity"));
            }
            if args[0].identical(&args[1]) != (name == "assertSame") {
                return Err(assertion(it, msg.as_ref(), format!("{name} failed")));
            }
        }
        "assertArrayEquals" | "assertIterableEquals" | "assertLinesMatch" => {
            let msg = split_msg(&mut args, 2);
            if args.len() != 2 {
                return Err(fatal(format!("{name} arity")));
            }
            let (a, b) = (list_items(&args[0]), list_items(&args[1]));
            let equal = match (a, b) {
                (Some(a), Some(b)) => {
                    let mut eq = a.len() == b.len();
                    for (x, y) in a.iter().zip(&b) {
                        eq = eq && it.equals(x, y)?;
                    }
                    eq
                }
                (None, None) => args[0].is_null() && args[1].is_null(),
                _ => false,
            };
            if !equal {
                return Err(assertion(it, msg.as_ref(), "array contents differ".into()));
            }
        }
        "assertThrows" => {
            let [class, exec] = <[Value; 2]>::try_from(args.into_iter().take(2).collect::<Vec<_>>())
                .map_err(|_| fatal("assertThrows arity"))?;
            let Value::Class(expected) = class else {
                return Err(fatal("assertThrows expects a class literal"));
            };
            return match it.call_function(&exec, vec![]) {
                Err(Thrown::Exception(ex)) if it.is_instance(&ex, &expected) => Ok(Some(ex)),
                Err(Thrown::Exception(ex)) => Err(assertion(
                    it,
                    None,
                    format!("Unexpected exception type thrown, expected: <{expected}> but was: <{}>", ex.class_name()),
                )),
                Err(fatal) => Err(fatal),
                Ok(_) => Err(assertion(it, None, format!("Expected {expected} to be thrown, but nothing was thrown."))),
            };
        }
        "assertDoesNotThrow" => {
            let exec = args.first().cloned().ok_or_else(|| fatal("assertDoesNotThrow arity"))?;
            return match it.call_function(&exec, vec![]) {
                Err(Thrown::Exception(ex)) => {
                    let shown = it.display(&ex)?;
                    Err(assertion(it, None, format!("Unexpected exception thrown: {shown}")))
                }
                other => other.map(Some),
            };
        }
        "fail" => {
            let msg = args.first().map(|m| it.display(m)).transpose()?;
            return Err(it.throw("AssertionFailedError", msg.unwrap_or_default()));
        }
        _ => return Ok(None),
    }
    Ok(Some(Value::Null))
}

pub fn static_call(it: &mut Interp, class: &str, name: &str, args: Vec<Value>) -> R<Option<Value>> {
    let a0 = args.first().cloned().unwrap_or(Value::Null);
    let a1 = args.get(1).cloned().unwrap_or(Value::Null);
    let num = |v: &Value| v.as_f64().unwrap_or(0.0);
    Ok(Some(match (class, name, args.len()) {
        ("Assertions" | "Assert", ..) => return assert_call(it, class == "Assert", name, args),
        ("System.out" | "System.err", "println" | "print", _) => {
            let mut s = match args.first() {
                Some(Value::Array(a)) if a.borrow().iter().all(|c| matches!(c, Value::Char(_))) => a
                    .borrow()
                    .iter()
                    .filter_map(|c| if let Value::Char(c) = c { Some(*c) } else { None })
                    .collect(),
                Some(v) => it.display(v)?,
                None => String::new(),
            };
            if name == "println" {
                s.push('\n');
            }
            if class == "System.out" {
                it.stdout.push_str(&s);
            }
            Value::Null
        }
        ("System.out" | "System.err", "printf" | "format", _) => {
            let s = format_java(it, &str_arg(&a0)?, &args[1..])?;
            if class == "System.out" {
                it.stdout.push_str(&s);
            }
            Value::Null
        }
        ("System", "currentTimeMillis", 0) => Value::Long(0),
        ("System", "nanoTime", 0) => Value::Long(0),
        ("System", "lineSeparator", 0) => Value::str("\n"),
        ("System", "arraycopy", 5) => {
            let (Value::Array(src), Value::Array(dst)) = (&a0, &args[2]) else {
                return Err(it.throw("NullPointerException", "arraycopy on null"));
            };
            let (sp, dp, n) = (int_arg(it, &a1)? as usize, int_arg(it, &args[3])? as usize, int_arg(it, &args[4])? as usize);
            let chunk: Vec<Value> = src.borrow().get(sp..sp + n).map(<[Value]>::to_vec).ok_or_else(|| index_error(it, "ArrayIndexOutOfBoundsException", (sp + n) as i64, src.borrow().len()))?;
            let mut d = dst.borrow_mut();
            if dp + n > d.len() {
                let len = d.len();
                drop(d);
                return Err(index_error(it, "ArrayIndexOutOfBoundsException", (dp + n) as i64, len));
            }
            d[dp..dp + n].clone_from_slice(&chunk);
            Value::Null
        }
        ("Math", "max" | "min", 2) => {
            let pick_max = name == "max";
            match (&a0, &a1) {
                (Value::Double(_), _) | (_, Value::Double(_)) => {
                    Value::Double(if pick_max { num(&a0).max(num(&a1)) } else { num(&a0).min(num(&a1)) })
                }
                (Value::Long(_), _) | (_, Value::Long(_)) => {
                    let (x, y) = (int_arg(it, &a0)?, int_arg(it, &a1)?);
                    Value::Long(if pick_max { x.max(y) } else { x.min(y) })
                }
                _ => {
                    let (x, y) = (int_arg(it, &a0)? as i32, int_arg(it, &a1)? as i32);
                    Value::Int(if pick_max { x.max(y) } else { x.min(y) })
                }
            }
        }
        ("Math", "abs", 1) => match a0 {
            Value::Int(i) => Value::Int(i.wrapping_abs()),
            Value::Long(l) => Value::Long(l.wrapping_abs()),
            v => Value::Double(num(&v).abs()),
        },
        ("Math", "pow", 2) => Value::Double(num(&a0).powf(num(&a1))),
        ("Math", "sqrt", 1) => Value::Double(num(&a0).sqrt()),
        ("Math", "cbrt", 1) => Value::Double(num(&a0).cbrt()),
        ("Math", "floor", 1) => Value::Double(num(&a0).floor()),
        ("Math", "ceil", 1) => Value::Double(num(&a0).ceil()),
        ("Math", "log", 1) => Value::Double(num(&a0).ln()),
        ("Math", "log10", 1) => Value::Double(num(&a0).log10()),
        ("Math", "exp", 1) => Value::Double(num(&a0).exp()),
        ("Math", "signum", 1) => Value::Double(num(&a0).signum()),
        ("Math", "hypot", 2) => Value::Double(num(&a0).hypot(num(&a1))),
        ("Math", "round", 1) => Value::Long((num(&a0) + 0.5).floor() as i64),
        ("Math", "floorMod", 2) => {
            let (x, y) = (int_arg(it, &a0)?, int_arg(it, &a1)?);
            if y == 0 {
                return Err(it.throw("ArithmeticException", "/ by zero"));
            }
            Value::Int(x.rem_euclid(y) as i32 + if y < 0 && x.rem_euclid(y) != 0 { y as i32 } else { 0 })
        }
        ("Math", "floorDiv", 2) => {
            let (x, y) = (int_arg(it, &a0)?, int_arg(it, &a1)?);
            if y == 0 {
                return Err(it.throw("ArithmeticException", "/ by zero"));
            }
            Value::Int(x.div_euclid(y) as i32 - if y < 0 && x.rem_euclid(y) != 0 { 1 } else { 0 })
        }
        ("Integer" | "Long" | "Short" | "Byte", "parseInt" | "valueOf" | "parseLong" | "parseShort" | "parseByte", 1 | 2) => {
            if let (Value::Int(_) | Value::Long(_), "valueOf") = (&a0, name) {
                return Ok(Some(a0));
            }
            let s = str_arg(&a0)?;
            let radix = if args.len() == 2 { int_arg(it, &a1)? as u32 } else { 10 };
            let parsed = i64::from_str_radix(s.strip_prefix('+').unwrap_or(&s), radix).ok();
            let v = match (class, parsed) {
                ("Long", Some(n)) => Value::Long(n),
                (_, Some(n)) if i32::try_from(n).is_ok() => Value::Int(n as i32),
                _ => return Err(it.throw("NumberFormatException", format!("For input string: \"{s}\""))),
            };
            v
        }
        ("Double" | "Float", "parseDouble" | "valueOf" | "parseFloat", 1) => match &a0 {
            Value::Str(s) => s
                .trim()
                .parse::<f64>()
                .map(Value::Double)
                .map_err(|_| it.throw("NumberFormatException", format!("For input string: \"{s}\"")))?,
            v => Value::Double(num(v)),
        },
        ("Boolean", "parseBoolean" | "valueOf", 1) => match &a0 {
            Value::Bool(b) => Value::Bool(*b),
            Value::Str(s) => Value::Bool(s.eq_ignore_ascii_case("true")),
            _ => Value::Bool(false),
        },
        ("Integer" | "Long" | "Double" | "Character" | "Boolean", "compare", 2) => {
            Value::Int(it.compare(&a0, &a1, None)? as i32)
        }
        ("Integer" | "Long" | "Double", "sum", 2) => it.binop(simplikit_core::syntax::ast::BinaryOp::Add, a0, a1)?,
        ("Integer" | "Long", "max" | "min", 2) => return static_call(it, "Math", name, args),
        ("Integer", "toBinaryString", 1) => Value::str(format!("{:b}", int_arg(it, &a0)? as i32)),
        ("Integer", "toHexString", 1) => Value::str(format!("{:x}", int_arg(it, &a0)? as i32)),
        ("Integer" | "Long" | "Double" | "Boolean" | "Character" | "String" | "Objects", "toString" | "valueOf", 1) => {
            if class == "Character" && name == "valueOf" {
                return Ok(Some(a0));
            }
            match (&a0, class) {
                (Value::Array(a), "String") => Value::str(
                    a.borrow()
                        .iter()
                        .filter_map(|c| if let Value::Char(c) = c { Some(*c) } else { None })
                        .collect::<String>(),
                ),
                _ => Value::str(it.display(&a0)?),
            }
        }
        ("Integer" | "Long" | "Double", "hashCode", 1) => Value::Int(a0.hash_code()),
        ("Character", "isDigit", 1) => Value::Bool(char_of(&a0).is_ascii_digit()),
        ("Character", "isLetter", 1) => Value::Bool(char_of(&a0).is_alphabetic()),
        ("Character", "isLetterOrDigit", 1) => Value::Bool(char_of(&a0).is_alphanumeric()),
        ("Character", "isAlphabetic", 1) => Value::Bool(char_of(&a0).is_alphabetic()),
        ("Character", "isWhitespace" | "isSpaceChar", 1) => Value::Bool(char_of(&a0).is_whitespace()),
        ("Character", "isUpperCase", 1) => Value::Bool(char_of(&a0).is_uppercase()),
        ("Character", "isLowerCase", 1) => Value::Bool(char_of(&a0).is_lowercase()),
        ("Character", "toUpperCase", 1) => Value::Char(char_of(&a0).to_uppercase().next().unwrap_or('\0')),
        ("Character", "toLowerCase", 1) => Value::Char(char_of(&a0).to_lowercase().next().unwrap_or('\0')),
        ("Character", "getNumericValue", 1) => Value::Int(char_of(&a0).to_digit(36).map_or(-1, |d| d as i32)),
        ("String", "join", _) => {
            let sep = str_arg(&a0)?;
            let parts = match (args.len(), &a1) {
                (2, v @ (Value::List(_) | Value::Set(_) | Value::Array(_))) => it.iterate(v)?,
                _ => args[1..].to_vec(),
            };
            let mut strs = Vec::new();
            for p in &parts {
                strs.push(it.display(p)?);
            }
            Value::str(strs.join(&sep))
        }
        ("String", "format", _) => Value::str(format_java(it, &str_arg(&a0)?, &args[1..])?),
        ("Objects", "equals", 2) => Value::Bool(match (&a0, &a1) {
            (Value::Null, b) => b.is_null(),
            (a, b) => it.equals(a, b)?,
        }),
        ("Objects", "hash", _) => {
            let mut h = 1i32;
            for a in &args {
                h = h.wrapping_mul(31).wrapping_add(it.hash_code(a)?);
            }
            Value::Int(h)
        }
        ("Objects", "hashCode", 1) => Value::Int(it.hash_code(&a0)?),
        ("Objects", "isNull", 1) => Value::Bool(a0.is_null()),
        ("Objects", "nonNull", 1) => Value::Bool(!a0.is_null()),
        ("Objects", "requireNonNull", 1 | 2) => {
            if a0.is_null() {
                let msg = if let Value::Str(m) = &a1 { m.to_string() } else { String::new() };
                return Err(it.throw("NullPointerException", msg));
            }
            a0
        }
        ("Objects", "requireNonNullElse", 2) => if a0.is_null() { a1 } else { a0 },
        ("Arrays", "asList", _) | ("List", "of", _) => match (args.len(), &a0) {
            (1, Value::Array(a)) => Value::list(a.borrow().clone()),
            _ => Value::list(args),
        },
        ("List", "copyOf", 1) => Value::list(it.iterate(&a0)?),
        ("Set", "of" | "copyOf", _) => {
            let s = Value::set(false);
            let items = if name == "copyOf" { it.iterate(&a0)? } else { args };
            for v in items {
                set_add(it, &s, v)?;
            }
            s
        }
        ("Map", "of", _) => {
            let m = Value::map(false);
            for pair in args.chunks(2) {
                if let [k, v] = pair {
                    map_put(it, &m, k.clone(), v.clone())?;
                }
            }
            m
        }
        ("Map", "entry", 2) => Value::Entry(Rc::new((a0, a1))),
        ("Collections", "emptyList", 0) => Value::list(Vec::new()),
        ("Collections", "emptySet", 0) => Value::set(false),
        ("Collections", "emptyMap", 0) => Value::map(false),
        ("Collections", "singletonList", 1) => Value::list(args),
        ("Collections", "unmodifiableList" | "unmodifiableSet" | "unmodifiableMap" | "unmodifiableCollection", 1) => a0,
        ("Collections", "sort", 1 | 2) => {
            if let Value::List(l) = &a0 {
                let mut items = l.borrow().clone();
                it.sort(&mut items, args.get(1))?;
                *l.borrow_mut() = items;
            }
            Value::Null
        }
        ("Collections", "reverse", 1) => {
            if let Value::List(l) = &a0 {
                l.borrow_mut().reverse();
            }
            Value::Null
        }
        ("Collections", "max" | "min", 1 | 2) => {
            let items = it.iterate(&a0)?;
            let mut best: Option<Value> = None;
            for v in items {
                best = Some(match best {
                    None => v,
                    Some(b) => {
                        let o = it.compare(&v, &b, args.get(1))?;
                        if (name == "max" && o.is_gt()) || (name == "min" && o.is_lt()) {
                            v
                        } else {
                            b
                        }
                    }
                });
            }
            best.ok_or_else(|| it.throw("NoSuchElementException", "empty collection"))?
        }
        ("Arrays", "toString", 1) => match &a0 {
            Value::Array(a) => {
                let items = a.borrow().clone();
                Value::str(it.display(&Value::list(items))?)
            }
            _ => Value::str("null"),
        },
        ("Arrays", "sort", 1 | 2) => {
            if let Value::Array(a) = &a0 {
                let mut items = a.borrow().clone();
                it.sort(&mut items, args.get(1))?;
                *a.borrow_mut() = items;
            }
            Value::Null
        }
        ("Arrays", "fill", 2) => {
            if let Value::Array(a) = &a0 {
                for x in a.borrow_mut().iter_mut() {
                    *x = match x {
                        Value::Int(_) => a1.clone().coerce(crate::value::Prim::Int),
                        Value::Long(_) => a1.clone().coerce(crate::value::Prim::Long),
                        Value::Double(_) => a1.clone().coerce(crate::value::Prim::Double),
                        _ => a1.clone(),
                    };
                }
            }
            Value::Null
        }
        ("Arrays", "copyOf", 2) => {
            let Value::Array(a) = &a0 else { return Err(it.throw("NullPointerException", "copyOf null")) };
            let n = int_arg(it, &a1)? as usize;
            let src = a.borrow();
            let filler = match src.first() {
                Some(Value::Int(_)) => Value::Int(0),
                Some(Value::Long(_)) => Value::Long(0),
                Some(Value::Double(_)) => Value::Double(0.0),
                Some(Value::Bool(_)) => Value::Bool(false),
                Some(Value::Char(_)) => Value::Char('\0'),
                _ => Value::Null,
            };
            Value::array((0..n).map(|i| src.get(i).cloned().unwrap_or_else(|| filler.clone())).collect())
        }
        ("Arrays", "copyOfRange", 3) => {
            let Value::Array(a) = &a0 else { return Err(it.throw("NullPointerException", "copyOfRange null")) };
            let (from, to) = (int_arg(it, &a1)? as usize, int_arg(it, &args[2])? as usize);
            let src = a.borrow();
            Value::array(src.get(from..to.min(src.len())).map(<[Value]>::to_vec).unwrap_or_default())
        }
        ("Arrays", "equals", 2) => Value::Bool(match (&a0, &a1) {
            (Value::Array(x), Value::Array(y)) => Value::list(x.borrow().clone()).builtin_equals(&Value::list(y.borrow().clone())),
            (a, b) => a.is_null() && b.is_null(),
        }),
        ("Optional", "ofNullable" | "of", 1) => {
            // Optionals are modelled as zero- or one-element lists.
            Value::list(if a0.is_null() { vec![] } else { vec![a0] })
        }
        ("Optional", "empty", 0) => Value::list(vec![]),
        _ => return Ok(None),
    }))
}

fn char_of(v: &Value) -> char {
    match v {
        Value::Char(c) => *c,
        other => other.as_i64().and_then(|i| char::from_u32(i as u32)).unwrap_or('\0'),
    }
}

pub fn instance_call(it: &mut Interp, recv: Value, name: &str, args: Vec<Value>) -> R<Option<Value>> {
    let a0 = args.first().cloned().unwrap_or(Value::Null);
    let a1 = args.get(1).cloned().unwrap_or(Value::Null);
    let n = args.len();
    // Members every value has.
    match (name, n) {
        ("equals", 1) => return Ok(Some(Value::Bool(it.equals(&recv, &a0)?))),
        ("hashCode", 0) => return Ok(Some(Value::Int(it.hash_code(&recv)?))),
        ("toString", 0) => return Ok(Some(Value::str(it.display(&recv)?))),
        ("getClass", 0) => return Ok(Some(Value::Class(recv.class_name().into()))),
        ("compareTo", 1) => return Ok(Some(Value::Int(it.compare(&recv, &a0, None)? as i32))),
        _ => {}
    }
    Ok(Some(match &recv {
        Value::Str(s) => return string_method(it, s, name, &args),
        Value::Int(_) | Value::Long(_) | Value::Double(_) | Value::Char(_) | Value::Bool(_) => match name {
            "intValue" | "shortValue" | "byteValue" => recv.coerce(crate::value::Prim::Int),
            "longValue" => recv.coerce(crate::value::Prim::Long),
            "doubleValue" | "floatValue" => recv.coerce(crate::value::Prim::Double),
            "charValue" | "booleanValue" => recv,
            "isNaN" => Value::Bool(recv.as_f64().is_some_and(f64::is_nan)),
            _ => return Ok(None),
        },
        Value::Builder(b) => match (name, n) {
            ("append", 1) => {
                let s = match &a0 {
                    Value::Array(a) => a.borrow().iter().filter_map(|c| if let Value::Char(c) = c { Some(*c) } else { None }).collect(),
                    v => it.display(v)?,
                };
                b.borrow_mut().push_str(&s);
                recv.clone()
            }
            ("length", 0) => Value::Int(b.borrow().chars().count() as i32),
            ("isEmpty", 0) => Value::Bool(b.borrow().is_empty()),
            ("reverse", 0) => {
                let r: String = b.borrow().chars().rev().collect();
                *b.borrow_mut() = r;
                recv.clone()
            }
            ("insert", 2) => {
                let at = int_arg(it, &a0)? as usize;
                let s = it.display(&a1)?;
                let mut cs = chars(&b.borrow());
                if at > cs.len() {
                    return Err(index_error(it, "StringIndexOutOfBoundsException", at as i64, cs.len()));
                }
                cs.splice(at..at, s.chars());
                *b.borrow_mut() = cs.into_iter().collect();
                recv.clone()
            }
            ("setLength", 1) => {
                let len = int_arg(it, &a0)? as usize;
                let mut cs = chars(&b.borrow());
                cs.resize(len, '\0');
                *b.borrow_mut() = cs.into_iter().collect();
                Value::Null
            }
            ("deleteCharAt", 1) => {
                let at = int_arg(it, &a0)?;
                let mut cs = chars(&b.borrow());
                if at < 0 || at as usize >= cs.len() {
                    return Err(index_error(it, "StringIndexOutOfBoundsException", at, cs.len()));
                }
                cs.remove(at as usize);
                *b.borrow_mut() = cs.into_iter().collect();
                recv.clone()
            }
            _ => {
                let s: Rc<str> = b.borrow().as_str().into();
                return string_method(it, &s, name, &args);
            }
        },
        Value::Array(a) => match (name, n) {
            ("clone", 0) => Value::array(a.borrow().clone()),
            _ => return Ok(None),
        },
        Value::List(l) => return list_method(it, &recv, l, name, args),
        Value::Set(s) => match (name, n) {
            ("add", 1) => Value::Bool(set_add(it, &recv, a0)?),
            ("addAll", 1) => {
                let mut changed = false;
                for v in it.iterate(&a0)? {
                    changed |= set_add(it, &recv, v)?;
                }
                Value::Bool(changed)
            }
            ("contains", 1) => {
                let items = s.borrow().items.clone();
                Value::Bool(position(it, &items, &a0)?.is_some())
            }
            ("remove", 1) => {
                let items = s.borrow().items.clone();
                match position(it, &items, &a0)? {
                    Some(i) => {
                        s.borrow_mut().items.remove(i);
                        Value::Bool(true)
                    }
                    None => Value::Bool(false),
                }
            }
            ("size", 0) => Value::Int(s.borrow().items.len() as i32),
            ("isEmpty", 0) => Value::Bool(s.borrow().items.is_empty()),
            ("clear", 0) => {
                s.borrow_mut().items.clear();
                Value::Null
            }
            ("forEach", 1) => {
                for v in s.borrow().items.clone() {
                    it.call_function(&a0, vec![v])?;
                }
                Value::Null
            }
            ("containsAll", 1) => {
                let items = s.borrow().items.clone();
                let mut all = true;
                for v in it.iterate(&a0)? {
                    all = all && position(it, &items, &v)?.is_some();
                }
                Value::Bool(all)
            }
            ("first" | "last", 0) => {
                let items = &s.borrow().items;
                let v = if name == "first" { items.first() } else { items.last() };
                v.cloned().ok_or_else(|| it.throw("NoSuchElementException", "empty set"))?
            }
            _ => return Ok(None),
        },
        Value::Map(m) => match (name, n) {
            ("put", 2) => map_put(it, &recv, a0, a1)?,
            ("get", 1) => match map_find(it, &recv, &a0)? {
                Some(i) => m.borrow().entries[i].1.clone(),
                None => Value::Null,
            },
            ("getOrDefault", 2) => match map_find(it, &recv, &a0)? {
                Some(i) => m.borrow().entries[i].1.clone(),
                None => a1,
            },
            ("containsKey", 1) => Value::Bool(map_find(it, &recv, &a0)?.is_some()),
            ("containsValue", 1) => {
                let vals: Vec<Value> = m.borrow().entries.iter().map(|(_, v)| v.clone()).collect();
                Value::Bool(position(it, &vals, &a0)?.is_some())
            }
            ("remove", 1) => match map_find(it, &recv, &a0)? {
                Some(i) => m.borrow_mut().entries.remove(i).1,
                None => Value::Null,
            },
            ("size", 0) => Value::Int(m.borrow().entries.len() as i32),
            ("isEmpty", 0) => Value::Bool(m.borrow().entries.is_empty()),
            ("clear", 0) => {
                m.borrow_mut().entries.clear();
                Value::Null
            }
            ("keySet", 0) => {
                let sorted = m.borrow().sorted;
                let keys: Vec<Value> = m.borrow().entries.iter().map(|(k, _)| k.clone()).collect();
                Value::Set(Rc::new(RefCell::new(crate::value::SetData { items: keys, sorted })))
            }
            ("values", 0) => Value::list(m.borrow().entries.iter().map(|(_, v)| v.clone()).collect()),
            ("entrySet", 0) => {
                let items = m.borrow().entries.iter().map(|(k, v)| Value::Entry(Rc::new((k.clone(), v.clone())))).collect();
                Value::Set(Rc::new(RefCell::new(crate::value::SetData { items, sorted: false })))
            }
            ("putIfAbsent", 2) => match map_find(it, &recv, &a0)? {
                Some(i) if !m.borrow().entries[i].1.is_null() => m.borrow().entries[i].1.clone(),
                _ => {
                    map_put(it, &recv, a0, a1)?;
                    Value::Null
                }
            },
            ("computeIfAbsent", 2) => match map_find(it, &recv, &a0)? {
                Some(i) if !m.borrow().entries[i].1.is_null() => m.borrow().entries[i].1.clone(),
                _ => {
                    let v = it.call_function(&a1, vec![a0.clone()])?;
                    if !v.is_null() {
                        map_put(it, &recv, a0, v.clone())?;
                    }
                    v
                }
            },
            ("merge", 3) => {
                let v = match map_find(it, &recv, &a0)? {
                    Some(i) => {
                        let old = m.borrow().entries[i].1.clone();
                        it.call_function(&args[2], vec![old, a1])?
                    }
                    None => a1,
                };
                map_put(it, &recv, a0, v.clone())?;
                v
            }
            ("putAll", 1) => {
                if let Value::Map(src) = &a0 {
                    for (k, v) in src.borrow().entries.clone() {
                        map_put(it, &recv, k, v)?;
                    }
                }
                Value::Null
            }
            ("forEach", 1) => {
                for (k, v) in m.borrow().entries.clone() {
                    it.call_function(&a0, vec![k, v])?;
                }
                Value::Null
            }
            _ => return Ok(None),
        },
        Value::Entry(e) => match name {
            "getKey" => e.0.clone(),
            "getValue" => e.1.clone(),
            _ => return Ok(None),
        },
        _ => return Ok(None),
    }))
}

fn list_method(it: &mut Interp, recv: &Value, l: &Rc<RefCell<Vec<Value>>>, name: &str, args: Vec<Value>) -> R<Option<Value>> {
    let a0 = args.first().cloned().unwrap_or(Value::Null);
    let len = l.borrow().len();
    let check = |it: &Interp, i: i64, bound: usize| -> R<usize> {
        if i < 0 || i as usize >= bound {
            Err(index_error(it, "IndexOutOfBoundsException", i, len))
        } else {
            Ok(i as usize)
        }
    };
    Ok(Some(match (name, args.len()) {
        ("add" | "addLast" | "offer" | "offerLast", 1) => {
            l.borrow_mut().push(a0);
            Value::Bool(true)
        }
        ("push" | "addFirst" | "offerFirst", 1) => {
            l.borrow_mut().insert(0, a0);
            Value::Null
        }
        ("add", 2) => {
            let i = int_arg(it, &a0)?;
            let i = check(it, i, len + 1)?;
            l.borrow_mut().insert(i, args[1].clone());
            Value::Null
        }
        ("get", 1) => {
            let i = check(it, int_arg(it, &a0)?, len)?;
            l.borrow()[i].clone()
        }
        ("set", 2) => {
            let i = check(it, int_arg(it, &a0)?, len)?;
            std::mem::replace(&mut l.borrow_mut()[i], args[1].clone())
        }
        ("size", 0) => Value::Int(len as i32),
        ("isEmpty", 0) => Value::Bool(len == 0),
        ("clear", 0) => {
            l.borrow_mut().clear();
            Value::Null
        }
        ("contains", 1) => {
            let items = l.borrow().clone();
            Value::Bool(position(it, &items, &a0)?.is_some())
        }
        ("indexOf", 1) => {
            let items = l.borrow().clone();
            Value::Int(position(it, &items, &a0)?.map_or(-1, |i| i as i32))
        }
        ("remove", 1) => match a0 {
            Value::Int(i) => {
                let i = check(it, i as i64, len)?;
                l.borrow_mut().remove(i)
            }
            other => {
                let items = l.borrow().clone();
                match position(it, &items, &other)? {
                    Some(i) => {
                        l.borrow_mut().remove(i);
                        Value::Bool(true)
                    }
                    None => Value::Bool(false),
                }
            }
        },
        ("pop" | "removeFirst" | "poll" | "pollFirst" | "remove", 0) => {
            if len == 0 {
                if name.starts_with("poll") {
                    return Ok(Some(Value::Null));
                }
                return Err(it.throw("NoSuchElementException", "empty"));
            }
            l.borrow_mut().remove(0)
        }
        ("removeLast" | "pollLast", 0) => {
            if len == 0 {
                if name == "pollLast" {
                    return Ok(Some(Value::Null));
                }
                return Err(it.throw("NoSuchElementException", "empty"));
            }
            l.borrow_mut().pop().unwrap_or(Value::Null)
        }
        ("peek" | "peekFirst" | "getFirst" | "element", 0) => match l.borrow().first() {
            Some(v) => v.clone(),
            None if name.starts_with("peek") => Value::Null,
            None => return Err(it.throw("NoSuchElementException", "empty")),
        },
        ("peekLast" | "getLast", 0) => match l.borrow().last() {
            Some(v) => v.clone(),
            None if name == "peekLast" => Value::Null,
            None => return Err(it.throw("NoSuchElementException", "empty")),
        },
        ("addAll", 1) => {
            let items = it.iterate(&a0)?;
            let changed = !items.is_empty();
            l.borrow_mut().extend(items);
            Value::Bool(changed)
        }
        ("containsAll", 1) => {
            let items = l.borrow().clone();
            let mut all = true;
            for v in it.iterate(&a0)? {
                all = all && position(it, &items, &v)?.is_some();
            }
            Value::Bool(all)
        }
        ("forEach", 1) => {
            for v in l.borrow().clone() {
                it.call_function(&a0, vec![v])?;
            }
            Value::Null
        }
        ("removeIf", 1) => {
            let items = l.borrow().clone();
            let mut kept = Vec::new();
            for v in items {
                if !truthy(&it.call_function(&a0, vec![v.clone()])?)? {
                    kept.push(v);
                }
            }
            let changed = kept.len() != len;
            *l.borrow_mut() = kept;
            Value::Bool(changed)
        }
        ("sort", 1) => {
            let mut items = l.borrow().clone();
            it.sort(&mut items, Some(&a0))?;
            *l.borrow_mut() = items;
            Value::Null
        }
        ("subList", 2) => {
            let (from, to) = (int_arg(it, &a0)?, int_arg(it, &args[1])?);
            if from < 0 || to as usize > len || from > to {
                return Err(index_error(it, "IndexOutOfBoundsException", to, len));
            }
            Value::list(l.borrow()[from as usize..to as usize].to_vec())
        }
        ("toArray", _) => Value::array(l.borrow().clone()),
        // Optional, modelled as a list of at most one element.
        ("isPresent", 0) => Value::Bool(len > 0),
        ("orElse", 1) => l.borrow().first().cloned().unwrap_or(a0),
        ("reversed", 0) => Value::list(l.borrow().iter().rev().cloned().collect()),
        _ => {
            let _ = recv;
            return Ok(None);
        }
    }))
}

fn string_method(it: &mut Interp, s: &Rc<str>, name: &str, args: &[Value]) -> R<Option<Value>> {
    let a0 = args.first().cloned().unwrap_or(Value::Null);
    let cs = || chars(s);
    let sub = |it: &Interp, from: i64, to: i64| -> R<Value> {
        let c = chars(s);
        if from < 0 || to as usize > c.len() || from > to {
            return Err(it.throw(
                "StringIndexOutOfBoundsException",
                format!("begin {from}, end {to}, length {}", c.len()),
            ));
        }
        Ok(Value::str(c[from as usize..to as usize].iter().collect::<String>()))
    };
    let find = |hay: &[char], needle: &[char], from: usize| -> Option<usize> {
        if needle.is_empty() {
            return Some(from.min(hay.len()));
        }
        (from..hay.len().saturating_sub(needle.len()) + 1).find(|&i| hay[i..].starts_with(needle))
    };
    let needle = |v: &Value| -> R<Vec<char>> {
        Ok(match v {
            Value::Char(c) => vec![*c],
            Value::Int(i) => vec![char::from_u32(*i as u32).unwrap_or('\0')],
            other => chars(&str_arg(other)?),
        })
    };
    Ok(Some(match (name, args.len()) {
        ("length", 0) => Value::Int(s.chars().count() as i32),
        ("isEmpty", 0) => Value::Bool(s.is_empty()),
        ("isBlank", 0) => Value::Bool(s.trim().is_empty()),
        ("charAt", 1) => {
            let i = int_arg(it, &a0)?;
            let c = cs();
            if i < 0 || i as usize >= c.len() {
                return Err(index_error(it, "StringIndexOutOfBoundsException", i, c.len()));
            }
            Value::Char(c[i as usize])
        }
        ("substring", 1) => sub(it, int_arg(it, &a0)?, cs().len() as i64)?,
        ("substring", 2) => sub(it, int_arg(it, &a0)?, int_arg(it, &args[1])?)?,
        ("indexOf", 1 | 2) => {
            let from = if args.len() == 2 { int_arg(it, &args[1])?.max(0) as usize } else { 0 };
            Value::Int(find(&cs(), &needle(&a0)?, from).map_or(-1, |i| i as i32))
        }
        ("lastIndexOf", 1) => {
            let (h, n) = (cs(), needle(&a0)?);
            Value::Int((0..=h.len().saturating_sub(n.len())).rev().find(|&i| h[i..].starts_with(&n)).map_or(-1, |i| i as i32))
        }
        ("contains", 1) => Value::Bool(s.contains(&*str_arg(&a0)?)),
        ("startsWith", 1) => Value::Bool(s.starts_with(&*str_arg(&a0)?)),
        ("endsWith", 1) => Value::Bool(s.ends_with(&*str_arg(&a0)?)),
        ("equalsIgnoreCase", 1) => Value::Bool(matches!(&a0, Value::Str(o) if o.to_lowercase() == s.to_lowercase())),
        ("compareToIgnoreCase", 1) => Value::Int(s.to_lowercase().cmp(&str_arg(&a0)?.to_lowercase()) as i32),
        ("toUpperCase", 0) => Value::str(s.to_uppercase()),
        ("toLowerCase", 0) => Value::str(s.to_lowercase()),
        ("trim", 0) => Value::str(s.trim_matches(|c: char| c <= ' ')),
        ("strip", 0) => Value::str(s.trim()),
        ("stripLeading", 0) => Value::str(s.trim_start()),
        ("stripTrailing", 0) => Value::str(s.trim_end()),
        ("concat", 1) => Value::str(format!("{s}{}", str_arg(&a0)?)),
        ("repeat", 1) => {
            let n = int_arg(it, &a0)?;
            if n < 0 {
                return Err(it.throw("IllegalArgumentException", format!("count is negative: {n}")));
            }
            Value::str(s.repeat(n as usize))
        }
        ("replace", 2) => {
            let from: String = needle(&a0)?.into_iter().collect();
            let to: String = needle(&args[1])?.into_iter().collect();
            Value::str(s.replace(&from, &to))
        }
        ("replaceAll" | "replaceFirst", 2) => {
            let re = regex::Regex::new(&str_arg(&a0)?).map_err(|e| it.throw("PatternSyntaxException", e.to_string()))?;
            let rep = str_arg(&args[1])?.replace("$", "$$");
            Value::str(if name == "replaceAll" { re.replace_all(s, rep.as_str()) } else { re.replace(s, rep.as_str()) }.into_owned())
        }
        ("matches", 1) => {
            let re = regex::Regex::new(&format!("^(?:{})$", str_arg(&a0)?)).map_err(|e| it.throw("PatternSyntaxException", e.to_string()))?;
            Value::Bool(re.is_match(s))
        }
        ("split", 1) => {
            let re = regex::Regex::new(&str_arg(&a0)?).map_err(|e| it.throw("PatternSyntaxException", e.to_string()))?;
            let mut parts: Vec<&str> = re.split(s).collect();
            if parts.first() == Some(&"") && s.is_empty() {
                return Ok(Some(Value::array(vec![Value::str("")])));
            }
            // A leading empty piece from a zero-width match is dropped, as are trailing empties.
            if parts.len() > 1 && parts[0].is_empty() && re.find(s).is_some_and(|m| m.start() == 0 && m.end() == 0) {
                parts.remove(0);
            }
            while parts.len() > 1 && parts.last() == Some(&"") {
                parts.pop();
            }
            if parts == [""] && !s.is_empty() {
                parts.clear();
            }
            Value::array(parts.into_iter().map(Value::str).collect())
        }
        ("toCharArray", 0) => Value::array(s.chars().map(Value::Char).collect()),
        ("chars", 0) => Value::list(s.chars().map(|c| Value::Int(c as i32)).collect()),
        ("intern", 0) => Value::Str(s.clone()),
        _ => return Ok(None),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::Program;
    use crate::value::format_double;

    #[test]
    fn format_subset() {
        let p = Program::default();
        let mut it = Interp::new(&p);
        let s = format_java(&mut it, "%s=%5d|%-4s|%.2f|%05d|%x%n%%", &[
            Value::str("a"),
            Value::Int(42),
            Value::str("b"),
            Value::Double(2.0 / 3.0),
            Value::Int(-7),
            Value::Int(255),
        ])
        .unwrap();
        assert_eq!(s, "a=   42|b   |0.67|-0007|ff\n%");
        assert_eq!(format_double(0.5), "0.5");
    }

    #[test]
    fn string_split_semantics() {
        let p = Program::default();
        let mut it = Interp::new(&p);
        let parts = |s: &str, re: &str, it: &mut Interp| match string_method(it, &Rc::from(s), "split", &[Value::str(re)]).unwrap() {
            Some(Value::Array(a)) => a.borrow().iter().map(|v| it.display(v).unwrap()).collect::<Vec<_>>(),
            _ => panic!(),
        };
        assert_eq!(parts("a,b,,", ",", &mut it), ["a", "b"]);
        assert_eq!(parts(",a", ",", &mut it), ["", "a"]);
        assert_eq!(parts("a b  c", "\\s+", &mut it), ["a", "b", "c"]);
    }
}
