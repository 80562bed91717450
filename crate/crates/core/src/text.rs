//! Line-oriented text rendering of JSON values, one `path = scalar` line per
//! leaf, and its inverse.
//!
//! ```text
//! $.command = "classify"
//! $.result.weights[0][1] = "-3"
//! $.result["odd key"] = []
//! ```

use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Seg {
    Key(String),
    Index(usize),
}

fn is_ident(k: &str) -> bool {
    let mut c = k.chars();
    matches!(c.next(), Some(ch) if ch.is_ascii_alphabetic() || ch == '_')
        && c.all(|ch| ch.is_ascii_alphanumeric() || ch == '_')
}

fn push_key(path: &str, k: &str) -> String {
    if is_ident(k) {
        format!("{path}.{k}")
    } else {
        format!("{path}[{}]", Value::String(k.to_string()))
    }
}

fn walk(v: &Value, path: &str, out: &mut String) {
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, x) in m {
                walk(x, &push_key(path, k), out);
            }
        }
        Value::Array(a) if !a.is_empty() => {
            for (i, x) in a.iter().enumerate() {
                walk(x, &format!("{path}[{i}]"), out);
            }
        }
        leaf => {
            out.push_str(path);
            out.push_str(" = ");
            out.push_str(&serde_json::to_string(leaf).expect("serialisable"));
            out.push('\n');
        }
    }
}

pub fn to_text(v: &Value) -> String {
    let mut out = String::new();
    walk(v, "$", &mut out);
    out
}

/// Parses a path prefix; returns the segments and the unparsed rest.
fn parse_path(line: &str) -> Result<(Vec<Seg>, &str)> {
    let bad = |m: &str| Error::Parse(format!("text report: {m} in line {line:?}"));
    let rest = line.strip_prefix('$').ok_or_else(|| bad("path must start with $"))?;
    let bytes = rest.as_bytes();
    let mut i = 0;
    let mut segs = Vec::new();
    while i < bytes.len() {
        match bytes[i] {
            b'.' => {
                let start = i + 1;
                let mut j = start;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                if j == start {
                    return Err(bad("empty key"));
                }
                segs.push(Seg::Key(rest[start..j].to_string()));
                i = j;
            }
            b'[' if bytes.get(i + 1) == Some(&b'"') => {
                // quoted key: scan to the closing quote, honouring escapes
                let mut j = i + 2;
                while j < bytes.len() && bytes[j] != b'"' {
                    j += if bytes[j] == b'\\' { 2 } else { 1 };
                }
                if bytes.get(j + 1) != Some(&b']') {
                    return Err(bad("unterminated quoted key"));
                }
                let k: String = serde_json::from_str(&rest[i + 1..=j]).map_err(|e| bad(&e.to_string()))?;
                segs.push(Seg::Key(k));
                i = j + 2;
            }
            b'[' => {
                let close = rest[i..].find(']').ok_or_else(|| bad("unterminated index"))? + i;
                let n = rest[i + 1..close].parse().map_err(|_| bad("bad index"))?;
                segs.push(Seg::Index(n));
                i = close + 1;
            }
            b' ' => break,
            _ => return Err(bad("unexpected character in path")),
        }
    }
    Ok((segs, &rest[i..]))
}

fn insert(root: &mut Value, segs: &[Seg], leaf: Value) -> Result<()> {
    let Some((first, tail)) = segs.split_first() else {
        *root = leaf;
        return Ok(());
    };
    match first {
        Seg::Key(k) => {
            if root.is_null() {
                *root = Value::Object(Map::new());
            }
            let m = root
                .as_object_mut()
                .ok_or_else(|| Error::Parse(format!("text report: key {k} under a non-object")))?;
            let child = m.entry(k.clone()).or_insert(Value::Null);
            insert(child, tail, leaf)
        }
        Seg::Index(n) => {
            if root.is_null() {
                *root = Value::Array(Vec::new());
            }
            let a = root
                .as_array_mut()
                .ok_or_else(|| Error::Parse(format!("text report: index {n} under a non-array")))?;
            if *n == a.len() {
                a.push(Value::Null);
            } else if *n > a.len() {
                return Err(Error::Parse(format!("text report: index {n} skips entries")));
            }
            insert(&mut a[*n], tail, leaf)
        }
    }
}

pub fn from_text(text: &str) -> Result<Value> {
    let mut root = Value::Null;
    for line in text.lines() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (segs, rest) = parse_path(line)?;
        let val = rest
            .strip_prefix(" = ")
            .ok_or_else(|| Error::Parse(format!("text report: missing ' = ' in line {line:?}")))?;
        let leaf: Value = serde_json::from_str(val).map_err(|e| Error::Parse(format!("text report value: {e}")))?;
        insert(&mut root, &segs, leaf)?;
    }
    Ok(root)
}
