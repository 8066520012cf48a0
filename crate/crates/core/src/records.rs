//! Minimal structured-text records: `{key: value, ...}` where a value is a
//! bare atom, a `[...]` list or a nested record. Field order is preserved,
//! so printing is deterministic.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::exponents::{ExponentVector, VariableSignature};
use crate::rational::{self, Rational};
use crate::series::GenSeries;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Atom(String),
    List(Vec<Value>),
    Record(Vec<(String, Value)>),
}

impl Value {
    pub fn atom(s: impl Into<String>) -> Self {
        Value::Atom(s.into())
    }

    pub fn rational(r: &Rational) -> Self {
        Value::Atom(rational::format(r))
    }

    pub fn usize(k: usize) -> Self {
        Value::Atom(k.to_string())
    }

    pub fn record(fields: Vec<(&str, Value)>) -> Self {
        Value::Record(fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        match self {
            Value::Record(fields) => fields.iter().find(|(k, _)| k == key).map(|(_, v)| v),
            _ => None,
        }
    }

    pub fn field(&self, key: &str) -> Result<&Value> {
        self.get(key).ok_or_else(|| bad(format!("missing field `{key}`")))
    }

    pub fn as_atom(&self) -> Result<&str> {
        match self {
            Value::Atom(s) => Ok(s),
            _ => Err(bad("expected an atom".into())),
        }
    }

    pub fn as_list(&self) -> Result<&[Value]> {
        match self {
            Value::List(v) => Ok(v),
            _ => Err(bad("expected a list".into())),
        }
    }

    pub fn as_rational(&self) -> Result<Rational> {
        let s = self.as_atom()?;
        rational::parse_canonical(s).ok_or_else(|| bad(format!("malformed rational `{s}`")))
    }

    pub fn as_usize(&self) -> Result<usize> {
        let s = self.as_atom()?;
        s.parse().map_err(|_| bad(format!("expected a natural number, got `{s}`")))
    }

    pub fn as_bool(&self) -> Result<bool> {
        match self.as_atom()? {
            "true" => Ok(true),
            "false" => Ok(false),
            s => Err(bad(format!("expected true/false, got `{s}`"))),
        }
    }

    /// Pretty form: lists of records go one element per line, all else
    /// stays inline.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        write_value(&mut out, self, 0);
        out.push('\n');
        out
    }
}

fn bad(msg: String) -> Error {
    Error::Parse { line: 0, msg }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Atom(s) => out.push_str(s),
        Value::List(items) => {
            let multiline = items.iter().any(|x| matches!(x, Value::Record(_)));
            if multiline {
                out.push_str("[\n");
                for (k, x) in items.iter().enumerate() {
                    out.push_str(&" ".repeat(indent + 2));
                    write_value(out, x, indent + 2);
                    if k + 1 < items.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                out.push_str(&" ".repeat(indent));
                out.push(']');
            } else {
                out.push('[');
                for (k, x) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, x, indent);
                }
                out.push(']');
            }
        }
        Value::Record(fields) => {
            out.push('{');
            for (k, (key, x)) in fields.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{key}: ");
                write_value(out, x, indent);
            }
            out.push('}');
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open(char),
    Close(char),
    Colon,
    Comma,
    Word(String),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut toks = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let mut word = String::new();
        let flush = |word: &mut String, toks: &mut Vec<(usize, Tok)>| {
            if !word.is_empty() {
                toks.push((ln + 1, Tok::Word(std::mem::take(word))));
            }
        };
        for ch in line.chars() {
            let t = match ch {
                '{' | '[' => Some(Tok::Open(ch)),
                '}' | ']' => Some(Tok::Close(ch)),
                ':' => Some(Tok::Colon),
                ',' => Some(Tok::Comma),
                c if c.is_whitespace() => None,
                c => {
                    word.push(c);
                    continue;
                }
            };
            flush(&mut word, &mut toks);
            if let Some(t) = t {
                toks.push((ln + 1, t));
            }
        }
        flush(&mut word, &mut toks);
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|t| t.0)
            .unwrap_or(1)
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse {
            line: self.line(),
            msg: msg.to_string(),
        })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.1.clone());
        self.pos += 1;
        t
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn value(&mut self) -> Result<Value> {
        match self.next() {
            Some(Tok::Word(w)) => Ok(Value::Atom(w)),
            Some(Tok::Open('[')) => {
                let mut items = Vec::new();
                if self.peek() == Some(&Tok::Close(']')) {
                    self.pos += 1;
                    return Ok(Value::List(items));
                }
                loop {
                    items.push(self.value()?);
                    match self.next() {
                        Some(Tok::Comma) => continue,
                        Some(Tok::Close(']')) => return Ok(Value::List(items)),
                        _ => {
                            self.pos -= 1;
                            return self.err("expected `,` or `]`");
                        }
                    }
                }
            }
            Some(Tok::Open('{')) => {
                let mut fields: Vec<(String, Value)> = Vec::new();
                if self.peek() == Some(&Tok::Close('}')) {
                    self.pos += 1;
                    return Ok(Value::Record(fields));
                }
                loop {
                    let key = match self.next() {
                        Some(Tok::Word(w)) => w,
                        _ => {
                            self.pos -= 1;
                            return self.err("expected a field name");
                        }
                    };
                    if self.next() != Some(Tok::Colon) {
                        self.pos -= 1;
                        return self.err("expected `:`");
                    }
                    if fields.iter().any(|(k, _)| *k == key) {
                        return self.err(&format!("duplicate field `{key}`"));
                    }
                    let v = self.value()?;
                    fields.push((key, v));
                    match self.next() {
                        Some(Tok::Comma) => continue,
                        Some(Tok::Close('}')) => return Ok(Value::Record(fields)),
                        _ => {
                            self.pos -= 1;
                            return self.err("expected `,` or `}`");
                        }
                    }
                }
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.err("expected a value")
            }
        }
    }
}

pub fn parse(text: &str) -> Result<Value> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let v = p.value()?;
    if p.pos < p.toks.len() {
        return p.err("trailing input");
    }
    Ok(v)
}

pub fn exponent_value(e: &ExponentVector) -> Value {
    Value::List(e.entries().iter().map(Value::rational).collect())
}

pub fn exponent_from(v: &Value) -> Result<ExponentVector> {
    let entries = v.as_list()?.iter().map(Value::as_rational).collect::<Result<Vec<_>>>()?;
    ExponentVector::new(entries).map_err(|e| bad(e.to_string()))
}

pub fn signature_value(sig: &VariableSignature) -> Value {
    Value::record(vec![
        ("m", Value::usize(sig.m())),
        ("n", Value::usize(sig.n())),
        ("radius", Value::List(sig.radius().iter().map(Value::rational).collect())),
    ])
}

pub fn signature_from(v: &Value) -> Result<VariableSignature> {
    let radius = v.field("radius")?.as_list()?.iter().map(Value::as_rational).collect::<Result<Vec<_>>>()?;
    VariableSignature::new(v.field("m")?.as_usize()?, v.field("n")?.as_usize()?, radius)
        .map_err(|e| bad(e.to_string()))
}

pub fn terms_value(f: &GenSeries) -> Value {
    Value::List(
        f.terms()
            .map(|(e, c)| Value::record(vec![("c", Value::rational(c)), ("e", exponent_value(e))]))
            .collect(),
    )
}

/// Terms must be in canonical order without repeats or zero coefficients.
pub fn terms_from(sig: &VariableSignature, v: &Value) -> Result<GenSeries> {
    let mut terms = Vec::new();
    let mut last: Option<ExponentVector> = None;
    for t in v.as_list()? {
        let c = t.field("c")?.as_rational()?;
        let e = exponent_from(t.field("e")?)?;
        if last.as_ref().is_some_and(|l| *l >= e) {
            return Err(bad(format!("term {e} out of canonical order")));
        }
        if num_traits::Zero::is_zero(&c) {
            return Err(bad(format!("zero coefficient at {e}")));
        }
        last = Some(e.clone());
        terms.push((c, e));
    }
    GenSeries::from_terms(sig, terms).map_err(|e| bad(e.to_string()))
}

pub fn series_value(f: &GenSeries) -> Value {
    let sig = f.signature();
    Value::record(vec![
        ("m", Value::usize(sig.m())),
        ("n", Value::usize(sig.n())),
        ("radius", Value::List(sig.radius().iter().map(Value::rational).collect())),
        ("terms", terms_value(f)),
    ])
}

pub fn series_from(v: &Value) -> Result<GenSeries> {
    let sig = signature_from(v)?;
    terms_from(&sig, v.field("terms")?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let sig = VariableSignature::unit(2, 0);
        let f = GenSeries::from_frac_terms(&sig, &[((1, 1), &[(1, 1), (0, 1)]), ((-1, 2), &[(0, 1), (3, 2)])]).unwrap();
        let v = Value::record(vec![("kind", Value::atom("demo")), ("inputs", Value::List(vec![series_value(&f)]))]);
        let text = v.to_text();
        let back = parse(&text).unwrap();
        assert_eq!(back, v);
        assert_eq!(series_from(&back.field("inputs").unwrap().as_list().unwrap()[0]).unwrap(), f);
    }

    #[test]
    fn errors_carry_lines() {
        match parse("{a: 1,\n b 2}") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse("{a: 1, a: 2}").is_err());
        assert!(parse("{a: 1} x").is_err());
    }
}
