//! Line-oriented grammar files.
//!
//! ```text
//! # comment
//! X1 = 'a'
//! X2 = 'b'
//! X3 = X1 X2
//! ```
//!
//! Ids are 1-based and must appear in order; the last rule is the start
//! symbol. Terminal bytes other than printable ASCII are written `\xHH`; `'`
//! and `\` are escaped with a backslash.

use std::fmt::Write as _;

use super::{Rule, RuleId, Slp};
use crate::error::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_id(tok: &str, line: usize) -> Result<usize> {
    let digits = tok
        .strip_prefix('X')
        .ok_or_else(|| parse_err(line, format!("expected a rule name like X3, found {tok:?}")))?;
    let n: usize = digits
        .parse()
        .map_err(|_| parse_err(line, format!("bad rule number in {tok:?}")))?;
    if n == 0 {
        return Err(parse_err(line, "rule ids start at X1"));
    }
    Ok(n)
}

/// Parses the body of a quoted terminal, `'c'`, with escapes.
fn parse_terminal(rhs: &str, line: usize) -> Result<u8> {
    let bytes = rhs.as_bytes();
    if bytes.len() < 3 || bytes[0] != b'\'' || bytes[bytes.len() - 1] != b'\'' {
        return Err(parse_err(line, format!("malformed terminal {rhs:?}")));
    }
    let body = &bytes[1..bytes.len() - 1];
    match body {
        [c] if *c != b'\\' && *c != b'\'' => Ok(*c),
        [b'\\', b'\''] => Ok(b'\''),
        [b'\\', b'\\'] => Ok(b'\\'),
        [b'\\', b'x', h, l] => {
            let hex = std::str::from_utf8(&[*h, *l])
                .ok()
                .and_then(|s| u8::from_str_radix(s, 16).ok());
            hex.ok_or_else(|| parse_err(line, format!("bad hex escape in {rhs:?}")))
        }
        _ => Err(parse_err(
            line,
            format!("terminal must be one byte, found {rhs:?}"),
        )),
    }
}

pub fn parse_slp(input: &str) -> Result<Slp> {
    let mut rules = Vec::new();
    for (lineno, raw) in input.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (lhs, rhs) = line
            .split_once('=')
            .ok_or_else(|| parse_err(lineno, "expected `Xi = ...`"))?;
        let id = parse_id(lhs.trim(), lineno)?;
        if id != rules.len() + 1 {
            return Err(parse_err(
                lineno,
                format!("expected X{}, found X{id}", rules.len() + 1),
            ));
        }
        let rhs = rhs.trim();
        let rule = if rhs.starts_with('\'') {
            Rule::Terminal(parse_terminal(rhs, lineno)?)
        } else {
            let toks: Vec<&str> = rhs.split_whitespace().collect();
            if toks.len() != 2 {
                return Err(parse_err(
                    lineno,
                    format!("X{id} must have exactly two symbols, found {}", toks.len()),
                ));
            }
            let l = parse_id(toks[0], lineno)?;
            let r = parse_id(toks[1], lineno)?;
            for child in [l, r] {
                if child >= id {
                    return Err(parse_err(
                        lineno,
                        format!("X{id} references X{child}, which is not defined before it"),
                    ));
                }
            }
            Rule::Pair(RuleId::one_based(l), RuleId::one_based(r))
        };
        rules.push(rule);
    }
    Slp::new(rules)
}

fn escape_byte(out: &mut String, c: u8) {
    match c {
        b'\'' => out.push_str("\\'"),
        b'\\' => out.push_str("\\\\"),
        0x20..=0x7e => out.push(c as char),
        _ => {
            let _ = write!(out, "\\x{c:02x}");
        }
    }
}

pub fn write_slp(slp: &Slp) -> String {
    let mut out = String::new();
    for (i, rule) in slp.rules().iter().enumerate() {
        let _ = write!(out, "X{} = ", i + 1);
        match *rule {
            Rule::Terminal(c) => {
                out.push('\'');
                escape_byte(&mut out, c);
                out.push('\'');
            }
            Rule::Pair(l, r) => {
                let _ = write!(out, "{l} {r}");
            }
        }
        out.push('\n');
    }
    out
}
