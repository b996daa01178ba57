//! Text matrix format.
//!
//! ```text
//! # comments and blank lines are ignored
//! 2
//! 2 (1,0.5)
//! (1,-0.5) 2
//! ```
//!
//! The first line holds the dimension `m`, followed by `m` rows of `m`
//! whitespace-separated entries. An entry is a real `R` or a complex `(R,I)`.

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{validate_hermitian, HermitianMatrix};

/// Symmetry tolerance applied to parsed files.
pub const FILE_HERMITIAN_TOL: f64 = 1e-8;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn is_decimal_literal(s: &str) -> bool {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => (&body[..pos], Some(&body[pos + 1..])),
        None => (body, None),
    };
    let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).count();
    let dots = mantissa.chars().filter(|&c| c == '.').count();
    let mantissa_ok = digits > 0
        && dots <= 1
        && mantissa.chars().all(|c| c.is_ascii_digit() || c == '.');
    let exponent_ok = exponent.is_none_or(|e| {
        let e = e.strip_prefix(['+', '-']).unwrap_or(e);
        !e.is_empty() && e.chars().all(|c| c.is_ascii_digit())
    });
    mantissa_ok && exponent_ok
}

fn parse_real(tok: &str, line: usize) -> Result<f64> {
    let tok = tok.trim();
    if !is_decimal_literal(tok) {
        return Err(parse_err(line, format!("not a decimal literal: '{tok}'")));
    }
    tok.parse::<f64>()
        .map_err(|_| parse_err(line, format!("not a number: '{tok}'")))
}

/// Splits a row into entry tokens; a parenthesized pair is one token even if
/// it contains spaces.
fn tokenize(row: &str, line: usize) -> Result<Vec<String>> {
    let mut tokens = Vec::new();
    let mut chars = row.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '(' {
            let mut tok = String::new();
            for c in chars.by_ref() {
                tok.push(c);
                if c == ')' {
                    break;
                }
            }
            if !tok.ends_with(')') {
                return Err(parse_err(line, "unterminated '('"));
            }
            tokens.push(tok);
        } else {
            let mut tok = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_whitespace() {
                    break;
                }
                tok.push(c);
                chars.next();
            }
            tokens.push(tok);
        }
    }
    Ok(tokens)
}

fn parse_entry(tok: &str, line: usize) -> Result<Complex64> {
    if let Some(inner) = tok.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
        let (re, im) = inner
            .split_once(',')
            .ok_or_else(|| parse_err(line, format!("expected (R,I), got '{tok}'")))?;
        Ok(Complex64::new(parse_real(re, line)?, parse_real(im, line)?))
    } else {
        Ok(Complex64::new(parse_real(tok, line)?, 0.0))
    }
}

/// Parses and validates a matrix file's contents.
pub fn parse_matrix(text: &str) -> Result<HermitianMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing dimension header"))?;
    let m: usize = header
        .parse()
        .map_err(|_| parse_err(header_line, format!("bad dimension header '{header}'")))?;
    if m == 0 {
        return Err(parse_err(header_line, "dimension must be at least 1"));
    }

    let mut rows = Vec::with_capacity(m);
    for (line, row) in lines {
        if rows.len() == m {
            return Err(parse_err(line, format!("more than {m} rows")));
        }
        let entries = tokenize(row, line)?
            .iter()
            .map(|t| parse_entry(t, line))
            .collect::<Result<Vec<_>>>()?;
        if entries.len() != m {
            return Err(parse_err(
                line,
                format!("row has {} entries, expected {m}", entries.len()),
            ));
        }
        rows.push(entries);
    }
    if rows.len() != m {
        return Err(parse_err(
            text.lines().count().max(1),
            format!("expected {m} rows, found {}", rows.len()),
        ));
    }
    validate_hermitian(&rows, FILE_HERMITIAN_TOL)
}

pub fn read_matrix(path: &Path) -> Result<HermitianMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_matrix(&text)
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_real(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn format_entry(z: Complex64) -> String {
    if z.im == 0.0 {
        format_real(z.re)
    } else {
        format!("({},{})", format_real(z.re), format_real(z.im))
    }
}

pub fn format_matrix(a: &HermitianMatrix) -> String {
    let m = a.dim();
    let mut out = format!("{m}\n");
    for i in 0..m {
        let row: Vec<String> = (0..m).map(|j| format_entry(a.get(i, j))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
