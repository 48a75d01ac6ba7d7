//! Matrix and vector text files, and number formatting for reports.
//!
//! A matrix file holds four lines of four whitespace-separated numbers.
//! Lines whose first non-blank character is `#` and blank lines are ignored.
//! The alternative form is a single JSON object `{"m": [16 numbers]}` in
//! row-major order. A vector file holds one line of four numbers.

use std::fmt;

use crate::numkernel::{from_row_major, Matrix4, Vector4};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

/// Content lines as `(line number, text)`, both 1-based.
fn content_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim_start();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, l)| (i + 1, l))
        .collect()
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (col, (idx, ch)) in line.char_indices().enumerate() {
        if ch.is_whitespace() {
            if let Some((c, s)) = start.take() {
                out.push((c, &line[s..idx]));
            }
        } else if start.is_none() {
            start = Some((col + 1, idx));
        }
    }
    if let Some((c, s)) = start {
        out.push((c, &line[s..]));
    }
    out
}

fn number(token: &str, line: usize, column: usize) -> Result<f64, ParseError> {
    let x: f64 = token
        .parse()
        .map_err(|_| err(line, column, format!("`{token}` is not a number")))?;
    if !x.is_finite() {
        return Err(err(line, column, format!("`{token}` is not finite")));
    }
    Ok(x)
}

fn row(line_no: usize, line: &str) -> Result<[f64; 4], ParseError> {
    let toks = tokens(line);
    if toks.len() != 4 {
        let column = toks.get(4).map_or(line.len() + 1, |t| t.0);
        return Err(err(
            line_no,
            column,
            format!("expected 4 numbers, found {}", toks.len()),
        ));
    }
    let mut out = [0.0; 4];
    for (k, (col, t)) in toks.into_iter().enumerate() {
        out[k] = number(t, line_no, col)?;
    }
    Ok(out)
}

fn parse_json_matrix(line_no: usize, text: &str) -> Result<Matrix4, ParseError> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| err(line_no + e.line() - 1, e.column(), e.to_string()))?;
    let arr = value
        .get("m")
        .and_then(|m| m.as_array())
        .ok_or_else(|| err(line_no, 1, "expected an object with an array field \"m\""))?;
    if arr.len() != 16 {
        return Err(err(
            line_no,
            1,
            format!("expected 16 numbers in \"m\", found {}", arr.len()),
        ));
    }
    let mut vals = [0.0; 16];
    for (k, v) in arr.iter().enumerate() {
        // Parse the literal text so values round-trip exactly.
        let lit = v.to_string();
        vals[k] = number(&lit, line_no, 1)
            .map_err(|e| err(e.line, e.column, format!("entry {}: {}", k + 1, e.message)))?;
    }
    Ok(from_row_major(&vals))
}

pub fn parse_matrix(text: &str) -> Result<Matrix4, ParseError> {
    let lines = content_lines(text);
    let Some(&(first_no, first)) = lines.first() else {
        return Err(err(1, 1, "no matrix data"));
    };
    if first.trim_start().starts_with('{') {
        let start = text
            .lines()
            .take(first_no - 1)
            .map(|l| l.len() + 1)
            .sum::<usize>();
        return parse_json_matrix(first_no, &text[start..]);
    }
    let mut m = Matrix4::zeros();
    for (i, (no, l)) in lines.iter().enumerate() {
        if i == 4 {
            return Err(err(*no, 1, "expected 4 rows, found more"));
        }
        let r = row(*no, l)?;
        for j in 0..4 {
            m[(i, j)] = r[j];
        }
    }
    if lines.len() < 4 {
        return Err(err(
            text.lines().count() + 1,
            1,
            format!("expected 4 rows, found {}", lines.len()),
        ));
    }
    Ok(m)
}

pub fn parse_vector(text: &str) -> Result<Vector4, ParseError> {
    let lines = content_lines(text);
    match lines.as_slice() {
        [] => Err(err(1, 1, "no vector data")),
        [(no, l)] => {
            let r = row(*no, l)?;
            Ok(Vector4::new(r[0], r[1], r[2], r[3]))
        }
        [_, (no, _), ..] => Err(err(*no, 1, "expected a single line of 4 numbers")),
    }
}

/// Shortest text that parses back to the same `f64`.
pub fn render_number(x: f64) -> String {
    format!("{x:?}")
}

pub fn render_matrix(m: &Matrix4, comment: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(c) = comment {
        for l in c.lines() {
            out.push_str("# ");
            out.push_str(l);
            out.push('\n');
        }
    }
    for i in 0..4 {
        let r: Vec<String> = (0..4).map(|j| render_number(m[(i, j)])).collect();
        out.push_str(&r.join(" "));
        out.push('\n');
    }
    out
}

pub fn render_vector(v: &Vector4) -> String {
    let r: Vec<String> = v.iter().map(|x| render_number(*x)).collect();
    format!("{}\n", r.join(" "))
}

/// `printf("%.17g")`: 17 significant digits, trailing zeros removed,
/// exponent form below `1e-4` and from `1e17`.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (16 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
