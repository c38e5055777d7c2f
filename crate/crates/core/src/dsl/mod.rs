//! Parser and evaluator for the surface-definition language.
//!
//! A surface file is UTF-8 text: lines starting with `#` are comments, an
//! optional header line `periodic: true|false` declares periodicity
//! (default periodic), and the remainder is a comma-separated tuple of
//! n+1 expressions, optionally wrapped in one pair of parentheses.
//!
//! Expression grammar (EBNF):
//!
//! ```text
//! expr    := term   { ("+" | "-") term }
//! term    := unary  { ("*" | "/") unary }
//! unary   := "-" unary | power
//! power   := atom [ "^" integer ]
//! atom    := number | "i" | "pi" | "u1" | "u2"
//!          | func "(" expr ")" | "(" expr ")"
//! func    := "exp" | "sin" | "cos" | "sqrt" | "conj"
//! number  := digits [ "." digits ]
//! ```
//!
//! `^` binds tightest, then unary minus, then `*` `/`, then `+` `-`
//! (so `a+b*c` is `a+(b*c)` and `-a^2` is `-(a^2)`). Function application
//! requires parentheses. Complex constants are spelled with the `i` atom,
//! e.g. `3 + 2*i`. Evaluation is complex throughout; derivatives come from
//! forward-mode dual arithmetic.

mod dual;

pub use dual::{DualScalar, EvalError};

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::error::{Error, Result};
use crate::surface::{validate_immersion_with, Immersion};
use crate::tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Sqrt,
    Conj,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Conj => "conj",
        }
    }
}

/// Abstract syntax of one surface component.
#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceExpr {
    Num(f64),
    ImaginaryUnit,
    Pi,
    U1,
    U2,
    Neg(Box<SurfaceExpr>),
    Add(Box<SurfaceExpr>, Box<SurfaceExpr>),
    Sub(Box<SurfaceExpr>, Box<SurfaceExpr>),
    Mul(Box<SurfaceExpr>, Box<SurfaceExpr>),
    Div(Box<SurfaceExpr>, Box<SurfaceExpr>),
    Pow(Box<SurfaceExpr>, u32),
    Call(Func, Box<SurfaceExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

/// A parsed surface definition: n+1 component expressions plus the
/// periodicity flag from the optional header.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSurface {
    pub components: Vec<SurfaceExpr>,
    pub periodic: bool,
}

// ---------------------------------------------------------------- lexer

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number {v}"),
            Tok::Ident(s) => write!(f, "identifier '{s}'"),
            Tok::Plus => write!(f, "'+'"),
            Tok::Minus => write!(f, "'-'"),
            Tok::Star => write!(f, "'*'"),
            Tok::Slash => write!(f, "'/'"),
            Tok::Caret => write!(f, "'^'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::Comma => write!(f, "','"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str, start_line: usize) -> std::result::Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = start_line;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>, col: &mut usize| {
            chars.next();
            *col += 1;
        };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => bump(&mut chars, &mut col),
            '+' => {
                bump(&mut chars, &mut col);
                out.push(Spanned { tok: Tok::Plus, line: tline, col: tcol });
            }
            '-' => {
                bump(&mut chars, &mut col);
                out.push(Spanned { tok: Tok::Minus, line: tline, col: tcol });
            }
            '*' => {
                bump(&mut chars, &mut col);
                out.push(Spanned { tok: Tok::Star, line: tline, col: tcol });
            }
            '/' => {
                bump(&mut chars, &mut col);
                out.push(Spanned { tok: Tok::Slash, line: tline, col: tcol });
            }
            '^' => {
                bump(&mut chars, &mut col);
                out.push(Spanned { tok: Tok::Caret, line: tline, col: tcol });
            }
            '(' => {
                bump(&mut chars, &mut col);
                out.push(Spanned { tok: Tok::LParen, line: tline, col: tcol });
            }
            ')' => {
                bump(&mut chars, &mut col);
                out.push(Spanned { tok: Tok::RParen, line: tline, col: tcol });
            }
            ',' => {
                bump(&mut chars, &mut col);
                out.push(Spanned { tok: Tok::Comma, line: tline, col: tcol });
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                let mut seen_dot = false;
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() || (d == '.' && !seen_dot) {
                        seen_dot |= d == '.';
                        s.push(d);
                        bump(&mut chars, &mut col);
                    } else {
                        break;
                    }
                }
                let v: f64 = s.parse().map_err(|_| ParseError {
                    line: tline,
                    col: tcol,
                    message: format!("malformed number '{s}'"),
                })?;
                out.push(Spanned { tok: Tok::Num(v), line: tline, col: tcol });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        s.push(d);
                        bump(&mut chars, &mut col);
                    } else {
                        break;
                    }
                }
                out.push(Spanned { tok: Tok::Ident(s), line: tline, col: tcol });
            }
            other => {
                return Err(ParseError {
                    line: tline,
                    col: tcol,
                    message: format!("unexpected character '{other}'"),
                })
            }
        }
    }
    Ok(out)
}

// --------------------------------------------------------------- parser

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end_line: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|s| (s.line, s.col))
            .unwrap_or((self.end_line, self.end_col))
    }

    fn err(&self, expected: &str) -> ParseError {
        let (line, col) = self.here();
        let found = match self.peek() {
            Some(t) => format!("found {t}"),
            None => "found end of input".to_string(),
        };
        ParseError { line, col, message: format!("expected {expected}, {found}") }
    }

    fn eat(&mut self, tok: &Tok, expected: &str) -> std::result::Result<(), ParseError> {
        if self.peek() == Some(tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(expected))
        }
    }

    fn expr(&mut self) -> std::result::Result<SurfaceExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = SurfaceExpr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = SurfaceExpr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> std::result::Result<SurfaceExpr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    lhs = SurfaceExpr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    lhs = SurfaceExpr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> std::result::Result<SurfaceExpr, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(SurfaceExpr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> std::result::Result<SurfaceExpr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Num(v)) if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 => {
                    self.pos += 1;
                    return Ok(SurfaceExpr::Pow(Box::new(base), v as u32));
                }
                _ => return Err(self.err("a non-negative integer exponent")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> std::result::Result<SurfaceExpr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(SurfaceExpr::Num(v))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.eat(&Tok::RParen, "')'")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                let func = match name.as_str() {
                    "i" => {
                        self.pos += 1;
                        return Ok(SurfaceExpr::ImaginaryUnit);
                    }
                    "pi" => {
                        self.pos += 1;
                        return Ok(SurfaceExpr::Pi);
                    }
                    "u1" => {
                        self.pos += 1;
                        return Ok(SurfaceExpr::U1);
                    }
                    "u2" => {
                        self.pos += 1;
                        return Ok(SurfaceExpr::U2);
                    }
                    "exp" => Func::Exp,
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "sqrt" => Func::Sqrt,
                    "conj" => Func::Conj,
                    _ => {
                        let (line, col) = self.here();
                        return Err(ParseError {
                            line,
                            col,
                            message: format!("unknown identifier '{name}'"),
                        });
                    }
                };
                self.pos += 1;
                self.eat(&Tok::LParen, "'(' after function name")?;
                let arg = self.expr()?;
                self.eat(&Tok::RParen, "')'")?;
                Ok(SurfaceExpr::Call(func, Box::new(arg)))
            }
            _ => Err(self.err("a number, 'i', 'pi', 'u1', 'u2', a function call or '('")),
        }
    }
}

/// Parses a single expression (one tuple component).
pub fn parse_expr(text: &str) -> std::result::Result<SurfaceExpr, ParseError> {
    let toks = lex(text, 1)?;
    let end = text.lines().count().max(1);
    let end_col = text.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
    let mut p = Parser { toks, pos: 0, end_line: end, end_col };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("end of expression"));
    }
    Ok(e)
}

/// Parses a full surface definition: comments, optional periodic header,
/// and the component tuple (optionally wrapped in one pair of parens).
pub fn parse_surface(text: &str) -> std::result::Result<ParsedSurface, ParseError> {
    let mut periodic = true;
    let mut body = String::new();
    let mut body_start_line = 1;
    let mut started = false;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = raw.trim();
        if !started {
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix("periodic:") {
                periodic = match rest.trim() {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(ParseError {
                            line: lineno,
                            col: raw.find(':').map(|c| c + 2).unwrap_or(1),
                            message: format!("periodic header expects true or false, found '{other}'"),
                        })
                    }
                };
                continue;
            }
            started = true;
            body_start_line = lineno;
        }
        if trimmed.starts_with('#') {
            body.push('\n');
            continue;
        }
        body.push_str(raw);
        body.push('\n');
    }
    let toks = lex(&body, body_start_line)?;
    if toks.is_empty() {
        return Err(ParseError { line: 1, col: 1, message: "empty surface definition".into() });
    }
    // Strip one pair of wrapping parens when they enclose the whole tuple.
    let toks = strip_wrapping_parens(toks);
    let end_line = toks.last().map(|s| s.line).unwrap_or(1);
    let end_col = toks.last().map(|s| s.col + 1).unwrap_or(1);
    let mut p = Parser { toks, pos: 0, end_line, end_col };
    let mut components = vec![p.expr()?];
    while p.peek() == Some(&Tok::Comma) {
        p.pos += 1;
        components.push(p.expr()?);
    }
    if p.pos != p.toks.len() {
        return Err(p.err("',' or end of surface definition"));
    }
    Ok(ParsedSurface { components, periodic })
}

fn strip_wrapping_parens(toks: Vec<Spanned>) -> Vec<Spanned> {
    if toks.len() < 2 || toks[0].tok != Tok::LParen || toks[toks.len() - 1].tok != Tok::RParen {
        return toks;
    }
    // the opening paren must match the final one and shield a depth-1 comma
    let mut depth = 0usize;
    let mut top_level_comma = false;
    for (k, s) in toks.iter().enumerate() {
        match s.tok {
            Tok::LParen => depth += 1,
            Tok::RParen => {
                depth -= 1;
                if depth == 0 && k != toks.len() - 1 {
                    return toks;
                }
            }
            Tok::Comma if depth == 1 => top_level_comma = true,
            _ => {}
        }
    }
    if top_level_comma {
        toks[1..toks.len() - 1].to_vec()
    } else {
        toks
    }
}

// ----------------------------------------------------------- serializer

impl SurfaceExpr {
    fn precedence(&self) -> u8 {
        match self {
            SurfaceExpr::Add(..) | SurfaceExpr::Sub(..) => 1,
            SurfaceExpr::Mul(..) | SurfaceExpr::Div(..) => 2,
            SurfaceExpr::Neg(..) => 3,
            SurfaceExpr::Pow(..) => 4,
            _ => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        if prec < min {
            write!(f, "(")?;
        }
        match self {
            SurfaceExpr::Num(v) => write!(f, "{v}")?,
            SurfaceExpr::ImaginaryUnit => write!(f, "i")?,
            SurfaceExpr::Pi => write!(f, "pi")?,
            SurfaceExpr::U1 => write!(f, "u1")?,
            SurfaceExpr::U2 => write!(f, "u2")?,
            SurfaceExpr::Neg(a) => {
                write!(f, "-")?;
                a.fmt_prec(f, 3)?;
            }
            SurfaceExpr::Add(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " + ")?;
                b.fmt_prec(f, 2)?;
            }
            SurfaceExpr::Sub(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " - ")?;
                b.fmt_prec(f, 2)?;
            }
            SurfaceExpr::Mul(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " * ")?;
                b.fmt_prec(f, 3)?;
            }
            SurfaceExpr::Div(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " / ")?;
                b.fmt_prec(f, 3)?;
            }
            SurfaceExpr::Pow(a, k) => {
                a.fmt_prec(f, 5)?;
                write!(f, "^{k}")?;
            }
            SurfaceExpr::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.fmt_prec(f, 0)?;
                write!(f, ")")?;
            }
        }
        if prec < min {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for SurfaceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

// ------------------------------------------------------------ evaluation

/// Evaluates value and both first partials by dual arithmetic.
pub fn evaluate_dual(expr: &SurfaceExpr, u1: f64, u2: f64) -> std::result::Result<DualScalar, EvalError> {
    match expr {
        SurfaceExpr::Num(v) => Ok(DualScalar::constant(Complex64::new(*v, 0.0))),
        SurfaceExpr::ImaginaryUnit => Ok(DualScalar::constant(Complex64::new(0.0, 1.0))),
        SurfaceExpr::Pi => Ok(DualScalar::constant(Complex64::new(std::f64::consts::PI, 0.0))),
        SurfaceExpr::U1 => Ok(DualScalar::var_u1(u1)),
        SurfaceExpr::U2 => Ok(DualScalar::var_u2(u2)),
        SurfaceExpr::Neg(a) => Ok(evaluate_dual(a, u1, u2)?.neg()),
        SurfaceExpr::Add(a, b) => Ok(evaluate_dual(a, u1, u2)?.add(evaluate_dual(b, u1, u2)?)),
        SurfaceExpr::Sub(a, b) => Ok(evaluate_dual(a, u1, u2)?.sub(evaluate_dual(b, u1, u2)?)),
        SurfaceExpr::Mul(a, b) => Ok(evaluate_dual(a, u1, u2)?.mul(evaluate_dual(b, u1, u2)?)),
        SurfaceExpr::Div(a, b) => evaluate_dual(a, u1, u2)?.div(evaluate_dual(b, u1, u2)?),
        SurfaceExpr::Pow(a, k) => Ok(evaluate_dual(a, u1, u2)?.powi(*k)),
        SurfaceExpr::Call(func, a) => {
            let inner = evaluate_dual(a, u1, u2)?;
            match func {
                Func::Exp => Ok(inner.exp()),
                Func::Sin => Ok(inner.sin()),
                Func::Cos => Ok(inner.cos()),
                Func::Sqrt => inner.sqrt(),
                Func::Conj => Ok(inner.conj()),
            }
        }
    }
}

/// Builds an Immersion whose evaluators delegate to dual evaluation.
///
/// A coarse 16x16 validation pass runs before return; its failures are
/// attached to the immersion as warnings. Evaluation errors inside the
/// returned closures surface as NaN components (caught by validation and
/// by the degenerate-metric guards downstream).
pub fn immersion_from_dsl(text: &str, n: usize) -> Result<Immersion> {
    let parsed = parse_surface(text)?;
    if parsed.components.len() != n + 1 {
        return Err(Error::ComponentCount {
            n,
            expected: n + 1,
            got: parsed.components.len(),
        });
    }
    let exprs: Arc<[SurfaceExpr]> = parsed.components.clone().into();
    let exprs2 = Arc::clone(&exprs);
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let mut imm = Immersion::new(
        n,
        "dsl-surface",
        parsed.periodic,
        move |u1, u2| {
            exprs
                .iter()
                .map(|e| evaluate_dual(e, u1, u2).map(|d| d.value).unwrap_or(nan))
                .collect()
        },
        move |u1, u2| {
            let mut d1 = Vec::with_capacity(exprs2.len());
            let mut d2 = Vec::with_capacity(exprs2.len());
            for e in exprs2.iter() {
                match evaluate_dual(e, u1, u2) {
                    Ok(d) => {
                        d1.push(d.du1);
                        d2.push(d.du2);
                    }
                    Err(_) => {
                        d1.push(nan);
                        d2.push(nan);
                    }
                }
            }
            (d1, d2)
        },
    )?;
    let report = validate_immersion_with(&imm, 16, tolerances::DSL_SPHERE);
    if !report.passed {
        imm.push_warnings(report.issues.iter().map(|i| i.to_string()).collect());
    }
    Ok(imm)
}

#[cfg(test)]
mod tests;
