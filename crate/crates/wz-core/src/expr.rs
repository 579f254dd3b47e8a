//! Identity surface syntax: parse text into an expression tree of rational
//! operations, powers, factorials, binomials, and sums; print back to one
//! canonical form.
//!
//! Grammar (whitespace-insensitive, `+`/`-` left-associative, `^` tightest):
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := atom ['^' atom]
//! atom   := integer | name | '(' expr ')' | func '(' args ')'
//! func   := factorial | binomial | sum
//! ```
//!
//! `sum(k, lo, hi, body)` is the only binder; multiple sums nest. The name
//! `inf` is reserved for infinite sum bounds. Factorial and binomial
//! arguments must be integer-linear combinations of names; that is checked
//! at parse time with a 1-based character position on failure.

use crate::poly::{ArithError, CtxRef, MultiPoly};
use crate::rat::Rat;
use crate::ratfun::RationalFunction;
use num::{BigInt, Signed};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("semantic error at position {pos}: {message}")]
    Semantic { pos: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Sym(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Factorial(Box<Expr>),
    Binomial(Box<Expr>, Box<Expr>),
    Sum { var: String, lo: Box<Expr>, hi: Box<Expr>, body: Box<Expr> },
}

impl Expr {
    pub fn int(v: i64) -> Expr {
        Expr::Int(BigInt::from(v))
    }

    pub fn sym(s: &str) -> Expr {
        Expr::Sym(s.to_string())
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Expr::Sym(s) if s == "inf")
            || matches!(self, Expr::Mul(a, b)
                if matches!(&**a, Expr::Int(v) if *v == BigInt::from(-1))
                    && matches!(&**b, Expr::Sym(s) if s == "inf"))
    }

    /// Names occurring free in the expression (sum-bound names excluded).
    pub fn free_names(&self, out: &mut std::collections::BTreeSet<String>) {
        match self {
            Expr::Int(_) => {}
            Expr::Sym(s) => {
                out.insert(s.clone());
            }
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b)
            | Expr::Binomial(a, b) => {
                a.free_names(out);
                b.free_names(out);
            }
            Expr::Factorial(a) => a.free_names(out),
            Expr::Sum { var, lo, hi, body } => {
                lo.free_names(out);
                hi.free_names(out);
                let mut inner = std::collections::BTreeSet::new();
                body.free_names(&mut inner);
                inner.remove(var);
                out.extend(inner);
            }
        }
    }
}

/// Integer-linear form over names: sum of coeff*name plus an integer constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearForm {
    pub coeffs: BTreeMap<String, i64>,
    pub constant: i64,
}

impl LinearForm {
    pub fn constant(c: i64) -> Self {
        LinearForm { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn name(n: &str) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(n.to_string(), 1);
        LinearForm { coeffs, constant: 0 }
    }

    pub fn coeff(&self, name: &str) -> i64 {
        self.coeffs.get(name).copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.constant += other.constant;
        for (n, c) in &other.coeffs {
            let e = out.coeffs.entry(n.clone()).or_insert(0);
            *e += c;
            if *e == 0 {
                out.coeffs.remove(n);
            }
        }
        out
    }

    pub fn scale(&self, s: i64) -> Self {
        if s == 0 {
            return LinearForm::constant(0);
        }
        LinearForm {
            coeffs: self.coeffs.iter().map(|(n, c)| (n.clone(), c * s)).collect(),
            constant: self.constant * s,
        }
    }

    /// The form with `name` replaced by `name + delta`.
    pub fn shift_name(&self, name: &str, delta: i64) -> Self {
        let mut out = self.clone();
        out.constant += self.coeff(name) * delta;
        out
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Evaluate with every occurring name bound.
    pub fn evaluate(&self, point: &BTreeMap<String, i64>) -> Option<i64> {
        let mut acc = self.constant as i128;
        for (n, c) in &self.coeffs {
            acc += (*c as i128) * (*point.get(n)? as i128);
        }
        i64::try_from(acc).ok()
    }

    /// As a degree-<=1 polynomial over the context.
    pub fn to_poly(&self, ctx: &CtxRef) -> Result<MultiPoly, ArithError> {
        let mut p = MultiPoly::int(ctx, self.constant);
        for (n, c) in &self.coeffs {
            let v = MultiPoly::var(ctx, n)?;
            p = &p + &v.scale(&Rat::from_integer(BigInt::from(*c)));
        }
        Ok(p)
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.coeffs.keys()
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in &self.coeffs {
            if first {
                match *c {
                    1 => write!(f, "{n}")?,
                    -1 => write!(f, "-{n}")?,
                    c => write!(f, "{c}*{n}")?,
                }
                first = false;
            } else {
                let sign = if *c < 0 { " - " } else { " + " };
                let mag = c.abs();
                if mag == 1 {
                    write!(f, "{sign}{n}")?;
                } else {
                    write!(f, "{sign}{mag}*{n}")?;
                }
            }
        }
        if first {
            write!(f, "{}", self.constant)?;
        } else if self.constant != 0 {
            let sign = if self.constant < 0 { " - " } else { " + " };
            write!(f, "{sign}{}", self.constant.abs())?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Eof,
}

struct Lexer {
    toks: Vec<(Tok, usize)>, // 1-based char position of token start
    pos: usize,
}

fn lex(input: &str) -> Result<Lexer, ParseError> {
    let chars: Vec<char> = input.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0usize;
    while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' | '-' | '*' | '/' | '^' | '(' | ')' | ',' => {
                toks.push((
                    match c {
                        '+' => Tok::Plus,
                        '-' => Tok::Minus,
                        '*' => Tok::Star,
                        '/' => Tok::Slash,
                        '^' => Tok::Caret,
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        _ => Tok::Comma,
                    },
                    pos,
                ));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                toks.push((Tok::Int(BigInt::from_str(&s).unwrap()), pos));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                toks.push((Tok::Name(s), pos));
            }
            other => {
                return Err(ParseError::Syntax { pos, message: format!("unexpected character `{other}`") });
            }
        }
    }
    toks.push((Tok::Eof, chars.len() + 1));
    Ok(Lexer { toks, pos: 0 })
}

impl Lexer {
    fn peek(&self) -> &(Tok, usize) {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<usize, ParseError> {
        let (t, pos) = self.next();
        if t == tok {
            Ok(pos)
        } else {
            Err(ParseError::Syntax { pos, message: format!("expected {what}") })
        }
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

pub fn parse(input: &str) -> Result<Expr, ParseError> {
    let mut lx = lex(input)?;
    let e = parse_expr(&mut lx)?;
    let (t, pos) = lx.peek().clone();
    if t != Tok::Eof {
        return Err(ParseError::Syntax { pos, message: "trailing input".into() });
    }
    Ok(e)
}

fn neg(e: Expr) -> Expr {
    match e {
        Expr::Int(v) => Expr::Int(-v),
        other => Expr::Mul(Box::new(Expr::int(-1)), Box::new(other)),
    }
}

fn parse_expr(lx: &mut Lexer) -> Result<Expr, ParseError> {
    let mut acc = if lx.peek().0 == Tok::Minus {
        lx.next();
        neg(parse_term(lx)?)
    } else {
        parse_term(lx)?
    };
    loop {
        match lx.peek().0 {
            Tok::Plus => {
                lx.next();
                let rhs = parse_term(lx)?;
                acc = Expr::Add(Box::new(acc), Box::new(rhs));
            }
            Tok::Minus => {
                lx.next();
                let rhs = parse_term(lx)?;
                acc = Expr::Sub(Box::new(acc), Box::new(rhs));
            }
            _ => return Ok(acc),
        }
    }
}

fn parse_term(lx: &mut Lexer) -> Result<Expr, ParseError> {
    let mut acc = parse_factor(lx)?;
    loop {
        match lx.peek().0 {
            Tok::Star => {
                lx.next();
                let rhs = parse_factor(lx)?;
                acc = Expr::Mul(Box::new(acc), Box::new(rhs));
            }
            Tok::Slash => {
                lx.next();
                let rhs = parse_factor(lx)?;
                acc = Expr::Div(Box::new(acc), Box::new(rhs));
            }
            _ => return Ok(acc),
        }
    }
}

fn parse_factor(lx: &mut Lexer) -> Result<Expr, ParseError> {
    let base = parse_atom(lx)?;
    if lx.peek().0 == Tok::Caret {
        lx.next();
        let exp = parse_atom(lx)?;
        return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
    }
    Ok(base)
}

fn parse_atom(lx: &mut Lexer) -> Result<Expr, ParseError> {
    let (tok, pos) = lx.next();
    match tok {
        Tok::Int(v) => Ok(Expr::Int(v)),
        Tok::LParen => {
            let e = parse_expr(lx)?;
            lx.expect(Tok::RParen, "`)`")?;
            Ok(e)
        }
        Tok::Name(name) => match name.as_str() {
            "factorial" => {
                lx.expect(Tok::LParen, "`(` after factorial")?;
                let arg_pos = lx.peek().1;
                let arg = parse_expr(lx)?;
                lx.expect(Tok::RParen, "`)`")?;
                check_integer_linear(&arg, arg_pos, "factorial")?;
                Ok(Expr::Factorial(Box::new(arg)))
            }
            "binomial" => {
                lx.expect(Tok::LParen, "`(` after binomial")?;
                let top_pos = lx.peek().1;
                let top = parse_expr(lx)?;
                lx.expect(Tok::Comma, "`,`")?;
                let bot_pos = lx.peek().1;
                let bot = parse_expr(lx)?;
                lx.expect(Tok::RParen, "`)`")?;
                check_integer_linear(&top, top_pos, "binomial")?;
                check_integer_linear(&bot, bot_pos, "binomial")?;
                Ok(Expr::Binomial(Box::new(top), Box::new(bot)))
            }
            "sum" => {
                lx.expect(Tok::LParen, "`(` after sum")?;
                let (vt, vpos) = lx.next();
                let var = match vt {
                    Tok::Name(v) if v != "inf" => v,
                    _ => {
                        return Err(ParseError::Syntax {
                            pos: vpos,
                            message: "sum needs a bound variable name".into(),
                        })
                    }
                };
                lx.expect(Tok::Comma, "`,`")?;
                let lo_pos = lx.peek().1;
                let lo = parse_expr(lx)?;
                lx.expect(Tok::Comma, "`,`")?;
                let hi_pos = lx.peek().1;
                let hi = parse_expr(lx)?;
                lx.expect(Tok::Comma, "`,`")?;
                let body = parse_expr(lx)?;
                lx.expect(Tok::RParen, "`)`")?;
                check_sum_bound(&lo, lo_pos)?;
                check_sum_bound(&hi, hi_pos)?;
                Ok(Expr::Sum { var, lo: Box::new(lo), hi: Box::new(hi), body: Box::new(body) })
            }
            _ => Ok(Expr::Sym(name)),
        },
        other => Err(ParseError::Syntax { pos, message: format!("unexpected token `{other:?}`") }),
    }
}

fn check_integer_linear(e: &Expr, pos: usize, what: &str) -> Result<(), ParseError> {
    expr_to_linear(e).map(|_| ()).map_err(|_| ParseError::Semantic {
        pos,
        message: format!("{what} argument must be an integer-linear combination of names"),
    })
}

fn check_sum_bound(e: &Expr, pos: usize) -> Result<(), ParseError> {
    if e.is_infinity() {
        return Ok(());
    }
    expr_to_linear(e).map(|_| ()).map_err(|_| ParseError::Semantic {
        pos,
        message: "sum bound must be integer-linear (or inf)".into(),
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("expression is not integer-linear")]
pub struct NotLinear;

/// Interpret an expression as an integer-linear form over names.
pub fn expr_to_linear(e: &Expr) -> Result<LinearForm, NotLinear> {
    match e {
        Expr::Int(v) => i64::try_from(v.clone()).map(LinearForm::constant).map_err(|_| NotLinear),
        Expr::Sym(s) if s != "inf" => Ok(LinearForm::name(s)),
        Expr::Sym(_) => Err(NotLinear),
        Expr::Add(a, b) => Ok(expr_to_linear(a)?.add(&expr_to_linear(b)?)),
        Expr::Sub(a, b) => Ok(expr_to_linear(a)?.add(&expr_to_linear(b)?.scale(-1))),
        Expr::Mul(a, b) => {
            let la = expr_to_linear(a)?;
            let lb = expr_to_linear(b)?;
            if la.is_constant() {
                Ok(lb.scale(la.constant))
            } else if lb.is_constant() {
                Ok(la.scale(lb.constant))
            } else {
                Err(NotLinear)
            }
        }
        _ => Err(NotLinear),
    }
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

// precedence levels: additive 1, multiplicative 2, power 3, atom 4
fn level(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(a, _) if matches!(&**a, Expr::Int(v) if *v == BigInt::from(-1)) => 1, // unary minus
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Pow(..) => 3,
        Expr::Int(v) if v.is_negative() => 1,
        _ => 4,
    }
}

fn print_at(e: &Expr, min_level: u8, out: &mut String) {
    let lv = level(e);
    let parens = lv < min_level;
    if parens {
        out.push('(');
    }
    match e {
        Expr::Int(v) => out.push_str(&v.to_string()),
        Expr::Sym(s) => out.push_str(s),
        Expr::Add(a, b) => {
            print_at(a, 1, out);
            out.push_str(" + ");
            print_at(b, 2, out);
        }
        Expr::Sub(a, b) => {
            print_at(a, 1, out);
            out.push_str(" - ");
            print_at(b, 2, out);
        }
        Expr::Mul(a, b) if matches!(&**a, Expr::Int(v) if *v == BigInt::from(-1)) => {
            out.push('-');
            print_at(b, 2, out);
        }
        Expr::Mul(a, b) => {
            print_at(a, 2, out);
            out.push('*');
            print_at(b, 3, out);
        }
        Expr::Div(a, b) => {
            print_at(a, 2, out);
            out.push('/');
            print_at(b, 3, out);
        }
        Expr::Pow(a, b) => {
            print_at(a, 4, out);
            out.push('^');
            print_at(b, 4, out);
        }
        Expr::Factorial(a) => {
            out.push_str("factorial(");
            print_at(a, 1, out);
            out.push(')');
        }
        Expr::Binomial(a, b) => {
            out.push_str("binomial(");
            print_at(a, 1, out);
            out.push_str(", ");
            print_at(b, 1, out);
            out.push(')');
        }
        Expr::Sum { var, lo, hi, body } => {
            out.push_str("sum(");
            out.push_str(var);
            out.push_str(", ");
            print_at(lo, 1, out);
            out.push_str(", ");
            print_at(hi, 1, out);
            out.push_str(", ");
            print_at(body, 1, out);
            out.push(')');
        }
    }
    if parens {
        out.push(')');
    }
}

/// Canonical text form; `parse(print(e)) == e` structurally.
pub fn print(e: &Expr) -> String {
    let mut out = String::new();
    print_at(e, 0, &mut out);
    out
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

// ---------------------------------------------------------------------------
// Conversion to polynomials / rational functions
// ---------------------------------------------------------------------------

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConvertError {
    #[error("not a rational expression: {0}")]
    NotRational(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Interpret an expression with only rational operations (and integer
/// constant powers) as a rational function over the context.
pub fn expr_to_ratfun(e: &Expr, ctx: &CtxRef) -> Result<RationalFunction, ConvertError> {
    match e {
        Expr::Int(v) => Ok(RationalFunction::constant(ctx, Rat::from_integer(v.clone()))),
        Expr::Sym(s) => Ok(RationalFunction::var(ctx, s)?),
        Expr::Add(a, b) => Ok(expr_to_ratfun(a, ctx)?.checked_add(&expr_to_ratfun(b, ctx)?)?),
        Expr::Sub(a, b) => Ok(expr_to_ratfun(a, ctx)?.checked_sub(&expr_to_ratfun(b, ctx)?)?),
        Expr::Mul(a, b) => Ok(expr_to_ratfun(a, ctx)?.checked_mul(&expr_to_ratfun(b, ctx)?)?),
        Expr::Div(a, b) => Ok(expr_to_ratfun(a, ctx)?.checked_div(&expr_to_ratfun(b, ctx)?)?),
        Expr::Pow(a, b) => {
            let exp = match &**b {
                Expr::Int(v) => i64::try_from(v.clone())
                    .map_err(|_| ConvertError::NotRational("power exponent overflows".into()))?,
                _ => return Err(ConvertError::NotRational(format!("non-constant exponent in `{e}`"))),
            };
            Ok(expr_to_ratfun(a, ctx)?.pow(exp)?)
        }
        other => Err(ConvertError::NotRational(format!("`{other}` is not a rational operation"))),
    }
}

/// Interpret as a polynomial (a rational function with constant denominator).
pub fn expr_to_poly(e: &Expr, ctx: &CtxRef) -> Result<MultiPoly, ConvertError> {
    let r = expr_to_ratfun(e, ctx)?;
    let d = r
        .den()
        .constant_value()
        .ok_or_else(|| ConvertError::NotRational(format!("`{e}` has a polynomial denominator")))?;
    Ok(r.num().scale(&d.recip()))
}

/// Parse a canonical polynomial string over the given context.
pub fn parse_poly(s: &str, ctx: &CtxRef) -> Result<MultiPoly, ConvertError> {
    let e = parse(s).map_err(|err| ConvertError::NotRational(err.to_string()))?;
    expr_to_poly(&e, ctx)
}

/// Parse a canonical `(num)/(den)` rational-function string.
pub fn parse_ratfun(s: &str, ctx: &CtxRef) -> Result<RationalFunction, ConvertError> {
    let e = parse(s).map_err(|err| ConvertError::NotRational(err.to_string()))?;
    expr_to_ratfun(&e, ctx)
}

/// Split `lhs = rhs` on the unique top-level equals sign.
pub fn split_identity(text: &str) -> Result<(&str, &str), ParseError> {
    let mut parts = text.split('=');
    let lhs = parts.next().unwrap_or("");
    let rhs = match parts.next() {
        None => {
            return Err(ParseError::Syntax { pos: text.chars().count() + 1, message: "expected `=`".into() })
        }
        Some(r) => r,
    };
    if parts.next().is_some() {
        let pos = text.chars().take_while(|&c| c != '=').count() + 1;
        return Err(ParseError::Syntax { pos, message: "more than one `=`".into() });
    }
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_signed_power_times_binomial_cube() {
        let e = parse("(-1)^k * binomial(2*n, n+k)^3").unwrap();
        let expected = Expr::Mul(
            Box::new(Expr::Pow(Box::new(Expr::int(-1)), Box::new(Expr::sym("k")))),
            Box::new(Expr::Pow(
                Box::new(Expr::Binomial(
                    Box::new(Expr::Mul(Box::new(Expr::int(2)), Box::new(Expr::sym("n")))),
                    Box::new(Expr::Add(Box::new(Expr::sym("n")), Box::new(Expr::sym("k")))),
                )),
                Box::new(Expr::int(3)),
            )),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn factorial_quotient_parses_as_div_tree() {
        let e = parse("factorial(n)/(factorial(k)*factorial(n-k))").unwrap();
        match e {
            Expr::Div(num, _) => assert!(matches!(*num, Expr::Factorial(_))),
            other => panic!("expected Div, got {other:?}"),
        }
    }

    #[test]
    fn nonlinear_binomial_argument_is_a_semantic_error() {
        let err = parse("binomial(n, k*k)").unwrap_err();
        assert!(matches!(err, ParseError::Semantic { .. }));
    }

    #[test]
    fn error_positions_are_one_based() {
        let err = parse("k + ?").unwrap_err();
        assert_eq!(err, ParseError::Syntax { pos: 5, message: "unexpected character `?`".into() });
    }

    #[test]
    fn round_trips_corpus_identities() {
        let corpus = [
            "sum(k, 0, n, binomial(n, k)*a^k*b^(n - k))",
            "sum(k, -n, n, (-1)^k*binomial(2*n, n + k)^3)",
            "factorial(3*n)/factorial(n)^3",
            "binomial(n, k)/2^n",
            "sum(k1, 0, n, sum(k2, 0, n, binomial(n, k1)*binomial(n, k2)/4^n))",
        ];
        for s in corpus {
            let once = parse(s).unwrap();
            let printed = print(&once);
            let twice = parse(&printed).unwrap();
            assert_eq!(once, twice, "round trip failed for `{s}` -> `{printed}`");
            // printing is a fixpoint
            assert_eq!(print(&twice), printed);
        }
    }

    #[test]
    fn print_normalizes_whitespace() {
        let a = parse("k   +1").unwrap();
        let b = parse("k+ 1").unwrap();
        assert_eq!(print(&a), print(&b));
        assert_eq!(print(&a), "k + 1");
    }

    #[test]
    fn unary_minus_forms() {
        let e = parse("-n").unwrap();
        assert_eq!(e, Expr::Mul(Box::new(Expr::int(-1)), Box::new(Expr::sym("n"))));
        assert_eq!(print(&e), "-n");
        let p = parse("(-q)^k").unwrap();
        assert_eq!(print(&p), "(-q)^k");
        assert_eq!(parse(&print(&p)).unwrap(), p);
    }

    #[test]
    fn sum_bounds_accept_inf_and_linear_forms() {
        assert!(parse("sum(r, 0, inf, q^r)").is_ok());
        assert!(parse("sum(k, -n, n, k)").is_ok());
        assert!(matches!(parse("sum(k, n*n, n, k)"), Err(ParseError::Semantic { .. })));
    }

    #[test]
    fn linear_form_extraction() {
        let e = parse("2*n - k + 3").unwrap();
        let lf = expr_to_linear(&e).unwrap();
        assert_eq!(lf.coeff("n"), 2);
        assert_eq!(lf.coeff("k"), -1);
        assert_eq!(lf.constant, 3);
        assert!(expr_to_linear(&parse("k*k").unwrap()).is_err());
    }

    #[test]
    fn poly_string_round_trip() {
        use crate::poly::Context;
        let ctx = Context::new(vec!["n", "k"], vec![]);
        let p = parse_poly("3*n^2*k - 2*n + 1", &ctx).unwrap();
        assert_eq!(p.to_canonical_string(), "3*n^2*k - 2*n + 1");
        let half = parse_poly("1/2*k", &ctx).unwrap();
        assert_eq!(half.to_canonical_string(), "1/2*k");
    }

    #[test]
    fn identity_splitting() {
        let (l, r) = split_identity("a = b").unwrap();
        assert_eq!(l.trim(), "a");
        assert_eq!(r.trim(), "b");
        assert!(split_identity("a").is_err());
        assert!(split_identity("a = b = c").is_err());
    }
}
