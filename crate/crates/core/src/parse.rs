//! Text grammar for function specs.
//!
//! Infix arithmetic with `x` as the variable, functions `exp`, `log`,
//! `pow(x,p)` or `x^p`, `poly[c0,c1,...]`, and an optional domain suffix
//! `on (a,b)` where `inf`/`-inf` are allowed. Without a suffix the domain is
//! the whole real line.
//!
//! Printing a parsed spec and reparsing it yields an identical tree.

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{Expr, FunctionSpec};
use crate::interval::Interval;

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
    LBracket,
    RBracket,
    Comma,
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                toks.push((Tok::Plus, start));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, start));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, start));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, start));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, start));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, start));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, start));
                i += 1;
            }
            '[' => {
                toks.push((Tok::LBracket, start));
                i += 1;
            }
            ']' => {
                toks.push((Tok::RBracket, start));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, start));
                i += 1;
            }
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| Error::Parse {
                    position: start,
                    message: format!("invalid number `{text}`"),
                })?;
                toks.push((Tok::Num(v), start));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((Tok::Ident(src[start..i].to_string()), start));
            }
            other => {
                return Err(Error::Parse {
                    position: start,
                    message: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    lx: Lexer<'a>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self, ahead: usize) -> Option<&Tok> {
        self.lx.toks.get(self.pos + ahead).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.lx
            .toks
            .get(self.pos)
            .map(|(_, p)| *p)
            .unwrap_or(self.lx.src.len())
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.lx.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            position: self.here(),
            message: message.into(),
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(Error::Parse {
                position: self.here(),
                message: format!("expected {what}"),
            }),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(0), Some(Tok::Ident(s)) if s == kw)
    }

    fn parse_expr(&mut self) -> Result<Expr> {
        let first = self.parse_term()?;
        let mut children = vec![first];
        loop {
            match self.peek(0) {
                Some(Tok::Plus) => {
                    self.bump();
                    children.push(self.parse_term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    children.push(Expr::Negate(Box::new(self.parse_term()?)));
                }
                _ => break,
            }
        }
        if children.len() == 1 {
            Ok(children.pop().unwrap())
        } else {
            Ok(Expr::Sum(children))
        }
    }

    fn parse_term(&mut self) -> Result<Expr> {
        let first = self.parse_unary()?;
        let mut children = vec![first];
        let mut division_ops = 0usize;
        loop {
            match self.peek(0) {
                Some(Tok::Star) => {
                    self.bump();
                    children.push(self.parse_unary()?);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    division_ops += 1;
                    children.push(Expr::Reciprocal(Box::new(self.parse_unary()?)));
                }
                _ => break,
            }
        }
        // `1 / u` denotes a plain reciprocal node, not a product.
        if children.len() == 2 && division_ops == 1 && children[0] == Expr::Const(1.0) {
            return Ok(children.pop().unwrap());
        }
        if children.len() == 1 {
            Ok(children.pop().unwrap())
        } else {
            Ok(Expr::Product(children))
        }
    }

    fn parse_unary(&mut self) -> Result<Expr> {
        if matches!(self.peek(0), Some(Tok::Minus)) {
            self.bump();
            // A minus directly on a number literal folds into a negative
            // constant, unless an exponent binds tighter (`-2^3`).
            if let Some(Tok::Num(v)) = self.peek(0) {
                if !matches!(self.peek(1), Some(Tok::Caret)) {
                    let v = *v;
                    self.bump();
                    return Ok(Expr::Const(-v));
                }
            }
            return Ok(Expr::Negate(Box::new(self.parse_unary()?)));
        }
        self.parse_postfix()
    }

    fn parse_postfix(&mut self) -> Result<Expr> {
        let base = self.parse_atom()?;
        if matches!(self.peek(0), Some(Tok::Caret)) {
            self.bump();
            let p = self.parse_signed_number("exponent")?;
            return Ok(Expr::Power(Box::new(base), p));
        }
        Ok(base)
    }

    fn parse_signed_number(&mut self, what: &str) -> Result<f64> {
        let neg = if matches!(self.peek(0), Some(Tok::Minus)) {
            self.bump();
            true
        } else {
            false
        };
        match self.bump() {
            Some(Tok::Num(v)) => Ok(if neg { -v } else { v }),
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn parse_atom(&mut self) -> Result<Expr> {
        match self.peek(0).cloned() {
            Some(Tok::Num(v)) => {
                self.bump();
                Ok(Expr::Const(v))
            }
            Some(Tok::LParen) => {
                self.bump();
                let e = self.parse_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "x" => {
                    self.bump();
                    Ok(Expr::Var)
                }
                "exp" | "log" => {
                    self.bump();
                    self.expect(Tok::LParen, "`(`")?;
                    let inner = self.parse_expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(if name == "exp" {
                        Expr::Exp(Box::new(inner))
                    } else {
                        Expr::Log(Box::new(inner))
                    })
                }
                "pow" => {
                    self.bump();
                    self.expect(Tok::LParen, "`(`")?;
                    let base = self.parse_expr()?;
                    self.expect(Tok::Comma, "`,`")?;
                    let p = self.parse_signed_number("exponent")?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Expr::Power(Box::new(base), p))
                }
                "poly" => {
                    self.bump();
                    self.expect(Tok::LBracket, "`[`")?;
                    let mut coeffs = vec![self.parse_signed_number("coefficient")?];
                    while matches!(self.peek(0), Some(Tok::Comma)) {
                        self.bump();
                        coeffs.push(self.parse_signed_number("coefficient")?);
                    }
                    self.expect(Tok::RBracket, "`]`")?;
                    Ok(Expr::Polynomial(coeffs))
                }
                other => Err(self.err(format!("unknown identifier `{other}`"))),
            },
            _ => Err(self.err("expected an expression")),
        }
    }

    fn parse_endpoint(&mut self) -> Result<f64> {
        let neg = if matches!(self.peek(0), Some(Tok::Minus)) {
            self.bump();
            true
        } else {
            false
        };
        let v = match self.bump() {
            Some(Tok::Num(v)) => v,
            Some(Tok::Ident(s)) if s == "inf" => f64::INFINITY,
            _ => return Err(self.err("expected a number or `inf`")),
        };
        Ok(if neg { -v } else { v })
    }

    fn parse_domain(&mut self) -> Result<Interval> {
        self.expect(Tok::LParen, "`(`")?;
        let lo = self.parse_endpoint()?;
        self.expect(Tok::Comma, "`,`")?;
        let hi = self.parse_endpoint()?;
        self.expect(Tok::RParen, "`)`")?;
        Interval::open(lo, hi)
    }
}

/// Parse function text into a [`FunctionSpec`]. Without an `on (a,b)` suffix
/// the domain defaults to the whole real line.
pub fn parse(text: &str) -> Result<FunctionSpec> {
    let toks = lex(text)?;
    let mut p = Parser {
        lx: Lexer { src: text, toks },
        pos: 0,
    };
    let expr = p.parse_expr()?;
    let domain = if p.at_keyword("on") {
        p.bump();
        p.parse_domain()?
    } else {
        Interval::real_line()
    };
    if p.pos != p.lx.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(FunctionSpec::new(expr, domain))
}

// ---------------------------------------------------------------------------
// Canonical printing. `parse(format!("{spec}"))` reproduces the tree exactly.
// ---------------------------------------------------------------------------

fn num(v: f64) -> String {
    format!("{v}")
}

fn print_expr(e: &Expr, out: &mut String) {
    match e {
        Expr::Const(c) => out.push_str(&num(*c)),
        Expr::Var => out.push('x'),
        Expr::Sum(children) => {
            for (i, child) in children.iter().enumerate() {
                if i == 0 {
                    print_sum_child(child, out);
                } else if let Expr::Negate(inner) = child {
                    out.push_str(" - ");
                    print_in_parens_if(inner, out, matches!(**inner, Expr::Sum(_)));
                } else {
                    out.push_str(" + ");
                    print_sum_child(child, out);
                }
            }
        }
        Expr::Product(children) => {
            // `1 * (1 / u)` keeps this tree distinct from a bare reciprocal.
            if children.len() == 2 && children[0] == Expr::Const(1.0) {
                if let Expr::Reciprocal(_) = children[1] {
                    out.push_str("1 * (");
                    print_expr(&children[1], out);
                    out.push(')');
                    return;
                }
            }
            for (i, child) in children.iter().enumerate() {
                if i == 0 {
                    print_product_child(child, out);
                } else if let Expr::Reciprocal(inner) = child {
                    out.push_str(" / ");
                    print_in_parens_if(
                        inner,
                        out,
                        matches!(
                            **inner,
                            Expr::Sum(_) | Expr::Product(_) | Expr::Reciprocal(_)
                        ),
                    );
                } else {
                    out.push_str(" * ");
                    print_product_child(child, out);
                }
            }
        }
        Expr::Negate(inner) => {
            out.push('-');
            print_in_parens_if(
                inner,
                out,
                matches!(
                    **inner,
                    Expr::Const(_) | Expr::Sum(_) | Expr::Product(_) | Expr::Reciprocal(_)
                ),
            );
        }
        Expr::Reciprocal(inner) => {
            out.push_str("1 / ");
            print_in_parens_if(
                inner,
                out,
                matches!(
                    **inner,
                    Expr::Sum(_) | Expr::Product(_) | Expr::Reciprocal(_)
                ),
            );
        }
        Expr::Power(base, p) => {
            let bare = matches!(
                **base,
                Expr::Var | Expr::Exp(_) | Expr::Log(_) | Expr::Polynomial(_)
            ) || matches!(**base, Expr::Const(c) if c >= 0.0);
            print_in_parens_if(base, out, !bare);
            out.push('^');
            out.push_str(&num(*p));
        }
        Expr::Exp(inner) => {
            out.push_str("exp(");
            print_expr(inner, out);
            out.push(')');
        }
        Expr::Log(inner) => {
            out.push_str("log(");
            print_expr(inner, out);
            out.push(')');
        }
        Expr::Polynomial(coeffs) => {
            out.push_str("poly[");
            for (i, c) in coeffs.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&num(*c));
            }
            out.push(']');
        }
    }
}

fn print_sum_child(child: &Expr, out: &mut String) {
    print_in_parens_if(child, out, matches!(child, Expr::Sum(_)));
}

fn print_product_child(child: &Expr, out: &mut String) {
    print_in_parens_if(
        child,
        out,
        matches!(child, Expr::Sum(_) | Expr::Product(_) | Expr::Reciprocal(_)),
    );
}

fn print_in_parens_if(e: &Expr, out: &mut String, parens: bool) {
    if parens {
        out.push('(');
        print_expr(e, out);
        out.push(')');
    } else {
        print_expr(e, out);
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        print_expr(self, &mut s);
        f.write_str(&s)
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.domain.lo();
        let hi = self.domain.hi();
        let fmt_ep = |v: f64| -> String {
            if v == f64::INFINITY {
                "inf".into()
            } else if v == f64::NEG_INFINITY {
                "-inf".into()
            } else {
                num(v)
            }
        };
        write!(f, "{} on ({},{})", self.expr, fmt_ep(lo), fmt_ep(hi))
    }
}
