//! The expression grammar shared by problem files, reports and the CLI:
//! integers, `i`, the field variable, `sqrtD`, `+ - * / ^` and parentheses.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::field::{Field, FieldElement, GaussianRational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownSymbol,
    DivisionByZero,
}

/// A parse or evaluation error at a 1-based line/column of the parsed text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
}

/// Parsed expression tree; `pos` fields are byte offsets into the source.
#[derive(Debug, Clone)]
pub enum Ast {
    Int(BigInt),
    Sym(String, usize),
    Neg(Box<Ast>),
    Bin(char, Box<Ast>, Box<Ast>, usize),
    Pow(Box<Ast>, i64),
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    at: usize,
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let mut line = 1;
    let mut col = 1;
    for (i, ch) in src.char_indices() {
        if i >= offset {
            break;
        }
        if ch == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    (line, col)
}

fn err(src: &str, offset: usize, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
    let (line, column) = line_col(src, offset);
    ParseError { kind, line, column, message: message.into() }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut k = 0;
    while k < chars.len() {
        let (pos, c) = chars[k];
        if c.is_whitespace() {
            k += 1;
        } else if c.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].1.is_ascii_digit() {
                k += 1;
            }
            let end = chars.get(k).map_or(src.len(), |p| p.0);
            out.push((Tok::Int(src[chars[start].0..end].parse().unwrap()), pos));
        } else if c.is_alphabetic() || c == '_' {
            let start = k;
            while k < chars.len() && (chars[k].1.is_alphanumeric() || chars[k].1 == '_') {
                k += 1;
            }
            let end = chars.get(k).map_or(src.len(), |p| p.0);
            out.push((Tok::Ident(src[chars[start].0..end].to_string()), pos));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), pos));
            k += 1;
        } else {
            return Err(err(src, pos, ParseErrorKind::Syntax, format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.src.len(), |t| t.1)
    }

    fn syntax(&self, msg: &str) -> ParseError {
        err(self.src, self.pos(), ParseErrorKind::Syntax, msg)
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            let p = self.pos();
            self.at += 1;
            let rhs = self.term()?;
            lhs = Ast::Bin(c, Box::new(lhs), Box::new(rhs), p);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek().cloned() {
            let p = self.pos();
            self.at += 1;
            let rhs = self.unary()?;
            lhs = Ast::Bin(c, Box::new(lhs), Box::new(rhs), p);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ast, ParseError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.at += 1;
                Ok(Ast::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Op('+')) => {
                self.at += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        let paren = matches!(self.peek(), Some(Tok::Op('(')));
        if paren {
            self.at += 1;
        }
        let neg = matches!(self.peek(), Some(Tok::Op('-')));
        if neg {
            self.at += 1;
        }
        let n = match self.peek() {
            Some(Tok::Int(n)) => i64::try_from(n.clone()).map_err(|_| self.syntax("exponent too large"))?,
            _ => return Err(self.syntax("expected an integer exponent")),
        };
        self.at += 1;
        if paren {
            if !matches!(self.peek(), Some(Tok::Op(')'))) {
                return Err(self.syntax("expected ')'"));
            }
            self.at += 1;
        }
        Ok(if neg { -n } else { n })
    }

    fn power(&mut self) -> Result<Ast, ParseError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.at += 1;
            let e = self.exponent()?;
            return Ok(Ast::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Ast, ParseError> {
        let p = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                Ok(Ast::Int(n))
            }
            Some(Tok::Ident(s)) => {
                self.at += 1;
                Ok(Ast::Sym(s, p))
            }
            Some(Tok::Op('(')) => {
                self.at += 1;
                let e = self.expr()?;
                if !matches!(self.peek(), Some(Tok::Op(')'))) {
                    return Err(self.syntax("expected ')'"));
                }
                self.at += 1;
                Ok(e)
            }
            Some(_) => Err(self.syntax("expected a number, symbol or '('")),
            None => Err(self.syntax("unexpected end of expression")),
        }
    }
}

/// Parses an expression into a tree.
pub fn parse(src: &str) -> Result<Ast, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser { src, toks, at: 0 };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(e)
}

/// Arithmetic needed to evaluate a tree.
pub trait ExprRing: Clone {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// `None` when the division is impossible.
    fn div(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Self;
    fn pow(&self, e: i64) -> Option<Self>;
}

impl Ast {
    /// Evaluates with `sym` resolving identifiers; errors are located in `src`.
    pub fn eval<R: ExprRing>(
        &self,
        src: &str,
        sym: &dyn Fn(&str) -> Option<R>,
        int: &dyn Fn(&BigInt) -> R,
    ) -> Result<R, ParseError> {
        Ok(match self {
            Ast::Int(n) => int(n),
            Ast::Sym(s, p) => sym(s).ok_or_else(|| {
                err(src, *p, ParseErrorKind::UnknownSymbol, format!("unknown symbol '{s}'"))
            })?,
            Ast::Neg(a) => a.eval(src, sym, int)?.neg(),
            Ast::Bin(op, a, b, p) => {
                let (x, y) = (a.eval(src, sym, int)?, b.eval(src, sym, int)?);
                match op {
                    '+' => x.add(&y),
                    '-' => x.sub(&y),
                    '*' => x.mul(&y),
                    _ => x
                        .div(&y)
                        .ok_or_else(|| err(src, *p, ParseErrorKind::DivisionByZero, "division by zero"))?,
                }
            }
            Ast::Pow(a, e) => a.eval(src, sym, int)?.pow(*e).ok_or_else(|| {
                err(src, 0, ParseErrorKind::DivisionByZero, "negative power of zero")
            })?,
        })
    }
}

struct Elt(FieldElement);

impl Clone for Elt {
    fn clone(&self) -> Self {
        Elt(self.0.clone())
    }
}

impl ExprRing for Elt {
    fn add(&self, o: &Self) -> Self {
        Elt(&self.0 + &o.0)
    }
    fn sub(&self, o: &Self) -> Self {
        Elt(&self.0 - &o.0)
    }
    fn mul(&self, o: &Self) -> Self {
        Elt(&self.0 * &o.0)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        self.0.try_div(&o.0).ok().map(Elt)
    }
    fn neg(&self) -> Self {
        Elt(-&self.0)
    }
    fn pow(&self, e: i64) -> Option<Self> {
        if e < 0 && self.0.is_zero() {
            return None;
        }
        Some(Elt(self.0.pow(e as i32)))
    }
}

/// Parses an expression as an element of `field` (symbols: the variable, `i`, `sqrtD`).
pub fn parse_element(src: &str, field: &Arc<Field>) -> Result<FieldElement, ParseError> {
    let ast = parse(src)?;
    eval_element(&ast, src, field)
}

pub fn eval_element(ast: &Ast, src: &str, field: &Arc<Field>) -> Result<FieldElement, ParseError> {
    let sym = |s: &str| -> Option<Elt> {
        if s == field.var() {
            Some(Elt(FieldElement::var(field)))
        } else if s == "i" {
            Some(Elt(FieldElement::constant(field, GaussianRational::i())))
        } else if s == "sqrtD" {
            FieldElement::sqrt_d(field).map(Elt)
        } else {
            None
        }
    };
    let int = |n: &BigInt| {
        Elt(FieldElement::constant(field, GaussianRational::from_rational(BigRational::from_integer(n.clone()))))
    };
    ast.eval(src, &sym, &int).map(|e| e.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Poly;

    #[test]
    fn round_trips_printed_elements() {
        let f = Field::with_extension("t", &Poly::from_ints(&[2, 0, -1, 0, 0, 0, 4])).unwrap();
        for s in ["4*t^6-t^2+2", "(t+1)/(t^2-3)", "3/4*t", "-i*t^2/(t-1)", "1/t+(t)*sqrtD", "(1/2-3*i)*sqrtD/t"] {
            let e = parse_element(s, &f).unwrap();
            let back = parse_element(&e.to_expr_string(), &f).unwrap();
            assert_eq!(e, back, "{s}");
        }
    }

    #[test]
    fn sqrt_d_squares() {
        let f = Field::with_extension("t", &Poly::from_ints(&[0, 0, -1, 0, 0, 0, 4])).unwrap();
        let e = parse_element("sqrtD^2 - (4*t^6 - t^2)", &f).unwrap();
        assert!(e.is_zero());
    }

    #[test]
    fn errors_carry_positions() {
        let f = Field::rational("t");
        let e = parse_element("t +\n  x", &f).unwrap_err();
        assert_eq!((e.line, e.column, e.kind), (2, 3, ParseErrorKind::UnknownSymbol));
        let e = parse_element("(t + 1", &f).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        assert_eq!(parse_element("1/(t-t)", &f).unwrap_err().kind, ParseErrorKind::DivisionByZero);
    }

    #[test]
    fn negative_exponents() {
        let f = Field::rational("t");
        assert_eq!(parse_element("t^-2", &f).unwrap(), parse_element("1/t^2", &f).unwrap());
        assert_eq!(parse_element("t^(-1)", &f).unwrap(), parse_element("1/t", &f).unwrap());
    }
}
