//! Expression grammar for polynomials and rational functions.
//!
//! ```text
//! full   := expr ('/' expr)?
//! expr   := term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := '-' factor | base ('^' int)?
//! base   := variable | rational | '(' expr ')'
//! rational := int ('/' positive-int)?
//! ```
//!
//! Unary minus binds looser than `^`, so `-x1^2` is `-(x1^2)`. A `/` directly
//! between two integer literals is a rational literal; any other `/` must be
//! the single top-level division and yields a [`RationalFunction`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::{Monomial, MultiPoly, RationalFunction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable '{name}' at {pos}")]
    UnknownVariable { pos: usize, name: String },
    #[error("zero denominator at {pos}")]
    ZeroDenominator { pos: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedExpr {
    Poly(MultiPoly),
    Rational(RationalFunction),
}

impl ParsedExpr {
    /// The polynomial, also accepting a rational function whose
    /// denominator is a nonzero constant.
    pub fn into_poly(self) -> Option<MultiPoly> {
        match self {
            ParsedExpr::Poly(p) => Some(p),
            ParsedExpr::Rational(r) => r.as_polynomial(),
        }
    }

    pub fn into_rational(self) -> RationalFunction {
        match self {
            ParsedExpr::Poly(p) => RationalFunction::from_poly(p),
            ParsedExpr::Rational(r) => r,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '/' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Int(text[start..i].parse().expect("digits"))));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            other => {
                return Err(ParseError::Syntax {
                    pos: start,
                    msg: format!("unexpected character '{other}'"),
                })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    vars: &'a [String],
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.idx + k).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(_, t)| t.clone());
        self.idx += 1;
        t
    }

    fn err<T>(&self, msg: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos(),
            msg: msg.to_string(),
        })
    }

    fn nvars(&self) -> usize {
        self.vars.len()
    }

    fn expr(&mut self) -> Result<MultiPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = &acc + &t;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = &acc - &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly, ParseError> {
        let mut acc = self.factor()?;
        while let Some(Tok::Star) = self.peek() {
            self.bump();
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MultiPoly, ParseError> {
        if let Some(Tok::Minus) = self.peek() {
            self.bump();
            let f = self.factor()?;
            return Ok(-&f);
        }
        let b = self.base()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let pos = self.pos();
            match self.bump() {
                Some(Tok::Int(k)) => {
                    let k = k.to_u64().ok_or(ParseError::Syntax {
                        pos,
                        msg: "exponent too large".into(),
                    })?;
                    b.checked_pow(k, super::DEFAULT_MAX_TERMS)
                        .map_err(|e| ParseError::Syntax {
                            pos,
                            msg: e.to_string(),
                        })
                }
                _ => Err(ParseError::Syntax {
                    pos,
                    msg: "expected non-negative integer exponent".into(),
                }),
            }
        } else {
            Ok(b)
        }
    }

    fn base(&mut self) -> Result<MultiPoly, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.bump();
                let i = self
                    .vars
                    .iter()
                    .position(|v| *v == name)
                    .ok_or(ParseError::UnknownVariable { pos, name })?;
                Ok(MultiPoly::var(self.nvars(), i))
            }
            Some(Tok::Int(n)) => {
                self.bump();
                let value = if matches!(self.peek(), Some(Tok::Slash))
                    && matches!(self.peek_at(1), Some(Tok::Int(_)))
                {
                    self.bump();
                    let dpos = self.pos();
                    let Some(Tok::Int(d)) = self.bump() else {
                        unreachable!()
                    };
                    if d.is_zero() {
                        return Err(ParseError::ZeroDenominator { pos: dpos });
                    }
                    BigRational::new(n, d)
                } else {
                    BigRational::from_integer(n)
                };
                Ok(MultiPoly::constant(self.nvars(), value))
            }
            Some(Tok::LParen) => {
                self.bump();
                let e = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(ParseError::Syntax {
                        pos: self
                            .toks
                            .get(self.idx - 1)
                            .map(|(p, _)| *p)
                            .unwrap_or(self.end),
                        msg: "expected ')'".into(),
                    }),
                }
            }
            Some(_) => self.err("expected variable, number or '('"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses `text` over the ordered variable names `vars`.
pub fn parse_expression(text: &str, vars: &[String]) -> Result<ParsedExpr, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        idx: 0,
        vars,
        end: text.len(),
    };
    let num = p.expr()?;
    match p.peek() {
        None => Ok(ParsedExpr::Poly(num)),
        Some(Tok::Slash) => {
            p.bump();
            let dpos = p.pos();
            let den = p.expr()?;
            if p.peek().is_some() {
                return p.err("unexpected token after denominator");
            }
            if den.is_zero() {
                return Err(ParseError::ZeroDenominator { pos: dpos });
            }
            Ok(ParsedExpr::Rational(
                RationalFunction::new(num, den).expect("nonzero denominator"),
            ))
        }
        Some(_) => p.err("unexpected token"),
    }
}

fn format_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn format_monomial(m: &Monomial, names: &[String]) -> String {
    m.0.iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| {
            if e == 1 {
                names[i].clone()
            } else {
                format!("{}^{}", names[i], e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

pub(crate) fn format_poly(p: &MultiPoly, names: &[String]) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().iter().rev().enumerate() {
        let neg = c.is_negative();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let a = c.abs();
        if m.is_one() {
            out.push_str(&format_rational(&a));
        } else {
            if !a.is_one() {
                out.push_str(&format_rational(&a));
                out.push('*');
            }
            out.push_str(&format_monomial(m, names));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn single_monomial() {
        let p = parse_expression("x1^2", &names(&["x1", "x2"]))
            .unwrap()
            .into_poly()
            .unwrap();
        assert_eq!(p, MultiPoly::term(2, Monomial(vec![2, 0]), q(1)));
    }

    #[test]
    fn sum_of_terms() {
        let p = parse_expression("x1*x2 + 1", &names(&["x1", "x2"]))
            .unwrap()
            .into_poly()
            .unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.coeff(&Monomial(vec![1, 1])), q(1));
        assert_eq!(p.coeff(&Monomial(vec![0, 0])), q(1));
    }

    #[test]
    fn top_level_division_gives_rational_function() {
        let v = names(&["x1"]);
        let r = match parse_expression("(x1^2-1)/(x1)", &v).unwrap() {
            ParsedExpr::Rational(r) => r,
            other => panic!("expected rational function, got {other:?}"),
        };
        let num = parse_expression("x1^2 - 1", &v)
            .unwrap()
            .into_poly()
            .unwrap();
        assert_eq!(r.numerator(), &num);
        assert_eq!(r.denominator(), &MultiPoly::var(1, 0));
    }

    #[test]
    fn rational_literals_and_unary_minus() {
        let v = names(&["x", "y"]);
        let p = parse_expression("-3/2*x + -x^2", &v)
            .unwrap()
            .into_poly()
            .unwrap();
        assert_eq!(
            p.coeff(&Monomial(vec![1, 0])),
            BigRational::new((-3).into(), 2.into())
        );
        assert_eq!(p.coeff(&Monomial(vec![2, 0])), q(-1));
        let p = parse_expression("(-x)^2", &v).unwrap().into_poly().unwrap();
        assert_eq!(p.coeff(&Monomial(vec![2, 0])), q(1));
    }

    #[test]
    fn errors_carry_positions() {
        let v = names(&["x1", "x2"]);
        assert_eq!(
            parse_expression("x1 + z", &v),
            Err(ParseError::UnknownVariable {
                pos: 5,
                name: "z".into()
            })
        );
        assert!(matches!(
            parse_expression("x1 + * x2", &v),
            Err(ParseError::Syntax { pos: 5, .. })
        ));
        assert!(matches!(
            parse_expression("x1/(x2 - x2)", &v),
            Err(ParseError::ZeroDenominator { .. })
        ));
        assert!(matches!(
            parse_expression("3/0", &v),
            Err(ParseError::ZeroDenominator { pos: 2 })
        ));
        assert!(matches!(
            parse_expression("(x1", &v),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_expression("x1 # 2", &v),
            Err(ParseError::Syntax { pos: 3, .. })
        ));
    }

    #[test]
    fn whitespace_is_insignificant() {
        let v = names(&["x1", "x2"]);
        let a = parse_expression("x1 * x2 +1", &v).unwrap();
        let b = parse_expression("x1*x2+1", &v).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn serializer_output() {
        let v = names(&["x1", "x2"]);
        let p = parse_expression("1 - x1^2*3/2 + x2", &v)
            .unwrap()
            .into_poly()
            .unwrap();
        assert_eq!(p.to_expr_string(&v), "-3/2*x1^2 + x2 + 1");
    }

    fn arb_poly() -> impl Strategy<Value = MultiPoly> {
        prop::collection::vec(
            (prop::collection::vec(0u64..4, 3), -20i64..20, 1i64..6),
            0..8,
        )
        .prop_map(|terms| {
            MultiPoly::from_terms(
                3,
                terms
                    .into_iter()
                    .map(|(e, n, d)| (e, BigRational::new(n.into(), d.into()))),
            )
        })
    }

    proptest! {
        #[test]
        fn parse_serialize_roundtrip(p in arb_poly()) {
            let v = names(&["x1", "x2", "x3"]);
            let text = p.to_expr_string(&v);
            let back = parse_expression(&text, &v).unwrap().into_poly().unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
