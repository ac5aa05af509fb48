//! Matrix-entry expressions.
//!
//! ```text
//! expr   := term { ("+"|"-") term }
//! term   := unary { ("*"|"/") unary }
//! unary  := "-" unary | factor
//! factor := base [ "^" ["-"] integer ]
//! base   := number | "i" | "gamma" | "sigma" | "lambda" digits | "u" digits
//!         | "(" expr ")" | "exp" "(" expr ")"
//! ```
//!
//! `lambdaK` is the K-th Cartan coordinate and `uK` the spectral value of
//! the K-th leg of the matrix the expression belongs to (both 1-based).

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::C64;

/// Denominators at or below this modulus are reported as poles.
pub const POLE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    I,
    Gamma,
    Sigma,
    Lambda(usize),
    U(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Exp(Box<Expr>),
}

/// Values an expression is evaluated against.
#[derive(Debug, Clone, Copy)]
pub struct EvalContext<'a> {
    pub lambda: &'a [C64],
    /// Spectral values of the matrix's legs, in leg order. NaN marks unset.
    pub u: &'a [C64],
    pub gamma: C64,
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let tokens = tokenize(src)?;
        let mut p = Parser {
            tokens,
            pos: 0,
            len: src.len(),
        };
        let e = p.expr()?;
        if let Some(t) = p.peek() {
            return Err(p.error_at(t.pos, "operator or end of input", &t.kind.describe()));
        }
        Ok(e)
    }

    pub fn eval(&self, ctx: &EvalContext<'_>) -> Result<C64> {
        Ok(match self {
            Expr::Num(v) => C64::new(*v, 0.0),
            Expr::I => C64::new(0.0, 1.0),
            Expr::Gamma => ctx.gamma,
            Expr::Sigma => ctx.lambda.iter().sum(),
            Expr::Lambda(k) => *ctx.lambda.get(k - 1).ok_or_else(|| {
                Error::DimensionMismatch(format!("lambda{k} exceeds the rank {}", ctx.lambda.len()))
            })?,
            Expr::U(k) => match ctx.u.get(k - 1) {
                Some(v) if !v.re.is_nan() && !v.im.is_nan() => *v,
                _ => return Err(Error::MissingSpectral(*k)),
            },
            Expr::Neg(a) => -a.eval(ctx)?,
            Expr::Add(a, b) => a.eval(ctx)? + b.eval(ctx)?,
            Expr::Sub(a, b) => a.eval(ctx)? - b.eval(ctx)?,
            Expr::Mul(a, b) => a.eval(ctx)? * b.eval(ctx)?,
            Expr::Div(a, b) => {
                let den = b.eval(ctx)?;
                if den.norm() <= POLE_EPS {
                    return Err(Error::Pole(format!("denominator {self} vanishes")));
                }
                a.eval(ctx)? / den
            }
            Expr::Pow(a, k) => {
                let base = a.eval(ctx)?;
                if *k < 0 && base.norm() <= POLE_EPS {
                    return Err(Error::Pole(format!(
                        "negative power of a vanishing base in {self}"
                    )));
                }
                base.powi(*k)
            }
            Expr::Exp(a) => a.eval(ctx)?.exp(),
        })
    }

    /// Largest `lambdaK` index referenced (0 if none).
    pub fn max_lambda(&self) -> usize {
        self.fold_max(&|e| if let Expr::Lambda(k) = e { *k } else { 0 })
    }

    /// Largest `uK` index referenced (0 if none).
    pub fn max_u(&self) -> usize {
        self.fold_max(&|e| if let Expr::U(k) = e { *k } else { 0 })
    }

    /// True if the expression depends on the Cartan variables.
    pub fn is_dynamical(&self) -> bool {
        self.fold_max(&|e| usize::from(matches!(e, Expr::Lambda(_) | Expr::Sigma))) > 0
    }

    fn fold_max(&self, f: &dyn Fn(&Expr) -> usize) -> usize {
        let here = f(self);
        let below = match self {
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a) => a.fold_max(f),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.fold_max(f).max(b.fold_max(f))
            }
            _ => 0,
        };
        here.max(below)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::I => write!(f, "i"),
            Expr::Gamma => write!(f, "gamma"),
            Expr::Sigma => write!(f, "sigma"),
            Expr::Lambda(k) => write!(f, "lambda{k}"),
            Expr::U(k) => write!(f, "u{k}"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, k) => write!(f, "{}^{k}", Paren(a)),
            Expr::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

/// Wraps leaves that would otherwise bind wrongly under `^`.
struct Paren<'a>(&'a Expr);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Expr::Pow(..) => write!(f, "({})", self.0),
            e => write!(f, "{e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
    Num(f64),
    Ident(String),
    Op(char),
}

impl TokKind {
    fn describe(&self) -> String {
        match self {
            TokKind::Num(v) => format!("number {v}"),
            TokKind::Ident(s) => format!("identifier '{s}'"),
            TokKind::Op(c) => format!("'{c}'"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokKind,
    pos: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        if ch.is_ascii_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| Error::Parse {
                position: start,
                expected: "number".into(),
                found: format!("'{text}'"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    position: start,
                    expected: "finite number".into(),
                    found: format!("'{text}'"),
                });
            }
            out.push(Token {
                kind: TokKind::Num(v),
                pos: start,
            });
        } else if ch.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                i += 1;
            }
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Token {
                kind: TokKind::Ident(src[start..i].to_string()),
                pos: start,
            });
        } else if "+-*/^()".contains(ch) {
            out.push(Token {
                kind: TokKind::Op(ch),
                pos: i,
            });
            i += 1;
        } else {
            return Err(Error::Parse {
                position: i,
                expected: "number, identifier, operator or parenthesis".into(),
                found: format!("'{ch}'"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn error_at(&self, position: usize, expected: &str, found: &str) -> Error {
        Error::Parse {
            position,
            expected: expected.into(),
            found: found.into(),
        }
    }

    fn eof(&self, expected: &str) -> Error {
        self.error_at(self.len, expected, "end of input")
    }

    fn eat_op(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Token { kind: TokKind::Op(o), .. }) if *o == c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(Token {
                kind: TokKind::Op(o),
                ..
            }) if *o == c => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.error_at(t.pos, &format!("'{c}'"), &t.kind.describe())),
            None => Err(self.eof(&format!("'{c}'"))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_op('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_op('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat_op('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat_op('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_op('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if !self.eat_op('^') {
            return Ok(base);
        }
        let negative = self.eat_op('-');
        match self.peek().cloned() {
            Some(Token {
                kind: TokKind::Num(v),
                pos,
            }) => {
                if v.fract() != 0.0 || v > i32::MAX as f64 {
                    return Err(self.error_at(pos, "integer exponent", &format!("number {v}")));
                }
                self.pos += 1;
                let k = v as i32;
                Ok(Expr::Pow(Box::new(base), if negative { -k } else { k }))
            }
            Some(t) => Err(self.error_at(t.pos, "integer exponent", &t.kind.describe())),
            None => Err(self.eof("integer exponent")),
        }
    }

    fn base(&mut self) -> Result<Expr> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.eof("operand"));
        };
        self.pos += 1;
        match tok.kind {
            TokKind::Num(v) => Ok(Expr::Num(v)),
            TokKind::Op('(') => {
                let e = self.expr()?;
                self.expect_op(')')?;
                Ok(e)
            }
            TokKind::Ident(name) => match name.as_str() {
                "i" => Ok(Expr::I),
                "gamma" => Ok(Expr::Gamma),
                "sigma" => Ok(Expr::Sigma),
                "exp" => {
                    self.expect_op('(')?;
                    let e = self.expr()?;
                    self.expect_op(')')?;
                    Ok(Expr::Exp(Box::new(e)))
                }
                _ => indexed(&name).ok_or_else(|| {
                    self.error_at(
                        tok.pos,
                        "i, gamma, sigma, exp, lambdaK or uK",
                        &format!("identifier '{name}'"),
                    )
                }),
            },
            other => Err(self.error_at(tok.pos, "operand", &other.describe())),
        }
    }
}

fn indexed(name: &str) -> Option<Expr> {
    let split = name.find(|c: char| c.is_ascii_digit())?;
    let (head, digits) = name.split_at(split);
    let k: usize = digits.parse().ok().filter(|&k| k >= 1)?;
    match head {
        "lambda" => Some(Expr::Lambda(k)),
        "u" => Some(Expr::U(k)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn at(src: &str, lambda: &[C64], u: &[C64]) -> Result<C64> {
        Expr::parse(src)?.eval(&EvalContext {
            lambda,
            u,
            gamma: c(1.0, 0.0),
        })
    }

    #[test]
    fn lambda_plus_gamma() {
        let v = at("lambda1 + 2*gamma", &[c(3.0, 0.0), c(1.0, 0.0)], &[]).unwrap();
        assert_eq!(v, c(5.0, 0.0));
    }

    #[test]
    fn rational_and_pole() {
        let v = at("1/(u1-u2)", &[], &[c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(v, c(0.5, 0.0));
        let e = at("1/(u1-u2)", &[], &[c(2.0, 0.0), c(2.0, 0.0)]);
        assert!(matches!(e, Err(Error::Pole(_))));
    }

    #[test]
    fn exp_power() {
        let v = at("exp(sigma)^2", &[c(1.0, 0.0), c(1.0, 0.0)], &[]).unwrap();
        assert!((v - c(4f64.exp(), 0.0)).norm() < 1e-14 * 4f64.exp());
    }

    #[test]
    fn precedence_and_unary() {
        let v = at("-2^2 + 3*4 - 6/3", &[], &[]).unwrap();
        assert_eq!(v, c(6.0, 0.0));
        let v = at("2^-1", &[], &[]).unwrap();
        assert_eq!(v, c(0.5, 0.0));
        let v = at("(1+i)*(1-i)", &[], &[]).unwrap();
        assert_eq!(v, c(2.0, 0.0));
    }

    #[test]
    fn parse_errors_carry_position() {
        match Expr::parse("1 + foo") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 4),
            other => panic!("unexpected {other:?}"),
        }
        match Expr::parse("(1 + 2") {
            Err(Error::Parse {
                position, found, ..
            }) => {
                assert_eq!(position, 6);
                assert_eq!(found, "end of input");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(Expr::parse("2^1.5").is_err());
        assert!(Expr::parse("lambda0").is_err());
        assert!(Expr::parse("1 $ 2").is_err());
    }

    #[test]
    fn missing_spectral_slot() {
        assert!(matches!(
            at("u2", &[], &[c(1.0, 0.0)]),
            Err(Error::MissingSpectral(2))
        ));
    }

    #[test]
    fn printer_round_trips() {
        for src in [
            "-lambda1^2",
            "exp(-(u1 - u2))^-3",
            "1e-7*sigma/gamma",
            "(2^3)^2",
            "i - -i",
        ] {
            let e = Expr::parse(src).unwrap();
            assert_eq!(Expr::parse(&e.to_string()).unwrap(), e, "{src} -> {e}");
        }
    }

    #[test]
    fn index_scan() {
        let e = Expr::parse("lambda3 * u2 + exp(sigma)").unwrap();
        assert_eq!(e.max_lambda(), 3);
        assert_eq!(e.max_u(), 2);
        assert!(e.is_dynamical());
        assert!(!Expr::parse("u1 - u2").unwrap().is_dynamical());
    }
}
