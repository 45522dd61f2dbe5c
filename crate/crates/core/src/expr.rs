//! Tiny closed-form field vocabulary for configs: numeric literals, `pi`,
//! coordinates `x1`/`x2`/`x3`, `+ - * / ^`, `sin`, `cos` and parentheses.
//!
//! Example: `"0.5*sin(2*pi*x1) + x2^2"`.

use crate::error::{Error, Result};
use crate::grid::MAX_DIM;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Coord(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser { src: src.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        Ok(e)
    }

    pub fn eval(&self, x: &[f64; MAX_DIM]) -> f64 {
        match self {
            Expr::Number(v) => *v,
            Expr::Coord(k) => x[*k],
            Expr::Neg(e) => -e.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(e, k) => e.eval(x).powi(*k),
            Expr::Sin(e) => e.eval(x).sin(),
            Expr::Cos(e) => e.eval(x).cos(),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> Error {
        Error::ConfigInvalid {
            path: "field expression".into(),
            message: format!("{message} at byte {}", self.pos),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat(b'-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
            } else if self.eat(b'/') {
                acc = Expr::Div(Box::new(acc), Box::new(self.factor()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let neg = self.eat(b'-');
            let digits = self.digits()?;
            let k: i32 = digits
                .parse()
                .map_err(|_| self.error("exponent must be a small integer"))?;
            return Ok(Expr::Pow(Box::new(base), if neg { -k } else { k }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let lit = self.number_literal()?;
                lit.parse::<f64>()
                    .map(Expr::Number)
                    .map_err(|_| self.error("bad numeric literal"))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.identifier();
                match name.as_str() {
                    "pi" => Ok(Expr::Number(std::f64::consts::PI)),
                    "x1" => Ok(Expr::Coord(0)),
                    "x2" => Ok(Expr::Coord(1)),
                    "x3" => Ok(Expr::Coord(2)),
                    "sin" | "cos" => {
                        if !self.eat(b'(') {
                            return Err(self.error("expected `(` after function name"));
                        }
                        let inner = self.expr()?;
                        if !self.eat(b')') {
                            return Err(self.error("expected `)`"));
                        }
                        Ok(if name == "sin" {
                            Expr::Sin(Box::new(inner))
                        } else {
                            Expr::Cos(Box::new(inner))
                        })
                    }
                    other => Err(self.error(&format!("unknown name `{other}`"))),
                }
            }
            _ => Err(self.error("expected a value")),
        }
    }

    fn identifier(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn digits(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected digits"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn number_literal(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_digit() || c == b'.' {
                self.pos += 1;
            } else if (c == b'e' || c == b'E')
                && self.pos + 1 < self.src.len()
                && (self.src[self.pos + 1].is_ascii_digit()
                    || self.src[self.pos + 1] == b'+'
                    || self.src[self.pos + 1] == b'-')
            {
                self.pos += 2;
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(self.error("expected a number"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(e: &Expr, x: f64, y: f64) -> f64 {
        e.eval(&[x, y, 0.0])
    }

    #[test]
    fn parses_and_evaluates() {
        let e = Expr::parse("0.5*sin(2*pi*x1) + x2^2").unwrap();
        let v = at(&e, 0.25, 3.0);
        assert!((v - (0.5 + 9.0)).abs() < 1e-14);
    }

    #[test]
    fn precedence_and_unary_minus() {
        let e = Expr::parse("-x1^2 + 2*3").unwrap();
        assert!((at(&e, 2.0, 0.0) - 2.0).abs() < 1e-14);
        let e = Expr::parse("(1 - x1)/2").unwrap();
        assert!((at(&e, 0.5, 0.0) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn negative_exponent() {
        let e = Expr::parse("x1^-2").unwrap();
        assert!((at(&e, 2.0, 0.0) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn rejects_garbage() {
        assert!(Expr::parse("x4").is_err());
        assert!(Expr::parse("sin 3").is_err());
        assert!(Expr::parse("1 +").is_err());
        assert!(Expr::parse("(1").is_err());
        assert!(Expr::parse("1 2").is_err());
    }
}
