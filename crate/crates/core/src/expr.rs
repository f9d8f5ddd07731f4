//! Tiny integer expression grammar used by the family catalog.
//!
//! Arithmetic expressions over the variables `m` and `n` with `+ - * ^ %`,
//! parentheses and `gcd(a, b)`; constraints are comparisons between two
//! expressions (`== != < <= > >=`). Evaluation is over i128 so intermediate
//! powers like 2^(2m+1) stay exact for every field degree we support.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExprError {
    #[error("syntax error at {0}: {1}")]
    Syntax(usize, String),
    #[error("unknown identifier {0:?}")]
    UnknownIdent(String),
    #[error("arithmetic overflow or invalid operand in {0:?}")]
    Arithmetic(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Const(i128),
    Var(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Mod(Box<Expr>, Box<Expr>),
    Gcd(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        };
        write!(f, "{s}")
    }
}

/// A constraint `lhs op rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub lhs: Expr,
    pub op: CmpOp,
    pub rhs: Expr,
}

/// Variable bindings for evaluation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Bindings {
    pub m: Option<i128>,
    pub n: Option<i128>,
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, ExprError> {
        let mut p = Parser::new(text);
        let e = p.expr()?;
        p.expect_end()?;
        Ok(e)
    }

    pub fn eval(&self, b: &Bindings) -> Result<i128, ExprError> {
        let arith = |s: &str| ExprError::Arithmetic(s.to_string());
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Var(name) => match name.as_str() {
                "m" => b.m.ok_or_else(|| ExprError::UnknownIdent("m".into())),
                "n" => b.n.ok_or_else(|| ExprError::UnknownIdent("n".into())),
                other => Err(ExprError::UnknownIdent(other.to_string())),
            },
            Expr::Add(l, r) => l.eval(b)?.checked_add(r.eval(b)?).ok_or_else(|| arith("+")),
            Expr::Sub(l, r) => l.eval(b)?.checked_sub(r.eval(b)?).ok_or_else(|| arith("-")),
            Expr::Mul(l, r) => l.eval(b)?.checked_mul(r.eval(b)?).ok_or_else(|| arith("*")),
            Expr::Pow(l, r) => {
                let base = l.eval(b)?;
                let e = r.eval(b)?;
                if !(0..=127).contains(&e) {
                    return Err(arith("^ exponent out of range"));
                }
                base.checked_pow(e as u32).ok_or_else(|| arith("^"))
            }
            Expr::Mod(l, r) => {
                let rv = r.eval(b)?;
                if rv <= 0 {
                    return Err(arith("% modulus must be positive"));
                }
                Ok(l.eval(b)?.rem_euclid(rv))
            }
            Expr::Gcd(l, r) => {
                let (mut a, mut c) = (l.eval(b)?.unsigned_abs(), r.eval(b)?.unsigned_abs());
                while c != 0 {
                    (a, c) = (c, a % c);
                }
                Ok(a as i128)
            }
        }
    }
}

impl Constraint {
    pub fn parse(text: &str) -> Result<Constraint, ExprError> {
        let mut p = Parser::new(text);
        let lhs = p.expr()?;
        let op = p.cmp_op()?;
        let rhs = p.expr()?;
        p.expect_end()?;
        Ok(Constraint { lhs, op, rhs })
    }

    pub fn holds(&self, b: &Bindings) -> Result<bool, ExprError> {
        let l = self.lhs.eval(b)?;
        let r = self.rhs.eval(b)?;
        Ok(match self.op {
            CmpOp::Eq => l == r,
            CmpOp::Ne => l != r,
            CmpOp::Lt => l < r,
            CmpOp::Le => l <= r,
            CmpOp::Gt => l > r,
            CmpOp::Ge => l >= r,
        })
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    text: &'a str,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
            text,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn err(&self, msg: &str) -> ExprError {
        ExprError::Syntax(self.pos, format!("{msg} in {:?}", self.text))
    }

    fn expect_end(&mut self) -> Result<(), ExprError> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(self.err(&format!("unexpected {c:?}"))),
        }
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut e = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.bump();
                    e = Expr::Add(Box::new(e), Box::new(self.term()?));
                }
                Some('-') => {
                    self.bump();
                    e = Expr::Sub(Box::new(e), Box::new(self.term()?));
                }
                _ => return Ok(e),
            }
        }
    }

    // term := factor (('*'|'%') factor)*   (juxtaposition like 3m also multiplies)
    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut e = self.factor()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.bump();
                    e = Expr::Mul(Box::new(e), Box::new(self.factor()?));
                }
                Some('%') => {
                    self.bump();
                    e = Expr::Mod(Box::new(e), Box::new(self.factor()?));
                }
                Some(c) if c.is_ascii_alphabetic() || c == '(' => {
                    e = Expr::Mul(Box::new(e), Box::new(self.factor()?));
                }
                _ => return Ok(e),
            }
        }
    }

    // factor := atom ('^' factor)?   (right associative)
    fn factor(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.bump();
            let e = self.factor()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(e)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some('(') => {
                self.bump();
                let e = self.expr()?;
                if self.bump() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let mut v: i128 = 0;
                while let Some(c) = self.chars.get(self.pos).copied() {
                    if !c.is_ascii_digit() {
                        break;
                    }
                    v = v * 10 + (c as i128 - '0' as i128);
                    self.pos += 1;
                }
                Ok(Expr::Const(v))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while let Some(c) = self.chars.get(self.pos).copied() {
                    if !c.is_ascii_alphanumeric() {
                        break;
                    }
                    self.pos += 1;
                }
                let ident: String = self.chars[start..self.pos].iter().collect();
                if ident == "gcd" {
                    if self.bump() != Some('(') {
                        return Err(self.err("expected '(' after gcd"));
                    }
                    let a = self.expr()?;
                    if self.bump() != Some(',') {
                        return Err(self.err("expected ',' in gcd"));
                    }
                    let b = self.expr()?;
                    if self.bump() != Some(')') {
                        return Err(self.err("expected ')' in gcd"));
                    }
                    return Ok(Expr::Gcd(Box::new(a), Box::new(b)));
                }
                Ok(Expr::Var(ident))
            }
            _ => Err(self.err("expected expression")),
        }
    }

    fn cmp_op(&mut self) -> Result<CmpOp, ExprError> {
        let c = self.bump().ok_or_else(|| self.err("expected comparison"))?;
        let next_eq = self.chars.get(self.pos) == Some(&'=');
        let op = match (c, next_eq) {
            ('=', true) => CmpOp::Eq,
            ('!', true) => CmpOp::Ne,
            ('<', true) => CmpOp::Le,
            ('>', true) => CmpOp::Ge,
            ('<', false) => return Ok(CmpOp::Lt),
            ('>', false) => return Ok(CmpOp::Gt),
            _ => return Err(self.err("expected comparison operator")),
        };
        self.pos += 1;
        Ok(op)
    }
}
