//! Ground-truth target expressions.
//!
//! Targets use a richer grammar than the search alphabet (`sqrt`, `sinh`,
//! `cosh`, `^`, unary minus) so that datasets are generated from the exact
//! formula. [`TargetExpr::to_tree`] rewrites a target into the search
//! alphabet where that is possible.

use std::fmt;

use crate::expr::{ExprError, ExprTree, Token};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
}

impl Func {
    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
            Func::Log => v.ln(),
            Func::Sqrt => v.sqrt(),
            Func::Sinh => v.sinh(),
            Func::Cosh => v.cosh(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TargetExpr {
    Num(f64),
    Var(usize),
    Neg(Box<TargetExpr>),
    Call(Func, Box<TargetExpr>),
    Bin(BinOp, Box<TargetExpr>, Box<TargetExpr>),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("cannot parse target {input:?} at byte {at}: {message}")]
pub struct TargetParseError {
    pub input: String,
    pub at: usize,
    pub message: String,
}

impl TargetExpr {
    /// Parses infix notation. Variables are `x`, `y` (inputs 0 and 1) or
    /// `x0`, `x1`, ...; `^` binds tighter than unary minus and is
    /// right-associative.
    pub fn parse(input: &str) -> Result<TargetExpr, TargetParseError> {
        let mut p = Parser { src: input, pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != input.len() {
            return Err(p.error("trailing input"));
        }
        Ok(e)
    }

    /// Evaluates at one input point.
    pub fn eval(&self, point: &[f64]) -> f64 {
        match self {
            TargetExpr::Num(v) => *v,
            TargetExpr::Var(i) => point[*i],
            TargetExpr::Neg(a) => -a.eval(point),
            TargetExpr::Call(f, a) => f.apply(a.eval(point)),
            TargetExpr::Bin(op, a, b) => {
                let x = a.eval(point);
                match (op, &**b) {
                    (BinOp::Pow, TargetExpr::Num(n)) if n.fract() == 0.0 && n.abs() <= 64.0 => {
                        x.powi(*n as i32)
                    }
                    _ => {
                        let y = b.eval(point);
                        match op {
                            BinOp::Add => x + y,
                            BinOp::Sub => x - y,
                            BinOp::Mul => x * y,
                            BinOp::Div => x / y,
                            BinOp::Pow => x.powf(y),
                        }
                    }
                }
            }
        }
    }

    /// Number of input variables referenced (highest index + 1).
    pub fn arity(&self) -> usize {
        match self {
            TargetExpr::Num(_) => 0,
            TargetExpr::Var(i) => i + 1,
            TargetExpr::Neg(a) | TargetExpr::Call(_, a) => a.arity(),
            TargetExpr::Bin(_, a, b) => a.arity().max(b.arity()),
        }
    }

    /// Rewrites into the search alphabet with bound constants: integer powers
    /// become products, other powers `exp(p * log(x))`, `sqrt` a half power,
    /// `sinh`/`cosh` their exponential forms and `-a` becomes `0 - a`.
    pub fn to_tree(&self) -> Result<ExprTree, ExprError> {
        let mut tokens = Vec::new();
        let mut constants = Vec::new();
        self.emit(&mut tokens, &mut constants);
        ExprTree::from_tokens(&tokens, constants)
    }

    fn emit(&self, tokens: &mut Vec<Token>, constants: &mut Vec<f64>) {
        fn num(tokens: &mut Vec<Token>, constants: &mut Vec<f64>, v: f64) {
            tokens.push(Token::Const);
            constants.push(v);
        }
        match self {
            TargetExpr::Num(v) => num(tokens, constants, *v),
            TargetExpr::Var(i) => tokens.push(Token::Var(*i as u8)),
            TargetExpr::Neg(a) => {
                tokens.push(Token::Sub);
                num(tokens, constants, 0.0);
                a.emit(tokens, constants);
            }
            TargetExpr::Call(f, a) => match f {
                Func::Sin | Func::Cos | Func::Exp | Func::Log => {
                    tokens.push(match f {
                        Func::Sin => Token::Sin,
                        Func::Cos => Token::Cos,
                        Func::Exp => Token::Exp,
                        _ => Token::Log,
                    });
                    a.emit(tokens, constants);
                }
                Func::Sqrt => {
                    let half = TargetExpr::Bin(BinOp::Pow, a.clone(), Box::new(TargetExpr::Num(0.5)));
                    half.emit(tokens, constants);
                }
                Func::Sinh | Func::Cosh => {
                    // (exp(a) -/+ exp(0 - a)) / 2
                    tokens.push(Token::Div);
                    tokens.push(if *f == Func::Sinh { Token::Sub } else { Token::Add });
                    tokens.push(Token::Exp);
                    a.emit(tokens, constants);
                    tokens.push(Token::Exp);
                    TargetExpr::Neg(a.clone()).emit(tokens, constants);
                    num(tokens, constants, 2.0);
                }
            },
            TargetExpr::Bin(BinOp::Pow, a, b) => match **b {
                TargetExpr::Num(n) if n.fract() == 0.0 && (1.0..=16.0).contains(&n) => {
                    for _ in 1..n as usize {
                        tokens.push(Token::Mul);
                    }
                    for _ in 0..n as usize {
                        a.emit(tokens, constants);
                    }
                }
                _ => {
                    tokens.push(Token::Exp);
                    tokens.push(Token::Mul);
                    b.emit(tokens, constants);
                    tokens.push(Token::Log);
                    a.emit(tokens, constants);
                }
            },
            TargetExpr::Bin(op, a, b) => {
                tokens.push(match op {
                    BinOp::Add => Token::Add,
                    BinOp::Sub => Token::Sub,
                    BinOp::Mul => Token::Mul,
                    _ => Token::Div,
                });
                a.emit(tokens, constants);
                b.emit(tokens, constants);
            }
        }
    }
}

impl fmt::Display for TargetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetExpr::Num(v) => write!(f, "{v}"),
            TargetExpr::Var(i) => write!(f, "x{i}"),
            TargetExpr::Neg(a) => write!(f, "(-{a})"),
            TargetExpr::Call(func, a) => write!(f, "{}({a})", func.name()),
            TargetExpr::Bin(op, a, b) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({a} {sym} {b})")
            }
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> TargetParseError {
        TargetParseError {
            input: self.src.to_string(),
            at: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<TargetExpr, TargetParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            lhs = TargetExpr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<TargetExpr, TargetParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            lhs = TargetExpr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<TargetExpr, TargetParseError> {
        if self.eat('-') {
            return Ok(TargetExpr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<TargetExpr, TargetParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(TargetExpr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<TargetExpr, TargetParseError> {
        self.skip_ws();
        if self.eat('(') {
            let e = self.expr()?;
            if !self.eat(')') {
                return Err(self.error("expected ')'"));
            }
            return Ok(e);
        }
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' => {
                while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
                    self.pos += 1;
                }
                self.src[start..self.pos]
                    .parse()
                    .map(TargetExpr::Num)
                    .map_err(|_| self.error("bad number"))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
                    self.pos += 1;
                }
                let word = &self.src[start..self.pos];
                if let Some(f) = Func::from_name(word) {
                    if !self.eat('(') {
                        return Err(self.error("expected '(' after function name"));
                    }
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return Err(self.error("expected ')'"));
                    }
                    return Ok(TargetExpr::Call(f, Box::new(arg)));
                }
                match word {
                    "x" => Ok(TargetExpr::Var(0)),
                    "y" => Ok(TargetExpr::Var(1)),
                    _ => match word.strip_prefix('x').map(str::parse::<usize>) {
                        Some(Ok(i)) => Ok(TargetExpr::Var(i)),
                        _ => Err(self.error("unknown identifier")),
                    },
                }
            }
            _ => Err(self.error("unexpected character")),
        }
    }
}
