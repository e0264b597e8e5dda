use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ExprError;

/// One symbol of the expression alphabet.
///
/// Constant placeholders carry no slot id of their own: the i-th `Const` in
/// pre-order binds to the i-th entry of the tree's constant vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Token {
    Add,
    Sub,
    Mul,
    Div,
    Sin,
    Cos,
    Exp,
    Log,
    Var(u8),
    Const,
}

impl Token {
    pub const BINARY: [Token; 4] = [Token::Add, Token::Sub, Token::Mul, Token::Div];
    pub const UNARY: [Token; 4] = [Token::Sin, Token::Cos, Token::Exp, Token::Log];

    #[inline]
    pub fn arity(self) -> usize {
        match self {
            Token::Add | Token::Sub | Token::Mul | Token::Div => 2,
            Token::Sin | Token::Cos | Token::Exp | Token::Log => 1,
            Token::Var(_) | Token::Const => 0,
        }
    }

    #[inline]
    pub fn is_terminal(self) -> bool {
        self.arity() == 0
    }

    #[inline]
    pub fn is_trig(self) -> bool {
        matches!(self, Token::Sin | Token::Cos)
    }

    /// `exp` and `log` undo each other.
    #[inline]
    pub fn is_inverse_of(self, other: Token) -> bool {
        matches!(
            (self, other),
            (Token::Exp, Token::Log) | (Token::Log, Token::Exp)
        )
    }

    pub fn symbol(self) -> String {
        match self {
            Token::Add => "+".into(),
            Token::Sub => "-".into(),
            Token::Mul => "*".into(),
            Token::Div => "/".into(),
            Token::Sin => "sin".into(),
            Token::Cos => "cos".into(),
            Token::Exp => "exp".into(),
            Token::Log => "log".into(),
            Token::Var(i) => format!("x{i}"),
            Token::Const => "c".into(),
        }
    }

    #[inline]
    pub fn apply_unary(self, v: f64) -> f64 {
        match self {
            Token::Sin => v.sin(),
            Token::Cos => v.cos(),
            Token::Exp => v.exp(),
            Token::Log => v.ln(),
            _ => unreachable!("{self:?} is not unary"),
        }
    }

    #[inline]
    pub fn apply_binary(self, a: f64, b: f64) -> f64 {
        match self {
            Token::Add => a + b,
            Token::Sub => a - b,
            Token::Mul => a * b,
            Token::Div => a / b,
            _ => unreachable!("{self:?} is not binary"),
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbol())
    }
}

impl FromStr for Token {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "+" => Token::Add,
            "-" => Token::Sub,
            "*" => Token::Mul,
            "/" => Token::Div,
            "sin" => Token::Sin,
            "cos" => Token::Cos,
            "exp" => Token::Exp,
            "log" => Token::Log,
            "c" => Token::Const,
            _ => match s.strip_prefix('x').map(str::parse::<u8>) {
                Some(Ok(i)) => Token::Var(i),
                _ => return Err(ExprError::UnknownToken(s.to_string())),
            },
        })
    }
}

impl Serialize for Token {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.symbol())
    }
}

impl<'de> Deserialize<'de> for Token {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a whitespace-separated token list such as `"* + x0 x1 sin x0"`.
pub fn parse_tokens(s: &str) -> Result<Vec<Token>, ExprError> {
    s.split_whitespace().map(str::parse).collect()
}

/// The full search alphabet for `n_vars` inputs.
pub fn alphabet(n_vars: usize, with_constants: bool) -> Vec<Token> {
    let mut out: Vec<Token> = Token::BINARY.iter().chain(&Token::UNARY).copied().collect();
    out.extend((0..n_vars).map(|i| Token::Var(i as u8)));
    if with_constants {
        out.push(Token::Const);
    }
    out
}
