//! A small arithmetic language for right-hand sides `f(t, x)`.
//!
//! Variables are `t` and `x`; operators `+ - * / ^` and unary minus; the
//! functions `sin cos exp log abs sqrt`. A negative base with a non-integer
//! exponent is a domain error rather than a silent choice of branch, so
//! `x^{4/3}` for possibly negative `x` must be written `(x^4)^(1/3)`.

mod lexer;
mod parser;

use std::fmt;

pub use lexer::{tokenize, Token, TokenKind};
pub use parser::parse;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("empty expression")]
    Empty,
    #[error("unexpected character {ch:?} at offset {offset}")]
    Lex { offset: usize, ch: char },
    #[error("malformed number {text:?} at offset {offset}")]
    BadNumber { offset: usize, text: String },
    #[error("syntax error at offset {offset}: found {found}, expected one of {}", expected.join(", "))]
    Syntax {
        offset: usize,
        found: String,
        expected: Vec<String>,
    },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdent { offset: usize, name: String },
    #[error("domain error in `{expr}`: {reason}")]
    Eval { expr: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Abs,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 6] = [
        Func::Sin,
        Func::Cos,
        Func::Exp,
        Func::Log,
        Func::Abs,
        Func::Sqrt,
    ];

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
        }
    }
}

/// Expression tree. Literals produced by the parser are never negative;
/// negation is always an explicit [`Expr::Neg`].
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    T,
    X,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

pub fn parse_str(src: &str) -> Result<Expr, ExprError> {
    parse(&tokenize(src)?)
}

pub fn eval(e: &Expr, t: f64, x: f64) -> Result<f64, ExprError> {
    e.eval(t, x)
}

impl Expr {
    pub fn eval(&self, t: f64, x: f64) -> Result<f64, ExprError> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::T => t,
            Expr::X => x,
            Expr::Neg(inner) => -inner.eval(t, x)?,
            Expr::Binary(op, l, r) => {
                let a = l.eval(t, x)?;
                let b = r.eval(t, x)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => {
                        if a < 0.0 && b.fract() != 0.0 {
                            return Err(self.domain(format!(
                                "negative base {a} with non-integer exponent {b}"
                            )));
                        }
                        if a == 0.0 && b < 0.0 {
                            return Err(self.domain(format!("0 raised to negative power {b}")));
                        }
                        a.powf(b)
                    }
                }
            }
            Expr::Call(func, arg) => {
                let a = arg.eval(t, x)?;
                match func {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Abs => a.abs(),
                    Func::Log => {
                        if a <= 0.0 {
                            return Err(self.domain(format!("log of non-positive {a}")));
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(self.domain(format!("sqrt of negative {a}")));
                        }
                        a.sqrt()
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.domain(format!("non-finite result {v}")))
        }
    }

    fn domain(&self, reason: String) -> ExprError {
        ExprError::Eval {
            expr: self.to_string(),
            reason,
        }
    }

    /// True if `x` appears anywhere in the tree.
    pub fn depends_on_x(&self) -> bool {
        match self {
            Expr::X => true,
            Expr::Num(_) | Expr::T => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.depends_on_x(),
            Expr::Binary(_, l, r) => l.depends_on_x() || r.depends_on_x(),
        }
    }

    /// True if neither `t` nor `x` appears.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::T | Expr::X => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.is_constant(),
            Expr::Binary(_, l, r) => l.is_constant() && r.is_constant(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Binary(BinOp::Pow, ..) => 4,
            Expr::Num(_) | Expr::T | Expr::X | Expr::Call(..) => 5,
        }
    }

    /// Rendering with every compound subexpression parenthesized.
    pub fn to_string_full(&self) -> String {
        match self {
            Expr::Num(v) => v.to_string(),
            Expr::T => "t".into(),
            Expr::X => "x".into(),
            Expr::Neg(e) => format!("(-{})", e.to_string_full()),
            Expr::Binary(op, l, r) => format!(
                "({} {} {})",
                l.to_string_full(),
                op.symbol(),
                r.to_string_full()
            ),
            Expr::Call(f, e) => format!("{}({})", f.name(), e.to_string_full()),
        }
    }
}

struct Child<'a>(&'a Expr, u8);

impl fmt::Display for Child<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.precedence() < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Minimal-parenthesis rendering that parses back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::T => f.write_str("t"),
            Expr::X => f.write_str("x"),
            Expr::Neg(e) => write!(f, "-{}", Child(e, 3)),
            Expr::Binary(op @ (BinOp::Add | BinOp::Sub), l, r) => {
                write!(f, "{} {} {}", Child(l, 1), op.symbol(), Child(r, 2))
            }
            Expr::Binary(op @ (BinOp::Mul | BinOp::Div), l, r) => {
                write!(f, "{}{}{}", Child(l, 2), op.symbol(), Child(r, 3))
            }
            Expr::Binary(BinOp::Pow, l, r) => write!(f, "{}^{}", Child(l, 5), Child(r, 3)),
            Expr::Call(func, e) => write!(f, "{}({})", func.name(), e),
        }
    }
}
