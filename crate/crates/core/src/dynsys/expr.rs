use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply(self, v: f64) -> Result<f64, EvalError> {
        match self {
            Func::Sin => Ok(v.sin()),
            Func::Cos => Ok(v.cos()),
            Func::Tan => Ok(v.tan()),
            Func::Exp => Ok(v.exp()),
            Func::Ln if v <= 0.0 => Err(EvalError::Domain {
                op: "ln",
                detail: format!("argument {v} is not positive"),
            }),
            Func::Ln => Ok(v.ln()),
            Func::Sqrt if v < 0.0 => Err(EvalError::Domain {
                op: "sqrt",
                detail: format!("argument {v} is negative"),
            }),
            Func::Sqrt => Ok(v.sqrt()),
            Func::Abs => Ok(v.abs()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
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

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{op}: {detail}")]
    Domain { op: &'static str, detail: String },
    #[error("result is not finite ({0})")]
    NonFinite(f64),
    #[error("variable x{index} is not defined for a point of dimension {dimension}")]
    MissingVariable { index: usize, dimension: usize },
}

/// Expression tree for one component of a vector field.
///
/// Variables are zero-based internally and print as `x1..xn`.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(e: Expr) -> Expr {
        Expr::Neg(Box::new(e))
    }

    /// Largest zero-based variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Num(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(e) | Expr::Call(_, e) => e.max_var(),
            Expr::Binary(_, a, b) => match (a.max_var(), b.max_var()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
        }
    }

    /// Evaluates at `x`. Any non-finite intermediate is a domain error.
    pub fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => *x.get(*i).ok_or(EvalError::MissingVariable {
                index: i + 1,
                dimension: x.len(),
            })?,
            Expr::Neg(e) => -e.eval(x)?,
            Expr::Call(f, e) => f.apply(e.eval(x)?)?,
            Expr::Binary(op, a, b) => {
                let a = a.eval(x)?;
                let b = b.eval(x)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div if b == 0.0 => {
                        return Err(EvalError::Domain {
                            op: "/",
                            detail: format!("division of {a} by zero"),
                        })
                    }
                    BinOp::Div => a / b,
                    BinOp::Pow if a < 0.0 && b.fract() != 0.0 => {
                        return Err(EvalError::Domain {
                            op: "^",
                            detail: format!("negative base {a} with non-integer exponent {b}"),
                        })
                    }
                    BinOp::Pow => a.powf(b),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite(v))
        }
    }
}

/// Fully parenthesised text that parses back to an equivalent tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => {
                write!(f, "(-{})", -v)
            }
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
        }
    }
}
