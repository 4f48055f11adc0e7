//! Scalar expressions in chart coordinates `x1..xn`.
//!
//! Expressions are parsed once and evaluated many times, either for a plain
//! value or together with their exact gradient ([`DualValue`]). Constants are
//! stored as `f64` and converted to the evaluation scalar at use, so one
//! parsed chart can be evaluated in `f32` or `f64`.

mod dual;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

pub use dual::DualValue;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("variable x{index} at offset {offset} out of range for dimension {dimension}")]
    VariableOutOfRange {
        index: usize,
        dimension: usize,
        offset: usize,
    },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("expected a point of dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("domain error: {0}")]
    Domain(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

impl UnaryOp {
    fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Exp => "exp",
            UnaryOp::Ln => "ln",
            UnaryOp::Sqrt => "sqrt",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Expression tree node.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Const(f64),
    /// Zero-based coordinate index.
    Var(usize),
    Unary(UnaryOp, Box<Node>),
    Binary(BinaryOp, Box<Node>, Box<Node>),
    /// Power with a constant exponent.
    Pow(Box<Node>, f64),
}

/// A parsed expression bound to a chart dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    root: Node,
    dimension: usize,
}

/// Parses `source` over a chart of the given dimension.
pub fn parse(source: &str, dimension: usize) -> Result<Expr, ParseError> {
    let root = parse::Parser::new(source, dimension).parse()?;
    Ok(Expr { root, dimension })
}

impl Expr {
    pub fn constant(value: f64, dimension: usize) -> Self {
        Expr {
            root: Node::Const(value),
            dimension,
        }
    }

    /// Zero-based coordinate `index`.
    pub fn variable(index: usize, dimension: usize) -> Self {
        assert!(index < dimension, "variable index out of range");
        Expr {
            root: Node::Var(index),
            dimension,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Zero-based indices of the coordinates the expression depends on.
    pub fn variables(&self) -> BTreeSet<usize> {
        fn walk(node: &Node, out: &mut BTreeSet<usize>) {
            match node {
                Node::Const(_) => {}
                Node::Var(k) => {
                    out.insert(*k);
                }
                Node::Unary(_, a) | Node::Pow(a, _) => walk(a, out),
                Node::Binary(_, a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(&self.root, &mut out);
        out
    }

    /// True when the expression is a literal constant.
    pub fn as_constant(&self) -> Option<f64> {
        match self.root {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    fn check_point<T>(&self, point: &[T]) -> Result<(), EvalError> {
        if point.len() != self.dimension {
            return Err(EvalError::DimensionMismatch {
                expected: self.dimension,
                got: point.len(),
            });
        }
        Ok(())
    }

    /// Plain evaluation.
    pub fn eval<T: Real>(&self, point: &[T]) -> Result<T, EvalError> {
        self.check_point(point)?;
        let v = eval_value(&self.root, point)?;
        if !v.is_finite() {
            return Err(EvalError::Domain(format!("non-finite value in `{self}`")));
        }
        Ok(v)
    }

    /// Evaluation with exact first derivatives.
    pub fn eval_dual<T: Real>(&self, point: &[T]) -> Result<DualValue<T>, EvalError> {
        self.check_point(point)?;
        let v = eval_dual(&self.root, point)?;
        if !v.is_finite() {
            return Err(EvalError::Domain(format!("non-finite value in `{self}`")));
        }
        Ok(v)
    }
}

fn integer_exponent(e: f64) -> Option<i32> {
    (e.fract() == 0.0 && e.abs() <= i32::MAX as f64).then_some(e as i32)
}

fn check_pow<T: Real>(base: T, exponent: f64) -> Result<(), EvalError> {
    if base == T::zero() && exponent < 0.0 {
        return Err(EvalError::Domain("0 raised to a negative power".into()));
    }
    if base < T::zero() && integer_exponent(exponent).is_none() {
        return Err(EvalError::Domain(
            "negative base raised to a non-integer power".into(),
        ));
    }
    Ok(())
}

fn eval_value<T: Real>(node: &Node, point: &[T]) -> Result<T, EvalError> {
    Ok(match node {
        Node::Const(c) => T::lit(*c),
        Node::Var(k) => point[*k],
        Node::Unary(op, a) => {
            let a = eval_value(a, point)?;
            match op {
                UnaryOp::Neg => -a,
                UnaryOp::Sin => a.sin(),
                UnaryOp::Cos => a.cos(),
                UnaryOp::Exp => a.exp(),
                UnaryOp::Ln => {
                    if a <= T::zero() {
                        return Err(EvalError::Domain("ln of a non-positive value".into()));
                    }
                    a.ln()
                }
                UnaryOp::Sqrt => {
                    if a < T::zero() {
                        return Err(EvalError::Domain("sqrt of a negative value".into()));
                    }
                    a.sqrt()
                }
            }
        }
        Node::Binary(op, a, b) => {
            let a = eval_value(a, point)?;
            let b = eval_value(b, point)?;
            match op {
                BinaryOp::Add => a + b,
                BinaryOp::Sub => a - b,
                BinaryOp::Mul => a * b,
                BinaryOp::Div => {
                    if b == T::zero() {
                        return Err(EvalError::Domain("division by zero".into()));
                    }
                    a / b
                }
            }
        }
        Node::Pow(a, e) => {
            let a = eval_value(a, point)?;
            check_pow(a, *e)?;
            match integer_exponent(*e) {
                Some(k) => a.powi(k),
                None => a.powf(T::lit(*e)),
            }
        }
    })
}

fn eval_dual<T: Real>(node: &Node, point: &[T]) -> Result<DualValue<T>, EvalError> {
    let n = point.len();
    Ok(match node {
        Node::Const(c) => DualValue::constant(T::lit(*c), n),
        Node::Var(k) => DualValue::variable(point[*k], *k, n),
        Node::Unary(op, a) => {
            let a = eval_dual(a, point)?;
            match op {
                UnaryOp::Neg => -a,
                UnaryOp::Sin => a.sin(),
                UnaryOp::Cos => a.cos(),
                UnaryOp::Exp => a.exp(),
                UnaryOp::Ln => {
                    if a.value <= T::zero() {
                        return Err(EvalError::Domain("ln of a non-positive value".into()));
                    }
                    a.ln()
                }
                UnaryOp::Sqrt => {
                    // the derivative blows up at zero
                    if a.value <= T::zero() {
                        return Err(EvalError::Domain(
                            "sqrt of a non-positive value (derivative undefined)".into(),
                        ));
                    }
                    a.sqrt()
                }
            }
        }
        Node::Binary(op, a, b) => {
            let a = eval_dual(a, point)?;
            let b = eval_dual(b, point)?;
            match op {
                BinaryOp::Add => a + b,
                BinaryOp::Sub => a - b,
                BinaryOp::Mul => a * b,
                BinaryOp::Div => {
                    if b.value == T::zero() {
                        return Err(EvalError::Domain("division by zero".into()));
                    }
                    a / b
                }
            }
        }
        Node::Pow(a, e) => {
            let a = eval_dual(a, point)?;
            check_pow(a.value, *e)?;
            if a.value == T::zero() && *e > 0.0 && *e < 1.0 {
                return Err(EvalError::Domain(
                    "fractional power at zero (derivative undefined)".into(),
                ));
            }
            match integer_exponent(*e) {
                Some(k) => a.powi(k),
                None => a.powf(T::lit(*e)),
            }
        }
    })
}

// Printing ------------------------------------------------------------------

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(node: &Node) -> u8 {
    match node {
        Node::Const(c) if *c < 0.0 || c.is_sign_negative() => PREC_NEG,
        Node::Const(_) | Node::Var(_) => PREC_ATOM,
        Node::Unary(UnaryOp::Neg, _) => PREC_NEG,
        Node::Unary(..) => PREC_ATOM,
        Node::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => PREC_ADD,
        Node::Binary(..) => PREC_MUL,
        Node::Pow(..) => PREC_POW,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, node: &Node, min_prec: u8) -> fmt::Result {
    if precedence(node) < min_prec {
        write!(f, "(")?;
        write_node(f, node)?;
        write!(f, ")")
    } else {
        write_node(f, node)
    }
}

fn write_number(f: &mut fmt::Formatter<'_>, c: f64) -> fmt::Result {
    if c.is_sign_negative() {
        write!(f, "-{}", -c)
    } else {
        write!(f, "{c}")
    }
}

fn write_node(f: &mut fmt::Formatter<'_>, node: &Node) -> fmt::Result {
    match node {
        Node::Const(c) => write_number(f, *c),
        Node::Var(k) => write!(f, "x{}", k + 1),
        Node::Unary(UnaryOp::Neg, a) => {
            write!(f, "-")?;
            write_child(f, a, PREC_NEG)
        }
        Node::Unary(op, a) => {
            write!(f, "{}(", op.name())?;
            write_node(f, a)?;
            write!(f, ")")
        }
        Node::Binary(op, a, b) => {
            let (prec, sym) = match op {
                BinaryOp::Add => (PREC_ADD, " + "),
                BinaryOp::Sub => (PREC_ADD, " - "),
                BinaryOp::Mul => (PREC_MUL, "*"),
                BinaryOp::Div => (PREC_MUL, "/"),
            };
            write_child(f, a, prec)?;
            write!(f, "{sym}")?;
            // strict on the right keeps the tree shape under re-parsing
            write_child(f, b, prec + 1)
        }
        Node::Pow(a, e) => {
            write_child(f, a, PREC_ATOM)?;
            write!(f, "^")?;
            write_number(f, *e)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, &self.root)
    }
}

/// Serializes as source text.
impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
