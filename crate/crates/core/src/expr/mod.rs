//! Expression language for initial data and curve families.
//!
//! Expressions are parsed once and evaluated either over plain `f64` or over
//! dual numbers, which gives exact first partials with respect to one seed
//! variable. [`Program`] is a compiled form with variables resolved to slots,
//! used in the hot loops of the solver.

mod dual;
mod parse;
mod program;

pub use dual::{Dual, Scalar};
pub use parse::ParseError;
pub use program::Program;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// A domain violation met during evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Fault {
    #[error("division by zero")]
    DivisionByZero,
    #[error("logarithm of a non-positive number")]
    LogNonPositive,
    #[error("square root of a negative number")]
    SqrtNegative,
    #[error("non-integer power of a negative number")]
    NegativeBasePower,
    #[error("derivative undefined at this point")]
    Derivative,
    #[error("result is not finite")]
    Overflow,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("variable `{0}` is not bound")]
    Unbound(String),
    #[error("domain fault: {0}")]
    Domain(#[from] Fault),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl Op {
    fn symbol(self) -> &'static str {
        match self {
            Op::Add => "+",
            Op::Sub => "-",
            Op::Mul => "*",
            Op::Div => "/",
            Op::Pow => "^",
        }
    }

    fn apply<S: Scalar>(self, l: S, r: S) -> Result<S, Fault> {
        match self {
            Op::Add => Ok(l.add(r)),
            Op::Sub => Ok(l.sub(r)),
            Op::Mul => Ok(l.mul(r)),
            Op::Div => l.div(r),
            Op::Pow => l.pow(r),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
    Tan,
    Atan,
    Abs,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "atan" => Func::Atan,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Atan => "atan",
            Func::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

impl Constant {
    fn value(self) -> f64 {
        match self {
            Constant::Pi => std::f64::consts::PI,
            Constant::E => std::f64::consts::E,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Const(Constant),
    Var(String),
    Neg(Box<Node>),
    Bin(Op, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

impl Node {
    fn eval<S: Scalar>(&self, lookup: &impl Fn(&str) -> Option<S>) -> Result<S, ExprError> {
        Ok(match self {
            Node::Num(v) => S::constant(*v),
            Node::Const(c) => S::constant(c.value()),
            Node::Var(name) => lookup(name).ok_or_else(|| ExprError::Unbound(name.clone()))?,
            Node::Neg(a) => a.eval(lookup)?.neg(),
            Node::Bin(op, l, r) => op.apply(l.eval(lookup)?, r.eval(lookup)?)?,
            Node::Call(f, a) => a.eval(lookup)?.apply(*f)?,
        })
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Node::Var(name) => {
                out.insert(name);
            }
            Node::Neg(a) | Node::Call(_, a) => a.collect_vars(out),
            Node::Bin(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Node::Num(_) | Node::Const(_) => {}
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Num(v) if v.is_sign_negative() => write!(f, "(-{:?})", -v),
            Node::Num(v) => write!(f, "{v:?}"),
            Node::Const(Constant::Pi) => f.write_str("pi"),
            Node::Const(Constant::E) => f.write_str("e"),
            Node::Var(name) => f.write_str(name),
            Node::Neg(a) => write!(f, "(-{a})"),
            Node::Bin(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// Variable assignments used by [`Expression::eval`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Bindings(BTreeMap<String, f64>);

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, name: &str, value: f64) -> &mut Self {
        self.0.insert(name.to_string(), value);
        self
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl<'a> FromIterator<(&'a str, f64)> for Bindings {
    fn from_iter<I: IntoIterator<Item = (&'a str, f64)>>(iter: I) -> Self {
        Bindings(iter.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }
}

/// A parsed expression.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Node,
}

impl Expression {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        Ok(Self {
            root: parse::parse(text)?,
        })
    }

    pub fn from_node(root: Node) -> Self {
        Self { root }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Names of all variables referenced, sorted.
    pub fn variables(&self) -> Vec<String> {
        let mut set = BTreeSet::new();
        self.root.collect_vars(&mut set);
        set.into_iter().map(str::to_string).collect()
    }

    pub fn eval(&self, b: &Bindings) -> Result<f64, ExprError> {
        self.root.eval(&|name| b.get(name))
    }

    /// Value and exact partial derivative with respect to `seed`.
    pub fn eval_dual(&self, b: &Bindings, seed: &str) -> Result<(f64, f64), ExprError> {
        if b.get(seed).is_none() {
            return Err(ExprError::Unbound(seed.to_string()));
        }
        let d = self.root.eval(&|name| {
            b.get(name)
                .map(|v| Dual::new(v, if name == seed { 1.0 } else { 0.0 }))
        })?;
        Ok((d.v, d.d))
    }

    /// Compiles against an ordered list of variable names. Every referenced
    /// variable must appear in `vars`; its index becomes the argument slot.
    pub fn compile(&self, vars: &[&str]) -> Result<Program, ExprError> {
        Program::compile(&self.root, vars)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

impl std::str::FromStr for Expression {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Expression::parse(s)
    }
}

impl Serialize for Expression {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Expression {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Expression::parse(&text).map_err(serde::de::Error::custom)
    }
}
