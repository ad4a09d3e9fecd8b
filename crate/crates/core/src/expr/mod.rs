//! Complex-valued expressions in named real variables.
//!
//! Expressions are parsed once and then evaluated either for their value or
//! together with exact first partial derivatives (forward-mode dual numbers).
//! The grammar is documented in `docs/grammar.md`:
//!
//! ```text
//! expr     = term { ("+" | "-") term } ;
//! term     = unary { ("*" | "/") unary } ;
//! unary    = "-" unary | power ;
//! power    = atom [ "^" exponent ] ;
//! exponent = [ "-" ] integer [ "^" exponent ] ;
//! atom     = number | "i" | identifier | func "(" expr ")" | "(" expr ")" ;
//! func     = "exp" | "sin" | "cos" | "sqrt" ;
//! ```

mod dual;
mod eval;
mod lexer;
mod parser;

use std::fmt;

use num_complex::Complex64;

pub use dual::DualValue;

/// Built-in functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "exp" => Some(Func::Exp),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }
}

/// Expression tree. Variables are indices into the owning [`Expr`]'s
/// variable list.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    ImagUnit,
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, i32),
    Call(Func, Box<Node>),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("undeclared identifier {name} at position {pos}")]
    Undeclared { name: String, pos: usize },
    #[error("invalid variable list: {0}")]
    Variables(String),
    #[error("empty expression")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("sqrt requires a positive real argument, got {re}{im:+}i")]
    SqrtDomain { re: f64, im: f64 },
    #[error("expected {expected} coordinates, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("variable index {0} out of range")]
    Index(usize),
}

/// A parsed expression together with its declared variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Node,
    variables: Vec<String>,
}

pub const RESERVED: [&str; 5] = ["i", "exp", "sin", "cos", "sqrt"];

/// Parse `source` as an expression over the ordered `variables`.
pub fn parse<S: AsRef<str>>(source: &str, variables: &[S]) -> Result<Expr, ParseError> {
    Expr::parse(source, variables)
}

impl Expr {
    pub fn parse<S: AsRef<str>>(source: &str, variables: &[S]) -> Result<Expr, ParseError> {
        let variables: Vec<String> = variables.iter().map(|v| v.as_ref().to_string()).collect();
        for (k, v) in variables.iter().enumerate() {
            if v.is_empty() || !v.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(ParseError::Variables(format!("'{v}' is not an identifier")));
            }
            if v.chars().next().is_some_and(|c| c.is_ascii_digit()) {
                return Err(ParseError::Variables(format!("'{v}' is not an identifier")));
            }
            if RESERVED.contains(&v.as_str()) {
                return Err(ParseError::Variables(format!("'{v}' is reserved")));
            }
            if variables[..k].contains(v) {
                return Err(ParseError::Variables(format!("'{v}' declared twice")));
            }
        }
        if source.trim().is_empty() {
            return Err(ParseError::Empty);
        }
        let root = parser::Parser::new(source, &variables)?.parse_all()?;
        Ok(Expr { root, variables })
    }

    /// Wrap an already-built tree. Variable indices must be in range.
    pub fn from_node(root: Node, variables: Vec<String>) -> Result<Expr, EvalError> {
        fn check(n: &Node, len: usize) -> Result<(), EvalError> {
            match n {
                Node::Var(k) if *k >= len => Err(EvalError::Index(*k)),
                Node::Num(_) | Node::ImagUnit | Node::Var(_) => Ok(()),
                Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => check(a, len),
                Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                    check(a, len)?;
                    check(b, len)
                }
            }
        }
        check(&root, variables.len())?;
        Ok(Expr { root, variables })
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    /// Value at `point`.
    pub fn eval(&self, point: &[f64]) -> Result<Complex64, EvalError> {
        self.check_arity(point)?;
        eval::evaluate::<Complex64>(&self.root, point)
    }

    /// Value and exact partial derivatives with respect to every declared
    /// variable.
    pub fn eval_dual(&self, point: &[f64]) -> Result<DualValue, EvalError> {
        self.check_arity(point)?;
        eval::evaluate::<DualValue>(&self.root, point)
    }

    /// Wirtinger derivatives `(∂/∂w, ∂/∂w̄)` for `w = x[q] + i x[p]`.
    pub fn wirtinger(&self, point: &[f64], pair: (usize, usize)) -> Result<(Complex64, Complex64), EvalError> {
        let (q, p) = pair;
        let n = self.variables.len();
        if q >= n {
            return Err(EvalError::Index(q));
        }
        if p >= n {
            return Err(EvalError::Index(p));
        }
        let d = self.eval_dual(point)?;
        let i = Complex64::i();
        let dq = d.partials[q];
        let dp = d.partials[p];
        Ok(((dq - i * dp) * 0.5, (dq + i * dp) * 0.5))
    }

    fn check_arity(&self, point: &[f64]) -> Result<(), EvalError> {
        if point.len() != self.variables.len() {
            return Err(EvalError::Arity {
                expected: self.variables.len(),
                got: point.len(),
            });
        }
        Ok(())
    }
}

/// Free-function form of [`Expr::eval_dual`].
pub fn eval_dual(e: &Expr, point: &[f64]) -> Result<DualValue, EvalError> {
    e.eval_dual(point)
}

/// Free-function form of [`Expr::wirtinger`].
pub fn wirtinger(e: &Expr, point: &[f64], pair: (usize, usize)) -> Result<(Complex64, Complex64), EvalError> {
    e.wirtinger(point, pair)
}

// Binding strength used by the printer; higher binds tighter.
const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(n: &Node) -> u8 {
    match n {
        Node::Add(..) | Node::Sub(..) => PREC_ADD,
        Node::Mul(..) | Node::Div(..) => PREC_MUL,
        Node::Neg(_) => PREC_NEG,
        Node::Pow(..) => PREC_POW,
        Node::Num(_) | Node::ImagUnit | Node::Var(_) | Node::Call(..) => PREC_ATOM,
    }
}

struct Printer<'a> {
    node: &'a Node,
    names: &'a [String],
}

impl Printer<'_> {
    fn child<'b>(&'b self, node: &'b Node) -> Printer<'b> {
        Printer {
            node,
            names: self.names,
        }
    }

    fn wrapped(&self, f: &mut fmt::Formatter<'_>, node: &Node, min: u8) -> fmt::Result {
        if precedence(node) < min {
            write!(f, "({})", self.child(node))
        } else {
            write!(f, "{}", self.child(node))
        }
    }

    fn binary(&self, f: &mut fmt::Formatter<'_>, a: &Node, op: &str, b: &Node, prec: u8) -> fmt::Result {
        self.wrapped(f, a, prec)?;
        f.write_str(op)?;
        // left-associative: an equal-precedence right operand needs parens
        self.wrapped(f, b, prec + 1)
    }
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node {
            Node::Num(v) => write!(f, "{v:?}"),
            Node::ImagUnit => f.write_str("i"),
            Node::Var(k) => match self.names.get(*k) {
                Some(name) => f.write_str(name),
                None => write!(f, "${k}"),
            },
            Node::Neg(a) => {
                f.write_str("-")?;
                self.wrapped(f, a, PREC_NEG)
            }
            Node::Add(a, b) => self.binary(f, a, " + ", b, PREC_ADD),
            Node::Sub(a, b) => self.binary(f, a, " - ", b, PREC_ADD),
            Node::Mul(a, b) => self.binary(f, a, "*", b, PREC_MUL),
            Node::Div(a, b) => self.binary(f, a, "/", b, PREC_MUL),
            Node::Pow(a, k) => {
                self.wrapped(f, a, PREC_ATOM)?;
                write!(f, "^{k}")
            }
            Node::Call(func, a) => write!(f, "{}({})", func.name(), self.child(a)),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Printer {
            node: &self.root,
            names: &self.variables,
        }
        .fmt(f)
    }
}
