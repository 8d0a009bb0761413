//! Scalar data expressions of the coordinates `x`, `y`, `z` and the feature
//! size `eps`, compiled once and evaluated at every quadrature point.
//!
//! Grammar (usual precedence, `^` right-associative):
//!
//! ```text
//! expr   := or
//! or     := and ("||" and)*
//! and    := cmp ("&&" cmp)*
//! cmp    := sum (("<" | "<=" | ">" | ">=" | "==" | "!=") sum)?
//! sum    := prod (("+" | "-") prod)*
//! prod   := unary (("*" | "/") unary)*
//! unary  := "-" unary | pow
//! pow    := atom ("^" unary)?
//! atom   := number | name | name "(" expr ("," expr)* ")" | "(" expr ")"
//! ```
//!
//! Names: `x y z eps pi e`. Functions: `sin cos tan exp log ln sqrt abs`,
//! `min(a, b)`, `max(a, b)`, `pow(a, b)` and `if(cond, a, b)`. Comparisons and
//! logical operators yield 1 or 0; `if` takes its first branch when the
//! condition is non-zero.

use std::fmt;
use std::sync::Arc;

use defeature_core::fem::{scalar, ScalarFn};

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    Var(Var),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Var {
    X,
    Y,
    Z,
    Eps,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
    Min,
    Max,
    Pow,
    If,
}

impl Func {
    fn lookup(name: &str) -> Option<(Func, usize)> {
        Some(match name {
            "sin" => (Func::Sin, 1),
            "cos" => (Func::Cos, 1),
            "tan" => (Func::Tan, 1),
            "exp" => (Func::Exp, 1),
            "log" | "ln" => (Func::Log, 1),
            "sqrt" => (Func::Sqrt, 1),
            "abs" => (Func::Abs, 1),
            "min" => (Func::Min, 2),
            "max" => (Func::Max, 2),
            "pow" => (Func::Pow, 2),
            "if" => (Func::If, 3),
            _ => return None,
        })
    }
}

/// Parse failure with the byte offset of the offending input.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{message} at offset {offset} in `{source_text}`")]
pub struct ParseError {
    pub message: String,
    pub offset: usize,
    pub source_text: String,
}

/// A compiled expression.
#[derive(Clone, PartialEq)]
pub struct Expr {
    text: String,
    root: Node,
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({:?})", self.text)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        Expr::parse(s)
    }
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, ParseError> {
        let mut p = Parser { src: text, bytes: text.as_bytes(), pos: 0 };
        let root = p.or()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(Expr { text: text.trim().to_string(), root })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Value at `p` for feature size `eps`.
    pub fn eval(&self, p: &[f64; 3], eps: f64) -> f64 {
        eval(&self.root, p, eps)
    }

    /// Whether the expression is the constant zero.
    pub fn is_zero(&self) -> bool {
        matches!(self.root, Node::Num(v) if v == 0.0)
    }

    /// Bind `eps` and wrap the expression as a data function.
    pub fn bind(&self, eps: f64) -> ScalarFn {
        let e = Arc::new(self.clone());
        scalar(move |p| e.eval(p, eps))
    }
}

fn truth(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn eval(n: &Node, p: &[f64; 3], eps: f64) -> f64 {
    match n {
        Node::Num(v) => *v,
        Node::Var(Var::X) => p[0],
        Node::Var(Var::Y) => p[1],
        Node::Var(Var::Z) => p[2],
        Node::Var(Var::Eps) => eps,
        Node::Neg(a) => -eval(a, p, eps),
        Node::Bin(op, a, b) => {
            let (a, b) = (eval(a, p, eps), eval(b, p, eps));
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
                BinOp::Pow => a.powf(b),
                BinOp::Lt => truth(a < b),
                BinOp::Le => truth(a <= b),
                BinOp::Gt => truth(a > b),
                BinOp::Ge => truth(a >= b),
                BinOp::Eq => truth(a == b),
                BinOp::Ne => truth(a != b),
                BinOp::And => truth(a != 0.0 && b != 0.0),
                BinOp::Or => truth(a != 0.0 || b != 0.0),
            }
        }
        Node::Call(f, args) => {
            let a = |i: usize| eval(&args[i], p, eps);
            match f {
                Func::Sin => a(0).sin(),
                Func::Cos => a(0).cos(),
                Func::Tan => a(0).tan(),
                Func::Exp => a(0).exp(),
                Func::Log => a(0).ln(),
                Func::Sqrt => a(0).sqrt(),
                Func::Abs => a(0).abs(),
                Func::Min => a(0).min(a(1)),
                Func::Max => a(0).max(a(1)),
                Func::Pow => a(0).powf(a(1)),
                Func::If => {
                    if a(0) != 0.0 {
                        a(1)
                    } else {
                        a(2)
                    }
                }
            }
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ParseError {
        ParseError { message: message.to_string(), offset: self.pos, source_text: self.src.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn or(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.and()?;
        while self.eat("||") {
            lhs = Node::Bin(BinOp::Or, Box::new(lhs), Box::new(self.and()?));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.cmp()?;
        while self.eat("&&") {
            lhs = Node::Bin(BinOp::And, Box::new(lhs), Box::new(self.cmp()?));
        }
        Ok(lhs)
    }

    fn cmp(&mut self) -> Result<Node, ParseError> {
        let lhs = self.sum()?;
        for (tok, op) in [("<=", BinOp::Le), (">=", BinOp::Ge), ("==", BinOp::Eq), ("!=", BinOp::Ne), ("<", BinOp::Lt), (">", BinOp::Gt)] {
            if self.eat(tok) {
                return Ok(Node::Bin(op, Box::new(lhs), Box::new(self.sum()?)));
            }
        }
        Ok(lhs)
    }

    fn sum(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.prod()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.prod()?));
        }
    }

    fn prod(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(match inner {
                Node::Num(v) => Node::Num(-v),
                other => Node::Neg(Box::new(other)),
            });
        }
        if self.peek() == Some(b'+') {
            self.pos += 1;
            return self.unary();
        }
        self.pow()
    }

    fn pow(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Node::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.or()?;
                if !self.eat(")") {
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.name(),
            Some(_) => Err(self.error("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        let b = self.bytes;
        while self.pos < b.len() && (b[self.pos].is_ascii_digit() || b[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < b.len() && (b[self.pos] == b'e' || b[self.pos] == b'E') {
            let mut q = self.pos + 1;
            if q < b.len() && (b[q] == b'+' || b[q] == b'-') {
                q += 1;
            }
            if q < b.len() && b[q].is_ascii_digit() {
                while q < b.len() && b[q].is_ascii_digit() {
                    q += 1;
                }
                self.pos = q;
            }
        }
        self.src[start..self.pos].parse::<f64>().map(Node::Num).map_err(|_| {
            let mut e = self.error("malformed number");
            e.offset = start;
            e
        })
    }

    fn name(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        let b = self.bytes;
        while self.pos < b.len() && (b[self.pos].is_ascii_alphanumeric() || b[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = &self.src[start..self.pos];
        if self.peek() == Some(b'(') {
            let Some((func, arity)) = Func::lookup(name) else {
                self.pos = start;
                return Err(self.error(&format!("unknown function `{name}`")));
            };
            self.pos += 1;
            let mut args = vec![self.or()?];
            while self.eat(",") {
                args.push(self.or()?);
            }
            if !self.eat(")") {
                return Err(self.error("expected `)` or `,`"));
            }
            if args.len() != arity {
                self.pos = start;
                return Err(self.error(&format!("`{name}` takes {arity} argument(s), got {}", args.len())));
            }
            return Ok(Node::Call(func, args));
        }
        Ok(match name {
            "x" => Node::Var(Var::X),
            "y" => Node::Var(Var::Y),
            "z" => Node::Var(Var::Z),
            "eps" => Node::Var(Var::Eps),
            "pi" => Node::Num(std::f64::consts::PI),
            "e" => Node::Num(std::f64::consts::E),
            _ => {
                self.pos = start;
                return Err(self.error(&format!("unknown name `{name}`")));
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str) -> f64 {
        Expr::parse(s).unwrap().eval(&[0.5, 2.0, -1.0], 0.01)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1 + 2 * 3"), 7.0);
        assert_eq!(ev("2 ^ 3 ^ 2"), 512.0);
        assert_eq!(ev("-2 ^ 2"), -4.0);
        assert_eq!(ev("(1 + 2) * 3"), 9.0);
        assert_eq!(ev("8 / 4 / 2"), 1.0);
        assert_eq!(ev("1 - 2 - 3"), -4.0);
    }

    #[test]
    fn variables_and_functions() {
        assert_eq!(ev("x + y + z"), 1.5);
        assert_eq!(ev("1 / eps"), 100.0);
        assert!((ev("cos(pi * x)")).abs() < 1e-15);
        assert_eq!(ev("max(x, y) + min(x, z)"), 1.0);
        assert_eq!(ev("if(y <= 1, 5, 7)"), 7.0);
        assert_eq!(ev("(x < 1) && (y > 1)"), 1.0);
        assert_eq!(ev("1.5e-3 * 2"), 3e-3);
        assert!((ev("ln(e)") - 1.0).abs() < 1e-15);
    }

    #[test]
    fn errors_point_at_the_input() {
        assert!(Expr::parse("sin(x").is_err());
        assert!(Expr::parse("foo + 1").unwrap_err().message.contains("foo"));
        assert!(Expr::parse("min(1)").is_err());
        assert!(Expr::parse("1 +").is_err());
        assert!(Expr::parse("1 2").is_err());
    }

    #[test]
    fn zero_detection() {
        assert!(Expr::parse("0").unwrap().is_zero());
        assert!(!Expr::parse("x").unwrap().is_zero());
    }
}
