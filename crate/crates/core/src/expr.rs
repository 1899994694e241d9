//! Complex expression language used for symbols, weights and test functions.
//!
//! Grammar, with `^` binding tighter than unary minus and associating to the
//! right, `*` `/` `+` `-` associating to the left, and no implicit
//! multiplication:
//!
//! ```plain
//! expr   = add ;
//! add    = mul { ("+" | "-") mul } ;
//! mul    = unary { ("*" | "/") unary } ;
//! unary  = "-" unary | power ;
//! power  = atom [ "^" unary ] ;
//! atom   = number | "z" | "i" | "pi" | "e"
//!        | func "(" expr ")" | "(" expr ")" ;
//! func   = "exp" | "log" | "sin" | "cos" | "sqrt"
//!        | "conj" | "abs" | "arg" | "re" | "im" ;
//! number = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] ;
//! ```
//!
//! `log` and `sqrt` take principal branches and `arg` returns values in
//! (-pi, pi]. Integer powers are evaluated by repeated multiplication; any
//! other exponent uses exp(w log z). Evaluation never returns a non-finite
//! number: division by exact zero, log or arg at 0, and overflow all surface
//! as [`EvalError`].

use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use thiserror::Error;

/// Binary operators, in source notation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// The built-in one-argument functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
    Conj,
    Abs,
    Arg,
    Re,
    Im,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            "conj" => Func::Conj,
            "abs" => Func::Abs,
            "arg" => Func::Arg,
            "re" => Func::Re,
            "im" => Func::Im,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Conj => "conj",
            Func::Abs => "abs",
            Func::Arg => "arg",
            Func::Re => "re",
            Func::Im => "im",
        }
    }
}

/// Named constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Const {
    I,
    Pi,
    Euler,
}

/// Parsed syntax tree. Numeric literals are non-negative; the parser turns a
/// leading minus into [`Node::Neg`].
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Num(f64),
    Const(Const),
    Z,
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// A parsed expression together with the source it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Expression {
    source: String,
    root: Node,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("malformed number")]
    MalformedNumber,
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected {0}")]
    UnexpectedToken(String),
    #[error("unknown identifier {0:?}")]
    UnknownIdentifier(String),
    #[error("{0:?} takes exactly one argument")]
    Arity(String),
    #[error("{0:?} is a constant, not a function")]
    NotAFunction(String),
    #[error("expected {0}")]
    Expected(&'static str),
}

/// Rejection with the byte offset it occurred at. The offset never exceeds
/// the input length.
#[derive(Clone, Debug, PartialEq, Error)]
#[error("syntax error at byte {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

/// Failure during evaluation. Anything that would produce a non-finite or
/// branch-undefined value lands here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("log of zero")]
    LogOfZero,
    #[error("arg of zero")]
    ArgOfZero,
    #[error("zero base with non-integer or negative exponent")]
    ZeroPower,
    #[error("overflow to a non-finite value")]
    NonFinite,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(x) => write!(f, "number {x}"),
            Tok::Ident(s) => write!(f, "identifier {s:?}"),
            Tok::Plus => write!(f, "'+'"),
            Tok::Minus => write!(f, "'-'"),
            Tok::Star => write!(f, "'*'"),
            Tok::Slash => write!(f, "'/'"),
            Tok::Caret => write!(f, "'^'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::Comma => write!(f, "','"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'+' => {
                toks.push((Tok::Plus, i));
                i += 1;
            }
            b'-' => {
                toks.push((Tok::Minus, i));
                i += 1;
            }
            b'*' => {
                toks.push((Tok::Star, i));
                i += 1;
            }
            b'/' => {
                toks.push((Tok::Slash, i));
                i += 1;
            }
            b'^' => {
                toks.push((Tok::Caret, i));
                i += 1;
            }
            b'(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            b')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            b',' => {
                toks.push((Tok::Comma, i));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                // An exponent part is consumed only when digits follow, so
                // "2e" lexes as the number 2 followed by the identifier e.
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let value: f64 = text.parse().map_err(|_| ParseError {
                    offset: start,
                    kind: ParseErrorKind::MalformedNumber,
                })?;
                if !value.is_finite() {
                    return Err(ParseError {
                        offset: start,
                        kind: ParseErrorKind::MalformedNumber,
                    });
                }
                toks.push((Tok::Num(value), start));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((Tok::Ident(src[start..i].to_string()), start));
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('\u{fffd}');
                return Err(ParseError {
                    offset: i,
                    kind: ParseErrorKind::UnexpectedChar(ch),
                });
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            offset: self.offset(),
            kind,
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::RParen) => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.err(ParseErrorKind::UnexpectedToken(t.to_string()))),
            None => Err(self.err(ParseErrorKind::Expected("')'"))),
        }
    }

    fn add(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.mul()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.mul()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn mul(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if let Some(Tok::Minus) = self.peek() {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Node::Bin(
                BinOp::Pow,
                Box::new(base),
                Box::new(exponent),
            ));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let offset = self.offset();
        match self.bump() {
            Some(Tok::Num(x)) => Ok(Node::Num(x)),
            Some(Tok::LParen) => {
                let inner = self.add()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => self.ident(name, offset),
            Some(t) => Err(ParseError {
                offset,
                kind: ParseErrorKind::UnexpectedToken(t.to_string()),
            }),
            None => Err(ParseError {
                offset,
                kind: ParseErrorKind::UnexpectedEnd,
            }),
        }
    }

    fn ident(&mut self, name: String, offset: usize) -> Result<Node, ParseError> {
        if let Some(func) = Func::from_name(&name) {
            match self.peek() {
                Some(Tok::LParen) => self.pos += 1,
                _ => {
                    return Err(ParseError {
                        offset,
                        kind: ParseErrorKind::Arity(name),
                    })
                }
            }
            let arg = self.add()?;
            if let Some(Tok::Comma) = self.peek() {
                return Err(self.err(ParseErrorKind::Arity(name)));
            }
            self.expect_rparen()?;
            return Ok(Node::Call(func, Box::new(arg)));
        }
        let node = match name.as_str() {
            "z" => Node::Z,
            "i" => Node::Const(Const::I),
            "pi" => Node::Const(Const::Pi),
            "e" => Node::Const(Const::Euler),
            _ => {
                return Err(ParseError {
                    offset,
                    kind: ParseErrorKind::UnknownIdentifier(name),
                })
            }
        };
        if let Some(Tok::LParen) = self.peek() {
            return Err(ParseError {
                offset,
                kind: ParseErrorKind::NotAFunction(name),
            });
        }
        Ok(node)
    }
}

impl Expression {
    /// Parses `source`. Rejections carry the byte offset of the failure.
    pub fn parse(source: &str) -> Result<Expression, ParseError> {
        let toks = lex(source)?;
        let mut parser = Parser {
            toks,
            pos: 0,
            end: source.len(),
        };
        let root = parser.add()?;
        if let Some(t) = parser.peek() {
            return Err(parser.err(ParseErrorKind::UnexpectedToken(t.to_string())));
        }
        Ok(Expression {
            source: source.to_string(),
            root,
        })
    }

    /// The source string the expression was parsed from.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Canonical rendering of the tree. Parsing it again yields a
    /// structurally identical tree.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        unparse(&self.root, &mut out);
        out
    }

    /// Evaluates at `z`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64, EvalError> {
        eval_node(&self.root, z)
    }

    /// True when the expression has no `z` anywhere, so that it denotes a
    /// single point. Used for point arguments given in expression syntax.
    pub fn is_constant(&self) -> bool {
        fn no_z(n: &Node) -> bool {
            match n {
                Node::Z => false,
                Node::Num(_) | Node::Const(_) => true,
                Node::Neg(x) | Node::Call(_, x) => no_z(x),
                Node::Bin(_, a, b) => no_z(a) && no_z(b),
            }
        }
        no_z(&self.root)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

fn prec(n: &Node) -> u8 {
    match n {
        Node::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        Node::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Node::Neg(_) => 3,
        Node::Bin(BinOp::Pow, ..) => 4,
        Node::Num(_) | Node::Const(_) | Node::Z | Node::Call(..) => 5,
    }
}

fn unparse(n: &Node, out: &mut String) {
    let wrap = |child: &Node, needs: bool, out: &mut String| {
        if needs {
            out.push('(');
            unparse(child, out);
            out.push(')');
        } else {
            unparse(child, out);
        }
    };
    match n {
        Node::Num(x) => {
            use std::fmt::Write;
            let _ = write!(out, "{x}");
        }
        Node::Const(Const::I) => out.push('i'),
        Node::Const(Const::Pi) => out.push_str("pi"),
        Node::Const(Const::Euler) => out.push('e'),
        Node::Z => out.push('z'),
        Node::Neg(x) => {
            out.push('-');
            wrap(x, prec(x) < 3, out);
        }
        Node::Bin(op, l, r) => {
            let p = prec(n);
            match op {
                BinOp::Pow => {
                    // Right-associative; the grammar admits a unary on the
                    // right, so only additive or multiplicative children
                    // need parentheses there.
                    wrap(l, prec(l) <= p, out);
                    out.push('^');
                    wrap(r, prec(r) < 3, out);
                }
                _ => {
                    let sym = match op {
                        BinOp::Add => '+',
                        BinOp::Sub => '-',
                        BinOp::Mul => '*',
                        BinOp::Div => '/',
                        BinOp::Pow => unreachable!(),
                    };
                    wrap(l, prec(l) < p, out);
                    out.push(sym);
                    wrap(r, prec(r) <= p, out);
                }
            }
        }
        Node::Call(func, arg) => {
            out.push_str(func.name());
            out.push('(');
            unparse(arg, out);
            out.push(')');
        }
    }
}

fn finite(c: Complex64) -> Result<Complex64, EvalError> {
    if c.re.is_finite() && c.im.is_finite() {
        Ok(c)
    } else {
        Err(EvalError::NonFinite)
    }
}

/// Maps -0.0 imaginary parts to +0.0 so branch cuts agree with the
/// arg-in-(-pi, pi] convention.
fn branch_normalize(c: Complex64) -> Complex64 {
    let re = if c.re == 0.0 { 0.0 } else { c.re };
    let im = if c.im == 0.0 { 0.0 } else { c.im };
    Complex64::new(re, im)
}

fn principal_arg(c: Complex64) -> f64 {
    let a = branch_normalize(c).arg();
    if a == -PI {
        PI
    } else {
        a
    }
}

fn pow_integer(base: Complex64, n: i64) -> Result<Complex64, EvalError> {
    if base == Complex64::new(0.0, 0.0) {
        return match n {
            0 => Ok(Complex64::new(1.0, 0.0)),
            n if n > 0 => Ok(Complex64::new(0.0, 0.0)),
            _ => Err(EvalError::DivisionByZero),
        };
    }
    let mut result = Complex64::new(1.0, 0.0);
    let mut sq = base;
    let mut k = n.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            result = finite(result * sq)?;
        }
        k >>= 1;
        if k > 0 {
            sq = finite(sq * sq)?;
        }
    }
    if n < 0 {
        result = finite(result.finv())?;
    }
    Ok(result)
}

fn eval_node(n: &Node, z: Complex64) -> Result<Complex64, EvalError> {
    match n {
        Node::Num(x) => Ok(Complex64::new(*x, 0.0)),
        Node::Const(Const::I) => Ok(Complex64::new(0.0, 1.0)),
        Node::Const(Const::Pi) => Ok(Complex64::new(PI, 0.0)),
        Node::Const(Const::Euler) => Ok(Complex64::new(std::f64::consts::E, 0.0)),
        Node::Z => Ok(z),
        Node::Neg(x) => Ok(-eval_node(x, z)?),
        Node::Bin(op, l, r) => {
            let a = eval_node(l, z)?;
            let b = eval_node(r, z)?;
            match op {
                BinOp::Add => finite(a + b),
                BinOp::Sub => finite(a - b),
                BinOp::Mul => finite(a * b),
                BinOp::Div => {
                    if b == Complex64::new(0.0, 0.0) {
                        Err(EvalError::DivisionByZero)
                    } else {
                        finite(a / b)
                    }
                }
                BinOp::Pow => {
                    let is_integer = b.im == 0.0
                        && b.re.fract() == 0.0
                        && b.re.abs() <= 2_147_483_648.0;
                    if is_integer {
                        pow_integer(a, b.re as i64)
                    } else if a == Complex64::new(0.0, 0.0) {
                        Err(EvalError::ZeroPower)
                    } else {
                        finite((b * branch_normalize(a).ln()).exp())
                    }
                }
            }
        }
        Node::Call(func, arg) => {
            let v = eval_node(arg, z)?;
            match func {
                Func::Exp => finite(v.exp()),
                Func::Log => {
                    if v == Complex64::new(0.0, 0.0) {
                        Err(EvalError::LogOfZero)
                    } else {
                        finite(branch_normalize(v).ln())
                    }
                }
                Func::Sin => finite(v.sin()),
                Func::Cos => finite(v.cos()),
                Func::Sqrt => finite(branch_normalize(v).sqrt()),
                Func::Conj => Ok(v.conj()),
                Func::Abs => Ok(Complex64::new(v.norm(), 0.0)),
                Func::Arg => {
                    if v == Complex64::new(0.0, 0.0) {
                        Err(EvalError::ArgOfZero)
                    } else {
                        Ok(Complex64::new(principal_arg(v), 0.0))
                    }
                }
                Func::Re => Ok(Complex64::new(v.re, 0.0)),
                Func::Im => Ok(Complex64::new(v.im, 0.0)),
            }
        }
    }
}
