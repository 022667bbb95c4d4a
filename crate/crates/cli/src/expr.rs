//! Function specifications: arithmetic expressions over `x1..xn`, step
//! literals, polynomial coefficients and breakpoint lists.

use catint::scalar::Scalar;
use catint::stepfn::{Sampler, StepFunction};
use catint::targets::PiecewiseLinear;
use catint::{Error, Result};

fn parse_error(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos, msg: msg.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Func {
    Sin,
    Cos,
    Exp,
    Abs,
    Pow,
}

impl Func {
    fn lookup(name: &str) -> Option<(Func, usize)> {
        Some(match name {
            "sin" => (Func::Sin, 1),
            "cos" => (Func::Cos, 1),
            "exp" => (Func::Exp, 1),
            "abs" => (Func::Abs, 1),
            "pow" => (Func::Pow, 2),
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
enum Node<L> {
    Num(L),
    Var(usize),
    Neg(Box<Node<L>>),
    Bin(Op, Box<Node<L>>, Box<Node<L>>),
    Call(Func, Vec<Node<L>>),
}

impl<L> Node<L> {
    fn try_map<M>(&self, f: &impl Fn(&L) -> Result<M>) -> Result<Node<M>> {
        Ok(match self {
            Node::Num(l) => Node::Num(f(l)?),
            Node::Var(i) => Node::Var(*i),
            Node::Neg(a) => Node::Neg(Box::new(a.try_map(f)?)),
            Node::Bin(op, a, b) => Node::Bin(*op, Box::new(a.try_map(f)?), Box::new(b.try_map(f)?)),
            Node::Call(func, args) => Node::Call(*func, args.iter().map(|a| a.try_map(f)).collect::<Result<_>>()?),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(String),
    Ident(String),
    Sym(char),
}

fn tokenize(src: &str, offset: usize) -> Result<Vec<(usize, Token)>> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = vec![];
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                i += 1;
            }
            if i < chars.len() && matches!(chars[i].1, 'e' | 'E') {
                let mut j = i + 1;
                if j < chars.len() && matches!(chars[j].1, '+' | '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].1.is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].1.is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let end = chars.get(i).map_or(src.len(), |c| c.0);
            out.push((offset + pos, Token::Num(src[chars[start].0..end].to_string())));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let end = chars.get(i).map_or(src.len(), |c| c.0);
            out.push((offset + pos, Token::Ident(src[chars[start].0..end].to_string())));
        } else if "+-*/^(),".contains(c) {
            out.push((offset + pos, Token::Sym(c)));
            i += 1;
        } else {
            return Err(parse_error(offset + pos, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    at: usize,
    end: usize,
    dim: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.tokens.get(self.at).map_or(self.end, |t| t.0)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Token::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(parse_error(self.pos(), format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> Result<Node<String>> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                Op::Add
            } else if self.eat('-') {
                Op::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Node<String>> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                Op::Mul
            } else if self.eat('/') {
                Op::Div
            } else {
                return Ok(lhs);
            };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Node<String>> {
        if self.eat('-') {
            Ok(Node::Neg(Box::new(self.unary()?)))
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Node<String>> {
        let base = self.atom()?;
        if self.eat('^') {
            Ok(Node::Call(Func::Pow, vec![base, self.unary()?]))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Node<String>> {
        let pos = self.pos();
        let token = self.tokens.get(self.at).map(|t| t.1.clone());
        self.at += 1;
        match token {
            Some(Token::Num(s)) => Ok(Node::Num(s)),
            Some(Token::Sym('(')) => {
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(Token::Ident(name)) => {
                if let Some((func, arity)) = Func::lookup(&name) {
                    self.expect('(')?;
                    let mut args = vec![self.expr()?];
                    while self.eat(',') {
                        args.push(self.expr()?);
                    }
                    self.expect(')')?;
                    if args.len() != arity {
                        return Err(parse_error(
                            pos,
                            format!("`{name}` takes {arity} argument(s), got {}", args.len()),
                        ));
                    }
                    return Ok(Node::Call(func, args));
                }
                match name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                    Some(i) if (1..=self.dim).contains(&i) && !name[1..].starts_with('0') => Ok(Node::Var(i - 1)),
                    Some(_) => Err(parse_error(pos, format!("variable `{name}` is outside x1..x{}", self.dim))),
                    None => Err(parse_error(pos, format!("unknown name `{name}`"))),
                }
            }
            Some(Token::Sym(c)) => Err(parse_error(pos, format!("unexpected `{c}`"))),
            None => Err(parse_error(pos, "unexpected end of input")),
        }
    }
}

/// A parsed expression in the variables `x1..xn`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Node<String>,
    dim: usize,
}

impl Expression {
    pub fn parse(src: &str, dim: usize) -> Result<Self> {
        Self::parse_at(src, dim, 0)
    }

    fn parse_at(src: &str, dim: usize, offset: usize) -> Result<Self> {
        let tokens = tokenize(src, offset)?;
        let mut p = Parser { tokens, at: 0, end: offset + src.len(), dim };
        let root = p.expr()?;
        if p.at < p.tokens.len() {
            return Err(parse_error(p.pos(), "unexpected trailing input"));
        }
        Ok(Self { root, dim })
    }

    /// Fixes the literals in backend `S`.
    pub fn compile<S: Scalar>(&self) -> Result<Compiled<S>> {
        Ok(Compiled { root: self.root.try_map(&|s: &String| S::parse_literal(s))?, dim: self.dim })
    }
}

/// An expression with its literals in backend `S`.
#[derive(Debug, Clone)]
pub struct Compiled<S> {
    root: Node<S>,
    dim: usize,
}

fn eval<S: Scalar>(node: &Node<S>, x: &[S]) -> Result<S> {
    Ok(match node {
        Node::Num(c) => c.clone(),
        Node::Var(i) => x[*i].clone(),
        Node::Neg(a) => -eval(a, x)?,
        Node::Bin(op, a, b) => {
            let (a, b) = (eval(a, x)?, eval(b, x)?);
            match op {
                Op::Add => a + b,
                Op::Sub => a - b,
                Op::Mul => a * b,
                Op::Div => a.checked_div(&b)?,
            }
        }
        Node::Call(func, args) => {
            let a = eval(&args[0], x)?;
            match func {
                Func::Sin => a.sin()?,
                Func::Cos => a.cos()?,
                Func::Exp => a.exp()?,
                Func::Abs => a.ordered_abs()?,
                Func::Pow => {
                    let e = eval(&args[1], x)?.to_complex();
                    if e.im != 0.0 {
                        return Err(Error::EvaluationFailure("complex exponent".into()));
                    }
                    if e.re.fract() == 0.0 && e.re.abs() <= i32::MAX as f64 {
                        a.powi(e.re as i32)?
                    } else {
                        a.powf(e.re)?
                    }
                }
            }
        }
    })
}

impl<S: Scalar> Sampler<S> for Compiled<S> {
    fn eval(&self, x: &[S]) -> Result<S> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        eval(&self.root, x)
    }
}

/// Polynomial in `x1` with ascending coefficients.
#[derive(Debug, Clone)]
pub struct Polynomial<S>(pub Vec<S>);

impl<S: Scalar> Sampler<S> for Polynomial<S> {
    fn eval(&self, x: &[S]) -> Result<S> {
        Ok(self.0.iter().rev().fold(S::zero(), |acc, c| acc * x[0].clone() + c.clone()))
    }
}

/// What `--function` denotes.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    Expr(Expression),
    /// `step:<u>,c0,c1,…` with coefficients in flat cell order.
    Step {
        level: u32,
        coeffs: Vec<(usize, String)>,
    },
    /// `poly:c0,c1,…` in ascending degree.
    Poly(Vec<(usize, String)>),
    /// `pl:<u>,v0,v1,…` breakpoint values with `v0 = 0`.
    Breakpoints {
        level: u32,
        values: Vec<(usize, String)>,
    },
}

fn split_list(body: &str, offset: usize) -> Vec<(usize, String)> {
    let mut out = vec![];
    let mut start = 0;
    for part in body.split(',') {
        let lead = part.len() - part.trim_start().len();
        out.push((offset + start + lead, part.trim().to_string()));
        start += part.len() + 1;
    }
    out
}

fn parse_level(item: &(usize, String)) -> Result<u32> {
    item.1.parse().map_err(|_| parse_error(item.0, format!("`{}` is not a level", item.1)))
}

fn literals<S: Scalar>(items: &[(usize, String)]) -> Result<Vec<S>> {
    items
        .iter()
        .map(|(pos, s)| {
            S::parse_literal(s).map_err(|e| match e {
                Error::Parse { msg, .. } => parse_error(*pos, msg),
                other => parse_error(*pos, other.to_string()),
            })
        })
        .collect()
}

impl FunctionSpec {
    pub fn parse(src: &str, dim: usize) -> Result<Self> {
        let tagged = |tag: &str| src.strip_prefix(tag).map(|body| split_list(body, tag.len()));
        if let Some(items) = tagged("step:") {
            let level = parse_level(&items[0])?;
            Ok(FunctionSpec::Step { level, coeffs: items[1..].to_vec() })
        } else if let Some(items) = tagged("pl:") {
            let level = parse_level(&items[0])?;
            Ok(FunctionSpec::Breakpoints { level, values: items[1..].to_vec() })
        } else if let Some(items) = tagged("poly:") {
            Ok(FunctionSpec::Poly(items))
        } else {
            Ok(FunctionSpec::Expr(Expression::parse(src, dim)?))
        }
    }

    pub fn step<S: Scalar>(&self, dim: usize) -> Result<Option<StepFunction<S>>> {
        match self {
            FunctionSpec::Step { level, coeffs } => StepFunction::new(dim, *level, literals(coeffs)?).map(Some),
            _ => Ok(None),
        }
    }

    pub fn breakpoints<S: Scalar>(&self) -> Result<Option<PiecewiseLinear<S>>> {
        match self {
            FunctionSpec::Breakpoints { level, values } => PiecewiseLinear::new(*level, literals(values)?).map(Some),
            _ => Ok(None),
        }
    }

    /// A pointwise evaluator, for every form but step and breakpoint
    /// literals.
    pub fn sampler<S: Scalar>(&self, dim: usize) -> Result<Box<dyn Sampler<S>>> {
        match self {
            FunctionSpec::Expr(e) => Ok(Box::new(e.compile::<S>()?)),
            FunctionSpec::Poly(items) => {
                if dim != 1 {
                    return Err(Error::UnsupportedConfiguration(format!(
                        "polynomial functions need one variable, got {dim}"
                    )));
                }
                Ok(Box::new(Polynomial(literals::<S>(items)?)))
            }
            _ => Err(Error::UnsupportedConfiguration("a literal cannot be sampled; give an expression".into())),
        }
    }

    pub fn poly_coeffs<S: Scalar>(&self) -> Result<Option<Vec<S>>> {
        match self {
            FunctionSpec::Poly(items) => literals(items).map(Some),
            _ => Ok(None),
        }
    }
}
