use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::circuit::{Assignment, Circuit, CircuitBuilder, NodeId, VarId};
use crate::poly::SparsePolynomial;
use crate::rational::{format_rational, parse_rational, Rational};

/// Arithmetic formula: a binary tree of additions and multiplications.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Const(Rational),
    Var(VarId),
    Add(Box<Formula>, Box<Formula>),
    Mul(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(name: &str) -> Self {
        Formula::Var(VarId::new(name))
    }

    pub fn constant(value: Rational) -> Self {
        Formula::Const(value)
    }

    pub fn add(a: Formula, b: Formula) -> Self {
        Formula::Add(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Formula, b: Formula) -> Self {
        Formula::Mul(Box::new(a), Box::new(b))
    }

    pub fn leaves(&self) -> usize {
        match self {
            Formula::Const(_) | Formula::Var(_) => 1,
            Formula::Add(a, b) | Formula::Mul(a, b) => a.leaves() + b.leaves(),
        }
    }

    pub fn additions(&self) -> usize {
        match self {
            Formula::Const(_) | Formula::Var(_) => 0,
            Formula::Add(a, b) => 1 + a.additions() + b.additions(),
            Formula::Mul(a, b) => a.additions() + b.additions(),
        }
    }

    pub fn multiplications(&self) -> usize {
        match self {
            Formula::Const(_) | Formula::Var(_) => 0,
            Formula::Add(a, b) => a.multiplications() + b.multiplications(),
            Formula::Mul(a, b) => 1 + a.multiplications() + b.multiplications(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.leaves() + self.additions() + self.multiplications()
    }

    pub fn variables(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<VarId>) {
        match self {
            Formula::Const(_) => {}
            Formula::Var(v) => {
                out.insert(v.clone());
            }
            Formula::Add(a, b) | Formula::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn evaluate(&self, point: &Assignment<Rational>) -> Option<Rational> {
        Some(match self {
            Formula::Const(c) => c.clone(),
            Formula::Var(v) => point.get(v)?.clone(),
            Formula::Add(a, b) => a.evaluate(point)? + b.evaluate(point)?,
            Formula::Mul(a, b) => a.evaluate(point)? * b.evaluate(point)?,
        })
    }

    pub fn to_polynomial(&self) -> SparsePolynomial {
        match self {
            Formula::Const(c) => SparsePolynomial::constant(c.clone()),
            Formula::Var(v) => SparsePolynomial::var(v.clone()),
            Formula::Add(a, b) => a.to_polynomial().add(&b.to_polynomial()),
            Formula::Mul(a, b) => a.to_polynomial().mul(&b.to_polynomial()),
        }
    }

    pub fn to_circuit(&self) -> Circuit {
        fn go(f: &Formula, b: &mut CircuitBuilder) -> NodeId {
            match f {
                Formula::Const(c) => b.constant(c.clone()),
                Formula::Var(v) => b.var(v),
                Formula::Add(x, y) => {
                    let (x, y) = (go(x, b), go(y, b));
                    let one = Rational::from_integer(1.into());
                    b.sum(alloc::vec![(x, one.clone()), (y, one)])
                }
                Formula::Mul(x, y) => {
                    let (x, y) = (go(x, b), go(y, b));
                    b.prod(alloc::vec![x, y])
                }
            }
        }
        let mut b = CircuitBuilder::new();
        let out = go(self, &mut b);
        b.finish(out)
    }

    /// Parses infix text. `+` binds looser than `*`; chains fold to the
    /// left, so `a + b + c` is `(a + b) + c`. Literals are `p` or `p/q`.
    pub fn parse(text: &str) -> Result<Formula, FormulaParseError> {
        let tokens = tokenize(text)?;
        let mut p = Parser { tokens, pos: 0 };
        let f = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(FormulaParseError(alloc::format!("unexpected token {:?}", p.tokens[p.pos])));
        }
        Ok(f)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Const(c) => f.write_str(&format_rational(c)),
            Formula::Var(v) => write!(f, "{v}"),
            Formula::Add(a, b) => write!(f, "({a} + {b})"),
            Formula::Mul(a, b) => write!(f, "({a} * {b})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("formula parse error: {0}")]
pub struct FormulaParseError(pub String);

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Number(Rational),
    Ident(String),
    Plus,
    Star,
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<Token>, FormulaParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let number_start = c.is_ascii_digit()
            || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()));
        if number_start {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '/') {
                i += 1;
            }
            let lit: String = chars[start..i].iter().collect();
            let value = parse_rational(&lit).map_err(|e| FormulaParseError(alloc::format!("{e}")))?;
            out.push(Token::Number(value));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
            continue;
        }
        out.push(match c {
            '+' => Token::Plus,
            '*' => Token::Star,
            '(' => Token::Open,
            ')' => Token::Close,
            other => return Err(FormulaParseError(alloc::format!("unexpected character `{other}`"))),
        });
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn expr(&mut self) -> Result<Formula, FormulaParseError> {
        let mut acc = self.term()?;
        while self.peek() == Some(&Token::Plus) {
            self.pos += 1;
            acc = Formula::add(acc, self.term()?);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Formula, FormulaParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Token::Star) {
            self.pos += 1;
            acc = Formula::mul(acc, self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Formula, FormulaParseError> {
        let token = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        match token {
            Some(Token::Number(r)) => Ok(Formula::Const(r)),
            Some(Token::Ident(name)) => Ok(Formula::var(&name)),
            Some(Token::Open) => {
                let inner = self.expr()?;
                if self.peek() != Some(&Token::Close) {
                    return Err(FormulaParseError("missing `)`".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(t) => Err(FormulaParseError(alloc::format!("unexpected token {t:?}"))),
            None => Err(FormulaParseError("unexpected end of input".into())),
        }
    }
}
