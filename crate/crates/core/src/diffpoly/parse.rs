//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' int)?
//! base   := rational | param | jetvar | '(' expr ')'
//! jetvar := field '\''* | 'd(' field ',' uint ')'
//! ```
//!
//! In raw mode `dt(expr)` and `dx(expr)` are also accepted as bases.

use num_bigint::BigInt;

use super::error::DiffPolyError;
use super::field::{FieldId, JetVar};
use super::param::{ParamRegistry, ParamSymbol, Rational};
use super::rational::RatExpr;

/// Derivative operators available in raw mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RawOp {
    Dt,
    Dx,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Num(Rational),
    Param(ParamSymbol),
    Jet(JetVar),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, i32),
    Apply(RawOp, Box<Ast>),
}

impl Ast {
    /// Evaluate to a rational expression; fails on raw operators.
    pub fn to_ratexpr(&self) -> Result<RatExpr, DiffPolyError> {
        Ok(match self {
            Ast::Num(r) => RatExpr::rational(r.clone()),
            Ast::Param(p) => RatExpr::param(p.clone()),
            Ast::Jet(v) => RatExpr::jet(v.field, v.order),
            Ast::Neg(a) => a.to_ratexpr()?.neg_ref(),
            Ast::Add(a, b) => a.to_ratexpr()?.add_ref(&b.to_ratexpr()?),
            Ast::Sub(a, b) => a.to_ratexpr()?.sub_ref(&b.to_ratexpr()?),
            Ast::Mul(a, b) => a.to_ratexpr()?.mul_ref(&b.to_ratexpr()?),
            Ast::Div(a, b) => {
                // Keep `x/(F)^k` as one factor with exponent k rather than expanding F^k.
                let (base, k) = match b.as_ref() {
                    Ast::Pow(base, k) => (base.to_ratexpr()?, *k),
                    other => (other.to_ratexpr()?, 1),
                };
                a.to_ratexpr()?.mul_ref(&base.pow(-k)?)
            }
            Ast::Pow(a, k) => a.to_ratexpr()?.pow(*k)?,
            Ast::Apply(op, _) => {
                let name = match op {
                    RawOp::Dt => "dt",
                    RawOp::Dx => "dx",
                };
                return Err(DiffPolyError::SyntaxError {
                    line: 1,
                    column: 1,
                    message: format!("operator `{name}` is only allowed in raw expressions"),
                });
            }
        })
    }
}

/// Parse with an open parameter registry.
pub fn parse_expr(text: &str) -> Result<RatExpr, DiffPolyError> {
    parse_expr_with(text, &ParamRegistry::open())
}

pub fn parse_expr_with(text: &str, registry: &ParamRegistry) -> Result<RatExpr, DiffPolyError> {
    Parser::new(text, registry, false).parse()?.to_ratexpr()
}

/// Parse allowing `dt(...)` and `dx(...)`.
pub fn parse_raw(text: &str, registry: &ParamRegistry) -> Result<Ast, DiffPolyError> {
    Parser::new(text, registry, true).parse()
}

/// Canonical text form; `parse_expr(&format_expr(e))` reproduces `e` exactly.
pub fn format_expr(e: &RatExpr) -> String {
    e.to_text()
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Tick,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("number {n}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Tick => "'\\''".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::Comma => "','".into(),
            Tok::End => "end of input".into(),
        }
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, DiffPolyError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, column);
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        let tok = if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                s.push(d);
                chars.next();
                column += 1;
            }
            Tok::Int(s.parse().expect("digits"))
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if !(d.is_ascii_alphanumeric() || d == '_') {
                    break;
                }
                s.push(d);
                chars.next();
                column += 1;
            }
            Tok::Ident(s)
        } else {
            chars.next();
            column += 1;
            match c {
                '\'' => Tok::Tick,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '^' => Tok::Caret,
                ',' => Tok::Comma,
                other => {
                    return Err(DiffPolyError::SyntaxError {
                        line: l0,
                        column: c0,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            }
        };
        out.push(Spanned {
            tok,
            line: l0,
            column: c0,
        });
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<Spanned>,
    pos: usize,
    registry: &'a ParamRegistry,
    raw: bool,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, registry: &'a ParamRegistry, raw: bool) -> Self {
        Parser {
            text,
            toks: Vec::new(),
            pos: 0,
            registry,
            raw,
        }
    }

    fn parse(mut self) -> Result<Ast, DiffPolyError> {
        self.toks = lex(self.text)?;
        let e = self.expr()?;
        if self.peek() != &Tok::End {
            return Err(self.unexpected("an operator or end of input"));
        }
        Ok(e)
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: String) -> DiffPolyError {
        let s = &self.toks[self.pos];
        DiffPolyError::SyntaxError {
            line: s.line,
            column: s.column,
            message,
        }
    }

    fn unexpected(&self, wanted: &str) -> DiffPolyError {
        self.error_here(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, t: Tok) -> Result<(), DiffPolyError> {
        if self.peek() == &t {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&t.describe()))
        }
    }

    fn expr(&mut self) -> Result<Ast, DiffPolyError> {
        let mut lhs = if self.peek() == &Tok::Minus {
            self.bump();
            Ast::Neg(Box::new(self.term()?))
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Ast, DiffPolyError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Ast::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Ast::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Ast, DiffPolyError> {
        let base = self.base()?;
        if self.peek() != &Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let neg = if self.peek() == &Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let Tok::Int(n) = self.peek().clone() else {
            return Err(self.unexpected("an integer exponent"));
        };
        let k: i32 = i32::try_from(&n)
            .map_err(|_| self.error_here("exponent out of range".into()))?;
        self.bump();
        Ok(Ast::Pow(Box::new(base), if neg { -k } else { k }))
    }

    fn uint(&mut self) -> Result<BigInt, DiffPolyError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.unexpected("an unsigned integer")),
        }
    }

    fn base(&mut self) -> Result<Ast, DiffPolyError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                // Greedy rational literal: `int '/' uint`.
                if self.peek() == &Tok::Slash && matches!(self.peek_at(1), Tok::Int(_)) {
                    self.bump();
                    let d = self.uint()?;
                    if d == BigInt::from(0) {
                        return Err(DiffPolyError::DivisionByZeroExpr);
                    }
                    return Ok(Ast::Num(Rational::new(n, d)));
                }
                Ok(Ast::Num(Rational::from_integer(n)))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => self.ident(name),
            _ => Err(self.unexpected("a number, identifier or '('")),
        }
    }

    fn ident(&mut self, name: String) -> Result<Ast, DiffPolyError> {
        let (line, column) = (self.toks[self.pos].line, self.toks[self.pos].column);
        self.bump();
        if let Some(field) = FieldId::from_name(&name) {
            let mut order: u8 = 0;
            while self.peek() == &Tok::Tick {
                self.bump();
                order = order
                    .checked_add(1)
                    .ok_or_else(|| self.error_here("derivative order too large".into()))?;
            }
            return Ok(Ast::Jet(JetVar::new(field, order)));
        }
        if self.peek() == &Tok::LParen {
            match name.as_str() {
                "d" => {
                    self.bump();
                    let field = self.field()?;
                    self.expect(Tok::Comma)?;
                    let k = self.uint()?;
                    let order = u8::try_from(&k)
                        .map_err(|_| self.error_here("derivative order too large".into()))?;
                    self.expect(Tok::RParen)?;
                    return Ok(Ast::Jet(JetVar::new(field, order)));
                }
                "dt" | "dx" if self.raw => {
                    self.bump();
                    let inner = self.expr()?;
                    self.expect(Tok::RParen)?;
                    let op = if name == "dt" { RawOp::Dt } else { RawOp::Dx };
                    return Ok(Ast::Apply(op, Box::new(inner)));
                }
                _ => {}
            }
        }
        match self.registry.lookup(&name) {
            Some(sym) => Ok(Ast::Param(sym)),
            None => Err(DiffPolyError::UnknownIdentifier { name, line, column }),
        }
    }

    fn field(&mut self) -> Result<FieldId, DiffPolyError> {
        if let Tok::Ident(name) = self.peek().clone() {
            if let Some(f) = FieldId::from_name(&name) {
                self.bump();
                return Ok(f);
            }
        }
        Err(self.unexpected("a field name"))
    }
}

impl std::str::FromStr for RatExpr {
    type Err = DiffPolyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expr(s)
    }
}
