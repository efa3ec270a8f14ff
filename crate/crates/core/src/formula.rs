//! Formula syntax: tokens, AST and a precedence-climbing recursive descent
//! parser.
//!
//! Grammar (whitespace between tokens is ignored):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := number | ref | call | '(' expr ')' | '-' factor
//! call   := NAME '(' arg (',' arg)* ')'
//! arg    := expr | ref ':' ref
//! ref    := ['$'] LETTERS ['$'] DIGITS
//! ```

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::address::{column_number, CellAddress, CellRef, RangeRef};

const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    pub fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinaryOp::Add | BinaryOp::Sub => 1,
            BinaryOp::Mul | BinaryOp::Div => 2,
        }
    }
}

/// Grouping functions: each takes ranges and scalars and returns one value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Function {
    Sum,
    Avg,
    Min,
    Max,
    Count,
}

impl Function {
    pub const ALL: [Function; 5] = [
        Function::Sum,
        Function::Avg,
        Function::Min,
        Function::Max,
        Function::Count,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Function::Sum => "SUM",
            Function::Avg => "AVG",
            Function::Min => "MIN",
            Function::Max => "MAX",
            Function::Count => "COUNT",
        }
    }

    pub fn from_name(name: &str) -> Option<Function> {
        Function::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(name))
    }
}

impl fmt::Display for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Reference(CellRef),
    /// Only valid as a direct argument of [`Expr::Call`].
    Range(RangeRef),
    Negate(Box<Expr>),
    Binary {
        op: BinaryOp,
        left: Box<Expr>,
        right: Box<Expr>,
    },
    Call {
        function: Function,
        args: Vec<Expr>,
    },
}

/// A reference occurrence inside a formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RefUse<'a> {
    Cell(&'a CellRef),
    Range(&'a RangeRef),
}

impl Expr {
    pub fn binary(op: BinaryOp, left: Expr, right: Expr) -> Expr {
        Expr::Binary {
            op,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// Every reference and range occurrence, left to right.
    pub fn references(&self) -> Vec<RefUse<'_>> {
        let mut out = Vec::new();
        self.collect_refs(&mut out);
        out
    }

    fn collect_refs<'a>(&'a self, out: &mut Vec<RefUse<'a>>) {
        match self {
            Expr::Number(_) => {}
            Expr::Reference(r) => out.push(RefUse::Cell(r)),
            Expr::Range(r) => out.push(RefUse::Range(r)),
            Expr::Negate(e) => e.collect_refs(out),
            Expr::Binary { left, right, .. } => {
                left.collect_refs(out);
                right.collect_refs(out);
            }
            Expr::Call { args, .. } => args.iter().for_each(|a| a.collect_refs(out)),
        }
    }

    /// Range arguments together with the function consuming them.
    pub fn grouping_ranges(&self) -> Vec<(Function, &RangeRef)> {
        let mut out = Vec::new();
        self.collect_ranges(&mut out);
        out
    }

    fn collect_ranges<'a>(&'a self, out: &mut Vec<(Function, &'a RangeRef)>) {
        match self {
            Expr::Number(_) | Expr::Reference(_) | Expr::Range(_) => {}
            Expr::Negate(e) => e.collect_ranges(out),
            Expr::Binary { left, right, .. } => {
                left.collect_ranges(out);
                right.collect_ranges(out);
            }
            Expr::Call { function, args } => {
                for a in args {
                    match a {
                        Expr::Range(r) => out.push((*function, r)),
                        other => other.collect_ranges(out),
                    }
                }
            }
        }
    }

    /// Every cell the formula reads, with ranges expanded, in occurrence order
    /// (duplicates kept).
    pub fn referenced_cells(&self) -> Vec<CellAddress> {
        let mut out = Vec::new();
        for r in self.references() {
            match r {
                RefUse::Cell(c) => out.push(c.address()),
                RefUse::Range(r) => out.extend(r.rect().cells()),
            }
        }
        out
    }

    /// The formula as it would read after being pasted `(dc, dr)` away from
    /// its origin. `None` if a relative reference leaves the sheet.
    pub fn translate(&self, dc: i64, dr: i64) -> Option<Expr> {
        Some(match self {
            Expr::Number(v) => Expr::Number(*v),
            Expr::Reference(r) => Expr::Reference(r.translate(dc, dr)?),
            Expr::Range(r) => Expr::Range(RangeRef::new(
                r.start.translate(dc, dr)?,
                r.end.translate(dc, dr)?,
            )),
            Expr::Negate(e) => Expr::Negate(Box::new(e.translate(dc, dr)?)),
            Expr::Binary { op, left, right } => {
                Expr::binary(*op, left.translate(dc, dr)?, right.translate(dc, dr)?)
            }
            Expr::Call { function, args } => Expr::Call {
                function: *function,
                args: args
                    .iter()
                    .map(|a| a.translate(dc, dr))
                    .collect::<Option<_>>()?,
            },
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary { op, .. } => op.precedence(),
            _ => 3,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(v) => write!(f, "{v}"),
            Expr::Reference(r) => write!(f, "{r}"),
            Expr::Range(r) => write!(f, "{r}"),
            Expr::Negate(e) => {
                if e.precedence() < 3 {
                    write!(f, "-({e})")
                } else {
                    write!(f, "-{e}")
                }
            }
            Expr::Binary { op, left, right } => {
                let p = op.precedence();
                if left.precedence() < p {
                    write!(f, "({left})")?;
                } else {
                    write!(f, "{left}")?;
                }
                write!(f, "{}", op.symbol())?;
                // Operators are left-associative, so an equal-precedence
                // right operand needs parentheses to keep its shape.
                if right.precedence() <= p {
                    write!(f, "({right})")
                } else {
                    write!(f, "{right}")
                }
            }
            Expr::Call { function, args } => {
                write!(f, "{function}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("formula contains no cell reference")]
    NoReference,
    #[error("unknown function `{name}` at offset {pos}")]
    UnknownFunction { name: String, pos: usize },
    #[error("range at offset {pos} is only allowed as a grouping function argument")]
    RangeOutsideCall { pos: usize },
}

fn syntax(pos: usize, message: impl Into<String>) -> FormulaError {
    FormulaError::Syntax {
        pos,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(f64),
    Ref(CellRef),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Comma,
    Colon,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Number(v) => format!("number {v}"),
            Tok::Ref(r) => format!("reference {r}"),
            Tok::Name(n) => format!("name `{n}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, FormulaError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'+' => toks.push((start, Tok::Plus)),
            b'-' => toks.push((start, Tok::Minus)),
            b'*' => toks.push((start, Tok::Star)),
            b'/' => toks.push((start, Tok::Slash)),
            b'(' => toks.push((start, Tok::LParen)),
            b')' => toks.push((start, Tok::RParen)),
            b',' => toks.push((start, Tok::Comma)),
            b':' => toks.push((start, Tok::Colon)),
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let lit = &text[start..i];
                if lit == "." {
                    return Err(syntax(start, "expected digits"));
                }
                let v: f64 = lit
                    .parse()
                    .map_err(|_| syntax(start, format!("bad number `{lit}`")))?;
                toks.push((start, Tok::Number(v)));
                continue;
            }
            b'$' | b'A'..=b'Z' | b'a'..=b'z' => {
                let col_absolute = c == b'$';
                if col_absolute {
                    i += 1;
                }
                let l0 = i;
                while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                    i += 1;
                }
                let letters = &text[l0..i];
                let row_absolute = i < bytes.len() && bytes[i] == b'$';
                if row_absolute {
                    i += 1;
                }
                let d0 = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let digits = &text[d0..i];
                if !col_absolute && !row_absolute && digits.is_empty() {
                    if letters.is_empty() {
                        return Err(syntax(start, "unexpected character"));
                    }
                    toks.push((start, Tok::Name(letters.to_string())));
                    continue;
                }
                let col = column_number(letters)
                    .ok_or_else(|| syntax(start, format!("bad reference `{}`", &text[start..i])))?;
                let row = digits
                    .parse::<u32>()
                    .ok()
                    .filter(|r| (1..=crate::address::MAX_ROW).contains(r))
                    .ok_or_else(|| syntax(start, format!("bad reference `{}`", &text[start..i])))?;
                toks.push((
                    start,
                    Tok::Ref(CellRef {
                        col,
                        row,
                        col_absolute,
                        row_absolute,
                    }),
                ));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(syntax(start, format!("unexpected character `{ch}`")));
            }
        }
        i += 1;
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.idx + 1).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(_, t)| t.clone());
        self.idx += 1;
        t
    }

    fn unexpected(&self, wanted: &str) -> FormulaError {
        match self.peek() {
            Some(t) => syntax(self.pos(), format!("expected {wanted}, found {}", t.describe())),
            None => syntax(self.end, format!("expected {wanted}, found end of formula")),
        }
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<(), FormulaError> {
        if self.peek() == Some(&tok) {
            self.idx += 1;
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn enter(&mut self) -> Result<(), FormulaError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(syntax(self.pos(), "expression nested too deeply"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, FormulaError> {
        self.enter()?;
        let mut left = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinaryOp::Add,
                Some(Tok::Minus) => BinaryOp::Sub,
                _ => break,
            };
            self.idx += 1;
            let right = self.term()?;
            left = Expr::binary(op, left, right);
        }
        self.depth -= 1;
        Ok(left)
    }

    fn term(&mut self) -> Result<Expr, FormulaError> {
        let mut left = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinaryOp::Mul,
                Some(Tok::Slash) => BinaryOp::Div,
                _ => break,
            };
            self.idx += 1;
            let right = self.factor()?;
            left = Expr::binary(op, left, right);
        }
        Ok(left)
    }

    fn factor(&mut self) -> Result<Expr, FormulaError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Number(v)) => {
                self.idx += 1;
                Ok(Expr::Number(v))
            }
            Some(Tok::Ref(r)) => {
                if self.peek2() == Some(&Tok::Colon) {
                    return Err(FormulaError::RangeOutsideCall { pos });
                }
                self.idx += 1;
                Ok(Expr::Reference(r))
            }
            Some(Tok::Name(name)) => {
                self.idx += 1;
                let function = Function::from_name(&name)
                    .ok_or(FormulaError::UnknownFunction { name, pos })?;
                self.expect(Tok::LParen, "`(` after function name")?;
                let mut args = vec![self.arg()?];
                while self.peek() == Some(&Tok::Comma) {
                    self.idx += 1;
                    args.push(self.arg()?);
                }
                self.expect(Tok::RParen, "`,` or `)`")?;
                Ok(Expr::Call { function, args })
            }
            Some(Tok::LParen) => {
                self.idx += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Minus) => {
                self.idx += 1;
                self.enter()?;
                let e = self.factor()?;
                self.depth -= 1;
                Ok(Expr::Negate(Box::new(e)))
            }
            _ => Err(self.unexpected("a number, reference, function call or `(`")),
        }
    }

    fn arg(&mut self) -> Result<Expr, FormulaError> {
        if let (Some(Tok::Ref(a)), Some(Tok::Colon)) = (self.peek().cloned(), self.peek2()) {
            self.idx += 2;
            match self.bump() {
                Some(Tok::Ref(b)) => return Ok(Expr::Range(RangeRef::new(a, b))),
                _ => {
                    self.idx -= 1;
                    return Err(self.unexpected("a reference after `:`"));
                }
            }
        }
        self.expr()
    }
}

/// Parses the text following the formula marker `=`.
pub fn parse_formula(text: &str) -> Result<Expr, FormulaError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        idx: 0,
        end: text.len(),
        depth: 0,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.unexpected("an operator or end of formula"));
    }
    if e.references().is_empty() {
        return Err(FormulaError::NoReference);
    }
    Ok(e)
}
