//! Parser for the `.mrspec` formula language.
//!
//! ```text
//! # matrix multiplication
//! space I[2], J[2], K[2];
//! a(I,J) += b(I,K)*c(K,J);
//! ```

use thiserror::Error;

use super::ast::*;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{pos}: {kind}")]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("undeclared index `{0}`")]
    UndeclaredIndex(String),
    #[error("duplicate index `{0}`")]
    DuplicateIndex(String),
    #[error("negative displacement on `{0}` is not supported")]
    NegativeDisplacement(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    Punct(&'static str),
    Eof,
}

struct Lexer {
    toks: Vec<(Tok, Pos)>,
}

impl Lexer {
    fn run(src: &str) -> Result<Self, ParseError> {
        let mut toks = Vec::new();
        for (lineno, line) in src.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            let chars: Vec<char> = line.chars().collect();
            let mut i = 0;
            while i < chars.len() {
                let c = chars[i];
                let pos = Pos { line: lineno + 1, column: i + 1 };
                if c.is_whitespace() {
                    i += 1;
                } else if c.is_ascii_alphabetic() || c == '_' {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    toks.push((Tok::Ident(chars[start..i].iter().collect()), pos));
                } else if c.is_ascii_digit() {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let text: String = chars[start..i].iter().collect();
                    let n = text
                        .parse()
                        .map_err(|_| ParseError { pos, kind: ParseErrorKind::Syntax(format!("number `{text}` out of range")) })?;
                    toks.push((Tok::Num(n), pos));
                } else if c == '+' && chars.get(i + 1) == Some(&'=') {
                    toks.push((Tok::Punct("+="), pos));
                    i += 2;
                } else {
                    let p = match c {
                        '(' => "(",
                        ')' => ")",
                        '[' => "[",
                        ']' => "]",
                        ',' => ",",
                        ';' => ";",
                        '+' => "+",
                        '-' => "-",
                        '*' => "*",
                        '=' => "=",
                        '^' => "^",
                        _ => return Err(ParseError { pos, kind: ParseErrorKind::Syntax(format!("unexpected character `{c}`")) }),
                    };
                    toks.push((Tok::Punct(p), pos));
                    i += 1;
                }
            }
        }
        let end = Pos { line: src.lines().count().max(1), column: 1 };
        toks.push((Tok::Eof, end));
        Ok(Lexer { toks })
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    indexes: Vec<IndexDecl>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos(), kind: ParseErrorKind::Syntax(msg.into()) })
    }

    fn eat(&mut self, p: &str) -> bool {
        if matches!(self.peek(), Tok::Punct(q) if *q == p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<(), ParseError> {
        if self.eat(p) {
            Ok(())
        } else {
            self.syntax(format!("expected `{p}`, found {}", describe(self.peek())))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            t => self.syntax(format!("expected identifier, found {}", describe(&t))),
        }
    }

    fn number(&mut self) -> Result<u64, ParseError> {
        match *self.peek() {
            Tok::Num(n) => {
                self.bump();
                Ok(n)
            }
            ref t => self.syntax(format!("expected number, found {}", describe(t))),
        }
    }

    fn space(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == "space" => {
                self.bump();
            }
            t => return self.syntax(format!("expected `space` declaration, found {}", describe(t))),
        }
        loop {
            let pos = self.pos();
            let name = self.ident()?;
            self.expect("[")?;
            let size_pos = self.pos();
            let size = self.number()?;
            if size == 0 {
                return Err(ParseError {
                    pos: size_pos,
                    kind: ParseErrorKind::Syntax(format!("index `{name}` must have size >= 1")),
                });
            }
            self.expect("]")?;
            if self.indexes.iter().any(|d| d.name == name) {
                return Err(ParseError { pos, kind: ParseErrorKind::DuplicateIndex(name) });
            }
            self.indexes.push(IndexDecl { name, size });
            if !self.eat(",") {
                break;
            }
        }
        self.expect(";")
    }

    fn factor(&mut self) -> Result<Factor, ParseError> {
        let pos = self.pos();
        let index = self.ident()?;
        if !self.indexes.iter().any(|d| d.name == index) {
            return Err(ParseError { pos, kind: ParseErrorKind::UndeclaredIndex(index) });
        }
        let mut exponent = 1;
        let mut displacement = 0;
        if self.eat("^") {
            exponent = self.number()? as u32;
        }
        if self.eat("+") {
            displacement = self.number()? as u32;
        } else if self.eat("-") {
            return Err(ParseError { pos, kind: ParseErrorKind::NegativeDisplacement(index) });
        }
        Ok(Factor { index, displacement, exponent })
    }

    fn array_ref(&mut self) -> Result<ArrayRef, ParseError> {
        let array = self.ident()?;
        let mut factors = Vec::new();
        if self.eat("(") && !self.eat(")") {
            loop {
                factors.push(self.factor()?);
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        Ok(ArrayRef { array, factors })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        while self.eat("+") {
            terms.push(self.term()?);
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::Sum(terms) })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut atoms = vec![self.atom()?];
        while self.eat("*") {
            atoms.push(self.atom()?);
        }
        Ok(if atoms.len() == 1 { atoms.pop().unwrap() } else { Expr::Product(atoms) })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        if self.eat("(") {
            let inner = self.expr()?;
            self.expect(")")?;
            Ok(Expr::Group(Box::new(inner)))
        } else {
            Ok(Expr::Ref(self.array_ref()?))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        let result = self.array_ref()?;
        let op = if self.eat("+=") {
            AssignOp::Accumulate
        } else if self.eat("=") {
            AssignOp::Assign
        } else {
            return self.syntax(format!("expected `=` or `+=`, found {}", describe(self.peek())));
        };
        let operands = self.expr()?;
        self.expect(";")?;
        Ok(Formula { result, op, operands, pos })
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Num(n) => format!("`{n}`"),
        Tok::Punct(p) => format!("`{p}`"),
        Tok::Eof => "end of input".to_string(),
    }
}

/// Parses a `.mrspec` source text.
pub fn parse_spec(text: &str) -> Result<ComputationSpec, ParseError> {
    let lexer = Lexer::run(text)?;
    let mut p = Parser { toks: lexer.toks, at: 0, indexes: Vec::new() };
    p.space()?;
    let mut formulas = Vec::new();
    while *p.peek() != Tok::Eof {
        formulas.push(p.formula()?);
    }
    Ok(ComputationSpec { indexes: p.indexes, formulas })
}
