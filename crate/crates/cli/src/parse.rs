//! Surface syntax.
//!
//! ```text
//! expr   := "let" IDENT "=" expr "in" expr
//!         | "if" expr "then" expr "else" expr
//!         | conj
//! conj   := cmp ("&&" conj)?
//! cmp    := sum (("==" | ">=") sum)?
//! sum    := quot (("+" | "-") quot)*
//! quot   := atom ("/" atom)*
//! atom   := INT | "true" | "false" | "nondet" | IDENT | "(" expr ")"
//!         | "assert" "(" expr ")" | "let" ... | "if" ...
//! ```
//!
//! `//` starts a comment that runs to the end of the line.

use std::fmt;

use num_bigint::BigInt;
use symex_core::simplang::{Expr, Op};
use thiserror::Error;

pub const RESERVED: [&str; 9] = [
    "let", "in", "if", "then", "else", "assert", "nondet", "true", "false",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {message}")]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Keyword(&'static str),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(z) => write!(f, "integer `{z}`"),
            Tok::Ident(x) => write!(f, "identifier `{x}`"),
            Tok::Keyword(k) => write!(f, "`{k}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

const SYMBOLS: [&str; 9] = ["&&", "==", ">=", "+", "-", "/", "(", ")", "="];

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&(i, c)) = chars.peek() {
        let pos = Pos { line, col };
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        let rest = &src[i..];
        if rest.starts_with("//") {
            while matches!(chars.peek(), Some(&(_, c)) if c != '\n') {
                chars.next();
            }
            continue;
        }
        let take_while = |pred: fn(char) -> bool| -> &str {
            let end = rest.find(|c: char| !pred(c)).unwrap_or(rest.len());
            &rest[..end]
        };
        let (tok, text) = if c.is_ascii_digit() {
            let digits = take_while(|c| c.is_ascii_digit());
            (Tok::Int(digits.parse().expect("digits")), digits)
        } else if c.is_alphabetic() || c == '_' {
            let word = take_while(|c| c.is_alphanumeric() || c == '_' || c == '\'');
            match RESERVED.iter().find(|k| **k == word) {
                Some(k) => (Tok::Keyword(k), word),
                None => (Tok::Ident(word.to_string()), word),
            }
        } else if let Some(s) = SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            (Tok::Sym(s), *s)
        } else {
            return Err(ParseError {
                pos,
                message: format!("unexpected character `{c}`"),
            });
        };
        for _ in text.chars() {
            chars.next();
        }
        col += text.chars().count();
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
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

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn eat_sym(&mut self, s: &'static str) -> bool {
        if *self.peek() == Tok::Sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {want}, found {}", self.peek()))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Ok(x)
            }
            Tok::Keyword(k) => self.error(format!(
                "`{k}` is a reserved word and cannot name a variable"
            )),
            other => self.error(format!("expected identifier, found {other}")),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Keyword("let") => {
                self.bump();
                let x = self.ident()?;
                self.expect(Tok::Sym("="))?;
                let bound = self.expr()?;
                self.expect(Tok::Keyword("in"))?;
                let body = self.expr()?;
                Ok(Expr::Let(x, Box::new(bound), Box::new(body)))
            }
            Tok::Keyword("if") => {
                self.bump();
                let c = self.expr()?;
                self.expect(Tok::Keyword("then"))?;
                let t = self.expr()?;
                self.expect(Tok::Keyword("else"))?;
                let e = self.expr()?;
                Ok(Expr::if_then_else(c, t, e))
            }
            _ => self.conj(),
        }
    }

    fn conj(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.cmp()?;
        if self.eat_sym("&&") {
            let rhs = self.conj()?;
            return Ok(Expr::bin(Op::And, lhs, rhs));
        }
        Ok(lhs)
    }

    fn cmp(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.sum()?;
        let op = match self.peek() {
            Tok::Sym("==") => Op::Eq,
            Tok::Sym(">=") => Op::Geq,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.sum()?;
        if matches!(self.peek(), Tok::Sym("==") | Tok::Sym(">=")) {
            return self.error("comparisons do not associate; add parentheses");
        }
        Ok(Expr::bin(op, lhs, rhs))
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.quot()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("+") => Op::Add,
                Tok::Sym("-") => Op::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::bin(op, lhs, self.quot()?);
        }
    }

    fn quot(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.atom()?;
        while self.eat_sym("/") {
            lhs = Expr::bin(Op::Div, lhs, self.atom()?);
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Int(z) => {
                self.bump();
                Ok(Expr::int(z))
            }
            Tok::Ident(x) => {
                self.bump();
                Ok(Expr::Var(x))
            }
            Tok::Keyword("true") => {
                self.bump();
                Ok(Expr::bool(true))
            }
            Tok::Keyword("false") => {
                self.bump();
                Ok(Expr::bool(false))
            }
            Tok::Keyword("nondet") => {
                self.bump();
                Ok(Expr::NondetInt)
            }
            Tok::Keyword("assert") => {
                self.bump();
                self.expect(Tok::Sym("("))?;
                let e = self.expr()?;
                self.expect(Tok::Sym(")"))?;
                Ok(Expr::assert(e))
            }
            Tok::Keyword("let") | Tok::Keyword("if") => self.expr(),
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::Sym(")"))?;
                Ok(e)
            }
            other => self.error(format!("expected an expression, found {other}")),
        }
    }
}

/// Parses a whole program: exactly one expression.
pub fn parse_program(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        at: 0,
    };
    if *p.peek() == Tok::Eof {
        return p.error("empty program");
    }
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {} after the program", p.peek()));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ok_or_error_program() {
        let e = parse_program("let x = nondet in if x >= 6 then x else x / 0").unwrap();
        let want = Expr::let_in(
            "x",
            Expr::NondetInt,
            Expr::if_then_else(
                Expr::bin(Op::Geq, Expr::var("x"), Expr::int(6)),
                Expr::var("x"),
                Expr::bin(Op::Div, Expr::var("x"), Expr::int(0)),
            ),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn star_is_rejected_with_position() {
        let err = parse_program("1 + 2 * 3").unwrap_err();
        assert_eq!(err.pos, Pos { line: 1, col: 7 });
    }

    #[test]
    fn assert_with_comment() {
        assert_eq!(
            parse_program("assert (true) // ok").unwrap(),
            Expr::assert(Expr::bool(true))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let e = parse_program("1 - 2 - 3 / 4 / 5 >= 0 && true && false").unwrap();
        assert_eq!(
            e.to_string(),
            "((((1 - 2) - ((3 / 4) / 5)) >= 0) && (true && false))"
        );
    }

    #[test]
    fn comparisons_do_not_chain() {
        assert!(parse_program("1 == 2 == true").is_err());
        assert!(parse_program("(1 == 2) == true").is_ok());
    }

    #[test]
    fn reserved_words_are_not_variables() {
        let err = parse_program("let in = 1 in 2").unwrap_err();
        assert!(err.message.contains("reserved"), "{err}");
    }

    #[test]
    fn empty_and_trailing_input() {
        assert_eq!(
            parse_program("  // nothing\n").unwrap_err().message,
            "empty program"
        );
        let err = parse_program("1\n  2").unwrap_err();
        assert_eq!(err.pos, Pos { line: 2, col: 3 });
    }

    #[test]
    fn display_reparses() {
        let src = "let x = nondet in let y = (if x >= 0 then 0 - x else x) in assert (y == 0 - 3 && true)";
        let e = parse_program(src).unwrap();
        assert_eq!(parse_program(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn utf8_identifiers_and_columns() {
        let e = parse_program("let größe = 1 in größe").unwrap();
        assert_eq!(e, Expr::let_in("größe", Expr::int(1), Expr::var("größe")));
        let err = parse_program("let é = 1 in é * 2").unwrap_err();
        assert_eq!(err.pos, Pos { line: 1, col: 16 });
    }
}
