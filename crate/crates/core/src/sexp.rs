//! Minimal s-expression reader for SMT-LIB2 output.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a) => Some(a),
            Sexp::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items) => Some(items),
            Sexp::Atom(_) => None,
        }
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) => f.write_str(a),
            Sexp::List(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SexpError {
    pub offset: usize,
    pub message: String,
    /// The input ended inside an expression; more text may complete it.
    pub incomplete: bool,
}

impl fmt::Display for SexpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: {}", self.offset, self.message)
    }
}

/// Parses every top-level expression in `input`.
pub fn parse_all(input: &str) -> Result<Vec<Sexp>, SexpError> {
    let mut reader = Reader {
        src: input.as_bytes(),
        text: input,
        pos: 0,
    };
    let mut out = Vec::new();
    loop {
        reader.skip_trivia();
        if reader.pos >= reader.src.len() {
            return Ok(out);
        }
        out.push(reader.expr()?);
    }
}

/// Parses exactly one expression.
pub fn parse_one(input: &str) -> Result<Sexp, SexpError> {
    let mut all = parse_all(input)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        n => Err(SexpError {
            offset: 0,
            message: format!("expected one expression, found {n}"),
            incomplete: n == 0,
        }),
    }
}

struct Reader<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
}

impl Reader<'_> {
    fn err(&self, message: impl Into<String>) -> SexpError {
        SexpError {
            offset: self.pos,
            message: message.into(),
            incomplete: self.pos >= self.src.len(),
        }
    }

    fn skip_trivia(&mut self) {
        while self.pos < self.src.len() {
            match self.src[self.pos] {
                b';' => {
                    while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn expr(&mut self) -> Result<Sexp, SexpError> {
        self.skip_trivia();
        match self.src.get(self.pos) {
            None => Err(self.err("unexpected end of input")),
            Some(b')') => Err(self.err("unbalanced ')'")),
            Some(b'(') => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.src.get(self.pos) {
                        None => return Err(self.err("unclosed '('")),
                        Some(b')') => {
                            self.pos += 1;
                            return Ok(Sexp::List(items));
                        }
                        Some(_) => items.push(self.expr()?),
                    }
                }
            }
            Some(b'"') => self.delimited(b'"'),
            Some(b'|') => self.delimited(b'|'),
            Some(_) => {
                let start = self.pos;
                while self.pos < self.src.len() {
                    let c = self.src[self.pos];
                    if c.is_ascii_whitespace() || c == b'(' || c == b')' || c == b';' {
                        break;
                    }
                    self.pos += 1;
                }
                Ok(Sexp::Atom(self.text[start..self.pos].to_string()))
            }
        }
    }

    /// String literals and quoted symbols, kept with their delimiters.
    fn delimited(&mut self, delim: u8) -> Result<Sexp, SexpError> {
        let start = self.pos;
        self.pos += 1;
        loop {
            match self.src.get(self.pos) {
                None => return Err(self.err("unterminated literal")),
                Some(&c) if c == delim => {
                    // SMT-LIB escapes a quote inside a string by doubling it.
                    if delim == b'"' && self.src.get(self.pos + 1) == Some(&b'"') {
                        self.pos += 2;
                        continue;
                    }
                    self.pos += 1;
                    return Ok(Sexp::Atom(self.text[start..self.pos].to_string()));
                }
                Some(_) => self.pos += 1,
            }
        }
    }
}
