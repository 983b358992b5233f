//! A small S-expression reader for the IR surface syntax.
//!
//! Bare symbols are case-insensitive and read as lower case; `|...|` symbols
//! keep their exact spelling. `;` starts a line comment and `#| ... |#` a
//! block comment.

use super::parse::IrParseError;
use super::Span;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SexpKind {
    /// A bare symbol, lower-cased.
    Sym(String),
    /// A `|...|` symbol.
    Bar(String),
    Int(i128),
    List(Vec<Sexp>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sexp {
    pub kind: SexpKind,
    pub span: Span,
}

impl Sexp {
    pub fn sym(&self) -> Option<&str> {
        match &self.kind {
            SexpKind::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match &self.kind {
            SexpKind::List(items) => Some(items),
            _ => None,
        }
    }

    /// Head symbol of a list whose first element is a bare symbol.
    pub fn head(&self) -> Option<&str> {
        self.list().and_then(|l| l.first()).and_then(Sexp::sym)
    }
}

struct Reader {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
}

pub fn read_all(src: &str) -> Result<Vec<Sexp>, IrParseError> {
    let mut r = Reader {
        chars: src.chars().collect(),
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        r.skip_ws()?;
        if r.peek().is_none() {
            return Ok(out);
        }
        out.push(r.read()?);
    }
}

fn is_delim(c: char) -> bool {
    c.is_whitespace() || matches!(c, '(' | ')' | ';' | '|' | '"' | '\'')
}

impl Reader {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn span(&self) -> Span {
        Span {
            line: self.line,
            col: self.col,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err(&self, span: Span, msg: impl Into<String>) -> IrParseError {
        IrParseError::new(span, msg)
    }

    fn skip_ws(&mut self) -> Result<(), IrParseError> {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some(';') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                Some('#') if self.chars.get(self.pos + 1) == Some(&'|') => {
                    let start = self.span();
                    self.bump();
                    self.bump();
                    loop {
                        match self.bump() {
                            None => return Err(self.err(start, "unterminated block comment")),
                            Some('|') if self.peek() == Some('#') => {
                                self.bump();
                                break;
                            }
                            Some(_) => {}
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn read(&mut self) -> Result<Sexp, IrParseError> {
        self.skip_ws()?;
        let span = self.span();
        match self.peek() {
            None => Err(self.err(span, "unexpected end of input")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_ws()?;
                    match self.peek() {
                        None => return Err(self.err(span, "unclosed parenthesis")),
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp {
                                kind: SexpKind::List(items),
                                span,
                            });
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(')') => Err(self.err(span, "unexpected `)`")),
            Some('|') => {
                self.bump();
                let mut name = String::new();
                loop {
                    match self.bump() {
                        None => return Err(self.err(span, "unterminated `|` symbol")),
                        Some('|') => break,
                        Some('\\') => return Err(self.err(span, "escapes in `|` symbols are not supported")),
                        Some(c) => name.push(c),
                    }
                }
                Ok(Sexp {
                    kind: SexpKind::Bar(name),
                    span,
                })
            }
            Some(c) if c == '"' || c == '\'' || c == '`' || c == ',' => {
                Err(self.err(span, format!("unsupported syntax `{c}`")))
            }
            Some(_) => {
                let mut tok = String::new();
                while let Some(c) = self.peek() {
                    if is_delim(c) {
                        break;
                    }
                    tok.push(c);
                    self.bump();
                }
                if let Some(n) = parse_int(&tok) {
                    return Ok(Sexp {
                        kind: SexpKind::Int(n),
                        span,
                    });
                }
                if tok.chars().next().is_some_and(|c| c.is_ascii_digit())
                    || (tok.len() > 1 && (tok.starts_with('-') || tok.starts_with('+'))
                        && tok[1..].chars().all(|c| c.is_ascii_digit()))
                {
                    return Err(self.err(span, format!("integer literal `{tok}` out of range")));
                }
                Ok(Sexp {
                    kind: SexpKind::Sym(tok.to_ascii_lowercase()),
                    span,
                })
            }
        }
    }
}

fn parse_int(tok: &str) -> Option<i128> {
    let digits = tok.strip_prefix(['-', '+']).unwrap_or(tok);
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    tok.parse::<i128>().ok()
}
