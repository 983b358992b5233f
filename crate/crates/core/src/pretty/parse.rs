use thiserror::Error;

use super::{binary_precedence, COND_PREC, LOGAND_PREC, LOGOR_PREC};
use crate::ast::{Expr, Ident};
use crate::values::{BinaryOp, CIntType, ImplParams, Rank, Signedness, UnaryOp};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("at offset {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number { digits: String, suffix: String },
    Punct(&'static str),
}

const PUNCTS: &[&str] = &[
    "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "++", "--", "(", ")", "[", "]", ",", "?", ":",
    "+", "-", "*", "/", "%", "&", "|", "^", "<", ">", "!", "~", "=",
];

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            toks.push((Tok::Ident(src[start..i].to_string()), start));
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let digits = src[start..i].to_string();
            let sstart = i;
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            toks.push((
                Tok::Number {
                    digits,
                    suffix: src[sstart..i].to_string(),
                },
                start,
            ));
        } else {
            let rest = &src[i..];
            let p = PUNCTS
                .iter()
                .find(|p| rest.starts_with(**p))
                .ok_or_else(|| ParseError {
                    pos: i,
                    msg: format!("unexpected character `{}`", rest.chars().next().unwrap()),
                })?;
            toks.push((Tok::Punct(p), i));
            i += p.len();
        }
    }
    Ok(toks)
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    parse_expr_with(src, &ImplParams::default())
}

/// Parses a C expression. Constant types follow the C rules for decimal
/// literals under `params`.
pub fn parse_expr_with(src: &str, params: &ImplParams) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: src.len(),
        params,
    };
    let e = p.cond()?;
    if p.pos < p.toks.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    params: &'a ImplParams,
}

const TYPE_WORDS: &[&str] = &["signed", "unsigned", "char", "short", "int", "long"];

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            pos: self.offset(),
            msg: msg.into(),
        }
    }

    fn eat(&mut self, p: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Punct(q)) if *q == p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<(), ParseError> {
        if self.eat(p) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{p}`")))
        }
    }

    fn cond(&mut self) -> Result<Expr, ParseError> {
        let test = self.binary(LOGOR_PREC)?;
        if self.eat("?") {
            let a = self.cond()?;
            self.expect(":")?;
            let b = self.cond()?;
            Ok(Expr::cond(test, a, b))
        } else {
            Ok(test)
        }
    }

    fn peek_binary(&self) -> Option<(u8, Option<BinaryOp>)> {
        let Some(Tok::Punct(p)) = self.peek() else {
            return None;
        };
        match *p {
            "&&" => Some((LOGAND_PREC, None)),
            "||" => Some((LOGOR_PREC, None)),
            _ => BinaryOp::ALL
                .into_iter()
                .find(|op| op.symbol() == *p)
                .map(|op| (binary_precedence(op), Some(op))),
        }
    }

    /// Precedence climbing over the left-associative binary levels.
    fn binary(&mut self, min_prec: u8) -> Result<Expr, ParseError> {
        debug_assert!(min_prec > COND_PREC);
        let mut lhs = self.unary()?;
        while let Some((prec, op)) = self.peek_binary() {
            if prec < min_prec {
                break;
            }
            self.pos += 1;
            let rhs = self.binary(prec + 1)?;
            lhs = match op {
                Some(op) => Expr::binary(op, lhs, rhs),
                None if prec == LOGAND_PREC => Expr::logand(lhs, rhs),
                None => Expr::logor(lhs, rhs),
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let op = match self.peek() {
            Some(Tok::Punct("+")) => Some(UnaryOp::Plus),
            Some(Tok::Punct("-")) => Some(UnaryOp::Minus),
            Some(Tok::Punct("!")) => Some(UnaryOp::LogNot),
            Some(Tok::Punct("~")) => Some(UnaryOp::BitNot),
            Some(Tok::Punct(p @ ("++" | "--"))) => {
                return Err(self.error(format!("`{p}` is not supported")))
            }
            _ => None,
        };
        if let Some(op) = op {
            self.pos += 1;
            return Ok(Expr::unary(op, self.unary()?));
        }
        let is_cast = matches!(self.peek(), Some(Tok::Punct("(")))
            && matches!(self.peek_at(1), Some(Tok::Ident(w)) if TYPE_WORDS.contains(&w.as_str()));
        if is_cast {
            self.pos += 1;
            let ty = self.type_name()?;
            self.expect(")")?;
            return Ok(Expr::cast(ty, self.unary()?));
        }
        self.postfix()
    }

    fn type_name(&mut self) -> Result<CIntType, ParseError> {
        let start = self.offset();
        let mut words = Vec::new();
        while let Some(Tok::Ident(w)) = self.peek() {
            if !TYPE_WORDS.contains(&w.as_str()) {
                break;
            }
            words.push(w.clone());
            self.pos += 1;
        }
        let count = |w: &str| words.iter().filter(|x| *x == w).count();
        let err = |msg: &str| ParseError {
            pos: start,
            msg: format!("{msg}: `{}`", words.join(" ")),
        };
        let (signed, unsigned) = (count("signed"), count("unsigned"));
        let (chars, shorts, ints, longs) = (count("char"), count("short"), count("int"), count("long"));
        if signed + unsigned > 1 || chars > 1 || shorts > 1 || ints > 1 || longs > 2 {
            return Err(err("invalid type name"));
        }
        let rank = match (chars, shorts, longs) {
            (1, 0, 0) if ints == 0 => Rank::Char,
            (0, 1, 0) => Rank::Short,
            (0, 0, 0) => Rank::Int,
            (0, 0, 1) => Rank::Long,
            (0, 0, 2) => Rank::LLong,
            _ => return Err(err("invalid type name")),
        };
        if rank == Rank::Char && signed + unsigned == 0 {
            return Err(err("plain char is not supported"));
        }
        if rank == Rank::Int && ints == 0 && signed + unsigned == 0 {
            return Err(err("missing type specifier"));
        }
        let sign = if unsigned == 1 {
            Signedness::Unsigned
        } else {
            Signedness::Signed
        };
        Ok(CIntType::new(sign, rank))
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.peek().cloned() {
            Some(Tok::Number { digits, suffix }) => {
                self.pos += 1;
                self.constant(&digits, &suffix, offset)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let id = Ident::new(name).map_err(|e| ParseError {
                    pos: offset,
                    msg: e.to_string(),
                })?;
                if self.eat("(") {
                    let mut args = Vec::new();
                    if !self.eat(")") {
                        loop {
                            args.push(self.cond()?);
                            if self.eat(")") {
                                break;
                            }
                            self.expect(",")?;
                        }
                    }
                    Ok(Expr::Call(id, args))
                } else if self.eat("[") {
                    let idx = self.cond()?;
                    self.expect("]")?;
                    Ok(Expr::Index(id, Box::new(idx)))
                } else {
                    Ok(Expr::Var(id))
                }
            }
            Some(Tok::Punct("(")) => {
                self.pos += 1;
                let e = self.cond()?;
                self.expect(")")?;
                Ok(e)
            }
            Some(_) => Err(self.error("expected an expression")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn constant(&self, digits: &str, suffix: &str, pos: usize) -> Result<Expr, ParseError> {
        let err = |msg: String| ParseError { pos, msg };
        if digits.len() > 1 && digits.starts_with('0') {
            return Err(err(format!("octal constant `{digits}` is not supported")));
        }
        let value: i128 = digits
            .parse()
            .map_err(|_| err(format!("constant `{digits}` is too large")))?;
        let candidates: &[CIntType] = match suffix.to_ascii_uppercase().as_str() {
            "" => &[CIntType::SINT, CIntType::SLONG, CIntType::SLLONG],
            "U" => &[CIntType::UINT, CIntType::ULONG, CIntType::ULLONG],
            "L" => &[CIntType::SLONG, CIntType::SLLONG],
            "UL" | "LU" => &[CIntType::ULONG, CIntType::ULLONG],
            "LL" => &[CIntType::SLLONG],
            "ULL" | "LLU" => &[CIntType::ULLONG],
            _ => return Err(err(format!("invalid constant suffix `{suffix}`"))),
        };
        candidates
            .iter()
            .find(|&&t| self.params.in_range(t, value))
            .map(|&ty| Expr::Const { value, ty })
            .ok_or_else(|| err(format!("constant `{digits}{suffix}` fits no type")))
    }
}
