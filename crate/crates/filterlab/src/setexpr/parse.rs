//! Recursive-descent parser for the set DSL.
//!
//! ```text
//! set  := "finite{" nums? "}" | "cofinite{" nums? "}" | "arith(" num "," num ")"
//!       | "squares" | "primes" | "blockunion(" name "," set ")"
//!       | "union(" set "," set ")" | "inter(" set "," set ")"
//!       | "diff(" set "," set ")" | "compl(" set ")" | "shift(" set "," num ")"
//!       | "adbranch(" bits ";" bits ")"
//! nums := num ("," num)*
//! ```
//! Whitespace is insignificant, keywords are case-sensitive, and numbers
//! are positive decimal integers (sets live in ℕ starting at 1).
//! `blockunion` resolves its name against the block partitions registered
//! on the [`SetParser`]; `adbranch` takes a head and a non-empty cycle of
//! bits describing a deterministic binary stream.

use std::collections::BTreeMap;

use thiserror::Error;

use super::SetExpr;
use crate::witness::{BitPattern, BlockPartition};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

/// Parser with an environment of named block partitions usable via
/// `blockunion(name, index)`.
#[derive(Debug, Default, Clone)]
pub struct SetParser {
    blocks: BTreeMap<String, BlockPartition>,
}

impl SetParser {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_blocks(blocks: BTreeMap<String, BlockPartition>) -> Self {
        SetParser { blocks }
    }

    pub fn register_blocks(&mut self, name: impl Into<String>, bp: BlockPartition) {
        self.blocks.insert(name.into(), bp);
    }

    pub fn parse(&self, text: &str) -> Result<SetExpr, ParseError> {
        let mut cur = Cursor {
            bytes: text.as_bytes(),
            pos: 0,
        };
        let expr = parse_set(&mut cur, self)?;
        cur.skip_ws();
        if cur.pos != cur.bytes.len() {
            return Err(cur.error("unexpected trailing input"));
        }
        Ok(expr)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, ch: u8) -> Result<(), ParseError> {
        self.skip_ws();
        if self.bytes.get(self.pos) == Some(&ch) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", ch as char)))
        }
    }

    fn ident(&mut self) -> Result<&'a str, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
        {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected an identifier"));
        }
        Ok(std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii"))
    }

    fn number(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected a positive decimal integer"));
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii");
        let value: u64 = text.parse().map_err(|_| ParseError {
            offset: start,
            message: format!("integer '{text}' out of range"),
        })?;
        if value == 0 {
            return Err(ParseError {
                offset: start,
                message: "0 is not a natural here; sets live in {1, 2, 3, ...}".into(),
            });
        }
        Ok(value)
    }

    /// Number position where zero is allowed (shift offsets).
    fn number_allowing_zero(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected a decimal integer"));
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii");
        text.parse().map_err(|_| ParseError {
            offset: start,
            message: format!("integer '{text}' out of range"),
        })
    }

    fn bits(&mut self) -> Result<Vec<bool>, ParseError> {
        self.skip_ws();
        let mut out = Vec::new();
        while let Some(b @ (b'0' | b'1')) = self.bytes.get(self.pos) {
            out.push(*b == b'1');
            self.pos += 1;
        }
        Ok(out)
    }
}

fn parse_num_list(cur: &mut Cursor) -> Result<Vec<u64>, ParseError> {
    let mut out = Vec::new();
    if cur.peek() == Some(b'}') {
        return Ok(out);
    }
    loop {
        out.push(cur.number()?);
        if cur.peek() == Some(b',') {
            cur.pos += 1;
        } else {
            break;
        }
    }
    Ok(out)
}

fn parse_set(cur: &mut Cursor, env: &SetParser) -> Result<SetExpr, ParseError> {
    cur.skip_ws();
    let kw_offset = cur.pos;
    let kw = cur.ident()?;
    match kw {
        "finite" | "cofinite" => {
            cur.expect(b'{')?;
            let nums = parse_num_list(cur)?;
            cur.expect(b'}')?;
            let build = if kw == "finite" {
                SetExpr::finite
            } else {
                SetExpr::cofinite
            };
            build(nums).map_err(|e| ParseError {
                offset: kw_offset,
                message: e.to_string(),
            })
        }
        "arith" => {
            cur.expect(b'(')?;
            let first = cur.number()?;
            cur.expect(b',')?;
            let step = cur.number()?;
            cur.expect(b')')?;
            SetExpr::arithmetic(first, step).map_err(|e| ParseError {
                offset: kw_offset,
                message: e.to_string(),
            })
        }
        "squares" => Ok(SetExpr::Squares),
        "primes" => Ok(SetExpr::Primes),
        "blockunion" => {
            cur.expect(b'(')?;
            let name_offset = cur.pos;
            let name = cur.ident()?.to_owned();
            let bp = env.blocks.get(&name).cloned().ok_or_else(|| ParseError {
                offset: name_offset,
                message: format!("unknown block partition '{name}'"),
            })?;
            cur.expect(b',')?;
            let index = parse_set(cur, env)?;
            cur.expect(b')')?;
            Ok(SetExpr::BlockUnion {
                label: Some(name),
                blocks: Box::new(bp),
                index: Box::new(index),
            })
        }
        "union" | "inter" | "diff" => {
            cur.expect(b'(')?;
            let a = parse_set(cur, env)?;
            cur.expect(b',')?;
            let b = parse_set(cur, env)?;
            cur.expect(b')')?;
            Ok(match kw {
                "union" => SetExpr::union(a, b),
                "inter" => SetExpr::intersection(a, b),
                _ => SetExpr::difference(a, b),
            })
        }
        "compl" => {
            cur.expect(b'(')?;
            let a = parse_set(cur, env)?;
            cur.expect(b')')?;
            Ok(SetExpr::complement(a))
        }
        "shift" => {
            cur.expect(b'(')?;
            let a = parse_set(cur, env)?;
            cur.expect(b',')?;
            let k = cur.number_allowing_zero()?;
            cur.expect(b')')?;
            Ok(a.shift(k))
        }
        "adbranch" => {
            cur.expect(b'(')?;
            let head = cur.bits()?;
            cur.expect(b';')?;
            let cycle_offset = cur.pos;
            let cycle = cur.bits()?;
            cur.expect(b')')?;
            let pattern = BitPattern::new(head, cycle).map_err(|e| ParseError {
                offset: cycle_offset,
                message: e.to_string(),
            })?;
            Ok(SetExpr::Branch(pattern))
        }
        other => Err(ParseError {
            offset: kw_offset,
            message: format!("unknown set constructor '{other}'"),
        }),
    }
}
