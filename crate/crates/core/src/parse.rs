//! Recursive-descent parsers for the textual QBF and MALL grammars.
//!
//! QBF:  `F`, `T`, ident, `~`ident, `phi /\ phi`, `phi \/ phi`,
//!       `forall x. phi`, `exists x. phi`. `/\` binds tighter than `\/`,
//!       both associate left, quantifier bodies extend to the right.
//! MALL: `bot`, `1`, `0`, `top`, ident, `~`ident, `(A # B)`, `(A * B)`,
//!       `(A + B)`, `(A & B)`, plus the sugar `A -o B` (= `~A # B`) and
//!       `A ->+ B` (= `~A + B`). Parentheses are optional at top level.
//!
//! QBF identifiers must start with a letter; names starting with `_` are
//! reserved for generated extension variables and only the MALL parser
//! accepts them.

use crate::formula::{limp, plimp, MallFormula, QbfFormula};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the input.
    pub pos: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at byte {}: {}", self.pos, self.msg)
    }
}

impl std::error::Error for ParseError {}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{tok}`")))
        }
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    /// Longest identifier at the cursor: [A-Za-z_][A-Za-z0-9_']*.
    fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let mut len = 0;
        for (i, c) in rest.char_indices() {
            let ok = if i == 0 {
                c.is_ascii_alphabetic() || c == '_'
            } else {
                c.is_ascii_alphanumeric() || c == '_' || c == '\''
            };
            if ok {
                len = i + c.len_utf8();
            } else {
                break;
            }
        }
        if len == 0 {
            None
        } else {
            self.pos += len;
            Some(&rest[..len])
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }
}

// ---------------------------------------------------------------------------
// QBF
// ---------------------------------------------------------------------------

const QBF_RESERVED: [&str; 4] = ["F", "T", "forall", "exists"];

pub fn parse_qbf(text: &str) -> Result<QbfFormula, ParseError> {
    let mut cur = Cursor::new(text);
    let f = qbf_formula(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.error("trailing input"));
    }
    Ok(f)
}

fn qbf_formula(cur: &mut Cursor) -> Result<QbfFormula, ParseError> {
    cur.skip_ws();
    let save = cur.pos;
    if let Some(word) = cur.ident() {
        if word == "forall" || word == "exists" {
            let var = qbf_var(cur)?;
            cur.expect(".")?;
            cur.skip_ws();
            if cur.at_end() {
                return Err(cur.error("missing quantifier body"));
            }
            let body = qbf_formula(cur)?;
            return Ok(if word == "forall" {
                QbfFormula::forall(&var, body)
            } else {
                QbfFormula::exists(&var, body)
            });
        }
        cur.pos = save;
    }
    qbf_or(cur)
}

fn qbf_var(cur: &mut Cursor) -> Result<String, ParseError> {
    let at = {
        cur.skip_ws();
        cur.pos
    };
    match cur.ident() {
        Some(id) if !QBF_RESERVED.contains(&id) && !id.starts_with('_') => Ok(id.to_string()),
        Some(_) => Err(ParseError {
            pos: at,
            msg: "reserved word or reserved `_` prefix used as variable".into(),
        }),
        None => Err(ParseError {
            pos: at,
            msg: "expected variable name".into(),
        }),
    }
}

fn qbf_or(cur: &mut Cursor) -> Result<QbfFormula, ParseError> {
    let mut acc = qbf_and(cur)?;
    while cur.eat("\\/") {
        let rhs = qbf_and(cur)?;
        acc = QbfFormula::or(acc, rhs);
    }
    Ok(acc)
}

fn qbf_and(cur: &mut Cursor) -> Result<QbfFormula, ParseError> {
    let mut acc = qbf_atom(cur)?;
    while cur.eat("/\\") {
        let rhs = qbf_atom(cur)?;
        acc = QbfFormula::and(acc, rhs);
    }
    Ok(acc)
}

fn qbf_atom(cur: &mut Cursor) -> Result<QbfFormula, ParseError> {
    cur.skip_ws();
    if cur.eat("(") {
        let f = qbf_formula(cur)?;
        cur.expect(")")?;
        return Ok(f);
    }
    if cur.eat("~") {
        let v = qbf_var(cur)?;
        return Ok(QbfFormula::negvar(&v));
    }
    let at = cur.pos;
    match cur.ident() {
        Some("F") => Ok(QbfFormula::False),
        Some("T") => Ok(QbfFormula::True),
        Some("forall") | Some("exists") => {
            cur.pos = at;
            qbf_formula(cur)
        }
        Some(id) if !id.starts_with('_') => Ok(QbfFormula::var(id)),
        Some(_) => Err(ParseError {
            pos: at,
            msg: "`_`-prefixed names are reserved".into(),
        }),
        None => Err(cur.error("expected formula")),
    }
}

// ---------------------------------------------------------------------------
// MALL
// ---------------------------------------------------------------------------

const MALL_RESERVED: [&str; 2] = ["bot", "top"];

pub fn parse_mall(text: &str) -> Result<MallFormula, ParseError> {
    let mut cur = Cursor::new(text);
    let f = mall_formula(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.error("trailing input"));
    }
    Ok(f)
}

/// A comma-separated cedent of MALL formulas. The empty string parses to
/// the empty cedent.
pub fn parse_mall_cedent(text: &str) -> Result<Vec<MallFormula>, ParseError> {
    let mut out = Vec::new();
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Ok(out);
    }
    let mut cur = Cursor::new(text);
    loop {
        out.push(mall_formula(&mut cur)?);
        if !cur.eat(",") {
            break;
        }
    }
    if !cur.at_end() {
        return Err(cur.error("trailing input"));
    }
    Ok(out)
}

// implications are right-associative and bind loosest
fn mall_formula(cur: &mut Cursor) -> Result<MallFormula, ParseError> {
    let lhs = mall_bin(cur)?;
    if cur.eat("->+") {
        let rhs = mall_formula(cur)?;
        return Ok(plimp(&lhs, rhs));
    }
    if cur.eat("-o") {
        let rhs = mall_formula(cur)?;
        return Ok(limp(&lhs, rhs));
    }
    Ok(lhs)
}

fn mall_bin(cur: &mut Cursor) -> Result<MallFormula, ParseError> {
    let mut acc = mall_atom(cur)?;
    loop {
        cur.skip_ws();
        // a `-` here starts `-o` or `->+`, handled one level up
        let op = match cur.peek_char() {
            Some('#') => MallOp::Par,
            Some('*') => MallOp::Tensor,
            Some('&') => MallOp::With,
            Some('+') => MallOp::Plus,
            _ => break,
        };
        cur.pos += 1;
        let rhs = mall_atom(cur)?;
        acc = match op {
            MallOp::Par => MallFormula::par(acc, rhs),
            MallOp::Tensor => MallFormula::tensor(acc, rhs),
            MallOp::Plus => MallFormula::plus(acc, rhs),
            MallOp::With => MallFormula::with(acc, rhs),
        };
    }
    Ok(acc)
}

enum MallOp {
    Par,
    Tensor,
    Plus,
    With,
}

fn mall_atom(cur: &mut Cursor) -> Result<MallFormula, ParseError> {
    cur.skip_ws();
    if cur.eat("(") {
        let f = mall_formula(cur)?;
        cur.expect(")")?;
        return Ok(f);
    }
    if cur.eat("~") {
        let at = cur.pos;
        return match cur.ident() {
            Some(id) if !MALL_RESERVED.contains(&id) => Ok(MallFormula::negvar(id)),
            _ => Err(ParseError {
                pos: at,
                msg: "expected variable after `~`".into(),
            }),
        };
    }
    if cur.eat("1") {
        return Ok(MallFormula::One);
    }
    if cur.eat("0") {
        return Ok(MallFormula::Zero);
    }
    let at = {
        cur.skip_ws();
        cur.pos
    };
    match cur.ident() {
        Some("bot") => Ok(MallFormula::Bot),
        Some("top") => Ok(MallFormula::Top),
        Some(id) => Ok(MallFormula::var(id)),
        None => Err(ParseError {
            pos: at,
            msg: "expected formula".into(),
        }),
    }
}
