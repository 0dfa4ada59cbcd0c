//! Expression text: parsing into raw trees, alphabet renaming, and printing
//! of interned expressions.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! ext  := sum (('\' | '&' | '^') sum)*      difference, intersection, symmetric difference
//! sum  := cat ('+' cat)*
//! cat  := post ('.'? post)*                 juxtaposition or explicit dot
//! post := atom '*'*
//! atom := letter | '0' | '1' | '(' ext ')'
//! ```
//!
//! Whitespace is ignored everywhere.

use std::fmt;

use rustc_hash::FxHashMap;

use crate::background::{Background, ExprId, Node};
use crate::error::{Error, ParseError, ParseErrorKind, Result};

/// A parsed expression before normalization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RawExpr {
    Zero,
    One,
    Letter(char),
    Star(Box<RawExpr>),
    Concat(Box<RawExpr>, Box<RawExpr>),
    Union(Box<RawExpr>, Box<RawExpr>),
    Diff(Box<RawExpr>, Box<RawExpr>),
    And(Box<RawExpr>, Box<RawExpr>),
    SymDiff(Box<RawExpr>, Box<RawExpr>),
}

impl RawExpr {
    pub fn star(e: RawExpr) -> RawExpr {
        RawExpr::Star(Box::new(e))
    }

    pub fn concat(l: RawExpr, r: RawExpr) -> RawExpr {
        RawExpr::Concat(Box::new(l), Box::new(r))
    }

    pub fn union(l: RawExpr, r: RawExpr) -> RawExpr {
        RawExpr::Union(Box::new(l), Box::new(r))
    }

    /// Symbol count: leaves, stars and binary operators, parentheses excluded.
    pub fn size(&self) -> usize {
        match self {
            RawExpr::Zero | RawExpr::One | RawExpr::Letter(_) => 1,
            RawExpr::Star(e) => 1 + e.size(),
            RawExpr::Concat(l, r)
            | RawExpr::Union(l, r)
            | RawExpr::Diff(l, r)
            | RawExpr::And(l, r)
            | RawExpr::SymDiff(l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn is_extended(&self) -> bool {
        match self {
            RawExpr::Zero | RawExpr::One | RawExpr::Letter(_) => false,
            RawExpr::Star(e) => e.is_extended(),
            RawExpr::Concat(l, r) | RawExpr::Union(l, r) => l.is_extended() || r.is_extended(),
            RawExpr::Diff(..) | RawExpr::And(..) | RawExpr::SymDiff(..) => true,
        }
    }

    /// Letters in order of first occurrence in the text.
    pub fn letters(&self) -> Vec<char> {
        let mut out = Vec::new();
        self.collect_letters(&mut out);
        out
    }

    fn collect_letters(&self, out: &mut Vec<char>) {
        match self {
            RawExpr::Zero | RawExpr::One => {}
            RawExpr::Letter(c) => {
                if !out.contains(c) {
                    out.push(*c);
                }
            }
            RawExpr::Star(e) => e.collect_letters(out),
            RawExpr::Concat(l, r)
            | RawExpr::Union(l, r)
            | RawExpr::Diff(l, r)
            | RawExpr::And(l, r)
            | RawExpr::SymDiff(l, r) => {
                l.collect_letters(out);
                r.collect_letters(out);
            }
        }
    }

    fn prec(&self) -> u8 {
        match self {
            RawExpr::Diff(..) | RawExpr::And(..) | RawExpr::SymDiff(..) => PREC_EXT,
            RawExpr::Union(..) => PREC_UNION,
            RawExpr::Concat(..) => PREC_CONCAT,
            _ => PREC_ATOM,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        let paren = self.prec() < ctx;
        if paren {
            f.write_str("(")?;
        }
        match self {
            RawExpr::Zero => f.write_str("0")?,
            RawExpr::One => f.write_str("1")?,
            RawExpr::Letter(c) => write!(f, "{c}")?,
            RawExpr::Star(e) => {
                e.write_at(f, PREC_ATOM)?;
                f.write_str("*")?;
            }
            RawExpr::Concat(l, r) => {
                l.write_at(f, PREC_CONCAT)?;
                r.write_at(f, PREC_CONCAT)?;
            }
            RawExpr::Union(l, r) => {
                l.write_at(f, PREC_UNION)?;
                f.write_str(" + ")?;
                r.write_at(f, PREC_UNION)?;
            }
            RawExpr::Diff(l, r) | RawExpr::And(l, r) | RawExpr::SymDiff(l, r) => {
                let op = match self {
                    RawExpr::Diff(..) => " \\ ",
                    RawExpr::And(..) => " & ",
                    _ => " ^ ",
                };
                l.write_at(f, PREC_EXT)?;
                f.write_str(op)?;
                r.write_at(f, PREC_EXT + 1)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for RawExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, PREC_EXT)
    }
}

const PREC_EXT: u8 = 0;
const PREC_UNION: u8 = 1;
const PREC_CONCAT: u8 = 2;
const PREC_ATOM: u8 = 3;

/// Bijection between source letters and internal letter indices `1..=k`,
/// assigned in order of first occurrence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AlphabetMap {
    letters: Vec<char>,
    index: FxHashMap<char, u32>,
}

impl AlphabetMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_letters(letters: impl IntoIterator<Item = char>) -> Self {
        let mut map = Self::new();
        for c in letters {
            map.insert(c);
        }
        map
    }

    /// Adds every letter of `e` not yet mapped.
    pub fn extend_with(&mut self, e: &RawExpr) {
        for c in e.letters() {
            self.insert(c);
        }
    }

    pub fn insert(&mut self, c: char) -> u32 {
        if let Some(&i) = self.index.get(&c) {
            return i;
        }
        self.letters.push(c);
        let i = self.letters.len() as u32;
        self.index.insert(c, i);
        i
    }

    pub fn index_of(&self, c: char) -> Option<u32> {
        self.index.get(&c).copied()
    }

    pub fn letter(&self, i: u32) -> Option<char> {
        (i as usize).checked_sub(1).and_then(|j| self.letters.get(j)).copied()
    }

    /// Alphabet size `k`.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[char] {
        &self.letters
    }
}

/// Parses `text` and returns the tree with its first-occurrence alphabet.
pub fn parse(text: &str) -> std::result::Result<(RawExpr, AlphabetMap), ParseError> {
    let expr = parse_raw(text)?;
    let map = AlphabetMap::from_letters(expr.letters());
    Ok((expr, map))
}

/// Parses `text` without building an alphabet map.
pub fn parse_raw(text: &str) -> std::result::Result<RawExpr, ParseError> {
    let tokens: Vec<(usize, char)> = text
        .char_indices()
        .filter(|(_, c)| !c.is_whitespace())
        .collect();
    if tokens.is_empty() {
        return Err(ParseError {
            offset: 0,
            kind: ParseErrorKind::Empty,
        });
    }
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let e = p.ext()?;
    if let Some((off, c)) = p.peek() {
        let kind = if c == ')' {
            ParseErrorKind::Unbalanced
        } else if is_operator(c) {
            ParseErrorKind::DanglingOperator
        } else {
            ParseErrorKind::UnknownChar(c)
        };
        return Err(ParseError { offset: off, kind });
    }
    Ok(e)
}

fn is_operator(c: char) -> bool {
    matches!(c, '+' | '.' | '*' | '\\' | '&' | '^')
}

struct Parser {
    tokens: Vec<(usize, char)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<(usize, char)> {
        self.tokens.get(self.pos).copied()
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end, |(o, _)| o)
    }

    fn ext(&mut self) -> std::result::Result<RawExpr, ParseError> {
        let mut left = self.sum()?;
        while let Some((_, c @ ('\\' | '&' | '^'))) = self.peek() {
            self.pos += 1;
            let right = self.sum()?;
            left = match c {
                '\\' => RawExpr::Diff(Box::new(left), Box::new(right)),
                '&' => RawExpr::And(Box::new(left), Box::new(right)),
                _ => RawExpr::SymDiff(Box::new(left), Box::new(right)),
            };
        }
        Ok(left)
    }

    fn sum(&mut self) -> std::result::Result<RawExpr, ParseError> {
        let mut left = self.cat()?;
        while let Some((_, '+')) = self.peek() {
            self.pos += 1;
            let right = self.cat()?;
            left = RawExpr::union(left, right);
        }
        Ok(left)
    }

    fn cat(&mut self) -> std::result::Result<RawExpr, ParseError> {
        let mut left = self.post()?;
        loop {
            match self.peek() {
                Some((_, '.')) => {
                    self.pos += 1;
                    let right = self.post()?;
                    left = RawExpr::concat(left, right);
                }
                Some((_, c)) if starts_atom(c) => {
                    let right = self.post()?;
                    left = RawExpr::concat(left, right);
                }
                _ => return Ok(left),
            }
        }
    }

    fn post(&mut self) -> std::result::Result<RawExpr, ParseError> {
        let mut e = self.atom()?;
        while let Some((_, '*')) = self.peek() {
            self.pos += 1;
            e = RawExpr::star(e);
        }
        Ok(e)
    }

    fn atom(&mut self) -> std::result::Result<RawExpr, ParseError> {
        let offset = self.offset();
        let Some((_, c)) = self.peek() else {
            return Err(ParseError {
                offset,
                kind: ParseErrorKind::DanglingOperator,
            });
        };
        match c {
            '0' => {
                self.pos += 1;
                Ok(RawExpr::Zero)
            }
            '1' => {
                self.pos += 1;
                Ok(RawExpr::One)
            }
            '(' => {
                self.pos += 1;
                if self.peek().is_none() {
                    return Err(ParseError {
                        offset,
                        kind: ParseErrorKind::Unbalanced,
                    });
                }
                let inner = self.ext().map_err(|e| {
                    if e.offset >= self.end {
                        ParseError {
                            offset,
                            kind: ParseErrorKind::Unbalanced,
                        }
                    } else {
                        e
                    }
                })?;
                match self.peek() {
                    Some((_, ')')) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    None => Err(ParseError {
                        offset,
                        kind: ParseErrorKind::Unbalanced,
                    }),
                    Some((off, c)) => Err(ParseError {
                        offset: off,
                        kind: ParseErrorKind::UnknownChar(c),
                    }),
                }
            }
            ')' => Err(ParseError {
                offset,
                kind: ParseErrorKind::Unbalanced,
            }),
            c if is_operator(c) => Err(ParseError {
                offset,
                kind: ParseErrorKind::DanglingOperator,
            }),
            c if c.is_alphabetic() => {
                self.pos += 1;
                Ok(RawExpr::Letter(c))
            }
            c => Err(ParseError {
                offset,
                kind: ParseErrorKind::UnknownChar(c),
            }),
        }
    }
}

fn starts_atom(c: char) -> bool {
    c == '(' || c == '0' || c == '1' || c.is_alphabetic()
}

/// Prints an interned expression with the caller's letters, using
/// parentheses only where precedence requires them.
pub fn print(e: ExprId, bg: &Background, map: &AlphabetMap) -> Result<String> {
    if !bg.is_live(e) {
        return Err(Error::StaleId(e));
    }
    let mut out = String::new();
    write_expr(&mut out, e, bg, map, PREC_EXT)?;
    Ok(out)
}

fn node_prec(node: &Node) -> u8 {
    match node {
        Node::Diff(..) | Node::And(..) | Node::SymDiff(..) => PREC_EXT,
        Node::Union(_) => PREC_UNION,
        Node::Concat(..) => PREC_CONCAT,
        _ => PREC_ATOM,
    }
}

fn write_expr(
    out: &mut String,
    e: ExprId,
    bg: &Background,
    map: &AlphabetMap,
    ctx: u8,
) -> Result<()> {
    let node = bg.node(e);
    let paren = node_prec(node) < ctx;
    if paren {
        out.push('(');
    }
    match node {
        Node::Zero => out.push('0'),
        Node::One => out.push('1'),
        Node::Letter(i) => out.push(map.letter(*i).ok_or(Error::UnknownLetter(*i))?),
        Node::Star(c) => {
            write_expr(out, *c, bg, map, PREC_ATOM)?;
            out.push('*');
        }
        Node::Concat(h, t) => {
            write_expr(out, *h, bg, map, PREC_CONCAT)?;
            write_expr(out, *t, bg, map, PREC_CONCAT)?;
        }
        Node::Union(members) => {
            for (i, m) in members.iter().enumerate() {
                if i > 0 {
                    out.push_str(" + ");
                }
                write_expr(out, *m, bg, map, PREC_UNION)?;
            }
        }
        Node::Diff(l, r) | Node::And(l, r) | Node::SymDiff(l, r) => {
            let op = match node {
                Node::Diff(..) => " \\ ",
                Node::And(..) => " & ",
                _ => " ^ ",
            };
            write_expr(out, *l, bg, map, PREC_EXT)?;
            out.push_str(op);
            write_expr(out, *r, bg, map, PREC_EXT + 1)?;
        }
    }
    if paren {
        out.push(')');
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(c: char) -> RawExpr {
        RawExpr::Letter(c)
    }

    #[test]
    fn star_of_union() {
        let (e, map) = parse("(a + b)*").unwrap();
        assert_eq!(e, RawExpr::star(RawExpr::union(l('a'), l('b'))));
        assert_eq!(map.index_of('a'), Some(1));
        assert_eq!(map.index_of('b'), Some(2));
        assert_eq!(map.len(), 2);
    }

    #[test]
    fn conway_intersection_parses() {
        let (e, map) = parse("(xy* + yx)* & (y*x + xy)*").unwrap();
        match e {
            RawExpr::And(l, r) => {
                assert!(matches!(*l, RawExpr::Star(_)));
                assert!(matches!(*r, RawExpr::Star(_)));
            }
            other => panic!("expected intersection, got {other:?}"),
        }
        assert_eq!(map.letters(), &['x', 'y']);
    }

    #[test]
    fn precedence() {
        let e = parse_raw("a.b + c*d").unwrap();
        assert_eq!(
            e,
            RawExpr::union(
                RawExpr::concat(l('a'), l('b')),
                RawExpr::concat(RawExpr::star(l('c')), l('d'))
            )
        );
        let e = parse_raw("a + b \\ c & d").unwrap();
        assert!(matches!(e, RawExpr::And(..)));
        let e = parse_raw("a**").unwrap();
        assert_eq!(e, RawExpr::star(RawExpr::star(l('a'))));
    }

    #[test]
    fn errors() {
        let err = parse_raw("a(").unwrap_err();
        assert_eq!(err.offset, 1);
        assert_eq!(err.kind, ParseErrorKind::Unbalanced);

        assert_eq!(parse_raw("").unwrap_err().kind, ParseErrorKind::Empty);
        assert_eq!(parse_raw("   ").unwrap_err().kind, ParseErrorKind::Empty);

        let err = parse_raw("a +").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DanglingOperator);

        let err = parse_raw("a)").unwrap_err();
        assert_eq!(err, ParseError { offset: 1, kind: ParseErrorKind::Unbalanced });

        let err = parse_raw("a # b").unwrap_err();
        assert_eq!(err, ParseError { offset: 2, kind: ParseErrorKind::UnknownChar('#') });

        let err = parse_raw("(a + b").unwrap_err();
        assert_eq!(err, ParseError { offset: 0, kind: ParseErrorKind::Unbalanced });

        assert_eq!(parse_raw("+a").unwrap_err().offset, 0);
        assert_eq!(parse_raw("*").unwrap_err().kind, ParseErrorKind::DanglingOperator);
    }

    #[test]
    fn raw_size_and_display() {
        let e = parse_raw("(aa + b)a*c(ba*c)*(ba*d + d) + (aa + b)a*d").unwrap();
        assert_eq!(e.size(), 38);
        let e = parse_raw("(a + b)*").unwrap();
        assert_eq!(e.size(), 4);
        for text in ["(a + b)*c", "a** + 0", "(a \\ b) \\ (c & d)", "(ab)*(1 + c)"] {
            let e = parse_raw(text).unwrap();
            let again = parse_raw(&e.to_string()).unwrap();
            assert_eq!(e.size(), again.size(), "{text}");
        }
        assert_eq!(parse_raw("a \\ (b \\ c)").unwrap().to_string(), "a \\ (b \\ c)");
    }
}
