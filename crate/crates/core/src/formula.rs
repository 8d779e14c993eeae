//! The propositional modal language: one box/diamond pair over intuitionistic
//! connectives.
//!
//! Concrete syntax, loosest binding first:
//!
//! ```text
//! formula := impl
//! impl    := disj ("->" impl)?
//! disj    := conj ("|" conj)*
//! conj    := unary ("&" unary)*
//! unary   := "~" unary | "[]" unary | "<>" unary | primary
//! primary := atom | "_|_" | "T" | "(" formula ")"
//! atom    := [a-z][a-zA-Z0-9_]*
//! ```
//!
//! Negation is not a node: `~A` parses to `A -> _|_`, and `T` to
//! `_|_ -> _|_`. A `#` starts a comment that runs to the end of the line.

use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::{BTreeSet, HashSet};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Formula {
    Atom(String),
    Bottom,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Box(Box<Formula>),
    Diamond(Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Formula {
        Formula::implies(a, Formula::Bottom)
    }

    pub fn boxed(a: Formula) -> Formula {
        Formula::Box(Box::new(a))
    }

    pub fn diamond(a: Formula) -> Formula {
        Formula::Diamond(Box::new(a))
    }

    /// `_|_ -> _|_`, a theorem of every logic handled here.
    pub fn top() -> Formula {
        Formula::implies(Formula::Bottom, Formula::Bottom)
    }

    /// Number of logical symbols: every connective and every `_|_` counts
    /// one, atoms count zero.
    pub fn complexity(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Bottom => 1,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                1 + a.complexity() + b.complexity()
            }
            Formula::Box(a) | Formula::Diamond(a) => 1 + a.complexity(),
        }
    }

    /// Connective nesting depth; atoms and `_|_` have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bottom => 0,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                1 + a.depth().max(b.depth())
            }
            Formula::Box(a) | Formula::Diamond(a) => 1 + a.depth(),
        }
    }

    pub fn is_modal(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::Bottom => false,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.is_modal() || b.is_modal()
            }
            Formula::Box(_) | Formula::Diamond(_) => true,
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(p) => {
                out.insert(p.clone());
            }
            Formula::Bottom => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            Formula::Box(a) | Formula::Diamond(a) => a.collect_atoms(out),
        }
    }

    /// Distinct subformulas in post-order, `self` last.
    pub fn subformulas(&self) -> Vec<Formula> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        self.post_order(&mut seen, &mut out);
        out
    }

    fn post_order(&self, seen: &mut HashSet<Formula>, out: &mut Vec<Formula>) {
        match self {
            Formula::Atom(_) | Formula::Bottom => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.post_order(seen, out);
                b.post_order(seen, out);
            }
            Formula::Box(a) | Formula::Diamond(a) => a.post_order(seen, out),
        }
        if seen.insert(self.clone()) {
            out.push(self.clone());
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        render_into(self, Prec::Impl, &mut s);
        s
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl std::str::FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Formula> {
        parse(s)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Impl,
    Disj,
    Conj,
    Unary,
}

fn render_into(f: &Formula, ctx: Prec, out: &mut String) {
    let parenthesize = match f {
        Formula::Implies(_, b) if **b == Formula::Bottom => false,
        Formula::Implies(..) => ctx > Prec::Impl,
        Formula::Or(..) => ctx > Prec::Disj,
        Formula::And(..) => ctx > Prec::Conj,
        _ => false,
    };
    if parenthesize {
        out.push('(');
    }
    match f {
        Formula::Atom(p) => out.push_str(p),
        Formula::Bottom => out.push_str("_|_"),
        Formula::Implies(a, b) if **b == Formula::Bottom => {
            out.push('~');
            render_into(a, Prec::Unary, out);
        }
        Formula::Implies(a, b) => {
            render_into(a, Prec::Disj, out);
            out.push_str(" -> ");
            render_into(b, Prec::Impl, out);
        }
        Formula::Or(a, b) => {
            render_into(a, Prec::Disj, out);
            out.push_str(" | ");
            render_into(b, Prec::Conj, out);
        }
        Formula::And(a, b) => {
            render_into(a, Prec::Conj, out);
            out.push_str(" & ");
            render_into(b, Prec::Unary, out);
        }
        Formula::Box(a) => {
            out.push_str("[]");
            render_into(a, Prec::Unary, out);
        }
        Formula::Diamond(a) => {
            out.push_str("<>");
            render_into(a, Prec::Unary, out);
        }
    }
    if parenthesize {
        out.push(')');
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Atom(String),
    Bottom,
    Top,
    Not,
    Box,
    Diamond,
    And,
    Or,
    Arrow,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Atom(p) => format!("atom `{p}`"),
            Tok::Bottom => "`_|_`".into(),
            Tok::Top => "`T`".into(),
            Tok::Not => "`~`".into(),
            Tok::Box => "`[]`".into(),
            Tok::Diamond => "`<>`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }
}

/// Tokens paired with their 1-based character position.
fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        let starts = |s: &str| {
            s.chars()
                .enumerate()
                .all(|(k, sc)| chars.get(i + k) == Some(&sc))
        };
        if c.is_whitespace() {
            i += 1;
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if starts("->") {
            toks.push((Tok::Arrow, pos));
            i += 2;
        } else if starts("[]") {
            toks.push((Tok::Box, pos));
            i += 2;
        } else if starts("<>") {
            toks.push((Tok::Diamond, pos));
            i += 2;
        } else if starts("_|_") {
            toks.push((Tok::Bottom, pos));
            i += 3;
        } else if c.is_ascii_lowercase() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push((Tok::Atom(chars[start..i].iter().collect()), pos));
        } else if c == 'T' && !chars.get(i + 1).is_some_and(|n| n.is_ascii_alphanumeric() || *n == '_') {
            toks.push((Tok::Top, pos));
            i += 1;
        } else {
            let tok = match c {
                '~' => Tok::Not,
                '&' => Tok::And,
                '|' => Tok::Or,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => {
                    return Err(Error::Syntax {
                        pos,
                        msg: format!("unexpected character `{c}`"),
                    })
                }
            };
            toks.push((tok, pos));
            i += 1;
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end_pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end_pos, |(_, p)| *p)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implication()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Tok::Or) {
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::And) {
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat(&Tok::Not) {
            Ok(Formula::not(self.unary()?))
        } else if self.eat(&Tok::Box) {
            Ok(Formula::boxed(self.unary()?))
        } else if self.eat(&Tok::Diamond) {
            Ok(Formula::diamond(self.unary()?))
        } else {
            self.primary()
        }
    }

    fn primary(&mut self) -> Result<Formula> {
        let pos = self.pos();
        let Some(tok) = self.peek().cloned() else {
            return Err(Error::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            });
        };
        self.at += 1;
        match tok {
            Tok::Atom(p) => Ok(Formula::Atom(p)),
            Tok::Bottom => Ok(Formula::Bottom),
            Tok::Top => Ok(Formula::top()),
            Tok::LParen => {
                let inner = self.implication()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.at += 1;
                        Ok(inner)
                    }
                    None => Err(Error::Unbalanced { pos }),
                    Some(other) => Err(Error::Syntax {
                        pos: self.pos(),
                        msg: format!("expected `)`, found {}", other.describe()),
                    }),
                }
            }
            Tok::RParen => Err(Error::Unbalanced { pos }),
            other => Err(Error::Syntax {
                pos,
                msg: format!("expected a formula, found {}", other.describe()),
            }),
        }
    }
}

pub fn parse(text: &str) -> Result<Formula> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut parser = Parser {
        toks,
        at: 0,
        end_pos: text.chars().count() + 1,
    };
    let f = parser.implication()?;
    match parser.toks.get(parser.at) {
        None => Ok(f),
        Some((Tok::RParen, pos)) => Err(Error::Unbalanced { pos: *pos }),
        Some((tok, pos)) => Err(Error::Syntax {
            pos: *pos,
            msg: format!("unexpected {} after complete formula", tok.describe()),
        }),
    }
}

pub fn render(f: &Formula) -> String {
    f.render()
}

/// Parses a formula file: one formula per non-blank line, `#` comments.
pub fn parse_formula_list(text: &str) -> Result<Vec<Formula>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        out.push(parse(body).map_err(|e| Error::ModelFile {
            line: n + 1,
            msg: e.to_string(),
        })?);
    }
    Ok(out)
}

/// Every formula over `atoms` with depth at most `depth`, built from the
/// primitive connectives (and the modal ones when `modal` is set).
///
/// The count grows doubly exponentially; depth 2 over two atoms is already
/// several thousand formulas.
pub fn all_formulas(atoms: &[&str], depth: usize, modal: bool) -> Vec<Formula> {
    let mut layers: Vec<Vec<Formula>> = vec![atoms
        .iter()
        .map(|a| Formula::atom(a))
        .chain(std::iter::once(Formula::Bottom))
        .collect()];
    for d in 1..=depth {
        let below: Vec<&Formula> = layers.iter().flatten().collect();
        let last = &layers[d - 1];
        let mut next = Vec::new();
        if modal {
            for f in last {
                next.push(Formula::boxed(f.clone()));
                next.push(Formula::diamond(f.clone()));
            }
        }
        for a in &below {
            for b in &below {
                if a.depth() == d - 1 || b.depth() == d - 1 {
                    next.push(Formula::and((*a).clone(), (*b).clone()));
                    next.push(Formula::or((*a).clone(), (*b).clone()));
                    next.push(Formula::implies((*a).clone(), (*b).clone()));
                }
            }
        }
        layers.push(next);
    }
    layers.into_iter().flatten().collect()
}
