//! Object-language formulas: atoms, the formula tree, parsing and printing.
//!
//! Surface syntax (ASCII, with Unicode aliases):
//!
//! | connective | ASCII  | Unicode |
//! |------------|--------|---------|
//! | →          | `->`   | `→`     |
//! | ⊸          | `-o`   | `⊸`     |
//! | ∧          | `&`    | `∧`     |
//! | ⊗          | `*`    | `⊗`     |
//! | ∨          | `\|`   | `∨`     |
//! | ⊕          | `+`    | `⊕`     |
//! | ⊥          | `bot`  | `⊥`     |
//! | 0          | `zero` | `0`     |
//!
//! `{&,*}` bind tighter than `{|,+}`, which bind tighter than `{->,-o}`.
//! Implications associate to the right, everything else to the left.
//! The prefix forms `!i φ`, `!b φ` and `!e φ` are sugar for `φ -> zero`,
//! `φ -o bot` and `φ -o zero`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, SyntaxError};
use crate::translate;

/// An atomic proposition.
///
/// User atoms match `[a-z][a-z0-9_]*`. Names starting with `_` are reserved
/// for fresh atoms generated by the tooling (`_f1`, `_f2`, ...).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Atom(String);

const RESERVED_WORDS: [&str; 2] = ["bot", "zero"];

impl Atom {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if is_atom_name(&name) {
            Ok(Atom(name))
        } else {
            Err(Error::InvalidAtom(name))
        }
    }

    /// The `n`th fresh atom, `_f{n}`.
    pub fn fresh(n: usize) -> Self {
        Atom(format!("_f{n}"))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_reserved(&self) -> bool {
        self.0.starts_with('_')
    }
}

fn is_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    let head_ok = matches!(chars.next(), Some(c) if c.is_ascii_lowercase() || c == '_');
    head_ok
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        && name != "_"
        && !RESERVED_WORDS.contains(&name)
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Atom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Atom::new(s)
    }
}

impl TryFrom<String> for Atom {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        Atom::new(s)
    }
}

impl From<Atom> for String {
    fn from(a: Atom) -> String {
        a.0
    }
}

/// A formula of the object language.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Atom),
    /// Intrinsic absurdity ⊥.
    Bot,
    /// Extrinsic absurdity 0.
    Zero,
    /// Intrinsic conjunction ∧.
    And(Box<Formula>, Box<Formula>),
    /// Extrinsic conjunction ⊗.
    Tensor(Box<Formula>, Box<Formula>),
    /// Intrinsic disjunction ∨.
    Or(Box<Formula>, Box<Formula>),
    /// Extrinsic disjunction ⊕.
    Oplus(Box<Formula>, Box<Formula>),
    /// Intrinsic implication →.
    Implies(Box<Formula>, Box<Formula>),
    /// Extrinsic implication ⊸.
    Lolli(Box<Formula>, Box<Formula>),
}

/// Which connective fragment a formula lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FragmentTag {
    /// In the image of the rule-to-formula translation.
    Clausal,
    /// Atoms, ⊸, ⊗, ⊕ and 0 only.
    Extrinsic,
    /// Atoms, ⊸, ∧, ∨ and ⊥ only.
    Hybrid,
    General,
}

impl fmt::Display for FragmentTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FragmentTag::Clausal => "clausal",
            FragmentTag::Extrinsic => "extrinsic",
            FragmentTag::Hybrid => "hybrid",
            FragmentTag::General => "general",
        };
        f.write_str(s)
    }
}

macro_rules! binary_ctor {
    ($($name:ident => $variant:ident),* $(,)?) => {
        $(
            pub fn $name(lhs: Formula, rhs: Formula) -> Formula {
                Formula::$variant(Box::new(lhs), Box::new(rhs))
            }
        )*
    };
}

impl Formula {
    /// Atom shorthand for tests and examples. Panics on an invalid name.
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(Atom::new(name).expect("valid atom name"))
    }

    binary_ctor! {
        and => And,
        tensor => Tensor,
        or => Or,
        oplus => Oplus,
        implies => Implies,
        lolli => Lolli,
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Bot | Formula::Zero => {}
            Formula::And(l, r)
            | Formula::Tensor(l, r)
            | Formula::Or(l, r)
            | Formula::Oplus(l, r)
            | Formula::Implies(l, r)
            | Formula::Lolli(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    pub fn children(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Atom(_) | Formula::Bot | Formula::Zero => None,
            Formula::And(l, r)
            | Formula::Tensor(l, r)
            | Formula::Or(l, r)
            | Formula::Oplus(l, r)
            | Formula::Implies(l, r)
            | Formula::Lolli(l, r) => Some((l, r)),
        }
    }

    /// True if every node satisfies `pred`.
    pub fn all_nodes(&self, pred: &impl Fn(&Formula) -> bool) -> bool {
        pred(self)
            && self
                .children()
                .is_none_or(|(l, r)| l.all_nodes(pred) && r.all_nodes(pred))
    }

    pub fn size(&self) -> usize {
        1 + self.children().map_or(0, |(l, r)| l.size() + r.size())
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) | Formula::Lolli(..) => 1,
            Formula::Or(..) | Formula::Oplus(..) => 2,
            Formula::And(..) | Formula::Tensor(..) => 3,
            Formula::Atom(_) | Formula::Bot | Formula::Zero => 4,
        }
    }

    fn operator(&self) -> &'static str {
        match self {
            Formula::And(..) => "&",
            Formula::Tensor(..) => "*",
            Formula::Or(..) => "|",
            Formula::Oplus(..) => "+",
            Formula::Implies(..) => "->",
            Formula::Lolli(..) => "-o",
            Formula::Atom(_) | Formula::Bot | Formula::Zero => "",
        }
    }
}

/// The set of atoms occurring in `f`.
pub fn atoms_of(f: &Formula) -> BTreeSet<Atom> {
    f.atoms()
}

pub fn fragment_of(f: &Formula) -> FragmentTag {
    if translate::is_clausal(f) {
        FragmentTag::Clausal
    } else if f.all_nodes(&|n| {
        matches!(
            n,
            Formula::Atom(_) | Formula::Lolli(..) | Formula::Tensor(..) | Formula::Oplus(..) | Formula::Zero
        )
    }) {
        FragmentTag::Extrinsic
    } else if f.all_nodes(&|n| {
        matches!(
            n,
            Formula::Atom(_) | Formula::Lolli(..) | Formula::And(..) | Formula::Or(..) | Formula::Bot
        )
    }) {
        FragmentTag::Hybrid
    } else {
        FragmentTag::General
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Bot => f.write_str("bot"),
            Formula::Zero => f.write_str("zero"),
            _ => {
                let (lhs, rhs) = self.children().expect("binary node");
                let prec = self.precedence();
                // implications nest to the right, the rest to the left
                let (lhs_parens, rhs_parens) = if prec == 1 {
                    (lhs.precedence() <= prec, rhs.precedence() < prec)
                } else {
                    (lhs.precedence() < prec, rhs.precedence() <= prec)
                };
                write_operand(f, lhs, lhs_parens)?;
                write!(f, " {} ", self.operator())?;
                write_operand(f, rhs, rhs_parens)
            }
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, g: &Formula, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({g})")
    } else {
        write!(f, "{g}")
    }
}

/// Render with minimal parentheses. Inverse of [`parse_formula`].
pub fn render_formula(f: &Formula) -> String {
    f.to_string()
}

impl FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_formula(s)
    }
}

/// Parse a formula. Negation sugar is expanded during parsing.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = FormulaParser {
        sc: Scanner::new(text),
    };
    let f = p.imp()?;
    p.sc.skip_ws();
    if !p.sc.at_end() {
        return Err(p.sc.error(&["operator", "end of input"]));
    }
    Ok(f)
}

/// Character scanner shared by the formula and base parsers.
pub(crate) struct Scanner<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Scanner<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        Scanner { text, pos: 0 }
    }

    pub(crate) fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.text.len()
    }

    pub(crate) fn skip_ws(&mut self) {
        let rest = self.rest();
        self.pos += rest.len() - rest.trim_start().len();
    }

    /// Skips whitespace and `#` line comments.
    pub(crate) fn skip_ws_and_comments(&mut self) {
        loop {
            self.skip_ws();
            if self.rest().starts_with('#') {
                let len = self.rest().find('\n').unwrap_or(self.rest().len());
                self.pos += len;
            } else {
                break;
            }
        }
    }

    pub(crate) fn eat(&mut self, tok: &str) -> bool {
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    /// Eats `word` only if it is not immediately followed by an identifier character.
    pub(crate) fn eat_word(&mut self, word: &str) -> bool {
        let rest = self.rest();
        if rest.starts_with(word) && !rest[word.len()..].starts_with(is_ident_char) {
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    pub(crate) fn ident(&mut self) -> Option<&'a str> {
        let rest = self.rest();
        if !rest.starts_with(|c: char| c.is_ascii_lowercase() || c == '_') {
            return None;
        }
        let len = rest.find(|c: char| !is_ident_char(c)).unwrap_or(rest.len());
        self.pos += len;
        Some(&rest[..len])
    }

    pub(crate) fn pos(&self) -> usize {
        self.pos
    }

    pub(crate) fn set_pos(&mut self, pos: usize) {
        self.pos = pos;
    }

    pub(crate) fn error_at(&self, pos: usize, expected: &[&str]) -> Error {
        let before = &self.text[..pos];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        let found = match self.text[pos..].chars().next() {
            None => "end of input".to_string(),
            Some(c) => format!("`{c}`"),
        };
        Error::Syntax(SyntaxError {
            pos,
            line,
            column,
            found,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    pub(crate) fn error(&self, expected: &[&str]) -> Error {
        self.error_at(self.pos, expected)
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_'
}

const OPERAND_START: [&str; 7] = ["atom", "bot", "zero", "(", "!i", "!b", "!e"];

struct FormulaParser<'a> {
    sc: Scanner<'a>,
}

impl FormulaParser<'_> {
    fn imp(&mut self) -> Result<Formula> {
        let lhs = self.sum()?;
        self.sc.skip_ws();
        if self.sc.eat("->") || self.sc.eat("→") {
            Ok(Formula::implies(lhs, self.imp()?))
        } else if self.sc.eat("-o") || self.sc.eat("⊸") {
            Ok(Formula::lolli(lhs, self.imp()?))
        } else {
            Ok(lhs)
        }
    }

    fn sum(&mut self) -> Result<Formula> {
        let mut acc = self.prod()?;
        loop {
            self.sc.skip_ws();
            if self.sc.eat("|") || self.sc.eat("∨") {
                acc = Formula::or(acc, self.prod()?);
            } else if self.sc.eat("+") || self.sc.eat("⊕") {
                acc = Formula::oplus(acc, self.prod()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn prod(&mut self) -> Result<Formula> {
        let mut acc = self.unary()?;
        loop {
            self.sc.skip_ws();
            if self.sc.eat("&") || self.sc.eat("∧") {
                acc = Formula::and(acc, self.unary()?);
            } else if self.sc.eat("*") || self.sc.eat("⊗") {
                acc = Formula::tensor(acc, self.unary()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Formula> {
        self.sc.skip_ws();
        if self.sc.eat_word("!i") {
            Ok(Formula::implies(self.unary()?, Formula::Zero))
        } else if self.sc.eat_word("!b") {
            Ok(Formula::lolli(self.unary()?, Formula::Bot))
        } else if self.sc.eat_word("!e") {
            Ok(Formula::lolli(self.unary()?, Formula::Zero))
        } else {
            self.atom_expr()
        }
    }

    fn atom_expr(&mut self) -> Result<Formula> {
        self.sc.skip_ws();
        let start = self.sc.pos();
        if self.sc.eat("(") {
            let f = self.imp()?;
            self.sc.skip_ws();
            if !self.sc.eat(")") {
                return Err(self.sc.error(&[")", "operator"]));
            }
            return Ok(f);
        }
        if self.sc.eat("⊥") {
            return Ok(Formula::Bot);
        }
        if self.sc.eat_word("0") {
            return Ok(Formula::Zero);
        }
        match self.sc.ident() {
            Some("bot") => Ok(Formula::Bot),
            Some("zero") => Ok(Formula::Zero),
            Some(name) => Atom::new(name)
                .map(Formula::Atom)
                .map_err(|_| self.sc.error_at(start, &OPERAND_START)),
            None => Err(self.sc.error(&OPERAND_START)),
        }
    }
}
