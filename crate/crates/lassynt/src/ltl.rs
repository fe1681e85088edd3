//! LTL abstract syntax, parsing, negation normal form, and exact semantics
//! over ultimately periodic words.
//!
//! The evaluator here is the ground truth the automata and encoding modules
//! are tested against: it works directly on the finite base of a lasso with
//! a two-pass fixpoint for U/R, independent of any automaton construction.

use std::collections::BTreeSet;
use std::error::Error;
use std::fmt;

use crate::lasso::{Alphabet, Lasso};

/// LTL formula over named atomic propositions. `F`/`G` are first-class and
/// rewritten at NNF time; `->` is desugared by the parser.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Ltl {
    True,
    False,
    Atom(String),
    NegAtom(String),
    Not(Box<Ltl>),
    And(Box<Ltl>, Box<Ltl>),
    Or(Box<Ltl>, Box<Ltl>),
    Next(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
    Release(Box<Ltl>, Box<Ltl>),
    Eventually(Box<Ltl>),
    Globally(Box<Ltl>),
}

impl Ltl {
    pub fn atom(name: impl Into<String>) -> Ltl {
        Ltl::Atom(name.into())
    }

    pub fn neg_atom(name: impl Into<String>) -> Ltl {
        Ltl::NegAtom(name.into())
    }

    pub fn not(self) -> Ltl {
        Ltl::Not(Box::new(self))
    }

    pub fn and(self, rhs: Ltl) -> Ltl {
        Ltl::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Ltl) -> Ltl {
        Ltl::Or(Box::new(self), Box::new(rhs))
    }

    pub fn next(self) -> Ltl {
        Ltl::Next(Box::new(self))
    }

    pub fn until(self, rhs: Ltl) -> Ltl {
        Ltl::Until(Box::new(self), Box::new(rhs))
    }

    pub fn release(self, rhs: Ltl) -> Ltl {
        Ltl::Release(Box::new(self), Box::new(rhs))
    }

    pub fn eventually(self) -> Ltl {
        Ltl::Eventually(Box::new(self))
    }

    pub fn globally(self) -> Ltl {
        Ltl::Globally(Box::new(self))
    }

    /// `a -> b` as `!a | b`, negating atoms in place.
    pub fn implies(self, rhs: Ltl) -> Ltl {
        let neg = match self {
            Ltl::Atom(a) => Ltl::NegAtom(a),
            Ltl::NegAtom(a) => Ltl::Atom(a),
            other => other.not(),
        };
        neg.or(rhs)
    }

    /// All atom names occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<&str> {
        let mut set = BTreeSet::new();
        self.collect_atoms(&mut set);
        set
    }

    fn collect_atoms<'a>(&'a self, set: &mut BTreeSet<&'a str>) {
        match self {
            Ltl::True | Ltl::False => {}
            Ltl::Atom(a) | Ltl::NegAtom(a) => {
                set.insert(a);
            }
            Ltl::Not(f) | Ltl::Next(f) | Ltl::Eventually(f) | Ltl::Globally(f) => {
                f.collect_atoms(set)
            }
            Ltl::And(f, g) | Ltl::Or(f, g) | Ltl::Until(f, g) | Ltl::Release(f, g) => {
                f.collect_atoms(set);
                g.collect_atoms(set);
            }
        }
    }

    /// Node count, used for size reporting.
    pub fn size(&self) -> usize {
        match self {
            Ltl::True | Ltl::False | Ltl::Atom(_) | Ltl::NegAtom(_) => 1,
            Ltl::Not(f) | Ltl::Next(f) | Ltl::Eventually(f) | Ltl::Globally(f) => 1 + f.size(),
            Ltl::And(f, g) | Ltl::Or(f, g) | Ltl::Until(f, g) | Ltl::Release(f, g) => {
                1 + f.size() + g.size()
            }
        }
    }

    /// Negation normal form over `{literal, ∧, ∨, X, U, R}`. `F φ` becomes
    /// `true U φ` and `G φ` becomes `false R φ`.
    pub fn to_nnf(&self) -> Ltl {
        match self {
            Ltl::True => Ltl::True,
            Ltl::False => Ltl::False,
            Ltl::Atom(a) => Ltl::Atom(a.clone()),
            Ltl::NegAtom(a) => Ltl::NegAtom(a.clone()),
            Ltl::Not(f) => f.negate_nnf(),
            Ltl::And(f, g) => f.to_nnf().and(g.to_nnf()),
            Ltl::Or(f, g) => f.to_nnf().or(g.to_nnf()),
            Ltl::Next(f) => f.to_nnf().next(),
            Ltl::Until(f, g) => f.to_nnf().until(g.to_nnf()),
            Ltl::Release(f, g) => f.to_nnf().release(g.to_nnf()),
            Ltl::Eventually(f) => Ltl::True.until(f.to_nnf()),
            Ltl::Globally(f) => Ltl::False.release(f.to_nnf()),
        }
    }

    /// NNF of the negation.
    fn negate_nnf(&self) -> Ltl {
        match self {
            Ltl::True => Ltl::False,
            Ltl::False => Ltl::True,
            Ltl::Atom(a) => Ltl::NegAtom(a.clone()),
            Ltl::NegAtom(a) => Ltl::Atom(a.clone()),
            Ltl::Not(f) => f.to_nnf(),
            Ltl::And(f, g) => f.negate_nnf().or(g.negate_nnf()),
            Ltl::Or(f, g) => f.negate_nnf().and(g.negate_nnf()),
            Ltl::Next(f) => f.negate_nnf().next(),
            Ltl::Until(f, g) => f.negate_nnf().release(g.negate_nnf()),
            Ltl::Release(f, g) => f.negate_nnf().until(g.negate_nnf()),
            Ltl::Eventually(f) => Ltl::False.release(f.negate_nnf()),
            Ltl::Globally(f) => Ltl::True.until(f.negate_nnf()),
        }
    }

    pub fn is_nnf(&self) -> bool {
        match self {
            Ltl::True | Ltl::False | Ltl::Atom(_) | Ltl::NegAtom(_) => true,
            Ltl::Not(_) | Ltl::Eventually(_) | Ltl::Globally(_) => false,
            Ltl::Next(f) => f.is_nnf(),
            Ltl::And(f, g) | Ltl::Or(f, g) | Ltl::Until(f, g) | Ltl::Release(f, g) => {
                f.is_nnf() && g.is_nnf()
            }
        }
    }
}

// Precedence levels for printing: | < & < U/R < unary < atom.
fn prec(f: &Ltl) -> u8 {
    match f {
        Ltl::Or(..) => 1,
        Ltl::And(..) => 2,
        Ltl::Until(..) | Ltl::Release(..) => 3,
        Ltl::Not(_) | Ltl::Next(_) | Ltl::Eventually(_) | Ltl::Globally(_) => 4,
        _ => 5,
    }
}

impl fmt::Display for Ltl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(out: &mut fmt::Formatter<'_>, c: &Ltl, min: u8) -> fmt::Result {
            if prec(c) < min {
                write!(out, "({c})")
            } else {
                write!(out, "{c}")
            }
        }
        match self {
            Ltl::True => write!(f, "true"),
            Ltl::False => write!(f, "false"),
            Ltl::Atom(a) => write!(f, "{a}"),
            Ltl::NegAtom(a) => write!(f, "!{a}"),
            Ltl::Not(c) => {
                write!(f, "!")?;
                child(f, c, 4)
            }
            Ltl::Next(c) => {
                write!(f, "X ")?;
                child(f, c, 4)
            }
            Ltl::Eventually(c) => {
                write!(f, "F ")?;
                child(f, c, 4)
            }
            Ltl::Globally(c) => {
                write!(f, "G ")?;
                child(f, c, 4)
            }
            Ltl::And(a, b) => {
                child(f, a, 2)?;
                write!(f, " & ")?;
                child(f, b, 2)
            }
            Ltl::Or(a, b) => {
                child(f, a, 1)?;
                write!(f, " | ")?;
                child(f, b, 1)
            }
            Ltl::Until(a, b) => {
                child(f, a, 4)?;
                write!(f, " U ")?;
                child(f, b, 3)
            }
            Ltl::Release(a, b) => {
                child(f, a, 4)?;
                write!(f, " R ")?;
                child(f, b, 3)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the input.
    pub pos: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at offset {}: {}", self.pos, self.msg)
    }
}

impl Error for ParseError {}

const KEYWORDS: [&str; 7] = ["U", "R", "X", "F", "G", "true", "false"];

struct Parser<'a> {
    input: &'a str,
    pos: usize,
    declared: &'a [String],
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.input[self.pos..].chars().next()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.input[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    /// Lowest precedence: implication, right-associative, desugared.
    fn formula(&mut self) -> Result<Ltl, ParseError> {
        let lhs = self.disjunction()?;
        self.skip_ws();
        if self.eat("->") {
            let rhs = self.formula()?;
            Ok(lhs.implies(rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Ltl, ParseError> {
        let mut lhs = self.conjunction()?;
        loop {
            self.skip_ws();
            // don't consume the '-' of '->'
            if self.peek() == Some('|') {
                self.pos += 1;
                lhs = lhs.or(self.conjunction()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn conjunction(&mut self) -> Result<Ltl, ParseError> {
        let mut lhs = self.until_release()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('&') {
                self.pos += 1;
                lhs = lhs.and(self.until_release()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn until_release(&mut self) -> Result<Ltl, ParseError> {
        let lhs = self.unary()?;
        self.skip_ws();
        match self.keyword() {
            Some("U") => {
                let rhs = self.until_release()?;
                Ok(lhs.until(rhs))
            }
            Some("R") => {
                let rhs = self.until_release()?;
                Ok(lhs.release(rhs))
            }
            _ => Ok(lhs),
        }
    }

    /// Consume `U` or `R` if it stands alone (not a prefix of an identifier).
    fn keyword(&mut self) -> Option<&'static str> {
        let rest = &self.input[self.pos..];
        for kw in ["U", "R"] {
            if rest.starts_with(kw) {
                let after = rest[kw.len()..].chars().next();
                if !matches!(after, Some(c) if c.is_alphanumeric() || c == '_') {
                    self.pos += kw.len();
                    return Some(kw);
                }
            }
        }
        None
    }

    fn unary(&mut self) -> Result<Ltl, ParseError> {
        self.skip_ws();
        if self.peek() == Some('!') {
            self.pos += 1;
            let child = self.unary()?;
            return Ok(match child {
                Ltl::Atom(a) => Ltl::NegAtom(a),
                Ltl::NegAtom(a) => Ltl::Atom(a),
                other => other.not(),
            });
        }
        // X/F/G only when followed by a non-identifier character
        let rest = &self.input[self.pos..];
        for (op, build) in [
            ("X", Ltl::next as fn(Ltl) -> Ltl),
            ("F", Ltl::eventually),
            ("G", Ltl::globally),
        ] {
            if rest.starts_with(op) {
                let after = rest[op.len()..].chars().next();
                if !matches!(after, Some(c) if c.is_alphanumeric() || c == '_') {
                    self.pos += op.len();
                    let child = self.unary()?;
                    return Ok(build(child));
                }
            }
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Ltl, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.formula()?;
                self.skip_ws();
                if self.peek() == Some(')') {
                    self.pos += 1;
                    Ok(inner)
                } else {
                    self.err("expected ')'")
                }
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        self.pos += c.len_utf8();
                    } else {
                        break;
                    }
                }
                let name = &self.input[start..self.pos];
                match name {
                    "true" => Ok(Ltl::True),
                    "false" => Ok(Ltl::False),
                    _ if KEYWORDS.contains(&name) => {
                        self.pos = start;
                        self.err(format!("operator {name} needs an operand"))
                    }
                    _ => {
                        if self.declared.iter().any(|d| d == name) {
                            Ok(Ltl::Atom(name.to_string()))
                        } else {
                            self.pos = start;
                            self.err(format!("undeclared atom '{name}'"))
                        }
                    }
                }
            }
            Some(c) => self.err(format!("unexpected character '{c}'")),
            None => self.err("unexpected end of formula"),
        }
    }
}

/// Parse an LTL formula. Every atom must occur in `declared`.
pub fn parse_ltl(text: &str, declared: &[String]) -> Result<Ltl, ParseError> {
    let mut p = Parser {
        input: text,
        pos: 0,
        declared,
    };
    if text.trim().is_empty() {
        return p.err("empty formula");
    }
    let f = p.formula()?;
    p.skip_ws();
    if p.pos != text.len() {
        return p.err("trailing input after formula");
    }
    Ok(f)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalError {
    pub atom: String,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "atom '{}' is not part of the trace alphabet", self.atom)
    }
}

impl Error for EvalError {}

/// Exact LTL satisfaction `u·v^ω ⊨ f`, evaluated by fixpoint over the finite
/// base positions with successor wrap `|u|+|v|-1 → |u|`. U/R take two passes:
/// the second pass stops flat at the last position, the first closes the loop
/// through the second pass's value at the loop start.
pub fn eval_on_lasso(f: &Ltl, trace: &Lasso, alphabet: &Alphabet) -> Result<bool, EvalError> {
    Ok(eval_positions(f, trace, alphabet)?[0])
}

/// Per-position truth values of `f` on the lasso base.
fn eval_positions(f: &Ltl, trace: &Lasso, alphabet: &Alphabet) -> Result<Vec<bool>, EvalError> {
    let len = trace.len();
    let lp = trace.loop_start();
    let letter = |h: usize| trace.at(h);
    let result = match f {
        Ltl::True => vec![true; len],
        Ltl::False => vec![false; len],
        Ltl::Atom(a) => {
            let bit = alphabet.index_of(a).ok_or_else(|| EvalError { atom: a.clone() })?;
            (0..len).map(|h| letter(h).contains(bit)).collect()
        }
        Ltl::NegAtom(a) => {
            let bit = alphabet.index_of(a).ok_or_else(|| EvalError { atom: a.clone() })?;
            (0..len).map(|h| !letter(h).contains(bit)).collect()
        }
        Ltl::Not(c) => {
            let v = eval_positions(c, trace, alphabet)?;
            v.into_iter().map(|b| !b).collect()
        }
        Ltl::And(a, b) => {
            let va = eval_positions(a, trace, alphabet)?;
            let vb = eval_positions(b, trace, alphabet)?;
            va.into_iter().zip(vb).map(|(x, y)| x && y).collect()
        }
        Ltl::Or(a, b) => {
            let va = eval_positions(a, trace, alphabet)?;
            let vb = eval_positions(b, trace, alphabet)?;
            va.into_iter().zip(vb).map(|(x, y)| x || y).collect()
        }
        Ltl::Next(c) => {
            let v = eval_positions(c, trace, alphabet)?;
            (0..len)
                .map(|h| if h + 1 < len { v[h + 1] } else { v[lp] })
                .collect()
        }
        Ltl::Until(a, b) => {
            let f_ = eval_positions(a, trace, alphabet)?;
            let g = eval_positions(b, trace, alphabet)?;
            fixpoint(len, lp, |h, next| g[h] || (f_[h] && next), false)
        }
        Ltl::Release(a, b) => {
            let f_ = eval_positions(a, trace, alphabet)?;
            let g = eval_positions(b, trace, alphabet)?;
            fixpoint(len, lp, |h, next| g[h] && (f_[h] || next), true)
        }
        Ltl::Eventually(c) => {
            let g = eval_positions(c, trace, alphabet)?;
            fixpoint(len, lp, |h, next| g[h] || next, false)
        }
        Ltl::Globally(c) => {
            let g = eval_positions(c, trace, alphabet)?;
            fixpoint(len, lp, |h, next| g[h] && next, true)
        }
    };
    Ok(result)
}

/// Two-pass evaluation of a one-step recurrence around the loop. `seed` is
/// the value assumed past the final position on the non-wrapping pass.
fn fixpoint(
    len: usize,
    loop_start: usize,
    step: impl Fn(usize, bool) -> bool,
    seed: bool,
) -> Vec<bool> {
    let mut pass2 = vec![false; len];
    for h in (0..len).rev() {
        let next = if h + 1 < len { pass2[h + 1] } else { seed };
        pass2[h] = step(h, next);
    }
    let mut pass1 = vec![false; len];
    for h in (0..len).rev() {
        let next = if h + 1 < len { pass1[h + 1] } else { pass2[loop_start] };
        pass1[h] = step(h, next);
    }
    pass1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lasso::Letter;

    fn atoms(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parse_examples() {
        let f = parse_ltl("G(!(g1 & g2))", &atoms(&["g1", "g2"])).unwrap();
        assert_eq!(
            f,
            Ltl::atom("g1").and(Ltl::atom("g2")).not().globally()
        );

        let f = parse_ltl("r", &atoms(&["r"])).unwrap();
        assert_eq!(f, Ltl::atom("r"));

        let f = parse_ltl("G(r -> F g)", &atoms(&["r", "g"])).unwrap();
        assert_eq!(
            f,
            Ltl::neg_atom("r").or(Ltl::atom("g").eventually()).globally()
        );
    }

    #[test]
    fn parse_precedence() {
        let ab = atoms(&["a", "b", "c"]);
        // U binds tighter than &, & tighter than |, -> loosest
        assert_eq!(
            parse_ltl("a U b & c", &ab).unwrap(),
            Ltl::atom("a").until(Ltl::atom("b")).and(Ltl::atom("c"))
        );
        assert_eq!(
            parse_ltl("a & b | c", &ab).unwrap(),
            Ltl::atom("a").and(Ltl::atom("b")).or(Ltl::atom("c"))
        );
        assert_eq!(
            parse_ltl("a U b U c", &ab).unwrap(),
            Ltl::atom("a").until(Ltl::atom("b").until(Ltl::atom("c")))
        );
        assert_eq!(
            parse_ltl("a -> b", &ab).unwrap(),
            Ltl::neg_atom("a").or(Ltl::atom("b"))
        );
        // X binds tighter than U
        assert_eq!(
            parse_ltl("X a U b", &ab).unwrap(),
            Ltl::atom("a").next().until(Ltl::atom("b"))
        );
    }

    #[test]
    fn parse_errors() {
        assert!(parse_ltl("", &atoms(&["a"])).is_err());
        assert!(parse_ltl("a &", &atoms(&["a"])).is_err());
        assert!(parse_ltl("(a", &atoms(&["a"])).is_err());
        let err = parse_ltl("a & q", &atoms(&["a"])).unwrap_err();
        assert!(err.msg.contains("undeclared"));
        assert_eq!(err.pos, 4);
    }

    #[test]
    fn atom_names_can_embed_operator_letters() {
        // identifiers starting with keyword letters parse as atoms
        let f = parse_ltl("Go & Una", &atoms(&["Go", "Una"])).unwrap();
        assert_eq!(f, Ltl::atom("Go").and(Ltl::atom("Una")));
    }

    #[test]
    fn nnf_examples() {
        let f = Ltl::atom("r").globally().not();
        assert_eq!(f.to_nnf(), Ltl::True.until(Ltl::neg_atom("r")));

        assert_eq!(Ltl::atom("r").to_nnf(), Ltl::atom("r"));

        let f = Ltl::atom("a").until(Ltl::atom("b")).not();
        assert_eq!(
            f.to_nnf(),
            Ltl::neg_atom("a").release(Ltl::neg_atom("b"))
        );
    }

    #[test]
    fn eval_examples() {
        let alpha = Alphabet::from_names(&["r", "g"]);
        let r = alpha.letter_of(&["r"]);
        let g = alpha.letter_of(&["g"]);

        let word = Lasso::constant(r);
        assert!(eval_on_lasso(&Ltl::atom("r").globally(), &word, &alpha).unwrap());
        assert!(!eval_on_lasso(&Ltl::neg_atom("r").eventually(), &word, &alpha).unwrap());

        // G(r -> F g) on ({r}, ({g})^ω): grant holds from position 1 on
        let trace = Lasso::new(vec![r], vec![g]);
        let f = Ltl::atom("r")
            .implies(Ltl::atom("g").eventually())
            .globally();
        assert!(eval_on_lasso(&f, &trace, &alpha).unwrap());
    }

    #[test]
    fn eval_unknown_atom() {
        let alpha = Alphabet::from_names(&["r"]);
        let err = eval_on_lasso(&Ltl::atom("q"), &Lasso::constant(Letter(0)), &alpha);
        assert_eq!(err.unwrap_err().atom, "q");
    }

    #[test]
    fn display_round_trip() {
        let names = atoms(&["r", "g"]);
        for text in [
            "G(r -> F g)",
            "(a_upd R g) U (r & !g | X r)",
            "!(r U g) & F(G !r)",
        ] {
            let names2 = atoms(&["r", "g", "a_upd"]);
            let f = parse_ltl(text, &names2).unwrap();
            let printed = f.to_string();
            let reparsed = parse_ltl(&printed, &names2).unwrap();
            assert_eq!(f, reparsed, "print {printed:?}");
        }
        let _ = names;
    }
}
