//! Formula trees, the text parser, and the printer.
//!
//! ```text
//! φ ::= true | false | P_a(x) | x <= y | x in X | !φ | φ | φ | φ & φ | φ -> φ
//!     | exists x . φ | forall x . φ | first(x) | last(x) | succ(y,x)
//!     | partition(X1,...,Xm)
//!     | <t,f,u,e> | φ (+) φ | φ (*) φ | sum x . φ | sum X . φ | prod x . φ
//!     | (x in X -> <k>)
//! ```
//!
//! Binary operators of one kind chain to the left; mixing kinds needs
//! parentheses. Quantifier bodies extend as far right as possible. Derived
//! forms are expanded while parsing, so the trees only hold primitives.

use std::collections::BTreeSet;
use std::fmt;

use crate::alphabet::Var;
use crate::error::{Error, Result};
use crate::kvalues::{parse_truth, TruthValue};

/// Boolean MSO formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Mso {
    True,
    /// `P_a(x)`: position `x` carries base letter `a`.
    Label(String, Var),
    Le(Var, Var),
    In(Var, Var),
    Not(Box<Mso>),
    Or(Box<Mso>, Box<Mso>),
    /// First or second order by the case of the variable.
    Exists(Var, Box<Mso>),
}

/// MK-fuzzy MSO formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MkFormula {
    Const(TruthValue),
    Bool(Mso),
    Plus(Box<MkFormula>, Box<MkFormula>),
    Times(Box<MkFormula>, Box<MkFormula>),
    SumFo(Var, Box<MkFormula>),
    SumSo(Var, Box<MkFormula>),
    ProdFo(Var, Box<MkFormula>),
}

// Builders for the primitive and derived forms.

pub fn not(a: Mso) -> Mso {
    Mso::Not(Box::new(a))
}

pub fn or(a: Mso, b: Mso) -> Mso {
    Mso::Or(Box::new(a), Box::new(b))
}

pub fn and(a: Mso, b: Mso) -> Mso {
    not(or(not(a), not(b)))
}

pub fn implies(a: Mso, b: Mso) -> Mso {
    or(not(a), b)
}

pub fn exists(v: &Var, a: Mso) -> Mso {
    Mso::Exists(v.clone(), Box::new(a))
}

pub fn forall(v: &Var, a: Mso) -> Mso {
    not(exists(v, not(a)))
}

pub fn falsum() -> Mso {
    not(Mso::True)
}

pub fn le(x: &Var, y: &Var) -> Mso {
    Mso::Le(x.clone(), y.clone())
}

pub fn member(x: &Var, set: &Var) -> Mso {
    Mso::In(x.clone(), set.clone())
}

/// Left-nested disjunction; `false` when empty.
pub fn or_all(items: impl IntoIterator<Item = Mso>) -> Mso {
    items.into_iter().reduce(or).unwrap_or_else(falsum)
}

/// Left-nested conjunction; `true` when empty.
pub fn and_all(items: impl IntoIterator<Item = Mso>) -> Mso {
    items.into_iter().reduce(and).unwrap_or(Mso::True)
}

/// `first(y) := ∀x·y ≤ x`, with `x` the given bound name.
pub fn first(y: &Var, x: &Var) -> Mso {
    forall(x, le(y, x))
}

pub fn last(y: &Var, x: &Var) -> Mso {
    forall(x, le(x, y))
}

/// `y = x+1 := x ≤ y ∧ ¬(y ≤ x) ∧ ∀z·(z ≤ x ∨ y ≤ z)`.
pub fn succ(y: &Var, x: &Var, z: &Var) -> Mso {
    and_all([
        le(x, y),
        not(le(y, x)),
        forall(z, or(le(z, x), le(y, z))),
    ])
}

/// `∀x·⋁_i (x ∈ X_i ∧ ⋀_{j≠i} ¬(x ∈ X_j))`.
pub fn partition(sets: &[Var], x: &Var) -> Mso {
    let body = or_all((0..sets.len()).map(|i| {
        and_all(
            std::iter::once(member(x, &sets[i])).chain(
                (0..sets.len())
                    .filter(|&j| j != i)
                    .map(|j| not(member(x, &sets[j]))),
            ),
        )
    }));
    forall(x, body)
}

/// `(x ∈ X → k)`, read as `(x ∈ X) ⊗ k`.
pub fn clause(x: &Var, set: &Var, k: TruthValue) -> MkFormula {
    MkFormula::Times(
        Box::new(MkFormula::Bool(member(x, set))),
        Box::new(MkFormula::Const(k)),
    )
}

impl Mso {
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        let mut see = |v: &Var| {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        };
        match self {
            Mso::True => {}
            Mso::Label(_, x) => see(x),
            Mso::Le(x, y) | Mso::In(x, y) => {
                see(x);
                see(y);
            }
            Mso::Not(a) => a.collect_free(bound, out),
            Mso::Or(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Mso::Exists(v, a) => {
                bound.push(v.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Renames free occurrences of `from` to `to`.
    pub fn rename(&self, from: &Var, to: &Var) -> Mso {
        let r = |v: &Var| if v == from { to.clone() } else { v.clone() };
        match self {
            Mso::True => Mso::True,
            Mso::Label(a, x) => Mso::Label(a.clone(), r(x)),
            Mso::Le(x, y) => Mso::Le(r(x), r(y)),
            Mso::In(x, y) => Mso::In(r(x), r(y)),
            Mso::Not(a) => not(a.rename(from, to)),
            Mso::Or(a, b) => or(a.rename(from, to), b.rename(from, to)),
            Mso::Exists(v, a) if v == from => Mso::Exists(v.clone(), a.clone()),
            Mso::Exists(v, a) => exists(v, a.rename(from, to)),
        }
    }

    /// Every variable name appearing anywhere, bound or free.
    pub fn all_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Mso::True => {}
            Mso::Label(_, x) => {
                out.insert(x.clone());
            }
            Mso::Le(x, y) | Mso::In(x, y) => {
                out.insert(x.clone());
                out.insert(y.clone());
            }
            Mso::Not(a) => a.all_vars(out),
            Mso::Or(a, b) => {
                a.all_vars(out);
                b.all_vars(out);
            }
            Mso::Exists(v, a) => {
                out.insert(v.clone());
                a.all_vars(out);
            }
        }
    }
}

impl MkFormula {
    pub fn free_vars(&self) -> BTreeSet<Var> {
        match self {
            MkFormula::Const(_) => BTreeSet::new(),
            MkFormula::Bool(m) => m.free_vars(),
            MkFormula::Plus(a, b) | MkFormula::Times(a, b) => {
                let mut s = a.free_vars();
                s.extend(b.free_vars());
                s
            }
            MkFormula::SumFo(v, a) | MkFormula::SumSo(v, a) | MkFormula::ProdFo(v, a) => {
                let mut s = a.free_vars();
                s.remove(v);
                s
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// The embedded MSO formula, if this node is one.
    pub fn as_bool(&self) -> Option<&Mso> {
        match self {
            MkFormula::Bool(m) => Some(m),
            _ => None,
        }
    }

    pub fn all_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            MkFormula::Const(_) => {}
            MkFormula::Bool(m) => m.all_vars(out),
            MkFormula::Plus(a, b) | MkFormula::Times(a, b) => {
                a.all_vars(out);
                b.all_vars(out);
            }
            MkFormula::SumFo(v, a) | MkFormula::SumSo(v, a) | MkFormula::ProdFo(v, a) => {
                out.insert(v.clone());
                a.all_vars(out);
            }
        }
    }

    /// Number of nodes, counting embedded MSO nodes.
    pub fn size(&self) -> usize {
        fn mso(m: &Mso) -> usize {
            match m {
                Mso::True | Mso::Label(..) | Mso::Le(..) | Mso::In(..) => 1,
                Mso::Not(a) | Mso::Exists(_, a) => 1 + mso(a),
                Mso::Or(a, b) => 1 + mso(a) + mso(b),
            }
        }
        match self {
            MkFormula::Const(_) => 1,
            MkFormula::Bool(m) => mso(m),
            MkFormula::Plus(a, b) | MkFormula::Times(a, b) => 1 + a.size() + b.size(),
            MkFormula::SumFo(_, a) | MkFormula::SumSo(_, a) | MkFormula::ProdFo(_, a) => {
                1 + a.size()
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Printing. Binary nodes and quantifiers are always parenthesized, so the
// output re-parses to the same tree.

/// `¬(¬a ∨ ¬b)` as `(a, b)`.
fn as_and(m: &Mso) -> Option<(&Mso, &Mso)> {
    match m {
        Mso::Not(inner) => match &**inner {
            Mso::Or(a, b) => match (&**a, &**b) {
                (Mso::Not(a), Mso::Not(b)) => Some((a, b)),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

fn conjuncts<'a>(m: &'a Mso, out: &mut Vec<&'a Mso>) {
    match as_and(m) {
        Some((a, b)) => {
            conjuncts(a, out);
            out.push(b);
        }
        None => out.push(m),
    }
}

fn disjuncts<'a>(m: &'a Mso, out: &mut Vec<&'a Mso>) {
    match m {
        Mso::Or(a, b) if as_and(m).is_none() => {
            disjuncts(a, out);
            out.push(b);
        }
        _ => out.push(m),
    }
}

fn join<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T], op: &str) -> fmt::Result {
    f.write_str("(")?;
    for (i, m) in items.iter().enumerate() {
        if i > 0 {
            write!(f, " {op} ")?;
        }
        write!(f, "{m}")?;
    }
    f.write_str(")")
}

/// Derived forms are printed back in their surface syntax, so the text
/// re-parses to the same tree.
impl fmt::Display for Mso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if as_and(self).is_some() {
            let mut cs = Vec::new();
            conjuncts(self, &mut cs);
            return join(f, &cs, "&");
        }
        match self {
            Mso::True => f.write_str("true"),
            Mso::Label(a, x) => write!(f, "P_{a}({x})"),
            Mso::Le(x, y) => write!(f, "({x} <= {y})"),
            Mso::In(x, y) => write!(f, "({x} in {y})"),
            Mso::Not(a) => match &**a {
                Mso::True => f.write_str("false"),
                Mso::Exists(v, body) => match &**body {
                    Mso::Not(body) => write!(f, "(forall {v} . {body})"),
                    _ => write!(f, "!{a}"),
                },
                _ => write!(f, "!{a}"),
            },
            Mso::Or(a, b) => {
                let mut ds = Vec::new();
                disjuncts(self, &mut ds);
                match (&**a, ds.len()) {
                    (Mso::Not(premise), 2) => write!(f, "({premise} -> {b})"),
                    _ => join(f, &ds, "|"),
                }
            }
            Mso::Exists(v, a) => write!(f, "(exists {v} . {a})"),
        }
    }
}

fn chain<'a>(g: &'a MkFormula, times: bool, out: &mut Vec<&'a MkFormula>) {
    match g {
        MkFormula::Plus(a, b) if !times => {
            chain(a, times, out);
            out.push(b);
        }
        MkFormula::Times(a, b) if times => {
            chain(a, times, out);
            out.push(b);
        }
        _ => out.push(g),
    }
}

impl fmt::Display for MkFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MkFormula::Const(k) => write!(f, "{k}"),
            MkFormula::Bool(m) => write!(f, "{m}"),
            MkFormula::Plus(..) | MkFormula::Times(..) => {
                let times = matches!(self, MkFormula::Times(..));
                let mut parts = Vec::new();
                chain(self, times, &mut parts);
                join(f, &parts, if times { "(*)" } else { "(+)" })
            }
            MkFormula::SumFo(v, a) | MkFormula::SumSo(v, a) => write!(f, "(sum {v} . {a})"),
            MkFormula::ProdFo(v, a) => write!(f, "(prod {v} . {a})"),
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing.

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    /// `P_a`
    Pred(String),
    Truth(TruthValue),
    LParen,
    RParen,
    Comma,
    Dot,
    Bang,
    Bar,
    Amp,
    Arrow,
    Le,
    Plus,
    Times,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Pred(a) => write!(f, "`P_{a}`"),
            Tok::Truth(k) => write!(f, "`{k}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Le => f.write_str("`<=`"),
            Tok::Plus => f.write_str("`(+)`"),
            Tok::Times => f.write_str("`(*)`"),
        }
    }
}

const KEYWORDS: &[&str] = &[
    "true", "false", "exists", "forall", "sum", "prod", "in", "first", "last", "succ",
    "partition",
];

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let mut i = 0;
    let bytes = src.as_bytes();
    let err = |at: usize, m: &str| Error::Syntax {
        offset: at,
        message: m.to_string(),
    };
    while i < src.len() {
        let rest = &src[i..];
        let c = rest.chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let start = i;
        let tok = if rest.starts_with("(+)") {
            i += 3;
            Tok::Plus
        } else if rest.starts_with("(*)") {
            i += 3;
            Tok::Times
        } else if rest.starts_with("->") {
            i += 2;
            Tok::Arrow
        } else if rest.starts_with("<=") {
            i += 2;
            Tok::Le
        } else if c == '<' {
            let end = rest.find('>').ok_or_else(|| err(start, "unterminated truth literal"))? + 1;
            i += end;
            Tok::Truth(parse_truth(&rest[..end]).map_err(|e| err(start, &e.to_string()))?)
        } else if c.is_ascii_alphabetic() {
            let n = rest
                .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                .unwrap_or(rest.len());
            i += n;
            let word = &rest[..n];
            match word.strip_prefix("P_") {
                Some(letter) if !letter.is_empty() => Tok::Pred(letter.to_string()),
                _ => Tok::Ident(word.to_string()),
            }
        } else {
            i += 1;
            match bytes[start] {
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b',' => Tok::Comma,
                b'.' => Tok::Dot,
                b'!' => Tok::Bang,
                b'|' => Tok::Bar,
                b'&' => Tok::Amp,
                _ => return Err(err(start, &format!("unexpected character `{c}`"))),
            }
        };
        out.push((start, tok));
    }
    Ok(out)
}

/// A parsed node, before it is known whether the context wants a boolean.
enum Node {
    B(Mso),
    W(MkFormula),
}

impl Node {
    fn into_mk(self) -> MkFormula {
        match self {
            Node::B(m) => MkFormula::Bool(m),
            Node::W(w) => w,
        }
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    taken: BTreeSet<String>,
    fresh: usize,
}

impl Parser {
    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn err(&self, m: impl Into<String>) -> Error {
        Error::Syntax {
            offset: self.offset(),
            message: m.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.1)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.1.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.err(format!("expected {want}, found {t}"))),
            None => Err(self.err(format!("expected {want}, found end of input"))),
        }
    }

    fn fresh_var(&mut self) -> Var {
        loop {
            let name = format!("v{}", self.fresh);
            self.fresh += 1;
            if self.taken.insert(name.clone()) {
                return Var::new(name);
            }
        }
    }

    fn var(&mut self, first_order: Option<bool>) -> Result<Var> {
        match self.peek().cloned() {
            Some(Tok::Ident(name)) if !KEYWORDS.contains(&name.as_str()) => {
                let v = Var::new(name.clone());
                match first_order {
                    Some(true) if !v.is_first_order() => Err(self.err(format!(
                        "`{name}` is second order; first-order variables start with a lower-case letter"
                    ))),
                    Some(false) if v.is_first_order() => Err(self.err(format!(
                        "`{name}` is first order; second-order variables start with an upper-case letter"
                    ))),
                    _ => {
                        self.pos += 1;
                        Ok(v)
                    }
                }
            }
            Some(t) => Err(self.err(format!("expected a variable, found {t}"))),
            None => Err(self.err("expected a variable, found end of input")),
        }
    }

    fn boolean(&self, n: Node, what: &str) -> Result<Mso> {
        match n {
            Node::B(m) => Ok(m),
            Node::W(w) => Err(self.err(format!(
                "{what} needs a boolean MSO operand, found weighted formula {w}"
            ))),
        }
    }

    /// expr := unary (op unary)*, with a single operator kind per level.
    fn expr(&mut self) -> Result<Node> {
        let mut left = self.unary()?;
        let mut kind: Option<Tok> = None;
        loop {
            let op = match self.peek() {
                Some(t @ (Tok::Bar | Tok::Amp | Tok::Arrow | Tok::Plus | Tok::Times)) => t.clone(),
                _ => break,
            };
            if let Some(k) = &kind {
                if *k != op || op == Tok::Arrow {
                    return Err(self.err(format!(
                        "mixing {k} and {op} needs parentheses"
                    )));
                }
            }
            self.pos += 1;
            let right = self.unary()?;
            left = match op {
                Tok::Bar => Node::B(or(self.boolean(left, "`|`")?, self.boolean(right, "`|`")?)),
                Tok::Amp => Node::B(and(self.boolean(left, "`&`")?, self.boolean(right, "`&`")?)),
                Tok::Arrow => {
                    Node::B(implies(self.boolean(left, "`->`")?, self.boolean(right, "`->`")?))
                }
                Tok::Plus => Node::W(MkFormula::Plus(Box::new(left.into_mk()), Box::new(right.into_mk()))),
                _ => Node::W(MkFormula::Times(Box::new(left.into_mk()), Box::new(right.into_mk()))),
            };
            kind = Some(op);
        }
        Ok(left)
    }

    fn quantified(&mut self, kw: &str) -> Result<Node> {
        let v = self.var(if kw == "prod" { Some(true) } else { None })?;
        self.expect(Tok::Dot)?;
        let body = self.expr()?;
        Ok(match kw {
            "exists" => Node::B(exists(&v, self.boolean(body, "`exists`")?)),
            "forall" => Node::B(forall(&v, self.boolean(body, "`forall`")?)),
            "sum" if v.is_first_order() => Node::W(MkFormula::SumFo(v, Box::new(body.into_mk()))),
            "sum" => Node::W(MkFormula::SumSo(v, Box::new(body.into_mk()))),
            _ => Node::W(MkFormula::ProdFo(v, Box::new(body.into_mk()))),
        })
    }

    fn unary(&mut self) -> Result<Node> {
        match self.next() {
            Some(Tok::Bang) => {
                let a = self.unary()?;
                Ok(Node::B(not(self.boolean(a, "`!`")?)))
            }
            Some(Tok::Truth(k)) => Ok(Node::W(MkFormula::Const(k))),
            Some(Tok::Pred(a)) => {
                self.expect(Tok::LParen)?;
                let x = self.var(Some(true))?;
                self.expect(Tok::RParen)?;
                Ok(Node::B(Mso::Label(a, x)))
            }
            Some(Tok::LParen) => self.parenthesized(),
            Some(Tok::Ident(word)) => match word.as_str() {
                "true" => Ok(Node::B(Mso::True)),
                "false" => Ok(Node::B(falsum())),
                "exists" | "forall" | "sum" | "prod" => self.quantified(&word),
                "first" | "last" => {
                    self.expect(Tok::LParen)?;
                    let y = self.var(Some(true))?;
                    self.expect(Tok::RParen)?;
                    let x = self.fresh_var();
                    Ok(Node::B(if word == "first" { first(&y, &x) } else { last(&y, &x) }))
                }
                "succ" => {
                    self.expect(Tok::LParen)?;
                    let y = self.var(Some(true))?;
                    self.expect(Tok::Comma)?;
                    let x = self.var(Some(true))?;
                    self.expect(Tok::RParen)?;
                    let z = self.fresh_var();
                    Ok(Node::B(succ(&y, &x, &z)))
                }
                "partition" => {
                    self.expect(Tok::LParen)?;
                    let mut sets = vec![self.var(Some(false))?];
                    while self.peek() == Some(&Tok::Comma) {
                        self.pos += 1;
                        sets.push(self.var(Some(false))?);
                    }
                    self.expect(Tok::RParen)?;
                    let x = self.fresh_var();
                    Ok(Node::B(partition(&sets, &x)))
                }
                _ => {
                    // An atom starting with a variable.
                    self.pos -= 1;
                    let x = self.var(Some(true))?;
                    match self.next() {
                        Some(Tok::Le) => {
                            let y = self.var(Some(true))?;
                            Ok(Node::B(le(&x, &y)))
                        }
                        Some(Tok::Ident(k)) if k == "in" => {
                            let set = self.var(Some(false))?;
                            Ok(Node::B(member(&x, &set)))
                        }
                        _ => {
                            self.pos -= 1;
                            Err(self.err(format!("expected `<=` or `in` after `{x}`")))
                        }
                    }
                }
            },
            Some(t) => {
                self.pos -= 1;
                Err(self.err(format!("unexpected {t}")))
            }
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn parenthesized(&mut self) -> Result<Node> {
        if let Some(c) = self.clause()? {
            return Ok(c);
        }
        let inner = self.expr()?;
        self.expect(Tok::RParen)?;
        Ok(inner)
    }

    /// `x in X -> <k>)` right after an opening parenthesis.
    fn clause(&mut self) -> Result<Option<Node>> {
        let shape = matches!(
            (self.peek_at(1), self.peek_at(3), self.peek_at(4), self.peek_at(5)),
            (Some(Tok::Ident(kw)), Some(Tok::Arrow), Some(Tok::Truth(_)), Some(Tok::RParen)) if kw == "in"
        );
        if !shape {
            return Ok(None);
        }
        let x = self.var(Some(true))?;
        self.pos += 1;
        let set = self.var(Some(false))?;
        self.pos += 1;
        let Some(Tok::Truth(k)) = self.next() else {
            unreachable!("shape checked above")
        };
        self.pos += 1;
        Ok(Some(Node::W(clause(&x, &set, k))))
    }
}

fn parse_node(text: &str) -> Result<Node> {
    let toks = lex(text)?;
    let taken = toks
        .iter()
        .filter_map(|(_, t)| match t {
            Tok::Ident(s) => Some(s.clone()),
            _ => None,
        })
        .collect();
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        taken,
        fresh: 0,
    };
    let n = p.expr()?;
    if let Some(t) = p.peek() {
        return Err(p.err(format!("unexpected {t} after the formula")));
    }
    Ok(n)
}

/// Parses a weighted formula; purely boolean text becomes [`MkFormula::Bool`].
pub fn parse_mk(text: &str) -> Result<MkFormula> {
    Ok(parse_node(text)?.into_mk())
}

/// Parses a boolean MSO formula.
pub fn parse_mso(text: &str) -> Result<Mso> {
    match parse_node(text)? {
        Node::B(m) => Ok(m),
        Node::W(w) => Err(Error::Syntax {
            offset: 0,
            message: format!("expected a boolean MSO formula, found weighted formula {w}"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Var {
        Var::new(s)
    }

    #[test]
    fn atoms_and_quantifiers() {
        assert_eq!(
            parse_mso("exists x . P_a(x)").unwrap(),
            exists(&v("x"), Mso::Label("a".into(), v("x")))
        );
        assert_eq!(parse_mso("first(y)").unwrap(), forall(&v("v0"), le(&v("y"), &v("v0"))));
        assert_eq!(
            parse_mk("sum x . (<1,0,0,0>)").unwrap(),
            MkFormula::SumFo(v("x"), Box::new(MkFormula::Const(TruthValue::one())))
        );
        assert_eq!(parse_mso("false").unwrap(), not(Mso::True));
    }

    #[test]
    fn fresh_names_avoid_used_ones() {
        let m = parse_mso("exists v0 . first(v0)").unwrap();
        assert_eq!(m, exists(&v("v0"), forall(&v("v1"), le(&v("v0"), &v("v1")))));
    }

    #[test]
    fn mixed_operators_need_parentheses() {
        assert!(parse_mso("true | true & true").is_err());
        assert!(parse_mso("(true | true) & true").is_ok());
        assert!(parse_mso("true | true | true").is_ok());
        assert!(parse_mk("<1,0,0,0> (+) <1,0,0,0> (*) <1,0,0,0>").is_err());
        assert!(parse_mso("true -> true -> true").is_err());
    }

    #[test]
    fn case_convention_is_enforced() {
        assert!(parse_mso("X <= y").is_err());
        assert!(parse_mso("x in y").is_err());
        assert!(parse_mk("prod X . <1,0,0,0>").is_err());
    }

    #[test]
    fn boolean_operators_reject_weights() {
        assert!(parse_mk("!<1,0,0,0>").is_err());
        assert!(parse_mk("exists x . (x in X -> <1,0,0,0>)").is_err());
    }

    #[test]
    fn implication_clause() {
        let f = parse_mk("prod x . ((x in X -> <1,0,0,0>) (+) (x in Y -> <0,1,0,0>))").unwrap();
        let want = MkFormula::ProdFo(
            v("x"),
            Box::new(MkFormula::Plus(
                Box::new(clause(&v("x"), &v("X"), TruthValue::one())),
                Box::new(clause(&v("x"), &v("Y"), TruthValue::zero())),
            )),
        );
        assert_eq!(f, want);
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), vec![v("X"), v("Y")]);
    }

    #[test]
    fn printing_round_trips() {
        for text in [
            "exists x . (P_a(x) & first(x))",
            "sum X . ((forall x . (x in X -> P_b(x))) (*) <0.3,0.2,0.4,0.1>)",
            "prod x . ((x in X -> <1,0,0,0>) (+) (x in Y -> <0,1,0,0>))",
            "(succ(y,x) | partition(X,Y)) -> last(y)",
        ] {
            let f = parse_mk(text).unwrap();
            assert_eq!(parse_mk(&f.to_string()).unwrap(), f, "{text}");
        }
    }
}
