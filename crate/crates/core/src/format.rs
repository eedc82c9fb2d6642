//! Line-oriented text format for automata, homomorphisms, and Nivat data.
//!
//! ```text
//! mkfa 1
//! kind mk
//! alphabet a b
//! state p
//! state q
//! initial p <1,0,0,0>
//! trans p a q <3/10,1/5,2/5,1/10>
//! final q <1,0,0,0>
//! ```
//!
//! `kind classical` drops the truth literals. `kind hom` has `source`,
//! `target`, and `map <a> <b>` lines. `kind nivat` describes a classical
//! automaton over `alphabet` plus `target`, `weight <b> <k>`, and
//! `map <b> <a>` lines. `#` starts a comment.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::alphabet::{Alphabet, Symbol};
use crate::constructs::{NivatData, StrictAlphabeticHom};
use crate::error::{Error, Result};
use crate::fclassic::{Dfa, Nfa};
use crate::kvalues::{parse_truth, TruthValue};
use crate::mkauto::MkAutomaton;

#[derive(Clone, Debug)]
pub enum Document {
    Mk(MkAutomaton),
    Classical(Nfa),
    Hom(StrictAlphabeticHom),
    Nivat(NivatData),
}

struct Line<'a> {
    no: usize,
    keyword: &'a str,
    rest: &'a str,
}

impl Line<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.no,
            message: message.into(),
        }
    }

    fn words(&self) -> Vec<&str> {
        self.rest.split_whitespace().collect()
    }

    /// Splits off `n` leading tokens; the remainder must be a truth literal.
    fn tokens_then_truth(&self, n: usize) -> Result<(Vec<&str>, TruthValue)> {
        let mut rest = self.rest.trim_start();
        let mut toks = Vec::with_capacity(n);
        for _ in 0..n {
            let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
            if end == 0 {
                return Err(self.err(format!("`{}` expects {n} names and a truth value", self.keyword)));
            }
            toks.push(&rest[..end]);
            rest = rest[end..].trim_start();
        }
        if rest.is_empty() {
            return Err(self.err(format!("`{}` is missing its truth value", self.keyword)));
        }
        Ok((toks, parse_truth(rest.trim())?))
    }

    fn exact(&self, n: usize) -> Result<Vec<&str>> {
        let w = self.words();
        if w.len() != n {
            return Err(self.err(format!("`{}` expects {n} fields", self.keyword)));
        }
        Ok(w)
    }
}

fn lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = match raw.find('#') {
                Some(j) if j == 0 || raw[..j].ends_with(char::is_whitespace) => &raw[..j],
                _ => raw,
            };
            let body = body.trim();
            if body.is_empty() {
                return None;
            }
            let (keyword, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
            Some(Line {
                no: i + 1,
                keyword,
                rest,
            })
        })
        .collect()
}

fn parse_alphabet(line: &Line) -> Result<Alphabet> {
    let syms = line
        .words()
        .into_iter()
        .map(|w| w.parse::<Symbol>().map_err(|e| line.err(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    Alphabet::new(syms).map_err(|e| line.err(e.to_string()))
}

struct Common<'a> {
    alphabet: Option<Alphabet>,
    states: Vec<String>,
    index: HashMap<String, usize>,
    rest: Vec<&'a Line<'a>>,
    issues: Vec<String>,
}

impl Common<'_> {
    fn state(&mut self, name: &str) -> usize {
        match self.index.get(name) {
            Some(&i) => i,
            None => {
                self.issues.push(format!("unknown state `{name}`"));
                usize::MAX
            }
        }
    }

    fn letter(&mut self, name: &str) -> usize {
        let al = self.alphabet.as_ref().expect("alphabet read first");
        match al.index_of_str(name) {
            Ok(i) => i,
            Err(_) => {
                self.issues.push(format!("letter `{name}` is not in the alphabet"));
                usize::MAX
            }
        }
    }
}

fn split_common<'a>(body: &'a [Line<'a>], other_keywords: &[&str]) -> Result<Common<'a>> {
    let mut c = Common {
        alphabet: None,
        states: Vec::new(),
        index: HashMap::new(),
        rest: Vec::new(),
        issues: Vec::new(),
    };
    for line in body {
        match line.keyword {
            "alphabet" => {
                if c.alphabet.is_some() {
                    return Err(line.err("duplicate alphabet line"));
                }
                c.alphabet = Some(parse_alphabet(line)?);
            }
            "state" => {
                let name = line.exact(1)?[0].to_string();
                if c.index.insert(name.clone(), c.states.len()).is_some() {
                    return Err(line.err(format!("duplicate state `{name}`")));
                }
                c.states.push(name);
            }
            "initial" | "trans" | "final" => c.rest.push(line),
            k if other_keywords.contains(&k) => c.rest.push(line),
            k => return Err(line.err(format!("unknown record `{k}`"))),
        }
    }
    if c.alphabet.is_none() {
        return Err(Error::Parse {
            line: body.first().map_or(1, |l| l.no),
            message: "missing alphabet line".into(),
        });
    }
    Ok(c)
}

fn parse_mk(body: &[Line]) -> Result<MkAutomaton> {
    let mut c = split_common(body, &[])?;
    let mut initial = BTreeMap::new();
    let mut finals = BTreeMap::new();
    let mut transitions = BTreeMap::new();
    for line in std::mem::take(&mut c.rest) {
        match line.keyword {
            "initial" | "final" => {
                let (t, k) = line.tokens_then_truth(1)?;
                let q = c.state(t[0]);
                let map = if line.keyword == "initial" { &mut initial } else { &mut finals };
                if map.insert(q, k).is_some() && q != usize::MAX {
                    return Err(line.err(format!("duplicate {} record", line.keyword)));
                }
            }
            _ => {
                let (t, k) = line.tokens_then_truth(3)?;
                let key = (c.state(t[0]), c.letter(t[1]), c.state(t[2]));
                if transitions.insert(key, k).is_some() && c.issues.is_empty() {
                    return Err(line.err("duplicate transition"));
                }
            }
        }
    }
    if !c.issues.is_empty() {
        return Err(Error::Validation(c.issues));
    }
    MkAutomaton::new(c.alphabet.unwrap(), c.states, initial, finals, transitions)
}

fn parse_classical_body(c: &mut Common, lines: Vec<&Line>) -> Result<(BTreeSet<usize>, BTreeSet<usize>, BTreeSet<(usize, usize, usize)>)> {
    let (mut initial, mut finals, mut transitions) = (BTreeSet::new(), BTreeSet::new(), BTreeSet::new());
    for line in lines {
        match line.keyword {
            "initial" => {
                initial.insert(c.state(line.exact(1)?[0]));
            }
            "final" => {
                finals.insert(c.state(line.exact(1)?[0]));
            }
            "trans" => {
                let t = line.exact(3)?;
                transitions.insert((c.state(t[0]), c.letter(t[1]), c.state(t[2])));
            }
            _ => {}
        }
    }
    Ok((initial, finals, transitions))
}

fn parse_classical(body: &[Line]) -> Result<Nfa> {
    let mut c = split_common(body, &[])?;
    let rest = std::mem::take(&mut c.rest);
    let (initial, finals, transitions) = parse_classical_body(&mut c, rest)?;
    if !c.issues.is_empty() {
        return Err(Error::Validation(c.issues));
    }
    Nfa::new(c.alphabet.unwrap(), c.states, initial, finals, transitions)
}

fn parse_hom(body: &[Line]) -> Result<StrictAlphabeticHom> {
    let (mut source, mut target, mut pairs) = (None, None, Vec::new());
    for line in body {
        match line.keyword {
            "source" => source = Some(parse_alphabet(line)?),
            "target" => target = Some(parse_alphabet(line)?),
            "map" => {
                let w = line.exact(2)?;
                let s = |t: &str| t.parse::<Symbol>().map_err(|e| line.err(e.to_string()));
                pairs.push((s(w[0])?, s(w[1])?));
            }
            k => return Err(line.err(format!("unknown record `{k}`"))),
        }
    }
    let missing = |what: &str| Error::Parse {
        line: 1,
        message: format!("missing {what} line"),
    };
    let source = source.ok_or_else(|| missing("source"))?;
    let target = target.ok_or_else(|| missing("target"))?;
    StrictAlphabeticHom::from_pairs(source, target, &pairs)
        .map_err(|e| Error::Validation(vec![e.to_string()]))
}

fn parse_nivat(body: &[Line]) -> Result<NivatData> {
    let mut c = split_common(body, &["target", "weight", "map"])?;
    let inner = c.alphabet.clone().unwrap();
    let mut target = None;
    let mut weights: Vec<Option<TruthValue>> = vec![None; inner.len()];
    let mut pairs = Vec::new();
    let mut automaton_lines = Vec::new();
    for line in std::mem::take(&mut c.rest) {
        match line.keyword {
            "target" => target = Some(parse_alphabet(line)?),
            "weight" => {
                let (t, k) = line.tokens_then_truth(1)?;
                let b = c.letter(t[0]);
                if b != usize::MAX {
                    weights[b] = Some(k);
                }
            }
            "map" => {
                let w = line.exact(2)?;
                let s = |t: &str| t.parse::<Symbol>().map_err(|e| line.err(e.to_string()));
                pairs.push((s(w[0])?, s(w[1])?));
            }
            _ => automaton_lines.push(line),
        }
    }
    let (initial, finals, transitions) = parse_classical_body(&mut c, automaton_lines)?;
    for (b, w) in weights.iter().enumerate() {
        if w.is_none() {
            c.issues.push(format!("letter `{}` has no weight", inner.symbol(b)));
        }
    }
    let target = target.ok_or_else(|| Error::Parse {
        line: 1,
        message: "missing target line".into(),
    })?;
    if !c.issues.is_empty() {
        return Err(Error::Validation(c.issues));
    }
    let hom = StrictAlphabeticHom::from_pairs(inner.clone(), target, &pairs)
        .map_err(|e| Error::Validation(vec![e.to_string()]))?;
    Ok(NivatData {
        language: Nfa::new(inner.clone(), c.states, initial, finals, transitions)?,
        inner,
        weights: weights.into_iter().map(Option::unwrap).collect(),
        hom,
    })
}

/// Parses any document kind. Syntax problems are [`Error::Parse`];
/// references to unknown states or letters, and automaton invariant
/// violations, are [`Error::Validation`].
pub fn parse_document(text: &str) -> Result<Document> {
    let all = lines(text);
    let mut it = all.iter();
    let header = it.next().ok_or(Error::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    if header.keyword != "mkfa" || header.rest.trim() != "1" {
        return Err(header.err("expected header `mkfa 1`"));
    }
    let kind = it.next().ok_or(Error::Parse {
        line: header.no,
        message: "missing kind line".into(),
    })?;
    if kind.keyword != "kind" {
        return Err(kind.err("expected `kind mk|classical|hom|nivat`"));
    }
    let body = &all[2..];
    match kind.rest.trim() {
        "mk" => parse_mk(body).map(Document::Mk),
        "classical" => parse_classical(body).map(Document::Classical),
        "hom" => parse_hom(body).map(Document::Hom),
        "nivat" => parse_nivat(body).map(Document::Nivat),
        other => Err(kind.err(format!("unknown kind `{other}`"))),
    }
}

pub fn parse_mk_automaton(text: &str) -> Result<MkAutomaton> {
    match parse_document(text)? {
        Document::Mk(a) => Ok(a),
        _ => Err(Error::Parse {
            line: 2,
            message: "expected `kind mk`".into(),
        }),
    }
}

fn alphabet_line(out: &mut String, key: &str, al: &Alphabet) {
    let syms: Vec<String> = al.symbols().iter().map(Symbol::to_string).collect();
    if syms.is_empty() {
        let _ = writeln!(out, "{key}");
    } else {
        let _ = writeln!(out, "{key} {}", syms.join(" "));
    }
}

/// Canonical text of an MK automaton.
pub fn write_mk(a: &MkAutomaton) -> String {
    let mut out = String::from("mkfa 1\nkind mk\n");
    alphabet_line(&mut out, "alphabet", a.alphabet());
    let n = a.names();
    for s in n {
        let _ = writeln!(out, "state {s}");
    }
    for (&q, k) in a.initial() {
        let _ = writeln!(out, "initial {} {k}", n[q]);
    }
    for (&(p, x, q), k) in a.transitions() {
        let _ = writeln!(out, "trans {} {} {} {k}", n[p], a.alphabet().symbol(x), n[q]);
    }
    for (&q, k) in a.finals() {
        let _ = writeln!(out, "final {} {k}", n[q]);
    }
    out
}

fn write_classical_body(out: &mut String, nfa: &Nfa) {
    let n = nfa.names();
    for s in n {
        let _ = writeln!(out, "state {s}");
    }
    for &q in nfa.initial() {
        let _ = writeln!(out, "initial {}", n[q]);
    }
    for &(p, x, q) in nfa.transitions() {
        let _ = writeln!(out, "trans {} {} {}", n[p], nfa.alphabet().symbol(x), n[q]);
    }
    for &q in nfa.finals() {
        let _ = writeln!(out, "final {}", n[q]);
    }
}

pub fn write_nfa(nfa: &Nfa) -> String {
    let mut out = String::from("mkfa 1\nkind classical\n");
    alphabet_line(&mut out, "alphabet", nfa.alphabet());
    write_classical_body(&mut out, nfa);
    out
}

pub fn write_dfa(d: &Dfa) -> String {
    write_nfa(&d.to_nfa())
}

pub fn write_hom(h: &StrictAlphabeticHom) -> String {
    let mut out = String::from("mkfa 1\nkind hom\n");
    alphabet_line(&mut out, "source", h.source());
    alphabet_line(&mut out, "target", h.target());
    for a in 0..h.source().len() {
        let _ = writeln!(
            out,
            "map {} {}",
            h.source().symbol(a),
            h.target().symbol(h.image(a))
        );
    }
    out
}

pub fn write_nivat(n: &NivatData) -> String {
    let mut out = String::from("mkfa 1\nkind nivat\n");
    alphabet_line(&mut out, "alphabet", &n.inner);
    alphabet_line(&mut out, "target", n.hom.target());
    write_classical_body(&mut out, &n.language);
    for (b, k) in n.weights.iter().enumerate() {
        let _ = writeln!(out, "weight {} {k}", n.inner.symbol(b));
    }
    for b in 0..n.inner.len() {
        let _ = writeln!(
            out,
            "map {} {}",
            n.inner.symbol(b),
            n.hom.target().symbol(n.hom.image(b))
        );
    }
    out
}

pub fn write_document(d: &Document) -> String {
    match d {
        Document::Mk(a) => write_mk(a),
        Document::Classical(n) => write_nfa(n),
        Document::Hom(h) => write_hom(h),
        Document::Nivat(n) => write_nivat(n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mkauto::fixtures::two;

    #[test]
    fn mk_round_trip_is_byte_identical() {
        let text = write_mk(&two());
        let back = parse_mk_automaton(&text).unwrap();
        assert_eq!(back, two());
        assert_eq!(write_mk(&back), text);
    }

    #[test]
    fn comments_and_decimals() {
        let text = "# constant\nmkfa 1\nkind mk\nalphabet a\nstate q  # only state\n\
                    initial q <0.3, 0.2, 0.4, 0.1>\ntrans q a q <1,0,0,0>\nfinal q <1,0,0,0>\n";
        let a = parse_mk_automaton(text).unwrap();
        assert_eq!(a.behavior(&[0, 0]).unwrap().to_string(), "<3/10,1/5,2/5,1/10>");
    }

    #[test]
    fn error_kinds() {
        let bad_syntax = "mkfa 1\nkind mk\nalphabet a\nstate q\ninitial q\n";
        assert!(matches!(parse_document(bad_syntax), Err(Error::Parse { line: 5, .. })));
        let zero_initial = "mkfa 1\nkind mk\nalphabet a\nstate q\ninitial q <0,1,0,0>\n";
        assert!(matches!(parse_document(zero_initial), Err(Error::Validation(_))));
        let unknown = "mkfa 1\nkind mk\nalphabet a\nstate q\ntrans q a r <1,0,0,0>\n";
        assert!(matches!(parse_document(unknown), Err(Error::Validation(_))));
        assert!(matches!(parse_document("mkfa 2\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn other_kinds_round_trip() {
        let hom = "mkfa 1\nkind hom\nsource x y\ntarget b\nmap x b\nmap y b\n";
        match parse_document(hom).unwrap() {
            Document::Hom(h) => assert_eq!(write_hom(&h), hom),
            _ => panic!("expected a homomorphism"),
        }
        let cl = "mkfa 1\nkind classical\nalphabet a b\nstate p\nstate q\ninitial p\ntrans p b q\nfinal q\n";
        match parse_document(cl).unwrap() {
            Document::Classical(n) => assert_eq!(write_nfa(&n), cl),
            _ => panic!("expected a classical automaton"),
        }
        let m = crate::constructs::in_ter_one(&two());
        let m = crate::constructs::normalize(&crate::constructs::constant_automaton(
            m.alphabet(),
            &crate::mkauto::fixtures::k1(),
        ))
        .unwrap();
        let n = crate::constructs::nivat_decompose(&m).unwrap();
        let text = write_nivat(&n);
        match parse_document(&text).unwrap() {
            Document::Nivat(back) => assert_eq!(write_nivat(&back), text),
            _ => panic!("expected nivat data"),
        }
    }
}
