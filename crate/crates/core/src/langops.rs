//! Definition-level evaluation of MK-fuzzy language expressions.
//!
//! Every operation is evaluated pointwise, exactly as defined on languages,
//! with no automaton in between. This is the reference the constructions are
//! checked against; its cost is exponential in the word length.

use std::fmt;

use crate::alphabet::{Alphabet, Word};
use crate::constructs::StrictAlphabeticHom;
use crate::error::{Error, Result};
use crate::fclassic::Dfa;
use crate::kvalues::{conj, disj, parse_truth, TruthValue};
use crate::mkauto::MkAutomaton;

/// A closed expression over MK-fuzzy languages.
#[derive(Clone, Debug)]
pub enum LangExpr {
    Behavior(MkAutomaton),
    Constant(Alphabet, TruthValue),
    CharOfDfa(Dfa),
    /// `w̄`: `𝟏` on the given word, `𝟎` elsewhere.
    WordIndicator(Alphabet, Word),
    Disj(Box<LangExpr>, Box<LangExpr>),
    Conj(Box<LangExpr>, Box<LangExpr>),
    ScalarLeft(TruthValue, Box<LangExpr>),
    ScalarRight(Box<LangExpr>, TruthValue),
    Cauchy(Box<LangExpr>, Box<LangExpr>),
    HomImage(StrictAlphabeticHom, Box<LangExpr>),
    InvHomImage(StrictAlphabeticHom, Box<LangExpr>),
}

impl LangExpr {
    pub fn disj(a: LangExpr, b: LangExpr) -> Self {
        LangExpr::Disj(Box::new(a), Box::new(b))
    }

    pub fn conj(a: LangExpr, b: LangExpr) -> Self {
        LangExpr::Conj(Box::new(a), Box::new(b))
    }

    pub fn cauchy(a: LangExpr, b: LangExpr) -> Self {
        LangExpr::Cauchy(Box::new(a), Box::new(b))
    }

    pub fn scalar_left(k: TruthValue, a: LangExpr) -> Self {
        LangExpr::ScalarLeft(k, Box::new(a))
    }

    pub fn scalar_right(a: LangExpr, k: TruthValue) -> Self {
        LangExpr::ScalarRight(Box::new(a), k)
    }

    pub fn hom(h: StrictAlphabeticHom, a: LangExpr) -> Self {
        LangExpr::HomImage(h, Box::new(a))
    }

    pub fn inv_hom(h: StrictAlphabeticHom, a: LangExpr) -> Self {
        LangExpr::InvHomImage(h, Box::new(a))
    }

    /// The alphabet of the words this expression is evaluated on.
    pub fn alphabet(&self) -> &Alphabet {
        match self {
            LangExpr::Behavior(a) => a.alphabet(),
            LangExpr::Constant(al, _) | LangExpr::WordIndicator(al, _) => al,
            LangExpr::CharOfDfa(d) => d.alphabet(),
            LangExpr::Disj(a, _) | LangExpr::Conj(a, _) | LangExpr::Cauchy(a, _) => a.alphabet(),
            LangExpr::ScalarLeft(_, a) | LangExpr::ScalarRight(a, _) => a.alphabet(),
            LangExpr::HomImage(h, _) => h.target(),
            LangExpr::InvHomImage(h, _) => h.source(),
        }
    }

    /// Checks that the alphabets along every edge agree.
    pub fn check(&self) -> Result<()> {
        let same = |outer: &Alphabet, inner: &LangExpr| -> Result<()> {
            inner.check()?;
            if outer.same_symbols(inner.alphabet()) {
                Ok(())
            } else {
                Err(Error::AlphabetMismatch(format!(
                    "{outer:?} vs {:?}",
                    inner.alphabet()
                )))
            }
        };
        match self {
            LangExpr::Disj(a, b) | LangExpr::Conj(a, b) | LangExpr::Cauchy(a, b) => {
                same(a.alphabet(), a)?;
                same(a.alphabet(), b)
            }
            LangExpr::ScalarLeft(_, a) | LangExpr::ScalarRight(a, _) => a.check(),
            LangExpr::HomImage(h, a) => same(h.source(), a),
            LangExpr::InvHomImage(h, a) => same(h.target(), a),
            _ => Ok(()),
        }
    }

    /// Pointwise value at `w` (letters index [`LangExpr::alphabet`]).
    pub fn eval(&self, w: &[usize]) -> Result<TruthValue> {
        self.alphabet().check_word(w)?;
        self.eval_unchecked(w)
    }

    fn eval_child(&self, child: &LangExpr, w: &[usize]) -> Result<TruthValue> {
        let outer = self.alphabet();
        let inner = child.alphabet();
        if outer == inner {
            child.eval_unchecked(w)
        } else {
            let map = outer.reindex_into(inner)?;
            let v: Word = w.iter().map(|&a| map[a]).collect();
            child.eval_unchecked(&v)
        }
    }

    fn eval_unchecked(&self, w: &[usize]) -> Result<TruthValue> {
        Ok(match self {
            LangExpr::Behavior(a) => a.behavior(w)?,
            LangExpr::Constant(_, k) => k.clone(),
            LangExpr::CharOfDfa(d) => TruthValue::from_bool(d.accepts(w)?),
            LangExpr::WordIndicator(_, u) => TruthValue::from_bool(u.as_slice() == w),
            LangExpr::Disj(a, b) => disj(&self.eval_child(a, w)?, &self.eval_child(b, w)?),
            LangExpr::Conj(a, b) => conj(&self.eval_child(a, w)?, &self.eval_child(b, w)?),
            LangExpr::ScalarLeft(k, a) => conj(k, &self.eval_child(a, w)?),
            LangExpr::ScalarRight(a, k) => conj(&self.eval_child(a, w)?, k),
            LangExpr::Cauchy(r, s) => {
                let mut acc = TruthValue::zero();
                for i in 0..=w.len() {
                    let term = conj(&self.eval_child(r, &w[..i])?, &self.eval_child(s, &w[i..])?);
                    acc = disj(&acc, &term);
                }
                acc
            }
            LangExpr::HomImage(h, a) => {
                let map = h.source().reindex_into(a.alphabet())?;
                let mut acc = TruthValue::zero();
                for v in h.preimages(w) {
                    let v: Word = v.iter().map(|&x| map[x]).collect();
                    acc = disj(&acc, &a.eval_unchecked(&v)?);
                }
                acc
            }
            LangExpr::InvHomImage(h, a) => {
                let map = h.target().reindex_into(a.alphabet())?;
                let v: Word = h.apply(w).iter().map(|&x| map[x]).collect();
                a.eval_unchecked(&v)?
            }
        })
    }
}

/// Words of length at most `maxlen` whose value has a non-zero truth
/// component.
pub fn stgsupp(x: &LangExpr, maxlen: usize) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    for w in x.alphabet().words_up_to(maxlen) {
        if !num_traits::Zero::is_zero(x.eval(&w)?.t()) {
            out.push(w);
        }
    }
    Ok(out)
}

/// A file referenced from the expression syntax, resolved by the caller.
#[derive(Clone, Debug)]
pub enum Resource {
    Automaton(MkAutomaton),
    Language(Dfa),
    Hom(StrictAlphabeticHom),
}

#[derive(Clone, Debug)]
enum Raw {
    Auto(String),
    Char(String),
    Const(TruthValue),
    Word(String),
    Bin(&'static str, Box<Raw>, Box<Raw>),
    Left(TruthValue, Box<Raw>),
    Right(Box<Raw>, TruthValue),
    Hom(String, Box<Raw>),
    InvHom(String, Box<Raw>),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().unwrap().len_utf8();
        }
    }

    fn eat(&mut self, c: char) -> Result<()> {
        self.ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> Result<&'a str> {
        self.ws();
        let rest = &self.src[self.pos..];
        let n = rest
            .find(|c: char| !c.is_ascii_alphanumeric() && c != '_')
            .unwrap_or(rest.len());
        if n == 0 {
            return Err(self.err("expected an operation name"));
        }
        self.pos += n;
        Ok(&rest[..n])
    }

    fn truth(&mut self) -> Result<TruthValue> {
        self.ws();
        let rest = &self.src[self.pos..];
        if !rest.starts_with('<') {
            return Err(self.err("expected a truth literal `<t,f,u,e>`"));
        }
        let end = rest.find('>').ok_or_else(|| self.err("unterminated truth literal"))? + 1;
        let k = parse_truth(&rest[..end])?;
        self.pos += end;
        Ok(k)
    }

    /// A quoted string or a bare token running to the next `,` or `)`.
    fn text(&mut self) -> Result<String> {
        self.ws();
        let rest = &self.src[self.pos..];
        if let Some(body) = rest.strip_prefix('"') {
            let end = body.find('"').ok_or_else(|| self.err("unterminated string"))?;
            self.pos += end + 2;
            return Ok(body[..end].to_string());
        }
        let n = rest.find([',', ')']).unwrap_or(rest.len());
        let tok = rest[..n].trim();
        if tok.is_empty() {
            return Err(self.err("expected a file name"));
        }
        self.pos += n;
        Ok(tok.to_string())
    }

    fn expr(&mut self) -> Result<Raw> {
        let name = self.ident()?;
        self.eat('(')?;
        let raw = match name {
            "auto" => Raw::Auto(self.text()?),
            "char" => Raw::Char(self.text()?),
            "const" => Raw::Const(self.truth()?),
            "word" => Raw::Word(self.text()?),
            "disj" | "conj" | "cauchy" => {
                let op = match name {
                    "disj" => "disj",
                    "conj" => "conj",
                    _ => "cauchy",
                };
                let a = self.expr()?;
                self.eat(',')?;
                Raw::Bin(op, Box::new(a), Box::new(self.expr()?))
            }
            "scalarL" => {
                let k = self.truth()?;
                self.eat(',')?;
                Raw::Left(k, Box::new(self.expr()?))
            }
            "scalarR" => {
                let a = self.expr()?;
                self.eat(',')?;
                Raw::Right(Box::new(a), self.truth()?)
            }
            "hom" | "invhom" => {
                let f = self.text()?;
                self.eat(',')?;
                let a = Box::new(self.expr()?);
                if name == "hom" {
                    Raw::Hom(f, a)
                } else {
                    Raw::InvHom(f, a)
                }
            }
            other => return Err(self.err(format!("unknown operation `{other}`"))),
        };
        self.eat(')')?;
        Ok(raw)
    }
}

fn loaded_alphabet(r: &Resource, outer: bool) -> Alphabet {
    match r {
        Resource::Automaton(a) => a.alphabet().clone(),
        Resource::Language(d) => d.alphabet().clone(),
        Resource::Hom(h) if outer => h.target().clone(),
        Resource::Hom(h) => h.source().clone(),
    }
}

struct Resolver<'l> {
    load: &'l mut dyn FnMut(&str) -> Result<Resource>,
}

impl Resolver<'_> {
    fn infer(&mut self, raw: &Raw) -> Result<Option<Alphabet>> {
        Ok(match raw {
            Raw::Auto(f) | Raw::Char(f) => Some(loaded_alphabet(&(self.load)(f)?, true)),
            Raw::Hom(f, _) => Some(loaded_alphabet(&(self.load)(f)?, true)),
            Raw::InvHom(f, _) => Some(loaded_alphabet(&(self.load)(f)?, false)),
            Raw::Const(_) | Raw::Word(_) => None,
            Raw::Bin(_, a, b) => match self.infer(a)? {
                Some(x) => Some(x),
                None => self.infer(b)?,
            },
            Raw::Left(_, a) | Raw::Right(a, _) => self.infer(a)?,
        })
    }

    fn build(&mut self, raw: &Raw, expected: Option<&Alphabet>) -> Result<LangExpr> {
        let need = |e: Option<&Alphabet>| {
            e.cloned().ok_or_else(|| {
                Error::Precondition(
                    "cannot infer the alphabet of const(...) or word(...); pass an alphabet".into(),
                )
            })
        };
        Ok(match raw {
            Raw::Auto(f) => match (self.load)(f)? {
                Resource::Automaton(a) => LangExpr::Behavior(a),
                _ => return Err(Error::Precondition(format!("`{f}` is not an MK automaton"))),
            },
            Raw::Char(f) => match (self.load)(f)? {
                Resource::Language(d) => LangExpr::CharOfDfa(d),
                _ => return Err(Error::Precondition(format!("`{f}` is not a classical automaton"))),
            },
            Raw::Const(k) => LangExpr::Constant(need(expected)?, k.clone()),
            Raw::Word(text) => {
                let al = need(expected)?;
                let w = al.parse_word(text)?;
                LangExpr::WordIndicator(al, w)
            }
            Raw::Bin(op, a, b) => {
                let own = match expected {
                    Some(e) => Some(e.clone()),
                    None => self.infer(raw)?,
                };
                let x = self.build(a, own.as_ref())?;
                let y = self.build(b, own.as_ref())?;
                match *op {
                    "disj" => LangExpr::disj(x, y),
                    "conj" => LangExpr::conj(x, y),
                    _ => LangExpr::cauchy(x, y),
                }
            }
            Raw::Left(k, a) => LangExpr::scalar_left(k.clone(), self.build(a, expected)?),
            Raw::Right(a, k) => LangExpr::scalar_right(self.build(a, expected)?, k.clone()),
            Raw::Hom(f, a) | Raw::InvHom(f, a) => {
                let Resource::Hom(h) = (self.load)(f)? else {
                    return Err(Error::Precondition(format!("`{f}` is not a homomorphism")));
                };
                if matches!(raw, Raw::Hom(..)) {
                    let inner = self.build(a, Some(h.source()))?;
                    LangExpr::hom(h, inner)
                } else {
                    let inner = self.build(a, Some(h.target()))?;
                    LangExpr::inv_hom(h, inner)
                }
            }
        })
    }
}

/// Parses the expression syntax (`disj(e,e)`, `conj(e,e)`, `cauchy(e,e)`,
/// `scalarL(<k>,e)`, `scalarR(e,<k>)`, `hom(file,e)`, `invhom(file,e)`,
/// `auto(file)`, `const(<k>)`, `char(file)`, `word("...")`). Files are
/// resolved through `load`; `const` and `word` take the alphabet of their
/// context, falling back to `alphabet`.
pub fn parse_lang_expr(
    text: &str,
    alphabet: Option<&Alphabet>,
    load: &mut dyn FnMut(&str) -> Result<Resource>,
) -> Result<LangExpr> {
    let mut p = Parser { src: text, pos: 0 };
    let raw = p.expr()?;
    p.ws();
    if p.pos != text.len() {
        return Err(p.err("trailing input"));
    }
    let mut r = Resolver { load };
    let expected = match alphabet {
        Some(a) => Some(a.clone()),
        None => r.infer(&raw)?,
    };
    let e = r.build(&raw, expected.as_ref())?;
    e.check()?;
    Ok(e)
}

impl fmt::Display for LangExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LangExpr::Behavior(_) => write!(f, "auto(..)"),
            LangExpr::Constant(_, k) => write!(f, "const({k})"),
            LangExpr::CharOfDfa(_) => write!(f, "char(..)"),
            LangExpr::WordIndicator(al, w) => write!(f, "word(\"{}\")", al.render_word(w)),
            LangExpr::Disj(a, b) => write!(f, "disj({a},{b})"),
            LangExpr::Conj(a, b) => write!(f, "conj({a},{b})"),
            LangExpr::Cauchy(a, b) => write!(f, "cauchy({a},{b})"),
            LangExpr::ScalarLeft(k, a) => write!(f, "scalarL({k},{a})"),
            LangExpr::ScalarRight(a, k) => write!(f, "scalarR({a},{k})"),
            LangExpr::HomImage(_, a) => write!(f, "hom(..,{a})"),
            LangExpr::InvHomImage(_, a) => write!(f, "invhom(..,{a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructs::constant_automaton;
    use crate::mkauto::fixtures::{k1, k2};

    fn one() -> Alphabet {
        Alphabet::from_letters(&["a"]).unwrap()
    }

    #[test]
    fn cauchy_with_empty_word_indicator() {
        let s = LangExpr::Behavior(constant_automaton(&one(), &k1()));
        let e = LangExpr::cauchy(LangExpr::WordIndicator(one(), vec![]), s);
        for n in 0..4 {
            assert_eq!(e.eval(&vec![0; n]).unwrap(), k1());
        }
    }

    #[test]
    fn hom_image_folds_preimages() {
        let xy = Alphabet::from_letters(&["x", "y"]).unwrap();
        let h = StrictAlphabeticHom::new(xy.clone(), one(), vec![0, 0]).unwrap();
        let e = LangExpr::hom(h.clone(), LangExpr::Constant(xy.clone(), k1()));
        assert_eq!(e.eval(&[0]).unwrap(), disj(&k1(), &k1()));
        let back = LangExpr::inv_hom(h, LangExpr::Constant(one(), k2()));
        assert_eq!(back.eval(&[1, 0]).unwrap(), k2());
    }

    #[test]
    fn strong_support_of_constants() {
        let z = LangExpr::Constant(one(), TruthValue::zero());
        assert!(stgsupp(&z, 3).unwrap().is_empty());
        let o = LangExpr::Constant(one(), TruthValue::one());
        assert_eq!(stgsupp(&o, 3).unwrap().len(), 4);
    }

    #[test]
    fn lifted_bimonoid_laws() {
        let c = |k: TruthValue| LangExpr::Constant(one(), k);
        let w = LangExpr::WordIndicator(one(), vec![0]);
        let l = LangExpr::disj(LangExpr::disj(c(k1()), w.clone()), c(k2()));
        let r = LangExpr::disj(c(k1()), LangExpr::disj(w.clone(), c(k2())));
        let lc = LangExpr::conj(LangExpr::conj(c(k1()), w.clone()), c(k2()));
        let rc = LangExpr::conj(c(k1()), LangExpr::conj(w, c(k2())));
        for n in 0..4 {
            let v = vec![0; n];
            assert_eq!(l.eval(&v).unwrap(), r.eval(&v).unwrap());
            assert_eq!(lc.eval(&v).unwrap(), rc.eval(&v).unwrap());
        }
    }

    #[test]
    fn text_syntax() {
        let mut load = |f: &str| -> Result<Resource> {
            match f {
                "c.mkfa" => Ok(Resource::Automaton(constant_automaton(&one(), &k1()))),
                _ => Err(Error::Io {
                    path: f.into(),
                    message: "missing".into(),
                }),
            }
        };
        let e = parse_lang_expr(
            "cauchy(word(\"\"), disj(auto(c.mkfa), const(<0,1,0,0>)))",
            None,
            &mut load,
        )
        .unwrap();
        assert_eq!(e.eval(&[0, 0]).unwrap(), k1());
        assert!(parse_lang_expr("const(<1,0,0,0>)", None, &mut load).is_err());
        let o = parse_lang_expr("scalarR(const(<1,0,0,0>), <0.3,0.2,0.4,0.1>)", Some(&one()), &mut load)
            .unwrap();
        assert_eq!(o.eval(&[]).unwrap(), k1());
        assert!(matches!(
            parse_lang_expr("bogus(x)", None, &mut load),
            Err(Error::Syntax { .. })
        ));
    }
}
