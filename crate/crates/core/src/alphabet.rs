//! Ordered alphabets, symbols, and words.
//!
//! Automata refer to letters by their index in an [`Alphabet`]; the index
//! order *is* the letter order. Extended alphabets `A × {0,1}^V` are ordinary
//! alphabets whose symbols carry a bit per variable.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A word as a sequence of letter indices into some [`Alphabet`].
pub type Word = Vec<usize>;

/// A logic variable. Lower-case initial means first order, upper-case
/// initial means second order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_first_order(&self) -> bool {
        self.0.chars().next().is_some_and(|c| c.is_ascii_lowercase())
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A base letter, optionally paired with one bit per variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symbol {
    letter: String,
    bits: Vec<(Var, bool)>,
}

impl Symbol {
    pub fn letter(letter: impl Into<String>) -> Self {
        Symbol {
            letter: letter.into(),
            bits: Vec::new(),
        }
    }

    pub fn base(&self) -> &str {
        &self.letter
    }

    pub fn bits(&self) -> &[(Var, bool)] {
        &self.bits
    }

    pub fn bit(&self, var: &Var) -> Option<bool> {
        self.bits
            .binary_search_by(|(v, _)| v.cmp(var))
            .ok()
            .map(|i| self.bits[i].1)
    }

    pub fn with_bit(&self, var: &Var, value: bool) -> Symbol {
        let mut bits = self.bits.clone();
        match bits.binary_search_by(|(v, _)| v.cmp(var)) {
            Ok(i) => bits[i].1 = value,
            Err(i) => bits.insert(i, (var.clone(), value)),
        }
        Symbol {
            letter: self.letter.clone(),
            bits,
        }
    }

    pub fn without(&self, var: &Var) -> Symbol {
        Symbol {
            letter: self.letter.clone(),
            bits: self.bits.iter().filter(|(v, _)| v != var).cloned().collect(),
        }
    }

    pub fn base_symbol(&self) -> Symbol {
        Symbol::letter(self.letter.clone())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.letter)?;
        if !self.bits.is_empty() {
            let rows: Vec<String> = self
                .bits
                .iter()
                .map(|(v, b)| format!("{v}={}", u8::from(*b)))
                .collect();
            write!(f, "[{}]", rows.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let syntax = |m: &str| Error::Syntax {
            offset: 0,
            message: format!("symbol `{s}`: {m}"),
        };
        if s.is_empty() || s.chars().any(char::is_whitespace) {
            return Err(syntax("symbols are non-empty and contain no whitespace"));
        }
        let Some(open) = s.find('[').filter(|_| s.ends_with(']')) else {
            return Ok(Symbol::letter(s));
        };
        let letter = &s[..open];
        if letter.is_empty() {
            return Err(syntax("missing base letter"));
        }
        let mut sym = Symbol::letter(letter);
        let rows = &s[open + 1..s.len() - 1];
        for row in rows.split(',').filter(|r| !r.is_empty()) {
            let (v, b) = row
                .split_once('=')
                .ok_or_else(|| syntax("rows are written `var=0` or `var=1`"))?;
            let value = match b {
                "0" => false,
                "1" => true,
                _ => return Err(syntax("row bits must be 0 or 1")),
            };
            let var = Var::new(v);
            if sym.bit(&var).is_some() {
                return Err(syntax("duplicate row"));
            }
            sym = sym.with_bit(&var, value);
        }
        Ok(sym)
    }
}

/// A finite, linearly ordered set of symbols.
#[derive(Clone)]
pub struct Alphabet {
    symbols: Vec<Symbol>,
    index: HashMap<Symbol, usize>,
    vars: Vec<Var>,
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
    }
}

impl Eq for Alphabet {}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.symbols.iter().map(|s| s.to_string())).finish()
    }
}

impl Alphabet {
    /// Builds an alphabet; all symbols must carry rows for the same variables.
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        let vars: Vec<Var> = symbols
            .first()
            .map(|s| s.bits.iter().map(|(v, _)| v.clone()).collect())
            .unwrap_or_default();
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            let row_vars: Vec<&Var> = s.bits.iter().map(|(v, _)| v).collect();
            if row_vars.len() != vars.len() || row_vars.iter().zip(&vars).any(|(a, b)| *a != b) {
                return Err(Error::AlphabetMismatch(format!(
                    "symbol `{s}` does not carry rows for exactly {:?}",
                    vars.iter().map(Var::name).collect::<Vec<_>>()
                )));
            }
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::AlphabetMismatch(format!("duplicate symbol `{s}`")));
            }
        }
        Ok(Alphabet {
            symbols,
            index,
            vars,
        })
    }

    /// Plain alphabet from base letter names, in the given order.
    pub fn from_letters<S: AsRef<str>>(letters: &[S]) -> Result<Self> {
        Self::new(letters.iter().map(|l| Symbol::letter(l.as_ref())).collect())
    }

    /// Extended alphabet `A × {0,1}^V`, adding variables one at a time in
    /// sorted order via [`Alphabet::extend`].
    pub fn extended(base: &Alphabet, vars: &[Var]) -> Result<Self> {
        let mut sorted: Vec<Var> = vars.to_vec();
        sorted.sort();
        sorted.dedup();
        let mut out = base.clone();
        for v in &sorted {
            out = out.extend(v)?;
        }
        Ok(out)
    }

    /// Adds a row for `var`: every symbol `s` becomes `s[var=1] < s[var=0]`,
    /// in place, so the existing order is refined rather than reshuffled.
    pub fn extend(&self, var: &Var) -> Result<Self> {
        if self.vars.contains(var) {
            return Err(Error::AlphabetMismatch(format!(
                "variable `{var}` already has a row"
            )));
        }
        let symbols = self
            .symbols
            .iter()
            .flat_map(|s| [s.with_bit(var, true), s.with_bit(var, false)])
            .collect();
        Self::new(symbols)
    }

    /// Drops the row of `var`. Returns the erased alphabet (symbols ordered by
    /// first occurrence) and the letter map from this alphabet into it.
    pub fn erase(&self, var: &Var) -> Result<(Alphabet, Vec<usize>)> {
        if !self.vars.contains(var) {
            return Err(Error::UnknownVariable(var.to_string()));
        }
        let mut symbols: Vec<Symbol> = Vec::new();
        let mut seen: HashMap<Symbol, usize> = HashMap::new();
        let mut map = Vec::with_capacity(self.symbols.len());
        for s in &self.symbols {
            let e = s.without(var);
            let idx = *seen.entry(e.clone()).or_insert_with(|| {
                symbols.push(e);
                symbols.len() - 1
            });
            map.push(idx);
        }
        Ok((Self::new(symbols)?, map))
    }

    /// The base alphabet (rows dropped), ordered by first occurrence.
    pub fn base(&self) -> Alphabet {
        let mut out: Vec<Symbol> = Vec::new();
        for s in &self.symbols {
            let b = s.base_symbol();
            if !out.contains(&b) {
                out.push(b);
            }
        }
        Self::new(out).expect("base letters are distinct")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn symbol(&self, i: usize) -> &Symbol {
        &self.symbols[i]
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn index_of(&self, s: &Symbol) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn index_of_str(&self, s: &str) -> Result<usize> {
        let sym: Symbol = s.parse().map_err(|_| Error::ForeignLetter(s.to_string()))?;
        self.index_of(&sym)
            .ok_or_else(|| Error::ForeignLetter(s.to_string()))
    }

    /// True when both alphabets contain the same symbols, in any order.
    pub fn same_symbols(&self, other: &Alphabet) -> bool {
        self.len() == other.len() && self.symbols.iter().all(|s| other.index.contains_key(s))
    }

    /// Letter map from this alphabet into `other`, which must contain the
    /// same symbols.
    pub fn reindex_into(&self, other: &Alphabet) -> Result<Vec<usize>> {
        if !self.same_symbols(other) {
            return Err(Error::AlphabetMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(self.symbols.iter().map(|s| other.index[s]).collect())
    }

    /// Parses a word. Whitespace-separated tokens are letters; without
    /// whitespace, a string is split into characters when every letter is a
    /// single character, and is otherwise one letter.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Vec::new());
        }
        let single_chars = self.symbols.iter().all(|s| s.to_string().chars().count() == 1);
        if text.contains(char::is_whitespace) {
            text.split_whitespace().map(|t| self.index_of_str(t)).collect()
        } else if single_chars {
            text.chars().map(|c| self.index_of_str(&c.to_string())).collect()
        } else {
            Ok(vec![self.index_of_str(text)?])
        }
    }

    pub fn word_from_symbols(&self, w: &[Symbol]) -> Result<Word> {
        w.iter()
            .map(|s| self.index_of(s).ok_or_else(|| Error::ForeignLetter(s.to_string())))
            .collect()
    }

    pub fn symbols_of(&self, w: &[usize]) -> Vec<Symbol> {
        w.iter().map(|&i| self.symbols[i].clone()).collect()
    }

    /// Renders a word; `ε` for the empty word.
    pub fn render_word(&self, w: &[usize]) -> String {
        if w.is_empty() {
            return "ε".into();
        }
        let single_chars = self.symbols.iter().all(|s| s.to_string().chars().count() == 1);
        let parts: Vec<String> = w.iter().map(|&i| self.symbols[i].to_string()).collect();
        if single_chars {
            parts.concat()
        } else {
            parts.join(" ")
        }
    }

    /// Checks that every letter of `w` is an index of this alphabet.
    pub fn check_word(&self, w: &[usize]) -> Result<()> {
        match w.iter().find(|&&i| i >= self.len()) {
            Some(i) => Err(Error::ForeignLetter(format!("#{i}"))),
            None => Ok(()),
        }
    }

    /// All words of length at most `maxlen`, shortest first, each length in
    /// lexicographic order.
    pub fn words_up_to(&self, maxlen: usize) -> Vec<Word> {
        let mut out = vec![Vec::new()];
        let mut layer: Vec<Word> = vec![Vec::new()];
        for _ in 0..maxlen {
            let mut next = Vec::with_capacity(layer.len() * self.len());
            for w in &layer {
                for a in 0..self.len() {
                    let mut v = w.clone();
                    v.push(a);
                    next.push(v);
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    /// All non-empty words of length at most `maxlen`.
    pub fn nonempty_words_up_to(&self, maxlen: usize) -> Vec<Word> {
        self.words_up_to(maxlen).into_iter().skip(1).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_round_trip() {
        let s: Symbol = "a[X=1,x=0]".parse().unwrap();
        assert_eq!(s.base(), "a");
        assert_eq!(s.bit(&Var::new("X")), Some(true));
        assert_eq!(s.bit(&Var::new("x")), Some(false));
        assert_eq!(s.to_string(), "a[X=1,x=0]");
        assert_eq!("(p,a,q)".parse::<Symbol>().unwrap().base(), "(p,a,q)");
    }

    #[test]
    fn extension_puts_one_before_zero() {
        let a = Alphabet::from_letters(&["a", "b"]).unwrap();
        let x = a.extend(&Var::new("x")).unwrap();
        let names: Vec<String> = x.symbols().iter().map(|s| s.to_string()).collect();
        assert_eq!(names, ["a[x=1]", "a[x=0]", "b[x=1]", "b[x=0]"]);
        let (erased, map) = x.erase(&Var::new("x")).unwrap();
        assert_eq!(erased, a);
        assert_eq!(map, [0, 0, 1, 1]);
        assert!(a.erase(&Var::new("x")).is_err());
    }

    #[test]
    fn word_parsing() {
        let a = Alphabet::from_letters(&["a", "b"]).unwrap();
        assert_eq!(a.parse_word("abba").unwrap(), [0, 1, 1, 0]);
        assert_eq!(a.parse_word("a b").unwrap(), [0, 1]);
        assert_eq!(a.parse_word("").unwrap(), Vec::<usize>::new());
        assert!(matches!(a.parse_word("abc"), Err(Error::ForeignLetter(_))));
        assert_eq!(a.words_up_to(2).len(), 7);
        assert_eq!(a.render_word(&[1, 0]), "ba");
    }
}
