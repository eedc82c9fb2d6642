//! Direct semantics: satisfaction of MSO formulas and the inductive
//! evaluation of weighted formulas on encoded words.

use std::collections::{BTreeMap, BTreeSet};

use super::syntax::{MkFormula, Mso};
use crate::alphabet::{Alphabet, Var};
use crate::error::{Error, Result};
use crate::kvalues::{conj, disj, TruthValue};

/// Positions are bits of a `u64`, so words are limited to this length.
pub const MAX_WORD_LEN: usize = 63;

/// A `(V, w)`-assignment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    pub first_order: BTreeMap<Var, usize>,
    pub second_order: BTreeMap<Var, BTreeSet<usize>>,
}

/// Splits a word over `A_V` into its base letters and assignment; `None`
/// when some first-order row does not hold exactly one 1.
pub fn decode(alphabet: &Alphabet, w: &[usize]) -> Result<Option<(Vec<String>, Assignment)>> {
    alphabet.check_word(w)?;
    let mut letters = Vec::with_capacity(w.len());
    let mut asg = Assignment::default();
    for v in alphabet.vars() {
        if !v.is_first_order() {
            asg.second_order.insert(v.clone(), BTreeSet::new());
        }
    }
    for (i, &a) in w.iter().enumerate() {
        let s = alphabet.symbol(a);
        letters.push(s.base().to_string());
        for (v, bit) in s.bits() {
            if !*bit {
                continue;
            }
            if v.is_first_order() {
                if asg.first_order.insert(v.clone(), i).is_some() {
                    return Ok(None);
                }
            } else {
                asg.second_order.get_mut(v).expect("row present").insert(i);
            }
        }
    }
    let all_fo = alphabet.vars().iter().filter(|v| v.is_first_order()).count();
    if asg.first_order.len() != all_fo {
        return Ok(None);
    }
    Ok(Some((letters, asg)))
}

/// Encodes a base word and an assignment as a word over `alphabet`.
pub fn encode(alphabet: &Alphabet, letters: &[String], asg: &Assignment) -> Result<Vec<usize>> {
    (0..letters.len())
        .map(|i| {
            let mut s = crate::alphabet::Symbol::letter(letters[i].clone());
            for v in alphabet.vars() {
                let bit = if v.is_first_order() {
                    asg.first_order.get(v) == Some(&i)
                } else {
                    asg.second_order.get(v).is_some_and(|set| set.contains(&i))
                };
                s = s.with_bit(v, bit);
            }
            alphabet
                .index_of(&s)
                .ok_or_else(|| Error::ForeignLetter(s.to_string()))
        })
        .collect()
}

/// Order in which `⊕_X` visits the subsets of `dom(w)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubsetOrder {
    /// `I ≤ J` iff the ascending index word of `I` is lexicographically at
    /// most that of `J`; the order of the weighted semantics.
    Ascending,
    /// Lexicographic order of the `X`-rows read left to right with `1`
    /// before `0`; the order the letter extension `(a,1) < (a,0)` induces on
    /// preimages.
    RowLetters,
}

fn mask_indices(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

fn subset_masks(n: usize, order: SubsetOrder) -> Vec<u64> {
    let mut all: Vec<u64> = (0..1u64 << n).collect();
    match order {
        SubsetOrder::Ascending => all.sort_by_key(|&m| mask_indices(m, n)),
        SubsetOrder::RowLetters => {
            all.sort_by_key(|&m| (0..n).map(|i| 1 - (m >> i & 1)).collect::<Vec<_>>())
        }
    }
    all
}

/// All subsets of `{0,…,n-1}` in ascending order: for `n = 2`,
/// `[∅, {0}, {0,1}, {1}]`.
pub fn subsets_ascending(n: usize) -> Vec<BTreeSet<usize>> {
    subsets_in(n, SubsetOrder::Ascending)
}

pub fn subsets_in(n: usize, order: SubsetOrder) -> Vec<BTreeSet<usize>> {
    assert!(n <= 20, "2^{n} subsets");
    subset_masks(n, order)
        .into_iter()
        .map(|m| mask_indices(m, n).into_iter().collect())
        .collect()
}

#[derive(Clone, Copy, Debug)]
enum Slot {
    Fo(usize),
    So(u64),
    /// Second-order variable not yet chosen; atoms over it are unknown.
    Open,
}

/// Evaluation context for one base word.
pub(crate) struct World<'a> {
    letters: &'a [String],
    n: usize,
    order: SubsetOrder,
    subsets: Option<Vec<u64>>,
    env: Vec<(Var, Slot)>,
}

impl<'a> World<'a> {
    pub(crate) fn new(letters: &'a [String], order: SubsetOrder) -> Result<Self> {
        if letters.len() > MAX_WORD_LEN {
            return Err(Error::Precondition(format!(
                "formula evaluation supports words of length at most {MAX_WORD_LEN}"
            )));
        }
        Ok(World {
            letters,
            n: letters.len(),
            order,
            subsets: None,
            env: Vec::new(),
        })
    }

    pub(crate) fn bind(&mut self, asg: &Assignment) {
        for (v, &i) in &asg.first_order {
            self.env.push((v.clone(), Slot::Fo(i)));
        }
        for (v, set) in &asg.second_order {
            let mask = set.iter().fold(0u64, |m, &i| m | 1 << i);
            self.env.push((v.clone(), Slot::So(mask)));
        }
    }

    fn lookup(&self, v: &Var) -> Result<Slot> {
        self.env
            .iter()
            .rev()
            .find(|(w, _)| w == v)
            .map(|(_, s)| *s)
            .ok_or_else(|| Error::UnboundVariable(v.to_string()))
    }

    fn position(&self, v: &Var) -> Result<usize> {
        match self.lookup(v)? {
            Slot::Fo(i) => Ok(i),
            _ => Err(Error::UnboundVariable(format!("{v} (expected a position)"))),
        }
    }

    fn with<T>(&mut self, v: &Var, s: Slot, f: impl FnOnce(&mut Self) -> T) -> T {
        self.env.push((v.clone(), s));
        let out = f(self);
        self.env.pop();
        out
    }

    fn second_order_range(&mut self) -> Result<Vec<u64>> {
        if self.n > 20 {
            return Err(Error::Precondition(
                "second-order quantification over words longer than 20".into(),
            ));
        }
        let (n, order) = (self.n, self.order);
        Ok(self.subsets.get_or_insert_with(|| subset_masks(n, order)).clone())
    }

    /// Kleene evaluation: `None` when the value depends on an open variable.
    pub(crate) fn holds(&mut self, m: &Mso) -> Result<Option<bool>> {
        Ok(match m {
            Mso::True => Some(true),
            Mso::Label(a, x) => Some(self.letters[self.position(x)?] == *a),
            Mso::Le(x, y) => Some(self.position(x)? <= self.position(y)?),
            Mso::In(x, set) => {
                let i = self.position(x)?;
                match self.lookup(set)? {
                    Slot::So(mask) => Some(mask >> i & 1 == 1),
                    Slot::Open => None,
                    Slot::Fo(_) => {
                        return Err(Error::UnboundVariable(format!("{set} (expected a set)")))
                    }
                }
            }
            Mso::Not(a) => self.holds(a)?.map(|b| !b),
            Mso::Or(a, b) => match self.holds(a)? {
                Some(true) => Some(true),
                left => match (left, self.holds(b)?) {
                    (_, Some(true)) => Some(true),
                    (Some(false), Some(false)) => Some(false),
                    _ => None,
                },
            },
            Mso::Exists(v, body) => {
                let range: Vec<Slot> = if v.is_first_order() {
                    (0..self.n).map(Slot::Fo).collect()
                } else {
                    self.second_order_range()?.into_iter().map(Slot::So).collect()
                };
                let mut unknown = false;
                for s in range {
                    match self.with(v, s, |w| w.holds(body))? {
                        Some(true) => return Ok(Some(true)),
                        None => unknown = true,
                        Some(false) => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(false)
                }
            }
        })
    }

    fn satisfied(&mut self, m: &Mso) -> Result<bool> {
        self.holds(m)?
            .ok_or_else(|| Error::Precondition("formula depends on an unassigned variable".into()))
    }

    /// True when the value is `𝟎` whatever the open variables hold. Uses only
    /// `𝟎 ⊓ k = 𝟎` and zero-sum freeness, so it is never wrong, only
    /// sometimes inconclusive.
    pub(crate) fn surely_zero(&mut self, f: &MkFormula) -> Result<bool> {
        Ok(match f {
            MkFormula::Const(k) => k.is_zero(),
            MkFormula::Bool(m) => self.holds(m)? == Some(false),
            MkFormula::Times(a, _) => self.surely_zero(a)?,
            MkFormula::Plus(a, b) => self.surely_zero(a)? && self.surely_zero(b)?,
            MkFormula::SumSo(v, body) => self.with(v, Slot::Open, |w| w.surely_zero(body))?,
            MkFormula::SumFo(v, body) => {
                for i in 0..self.n {
                    if !self.with(v, Slot::Fo(i), |w| w.surely_zero(body))? {
                        return Ok(false);
                    }
                }
                true
            }
            MkFormula::ProdFo(..) => false,
        })
    }

    pub(crate) fn value(&mut self, f: &MkFormula) -> Result<TruthValue> {
        Ok(match f {
            MkFormula::Const(k) => k.clone(),
            MkFormula::Bool(m) => TruthValue::from_bool(self.satisfied(m)?),
            MkFormula::Plus(a, b) => disj(&self.value(a)?, &self.value(b)?),
            MkFormula::Times(a, b) => {
                let left = self.value(a)?;
                if left.is_zero() {
                    left
                } else {
                    conj(&left, &self.value(b)?)
                }
            }
            MkFormula::SumFo(v, body) => {
                let mut acc = TruthValue::zero();
                for i in 0..self.n {
                    let k = self.with(v, Slot::Fo(i), |w| w.value(body))?;
                    acc = disj(&acc, &k);
                }
                acc
            }
            MkFormula::ProdFo(v, body) => {
                let mut acc = TruthValue::one();
                for i in 0..self.n {
                    let k = self.with(v, Slot::Fo(i), |w| w.value(body))?;
                    acc = conj(&acc, &k);
                }
                acc
            }
            MkFormula::SumSo(v, body) => {
                let mut acc = TruthValue::zero();
                for mask in self.second_order_range()? {
                    let k = self.with(v, Slot::So(mask), |w| -> Result<TruthValue> {
                        // Skipped terms are 𝟎, the unit of ⊔.
                        if w.surely_zero(body)? {
                            Ok(TruthValue::zero())
                        } else {
                            w.value(body)
                        }
                    })?;
                    if !k.is_zero() {
                        acc = disj(&acc, &k);
                    }
                }
                acc
            }
        })
    }

    /// Assignments of `sets` (outermost first) satisfying `m`, in nested
    /// subset order.
    pub(crate) fn models(&mut self, m: &Mso, sets: &[Var]) -> Result<Vec<Vec<u64>>> {
        let mut out = Vec::new();
        let mut chosen = Vec::with_capacity(sets.len());
        for v in sets {
            self.env.push((v.clone(), Slot::Open));
        }
        let base = self.env.len() - sets.len();
        self.models_from(m, sets, base, &mut chosen, &mut out)?;
        self.env.truncate(base);
        Ok(out)
    }

    fn models_from(
        &mut self,
        m: &Mso,
        sets: &[Var],
        base: usize,
        chosen: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
    ) -> Result<()> {
        let k = chosen.len();
        if k == sets.len() {
            if self.satisfied(m)? {
                out.push(chosen.clone());
            }
            return Ok(());
        }
        for mask in self.second_order_range()? {
            self.env[base + k].1 = Slot::So(mask);
            if self.holds(m)? != Some(false) {
                chosen.push(mask);
                self.models_from(m, sets, base, chosen, out)?;
                chosen.pop();
            }
        }
        self.env[base + k].1 = Slot::Open;
        Ok(())
    }
}

fn check_scope(free: &BTreeSet<Var>, alphabet: &Alphabet) -> Result<()> {
    match free.iter().find(|v| !alphabet.vars().contains(v)) {
        Some(v) => Err(Error::UnboundVariable(format!(
            "{v} is free but has no row in the alphabet"
        ))),
        None => Ok(()),
    }
}

/// `(w,σ) ⊨ φ` for a word over `A_V`; invalid encodings satisfy nothing.
pub fn mso_satisfies(m: &Mso, alphabet: &Alphabet, w: &[usize]) -> Result<bool> {
    check_scope(&m.free_vars(), alphabet)?;
    let Some((letters, asg)) = decode(alphabet, w)? else {
        return Ok(false);
    };
    let mut world = World::new(&letters, SubsetOrder::Ascending)?;
    world.bind(&asg);
    world.satisfied(m)
}

/// `‖φ‖_V(w,σ)` for a word over `A_V`; `𝟎` on invalid encodings.
pub fn mk_eval(f: &MkFormula, alphabet: &Alphabet, w: &[usize]) -> Result<TruthValue> {
    mk_eval_in(f, alphabet, w, SubsetOrder::Ascending)
}

/// [`mk_eval`] with `⊕_X` folded in the given subset order.
pub fn mk_eval_in(
    f: &MkFormula,
    alphabet: &Alphabet,
    w: &[usize],
    order: SubsetOrder,
) -> Result<TruthValue> {
    check_scope(&f.free_vars(), alphabet)?;
    let Some((letters, asg)) = decode(alphabet, w)? else {
        return Ok(TruthValue::zero());
    };
    let mut world = World::new(&letters, order)?;
    world.bind(&asg);
    world.value(f)
}

/// Satisfying assignments of `m` over the second-order variables `sets`
/// (its only free variables) on the base word `letters`, in the nested
/// ascending subset order.
pub fn models(m: &Mso, sets: &[Var], letters: &[String]) -> Result<Vec<Vec<BTreeSet<usize>>>> {
    let mut world = World::new(letters, SubsetOrder::Ascending)?;
    let n = letters.len();
    Ok(world
        .models(m, sets)?
        .into_iter()
        .map(|t| t.into_iter().map(|mask| mask_indices(mask, n).into_iter().collect()).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::super::syntax::{parse_mk, parse_mso};
    use super::*;
    use crate::mkauto::fixtures::k1;

    fn ab() -> Alphabet {
        Alphabet::from_letters(&["a", "b"]).unwrap()
    }

    #[test]
    fn subset_order() {
        let s = |v: &[usize]| v.iter().copied().collect::<BTreeSet<usize>>();
        assert_eq!(subsets_ascending(2), vec![s(&[]), s(&[0]), s(&[0, 1]), s(&[1])]);
        assert_eq!(subsets_ascending(0), vec![s(&[])]);
        assert_eq!(
            subsets_in(2, SubsetOrder::RowLetters),
            vec![s(&[0, 1]), s(&[0]), s(&[1]), s(&[])]
        );
        for n in 0..6 {
            assert!(subsets_ascending(n)[0].is_empty());
            assert_eq!(subsets_ascending(n).len(), 1 << n);
        }
    }

    #[test]
    fn satisfaction_examples() {
        let al = ab();
        let w = al.parse_word("ab").unwrap();
        assert!(mso_satisfies(&parse_mso("true").unwrap(), &al, &[]).unwrap());
        assert!(mso_satisfies(&parse_mso("exists x . P_b(x)").unwrap(), &al, &w).unwrap());
        let f = parse_mso("exists x . (first(x) & P_b(x))").unwrap();
        assert!(!mso_satisfies(&f, &al, &w).unwrap());
    }

    #[test]
    fn free_variables_need_rows() {
        let f = parse_mso("P_a(x)").unwrap();
        assert!(matches!(mso_satisfies(&f, &ab(), &[0]), Err(Error::UnboundVariable(_))));
        let ax = Alphabet::extended(&ab(), &[Var::new("x")]).unwrap();
        let w = ax.parse_word("a[x=0] a[x=1]").unwrap();
        assert!(mso_satisfies(&f, &ax, &w).unwrap());
        let bad = ax.parse_word("a[x=1] a[x=1]").unwrap();
        assert!(!mso_satisfies(&parse_mso("true").unwrap(), &ax, &bad).unwrap());
        assert!(mk_eval(&parse_mk("<0.3,0.2,0.4,0.1>").unwrap(), &ax, &bad).unwrap().is_zero());
    }

    #[test]
    fn product_over_full_set() {
        let f = parse_mk("prod x . (x in X -> <0.3,0.2,0.4,0.1>)").unwrap();
        let ax = Alphabet::extended(&ab(), &[Var::new("X")]).unwrap();
        for n in 0..4 {
            let w = vec![ax.index_of_str("a[X=1]").unwrap(); n];
            let expect = crate::kvalues::conj_fold(std::iter::repeat_n(&k1(), n));
            assert_eq!(mk_eval(&f, &ax, &w).unwrap(), expect);
        }
    }

    #[test]
    fn pruned_sum_matches_plain_fold() {
        let f = parse_mk("sum X . ((exists x . (x in X & P_a(x))) (*) (sum Y . ((forall y . (y in Y -> y in X)) (*) <0.3,0.2,0.4,0.1>)))").unwrap();
        let al = ab();
        for w in al.words_up_to(3) {
            let letters: Vec<String> = w.iter().map(|&i| al.symbol(i).base().to_string()).collect();
            let mut world = World::new(&letters, SubsetOrder::Ascending).unwrap();
            let got = world.value(&f).unwrap();
            // Reference without pruning: every subset pair, folded in order.
            let subs = subset_masks(w.len(), SubsetOrder::Ascending);
            let mut acc = TruthValue::zero();
            for &x in &subs {
                let has_a = (0..w.len()).any(|i| x >> i & 1 == 1 && letters[i] == "a");
                let inner = if has_a {
                    let mut inner = TruthValue::zero();
                    for &y in &subs {
                        let k = if y & !x == 0 { k1() } else { TruthValue::zero() };
                        inner = disj(&inner, &k);
                    }
                    inner
                } else {
                    TruthValue::zero()
                };
                acc = disj(&acc, &inner);
            }
            assert_eq!(got, acc, "{w:?}");
        }
    }

    #[test]
    fn models_enumerate_in_nested_order() {
        let m = parse_mso("partition(X,Y)").unwrap();
        let letters = vec!["a".to_string(), "b".to_string()];
        let got = models(&m, &[Var::new("X"), Var::new("Y")], &letters).unwrap();
        let s = |v: &[usize]| v.iter().copied().collect::<BTreeSet<usize>>();
        assert_eq!(
            got,
            vec![
                vec![s(&[]), s(&[0, 1])],
                vec![s(&[0]), s(&[1])],
                vec![s(&[0, 1]), s(&[])],
                vec![s(&[1]), s(&[0])],
            ]
        );
    }

    #[test]
    fn encode_decode_round_trip() {
        let al = Alphabet::extended(&ab(), &[Var::new("x"), Var::new("X")]).unwrap();
        for w in al.words_up_to(2) {
            if let Some((letters, asg)) = decode(&al, &w).unwrap() {
                assert_eq!(encode(&al, &letters, &asg).unwrap(), w);
            }
        }
    }
}
