//! MK-fuzzy automata: representation, classification, ordered path
//! enumeration, and behavior.
//!
//! The behavior of a word is the ⊔-fold of its path weights, with paths in
//! lexicographic order of their full state sequences `q0 … qn`. Neither
//! operation distributes over the other, so evaluation walks the paths
//! themselves: a depth-first search over successors in ascending state order
//! produces the paths already sorted, and the fold is accumulated on the fly.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::fclassic::{Dfa, Nfa};
use crate::kvalues::{conj, conj_fold, disj, TruthValue};

/// A weighted automaton over an ordered alphabet. State order is index order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MkAutomaton {
    alphabet: Alphabet,
    names: Vec<String>,
    initial: BTreeMap<usize, TruthValue>,
    finals: BTreeMap<usize, TruthValue>,
    transitions: BTreeMap<(usize, usize, usize), TruthValue>,
}

/// An accepting run: the state sequence `q0 … qn` over some word.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    pub states: Vec<usize>,
}

/// Incremental construction helper used by the closure constructions.
#[derive(Clone, Debug)]
pub struct Builder {
    alphabet: Alphabet,
    names: Vec<String>,
    initial: BTreeMap<usize, TruthValue>,
    finals: BTreeMap<usize, TruthValue>,
    transitions: BTreeMap<(usize, usize, usize), TruthValue>,
}

impl Builder {
    pub fn new(alphabet: &Alphabet) -> Self {
        Builder {
            alphabet: alphabet.clone(),
            names: Vec::new(),
            initial: BTreeMap::new(),
            finals: BTreeMap::new(),
            transitions: BTreeMap::new(),
        }
    }

    pub fn state(&mut self, name: impl Into<String>) -> usize {
        self.names.push(name.into());
        self.names.len() - 1
    }

    pub fn initial(&mut self, q: usize, k: TruthValue) -> &mut Self {
        self.initial.insert(q, k);
        self
    }

    pub fn final_state(&mut self, q: usize, k: TruthValue) -> &mut Self {
        self.finals.insert(q, k);
        self
    }

    pub fn transition(&mut self, p: usize, a: usize, q: usize, k: TruthValue) -> &mut Self {
        self.transitions.insert((p, a, q), k);
        self
    }

    /// Finishes without validation; constructions are responsible for
    /// producing well-formed automata.
    pub fn build(self) -> MkAutomaton {
        MkAutomaton {
            alphabet: self.alphabet,
            names: self.names,
            initial: self.initial,
            finals: self.finals,
            transitions: self.transitions,
        }
    }
}

impl MkAutomaton {
    /// Assembles an automaton without checking it; see [`MkAutomaton::validate`].
    pub fn from_parts(
        alphabet: Alphabet,
        names: Vec<String>,
        initial: BTreeMap<usize, TruthValue>,
        finals: BTreeMap<usize, TruthValue>,
        transitions: BTreeMap<(usize, usize, usize), TruthValue>,
    ) -> Self {
        MkAutomaton {
            alphabet,
            names,
            initial,
            finals,
            transitions,
        }
    }

    /// Assembles and validates.
    pub fn new(
        alphabet: Alphabet,
        names: Vec<String>,
        initial: BTreeMap<usize, TruthValue>,
        finals: BTreeMap<usize, TruthValue>,
        transitions: BTreeMap<(usize, usize, usize), TruthValue>,
    ) -> Result<Self> {
        let a = Self::from_parts(alphabet, names, initial, finals, transitions);
        let errs = a.validate();
        if errs.is_empty() {
            Ok(a)
        } else {
            Err(Error::Validation(errs))
        }
    }

    /// Lists every violated invariant; empty when the automaton is well formed.
    pub fn validate(&self) -> Vec<String> {
        let n = self.names.len();
        let mut errs = Vec::new();
        let mut seen = HashSet::new();
        for name in &self.names {
            if !seen.insert(name) {
                errs.push(format!("duplicate state name `{name}`"));
            }
        }
        for (&q, k) in &self.initial {
            if q >= n {
                errs.push(format!("initial weight on unknown state #{q}"));
            } else if k.is_zero() {
                errs.push(format!(
                    "initial weight of `{}` is 𝟎; initial weights must be non-zero",
                    self.names[q]
                ));
            }
        }
        for &q in self.finals.keys() {
            if q >= n {
                errs.push(format!("final weight on unknown state #{q}"));
            }
        }
        for &(p, a, q) in self.transitions.keys() {
            if p >= n || q >= n {
                errs.push(format!("transition ({p},{a},{q}) references an unknown state"));
            }
            if a >= self.alphabet.len() {
                errs.push(format!("transition ({p},{a},{q}) uses an unknown letter"));
            }
        }
        errs
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn initial(&self) -> &BTreeMap<usize, TruthValue> {
        &self.initial
    }

    pub fn finals(&self) -> &BTreeMap<usize, TruthValue> {
        &self.finals
    }

    pub fn transitions(&self) -> &BTreeMap<(usize, usize, usize), TruthValue> {
        &self.transitions
    }

    /// Successors of `p` under `a` in ascending state order.
    pub fn successors(&self, p: usize, a: usize) -> impl Iterator<Item = (usize, &TruthValue)> {
        self.transitions
            .range((p, a, 0)..=(p, a, usize::MAX))
            .map(|(&(_, _, q), k)| (q, k))
    }

    /// Walks all accepting paths over `w` in path order, passing each state
    /// sequence with its weight.
    pub fn for_each_path<F>(&self, w: &[usize], mut visit: F) -> Result<()>
    where
        F: FnMut(&[usize], &TruthValue),
    {
        self.alphabet.check_word(w)?;
        let mut states = Vec::with_capacity(w.len() + 1);
        for (&q0, k) in &self.initial {
            states.push(q0);
            self.walk(w, k, &mut states, &mut visit);
            states.pop();
        }
        Ok(())
    }

    fn walk<F>(&self, w: &[usize], prefix: &TruthValue, states: &mut Vec<usize>, visit: &mut F)
    where
        F: FnMut(&[usize], &TruthValue),
    {
        let q = *states.last().expect("walk starts from an initial state");
        let i = states.len() - 1;
        if i == w.len() {
            if let Some(ter) = self.finals.get(&q) {
                visit(states, &conj(prefix, ter));
            }
            return;
        }
        for (r, k) in self.successors(q, w[i]) {
            let next = conj(prefix, k);
            states.push(r);
            self.walk(w, &next, states, visit);
            states.pop();
        }
    }

    /// All accepting paths over `w`, in path order.
    pub fn paths(&self, w: &[usize]) -> Result<Vec<Path>> {
        let mut out = Vec::new();
        self.for_each_path(w, |s, _| out.push(Path { states: s.to_vec() }))?;
        Ok(out)
    }

    /// Path weights over `w`, in path order.
    pub fn path_weights(&self, w: &[usize]) -> Result<Vec<TruthValue>> {
        let mut out = Vec::new();
        self.for_each_path(w, |_, k| out.push(k.clone()))?;
        Ok(out)
    }

    pub fn path_count(&self, w: &[usize]) -> Result<usize> {
        let mut n = 0;
        self.for_each_path(w, |_, _| n += 1)?;
        Ok(n)
    }

    /// `in(q0) ⊓ wt(t1) ⊓ … ⊓ wt(tn) ⊓ ter(qn)`, folded left to right.
    pub fn path_weight(&self, w: &[usize], path: &Path) -> Result<TruthValue> {
        let s = &path.states;
        let bad = || Error::Precondition(format!("{path:?} is not an accepting path"));
        if s.len() != w.len() + 1 {
            return Err(bad());
        }
        let mut factors = vec![self.initial.get(&s[0]).ok_or_else(bad)?];
        for (i, &a) in w.iter().enumerate() {
            factors.push(self.transitions.get(&(s[i], a, s[i + 1])).ok_or_else(bad)?);
        }
        factors.push(self.finals.get(&s[w.len()]).ok_or_else(bad)?);
        Ok(conj_fold(factors))
    }

    /// `‖A‖(w)`: the ordered ⊔-fold of path weights, `𝟎` without paths.
    pub fn behavior(&self, w: &[usize]) -> Result<TruthValue> {
        let mut acc = TruthValue::zero();
        self.for_each_path(w, |_, k| acc = disj(&acc, k))?;
        Ok(acc)
    }

    /// Reference evaluation: materializes every state sequence, keeps the
    /// accepting ones, sorts them, and folds. Exponential; for testing.
    pub fn behavior_reference(&self, w: &[usize]) -> Result<TruthValue> {
        self.alphabet.check_word(w)?;
        let n = self.num_states();
        let mut seqs: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..=w.len() {
            seqs = seqs
                .into_iter()
                .flat_map(|s| {
                    (0..n).map(move |q| {
                        let mut t = s.clone();
                        t.push(q);
                        t
                    })
                })
                .collect();
        }
        let mut accepting: Vec<Path> = seqs
            .into_iter()
            .map(|states| Path { states })
            .filter(|p| self.path_weight(w, p).is_ok())
            .collect();
        accepting.sort();
        let mut acc = TruthValue::zero();
        for p in &accepting {
            acc = disj(&acc, &self.path_weight(w, p)?);
        }
        Ok(acc)
    }

    pub fn is_deterministic(&self) -> bool {
        if self.initial.len() != 1 {
            return false;
        }
        let mut seen = HashSet::new();
        self.transitions.keys().all(|&(p, a, _)| seen.insert((p, a)))
    }

    /// No word has two distinct accepting paths. Decided on the self-product:
    /// a pair of runs that has diverged somewhere must not reach a final pair.
    pub fn is_unambiguous(&self) -> bool {
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        for &p in self.initial.keys() {
            for &q in self.initial.keys() {
                let s = (p, q, p != q);
                if seen.insert(s) {
                    queue.push_back(s);
                }
            }
        }
        while let Some((p, q, diverged)) = queue.pop_front() {
            if diverged && self.finals.contains_key(&p) && self.finals.contains_key(&q) {
                return false;
            }
            for a in 0..self.alphabet.len() {
                for (p2, _) in self.successors(p, a) {
                    for (q2, _) in self.successors(q, a) {
                        let s = (p2, q2, diverged || p2 != q2);
                        if seen.insert(s) {
                            queue.push_back(s);
                        }
                    }
                }
            }
        }
        true
    }

    /// A single non-final initial state with weight `𝟏` and no incoming
    /// transitions; all final weights `𝟏`; no transitions leave a final state.
    pub fn is_normalized(&self) -> bool {
        let Some((&q_in, k)) = self.initial.iter().next() else {
            return false;
        };
        self.initial.len() == 1
            && k.is_one()
            && !self.finals.contains_key(&q_in)
            && self.finals.values().all(TruthValue::is_one)
            && self
                .transitions
                .keys()
                .all(|&(p, _, q)| q != q_in && !self.finals.contains_key(&p))
    }

    /// The unweighted automaton with the same states, transitions, initial
    /// and final sets; it accepts the words that have at least one path.
    pub fn support_nfa(&self) -> Nfa {
        Nfa::new(
            self.alphabet.clone(),
            self.names.clone(),
            self.initial.keys().copied().collect(),
            self.finals.keys().copied().collect(),
            self.transitions.keys().copied().collect(),
        )
        .expect("a validated automaton has a valid support")
    }

    /// Words without any accepting path.
    pub fn dead_words_dfa(&self) -> Dfa {
        self.support_nfa().determinize().complement()
    }

    /// Same automaton with states listed in a new order: `order[i]` is the
    /// old index of new state `i`.
    pub fn reordered(&self, order: &[usize]) -> Result<MkAutomaton> {
        let n = self.num_states();
        let mut inv = vec![usize::MAX; n];
        for (new, &old) in order.iter().enumerate() {
            if old >= n || inv[old] != usize::MAX {
                return Err(Error::Precondition("state order must be a permutation".into()));
            }
            inv[old] = new;
        }
        if order.len() != n {
            return Err(Error::Precondition("state order must be a permutation".into()));
        }
        Ok(self.relabel(&inv, order.iter().map(|&q| self.names[q].clone()).collect()))
    }

    /// Drops states not reachable from an initial state, keeping the
    /// relative order of the rest.
    pub fn prune_unreachable(&self) -> MkAutomaton {
        let mut reach: BTreeSet<usize> = self.initial.keys().copied().collect();
        let mut stack: Vec<usize> = reach.iter().copied().collect();
        while let Some(p) = stack.pop() {
            for (&(_, _, q), _) in self.transitions.range((p, 0, 0)..=(p, usize::MAX, usize::MAX)) {
                if reach.insert(q) {
                    stack.push(q);
                }
            }
        }
        if reach.len() == self.num_states() {
            return self.clone();
        }
        let mut map = vec![usize::MAX; self.num_states()];
        let mut names = Vec::new();
        for &q in &reach {
            map[q] = names.len();
            names.push(self.names[q].clone());
        }
        self.relabel(&map, names)
    }

    /// Drops states that are unreachable or cannot reach a final state. No
    /// accepting path is lost and the relative order is kept.
    pub fn trim(&self) -> MkAutomaton {
        let m = self.prune_unreachable();
        let mut live: BTreeSet<usize> = m.finals.keys().copied().collect();
        loop {
            let before = live.len();
            for &(p, _, q) in m.transitions.keys() {
                if live.contains(&q) {
                    live.insert(p);
                }
            }
            if live.len() == before {
                break;
            }
        }
        if live.len() == m.num_states() {
            return m;
        }
        let mut map = vec![usize::MAX; m.num_states()];
        let mut names = Vec::new();
        for &q in &live {
            map[q] = names.len();
            names.push(m.names[q].clone());
        }
        m.relabel(&map, names)
    }

    /// Renames states through `map` (old → new; `usize::MAX` drops the state).
    fn relabel(&self, map: &[usize], names: Vec<String>) -> MkAutomaton {
        let keep = |q: &usize| map[*q] != usize::MAX;
        MkAutomaton {
            alphabet: self.alphabet.clone(),
            names,
            initial: self
                .initial
                .iter()
                .filter(|(q, _)| keep(q))
                .map(|(&q, k)| (map[q], k.clone()))
                .collect(),
            finals: self
                .finals
                .iter()
                .filter(|(q, _)| keep(q))
                .map(|(&q, k)| (map[q], k.clone()))
                .collect(),
            transitions: self
                .transitions
                .iter()
                .filter(|((p, _, q), _)| keep(p) && keep(q))
                .map(|(&(p, a, q), k)| ((map[p], a, map[q]), k.clone()))
                .collect(),
        }
    }

    /// Same automaton over an alphabet holding the same symbols in another order.
    pub fn with_alphabet(&self, target: &Alphabet) -> Result<MkAutomaton> {
        let map = self.alphabet.reindex_into(target)?;
        Ok(MkAutomaton {
            alphabet: target.clone(),
            transitions: self
                .transitions
                .iter()
                .map(|(&(p, a, q), k)| ((p, map[a], q), k.clone()))
                .collect(),
            ..self.clone()
        })
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::kvalues::TruthValue;

    pub fn k1() -> TruthValue {
        TruthValue::from_ratios([(3, 10), (1, 5), (2, 5), (1, 10)]).unwrap()
    }

    pub fn k2() -> TruthValue {
        TruthValue::from_ratios([(9, 10), (1, 20), (3, 100), (1, 50)]).unwrap()
    }

    pub fn a() -> Alphabet {
        Alphabet::from_letters(&["a"]).unwrap()
    }

    /// States p < q; in(p)=𝟏; ter(p)=ter(q)=𝟏; (p,a,p)=k1, (p,a,q)=k2, (q,a,q)=𝟏.
    pub fn two() -> MkAutomaton {
        let mut b = Builder::new(&a());
        let p = b.state("p");
        let q = b.state("q");
        b.initial(p, TruthValue::one())
            .final_state(p, TruthValue::one())
            .final_state(q, TruthValue::one())
            .transition(p, 0, p, k1())
            .transition(p, 0, q, k2())
            .transition(q, 0, q, TruthValue::one());
        b.build()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::constructs::constant_automaton;

    #[test]
    fn two_state_fixture() {
        let t = two();
        assert!(t.validate().is_empty());
        let paths = t.paths(&[0]).unwrap();
        assert_eq!(paths, [Path { states: vec![0, 0] }, Path { states: vec![0, 1] }]);
        assert_eq!(t.path_weight(&[0], &paths[1]).unwrap(), k2());
        assert_eq!(
            t.behavior(&[0]).unwrap().to_string(),
            "<21/25,1/100,19/500,14/125>"
        );
        assert!(!t.is_unambiguous());
        assert!(!t.is_deterministic());
        for n in 0..5 {
            let w = vec![0; n];
            assert_eq!(t.behavior(&w).unwrap(), t.behavior_reference(&w).unwrap());
        }
    }

    #[test]
    fn constant_fixture() {
        let c = constant_automaton(&a(), &k1());
        assert_eq!(c.paths(&[0, 0]).unwrap(), [Path { states: vec![0, 0, 0] }]);
        for n in 0..4 {
            assert_eq!(c.behavior(&vec![0; n]).unwrap(), k1());
        }
        assert!(c.is_deterministic());
        assert!(c.is_unambiguous());
        assert!(!c.is_normalized());
    }

    #[test]
    fn validation_and_empty_finals() {
        let mut b = Builder::new(&a());
        let p = b.state("p");
        b.initial(p, TruthValue::zero()).transition(p, 0, 3, TruthValue::one());
        let bad = b.build();
        let errs = bad.validate();
        assert_eq!(errs.len(), 2);
        assert!(errs[0].contains("non-zero"));

        let mut b = Builder::new(&a());
        let p = b.state("p");
        b.initial(p, k1()).transition(p, 0, p, k2());
        let none = b.build();
        assert!(none.paths(&[0, 0]).unwrap().is_empty());
        assert!(none.behavior(&[0]).unwrap().is_zero());
        assert!(none.behavior(&[1]).is_err());
    }

    #[test]
    fn unambiguous_without_determinism() {
        let ab = Alphabet::from_letters(&["a", "b"]).unwrap();
        let mut b = Builder::new(&ab);
        let (p, q, r) = (b.state("p"), b.state("q"), b.state("r"));
        b.initial(p, k1())
            .initial(q, k2())
            .final_state(r, TruthValue::one())
            .transition(p, 0, r, TruthValue::one())
            .transition(q, 1, r, TruthValue::one());
        let m = b.build();
        assert!(!m.is_deterministic());
        assert!(m.is_unambiguous());
        for w in ab.words_up_to(4) {
            assert!(m.path_count(&w).unwrap() <= 1);
        }
    }

    #[test]
    fn dead_words_and_pruning() {
        let t = two();
        let dead = t.dead_words_dfa();
        assert!(!dead.accepts(&[0, 0]).unwrap());
        let mut b = Builder::new(&a());
        let p = b.state("p");
        let _orphan = b.state("orphan");
        let q = b.state("q");
        b.initial(p, k1()).final_state(q, k2()).transition(p, 0, q, k1());
        let m = b.build();
        let pruned = m.prune_unreachable();
        assert_eq!(pruned.names(), ["p", "q"]);
        assert_eq!(pruned.behavior(&[0]).unwrap(), m.behavior(&[0]).unwrap());
        assert!(dead_or_live_partition(&m));
    }

    fn dead_or_live_partition(m: &MkAutomaton) -> bool {
        let dead = m.dead_words_dfa();
        m.alphabet()
            .words_up_to(4)
            .iter()
            .all(|w| dead.accepts(w).unwrap() == (m.path_count(w).unwrap() == 0))
    }
}
