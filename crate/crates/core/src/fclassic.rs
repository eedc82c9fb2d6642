//! Classical boolean finite automata over ordered alphabets.
//!
//! These supply recognizable languages to the weighted constructions and
//! carry the MSO compilation pipeline. Letters are alphabet indices.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::alphabet::{Alphabet, Var};
use crate::error::{Error, Result};

/// Nondeterministic automaton without ε-transitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    alphabet: Alphabet,
    names: Vec<String>,
    initial: BTreeSet<usize>,
    finals: BTreeSet<usize>,
    transitions: BTreeSet<(usize, usize, usize)>,
}

/// Deterministic automaton; missing transitions reject.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Alphabet,
    names: Vec<String>,
    initial: usize,
    finals: Vec<bool>,
    delta: Vec<Vec<Option<usize>>>,
}

fn check_state(n: usize, q: usize, what: &str, errs: &mut Vec<String>) {
    if q >= n {
        errs.push(format!("{what} references unknown state #{q}"));
    }
}

impl Nfa {
    pub fn new(
        alphabet: Alphabet,
        names: Vec<String>,
        initial: BTreeSet<usize>,
        finals: BTreeSet<usize>,
        transitions: BTreeSet<(usize, usize, usize)>,
    ) -> Result<Self> {
        let n = names.len();
        let mut errs = Vec::new();
        for &q in &initial {
            check_state(n, q, "initial", &mut errs);
        }
        for &q in &finals {
            check_state(n, q, "final", &mut errs);
        }
        for &(p, a, q) in &transitions {
            check_state(n, p, "transition", &mut errs);
            check_state(n, q, "transition", &mut errs);
            if a >= alphabet.len() {
                errs.push(format!("transition uses unknown letter #{a}"));
            }
        }
        if !errs.is_empty() {
            return Err(Error::Validation(errs));
        }
        Ok(Nfa {
            alphabet,
            names,
            initial,
            finals,
            transitions,
        })
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

    pub fn initial(&self) -> &BTreeSet<usize> {
        &self.initial
    }

    pub fn finals(&self) -> &BTreeSet<usize> {
        &self.finals
    }

    pub fn transitions(&self) -> &BTreeSet<(usize, usize, usize)> {
        &self.transitions
    }

    fn step(&self, from: &BTreeSet<usize>, a: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &p in from {
            for &(_, _, q) in self.transitions.range((p, a, 0)..=(p, a, usize::MAX)) {
                out.insert(q);
            }
        }
        out
    }

    pub fn accepts(&self, w: &[usize]) -> Result<bool> {
        self.alphabet.check_word(w)?;
        let mut cur = self.initial.clone();
        for &a in w {
            cur = self.step(&cur, a);
        }
        Ok(cur.iter().any(|q| self.finals.contains(q)))
    }

    /// Reachable subset construction. The result is complete (the empty
    /// subset appears as a sink when reached); states are ordered by their
    /// sorted member lists.
    pub fn determinize(&self) -> Dfa {
        let start: Vec<usize> = self.initial.iter().copied().collect();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut edges: Vec<(Vec<usize>, usize, Vec<usize>)> = Vec::new();
        let mut queue = VecDeque::from([start.clone()]);
        seen.insert(start.clone());
        while let Some(set) = queue.pop_front() {
            let members: BTreeSet<usize> = set.iter().copied().collect();
            for a in 0..self.alphabet.len() {
                let next: Vec<usize> = self.step(&members, a).into_iter().collect();
                if seen.insert(next.clone()) {
                    queue.push_back(next.clone());
                }
                edges.push((set.clone(), a, next));
            }
        }
        let order: Vec<Vec<usize>> = seen.into_iter().collect();
        let index: HashMap<&Vec<usize>, usize> =
            order.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut delta = vec![vec![None; self.alphabet.len()]; order.len()];
        for (p, a, q) in &edges {
            delta[index[p]][*a] = Some(index[q]);
        }
        let names = order
            .iter()
            .map(|s| {
                let parts: Vec<&str> = s.iter().map(|&q| self.names[q].as_str()).collect();
                format!("{{{}}}", parts.join(","))
            })
            .collect();
        let finals = order
            .iter()
            .map(|s| s.iter().any(|q| self.finals.contains(q)))
            .collect();
        Dfa {
            alphabet: self.alphabet.clone(),
            names,
            initial: index[&start],
            finals,
            delta,
        }
    }

    /// Drops the row of `var` from every letter; the language becomes its
    /// image under the erasing map.
    pub fn project(&self, var: &Var) -> Result<Nfa> {
        let (target, map) = self.alphabet.erase(var)?;
        let transitions = self
            .transitions
            .iter()
            .map(|&(p, a, q)| (p, map[a], q))
            .collect();
        Ok(Nfa {
            alphabet: target,
            names: self.names.clone(),
            initial: self.initial.clone(),
            finals: self.finals.clone(),
            transitions,
        })
    }
}

impl Dfa {
    pub fn new(
        alphabet: Alphabet,
        names: Vec<String>,
        initial: usize,
        finals: Vec<bool>,
        delta: Vec<Vec<Option<usize>>>,
    ) -> Result<Self> {
        let n = names.len();
        let mut errs = Vec::new();
        if n == 0 {
            errs.push("a deterministic automaton needs at least one state".into());
        }
        check_state(n, initial, "initial", &mut errs);
        if finals.len() != n || delta.len() != n {
            errs.push("final flags and transition rows must match the state count".into());
        }
        for row in &delta {
            if row.len() != alphabet.len() {
                errs.push("transition row length differs from the alphabet size".into());
            }
            for &q in row.iter().flatten() {
                check_state(n, q, "transition", &mut errs);
            }
        }
        if !errs.is_empty() {
            return Err(Error::Validation(errs));
        }
        Ok(Dfa {
            alphabet,
            names,
            initial,
            finals,
            delta,
        })
    }

    /// Builds an automaton by exploring `step` from `start`; states are
    /// numbered in breadth-first discovery order.
    pub fn explore<S, F, G>(alphabet: &Alphabet, start: S, is_final: G, mut step: F) -> Dfa
    where
        S: Clone + Eq + std::hash::Hash + std::fmt::Debug,
        F: FnMut(&S, usize) -> Option<S>,
        G: Fn(&S) -> bool,
    {
        let mut index: HashMap<S, usize> = HashMap::new();
        let mut states: Vec<S> = Vec::new();
        let mut delta: Vec<Vec<Option<usize>>> = Vec::new();
        index.insert(start.clone(), 0);
        states.push(start);
        let mut i = 0;
        while i < states.len() {
            let mut row = vec![None; alphabet.len()];
            for (a, slot) in row.iter_mut().enumerate() {
                if let Some(next) = step(&states[i], a) {
                    let j = *index.entry(next.clone()).or_insert_with(|| {
                        states.push(next);
                        states.len() - 1
                    });
                    *slot = Some(j);
                }
            }
            delta.push(row);
            i += 1;
        }
        Dfa {
            alphabet: alphabet.clone(),
            names: (0..states.len()).map(|i| format!("d{i}")).collect(),
            initial: 0,
            finals: states.iter().map(is_final).collect(),
            delta,
        }
    }

    /// One-state automaton accepting every word.
    pub fn universal(alphabet: &Alphabet) -> Dfa {
        Dfa::explore(alphabet, (), |_| true, |_, _| Some(()))
    }

    /// One-state automaton accepting nothing.
    pub fn empty(alphabet: &Alphabet) -> Dfa {
        Dfa::explore(alphabet, (), |_| false, |_, _| None)
    }

    /// Accepts exactly the given words.
    pub fn from_words(alphabet: &Alphabet, words: &[Vec<usize>]) -> Dfa {
        let set: BTreeSet<&Vec<usize>> = words.iter().collect();
        Dfa::explore(
            alphabet,
            Vec::<usize>::new(),
            |p| set.contains(p),
            |p, a| {
                let mut q = p.clone();
                q.push(a);
                set.iter().any(|w| w.starts_with(&q)).then_some(q)
            },
        )
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

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn next(&self, q: usize, a: usize) -> Option<usize> {
        self.delta[q][a]
    }

    pub fn is_complete(&self) -> bool {
        self.delta.iter().all(|row| row.iter().all(Option::is_some))
    }

    /// The state reached after reading `w`, if the run does not block.
    pub fn run(&self, w: &[usize]) -> Option<usize> {
        w.iter().try_fold(self.initial, |q, &a| self.delta[q][a])
    }

    pub fn accepts(&self, w: &[usize]) -> Result<bool> {
        self.alphabet.check_word(w)?;
        Ok(self.run(w).is_some_and(|q| self.finals[q]))
    }

    pub fn to_nfa(&self) -> Nfa {
        let mut transitions = BTreeSet::new();
        for (p, row) in self.delta.iter().enumerate() {
            for (a, q) in row.iter().enumerate() {
                if let Some(q) = q {
                    transitions.insert((p, a, *q));
                }
            }
        }
        Nfa {
            alphabet: self.alphabet.clone(),
            names: self.names.clone(),
            initial: BTreeSet::from([self.initial]),
            finals: (0..self.num_states()).filter(|&q| self.finals[q]).collect(),
            transitions,
        }
    }

    /// Adds a non-final sink for missing transitions, if any are missing.
    pub fn complete(&self) -> Dfa {
        if self.is_complete() {
            return self.clone();
        }
        let sink = self.num_states();
        let mut out = self.clone();
        let mut name = String::from("sink");
        while self.names.contains(&name) {
            name.push('\'');
        }
        out.names.push(name);
        out.finals.push(false);
        for row in &mut out.delta {
            for slot in row.iter_mut() {
                slot.get_or_insert(sink);
            }
        }
        out.delta.push(vec![Some(sink); self.alphabet.len()]);
        out
    }

    pub fn complement(&self) -> Dfa {
        let mut out = self.complete();
        for f in &mut out.finals {
            *f = !*f;
        }
        out
    }

    /// Same automaton over an alphabet with the same symbols in another order.
    pub fn reindexed(&self, target: &Alphabet) -> Result<Dfa> {
        if &self.alphabet == target {
            return Ok(self.clone());
        }
        let map = self.alphabet.reindex_into(target)?;
        let mut delta = vec![vec![None; target.len()]; self.num_states()];
        for (p, row) in self.delta.iter().enumerate() {
            for (a, q) in row.iter().enumerate() {
                delta[p][map[a]] = *q;
            }
        }
        Ok(Dfa {
            alphabet: target.clone(),
            delta,
            ..self.clone()
        })
    }

    /// Reachable product with acceptance `op`; pair states ordered
    /// lexicographically by their components.
    pub fn combine(&self, other: &Dfa, op: impl Fn(bool, bool) -> bool) -> Result<Dfa> {
        let other = other.reindexed(&self.alphabet)?;
        let (a, b) = (self.complete(), other.complete());
        let start = (a.initial, b.initial);
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some((p, q)) = queue.pop_front() {
            for x in 0..a.alphabet.len() {
                let next = (a.delta[p][x].unwrap(), b.delta[q][x].unwrap());
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        let order: Vec<(usize, usize)> = seen.into_iter().collect();
        let index: HashMap<(usize, usize), usize> =
            order.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let delta = order
            .iter()
            .map(|&(p, q)| {
                (0..a.alphabet.len())
                    .map(|x| Some(index[&(a.delta[p][x].unwrap(), b.delta[q][x].unwrap())]))
                    .collect()
            })
            .collect();
        Ok(Dfa {
            alphabet: a.alphabet.clone(),
            names: order
                .iter()
                .map(|&(p, q)| format!("({},{})", a.names[p], b.names[q]))
                .collect(),
            initial: index[&start],
            finals: order.iter().map(|&(p, q)| op(a.finals[p], b.finals[q])).collect(),
            delta,
        })
    }

    pub fn product(&self, other: &Dfa) -> Result<Dfa> {
        self.combine(other, |x, y| x && y)
    }

    pub fn union(&self, other: &Dfa) -> Result<Dfa> {
        self.combine(other, |x, y| x || y)
    }

    pub fn project(&self, var: &Var) -> Result<Nfa> {
        self.to_nfa().project(var)
    }

    /// Moore partition refinement over the reachable, completed automaton.
    /// Classes are numbered in breadth-first order from the initial state.
    pub fn minimize(&self) -> Dfa {
        let d = self.complete();
        let n = d.num_states();
        let k = d.alphabet.len();
        let mut class: Vec<usize> = d.finals.iter().map(|&f| usize::from(f)).collect();
        loop {
            let mut sigs: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
            let keys: Vec<(usize, Vec<usize>)> = (0..n)
                .map(|q| (class[q], (0..k).map(|a| class[d.delta[q][a].unwrap()]).collect()))
                .collect();
            for key in &keys {
                let next = sigs.len();
                sigs.entry(key.clone()).or_insert(next);
            }
            let refined: Vec<usize> = keys.iter().map(|key| sigs[key]).collect();
            let before = class.iter().collect::<BTreeSet<_>>().len();
            class = refined;
            if sigs.len() == before {
                break;
            }
        }
        let mut rep: HashMap<usize, usize> = HashMap::new();
        for (q, &c) in class.iter().enumerate() {
            rep.entry(c).or_insert(q);
        }
        Dfa::explore(
            &d.alphabet,
            class[d.initial],
            |c| d.finals[rep[c]],
            |c, a| Some(class[d.delta[rep[c]][a].unwrap()]),
        )
    }

    pub fn is_empty_language(&self) -> bool {
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(q) = stack.pop() {
            if self.finals[q] {
                return false;
            }
            for &r in self.delta[q].iter().flatten() {
                if !seen[r] {
                    seen[r] = true;
                    stack.push(r);
                }
            }
        }
        true
    }

    pub fn equivalent(&self, other: &Dfa) -> Result<bool> {
        Ok(self.combine(other, |x, y| x != y)?.is_empty_language())
    }
}

/// Recognizes the words over an extended alphabet in which every
/// first-order row carries exactly one 1; second-order rows are free.
pub fn valid_assignments_dfa(alphabet: &Alphabet) -> Dfa {
    let fo: Vec<Var> = alphabet
        .vars()
        .iter()
        .filter(|v| v.is_first_order())
        .cloned()
        .collect();
    Dfa::explore(
        alphabet,
        vec![0u8; fo.len()],
        |seen| seen.iter().all(|&c| c == 1),
        |seen, a| {
            let sym = alphabet.symbol(a);
            let mut next = seen.clone();
            for (c, v) in next.iter_mut().zip(&fo) {
                if sym.bit(v) == Some(true) {
                    *c += 1;
                    if *c > 1 {
                        return None;
                    }
                }
            }
            Some(next)
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::from_letters(&["a", "b"]).unwrap()
    }

    /// a*b
    fn a_star_b() -> Dfa {
        Dfa::new(
            ab(),
            vec!["0".into(), "1".into()],
            0,
            vec![false, true],
            vec![vec![Some(0), Some(1)], vec![None, None]],
        )
        .unwrap()
    }

    fn brute(w: &[usize]) -> bool {
        w.last() == Some(&1) && w[..w.len() - 1].iter().all(|&a| a == 0)
    }

    #[test]
    fn acceptance_basics() {
        let d = a_star_b();
        assert!(d.accepts(&[0, 0, 1]).unwrap());
        assert!(!d.accepts(&[1, 0]).unwrap());
        assert!(Dfa::universal(&ab()).accepts(&[1, 1, 0]).unwrap());
        assert!(!Dfa::empty(&ab()).accepts(&[]).unwrap());
        assert!(d.accepts(&[2]).is_err());
    }

    #[test]
    fn boolean_closure_matches_enumeration() {
        let d = a_star_b();
        let c = d.complement();
        let u = d.union(&c).unwrap();
        let p = d.product(&Dfa::universal(&ab())).unwrap();
        let cc = c.complement();
        for w in ab().words_up_to(6) {
            assert_eq!(c.accepts(&w).unwrap(), !brute(&w));
            assert!(u.accepts(&w).unwrap());
            assert_eq!(p.accepts(&w).unwrap(), brute(&w));
            assert_eq!(cc.accepts(&w).unwrap(), brute(&w));
        }
        assert!(d.minimize().equivalent(&d).unwrap());
    }

    #[test]
    fn subset_construction() {
        // Words whose second-to-last letter is a.
        let n = Nfa::new(
            ab(),
            vec!["p".into(), "q".into(), "r".into(), "dead".into()],
            [0].into(),
            [2].into(),
            [(0, 0, 0), (0, 1, 0), (0, 0, 1), (1, 0, 2), (1, 1, 2)].into(),
        )
        .unwrap();
        let d = n.determinize();
        assert!(d.is_complete());
        assert_eq!(d.num_states(), 4);
        for w in ab().words_up_to(6) {
            let expect = w.len() >= 2 && w[w.len() - 2] == 0;
            assert_eq!(d.accepts(&w).unwrap(), expect);
            assert_eq!(n.accepts(&w).unwrap(), expect);
        }
        assert!(!d.names().iter().any(|s| s.contains("dead")));
    }

    #[test]
    fn assignments_and_projection() {
        let x = Var::new("x");
        let ext = ab().extend(&x).unwrap();
        let n = valid_assignments_dfa(&ext);
        let w1 = ext.parse_word("a[x=0] b[x=1]").unwrap();
        let w0 = ext.parse_word("a[x=0] b[x=0]").unwrap();
        let w2 = ext.parse_word("a[x=1] b[x=1]").unwrap();
        assert!(n.accepts(&w1).unwrap());
        assert!(!n.accepts(&w0).unwrap());
        assert!(!n.accepts(&w2).unwrap());
        let proj = n.project(&x).unwrap().determinize();
        assert_eq!(proj.alphabet(), &ab());
        for w in ab().words_up_to(4) {
            assert_eq!(proj.accepts(&w).unwrap(), !w.is_empty());
        }
        let so = ab().extend(&Var::new("X")).unwrap();
        assert!(valid_assignments_dfa(&so).is_complete());
        assert_eq!(valid_assignments_dfa(&so).num_states(), 1);
    }
}
