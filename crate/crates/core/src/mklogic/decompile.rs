//! From MK-fuzzy automata to restricted sentences.

use std::collections::BTreeSet;

use super::syntax::{
    and, and_all, clause, exists, first, forall, implies, last, le, member, not, or_all,
    partition, succ, MkFormula, Mso,
};
use crate::alphabet::Var;
use crate::constructs::in_ter_one;
use crate::error::{Error, Result};
use crate::mkauto::MkAutomaton;

/// A sentence with the same behavior as an automaton, together with the
/// pieces it was assembled from.
#[derive(Clone, Debug)]
pub struct Decompiled {
    pub sentence: MkFormula,
    /// The run condition over `X_1..X_m`, one set per transition.
    pub psi: Mso,
    pub sets: Vec<Var>,
    /// The equivalent automaton with `in`/`ter` in `{𝟎, 𝟏}` and no path
    /// over ε that the sets range over.
    pub normalized: MkAutomaton,
    /// Transitions of `normalized`, in the order of `sets`.
    pub transitions: Vec<(usize, usize, usize)>,
}

impl Decompiled {
    /// The transition sequence an assignment of the sets encodes, or `None`
    /// when some position is in no set.
    pub fn run_of(&self, model: &[BTreeSet<usize>], len: usize) -> Option<Vec<usize>> {
        (0..len)
            .map(|j| model.iter().position(|s| s.contains(&j)))
            .collect()
    }

    /// Transition sequences of the paths of `normalized` over `w`, in path
    /// order.
    pub fn path_runs(&self, w: &[usize]) -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        self.normalized.for_each_path(w, |states, _| {
            let run = w
                .iter()
                .enumerate()
                .map(|(j, &a)| {
                    let t = (states[j], a, states[j + 1]);
                    self.transitions.binary_search(&t).expect("path uses a transition")
                })
                .collect();
            out.push(run);
        })?;
        Ok(out)
    }
}

/// Builds
/// `⊕_{X_1}…⊕_{X_m} (ψ ⊗ ⊗_x ⊕_t (x ∈ X_t → wt(t)))`, where `X_t` collects
/// the positions at which a run takes transition `t`, plus a summand
/// `(∀x·¬(x ≤ x)) ⊗ k` carrying the value `k ≠ 𝟎` on the empty word.
pub fn automaton_to_rmso(a: &MkAutomaton) -> Result<Decompiled> {
    if !a.alphabet().vars().is_empty() {
        return Err(Error::Precondition(
            "the automaton must be over a plain alphabet".into(),
        ));
    }
    let errors = a.validate();
    if !errors.is_empty() {
        return Err(Error::Validation(errors));
    }
    let s = in_ter_one(a);
    let transitions: Vec<(usize, usize, usize)> = s.transitions().keys().cloned().collect();
    let sets: Vec<Var> = (1..=transitions.len()).map(|i| Var::new(format!("X{i}"))).collect();
    let (x, y, z, z1) = (Var::new("x"), Var::new("y"), Var::new("z"), Var::new("z1"));
    let letter = |t: &(usize, usize, usize)| s.alphabet().symbol(t.1).base().to_string();

    let labels = and_all(transitions.iter().zip(&sets).map(|(t, set)| {
        forall(&x, implies(member(&x, set), Mso::Label(letter(t), x.clone())))
    }));
    let mut links = Vec::new();
    for (i, t) in transitions.iter().enumerate() {
        for (j, u) in transitions.iter().enumerate() {
            if t.2 == u.0 {
                links.push(and(member(&x, &sets[i]), member(&y, &sets[j])));
            }
        }
    }
    let chained = forall(&x, forall(&y, implies(succ(&y, &x, &z), or_all(links))));
    let starts = exists(
        &z,
        and(
            first(&z, &x),
            or_all(transitions.iter().zip(&sets).filter(|(t, _)| s.initial().contains_key(&t.0))
                .map(|(_, set)| member(&z, set))),
        ),
    );
    let ends = exists(
        &z1,
        and(
            last(&z1, &x),
            or_all(transitions.iter().zip(&sets).filter(|(t, _)| s.finals().contains_key(&t.2))
                .map(|(_, set)| member(&z1, set))),
        ),
    );
    let psi = and_all([partition(&sets, &x), labels, chained, starts, ends]);

    let nonempty = if transitions.is_empty() {
        MkFormula::Const(crate::kvalues::TruthValue::zero())
    } else {
        let weights = transitions
            .iter()
            .zip(&sets)
            .map(|(t, set)| clause(&x, set, s.transitions()[t].clone()))
            .reduce(|l, r| MkFormula::Plus(Box::new(l), Box::new(r)))
            .expect("nonempty");
        let body = MkFormula::Times(
            Box::new(MkFormula::Bool(psi.clone())),
            Box::new(MkFormula::ProdFo(x.clone(), Box::new(weights))),
        );
        sets.iter()
            .rev()
            .fold(body, |acc, set| MkFormula::SumSo(set.clone(), Box::new(acc)))
    };
    let on_empty = a.behavior(&[])?;
    let sentence = if on_empty.is_zero() {
        nonempty
    } else {
        let empty_word = forall(&x, not(le(&x, &x)));
        MkFormula::Plus(
            Box::new(nonempty),
            Box::new(MkFormula::Times(
                Box::new(MkFormula::Bool(empty_word)),
                Box::new(MkFormula::Const(on_empty)),
            )),
        )
    };
    Ok(Decompiled {
        sentence,
        psi,
        sets,
        normalized: s,
        transitions,
    })
}

#[cfg(test)]
mod tests {
    use super::super::compile::is_rmso;
    use super::super::semantics::{mk_eval, models};
    use super::super::syntax::parse_mk;
    use super::*;
    use crate::mkauto::fixtures;

    #[test]
    fn sentence_is_restricted_and_closed() {
        let d = automaton_to_rmso(&fixtures::two()).unwrap();
        assert!(is_rmso(&d.sentence));
        assert!(d.sentence.is_sentence());
        assert_eq!(d.sets.len(), d.transitions.len());
        assert_eq!(parse_mk(&d.sentence.to_string()).unwrap(), d.sentence);
    }

    #[test]
    fn models_are_runs() {
        let a = fixtures::two();
        let d = automaton_to_rmso(&a).unwrap();
        for w in a.alphabet().nonempty_words_up_to(3) {
            let letters: Vec<String> =
                w.iter().map(|&i| a.alphabet().symbol(i).base().to_string()).collect();
            let ms = models(&d.psi, &d.sets, &letters).unwrap();
            assert_eq!(ms.len(), a.path_count(&w).unwrap());
            let mut runs: Vec<_> = ms.iter().map(|m| d.run_of(m, w.len()).unwrap()).collect();
            let mut paths = d.path_runs(&w).unwrap();
            runs.sort();
            paths.sort();
            assert_eq!(runs, paths);
        }
    }

    #[test]
    fn empty_word_value() {
        let a = fixtures::two();
        let d = automaton_to_rmso(&a).unwrap();
        assert_eq!(
            mk_eval(&d.sentence, a.alphabet(), &[]).unwrap(),
            a.behavior(&[]).unwrap()
        );
    }
}
