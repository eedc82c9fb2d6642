//! Seeded generators for truth values, automata, and homomorphisms.
//!
//! All randomness flows from a `u64` seed through ChaCha, so every sweep and
//! probe is replayable.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alphabet::{Alphabet, Word};
use crate::constructs::StrictAlphabeticHom;
use crate::fclassic::Dfa;
use crate::kvalues::{Rational, TruthValue};
use crate::mkauto::MkAutomaton;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for trial `i` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, i: usize) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(i as u64 + 1);
    r
}

/// A quadruple with components on the grid `1/denom`.
pub fn truth_on_grid(rng: &mut impl Rng, denom: i64) -> TruthValue {
    let mut cuts = [
        rng.gen_range(0..=denom),
        rng.gen_range(0..=denom),
        rng.gen_range(0..=denom),
    ];
    cuts.sort_unstable();
    let parts = [cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], denom - cuts[2]];
    let r = |n: i64| Rational::new(BigInt::from(n), BigInt::from(denom));
    TruthValue::new(r(parts[0]), r(parts[1]), r(parts[2]), r(parts[3]))
        .expect("grid compositions sum to one")
}

/// Mostly grid-`1/10` quadruples, with `𝟎` and `𝟏` mixed in so the unit
/// and zero laws are exercised.
pub fn truth(rng: &mut impl Rng) -> TruthValue {
    match rng.gen_range(0..10) {
        0 => TruthValue::zero(),
        1 => TruthValue::one(),
        _ => truth_on_grid(rng, 10),
    }
}

pub fn nonzero_truth(rng: &mut impl Rng) -> TruthValue {
    loop {
        let k = truth(rng);
        if !k.is_zero() {
            return k;
        }
    }
}

/// Letters `a`, `b`, `c`, …
pub fn letters(n: usize) -> Alphabet {
    let names: Vec<String> = (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    Alphabet::from_letters(&names).expect("distinct letters")
}

pub fn word(rng: &mut impl Rng, alphabet: &Alphabet, max_len: usize) -> Word {
    let n = rng.gen_range(0..=max_len);
    (0..n).map(|_| rng.gen_range(0..alphabet.len())).collect()
}

/// Shape of a random automaton.
#[derive(Clone, Debug)]
pub struct AutomatonShape {
    pub max_states: usize,
    pub deterministic: bool,
    /// Probability of each candidate transition.
    pub density: f64,
    pub max_transitions: Option<usize>,
}

impl AutomatonShape {
    pub fn nondeterministic(max_states: usize) -> Self {
        AutomatonShape {
            max_states,
            deterministic: false,
            density: 0.35,
            max_transitions: None,
        }
    }

    pub fn deterministic(max_states: usize) -> Self {
        AutomatonShape {
            max_states,
            deterministic: true,
            density: 0.75,
            max_transitions: None,
        }
    }
}

pub fn automaton(rng: &mut impl Rng, alphabet: &Alphabet, shape: &AutomatonShape) -> MkAutomaton {
    let n = rng.gen_range(1..=shape.max_states);
    let names: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let mut initial = BTreeMap::new();
    if shape.deterministic {
        initial.insert(rng.gen_range(0..n), nonzero_truth(rng));
    } else {
        for q in 0..n {
            if rng.gen_bool(0.4) {
                initial.insert(q, nonzero_truth(rng));
            }
        }
        if initial.is_empty() {
            initial.insert(rng.gen_range(0..n), nonzero_truth(rng));
        }
    }
    let mut finals = BTreeMap::new();
    for q in 0..n {
        if rng.gen_bool(0.5) {
            finals.insert(q, truth(rng));
        }
    }
    let mut candidates: Vec<(usize, usize, usize)> = Vec::new();
    for p in 0..n {
        for a in 0..alphabet.len() {
            if shape.deterministic {
                if rng.gen_bool(shape.density) {
                    candidates.push((p, a, rng.gen_range(0..n)));
                }
            } else {
                for q in 0..n {
                    if rng.gen_bool(shape.density) {
                        candidates.push((p, a, q));
                    }
                }
            }
        }
    }
    if let Some(m) = shape.max_transitions {
        candidates.shuffle(rng);
        candidates.truncate(m);
    }
    let transitions = candidates.into_iter().map(|t| (t, truth(rng))).collect();
    MkAutomaton::from_parts(alphabet.clone(), names, initial, finals, transitions)
}

/// A partial deterministic automaton.
pub fn dfa(rng: &mut impl Rng, alphabet: &Alphabet, max_states: usize) -> Dfa {
    let n = rng.gen_range(1..=max_states);
    let delta = (0..n)
        .map(|_| {
            (0..alphabet.len())
                .map(|_| rng.gen_bool(0.85).then(|| rng.gen_range(0..n)))
                .collect()
        })
        .collect();
    let finals = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    Dfa::new(
        alphabet.clone(),
        (0..n).map(|i| format!("d{i}")).collect(),
        0,
        finals,
        delta,
    )
    .expect("generated automata are well formed")
}

pub fn hom(rng: &mut impl Rng, source: &Alphabet, target: &Alphabet) -> StrictAlphabeticHom {
    let map = (0..source.len()).map(|_| rng.gen_range(0..target.len())).collect();
    StrictAlphabeticHom::new(source.clone(), target.clone(), map).expect("in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_generation_is_reproducible() {
        let al = letters(2);
        let shape = AutomatonShape::nondeterministic(3);
        let a = automaton(&mut rng(7), &al, &shape);
        let b = automaton(&mut rng(7), &al, &shape);
        assert_eq!(a, b);
        assert!(a.validate().is_empty());
        let d = automaton(&mut trial_rng(7, 3), &al, &AutomatonShape::deterministic(4));
        assert!(d.is_deterministic());
    }

    #[test]
    fn grid_values_are_valid() {
        let mut r = rng(1);
        for _ in 0..200 {
            let k = truth_on_grid(&mut r, 7);
            let s = k.t() + k.f() + k.u() + k.e();
            assert_eq!(s, Rational::from_integer(1.into()));
        }
    }
}
