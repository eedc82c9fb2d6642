//! Closure constructions on MK-fuzzy automata.
//!
//! Each construction returns an automaton whose behavior is stated in its
//! doc comment. Where a construction reproduces a published design verbatim
//! and that design is known to disagree with the pointwise semantics on some
//! inputs, the disagreement is documented on the function and exposed by the
//! probes in [`crate::harness`].

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::alphabet::{Alphabet, Symbol, Word};
use crate::error::{Error, Result};
use crate::fclassic::{Dfa, Nfa};
use crate::kvalues::{conj, TruthValue};
use crate::mkauto::{Builder, MkAutomaton};

/// A letter-to-letter homomorphism between ordered alphabets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrictAlphabeticHom {
    source: Alphabet,
    target: Alphabet,
    map: Vec<usize>,
}

impl StrictAlphabeticHom {
    pub fn new(source: Alphabet, target: Alphabet, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.len() {
            return Err(Error::Precondition(
                "a letter homomorphism must be total on its source alphabet".into(),
            ));
        }
        if let Some(&b) = map.iter().find(|&&b| b >= target.len()) {
            return Err(Error::Precondition(format!("image letter #{b} is not in the target")));
        }
        Ok(StrictAlphabeticHom {
            source,
            target,
            map,
        })
    }

    /// Builds a homomorphism from symbol pairs.
    pub fn from_pairs(source: Alphabet, target: Alphabet, pairs: &[(Symbol, Symbol)]) -> Result<Self> {
        let mut map = vec![usize::MAX; source.len()];
        for (a, b) in pairs {
            let i = source
                .index_of(a)
                .ok_or_else(|| Error::ForeignLetter(a.to_string()))?;
            let j = target
                .index_of(b)
                .ok_or_else(|| Error::ForeignLetter(b.to_string()))?;
            map[i] = j;
        }
        if let Some(i) = map.iter().position(|&j| j == usize::MAX) {
            return Err(Error::Precondition(format!(
                "letter `{}` has no image",
                source.symbol(i)
            )));
        }
        Self::new(source, target, map)
    }

    pub fn identity(alphabet: &Alphabet) -> Self {
        StrictAlphabeticHom {
            source: alphabet.clone(),
            target: alphabet.clone(),
            map: (0..alphabet.len()).collect(),
        }
    }

    pub fn source(&self) -> &Alphabet {
        &self.source
    }

    pub fn target(&self) -> &Alphabet {
        &self.target
    }

    pub fn image(&self, a: usize) -> usize {
        self.map[a]
    }

    pub fn apply(&self, w: &[usize]) -> Word {
        w.iter().map(|&a| self.map[a]).collect()
    }

    /// All source words mapping to `u`, in lexicographic order of the
    /// source alphabet.
    pub fn preimages(&self, u: &[usize]) -> Vec<Word> {
        let mut out: Vec<Word> = vec![Vec::new()];
        for &b in u {
            let letters: Vec<usize> = (0..self.source.len()).filter(|&a| self.map[a] == b).collect();
            out = out
                .into_iter()
                .flat_map(|w| {
                    letters.iter().map(move |&a| {
                        let mut v = w.clone();
                        v.push(a);
                        v
                    })
                })
                .collect();
        }
        out
    }
}

/// The pieces `(B, L, g, h)` with `‖A‖ = h(𝟏_L ⊓ g)` on non-empty words.
#[derive(Clone, Debug)]
pub struct NivatData {
    pub inner: Alphabet,
    pub language: Nfa,
    pub weights: Vec<TruthValue>,
    pub hom: StrictAlphabeticHom,
}

/// Result of [`scalar_left`].
#[derive(Clone, Debug)]
pub struct ScalarLeft {
    pub automaton: MkAutomaton,
    /// Words without an accepting path, on which the automaton yields `𝟎`
    /// while `k ⊓ s` yields `k ⊓ 𝟎`.
    pub discrepancy_domain: Dfa,
    /// `k ⊓ 𝟎`, the pointwise value on the discrepancy domain.
    pub dead_value: TruthValue,
    /// Set when `k ⊓ in(q0) = 𝟎` and the initial state had to be dropped.
    pub initial_removed: bool,
}

impl ScalarLeft {
    /// Whether automaton and pointwise semantics disagree on some word.
    pub fn is_discrepant(&self) -> bool {
        !self.dead_value.is_zero() && !self.discrepancy_domain.is_empty_language()
    }
}

fn require_deterministic(a: &MkAutomaton, what: &str) -> Result<()> {
    if a.is_deterministic() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "{what} requires a deterministic input automaton"
        )))
    }
}

fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

/// Aligns `b` to the alphabet of `a` when both hold the same symbols.
fn aligned(a: &Alphabet, b: &MkAutomaton) -> Result<MkAutomaton> {
    if a == b.alphabet() {
        Ok(b.clone())
    } else {
        b.with_alphabet(a)
    }
}

/// One state, initial weight `k`, final weight `𝟏`, a `𝟏`-loop per letter:
/// the constant language `k̃`. For `k = 𝟎` the state is not initial.
pub fn constant_automaton(alphabet: &Alphabet, k: &TruthValue) -> MkAutomaton {
    let mut b = Builder::new(alphabet);
    let q = b.state("q");
    if !k.is_zero() {
        b.initial(q, k.clone());
    }
    b.final_state(q, TruthValue::one());
    for a in 0..alphabet.len() {
        b.transition(q, a, q, TruthValue::one());
    }
    b.build()
}

/// One state, in = ter = `𝟏`, loop weight `weights[a]` for letter `a`.
pub fn letter_weight_automaton(alphabet: &Alphabet, weights: &[TruthValue]) -> MkAutomaton {
    let mut b = Builder::new(alphabet);
    let q = b.state("q");
    b.initial(q, TruthValue::one()).final_state(q, TruthValue::one());
    for (a, k) in weights.iter().enumerate() {
        b.transition(q, a, q, k.clone());
    }
    b.build()
}

/// The characteristic language `𝟏_L` of `L(d)`: `d` with all weights `𝟏`.
pub fn char_automaton(d: &Dfa) -> MkAutomaton {
    let mut b = Builder::new(d.alphabet());
    for name in d.names() {
        b.state(name.clone());
    }
    b.initial(d.initial(), TruthValue::one());
    for q in 0..d.num_states() {
        if d.is_final(q) {
            b.final_state(q, TruthValue::one());
        }
        for a in 0..d.alphabet().len() {
            if let Some(r) = d.next(q, a) {
                b.transition(q, a, r, TruthValue::one());
            }
        }
    }
    b.build()
}

/// `‖a1‖ ⊔ ‖a2‖`: disjoint union with every state of `a1` before every
/// state of `a2`.
pub fn disjunction(a1: &MkAutomaton, a2: &MkAutomaton) -> Result<MkAutomaton> {
    let a2 = aligned(a1.alphabet(), a2)?;
    let off = a1.num_states();
    let mut b = Builder::new(a1.alphabet());
    for n in a1.names() {
        b.state(format!("1:{n}"));
    }
    for n in a2.names() {
        b.state(format!("2:{n}"));
    }
    for (shift, a) in [(0, a1), (off, &a2)] {
        for (&q, k) in a.initial() {
            b.initial(q + shift, k.clone());
        }
        for (&q, k) in a.finals() {
            b.final_state(q + shift, k.clone());
        }
        for (&(p, x, q), k) in a.transitions() {
            b.transition(p + shift, x, q + shift, k.clone());
        }
    }
    Ok(b.build())
}

/// Disjunction of a list, left to right; the empty list gives the `𝟎` language.
pub fn disjunction_all(alphabet: &Alphabet, parts: &[MkAutomaton]) -> Result<MkAutomaton> {
    let Some((first, rest)) = parts.split_first() else {
        return Ok(constant_automaton(alphabet, &TruthValue::zero()));
    };
    rest.iter().try_fold(first.clone(), |acc, p| disjunction(&acc, p))
}

/// `𝟏_{L(d)} ⊓ ‖a‖`: product with `d`, weights taken from `a`, pair
/// states ordered by the `a` component first and then the `d` component.
/// States that are unreachable or cannot reach a final state are dropped.
pub fn conj_char(d: &Dfa, a: &MkAutomaton) -> Result<MkAutomaton> {
    let d = d.reindexed(a.alphabet())?;
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut queue = VecDeque::new();
    for &q in a.initial().keys() {
        let s = (q, d.initial());
        seen.insert(s);
        queue.push_back(s);
    }
    while let Some((q, p)) = queue.pop_front() {
        for x in 0..a.alphabet().len() {
            let Some(p2) = d.next(p, x) else { continue };
            for (q2, _) in a.successors(q, x) {
                if seen.insert((q2, p2)) {
                    queue.push_back((q2, p2));
                }
            }
        }
    }
    let order: Vec<(usize, usize)> = seen.into_iter().collect();
    let index: HashMap<(usize, usize), usize> =
        order.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut b = Builder::new(a.alphabet());
    for &(q, p) in &order {
        b.state(format!("({},{})", d.names()[p], a.names()[q]));
    }
    for (i, &(q, p)) in order.iter().enumerate() {
        if p == d.initial() {
            if let Some(k) = a.initial().get(&q) {
                b.initial(i, k.clone());
            }
        }
        if d.is_final(p) {
            if let Some(k) = a.finals().get(&q) {
                b.final_state(i, k.clone());
            }
        }
        for x in 0..a.alphabet().len() {
            let Some(p2) = d.next(p, x) else { continue };
            for (q2, k) in a.successors(q, x) {
                b.transition(i, x, index[&(q2, p2)], k.clone());
            }
        }
    }
    Ok(b.build().trim())
}

/// `h(‖a‖)`: states `A × Q` remembering the last source letter, initial
/// states `{min A} × I`, pair states ordered by letter first, then state.
/// The multiset of path weights over `u` equals the multiset of source path
/// weights over `h⁻¹(u)`; the fold order can differ from the lexicographic
/// order of preimages.
pub fn hom_image(a: &MkAutomaton, h: &StrictAlphabeticHom) -> Result<MkAutomaton> {
    let a = aligned(h.source(), a)?;
    let src = h.source();
    let n = a.num_states();
    let id = |x: usize, q: usize| x * n + q;
    let mut b = Builder::new(h.target());
    for x in 0..src.len() {
        for q in 0..n {
            b.state(format!("({},{})", src.symbol(x), a.names()[q]));
        }
    }
    if src.is_empty() {
        return Ok(b.build());
    }
    for (&q, k) in a.initial() {
        b.initial(id(0, q), k.clone());
    }
    for x in 0..src.len() {
        for (&q, k) in a.finals() {
            b.final_state(id(x, q), k.clone());
        }
        for (&(p, y, q), k) in a.transitions() {
            b.transition(id(x, p), h.image(y), id(y, q), k.clone());
        }
    }
    Ok(b.build().trim())
}

/// `h⁻¹(‖a‖)`: same states; `(q, x, q')` for every source letter `x` with
/// `(q, h(x), q')` in `a`.
pub fn inv_hom(a: &MkAutomaton, h: &StrictAlphabeticHom) -> Result<MkAutomaton> {
    let a = aligned(h.target(), a)?;
    let mut b = Builder::new(h.source());
    for n in a.names() {
        b.state(n.clone());
    }
    for (&q, k) in a.initial() {
        b.initial(q, k.clone());
    }
    for (&q, k) in a.finals() {
        b.final_state(q, k.clone());
    }
    for x in 0..h.source().len() {
        for (&(p, y, q), k) in a.transitions() {
            if y == h.image(x) {
                b.transition(p, x, q, k.clone());
            }
        }
    }
    Ok(b.build())
}

/// `‖a‖ ⊓ k` for deterministic `a`: every final weight becomes `ter ⊓ k`.
pub fn scalar_right(a: &MkAutomaton, k: &TruthValue) -> Result<MkAutomaton> {
    require_deterministic(a, "scalar_right")?;
    let finals = a.finals().iter().map(|(&q, t)| (q, conj(t, k))).collect();
    Ok(MkAutomaton::from_parts(
        a.alphabet().clone(),
        a.names().to_vec(),
        a.initial().clone(),
        finals,
        a.transitions().clone(),
    ))
}

/// `k ⊓ ‖a‖` on words with an accepting path, for deterministic `a`: the
/// initial weight becomes `k ⊓ in(q0)`. Words without a path still get `𝟎`
/// rather than `k ⊓ 𝟎`; the returned [`ScalarLeft`] describes that domain.
pub fn scalar_left(k: &TruthValue, a: &MkAutomaton) -> Result<ScalarLeft> {
    require_deterministic(a, "scalar_left")?;
    let (&q0, in0) = a.initial().iter().next().expect("deterministic");
    let new_in = conj(k, in0);
    let initial_removed = new_in.is_zero();
    let mut initial = BTreeMap::new();
    if !initial_removed {
        initial.insert(q0, new_in);
    }
    Ok(ScalarLeft {
        automaton: MkAutomaton::from_parts(
            a.alphabet().clone(),
            a.names().to_vec(),
            initial,
            a.finals().clone(),
            a.transitions().clone(),
        ),
        discrepancy_domain: a.dead_words_dfa(),
        dead_value: conj(k, &TruthValue::zero()),
        initial_removed,
    })
}

/// Normalized unambiguous automaton agreeing with deterministic `a` on
/// non-empty words and giving `𝟎` on `ε`.
///
/// A fresh initial state (last in the order) absorbs `in(q0)` into the
/// first transition; a final copy `fin:q` of each final `q` absorbs
/// `ter(q)` into the last transition. Copies follow their original.
pub fn normalize(a: &MkAutomaton) -> Result<MkAutomaton> {
    require_deterministic(a, "normalize")?;
    let (&q0, in0) = a.initial().iter().next().expect("deterministic");
    let taken: BTreeSet<String> = a.names().iter().cloned().collect();
    // (original, tag): tag 0 original, 1 final copy; the fresh initial is last.
    let mut order: Vec<(usize, u8)> = Vec::new();
    for q in 0..a.num_states() {
        order.push((q, 0));
        if a.finals().contains_key(&q) {
            order.push((q, 1));
        }
    }
    let index: HashMap<(usize, u8), usize> =
        order.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut b = Builder::new(a.alphabet());
    for &(q, tag) in &order {
        let n = &a.names()[q];
        b.state(if tag == 0 {
            n.clone()
        } else {
            fresh_name(&format!("fin:{n}"), &taken)
        });
    }
    let q_in = b.state(fresh_name("init", &taken));
    b.initial(q_in, TruthValue::one());
    for (&(p, x, q), k) in a.transitions() {
        b.transition(index[&(p, 0)], x, index[&(q, 0)], k.clone());
        if p == q0 {
            b.transition(q_in, x, index[&(q, 0)], conj(in0, k));
        }
        if let Some(t) = a.finals().get(&q) {
            let hat = index[&(q, 1)];
            b.transition(index[&(p, 0)], x, hat, conj(k, t));
            if p == q0 {
                b.transition(q_in, x, hat, conj(&conj(in0, k), t));
            }
            b.final_state(hat, TruthValue::one());
        }
    }
    for &q in a.finals().keys() {
        b.final_state(index[&(q, 1)], TruthValue::one());
    }
    Ok(b.build().prune_unreachable())
}

/// `‖a‖ ⊓ k` for normalized unambiguous `a`: every transition entering a
/// final state is multiplied by `k` on the right.
pub fn scalar_right_normalized(a: &MkAutomaton, k: &TruthValue) -> Result<MkAutomaton> {
    if !a.is_normalized() || !a.is_unambiguous() {
        return Err(Error::Precondition(
            "scalar_right_normalized requires a normalized unambiguous input automaton".into(),
        ));
    }
    let transitions = a
        .transitions()
        .iter()
        .map(|(&(p, x, q), w)| {
            let w = if a.finals().contains_key(&q) { conj(w, k) } else { w.clone() };
            ((p, x, q), w)
        })
        .collect();
    Ok(MkAutomaton::from_parts(
        a.alphabet().clone(),
        a.names().to_vec(),
        a.initial().clone(),
        a.finals().clone(),
        transitions,
    ))
}

/// Words `w` with `t(‖a‖(w)) ≠ 0`, for deterministic `a`. The truth
/// component of `⊓` is multiplicative, so the single path survives exactly
/// when every factor has a non-zero truth component.
pub fn strong_support(a: &MkAutomaton) -> Result<Dfa> {
    require_deterministic(a, "strong_support")?;
    let alphabet = a.alphabet();
    let (&q0, in0) = a.initial().iter().next().expect("deterministic");
    if in0.t() == &num_traits::Zero::zero() {
        return Ok(Dfa::empty(alphabet));
    }
    let n = a.num_states();
    let mut delta = vec![vec![None; alphabet.len()]; n];
    for (&(p, x, q), k) in a.transitions() {
        if !num_traits::Zero::is_zero(k.t()) {
            delta[p][x] = Some(q);
        }
    }
    let finals = (0..n)
        .map(|q| a.finals().get(&q).is_some_and(|k| !num_traits::Zero::is_zero(k.t())))
        .collect();
    Dfa::new(alphabet.clone(), a.names().to_vec(), q0, finals, delta)
}

/// Copy of the dead-word automaton of `a` as a weighted branch: a fresh
/// non-final entry state followed by the complete dead-word DFA, all
/// transitions `𝟏`, final weights `𝟎`. Returns the builder indices of the
/// entry state and of the DFA states.
fn add_dead_branch(b: &mut Builder, a: &MkAutomaton, prefix: &str) -> (usize, Vec<usize>) {
    let dead = a.dead_words_dfa();
    let entry = b.state(format!("{prefix}:entry"));
    let ids: Vec<usize> = dead
        .names()
        .iter()
        .map(|n| b.state(format!("{prefix}:{n}")))
        .collect();
    for q in 0..dead.num_states() {
        for x in 0..dead.alphabet().len() {
            let r = dead.next(q, x).expect("complemented automata are complete");
            b.transition(ids[q], x, ids[r], TruthValue::one());
            if q == dead.initial() {
                b.transition(entry, x, ids[r], TruthValue::one());
            }
        }
        if dead.is_final(q) {
            b.final_state(ids[q], TruthValue::zero());
        }
    }
    (entry, ids)
}

/// Concatenation part of the Cauchy product: paths read `u` in the
/// normalized `n1`, jump to the normalized `n2` instead of entering a final
/// state of `n1`, and read `v`. States of `n2` precede states of `n1`, so
/// shorter `u` comes first. With `dead_branch`, the jump can also enter a
/// copy of the dead words of `a2`, contributing `r(u) ⊓ 𝟎` when `s(v)` has
/// no path.
fn concatenation(
    n1: &MkAutomaton,
    n2: &MkAutomaton,
    a2: &MkAutomaton,
    dead_branch: bool,
) -> MkAutomaton {
    let alphabet = n1.alphabet();
    let mut b = Builder::new(alphabet);
    let ids2: Vec<usize> = n2.names().iter().map(|n| b.state(format!("s:{n}"))).collect();
    let dead = dead_branch.then(|| add_dead_branch(&mut b, a2, "dead"));
    let mut ids1 = vec![usize::MAX; n1.num_states()];
    for q in 0..n1.num_states() {
        if !n1.finals().contains_key(&q) {
            ids1[q] = b.state(format!("r:{}", n1.names()[q]));
        }
    }
    let (&q_in1, _) = n1.initial().iter().next().expect("normalized");
    let (&q_in2, _) = n2.initial().iter().next().expect("normalized");
    b.initial(ids1[q_in1], TruthValue::one());
    for &q in n2.finals().keys() {
        b.final_state(ids2[q], TruthValue::one());
    }
    for (&(p, x, q), k) in n2.transitions() {
        b.transition(ids2[p], x, ids2[q], k.clone());
    }
    for (&(p, x, q), k) in n1.transitions() {
        if n1.finals().contains_key(&q) {
            b.transition(ids1[p], x, ids2[q_in2], k.clone());
            if let Some((entry, _)) = &dead {
                b.transition(ids1[p], x, *entry, k.clone());
            }
        } else {
            b.transition(ids1[p], x, ids1[q], k.clone());
        }
    }
    b.build()
}

/// One-state automaton for `ε̄ ⊓ k`; `None` when `k = 𝟎`.
fn epsilon_term(alphabet: &Alphabet, k: &TruthValue) -> Option<MkAutomaton> {
    if k.is_zero() {
        return None;
    }
    let mut b = Builder::new(alphabet);
    let q = b.state("eps");
    b.initial(q, k.clone()).final_state(q, TruthValue::one());
    Some(b.build())
}

fn cauchy_parts(a1: &MkAutomaton, a2: &MkAutomaton, repaired: bool) -> Result<MkAutomaton> {
    if !a1.is_deterministic() || !a2.is_deterministic() {
        return Err(Error::Precondition(
            "cauchy requires deterministic input automata".into(),
        ));
    }
    let a2 = aligned(a1.alphabet(), a2)?;
    let alphabet = a1.alphabet();
    let r_eps = a1.behavior(&[])?;
    let s_eps = a2.behavior(&[])?;
    let n1 = normalize(a1)?;
    let n2 = normalize(&a2)?;

    let mut parts = Vec::new();
    if let Some(e) = epsilon_term(alphabet, &conj(&r_eps, &s_eps)) {
        parts.push(e);
    }
    if !r_eps.is_zero() {
        let left = normalize(&scalar_left(&r_eps, &a2)?.automaton)?;
        if repaired {
            // r(ε) ⊓ 𝟎 on the words where s has no path.
            let mut b = Builder::new(alphabet);
            let (entry, _) = add_dead_branch(&mut b, &a2, "dead");
            b.initial(entry, r_eps.clone());
            let branch = b.build().trim();
            parts.push(disjunction(&left, &branch)?.trim());
        } else {
            parts.push(left);
        }
    }
    parts.push(concatenation(&n1, &n2, &a2, repaired).trim());
    parts.push(scalar_right_normalized(&n1, &s_eps)?);
    disjunction_all(alphabet, &parts)
}

/// The Cauchy product `rs` of the behaviors of deterministic `a1`, `a2`.
///
/// Assembled as `(ε̄ ⊓ r(ε) ⊓ s(ε)) ⊔ (r(ε) ⊓ s) ⊔ concat ⊔ (r ⊓ s(ε))`
/// from normalized automata. The second and third parts carry extra
/// branches over the words on which `a2` has no path: there the pointwise
/// terms are `r(ε) ⊓ 𝟎` and `r(u) ⊓ 𝟎`, which differ from `𝟎` whenever the
/// left factor has a non-zero `e` component. [`cauchy_literal`] omits them.
pub fn cauchy(a1: &MkAutomaton, a2: &MkAutomaton) -> Result<MkAutomaton> {
    cauchy_parts(a1, a2, true)
}

/// The same assembly without dead-word branches. Agrees with the Cauchy
/// product except on words where some split `uv` has `r(u) ⊓ 𝟎 ≠ 𝟎` and no
/// path of `a2` over `v`.
pub fn cauchy_literal(a1: &MkAutomaton, a2: &MkAutomaton) -> Result<MkAutomaton> {
    cauchy_parts(a1, a2, false)
}

/// Decomposes `a` into `(B, L, g, h)`: `B` is the transition set (in
/// transition order, letters named `(p,a,q)`), `L` the non-empty path words,
/// `g` the transition weights, `h` the letter of each transition. The
/// initial and final weights must all be `𝟏` (see [`in_ter_one`]), since
/// `g` only carries transition weights.
pub fn nivat_decompose(a: &MkAutomaton) -> Result<NivatData> {
    if !a.behavior(&[])?.is_zero() {
        return Err(Error::Precondition(
            "nivat_decompose requires the empty word to have behavior 𝟎".into(),
        ));
    }
    if !a.initial().values().chain(a.finals().values()).all(TruthValue::is_one) {
        return Err(Error::Precondition(
            "nivat_decompose requires initial and final weights 𝟏".into(),
        ));
    }
    let trans: Vec<(&(usize, usize, usize), &TruthValue)> = a.transitions().iter().collect();
    let inner = Alphabet::new(
        trans
            .iter()
            .map(|(&(p, x, q), _)| {
                Symbol::letter(format!(
                    "({},{},{})",
                    a.names()[p],
                    a.alphabet().symbol(x),
                    a.names()[q]
                ))
            })
            .collect(),
    )?;
    let weights = trans.iter().map(|(_, k)| (*k).clone()).collect();
    let hom = StrictAlphabeticHom::new(
        inner.clone(),
        a.alphabet().clone(),
        trans.iter().map(|(&(_, x, _), _)| x).collect(),
    )?;
    // A fresh non-final entry state keeps ε out of L.
    let entry = a.num_states();
    let mut names = a.names().to_vec();
    names.push(fresh_name("entry", &names.iter().cloned().collect()));
    let mut transitions = BTreeSet::new();
    for (b, (&(p, _, q), _)) in trans.iter().enumerate() {
        transitions.insert((p, b, q));
        if a.initial().contains_key(&p) {
            transitions.insert((entry, b, q));
        }
    }
    let language = Nfa::new(
        inner.clone(),
        names,
        BTreeSet::from([entry]),
        a.finals().keys().copied().collect(),
        transitions,
    )?;
    Ok(NivatData {
        inner,
        language,
        weights,
        hom,
    })
}

/// `h(𝟏_L ⊓ g)`, with `g` realized by a one-state automaton.
pub fn nivat_compose(n: &NivatData) -> Result<MkAutomaton> {
    let g = letter_weight_automaton(&n.inner, &n.weights);
    let product = conj_char(&n.language.determinize(), &g)?;
    hom_image(&product, &n.hom)
}

/// Automaton with all initial and final weights `𝟏`, agreeing with `a` on
/// non-empty words and giving `𝟎` on `ε`.
///
/// Each initial state with weight `≠ 𝟏` (or that is also final) gets an
/// entry copy `init:q` that
/// absorbs `in(q)` into its outgoing transitions; each final state with
/// weight `≠ 𝟏` gets an exit copy `fin:q` that absorbs `ter(q)` into its
/// incoming transitions. Copies sit next to their original, so the path
/// order is preserved.
pub fn in_ter_one(a: &MkAutomaton) -> MkAutomaton {
    let taken: BTreeSet<String> = a.names().iter().cloned().collect();
    // Initial states that are also final get an entry copy too, so the
    // output has no path over ε.
    let entry_copy = |q: &usize| {
        a.initial()
            .get(q)
            .filter(|k| !k.is_one() || a.finals().contains_key(q))
    };
    let exit_copy = |q: &usize| a.finals().get(q).filter(|k| !k.is_one());
    // (original, tag): 0 entry copy, 1 original, 2 exit copy.
    let mut order: Vec<(usize, u8)> = Vec::new();
    for q in 0..a.num_states() {
        if entry_copy(&q).is_some() {
            order.push((q, 0));
        }
        order.push((q, 1));
        if exit_copy(&q).is_some() {
            order.push((q, 2));
        }
    }
    let index: HashMap<(usize, u8), usize> =
        order.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut b = Builder::new(a.alphabet());
    for &(q, tag) in &order {
        let n = &a.names()[q];
        b.state(match tag {
            0 => fresh_name(&format!("init:{n}"), &taken),
            1 => n.clone(),
            _ => fresh_name(&format!("fin:{n}"), &taken),
        });
    }
    for &q in a.initial().keys() {
        let id = match entry_copy(&q) {
            Some(_) => index[&(q, 0)],
            None => index[&(q, 1)],
        };
        b.initial(id, TruthValue::one());
    }
    for (&q, k) in a.finals() {
        let id = if k.is_one() { index[&(q, 1)] } else { index[&(q, 2)] };
        b.final_state(id, TruthValue::one());
    }
    for (&(p, x, q), k) in a.transitions() {
        let mut sources = vec![(index[&(p, 1)], k.clone())];
        if let Some(i) = entry_copy(&p) {
            sources.push((index[&(p, 0)], conj(i, k)));
        }
        for (src, w) in sources {
            b.transition(src, x, index[&(q, 1)], w.clone());
            if let Some(t) = exit_copy(&q) {
                b.transition(src, x, index[&(q, 2)], conj(&w, t));
            }
        }
    }
    b.build().prune_unreachable()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kvalues::disj;
    use crate::mkauto::fixtures::{k1, k2, two};

    fn ab() -> Alphabet {
        Alphabet::from_letters(&["a", "b"]).unwrap()
    }

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

    /// Deterministic: p -a-> p (k1), p -b-> q (k2), q final with ter k1, in(p) = k2.
    fn det() -> MkAutomaton {
        let mut b = Builder::new(&ab());
        let (p, q) = (b.state("p"), b.state("q"));
        b.initial(p, k2())
            .final_state(q, k1())
            .final_state(p, k2())
            .transition(p, 0, p, k1())
            .transition(p, 1, q, k2());
        b.build()
    }

    #[test]
    fn char_and_constant() {
        let c = char_automaton(&a_star_b());
        assert!(c.behavior(&[0, 1]).unwrap().is_one());
        assert!(c.behavior(&[1, 0]).unwrap().is_zero());
        assert!(c.behavior(&[]).unwrap().is_zero());
        let z = constant_automaton(&ab(), &TruthValue::zero());
        assert!(z.validate().is_empty());
        assert!(z.behavior(&[0]).unwrap().is_zero());
    }

    #[test]
    fn disjunction_is_ordered() {
        let c1 = constant_automaton(&ab(), &k1());
        let c2 = constant_automaton(&ab(), &k2());
        let d12 = disjunction(&c1, &c2).unwrap();
        let d21 = disjunction(&c2, &c1).unwrap();
        assert_eq!(d12.behavior(&[0]).unwrap(), disj(&k1(), &k2()));
        assert_ne!(d12.behavior(&[0]).unwrap(), d21.behavior(&[0]).unwrap());
    }

    #[test]
    fn conj_char_pointwise() {
        let d = det();
        let m = conj_char(&a_star_b(), &d).unwrap();
        for w in ab().words_up_to(5) {
            let inside = a_star_b().accepts(&w).unwrap();
            let expect = conj(&TruthValue::from_bool(inside), &d.behavior(&w).unwrap());
            assert_eq!(m.behavior(&w).unwrap(), expect);
        }
        let e = conj_char(&Dfa::empty(&ab()), &d).unwrap();
        assert!(ab().words_up_to(4).iter().all(|w| e.behavior(w).unwrap().is_zero()));
    }

    #[test]
    fn homomorphisms() {
        let xy = Alphabet::from_letters(&["x", "y"]).unwrap();
        let b = Alphabet::from_letters(&["b"]).unwrap();
        let h = StrictAlphabeticHom::new(xy.clone(), b.clone(), vec![0, 0]).unwrap();
        assert_eq!(h.preimages(&[0, 0]), [vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let t = two();
        let g = StrictAlphabeticHom::new(xy.clone(), t.alphabet().clone(), vec![0, 0]).unwrap();
        let inv = inv_hom(&t, &g).unwrap();
        assert_eq!(inv.behavior(&[0, 1]).unwrap(), t.behavior(&[0, 0]).unwrap());
        // Every preimage word contributes one path: k1 ⊔ k1 ≠ k1.
        let c = constant_automaton(&xy, &k1());
        let img = hom_image(&c, &h).unwrap();
        assert_eq!(img.behavior(&[0]).unwrap(), disj(&k1(), &k1()));
        let four = crate::kvalues::disj_fold(&[k1(), k1(), k1(), k1()]);
        assert_eq!(img.behavior(&[0, 0]).unwrap(), four);
        let swap = StrictAlphabeticHom::new(xy.clone(), xy.clone(), vec![1, 0]).unwrap();
        assert_eq!(hom_image(&c, &swap).unwrap().behavior(&[1, 0]).unwrap(), k1());
        let id = hom_image(&det(), &StrictAlphabeticHom::identity(&ab())).unwrap();
        for w in ab().words_up_to(4) {
            assert_eq!(id.behavior(&w).unwrap(), det().behavior(&w).unwrap());
        }
    }

    #[test]
    fn scalars() {
        let d = det();
        let r = scalar_right(&d, &k1()).unwrap();
        for w in ab().words_up_to(4) {
            assert_eq!(r.behavior(&w).unwrap(), conj(&d.behavior(&w).unwrap(), &k1()));
        }
        let l = scalar_left(&k1(), &d).unwrap();
        assert!(l.is_discrepant());
        assert_eq!(l.dead_value.to_string(), "<0,9/10,0,1/10>");
        // "ba" has no path.
        assert!(l.discrepancy_domain.accepts(&[1, 0]).unwrap());
        assert!(l.automaton.behavior(&[1, 0]).unwrap().is_zero());
        assert_eq!(
            l.automaton.behavior(&[0, 1]).unwrap(),
            conj(&k1(), &d.behavior(&[0, 1]).unwrap())
        );
        assert!(scalar_left(&k1(), &two()).is_err());
    }

    #[test]
    fn normalization() {
        let d = det();
        let n = normalize(&d).unwrap();
        assert!(n.is_normalized() && n.is_unambiguous());
        assert!(n.behavior(&[]).unwrap().is_zero());
        for w in ab().nonempty_words_up_to(5) {
            assert_eq!(n.behavior(&w).unwrap(), d.behavior(&w).unwrap());
        }
        let s = scalar_right_normalized(&n, &k1()).unwrap();
        assert!(s.is_normalized());
        for w in ab().words_up_to(4) {
            assert_eq!(s.behavior(&w).unwrap(), conj(&n.behavior(&w).unwrap(), &k1()));
        }
        assert!(scalar_right_normalized(&d, &k1()).is_err());
    }

    #[test]
    fn entry_and_exit_copies() {
        let d = det();
        let m = in_ter_one(&d);
        assert!(m.initial().values().all(TruthValue::is_one));
        assert!(m.finals().values().all(TruthValue::is_one));
        for w in ab().nonempty_words_up_to(5) {
            assert_eq!(m.behavior(&w).unwrap(), d.behavior(&w).unwrap());
        }
        assert!(m.behavior(&[]).unwrap().is_zero());
        assert!(in_ter_one(&two()).behavior(&[]).unwrap().is_zero());
    }

    #[test]
    fn support() {
        let d = det();
        let s = strong_support(&d).unwrap();
        for w in ab().words_up_to(5) {
            let t = d.behavior(&w).unwrap();
            assert_eq!(s.accepts(&w).unwrap(), !num_traits::Zero::is_zero(t.t()));
        }
    }

    #[test]
    fn nivat_round_trip() {
        assert!(matches!(nivat_decompose(&two()), Err(Error::Precondition(_))));
        assert!(matches!(nivat_decompose(&det()), Err(Error::Precondition(_))));
        let m = in_ter_one(&normalize(&det()).unwrap());
        let n = nivat_decompose(&m).unwrap();
        assert_eq!(n.inner.len(), m.transitions().len());
        let back = nivat_compose(&n).unwrap();
        for w in ab().words_up_to(4) {
            assert_eq!(back.behavior(&w).unwrap(), m.behavior(&w).unwrap());
        }
    }
}
