//! Construction-vs-oracle sweeps.

use std::fmt;

use rand::Rng;
use serde::Serialize;

use super::Mismatch;
use crate::alphabet::{Alphabet, Word};
use crate::constructs as cx;
use crate::error::{Error, Result};
use crate::format::{write_dfa, write_hom, write_mk};
use crate::kvalues::{conj, disj, Rational, TruthValue};
use crate::langops::LangExpr;
use crate::mkauto::MkAutomaton;
use crate::random::{self, AutomatonShape, SeededRng};

/// Parameters shared by all sweeps.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub seed: u64,
    pub trials: usize,
    pub maxlen: usize,
    pub max_states: usize,
    pub max_letters: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            seed: 0,
            trials: 100,
            maxlen: 5,
            max_states: 4,
            max_letters: 3,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub checks: usize,
    pub mismatches: Vec<Mismatch>,
    pub notes: Vec<String>,
}

impl VerifyReport {
    fn new(suite: &str, cfg: &SweepConfig) -> Self {
        VerifyReport {
            suite: suite.to_string(),
            seed: cfg.seed,
            trials: cfg.trials,
            checks: 0,
            mismatches: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    /// Records one comparison.
    pub(crate) fn check(
        &mut self,
        trial: usize,
        word: impl FnOnce() -> String,
        expected: &TruthValue,
        actual: &TruthValue,
        instance: impl FnOnce() -> String,
    ) {
        self.checks += 1;
        if expected != actual {
            self.mismatches.push(Mismatch {
                trial,
                word: word(),
                expected: expected.to_string(),
                actual: actual.to_string(),
                instance: instance(),
            });
        }
    }

    /// Records a boolean property.
    pub(crate) fn check_that(
        &mut self,
        trial: usize,
        what: &str,
        ok: bool,
        instance: impl FnOnce() -> String,
    ) {
        self.checks += 1;
        if !ok {
            self.mismatches.push(Mismatch {
                trial,
                word: "-".into(),
                expected: what.to_string(),
                actual: "violated".into(),
                instance: instance(),
            });
        }
    }

    fn compare(
        &mut self,
        trial: usize,
        words: &[Word],
        alphabet: &Alphabet,
        oracle: impl Fn(&Word) -> Result<TruthValue>,
        actual: &MkAutomaton,
        instance: impl Fn() -> String,
    ) -> Result<()> {
        for w in words {
            let e = oracle(w)?;
            let a = actual.behavior(w)?;
            self.check(trial, || alphabet.render_word(w), &e, &a, &instance);
        }
        Ok(())
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(
            f,
            "verify {}: {verdict} (seed {}, {} trials, {} checks, {} mismatches)",
            self.suite,
            self.seed,
            self.trials,
            self.checks,
            self.mismatches.len()
        )?;
        for m in self.mismatches.iter().take(5) {
            write!(f, "{m}")?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

pub const SUITES: &[&str] = &[
    "bimonoid",
    "char",
    "disjunction",
    "conj_char",
    "inv_hom",
    "scalar_right",
    "scalar_right_normalized",
    "normalize",
    "in_ter_one",
    "cauchy",
    "strong_support",
    "hom_image",
    "nivat",
    "mso",
    "rmso",
    "recdef",
];

/// Runs a named suite; `all` is handled by the caller.
pub fn run_suite(name: &str, cfg: &SweepConfig) -> Result<VerifyReport> {
    let mut r = VerifyReport::new(name, cfg);
    match name {
        "bimonoid" => bimonoid(&mut r, cfg),
        "mso" => crate::mklogic::checks::verify_mso(&mut r, cfg)?,
        "rmso" => crate::mklogic::checks::verify_rmso(&mut r, cfg)?,
        "recdef" => crate::mklogic::checks::verify_recdef(&mut r, cfg)?,
        _ if SUITES.contains(&name) => {
            for trial in 0..cfg.trials {
                let mut rng = random::trial_rng(cfg.seed, trial);
                construction_trial(name, &mut r, cfg, trial, &mut rng)?;
            }
        }
        _ => {
            return Err(Error::Precondition(format!(
                "unknown suite `{name}`; known: {}, all",
                SUITES.join(", ")
            )))
        }
    }
    Ok(r)
}

fn alphabet(rng: &mut SeededRng, cfg: &SweepConfig) -> Alphabet {
    random::letters(rng.gen_range(1..=cfg.max_letters.max(1)))
}

fn source_alphabet(rng: &mut SeededRng, cfg: &SweepConfig) -> Alphabet {
    let n = rng.gen_range(1..=cfg.max_letters.max(1));
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    Alphabet::from_letters(&names).expect("distinct")
}

fn dump(parts: &[String]) -> String {
    parts.join("---\n")
}

fn construction_trial(
    name: &str,
    r: &mut VerifyReport,
    cfg: &SweepConfig,
    trial: usize,
    rng: &mut SeededRng,
) -> Result<()> {
    let al = alphabet(rng, cfg);
    let words = al.words_up_to(cfg.maxlen);
    let nondet = AutomatonShape::nondeterministic(cfg.max_states);
    let det = AutomatonShape::deterministic(cfg.max_states);
    match name {
        "char" => {
            let d = random::dfa(rng, &al, cfg.max_states);
            let m = cx::char_automaton(&d);
            let o = LangExpr::CharOfDfa(d.clone());
            r.compare(trial, &words, &al, |w| o.eval(w), &m, || write_dfa(&d))?;
        }
        "disjunction" => {
            let a1 = random::automaton(rng, &al, &nondet);
            let a2 = random::automaton(rng, &al, &nondet);
            let m = cx::disjunction(&a1, &a2)?;
            let o = LangExpr::disj(LangExpr::Behavior(a1.clone()), LangExpr::Behavior(a2.clone()));
            r.compare(trial, &words, &al, |w| o.eval(w), &m, || {
                dump(&[write_mk(&a1), write_mk(&a2)])
            })?;
        }
        "conj_char" => {
            let d = random::dfa(rng, &al, cfg.max_states);
            let a = random::automaton(rng, &al, &nondet);
            let m = cx::conj_char(&d, &a)?;
            let o = LangExpr::conj(LangExpr::CharOfDfa(d.clone()), LangExpr::Behavior(a.clone()));
            r.compare(trial, &words, &al, |w| o.eval(w), &m, || {
                dump(&[write_dfa(&d), write_mk(&a)])
            })?;
        }
        "inv_hom" => {
            let src = source_alphabet(rng, cfg);
            let a = random::automaton(rng, &al, &nondet);
            let h = random::hom(rng, &src, &al);
            let m = cx::inv_hom(&a, &h)?;
            let o = LangExpr::inv_hom(h.clone(), LangExpr::Behavior(a.clone()));
            let words = src.words_up_to(cfg.maxlen);
            r.compare(trial, &words, &src, |w| o.eval(w), &m, || {
                dump(&[write_mk(&a), write_hom(&h)])
            })?;
        }
        "scalar_right" => {
            let a = random::automaton(rng, &al, &det);
            let k = random::truth(rng);
            let m = cx::scalar_right(&a, &k)?;
            let o = LangExpr::scalar_right(LangExpr::Behavior(a.clone()), k.clone());
            r.compare(trial, &words, &al, |w| o.eval(w), &m, || {
                format!("{}k {k}\n", write_mk(&a))
            })?;
        }
        "scalar_right_normalized" => {
            let a = random::automaton(rng, &al, &det);
            let k = random::truth(rng);
            let n = cx::normalize(&a)?;
            let m = cx::scalar_right_normalized(&n, &k)?;
            r.check_that(trial, "output normalized and unambiguous", m.is_normalized() && m.is_unambiguous(), || write_mk(&a));
            let o = LangExpr::scalar_right(LangExpr::Behavior(n.clone()), k.clone());
            r.compare(trial, &words, &al, |w| o.eval(w), &m, || {
                format!("{}k {k}\n", write_mk(&n))
            })?;
        }
        "normalize" => {
            let a = random::automaton(rng, &al, &det);
            let m = cx::normalize(&a)?;
            r.check_that(trial, "output normalized and unambiguous", m.is_normalized() && m.is_unambiguous(), || write_mk(&a));
            let oracle = |w: &Word| -> Result<TruthValue> {
                if w.is_empty() {
                    Ok(TruthValue::zero())
                } else {
                    a.behavior(w)
                }
            };
            r.compare(trial, &words, &al, oracle, &m, || write_mk(&a))?;
            for w in &words[1..] {
                let same = a.path_count(w)? == m.path_count(w)?;
                r.check_that(trial, "path count preserved", same, || write_mk(&a));
            }
        }
        "in_ter_one" => {
            let a = random::automaton(rng, &al, &nondet);
            let m = cx::in_ter_one(&a);
            let units = m.initial().values().chain(m.finals().values()).all(TruthValue::is_one);
            r.check_that(trial, "initial and final weights are 𝟏", units, || write_mk(&a));
            let nonempty = &words[1..];
            r.compare(trial, nonempty, &al, |w| a.behavior(w), &m, || write_mk(&a))?;
            for w in nonempty {
                let same = a.path_count(w)? == m.path_count(w)?;
                r.check_that(trial, "path count preserved", same, || write_mk(&a));
            }
        }
        "cauchy" => {
            let a1 = random::automaton(rng, &al, &det);
            let a2 = random::automaton(rng, &al, &det);
            let m = cx::cauchy(&a1, &a2)?;
            r.check_that(trial, "initial weights non-zero", m.validate().is_empty(), || {
                dump(&[write_mk(&a1), write_mk(&a2)])
            });
            let o = LangExpr::cauchy(LangExpr::Behavior(a1.clone()), LangExpr::Behavior(a2.clone()));
            r.compare(trial, &words, &al, |w| o.eval(w), &m, || {
                dump(&[write_mk(&a1), write_mk(&a2)])
            })?;
        }
        "strong_support" => {
            let a = random::automaton(rng, &al, &det);
            let d = cx::strong_support(&a)?;
            for w in &words {
                let t = a.behavior(w)?;
                let expect = !num_traits::Zero::is_zero(t.t());
                let got = d.accepts(w)?;
                r.check(
                    trial,
                    || al.render_word(w),
                    &TruthValue::from_bool(expect),
                    &TruthValue::from_bool(got),
                    || write_mk(&a),
                );
            }
        }
        "hom_image" => {
            let src = source_alphabet(rng, cfg);
            let a = random::automaton(rng, &src, &nondet);
            let h = random::hom(rng, &src, &al);
            let m = cx::hom_image(&a, &h)?;
            let mut fold_divergent = 0;
            for u in &words {
                let mut image = m.path_weights(u)?;
                let mut source: Vec<TruthValue> = Vec::new();
                for v in h.preimages(u) {
                    source.extend(a.path_weights(&v)?);
                }
                image.sort();
                source.sort();
                r.check_that(trial, "path-weight multisets agree", image == source, || {
                    dump(&[write_mk(&a), write_hom(&h)])
                });
                let oracle = LangExpr::hom(h.clone(), LangExpr::Behavior(a.clone())).eval(u)?;
                if oracle != m.behavior(u)? {
                    fold_divergent += 1;
                }
            }
            if fold_divergent > 0 {
                r.notes.push(format!(
                    "trial {trial}: fold order differs from the preimage order on {fold_divergent} words (see probe hom-order)"
                ));
            }
        }
        "nivat" => nivat_trial(r, cfg, trial, rng, &al)?,
        _ => unreachable!("checked by run_suite"),
    }
    Ok(())
}

/// Decompose then compose; compared with the source on non-empty words.
/// Differences traced to the homomorphic-image fold order are notes.
pub(crate) fn nivat_trial(
    r: &mut VerifyReport,
    cfg: &SweepConfig,
    trial: usize,
    rng: &mut SeededRng,
    al: &Alphabet,
) -> Result<()> {
    let a = random::automaton(rng, al, &AutomatonShape::nondeterministic(cfg.max_states));
    let s = cx::in_ter_one(&a);
    let n = cx::nivat_decompose(&s)?;
    r.check_that(trial, "|B| = |T|", n.inner.len() == s.transitions().len(), || write_mk(&s));
    let back = cx::nivat_compose(&n)?;
    let g = cx::letter_weight_automaton(&n.inner, &n.weights);
    let product = cx::conj_char(&n.language.determinize(), &g)?;
    let hom_oracle = LangExpr::hom(n.hom.clone(), LangExpr::Behavior(product));
    for w in al.nonempty_words_up_to(cfg.maxlen.min(4)) {
        let expect = s.behavior(&w)?;
        let got = back.behavior(&w)?;
        if expect != got && hom_oracle.eval(&w)? != got {
            r.notes.push(format!(
                "trial {trial} word {}: differs through the homomorphic-image fold order",
                al.render_word(&w)
            ));
            continue;
        }
        r.check(trial, || al.render_word(&w), &expect, &got, || write_mk(&s));
    }
    Ok(())
}

/// Quadruple with a random grid, biased toward the units.
fn law_value(rng: &mut SeededRng) -> TruthValue {
    match rng.gen_range(0..12) {
        0 => TruthValue::zero(),
        1 => TruthValue::one(),
        _ => {
            let d = [2, 3, 7, 10, 12, 100][rng.gen_range(0..6)];
            random::truth_on_grid(rng, d)
        }
    }
}

fn valid(k: &TruthValue) -> bool {
    TruthValue::new(k.t().clone(), k.f().clone(), k.u().clone(), k.e().clone()).is_ok()
}

fn bimonoid(r: &mut VerifyReport, cfg: &SweepConfig) {
    let zero = TruthValue::zero();
    let one = TruthValue::one();
    for trial in 0..cfg.trials {
        let mut rng = random::trial_rng(cfg.seed, trial);
        let (a, b, c) = (law_value(&mut rng), law_value(&mut rng), law_value(&mut rng));
        let inst = || format!("a {a}\nb {b}\nc {c}\n");
        let ab_d = disj(&a, &b);
        let ab_c = conj(&a, &b);
        r.check_that(trial, "closure", valid(&ab_d) && valid(&ab_c), inst);
        r.check(trial, || "disj assoc".into(), &disj(&ab_d, &c), &disj(&a, &disj(&b, &c)), inst);
        r.check(trial, || "conj assoc".into(), &conj(&ab_c, &c), &conj(&a, &conj(&b, &c)), inst);
        r.check(trial, || "disj left unit".into(), &a, &disj(&zero, &a), inst);
        r.check(trial, || "disj right unit".into(), &a, &disj(&a, &zero), inst);
        r.check(trial, || "conj left unit".into(), &a, &conj(&one, &a), inst);
        r.check(trial, || "conj right unit".into(), &a, &conj(&a, &one), inst);
        r.check(trial, || "left zero".into(), &zero, &conj(&zero, &a), inst);
        let formula = TruthValue::new(
            Rational::from_integer(0.into()),
            a.t() + a.f() + a.u(),
            Rational::from_integer(0.into()),
            a.e().clone(),
        )
        .expect("valid");
        r.check(trial, || "k ⊓ 𝟎".into(), &formula, &conj(&a, &zero), inst);
        r.check_that(
            trial,
            "zero-sum free",
            !ab_d.is_zero() || (a.is_zero() && b.is_zero()),
            inst,
        );
        r.check_that(
            trial,
            "zero-divisor free",
            !ab_c.is_zero() || a.is_zero() || b.is_zero(),
            inst,
        );
        // Boundary: one argument is 𝟎.
        r.check_that(trial, "zero-sum free at 𝟎", disj(&zero, &b).is_zero() == b.is_zero(), inst);
        r.check_that(
            trial,
            "zero-divisor free at 𝟎",
            conj(&b, &zero).is_zero() == num_traits::Zero::is_zero(b.e()),
            inst,
        );
    }
}
