//! Searches for inputs where a construction, as published, departs from the
//! pointwise definitions.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::alphabet::Alphabet;
use crate::constructs as cx;
use crate::error::{Error, Result};
use crate::format::{write_hom, write_mk};
use crate::kvalues::{disj, Rational, TruthValue};
use crate::langops::LangExpr;
use crate::random::{self, AutomatonShape, SeededRng};

use super::SweepConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Match,
    Counterexample,
}

/// One probed instance. A counterexample carries everything needed to
/// replay it: the instance text, the word, and both values.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub probe: String,
    pub seed: u64,
    pub trial: usize,
    pub verdict: Verdict,
    pub instance: String,
    pub word: String,
    pub expected: String,
    pub actual: String,
    pub note: String,
}

impl fmt::Display for ProbeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = match self.verdict {
            Verdict::Match => "match",
            Verdict::Counterexample => "counterexample",
        };
        writeln!(
            f,
            "probe {} seed {} trial {}: {v} on {} (expected {}, construction {})",
            self.probe, self.seed, self.trial, self.word, self.expected, self.actual
        )?;
        if !self.note.is_empty() {
            writeln!(f, "  {}", self.note)?;
        }
        for line in self.instance.lines() {
            writeln!(f, "  | {line}")?;
        }
        Ok(())
    }
}

/// Summary of a probe run. The search stops at the first counterexample.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeOutcome {
    pub probe: String,
    pub seed: u64,
    pub budget: usize,
    pub trials_run: usize,
    pub words_checked: usize,
    pub counterexample: Option<ProbeReport>,
}

impl ProbeOutcome {
    pub fn found(&self) -> bool {
        self.counterexample.is_some()
    }
}

impl fmt::Display for ProbeOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.counterexample {
            Some(r) => write!(f, "{r}"),
            None => writeln!(
                f,
                "probe {} seed {}: no counterexample in {} trials ({} words)",
                self.probe, self.seed, self.trials_run, self.words_checked
            ),
        }
    }
}

pub const PROBES: &[&str] = &[
    "scalar-left",
    "hom-order",
    "path-tie",
    "reorder",
    "cauchy-dead",
    "recdef-order",
    "subset-order",
];

/// What a single trial found.
pub(crate) enum Trial {
    Clean(usize),
    Found {
        instance: String,
        word: String,
        expected: TruthValue,
        actual: TruthValue,
        note: String,
    },
}

pub fn run_probe(name: &str, cfg: &SweepConfig, budget: usize) -> Result<ProbeOutcome> {
    let step: fn(&SweepConfig, &mut SeededRng) -> Result<Trial> = match name {
        "scalar-left" => scalar_left,
        "hom-order" => hom_order,
        "path-tie" => path_tie,
        "reorder" => reorder,
        "cauchy-dead" => cauchy_dead,
        "recdef-order" => crate::mklogic::checks::probe_recdef_order,
        "subset-order" => crate::mklogic::checks::probe_subset_order,
        _ => {
            return Err(Error::Precondition(format!(
                "unknown probe `{name}`; known: {}",
                PROBES.join(", ")
            )))
        }
    };
    let mut out = ProbeOutcome {
        probe: name.to_string(),
        seed: cfg.seed,
        budget,
        trials_run: 0,
        words_checked: 0,
        counterexample: None,
    };
    for trial in 0..budget {
        let mut rng = random::trial_rng(cfg.seed, trial);
        out.trials_run += 1;
        match step(cfg, &mut rng)? {
            Trial::Clean(n) => out.words_checked += n,
            Trial::Found {
                instance,
                word,
                expected,
                actual,
                note,
            } => {
                out.words_checked += 1;
                out.counterexample = Some(ProbeReport {
                    probe: name.to_string(),
                    seed: cfg.seed,
                    trial,
                    verdict: Verdict::Counterexample,
                    instance,
                    word,
                    expected: expected.to_string(),
                    actual: actual.to_string(),
                    note,
                });
                break;
            }
        }
    }
    Ok(out)
}

fn alphabet(rng: &mut SeededRng, cfg: &SweepConfig) -> Alphabet {
    random::letters(rng.gen_range(1..=cfg.max_letters.max(1)))
}

/// `k ⊓ 𝟎` by its closed form `(0, t+f+u, 0, e)`.
pub fn left_zero_formula(k: &TruthValue) -> TruthValue {
    let zero = Rational::from_integer(0.into());
    TruthValue::new(zero.clone(), k.t() + k.f() + k.u(), zero, k.e().clone())
        .expect("components sum to one")
}

fn scalar_left(cfg: &SweepConfig, rng: &mut SeededRng) -> Result<Trial> {
    let al = alphabet(rng, cfg);
    let a = random::automaton(rng, &al, &AutomatonShape::deterministic(cfg.max_states));
    let k = random::nonzero_truth(rng);
    let sl = cx::scalar_left(&k, &a)?;
    let oracle = LangExpr::scalar_left(k.clone(), LangExpr::Behavior(a.clone()));
    let words = al.words_up_to(cfg.maxlen);
    for w in &words {
        let expected = oracle.eval(w)?;
        let actual = sl.automaton.behavior(w)?;
        if expected != actual {
            let dead = a.path_count(w)? == 0;
            let note = if dead {
                format!(
                    "dead word (in discrepancy domain: {}); k ⊓ 𝟎 = (0, t+f+u, 0, e) = {} {}",
                    sl.discrepancy_domain.accepts(w)?,
                    left_zero_formula(&k),
                    if expected == left_zero_formula(&k) { "matches" } else { "DOES NOT match" }
                )
            } else {
                "word with an accepting path".to_string()
            };
            return Ok(Trial::Found {
                instance: format!("{}# k = {k}\n", write_mk(&a)),
                word: al.render_word(w),
                expected,
                actual,
                note,
            });
        }
    }
    Ok(Trial::Clean(words.len()))
}

fn hom_order(cfg: &SweepConfig, rng: &mut SeededRng) -> Result<Trial> {
    let tgt = alphabet(rng, cfg);
    let n = rng.gen_range(2..=cfg.max_letters.max(2));
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let src = Alphabet::from_letters(&names)?;
    let a = random::automaton(rng, &src, &AutomatonShape::nondeterministic(cfg.max_states));
    let h = random::hom(rng, &src, &tgt);
    let m = cx::hom_image(&a, &h)?;
    let oracle = LangExpr::hom(h.clone(), LangExpr::Behavior(a.clone()));
    let words = tgt.words_up_to(cfg.maxlen.min(4));
    for u in &words {
        let expected = oracle.eval(u)?;
        let actual = m.behavior(u)?;
        if expected != actual {
            return Ok(Trial::Found {
                instance: format!("{}---\n{}", write_mk(&a), write_hom(&h)),
                word: tgt.render_word(u),
                expected,
                actual,
                note: "image automaton folds paths in (A×Q) order, the definition folds preimages word-major"
                    .into(),
            });
        }
    }
    Ok(Trial::Clean(words.len()))
}

/// Paths sorted by `q0…q(n-1)` with the tie at `qn` broken descending
/// instead of ascending.
fn path_tie(cfg: &SweepConfig, rng: &mut SeededRng) -> Result<Trial> {
    let al = alphabet(rng, cfg);
    let a = random::automaton(rng, &al, &AutomatonShape::nondeterministic(cfg.max_states));
    let words = al.words_up_to(cfg.maxlen);
    for w in &words {
        let mut paths: Vec<(Vec<usize>, TruthValue)> = Vec::new();
        a.for_each_path(w, |s, k| paths.push((s.to_vec(), k.clone())))?;
        paths.sort_by(|(x, _), (y, _)| {
            let n = x.len() - 1;
            x[..n].cmp(&y[..n]).then(y[n].cmp(&x[n]))
        });
        let alt = paths.iter().fold(TruthValue::zero(), |acc, (_, k)| disj(&acc, k));
        let expected = a.behavior(w)?;
        if alt != expected {
            return Ok(Trial::Found {
                instance: write_mk(&a),
                word: al.render_word(w),
                expected,
                actual: alt,
                note: "ascending vs descending tie-break at the last state".into(),
            });
        }
    }
    Ok(Trial::Clean(words.len()))
}

/// Same automaton under a permuted state order.
fn reorder(cfg: &SweepConfig, rng: &mut SeededRng) -> Result<Trial> {
    let al = alphabet(rng, cfg);
    let a = random::automaton(rng, &al, &AutomatonShape::nondeterministic(cfg.max_states));
    let mut order: Vec<usize> = (0..a.num_states()).collect();
    order.shuffle(rng);
    let b = a.reordered(&order)?;
    let words = al.words_up_to(cfg.maxlen);
    for w in &words {
        let expected = a.behavior(w)?;
        let actual = b.behavior(w)?;
        if expected != actual {
            let names: Vec<&str> = order.iter().map(|&q| a.names()[q].as_str()).collect();
            return Ok(Trial::Found {
                instance: write_mk(&a),
                word: al.render_word(w),
                expected,
                actual,
                note: format!("state order {}", names.join(" < ")),
            });
        }
    }
    Ok(Trial::Clean(words.len()))
}

fn cauchy_dead(cfg: &SweepConfig, rng: &mut SeededRng) -> Result<Trial> {
    let al = alphabet(rng, cfg);
    let shape = AutomatonShape::deterministic(cfg.max_states);
    let a1 = random::automaton(rng, &al, &shape);
    let a2 = random::automaton(rng, &al, &shape);
    let m = cx::cauchy_literal(&a1, &a2)?;
    let oracle = LangExpr::cauchy(LangExpr::Behavior(a1.clone()), LangExpr::Behavior(a2.clone()));
    let words = al.words_up_to(cfg.maxlen.min(4));
    for w in &words {
        let expected = oracle.eval(w)?;
        let actual = m.behavior(w)?;
        if expected != actual {
            let dead: Vec<String> = (0..=w.len())
                .filter(|&i| a2.path_count(&w[i..]).map(|n| n == 0).unwrap_or(false))
                .map(|i| al.render_word(&w[i..]))
                .collect();
            return Ok(Trial::Found {
                instance: format!("{}---\n{}", write_mk(&a1), write_mk(&a2)),
                word: al.render_word(w),
                expected,
                actual,
                note: format!("suffixes without a path in the second automaton: {}", dead.join(", ")),
            });
        }
    }
    Ok(Trial::Clean(words.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kvalues::conj;
    use crate::mkauto::fixtures::{k1, k2};

    #[test]
    fn left_zero_formula_agrees_with_conj() {
        for k in [k1(), k2(), TruthValue::one(), TruthValue::zero()] {
            assert_eq!(left_zero_formula(&k), conj(&k, &TruthValue::zero()));
        }
    }

    #[test]
    fn scalar_left_probe_finds_dead_word() {
        let cfg = SweepConfig {
            seed: 1,
            ..SweepConfig::default()
        };
        let out = run_probe("scalar-left", &cfg, 1000).unwrap();
        let r = out.counterexample.expect("a dead word within budget");
        assert!(r.note.starts_with("dead word"));
        assert!(r.note.contains(" matches"));
    }

    #[test]
    fn unknown_probe_is_an_error() {
        assert!(run_probe("nope", &SweepConfig::default(), 1).is_err());
    }
}
