//! Logic sweeps and probes wired into the harness.

use rand::seq::SliceRandom;
use rand::Rng;

use super::compile::{is_rmso, mso_to_dfa, rmso_to_automaton, rmso_to_langexpr};
use super::decompile::automaton_to_rmso;
use super::semantics::{decode, encode, mk_eval, mk_eval_in, models, mso_satisfies, SubsetOrder};
use super::syntax::{parse_mk, MkFormula, Mso};
use crate::alphabet::{Alphabet, Var, Word};
use crate::error::Result;
use crate::format::write_mk;
use crate::harness::probe::Trial;
use crate::harness::{SweepConfig, VerifyReport};
use crate::kvalues::TruthValue;
use crate::mkauto::MkAutomaton;
use crate::random::{self, AutomatonShape, SeededRng};

/// Restricted sentences over `{a, b}` covering every production.
pub const RMSO_SUITE: &[&str] = &[
    "<0.3,0.2,0.4,0.1>",
    "exists x . P_a(x)",
    "forall x . (P_a(x) -> exists y . (succ(y, x) & P_b(y)))",
    "<0.3,0.2,0.4,0.1> (+) <0.9,0.05,0.03,0.02>",
    "(exists x . P_b(x)) (*) <0.3,0.2,0.4,0.1>",
    "((exists x . (first(x) & P_a(x))) (*) <0.3,0.2,0.4,0.1>) (+) ((exists x . (last(x) & P_b(x))) (*) <0.9,0.05,0.03,0.02>)",
    "(forall x . !(x <= x)) (*) <0.9,0.05,0.03,0.02>",
    "sum x . (P_a(x) (*) <0.3,0.2,0.4,0.1>)",
    "sum x . ((P_a(x) (*) <0.3,0.2,0.4,0.1>) (+) (P_b(x) (*) <0.9,0.05,0.03,0.02>))",
    "sum x . sum y . ((x <= y) (*) <0.3,0.2,0.4,0.1>)",
    "sum X . ((forall x . (x in X -> P_a(x))) (*) <0.3,0.2,0.4,0.1>)",
    "sum X . ((exists x . x in X) (*) prod x . (x in X -> <0.9,0.05,0.03,0.02>))",
    "sum X . sum Y . (partition(X, Y) (*) prod x . ((x in X -> <0.3,0.2,0.4,0.1>) (+) (x in Y -> <0.9,0.05,0.03,0.02>)))",
];

fn ab() -> Alphabet {
    Alphabet::from_letters(&["a", "b"]).expect("distinct")
}

fn has_sum(f: &MkFormula) -> bool {
    match f {
        MkFormula::Const(_) | MkFormula::Bool(_) => false,
        MkFormula::SumFo(..) | MkFormula::SumSo(..) => true,
        MkFormula::Plus(a, b) | MkFormula::Times(a, b) => has_sum(a) || has_sum(b),
        MkFormula::ProdFo(_, a) => has_sum(a),
    }
}

/// A random MSO formula whose free variables lie in `scope`.
pub fn random_mso(rng: &mut SeededRng, letters: &[String], scope: &[Var], depth: usize) -> Mso {
    let fo: Vec<&Var> = scope.iter().filter(|v| v.is_first_order()).collect();
    let so: Vec<&Var> = scope.iter().filter(|v| !v.is_first_order()).collect();
    if depth == 0 || rng.gen_bool(0.3) {
        if fo.is_empty() {
            if depth > 0 && rng.gen_bool(0.7) {
                let v = Var::new(format!("u{depth}"));
                let inner: Vec<Var> = scope.iter().cloned().chain([v.clone()]).collect();
                return Mso::Exists(v.clone(), Box::new(random_mso(rng, letters, &inner, 0)));
            }
            return Mso::True;
        }
        let x = (*fo.choose(rng).expect("nonempty")).clone();
        return match rng.gen_range(0..4) {
            0 => Mso::Label(letters.choose(rng).expect("nonempty").clone(), x),
            1 => Mso::Le(x, (*fo.choose(rng).expect("nonempty")).clone()),
            2 if !so.is_empty() => Mso::In(x, (*so.choose(rng).expect("nonempty")).clone()),
            _ => Mso::Label(letters.choose(rng).expect("nonempty").clone(), x),
        };
    }
    match rng.gen_range(0..4) {
        0 => Mso::Not(Box::new(random_mso(rng, letters, scope, depth - 1))),
        1 => Mso::Or(
            Box::new(random_mso(rng, letters, scope, depth - 1)),
            Box::new(random_mso(rng, letters, scope, depth - 1)),
        ),
        _ => {
            let name = if rng.gen_bool(0.7) { format!("u{depth}") } else { format!("U{depth}") };
            let v = Var::new(name);
            let inner: Vec<Var> = scope.iter().cloned().chain([v.clone()]).collect();
            Mso::Exists(v, Box::new(random_mso(rng, letters, &inner, depth - 1)))
        }
    }
}

/// A random weighted formula, restricted or not, with free variables in
/// `scope`.
pub fn random_mk(rng: &mut SeededRng, letters: &[String], scope: &[Var], depth: usize) -> MkFormula {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.5) {
            MkFormula::Const(random::truth(rng))
        } else {
            MkFormula::Bool(random_mso(rng, letters, scope, 1))
        };
    }
    let sub = |rng: &mut SeededRng, scope: &[Var]| Box::new(random_mk(rng, letters, scope, depth - 1));
    match rng.gen_range(0..6) {
        0 => MkFormula::Plus(sub(rng, scope), sub(rng, scope)),
        1 => MkFormula::Times(sub(rng, scope), sub(rng, scope)),
        2 => MkFormula::Times(Box::new(MkFormula::Bool(random_mso(rng, letters, scope, 1))), sub(rng, scope)),
        k => {
            let v = Var::new(if k == 4 { format!("W{depth}") } else { format!("w{depth}") });
            let inner: Vec<Var> = scope.iter().cloned().chain([v.clone()]).collect();
            let body = sub(rng, &inner);
            match k {
                3 => MkFormula::SumFo(v, body),
                4 => MkFormula::SumSo(v, body),
                _ => MkFormula::ProdFo(v, body),
            }
        }
    }
}

fn random_vars(rng: &mut SeededRng, max: usize) -> Vec<Var> {
    let mut pool = vec![Var::new("x"), Var::new("y"), Var::new("X"), Var::new("Y")];
    pool.shuffle(rng);
    let n = rng.gen_range(0..=max);
    let mut vars: Vec<Var> = pool.into_iter().take(n).collect();
    vars.sort();
    vars
}

/// Restricts a word over `A_V` to `A_U` for `U ⊆ V`; `None` if invalid.
fn restrict(from: &Alphabet, to: &Alphabet, w: &[usize]) -> Result<Option<Word>> {
    let Some((letters, mut asg)) = decode(from, w)? else {
        return Ok(None);
    };
    asg.first_order.retain(|v, _| to.vars().contains(v));
    asg.second_order.retain(|v, _| to.vars().contains(v));
    Ok(Some(encode(to, &letters, &asg)?))
}

/// Automaton of each random formula against satisfaction, and the value of
/// weighted formulas under extra variables against their value on the
/// restricted encoding.
pub fn verify_mso(r: &mut VerifyReport, cfg: &SweepConfig) -> Result<()> {
    let base = ab();
    let letters = vec!["a".to_string(), "b".to_string()];
    let maxlen = cfg.maxlen.min(3);
    for trial in 0..cfg.trials {
        let mut rng = random::trial_rng(cfg.seed, trial);
        let vars = random_vars(&mut rng, 2);
        let al = Alphabet::extended(&base, &vars)?;
        let m = random_mso(&mut rng, &letters, &vars, 3);
        let d = mso_to_dfa(&m, &vars, &base)?;
        let words = al.words_up_to(maxlen);
        let mut agree = true;
        for w in &words {
            agree &= d.accepts(w)? == mso_satisfies(&m, &al, w)?;
        }
        r.check_that(trial, "L(automaton) = satisfying encodings", agree, || format!("{m} over {al:?}"));

        let f = random_mk(&mut rng, &letters, &vars, 3);
        let free: Vec<Var> = f.free_vars().into_iter().collect();
        let small = Alphabet::extended(&base, &free)?;
        for w in &words {
            let expected = match restrict(&al, &small, w)? {
                Some(u) => mk_eval(&f, &small, &u)?,
                None => TruthValue::zero(),
            };
            let actual = mk_eval(&f, &al, w)?;
            r.check(trial, || al.render_word(w), &expected, &actual, || f.to_string());
        }
    }
    Ok(())
}

/// Compiled automaton of each suite sentence against the direct semantics.
/// Sentences without sum quantifiers must agree everywhere. With sum
/// quantifiers the construction folds in its own order, so a disagreement
/// is attributed: to the subset order when the ascending and row-letter
/// orders already differ, to the image fold when the automaton differs
/// from the pointwise mirror of the same induction.
pub fn verify_rmso(r: &mut VerifyReport, cfg: &SweepConfig) -> Result<()> {
    let base = ab();
    let words = base.words_up_to(cfg.maxlen.min(4));
    let (mut subset, mut image) = (0usize, 0usize);
    for (trial, text) in RMSO_SUITE.iter().enumerate() {
        let f = parse_mk(text)?;
        r.check_that(trial, "sentence is restricted", is_rmso(&f) && f.is_sentence(), || text.to_string());
        let a = rmso_to_automaton(&f, &[], &base)?;
        let mirror = rmso_to_langexpr(&f, &[], &base)?;
        for w in &words {
            let expected = mk_eval(&f, &base, w)?;
            let row = mk_eval_in(&f, &base, w, SubsetOrder::RowLetters)?;
            let defined = mirror.eval(w)?;
            let actual = a.behavior(w)?;
            // The induction itself must be right up to fold order.
            r.check(trial, || base.render_word(w), &row, &defined, || format!("mirror of {text}"));
            if !has_sum(&f) || actual == expected {
                r.check(trial, || base.render_word(w), &expected, &actual, || text.to_string());
            } else if expected != row {
                subset += 1;
            } else {
                image += 1;
            }
        }
    }
    if subset + image > 0 {
        r.notes.push(format!(
            "sum-quantifier sentences: {subset} values differ by subset order, {image} by image fold order"
        ));
    }
    Ok(())
}

fn small_automaton(rng: &mut SeededRng) -> MkAutomaton {
    let shape = AutomatonShape {
        max_states: 2,
        deterministic: false,
        density: 0.5,
        max_transitions: Some(4),
    };
    random::automaton(rng, &ab(), &shape)
}

fn base_letters(al: &Alphabet, w: &[usize]) -> Vec<String> {
    w.iter().map(|&i| al.symbol(i).base().to_string()).collect()
}

/// Whether the order of satisfying assignments differs from path order.
fn order_bites(a: &MkAutomaton, w: &[usize]) -> Result<bool> {
    let d = automaton_to_rmso(a)?;
    let ms = models(&d.psi, &d.sets, &base_letters(a.alphabet(), w))?;
    let runs: Vec<Option<Vec<usize>>> = ms.iter().map(|m| d.run_of(m, w.len())).collect();
    let paths: Vec<Option<Vec<usize>>> = d.path_runs(w)?.into_iter().map(Some).collect();
    Ok(runs != paths)
}

/// Decompiled sentences: restricted, one model per path, and the
/// behavior wherever the assignment order matches path order.
pub fn verify_recdef(r: &mut VerifyReport, cfg: &SweepConfig) -> Result<()> {
    let trials = cfg.trials.max(20);
    let mut bitten = 0usize;
    for trial in 0..trials {
        let mut rng = random::trial_rng(cfg.seed, trial);
        let a = small_automaton(&mut rng);
        let d = automaton_to_rmso(&a)?;
        let inst = || write_mk(&a);
        r.check_that(trial, "sentence is restricted", is_rmso(&d.sentence) && d.sentence.is_sentence(), inst);
        for w in a.alphabet().words_up_to(cfg.maxlen.min(3)) {
            let letters = base_letters(a.alphabet(), &w);
            let ms = models(&d.psi, &d.sets, &letters)?;
            let paths = if w.is_empty() { 0 } else { a.path_count(&w)? };
            r.check_that(trial, "one model per path", ms.len() == paths, inst);
            let expected = a.behavior(&w)?;
            let actual = mk_eval(&d.sentence, a.alphabet(), &w)?;
            if w.is_empty() || !order_bites(&a, &w)? {
                r.check(trial, || a.alphabet().render_word(&w), &expected, &actual, inst);
            } else {
                bitten += 1;
            }
        }
    }
    if bitten > 0 {
        r.notes.push(format!("{bitten} words where assignment order differs from path order"));
    }
    Ok(())
}

/// Decompiled sentence against the automaton it came from.
pub(crate) fn probe_recdef_order(cfg: &SweepConfig, rng: &mut SeededRng) -> Result<Trial> {
    let a = small_automaton(rng);
    let d = automaton_to_rmso(&a)?;
    let words = a.alphabet().words_up_to(cfg.maxlen.min(3));
    for w in &words {
        let expected = a.behavior(w)?;
        let actual = mk_eval(&d.sentence, a.alphabet(), w)?;
        if expected != actual {
            let note = if order_bites(&a, w)? {
                "assignments enumerated in nested subset order, paths in state order"
            } else {
                "assignment order matches path order"
            };
            return Ok(Trial::Found {
                instance: format!("{}# sentence: {}\n", write_mk(&a), d.sentence),
                word: a.alphabet().render_word(w),
                expected,
                actual,
                note: note.into(),
            });
        }
    }
    Ok(Trial::Clean(words.len()))
}

/// Compiled `⊕_X` sentences against the direct semantics.
pub(crate) fn probe_subset_order(cfg: &SweepConfig, rng: &mut SeededRng) -> Result<Trial> {
    let base = ab();
    let letters = vec!["a".to_string(), "b".to_string()];
    let set = Var::new("X");
    let scope = [set.clone()];
    let term = |rng: &mut SeededRng| {
        MkFormula::Times(
            Box::new(MkFormula::Bool(random_mso(rng, &letters, &scope, 2))),
            Box::new(MkFormula::Const(random::nonzero_truth(rng))),
        )
    };
    let body = MkFormula::Plus(Box::new(term(rng)), Box::new(term(rng)));
    let f = MkFormula::SumSo(set, Box::new(body));
    let a = rmso_to_automaton(&f, &[], &base)?;
    let words = base.words_up_to(cfg.maxlen.min(4));
    for w in &words {
        let expected = mk_eval(&f, &base, w)?;
        let actual = a.behavior(w)?;
        if expected != actual {
            let row = mk_eval_in(&f, &base, w, SubsetOrder::RowLetters)?;
            let pointwise = rmso_to_langexpr(&f, &[], &base)?.eval(w)?;
            let note = format!(
                "subset order {}; image fold order {} (row-letter order gives {row}, pointwise image {pointwise})",
                if row == expected { "agrees" } else { "bites" },
                if pointwise == actual { "agrees" } else { "bites" },
            );
            return Ok(Trial::Found {
                instance: f.to_string(),
                word: base.render_word(w),
                expected,
                actual,
                note,
            });
        }
    }
    Ok(Trial::Clean(words.len()))
}
