//! One test per acceptance criterion; each prints a single pass/fail line.

use std::time::{Duration, Instant};

use mkfa_core::harness::{run_probe, run_suite, SweepConfig, VerifyReport};
use mkfa_core::langops::LangExpr;
use mkfa_core::{conj, disj, Alphabet, TruthValue};

fn tv(parts: [(i64, i64); 4]) -> TruthValue {
    TruthValue::from_ratios(parts).unwrap()
}

fn k1() -> TruthValue {
    tv([(3, 10), (1, 5), (2, 5), (1, 10)])
}

fn k2() -> TruthValue {
    tv([(9, 10), (1, 20), (3, 100), (1, 50)])
}

fn report(criterion: u32, ok: bool, detail: &str) {
    println!("criterion {criterion}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {criterion} failed: {detail}");
}

fn sweep(trials: usize, maxlen: usize) -> SweepConfig {
    SweepConfig {
        seed: 0,
        trials,
        maxlen,
        max_states: 4,
        max_letters: 3,
    }
}

fn summary(reports: &[VerifyReport]) -> String {
    reports
        .iter()
        .map(|r| format!("{} {}/{}", r.suite, r.checks - r.mismatches.len(), r.checks))
        .collect::<Vec<_>>()
        .join(", ")
}

#[test]
fn criterion_1_bimonoid_laws() {
    let start = Instant::now();
    let r = run_suite("bimonoid", &sweep(10_000, 5)).unwrap();
    let took = start.elapsed();
    let ok = r.passed() && took < Duration::from_secs(10);
    report(1, ok, &format!("{} checks on 10000 trials, {} mismatches, {took:.2?}", r.checks, r.mismatches.len()));
}

#[test]
fn criterion_2_witnesses() {
    let (a, b) = (k1(), k2());
    let inequalities = [
        disj(&a, &b) != disj(&b, &a),
        conj(&a, &b) != conj(&b, &a),
        disj(&a, &a) != a,
        conj(&a, &a) != a,
    ];
    let frozen = [
        disj(&a, &b) == tv([(21, 25), (1, 100), (19, 500), (14, 125)]),
        disj(&b, &a) == tv([(231, 250), (1, 100), (19, 500), (7, 250)]),
        conj(&a, &b) == tv([(27, 100), (47, 200), (381, 1000), (57, 500)]),
        conj(&b, &a) == tv([(27, 100), (59, 250), (381, 1000), (113, 1000)]),
        disj(&a, &a) == tv([(12, 25), (1, 25), (8, 25), (4, 25)]),
    ];

    let x = tv([(1, 10), (0, 1), (7, 10), (1, 5)]);
    let y = tv([(0, 1), (2, 5), (3, 10), (3, 10)]);
    let z = tv([(1, 10), (1, 5), (1, 5), (1, 2)]);
    let left = conj(&x, &disj(&y, &z));
    let right = disj(&conj(&x, &y), &conj(&x, &z));
    let left2 = disj(&x, &conj(&y, &z));
    let right2 = conj(&disj(&x, &y), &disj(&x, &z));
    let distributivity = [
        left == tv([(7, 1000), (8, 125), (209, 1000), (18, 25)]),
        right == tv([(7, 1250), (32, 625), (209, 1250), (97, 125)]),
        left != right,
        left2 == tv([(1, 10), (0, 1), (77, 200), (103, 200)]),
        right2 == tv([(17, 1000), (0, 1), (497, 2000), (1469, 2000)]),
        left2 != right2,
    ];

    let one = Alphabet::from_letters(&["a"]).unwrap();
    let piece = || {
        LangExpr::disj(
            LangExpr::scalar_right(LangExpr::WordIndicator(one.clone(), vec![]), k1()),
            LangExpr::scalar_right(LangExpr::WordIndicator(one.clone(), vec![0]), k1()),
        )
    };
    let rs_t = LangExpr::cauchy(LangExpr::cauchy(piece(), piece()), piece()).eval(&[0]).unwrap();
    let r_st = LangExpr::cauchy(piece(), LangExpr::cauchy(piece(), piece())).eval(&[0]).unwrap();
    let rs_t_frozen = TruthValue::from_ratios([
        (1560573, 25000000),
        (1277427, 12500000),
        (1090529, 3125000),
        (12160341, 25000000),
    ])
    .unwrap();
    let r_st_frozen = TruthValue::from_ratios([
        (1610523, 25000000),
        (1538037, 12500000),
        (568767, 1562500),
        (11213131, 25000000),
    ])
    .unwrap();
    let cauchy = [rs_t == rs_t_frozen, r_st == r_st_frozen, rs_t != r_st];

    let ok = inequalities.iter().chain(&frozen).chain(&distributivity).chain(&cauchy).all(|b| *b);
    report(
        2,
        ok,
        &format!(
            "non-commutativity and non-idempotence {:?}, distributivity {:?}, cauchy {:?}",
            inequalities, distributivity, cauchy
        ),
    );
}

#[test]
fn criterion_3_construction_sweeps() {
    let start = Instant::now();
    let mut reports = Vec::new();
    for suite in [
        "char",
        "disjunction",
        "conj_char",
        "inv_hom",
        "scalar_right",
        "scalar_right_normalized",
        "normalize",
        "in_ter_one",
        "strong_support",
    ] {
        reports.push(run_suite(suite, &sweep(100, 5)).unwrap());
    }
    reports.push(run_suite("cauchy", &sweep(100, 4)).unwrap());
    let took = start.elapsed();
    let ok = reports.iter().all(VerifyReport::passed) && took < Duration::from_secs(300);
    report(3, ok, &format!("{}; {took:.2?}", summary(&reports)));
}

#[test]
fn criterion_4_hom_image_multisets() {
    let r = run_suite("hom_image", &sweep(100, 5)).unwrap();
    let probe = run_probe("hom-order", &sweep(100, 5), 10_000).unwrap();
    report(
        4,
        r.passed(),
        &format!(
            "{}; fold order probe: {}",
            summary(std::slice::from_ref(&r)),
            if probe.found() { "counterexample reported" } else { "no counterexample" }
        ),
    );
}

#[test]
fn criterion_5_nivat() {
    let r = run_suite("nivat", &sweep(100, 4)).unwrap();
    report(5, r.passed(), &format!("{}; {} notes", summary(std::slice::from_ref(&r)), r.notes.len()));
}

#[test]
fn criterion_6_logic() {
    let mso = run_suite("mso", &sweep(100, 3)).unwrap();
    let rmso = run_suite("rmso", &sweep(100, 4)).unwrap();
    let ok = mso.passed() && rmso.passed();
    let notes = rmso.notes.join("; ");
    report(6, ok, &format!("{}; {notes}", summary(&[mso, rmso])));
}

#[test]
fn criterion_7_automaton_to_sentence() {
    let start = Instant::now();
    let r = run_suite("recdef", &SweepConfig { trials: 20, maxlen: 3, ..sweep(20, 3) }).unwrap();
    let took = start.elapsed();
    let ok = r.passed() && took < Duration::from_secs(600);
    report(7, ok, &format!("{}; {}; {took:.2?}", summary(std::slice::from_ref(&r)), r.notes.join("; ")));
}

#[test]
fn criterion_8_scalar_left_probe() {
    let out = run_probe("scalar-left", &SweepConfig { seed: 1, ..SweepConfig::default() }, 1000).unwrap();
    let ok = match &out.counterexample {
        Some(r) => {
            r.note.starts_with("dead word")
                && r.note.contains(&format!("= {} matches", r.expected))
                && r.expected != r.actual
        }
        None => false,
    };
    let detail = match &out.counterexample {
        Some(r) => format!("trial {} word {}: definition {} vs construction {}", r.trial, r.word, r.expected, r.actual),
        None => format!("no counterexample in {} trials", out.trials_run),
    };
    report(8, ok, &detail);
}
