//! From formulas to automata: MSO formulas to deterministic automata over
//! `A_V`, and restricted weighted formulas to MK-fuzzy automata.

use std::collections::BTreeSet;
use std::fmt;

use super::syntax::{MkFormula, Mso};
use crate::alphabet::{Alphabet, Var};
use crate::constructs::{self as cx, StrictAlphabeticHom};
use crate::error::{Error, Result};
use crate::fclassic::{valid_assignments_dfa, Dfa};
use crate::kvalues::{conj, disj, TruthValue};
use crate::langops::LangExpr;
use crate::mkauto::{Builder, MkAutomaton};

fn sorted(vars: impl IntoIterator<Item = Var>) -> Vec<Var> {
    let set: BTreeSet<Var> = vars.into_iter().collect();
    set.into_iter().collect()
}

fn check_scope(free: &BTreeSet<Var>, vars: &[Var]) -> Result<()> {
    match free.iter().find(|v| !vars.contains(v)) {
        Some(v) => Err(Error::UnboundVariable(format!("{v} is free but not in V"))),
        None => Ok(()),
    }
}

/// Deterministic automaton over `A_V` (variables in sorted order)
/// recognizing the valid encodings `(w,σ)` with `(w,σ) ⊨ m`.
pub fn mso_to_dfa(m: &Mso, vars: &[Var], base: &Alphabet) -> Result<Dfa> {
    let vars = sorted(vars.iter().cloned());
    check_scope(&m.free_vars(), &vars)?;
    if !base.vars().is_empty() {
        return Err(Error::Precondition("the base alphabet must not carry variable rows".into()));
    }
    compile(m, &vars, base)
}

fn compile(m: &Mso, vars: &[Var], base: &Alphabet) -> Result<Dfa> {
    let al = Alphabet::extended(base, vars)?;
    let valid = valid_assignments_dfa(&al);
    let raw = match m {
        Mso::True => return Ok(valid.minimize()),
        Mso::Label(a, x) => {
            let x = x.clone();
            let a = a.clone();
            Dfa::explore(&al, false, |seen| *seen, |&seen, i| {
                let s = al.symbol(i);
                match s.bit(&x) {
                    Some(true) if seen || s.base() != a => None,
                    Some(true) => Some(true),
                    _ => Some(seen),
                }
            })
        }
        Mso::Le(x, y) if x == y => return Ok(valid.minimize()),
        Mso::Le(x, y) => {
            // 0: neither seen, 1: x seen, 2: y seen at or after x.
            Dfa::explore(&al, 0u8, |s| *s == 2, |&st, i| {
                let s = al.symbol(i);
                let (bx, by) = (s.bit(x) == Some(true), s.bit(y) == Some(true));
                match (st, bx, by) {
                    (0, true, true) => Some(2),
                    (0, true, false) => Some(1),
                    (0, false, true) => None,
                    (1, false, true) => Some(2),
                    (2, false, false) | (1, false, false) | (0, false, false) => Some(st),
                    _ => None,
                }
            })
        }
        Mso::In(x, set) => Dfa::explore(&al, false, |seen| *seen, |&seen, i| {
            let s = al.symbol(i);
            match s.bit(x) {
                Some(true) if seen || s.bit(set) != Some(true) => None,
                Some(true) => Some(true),
                _ => Some(seen),
            }
        }),
        Mso::Not(a) => compile(a, vars, base)?.complement(),
        Mso::Or(a, b) => compile(a, vars, base)?.union(&compile(b, vars, base)?)?,
        Mso::Exists(v, body) => {
            let (v, body) = if vars.contains(v) {
                // The bound variable shadows a free one; rename it apart.
                let mut taken = BTreeSet::new();
                body.all_vars(&mut taken);
                taken.extend(vars.iter().cloned());
                let mut i = 0;
                let fresh = loop {
                    let name = format!("{}{i}", v.name());
                    if !taken.contains(&Var::new(name.clone())) {
                        break Var::new(name);
                    }
                    i += 1;
                };
                (fresh.clone(), body.rename(v, &fresh))
            } else {
                (v.clone(), (**body).clone())
            };
            let inner_vars = sorted(vars.iter().cloned().chain([v.clone()]));
            let inner = compile(&body, &inner_vars, base)?;
            inner.project(&v)?.determinize().reindexed(&al)?
        }
    };
    Ok(raw.product(&valid)?.minimize())
}

/// A location inside a formula: child indices from the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub path: Vec<usize>,
    pub subformula: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path: Vec<String> = self.path.iter().map(usize::to_string).collect();
        write!(f, "at /{}: {} in `{}`", path.join("/"), self.message, self.subformula)
    }
}

/// The clauses `(X_i, k_i)` of a product body `⊕_i (x ∈ X_i → k_i)`, in
/// left-to-right order; `None` when the body has another shape.
pub fn product_clauses(x: &Var, body: &MkFormula) -> Option<Vec<(Var, TruthValue)>> {
    match body {
        MkFormula::Plus(a, b) => {
            let mut out = product_clauses(x, a)?;
            out.extend(product_clauses(x, b)?);
            Some(out)
        }
        MkFormula::Times(a, b) => match (&**a, &**b) {
            (MkFormula::Bool(Mso::In(y, set)), MkFormula::Const(k))
                if y == x && !set.is_first_order() =>
            {
                Some(vec![(set.clone(), k.clone())])
            }
            _ => None,
        },
        _ => None,
    }
}

/// Violations of the restricted fragment; empty means the formula is
/// restricted.
pub fn rmso_violations(f: &MkFormula) -> Vec<Violation> {
    let mut out = Vec::new();
    walk(f, &mut Vec::new(), &mut out);
    out
}

pub fn is_rmso(f: &MkFormula) -> bool {
    rmso_violations(f).is_empty()
}

fn walk(f: &MkFormula, path: &mut Vec<usize>, out: &mut Vec<Violation>) {
    let violation = |path: &[usize], message: String| Violation {
        path: path.to_vec(),
        subformula: f.to_string(),
        message,
    };
    let child = |i: usize, g: &MkFormula, path: &mut Vec<usize>, out: &mut Vec<Violation>| {
        path.push(i);
        walk(g, path, out);
        path.pop();
    };
    match f {
        MkFormula::Const(_) | MkFormula::Bool(_) => {}
        MkFormula::Plus(a, b) => {
            child(0, a, path, out);
            child(1, b, path, out);
        }
        MkFormula::Times(a, b) => {
            if a.as_bool().is_none() {
                out.push(violation(path, "left operand of (*) is not a boolean MSO formula".into()));
                child(0, a, path, out);
            }
            child(1, b, path, out);
        }
        MkFormula::SumFo(_, a) | MkFormula::SumSo(_, a) => child(0, a, path, out),
        MkFormula::ProdFo(x, body) => {
            if product_clauses(x, body).is_none() {
                out.push(violation(
                    path,
                    format!("body of prod {x} is not a (+)-combination of (x in X -> <k>) clauses"),
                ));
                child(0, body, path, out);
            }
        }
    }
}

fn extended(base: &Alphabet, vars: &BTreeSet<Var>) -> Result<Alphabet> {
    Alphabet::extended(base, &vars.iter().cloned().collect::<Vec<_>>())
}

/// The row-erasing homomorphism `A_V → A_U` for `U ⊆ V`.
fn erase_rows(base: &Alphabet, from: &BTreeSet<Var>, to: &BTreeSet<Var>) -> Result<StrictAlphabeticHom> {
    let source = extended(base, from)?;
    let target = extended(base, to)?;
    let map = source
        .symbols()
        .iter()
        .map(|s| {
            let kept = from.difference(to).fold(s.clone(), |acc, v| acc.without(v));
            target.index_of(&kept).expect("row subset")
        })
        .collect();
    StrictAlphabeticHom::new(source, target, map)
}

/// The one-state automaton of `⊗_x·⊕_i (x ∈ X_i → k_i)` over `A_{X_1..X_m}`:
/// letter `(a, r)` weighs `⊔_i (r(X_i) ⊓ k_i)` with `r(X_i) ∈ {𝟎, 𝟏}`.
pub fn product_automaton(base: &Alphabet, clauses: &[(Var, TruthValue)]) -> Result<MkAutomaton> {
    let vars: BTreeSet<Var> = clauses.iter().map(|(v, _)| v.clone()).collect();
    let al = extended(base, &vars)?;
    let mut b = Builder::new(&al);
    let q = b.state("q");
    b.initial(q, TruthValue::one()).final_state(q, TruthValue::one());
    for (i, s) in al.symbols().iter().enumerate() {
        let wt = clauses.iter().fold(TruthValue::zero(), |acc, (v, k)| {
            let r = TruthValue::from_bool(s.bit(v) == Some(true));
            disj(&acc, &conj(&r, k))
        });
        b.transition(q, i, q, wt);
    }
    Ok(b.build())
}

/// MK-fuzzy automaton over `A_V` (variables in sorted order) whose behavior
/// is `‖f‖_V`, built by structural induction. `⊕_x`/`⊕_X` go through the
/// homomorphic image of the row-erasing map with `(a, r[x=1]) < (a, r[x=0])`,
/// so their fold order is the construction's, not necessarily the
/// ascending order of the weighted semantics.
pub fn rmso_to_automaton(f: &MkFormula, vars: &[Var], base: &Alphabet) -> Result<MkAutomaton> {
    let violations = rmso_violations(f);
    if !violations.is_empty() {
        return Err(Error::NotRestricted(violations.iter().map(|v| v.to_string()).collect()));
    }
    let vars: BTreeSet<Var> = vars.iter().cloned().collect();
    check_scope(&f.free_vars(), &vars.iter().cloned().collect::<Vec<_>>())?;
    if !base.vars().is_empty() {
        return Err(Error::Precondition("the base alphabet must not carry variable rows".into()));
    }
    let a = compile_mk(f, base)?;
    cylinder(&a, &f.free_vars(), &vars, base)
}

fn cylinder(a: &MkAutomaton, from: &BTreeSet<Var>, to: &BTreeSet<Var>, base: &Alphabet) -> Result<MkAutomaton> {
    if from == to {
        return Ok(a.clone());
    }
    let h = erase_rows(base, to, from)?;
    let lifted = cx::inv_hom(a, &h)?;
    cx::conj_char(&valid_assignments_dfa(h.source()), &lifted)
}

fn compile_mk(f: &MkFormula, base: &Alphabet) -> Result<MkAutomaton> {
    let free = f.free_vars();
    let al = extended(base, &free)?;
    let valid = valid_assignments_dfa(&al);
    let free_list: Vec<Var> = free.iter().cloned().collect();
    match f {
        MkFormula::Const(k) => cx::conj_char(&valid, &cx::constant_automaton(&al, k)),
        MkFormula::Bool(m) => Ok(cx::char_automaton(&mso_to_dfa(m, &free_list, base)?).trim()),
        MkFormula::Plus(a, b) => {
            let x = cylinder(&compile_mk(a, base)?, &a.free_vars(), &free, base)?;
            let y = cylinder(&compile_mk(b, base)?, &b.free_vars(), &free, base)?;
            cx::disjunction(&x, &y)
        }
        MkFormula::Times(a, b) => {
            let m = a.as_bool().expect("restricted");
            let d = mso_to_dfa(m, &free_list, base)?;
            let y = cylinder(&compile_mk(b, base)?, &b.free_vars(), &free, base)?;
            cx::conj_char(&d, &y)
        }
        MkFormula::SumFo(v, body) | MkFormula::SumSo(v, body) => {
            let mut inner_vars = free.clone();
            inner_vars.insert(v.clone());
            let inner = cylinder(&compile_mk(body, base)?, &body.free_vars(), &inner_vars, base)?;
            let h = quantifier_hom(&al, v)?;
            cx::conj_char(&valid, &cx::hom_image(&inner, &h)?)
        }
        MkFormula::ProdFo(x, body) => {
            let clauses = product_clauses(x, body).expect("restricted");
            cx::conj_char(&valid, &product_automaton(base, &clauses)?)
        }
    }
}

/// `A_V ∪ {v} → A_V` with the source ordered by refining `A_V`.
fn quantifier_hom(al: &Alphabet, v: &Var) -> Result<StrictAlphabeticHom> {
    let source = al.extend(v)?;
    let (target, map) = source.erase(v)?;
    debug_assert!(target == *al);
    StrictAlphabeticHom::new(source, target, map)
}

/// The same induction as [`rmso_to_automaton`], with every construction
/// replaced by its pointwise definition. Differences between the two
/// isolate the fold order of the homomorphic image.
pub fn rmso_to_langexpr(f: &MkFormula, vars: &[Var], base: &Alphabet) -> Result<LangExpr> {
    let violations = rmso_violations(f);
    if !violations.is_empty() {
        return Err(Error::NotRestricted(violations.iter().map(|v| v.to_string()).collect()));
    }
    let vars: BTreeSet<Var> = vars.iter().cloned().collect();
    check_scope(&f.free_vars(), &vars.iter().cloned().collect::<Vec<_>>())?;
    let e = mirror(f, base)?;
    mirror_cylinder(e, &f.free_vars(), &vars, base)
}

fn mirror_cylinder(e: LangExpr, from: &BTreeSet<Var>, to: &BTreeSet<Var>, base: &Alphabet) -> Result<LangExpr> {
    if from == to {
        return Ok(e);
    }
    let h = erase_rows(base, to, from)?;
    let valid = valid_assignments_dfa(h.source());
    Ok(LangExpr::conj(LangExpr::CharOfDfa(valid), LangExpr::inv_hom(h, e)))
}

fn mirror(f: &MkFormula, base: &Alphabet) -> Result<LangExpr> {
    let free = f.free_vars();
    let al = extended(base, &free)?;
    let valid = || LangExpr::CharOfDfa(valid_assignments_dfa(&al));
    let free_list: Vec<Var> = free.iter().cloned().collect();
    Ok(match f {
        MkFormula::Const(k) => LangExpr::conj(valid(), LangExpr::Constant(al.clone(), k.clone())),
        MkFormula::Bool(m) => LangExpr::CharOfDfa(mso_to_dfa(m, &free_list, base)?),
        MkFormula::Plus(a, b) => LangExpr::disj(
            mirror_cylinder(mirror(a, base)?, &a.free_vars(), &free, base)?,
            mirror_cylinder(mirror(b, base)?, &b.free_vars(), &free, base)?,
        ),
        MkFormula::Times(a, b) => LangExpr::conj(
            LangExpr::CharOfDfa(mso_to_dfa(a.as_bool().expect("restricted"), &free_list, base)?),
            mirror_cylinder(mirror(b, base)?, &b.free_vars(), &free, base)?,
        ),
        MkFormula::SumFo(v, body) | MkFormula::SumSo(v, body) => {
            let mut inner_vars = free.clone();
            inner_vars.insert(v.clone());
            let inner = mirror_cylinder(mirror(body, base)?, &body.free_vars(), &inner_vars, base)?;
            LangExpr::conj(valid(), LangExpr::hom(quantifier_hom(&al, v)?, inner))
        }
        MkFormula::ProdFo(x, body) => {
            let clauses = product_clauses(x, body).expect("restricted");
            LangExpr::conj(valid(), LangExpr::Behavior(product_automaton(base, &clauses)?))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::super::semantics::{mk_eval, mso_satisfies};
    use super::super::syntax::{parse_mk, parse_mso};
    use super::*;
    use crate::mkauto::fixtures::k1;

    fn ab() -> Alphabet {
        Alphabet::from_letters(&["a", "b"]).unwrap()
    }

    #[test]
    fn true_accepts_valid_encodings() {
        let vars = [Var::new("x"), Var::new("X")];
        let d = mso_to_dfa(&Mso::True, &vars, &ab()).unwrap();
        let al = Alphabet::extended(&ab(), &vars).unwrap();
        assert!(d.equivalent(&valid_assignments_dfa(&al)).unwrap());
    }

    #[test]
    fn exists_label_is_words_containing_it() {
        let d = mso_to_dfa(&parse_mso("exists x . P_a(x)").unwrap(), &[], &ab()).unwrap();
        for w in ab().words_up_to(4) {
            assert_eq!(d.accepts(&w).unwrap(), w.contains(&0));
        }
    }

    #[test]
    fn agrees_with_satisfaction() {
        let vars = [Var::new("x"), Var::new("X")];
        let al = Alphabet::extended(&ab(), &vars).unwrap();
        for text in [
            "x in X",
            "exists y . (y <= x & !(x <= y) & y in X)",
            "forall y . (y in X -> P_a(y))",
            "exists X . (x in X)",
            "exists x . (x in X & last(x))",
            "succ(x, x)",
        ] {
            let m = parse_mso(text).unwrap();
            let d = mso_to_dfa(&m, &vars, &ab()).unwrap();
            for w in al.words_up_to(3) {
                assert_eq!(d.accepts(&w).unwrap(), mso_satisfies(&m, &al, &w).unwrap(), "{text} {w:?}");
            }
        }
    }

    #[test]
    fn rmso_check_locations() {
        let f = parse_mk("<1,0,0,0> (*) <1,0,0,0>").unwrap();
        let v = rmso_violations(&f);
        assert_eq!(v.len(), 1);
        assert!(v[0].path.is_empty());
        assert!(is_rmso(&parse_mk("(exists x . P_a(x)) (*) <1,0,0,0>").unwrap()));
        assert!(is_rmso(&parse_mk("prod x . ((x in X -> <1,0,0,0>) (+) (x in Y -> <0,1,0,0>))").unwrap()));
        let bad = parse_mk("sum X . (prod x . (x in X -> <1,0,0,0>) (+) <1,0,0,0>)").unwrap();
        assert_eq!(rmso_violations(&bad)[0].path, vec![0]);
        assert!(rmso_to_automaton(&f, &[], &ab()).is_err());
    }

    #[test]
    fn constant_sentence() {
        let a = rmso_to_automaton(&MkFormula::Const(k1()), &[], &ab()).unwrap();
        for w in ab().words_up_to(3) {
            assert_eq!(a.behavior(&w).unwrap(), k1());
        }
    }

    #[test]
    fn product_case_matches_semantics() {
        let f = parse_mk("prod x . ((x in X -> <0.3,0.2,0.4,0.1>) (+) (x in Y -> <0.9,0.05,0.03,0.02>))").unwrap();
        let vars = [Var::new("X"), Var::new("Y"), Var::new("z")];
        let a = rmso_to_automaton(&f, &vars, &ab()).unwrap();
        let al = Alphabet::extended(&ab(), &vars).unwrap();
        assert!(a.alphabet().same_symbols(&al));
        let a = a.with_alphabet(&al).unwrap();
        for w in al.words_up_to(3) {
            assert_eq!(a.behavior(&w).unwrap(), mk_eval(&f, &al, &w).unwrap(), "{w:?}");
        }
    }
}
