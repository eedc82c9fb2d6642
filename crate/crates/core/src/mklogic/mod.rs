//! MK-fuzzy MSO logic: syntax, direct semantics, and the translations
//! between restricted sentences and automata.

pub mod checks;
pub mod compile;
pub mod decompile;
pub mod semantics;
pub mod syntax;

pub use compile::{
    is_rmso, mso_to_dfa, rmso_to_automaton, rmso_to_langexpr, rmso_violations, Violation,
};
pub use decompile::{automaton_to_rmso, Decompiled};
pub use semantics::{mk_eval, mk_eval_in, models, mso_satisfies, Assignment, SubsetOrder};
pub use syntax::{parse_mk, parse_mso, MkFormula, Mso};
