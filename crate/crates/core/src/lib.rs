//! Automata weighted over the truth-quadruple bimonoid K.

pub mod alphabet;
pub mod constructs;
pub mod error;
pub mod fclassic;
pub mod format;
pub mod harness;
pub mod kvalues;
pub mod langops;
pub mod mkauto;
pub mod mklogic;
pub mod random;

pub use alphabet::{Alphabet, Symbol, Var, Word};
pub use error::{Error, Result};
pub use kvalues::{conj, conj_fold, disj, disj_fold, parse_truth, TruthValue};
