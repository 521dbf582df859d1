//! Decision procedures for the joint embedding property (JEP) of regular
//! languages of strings under the subsequence order and of regular languages
//! of rooted labeled binary trees under topological containment, with a
//! cograph front-end for P4-free hereditary graph classes.
//!
//! Every verdict carries a certificate that can be checked independently by
//! automaton product emptiness.

pub mod bits;
pub mod cographs;
pub mod dfa;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod sexpr;
pub mod string_jep;
pub mod tree_automata;
pub mod tree_jep;
pub mod trees;
pub mod verdict;

pub use error::{JepError, Result};
