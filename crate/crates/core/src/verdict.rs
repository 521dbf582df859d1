//! Verdict types shared by the string, tree and graph deciders.

use std::fmt;

/// Which pairs count as witnesses against JEP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairMode {
    /// Both members must lie in the language.
    #[default]
    Bad,
    /// Any pair without a common member of the language above it.
    Semibad,
}

/// How a bad pair was certified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// `L ∩ Sup(x) ∩ Sup(y)` was shown empty by exhausting its reachable
    /// product states.
    ProductEmpty { states_explored: usize },
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::ProductEmpty { .. } => f.write_str("product-empty"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<T> {
    Jep,
    BadPair {
        x: T,
        y: T,
        certificate: Certificate,
    },
}

impl<T> Verdict<T> {
    pub fn is_jep(&self) -> bool {
        matches!(self, Verdict::Jep)
    }

    pub fn pair(&self) -> Option<(&T, &T)> {
        match self {
            Verdict::Jep => None,
            Verdict::BadPair { x, y, .. } => Some((x, y)),
        }
    }
}

/// Resource caps shared by the deciders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Cap on the number of enumerated walks or tree walks.
    pub max_walks: usize,
    /// Cap on reachable automaton states, walk families and candidates.
    pub max_states: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_walks: 1_000_000,
            max_states: 1_000_000,
        }
    }
}
