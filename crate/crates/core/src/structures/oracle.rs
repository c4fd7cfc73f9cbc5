use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::signature::Signature;
use super::structure::FiniteStructure;
use super::types::{apply_type, enumerate_general_types, DEFAULT_TYPE_BUDGET};
use crate::error::{Error, Result};

/// Membership test for a hereditary, isomorphism-closed class of finite
/// structures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassOracle {
    /// Every structure in the given language (tuples are irreflexive by
    /// construction).
    AllIrreflexive,
    /// Simple graphs on a symmetric relation `E`.
    Graph,
    /// Graphs with no clique of the given size.
    KnFreeGraph(usize),
    Tournament,
    LinearOrder,
    PartialOrder,
    /// Sets carrying the given number of unary predicates.
    UnaryOnly(usize),
}

impl ClassOracle {
    /// The language a class lives in, or `None` when any language is allowed.
    pub fn signature(&self) -> Option<Signature> {
        match self {
            ClassOracle::AllIrreflexive => None,
            ClassOracle::Graph | ClassOracle::KnFreeGraph(_) | ClassOracle::Tournament => {
                Some(Signature::graph())
            }
            ClassOracle::LinearOrder | ClassOracle::PartialOrder => Some(Signature::order()),
            ClassOracle::UnaryOnly(k) => Some(Signature::unary(*k)),
        }
    }

    /// Checks the language shape the class expects. Relation names are not
    /// significant, only arities.
    pub fn accepts_signature(&self, sig: &Signature) -> bool {
        match self {
            ClassOracle::AllIrreflexive => true,
            ClassOracle::UnaryOnly(k) => sig.relations().is_empty() && sig.unaries().len() == *k,
            _ => sig.is_single_binary(),
        }
    }

    pub fn check_signature(&self, sig: &Signature) -> Result<()> {
        if self.accepts_signature(sig) {
            Ok(())
        } else {
            Err(Error::input(format!("signature does not fit the class `{self}`")))
        }
    }

    /// Membership test.
    pub fn contains(&self, x: &FiniteStructure) -> bool {
        if !self.accepts_signature(x.signature()) {
            return false;
        }
        let n = x.size();
        match self {
            ClassOracle::AllIrreflexive | ClassOracle::UnaryOnly(_) => true,
            ClassOracle::Graph => is_symmetric(x),
            ClassOracle::KnFreeGraph(k) => {
                is_symmetric(x) && !has_clique(&x.adjacency_matrix(), *k)
            }
            ClassOracle::Tournament => (0..n).all(|u| {
                (u + 1..n).all(|v| x.arc(u, v) != x.arc(v, u))
            }),
            ClassOracle::LinearOrder => {
                is_strict_partial_order(x)
                    && (0..n).all(|u| (u + 1..n).all(|v| x.arc(u, v) || x.arc(v, u)))
            }
            ClassOracle::PartialOrder => is_strict_partial_order(x),
        }
    }

    /// Number of good one-point extension types of `base`, saturating at
    /// `u64::MAX`.
    pub fn count_good_types(&self, base: &FiniteStructure) -> Result<u64> {
        let m = base.size();
        match self {
            ClassOracle::Graph | ClassOracle::Tournament => Ok(pow2(m as u64)),
            ClassOracle::LinearOrder => Ok(m as u64 + 1),
            ClassOracle::UnaryOnly(k) => Ok(pow2(*k as u64)),
            ClassOracle::AllIrreflexive => {
                let sig = base.signature();
                let mut bits = sig.unaries().len() as u64;
                for rel in sig.relations() {
                    bits = bits.saturating_add(
                        (rel.arity as u64).saturating_mul(falling(m as u64, rel.arity as u64 - 1)),
                    );
                }
                Ok(pow2(bits))
            }
            ClassOracle::KnFreeGraph(k) => {
                if m > 24 {
                    return Err(Error::resource(format!(
                        "counting clique-free neighbourhoods of a {m}-vertex base"
                    )));
                }
                if *k == 0 {
                    return Ok(0);
                }
                let adj = base.adjacency_matrix();
                let mut count = 0u64;
                for mask in 0u32..(1u32 << m) {
                    let subset: Vec<usize> = (0..m).filter(|&v| mask >> v & 1 == 1).collect();
                    if !has_clique_within(&adj, &subset, k - 1) {
                        count += 1;
                    }
                }
                Ok(count)
            }
            ClassOracle::PartialOrder => {
                let mut count = 0u64;
                for ty in enumerate_general_types(base, DEFAULT_TYPE_BUDGET)? {
                    if self.contains(&apply_type(base, &ty)?) {
                        count += 1;
                    }
                }
                Ok(count)
            }
        }
    }

    /// Whether the class is known to have free amalgamation and the full
    /// extension property.
    pub fn has_fap_and_fep(&self) -> bool {
        matches!(self, ClassOracle::AllIrreflexive | ClassOracle::Graph | ClassOracle::UnaryOnly(_))
    }
}

impl fmt::Display for ClassOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassOracle::AllIrreflexive => write!(f, "all-irreflexive"),
            ClassOracle::Graph => write!(f, "graph"),
            ClassOracle::KnFreeGraph(k) => write!(f, "k{k}-free"),
            ClassOracle::Tournament => write!(f, "tournament"),
            ClassOracle::LinearOrder => write!(f, "linear-order"),
            ClassOracle::PartialOrder => write!(f, "partial-order"),
            ClassOracle::UnaryOnly(k) => write!(f, "unary:{k}"),
        }
    }
}

impl FromStr for ClassOracle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let parsed = match lower.as_str() {
            "all-irreflexive" | "irreflexive" | "digraph" => Some(ClassOracle::AllIrreflexive),
            "graph" => Some(ClassOracle::Graph),
            "tournament" => Some(ClassOracle::Tournament),
            "linear-order" | "order" => Some(ClassOracle::LinearOrder),
            "partial-order" | "poset" => Some(ClassOracle::PartialOrder),
            other => {
                if let Some(k) = other.strip_prefix("unary:") {
                    k.parse().ok().map(ClassOracle::UnaryOnly)
                } else if let Some(k) = other.strip_prefix('k').and_then(|r| r.strip_suffix("-free")) {
                    // K1-free graphs are empty; every class must allow one vertex.
                    k.parse().ok().filter(|&k| k >= 2).map(ClassOracle::KnFreeGraph)
                } else {
                    None
                }
            }
        };
        parsed.ok_or_else(|| {
            Error::input(format!(
                "unknown class `{s}` (expected graph, tournament, linear-order, partial-order, \
                 all-irreflexive, k<n>-free or unary:<k>)"
            ))
        })
    }
}

fn pow2(bits: u64) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        1u64 << bits
    }
}

/// m * (m-1) * ... * (m-k+1), saturating.
fn falling(m: u64, k: u64) -> u64 {
    if k > m {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(m - i))
}

fn is_symmetric(x: &FiniteStructure) -> bool {
    x.tuples(0).iter().all(|t| x.arc(t[1], t[0]))
}

fn is_strict_partial_order(x: &FiniteStructure) -> bool {
    let n = x.size();
    let antisymmetric = x.tuples(0).iter().all(|t| !x.arc(t[1], t[0]));
    antisymmetric
        && (0..n).all(|a| {
            (0..n).all(|b| !x.arc(a, b) || (0..n).all(|c| !x.arc(b, c) || x.arc(a, c)))
        })
}

/// Whether the symmetric adjacency matrix contains a clique on `k` vertices.
pub(crate) fn has_clique(adj: &[Vec<bool>], k: usize) -> bool {
    let all: Vec<usize> = (0..adj.len()).collect();
    has_clique_within(adj, &all, k)
}

pub(crate) fn has_clique_within(adj: &[Vec<bool>], candidates: &[usize], k: usize) -> bool {
    fn extend(adj: &[Vec<bool>], candidates: &[usize], need: usize) -> bool {
        if need == 0 {
            return true;
        }
        if candidates.len() < need {
            return false;
        }
        for (i, &v) in candidates.iter().enumerate() {
            let rest: Vec<usize> = candidates[i + 1..].iter().copied().filter(|&w| adj[v][w]).collect();
            if extend(adj, &rest, need - 1) {
                return true;
            }
        }
        false
    }
    extend(adj, candidates, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_class_names() {
        assert_eq!("graph".parse::<ClassOracle>().unwrap(), ClassOracle::Graph);
        assert_eq!("k3-free".parse::<ClassOracle>().unwrap(), ClassOracle::KnFreeGraph(3));
        assert!("k1-free".parse::<ClassOracle>().is_err());
        assert_eq!("unary:2".parse::<ClassOracle>().unwrap(), ClassOracle::UnaryOnly(2));
        assert!("hypergraph".parse::<ClassOracle>().is_err());
        for c in [
            ClassOracle::AllIrreflexive,
            ClassOracle::Graph,
            ClassOracle::KnFreeGraph(4),
            ClassOracle::Tournament,
            ClassOracle::LinearOrder,
            ClassOracle::PartialOrder,
            ClassOracle::UnaryOnly(3),
        ] {
            assert_eq!(c.to_string().parse::<ClassOracle>().unwrap(), c);
        }
    }

    #[test]
    fn membership() {
        let p3 = FiniteStructure::graph(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(ClassOracle::Graph.contains(&p3));
        assert!(ClassOracle::KnFreeGraph(3).contains(&p3));
        let k3 = FiniteStructure::graph(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(!ClassOracle::KnFreeGraph(3).contains(&k3));

        let arc = FiniteStructure::digraph(2, &[(0, 1)]).unwrap();
        assert!(!ClassOracle::Graph.contains(&arc));
        assert!(ClassOracle::Tournament.contains(&arc));
        assert!(ClassOracle::LinearOrder.contains(&FiniteStructure::chain(4)));
        assert!(ClassOracle::PartialOrder.contains(&FiniteStructure::chain(4)));

        let cycle = FiniteStructure::digraph(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(ClassOracle::Tournament.contains(&cycle));
        assert!(!ClassOracle::LinearOrder.contains(&cycle));
        assert!(!ClassOracle::PartialOrder.contains(&cycle));

        let antichain = FiniteStructure::empty(Signature::order(), 3);
        assert!(ClassOracle::PartialOrder.contains(&antichain));
        assert!(!ClassOracle::LinearOrder.contains(&antichain));
    }

    #[test]
    fn good_type_counts() {
        let k2 = FiniteStructure::graph(2, &[(0, 1)]).unwrap();
        assert_eq!(ClassOracle::Graph.count_good_types(&k2).unwrap(), 4);
        // Only the neighbourhood {0,1} would close a triangle.
        assert_eq!(ClassOracle::KnFreeGraph(3).count_good_types(&k2).unwrap(), 3);
        assert_eq!(ClassOracle::LinearOrder.count_good_types(&FiniteStructure::chain(5)).unwrap(), 6);
        let digraph2 = FiniteStructure::empty(Signature::graph(), 2);
        assert_eq!(ClassOracle::AllIrreflexive.count_good_types(&digraph2).unwrap(), 16);
        // A point over a 2-chain: below, between, above, or incomparable to
        // both, or above only the bottom / below only the top.
        let two = FiniteStructure::chain(2);
        assert_eq!(ClassOracle::PartialOrder.count_good_types(&two).unwrap(), 6);
    }
}
