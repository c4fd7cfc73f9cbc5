use std::collections::BTreeSet;

use serde::Serialize;

use super::engine::{vertices_of, RankMemo};
use crate::error::{Error, Result};
use crate::structures::canon::{enumerate_structures, enumerate_structures_capped, ENUMERATION_CAP};
use crate::structures::{embeds, ClassOracle, FiniteStructure};

/// Whether every member of the class with at most `n` vertices embeds into
/// `x` as an induced substructure.
pub fn embeds_all_up_to(x: &FiniteStructure, oracle: ClassOracle, n: usize) -> Result<bool> {
    Ok(first_missing(x, oracle, n)?.is_none())
}

/// The first class member of size <= n (by size, then canonical order) that
/// does not embed into `x`.
pub fn first_missing(x: &FiniteStructure, oracle: ClassOracle, n: usize) -> Result<Option<FiniteStructure>> {
    for k in 0..=n {
        for a in enumerate_structures(x.signature(), &oracle, k, true)? {
            if !embeds(&a, x) {
                return Ok(Some(a));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntermediateReport {
    pub pass: bool,
    /// Every rank value attained by some subset.
    pub attained: Vec<usize>,
    /// `(F, rk(F), β)` with β < rk(F) not attained anywhere.
    pub counterexample: Option<(Vec<usize>, usize, usize)>,
}

/// Checks that below the rank of every subset, every smaller value is the
/// rank of some subset. Exhaustive over all subsets of the host.
pub fn check_intermediate_values(x: &FiniteStructure, oracle: ClassOracle) -> Result<IntermediateReport> {
    let mut memo = RankMemo::new(x.clone(), oracle)?;
    let n = x.size();
    if n > super::engine::DEFAULT_HOST_CAP {
        return Err(Error::resource(format!("{n} vertices is too many to scan every subset")));
    }
    let mut ranks = Vec::with_capacity(1 << n);
    for f in 0u64..1 << n {
        ranks.push(memo.rank_mask(f)?);
    }
    let attained: BTreeSet<usize> = ranks.iter().copied().collect();
    let mut counterexample = None;
    'outer: for (f, &alpha) in ranks.iter().enumerate() {
        for beta in 0..alpha {
            if !attained.contains(&beta) {
                counterexample = Some((vertices_of(f as u64), alpha, beta));
                break 'outer;
            }
        }
    }
    Ok(IntermediateReport {
        pass: counterexample.is_none(),
        attained: attained.into_iter().collect(),
        counterexample,
    })
}

/// `rk_X(F)` for a structure with unary predicates only: each round uses up
/// one vertex of the colour Player I names, so the rank is the smallest
/// colour-class count outside `F`.
pub fn unary_rank_check(x: &FiniteStructure, f: &[usize]) -> Result<usize> {
    let sig = x.signature();
    if !sig.relations().is_empty() {
        return Err(Error::input("unary rank check needs a signature without relations"));
    }
    let k = sig.unaries().len();
    if k >= 32 {
        return Err(Error::input("too many unary predicates"));
    }
    let mut counts = vec![0usize; 1 << k];
    for v in x.vertices().filter(|v| !f.contains(v)) {
        let pattern = x.unary_pattern(v);
        let code = pattern.iter().enumerate().fold(0usize, |c, (i, &b)| c | (b as usize) << i);
        counts[code] += 1;
    }
    Ok(counts.into_iter().min().unwrap_or(0))
}

/// A structure that contains every class member of size `covers` but has
/// rank below the target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub covers: usize,
    pub rank: usize,
    pub witness: FiniteStructure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniversalityReport {
    pub target_rank: usize,
    /// N(n) is at least this.
    pub lower_bound: usize,
    /// N(n) is at most this (size of the universal structure H_n).
    pub upper_bound: usize,
    /// True when the lower bound is shown to be the exact value.
    pub confirmed: bool,
    pub inconclusive: bool,
    pub max_size: usize,
    pub certificates: Vec<Counterexample>,
    pub notes: Vec<String>,
}

/// Bounds on the least N such that every graph containing all N-vertex
/// graphs has rank at least `target`.
///
/// For each candidate N the search looks for a counterexample among all
/// graphs with at most `max_size` vertices. A counterexample, if one exists
/// at all, can be shrunk to the union of one copy of each N-vertex graph
/// (rank can only drop on substructures), so once `max_size` reaches
/// N × (number of N-vertex graphs) an empty search proves N(target) <= N.
pub fn search_universality_number(
    oracle: ClassOracle,
    target: usize,
    max_size: usize,
) -> Result<UniversalityReport> {
    let signature = oracle
        .signature()
        .ok_or_else(|| Error::input("the search needs a class with a fixed signature"))?;
    let upper_bound = crate::constructions::hn_size(&oracle, target)?;
    let cap = max_size.max(ENUMERATION_CAP);
    let mut hosts: Vec<Vec<FiniteStructure>> = Vec::new();
    for size in 0..=max_size {
        hosts.push(enumerate_structures_capped(&signature, &oracle, size, true, cap)?);
    }
    let mut report = UniversalityReport {
        target_rank: target,
        lower_bound: 0,
        upper_bound,
        confirmed: false,
        inconclusive: false,
        max_size,
        certificates: Vec::new(),
        notes: Vec::new(),
    };
    for covers in 0..=upper_bound {
        let patterns = if covers <= cap { enumerate_structures_capped(&signature, &oracle, covers, true, cap)? } else {
            report.inconclusive = true;
            report.lower_bound = covers;
            report.notes.push(format!("cannot enumerate the {covers}-vertex members"));
            return Ok(report);
        };
        let found = find_counterexample(&hosts, &patterns, oracle, target)?;
        match found {
            Some((witness, rank)) => {
                report.certificates.push(Counterexample { covers, rank, witness });
            }
            None => {
                report.lower_bound = covers;
                let needed = covers * patterns.len();
                if max_size >= needed {
                    report.confirmed = true;
                    report.notes.push(format!(
                        "no counterexample up to {max_size} vertices, and any counterexample \
                         shrinks to at most {needed}"
                    ));
                } else {
                    report.inconclusive = true;
                    report.notes.push(format!(
                        "no counterexample up to {max_size} vertices; ruling one out needs \
                         hosts of up to {needed} vertices"
                    ));
                }
                return Ok(report);
            }
        }
    }
    // Every N up to |H_n| had a counterexample: impossible for a correct
    // engine, since H_n itself has rank n.
    Err(Error::input("found counterexamples past the universal bound; the engine is inconsistent"))
}

fn find_counterexample(
    hosts: &[Vec<FiniteStructure>],
    patterns: &[FiniteStructure],
    oracle: ClassOracle,
    target: usize,
) -> Result<Option<(FiniteStructure, usize)>> {
    for level in hosts {
        for x in level {
            if patterns.iter().all(|p| embeds(p, x)) {
                let rank = RankMemo::new(x.clone(), oracle)?.rank()?;
                if rank < target {
                    return Ok(Some((x.clone(), rank)));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank::engine::rank_subset;

    #[test]
    fn five_vertex_graph_embeds_all_triples() {
        let five = FiniteStructure::graph(5, &[(0, 1), (0, 2), (1, 2), (0, 3)]).unwrap();
        assert!(embeds_all_up_to(&five, ClassOracle::Graph, 3).unwrap());
        assert!(!embeds_all_up_to(&five, ClassOracle::Graph, 4).unwrap());
        let arc = FiniteStructure::digraph(2, &[(0, 1)]).unwrap();
        assert!(embeds_all_up_to(&arc, ClassOracle::Tournament, 2).unwrap());
    }

    #[test]
    fn intermediate_values_on_p3() {
        let p3 = FiniteStructure::graph(3, &[(0, 1), (1, 2)]).unwrap();
        let r = check_intermediate_values(&p3, ClassOracle::Graph).unwrap();
        assert!(r.pass);
        assert_eq!(r.attained, vec![0, 1, 2]);
        let empty = FiniteStructure::graph(0, &[]).unwrap();
        assert!(check_intermediate_values(&empty, ClassOracle::Graph).unwrap().pass);
    }

    #[test]
    fn unary_examples() {
        let x = FiniteStructure::colored(1, &[1, 1, 1, 0, 0, 0, 0, 0]).unwrap();
        assert_eq!(unary_rank_check(&x, &[]).unwrap(), 3);
        assert_eq!(rank_subset(&x, ClassOracle::UnaryOnly(1), &[]).unwrap(), 3);
        let pure = FiniteStructure::colored(0, &[0; 5]).unwrap();
        assert_eq!(unary_rank_check(&pure, &[1, 2]).unwrap(), 3);
        assert_eq!(unary_rank_check(&pure, &[0, 1, 2, 3, 4]).unwrap(), 0);
        assert!(unary_rank_check(&FiniteStructure::chain(2), &[]).is_err());
    }

    #[test]
    fn small_universality_numbers() {
        let r1 = search_universality_number(ClassOracle::Graph, 1, 2).unwrap();
        assert_eq!((r1.lower_bound, r1.confirmed), (1, true));
        let r2 = search_universality_number(ClassOracle::Graph, 2, 4).unwrap();
        assert_eq!((r2.lower_bound, r2.confirmed), (2, true));
        assert_eq!(r2.upper_bound, 3);
    }
}
