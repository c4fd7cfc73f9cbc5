use std::collections::BTreeSet;

use serde::Serialize;

use super::hn::{transversals, LayeredStructure};
use crate::error::Result;
use crate::structures::oracle::has_clique;
use crate::structures::types::DEFAULT_TYPE_BUDGET;
use crate::structures::{good_types, type_of_point, ClassOracle, ExtensionType};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverFailure {
    pub layer: usize,
    pub transversal: Vec<usize>,
    pub type_index: usize,
    pub ty: ExtensionType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverReport {
    pub pass: bool,
    /// Number of (layer, transversal, type) triples checked.
    pub checked: usize,
    pub failure: Option<CoverFailure>,
}

/// Checks that for every layer `j`, every transversal of the layers below
/// it and every good type of that transversal, some vertex of layer `j`
/// realizes the type over the transversal. Stops at the first failure.
pub fn certify_cover_property(l: &LayeredStructure, oracle: &ClassOracle) -> Result<CoverReport> {
    l.check_partition()?;
    let x = &l.base;
    let mut checked = 0;
    for j in 0..l.layers.len() {
        for t in transversals(&l.layers[..j]) {
            let mut sorted = t.clone();
            sorted.sort_unstable();
            let (base, _) = x.induced(&sorted)?;
            let realized: BTreeSet<ExtensionType> =
                l.layers[j].iter().map(|&z| type_of_point(x, &sorted, z)).collect();
            for (index, ty) in good_types(&base, oracle, DEFAULT_TYPE_BUDGET)?.into_iter().enumerate() {
                checked += 1;
                if !realized.contains(&ty) {
                    return Ok(CoverReport {
                        pass: false,
                        checked,
                        failure: Some(CoverFailure { layer: j, transversal: t, type_index: index, ty }),
                    });
                }
            }
        }
    }
    Ok(CoverReport { pass: true, checked, failure: None })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompleteReport {
    /// False for structures where every pair is related (tournaments).
    pub applicable: bool,
    pub pass: bool,
    pub method: String,
    /// A same-layer adjacent pair, or a complete set found by the cross-check.
    pub witness: Option<Vec<usize>>,
    pub cross_checked: bool,
}

/// Largest structure on which the layer argument is also cross-checked by
/// exhaustive clique search.
pub const COMPLETE_CROSS_CHECK_LIMIT: usize = 16;

/// Certifies that no `n+1` vertices are pairwise adjacent.
///
/// The certificate is the pigeonhole argument: there are at most `n` layers
/// and no two vertices of one layer are adjacent. It fails when the layers
/// do not support the argument, even if no large complete set exists.
pub fn certify_no_large_complete(l: &LayeredStructure, n: usize) -> Result<CompleteReport> {
    l.check_partition()?;
    let x = &l.base;
    let size = x.size();
    let adj = x.adjacency_matrix();
    let total_pairs = size * size.saturating_sub(1) / 2;
    let adjacent_pairs = (0..size).map(|u| (u + 1..size).filter(|&v| adj[u][v]).count()).sum::<usize>();
    if size >= 2 && adjacent_pairs == total_pairs {
        return Ok(CompleteReport {
            applicable: false,
            pass: false,
            method: "not applicable: every pair of vertices is related, as in a tournament, \
                     so the whole structure is complete"
                .into(),
            witness: None,
            cross_checked: false,
        });
    }
    let mut witness = None;
    let mut method = format!("layer pigeonhole over {} layers", l.layers.len());
    if l.layers.len() > n {
        method = format!("layer pigeonhole needs at most {n} layers, found {}", l.layers.len());
    } else {
        'outer: for layer in &l.layers {
            for (i, &u) in layer.iter().enumerate() {
                for &v in &layer[i + 1..] {
                    if adj[u][v] {
                        witness = Some(vec![u, v]);
                        method = "layer pigeonhole broken by a same-layer adjacency".into();
                        break 'outer;
                    }
                }
            }
        }
    }
    let argument_holds = l.layers.len() <= n && witness.is_none();
    let mut cross_checked = false;
    let mut clique_found = false;
    if size <= COMPLETE_CROSS_CHECK_LIMIT {
        cross_checked = true;
        clique_found = has_clique(&adj, n + 1);
        if clique_found && witness.is_none() {
            witness = find_clique(&adj, n + 1);
        }
    }
    Ok(CompleteReport {
        applicable: true,
        pass: argument_holds && !clique_found,
        method,
        witness,
        cross_checked,
    })
}

fn find_clique(adj: &[Vec<bool>], k: usize) -> Option<Vec<usize>> {
    fn go(adj: &[Vec<bool>], cand: &[usize], k: usize, cur: &mut Vec<usize>) -> bool {
        if cur.len() == k {
            return true;
        }
        for (i, &v) in cand.iter().enumerate() {
            let rest: Vec<usize> = cand[i + 1..].iter().copied().filter(|&w| adj[v][w]).collect();
            cur.push(v);
            if go(adj, &rest, k, cur) {
                return true;
            }
            cur.pop();
        }
        false
    }
    let all: Vec<usize> = (0..adj.len()).collect();
    let mut cur = Vec::new();
    go(adj, &all, k, &mut cur).then_some(cur)
}
