use serde::Serialize;

use crate::error::{Error, Result};
use crate::structures::{free_amalgam, good_types, apply_type, ClassOracle, ExtensionType, FiniteStructure, Signature};
use crate::structures::types::DEFAULT_TYPE_BUDGET;

/// Default limit on the number of vertices a builder may produce.
pub const DEFAULT_BUILD_CAP: usize = 1 << 12;

/// Where a vertex of a layered construction came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// A layer-0 vertex carrying this unary pattern.
    Pattern(Vec<bool>),
    /// The vertex `v(x, T)` added over a transversal for a good type.
    Extension { transversal: Vec<usize>, type_index: usize, ty: ExtensionType },
    /// The tournament vertex `v_{j,s}`; `word` lists s(0), s(1), ...
    Word(String),
}

/// A structure with its layer partition `X_0, ..., X_{n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayeredStructure {
    pub base: FiniteStructure,
    pub layers: Vec<Vec<usize>>,
    pub provenance: Vec<Provenance>,
}

impl LayeredStructure {
    /// Layer index of every vertex.
    pub fn layer_of(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.base.size()];
        for (j, layer) in self.layers.iter().enumerate() {
            for &v in layer {
                out[v] = j;
            }
        }
        out
    }

    /// Checks that the layers partition the vertex set.
    pub fn check_partition(&self) -> Result<()> {
        let mut seen = vec![false; self.base.size()];
        for layer in &self.layers {
            for &v in layer {
                if v >= seen.len() || seen[v] {
                    return Err(Error::input(format!("vertex {v} is missing or repeated in the layers")));
                }
                seen[v] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::input("layers do not cover every vertex"));
        }
        Ok(())
    }

    /// The JSON document of the structure with its `layers` field filled in.
    pub fn to_json(&self) -> serde_json::Value {
        let mut doc = self.base.to_document();
        doc.layers = Some(self.layers.clone());
        serde_json::to_value(doc).expect("structure documents always serialize")
    }
}

/// Transversals `(x_0, ..., x_{j-1})` with `x_i` in layer `i`, in
/// lexicographic order of the layer lists.
pub fn transversals(layers: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for layer in layers {
        let mut next = Vec::with_capacity(out.len() * layer.len());
        for prefix in &out {
            for &v in layer {
                let mut t = prefix.clone();
                t.push(v);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

fn check_fap_fep(oracle: &ClassOracle) -> Result<()> {
    if oracle.has_fap_and_fep() {
        Ok(())
    } else {
        Err(Error::input(format!(
            "class `{oracle}` lacks free amalgamation or full extensions; use the tournament builder"
        )))
    }
}

/// |H_n| for the free-amalgamation construction over `signature`, or a
/// resource error when it overflows.
pub fn graph_hn_size(signature: &Signature, oracle: &ClassOracle, n: usize) -> Result<usize> {
    check_fap_fep(oracle)?;
    let overflow = || Error::resource(format!("|H_{n}| overflows"));
    let mut sizes: Vec<usize> = Vec::new();
    for j in 0..n {
        // Type counts depend only on the base size for these classes.
        let probe = FiniteStructure::empty(signature.clone(), j);
        let types = usize::try_from(oracle.count_good_types(&probe)?).map_err(|_| overflow())?;
        let transversals = sizes.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s)).ok_or_else(overflow)?;
        sizes.push(transversals.checked_mul(types).ok_or_else(overflow)?);
    }
    sizes.iter().try_fold(0usize, |acc, &s| acc.checked_add(s)).ok_or_else(overflow)
}

/// Size of the class's universal structure `H_n`: `2^n - 1` for
/// tournaments, the layered count for free-amalgamation classes.
pub fn hn_size(oracle: &ClassOracle, n: usize) -> Result<usize> {
    match oracle {
        ClassOracle::Tournament => {
            if n >= usize::BITS as usize {
                return Err(Error::resource(format!("|H_{n}| overflows")));
            }
            Ok((1usize << n) - 1)
        }
        _ => {
            let sig = oracle
                .signature()
                .ok_or_else(|| Error::input("the class needs a fixed signature"))?;
            graph_hn_size(&sig, oracle, n)
        }
    }
}

/// Builds `H_n` for a class with free amalgamation and full extensions.
///
/// Layer 0 has one vertex per unary pattern. Layer `j` has one fresh vertex
/// per transversal of the earlier layers and good type of that transversal,
/// attached by free amalgamation so that it relates only to its transversal.
/// Vertices are numbered layer by layer, then by transversal, then by type.
pub fn build_graph_hn(
    signature: &Signature,
    oracle: &ClassOracle,
    n: usize,
    cap: usize,
) -> Result<LayeredStructure> {
    check_fap_fep(oracle)?;
    oracle.check_signature(signature)?;
    let total = graph_hn_size(signature, oracle, n)?;
    if total > cap {
        return Err(Error::resource(format!(
            "H_{n} would have {total} vertices, above the cap of {cap}"
        )));
    }
    let mut h = FiniteStructure::empty(signature.clone(), 0);
    let mut layers: Vec<Vec<usize>> = Vec::new();
    let mut provenance = Vec::new();
    if n == 0 {
        return Ok(LayeredStructure { base: h, layers, provenance });
    }
    let k = signature.unaries().len();
    let mut first = Vec::new();
    for code in 0u64..1 << k {
        let v = h.size();
        h.grow(1);
        let pattern: Vec<bool> = (0..k).map(|u| code >> u & 1 == 1).collect();
        for (u, &flag) in pattern.iter().enumerate() {
            h.set_unary(u, v, flag)?;
        }
        first.push(v);
        provenance.push(Provenance::Pattern(pattern));
    }
    layers.push(first);
    for _ in 1..n {
        let mut layer = Vec::new();
        for x in transversals(&layers) {
            // Layers ascend by id, so induced order matches the transversal.
            let (base, _) = h.induced(&x)?;
            for (index, ty) in good_types(&base, oracle, DEFAULT_TYPE_BUDGET)?.into_iter().enumerate() {
                let g = apply_type(&base, &ty)?;
                let glue: Vec<(usize, usize)> = x.iter().copied().zip(0..x.len()).collect();
                let (next, map) = free_amalgam(&h, &g, &glue)?;
                h = next;
                layer.push(map[x.len()]);
                provenance.push(Provenance::Extension { transversal: x.clone(), type_index: index, ty });
            }
        }
        layers.push(layer);
    }
    Ok(LayeredStructure { base: h, layers, provenance })
}

/// The tournament `H_n` on binary strings of length < n.
///
/// `v_{j,s}` is vertex `2^j - 1 + s` with `s(0)` the most significant bit.
/// For `j > i`, `v_{j,s} -> v_{i,t}` iff `s(i) = 1`; within a layer,
/// `v_{j,s} -> v_{j,t}` iff `s <lex t`.
pub fn build_tournament_hn(n: usize) -> Result<LayeredStructure> {
    if n > 10 {
        return Err(Error::resource(format!(
            "tournament H_{n} would have {} vertices; the limit is n <= 10",
            (1u64 << n.min(63)) - 1
        )));
    }
    let size = (1usize << n) - 1;
    let id = |j: usize, s: usize| (1usize << j) - 1 + s;
    let bit = |j: usize, s: usize, i: usize| s >> (j - 1 - i) & 1 == 1;
    let mut arcs = Vec::new();
    for j in 0..n {
        for s in 0..1usize << j {
            for i in 0..j {
                for t in 0..1usize << i {
                    if bit(j, s, i) {
                        arcs.push((id(j, s), id(i, t)));
                    } else {
                        arcs.push((id(i, t), id(j, s)));
                    }
                }
            }
            for t in s + 1..1usize << j {
                arcs.push((id(j, s), id(j, t)));
            }
        }
    }
    let base = FiniteStructure::digraph(size, &arcs)?;
    let layers = (0..n).map(|j| (0..1usize << j).map(|s| id(j, s)).collect()).collect();
    let provenance = (0..n)
        .flat_map(|j| {
            (0..1usize << j).map(move |s| {
                Provenance::Word((0..j).map(|i| if bit(j, s, i) { '1' } else { '0' }).collect())
            })
        })
        .collect();
    Ok(LayeredStructure { base, layers, provenance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank::rank;

    #[test]
    fn graph_hn_sizes() {
        let g = Signature::graph();
        let sizes: Vec<usize> =
            (1..=4).map(|n| graph_hn_size(&g, &ClassOracle::Graph, n).unwrap()).collect();
        assert_eq!(sizes, vec![1, 3, 11, 139]);
        let h3 = build_graph_hn(&g, &ClassOracle::Graph, 3, DEFAULT_BUILD_CAP).unwrap();
        assert_eq!(h3.base.size(), 11);
        assert_eq!(h3.layers.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 2, 8]);
        h3.check_partition().unwrap();
    }

    #[test]
    fn graph_h2_shape() {
        let h2 = build_graph_hn(&Signature::graph(), &ClassOracle::Graph, 2, DEFAULT_BUILD_CAP).unwrap();
        // v, then its non-neighbour, then its neighbour
        assert_eq!(h2.base, FiniteStructure::graph(3, &[(0, 2)]).unwrap());
        assert_eq!(rank(&h2.base, ClassOracle::Graph).unwrap(), 2);
    }

    #[test]
    fn build_cap_reports_exact_size() {
        let err = build_graph_hn(&Signature::graph(), &ClassOracle::Graph, 5, 1000).unwrap_err();
        assert!(err.to_string().contains("32907"), "{err}");
        assert!(build_graph_hn(&Signature::graph(), &ClassOracle::Tournament, 2, 100).is_err());
    }

    #[test]
    fn unary_hn() {
        let sig = Signature::unary(2);
        let h = build_graph_hn(&sig, &ClassOracle::UnaryOnly(2), 2, DEFAULT_BUILD_CAP).unwrap();
        assert_eq!(h.base.size(), 4 + 16);
    }

    #[test]
    fn tournament_hn() {
        let h1 = build_tournament_hn(1).unwrap();
        assert_eq!(h1.base.size(), 1);
        let h2 = build_tournament_hn(2).unwrap();
        assert_eq!(h2.base, FiniteStructure::digraph(3, &[(0, 1), (1, 2), (2, 0)]).unwrap());
        for n in 1..=6 {
            let h = build_tournament_hn(n).unwrap();
            assert_eq!(h.base.size(), (1 << n) - 1);
            assert!(ClassOracle::Tournament.contains(&h.base));
            // H_n is the first n layers of H_{n+1}.
            let next = build_tournament_hn(n + 1).unwrap();
            let prefix: Vec<usize> = (0..h.base.size()).collect();
            assert_eq!(next.base.induced(&prefix).unwrap().0, h.base);
        }
        assert!(matches!(build_tournament_hn(11), Err(Error::Resource(_))));
        assert_eq!(h2.provenance[2], Provenance::Word("1".into()));
    }

    #[test]
    fn transversal_order() {
        let t = transversals(&[vec![0], vec![1, 2]]);
        assert_eq!(t, vec![vec![0, 1], vec![0, 2]]);
    }
}
