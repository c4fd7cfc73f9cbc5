use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::signature::Signature;
use crate::error::{Error, Result};

/// A finite relational structure on the vertices `0..size`.
///
/// Tuples are stored fully oriented, so a graph edge `{u, v}` is the pair of
/// tuples `(u, v)` and `(v, u)`. Every tuple of a relation has pairwise
/// distinct entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteStructure {
    signature: Signature,
    size: usize,
    tuples: Vec<BTreeSet<Vec<usize>>>,
    unary: Vec<BTreeSet<usize>>,
}

impl FiniteStructure {
    /// The structure on `size` vertices with no tuples and no unary flags.
    pub fn empty(signature: Signature, size: usize) -> Self {
        let tuples = vec![BTreeSet::new(); signature.relations().len()];
        let unary = vec![BTreeSet::new(); signature.unaries().len()];
        FiniteStructure {
            signature,
            size,
            tuples,
            unary,
        }
    }

    pub fn from_parts(
        signature: Signature,
        size: usize,
        tuples: Vec<BTreeSet<Vec<usize>>>,
        unary: Vec<BTreeSet<usize>>,
    ) -> Result<Self> {
        if tuples.len() != signature.relations().len() || unary.len() != signature.unaries().len()
        {
            return Err(Error::input("tuple/unary tables do not match the signature"));
        }
        let mut out = FiniteStructure::empty(signature, size);
        for (rel, set) in tuples.into_iter().enumerate() {
            for t in set {
                out.insert(rel, t)?;
            }
        }
        for (u, set) in unary.into_iter().enumerate() {
            for v in set {
                out.set_unary(u, v, true)?;
            }
        }
        Ok(out)
    }

    /// A simple graph; each edge is stored in both orientations.
    pub fn graph(size: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = FiniteStructure::empty(Signature::graph(), size);
        for &(u, v) in edges {
            g.insert(0, vec![u, v])?;
            g.insert(0, vec![v, u])?;
        }
        Ok(g)
    }

    /// A directed graph on relation `E` with the given arcs.
    pub fn digraph(size: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        let mut g = FiniteStructure::empty(Signature::graph(), size);
        for &(u, v) in arcs {
            g.insert(0, vec![u, v])?;
        }
        Ok(g)
    }

    /// The chain `0 < 1 < ... < size-1`.
    pub fn chain(size: usize) -> Self {
        let mut c = FiniteStructure::empty(Signature::order(), size);
        for i in 0..size {
            for j in i + 1..size {
                c.tuples[0].insert(vec![i, j]);
            }
        }
        c
    }

    /// A structure over `k` unary predicates where vertex `v` carries the
    /// predicates whose bits are set in `colors[v]`.
    pub fn colored(k: usize, colors: &[u32]) -> Result<Self> {
        let mut x = FiniteStructure::empty(Signature::unary(k), colors.len());
        for (v, &c) in colors.iter().enumerate() {
            if k < 32 && c >> k != 0 {
                return Err(Error::input(format!("color {c} uses more than {k} predicates")));
            }
            for u in 0..k {
                if c >> u & 1 == 1 {
                    x.unary[u].insert(v);
                }
            }
        }
        Ok(x)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    pub fn tuples(&self, relation: usize) -> &BTreeSet<Vec<usize>> {
        &self.tuples[relation]
    }

    pub fn has_tuple(&self, relation: usize, tuple: &[usize]) -> bool {
        self.tuples[relation].contains(tuple)
    }

    pub fn unary_set(&self, unary: usize) -> &BTreeSet<usize> {
        &self.unary[unary]
    }

    pub fn has_unary(&self, unary: usize, v: usize) -> bool {
        self.unary[unary].contains(&v)
    }

    /// The unary pattern of `v` as a bit vector, predicate 0 first.
    pub fn unary_pattern(&self, v: usize) -> Vec<bool> {
        self.unary.iter().map(|set| set.contains(&v)).collect()
    }

    /// Total number of stored tuples across all relations.
    pub fn tuple_count(&self) -> usize {
        self.tuples.iter().map(BTreeSet::len).sum()
    }

    /// Adds a tuple, validating arity, range and distinctness. Returns whether
    /// the tuple was new.
    pub fn insert(&mut self, relation: usize, tuple: Vec<usize>) -> Result<bool> {
        let Some(rel) = self.signature.relations().get(relation) else {
            return Err(Error::input(format!("no relation with index {relation}")));
        };
        if tuple.len() != rel.arity {
            return Err(Error::input(format!(
                "tuple {tuple:?} for `{}` has length {}, expected {}",
                rel.name,
                tuple.len(),
                rel.arity
            )));
        }
        if let Some(&v) = tuple.iter().find(|&&v| v >= self.size) {
            return Err(Error::input(format!(
                "vertex {v} out of range for a structure of size {}",
                self.size
            )));
        }
        for (i, a) in tuple.iter().enumerate() {
            if tuple[i + 1..].contains(a) {
                return Err(Error::input(format!(
                    "tuple {tuple:?} for `{}` repeats vertex {a}",
                    rel.name
                )));
            }
        }
        Ok(self.tuples[relation].insert(tuple))
    }

    pub fn set_unary(&mut self, unary: usize, v: usize, flag: bool) -> Result<()> {
        if unary >= self.unary.len() {
            return Err(Error::input(format!("no unary predicate with index {unary}")));
        }
        if v >= self.size {
            return Err(Error::input(format!("vertex {v} out of range")));
        }
        if flag {
            self.unary[unary].insert(v);
        } else {
            self.unary[unary].remove(&v);
        }
        Ok(())
    }

    /// Appends `count` isolated, unflagged vertices.
    pub fn grow(&mut self, count: usize) {
        self.size += count;
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.size {
            return Err(Error::input(format!(
                "vertex {v} out of range for a structure of size {}",
                self.size
            )));
        }
        Ok(())
    }

    /// The substructure induced on `subset`, relabeled `0..` by ascending
    /// original id. The second component maps new ids to original ids.
    pub fn induced(&self, subset: &[usize]) -> Result<(FiniteStructure, Vec<usize>)> {
        let mut keep: Vec<usize> = subset.to_vec();
        keep.sort_unstable();
        keep.dedup();
        for &v in &keep {
            self.check_vertex(v)?;
        }
        let mut index = vec![usize::MAX; self.size];
        for (new, &old) in keep.iter().enumerate() {
            index[old] = new;
        }
        let mut out = FiniteStructure::empty(self.signature.clone(), keep.len());
        for (rel, set) in self.tuples.iter().enumerate() {
            for t in set {
                if t.iter().all(|&v| index[v] != usize::MAX) {
                    out.tuples[rel].insert(t.iter().map(|&v| index[v]).collect());
                }
            }
        }
        for (u, set) in self.unary.iter().enumerate() {
            for &v in set {
                if index[v] != usize::MAX {
                    out.unary[u].insert(index[v]);
                }
            }
        }
        Ok((out, keep))
    }

    /// Reorders the vertices: new vertex `p` is old vertex `order[p]`.
    pub fn permuted(&self, order: &[usize]) -> Result<FiniteStructure> {
        if order.len() != self.size {
            return Err(Error::input("permutation has the wrong length"));
        }
        let mut inverse = vec![usize::MAX; self.size];
        for (p, &v) in order.iter().enumerate() {
            self.check_vertex(v)?;
            if inverse[v] != usize::MAX {
                return Err(Error::input(format!("vertex {v} repeated in permutation")));
            }
            inverse[v] = p;
        }
        Ok(self.map_vertices(&inverse, self.size))
    }

    /// Copies every tuple through `map` into a structure of size `size`.
    /// `map` must be injective on the vertices it is applied to.
    pub(crate) fn map_vertices(&self, map: &[usize], size: usize) -> FiniteStructure {
        let mut out = FiniteStructure::empty(self.signature.clone(), size);
        for (rel, set) in self.tuples.iter().enumerate() {
            for t in set {
                out.tuples[rel].insert(t.iter().map(|&v| map[v]).collect());
            }
        }
        for (u, set) in self.unary.iter().enumerate() {
            for &v in set {
                out.unary[u].insert(map[v]);
            }
        }
        out
    }

    /// Every tuple reversed. For an order this is the reverse order.
    pub fn reversed(&self) -> FiniteStructure {
        let mut out = FiniteStructure::empty(self.signature.clone(), self.size);
        for (rel, set) in self.tuples.iter().enumerate() {
            for t in set {
                let mut r = t.clone();
                r.reverse();
                out.tuples[rel].insert(r);
            }
        }
        out.unary = self.unary.clone();
        out
    }

    /// Whether some tuple of some relation contains both `x` and `y`.
    pub fn adjacent(&self, x: usize, y: usize) -> Result<bool> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        if x == y {
            return Err(Error::input("adjacency is only defined for distinct vertices"));
        }
        Ok(self
            .tuples
            .iter()
            .any(|set| set.iter().any(|t| t.contains(&x) && t.contains(&y))))
    }

    /// Symmetric adjacency matrix: `m[x][y]` iff `x` and `y` share a tuple.
    pub fn adjacency_matrix(&self) -> Vec<Vec<bool>> {
        let mut m = vec![vec![false; self.size]; self.size];
        for set in &self.tuples {
            for t in set {
                for &a in t {
                    for &b in t {
                        if a != b {
                            m[a][b] = true;
                        }
                    }
                }
            }
        }
        m
    }

    /// Whether every two distinct vertices of `subset` are adjacent.
    pub fn is_complete(&self, subset: &[usize]) -> Result<bool> {
        for &v in subset {
            self.check_vertex(v)?;
        }
        let adj = self.adjacency_matrix();
        Ok(subset
            .iter()
            .enumerate()
            .all(|(i, &a)| subset[i + 1..].iter().all(|&b| a == b || adj[a][b])))
    }

    /// For each vertex, the `(relation, tuple)` pairs it occurs in.
    pub fn incidence(&self) -> Vec<Vec<(usize, &[usize])>> {
        let mut inc = vec![Vec::new(); self.size];
        for (rel, set) in self.tuples.iter().enumerate() {
            for t in set {
                for &v in t {
                    inc[v].push((rel, t.as_slice()));
                }
            }
        }
        inc
    }

    /// The JSON interchange document for this structure.
    pub fn to_document(&self) -> StructureDocument {
        let tuples = self
            .signature
            .relations()
            .iter()
            .zip(&self.tuples)
            .map(|(rel, set)| (rel.name.clone(), set.iter().cloned().collect()))
            .collect();
        let unary_flags = self
            .signature
            .unaries()
            .iter()
            .zip(&self.unary)
            .map(|(name, set)| (name.clone(), set.iter().copied().collect()))
            .collect();
        StructureDocument {
            signature: self.signature.clone(),
            size: self.size,
            tuples,
            unary_flags,
            layers: None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_document()).expect("structure documents always serialize")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: StructureDocument =
            serde_json::from_str(text).map_err(|e| Error::input(format!("bad structure JSON: {e}")))?;
        doc.into_structure()
    }
}

/// The on-disk JSON form of a structure.
///
/// `layers` is optional and only written for layered constructions, so that
/// certificates can be checked from a file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureDocument {
    pub signature: Signature,
    pub size: usize,
    #[serde(default)]
    pub tuples: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(default)]
    pub unary_flags: BTreeMap<String, Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layers: Option<Vec<Vec<usize>>>,
}

impl StructureDocument {
    pub fn into_structure(self) -> Result<FiniteStructure> {
        let mut x = FiniteStructure::empty(self.signature, self.size);
        for (name, list) in self.tuples {
            let rel = x
                .signature
                .relation_index(&name)
                .ok_or_else(|| Error::input(format!("unknown relation `{name}`")))?;
            for t in list {
                x.insert(rel, t)?;
            }
        }
        for (name, list) in self.unary_flags {
            let u = x
                .signature
                .unary_index(&name)
                .ok_or_else(|| Error::input(format!("unknown unary predicate `{name}`")))?;
            for v in list {
                x.set_unary(u, v, true)?;
            }
        }
        Ok(x)
    }
}

impl Serialize for FiniteStructure {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_document().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FiniteStructure {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = StructureDocument::deserialize(deserializer)?;
        doc.into_structure().map_err(serde::de::Error::custom)
    }
}

/// Convenience lookups for the single-binary-relation case.
impl FiniteStructure {
    /// `E(u, v)` or `u < v` for structures with one binary relation.
    pub fn arc(&self, u: usize, v: usize) -> bool {
        debug_assert!(self.signature.relations().first().is_some_and(|r| r.arity == 2));
        self.tuples[0].contains(&[u, v][..])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> FiniteStructure {
        FiniteStructure::graph(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn induced_non_adjacent_pair() {
        let (sub, map) = path3().induced(&[0, 2]).unwrap();
        assert_eq!(sub.size(), 2);
        assert_eq!(sub.tuple_count(), 0);
        assert_eq!(map, vec![0, 2]);
    }

    #[test]
    fn induced_on_everything_is_identity() {
        let x = path3();
        let (sub, map) = x.induced(&[2, 0, 1]).unwrap();
        assert_eq!(sub, x);
        assert_eq!(map, vec![0, 1, 2]);
    }

    #[test]
    fn induced_triangle_from_five_vertex_graph() {
        let x = FiniteStructure::graph(5, &[(0, 1), (0, 2), (1, 2), (0, 3)]).unwrap();
        let (sub, _) = x.induced(&[0, 1, 2]).unwrap();
        let k3 = FiniteStructure::graph(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        assert_eq!(sub, k3);
    }

    #[test]
    fn induced_rejects_out_of_range() {
        assert!(matches!(path3().induced(&[0, 7]), Err(Error::Input(_))));
    }

    #[test]
    fn insert_validates() {
        let mut g = FiniteStructure::empty(Signature::graph(), 3);
        assert!(g.insert(0, vec![0, 0]).is_err());
        assert!(g.insert(0, vec![0, 3]).is_err());
        assert!(g.insert(0, vec![0, 1, 2]).is_err());
        assert!(g.insert(0, vec![0, 1]).unwrap());
        assert!(!g.insert(0, vec![0, 1]).unwrap());
    }

    #[test]
    fn adjacency() {
        let k2 = FiniteStructure::graph(2, &[(0, 1)]).unwrap();
        assert!(k2.adjacent(0, 1).unwrap());
        let two = FiniteStructure::graph(2, &[]).unwrap();
        assert!(!two.adjacent(0, 1).unwrap());
        assert!(matches!(two.adjacent(1, 1), Err(Error::Input(_))));

        let mut hyper = FiniteStructure::empty(Signature::hypergraph(3).unwrap(), 3);
        hyper.insert(0, vec![0, 1, 2]).unwrap();
        assert!(hyper.adjacent(0, 2).unwrap());
    }

    #[test]
    fn completeness() {
        let k3 = FiniteStructure::graph(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        assert!(k3.is_complete(&[1]).unwrap());
        assert!(k3.is_complete(&[0, 1, 2]).unwrap());
        assert!(!path3().is_complete(&[0, 1, 2]).unwrap());
    }

    #[test]
    fn json_round_trip_matches_interchange_format() {
        let x = FiniteStructure::graph(3, &[(0, 1)]).unwrap();
        let text = serde_json::to_string(&x).unwrap();
        assert_eq!(
            text,
            r#"{"signature":{"relations":[{"name":"E","arity":2}],"unaries":[]},"size":3,"tuples":{"E":[[0,1],[1,0]]},"unary_flags":{}}"#
        );
        assert_eq!(FiniteStructure::from_json_str(&text).unwrap(), x);
    }

    #[test]
    fn json_rejects_bad_tuples() {
        let text = r#"{"signature":{"relations":[{"name":"E","arity":2}],"unaries":[]},"size":2,"tuples":{"E":[[0,5]]},"unary_flags":{}}"#;
        assert!(FiniteStructure::from_json_str(text).is_err());
        let text = r#"{"signature":{"relations":[{"name":"E","arity":2}],"unaries":[]},"size":2,"tuples":{"F":[[0,1]]},"unary_flags":{}}"#;
        assert!(FiniteStructure::from_json_str(text).is_err());
    }

    #[test]
    fn chain_and_reverse() {
        let c = FiniteStructure::chain(3);
        assert!(c.arc(0, 2) && !c.arc(2, 0));
        let r = c.reversed();
        assert!(r.arc(2, 0) && !r.arc(0, 2));
    }
}
