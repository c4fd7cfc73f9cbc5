use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::oracle::ClassOracle;
use super::structure::FiniteStructure;
use crate::error::{Error, Result};

/// Default cap on the number of types a single enumeration may produce.
pub const DEFAULT_TYPE_BUDGET: u64 = 1 << 20;

/// A one-point extension type `(A, s)` over a base structure on `0..m`.
///
/// `slots[r][p]` holds the (arity-1)-tuples `t` over the base such that the
/// tuple obtained by inserting the new point at position `p` of `t` belongs
/// to relation `r`. `unary[u]` says whether the new point carries predicate
/// `u`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExtensionType {
    pub slots: Vec<Vec<BTreeSet<Vec<usize>>>>,
    pub unary: Vec<bool>,
}

impl ExtensionType {
    /// The type with no tuples and no unary flags, shaped for `base`.
    pub fn empty_for(base: &FiniteStructure) -> Self {
        let sig = base.signature();
        ExtensionType {
            slots: sig
                .relations()
                .iter()
                .map(|r| vec![BTreeSet::new(); r.arity])
                .collect(),
            unary: vec![false; sig.unaries().len()],
        }
    }

    /// Graph type: the new point is adjacent exactly to `neighbours`.
    pub fn graph_neighbours(base: &FiniteStructure, neighbours: &[usize]) -> Self {
        let mut t = ExtensionType::empty_for(base);
        for &b in neighbours {
            t.slots[0][0].insert(vec![b]);
            t.slots[0][1].insert(vec![b]);
        }
        t
    }

    /// Tournament type: the new point beats exactly the vertices in
    /// `dominated` and loses to the rest of the base.
    pub fn tournament(base: &FiniteStructure, dominated: &[usize]) -> Self {
        let mut t = ExtensionType::empty_for(base);
        for b in base.vertices() {
            if dominated.contains(&b) {
                t.slots[0][0].insert(vec![b]);
            } else {
                t.slots[0][1].insert(vec![b]);
            }
        }
        t
    }

    /// True when no tuple involves the new point.
    pub fn is_empty_type(&self) -> bool {
        self.slots.iter().flatten().all(BTreeSet::is_empty)
    }

    /// True when every base vertex occurs in some slot tuple.
    pub fn is_full(&self, base_size: usize) -> bool {
        let used: BTreeSet<usize> = self.slots.iter().flatten().flatten().flatten().copied().collect();
        used.len() == base_size
    }

    /// For single-binary-relation types: the base vertices `b` with an arc
    /// new -> b, and those with b -> new.
    pub fn binary_arcs(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        if self.slots.len() != 1 || self.slots[0].len() != 2 {
            return None;
        }
        let out = self.slots[0][0].iter().map(|t| t[0]).collect();
        let inc = self.slots[0][1].iter().map(|t| t[0]).collect();
        Some((out, inc))
    }
}

/// Inserts `z` at position `pos` of `t`.
fn with_point(t: &[usize], pos: usize, z: usize) -> Vec<usize> {
    let mut full = Vec::with_capacity(t.len() + 1);
    full.extend_from_slice(&t[..pos]);
    full.push(z);
    full.extend_from_slice(&t[pos..]);
    full
}

/// All combinatorially possible types of `base`, in canonical order.
///
/// The class picks the type shape: graph classes use neighbourhoods,
/// tournaments use dominated sets, linear orders use positions and unary
/// classes use colour patterns. Other classes go through the general slot
/// enumeration. Canonical order is by unary code (predicate 0 is the low
/// bit), then by the slot bitmask (first slot is the low bit), which for the
/// specialised paths means subset masks with vertex 0 as the low bit and
/// positions in increasing order.
pub fn enumerate_extension_types(
    base: &FiniteStructure,
    oracle: &ClassOracle,
    budget: u64,
) -> Result<Vec<ExtensionType>> {
    let m = base.size();
    match oracle {
        ClassOracle::Graph | ClassOracle::KnFreeGraph(_) | ClassOracle::Tournament => {
            oracle.check_signature(base.signature())?;
            check_budget(m as u32, 0, budget, 2)?;
            Ok((0u64..1 << m)
                .map(|mask| {
                    let s: Vec<usize> = (0..m).filter(|&v| mask >> v & 1 == 1).collect();
                    if matches!(oracle, ClassOracle::Tournament) {
                        ExtensionType::tournament(base, &s)
                    } else {
                        ExtensionType::graph_neighbours(base, &s)
                    }
                })
                .collect())
        }
        ClassOracle::LinearOrder => {
            oracle.check_signature(base.signature())?;
            if !oracle.contains(base) {
                return Err(Error::input("position types need a linearly ordered base"));
            }
            if m as u64 + 1 > budget {
                return Err(Error::resource(format!(
                    "{} position types exceed the budget of {budget}",
                    m + 1
                )));
            }
            // below[b] = number of base elements under b
            let below: Vec<usize> = (0..m).map(|b| (0..m).filter(|&a| base.arc(a, b)).count()).collect();
            Ok((0..=m)
                .map(|k| {
                    let mut t = ExtensionType::empty_for(base);
                    for b in 0..m {
                        if below[b] < k {
                            t.slots[0][1].insert(vec![b]);
                        } else {
                            t.slots[0][0].insert(vec![b]);
                        }
                    }
                    t
                })
                .collect())
        }
        ClassOracle::UnaryOnly(_) => {
            oracle.check_signature(base.signature())?;
            enumerate_general_types(base, budget)
        }
        ClassOracle::AllIrreflexive | ClassOracle::PartialOrder => {
            enumerate_general_types(base, budget)
        }
    }
}

fn check_budget(slot_bits: u32, unary_bits: u32, budget: u64, arity: usize) -> Result<()> {
    let bits = slot_bits + unary_bits;
    if bits >= 64 || (1u64 << bits) > budget {
        return Err(Error::resource(format!(
            "2^{bits} extension types exceed the budget of {budget} (relation arity {arity})"
        )));
    }
    Ok(())
}

/// Slot positions of the general enumeration: `(relation, position, tuple)`
/// by relation, then position, then lexicographic tuple.
fn general_slots(base: &FiniteStructure) -> Vec<(usize, usize, Vec<usize>)> {
    let m = base.size();
    let mut out = Vec::new();
    for (r, rel) in base.signature().relations().iter().enumerate() {
        let tuples = distinct_tuples(m, rel.arity - 1);
        for p in 0..rel.arity {
            for t in &tuples {
                out.push((r, p, t.clone()));
            }
        }
    }
    out
}

/// All length-`len` tuples of distinct elements of `0..m`, lexicographic.
pub(crate) fn distinct_tuples(m: usize, len: usize) -> Vec<Vec<usize>> {
    fn go(m: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in 0..m {
            if !cur.contains(&v) {
                cur.push(v);
                go(m, len, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(m, len, &mut Vec::new(), &mut out);
    out
}

/// Every type over `base` in the general slot-set encoding, canonical order.
pub fn enumerate_general_types(base: &FiniteStructure, budget: u64) -> Result<Vec<ExtensionType>> {
    let sig = base.signature();
    let m = base.size() as u64;
    // Count slots without materialising them first, so huge arities fail fast.
    let mut slot_bits: u64 = 0;
    for rel in sig.relations() {
        let per_pos = (0..rel.arity as u64 - 1).try_fold(1u64, |acc, i| {
            if i >= m {
                Some(0)
            } else {
                acc.checked_mul(m - i)
            }
        });
        let add = per_pos.and_then(|p| p.checked_mul(rel.arity as u64));
        slot_bits = match add.and_then(|a| slot_bits.checked_add(a)) {
            Some(b) if b < 64 => b,
            _ => {
                return Err(Error::resource(format!(
                    "extension types over a {m}-vertex base exceed the budget of {budget} \
                     (relation arity {})",
                    rel.arity
                )))
            }
        };
    }
    let unary_bits = sig.unaries().len() as u32;
    check_budget(slot_bits as u32, unary_bits, budget, sig.max_arity())?;

    let slots = general_slots(base);
    let empty = ExtensionType::empty_for(base);
    let mut out = Vec::with_capacity(1 << (slot_bits as u32 + unary_bits));
    for code in 0u64..1 << unary_bits {
        for mask in 0u64..1 << slot_bits {
            let mut t = empty.clone();
            for (u, flag) in t.unary.iter_mut().enumerate() {
                *flag = code >> u & 1 == 1;
            }
            for (i, (r, p, tuple)) in slots.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    t.slots[*r][*p].insert(tuple.clone());
                }
            }
            out.push(t);
        }
    }
    Ok(out)
}

fn check_type_shape(base: &FiniteStructure, ty: &ExtensionType) -> Result<()> {
    let sig = base.signature();
    if ty.slots.len() != sig.relations().len() || ty.unary.len() != sig.unaries().len() {
        return Err(Error::input("type does not match the base signature"));
    }
    for (r, rel) in sig.relations().iter().enumerate() {
        if ty.slots[r].len() != rel.arity {
            return Err(Error::input(format!("type has the wrong slot count for `{}`", rel.name)));
        }
        for set in &ty.slots[r] {
            for t in set {
                if t.len() != rel.arity - 1 || t.iter().any(|&v| v >= base.size()) {
                    return Err(Error::input(format!("slot tuple {t:?} is not over the base")));
                }
            }
        }
    }
    Ok(())
}

/// The prime extension `G_T`: the base plus a new vertex `|F|` related to the
/// base exactly as the type says.
pub fn apply_type(base: &FiniteStructure, ty: &ExtensionType) -> Result<FiniteStructure> {
    check_type_shape(base, ty)?;
    let z = base.size();
    let mut g = base.clone();
    g.grow(1);
    for (r, per_pos) in ty.slots.iter().enumerate() {
        for (p, set) in per_pos.iter().enumerate() {
            for t in set {
                g.insert(r, with_point(t, p, z))?;
            }
        }
    }
    for (u, &flag) in ty.unary.iter().enumerate() {
        if flag {
            g.set_unary(u, z, true)?;
        }
    }
    Ok(g)
}

/// Whether the prime extension encoded by `ty` stays in the class.
pub fn is_good(ty: &ExtensionType, base: &FiniteStructure, oracle: &ClassOracle) -> bool {
    apply_type(base, ty).is_ok_and(|g| oracle.contains(&g))
}

/// The good types of `base`, canonical order.
pub fn good_types(
    base: &FiniteStructure,
    oracle: &ClassOracle,
    budget: u64,
) -> Result<Vec<ExtensionType>> {
    Ok(enumerate_extension_types(base, oracle, budget)?
        .into_iter()
        .filter(|t| is_good(t, base, oracle))
        .collect())
}

/// The type that the host vertex `z` realizes over `base`, where base vertex
/// `i` of the type is host vertex `base_vertices[i]`.
pub fn type_of_point(x: &FiniteStructure, base_vertices: &[usize], z: usize) -> ExtensionType {
    let mut index = vec![usize::MAX; x.size()];
    for (i, &v) in base_vertices.iter().enumerate() {
        index[v] = i;
    }
    let sig = x.signature();
    let mut ty = ExtensionType {
        slots: sig.relations().iter().map(|r| vec![BTreeSet::new(); r.arity]).collect(),
        unary: x.unary_pattern(z),
    };
    for (r, _) in sig.relations().iter().enumerate() {
        for t in x.tuples(r) {
            let Some(p) = t.iter().position(|&v| v == z) else {
                continue;
            };
            let rest: Option<Vec<usize>> = t
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != p)
                .map(|(_, &v)| (index[v] != usize::MAX).then_some(index[v]))
                .collect();
            if let Some(rest) = rest {
                ty.slots[r][p].insert(rest);
            }
        }
    }
    ty
}

/// The vertices `z` outside `f` such that `f ∪ {z}` realizes `ty` over
/// `f`, with `f` read in ascending order as in `induced`.
pub fn realizations(x: &FiniteStructure, f: &[usize], ty: &ExtensionType) -> Result<Vec<usize>> {
    let mut base: Vec<usize> = f.to_vec();
    base.sort_unstable();
    base.dedup();
    if let Some(&v) = base.iter().find(|&&v| v >= x.size()) {
        return Err(Error::input(format!("vertex {v} out of range")));
    }
    Ok(x.vertices()
        .filter(|z| base.binary_search(z).is_err())
        .filter(|&z| type_of_point(x, &base, z) == *ty)
        .collect())
}
