use std::collections::{BTreeMap, BTreeSet};

use super::oracle::ClassOracle;
use super::signature::Signature;
use super::structure::FiniteStructure;
use super::types::{good_types, apply_type, DEFAULT_TYPE_BUDGET};
use crate::error::{Error, Result};

/// Largest size `enumerate_structures` accepts.
pub const ENUMERATION_CAP: usize = 7;

/// Colour refinement. Returns an isomorphism-invariant class index per
/// vertex; equal classes are candidates for the same canonical position.
fn refine(x: &FiniteStructure) -> Vec<usize> {
    let n = x.size();
    let incidence = x.incidence();
    let mut colour: Vec<usize> = vec![0; n];
    let mut initial: Vec<Vec<bool>> = (0..n).map(|v| x.unary_pattern(v)).collect();
    relabel(&mut initial, &mut colour);
    loop {
        let mut sigs: Vec<(usize, Vec<(usize, usize, Vec<usize>)>)> = (0..n)
            .map(|v| {
                let mut s: Vec<(usize, usize, Vec<usize>)> = incidence[v]
                    .iter()
                    .map(|&(rel, t)| {
                        let pos = t.iter().position(|&w| w == v).unwrap();
                        (rel, pos, t.iter().map(|&w| colour[w]).collect())
                    })
                    .collect();
                s.sort();
                (colour[v], s)
            })
            .collect();
        let before = distinct(&colour);
        let mut next = vec![0; n];
        relabel(&mut sigs, &mut next);
        colour = next;
        if distinct(&colour) == before {
            return colour;
        }
    }
}

fn distinct(c: &[usize]) -> usize {
    c.iter().collect::<BTreeSet<_>>().len()
}

fn relabel<T: Ord + Clone>(sigs: &mut [T], out: &mut [usize]) {
    let sorted: BTreeSet<T> = sigs.iter().cloned().collect();
    let index: BTreeMap<T, usize> = sorted.into_iter().enumerate().map(|(i, s)| (s, i)).collect();
    for (o, s) in out.iter_mut().zip(sigs.iter()) {
        *o = index[s];
    }
}

/// The code of `x` read through `order` (position p holds vertex order[p]):
/// unary bits, then for each relation the membership bit of every tuple of
/// distinct positions, tuples in lexicographic order.
fn code_for(x: &FiniteStructure, order: &[usize]) -> Vec<bool> {
    let n = x.size();
    let mut bits = Vec::new();
    for p in 0..n {
        bits.extend(x.unary_pattern(order[p]));
    }
    for (r, rel) in x.signature().relations().iter().enumerate() {
        for t in super::types::distinct_tuples(n, rel.arity) {
            let mapped: Vec<usize> = t.iter().map(|&p| order[p]).collect();
            bits.push(x.has_tuple(r, &mapped));
        }
    }
    bits
}

/// Canonical code: minimum code over the orderings that list colour classes
/// in increasing order. Isomorphic structures over the same signature get
/// equal codes.
pub fn canonical_code(x: &FiniteStructure) -> Vec<bool> {
    canonical_form(x).0
}

/// Canonical code together with an ordering attaining it.
pub fn canonical_form(x: &FiniteStructure) -> (Vec<bool>, Vec<usize>) {
    let colour = refine(x);
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in x.vertices() {
        classes.entry(colour[v]).or_default().push(v);
    }
    let classes: Vec<Vec<usize>> = classes.into_values().collect();
    let mut best: Option<(Vec<bool>, Vec<usize>)> = None;
    let mut order = Vec::with_capacity(x.size());
    search(x, &classes, 0, &mut order, &mut best);
    best.unwrap_or_default()
}

fn search(
    x: &FiniteStructure,
    classes: &[Vec<usize>],
    ci: usize,
    order: &mut Vec<usize>,
    best: &mut Option<(Vec<bool>, Vec<usize>)>,
) {
    if ci == classes.len() {
        let code = code_for(x, order);
        if best.as_ref().is_none_or(|(b, _)| code < *b) {
            *best = Some((code, order.clone()));
        }
        return;
    }
    let mut perm = classes[ci].clone();
    permute(&mut perm, 0, &mut |p| {
        let len = order.len();
        order.extend_from_slice(p);
        search(x, classes, ci + 1, order, best);
        order.truncate(len);
    });
}

fn permute(items: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, f);
        items.swap(k, i);
    }
}

/// The canonical relabeling of `x`.
pub fn canonical_structure(x: &FiniteStructure) -> FiniteStructure {
    let (_, order) = canonical_form(x);
    x.permuted(&order).expect("canonical orders are permutations")
}

pub fn isomorphic(a: &FiniteStructure, b: &FiniteStructure) -> bool {
    a.signature() == b.signature()
        && a.size() == b.size()
        && a.tuple_count() == b.tuple_count()
        && canonical_code(a) == canonical_code(b)
}

/// Every oracle-accepted structure of size `n` over `signature`, either all
/// labelled ones or one representative per isomorphism class.
///
/// Both modes grow structures one vertex at a time by good extension types,
/// which reaches everything because the class is hereditary.
pub fn enumerate_structures(
    signature: &Signature,
    oracle: &ClassOracle,
    n: usize,
    up_to_iso: bool,
) -> Result<Vec<FiniteStructure>> {
    enumerate_structures_capped(signature, oracle, n, up_to_iso, ENUMERATION_CAP)
}

pub fn enumerate_structures_capped(
    signature: &Signature,
    oracle: &ClassOracle,
    n: usize,
    up_to_iso: bool,
    cap: usize,
) -> Result<Vec<FiniteStructure>> {
    if n > cap {
        return Err(Error::resource(format!(
            "enumerating structures of size {n} exceeds the cap of {cap}"
        )));
    }
    oracle.check_signature(signature)?;
    let mut level = vec![FiniteStructure::empty(signature.clone(), 0)];
    for _ in 0..n {
        let mut next = Vec::new();
        let mut seen = BTreeSet::new();
        for x in &level {
            for ty in good_types(x, oracle, DEFAULT_TYPE_BUDGET)? {
                let g = apply_type(x, &ty)?;
                if up_to_iso {
                    let (code, order) = canonical_form(&g);
                    if seen.insert(code) {
                        next.push(g.permuted(&order)?);
                    }
                } else {
                    next.push(g);
                }
            }
        }
        level = next;
    }
    Ok(level)
}
