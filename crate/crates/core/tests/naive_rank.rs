//! The engine against a literal reading of the rank definition: prime
//! extensions are built as concrete structures, kept if the class accepts
//! them, and realized by checking every candidate vertex directly.

use std::collections::HashMap;

use fraisse_rank::rank::RankMemo;
use fraisse_rank::structures::random::{random_graph, random_tournament};
use fraisse_rank::structures::{enumerate_structures, ClassOracle, FiniteStructure, Relation, Signature};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Tuples of distinct vertices below `n` of length `k` that use vertex `p`.
fn tuples_with(n: usize, k: usize, p: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !cur.contains(&v) {
                cur.push(v);
                go(n, k, cur, out);
                cur.pop();
            }
        }
    }
    let mut all = Vec::new();
    go(n, k, &mut Vec::new(), &mut all);
    all.retain(|t| t.contains(&p));
    all
}

struct Naive<'a> {
    host: &'a FiniteStructure,
    oracle: ClassOracle,
    memo: HashMap<u64, usize>,
}

impl Naive<'_> {
    fn extensions(&self, base: &FiniteStructure) -> (Vec<(usize, Vec<usize>)>, Vec<FiniteStructure>) {
        let p = base.size();
        let sig = base.signature();
        let mut slots: Vec<(usize, Vec<usize>)> = Vec::new();
        for (r, rel) in sig.relations().iter().enumerate() {
            for t in tuples_with(p + 1, rel.arity, p) {
                slots.push((r, t));
            }
        }
        let k = sig.unaries().len();
        let bits = slots.len() + k;
        assert!(bits <= 20, "too many candidate tuples");
        let mut out = Vec::new();
        for code in 0u64..1 << bits {
            let mut e = base.clone();
            e.grow(1);
            for (i, (r, t)) in slots.iter().enumerate() {
                if code >> i & 1 == 1 {
                    e.insert(*r, t.clone()).unwrap();
                }
            }
            for u in 0..k {
                e.set_unary(u, p, code >> (slots.len() + u) & 1 == 1).unwrap();
            }
            if self.oracle.contains(&e) {
                out.push(e);
            }
        }
        (slots, out)
    }

    fn realizes(&self, f: &[usize], z: usize, e: &FiniteStructure, slots: &[(usize, Vec<usize>)]) -> bool {
        let p = f.len();
        let image = |v: usize| if v == p { z } else { f[v] };
        let unary_ok = (0..e.signature().unaries().len()).all(|u| e.has_unary(u, p) == self.host.has_unary(u, z));
        unary_ok
            && slots.iter().all(|(r, t)| {
                let mapped: Vec<usize> = t.iter().map(|&v| image(v)).collect();
                e.has_tuple(*r, t) == self.host.has_tuple(*r, &mapped)
            })
    }

    fn rank(&mut self, mask: u64) -> usize {
        if let Some(&r) = self.memo.get(&mask) {
            return r;
        }
        let f: Vec<usize> = (0..self.host.size()).filter(|&v| mask >> v & 1 == 1).collect();
        if f.len() == self.host.size() {
            // nothing left to realize any extension with
            return 0;
        }
        let (base, _) = self.host.induced(&f).unwrap();
        let (slots, exts) = self.extensions(&base);
        let mut worst = usize::MAX;
        for e in &exts {
            let zs: Vec<usize> =
                (0..self.host.size()).filter(|&z| mask >> z & 1 == 0 && self.realizes(&f, z, e, &slots)).collect();
            let best = zs.iter().map(|&z| self.rank(mask | 1 << z) + 1).max().unwrap_or(0);
            worst = worst.min(best);
        }
        assert!(worst != usize::MAX, "the class has no one-point extension");
        self.memo.insert(mask, worst);
        worst
    }
}

fn compare(x: &FiniteStructure, oracle: ClassOracle) {
    let mut memo = RankMemo::new(x.clone(), oracle).unwrap();
    let mut naive = Naive { host: x, oracle, memo: HashMap::new() };
    for mask in 0..1u64 << x.size() {
        assert_eq!(memo.rank_mask(mask).unwrap(), naive.rank(mask), "{oracle} host {:?} subset {mask:b}", x.to_json());
    }
}

fn every(oracle: ClassOracle, max: usize) {
    let sig = oracle.signature().unwrap();
    for n in 0..=max {
        for x in enumerate_structures(&sig, &oracle, n, true).unwrap() {
            compare(&x, oracle);
        }
    }
}

#[test]
fn graphs() {
    every(ClassOracle::Graph, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        compare(&random_graph(6, 0.5, &mut rng), ClassOracle::Graph);
    }
}

#[test]
fn triangle_free_graphs() {
    every(ClassOracle::KnFreeGraph(3), 5);
    every(ClassOracle::KnFreeGraph(4), 4);
}

#[test]
fn tournaments() {
    every(ClassOracle::Tournament, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10 {
        compare(&random_tournament(6, &mut rng), ClassOracle::Tournament);
    }
}

#[test]
fn orders() {
    every(ClassOracle::PartialOrder, 4);
    for m in 0..=7 {
        compare(&FiniteStructure::chain(m), ClassOracle::LinearOrder);
    }
}

#[test]
fn unary_structures() {
    for k in 0..=2 {
        every(ClassOracle::UnaryOnly(k), 4);
    }
}

#[test]
fn irreflexive_digraphs_and_hypergraphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let digraphs = Signature::graph();
    for _ in 0..30 {
        let n = rng.gen_range(0..=4);
        let mut x = FiniteStructure::empty(digraphs.clone(), n);
        for u in 0..n {
            for v in 0..n {
                if u != v && rng.gen_bool(0.4) {
                    x.insert(0, vec![u, v]).unwrap();
                }
            }
        }
        compare(&x, ClassOracle::AllIrreflexive);
    }
    let triples = Signature::hypergraph(3).unwrap();
    for _ in 0..10 {
        let n = rng.gen_range(0..=4);
        let mut x = FiniteStructure::empty(triples.clone(), n);
        for t in tuples_with(n, 3, 0).into_iter().chain(tuples_with(n, 3, 1)) {
            if rng.gen_bool(0.3) {
                x.insert(0, t).unwrap();
            }
        }
        compare(&x, ClassOracle::AllIrreflexive);
    }
    let mixed = Signature::new(vec![Relation::new("E", 2)], vec!["P".into()]).unwrap();
    for _ in 0..15 {
        let n = rng.gen_range(0..=4);
        let mut x = FiniteStructure::empty(mixed.clone(), n);
        for u in 0..n {
            x.set_unary(0, u, rng.gen_bool(0.5)).unwrap();
            for v in 0..n {
                if u != v && rng.gen_bool(0.4) {
                    x.insert(0, vec![u, v]).unwrap();
                }
            }
        }
        compare(&x, ClassOracle::AllIrreflexive);
    }
}
