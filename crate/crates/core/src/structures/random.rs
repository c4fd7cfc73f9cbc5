use rand::seq::SliceRandom;
use rand::Rng;

use super::oracle::ClassOracle;
use super::signature::Signature;
use super::structure::FiniteStructure;
use crate::error::{Error, Result};

/// G(n, p) random graph.
pub fn random_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> FiniteStructure {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    FiniteStructure::graph(n, &edges).expect("edges are in range")
}

/// Uniform random tournament on `n` vertices.
pub fn random_tournament<R: Rng>(n: usize, rng: &mut R) -> FiniteStructure {
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            arcs.push(if rng.gen_bool(0.5) { (u, v) } else { (v, u) });
        }
    }
    FiniteStructure::digraph(n, &arcs).expect("arcs are in range")
}

/// A random member of the class on `n` vertices. Clique-free graphs are
/// grown greedily; partial orders are random suborders of a shuffled chain.
pub fn random_member<R: Rng>(oracle: &ClassOracle, n: usize, rng: &mut R) -> Result<FiniteStructure> {
    match oracle {
        ClassOracle::Graph => Ok(random_graph(n, 0.5, rng)),
        ClassOracle::Tournament => Ok(random_tournament(n, rng)),
        ClassOracle::KnFreeGraph(_) => {
            let mut g = FiniteStructure::empty(Signature::graph(), n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.5) {
                        let mut h = g.clone();
                        h.insert(0, vec![u, v])?;
                        h.insert(0, vec![v, u])?;
                        if oracle.contains(&h) {
                            g = h;
                        }
                    }
                }
            }
            Ok(g)
        }
        ClassOracle::LinearOrder | ClassOracle::PartialOrder => {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            let chain = FiniteStructure::chain(n).permuted(&perm)?;
            if matches!(oracle, ClassOracle::LinearOrder) {
                return Ok(chain);
            }
            // Keep a random set of covering pairs, then close transitively.
            let mut x = FiniteStructure::empty(Signature::order(), n);
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen_bool(0.4) {
                        x.insert(0, vec![perm[i], perm[j]])?;
                    }
                }
            }
            transitive_closure(&mut x)?;
            Ok(x)
        }
        ClassOracle::UnaryOnly(k) => {
            let colors: Vec<u32> = (0..n).map(|_| rng.gen_range(0..1u32 << k)).collect();
            FiniteStructure::colored(*k, &colors)
        }
        ClassOracle::AllIrreflexive => Err(Error::input(
            "random members of all-irreflexive classes need an explicit signature",
        )),
    }
}

fn transitive_closure(x: &mut FiniteStructure) -> Result<()> {
    let n = x.size();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if i != j && x.arc(i, k) && x.arc(k, j) {
                    x.insert(0, vec![i, j])?;
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn members_are_accepted() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for oracle in [
            ClassOracle::Graph,
            ClassOracle::Tournament,
            ClassOracle::KnFreeGraph(3),
            ClassOracle::LinearOrder,
            ClassOracle::PartialOrder,
            ClassOracle::UnaryOnly(2),
        ] {
            for n in 0..7 {
                let x = random_member(&oracle, n, &mut rng).unwrap();
                assert!(oracle.contains(&x), "{oracle} rejected {x:?}");
            }
        }
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = random_graph(6, 0.5, &mut ChaCha8Rng::seed_from_u64(1));
        let b = random_graph(6, 0.5, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(a, b);
    }
}
