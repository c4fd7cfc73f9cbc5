use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rank::engine::{mask_of, RankMemo};
use crate::structures::types::distinct_tuples;
use crate::structures::{ClassOracle, FiniteStructure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelMode {
    /// No tuples between different leaves.
    Free,
    /// Every non-kernel vertex of an earlier leaf beats every non-kernel
    /// vertex of a later leaf.
    TournamentSum,
}

impl std::str::FromStr for KernelMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" => Ok(KernelMode::Free),
            "tournament-sum" => Ok(KernelMode::TournamentSum),
            other => Err(Error::input(format!("unknown mode `{other}` (free or tournament-sum)"))),
        }
    }
}

/// A kernel amalgam together with the position of every leaf inside it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelAmalgam {
    pub structure: FiniteStructure,
    pub mode: KernelMode,
    pub kernel_size: usize,
    /// `leaf_maps[k][v]` is the image of vertex `v` of leaf `k`.
    pub leaf_maps: Vec<Vec<usize>>,
}

impl KernelAmalgam {
    pub fn kernel(&self) -> Vec<usize> {
        (0..self.kernel_size).collect()
    }

    /// Images of the leaf's vertices outside the kernel, ascending.
    pub fn leaf_part(&self, leaf: usize) -> Vec<usize> {
        let mut out: Vec<usize> =
            self.leaf_maps[leaf].iter().copied().filter(|&v| v >= self.kernel_size).collect();
        out.sort_unstable();
        out
    }

    /// Which leaf a non-kernel vertex belongs to.
    pub fn leaf_of(&self, v: usize) -> Option<usize> {
        (0..self.leaf_maps.len()).find(|&k| v >= self.kernel_size && self.leaf_maps[k].contains(&v))
    }
}

fn check_embedding(h: &FiniteStructure, leaf: &FiniteStructure, emb: &[usize]) -> Result<()> {
    if emb.len() != h.size() {
        return Err(Error::input("kernel embedding has the wrong length"));
    }
    let mut seen = vec![false; leaf.size()];
    for &v in emb {
        if v >= leaf.size() || seen[v] {
            return Err(Error::input(format!("kernel embedding uses vertex {v} twice or out of range")));
        }
        seen[v] = true;
    }
    for (u, image) in emb.iter().enumerate() {
        if h.unary_pattern(u) != leaf.unary_pattern(*image) {
            return Err(Error::input("kernel embedding does not preserve unary flags"));
        }
    }
    for (r, rel) in h.signature().relations().iter().enumerate() {
        for t in distinct_tuples(h.size(), rel.arity) {
            let image: Vec<usize> = t.iter().map(|&i| emb[i]).collect();
            if h.has_tuple(r, &t) != leaf.has_tuple(r, &image) {
                return Err(Error::input("kernel embedding is not an induced embedding"));
            }
        }
    }
    Ok(())
}

/// Amalgamates the leaves over the kernel `h`. The kernel occupies
/// `0..|h|`, followed by each leaf's remaining vertices in order.
pub fn kernel_amalgam(
    h: &FiniteStructure,
    leaves: &[(FiniteStructure, Vec<usize>)],
    mode: KernelMode,
) -> Result<KernelAmalgam> {
    for (leaf, emb) in leaves {
        if leaf.signature() != h.signature() {
            return Err(Error::input("leaves and kernel must share a signature"));
        }
        check_embedding(h, leaf, emb)?;
        if mode == KernelMode::TournamentSum && !ClassOracle::Tournament.contains(leaf) {
            return Err(Error::input("tournament sums need tournament leaves"));
        }
    }
    let mut x = h.clone();
    let mut leaf_maps = Vec::new();
    for (leaf, emb) in leaves {
        let mut map = vec![usize::MAX; leaf.size()];
        for (i, &v) in emb.iter().enumerate() {
            map[v] = i;
        }
        let start = x.size();
        let mut next = start;
        for slot in map.iter_mut().filter(|s| **s == usize::MAX) {
            *slot = next;
            next += 1;
        }
        x.grow(next - start);
        for r in 0..leaf.signature().relations().len() {
            for t in leaf.tuples(r) {
                x.insert(r, t.iter().map(|&v| map[v]).collect())?;
            }
        }
        for u in 0..leaf.signature().unaries().len() {
            for &v in leaf.unary_set(u) {
                x.set_unary(u, map[v], true)?;
            }
        }
        leaf_maps.push(map);
    }
    let mut out = KernelAmalgam { structure: x, mode, kernel_size: h.size(), leaf_maps };
    if mode == KernelMode::TournamentSum {
        for j in 0..leaves.len() {
            for k in j + 1..leaves.len() {
                for u in out.leaf_part(j) {
                    for w in out.leaf_part(k) {
                        out.structure.insert(0, vec![u, w])?;
                    }
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SumKind {
    LinearOrder,
    Tournament,
}

/// `A_0 + A_1 + ...` with every cross pair oriented from the earlier part.
pub fn ordered_sum(parts: &[FiniteStructure], kind: SumKind) -> Result<FiniteStructure> {
    let oracle = match kind {
        SumKind::LinearOrder => ClassOracle::LinearOrder,
        SumKind::Tournament => ClassOracle::Tournament,
    };
    let sig = oracle.signature().expect("built-in classes have signatures");
    let mut offsets = Vec::new();
    let mut total = 0;
    for p in parts {
        if !oracle.accepts_signature(p.signature()) || !oracle.contains(p) {
            return Err(Error::input(format!("summand is not a member of `{oracle}`")));
        }
        offsets.push(total);
        total += p.size();
    }
    let mut x = FiniteStructure::empty(sig, total);
    for (p, &off) in parts.iter().zip(&offsets) {
        for t in p.tuples(0) {
            x.insert(0, vec![t[0] + off, t[1] + off])?;
        }
    }
    for (j, &oj) in offsets.iter().enumerate() {
        for (k, &ok) in offsets.iter().enumerate().skip(j + 1) {
            for u in oj..oj + parts[j].size() {
                for w in ok..ok + parts[k].size() {
                    x.insert(0, vec![u, w])?;
                }
            }
        }
    }
    Ok(x)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundViolation {
    pub subset: Vec<usize>,
    pub rank_in_amalgam: usize,
    pub rank_in_leaf: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelReport {
    pub pass: bool,
    pub leaf: usize,
    pub kernel_size: usize,
    /// Subsets F of leaf ∪ kernel meeting the leaf that were checked.
    pub samples: usize,
    pub exhaustive: bool,
    pub bound_violations: Vec<BoundViolation>,
    /// `(F, x)` pairs with x outside leaf ∪ kernel, and how many of them
    /// satisfy `rk(F ∪ {x}) <= |H|`.
    pub outside_checked: usize,
    pub outside_within_kernel_bound: usize,
    /// How many of the outside pairs have rank exactly 0.
    pub outside_zero: usize,
    /// Whether the exact rank-0 statement applies (empty kernel: the leaf is
    /// disconnected from the rest, or a genuine ordered sum of tournaments).
    pub zero_required: bool,
    pub notes: Vec<String>,
}

/// Checks the kernel bound `rk_X(F) <= rk_{leaf ∪ H}(F) + |H| + 1` for
/// subsets of one leaf plus the kernel, and the companion facts about adding
/// a vertex from outside the leaf.
///
/// With free amalgamation, `rk_X(F ∪ {x}) <= |H|` for every outside `x`, and
/// it is 0 when the kernel is empty. For tournament sums with an empty
/// kernel, a pair straddling two leaves has rank 0. With a nonempty kernel
/// the rank-0 counts are reported without being required.
pub fn verify_kernel_bound<R: Rng>(
    amalgam: &KernelAmalgam,
    oracle: ClassOracle,
    leaf: usize,
    samples: usize,
    rng: &mut R,
) -> Result<KernelReport> {
    if leaf >= amalgam.leaf_maps.len() {
        return Err(Error::input(format!("there is no leaf {leaf}")));
    }
    let x = &amalgam.structure;
    let h = amalgam.kernel_size;
    let mut local: Vec<usize> = amalgam.leaf_maps[leaf].clone();
    local.sort_unstable();
    let leaf_part = amalgam.leaf_part(leaf);
    let outside: Vec<usize> = x.vertices().filter(|v| local.binary_search(v).is_err()).collect();

    let mut whole = RankMemo::new(x.clone(), oracle)?;
    let (sub, _) = x.induced(&local)?;
    let mut part = RankMemo::new(sub, oracle)?;

    // Subsets of `local` meeting the leaf part, as masks over `local`.
    let l = local.len();
    if l >= 24 {
        return Err(Error::resource("leaf plus kernel is too large to sample"));
    }
    let leaf_bits: u32 = local
        .iter()
        .enumerate()
        .filter(|(_, v)| leaf_part.contains(v))
        .fold(0, |m, (i, _)| m | 1 << i);
    let candidates: Vec<u32> = (1u32..1 << l).filter(|m| m & leaf_bits != 0).collect();
    let exhaustive = candidates.len() <= samples;
    let chosen: Vec<u32> = if exhaustive {
        candidates
    } else {
        let mut idx = sample(rng, candidates.len(), samples).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|i| candidates[i]).collect()
    };

    let zero_required = h == 0;
    let mut report = KernelReport {
        pass: true,
        leaf,
        kernel_size: h,
        samples: chosen.len(),
        exhaustive,
        bound_violations: Vec::new(),
        outside_checked: 0,
        outside_within_kernel_bound: 0,
        outside_zero: 0,
        zero_required,
        notes: Vec::new(),
    };
    for m in chosen {
        let local_f: Vec<usize> = (0..l).filter(|&i| m >> i & 1 == 1).collect();
        let f: Vec<usize> = local_f.iter().map(|&i| local[i]).collect();
        let rx = whole.rank_subset(&f)?;
        let rl = part.rank_subset(&local_f)?;
        if rx > rl + h + 1 {
            report.bound_violations.push(BoundViolation { subset: f.clone(), rank_in_amalgam: rx, rank_in_leaf: rl });
        }
        for &o in &outside {
            let r = whole.rank_mask(mask_of(&f) | 1 << o)?;
            report.outside_checked += 1;
            if r <= h {
                report.outside_within_kernel_bound += 1;
            }
            if r == 0 {
                report.outside_zero += 1;
            }
        }
    }
    report.pass = report.bound_violations.is_empty()
        && (zero_required && report.outside_zero == report.outside_checked
            || !zero_required
                && (amalgam.mode == KernelMode::TournamentSum
                    || report.outside_within_kernel_bound == report.outside_checked));
    if !zero_required && report.outside_zero < report.outside_checked {
        report.notes.push(format!(
            "{} of {} outside additions have positive rank; a kernel vertex can realize \
             types that no outside vertex can, so rank 0 is not forced",
            report.outside_checked - report.outside_zero,
            report.outside_checked
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::hn::build_tournament_hn;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn triangle() -> FiniteStructure {
        FiniteStructure::graph(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn free_amalgam_over_empty_kernel() {
        let k2 = FiniteStructure::graph(2, &[(0, 1)]).unwrap();
        let empty = FiniteStructure::graph(0, &[]).unwrap();
        let a = kernel_amalgam(&empty, &[(k2.clone(), vec![]), (k2, vec![])], KernelMode::Free).unwrap();
        assert_eq!(a.structure, FiniteStructure::graph(4, &[(0, 1), (2, 3)]).unwrap());
    }

    #[test]
    fn star_over_one_vertex() {
        let k1 = FiniteStructure::graph(1, &[]).unwrap();
        let p2 = FiniteStructure::graph(2, &[(0, 1)]).unwrap();
        let a = kernel_amalgam(&k1, &[(p2.clone(), vec![0]), (p2, vec![1])], KernelMode::Free).unwrap();
        assert_eq!(a.structure, FiniteStructure::graph(3, &[(0, 1), (0, 2)]).unwrap());
        assert_eq!(a.leaf_of(2), Some(1));
    }

    #[test]
    fn bad_embeddings_are_rejected() {
        let k2 = FiniteStructure::graph(2, &[(0, 1)]).unwrap();
        let e2 = FiniteStructure::graph(2, &[]).unwrap();
        assert!(kernel_amalgam(&k2, &[(e2, vec![0, 1])], KernelMode::Free).is_err());
        let p3 = FiniteStructure::graph(3, &[(0, 1), (1, 2)]).unwrap();
        let k1 = FiniteStructure::graph(1, &[]).unwrap();
        assert!(kernel_amalgam(&k1, &[(p3, vec![0])], KernelMode::TournamentSum).is_err());
    }

    #[test]
    fn tournament_sum_of_h3_over_h2() {
        let h2 = build_tournament_hn(2).unwrap().base;
        let h3 = build_tournament_hn(3).unwrap().base;
        let a = kernel_amalgam(&h2, &[(h3.clone(), vec![0, 1, 2]), (h3, vec![0, 1, 2])], KernelMode::TournamentSum)
            .unwrap();
        assert_eq!(a.structure.size(), 11);
        assert!(ClassOracle::Tournament.contains(&a.structure));
    }

    #[test]
    fn ordered_sums() {
        let one = FiniteStructure::chain(1);
        assert_eq!(ordered_sum(&[one.clone(), one], SumKind::LinearOrder).unwrap(), FiniteStructure::chain(2));
        let c3 = FiniteStructure::digraph(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let s = ordered_sum(&[c3.clone(), c3.clone()], SumKind::Tournament).unwrap();
        assert!(ClassOracle::Tournament.contains(&s));
        assert!(s.arc(2, 3) && !s.arc(3, 2));
        assert!(ordered_sum(&[c3], SumKind::LinearOrder).is_err());
    }

    #[test]
    fn disconnected_triangles() {
        let empty = FiniteStructure::graph(0, &[]).unwrap();
        let a = kernel_amalgam(&empty, &[(triangle(), vec![]), (triangle(), vec![])], KernelMode::Free).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = verify_kernel_bound(&a, ClassOracle::Graph, 0, 100, &mut rng).unwrap();
        assert!(r.pass && r.exhaustive && r.zero_required);
        assert_eq!(r.outside_zero, r.outside_checked);
    }

    #[test]
    fn cross_piece_of_two_cycles() {
        let c3 = FiniteStructure::digraph(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let empty = FiniteStructure::empty(c3.signature().clone(), 0);
        let a = kernel_amalgam(&empty, &[(c3.clone(), vec![]), (c3, vec![])], KernelMode::TournamentSum).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = verify_kernel_bound(&a, ClassOracle::Tournament, 0, 100, &mut rng).unwrap();
        assert!(r.pass);
        // 7 nonempty subsets of the first cycle, 3 vertices in the second
        assert_eq!(r.outside_checked, 7 * 3);
        assert_eq!(r.outside_zero, r.outside_checked);
    }
}
