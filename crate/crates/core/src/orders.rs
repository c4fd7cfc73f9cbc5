//! Ranks of finite linear orders: interval profiles, the closed form
//! `⌊log₂(m+1)⌋`, and cross-checks of the sum and reversal laws against the
//! generic engine.

use serde::Serialize;

use crate::constructions::{ordered_sum, SumKind};
use crate::error::{Error, Result};
use crate::rank::engine::rank_subset;
use crate::structures::{ClassOracle, FiniteStructure};

/// A finite linear order, stored by size; vertex `i` is the `i`-th element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FiniteLinearOrder {
    pub size: usize,
}

impl FiniteLinearOrder {
    pub fn new(size: usize) -> Self {
        FiniteLinearOrder { size }
    }

    pub fn to_structure(self) -> FiniteStructure {
        FiniteStructure::chain(self.size)
    }

    /// Recovers the size of a structure, checking that it is a linear order.
    pub fn from_structure(x: &FiniteStructure) -> Result<Self> {
        if !ClassOracle::LinearOrder.accepts_signature(x.signature()) || !ClassOracle::LinearOrder.contains(x) {
            return Err(Error::input("structure is not a linear order"));
        }
        Ok(FiniteLinearOrder { size: x.size() })
    }
}

/// `⌊log₂(m+1)⌋`.
pub fn rank_closed_form(m: usize) -> usize {
    (usize::BITS - 1 - (m + 1).leading_zeros()) as usize
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntervalProfile {
    /// Sizes of `I_0, ..., I_m` for `F = {a_1 < ... < a_m}`.
    pub sizes: Vec<usize>,
}

/// Interval sizes cut out by the positions `f` in a chain of size `size`.
pub fn interval_profile(size: usize, f: &[usize]) -> Result<IntervalProfile> {
    let mut points = f.to_vec();
    points.sort_unstable();
    points.dedup();
    if let Some(&p) = points.last().filter(|&&p| p >= size) {
        return Err(Error::input(format!("position {p} is outside an order of size {size}")));
    }
    let mut sizes = Vec::with_capacity(points.len() + 1);
    let mut start = 0;
    for &p in &points {
        sizes.push(p - start);
        start = p + 1;
    }
    sizes.push(size - start);
    Ok(IntervalProfile { sizes })
}

/// Minimum closed-form rank over the intervals of `f`.
pub fn rank_via_intervals(size: usize, f: &[usize]) -> Result<usize> {
    let profile = interval_profile(size, f)?;
    Ok(profile.sizes.iter().map(|&s| rank_closed_form(s)).min().expect("at least one interval"))
}

/// Whether every interval has at least `2^n - 1` elements.
pub fn interval_size_threshold(profile: &IntervalProfile, n: u32) -> bool {
    let need = 2usize.checked_pow(n).map_or(usize::MAX, |p| p - 1);
    profile.sizes.iter().all(|&s| s >= need)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SumReport {
    pub left: usize,
    pub right: usize,
    pub rank_left: usize,
    pub rank_right: usize,
    pub rank_sum: usize,
    pub holds: bool,
    /// `rk(A+B) = max(rk A, rk B) + 1`.
    pub sharp: bool,
}

/// Computes `rk(A+B)` with the engine on the ordered sum and compares it with
/// `max(rk A, rk B) + 1`.
pub fn sum_bound_check(a: FiniteLinearOrder, b: FiniteLinearOrder) -> Result<SumReport> {
    let oracle = ClassOracle::LinearOrder;
    let (sa, sb) = (a.to_structure(), b.to_structure());
    let rank_left = rank_subset(&sa, oracle, &[])?;
    let rank_right = rank_subset(&sb, oracle, &[])?;
    let rank_sum = rank_subset(&ordered_sum(&[sa, sb], SumKind::LinearOrder)?, oracle, &[])?;
    let bound = rank_left.max(rank_right) + 1;
    Ok(SumReport {
        left: a.size,
        right: b.size,
        rank_left,
        rank_right,
        rank_sum,
        holds: rank_sum <= bound,
        sharp: rank_sum == bound,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReversalReport {
    pub size: usize,
    pub subset: Vec<usize>,
    pub rank: usize,
    pub reversed_rank: usize,
    pub pass: bool,
}

/// Compares `rk_Y(F)` with `rk_{Y*}(F)` using the engine on both orders.
pub fn reversal_check(y: FiniteLinearOrder, f: &[usize]) -> Result<ReversalReport> {
    let x = y.to_structure();
    let rank = rank_subset(&x, ClassOracle::LinearOrder, f)?;
    let reversed_rank = rank_subset(&x.reversed(), ClassOracle::LinearOrder, f)?;
    Ok(ReversalReport { size: y.size, subset: f.to_vec(), rank, reversed_rank, pass: rank == reversed_rank })
}

/// The lexicographically first `2^n - 1` positions whose `2^n` intervals all
/// have rank at least `j`, if any.
pub fn find_splitters(size: usize, n: u32, j: u32) -> Option<Vec<usize>> {
    let count = 1usize.checked_shl(n)? - 1;
    let block = 1usize.checked_shl(j)? - 1;
    let mut out = Vec::with_capacity(count);
    let mut start = 0;
    // Each interval needs at least `block` elements; taking exactly that
    // many before every splitter is optimal for the last interval.
    for _ in 0..count {
        let p = start + block;
        if p >= size {
            return None;
        }
        out.push(p);
        start = p + 1;
    }
    let profile = interval_profile(size, &out).ok()?;
    profile.sizes.iter().all(|&s| rank_closed_form(s) >= j as usize).then_some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form() {
        assert_eq!(rank_closed_form(0), 0);
        assert_eq!(rank_closed_form(6), 2);
        assert_eq!(rank_closed_form(7), 3);
        for n in 0..10u32 {
            assert_eq!(rank_closed_form((1 << n) - 1), n as usize);
            if n > 0 {
                assert_eq!(rank_closed_form((1 << n) - 2), n as usize - 1);
            }
        }
    }

    #[test]
    fn profiles() {
        assert_eq!(interval_profile(5, &[2]).unwrap().sizes, vec![2, 2]);
        assert_eq!(interval_profile(5, &[]).unwrap().sizes, vec![5]);
        assert_eq!(interval_profile(7, &[1, 5]).unwrap().sizes, vec![1, 3, 1]);
        assert!(interval_profile(3, &[3]).is_err());
    }

    #[test]
    fn intervals_against_engine() {
        assert_eq!(rank_via_intervals(7, &[]).unwrap(), 3);
        assert_eq!(rank_via_intervals(7, &[0]).unwrap(), 0);
        assert_eq!(rank_via_intervals(15, &[7]).unwrap(), 3);
        let chain = FiniteStructure::chain(15);
        assert_eq!(rank_subset(&chain, ClassOracle::LinearOrder, &[7]).unwrap(), 3);
        assert_eq!(rank_subset(&chain, ClassOracle::LinearOrder, &[0]).unwrap(), 0);
    }

    #[test]
    fn thresholds() {
        assert!(interval_size_threshold(&IntervalProfile { sizes: vec![7, 7] }, 3));
        assert!(!interval_size_threshold(&IntervalProfile { sizes: vec![3, 7] }, 3));
        assert!(interval_size_threshold(&IntervalProfile { sizes: vec![0] }, 0));
    }

    #[test]
    fn sums_and_reversal() {
        let r = sum_bound_check(FiniteLinearOrder::new(3), FiniteLinearOrder::new(3)).unwrap();
        assert_eq!((r.rank_sum, r.holds, r.sharp), (2, true, false));
        let r = sum_bound_check(FiniteLinearOrder::new(1), FiniteLinearOrder::new(1)).unwrap();
        assert_eq!((r.rank_sum, r.holds), (1, true));
        let r = sum_bound_check(FiniteLinearOrder::new(7), FiniteLinearOrder::new(0)).unwrap();
        assert_eq!((r.rank_sum, r.holds, r.sharp), (3, true, false));
        assert!(reversal_check(FiniteLinearOrder::new(6), &[1]).unwrap().pass);
        assert!(reversal_check(FiniteLinearOrder::new(0), &[]).unwrap().pass);
    }

    #[test]
    fn splitters() {
        assert_eq!(find_splitters(7, 1, 2), Some(vec![3]));
        assert_eq!(find_splitters(1, 1, 1), None);
        for m in 0..=20 {
            let r = rank_closed_form(m) as u32;
            for n in 0..=r {
                for j in 0..=r - n {
                    let s = find_splitters(m, n, j).unwrap_or_else(|| panic!("m={m} n={n} j={j}"));
                    assert_eq!(s.len(), (1 << n) - 1);
                }
            }
        }
    }

    /// The interval characterization in its recursive form: `F` has rank
    /// `> k` iff every gap admits a point whose addition keeps rank `>= k`.
    fn recursive_rank(size: usize, f: &[usize]) -> usize {
        let mut f = f.to_vec();
        f.sort_unstable();
        let free: Vec<usize> = (0..size).filter(|p| f.binary_search(p).is_err()).collect();
        let gaps = interval_profile(size, &f).unwrap().sizes;
        if gaps.contains(&0) {
            return 0;
        }
        let mut start = 0;
        let mut worst = usize::MAX;
        for g in gaps {
            let best = (start..start + g)
                .map(|p| {
                    let mut next = f.clone();
                    next.push(free[p]);
                    recursive_rank(size, &next)
                })
                .max()
                .unwrap();
            worst = worst.min(best);
            start += g;
        }
        worst + 1
    }

    #[test]
    fn recursive_form_agrees() {
        for m in 0..=9 {
            for mask in 0u32..1 << m {
                let f: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
                assert_eq!(recursive_rank(m, &f), rank_via_intervals(m, &f).unwrap(), "m={m} f={f:?}");
            }
        }
    }
}
