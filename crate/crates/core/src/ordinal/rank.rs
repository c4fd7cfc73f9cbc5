use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use rand::Rng;
use serde::Serialize;

use super::cnf::{coefficient, floor_log2, Cnf, Coefficient, Ordinal};
use crate::error::{Error, Result};

fn nat<C: Coefficient>(n: u64) -> Cnf<C> {
    Cnf::nat(coefficient(n))
}

/// `ω·β + k`.
fn omega_times_plus<C: Coefficient>(beta: &Cnf<C>, k: u64) -> Cnf<C> {
    Cnf::omega().mul(beta).add(&nat(k))
}

/// Rank of the ordinal `α` as a linear order: `⌊log₂(α+1)⌋` when finite,
/// `ω·β₁ + ⌊log₂ c₁⌋` otherwise.
pub fn rank_of_ordinal<C: Coefficient>(alpha: &Cnf<C>) -> Cnf<C> {
    match alpha.as_finite() {
        Some(m) => nat(floor_log2(&(m + C::one()))),
        None => {
            let (beta, c) = alpha.leading().expect("infinite ordinals have a leading term");
            omega_times_plus(beta, floor_log2(c))
        }
    }
}

/// Rank of the reversed order `α*`, equal to that of `α`.
pub fn rank_of_reversed_ordinal<C: Coefficient>(alpha: &Cnf<C>) -> Cnf<C> {
    rank_of_ordinal(alpha)
}

/// Rank of `ℤ·α`: `ω + ⌊log₂(m+1)⌋` for finite `m`, otherwise
/// `ω·(1+β₁) + ⌊log₂ c₁⌋`.
pub fn rank_of_z_times<C: Coefficient>(alpha: &Cnf<C>) -> Result<Cnf<C>> {
    if alpha.is_zero() {
        return Err(Error::input("Z*0 is empty; the rank of Z*alpha needs alpha >= 1"));
    }
    Ok(match alpha.as_finite() {
        Some(m) => Cnf::omega().add(&nat(floor_log2(&(m + C::one())))),
        None => {
            let (beta, c) = alpha.leading().expect("infinite ordinals have a leading term");
            omega_times_plus(&Cnf::one().add(beta), floor_log2(c))
        }
    })
}

/// The Hausdorff rank `VD(α) = β₁` of an infinite ordinal.
pub fn hausdorff_vd<C: Coefficient>(alpha: &Cnf<C>) -> Result<Cnf<C>> {
    if alpha.is_finite() {
        return Err(Error::input("the Hausdorff rank is only defined here for infinite ordinals"));
    }
    Ok(alpha.leading().expect("infinite").0.clone())
}

/// `VD(ℤ·α) = 1 + β₁`, with `β₁ = 0` for finite `α ≥ 1`.
pub fn hausdorff_vd_z<C: Coefficient>(alpha: &Cnf<C>) -> Result<Cnf<C>> {
    match alpha.leading() {
        None => Err(Error::input("Z*0 is empty")),
        Some((beta, _)) => Ok(Cnf::one().add(beta)),
    }
}

/// `h(0), ..., h(m)` for `h(0) = ω`,
/// `h(m) = max_{j<m} min(h(j), h(m-j-1)) + 1`.
pub fn h_recurrence(m: usize) -> Vec<Ordinal> {
    let mut h: Vec<Ordinal> = Vec::with_capacity(m + 1);
    h.push(Ordinal::omega());
    for i in 1..=m {
        let best = (0..i)
            .map(|j| h[j].clone().min(h[i - j - 1].clone()))
            .max()
            .expect("i >= 1");
        h.push(best.succ());
    }
    h
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutStep {
    /// The certificate shows `rk(ordinal) >= limit + level`.
    pub level: u64,
    pub ordinal: String,
    /// Position of the cut point.
    pub cut: String,
    pub left: String,
    pub right: String,
    pub left_rank: String,
    pub right_rank: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuccessorReport {
    pub ordinal: String,
    pub rank: String,
    /// `γ = ω·β₁`, the limit part of the rank.
    pub limit_part: String,
    pub steps: u64,
    pub cuts: Vec<CutStep>,
    /// The smallest `n` with `2^n > c₁`, for which the closed form is below
    /// `γ + n`.
    pub pigeonhole_n: u64,
    pub pigeonhole_holds: bool,
    pub pass: bool,
    pub note: String,
}

/// Certifies the finite part `k` of `rk(α) = γ + k` by cuts at block
/// boundaries: `rk(δ) >= γ + s` is shown by a point whose left ordinal and
/// right tail both have closed-form rank `>= γ + (s-1)`, recursively, down
/// to level 0 where the closed form is trusted.
pub fn certify_successor_steps<C: Coefficient + std::hash::Hash>(alpha: &Cnf<C>) -> Result<SuccessorReport> {
    if alpha.is_finite() {
        return Err(Error::input("successor certification needs an infinite ordinal"));
    }
    let (beta, c1) = alpha.leading().expect("infinite");
    let gamma = Cnf::omega().mul(beta);
    let k = floor_log2(c1);
    let rank = rank_of_ordinal(alpha);
    let mut cert = Certifier { gamma: gamma.clone(), memo: HashMap::new(), cuts: Vec::new() };
    let certified = cert.certify(alpha, k);
    let two = C::one() + C::one();
    let mut pow = C::one();
    let mut n = 0;
    while pow <= *c1 {
        pow = pow * two.clone();
        n += 1;
    }
    let pigeonhole_holds = rank < gamma.add(&nat(n));
    let closed_form_matches = rank == gamma.add(&nat(k));
    Ok(SuccessorReport {
        ordinal: alpha.to_string(),
        rank: rank.to_string(),
        limit_part: gamma.to_string(),
        steps: k,
        cuts: cert.cuts,
        pigeonhole_n: n,
        pigeonhole_holds,
        pass: certified && pigeonhole_holds && closed_form_matches,
        note: "the limit part is taken from the closed form; only the finite steps are certified by cuts".into(),
    })
}

struct Certifier<C> {
    gamma: Cnf<C>,
    memo: HashMap<(Cnf<C>, u64), bool>,
    cuts: Vec<CutStep>,
}

impl<C: Coefficient + std::hash::Hash> Certifier<C> {
    fn certify(&mut self, delta: &Cnf<C>, level: u64) -> bool {
        if level == 0 {
            return rank_of_ordinal(delta) >= self.gamma;
        }
        if let Some(&ok) = self.memo.get(&(delta.clone(), level)) {
            return ok;
        }
        let need = self.gamma.add(&nat(level - 1));
        let mut ok = false;
        let mut prefix = Cnf::zero();
        'terms: for (e, c) in delta.terms() {
            let block = Cnf::omega_pow(e.clone());
            let mut j = C::zero();
            while j < *c {
                let cut = prefix.add(&block.mul_nat(&j));
                let right = delta.left_sub(&cut.succ()).expect("cut lies inside delta");
                let (lr, rr) = (rank_of_ordinal(&cut), rank_of_ordinal(&right));
                if lr >= need && rr >= need && self.certify(&cut, level - 1) && self.certify(&right, level - 1) {
                    self.cuts.push(CutStep {
                        level,
                        ordinal: delta.to_string(),
                        cut: cut.to_string(),
                        left: cut.to_string(),
                        right: right.to_string(),
                        left_rank: lr.to_string(),
                        right_rank: rr.to_string(),
                    });
                    ok = true;
                    break 'terms;
                }
                j = j + C::one();
            }
            prefix = prefix.add(&Cnf::term(e.clone(), c.clone()));
        }
        self.memo.insert((delta.clone(), level), ok);
        ok
    }
}

/// Iterates `rk(A+B) <= max(rk A, rk B) + 1` over `ranks` and reports whether
/// the bound stays below the limit `γ`.
pub fn finite_concatenation_check<C: Coefficient>(ranks: &[Cnf<C>], gamma: &Cnf<C>) -> Result<bool> {
    if !gamma.is_limit() {
        return Err(Error::input(format!("{gamma} is not a limit ordinal")));
    }
    if let Some(r) = ranks.iter().find(|r| *r >= gamma) {
        return Err(Error::input(format!("rank {r} is not below {gamma}")));
    }
    let Some((first, rest)) = ranks.split_first() else {
        return Ok(true);
    };
    let mut bound = first.clone();
    for r in rest {
        bound = bound.max(r.clone()).succ();
    }
    Ok(bound < *gamma)
}

/// A countable linear order realizing a prescribed rank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RankWitness {
    /// A finite chain of this size.
    Chain(u64),
    /// The ordinal `ω^δ·2^k`.
    Ordinal(Ordinal),
}

impl RankWitness {
    pub fn rank(&self) -> Ordinal {
        match self {
            RankWitness::Chain(m) => rank_of_ordinal(&Ordinal::nat(*m)),
            RankWitness::Ordinal(a) => rank_of_ordinal(a),
        }
    }
}

/// Splits `γ` as `ω·δ + k`.
pub fn split_omega_multiple(gamma: &Ordinal) -> (Ordinal, u64) {
    let k = gamma.finite_part();
    let mut terms = Vec::new();
    for (e, c) in gamma.terms() {
        if !e.is_zero() {
            let shifted = e.left_sub(&Ordinal::one()).expect("nonzero exponent");
            terms.push((shifted, *c));
        }
    }
    (Cnf::from_terms(terms).expect("shifting preserves the order of exponents"), k)
}

/// A witness of rank exactly `γ`: the chain of size `2^k - 1` for finite
/// `γ = k`, otherwise `ω^δ·2^k` for `γ = ω·δ + k`.
pub fn rp_witness(gamma: &Ordinal) -> Result<RankWitness> {
    let (delta, k) = split_omega_multiple(gamma);
    if k >= 63 {
        return Err(Error::resource(format!("2^{k} does not fit in a coefficient")));
    }
    Ok(if delta.is_zero() {
        RankWitness::Chain((1 << k) - 1)
    } else {
        RankWitness::Ordinal(Cnf::term(delta, 1 << k))
    })
}

/// A rank: a natural, a countable ordinal, or ∞.
#[derive(Debug, Clone, Serialize)]
#[serde(into = "String")]
pub enum RankValue {
    Finite(u64),
    Ordinal(Ordinal),
    Infinity,
}

impl RankValue {
    fn normalized(&self) -> Option<Ordinal> {
        match self {
            RankValue::Finite(n) => Some(Ordinal::nat(*n)),
            RankValue::Ordinal(a) => Some(a.clone()),
            RankValue::Infinity => None,
        }
    }
}

impl PartialEq for RankValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for RankValue {}

impl Ord for RankValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.normalized(), other.normalized()) {
            (Some(a), Some(b)) => a.cmp(&b),
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Greater,
            (Some(_), None) => Ordering::Less,
        }
    }
}

impl PartialOrd for RankValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RankValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankValue::Finite(n) => write!(f, "{n}"),
            RankValue::Ordinal(a) => write!(f, "{a}"),
            RankValue::Infinity => f.write_str("inf"),
        }
    }
}

impl From<RankValue> for String {
    fn from(r: RankValue) -> String {
        r.to_string()
    }
}

/// A random ordinal below `ω^max_exp` with natural exponents, at most
/// `max_terms` terms and coefficients in `1..=max_coef`.
pub fn random_cnf<R: Rng>(rng: &mut R, max_exp: u64, max_terms: usize, max_coef: u64) -> Ordinal {
    let count = rng.gen_range(0..=max_terms.min(max_exp as usize));
    let mut exps: Vec<u64> = rand::seq::index::sample(rng, max_exp as usize, count)
        .into_iter()
        .map(|e| e as u64)
        .collect();
    exps.sort_unstable_by(|a, b| b.cmp(a));
    let terms = exps.into_iter().map(|e| (Ordinal::nat(e), rng.gen_range(1..=max_coef))).collect();
    Cnf::from_terms(terms).expect("distinct descending exponents")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn rk(s: &str) -> String {
        rank_of_ordinal(&p(s)).to_string()
    }

    #[test]
    fn ordinal_ranks() {
        assert_eq!(rk("w"), "w");
        assert_eq!(rk("w*2"), "w+1");
        assert_eq!(rk("w+17"), "w");
        assert_eq!(rk("w^2*3+w*5"), "w*2+1");
        assert_eq!(rk("7"), "3");
        assert_eq!(rk("0"), "0");
        assert_eq!(rk("w^w"), "w^2");
    }

    #[test]
    fn z_ranks() {
        let z = |s: &str| rank_of_z_times(&p(s)).unwrap().to_string();
        assert_eq!(z("5"), "w+2");
        assert_eq!(z("1"), "w+1");
        assert_eq!(z("w^2*3"), "w*3+1");
        assert_eq!(z("w^w"), "w^2");
        assert!(rank_of_z_times(&p("0")).is_err());
    }

    #[test]
    fn hausdorff() {
        assert_eq!(hausdorff_vd(&p("w^2*3+w*5")).unwrap(), p("2"));
        assert_eq!(hausdorff_vd(&p("w")).unwrap(), p("1"));
        assert!(hausdorff_vd(&p("4")).is_err());
        let a = p("w^2*3");
        let vd = hausdorff_vd_z(&a).unwrap();
        assert_eq!(Ordinal::omega().mul(&vd).add(&Ordinal::nat(1)), rank_of_z_times(&a).unwrap());
    }

    #[test]
    fn recurrence() {
        let h = h_recurrence(1000);
        assert_eq!(h[0].to_string(), "w");
        assert_eq!(h[3].to_string(), "w+2");
        assert_eq!(h[1000].to_string(), "w+9");
    }

    #[test]
    fn successor_certificates() {
        let r = certify_successor_steps(&p("w*8")).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.steps, 3);
        assert_eq!(r.rank, "w+3");
        let top = r.cuts.iter().find(|c| c.level == 3).unwrap();
        assert_eq!(top.cut, "w*4");
        let r = certify_successor_steps(&p("w^2*3+w*5")).unwrap();
        assert!(r.pass);
        assert_eq!(r.cuts[0].cut, "w^2");
        assert_eq!(r.cuts[0].right, "w^2*2+w*5");
        let r = certify_successor_steps(&p("w")).unwrap();
        assert!(r.pass && r.cuts.is_empty());
        assert!(certify_successor_steps(&p("3")).is_err());
    }

    #[test]
    fn concatenation() {
        assert!(finite_concatenation_check(&[p("w"), p("w"), p("w")], &p("w*2")).unwrap());
        assert!(finite_concatenation_check(&[p("5"), p("7")], &p("w")).unwrap());
        assert!(finite_concatenation_check(&[p("w*2")], &p("w*2")).is_err());
        assert!(finite_concatenation_check(&[p("1")], &p("w+1")).is_err());
    }

    #[test]
    fn witnesses() {
        assert_eq!(rp_witness(&p("3")).unwrap(), RankWitness::Chain(7));
        assert_eq!(rp_witness(&p("w*2+3")).unwrap(), RankWitness::Ordinal(p("w^2*8")));
        for s in ["0", "5", "w", "w+4", "w^2", "w^3*2+w+1"] {
            assert_eq!(rp_witness(&p(s)).unwrap().rank(), p(s));
        }
    }

    #[test]
    fn rank_values() {
        assert_eq!(RankValue::Finite(3), RankValue::Ordinal(p("3")));
        assert!(RankValue::Infinity > RankValue::Ordinal(p("w^w")));
        assert!(RankValue::Finite(100) < RankValue::Ordinal(p("w")));
        assert_eq!(serde_json::to_string(&RankValue::Ordinal(p("w+1"))).unwrap(), "\"w+1\"");
    }

    #[test]
    fn random_ordinals_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..200 {
            let a = random_cnf(&mut rng, 5, 5, 64);
            assert!(a < Ordinal::omega_pow(Ordinal::nat(5)));
            assert_eq!(a.to_string().parse::<Ordinal>().unwrap(), a);
        }
    }
}
