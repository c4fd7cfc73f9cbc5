use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::structures::oracle::has_clique_within;
use crate::structures::{good_types, type_of_point, ClassOracle, ExtensionType, FiniteStructure};
use crate::structures::types::DEFAULT_TYPE_BUDGET;

/// Largest host for which `rank` (from the empty set) is attempted.
pub const DEFAULT_HOST_CAP: usize = 24;
/// Environment variable that overrides [`DEFAULT_HOST_CAP`] in the CLI.
pub const HOST_CAP_ENV: &str = "RANK_MAX_HOST";
/// Hard limit from the bitmask representation.
pub const MAX_HOST: usize = 64;
/// Cap on memo entries for hosts stored sparsely.
pub const DEFAULT_ENTRY_BUDGET: usize = 1 << 24;

const DENSE_LIMIT: usize = 24;
const UNKNOWN: u8 = u8::MAX;

pub fn mask_of(vertices: &[usize]) -> u64 {
    vertices.iter().fold(0u64, |m, &v| m | 1 << v)
}

pub fn vertices_of(mask: u64) -> Vec<usize> {
    (0..64).filter(|&v| mask >> v & 1 == 1).collect()
}

enum Table {
    Dense(Vec<u8>),
    Sparse(HashMap<u64, u8>),
}

/// Memoised exact rank computation over a fixed host.
///
/// Vertices outside `F` are grouped by the type they realize over `F`,
/// computed from precomputed adjacency bitmasks. Every realized type is good
/// because the class is hereditary, so all good types are realized exactly
/// when the number of groups equals the number of good types.
pub struct RankMemo {
    host: FiniteStructure,
    oracle: ClassOracle,
    host_cap: usize,
    unary: Vec<u64>,
    /// For each binary relation: `out[r][v]` = {w : (v,w) ∈ R}, `inc[r][v]` =
    /// {w : (w,v) ∈ R}.
    out: Vec<Vec<u64>>,
    inc: Vec<Vec<u64>>,
    /// Tuples of arity >= 3 through each vertex: (mask of the other entries,
    /// packed (relation, position, entries)).
    higher: Vec<Vec<(u64, u64)>>,
    adjacency: Vec<Vec<bool>>,
    table: Table,
    entries: usize,
    entry_budget: usize,
}

impl RankMemo {
    pub fn new(host: FiniteStructure, oracle: ClassOracle) -> Result<Self> {
        Self::with_host_cap(host, oracle, DEFAULT_HOST_CAP)
    }

    pub fn with_host_cap(host: FiniteStructure, oracle: ClassOracle, host_cap: usize) -> Result<Self> {
        let n = host.size();
        if n > MAX_HOST {
            return Err(Error::resource(format!(
                "host has {n} vertices; subset masks support at most {MAX_HOST}"
            )));
        }
        oracle.check_signature(host.signature())?;
        if !oracle.contains(&host) {
            return Err(Error::input(format!("host is not in the class `{oracle}`")));
        }
        let sig = host.signature().clone();
        if sig.relations().len() > 255 || sig.max_arity() > 9 || sig.unaries().len() > 64 {
            return Err(Error::input("signature too large for the rank engine"));
        }
        let mut unary = vec![0u64; n];
        for (u, _) in sig.unaries().iter().enumerate() {
            for &v in host.unary_set(u) {
                unary[v] |= 1 << u;
            }
        }
        let mut out = Vec::new();
        let mut inc = Vec::new();
        let mut higher = vec![Vec::new(); n];
        for (r, rel) in sig.relations().iter().enumerate() {
            if rel.arity == 2 {
                let mut o = vec![0u64; n];
                let mut i = vec![0u64; n];
                for t in host.tuples(r) {
                    o[t[0]] |= 1 << t[1];
                    i[t[1]] |= 1 << t[0];
                }
                out.push(o);
                inc.push(i);
            } else {
                for t in host.tuples(r) {
                    for (p, &v) in t.iter().enumerate() {
                        let mut others = 0u64;
                        let mut packed = (r as u64) << 56 | (p as u64) << 52;
                        for (k, &w) in t.iter().filter(|&&w| w != v).enumerate() {
                            others |= 1 << w;
                            packed |= (w as u64) << (6 * k);
                        }
                        higher[v].push((others, packed));
                    }
                }
            }
        }
        for list in &mut higher {
            list.sort_unstable();
        }
        let adjacency = host.adjacency_matrix();
        let table = if n <= DENSE_LIMIT {
            Table::Dense(vec![UNKNOWN; 1 << n])
        } else {
            Table::Sparse(HashMap::new())
        };
        Ok(RankMemo {
            host,
            oracle,
            host_cap,
            unary,
            out,
            inc,
            higher,
            adjacency,
            table,
            entries: 0,
            entry_budget: DEFAULT_ENTRY_BUDGET,
        })
    }

    pub fn set_entry_budget(&mut self, budget: usize) {
        self.entry_budget = budget;
    }

    pub fn host(&self) -> &FiniteStructure {
        &self.host
    }

    pub fn oracle(&self) -> ClassOracle {
        self.oracle
    }

    fn check_mask(&self, f: u64) -> Result<()> {
        let n = self.host.size();
        if n < 64 && f >> n != 0 {
            return Err(Error::input(format!(
                "subset mentions a vertex outside the {n}-vertex host"
            )));
        }
        Ok(())
    }

    /// `rk_X(∅)`. Refuses hosts above the configured cap.
    pub fn rank(&mut self) -> Result<usize> {
        if self.host.size() > self.host_cap {
            return Err(Error::resource(format!(
                "host has {} vertices, above the full-rank cap of {} (set {HOST_CAP_ENV} to raise it)",
                self.host.size(),
                self.host_cap
            )));
        }
        self.rank_mask(0)
    }

    pub fn rank_subset(&mut self, f: &[usize]) -> Result<usize> {
        if let Some(&v) = f.iter().find(|&&v| v >= self.host.size()) {
            return Err(Error::input(format!("vertex {v} is not in the host")));
        }
        self.rank_mask(mask_of(f))
    }

    pub fn rank_mask(&mut self, f: u64) -> Result<usize> {
        self.check_mask(f)?;
        Ok(self.rec(f)? as usize)
    }

    fn lookup(&self, f: u64) -> Option<u8> {
        let v = match &self.table {
            Table::Dense(t) => t[f as usize],
            Table::Sparse(t) => *t.get(&f)?,
        };
        (v != UNKNOWN).then_some(v)
    }

    fn store(&mut self, f: u64, r: u8) -> Result<()> {
        match &mut self.table {
            Table::Dense(t) => t[f as usize] = r,
            Table::Sparse(t) => {
                if t.len() >= self.entry_budget {
                    return Err(Error::resource(format!(
                        "rank memo reached its budget of {} entries",
                        self.entry_budget
                    )));
                }
                t.insert(f, r);
            }
        }
        self.entries += 1;
        Ok(())
    }

    /// Key identifying the type of `z` over `f` in host coordinates.
    fn key(&self, f: u64, z: usize) -> Vec<u64> {
        let mut key = Vec::with_capacity(1 + 2 * self.out.len());
        key.push(self.unary[z]);
        for (o, i) in self.out.iter().zip(&self.inc) {
            key.push(o[z] & f);
            key.push(i[z] & f);
        }
        for &(others, packed) in &self.higher[z] {
            if others & !f == 0 {
                key.push(packed);
            }
        }
        key
    }

    /// Vertices outside `f` grouped by realized type, groups ordered by key.
    fn groups(&self, f: u64) -> Vec<(Vec<u64>, Vec<usize>)> {
        let mut items: Vec<(Vec<u64>, usize)> = (0..self.host.size())
            .filter(|&z| f >> z & 1 == 0)
            .map(|z| (self.key(f, z), z))
            .collect();
        items.sort_unstable();
        let mut groups: Vec<(Vec<u64>, Vec<usize>)> = Vec::new();
        for (k, z) in items {
            match groups.last_mut() {
                Some((last, members)) if *last == k => members.push(z),
                _ => groups.push((k, vec![z])),
            }
        }
        groups
    }

    /// Number of good types over the substructure induced on `f`. May return
    /// any lower bound above `available` instead of the exact count.
    fn good_count(&self, f: u64, available: usize) -> Result<u64> {
        let m = f.count_ones() as u64;
        match self.oracle {
            ClassOracle::KnFreeGraph(k) => {
                // Every subset smaller than k-1 is a legal neighbourhood.
                let mut lower = 0u64;
                let mut binom = 1u64;
                for i in 0..(k as u64 - 1).min(m + 1) {
                    lower = lower.saturating_add(binom);
                    binom = binom.saturating_mul(m - i) / (i + 1);
                }
                if lower > available as u64 {
                    return Ok(lower);
                }
                if m > 24 {
                    return Err(Error::resource("clique-free type count over more than 24 vertices"));
                }
                let base = vertices_of(f);
                let mut count = 0u64;
                for sub in 0u32..(1u32 << m) {
                    let s: Vec<usize> = (0..m as usize)
                        .filter(|&i| sub >> i & 1 == 1)
                        .map(|i| base[i])
                        .collect();
                    if !has_clique_within(&self.adjacency, &s, k - 1) {
                        count += 1;
                    }
                }
                Ok(count)
            }
            ClassOracle::PartialOrder => {
                let (base, _) = self.host.induced(&vertices_of(f))?;
                self.oracle.count_good_types(&base)
            }
            // The remaining counts depend only on |F| and the signature.
            _ => self
                .oracle
                .count_good_types(&FiniteStructure::empty(self.host.signature().clone(), m as usize)),
        }
    }

    fn rec(&mut self, f: u64) -> Result<u8> {
        if let Some(r) = self.lookup(f) {
            return Ok(r);
        }
        let n = self.host.size();
        let remaining = n - f.count_ones() as usize;
        let mut groups = self.groups(f);
        let good = self.good_count(f, remaining)?;
        let r = if good == 0 {
            return Err(Error::input(format!(
                "class `{}` has no one-point extension here; the rank is not finite",
                self.oracle
            )));
        } else if (groups.len() as u64) < good {
            0
        } else {
            // Small groups first: they tend to have small maxima.
            groups.sort_by_key(|(_, members)| members.len());
            let ceiling = (remaining - 1) as u8;
            let mut best = u8::MAX;
            for (_, members) in &groups {
                let mut group_max = 0u8;
                for &z in members {
                    group_max = group_max.max(self.rec(f | 1 << z)?);
                    if group_max >= best || group_max == ceiling {
                        break;
                    }
                }
                best = best.min(group_max);
                if best == 0 {
                    break;
                }
            }
            best + 1
        };
        self.store(f, r)?;
        Ok(r)
    }

    /// For a rank-0 subset, the first good type (canonical order) with no
    /// realization. `None` when the rank is positive.
    pub fn rank_zero_witness(&mut self, f: &[usize]) -> Result<Option<ExtensionType>> {
        if self.rank_subset(f)? != 0 {
            return Ok(None);
        }
        let base_vertices = vertices_of(mask_of(f));
        let (base, _) = self.host.induced(&base_vertices)?;
        let realized: std::collections::BTreeSet<ExtensionType> = self
            .host
            .vertices()
            .filter(|z| !base_vertices.contains(z))
            .map(|z| type_of_point(&self.host, &base_vertices, z))
            .collect();
        Ok(good_types(&base, &self.oracle, DEFAULT_TYPE_BUDGET)?
            .into_iter()
            .find(|t| !realized.contains(t)))
    }

    /// Player I's pessimal type at `f` (first in canonical order attaining
    /// the minimum) with its realizations and Player II's best reply (lowest
    /// vertex id attaining the maximum).
    pub fn pessimal_move(&mut self, f: &[usize]) -> Result<Move> {
        let rank = self.rank_subset(f)?;
        let base_vertices = vertices_of(mask_of(f));
        let (base, _) = self.host.induced(&base_vertices)?;
        for (index, ty) in good_types(&base, &self.oracle, DEFAULT_TYPE_BUDGET)?.into_iter().enumerate() {
            let realizations: Vec<usize> = self
                .host
                .vertices()
                .filter(|z| !base_vertices.contains(z))
                .filter(|&z| type_of_point(&self.host, &base_vertices, z) == ty)
                .collect();
            if realizations.is_empty() {
                return Ok(Move { type_index: index, proposal: ty, realizations, reply: None });
            }
            let mut best: Option<(usize, usize)> = None;
            for &z in &realizations {
                let mut next = base_vertices.clone();
                next.push(z);
                let r = self.rank_subset(&next)?;
                if best.is_none_or(|(b, _)| r > b) {
                    best = Some((r, z));
                }
            }
            let (value, reply) = best.expect("realizations are nonempty");
            if value + 1 == rank {
                return Ok(Move { type_index: index, proposal: ty, realizations, reply: Some(reply) });
            }
        }
        Err(Error::input("no good type attains the rank; the class count is inconsistent"))
    }

    /// Number of subsets evaluated so far.
    pub fn entries(&self) -> usize {
        self.entries
    }
}

/// A move pair at one position: I's proposal and II's reply, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub type_index: usize,
    pub proposal: ExtensionType,
    pub realizations: Vec<usize>,
    pub reply: Option<usize>,
}

/// `rk(X)` for a member of the class.
pub fn rank(x: &FiniteStructure, oracle: ClassOracle) -> Result<usize> {
    RankMemo::new(x.clone(), oracle)?.rank()
}

/// `rk_X(F)`.
pub fn rank_subset(x: &FiniteStructure, oracle: ClassOracle, f: &[usize]) -> Result<usize> {
    RankMemo::new(x.clone(), oracle)?.rank_subset(f)
}
