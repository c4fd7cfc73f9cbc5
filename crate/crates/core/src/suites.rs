//! Named verification suites. Each one runs an exhaustive or seeded check
//! and reports the first counterexample. The CLI `verify` command and the
//! acceptance tests both drive these.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::constructions::{
    build_graph_hn, build_tournament_hn, certify_cover_property, certify_no_large_complete, kernel_amalgam,
    ordered_sum, verify_kernel_bound, KernelAmalgam, KernelMode, SumKind, DEFAULT_BUILD_CAP,
};
use crate::error::{Error, Result};
use crate::orders::{find_splitters, rank_closed_form, rank_via_intervals, sum_bound_check, FiniteLinearOrder};
use crate::ordinal::{
    certify_successor_steps, finite_concatenation_check, floor_log2, h_recurrence, hausdorff_vd, hausdorff_vd_z,
    random_cnf, rank_of_ordinal, rank_of_z_times, rp_witness, Cnf, Ordinal, RankWitness,
};
use crate::rank::engine::{mask_of, vertices_of, RankMemo};
use crate::rank::{embeds_all_up_to, game_value, search_universality_number, unary_rank_check};
use crate::structures::random::{random_graph, random_tournament};
use crate::structures::{automorphisms, embeds, enumerate_structures, ClassOracle, FiniteStructure, Signature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    /// The acceptance criterion this suite implements, if any.
    pub criterion: Option<u8>,
    pub pass: bool,
    pub checked: u64,
    pub seed: u64,
    pub counterexample: Option<Value>,
    pub notes: Vec<String>,
}

/// `(name, criterion, description)` for every suite, sorted by name.
pub const SUITES: &[(&str, Option<u8>, &str)] = &[
    ("counterexamples", Some(5), "small structures that embed everything but have low rank"),
    ("cross-piece", Some(6), "cross pairs, localization and sum bounds for ordered sums"),
    ("game-rank", Some(7), "game value equals rank on all small graphs and tournaments"),
    ("graph-hn", Some(4), "rank of graph H_n, and certificates for H_4"),
    ("hn-prefix", None, "transversal prefixes of H_n keep rank at least n - j"),
    ("injected-fault", None, "a deliberately wrong closed form; must fail"),
    ("interval-characterization", Some(2), "interval formula against the engine on orders up to 12"),
    ("kernel-bounds", Some(9), "kernel bound and rank-0 corollaries on kernel amalgams"),
    ("linear-orders", Some(1), "rank of chains of size 0..=20"),
    ("monotonicity", Some(8), "monotonicity, automorphism invariance and intermediate values"),
    ("ordinal-closed-forms", Some(10), "closed forms for ordinals and Z times alpha"),
    ("planted-hn", None, "hosts containing H_n have rank at least n"),
    ("rank-property", Some(11), "every target rank is realized by the emitted witness"),
    ("splitters", None, "splitter families in chains of size up to 20"),
    ("tournament-hn", Some(3), "size and rank of tournament H_n for n <= 4"),
    ("unary-classes", Some(12), "colour-count formula against the engine"),
    ("universality-numbers", None, "N(1) = 1, N(2) = 2 and 4 <= N(3)"),
];

/// Names run by `all`: every suite except the injected fault.
pub fn all_suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.0).filter(|&n| n != "injected-fault").collect()
}

pub fn criterion_suite(criterion: u8) -> Option<&'static str> {
    SUITES.iter().find(|s| s.1 == Some(criterion)).map(|s| s.0)
}

struct Checker {
    checked: u64,
    counterexample: Option<Value>,
    notes: Vec<String>,
}

impl Checker {
    fn new() -> Self {
        Checker { checked: 0, counterexample: None, notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.checked += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(witness());
        }
    }

    fn failed(&self) -> bool {
        self.counterexample.is_some()
    }
}

pub fn run_suite(name: &str, config: &SuiteConfig) -> Result<SuiteReport> {
    let Some(&(name, criterion, _)) = SUITES.iter().find(|s| s.0 == name) else {
        let known: Vec<&str> = SUITES.iter().map(|s| s.0).collect();
        return Err(Error::input(format!("unknown suite `{name}`; known: {}", known.join(", "))));
    };
    let mut c = Checker::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    match name {
        "linear-orders" => linear_orders(&mut c)?,
        "interval-characterization" => interval_characterization(&mut c)?,
        "tournament-hn" => tournament_hn(&mut c)?,
        "graph-hn" => graph_hn(&mut c)?,
        "counterexamples" => counterexamples(&mut c)?,
        "cross-piece" => cross_piece(&mut c, &mut rng)?,
        "game-rank" => game_rank(&mut c)?,
        "monotonicity" => monotonicity(&mut c, &mut rng)?,
        "kernel-bounds" => kernel_bounds(&mut c, &mut rng)?,
        "ordinal-closed-forms" => ordinal_closed_forms(&mut c, &mut rng)?,
        "rank-property" => rank_property(&mut c, &mut rng)?,
        "unary-classes" => unary_classes(&mut c)?,
        "hn-prefix" => hn_prefix(&mut c)?,
        "planted-hn" => planted_hn(&mut c, &mut rng)?,
        "splitters" => splitters(&mut c),
        "universality-numbers" => universality_numbers(&mut c)?,
        "injected-fault" => injected_fault(&mut c)?,
        _ => unreachable!("every listed suite is dispatched"),
    }
    Ok(SuiteReport {
        name: name.to_string(),
        criterion,
        pass: !c.failed(),
        checked: c.checked,
        seed: config.seed,
        counterexample: c.counterexample,
        notes: c.notes,
    })
}

/// Runs the named suites (or every suite for `all`), sorted by name.
pub fn run_suites(names: &[String], config: &SuiteConfig) -> Result<Vec<SuiteReport>> {
    let mut selected: BTreeSet<String> = BTreeSet::new();
    for n in names {
        if n == "all" {
            selected.extend(all_suite_names().into_iter().map(String::from));
        } else {
            selected.insert(n.clone());
        }
    }
    selected.iter().map(|n| run_suite(n, config)).collect()
}

fn ranks_of_all_subsets(x: &FiniteStructure, oracle: ClassOracle) -> Result<Vec<usize>> {
    let mut memo = RankMemo::new(x.clone(), oracle)?;
    (0..1u64 << x.size()).map(|m| memo.rank_mask(m)).collect()
}

fn doc(x: &FiniteStructure) -> Value {
    serde_json::to_value(x.to_document()).expect("documents serialize")
}

fn linear_orders(c: &mut Checker) -> Result<()> {
    for m in 0..=20 {
        let r = RankMemo::new(FiniteStructure::chain(m), ClassOracle::LinearOrder)?.rank()?;
        let expected = rank_closed_form(m);
        c.check(r == expected, || json!({"size": m, "rank": r, "closed_form": expected}));
    }
    Ok(())
}

fn interval_characterization(c: &mut Checker) -> Result<()> {
    for m in 0..=12 {
        let mut memo = RankMemo::new(FiniteStructure::chain(m), ClassOracle::LinearOrder)?;
        for mask in 0..1u64 << m {
            let f = vertices_of(mask);
            let r = memo.rank_mask(mask)?;
            let formula = rank_via_intervals(m, &f)?;
            c.check(r == formula, || json!({"size": m, "subset": f, "rank": r, "intervals": formula}));
        }
    }
    Ok(())
}

fn tournament_hn(c: &mut Checker) -> Result<()> {
    for n in 1..=4 {
        let h = build_tournament_hn(n)?;
        let size = h.base.size();
        c.check(size == (1 << n) - 1, || json!({"n": n, "size": size}));
        let r = RankMemo::new(h.base, ClassOracle::Tournament)?.rank()?;
        c.check(r == n, || json!({"n": n, "rank": r}));
    }
    Ok(())
}

fn graph_hn(c: &mut Checker) -> Result<()> {
    let sig = Signature::graph();
    for n in 1..=3 {
        let h = build_graph_hn(&sig, &ClassOracle::Graph, n, DEFAULT_BUILD_CAP)?;
        let r = RankMemo::new(h.base, ClassOracle::Graph)?.rank()?;
        c.check(r == n, || json!({"n": n, "rank": r}));
    }
    let h4 = build_graph_hn(&sig, &ClassOracle::Graph, 4, DEFAULT_BUILD_CAP)?;
    let cover = certify_cover_property(&h4, &ClassOracle::Graph)?;
    c.check(cover.pass, || json!({"n": 4, "cover": cover}));
    let complete = certify_no_large_complete(&h4, 4)?;
    c.check(complete.applicable && complete.pass, || json!({"n": 4, "no_complete": complete}));
    c.notes.push(format!("H_4 has {} vertices; cover checked {} triples", h4.base.size(), cover.checked));
    Ok(())
}

fn counterexamples(c: &mut Checker) -> Result<()> {
    let five = FiniteStructure::graph(5, &[(0, 1), (0, 2), (1, 2), (0, 3)])?;
    let embeds_all = embeds_all_up_to(&five, ClassOracle::Graph, 3)?;
    c.check(embeds_all, || json!({"host": doc(&five), "embeds_all_3": false}));
    let r = RankMemo::new(five.clone(), ClassOracle::Graph)?.rank()?;
    c.check(r == 2, || json!({"host": doc(&five), "rank": r}));

    let k3 = FiniteStructure::graph(3, &[(0, 1), (1, 2), (0, 2)])?;
    let e3 = FiniteStructure::graph(3, &[])?;
    for x in enumerate_structures(&Signature::graph(), &ClassOracle::Graph, 4, false)? {
        if embeds(&k3, &x) {
            c.check(!embeds(&e3, &x), || json!({"host": doc(&x), "reason": "contains K3 and the empty triple"}));
        }
        c.check(!embeds_all_up_to(&x, ClassOracle::Graph, 3)?, || {
            json!({"host": doc(&x), "reason": "a 4-vertex graph embeds every 3-vertex graph"})
        });
    }

    let arc = FiniteStructure::digraph(2, &[(0, 1)])?;
    c.check(embeds_all_up_to(&arc, ClassOracle::Tournament, 2)?, || json!({"host": doc(&arc)}));
    let r = RankMemo::new(arc.clone(), ClassOracle::Tournament)?.rank()?;
    c.check(r == 1, || json!({"host": doc(&arc), "rank": r}));
    Ok(())
}

fn tournaments_up_to(n: usize) -> Result<Vec<FiniteStructure>> {
    let sig = Signature::graph();
    let mut out = Vec::new();
    for k in 1..=n {
        out.extend(enumerate_structures(&sig, &ClassOracle::Tournament, k, true)?);
    }
    Ok(out)
}

fn check_sum(c: &mut Checker, a: &FiniteStructure, b: &FiniteStructure) -> Result<()> {
    let oracle = ClassOracle::Tournament;
    let t = ordered_sum(&[a.clone(), b.clone()], SumKind::Tournament)?;
    let ranks_t = ranks_of_all_subsets(&t, oracle)?;
    let ranks_a = ranks_of_all_subsets(a, oracle)?;
    let rb = RankMemo::new(b.clone(), oracle)?.rank()?;
    let (na, n) = (a.size(), t.size());
    for x in 0..na {
        for z in na..n {
            let r = ranks_t[(1usize << x) | (1 << z)];
            c.check(r == 0, || json!({"a": doc(a), "b": doc(b), "pair": [x, z], "rank": r}));
        }
    }
    let bound = ranks_a[0].max(rb) + 2;
    c.check(ranks_t[0] <= bound, || json!({"a": doc(a), "b": doc(b), "rank_sum": ranks_t[0], "bound": bound}));
    for mask in 1..1usize << na {
        let (rt, ra) = (ranks_t[mask], ranks_a[mask]);
        c.check(rt <= ra + 1, || {
            json!({"a": doc(a), "b": doc(b), "subset": vertices_of(mask as u64), "rank_sum": rt, "rank_a": ra})
        });
    }
    Ok(())
}

fn cross_piece(c: &mut Checker, rng: &mut ChaCha8Rng) -> Result<()> {
    let small = tournaments_up_to(4)?;
    for a in &small {
        for b in &small {
            check_sum(c, a, b)?;
        }
    }
    for _ in 0..200 {
        let a = random_tournament(5, rng);
        let b = random_tournament(5, rng);
        check_sum(c, &a, &b)?;
    }
    for a in 0..=10 {
        for b in 0..=10 {
            let r = sum_bound_check(FiniteLinearOrder::new(a), FiniteLinearOrder::new(b))?;
            c.check(r.holds, || json!(r));
        }
    }
    Ok(())
}

fn game_rank(c: &mut Checker) -> Result<()> {
    let mut hosts: Vec<(FiniteStructure, ClassOracle)> = Vec::new();
    for n in 0..=5 {
        for x in enumerate_structures(&Signature::graph(), &ClassOracle::Graph, n, true)? {
            hosts.push((x, ClassOracle::Graph));
        }
        for x in enumerate_structures(&Signature::graph(), &ClassOracle::Tournament, n, true)? {
            hosts.push((x, ClassOracle::Tournament));
        }
    }
    for (x, oracle) in hosts {
        let ranks = ranks_of_all_subsets(&x, oracle)?;
        for (mask, &r) in ranks.iter().enumerate() {
            let f = vertices_of(mask as u64);
            let g = game_value(&x, oracle, &f)?.value;
            c.check(g == r, || json!({"host": doc(&x), "class": oracle.to_string(), "subset": f, "rank": r, "game": g}));
        }
    }
    Ok(())
}

fn monotonicity(c: &mut Checker, rng: &mut ChaCha8Rng) -> Result<()> {
    for i in 0..500 {
        let n = rng.gen_range(1..=7);
        let (x, oracle) = if i % 2 == 0 {
            (random_graph(n, 0.5, rng), ClassOracle::Graph)
        } else {
            (random_tournament(n, rng), ClassOracle::Tournament)
        };
        let ranks = ranks_of_all_subsets(&x, oracle)?;
        let full = (1usize << n) - 1;
        for (mask, &r) in ranks.iter().enumerate() {
            for v in 0..n {
                let g = mask | 1 << v;
                c.check(ranks[g] <= r, || json!({"host": doc(&x), "subset": vertices_of(mask as u64), "added": v}));
            }
            let room = n - (mask as u64).count_ones() as usize;
            c.check(r <= room, || json!({"host": doc(&x), "subset": vertices_of(mask as u64), "rank": r}));
        }
        for sigma in automorphisms(&x) {
            for (mask, &r) in ranks.iter().enumerate() {
                let image = (0..n).filter(|&v| mask >> v & 1 == 1).fold(0usize, |m, v| m | 1 << sigma[v]);
                c.check(ranks[image] == r, || {
                    json!({"host": doc(&x), "automorphism": sigma, "subset": vertices_of(mask as u64)})
                });
            }
        }
        // A random induced sub-host.
        let s = rng.gen_range(0..=full);
        let keep = vertices_of(s as u64);
        let (y, _) = x.induced(&keep)?;
        let sub_ranks = ranks_of_all_subsets(&y, oracle)?;
        for (local, &ry) in sub_ranks.iter().enumerate() {
            let global = (0..keep.len()).filter(|&i| local >> i & 1 == 1).fold(0usize, |m, i| m | 1 << keep[i]);
            c.check(ry <= ranks[global], || {
                json!({"host": doc(&x), "sub_host": keep, "subset": vertices_of(global as u64), "rank_sub": ry})
            });
        }
        let attained: BTreeSet<usize> = ranks.iter().copied().collect();
        let top = ranks.iter().copied().max().unwrap_or(0);
        c.check((0..=top).all(|b| attained.contains(&b)), || json!({"host": doc(&x), "attained": attained}));
    }
    Ok(())
}

/// A random member of the class on `n` vertices whose first `|h|` vertices
/// induce `h`.
fn random_extension(h: &FiniteStructure, n: usize, oracle: ClassOracle, rng: &mut ChaCha8Rng) -> Result<FiniteStructure> {
    let base = match oracle {
        ClassOracle::Tournament => random_tournament(n, rng),
        _ => random_graph(n, 0.5, rng),
    };
    let mut doc = base.to_document();
    let k = h.size();
    let edges = doc.tuples.get_mut("E").expect("binary signature");
    edges.retain(|t| !(t[0] < k && t[1] < k));
    for t in h.tuples(0) {
        edges.push(t.clone());
    }
    doc.into_structure()
}

fn check_amalgam(c: &mut Checker, a: &KernelAmalgam, oracle: ClassOracle, rng: &mut ChaCha8Rng, info: &mut (usize, usize)) -> Result<()> {
    for leaf in 0..a.leaf_maps.len() {
        let r = verify_kernel_bound(a, oracle, leaf, 64, rng)?;
        if r.kernel_size > 0 {
            info.0 += r.outside_zero;
            info.1 += r.outside_checked;
        }
        c.check(r.pass, || json!({"amalgam": doc(&a.structure), "mode": a.mode, "report": r}));
    }
    Ok(())
}

fn kernel_bounds(c: &mut Checker, rng: &mut ChaCha8Rng) -> Result<()> {
    let sig = Signature::graph();
    let empty_graph = FiniteStructure::graph(0, &[])?;
    let k1 = FiniteStructure::graph(1, &[])?;
    let graph_h2 = build_graph_hn(&sig, &ClassOracle::Graph, 2, DEFAULT_BUILD_CAP)?.base;
    let t_sig = Signature::graph();
    let empty_t = FiniteStructure::empty(t_sig.clone(), 0);
    let t1 = FiniteStructure::empty(t_sig, 1);
    let t_h2 = build_tournament_hn(2)?.base;
    let t_h3 = build_tournament_hn(3)?.base;
    let mut info = (0usize, 0usize);

    let triangle = FiniteStructure::graph(3, &[(0, 1), (1, 2), (0, 2)])?;
    let a = kernel_amalgam(&empty_graph, &[(triangle.clone(), vec![]), (triangle, vec![])], KernelMode::Free)?;
    check_amalgam(c, &a, ClassOracle::Graph, rng, &mut info)?;
    let a = kernel_amalgam(&t_h2, &[(t_h3.clone(), vec![0, 1, 2]), (t_h3, vec![0, 1, 2])], KernelMode::TournamentSum)?;
    check_amalgam(c, &a, ClassOracle::Tournament, rng, &mut info)?;

    let cases: [(&FiniteStructure, ClassOracle, KernelMode); 6] = [
        (&empty_graph, ClassOracle::Graph, KernelMode::Free),
        (&k1, ClassOracle::Graph, KernelMode::Free),
        (&graph_h2, ClassOracle::Graph, KernelMode::Free),
        (&empty_t, ClassOracle::Tournament, KernelMode::TournamentSum),
        (&t1, ClassOracle::Tournament, KernelMode::TournamentSum),
        (&t_h2, ClassOracle::Tournament, KernelMode::TournamentSum),
    ];
    for (h, oracle, mode) in cases {
        for _ in 0..6 {
            let leaves_count = rng.gen_range(2..=3);
            let mut leaves = Vec::new();
            let mut total = h.size();
            for _ in 0..leaves_count {
                let room = (16 - total).min(h.size() + 5);
                if room <= h.size() {
                    break;
                }
                let n = rng.gen_range(h.size() + 1..=room);
                total += n - h.size();
                leaves.push((random_extension(h, n, oracle, rng)?, (0..h.size()).collect()));
            }
            let a = kernel_amalgam(h, &leaves, mode)?;
            check_amalgam(c, &a, oracle, rng, &mut info)?;
        }
    }
    c.notes.push(format!(
        "nonempty kernels: {} of {} outside additions have rank 0 (not required)",
        info.0, info.1
    ));
    Ok(())
}

fn nat(n: u64) -> Ordinal {
    Ordinal::nat(n)
}

fn omega() -> Ordinal {
    Ordinal::omega()
}

fn random_infinite(rng: &mut ChaCha8Rng) -> Ordinal {
    loop {
        let a = random_cnf(rng, 5, 5, 64);
        if !a.is_finite() {
            return a;
        }
    }
}

fn ordinal_closed_forms(c: &mut Checker, rng: &mut ChaCha8Rng) -> Result<()> {
    let show = |a: &Ordinal| a.to_string();
    let cases: [(&str, &str); 4] = [("w", "w"), ("w*2", "w+1"), ("w^2*3+w*5", "w*2+1"), ("w^w", "w^2")];
    for (a, expected) in cases {
        let r = rank_of_ordinal(&a.parse::<Ordinal>()?);
        c.check(show(&r) == expected, || json!({"alpha": a, "rank": show(&r), "expected": expected}));
    }
    for n in 0..100 {
        let r = rank_of_ordinal(&omega().add(&nat(n)));
        c.check(r == omega(), || json!({"alpha": format!("w+{n}"), "rank": show(&r)}));
    }
    let betas: Vec<Ordinal> = ["1", "2", "3", "4", "w", "w+1", "w^2", "w^w"].iter().map(|s| s.parse().unwrap()).collect();
    for beta in &betas {
        for m in 1..=64u64 {
            let alpha = Ordinal::term(beta.clone(), m);
            let r = rank_of_ordinal(&alpha);
            let expected = omega().mul(beta).add(&nat(floor_log2(&m)));
            c.check(r == expected, || json!({"alpha": show(&alpha), "rank": show(&r), "expected": show(&expected)}));
            let z = rank_of_z_times(&alpha)?;
            let expected = omega().mul(&Ordinal::one().add(beta)).add(&nat(floor_log2(&m)));
            c.check(z == expected, || json!({"z_times": show(&alpha), "rank": show(&z), "expected": show(&expected)}));
        }
    }
    for m in 1..=1000u64 {
        let z = rank_of_z_times(&nat(m))?;
        let expected = omega().add(&nat(floor_log2(&(m + 1))));
        c.check(z == expected, || json!({"z_times": m, "rank": show(&z)}));
        // the documented shift between Z*m and w*m
        let shift_z = z.left_sub(&omega()).expect("at least w");
        let shift_w = rank_of_ordinal(&omega().mul_nat(&m)).left_sub(&omega()).expect("at least w");
        c.check(shift_z == nat(floor_log2(&(m + 1))) && shift_w == nat(floor_log2(&m)), || json!({"m": m}));
    }
    for (m, h) in h_recurrence(1000).iter().enumerate() {
        let expected = omega().add(&nat(floor_log2(&(m as u64 + 1))));
        c.check(*h == expected, || json!({"m": m, "h": show(h), "expected": show(&expected)}));
    }
    for _ in 0..10_000 {
        let alpha = random_infinite(rng);
        let (beta, c1) = alpha.leading().expect("infinite");
        let lead = Ordinal::term(beta.clone(), *c1);
        let tail = random_cnf(rng, beta.as_finite().expect("natural exponents"), 5, 64);
        let r1 = rank_of_ordinal(&lead.add(&tail));
        let r0 = rank_of_ordinal(&lead);
        c.check(r1 == r0, || json!({"leading": show(&lead), "tail": show(&tail)}));
        let other = random_cnf(rng, 5, 5, 64);
        let (lo, hi) = if alpha <= other { (&alpha, &other) } else { (&other, &alpha) };
        c.check(rank_of_ordinal(lo) <= rank_of_ordinal(hi), || json!({"low": show(lo), "high": show(hi)}));
        let vd = hausdorff_vd(&alpha)?;
        c.check(omega().mul(&vd).add(&nat(floor_log2(c1))) == rank_of_ordinal(&alpha), || json!({"alpha": show(&alpha)}));
        let vdz = hausdorff_vd_z(&alpha)?;
        c.check(omega().mul(&vdz).add(&nat(floor_log2(c1))) == rank_of_z_times(&alpha)?, || {
            json!({"z_times": show(&alpha)})
        });
    }
    for _ in 0..1000 {
        let alpha = random_infinite(rng);
        let r = certify_successor_steps(&alpha)?;
        c.check(r.pass, || json!(r));
    }
    let p = |s: &str| s.parse::<Ordinal>().expect("literal");
    c.check(finite_concatenation_check(&[p("w"), p("w"), p("w")], &p("w*2"))?, || json!("(w, w, w) below w*2"));
    c.check(finite_concatenation_check(&[p("5"), p("7")], &p("w"))?, || json!("(5, 7) below w"));
    c.check(finite_concatenation_check(&[p("w*2")], &p("w*2")).is_err(), || json!("w*2 is not below w*2"));
    Ok(())
}

fn check_witness(c: &mut Checker, gamma: &Ordinal) -> Result<()> {
    let w = rp_witness(gamma)?;
    let (delta, k) = crate::ordinal::split_omega_multiple(gamma);
    let shape_ok = match &w {
        RankWitness::Chain(m) => delta.is_zero() && *m == (1 << k) - 1,
        RankWitness::Ordinal(a) => *a == Cnf::term(delta.clone(), 1 << k),
    };
    let r = w.rank();
    c.check(shape_ok && r == *gamma, || json!({"target": gamma.to_string(), "witness": w, "rank": r.to_string()}));
    Ok(())
}

fn rank_property(c: &mut Checker, rng: &mut ChaCha8Rng) -> Result<()> {
    for d in 0..5 {
        for k in 0..10 {
            check_witness(c, &omega().mul(&nat(d)).add(&nat(k)))?;
        }
    }
    for _ in 0..500 {
        let delta = random_cnf(rng, 4, 4, 64);
        let k = rng.gen_range(0..10);
        check_witness(c, &omega().mul(&delta).add(&nat(k)))?;
    }
    // finite witnesses through the engine as well
    for k in 0..=4 {
        let chain = FiniteStructure::chain((1 << k) - 1);
        let r = RankMemo::new(chain, ClassOracle::LinearOrder)?.rank()?;
        c.check(r == k, || json!({"chain": (1 << k) - 1, "rank": r}));
    }
    Ok(())
}

/// Every multiset of colour codes of total size `n`, as ascending lists.
fn colour_multisets(codes: u32, n: usize) -> Vec<Vec<u32>> {
    fn go(codes: u32, from: u32, n: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for code in from..codes {
            cur.push(code);
            go(codes, code, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(codes, 0, n, &mut Vec::new(), &mut out);
    out
}

fn unary_classes(c: &mut Checker) -> Result<()> {
    for k in 0..=2usize {
        for n in 0..=8 {
            for colours in colour_multisets(1 << k, n) {
                let x = FiniteStructure::colored(k, &colours)?;
                let ranks = ranks_of_all_subsets(&x, ClassOracle::UnaryOnly(k))?;
                for (mask, &r) in ranks.iter().enumerate() {
                    let f = vertices_of(mask as u64);
                    let u = unary_rank_check(&x, &f)?;
                    c.check(u == r, || json!({"k": k, "colours": colours, "subset": f, "rank": r, "formula": u}));
                }
            }
        }
    }
    Ok(())
}

fn hn_prefix(c: &mut Checker) -> Result<()> {
    let sig = Signature::graph();
    let mut builds = Vec::new();
    for n in 1..=3 {
        builds.push((n, build_graph_hn(&sig, &ClassOracle::Graph, n, DEFAULT_BUILD_CAP)?, ClassOracle::Graph));
    }
    for n in 1..=4 {
        builds.push((n, build_tournament_hn(n)?, ClassOracle::Tournament));
    }
    for (n, h, oracle) in builds {
        let mut memo = RankMemo::new(h.base.clone(), oracle)?;
        for j in 0..=n {
            for t in crate::constructions::hn::transversals(&h.layers[..j]) {
                let r = memo.rank_mask(mask_of(&t))?;
                c.check(r + j >= n, || json!({"class": oracle.to_string(), "n": n, "prefix": t, "rank": r}));
            }
        }
    }
    Ok(())
}

fn planted_hn(c: &mut Checker, rng: &mut ChaCha8Rng) -> Result<()> {
    let sig = Signature::graph();
    for n in 2..=3 {
        let h = build_graph_hn(&sig, &ClassOracle::Graph, n, DEFAULT_BUILD_CAP)?.base;
        for _ in 0..10 {
            let extra = rng.gen_range(0..=3);
            let mut x = h.clone();
            x.grow(extra);
            for v in h.size()..x.size() {
                for u in 0..v {
                    if rng.gen_bool(0.5) {
                        x.insert(0, vec![u, v])?;
                        x.insert(0, vec![v, u])?;
                    }
                }
            }
            let r = RankMemo::new(x.clone(), ClassOracle::Graph)?.rank()?;
            c.check(r >= n, || json!({"host": doc(&x), "n": n, "rank": r}));
        }
    }
    Ok(())
}

fn splitters(c: &mut Checker) {
    for m in 0..=20usize {
        let r = rank_closed_form(m) as u32;
        for n in 0..=r {
            for j in 0..=r - n {
                let found = find_splitters(m, n, j);
                c.check(found.as_ref().is_some_and(|s| s.len() == (1 << n) - 1), || json!({"size": m, "n": n, "j": j}));
            }
        }
    }
}

fn universality_numbers(c: &mut Checker) -> Result<()> {
    let r1 = search_universality_number(ClassOracle::Graph, 1, 2)?;
    c.check(r1.confirmed && r1.lower_bound == 1, || json!(r1));
    let r2 = search_universality_number(ClassOracle::Graph, 2, 4)?;
    c.check(r2.confirmed && r2.lower_bound == 2, || json!(r2));
    // N(3) >= 4: the 5-vertex graph embeds all 3-vertex graphs with rank 2.
    let five = FiniteStructure::graph(5, &[(0, 1), (0, 2), (1, 2), (0, 3)])?;
    let r = RankMemo::new(five.clone(), ClassOracle::Graph)?.rank()?;
    c.check(embeds_all_up_to(&five, ClassOracle::Graph, 3)? && r < 3, || json!({"host": doc(&five), "rank": r}));
    Ok(())
}

/// Compares chain ranks against `⌊log₂ m⌋`, which is off by one below
/// every power of two.
fn injected_fault(c: &mut Checker) -> Result<()> {
    for m in 1..=8usize {
        let r = RankMemo::new(FiniteStructure::chain(m), ClassOracle::LinearOrder)?.rank()?;
        let wrong = (usize::BITS - 1 - m.leading_zeros()) as usize;
        c.check(r == wrong, || json!({"size": m, "rank": r, "claimed": wrong}));
    }
    Ok(())
}
