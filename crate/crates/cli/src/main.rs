use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fraisse_rank::constructions::{
    build_graph_hn, build_tournament_hn, certify_cover_property, certify_no_large_complete, hn_size, kernel_amalgam,
    ordered_sum, KernelMode, LayeredStructure, SumKind, DEFAULT_BUILD_CAP,
};
use fraisse_rank::ordinal::{
    certify_successor_steps, rank_of_ordinal, rank_of_reversed_ordinal, rank_of_z_times, rp_witness,
};
use fraisse_rank::rank::{game_step, game_value, search_universality_number, GameMove, GameState, Player, RankMemo};
use fraisse_rank::rank::engine::{DEFAULT_HOST_CAP, HOST_CAP_ENV};
use fraisse_rank::structures::StructureDocument;
use fraisse_rank::suites::{run_suites, SuiteConfig, SuiteReport};
use fraisse_rank::{ClassOracle, Error, FiniteStructure, Ordinal};

#[derive(Parser)]
#[command(name = "fraisse-rank", version, about = "Exact ranks of finite structures, linear orders and ordinals")]
struct Cli {
    /// Indented JSON, and a table for `verify`.
    #[arg(long, global = true)]
    pretty: bool,

    /// Largest host for full rank computations (overrides RANK_MAX_HOST).
    #[arg(long, global = true)]
    max_host: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank of a subset of a host structure.
    Rank(RankArgs),
    /// Solve or play the rank game.
    Game(GameArgs),
    /// Build a universal or amalgamated structure.
    #[command(subcommand)]
    Construct(Construct),
    /// Check the certificates of a layered structure.
    Certify(CertifyArgs),
    /// Ordinal rank calculator.
    Ordinal(OrdinalArgs),
    /// Bounds on the least N whose N-universal graphs have a given rank.
    SearchN(SearchArgs),
    /// Run named property suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct HostArgs {
    /// Structure file in the JSON interchange format.
    #[arg(long)]
    host: Option<PathBuf>,
    /// Class name: graph, k3-free, tournament, linear-order, partial-order, unary:k, all-irreflexive.
    #[arg(long, default_value = "graph")]
    class: String,
    /// Use the chain of this size as host (linear orders only).
    #[arg(long)]
    size: Option<usize>,
    /// Comma-separated vertex ids.
    #[arg(long, default_value = "")]
    subset: String,
}

#[derive(Args)]
struct RankArgs {
    #[command(flatten)]
    host: HostArgs,
}

#[derive(Args)]
struct GameArgs {
    #[command(flatten)]
    host: HostArgs,
    /// Print the value and an optimal strategy.
    #[arg(long, conflicts_with = "interactive")]
    solve: bool,
    /// Play on standard input with `type <i>` and `pick <v>`.
    #[arg(long)]
    interactive: bool,
    /// Side played from standard input; the other side plays optimally.
    #[arg(long = "as", value_enum, default_value = "both")]
    side: Side,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Side {
    One,
    Two,
    Both,
}

#[derive(Subcommand)]
enum Construct {
    /// The layered structure H_n.
    Hn {
        #[arg(long, default_value = "graph")]
        class: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_BUILD_CAP)]
        cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Amalgamation of leaves over a common kernel.
    Kernel {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        leaves: Vec<PathBuf>,
        #[arg(long, default_value = "free")]
        mode: String,
        /// One comma list per leaf giving the image of each kernel vertex;
        /// by default the kernel sits on the first vertices of every leaf.
        #[arg(long, num_args = 1..)]
        embeddings: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ordered sum of linear orders or tournaments.
    Sum {
        #[arg(long, value_enum, default_value = "linear-order")]
        kind: Kind,
        #[arg(long, num_args = 1.., required = true)]
        parts: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    LinearOrder,
    Tournament,
}

#[derive(Args)]
struct CertifyArgs {
    /// Structure file with a `layers` field.
    #[arg(long)]
    host: PathBuf,
    #[arg(long, default_value = "graph")]
    class: String,
    /// Check the layer cover property.
    #[arg(long)]
    cover: bool,
    /// Certify that no n+1 vertices are pairwise adjacent.
    #[arg(long, value_name = "N")]
    no_complete: Option<usize>,
}

#[derive(Args)]
struct OrdinalArgs {
    #[arg(value_enum)]
    op: OrdinalOp,
    /// Expression such as `w^2*3+w*5`.
    expr: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrdinalOp {
    /// Rank of the ordinal as a linear order.
    Rank,
    /// Rank of Z copies of the ordinal.
    Zrank,
    /// Rank of the reversed ordinal.
    Reversed,
    /// Check the successor steps below a limit ordinal.
    Certify,
    /// A linear order of the given rank.
    Witness,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    rank: usize,
    #[arg(long)]
    max_size: usize,
    #[arg(long, default_value = "graph")]
    class: String,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite names, or `all`.
    #[arg(long, num_args = 1.., default_value = "all")]
    suite: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// What a command produced: its JSON and whether every check passed.
struct Outcome {
    value: Value,
    pass: bool,
    table: Option<String>,
}

impl Outcome {
    fn ok(value: Value) -> Self {
        Outcome { value, pass: true, table: None }
    }
}

type Result<T> = std::result::Result<T, Error>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let text = match (&out.table, cli.pretty) {
                (Some(t), true) => t.clone(),
                (_, true) => serde_json::to_string_pretty(&out.value).expect("JSON values serialize"),
                _ => out.value.to_string(),
            };
            println!("{text}");
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Resource(_) => 3,
                _ => 2,
            })
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let cap = host_cap(cli.max_host)?;
    match &cli.command {
        Command::Rank(a) => rank(&a.host, cap),
        Command::Game(a) => game(a, cap),
        Command::Construct(c) => construct(c),
        Command::Certify(a) => certify(a),
        Command::Ordinal(a) => ordinal(a),
        Command::SearchN(a) => {
            let report = search_universality_number(a.class.parse()?, a.rank, a.max_size)?;
            Ok(Outcome::ok(to_value(&report)))
        }
        Command::Verify(a) => verify(a),
    }
}

fn host_cap(flag: Option<usize>) -> Result<usize> {
    let cap = match (flag, std::env::var(HOST_CAP_ENV)) {
        (Some(c), _) => c,
        (None, Ok(s)) => s
            .trim()
            .parse()
            .map_err(|_| Error::Input(format!("{HOST_CAP_ENV} must be a positive integer, got `{s}`")))?,
        (None, Err(_)) => DEFAULT_HOST_CAP,
    };
    if cap == 0 {
        return Err(Error::Input("the host cap must be positive".into()));
    }
    Ok(cap)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports always serialize")
}

fn read_document(path: &Path) -> Result<StructureDocument> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Input(format!("bad structure JSON in {}: {e}", path.display())))
}

fn read_structure(path: &Path) -> Result<FiniteStructure> {
    read_document(path)?.into_structure()
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    std::fs::write(path, text + "\n").map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}

fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::Input(format!("`{t}` is not a vertex id"))))
        .collect()
}

fn load_host(a: &HostArgs, cap: usize) -> Result<(FiniteStructure, ClassOracle, Vec<usize>)> {
    let oracle: ClassOracle = a.class.parse()?;
    let host = match (&a.host, a.size) {
        (Some(p), None) => read_structure(p)?,
        (None, Some(m)) if oracle == ClassOracle::LinearOrder => FiniteStructure::chain(m),
        (None, Some(_)) => return Err(Error::Input("--size is only available for --class linear-order".into())),
        (Some(_), Some(_)) => return Err(Error::Input("give either --host or --size, not both".into())),
        (None, None) => return Err(Error::Input("a host is required (--host FILE or --size N)".into())),
    };
    if host.size() > cap {
        return Err(Error::Resource(format!(
            "host has {} vertices, above the cap of {cap} (set {HOST_CAP_ENV} or --max-host to raise it)",
            host.size()
        )));
    }
    let subset = parse_list(&a.subset)?;
    Ok((host, oracle, subset))
}

fn rank(a: &HostArgs, cap: usize) -> Result<Outcome> {
    let (host, oracle, subset) = load_host(a, cap)?;
    let mut memo = RankMemo::with_host_cap(host, oracle, cap)?;
    let r = memo.rank_subset(&subset)?;
    let witness = if r == 0 {
        json!({ "unrealized": memo.rank_zero_witness(&subset)? })
    } else {
        let m = memo.pessimal_move(&subset)?;
        json!({
            "type_index": m.type_index,
            "proposal": m.proposal,
            "realizations": m.realizations,
            "reply": m.reply,
        })
    };
    Ok(Outcome::ok(json!({ "rank": r.to_string(), "witness": witness })))
}

fn game(a: &GameArgs, cap: usize) -> Result<Outcome> {
    let (host, oracle, subset) = load_host(&a.host, cap)?;
    if a.interactive {
        return play(host, oracle, &subset, a.side, cap);
    }
    let solution = game_value(&host, oracle, &subset)?;
    let positions: Vec<Value> = solution.positions.values().map(to_value).collect();
    Ok(Outcome::ok(json!({ "value": solution.value.to_string(), "positions": positions })))
}

/// The REPL. The transcript goes to standard error; standard output gets
/// one JSON summary when the play ends or input runs out.
fn play(host: FiniteStructure, oracle: ClassOracle, start: &[usize], side: Side, cap: usize) -> Result<Outcome> {
    let mut state = GameState::new(host.clone(), oracle, start)?;
    let mut memo = if side == Side::Both { None } else { Some(RankMemo::with_host_cap(host, oracle, cap)?) };
    let stdin = io::stdin();
    let mut lines = stdin.lock().lines();
    let mut err = io::stderr();
    while !state.is_terminal() {
        let human = match (side, state.to_move()) {
            (Side::Both, _) | (Side::One, Player::One) | (Side::Two, Player::Two) => true,
            _ => false,
        };
        let mv = if human {
            let _ = writeln!(err, "round {} current {:?}, player {} to move", state.round(), state.current(), state.to_move());
            if let Some(t) = state.pending() {
                let _ = writeln!(err, "pending type {}", to_value(t));
            } else {
                for (i, t) in state.legal_types()?.iter().enumerate() {
                    let _ = writeln!(err, "  type {i}: {}", to_value(t));
                }
            }
            let _ = writeln!(err, "legal: {}", state.legal_moves()?.join(", "));
            let Some(line) = lines.next() else { break };
            let line = line.map_err(|e| Error::Input(format!("cannot read standard input: {e}")))?;
            match parse_move(&line) {
                Some(mv) => mv,
                None if line.trim() == "quit" => break,
                None => {
                    let _ = writeln!(err, "expected `type <i>`, `pick <v>` or `quit`");
                    continue;
                }
            }
        } else {
            let memo = memo.as_mut().expect("a computer side has a memo");
            computer_move(&state, memo)?
        };
        match game_step(&state, mv) {
            Ok(next) => state = next,
            Err(e @ Error::Move { .. }) => {
                let _ = writeln!(err, "{e}");
                continue;
            }
            Err(e) => return Err(e),
        }
    }
    if let Some(r) = state.lost_at() {
        let _ = writeln!(err, "player II cannot answer in round {r}");
    }
    let history: Vec<Value> = state.history().iter().map(|(t, z)| json!({ "type": t, "pick": z })).collect();
    Ok(Outcome::ok(json!({
        "rounds": state.round(),
        "lost_at": state.lost_at(),
        "current": state.current(),
        "history": history,
    })))
}

fn parse_move(line: &str) -> Option<GameMove> {
    let mut words = line.split_whitespace();
    let (verb, arg) = (words.next()?, words.next()?.parse().ok()?);
    if words.next().is_some() {
        return None;
    }
    match verb {
        "type" => Some(GameMove::Propose(arg)),
        "pick" => Some(GameMove::Pick(arg)),
        _ => None,
    }
}

/// I proposes a pessimal type; II picks the realization of highest rank,
/// lowest id first.
fn computer_move(state: &GameState, memo: &mut RankMemo) -> Result<GameMove> {
    match state.to_move() {
        Player::One => {
            let m = memo.pessimal_move(state.current())?;
            let i = state.legal_types()?.iter().position(|t| *t == m.proposal).expect("pessimal types are good types");
            Ok(GameMove::Propose(i))
        }
        Player::Two => {
            let mut best: Option<(usize, usize)> = None;
            for z in state.legal_picks() {
                let mut next = state.current().to_vec();
                next.push(z);
                let r = memo.rank_subset(&next)?;
                if best.map_or(true, |(b, _)| r > b) {
                    best = Some((r, z));
                }
            }
            Ok(GameMove::Pick(best.expect("II moves only when a pick exists").1))
        }
    }
}

fn emit(value: Value, out: &Option<PathBuf>, summary: Value) -> Result<Outcome> {
    match out {
        Some(p) => {
            write_json(p, &value)?;
            Ok(Outcome::ok(summary))
        }
        None => Ok(Outcome::ok(value)),
    }
}

fn construct(c: &Construct) -> Result<Outcome> {
    match c {
        Construct::Hn { class, n, cap, out } => {
            let oracle: ClassOracle = class.parse()?;
            let l = if oracle == ClassOracle::Tournament {
                let size = hn_size(&oracle, *n)?;
                if size > *cap {
                    return Err(Error::Resource(format!("H_{n} would have {size} vertices, above the cap of {cap}")));
                }
                build_tournament_hn(*n)?
            } else {
                let sig = oracle
                    .signature()
                    .ok_or_else(|| Error::Input(format!("class `{oracle}` has no fixed signature")))?;
                build_graph_hn(&sig, &oracle, *n, *cap)?
            };
            let layers: Vec<usize> = l.layers.iter().map(Vec::len).collect();
            let summary = json!({ "size": l.base.size(), "layer_sizes": layers, "out": out });
            emit(l.to_json(), out, summary)
        }
        Construct::Kernel { kernel, leaves, mode, embeddings, out } => {
            let h = read_structure(kernel)?;
            let mode: KernelMode = mode.parse()?;
            if !embeddings.is_empty() && embeddings.len() != leaves.len() {
                return Err(Error::Input(format!(
                    "{} embeddings given for {} leaves",
                    embeddings.len(),
                    leaves.len()
                )));
            }
            let mut parts = Vec::new();
            for (k, path) in leaves.iter().enumerate() {
                let leaf = read_structure(path)?;
                let emb = match embeddings.get(k) {
                    Some(s) => parse_list(s)?,
                    None => (0..h.size()).collect(),
                };
                parts.push((leaf, emb));
            }
            let a = kernel_amalgam(&h, &parts, mode)?;
            let summary = json!({ "size": a.structure.size(), "kernel_size": a.kernel_size, "out": out });
            let value = json!({
                "structure": a.structure.to_json(),
                "kernel_size": a.kernel_size,
                "leaf_maps": a.leaf_maps,
            });
            emit(value, out, summary)
        }
        Construct::Sum { kind, parts, out } => {
            let parts = parts.iter().map(|p| read_structure(p)).collect::<Result<Vec<_>>>()?;
            let kind = match kind {
                Kind::LinearOrder => SumKind::LinearOrder,
                Kind::Tournament => SumKind::Tournament,
            };
            let x = ordered_sum(&parts, kind)?;
            let summary = json!({ "size": x.size(), "out": out });
            emit(x.to_json(), out, summary)
        }
    }
}

fn certify(a: &CertifyArgs) -> Result<Outcome> {
    if !a.cover && a.no_complete.is_none() {
        return Err(Error::Input("nothing to certify: give --cover and/or --no-complete N".into()));
    }
    let doc = read_document(&a.host)?;
    let layers = doc.layers.clone().ok_or_else(|| Error::Input("the host has no `layers` field".into()))?;
    let l = LayeredStructure { base: doc.into_structure()?, layers, provenance: Vec::new() };
    l.check_partition()?;
    let mut value = serde_json::Map::new();
    let mut pass = true;
    if a.cover {
        let r = certify_cover_property(&l, &a.class.parse()?)?;
        pass &= r.pass;
        value.insert("cover".into(), to_value(&r));
    }
    if let Some(n) = a.no_complete {
        let r = certify_no_large_complete(&l, n)?;
        pass &= r.pass;
        value.insert("no_complete".into(), to_value(&r));
    }
    value.insert("pass".into(), pass.into());
    Ok(Outcome { value: value.into(), pass, table: None })
}

fn ordinal(a: &OrdinalArgs) -> Result<Outcome> {
    let alpha: Ordinal = a.expr.parse()?;
    Ok(match a.op {
        OrdinalOp::Rank => Outcome::ok(json!({ "rank": rank_of_ordinal(&alpha) })),
        OrdinalOp::Zrank => Outcome::ok(json!({ "rank": rank_of_z_times(&alpha)? })),
        OrdinalOp::Reversed => Outcome::ok(json!({ "rank": rank_of_reversed_ordinal(&alpha) })),
        OrdinalOp::Certify => {
            let r = certify_successor_steps(&alpha)?;
            Outcome { pass: r.pass, value: to_value(&r), table: None }
        }
        OrdinalOp::Witness => {
            let w = rp_witness(&alpha)?;
            Outcome::ok(json!({ "witness": w, "rank": w.rank() }))
        }
    })
}

fn verify(a: &VerifyArgs) -> Result<Outcome> {
    let reports = run_suites(&a.suite, &SuiteConfig { seed: a.seed })?;
    let failed: Vec<&SuiteReport> = reports.iter().filter(|r| !r.pass).collect();
    let first = failed.first().map(|r| json!({ "suite": r.name, "counterexample": r.counterexample }));
    let pass = failed.is_empty();
    let value = json!({
        "pass": pass,
        "seed": a.seed,
        "passed": reports.len() - failed.len(),
        "failed": failed.len(),
        "first_failure": first,
        "suites": reports,
    });
    Ok(Outcome { value, pass, table: Some(table(&reports)) })
}

fn table(reports: &[SuiteReport]) -> String {
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(5).max(5);
    let mut s = format!("{:<width$}  criterion  result  checked\n", "suite");
    for r in reports {
        let crit = r.criterion.map_or("-".to_string(), |c| c.to_string());
        let verdict = if r.pass { "pass" } else { "FAIL" };
        s += &format!("{:<width$}  {crit:>9}  {verdict:<6}  {}\n", r.name, r.checked);
    }
    s.pop();
    s
}
