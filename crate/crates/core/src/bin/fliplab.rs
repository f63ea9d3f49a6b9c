//! `fliplab`: run FLIP, analyze traces, extract and check certificates,
//! build hard instances, reduce CSPs to BFOP, and run experiments.
//!
//! Exit codes: 0 success, 1 usage, 2 validation, 3 internal invariant (a
//! diagnostic bundle is written next to `--out`, or to
//! `fliplab-diagnostic.json` in the working directory).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use fliplab::arcs::{classify, find_arcs, is_trivial, matrix_csv, rank_of_arcs, MoveSequence};
use fliplab::csp::{
    read_wcnf, reduce_coordination, reduce_directed_cut, reduce_hopfield, reduce_max2sat, Assignment, Bfop, BfopFile,
};
use fliplab::error::{Error, Result};
use fliplab::extraction::{extract, verify_certificate, Certificate, ExtractOptions, SequenceFile};
use fliplab::flip::{default_step_cap, min_arc_gain, run_dynamics, verify_trace, MaxCut, PivotRule, TraceFile};
use fliplab::hard::{build_hard, preset, scan, ScanMode};
use fliplab::instance::{Configuration, DistributionSpec, Graph, GraphFile};
use fliplab::lab::{eps_improving_census, mc_lemma_probability, rows_to_csv, run_experiment, ExperimentPlan};
use fliplab::rng::rng_from_seed;

#[derive(Parser, Debug)]
#[command(name = "fliplab", version, about = "FLIP local search laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Seed for every random choice the command makes.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run FLIP on a graph or BFOP file and write the trace as JSON.
    Run(RunArgs),
    /// Arcs, rank and classification of a trace or sequence.
    Analyze(AnalyzeArgs),
    /// Extract a certificate from a trace or sequence file.
    Extract(ExtractArgs),
    /// Verify a certificate against its sequence and graph.
    CheckCert(CheckArgs),
    /// Build a layered low-rank instance and scan substring ranks (CSV).
    Hard(HardArgs),
    /// Reduce a Max-CSP to a BFOP JSON file.
    Reduce(ReduceArgs),
    /// Monte Carlo estimate of the joint small-window probability.
    Mc(McArgs),
    /// Run an experiment plan and write one CSV row per cell.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Graph JSON (`n`, `edges`, optional `weights` or `dists`).
    #[arg(long, conflicts_with = "bfop", required_unless_present = "bfop")]
    graph: Option<PathBuf>,
    /// BFOP JSON (`n`, `binary`, `unary`).
    #[arg(long)]
    bfop: Option<PathBuf>,
    #[arg(long, default_value = "first")]
    pivot: PivotArg,
    /// Start: `plus` (all +1 / all 0), `minus`, `random`, or a comma list of ±1 (or 0/1 for BFOP).
    #[arg(long, default_value = "plus")]
    init: String,
    /// Defaults to 10 n^3.
    #[arg(long)]
    step_cap: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PivotArg {
    First,
    Best,
    Random,
}

impl From<PivotArg> for PivotRule {
    fn from(p: PivotArg) -> Self {
        match p {
            PivotArg::First => PivotRule::First,
            PivotArg::Best => PivotRule::Best,
            PivotArg::Random => PivotRule::Random,
        }
    }
}

#[derive(Args, Debug)]
struct SeqInput {
    #[arg(long)]
    graph: PathBuf,
    /// Trace JSON as written by `run`.
    #[arg(long, conflicts_with = "seq", required_unless_present = "seq")]
    trace: Option<PathBuf>,
    /// Sequence JSON (`n`, `moves`, `gamma`).
    #[arg(long)]
    seq: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: SeqInput,
    /// Also count ε-improving windows (trace input only).
    #[arg(long, requires = "window")]
    eps: Option<f64>,
    #[arg(long)]
    window: Option<usize>,
    /// Write the arc matrix as CSV here.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    #[command(flatten)]
    input: SeqInput,
    /// Accept sequences whose length is not 5n.
    #[arg(long)]
    any_length: bool,
    /// Extract from the first 5n moves only.
    #[arg(long)]
    prefix: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    input: SeqInput,
    #[arg(long)]
    cert: PathBuf,
    /// Match `extract --prefix`.
    #[arg(long)]
    prefix: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct HardArgs {
    #[arg(long, required_unless_present = "preset")]
    d: Option<usize>,
    #[arg(long, required_unless_present = "preset")]
    n1: Option<usize>,
    #[arg(long, required_unless_present = "preset")]
    blocks: Option<usize>,
    /// Derive d, N1 and L from a target node count.
    #[arg(long, conflicts_with_all = ["d", "n1", "blocks"])]
    preset: Option<usize>,
    /// `full` or `block-aligned`.
    #[arg(long, default_value = "block-aligned")]
    scan: String,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Per-substring rows as CSV.
    #[arg(long)]
    rows: Option<PathBuf>,
    /// Write the graph and sequence (graph JSON + sequence JSON).
    #[arg(long)]
    emit: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[arg(value_enum)]
    kind: ReduceKind,
    /// WCNF for max2sat; JSON for the others.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReduceKind {
    Max2sat,
    Dcut,
    Hopfield,
    Coordgame,
}

#[derive(serde::Deserialize)]
struct DcutFile {
    n: usize,
    /// `[tail, head, weight]`
    arcs: Vec<(usize, usize, f64)>,
}

#[derive(serde::Deserialize)]
struct HopfieldFile {
    n: usize,
    edges: Vec<[usize; 2]>,
    weights: Vec<f64>,
    thresholds: Vec<f64>,
}

#[derive(serde::Deserialize)]
struct CoordFile {
    n: usize,
    edges: Vec<[usize; 2]>,
    /// Per edge, `payoff[a_u][a_v]`.
    payoffs: Vec<[[f64; 2]; 2]>,
}

#[derive(Args, Debug)]
struct McArgs {
    /// Integer vectors, rows separated by `;`, entries by `,`.
    #[arg(long)]
    vectors: String,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    /// Every coordinate is uniform on [lo, hi].
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    lo: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    hi: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Experiment plan JSON.
    #[arg(long)]
    plan: PathBuf,
    /// Override the plan's trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Override the grid with `n:phi` pairs, comma separated.
    #[arg(long)]
    cells: Option<String>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[command(flatten)]
    common: Common,
}

/// Tracks input files so a diagnostic bundle can reproduce a failure.
#[derive(Default)]
struct Session {
    inputs: BTreeMap<String, String>,
}

impl Session {
    fn read(&mut self, path: &Path) -> Result<String> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::validation(format!("{}: cannot read: {e}", path.display())))?;
        self.inputs.insert(path.display().to_string(), text.clone());
        Ok(text)
    }

    fn json<T: DeserializeOwned>(&mut self, path: &Path) -> Result<T> {
        let text = self.read(path)?;
        serde_json::from_str(&text).map_err(|e| Error::validation(format!("{}: {e}", path.display())))
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::validation(format!("{}: cannot write: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(out: &Option<PathBuf>, v: &T) -> Result<()> {
    emit(out, &(serde_json::to_string_pretty(v)? + "\n"))
}

fn parse_signs(s: &str, n: usize) -> Result<Vec<i8>> {
    let v: Vec<i8> = s
        .split(',')
        .map(|t| t.trim().parse::<i8>().map_err(|_| Error::validation(format!("--init: bad entry '{t}'"))))
        .collect::<Result<_>>()?;
    if v.len() != n {
        return Err(Error::validation(format!("--init: {} entries for {n} nodes", v.len())));
    }
    Ok(v)
}

/// Load `(graph, sequence, γ, trace)` from `--graph` plus `--trace` or `--seq`.
fn load_input(
    sess: &mut Session,
    input: &SeqInput,
) -> Result<(Graph, MoveSequence, Configuration, Option<fliplab::flip::FlipTrace<f64>>)> {
    let gf: GraphFile = sess.json(&input.graph)?;
    let graph = gf.graph().map_err(|e| Error::validation(format!("{}: {e}", input.graph.display())))?;
    if let Some(p) = &input.trace {
        let tf: TraceFile = sess.json(p)?;
        let trace = tf.into_trace().map_err(|e| Error::validation(format!("{}: {e}", p.display())))?;
        let seq = MoveSequence::new(graph.n(), trace.moves.clone())
            .map_err(|e| Error::validation(format!("{}: 'moves': {e}", p.display())))?;
        Ok((graph, seq, trace.initial.clone(), Some(trace)))
    } else {
        let p = input.seq.as_ref().expect("clap requires --trace or --seq");
        let sf: SequenceFile = sess.json(p)?;
        if sf.n != graph.n() {
            return Err(Error::validation(format!("{}: 'n' = {} but the graph has {}", p.display(), sf.n, graph.n())));
        }
        let (seq, gamma) = sf.parts().map_err(|e| Error::validation(format!("{}: {e}", p.display())))?;
        Ok((graph, seq, gamma, None))
    }
}

fn prefix_of(seq: &MoveSequence, prefix: bool) -> MoveSequence {
    let len = 5 * seq.n();
    if prefix && seq.len() > len {
        seq.slice(1, len)
    } else {
        seq.clone()
    }
}

fn cmd_run(sess: &mut Session, a: &RunArgs) -> Result<String> {
    let mut rng = rng_from_seed(a.common.seed);
    let rule = PivotRule::from(a.pivot);
    if let Some(p) = &a.graph {
        let inst = sess
            .json::<GraphFile>(p)?
            .into_instance(a.common.seed)
            .map_err(|e| Error::validation(format!("{}: {e}", p.display())))?;
        let n = inst.n();
        let init = match a.init.as_str() {
            "plus" => Configuration::uniform(n, 1),
            "minus" => Configuration::uniform(n, -1),
            "random" => Configuration::random(n, &mut rng),
            s => Configuration::from_signs(&parse_signs(s, n)?)?,
        };
        let sys = MaxCut::new(&inst);
        let trace = run_dynamics(&sys, init, rule, a.step_cap.unwrap_or_else(|| default_step_cap(n)), a.common.seed);
        verify_trace(&sys, &trace)?;
        emit_json(&a.common.out, &TraceFile::from_trace(&trace)?)?;
        let cut = inst.cut_weight(&trace.final_state)?;
        Ok(format!("steps={} terminated={} cut={cut}", trace.steps(), trace.terminated))
    } else {
        let p = a.bfop.as_ref().expect("clap requires --graph or --bfop");
        let inst = sess
            .json::<BfopFile>(p)?
            .into_instance()
            .map_err(|e| Error::validation(format!("{}: {e}", p.display())))?;
        let n = inst.n();
        let init = match a.init.as_str() {
            "plus" => Assignment::zeros(n),
            "minus" => Assignment::from_bits(&vec![1; n])?,
            "random" => Assignment::random(n, &mut rng),
            s => {
                let bits: Vec<u8> = s
                    .split(',')
                    .map(|t| t.trim().parse().map_err(|_| Error::validation(format!("--init: bad bit '{t}'"))))
                    .collect::<Result<_>>()?;
                Assignment::from_bits(&bits)?
            }
        };
        let sys = Bfop::new(&inst);
        let trace = run_dynamics(&sys, init, rule, a.step_cap.unwrap_or_else(|| default_step_cap(n)), a.common.seed);
        verify_trace(&sys, &trace)?;
        #[derive(Serialize)]
        struct BfopTrace<'a> {
            initial: &'a [u8],
            moves: &'a [usize],
            gains: &'a [f64],
            terminated: bool,
            objective: f64,
        }
        let objective = inst.objective(&trace.final_state)?;
        emit_json(
            &a.common.out,
            &BfopTrace {
                initial: trace.initial.bits(),
                moves: &trace.moves,
                gains: &trace.gains,
                terminated: trace.terminated,
                objective,
            },
        )?;
        Ok(format!("steps={} terminated={} objective={objective}", trace.steps(), trace.terminated))
    }
}

fn cmd_analyze(sess: &mut Session, a: &AnalyzeArgs) -> Result<String> {
    let (graph, seq, gamma, trace) = load_input(sess, &a.input)?;
    let arcs = find_arcs(&seq);
    let cls = classify(&seq, &graph);
    let rank = rank_of_arcs(&seq, &arcs, &graph);
    let groups: Vec<BTreeMap<&str, usize>> = (1..=cls.params.t)
        .map(|i| {
            BTreeMap::from([
                ("group", i),
                ("arcs", cls.group_size(i)),
                ("good", cls.num_good_in_group(i)),
                ("long", cls.in_group(i).filter(|x| x.long).count()),
                ("dual_bad", cls.in_group(i).filter(|x| x.dual_bad).count()),
                ("maxlen", cls.group_maxlen[i]),
            ])
        })
        .collect();
    let census = match (a.eps, a.window, &trace) {
        (Some(eps), Some(w), Some(t)) => Some(eps_improving_census(t, eps, w)?),
        (Some(_), _, None) => return Err(Error::validation("--eps needs a --trace input")),
        _ => None,
    };
    if let Some(p) = &a.matrix {
        fs::write(p, matrix_csv(&seq, &arcs, &gamma, &graph)?)?;
    }
    let report = serde_json::json!({
        "n": seq.n(),
        "m": seq.len(),
        "arcs": arcs.len(),
        "trivial_arcs": arcs.iter().filter(|x| is_trivial(&seq, x, &graph)).count(),
        "rank": rank,
        "ratio": if seq.is_empty() { 0.0 } else { rank as f64 / seq.len() as f64 },
        "params": cls.params,
        "bad": cls.num_bad(),
        "groups": groups,
        "min_arc_gain": trace.as_ref().and_then(min_arc_gain),
        "eps_improving_windows": census,
    });
    emit_json(&a.common.out, &report)?;
    Ok(format!("arcs={} rank={rank}", arcs.len()))
}

fn cmd_extract(sess: &mut Session, a: &ExtractArgs) -> Result<String> {
    let (graph, seq, gamma, _) = load_input(sess, &a.input)?;
    let seq = prefix_of(&seq, a.prefix);
    let ex = extract(&seq, &gamma, &graph, ExtractOptions { any_length: a.any_length })?;
    emit_json(&a.common.out, &ex.certificate)?;
    Ok(format!(
        "case={} |B|={} rank={} ratio={:.4}",
        ex.certificate.case.label(),
        ex.certificate.b.len(),
        ex.certificate.rank,
        ex.certificate.ratio
    ))
}

fn cmd_check(sess: &mut Session, a: &CheckArgs) -> Result<String> {
    let (graph, seq, gamma, _) = load_input(sess, &a.input)?;
    let seq = prefix_of(&seq, a.prefix);
    let cert: Certificate = sess.json(&a.cert)?;
    verify_certificate(&seq, &gamma, &cert, &graph)
        .map_err(|e| Error::validation(format!("{}: invalid certificate: {e}", a.cert.display())))?;
    emit(&a.common.out, "valid\n")?;
    Ok("valid".into())
}

fn cmd_hard(a: &HardArgs) -> Result<String> {
    let inst = match a.preset {
        Some(n) => preset(n)?,
        None => build_hard(a.d.unwrap(), a.n1.unwrap(), a.blocks.unwrap())?,
    };
    let mode = ScanMode::from_str(&a.scan)?;
    let res = scan(&inst, mode, a.threads)?;
    if let Some(p) = &a.rows {
        let mut w = csv::Writer::from_path(p)?;
        for r in &res.rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    if let Some(p) = &a.emit {
        let gamma = Configuration::uniform(inst.graph.n(), 1);
        let bundle = serde_json::json!({
            "graph": GraphFile { n: inst.graph.n(), edges: inst.graph.edges().iter().map(|&(u, v)| [u, v]).collect(), weights: None, dists: None },
            "sequence": SequenceFile::new(&inst.seq, &gamma)?,
        });
        fs::write(p, serde_json::to_string_pretty(&bundle)?)?;
    }
    #[derive(Serialize)]
    struct Summary {
        d: usize,
        n1: usize,
        blocks: usize,
        n: usize,
        len: usize,
        mode: &'static str,
        max_ratio: f64,
        argmax_start: usize,
        argmax_len: usize,
        bound_checks: usize,
    }
    let am = res.argmax.unwrap_or(fliplab::hard::ScanRow { start: 0, len: 0, rank: 0, ratio: 0.0 });
    let summary = Summary {
        d: inst.d,
        n1: inst.n1,
        blocks: inst.blocks,
        n: inst.graph.n(),
        len: inst.len(),
        mode: if mode == ScanMode::Full { "full" } else { "block-aligned" },
        max_ratio: res.max_ratio,
        argmax_start: am.start,
        argmax_len: am.len,
        bound_checks: res.bound_checks,
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.serialize(&summary)?;
    let text = String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?).expect("utf-8 csv");
    emit(&a.common.out, &text)?;
    Ok(format!("max_ratio={:.6} bound_checks={}", res.max_ratio, res.bound_checks))
}

fn cmd_reduce(sess: &mut Session, a: &ReduceArgs) -> Result<String> {
    let at = |e: Error| Error::validation(format!("{}: {e}", a.input.display()));
    let inst = match a.kind {
        ReduceKind::Max2sat => {
            let (n, clauses) = read_wcnf(&sess.read(&a.input)?).map_err(at)?;
            reduce_max2sat(n, &clauses).map_err(at)?
        }
        ReduceKind::Dcut => {
            let f: DcutFile = sess.json(&a.input)?;
            reduce_directed_cut(f.n, &f.arcs).map_err(at)?
        }
        ReduceKind::Hopfield => {
            let f: HopfieldFile = sess.json(&a.input)?;
            let g = Graph::new(f.n, f.edges.iter().map(|e| (e[0], e[1])).collect()).map_err(at)?;
            reduce_hopfield(&g, &f.weights, &f.thresholds).map_err(at)?
        }
        ReduceKind::Coordgame => {
            let f: CoordFile = sess.json(&a.input)?;
            let g = Graph::new(f.n, f.edges.iter().map(|e| (e[0], e[1])).collect()).map_err(at)?;
            reduce_coordination(&g, &f.payoffs).map_err(at)?
        }
    };
    emit_json(&a.common.out, &inst.to_file())?;
    Ok(format!("n={} binary={} unary={}", inst.n(), inst.binary().len(), inst.unary().len()))
}

fn cmd_mc(a: &McArgs) -> Result<String> {
    let vectors: Vec<Vec<i64>> = a
        .vectors
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|t| t.trim().parse().map_err(|_| Error::validation(format!("--vectors: bad entry '{t}'"))))
                .collect()
        })
        .collect::<Result<_>>()?;
    let dim = vectors.first().map_or(0, Vec::len);
    let dist = DistributionSpec::uniform(a.lo, a.hi)?;
    let r = mc_lemma_probability(&vectors, &vec![dist; dim], a.eps, a.samples, a.common.seed)?;
    emit_json(&a.common.out, &r)?;
    Ok(format!("p={:.6} ± {:.6} bound={:.6}", r.probability, r.ci_half_width, r.bound))
}

fn cmd_bench(sess: &mut Session, a: &BenchArgs) -> Result<String> {
    let mut plan: ExperimentPlan = sess.json(&a.plan)?;
    plan.base_seed = a.common.seed;
    if let Some(t) = a.trials {
        plan.trials = t;
    }
    if let Some(c) = &a.cells {
        let cells = c
            .split(',')
            .map(|cell| {
                let (n, phi) =
                    cell.split_once(':').ok_or_else(|| Error::validation(format!("--cells: '{cell}' is not n:phi")))?;
                let n = n.trim().parse().map_err(|_| Error::validation(format!("--cells: bad n in '{cell}'")))?;
                let phi = phi.trim().parse().map_err(|_| Error::validation(format!("--cells: bad phi in '{cell}'")))?;
                Ok((n, phi))
            })
            .collect::<Result<Vec<_>>>()?;
        plan.cells = Some(cells);
    }
    let rows = run_experiment(&plan, a.threads)?;
    emit(&a.common.out, &rows_to_csv(&rows)?)?;
    let timeouts: usize = rows.iter().map(|r| r.timeouts).sum();
    Ok(format!("cells={} timeouts={timeouts}", rows.len()))
}

fn dispatch(sess: &mut Session, cmd: &Command) -> Result<String> {
    match cmd {
        Command::Run(a) => cmd_run(sess, a),
        Command::Analyze(a) => cmd_analyze(sess, a),
        Command::Extract(a) => cmd_extract(sess, a),
        Command::CheckCert(a) => cmd_check(sess, a),
        Command::Hard(a) => cmd_hard(a),
        Command::Reduce(a) => cmd_reduce(sess, a),
        Command::Mc(a) => cmd_mc(a),
        Command::Bench(a) => cmd_bench(sess, a),
    }
}

fn out_of(cmd: &Command) -> Option<&PathBuf> {
    match cmd {
        Command::Run(a) => a.common.out.as_ref(),
        Command::Analyze(a) => a.common.out.as_ref(),
        Command::Extract(a) => a.common.out.as_ref(),
        Command::CheckCert(a) => a.common.out.as_ref(),
        Command::Hard(a) => a.common.out.as_ref(),
        Command::Reduce(a) => a.common.out.as_ref(),
        Command::Mc(a) => a.common.out.as_ref(),
        Command::Bench(a) => a.common.out.as_ref(),
    }
}

fn diagnostic_path(out: Option<&PathBuf>) -> PathBuf {
    match out {
        Some(p) => {
            let mut s = p.clone().into_os_string();
            s.push(".diagnostic.json");
            s.into()
        }
        None => PathBuf::from("fliplab-diagnostic.json"),
    }
}

/// Map a command outcome to an exit code, writing the bundle on invariant failures.
fn finish(argv: &[String], out: Option<&PathBuf>, sess: &Session, res: Result<String>) -> u8 {
    match res {
        Ok(summary) => {
            eprintln!("{summary}");
            0
        }
        Err(Error::Invariant(msg)) => {
            let path = diagnostic_path(out);
            let bundle = serde_json::json!({ "argv": argv, "assertion": msg, "inputs": sess.inputs });
            match fs::write(&path, serde_json::to_string_pretty(&bundle).unwrap_or_default()) {
                Ok(()) => eprintln!("internal invariant violated: {msg}\ndiagnostic bundle: {}", path.display()),
                Err(e) => eprintln!("internal invariant violated: {msg}\n(could not write {}: {e})", path.display()),
            }
            3
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut sess = Session::default();
    let res = dispatch(&mut sess, &cli.command);
    ExitCode::from(finish(&argv, out_of(&cli.command), &sess, res))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariant_failure_writes_bundle() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("x.json");
        let mut sess = Session::default();
        sess.inputs.insert("g.json".into(), "{}".into());
        let code = finish(&["fliplab".into()], Some(&out), &sess, Err(Error::invariant("boom")));
        assert_eq!(code, 3);
        let bundle: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("x.json.diagnostic.json")).unwrap()).unwrap();
        assert_eq!(bundle["assertion"], "boom");
        assert_eq!(bundle["inputs"]["g.json"], "{}");
    }

    #[test]
    fn exit_codes() {
        let sess = Session::default();
        assert_eq!(finish(&[], None, &sess, Ok("ok".into())), 0);
        assert_eq!(finish(&[], None, &sess, Err(Error::validation("bad"))), 2);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
