use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use qinsdel::decoder::{self, ChannelSpec};
use qinsdel::editgraph::{self, ArcType, DpPath};
use qinsdel::harness::{self, ClassicalConfig, ExperimentConfig, Fault, SigmaKind};
use qinsdel::io::{self, StateDoc};
use qinsdel::qsim::{self, PureState};
use qinsdel::seqcore::{IndexSet, Sequence};
use qinsdel::{mhcode, Error, Result};

/// Insertion/deletion decoding workbench for embedded qudit codes.
#[derive(Parser)]
#[command(name = "qinsdel", version)]
struct Cli {
    /// Alphabet size for sequence files; inferred from the symbols if absent.
    #[arg(long, global = true)]
    q: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the indel-distance table, both extremal paths and the candidates.
    Matrix(PairArgs),
    /// Print the insertion candidates and the exact index set.
    Candidates(PairArgs),
    /// Encode a message into an embedded codeword.
    Encode(EncodeArgs),
    /// Apply one insertion followed by one deletion to a state.
    Channel(ChannelArgs),
    /// Decode a received state and write the decode report.
    Decode(DecodeArgs),
    /// Run the end-to-end sweep.
    Experiment(ExperimentArgs),
    /// Exhaustive verification suites.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Args)]
struct PairArgs {
    /// File holding x.
    x: PathBuf,
    /// File holding y.
    y: PathBuf,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CodeArgs {
    /// Experiment config; only its `code` section is used here.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Encode the logical basis state `k` instead of a seeded random message.
    #[arg(long)]
    basis: Option<usize>,
    /// Where to write the codeword.
    #[arg(long)]
    out: PathBuf,
    /// Where to write the message.
    #[arg(long)]
    message_out: Option<PathBuf>,
}

#[derive(Args)]
struct ChannelArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Input state (a codeword).
    #[arg(long)]
    state: PathBuf,
    /// Insertion index into the n-site state.
    #[arg(long)]
    j2: usize,
    /// Deletion index into the (n+1)-site state.
    #[arg(long)]
    j1: usize,
    /// Inserted state: basis:K, random:I or mixed.
    #[arg(long, default_value = "mixed")]
    sigma: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Received state.
    #[arg(long)]
    state: PathBuf,
    /// Expected message; enables the fidelity check.
    #[arg(long)]
    target: Option<PathBuf>,
    #[arg(long)]
    threshold: Option<f64>,
    /// Where to write the decoded message.
    #[arg(long)]
    message_out: Option<PathBuf>,
    /// Where to write the report; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// JSON report path; the CSV goes next to it unless the config names one.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Candidate, path and ball-intersection checks over exhaustive sweeps.
    Classical(ClassicalArgs),
    /// Base-code certificate, channel identities and the branch-enumerated sweep.
    Quantum(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    SwapPriorities,
    BottomOnly,
}

#[derive(Args)]
struct ClassicalArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Largest q^n to enumerate.
    #[arg(long)]
    budget: Option<u128>,
    /// Deletion budgets to sweep (repeatable); overrides the config.
    #[arg(long = "t")]
    t_values: Vec<usize>,
    /// Inject a defect to confirm the checks can fail.
    #[arg(long, value_enum)]
    fault: Option<FaultArg>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. }
        | Error::Config(_)
        | Error::Io(_)
        | Error::Json(_)
        | Error::Parameter(_)
        | Error::BudgetExceeded { .. } => 2,
        _ => 1,
    }
}

fn read_pair(args: &PairArgs, q: Option<u32>) -> Result<(Sequence, Sequence)> {
    let text_x = std::fs::read_to_string(&args.x).map_err(|e| Error::Io(format!("{}: {e}", args.x.display())))?;
    let text_y = std::fs::read_to_string(&args.y).map_err(|e| Error::Io(format!("{}: {e}", args.y.display())))?;
    let q = match q {
        Some(q) => q,
        None => {
            let x = io::parse_sequence(&text_x, u32::MAX)?;
            let y = io::parse_sequence(&text_y, u32::MAX)?;
            x.symbols().iter().chain(y.symbols()).max().map_or(2, |m| (m + 1).max(2))
        }
    };
    Ok((io::parse_sequence(&text_x, q)?, io::parse_sequence(&text_y, q)?))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fmt_set(s: &IndexSet) -> String {
    s.to_string()
}

fn path_json(p: &DpPath) -> serde_json::Value {
    json!({
        "vertices": p.vertices(),
        "arcs": p.arcs().iter().map(|a| a.number()).collect::<Vec<_>>(),
    })
}

fn cmd_pair(args: &PairArgs, q: Option<u32>, full: bool) -> Result<ExitCode> {
    let (x, y) = read_pair(args, q)?;
    let h = editgraph::edit_matrix(&x, &y)?;
    let bot = editgraph::path_bot(&x, &y, &h)?;
    let top = editgraph::path_top(&x, &y, &h)?;
    let (s1, s2) = (editgraph::f_insert(&bot, y.len()), editgraph::f_insert(&top, y.len()));
    let j = if x.len() == y.len() { Some(editgraph::oracle_j(&x, &y)?) } else { None };
    let text = if args.json {
        let mut v = json!({
            "q": x.alphabet_size(),
            "x": x.symbols(),
            "y": y.symbols(),
            "s1": s1.indices(),
            "s2": s2.indices(),
            "union": s1.union(&s2)?.indices(),
            "j": j.as_ref().map(|j| j.indices().to_vec()),
        });
        if full {
            let g = editgraph::build_graph(&x, &y, &h)?;
            let arcs: BTreeMap<String, _> = [ArcType::Up, ArcType::Diagonal, ArcType::Left]
                .into_iter()
                .map(|k| (k.number().to_string(), g.arcs(k)))
                .collect();
            v["matrix"] = json!(h.to_rows());
            v["distance"] = json!(h.distance());
            v["arcs"] = json!(arcs);
            v["path_bot"] = path_json(&bot);
            v["path_top"] = path_json(&top);
        }
        let mut s = serde_json::to_string_pretty(&v)?;
        s.push('\n');
        s
    } else {
        let mut s = String::new();
        if full {
            s += &format!("x = {x}\ny = {y}\n{h}d = {}\nbottom path: {bot}\ntop path: {top}\n", h.distance());
        }
        s += &format!("S1 = {}\nS2 = {}\nS1 u S2 = {}\n", fmt_set(&s1), fmt_set(&s2), fmt_set(&s1.union(&s2)?));
        if let Some(j) = &j {
            s += &format!("J = {}\n", fmt_set(j));
        }
        s
    };
    emit(&text, args.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn load_experiment(config: Option<&Path>, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut cfg = match config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_encode(args: &EncodeArgs) -> Result<ExitCode> {
    let cfg = load_experiment(args.code.config.as_deref(), args.code.seed)?;
    let code = cfg.code.build()?;
    let mu = match args.basis {
        Some(k) => PureState::basis(code.base().logical_spec(), &[k])?,
        None => harness::build_message(&code, cfg.seed, 0),
    };
    let psi = mhcode::mh_encode(&code, &mu)?;
    io::write_json(&args.out, &StateDoc::from_pure(&psi))?;
    if let Some(p) = &args.message_out {
        io::write_json(p, &StateDoc::from_pure(&mu))?;
    }
    println!("encoded {} logical site(s) into {} sites of dimension {}", code.base().k, code.n(), code.embedded_dim());
    Ok(ExitCode::SUCCESS)
}

fn cmd_channel(args: &ChannelArgs) -> Result<ExitCode> {
    let cfg = load_experiment(args.code.config.as_deref(), args.code.seed)?;
    let code = cfg.code.build()?;
    let rho = io::read_state(&args.state)?;
    let kind: SigmaKind = args.sigma.parse()?;
    let sigma = harness::build_sigma(kind, &code, cfg.seed)?;
    let out = decoder::apply_insdel(&rho, &ChannelSpec::new(args.j2, sigma, args.j1)?)?;
    io::write_state(&args.out, &out)?;
    println!("inserted {kind} at {} and deleted site {}; {} component(s)", args.j2, args.j1, out.len());
    Ok(ExitCode::SUCCESS)
}

fn cmd_decode(args: &DecodeArgs) -> Result<ExitCode> {
    let cfg = load_experiment(args.code.config.as_deref(), args.code.seed)?;
    let code = cfg.code.build()?;
    let rho = io::read_state(&args.state)?;
    let (message, mut report) = decoder::decode(&code, &rho, cfg.seed)?;
    let threshold = args.threshold.unwrap_or(cfg.threshold);
    let mut pass = true;
    if let Some(target) = &args.target {
        let mu = io::read_json::<StateDoc>(target)?.to_pure()?;
        let f = qsim::fidelity(&mu, &message)?;
        report.fidelity = Some(f);
        pass = f >= threshold;
    }
    if let Some(p) = &args.message_out {
        io::write_state(p, &message)?;
    }
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    emit(&text, args.out.as_deref())?;
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn sibling_csv(json: &Path) -> PathBuf {
    json.with_extension("csv")
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<ExitCode> {
    let mut cfg = load_experiment(args.config.as_deref(), args.seed)?;
    if let Some(out) = &args.out {
        cfg.output.json = Some(out.clone());
        if cfg.output.csv.is_none() {
            cfg.output.csv = Some(sibling_csv(out));
        }
    }
    let report = harness::cmd_experiment(&cfg, args.threads)?;
    let s = &report.summary;
    println!(
        "runs {}  passed {}  failed {}  branches {} (unitary-path {}, deletion-path {})  min fidelity {}",
        s.runs, s.passed, s.failed, s.branches, s.unitary_path_branches, s.deletion_path_branches, s.min_fidelity
    );
    for run in report.runs.iter().filter(|r| !r.pass).take(10) {
        println!(
            "FAIL run {} J1={} J2={} sigma={} fidelity={}{}",
            run.run_id,
            run.j1,
            run.j2,
            run.sigma_kind,
            run.fidelity,
            run.error.as_deref().map(|e| format!(" error: {e}")).unwrap_or_default()
        );
    }
    eprintln!("wall-clock {:.3} s on {} thread(s)", report.timing.wall_seconds, report.timing.threads);
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn write_out<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    if let Some(p) = out {
        io::write_json(p, value)?;
    }
    Ok(())
}

fn cmd_verify_classical(args: &ClassicalArgs) -> Result<ExitCode> {
    let mut cfg = match &args.config {
        Some(p) => ClassicalConfig::load(p)?,
        None => ClassicalConfig::default(),
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(b) = args.budget {
        cfg.budget = b;
    }
    if !args.t_values.is_empty() {
        cfg.t_values = args.t_values.clone();
    }
    if let Some(f) = args.fault {
        cfg.fault = Some(match f {
            FaultArg::SwapPriorities => Fault::SwapPriorities,
            FaultArg::BottomOnly => Fault::BottomOnly,
        });
    }
    let report = harness::cmd_verify_classical(&cfg)?;
    for c in &report.checks {
        let tag = if c.failures == 0 { "PASS" } else { "FAIL" };
        println!("{tag} {:<28} cases {:>8}  failures {}", c.name, c.cases, c.failures);
    }
    for ce in &report.counterexamples {
        println!("counterexample {}", serde_json::to_string(ce)?);
    }
    eprintln!("wall-clock {:.3} s", report.wall_seconds);
    write_out(args.out.as_deref(), &report)?;
    Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_verify_quantum(args: &ExperimentArgs) -> Result<ExitCode> {
    let cfg = load_experiment(args.config.as_deref(), args.seed)?;
    let report = harness::cmd_verify_quantum(&cfg, args.threads)?;
    let b = &report.base;
    println!(
        "{} base code: isometry defect {:e}, single-site KL residual {:e}, erasure KL residual {:e}",
        if b.pass { "PASS" } else { "FAIL" },
        b.isometry_defect,
        b.kl_residual_single_site,
        b.kl_residual_erasures
    );
    let c = &report.channel_identity;
    println!(
        "{} channel identity: {} cases, {} failures, min fidelity {}",
        if c.failures == 0 { "PASS" } else { "FAIL" },
        c.cases,
        c.failures,
        c.min_fidelity
    );
    let s = &report.experiment.summary;
    println!(
        "{} end-to-end: {} runs, {} failed, {} structural violations, min fidelity {}",
        if report.experiment.passed() { "PASS" } else { "FAIL" },
        s.runs,
        s.failed,
        s.structural_violations,
        s.min_fidelity
    );
    write_out(args.out.as_deref(), &report)?;
    Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Matrix(a) => cmd_pair(a, cli.q, true),
        Command::Candidates(a) => cmd_pair(a, cli.q, false),
        Command::Encode(a) => cmd_encode(a),
        Command::Channel(a) => cmd_channel(a),
        Command::Decode(a) => cmd_decode(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Verify(VerifyCommand::Classical(a)) => cmd_verify_classical(a),
        Command::Verify(VerifyCommand::Quantum(a)) => cmd_verify_quantum(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
