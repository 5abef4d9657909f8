use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{DecodeMode, ExperimentConfig, SCHEMA_VERSION};
use crate::decoder::{self, Branch, ChannelSpec, DecodeReport};
use crate::error::{Error, Result};
use crate::mhcode::{self, MHCode};
use crate::qsim::{self, Ensemble, PureState};
use crate::seqcore::{delete, deletion_ball, IndexSet, Sequence};

/// Seed streams; see [`derive_seed`].
pub const MESSAGE_STREAM: u64 = 1;
pub const SIGMA_STREAM: u64 = 2;
pub const RUN_STREAM: u64 = 3;
pub const TRIAL_STREAM: u64 = 4;

/// Tolerance for the structural checks recorded per branch.
const STRUCT_TOL: f64 = 1e-9;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed number `counter` of `stream` under `master`:
/// `splitmix64(splitmix64(master ^ splitmix64(stream)) + counter)`.
/// Depends only on its arguments, so runs can execute in any order.
pub fn derive_seed(master: u64, stream: u64, counter: u64) -> u64 {
    splitmix64(splitmix64(master ^ splitmix64(stream)).wrapping_add(counter))
}

/// Label of an inserted state in the sweep catalogue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SigmaKind {
    Basis(usize),
    Random(usize),
    Mixed,
}

impl fmt::Display for SigmaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigmaKind::Basis(k) => write!(f, "basis:{k}"),
            SigmaKind::Random(i) => write!(f, "random:{i}"),
            SigmaKind::Mixed => write!(f, "mixed"),
        }
    }
}

impl FromStr for SigmaKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unknown sigma kind {s:?}; use basis:K, random:I or mixed"));
        if s == "mixed" {
            return Ok(SigmaKind::Mixed);
        }
        let (kind, idx) = s.split_once(':').ok_or_else(bad)?;
        let idx: usize = idx.parse().map_err(|_| bad())?;
        match kind {
            "basis" => Ok(SigmaKind::Basis(idx)),
            "random" => Ok(SigmaKind::Random(idx)),
            _ => Err(bad()),
        }
    }
}

/// The inserted state named by `kind` on one embedded site.
pub fn build_sigma(kind: SigmaKind, code: &MHCode, master_seed: u64) -> Result<Ensemble> {
    let spec = code.embedded_spec(1)?;
    match kind {
        SigmaKind::Basis(k) => Ok(Ensemble::pure(PureState::basis(spec, &[k])?)),
        SigmaKind::Random(i) => {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(master_seed, SIGMA_STREAM, i as u64));
            Ok(Ensemble::pure(PureState::random(spec, &mut rng)))
        }
        SigmaKind::Mixed => Ok(Ensemble::maximally_mixed(spec)),
    }
}

/// Message `index` of a sweep.
pub fn build_message(code: &MHCode, master_seed: u64, index: usize) -> PureState {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(master_seed, MESSAGE_STREAM, index as u64));
    PureState::random(code.base().logical_spec(), &mut rng)
}

pub fn sigma_catalogue(cfg: &ExperimentConfig, code: &MHCode) -> Vec<SigmaKind> {
    let mut out = Vec::new();
    if cfg.sigma.basis {
        out.extend((0..code.embedded_dim()).map(SigmaKind::Basis));
    }
    out.extend((0..cfg.sigma.random_pure).map(SigmaKind::Random));
    if cfg.sigma.maximally_mixed {
        out.push(SigmaKind::Mixed);
    }
    out
}

/// One measurement (and syndrome) branch of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub branch: Branch,
    pub r: Vec<u32>,
    pub s1: Vec<usize>,
    pub s2: Vec<usize>,
    pub deleted_total: Vec<usize>,
    pub probability: f64,
    pub fidelity: f64,
    pub pass: bool,
    /// Distance from the shortened state to the nearest `D_S(psi)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shortened_distance: Option<f64>,
    /// Whether the surviving inserted site is among the candidates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inserted_in_candidates: Option<bool>,
}

impl BranchRecord {
    fn from_report(report: &DecodeReport, fidelity: f64, threshold: f64) -> Self {
        BranchRecord {
            branch: report.branch,
            r: report.r.clone(),
            s1: report.s1.clone(),
            s2: report.s2.clone(),
            deleted_total: report.deleted_total.clone(),
            probability: report.probability,
            fidelity,
            pass: fidelity >= threshold,
            shortened_distance: None,
            inserted_in_candidates: None,
        }
    }

    /// Whether the recorded structural checks hold.
    pub fn structural_ok(&self) -> bool {
        self.shortened_distance.is_none_or(|d| d < STRUCT_TOL) && self.inserted_in_candidates.unwrap_or(true)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: usize,
    pub message: usize,
    pub j1: usize,
    pub j2: usize,
    pub sigma_kind: String,
    pub seed: u64,
    pub pass: bool,
    /// Smallest fidelity over the branches.
    pub fidelity: f64,
    pub branches: Vec<BranchRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub runs: usize,
    pub passed: usize,
    pub failed: usize,
    pub branches: usize,
    pub unitary_path_branches: usize,
    pub deletion_path_branches: usize,
    pub structural_violations: usize,
    pub min_fidelity: f64,
}

/// Wall-clock statistics; kept out of the serialized report so reports
/// stay byte-identical across runs.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Timing {
    pub wall_seconds: f64,
    pub threads: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub kind: String,
    pub config: ExperimentConfig,
    pub summary: Summary,
    pub runs: Vec<RunRecord>,
    #[serde(skip)]
    pub timing: Timing,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }
}

struct RunSpec {
    run_id: usize,
    message: usize,
    j2: usize,
    j1: usize,
    sigma: usize,
}

struct Prepared {
    code: MHCode,
    messages: Vec<PureState>,
    codewords: Vec<Ensemble>,
    pure_codewords: Vec<PureState>,
    sigmas: Vec<(SigmaKind, Ensemble)>,
    marker_ball: std::collections::BTreeSet<Sequence>,
}

fn branch_checks(
    rec: &mut BranchRecord,
    ch: &ChannelSpec,
    psi: &PureState,
    shortened: Option<&Ensemble>,
    code: &MHCode,
    ball: &std::collections::BTreeSet<Sequence>,
) -> Result<()> {
    if let Some(short) = shortened {
        rec.shortened_distance = Some(decoder::closest_deletion_pattern(psi, short)?.0);
    }
    if rec.branch == Branch::DeletionPath {
        if let Some(p) = ch.inserted_position() {
            let r = Sequence::new((code.t() + 1) as u32, rec.r.clone())?;
            let lands = ball.contains(&delete(&r, &IndexSet::new(code.n(), [p])?)?);
            rec.inserted_in_candidates = Some(lands && rec.deleted_total.contains(&p));
        }
    }
    Ok(())
}

fn run_one(prep: &Prepared, cfg: &ExperimentConfig, spec: &RunSpec) -> RunRecord {
    let (kind, sigma) = &prep.sigmas[spec.sigma];
    let seed = derive_seed(cfg.seed, RUN_STREAM, spec.run_id as u64);
    let mut record = RunRecord {
        run_id: spec.run_id,
        message: spec.message,
        j1: spec.j1,
        j2: spec.j2,
        sigma_kind: kind.to_string(),
        seed,
        pass: false,
        fidelity: 0.0,
        branches: Vec::new(),
        error: None,
    };
    let result = (|| -> Result<Vec<BranchRecord>> {
        let mu = &prep.messages[spec.message];
        let psi = &prep.pure_codewords[spec.message];
        let ch = ChannelSpec::new(spec.j2, sigma.clone(), spec.j1)?;
        let received = decoder::apply_insdel(&prep.codewords[spec.message], &ch)?;
        if (received.trace() - 1.0).abs() > qsim::NORM_TOL {
            return Err(Error::NotNormalized(received.trace()));
        }
        let mut out = Vec::new();
        match cfg.mode {
            DecodeMode::Branches => {
                for b in decoder::decode_branches(&prep.code, &received)? {
                    let f = qsim::fidelity(mu, &b.message)?;
                    let mut rec = BranchRecord::from_report(&b.report, f, cfg.threshold);
                    branch_checks(&mut rec, &ch, psi, b.shortened.as_ref(), &prep.code, &prep.marker_ball)?;
                    out.push(rec);
                }
            }
            DecodeMode::Sampled => {
                for trial in 0..cfg.trials {
                    let (message, report) =
                        decoder::decode(&prep.code, &received, derive_seed(seed, TRIAL_STREAM, trial as u64))?;
                    let f = qsim::fidelity(mu, &message)?;
                    let mut rec = BranchRecord::from_report(&report, f, cfg.threshold);
                    branch_checks(&mut rec, &ch, psi, None, &prep.code, &prep.marker_ball)?;
                    out.push(rec);
                }
            }
        }
        Ok(out)
    })();
    match result {
        Ok(branches) => {
            record.fidelity = branches.iter().map(|b| b.fidelity).fold(f64::INFINITY, f64::min);
            record.pass = branches.iter().all(|b| b.pass && b.structural_ok());
            record.branches = branches;
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

fn summarize(runs: &[RunRecord]) -> Summary {
    let branches = runs.iter().flat_map(|r| &r.branches);
    let count = |b: Branch| runs.iter().flat_map(|r| &r.branches).filter(|x| x.branch == b).count();
    let passed = runs.iter().filter(|r| r.pass).count();
    Summary {
        runs: runs.len(),
        passed,
        failed: runs.len() - passed,
        branches: branches.clone().count(),
        unitary_path_branches: count(Branch::UnitaryPath),
        deletion_path_branches: count(Branch::DeletionPath),
        structural_violations: branches.filter(|b| !b.structural_ok()).count(),
        min_fidelity: runs.iter().map(|r| r.fidelity).fold(f64::INFINITY, f64::min),
    }
}

/// Runs the end-to-end sweep: every message, insertion index, deletion
/// index and inserted state. Runs are independent and execute on a pool of
/// `threads` workers (`0` picks the core count); results are merged by run id.
pub fn run_experiment(cfg: &ExperimentConfig, threads: usize) -> Result<SweepReport> {
    let start = Instant::now();
    cfg.validate()?;
    let code = cfg.code.build()?;
    let messages: Vec<PureState> = (0..cfg.messages).map(|i| build_message(&code, cfg.seed, i)).collect();
    let pure_codewords = messages.iter().map(|mu| mhcode::mh_encode(&code, mu)).collect::<Result<Vec<_>>>()?;
    let codewords = pure_codewords.iter().cloned().map(Ensemble::pure).collect();
    let sigmas = sigma_catalogue(cfg, &code)
        .into_iter()
        .map(|k| Ok((k, build_sigma(k, &code, cfg.seed)?)))
        .collect::<Result<Vec<_>>>()?;
    let marker_ball = deletion_ball(&code.marker(), 1)?;
    let prep = Prepared { code, messages, codewords, pure_codewords, sigmas, marker_ball };

    let mut specs = Vec::new();
    for message in 0..cfg.messages {
        for &j2 in &cfg.insertion() {
            for &j1 in &cfg.deletion() {
                for sigma in 0..prep.sigmas.len() {
                    specs.push(RunSpec { run_id: specs.len(), message, j2, j1, sigma });
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let used = pool.current_num_threads();
    let runs: Vec<RunRecord> = pool.install(|| specs.par_iter().map(|s| run_one(&prep, cfg, s)).collect());
    Ok(SweepReport {
        schema_version: SCHEMA_VERSION,
        kind: "experiment".into(),
        config: cfg.clone(),
        summary: summarize(&runs),
        runs,
        timing: Timing { wall_seconds: start.elapsed().as_secs_f64(), threads: used },
    })
}

fn fmt_set(s: &[usize]) -> String {
    let parts: Vec<String> = s.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// CSV with one row per branch:
/// `run_id,J1,J2,sigma_kind,branch,S1,S2,fidelity,pass`.
pub fn write_csv(path: &Path, report: &SweepReport) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["run_id", "J1", "J2", "sigma_kind", "branch", "S1", "S2", "fidelity", "pass"]).map_err(io)?;
    for run in &report.runs {
        let head = [run.run_id.to_string(), run.j1.to_string(), run.j2.to_string(), run.sigma_kind.clone()];
        if run.branches.is_empty() {
            let row = [&head[..], &["error".into(), "{}".into(), "{}".into(), "0".into(), "false".into()]].concat();
            w.write_record(&row).map_err(io)?;
        }
        for b in &run.branches {
            let tail = [
                b.branch.as_str().to_string(),
                fmt_set(&b.s1),
                fmt_set(&b.s2),
                b.fidelity.to_string(),
                (b.pass && b.structural_ok()).to_string(),
            ];
            w.write_record([&head[..], &tail[..]].concat()).map_err(io)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes the JSON report and, if given, the CSV summary.
pub fn write_report(report: &SweepReport, json: Option<&Path>, csv: Option<&Path>) -> Result<()> {
    if let Some(p) = json {
        crate::io::write_json(p, report)?;
    }
    if let Some(p) = csv {
        write_csv(p, report)?;
    }
    Ok(())
}

/// [`run_experiment`] followed by writing the outputs named in the config.
pub fn cmd_experiment(cfg: &ExperimentConfig, threads: usize) -> Result<SweepReport> {
    let report = run_experiment(cfg, threads)?;
    write_report(&report, cfg.output.json.as_deref(), cfg.output.csv.as_deref())?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            insertion_indices: Some(vec![1, 3, 6]),
            deletion_indices: Some(vec![2, 3, 5]),
            messages: 1,
            sigma: super::super::config::SigmaCatalogue { basis: false, random_pure: 1, maximally_mixed: true },
            ..Default::default()
        }
    }

    #[test]
    fn seeds_are_stable_and_distinct() {
        assert_eq!(derive_seed(1, RUN_STREAM, 0), derive_seed(1, RUN_STREAM, 0));
        assert_ne!(derive_seed(1, RUN_STREAM, 0), derive_seed(1, RUN_STREAM, 1));
        assert_ne!(derive_seed(1, RUN_STREAM, 0), derive_seed(1, MESSAGE_STREAM, 0));
        assert_ne!(derive_seed(1, RUN_STREAM, 0), derive_seed(2, RUN_STREAM, 0));
    }

    #[test]
    fn sigma_kinds_parse() {
        for k in [SigmaKind::Basis(3), SigmaKind::Random(0), SigmaKind::Mixed] {
            assert_eq!(k.to_string().parse::<SigmaKind>().unwrap(), k);
        }
        assert!("basis".parse::<SigmaKind>().is_err());
        assert!("gauss:1".parse::<SigmaKind>().is_err());
    }

    #[test]
    fn small_sweep_passes_and_is_deterministic() {
        let cfg = small();
        let a = run_experiment(&cfg, 2).unwrap();
        assert!(a.passed(), "{:?}", a.summary);
        assert_eq!(a.summary.runs, 18);
        assert!(a.summary.unitary_path_branches > 0 && a.summary.deletion_path_branches > 0);
        let b = run_experiment(&cfg, 1).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn impossible_threshold_fails_every_run() {
        let cfg = ExperimentConfig { threshold: 1.1, ..small() };
        let report = run_experiment(&cfg, 1).unwrap();
        assert_eq!(report.summary.passed, 0);
        assert!(!report.passed());
    }

    #[test]
    fn sampled_mode_runs_trials() {
        let cfg = ExperimentConfig { mode: DecodeMode::Sampled, trials: 3, ..small() };
        let report = run_experiment(&cfg, 1).unwrap();
        assert!(report.passed());
        assert!(report.runs.iter().all(|r| r.branches.len() == 3));
    }

    #[test]
    fn csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let report = run_experiment(&small(), 1).unwrap();
        let path = dir.path().join("out.csv");
        write_csv(&path, &report).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "run_id,J1,J2,sigma_kind,branch,S1,S2,fidelity,pass");
        assert_eq!(lines.count(), report.summary.branches);
    }
}
