use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{ClassicalConfig, DecodeMode, ExperimentConfig, Fault, SCHEMA_VERSION};
use super::experiment::{self, build_message, build_sigma, sigma_catalogue, SweepReport};
use crate::basecode::{self, errors_supported_on, kl_residual, single_site_errors, LocalOperator, WeylOp};
use crate::decoder::{apply_insdel, ChannelSpec};
use crate::editgraph::{
    build_graph, candidates_with_priorities, edit_matrix, enumerate_paths, f_delete, f_insert, oracle_j, poset_leq,
    ArcType, Priority,
};
use crate::error::Result;
use crate::mhcode;
use crate::qsim::{self, Ensemble};
use crate::seqcore::{
    adjacent_equal_family, delete, deletion_ball, enumerate_detecting, indel_ball, monotone_periodic,
    transposition_family, IndexSet, Sequence,
};

/// Names of the classical checks, in report order.
pub const CHECKS: [&str; 9] = [
    "candidate-union",
    "out-degree",
    "arc-counts",
    "path-deletion",
    "extremality",
    "transposition-intersection",
    "singleton-intersection",
    "adjacent-equal",
    "families-disjoint",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    pub cases: u64,
    pub failures: u64,
}

/// Enough to replay a failing case in isolation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub check: String,
    pub q: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    pub x: Vec<u32>,
    pub y: Vec<u32>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalReport {
    pub schema_version: u32,
    pub kind: String,
    pub config: ClassicalConfig,
    pub checks: Vec<CheckSummary>,
    pub failures: u64,
    pub counterexamples: Vec<Counterexample>,
    pub pass: bool,
    #[serde(skip)]
    pub wall_seconds: f64,
}

struct Tally {
    counts: BTreeMap<&'static str, (u64, u64)>,
    examples: Vec<Counterexample>,
    kept: BTreeMap<&'static str, usize>,
    limit: usize,
}

impl Tally {
    fn new(limit: usize) -> Self {
        Tally { counts: BTreeMap::new(), examples: Vec::new(), kept: BTreeMap::new(), limit }
    }

    fn record(
        &mut self,
        check: &'static str,
        ok: bool,
        t: Option<usize>,
        x: &Sequence,
        y: &Sequence,
        detail: impl FnOnce() -> String,
    ) {
        let e = self.counts.entry(check).or_default();
        e.0 += 1;
        if ok {
            return;
        }
        e.1 += 1;
        let kept = self.kept.entry(check).or_default();
        if *kept < self.limit {
            *kept += 1;
            self.examples.push(Counterexample {
                check: check.into(),
                q: x.alphabet_size(),
                t,
                x: x.symbols().to_vec(),
                y: y.symbols().to_vec(),
                detail: detail(),
            });
        }
    }
}

fn priorities(fault: Option<Fault>) -> (Priority, Priority) {
    match fault {
        None => (Priority::Bottom, Priority::Top),
        Some(Fault::SwapPriorities) => (Priority::Top, Priority::Bottom),
        Some(Fault::BottomOnly) => (Priority::Bottom, Priority::Bottom),
    }
}

fn check_candidates(x: &Sequence, y: &Sequence, t: usize, cfg: &ClassicalConfig, tally: &mut Tally) -> Result<()> {
    let h = edit_matrix(x, y)?;
    let (p1, p2) = priorities(cfg.fault);
    let c = candidates_with_priorities(x, y, &h, p1, p2)?;
    let j = oracle_j(x, y)?;
    let union = c.union();
    let ok = union == j && union.len() <= 2 && c.s1.len() == 1 && c.s2.len() == 1;
    tally.record("candidate-union", ok, Some(t), x, y, || format!("S1={} S2={} J={}", c.s1, c.s2, j));
    Ok(())
}

/// Graph and path checks over the fully enumerated path set.
fn check_paths(x: &Sequence, y: &Sequence, t: Option<usize>, cfg: &ClassicalConfig, tally: &mut Tally) -> Result<()> {
    if x.len() > cfg.path_cap || y.len() > cfg.path_cap {
        return Ok(());
    }
    let (n, m) = (x.len(), y.len());
    let h = edit_matrix(x, y)?;
    let g = build_graph(x, y, &h)?;
    let stuck: Vec<(usize, usize)> =
        (0..=n).flat_map(|i| (0..=m).map(move |j| (i, j))).filter(|&v| v != (0, 0) && g.out_degree(v) == 0).collect();
    tally.record("out-degree", stuck.is_empty(), t, x, y, || format!("no outgoing arc at {stuck:?}"));

    let d = h.distance() as i64;
    let (ni, mi) = (n as i64, m as i64);
    let expect = [(d + ni - mi) / 2, (-d + ni + mi) / 2, (d - ni + mi) / 2];
    let paths = enumerate_paths(&g, cfg.path_cap, cfg.path_budget)?;
    for p in &paths {
        let got = [p.count(ArcType::Up), p.count(ArcType::Diagonal), p.count(ArcType::Left)].map(|c| c as i64);
        tally.record("arc-counts", got == expect, t, x, y, || format!("path {p}: counts {got:?}, expected {expect:?}"));
        let lhs = delete(y, &f_insert(p, m))?;
        let rhs = delete(x, &f_delete(p, n))?;
        tally.record("path-deletion", lhs == rhs, t, x, y, || format!("path {p}: {lhs} vs {rhs}"));
    }
    let (p1, p2) = priorities(cfg.fault);
    let bot = crate::editgraph::backtrack(x, y, &h, p1)?;
    let top = crate::editgraph::backtrack(x, y, &h, p2)?;
    let members = paths.contains(&bot) && paths.contains(&top);
    let bad = paths.iter().find(|p| !(poset_leq(&bot, p) && poset_leq(p, &top)));
    tally.record("extremality", members && bad.is_none(), t, x, y, || match bad {
        Some(p) => format!("bottom {bot}, top {top}, offending {p}"),
        None => format!("bottom {bot} or top {top} not among the enumerated paths"),
    });
    Ok(())
}

fn intersection(a: &BTreeSet<Sequence>, b: &BTreeSet<Sequence>) -> BTreeSet<Sequence> {
    a.intersection(b).cloned().collect()
}

fn single(y: &Sequence, i: usize) -> Result<Sequence> {
    delete(y, &IndexSet::new(y.len(), [i])?)
}

fn show(set: &BTreeSet<Sequence>) -> String {
    let parts: Vec<String> = set.iter().map(|s| s.to_string()).collect();
    format!("[{}]", parts.join(" "))
}

/// Ball-intersection identities for one detecting word.
fn check_families(x: &Sequence, t: usize, tally: &mut Tally) -> Result<()> {
    let n = x.len();
    if n < 2 {
        return Ok(());
    }
    let dx = deletion_ball(x, 1)?;
    let transpositions = transposition_family(x)?;
    for (k, ti) in transpositions.iter().enumerate() {
        let i = k + 1;
        let got = intersection(&dx, &deletion_ball(ti, 1)?);
        let want: BTreeSet<Sequence> = [single(x, i)?, single(x, i + 1)?].into_iter().collect();
        tally.record("transposition-intersection", got == want, Some(t), x, ti, || {
            format!("i={i}: {} vs {}", show(&got), show(&want))
        });
    }
    let tset: BTreeSet<Sequence> = transpositions.into_iter().collect();
    for y in indel_ball(x, 1)?.iter().filter(|y| !tset.contains(*y)) {
        let got = intersection(&dx, &deletion_ball(y, 1)?);
        tally
            .record("singleton-intersection", got.len() == 1, Some(t), x, y, || format!("intersection {}", show(&got)));
    }
    let fam = adjacent_equal_family(x, t)?;
    for (k, members) in fam.per_index.iter().enumerate() {
        let i = k + 1;
        for y in members {
            let got = intersection(&dx, &deletion_ball(y, 1)?);
            let ok = got.len() == 1 && {
                let z = got.iter().next().unwrap();
                let at = |j| single(y, j).map(|w| w == *z);
                at(i)?
                    && at(i + 1)?
                    && (1..=n)
                        .filter(|&j| j != i && j != i + 1)
                        .try_fold(true, |acc, j| Ok::<_, crate::Error>(acc && !at(j)?))?
            };
            tally.record("adjacent-equal", ok, Some(t), x, y, || format!("i={i}: intersection {}", show(&got)));
        }
    }
    let overlap = intersection(&tset, &fam.union);
    tally.record("families-disjoint", overlap.is_empty(), Some(t), x, x, || format!("shared {}", show(&overlap)));
    Ok(())
}

fn check_word(x: &Sequence, t: usize, cfg: &ClassicalConfig, tally: &mut Tally) -> Result<()> {
    for y in indel_ball(x, 1)? {
        check_candidates(x, &y, t, cfg, tally)?;
        check_paths(x, &y, Some(t), cfg, tally)?;
    }
    check_families(x, t, tally)
}

/// Exhaustive classical verification over marker words and every detecting
/// word within the enumeration bounds. Random pairs feed the path checks.
pub fn cmd_verify_classical(cfg: &ClassicalConfig) -> Result<ClassicalReport> {
    let start = Instant::now();
    cfg.validate()?;
    let mut tally = Tally::new(cfg.max_counterexamples);
    for &t in &cfg.t_values {
        for n in cfg.marker_n_min..=cfg.marker_n_max {
            check_word(&monotone_periodic(n, t), t, cfg, &mut tally)?;
        }
        for q in 2..=cfg.enumerate_q_max {
            for n in t + 1..=cfg.enumerate_n_max {
                for x in enumerate_detecting(n, q, t, cfg.budget)? {
                    check_word(&x, t, cfg, &mut tally)?;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.random_pairs {
        let q = rng.random_range(2..=cfg.random_q_max);
        let n = rng.random_range(0..=cfg.random_len_max);
        let m = rng.random_range(0..=cfg.random_len_max);
        let x = Sequence::new(q, (0..n).map(|_| rng.random_range(0..q)).collect())?;
        let y = Sequence::new(q, (0..m).map(|_| rng.random_range(0..q)).collect())?;
        check_paths(&x, &y, None, cfg, &mut tally)?;
    }
    let checks: Vec<CheckSummary> = CHECKS
        .iter()
        .map(|&name| {
            let (cases, failures) = tally.counts.get(name).copied().unwrap_or_default();
            CheckSummary { name: name.into(), cases, failures }
        })
        .collect();
    let failures = checks.iter().map(|c| c.failures).sum();
    Ok(ClassicalReport {
        schema_version: SCHEMA_VERSION,
        kind: "verify-classical".into(),
        config: cfg.clone(),
        checks,
        failures,
        counterexamples: tally.examples,
        pass: failures == 0,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Numerical certificate of the base code.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseCertificate {
    pub isometry_defect: f64,
    pub kl_residual_single_site: f64,
    /// Largest residual over every erasure pattern within capability.
    pub kl_residual_erasures: f64,
    pub pass: bool,
}

pub fn base_certificate(code: &basecode::CodeIsometry) -> Result<BaseCertificate> {
    let local = |ops: Vec<WeylOp>| -> Vec<LocalOperator> { ops.iter().map(WeylOp::to_local).collect() };
    let single = kl_residual(code, &local(single_site_errors(code)))?;
    let mut erasures: f64 = 0.0;
    for k in 1..=code.erasure_capability {
        for j in IndexSet::all_of_size(code.n0, k) {
            erasures = erasures.max(kl_residual(code, &local(errors_supported_on(code, &j)))?);
        }
    }
    let defect = code.isometry_defect();
    Ok(BaseCertificate {
        isometry_defect: defect,
        kl_residual_single_site: single,
        kl_residual_erasures: erasures,
        pass: defect < basecode::KL_TOL && single < basecode::KL_TOL && erasures < basecode::KL_TOL,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub cases: usize,
    pub failures: usize,
    pub min_fidelity: f64,
    pub max_trace_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumReport {
    pub schema_version: u32,
    pub kind: String,
    pub base: BaseCertificate,
    /// Inserting and deleting at the same index must be the identity.
    pub channel_identity: IdentityCheck,
    pub experiment: SweepReport,
    pub pass: bool,
}

/// Base-code certificate, channel identities and the branch-enumerated
/// end-to-end sweep.
pub fn cmd_verify_quantum(cfg: &ExperimentConfig, threads: usize) -> Result<QuantumReport> {
    cfg.validate()?;
    let code = cfg.code.build()?;
    let base = base_certificate(code.base())?;
    let mut ident = IdentityCheck { cases: 0, failures: 0, min_fidelity: f64::INFINITY, max_trace_error: 0.0 };
    let sigmas =
        sigma_catalogue(cfg, &code).into_iter().map(|k| build_sigma(k, &code, cfg.seed)).collect::<Result<Vec<_>>>()?;
    for i in 0..cfg.messages {
        let psi = mhcode::mh_encode(&code, &build_message(&code, cfg.seed, i))?;
        let rho = Ensemble::pure(psi.clone());
        for j in 1..=code.n() + 1 {
            for sigma in &sigmas {
                let out = apply_insdel(&rho, &ChannelSpec::new(j, sigma.clone(), j)?)?;
                let f = qsim::fidelity(&psi, &out)?;
                let terr = (out.trace() - 1.0).abs();
                ident.cases += 1;
                ident.min_fidelity = ident.min_fidelity.min(f);
                ident.max_trace_error = ident.max_trace_error.max(terr);
                if f < 1.0 - 1e-9 || terr > 1e-9 {
                    ident.failures += 1;
                }
            }
        }
    }
    let sweep_cfg = ExperimentConfig { mode: DecodeMode::Branches, ..cfg.clone() };
    let experiment = experiment::run_experiment(&sweep_cfg, threads)?;
    let pass = base.pass
        && ident.failures == 0
        && experiment.passed()
        && experiment.summary.unitary_path_branches > 0
        && experiment.summary.deletion_path_branches > 0;
    Ok(QuantumReport {
        schema_version: SCHEMA_VERSION,
        kind: "verify-quantum".into(),
        base,
        channel_identity: ident,
        experiment,
        pass,
    })
}
