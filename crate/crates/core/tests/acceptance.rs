//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qinsdel::basecode::{
    self, correct_erasures, correct_single_error_branches, encode, single_site_errors, RecoveryRoute,
};
use qinsdel::decoder::{self, apply_insdel, Branch, ChannelSpec};
use qinsdel::editgraph::{candidate_insertion_indices, edit_matrix, path_bot, path_top};
use qinsdel::harness::{self, ClassicalConfig, ExperimentConfig};
use qinsdel::mhcode;
use qinsdel::qsim::{self, Ensemble, PureState, QuditSpec};
use qinsdel::seqcore::{delete, enumerate_detecting, indel_ball, monotone_periodic, IndexSet, Sequence};

const FID: f64 = 1.0 - 1e-9;
const TRACE_TOL: f64 = 1e-9;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:.2?}, limit {limit:?}"))
}

fn e(err: qinsdel::Error) -> String {
    err.to_string()
}

fn edit_matrix_example() -> Outcome {
    let start = Instant::now();
    let x = Sequence::new(3, vec![0, 1, 2]).map_err(e)?;
    let y = Sequence::new(3, vec![1, 1, 2]).map_err(e)?;
    let h = edit_matrix(&x, &y).map_err(e)?;
    let want = vec![vec![0, 1, 2, 3], vec![1, 2, 3, 4], vec![2, 1, 2, 3], vec![3, 2, 3, 2]];
    ensure(h.to_rows() == want, || format!("matrix {:?}", h.to_rows()))?;
    let bot = path_bot(&x, &y, &h).map_err(e)?;
    let top = path_top(&x, &y, &h).map_err(e)?;
    ensure(bot.vertices() == [(3, 3), (2, 2), (1, 1), (0, 1), (0, 0)], || format!("bottom path {bot}"))?;
    ensure(top.vertices() == [(3, 3), (2, 2), (2, 1), (1, 0), (0, 0)], || format!("top path {top}"))?;
    let c = candidate_insertion_indices(&x, &y).map_err(e)?;
    ensure(c.s1.indices() == [1] && c.s2.indices() == [2], || format!("S1={} S2={}", c.s1, c.s2))?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("4x4 matrix and both paths match in {:.2?}", start.elapsed()))
}

/// Insertion indices of `y` computed straight from single-deletion balls.
fn brute_j(x: &Sequence, y: &Sequence) -> Result<BTreeSet<usize>, String> {
    let dx: BTreeSet<Sequence> = (1..=x.len())
        .map(|i| delete(x, &IndexSet::new(x.len(), [i]).map_err(e)?).map_err(e))
        .collect::<Result<_, _>>()?;
    let mut j = BTreeSet::new();
    for k in 1..=y.len() {
        if dx.contains(&delete(y, &IndexSet::new(y.len(), [k]).map_err(e)?).map_err(e)?) {
            j.insert(k);
        }
    }
    Ok(j)
}

fn check_union(x: &Sequence, bad: &mut Vec<String>) -> Result<usize, String> {
    let mut cases = 0;
    for y in indel_ball(x, 1).map_err(e)? {
        let c = candidate_insertion_indices(x, &y).map_err(e)?;
        let union: BTreeSet<usize> = c.union().indices().iter().copied().collect();
        let j = brute_j(x, &y)?;
        cases += 1;
        if union != j || union.len() > 2 {
            bad.push(format!("x={x} y={y} S1={} S2={} J={j:?}", c.s1, c.s2));
        }
    }
    Ok(cases)
}

fn candidate_union_exhaustive() -> Outcome {
    let start = Instant::now();
    let (mut cases, mut words) = (0, 0);
    let mut bad = Vec::new();
    for t in [2, 3] {
        for n in 5..=10 {
            cases += check_union(&monotone_periodic(n, t), &mut bad)?;
            words += 1;
        }
        for q in 2..=3 {
            for n in t + 1..=8 {
                for x in enumerate_detecting(n, q, t, 1 << 24).map_err(e)? {
                    cases += check_union(&x, &mut bad)?;
                    words += 1;
                }
            }
        }
    }
    ensure(bad.is_empty(), || format!("{} exceptions, first {}", bad.len(), bad[0]))?;
    within(start, Duration::from_secs(120))?;
    Ok(format!("{cases} pairs over {words} words, 0 exceptions, {:.2?}", start.elapsed()))
}

fn path_and_ball_properties() -> Outcome {
    let start = Instant::now();
    let cfg = ClassicalConfig::default();
    ensure(cfg.random_pairs >= 500 && cfg.random_len_max == 7, || "config too small".into())?;
    let report = harness::cmd_verify_classical(&cfg).map_err(e)?;
    for c in &report.checks {
        ensure(c.cases > 0, || format!("{} never ran", c.name))?;
    }
    ensure(report.pass, || format!("{:?}", report.counterexamples.first()))?;
    within(start, Duration::from_secs(120))?;
    let summary: Vec<String> = report.checks.iter().map(|c| format!("{} {}", c.name, c.cases)).collect();
    Ok(format!("0 violations ({}), {:.2?}", summary.join(", "), start.elapsed()))
}

fn reset(rho: &Ensemble, j: &IndexSet, l: usize) -> Result<Ensemble, String> {
    let zero = PureState::basis(QuditSpec::uniform(j.len(), l).map_err(e)?, &vec![0; j.len()]).map_err(e)?;
    qsim::insert_qudits(&qsim::delete_qudits(rho, j).map_err(e)?, j, &Ensemble::pure(zero)).map_err(e)
}

fn base_code_certificate() -> Outcome {
    let code = basecode::five_qudit_code();
    let cert = harness::base_certificate(&code).map_err(e)?;
    ensure(cert.isometry_defect < 1e-10, || format!("isometry defect {}", cert.isometry_defect))?;
    ensure(cert.kl_residual_single_site < 1e-10, || format!("KL residual {}", cert.kl_residual_single_site))?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 1.0;
    let mut cases = 0;
    for _ in 0..5 {
        let mu = PureState::random(code.logical_spec(), &mut rng);
        let enc = encode(&code, &mu).map_err(e)?;
        let rho = Ensemble::pure(enc.clone());
        for j in IndexSet::all_of_size(5, 2) {
            let out = correct_erasures(&code, &reset(&rho, &j, 2)?, &j).map_err(e)?;
            worst = worst.min(qsim::fidelity(&mu, &out).map_err(e)?);
            cases += 1;
        }
        for err in single_site_errors(&code) {
            let hit = Ensemble::pure(PureState::new(code.physical_spec(), err.apply(enc.amplitudes())).map_err(e)?);
            for route in [RecoveryRoute::Stabilizer, RecoveryRoute::Canonical] {
                for (_, out) in correct_single_error_branches(&code, &hit, route).map_err(e)? {
                    worst = worst.min(qsim::fidelity(&mu, &out).map_err(e)?);
                    cases += 1;
                }
            }
        }
    }
    ensure(worst >= FID, || format!("min fidelity {worst}"))?;
    Ok(format!(
        "defect {:.1e}, KL residual {:.1e}, {cases} recoveries with min fidelity {worst:.12}",
        cert.isometry_defect, cert.kl_residual_single_site
    ))
}

fn end_to_end_sweep() -> Outcome {
    let start = Instant::now();
    let cfg = ExperimentConfig::default();
    let report = harness::run_experiment(&cfg, 1).map_err(e)?;
    let combos: BTreeSet<(usize, usize, usize, &str)> =
        report.runs.iter().map(|r| (r.message, r.j1, r.j2, r.sigma_kind.as_str())).collect();
    ensure(combos.len() == 5 * 36 * 10 && report.runs.len() == combos.len(), || {
        format!("{} runs, {} distinct", report.runs.len(), combos.len())
    })?;
    let sigmas: BTreeSet<&str> = report.runs.iter().map(|r| r.sigma_kind.as_str()).collect();
    ensure(sigmas.len() == 10, || format!("sigma kinds {sigmas:?}"))?;
    let mut kinds = BTreeSet::new();
    for run in &report.runs {
        ensure(run.error.is_none(), || format!("run {}: {:?}", run.run_id, run.error))?;
        let mass: f64 = run.branches.iter().map(|b| b.probability).sum();
        ensure((mass - 1.0).abs() < TRACE_TOL, || format!("run {} branch mass {mass}", run.run_id))?;
        for b in &run.branches {
            ensure(b.fidelity >= FID, || format!("run {} fidelity {}", run.run_id, b.fidelity))?;
            ensure(b.structural_ok(), || format!("run {} structural check failed", run.run_id))?;
            kinds.insert(b.branch.as_str());
        }
    }
    ensure(kinds.contains(Branch::UnitaryPath.as_str()) && kinds.contains(Branch::DeletionPath.as_str()), || {
        format!("branches seen {kinds:?}")
    })?;
    within(start, Duration::from_secs(600))?;
    let s = &report.summary;
    Ok(format!(
        "{} runs, {} branches ({} unitary-path, {} deletion-path), min fidelity {:.12}, {:.2?} on one thread",
        s.runs,
        s.branches,
        s.unitary_path_branches,
        s.deletion_path_branches,
        s.min_fidelity,
        start.elapsed()
    ))
}

fn channel_identities_and_trace() -> Outcome {
    let cfg = ExperimentConfig::default();
    let code = cfg.code.build().map_err(e)?;
    let sigmas = harness::experiment::sigma_catalogue(&cfg, &code)
        .into_iter()
        .map(|k| harness::build_sigma(k, &code, cfg.seed).map_err(e))
        .collect::<Result<Vec<_>, _>>()?;
    let trace_ok = |what: &str, rho: &Ensemble| {
        ensure((rho.trace() - 1.0).abs() < TRACE_TOL, || format!("{what}: trace {}", rho.trace()))
    };
    let (mut identities, mut stages) = (0, 0);
    let mut worst: f64 = 1.0;
    for i in 0..cfg.messages {
        let mu = harness::build_message(&code, cfg.seed, i);
        let psi = mhcode::mh_encode(&code, &mu).map_err(e)?;
        let rho = Ensemble::pure(psi.clone());
        trace_ok("codeword", &rho)?;
        for sigma in &sigmas {
            trace_ok("sigma", sigma)?;
            for j2 in 1..=code.n() + 1 {
                for j1 in 1..=code.n() + 1 {
                    let out = apply_insdel(&rho, &ChannelSpec::new(j2, sigma.clone(), j1).map_err(e)?).map_err(e)?;
                    trace_ok("channel output", &out)?;
                    stages += 1;
                    if j1 == j2 {
                        let f = qsim::fidelity(&psi, &out).map_err(e)?;
                        worst = worst.min(f);
                        identities += 1;
                        ensure((f - 1.0).abs() < 1e-9, || format!("J={j1}: fidelity {f}"))?;
                    }
                    if i > 0 {
                        continue;
                    }
                    let branches = decoder::decode_branches(&code, &out).map_err(e)?;
                    let mass: f64 = branches.iter().map(|b| b.probability).sum();
                    ensure((mass - 1.0).abs() < TRACE_TOL, || format!("branch mass {mass}"))?;
                    for b in &branches {
                        trace_ok("decoded message", &b.message)?;
                        if let Some(s) = &b.shortened {
                            trace_ok("shortened state", s)?;
                        }
                        stages += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{identities} identity cases (min fidelity {worst:.12}), {stages} trace checks"))
}

fn experiment_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|err| err.to_string())?;
    let mut cfg = ExperimentConfig { messages: 2, ..Default::default() };
    cfg.output.json = Some(dir.path().join("report.json"));
    cfg.output.csv = Some(dir.path().join("report.csv"));
    let read = |p: &Option<std::path::PathBuf>| std::fs::read(p.as_ref().unwrap()).map_err(|err| err.to_string());
    let mut bytes = Vec::new();
    for threads in [1, 0] {
        harness::cmd_experiment(&cfg, threads).map_err(e)?;
        bytes.push((read(&cfg.output.json)?, read(&cfg.output.csv)?));
    }
    ensure(bytes[0] == bytes[1], || "reports differ between runs".into())?;
    Ok(format!("JSON ({} bytes) and CSV ({} bytes) identical", bytes[0].0.len(), bytes[0].1.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("edit matrix and extremal paths for (0,1,2) vs (1,1,2)", edit_matrix_example),
        ("exhaustive candidate union equals the insertion index set", candidate_union_exhaustive),
        ("path, arc-count and ball-intersection property suite", path_and_ball_properties),
        ("base code isometry, KL certificate and recovery", base_code_certificate),
        ("end-to-end insertion plus deletion sweep, every branch", end_to_end_sweep),
        ("channel identities and trace preservation", channel_identities_and_trace),
        ("experiment reports are byte-identical across runs", experiment_determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
