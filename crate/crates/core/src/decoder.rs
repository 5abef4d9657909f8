//! Recovery from one quantum insertion followed by one quantum deletion.
//!
//! The received state is measured site by site by residue class. If the
//! result word equals the marker the channel acted as a single-site error
//! and base error correction finishes the job. Otherwise the two extremal
//! DP paths between marker and result locate at most two candidate sites;
//! those are traced out and the remainder is decoded as deletions.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::editgraph::{self, Candidates};
use crate::error::{Error, Result};
use crate::mhcode::{self, MHCode};
use crate::qsim::{self, Ensemble, PureState};
use crate::seqcore::{delete, IndexSet, Sequence};

/// Which half of the decoder ran.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    UnitaryPath,
    DeletionPath,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::UnitaryPath => "unitary-path",
            Branch::DeletionPath => "deletion-path",
        }
    }
}

/// Insert `sigma` at `j2` of the `n`-site state, then delete site `j1` of
/// the resulting `n + 1` sites.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSpec {
    pub j2: usize,
    pub sigma: Ensemble,
    pub j1: usize,
}

impl ChannelSpec {
    pub fn new(j2: usize, sigma: Ensemble, j1: usize) -> Result<Self> {
        if sigma.spec().num_sites() != 1 {
            return Err(Error::DimensionMismatch("inserted state must occupy one site".into()));
        }
        if (sigma.trace() - 1.0).abs() > qsim::NORM_TOL {
            return Err(Error::NotNormalized(sigma.trace()));
        }
        Ok(ChannelSpec { j2, sigma, j1 })
    }

    /// Position of the inserted site in the received frame, if it survived.
    pub fn inserted_position(&self) -> Option<usize> {
        use std::cmp::Ordering::*;
        match self.j1.cmp(&self.j2) {
            Equal => None,
            Greater => Some(self.j2),
            Less => Some(self.j2 - 1),
        }
    }
}

/// `D_{j1} . I_{j2, sigma}`.
pub fn apply_insdel(rho: &Ensemble, ch: &ChannelSpec) -> Result<Ensemble> {
    let n = rho.spec().num_sites();
    if ch.sigma.spec().dims() != [rho.spec().dim(1)] || rho.spec().dims().iter().any(|&d| d != rho.spec().dim(1)) {
        return Err(Error::DimensionMismatch("inserted site must match the codeword sites".into()));
    }
    let inserted = qsim::insert_qudits(rho, &IndexSet::new(n + 1, [ch.j2])?, &ch.sigma)?;
    qsim::delete_qudits(&inserted, &IndexSet::new(n + 1, [ch.j1])?)
}

/// Unitary path iff `r` is the marker word.
pub fn classify_branch(r: &Sequence, n: usize, t: usize) -> Result<Branch> {
    if r.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: r.len() });
    }
    Ok(if *r == crate::seqcore::monotone_periodic(n, t) { Branch::UnitaryPath } else { Branch::DeletionPath })
}

/// Per-run record of what the decoder saw and did.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodeReport {
    pub n: usize,
    pub l: usize,
    pub t: usize,
    pub base: String,
    /// Residue-measurement results.
    pub r: Vec<u32>,
    pub branch: Branch,
    pub s1: Vec<usize>,
    pub s2: Vec<usize>,
    pub deleted_total: Vec<usize>,
    /// Probability of the measurement and syndrome outcomes behind this report.
    pub probability: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
}

impl DecodeReport {
    fn new(code: &MHCode, r: &Sequence, probability: f64, seed: Option<u64>) -> Self {
        DecodeReport {
            n: code.n(),
            l: code.l(),
            t: code.t(),
            base: code.base().name.clone(),
            r: r.symbols().to_vec(),
            branch: Branch::UnitaryPath,
            s1: Vec::new(),
            s2: Vec::new(),
            deleted_total: Vec::new(),
            probability,
            seed,
            fidelity: None,
        }
    }

    fn record(&mut self, c: &Candidates, s: &IndexSet) {
        self.branch = Branch::DeletionPath;
        self.s1 = c.s1.indices().to_vec();
        self.s2 = c.s2.indices().to_vec();
        self.deleted_total = s.indices().to_vec();
    }
}

/// Steps 3 to 5: locate the candidates, trace them out and return the
/// shortened state with its result word.
struct Located {
    candidates: Candidates,
    deleted: IndexSet,
    state: Ensemble,
    r: Sequence,
}

fn locate(code: &MHCode, post: &Ensemble, r: &Sequence) -> Result<Located> {
    let m = code.marker();
    if editgraph::indel_distance(&m, r)? != 2 {
        return Err(Error::NotInIndelBall(r.symbols().to_vec()));
    }
    let candidates = editgraph::candidate_insertion_indices(&m, r)?;
    let deleted = candidates.union();
    if candidates.s1.len() != 1 || candidates.s2.len() != 1 || deleted.len() > 2 {
        return Err(Error::Code(format!(
            "candidate sets {} and {} violate the single-insertion structure",
            candidates.s1, candidates.s2
        )));
    }
    let state = qsim::delete_qudits(post, &deleted)?;
    let r = delete(r, &deleted)?;
    Ok(Located { candidates, deleted, state, r })
}

fn check_input(code: &MHCode, rho: &Ensemble) -> Result<()> {
    if code.t() < 2 {
        return Err(Error::Parameter(format!("insertion-deletion decoding needs t >= 2, got {}", code.t())));
    }
    let expect = code.embedded_spec(code.n())?;
    if *rho.spec() != expect {
        return Err(Error::DimensionMismatch(format!("expected {:?}, got {:?}", expect.dims(), rho.spec().dims())));
    }
    Ok(())
}

/// Runs the full decoder, sampling every measurement outcome from `seed`.
pub fn decode(code: &MHCode, rho: &Ensemble, seed: u64) -> Result<(Ensemble, DecodeReport)> {
    check_input(code, rho)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (r, post) = mhcode::measure_marker(code, rho, &mut rng)?;
    // probability of the sampled word, recomputed from the branch table
    let probability = mhcode::measure_marker_branches(code, rho)?
        .into_iter()
        .find(|(_, word, _)| *word == r)
        .map(|(p, _, _)| p)
        .unwrap_or(0.0);
    let mut report = DecodeReport::new(code, &r, probability, Some(seed));
    let message = match classify_branch(&r, code.n(), code.t())? {
        Branch::UnitaryPath => mhcode::mh_unitary_decode(code, &post, rng.next_u64())?,
        Branch::DeletionPath => {
            let loc = locate(code, &post, &r)?;
            report.record(&loc.candidates, &loc.deleted);
            mhcode::mh_deletion_decode_known(code, &loc.state, &loc.r)?
        }
    };
    Ok((message, report))
}

/// One leaf of the branch-enumerated decoder.
#[derive(Clone, Debug)]
pub struct DecodeBranch {
    pub probability: f64,
    pub message: Ensemble,
    pub report: DecodeReport,
    /// State after the candidate sites are traced out (deletion path only).
    pub shortened: Option<Ensemble>,
}

/// Follows every measurement outcome and every syndrome outcome instead of
/// sampling. Probabilities of the returned branches sum to one.
pub fn decode_branches(code: &MHCode, rho: &Ensemble) -> Result<Vec<DecodeBranch>> {
    check_input(code, rho)?;
    let mut out = Vec::new();
    for (p, r, post) in mhcode::measure_marker_branches(code, rho)? {
        match classify_branch(&r, code.n(), code.t())? {
            Branch::UnitaryPath => {
                for (q, message) in mhcode::mh_unitary_decode_branches(code, &post)? {
                    let report = DecodeReport::new(code, &r, p * q, None);
                    out.push(DecodeBranch { probability: p * q, message, report, shortened: None });
                }
            }
            Branch::DeletionPath => {
                let loc = locate(code, &post, &r)?;
                let mut report = DecodeReport::new(code, &r, p, None);
                report.record(&loc.candidates, &loc.deleted);
                let message = mhcode::mh_deletion_decode_known(code, &loc.state, &loc.r)?;
                out.push(DecodeBranch { probability: p, message, report, shortened: Some(loc.state) });
            }
        }
    }
    Ok(out)
}

/// Smallest squared Hilbert-Schmidt distance between `shortened` and
/// `D_S(|psi><psi|)` over all `S` of the matching size, with the minimizer.
pub fn closest_deletion_pattern(psi: &PureState, shortened: &Ensemble) -> Result<(f64, IndexSet)> {
    let n = psi.spec().num_sites();
    let k = n
        .checked_sub(shortened.spec().num_sites())
        .ok_or_else(|| Error::DimensionMismatch("shortened state is longer than the codeword".into()))?;
    let full = Ensemble::pure(psi.clone());
    let mut best: Option<(f64, IndexSet)> = None;
    for s in IndexSet::all_of_size(n, k) {
        let reduced = qsim::delete_qudits(&full, &s)?;
        if reduced.spec() != shortened.spec() {
            continue;
        }
        let dist = qsim::hs_distance_sq(&reduced, shortened)?;
        if best.as_ref().is_none_or(|(b, _)| dist < *b) {
            best = Some((dist, s));
        }
    }
    best.ok_or_else(|| Error::DimensionMismatch("no deletion pattern matches the shortened state".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basecode::five_qudit_code;
    use crate::qsim::{QuditSpec, SiteMatrix, C64};
    use crate::seqcore::{deletion_ball, monotone_periodic};

    fn code() -> MHCode {
        MHCode::new(five_qudit_code(), 2).unwrap()
    }

    fn message(seed: u64) -> PureState {
        PureState::random(QuditSpec::uniform(1, 2).unwrap(), &mut ChaCha8Rng::seed_from_u64(seed))
    }

    fn basis_site(k: usize) -> Ensemble {
        Ensemble::pure(PureState::basis(QuditSpec::uniform(1, 6).unwrap(), &[k]).unwrap())
    }

    #[test]
    fn insdel_identities() {
        let code = code();
        let psi = mhcode::mh_encode(&code, &message(1)).unwrap();
        let rho = Ensemble::pure(psi.clone());
        let mixed = Ensemble::maximally_mixed(QuditSpec::uniform(1, 6).unwrap());
        for j in 1..=6 {
            let out = apply_insdel(&rho, &ChannelSpec::new(j, mixed.clone(), j).unwrap()).unwrap();
            assert!(qsim::fidelity(&psi, &out).unwrap() >= 1.0 - 1e-9);
        }
        for j2 in 1..=6 {
            for j1 in 1..=6 {
                let out = apply_insdel(&rho, &ChannelSpec::new(j2, basis_site(4), j1).unwrap()).unwrap();
                assert_eq!(out.spec().num_sites(), 5);
                assert!((out.trace() - 1.0).abs() < 1e-9);
            }
        }
        assert!(apply_insdel(&rho, &ChannelSpec::new(7, basis_site(0), 1).unwrap()).is_err());
        assert!(ChannelSpec::new(1, Ensemble::pure(psi), 1).is_err());
    }

    #[test]
    fn no_op_channel_takes_the_unitary_path() {
        let code = code();
        let mu = message(2);
        let rho = Ensemble::pure(mhcode::mh_encode(&code, &mu).unwrap());
        let ch = ChannelSpec::new(3, basis_site(1), 3).unwrap();
        let (out, report) = decode(&code, &apply_insdel(&rho, &ch).unwrap(), 9).unwrap();
        assert_eq!(report.branch, Branch::UnitaryPath);
        assert!(report.deleted_total.is_empty());
        assert!(qsim::fidelity(&mu, &out).unwrap() >= 1.0 - 1e-9);
    }

    #[test]
    fn basis_five_at_two_deleting_five() {
        let code = code();
        let mu = message(3);
        let rho = Ensemble::pure(mhcode::mh_encode(&code, &mu).unwrap());
        let ch = ChannelSpec::new(2, basis_site(5), 5).unwrap();
        let (out, report) = decode(&code, &apply_insdel(&rho, &ch).unwrap(), 4).unwrap();
        assert_eq!(report.branch, Branch::DeletionPath);
        assert!(report.deleted_total.len() <= 2);
        assert_eq!((report.s1.len(), report.s2.len()), (1, 1));
        assert!(qsim::fidelity(&mu, &out).unwrap() >= 1.0 - 1e-9);
        let again = decode(&code, &apply_insdel(&rho, &ch).unwrap(), 4).unwrap().1;
        assert_eq!(serde_json::to_string(&report).unwrap(), serde_json::to_string(&again).unwrap());
    }

    #[test]
    fn basis_sweep_over_every_branch() {
        let code = code();
        let mu = message(5);
        let psi = mhcode::mh_encode(&code, &mu).unwrap();
        let rho = Ensemble::pure(psi.clone());
        let m = code.marker();
        let ball = deletion_ball(&m, 1).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for j2 in 1..=6 {
            for j1 in 1..=6 {
                for k in 0..6 {
                    let ch = ChannelSpec::new(j2, basis_site(k), j1).unwrap();
                    let received = apply_insdel(&rho, &ch).unwrap();
                    let branches = decode_branches(&code, &received).unwrap();
                    let total: f64 = branches.iter().map(|b| b.probability).sum();
                    assert!((total - 1.0).abs() < 1e-9);
                    for b in branches {
                        seen.insert(b.report.branch);
                        assert!(qsim::fidelity(&mu, &b.message).unwrap() >= 1.0 - 1e-9, "J2={j2} J1={j1} k={k}");
                        if let Some(short) = &b.shortened {
                            let (dist, _) = closest_deletion_pattern(&psi, short).unwrap();
                            assert!(dist < 1e-12);
                            let r = Sequence::new(3, b.report.r.clone()).unwrap();
                            let p = ch.inserted_position().unwrap();
                            assert!(b.report.deleted_total.contains(&p));
                            assert!(ball.contains(&delete(&r, &IndexSet::new(5, [p]).unwrap()).unwrap()));
                        }
                    }
                }
            }
        }
        assert_eq!(seen.len(), 2);
    }

    #[test]
    fn classify_examples() {
        let m = monotone_periodic(5, 2);
        assert_eq!(classify_branch(&m, 5, 2).unwrap(), Branch::UnitaryPath);
        let swapped = Sequence::new(3, vec![1, 0, 2, 0, 1]).unwrap();
        assert_eq!(classify_branch(&swapped, 5, 2).unwrap(), Branch::DeletionPath);
        assert!(classify_branch(&m, 6, 2).is_err());
    }

    #[test]
    fn received_word_outside_the_ball_is_rejected() {
        let code = code();
        let rho = Ensemble::pure(mhcode::mh_encode(&code, &message(6)).unwrap());
        // move site 1 from residue 0 to 2 and site 2 from residue 1 to 2
        let shift = |from: usize, to: usize| {
            let mut m = SiteMatrix::identity(6);
            for j in 0..2 {
                let (a, b) = (j * 3 + from, j * 3 + to);
                m.set(a, a, C64::new(0.0, 0.0));
                m.set(b, b, C64::new(0.0, 0.0));
                m.set(a, b, C64::new(1.0, 0.0));
                m.set(b, a, C64::new(1.0, 0.0));
            }
            m
        };
        let bad = rho.map_site(1, &shift(0, 2)).unwrap().map_site(2, &shift(1, 2)).unwrap();
        assert!(matches!(decode(&code, &bad, 0), Err(Error::NotInIndelBall(_))));
        assert!(matches!(decode_branches(&code, &bad), Err(Error::NotInIndelBall(_))));
    }

    #[test]
    fn refuses_t_one() {
        let code = MHCode::new(five_qudit_code(), 1).unwrap();
        let rho = Ensemble::pure(mhcode::mh_encode(&code, &message(7)).unwrap());
        assert!(decode(&code, &rho, 0).is_err());
    }
}
