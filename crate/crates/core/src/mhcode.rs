//! Deletion-correcting code over embedded qudits.
//!
//! Site `i` of a base codeword is lifted into dimension `l (t + 1)` by
//! `eta_r : |j> -> |j (t + 1) + r>` with `r = (i - 1) mod (t + 1)`. Measuring
//! every site by residue class then reads the marker word
//! `m = monotone_periodic(n, t)` without disturbing the state, and after
//! deletions the surviving residues pin down which sites were lost.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basecode::{self, Branching, CodeIsometry, RecoveryRoute};
use crate::error::{Error, Result};
use crate::qsim::{self, measure_branches, Ensemble, MeasurementFamily, PureState, QuditSpec, SiteMatrix, C64};
use crate::seqcore::{delete, monotone_periodic, IndexSet, Sequence};

/// Largest weight allowed outside a residue subspace when unembedding.
pub const EMBED_TOL: f64 = 1e-9;

/// The code built from a base code with `n0 = n` and a deletion budget `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct MHCode {
    n: usize,
    l: usize,
    t: usize,
    base: CodeIsometry,
}

impl MHCode {
    pub fn new(base: CodeIsometry, t: usize) -> Result<Self> {
        if t == 0 {
            return Err(Error::Parameter("deletion budget t must be at least 1".into()));
        }
        if base.erasure_capability < t {
            return Err(Error::Parameter(format!(
                "base code corrects {} erasures, t = {t} needs at least {t}",
                base.erasure_capability
            )));
        }
        Ok(MHCode { n: base.n0, l: base.l, t, base })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn base(&self) -> &CodeIsometry {
        &self.base
    }

    /// `l (t + 1)`.
    pub fn embedded_dim(&self) -> usize {
        self.l * (self.t + 1)
    }

    /// Residue carried by original site `i` (1-based).
    pub fn residue(&self, i: usize) -> usize {
        (i - 1) % (self.t + 1)
    }

    /// The marker word every codeword measures to.
    pub fn marker(&self) -> Sequence {
        monotone_periodic(self.n, self.t)
    }

    pub fn embedded_spec(&self, sites: usize) -> Result<QuditSpec> {
        QuditSpec::uniform(sites, self.embedded_dim())
    }

    pub fn measurement(&self) -> MeasurementFamily {
        qsim::mt_family(self.l, self.t).expect("validated parameters")
    }
}

/// `eta_r` as an `l (t + 1) x l` matrix.
pub fn eta_matrix(l: usize, t: usize, residue: usize) -> Result<SiteMatrix> {
    if residue > t {
        return Err(Error::Parameter(format!("residue {residue} exceeds t = {t}")));
    }
    let mut m = SiteMatrix::zeros(l * (t + 1), l);
    for j in 0..l {
        m.set(j * (t + 1) + residue, j, C64::new(1.0, 0.0));
    }
    Ok(m)
}

/// Lifts `site` from dimension `l` into residue class `residue`.
pub fn eta_embed(rho: &Ensemble, site: usize, l: usize, t: usize, residue: usize) -> Result<Ensemble> {
    if rho.spec().dims().get(site.wrapping_sub(1)) != Some(&l) {
        return Err(Error::DimensionMismatch(format!("site {site} is not {l}-dimensional")));
    }
    rho.map_site(site, &eta_matrix(l, t, residue)?)
}

/// Inverse of [`eta_embed`]; fails if more than [`EMBED_TOL`] of the weight
/// lies outside the residue class.
pub fn eta_unembed(rho: &Ensemble, site: usize, l: usize, t: usize, residue: usize) -> Result<Ensemble> {
    if rho.spec().dims().get(site.wrapping_sub(1)) != Some(&(l * (t + 1))) {
        return Err(Error::DimensionMismatch(format!("site {site} is not {}-dimensional", l * (t + 1))));
    }
    let back = eta_matrix(l, t, residue)?.adjoint();
    let mut kept = 0.0;
    let parts = rho
        .components()
        .iter()
        .map(|(w, s)| {
            let v = s.apply_site(site, &back)?;
            kept += w * qsim::norm_sqr(&v);
            Ok((*w, v))
        })
        .collect::<Result<Vec<_>>>()?;
    let leak = rho.trace() - kept;
    if leak > EMBED_TOL {
        return Err(Error::ResidueLeak { residue, leak });
    }
    Ensemble::from_weighted_vectors(rho.spec().with_site(site, l), parts)
}

/// Encodes `mu` with the base code and embeds site `i` at residue
/// `(i - 1) mod (t + 1)`.
pub fn mh_encode(code: &MHCode, mu: &PureState) -> Result<PureState> {
    let mut state = basecode::encode(&code.base, mu)?;
    for i in 1..=code.n {
        state = state.map_site(i, &eta_matrix(code.l, code.t, code.residue(i))?)?;
    }
    Ok(state)
}

/// The unique `S` with `delete(m, S) = r_obs`, `m = monotone_periodic(n, t)`.
pub fn detect_deletion_positions(r_obs: &Sequence, n: usize, t: usize) -> Result<IndexSet> {
    if r_obs.len() > n {
        return Err(Error::NotADeletion(r_obs.symbols().to_vec()));
    }
    let d = n - r_obs.len();
    if d > t {
        return Err(Error::Parameter(format!("{d} deletions inferred, code corrects {t}")));
    }
    let m = monotone_periodic(n, t);
    if r_obs.alphabet_size() != m.alphabet_size() {
        return Err(Error::AlphabetMismatch(m.alphabet_size(), r_obs.alphabet_size()));
    }
    let mut found = IndexSet::all_of_size(n, d).filter(|s| delete(&m, s).map(|z| z == *r_obs).unwrap_or(false));
    let first = found.next().ok_or_else(|| Error::NotADeletion(r_obs.symbols().to_vec()))?;
    if found.next().is_some() {
        return Err(Error::AmbiguousDeletion(r_obs.symbols().to_vec()));
    }
    Ok(first)
}

/// Measures every site by residue class, left to right, sampling outcomes
/// from `rng`. Returns the result word and the post-measurement state.
pub fn measure_marker<R: Rng + ?Sized>(code: &MHCode, rho: &Ensemble, rng: &mut R) -> Result<(Sequence, Ensemble)> {
    let fam = code.measurement();
    let mut state = rho.clone();
    let mut results = Vec::with_capacity(rho.spec().num_sites());
    for site in 1..=rho.spec().num_sites() {
        let outcome = qsim::sample_branch(measure_branches(&state, site, &fam)?, rng)?;
        results.push(outcome.outcome as u32);
        state = outcome.post;
    }
    Ok((Sequence::new((code.t + 1) as u32, results)?, state))
}

/// Every joint outcome of the residue measurement with its probability,
/// in lexicographic order of the result word.
pub fn measure_marker_branches(code: &MHCode, rho: &Ensemble) -> Result<Vec<(f64, Sequence, Ensemble)>> {
    let fam = code.measurement();
    let mut frontier = vec![(1.0, Vec::new(), rho.clone())];
    for site in 1..=rho.spec().num_sites() {
        let mut next = Vec::new();
        for (p, results, state) in frontier {
            for b in measure_branches(&state, site, &fam)? {
                let mut r: Vec<u32> = results.clone();
                r.push(b.outcome as u32);
                next.push((p * b.probability, r, b.post));
            }
        }
        frontier = next;
    }
    frontier.into_iter().map(|(p, r, s)| Ok((p, Sequence::new((code.t + 1) as u32, r)?, s))).collect()
}

fn unembed_all(code: &MHCode, rho: &Ensemble) -> Result<Ensemble> {
    let mut state = rho.clone();
    for i in 1..=code.n {
        state = eta_unembed(&state, i, code.l, code.t, code.residue(i))?;
    }
    Ok(state)
}

/// Deletion decoding given the residue-measurement results `r` of the
/// surviving sites.
pub fn mh_deletion_decode_known(code: &MHCode, rho: &Ensemble, r: &Sequence) -> Result<Ensemble> {
    if r.len() != rho.spec().num_sites() {
        return Err(Error::LengthMismatch { expected: rho.spec().num_sites(), got: r.len() });
    }
    let s = detect_deletion_positions(r, code.n, code.t)?;
    let full = if s.is_empty() {
        rho.clone()
    } else {
        // erased slots get the embedded image of |0> at their own residue
        let digits: Vec<usize> = s.indices().iter().map(|&i| code.residue(i)).collect();
        let fresh = PureState::basis(code.embedded_spec(s.len())?, &digits)?;
        qsim::insert_qudits(rho, &s, &Ensemble::pure(fresh))?
    };
    basecode::correct_erasures(&code.base, &unembed_all(code, &full)?, &s)
}

/// Measures the surviving sites, locates the deletions and corrects them as
/// erasures.
pub fn mh_deletion_decode(code: &MHCode, rho: &Ensemble, seed: u64) -> Result<Ensemble> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (r, post) = measure_marker(code, rho, &mut rng)?;
    mh_deletion_decode_known(code, &post, &r)
}

/// Unembeds every site and corrects one arbitrary single-site error.
pub fn mh_unitary_decode(code: &MHCode, rho: &Ensemble, seed: u64) -> Result<Ensemble> {
    check_sites(code, rho)?;
    basecode::correct_single_error_with(
        &code.base,
        &unembed_all(code, rho)?,
        RecoveryRoute::Auto,
        Branching::Sample(seed),
    )
}

/// [`mh_unitary_decode`] with every syndrome branch kept apart.
pub fn mh_unitary_decode_branches(code: &MHCode, rho: &Ensemble) -> Result<Vec<(f64, Ensemble)>> {
    check_sites(code, rho)?;
    basecode::correct_single_error_branches(&code.base, &unembed_all(code, rho)?, RecoveryRoute::Auto)
}

fn check_sites(code: &MHCode, rho: &Ensemble) -> Result<()> {
    let expect = code.embedded_spec(code.n)?;
    if *rho.spec() != expect {
        return Err(Error::DimensionMismatch(format!("expected {:?}, got {:?}", expect.dims(), rho.spec().dims())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basecode::{five_qudit_code, weyl_site_matrix};
    use crate::seqcore::deletion_ball;

    fn code() -> MHCode {
        MHCode::new(five_qudit_code(), 2).unwrap()
    }

    fn seq(q: u32, s: &[u32]) -> Sequence {
        Sequence::new(q, s.to_vec()).unwrap()
    }

    fn message(seed: u64) -> PureState {
        PureState::random(QuditSpec::uniform(1, 2).unwrap(), &mut ChaCha8Rng::seed_from_u64(seed))
    }

    #[test]
    fn eta_examples() {
        let one = Ensemble::pure(PureState::basis(QuditSpec::uniform(1, 2).unwrap(), &[1]).unwrap());
        let up = eta_embed(&one, 1, 2, 2, 0).unwrap();
        let three = PureState::basis(QuditSpec::uniform(1, 6).unwrap(), &[3]).unwrap();
        assert!((qsim::fidelity(&three, &up).unwrap() - 1.0).abs() < 1e-12);
        let psi =
            Ensemble::pure(PureState::random(QuditSpec::new(vec![2, 3]).unwrap(), &mut ChaCha8Rng::seed_from_u64(2)));
        let round = eta_unembed(&eta_embed(&psi, 1, 2, 2, 1).unwrap(), 1, 2, 2, 1).unwrap();
        assert!(qsim::hs_distance_sq(&psi, &round).unwrap() < 1e-12);
        assert!(matches!(eta_unembed(&up, 1, 2, 2, 1), Err(Error::ResidueLeak { .. })));
        assert!(eta_embed(&up, 1, 2, 2, 0).is_err());
    }

    #[test]
    fn encoded_states_measure_to_the_marker() {
        let code = code();
        let enc = mh_encode(&code, &message(1)).unwrap();
        assert!((enc.norm_sqr() - 1.0).abs() < 1e-12);
        assert_eq!(enc.spec().dims(), &[6; 5]);
        let rho = Ensemble::pure(enc.clone());
        let fam = code.measurement();
        for site in 1..=5 {
            let branches = measure_branches(&rho, site, &fam).unwrap();
            assert_eq!(branches.len(), 1);
            assert_eq!(branches[0].outcome, code.residue(site));
            assert!((branches[0].probability - 1.0).abs() < 1e-9);
            assert!(branches[0].post.components()[0].1.same_ray(&enc, 1e-12));
        }
        let all = measure_marker_branches(&code, &rho).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].1, code.marker());
    }

    #[test]
    fn detect_examples() {
        let s = detect_deletion_positions(&seq(3, &[0, 1, 2, 1, 2, 0]), 7, 2).unwrap();
        assert_eq!(s.indices(), &[4]);
        let s = detect_deletion_positions(&seq(3, &[0, 1, 2, 0, 1]), 7, 2).unwrap();
        assert_eq!(s.indices(), &[6, 7]);
        assert!(detect_deletion_positions(&monotone_periodic(7, 2), 7, 2).unwrap().is_empty());
        assert!(matches!(detect_deletion_positions(&seq(3, &[1, 1, 2, 0, 1, 2]), 7, 2), Err(Error::NotADeletion(_))));
        assert!(detect_deletion_positions(&seq(3, &[0, 1, 2, 0]), 7, 2).is_err());
    }

    #[test]
    fn detection_inverts_deletion() {
        for t in 1..=3 {
            for n in 1..=12 {
                let m = monotone_periodic(n, t);
                for d in 0..=t.min(n) {
                    for s in IndexSet::all_of_size(n, d) {
                        let r = delete(&m, &s).unwrap();
                        assert_eq!(detect_deletion_positions(&r, n, t).unwrap(), s, "n={n} t={t}");
                    }
                }
            }
        }
        // deletion balls of the marker never collide across distinct patterns
        assert_eq!(deletion_ball(&monotone_periodic(7, 2), 2).unwrap().len(), 21);
    }

    #[test]
    fn round_trip_without_deletions() {
        let code = code();
        let mu = message(5);
        let rho = Ensemble::pure(mh_encode(&code, &mu).unwrap());
        let out = mh_deletion_decode(&code, &rho, 0).unwrap();
        assert!(qsim::fidelity(&mu, &out).unwrap() >= 1.0 - 1e-9);
        let out = mh_unitary_decode(&code, &rho, 0).unwrap();
        assert!(qsim::fidelity(&mu, &out).unwrap() >= 1.0 - 1e-9);
    }

    #[test]
    fn every_deletion_pattern_is_corrected() {
        let code = code();
        let mu = message(9);
        let rho = Ensemble::pure(mh_encode(&code, &mu).unwrap());
        for d in 1..=2 {
            for s in IndexSet::all_of_size(5, d) {
                let lost = qsim::delete_qudits(&rho, &s).unwrap();
                let out = mh_deletion_decode(&code, &lost, 7).unwrap();
                assert!(qsim::fidelity(&mu, &out).unwrap() >= 1.0 - 1e-9, "S = {s}");
                assert!((out.trace() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn residue_preserving_errors_are_corrected() {
        let code = code();
        let mu = message(11);
        let enc = Ensemble::pure(mh_encode(&code, &mu).unwrap());
        for site in 1..=5 {
            let eta = eta_matrix(2, 2, code.residue(site)).unwrap();
            for (a, b) in [(0, 1), (1, 0), (1, 1)] {
                // eta P eta^dagger stays inside the residue subspace
                let op = eta.matmul(&weyl_site_matrix(2, a, b)).matmul(&eta.adjoint());
                let hit = enc.map_site(site, &op).unwrap();
                let out = mh_unitary_decode(&code, &hit, 3).unwrap();
                assert!(qsim::fidelity(&mu, &out).unwrap() >= 1.0 - 1e-9);
            }
        }
    }

    #[test]
    fn collapsed_insertion_in_place_is_corrected() {
        let code = code();
        let mu = message(13);
        let enc = Ensemble::pure(mh_encode(&code, &mu).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for site in 1..=5 {
            let fresh = Ensemble::pure(PureState::random(QuditSpec::uniform(1, 2).unwrap(), &mut rng));
            let sigma = eta_embed(&fresh, 1, 2, 2, code.residue(site)).unwrap();
            let j = IndexSet::new(6, [site]).unwrap();
            let inserted = qsim::insert_qudits(&enc, &j, &sigma).unwrap();
            let received = qsim::delete_qudits(&inserted, &IndexSet::new(6, [site + 1]).unwrap()).unwrap();
            let (r, post) = measure_marker(&code, &received, &mut rng).unwrap();
            assert_eq!(r, code.marker());
            for (p, out) in mh_unitary_decode_branches(&code, &post).unwrap() {
                assert!(p > 0.0);
                assert!(qsim::fidelity(&mu, &out).unwrap() >= 1.0 - 1e-9, "site {site}");
            }
        }
    }

    #[test]
    fn requires_enough_erasure_capability() {
        assert!(MHCode::new(five_qudit_code(), 3).is_err());
        assert!(MHCode::new(five_qudit_code(), 0).is_err());
        assert_eq!(code().embedded_dim(), 6);
    }
}
