//! Base erasure-correcting codes given as explicit encoding isometries.
//!
//! A [`CodeIsometry`] maps `k` logical sites of dimension `l` into `n0`
//! physical sites. Decoding always ends in the logical register: recovery
//! projects onto one correctable error subspace, undoes the error, and
//! applies `V^†`.
//!
//! Two recovery routes exist. Codes that carry stabilizer generators are
//! decoded by syndrome measurement and a lookup table of generalized Pauli
//! corrections. Any other code falls back to the canonical recovery built
//! from the Knill-Laflamme structure of the error set: the images `E_a V`
//! are orthonormalized into isometries `F_c` with mutually orthogonal
//! ranges and the recovery reads out `F_c^†`.

use std::collections::HashMap;
use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{self, Ensemble, PureState, QuditSpec, SiteMatrix, C64};
use crate::seqcore::IndexSet;

/// Tolerance for isometry and Knill-Laflamme checks.
pub const KL_TOL: f64 = 1e-10;

/// Largest norm loss tolerated when a recovered vector is pulled back
/// through `V^†`.
const LEAK_TOL: f64 = 1e-6;

fn omega(d: usize, power: u64) -> C64 {
    let p = (power % d as u64) as f64;
    C64::from_polar(1.0, 2.0 * PI * p / d as f64)
}

/// `X^a Z^b` on a `d`-level site, with `X|j> = |j+1>` and `Z|j> = w^j |j>`.
pub fn weyl_site_matrix(d: usize, a: usize, b: usize) -> SiteMatrix {
    let mut m = SiteMatrix::zeros(d, d);
    for j in 0..d {
        m.set((j + a) % d, j, omega(d, (b * j) as u64));
    }
    m
}

/// The `l^2` single-site operators `X^a Z^b`; they form a unitary operator
/// basis of one site.
#[derive(Clone, Debug)]
pub struct ErrorBasis {
    l: usize,
    ops: Vec<((usize, usize), SiteMatrix)>,
}

impl ErrorBasis {
    pub fn new(l: usize) -> Self {
        let ops = (0..l)
            .flat_map(|a| (0..l).map(move |b| (a, b)))
            .map(|(a, b)| ((a, b), weyl_site_matrix(l, a, b)))
            .collect();
        ErrorBasis { l, ops }
    }

    pub fn dim(&self) -> usize {
        self.l
    }

    /// `((a, b), X^a Z^b)` pairs, identity first.
    pub fn ops(&self) -> &[((usize, usize), SiteMatrix)] {
        &self.ops
    }
}

/// A tensor product of `X^a Z^b` factors over `n` sites of dimension `d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct WeylOp {
    d: usize,
    x: Vec<usize>,
    z: Vec<usize>,
}

impl WeylOp {
    pub fn new(d: usize, x: Vec<usize>, z: Vec<usize>) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::LengthMismatch { expected: x.len(), got: z.len() });
        }
        let x = x.into_iter().map(|v| v % d).collect();
        let z = z.into_iter().map(|v| v % d).collect();
        Ok(WeylOp { d, x, z })
    }

    pub fn identity(d: usize, n: usize) -> Self {
        WeylOp { d, x: vec![0; n], z: vec![0; n] }
    }

    /// `X^a Z^b` on 1-based `site`, identity elsewhere.
    pub fn single(d: usize, n: usize, site: usize, a: usize, b: usize) -> Self {
        let mut op = Self::identity(d, n);
        op.x[site - 1] = a % d;
        op.z[site - 1] = b % d;
        op
    }

    pub fn num_sites(&self) -> usize {
        self.x.len()
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).filter(|(a, b)| **a != 0 || **b != 0).count()
    }

    /// Site-wise product, dropping the global phase.
    pub fn product_up_to_phase(&self, other: &WeylOp) -> WeylOp {
        let d = self.d;
        WeylOp {
            d,
            x: self.x.iter().zip(&other.x).map(|(a, b)| (a + b) % d).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| (a + b) % d).collect(),
        }
    }

    /// Exponent `s` with `self * other = w^s * other * self`.
    pub fn commutation(&self, other: &WeylOp) -> usize {
        let d = self.d;
        let mut s = 0;
        for i in 0..self.x.len() {
            s += self.z[i] * other.x[i] + (d - other.z[i] % d) * self.x[i];
        }
        s % d
    }

    fn site_index_map(&self, dims_total: usize) -> Vec<(usize, u64)> {
        // image index and phase exponent for each basis index
        let (d, n) = (self.d, self.x.len());
        let mut out = Vec::with_capacity(dims_total);
        for idx in 0..dims_total {
            let mut rem = idx;
            let mut digits = vec![0usize; n];
            for s in (0..n).rev() {
                digits[s] = rem % d;
                rem /= d;
            }
            let mut target = 0;
            let mut phase = 0u64;
            for s in 0..n {
                phase += (self.z[s] * digits[s]) as u64;
                target = target * d + (digits[s] + self.x[s]) % d;
            }
            out.push((target, phase));
        }
        out
    }

    /// `E |v>` for a vector on `n` sites of dimension `d`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        for (idx, (target, phase)) in self.site_index_map(v.len()).into_iter().enumerate() {
            out[target] = v[idx] * omega(self.d, phase);
        }
        out
    }

    /// `E^† |v>`.
    pub fn apply_adjoint(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        for (idx, (target, phase)) in self.site_index_map(v.len()).into_iter().enumerate() {
            out[idx] = v[target] * omega(self.d, phase).conj();
        }
        out
    }

    pub fn to_local(&self) -> LocalOperator {
        let factors = (0..self.x.len())
            .filter(|&s| self.x[s] != 0 || self.z[s] != 0)
            .map(|s| (s + 1, weyl_site_matrix(self.d, self.x[s], self.z[s])))
            .collect();
        LocalOperator { factors }
    }
}

/// A product of single-site operators; sites not listed carry the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOperator {
    pub factors: Vec<(usize, SiteMatrix)>,
}

impl LocalOperator {
    pub fn identity() -> Self {
        LocalOperator { factors: Vec::new() }
    }

    pub fn apply(&self, spec: &QuditSpec, v: &[C64]) -> Result<Vec<C64>> {
        let mut state = PureState::from_parts(spec.clone(), v.to_vec());
        for (site, m) in &self.factors {
            if m.rows() != m.cols() {
                return Err(Error::DimensionMismatch("local operators must be square".into()));
            }
            let next = state.apply_site(*site, m)?;
            state = PureState::from_parts(spec.clone(), next);
        }
        Ok(state.amplitudes().to_vec())
    }
}

/// A code given by its encoding isometry.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodeIsometry {
    pub name: String,
    pub n0: usize,
    pub l: usize,
    pub k: usize,
    /// Number of erasures at known positions the code corrects.
    pub erasure_capability: usize,
    /// Column `c` is the physical image of logical basis ket `c`.
    #[serde(rename = "encoder")]
    columns: Vec<Vec<C64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stabilizers: Option<Vec<WeylOp>>,
}

impl CodeIsometry {
    /// Validates dimensions and the isometry property `V^† V = I`.
    pub fn new(
        name: impl Into<String>,
        n0: usize,
        l: usize,
        k: usize,
        erasure_capability: usize,
        columns: Vec<Vec<C64>>,
    ) -> Result<Self> {
        if l < 2 || n0 == 0 || k == 0 {
            return Err(Error::Code(format!("invalid code shape n0={n0} l={l} k={k}")));
        }
        let (phys, logical) = (l.pow(n0 as u32), l.pow(k as u32));
        if columns.len() != logical || columns.iter().any(|c| c.len() != phys) {
            return Err(Error::Code(format!("encoder must be {phys} x {logical}")));
        }
        let code = CodeIsometry { name: name.into(), n0, l, k, erasure_capability, columns, stabilizers: None };
        let defect = code.isometry_defect();
        if defect > KL_TOL {
            return Err(Error::Code(format!("encoder is not an isometry (defect {defect:e})")));
        }
        Ok(code)
    }

    /// Attaches stabilizer generators; every codeword must be a +1
    /// eigenvector of each.
    pub fn with_stabilizers(mut self, generators: Vec<WeylOp>) -> Result<Self> {
        for g in &generators {
            if g.d != self.l || g.num_sites() != self.n0 {
                return Err(Error::Code("stabilizer shape does not match the code".into()));
            }
            for col in &self.columns {
                let img = g.apply(col);
                let diff: f64 = img.iter().zip(col).map(|(a, b)| (a - b).norm_sqr()).sum();
                if diff.sqrt() > KL_TOL {
                    return Err(Error::Code("codeword is not stabilized".into()));
                }
            }
        }
        self.stabilizers = Some(generators);
        Ok(self)
    }

    pub fn stabilizers(&self) -> Option<&[WeylOp]> {
        self.stabilizers.as_deref()
    }

    pub fn columns(&self) -> &[Vec<C64>] {
        &self.columns
    }

    pub fn physical_spec(&self) -> QuditSpec {
        QuditSpec::uniform(self.n0, self.l).expect("validated shape")
    }

    pub fn logical_spec(&self) -> QuditSpec {
        QuditSpec::uniform(self.k, self.l).expect("validated shape")
    }

    /// `max |(V^† V - I)_{ab}|`.
    pub fn isometry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, ca) in self.columns.iter().enumerate() {
            for (b, cb) in self.columns.iter().enumerate() {
                let g = qsim::inner(ca, cb);
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// `V^† |v>`.
    pub fn pull_back(&self, v: &[C64]) -> Vec<C64> {
        self.columns.iter().map(|c| qsim::inner(c, v)).collect()
    }

    /// `V V^† |v>`: projection onto the code space.
    pub fn project(&self, v: &[C64]) -> Vec<C64> {
        let coeffs = self.pull_back(v);
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        for (c, col) in coeffs.iter().zip(&self.columns) {
            out.iter_mut().zip(col).for_each(|(o, x)| *o += c * x);
        }
        out
    }
}

/// Encodes a logical pure state.
pub fn encode(code: &CodeIsometry, mu: &PureState) -> Result<PureState> {
    if *mu.spec() != code.logical_spec() {
        return Err(Error::DimensionMismatch(format!(
            "message on {:?}, code expects {:?}",
            mu.spec().dims(),
            code.logical_spec().dims()
        )));
    }
    let mut out = vec![C64::new(0.0, 0.0); code.columns[0].len()];
    for (a, col) in mu.amplitudes().iter().zip(&code.columns) {
        out.iter_mut().zip(col).for_each(|(o, x)| *o += a * x);
    }
    PureState::normalized(code.physical_spec(), out)
}

/// Largest deviation of `V^† E_a^† E_b V` from a multiple of the identity
/// over all ordered pairs.
pub fn kl_residual(code: &CodeIsometry, errors: &[LocalOperator]) -> Result<f64> {
    let spec = code.physical_spec();
    let images: Vec<Vec<Vec<C64>>> = errors
        .iter()
        .map(|e| code.columns.iter().map(|c| e.apply(&spec, c)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let k = code.columns.len();
    let mut worst: f64 = 0.0;
    for ma in &images {
        for mb in &images {
            let g: Vec<C64> = (0..k * k).map(|idx| qsim::inner(&ma[idx / k], &mb[idx % k])).collect();
            let lambda = (0..k).map(|i| g[i * k + i]).sum::<C64>() / k as f64;
            for r in 0..k {
                for c in 0..k {
                    let target = if r == c { lambda } else { C64::new(0.0, 0.0) };
                    worst = worst.max((g[r * k + c] - target).norm());
                }
            }
        }
    }
    Ok(worst)
}

/// Whether the Knill-Laflamme conditions hold for `errors` within [`KL_TOL`].
pub fn kl_verify(code: &CodeIsometry, errors: &[LocalOperator]) -> Result<bool> {
    Ok(kl_residual(code, errors)? <= KL_TOL)
}

/// Identity plus every non-identity `X^a Z^b` on a single site.
pub fn single_site_errors(code: &CodeIsometry) -> Vec<WeylOp> {
    let mut out = vec![WeylOp::identity(code.l, code.n0)];
    for site in 1..=code.n0 {
        for a in 0..code.l {
            for b in 0..code.l {
                if a != 0 || b != 0 {
                    out.push(WeylOp::single(code.l, code.n0, site, a, b));
                }
            }
        }
    }
    out
}

/// Every `X^a Z^b` product supported on the sites of `j`.
pub fn errors_supported_on(code: &CodeIsometry, j: &IndexSet) -> Vec<WeylOp> {
    let d = code.l;
    let mut out = vec![WeylOp::identity(d, code.n0)];
    for &site in j.indices() {
        let mut next = Vec::with_capacity(out.len() * d * d);
        for op in &out {
            for a in 0..d {
                for b in 0..d {
                    let mut e = op.clone();
                    e.x[site - 1] = a;
                    e.z[site - 1] = b;
                    next.push(e);
                }
            }
        }
        out = next;
    }
    out
}

/// Which recovery procedure to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RecoveryRoute {
    /// Stabilizer generators when present, otherwise canonical.
    Auto,
    Stabilizer,
    Canonical,
}

/// How recovery branches are resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branching {
    /// Follow every branch and return the probability-weighted mixture.
    Enumerate,
    /// Sample a single branch from the given seed.
    Sample(u64),
}

struct RecoveryBranch {
    probability: f64,
    logical: Ensemble,
}

/// Syndrome-table decoding over stabilizer generators.
fn stabilizer_branches(code: &CodeIsometry, rho: &Ensemble, table: &[WeylOp]) -> Result<Vec<RecoveryBranch>> {
    let gens = code.stabilizers().ok_or_else(|| Error::Code("code has no stabilizers".into()))?;
    let d = code.l;
    let mut lookup: HashMap<Vec<u32>, &WeylOp> = HashMap::new();
    for e in table {
        let syn: Vec<u32> = gens.iter().map(|g| g.commutation(e) as u32).collect();
        lookup.entry(syn).or_insert(e);
    }
    // branch over each generator's eigenvalue in turn
    let mut frontier: Vec<(Vec<u32>, Vec<(f64, Vec<C64>)>)> =
        vec![(Vec::new(), rho.components().iter().map(|(w, s)| (*w, s.amplitudes().to_vec())).collect())];
    for g in gens {
        let mut next = Vec::new();
        for (syn, parts) in frontier {
            // g^k |v> for k = 0..d
            let powers: Vec<Vec<Vec<C64>>> = parts
                .iter()
                .map(|(_, v)| {
                    let mut p = vec![v.clone()];
                    for _ in 1..d {
                        p.push(g.apply(p.last().unwrap()));
                    }
                    p
                })
                .collect();
            for s in 0..d {
                let mut branch = Vec::with_capacity(parts.len());
                let mut prob = 0.0;
                for ((w, _), pw) in parts.iter().zip(&powers) {
                    let mut v = vec![C64::new(0.0, 0.0); pw[0].len()];
                    for (kk, gv) in pw.iter().enumerate() {
                        let phase = omega(d, ((d - s) * kk) as u64) / d as f64;
                        v.iter_mut().zip(gv).for_each(|(o, x)| *o += phase * x);
                    }
                    let n2 = qsim::norm_sqr(&v);
                    prob += w * n2;
                    branch.push((*w, v));
                }
                if prob > qsim::BRANCH_THRESHOLD {
                    let mut syn = syn.clone();
                    syn.push(s as u32);
                    next.push((syn, branch));
                }
            }
        }
        frontier = next;
    }
    let mut out = Vec::with_capacity(frontier.len());
    for (syn, parts) in frontier {
        let correction = lookup.get(&syn).ok_or_else(|| Error::UnknownSyndrome(syn.clone()))?;
        let prob: f64 = parts.iter().map(|(w, v)| w * qsim::norm_sqr(v)).sum();
        let mut logical = Vec::with_capacity(parts.len());
        let mut leaked = 0.0;
        for (w, v) in parts {
            let fixed = correction.apply_adjoint(&v);
            let pulled = code.pull_back(&fixed);
            leaked += w * (qsim::norm_sqr(&fixed) - qsim::norm_sqr(&pulled));
            logical.push((w, pulled));
        }
        if leaked > LEAK_TOL * prob {
            return Err(Error::Code("corrected state leaves the code space".into()));
        }
        out.push(RecoveryBranch {
            probability: prob,
            logical: Ensemble::from_weighted_vectors(code.logical_spec(), logical)?,
        });
    }
    Ok(out)
}

/// Orthonormalized error images `F_c`, each stored column by column.
fn canonical_isometries(code: &CodeIsometry, errors: &[LocalOperator]) -> Result<Vec<Vec<Vec<C64>>>> {
    let spec = code.physical_spec();
    let k = code.columns.len() as f64;
    let mut basis: Vec<Vec<Vec<C64>>> = Vec::new();
    for e in errors {
        let mut m: Vec<Vec<C64>> = code.columns.iter().map(|c| e.apply(&spec, c)).collect::<Result<_>>()?;
        for f in &basis {
            // <F, M> = tr(F^† M) / k
            let coeff: C64 = f.iter().zip(&m).map(|(a, b)| qsim::inner(a, b)).sum::<C64>() / k;
            for (mc, fc) in m.iter_mut().zip(f) {
                mc.iter_mut().zip(fc).for_each(|(x, y)| *x -= coeff * y);
            }
        }
        let n2: f64 = m.iter().map(|c| qsim::norm_sqr(c)).sum::<f64>() / k;
        if n2 > 1e-10 {
            let s = 1.0 / n2.sqrt();
            m.iter_mut().flatten().for_each(|x| *x *= s);
            basis.push(m);
        }
    }
    Ok(basis)
}

fn canonical_branches(code: &CodeIsometry, rho: &Ensemble, errors: &[LocalOperator]) -> Result<Vec<RecoveryBranch>> {
    let isos = canonical_isometries(code, errors)?;
    let mut out = Vec::new();
    for f in &isos {
        let mut parts = Vec::with_capacity(rho.len());
        let mut prob = 0.0;
        for (w, s) in rho.components() {
            let v: Vec<C64> = f.iter().map(|col| qsim::inner(col, s.amplitudes())).collect();
            prob += w * qsim::norm_sqr(&v);
            parts.push((*w, v));
        }
        if prob > qsim::BRANCH_THRESHOLD {
            out.push(RecoveryBranch {
                probability: prob,
                logical: Ensemble::from_weighted_vectors(code.logical_spec(), parts)?,
            });
        }
    }
    let captured: f64 = out.iter().map(|b| b.probability).sum();
    if (captured - rho.trace()).abs() > LEAK_TOL {
        return Err(Error::Code(format!("state leaves every correctable subspace (captured {captured})")));
    }
    Ok(out)
}

fn resolve(branches: Vec<RecoveryBranch>, branching: Branching) -> Result<Ensemble> {
    if branches.is_empty() {
        return Err(Error::ZeroProbability);
    }
    match branching {
        Branching::Enumerate => {
            let total: f64 = branches.iter().map(|b| b.probability).sum();
            Ensemble::mix(branches.into_iter().map(|b| (b.probability / total, b.logical)).collect())
        }
        Branching::Sample(seed) => {
            use rand::Rng;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let total: f64 = branches.iter().map(|b| b.probability).sum();
            let u = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let last = branches.len() - 1;
            for (i, b) in branches.into_iter().enumerate() {
                acc += b.probability;
                if u < acc || i == last {
                    return Ok(b.logical);
                }
            }
            unreachable!()
        }
    }
}

fn check_physical(code: &CodeIsometry, rho: &Ensemble) -> Result<()> {
    if *rho.spec() != code.physical_spec() {
        return Err(Error::DimensionMismatch(format!(
            "state on {:?}, code expects {:?}",
            rho.spec().dims(),
            code.physical_spec().dims()
        )));
    }
    Ok(())
}

fn route_branches(
    code: &CodeIsometry,
    rho: &Ensemble,
    table: Vec<WeylOp>,
    route: RecoveryRoute,
) -> Result<Vec<RecoveryBranch>> {
    let use_stabilizer = match route {
        RecoveryRoute::Auto => code.stabilizers.is_some(),
        RecoveryRoute::Stabilizer => true,
        RecoveryRoute::Canonical => false,
    };
    if use_stabilizer {
        stabilizer_branches(code, rho, &table)
    } else {
        let local: Vec<LocalOperator> = table.iter().map(WeylOp::to_local).collect();
        canonical_branches(code, rho, &local)
    }
}

fn recover(
    code: &CodeIsometry,
    rho: &Ensemble,
    table: Vec<WeylOp>,
    route: RecoveryRoute,
    branching: Branching,
) -> Result<Ensemble> {
    check_physical(code, rho)?;
    resolve(route_branches(code, rho, table, route)?, branching)
}

/// Corrects an arbitrary channel acting on at most one site and returns the
/// logical state. The syndrome outcome is sampled from `seed`.
pub fn correct_single_error(code: &CodeIsometry, rho: &Ensemble, seed: u64) -> Result<Ensemble> {
    correct_single_error_with(code, rho, RecoveryRoute::Auto, Branching::Sample(seed))
}

pub fn correct_single_error_with(
    code: &CodeIsometry,
    rho: &Ensemble,
    route: RecoveryRoute,
    branching: Branching,
) -> Result<Ensemble> {
    recover(code, rho, single_site_errors(code), route, branching)
}

/// Every recovery branch of single-error correction with its probability,
/// in syndrome order.
pub fn correct_single_error_branches(
    code: &CodeIsometry,
    rho: &Ensemble,
    route: RecoveryRoute,
) -> Result<Vec<(f64, Ensemble)>> {
    check_physical(code, rho)?;
    let branches = route_branches(code, rho, single_site_errors(code), route)?;
    Ok(branches.into_iter().map(|b| (b.probability, b.logical)).collect())
}

/// Decodes a state whose sites `j` were erased and then reset to a fixed
/// state, returning the logical state.
pub fn correct_erasures(code: &CodeIsometry, rho: &Ensemble, j: &IndexSet) -> Result<Ensemble> {
    correct_erasures_with(code, rho, j, RecoveryRoute::Auto, Branching::Enumerate)
}

pub fn correct_erasures_with(
    code: &CodeIsometry,
    rho: &Ensemble,
    j: &IndexSet,
    route: RecoveryRoute,
    branching: Branching,
) -> Result<Ensemble> {
    if j.len() > code.erasure_capability {
        return Err(Error::TooManyErasures { erased: j.len(), capability: code.erasure_capability });
    }
    if j.bound() != code.n0 {
        return Err(Error::BoundMismatch { expected: code.n0, got: j.bound() });
    }
    recover(code, rho, errors_supported_on(code, j), route, branching)
}

/// Cyclic stabilizer generators `X Z Z^† X^† I` of the five-site code.
fn five_site_generators(d: usize) -> Vec<WeylOp> {
    (0..4)
        .map(|shift| {
            let mut x = vec![0; 5];
            let mut z = vec![0; 5];
            x[shift % 5] = 1;
            z[(shift + 1) % 5] = 1;
            z[(shift + 2) % 5] = d - 1;
            x[(shift + 3) % 5] = d - 1;
            WeylOp { d, x, z }
        })
        .collect()
}

fn is_prime(d: usize) -> bool {
    d >= 2 && (2..d).take_while(|p| p * p <= d).all(|p| !d.is_multiple_of(p))
}

/// The five-site distance-3 code over prime dimension `l` (the perfect
/// `[[5,1,3]]` code for `l = 2`). Corrects one arbitrary single-site error
/// or two erasures at known positions.
pub fn five_qudit_code_dim(l: usize) -> Result<CodeIsometry> {
    if !is_prime(l) {
        return Err(Error::Code(format!("five-site code needs a prime dimension, got {l}")));
    }
    let gens = five_site_generators(l);
    let phys = l.pow(5);
    // project |00000> onto the joint +1 eigenspace
    let mut zero = vec![C64::new(0.0, 0.0); phys];
    zero[0] = C64::new(1.0, 0.0);
    for g in &gens {
        let mut acc = zero.clone();
        let mut p = zero.clone();
        for _ in 1..l {
            p = g.apply(&p);
            acc.iter_mut().zip(&p).for_each(|(a, b)| *a += b);
        }
        zero = acc;
    }
    let n2 = qsim::norm_sqr(&zero);
    zero.iter_mut().for_each(|a| *a /= n2.sqrt());
    let logical_x = WeylOp { d: l, x: vec![1; 5], z: vec![0; 5] };
    let mut columns = vec![zero];
    for _ in 1..l {
        let next = logical_x.apply(columns.last().unwrap());
        columns.push(next);
    }
    CodeIsometry::new("five-qudit", 5, l, 1, 2, columns)?.with_stabilizers(gens)
}

/// The qubit five-site code.
pub fn five_qudit_code() -> CodeIsometry {
    five_qudit_code_dim(2).expect("qubit five-site code is valid")
}

/// Looks up a built-in code by name.
pub fn builtin_code(name: &str, l: usize) -> Result<CodeIsometry> {
    match name {
        "five-qudit" | "five-qubit" | "perfect5" => five_qudit_code_dim(l),
        other => Err(Error::Config(format!("unknown built-in code {other:?}"))),
    }
}
