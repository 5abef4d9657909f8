//! Qudit pure states and weighted pure-state ensembles.
//!
//! Amplitudes are stored in Kronecker order with site 1 as the most
//! significant digit. Sites may have different dimensions, which lets a
//! single site be embedded into a larger space without touching the rest.
//!
//! Mixed states are only ever represented as ensembles `sum_k w_k |phi_k><phi_k|`.
//! Every channel in this module maps ensembles to ensembles exactly.

mod channel;
mod measure;

pub use channel::{delete_qudits, index_permute, insert_qudits, insertion_permutation};
pub(crate) use measure::sample_branch;
pub use measure::{
    computational_family, measure_branches, measure_site, mt_family, MeasurementFamily, Outcome, BRANCH_THRESHOLD,
};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance on the squared norm of states and on ensemble weight sums.
pub const NORM_TOL: f64 = 1e-9;

/// Components lighter than this are dropped after a partial trace.
pub const DROP_WEIGHT: f64 = 1e-12;

/// Per-site dimensions of a register.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuditSpec {
    dims: Vec<usize>,
}

impl QuditSpec {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::EmptySystem);
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::DimensionMismatch(format!("site dimension {d} < 2")));
        }
        Ok(QuditSpec { dims })
    }

    /// `n` sites of dimension `d`.
    pub fn uniform(n: usize, d: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_sites(&self) -> usize {
        self.dims.len()
    }

    /// Dimension of 1-based `site`.
    pub fn dim(&self, site: usize) -> usize {
        self.dims[site - 1]
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// `(outer, d, inner)` block shape around 1-based `site`.
    pub(crate) fn split(&self, site: usize) -> (usize, usize, usize) {
        let outer = self.dims[..site - 1].iter().product();
        let inner = self.dims[site..].iter().product();
        (outer, self.dims[site - 1], inner)
    }

    pub(crate) fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.dims.len() {
            return Err(Error::IndexOutOfRange { index: site, bound: self.dims.len() });
        }
        Ok(())
    }

    pub(crate) fn with_site(&self, site: usize, d: usize) -> QuditSpec {
        let mut dims = self.dims.clone();
        dims[site - 1] = d;
        QuditSpec { dims }
    }

    pub(crate) fn without_site(&self, site: usize) -> Option<QuditSpec> {
        let mut dims = self.dims.clone();
        dims.remove(site - 1);
        (!dims.is_empty()).then_some(QuditSpec { dims })
    }

    fn concat(&self, other: &QuditSpec) -> QuditSpec {
        QuditSpec { dims: self.dims.iter().chain(&other.dims).copied().collect() }
    }
}

/// A small dense complex matrix acting on one site, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl SiteMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch { expected: rows * cols, got: data.len() });
        }
        Ok(SiteMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        SiteMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d, d);
        for i in 0..d {
            m.data[i * d + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn adjoint(&self) -> SiteMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    pub fn matmul(&self, other: &SiteMatrix) -> SiteMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.get(k, c);
                }
            }
        }
        out
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_diff(&self, other: &SiteMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &SiteMatrix) -> SiteMatrix {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        SiteMatrix { rows: self.rows, cols: self.cols, data }
    }
}

/// A normalized pure state on a register.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    spec: QuditSpec,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Wraps amplitudes that must already have unit norm.
    pub fn new(spec: QuditSpec, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != spec.total() {
            return Err(Error::LengthMismatch { expected: spec.total(), got: amplitudes.len() });
        }
        let n2 = norm_sqr(&amplitudes);
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(PureState { spec, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(spec: QuditSpec, mut amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != spec.total() {
            return Err(Error::LengthMismatch { expected: spec.total(), got: amplitudes.len() });
        }
        let n2 = norm_sqr(&amplitudes);
        if n2 <= 0.0 || !n2.is_finite() {
            return Err(Error::NotNormalized(n2));
        }
        let s = 1.0 / n2.sqrt();
        amplitudes.iter_mut().for_each(|a| *a *= s);
        Ok(PureState { spec, amplitudes })
    }

    pub(crate) fn from_parts(spec: QuditSpec, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), spec.total());
        PureState { spec, amplitudes }
    }

    /// Computational basis ket `|digits>`.
    pub fn basis(spec: QuditSpec, digits: &[usize]) -> Result<Self> {
        if digits.len() != spec.num_sites() {
            return Err(Error::LengthMismatch { expected: spec.num_sites(), got: digits.len() });
        }
        let mut idx = 0;
        for (&x, &d) in digits.iter().zip(spec.dims()) {
            if x >= d {
                return Err(Error::DimensionMismatch(format!("digit {x} on a site of dimension {d}")));
            }
            idx = idx * d + x;
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); spec.total()];
        amplitudes[idx] = C64::new(1.0, 0.0);
        Ok(PureState { spec, amplitudes })
    }

    /// Haar-random state from complex Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(spec: QuditSpec, rng: &mut R) -> Self {
        let amps =
            (0..spec.total()).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        Self::normalized(spec, amps).expect("gaussian vector is nonzero")
    }

    pub fn spec(&self) -> &QuditSpec {
        &self.spec
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.spec != other.spec {
            return Err(Error::DimensionMismatch("inner product across different registers".into()));
        }
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    /// Applies a `d' x d` matrix to `site`, changing its dimension to `d'`.
    /// The result is generally not normalized.
    pub fn apply_site(&self, site: usize, m: &SiteMatrix) -> Result<Vec<C64>> {
        self.spec.check_site(site)?;
        let (outer, d, inner) = self.spec.split(site);
        if m.cols != d {
            return Err(Error::DimensionMismatch(format!("operator of width {} on site of dimension {d}", m.cols)));
        }
        let out_d = m.rows;
        let mut out = vec![C64::new(0.0, 0.0); outer * out_d * inner];
        for o in 0..outer {
            let src = &self.amplitudes[o * d * inner..(o + 1) * d * inner];
            let dst = &mut out[o * out_d * inner..(o + 1) * out_d * inner];
            for r in 0..out_d {
                for c in 0..d {
                    let a = m.get(r, c);
                    if a == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let (s, t) = (&src[c * inner..(c + 1) * inner], &mut dst[r * inner..(r + 1) * inner]);
                    t.iter_mut().zip(s).for_each(|(t, s)| *t += a * s);
                }
            }
        }
        Ok(out)
    }

    /// Applies a site operator and wraps the result with the updated spec,
    /// renormalizing it.
    pub fn map_site(&self, site: usize, m: &SiteMatrix) -> Result<PureState> {
        let amps = self.apply_site(site, m)?;
        PureState::normalized(self.spec.with_site(site, m.rows), amps)
    }

    /// Whether the two states agree up to a global phase.
    pub fn same_ray(&self, other: &PureState, tol: f64) -> bool {
        self.inner(other).map(|z| z.norm() >= 1.0 - tol).unwrap_or(false)
    }
}

pub(crate) fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(C64::norm_sqr).sum()
}

pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &PureState, b: &PureState) -> PureState {
    let mut amps = Vec::with_capacity(a.amplitudes.len() * b.amplitudes.len());
    for x in &a.amplitudes {
        amps.extend(b.amplitudes.iter().map(|y| x * y));
    }
    PureState { spec: a.spec.concat(&b.spec), amplitudes: amps }
}

/// A density operator stored as a convex mixture of pure states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    spec: QuditSpec,
    components: Vec<(f64, PureState)>,
}

impl Ensemble {
    pub fn new(components: Vec<(f64, PureState)>) -> Result<Self> {
        let spec = components
            .first()
            .map(|(_, s)| s.spec.clone())
            .ok_or_else(|| Error::Parameter("ensemble needs at least one component".into()))?;
        if components.iter().any(|(_, s)| s.spec != spec) {
            return Err(Error::DimensionMismatch("ensemble components on different registers".into()));
        }
        if components.iter().any(|(w, _)| !(*w > 0.0)) {
            return Err(Error::Parameter("ensemble weights must be positive".into()));
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(total));
        }
        Ok(Ensemble { spec, components })
    }

    pub fn pure(state: PureState) -> Self {
        Ensemble { spec: state.spec.clone(), components: vec![(1.0, state)] }
    }

    /// The maximally mixed state on `spec`, as a uniform mixture of basis kets.
    pub fn maximally_mixed(spec: QuditSpec) -> Self {
        let total = spec.total();
        let w = 1.0 / total as f64;
        let components = (0..total)
            .map(|k| {
                let mut amps = vec![C64::new(0.0, 0.0); total];
                amps[k] = C64::new(1.0, 0.0);
                (w, PureState::from_parts(spec.clone(), amps))
            })
            .collect();
        Ensemble { spec, components }
    }

    /// Builds an ensemble from unnormalized weighted vectors. Vectors of zero
    /// norm or weight below [`DROP_WEIGHT`] are dropped and the remaining
    /// weights are rescaled to sum to one.
    pub(crate) fn from_weighted_vectors(spec: QuditSpec, parts: Vec<(f64, Vec<C64>)>) -> Result<Self> {
        let mut components = Vec::with_capacity(parts.len());
        for (w, v) in parts {
            let n2 = norm_sqr(&v);
            let weight = w * n2;
            if weight < DROP_WEIGHT {
                continue;
            }
            let s = 1.0 / n2.sqrt();
            let amps = v.into_iter().map(|a| a * s).collect();
            components.push((weight, PureState::from_parts(spec.clone(), amps)));
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if components.is_empty() || total <= 0.0 {
            return Err(Error::ZeroProbability);
        }
        components.iter_mut().for_each(|(w, _)| *w /= total);
        Ok(Ensemble { spec, components })
    }

    pub fn spec(&self) -> &QuditSpec {
        &self.spec
    }

    pub fn components(&self) -> &[(f64, PureState)] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Sum of weights; one for every valid ensemble.
    pub fn trace(&self) -> f64 {
        self.components.iter().map(|(w, _)| w).sum()
    }

    /// Mixes ensembles with the given probabilities.
    pub fn mix(parts: Vec<(f64, Ensemble)>) -> Result<Self> {
        let components = parts
            .into_iter()
            .flat_map(|(p, e)| e.components.into_iter().map(move |(w, s)| (p * w, s)))
            .filter(|(w, _)| *w > 0.0)
            .collect();
        Ensemble::new(components)
    }

    /// Applies the same site operator to every component and renormalizes
    /// the result. Weights scale with the squared norm of each image.
    pub fn map_site(&self, site: usize, m: &SiteMatrix) -> Result<Ensemble> {
        self.spec.check_site(site)?;
        let parts =
            self.components.iter().map(|(w, s)| Ok((*w, s.apply_site(site, m)?))).collect::<Result<Vec<_>>>()?;
        Ensemble::from_weighted_vectors(self.spec.with_site(site, m.rows), parts)
    }

    /// Applies an arbitrary linear map to every component vector.
    pub fn map_vectors<F>(&self, spec: QuditSpec, mut f: F) -> Result<Ensemble>
    where
        F: FnMut(&PureState) -> Result<Vec<C64>>,
    {
        let parts = self.components.iter().map(|(w, s)| Ok((*w, f(s)?))).collect::<Result<Vec<_>>>()?;
        Ensemble::from_weighted_vectors(spec, parts)
    }
}

/// `<target| rho |target>`.
pub fn fidelity(target: &PureState, rho: &Ensemble) -> Result<f64> {
    if target.spec != rho.spec {
        return Err(Error::DimensionMismatch("fidelity across different registers".into()));
    }
    let f: f64 = rho.components.iter().map(|(w, s)| w * inner(&target.amplitudes, &s.amplitudes).norm_sqr()).sum();
    Ok(f.clamp(0.0, 1.0))
}

/// `tr(rho sigma)`.
pub fn overlap(rho: &Ensemble, sigma: &Ensemble) -> Result<f64> {
    if rho.spec != sigma.spec {
        return Err(Error::DimensionMismatch("overlap across different registers".into()));
    }
    let mut acc = 0.0;
    for (w, a) in &rho.components {
        for (v, b) in &sigma.components {
            acc += w * v * inner(&a.amplitudes, &b.amplitudes).norm_sqr();
        }
    }
    Ok(acc)
}

/// Squared Hilbert-Schmidt distance `||rho - sigma||_2^2`.
pub fn hs_distance_sq(rho: &Ensemble, sigma: &Ensemble) -> Result<f64> {
    let d = overlap(rho, rho)? + overlap(sigma, sigma)? - 2.0 * overlap(rho, sigma)?;
    Ok(d.max(0.0))
}
