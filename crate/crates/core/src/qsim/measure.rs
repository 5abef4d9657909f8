use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Ensemble, SiteMatrix, C64};
use crate::error::{Error, Result};

/// Branches with probability at or below this are discarded.
pub const BRANCH_THRESHOLD: f64 = 1e-12;

const PROJECTOR_TOL: f64 = 1e-10;

/// A projective measurement on a single site.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementFamily {
    dim: usize,
    projectors: Vec<SiteMatrix>,
}

impl MeasurementFamily {
    /// Checks that every operator is an orthogonal projector and that they
    /// resolve the identity.
    pub fn new(dim: usize, projectors: Vec<SiteMatrix>) -> Result<Self> {
        if projectors.is_empty() {
            return Err(Error::Parameter("measurement needs at least one projector".into()));
        }
        let mut sum = SiteMatrix::zeros(dim, dim);
        for (k, m) in projectors.iter().enumerate() {
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::DimensionMismatch(format!("projector {k} is not {dim}x{dim}")));
            }
            if m.matmul(m).max_diff(m) > PROJECTOR_TOL || m.adjoint().max_diff(m) > PROJECTOR_TOL {
                return Err(Error::Parameter(format!("operator {k} is not an orthogonal projector")));
            }
            sum = sum.add(m);
        }
        if sum.max_diff(&SiteMatrix::identity(dim)) > PROJECTOR_TOL {
            return Err(Error::Parameter("projectors do not sum to the identity".into()));
        }
        Ok(MeasurementFamily { dim, projectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn projectors(&self) -> &[SiteMatrix] {
        &self.projectors
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }
}

fn diagonal_projector(dim: usize, support: impl IntoIterator<Item = usize>) -> SiteMatrix {
    let mut m = SiteMatrix::zeros(dim, dim);
    for i in support {
        m.set(i, i, C64::new(1.0, 0.0));
    }
    m
}

/// Residue-class measurement on a site of dimension `l (t + 1)`: outcome
/// `k` projects onto `span{|j (t + 1) + k> : 0 <= j < l}`.
pub fn mt_family(l: usize, t: usize) -> Result<MeasurementFamily> {
    if l < 2 || t < 1 {
        return Err(Error::Parameter(format!("residue measurement needs l >= 2, t >= 1 (got l={l}, t={t})")));
    }
    let period = t + 1;
    let dim = l * period;
    let projectors = (0..period).map(|k| diagonal_projector(dim, (0..l).map(|j| j * period + k))).collect();
    MeasurementFamily::new(dim, projectors)
}

/// Measurement in the computational basis of a `d`-level site.
pub fn computational_family(d: usize) -> Result<MeasurementFamily> {
    MeasurementFamily::new(d, (0..d).map(|k| diagonal_projector(d, [k])).collect())
}

/// One measurement branch.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub outcome: usize,
    pub probability: f64,
    pub post: Ensemble,
}

/// Every outcome with probability above [`BRANCH_THRESHOLD`], in outcome
/// order, together with its renormalized post-measurement ensemble.
pub fn measure_branches(rho: &Ensemble, site: usize, fam: &MeasurementFamily) -> Result<Vec<Outcome>> {
    rho.spec().check_site(site)?;
    if rho.spec().dim(site) != fam.dim {
        return Err(Error::DimensionMismatch(format!(
            "measurement of dimension {} on site of dimension {}",
            fam.dim,
            rho.spec().dim(site)
        )));
    }
    let mut out = Vec::new();
    for (k, m) in fam.projectors.iter().enumerate() {
        let mut parts = Vec::with_capacity(rho.len());
        let mut p = 0.0;
        for (w, s) in rho.components() {
            let v = s.apply_site(site, m)?;
            p += w * super::norm_sqr(&v);
            parts.push((*w, v));
        }
        if p > BRANCH_THRESHOLD {
            let post = Ensemble::from_weighted_vectors(rho.spec().clone(), parts)?;
            out.push(Outcome { outcome: k, probability: p, post });
        }
    }
    if out.is_empty() {
        return Err(Error::ZeroProbability);
    }
    Ok(out)
}

/// Samples one outcome by inverse CDF over the branch probabilities.
pub fn measure_site(rho: &Ensemble, site: usize, fam: &MeasurementFamily, seed: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_branch(measure_branches(rho, site, fam)?, &mut rng)
}

pub(crate) fn sample_branch<R: Rng + ?Sized>(mut branches: Vec<Outcome>, rng: &mut R) -> Result<Outcome> {
    let total: f64 = branches.iter().map(|b| b.probability).sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let last = branches.len() - 1;
    for (i, b) in branches.iter().enumerate() {
        acc += b.probability;
        if u < acc || i == last {
            return Ok(branches.swap_remove(i));
        }
    }
    unreachable!("branches are non-empty")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{PureState, QuditSpec};

    #[test]
    fn residue_family_structure() {
        let fam = mt_family(2, 2).unwrap();
        assert_eq!(fam.dim(), 6);
        assert_eq!(fam.len(), 3);
        let m1 = &fam.projectors()[1];
        for i in 0..6 {
            let expect = if i == 1 || i == 4 { 1.0 } else { 0.0 };
            assert_eq!(m1.get(i, i).re, expect);
        }
        for m in fam.projectors() {
            let rank: f64 = (0..6).map(|i| m.get(i, i).re).sum();
            assert_eq!(rank, 2.0);
        }
        assert!(mt_family(1, 2).is_err());
        assert!(mt_family(2, 0).is_err());
    }

    #[test]
    fn rejects_non_projectors() {
        let mut half = SiteMatrix::identity(2);
        half.set(0, 0, C64::new(0.5, 0.0));
        assert!(MeasurementFamily::new(2, vec![half]).is_err());
        let p0 = diagonal_projector(2, [0]);
        assert!(MeasurementFamily::new(2, vec![p0]).is_err());
    }

    #[test]
    fn plus_state_is_fair() {
        let spec = QuditSpec::uniform(1, 2).unwrap();
        let plus = PureState::normalized(spec, vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        let rho = Ensemble::pure(plus);
        let fam = computational_family(2).unwrap();
        let branches = measure_branches(&rho, 1, &fam).unwrap();
        assert_eq!(branches.len(), 2);
        for b in &branches {
            assert!((b.probability - 0.5).abs() < 1e-12);
            assert!((b.post.trace() - 1.0).abs() < 1e-12);
        }
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < 1e-9);
        let a = measure_site(&rho, 1, &fam, 42).unwrap();
        let b = measure_site(&rho, 1, &fam, 42).unwrap();
        assert_eq!(a, b);
        let seen: std::collections::BTreeSet<usize> =
            (0..64).map(|s| measure_site(&rho, 1, &fam, s).unwrap().outcome).collect();
        assert_eq!(seen.len(), 2);
    }

    #[test]
    fn dimension_checked() {
        let rho = Ensemble::pure(PureState::basis(QuditSpec::uniform(1, 3).unwrap(), &[0]).unwrap());
        assert!(measure_branches(&rho, 1, &computational_family(2).unwrap()).is_err());
        assert!(measure_branches(&rho, 2, &computational_family(3).unwrap()).is_err());
    }
}
