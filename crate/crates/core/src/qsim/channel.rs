use super::{tensor, Ensemble, PureState, QuditSpec, C64};
use crate::error::{Error, Result};
use crate::seqcore::IndexSet;

/// Traces out one site of a pure state, returning the conditional
/// (unnormalized) vectors, one per basis value of the traced site.
fn trace_site(state: &PureState, site: usize) -> Vec<Vec<C64>> {
    let (outer, d, inner) = state.spec().split(site);
    let amps = state.amplitudes();
    (0..d)
        .map(|a| {
            let mut v = Vec::with_capacity(outer * inner);
            for o in 0..outer {
                let start = o * d * inner + a * inner;
                v.extend_from_slice(&amps[start..start + inner]);
            }
            v
        })
        .collect()
}

/// Partial trace over the sites in `j`.
///
/// Every pure component splits into conditional states over the traced
/// basis, weighted by their probabilities.
pub fn delete_qudits(rho: &Ensemble, j: &IndexSet) -> Result<Ensemble> {
    let n = rho.spec().num_sites();
    if j.bound() != n {
        return Err(Error::BoundMismatch { expected: n, got: j.bound() });
    }
    if j.len() == n {
        return Err(Error::EmptySystem);
    }
    let mut current = rho.clone();
    // highest site first so lower indices stay put
    for &site in j.indices().iter().rev() {
        let spec = current.spec().without_site(site).ok_or(Error::EmptySystem)?;
        let mut parts = Vec::new();
        for (w, s) in current.components() {
            parts.extend(trace_site(s, site).into_iter().map(|v| (*w, v)));
        }
        current = Ensemble::from_weighted_vectors(spec, parts)?;
    }
    Ok(current)
}

fn check_permutation(tau: &[usize]) -> Result<()> {
    let mut seen = vec![false; tau.len()];
    for &t in tau {
        if t == 0 || t > tau.len() || seen[t - 1] {
            return Err(Error::NotAPermutation(tau.to_vec()));
        }
        seen[t - 1] = true;
    }
    Ok(())
}

fn permute_state(state: &PureState, tau: &[usize]) -> PureState {
    let old_dims = state.spec().dims();
    let n = old_dims.len();
    let new_dims: Vec<usize> = tau.iter().map(|&s| old_dims[s - 1]).collect();
    let mut new_strides = vec![1usize; n];
    for p in (0..n.saturating_sub(1)).rev() {
        new_strides[p] = new_strides[p + 1] * new_dims[p + 1];
    }
    // stride in the new layout of each old site
    let mut stride_of_old = vec![0usize; n];
    for (p, &s) in tau.iter().enumerate() {
        stride_of_old[s - 1] = new_strides[p];
    }
    let amps = state.amplitudes();
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    let mut digits = vec![0usize; n];
    let mut target = 0usize;
    for a in amps {
        out[target] = *a;
        // odometer over old digits, last site fastest
        for s in (0..n).rev() {
            digits[s] += 1;
            target += stride_of_old[s];
            if digits[s] < old_dims[s] {
                break;
            }
            target -= stride_of_old[s] * digits[s];
            digits[s] = 0;
        }
    }
    let spec = QuditSpec::new(new_dims).expect("permuted dims stay valid");
    PureState::from_parts(spec, out)
}

/// Relabels sites: site `p` of the result holds site `tau[p - 1]` of the
/// input (1-based), i.e. `|x_1 ... x_n> -> |x_tau(1) ... x_tau(n)>`.
pub fn index_permute(rho: &Ensemble, tau: &[usize]) -> Result<Ensemble> {
    if tau.len() != rho.spec().num_sites() {
        return Err(Error::NotAPermutation(tau.to_vec()));
    }
    check_permutation(tau)?;
    let components: Vec<(f64, PureState)> = rho.components().iter().map(|(w, s)| (*w, permute_state(s, tau))).collect();
    Ensemble::new(components)
}

/// The relabelling that moves the first `|j|` sites of `sigma ⊗ rho` onto
/// positions `j` and keeps the remaining sites in order, in the convention
/// of [`index_permute`].
pub fn insertion_permutation(j: &IndexSet) -> Vec<usize> {
    let total = j.bound();
    let t = j.len();
    let mut tau = vec![0usize; total];
    for (i, &pos) in j.indices().iter().enumerate() {
        tau[pos - 1] = i + 1;
    }
    let mut next = t + 1;
    for slot in tau.iter_mut().filter(|s| **s == 0) {
        *slot = next;
        next += 1;
    }
    tau
}

/// Inserts the sites of `sigma` at positions `j` of `rho`.
///
/// Each component pair `(sigma_b, rho_a)` contributes the relabelled
/// product with weight `w_a * w_b`, so tracing out `j` returns `rho`.
pub fn insert_qudits(rho: &Ensemble, j: &IndexSet, sigma: &Ensemble) -> Result<Ensemble> {
    let t = sigma.spec().num_sites();
    if j.len() != t {
        return Err(Error::DimensionMismatch(format!("{} insertion indices for {t} inserted sites", j.len())));
    }
    let total = rho.spec().num_sites() + t;
    if j.bound() != total {
        return Err(Error::BoundMismatch { expected: total, got: j.bound() });
    }
    let tau = insertion_permutation(j);
    let mut components = Vec::with_capacity(rho.len() * sigma.len());
    for (wa, a) in rho.components() {
        for (wb, b) in sigma.components() {
            components.push((wa * wb, permute_state(&tensor(b, a), &tau)));
        }
    }
    Ensemble::new(components)
}
