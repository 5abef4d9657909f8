use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qinsdel::decoder::{apply_insdel, decode, decode_branches, ChannelSpec};
use qinsdel::harness::CodeConfig;
use qinsdel::mhcode::{self, MHCode};
use qinsdel::qsim::{self, Ensemble, PureState, QuditSpec};
use qinsdel::seqcore::{delete, insert, IndexSet, Sequence};

fn code() -> MHCode {
    CodeConfig::default().build().unwrap()
}

fn sigma(kind: u8, seed: u64) -> Ensemble {
    let spec = QuditSpec::uniform(1, 6).unwrap();
    match kind % 3 {
        0 => Ensemble::pure(PureState::basis(spec, &[(seed % 6) as usize]).unwrap()),
        1 => Ensemble::pure(PureState::random(spec, &mut ChaCha8Rng::seed_from_u64(seed))),
        _ => Ensemble::maximally_mixed(spec),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_branch_recovers_the_message(seed in any::<u64>(), j2 in 1usize..=6, j1 in 1usize..=6, kind in 0u8..3) {
        let code = code();
        let mu = PureState::random(code.base().logical_spec(), &mut ChaCha8Rng::seed_from_u64(seed));
        let psi = mhcode::mh_encode(&code, &mu).unwrap();
        let rx = apply_insdel(&Ensemble::pure(psi), &ChannelSpec::new(j2, sigma(kind, seed), j1).unwrap()).unwrap();
        prop_assert!((rx.trace() - 1.0).abs() < 1e-9);
        let branches = decode_branches(&code, &rx).unwrap();
        let mass: f64 = branches.iter().map(|b| b.probability).sum();
        prop_assert!((mass - 1.0).abs() < 1e-9);
        for b in &branches {
            prop_assert!(qsim::fidelity(&mu, &b.message).unwrap() >= 1.0 - 1e-9);
        }
        let (sampled, _) = decode(&code, &rx, seed).unwrap();
        prop_assert!(qsim::fidelity(&mu, &sampled).unwrap() >= 1.0 - 1e-9);
    }

    #[test]
    fn insertion_undone_by_deletion(q in 2u32..5, xs in proptest::collection::vec(0u32..5, 0..8), at in 0usize..9, s in 0u32..5) {
        let x = Sequence::new(q, xs.iter().map(|v| v % q).collect()).unwrap();
        let j = IndexSet::new(x.len() + 1, [at % (x.len() + 1) + 1]).unwrap();
        let y = insert(&x, &j, &Sequence::new(q, vec![s % q]).unwrap()).unwrap();
        prop_assert_eq!(delete(&y, &j).unwrap(), x);
    }
}
