mod common;

use common::{all_profiles, random_dims, random_game};
use ipgkit::game::MixedProfile;
use ipgkit::limits::Limits;
use ipgkit::oracle::improve;
use ipgkit::sgm::{solve_sgm, SgmOutcome};
use ipgkit::verify::{enumerate_mixed_ne_2p, enumerate_pure_ne};
use ipgkit::zero_regrets::{solve_zero_regrets, JointForm, SelectionFunction, ZeroRegretsOutcome};
use ipgkit::{Rational, Scalar};
use proptest::prelude::*;

fn selections(seed: u64) -> Vec<SelectionFunction<Rational>> {
    let mut out = vec![
        SelectionFunction::Welfare,
        SelectionFunction::PlayerPayoff((seed % 2) as usize),
    ];
    if seed.is_multiple_of(3) {
        out.push(SelectionFunction::Explicit(JointForm::zero(&random_game(
            seed,
            &random_dims(seed, 12),
        ))));
    }
    out
}

fn close(a: &MixedProfile<Rational>, b: &MixedProfile<Rational>) -> bool {
    let (a, b) = (a.canonicalize(), b.canonicalize());
    a.supports().iter().zip(b.supports()).all(|(x, y)| {
        x.len() == y.len()
            && x.iter()
                .zip(y)
                .all(|((s, p), (t, q))| s == t && (p - q).is_negligible())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn zero_regrets_is_valid_sound_and_optimal(seed in any::<u64>()) {
        let g = random_game(seed, &random_dims(seed, 12));
        let equilibria = enumerate_pure_ne(&g).unwrap();
        for h in selections(seed) {
            let report = solve_zero_regrets(&g, &h, Limits::default(), false).unwrap();
            for cut in &report.cuts {
                for ne in &equilibria {
                    prop_assert!(cut.slack(ne) >= ipgkit::scalar::int(0));
                }
            }
            let form = h.form(&g).unwrap();
            match report.outcome {
                ZeroRegretsOutcome::OptimalPureNe { profile, h_value, .. } => {
                    let verdict = improve(&g, &profile).unwrap();
                    prop_assert!(verdict.is_yes());
                    prop_assert!(equilibria.contains(&profile));
                    let best = equilibria.iter().map(|p| form.eval(&p.points())).max().unwrap();
                    prop_assert_eq!(h_value, best);
                }
                ZeroRegretsOutcome::NoPureNe { .. } => prop_assert!(equilibria.is_empty()),
                other => prop_assert!(false, "limit reached: {:?}", other),
            }
        }
    }

    #[test]
    fn pure_enumeration_is_the_improve_fixpoint_set(seed in any::<u64>()) {
        let g = random_game(seed, &random_dims(seed, 10));
        let straight: Vec<_> = all_profiles(&g).into_iter().filter(|p| improve(&g, p).unwrap().is_yes()).collect();
        prop_assert_eq!(enumerate_pure_ne(&g).unwrap(), straight);
    }

    #[test]
    fn sgm_equilibria_are_certified_and_enumerated(seed in any::<u64>()) {
        let g = random_game(seed, &[1 + (seed % 3) as usize, 1 + (seed / 3 % 3) as usize]);
        let all = enumerate_mixed_ne_2p(&g).unwrap();
        prop_assert!(!all.is_empty());
        let run = solve_sgm(&g, Limits::default()).unwrap();
        let SgmOutcome::Equilibrium { profile, .. } = run.outcome else {
            return Err(TestCaseError::fail("no equilibrium"));
        };
        prop_assert!(improve(&g, &profile).unwrap().is_yes());
        prop_assert!(all.iter().any(|m| close(m, &profile)), "{:?} not among {:?}", profile, all);
        for (i, sample) in run.sample.samples.iter().enumerate() {
            for s in sample {
                prop_assert!(g.player(i).strategies.is_feasible(s).unwrap());
            }
        }
    }
}
