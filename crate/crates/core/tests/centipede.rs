use mwscheme::equilibrium::{pure_nash, CertifiedProfile};
use mwscheme::extensive::{
    backward_induction, centipede_payoff, make_centipede, make_centipede_scheme, normal_representation,
    verify_centipede_equilibrium,
};
use mwscheme::eval::DEFAULT_PROFILE_BUDGET;
use mwscheme::{induced_game, Evaluator, LocalOperator, DEFAULT_EPSILON};

// Payoffs of a classical run: the game stops at the first stage whose
// qubit reads 0 (action S), written out from the stage rule directly.
fn stop_rule(n: usize, digits: &[usize]) -> (f64, f64) {
    match digits.iter().position(|&d| d == 0) {
        None => ((n + 2) as f64, n as f64),
        Some(i) => {
            let stage = (i + 1) as f64;
            if i % 2 == 0 {
                (stage + 1.0, stage - 1.0)
            } else {
                (stage - 1.0, stage + 1.0)
            }
        }
    }
}

#[test]
fn stage_payoffs_match_the_stop_rule() {
    for n in [2, 4, 6, 8] {
        for stage in 1..=n + 1 {
            let mut digits = vec![1; n];
            if stage <= n {
                digits[stage - 1] = 0;
            }
            assert_eq!(centipede_payoff(n, stage), stop_rule(n, &digits), "n={n} stage={stage}");
        }
    }
}

#[test]
fn quantum_payoffs_follow_the_stop_rule_on_each_branch() {
    for n in [2, 4, 6] {
        let (spec, _) = make_centipede_scheme(n).unwrap();
        let eval = Evaluator::new(&spec);
        let counts = eval.strategies().counts();
        let alternating: Vec<usize> = (0..n).map(|i| usize::from(i % 2 == 0)).collect();
        let mut all_continue = alternating.clone();
        all_continue[n - 1] = 1;
        for a in 0..counts[0] {
            for b in 0..counts[1] {
                let profile = eval.profile(&[a, b]);
                let mut flips = vec![0; n];
                for (p, strategy) in profile.0.iter().enumerate() {
                    for (slot, op) in spec.owned_slots(p + 1).into_iter().zip(&strategy.operators) {
                        flips[slot] = match op {
                            LocalOperator::Identity => 0,
                            LocalOperator::Shift(k) => k % 2,
                        };
                    }
                }
                let starts = if profile.0.iter().all(|s| s.projector == 1) {
                    vec![alternating.clone(), all_continue.clone()]
                } else {
                    vec![vec![0; n]]
                };
                let weight = 1.0 / starts.len() as f64;
                let mut expected = [0.0, 0.0];
                for start in &starts {
                    let digits: Vec<usize> = start.iter().zip(&flips).map(|(s, f)| s ^ f).collect();
                    let (u1, u2) = stop_rule(n, &digits);
                    expected[0] += weight * u1;
                    expected[1] += weight * u2;
                }
                let got = eval.payoff_indices(&[a, b]).unwrap();
                assert_eq!(got, expected.to_vec(), "n={n} profile ({a}, {b})");
            }
        }
    }
}

#[test]
fn designated_profile_pays_n_plus_one_half() {
    for n in (2..=16).step_by(2) {
        let v = verify_centipede_equilibrium(n, DEFAULT_EPSILON).unwrap();
        let target = n as f64 + 0.5;
        assert_eq!(v.certificate.payoffs, vec![target, target], "n={n}");
        assert!(v.certificate.is_valid(), "n={n}: {:?}", v.certificate.slack);
        // on the classical branch player 1 can do no better than stopping
        // at stage n-1 against player 2's last-stage stop
        assert_eq!(v.player1_classical_cap, n as f64, "n={n}");
        assert!(target - v.player1_classical_cap >= 0.5);
    }
}

#[test]
fn odd_stage_counts_are_rejected() {
    for n in [0, 1, 3, 7] {
        assert!(make_centipede(n).is_err(), "n={n}");
        assert!(verify_centipede_equilibrium(n, DEFAULT_EPSILON).is_err(), "n={n}");
    }
}

#[test]
fn classical_branch_restriction_is_the_normal_representation() {
    for n in [2, 4, 6] {
        let (spec, _) = make_centipede_scheme(n).unwrap();
        let game = induced_game(&spec).unwrap();
        let eval = Evaluator::new(&spec);
        let keep: Vec<Vec<usize>> = eval
            .strategies()
            .players
            .iter()
            .map(|p| (0..p.count()).filter(|&i| p.strategy(i).projector == 0).collect())
            .collect();
        let restricted = game.restrict(&keep).unwrap();
        let classical = normal_representation(&make_centipede(n).unwrap(), DEFAULT_PROFILE_BUDGET).unwrap();
        assert_eq!(restricted.strategy_counts, classical.strategy_counts, "n={n}");
        assert_eq!(restricted.payoffs, classical.payoffs, "n={n}");
    }
}

#[test]
fn classical_centipede_equilibria_all_stop_at_once() {
    for n in [2, 4, 6] {
        let tree = make_centipede(n).unwrap();
        let (outcome, _) = backward_induction(&tree);
        assert_eq!(outcome, vec![2.0, 0.0]);
        let game = normal_representation(&tree, DEFAULT_PROFILE_BUDGET).unwrap();
        let eqs = pure_nash(&game, DEFAULT_EPSILON);
        assert!(!eqs.is_empty());
        for e in &eqs {
            assert_eq!(e.payoffs, vec![2.0, 0.0], "n={n}");
        }
    }
}

// Regression record of exhaustive enumeration: besides the (2, 0)
// equilibria the designated profile is the only pure equilibrium.
#[test]
fn quantum_pure_equilibria_by_enumeration() {
    for (n, total) in [(2, 2), (4, 9), (6, 33)] {
        let (spec, designated) = make_centipede_scheme(n).unwrap();
        let eval = Evaluator::new(&spec);
        let indices = eval.indices(&designated).unwrap();
        let eqs = pure_nash(&induced_game(&spec).unwrap(), DEFAULT_EPSILON);
        assert_eq!(eqs.len(), total, "n={n}");
        let other: Vec<_> = eqs.iter().filter(|e| e.payoffs != vec![2.0, 0.0]).collect();
        assert_eq!(other.len(), 1, "n={n}");
        assert_eq!(other[0].profile, CertifiedProfile::Pure(indices));
        assert_eq!(other[0].payoffs, vec![n as f64 + 0.5; 2]);
    }
}
