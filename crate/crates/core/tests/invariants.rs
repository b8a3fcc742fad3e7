use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use proptest::prelude::*;

use mwscheme::builtins::make_pd3_scheme;
use mwscheme::eval::{classical_embedding_check, payoff_mixed, play_pure};
use mwscheme::extensive::{make_centipede, outcome, TreeStrategy};
use mwscheme::io::{scheme_from_json, scheme_to_json};
use mwscheme::scheme::make_bimatrix;
use mwscheme::{induced_game, BasisLabel, Evaluator, MixedProfile, RegisterLayout, SchemeSpec, SparseState};

// Payoffs in quarters keep every expectation exact.
fn quarter() -> impl Strategy<Value = f64> {
    (-20i32..=20).prop_map(|q| q as f64 / 4.0)
}

fn bimatrix_scheme() -> impl Strategy<Value = SchemeSpec> {
    (2usize..=3, 2usize..=3)
        .prop_flat_map(|(r, c)| {
            (
                Just((r, c)),
                prop::collection::vec((quarter(), quarter()), r * c),
                prop::collection::vec((-8i32..=8, -8i32..=8), r * c),
            )
        })
        .prop_filter_map("zero state", |((r, c), cells, amps)| {
            let matrix: Vec<Vec<(f64, f64)>> = cells.chunks(c).map(|row| row.to_vec()).collect();
            let norm: f64 = amps.iter().map(|&(a, b)| (a * a + b * b) as f64).sum::<f64>().sqrt();
            if norm == 0.0 {
                return None;
            }
            let layout = RegisterLayout::new(vec![r, c]).ok()?;
            let terms: Vec<(BasisLabel, Complex64)> = amps
                .iter()
                .enumerate()
                .filter(|(_, &(a, b))| a != 0 || b != 0)
                .map(|(i, &(a, b))| (layout.label_at(i), Complex64::new(a as f64 / norm, b as f64 / norm)))
                .collect();
            let psi = SparseState::new(layout, terms).ok()?;
            make_bimatrix(&matrix, psi).ok()
        })
}

fn distribution(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0u32..=8, len).prop_filter_map("all zero", |w| {
        let total: u32 = w.iter().sum();
        (total > 0).then(|| w.iter().map(|&x| x as f64 / total as f64).collect())
    })
}

// A scheme, two distributions for player 1 and one for player 2.
fn mixed_case() -> impl Strategy<Value = (SchemeSpec, Vec<f64>, Vec<f64>, Vec<f64>)> {
    bimatrix_scheme().prop_flat_map(|spec| {
        let counts = Evaluator::new(&spec).strategies().counts();
        (Just(spec), distribution(counts[0]), distribution(counts[0]), distribution(counts[1]))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn final_states_have_unit_norm(spec in bimatrix_scheme(), seed in any::<u64>()) {
        let eval = Evaluator::new(&spec);
        let counts = eval.strategies().counts();
        let indices: Vec<usize> = counts
            .iter()
            .enumerate()
            .map(|(p, &c)| (seed >> (16 * p)) as usize % c)
            .collect();
        let state = play_pure(&spec, &eval.profile(&indices)).unwrap();
        prop_assert!(state.operation_state.norm_deviation() < 1e-12);
    }

    #[test]
    fn constructors_embed_the_classical_game(spec in bimatrix_scheme()) {
        prop_assert!(classical_embedding_check(&spec));
    }

    #[test]
    fn mixed_payoff_is_affine_in_each_player((spec, a, b, other) in mixed_case(), t in 0u32..=4) {
        let t = t as f64 / 4.0;
        let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (1.0 - t) * x + t * y).collect();
        let at = |d: &Vec<f64>| payoff_mixed(&spec, &MixedProfile::new(vec![d.clone(), other.clone()])).unwrap();
        let (ua, ub, um) = (at(&a), at(&b), at(&mid));
        for p in 0..2 {
            prop_assert!((um[p] - ((1.0 - t) * ua[p] + t * ub[p])).abs() < 1e-9);
        }
    }

    #[test]
    fn json_round_trip_preserves_the_induced_game(spec in bimatrix_scheme()) {
        let back = scheme_from_json(&scheme_to_json(&spec)).unwrap();
        prop_assert_eq!(induced_game(&back).unwrap().payoffs, induced_game(&spec).unwrap().payoffs);
    }

    #[test]
    fn off_path_choices_do_not_change_the_outcome(a in 0usize..16, b in 0usize..16) {
        let tree = make_centipede(4).unwrap();
        let nodes = tree.decision_nodes();
        // bit i is the action index at stage i + 1
        let build = |bits: usize| {
            let mut choices = vec![BTreeMap::new(); 2];
            for (i, &n) in nodes.iter().enumerate() {
                choices[tree.owner(n).unwrap() - 1].insert(n, (bits >> i) & 1);
            }
            TreeStrategy { choices }
        };
        // keep `a` up to its first stop; every later stage is off path
        let stop = (0..4).find(|i| (a >> i) & 1 == 0).unwrap_or(3);
        let keep = (1usize << (stop + 1)) - 1;
        let mixed_bits = (a & keep) | (b & !keep);
        prop_assert_eq!(outcome(&tree, &build(a)).unwrap(), outcome(&tree, &build(mixed_bits)).unwrap());
    }
}

// Control patterns outside the branch table all meet the classical state,
// so profiles differing only there pay the same.
#[test]
fn unmatched_control_patterns_share_payoffs() {
    let spec = make_pd3_scheme().unwrap();
    let eval = Evaluator::new(&spec);
    let mut distinct = BTreeSet::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let projectors = [a / 2, b / 2, c / 2];
                let flips = [a % 2, b % 2, c % 2];
                let u = eval.payoff_indices(&[a, b, c]).unwrap();
                if projectors != [1, 1, 1] {
                    let classical = eval.payoff_indices(&[flips[0], flips[1], flips[2]]).unwrap();
                    assert_eq!(u, classical);
                }
                distinct.insert((projectors == [1, 1, 1], flips));
            }
        }
    }
    // eight classical cells plus eight on the joint state
    assert_eq!(distinct.len(), 16);
}
