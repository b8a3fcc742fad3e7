//! Turning strategy profiles into final states and payoffs, and extracting
//! the induced normal-form game of a scheme.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{unflatten, NormalFormGame};
use crate::scheme::{PlayerStrategy, SchemeSpec, StrategySet};
use crate::state::{BasisLabel, SparseState};

/// Default cap on the number of pure profiles enumerated by [`induced_game`].
pub const DEFAULT_PROFILE_BUDGET: u128 = 10_000_000;

/// Tolerance on the total mass of a mixed strategy.
pub const DISTRIBUTION_TOLERANCE: f64 = 1e-12;

/// One strategy per player, player 1 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PureProfile(pub Vec<PlayerStrategy>);

/// Independent distributions over each player's pure strategies, indexed in
/// canonical strategy order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedProfile {
    pub distributions: Vec<Vec<f64>>,
}

impl MixedProfile {
    pub fn new(distributions: Vec<Vec<f64>>) -> Self {
        Self { distributions }
    }

    /// All mass on one pure profile.
    pub fn point(counts: &[usize], profile: &[usize]) -> Self {
        Self {
            distributions: counts
                .iter()
                .zip(profile)
                .map(|(&c, &s)| {
                    let mut d = vec![0.0; c];
                    d[s] = 1.0;
                    d
                })
                .collect(),
        }
    }

    pub fn uniform(counts: &[usize]) -> Self {
        Self {
            distributions: counts.iter().map(|&c| vec![1.0 / c as f64; c]).collect(),
        }
    }

    /// Checks shape and that every distribution is a probability vector.
    pub fn check(&self, counts: &[usize]) -> Result<()> {
        if self.distributions.len() != counts.len() {
            return Err(Error::InvalidProfile(format!(
                "{} distributions for {} players",
                self.distributions.len(),
                counts.len()
            )));
        }
        for (p, (d, &c)) in self.distributions.iter().zip(counts).enumerate() {
            if d.len() != c {
                return Err(Error::InvalidProfile(format!(
                    "player {} distribution has {} entries, expected {c}",
                    p + 1,
                    d.len()
                )));
            }
            if d.iter().any(|&x| !x.is_finite() || x < 0.0) {
                return Err(Error::InvalidProfile(format!(
                    "player {} distribution has a negative or non-finite weight",
                    p + 1
                )));
            }
            let total: f64 = d.iter().sum();
            if (total - 1.0).abs() > DISTRIBUTION_TOLERANCE {
                return Err(Error::InvalidProfile(format!(
                    "player {} distribution sums to {total}",
                    p + 1
                )));
            }
        }
        Ok(())
    }

    /// Pure profiles with positive weight, and their weights.
    pub fn support(&self) -> Vec<(Vec<usize>, f64)> {
        let mut out = vec![(Vec::with_capacity(self.distributions.len()), 1.0)];
        for d in &self.distributions {
            let mut next = Vec::with_capacity(out.len() * d.len());
            for (prefix, w) in &out {
                for (s, &p) in d.iter().enumerate() {
                    if p > 0.0 {
                        let mut v = prefix.clone();
                        v.push(s);
                        next.push((v, w * p));
                    }
                }
            }
            out = next;
        }
        out
    }
}

/// Final state `|control><control| ⊗ |op><op|`.
#[derive(Debug, Clone, PartialEq)]
pub struct FinalState {
    pub control_label: BasisLabel,
    pub operation_state: SparseState,
}

/// Initial state selected by a control label: the matching branch state,
/// else the default.
pub fn resolve_branch<'a>(spec: &'a SchemeSpec, control: &BasisLabel) -> &'a SparseState {
    spec.branches
        .iter()
        .find(|b| &b.pattern == control)
        .map_or(&spec.default_state, |b| &b.state)
}

/// Shared precomputation for repeated evaluation of one scheme.
pub struct Evaluator<'a> {
    spec: &'a SchemeSpec,
    strategies: StrategySet,
    branch_index: HashMap<BasisLabel, usize>,
}

impl<'a> Evaluator<'a> {
    pub fn new(spec: &'a SchemeSpec) -> Self {
        let branch_index = spec
            .branches
            .iter()
            .enumerate()
            .map(|(i, b)| (b.pattern.clone(), i))
            .collect();
        Self {
            spec,
            strategies: spec.strategies(),
            branch_index,
        }
    }

    pub fn spec(&self) -> &SchemeSpec {
        self.spec
    }

    pub fn strategies(&self) -> &StrategySet {
        &self.strategies
    }

    fn initial(&self, control: &BasisLabel) -> &SparseState {
        self.branch_index
            .get(control)
            .map_or(&self.spec.default_state, |&i| &self.spec.branches[i].state)
    }

    /// Resolves strategy indices into a profile.
    pub fn profile(&self, indices: &[usize]) -> PureProfile {
        PureProfile(
            self.strategies
                .players
                .iter()
                .zip(indices)
                .map(|(ps, &i)| ps.strategy(i))
                .collect(),
        )
    }

    /// Strategy indices of a profile, validating it against the scheme.
    pub fn indices(&self, profile: &PureProfile) -> Result<Vec<usize>> {
        if profile.0.len() != self.strategies.players.len() {
            return Err(Error::InvalidProfile(format!(
                "{} strategies for {} players",
                profile.0.len(),
                self.strategies.players.len()
            )));
        }
        profile
            .0
            .iter()
            .zip(&self.strategies.players)
            .map(|(s, ps)| ps.index_of(s))
            .collect()
    }

    pub fn play(&self, profile: &PureProfile) -> Result<FinalState> {
        self.indices(profile)?;
        Ok(self.play_unchecked(profile))
    }

    fn play_unchecked(&self, profile: &PureProfile) -> FinalState {
        let control_label = BasisLabel(profile.0.iter().map(|s| s.projector).collect());
        let layout = &self.spec.operation_layout;
        let mut shifts = vec![0; layout.len()];
        for (strategy, ps) in profile.0.iter().zip(&self.strategies.players) {
            for (op, &slot) in strategy.operators.iter().zip(&ps.owned_slots) {
                shifts[slot] = op.amount(layout.radix(slot));
            }
        }
        let operation_state = self.initial(&control_label).shifted(&shifts);
        FinalState {
            control_label,
            operation_state,
        }
    }

    /// Expected payoff of every player in a final state. Weights are divided
    /// by the squared norm so that amplitudes like `1/sqrt(2)` yield exact
    /// halves.
    pub fn measure(&self, state: &FinalState) -> Result<Vec<f64>> {
        let layout = &self.spec.operation_layout;
        let norm = state.operation_state.norm_sqr();
        let mut out = vec![0.0; self.spec.players];
        for (label, amp) in state.operation_state.amplitudes() {
            let w = amp.norm_sqr() / norm;
            let idx = layout.index_of(label);
            for (p, acc) in out.iter_mut().enumerate() {
                let v = self.spec.payoffs[p].get(idx).ok_or_else(|| {
                    Error::InvalidScheme(format!("player {} has no payoff for |{label}>", p + 1))
                })?;
                *acc += w * v;
            }
        }
        Ok(out)
    }

    pub fn payoff(&self, profile: &PureProfile) -> Result<Vec<f64>> {
        let fin = self.play(profile)?;
        self.measure(&fin)
    }

    /// Payoffs at a profile given by strategy indices.
    pub fn payoff_indices(&self, indices: &[usize]) -> Result<Vec<f64>> {
        let fin = self.play_unchecked(&self.profile(indices));
        self.measure(&fin)
    }

    pub fn payoff_mixed(&self, mixed: &MixedProfile) -> Result<Vec<f64>> {
        mixed.check(&self.strategies.counts())?;
        let mut out = vec![0.0; self.spec.players];
        for (profile, w) in mixed.support() {
            let u = self.payoff_indices(&profile)?;
            for (acc, v) in out.iter_mut().zip(u) {
                *acc += w * v;
            }
        }
        Ok(out)
    }

    /// Payoffs of a player's every pure strategy against the others fixed at
    /// `profile`. `player` is 1-based.
    pub fn deviation_payoffs(&self, profile: &[usize], player: usize) -> Result<Vec<f64>> {
        let count = self.strategies.players[player - 1].count();
        let mut p = profile.to_vec();
        (0..count)
            .map(|s| {
                p[player - 1] = s;
                Ok(self.payoff_indices(&p)?[player - 1])
            })
            .collect()
    }
}

pub fn play_pure(spec: &SchemeSpec, profile: &PureProfile) -> Result<FinalState> {
    Evaluator::new(spec).play(profile)
}

/// `tr(ρ_f M_i)` for every player.
pub fn payoff_pure(spec: &SchemeSpec, profile: &PureProfile) -> Result<Vec<f64>> {
    Evaluator::new(spec).payoff(profile)
}

/// Expected payoffs under independent mixed strategies, by exact enumeration
/// of the supports.
pub fn payoff_mixed(spec: &SchemeSpec, mixed: &MixedProfile) -> Result<Vec<f64>> {
    Evaluator::new(spec).payoff_mixed(mixed)
}

pub fn induced_game(spec: &SchemeSpec) -> Result<NormalFormGame> {
    induced_game_with_budget(spec, DEFAULT_PROFILE_BUDGET)
}

/// The normal-form game generated by the scheme, strategies in canonical order.
pub fn induced_game_with_budget(spec: &SchemeSpec, budget: u128) -> Result<NormalFormGame> {
    let eval = Evaluator::new(spec);
    let strategies = eval.strategies();
    let required = strategies.profile_count().unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let counts = strategies.counts();
    let labels = strategies
        .players
        .iter()
        .map(|ps| (0..ps.count()).map(|i| ps.label(i)).collect())
        .collect();
    let rows: Vec<Vec<f64>> = (0..required as usize)
        .into_par_iter()
        .map(|i| eval.payoff_indices(&unflatten(&counts, i)))
        .collect::<Result<_>>()?;
    let payoffs = (0..spec.players)
        .map(|p| rows.iter().map(|r| r[p]).collect())
        .collect();
    NormalFormGame::with_labels(counts, labels, payoffs)
}

/// Whether every profile that misses all branch patterns pays exactly the
/// classical table entry picked by the operator assignment.
pub fn classical_embedding_check(spec: &SchemeSpec) -> bool {
    let eval = Evaluator::new(spec);
    let layout = &spec.operation_layout;
    let strategies = eval.strategies();
    let counts = strategies.counts();
    let total: usize = counts.iter().product();
    for indices in (0..total).map(|i| unflatten(&counts, i)) {
        let profile = eval.profile(&indices);
        let control = BasisLabel(profile.0.iter().map(|s| s.projector).collect());
        if spec.branches.iter().any(|b| b.pattern == control) {
            continue;
        }
        let mut digits = vec![0; layout.len()];
        for (s, ps) in profile.0.iter().zip(&strategies.players) {
            for (op, &slot) in s.operators.iter().zip(&ps.owned_slots) {
                digits[slot] = op.amount(layout.radix(slot));
            }
        }
        let idx = layout.index_of(&BasisLabel(digits));
        let Ok(got) = eval.payoff(&profile) else {
            return false;
        };
        for (p, g) in got.iter().enumerate() {
            match spec.payoffs[p].get(idx) {
                Some(v) if v == *g => {}
                _ => return false,
            }
        }
    }
    true
}
