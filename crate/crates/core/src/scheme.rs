//! Scheme descriptions: register layout, the branch table standing in for
//! the positive operator, the ownership map and the diagonal payoff tables.
//!
//! The positive operator is never stored as a matrix. Sandwiching it between
//! projectors on the control register always selects exactly one branch, so
//! a scheme keeps a table of control patterns with their initial states and a
//! default state (`|0...0>`) for every other control label.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{basis_state, BasisLabel, LocalOperator, RegisterLayout, SparseState};

/// Norm deviation above which constructors reject a joint state.
pub const CONSTRUCTOR_NORM_TOLERANCE: f64 = 1e-9;

/// Norm deviation reported by [`SchemeSpec::validate`].
pub const STATE_NORM_TOLERANCE: f64 = 1e-12;

/// One entry of the branch table.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub pattern: BasisLabel,
    pub state: SparseState,
}

/// Per-player payoff table indexed by the row-major index of an operation
/// label. `None` marks a missing entry.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffTable {
    values: Vec<Option<f64>>,
}

impl PayoffTable {
    pub fn from_values(values: Vec<f64>) -> Self {
        Self {
            values: values.into_iter().map(Some).collect(),
        }
    }

    pub fn from_partial(values: Vec<Option<f64>>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<f64> {
        self.values.get(index).copied().flatten()
    }

    pub fn entries(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn set(&mut self, index: usize, value: Option<f64>) {
        self.values[index] = value;
    }
}

/// Full description of a refined MW quantum game.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSpec {
    pub players: usize,
    /// One slot per player.
    pub control_layout: RegisterLayout,
    pub operation_layout: RegisterLayout,
    /// Owner (1-based player id) of each operation slot.
    pub ownership: Vec<usize>,
    pub branches: Vec<Branch>,
    /// Initial state for control labels matching no branch.
    pub default_state: SparseState,
    /// One table per player.
    pub payoffs: Vec<PayoffTable>,
}

/// Invariant breaches found by [`SchemeSpec::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    PlayerCount { players: usize },
    ControlSlots { expected: usize, found: usize },
    OwnershipLength { expected: usize, found: usize },
    OwnerOutOfRange { slot: usize, owner: usize },
    OwnershipNotSurjective { player: usize },
    BranchLayout { branch: usize },
    BranchPattern { branch: usize, reason: String },
    DuplicatePattern { pattern: BasisLabel },
    Normalization { branch: Option<usize>, norm: f64 },
    PayoffTableCount { expected: usize, found: usize },
    PayoffTableSize { player: usize, expected: usize, found: usize },
    PayoffMissing { player: usize, label: BasisLabel },
    PayoffNotFinite { player: usize, label: BasisLabel },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PlayerCount { players } => {
                write!(f, "player count: {players} players, need at least 2")
            }
            Violation::ControlSlots { expected, found } => write!(
                f,
                "control layout: {found} slots, expected one per player ({expected})"
            ),
            Violation::OwnershipLength { expected, found } => write!(
                f,
                "ownership: {found} entries for {expected} operation slots"
            ),
            Violation::OwnerOutOfRange { slot, owner } => {
                write!(f, "ownership: slot {slot} owned by unknown player {owner}")
            }
            Violation::OwnershipNotSurjective { player } => {
                write!(f, "surjectivity: player {player} owns no operation slot")
            }
            Violation::BranchLayout { branch } => write!(
                f,
                "branch {branch}: state layout differs from the operation layout"
            ),
            Violation::BranchPattern { branch, reason } => {
                write!(f, "branch {branch}: bad control pattern ({reason})")
            }
            Violation::DuplicatePattern { pattern } => {
                write!(f, "distinct patterns: control pattern {pattern} repeated")
            }
            Violation::Normalization { branch, norm } => match branch {
                Some(b) => write!(f, "normalization: branch {b} state has norm {norm}"),
                None => write!(f, "normalization: default state has norm {norm}"),
            },
            Violation::PayoffTableCount { expected, found } => write!(
                f,
                "payoffs: {found} tables for {expected} players"
            ),
            Violation::PayoffTableSize {
                player,
                expected,
                found,
            } => write!(
                f,
                "totality: player {player} table has {found} entries, expected {expected}"
            ),
            Violation::PayoffMissing { player, label } => {
                write!(f, "totality: player {player} has no payoff for |{label}>")
            }
            Violation::PayoffNotFinite { player, label } => {
                write!(f, "payoffs: player {player} payoff at |{label}> is not finite")
            }
        }
    }
}

/// One pure strategy: a projector digit on the player's control slot and an
/// operator for each owned operation slot, in slot order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlayerStrategy {
    pub projector: usize,
    pub operators: Vec<LocalOperator>,
}

impl PlayerStrategy {
    pub fn new(projector: usize, operators: Vec<LocalOperator>) -> Self {
        Self {
            projector,
            operators,
        }
    }

    /// Label in the form `P1⊗U0⊗U1`.
    pub fn label(&self, radices: &[usize]) -> String {
        let mut s = format!("P{}", self.projector);
        for (op, &r) in self.operators.iter().zip(radices) {
            s.push_str(&format!("⊗U{}", op.amount(r)));
        }
        s
    }

    /// Compact digit code: projector digit then shift amounts (`100`).
    pub fn code(&self, radices: &[usize]) -> String {
        let mut digits = vec![self.projector];
        digits.extend(self.operators.iter().zip(radices).map(|(op, &r)| op.amount(r)));
        BasisLabel(digits).to_string()
    }
}

/// A player's pure strategies in canonical order: projector digit major,
/// then operator assignments lexicographic in slot order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayerStrategies {
    pub player: usize,
    pub control_radix: usize,
    pub owned_slots: Vec<usize>,
    pub owned_radices: Vec<usize>,
}

impl PlayerStrategies {
    pub fn count(&self) -> usize {
        self.control_radix * self.owned_radices.iter().product::<usize>()
    }

    pub fn strategy(&self, index: usize) -> PlayerStrategy {
        let per_projector: usize = self.owned_radices.iter().product();
        let projector = index / per_projector;
        let mut rest = index % per_projector;
        let mut amounts = vec![0; self.owned_radices.len()];
        for (i, &r) in self.owned_radices.iter().enumerate().rev() {
            amounts[i] = rest % r;
            rest /= r;
        }
        PlayerStrategy {
            projector,
            operators: amounts.into_iter().map(LocalOperator::shift).collect(),
        }
    }

    pub fn index_of(&self, strategy: &PlayerStrategy) -> Result<usize> {
        if strategy.projector >= self.control_radix {
            return Err(Error::InvalidProfile(format!(
                "player {} projector digit {} exceeds control radix {}",
                self.player, strategy.projector, self.control_radix
            )));
        }
        if strategy.operators.len() != self.owned_radices.len() {
            return Err(Error::InvalidProfile(format!(
                "player {} needs {} operators, got {}",
                self.player,
                self.owned_radices.len(),
                strategy.operators.len()
            )));
        }
        let ops = strategy
            .operators
            .iter()
            .zip(&self.owned_radices)
            .fold(0, |acc, (op, &r)| acc * r + op.amount(r));
        let per_projector: usize = self.owned_radices.iter().product();
        Ok(strategy.projector * per_projector + ops)
    }

    pub fn iter(&self) -> impl Iterator<Item = PlayerStrategy> + '_ {
        (0..self.count()).map(|i| self.strategy(i))
    }

    pub fn label(&self, index: usize) -> String {
        self.strategy(index).label(&self.owned_radices)
    }
}

/// All players' strategy sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategySet {
    pub players: Vec<PlayerStrategies>,
}

impl StrategySet {
    pub fn counts(&self) -> Vec<usize> {
        self.players.iter().map(PlayerStrategies::count).collect()
    }

    /// Number of pure profiles, `None` on overflow.
    pub fn profile_count(&self) -> Option<u128> {
        self.players
            .iter()
            .try_fold(1u128, |acc, p| acc.checked_mul(p.count() as u128))
    }
}

impl SchemeSpec {
    pub fn control_pattern_count(&self) -> usize {
        self.control_layout.dimension()
    }

    /// Operation slots owned by a player (1-based id), ascending.
    pub fn owned_slots(&self, player: usize) -> Vec<usize> {
        self.ownership
            .iter()
            .enumerate()
            .filter(|(_, &o)| o == player)
            .map(|(s, _)| s)
            .collect()
    }

    pub fn strategies(&self) -> StrategySet {
        StrategySet {
            players: (1..=self.players)
                .map(|p| {
                    let owned_slots = self.owned_slots(p);
                    let owned_radices = owned_slots
                        .iter()
                        .map(|&s| self.operation_layout.radix(s))
                        .collect();
                    PlayerStrategies {
                        player: p,
                        control_radix: self.control_layout.radix(p - 1),
                        owned_slots,
                        owned_radices,
                    }
                })
                .collect(),
        }
    }

    /// Payoff of a player (1-based) at an operation label index.
    pub fn payoff_at(&self, player: usize, index: usize) -> Option<f64> {
        self.payoffs.get(player - 1).and_then(|t| t.get(index))
    }

    /// Every invariant breach; empty when the scheme is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.players < 2 {
            out.push(Violation::PlayerCount {
                players: self.players,
            });
        }
        if self.control_layout.len() != self.players {
            out.push(Violation::ControlSlots {
                expected: self.players,
                found: self.control_layout.len(),
            });
        }
        let slots = self.operation_layout.len();
        if self.ownership.len() != slots {
            out.push(Violation::OwnershipLength {
                expected: slots,
                found: self.ownership.len(),
            });
        }
        for (slot, &owner) in self.ownership.iter().enumerate() {
            if owner == 0 || owner > self.players {
                out.push(Violation::OwnerOutOfRange { slot, owner });
            }
        }
        for player in 1..=self.players {
            if !self.ownership.contains(&player) {
                out.push(Violation::OwnershipNotSurjective { player });
            }
        }

        let mut seen = BTreeSet::new();
        for (i, branch) in self.branches.iter().enumerate() {
            if let Err(e) = self.control_layout.check(&branch.pattern) {
                out.push(Violation::BranchPattern {
                    branch: i,
                    reason: e.to_string(),
                });
            }
            if !seen.insert(branch.pattern.clone()) {
                out.push(Violation::DuplicatePattern {
                    pattern: branch.pattern.clone(),
                });
            }
            if branch.state.layout() != &self.operation_layout {
                out.push(Violation::BranchLayout { branch: i });
            } else if !branch.state.is_normalized(STATE_NORM_TOLERANCE) {
                out.push(Violation::Normalization {
                    branch: Some(i),
                    norm: branch.state.norm_sqr().sqrt(),
                });
            }
        }
        if !self.default_state.is_normalized(STATE_NORM_TOLERANCE) {
            out.push(Violation::Normalization {
                branch: None,
                norm: self.default_state.norm_sqr().sqrt(),
            });
        }

        if self.payoffs.len() != self.players {
            out.push(Violation::PayoffTableCount {
                expected: self.players,
                found: self.payoffs.len(),
            });
        }
        let dim = self.operation_layout.dimension();
        for (p, table) in self.payoffs.iter().enumerate() {
            let player = p + 1;
            if table.len() != dim {
                out.push(Violation::PayoffTableSize {
                    player,
                    expected: dim,
                    found: table.len(),
                });
                continue;
            }
            for (index, value) in table.entries().iter().enumerate() {
                match value {
                    None => out.push(Violation::PayoffMissing {
                        player,
                        label: self.operation_layout.label_at(index),
                    }),
                    Some(v) if !v.is_finite() => out.push(Violation::PayoffNotFinite {
                        player,
                        label: self.operation_layout.label_at(index),
                    }),
                    Some(_) => {}
                }
            }
        }
        out
    }

    /// `Ok` when [`SchemeSpec::validate`] finds nothing.
    pub fn ensure_valid(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            let msg: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            Err(Error::InvalidScheme(msg.join("; ")))
        }
    }
}

/// `(row player payoff, column player payoff)` matrix.
pub type BimatrixPayoffs = Vec<Vec<(f64, f64)>>;

fn check_joint_state(psi: &SparseState, layout: &RegisterLayout) -> Result<()> {
    if psi.layout() != layout {
        return Err(Error::InvalidScheme(format!(
            "joint state lives on radices {:?}, expected {:?}",
            psi.layout().radices(),
            layout.radices()
        )));
    }
    if !psi.is_normalized(CONSTRUCTOR_NORM_TOLERANCE) {
        return Err(Error::InvalidScheme(format!(
            "joint state has norm {}",
            psi.norm_sqr().sqrt()
        )));
    }
    Ok(())
}

fn bimatrix_tables(matrix: &BimatrixPayoffs) -> Result<(RegisterLayout, Vec<PayoffTable>)> {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, Vec::len);
    if rows < 2 || cols < 2 {
        return Err(Error::InvalidScheme(format!(
            "payoff matrix is {rows}x{cols}; both dimensions must be at least 2"
        )));
    }
    if matrix.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidScheme("ragged payoff matrix".into()));
    }
    let layout = RegisterLayout::new(vec![rows, cols])?;
    let flat: Vec<(f64, f64)> = matrix.iter().flatten().copied().collect();
    let tables = vec![
        PayoffTable::from_values(flat.iter().map(|p| p.0).collect()),
        PayoffTable::from_values(flat.iter().map(|p| p.1).collect()),
    ];
    Ok((layout, tables))
}

fn all_ones(layout: &RegisterLayout) -> BasisLabel {
    BasisLabel(vec![1; layout.len()])
}

/// Two-player scheme for a 2x2 bimatrix game.
pub fn make_two_by_two(matrix: [[(f64, f64); 2]; 2], psi: SparseState) -> Result<SchemeSpec> {
    let matrix: BimatrixPayoffs = matrix.iter().map(|r| r.to_vec()).collect();
    make_bimatrix(&matrix, psi)
}

/// Two-player scheme for an `(n+1) x (m+1)` bimatrix game; players act with
/// cyclic shifts on a qudit each.
pub fn make_bimatrix(matrix: &BimatrixPayoffs, psi: SparseState) -> Result<SchemeSpec> {
    let (operation_layout, payoffs) = bimatrix_tables(matrix)?;
    check_joint_state(&psi, &operation_layout)?;
    let control_layout = RegisterLayout::qubits(2)?;
    Ok(SchemeSpec {
        players: 2,
        branches: vec![Branch {
            pattern: all_ones(&control_layout),
            state: psi,
        }],
        control_layout,
        default_state: basis_state(&operation_layout, operation_layout.zero_label())?,
        operation_layout,
        ownership: vec![1, 2],
        payoffs,
    })
}

/// `k`-player scheme where each player owns one qubit. `payoffs[i]` is
/// player `i+1`'s table over the `2^k` labels in row-major order.
pub fn make_strategic(k: usize, payoffs: Vec<Vec<f64>>, psi: SparseState) -> Result<SchemeSpec> {
    let ownership = (1..=k).collect();
    make_extensive_scheme(k, k, ownership, payoffs, psi)
}

/// Scheme for the normal representation of an extensive game with `k`
/// players and `n` information sets, one qubit per information set.
/// `ownership[s]` is the owner of operation slot `s` (1-based player id).
pub fn make_extensive_scheme(
    k: usize,
    n: usize,
    ownership: Vec<usize>,
    payoffs: Vec<Vec<f64>>,
    psi: SparseState,
) -> Result<SchemeSpec> {
    if k < 2 {
        return Err(Error::InvalidScheme(format!("{k} players; need at least 2")));
    }
    if n < k {
        return Err(Error::InvalidScheme(format!(
            "{n} information sets cannot cover {k} players"
        )));
    }
    if ownership.len() != n {
        return Err(Error::InvalidScheme(format!(
            "ownership covers {} slots, expected {n}",
            ownership.len()
        )));
    }
    for p in 1..=k {
        if !ownership.contains(&p) {
            return Err(Error::InvalidScheme(format!(
                "ownership map is not surjective: player {p} owns nothing"
            )));
        }
    }
    if let Some(o) = ownership.iter().find(|&&o| o == 0 || o > k) {
        return Err(Error::InvalidScheme(format!("unknown owner {o}")));
    }
    let operation_layout = RegisterLayout::qubits(n)?;
    check_joint_state(&psi, &operation_layout)?;
    let payoffs = tables_from_vectors(k, operation_layout.dimension(), payoffs)?;
    let control_layout = RegisterLayout::qubits(k)?;
    Ok(SchemeSpec {
        players: k,
        branches: vec![Branch {
            pattern: all_ones(&control_layout),
            state: psi,
        }],
        control_layout,
        default_state: basis_state(&operation_layout, operation_layout.zero_label())?,
        operation_layout,
        ownership,
        payoffs,
    })
}

fn tables_from_vectors(k: usize, dim: usize, payoffs: Vec<Vec<f64>>) -> Result<Vec<PayoffTable>> {
    if payoffs.len() != k {
        return Err(Error::InvalidScheme(format!(
            "{} payoff tables for {k} players",
            payoffs.len()
        )));
    }
    payoffs
        .into_iter()
        .enumerate()
        .map(|(p, v)| {
            if v.len() != dim {
                Err(Error::InvalidScheme(format!(
                    "player {} payoff table has {} entries, expected {dim}",
                    p + 1,
                    v.len()
                )))
            } else {
                Ok(PayoffTable::from_values(v))
            }
        })
        .collect()
}

/// Two-player scheme with several joint states: control pattern `(i, i)`
/// selects `psis[i-1]`, every other pattern (including `(0, 0)`) the
/// classical state. Control slots have radix `psis.len() + 1`.
pub fn make_multi_initial(matrix: &BimatrixPayoffs, psis: Vec<SparseState>) -> Result<SchemeSpec> {
    if psis.is_empty() {
        return Err(Error::InvalidScheme("need at least one joint state".into()));
    }
    let (operation_layout, payoffs) = bimatrix_tables(matrix)?;
    for psi in &psis {
        check_joint_state(psi, &operation_layout)?;
    }
    let radix = psis.len() + 1;
    let control_layout = RegisterLayout::new(vec![radix, radix])?;
    let branches = psis
        .into_iter()
        .enumerate()
        .map(|(i, state)| Branch {
            pattern: BasisLabel(vec![i + 1, i + 1]),
            state,
        })
        .collect();
    Ok(SchemeSpec {
        players: 2,
        control_layout,
        default_state: basis_state(&operation_layout, operation_layout.zero_label())?,
        operation_layout,
        ownership: vec![1, 2],
        branches,
        payoffs,
    })
}

/// `(|a> + |b>)/sqrt(2)` style helper used across builders and tests.
pub fn superposition(layout: &RegisterLayout, terms: &[(&str, Complex64)]) -> Result<SparseState> {
    let parsed = terms
        .iter()
        .map(|(l, a)| Ok((BasisLabel::parse(l)?, *a)))
        .collect::<Result<Vec<_>>>()?;
    SparseState::new(layout.clone(), parsed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lbl(s: &str) -> BasisLabel {
        BasisLabel::parse(s).unwrap()
    }

    fn pd_payoffs() -> Vec<Vec<f64>> {
        // labels 000..111 row-major
        let entries = [
            (3., 3., 3.),
            (2., 2., 5.),
            (2., 5., 2.),
            (0., 4., 4.),
            (5., 2., 2.),
            (4., 0., 4.),
            (4., 4., 0.),
            (1., 1., 1.),
        ];
        vec![
            entries.iter().map(|e| e.0).collect(),
            entries.iter().map(|e| e.1).collect(),
            entries.iter().map(|e| e.2).collect(),
        ]
    }

    fn pd_psi() -> SparseState {
        SparseState::uniform(
            RegisterLayout::qubits(3).unwrap(),
            &[lbl("001"), lbl("010"), lbl("100"), lbl("111")],
        )
        .unwrap()
    }

    #[test]
    fn two_by_two_layout_and_tables() {
        let m = [[(1.0, 2.0), (3.0, 4.0)], [(5.0, 6.0), (7.0, 8.0)]];
        let q2 = RegisterLayout::qubits(2).unwrap();
        let psi = SparseState::uniform(q2.clone(), &[lbl("00"), lbl("11")]).unwrap();
        let spec = make_two_by_two(m, psi.clone()).unwrap();
        assert!(spec.validate().is_empty());
        assert_eq!(spec.players, 2);
        assert_eq!(spec.control_layout.radices(), &[2, 2]);
        assert_eq!(spec.ownership, vec![1, 2]);
        assert_eq!(spec.branches.len(), 1);
        assert_eq!(spec.branches[0].pattern, lbl("11"));
        assert_eq!(spec.branches[0].state, psi);
        assert_eq!(spec.default_state, basis_state(&q2, lbl("00")).unwrap());
        // M1 diagonal at |01> is a_01
        assert_eq!(spec.payoff_at(1, q2.index_of(&lbl("01"))), Some(3.0));
        assert_eq!(spec.payoff_at(2, q2.index_of(&lbl("01"))), Some(4.0));
    }

    #[test]
    fn two_by_two_rejects_bad_states() {
        let m = [[(1.0, 1.0); 2]; 2];
        let q3 = RegisterLayout::qubits(3).unwrap();
        assert!(make_two_by_two(m, basis_state(&q3, lbl("000")).unwrap()).is_err());
        let q2 = RegisterLayout::qubits(2).unwrap();
        let short = SparseState::new(q2, [(lbl("00"), Complex64::new(0.9, 0.0))]).unwrap();
        assert!(make_two_by_two(m, short).is_err());
    }

    #[test]
    fn bimatrix_strategy_counts() {
        let m: BimatrixPayoffs = (0..3)
            .map(|i| (0..4).map(|j| (i as f64, j as f64)).collect())
            .collect();
        let layout = RegisterLayout::new(vec![3, 4]).unwrap();
        let spec = make_bimatrix(&m, basis_state(&layout, lbl("00")).unwrap()).unwrap();
        let counts = spec.strategies().counts();
        assert_eq!(counts, vec![2 * 3, 2 * 4]);
        let labels: Vec<String> = spec.strategies().players[0].iter().map(|s| s.label(&[3])).collect();
        assert_eq!(labels, ["P0⊗U0", "P0⊗U1", "P0⊗U2", "P1⊗U0", "P1⊗U1", "P1⊗U2"]);
    }

    #[test]
    fn bimatrix_rejects_degenerate_matrix() {
        let m: BimatrixPayoffs = vec![vec![(1.0, 1.0), (2.0, 2.0)]];
        let layout = RegisterLayout::new(vec![2, 2]).unwrap();
        assert!(make_bimatrix(&m, basis_state(&layout, lbl("00")).unwrap()).is_err());
    }

    #[test]
    fn strategic_prisoners_dilemma() {
        let spec = make_strategic(3, pd_payoffs(), pd_psi()).unwrap();
        assert!(spec.validate().is_empty());
        assert_eq!(spec.ownership, vec![1, 2, 3]);
        assert_eq!(spec.branches[0].pattern, lbl("111"));
        let i = spec.operation_layout.index_of(&lbl("110"));
        let at: Vec<f64> = (1..=3).map(|p| spec.payoff_at(p, i).unwrap()).collect();
        assert_eq!(at, vec![4.0, 4.0, 0.0]);
        assert_eq!(spec.strategies().counts(), vec![4, 4, 4]);
    }

    #[test]
    fn strategic_with_two_players_matches_two_by_two() {
        let m = [[(3.0, 3.0), (0.0, 5.0)], [(5.0, 0.0), (1.0, 1.0)]];
        let q2 = RegisterLayout::qubits(2).unwrap();
        let psi = SparseState::uniform(q2, &[lbl("00"), lbl("11")]).unwrap();
        let a = make_two_by_two(m, psi.clone()).unwrap();
        let b = make_strategic(
            2,
            vec![vec![3.0, 0.0, 5.0, 1.0], vec![3.0, 5.0, 0.0, 1.0]],
            psi,
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn strategic_rejects_short_table() {
        let mut p = pd_payoffs();
        p[1].pop();
        assert!(make_strategic(3, p, pd_psi()).is_err());
    }

    #[test]
    fn extensive_scheme_for_four_stage_centipede() {
        let q4 = RegisterLayout::qubits(4).unwrap();
        let psi = SparseState::uniform(q4, &[lbl("1010"), lbl("1011")]).unwrap();
        let payoffs = vec![vec![0.0; 16], vec![0.0; 16]];
        let spec = make_extensive_scheme(2, 4, vec![1, 2, 1, 2], payoffs.clone(), psi.clone()).unwrap();
        assert_eq!(spec.strategies().counts(), vec![8, 8]);
        assert_eq!(spec.owned_slots(1), vec![0, 2]);
        assert_eq!(spec.owned_slots(2), vec![1, 3]);

        let err = make_extensive_scheme(2, 4, vec![1, 1, 1, 1], payoffs, psi).unwrap_err();
        assert!(err.to_string().contains("surjective"));
    }

    #[test]
    fn multi_initial_layout() {
        let m: BimatrixPayoffs = vec![vec![(1.0, 0.0), (0.0, 1.0)], vec![(0.0, 1.0), (1.0, 0.0)]];
        let q2 = RegisterLayout::qubits(2).unwrap();
        let psi1 = SparseState::uniform(q2.clone(), &[lbl("00"), lbl("11")]).unwrap();
        let psi2 = SparseState::uniform(q2.clone(), &[lbl("01"), lbl("10")]).unwrap();
        let spec = make_multi_initial(&m, vec![psi1.clone(), psi2]).unwrap();
        assert!(spec.validate().is_empty());
        assert_eq!(spec.control_layout.radices(), &[3, 3]);
        let patterns: Vec<_> = spec.branches.iter().map(|b| b.pattern.clone()).collect();
        assert_eq!(patterns, vec![lbl("11"), lbl("22")]);
        assert_eq!(spec.strategies().counts(), vec![6, 6]);

        // a single joint state gives the plain bimatrix scheme
        let single = make_multi_initial(&m, vec![psi1.clone()]).unwrap();
        assert_eq!(single, make_bimatrix(&m, psi1).unwrap());
    }

    #[test]
    fn validate_reports_each_breach() {
        let good = make_strategic(3, pd_payoffs(), pd_psi()).unwrap();
        assert_eq!(good.validate(), vec![]);

        let mut short_norm = good.clone();
        short_norm.branches[0].state = SparseState::new(
            RegisterLayout::qubits(3).unwrap(),
            [(lbl("000"), Complex64::new(0.9, 0.0))],
        )
        .unwrap();
        let v = short_norm.validate();
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::Normalization { branch: Some(0), .. }));
        assert!(v[0].to_string().starts_with("normalization"));

        let mut missing = good.clone();
        let idx = missing.operation_layout.index_of(&lbl("101"));
        missing.payoffs[1].set(idx, None);
        let v = missing.validate();
        assert_eq!(
            v,
            vec![Violation::PayoffMissing {
                player: 2,
                label: lbl("101")
            }]
        );
        assert!(v[0].to_string().starts_with("totality"));

        let mut dup = good.clone();
        dup.branches.push(dup.branches[0].clone());
        assert!(dup
            .validate()
            .iter()
            .any(|v| matches!(v, Violation::DuplicatePattern { .. })));

        let mut unowned = good;
        unowned.ownership = vec![1, 1, 2];
        assert!(unowned
            .validate()
            .contains(&Violation::OwnershipNotSurjective { player: 3 }));
    }

    #[test]
    fn strategy_index_round_trip() {
        let spec = make_strategic(3, pd_payoffs(), pd_psi()).unwrap();
        for ps in spec.strategies().players {
            for i in 0..ps.count() {
                assert_eq!(ps.index_of(&ps.strategy(i)).unwrap(), i);
            }
        }
    }
}
