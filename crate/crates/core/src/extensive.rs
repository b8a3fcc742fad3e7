//! Finite perfect-information extensive games: outcomes, normal
//! representation, backward induction, and the centipede family with its
//! quantum scheme.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{CertifiedProfile, EquilibriumCertificate};
use crate::error::{Error, Result};
use crate::eval::{Evaluator, PureProfile};
use crate::game::{unflatten, NormalFormGame};
use crate::scheme::{make_extensive_scheme, PlayerStrategy, SchemeSpec};
use crate::state::{BasisLabel, LocalOperator, RegisterLayout, SparseState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub label: String,
    pub child: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    Decision { player: usize, actions: Vec<Action> },
    Terminal { payoffs: Vec<f64> },
}

/// Tree with singleton information sets. Nodes are addressed by index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameTree {
    pub players: usize,
    pub root: usize,
    pub nodes: Vec<Node>,
}

/// A full contingent plan per player: decision node -> action index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TreeStrategy {
    pub choices: Vec<BTreeMap<usize, usize>>,
}

impl GameTree {
    pub fn new(players: usize, root: usize, nodes: Vec<Node>) -> Result<Self> {
        let tree = Self {
            players,
            root,
            nodes,
        };
        tree.check()?;
        Ok(tree)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let tree: Self = serde_json::from_str(text)?;
        tree.check()?;
        Ok(tree)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidTree(m));
        if self.players == 0 {
            return bad("a game needs at least one player".into());
        }
        if self.root >= self.nodes.len() {
            return bad(format!("root {} is not a node", self.root));
        }
        for (i, node) in self.nodes.iter().enumerate() {
            match node {
                Node::Decision { player, actions } => {
                    if *player == 0 || *player > self.players {
                        return bad(format!("node {i} owned by unknown player {player}"));
                    }
                    if actions.len() < 2 {
                        return bad(format!("decision node {i} has fewer than 2 actions"));
                    }
                    if let Some(a) = actions.iter().find(|a| a.child >= self.nodes.len()) {
                        return bad(format!("node {i} action {} points to missing node {}", a.label, a.child));
                    }
                }
                Node::Terminal { payoffs } => {
                    if payoffs.len() != self.players {
                        return bad(format!(
                            "leaf {i} has {} payoffs for {} players",
                            payoffs.len(),
                            self.players
                        ));
                    }
                }
            }
        }
        // every node reached exactly once from the root
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.root];
        while let Some(i) = stack.pop() {
            if seen[i] {
                return bad(format!("node {i} is reached twice; not a tree"));
            }
            seen[i] = true;
            if let Node::Decision { actions, .. } = &self.nodes[i] {
                stack.extend(actions.iter().map(|a| a.child));
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return bad(format!("node {i} is unreachable from the root"));
        }
        Ok(())
    }

    /// Decision nodes in preorder (actions in listed order).
    pub fn decision_nodes(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![self.root];
        while let Some(i) = stack.pop() {
            if let Node::Decision { actions, .. } = &self.nodes[i] {
                out.push(i);
                stack.extend(actions.iter().rev().map(|a| a.child));
            }
        }
        out
    }

    /// A player's information sets (1-based player id) in preorder.
    pub fn information_sets(&self, player: usize) -> Vec<usize> {
        self.decision_nodes()
            .into_iter()
            .filter(|&i| self.owner(i) == Some(player))
            .collect()
    }

    pub fn owner(&self, node: usize) -> Option<usize> {
        match &self.nodes[node] {
            Node::Decision { player, .. } => Some(*player),
            Node::Terminal { .. } => None,
        }
    }

    fn actions(&self, node: usize) -> &[Action] {
        match &self.nodes[node] {
            Node::Decision { actions, .. } => actions,
            Node::Terminal { .. } => &[],
        }
    }
}

/// Payoffs reached by following the players' plans from the root.
pub fn outcome(tree: &GameTree, strategy: &TreeStrategy) -> Result<Vec<f64>> {
    if strategy.choices.len() != tree.players {
        return Err(Error::InvalidProfile(format!(
            "plans for {} players, game has {}",
            strategy.choices.len(),
            tree.players
        )));
    }
    for node in tree.decision_nodes() {
        let p = tree.owner(node).unwrap_or(0);
        match strategy.choices[p - 1].get(&node) {
            None => {
                return Err(Error::InvalidProfile(format!(
                    "player {p} has no action at node {node}"
                )))
            }
            Some(&a) if a >= tree.actions(node).len() => {
                return Err(Error::InvalidProfile(format!(
                    "action {a} out of range at node {node}"
                )))
            }
            _ => {}
        }
    }
    Ok(follow(tree, |node, player| strategy.choices[player - 1][&node]))
}

fn follow(tree: &GameTree, mut choose: impl FnMut(usize, usize) -> usize) -> Vec<f64> {
    let mut node = tree.root;
    loop {
        match &tree.nodes[node] {
            Node::Terminal { payoffs } => return payoffs.clone(),
            Node::Decision { player, actions } => node = actions[choose(node, *player)].child,
        }
    }
}

/// Strategy index `index` of a player with the given information sets,
/// as node -> action (first information set most significant).
fn plan(tree: &GameTree, infosets: &[usize], index: usize) -> BTreeMap<usize, usize> {
    let radices: Vec<usize> = infosets.iter().map(|&n| tree.actions(n).len()).collect();
    let digits = if infosets.is_empty() { vec![] } else { unflatten(&radices, index) };
    infosets.iter().copied().zip(digits).collect()
}

fn plan_label(tree: &GameTree, infosets: &[usize], index: usize) -> String {
    if infosets.is_empty() {
        return "-".into();
    }
    let p = plan(tree, infosets, index);
    let labels: Vec<&str> = infosets
        .iter()
        .map(|n| tree.actions(*n)[p[n]].label.as_str())
        .collect();
    if labels.iter().all(|l| l.chars().count() == 1) {
        labels.concat()
    } else {
        labels.join(".")
    }
}

/// Strategic form of the tree: each player's strategies are full plans
/// over their information sets, listed with the first set most significant.
pub fn normal_representation(tree: &GameTree, budget: u128) -> Result<NormalFormGame> {
    let infosets: Vec<Vec<usize>> = (1..=tree.players).map(|p| tree.information_sets(p)).collect();
    let counts: Vec<usize> = infosets
        .iter()
        .map(|sets| sets.iter().map(|&n| tree.actions(n).len()).product())
        .collect();
    let required = counts
        .iter()
        .try_fold(1u128, |acc, &c| acc.checked_mul(c as u128))
        .unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let labels = infosets
        .iter()
        .zip(&counts)
        .map(|(sets, &c)| (0..c).map(|i| plan_label(tree, sets, i)).collect())
        .collect();
    let mut payoffs = vec![Vec::with_capacity(required as usize); tree.players];
    for flat in 0..required as usize {
        let idx = unflatten(&counts, flat);
        let plans: Vec<BTreeMap<usize, usize>> = infosets
            .iter()
            .zip(&idx)
            .map(|(sets, &i)| plan(tree, sets, i))
            .collect();
        let u = follow(tree, |node, player| plans[player - 1][&node]);
        for (t, v) in payoffs.iter_mut().zip(u) {
            t.push(v);
        }
    }
    NormalFormGame::with_labels(counts, labels, payoffs)
}

/// Leaves-up value propagation. Each decision node takes the action that
/// maximizes its owner's payoff, earliest action on ties.
pub fn backward_induction(tree: &GameTree) -> (Vec<f64>, TreeStrategy) {
    let mut values: Vec<Option<Vec<f64>>> = vec![None; tree.nodes.len()];
    let mut strategy = TreeStrategy {
        choices: vec![BTreeMap::new(); tree.players],
    };
    // reverse preorder visits children before parents
    let mut order = Vec::new();
    let mut stack = vec![tree.root];
    while let Some(i) = stack.pop() {
        order.push(i);
        stack.extend(tree.actions(i).iter().map(|a| a.child));
    }
    for &i in order.iter().rev() {
        match &tree.nodes[i] {
            Node::Terminal { payoffs } => values[i] = Some(payoffs.clone()),
            Node::Decision { player, actions } => {
                let mut best = 0;
                let mut best_value = f64::NEG_INFINITY;
                for (a, act) in actions.iter().enumerate() {
                    let v = values[act.child].as_ref().expect("child evaluated")[player - 1];
                    if v > best_value {
                        best = a;
                        best_value = v;
                    }
                }
                values[i] = values[actions[best].child].clone();
                strategy.choices[player - 1].insert(i, best);
            }
        }
    }
    (values[tree.root].take().expect("root evaluated"), strategy)
}

fn check_stages(n: usize) -> Result<()> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::InvalidTree(format!(
            "centipede stage count must be even and at least 2, got {n}"
        )));
    }
    Ok(())
}

/// Payoffs when the game stops at `stage` (1-based) or, for `stage == n+1`,
/// when every player continues.
pub fn centipede_payoff(n: usize, stage: usize) -> (f64, f64) {
    let s = stage as f64;
    if stage > n {
        ((n + 2) as f64, n as f64)
    } else if stage % 2 == 1 {
        (s + 1.0, s - 1.0)
    } else {
        (s - 1.0, s + 1.0)
    }
}

/// `n`-stage centipede: player 1 moves at odd stages, player 2 at even ones;
/// each decision lists `S` (stop) before `C` (continue).
pub fn make_centipede(n: usize) -> Result<GameTree> {
    check_stages(n)?;
    let mut nodes = Vec::with_capacity(2 * n + 1);
    for stage in 1..=n {
        let id = nodes.len();
        nodes.push(Node::Decision {
            player: if stage % 2 == 1 { 1 } else { 2 },
            actions: vec![
                Action {
                    label: "S".into(),
                    child: id + 1,
                },
                Action {
                    label: "C".into(),
                    child: id + 2,
                },
            ],
        });
        let (a, b) = centipede_payoff(n, stage);
        nodes.push(Node::Terminal {
            payoffs: vec![a, b],
        });
    }
    let (a, b) = centipede_payoff(n, n + 1);
    nodes.push(Node::Terminal {
        payoffs: vec![a, b],
    });
    GameTree::new(2, 0, nodes)
}

/// Quantum scheme for a tree whose decisions are all binary: one qubit per
/// information set (preorder), owned by the node's player; the qubit digit
/// is the action index, so identity plays the first action and the bit flip
/// the second.
pub fn extensive_scheme_from_tree(tree: &GameTree, psi: SparseState) -> Result<SchemeSpec> {
    let nodes = tree.decision_nodes();
    if let Some(&n) = nodes.iter().find(|&&n| tree.actions(n).len() != 2) {
        return Err(Error::InvalidTree(format!(
            "node {n} has {} actions; qubit schemes need exactly 2",
            tree.actions(n).len()
        )));
    }
    let slot_of: BTreeMap<usize, usize> = nodes.iter().enumerate().map(|(s, &n)| (n, s)).collect();
    let ownership: Vec<usize> = nodes.iter().map(|&n| tree.owner(n).unwrap_or(0)).collect();
    let layout = RegisterLayout::qubits(nodes.len())?;
    let mut payoffs = vec![Vec::with_capacity(layout.dimension()); tree.players];
    for label in layout.labels() {
        let u = follow(tree, |node, _| label.digits()[slot_of[&node]]);
        for (t, v) in payoffs.iter_mut().zip(u) {
            t.push(v);
        }
    }
    make_extensive_scheme(tree.players, nodes.len(), ownership, payoffs, psi)
}

/// `(|1010...10> + |1010...11>)/sqrt(2)` on `n` qubits.
pub fn centipede_joint_state(n: usize) -> Result<SparseState> {
    check_stages(n)?;
    let layout = RegisterLayout::qubits(n)?;
    let base: Vec<usize> = (0..n).map(|i| usize::from(i % 2 == 0)).collect();
    let mut last = base.clone();
    last[n - 1] = 1;
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    SparseState::new(layout, [(BasisLabel(base), amp), (BasisLabel(last), amp)])
}

/// The quantum `n`-stage centipede and its designated profile: both players
/// select the joint state; player 1 plays the identity everywhere; player 2
/// flips every owned qubit except the last one.
pub fn make_centipede_scheme(n: usize) -> Result<(SchemeSpec, PureProfile)> {
    let tree = make_centipede(n)?;
    let spec = extensive_scheme_from_tree(&tree, centipede_joint_state(n)?)?;
    let p1 = spec.owned_slots(1);
    let p2 = spec.owned_slots(2);
    let last = n - 1;
    let profile = PureProfile(vec![
        PlayerStrategy::new(1, vec![LocalOperator::Identity; p1.len()]),
        PlayerStrategy::new(
            1,
            p2.iter()
                .map(|&s| {
                    if s == last {
                        LocalOperator::Identity
                    } else {
                        LocalOperator::Shift(1)
                    }
                })
                .collect(),
        ),
    ]);
    Ok((spec, profile))
}

/// Result of checking the designated quantum centipede profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentipedeVerification {
    pub stages: usize,
    pub certificate: EquilibriumCertificate,
    /// Player 1's best payoff among deviations that keep the classical branch
    /// (projector digit 0).
    pub player1_classical_cap: f64,
}

/// Evaluates the designated profile and every unilateral pure deviation.
pub fn verify_centipede_equilibrium(n: usize, epsilon: f64) -> Result<CentipedeVerification> {
    let (spec, profile) = make_centipede_scheme(n)?;
    let eval = Evaluator::new(&spec);
    let indices = eval.indices(&profile)?;
    let payoffs = eval.payoff_indices(&indices)?;
    let deviations = (1..=2)
        .map(|p| eval.deviation_payoffs(&indices, p))
        .collect::<Result<Vec<_>>>()?;
    let p1 = &eval.strategies().players[0];
    let classical = p1.count() / p1.control_radix;
    let player1_classical_cap = deviations[0][..classical]
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(CentipedeVerification {
        stages: n,
        certificate: EquilibriumCertificate::from_deviations(
            CertifiedProfile::Pure(indices),
            payoffs,
            &deviations,
            epsilon,
        ),
        player1_classical_cap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_EPSILON as EPS;

    fn leaves(tree: &GameTree) -> Vec<Vec<f64>> {
        // leaf payoffs in order of the stopping stage, then the final leaf
        let mut out = Vec::new();
        for &n in &tree.decision_nodes() {
            if let Node::Terminal { payoffs } = &tree.nodes[tree.actions(n)[0].child] {
                out.push(payoffs.clone());
            }
        }
        out.push(follow(tree, |_, _| 1));
        out
    }

    fn plans(tree: &GameTree, p1: &str, p2: &str) -> TreeStrategy {
        let mut choices = vec![BTreeMap::new(), BTreeMap::new()];
        for (p, s) in [p1, p2].iter().enumerate() {
            for (node, c) in tree.information_sets(p + 1).into_iter().zip(s.chars()) {
                choices[p].insert(node, usize::from(c == 'C'));
            }
        }
        TreeStrategy { choices }
    }

    #[test]
    fn centipede_leaves() {
        let v = |pairs: &[(f64, f64)]| pairs.iter().map(|&(a, b)| vec![a, b]).collect::<Vec<_>>();
        assert_eq!(
            leaves(&make_centipede(4).unwrap()),
            v(&[(2., 0.), (1., 3.), (4., 2.), (3., 5.), (6., 4.)])
        );
        assert_eq!(leaves(&make_centipede(2).unwrap()), v(&[(2., 0.), (1., 3.), (4., 2.)]));
        assert_eq!(
            leaves(&make_centipede(6).unwrap()),
            v(&[(2., 0.), (1., 3.), (4., 2.), (3., 5.), (6., 4.), (5., 7.), (8., 6.)])
        );
        assert!(make_centipede(3).is_err());
        assert!(make_centipede(0).is_err());
    }

    #[test]
    fn outcomes_of_named_plans() {
        let t = make_centipede(4).unwrap();
        assert_eq!(outcome(&t, &plans(&t, "SC", "CC")).unwrap(), vec![2.0, 0.0]);
        assert_eq!(outcome(&t, &plans(&t, "CC", "CS")).unwrap(), vec![3.0, 5.0]);
        let mut partial = plans(&t, "CC", "CS");
        partial.choices[1].clear();
        assert!(outcome(&t, &partial).is_err());
    }

    #[test]
    fn single_decision_tree() {
        let t = GameTree::new(
            1,
            0,
            vec![
                Node::Decision {
                    player: 1,
                    actions: vec![
                        Action { label: "L".into(), child: 1 },
                        Action { label: "R".into(), child: 2 },
                    ],
                },
                Node::Terminal { payoffs: vec![1.0] },
                Node::Terminal { payoffs: vec![3.0] },
            ],
        )
        .unwrap();
        let mut s = TreeStrategy { choices: vec![BTreeMap::from([(0, 1)])] };
        assert_eq!(outcome(&t, &s).unwrap(), vec![3.0]);
        s.choices[0].insert(0, 0);
        assert_eq!(outcome(&t, &s).unwrap(), vec![1.0]);

        let g = normal_representation(&t, 100).unwrap();
        assert_eq!(g.players, 1);
        assert_eq!(g.payoffs[0], vec![1.0, 3.0]);
        assert_eq!(g.strategy_labels[0], ["L", "R"]);
        assert_eq!(backward_induction(&t).0, vec![3.0]);
    }

    #[test]
    fn backward_induction_tie_goes_to_first_action() {
        let t = GameTree::new(
            2,
            0,
            vec![
                Node::Decision {
                    player: 2,
                    actions: vec![
                        Action { label: "a".into(), child: 1 },
                        Action { label: "b".into(), child: 2 },
                    ],
                },
                Node::Terminal { payoffs: vec![0.0, 1.0] },
                Node::Terminal { payoffs: vec![9.0, 1.0] },
            ],
        )
        .unwrap();
        let (v, s) = backward_induction(&t);
        assert_eq!(v, vec![0.0, 1.0]);
        assert_eq!(s.choices[1][&0], 0);
    }

    #[test]
    fn malformed_trees_are_rejected() {
        let leaf = Node::Terminal { payoffs: vec![0.0, 0.0] };
        let one_action = Node::Decision {
            player: 1,
            actions: vec![Action { label: "x".into(), child: 1 }],
        };
        assert!(GameTree::new(2, 0, vec![one_action, leaf.clone()]).is_err());
        let shared = Node::Decision {
            player: 1,
            actions: vec![
                Action { label: "x".into(), child: 1 },
                Action { label: "y".into(), child: 1 },
            ],
        };
        assert!(GameTree::new(2, 0, vec![shared, leaf.clone()]).is_err());
        let short_leaf = Node::Terminal { payoffs: vec![0.0] };
        assert!(GameTree::new(2, 0, vec![short_leaf]).is_err());
        assert!(GameTree::new(2, 0, vec![leaf.clone(), leaf]).is_err());
    }

    #[test]
    fn tree_json_round_trip() {
        let t = make_centipede(4).unwrap();
        let back = GameTree::from_json(&t.to_json().unwrap()).unwrap();
        assert_eq!(back, t);
        let json: serde_json::Value = serde_json::from_str(&t.to_json().unwrap()).unwrap();
        assert_eq!(json["nodes"][0]["kind"], "decision");
        assert_eq!(json["nodes"][1]["kind"], "terminal");
    }

    #[test]
    fn off_path_changes_do_not_move_the_outcome() {
        let t = make_centipede(6).unwrap();
        let g = normal_representation(&t, 1_000).unwrap();
        // player 1 stopping at the first stage: player 2's plan is irrelevant
        for c in 0..g.strategy_counts[1] {
            assert_eq!(g.payoff_vector(&[0, c]), vec![2.0, 0.0]);
        }
    }

    #[test]
    fn designated_profile_operators() {
        let (spec, profile) = make_centipede_scheme(6).unwrap();
        let mut ops = vec![LocalOperator::Identity; 6];
        for (s, ps) in profile.0.iter().zip(1..=2) {
            for (op, slot) in s.operators.iter().zip(spec.owned_slots(ps)) {
                ops[slot] = *op;
            }
        }
        use LocalOperator::{Identity as I, Shift};
        assert_eq!(ops, vec![I, Shift(1), I, Shift(1), I, I]);
    }

    #[test]
    fn verification_small_cases() {
        let v = verify_centipede_equilibrium(4, EPS).unwrap();
        assert!(v.certificate.is_valid());
        assert_eq!(v.certificate.payoffs, vec![4.5, 4.5]);
        assert_eq!(v.player1_classical_cap, 4.0);
        assert!(verify_centipede_equilibrium(5, EPS).is_err());
    }

    #[test]
    fn extensive_scheme_needs_binary_actions() {
        let t = GameTree::new(
            1,
            0,
            vec![
                Node::Decision {
                    player: 1,
                    actions: (1..4).map(|c| Action { label: format!("a{c}"), child: c }).collect(),
                },
                Node::Terminal { payoffs: vec![1.0] },
                Node::Terminal { payoffs: vec![2.0] },
                Node::Terminal { payoffs: vec![3.0] },
            ],
        )
        .unwrap();
        let psi = SparseState::new(RegisterLayout::qubits(1).unwrap(), []).unwrap();
        assert!(extensive_scheme_from_tree(&t, psi).is_err());
    }
}
