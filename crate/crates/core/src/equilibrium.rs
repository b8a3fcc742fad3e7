//! Pure Nash enumeration, mixed-profile certification, dominance and best
//! responses on normal-form games.
//!
//! Certification only scans pure deviations: a player's expected payoff is
//! linear in their own mixed strategy, so its maximum over the simplex is
//! attained at a vertex.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{MixedProfile, DISTRIBUTION_TOLERANCE};
use crate::game::NormalFormGame;

/// The profile a certificate speaks about.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertifiedProfile {
    Pure(Vec<usize>),
    Mixed(MixedProfile),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Valid,
    Invalid,
}

/// Per-player comparison of the profile payoff with the best pure deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCertificate {
    pub profile: CertifiedProfile,
    pub payoffs: Vec<f64>,
    pub best_deviation_payoffs: Vec<f64>,
    /// Index of a best pure deviation for each player.
    pub best_deviations: Vec<usize>,
    /// `payoffs[p] - best_deviation_payoffs[p]`. For a pure profile the played
    /// strategy is excluded from the deviations, so the slack is the margin
    /// over the best alternative; for a mixed profile it is never positive.
    pub slack: Vec<f64>,
    pub epsilon: f64,
    pub verdict: Verdict,
}

impl EquilibriumCertificate {
    pub fn is_valid(&self) -> bool {
        self.verdict == Verdict::Valid
    }

    /// Assembles a certificate from profile payoffs and each player's payoffs
    /// for all of their pure strategies against the others.
    pub fn from_deviations(
        profile: CertifiedProfile,
        payoffs: Vec<f64>,
        deviations: &[Vec<f64>],
        epsilon: f64,
    ) -> Self {
        let mut best_deviation_payoffs = Vec::with_capacity(deviations.len());
        let mut best_deviations = Vec::with_capacity(deviations.len());
        for (p, d) in deviations.iter().enumerate() {
            let played = match &profile {
                CertifiedProfile::Pure(q) if d.len() > 1 => Some(q[p]),
                _ => None,
            };
            let (arg, max) = argmax(d, played);
            best_deviations.push(arg);
            best_deviation_payoffs.push(max);
        }
        let slack: Vec<f64> = payoffs
            .iter()
            .zip(&best_deviation_payoffs)
            .map(|(u, b)| u - b)
            .collect();
        let verdict = if slack.iter().all(|&s| s >= -epsilon) {
            Verdict::Valid
        } else {
            Verdict::Invalid
        };
        Self {
            profile,
            payoffs,
            best_deviation_payoffs,
            best_deviations,
            slack,
            epsilon,
            verdict,
        }
    }
}

fn argmax(values: &[f64], skip: Option<usize>) -> (usize, f64) {
    values
        .iter()
        .copied()
        .enumerate()
        .filter(|&(i, _)| Some(i) != skip)
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best })
}

/// Stride of a player's coordinate in the flattened tensor.
fn stride(game: &NormalFormGame, player_index: usize) -> usize {
    game.strategy_counts[player_index + 1..].iter().product()
}

/// Every pure Nash equilibrium, in lexicographic profile order.
pub fn pure_nash(game: &NormalFormGame, epsilon: f64) -> Vec<EquilibriumCertificate> {
    let size = game.profile_count();
    // best[p][other] = max payoff of player p over own strategies, where
    // `other` is the flat index with p's coordinate removed
    let best: Vec<Vec<f64>> = (0..game.players)
        .map(|p| {
            let c = game.strategy_counts[p];
            let st = stride(game, p);
            let mut best = vec![f64::NEG_INFINITY; size / c];
            for (flat, &v) in game.payoffs[p].iter().enumerate() {
                let other = (flat / (c * st)) * st + flat % st;
                if v > best[other] {
                    best[other] = v;
                }
            }
            best
        })
        .collect();

    let mut out = Vec::new();
    for flat in 0..size {
        let stable = (0..game.players).all(|p| {
            let c = game.strategy_counts[p];
            let st = stride(game, p);
            let other = (flat / (c * st)) * st + flat % st;
            game.payoffs[p][flat] >= best[p][other] - epsilon
        });
        if stable {
            let profile = game.profile_at(flat);
            out.push(certify_pure(game, &profile, epsilon));
        }
    }
    out
}

/// Payoffs of each of a player's pure strategies against the others'
/// distributions. `player` is 1-based; that player's own entry in
/// `distributions` is ignored.
pub fn deviation_values(game: &NormalFormGame, distributions: &[Vec<f64>], player: usize) -> Vec<f64> {
    let p = player - 1;
    let mut values = vec![0.0; game.strategy_counts[p]];
    for (flat, &u) in game.payoffs[p].iter().enumerate() {
        let profile = game.profile_at(flat);
        let mut w = 1.0;
        for (q, &s) in profile.iter().enumerate() {
            if q != p {
                w *= distributions[q][s];
                if w == 0.0 {
                    break;
                }
            }
        }
        if w != 0.0 {
            values[profile[p]] += w * u;
        }
    }
    values
}

/// Certificate for a pure profile.
pub fn certify_pure(game: &NormalFormGame, profile: &[usize], epsilon: f64) -> EquilibriumCertificate {
    let payoffs = game.payoff_vector(profile);
    let deviations: Vec<Vec<f64>> = (0..game.players)
        .map(|p| {
            let mut q = profile.to_vec();
            (0..game.strategy_counts[p])
                .map(|s| {
                    q[p] = s;
                    game.payoffs[p][game.flat_index(&q)]
                })
                .collect()
        })
        .collect();
    EquilibriumCertificate::from_deviations(
        CertifiedProfile::Pure(profile.to_vec()),
        payoffs,
        &deviations,
        epsilon,
    )
}

/// Certificate for a mixed profile: expected payoffs against the best pure
/// deviation of each player.
pub fn certify_mixed(
    game: &NormalFormGame,
    mixed: &MixedProfile,
    epsilon: f64,
) -> Result<EquilibriumCertificate> {
    mixed.check(&game.strategy_counts)?;
    let deviations: Vec<Vec<f64>> = (1..=game.players)
        .map(|p| deviation_values(game, &mixed.distributions, p))
        .collect();
    let payoffs = deviations
        .iter()
        .zip(&mixed.distributions)
        .map(|(d, own)| d.iter().zip(own).map(|(v, w)| v * w).sum())
        .collect();
    Ok(EquilibriumCertificate::from_deviations(
        CertifiedProfile::Mixed(mixed.clone()),
        payoffs,
        &deviations,
        epsilon,
    ))
}

/// Whether another pure strategy beats `strategy` by more than `epsilon`
/// against every opposing pure profile. `player` is 1-based.
pub fn strictly_dominated(game: &NormalFormGame, player: usize, strategy: usize, epsilon: f64) -> bool {
    let p = player - 1;
    let c = game.strategy_counts[p];
    let st = stride(game, p);
    let table = &game.payoffs[p];
    let others = game.profile_count() / c;
    (0..c).filter(|&t| t != strategy).any(|t| {
        (0..others).all(|other| {
            let base = (other / st) * c * st + other % st;
            table[base + t * st] > table[base + strategy * st] + epsilon
        })
    })
}

/// Pure strategies of `player` (1-based) within `epsilon` of the best
/// expected payoff against the other players' distributions.
pub fn best_response_set(
    game: &NormalFormGame,
    player: usize,
    opponents: &MixedProfile,
    epsilon: f64,
) -> Result<Vec<usize>> {
    if player == 0 || player > game.players {
        return Err(Error::InvalidProfile(format!("no player {player}")));
    }
    if opponents.distributions.len() != game.players {
        return Err(Error::InvalidProfile(format!(
            "{} distributions for {} players",
            opponents.distributions.len(),
            game.players
        )));
    }
    for (q, d) in opponents.distributions.iter().enumerate() {
        if q == player - 1 {
            continue;
        }
        let total: f64 = d.iter().sum();
        if d.len() != game.strategy_counts[q]
            || d.iter().any(|&x| x.is_nan() || x < 0.0)
            || (total - 1.0).abs() > DISTRIBUTION_TOLERANCE
        {
            return Err(Error::InvalidProfile(format!(
                "player {} distribution is not a probability vector over {} strategies",
                q + 1,
                game.strategy_counts[q]
            )));
        }
    }
    let values = deviation_values(game, &opponents.distributions, player);
    let (_, max) = argmax(&values, None);
    Ok(values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= max - epsilon)
        .map(|(i, _)| i)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_EPSILON as EPS;

    fn pennies() -> NormalFormGame {
        NormalFormGame::bimatrix(&[
            vec![(1.0, -1.0), (-1.0, 1.0)],
            vec![(-1.0, 1.0), (1.0, -1.0)],
        ])
        .unwrap()
    }

    fn constant() -> NormalFormGame {
        NormalFormGame::new(vec![3, 2], vec![vec![1.0; 6], vec![2.0; 6]]).unwrap()
    }

    #[test]
    fn matching_pennies_has_no_pure_equilibrium() {
        assert!(pure_nash(&pennies(), EPS).is_empty());
    }

    #[test]
    fn matching_pennies_uniform_certifies() {
        let g = pennies();
        let cert = certify_mixed(&g, &MixedProfile::uniform(&[2, 2]), EPS).unwrap();
        assert!(cert.is_valid());
        assert_eq!(cert.slack, vec![0.0, 0.0]);
        let off = MixedProfile::new(vec![vec![0.7, 0.3], vec![0.5, 0.5]]);
        assert!(!certify_mixed(&g, &off, EPS).unwrap().is_valid());
    }

    #[test]
    fn pure_equilibrium_point_mass() {
        let pd = NormalFormGame::bimatrix(&[
            vec![(3.0, 3.0), (0.0, 5.0)],
            vec![(5.0, 0.0), (1.0, 1.0)],
        ])
        .unwrap();
        let eqs = pure_nash(&pd, EPS);
        assert_eq!(eqs.len(), 1);
        assert_eq!(eqs[0].profile, CertifiedProfile::Pure(vec![1, 1]));
        assert_eq!(eqs[0].slack, vec![1.0, 1.0]);
        assert_eq!(eqs[0].best_deviations, vec![0, 0]);
        let cert = certify_mixed(&pd, &MixedProfile::point(&[2, 2], &[1, 1]), EPS).unwrap();
        assert!(cert.is_valid());
        assert!(cert.slack.iter().all(|&s| s >= 0.0));
        assert!(strictly_dominated(&pd, 1, 0, EPS));
        assert!(!strictly_dominated(&pd, 1, 1, EPS));
    }

    #[test]
    fn constant_game() {
        let g = constant();
        assert_eq!(pure_nash(&g, EPS).len(), 6);
        for s in 0..3 {
            assert!(!strictly_dominated(&g, 1, s, EPS));
        }
        let br = best_response_set(&g, 1, &MixedProfile::new(vec![vec![], vec![0.5, 0.5]]), EPS).unwrap();
        assert_eq!(br, vec![0, 1, 2]);
    }

    #[test]
    fn three_player_dominance() {
        // player 3 picks the block; strategy 1 always pays one more
        let counts = vec![2, 2, 2];
        let size = 8;
        let mut t3 = vec![0.0; size];
        for flat in 0..size {
            let prof = crate::game::unflatten(&counts, flat);
            t3[flat] = prof[2] as f64 + prof[0] as f64 * 0.5;
        }
        let g = NormalFormGame::new(counts, vec![vec![0.0; 8], vec![0.0; 8], t3]).unwrap();
        assert!(strictly_dominated(&g, 3, 0, EPS));
        assert!(!strictly_dominated(&g, 3, 1, EPS));
        assert!(!strictly_dominated(&g, 1, 0, EPS));
    }

    #[test]
    fn bad_best_response_inputs() {
        let g = pennies();
        assert!(best_response_set(&g, 3, &MixedProfile::uniform(&[2, 2]), EPS).is_err());
        let bad = MixedProfile::new(vec![vec![], vec![0.9, 0.3]]);
        assert!(best_response_set(&g, 1, &bad, EPS).is_err());
    }

    #[test]
    fn certificate_json_shape() {
        let g = pennies();
        let cert = certify_pure(&g, &[0, 0], EPS);
        let json = serde_json::to_value(&cert).unwrap();
        assert_eq!(json["verdict"], "INVALID");
        assert_eq!(json["profile"]["pure"], serde_json::json!([0, 0]));
        assert_eq!(json["slack"][1], -2.0);
    }
}
