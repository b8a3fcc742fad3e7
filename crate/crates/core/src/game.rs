//! Finite normal-form games as dense payoff tensors, plus JSON, CSV and
//! text-table renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Payoff tensor over the product of the players' strategy index ranges.
///
/// Profiles are flattened row-major with player 1 most significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalFormGame {
    pub players: usize,
    pub strategy_counts: Vec<usize>,
    pub strategy_labels: Vec<Vec<String>>,
    /// `payoffs[p][flat profile index]` is player `p+1`'s payoff.
    pub payoffs: Vec<Vec<f64>>,
}

impl NormalFormGame {
    /// Builds a game from per-player flattened payoffs; labels default to `s0, s1, ...`.
    pub fn new(strategy_counts: Vec<usize>, payoffs: Vec<Vec<f64>>) -> Result<Self> {
        let labels = strategy_counts
            .iter()
            .map(|&c| (0..c).map(|i| format!("s{i}")).collect())
            .collect();
        Self::with_labels(strategy_counts, labels, payoffs)
    }

    pub fn with_labels(
        strategy_counts: Vec<usize>,
        strategy_labels: Vec<Vec<String>>,
        payoffs: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let game = Self {
            players: strategy_counts.len(),
            strategy_counts,
            strategy_labels,
            payoffs,
        };
        game.check()?;
        Ok(game)
    }

    /// Two-player game from a matrix of `(row, column)` payoff pairs.
    pub fn bimatrix(matrix: &[Vec<(f64, f64)>]) -> Result<Self> {
        let rows = matrix.len();
        let cols = matrix.first().map_or(0, Vec::len);
        if matrix.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidGame("ragged bimatrix".into()));
        }
        let flat: Vec<(f64, f64)> = matrix.iter().flatten().copied().collect();
        Self::new(
            vec![rows, cols],
            vec![
                flat.iter().map(|p| p.0).collect(),
                flat.iter().map(|p| p.1).collect(),
            ],
        )
    }

    /// Checks the structural invariants (used after deserialization too).
    pub fn check(&self) -> Result<()> {
        if self.players == 0 || self.strategy_counts.len() != self.players {
            return Err(Error::InvalidGame(format!(
                "{} players but {} strategy counts",
                self.players,
                self.strategy_counts.len()
            )));
        }
        if self.strategy_counts.contains(&0) {
            return Err(Error::InvalidGame("every player needs a strategy".into()));
        }
        if self.strategy_labels.len() != self.players
            || self
                .strategy_labels
                .iter()
                .zip(&self.strategy_counts)
                .any(|(l, &c)| l.len() != c)
        {
            return Err(Error::InvalidGame("labels do not match strategy counts".into()));
        }
        let size = self.profile_count();
        if self.payoffs.len() != self.players || self.payoffs.iter().any(|t| t.len() != size) {
            return Err(Error::InvalidGame(format!(
                "payoff tensor must hold {} players x {size} profiles",
                self.players
            )));
        }
        Ok(())
    }

    pub fn profile_count(&self) -> usize {
        self.strategy_counts.iter().product()
    }

    pub fn flat_index(&self, profile: &[usize]) -> usize {
        profile
            .iter()
            .zip(&self.strategy_counts)
            .fold(0, |acc, (&s, &c)| acc * c + s)
    }

    pub fn profile_at(&self, index: usize) -> Vec<usize> {
        unflatten(&self.strategy_counts, index)
    }

    /// Payoff vector at a pure profile.
    pub fn payoff_vector(&self, profile: &[usize]) -> Vec<f64> {
        let i = self.flat_index(profile);
        self.payoffs.iter().map(|t| t[i]).collect()
    }

    /// Payoff of one player (1-based) at a pure profile.
    pub fn payoff(&self, player: usize, profile: &[usize]) -> f64 {
        self.payoffs[player - 1][self.flat_index(profile)]
    }

    pub fn profiles(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.profile_count()).map(|i| self.profile_at(i))
    }

    /// Restriction to a subset of each player's strategies (indices kept in order).
    pub fn restrict(&self, keep: &[Vec<usize>]) -> Result<Self> {
        if keep.len() != self.players {
            return Err(Error::InvalidGame("restriction needs one list per player".into()));
        }
        let counts: Vec<usize> = keep.iter().map(Vec::len).collect();
        let labels = keep
            .iter()
            .zip(&self.strategy_labels)
            .map(|(k, l)| k.iter().map(|&i| l[i].clone()).collect())
            .collect();
        let size: usize = counts.iter().product();
        let mut payoffs = vec![Vec::with_capacity(size); self.players];
        for i in 0..size {
            let local = unflatten(&counts, i);
            let global: Vec<usize> = local.iter().zip(keep).map(|(&s, k)| k[s]).collect();
            let flat = self.flat_index(&global);
            for (p, t) in payoffs.iter_mut().enumerate() {
                t.push(self.payoffs[p][flat]);
            }
        }
        Self::with_labels(counts, labels, payoffs)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let game: Self = serde_json::from_str(text)?;
        game.check()?;
        Ok(game)
    }

    /// One row per profile: strategy labels, then payoffs.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let head: Vec<String> = (1..=self.players)
            .map(|p| format!("player{p}_strategy"))
            .chain((1..=self.players).map(|p| format!("payoff{p}")))
            .collect();
        out.push_str(&head.join(","));
        out.push('\n');
        for (i, profile) in self.profiles().enumerate() {
            let mut cells: Vec<String> = profile
                .iter()
                .enumerate()
                .map(|(p, &s)| csv_cell(&self.strategy_labels[p][s]))
                .collect();
            cells.extend(self.payoffs.iter().map(|t| format_number(t[i])));
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Aligned text table: player 1 on rows, player 2 on columns, one block
    /// per strategy combination of players 3 and up.
    pub fn to_table(&self) -> String {
        self.render_table(&self.strategy_labels)
    }

    /// Like [`NormalFormGame::to_table`] with caller-chosen labels.
    pub fn render_table(&self, labels: &[Vec<String>]) -> String {
        let mut out = String::new();
        if self.players == 1 {
            let width = labels[0].iter().map(|l| l.chars().count()).max().unwrap_or(0);
            for (s, label) in labels[0].iter().enumerate() {
                let _ = writeln!(out, "{label:<width$}  ({})", format_number(self.payoffs[0][s]));
            }
            return out;
        }
        let rows = self.strategy_counts[0];
        let cols = self.strategy_counts[1];
        let block_counts = &self.strategy_counts[2..];
        let blocks: usize = block_counts.iter().product();
        for b in 0..blocks {
            let mut rest = vec![0; block_counts.len()];
            let mut r = b;
            for (i, &c) in block_counts.iter().enumerate().rev() {
                rest[i] = r % c;
                r /= c;
            }
            if !rest.is_empty() {
                if b > 0 {
                    out.push('\n');
                }
                let names: Vec<String> = rest
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| format!("player {}: {}", i + 3, labels[i + 2][s]))
                    .collect();
                let _ = writeln!(out, "[{}]", names.join(", "));
            }
            let mut grid = vec![vec![String::new(); cols + 1]; rows + 1];
            for c in 0..cols {
                grid[0][c + 1] = labels[1][c].clone();
            }
            for r in 0..rows {
                grid[r + 1][0] = labels[0][r].clone();
                for c in 0..cols {
                    let mut profile = vec![r, c];
                    profile.extend_from_slice(&rest);
                    let cell: Vec<String> = self
                        .payoff_vector(&profile)
                        .into_iter()
                        .map(format_number)
                        .collect();
                    grid[r + 1][c + 1] = format!("({})", cell.join(", "));
                }
            }
            let widths: Vec<usize> = (0..=cols)
                .map(|c| grid.iter().map(|row| row[c].chars().count()).max().unwrap_or(0))
                .collect();
            for row in &grid {
                let line: Vec<String> = row
                    .iter()
                    .zip(&widths)
                    .map(|(cell, &w)| {
                        let pad = w - cell.chars().count();
                        format!("{cell}{}", " ".repeat(pad))
                    })
                    .collect();
                out.push_str(line.join("  ").trim_end());
                out.push('\n');
            }
        }
        out
    }
}

/// Mixed-radix decomposition of a flat profile index, first entry most significant.
pub fn unflatten(counts: &[usize], mut index: usize) -> Vec<usize> {
    let mut profile = vec![0; counts.len()];
    for (p, &c) in counts.iter().enumerate().rev() {
        profile[p] = index % c;
        index /= c;
    }
    profile
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Shortest decimal that round-trips, with `-0` folded to `0`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pennies() -> NormalFormGame {
        NormalFormGame::bimatrix(&[
            vec![(1.0, -1.0), (-1.0, 1.0)],
            vec![(-1.0, 1.0), (1.0, -1.0)],
        ])
        .unwrap()
    }

    #[test]
    fn flat_indexing_is_row_major() {
        let g = NormalFormGame::new(vec![2, 3, 2], vec![(0..12).map(f64::from).collect()]).unwrap_err();
        assert!(g.to_string().contains("payoff tensor"));
        let g = NormalFormGame::new(vec![2, 3], vec![(0..6).map(f64::from).collect(), vec![0.0; 6]]).unwrap();
        assert_eq!(g.flat_index(&[1, 2]), 5);
        assert_eq!(g.profile_at(4), vec![1, 1]);
        assert_eq!(g.payoff(1, &[1, 0]), 3.0);
    }

    #[test]
    fn table_layout() {
        let t = pennies().to_table();
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0].split_whitespace().collect::<Vec<_>>(), ["s0", "s1"]);
        assert!(lines[1].starts_with("s0  (1, -1)"));
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn csv_layout() {
        let csv = pennies().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "player1_strategy,player2_strategy,payoff1,payoff2");
        assert_eq!(lines[2], "s0,s1,-1,1");
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn json_round_trip_and_checks() {
        let g = pennies();
        let back = NormalFormGame::from_json(&g.to_json().unwrap()).unwrap();
        assert_eq!(back, g);
        let bad = r#"{"players":2,"strategy_counts":[2,2],"strategy_labels":[["a","b"],["c","d"]],"payoffs":[[1,2,3],[1,2,3,4]]}"#;
        assert!(NormalFormGame::from_json(bad).is_err());
    }

    #[test]
    fn restriction_keeps_entries() {
        let g = NormalFormGame::new(vec![2, 3], vec![(0..6).map(f64::from).collect(), vec![0.0; 6]]).unwrap();
        let r = g.restrict(&[vec![1], vec![0, 2]]).unwrap();
        assert_eq!(r.strategy_counts, vec![1, 2]);
        assert_eq!(r.payoffs[0], vec![3.0, 5.0]);
        assert_eq!(r.strategy_labels[1], vec!["s0", "s2"]);
    }

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(2.75), "2.75");
        assert_eq!(format_number(2.0), "2");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(4.5), "4.5");
    }
}
