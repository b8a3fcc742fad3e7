//! Refined Marinatto-Weber quantum game schemes.
//!
//! Players pick a projector on their control qubit (or qudit) together with
//! local operators on their operation slots. The projectors jointly select
//! the initial state the operators act on: a designated joint state when the
//! control label matches a branch pattern, the classical `|0...0>` otherwise.
//! Payoffs are expectations of diagonal payoff measurements.
//!
//! The crate builds such schemes for bimatrix, n-player and extensive games,
//! evaluates profiles on a sparse state representation, extracts the induced
//! normal-form game and enumerates or certifies Nash equilibria. A dense
//! matrix implementation ([`oracle`]) reproduces every payoff by explicit
//! traces for cross-checking.

pub mod builtins;
pub mod equilibrium;
pub mod error;
pub mod eval;
pub mod extensive;
pub mod game;
pub mod io;
pub mod oracle;
pub mod profile;
pub mod scheme;
pub mod state;

pub use error::{Error, Result};
pub use eval::{
    classical_embedding_check, induced_game, induced_game_with_budget, payoff_mixed, payoff_pure,
    play_pure, resolve_branch, Evaluator, FinalState, MixedProfile, PureProfile,
};
pub use game::NormalFormGame;
pub use scheme::{PlayerStrategy, SchemeSpec, Violation};
pub use state::{basis_state, BasisLabel, LocalOperator, RegisterLayout, SparseState};

/// Tie tolerance for equilibrium and dominance comparisons.
pub const DEFAULT_EPSILON: f64 = 1e-9;
