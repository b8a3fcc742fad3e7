//! Built-in example games, shipped as canonical JSON.
//!
//! Fixed examples are embedded from `builtins/*.json`; `centipede<n>-quantum`
//! and `centipede<n>-classical` are generated for any even `n`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::extensive::{make_centipede, make_centipede_scheme};
use crate::game::NormalFormGame;
use crate::io::{load_source, scheme_to_json, Source};
use crate::scheme::{make_strategic, superposition, SchemeSpec};
use crate::state::RegisterLayout;

pub const PD3_QUANTUM_JSON: &str = include_str!("../builtins/pd3-quantum.json");
pub const PD3_CLASSICAL_JSON: &str = include_str!("../builtins/pd3-classical.json");
pub const CENTIPEDE4_QUANTUM_JSON: &str = include_str!("../builtins/centipede4-quantum.json");
pub const CENTIPEDE4_CLASSICAL_JSON: &str = include_str!("../builtins/centipede4-classical.json");

/// Names accepted by [`builtin`], aliases included.
pub const NAMES: &[&str] = &[
    "pd3",
    "pd3-quantum",
    "pd3-classical",
    "centipede4",
    "centipede4-quantum",
    "centipede4-classical",
    "centipede<n>-quantum",
    "centipede<n>-classical",
];

/// Three-player Prisoner's Dilemma payoff vectors, indexed by the
/// operation label (player 1 leftmost, 0 = cooperate, 1 = defect).
pub fn pd3_payoffs() -> Vec<Vec<f64>> {
    let rows: [[f64; 3]; 8] = [
        [3.0, 3.0, 3.0],
        [2.0, 2.0, 5.0],
        [2.0, 5.0, 2.0],
        [0.0, 4.0, 4.0],
        [5.0, 2.0, 2.0],
        [4.0, 0.0, 4.0],
        [4.0, 4.0, 0.0],
        [1.0, 1.0, 1.0],
    ];
    (0..3).map(|p| rows.iter().map(|r| r[p]).collect()).collect()
}

pub fn make_pd3_game() -> Result<NormalFormGame> {
    NormalFormGame::new(vec![2, 2, 2], pd3_payoffs())
}

/// The PD scheme with joint state `(|001> + |010> + |100> + |111>)/2`.
pub fn make_pd3_scheme() -> Result<SchemeSpec> {
    let layout = RegisterLayout::qubits(3)?;
    let h = Complex64::new(0.5, 0.0);
    let psi = superposition(&layout, &[("001", h), ("010", h), ("100", h), ("111", h)])?;
    make_strategic(3, pd3_payoffs(), psi)
}

fn stages(name: &str, suffix: &str) -> Option<usize> {
    name.strip_prefix("centipede")?.strip_suffix(suffix)?.parse().ok()
}

/// Loads a builtin by name.
pub fn builtin(name: &str) -> Result<Source> {
    match name {
        "pd3" | "pd3-quantum" => load_source(PD3_QUANTUM_JSON),
        "pd3-classical" => load_source(PD3_CLASSICAL_JSON),
        "centipede4" | "centipede4-quantum" => load_source(CENTIPEDE4_QUANTUM_JSON),
        "centipede4-classical" => load_source(CENTIPEDE4_CLASSICAL_JSON),
        _ => {
            if let Some(n) = stages(name, "-quantum").or_else(|| stages(name, "")) {
                Ok(Source::Scheme(make_centipede_scheme(n)?.0))
            } else if let Some(n) = stages(name, "-classical") {
                Ok(Source::Tree(make_centipede(n)?))
            } else {
                Err(Error::Parse(format!(
                    "unknown builtin {name:?}; available: {}",
                    NAMES.join(", ")
                )))
            }
        }
    }
}

/// Canonical text of each fixed builtin, freshly built from its constructor.
pub fn generated_documents() -> Result<Vec<(&'static str, String)>> {
    Ok(vec![
        ("pd3-quantum", scheme_to_json(&make_pd3_scheme()?)),
        ("pd3-classical", make_pd3_game()?.to_json()?),
        ("centipede4-quantum", scheme_to_json(&make_centipede_scheme(4)?.0)),
        ("centipede4-classical", make_centipede(4)?.to_json()?),
    ])
}
