//! JSON formats: the canonical scheme document, game trees, normal-form
//! games and mixed profiles, with source detection for the CLI.
//!
//! Canonical scheme layout:
//!
//! ```json
//! {
//!   "players": 2,
//!   "control_radices": [2, 2],
//!   "operation_radices": [2, 2],
//!   "ownership": [1, 2],
//!   "branches": [{"pattern": "11", "state": [{"label": "00", "re": 0.7071067811865476, "im": 0.0}]}],
//!   "payoffs": [[{"label": "00", "value": 3.0}], [{"label": "00", "value": 3.0}]]
//! }
//! ```
//!
//! A `default_state` array (same shape as a branch state) is written only
//! when the default differs from `|0...0>`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::eval::MixedProfile;
use crate::extensive::GameTree;
use crate::game::NormalFormGame;
use crate::scheme::{Branch, PayoffTable, SchemeSpec};
use crate::state::{basis_state, BasisLabel, RegisterLayout, SparseState};
use num_complex::Complex64;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AmplitudeDoc {
    label: String,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BranchDoc {
    pattern: String,
    state: Vec<AmplitudeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PayoffDoc {
    label: String,
    value: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeDoc {
    players: usize,
    control_radices: Vec<usize>,
    operation_radices: Vec<usize>,
    ownership: Vec<usize>,
    branches: Vec<BranchDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    default_state: Option<Vec<AmplitudeDoc>>,
    payoffs: Vec<Vec<PayoffDoc>>,
}

fn state_doc(state: &SparseState) -> Vec<AmplitudeDoc> {
    state
        .amplitudes()
        .iter()
        .map(|(l, a)| AmplitudeDoc {
            label: l.to_string(),
            re: a.re,
            im: a.im,
        })
        .collect()
}

fn state_from_doc(layout: &RegisterLayout, doc: Vec<AmplitudeDoc>) -> Result<SparseState> {
    let terms = doc
        .into_iter()
        .map(|t| Ok((BasisLabel::parse(&t.label)?, Complex64::new(t.re, t.im))))
        .collect::<Result<Vec<_>>>()?;
    SparseState::new(layout.clone(), terms)
}

pub fn scheme_to_json(spec: &SchemeSpec) -> String {
    let layout = &spec.operation_layout;
    let zero = basis_state(layout, layout.zero_label()).ok();
    let doc = SchemeDoc {
        players: spec.players,
        control_radices: spec.control_layout.radices().to_vec(),
        operation_radices: layout.radices().to_vec(),
        ownership: spec.ownership.clone(),
        branches: spec
            .branches
            .iter()
            .map(|b| BranchDoc {
                pattern: b.pattern.to_string(),
                state: state_doc(&b.state),
            })
            .collect(),
        default_state: (zero.as_ref() != Some(&spec.default_state)).then(|| state_doc(&spec.default_state)),
        payoffs: spec
            .payoffs
            .iter()
            .map(|t| {
                t.entries()
                    .iter()
                    .enumerate()
                    .filter_map(|(i, v)| {
                        v.map(|value| PayoffDoc {
                            label: layout.label_at(i).to_string(),
                            value,
                        })
                    })
                    .collect()
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("scheme documents always serialize")
}

/// Reads a canonical scheme document. Structural problems (labels outside
/// the layout, duplicate payoff labels) are reported as errors; semantic
/// ones (normalization, missing payoffs, ownership) are left to
/// [`SchemeSpec::validate`].
pub fn scheme_from_json(text: &str) -> Result<SchemeSpec> {
    let doc: SchemeDoc = serde_json::from_str(text)?;
    scheme_from_doc(doc)
}

fn scheme_from_doc(doc: SchemeDoc) -> Result<SchemeSpec> {
    let control_layout = RegisterLayout::new(doc.control_radices)?;
    let operation_layout = RegisterLayout::new(doc.operation_radices)?;
    let branches = doc
        .branches
        .into_iter()
        .map(|b| {
            let pattern = BasisLabel::parse(&b.pattern)?;
            control_layout.check(&pattern)?;
            Ok(Branch {
                pattern,
                state: state_from_doc(&operation_layout, b.state)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let default_state = match doc.default_state {
        Some(d) => state_from_doc(&operation_layout, d)?,
        None => basis_state(&operation_layout, operation_layout.zero_label())?,
    };
    let dim = operation_layout.checked_dimension().ok_or_else(|| {
        Error::InvalidLayout("operation register dimension overflows".into())
    })?;
    let payoffs = doc
        .payoffs
        .into_iter()
        .enumerate()
        .map(|(p, entries)| {
            let mut table = PayoffTable::from_partial(vec![None; dim]);
            for e in entries {
                let label = BasisLabel::parse(&e.label)?;
                operation_layout.check(&label)?;
                let i = operation_layout.index_of(&label);
                if table.get(i).is_some() {
                    return Err(Error::InvalidScheme(format!(
                        "player {} has two payoffs for |{label}>",
                        p + 1
                    )));
                }
                table.set(i, Some(e.value));
            }
            Ok(table)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SchemeSpec {
        players: doc.players,
        control_layout,
        operation_layout,
        ownership: doc.ownership,
        branches,
        default_state,
        payoffs,
    })
}

/// A parsed input document.
#[derive(Debug, Clone)]
pub enum Source {
    Scheme(SchemeSpec),
    Tree(GameTree),
    Game(NormalFormGame),
}

impl Source {
    pub fn kind(&self) -> &'static str {
        match self {
            Source::Scheme(_) => "scheme",
            Source::Tree(_) => "tree",
            Source::Game(_) => "game",
        }
    }
}

/// Detects the document type from its keys: `control_radices` marks a
/// scheme, `nodes` a game tree, `strategy_counts` a normal-form game.
pub fn load_source(text: &str) -> Result<Source> {
    let value: Value = serde_json::from_str(text)?;
    let has = |k: &str| value.get(k).is_some();
    if has("control_radices") {
        Ok(Source::Scheme(scheme_from_json(text)?))
    } else if has("nodes") {
        Ok(Source::Tree(GameTree::from_json(text)?))
    } else if has("strategy_counts") {
        let game: NormalFormGame = serde_json::from_str(text)?;
        game.check()?;
        Ok(Source::Game(game))
    } else {
        Err(Error::Parse(
            "unrecognized document: expected a scheme, game tree or normal-form game".into(),
        ))
    }
}

/// Accepts `{"distributions": [[...], ...]}` or a bare array of arrays.
pub fn mixed_from_json(text: &str) -> Result<MixedProfile> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Doc {
        Wrapped(MixedProfile),
        Bare(Vec<Vec<f64>>),
    }
    let value: Value = serde_json::from_str(text)?;
    match serde_json::from_value(value) {
        Ok(Doc::Wrapped(m)) => Ok(m),
        Ok(Doc::Bare(d)) => Ok(MixedProfile::new(d)),
        Err(_) => Err(Error::Parse(
            "mixed profile must be {\"distributions\": [[...]]} or an array of arrays".into(),
        )),
    }
}

/// One-line description of a parse failure, with position when known.
pub fn describe_parse_error(err: &Error) -> String {
    match err {
        Error::Json(e) if e.line() > 0 => format!(
            "parse error at line {}, column {}: {}",
            e.line(),
            e.column(),
            e
        ),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{make_multi_initial, make_two_by_two, superposition};

    fn sample() -> SchemeSpec {
        let layout = RegisterLayout::qubits(2).unwrap();
        let r = Complex64::new(0.6, 0.0);
        let psi = superposition(&layout, &[("01", r), ("10", Complex64::new(0.0, 0.8))]).unwrap();
        make_two_by_two([[(3.0, 3.0), (0.0, 5.0)], [(5.0, 0.0), (1.0, 1.0)]], psi).unwrap()
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let text = scheme_to_json(&sample());
        let back = scheme_from_json(&text).unwrap();
        assert_eq!(back, sample());
        assert_eq!(scheme_to_json(&back), text);
    }

    #[test]
    fn canonical_fields() {
        let v: Value = serde_json::from_str(&scheme_to_json(&sample())).unwrap();
        assert_eq!(v["control_radices"], serde_json::json!([2, 2]));
        assert_eq!(v["branches"][0]["pattern"], "11");
        assert_eq!(v["branches"][0]["state"][1]["label"], "10");
        assert_eq!(v["branches"][0]["state"][1]["im"], 0.8);
        assert_eq!(v["payoffs"][1][1]["value"], 5.0);
        assert!(v.get("default_state").is_none());
    }

    #[test]
    fn multi_initial_round_trip() {
        let layout = RegisterLayout::qubits(2).unwrap();
        let a = superposition(&layout, &[("00", Complex64::new(1.0, 0.0))]).unwrap();
        let b = superposition(&layout, &[("11", Complex64::new(1.0, 0.0))]).unwrap();
        let m = vec![vec![(1.0, 2.0), (0.0, 0.0)], vec![(0.0, 0.0), (2.0, 1.0)]];
        let spec = make_multi_initial(&m, vec![a, b]).unwrap();
        let text = scheme_to_json(&spec);
        assert!(text.contains("\"pattern\": \"22\""));
        assert_eq!(scheme_to_json(&scheme_from_json(&text).unwrap()), text);
    }

    #[test]
    fn non_zero_default_is_written() {
        let mut spec = sample();
        spec.default_state = basis_state(&spec.operation_layout, BasisLabel(vec![1, 1])).unwrap();
        let text = scheme_to_json(&spec);
        assert!(text.contains("default_state"));
        assert_eq!(scheme_from_json(&text).unwrap(), spec);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = scheme_from_json("{\n  \"players\": 2,\n  oops\n}").unwrap_err();
        assert!(err.is_parse());
        assert!(describe_parse_error(&err).starts_with("parse error at line 3"));
    }

    #[test]
    fn labels_outside_layout_are_rejected() {
        let text = scheme_to_json(&sample()).replace("\"pattern\": \"11\"", "\"pattern\": \"12\"");
        assert!(scheme_from_json(&text).is_err());
    }

    #[test]
    fn partial_payoffs_load_and_fail_validation() {
        let mut v: Value = serde_json::from_str(&scheme_to_json(&sample())).unwrap();
        v["payoffs"][0].as_array_mut().unwrap().pop();
        let spec = scheme_from_json(&v.to_string()).unwrap();
        let violations = spec.validate();
        assert_eq!(violations.len(), 1);
        assert!(violations[0].to_string().starts_with("totality"));
    }

    #[test]
    fn source_detection() {
        assert_eq!(load_source(&scheme_to_json(&sample())).unwrap().kind(), "scheme");
        let tree = crate::extensive::make_centipede(2).unwrap();
        assert_eq!(load_source(&tree.to_json().unwrap()).unwrap().kind(), "tree");
        let game = NormalFormGame::bimatrix(&[vec![(1.0, 1.0), (0.0, 0.0)], vec![(0.0, 0.0), (1.0, 1.0)]]).unwrap();
        assert_eq!(load_source(&game.to_json().unwrap()).unwrap().kind(), "game");
        assert!(load_source("{\"x\": 1}").unwrap_err().is_parse());
    }

    #[test]
    fn mixed_profile_forms() {
        let a = mixed_from_json("{\"distributions\": [[0.5, 0.5], [1, 0]]}").unwrap();
        let b = mixed_from_json("[[0.5, 0.5], [1, 0]]").unwrap();
        assert_eq!(a, b);
        assert!(mixed_from_json("[1, 2]").is_err());
    }
}
