//! Text form of pure profiles: `<control digits>;<operators>`.
//!
//! The control part has one base-36 digit per player (the projector each
//! player selects). The operator part lists one token per operation slot in
//! slot order: `I` (identity), `X` (shift by one) or `S<k>` (shift by `k`).
//! Example for three players and three slots: `100;I,I,X`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::eval::{Evaluator, PureProfile};
use crate::scheme::{PlayerStrategy, SchemeSpec};
use crate::state::{BasisLabel, LocalOperator};

pub fn parse_operator(token: &str) -> Result<LocalOperator> {
    match token.trim() {
        "I" => Ok(LocalOperator::Identity),
        "X" => Ok(LocalOperator::Shift(1)),
        t => t
            .strip_prefix('S')
            .and_then(|k| k.parse::<usize>().ok())
            .map(LocalOperator::shift)
            .ok_or_else(|| Error::Parse(format!("unknown operator token {t:?}"))),
    }
}

/// Parses a profile and validates it against the scheme.
pub fn parse_profile(spec: &SchemeSpec, text: &str) -> Result<PureProfile> {
    let (control, ops) = text
        .split_once(';')
        .ok_or_else(|| Error::Parse(format!("profile {text:?} lacks ';' between control and operators")))?;
    let control = BasisLabel::parse(control.trim())?;
    if control.len() != spec.players {
        return Err(Error::InvalidProfile(format!(
            "{} control digits for {} players",
            control.len(),
            spec.players
        )));
    }
    let ops: Vec<LocalOperator> = if ops.trim().is_empty() {
        Vec::new()
    } else {
        ops.split(',').map(parse_operator).collect::<Result<_>>()?
    };
    if ops.len() != spec.operation_layout.len() {
        return Err(Error::InvalidProfile(format!(
            "{} operators for {} operation slots",
            ops.len(),
            spec.operation_layout.len()
        )));
    }
    let mut per_player: BTreeMap<usize, Vec<LocalOperator>> = BTreeMap::new();
    for (op, &owner) in ops.iter().zip(&spec.ownership) {
        per_player.entry(owner).or_default().push(*op);
    }
    let profile = PureProfile(
        control
            .digits()
            .iter()
            .enumerate()
            .map(|(p, &d)| PlayerStrategy::new(d, per_player.remove(&(p + 1)).unwrap_or_default()))
            .collect(),
    );
    Evaluator::new(spec).indices(&profile)?;
    Ok(profile)
}

/// Inverse of [`parse_profile`]. Shifts are written reduced modulo the slot
/// radix.
pub fn format_profile(spec: &SchemeSpec, profile: &PureProfile) -> String {
    let control = BasisLabel(profile.0.iter().map(|s| s.projector).collect());
    let mut ops = vec![LocalOperator::Identity; spec.operation_layout.len()];
    for (p, s) in profile.0.iter().enumerate() {
        for (op, slot) in s.operators.iter().zip(spec.owned_slots(p + 1)) {
            ops[slot] = LocalOperator::shift(op.amount(spec.operation_layout.radix(slot)));
        }
    }
    let tokens: Vec<String> = ops.iter().map(|op| op.token()).collect();
    format!("{control};{}", tokens.join(","))
}
