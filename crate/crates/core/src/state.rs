//! Sparse pure states over mixed-radix registers and the local operators
//! used by the schemes: identity and cyclic shifts of a slot's digit.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Amplitudes below this magnitude are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// Absolute tolerance used when comparing amplitudes and norms.
pub const AMPLITUDE_TOLERANCE: f64 = 1e-12;

/// Ordered list of slot radices. Radix 2 slots are qubits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RegisterLayout {
    radices: Vec<usize>,
}

impl RegisterLayout {
    pub fn new(radices: Vec<usize>) -> Result<Self> {
        if radices.is_empty() {
            return Err(Error::InvalidLayout("layout needs at least one slot".into()));
        }
        if let Some(r) = radices.iter().find(|&&r| r < 2) {
            return Err(Error::InvalidLayout(format!("radix {r} is below 2")));
        }
        Ok(Self { radices })
    }

    /// `slots` qubits.
    pub fn qubits(slots: usize) -> Result<Self> {
        Self::new(vec![2; slots])
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn len(&self) -> usize {
        self.radices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radices.is_empty()
    }

    pub fn radix(&self, slot: usize) -> usize {
        self.radices[slot]
    }

    /// Dimension of the full tensor-product space.
    pub fn dimension(&self) -> usize {
        self.radices.iter().product()
    }

    /// Dimension with overflow detection, for guards on large layouts.
    pub fn checked_dimension(&self) -> Option<usize> {
        self.radices.iter().try_fold(1usize, |acc, &r| acc.checked_mul(r))
    }

    pub fn zero_label(&self) -> BasisLabel {
        BasisLabel(vec![0; self.len()])
    }

    /// Checks a label against this layout.
    pub fn check(&self, label: &BasisLabel) -> Result<()> {
        if label.len() != self.len() {
            return Err(Error::InvalidLabel(format!(
                "label {label} has {} digits, layout has {} slots",
                label.len(),
                self.len()
            )));
        }
        for (slot, (&d, &r)) in label.0.iter().zip(&self.radices).enumerate() {
            if d >= r {
                return Err(Error::InvalidLabel(format!(
                    "digit {d} at slot {slot} of {label} exceeds radix {r}"
                )));
            }
        }
        Ok(())
    }

    /// Row-major index of a label, slot 0 most significant.
    pub fn index_of(&self, label: &BasisLabel) -> usize {
        label
            .0
            .iter()
            .zip(&self.radices)
            .fold(0, |acc, (&d, &r)| acc * r + d)
    }

    /// Inverse of [`RegisterLayout::index_of`].
    pub fn label_at(&self, mut index: usize) -> BasisLabel {
        let mut digits = vec![0; self.len()];
        for (slot, &r) in self.radices.iter().enumerate().rev() {
            digits[slot] = index % r;
            index /= r;
        }
        BasisLabel(digits)
    }

    /// All labels in row-major order.
    pub fn labels(&self) -> impl Iterator<Item = BasisLabel> + '_ {
        (0..self.dimension()).map(|i| self.label_at(i))
    }
}

/// A computational basis ket, one digit per slot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisLabel(pub Vec<usize>);

impl BasisLabel {
    pub fn new(digits: Vec<usize>) -> Self {
        Self(digits)
    }

    pub fn digits(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses a digit string, slot 0 leftmost. Digits above 9 use `a`..`z`.
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| {
                c.to_digit(36)
                    .map(|d| d as usize)
                    .ok_or_else(|| Error::InvalidLabel(format!("bad digit {c:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.0 {
            let c = char::from_digit(d as u32, 36).unwrap_or('?');
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Local operator on a single slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LocalOperator {
    Identity,
    /// `|i> -> |i + amount mod radix>`. On a qubit `Shift(1)` is the bit flip.
    Shift(usize),
}

impl LocalOperator {
    /// `Shift(amount)`, or `Identity` for a zero amount.
    pub fn shift(amount: usize) -> Self {
        if amount == 0 {
            LocalOperator::Identity
        } else {
            LocalOperator::Shift(amount)
        }
    }

    /// Effective shift amount on a slot of the given radix.
    pub fn amount(self, radix: usize) -> usize {
        match self {
            LocalOperator::Identity => 0,
            LocalOperator::Shift(k) => k % radix,
        }
    }

    /// Profile-string token: `I`, `X` for a unit shift, `S<k>` otherwise.
    pub fn token(self) -> String {
        match self {
            LocalOperator::Identity | LocalOperator::Shift(0) => "I".into(),
            LocalOperator::Shift(1) => "X".into(),
            LocalOperator::Shift(k) => format!("S{k}"),
        }
    }
}

/// Normalized pure state stored as label -> amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseState {
    layout: RegisterLayout,
    amplitudes: BTreeMap<BasisLabel, Complex64>,
}

impl SparseState {
    /// Builds a state from terms. Repeated labels are summed and tiny
    /// amplitudes pruned. The norm is not enforced here; see
    /// [`SparseState::norm_deviation`].
    pub fn new(
        layout: RegisterLayout,
        terms: impl IntoIterator<Item = (BasisLabel, Complex64)>,
    ) -> Result<Self> {
        let mut amplitudes: BTreeMap<BasisLabel, Complex64> = BTreeMap::new();
        for (label, amp) in terms {
            layout.check(&label)?;
            *amplitudes.entry(label).or_default() += amp;
        }
        amplitudes.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
        Ok(Self { layout, amplitudes })
    }

    /// Equal-weight superposition of the given labels with real positive amplitudes.
    pub fn uniform(layout: RegisterLayout, labels: &[BasisLabel]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidState("empty superposition".into()));
        }
        let amp = Complex64::new(1.0 / (labels.len() as f64).sqrt(), 0.0);
        Self::new(layout, labels.iter().cloned().map(|l| (l, amp)))
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &BTreeMap<BasisLabel, Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, label: &BasisLabel) -> Complex64 {
        self.amplitudes.get(label).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm_deviation(&self) -> f64 {
        (self.norm_sqr().sqrt() - 1.0).abs()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        self.norm_deviation() <= tol
    }

    /// Applies local operators slot-wise. Unassigned slots get the identity.
    pub fn apply_local(&self, assignment: &BTreeMap<usize, LocalOperator>) -> Result<Self> {
        let mut shifts = vec![0; self.layout.len()];
        for (&slot, op) in assignment {
            if slot >= self.layout.len() {
                return Err(Error::SlotOutOfRange {
                    slot,
                    slots: self.layout.len(),
                });
            }
            shifts[slot] = op.amount(self.layout.radix(slot));
        }
        Ok(self.shifted(&shifts))
    }

    /// Shifts every slot by the matching entry of `shifts` (already reduced
    /// or not; reduced modulo the radix here). `shifts` must cover every slot.
    pub(crate) fn shifted(&self, shifts: &[usize]) -> Self {
        debug_assert_eq!(shifts.len(), self.layout.len());
        if shifts.iter().all(|&s| s == 0) {
            return self.clone();
        }
        let amplitudes = self
            .amplitudes
            .iter()
            .map(|(label, &amp)| {
                let digits = label
                    .0
                    .iter()
                    .zip(shifts)
                    .zip(self.layout.radices())
                    .map(|((&d, &s), &r)| (d + s) % r)
                    .collect();
                (BasisLabel(digits), amp)
            })
            .collect();
        Self {
            layout: self.layout.clone(),
            amplitudes,
        }
    }

    /// Outcome probabilities `|amplitude|^2` per label.
    pub fn born_weights(&self) -> BTreeMap<BasisLabel, f64> {
        self.amplitudes
            .iter()
            .map(|(l, a)| (l.clone(), a.norm_sqr()))
            .collect()
    }

    /// Entry-wise comparison within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.layout != other.layout {
            return false;
        }
        let labels = self.amplitudes.keys().chain(other.amplitudes.keys());
        labels
            .into_iter()
            .all(|l| (self.amplitude(l) - other.amplitude(l)).norm() <= tol)
    }
}

/// Single-term state with amplitude 1.
pub fn basis_state(layout: &RegisterLayout, label: BasisLabel) -> Result<SparseState> {
    SparseState::new(layout.clone(), [(label, Complex64::new(1.0, 0.0))])
}

impl fmt::Display for SparseState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (label, a) in &self.amplitudes {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if a.im.abs() < AMPLITUDE_TOLERANCE {
                write!(f, "{:.6}|{label}>", a.re)?;
            } else {
                write!(f, "({:.6}{:+.6}i)|{label}>", a.re, a.im)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
