//! Dense reference implementation. Materializes the initial operator, the
//! strategy operators, the final density matrix and the payoff measurements
//! as explicit matrices and computes payoffs as literal traces.
//!
//! Basis order is row-major over control slots then operation slots, slot 0
//! most significant, the same order the sparse labels use. Everything here is
//! quadratic in the full dimension, so it is meant for small schemes only.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::eval::{Evaluator, MixedProfile, PureProfile};
use crate::scheme::SchemeSpec;
use crate::state::{LocalOperator, SparseState};

pub type DenseMatrix = DMatrix<Complex64>;

/// Largest full-space dimension the dense path accepts.
pub const DENSE_DIMENSION_LIMIT: usize = 1 << 14;

/// Imaginary residue tolerated in a payoff trace.
pub const IMAGINARY_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Control dimension, operation dimension; errors past the guard.
fn dimensions(spec: &SchemeSpec) -> Result<(usize, usize)> {
    let too_large = || Error::DimensionTooLarge {
        dimension: usize::MAX,
        limit: DENSE_DIMENSION_LIMIT,
    };
    let c = spec.control_layout.checked_dimension().ok_or_else(too_large)?;
    let o = spec.operation_layout.checked_dimension().ok_or_else(too_large)?;
    let total = c.checked_mul(o).ok_or_else(too_large)?;
    if total > DENSE_DIMENSION_LIMIT {
        return Err(Error::DimensionTooLarge {
            dimension: total,
            limit: DENSE_DIMENSION_LIMIT,
        });
    }
    Ok((c, o))
}

fn dense_vector(state: &SparseState) -> DVector<Complex64> {
    let layout = state.layout();
    let mut v = DVector::from_element(layout.dimension(), ZERO);
    for (label, amp) in state.amplitudes() {
        v[layout.index_of(label)] = *amp;
    }
    v
}

fn projector(radix: usize, digit: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(radix, radix);
    m[(digit, digit)] = ONE;
    m
}

/// `|x> -> |x + k mod radix>`.
fn shift_matrix(radix: usize, op: LocalOperator) -> DenseMatrix {
    let k = op.amount(radix);
    let mut m = DenseMatrix::zeros(radix, radix);
    for x in 0..radix {
        m[((x + k) % radix, x)] = ONE;
    }
    m
}

fn kron_all(factors: impl IntoIterator<Item = DenseMatrix>) -> DenseMatrix {
    factors
        .into_iter()
        .fold(DenseMatrix::from_element(1, 1, ONE), |acc, f| acc.kronecker(&f))
}

/// `Σ_c |c><c| ⊗ |ψ_c><ψ_c|` where `ψ_c` is the branch state of pattern `c`,
/// or the default state for unmatched patterns.
pub fn dense_h(spec: &SchemeSpec) -> Result<DenseMatrix> {
    let (dc, d_op) = dimensions(spec)?;
    let default = dense_vector(&spec.default_state);
    let default_block = &default * default.adjoint();
    let mut h = DenseMatrix::zeros(dc * d_op, dc * d_op);
    for c in 0..dc {
        let pattern = spec.control_layout.label_at(c);
        let block = match spec.branches.iter().find(|b| b.pattern == pattern) {
            Some(b) => {
                let v = dense_vector(&b.state);
                &v * v.adjoint()
            }
            None => default_block.clone(),
        };
        h.view_mut((c * d_op, c * d_op), (d_op, d_op)).copy_from(&block);
    }
    Ok(h)
}

/// `(⊗ projectors) ⊗ (⊗ operators)` for a pure profile.
pub fn strategy_operator(spec: &SchemeSpec, profile: &PureProfile) -> Result<DenseMatrix> {
    dimensions(spec)?;
    let eval = Evaluator::new(spec);
    eval.indices(profile)?;
    let control = profile
        .0
        .iter()
        .enumerate()
        .map(|(p, s)| projector(spec.control_layout.radix(p), s.projector));
    let mut ops = vec![LocalOperator::Identity; spec.operation_layout.len()];
    for (s, ps) in profile.0.iter().zip(&eval.strategies().players) {
        for (op, &slot) in s.operators.iter().zip(&ps.owned_slots) {
            ops[slot] = *op;
        }
    }
    let operation = ops
        .iter()
        .enumerate()
        .map(|(slot, &op)| shift_matrix(spec.operation_layout.radix(slot), op));
    Ok(kron_all(control.chain(operation)))
}

/// `S H S†`. For qubit schemes `S† = S`; qudit shifts are not Hermitian, so
/// the adjoint is taken explicitly.
pub fn final_density(spec: &SchemeSpec, h: &DenseMatrix, profile: &PureProfile) -> Result<DenseMatrix> {
    let s = strategy_operator(spec, profile)?;
    Ok(&s * h * s.adjoint())
}

/// `1 ⊗ diag(payoffs of player)`; absent payoff entries read as zero.
pub fn payoff_measurement(spec: &SchemeSpec, player: usize) -> Result<DenseMatrix> {
    let (dc, _) = dimensions(spec)?;
    let table = spec
        .payoffs
        .get(player.wrapping_sub(1))
        .ok_or_else(|| Error::InvalidProfile(format!("no player {player}")))?;
    let diag = DVector::from_iterator(
        table.len(),
        table.entries().iter().map(|v| Complex64::new(v.unwrap_or(0.0), 0.0)),
    );
    Ok(DenseMatrix::identity(dc, dc).kronecker(&DenseMatrix::from_diagonal(&diag)))
}

fn real_trace(m: &DenseMatrix) -> Result<f64> {
    let t = m.trace();
    if t.im.abs() >= IMAGINARY_TOLERANCE {
        return Err(Error::InvalidState(format!(
            "trace has imaginary part {:e}",
            t.im
        )));
    }
    Ok(t.re)
}

/// `tr(ρ_f M_player)` for a pure profile (player is 1-based).
pub fn dense_payoff(spec: &SchemeSpec, profile: &PureProfile, player: usize) -> Result<f64> {
    let h = dense_h(spec)?;
    let rho = final_density(spec, &h, profile)?;
    real_trace(&(rho * payoff_measurement(spec, player)?))
}

/// Same trace with `ρ_f` the probability-weighted sum over pure profiles.
pub fn dense_payoff_mixed(spec: &SchemeSpec, mixed: &MixedProfile, player: usize) -> Result<f64> {
    let eval = Evaluator::new(spec);
    mixed.check(&eval.strategies().counts())?;
    let h = dense_h(spec)?;
    let n = h.nrows();
    let mut rho = DenseMatrix::zeros(n, n);
    for (indices, w) in mixed.support() {
        let r = final_density(spec, &h, &eval.profile(&indices))?;
        rho += r * Complex64::new(w, 0.0);
    }
    real_trace(&(rho * payoff_measurement(spec, player)?))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &DenseMatrix) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_difference(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max over profiles and players of |dense payoff - sparse payoff|.
pub fn compare_paths(spec: &SchemeSpec, profiles: &[PureProfile]) -> Result<f64> {
    let h = dense_h(spec)?;
    let eval = Evaluator::new(spec);
    let measurements = (1..=spec.players)
        .map(|p| payoff_measurement(spec, p))
        .collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for profile in profiles {
        let sparse = eval.payoff(profile)?;
        let rho = final_density(spec, &h, profile)?;
        for (m, s) in measurements.iter().zip(sparse) {
            worst = worst.max((real_trace(&(&rho * m))? - s).abs());
        }
    }
    Ok(worst)
}
