//! Majorization predicates, passive rearrangement, and Schur functionals.
//!
//! `a` majorizes `b` (written `a ≻ b`) when every partial sum of `a`'s
//! entries sorted in non-increasing order dominates the corresponding partial
//! sum of `b`'s. This single ordering certifies cooling in every usual sense
//! at once: any Schur-convex functional (purity, largest population) can only
//! grow and any Schur-concave one (entropy) can only shrink along it.

use crate::spectra::{PopulationVector, Spectrum};
use crate::{Error, Result};

/// Default absolute tolerance on partial sums, sized for double-precision
/// accumulation over dimensions up to ~10^3.
pub const MAJORIZATION_TOL: f64 = 1e-12;

/// Eigenvalues sorted in non-increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedEigenvalues {
    vals: Vec<f64>,
}

impl SortedEigenvalues {
    pub fn vals(&self) -> &[f64] {
        &self.vals
    }

    pub fn source_dim(&self) -> usize {
        self.vals.len()
    }

    /// Partial sums of the leading `k` entries, `k = 1..=dim`.
    pub fn partial_sums(&self) -> Vec<f64> {
        self.vals
            .iter()
            .scan(0.0, |acc, v| {
                *acc += v;
                Some(*acc)
            })
            .collect()
    }
}

/// Sort populations in non-increasing order. The sort is stable, so ties keep
/// their original (energy) order and repeated runs produce identical output.
pub fn sort_desc(p: &PopulationVector) -> SortedEigenvalues {
    let mut vals = p.probs().to_vec();
    vals.sort_by(|a, b| b.partial_cmp(a).expect("populations are finite"));
    SortedEigenvalues { vals }
}

/// How far `b`'s partial sums overshoot `a`'s: the largest value of
/// `sum_k(b) - sum_k(a)`. Non-positive means `a` majorizes `b` exactly.
pub fn majorization_deficit(a: &SortedEigenvalues, b: &SortedEigenvalues) -> Result<f64> {
    if a.source_dim() != b.source_dim() {
        return Err(Error::DimensionMismatch {
            expected: a.source_dim(),
            got: b.source_dim(),
        });
    }
    let mut sum_a = 0.0;
    let mut sum_b = 0.0;
    let mut worst = f64::NEG_INFINITY;
    for (x, y) in a.vals.iter().zip(&b.vals) {
        sum_a += x;
        sum_b += y;
        worst = worst.max(sum_b - sum_a);
    }
    Ok(worst)
}

/// Whether `a ≻ b`: every partial sum of `a` at least matches the
/// corresponding partial sum of `b` up to the absolute tolerance `tol`.
pub fn majorizes(a: &SortedEigenvalues, b: &SortedEigenvalues, tol: f64) -> Result<bool> {
    Ok(majorization_deficit(a, b)? <= tol)
}

/// Rearrange populations so they are non-increasing with energy: the passive
/// state with the same eigenvalues, from which no unitary can extract energy.
pub fn passive_rearrange(p: &PopulationVector) -> PopulationVector {
    PopulationVector::new(sort_desc(p).vals).expect("permutation of a valid vector")
}

/// Energy-order counterpart of [`majorization_deficit`]: the largest value of
/// `sum_k(b) - sum_k(a)` over prefixes in level order, without sorting.
///
/// This is the monotone quantity of protocols that cannot passivize: each of
/// their swaps moves population toward lower levels, so level-order prefix
/// sums never decrease even when sorted partial sums do.
pub fn prefix_sum_deficit(a: &PopulationVector, b: &PopulationVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let mut sum_a = 0.0;
    let mut sum_b = 0.0;
    let mut worst = f64::NEG_INFINITY;
    for (x, y) in a.probs().iter().zip(b.probs()) {
        sum_a += x;
        sum_b += y;
        worst = worst.max(sum_b - sum_a);
    }
    Ok(worst)
}

/// The functionals through which the cooling bound is stated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchurFunctionals {
    /// Population of the ground level (energy order, not sorted order).
    pub ground_pop: f64,
    /// Shannon/von Neumann entropy in nats, with `0 ln 0 := 0`.
    pub entropy: f64,
    /// Sum of squared populations.
    pub purity: f64,
    /// `sum_i p_i E_i`.
    pub mean_energy: f64,
}

pub fn schur_functionals(p: &PopulationVector, spec: &Spectrum) -> Result<SchurFunctionals> {
    if p.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: p.dim(),
        });
    }
    let mut entropy = 0.0;
    let mut purity = 0.0;
    let mut mean_energy = 0.0;
    for (&pi, &ei) in p.probs().iter().zip(spec.levels()) {
        if pi > 0.0 {
            entropy -= pi * pi.ln();
        }
        purity += pi * pi;
        mean_energy += pi * ei;
    }
    Ok(SchurFunctionals {
        ground_pop: p.ground(),
        entropy,
        purity,
        mean_energy,
    })
}
