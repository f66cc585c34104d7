//! Hamiltonian spectra and thermal (Gibbs) populations.
//!
//! A [`Spectrum`] is the sorted list of energy eigenvalues of a target or
//! machine Hamiltonian, with the ground energy pinned to zero at construction
//! (an overall shift never changes populations and keeps the Boltzmann
//! exponents bounded). A [`PopulationVector`] carries the diagonal of a state
//! in the energy eigenbasis, index `i` belonging to level `i`.
//!
//! Temperatures enter exclusively through [`InverseTemperature`]; `beta = 0`
//! encodes the infinite-temperature limit exactly, and population inversion
//! (negative beta) is rejected.

use crate::{Error, Result};

/// Tolerance on `|sum - 1|` accepted by [`PopulationVector::new`].
pub const POPULATION_SUM_TOL: f64 = 1e-12;

/// How far outside `[0, 1]` an entry may land before construction fails.
/// Iterated swaps overshoot the interval by a few ulps when a population
/// approaches 0 or 1; such entries are clamped, anything worse is rejected.
pub const POPULATION_ENTRY_TOL: f64 = 1e-12;

/// Sorted energy levels of a Hamiltonian, ground level normalized to zero.
///
/// Degenerate levels are permitted; construction sorts stably so equal
/// energies keep their input order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    levels: Vec<f64>,
}

impl Spectrum {
    /// Build a spectrum from raw energies (any order, any offset).
    pub fn new(mut levels: Vec<f64>) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::TooFewLevels(levels.len()));
        }
        if levels.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFiniteEnergy);
        }
        levels.sort_by(|a, b| a.partial_cmp(b).expect("finite energies"));
        let ground = levels[0];
        if ground != 0.0 {
            for e in levels.iter_mut() {
                *e -= ground;
            }
            // guard against -0.0 and shift round-off on the ground level
            levels[0] = 0.0;
        }
        Ok(Self { levels })
    }

    /// Two-level spectrum `{0, gap}`.
    pub fn qubit(gap: f64) -> Result<Self> {
        if !gap.is_finite() || gap < 0.0 {
            return Err(Error::InvalidGap(gap));
        }
        Self::new(vec![0.0, gap])
    }

    /// Spectrum from successive gaps: levels are the cumulative sums from 0.
    pub fn from_gaps(gaps: &[f64]) -> Result<Self> {
        if let Some(&bad) = gaps.iter().find(|g| !g.is_finite() || **g < 0.0) {
            return Err(Error::InvalidGap(bad));
        }
        let mut levels = Vec::with_capacity(gaps.len() + 1);
        let mut e = 0.0;
        levels.push(e);
        for g in gaps {
            e += g;
            levels.push(e);
        }
        Self::new(levels)
    }

    /// Spectrum of `n` identical non-interacting qubits whose gaps add up to
    /// `total_gap`: level `j * total_gap / n` appears with multiplicity
    /// `C(n, j)`, giving `2^n` levels in total.
    ///
    /// This is the machine family whose virtual-qubit norm is computed by
    /// [`crate::bounds::convergence_rate`].
    pub fn identical_qubits(n: usize, total_gap: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMachine);
        }
        if !total_gap.is_finite() || total_gap < 0.0 {
            return Err(Error::InvalidGap(total_gap));
        }
        let single = total_gap / n as f64;
        let mut levels = Vec::with_capacity(1 << n);
        for mask in 0u64..(1u64 << n) {
            levels.push(mask.count_ones() as f64 * single);
        }
        Self::new(levels)
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    /// Largest energy gap of the spectrum. With the ground level at zero this
    /// is simply the top level.
    pub fn e_max(&self) -> f64 {
        *self.levels.last().expect("len >= 2")
    }

    /// Successive gaps `E_i - E_{i-1}`, `i = 1..dim`.
    pub fn gaps(&self) -> impl Iterator<Item = f64> + '_ {
        self.levels.windows(2).map(|w| w[1] - w[0])
    }
}

/// Inverse temperature `beta >= 0` (units with `k_B = 1`). `beta = 0` is the
/// infinite-temperature limit.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct InverseTemperature(f64);

impl InverseTemperature {
    pub fn new(beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::InvalidBeta(beta));
        }
        Ok(Self(beta))
    }

    /// The `T -> infinity` limit, encoded as `beta = 0` exactly.
    pub fn infinite_temperature() -> Self {
        Self(0.0)
    }

    pub fn beta(self) -> f64 {
        self.0
    }

    pub fn is_infinite_temperature(self) -> bool {
        self.0 == 0.0
    }
}

/// Probabilities over energy eigenstates, index `i` belonging to level `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationVector {
    probs: Vec<f64>,
}

impl PopulationVector {
    /// Validates that every entry is in `[0, 1]` (up to
    /// [`POPULATION_ENTRY_TOL`] of overshoot, which is clamped) and the total
    /// is 1 within [`POPULATION_SUM_TOL`].
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = probs
            .iter()
            .find(|p| !(-POPULATION_ENTRY_TOL..=1.0 + POPULATION_ENTRY_TOL).contains(*p))
        {
            return Err(Error::PopulationOutOfRange(bad));
        }
        for p in probs.iter_mut() {
            *p = p.clamp(0.0, 1.0);
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > POPULATION_SUM_TOL {
            return Err(Error::Unnormalized(sum));
        }
        Ok(Self { probs })
    }

    /// The maximally mixed state on `dim` levels.
    pub fn uniform(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::TooFewLevels(0));
        }
        Self::new(vec![1.0 / dim as f64; dim])
    }

    /// All population on the ground level.
    pub fn pure_ground(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::TooFewLevels(0));
        }
        let mut probs = vec![0.0; dim];
        probs[0] = 1.0;
        Self::new(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    /// Ground-level population.
    pub fn ground(&self) -> f64 {
        self.probs[0]
    }

    /// Max-norm distance to another vector of the same dimension.
    pub fn max_norm_distance(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// A machine together with its hot-bath extension: `base` is rethermalised at
/// the environment temperature every cycle, while the extension qubits are
/// rethermalised at the hot-bath temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct MachineSpec {
    base: Spectrum,
    extension_gaps: Vec<f64>,
}

impl MachineSpec {
    pub fn new(base: Spectrum, extension_gaps: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = extension_gaps.iter().find(|g| !g.is_finite() || **g < 0.0) {
            return Err(Error::InvalidGap(bad));
        }
        Ok(Self {
            base,
            extension_gaps,
        })
    }

    pub fn base(&self) -> &Spectrum {
        &self.base
    }

    /// Gaps of the extension qubits, one per successive target level pair.
    pub fn extension_gaps(&self) -> &[f64] {
        &self.extension_gaps
    }

    /// Target dimension this extension was built for.
    pub fn target_dim(&self) -> usize {
        self.extension_gaps.len() + 1
    }
}

/// Gibbs populations of `spec` at inverse temperature `beta`.
///
/// Entries are non-increasing with energy and strictly positive for finite
/// beta. The partition sum is evaluated with the max-exponent subtracted,
/// which keeps the weights in `[0, 1]` for any `beta * E`.
pub fn thermal_state(spec: &Spectrum, beta: InverseTemperature) -> PopulationVector {
    let b = beta.beta();
    let m = spec
        .levels()
        .iter()
        .map(|e| -b * e)
        .fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = spec.levels().iter().map(|e| (-b * e - m).exp()).collect();
    let z: f64 = weights.iter().sum();
    PopulationVector::new(weights.into_iter().map(|w| w / z).collect())
        .expect("normalized Boltzmann weights")
}

/// Joint populations of a product state, target index major:
/// `out[i * d_M + j] = a[i] * b[j]`.
pub fn tensor(a: &PopulationVector, b: &PopulationVector) -> PopulationVector {
    let mut probs = Vec::with_capacity(a.dim() * b.dim());
    for &pa in a.probs() {
        for &pb in b.probs() {
            probs.push(pa * pb);
        }
    }
    PopulationVector::new(probs).expect("product of normalized vectors")
}

/// Trace out the machine factor of a joint vector laid out target-major:
/// `out[i] = sum_j joint[i * d_M + j]`.
pub fn partial_trace_machine(
    joint: &PopulationVector,
    d_s: usize,
    d_m: usize,
) -> Result<PopulationVector> {
    if d_s == 0 || d_m == 0 || joint.dim() != d_s * d_m {
        return Err(Error::DimensionMismatch {
            expected: d_s * d_m,
            got: joint.dim(),
        });
    }
    let probs = joint
        .probs()
        .chunks(d_m)
        .map(|block| block.iter().sum())
        .collect();
    PopulationVector::new(probs)
}

/// Extend `machine` with one qubit per successive target level pair, of gap
/// `e_max - (E_i - E_{i-1})`. The extension makes every max-swap between the
/// target pair and the machine's largest gap energy preserving.
///
/// A target gap larger than the machine's largest gap would need a negative
/// extension gap and is rejected.
pub fn extend_machine(target: &Spectrum, machine: &Spectrum) -> Result<MachineSpec> {
    let e_max = machine.e_max();
    let mut extension_gaps = Vec::with_capacity(target.dim() - 1);
    for (i, gap) in target.gaps().enumerate() {
        let ext = e_max - gap;
        if ext < 0.0 {
            return Err(Error::ExtensionGapNegative {
                index: i + 1,
                prev: i,
                gap,
                e_max,
            });
        }
        extension_gaps.push(ext);
    }
    MachineSpec::new(machine.clone(), extension_gaps)
}
