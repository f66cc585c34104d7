//! Numerical toolkit for cooling bounds of finite quantum thermal machines.
//!
//! A target system (diagonal populations over an energy spectrum) is cooled by
//! cyclically coupling it to a finite machine that is rethermalised between
//! cycles. The largest energy gap of the machine fixes a universal limit on
//! how cold the target can get, no matter how the cycles are driven: in the
//! infinite-cycle limit the target's eigenvalue vector is majorized by a
//! geometric "coldest" state whose successive-level population ratio is the
//! machine's Gibbs ratio `g = exp(-beta_R * e_max)`.
//!
//! The crate implements
//!
//! - construction of spectra and Gibbs populations ([`spectra`]),
//! - majorization predicates and Schur functionals used to certify cooling
//!   in every notion at once ([`majorization`]),
//! - the closed-form bound quantities and convergence rates ([`bounds`]),
//! - the three cycle maps — optimal coherent, coherent max-swap, incoherent
//!   max-swap on an extended machine — with fixed-point iteration and
//!   per-cycle certification ([`protocols`]),
//! - brute-force verifiers trusted over the protocol code on small instances
//!   ([`oracle`]).
//!
//! All state vectors are classical probability vectors over energy levels;
//! coherences never appear (the cooling task is diagonal-preserving), so the
//! whole simulation runs on plain `f64` vectors.

use thiserror::Error;

pub mod bounds;
pub mod majorization;
pub mod oracle;
pub mod protocols;
pub mod spectra;

pub use bounds::{
    bound_set, convergence_rate, gibbs_ratio, p0_star, rho_star, BoundSet, ConvergenceRate,
};
pub use majorization::{
    majorization_deficit, majorizes, passive_rearrange, schur_functionals, sort_desc,
    SchurFunctionals, SortedEigenvalues, MAJORIZATION_TOL,
};
pub use protocols::{
    coherent_max_swap_step, delta_i, incoherent_delta_i, incoherent_max_swap_step, iterate,
    optimal_coherent_step, three_qubit_incoherent_swap, ConvergenceReport, CycleTrace,
    IterateConfig, Protocol, StepResult,
};
pub use spectra::{
    extend_machine, partial_trace_machine, tensor, thermal_state, InverseTemperature, MachineSpec,
    PopulationVector, Spectrum,
};

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("spectrum needs at least 2 levels, got {0}")]
    TooFewLevels(usize),
    #[error("spectrum contains a non-finite energy")]
    NonFiniteEnergy,
    #[error("energy gap must be finite and non-negative, got {0}")]
    InvalidGap(f64),
    #[error("inverse temperature must be finite and non-negative, got {0}")]
    InvalidBeta(f64),
    #[error("population {0} lies outside [0, 1]")]
    PopulationOutOfRange(f64),
    #[error("populations sum to {0}, expected 1 within 1e-12")]
    Unnormalized(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("target gap {gap} between levels {index} and {prev} exceeds the machine's largest gap {e_max}")]
    ExtensionGapNegative {
        index: usize,
        prev: usize,
        gap: f64,
        e_max: f64,
    },
    #[error("swap index {index} outside 1..{dim}")]
    SwapIndexOutOfRange { index: usize, dim: usize },
    #[error("partial-sum order {k} outside 1..={d_s}")]
    PartialSumOutOfRange { k: usize, d_s: usize },
    #[error("target gap must be positive")]
    ZeroTargetGap,
    #[error(
        "steady-state inverse temperature is negative ({0}); hot bath is too cold for this machine"
    )]
    NegativeSteadyStateBeta(f64),
    #[error("joint dimension {dim} exceeds the exhaustive permutation budget {budget}")]
    PermutationBudgetExceeded { dim: usize, budget: usize },
    #[error("iteration tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("max_cycles must be at least 1")]
    ZeroMaxCycles,
    #[error("incoherent protocol requires a hot-bath temperature")]
    MissingHotBath,
    #[error("extension has {got} qubits but a {d_s}-level target needs {need}")]
    ExtensionMismatch { got: usize, d_s: usize, need: usize },
    #[error("operation requires a qubit, got dimension {0}")]
    NotAQubit(usize),
    #[error("virtual-qubit machine needs at least 1 qubit")]
    EmptyMachine,
}

pub type Result<T> = std::result::Result<T, Error>;
