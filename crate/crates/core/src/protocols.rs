//! Cooling cycle maps and their fixed-point iteration.
//!
//! Three cycle maps act on the target populations, each with the machine
//! freshly rethermalised at the start of the cycle:
//!
//! - **Optimal coherent**: the joint target-machine populations are reordered
//!   so the largest values fill the lowest target levels; the machine is then
//!   traced out. Per cycle this maximizes every partial sum simultaneously.
//! - **Coherent max-swap**: only the machine's largest-gap virtual qubit is
//!   used. Among the swaps between successive target level pairs and that
//!   virtual qubit, the one moving the most population downward is applied.
//!   The target is kept passive before and after.
//! - **Incoherent max-swap**: the same swap made energy preserving by an
//!   extension qubit per target pair, rethermalised at the hot-bath
//!   temperature. The target is kept in energy order throughout; no
//!   passivization is applied because the reordering unitary need not
//!   conserve energy.
//!
//! Every swap moves population `delta > 0` from a level to the one below it,
//! so each map's monotone functional never decreases — sorted partial sums
//! for the passivized coherent maps, level-order prefix sums for the
//! incoherent one — and iteration converges. [`iterate`] certifies that
//! monotonicity and the universal bound on every cycle.

use crate::bounds::rho_star;
use crate::majorization::{
    majorizes, passive_rearrange, prefix_sum_deficit, schur_functionals, sort_desc,
    SchurFunctionals, SortedEigenvalues, MAJORIZATION_TOL,
};
use crate::spectra::{
    extend_machine, partial_trace_machine, tensor, thermal_state, InverseTemperature, MachineSpec,
    PopulationVector, Spectrum,
};
use crate::{Error, Result};

/// Absolute tolerance on partial sums when checking states against the
/// universal bound per cycle.
pub const BOUND_CHECK_TOL: f64 = 1e-10;

/// The three cycle maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    OptimalCoherent,
    CoherentMaxSwap,
    IncoherentMaxSwap,
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Protocol::OptimalCoherent => "optimal-coherent",
            Protocol::CoherentMaxSwap => "coherent-max-swap",
            Protocol::IncoherentMaxSwap => "incoherent-max-swap",
        };
        f.write_str(name)
    }
}

/// Outcome of a single max-swap cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub state: PopulationVector,
    /// Target pair that was swapped with the virtual qubit; 0 when no swap
    /// had positive gain.
    pub chosen_index: usize,
    /// Population moved to the lower level of the pair; 0 when
    /// `chosen_index` is 0.
    pub delta: f64,
}

/// One cycle of the optimal coherent map: sort the joint populations in
/// non-increasing order, fill the joint levels lexicographically (target
/// index major), trace out the machine. The output is passive.
pub fn optimal_coherent_step(
    rho_s: &PopulationVector,
    machine: &Spectrum,
    beta_r: InverseTemperature,
) -> PopulationVector {
    let tau = thermal_state(machine, beta_r);
    let joint = tensor(rho_s, &tau);
    let sorted = sort_desc(&joint);
    let reordered =
        PopulationVector::new(sorted.vals().to_vec()).expect("sorted joint stays normalized");
    partial_trace_machine(&reordered, rho_s.dim(), machine.dim())
        .expect("dimensions fixed by construction")
}

/// Population gained by level `i - 1` when the target pair `{i-1, i}` is
/// swapped with the machine's largest-gap virtual qubit:
/// `p[i] * t[0] - p[i-1] * t[d_M - 1]`.
///
/// `rho_s` must already be passive; its entries are then its sorted
/// eigenvalues.
pub fn delta_i(
    rho_s: &PopulationVector,
    machine_thermal: &SortedEigenvalues,
    i: usize,
) -> Result<f64> {
    let d_s = rho_s.dim();
    if i == 0 || i >= d_s {
        return Err(Error::SwapIndexOutOfRange { index: i, dim: d_s });
    }
    let p = rho_s.probs();
    let t = machine_thermal.vals();
    Ok(p[i] * t[0] - p[i - 1] * t[t.len() - 1])
}

/// Incoherent analogue of [`delta_i`]: the swap is mediated by the thermal
/// extension qubit `hot_qubit` that bridges the energy mismatch, so its
/// populations weight the two directions. `rho_s` is taken in energy order.
pub fn incoherent_delta_i(
    rho_s: &PopulationVector,
    machine_thermal: &SortedEigenvalues,
    hot_qubit: &PopulationVector,
    i: usize,
) -> Result<f64> {
    let d_s = rho_s.dim();
    if i == 0 || i >= d_s {
        return Err(Error::SwapIndexOutOfRange { index: i, dim: d_s });
    }
    if hot_qubit.dim() != 2 {
        return Err(Error::NotAQubit(hot_qubit.dim()));
    }
    let p = rho_s.probs();
    let t = machine_thermal.vals();
    let h = hot_qubit.probs();
    Ok(p[i] * t[0] * h[1] - p[i - 1] * t[t.len() - 1] * h[0])
}

/// Pick the swap with the largest positive gain; smallest index wins ties
/// and 0 signals that no swap gains. `gain[i-1]`/`loss[i-1]` multiply
/// `p[i]`/`p[i-1]` for pair `i`.
fn pick_swap(p: &[f64], gain: &[f64], loss: &[f64]) -> (usize, f64) {
    let (chosen, best) = max_pair_gain(p, gain, loss);
    if best > 0.0 {
        (chosen, best)
    } else {
        (0, 0.0)
    }
}

fn apply_swap(p: &mut [f64], chosen: usize, delta: f64) {
    if chosen > 0 {
        p[chosen - 1] += delta;
        p[chosen] -= delta;
    }
}

/// One cycle of the coherent max-swap map: passivize, apply the most
/// favourable virtual-qubit swap (identity if none gains), passivize again.
pub fn coherent_max_swap_step(
    rho_s: &PopulationVector,
    machine: &Spectrum,
    beta_r: InverseTemperature,
) -> StepResult {
    let tau = thermal_state(machine, beta_r);
    let t = tau.probs();
    let (t0, t_top) = (t[0], t[t.len() - 1]);
    let passive = passive_rearrange(rho_s);
    let mut p = passive.probs().to_vec();
    let gain = vec![t0; p.len() - 1];
    let loss = vec![t_top; p.len() - 1];
    let (chosen, delta) = pick_swap(&p, &gain, &loss);
    apply_swap(&mut p, chosen, delta);
    let state = passive_rearrange(
        &PopulationVector::new(p).expect("swap moves population between two levels"),
    );
    StepResult {
        state,
        chosen_index: chosen,
        delta,
    }
}

/// One cycle of the incoherent max-swap map on the extended machine. The
/// state stays in energy order; machine and extension qubits are implicitly
/// rethermalised (at `beta_r` and `beta_h` respectively) every cycle.
pub fn incoherent_max_swap_step(
    rho_s: &PopulationVector,
    mspec: &MachineSpec,
    beta_r: InverseTemperature,
    beta_h: InverseTemperature,
) -> Result<StepResult> {
    let d_s = rho_s.dim();
    if mspec.target_dim() != d_s {
        return Err(Error::ExtensionMismatch {
            got: mspec.extension_gaps().len(),
            d_s,
            need: d_s - 1,
        });
    }
    let tau = thermal_state(mspec.base(), beta_r);
    let t = tau.probs();
    let (t0, t_top) = (t[0], t[t.len() - 1]);
    let mut gain = Vec::with_capacity(d_s - 1);
    let mut loss = Vec::with_capacity(d_s - 1);
    for &f_gap in mspec.extension_gaps() {
        let hot = thermal_state(&Spectrum::qubit(f_gap)?, beta_h);
        gain.push(t0 * hot.probs()[1]);
        loss.push(t_top * hot.probs()[0]);
    }
    let mut p = rho_s.probs().to_vec();
    let (chosen, delta) = pick_swap(&p, &gain, &loss);
    apply_swap(&mut p, chosen, delta);
    Ok(StepResult {
        state: PopulationVector::new(p)?,
        chosen_index: chosen,
        delta,
    })
}

/// Swap the joint populations of `|010>` and `|101>` of a
/// target-machine-ancilla qubit triple and return the target marginal.
///
/// This is the elementary cycle of the smallest incoherent refrigerator: the
/// ancilla gap `E_M - E_S` makes the two joint levels degenerate, so the swap
/// is energy preserving.
pub fn three_qubit_incoherent_swap(
    p_s: &PopulationVector,
    p_m: &PopulationVector,
    p_a: &PopulationVector,
) -> Result<PopulationVector> {
    for p in [p_s, p_m, p_a] {
        if p.dim() != 2 {
            return Err(Error::NotAQubit(p.dim()));
        }
    }
    let joint = tensor(p_s, &tensor(p_m, p_a));
    let mut j = joint.probs().to_vec();
    j.swap(0b010, 0b101);
    partial_trace_machine(&PopulationVector::new(j)?, 2, 4)
}

/// Stopping rule and bookkeeping for [`iterate`].
#[derive(Debug, Clone, PartialEq)]
pub struct IterateConfig {
    /// Convergence threshold: stop when successive states differ by less
    /// than this in max-norm and every residual swap gain is at most this.
    pub tolerance: f64,
    /// Hard cap on cycles; hitting it reports `converged = false`.
    pub max_cycles: usize,
    /// Whether to keep per-cycle traces (memory scales with cycles run).
    pub collect_traces: bool,
}

impl Default for IterateConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_cycles: 1_000_000,
            collect_traces: true,
        }
    }
}

/// Per-cycle record of a cooling run.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleTrace {
    pub cycle_index: usize,
    pub state_before: PopulationVector,
    pub state_after: PopulationVector,
    /// Swapped pair (0 = no swap this cycle; always 0 for the optimal
    /// coherent map, which is not a single swap).
    pub chosen_index: usize,
    /// Population moved; 0 when `chosen_index` is 0.
    pub delta: f64,
    /// Functionals of `state_after` on the target spectrum.
    pub functionals: SchurFunctionals,
    /// Sorted `state_after` is majorized by the universal bound state within
    /// [`BOUND_CHECK_TOL`].
    pub bound_ok: bool,
}

/// Summary of a cooling run.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// Last state reached, in energy order.
    pub final_state: PopulationVector,
    /// Number of cycles that changed the state.
    pub cycles: usize,
    /// Whether the stopping rule fired before `max_cycles`.
    pub converged: bool,
    /// Largest remaining swap gain at the final state (non-positive at an
    /// exact fixed point).
    pub max_residual_delta: f64,
    /// Max-norm distance from the final state to the universal bound state.
    pub distance_to_bound: f64,
    /// Whether the initial state was majorized by the bound state; the
    /// per-cycle bound checks are only guaranteed when it was.
    pub initial_within_bound: bool,
    /// Cycles whose state failed the bound check.
    pub bound_violations: usize,
    /// Cycles whose monotone functional decreased: sorted partial sums for
    /// the coherent maps, level-order prefix sums for the incoherent map
    /// (which is never passivized, so its swaps on population-inverted pairs
    /// legitimately shrink sorted sums).
    pub monotonicity_violations: usize,
    /// Set when a hot bath colder than the environment (`beta_h > beta_r`)
    /// was accepted; outside the machine's intended regime.
    pub hot_bath_flagged: bool,
}

/// Rethermalization redraws the same Gibbs vectors every cycle, so the swap
/// coefficients are fixed for a whole run and cached here.
enum CycleMap {
    Optimal {
        tau: PopulationVector,
        gain: Vec<f64>,
        loss: Vec<f64>,
    },
    Swap {
        passivize: bool,
        gain: Vec<f64>,
        loss: Vec<f64>,
    },
}

/// Signed maximum of the pair gains `p[i] * gain[i-1] - p[i-1] * loss[i-1]`
/// and its index; negative everywhere exactly at a fixed point.
fn max_pair_gain(p: &[f64], gain: &[f64], loss: &[f64]) -> (usize, f64) {
    let mut best = f64::NEG_INFINITY;
    let mut chosen = 1;
    for i in 1..p.len() {
        let d = p[i] * gain[i - 1] - p[i - 1] * loss[i - 1];
        if d > best {
            best = d;
            chosen = i;
        }
    }
    (chosen, best)
}

impl CycleMap {
    fn step(&self, state: &PopulationVector) -> Result<StepResult> {
        match self {
            CycleMap::Optimal { tau, .. } => {
                let joint = tensor(state, tau);
                let sorted = sort_desc(&joint);
                let reordered = PopulationVector::new(sorted.vals().to_vec())?;
                Ok(StepResult {
                    state: partial_trace_machine(&reordered, state.dim(), tau.dim())?,
                    chosen_index: 0,
                    delta: 0.0,
                })
            }
            CycleMap::Swap {
                passivize,
                gain,
                loss,
            } => {
                let mut p = if *passivize {
                    sort_desc(state).vals().to_vec()
                } else {
                    state.probs().to_vec()
                };
                let (idx, best) = max_pair_gain(&p, gain, loss);
                let (chosen, delta) = if best > 0.0 { (idx, best) } else { (0, 0.0) };
                apply_swap(&mut p, chosen, delta);
                if *passivize {
                    p.sort_by(|a, b| b.partial_cmp(a).expect("finite populations"));
                }
                Ok(StepResult {
                    state: PopulationVector::new(p)?,
                    chosen_index: chosen,
                    delta,
                })
            }
        }
    }

    /// Largest remaining swap gain, the residual that vanishes at a fixed
    /// point. Coherent maps measure it on the passive rearrangement.
    fn max_residual(&self, state: &PopulationVector) -> f64 {
        match self {
            CycleMap::Optimal { gain, loss, .. } => {
                let passive = sort_desc(state);
                max_pair_gain(passive.vals(), gain, loss).1
            }
            CycleMap::Swap {
                passivize: true,
                gain,
                loss,
            } => {
                let passive = sort_desc(state);
                max_pair_gain(passive.vals(), gain, loss).1
            }
            CycleMap::Swap { gain, loss, .. } => max_pair_gain(state.probs(), gain, loss).1,
        }
    }
}

/// Run a cycle map to its fixed point.
///
/// Stops when successive states differ by less than `config.tolerance` in
/// max-norm and every residual swap gain is at most the tolerance, or at
/// `config.max_cycles` (reported as `converged = false`, never an error).
/// `beta_h` is required for the incoherent map and ignored otherwise.
pub fn iterate(
    protocol: Protocol,
    target: &Spectrum,
    machine: &Spectrum,
    beta_r: InverseTemperature,
    beta_h: Option<InverseTemperature>,
    initial: &PopulationVector,
    config: &IterateConfig,
) -> Result<(ConvergenceReport, Vec<CycleTrace>)> {
    if config.tolerance <= 0.0 || !config.tolerance.is_finite() {
        return Err(Error::InvalidTolerance(config.tolerance));
    }
    if config.max_cycles == 0 {
        return Err(Error::ZeroMaxCycles);
    }
    if initial.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: target.dim(),
            got: initial.dim(),
        });
    }

    let mut hot_bath_flagged = false;
    let tau = thermal_state(machine, beta_r);
    let (t0, t_top) = (tau.probs()[0], tau.probs()[tau.dim() - 1]);
    let pairs = target.dim() - 1;
    let map = match protocol {
        Protocol::OptimalCoherent => CycleMap::Optimal {
            tau,
            gain: vec![t0; pairs],
            loss: vec![t_top; pairs],
        },
        Protocol::CoherentMaxSwap => CycleMap::Swap {
            passivize: true,
            gain: vec![t0; pairs],
            loss: vec![t_top; pairs],
        },
        Protocol::IncoherentMaxSwap => {
            let beta_h = beta_h.ok_or(Error::MissingHotBath)?;
            hot_bath_flagged = beta_h.beta() > beta_r.beta();
            let mspec = extend_machine(target, machine)?;
            let mut gain = Vec::with_capacity(pairs);
            let mut loss = Vec::with_capacity(pairs);
            for &f_gap in mspec.extension_gaps() {
                let hot = thermal_state(&Spectrum::qubit(f_gap)?, beta_h);
                gain.push(t0 * hot.probs()[1]);
                loss.push(t_top * hot.probs()[0]);
            }
            CycleMap::Swap {
                passivize: false,
                gain,
                loss,
            }
        }
    };

    let bound = rho_star(target.dim(), beta_r, machine.e_max())?;
    let bound_sorted = sort_desc(&bound);
    let initial_within_bound = majorizes(&bound_sorted, &sort_desc(initial), BOUND_CHECK_TOL)?;

    let mut state = initial.clone();
    let mut traces = Vec::new();
    let mut cycles = 0;
    let mut converged = false;
    let mut bound_violations = 0;
    let mut monotonicity_violations = 0;
    let mut max_residual_delta = map.max_residual(&state);

    for cycle_index in 1..=config.max_cycles {
        let step = map.step(&state)?;
        let diff = state.max_norm_distance(&step.state)?;
        let sorted_after = sort_desc(&step.state);
        let monotone = match protocol {
            Protocol::OptimalCoherent | Protocol::CoherentMaxSwap => {
                majorizes(&sorted_after, &sort_desc(&state), MAJORIZATION_TOL)?
            }
            Protocol::IncoherentMaxSwap => {
                prefix_sum_deficit(&step.state, &state)? <= MAJORIZATION_TOL
            }
        };
        let bound_ok = majorizes(&bound_sorted, &sorted_after, BOUND_CHECK_TOL)?;
        if !monotone {
            monotonicity_violations += 1;
        }
        if !bound_ok {
            bound_violations += 1;
        }
        if config.collect_traces {
            traces.push(CycleTrace {
                cycle_index,
                state_before: state.clone(),
                state_after: step.state.clone(),
                chosen_index: step.chosen_index,
                delta: step.delta,
                functionals: schur_functionals(&step.state, target)?,
                bound_ok,
            });
        }
        // changes below the stopping resolution are numerical noise, not cycles
        if diff >= config.tolerance {
            cycles += 1;
        }
        state = step.state;
        max_residual_delta = map.max_residual(&state);
        if diff < config.tolerance && max_residual_delta <= config.tolerance {
            converged = true;
            break;
        }
    }

    let report = ConvergenceReport {
        distance_to_bound: state.max_norm_distance(&bound)?,
        final_state: state,
        cycles,
        converged,
        max_residual_delta,
        initial_within_bound,
        bound_violations,
        monotonicity_violations,
        hot_bath_flagged,
    };
    Ok((report, traces))
}
