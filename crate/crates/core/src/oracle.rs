//! Brute-force verifiers for the optimality and bound claims.
//!
//! These are deliberately naive: exhaustive permutation search on small joint
//! dimensions and randomized falsification above that, trusted over the
//! protocol implementations they check.
//!
//! Floating-point sums depend on summation order, so every candidate score is
//! computed canonically — the selected entries are sorted in non-increasing
//! order and summed left to right. Two selections of the same multiset then
//! score bit-identically, which makes "maximum over permutations equals the
//! sorted top sum" an exact equality rather than a tolerance check.

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::majorization::{majorization_deficit, sort_desc};
use crate::protocols::{iterate, IterateConfig, Protocol};
use crate::spectra::{tensor, thermal_state, InverseTemperature, PopulationVector, Spectrum};
use crate::{Error, Result};

/// Largest joint dimension enumerated exhaustively (8! = 40320 permutations).
pub const EXHAUSTIVE_DIM_BUDGET: usize = 8;

fn canonical_sum(mut selected: Vec<f64>) -> f64 {
    selected.sort_by(|a, b| b.partial_cmp(a).expect("finite populations"));
    selected.iter().sum()
}

/// Maximum over all permutations of `joint` of the canonical sum of the first
/// `cnt` entries. Errors when the dimension exceeds the exhaustive budget.
pub fn max_permuted_partial_sum(joint: &PopulationVector, cnt: usize) -> Result<f64> {
    let n = joint.dim();
    if n > EXHAUSTIVE_DIM_BUDGET {
        return Err(Error::PermutationBudgetExceeded {
            dim: n,
            budget: EXHAUSTIVE_DIM_BUDGET,
        });
    }
    if cnt == 0 || cnt > n {
        return Err(Error::PartialSumOutOfRange { k: cnt, d_s: n });
    }
    let vals = joint.probs();
    let mut best = f64::NEG_INFINITY;
    for perm in (0..n).permutations(n) {
        let selected: Vec<f64> = perm[..cnt].iter().map(|&i| vals[i]).collect();
        best = best.max(canonical_sum(selected));
    }
    Ok(best)
}

/// Randomized counterpart of [`max_permuted_partial_sum`] for dimensions over
/// the exhaustive budget: the maximum over `samples` random permutations.
/// A lower bound only — useful to falsify optimality claims, never to prove
/// them.
pub fn random_permuted_partial_sum(
    joint: &PopulationVector,
    cnt: usize,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let n = joint.dim();
    if cnt == 0 || cnt > n {
        return Err(Error::PartialSumOutOfRange { k: cnt, d_s: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    let vals = joint.probs();
    let mut best = f64::NEG_INFINITY;
    for _ in 0..samples {
        idx.shuffle(&mut rng);
        let selected: Vec<f64> = idx[..cnt].iter().map(|&i| vals[i]).collect();
        best = best.max(canonical_sum(selected));
    }
    Ok(best)
}

/// Best reachable `k`-th partial sum of the target after one cycle, found by
/// exhaustive search: the maximum over all permutations of the joint
/// target-machine populations of the sum of the first `k * d_M` joint
/// entries (target-major layout).
pub fn best_permutation_cooling(
    rho_s: &PopulationVector,
    machine: &Spectrum,
    beta_r: InverseTemperature,
    k: usize,
) -> Result<f64> {
    let d_s = rho_s.dim();
    if k == 0 || k > d_s {
        return Err(Error::PartialSumOutOfRange { k, d_s });
    }
    let joint = tensor(rho_s, &thermal_state(machine, beta_r));
    max_permuted_partial_sum(&joint, k * machine.dim())
}

/// Canonical sum of the `cnt` largest joint populations — the closed-form
/// value the permutation maximum is predicted to equal.
pub fn sorted_joint_partial_sum(
    rho_s: &PopulationVector,
    machine: &Spectrum,
    beta_r: InverseTemperature,
    k: usize,
) -> Result<f64> {
    let d_s = rho_s.dim();
    if k == 0 || k > d_s {
        return Err(Error::PartialSumOutOfRange { k, d_s });
    }
    let joint = tensor(rho_s, &thermal_state(machine, beta_r));
    let sorted = sort_desc(&joint);
    Ok(sorted.vals()[..k * machine.dim()].iter().sum())
}

/// Configuration of a randomized bound-verification campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub trials: usize,
    pub max_target_dim: usize,
    pub max_machine_dim: usize,
    pub seed: u64,
    /// A final state whose sorted partial sums exceed the bound state's by
    /// more than this counts as a violation.
    pub majorization_tol: f64,
    pub iterate: IterateConfig,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            max_target_dim: 4,
            max_machine_dim: 6,
            seed: 0,
            majorization_tol: 1e-10,
            // finite hot baths can make the incoherent map contract at a rate
            // of 1e-7 or worse per cycle; the bound holds at every cycle, so
            // campaigns cap the cycle count and report non-convergence
            // instead of waiting out the tail
            iterate: IterateConfig {
                collect_traces: false,
                max_cycles: 50_000,
                ..IterateConfig::default()
            },
        }
    }
}

/// Outcome of a bound-verification campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignReport {
    pub trials: usize,
    /// Total protocol runs (three per trial).
    pub runs: usize,
    /// Runs whose converged state failed to be majorized by the bound state.
    pub violations: usize,
    /// Largest bound overshoot seen across all runs; negative means every
    /// run stayed inside the bound with that margin to spare.
    pub worst_margin: f64,
    /// Largest max-norm gap to the bound state among runs expected to attain
    /// it (both coherent maps, and the incoherent map with an
    /// infinite-temperature hot bath).
    pub max_attainment_gap: f64,
    pub non_converged: usize,
}

/// Random spectra use gaps uniform in `(0, 2]` for the machine; target gaps
/// are drawn uniform in `(0, e_max]` so the thermal initial state starts
/// inside the bound and the machine extension stays valid.
fn sample_gap(rng: &mut ChaCha8Rng, upper: f64) -> f64 {
    upper * (1.0 - rng.gen::<f64>())
}

/// Run every protocol to convergence on random instances, starting from the
/// target thermal state at the environment temperature, and check each final
/// sorted state against the universal bound state.
///
/// Trials draw from per-trial RNG streams derived from the master seed, so a
/// repeated run with the same configuration is bit-identical. Violations are
/// counted, never thrown.
pub fn verify_bound_random(config: &CampaignConfig) -> Result<CampaignReport> {
    let mut report = CampaignReport {
        trials: config.trials,
        runs: 0,
        violations: 0,
        worst_margin: f64::NEG_INFINITY,
        max_attainment_gap: 0.0,
        non_converged: 0,
    };
    for trial in 0..config.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(trial as u64 + 1);

        let d_s = rng.gen_range(2..=config.max_target_dim.max(2));
        let d_m = rng.gen_range(2..=config.max_machine_dim.max(2));
        let machine_gaps: Vec<f64> = (1..d_m).map(|_| sample_gap(&mut rng, 2.0)).collect();
        let machine = Spectrum::from_gaps(&machine_gaps)?;
        let target_gaps: Vec<f64> = (1..d_s)
            .map(|_| sample_gap(&mut rng, machine.e_max()))
            .collect();
        let target = Spectrum::from_gaps(&target_gaps)?;
        let beta_r = InverseTemperature::new(5.0 * rng.gen::<f64>())?;
        let beta_h = if trial % 2 == 0 {
            InverseTemperature::infinite_temperature()
        } else {
            InverseTemperature::new(beta_r.beta() * rng.gen::<f64>())?
        };
        let initial = thermal_state(&target, beta_r);
        let bound = crate::bounds::rho_star(d_s, beta_r, machine.e_max())?;
        let bound_sorted = sort_desc(&bound);

        for protocol in [
            Protocol::OptimalCoherent,
            Protocol::CoherentMaxSwap,
            Protocol::IncoherentMaxSwap,
        ] {
            let hot = (protocol == Protocol::IncoherentMaxSwap).then_some(beta_h);
            let (run, _) = iterate(
                protocol,
                &target,
                &machine,
                beta_r,
                hot,
                &initial,
                &config.iterate,
            )?;
            report.runs += 1;
            if !run.converged {
                report.non_converged += 1;
            }
            let deficit = majorization_deficit(&bound_sorted, &sort_desc(&run.final_state))?;
            report.worst_margin = report.worst_margin.max(deficit);
            if deficit > config.majorization_tol {
                report.violations += 1;
            }
            let attains =
                protocol != Protocol::IncoherentMaxSwap || beta_h.is_infinite_temperature();
            if attains && run.converged {
                report.max_attainment_gap = report.max_attainment_gap.max(run.distance_to_bound);
            }
        }
    }
    Ok(report)
}
