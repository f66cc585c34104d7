//! Closed forms for the universal cooling bound and its convergence rate.
//!
//! Only one machine parameter enters any of these expressions: the largest
//! energy gap `e_max`. The coldest reachable target state has geometric
//! populations with ratio `g = exp(-beta_r * e_max)` between successive
//! levels, and for a qubit target that corresponds to the inverse temperature
//! `beta_r * e_max / E_S`.

use crate::spectra::{InverseTemperature, PopulationVector, Spectrum};
use crate::{Error, Result};

/// Gibbs ratio `g = exp(-beta_r * e_max)`: the successive-level population
/// ratio of the coldest reachable state.
pub fn gibbs_ratio(beta_r: InverseTemperature, e_max: f64) -> f64 {
    (-beta_r.beta() * e_max).exp()
}

/// The coldest reachable target state: populations proportional to `g^n` over
/// `d_s` levels, in energy order.
///
/// The weights are built as a running product so every successive ratio is
/// `g` to within one rounding.
pub fn rho_star(d_s: usize, beta_r: InverseTemperature, e_max: f64) -> Result<PopulationVector> {
    if d_s < 2 {
        return Err(Error::TooFewLevels(d_s));
    }
    if !e_max.is_finite() || e_max < 0.0 {
        return Err(Error::InvalidGap(e_max));
    }
    let g = gibbs_ratio(beta_r, e_max);
    let mut weights = Vec::with_capacity(d_s);
    let mut w = 1.0;
    weights.push(w);
    for _ in 1..d_s {
        w *= g;
        weights.push(w);
    }
    let z: f64 = weights.iter().sum();
    PopulationVector::new(weights.into_iter().map(|w| w / z).collect())
}

/// Largest reachable ground-state population for a qubit target:
/// `1 / (1 + g)`.
pub fn p0_star(beta_r: InverseTemperature, e_max: f64) -> f64 {
    1.0 / (1.0 + gibbs_ratio(beta_r, e_max))
}

/// Coldest inverse temperature of a qubit target of gap `e_s`:
/// `beta_r * e_max / e_s`.
pub fn beta_star_qubit(
    beta_r: InverseTemperature,
    e_max: f64,
    e_s: f64,
) -> Result<InverseTemperature> {
    if e_s <= 0.0 {
        return Err(Error::ZeroTargetGap);
    }
    InverseTemperature::new(beta_r.beta() * e_max / e_s)
}

/// Steady-state inverse temperature of the two-qubit incoherent machine:
/// `(beta_r * e_m - beta_h * (e_m - e_s)) / e_s`.
///
/// A hot bath so cold that the expression turns negative is outside the
/// machine's operating regime and is rejected rather than clamped.
pub fn beta_star_incoherent(
    beta_r: InverseTemperature,
    beta_h: InverseTemperature,
    e_m: f64,
    e_s: f64,
) -> Result<InverseTemperature> {
    if e_s <= 0.0 || e_m < e_s {
        return Err(Error::ZeroTargetGap);
    }
    let beta = (beta_r.beta() * e_m - beta_h.beta() * (e_m - e_s)) / e_s;
    if beta < 0.0 {
        return Err(Error::NegativeSteadyStateBeta(beta));
    }
    InverseTemperature::new(beta)
}

/// Per-cycle convergence quantities of the max-swap protocol on a machine of
/// `n` identical qubits whose gaps add up to `e_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRate {
    /// Norm of the machine's largest-gap virtual qubit,
    /// `N_n = (1 + exp(-x)) / (1 + exp(-x/n))^n` with `x = beta_r * e_max`.
    pub virtual_qubit_norm: f64,
    /// Normalised ground population of the virtual qubit,
    /// `r_V = 1 / (1 + exp(-x))`; independent of `n`.
    pub virtual_ground_pop: f64,
    /// Residual contraction per cycle, `1 - N_n`.
    pub per_cycle_factor: f64,
}

/// Evaluate the convergence rate for an `n`-qubit machine. `n = 1` gives
/// norm 1 and factor 0: a single cycle reaches the bound.
pub fn convergence_rate(
    n: usize,
    beta_r: InverseTemperature,
    e_max: f64,
) -> Result<ConvergenceRate> {
    if n == 0 {
        return Err(Error::EmptyMachine);
    }
    if !e_max.is_finite() || e_max < 0.0 {
        return Err(Error::InvalidGap(e_max));
    }
    let x = beta_r.beta() * e_max;
    let norm = (1.0 + (-x).exp()) / (1.0 + (-x / n as f64).exp()).powi(n as i32);
    Ok(ConvergenceRate {
        virtual_qubit_norm: norm,
        virtual_ground_pop: 1.0 / (1.0 + (-x).exp()),
        per_cycle_factor: 1.0 - norm,
    })
}

/// All closed-form bound quantities for one target/machine pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundSet {
    /// Gibbs ratio `g` of the machine's largest gap.
    pub g: f64,
    /// Coldest reachable state of the target, in energy order.
    pub rho_star: PopulationVector,
    /// Its ground population.
    pub p0_star: f64,
    /// Equivalent inverse temperature; qubit targets only.
    pub beta_star: Option<InverseTemperature>,
}

pub fn bound_set(target: &Spectrum, beta_r: InverseTemperature, e_max: f64) -> Result<BoundSet> {
    let rho_star = rho_star(target.dim(), beta_r, e_max)?;
    let p0_star = rho_star.ground();
    let beta_star = if target.dim() == 2 && target.e_max() > 0.0 {
        Some(beta_star_qubit(beta_r, e_max, target.e_max())?)
    } else {
        None
    };
    Ok(BoundSet {
        g: gibbs_ratio(beta_r, e_max),
        rho_star,
        p0_star,
        beta_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::thermal_state;

    fn beta(b: f64) -> InverseTemperature {
        InverseTemperature::new(b).unwrap()
    }

    #[test]
    fn rho_star_uniform_at_infinite_temperature() {
        let r = rho_star(4, InverseTemperature::infinite_temperature(), 1.0).unwrap();
        for &p in r.probs() {
            assert!((p - 0.25).abs() < 1e-16);
        }
    }

    #[test]
    fn rho_star_qubit_matches_ground_pop_formula() {
        // both routes compute 1 / (1 + g) with the same g, so the agreement
        // is exact, not approximate
        let b = beta(0.8);
        let r = rho_star(2, b, 1.7).unwrap();
        assert_eq!(r.ground(), p0_star(b, 1.7));
    }

    #[test]
    fn rho_star_three_level_geometric() {
        // g = 1/2 => populations (4/7, 2/7, 1/7)
        let b = beta(std::f64::consts::LN_2);
        let r = rho_star(3, b, 1.0).unwrap();
        let expected = [4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0];
        for (got, want) in r.probs().iter().zip(expected) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn rho_star_successive_ratios_equal_g() {
        let b = beta(2.3);
        let g = gibbs_ratio(b, 0.9);
        let r = rho_star(5, b, 0.9).unwrap();
        for w in r.probs().windows(2) {
            assert!((w[1] / w[0] - g).abs() < 1e-14);
        }
    }

    #[test]
    fn beta_star_scales_with_gap_ratio() {
        assert_eq!(beta_star_qubit(beta(1.0), 1.0, 1.0).unwrap().beta(), 1.0);
        assert_eq!(beta_star_qubit(beta(1.0), 2.0, 1.0).unwrap().beta(), 2.0);
        assert!(beta_star_qubit(beta(1.0), 1.0, 0.0).is_err());
    }

    #[test]
    fn beta_star_consistent_with_rho_star() {
        let b = beta(1.3);
        let (e_max, e_s) = (2.0, 0.7);
        let bs = beta_star_qubit(b, e_max, e_s).unwrap();
        let t = thermal_state(&Spectrum::qubit(e_s).unwrap(), bs);
        let r = rho_star(2, b, e_max).unwrap();
        assert!(t.max_norm_distance(&r).unwrap() < 1e-15);
    }

    #[test]
    fn incoherent_beta_limits() {
        // infinite-temperature hot bath reproduces the coherent qubit bound
        let b = beta(1.0);
        let inf = InverseTemperature::infinite_temperature();
        let got = beta_star_incoherent(b, inf, 2.0, 1.0).unwrap();
        assert_eq!(got.beta(), beta_star_qubit(b, 2.0, 1.0).unwrap().beta());
        // hot bath at the environment temperature cannot cool
        let same = beta_star_incoherent(b, b, 2.0, 1.0).unwrap();
        assert!((same.beta() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn incoherent_beta_direct_substitution() {
        let got = beta_star_incoherent(beta(1.0), beta(0.5), 2.0, 1.0).unwrap();
        assert!((got.beta() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn incoherent_beta_rejects_overcold_hot_bath() {
        assert!(matches!(
            beta_star_incoherent(beta(0.1), beta(5.0), 2.0, 1.0),
            Err(Error::NegativeSteadyStateBeta(_))
        ));
    }

    #[test]
    fn rate_single_qubit_machine_converges_in_one_cycle() {
        let r = convergence_rate(1, beta(1.7), 0.9).unwrap();
        assert_eq!(r.virtual_qubit_norm, 1.0);
        assert_eq!(r.per_cycle_factor, 0.0);
    }

    #[test]
    fn rate_norm_decreases_with_qubit_count() {
        for x in [0.1, 1.0, 5.0] {
            let mut prev = f64::INFINITY;
            for n in 1..=12 {
                let r = convergence_rate(n, beta(1.0), x).unwrap();
                assert!(r.virtual_qubit_norm < prev, "n={n} x={x}");
                prev = r.virtual_qubit_norm;
            }
        }
    }

    #[test]
    fn rate_ground_pop_is_n_independent() {
        let a = convergence_rate(1, beta(0.7), 1.3).unwrap();
        let b = convergence_rate(6, beta(0.7), 1.3).unwrap();
        assert_eq!(a.virtual_ground_pop, b.virtual_ground_pop);
        assert!((a.virtual_ground_pop - 1.0 / (1.0 + (-0.7f64 * 1.3).exp())).abs() < 1e-16);
    }

    #[test]
    fn bound_set_for_qubit_target() {
        let target = Spectrum::qubit(1.0).unwrap();
        let bs = bound_set(&target, beta(1.0), 2.0).unwrap();
        assert!((bs.beta_star.unwrap().beta() - 2.0).abs() < 1e-15);
        assert_eq!(bs.p0_star, bs.rho_star.ground());
    }

    #[test]
    fn bound_set_skips_beta_star_for_qudits() {
        let target = Spectrum::new(vec![0.0, 0.5, 1.0]).unwrap();
        let bs = bound_set(&target, beta(1.0), 2.0).unwrap();
        assert!(bs.beta_star.is_none());
    }
}
