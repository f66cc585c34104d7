//! The five subcommands. Each renders CSV (LF line endings, header row,
//! floats at 17 significant digits so values round-trip bit-exactly).

use coolbound::{
    bounds, delta_i, iterate, majorizes, oracle, schur_functionals, sort_desc, tensor,
    thermal_state, three_qubit_incoherent_swap, ConvergenceReport, InverseTemperature,
    IterateConfig, PopulationVector, Protocol, Spectrum,
};

use crate::config::{ConfigFile, ProtocolChoice};
use crate::CliError;

/// 17 significant digits: enough for `f64` round trips, so repeated runs and
/// regression diffs compare byte-for-byte.
fn fmt(x: f64) -> String {
    format!("{:.16e}", x)
}

fn core_err(key: &str, err: coolbound::Error) -> CliError {
    CliError::config(format!("{key}: {err}"))
}

fn spectrum(cfg: &ConfigFile, key: &str) -> Result<Spectrum, CliError> {
    Spectrum::new(cfg.levels_req(key)?).map_err(|e| core_err(key, e))
}

fn beta_of(cfg: &ConfigFile, key: &str) -> Result<InverseTemperature, CliError> {
    InverseTemperature::new(cfg.f64_req(key)?).map_err(|e| core_err(key, e))
}

fn beta_h_req(cfg: &ConfigFile) -> Result<InverseTemperature, CliError> {
    match cfg.beta_h_opt()? {
        Some(b) => InverseTemperature::new(b).map_err(|e| core_err("beta_h", e)),
        None => Err(CliError::config("missing required key `beta_h`")),
    }
}

pub fn cmd_bound(cfg: &ConfigFile) -> Result<String, CliError> {
    let target = spectrum(cfg, "target_spectrum")?;
    let machine = spectrum(cfg, "machine_spectrum")?;
    let beta_r = beta_of(cfg, "beta_r")?;
    let e_max = machine.e_max();
    let set = bounds::bound_set(&target, beta_r, e_max).map_err(|e| core_err("bound", e))?;

    let mut out = String::from("quantity,value\n");
    out.push_str(&format!("g,{}\n", fmt(set.g)));
    out.push_str(&format!("p0_star,{}\n", fmt(set.p0_star)));
    for (i, p) in set.rho_star.probs().iter().enumerate() {
        out.push_str(&format!("rho_star_{i},{}\n", fmt(*p)));
    }
    if let Some(beta_star) = set.beta_star {
        out.push_str(&format!("beta_star,{}\n", fmt(beta_star.beta())));
    }
    if let Some(bh) = cfg.beta_h_opt()? {
        if target.dim() == 2 && target.e_max() > 0.0 {
            let beta_h = InverseTemperature::new(bh).map_err(|e| core_err("beta_h", e))?;
            let inc = bounds::beta_star_incoherent(beta_r, beta_h, e_max, target.e_max())
                .map_err(|e| core_err("beta_h", e))?;
            out.push_str(&format!("beta_star_inc,{}\n", fmt(inc.beta())));
        }
    }
    Ok(out)
}

/// One data row of the simulate table.
struct Row {
    cycle: usize,
    state: PopulationVector,
    chosen_index: usize,
    delta: f64,
    bound_ok: bool,
}

struct Summary {
    converged: bool,
    cycles: usize,
    max_residual_delta: f64,
    distance_to_bound: f64,
    initial_within_bound: bool,
    bound_violations: usize,
    monotonicity_violations: usize,
    hot_bath_flagged: bool,
}

impl From<&ConvergenceReport> for Summary {
    fn from(r: &ConvergenceReport) -> Self {
        Summary {
            converged: r.converged,
            cycles: r.cycles,
            max_residual_delta: r.max_residual_delta,
            distance_to_bound: r.distance_to_bound,
            initial_within_bound: r.initial_within_bound,
            bound_violations: r.bound_violations,
            monotonicity_violations: r.monotonicity_violations,
            hot_bath_flagged: r.hot_bath_flagged,
        }
    }
}

pub struct SimulateOutput {
    pub csv: String,
    /// Cycle of the first row whose state escaped the universal bound.
    pub first_violation: Option<usize>,
}

fn render(target: &Spectrum, rows: &[Row], summary: &Summary) -> Result<SimulateOutput, CliError> {
    let d = target.dim();
    let mut csv = String::from("cycle");
    for i in 0..d {
        csv.push_str(&format!(",pop_{i}"));
    }
    csv.push_str(",ground_pop,entropy,purity,mean_energy,chosen_index,delta,bound_ok\n");
    let mut first_violation = None;
    for row in rows {
        let f = schur_functionals(&row.state, target).map_err(|e| core_err("simulate", e))?;
        csv.push_str(&row.cycle.to_string());
        for p in row.state.probs() {
            csv.push(',');
            csv.push_str(&fmt(*p));
        }
        csv.push_str(&format!(
            ",{},{},{},{},{},{},{}\n",
            fmt(f.ground_pop),
            fmt(f.entropy),
            fmt(f.purity),
            fmt(f.mean_energy),
            row.chosen_index,
            fmt(row.delta),
            row.bound_ok
        ));
        if !row.bound_ok && first_violation.is_none() {
            first_violation = Some(row.cycle);
        }
    }
    csv.push('\n');
    csv.push_str(
        "converged,cycles,max_residual_delta,distance_to_bound,initial_within_bound,\
         bound_violations,monotonicity_violations,hot_bath_flagged\n",
    );
    csv.push_str(&format!(
        "{},{},{},{},{},{},{},{}\n",
        summary.converged,
        summary.cycles,
        fmt(summary.max_residual_delta),
        fmt(summary.distance_to_bound),
        summary.initial_within_bound,
        summary.bound_violations,
        summary.monotonicity_violations,
        summary.hot_bath_flagged
    ));
    Ok(SimulateOutput {
        csv,
        first_violation,
    })
}

pub fn cmd_simulate(cfg: &ConfigFile) -> Result<SimulateOutput, CliError> {
    let choice = cfg.protocol_req()?;
    let target = spectrum(cfg, "target_spectrum")?;
    let machine = spectrum(cfg, "machine_spectrum")?;
    let beta_r = beta_of(cfg, "beta_r")?;
    let tolerance = cfg.f64_opt("tolerance")?.unwrap_or(1e-12);
    let max_cycles = cfg.usize_or("max_cycles", 1_000_000)?;
    let initial = thermal_state(&target, beta_r);

    match choice {
        ProtocolChoice::Optimal | ProtocolChoice::MaxSwap | ProtocolChoice::IncoherentMaxSwap => {
            let (protocol, hot) = match choice {
                ProtocolChoice::Optimal => (Protocol::OptimalCoherent, None),
                ProtocolChoice::MaxSwap => (Protocol::CoherentMaxSwap, None),
                _ => (Protocol::IncoherentMaxSwap, Some(beta_h_req(cfg)?)),
            };
            let config = IterateConfig {
                tolerance,
                max_cycles,
                collect_traces: true,
            };
            let (report, traces) =
                iterate(protocol, &target, &machine, beta_r, hot, &initial, &config)
                    .map_err(|e| core_err("simulate", e))?;
            let rows: Vec<Row> = traces
                .into_iter()
                .map(|t| Row {
                    cycle: t.cycle_index,
                    state: t.state_after,
                    chosen_index: t.chosen_index,
                    delta: t.delta,
                    bound_ok: t.bound_ok,
                })
                .collect();
            render(&target, &rows, &Summary::from(&report))
        }
        ProtocolChoice::SingleSwapQubit => single_swap_qubit(&target, &machine, beta_r, &initial),
        ProtocolChoice::ThreeQubitIncoherent => {
            let beta_h = beta_h_req(cfg)?;
            three_qubit_run(
                &target, &machine, beta_r, beta_h, &initial, tolerance, max_cycles,
            )
        }
    }
}

/// The one-shot coherent swap of a qubit target with a qubit machine: the
/// target ends with the machine's thermal populations, whatever they are.
fn single_swap_qubit(
    target: &Spectrum,
    machine: &Spectrum,
    beta_r: InverseTemperature,
    initial: &PopulationVector,
) -> Result<SimulateOutput, CliError> {
    if target.dim() != 2 || machine.dim() != 2 {
        return Err(CliError::config(
            "single-swap-qubit needs a qubit target and a qubit machine",
        ));
    }
    let tau = thermal_state(machine, beta_r);
    let joint = tensor(initial, &tau);
    let mut j = joint.probs().to_vec();
    j.swap(0b01, 0b10);
    let after = coolbound::partial_trace_machine(
        &PopulationVector::new(j).map_err(|e| core_err("simulate", e))?,
        2,
        2,
    )
    .map_err(|e| core_err("simulate", e))?;

    let star = bounds::rho_star(2, beta_r, machine.e_max()).map_err(|e| core_err("simulate", e))?;
    let star_sorted = sort_desc(&star);
    let bound_ok = majorizes(&star_sorted, &sort_desc(&after), 1e-10).unwrap();
    let initial_within_bound = majorizes(&star_sorted, &sort_desc(initial), 1e-10).unwrap();
    let monotone = majorizes(&sort_desc(&after), &sort_desc(initial), 1e-12).unwrap();
    // signed net gain of the ground population
    let delta = after.ground() - initial.ground();
    let residual = delta_i(&after, &sort_desc(&tau), 1).unwrap();
    let rows = vec![Row {
        cycle: 1,
        state: after.clone(),
        chosen_index: 1,
        delta,
        bound_ok,
    }];
    let summary = Summary {
        converged: true,
        cycles: 1,
        max_residual_delta: residual,
        distance_to_bound: after.max_norm_distance(&star).unwrap(),
        initial_within_bound,
        bound_violations: usize::from(!bound_ok),
        monotonicity_violations: usize::from(!monotone),
        hot_bath_flagged: false,
    };
    render(target, &rows, &summary)
}

/// Repeated energy-preserving swap of the smallest incoherent refrigerator:
/// target + machine qubit (rethermalised at the environment) + ancilla qubit
/// of gap `E_M - E_S` (rethermalised at the hot bath).
fn three_qubit_run(
    target: &Spectrum,
    machine: &Spectrum,
    beta_r: InverseTemperature,
    beta_h: InverseTemperature,
    initial: &PopulationVector,
    tolerance: f64,
    max_cycles: usize,
) -> Result<SimulateOutput, CliError> {
    if target.dim() != 2 || machine.dim() != 2 {
        return Err(CliError::config(
            "three-qubit-incoherent needs a qubit target and a qubit machine",
        ));
    }
    let e_s = target.e_max();
    let e_m = machine.e_max();
    if e_m < e_s {
        return Err(CliError::config(format!(
            "three-qubit-incoherent needs E_M >= E_S, got E_M = {e_m}, E_S = {e_s}"
        )));
    }
    let ancilla = Spectrum::qubit(e_m - e_s).map_err(|e| core_err("simulate", e))?;
    let p_m = thermal_state(machine, beta_r);
    let p_a = thermal_state(&ancilla, beta_h);
    let star = bounds::rho_star(2, beta_r, e_m).map_err(|e| core_err("simulate", e))?;
    let star_sorted = sort_desc(&star);
    let initial_within_bound = majorizes(&star_sorted, &sort_desc(initial), 1e-10).unwrap();

    // swaps below ulp scale freeze the state; stop there even if the
    // requested tolerance is tighter
    let stop = tolerance.max(1e-15);
    let mut rows = Vec::new();
    let mut state = initial.clone();
    let mut converged = false;
    let mut cycles = 0;
    let mut bound_violations = 0;
    let mut monotonicity_violations = 0;
    for cycle in 1..=max_cycles {
        let next =
            three_qubit_incoherent_swap(&state, &p_m, &p_a).map_err(|e| core_err("simulate", e))?;
        let delta = next.ground() - state.ground();
        let diff = state.max_norm_distance(&next).unwrap();
        let bound_ok = majorizes(&star_sorted, &sort_desc(&next), 1e-10).unwrap();
        if !bound_ok {
            bound_violations += 1;
        }
        if coolbound::majorization::prefix_sum_deficit(&next, &state).unwrap() > 1e-12 {
            monotonicity_violations += 1;
        }
        if diff >= stop {
            cycles += 1;
        }
        rows.push(Row {
            cycle,
            state: next.clone(),
            chosen_index: 1,
            delta,
            bound_ok,
        });
        state = next;
        if diff < stop {
            converged = true;
            break;
        }
    }
    let final_delta = {
        let probe = three_qubit_incoherent_swap(&state, &p_m, &p_a).unwrap();
        probe.ground() - state.ground()
    };
    let summary = Summary {
        converged,
        cycles,
        max_residual_delta: final_delta,
        distance_to_bound: state.max_norm_distance(&star).unwrap(),
        initial_within_bound,
        bound_violations,
        monotonicity_violations,
        hot_bath_flagged: beta_h.beta() > beta_r.beta(),
    };
    render(target, &rows, &summary)
}

pub fn cmd_rate(cfg: &ConfigFile) -> Result<String, CliError> {
    let n_max = cfg.usize_req("n_max")?;
    if n_max == 0 {
        return Err(CliError::config("n_max: must be at least 1"));
    }
    let beta_r = beta_of(cfg, "beta_r")?;
    let e_max = cfg.f64_req("e_max")?;
    let cosh_limit = 2.0 * (beta_r.beta() * e_max / 2.0).cosh();
    let mut out =
        String::from("n,virtual_qubit_norm,per_cycle_factor,norm_times_2_pow_n,cosh_limit\n");
    for n in 1..=n_max {
        let rate = bounds::convergence_rate(n, beta_r, e_max).map_err(|e| core_err("rate", e))?;
        out.push_str(&format!(
            "{n},{},{},{},{}\n",
            fmt(rate.virtual_qubit_norm),
            fmt(rate.per_cycle_factor),
            fmt(rate.virtual_qubit_norm * 2.0f64.powi(n as i32)),
            fmt(cosh_limit)
        ));
    }
    Ok(out)
}

/// Hard limits for the verification campaign; beyond them the run is
/// refused as a configuration error.
const MAX_TRIALS: usize = 1_000_000;
const MAX_D_S: usize = 6;
const MAX_D_M: usize = 10;

pub fn cmd_oracle(cfg: &ConfigFile) -> Result<(String, usize), CliError> {
    let trials = cfg.usize_or("trials", 1000)?;
    let d_s_max = cfg.usize_or("d_s_max", 4)?;
    let d_m_max = cfg.usize_or("d_m_max", 6)?;
    let seed = cfg.u64_or("seed", 0)?;
    if trials == 0 || trials > MAX_TRIALS {
        return Err(CliError::config(format!(
            "trials: {trials} outside 1..={MAX_TRIALS}"
        )));
    }
    if !(2..=MAX_D_S).contains(&d_s_max) || !(2..=MAX_D_M).contains(&d_m_max) {
        return Err(CliError::config(format!(
            "dimension budget exceeded: d_s_max {d_s_max} (max {MAX_D_S}), d_m_max {d_m_max} (max {MAX_D_M})"
        )));
    }
    let config = oracle::CampaignConfig {
        trials,
        max_target_dim: d_s_max,
        max_machine_dim: d_m_max,
        seed,
        ..oracle::CampaignConfig::default()
    };
    let report = oracle::verify_bound_random(&config).map_err(|e| core_err("oracle", e))?;
    let mut out = String::from("quantity,value\n");
    out.push_str(&format!("trials,{}\n", report.trials));
    out.push_str(&format!("runs,{}\n", report.runs));
    out.push_str(&format!("violations,{}\n", report.violations));
    out.push_str(&format!("non_converged,{}\n", report.non_converged));
    out.push_str(&format!("worst_margin,{}\n", fmt(report.worst_margin)));
    out.push_str(&format!(
        "max_attainment_gap,{}\n",
        fmt(report.max_attainment_gap)
    ));
    out.push_str(&format!("seed,{seed}\n"));
    Ok((out, report.violations))
}

pub struct SweepRun {
    pub file_name: String,
    pub output: SimulateOutput,
}

pub fn cmd_sweep(
    cfg: &ConfigFile,
    out_stem: &str,
    out_ext: &str,
) -> Result<Vec<SweepRun>, CliError> {
    let key = cfg
        .str_opt("sweep_key")
        .ok_or_else(|| CliError::config("missing required key `sweep_key`"))?
        .to_string();
    if key != "beta_r" && key != "beta_h" {
        return Err(CliError::config(format!(
            "sweep_key: `{key}` not sweepable (expected beta_r or beta_h)"
        )));
    }
    let values = cfg.levels_req("sweep_values")?;
    if values.is_empty() {
        return Err(CliError::config("sweep_values: empty"));
    }
    let mut runs = Vec::with_capacity(values.len());
    for (idx, value) in values.iter().enumerate() {
        let overridden = cfg.with_override(&key, &format!("{value}"));
        let output = cmd_simulate(&overridden)?;
        runs.push(SweepRun {
            file_name: format!("{out_stem}_{idx:03}{out_ext}"),
            output,
        });
    }
    Ok(runs)
}
