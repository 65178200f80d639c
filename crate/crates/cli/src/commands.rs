use std::f64::consts::FRAC_PI_2;

use chp_core::classical::{comparison_table, noisy_accuracy};
use chp_core::codewords::{
    enumerate_restricted_instances, hadamard_codeword, in_phase_syndrome, sample_instance, syndromes, ErrorWeights,
    OracleWord, ProblemInstance, Variant,
};
use chp_core::oracle_circuit::{
    decide_fourier, decide_restricted, error_curve, input_state, run_pipeline, unrestricted_trials, DecisionReport,
    ErrorModel, PhaseOracle, Transform, TrialOutcome,
};
use chp_core::qfunction::q_function;
use chp_core::spin_core::{coherent_state, SpinSystem};
use chp_core::squeezing::{bounding_epsilon, optimize_mu, squeeze_sweep};
use chp_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Errors, Format, RunConfig};
use crate::output::{Cell, Output, Table, SCHEMA_VERSION};
use crate::CliError;

/// Upper bound on `θ steps × φ steps × N` for one Q-function grid.
pub const QFUNC_MAX_WORK: usize = 1 << 30;
/// Largest output distribution tabulated by `spectrum`.
pub const SPECTRUM_MAX_QUBITS: u32 = 10;
pub const MAX_TRIALS: usize = 10_000_000;
pub const DEFAULT_TRIALS: usize = 1000;
/// Exhaustive restricted solving is the default up to this length.
pub const EXHAUSTIVE_MAX_DIM: usize = 16;

fn dims(cfg: &RunConfig) -> Result<Vec<usize>, CliError> {
    cfg.qubits.iter().map(|&n| Ok(SpinSystem::new(n)?.dim())).collect()
}

fn trials(cfg: &RunConfig) -> Result<usize, CliError> {
    let t = cfg.trials.unwrap_or(DEFAULT_TRIALS);
    if t > MAX_TRIALS {
        return Err(Error::Resource(format!("{t} trials exceed the limit of {MAX_TRIALS}")).into());
    }
    Ok(t)
}

fn single_error(cfg: &RunConfig) -> Result<Option<usize>, CliError> {
    match &cfg.errors {
        None | Some(Errors::All) => Ok(None),
        Some(Errors::List(v)) if v.len() == 1 => Ok(Some(v[0])),
        Some(Errors::List(_)) => Err(CliError::Config("this command takes a single error weight".into())),
    }
}

pub fn squeeze_scan(cfg: &RunConfig, out: &mut Output) -> Result<Value, CliError> {
    let points = squeeze_sweep(&cfg.qubits, cfg.tol)?;
    let bound = bounding_epsilon();
    let mut scan = Table::new(&["s", "mu_opt", "v_min", "p_c", "overlap"]);
    let mut hist = Table::new(&["s", "m", "p", "bound"]);
    for pt in &points {
        scan.push(vec![pt.s.into(), pt.mu_opt.into(), pt.v_min.into(), pt.p_c.into(), pt.overlap.into()]);
        let sys = SpinSystem::new(pt.n)?;
        let template = if sys.dim() >= 8 { Some(bound.template_f64(sys.dim())?) } else { None };
        for (i, &p) in pt.distribution.iter().enumerate() {
            let b = template.as_ref().map_or(Cell::Empty, |t| t[i].into());
            hist.push(vec![pt.s.into(), sys.dicke_label(i).into(), p.into(), b]);
        }
    }
    out.table("squeeze_scan", &scan)?;
    out.table("squeeze_histograms", &hist)?;
    let monotone = points.windows(2).all(|w| w[1].v_min >= w[0].v_min - 1e-6);
    Ok(json!({
        "points": points.len(),
        "v_min_nondecreasing": monotone,
        "min_p_c": points.iter().skip(1).map(|p| p.p_c).fold(f64::INFINITY, f64::min),
        "bounding_epsilon": bound.epsilon.to_string(),
        "bounding_pc": bound.pc.to_string(),
    }))
}

pub fn qfunc(cfg: &RunConfig, out: &mut Output) -> Result<Value, CliError> {
    let (tsteps, psteps) = cfg.grid;
    let mut summary = Vec::new();
    for &n in &cfg.qubits {
        let sys = SpinSystem::new(n)?;
        let work = tsteps.saturating_mul(psteps).saturating_mul(sys.dim());
        if work > QFUNC_MAX_WORK {
            return Err(Error::Resource(format!("grid {tsteps}x{psteps} at N={} is too large", sys.dim())).into());
        }
        let (state, mu) = match cfg.state {
            crate::config::StateKind::Coherent => (coherent_state(&sys, FRAC_PI_2, 0.0)?, None),
            crate::config::StateKind::Squeezed => {
                let res = optimize_mu(&sys, cfg.tol)?;
                (res.state, Some(res.mu))
            }
        };
        let grid = q_function(&state, &sys, tsteps, psteps)?;
        let stem = format!("qfunc_{}_N{}", cfg.state.name(), sys.dim());
        match cfg.format {
            Format::Csv => {
                let mut buf = Vec::new();
                grid.write_csv(&mut buf).map_err(|e| CliError::Io(e.to_string()))?;
                out.write(&format!("{stem}.csv"), &buf)?;
            }
            Format::Json => {
                let mut t = Table::new(&["theta", "phi", "q"]);
                for i in 0..tsteps {
                    for j in 0..psteps {
                        t.push(vec![grid.theta(i).into(), grid.phi(j).into(), grid.value(i, j).into()]);
                    }
                }
                out.table(&stem, &t)?;
            }
        }
        let mut dist = Table::new(&["i", "m", "p"]);
        for (i, p) in state.probabilities().into_iter().enumerate() {
            dist.push(vec![i.into(), sys.dicke_label(i).into(), p.into()]);
        }
        out.table(&format!("distribution_{}_N{}", cfg.state.name(), sys.dim()), &dist)?;
        let (at, ap) = grid.argmax();
        let (wt, wp) = grid.half_max_widths();
        summary.push(json!({
            "N": sys.dim(),
            "s": sys.s(),
            "mu": mu,
            "normalization": grid.normalization(&sys),
            "argmax_theta": grid.theta(at),
            "argmax_phi": grid.phi(ap),
            "half_max_theta_cells": wt,
            "half_max_phi_cells": wp,
        }));
    }
    Ok(Value::Array(summary))
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
struct SummaryRow {
    repetitions: usize,
    trials: usize,
    correct: usize,
    accuracy: f64,
    mean_queries: f64,
}

#[derive(Serialize)]
struct SolveDocument<'a> {
    schema_version: u32,
    variant: Variant,
    #[serde(rename = "N")]
    dim: usize,
    mode: &'static str,
    summary: &'a [SummaryRow],
    reports: &'a [DecisionReport],
}

fn exact_summary(instances: &[ProblemInstance], reports: &[DecisionReport]) -> Result<SummaryRow, CliError> {
    for r in reports {
        if let Some(p) = &r.per_outcome {
            let total: f64 = p.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::InvariantViolation(format!("outcome probabilities sum to {total}")).into());
            }
        }
    }
    let correct = instances.iter().zip(reports).filter(|(i, r)| r.is_correct(i)).count();
    let n = reports.len().max(1) as f64;
    Ok(SummaryRow {
        repetitions: 1,
        trials: reports.len(),
        correct,
        accuracy: correct as f64 / n,
        mean_queries: reports.iter().map(|r| r.queries).sum::<usize>() as f64 / n,
    })
}

fn restricted_instances(cfg: &RunConfig, dim: usize) -> Result<(Vec<ProblemInstance>, &'static str), CliError> {
    let weights = match single_error(cfg)? {
        None => ErrorWeights::All,
        Some(d) => ErrorWeights::Exact(d),
    };
    if cfg.trials.is_none() && dim <= EXHAUSTIVE_MAX_DIM {
        let all = enumerate_restricted_instances(dim)?;
        let keep = |i: &ProblemInstance| match weights {
            ErrorWeights::Exact(d) => i.error_weight() == d,
            _ => true,
        };
        let chosen: Vec<_> = all.into_iter().filter(keep).collect();
        if chosen.is_empty() {
            return Err(
                Error::DegenerateInstanceClass(format!("no restricted instances at N={dim} with that weight")).into()
            );
        }
        return Ok((chosen, "exhaustive"));
    }
    let mut out = Vec::new();
    for t in 0..trials(cfg)? {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(t as u64);
        out.push(sample_instance(Variant::Restricted, dim, weights, &mut rng)?);
    }
    Ok((out, "sampled"))
}

fn unrestricted_outcomes(cfg: &RunConfig, dim: usize) -> Result<Vec<TrialOutcome>, CliError> {
    let bound = Variant::Unrestricted.weight_bound(dim);
    if bound == 0 {
        return Err(Error::DegenerateInstanceClass(format!("no unrestricted instances at N={dim}")).into());
    }
    let l = single_error(cfg)?.unwrap_or(bound - 1);
    let model = if cfg.worst_case { ErrorModel::InPhase } else { ErrorModel::Random };
    Ok(unrestricted_trials(dim, l, model, &cfg.reps, trials(cfg)?, cfg.seed)?)
}

pub fn solve(cfg: &RunConfig, out: &mut Output) -> Result<Value, CliError> {
    let mut overview = Vec::new();
    for dim in dims(cfg)? {
        let (mode, summary, reports) = match cfg.variant {
            Variant::Restricted => {
                let (instances, mode) = restricted_instances(cfg, dim)?;
                let reports = instances.iter().map(decide_restricted).collect::<Result<Vec<_>, _>>()?;
                (mode, vec![exact_summary(&instances, &reports)?], reports)
            }
            Variant::Fourier => {
                if single_error(cfg)?.unwrap_or(0) != 0 {
                    return Err(CliError::Config("the Fourier variant has no error model".into()));
                }
                let instances = (0..dim).map(|j| ProblemInstance::fourier(dim, j)).collect::<Result<Vec<_>, _>>()?;
                let reports = instances.iter().map(decide_fourier).collect::<Result<Vec<_>, _>>()?;
                ("exhaustive", vec![exact_summary(&instances, &reports)?], reports)
            }
            Variant::Unrestricted => {
                let outcomes = unrestricted_outcomes(cfg, dim)?;
                let summary = error_curve(&outcomes, &cfg.reps)
                    .into_iter()
                    .map(|p| SummaryRow {
                        repetitions: p.repetitions,
                        trials: p.trials,
                        correct: p.trials - p.errors,
                        accuracy: 1.0 - p.rate,
                        mean_queries: p.mean_queries,
                    })
                    .collect();
                let reports = outcomes
                    .into_iter()
                    .flat_map(|o| o.reports)
                    .map(|r| DecisionReport { per_outcome: None, ..r })
                    .collect();
                ("sampled", summary, reports)
            }
        };
        let stem = format!("solve_{}_N{dim}", cfg.variant);
        out.json(
            &format!("{stem}.json"),
            &SolveDocument {
                schema_version: SCHEMA_VERSION,
                variant: cfg.variant,
                dim,
                mode,
                summary: &summary,
                reports: &reports,
            },
        )?;
        let mut t = Table::new(&["repetitions", "trials", "correct", "accuracy", "mean_queries"]);
        for s in &summary {
            t.push(vec![
                s.repetitions.into(),
                s.trials.into(),
                s.correct.into(),
                s.accuracy.into(),
                s.mean_queries.into(),
            ]);
        }
        out.table(&format!("{stem}_summary"), &t)?;
        overview.push(json!({ "N": dim, "mode": mode, "summary": summary }));
    }
    Ok(Value::Array(overview))
}

pub fn classical(cfg: &RunConfig, out: &mut Output) -> Result<Value, CliError> {
    let dims = dims(cfg)?;
    let rows = comparison_table(&dims)?;
    let mut t = Table::new(&["N", "quantum_queries", "classical_queries", "classical_min_depth"]);
    for r in &rows {
        t.push(vec![r.dim.into(), r.quantum_queries.into(), r.classical_queries.into(), r.classical_min_depth.into()]);
    }
    out.table("classical", &t)?;
    let Some(Errors::List(weights)) = &cfg.errors else {
        return Ok(json!({ "rows": rows.len() }));
    };
    let restricted = match cfg.variant {
        Variant::Restricted => true,
        Variant::Unrestricted => false,
        Variant::Fourier => return Err(CliError::Config("noisy classical runs need a Hadamard variant".into())),
    };
    let trials = trials(cfg)?;
    let mut noisy = Table::new(&["N", "errors", "restricted", "probes", "trials", "accuracy", "mean_queries"]);
    for &dim in &dims {
        for &d in weights {
            for &probes in &cfg.reps {
                let acc = noisy_accuracy(dim, d, restricted, probes, trials, cfg.seed)?;
                noisy.push(vec![
                    dim.into(),
                    d.into(),
                    restricted.into(),
                    probes.into(),
                    trials.into(),
                    (acc.correct as f64 / acc.trials as f64).into(),
                    acc.mean_queries.into(),
                ]);
            }
        }
    }
    out.table("classical_noisy", &noisy)?;
    Ok(json!({ "rows": rows.len(), "noisy_rows": noisy.rows.len() }))
}

/// Pipeline output distributions before the merge step, one block per
/// error weight and hidden index.
pub fn spectrum(cfg: &RunConfig, out: &mut Output) -> Result<Value, CliError> {
    let weights = match &cfg.errors {
        None => vec![0],
        Some(Errors::List(v)) => v.clone(),
        Some(Errors::All) => return Err(CliError::Config("spectrum needs explicit error weights".into())),
    };
    let mut files = 0;
    for &n in &cfg.qubits {
        let sys = SpinSystem::new(n)?;
        if n > SPECTRUM_MAX_QUBITS {
            return Err(Error::Resource(format!("spectrum tables need N <= {}", 1usize << SPECTRUM_MAX_QUBITS)).into());
        }
        let dim = sys.dim();
        let mut t = Table::new(&["errors", "j", "i", "p"]);
        for &w in &weights {
            let words: Vec<OracleWord> = match cfg.variant {
                Variant::Fourier => {
                    if w != 0 {
                        return Err(CliError::Config("the Fourier variant has no error model".into()));
                    }
                    (0..dim).map(|j| Ok(ProblemInstance::fourier(dim, j)?.z)).collect::<Result<_, Error>>()?
                }
                variant => {
                    let syndrome = if variant == Variant::Restricted {
                        syndromes(dim, w, true)?.iter().next().ok_or_else(|| {
                            CliError::Config(format!("no restricted syndrome of weight {w} at N={dim}"))
                        })?
                    } else {
                        in_phase_syndrome(dim, w)?
                    };
                    (0..dim / 2)
                        .map(|j| Ok(OracleWord::Bits(hadamard_codeword(dim, j)?.with_errors(&syndrome)?)))
                        .collect::<Result<_, Error>>()?
                }
            };
            let transform = if cfg.variant == Variant::Fourier { Transform::Fourier } else { Transform::Hadamard };
            for (j, word) in words.iter().enumerate() {
                let state = run_pipeline(&mut PhaseOracle::new(word), &input_state(&sys), transform)?;
                for (i, p) in state.probabilities().into_iter().enumerate() {
                    t.push(vec![w.into(), j.into(), i.into(), p.into()]);
                }
            }
        }
        out.table(&format!("spectrum_{}_N{dim}", cfg.variant), &t)?;
        files += 1;
    }
    Ok(json!({ "tables": files }))
}
