//! Trial execution and result files.

use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use distapprox::bipartite::{mwvc_bipartite_pipeline, CoverConfig};
use distapprox::fractional::approx_w_matching;
use distapprox::general::mwvc_general_pipeline;
use distapprox::graph::{format_graph, generate, read_graph, GenParams, WeightedGraph};
use distapprox::matching::{mwm_deterministic, mwm_randomized, MwmConfig, MwmReport};
use distapprox::oracle::{exact_fractional_value, exact_mwm, exact_mwvc};
use distapprox::sim::{cluster, ElementWeights, RoundStats};

use crate::config::{Algorithm, GraphSource, RunConfig};
use crate::solution::{self, SolutionFile};
use crate::CliError;

/// Column order of `results.csv`.
pub const HEADER: [&str; 17] = [
    "graph_id",
    "n",
    "m",
    "max_degree",
    "max_weight",
    "algorithm",
    "epsilon",
    "delta",
    "seed",
    "solution_weight",
    "oracle_weight",
    "ratio",
    "rounds_measured",
    "rounds_cited",
    "max_message_bits",
    "density",
    "wall_ms",
];

/// Separation used by `cluster-only`, matching the pipelines.
const CLUSTER_SEPARATION: usize = 3;

/// One `results.csv` row plus the files a trial emits.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutput {
    pub record: Vec<String>,
    pub solution: String,
    /// Generated graphs only.
    pub graph: Option<String>,
    pub trace: Option<String>,
}

/// What an algorithm run contributes to its row.
struct Outcome {
    weight: f64,
    solution: String,
    rounds: Option<u64>,
    rounds_cited: Option<u64>,
    message_bits: Option<usize>,
    density: Option<f64>,
    oracle: Option<f64>,
    trace: Option<String>,
}

fn blank_or<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn oracle_value<T>(r: distapprox::Result<T>, f: impl FnOnce(T) -> f64) -> Result<Option<f64>, CliError> {
    match r {
        Ok(v) => Ok(Some(f(v))),
        Err(distapprox::Error::SizeCap(_)) => Ok(None),
        Err(e) => Err(CliError::Lib(e)),
    }
}

fn ratio(solution: f64, oracle: Option<f64>) -> String {
    match oracle {
        Some(o) if o > 0.0 => (solution / o).to_string(),
        Some(_) if solution == 0.0 => "1".into(),
        _ => String::new(),
    }
}

fn trace_csv(report: &MwmReport) -> String {
    let mut s = String::from("iteration,matching_weight,accepted,bipartition_id\n");
    for row in &report.trace {
        s.push_str(&format!(
            "{},{},{},{}\n",
            row.iteration,
            row.weight,
            row.accepted,
            blank_or(row.bipartition)
        ));
    }
    s
}

/// Messages over the budget surface as a protocol violation.
fn within_budget(stats: RoundStats) -> Result<RoundStats, CliError> {
    if stats.within_budget() {
        Ok(stats)
    } else {
        Err(CliError::Violation(format!(
            "a message used {} bits, budget is {}",
            stats.max_bits_per_message, stats.bit_budget
        )))
    }
}

fn run_algorithm(cfg: &RunConfig, g: &WeightedGraph, seed: u64) -> Result<Outcome, CliError> {
    let budget = |sim: &mut distapprox::sim::SimConfig| {
        if let Some(b) = cfg.bit_budget {
            sim.bit_budget = b;
        }
    };
    Ok(match cfg.algorithm {
        Algorithm::MwvcBipartite | Algorithm::MwvcGeneral => {
            let mut cc = CoverConfig::new(g, cfg.epsilon, seed);
            budget(&mut cc.sim);
            let (cover, stats, density) = if cfg.algorithm == Algorithm::MwvcBipartite {
                let r = mwvc_bipartite_pipeline(g, &cc)?;
                (r.cover, within_budget(r.stats)?, r.clustering.density)
            } else {
                let r = mwvc_general_pipeline(g, &cc, cfg.provider)?;
                (r.cover, within_budget(r.stats)?, r.double_cover.clustering.density)
            };
            let oracle = if cfg.oracle { oracle_value(exact_mwvc(g), |c| c.weight(g) as f64)? } else { None };
            Outcome {
                weight: cover.weight(g) as f64,
                solution: solution::format_cover(&cover),
                rounds: Some(stats.rounds),
                rounds_cited: Some(stats.rounds_cited),
                message_bits: Some(stats.max_bits_per_message),
                density: Some(density),
                oracle,
                trace: None,
            }
        }
        Algorithm::MwmRandomized | Algorithm::MwmDeterministic => {
            let mut mc = MwmConfig::new(g, cfg.epsilon, cfg.delta, seed);
            budget(&mut mc.sim);
            mc.iterations = cfg.iterations;
            if let Some(k) = cfg.family_k {
                mc.family_k = k;
            }
            mc.solver = cfg.solver;
            let r = if cfg.algorithm == Algorithm::MwmRandomized {
                mwm_randomized(g, &mc)?
            } else {
                mwm_deterministic(g, &mc)?
            };
            within_budget(r.stats)?;
            let oracle = if cfg.oracle { oracle_value(exact_mwm(g), |m| m.weight(g) as f64)? } else { None };
            Outcome {
                weight: r.matching.weight(g) as f64,
                solution: solution::format_matching(g, &r.matching),
                rounds: Some(r.stats.rounds),
                rounds_cited: Some(r.stats.rounds_cited),
                message_bits: Some(r.stats.max_bits_per_message),
                density: Some(r.clustering.density),
                oracle,
                trace: Some(trace_csv(&r)),
            }
        }
        Algorithm::ClusterOnly => {
            let c = cluster(g, &ElementWeights::unit(g), CLUSTER_SEPARATION, cfg.epsilon, seed)?;
            c.audit(g)?;
            Outcome {
                weight: c.inside_weight as f64,
                solution: solution::format_clusters(&c),
                rounds: Some(c.rounds),
                rounds_cited: Some(c.rounds),
                message_bits: None,
                density: Some(c.density),
                oracle: None,
                trace: None,
            }
        }
        Algorithm::FractionalOnly => {
            let r = approx_w_matching(g, cfg.delta)?;
            r.assignment.check(g)?;
            let oracle = if cfg.oracle {
                oracle_value(exact_fractional_value(g), |v| *v.numer() as f64 / *v.denom() as f64)?
            } else {
                None
            };
            let total = r.assignment.total();
            Outcome {
                weight: *total.numer() as f64 / *total.denom() as f64,
                solution: solution::format_fractional(g, &r.assignment),
                rounds: None,
                rounds_cited: None,
                message_bits: None,
                density: None,
                oracle,
                trace: None,
            }
        }
    })
}

fn load_graph(cfg: &RunConfig, seed: u64) -> Result<(WeightedGraph, String, bool), CliError> {
    match &cfg.source {
        GraphSource::Generated(kind) => {
            let params = GenParams { max_weight: cfg.max_weight, mode: cfg.algorithm.weight_mode() };
            let g = generate(kind, &params, seed)?;
            Ok((g, format!("{kind}@{seed}"), true))
        }
        GraphSource::File(path) => {
            let g = read_graph(path)?;
            let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            Ok((g, id, false))
        }
    }
}

/// Runs trial `t` with seed `cfg.seed + t`.
pub fn run_trial(cfg: &RunConfig, t: usize) -> Result<TrialOutput, CliError> {
    let seed = cfg.seed.wrapping_add(t as u64);
    let (g, graph_id, generated) = load_graph(cfg, seed)?;
    let start = Instant::now();
    let out = run_algorithm(cfg, &g, seed).map_err(|e| match e {
        CliError::Violation(msg) => CliError::Violation(format!("trial {t}: {msg}")),
        other => other,
    })?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;

    let parsed: SolutionFile = solution::parse_solution(&out.solution)?;
    let check = solution::verify(&g, &parsed);
    if !check.passed() {
        return Err(CliError::Violation(format!("trial {t}: emitted solution fails verify\n{}", check.render())));
    }

    let record = vec![
        graph_id,
        g.n().to_string(),
        g.m().to_string(),
        g.max_degree().to_string(),
        g.max_weight().to_string(),
        cfg.algorithm.name().to_string(),
        cfg.epsilon.to_string(),
        cfg.delta.to_string(),
        seed.to_string(),
        out.weight.to_string(),
        blank_or(out.oracle),
        ratio(out.weight, out.oracle),
        blank_or(out.rounds),
        blank_or(out.rounds_cited),
        blank_or(out.message_bits),
        blank_or(out.density),
        if cfg.timing { format!("{wall_ms:.3}") } else { String::new() },
    ];
    Ok(TrialOutput {
        record,
        solution: out.solution,
        graph: generated.then(|| format_graph(&g)),
        trace: out.trace,
    })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(io_err(path))
}

/// Runs every trial in parallel, then writes `results.csv` and the per-trial
/// files in trial order. Rows of completed trials are written even when a
/// later trial fails; the first failure is returned.
pub fn run(cfg: &RunConfig) -> Result<usize, CliError> {
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(t) = cfg.threads {
            b = b.num_threads(t);
        }
        b.build().map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))?
    };
    let results: Vec<Result<TrialOutput, CliError>> =
        pool.install(|| (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, t)).collect());

    let out = &cfg.out;
    for dir in ["solutions", "graphs", "traces"] {
        let p = out.join(dir);
        fs::create_dir_all(&p).map_err(io_err(&p))?;
    }
    let csv_path = out.join("results.csv");
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(&csv_path)
        .map_err(|e| CliError::Io { path: csv_path.clone(), source: e.into() })?;
    writer
        .write_record(HEADER)
        .map_err(|e| CliError::Io { path: csv_path.clone(), source: e.into() })?;
    let mut first_error = None;
    let mut written = 0;
    for (t, result) in results.into_iter().enumerate() {
        match result {
            Ok(trial) => {
                writer
                    .write_record(&trial.record)
                    .map_err(|e| CliError::Io { path: csv_path.clone(), source: e.into() })?;
                write_file(&out.join("solutions").join(format!("trial-{t:04}.txt")), &trial.solution)?;
                if let Some(graph) = &trial.graph {
                    write_file(&out.join("graphs").join(format!("trial-{t:04}.graph")), graph)?;
                }
                if let Some(trace) = &trial.trace {
                    write_file(&out.join("traces").join(format!("trial-{t:04}.csv")), trace)?;
                }
                written += 1;
            }
            Err(e) => {
                if first_error.is_none() {
                    first_error = Some(e);
                }
            }
        }
    }
    writer.flush().map_err(io_err(&csv_path))?;
    match first_error {
        Some(e) => Err(e),
        None => Ok(written),
    }
}
