//! The experiments behind each command. Every function is deterministic
//! in its configuration; wall-clock time is only ever reported separately.

use std::path::Path;
use std::time::Instant;

use k4free_core::dem::{
    builtin_triple_specs, transform_increments, validate_spec, ChecklistReport,
};
use k4free_core::density::{
    check_event_d, check_event_m, check_event_n, edge_set_probability, quadruple_deletion_repair,
    xi_quadruple_stats, DensityReport, EdgeSetReport, QuadrupleRepair, XiStats,
};
use k4free_core::rng::{self, lane};
use k4free_core::sigma_star::{build_sigma_star, SigmaStarResult};
use k4free_core::stats::{
    certify_graph, certify_k4_free, fit_exponent, independence_lower, triangle_coverage,
    Certificate, CertifyMode, ExponentFit, K4Guard,
};
use k4free_core::trajectory::{EnvelopeConfig, EnvelopeMonitor, EnvelopeReport};
use k4free_core::triples::{
    BadEventStatus, Configuration, LedgerCounters, LedgerRow, TrackerOptions, Transition,
    TripleTracker,
};
use k4free_core::{AdjMatrix, Pair, ParamSet, ProcessState, RunSummary, StepObserver, StopRule};
use rand::seq::{index, SliceRandom};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, SigmaSource};
use crate::error::config as config_error;
use crate::error::Result;
use crate::formats::{parse_edge_list, read_text};

/// Exact independence search gives up after this many progress polls.
const EXACT_ALPHA_POLLS: u64 = 4096;

/// One run with the K4 guard attached.
pub struct RunOutcome {
    pub state: ProcessState,
    pub summary: RunSummary,
    pub certified_steps: usize,
}

pub fn run_guarded(
    n: usize,
    seed: u64,
    run_index: u64,
    stop: StopRule,
    extra: &mut [&mut dyn StepObserver],
) -> Result<RunOutcome> {
    let started = Instant::now();
    let mut state = ProcessState::with_stream(n, seed, run_index)?;
    let mut guard = K4Guard::default();
    let mut observers: Vec<&mut dyn StepObserver> = Vec::with_capacity(extra.len() + 1);
    observers.push(&mut guard);
    for o in extra.iter_mut() {
        observers.push(&mut **o);
    }
    let mut summary = state.run(stop, &mut observers)?;
    summary.elapsed_secs = Some(started.elapsed().as_secs_f64());
    Ok(RunOutcome {
        state,
        summary,
        certified_steps: guard.steps_certified,
    })
}

/// Summary with the clock reading removed, for deterministic output.
pub fn without_clock(mut s: RunSummary) -> RunSummary {
    s.elapsed_secs = None;
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulateOutput {
    pub params: ParamSet,
    pub stop: String,
    pub summary: RunSummary,
    pub edges: usize,
    pub certified_steps: usize,
    pub certificate: Certificate,
}

pub fn simulate(cfg: &ExperimentConfig) -> Result<(SimulateOutput, Vec<Pair>, f64)> {
    let n = cfg.ns[0];
    let params = cfg.params(n)?;
    let out = run_guarded(n, cfg.seed, 0, cfg.stop, &mut [])?;
    let elapsed = out.summary.elapsed_secs.unwrap_or(0.0);
    let mut r = rng::fork(cfg.seed, 0, lane::CERTIFY);
    let certificate = certify_k4_free(&out.state, CertifyMode::Exhaustive, &mut r);
    Ok((
        SimulateOutput {
            params,
            stop: crate::config::stop_name(cfg.stop),
            edges: out.state.adjacency().edge_count(),
            summary: without_clock(out.summary),
            certified_steps: out.certified_steps,
            certificate,
        },
        out.state.history().to_vec(),
        elapsed,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n: usize,
    pub seed: u64,
    pub run: u64,
    pub steps: usize,
    pub edges: usize,
    pub maxdeg: usize,
    pub mindeg: usize,
    pub alpha_greedy: usize,
    pub alpha_exact: Option<usize>,
    pub tri_cov: Option<f64>,
    pub terminated: bool,
    pub certified_steps: usize,
    pub k4_free: bool,
    pub maximal: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepMean {
    pub n: usize,
    pub runs: usize,
    pub edges: f64,
    pub maxdeg: f64,
    pub mindeg: f64,
    pub alpha_greedy: f64,
    /// Mean over runs of `maxdeg / mindeg`.
    pub degree_ratio: f64,
    /// `alpha_greedy / (n^{2/5} (ln n)^{4/5})`.
    pub alpha_ratio: f64,
    pub tri_cov: Option<f64>,
    /// Runs that terminated, certified K4-free and maximal.
    pub certified: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepFits {
    pub edges: Option<ExponentFit>,
    pub maxdeg: Option<ExponentFit>,
    pub alpha_greedy: Option<ExponentFit>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub params: Vec<ParamSet>,
    pub stop: String,
    pub records: Vec<SweepRecord>,
    pub means: Vec<SweepMean>,
    pub fits: SweepFits,
}

pub fn sweep_job(
    params: &ParamSet,
    seed: u64,
    run: u64,
    stop: StopRule,
    subset_samples: usize,
) -> Result<SweepRecord> {
    let n = params.n;
    let out = run_guarded(n, seed, run, stop, &mut [])?;
    let g = out.state.adjacency();
    let mut ind_rng = rng::fork(seed, run, lane::INDEPENDENCE);
    let mut polls = 0u64;
    let ind = independence_lower(g, &mut ind_rng, &mut || {
        polls += 1;
        polls <= EXACT_ALPHA_POLLS
    });
    let tri_cov = if subset_samples > 0 && params.u <= n {
        let mut cov_rng = rng::fork(seed, run, lane::COVERAGE);
        Some(triangle_coverage(g, params.u, subset_samples, &mut cov_rng)?.rate)
    } else {
        None
    };
    let mut cert_rng = rng::fork(seed, run, lane::CERTIFY);
    let cert = certify_k4_free(&out.state, CertifyMode::Exhaustive, &mut cert_rng);
    Ok(SweepRecord {
        n,
        seed,
        run,
        steps: out.summary.steps,
        edges: g.edge_count(),
        maxdeg: g.max_degree(),
        mindeg: g.min_degree(),
        alpha_greedy: ind.greedy,
        alpha_exact: ind.exact,
        tri_cov,
        terminated: out.summary.terminated,
        certified_steps: out.certified_steps,
        k4_free: cert.k4_free,
        maximal: cert.maximal,
    })
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| config_error(format!("cannot start worker pool: {e}")))
}

pub fn sweep(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    let params: Vec<ParamSet> = cfg
        .ns
        .iter()
        .map(|&n| cfg.params(n))
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, u64)> = (0..params.len())
        .flat_map(|i| (0..cfg.runs as u64).map(move |r| (i, r)))
        .collect();
    let records: Vec<SweepRecord> = pool(cfg.workers)?.install(|| {
        jobs.par_iter()
            .map(|&(i, r)| sweep_job(&params[i], cfg.seed, r, cfg.stop, cfg.subset_samples))
            .collect::<Result<Vec<_>>>()
    })?;
    let means = sweep_means(&records);
    let fits = sweep_fits(&means);
    Ok(SweepOutput {
        params,
        stop: crate::config::stop_name(cfg.stop),
        records,
        means,
        fits,
    })
}

pub fn sweep_means(records: &[SweepRecord]) -> Vec<SweepMean> {
    let mut ns: Vec<usize> = records.iter().map(|r| r.n).collect();
    ns.dedup();
    ns.iter()
        .map(|&n| {
            let rs: Vec<&SweepRecord> = records.iter().filter(|r| r.n == n).collect();
            let k = rs.len() as f64;
            let mean = |f: &dyn Fn(&SweepRecord) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / k;
            let covs: Vec<f64> = rs.iter().filter_map(|r| r.tri_cov).collect();
            SweepMean {
                n,
                runs: rs.len(),
                edges: mean(&|r| r.edges as f64),
                maxdeg: mean(&|r| r.maxdeg as f64),
                mindeg: mean(&|r| r.mindeg as f64),
                alpha_greedy: mean(&|r| r.alpha_greedy as f64),
                degree_ratio: mean(&|r| r.maxdeg as f64 / (r.mindeg.max(1)) as f64),
                alpha_ratio: mean(&|r| r.alpha_greedy as f64) / alpha_benchmark(n),
                tri_cov: (!covs.is_empty()).then(|| covs.iter().sum::<f64>() / covs.len() as f64),
                certified: rs
                    .iter()
                    .filter(|r| r.terminated && r.k4_free && r.maximal == Some(true))
                    .count(),
            }
        })
        .collect()
}

/// `n^{2/5} (ln n)^{4/5}`.
pub fn alpha_benchmark(n: usize) -> f64 {
    let nf = n as f64;
    nf.powf(0.4) * nf.ln().powf(0.8)
}

pub fn sweep_fits(means: &[SweepMean]) -> SweepFits {
    let fit = |f: &dyn Fn(&SweepMean) -> f64| {
        let pts: Vec<(f64, f64)> = means.iter().map(|m| (m.n as f64, f(m))).collect();
        fit_exponent(&pts).ok()
    };
    SweepFits {
        edges: fit(&|m| m.edges),
        maxdeg: fit(&|m| m.maxdeg),
        alpha_greedy: fit(&|m| m.alpha_greedy),
    }
}

/// Summary of the compensated sums of one ledger variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub variable: String,
    pub steps: usize,
    #[serde(rename = "M")]
    pub m_bound: f64,
    #[serde(rename = "N")]
    pub n_bound: f64,
    pub a: f64,
    pub frozen_at: Option<usize>,
    pub out_of_bounds: usize,
    pub max_excursion: f64,
    pub reached_a: bool,
    pub m_le_n_over_10: bool,
    /// `Z^{++}, Z^{+-}, Z^{-+}, Z^{--}` at the last audited step.
    pub final_z: [f64; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackOutput {
    pub params: ParamSet,
    pub stop: String,
    pub sigma: Configuration,
    pub sigma_star: Option<SigmaStarResult>,
    pub summary: RunSummary,
    pub rows: Vec<LedgerRow>,
    pub counters: LedgerCounters,
    pub bad_events: BadEventStatus,
    pub audits: Vec<AuditSummary>,
    pub envelope: EnvelopeReport,
}

/// Random `U` of size `u` and the greedy configuration built on the empty
/// graph.
pub fn auto_sigma(params: &ParamSet, seed: u64, run: u64) -> Result<SigmaStarResult> {
    let n = params.n;
    if params.u > n {
        return Err(config_error(format!(
            "u = {} exceeds n = {n}; lower gamma",
            params.u
        )));
    }
    let mut r = rng::fork(seed, run, lane::SUBSETS);
    let mut u: Vec<u32> = index::sample(&mut r, n, params.u)
        .iter()
        .map(|x| x as u32)
        .collect();
    u.sort_unstable();
    let empty = ProcessState::new(n, seed)?;
    let res = build_sigma_star(&empty, &u, params)?;
    if !res.feasible {
        return Err(config_error(format!(
            "configuration construction failed: {}",
            res.diagnostic.clone().unwrap_or_default()
        )));
    }
    Ok(res)
}

pub fn sigma_from_file(path: &Path, n: usize) -> Result<Configuration> {
    let sigma: Configuration = serde_json::from_str(&read_text(path)?)?;
    sigma.validate(n)?;
    Ok(sigma)
}

/// Tracks the three ledgers of one configuration along one run.
pub fn track(cfg: &ExperimentConfig) -> Result<TrackOutput> {
    let n = cfg.ns[0];
    let params = cfg.params(n)?;
    let (sigma, sigma_star) = match &cfg.sigma {
        SigmaSource::Auto => {
            let res = auto_sigma(&params, cfg.seed, 0)?;
            (res.sigma.clone(), Some(res))
        }
        SigmaSource::File(p) => (sigma_from_file(p, n)?, None),
    };
    track_with(
        &params,
        cfg.seed,
        0,
        cfg.stop,
        sigma,
        sigma_star,
        cfg.check_interval,
        cfg.pair_samples,
    )
}

#[allow(clippy::too_many_arguments)]
pub fn track_with(
    params: &ParamSet,
    seed: u64,
    run: u64,
    stop: StopRule,
    sigma: Configuration,
    sigma_star: Option<SigmaStarResult>,
    check_interval: Option<usize>,
    pair_samples: usize,
) -> Result<TrackOutput> {
    let n = params.n;
    let interval = check_interval.unwrap_or((params.m / 200).max(1));
    let state = ProcessState::with_stream(n, seed, run)?;
    let options = TrackerOptions {
        check_interval: Some(interval),
        row_stride: Some(interval),
        record_transitions: true,
        thresholds: None,
    };
    let mut tracker = TripleTracker::attach(&state, sigma.clone(), params, options)?;
    let env_cfg = EnvelopeConfig {
        sample_pairs: pair_samples,
        stride: interval,
        horizon: None,
    };
    let mut envelope = EnvelopeMonitor::new(params.clone(), env_cfg, seed, run);
    envelope.observe(&state);
    let mut out = run_guarded(n, seed, run, stop, &mut [&mut tracker, &mut envelope])?;
    tracker.finish(&out.state);
    let audits = audit_ledgers(
        params,
        tracker.transitions(),
        tracker.bad_events().first_step(),
    )?;
    out.summary = without_clock(out.summary);
    Ok(TrackOutput {
        params: params.clone(),
        stop: crate::config::stop_name(stop),
        sigma,
        sigma_star,
        summary: out.summary,
        rows: tracker.rows().to_vec(),
        counters: *tracker.counters(),
        bad_events: *tracker.bad_events(),
        audits,
        envelope: envelope.into_report(),
    })
}

/// Feeds the recorded per-step ledger changes through the martingale
/// transform, frozen from the first latched bad event on.
pub fn audit_ledgers(
    params: &ParamSet,
    transitions: &[Transition],
    freeze_at: Option<usize>,
) -> Result<Vec<AuditSummary>> {
    let specs = builtin_triple_specs(params);
    let mut out = Vec::new();
    for (i, spec) in specs.iter().enumerate() {
        let horizon = transitions.len().min(spec.m as usize);
        let obs: Vec<(f64, f64)> = transitions[..horizon]
            .iter()
            .map(|t| match i {
                0 => (t.open_plus as f64, t.open_minus as f64),
                1 => (t.interm_plus as f64, t.interm_minus as f64),
                _ => (t.partial_plus as f64, t.partial_minus as f64),
            })
            .collect();
        let audit = transform_increments(spec, &obs, freeze_at)?;
        let last = |z: &Vec<f64>| *z.last().unwrap_or(&0.0);
        out.push(AuditSummary {
            variable: spec.name.clone(),
            steps: obs.len(),
            m_bound: audit.m_bound,
            n_bound: audit.n_bound,
            a: audit.a,
            frozen_at: audit.frozen_at,
            out_of_bounds: audit.out_of_bounds.len(),
            max_excursion: audit.max_excursion,
            reached_a: audit.reached_a,
            m_le_n_over_10: audit.m_le_n_over_10,
            final_z: [
                last(&audit.z_pp),
                last(&audit.z_pm),
                last(&audit.z_mp),
                last(&audit.z_mm),
            ],
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemCheckEntry {
    pub n: usize,
    pub report: ChecklistReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemCheckOutput {
    pub params: Vec<ParamSet>,
    pub checks: Vec<DemCheckEntry>,
}

pub fn dem_check(cfg: &ExperimentConfig) -> Result<DemCheckOutput> {
    let mut params = Vec::new();
    let mut checks = Vec::new();
    for &n in &cfg.ns {
        let p = cfg.params(n)?;
        for spec in builtin_triple_specs(&p) {
            checks.push(DemCheckEntry {
                n,
                report: validate_spec(&spec),
            });
        }
        params.push(p);
    }
    Ok(DemCheckOutput { params, checks })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityOutput {
    pub params: ParamSet,
    pub summary: RunSummary,
    pub reports: Vec<DensityReport>,
    pub sigma: Configuration,
    pub xi: XiStats,
    pub repair: QuadrupleRepair,
    pub edge_sets: Vec<EdgeSetReport>,
}

/// Random disjoint `A, B, C` of size `k` inside a random `u`-set.
pub fn random_configuration(params: &ParamSet, seed: u64, run: u64) -> Result<Configuration> {
    let n = params.n;
    let k = params.k;
    if 3 * k > n {
        return Err(config_error(format!("3k = {} exceeds n = {n}", 3 * k)));
    }
    let mut r = rng::fork(seed, run, lane::DENSITY);
    let size = params.u.clamp(3 * k, n);
    let mut u: Vec<u32> = index::sample(&mut r, n, size)
        .iter()
        .map(|x| x as u32)
        .collect();
    u.shuffle(&mut r);
    let part = |i: usize| {
        let mut v = u[i * k..(i + 1) * k].to_vec();
        v.sort_unstable();
        v
    };
    let (a, b, c) = (part(0), part(1), part(2));
    u.sort_unstable();
    Ok(Configuration::new(u, a, b, c)?)
}

pub fn density_check(cfg: &ExperimentConfig) -> Result<DensityOutput> {
    let n = cfg.ns[0];
    let params = cfg.params(n)?;
    let out = run_guarded(n, cfg.seed, 0, cfg.stop, &mut [])?;
    let g = out.state.adjacency();
    let mut r = rng::fork(cfg.seed, 0, lane::DENSITY);
    let samples = cfg.subset_samples;
    let reports = vec![
        check_event_d(g, &params, samples, &mut r),
        check_event_n(g, &params, samples, &mut r),
        check_event_m(g, &params, samples.min(50), &mut r),
    ];
    let sigma = match &cfg.sigma {
        SigmaSource::Auto => random_configuration(&params, cfg.seed, 0)?,
        SigmaSource::File(p) => sigma_from_file(p, n)?,
    };
    let xi = xi_quadruple_stats(g, &sigma);
    let repair = quadruple_deletion_repair(g, &sigma, &params);
    let edge_sets = if cfg.runs > 1 {
        let single = [Pair::new(0, 1)];
        let star = [Pair::new(0, 1), Pair::new(0, 2), Pair::new(0, 3)];
        vec![
            edge_set_probability(n, cfg.runs, &single, &params, cfg.seed)?,
            edge_set_probability(n, cfg.runs, &star, &params, cfg.seed)?,
        ]
    } else {
        Vec::new()
    };
    Ok(DensityOutput {
        params,
        summary: without_clock(out.summary),
        reports,
        sigma,
        xi,
        repair,
        edge_sets,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyOutput {
    pub params: ParamSet,
    pub n: usize,
    pub seed: u64,
    pub edges: usize,
    pub source: String,
    pub certificate: Certificate,
}

pub fn certify(cfg: &ExperimentConfig) -> Result<CertifyOutput> {
    let mut r = rng::fork(cfg.seed, 0, lane::CERTIFY);
    let (n, seed, edges, source, certificate) = match &cfg.input {
        Some(path) => {
            let list = parse_edge_list(&path.display().to_string(), &read_text(path)?)?;
            let g = AdjMatrix::from_edges(list.n, list.edges.iter().copied())?;
            let cert = certify_graph(&g, CertifyMode::Exhaustive, &mut r);
            (
                list.n,
                list.seed,
                g.edge_count(),
                path.display().to_string(),
                cert,
            )
        }
        None => {
            let n = cfg.ns[0];
            let out = run_guarded(n, cfg.seed, 0, cfg.stop, &mut [])?;
            let cert = certify_k4_free(&out.state, CertifyMode::Exhaustive, &mut r);
            (
                n,
                cfg.seed,
                out.state.adjacency().edge_count(),
                "simulation".to_string(),
                cert,
            )
        }
    };
    Ok(CertifyOutput {
        params: cfg.params(n)?,
        n,
        seed,
        edges,
        source,
        certificate,
    })
}
