//! Acceptance criteria. Each test writes one `PASS`/`FAIL` line to stderr
//! (bypassing output capture) and then asserts the criterion.

use std::collections::BTreeSet;
use std::io::Write;
use std::sync::OnceLock;

use k4free_core::dem::{
    builtin_triple_specs, hoeffding_bound, synthetic_tails, validate_spec, CheckStatus,
};
use k4free_core::interval::{product_envelope, reciprocal_envelope, Inclusion, PmInterval};
use k4free_core::oracle::{
    self, closed_by_brute_force, reclassify_brute_force, NaiveGraph, ReferenceLedger,
};
use k4free_core::rng::{self, lane};
use k4free_core::stats::{certify_k4_free, triangle_coverage, CertifyMode, K4Guard};
use k4free_core::trajectory::q;
use k4free_core::triples::{Configuration, TrackerOptions, TripleStatus, TripleTracker};
use k4free_core::{Pair, PairClass, ParamSet, ProcessState, StopRule};
use k4free_lab::config::{Command, ExperimentConfig};
use k4free_lab::experiments::{auto_sigma, run_guarded, sweep, SweepOutput};
use rand::seq::SliceRandom;
use rand::Rng;

fn report(criterion: u32, pass: bool, text: &str) {
    let line = format!(
        "criterion {criterion:>2} {}: {text}\n",
        if pass { "PASS" } else { "FAIL" }
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
}

/// Shared record of graph certifications for criterion 11.
#[derive(Clone, Copy, Debug, Default)]
struct CertTally {
    runs: usize,
    steps_certified: usize,
    steps_taken: usize,
    terminal_k4_free: usize,
    terminal_maximal: usize,
    terminated: usize,
}

impl CertTally {
    fn ok(&self) -> bool {
        self.steps_certified == self.steps_taken
            && self.terminal_k4_free == self.runs
            && self.terminal_maximal == self.terminated
    }

    fn add(&mut self, other: CertTally) {
        self.runs += other.runs;
        self.steps_certified += other.steps_certified;
        self.steps_taken += other.steps_taken;
        self.terminal_k4_free += other.terminal_k4_free;
        self.terminal_maximal += other.terminal_maximal;
        self.terminated += other.terminated;
    }
}

// ---------------------------------------------------------------- 1, 2, 3

const SWEEP_NS: &str = "256,512,1024,2048,4096";
const SWEEP_RUNS: &str = "20";
const SWEEP_SEED: &str = "20240601";
const EDGE_SLOPE: (f64, f64) = (1.52, 1.68);
const MAXDEG_SLOPE: (f64, f64) = (0.52, 0.68);
const DEGREE_RATIO_MAX: f64 = 3.0;
const ALPHA_SLOPE: (f64, f64) = (0.34, 0.48);

fn shared_sweep() -> &'static SweepOutput {
    static SWEEP: OnceLock<SweepOutput> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let mut cfg = ExperimentConfig::new(Command::Sweep);
        for (k, v) in [
            ("n", SWEEP_NS),
            ("runs", SWEEP_RUNS),
            ("seed", SWEEP_SEED),
            ("subset-samples", "0"),
        ] {
            cfg.apply(k, v).unwrap();
        }
        sweep(&cfg).unwrap()
    })
}

fn sweep_tally() -> CertTally {
    let mut t = CertTally::default();
    for r in &shared_sweep().records {
        t.runs += 1;
        t.steps_taken += r.steps;
        t.steps_certified += r.certified_steps;
        t.terminal_k4_free += r.k4_free as usize;
        t.terminated += r.terminated as usize;
        t.terminal_maximal += (r.maximal == Some(true)) as usize;
    }
    t
}

fn within(x: f64, (lo, hi): (f64, f64)) -> bool {
    lo <= x && x <= hi
}

#[test]
fn criterion_01_edge_count_scaling() {
    let s = shared_sweep();
    let fit = s.fits.edges.unwrap();
    let pass = within(fit.slope, EDGE_SLOPE) && s.records.iter().all(|r| r.terminated);
    report(
        1,
        pass,
        &format!(
            "edges slope {:.4} ± {:.4}, required [{}, {}]",
            fit.slope, fit.stderr, EDGE_SLOPE.0, EDGE_SLOPE.1
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_02_max_degree_scaling() {
    let s = shared_sweep();
    let fit = s.fits.maxdeg.unwrap();
    let top = s.means.iter().find(|m| m.n == 4096).unwrap();
    let pass = within(fit.slope, MAXDEG_SLOPE) && top.degree_ratio <= DEGREE_RATIO_MAX;
    report(
        2,
        pass,
        &format!(
            "maxdeg slope {:.4} ± {:.4}, required [{}, {}]; mean max/min at n=4096 {:.4} (≤ {DEGREE_RATIO_MAX})",
            fit.slope, fit.stderr, MAXDEG_SLOPE.0, MAXDEG_SLOPE.1, top.degree_ratio
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_03_independence_scaling() {
    let s = shared_sweep();
    let fit = s.fits.alpha_greedy.unwrap();
    let ratios: Vec<String> = s
        .means
        .iter()
        .map(|m| format!("{}:{:.3}", m.n, m.alpha_ratio))
        .collect();
    let pass = within(fit.slope, ALPHA_SLOPE);
    report(
        3,
        pass,
        &format!(
            "greedy alpha slope {:.4} ± {:.4}, required [{}, {}]; alpha/(n^0.4 ln^0.8 n) {}",
            fit.slope,
            fit.stderr,
            ALPHA_SLOPE.0,
            ALPHA_SLOPE.1,
            ratios.join(" ")
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------- 4

struct OracleOutcome {
    mismatches: usize,
    closure_checks: usize,
    class_checks: usize,
    tally: CertTally,
}

fn oracle_equivalence() -> &'static OracleOutcome {
    static OUT: OnceLock<OracleOutcome> = OnceLock::new();
    OUT.get_or_init(|| {
        let mut out = OracleOutcome {
            mismatches: 0,
            closure_checks: 0,
            class_checks: 0,
            tally: CertTally::default(),
        };
        for n in 6..=12usize {
            for seed in 0..100u64 {
                let mut state = ProcessState::with_stream(n, seed, 0).unwrap();
                let mut naive = NaiveGraph::new(n);
                let mut guard = K4Guard::default();
                while let Some(chosen) = state.draw() {
                    let ev = state.prepare(chosen).unwrap();
                    let mut got = ev.newly_closed.clone();
                    got.sort_unstable();
                    let mut expected = closed_by_brute_force(&state, chosen);
                    expected.sort_unstable();
                    let mut direct = state.closed_by(chosen).unwrap();
                    direct.sort_unstable();
                    out.closure_checks += 1;
                    out.mismatches += (got != expected || direct != expected) as usize;
                    {
                        use k4free_core::StepObserver;
                        guard.before_commit(&state, &ev).unwrap();
                        state.commit(&ev);
                        guard.after_commit(&state, &ev).unwrap();
                    }
                    naive.add(chosen.u, chosen.v);
                    let brute = reclassify_brute_force(state.adjacency());
                    let mut idx = 0;
                    for a in 0..n as u32 {
                        for b in a + 1..n as u32 {
                            let c = state.class(Pair::new(a, b));
                            out.class_checks += 1;
                            out.mismatches += (c != naive.class(a, b) || c != brute[idx]) as usize;
                            idx += 1;
                        }
                    }
                    out.mismatches += naive.find_k4().is_some() as usize;
                }
                let terminal_open = (0..n as u32)
                    .flat_map(|a| (a + 1..n as u32).map(move |b| (a, b)))
                    .filter(|&(a, b)| naive.class(a, b) == PairClass::Open)
                    .count();
                let mut r = rng::fork(seed, 0, lane::CERTIFY);
                let cert = certify_k4_free(&state, CertifyMode::Exhaustive, &mut r);
                out.tally.add(CertTally {
                    runs: 1,
                    steps_certified: guard.steps_certified,
                    steps_taken: state.step_index(),
                    terminal_k4_free: cert.k4_free as usize,
                    terminal_maximal: (cert.maximal == Some(true) && terminal_open == 0) as usize,
                    terminated: state.is_terminated() as usize,
                });
            }
        }
        out
    })
}

#[test]
fn criterion_04_oracle_equivalence() {
    let o = oracle_equivalence();
    let pass = o.mismatches == 0 && o.tally.runs == 700;
    report(
        4,
        pass,
        &format!(
            "{} runs, {} closing-set and {} pair-class comparisons, {} mismatches",
            o.tally.runs, o.closure_checks, o.class_checks, o.mismatches
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------- 5

struct LedgerOutcome {
    runs: usize,
    steps: usize,
    violations: usize,
    tally: CertTally,
}

fn random_sigma(n: usize, k: usize, seed: u64) -> Configuration {
    let mut r = rng::fork(seed, 0, lane::SUBSETS);
    let mut vs: Vec<u32> = (0..n as u32).collect();
    vs.shuffle(&mut r);
    Configuration::from_parts(
        vs[..k].to_vec(),
        vs[k..2 * k].to_vec(),
        vs[2 * k..3 * k].to_vec(),
    )
    .unwrap()
}

fn ledger_equivalence() -> &'static LedgerOutcome {
    static OUT: OnceLock<LedgerOutcome> = OnceLock::new();
    OUT.get_or_init(|| {
        let mut out = LedgerOutcome {
            runs: 0,
            steps: 0,
            violations: 0,
            tally: CertTally::default(),
        };
        for n in 10..=14usize {
            let params = ParamSet::desk(n).unwrap();
            for seed in 0..50u64 {
                let sigma = random_sigma(n, 2, seed);
                let mut state = ProcessState::with_stream(n, seed, 0).unwrap();
                let options = TrackerOptions {
                    check_interval: Some(1),
                    ..TrackerOptions::default()
                };
                let mut tracker =
                    TripleTracker::attach(&state, sigma.clone(), &params, options).unwrap();
                let mut reference = ReferenceLedger::new(n, sigma.clone(), *tracker.thresholds());
                let mut guard = K4Guard::default();
                let mut ever: BTreeSet<(u32, u32)> = BTreeSet::new();
                let mut left: BTreeSet<(u32, u32)> = BTreeSet::new();
                let mut bad = 0;
                while let Some(chosen) = state.draw() {
                    use k4free_core::StepObserver;
                    let ev = state.prepare(chosen).unwrap();
                    guard.before_commit(&state, &ev).unwrap();
                    tracker.on_step(&state, &ev).unwrap();
                    state.commit(&ev);
                    guard.after_commit(&state, &ev).unwrap();
                    tracker.after_step(&state, &ev).unwrap();
                    bad += reference.step(chosen).len();
                    out.steps += 1;

                    let g = &reference.graph;
                    let set = |s| tracker.triples(s).into_iter().collect::<BTreeSet<_>>();
                    bad += (set(TripleStatus::Open) != oracle::open_triples(g, &sigma)) as usize;
                    bad +=
                        (set(TripleStatus::Interm) != oracle::interm_triples(g, &sigma)) as usize;
                    let partial = set(TripleStatus::Partial);
                    bad += (partial != reference.partial_set()) as usize;
                    let pairs: BTreeSet<(u32, u32)> =
                        partial.iter().map(|&(u, v, _)| (u, v)).collect();
                    bad += (pairs.len() != partial.len()) as usize;
                    for gone in ever.difference(&pairs) {
                        left.insert(*gone);
                    }
                    bad += pairs.intersection(&left).count();
                    ever.extend(pairs.iter().copied());
                }
                bad += tracker.counters().reentries;
                out.violations += bad;
                out.runs += 1;
                let mut r = rng::fork(seed, 0, lane::CERTIFY);
                let cert = certify_k4_free(&state, CertifyMode::Exhaustive, &mut r);
                out.tally.add(CertTally {
                    runs: 1,
                    steps_certified: guard.steps_certified,
                    steps_taken: state.step_index(),
                    terminal_k4_free: cert.k4_free as usize,
                    terminal_maximal: (cert.maximal == Some(true)) as usize,
                    terminated: state.is_terminated() as usize,
                });
            }
        }
        out
    })
}

#[test]
fn criterion_05_ledger_equivalence() {
    let o = ledger_equivalence();
    let pass = o.violations == 0 && o.runs == 250;
    report(
        5,
        pass,
        &format!(
            "{} runs, {} steps compared against definitions and replay, {} violations",
            o.runs, o.steps, o.violations
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------- 6

const TRAJ_N: usize = 2048;
const TRAJ_PILOT_SEED: u64 = 9001;
const TRAJ_PILOT_RUNS: u64 = 5;
const TRAJ_SEED: u64 = 9002;
const TRAJ_RUNS: u64 = 10;
/// Scaled-time checkpoints `0.05, 0.10, …, 1.00`.
const TRAJ_CHECKPOINTS: usize = 20;
/// Frozen band half-width is this multiple of the largest pilot deviation,
/// plus one triple's worth of normalised count.
const BAND_FACTOR: f64 = 2.0;
/// Largest tolerated fraction of acceptance points outside a frozen band.
const BAND_MISS_MAX: f64 = 0.05;

/// Frozen from `trajectory_pilot` (`cargo test -p k4free-lab --test
/// acceptance -- --ignored --nocapture`).
const OPEN_PAIR_TOL: [f64; TRAJ_CHECKPOINTS] = [
    0.010450905856058679,
    0.01993830427827481,
    0.029512485778186992,
    0.039217023289511266,
    0.04837812304833422,
    0.05375473129877806,
    0.05063649776261414,
    0.027489593108494415,
    0.040010658679674904,
    0.17719837570012675,
    0.4540367276247035,
    0.996214346341934,
    2.087773705039643,
    4.488048671647755,
    10.606374252162981,
    29.52277708855942,
    105.56244457923385,
    518.0724120311861,
    3301.119848638481,
    2.0,
];
/// Target for the open-pair relative deviation.
const OPEN_PAIR_TARGET: f64 = 0.10;
const BAND_OPEN: [f64; TRAJ_CHECKPOINTS] = [
    0.03582185207685079,
    0.06155874888165874,
    0.08901956619347501,
    0.13455176330183655,
    0.16233925786430287,
    0.17655174371071786,
    0.14899292997838792,
    0.11672515215899631,
    0.06910404629864747,
    0.16025819822165882,
    0.14288348337985857,
    0.11183688905240995,
    0.050152204836257853,
    0.023965372352843146,
    0.007384805535321115,
    0.0026663714312627484,
    0.0002962974221684888,
    0.00029629629727713063,
    0.00029629629629644445,
    0.0002962962962962963,
];
const BAND_INTERM: [f64; TRAJ_CHECKPOINTS] = [
    0.20625344492033074,
    0.40612746538814637,
    0.6047992149463115,
    0.6229527876612477,
    0.4875639763808757,
    0.566000026377644,
    0.5015690315561664,
    0.5837042295729059,
    0.4530766084232211,
    0.29638952786169065,
    0.36742385919021836,
    0.34490521346970576,
    0.2805941064225706,
    0.18099416347560976,
    0.09232090650575052,
    0.056209623797535184,
    0.04378579634625003,
    0.01876631234311359,
    0.006255444977353514,
    0.006255444910381416,
];
const BAND_PARTIAL: [f64; TRAJ_CHECKPOINTS] = [
    0.3861972841399779,
    0.3562036336281302,
    0.3063065177368739,
    0.29124863829080483,
    0.41420461431548605,
    0.4783375501296524,
    0.7380861549037984,
    1.1735728691341407,
    0.849800340195012,
    0.8461925321344105,
    1.1760162215296979,
    1.301871333918832,
    1.4528362785729168,
    1.8478223969568597,
    1.9304943935056746,
    1.9674565347163315,
    1.9785999119070508,
    1.9807306652127945,
    1.980971009746161,
    1.9809857205598154,
];

fn checkpoint_t(j: usize) -> f64 {
    0.05 * (j + 1) as f64
}

/// Reference curves for the normalised ledgers.
fn ledger_curves(t: f64) -> [f64; 3] {
    let qt = q(t);
    [qt * qt * qt, 2.0 * t * qt * qt, 2.0 * t * t * qt]
}

#[derive(Clone, Debug)]
struct TrajectoryRun {
    /// `|O(i)| / (q(t) n²/2) − 1` per checkpoint.
    open_pair_dev: Vec<f64>,
    /// Normalised ledger minus reference curve, per checkpoint.
    ledger_dev: Vec<[f64; 3]>,
    scales: [f64; 3],
    tally: CertTally,
}

fn trajectory_run(master: u64, run: u64) -> TrajectoryRun {
    let params = ParamSet::desk(TRAJ_N).unwrap();
    let sigma = auto_sigma(&params, master, run).unwrap().sigma;
    let k = params.k as f64;
    let scales = [
        k * k * k,
        k * k * k * params.p,
        k * k * k * params.p * params.p,
    ];
    let mut state = ProcessState::with_stream(TRAJ_N, master, run).unwrap();
    let options = TrackerOptions {
        check_interval: Some(params.m / 200),
        ..TrackerOptions::default()
    };
    let mut tracker = TripleTracker::attach(&state, sigma, &params, options).unwrap();
    let mut guard = K4Guard::default();
    let unit = params.time_unit();
    let mut out = TrajectoryRun {
        open_pair_dev: Vec::new(),
        ledger_dev: Vec::new(),
        scales,
        tally: CertTally::default(),
    };
    for j in 0..TRAJ_CHECKPOINTS {
        let t = checkpoint_t(j);
        let target = (t * unit).floor() as usize;
        state
            .run(
                StopRule::AfterSteps(target),
                &mut [&mut guard, &mut tracker],
            )
            .unwrap();
        let expected = q(t) * (TRAJ_N * TRAJ_N) as f64 / 2.0;
        out.open_pair_dev
            .push(state.open_count() as f64 / expected - 1.0);
        let (open, interm, partial, _) = tracker.counts(&state);
        let curves = ledger_curves(t);
        let counts = [open as f64, interm as f64, partial as f64];
        out.ledger_dev
            .push([0, 1, 2].map(|i| counts[i] / scales[i] - curves[i]));
        if j == 3 || j == 9 {
            let mut r = rng::fork(master, run, lane::CERTIFY);
            let cert = certify_k4_free(&state, CertifyMode::Exhaustive, &mut r);
            out.tally.terminal_k4_free += cert.k4_free as usize;
            out.tally.runs += 1;
        }
    }
    state.run(StopRule::Termination, &mut [&mut guard]).unwrap();
    let mut r = rng::fork(master, run, lane::CERTIFY);
    let cert = certify_k4_free(&state, CertifyMode::Exhaustive, &mut r);
    out.tally.runs += 1;
    out.tally.terminal_k4_free += cert.k4_free as usize;
    out.tally.terminated += 1;
    out.tally.terminal_maximal += (cert.maximal == Some(true)) as usize;
    out.tally.steps_taken = state.step_index();
    out.tally.steps_certified = guard.steps_certified;
    out
}

fn trajectory_acceptance_runs() -> &'static Vec<TrajectoryRun> {
    static RUNS: OnceLock<Vec<TrajectoryRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        (0..TRAJ_RUNS)
            .map(|r| trajectory_run(TRAJ_SEED, r))
            .collect()
    })
}

#[test]
#[ignore = "pilot calibration for criterion 6; prints the constants to freeze"]
fn trajectory_pilot() {
    let runs: Vec<TrajectoryRun> = (0..TRAJ_PILOT_RUNS)
        .map(|r| trajectory_run(TRAJ_PILOT_SEED, r))
        .collect();
    let open_tol: Vec<String> = (0..TRAJ_CHECKPOINTS)
        .map(|j| {
            let dev = runs
                .iter()
                .fold(0.0f64, |a, r| a.max(r.open_pair_dev[j].abs()));
            format!("{:?}", BAND_FACTOR * dev)
        })
        .collect();
    println!(
        "const OPEN_PAIR_TOL: [f64; TRAJ_CHECKPOINTS] = [{}];",
        open_tol.join(", ")
    );
    for (i, name) in ["BAND_OPEN", "BAND_INTERM", "BAND_PARTIAL"]
        .iter()
        .enumerate()
    {
        let band: Vec<String> = (0..TRAJ_CHECKPOINTS)
            .map(|j| {
                let dev = runs
                    .iter()
                    .fold(0.0f64, |a, r| a.max(r.ledger_dev[j][i].abs()));
                format!("{:?}", BAND_FACTOR * dev + 1.0 / runs[0].scales[i])
            })
            .collect();
        println!(
            "const {name}: [f64; TRAJ_CHECKPOINTS] = [{}];",
            band.join(", ")
        );
    }
}

#[test]
fn criterion_06_trajectory_tracking() {
    let runs = trajectory_acceptance_runs();
    let bands = [BAND_OPEN, BAND_INTERM, BAND_PARTIAL];
    let points = runs.len() * TRAJ_CHECKPOINTS;
    let open_misses: usize = runs
        .iter()
        .map(|r| {
            (0..TRAJ_CHECKPOINTS)
                .filter(|&j| r.open_pair_dev[j].abs() > OPEN_PAIR_TOL[j])
                .count()
        })
        .sum();
    // Last checkpoint up to which every run meets the open-pair target.
    let target_until = (0..TRAJ_CHECKPOINTS)
        .take_while(|&j| {
            runs.iter()
                .all(|r| r.open_pair_dev[j].abs() <= OPEN_PAIR_TARGET)
        })
        .last()
        .map_or(0.0, checkpoint_t);
    for (r, run) in runs.iter().enumerate() {
        for (j, (dev, tol)) in run.open_pair_dev.iter().zip(OPEN_PAIR_TOL).enumerate() {
            if dev.abs() > tol {
                eprintln!(
                    "open-pair miss: run {r} t={:.2} dev {dev} tol {tol}",
                    checkpoint_t(j)
                );
            }
        }
    }
    let mut fractions = [0.0; 3];
    for (i, f) in fractions.iter_mut().enumerate() {
        let misses: usize = runs
            .iter()
            .map(|r| {
                (0..TRAJ_CHECKPOINTS)
                    .filter(|&j| r.ledger_dev[j][i].abs() > bands[i][j])
                    .count()
            })
            .sum();
        *f = misses as f64 / points as f64;
    }
    let pass = open_misses == 0 && fractions.iter().all(|&f| f <= BAND_MISS_MAX);
    report(
        6,
        pass,
        &format!(
            "n={TRAJ_N}, {} runs x {TRAJ_CHECKPOINTS} checkpoints: |O| outside pilot tolerance {open_misses}, \
             |O| within {OPEN_PAIR_TARGET} of q(t)n^2/2 up to t={target_until:.2}; outside-band fractions \
             open {:.3} interm {:.3} partial {:.3} (max {BAND_MISS_MAX})",
            runs.len(),
            fractions[0],
            fractions[1],
            fractions[2]
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------- 7

const INTERVAL_TUPLES: usize = 100_000;

#[test]
fn criterion_07_interval_lemmas() {
    let mut r = rng::fork(7, 0, lane::SYNTHETIC);
    let mut failures = 0;
    let mut unmet = 0;
    for i in 0..INTERVAL_TUPLES {
        match i % 3 {
            0 => {
                let x = r.gen_range(0.0..100.0);
                let y = r.gen_range(0.0..100.0);
                let fx = r.gen_range(0.0..10.0);
                let fy = r.gen_range(0.0..10.0);
                let g = r.gen_range(0.0..=1.0);
                let need: f64 = x * fy + y * fx + fx * fy + x * y * g;
                let h = 2.0 * need.max(fx + x * g) * (1.0 + r.gen_range(0.0..2.0));
                let rep = product_envelope(x, y, fx, fy, g, h).unwrap();
                for case in [rep.single, rep.double] {
                    match case.outcome {
                        Inclusion::Holds => {}
                        Inclusion::Violated => failures += 1,
                        Inclusion::HypothesisNotMet => unmet += 1,
                    }
                }
            }
            1 => {
                let x = r.gen_range(0.0..=0.5);
                let (computed, claimed) = reciprocal_envelope(x).unwrap();
                failures += !claimed.contains(&computed) as usize;
            }
            _ => {
                let a = PmInterval::new(r.gen_range(-5.0..5.0), r.gen_range(0.0..3.0)).unwrap();
                let b = PmInterval::new(r.gen_range(-5.0..5.0), r.gen_range(0.0..3.0)).unwrap();
                let prod = a.mul(&b);
                let va = a.lo() + r.gen_range(0.0..=1.0) * (a.hi() - a.lo());
                let vb = b.lo() + r.gen_range(0.0..=1.0) * (b.hi() - b.lo());
                let v = va * vb;
                failures += !(prod.lo() <= v + 1e-9 && v <= prod.hi() + 1e-9) as usize;
            }
        }
    }
    let pass = failures == 0 && unmet == 0;
    report(
        7,
        pass,
        &format!(
            "{INTERVAL_TUPLES} tuples, {failures} inclusion failures, {unmet} unmet hypotheses"
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------- 8

const MARTINGALE_TRIALS: usize = 10_000;
/// `(m, M, N)`, each with `M ≤ N/10`.
const MARTINGALE_SETTINGS: [(usize, f64, f64); 3] =
    [(100, 1.0, 10.0), (400, 0.5, 8.0), (1000, 0.1, 1.0)];

#[test]
fn criterion_08_martingale_bound() {
    let mut worst = f64::NEG_INFINITY;
    let mut failures = 0;
    let mut tested = 0;
    for (s, &(m, big_m, big_n)) in MARTINGALE_SETTINGS.iter().enumerate() {
        assert!(big_m <= big_n / 10.0);
        let cap = m as f64 * big_m;
        let grid: Vec<f64> = (1..=12).map(|i| cap * i as f64 / 13.0).collect();
        let mut r = rng::fork(8, s as u64, lane::SYNTHETIC);
        for p in synthetic_tails(m, big_m, big_n, MARTINGALE_TRIALS, &grid, &mut r).unwrap() {
            assert!(
                hoeffding_bound(p.a, m as f64, big_m, big_n)
                    .unwrap()
                    .hypothesis_ok
            );
            tested += 1;
            failures += (p.empirical > p.bound) as usize;
            worst = worst.max(p.empirical - p.bound);
        }
    }
    let pass = failures == 0;
    report(
        8,
        pass,
        &format!(
            "{} settings x {MARTINGALE_TRIALS} walks, {tested} tail points, {failures} above bound \
             (largest empirical - bound {worst:.4})",
            MARTINGALE_SETTINGS.len()
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------- 9

#[test]
fn criterion_09_dem_spec_validation() {
    let paper = ParamSet::paper(1_000_000).unwrap();
    let mut failing = Vec::new();
    for spec in builtin_triple_specs(&paper) {
        let rep = validate_spec(&spec);
        for item in rep.failing() {
            failing.push(format!("{}.{item}", spec.name));
        }
    }
    let mut grid_failures = Vec::new();
    for params in [
        paper,
        ParamSet::desk(1024).unwrap(),
        ParamSet::desk(4096).unwrap(),
    ] {
        for spec in builtin_triple_specs(&params) {
            let rep = validate_spec(&spec);
            for item in ["derivative_identity", "f_integral"] {
                if rep.get(item).map(|c| c.status) != Some(CheckStatus::Pass) {
                    grid_failures.push(format!("{}:{}.{item}", params.mode.name(), spec.name));
                }
            }
        }
    }
    let pass = failing.is_empty() && grid_failures.is_empty();
    report(
        9,
        pass,
        &format!(
            "paper n=10^6 failing items [{}]; identity/f-integral grid failures [{}]",
            failing.join(", "),
            grid_failures.join(", ")
        ),
    );
    assert!(pass);
}

// --------------------------------------------------------------------- 10

const COVERAGE_N: usize = 1024;
const COVERAGE_SEED: u64 = 1010;
const COVERAGE_RUNS: u64 = 10;
const COVERAGE_SAMPLES: usize = 200;

struct CoverageOutcome {
    rates: Vec<f64>,
    misses: Vec<Vec<u32>>,
    tally: CertTally,
}

fn coverage_runs() -> &'static CoverageOutcome {
    static OUT: OnceLock<CoverageOutcome> = OnceLock::new();
    OUT.get_or_init(|| {
        let params = ParamSet::desk(COVERAGE_N).unwrap();
        let mut out = CoverageOutcome {
            rates: Vec::new(),
            misses: Vec::new(),
            tally: CertTally::default(),
        };
        for run in 0..COVERAGE_RUNS {
            let o = run_guarded(
                COVERAGE_N,
                COVERAGE_SEED,
                run,
                StopRule::Termination,
                &mut [],
            )
            .unwrap();
            let mut r = rng::fork(COVERAGE_SEED, run, lane::COVERAGE);
            let cov =
                triangle_coverage(o.state.adjacency(), params.u, COVERAGE_SAMPLES, &mut r).unwrap();
            out.rates.push(cov.rate);
            out.misses.extend(cov.misses);
            let mut r = rng::fork(COVERAGE_SEED, run, lane::CERTIFY);
            let cert = certify_k4_free(&o.state, CertifyMode::Exhaustive, &mut r);
            out.tally.add(CertTally {
                runs: 1,
                steps_certified: o.certified_steps,
                steps_taken: o.summary.steps,
                terminal_k4_free: cert.k4_free as usize,
                terminal_maximal: (cert.maximal == Some(true)) as usize,
                terminated: o.summary.terminated as usize,
            });
        }
        out
    })
}

#[test]
fn criterion_10_triangle_coverage() {
    let o = coverage_runs();
    let pass = o.rates.iter().all(|&r| r == 1.0) && o.tally.terminated == COVERAGE_RUNS as usize;
    let witness = o
        .misses
        .first()
        .map(|m| format!("; first miss {m:?}"))
        .unwrap_or_default();
    report(
        10,
        pass,
        &format!(
            "n={COVERAGE_N}, {} runs x {COVERAGE_SAMPLES} subsets of size u={}: min rate {}{witness}",
            o.rates.len(),
            ParamSet::desk(COVERAGE_N).unwrap().u,
            o.rates.iter().cloned().fold(1.0, f64::min)
        ),
    );
    assert!(pass);
}

// --------------------------------------------------------------------- 11

#[test]
fn criterion_11_k4_free_certification() {
    let mut parts = vec![
        ("sweep", sweep_tally()),
        ("oracle", oracle_equivalence().tally),
        ("ledger", ledger_equivalence().tally),
        ("coverage", coverage_runs().tally),
    ];
    let mut traj = CertTally::default();
    for r in trajectory_acceptance_runs() {
        traj.add(r.tally);
    }
    parts.push(("trajectory", traj));
    let mut total = CertTally::default();
    for (_, t) in &parts {
        total.add(*t);
    }
    let pass = parts.iter().all(|(_, t)| t.ok()) && total.terminated > 0;
    let failing: Vec<&str> = parts
        .iter()
        .filter(|(_, t)| !t.ok())
        .map(|(name, _)| *name)
        .collect();
    report(
        11,
        pass,
        &format!(
            "{} certificates, {} guarded steps of {}, {} terminal states maximal of {} terminated{}",
            total.runs,
            total.steps_certified,
            total.steps_taken,
            total.terminal_maximal,
            total.terminated,
            if failing.is_empty() { String::new() } else { format!("; failing groups {failing:?}") }
        ),
    );
    assert!(pass);
}
