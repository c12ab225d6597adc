use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use super::generate::{generate, Generator, InstanceSpec};
use super::stats::{loglog_slope, ExperimentReport, TrialRow};
use super::{trial_rng, LabError};
use crate::mix::{derive_key, domain};
use crate::protocol::{combine_alignments, run_protocol, tau_for, ProtocolParams, Verdict, DEFAULT_C_WALK};
use crate::recovery::{Decoded, DiffSketch, RecoveryParams, Sign, TupleKey};
use crate::strings::{apply_script, distance_table, greedy_optimal_matching, InputString};
use crate::walk::{walk_single, PairWalker, WalkRandomness};
use crate::walk_sketch::simulate_walk;

/// Numeric parameters of one run. Every value an experiment reads is
/// recorded in its report; values it never reads are rejected.
#[derive(Debug, Clone, Default)]
pub struct ExperimentParams {
    seed: u64,
    trials: Option<u64>,
    values: BTreeMap<String, f64>,
    used: RefCell<BTreeMap<String, f64>>,
}

impl ExperimentParams {
    pub fn new(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn trials(mut self, trials: u64) -> Self {
        self.trials = Some(trials);
        self
    }

    pub fn set(mut self, key: &str, value: f64) -> Self {
        self.values.insert(key.to_string(), value);
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn real(&self, key: &str, default: f64) -> f64 {
        let v = self.values.get(key).copied().unwrap_or(default);
        self.used.borrow_mut().insert(key.to_string(), v);
        v
    }

    fn count(&self, key: &str, default: usize) -> Result<usize, LabError> {
        let v = self.real(key, default as f64);
        if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
            Ok(v as usize)
        } else {
            Err(LabError::InvalidParam(format!("{key} = {v} is not a count")))
        }
    }

    fn probability(&self, key: &str, default: f64) -> Result<f64, LabError> {
        let v = self.real(key, default);
        if v > 0.0 && v < 1.0 {
            Ok(v)
        } else {
            Err(LabError::InvalidParam(format!("{key} = {v} is not in (0, 1)")))
        }
    }
}

pub struct ExperimentInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub default_trials: u64,
    run: fn(&ExperimentParams, u64) -> Result<Outcome, LabError>,
}

struct Outcome {
    rows: Vec<TrialRow>,
    metrics: BTreeMap<String, f64>,
}

impl Outcome {
    fn new<const N: usize>(rows: Vec<TrialRow>, metrics: [(&str, f64); N]) -> Self {
        Self { rows, metrics: metrics.into_iter().map(|(k, v)| (k.to_string(), v)).collect() }
    }
}

static EXPERIMENTS: &[ExperimentInfo] = &[
    ExperimentInfo {
        name: "gambler_ruin",
        summary: "lazy +-1 walk from 0 absorbed at -a or b: frequency of hitting b, mean absorption time",
        default_trials: 100_000,
        run: gambler_ruin,
    },
    ExperimentInfo {
        name: "walk_through",
        summary: "a walk of factor*n steps reaches the end of a random string",
        default_trials: 10_000,
        run: walk_through,
    },
    ExperimentInfo {
        name: "progress_tail",
        summary: "tail of the progress-step count for pairs at a planted distance",
        default_trials: 10_000,
        run: progress_tail,
    },
    ExperimentInfo {
        name: "gap_transitions",
        summary: "change of p - q on progress steps: -1, 0, +1",
        default_trials: 100_000,
        run: gap_transitions,
    },
    ExperimentInfo {
        name: "cursor_gap",
        summary: "mean |p - q| when p first reaches u, against 4 ed of the prefixes",
        default_trials: 20,
        run: cursor_gap,
    },
    ExperimentInfo {
        name: "entry_gap",
        summary: "first entry into the stable zone of a non-optimal edge avoids its diagonal",
        default_trials: 10_000,
        run: entry_gap,
    },
    ExperimentInfo {
        name: "edge_miss",
        summary: "a walk misses a non-optimal edge with few progress steps",
        default_trials: 10_000,
        run: edge_miss,
    },
    ExperimentInfo {
        name: "self_similar_miss",
        summary: "a walk on a self-similar string started offset apart misses (L, L)",
        default_trials: 10_000,
        run: self_similar_miss,
    },
    ExperimentInfo {
        name: "roundtrip",
        summary: "end-to-end protocol on planted pairs: exact distance and a replaying script",
        default_trials: 100,
        run: roundtrip,
    },
    ExperimentInfo {
        name: "error_soundness",
        summary: "end-to-end protocol on independent strings reports an error",
        default_trials: 100,
        run: error_soundness,
    },
    ExperimentInfo {
        name: "adversarial_excess",
        summary: "combined script on the periodic adversarial pair is longer than optimal",
        default_trials: 500,
        run: adversarial_excess,
    },
    ExperimentInfo {
        name: "recovery_exact",
        summary: "difference digest recovers set differences of size at most capacity",
        default_trials: 1_000,
        run: recovery_exact,
    },
    ExperimentInfo {
        name: "recovery_overload",
        summary: "difference digest fails on differences of multiple * capacity keys",
        default_trials: 10_000,
        run: recovery_overload,
    },
    ExperimentInfo {
        name: "sketch_size",
        summary: "sketch bytes for k = k_min, 2 k_min, ..., k_max and their log-log slope",
        default_trials: 1,
        run: sketch_size,
    },
];

pub fn experiments() -> &'static [ExperimentInfo] {
    EXPERIMENTS
}

pub fn run_experiment(name: &str, params: &ExperimentParams) -> Result<ExperimentReport, LabError> {
    let info = EXPERIMENTS
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| LabError::UnknownExperiment(name.to_string()))?;
    let trials = params.trials.unwrap_or(info.default_trials);
    if trials == 0 {
        return Err(LabError::InvalidParam("trials must be positive".into()));
    }
    params.used.borrow_mut().clear();
    let start = Instant::now();
    let outcome = (info.run)(params, trials)?;
    let runtime_ms = start.elapsed().as_millis() as u64;
    let used = params.used.borrow().clone();
    if let Some(unknown) = params.values.keys().find(|k| !used.contains_key(*k)) {
        return Err(LabError::InvalidParam(format!("{name} has no parameter {unknown:?}")));
    }
    let mut report = ExperimentReport::new(name, used, outcome.rows, outcome.metrics);
    report.params.insert("seed".into(), params.seed as f64);
    report.runtime_ms = runtime_ms;
    Ok(report)
}

/// Round trip success rates over a grid of walk-count factors and budget
/// multipliers.
pub fn calibrate(
    base: &ExperimentParams,
    tau_factors: &[f64],
    c_walks: &[usize],
) -> Result<Vec<ExperimentReport>, LabError> {
    let mut out = Vec::new();
    for &f in tau_factors {
        for &c in c_walks {
            let params = base.clone().set("tau_factor", f).set("c_walk", c as f64);
            out.push(run_experiment("roundtrip", &params)?);
        }
    }
    Ok(out)
}

/// Exact one-party sketch bytes for each `k`.
pub fn sketch_sizes(n: usize, delta: f64, ks: &[usize]) -> Result<Vec<(usize, usize)>, LabError> {
    ks.iter().map(|&k| Ok((k, ProtocolParams::new(n, k, delta, 0)?.sketch_bytes()?))).collect()
}

fn par_trials(trials: u64, f: impl Fn(u64) -> TrialRow + Sync + Send) -> Vec<TrialRow> {
    (0..trials).into_par_iter().map(f).collect()
}

fn coins(seed: u64, trial: u64) -> WalkRandomness {
    WalkRandomness::new(u128::from(derive_key(u128::from(seed), domain::LAB, u64::MAX)), trial)
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

fn gambler_ruin(p: &ExperimentParams, trials: u64) -> Result<Outcome, LabError> {
    let a = p.count("a", 3)? as i64;
    let b = p.count("b", 5)? as i64;
    if a + b == 0 {
        return Err(LabError::InvalidParam("a + b must be positive".into()));
    }
    let seed = p.seed();
    let rows = par_trials(trials, |t| {
        let mut rng = trial_rng(seed, t);
        let (mut x, mut steps) = (0i64, 0u64);
        while x > -a && x < b {
            x += match rng.gen_range(0..4) {
                0 => -1,
                1 => 1,
                _ => 0,
            };
            steps += 1;
        }
        TrialRow { trial: t, success: x == b, value: steps as f64 }
    });
    let mean_steps = mean(rows.iter().map(|r| r.value));
    let (a, b) = (a as f64, b as f64);
    Ok(Outcome::new(
        rows,
        [("mean_steps", mean_steps), ("expected_hit_b", a / (a + b)), ("expected_steps", 2.0 * a * b)],
    ))
}

fn walk_through(p: &ExperimentParams, trials: u64) -> Result<Outcome, LabError> {
    let n = p.count("n", 1024)?;
    let sigma = p.count("alphabet", 4)?.max(2) as u32;
    let factor = p.count("steps_factor", 3)?;
    let seed = p.seed();
    let rows = par_trials(trials, |t| {
        let mut rng = trial_rng(seed, t);
        let s: InputString = (0..n).map(|_| rng.gen_range(0..sigma)).collect::<Vec<_>>().into();
        let m = factor * n;
        let (_, cursors) = walk_single(&s, &coins(seed, t), m);
        let last = cursors[m.saturating_sub(1)];
        TrialRow { trial: t, success: last >= n, value: last as f64 }
    });
    Ok(Outcome::new(rows, []))
}

/// A fixed pool of planted pairs, walk `t` runs on pair `t mod pool`.
fn planted_pool(seed: u64, count: usize, n: usize, edits: usize, alphabet: u64) -> Result<Vec<(InputString, InputString)>, LabError> {
    (0..count as u64)
        .map(|i| {
            let spec = InstanceSpec::new(Generator::RandomEdits { edits }, n, alphabet, derive_key(u128::from(seed), domain::LAB, i));
            generate(&spec).map(|inst| (inst.x, inst.y))
        })
        .collect()
}

/// Runs until both cursors are past the ends, after which no step can be a
/// progress step.
fn run_out<'a>(x: &'a InputString, y: &'a InputString, c: WalkRandomness) -> PairWalker<'a, WalkRandomness> {
    let mut w = PairWalker::new(x, y, c);
    let limit = 1000 * (x.len() + y.len()) as u64 + 1000;
    w.run_until(limit, |(p, q)| p > x.len() && q > y.len());
    w
}

fn progress_tail(p: &ExperimentParams, trials: u64) -> Result<Outcome, LabError> {
    let n = p.count("n", 1024)?;
    let e = p.count("ed", 4)?;
    let alphabet = p.count("alphabet", 4)? as u64;
    let pool = planted_pool(p.seed(), p.count("instances", 20)?.max(1), n, e, alphabet)?;
    let seed = p.seed();
    let rows = par_trials(trials, |t| {
        let (x, y) = &pool[t as usize % pool.len()];
        let w = run_out(x, y, coins(seed, t));
        let progress = w.progress_steps();
        TrialRow { trial: t, success: progress >= (2 * e * 2 * e) as u64, value: progress as f64 }
    });
    let tail = |big_t: usize| {
        let threshold = (big_t * e).pow(2) as f64;
        rows.iter().filter(|r| r.value >= threshold).count() as f64 / rows.len() as f64
    };
    let (t2, t4, t8) = (tail(2), tail(4), tail(8));
    let fitted_c = (2.0 * t2).max(4.0 * t4).max(8.0 * t8);
    let mean_progress = mean(rows.iter().map(|r| r.value));
    Ok(Outcome::new(
        rows,
        [("tail_t2", t2), ("tail_t4", t4), ("tail_t8", t8), ("fitted_c", fitted_c), ("mean_progress", mean_progress)],
    ))
}

fn gap_transitions(p: &ExperimentParams, trials: u64) -> Result<Outcome, LabError> {
    let n = p.count("n", 512)?;
    let e = p.count("ed", 4)?;
    let alphabet = p.count("alphabet", 4)? as u64;
    let pool = planted_pool(p.seed(), 20, n, e, alphabet)?;
    let seed = p.seed();
    let mut rows = Vec::with_capacity(trials as usize);
    let mut walk = 0u64;
    while (rows.len() as u64) < trials {
        let batch: Vec<Vec<i64>> = (walk..walk + 64)
            .into_par_iter()
            .map(|t| {
                let (x, y) = &pool[t as usize % pool.len()];
                let mut w = PairWalker::new(x, y, coins(seed, t));
                let mut changes = Vec::new();
                while !(w.state().0 > n && w.state().1 > n) {
                    let s = w.step();
                    if s.progress {
                        let before = s.from.0 as i64 - s.from.1 as i64;
                        let after = s.to.0 as i64 - s.to.1 as i64;
                        changes.push(after - before);
                    }
                }
                changes
            })
            .collect();
        walk += 64;
        for change in batch.into_iter().flatten() {
            if (rows.len() as u64) < trials {
                rows.push(TrialRow { trial: rows.len() as u64, success: change == 0, value: change as f64 });
            }
        }
    }
    let freq = |c: f64| rows.iter().filter(|r| r.value == c).count() as f64 / rows.len() as f64;
    let (minus, plus) = (freq(-1.0), freq(1.0));
    Ok(Outcome::new(rows, [("freq_minus", minus), ("freq_plus", plus), ("walks", walk as f64)]))
}

fn cursor_gap(p: &ExperimentParams, trials: u64) -> Result<Outcome, LabError> {
    let n = p.count("n", 64)?;
    let e = p.count("ed", 4)?;
    let walks = p.count("walks", 2000)?.max(2) as u64;
    let alphabet = p.count("alphabet", 4)? as u64;
    let pool = planted_pool(p.seed(), trials as usize, n, e, alphabet)?;
    let seed = p.seed();
    let mut rows = Vec::new();
    let mut worst_ratio: f64 = 0.0;
    for (i, (x, y)) in pool.iter().enumerate() {
        let u = trial_rng(seed, i as u64).gen_range(2..=n);
        let table = distance_table(x, y);
        let width = y.len() + 1;
        let prefix_ed = (u - 1..=x.len())
            .flat_map(|a| (u - 1..=y.len()).map(move |b| (a, b)))
            .map(|(a, b)| table[a * width + b])
            .min()
            .unwrap_or(0) as f64;
        let bound = 4.0 * prefix_ed;
        let gaps: Vec<f64> = (0..walks)
            .into_par_iter()
            .map(|w| {
                let mut walker = PairWalker::new(x, y, coins(seed, (i as u64) << 32 | w));
                walker.run_until(u64::MAX, |(p, _)| p >= u);
                let (p, q) = walker.state();
                p.abs_diff(q) as f64
            })
            .collect();
        let m = mean(gaps.iter().copied());
        let var = gaps.iter().map(|g| (g - m).powi(2)).sum::<f64>() / (gaps.len() - 1) as f64;
        let se = (var / gaps.len() as f64).sqrt();
        if bound > 0.0 {
            worst_ratio = worst_ratio.max(m / bound);
        }
        rows.push(TrialRow { trial: i as u64, success: m <= bound + 3.0 * se, value: m });
    }
    Ok(Outcome::new(rows, [("worst_mean_over_bound", worst_ratio)]))
}

/// A planted pair with a non-optimal equal-character edge `(u, v)` and the
/// start `(u0, v0)` of its stable zone.
#[derive(Debug, Clone)]
struct ZoneInstance {
    x: InputString,
    y: InputString,
    u: usize,
    v: usize,
    u0: usize,
    v0: usize,
}

fn zone_instance(seed: u64, n: usize, edits: usize, alphabet: u64, max_shift: usize) -> Result<ZoneInstance, LabError> {
    for attempt in 0..100u64 {
        let spec = InstanceSpec::new(Generator::RandomEdits { edits }, n, alphabet, derive_key(u128::from(seed), domain::LAB, attempt));
        let inst = generate(&spec)?;
        let (x, y) = (inst.x, inst.y);
        let greedy = greedy_optimal_matching(&x, &y);
        let mut candidates = Vec::new();
        for u in 2..=n {
            for v in u.saturating_sub(max_shift).max(2)..=(u + max_shift).min(n) {
                if x.at(u) != y.at(v) || greedy.contains((u, v)) {
                    continue;
                }
                let mut len = 0;
                while len < u.min(v) && x.at(u - len) == y.at(v - len) {
                    len += 1;
                }
                let (u0, v0) = (u - len + 1, v - len + 1);
                if u0 >= 2 && v0 >= 2 {
                    candidates.push(ZoneInstance { x: x.clone(), y: y.clone(), u, v, u0, v0 });
                }
            }
        }
        if !candidates.is_empty() {
            let pick = trial_rng(seed, attempt).gen_range(0..candidates.len());
            return Ok(candidates.swap_remove(pick));
        }
    }
    Err(LabError::InvalidSpec("no non-optimal edge with a proper stable zone".into()))
}

fn zone_params(p: &ExperimentParams) -> Result<ZoneInstance, LabError> {
    let n = p.count("n", 48)?;
    let edits = p.count("ed", 3)?;
    let alphabet = p.count("alphabet", 3)? as u64;
    let shift = p.count("max_shift", 3)?;
    let instance = p.count("instance", 0)? as u64;
    zone_instance(derive_key(u128::from(p.seed()), domain::LAB, instance), n, edits, alphabet, shift)
}

fn zone_metrics<const N: usize>(z: &ZoneInstance, rows: Vec<TrialRow>, extra: [(&str, f64); N]) -> Outcome {
    let mut out = Outcome::new(
        rows,
        [("u", z.u as f64), ("v", z.v as f64), ("zone_u", z.u0 as f64), ("zone_v", z.v0 as f64)],
    );
    out.metrics.extend(extra.into_iter().map(|(k, v)| (k.to_string(), v)));
    out
}

fn entry_gap(p: &ExperimentParams, trials: u64) -> Result<Outcome, LabError> {
    let z = zone_params(p)?;
    let seed = p.seed();
    let diagonal = z.u as i64 - z.v as i64;
    let rows = par_trials(trials, |t| {
        let mut w = PairWalker::new(&z.x, &z.y, coins(seed, t));
        let entered = w.run_until(u64::MAX, |(p, q)| p >= z.u0 && q >= z.v0);
        let (p, q) = w.state();
        let gap = p as i64 - q as i64;
        TrialRow { trial: t, success: entered && gap != diagonal, value: gap as f64 }
    });
    Ok(zone_metrics(&z, rows, []))
}

fn edge_miss(p: &ExperimentParams, trials: u64) -> Result<Outcome, LabError> {
    let z = zone_params(p)?;
    let k = p.count("ed", 3)?;
    let budget = (p.count("c_walk", DEFAULT_C_WALK)? * k * k) as u64;
    let seed = p.seed();
    let rows = par_trials(trials, |t| {
        let mut w = PairWalker::new(&z.x, &z.y, coins(seed, t));
        let mut visited = false;
        let (lx, ly) = (z.x.len(), z.y.len());
        while !(w.state().0 > lx && w.state().1 > ly) {
            visited |= w.state() == (z.u, z.v);
            w.step();
        }
        let progress = w.progress_steps();
        TrialRow { trial: t, success: !visited && progress <= budget, value: progress as f64 }
    });
    let rate = rows.iter().filter(|r| r.success).count() as f64 / rows.len() as f64;
    Ok(zone_metrics(&z, rows, [("k_times_rate", k as f64 * rate)]))
}

fn self_similar_miss(p: &ExperimentParams, trials: u64) -> Result<Outcome, LabError> {
    let len = p.count("length", 512)?;
    let period = p.count("period", 4)?;
    let singletons = p.count("singletons", 0)?;
    let offset = p.count("offset", 16)?;
    let instance = p.count("instance", 0)? as u64;
    let spec = InstanceSpec::new(Generator::SelfSimilar { period, singletons }, len, 2, instance);
    let x = generate(&spec)?.x;
    // Unmatched characters, on both sides, of the matching (i + period, i).
    let edges = (1..=len.saturating_sub(period)).filter(|&i| x.at(i + period) == x.at(i)).count();
    let seed = p.seed();
    let rows = par_trials(trials, |t| {
        let mut w = PairWalker::starting_at(&x, &x, coins(seed, t), (1 + offset, 1));
        w.run_until(u64::MAX, |(p, q)| p > len || (p, q) == (len, len));
        let hit = w.state() == (len, len);
        TrialRow { trial: t, success: !hit, value: w.progress_steps() as f64 }
    });
    Ok(Outcome::new(rows, [("matching_singletons", (2 * (len - edges)) as f64)]))
}

struct RunSetup {
    n: usize,
    k: usize,
    delta: f64,
    tau_factor: f64,
    c_walk: usize,
    alphabet: u64,
}

fn run_setup(p: &ExperimentParams) -> Result<RunSetup, LabError> {
    Ok(RunSetup {
        n: p.count("n", 1024)?,
        k: p.count("k", 4)?,
        delta: p.probability("delta", 0.1)?,
        tau_factor: p.real("tau_factor", crate::protocol::DEFAULT_TAU_FACTOR),
        c_walk: p.count("c_walk", DEFAULT_C_WALK)?,
        alphabet: p.count("alphabet", 4)? as u64,
    })
}

impl RunSetup {
    fn params(&self, seed: u64, trial: u64) -> Result<ProtocolParams, LabError> {
        let tau = tau_for(self.tau_factor, self.n, self.k, self.delta);
        let shared = u128::from(derive_key(u128::from(seed), domain::LAB, trial)) << 64 | u128::from(trial);
        Ok(ProtocolParams::new(self.n, self.k, self.delta, shared)?.with_tau(tau)?.with_c_walk(self.c_walk)?)
    }
}

/// Whether a returned script is valid: it replays and its length is the
/// reported distance.
fn replays(x: &InputString, y: &InputString, verdict: &Verdict) -> bool {
    match verdict {
        Verdict::Result { distance, script } => {
            script.len() == *distance && apply_script(x, script).is_ok_and(|z| &z == y)
        }
        Verdict::ErrorReport { .. } => true,
    }
}

fn roundtrip(p: &ExperimentParams, trials: u64) -> Result<Outcome, LabError> {
    let setup = run_setup(p)?;
    let edits = p.count("edits", setup.k)?;
    let seed = p.seed();
    let probe = setup.params(seed, 0)?;
    let results: Vec<(TrialRow, [u32; 3], usize)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let spec = InstanceSpec::new(Generator::RandomEdits { edits }, setup.n, setup.alphabet, derive_key(u128::from(seed), domain::LAB, t));
            let inst = generate(&spec)?;
            let out = run_protocol(&inst.x, &inst.y, &setup.params(seed, t)?, Some(inst.alphabet))?;
            let valid = replays(&inst.x, &inst.y, &out.verdict);
            let exact = valid && out.verdict.distance().is_some() && out.verdict.distance() == inst.ground_truth;
            let flags = [u32::from(out.verdict.is_error()), u32::from(!valid), u32::from(valid && !out.verdict.is_error() && !exact)];
            let value = out.verdict.distance().map_or(-1.0, |d| d as f64);
            Ok((TrialRow { trial: t, success: exact, value }, flags, out.decoded_walks))
        })
        .collect::<Result<_, LabError>>()?;
    let count = |i: usize| results.iter().map(|r| r.1[i]).sum::<u32>() as f64;
    let decoded = mean(results.iter().map(|r| r.2 as f64));
    let rows: Vec<TrialRow> = results.iter().map(|r| r.0).collect();
    let rate = rows.iter().filter(|r| r.success).count() as f64 / rows.len() as f64;
    Ok(Outcome::new(
        rows,
        [
            ("success_rate", rate),
            ("error_reports", count(0)),
            ("invalid_results", count(1)),
            ("wrong_distance", count(2)),
            ("mean_decoded_walks", decoded),
            ("tau", probe.tau as f64),
            ("capacity", probe.capacity() as f64),
        ],
    ))
}

fn error_soundness(p: &ExperimentParams, trials: u64) -> Result<Outcome, LabError> {
    let setup = run_setup(p)?;
    let seed = p.seed();
    let results: Vec<(TrialRow, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let spec = InstanceSpec { generator: Generator::Independent, n: setup.n, alphabet: setup.alphabet.max(2), seed: derive_key(u128::from(seed), domain::LAB, t) };
            let inst = generate(&spec)?;
            let out = run_protocol(&inst.x, &inst.y, &setup.params(seed, t)?, Some(inst.alphabet))?;
            let value = out.verdict.distance().map_or(-1.0, |d| d as f64);
            Ok((TrialRow { trial: t, success: out.verdict.is_error(), value }, replays(&inst.x, &inst.y, &out.verdict)))
        })
        .collect::<Result<_, LabError>>()?;
    let invalid = results.iter().filter(|r| !r.1).count() as f64;
    let returned = results.iter().filter(|r| !r.0.success).count() as f64;
    let rows = results.into_iter().map(|r| r.0).collect();
    Ok(Outcome::new(rows, [("results_returned", returned), ("invalid_results", invalid)]))
}

fn adversarial_excess(p: &ExperimentParams, trials: u64) -> Result<Outcome, LabError> {
    let family_k = p.count("k", 8)?;
    let protocol_k = p.count("protocol_k", 2 * family_k)?;
    let delta = p.probability("delta", 0.1)?;
    let inst = generate(&InstanceSpec::new(Generator::PeriodicAdversarial { k: family_k }, 0, 2, 0))?;
    let optimum = inst.ground_truth.expect("short instances carry an oracle distance");
    let n = inst.x.len();
    let tau = match p.count("tau", 0)? {
        0 => tau_for(crate::protocol::DEFAULT_TAU_FACTOR, n, protocol_k, delta),
        t => t,
    };
    let seed = p.seed();
    let results: Vec<(TrialRow, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let shared = u128::from(derive_key(u128::from(seed), domain::LAB, t));
            let params = ProtocolParams::new(n, protocol_k, delta, shared)?.with_tau(tau)?;
            let alignments = (0..tau as u64)
                .map(|i| Ok(simulate_walk(&params.walk_params(i)?, &inst.x, &inst.y, Some(inst.alphabet)).ok()))
                .collect::<Result<Vec<_>, LabError>>()?
                .into_iter()
                .flatten()
                .collect::<Vec<_>>();
            let script = combine_alignments(&alignments, n, n).ok();
            let len = script.as_ref().map_or(-1.0, |s| s.len() as f64);
            let excess = script.as_ref().is_some_and(|s| s.len() > optimum);
            Ok((TrialRow { trial: t, success: excess, value: len }, script.is_none()))
        })
        .collect::<Result<_, LabError>>()?;
    let unresolved = results.iter().filter(|r| r.1).count() as f64;
    let rows = results.into_iter().map(|r| r.0).collect();
    Ok(Outcome::new(rows, [("optimum", optimum as f64), ("tau", tau as f64), ("no_script", unresolved)]))
}

fn random_key(rng: &mut impl Rng) -> TupleKey {
    TupleKey {
        depth: rng.gen_range(0..14),
        index: rng.gen_range(1..8192),
        hash: rng.gen(),
        length: rng.gen_range(1..6000),
        alpha: rng.gen(),
        beta: rng.gen(),
    }
}

fn recovery_exact(p: &ExperimentParams, trials: u64) -> Result<Outcome, LabError> {
    let capacity = p.count("capacity", 1000)?;
    let set_size = p.count("set_size", 500)?;
    let seed = p.seed();
    let rows = par_trials(trials, |t| {
        let mut rng = trial_rng(seed, t);
        let min_shared = set_size.saturating_sub(capacity / 2);
        let shared = if t % 4 == 0 { min_shared } else { rng.gen_range(min_shared..=set_size) };
        let mut pool = BTreeSet::new();
        while pool.len() < 2 * set_size - shared {
            pool.insert(random_key(&mut rng));
        }
        let pool: Vec<_> = pool.into_iter().collect();
        let (common, rest) = pool.split_at(shared);
        let (only_a, only_b) = rest.split_at(set_size - shared);
        let params = RecoveryParams::new(capacity, rng.gen());
        let sketch = |own: &[TupleKey]| {
            let mut s = DiffSketch::new(params);
            common.iter().chain(own).for_each(|k| s.insert(k));
            s
        };
        let diff = sketch(only_a).subtract(&sketch(only_b)).expect("same parameters");
        let mut expected: Vec<(TupleKey, Sign)> =
            only_a.iter().map(|&k| (k, Sign::Plus)).chain(only_b.iter().map(|&k| (k, Sign::Minus))).collect();
        expected.sort();
        let ok = match diff.into_decoded() {
            Decoded::Recovered(mut got) => {
                got.sort();
                got == expected
            }
            Decoded::Fail => false,
        };
        TrialRow { trial: t, success: ok, value: expected.len() as f64 }
    });
    let exactly_full = rows.iter().filter(|r| r.value as usize == capacity.min(2 * set_size)).count() as f64;
    Ok(Outcome::new(rows, [("trials_at_capacity", exactly_full)]))
}

fn recovery_overload(p: &ExperimentParams, trials: u64) -> Result<Outcome, LabError> {
    let capacity = p.count("capacity", 250)?;
    let multiple = p.count("multiple", 4)?;
    let seed = p.seed();
    let rows = par_trials(trials, |t| {
        let mut rng = trial_rng(seed, t);
        let mut d = DiffSketch::new(RecoveryParams::new(capacity, rng.gen()));
        let mut keys = BTreeSet::new();
        while keys.len() < multiple * capacity {
            keys.insert(random_key(&mut rng));
        }
        for k in &keys {
            if rng.gen() {
                d.insert(k);
            } else {
                d.remove(k);
            }
        }
        let failed = d.into_decoded() == Decoded::Fail;
        TrialRow { trial: t, success: failed, value: keys.len() as f64 }
    });
    Ok(Outcome::new(rows, []))
}

fn sketch_size(p: &ExperimentParams, _trials: u64) -> Result<Outcome, LabError> {
    let n = p.count("n", 4096)?;
    let delta = p.probability("delta", 0.1)?;
    let k_min = p.count("k_min", 2)?.max(1);
    let k_max = p.count("k_max", 16)?.max(k_min);
    let ks: Vec<usize> = std::iter::successors(Some(k_min), |&k| Some(2 * k)).take_while(|&k| k <= k_max).collect();
    let sizes = sketch_sizes(n, delta, &ks)?;
    let slope = if sizes.len() > 1 {
        loglog_slope(&sizes.iter().map(|&(k, b)| (k as f64, b as f64)).collect::<Vec<_>>())
    } else {
        f64::NAN
    };
    let rows = sizes.iter().enumerate().map(|(i, &(_, b))| TrialRow { trial: i as u64, success: true, value: b as f64 }).collect();
    let mut out = Outcome::new(rows, [("slope", slope)]);
    out.metrics.extend(sizes.iter().map(|&(k, b)| (format!("bytes_k{k}"), b as f64)));
    Ok(out)
}
