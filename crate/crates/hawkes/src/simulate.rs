//! Exact sampling of Hawkes population paths, by thinning and by the Poisson
//! cluster representation, plus the Monte Carlo estimators that serve as the
//! validation oracle for the transform and tail modules.
//!
//! Both samplers draw from counter-based streams keyed by `(seed,
//! replication, event)`, so a fixed `(model, horizon, seed)` triple always
//! yields a byte-identical path and replications may run on any number of
//! threads in any order.

use thiserror::Error;

use crate::model::{HawkesModel, ModelError};
use crate::rng::Stream;
use crate::stats;
use crate::ProcessKind;

/// Safety limit on events per path; heavy-tailed marks occasionally trigger
/// huge clusters even in stable models.
pub const DEFAULT_EVENT_CAP: usize = 1_000_000;

// stream key tags
const KEY_THINNING: u64 = 1;
const KEY_CLUSTER: u64 = 2;
const KEY_IMMIGRANTS: u64 = 3;
const KEY_REPLICATION: u64 = 4;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("event cap {cap} exceeded while growing a path")]
    EventCap { cap: usize },
    #[error("time {t} lies outside the path horizon [0, {horizon}]")]
    OutsideHorizon { t: f64, horizon: f64 },
}

/// One event of a sample path.
///
/// `marks[i]` is the intensity jump this event inflicted on component `i`;
/// storing the marks makes paths replayable: the intensity at any time can be
/// reconstructed exactly. Generation 0 events are immigrants.
#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    pub time: f64,
    pub component: usize,
    pub sojourn: f64,
    pub generation: u32,
    pub parent: Option<usize>,
    pub marks: Vec<f64>,
}

/// A simulated path over `[0, horizon]`, events sorted by time.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    pub horizon: f64,
    pub seed: u64,
    pub events: Vec<EventRecord>,
}

impl SamplePath {
    /// CSV export with header `event_id,time,component,generation,parent_id,sojourn`.
    ///
    /// Components are 1-based in the file; the parent field is empty for
    /// immigrants and the sojourn field reads `inf` when departures are
    /// disabled.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("event_id,time,component,generation,parent_id,sojourn\n");
        for (id, e) in self.events.iter().enumerate() {
            let parent = e.parent.map(|p| p.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{id},{},{},{},{parent},{}\n",
                e.time,
                e.component + 1,
                e.generation,
                e.sojourn
            ));
        }
        out
    }
}

/// Tuning knobs shared by the samplers.
#[derive(Debug, Clone, Copy)]
pub struct SimOptions {
    pub event_cap: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            event_cap: DEFAULT_EVENT_CAP,
        }
    }
}

/// Intensity vector at time `t` from the events so far. Events strictly
/// before `t` contribute `marks[i] * g(t - time)`; with `include_at_t` the
/// jump of an event placed exactly at `t` is included, giving the
/// right-continuous value used as a thinning bound.
fn intensities(
    model: &HawkesModel,
    events: &[EventRecord],
    t: f64,
    include_at_t: bool,
    out: &mut [f64],
) {
    out.copy_from_slice(&model.lambda_inf);
    for e in events {
        if e.time < t || (include_at_t && e.time == t) {
            let dt = t - e.time;
            for (i, acc) in out.iter_mut().enumerate() {
                let mark = e.marks[i];
                if mark > 0.0 {
                    *acc += mark * model.kernels[i][e.component].value(dt);
                }
            }
        }
    }
}

fn sample_marks(model: &HawkesModel, source: usize, rng: &mut Stream) -> Vec<f64> {
    (0..model.dimension())
        .map(|m| model.jumps[m][source].sample(rng))
        .collect()
}

fn thinning_core(
    model: &HawkesModel,
    horizon: f64,
    rng: &mut Stream,
    opts: &SimOptions,
    mut trace: Option<&mut Vec<Vec<f64>>>,
) -> Result<Vec<EventRecord>, SimError> {
    let d = model.dimension();
    let mut events: Vec<EventRecord> = Vec::new();
    let mut lam = vec![0.0; d];
    let mut t = 0.0;
    // kernels are non-increasing, so the intensity right after the latest
    // event dominates until the next one; refresh the bound at every
    // candidate, accepted or not
    let mut bound: f64 = model.lambda_inf.iter().sum();
    loop {
        let t_cand = t + rng.exponential(bound);
        if t_cand > horizon {
            break;
        }
        intensities(model, &events, t_cand, false, &mut lam);
        let total: f64 = lam.iter().sum();
        let u = rng.next_f64();
        t = t_cand;
        if u * bound > total {
            bound = total;
            continue;
        }

        // accepted: pick the component proportionally to lambda_i
        let mut pick = rng.next_f64() * total;
        let mut comp = d - 1;
        for (i, &li) in lam.iter().enumerate() {
            if pick < li {
                comp = i;
                break;
            }
            pick -= li;
        }

        // attribute the trigger: base rate means immigrant, otherwise the
        // past event whose excitation term the pointer lands in
        let mut attr = rng.next_f64() * lam[comp];
        let mut parent: Option<usize> = None;
        if attr >= model.lambda_inf[comp] {
            attr -= model.lambda_inf[comp];
            for (r, e) in events.iter().enumerate() {
                let contrib = e.marks[comp] * model.kernels[comp][e.component].value(t - e.time);
                if attr < contrib {
                    parent = Some(r);
                    break;
                }
                attr -= contrib;
            }
            if parent.is_none() {
                // pointer fell in the rounding slack at the top of the sum
                parent = events.len().checked_sub(1);
            }
        }
        let generation = parent.map(|p| events[p].generation + 1).unwrap_or(0);

        if let Some(tr) = trace.as_deref_mut() {
            tr.push(lam.clone());
        }

        let marks = sample_marks(model, comp, rng);
        let sojourn = model.sojourns[comp].sample(rng);
        bound = total
            + marks
                .iter()
                .enumerate()
                .map(|(m, &b)| {
                    if b > 0.0 {
                        b * model.kernels[m][comp].value(0.0)
                    } else {
                        0.0
                    }
                })
                .sum::<f64>();
        events.push(EventRecord {
            time: t,
            component: comp,
            sojourn,
            generation,
            parent,
            marks,
        });
        if events.len() > opts.event_cap {
            return Err(SimError::EventCap {
                cap: opts.event_cap,
            });
        }
    }
    Ok(events)
}

/// Exact sampler by thinning: candidates come from the current total
/// intensity, which dominates between events because the kernels are
/// non-increasing.
pub fn simulate_thinning(
    model: &HawkesModel,
    horizon: f64,
    seed: u64,
) -> Result<SamplePath, SimError> {
    simulate_thinning_opts(model, horizon, seed, &SimOptions::default())
}

pub fn simulate_thinning_opts(
    model: &HawkesModel,
    horizon: f64,
    seed: u64,
    opts: &SimOptions,
) -> Result<SamplePath, SimError> {
    assert!(horizon > 0.0, "horizon must be positive");
    model.ensure_admissible()?;
    model.ensure_stable()?;
    let mut rng = Stream::keyed(seed, &[KEY_THINNING]);
    let events = thinning_core(model, horizon, &mut rng, opts, None)?;
    Ok(SamplePath {
        horizon,
        seed,
        events,
    })
}

/// Thinning sampler that also returns, per accepted event, the intensity
/// vector at the acceptance time (left limit). Validation hook: it must match
/// the intensity reconstructed from the stored path.
pub fn simulate_thinning_traced(
    model: &HawkesModel,
    horizon: f64,
    seed: u64,
) -> Result<(SamplePath, Vec<Vec<f64>>), SimError> {
    assert!(horizon > 0.0, "horizon must be positive");
    model.ensure_admissible()?;
    model.ensure_stable()?;
    let mut rng = Stream::keyed(seed, &[KEY_THINNING]);
    let mut trace = Vec::new();
    let events = thinning_core(
        model,
        horizon,
        &mut rng,
        &SimOptions::default(),
        Some(&mut trace),
    )?;
    Ok((
        SamplePath {
            horizon,
            seed,
            events,
        },
        trace,
    ))
}

// Grows the cluster cascade breadth-first. Entry `k` of `events` gets its
// own stream keyed by `(seed, cluster tag, k)`: marks, sojourn, offspring
// counts, then arrival offsets.
fn grow_clusters(
    model: &HawkesModel,
    horizon: f64,
    seed: u64,
    mut events: Vec<EventRecord>,
    opts: &SimOptions,
) -> Result<Vec<EventRecord>, SimError> {
    let d = model.dimension();
    let mut next = 0usize;
    while next < events.len() {
        let idx = next;
        next += 1;
        let mut ev_rng = Stream::keyed(seed, &[KEY_CLUSTER, idx as u64]);
        let source = events[idx].component;
        let t0 = events[idx].time;
        let gen = events[idx].generation;
        let remaining = horizon - t0;

        let marks = sample_marks(model, source, &mut ev_rng);
        let sojourn = model.sojourns[source].sample(&mut ev_rng);
        events[idx].marks = marks.clone();
        events[idx].sojourn = sojourn;

        if remaining <= 0.0 {
            continue;
        }
        for m in 0..d {
            let kernel = &model.kernels[m][source];
            let mass = kernel.integral(remaining);
            if marks[m] <= 0.0 || mass <= 0.0 {
                continue;
            }
            // offspring into m form a Poisson process with intensity
            // B_m * g(.), so the count over the remaining window is Poisson
            // and arrival offsets are i.i.d. with density g / int g
            let count = ev_rng.poisson(marks[m] * mass);
            for _ in 0..count {
                let offset = kernel.offset_quantile(remaining, ev_rng.next_f64());
                events.push(EventRecord {
                    time: t0 + offset,
                    component: m,
                    sojourn: f64::NAN,
                    generation: gen + 1,
                    parent: Some(idx),
                    marks: Vec::new(),
                });
                if events.len() > opts.event_cap {
                    return Err(SimError::EventCap {
                        cap: opts.event_cap,
                    });
                }
            }
        }
    }
    Ok(events)
}

fn sort_and_relabel(mut events: Vec<EventRecord>) -> Vec<EventRecord> {
    let mut order: Vec<usize> = (0..events.len()).collect();
    order.sort_by(|&a, &b| {
        events[a]
            .time
            .total_cmp(&events[b].time)
            .then(a.cmp(&b))
    });
    let mut position = vec![0usize; events.len()];
    for (new_idx, &old_idx) in order.iter().enumerate() {
        position[old_idx] = new_idx;
    }
    let mut out: Vec<EventRecord> = Vec::with_capacity(events.len());
    for &old_idx in &order {
        let mut e = std::mem::replace(
            &mut events[old_idx],
            EventRecord {
                time: 0.0,
                component: 0,
                sojourn: 0.0,
                generation: 0,
                parent: None,
                marks: Vec::new(),
            },
        );
        e.parent = e.parent.map(|p| position[p]);
        out.push(e);
    }
    out
}

/// Exact sampler by the cluster representation: homogeneous Poisson
/// immigrants per component, each spawning a branching cascade of offspring.
/// Statistically indistinguishable from [`simulate_thinning`].
pub fn simulate_cluster(
    model: &HawkesModel,
    horizon: f64,
    seed: u64,
) -> Result<SamplePath, SimError> {
    simulate_cluster_opts(model, horizon, seed, &SimOptions::default())
}

pub fn simulate_cluster_opts(
    model: &HawkesModel,
    horizon: f64,
    seed: u64,
    opts: &SimOptions,
) -> Result<SamplePath, SimError> {
    assert!(horizon > 0.0, "horizon must be positive");
    model.ensure_admissible()?;
    model.ensure_stable()?;
    let d = model.dimension();
    let mut rng = Stream::keyed(seed, &[KEY_IMMIGRANTS]);
    let mut roots: Vec<(f64, usize)> = Vec::new();
    for j in 0..d {
        let count = rng.poisson(model.lambda_inf[j] * horizon);
        for _ in 0..count {
            roots.push((rng.uniform(0.0, horizon), j));
        }
    }
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    let immigrants: Vec<EventRecord> = roots
        .into_iter()
        .map(|(time, component)| EventRecord {
            time,
            component,
            sojourn: f64::NAN,
            generation: 0,
            parent: None,
            marks: Vec::new(),
        })
        .collect();
    let events = grow_clusters(model, horizon, seed, immigrants, opts)?;
    Ok(SamplePath {
        horizon,
        seed,
        events: sort_and_relabel(events),
    })
}

/// One cluster rooted at an immigrant in `source` at time zero, reduced to
/// its population counts and intensity load on a uniform age grid.
#[derive(Debug, Clone)]
pub struct ClusterSample {
    pub source: usize,
    pub horizon: f64,
    /// `counts_q[k][i]`: cluster members of component `i` still present at
    /// age `u_k` (the root counts itself, with its own sojourn, when
    /// `i == source`).
    pub counts_q: Vec<Vec<u64>>,
    /// `load_lambda[k][i]`: intensity load on component `i` at age `u_k` from
    /// the sampled marks; the root's own load is included at age zero.
    pub load_lambda: Vec<Vec<f64>>,
}

pub fn simulate_single_cluster(
    model: &HawkesModel,
    source: usize,
    horizon: f64,
    steps: usize,
    seed: u64,
) -> Result<ClusterSample, SimError> {
    simulate_single_cluster_opts(model, source, horizon, steps, seed, &SimOptions::default())
}

pub fn simulate_single_cluster_opts(
    model: &HawkesModel,
    source: usize,
    horizon: f64,
    steps: usize,
    seed: u64,
    opts: &SimOptions,
) -> Result<ClusterSample, SimError> {
    assert!(horizon > 0.0 && steps >= 1);
    model.ensure_admissible()?;
    model.ensure_stable()?;
    let d = model.dimension();
    let root = EventRecord {
        time: 0.0,
        component: source,
        sojourn: f64::NAN,
        generation: 0,
        parent: None,
        marks: Vec::new(),
    };
    let events = grow_clusters(model, horizon, seed, vec![root], opts)?;

    let h = horizon / steps as f64;
    let mut counts_q = vec![vec![0u64; d]; steps + 1];
    let mut load_lambda = vec![vec![0.0; d]; steps + 1];
    for (k, (counts, load)) in counts_q.iter_mut().zip(load_lambda.iter_mut()).enumerate() {
        let u = k as f64 * h;
        for e in &events {
            if e.time <= u && e.time + e.sojourn > u {
                counts[e.component] += 1;
            }
            // the root's load is part of the cluster from age zero on
            if e.time < u || (u == 0.0 && e.time == 0.0) {
                for (i, li) in load.iter_mut().enumerate() {
                    if e.marks[i] > 0.0 {
                        *li += e.marks[i] * model.kernels[i][e.component].value(u - e.time);
                    }
                }
            }
        }
    }
    Ok(ClusterSample {
        source,
        horizon,
        counts_q,
        load_lambda,
    })
}

/// Counting, population, and intensity vectors reconstructed from a path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathState {
    pub n: Vec<u64>,
    pub q: Vec<u64>,
    pub lambda: Vec<f64>,
}

/// State at time `t`: arrivals count events with `time <= t`, departures
/// count events with `time + sojourn <= t`, and the intensity sums the
/// stored marks over events strictly before `t`.
pub fn path_state(path: &SamplePath, model: &HawkesModel, t: f64) -> Result<PathState, SimError> {
    if !(0.0..=path.horizon).contains(&t) {
        return Err(SimError::OutsideHorizon {
            t,
            horizon: path.horizon,
        });
    }
    let d = model.dimension();
    let mut n = vec![0u64; d];
    let mut q = vec![0u64; d];
    let mut lambda = vec![0.0; d];
    intensities(model, &path.events, t, false, &mut lambda);
    for e in &path.events {
        if e.time <= t {
            n[e.component] += 1;
            if e.time + e.sojourn > t {
                q[e.component] += 1;
            }
        }
    }
    Ok(PathState { n, q, lambda })
}

/// Resolves a requested worker count, `0` meaning the available parallelism.
pub fn resolve_threads(threads: usize) -> usize {
    if threads > 0 {
        threads
    } else {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    }
}

/// Replications per accumulation block. Each block sums its replications
/// sequentially and blocks fold in index order, so the floating-point
/// reduction tree is fixed and results are bit-identical for any worker
/// count.
const REPLICATION_BLOCK: usize = 512;

fn parallel_replications<A, F>(runs: usize, threads: usize, make: F) -> Vec<A>
where
    A: Send,
    F: Fn(std::ops::Range<usize>) -> A + Sync,
{
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Mutex;

    let blocks = runs.div_ceil(REPLICATION_BLOCK).max(1);
    let workers = resolve_threads(threads).min(blocks);
    let cursor = AtomicUsize::new(0);
    let slots: Mutex<Vec<(usize, A)>> = Mutex::new(Vec::with_capacity(blocks));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let b = cursor.fetch_add(1, Ordering::Relaxed);
                if b >= blocks {
                    break;
                }
                let lo = b * REPLICATION_BLOCK;
                let hi = (lo + REPLICATION_BLOCK).min(runs);
                let acc = make(lo..hi);
                slots.lock().unwrap().push((b, acc));
            });
        }
    });
    let mut out = slots.into_inner().unwrap();
    out.sort_by_key(|(b, _)| *b);
    out.into_iter().map(|(_, a)| a).collect()
}

#[derive(Clone)]
struct MomentAccum {
    // raw power sums per (t, component): q, q^2, q^3, q^4 and same for lambda
    q_pow: Vec<Vec<[f64; 4]>>,
    l_pow: Vec<Vec<[f64; 4]>>,
    // product sums per (t, i<j): q_i q_j and its square
    qq: Vec<Vec<[f64; 2]>>,
    // product sums per (t, i, j): q_i lambda_j and its square
    ql: Vec<Vec<Vec<[f64; 2]>>>,
    runs: usize,
    failures: usize,
}

impl MomentAccum {
    fn new(nt: usize, d: usize) -> Self {
        let pairs = d * (d - 1) / 2;
        MomentAccum {
            q_pow: vec![vec![[0.0; 4]; d]; nt],
            l_pow: vec![vec![[0.0; 4]; d]; nt],
            qq: vec![vec![[0.0; 2]; pairs]; nt],
            ql: vec![vec![vec![[0.0; 2]; d]; d]; nt],
            runs: 0,
            failures: 0,
        }
    }

    fn merge(&mut self, other: &MomentAccum) {
        for (a, b) in self.q_pow.iter_mut().zip(&other.q_pow) {
            for (x, y) in a.iter_mut().zip(b) {
                for k in 0..4 {
                    x[k] += y[k];
                }
            }
        }
        for (a, b) in self.l_pow.iter_mut().zip(&other.l_pow) {
            for (x, y) in a.iter_mut().zip(b) {
                for k in 0..4 {
                    x[k] += y[k];
                }
            }
        }
        for (a, b) in self.qq.iter_mut().zip(&other.qq) {
            for (x, y) in a.iter_mut().zip(b) {
                x[0] += y[0];
                x[1] += y[1];
            }
        }
        for (a, b) in self.ql.iter_mut().zip(&other.ql) {
            for (r, s) in a.iter_mut().zip(b) {
                for (x, y) in r.iter_mut().zip(s) {
                    x[0] += y[0];
                    x[1] += y[1];
                }
            }
        }
        self.runs += other.runs;
        self.failures += other.failures;
    }
}

/// A `(t, statistic)` row of a Monte Carlo estimator table.
#[derive(Debug, Clone)]
pub struct MomentRow {
    pub t: f64,
    pub statistic: String,
    pub value: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone)]
pub struct MomentTable {
    pub runs: usize,
    pub rows: Vec<MomentRow>,
}

impl MomentTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,statistic,value,std_error\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.t, r.statistic, r.value, r.std_error
            ));
        }
        out
    }

    pub fn lookup(&self, t: f64, statistic: &str) -> Option<&MomentRow> {
        self.rows
            .iter()
            .find(|r| r.statistic == statistic && (r.t - t).abs() < 1e-12)
    }
}

/// Label of a mean/variance/cross statistic, 1-based component indices.
pub fn stat_label(kind: &str, indices: &[usize]) -> String {
    let mut s = String::from(kind);
    for i in indices {
        s.push('_');
        s.push_str(&(i + 1).to_string());
    }
    s
}

/// Plug-in moment estimators with standard errors from independent
/// replications of the thinning sampler.
///
/// Replications own private streams and merge associatively, so the result is
/// independent of thread count and execution order.
pub fn mc_moments(
    model: &HawkesModel,
    t_grid: &[f64],
    runs: usize,
    seed: u64,
    threads: usize,
) -> Result<MomentTable, SimError> {
    assert!(runs >= 2, "need at least two replications");
    assert!(!t_grid.is_empty());
    model.ensure_admissible()?;
    model.ensure_stable()?;
    let d = model.dimension();
    let horizon = t_grid.iter().fold(0.0f64, |a, &b| a.max(b)).max(1e-9);
    let opts = SimOptions::default();

    let partials = parallel_replications(runs, threads, |range| {
        let mut acc = MomentAccum::new(t_grid.len(), d);
        let mut lam = vec![0.0; d];
        for rep in range {
            let mut rng = Stream::keyed(seed, &[KEY_REPLICATION, rep as u64]);
            let events = match thinning_core(model, horizon, &mut rng, &opts, None) {
                Ok(ev) => ev,
                Err(_) => {
                    acc.failures += 1;
                    continue;
                }
            };
            acc.runs += 1;
            for (ti, &t) in t_grid.iter().enumerate() {
                intensities(model, &events, t, false, &mut lam);
                let mut q = vec![0.0f64; d];
                for e in &events {
                    if e.time <= t && e.time + e.sojourn > t {
                        q[e.component] += 1.0;
                    }
                }
                for i in 0..d {
                    let (qi, li) = (q[i], lam[i]);
                    let qp = &mut acc.q_pow[ti][i];
                    qp[0] += qi;
                    qp[1] += qi * qi;
                    qp[2] += qi * qi * qi;
                    qp[3] += qi * qi * qi * qi;
                    let lp = &mut acc.l_pow[ti][i];
                    lp[0] += li;
                    lp[1] += li * li;
                    lp[2] += li * li * li;
                    lp[3] += li * li * li * li;
                }
                let mut pair = 0;
                for i in 0..d {
                    for j in i + 1..d {
                        let prod = q[i] * q[j];
                        acc.qq[ti][pair][0] += prod;
                        acc.qq[ti][pair][1] += prod * prod;
                        pair += 1;
                    }
                }
                for i in 0..d {
                    for j in 0..d {
                        let prod = q[i] * lam[j];
                        acc.ql[ti][i][j][0] += prod;
                        acc.ql[ti][i][j][1] += prod * prod;
                    }
                }
            }
        }
        acc
    });

    let mut acc = MomentAccum::new(t_grid.len(), d);
    for p in &partials {
        acc.merge(p);
    }
    if acc.runs < 2 {
        return Err(SimError::EventCap {
            cap: opts.event_cap,
        });
    }
    let n = acc.runs as f64;

    let mean_se = |sum: f64, sum2: f64| -> (f64, f64) {
        let m = sum / n;
        let var = ((sum2 - n * m * m) / (n - 1.0)).max(0.0);
        (m, (var / n).sqrt())
    };
    // SE of the unbiased variance through the fourth central moment
    let var_se = |p: &[f64; 4]| -> (f64, f64) {
        let m = p[0] / n;
        let m2 = (p[1] / n - m * m).max(0.0);
        let m3 = p[2] / n - 3.0 * m * p[1] / n + 2.0 * m * m * m;
        let m4 =
            p[3] / n - 4.0 * m * p[2] / n + 6.0 * m * m * p[1] / n - 3.0 * m * m * m * m;
        let _ = m3;
        let s2 = m2 * n / (n - 1.0);
        let var_of_var = ((m4 - m2 * m2 * (n - 3.0) / (n - 1.0)) / n).max(0.0);
        (s2, var_of_var.sqrt())
    };

    let mut rows = Vec::new();
    for (ti, &t) in t_grid.iter().enumerate() {
        for i in 0..d {
            let (m, se) = mean_se(acc.q_pow[ti][i][0], acc.q_pow[ti][i][1]);
            rows.push(MomentRow {
                t,
                statistic: stat_label("mean_q", &[i]),
                value: m,
                std_error: se,
            });
            let (v, se) = var_se(&acc.q_pow[ti][i]);
            rows.push(MomentRow {
                t,
                statistic: stat_label("var_q", &[i]),
                value: v,
                std_error: se,
            });
            let (m, se) = mean_se(acc.l_pow[ti][i][0], acc.l_pow[ti][i][1]);
            rows.push(MomentRow {
                t,
                statistic: stat_label("mean_lambda", &[i]),
                value: m,
                std_error: se,
            });
            let (v, se) = var_se(&acc.l_pow[ti][i]);
            rows.push(MomentRow {
                t,
                statistic: stat_label("var_lambda", &[i]),
                value: v,
                std_error: se,
            });
        }
        let mut pair = 0;
        for i in 0..d {
            for j in i + 1..d {
                let (m, se) = mean_se(acc.qq[ti][pair][0], acc.qq[ti][pair][1]);
                rows.push(MomentRow {
                    t,
                    statistic: stat_label("cross_qq", &[i, j]),
                    value: m,
                    std_error: se,
                });
                pair += 1;
            }
        }
        for i in 0..d {
            for j in 0..d {
                let (m, se) = mean_se(acc.ql[ti][i][j][0], acc.ql[ti][i][j][1]);
                rows.push(MomentRow {
                    t,
                    statistic: stat_label("cross_qlambda", &[i, j]),
                    value: m,
                    std_error: se,
                });
            }
        }
    }
    Ok(MomentTable {
        runs: acc.runs,
        rows,
    })
}

/// One row of a Monte Carlo tail table.
#[derive(Debug, Clone)]
pub struct TailRow {
    pub threshold: f64,
    pub component: usize,
    pub process: ProcessKind,
    pub probability: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub exceedances: u64,
    /// Fewer than ten exceedances: the requested probability is too small
    /// for the run count.
    pub unreliable: bool,
}

#[derive(Debug, Clone)]
pub struct TailTable {
    pub t: f64,
    pub runs: usize,
    pub rows: Vec<TailRow>,
}

impl TailTable {
    pub fn probability(&self, process: ProcessKind, component: usize, threshold: f64) -> Option<&TailRow> {
        self.rows.iter().find(|r| {
            r.process == process && r.component == component && (r.threshold - threshold).abs() < 1e-12
        })
    }
}

/// Empirical exceedance probabilities of `N_i(t)`, `Q_i(t)` and
/// `lambda_i(t)` per threshold, with Wilson intervals.
pub fn mc_tail(
    model: &HawkesModel,
    t: f64,
    thresholds: &[f64],
    runs: usize,
    seed: u64,
    threads: usize,
) -> Result<TailTable, SimError> {
    assert!(runs >= 1 && t > 0.0 && !thresholds.is_empty());
    model.ensure_admissible()?;
    model.ensure_stable()?;
    let d = model.dimension();
    let opts = SimOptions::default();
    let nx = thresholds.len();

    // counts[x][process][component]
    let partials = parallel_replications(runs, threads, |range| {
        let mut counts = vec![[vec![0u64; d], vec![0u64; d], vec![0u64; d]]; nx];
        let mut used = 0usize;
        let mut lam = vec![0.0; d];
        for rep in range {
            let mut rng = Stream::keyed(seed, &[KEY_REPLICATION, rep as u64]);
            let events = match thinning_core(model, t, &mut rng, &opts, None) {
                Ok(ev) => ev,
                Err(_) => continue,
            };
            used += 1;
            let mut n = vec![0.0f64; d];
            let mut q = vec![0.0f64; d];
            intensities(model, &events, t, false, &mut lam);
            for e in &events {
                if e.time <= t {
                    n[e.component] += 1.0;
                    if e.time + e.sojourn > t {
                        q[e.component] += 1.0;
                    }
                }
            }
            for (xi, &x) in thresholds.iter().enumerate() {
                for i in 0..d {
                    if n[i] > x {
                        counts[xi][0][i] += 1;
                    }
                    if q[i] > x {
                        counts[xi][1][i] += 1;
                    }
                    if lam[i] > x {
                        counts[xi][2][i] += 1;
                    }
                }
            }
        }
        (counts, used)
    });

    let mut counts = vec![[vec![0u64; d], vec![0u64; d], vec![0u64; d]]; nx];
    let mut used = 0usize;
    for (part, u) in &partials {
        used += u;
        for (a, b) in counts.iter_mut().zip(part) {
            for (av, bv) in a.iter_mut().zip(b) {
                for (x, y) in av.iter_mut().zip(bv) {
                    *x += y;
                }
            }
        }
    }

    let mut rows = Vec::new();
    for (xi, &x) in thresholds.iter().enumerate() {
        for (pi, process) in [ProcessKind::N, ProcessKind::Q, ProcessKind::Lambda]
            .into_iter()
            .enumerate()
        {
            for i in 0..d {
                let c = counts[xi][pi][i];
                let (lo, hi) = stats::wilson_interval(c, used as u64, 1.96);
                rows.push(TailRow {
                    threshold: x,
                    component: i,
                    process,
                    probability: c as f64 / used as f64,
                    ci_lo: lo,
                    ci_hi: hi,
                    exceedances: c,
                    unreliable: c < 10,
                });
            }
        }
    }
    Ok(TailTable { t, runs: used, rows })
}
