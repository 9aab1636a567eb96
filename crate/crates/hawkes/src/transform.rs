//! Time-dependent joint transforms of the population and intensity vectors.
//!
//! For a query `(t, s, z)` the engine computes the vector of cluster
//! transforms
//!
//! ```text
//! G_j(u) = E[ prod_i z_i^{S^Q_(i<-j)(u)} exp(-s_i S^lambda_(i<-j)(u)) ]
//! ```
//!
//! where `S^Q_(i<-j)` and `S^lambda_(i<-j)` are the population count and
//! intensity load that a cluster rooted in component `j` inflicts on
//! component `i` after age `u`. The vector solves a fixed-point equation:
//! the root contributes `E[z_j^{1{J_j > u}}]`, and for each target `m`
//! the shared mark couples the direct intensity load with the offspring
//! generating functional,
//!
//! ```text
//! G_j(u) = E[z_j^{1{J_j>u}}] prod_m E[ exp(-B_mj (s_m g_mj(u)
//!            + int_0^u g_mj(v) (1 - G_m(u - v)) dv)) ]
//! ```
//!
//! Iterating this map from any admissible start converges pointwise, with
//! successive updates eventually dominated by a factorial envelope
//! `c (M t)^n / n!`. The joint transform then follows by integrating the
//! cluster transforms over the immigrant arrival window:
//!
//! ```text
//! J(t, s, z) = prod_j exp(-lambda_inf_j (t + s_j)
//!                + lambda_inf_j int_0^t G_j(u) du)
//! ```
//!
//! All quadrature lives on a uniform age grid with trapezoid weights, so
//! refining the grid shrinks discretization error at second order.

use num_complex::Complex64;
use thiserror::Error;

use crate::model::{HawkesModel, ModelError};
use crate::numeric::{self, NumericError};
use crate::simulate::resolve_threads;

pub const DEFAULT_GRID_STEPS: usize = 512;
pub const DEFAULT_FP_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 200;

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("query outside the transform domain: {0}")]
    Domain(String),
    #[error("fixed point did not converge: residual {residual} after {iterations} iterations")]
    NonConvergence {
        residual: f64,
        iterations: usize,
        trace: Vec<f64>,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("numeric failure: {0}")]
    Numeric(#[from] NumericError),
}

/// Uniform grid of `n + 1` ages covering `[0, t]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    t: f64,
    n: usize,
}

impl Grid {
    pub fn new(t: f64, n: usize) -> Grid {
        assert!(t > 0.0 && n >= 2, "grid needs t > 0 and at least 2 steps");
        Grid { t, n }
    }

    pub fn horizon(&self) -> f64 {
        self.t
    }

    pub fn steps(&self) -> usize {
        self.n
    }

    pub fn step(&self) -> f64 {
        self.t / self.n as f64
    }

    pub fn point(&self, k: usize) -> f64 {
        self.t * k as f64 / self.n as f64
    }

    /// Number of grid points, `n + 1`.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.n + 1
    }
}

/// A transform query; `s` must be non-negative and `z` must stay in the
/// closed unit disc (complex values are admitted for pmf inversion).
#[derive(Debug, Clone, PartialEq)]
pub struct TransformQuery {
    pub t: f64,
    pub s: Vec<f64>,
    pub z: Vec<Complex64>,
}

impl TransformQuery {
    pub fn real(t: f64, s: Vec<f64>, z_real: Vec<f64>) -> TransformQuery {
        TransformQuery {
            t,
            s,
            z: z_real.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
        }
    }

    fn validate(&self, d: usize) -> Result<(), TransformError> {
        if self.s.len() != d || self.z.len() != d {
            return Err(TransformError::Domain(format!(
                "query must carry {d} entries for s and z"
            )));
        }
        for (i, &si) in self.s.iter().enumerate() {
            if !si.is_finite() || si < 0.0 {
                return Err(TransformError::Domain(format!("s[{i}] = {si} invalid")));
            }
        }
        for (i, zi) in self.z.iter().enumerate() {
            if !zi.re.is_finite() || !zi.im.is_finite() || zi.norm() > 1.0 + 1e-12 {
                return Err(TransformError::Domain(format!(
                    "z[{i}] = {zi} outside the unit disc"
                )));
            }
        }
        Ok(())
    }
}

/// Cluster transforms `G_j(u_k)` over a grid, for one query.
#[derive(Debug, Clone)]
pub struct TransformField {
    pub grid: Grid,
    pub query: TransformQuery,
    /// `values[j][k] = G_j(u_k)`.
    pub values: Vec<Vec<Complex64>>,
    pub iterations: usize,
    /// Sup-norm of the last update.
    pub residual: f64,
    /// Sup-norm of every update, in iteration order.
    pub residual_trace: Vec<f64>,
}

impl TransformField {
    pub fn value(&self, k: usize, j: usize) -> Complex64 {
        self.values[j][k]
    }

    /// `int_0^x G_j(u) du` by trapezoid, `x` up to the grid horizon.
    pub fn cluster_integral(&self, j: usize, x: f64) -> Complex64 {
        numeric::trapezoid_to(&self.values[j], self.grid.step(), x)
    }

    /// Joint transform value at `x <= t` assembled from this field.
    pub fn joint_value(&self, model: &HawkesModel, x: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..model.dimension() {
            let lam = model.lambda_inf[j];
            acc += -lam * (x + self.query.s[j]) + lam * self.cluster_integral(j, x);
        }
        acc.exp()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FixedPointOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions {
            tol: DEFAULT_FP_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

// Grid caches reused across sweeps: kernel samples per excitation channel
// and sojourn survival per component.
struct PhiContext<'a> {
    model: &'a HawkesModel,
    grid: Grid,
    active: Vec<(usize, usize)>,
    g_vals: Vec<Vec<f64>>,
    survival: Vec<Vec<f64>>,
}

impl<'a> PhiContext<'a> {
    fn new(model: &'a HawkesModel, grid: Grid) -> PhiContext<'a> {
        let d = model.dimension();
        let mut active = Vec::new();
        let mut g_vals = Vec::new();
        for m in 0..d {
            for j in 0..d {
                // channels with a zero jump or zero kernel contribute a unit
                // factor and are skipped
                if model.jumps[m][j].mean() > 0.0 && !model.kernels[m][j].is_zero() {
                    active.push((m, j));
                    g_vals.push(
                        (0..grid.len())
                            .map(|k| model.kernels[m][j].value(grid.point(k)))
                            .collect(),
                    );
                }
            }
        }
        let survival = (0..d)
            .map(|j| {
                (0..grid.len())
                    .map(|k| model.sojourns[j].survival(grid.point(k)))
                    .collect()
            })
            .collect();
        PhiContext {
            model,
            grid,
            active,
            g_vals,
            survival,
        }
    }

    // One application of the fixed-point map to `values[j][k]`.
    fn sweep(
        &self,
        query: &TransformQuery,
        values: &[Vec<Complex64>],
    ) -> Result<Vec<Vec<Complex64>>, TransformError> {
        let d = self.model.dimension();
        let n = self.grid.steps();
        let h = self.grid.step();
        let one = Complex64::new(1.0, 0.0);

        // root factor: E[z_j^{1{J_j > u}}] = 1 - (1 - z_j) P(J_j > u)
        let mut out: Vec<Vec<Complex64>> = (0..d)
            .map(|j| {
                (0..=n)
                    .map(|k| one - (one - query.z[j]) * self.survival[j][k])
                    .collect()
            })
            .collect();

        let mut deficit = vec![Complex64::new(0.0, 0.0); n + 1];
        for (pair, &(m, j)) in self.active.iter().enumerate() {
            let g = &self.g_vals[pair];
            let jump = &self.model.jumps[m][j];
            let sm = query.s[m];
            for (k, dk) in deficit.iter_mut().enumerate() {
                *dk = one - values[m][k];
            }
            for k in 0..=n {
                // trapezoid convolution int_0^{u_k} g(v)(1 - G_m(u_k - v)) dv
                let mut conv = Complex64::new(0.0, 0.0);
                if k >= 1 {
                    conv += (g[0] * deficit[k] + g[k] * deficit[0]) * 0.5;
                    for l in 1..k {
                        conv += g[l] * deficit[k - l];
                    }
                    conv *= h;
                }
                let w = conv + sm * g[k];
                out[j][k] *= jump.lst_complex(w)?;
            }
        }
        Ok(out)
    }
}

/// One application of the fixed-point map; exposed for iteration-level
/// diagnostics. [`fixed_point`] is the production path.
pub fn phi_apply(
    model: &HawkesModel,
    field: &TransformField,
) -> Result<TransformField, TransformError> {
    field.query.validate(model.dimension())?;
    let ctx = PhiContext::new(model, field.grid);
    let values = ctx.sweep(&field.query, &field.values)?;
    let residual = sup_distance(&values, &field.values);
    let mut trace = field.residual_trace.clone();
    trace.push(residual);
    Ok(TransformField {
        grid: field.grid,
        query: field.query.clone(),
        values,
        iterations: field.iterations + 1,
        residual,
        residual_trace: trace,
    })
}

fn sup_distance(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    let mut sup: f64 = 0.0;
    for (ca, cb) in a.iter().zip(b) {
        for (x, y) in ca.iter().zip(cb) {
            sup = sup.max((x - y).norm());
        }
    }
    sup
}

/// Constant field used to start the iteration; `1` is the transform of the
/// empty cluster and makes the first iterate testable in closed form.
pub fn constant_field(grid: Grid, query: TransformQuery, value: Complex64) -> TransformField {
    let d = query.z.len();
    TransformField {
        grid,
        query,
        values: vec![vec![value; grid.len()]; d],
        iterations: 0,
        residual: f64::INFINITY,
        residual_trace: Vec::new(),
    }
}

/// Iterates the map until the sup-norm update drops below `tol`.
pub fn fixed_point(
    model: &HawkesModel,
    query: TransformQuery,
    grid: Grid,
    opts: &FixedPointOptions,
) -> Result<TransformField, TransformError> {
    fixed_point_with_init(model, query, grid, opts, Complex64::new(1.0, 0.0))
}

/// Same iteration from an arbitrary constant initial field; the limit does
/// not depend on the start.
pub fn fixed_point_with_init(
    model: &HawkesModel,
    query: TransformQuery,
    grid: Grid,
    opts: &FixedPointOptions,
    init: Complex64,
) -> Result<TransformField, TransformError> {
    model.ensure_admissible()?;
    model.ensure_stable()?;
    query.validate(model.dimension())?;
    let ctx = PhiContext::new(model, grid);
    let mut values = vec![vec![init; grid.len()]; model.dimension()];
    let mut trace = Vec::new();
    for iteration in 1..=opts.max_iter {
        let next = ctx.sweep(&query, &values)?;
        let residual = sup_distance(&next, &values);
        trace.push(residual);
        values = next;
        if residual < opts.tol {
            return Ok(TransformField {
                grid,
                query,
                values,
                iterations: iteration,
                residual,
                residual_trace: trace,
            });
        }
    }
    Err(TransformError::NonConvergence {
        residual: *trace.last().unwrap_or(&f64::INFINITY),
        iterations: opts.max_iter,
        trace,
    })
}

/// Uniform bound `M = max_j d max_i E[B_ij] ||g_ij||` on the iteration: the
/// update at step `n` is eventually below `c (M t)^n / n!`.
pub fn iteration_rate_bound(model: &HawkesModel) -> f64 {
    let d = model.dimension();
    (0..d)
        .map(|j| {
            (0..d)
                .map(|i| model.jumps[i][j].mean() * model.kernels[i][j].l1_norm())
                .fold(0.0f64, f64::max)
                * d as f64
        })
        .fold(0.0f64, f64::max)
}

/// Checks a residual trace against the factorial envelope with rate `mt`:
/// once the index passes `mt`, updates must sit below
/// `slack * trace[0] * (mt)^i / i!`, down to the numerical noise floor. The
/// first update calibrates the free constant of the envelope.
pub fn factorial_envelope_holds(trace: &[f64], mt: f64, slack: f64, floor: f64) -> bool {
    let scale = match trace.first() {
        Some(&first) if first > 0.0 => first,
        _ => return true,
    };
    let start = mt.ceil() as usize + 1;
    let mut log_bound = mt.ln() * start as f64 - numeric::ln_gamma(start as f64 + 1.0);
    for (i, &delta) in trace.iter().enumerate().skip(start) {
        if delta <= floor {
            break;
        }
        if delta.ln() > (slack * scale).ln() + log_bound {
            return false;
        }
        log_bound += mt.ln() - ((i + 1) as f64).ln();
    }
    true
}

/// Joint transform `E[prod_i z_i^{Q_i(t)} e^{-s_i lambda_i(t)}]`.
pub fn joint_transform(
    model: &HawkesModel,
    query: &TransformQuery,
    grid_steps: usize,
    opts: &FixedPointOptions,
) -> Result<Complex64, TransformError> {
    let grid = Grid::new(query.t, grid_steps);
    let field = fixed_point(model, query.clone(), grid, opts)?;
    Ok(field.joint_value(model, query.t))
}

/// Probability generating function of the population vector.
pub fn pgf_q(
    model: &HawkesModel,
    t: f64,
    z: &[Complex64],
    grid_steps: usize,
    opts: &FixedPointOptions,
) -> Result<Complex64, TransformError> {
    let query = TransformQuery {
        t,
        s: vec![0.0; model.dimension()],
        z: z.to_vec(),
    };
    joint_transform(model, &query, grid_steps, opts)
}

/// Laplace–Stieltjes transform of the intensity vector.
pub fn lst_lambda(
    model: &HawkesModel,
    t: f64,
    s: &[f64],
    grid_steps: usize,
    opts: &FixedPointOptions,
) -> Result<f64, TransformError> {
    let query = TransformQuery {
        t,
        s: s.to_vec(),
        z: vec![Complex64::new(1.0, 0.0); model.dimension()],
    };
    let v = joint_transform(model, &query, grid_steps, opts)?;
    debug_assert!(v.im.abs() < 1e-9);
    Ok(v.re)
}

/// Joint transform of the counting process and the intensity: departures are
/// disabled internally, so sojourn specs cannot affect arrivals.
pub fn joint_n_lambda(
    model: &HawkesModel,
    t: f64,
    s: &[f64],
    z: &[Complex64],
    grid_steps: usize,
    opts: &FixedPointOptions,
) -> Result<Complex64, TransformError> {
    let counting = model.with_infinite_sojourns();
    let query = TransformQuery {
        t,
        s: s.to_vec(),
        z: z.to_vec(),
    };
    joint_transform(&counting, &query, grid_steps, opts)
}

/// Two-time generating function `E[prod_i y_i^{Q_i(t)} z_i^{Q_i(t+tau)}]`:
/// immigrants landing before `t` carry the product argument, immigrants in
/// `(t, t+tau]` only the later one.
pub fn two_time_pgf(
    model: &HawkesModel,
    t: f64,
    tau: f64,
    y: &[Complex64],
    z: &[Complex64],
    grid_steps: usize,
    opts: &FixedPointOptions,
) -> Result<Complex64, TransformError> {
    if tau <= 0.0 {
        return Err(TransformError::Domain(format!("tau = {tau} must be positive")));
    }
    let d = model.dimension();
    if y.len() != d || z.len() != d {
        return Err(TransformError::Domain(format!(
            "y and z must carry {d} entries"
        )));
    }
    let yz: Vec<Complex64> = y.iter().zip(z).map(|(a, b)| a * b).collect();
    let grid = Grid::new(t + tau, grid_steps);
    let zeros = vec![0.0; d];
    let field_both = fixed_point(
        model,
        TransformQuery {
            t: t + tau,
            s: zeros.clone(),
            z: yz,
        },
        grid,
        opts,
    )?;
    let field_late = fixed_point(
        model,
        TransformQuery {
            t: t + tau,
            s: zeros,
            z: z.to_vec(),
        },
        grid,
        opts,
    )?;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..d {
        let lam = model.lambda_inf[j];
        let early = field_both.cluster_integral(j, t) - t;
        let late = field_late.cluster_integral(j, t + tau) - field_late.cluster_integral(j, t)
            - tau;
        acc += lam * (early + late);
    }
    Ok(acc.exp())
}

/// LST of a compound process that accumulates an i.i.d. claim per arrival:
/// the counting-process pgf evaluated at the claim transforms.
pub fn compound_lst(
    model: &HawkesModel,
    t: f64,
    s: &[f64],
    claim_lsts: &[&dyn Fn(f64) -> f64],
    grid_steps: usize,
    opts: &FixedPointOptions,
) -> Result<f64, TransformError> {
    let d = model.dimension();
    if s.len() != d || claim_lsts.len() != d {
        return Err(TransformError::Domain(format!(
            "s and claim transforms must carry {d} entries"
        )));
    }
    let mut z = Vec::with_capacity(d);
    for (i, (f, &si)) in claim_lsts.iter().zip(s).enumerate() {
        let v = f(si);
        if !(v > 0.0 && v <= 1.0) {
            return Err(TransformError::Domain(format!(
                "claim LST {i} evaluated to {v}, outside (0, 1]"
            )));
        }
        z.push(Complex64::new(v, 0.0));
    }
    let v = joint_n_lambda(model, t, &vec![0.0; d], &z, grid_steps, opts)?;
    debug_assert!(v.im.abs() < 1e-9);
    Ok(v.re)
}

/// Distribution of one population coordinate recovered from its generating
/// function on the unit circle.
#[derive(Debug, Clone)]
pub struct Pmf {
    /// `P(Q_i(t) = k)` for `k = 0..=max_k`, clipped to `[0, 1]`.
    pub probs: Vec<f64>,
    /// Inverted mass found beyond `max_k`; a proxy for aliasing.
    pub tail_estimate: f64,
    /// `|1 - sum over all inverted mass|`.
    pub renormalization_error: f64,
    /// Set when the tail estimate exceeds `1e-6`.
    pub aliasing_warning: bool,
}

/// Pointwise pmf of `Q_i(t)` by evaluating the pgf at `2 (max_k + 1)`
/// uniform points on the unit circle (conjugate symmetry halves the solves)
/// and applying the discrete inverse transform.
pub fn pmf_q(
    model: &HawkesModel,
    t: f64,
    component: usize,
    max_k: usize,
    grid_steps: usize,
    opts: &FixedPointOptions,
    threads: usize,
) -> Result<Pmf, TransformError> {
    let d = model.dimension();
    if component >= d {
        return Err(TransformError::Domain(format!(
            "component {component} out of range for dimension {d}"
        )));
    }
    let m_points = 2 * (max_k + 1);
    let half = m_points / 2;

    // pgf at e^{i 2 pi m / M} for m = 0..=M/2; the rest are conjugates
    let evals: Vec<Result<Complex64, TransformError>> =
        parallel_indexed(half + 1, threads, |m| {
            let theta = 2.0 * std::f64::consts::PI * m as f64 / m_points as f64;
            let mut z = vec![Complex64::new(1.0, 0.0); d];
            z[component] = Complex64::from_polar(1.0, theta);
            pgf_q(model, t, &z, grid_steps, opts)
        });
    let mut circle = Vec::with_capacity(m_points);
    for e in evals {
        circle.push(e?);
    }
    for m in half + 1..m_points {
        let conj = circle[m_points - m].conj();
        circle.push(conj);
    }

    let mut mass = vec![0.0f64; m_points];
    for (k, pk) in mass.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, jm) in circle.iter().enumerate() {
            let theta = -2.0 * std::f64::consts::PI * (k * m % m_points) as f64 / m_points as f64;
            acc += jm * Complex64::from_polar(1.0, theta);
        }
        *pk = acc.re / m_points as f64;
    }

    let total: f64 = mass.iter().sum();
    let tail_estimate = mass[max_k + 1..].iter().sum::<f64>().max(0.0);
    let probs: Vec<f64> = mass[..=max_k].iter().map(|p| p.clamp(0.0, 1.0)).collect();
    Ok(Pmf {
        probs,
        tail_estimate,
        renormalization_error: (1.0 - total).abs(),
        aliasing_warning: tail_estimate > 1e-6,
    })
}

// Deterministic parallel map over indices: work-stealing by index, results
// placed by index.
fn parallel_indexed<T, F>(count: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Mutex;

    let workers = resolve_threads(threads).min(count.max(1));
    let cursor = AtomicUsize::new(0);
    let slots: Mutex<Vec<(usize, T)>> = Mutex::new(Vec::with_capacity(count));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = cursor.fetch_add(1, Ordering::Relaxed);
                if i >= count {
                    break;
                }
                let v = f(i);
                slots.lock().unwrap().push((i, v));
            });
        }
    });
    let mut out = slots.into_inner().unwrap();
    out.sort_by_key(|(i, _)| *i);
    out.into_iter().map(|(_, v)| v).collect()
}
