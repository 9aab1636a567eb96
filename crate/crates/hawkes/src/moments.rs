//! Means, variances, cross-moments and two-time moments extracted from the
//! joint transform by numerical differentiation.
//!
//! The transform domain is one-sided (`|z| <= 1`, `s >= 0`), so population
//! moments use backward stencils in `z` at `1` and intensity moments use
//! forward stencils in `s` at `0`, both of second order with one Richardson
//! extrapolation level. Each stencil point is an independent fixed-point
//! solve; one solve serves a whole time grid because the cluster transforms
//! do not depend on the outer horizon.
//!
//! Error estimates combine the Richardson difference with a noise floor
//! `O(tol / step^order)` inherited from the fixed-point tolerance, which is
//! what limits how small the steps may usefully be.

use num_complex::Complex64;

use crate::model::HawkesModel;
use crate::tails;
use crate::transform::{
    fixed_point, FixedPointOptions, Grid, TransformError, TransformQuery,
};

/// Default probe step for first-order stencils.
pub const DEFAULT_STEP_FIRST: f64 = 1e-4;
/// Default probe step for second-order stencils; larger because the noise
/// floor scales with `tol / step^2`.
pub const DEFAULT_STEP_SECOND: f64 = 1e-3;
/// Fixed-point tolerance used for moment probes.
pub const MOMENT_FP_TOL: f64 = 1e-12;

/// Statistic selector; component indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentKind {
    MeanQ(usize),
    MeanLambda(usize),
    VarQ(usize),
    VarLambda(usize),
    CrossQQ(usize, usize),
    CrossQLambda(usize, usize),
    /// `E[Q_i(t) Q_j(t + tau)]`.
    TwoTimeQQ(usize, usize, f64),
}

impl MomentKind {
    /// Label compatible with the Monte Carlo estimator tables.
    pub fn label(&self) -> String {
        match *self {
            MomentKind::MeanQ(i) => crate::simulate::stat_label("mean_q", &[i]),
            MomentKind::MeanLambda(i) => crate::simulate::stat_label("mean_lambda", &[i]),
            MomentKind::VarQ(i) => crate::simulate::stat_label("var_q", &[i]),
            MomentKind::VarLambda(i) => crate::simulate::stat_label("var_lambda", &[i]),
            MomentKind::CrossQQ(i, j) => crate::simulate::stat_label("cross_qq", &[i, j]),
            MomentKind::CrossQLambda(i, j) => {
                crate::simulate::stat_label("cross_qlambda", &[i, j])
            }
            MomentKind::TwoTimeQQ(i, j, tau) => {
                format!("{}@{tau}", crate::simulate::stat_label("two_time_qq", &[i, j]))
            }
        }
    }

    pub fn default_step(&self) -> f64 {
        match self {
            MomentKind::MeanQ(_) | MomentKind::MeanLambda(_) => DEFAULT_STEP_FIRST,
            _ => DEFAULT_STEP_SECOND,
        }
    }

    fn check(&self, d: usize) -> Result<(), TransformError> {
        let ok = |i: &usize| *i < d;
        let valid = match self {
            MomentKind::MeanQ(i)
            | MomentKind::MeanLambda(i)
            | MomentKind::VarQ(i)
            | MomentKind::VarLambda(i) => ok(i),
            MomentKind::CrossQQ(i, j) => {
                if i == j {
                    return Err(TransformError::Domain(
                        "cross moment of a component with itself: use the variance kinds".into(),
                    ));
                }
                ok(i) && ok(j)
            }
            MomentKind::CrossQLambda(i, j) => ok(i) && ok(j),
            MomentKind::TwoTimeQQ(i, j, tau) => {
                if *tau <= 0.0 {
                    return Err(TransformError::Domain(format!(
                        "two-time lag {tau} must be positive"
                    )));
                }
                ok(i) && ok(j)
            }
        };
        if valid {
            Ok(())
        } else {
            Err(TransformError::Domain(format!(
                "component index out of range for dimension {d}"
            )))
        }
    }
}

/// A moment query at one time point; `step` overrides the kind's default
/// stencil step.
#[derive(Debug, Clone, Copy)]
pub struct MomentRequest {
    pub kind: MomentKind,
    pub t: f64,
    pub step: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct MomentEstimate {
    pub value: f64,
    pub error_estimate: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct MomentOptions {
    pub grid_steps: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub threads: usize,
}

impl Default for MomentOptions {
    fn default() -> Self {
        MomentOptions {
            grid_steps: crate::transform::DEFAULT_GRID_STEPS,
            tol: MOMENT_FP_TOL,
            max_iter: 400,
            threads: 0,
        }
    }
}

// Probe axes: ZDown perturbs z_i = 1 - xi, SUp perturbs s_i = xi. The
// two-time variant perturbs the early or late argument vector.
#[derive(Debug, Clone, Copy)]
enum Axis {
    ZDown(usize),
    SUp(usize),
}

// Half-step offset tables for the one-sided second-order stencils with one
// Richardson level.
const FIRST_OFFSETS: [usize; 4] = [0, 1, 2, 4];
const SECOND_OFFSETS: [usize; 6] = [0, 1, 2, 3, 4, 6];

fn d1(f: impl Fn(usize) -> f64, h: f64) -> (f64, f64) {
    let full = (-3.0 * f(0) + 4.0 * f(2) - f(4)) / (2.0 * h);
    let half = (-3.0 * f(0) + 4.0 * f(1) - f(2)) / h;
    let rich = (4.0 * half - full) / 3.0;
    (rich, (rich - half).abs())
}

fn d2(f: impl Fn(usize) -> f64, h: f64) -> (f64, f64) {
    let full = (2.0 * f(0) - 5.0 * f(2) + 4.0 * f(4) - f(6)) / (h * h);
    let half = 4.0 * (2.0 * f(0) - 5.0 * f(1) + 4.0 * f(2) - f(3)) / (h * h);
    let rich = (4.0 * half - full) / 3.0;
    (rich, (rich - half).abs())
}

fn d11(f: impl Fn(usize, usize) -> f64, h: f64) -> (f64, f64) {
    let c = [-3.0, 4.0, -1.0];
    let apply = |scale: usize, denom: f64| -> f64 {
        let mut acc = 0.0;
        for (a, ca) in c.iter().enumerate() {
            for (b, cb) in c.iter().enumerate() {
                acc += ca * cb * f(a * scale, b * scale);
            }
        }
        acc / (denom * denom)
    };
    let full = apply(2, 2.0 * h);
    let half = apply(1, h);
    let rich = (4.0 * half - full) / 3.0;
    (rich, (rich - half).abs())
}

// One fixed-point solve per probe, shared across the whole time grid.
fn eval_probes(
    model: &HawkesModel,
    axes: &[(Axis, usize)],
    probes: &[Vec<usize>],
    h: f64,
    t_grid: &[f64],
    opts: &MomentOptions,
) -> Result<Vec<Vec<f64>>, TransformError> {
    let d = model.dimension();
    let horizon = t_grid.iter().fold(0.0f64, |a, &b| a.max(b)).max(1e-6);
    let fp = FixedPointOptions {
        tol: opts.tol,
        max_iter: opts.max_iter,
    };
    let grid = Grid::new(horizon, opts.grid_steps);

    let solve_one = |offsets: &Vec<usize>| -> Result<Vec<f64>, TransformError> {
        let mut s = vec![0.0; d];
        let mut z = vec![Complex64::new(1.0, 0.0); d];
        for ((axis, _), &halves) in axes.iter().zip(offsets.iter()) {
            let xi = halves as f64 * 0.5 * h;
            match axis {
                Axis::ZDown(i) => z[*i] = Complex64::new(1.0 - xi, 0.0),
                Axis::SUp(i) => s[*i] += xi,
            }
        }
        if s.iter().all(|&v| v == 0.0) && z.iter().all(|&v| v == Complex64::new(1.0, 0.0)) {
            return Ok(vec![1.0; t_grid.len()]);
        }
        let field = fixed_point(model, TransformQuery { t: horizon, s, z }, grid, &fp)?;
        Ok(t_grid
            .iter()
            .map(|&t| field.joint_value(model, t).re)
            .collect())
    };

    let outputs = parallel_results(probes, opts.threads, solve_one);
    outputs.into_iter().collect()
}

fn parallel_results<I, T, F>(items: &[I], threads: usize, f: F) -> Vec<Result<T, TransformError>>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> Result<T, TransformError> + Sync,
{
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Mutex;
    let workers = crate::simulate::resolve_threads(threads).min(items.len().max(1));
    let cursor = AtomicUsize::new(0);
    let slots: Mutex<Vec<(usize, Result<T, TransformError>)>> =
        Mutex::new(Vec::with_capacity(items.len()));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = cursor.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let v = f(&items[i]);
                slots.lock().unwrap().push((i, v));
            });
        }
    });
    let mut out = slots.into_inner().unwrap();
    out.sort_by_key(|(i, _)| *i);
    out.into_iter().map(|(_, v)| v).collect()
}

fn single_axis_curve(
    model: &HawkesModel,
    axis: Axis,
    order: usize,
    h: f64,
    t_grid: &[f64],
    opts: &MomentOptions,
) -> Result<Vec<(f64, f64, f64, f64)>, TransformError> {
    let offsets: &[usize] = if order == 1 {
        &FIRST_OFFSETS
    } else {
        &SECOND_OFFSETS
    };
    let probes: Vec<Vec<usize>> = offsets.iter().map(|&o| vec![o]).collect();
    let values = eval_probes(model, &[(axis, 0)], &probes, h, t_grid, opts)?;
    let lookup = |halves: usize, ti: usize| -> f64 {
        let idx = offsets.iter().position(|&o| o == halves).unwrap();
        values[idx][ti]
    };
    Ok((0..t_grid.len())
        .map(|ti| {
            let (v1, e1) = d1(|halves| lookup(halves, ti), h);
            let (v2, e2) = if order == 2 {
                d2(|halves| lookup(halves, ti), h)
            } else {
                (0.0, 0.0)
            };
            (v1, e1, v2, e2)
        })
        .collect())
}

fn mixed_axis_curve(
    model: &HawkesModel,
    axis_a: Axis,
    axis_b: Axis,
    h: f64,
    t_grid: &[f64],
    opts: &MomentOptions,
) -> Result<Vec<(f64, f64)>, TransformError> {
    let single = [0usize, 1, 2, 4];
    let mut probes = Vec::new();
    for &a in &single {
        for &b in &single {
            probes.push(vec![a, b]);
        }
    }
    let values = eval_probes(model, &[(axis_a, 0), (axis_b, 1)], &probes, h, t_grid, opts)?;
    let lookup = |a: usize, b: usize, ti: usize| -> f64 {
        let idx = probes
            .iter()
            .position(|p| p[0] == a && p[1] == b)
            .unwrap();
        values[idx][ti]
    };
    Ok((0..t_grid.len())
        .map(|ti| d11(|a, b| lookup(a, b, ti), h))
        .collect())
}

// Two-time probes: each (a, b) perturbs y_i by a and z_j by b; a pair of
// fixed-point solves covers every t in the grid.
fn two_time_curve(
    model: &HawkesModel,
    i: usize,
    j: usize,
    tau: f64,
    h: f64,
    t_grid: &[f64],
    opts: &MomentOptions,
) -> Result<Vec<(f64, f64)>, TransformError> {
    let d = model.dimension();
    let horizon = t_grid.iter().fold(0.0f64, |a, &b| a.max(b)).max(1e-6) + tau;
    let grid = Grid::new(horizon, opts.grid_steps);
    let fp = FixedPointOptions {
        tol: opts.tol,
        max_iter: opts.max_iter,
    };
    let single = [0usize, 1, 2, 4];

    // late fields depend only on the z_j offset
    let late_probes: Vec<Vec<usize>> = single.iter().map(|&b| vec![b]).collect();
    let late_fields = parallel_results(&late_probes, opts.threads, |p| {
        let b = p[0];
        let mut z = vec![Complex64::new(1.0, 0.0); d];
        z[j] = Complex64::new(1.0 - b as f64 * 0.5 * h, 0.0);
        fixed_point(
            model,
            TransformQuery {
                t: horizon,
                s: vec![0.0; d],
                z,
            },
            grid,
            &fp,
        )
    });
    let mut both_probes = Vec::new();
    for &a in &single {
        for &b in &single {
            both_probes.push(vec![a, b]);
        }
    }
    let both_fields = parallel_results(&both_probes, opts.threads, |p| {
        let (a, b) = (p[0], p[1]);
        let mut z = vec![Complex64::new(1.0, 0.0); d];
        z[i] = Complex64::new(1.0 - a as f64 * 0.5 * h, 0.0);
        let zj = Complex64::new(1.0 - b as f64 * 0.5 * h, 0.0);
        z[j] *= zj;
        fixed_point(
            model,
            TransformQuery {
                t: horizon,
                s: vec![0.0; d],
                z,
            },
            grid,
            &fp,
        )
    });
    let mut late = Vec::new();
    for f in late_fields {
        late.push(f?);
    }
    let mut both = Vec::new();
    for f in both_fields {
        both.push(f?);
    }

    let value_at = |a: usize, b: usize, t: f64| -> f64 {
        let bi = single.iter().position(|&x| x == b).unwrap();
        let fi = both_probes
            .iter()
            .position(|p| p[0] == a && p[1] == b)
            .unwrap();
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..d {
            let lam = model.lambda_inf[m];
            let early = both[fi].cluster_integral(m, t) - t;
            let tail = late[bi].cluster_integral(m, t + tau) - late[bi].cluster_integral(m, t)
                - tau;
            acc += lam * (early + tail);
        }
        acc.exp().re
    };
    Ok(t_grid
        .iter()
        .map(|&t| d11(|a, b| value_at(a, b, t), h))
        .collect())
}

/// Moment values over a whole time grid; stencil solves are shared across
/// the grid, so this is far cheaper than repeated single-time calls.
pub fn moment_curve(
    model: &HawkesModel,
    kind: MomentKind,
    step: Option<f64>,
    t_grid: &[f64],
    opts: &MomentOptions,
) -> Result<Vec<MomentEstimate>, TransformError> {
    let d = model.dimension();
    kind.check(d)?;
    model.ensure_stable()?;
    let h = step.unwrap_or_else(|| kind.default_step());
    if !(h > 0.0 && h < 0.3) {
        return Err(TransformError::Domain(format!("stencil step {h} unusable")));
    }
    let tol = opts.tol;
    let noise1 = 12.0 * tol / h;
    let noise2 = 68.0 * tol / (h * h);
    let noise_mixed = 91.0 * tol / (h * h);

    let out = match kind {
        MomentKind::MeanQ(i) => single_axis_curve(model, Axis::ZDown(i), 1, h, t_grid, opts)?
            .into_iter()
            .map(|(v1, e1, _, _)| MomentEstimate {
                value: -v1,
                error_estimate: e1 + noise1,
            })
            .collect(),
        MomentKind::MeanLambda(i) => single_axis_curve(model, Axis::SUp(i), 1, h, t_grid, opts)?
            .into_iter()
            .map(|(v1, e1, _, _)| MomentEstimate {
                value: -v1,
                error_estimate: e1 + noise1,
            })
            .collect(),
        MomentKind::VarQ(i) => single_axis_curve(model, Axis::ZDown(i), 2, h, t_grid, opts)?
            .into_iter()
            .map(|(v1, e1, v2, e2)| {
                // factorial moments: Var = pgf'' + mean - mean^2
                let mean = -v1;
                MomentEstimate {
                    value: v2 + mean - mean * mean,
                    error_estimate: e2 + noise2 + (1.0 - 2.0 * mean).abs() * (e1 + noise1),
                }
            })
            .collect(),
        MomentKind::VarLambda(i) => single_axis_curve(model, Axis::SUp(i), 2, h, t_grid, opts)?
            .into_iter()
            .map(|(v1, e1, v2, e2)| {
                let mean = -v1;
                MomentEstimate {
                    value: v2 - mean * mean,
                    error_estimate: e2 + noise2 + 2.0 * mean.abs() * (e1 + noise1),
                }
            })
            .collect(),
        MomentKind::CrossQQ(i, j) => {
            mixed_axis_curve(model, Axis::ZDown(i), Axis::ZDown(j), h, t_grid, opts)?
                .into_iter()
                .map(|(v, e)| MomentEstimate {
                    value: v,
                    error_estimate: e + noise_mixed,
                })
                .collect()
        }
        MomentKind::CrossQLambda(i, j) => {
            mixed_axis_curve(model, Axis::ZDown(i), Axis::SUp(j), h, t_grid, opts)?
                .into_iter()
                .map(|(v, e)| MomentEstimate {
                    value: v,
                    error_estimate: e + noise_mixed,
                })
                .collect()
        }
        MomentKind::TwoTimeQQ(i, j, tau) => two_time_curve(model, i, j, tau, h, t_grid, opts)?
            .into_iter()
            .map(|(v, e)| MomentEstimate {
                value: v,
                error_estimate: e + noise_mixed,
            })
            .collect(),
    };
    Ok(out)
}

/// Single moment with an error estimate.
pub fn moment(
    model: &HawkesModel,
    request: &MomentRequest,
    opts: &MomentOptions,
) -> Result<MomentEstimate, TransformError> {
    Ok(moment_curve(model, request.kind, request.step, &[request.t], opts)?[0])
}

/// `E[Q_i(t)]` through the renewal route: the cross-module consistency gate
/// against the transform-differentiation mean.
pub fn mean_via_renewal(
    model: &HawkesModel,
    component: usize,
    t: f64,
    grid_steps: usize,
) -> Result<f64, tails::TailsError> {
    let grid = Grid::new(t, grid_steps);
    let sol = tails::solve_renewal(model, grid)?;
    let mut acc = 0.0;
    for j in 0..model.dimension() {
        let col: Vec<f64> = (0..grid.len()).map(|k| sol.rq[k][component][j]).collect();
        acc += model.lambda_inf[j] * crate::numeric::trapezoid(&col, grid.step());
    }
    Ok(acc)
}

/// `E[lambda_i(t)]` through the renewal route. The base rate is added on
/// top of the cluster loads so the value starts at `lambda_inf` and
/// approaches the stationary intensity.
pub fn mean_lambda_via_renewal(
    model: &HawkesModel,
    component: usize,
    t: f64,
    grid_steps: usize,
) -> Result<f64, tails::TailsError> {
    let grid = Grid::new(t, grid_steps);
    let sol = tails::solve_renewal(model, grid)?;
    let mut acc = model.lambda_inf[component];
    for j in 0..model.dimension() {
        let col: Vec<f64> = (0..grid.len()).map(|k| sol.rl[k][component][j]).collect();
        acc += model.lambda_inf[j] * crate::numeric::trapezoid(&col, grid.step());
    }
    Ok(acc)
}
