//! Heavy-tail analytics for the population and intensity processes.
//!
//! Excitation channels with power-law jump tails propagate their tail index
//! through the excitation graph: an edge `j -> i` exists when events in
//! source `j` excite target `i`. Classifying the graph into strongly
//! connected classes and closing reachability gives, per component,
//!
//! ```text
//! delta_ij   = min { gamma_mj : m reaches i }       (per source column j)
//! gamma_bar_i = min_j delta_ij
//! ```
//!
//! with the heaviest reachable tail winning. The tail probabilities then
//! follow from two families of Volterra renewal systems on an age grid:
//! the linear system for the cluster first moments,
//!
//! ```text
//! R^Q_ij(u) = 1{i=j} P(J_i > u) + sum_m E[B_mj] (g_mj * R^Q_im)(u),
//! ```
//!
//! and a fractional-order system driven by `(g * R)^delta` forcing whose
//! solution integrates to the tail coefficient:
//!
//! ```text
//! P(Q_i(t) > x) ~ (sum_{j in I_i} lambda_inf_j int_0^t Rbar^{Q,delta}_ij) x^{-gamma_bar_i}.
//! ```
//!
//! All stored fractional solutions are the omega-free normalization, so the
//! negative weight `Gamma(1 - delta)` never touches persisted data. The
//! primary solver steps the systems causally in the time index; a
//! Laplace-domain solve plus Gaver–Stehfest inversion is retained as an
//! independent cross-check of the linear system.

use thiserror::Error;

use crate::model::{HawkesModel, JumpSpec, ModelError};
use crate::numeric::{self, NumericError};
use crate::transform::Grid;
use crate::ProcessKind;

pub const DEFAULT_GS_TERMS: usize = 16;

/// Relative tolerance for detecting ties between floating-point tail
/// indices.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum TailsError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("light-tailed jumps are outside the tail analysis: cells {cells:?} must be pareto_tail, constant, or zero")]
    UnsupportedJump { cells: Vec<(usize, usize)> },
    #[error("tail index {gamma_bar} of component {component} is outside (1, 2); higher orders need additional expansion terms")]
    TailIndexOutOfRange { component: usize, gamma_bar: f64 },
    #[error("component {component} has no heavy-tailed influence; its tail is not power-law")]
    NoHeavyTailInfluence { component: usize },
    #[error("the excitation graph is not irreducible; linear-combination tails cover only the irreducible case")]
    NotIrreducible,
    #[error("per-step system is singular; the grid is too coarse for this model")]
    GridTooCoarse,
    #[error("numeric failure: {0}")]
    Numeric(#[from] NumericError),
}

/// Directed excitation graph: an edge `(i, j)` means events in source `j`
/// excite target `i`. Tail parameters are present where the jump has a
/// power-law tail.
#[derive(Debug, Clone)]
pub struct HawkesGraph {
    pub d: usize,
    /// `(target, source)` pairs with positive jump mean and kernel mass.
    pub edges: Vec<(usize, usize)>,
    /// `gamma[i][j]`: tail index of `B_ij` when the channel is an edge with
    /// a power-law jump.
    pub gamma: Vec<Vec<Option<f64>>>,
    /// Matching tail constants.
    pub tail_constant: Vec<Vec<Option<f64>>>,
}

impl HawkesGraph {
    pub fn has_edge(&self, target: usize, source: usize) -> bool {
        self.edges.contains(&(target, source))
    }
}

/// Classes of the excitation graph with their reachability structure.
#[derive(Debug, Clone)]
pub struct ClassDecomposition {
    /// Strongly connected components, topologically ordered so that a class
    /// only reaches classes appearing after it.
    pub classes: Vec<Vec<usize>>,
    /// A class is recurrent when no edge leaves it.
    pub recurrent: Vec<bool>,
    pub class_of: Vec<usize>,
    /// `reach[i][j]`: `i == j` or a directed path from `j` to `i` exists.
    pub reach: Vec<Vec<bool>>,
}

pub fn build_graph(model: &HawkesModel) -> HawkesGraph {
    let d = model.dimension();
    let mut edges = Vec::new();
    let mut gamma = vec![vec![None; d]; d];
    let mut tail_constant = vec![vec![None; d]; d];
    for i in 0..d {
        for j in 0..d {
            if model.edge(i, j) {
                edges.push((i, j));
                if let Some((c, g)) = model.jumps[i][j].apt() {
                    gamma[i][j] = Some(g);
                    tail_constant[i][j] = Some(c);
                }
            }
        }
    }
    HawkesGraph {
        d,
        edges,
        gamma,
        tail_constant,
    }
}

struct TarjanState {
    index: usize,
    stack: Vec<usize>,
    on_stack: Vec<bool>,
    order: Vec<Option<usize>>,
    low: Vec<usize>,
    components: Vec<Vec<usize>>,
}

fn strong_connect(v: usize, adjacency: &[Vec<usize>], st: &mut TarjanState) {
    st.order[v] = Some(st.index);
    st.low[v] = st.index;
    st.index += 1;
    st.stack.push(v);
    st.on_stack[v] = true;
    for &w in &adjacency[v] {
        if st.order[w].is_none() {
            strong_connect(w, adjacency, st);
            st.low[v] = st.low[v].min(st.low[w]);
        } else if st.on_stack[w] {
            st.low[v] = st.low[v].min(st.order[w].unwrap());
        }
    }
    if st.low[v] == st.order[v].unwrap() {
        let mut component = Vec::new();
        loop {
            let w = st.stack.pop().expect("tarjan stack underflow");
            st.on_stack[w] = false;
            component.push(w);
            if w == v {
                break;
            }
        }
        component.sort_unstable();
        st.components.push(component);
    }
}

/// Strongly connected classes, recurrence flags, and the reflexive-transitive
/// reachability closure.
pub fn classify(graph: &HawkesGraph) -> ClassDecomposition {
    let d = graph.d;
    // adjacency in flow direction: source j -> target i
    let mut adjacency = vec![Vec::new(); d];
    for &(i, j) in &graph.edges {
        adjacency[j].push(i);
    }
    let mut st = TarjanState {
        index: 0,
        stack: Vec::new(),
        on_stack: vec![false; d],
        order: vec![None; d],
        low: vec![0; d],
        components: Vec::new(),
    };
    for v in 0..d {
        if st.order[v].is_none() {
            strong_connect(v, &adjacency, &mut st);
        }
    }
    // Tarjan emits classes in reverse topological order of the condensation:
    // every edge leaving a class points to an already-emitted class
    let classes = st.components;
    let nc = classes.len();
    let mut class_of = vec![0usize; d];
    for (cid, class) in classes.iter().enumerate() {
        for &v in class {
            class_of[v] = cid;
        }
    }
    // class-level reachability: a class reaches itself and everything its
    // out-edges reach (targets live in earlier-emitted classes)
    let mut class_reach = vec![vec![false; nc]; nc];
    for (cid, row) in class_reach.iter_mut().enumerate() {
        row[cid] = true;
    }
    for cid in 0..nc {
        for &v in &classes[cid] {
            for &w in &adjacency[v] {
                let cw = class_of[w];
                if cw != cid {
                    for k in 0..nc {
                        if class_reach[cw][k] {
                            class_reach[cid][k] = true;
                        }
                    }
                    class_reach[cid][cw] = true;
                }
            }
        }
    }
    let recurrent: Vec<bool> = (0..nc)
        .map(|cid| {
            classes[cid].iter().all(|&v| {
                adjacency[v]
                    .iter()
                    .all(|&w| class_of[w] == cid)
            })
        })
        .collect();
    let mut reach = vec![vec![false; d]; d];
    for (i, row) in reach.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = class_reach[class_of[j]][class_of[i]];
        }
    }
    // topological order: ancestors first
    let order: Vec<usize> = (0..nc).rev().collect();
    let classes_sorted: Vec<Vec<usize>> = order.iter().map(|&c| classes[c].clone()).collect();
    let recurrent_sorted: Vec<bool> = order.iter().map(|&c| recurrent[c]).collect();
    let mut class_of_sorted = vec![0usize; d];
    for (new_id, &old_id) in order.iter().enumerate() {
        for &v in &classes[old_id] {
            class_of_sorted[v] = new_id;
        }
        let _ = old_id;
    }
    ClassDecomposition {
        classes: classes_sorted,
        recurrent: recurrent_sorted,
        class_of: class_of_sorted,
        reach,
    }
}

/// Tail-propagation summary: reachability, per-column heaviest reachable
/// indices, per-component tail index with its source sets, and the
/// Gamma-function weights.
#[derive(Debug, Clone)]
pub struct TailIndexReport {
    pub graph: HawkesGraph,
    pub classes: ClassDecomposition,
    /// `delta[i][j]`: heaviest (smallest-index) tail of column `j` that can
    /// reach component `i`; `None` when nothing heavy-tailed reaches it.
    pub delta: Vec<Vec<Option<f64>>>,
    /// `gamma_bar[i] = min_j delta[i][j]`.
    pub gamma_bar: Vec<Option<f64>>,
    /// `I_i`: source columns attaining `gamma_bar[i]`.
    pub sources: Vec<Vec<usize>>,
    /// `I_ij`: rows `m` attaining `delta[i][j]` within column `j`, stored for
    /// `j` in `I_i`.
    pub source_rows: Vec<Vec<Vec<usize>>>,
    /// `omega[i] = Gamma(1 - gamma_bar[i])`, negative on (1, 2).
    pub omega: Vec<Option<f64>>,
}

fn nearly_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOL * a.abs().max(b.abs())
}

/// Derives the tail-index report. Every edge must carry a power-law or
/// constant jump; constants participate in reachability but never in the
/// index minimization. Finite tail indices must lie in (1, 2).
pub fn tail_indices(model: &HawkesModel) -> Result<TailIndexReport, TailsError> {
    model.ensure_admissible()?;
    let graph = build_graph(model);
    let d = graph.d;
    let light: Vec<(usize, usize)> = graph
        .edges
        .iter()
        .copied()
        .filter(|&(i, j)| {
            graph.gamma[i][j].is_none()
                && !matches!(model.jumps[i][j], JumpSpec::Constant { .. })
        })
        .collect();
    if !light.is_empty() {
        return Err(TailsError::UnsupportedJump { cells: light });
    }
    let classes = classify(&graph);

    let mut delta = vec![vec![None; d]; d];
    for i in 0..d {
        for j in 0..d {
            let mut best: Option<f64> = None;
            for m in 0..d {
                if let Some(g) = graph.gamma[m][j] {
                    if classes.reach[i][m] {
                        best = Some(best.map_or(g, |b: f64| b.min(g)));
                    }
                }
            }
            delta[i][j] = best;
        }
    }
    let gamma_bar: Vec<Option<f64>> = delta
        .iter()
        .map(|row| {
            row.iter()
                .flatten()
                .fold(None, |acc: Option<f64>, &g| Some(acc.map_or(g, |a| a.min(g))))
        })
        .collect();
    for (i, g) in gamma_bar.iter().enumerate() {
        if let Some(g) = g {
            if !(*g > 1.0 && *g < 2.0) {
                return Err(TailsError::TailIndexOutOfRange {
                    component: i,
                    gamma_bar: *g,
                });
            }
        }
    }
    let sources: Vec<Vec<usize>> = (0..d)
        .map(|i| match gamma_bar[i] {
            None => Vec::new(),
            Some(g) => (0..d)
                .filter(|&j| delta[i][j].map(|v| nearly_equal(v, g)).unwrap_or(false))
                .collect(),
        })
        .collect();
    let source_rows: Vec<Vec<Vec<usize>>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    if !sources[i].contains(&j) {
                        return Vec::new();
                    }
                    let target = delta[i][j].expect("source column has a delta");
                    (0..d)
                        .filter(|&m| {
                            classes.reach[i][m]
                                && graph.gamma[m][j]
                                    .map(|g| nearly_equal(g, target))
                                    .unwrap_or(false)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let omega: Vec<Option<f64>> = gamma_bar
        .iter()
        .map(|g| g.map(|g| numeric::gamma(1.0 - g)))
        .collect();
    Ok(TailIndexReport {
        graph,
        classes,
        delta,
        gamma_bar,
        sources,
        source_rows,
        omega,
    })
}

/// Grids of the linear renewal solutions `R^Q`, `R^lambda` and, after the
/// fractional pass, the omega-free `Rbar` solutions over the source sets.
#[derive(Debug, Clone)]
pub struct RenewalSolution {
    pub grid: Grid,
    /// `rq[k][i][j]`.
    pub rq: Vec<Vec<Vec<f64>>>,
    pub rl: Vec<Vec<Vec<f64>>>,
    /// Omega-free fractional solutions, populated only for `j` in `I_i`.
    pub rq_frac: Option<Vec<Vec<Vec<f64>>>>,
    pub rl_frac: Option<Vec<Vec<Vec<f64>>>>,
}

// Causal trapezoid stepping for a row-coupled Volterra system
//   X[k] = F[k] + h * sum_l'' X[k-l] A[l]
// over rows `rows` and columns `cols` of the full index set; `A[l][m][j] =
// E[B_mj] g_mj(v_l)` restricted to the active rows/columns.
fn volterra_march(
    forcing: &[Vec<Vec<f64>>],
    weights: &[Vec<Vec<f64>>],
    h: f64,
) -> Result<Vec<Vec<Vec<f64>>>, TailsError> {
    let steps = forcing.len();
    let rows = forcing[0].len();
    let cols = forcing[0][0].len();
    debug_assert_eq!(cols, weights[0].len());
    let mut x = vec![vec![vec![0.0; cols]; rows]; steps];
    x[0] = forcing[0].clone();

    // per-step implicit factor (I - h/2 A[0]) shared by every k
    let mut step_matrix = vec![vec![0.0; cols]; cols];
    for (m, row) in step_matrix.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = if m == j { 1.0 } else { 0.0 } - 0.5 * h * weights[0][m][j];
        }
    }
    let inv = numeric::invert(&step_matrix).map_err(|_| TailsError::GridTooCoarse)?;

    for k in 1..steps {
        // rhs = F[k] + h (0.5 X[0] A[k] + sum_{l=1}^{k-1} X[k-l] A[l])
        let mut rhs = forcing[k].clone();
        for l in 1..=k {
            let w = if l == k { 0.5 } else { 1.0 };
            let a = &weights[l];
            let xk = &x[k - l];
            for i in 0..rows {
                for j in 0..cols {
                    let mut acc = 0.0;
                    for (m, arow) in a.iter().enumerate() {
                        acc += xk[i][m] * arow[j];
                    }
                    rhs[i][j] += h * w * acc;
                }
            }
        }
        // X[k] = rhs * inv
        for i in 0..rows {
            for j in 0..cols {
                let mut acc = 0.0;
                for (m, invrow) in inv.iter().enumerate() {
                    acc += rhs[i][m] * invrow[j];
                }
                x[k][i][j] = acc;
            }
        }
    }
    Ok(x)
}

fn kernel_weights(model: &HawkesModel, grid: &Grid) -> Vec<Vec<Vec<f64>>> {
    let d = model.dimension();
    (0..grid.len())
        .map(|l| {
            let v = grid.point(l);
            (0..d)
                .map(|m| {
                    (0..d)
                        .map(|j| model.jumps[m][j].mean() * model.kernels[m][j].value(v))
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Solves the linear renewal systems for the cluster first moments on the
/// grid, advancing causally in the time index.
pub fn solve_renewal(model: &HawkesModel, grid: Grid) -> Result<RenewalSolution, TailsError> {
    model.ensure_admissible()?;
    model.ensure_stable()?;
    let d = model.dimension();
    let weights = kernel_weights(model, &grid);

    let forcing_q: Vec<Vec<Vec<f64>>> = (0..grid.len())
        .map(|k| {
            let u = grid.point(k);
            (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| {
                            if i == j {
                                model.sojourns[i].survival(u)
                            } else {
                                0.0
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let forcing_l: Vec<Vec<Vec<f64>>> = (0..grid.len())
        .map(|k| {
            let u = grid.point(k);
            (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| model.jumps[i][j].mean() * model.kernels[i][j].value(u))
                        .collect()
                })
                .collect()
        })
        .collect();

    let rq = volterra_march(&forcing_q, &weights, grid.step())?;
    let rl = volterra_march(&forcing_l, &weights, grid.step())?;
    Ok(RenewalSolution {
        grid,
        rq,
        rl,
        rq_frac: None,
        rl_frac: None,
    })
}

// (g_mj * base_col)(u_k) by trapezoid, base_col[k] = base[k][i][m] fixed i,m.
fn convolve_kernel_with(
    model: &HawkesModel,
    grid: &Grid,
    m: usize,
    j: usize,
    col: &[f64],
) -> Vec<f64> {
    let h = grid.step();
    let g: Vec<f64> = (0..grid.len())
        .map(|l| model.kernels[m][j].value(grid.point(l)))
        .collect();
    (0..grid.len())
        .map(|k| {
            if k == 0 {
                return 0.0;
            }
            let mut acc = 0.5 * (g[0] * col[k] + g[k] * col[0]);
            for l in 1..k {
                acc += g[l] * col[k - l];
            }
            acc * h
        })
        .collect()
}

/// Solves the omega-free fractional renewal systems over each component's
/// source set and returns the base solution extended with them.
pub fn solve_renewal_fractional(
    model: &HawkesModel,
    base: &RenewalSolution,
    report: &TailIndexReport,
) -> Result<RenewalSolution, TailsError> {
    let d = model.dimension();
    let grid = base.grid;
    let steps = grid.len();
    let mut rq_frac = vec![vec![vec![0.0; d]; d]; steps];
    let mut rl_frac = vec![vec![vec![0.0; d]; d]; steps];

    for i in 0..d {
        let delta = match report.gamma_bar[i] {
            Some(g) => g,
            None => continue,
        };
        let active = &report.sources[i]; // source columns I_i
        if active.is_empty() {
            continue;
        }
        // restricted kernel weights over (m, j) in I_i x I_i
        let weights: Vec<Vec<Vec<f64>>> = (0..steps)
            .map(|l| {
                let v = grid.point(l);
                active
                    .iter()
                    .map(|&m| {
                        active
                            .iter()
                            .map(|&j| model.jumps[m][j].mean() * model.kernels[m][j].value(v))
                            .collect()
                    })
                    .collect()
            })
            .collect();

        // forcing per column j in I_i:
        //   Q:      sum_{m in I_ij} C_mj ((g_mj * R^Q_im)(u))^delta
        //   lambda: same plus the direct term C_ij g_ij(u)^delta when the
        //           channel (i, j) itself attains the minimal index
        let mut forcing_q = vec![vec![vec![0.0; active.len()]; 1]; steps];
        let mut forcing_l = vec![vec![vec![0.0; active.len()]; 1]; steps];
        for (aj, &j) in active.iter().enumerate() {
            for &m in &report.source_rows[i][j] {
                let c_mj = report.graph.tail_constant[m][j]
                    .expect("source row carries a tail constant");
                let base_q: Vec<f64> = (0..steps).map(|k| base.rq[k][i][m]).collect();
                let base_l: Vec<f64> = (0..steps).map(|k| base.rl[k][i][m]).collect();
                let conv_q = convolve_kernel_with(model, &grid, m, j, &base_q);
                let conv_l = convolve_kernel_with(model, &grid, m, j, &base_l);
                for k in 0..steps {
                    forcing_q[k][0][aj] += c_mj * conv_q[k].max(0.0).powf(delta);
                    forcing_l[k][0][aj] += c_mj * conv_l[k].max(0.0).powf(delta);
                }
            }
            if report.source_rows[i][j].contains(&i) {
                if let Some(c_ij) = report.graph.tail_constant[i][j] {
                    for k in 0..steps {
                        let g = model.kernels[i][j].value(grid.point(k));
                        forcing_l[k][0][aj] += c_ij * g.powf(delta);
                    }
                }
            }
        }

        let sol_q = volterra_march(&forcing_q, &weights, grid.step())?;
        let sol_l = volterra_march(&forcing_l, &weights, grid.step())?;
        for k in 0..steps {
            for (aj, &j) in active.iter().enumerate() {
                rq_frac[k][i][j] = sol_q[k][0][aj];
                rl_frac[k][i][j] = sol_l[k][0][aj];
            }
        }
    }

    Ok(RenewalSolution {
        grid,
        rq: base.rq.clone(),
        rl: base.rl.clone(),
        rq_frac: Some(rq_frac),
        rl_frac: Some(rl_frac),
    })
}

/// Independent route for the linear renewal solutions: solve the
/// Laplace-domain linear systems at real arguments and invert by
/// Gaver–Stehfest. Cross-check only; accuracy is limited by the inversion.
pub fn solve_renewal_laplace(
    model: &HawkesModel,
    grid: Grid,
    process: ProcessKind,
    gs_terms: usize,
) -> Result<Vec<Vec<Vec<f64>>>, TailsError> {
    model.ensure_admissible()?;
    model.ensure_stable()?;
    let d = model.dimension();
    let gs = numeric::gaver_stehfest_weights(gs_terms);
    let mut out = vec![vec![vec![0.0; d]; d]; grid.len()];

    // value at u = 0 analytically
    for i in 0..d {
        for j in 0..d {
            out[0][i][j] = match process {
                ProcessKind::Q => {
                    if i == j {
                        model.sojourns[i].survival(0.0)
                    } else {
                        0.0
                    }
                }
                ProcessKind::N => {
                    if i == j {
                        1.0
                    } else {
                        0.0
                    }
                }
                ProcessKind::Lambda => model.jumps[i][j].mean() * model.kernels[i][j].value(0.0),
            };
        }
    }

    let transform_at = |r: f64| -> Result<Vec<Vec<f64>>, TailsError> {
        // (I - M(r))^T is shared by every row system, where
        // M[m][j] = E[B_mj] L{g_mj}(r)
        let mut m_mat = vec![vec![0.0; d]; d];
        for (m, row) in m_mat.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = model.jumps[m][j].mean() * model.kernels[m][j].laplace(r)?;
            }
        }
        let mut system = vec![vec![0.0; d]; d];
        for a in 0..d {
            for b in 0..d {
                system[a][b] = if a == b { 1.0 } else { 0.0 } - m_mat[a][b];
            }
        }
        let inv = numeric::invert(&system).map_err(|_| TailsError::GridTooCoarse)?;
        // Z = B inv, forcing rows B[i][j]
        let mut z = vec![vec![0.0; d]; d];
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0.0;
                for m in 0..d {
                    let b_im = match process {
                        ProcessKind::Q => {
                            if i == m {
                                model.sojourns[i].laplace_survival(r)
                            } else {
                                0.0
                            }
                        }
                        ProcessKind::N => {
                            if i == m {
                                1.0 / r
                            } else {
                                0.0
                            }
                        }
                        ProcessKind::Lambda => {
                            model.jumps[i][m].mean() * model.kernels[i][m].laplace(r)?
                        }
                    };
                    acc += b_im * inv[m][j];
                }
                z[i][j] = acc;
            }
        }
        Ok(z)
    };

    for k in 1..grid.len() {
        let u = grid.point(k);
        let ln2_u = std::f64::consts::LN_2 / u;
        for (term, w) in gs.iter().enumerate() {
            let z = transform_at((term + 1) as f64 * ln2_u)?;
            for i in 0..d {
                for j in 0..d {
                    out[k][i][j] += w * z[i][j] * ln2_u;
                }
            }
        }
    }
    Ok(out)
}

/// Power-law tail asymptote `P(X_i(t) > x) ~ coefficient * x^{-index}`.
#[derive(Debug, Clone, Copy)]
pub struct TailAsymptote {
    pub coefficient: f64,
    pub index: f64,
}

impl TailAsymptote {
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficient * x.powf(-self.index)
    }
}

/// Tail asymptote of one component of `N`, `Q`, or `lambda` at time `t`.
pub fn tail_asymptote(
    model: &HawkesModel,
    t: f64,
    component: usize,
    process: ProcessKind,
    grid_steps: usize,
) -> Result<TailAsymptote, TailsError> {
    let owned;
    let effective = match process {
        ProcessKind::N => {
            owned = model.with_infinite_sojourns();
            &owned
        }
        ProcessKind::Q | ProcessKind::Lambda => model,
    };
    let report = tail_indices(effective)?;
    let index = report.gamma_bar[component].ok_or(TailsError::NoHeavyTailInfluence {
        component,
    })?;
    let grid = Grid::new(t, grid_steps);
    let base = solve_renewal(effective, grid)?;
    let full = solve_renewal_fractional(effective, &base, &report)?;
    let tensor = match process {
        ProcessKind::N | ProcessKind::Q => full.rq_frac.as_ref().unwrap(),
        ProcessKind::Lambda => full.rl_frac.as_ref().unwrap(),
    };
    let mut coefficient = 0.0;
    for &j in &report.sources[component] {
        let col: Vec<f64> = (0..grid.len()).map(|k| tensor[k][component][j]).collect();
        coefficient += effective.lambda_inf[j] * numeric::trapezoid(&col, grid.step());
    }
    Ok(TailAsymptote { coefficient, index })
}

/// Tail asymptote of a non-negative linear combination of population
/// coordinates; the excitation graph must be irreducible.
pub fn linear_combination_tail(
    model: &HawkesModel,
    t: f64,
    coefficients: &[f64],
    grid_steps: usize,
) -> Result<TailAsymptote, TailsError> {
    let d = model.dimension();
    assert_eq!(coefficients.len(), d);
    assert!(coefficients.iter().all(|&c| c >= 0.0));
    let report = tail_indices(model)?;
    if report.classes.classes.len() != 1 {
        return Err(TailsError::NotIrreducible);
    }
    let index = report.gamma_bar[0].ok_or(TailsError::NoHeavyTailInfluence { component: 0 })?;
    let grid = Grid::new(t, grid_steps);
    let base = solve_renewal(model, grid)?;
    let full = solve_renewal_fractional(model, &base, &report)?;
    let tensor = full.rq_frac.as_ref().unwrap();
    let mut coefficient = 0.0;
    for (i, &ci) in coefficients.iter().enumerate() {
        if ci == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for &j in &report.sources[i] {
            let col: Vec<f64> = (0..grid.len()).map(|k| tensor[k][i][j]).collect();
            inner += model.lambda_inf[j] * numeric::trapezoid(&col, grid.step());
        }
        coefficient += ci.powf(index) * inner;
    }
    Ok(TailAsymptote { coefficient, index })
}
