//! Shared numerical kernels: gamma function, adaptive quadrature, trapezoid
//! rules on uniform grids, small dense linear solves (real and complex), a
//! non-negative-matrix spectral radius, and Gaver–Stehfest Laplace inversion.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericError {
    #[error("quadrature did not reach tolerance {tol} (best error {best})")]
    QuadratureFailed { tol: f64, best: f64 },
    #[error("linear system is singular or ill-conditioned (pivot {pivot})")]
    SingularSystem { pivot: f64 },
    #[error("power iteration did not converge within {max_iter} iterations")]
    PowerIterationFailed { max_iter: usize },
}

// Lanczos approximation, g = 7, 9 terms.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_gamma(x: f64) -> f64 {
    // valid for x >= 0.5
    let mut acc = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x - 1.0 + k as f64);
    }
    let t = x + 6.5;
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(x - 0.5) * (-t).exp() * acc
}

/// Gamma function on the real line, poles at non-positive integers.
///
/// Negative arguments go through the reflection formula, which is the path
/// used for the tail-coefficient weights Γ(1−γ) with γ in (1,2).
pub fn gamma(x: f64) -> f64 {
    if x >= 0.5 {
        lanczos_gamma(x)
    } else {
        let s = (std::f64::consts::PI * x).sin();
        if s == 0.0 {
            return f64::NAN;
        }
        std::f64::consts::PI / (s * lanczos_gamma(1.0 - x))
    }
}

/// Natural log of Gamma for positive arguments (used by the Poisson sampler).
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        let s = (std::f64::consts::PI * x).sin();
        return std::f64::consts::PI.ln() - s.ln() - ln_gamma(1.0 - x);
    }
    let mut acc = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x - 1.0 + k as f64);
    }
    let t = x + 6.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x - 0.5) * t.ln() - t + acc.ln()
}

const QUAD_MAX_DEPTH: u32 = 48;

fn simpson_step<T, F>(f: &F, a: f64, fa: T, b: f64, fb: T) -> (f64, T, T)
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    let m = 0.5 * (a + b);
    let fm = f(m);
    let s = (fa + fm * 4.0 + fb) * ((b - a) / 6.0);
    (m, fm, s)
}

fn adaptive_rec<T, F, N>(
    f: &F,
    norm: &N,
    a: f64,
    fa: T,
    b: f64,
    fb: T,
    whole: T,
    fm: T,
    m: f64,
    tol: f64,
    depth: u32,
) -> Result<T, NumericError>
where
    T: Copy
        + std::ops::Add<Output = T>
        + std::ops::Sub<Output = T>
        + std::ops::Mul<f64, Output = T>,
    F: Fn(f64) -> T,
    N: Fn(T) -> f64,
{
    let (lm, flm, left) = simpson_step(f, a, fa, m, fm);
    let (rm, frm, right) = simpson_step(f, m, fm, b, fb);
    let delta = left + right - whole;
    if norm(delta) <= 15.0 * tol {
        return Ok(left + right + delta * (1.0 / 15.0));
    }
    if depth == 0 {
        return Err(NumericError::QuadratureFailed {
            tol,
            best: norm(delta),
        });
    }
    let lv = adaptive_rec(f, norm, a, fa, m, fm, left, flm, lm, 0.5 * tol, depth - 1)?;
    let rv = adaptive_rec(f, norm, m, fm, b, fb, right, frm, rm, 0.5 * tol, depth - 1)?;
    Ok(lv + rv)
}

/// Adaptive Simpson quadrature with absolute tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64, NumericError> {
    if a == b {
        return Ok(0.0);
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson_step(&f, a, fa, b, fb);
    adaptive_rec(&f, &f64::abs, a, fa, b, fb, whole, fm, m, tol, QUAD_MAX_DEPTH)
}

/// Adaptive Simpson quadrature for complex-valued integrands of a real variable.
pub fn adaptive_simpson_complex<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<Complex64, NumericError> {
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson_step(&f, a, fa, b, fb);
    let norm = |z: Complex64| z.norm();
    adaptive_rec(&f, &norm, a, fa, b, fb, whole, fm, m, tol, QUAD_MAX_DEPTH)
}

/// Trapezoid rule over uniformly spaced samples with spacing `h`.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = values[1..n - 1].iter().sum();
            h * (0.5 * (values[0] + values[n - 1]) + inner)
        }
    }
}

/// Complex trapezoid rule over uniformly spaced samples.
pub fn trapezoid_complex(values: &[Complex64], h: f64) -> Complex64 {
    match values.len() {
        0 | 1 => Complex64::new(0.0, 0.0),
        n => {
            let mut acc = (values[0] + values[n - 1]) * 0.5;
            for v in &values[1..n - 1] {
                acc += v;
            }
            acc * h
        }
    }
}

/// Trapezoid integral of uniformly spaced samples up to an off-grid point `x`.
///
/// Integrates whole cells up to the last grid point below `x`, then closes the
/// fractional cell with linear interpolation.
pub fn trapezoid_to(values: &[Complex64], h: f64, x: f64) -> Complex64 {
    let n = values.len() - 1;
    let pos = (x / h).clamp(0.0, n as f64);
    let k = pos.floor() as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    for l in 0..k {
        acc += (values[l] + values[l + 1]) * (0.5 * h);
    }
    let frac = pos - k as f64;
    if frac > 0.0 && k < n {
        let end = values[k] * (1.0 - frac) + values[k + 1] * frac;
        acc += (values[k] + end) * (0.5 * frac * h);
    }
    acc
}

/// Solves `A x = b` in place by Gaussian elimination with partial pivoting.
pub fn solve_real(a: &mut [Vec<f64>], b: &mut [f64]) -> Result<(), NumericError> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&r1, &r2| a[r1][col].abs().total_cmp(&a[r2][col].abs()))
            .unwrap();
        if a[piv][col].abs() < 1e-300 {
            return Err(NumericError::SingularSystem { pivot: a[piv][col] });
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in col + 1..n {
            acc -= a[col][k] * b[k];
        }
        b[col] = acc / a[col][col];
    }
    Ok(())
}

/// Complex counterpart of [`solve_real`].
pub fn solve_complex(a: &mut [Vec<Complex64>], b: &mut [Complex64]) -> Result<(), NumericError> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&r1, &r2| a[r1][col].norm_sqr().total_cmp(&a[r2][col].norm_sqr()))
            .unwrap();
        if a[piv][col].norm() < 1e-300 {
            return Err(NumericError::SingularSystem {
                pivot: a[piv][col].norm(),
            });
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in col..n {
                let t = f * a[col][k];
                a[row][k] -= t;
            }
            let t = f * b[col];
            b[row] -= t;
        }
    }
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in col + 1..n {
            acc -= a[col][k] * b[k];
        }
        b[col] = acc / a[col][col];
    }
    Ok(())
}

/// Inverse of a small dense matrix, for the per-step Volterra solves.
pub fn invert(m: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, NumericError> {
    let n = m.len();
    let mut out = vec![vec![0.0; n]; n];
    for col in 0..n {
        let mut a: Vec<Vec<f64>> = m.to_vec();
        let mut e = vec![0.0; n];
        e[col] = 1.0;
        solve_real(&mut a, &mut e)?;
        for row in 0..n {
            out[row][col] = e[row];
        }
    }
    Ok(out)
}

// Tarjan components of the support graph, used to split reducible matrices.
fn support_components(m: &[Vec<f64>]) -> Vec<Vec<usize>> {
    struct State {
        index: usize,
        stack: Vec<usize>,
        on_stack: Vec<bool>,
        order: Vec<Option<usize>>,
        low: Vec<usize>,
        comps: Vec<Vec<usize>>,
    }
    fn connect(v: usize, m: &[Vec<f64>], st: &mut State) {
        st.order[v] = Some(st.index);
        st.low[v] = st.index;
        st.index += 1;
        st.stack.push(v);
        st.on_stack[v] = true;
        for w in 0..m.len() {
            if m[v][w] <= 0.0 {
                continue;
            }
            if st.order[w].is_none() {
                connect(w, m, st);
                st.low[v] = st.low[v].min(st.low[w]);
            } else if st.on_stack[w] {
                st.low[v] = st.low[v].min(st.order[w].unwrap());
            }
        }
        if st.low[v] == st.order[v].unwrap() {
            let mut comp = Vec::new();
            loop {
                let w = st.stack.pop().expect("tarjan stack underflow");
                st.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            st.comps.push(comp);
        }
    }
    let n = m.len();
    let mut st = State {
        index: 0,
        stack: Vec::new(),
        on_stack: vec![false; n],
        order: vec![None; n],
        low: vec![0; n],
        comps: Vec::new(),
    };
    for v in 0..n {
        if st.order[v].is_none() {
            connect(v, m, &mut st);
        }
    }
    st.comps
}

// Shifted power iteration on an irreducible non-negative block: `I + B` is
// primitive there, so the Perron root is simple and convergence geometric.
fn perron_root(block: &[Vec<f64>], tol: f64, max_iter: usize) -> Result<f64, NumericError> {
    let d = block.len();
    let mut x: Vec<f64> = (0..d)
        .map(|i| {
            let h = crate::rng::mix64(0xC0FF_EE00_u64 ^ (i as u64).wrapping_mul(0x9E37_79B9));
            0.5 + (h >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect();
    let norm: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= norm);

    let mut estimate = f64::NAN;
    for _ in 0..max_iter {
        let mut y = x.clone();
        for (i, yi) in y.iter_mut().enumerate() {
            for (j, xj) in x.iter().enumerate() {
                *yi += block[i][j] * xj;
            }
        }
        let s: f64 = y.iter().sum();
        y.iter_mut().for_each(|v| *v /= s);
        let next = s - 1.0;
        if (next - estimate).abs() <= tol * next.abs().max(1.0) {
            return Ok(next.max(0.0));
        }
        estimate = next;
        x = y;
    }
    Err(NumericError::PowerIterationFailed { max_iter })
}

/// Spectral radius of an elementwise non-negative matrix.
///
/// The radius of a reducible matrix is the largest Perron root over the
/// strongly connected blocks of its support, so each block gets its own
/// shifted power iteration; a defective full-matrix iteration would crawl at
/// `1/n` rates on equal-radius blocks.
pub fn spectral_radius_nonneg(
    m: &[Vec<f64>],
    tol: f64,
    max_iter: usize,
) -> Result<f64, NumericError> {
    let d = m.len();
    if d == 0 {
        return Ok(0.0);
    }
    let mut rho: f64 = 0.0;
    for comp in support_components(m) {
        if comp.len() == 1 {
            let v = comp[0];
            rho = rho.max(m[v][v].max(0.0));
            continue;
        }
        let block: Vec<Vec<f64>> = comp
            .iter()
            .map(|&i| comp.iter().map(|&j| m[i][j]).collect())
            .collect();
        rho = rho.max(perron_root(&block, tol, max_iter)?);
    }
    Ok(rho)
}

/// Gaver–Stehfest weights for an even number of terms.
pub fn gaver_stehfest_weights(terms: usize) -> Vec<f64> {
    assert!(terms % 2 == 0 && terms >= 2, "term count must be even");
    let half = terms / 2;
    let fact = |k: usize| -> f64 { (1..=k).map(|v| v as f64).product() };
    let mut w = vec![0.0; terms];
    for (k, wk) in w.iter_mut().enumerate() {
        let k1 = k + 1;
        let mut acc = 0.0;
        for j in k1.div_ceil(2)..=k1.min(half) {
            acc += (j as f64).powi(half as i32) * fact(2 * j)
                / (fact(half - j) * fact(j) * fact(j - 1) * fact(k1 - j) * fact(2 * j - k1));
        }
        let sign = if (half + k1) % 2 == 0 { 1.0 } else { -1.0 };
        *wk = sign * acc;
    }
    w
}

/// Gaver–Stehfest inversion of a Laplace transform at time `t > 0`.
///
/// Only real positive transform arguments are evaluated, so kernels that lack
/// closed-form transforms can be handled by real quadrature.
pub fn gaver_stehfest<F: Fn(f64) -> f64>(transform: F, t: f64, weights: &[f64]) -> f64 {
    debug_assert!(t > 0.0);
    let ln2_t = std::f64::consts::LN_2 / t;
    let mut acc = 0.0;
    for (k, w) in weights.iter().enumerate() {
        acc += w * transform((k + 1) as f64 * ln2_t);
    }
    acc * ln2_t
}

/// Damped-Fourier Laplace inversion with Euler summation, abscissa right of
/// zero: `s_k = a/(2t) + i k pi / t`. Unlike Gaver–Stehfest it keeps its
/// accuracy on solutions with fractional-power behavior near the origin; the
/// error floor is about `e^{-a}` of the function scale.
pub fn euler_laplace_inversion<F: Fn(Complex64) -> Complex64>(
    transform: F,
    t: f64,
    alternating_terms: usize,
    euler_terms: usize,
) -> f64 {
    debug_assert!(t > 0.0);
    let a = 18.4;
    let sigma = a / (2.0 * t);
    let mut acc = 0.5 * transform(Complex64::new(sigma, 0.0)).re;
    let mut partials = Vec::with_capacity(alternating_terms + euler_terms);
    for k in 1..=(alternating_terms + euler_terms) {
        let s = Complex64::new(sigma, k as f64 * std::f64::consts::PI / t);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * transform(s).re;
        partials.push(acc);
    }
    // binomial average of the last euler_terms + 1 partial sums
    let m = euler_terms;
    let mut value = 0.0;
    let mut coeff = 1.0f64;
    for j in 0..=m {
        value += coeff * partials[alternating_terms - 1 + j];
        coeff = coeff * (m - j) as f64 / (j + 1) as f64;
    }
    value *= 0.5f64.powi(m as i32);
    (0.5 * a).exp() / t * value
}
