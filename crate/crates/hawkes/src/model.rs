//! Model specification for multivariate Hawkes population processes.
//!
//! A model couples, for a `d`-component system:
//!
//! - base rates `lambda_inf[i] > 0`,
//! - decay kernels `kernels[i][j]` describing how an event in source
//!   component `j` excites the intensity of target component `i`,
//! - jump-size distributions `jumps[i][j]` for the intensity increments, and
//! - per-component sojourn distributions governing departures from the
//!   population process.
//!
//! The intensity of component `i` is
//!
//! ```text
//! lambda_i(t) = lambda_inf_i + sum over past events (T, j) of B_ij * g_ij(t - T)
//! ```
//!
//! with a fresh jump mark `B_ij` per event and target. Stability holds when
//! the spectral radius of the branching matrix `E[B_ij] * ||g_ij||_L1` is
//! below one; in that case the stationary mean intensity solves a linear
//! system in the base rates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{self, NumericError};
use crate::rng::Stream;

/// Version tag of the model config file format.
pub const SCHEMA_VERSION: u32 = 1;

/// Absolute tolerance of the Pareto jump LST quadrature.
pub const JUMP_LST_TOL: f64 = 1e-10;

/// Relative tolerance of the spectral-radius power iteration.
pub const SPECTRAL_TOL: f64 = 1e-12;
pub const SPECTRAL_MAX_ITER: usize = 10_000;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("inconsistent model shape: {0}")]
    Shape(String),
    #[error("config schema {found} is not supported (expected {expected})")]
    Schema { found: u32, expected: u32 },
    #[error("model fails validation: {0}")]
    Invalid(String),
    #[error("model is unstable: spectral radius {rho} >= 1")]
    Unstable { rho: f64 },
    #[error("numeric failure: {0}")]
    Numeric(#[from] NumericError),
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Intensity decay kernel `g(t)` of one excitation channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    /// `g(t) = exp(-alpha t)` with `alpha > 0`.
    Exponential { alpha: f64 },
    /// `g(t) = (c + t)^{-p}` with `c > 0` and `p > 1` for integrability.
    PowerLaw { c: f64, p: f64 },
    /// Channel carries no excitation.
    Zero,
}

impl KernelSpec {
    /// `g(t)`; non-increasing in `t` for both families.
    ///
    /// Panics on negative `t`.
    pub fn value(&self, t: f64) -> f64 {
        assert!(t >= 0.0, "kernel argument must be non-negative, got {t}");
        match *self {
            KernelSpec::Exponential { alpha } => (-alpha * t).exp(),
            KernelSpec::PowerLaw { c, p } => (c + t).powf(-p),
            KernelSpec::Zero => 0.0,
        }
    }

    /// `int_0^u g(v) dv` in closed form.
    pub fn integral(&self, u: f64) -> f64 {
        assert!(u >= 0.0, "kernel argument must be non-negative, got {u}");
        match *self {
            KernelSpec::Exponential { alpha } => (1.0 - (-alpha * u).exp()) / alpha,
            KernelSpec::PowerLaw { c, p } => {
                (c.powf(1.0 - p) - (c + u).powf(1.0 - p)) / (p - 1.0)
            }
            KernelSpec::Zero => 0.0,
        }
    }

    /// `int_0^inf g(v) dv`.
    pub fn l1_norm(&self) -> f64 {
        match *self {
            KernelSpec::Exponential { alpha } => 1.0 / alpha,
            KernelSpec::PowerLaw { c, p } => c.powf(1.0 - p) / (p - 1.0),
            KernelSpec::Zero => 0.0,
        }
    }

    /// Quantile of the normalized arrival-offset density `g(v) / int_0^u g`
    /// on `[0, u]`, used to place offspring events.
    pub fn offset_quantile(&self, u: f64, q: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&q));
        match *self {
            KernelSpec::Exponential { alpha } => {
                let total = 1.0 - (-alpha * u).exp();
                -(-q * total).ln_1p() / alpha
            }
            KernelSpec::PowerLaw { c, p } => {
                let lo = c.powf(1.0 - p);
                let hi = (c + u).powf(1.0 - p);
                (lo - q * (lo - hi)).powf(1.0 / (1. - p)) - c
            }
            KernelSpec::Zero => panic!("offset quantile of a zero kernel"),
        }
    }

    /// `L{g}(r)` for real `r > 0`; the power-law case is evaluated by
    /// quadrature with an analytic tail cutoff.
    pub fn laplace(&self, r: f64) -> Result<f64, NumericError> {
        debug_assert!(r > 0.0);
        match *self {
            KernelSpec::Exponential { alpha } => Ok(1.0 / (alpha + r)),
            KernelSpec::Zero => Ok(0.0),
            KernelSpec::PowerLaw { c, p } => {
                let horizon = 45.0 / r;
                numeric::adaptive_simpson(|t| (-r * t).exp() * (c + t).powf(-p), 0.0, horizon, 1e-12)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            KernelSpec::Zero => true,
            KernelSpec::Exponential { .. } | KernelSpec::PowerLaw { .. } => false,
        }
    }
}

/// Distribution of the intensity jump of one excitation channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum JumpSpec {
    /// Channel never jumps; equivalent to an absent edge.
    Zero,
    /// Degenerate jump of fixed size.
    Constant { size: f64 },
    /// Exponential jump with the given mean.
    Exponential { mean: f64 },
    /// Pareto-II (Lomax) jump with survival `(1 + x / sigma)^{-gamma}` and
    /// `sigma = c^{1/gamma}`, so that `P(B > x) x^gamma -> c`.
    ParetoTail { c: f64, gamma: f64 },
}

impl JumpSpec {
    pub fn mean(&self) -> f64 {
        match *self {
            JumpSpec::Zero => 0.0,
            JumpSpec::Constant { size } => size,
            JumpSpec::Exponential { mean } => mean,
            JumpSpec::ParetoTail { c, gamma } => c.powf(1.0 / gamma) / (gamma - 1.0),
        }
    }

    /// True when the jump is identically zero and the channel is inert.
    pub fn is_zero(&self) -> bool {
        self.mean() == 0.0
    }

    /// Tail constant and index when the jump has a power-law tail.
    pub fn apt(&self) -> Option<(f64, f64)> {
        match *self {
            JumpSpec::ParetoTail { c, gamma } => Some((c, gamma)),
            _ => None,
        }
    }

    /// Laplace–Stieltjes transform `E[exp(-x B)]` at real `x >= 0`.
    pub fn lst(&self, x: f64) -> Result<f64, NumericError> {
        assert!(x >= 0.0, "LST argument must be non-negative, got {x}");
        Ok(self.lst_complex(Complex64::new(x, 0.0))?.re)
    }

    /// LST at a complex argument with non-negative real part. Arises inside
    /// the transform fixed point, where the argument couples the direct
    /// intensity load of an event with its offspring generating functional.
    pub fn lst_complex(&self, w: Complex64) -> Result<Complex64, NumericError> {
        assert!(
            w.re >= -1e-12,
            "LST argument must have non-negative real part, got {w}"
        );
        match *self {
            JumpSpec::Zero => Ok(Complex64::new(1.0, 0.0)),
            JumpSpec::Constant { size } => Ok((-w * size).exp()),
            JumpSpec::Exponential { mean } => Ok((Complex64::new(1.0, 0.0) + w * mean).inv()),
            JumpSpec::ParetoTail { c, gamma } => {
                if w.norm() == 0.0 {
                    return Ok(Complex64::new(1.0, 0.0));
                }
                // substitute 1 + b/sigma = 1/v:
                //   E[e^{-wB}] = int_0^1 gamma v^{gamma-1} exp(-w sigma (1/v - 1)) dv
                let sigma = c.powf(1.0 / gamma);
                let ws = w * sigma;
                numeric::adaptive_simpson_complex(
                    move |v| {
                        if v <= 0.0 {
                            return Complex64::new(0.0, 0.0);
                        }
                        let damp = (-ws * (1.0 / v - 1.0)).exp();
                        damp * gamma * v.powf(gamma - 1.0)
                    },
                    0.0,
                    1.0,
                    JUMP_LST_TOL,
                )
            }
        }
    }

    /// Draws one jump mark.
    pub fn sample(&self, rng: &mut Stream) -> f64 {
        match *self {
            JumpSpec::Zero => 0.0,
            JumpSpec::Constant { size } => size,
            JumpSpec::Exponential { mean } => mean * -rng.next_open01().ln(),
            JumpSpec::ParetoTail { c, gamma } => {
                let sigma = c.powf(1.0 / gamma);
                sigma * (rng.next_open01().powf(-1.0 / gamma) - 1.0)
            }
        }
    }

    /// Jump scaled by a positive factor (`B -> k B`): used to renormalize
    /// randomly generated models onto a target spectral radius.
    pub fn scaled(&self, k: f64) -> JumpSpec {
        debug_assert!(k > 0.0);
        match *self {
            JumpSpec::Zero => JumpSpec::Zero,
            JumpSpec::Constant { size } => JumpSpec::Constant { size: size * k },
            JumpSpec::Exponential { mean } => JumpSpec::Exponential { mean: mean * k },
            JumpSpec::ParetoTail { c, gamma } => JumpSpec::ParetoTail {
                c: c * k.powf(gamma),
                gamma,
            },
        }
    }
}

/// Sojourn-time distribution of one component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SojournSpec {
    /// Customers never depart; the population process equals the counting
    /// process.
    Infinite,
    /// Exponential sojourn with the given departure rate.
    Exponential { rate: f64 },
    /// Deterministic sojourn; departure occurs exactly at age `tau`.
    Deterministic { tau: f64 },
}

impl SojournSpec {
    /// `P(J > u)`; the deterministic variant uses the strict inequality, so
    /// survival at `u = tau` is zero.
    pub fn survival(&self, u: f64) -> f64 {
        debug_assert!(u >= 0.0);
        match *self {
            SojournSpec::Infinite => 1.0,
            SojournSpec::Exponential { rate } => (-rate * u).exp(),
            SojournSpec::Deterministic { tau } => {
                if tau > u {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn sample(&self, rng: &mut Stream) -> f64 {
        match *self {
            SojournSpec::Infinite => f64::INFINITY,
            SojournSpec::Exponential { rate } => rng.exponential(rate),
            SojournSpec::Deterministic { tau } => tau,
        }
    }

    /// `L{P(J > .)}(r)` for real `r > 0`.
    pub fn laplace_survival(&self, r: f64) -> f64 {
        debug_assert!(r > 0.0);
        match *self {
            SojournSpec::Infinite => 1.0 / r,
            SojournSpec::Exponential { rate } => 1.0 / (r + rate),
            SojournSpec::Deterministic { tau } => (1.0 - (-r * tau).exp()) / r,
        }
    }
}

/// Outcome of checking a model against its admissibility constraints.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_admissible(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            write!(f, "model admissible")
        } else {
            write!(f, "{} violation(s):", self.violations.len())?;
            for v in &self.violations {
                write!(f, "\n  - {v}")?;
            }
            Ok(())
        }
    }
}

/// Branching matrix `||H||` with entries `E[B_ij] * ||g_ij||_L1` and its
/// spectral radius; the model is stable iff the radius is below one.
#[derive(Debug, Clone)]
pub struct BranchingMatrix {
    pub entries: Vec<Vec<f64>>,
    pub spectral_radius: f64,
}

/// Full parameterization of a multivariate Hawkes population process.
///
/// Matrix entry `(i, j)` always describes the impact of events in source
/// component `j` on target component `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct HawkesModel {
    pub lambda_inf: Vec<f64>,
    pub kernels: Vec<Vec<KernelSpec>>,
    pub jumps: Vec<Vec<JumpSpec>>,
    pub sojourns: Vec<SojournSpec>,
}

impl HawkesModel {
    pub fn new(
        lambda_inf: Vec<f64>,
        kernels: Vec<Vec<KernelSpec>>,
        jumps: Vec<Vec<JumpSpec>>,
        sojourns: Vec<SojournSpec>,
    ) -> Result<Self, ModelError> {
        let d = lambda_inf.len();
        if d == 0 {
            return Err(ModelError::Shape("dimension must be at least 1".into()));
        }
        let square = |name: &str, rows: usize, cols: Option<usize>| -> Result<(), ModelError> {
            if rows != d || cols.map(|c| c != d).unwrap_or(false) {
                return Err(ModelError::Shape(format!(
                    "{name} must be a {d}x{d} matrix"
                )));
            }
            Ok(())
        };
        square("kernels", kernels.len(), None)?;
        for row in &kernels {
            square("kernels", d, Some(row.len()))?;
        }
        square("jumps", jumps.len(), None)?;
        for row in &jumps {
            square("jumps", d, Some(row.len()))?;
        }
        if sojourns.len() != d {
            return Err(ModelError::Shape(format!(
                "sojourns must have {d} entries"
            )));
        }
        Ok(HawkesModel {
            lambda_inf,
            kernels,
            jumps,
            sojourns,
        })
    }

    pub fn dimension(&self) -> usize {
        self.lambda_inf.len()
    }

    /// Lists every violated admissibility constraint; empty iff the model is
    /// admissible.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let bad = |x: f64| !x.is_finite();
        for (i, &rate) in self.lambda_inf.iter().enumerate() {
            if bad(rate) || rate <= 0.0 {
                report
                    .violations
                    .push(format!("base rate must be positive: lambda_inf[{i}] = {rate}"));
            }
        }
        for (i, row) in self.kernels.iter().enumerate() {
            for (j, k) in row.iter().enumerate() {
                match *k {
                    KernelSpec::Exponential { alpha } if bad(alpha) || alpha <= 0.0 => {
                        report
                            .violations
                            .push(format!("decay rate must be positive: kernels[{i}][{j}]"));
                    }
                    KernelSpec::PowerLaw { c, p } => {
                        if bad(c) || c <= 0.0 {
                            report
                                .violations
                                .push(format!("shift must be positive: kernels[{i}][{j}]"));
                        }
                        if bad(p) || p <= 1.0 {
                            report
                                .violations
                                .push(format!("p must exceed 1: kernels[{i}][{j}]"));
                        }
                    }
                    _ => {}
                }
            }
        }
        for (i, row) in self.jumps.iter().enumerate() {
            for (j, b) in row.iter().enumerate() {
                match *b {
                    JumpSpec::Constant { size } if bad(size) || size < 0.0 => {
                        report
                            .violations
                            .push(format!("jump size must be non-negative: jumps[{i}][{j}]"));
                    }
                    JumpSpec::Exponential { mean } if bad(mean) || mean <= 0.0 => {
                        report
                            .violations
                            .push(format!("jump mean must be positive: jumps[{i}][{j}]"));
                    }
                    JumpSpec::ParetoTail { c, gamma } => {
                        if bad(c) || c <= 0.0 {
                            report.violations.push(format!(
                                "tail constant must be positive: jumps[{i}][{j}]"
                            ));
                        }
                        if bad(gamma) || gamma <= 1.0 {
                            report
                                .violations
                                .push(format!("gamma must exceed 1: jumps[{i}][{j}]"));
                        }
                    }
                    _ => {}
                }
            }
        }
        for (i, s) in self.sojourns.iter().enumerate() {
            match *s {
                SojournSpec::Exponential { rate } if bad(rate) || rate <= 0.0 => {
                    report
                        .violations
                        .push(format!("departure rate must be positive: sojourns[{i}]"));
                }
                SojournSpec::Deterministic { tau } if bad(tau) || tau < 0.0 => {
                    report
                        .violations
                        .push(format!("sojourn length must be non-negative: sojourns[{i}]"));
                }
                _ => {}
            }
        }
        report
    }

    pub fn ensure_admissible(&self) -> Result<(), ModelError> {
        let report = self.validate();
        if report.is_admissible() {
            Ok(())
        } else {
            Err(ModelError::Invalid(report.violations.join("; ")))
        }
    }

    /// Channel `(target i, source j)` carries excitation: both the jump mean
    /// and the kernel mass are positive. A zero jump renders the kernel inert
    /// and vice versa.
    pub fn edge(&self, i: usize, j: usize) -> bool {
        self.jumps[i][j].mean() > 0.0 && self.kernels[i][j].l1_norm() > 0.0
    }

    pub fn branching_matrix(&self) -> Result<BranchingMatrix, ModelError> {
        let d = self.dimension();
        let entries: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| self.jumps[i][j].mean() * self.kernels[i][j].l1_norm())
                    .collect()
            })
            .collect();
        let spectral_radius =
            numeric::spectral_radius_nonneg(&entries, SPECTRAL_TOL, SPECTRAL_MAX_ITER)?;
        Ok(BranchingMatrix {
            entries,
            spectral_radius,
        })
    }

    pub fn is_stable(&self) -> Result<bool, ModelError> {
        Ok(self.branching_matrix()?.spectral_radius < 1.0)
    }

    pub fn ensure_stable(&self) -> Result<(), ModelError> {
        let rho = self.branching_matrix()?.spectral_radius;
        if rho < 1.0 {
            Ok(())
        } else {
            Err(ModelError::Unstable { rho })
        }
    }

    /// Stationary mean intensity, solving `(I - ||H||) lambda = lambda_inf`.
    pub fn stationary_intensity(&self) -> Result<Vec<f64>, ModelError> {
        let bm = self.branching_matrix()?;
        if bm.spectral_radius >= 1.0 {
            return Err(ModelError::Unstable {
                rho: bm.spectral_radius,
            });
        }
        let d = self.dimension();
        let mut a: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| if i == j { 1.0 } else { 0.0 } - bm.entries[i][j])
                    .collect()
            })
            .collect();
        let mut b = self.lambda_inf.clone();
        numeric::solve_real(&mut a, &mut b)?;
        Ok(b)
    }

    /// Copy of the model with departures disabled, turning the population
    /// process into the plain counting process.
    pub fn with_infinite_sojourns(&self) -> HawkesModel {
        let mut out = self.clone();
        out.sojourns = vec![SojournSpec::Infinite; self.dimension()];
        out
    }

    pub fn from_json(text: &str) -> Result<HawkesModel, ModelError> {
        let config: ModelConfig = serde_json::from_str(text)?;
        config.into_model()
    }

    pub fn from_path(path: &std::path::Path) -> Result<HawkesModel, ModelError> {
        HawkesModel::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ModelConfig::from_model(self)).expect("model serializes")
    }
}

/// On-disk model description. The `schema` field guards format evolution and
/// unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub schema: u32,
    pub dimension: usize,
    pub base_rates: Vec<f64>,
    pub kernels: Vec<Vec<KernelSpec>>,
    pub jumps: Vec<Vec<JumpSpec>>,
    pub sojourns: Vec<SojournSpec>,
}

impl ModelConfig {
    pub fn from_model(model: &HawkesModel) -> ModelConfig {
        ModelConfig {
            schema: SCHEMA_VERSION,
            dimension: model.dimension(),
            base_rates: model.lambda_inf.clone(),
            kernels: model.kernels.clone(),
            jumps: model.jumps.clone(),
            sojourns: model.sojourns.clone(),
        }
    }

    pub fn into_model(self) -> Result<HawkesModel, ModelError> {
        if self.schema != SCHEMA_VERSION {
            return Err(ModelError::Schema {
                found: self.schema,
                expected: SCHEMA_VERSION,
            });
        }
        if self.base_rates.len() != self.dimension {
            return Err(ModelError::Shape(format!(
                "base_rates has {} entries, dimension says {}",
                self.base_rates.len(),
                self.dimension
            )));
        }
        HawkesModel::new(self.base_rates, self.kernels, self.jumps, self.sojourns)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Bivariate benchmark model with exponential decay, constant jumps and
    /// exponential sojourns.
    pub fn benchmark_model() -> HawkesModel {
        HawkesModel::new(
            vec![0.5, 0.5],
            vec![
                vec![
                    KernelSpec::Exponential { alpha: 2.3 },
                    KernelSpec::Exponential { alpha: 2.3 },
                ],
                vec![
                    KernelSpec::Exponential { alpha: 2.0 },
                    KernelSpec::Exponential { alpha: 2.0 },
                ],
            ],
            vec![
                vec![JumpSpec::Constant { size: 1.3 }, JumpSpec::Constant { size: 0.6 }],
                vec![JumpSpec::Constant { size: 0.8 }, JumpSpec::Constant { size: 0.5 }],
            ],
            vec![
                SojournSpec::Exponential { rate: 2.0 },
                SojournSpec::Exponential { rate: 2.0 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn kernel_values() {
        let k = KernelSpec::Exponential { alpha: 2.0 };
        assert_eq!(k.value(0.0), 1.0);
        assert!((k.value(1.0) - 0.135_335_283_236_612_7).abs() < 1e-15);
        let p = KernelSpec::PowerLaw { c: 1.5, p: 2.5 };
        assert!((p.value(0.0) - 0.362_887_369_1).abs() < 1e-9);
        assert_eq!(KernelSpec::Zero.value(3.0), 0.0);
    }

    #[test]
    #[should_panic]
    fn kernel_rejects_negative_time() {
        KernelSpec::Zero.value(-0.1);
    }

    #[test]
    fn kernel_integrals() {
        let k = KernelSpec::Exponential { alpha: 2.0 };
        assert!((k.integral(1.0) - 0.432_332_358_381_693_65).abs() < 1e-15);
        assert_eq!(k.integral(0.0), 0.0);
        assert_eq!(KernelSpec::PowerLaw { c: 1.5, p: 2.5 }.integral(0.0), 0.0);

        // limit u -> inf equals the L1 norm; quadrature oracle for power law
        let p = KernelSpec::PowerLaw { c: 1.5, p: 2.5 };
        assert!((p.integral(1e6) - p.l1_norm()).abs() < 1e-8);
        let quad = numeric::adaptive_simpson(|t| p.value(t), 0.0, 1e5, 1e-10).unwrap();
        assert!((quad - p.l1_norm()).abs() < 1e-6, "quad {quad}");
        assert!((p.l1_norm() - 0.362_887_369_1).abs() < 1e-9);
    }

    #[test]
    fn kernel_integral_monotone_and_bounded() {
        let mut rng = Stream::new(77);
        for _ in 0..50 {
            let k = if rng.next_f64() < 0.5 {
                KernelSpec::Exponential {
                    alpha: rng.uniform(0.2, 4.0),
                }
            } else {
                KernelSpec::PowerLaw {
                    c: rng.uniform(0.3, 3.0),
                    p: rng.uniform(1.1, 4.0),
                }
            };
            let l1 = k.l1_norm();
            let mut prev = 0.0;
            let mut u = 0.0;
            for _ in 0..60 {
                u += rng.uniform(0.05, 0.4);
                let v = k.integral(u);
                assert!(v + 1e-12 >= prev, "integral not monotone for {k:?}");
                assert!(v <= l1 + 1e-12, "integral exceeds L1 for {k:?}");
                prev = v;
            }
        }
    }

    #[test]
    fn offset_quantile_inverts_integral() {
        let mut rng = Stream::new(3);
        for _ in 0..40 {
            let k = if rng.next_f64() < 0.5 {
                KernelSpec::Exponential {
                    alpha: rng.uniform(0.2, 4.0),
                }
            } else {
                KernelSpec::PowerLaw {
                    c: rng.uniform(0.3, 3.0),
                    p: rng.uniform(1.1, 4.0),
                }
            };
            let u = rng.uniform(0.2, 6.0);
            let q = rng.next_f64();
            let v = k.offset_quantile(u, q);
            assert!((0.0..=u + 1e-9).contains(&v));
            assert!((k.integral(v) - q * k.integral(u)).abs() < 1e-9);
        }
    }

    #[test]
    fn jump_lst_values() {
        let c = JumpSpec::Constant { size: 1.3 };
        assert_eq!(c.lst(0.0).unwrap(), 1.0);
        assert!((c.lst(1.0).unwrap() - 0.272_531_793_034_012_6).abs() < 1e-15);

        // independent oracle: direct quadrature of e^{-x b} against the
        // Lomax density on the b axis
        let j = JumpSpec::ParetoTail { c: 1.0, gamma: 1.8 };
        let x = 0.5;
        let sigma: f64 = 1.0;
        let oracle = numeric::adaptive_simpson(
            |b| (-x * b).exp() * (1.8 / sigma) * (1.0 + b / sigma).powf(-2.8),
            0.0,
            200.0,
            1e-9,
        )
        .unwrap();
        let got = j.lst(x).unwrap();
        assert!((got - oracle).abs() < 1e-6, "got {got}, oracle {oracle}");
    }

    #[test]
    fn jump_lst_monotone_convex_and_normalized() {
        let mut rng = Stream::new(15);
        let specs = [
            JumpSpec::Constant { size: 0.9 },
            JumpSpec::Exponential { mean: 1.7 },
            JumpSpec::ParetoTail { c: 0.8, gamma: 1.5 },
            JumpSpec::ParetoTail {
                c: rng.uniform(0.3, 2.0),
                gamma: rng.uniform(1.2, 3.0),
            },
        ];
        for j in specs {
            let xs: Vec<f64> = (0..21).map(|k| 0.25 * k as f64).collect();
            let vals: Vec<f64> = xs.iter().map(|&x| j.lst(x).unwrap()).collect();
            assert!((vals[0] - 1.0).abs() < 1e-9, "{j:?} not normalized");
            for w in vals.windows(2) {
                assert!(w[1] <= w[0] + 1e-9, "{j:?} LST not non-increasing");
            }
            for w in vals.windows(3) {
                assert!(
                    w[0] + w[2] - 2.0 * w[1] >= -1e-7,
                    "{j:?} LST not convex on grid"
                );
            }
        }
    }

    #[test]
    fn jump_mean_matches_samples() {
        let mut rng = Stream::new(21);
        for j in [
            JumpSpec::Exponential { mean: 0.7 },
            JumpSpec::ParetoTail { c: 1.0, gamma: 2.5 },
        ] {
            let n = 400_000;
            let mut acc = 0.0;
            for _ in 0..n {
                acc += j.sample(&mut rng);
            }
            let est = acc / n as f64;
            assert!(
                (est - j.mean()).abs() < 0.02 * j.mean(),
                "{j:?}: sample mean {est} vs {}",
                j.mean()
            );
        }
    }

    #[test]
    fn pareto_tail_constant_realized() {
        // P(B > x) x^gamma -> c
        let j = JumpSpec::ParetoTail { c: 2.0, gamma: 1.8 };
        let sigma = 2.0f64.powf(1.0 / 1.8);
        for &x in &[50.0, 500.0] {
            let survival = (1.0 + x / sigma).powf(-1.8);
            let ratio = survival * x.powf(1.8) / 2.0;
            assert!((ratio - 1.0).abs() < 0.1, "x={x} ratio={ratio}");
        }
    }

    #[test]
    fn sojourn_survival_values() {
        assert_eq!(SojournSpec::Infinite.survival(100.0), 1.0);
        let e = SojournSpec::Exponential { rate: 2.0 };
        assert!((e.survival(1.0) - 0.135_335_283_236_612_7).abs() < 1e-15);
        let d = SojournSpec::Deterministic { tau: 1.0 };
        assert_eq!(d.survival(1.0), 0.0);
        assert_eq!(d.survival(0.999), 1.0);
    }

    #[test]
    fn validation_examples() {
        let ok = HawkesModel::new(
            vec![0.5],
            vec![vec![KernelSpec::Exponential { alpha: 1.0 }]],
            vec![vec![JumpSpec::Constant { size: 0.5 }]],
            vec![SojournSpec::Infinite],
        )
        .unwrap();
        assert!(ok.validate().is_admissible());

        let mut bad = ok.clone();
        bad.kernels[0][0] = KernelSpec::PowerLaw { c: 1.0, p: 1.0 };
        let report = bad.validate();
        assert!(report.violations.iter().any(|v| v.contains("p must exceed 1")));

        let mut zero_rate = ok.clone();
        zero_rate.lambda_inf[0] = 0.0;
        let report = zero_rate.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| v.contains("base rate must be positive")));
    }

    #[test]
    fn branching_matrix_benchmark() {
        let model = benchmark_model();
        let bm = model.branching_matrix().unwrap();
        let expected = [[1.3 / 2.3, 0.6 / 2.3], [0.8 / 2.0, 0.5 / 2.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((bm.entries[i][j] - expected[i][j]).abs() < 1e-12);
            }
        }
        // 2x2 eigenvalue oracle
        let tr = expected[0][0] + expected[1][1];
        let det = expected[0][0] * expected[1][1] - expected[0][1] * expected[1][0];
        let rho = 0.5 * (tr + (tr * tr - 4.0 * det).sqrt());
        assert!((bm.spectral_radius - rho).abs() < 1e-9);
        assert!((bm.spectral_radius - 0.767).abs() < 5e-4);
        assert!(model.is_stable().unwrap());
    }

    #[test]
    fn stationary_intensity_benchmark() {
        let model = benchmark_model();
        let lam = model.stationary_intensity().unwrap();
        // hand-solved 2x2 system
        let h = [[1.3 / 2.3, 0.6 / 2.3], [0.8 / 2.0, 0.5 / 2.0]];
        let det = (1.0 - h[0][0]) * (1.0 - h[1][1]) - h[0][1] * h[1][0];
        let l1 = ((1.0 - h[1][1]) * 0.5 + h[0][1] * 0.5) / det;
        let l2 = (h[1][0] * 0.5 + (1.0 - h[0][0]) * 0.5) / det;
        assert!((lam[0] - l1).abs() < 1e-10);
        assert!((lam[1] - l2).abs() < 1e-10);
        assert!((lam[0] - 2.279).abs() < 1e-3);
        assert!((lam[1] - 1.882).abs() < 1e-3);

        // residual check
        let bm = model.branching_matrix().unwrap();
        for i in 0..2 {
            let res: f64 = lam[i]
                - (0..2).map(|j| bm.entries[i][j] * lam[j]).sum::<f64>()
                - model.lambda_inf[i];
            assert!(res.abs() < 1e-10);
        }
    }

    #[test]
    fn unstable_model_rejected() {
        let model = HawkesModel::new(
            vec![0.5],
            vec![vec![KernelSpec::Exponential { alpha: 1.0 }]],
            vec![vec![JumpSpec::Constant { size: 1.5 }]],
            vec![SojournSpec::Infinite],
        )
        .unwrap();
        match model.stationary_intensity() {
            Err(ModelError::Unstable { rho }) => assert!((rho - 1.5).abs() < 1e-9),
            other => panic!("expected instability error, got {other:?}"),
        }
    }

    #[test]
    fn bivariate_stability_inequality_matches_spectral_radius() {
        // (1 - h11)(1 - h22) > h12 h21 with h11, h22 < 1
        let mut rng = Stream::new(2024);
        for _ in 0..100 {
            let h11 = rng.uniform(0.0, 0.95);
            let h22 = rng.uniform(0.0, 0.95);
            let h12 = rng.uniform(0.0, 1.2);
            let h21 = rng.uniform(0.0, 1.2);
            let a1 = rng.uniform(0.5, 3.0);
            let a2 = rng.uniform(0.5, 3.0);
            let model = HawkesModel::new(
                vec![1.0, 1.0],
                vec![
                    vec![
                        KernelSpec::Exponential { alpha: a1 },
                        KernelSpec::Exponential { alpha: a1 },
                    ],
                    vec![
                        KernelSpec::Exponential { alpha: a2 },
                        KernelSpec::Exponential { alpha: a2 },
                    ],
                ],
                vec![
                    vec![
                        JumpSpec::Constant { size: h11 * a1 },
                        JumpSpec::Constant { size: h12 * a1 },
                    ],
                    vec![
                        JumpSpec::Constant { size: h21 * a2 },
                        JumpSpec::Constant { size: h22 * a2 },
                    ],
                ],
                vec![SojournSpec::Infinite, SojournSpec::Infinite],
            )
            .unwrap();
            let inequality = (1.0 - h11) * (1.0 - h22) > h12 * h21;
            assert_eq!(
                model.is_stable().unwrap(),
                inequality,
                "h = [[{h11},{h12}],[{h21},{h22}]]"
            );
        }
    }

    #[test]
    fn config_roundtrip_and_schema_guard() {
        let model = benchmark_model();
        let text = model.to_json();
        let back = HawkesModel::from_json(&text).unwrap();
        assert_eq!(model, back);

        let bad_schema = text.replace("\"schema\": 1", "\"schema\": 9");
        match HawkesModel::from_json(&bad_schema) {
            Err(ModelError::Schema { found: 9, .. }) => {}
            other => panic!("expected schema error, got {other:?}"),
        }

        let unknown_key = text.replace("\"dimension\"", "\"dimensions_typo\"");
        assert!(HawkesModel::from_json(&unknown_key).is_err());
    }

    #[test]
    fn scaled_jumps_preserve_family_and_scale_mean() {
        for j in [
            JumpSpec::Constant { size: 0.8 },
            JumpSpec::Exponential { mean: 1.1 },
            JumpSpec::ParetoTail { c: 1.3, gamma: 1.6 },
        ] {
            let s = j.scaled(0.4);
            assert!((s.mean() - 0.4 * j.mean()).abs() < 1e-12, "{j:?}");
        }
    }
}
