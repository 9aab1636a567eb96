//! Benchmark models and a random stable-model generator shared by the
//! integration suites.
#![allow(dead_code)]

use hawkes::model::{HawkesModel, JumpSpec, KernelSpec, SojournSpec};
use hawkes::rng::Stream;

/// Bivariate exponential-decay benchmark: constant jumps, exponential
/// sojourns with rate 2, spectral radius 0.767.
pub fn exp_benchmark() -> HawkesModel {
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

/// Bivariate power-law benchmark with slower memory decay.
pub fn power_law_bivariate() -> HawkesModel {
    HawkesModel::new(
        vec![1.0, 1.0],
        vec![
            vec![
                KernelSpec::PowerLaw { c: 1.5, p: 2.5 },
                KernelSpec::PowerLaw { c: 1.5, p: 2.5 },
            ],
            vec![
                KernelSpec::PowerLaw { c: 2.0, p: 3.0 },
                KernelSpec::PowerLaw { c: 2.0, p: 3.0 },
            ],
        ],
        vec![
            vec![JumpSpec::Constant { size: 1.5 }, JumpSpec::Constant { size: 0.5 }],
            vec![JumpSpec::Constant { size: 1.0 }, JumpSpec::Constant { size: 0.5 }],
        ],
        vec![
            SojournSpec::Exponential { rate: 1.5 },
            SojournSpec::Exponential { rate: 1.5 },
        ],
    )
    .unwrap()
}

/// Bivariate tail benchmark, exponential decay: one cross-excitation
/// direction, one heavy-tailed self-loop with index 1.8.
pub fn tail_exponential() -> HawkesModel {
    HawkesModel::new(
        vec![0.5, 1.5],
        vec![
            vec![
                KernelSpec::Zero,
                KernelSpec::Exponential { alpha: 1.5 },
            ],
            vec![
                KernelSpec::Zero,
                KernelSpec::Exponential { alpha: 1.5 },
            ],
        ],
        vec![
            vec![JumpSpec::Zero, JumpSpec::Constant { size: 1.0 }],
            vec![JumpSpec::Zero, JumpSpec::ParetoTail { c: 1.0, gamma: 1.8 }],
        ],
        vec![SojournSpec::Infinite, SojournSpec::Infinite],
    )
    .unwrap()
}

/// Power-law decay counterpart of [`tail_exponential`].
pub fn tail_power_law() -> HawkesModel {
    HawkesModel::new(
        vec![0.5, 1.5],
        vec![
            vec![KernelSpec::Zero, KernelSpec::PowerLaw { c: 1.0, p: 2.5 }],
            vec![KernelSpec::Zero, KernelSpec::PowerLaw { c: 1.0, p: 3.5 }],
        ],
        vec![
            vec![JumpSpec::Zero, JumpSpec::Constant { size: 1.0 }],
            vec![JumpSpec::Zero, JumpSpec::ParetoTail { c: 1.0, gamma: 1.8 }],
        ],
        vec![SojournSpec::Infinite, SojournSpec::Infinite],
    )
    .unwrap()
}

pub struct RandomModelSettings {
    pub max_dimension: usize,
    pub heavy_jumps: bool,
    pub deterministic_sojourns: bool,
}

impl Default for RandomModelSettings {
    fn default() -> Self {
        RandomModelSettings {
            max_dimension: 3,
            heavy_jumps: false,
            deterministic_sojourns: false,
        }
    }
}

/// Random admissible model rescaled onto a spectral radius in (0.3, 0.85).
pub fn random_stable_model(rng: &mut Stream, settings: &RandomModelSettings) -> HawkesModel {
    let d = 1 + (rng.next_u64() as usize) % settings.max_dimension;
    let mut kernels = vec![vec![KernelSpec::Zero; d]; d];
    let mut jumps = vec![vec![JumpSpec::Zero; d]; d];
    for i in 0..d {
        for j in 0..d {
            if rng.next_f64() < 0.65 {
                kernels[i][j] = if rng.next_f64() < 0.6 {
                    KernelSpec::Exponential {
                        alpha: rng.uniform(0.8, 3.0),
                    }
                } else {
                    KernelSpec::PowerLaw {
                        c: rng.uniform(0.8, 2.0),
                        p: rng.uniform(1.8, 3.2),
                    }
                };
                let pick = rng.next_f64();
                jumps[i][j] = if settings.heavy_jumps && pick < 0.5 {
                    JumpSpec::ParetoTail {
                        c: rng.uniform(0.5, 2.0),
                        gamma: rng.uniform(1.15, 1.9),
                    }
                } else if pick < 0.75 {
                    JumpSpec::Constant {
                        size: rng.uniform(0.2, 1.0),
                    }
                } else {
                    JumpSpec::Exponential {
                        mean: rng.uniform(0.2, 1.0),
                    }
                };
            }
        }
    }
    let sojourns = (0..d)
        .map(|_| {
            let pick = rng.next_f64();
            if settings.deterministic_sojourns && pick < 0.25 {
                SojournSpec::Deterministic {
                    tau: rng.uniform(0.3, 2.0),
                }
            } else if pick < 0.6 {
                SojournSpec::Exponential {
                    rate: rng.uniform(0.5, 3.0),
                }
            } else {
                SojournSpec::Infinite
            }
        })
        .collect();
    let lambda_inf = (0..d).map(|_| rng.uniform(0.2, 1.0)).collect();
    let mut model = HawkesModel::new(lambda_inf, kernels, jumps, sojourns).unwrap();

    let rho = model.branching_matrix().unwrap().spectral_radius;
    if rho > 0.0 {
        let target = rng.uniform(0.3, 0.85);
        let scale = target / rho;
        for row in model.jumps.iter_mut() {
            for jump in row.iter_mut() {
                *jump = jump.scaled(scale);
            }
        }
    }
    model
}
