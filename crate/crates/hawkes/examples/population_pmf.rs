//! Recover the distribution of a population coordinate by evaluating its
//! generating function on the unit circle and inverting.
//!
//! ```bash
//! cargo run --example population_pmf
//! ```

use hawkes::model::{HawkesModel, JumpSpec, KernelSpec, SojournSpec};
use hawkes::transform::{pmf_q, FixedPointOptions};

fn main() {
    let model = HawkesModel::new(
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
    .unwrap();

    let pmf = pmf_q(&model, 2.0, 0, 30, 512, &FixedPointOptions::default(), 0).unwrap();
    println!("P(Q_1(2) = k):");
    for (k, p) in pmf.probs.iter().take(12).enumerate() {
        let bar = "#".repeat((p * 120.0).round() as usize);
        println!("  {k:>2}: {p:.6} {bar}");
    }
    let total: f64 = pmf.probs.iter().sum();
    println!("mass captured below k=30: {total:.9}");
    println!("estimated mass beyond:    {:.3e}", pmf.tail_estimate);
    println!("renormalization error:    {:.3e}", pmf.renormalization_error);
    if pmf.aliasing_warning {
        println!("warning: raise max_k, the tail is aliasing");
    }
}
