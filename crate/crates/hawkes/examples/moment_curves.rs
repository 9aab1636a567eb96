//! Transient moment curves from the transform route, cross-checked against
//! Monte Carlo bands and the renewal-equation route.
//!
//! ```bash
//! cargo run --example moment_curves
//! ```

use hawkes::model::{HawkesModel, JumpSpec, KernelSpec, SojournSpec};
use hawkes::moments::{mean_via_renewal, moment_curve, MomentKind, MomentOptions};
use hawkes::simulate::mc_moments;

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

    let t_grid: Vec<f64> = (0..=10).map(|k| k as f64).collect();
    let opts = MomentOptions::default();
    let kinds = [
        MomentKind::MeanQ(0),
        MomentKind::VarQ(0),
        MomentKind::MeanLambda(0),
        MomentKind::CrossQQ(0, 1),
    ];
    let mc = mc_moments(&model, &t_grid, 20_000, 99, 0).unwrap();

    for kind in kinds {
        let curve = moment_curve(&model, kind, None, &t_grid, &opts).unwrap();
        println!("{}:", kind.label());
        println!("  {:>4}  {:>10}  {:>10}  {:>8}", "t", "transform", "monte carlo", "s.e.");
        for (t, est) in t_grid.iter().zip(&curve) {
            let row = mc.lookup(*t, &kind.label()).unwrap();
            println!(
                "  {t:>4}  {:>10.4}  {:>11.4}  {:>8.4}",
                est.value, row.value, row.std_error
            );
        }
    }

    // the renewal route computes the same mean through an entirely
    // different pipeline
    let renewal = mean_via_renewal(&model, 0, 5.0, 1024).unwrap();
    let transform = moment_curve(&model, MomentKind::MeanQ(0), None, &[5.0], &opts).unwrap()[0];
    println!(
        "\nE[Q_1(5)]: transform route {:.6}, renewal route {:.6}",
        transform.value, renewal
    );
}
