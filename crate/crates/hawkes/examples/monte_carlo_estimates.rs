//! Monte Carlo estimator tables: transient moments with standard errors and
//! tail probabilities with Wilson intervals, from independent replications.
//!
//! ```bash
//! cargo run --example monte_carlo_estimates
//! ```

use hawkes::model::{HawkesModel, JumpSpec, KernelSpec, SojournSpec};
use hawkes::simulate::{mc_moments, mc_tail};
use hawkes::ProcessKind;

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

    let t_grid = [0.0, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0];
    let table = mc_moments(&model, &t_grid, 20_000, 7, 0).unwrap();
    println!("population mean and variance of component 1 ({} runs):", table.runs);
    println!("  {:>5}  {:>9}  {:>9}", "t", "mean_q_1", "var_q_1");
    for &t in &t_grid {
        let mean = table.lookup(t, "mean_q_1").unwrap();
        let var = table.lookup(t, "var_q_1").unwrap();
        println!("  {t:>5}  {:>9.4}  {:>9.4}", mean.value, var.value);
    }
    let lam = table.lookup(10.0, "mean_lambda_1").unwrap();
    println!(
        "mean intensity at t=10: {:.4} +- {:.4} (stationary value {:.4})",
        lam.value,
        lam.std_error,
        model.stationary_intensity().unwrap()[0]
    );

    let tail = mc_tail(&model, 5.0, &[2.0, 4.0, 8.0, 12.0], 20_000, 11, 0).unwrap();
    println!("\ntail of Q_1(5) with 95% Wilson intervals:");
    for &x in &[2.0, 4.0, 8.0, 12.0] {
        let row = tail.probability(ProcessKind::Q, 0, x).unwrap();
        println!(
            "  P(Q_1 > {x:>4}) = {:.5}  [{:.5}, {:.5}]{}",
            row.probability,
            row.ci_lo,
            row.ci_hi,
            if row.unreliable { "  (fewer than 10 exceedances)" } else { "" }
        );
    }
}
