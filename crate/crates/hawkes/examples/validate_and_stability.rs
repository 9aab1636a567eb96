//! Declare a bivariate model, validate it, and inspect its stability:
//! branching matrix, spectral radius, and stationary intensity.
//!
//! ```bash
//! cargo run --example validate_and_stability
//! ```

use hawkes::model::{HawkesModel, JumpSpec, KernelSpec, SojournSpec};

fn main() {
    // two mutually exciting components with exponential decay, constant
    // intensity jumps, and exponential sojourn times
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

    println!("validation: {}", model.validate());

    let bm = model.branching_matrix().unwrap();
    println!("branching matrix (E[B_ij] * ||g_ij||):");
    for row in &bm.entries {
        println!("  {row:.4?}");
    }
    println!("spectral radius: {:.4}", bm.spectral_radius);
    println!("stable: {}", bm.spectral_radius < 1.0);

    let stationary = model.stationary_intensity().unwrap();
    println!("stationary intensity: {stationary:.4?}");

    // the same model as a config file, the format the CLI consumes
    println!("\nconfig file representation:\n{}", model.to_json());

    // a jump scaled past criticality flips the stability verdict
    let mut unstable = model.clone();
    unstable.jumps[0][0] = JumpSpec::Constant { size: 3.0 };
    let rho = unstable.branching_matrix().unwrap().spectral_radius;
    println!("after raising B_11 to 3.0: spectral radius {rho:.4}, stable: {}", rho < 1.0);
}
