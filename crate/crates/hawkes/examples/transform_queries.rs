//! Evaluate the joint transform of the population and intensity vectors
//! through the fixed-point iteration over cluster transforms.
//!
//! ```bash
//! cargo run --example transform_queries
//! ```

use hawkes::model::{HawkesModel, JumpSpec, KernelSpec, SojournSpec};
use hawkes::transform::{
    fixed_point, joint_n_lambda, lst_lambda, pgf_q, FixedPointOptions, Grid, TransformQuery,
};
use num_complex::Complex64;

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
    let opts = FixedPointOptions::default();

    // full query: E[z1^{Q1} z2^{Q2} e^{-s1 l1 - s2 l2}] at t = 2
    let query = TransformQuery {
        t: 2.0,
        s: vec![0.3, 0.1],
        z: vec![Complex64::new(0.8, 0.0), Complex64::new(0.9, 0.0)],
    };
    let grid = Grid::new(2.0, 512);
    let field = fixed_point(&model, query, grid, &opts).unwrap();
    println!(
        "joint transform at t=2: {:.6} ({} iterations, residual {:.2e})",
        field.joint_value(&model, 2.0).re,
        field.iterations,
        field.residual
    );
    println!(
        "residual trace head: {:?}",
        &field.residual_trace[..6.min(field.residual_trace.len())]
    );

    // specializations
    let z = [Complex64::new(0.5, 0.0), Complex64::new(1.0, 0.0)];
    println!(
        "pgf of Q at z=(0.5, 1):      {:.6}",
        pgf_q(&model, 2.0, &z, 512, &opts).unwrap().re
    );
    println!(
        "LST of lambda at s=(0.5, 0): {:.6}",
        lst_lambda(&model, 2.0, &[0.5, 0.0], 512, &opts).unwrap()
    );
    let n = joint_n_lambda(&model, 2.0, &[0.0, 0.0], &z, 512, &opts).unwrap();
    println!("pgf of N at z=(0.5, 1):      {:.6} (departures cannot matter)", n.re);

    // the cluster transforms themselves are available on the age grid
    println!("\ncluster transform G_1(u) along the grid:");
    for k in [0, 128, 256, 384, 512] {
        println!("  u = {:>5.2}: {:.6}", grid.point(k), field.value(k, 0).re);
    }
}
