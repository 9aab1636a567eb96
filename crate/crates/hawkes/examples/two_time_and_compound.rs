//! Joint generating function of the population at two time points, and the
//! transform of a compound process that accumulates a claim per arrival.
//!
//! ```bash
//! cargo run --example two_time_and_compound
//! ```

use hawkes::model::{HawkesModel, JumpSpec, KernelSpec, SojournSpec};
use hawkes::transform::{compound_lst, pgf_q, two_time_pgf, FixedPointOptions};
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
    let one = Complex64::new(1.0, 0.0);

    // E[y^{Q(t)} z^{Q(t+tau)}] with scalar arguments on component 1
    let y = [Complex64::new(0.7, 0.0), one];
    let z = [Complex64::new(0.8, 0.0), one];
    for tau in [0.5, 1.0, 2.0] {
        let v = two_time_pgf(&model, 2.0, tau, &y, &z, 512, &opts).unwrap();
        println!("two-time pgf at (t, tau) = (2, {tau}): {:.6}", v.re);
    }
    // setting y = 1 marginalizes onto the later time
    let marginal = two_time_pgf(&model, 2.0, 1.0, &[one, one], &z, 512, &opts).unwrap();
    let direct = pgf_q(&model, 3.0, &z, 512, &opts).unwrap();
    println!(
        "marginalization check: {:.6} vs pgf at t=3: {:.6}",
        marginal.re, direct.re
    );

    // compound process: exponential claims of mean 1 per arrival in each
    // component; its LST is the counting pgf at the claim transforms
    let claim: &dyn Fn(f64) -> f64 = &|s: f64| 1.0 / (1.0 + s);
    let claims = [claim, claim];
    for s in [0.25, 1.0, 4.0] {
        let v = compound_lst(&model, 2.0, &[s, s], &claims, 512, &opts).unwrap();
        println!("compound LST at s = ({s}, {s}): {v:.6}");
    }
}
