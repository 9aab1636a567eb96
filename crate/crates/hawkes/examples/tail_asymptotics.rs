//! Power-law tail asymptotes of the counting process from the fractional
//! renewal systems, compared against Monte Carlo tail estimates.
//!
//! ```bash
//! cargo run --example tail_asymptotics
//! ```

use hawkes::model::{HawkesModel, JumpSpec, KernelSpec, SojournSpec};
use hawkes::simulate::mc_tail;
use hawkes::tails::{linear_combination_tail, solve_renewal, tail_asymptote, tail_indices};
use hawkes::transform::Grid;
use hawkes::ProcessKind;

fn main() {
    // one direction of cross-excitation; the self-loop of component 2
    // carries an asymptotically power-law jump with index 1.8, and both
    // components inherit it
    let model = HawkesModel::new(
        vec![0.5, 1.5],
        vec![
            vec![KernelSpec::Zero, KernelSpec::Exponential { alpha: 1.5 }],
            vec![KernelSpec::Zero, KernelSpec::Exponential { alpha: 1.5 }],
        ],
        vec![
            vec![JumpSpec::Zero, JumpSpec::Constant { size: 1.0 }],
            vec![JumpSpec::Zero, JumpSpec::ParetoTail { c: 1.0, gamma: 1.8 }],
        ],
        vec![SojournSpec::Infinite, SojournSpec::Infinite],
    )
    .unwrap();

    let report = tail_indices(&model).unwrap();
    for i in 0..2 {
        println!(
            "component {}: gamma_bar = {:?}, sources = {:?}",
            i + 1,
            report.gamma_bar[i],
            report.sources[i]
        );
    }

    // the renewal solutions behind the asymptote
    let grid = Grid::new(1.0, 512);
    let sol = solve_renewal(&model, grid).unwrap();
    println!(
        "\ncluster first moments at age 1: R_12 = {:.4}, R_22 = {:.4}",
        sol.rq[grid.len() - 1][0][1],
        sol.rq[grid.len() - 1][1][1]
    );

    let asym: Vec<_> = (0..2)
        .map(|i| tail_asymptote(&model, 1.0, i, ProcessKind::N, 512).unwrap())
        .collect();
    println!(
        "asymptotes at t=1: P(N_1 > x) ~ {:.4} x^-1.8, P(N_2 > x) ~ {:.4} x^-1.8",
        asym[0].coefficient, asym[1].coefficient
    );

    let thresholds = [10.0, 30.0, 100.0, 300.0];
    let mc = mc_tail(&model, 1.0, &thresholds, 400_000, 5, 0).unwrap();
    println!("\nMonte Carlo vs asymptote (400k runs):");
    for &x in &thresholds {
        for i in 0..2 {
            let row = mc.probability(ProcessKind::N, i, x).unwrap();
            println!(
                "  P(N_{} > {x:>4}) = {:.2e}  asymptote {:.2e}  ratio {:.2}{}",
                i + 1,
                row.probability,
                asym[i].eval(x),
                row.probability / asym[i].eval(x),
                if row.unreliable { "  (thin)" } else { "" }
            );
        }
    }

    // joint tails of weighted sums need an irreducible graph
    match linear_combination_tail(&model, 1.0, &[1.0, 1.0], 512) {
        Err(e) => println!("\nlinear combination on this reducible graph: {e}"),
        Ok(_) => unreachable!(),
    }
}
