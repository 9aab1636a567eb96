//! Dual-route validation of the renewal solvers on the bivariate tail
//! benchmark: the causal time-domain stepper against closed forms and
//! against the Laplace-domain linear solve inverted by Gaver–Stehfest.
//!
//! For the exponential benchmark everything is available in closed form:
//! with mean jump 1.25 and decay rate 1.5 (no departures),
//!
//! ```text
//! R_22(u) = 6 - 5 e^{-u/4}
//! R_12(u) = 4 (1 - e^{-u/4})
//! (g_22 * R_22)(u) = 4 (1 - e^{-u/4})
//! (g_22 * R_12)(u) = (8/3)(1 - e^{-1.5 u}) - 3.2 (e^{-u/4} - e^{-1.5 u})
//! ```
//!
//! and the fractional solutions solve scalar renewal equations whose
//! Laplace transforms follow from the closed-form forcings.

mod common;

use hawkes::numeric;
use num_complex::Complex64;
use hawkes::tails;
use hawkes::transform::Grid;
use hawkes::ProcessKind;

const GAMMA: f64 = 1.8;
const MEAN_B22: f64 = 1.25;

fn r22_exact(u: f64) -> f64 {
    6.0 - 5.0 * (-0.25 * u).exp()
}

fn r12_exact(u: f64) -> f64 {
    4.0 * (1.0 - (-0.25 * u).exp())
}

fn conv22_exact(u: f64) -> f64 {
    4.0 * (1.0 - (-0.25 * u).exp())
}

fn conv12_exact(u: f64) -> f64 {
    (8.0 / 3.0) * (1.0 - (-1.5 * u).exp()) - 3.2 * ((-0.25 * u).exp() - (-1.5 * u).exp())
}

#[test]
fn linear_solutions_match_closed_forms() {
    let model = common::tail_exponential();
    let grid = Grid::new(3.0, 1024);
    let sol = tails::solve_renewal(&model, grid).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..grid.len() {
        let u = grid.point(k);
        worst = worst.max((sol.rq[k][1][1] - r22_exact(u)).abs());
        worst = worst.max((sol.rq[k][0][1] - r12_exact(u)).abs());
        // no path from source 1 to component 2; and the lone component-1
        // "cluster" is only its root
        assert_eq!(sol.rq[k][1][0], 0.0);
        assert!((sol.rq[k][0][0] - 1.0).abs() < 1e-12);
    }
    assert!(worst < 2e-5, "sup error {worst}");
}

#[test]
fn fractional_solutions_match_laplace_route() {
    let model = common::tail_exponential();
    let report = tails::tail_indices(&model).unwrap();
    assert_eq!(report.gamma_bar[0], Some(GAMMA));
    assert_eq!(report.gamma_bar[1], Some(GAMMA));
    assert_eq!(report.sources[0], vec![1]);
    assert_eq!(report.sources[1], vec![1]);

    let grid = Grid::new(1.5, 768);
    let base = tails::solve_renewal(&model, grid).unwrap();
    let full = tails::solve_renewal_fractional(&model, &base, &report).unwrap();
    let frac = full.rq_frac.as_ref().unwrap();

    // Laplace route: L{Rbar_i2}(s) = L{forcing_i}(s) / (1 - E[B] L{g}(s)),
    // with the closed-form forcings transformed by composite quadrature in
    // the convergence half-plane (panel count tied to the oscillation
    // frequency) and inverted by the damped-Fourier rule; the
    // fractional-power boundary layer at zero defeats Gaver-Stehfest
    let laplace_forcing = |s: Complex64, conv: &dyn Fn(f64) -> f64| -> Complex64 {
        let horizon = 45.0 / s.re;
        let periods = horizon * s.im.abs() / (2.0 * std::f64::consts::PI);
        let panels = 2 * (200 + (8.0 * periods) as usize);
        let h = horizon / panels as f64;
        let f = |u: f64| (-s * u).exp() * conv(u).powf(GAMMA);
        let mut acc = f(0.0) + f(horizon);
        for p in 1..panels {
            let w = if p % 2 == 1 { 4.0 } else { 2.0 };
            acc += f(p as f64 * h) * w;
        }
        acc * (h / 3.0)
    };
    let mut worst: f64 = 0.0;
    for k in (0..grid.len()).step_by(32) {
        let u = grid.point(k);
        if u == 0.0 {
            assert_eq!(frac[0][0][1], 0.0);
            assert_eq!(frac[0][1][1], 0.0);
            continue;
        }
        let by_laplace = |conv: &dyn Fn(f64) -> f64| -> f64 {
            numeric::euler_laplace_inversion(
                |s| {
                    let denom = 1.0 - MEAN_B22 / (s + 1.5);
                    laplace_forcing(s, conv) / denom
                },
                u,
                40,
                12,
            )
        };
        let lap22 = by_laplace(&conv22_exact);
        let lap12 = by_laplace(&conv12_exact);
        worst = worst.max((frac[k][1][1] - lap22).abs());
        worst = worst.max((frac[k][0][1] - lap12).abs());
    }
    assert!(worst < 1e-4, "sup difference {worst}");
}

#[test]
fn linear_laplace_route_covers_the_power_law_benchmark() {
    let model = common::tail_power_law();
    let grid = Grid::new(1.0, 256);
    let time_domain = tails::solve_renewal(&model, grid).unwrap();
    let laplace = tails::solve_renewal_laplace(&model, grid, ProcessKind::Q, 16).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..grid.len() {
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((time_domain.rq[k][i][j] - laplace[k][i][j]).abs());
            }
        }
    }
    assert!(worst < 1e-4, "sup difference {worst}");
}

#[test]
fn fractional_grid_refinement_is_second_order() {
    let model = common::tail_exponential();
    let report = tails::tail_indices(&model).unwrap();
    let end_value = |steps: usize| {
        let grid = Grid::new(1.0, steps);
        let base = tails::solve_renewal(&model, grid).unwrap();
        let full = tails::solve_renewal_fractional(&model, &base, &report).unwrap();
        full.rq_frac.as_ref().unwrap()[grid.len() - 1][1][1]
    };
    let coarse = end_value(64);
    let medium = end_value(128);
    let fine = end_value(256);
    let ratio = (coarse - medium).abs() / (medium - fine).abs();
    assert!((ratio - 4.0).abs() < 1.2, "refinement ratio {ratio}");
}
