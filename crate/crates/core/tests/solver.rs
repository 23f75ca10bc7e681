use std::sync::Arc;

use hilfer_core::cli::example_problem;
use hilfer_core::error::Error;
use hilfer_core::expr::parse_str;
use hilfer_core::operators::{integral_residual, iterate_residual, SampledFunction};
use hilfer_core::picard::{
    phi0, picard_step, solve, solver_rule, KnownConstants, Problem, ProblemParams, SolveConfig,
};
use hilfer_core::quadrature::{InterpOrder, Mesh, PowerInterpolant};
use hilfer_core::special::{gamma, mittag_leffler2};

fn reduced_m() -> KnownConstants {
    KnownConstants {
        m: Some(1.0 + 11f64.powf(4.0 / 3.0)),
        a: None,
    }
}

fn linear() -> Problem {
    Problem::new(
        ProblemParams {
            a: 0.0,
            alpha: 0.5,
            beta: 0.5,
            x0: 1.0,
            h: 0.5,
            b: 50.0,
            k: -0.25,
        },
        parse_str("x").unwrap(),
    )
    .unwrap()
}

const LINEAR_EXACT: KnownConstants = KnownConstants {
    m: Some(51.0),
    a: Some(1.0),
};

#[test]
fn one_more_step_is_a_fixed_point() {
    let p = example_problem();
    let cfg = SolveConfig {
        n: 128,
        quad_nodes: 32,
        ..SolveConfig::default()
    };
    let sol = solve(&p, reduced_m(), &cfg).unwrap();
    let rule = solver_rule(&p, cfg.quad_nodes).unwrap();
    let again = picard_step(&p, &sol.iterate(), &rule).unwrap();
    let change = again.sup_diff(&sol.iterate());
    assert!(change <= 2.0 * cfg.tol, "{change}");
}

#[test]
fn initial_value_is_exact_in_every_iterate() {
    let p = example_problem();
    let rule = solver_rule(&p, 16).unwrap();
    let mut it = phi0(&p, Arc::new(Mesh::new(0.0, 0.02, 32, 2.0).unwrap()));
    for _ in 0..6 {
        it = picard_step(&p, &it, &rule).unwrap();
        assert_eq!(it.y[0], 3.0);
    }
    let sol = solve(&p, reduced_m(), &SolveConfig::default()).unwrap();
    assert_eq!(sol.y[0], 3.0);
    // x itself is singular at t = a
    assert_eq!(sol.x[0], f64::INFINITY);
}

#[test]
fn linear_residual_small_and_matches_oracle() {
    let p = linear();
    let cfg = SolveConfig {
        tol: 1e-8,
        ..SolveConfig::default()
    };
    let sol = solve(&p, LINEAR_EXACT, &cfg).unwrap();
    assert!(sol.residual_sup <= 1e-6, "{}", sol.residual_sup);
    let g = gamma(0.75).unwrap();
    let t = sol.mesh.end();
    let want = g * mittag_leffler2(0.5, 0.75, t.sqrt(), 1e-17).unwrap();
    assert!((sol.y.last().unwrap() - want).abs() < 1e-6);
}

#[test]
fn unconverged_iterate_has_larger_residual() {
    let p = example_problem();
    let sol = solve(&p, reduced_m(), &SolveConfig::default()).unwrap();
    let check = solver_rule(&p, 128).unwrap();
    let one_step = picard_step(
        &p,
        &phi0(&p, Arc::clone(&sol.mesh)),
        &solver_rule(&p, 64).unwrap(),
    )
    .unwrap();
    let r1 = iterate_residual(&p, &one_step, &check, InterpOrder::Cubic).unwrap();
    let r = integral_residual(&p, &sol, &check).unwrap();
    assert!(r1 > r, "{r1} <= {r}");
    assert_eq!(r, sol.residual_sup);
}

#[test]
fn residual_requires_finer_rule() {
    let p = linear();
    let cfg = SolveConfig {
        n: 16,
        quad_nodes: 16,
        ..SolveConfig::default()
    };
    let sol = solve(&p, LINEAR_EXACT, &cfg).unwrap();
    let same = solver_rule(&p, 16).unwrap();
    assert!(matches!(
        integral_residual(&p, &sol, &same),
        Err(Error::InvalidNumerics(_))
    ));
}

#[test]
fn refinement_changes_shrink() {
    // successive differences under doubling of N and Q, measured on the coarse mesh
    let p = linear();
    let run = |n: usize, q: usize| {
        let cfg = SolveConfig {
            n,
            quad_nodes: q,
            interp: InterpOrder::Linear,
            ..SolveConfig::default()
        };
        solve(&p, LINEAR_EXACT, &cfg).unwrap()
    };
    let sols = [run(16, 8), run(32, 16), run(64, 32)];
    let coarse = &sols[0];
    let at = |s: &hilfer_core::picard::Solution, t: f64| {
        PowerInterpolant::new(&s.mesh, p.interp_power(), s.config.interp)
            .unwrap()
            .eval(&s.y, t)
    };
    let diff = |i: usize| {
        coarse
            .mesh
            .points()
            .iter()
            .map(|&t| (at(&sols[i], t) - at(&sols[i + 1], t)).abs())
            .fold(0.0, f64::max)
    };
    assert!(diff(1) < diff(0), "{} >= {}", diff(1), diff(0));
}

#[test]
fn threads_do_not_change_results() {
    let p = example_problem();
    let base = SolveConfig {
        n: 64,
        quad_nodes: 16,
        ..SolveConfig::default()
    };
    let seq = solve(&p, reduced_m(), &base).unwrap();
    let par = solve(&p, reduced_m(), &SolveConfig { threads: 4, ..base }).unwrap();
    assert_eq!(seq.y, par.y);
    assert_eq!(seq.report.iterations(), par.report.iterations());
}

#[test]
fn sampled_solution_evaluates_x() {
    let p = linear();
    let sol = solve(&p, LINEAR_EXACT, &SolveConfig::default()).unwrap();
    let f = SampledFunction::from_solution(&sol).unwrap();
    let j = 100;
    let t = sol.mesh.points()[j];
    assert!((f.eval(t).unwrap() - sol.x[j]).abs() <= 1e-12 * sol.x[j].abs());
    assert_eq!(f.exponent(), -0.25);
}

#[test]
fn estimated_constants_are_recorded() {
    let p = example_problem();
    let cfg = SolveConfig {
        n: 32,
        quad_nodes: 16,
        ..SolveConfig::default()
    };
    let sol = solve(&p, KnownConstants::default(), &cfg).unwrap();
    // sampling over (0, h] finds the full-dependence bound, attained at t = h, x = 11
    let full = 1.0 + 10f64.powf(2.0 / 3.0) * 11f64.powf(4.0 / 3.0);
    assert!((sol.hypotheses.m / full - 1.0).abs() < 1e-12);
    assert!(sol.l_used < 1e-3);
    assert!(sol.converged);
}
