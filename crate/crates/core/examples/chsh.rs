//! CHSH for the singlet: the value, the exact infeasibility of a global joint
//! distribution, and a state on a noncommutative algebra that reproduces two
//! of the contexts.

use collapsekit::collapse::collapse_effect_pair;
use collapsekit::incompatibility::{
    admits_global_joint, chsh_marginal_problem, chsh_report, local_observable, noncommutative_unifying_state,
    Feasibility, Side, UnifyingOptions, UnifyingOutcome,
};
use collapsekit::measurement::{bloch_observable, Observable, VectorState};
use collapsekit::operator::{c, ComplexVector};
use collapsekit::table::joint_distribution;
use collapsekit::Tolerances;
use num::ToPrimitive;

fn polarizer(name: &str, degrees: f64, side: Side) -> Observable {
    let t = 2.0 * degrees.to_radians();
    local_observable(&bloch_observable(name, t.sin(), 0.0, t.cos()), 2, side)
}

fn main() -> collapsekit::Result<()> {
    let tol = Tolerances::DEFAULT;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let singlet = VectorState::new(
        ComplexVector::from_vec(vec![c(0.0, 0.0), c(h, 0.0), c(-h, 0.0), c(0.0, 0.0)]),
        &tol,
    )?
    .to_state();
    let a1 = polarizer("A1", 45.0, Side::Left);
    let a2 = polarizer("A2", 0.0, Side::Left);
    let b1 = polarizer("B1", 22.5, Side::Right);
    let b2 = polarizer("B2", 67.5, Side::Right);

    let report = chsh_report(&singlet, [&a1, &a2], [&b1, &b2], &tol)?;
    println!("correlators {:?}", report.correlators);
    println!("|S| = {:.6} (2 sqrt 2 = {:.6})", report.value.abs(), 2.0 * 2f64.sqrt());

    match admits_global_joint(&chsh_marginal_problem(&report, &tol)?)? {
        Feasibility::Feasible { .. } => println!("a global joint distribution exists"),
        Feasibility::Infeasible { certificate, violation } => {
            println!("no global joint: {} certificate terms, violation {:.6}", certificate.len(), violation.to_f64().unwrap_or(f64::NAN))
        }
    }

    let pair = |x: &Observable, y: &Observable| joint_distribution(&collapse_effect_pair(x, y, &tol)?, &singlet, &tol);
    let (p1, p2) = (pair(&a1, &b1)?, pair(&a1, &b2)?);
    match noncommutative_unifying_state(&p1, &p2, &a1, &b1, &b2, UnifyingOptions::default(), &tol)? {
        UnifyingOutcome::Found { residual, iterations, .. } => {
            println!("unifying state found after {iterations} iterations (residual {residual:e})")
        }
        UnifyingOutcome::Inconclusive { residual, .. } => println!("inconclusive, residual {residual:e}"),
    }
    Ok(())
}
