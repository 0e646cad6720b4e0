//! Probability densities, Lüders collapse and POVMs built from mixtures.

use collapsekit::measurement::{
    bloch_observable, luders_collapse, moments, povm_from_mixture, probability_density, VectorState,
};
use collapsekit::operator::HermitianOperator;
use collapsekit::Tolerances;

fn main() -> collapsekit::Result<()> {
    let tol = Tolerances::DEFAULT;
    let z = bloch_observable("Z", 0.0, 0.0, 1.0);
    let x = bloch_observable("X", 1.0, 0.0, 0.0);
    let rho = VectorState::basis(2, 0).to_state();

    println!("Z on |0>: {:?}", probability_density(&z, &rho, &tol)?);
    println!("X on |0>: {:?}", probability_density(&x, &rho, &tol)?);
    println!("moments of X: {:?}", moments(&x, &rho, 3, &tol)?);

    // collapse on X = +1, then Z is a fair coin
    let plus = x.index_of(1.0, 1e-9).expect("X has +1");
    let after = luders_collapse(&rho, &x, plus, &tol)?;
    println!("Z after X=+1: {:?}", probability_density(&z, &after, &tol)?);

    // unsharp Z: a noisy readout of the two projectors
    let qs = z.projectors().to_vec();
    let kappas = vec![vec![0.9, 0.1], vec![0.2, 0.8]];
    let mix = povm_from_mixture(vec!["lo".into(), "hi".into()], kappas, qs, &tol)?;
    println!("unsharp Z on |0>: {:?}", mix.povm().probabilities(&rho, &tol)?);
    let mixed = collapsekit::measurement::AlgebraicState::new(HermitianOperator::diagonal(&[0.25, 0.75]), &tol)?;
    println!("unsharp Z on diag(1/4,3/4): {:?}", mix.povm().probabilities(&mixed, &tol)?);
    Ok(())
}
