//! Spectral decomposition, PSD square roots and commutators.

use collapsekit::operator::{commutator_norm, pauli_x, pauli_z, psd_sqrt, spectral_decompose, HermitianOperator};
use collapsekit::Tolerances;

fn main() -> collapsekit::Result<()> {
    let tol = Tolerances::DEFAULT;

    let d = spectral_decompose(&pauli_x(), 1e-8, &tol)?;
    println!("X: eigenvalues {:?}, ranks {:?}", d.eigenvalues(), d.ranks());
    println!("   reconstruction error {:e}", d.reconstruct().distance(&pauli_x()));

    // two eigenvalues 1e-7 apart merge under a coarse gap
    let near = HermitianOperator::diagonal(&[1.0, 1.0 + 1e-7, -1.0]);
    for gap in [1e-9, 1e-3] {
        let d = spectral_decompose(&near, gap, &tol)?;
        println!("gap {gap:e}: {} clusters, ranks {:?}", d.len(), d.ranks());
    }

    let q = HermitianOperator::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]], &tol)?;
    let root = psd_sqrt(&q, &tol)?;
    let back = HermitianOperator::symmetrized(root.matrix() * root.matrix());
    println!("sqrt of [[2,1],[1,2]] squares back within {:e}", back.distance(&q));

    println!("||[X, Z]|| = {}", commutator_norm(&pauli_x(), &pauli_z())?);
    Ok(())
}
