//! Random operators and states for property checks, examples and benchmarks.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::measurement::{AlgebraicState, Observable, VectorState};
use crate::operator::{c, ComplexMatrix, ComplexVector, HermitianOperator};
use crate::tolerance::Tolerances;

fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed unitary (QR of a complex Ginibre matrix with phase fix).
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let qr = gaussian_matrix(dim, dim, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianOperator {
    HermitianOperator::symmetrized(gaussian_matrix(dim, dim, rng))
}

/// Random PSD operator `M^H M`.
pub fn random_psd<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianOperator {
    let m = gaussian_matrix(dim, dim, rng);
    HermitianOperator::symmetrized(m.adjoint() * m)
}

/// Observable with `outcomes` distinct integer-spaced eigenvalues in a Haar
/// random eigenbasis; extra dimensions make some eigenvalues degenerate.
pub fn random_observable<R: Rng + ?Sized>(
    name: &str,
    dim: usize,
    outcomes: usize,
    rng: &mut R,
) -> Observable {
    assert!(outcomes >= 1 && outcomes <= dim);
    let u = random_unitary(dim, rng);
    // every value appears at least once
    let mut labels: Vec<usize> = (0..dim).map(|k| if k < outcomes { k } else { rng.random_range(0..outcomes) }).collect();
    for k in (1..dim).rev() {
        labels.swap(k, rng.random_range(0..=k));
    }
    let offset: f64 = rng.random_range(-2.0..2.0);
    let values: Vec<f64> = labels.iter().map(|&l| offset + l as f64).collect();
    let d = ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(dim, values.iter().map(|&v| c(v, 0.0))));
    let op = HermitianOperator::symmetrized(&u * d * u.adjoint());
    Observable::new(name, &op, 0.5, &Tolerances::DEFAULT).expect("random observable decomposes")
}

/// Random ±1-valued qubit observable `n·σ` with a uniformly random axis.
pub fn random_qubit_sign_observable<R: Rng + ?Sized>(name: &str, rng: &mut R) -> Observable {
    let v: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    crate::measurement::bloch_observable(name, v[0] / norm, v[1] / norm, v[2] / norm)
}

pub fn random_vector_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> VectorState {
    let v = gaussian_matrix(dim, 1, rng).column(0).into_owned();
    VectorState::normalized(v).expect("gaussian vector is nonzero")
}

/// Mixed state `M M^H / Tr` from a Ginibre matrix.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> AlgebraicState {
    let q = random_psd(dim, rng);
    let t = q.trace();
    AlgebraicState::new(q.scale(1.0 / t), &Tolerances::DEFAULT).expect("normalized PSD density")
}
