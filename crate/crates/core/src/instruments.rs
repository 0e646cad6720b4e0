//! Measurement instruments as system-ancilla unitaries.
//!
//! A pointer ancilla starts in `|0>` ("ready"); outcome `i` moves it to
//! `|i+1>`. The instrument unitary is `U = sum_i P_i ⊗ S_i`, with `S_i` the
//! permutation swapping `|0>` and `|i+1>`, so it is exactly unitary and acts
//! as the identity on the unused part of the ancilla. Probabilities are read
//! off the pointer basis with the Born rule.

use crate::error::{Error, Result};
use crate::measurement::{AlgebraicState, Observable, VectorState};
use crate::operator::{c, max_abs, same_dim, ComplexMatrix, ComplexVector, HermitianOperator};
use crate::table::{Axis, JointDistribution, Shape};
use crate::tolerance::Tolerances;

fn pointer_shift(dim: usize, outcome: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::identity(dim, dim);
    s.swap_columns(0, outcome + 1);
    s
}

fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    max_abs(&(u.adjoint() * u - ComplexMatrix::identity(u.ncols(), u.ncols())))
}

/// One instrument on `system ⊗ ancilla`.
#[derive(Debug, Clone)]
pub struct Instrument {
    observable: Observable,
    ancilla_dim: usize,
    unitary: ComplexMatrix,
}

impl Instrument {
    pub fn observable(&self) -> &Observable {
        &self.observable
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.unitary)
    }

    /// Largest deviation of `U(|a>⊗|0>)` from `|a>⊗|i+1>` over orthonormal
    /// eigenvectors `|a>` of every eigenspace.
    pub fn basis_action_residual(&self) -> Result<f64> {
        let d = self.ancilla_dim;
        let mut worst: f64 = 0.0;
        for (i, p) in self.observable.projectors().iter().enumerate() {
            let (values, vectors) = p.eigh()?;
            for (k, &v) in values.iter().enumerate() {
                if v < 0.5 {
                    continue;
                }
                let a = vectors.column(k).into_owned();
                let input = a.kronecker(&basis(d, 0));
                let expected = a.kronecker(&basis(d, i + 1));
                worst = worst.max(vector_max_abs(&(&self.unitary * input - expected)));
            }
        }
        Ok(worst)
    }
}

fn vector_max_abs(v: &ComplexVector) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn basis(dim: usize, k: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(dim);
    v[k] = c(1.0, 0.0);
    v
}

/// Controlled pointer shift for `a` on a `system ⊗ C^ancilla_dim` space.
pub fn build_instrument(a: &Observable, ancilla_dim: usize) -> Result<Instrument> {
    let needed = a.outcome_count() + 1;
    if ancilla_dim < needed {
        return Err(Error::AncillaTooSmall {
            needed,
            got: ancilla_dim,
        });
    }
    let n = a.dim() * ancilla_dim;
    let mut unitary = ComplexMatrix::zeros(n, n);
    for (i, p) in a.projectors().iter().enumerate() {
        unitary += p.matrix().kronecker(&pointer_shift(ancilla_dim, i));
    }
    Ok(Instrument {
        observable: a.clone(),
        ancilla_dim,
        unitary,
    })
}

/// Two instruments on `system ⊗ ancilla_A ⊗ ancilla_B`.
#[derive(Debug, Clone)]
pub struct InstrumentModel {
    a: Instrument,
    b: Instrument,
    u_a: ComplexMatrix,
    u_b: ComplexMatrix,
}

impl InstrumentModel {
    pub fn new(a: Instrument, b: Instrument) -> Result<Self> {
        same_dim(a.observable.dim(), b.observable.dim())?;
        let (da, db) = (a.ancilla_dim, b.ancilla_dim);
        let u_a = a.unitary.kronecker(&ComplexMatrix::identity(db, db));
        // U_A ⊗ 1 keeps system-ancilla_A adjacent; U_B needs ancilla_A in the middle
        let ident_a = ComplexMatrix::identity(da, da);
        let n = a.observable.dim() * da * db;
        let mut u_b = ComplexMatrix::zeros(n, n);
        for (j, q) in b.observable.projectors().iter().enumerate() {
            u_b += q.matrix().kronecker(&ident_a).kronecker(&pointer_shift(db, j));
        }
        Ok(Self { a, b, u_a, u_b })
    }

    pub fn system_dim(&self) -> usize {
        self.a.observable.dim()
    }

    pub fn ancilla_dims(&self) -> [usize; 2] {
        [self.a.ancilla_dim, self.b.ancilla_dim]
    }

    pub fn observables(&self) -> [&Observable; 2] {
        [&self.a.observable, &self.b.observable]
    }

    /// `U_A` and `U_B` on the full space.
    pub fn unitaries(&self) -> [&ComplexMatrix; 2] {
        [&self.u_a, &self.u_b]
    }

    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.u_a).max(unitarity_residual(&self.u_b))
    }

    fn ready(&self, psi: &VectorState) -> Result<ComplexVector> {
        same_dim(self.system_dim(), psi.dim())?;
        let [da, db] = self.ancilla_dims();
        Ok(psi.amplitudes().kronecker(&basis(da, 0)).kronecker(&basis(db, 0)))
    }

    /// Born weights of the pointer pair `(k_A, k_B)`, summed over the system.
    fn pointer_weights(&self, phi: &ComplexVector) -> Vec<f64> {
        let [da, db] = self.ancilla_dims();
        let mut w = vec![0.0; da * db];
        for (idx, amp) in phi.iter().enumerate() {
            w[idx % (da * db)] += amp.norm_sqr();
        }
        w
    }
}

fn axes_of(a: &Observable, b: &Observable) -> Vec<Axis> {
    vec![Axis::of(a), Axis::of(b)]
}

/// Joint pointer statistics after `U_B U_A` acts on `|psi>⊗|0>⊗|0>`.
pub fn sequential_probabilities(
    model: &InstrumentModel,
    psi: &VectorState,
    tol: &Tolerances,
) -> Result<JointDistribution> {
    let phi = &model.u_b * (&model.u_a * model.ready(psi)?);
    let w = model.pointer_weights(&phi);
    let db = model.b.ancilla_dim;
    let [a, b] = model.observables();
    let raw = Shape::new(vec![a.outcome_count(), b.outcome_count()])
        .tuples()
        .map(|t| w[(t[0] + 1) * db + t[1] + 1])
        .collect();
    JointDistribution::new(axes_of(a, b), raw, tol)
}

/// Per B-outcome `(P(b_j | A measured), P(b_j | A not measured))`.
pub fn interference_comparison(
    model: &InstrumentModel,
    psi: &VectorState,
    tol: &Tolerances,
) -> Result<Vec<(f64, f64)>> {
    let measured = sequential_probabilities(model, psi, tol)?.marginal(&[1])?;
    let phi = &model.u_b * model.ready(psi)?;
    let w = model.pointer_weights(&phi);
    let nb = model.b.observable.outcome_count();
    // A's pointer stays at |0>
    let unmeasured = (0..nb).map(|j| w[j + 1]).collect();
    let unmeasured = crate::measurement::normalize_probabilities(unmeasured, tol)?;
    Ok(measured.probabilities().iter().copied().zip(unmeasured).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualityReport {
    /// `<psi| sum_i P_i Q_j P_i |psi>` per B outcome.
    pub transformed_measurement: Vec<f64>,
    /// `Tr[Q_j sum_i P_i |psi><psi| P_i]` per B outcome.
    pub transformed_state: Vec<f64>,
    pub max_difference: f64,
}

/// Compares a Lüders-transformed measurement in the original state with the
/// original measurement in the Lüders-transformed state.
pub fn luders_duality_check(a: &Observable, b: &Observable, psi: &VectorState) -> Result<DualityReport> {
    same_dim(a.dim(), b.dim())?;
    same_dim(a.dim(), psi.dim())?;
    let rho = AlgebraicState::pure(psi);
    let dim = a.dim();
    let mut luders_rho = ComplexMatrix::zeros(dim, dim);
    for p in a.projectors() {
        luders_rho += p.matrix() * rho.density().matrix() * p.matrix();
    }
    let luders_rho = HermitianOperator::symmetrized(luders_rho);
    let mut transformed_measurement = Vec::new();
    let mut transformed_state = Vec::new();
    for q in b.projectors() {
        let mut effect = ComplexMatrix::zeros(dim, dim);
        for p in a.projectors() {
            effect += p.matrix() * q.matrix() * p.matrix();
        }
        transformed_measurement.push(psi.expect(&effect).re);
        transformed_state.push(luders_rho.trace_with(q.matrix()).re);
    }
    let max_difference = transformed_measurement
        .iter()
        .zip(&transformed_state)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok(DualityReport {
        transformed_measurement,
        transformed_state,
        max_difference,
    })
}

/// A single instrument `AB` on an enlarged system space with one basis vector
/// `|ab_t>` per outcome tuple of a two-axis target distribution.
#[derive(Debug, Clone)]
pub struct JointInstrument {
    axes: Vec<Axis>,
    ancilla_dims: [usize; 2],
    psi: ComplexVector,
    a_prime: Vec<f64>,
    b_prime: Vec<f64>,
    unitary: ComplexMatrix,
}

impl JointInstrument {
    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    /// Dimension of the enlarged system space.
    pub fn system_dim(&self) -> usize {
        self.psi.len()
    }

    pub fn ancilla_dims(&self) -> [usize; 2] {
        self.ancilla_dims
    }

    /// `|psi_AB>` in the `|ab_t>` basis.
    pub fn psi(&self) -> &ComplexVector {
        &self.psi
    }

    /// Diagonals of the commuting `A'` and `B'`.
    pub fn primed_diagonals(&self) -> [&[f64]; 2] {
        [&self.a_prime, &self.b_prime]
    }

    pub fn primed_commutator(&self) -> f64 {
        let a = HermitianOperator::diagonal(&self.a_prime);
        let b = HermitianOperator::diagonal(&self.b_prime);
        max_abs(&(a.matrix() * b.matrix() - b.matrix() * a.matrix()))
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.unitary)
    }

    /// Largest deviation of `U|ab_ij>|0>|0>` from `|ab_ij>|i+1>|j+1>`.
    pub fn basis_action_residual(&self) -> f64 {
        let [da, db] = self.ancilla_dims;
        let shape = Shape::of(&self.axes);
        shape
            .tuples()
            .enumerate()
            .map(|(t, ij)| {
                let slot = basis(self.system_dim(), t);
                let input = slot.kronecker(&basis(da, 0)).kronecker(&basis(db, 0));
                let expected = slot.kronecker(&basis(da, ij[0] + 1)).kronecker(&basis(db, ij[1] + 1));
                vector_max_abs(&(&self.unitary * input - expected))
            })
            .fold(0.0, f64::max)
    }

    /// Pointer statistics of `U_AB |psi_AB>|0>|0>`.
    pub fn pointer_probabilities(&self, tol: &Tolerances) -> Result<JointDistribution> {
        let [da, db] = self.ancilla_dims;
        let ready = self.psi.kronecker(&basis(da, 0)).kronecker(&basis(db, 0));
        let phi = &self.unitary * ready;
        let mut w = vec![0.0; da * db];
        for (idx, amp) in phi.iter().enumerate() {
            w[idx % (da * db)] += amp.norm_sqr();
        }
        let raw = Shape::of(&self.axes).tuples().map(|t| w[(t[0] + 1) * db + t[1] + 1]).collect();
        JointDistribution::new(self.axes.clone(), raw, tol)
    }
}

/// Realizes a two-axis target distribution as one instrument with real,
/// nonnegative amplitudes `sqrt(p(t))`.
pub fn build_joint_instrument(target: &JointDistribution, ancilla_dims: [usize; 2]) -> Result<JointInstrument> {
    let axes = target.axes().to_vec();
    if axes.len() != 2 {
        return Err(Error::InvalidArgument(format!(
            "joint instrument needs a two-axis distribution, got {} axes",
            axes.len()
        )));
    }
    let [na, nb] = [axes[0].len(), axes[1].len()];
    for (needed, got) in [(na + 1, ancilla_dims[0]), (nb + 1, ancilla_dims[1])] {
        if got < needed {
            return Err(Error::AncillaTooSmall { needed, got });
        }
    }
    let [da, db] = ancilla_dims;
    let shape = target.shape();
    let h = shape.count();
    let psi = ComplexVector::from_iterator(h, target.probabilities().iter().map(|&p| c(p.max(0.0).sqrt(), 0.0)));
    let a_prime = shape.tuples().map(|t| axes[0].value(t[0])).collect();
    let b_prime = shape.tuples().map(|t| axes[1].value(t[1])).collect();
    let n = h * da * db;
    let mut unitary = ComplexMatrix::zeros(n, n);
    for (t, ij) in shape.tuples().enumerate() {
        let mut slot = ComplexMatrix::zeros(h, h);
        slot[(t, t)] = c(1.0, 0.0);
        unitary += slot
            .kronecker(&pointer_shift(da, ij[0]))
            .kronecker(&pointer_shift(db, ij[1]));
    }
    Ok(JointInstrument {
        axes,
        ancilla_dims,
        psi,
        a_prime,
        b_prime,
        unitary,
    })
}
