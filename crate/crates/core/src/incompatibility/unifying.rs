//! Search for one density operator reproducing two context distributions on a
//! noncommutative algebra, by alternating projections between the PSD cone
//! and the affine set `{Tr[rho M_k] = p_k, Tr rho = 1}`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::measurement::{AlgebraicState, Observable};
use crate::operator::{c, max_abs, same_dim, ComplexMatrix, HermitianOperator};
use crate::table::JointDistribution;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnifyingOptions {
    pub max_iterations: usize,
    /// Largest constraint residual accepted for a solution.
    pub tolerance: f64,
}

impl Default for UnifyingOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100_000,
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum UnifyingOutcome {
    Found {
        state: AlgebraicState,
        residual: f64,
        iterations: usize,
    },
    /// Budget exhausted or iterates stalled; not a proof of infeasibility.
    Inconclusive { residual: f64, iterations: usize },
}

/// Real inner product `Re Tr[X^H Y]`.
fn inner(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    x.iter().zip(y.iter()).map(|(a, b)| (a.conj() * b).re).sum()
}

/// Constraint operators: Hermitian parts of `P_x Q_u`, then the identity.
fn constraints(
    p_xa: &JointDistribution,
    p_xb: &JointDistribution,
    x: &Observable,
    a: &Observable,
    b: &Observable,
) -> Result<(Vec<ComplexMatrix>, Vec<f64>)> {
    let mut ops = Vec::new();
    let mut targets = Vec::new();
    for (dist, other) in [(p_xa, a), (p_xb, b)] {
        let sizes = dist.shape().sizes().to_vec();
        if sizes != [x.outcome_count(), other.outcome_count()] {
            return Err(Error::InvalidArgument(format!(
                "table of shape {sizes:?} for observables {} and {}",
                x.name(),
                other.name()
            )));
        }
        for (t, p) in dist.iter() {
            let m = x.projectors()[t[0]].matrix() * other.projectors()[t[1]].matrix();
            ops.push((&m + m.adjoint()).scale(0.5));
            targets.push(p);
        }
    }
    let dim = x.dim();
    ops.push(ComplexMatrix::identity(dim, dim));
    targets.push(1.0);
    Ok((ops, targets))
}

fn psd_projection(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (values, vectors) = HermitianOperator::symmetrized(m.clone()).eigh()?;
    let clipped = DVector::from_iterator(values.len(), values.iter().map(|&v| c(v.max(0.0), 0.0)));
    Ok(&vectors * ComplexMatrix::from_diagonal(&clipped) * vectors.adjoint())
}

/// Looks for `rho >= 0` with `Tr[rho P_x Q_u] = p_XA(x,u)` and
/// `Tr[rho P_x R_v] = p_XB(x,v)`.
pub fn noncommutative_unifying_state(
    p_xa: &JointDistribution,
    p_xb: &JointDistribution,
    x: &Observable,
    a: &Observable,
    b: &Observable,
    options: UnifyingOptions,
    tol: &Tolerances,
) -> Result<UnifyingOutcome> {
    same_dim(x.dim(), a.dim())?;
    same_dim(x.dim(), b.dim())?;
    let (ops, targets) = constraints(p_xa, p_xb, x, a, b)?;
    let k = ops.len();
    let gram = DMatrix::from_fn(k, k, |i, j| inner(&ops[i], &ops[j]));
    let gram_pinv = gram
        .pseudo_inverse(1e-12)
        .map_err(|_| Error::EigenFailure)?;
    let residual_of = |rho: &ComplexMatrix| {
        ops.iter()
            .zip(&targets)
            .map(|(m, p)| (inner(m, rho) - p).abs())
            .fold(0.0, f64::max)
    };

    let dim = x.dim();
    let mut rho = ComplexMatrix::identity(dim, dim).scale(1.0 / dim as f64);
    let mut residual = residual_of(&rho);
    for iteration in 1..=options.max_iterations {
        let gap = DVector::from_iterator(k, ops.iter().zip(&targets).map(|(m, p)| inner(m, &rho) - p));
        let coeffs = &gram_pinv * gap;
        let mut affine = rho.clone();
        for (m, w) in ops.iter().zip(coeffs.iter()) {
            affine -= m.scale(*w);
        }
        let next = psd_projection(&affine)?;
        let step = max_abs(&(&next - &rho));
        rho = next;
        residual = residual_of(&rho);
        if residual <= options.tolerance {
            let trace = rho.trace().re;
            let state = AlgebraicState::new(HermitianOperator::symmetrized(rho.scale(1.0 / trace)), tol)?;
            return Ok(UnifyingOutcome::Found {
                state,
                residual,
                iterations: iteration,
            });
        }
        if step < 1e-15 {
            return Ok(UnifyingOutcome::Inconclusive {
                residual,
                iterations: iteration,
            });
        }
    }
    Ok(UnifyingOutcome::Inconclusive {
        residual,
        iterations: options.max_iterations,
    })
}
