//! CHSH correlations on a bipartite space.

use crate::collapse::collapse_effect_pair;
use crate::error::{Error, Result};
use crate::measurement::{AlgebraicState, Observable};
use crate::operator::{commutator_norm, kron, same_dim, HermitianOperator, SpectralDecomposition};
use crate::table::{Axis, JointDistribution};
use crate::tolerance::Tolerances;

use super::{Context, MarginalProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// First tensor factor: `A ⊗ 1`.
    Left,
    /// Second tensor factor: `1 ⊗ B`.
    Right,
}

/// Embeds a local observable into `H_1 ⊗ H_2`, where the other factor has
/// dimension `other_dim`.
pub fn local_observable(a: &Observable, other_dim: usize, side: Side) -> Observable {
    let ident = HermitianOperator::identity(other_dim);
    let projectors = a
        .projectors()
        .iter()
        .map(|p| match side {
            Side::Left => kron(p, &ident),
            Side::Right => kron(&ident, p),
        })
        .collect();
    Observable::from_decomposition(
        a.name(),
        SpectralDecomposition::from_parts_exact(a.sample_space().to_vec(), projectors),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChshReport {
    /// `E(A_i B_j)` with `i` over rows.
    pub correlators: [[f64; 2]; 2],
    /// `E11 + E12 + E21 - E22`.
    pub value: f64,
    /// `max_k |sum_ij E_ij - 2 E_k|` over the four placements of the minus sign.
    pub max_variant: f64,
    /// Joint distributions of `(A_i, B_j)` in the order 11, 12, 21, 22.
    pub contexts: Vec<JointDistribution>,
}

fn check_spectrum(o: &Observable, tol: &Tolerances) -> Result<()> {
    match o
        .sample_space()
        .iter()
        .find(|&&v| (v - 1.0).abs() > tol.num && (v + 1.0).abs() > tol.num)
    {
        Some(&v) => Err(Error::InvalidSpectrum(v)),
        None => Ok(()),
    }
}

/// Correlators of embedded observables `A_i` and `B_j`, which must all act on
/// the state's space with `[A_i, B_j] = 0` and spectra in `{-1, +1}`.
pub fn chsh_report(
    rho: &AlgebraicState,
    a: [&Observable; 2],
    b: [&Observable; 2],
    tol: &Tolerances,
) -> Result<ChshReport> {
    for o in a.iter().chain(&b) {
        same_dim(rho.dim(), o.dim())?;
        check_spectrum(o, tol)?;
    }
    let mut correlators = [[0.0; 2]; 2];
    let mut contexts = Vec::with_capacity(4);
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            let residual = commutator_norm(&ai.operator(), &bj.operator())?;
            if residual > tol.num {
                return Err(Error::NonCommuting(residual));
            }
            let table = collapse_effect_pair(ai, bj, tol)?;
            let dist = crate::table::joint_distribution(&table, rho, tol)?;
            correlators[i][j] = dist
                .iter()
                .map(|(t, p)| p * ai.sample_space()[t[0]] * bj.sample_space()[t[1]])
                .sum();
            contexts.push(dist);
        }
    }
    let e = correlators;
    let total = e[0][0] + e[0][1] + e[1][0] + e[1][1];
    let value = total - 2.0 * e[1][1];
    let max_variant = [e[0][0], e[0][1], e[1][0], e[1][1]]
        .iter()
        .map(|x| (total - 2.0 * x).abs())
        .fold(0.0, f64::max);
    Ok(ChshReport {
        correlators,
        value,
        max_variant,
        contexts,
    })
}

/// `|E11 + E12 + E21 - E22|`.
pub fn chsh_value(
    rho: &AlgebraicState,
    a: [&Observable; 2],
    b: [&Observable; 2],
    tol: &Tolerances,
) -> Result<f64> {
    Ok(chsh_report(rho, a, b, tol)?.value.abs())
}

/// Marginal problem over the global axes `(A1, A2, B1, B2)` with the four
/// measured pairs as contexts.
pub fn chsh_marginal_problem(report: &ChshReport, tol: &Tolerances) -> Result<MarginalProblem> {
    let d = &report.contexts;
    let axes: Vec<Axis> = vec![
        d[0].axes()[0].clone(),
        d[2].axes()[0].clone(),
        d[0].axes()[1].clone(),
        d[1].axes()[1].clone(),
    ];
    let pairs = [[0, 2], [0, 3], [1, 2], [1, 3]];
    let contexts = pairs
        .iter()
        .zip(d)
        .map(|(p, dist)| Context {
            axes: p.to_vec(),
            distribution: dist.clone(),
        })
        .collect();
    MarginalProblem::new(axes, contexts, tol)
}
