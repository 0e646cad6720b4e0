//! Observables, states and single-measurement statistics.
//!
//! An [`Observable`] is a Hermitian operator presented through its distinct
//! eigenvalues (the sample space) and spectral projectors. States are density
//! operators evaluated as `rho(X) = Tr[rho X]`.

use crate::error::{Error, Result};
use crate::operator::{
    c, max_abs, psd_sqrt, same_dim, spectral_decompose, ComplexMatrix, ComplexVector,
    HermitianOperator, SpectralDecomposition, C64,
};
use crate::tolerance::Tolerances;

/// Default clustering gap for observables built from matrices.
pub const DEFAULT_DEGENERACY_GAP: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    name: String,
    decomposition: SpectralDecomposition,
}

impl Observable {
    pub fn new(
        name: impl Into<String>,
        operator: &HermitianOperator,
        degeneracy_gap: f64,
        tol: &Tolerances,
    ) -> Result<Self> {
        Ok(Self {
            name: name.into(),
            decomposition: spectral_decompose(operator, degeneracy_gap, tol)?,
        })
    }

    pub fn from_decomposition(name: impl Into<String>, decomposition: SpectralDecomposition) -> Self {
        Self {
            name: name.into(),
            decomposition,
        }
    }

    /// Diagonal observable in the computational basis. Entries are grouped by
    /// exact equality, so the projectors are exact 0/1 diagonals.
    pub fn diagonal(name: impl Into<String>, values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty diagonal".into()));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: k, col: k });
        }
        let mut distinct = values.to_vec();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        let projectors = distinct
            .iter()
            .map(|&a| {
                let indicator: Vec<f64> = values.iter().map(|&v| if v == a { 1.0 } else { 0.0 }).collect();
                HermitianOperator::diagonal(&indicator)
            })
            .collect();
        Ok(Self {
            name: name.into(),
            decomposition: SpectralDecomposition::from_parts_exact(distinct, projectors),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.decomposition.dim()
    }

    /// The distinct eigenvalues, strictly increasing.
    pub fn sample_space(&self) -> &[f64] {
        self.decomposition.eigenvalues()
    }

    pub fn projectors(&self) -> &[HermitianOperator] {
        self.decomposition.projectors()
    }

    pub fn outcome_count(&self) -> usize {
        self.decomposition.len()
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomposition
    }

    pub fn operator(&self) -> HermitianOperator {
        self.decomposition.reconstruct()
    }

    pub fn projector(&self, index: usize) -> Result<&HermitianOperator> {
        self.projectors().get(index).ok_or(Error::OutcomeOutOfRange {
            index,
            count: self.outcome_count(),
        })
    }

    /// Index of the sample point within `tol` of `value`.
    pub fn index_of(&self, value: f64, tol: f64) -> Option<usize> {
        self.sample_space().iter().position(|&a| (a - value).abs() <= tol)
    }
}

/// Qubit observable `n·sigma` for a unit Bloch vector `n`, spectrum {-1, +1}.
pub fn bloch_observable(name: &str, x: f64, y: f64, z: f64) -> Observable {
    let n = (x * x + y * y + z * z).sqrt();
    let (x, y, z) = (x / n, y / n, z / n);
    let half = |s: f64| {
        HermitianOperator::symmetrized(ComplexMatrix::from_row_slice(
            2,
            2,
            &[
                c(0.5 * (1.0 + s * z), 0.0),
                c(0.5 * s * x, -0.5 * s * y),
                c(0.5 * s * x, 0.5 * s * y),
                c(0.5 * (1.0 - s * z), 0.0),
            ],
        ))
    };
    let decomposition =
        SpectralDecomposition::from_parts(vec![-1.0, 1.0], vec![half(-1.0), half(1.0)], &Tolerances::DEFAULT)
            .expect("Bloch projectors are complete");
    Observable::from_decomposition(name, decomposition)
}

/// A unit vector `|psi>`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorState {
    amplitudes: ComplexVector,
}

impl VectorState {
    pub fn new(amplitudes: ComplexVector, tol: &Tolerances) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument("empty vector state".into()));
        }
        let deviation = (amplitudes.norm_squared() - 1.0).abs();
        if !(deviation <= tol.num) {
            return Err(Error::NotNormalized {
                what: "vector state".into(),
                deviation,
            });
        }
        Ok(Self { amplitudes })
    }

    pub fn normalized(amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a zero vector".into()));
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = ComplexVector::zeros(dim);
        v[k] = c(1.0, 0.0);
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    /// `<psi| X |psi>`.
    pub fn expect(&self, x: &ComplexMatrix) -> C64 {
        (self.amplitudes.adjoint() * x * &self.amplitudes)[(0, 0)]
    }

    /// The pure state `rho_psi(X) = <psi|X|psi>`.
    pub fn to_state(&self) -> AlgebraicState {
        AlgebraicState {
            density: HermitianOperator::symmetrized(&self.amplitudes * self.amplitudes.adjoint()),
        }
    }
}

/// A state given by a density operator: PSD with unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicState {
    density: HermitianOperator,
}

impl AlgebraicState {
    pub fn new(density: HermitianOperator, tol: &Tolerances) -> Result<Self> {
        let deviation = (density.trace() - 1.0).abs();
        if !(deviation <= tol.num) {
            return Err(Error::NotNormalized {
                what: "density trace".into(),
                deviation,
            });
        }
        let min_eigenvalue = density.min_eigenvalue()?;
        if min_eigenvalue < -tol.psd {
            return Err(Error::NotPsd { min_eigenvalue });
        }
        Ok(Self { density })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            density: HermitianOperator::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn pure(psi: &VectorState) -> Self {
        psi.to_state()
    }

    pub fn density(&self) -> &HermitianOperator {
        &self.density
    }

    pub fn dim(&self) -> usize {
        self.density.dim()
    }

    /// `rho(X) = Tr[rho X]` for an arbitrary operator.
    pub fn evaluate(&self, x: &ComplexMatrix) -> C64 {
        self.density.trace_with(x)
    }

    /// Real expectation of a Hermitian operator.
    pub fn expect(&self, x: &HermitianOperator) -> f64 {
        self.evaluate(x.matrix()).re
    }
}

/// Clamps tiny negative probabilities to zero and renormalizes.
pub(crate) fn normalize_probabilities(mut raw: Vec<f64>, tol: &Tolerances) -> Result<Vec<f64>> {
    for p in raw.iter_mut() {
        if *p < -tol.num || !p.is_finite() {
            return Err(Error::NotPsd { min_eigenvalue: *p });
        }
        if *p < 0.0 {
            *p = 0.0;
        }
    }
    let total: f64 = raw.iter().sum();
    let deviation = (total - 1.0).abs();
    if deviation > tol.num.max(1e-6) {
        return Err(Error::NotNormalized {
            what: "probability table".into(),
            deviation,
        });
    }
    raw.iter_mut().for_each(|p| *p /= total);
    Ok(raw)
}

/// Discrete density `{(alpha_i, rho(P_i))}`.
pub fn probability_density(
    a: &Observable,
    rho: &AlgebraicState,
    tol: &Tolerances,
) -> Result<Vec<(f64, f64)>> {
    same_dim(a.dim(), rho.dim())?;
    let raw = a.projectors().iter().map(|p| rho.expect(p)).collect();
    let probs = normalize_probabilities(raw, tol)?;
    Ok(a.sample_space().iter().copied().zip(probs).collect())
}

/// `sum_i exp(i lambda alpha_i) rho(P_i)` for every `lambda`.
pub fn characteristic_function(
    a: &Observable,
    rho: &AlgebraicState,
    lambdas: &[f64],
    tol: &Tolerances,
) -> Result<Vec<C64>> {
    let density = probability_density(a, rho, tol)?;
    Ok(lambdas
        .iter()
        .map(|&l| {
            density
                .iter()
                .map(|&(alpha, p)| C64::from_polar(p, l * alpha))
                .sum()
        })
        .collect())
}

/// Moments `rho(A^n) = sum_i alpha_i^n rho(P_i)` for `n = 0..=n_max`.
pub fn moments(a: &Observable, rho: &AlgebraicState, n_max: usize, tol: &Tolerances) -> Result<Vec<f64>> {
    let density = probability_density(a, rho, tol)?;
    Ok((0..=n_max)
        .map(|n| density.iter().map(|&(alpha, p)| alpha.powi(n as i32) * p).sum())
        .collect())
}

/// Lüders update after outcome `i`: `P_i rho P_i / rho(P_i)`.
pub fn luders_collapse(
    rho: &AlgebraicState,
    a: &Observable,
    outcome_index: usize,
    tol: &Tolerances,
) -> Result<AlgebraicState> {
    same_dim(a.dim(), rho.dim())?;
    let p = a.projector(outcome_index)?;
    let prob = rho.expect(p);
    if !(prob > tol.prob) {
        return Err(Error::ZeroProbability {
            index: outcome_index,
            probability: prob,
        });
    }
    let m = p.matrix() * rho.density().matrix() * p.matrix();
    Ok(AlgebraicState {
        density: HermitianOperator::symmetrized(m.unscale(prob)),
    })
}

/// Lüders update by a general effect: `sqrt(E) rho sqrt(E) / rho(E)`.
pub fn luders_collapse_effect(
    rho: &AlgebraicState,
    effect: &HermitianOperator,
    tol: &Tolerances,
) -> Result<AlgebraicState> {
    same_dim(effect.dim(), rho.dim())?;
    let prob = rho.expect(effect);
    if !(prob > tol.prob) {
        return Err(Error::ZeroProbability {
            index: 0,
            probability: prob,
        });
    }
    let root = psd_sqrt(effect, tol)?;
    let m = root.matrix() * rho.density().matrix() * root.matrix();
    Ok(AlgebraicState {
        density: HermitianOperator::symmetrized(m.unscale(prob)),
    })
}

/// Shortest round-trip rendering of a sample value.
pub fn format_value(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v}")
    }
}

fn set_label(values: &[f64]) -> String {
    let inner: Vec<String> = values.iter().map(|&v| format_value(v)).collect();
    format!("{{{}}}", inner.join(","))
}

/// Projection-valued measure over labelled sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct Pvm {
    sample_points: Vec<String>,
    projectors: Vec<HermitianOperator>,
}

impl Pvm {
    pub fn sample_points(&self) -> &[String] {
        &self.sample_points
    }

    pub fn projectors(&self) -> &[HermitianOperator] {
        &self.projectors
    }

    pub fn to_povm(&self) -> Povm {
        Povm {
            sample_points: self.sample_points.clone(),
            effects: self.projectors.clone(),
        }
    }
}

/// `E(X) = sum_{i: alpha_i in X} P_i` for each block `X` of `partition`.
pub fn pvm_from_observable(a: &Observable, partition: &[Vec<f64>], tol: &Tolerances) -> Result<Pvm> {
    let mut owner: Vec<Option<usize>> = vec![None; a.outcome_count()];
    for (block, values) in partition.iter().enumerate() {
        if values.is_empty() {
            return Err(Error::InvalidPartition(format!("block {block} is empty")));
        }
        for &v in values {
            let i = a.index_of(v, tol.num).ok_or_else(|| {
                Error::InvalidPartition(format!("{v} is not in the sample space"))
            })?;
            if let Some(prev) = owner[i] {
                return Err(Error::InvalidPartition(format!(
                    "{v} appears in blocks {prev} and {block}"
                )));
            }
            owner[i] = Some(block);
        }
    }
    if let Some(i) = owner.iter().position(Option::is_none) {
        return Err(Error::InvalidPartition(format!(
            "{} is not covered",
            a.sample_space()[i]
        )));
    }
    let dim = a.dim();
    let projectors = partition
        .iter()
        .enumerate()
        .map(|(block, _)| {
            let mut m = ComplexMatrix::zeros(dim, dim);
            for (i, p) in a.projectors().iter().enumerate() {
                if owner[i] == Some(block) {
                    m += p.matrix();
                }
            }
            HermitianOperator::symmetrized(m)
        })
        .collect();
    Ok(Pvm {
        sample_points: partition.iter().map(|b| set_label(b)).collect(),
        projectors,
    })
}

/// Coarse-grains `A` into `sum_k Theta(A - t_k)`, with values `0..=len(thresholds)`.
/// Only values that actually occur form the new sample space.
pub fn discretize_observable(a: &Observable, thresholds: &[f64], tol: &Tolerances) -> Result<Observable> {
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("thresholds must be strictly increasing".into()));
    }
    for &t in thresholds {
        if a.sample_space().iter().any(|&alpha| (alpha - t).abs() <= tol.num) {
            return Err(Error::AmbiguousThreshold(t));
        }
    }
    let dim = a.dim();
    let mut bins: Vec<Option<ComplexMatrix>> = vec![None; thresholds.len() + 1];
    for (&alpha, p) in a.sample_space().iter().zip(a.projectors()) {
        let v = thresholds.iter().filter(|&&t| alpha > t).count();
        let m = bins[v].get_or_insert_with(|| ComplexMatrix::zeros(dim, dim));
        *m += p.matrix();
    }
    let (values, projectors): (Vec<f64>, Vec<HermitianOperator>) = bins
        .into_iter()
        .enumerate()
        .filter_map(|(v, m)| m.map(|m| (v as f64, HermitianOperator::symmetrized(m))))
        .unzip();
    let decomposition = SpectralDecomposition::from_parts(values, projectors, tol)?;
    Ok(Observable::from_decomposition(format!("{}_d", a.name()), decomposition))
}

/// Normalized positive operator-valued measure on a finite set of labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    sample_points: Vec<String>,
    effects: Vec<HermitianOperator>,
}

impl Povm {
    pub fn new(sample_points: Vec<String>, effects: Vec<HermitianOperator>, tol: &Tolerances) -> Result<Self> {
        if effects.is_empty() || sample_points.len() != effects.len() {
            return Err(Error::InvalidArgument(format!(
                "{} sample points for {} effects",
                sample_points.len(),
                effects.len()
            )));
        }
        let dim = effects[0].dim();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for e in &effects {
            same_dim(dim, e.dim())?;
            let min_eigenvalue = e.min_eigenvalue()?;
            if min_eigenvalue < -tol.psd {
                return Err(Error::NotPsd { min_eigenvalue });
            }
            sum += e.matrix();
        }
        let deviation = max_abs(&(sum - ComplexMatrix::identity(dim, dim)));
        if deviation > tol.num {
            return Err(Error::NotNormalized {
                what: "POVM effects".into(),
                deviation,
            });
        }
        Ok(Self { sample_points, effects })
    }

    pub fn sample_points(&self) -> &[String] {
        &self.sample_points
    }

    pub fn effects(&self) -> &[HermitianOperator] {
        &self.effects
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    /// Effect of a union of sample points (additivity on a finite space).
    pub fn effect_of(&self, points: &[usize]) -> Result<HermitianOperator> {
        let dim = self.dim();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for &k in points {
            m += self
                .effects
                .get(k)
                .ok_or(Error::OutcomeOutOfRange { index: k, count: self.effects.len() })?
                .matrix();
        }
        Ok(HermitianOperator::symmetrized(m))
    }

    pub fn probabilities(&self, rho: &AlgebraicState, tol: &Tolerances) -> Result<Vec<f64>> {
        same_dim(self.dim(), rho.dim())?;
        normalize_probabilities(self.effects.iter().map(|e| rho.expect(e)).collect(), tol)
    }
}

/// A POVM presented as `E(X) = sum_l kappa_l(X) Q_l`, keeping the generating
/// family `{Q_l}` and the weight rows `kappa_l(.)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmMixture {
    kappas: Vec<Vec<f64>>,
    qs: Vec<HermitianOperator>,
    povm: Povm,
}

impl PovmMixture {
    pub fn kappas(&self) -> &[Vec<f64>] {
        &self.kappas
    }

    pub fn qs(&self) -> &[HermitianOperator] {
        &self.qs
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    pub fn sample_points(&self) -> &[String] {
        self.povm.sample_points()
    }
}

/// Builds `E(X) = sum_l kappa_l(X) Q_l`. Each row `kappas[l]` must be a
/// normalized measure over the sample points and the `Q_l` must sum to the
/// identity.
pub fn povm_from_mixture(
    sample_points: Vec<String>,
    kappas: Vec<Vec<f64>>,
    qs: Vec<HermitianOperator>,
    tol: &Tolerances,
) -> Result<PovmMixture> {
    if qs.is_empty() || kappas.len() != qs.len() {
        return Err(Error::InvalidArgument(format!(
            "{} kappa rows for {} generating operators",
            kappas.len(),
            qs.len()
        )));
    }
    let dim = qs[0].dim();
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for q in &qs {
        same_dim(dim, q.dim())?;
        let min_eigenvalue = q.min_eigenvalue()?;
        if min_eigenvalue < -tol.psd {
            return Err(Error::NotPsd { min_eigenvalue });
        }
        sum += q.matrix();
    }
    let deviation = max_abs(&(sum - ComplexMatrix::identity(dim, dim)));
    if deviation > tol.num {
        return Err(Error::NotNormalized {
            what: "generating family sum".into(),
            deviation,
        });
    }
    for (l, row) in kappas.iter().enumerate() {
        if row.len() != sample_points.len() {
            return Err(Error::DimensionMismatch {
                expected: sample_points.len(),
                found: row.len(),
            });
        }
        if let Some(&k) = row.iter().find(|&&k| !(k >= 0.0)) {
            return Err(Error::InvalidArgument(format!("negative kappa {k} in row {l}")));
        }
        let deviation = (row.iter().sum::<f64>() - 1.0).abs();
        if deviation > tol.num {
            return Err(Error::NotNormalized {
                what: format!("kappa row {l}"),
                deviation,
            });
        }
    }
    let effects = (0..sample_points.len())
        .map(|x| {
            let mut m = ComplexMatrix::zeros(dim, dim);
            for (row, q) in kappas.iter().zip(&qs) {
                m += q.matrix().scale(row[x]);
            }
            HermitianOperator::symmetrized(m)
        })
        .collect();
    let povm = Povm::new(sample_points, effects, tol)?;
    Ok(PovmMixture { kappas, qs, povm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{pauli_x, pauli_z};

    const TOL: Tolerances = Tolerances::DEFAULT;

    fn z() -> Observable {
        Observable::new("Z", &pauli_z(), 1e-8, &TOL).unwrap()
    }
    fn x() -> Observable {
        Observable::new("X", &pauli_x(), 1e-8, &TOL).unwrap()
    }
    fn ket0() -> AlgebraicState {
        VectorState::basis(2, 0).to_state()
    }

    #[test]
    fn densities() {
        let d = probability_density(&z(), &ket0(), &TOL).unwrap();
        assert_eq!(d.len(), 2);
        assert!((d[0].0 + 1.0).abs() < 1e-12 && d[0].1.abs() < 1e-12);
        assert!((d[1].0 - 1.0).abs() < 1e-12 && (d[1].1 - 1.0).abs() < 1e-12);
        let d = probability_density(&x(), &ket0(), &TOL).unwrap();
        assert!((d[0].1 - 0.5).abs() < 1e-12 && (d[1].1 - 0.5).abs() < 1e-12);
        // maximally mixed: rank / dim
        let a = Observable::diagonal("A", &[0.0, 0.0, 0.0, 1.0]).unwrap();
        let d = probability_density(&a, &AlgebraicState::maximally_mixed(4), &TOL).unwrap();
        assert!((d[0].1 - 0.75).abs() < 1e-12 && (d[1].1 - 0.25).abs() < 1e-12);
        assert!(probability_density(&a, &ket0(), &TOL).is_err());
    }

    #[test]
    fn characteristic_and_moments() {
        let cf = characteristic_function(&z(), &ket0(), &[0.0, std::f64::consts::PI], &TOL).unwrap();
        assert!((cf[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((cf[1] - c(-1.0, 0.0)).norm() < 1e-12);
        let m = moments(&z(), &AlgebraicState::maximally_mixed(2), 5, &TOL).unwrap();
        for (n, v) in m.iter().enumerate() {
            let expected = if n % 2 == 0 { 1.0 } else { 0.0 };
            assert!((v - expected).abs() < 1e-12, "moment {n} = {v}");
        }
    }

    #[test]
    fn luders_examples() {
        let z_plus = z().index_of(1.0, 1e-9).unwrap();
        let after = luders_collapse(&ket0(), &z(), z_plus, &TOL).unwrap();
        assert!(after.density().distance(ket0().density()) < 1e-12);

        let x_plus = x().index_of(1.0, 1e-9).unwrap();
        let after = luders_collapse(&ket0(), &x(), x_plus, &TOL).unwrap();
        let plus = HermitianOperator::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]], &TOL).unwrap();
        assert!(after.density().distance(&plus) < 1e-12);

        let a = Observable::diagonal("A", &[0.0, 0.0, 1.0, 1.0]).unwrap();
        let after = luders_collapse(&AlgebraicState::maximally_mixed(4), &a, 0, &TOL).unwrap();
        assert!(after.density().distance(&a.projectors()[0].scale(0.5)) < 1e-12);

        let z_minus = z().index_of(-1.0, 1e-9).unwrap();
        assert!(matches!(
            luders_collapse(&ket0(), &z(), z_minus, &TOL),
            Err(Error::ZeroProbability { .. })
        ));
        assert!(luders_collapse(&ket0(), &z(), 7, &TOL).is_err());
    }

    #[test]
    fn pvm_partitions() {
        let pvm = pvm_from_observable(&z(), &[vec![-1.0], vec![1.0]], &TOL).unwrap();
        assert!(pvm.projectors()[0].distance(&z().projectors()[0]) < 1e-12);
        let a = Observable::diagonal("A", &[1.0, 2.0, 3.0]).unwrap();
        let coarse = pvm_from_observable(&a, &[vec![1.0, 2.0], vec![3.0]], &TOL).unwrap();
        assert!(coarse.projectors()[0].distance(&HermitianOperator::diagonal(&[1.0, 1.0, 0.0])) < 1e-12);
        assert!(coarse.projectors()[1].distance(&HermitianOperator::diagonal(&[0.0, 0.0, 1.0])) < 1e-12);
        assert_eq!(coarse.sample_points(), &["{1,2}".to_string(), "{3}".to_string()]);
        let whole = pvm_from_observable(&a, &[vec![1.0, 2.0, 3.0]], &TOL).unwrap();
        assert!(whole.projectors()[0].distance(&HermitianOperator::identity(3)) < 1e-12);
        assert!(pvm_from_observable(&a, &[vec![1.0, 2.0], vec![2.0, 3.0]], &TOL).is_err());
        assert!(pvm_from_observable(&a, &[vec![1.0, 2.0]], &TOL).is_err());
    }

    #[test]
    fn discretization() {
        let a = Observable::diagonal("A", &[0.5, 1.5, 2.5, 3.5]).unwrap();
        let d = discretize_observable(&a, &[1.0, 2.0, 3.0], &TOL).unwrap();
        assert_eq!(d.sample_space(), &[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(d.decomposition().ranks(), vec![1, 1, 1, 1]);
        let constant = discretize_observable(&a, &[-5.0, -4.0], &TOL).unwrap();
        assert_eq!(constant.sample_space(), &[2.0]);
        assert!(constant.projectors()[0].distance(&HermitianOperator::identity(4)) < 1e-12);
        assert!(matches!(
            discretize_observable(&a, &[1.5], &TOL),
            Err(Error::AmbiguousThreshold(_))
        ));
    }

    #[test]
    fn mixtures() {
        let z = z();
        let labels = vec!["-".to_string(), "+".to_string()];
        let pvm_like = povm_from_mixture(
            labels.clone(),
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            z.projectors().to_vec(),
            &TOL,
        )
        .unwrap();
        for (e, p) in pvm_like.povm().effects().iter().zip(z.projectors()) {
            assert!(e.distance(p) < 1e-12);
        }
        let trivial = povm_from_mixture(labels.clone(), vec![vec![0.3, 0.7]], vec![HermitianOperator::identity(2)], &TOL)
            .unwrap();
        assert!(trivial.povm().effects()[1].distance(&HermitianOperator::identity(2).scale(0.7)) < 1e-12);
        assert!(povm_from_mixture(labels.clone(), vec![vec![1.2, -0.2]], vec![HermitianOperator::identity(2)], &TOL).is_err());
        assert!(povm_from_mixture(labels, vec![vec![0.5, 0.5]], vec![HermitianOperator::identity(2).scale(0.5)], &TOL).is_err());
    }

    #[test]
    fn trine_is_a_povm() {
        let qs: Vec<HermitianOperator> = (0..3)
            .map(|k| {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                let v = ComplexVector::from_vec(vec![c((theta / 2.0).cos(), 0.0), c((theta / 2.0).sin(), 0.0)]);
                HermitianOperator::projector_onto(&v).unwrap().scale(2.0 / 3.0)
            })
            .collect();
        let kappas = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let labels = (0..3).map(|k| format!("t{k}")).collect();
        let trine = povm_from_mixture(labels, kappas, qs, &TOL).unwrap();
        let all = trine.povm().effect_of(&[0, 1, 2]).unwrap();
        assert!(all.distance(&HermitianOperator::identity(2)) < 1e-12);
    }
}
