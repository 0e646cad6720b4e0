//! The no-collapse commutative model.
//!
//! Any joint distribution produced by a collapse product is reproduced by a
//! state on a commutative algebra: one diagonal slot per outcome tuple, primed
//! observables that read off the tuple coordinates, and a diagonal state that
//! carries the joint probabilities. Everything is kept diagonal; dense
//! matrices are only built on request.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::measurement::{AlgebraicState, Observable};
use crate::operator::{commutator_norm, same_dim, HermitianOperator, C64};
use crate::table::{Axis, JointDistribution, Shape};
use crate::tolerance::Tolerances;

/// Highest power of each primed observable in the positivity probes.
pub const POSITIVITY_DEGREE: u32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct CommutativeModel {
    axes: Vec<Axis>,
    /// `coordinates[k][s]`: value of primed observable `k` on slot `s`.
    coordinates: Vec<Vec<f64>>,
    /// Diagonal of the state.
    weights: Vec<f64>,
}

impl CommutativeModel {
    /// Dimension of the commutative carrier space.
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn coordinates(&self) -> &[Vec<f64>] {
        &self.coordinates
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Primed observable `k` as a dense diagonal operator, named `A'` for `A`.
    pub fn primed_observable(&self, k: usize) -> Result<Observable> {
        let coords = self
            .coordinates
            .get(k)
            .ok_or_else(|| Error::OutOfRange(format!("axis {k} of {}", self.coordinates.len())))?;
        Observable::diagonal(format!("{}'", self.axes[k].name), coords)
    }

    pub fn primed_observables(&self) -> Result<Vec<Observable>> {
        (0..self.coordinates.len()).map(|k| self.primed_observable(k)).collect()
    }

    /// The state as a dense diagonal density operator.
    pub fn state(&self, tol: &Tolerances) -> Result<AlgebraicState> {
        AlgebraicState::new(HermitianOperator::diagonal(&self.weights), tol)
    }

    /// Adds `delta` to one slot of the state without renormalizing.
    pub fn perturb(&mut self, slot: usize, delta: f64) -> Result<()> {
        let n = self.weights.len();
        let w = self
            .weights
            .get_mut(slot)
            .ok_or_else(|| Error::OutOfRange(format!("slot {slot} of {n}")))?;
        *w += delta;
        Ok(())
    }

    /// `rho(prod_k delta(A'_k - u_k))` for every tuple of axis values, with
    /// the product of spectral projectors evaluated on the diagonal.
    pub fn joint_distribution(&self) -> JointDistribution {
        let shape = Shape::of(&self.axes);
        let mut mass: HashMap<Vec<u64>, f64> = HashMap::new();
        for (s, &w) in self.weights.iter().enumerate() {
            *mass.entry(self.slot_key(s)).or_insert(0.0) += w;
        }
        let probabilities = shape
            .tuples()
            .map(|t| {
                let key: Vec<u64> = t.iter().zip(&self.axes).map(|(&i, a)| a.value(i).to_bits()).collect();
                mass.get(&key).copied().unwrap_or(0.0)
            })
            .collect();
        JointDistribution::from_parts_unchecked(self.axes.clone(), probabilities)
    }

    fn slot_key(&self, s: usize) -> Vec<u64> {
        self.coordinates.iter().map(|c| c[s].to_bits()).collect()
    }
}

/// Diagonal commutative model of `dist`; slot `s` is the `s`-th tuple in
/// row-major order.
pub fn build_commutative_model(dist: &JointDistribution) -> CommutativeModel {
    let axes = dist.axes().to_vec();
    let shape = dist.shape();
    let coordinates = axes
        .iter()
        .enumerate()
        .map(|(k, axis)| shape.tuples().map(|t| axis.value(t[k])).collect())
        .collect();
    CommutativeModel {
        axes,
        coordinates,
        weights: dist.probabilities().to_vec(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    /// Largest `|rho(prod delta(A'_k - u_k)) - p(u)|` over tuples.
    pub max_deviation: f64,
    /// Smallest `rho(X^H X)` over the random polynomial probes.
    pub min_positivity: f64,
    pub probes: usize,
}

/// Compares the model's statistics with `dist` and probes state positivity
/// on `probes` random polynomials `X = sum lambda_m prod_k A'_k^{m_k}`.
pub fn verify_equivalence(
    model: &CommutativeModel,
    dist: &JointDistribution,
    probes: usize,
    seed: u64,
) -> Result<EquivalenceReport> {
    if model.axes.len() != dist.axes().len() || model.dim() != dist.shape().count() {
        return Err(Error::InvalidArgument(format!(
            "model over {} axes and {} slots, distribution over {} axes and {} tuples",
            model.axes.len(),
            model.dim(),
            dist.axes().len(),
            dist.shape().count()
        )));
    }
    let max_deviation = model.joint_distribution().max_deviation(dist)?;

    let n = model.axes.len();
    let exponents = Shape::new(vec![POSITIVITY_DEGREE as usize + 1; n]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_positivity = f64::INFINITY;
    for _ in 0..probes {
        let lambdas: Vec<C64> = (0..exponents.count())
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let value: f64 = (0..model.dim())
            .map(|s| {
                let x: C64 = exponents
                    .tuples()
                    .zip(&lambdas)
                    .map(|(m, l)| {
                        let monomial: f64 = m
                            .iter()
                            .zip(&model.coordinates)
                            .map(|(&e, c)| c[s].powi(e as i32))
                            .product();
                        l * monomial
                    })
                    .sum();
                model.weights[s] * x.norm_sqr()
            })
            .sum();
        min_positivity = min_positivity.min(value);
    }
    Ok(EquivalenceReport {
        max_deviation,
        min_positivity,
        probes,
    })
}

/// Whether the observables pairwise commute within `tol.num`.
pub fn qnd_check(observables: &[Observable], tol: &Tolerances) -> Result<bool> {
    let ops: Vec<HermitianOperator> = observables.iter().map(Observable::operator).collect();
    for (i, a) in ops.iter().enumerate() {
        for b in &ops[i + 1..] {
            same_dim(a.dim(), b.dim())?;
            if commutator_norm(a, b)? > tol.num {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collapse::collapse_effect_pair;
    use crate::measurement::VectorState;
    use crate::operator::{pauli_x, pauli_z};
    use crate::table::joint_distribution;

    const TOL: Tolerances = Tolerances::DEFAULT;

    fn zx_dist() -> JointDistribution {
        let z = Observable::new("Z", &pauli_z(), 1e-8, &TOL).unwrap();
        let x = Observable::new("X", &pauli_x(), 1e-8, &TOL).unwrap();
        let t = collapse_effect_pair(&z, &x, &TOL).unwrap();
        joint_distribution(&t, &VectorState::basis(2, 0).to_state(), &TOL).unwrap()
    }

    #[test]
    fn zx_model_transcribes_the_table() {
        let model = build_commutative_model(&zx_dist());
        assert_eq!(model.dim(), 4);
        // sample spaces are ascending, so tuple order is (-,-), (-,+), (+,-), (+,+)
        assert_eq!(model.coordinates()[0], vec![-1.0, -1.0, 1.0, 1.0]);
        assert_eq!(model.coordinates()[1], vec![-1.0, 1.0, -1.0, 1.0]);
        let w = model.weights();
        assert!(w[0].abs() < 1e-15 && w[1].abs() < 1e-15);
        assert!((w[2] - 0.5).abs() < 1e-12 && (w[3] - 0.5).abs() < 1e-12);
        let primed = model.primed_observables().unwrap();
        assert_eq!(primed[0].sample_space(), &[-1.0, 1.0]);
        assert_eq!(primed[0].name(), "Z'");
        assert!(qnd_check(&primed, &TOL).unwrap());
    }

    #[test]
    fn round_trip_and_perturbation() {
        let dist = zx_dist();
        let mut model = build_commutative_model(&dist);
        let r = verify_equivalence(&model, &dist, 20, 7).unwrap();
        assert!(r.max_deviation <= 1e-12);
        assert!(r.min_positivity >= -1e-12);
        model.perturb(3, 1e-3).unwrap();
        let r = verify_equivalence(&model, &dist, 0, 7).unwrap();
        assert!((r.max_deviation - 1e-3).abs() < 1e-12);
        assert!(model.perturb(9, 1.0).is_err());
    }

    #[test]
    fn deterministic_and_product_tables() {
        let axes = vec![Axis::values("A", vec![0.0, 1.0]), Axis::values("B", vec![2.0, 3.0, 5.0])];
        let point = JointDistribution::new(axes.clone(), vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0], &TOL).unwrap();
        let model = build_commutative_model(&point);
        let rho = model.state(&TOL).unwrap();
        let d = rho.density().matrix();
        assert!((d.trace().re - 1.0).abs() < 1e-15 && (d * d - d).norm() < 1e-15);

        let pa = [0.3, 0.7];
        let pb = [0.2, 0.5, 0.3];
        let probs: Vec<f64> = pa.iter().flat_map(|a| pb.iter().map(move |b| a * b)).collect();
        let product = JointDistribution::new(axes, probs, &TOL).unwrap();
        let model = build_commutative_model(&product);
        for (s, w) in model.weights().iter().enumerate() {
            assert!((w - pa[s / 3] * pb[s % 3]).abs() < 1e-15);
        }
    }

    #[test]
    fn qnd_examples() {
        let z = Observable::new("Z", &pauli_z(), 1e-8, &TOL).unwrap();
        let x = Observable::new("X", &pauli_x(), 1e-8, &TOL).unwrap();
        assert!(!qnd_check(&[z.clone(), x], &TOL).unwrap());
        let d1 = Observable::diagonal("D1", &[1.0, 2.0, 2.0]).unwrap();
        let d2 = Observable::diagonal("D2", &[0.0, 5.0, 1.0]).unwrap();
        assert!(qnd_check(&[d1.clone(), d2], &TOL).unwrap());
        assert!(qnd_check(&[z, d1], &TOL).is_err());
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let model = build_commutative_model(&zx_dist());
        let other = JointDistribution::new(vec![Axis::values("A", vec![0.0, 1.0])], vec![0.5, 0.5], &TOL).unwrap();
        assert!(verify_equivalence(&model, &other, 1, 0).is_err());
    }
}
