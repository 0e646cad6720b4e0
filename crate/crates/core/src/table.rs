//! Dense tables over product sample spaces.
//!
//! Tuples are stored row-major: the last axis varies fastest. Axis order
//! always follows the measurement sequence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::{format_value, normalize_probabilities, AlgebraicState, Observable};
use crate::operator::{max_abs, same_dim, ComplexMatrix, HermitianOperator};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleSpace {
    Values(Vec<f64>),
    Labels(Vec<String>),
}

/// One coordinate of a product sample space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub space: SampleSpace,
}

impl Axis {
    pub fn values(name: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            space: SampleSpace::Values(values),
        }
    }

    pub fn labels(name: impl Into<String>, labels: Vec<String>) -> Self {
        Self {
            name: name.into(),
            space: SampleSpace::Labels(labels),
        }
    }

    pub fn of(observable: &Observable) -> Self {
        Self::values(observable.name(), observable.sample_space().to_vec())
    }

    pub fn len(&self) -> usize {
        match &self.space {
            SampleSpace::Values(v) => v.len(),
            SampleSpace::Labels(l) => l.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Numeric coordinate; labelled axes use the point index.
    pub fn value(&self, i: usize) -> f64 {
        match &self.space {
            SampleSpace::Values(v) => v[i],
            SampleSpace::Labels(_) => i as f64,
        }
    }

    pub fn label(&self, i: usize) -> String {
        match &self.space {
            SampleSpace::Values(v) => format_value(v[i]),
            SampleSpace::Labels(l) => l[i].clone(),
        }
    }
}

/// Row-major multi-index arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct Shape {
    sizes: Vec<usize>,
}

impl Shape {
    pub fn new(sizes: Vec<usize>) -> Self {
        Self { sizes }
    }

    pub fn of(axes: &[Axis]) -> Self {
        Self::new(axes.iter().map(Axis::len).collect())
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn count(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn flat(&self, tuple: &[usize]) -> usize {
        tuple
            .iter()
            .zip(&self.sizes)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn tuple(&self, mut flat: usize) -> Vec<usize> {
        let mut t = vec![0; self.sizes.len()];
        for k in (0..self.sizes.len()).rev() {
            t[k] = flat % self.sizes[k];
            flat /= self.sizes[k];
        }
        t
    }

    pub fn tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.count()).map(move |f| self.tuple(f))
    }
}

/// Joint effects indexed by outcome tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct JointEffectTable {
    axes: Vec<Axis>,
    effects: Vec<HermitianOperator>,
}

impl JointEffectTable {
    pub fn new(axes: Vec<Axis>, effects: Vec<HermitianOperator>) -> Result<Self> {
        let count = Shape::of(&axes).count();
        if effects.len() != count || effects.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "{} effects for {count} outcome tuples",
                effects.len()
            )));
        }
        let dim = effects[0].dim();
        for e in &effects {
            same_dim(dim, e.dim())?;
        }
        Ok(Self { axes, effects })
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn shape(&self) -> Shape {
        Shape::of(&self.axes)
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn effects(&self) -> &[HermitianOperator] {
        &self.effects
    }

    pub fn get(&self, tuple: &[usize]) -> &HermitianOperator {
        &self.effects[self.shape().flat(tuple)]
    }

    /// `sum_t E(t)`.
    pub fn total(&self) -> HermitianOperator {
        let dim = self.dim();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for e in &self.effects {
            m += e.matrix();
        }
        HermitianOperator::symmetrized(m)
    }

    /// Max-entry distance of the effect sum from the identity.
    pub fn normalization_error(&self) -> f64 {
        self.total().distance(&HermitianOperator::identity(self.dim()))
    }

    /// Smallest eigenvalue over every entry.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        self.effects
            .iter()
            .map(HermitianOperator::min_eigenvalue)
            .try_fold(f64::INFINITY, |acc, v| Ok(acc.min(v?)))
    }

    /// Largest entrywise distance to another table over the same shape.
    pub fn max_distance(&self, other: &Self) -> Result<f64> {
        if self.shape() != other.shape() {
            return Err(Error::InvalidArgument("tables have different shapes".into()));
        }
        Ok(self
            .effects
            .iter()
            .zip(&other.effects)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max))
    }

    /// Largest entrywise distance to raw (possibly non-Hermitian) matrices.
    pub fn max_distance_to(&self, raw: &[ComplexMatrix]) -> f64 {
        self.effects
            .iter()
            .zip(raw)
            .map(|(a, b)| max_abs(&(a.matrix() - b)))
            .fold(0.0, f64::max)
    }
}

/// Probability table over a product sample space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    axes: Vec<Axis>,
    probabilities: Vec<f64>,
}

impl JointDistribution {
    pub fn new(axes: Vec<Axis>, probabilities: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        let count = Shape::of(&axes).count();
        if probabilities.len() != count || count == 0 {
            return Err(Error::InvalidArgument(format!(
                "{} probabilities for {count} outcome tuples",
                probabilities.len()
            )));
        }
        let probabilities = normalize_probabilities(probabilities, tol)?;
        Ok(Self { axes, probabilities })
    }

    pub(crate) fn from_parts_unchecked(axes: Vec<Axis>, probabilities: Vec<f64>) -> Self {
        Self { axes, probabilities }
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn shape(&self) -> Shape {
        Shape::of(&self.axes)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn get(&self, tuple: &[usize]) -> f64 {
        self.probabilities[self.shape().flat(tuple)]
    }

    /// `(tuple, probability)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        let shape = self.shape();
        self.probabilities
            .iter()
            .enumerate()
            .map(move |(f, &p)| (shape.tuple(f), p))
    }

    /// Marginal over the listed axes, kept in the listed order.
    pub fn marginal(&self, keep: &[usize]) -> Result<JointDistribution> {
        if let Some(&k) = keep.iter().find(|&&k| k >= self.axes.len()) {
            return Err(Error::OutOfRange(format!("axis {k} of {}", self.axes.len())));
        }
        let axes: Vec<Axis> = keep.iter().map(|&k| self.axes[k].clone()).collect();
        let sub = Shape::of(&axes);
        let mut probabilities = vec![0.0; sub.count()];
        for (t, p) in self.iter() {
            let st: Vec<usize> = keep.iter().map(|&k| t[k]).collect();
            probabilities[sub.flat(&st)] += p;
        }
        Ok(JointDistribution { axes, probabilities })
    }

    /// Half the L1 distance between probability vectors.
    pub fn total_variation(&self, other: &Self) -> Result<f64> {
        if self.shape() != other.shape() {
            return Err(Error::InvalidArgument("distributions have different shapes".into()));
        }
        Ok(0.5
            * self
                .probabilities
                .iter()
                .zip(&other.probabilities)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>())
    }

    pub fn max_deviation(&self, other: &Self) -> Result<f64> {
        if self.shape() != other.shape() {
            return Err(Error::InvalidArgument("distributions have different shapes".into()));
        }
        Ok(self
            .probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn argmax(&self) -> Vec<usize> {
        let best = self
            .probabilities
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(f, _)| f)
            .unwrap_or(0);
        self.shape().tuple(best)
    }

    /// Outcome labels for a tuple.
    pub fn labels(&self, tuple: &[usize]) -> Vec<String> {
        tuple
            .iter()
            .zip(&self.axes)
            .map(|(&i, a)| a.label(i))
            .collect()
    }
}

/// `p(t) = Tr[rho E(t)]`, with tiny negatives clamped and the table renormalized.
pub fn joint_distribution(
    effects: &JointEffectTable,
    rho: &AlgebraicState,
    tol: &Tolerances,
) -> Result<JointDistribution> {
    same_dim(effects.dim(), rho.dim())?;
    let raw = effects.effects().iter().map(|e| rho.expect(e)).collect();
    JointDistribution::new(effects.axes().to_vec(), raw, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_round_trip() {
        let s = Shape::new(vec![2, 3, 4]);
        assert_eq!(s.count(), 24);
        for f in 0..24 {
            assert_eq!(s.flat(&s.tuple(f)), f);
        }
        assert_eq!(s.tuple(5), vec![0, 1, 1]);
    }

    #[test]
    fn marginals_and_distances() {
        let axes = vec![Axis::values("A", vec![-1.0, 1.0]), Axis::values("B", vec![0.0, 1.0, 2.0])];
        let d = JointDistribution::new(axes, vec![0.1, 0.2, 0.1, 0.3, 0.2, 0.1], &Tolerances::DEFAULT).unwrap();
        let a = d.marginal(&[0]).unwrap();
        assert!((a.probabilities()[0] - 0.4).abs() < 1e-15);
        let ba = d.marginal(&[1, 0]).unwrap();
        assert!((ba.get(&[0, 1]) - 0.3).abs() < 1e-15);
        assert_eq!(d.argmax(), vec![1, 0]);
        assert_eq!(d.total_variation(&d).unwrap(), 0.0);
        assert!(d.marginal(&[2]).is_err());
    }

    #[test]
    fn distribution_rejects_bad_input() {
        let axes = vec![Axis::values("A", vec![0.0, 1.0])];
        assert!(JointDistribution::new(axes.clone(), vec![0.5], &Tolerances::DEFAULT).is_err());
        assert!(JointDistribution::new(axes.clone(), vec![1.5, -0.5], &Tolerances::DEFAULT).is_err());
        // tiny negatives are clamped
        let d = JointDistribution::new(axes, vec![1.0 + 1e-12, -1e-12], &Tolerances::DEFAULT).unwrap();
        assert_eq!(d.probabilities()[1], 0.0);
    }
}
