//! Sampling long measurement sequences.
//!
//! Every run draws from its own ChaCha8 stream (`seed`, stream = run id), so
//! records are reproducible regardless of how runs are scheduled across
//! threads. Tallies are merged with integer addition.
//!
//! Three mechanisms are provided:
//! - [`sample_chain_leftfold`] walks the sequence step by step, keeping the
//!   accumulated left-fold effect `E` and the state `sqrt(E) rho sqrt(E) / rho(E)`;
//!   its law is the left-fold collapse table.
//! - [`sample_chain_projective`] applies the plain projective update
//!   `P rho P / rho(P)` after every outcome; its law is the right-fold table.
//! - [`sample_chain_tree`] samples tuples from the table of any bracketing.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collapse::{
    collapse_effect_tree, left_fold_tree, reverse_fold_tree, right_fold_tree, BracketTree, MAX_TABLE_TUPLES,
};
use crate::error::{Error, Result};
use crate::measurement::{luders_collapse, normalize_probabilities, AlgebraicState, Observable};
use crate::operator::{psd_sqrt, HermitianOperator};
use crate::table::{joint_distribution, Axis, JointDistribution, Shape};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Convention {
    LeftFold,
    RightFold,
    ReverseFold,
    Tree(BracketTree),
}

impl Convention {
    pub fn tree(&self, n: usize) -> Result<BracketTree> {
        match self {
            Convention::LeftFold => left_fold_tree(n),
            Convention::RightFold => right_fold_tree(n),
            Convention::ReverseFold => reverse_fold_tree(n),
            Convention::Tree(t) => {
                t.validate(n)?;
                Ok(t.clone())
            }
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Convention::LeftFold => f.write_str("left"),
            Convention::RightFold => f.write_str("right"),
            Convention::ReverseFold => f.write_str("reverse"),
            Convention::Tree(t) => write!(f, "{t}"),
        }
    }
}

/// `left`, `right`, `reverse`, or a bracket expression such as `((0,1),2)`.
impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "left" | "left-fold" | "left_fold" => Ok(Convention::LeftFold),
            "right" | "right-fold" | "right_fold" => Ok(Convention::RightFold),
            "reverse" | "reverse-fold" | "reverse_fold" => Ok(Convention::ReverseFold),
            other => other.parse().map(Convention::Tree),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChainSpec {
    /// Measured cyclically: step `k` uses `observables[k % len]`.
    pub observables: Vec<Observable>,
    pub length: usize,
    pub convention: Convention,
    pub seed: u64,
}

impl ChainSpec {
    pub fn new(observables: Vec<Observable>, length: usize, convention: Convention, seed: u64) -> Result<Self> {
        let first = observables
            .first()
            .ok_or_else(|| Error::InvalidArgument("chain without observables".into()))?;
        if length == 0 {
            return Err(Error::OutOfRange("chain length must be at least 1".into()));
        }
        for o in &observables {
            crate::operator::same_dim(first.dim(), o.dim())?;
        }
        if let Convention::Tree(t) = &convention {
            t.validate(length)?;
        }
        Ok(Self {
            observables,
            length,
            convention,
            seed,
        })
    }

    pub fn dim(&self) -> usize {
        self.observables[0].dim()
    }

    pub fn observable(&self, step: usize) -> &Observable {
        &self.observables[step % self.observables.len()]
    }

    /// The unrolled sequence of length `n`.
    pub fn sequence(&self) -> Vec<Observable> {
        (0..self.length).map(|k| self.observable(k).clone()).collect()
    }

    pub fn axes(&self) -> Vec<Axis> {
        (0..self.length).map(|k| Axis::of(self.observable(k))).collect()
    }

    pub fn with_convention(&self, convention: Convention) -> Result<Self> {
        Self::new(self.observables.clone(), self.length, convention, self.seed)
    }

    fn rng(&self, run: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(run);
        rng
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub run: u64,
    pub outcomes: Vec<usize>,
}

impl OutcomeRecord {
    /// One line of JSON, without the trailing newline.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

fn check_runs(runs: u64) -> Result<()> {
    if runs == 0 {
        return Err(Error::OutOfRange("runs must be at least 1".into()));
    }
    Ok(())
}

fn draw(probabilities: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probabilities.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // rounding left u above the last partial sum
    probabilities.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

fn conditional(mut raw: Vec<f64>) -> Result<Vec<f64>> {
    raw.iter_mut().for_each(|p| *p = p.max(0.0));
    let total: f64 = raw.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroProbability {
            index: 0,
            probability: total,
        });
    }
    raw.iter_mut().for_each(|p| *p /= total);
    Ok(raw)
}

fn left_fold_run(spec: &ChainSpec, rho0: &AlgebraicState, run: u64, tol: &Tolerances) -> Result<Vec<usize>> {
    let mut rng = spec.rng(run);
    let mut outcomes = Vec::with_capacity(spec.length);
    let rho = rho0.density().matrix();
    // sqrt of the accumulated effect; None stands for the identity
    let mut root: Option<HermitianOperator> = None;
    for step in 0..spec.length {
        let obs = spec.observable(step);
        let raw: Vec<f64> = obs
            .projectors()
            .iter()
            .map(|p| match &root {
                None => rho0.expect(p),
                Some(r) => (rho * r.matrix() * p.matrix() * r.matrix()).trace().re,
            })
            .collect();
        // conditional law given the history: divide by rho(E)
        let probabilities = conditional(raw)?;
        let j = draw(&probabilities, &mut rng);
        outcomes.push(j);
        if step + 1 < spec.length {
            let p = &obs.projectors()[j];
            // rescaled to unit trace; the conditional law ignores the scale
            let effect = match &root {
                None => p.clone(),
                Some(r) => HermitianOperator::symmetrized(r.matrix() * p.matrix() * r.matrix()),
            };
            let effect = effect.scale(1.0 / effect.trace());
            root = Some(psd_sqrt(&effect, tol)?);
        }
    }
    Ok(outcomes)
}

fn projective_run(spec: &ChainSpec, rho0: &AlgebraicState, run: u64, tol: &Tolerances) -> Result<Vec<usize>> {
    let mut rng = spec.rng(run);
    let mut outcomes = Vec::with_capacity(spec.length);
    let mut rho = rho0.clone();
    for step in 0..spec.length {
        let obs = spec.observable(step);
        let raw = obs.projectors().iter().map(|p| rho.expect(p)).collect();
        let probabilities = normalize_probabilities(raw, tol)?;
        let j = draw(&probabilities, &mut rng);
        outcomes.push(j);
        if step + 1 < spec.length {
            rho = luders_collapse(&rho, obs, j, tol)?;
        }
    }
    Ok(outcomes)
}

/// Tuple sampler over an exact distribution, by binary search in the CDF.
struct TableSampler {
    shape: Shape,
    cdf: Vec<f64>,
}

impl TableSampler {
    fn new(dist: &JointDistribution) -> Self {
        let mut acc = 0.0;
        let cdf = dist
            .probabilities()
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Self {
            shape: dist.shape(),
            cdf,
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let u: f64 = rng.random::<f64>() * self.cdf[self.cdf.len() - 1];
        let mut f = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        // never land on a zero-probability tuple
        while f > 0 && self.cdf[f] == self.cdf[f - 1] {
            f -= 1;
        }
        self.shape.tuple(f)
    }
}

fn collect_records<F>(runs: u64, run: F) -> Result<Vec<OutcomeRecord>>
where
    F: Fn(u64) -> Result<Vec<usize>> + Sync,
{
    check_runs(runs)?;
    (0..runs)
        .into_par_iter()
        .map(|r| run(r).map(|outcomes| OutcomeRecord { run: r, outcomes }))
        .collect()
}

fn tally_runs<F>(shape: &Shape, runs: u64, run: F) -> Result<Vec<u64>>
where
    F: Fn(u64) -> Result<Vec<usize>> + Sync,
{
    check_runs(runs)?;
    if shape.count() > MAX_TABLE_TUPLES {
        return Err(Error::TableTooLarge(shape.count()));
    }
    (0..runs)
        .into_par_iter()
        .try_fold(
            || vec![0u64; shape.count()],
            |mut acc, r| {
                acc[shape.flat(&run(r)?)] += 1;
                Ok(acc)
            },
        )
        .try_reduce(
            || vec![0u64; shape.count()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )
}

fn require_left_fold(spec: &ChainSpec) -> Result<()> {
    if spec.convention != Convention::LeftFold {
        return Err(Error::InvalidArgument(format!(
            "step-by-step sampling implements the left fold, chain convention is {}",
            spec.convention
        )));
    }
    Ok(())
}

/// Step-by-step sampling of the left-fold law in constant memory.
pub fn sample_chain_leftfold(
    spec: &ChainSpec,
    rho0: &AlgebraicState,
    runs: u64,
    tol: &Tolerances,
) -> Result<Vec<OutcomeRecord>> {
    require_left_fold(spec)?;
    crate::operator::same_dim(spec.dim(), rho0.dim())?;
    collect_records(runs, |r| left_fold_run(spec, rho0, r, tol))
}

/// Step-by-step sampling with the projective update after every outcome.
pub fn sample_chain_projective(
    spec: &ChainSpec,
    rho0: &AlgebraicState,
    runs: u64,
    tol: &Tolerances,
) -> Result<Vec<OutcomeRecord>> {
    crate::operator::same_dim(spec.dim(), rho0.dim())?;
    collect_records(runs, |r| projective_run(spec, rho0, r, tol))
}

/// The exact joint distribution of the spec's convention.
pub fn exact_distribution(spec: &ChainSpec, rho0: &AlgebraicState, tol: &Tolerances) -> Result<JointDistribution> {
    let tree = spec.convention.tree(spec.length)?;
    let table = collapse_effect_tree(&spec.sequence(), &tree, tol)?;
    joint_distribution(&table, rho0, tol)
}

fn check_table_size(spec: &ChainSpec) -> Result<()> {
    let count = Shape::of(&spec.axes()).count();
    if count > MAX_TABLE_TUPLES {
        return Err(Error::TableTooLarge(count));
    }
    Ok(())
}

/// Samples tuples from the exact table of any convention.
pub fn sample_chain_tree(
    spec: &ChainSpec,
    rho0: &AlgebraicState,
    runs: u64,
    tol: &Tolerances,
) -> Result<Vec<OutcomeRecord>> {
    check_table_size(spec)?;
    let sampler = TableSampler::new(&exact_distribution(spec, rho0, tol)?);
    collect_records(runs, |r| Ok(sampler.sample(&mut spec.rng(r))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mechanism {
    /// [`sample_chain_leftfold`]
    LeftFoldSteps,
    /// [`sample_chain_projective`]
    Projective,
    /// [`sample_chain_tree`]
    Table,
}

/// Outcome-tuple counts over `runs` runs, in row-major tuple order.
pub fn tally(
    spec: &ChainSpec,
    rho0: &AlgebraicState,
    runs: u64,
    mechanism: Mechanism,
    tol: &Tolerances,
) -> Result<Vec<u64>> {
    crate::operator::same_dim(spec.dim(), rho0.dim())?;
    let shape = Shape::of(&spec.axes());
    match mechanism {
        Mechanism::LeftFoldSteps => {
            require_left_fold(spec)?;
            tally_runs(&shape, runs, |r| left_fold_run(spec, rho0, r, tol))
        }
        Mechanism::Projective => tally_runs(&shape, runs, |r| projective_run(spec, rho0, r, tol)),
        Mechanism::Table => {
            check_table_size(spec)?;
            let sampler = TableSampler::new(&exact_distribution(spec, rho0, tol)?);
            tally_runs(&shape, runs, |r| Ok(sampler.sample(&mut spec.rng(r))))
        }
    }
}

/// Relative frequencies of a tally as a distribution over the spec's axes.
pub fn empirical_distribution(spec: &ChainSpec, counts: &[u64]) -> JointDistribution {
    let total: u64 = counts.iter().sum();
    let probs = counts.iter().map(|&c| c as f64 / total.max(1) as f64).collect();
    JointDistribution::from_parts_unchecked(spec.axes(), probs)
}

#[derive(Debug, Clone)]
pub struct ConventionReport {
    pub conventions: Vec<Convention>,
    pub exact: Vec<JointDistribution>,
    pub empirical: Vec<JointDistribution>,
    /// `exact_tv[a][b]`: total variation between exact tables.
    pub exact_tv: Vec<Vec<f64>>,
    pub empirical_tv: Vec<Vec<f64>>,
}

/// Exact and sampled (table mechanism, shared seed) distributions for each
/// convention, with pairwise total-variation distances.
pub fn compare_conventions(
    spec: &ChainSpec,
    conventions: &[Convention],
    rho0: &AlgebraicState,
    runs: u64,
    tol: &Tolerances,
) -> Result<ConventionReport> {
    let mut exact = Vec::new();
    let mut empirical = Vec::new();
    for c in conventions {
        let variant = spec.with_convention(c.clone())?;
        exact.push(exact_distribution(&variant, rho0, tol)?);
        let counts = tally(&variant, rho0, runs, Mechanism::Table, tol)?;
        empirical.push(empirical_distribution(&variant, &counts));
    }
    let pairwise = |d: &[JointDistribution]| -> Result<Vec<Vec<f64>>> {
        d.iter()
            .map(|a| d.iter().map(|b| a.total_variation(b)).collect())
            .collect()
    };
    Ok(ConventionReport {
        conventions: conventions.to_vec(),
        exact_tv: pairwise(&exact)?,
        empirical_tv: pairwise(&empirical)?,
        exact,
        empirical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{probability_density, VectorState};
    use crate::operator::{pauli_x, pauli_z};

    const TOL: Tolerances = Tolerances::DEFAULT;

    fn z() -> Observable {
        Observable::new("Z", &pauli_z(), 1e-8, &TOL).unwrap()
    }
    fn x() -> Observable {
        Observable::new("X", &pauli_x(), 1e-8, &TOL).unwrap()
    }
    fn tilted() -> AlgebraicState {
        let psi = crate::operator::ComplexVector::from_vec(vec![
            crate::operator::c(0.8, 0.0),
            crate::operator::c(0.36, 0.48),
        ]);
        VectorState::new(psi, &TOL).unwrap().to_state()
    }

    #[test]
    fn convention_parsing() {
        for s in ["left", "right", "reverse", "((0,1),2)", "(0<(1,2))"] {
            assert_eq!(s.parse::<Convention>().unwrap().to_string(), s);
        }
        assert!("sideways".parse::<Convention>().is_err());
        assert!(ChainSpec::new(vec![z()], 2, "((0,1),2)".parse().unwrap(), 0).is_err());
        assert!(ChainSpec::new(vec![z()], 0, Convention::LeftFold, 0).is_err());
    }

    #[test]
    fn records_are_deterministic() {
        let spec = ChainSpec::new(vec![z(), x()], 5, Convention::LeftFold, 42).unwrap();
        let a = sample_chain_leftfold(&spec, &tilted(), 200, &TOL).unwrap();
        let b = sample_chain_leftfold(&spec, &tilted(), 200, &TOL).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[7].run, 7);
        assert_eq!(a[0].to_json_line(), serde_json::to_string(&a[0]).unwrap());
        let other = ChainSpec { seed: 43, ..spec };
        assert_ne!(a, sample_chain_leftfold(&other, &tilted(), 200, &TOL).unwrap());
    }

    #[test]
    fn single_step_matches_density() {
        let spec = ChainSpec::new(vec![x()], 1, Convention::LeftFold, 1).unwrap();
        let n = 100_000u64;
        let counts = tally(&spec, &tilted(), n, Mechanism::LeftFoldSteps, &TOL).unwrap();
        let p = probability_density(&x(), &tilted(), &TOL).unwrap();
        for (c, (_, p)) in counts.iter().zip(p) {
            let sigma = (n as f64 * p * (1.0 - p)).sqrt();
            assert!((*c as f64 - n as f64 * p).abs() < 3.0 * sigma + 1.0);
        }
    }

    #[test]
    fn repeated_observable_is_constant() {
        let spec = ChainSpec::new(vec![x()], 6, Convention::LeftFold, 3).unwrap();
        for mechanism in [sample_chain_leftfold, sample_chain_projective] {
            for r in mechanism(&spec, &tilted(), 100, &TOL).unwrap() {
                assert!(r.outcomes.iter().all(|&o| o == r.outcomes[0]));
            }
        }
    }

    #[test]
    fn zx_frequencies() {
        let spec = ChainSpec::new(vec![z(), x()], 2, Convention::LeftFold, 9).unwrap();
        let rho = VectorState::basis(2, 0).to_state();
        let counts = tally(&spec, &rho, 1_000_000, Mechanism::LeftFoldSteps, &TOL).unwrap();
        let d = empirical_distribution(&spec, &counts);
        assert!((d.get(&[1, 1]) - 0.5).abs() < 0.002);
        assert!((d.get(&[1, 0]) - 0.5).abs() < 0.002);
        assert_eq!(counts[0] + counts[1], 0);
    }

    #[test]
    fn long_chain_uses_constant_memory_sampler() {
        let spec = ChainSpec::new(vec![z(), x()], 40, Convention::LeftFold, 5).unwrap();
        let records = sample_chain_leftfold(&spec, &tilted(), 10, &TOL).unwrap();
        assert!(records.iter().all(|r| r.outcomes.len() == 40));
        let long = ChainSpec::new(vec![z(), x()], 5000, Convention::LeftFold, 5).unwrap();
        assert_eq!(sample_chain_leftfold(&long, &tilted(), 2, &TOL).unwrap()[1].outcomes.len(), 5000);
        assert!(sample_chain_tree(&spec, &tilted(), 10, &TOL).is_err());
        let right = spec.with_convention(Convention::RightFold).unwrap();
        assert!(sample_chain_leftfold(&right, &tilted(), 10, &TOL).is_err());
    }

    #[test]
    fn table_sampler_skips_zero_tuples() {
        let spec = ChainSpec::new(vec![z(), x()], 2, Convention::LeftFold, 11).unwrap();
        let rho = VectorState::basis(2, 1).to_state();
        for r in sample_chain_tree(&spec, &rho, 2000, &TOL).unwrap() {
            assert_eq!(r.outcomes[0], 0);
        }
    }

    #[test]
    fn zxz_conventions_differ() {
        let spec = ChainSpec::new(vec![z(), x()], 3, Convention::LeftFold, 17).unwrap();
        let rho = VectorState::basis(2, 0).to_state();
        let report = compare_conventions(
            &spec,
            &[Convention::LeftFold, Convention::RightFold],
            &rho,
            100_000,
            &TOL,
        )
        .unwrap();
        // left: (+,±,+) with 1/2 each; right: (+,±,±) with 1/4 each
        assert!((report.exact_tv[0][1] - 0.5).abs() < 1e-12);
        assert!((report.empirical_tv[0][1] - 0.5).abs() < 0.01);
        assert_eq!(report.exact_tv[0][0], 0.0);

        let single = ChainSpec::new(vec![z()], 1, Convention::LeftFold, 1).unwrap();
        let r = compare_conventions(
            &single,
            &[Convention::LeftFold, Convention::RightFold, Convention::ReverseFold],
            &rho,
            1000,
            &TOL,
        )
        .unwrap();
        assert!(r.empirical_tv.iter().flatten().all(|&d| d == 0.0));
    }
}
