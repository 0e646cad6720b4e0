//! Commeasurability: does a family of context distributions extend to one
//! global joint distribution?
//!
//! Feasibility is decided by an exact rational linear program. Floating-point
//! inputs are converted to rationals exactly and then reconciled so that
//! overlapping contexts share identical marginals; the verdict is then free
//! of tolerances.

mod chsh;
pub mod lp;
mod unifying;

use num::{BigRational, ToPrimitive, Zero};

pub use chsh::{chsh_marginal_problem, chsh_report, chsh_value, local_observable, ChshReport, Side};
pub use unifying::{noncommutative_unifying_state, UnifyingOptions, UnifyingOutcome};

use crate::error::{Error, Result};
use crate::table::{Axis, JointDistribution, Shape};
use crate::tolerance::Tolerances;

/// Largest global tuple count accepted by [`admits_global_joint`].
pub const MAX_GLOBAL_TUPLES: usize = 10_000;

/// A context: a distribution over some of the global axes.
#[derive(Debug, Clone, PartialEq)]
pub struct Context {
    pub axes: Vec<usize>,
    pub distribution: JointDistribution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginalProblem {
    axes: Vec<Axis>,
    contexts: Vec<Context>,
    /// Largest L1 gap between the context tables and the marginals of an
    /// accepted global joint.
    residual_tolerance: BigRational,
}

impl MarginalProblem {
    /// Validates shapes and the consistency of shared marginals within `tol.num`.
    pub fn new(axes: Vec<Axis>, contexts: Vec<Context>, tol: &Tolerances) -> Result<Self> {
        if contexts.is_empty() {
            return Err(Error::InvalidArgument("marginal problem without contexts".into()));
        }
        for (c, ctx) in contexts.iter().enumerate() {
            let mut seen = ctx.axes.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != ctx.axes.len() || ctx.axes.is_empty() {
                return Err(Error::InvalidArgument(format!("context {c} lists axes {:?}", ctx.axes)));
            }
            if ctx.distribution.axes().len() != ctx.axes.len() {
                return Err(Error::InvalidArgument(format!(
                    "context {c} names {} axes but its table has {}",
                    ctx.axes.len(),
                    ctx.distribution.axes().len()
                )));
            }
            for (&g, local) in ctx.axes.iter().zip(ctx.distribution.axes()) {
                let global = axes
                    .get(g)
                    .ok_or_else(|| Error::OutOfRange(format!("context {c} uses axis {g} of {}", axes.len())))?;
                if global.len() != local.len() {
                    return Err(Error::InvalidArgument(format!(
                        "context {c}: axis {} has {} points, global axis {} has {}",
                        local.name,
                        local.len(),
                        global.name,
                        global.len()
                    )));
                }
            }
        }
        let residual_tolerance = BigRational::from_float(tol.num).unwrap_or_else(BigRational::zero);
        let problem = Self {
            axes,
            contexts,
            residual_tolerance,
        };
        for (i, j, shared) in problem.overlaps() {
            let mi = problem.contexts[i].distribution.marginal(&local_positions(&problem.contexts[i], &shared))?;
            let mj = problem.contexts[j].distribution.marginal(&local_positions(&problem.contexts[j], &shared))?;
            let deviation = mi.max_deviation(&mj)?;
            if deviation > tol.num {
                return Err(Error::InconsistentMarginals(format!(
                    "contexts {i} and {j} disagree on shared axes {shared:?} by {deviation:e}"
                )));
            }
        }
        Ok(problem)
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn global_shape(&self) -> Shape {
        Shape::of(&self.axes)
    }

    /// Pairs of contexts `(i, j)`, `i < j`, with their shared global axes.
    fn overlaps(&self) -> Vec<(usize, usize, Vec<usize>)> {
        let mut out = Vec::new();
        for i in 0..self.contexts.len() {
            for j in i + 1..self.contexts.len() {
                let shared: Vec<usize> = self.contexts[i]
                    .axes
                    .iter()
                    .copied()
                    .filter(|g| self.contexts[j].axes.contains(g))
                    .collect();
                if !shared.is_empty() {
                    out.push((i, j, shared));
                }
            }
        }
        out
    }

    /// Context tables as exact rationals with identical shared marginals.
    pub fn exact_tables(&self) -> Result<Vec<Vec<BigRational>>> {
        let mut tables: Vec<Vec<BigRational>> = Vec::with_capacity(self.contexts.len());
        for (c, ctx) in self.contexts.iter().enumerate() {
            let mut table: Vec<BigRational> = ctx
                .distribution
                .probabilities()
                .iter()
                .map(|&p| BigRational::from_float(p).unwrap_or_else(BigRational::zero))
                .collect();
            let total: BigRational = table.iter().sum();
            for v in &mut table {
                *v /= &total;
            }
            // slice-uniform corrections towards every earlier overlapping context
            for (e, earlier) in self.contexts.iter().enumerate().take(c) {
                let shared: Vec<usize> = ctx.axes.iter().copied().filter(|g| earlier.axes.contains(g)).collect();
                if shared.is_empty() {
                    continue;
                }
                let target = exact_marginal(earlier, &tables[e], &shared);
                let current = exact_marginal(ctx, &table, &shared);
                let shape = ctx.distribution.shape();
                let positions = local_positions(ctx, &shared);
                let sub = Shape::new(positions.iter().map(|&k| shape.sizes()[k]).collect());
                let slice = BigRational::from_integer((shape.count() / sub.count()).into());
                for (f, v) in table.iter_mut().enumerate() {
                    let t = shape.tuple(f);
                    let s: Vec<usize> = positions.iter().map(|&k| t[k]).collect();
                    let k = sub.flat(&s);
                    *v += (&target[k] - &current[k]) / &slice;
                }
            }
            tables.push(table);
        }
        for (i, j, shared) in self.overlaps() {
            if exact_marginal(&self.contexts[i], &tables[i], &shared)
                != exact_marginal(&self.contexts[j], &tables[j], &shared)
            {
                return Err(Error::InconsistentMarginals(format!(
                    "contexts {i} and {j} cannot be reconciled exactly on axes {shared:?}"
                )));
            }
        }
        Ok(tables)
    }
}

fn local_positions(ctx: &Context, global: &[usize]) -> Vec<usize> {
    global
        .iter()
        .map(|g| ctx.axes.iter().position(|a| a == g).expect("shared axis belongs to the context"))
        .collect()
}

fn exact_marginal(ctx: &Context, table: &[BigRational], global: &[usize]) -> Vec<BigRational> {
    let shape = ctx.distribution.shape();
    let positions = local_positions(ctx, global);
    let sub = Shape::new(positions.iter().map(|&k| shape.sizes()[k]).collect());
    let mut out = vec![BigRational::zero(); sub.count()];
    for (f, v) in table.iter().enumerate() {
        let t = shape.tuple(f);
        let s: Vec<usize> = positions.iter().map(|&k| t[k]).collect();
        out[sub.flat(&s)] += v;
    }
    out
}

/// One coefficient of a separating functional: `sum z * p_context(tuple)`
/// over all constraint rows is negative for the given marginals but
/// nonnegative for every global joint distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateTerm {
    pub context: usize,
    pub tuple: Vec<usize>,
    pub coefficient: BigRational,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    /// A global joint (exact, and as floats) whose marginals are within
    /// `residual` (L1, summed over all context tables) of the reconciled
    /// context tables; zero when they match exactly.
    Feasible {
        exact: Vec<BigRational>,
        joint: JointDistribution,
        residual: BigRational,
    },
    Infeasible {
        certificate: Vec<CertificateTerm>,
        /// `sum z * p` at the given marginals: minus the smallest L1 gap to
        /// the marginals of any global joint, and below `-tol.num`.
        violation: BigRational,
    },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible { .. })
    }
}

type RowLabel = (usize, Vec<usize>);

/// Constraint system `A x = b` over global tuples plus the row labels.
fn constraint_system(
    problem: &MarginalProblem,
    tables: &[Vec<BigRational>],
) -> (Vec<Vec<BigRational>>, Vec<BigRational>, Vec<RowLabel>) {
    let global = problem.global_shape();
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut labels = Vec::new();
    for (c, ctx) in problem.contexts.iter().enumerate() {
        let shape = ctx.distribution.shape();
        let mut rows = vec![vec![BigRational::zero(); global.count()]; shape.count()];
        for (g, t) in global.tuples().enumerate() {
            let local: Vec<usize> = ctx.axes.iter().map(|&k| t[k]).collect();
            rows[shape.flat(&local)][g] = BigRational::from_integer(1.into());
        }
        for (f, row) in rows.into_iter().enumerate() {
            a.push(row);
            b.push(tables[c][f].clone());
            labels.push((c, shape.tuple(f)));
        }
    }
    (a, b, labels)
}

/// Decides exactly whether the contexts are marginals of one global joint.
pub fn admits_global_joint(problem: &MarginalProblem) -> Result<Feasibility> {
    let count = problem.global_shape().count();
    if count > MAX_GLOBAL_TUPLES {
        return Err(Error::TableTooLarge(count));
    }
    let tables = problem.exact_tables()?;
    let (a, b, labels) = constraint_system(problem, &tables);
    let p = lp::phase_one(&a, &b);
    if p.residual <= problem.residual_tolerance {
        let probs: Vec<f64> = p.x.iter().map(|v| v.to_f64().unwrap_or(0.0)).collect();
        let total: f64 = probs.iter().sum();
        let joint = JointDistribution::from_parts_unchecked(problem.axes.clone(), probs.iter().map(|v| v / total).collect());
        return Ok(Feasibility::Feasible {
            exact: p.x,
            joint,
            residual: p.residual,
        });
    }
    if !lp::is_farkas_certificate(&a, &b, &p.z) {
        return Err(Error::InvalidArgument("simplex produced an invalid certificate".into()));
    }
    let violation = b.iter().zip(&p.z).map(|(bi, zi)| bi * zi).sum();
    let certificate = labels
        .into_iter()
        .zip(p.z)
        .filter(|(_, z)| !z.is_zero())
        .map(|((context, tuple), coefficient)| CertificateTerm {
            context,
            tuple,
            coefficient,
        })
        .collect();
    Ok(Feasibility::Infeasible { certificate, violation })
}
