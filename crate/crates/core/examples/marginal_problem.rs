//! Exact feasibility of a marginal problem over rationals, with a Farkas
//! certificate when no global joint distribution exists.

use collapsekit::incompatibility::{admits_global_joint, Context, Feasibility, MarginalProblem};
use collapsekit::table::{Axis, JointDistribution};
use collapsekit::Tolerances;

fn problem(anti: bool, tol: &Tolerances) -> collapsekit::Result<MarginalProblem> {
    let axes: Vec<Axis> = ["A1", "A2", "B1", "B2"].iter().map(|n| Axis::values(*n, vec![-1.0, 1.0])).collect();
    let same = vec![0.5, 0.0, 0.0, 0.5];
    let opposite = vec![0.0, 0.5, 0.5, 0.0];
    let pairs = [[0, 2], [0, 3], [1, 2], [1, 3]];
    let contexts = pairs
        .iter()
        .enumerate()
        .map(|(k, &[i, j])| {
            let p = if anti && k == 3 { opposite.clone() } else { same.clone() };
            Ok(Context {
                axes: vec![i, j],
                distribution: JointDistribution::new(vec![axes[i].clone(), axes[j].clone()], p, tol)?,
            })
        })
        .collect::<collapsekit::Result<Vec<_>>>()?;
    MarginalProblem::new(axes, contexts, tol)
}

fn main() -> collapsekit::Result<()> {
    let tol = Tolerances::DEFAULT;
    for (name, anti) in [("perfect correlations", false), ("PR box", true)] {
        match admits_global_joint(&problem(anti, &tol)?)? {
            Feasibility::Feasible { joint, .. } => {
                println!("{name}: feasible, support {:?}", joint.labels(&joint.argmax()))
            }
            Feasibility::Infeasible { certificate, violation } => {
                println!("{name}: infeasible, violation {violation}");
                for t in certificate.iter().take(4) {
                    println!("  context {} tuple {:?} weight {}", t.context, t.tuple, t.coefficient);
                }
            }
        }
    }
    Ok(())
}
