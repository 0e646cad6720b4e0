//! Joint distributions of measurement sequences under different bracketings.

use collapsekit::collapse::{collapse_effect_tree, enumerate_bracketings, BracketTree};
use collapsekit::measurement::{bloch_observable, VectorState};
use collapsekit::table::joint_distribution;
use collapsekit::Tolerances;

fn main() -> collapsekit::Result<()> {
    let tol = Tolerances::DEFAULT;
    let z = bloch_observable("Z", 0.0, 0.0, 1.0);
    let x = bloch_observable("X", 1.0, 0.0, 0.0);
    let rho = VectorState::basis(2, 0).to_state();
    let seq = [z.clone(), x, z];

    for tree in enumerate_bracketings(3)? {
        let table = collapse_effect_tree(&seq, &tree, &tol)?;
        let dist = joint_distribution(&table, &rho, &tol)?;
        println!("{tree}");
        for (t, p) in dist.iter().filter(|(_, p)| *p > 0.0) {
            println!("  {:?} {p:.4}", dist.labels(&t));
        }
    }

    // a reverse node folds the right effect around the left one
    let tree: BracketTree = "((0<1),2)".parse()?;
    let dist = joint_distribution(&collapse_effect_tree(&seq, &tree, &tol)?, &rho, &tol)?;
    println!("{tree}: argmax {:?}", dist.labels(&dist.argmax()));
    Ok(())
}
