//! Long measurement chains: step-by-step sampling, table sampling and a
//! comparison of bracketing conventions.

use collapsekit::chain::{compare_conventions, sample_chain_leftfold, tally, ChainSpec, Convention, Mechanism};
use collapsekit::measurement::{bloch_observable, VectorState};
use collapsekit::Tolerances;

fn main() -> collapsekit::Result<()> {
    let tol = Tolerances::DEFAULT;
    let zx = vec![bloch_observable("Z", 0.0, 0.0, 1.0), bloch_observable("X", 1.0, 0.0, 0.0)];
    let rho = VectorState::basis(2, 0).to_state();

    let spec = ChainSpec::new(zx.clone(), 3, Convention::LeftFold, 42)?;
    for r in sample_chain_leftfold(&spec, &rho, 3, &tol)? {
        println!("{}", r.to_json_line());
    }

    let steps = tally(&spec, &rho, 100_000, Mechanism::LeftFoldSteps, &tol)?;
    let table = tally(&spec, &rho, 100_000, Mechanism::Table, &tol)?;
    println!("step counts  {steps:?}\ntable counts {table:?}");

    let conventions = [Convention::LeftFold, Convention::RightFold, Convention::ReverseFold];
    let report = compare_conventions(&spec, &conventions, &rho, 100_000, &tol)?;
    for (i, a) in conventions.iter().enumerate() {
        for (j, b) in conventions.iter().enumerate().skip(i + 1) {
            println!(
                "TV({a}, {b}): exact {:.4}, sampled {:.4}",
                report.exact_tv[i][j], report.empirical_tv[i][j]
            );
        }
    }

    // a million alternating steps in one run
    let long = ChainSpec::new(zx, 1_000_000, Convention::LeftFold, 42)?;
    let start = std::time::Instant::now();
    let run = &sample_chain_leftfold(&long, &rho, 1, &tol)?[0];
    let ones = run.outcomes.iter().filter(|&&o| o == 1).count();
    println!("10^6 steps in {:.2?}, fraction +1 {:.4}", start.elapsed(), ones as f64 / 1e6);
    Ok(())
}
