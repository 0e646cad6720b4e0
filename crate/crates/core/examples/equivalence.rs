//! A commuting no-collapse model that reproduces a collapse-product joint
//! distribution exactly.

use collapsekit::collapse::{collapse_effect_tree, left_fold_tree};
use collapsekit::equivalence::{build_commutative_model, qnd_check, verify_equivalence};
use collapsekit::measurement::bloch_observable;
use collapsekit::random::random_state;
use collapsekit::table::joint_distribution;
use collapsekit::Tolerances;
use rand::SeedableRng;

fn main() -> collapsekit::Result<()> {
    let tol = Tolerances::DEFAULT;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let seq = [
        bloch_observable("Z", 0.0, 0.0, 1.0),
        bloch_observable("X", 1.0, 0.0, 0.0),
        bloch_observable("Y", 0.0, 1.0, 0.0),
    ];
    let rho = random_state(2, &mut rng);
    let dist = joint_distribution(&collapse_effect_tree(&seq, &left_fold_tree(3)?, &tol)?, &rho, &tol)?;

    let model = build_commutative_model(&dist);
    let primed = model.primed_observables()?;
    println!("original sequence commutes: {}", qnd_check(&seq, &tol)?);
    println!("primed observables commute: {} (dimension {})", qnd_check(&primed, &tol)?, model.dim());

    let report = verify_equivalence(&model, &dist, 200, 7)?;
    println!("max deviation {:e}, min positivity {:.3}", report.max_deviation, report.min_positivity);

    let mut off = model.clone();
    off.perturb(0, 1e-3)?;
    println!("after perturbation: {:e}", verify_equivalence(&off, &dist, 10, 7)?.max_deviation);
    Ok(())
}
