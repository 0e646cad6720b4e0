//! Pointer-ancilla instruments: sequential unitary measurements reproduce the
//! pairwise collapse product, and a single joint instrument reproduces any
//! given joint distribution.

use collapsekit::collapse::collapse_effect_pair;
use collapsekit::instruments::{
    build_instrument, build_joint_instrument, interference_comparison, luders_duality_check, sequential_probabilities,
    InstrumentModel,
};
use collapsekit::measurement::bloch_observable;
use collapsekit::random::random_vector_state;
use collapsekit::table::joint_distribution;
use collapsekit::Tolerances;
use rand::SeedableRng;

fn main() -> collapsekit::Result<()> {
    let tol = Tolerances::DEFAULT;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let a = bloch_observable("A", 0.6, 0.0, 0.8);
    let b = bloch_observable("B", 0.0, 1.0, 0.0);
    let psi = random_vector_state(2, &mut rng);

    let model = InstrumentModel::new(build_instrument(&a, 3)?, build_instrument(&b, 3)?)?;
    let pointer = sequential_probabilities(&model, &psi, &tol)?;
    let collapse = joint_distribution(&collapse_effect_pair(&a, &b, &tol)?, &psi.to_state(), &tol)?;
    println!("pointer vs collapse: {:e}", pointer.max_deviation(&collapse)?);
    println!("unitarity residual: {:e}", model.unitarity_residual());

    for (j, (m, u)) in interference_comparison(&model, &psi, &tol)?.iter().enumerate() {
        println!("B = {:+}: measured A first {m:.4}, A skipped {u:.4}", b.sample_space()[j]);
    }
    let d = luders_duality_check(&a, &b, &psi)?;
    println!("Heisenberg vs Schrödinger update: {:e}", d.max_difference);

    let joint = build_joint_instrument(&collapse, [3, 3])?;
    println!(
        "joint instrument on dim {}: deviation {:e}, primed commutator {:e}",
        joint.system_dim(),
        joint.pointer_probabilities(&tol)?.max_deviation(&collapse)?,
        joint.primed_commutator()
    );
    Ok(())
}
