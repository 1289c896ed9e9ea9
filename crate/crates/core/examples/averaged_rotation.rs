//! Averaged squared-rotation matrices of the single-qubit ensembles, from the
//! closed forms and from sampling, and their lumping onto R(c).

use prq::gates::GateEnsemble;
use prq::markov::{averaged_rotation, averaged_rotation_mc, reduce_rotation, reduced_rotation};
use prq::rng::master_rng;

fn print(name: &str, m: &prq::markov::AveragedRotation) {
    println!("{name}");
    for t in 0..m.dim() {
        let row: Vec<String> = (0..m.dim()).map(|s| format!("{:7.4}", m.get(t, s))).collect();
        println!("  {}", row.join(" "));
    }
}

fn main() -> prq::Result<()> {
    let mut rng = master_rng(9);
    for e in [GateEnsemble::Haar, GateEnsemble::Hz, GateEnsemble::mixture(0.3)?] {
        let exact = averaged_rotation(&e)?;
        let sampled = averaged_rotation_mc(&e, 50_000, &mut rng)?;
        print(&format!("{e} (c = {:.3}), sampling error {:.1e}", exact.z_invariance(), exact.max_abs_diff(&sampled)), &exact);
        let lumped = reduce_rotation(&exact)?;
        assert!(lumped.max_abs_diff(&reduced_rotation(exact.z_invariance())?) < 1e-12);
        print("  lumped onto (0, z, ξ)", &lumped);
    }
    Ok(())
}
