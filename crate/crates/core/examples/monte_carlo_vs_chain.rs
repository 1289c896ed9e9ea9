//! The squared Pauli coefficients averaged over random circuits follow the
//! second-moment Markov chain exactly. Two qubits, HZ gates.

use prq::circuit::{run_pr_circuit_with_rng, CircuitConfig};
use prq::gates::GateEnsemble;
use prq::markov::{averaged_rotation, build_chain, initial_distribution, Space};
use prq::metrics::mean_and_se;
use prq::pauli::{PauliString, Topology};
use prq::rng::map_realizations;

fn main() -> prq::Result<()> {
    let n = 2;
    let steps = 4;
    let ensemble = GateEnsemble::Hz;
    let cfg = CircuitConfig::new(n, steps, ensemble, 5);
    let runs = map_realizations(20_000, 5, |_, rng| {
        run_pr_circuit_with_rng(&cfg, rng, |_, s| s.pauli_sq_coefficients().unwrap())
    })
    .into_iter()
    .collect::<prq::Result<Vec<_>>>()?;

    let m = build_chain(n, &averaged_rotation(&ensemble)?, &Topology::open_chain(n), false)?;
    let chain = initial_distribution(n, Space::Full, false).evolve(&m, steps)?;
    for l in [1, steps] {
        println!("l = {l}");
        for nu in 0..16 {
            let xs: Vec<f64> = runs.iter().map(|r| r[l][nu]).collect();
            let (mean, se) = mean_and_se(&xs);
            let exact = chain[l].probs[nu];
            if exact > 0.0 || mean > 0.0 {
                println!("  {}  chain {exact:.5}  sampled {mean:.5} ± {se:.5}", PauliString::from_index(nu, n));
            }
        }
    }
    Ok(())
}
