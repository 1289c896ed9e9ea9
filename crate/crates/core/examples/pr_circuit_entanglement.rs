//! Meyer-Wallach Q along pseudo-random circuits on an open chain, for the
//! Haar and HZ gate ensembles. The HZ circuit saturates Q = 1 for its first
//! iterations before relaxing to the Haar value Q_R.

use prq::circuit::{run_pr_circuit_with_rng, CircuitConfig};
use prq::gates::GateEnsemble;
use prq::metrics::{mean_and_se, meyer_wallach_q, q_random_expectation};
use prq::rng::map_realizations;

fn main() -> prq::Result<()> {
    let n = 6;
    let iterations = 20;
    let realizations = 300;
    let q_r = q_random_expectation(n as u32);
    println!("n = {n}, Q_R = {q_r:.6}\n");
    println!("{:>3}  {:>18}  {:>18}", "l", "haar <Q>", "hz <Q>");

    let mut columns = Vec::new();
    for ensemble in [GateEnsemble::Haar, GateEnsemble::Hz] {
        let cfg = CircuitConfig::new(n, iterations, ensemble, 7);
        let runs = map_realizations(realizations, 7, |_, rng| {
            run_pr_circuit_with_rng(&cfg, rng, |_, s| meyer_wallach_q(s))
        })
        .into_iter()
        .collect::<prq::Result<Vec<_>>>()?;
        columns.push(
            (0..=iterations)
                .map(|l| mean_and_se(&runs.iter().map(|r| r[l]).collect::<Vec<_>>()))
                .collect::<Vec<_>>(),
        );
    }
    for l in 0..=iterations {
        let (h, hs) = columns[0][l];
        let (z, zs) = columns[1][l];
        println!("{l:>3}  {h:>9.5} ± {hs:.5}  {z:>9.5} ± {zs:.5}");
    }
    Ok(())
}
