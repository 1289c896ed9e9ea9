//! Porter-Thomas statistics: histogram of y = 2^n |ψ_i|^2 over an ensemble
//! of pseudo-random states, compared against e^{-y}. Two controls of the
//! same size set the scale: draws from the exponential law itself, and exact
//! Haar states, whose components deviate from e^{-y} by O(2^-n).

use prq::circuit::{run_pr_circuit_with_rng, CircuitConfig};
use prq::gates::GateEnsemble;
use prq::metrics::{exponential_control_distance, haar_control_distance, BinSpec, ComponentHistogram};
use prq::rng::{map_realizations, master_rng};

fn main() -> prq::Result<()> {
    let n = 8;
    let realizations = 200;
    let spec = BinSpec::default();
    let mut rng = master_rng(3);
    let control = exponential_control_distance(realizations << n, spec, &mut rng)?;
    let haar = haar_control_distance(n, realizations, spec, &mut rng)?;
    println!("n = {n}, {realizations} states, control distance {control:.4} (exponential), {haar:.4} (Haar)\n");

    for iterations in [1, 2, 4, 8, 16, 32] {
        let cfg = CircuitConfig::new(n, iterations, GateEnsemble::Haar, 3);
        let states = map_realizations(realizations, 3, |_, rng| {
            run_pr_circuit_with_rng(&cfg, rng, |_, s| s.clone()).map(|mut v| v.pop().unwrap())
        })
        .into_iter()
        .collect::<prq::Result<Vec<_>>>()?;
        let h = ComponentHistogram::from_states(spec, &states)?;
        println!("l = {iterations:>2}: distance {:.4}", h.porter_thomas_distance());
        if iterations == 32 {
            println!("\n  y      P(y)     e^-y");
            for b in (0..40).step_by(4) {
                println!("{:5.2}  {:7.4}  {:7.4}", spec.midpoint(b), h.density(b), (-spec.midpoint(b)).exp());
            }
        }
    }
    Ok(())
}
