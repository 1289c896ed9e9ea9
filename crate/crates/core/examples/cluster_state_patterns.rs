//! Standard and enhanced cluster-state patterns: build, serialize, execute
//! with sampled outcomes, and check against the equivalent circuit.

use prq::circuit::apply_layers;
use prq::mbqc::{
    build_pattern, compile_to_circuit, execute_pattern, AngleSource, ClusterPattern, OutcomePolicy, PatternMode,
};
use prq::pauli::Topology;
use prq::rng::master_rng;
use prq::state::StateVector;

fn main() -> prq::Result<()> {
    let n = 3;
    let t = Topology::open_chain(n);
    let mut rng = master_rng(17);

    let small = build_pattern(2, 1, PatternMode::Standard, AngleSource::Fixed(vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]), &Topology::open_chain(2), &mut rng)?;
    println!("{}", small.to_text());
    assert_eq!(ClusterPattern::parse(&small.to_text())?, small);

    for mode in [PatternMode::Standard, PatternMode::Enhanced] {
        let p = build_pattern(n, 3, mode, AngleSource::HaarEuler, &t, &mut rng)?;
        let edge_columns: Vec<usize> = (0..p.columns()).filter(|&k| !p.vertical_edges(k).is_empty()).collect();
        let exec = execute_pattern(&p, OutcomePolicy::Sampled, &mut rng)?;

        let mut reference = StateVector::zero(n);
        apply_layers(&mut reference, &compile_to_circuit(&p, &exec.record)?)?;
        println!(
            "{mode:>8}: {} x {} lattice, {} iterations, edges on columns {edge_columns:?}",
            p.rows(),
            p.columns(),
            p.iterations()
        );
        println!(
            "          outcomes {:?}, peak register {} qubits, fidelity with circuit {:.12}",
            exec.record.outcomes,
            exec.peak_qubits,
            exec.state.fidelity(&reference)
        );
    }
    Ok(())
}
