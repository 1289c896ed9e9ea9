//! Spectral gap of the reduced second-moment chain as a function of the
//! z-invariance c of the single-qubit ensemble, for a few chain lengths.

use prq::markov::{gap_scan, GapOptions};
use prq::pauli::Topology;

fn main() -> prq::Result<()> {
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
    for n in [3, 4, 5] {
        let scan = gap_scan(n, &grid, &Topology::open_chain(n), &GapOptions::default())?;
        println!("n = {n}");
        for r in scan.rows.iter().step_by(2) {
            let bar = "#".repeat((r.gap * 100.0).round() as usize);
            println!("  c = {:.2}  gap {:.5}  rate {:.5}  {bar}", r.c, r.gap, r.rate);
        }
        println!(
            "  max gap {:.5} at c = {:.2}; Γ(0)/Γ(1/3) = {:.4}\n",
            scan.max_gap, scan.argmax_c, scan.rate_ratio
        );
    }
    Ok(())
}
