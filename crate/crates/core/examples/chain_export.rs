//! Writes a transition matrix in MatrixMarket coordinate format and reads it
//! back.

use prq::experiments::{cmd_chain_export, ExportConfig};
use prq::markov::{read_matrix_market, Space};

fn main() -> prq::Result<()> {
    let dir = std::env::temp_dir().join(format!("prq-export-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| prq::Error::Io { path: dir.display().to_string(), source: e })?;
    for space in [Space::Reduced, Space::Full] {
        let path = dir.join(format!("chain-{space}.mtx"));
        let cfg = ExportConfig { n: 3, c: 0.25, space, topology: "open".into(), remove_identity: true };
        let (dim, nnz) = cmd_chain_export(&cfg, &path)?;
        let (header, m) = read_matrix_market(&path)?;
        let sums = m.column_sums();
        let worst = sums.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);
        println!("{}: {dim} x {dim}, {nnz} nonzeros, header {header:?}", path.display());
        println!("  max |column sum - 1| = {worst:.1e}");
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}
