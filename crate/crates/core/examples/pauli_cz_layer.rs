//! Pauli strings under a layer of CZ gates, in the full {0,x,y,z} alphabet
//! and in the lumped {0,z,ξ} alphabet the reduced chain runs on.

use prq::pauli::{apply_cz_layer, apply_cz_layer_reduced, reduce, Pauli, PauliString, Topology};

fn main() -> prq::Result<()> {
    let t = Topology::open_chain(4);
    let samples = [
        vec![Pauli::X, Pauli::I, Pauli::I, Pauli::I],
        vec![Pauli::I, Pauli::Y, Pauli::I, Pauli::I],
        vec![Pauli::X, Pauli::X, Pauli::Z, Pauli::I],
        vec![Pauli::Z, Pauli::Z, Pauli::Z, Pauli::Z],
    ];
    println!("{:>6}  {:>6}    {:>6}  {:>6}", "P", "CZ·P·CZ", "[P]", "CZ·[P]");
    for labels in samples {
        let s = PauliString::new(labels);
        let image = apply_cz_layer(&s, &t)?;
        let r = reduce(&s);
        let r_image = apply_cz_layer_reduced(&r, &t)?;
        // lumping commutes with the CZ layer
        assert_eq!(reduce(&image), r_image);
        println!("{s:>6}  {image:>7}    {r:>6}  {r_image:>6}");
    }

    // CZ layers are involutions on strings
    let s = PauliString::from_index(123, 4);
    let twice = apply_cz_layer(&apply_cz_layer(&s, &t)?, &t)?;
    println!("\n{s} -> {} -> {twice}", apply_cz_layer(&s, &t)?);
    Ok(())
}
