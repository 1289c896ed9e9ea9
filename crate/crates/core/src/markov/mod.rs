//! Second-moment Markov chains of pseudo-random circuits.
//!
//! Expanding a state in Pauli strings, `ρ = 2^{-n} Σ_ν c_ν P_ν`, the squared
//! coefficients `c_ν²/2^n` form a probability distribution whose ensemble
//! average evolves linearly under one iteration: `M = P_cz · R̄^{⊗n}`.
//! Distributions live on the full alphabet `{0, x, y, z}^n` or, after
//! lumping `x` and `y` into `ξ`, on the reduced alphabet `{0, z, ξ}^n`.
//! Index digits are little-endian: qubit 0 is the least significant digit.

mod chain;
mod export;
mod rotation;
mod spectral;

pub use chain::{
    build_chain, evolve_distribution, initial_distribution, lump_to_reduced, multiplicities, stationary_distribution,
    ChainDistribution, CscMatrix, TransitionMatrix, DEFAULT_MAX_STATES,
};
pub use export::{read_matrix_market, write_matrix_market, MatrixHeader};
pub use rotation::{averaged_rotation, averaged_rotation_mc, averaged_rotation_sampled, reduce_rotation, reduced_rotation, AveragedRotation, Space};
pub use spectral::{gap_scan, spectral_gap, spectral_gap_of, GapMethod, GapOptions, GapScan, SpectralReport};
