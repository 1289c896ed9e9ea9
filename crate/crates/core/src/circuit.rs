//! Pseudo-random circuits: a layer of independent random single-qubit gates
//! followed by a CZ on every edge of the topology, iterated from `|0…0⟩`.

use rand::Rng;

use crate::gates::{GateEnsemble, SingleQubitGate};
use crate::pauli::Topology;
use crate::rng::{realization_rng, PrqRng};
use crate::state::StateVector;
use crate::{Error, Result};

/// Default qubit cap for circuit runs.
pub const DEFAULT_MAX_QUBITS: usize = 24;

/// Whether the local layer precedes the CZ layer within one iteration.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum LayerOrder {
    #[default]
    LocalThenCz,
    CzThenLocal,
}

#[derive(Clone, Debug)]
pub struct CircuitConfig {
    pub n: usize,
    pub iterations: usize,
    pub ensemble: GateEnsemble,
    pub topology: Topology,
    pub seed: u64,
    pub order: LayerOrder,
    pub max_qubits: usize,
}

impl CircuitConfig {
    /// Open-chain circuit with the default layer order and capacity.
    pub fn new(n: usize, iterations: usize, ensemble: GateEnsemble, seed: u64) -> Self {
        CircuitConfig {
            n,
            iterations,
            ensemble,
            topology: Topology::open_chain(n),
            seed,
            order: LayerOrder::default(),
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }

    pub fn with_topology(mut self, topology: Topology) -> Self {
        self.topology = topology;
        self
    }

    pub fn with_order(mut self, order: LayerOrder) -> Self {
        self.order = order;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("circuit needs at least one qubit"));
        }
        if self.n > self.max_qubits {
            return Err(Error::Capacity {
                what: "state vector (qubits)",
                requested: self.n,
                limit: self.max_qubits,
            });
        }
        if self.topology.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: self.topology.n(),
            });
        }
        if let GateEnsemble::Mixture(c) = self.ensemble {
            GateEnsemble::mixture(c)?;
        }
        Ok(())
    }
}

/// One iteration: a fresh ensemble sample on every qubit and the CZ layer.
pub fn pr_iteration<R: Rng + ?Sized>(
    state: &mut StateVector,
    cfg: &CircuitConfig,
    rng: &mut R,
) -> Result<()> {
    if state.n() != cfg.n {
        return Err(Error::DimensionMismatch {
            expected: cfg.n,
            actual: state.n(),
        });
    }
    if cfg.order == LayerOrder::CzThenLocal {
        state.apply_cz_layer(&cfg.topology)?;
    }
    for q in 0..cfg.n {
        let g = cfg.ensemble.sample(rng);
        state.apply_gate(&g, q)?;
    }
    if cfg.order == LayerOrder::LocalThenCz {
        state.apply_cz_layer(&cfg.topology)?;
    }
    Ok(())
}

/// Runs `cfg.iterations` iterations from `|0…0⟩`, calling `record` on the
/// initial state and after every iteration. The RNG is the config's seed,
/// stream 0.
pub fn run_pr_circuit<T, F>(cfg: &CircuitConfig, record: F) -> Result<Vec<T>>
where
    F: FnMut(usize, &StateVector) -> T,
{
    let mut rng = realization_rng(cfg.seed, 0);
    run_pr_circuit_with_rng(cfg, &mut rng, record)
}

pub fn run_pr_circuit_with_rng<T, F>(cfg: &CircuitConfig, rng: &mut PrqRng, mut record: F) -> Result<Vec<T>>
where
    F: FnMut(usize, &StateVector) -> T,
{
    cfg.validate()?;
    let mut state = StateVector::zero(cfg.n);
    let mut out = Vec::with_capacity(cfg.iterations + 1);
    out.push(record(0, &state));
    for step in 1..=cfg.iterations {
        pr_iteration(&mut state, cfg, rng)?;
        out.push(record(step, &state));
    }
    Ok(out)
}

/// Full state-vector trajectory.
pub fn run_pr_states(cfg: &CircuitConfig) -> Result<Vec<StateVector>> {
    run_pr_circuit(cfg, |_, s| s.clone())
}

/// A layer of an explicit circuit.
#[derive(Clone, Debug, PartialEq)]
pub enum CircuitLayer {
    /// One gate per qubit, qubit 0 first.
    Gates(Vec<SingleQubitGate>),
    Cz(Vec<(usize, usize)>),
}

pub fn apply_layers(state: &mut StateVector, layers: &[CircuitLayer]) -> Result<()> {
    for layer in layers {
        match layer {
            CircuitLayer::Gates(gates) => {
                if gates.len() != state.n() {
                    return Err(Error::DimensionMismatch {
                        expected: state.n(),
                        actual: gates.len(),
                    });
                }
                for (q, g) in gates.iter().enumerate() {
                    state.apply_gate(g, q)?;
                }
            }
            CircuitLayer::Cz(edges) => {
                for &(a, b) in edges {
                    state.apply_cz(a, b)?;
                }
            }
        }
    }
    Ok(())
}
