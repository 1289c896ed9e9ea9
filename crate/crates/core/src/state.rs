//! Exact `2^n`-amplitude state vectors.
//!
//! Qubit `q` is bit `q` of the computational-basis index. Global phase is
//! never fixed; compare states with [`StateVector::fidelity`].

use rand::Rng;
use rand_distr::StandardNormal;

use crate::gates::{SingleQubitGate, C64};
use crate::pauli::{Pauli, Topology};
use crate::{Error, Result};

/// Largest qubit count [`StateVector::pauli_sq_coefficients`] accepts by default.
pub const DEFAULT_PAULI_LIMIT: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[index] = C64::new(1.0, 0.0);
        StateVector { n, amps }
    }

    /// Wraps amplitudes as given; the length must be a power of two and the
    /// norm 1 within `1e-10`.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::invalid(format!("{len} amplitudes is not a power of two")));
        }
        let s = StateVector {
            n: len.trailing_zeros() as usize,
            amps,
        };
        let norm = s.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::invalid(format!("state has squared norm {norm}")));
        }
        Ok(s)
    }

    /// Haar-random state: a normalised vector of independent complex
    /// Gaussians.
    pub fn haar_random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let amps: Vec<C64> = (0..1usize << n)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let mut s = StateVector { n, amps };
        s.normalize();
        s
    }

    pub(crate) fn from_raw(n: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n);
        StateVector { n, amps }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        self.amps.iter_mut().for_each(|a| *a /= norm);
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|²`; insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::invalid(format!("qubit {q} out of range for n = {}", self.n)));
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, g: &SingleQubitGate, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        let bit = 1usize << q;
        let m = &g.m;
        // iterate over indices with bit q clear, in blocks of `bit`
        for base in (0..self.amps.len()).step_by(bit << 1) {
            for i in base..base + bit {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        Ok(())
    }

    pub fn apply_cz(&mut self, q1: usize, q2: usize) -> Result<()> {
        self.check_qubit(q1)?;
        self.check_qubit(q2)?;
        if q1 == q2 {
            return Err(Error::invalid(format!("CZ needs two distinct qubits, got {q1} twice")));
        }
        let mask = (1usize << q1) | (1usize << q2);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *a = -*a;
            }
        }
        Ok(())
    }

    /// CZ on every edge, in one pass over the amplitudes.
    pub fn apply_cz_layer(&mut self, t: &Topology) -> Result<()> {
        if t.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: t.n(),
            });
        }
        let masks: Vec<usize> = t.edges().iter().map(|&(a, b)| (1 << a) | (1 << b)).collect();
        for (i, a) in self.amps.iter_mut().enumerate() {
            let odd = masks.iter().filter(|&&m| i & m == m).count() & 1 == 1;
            if odd {
                *a = -*a;
            }
        }
        Ok(())
    }

    /// Expectation values `(⟨X_q⟩, ⟨Y_q⟩, ⟨Z_q⟩)`.
    pub fn bloch_vector(&self, q: usize) -> [f64; 3] {
        let bit = 1usize << q;
        let (mut off, mut z) = (C64::new(0.0, 0.0), 0.0);
        for i in (0..self.amps.len()).filter(|i| i & bit == 0) {
            let (a0, a1) = (self.amps[i], self.amps[i | bit]);
            off += a0.conj() * a1;
            z += a0.norm_sqr() - a1.norm_sqr();
        }
        [2.0 * off.re, 2.0 * off.im, z]
    }

    /// Squared Pauli coefficients of `|ψ⟩⟨ψ|`, normalised to a probability
    /// vector over `{0,x,y,z}^n` (index as [`crate::pauli::PauliString`]):
    /// entry ν is `⟨ψ|P_ν|ψ⟩² / 2^n`.
    pub fn pauli_sq_coefficients(&self) -> Result<Vec<f64>> {
        self.pauli_sq_coefficients_with_limit(DEFAULT_PAULI_LIMIT)
    }

    pub fn pauli_sq_coefficients_with_limit(&self, max_qubits: usize) -> Result<Vec<f64>> {
        if self.n > max_qubits {
            return Err(Error::Capacity {
                what: "Pauli coefficient vector (qubits)",
                requested: self.n,
                limit: max_qubits,
            });
        }
        let n = self.n;
        let dim = self.amps.len();
        let scale = 1.0 / dim as f64;
        let mut out = vec![0.0; dim * dim];
        let mut g = vec![C64::new(0.0, 0.0); dim];
        for xmask in 0..dim {
            // g_i = conj(a_{i^x}) a_i; its Walsh-Hadamard transform over z
            // gives <ψ|X^x Z^z|ψ> for every z-mask at once.
            for (i, gi) in g.iter_mut().enumerate() {
                *gi = self.amps[i ^ xmask].conj() * self.amps[i];
            }
            walsh_hadamard(&mut g);
            for (zmask, gz) in g.iter().enumerate() {
                let mut index = 0usize;
                for q in (0..n).rev() {
                    let xb = (xmask >> q) & 1;
                    let zb = (zmask >> q) & 1;
                    let label = match (xb, zb) {
                        (0, 0) => Pauli::I,
                        (1, 0) => Pauli::X,
                        (1, 1) => Pauli::Y,
                        _ => Pauli::Z,
                    };
                    index = (index << 2) | label.digit();
                }
                out[index] = gz.norm_sqr() * scale;
            }
        }
        Ok(out)
    }
}

fn walsh_hadamard(v: &mut [C64]) {
    let mut h = 1;
    while h < v.len() {
        for base in (0..v.len()).step_by(h << 1) {
            for i in base..base + h {
                let (a, b) = (v[i], v[i + h]);
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h <<= 1;
    }
}
