//! Single-qubit gates and the random ensembles they are drawn from.
//!
//! Rotation convention used everywhere: `Z(θ) = diag(1, e^{-iθ})` and
//! `X(θ) = H Z(θ) H`. With this sign, measuring a cluster qubit at angle `θ`
//! in the basis `(|0⟩ ± e^{iθ}|1⟩)/√2` teleports the state through `H Z(θ)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// A 2×2 unitary, row-major.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SingleQubitGate {
    pub m: [[C64; 2]; 2],
}

impl SingleQubitGate {
    pub const fn new(m: [[C64; 2]; 2]) -> Self {
        SingleQubitGate { m }
    }

    pub fn identity() -> Self {
        Self::new([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn hadamard() -> Self {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        Self::new([[h, h], [h, -h]])
    }

    pub fn pauli_x() -> Self {
        Self::new([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn pauli_y() -> Self {
        let i = C64::new(0.0, 1.0);
        Self::new([[ZERO, -i], [i, ZERO]])
    }

    pub fn pauli_z() -> Self {
        Self::new([[ONE, ZERO], [ZERO, -ONE]])
    }

    /// `diag(1, e^{-iθ})`.
    pub fn z_rot(theta: f64) -> Self {
        Self::new([[ONE, ZERO], [ZERO, C64::from_polar(1.0, -theta)]])
    }

    /// `H Z(θ) H`.
    pub fn x_rot(theta: f64) -> Self {
        let h = Self::hadamard();
        h * Self::z_rot(theta) * h
    }

    /// `H Z(α)`: the gate a single cluster-wire step implements.
    pub fn hz(alpha: f64) -> Self {
        Self::hadamard() * Self::z_rot(alpha)
    }

    /// `H Z(third) X(second) Z(first)`: three consecutive wire steps with
    /// angles given in measurement order.
    pub fn euler_wire(first: f64, second: f64, third: f64) -> Self {
        Self::hz(third) * Self::hz(second) * Self::hz(first)
    }

    pub fn dagger(&self) -> Self {
        let m = &self.m;
        Self::new([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let p = self.dagger() * *self;
        (p.m[0][0] - ONE).norm() <= tol
            && (p.m[1][1] - ONE).norm() <= tol
            && p.m[0][1].norm() <= tol
            && p.m[1][0].norm() <= tol
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.m[0][1].norm() <= tol && self.m[1][0].norm() <= tol
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// Bloch rotation `x[a][b]` with `U σ_a U† = Σ_b x[a][b] σ_b`, indices
    /// ordered `(x, y, z)`.
    pub fn bloch_rotation(&self) -> [[f64; 3]; 3] {
        let paulis = [Self::pauli_x(), Self::pauli_y(), Self::pauli_z()];
        let udag = self.dagger();
        let mut x = [[0.0; 3]; 3];
        for (a, sa) in paulis.iter().enumerate() {
            let img = *self * *sa * udag;
            for (b, sb) in paulis.iter().enumerate() {
                // (1/2) Tr(σ_b · img)
                let prod = *sb * img;
                x[a][b] = 0.5 * (prod.m[0][0] + prod.m[1][1]).re;
            }
        }
        x
    }
}

impl std::ops::Mul for SingleQubitGate {
    type Output = SingleQubitGate;

    fn mul(self, rhs: SingleQubitGate) -> SingleQubitGate {
        let (a, b) = (&self.m, &rhs.m);
        let mut m = [[ZERO; 2]; 2];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        SingleQubitGate { m }
    }
}

/// Haar-random element of SU(2) from a normalised Gaussian quaternion.
pub fn sample_haar_su2<R: Rng + ?Sized>(rng: &mut R) -> SingleQubitGate {
    let mut q = [0.0f64; 4];
    let norm = loop {
        for v in q.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let norm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-300 {
            break norm;
        }
    };
    let [a, b, c, d] = q.map(|v| v / norm);
    let alpha = C64::new(a, d);
    let beta = C64::new(c, b);
    SingleQubitGate::new([[alpha, -beta.conj()], [beta, alpha.conj()]])
}

/// Distribution over single-qubit gates.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum GateEnsemble {
    /// Haar measure on SU(2).
    Haar,
    /// `H Z(α)`, α uniform: maps the z-axis into the transverse plane.
    Hz,
    /// `Z(α)`, α uniform: leaves the z-axis invariant.
    ZRotation,
    /// With probability `c` a z-rotation, otherwise an `H Z(α)` gate.
    Mixture(f64),
}

impl GateEnsemble {
    pub fn mixture(c: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::invalid(format!("mixture weight c = {c} is outside [0, 1]")));
        }
        Ok(GateEnsemble::Mixture(c))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SingleQubitGate {
        sample_from_ensemble(self, rng)
    }

    /// The z-invariance parameter `c` of the reduced local block.
    pub fn z_invariance(&self) -> f64 {
        match *self {
            GateEnsemble::Haar => 1.0 / 3.0,
            GateEnsemble::Hz => 0.0,
            GateEnsemble::ZRotation => 1.0,
            GateEnsemble::Mixture(c) => c,
        }
    }
}

impl fmt::Display for GateEnsemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateEnsemble::Haar => f.write_str("haar"),
            GateEnsemble::Hz => f.write_str("hz"),
            GateEnsemble::ZRotation => f.write_str("zrot"),
            GateEnsemble::Mixture(c) => write!(f, "mixture({c})"),
        }
    }
}

pub fn sample_from_ensemble<R: Rng + ?Sized>(e: &GateEnsemble, rng: &mut R) -> SingleQubitGate {
    match *e {
        GateEnsemble::Haar => sample_haar_su2(rng),
        GateEnsemble::Hz => SingleQubitGate::hz(rng.random_range(0.0..TAU)),
        GateEnsemble::ZRotation => SingleQubitGate::z_rot(rng.random_range(0.0..TAU)),
        GateEnsemble::Mixture(c) => {
            // one uniform for the branch, one for the angle
            let z_branch = rng.random::<f64>() < c;
            let alpha = rng.random_range(0.0..TAU);
            if z_branch {
                SingleQubitGate::z_rot(alpha)
            } else {
                SingleQubitGate::hz(alpha)
            }
        }
    }
}

/// Middle Euler angle of a Haar-random `Z X Z` decomposition: density
/// `sin(β)/2` on `[0, π]`.
pub fn sample_euler_polar<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    (1.0 - 2.0 * u).clamp(-1.0, 1.0).acos().min(PI)
}
