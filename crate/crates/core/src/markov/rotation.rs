use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::gates::{GateEnsemble, SingleQubitGate};
use crate::{Error, Result};

/// Which alphabet a chain lives on.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    /// `{0, x, y, z}`, digits 0..4.
    Full,
    /// `{0, z, ξ}`, digits 0..3.
    Reduced,
}

impl Space {
    pub fn local_dim(self) -> usize {
        match self {
            Space::Full => 4,
            Space::Reduced => 3,
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::Full => "full",
            Space::Reduced => "reduced",
        })
    }
}

impl FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Space::Full),
            "reduced" => Ok(Space::Reduced),
            other => Err(Error::invalid(format!("unknown space '{other}'"))),
        }
    }
}

/// Single-site transition block, column-stochastic: `get(target, source)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AveragedRotation {
    space: Space,
    m: Vec<f64>,
}

impl AveragedRotation {
    /// `rows[target][source]`; columns must sum to 1 and entries be ≥ 0.
    pub fn from_rows(space: Space, rows: &[Vec<f64>]) -> Result<Self> {
        let k = space.local_dim();
        if rows.len() != k || rows.iter().any(|r| r.len() != k) {
            return Err(Error::DimensionMismatch { expected: k, actual: rows.len() });
        }
        let m: Vec<f64> = rows.iter().flatten().copied().collect();
        let r = AveragedRotation { space, m };
        r.validate()?;
        Ok(r)
    }

    fn validate(&self) -> Result<()> {
        let k = self.dim();
        if let Some(v) = self.m.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::NotMarkovian(format!("entry {v} is negative")));
        }
        for s in 0..k {
            let sum: f64 = (0..k).map(|t| self.get(t, s)).sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::NotMarkovian(format!("column {s} sums to {sum}")));
            }
        }
        if self.get(0, 0) != 1.0 {
            return Err(Error::NotMarkovian("identity label is not fixed".into()));
        }
        Ok(())
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.local_dim()
    }

    pub fn get(&self, target: usize, source: usize) -> f64 {
        self.m[target * self.dim() + source]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.m
    }

    pub fn max_abs_diff(&self, other: &AveragedRotation) -> f64 {
        if self.space != other.space {
            return f64::INFINITY;
        }
        self.m.iter().zip(&other.m).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// `c = P(z → z)` for rotations that lump onto the reduced alphabet.
    pub fn z_invariance(&self) -> f64 {
        match self.space {
            Space::Full => self.get(3, 3),
            Space::Reduced => self.get(1, 1),
        }
    }
}

fn full_from_block(block: [[f64; 3]; 3]) -> AveragedRotation {
    // block[target][source] over (x, y, z)
    let mut m = vec![0.0; 16];
    m[0] = 1.0;
    for t in 0..3 {
        for s in 0..3 {
            m[(t + 1) * 4 + s + 1] = block[t][s];
        }
    }
    AveragedRotation { space: Space::Full, m }
}

/// Closed-form 4×4 average for the built-in ensembles.
pub fn averaged_rotation(e: &GateEnsemble) -> Result<AveragedRotation> {
    let third = 1.0 / 3.0;
    let hz = [[0.0, 0.0, 1.0], [0.5, 0.5, 0.0], [0.5, 0.5, 0.0]];
    let zrot = [[0.5, 0.5, 0.0], [0.5, 0.5, 0.0], [0.0, 0.0, 1.0]];
    let block = match *e {
        GateEnsemble::Haar => [[third; 3]; 3],
        GateEnsemble::Hz => hz,
        GateEnsemble::ZRotation => zrot,
        GateEnsemble::Mixture(c) => {
            GateEnsemble::mixture(c)?;
            let mut b = [[0.0; 3]; 3];
            for t in 0..3 {
                for s in 0..3 {
                    b[t][s] = c * zrot[t][s] + (1.0 - c) * hz[t][s];
                }
            }
            b
        }
    };
    Ok(full_from_block(block))
}

/// Monte-Carlo estimate of the 4×4 average for a built-in ensemble.
pub fn averaged_rotation_mc<R: Rng + ?Sized>(e: &GateEnsemble, samples: usize, rng: &mut R) -> Result<AveragedRotation> {
    averaged_rotation_sampled(|r: &mut R| e.sample(r), samples, rng)
}

/// Monte-Carlo estimate of the 4×4 average of any gate sampler.
///
/// Fails with [`Error::NotMarkovian`] when some cross term `E[x_ab x_a'b]`
/// or `E[x_ab x_ac]` sits more than 5 standard errors away from zero: the
/// squared coefficients then do not evolve as a Markov chain.
pub fn averaged_rotation_sampled<R, F>(mut sampler: F, samples: usize, rng: &mut R) -> Result<AveragedRotation>
where
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> SingleQubitGate,
{
    if samples < 2 {
        return Err(Error::invalid("need at least two samples"));
    }
    // 9 squares, then 9 column cross terms, then 9 row cross terms
    let mut sum = [0.0f64; 27];
    let mut sum_sq = [0.0f64; 27];
    let pairs = [(0, 1), (0, 2), (1, 2)];
    for _ in 0..samples {
        let x = sampler(rng).bloch_rotation();
        let mut vals = [0.0f64; 27];
        for a in 0..3 {
            for b in 0..3 {
                vals[3 * a + b] = x[a][b] * x[a][b];
            }
        }
        for (p, &(i, j)) in pairs.iter().enumerate() {
            for k in 0..3 {
                vals[9 + 3 * p + k] = x[i][k] * x[j][k];
                vals[18 + 3 * p + k] = x[k][i] * x[k][j];
            }
        }
        for (i, v) in vals.iter().enumerate() {
            sum[i] += v;
            sum_sq[i] += v * v;
        }
    }
    let k = samples as f64;
    for i in 9..27 {
        let mean = sum[i] / k;
        let var = (sum_sq[i] / k - mean * mean).max(0.0) * k / (k - 1.0);
        let se = (var / k).sqrt();
        if mean.abs() > 5.0 * se && mean.abs() > 1e-12 {
            return Err(Error::NotMarkovian(format!(
                "cross term has mean {mean:.3e} with standard error {se:.3e}"
            )));
        }
    }
    let mut block = [[0.0; 3]; 3];
    for (a, row) in x_rows(&sum, k).iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            // source a goes to target b
            block[b][a] = *v;
        }
    }
    // renormalize columns against rounding; each row of x is a unit vector
    for s in 0..3 {
        let col: f64 = (0..3).map(|t| block[t][s]).sum();
        for row in block.iter_mut() {
            row[s] /= col;
        }
    }
    Ok(full_from_block(block))
}

fn x_rows(sum: &[f64; 27], k: f64) -> [[f64; 3]; 3] {
    let mut r = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            r[a][b] = sum[3 * a + b] / k;
        }
    }
    r
}

/// `R(c)` over `(0, z, ξ)`: rows `(1, 0, 0)`, `(0, c, (1-c)/2)`,
/// `(0, 1-c, (1+c)/2)`.
pub fn reduced_rotation(c: f64) -> Result<AveragedRotation> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::invalid(format!("c = {c} is outside [0, 1]")));
    }
    Ok(AveragedRotation {
        space: Space::Reduced,
        m: vec![1.0, 0.0, 0.0, 0.0, c, (1.0 - c) / 2.0, 0.0, 1.0 - c, (1.0 + c) / 2.0],
    })
}

/// Lumps `x` and `y` into `ξ`. Requires `x` and `y` to send the same mass
/// to the identity, to `z` and to `{x, y}`.
pub fn reduce_rotation(full: &AveragedRotation) -> Result<AveragedRotation> {
    if full.space != Space::Full {
        return Err(Error::invalid("rotation is already reduced"));
    }
    const TOL: f64 = 1e-12;
    let (x, y, z) = (1, 2, 3);
    let checks = [
        ("z mass from x and y", full.get(z, x), full.get(z, y)),
        ("identity mass from x and y", full.get(0, x), full.get(0, y)),
        (
            "xi mass from x and y",
            full.get(x, x) + full.get(y, x),
            full.get(x, y) + full.get(y, y),
        ),
    ];
    for (what, a, b) in checks {
        if (a - b).abs() > TOL {
            return Err(Error::NotLumpable(format!("{what} differ: {a} vs {b}")));
        }
    }
    if full.get(0, z) > TOL || full.get(0, x) > TOL {
        return Err(Error::NotLumpable("non-identity labels reach the identity".into()));
    }
    let zz = full.get(z, z);
    let xi_z = full.get(x, z) + full.get(y, z);
    let z_xi = full.get(z, x);
    let xi_xi = full.get(x, x) + full.get(y, x);
    Ok(AveragedRotation {
        space: Space::Reduced,
        m: vec![1.0, 0.0, 0.0, 0.0, zz, z_xi, 0.0, xi_z, xi_xi],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::master_rng;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn closed_forms_match_monte_carlo() {
        let mut rng = master_rng(17);
        for e in [GateEnsemble::Haar, GateEnsemble::Hz, GateEnsemble::ZRotation, GateEnsemble::Mixture(0.4)] {
            let exact = averaged_rotation(&e).unwrap();
            let mc = averaged_rotation_mc(&e, 200_000, &mut rng).unwrap();
            assert!(exact.max_abs_diff(&mc) < 6e-3, "{e}: {}", exact.max_abs_diff(&mc));
        }
    }

    #[test]
    fn hz_block() {
        let r = averaged_rotation(&GateEnsemble::Hz).unwrap();
        let (x, y, z) = (1, 2, 3);
        assert_eq!(r.get(x, z), 1.0);
        assert_eq!((r.get(y, x), r.get(z, x)), (0.5, 0.5));
        assert_eq!((r.get(y, y), r.get(z, y)), (0.5, 0.5));
    }

    #[test]
    fn reduced_examples() {
        let r1 = reduced_rotation(1.0).unwrap();
        assert_eq!(r1.entries(), &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let r0 = reduced_rotation(0.0).unwrap();
        assert_eq!(r0.entries(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0, 1.0, 0.5]);
        let r3 = reduced_rotation(1.0 / 3.0).unwrap();
        assert_eq!(r3.get(1, 1), 1.0 / 3.0);
        assert!((r3.get(2, 2) - 2.0 / 3.0).abs() < 1e-15);
        assert!(reduced_rotation(1.5).is_err());
    }

    #[test]
    fn lumping() {
        let h = reduce_rotation(&averaged_rotation(&GateEnsemble::Haar).unwrap()).unwrap();
        assert!(h.max_abs_diff(&reduced_rotation(1.0 / 3.0).unwrap()) < 1e-15);
        let z = reduce_rotation(&averaged_rotation(&GateEnsemble::Hz).unwrap()).unwrap();
        assert!(z.max_abs_diff(&reduced_rotation(0.0).unwrap()) < 1e-15);
        for c in [0.0, 0.25, 0.5, 1.0] {
            let m = reduce_rotation(&averaged_rotation(&GateEnsemble::Mixture(c)).unwrap()).unwrap();
            assert!(m.max_abs_diff(&reduced_rotation(c).unwrap()) < 1e-15);
        }
    }

    #[test]
    fn asymmetric_block_is_not_lumpable() {
        // x and y send different mass to z
        let rows = vec![
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.5, 0.0, 0.0],
            vec![0.0, 0.0, 0.8, 1.0],
            vec![0.0, 0.5, 0.2, 0.0],
        ];
        let r = AveragedRotation::from_rows(Space::Full, &rows).unwrap();
        assert!(matches!(reduce_rotation(&r), Err(Error::NotLumpable(_))));
    }

    #[test]
    fn biased_rotations_are_rejected() {
        let mut rng = master_rng(5);
        let r = averaged_rotation_sampled(|r| SingleQubitGate::z_rot(r.random_range(0.0..FRAC_PI_4)), 20_000, &mut rng);
        assert!(matches!(r, Err(Error::NotMarkovian(_))));
    }
}
