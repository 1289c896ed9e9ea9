use nalgebra::DMatrix;

use super::rotation::{AveragedRotation, Space};
use crate::circuit::LayerOrder;
use crate::pauli::{cz_permutation_full, cz_permutation_reduced, Topology};
use crate::{Error, Result};

/// Largest alphabet size `k^n` a chain may have by default.
pub const DEFAULT_MAX_STATES: usize = 1 << 26;

/// One iteration `M = P_cz · R̄^{⊗n}` (or `R̄^{⊗n} · P_cz`), applied
/// site by site. With the identity removed the all-identity string is
/// dropped; it is absorbing and unreachable, so the rest stays stochastic.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    n: usize,
    rotation: AveragedRotation,
    topology: Topology,
    order: LayerOrder,
    remove_identity: bool,
    perm: Vec<u32>,
}

/// Builds the chain for `n` sites; the alphabet follows the rotation's space.
pub fn build_chain(n: usize, rotation: &AveragedRotation, t: &Topology, remove_identity: bool) -> Result<TransitionMatrix> {
    TransitionMatrix::new(n, rotation, t, remove_identity, LayerOrder::default(), DEFAULT_MAX_STATES)
}

impl TransitionMatrix {
    pub fn new(
        n: usize,
        rotation: &AveragedRotation,
        t: &Topology,
        remove_identity: bool,
        order: LayerOrder,
        max_states: usize,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("chain needs at least one site"));
        }
        if t.n() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: t.n() });
        }
        let space = rotation.space();
        let states = checked_pow(space.local_dim(), n).filter(|&s| s <= max_states).ok_or(Error::Capacity {
            what: "chain states",
            requested: checked_pow(space.local_dim(), n).unwrap_or(usize::MAX),
            limit: max_states,
        })?;
        let perm = match space {
            Space::Full => cz_permutation_full(t),
            Space::Reduced => cz_permutation_reduced(t),
        };
        debug_assert_eq!(perm.len(), states);
        Ok(TransitionMatrix {
            n,
            rotation: rotation.clone(),
            topology: t.clone(),
            order,
            remove_identity,
            perm: perm.into_iter().map(|p| p as u32).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> Space {
        self.rotation.space()
    }

    pub fn rotation(&self) -> &AveragedRotation {
        &self.rotation
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn order(&self) -> LayerOrder {
        self.order
    }

    pub fn identity_removed(&self) -> bool {
        self.remove_identity
    }

    /// `c` of the local block.
    pub fn c(&self) -> f64 {
        self.rotation.z_invariance()
    }

    /// Number of strings including the identity.
    pub fn states(&self) -> usize {
        self.perm.len()
    }

    pub fn dim(&self) -> usize {
        self.states() - usize::from(self.remove_identity)
    }

    /// `M x`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.apply_into(x, &mut out)?;
        Ok(out)
    }

    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let dim = self.dim();
        if x.len() != dim || out.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: if x.len() != dim { x.len() } else { out.len() },
            });
        }
        let off = usize::from(self.remove_identity);
        let mut buf = vec![0.0; self.states()];
        buf[off..].copy_from_slice(x);
        match self.order {
            LayerOrder::LocalThenCz => {
                self.local_layer(&mut buf);
                let mut permuted = vec![0.0; buf.len()];
                self.permute(&buf, &mut permuted);
                out.copy_from_slice(&permuted[off..]);
            }
            LayerOrder::CzThenLocal => {
                let mut permuted = vec![0.0; buf.len()];
                self.permute(&buf, &mut permuted);
                self.local_layer(&mut permuted);
                out.copy_from_slice(&permuted[off..]);
            }
        }
        Ok(())
    }

    fn permute(&self, src: &[f64], dst: &mut [f64]) {
        for (i, &p) in self.perm.iter().enumerate() {
            dst[p as usize] = src[i];
        }
    }

    fn local_layer(&self, buf: &mut [f64]) {
        match self.space() {
            Space::Full => local_layer_k::<4>(buf, self.n, &block::<4>(&self.rotation)),
            Space::Reduced => local_layer_k::<3>(buf, self.n, &block::<3>(&self.rotation)),
        }
    }

    /// Explicit sparse form, rows and columns in chain order.
    pub fn to_csc(&self) -> Result<CscMatrix> {
        let k = self.space().local_dim();
        let states = self.states();
        let off = usize::from(self.remove_identity);
        let dim = self.dim();
        // per digit: nonzero (target digit, value) of the kernel column
        let cols: Vec<Vec<(usize, f64)>> = (0..k)
            .map(|s| (0..k).filter_map(|t| Some((t, self.rotation.get(t, s))).filter(|e| e.1 != 0.0)).collect())
            .collect();
        let max_col = cols.iter().map(Vec::len).max().unwrap_or(0);
        let bound = states.saturating_mul(max_col.pow(self.n as u32));
        if bound > 1 << 30 {
            return Err(Error::Capacity {
                what: "explicit transition matrix nonzeros",
                requested: bound,
                limit: 1 << 30,
            });
        }
        let mut col_ptr = Vec::with_capacity(dim + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        let mut entries: Vec<(usize, f64)> = Vec::new();
        let mut digits = vec![0usize; self.n];
        for src in off..states {
            let local_src = match self.order {
                LayerOrder::LocalThenCz => src,
                LayerOrder::CzThenLocal => self.perm[src] as usize,
            };
            let mut rest = local_src;
            for d in digits.iter_mut() {
                *d = rest % k;
                rest /= k;
            }
            entries.clear();
            entries.push((0, 1.0));
            let mut place = 1;
            for &d in &digits {
                let mut next = Vec::with_capacity(entries.len() * cols[d].len());
                for &(idx, v) in &entries {
                    for &(t, w) in &cols[d] {
                        next.push((idx + t * place, v * w));
                    }
                }
                entries = next;
                place *= k;
            }
            if self.order == LayerOrder::LocalThenCz {
                for e in entries.iter_mut() {
                    e.0 = self.perm[e.0] as usize;
                }
            }
            entries.sort_unstable_by_key(|e| e.0);
            for &(r, v) in &entries {
                if r < off {
                    continue;
                }
                row_idx.push(r - off);
                values.push(v);
            }
            col_ptr.push(row_idx.len());
        }
        Ok(CscMatrix {
            rows: dim,
            cols: dim,
            col_ptr,
            row_idx,
            values,
        })
    }

    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        if self.dim() > 20_000 {
            return Err(Error::Capacity {
                what: "dense transition matrix dimension",
                requested: self.dim(),
                limit: 20_000,
            });
        }
        Ok(self.to_csc()?.to_dense())
    }
}

fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    base.checked_pow(u32::try_from(exp).ok()?)
}

fn block<const K: usize>(r: &AveragedRotation) -> [[f64; K]; K] {
    let mut b = [[0.0; K]; K];
    for (t, row) in b.iter_mut().enumerate() {
        for (s, v) in row.iter_mut().enumerate() {
            *v = r.get(t, s);
        }
    }
    b
}

fn local_layer_k<const K: usize>(buf: &mut [f64], n: usize, r: &[[f64; K]; K]) {
    let mut stride = 1;
    for _ in 0..n {
        for chunk in buf.chunks_mut(stride * K) {
            for j in 0..stride {
                let mut v = [0.0; K];
                for (s, vs) in v.iter_mut().enumerate() {
                    *vs = chunk[s * stride + j];
                }
                for (t, row) in r.iter().enumerate() {
                    chunk[t * stride + j] = row.iter().zip(&v).map(|(a, b)| a * b).sum();
                }
            }
        }
        stride *= K;
    }
}

/// Compressed sparse columns.
#[derive(Clone, Debug, PartialEq)]
pub struct CscMatrix {
    pub rows: usize,
    pub cols: usize,
    pub col_ptr: Vec<usize>,
    pub row_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CscMatrix {
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(row, column, value)` in column-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.cols).flat_map(move |c| {
            (self.col_ptr[c]..self.col_ptr[c + 1]).map(move |i| (self.row_idx[i], c, self.values[i]))
        })
    }

    pub fn from_triplets(rows: usize, cols: usize, mut t: Vec<(usize, usize, f64)>) -> Result<Self> {
        if let Some(&(r, c, _)) = t.iter().find(|e| e.0 >= rows || e.1 >= cols) {
            return Err(Error::invalid(format!("entry ({r}, {c}) outside {rows}x{cols}")));
        }
        t.sort_unstable_by_key(|e| (e.1, e.0));
        let mut col_ptr = vec![0; cols + 1];
        for e in &t {
            col_ptr[e.1 + 1] += 1;
        }
        for c in 0..cols {
            col_ptr[c + 1] += col_ptr[c];
        }
        Ok(CscMatrix {
            rows,
            cols,
            col_ptr,
            row_idx: t.iter().map(|e| e.0).collect(),
            values: t.iter().map(|e| e.2).collect(),
        })
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|c| self.values[self.col_ptr[c]..self.col_ptr[c + 1]].iter().sum())
            .collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        for (r, c, v) in self.triplets() {
            y[r] += v * x[c];
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] += v;
        }
        m
    }
}

/// A probability vector over a chain's strings.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainDistribution {
    pub n: usize,
    pub space: Space,
    pub identity_removed: bool,
    pub probs: Vec<f64>,
}

impl ChainDistribution {
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    fn check_matches(&self, m: &TransitionMatrix) -> Result<()> {
        if self.space != m.space() || self.identity_removed != m.identity_removed() || self.probs.len() != m.dim() {
            return Err(Error::DimensionMismatch {
                expected: m.dim(),
                actual: self.probs.len(),
            });
        }
        Ok(())
    }

    /// `ℓ` applications of `m`; `out[0]` is `self`. Stops with
    /// [`Error::Drift`] if the total mass moves by more than `1e-9`.
    pub fn evolve(&self, m: &TransitionMatrix, steps: usize) -> Result<Vec<ChainDistribution>> {
        let mut out = vec![self.clone()];
        self.evolve_with(m, steps, |_, p| {
            out.push(ChainDistribution { probs: p.to_vec(), ..self.clone() });
            Ok(())
        })?;
        Ok(out)
    }

    /// Like [`ChainDistribution::evolve`] but hands each iterate
    /// (`ℓ = 0..=steps`) to `f` instead of storing it; returns the last.
    pub fn evolve_with<F>(&self, m: &TransitionMatrix, steps: usize, mut f: F) -> Result<ChainDistribution>
    where
        F: FnMut(usize, &[f64]) -> Result<()>,
    {
        self.check_matches(m)?;
        let start = self.total();
        let mut cur = self.probs.clone();
        let mut next = vec![0.0; cur.len()];
        for step in 1..=steps {
            m.apply_into(&cur, &mut next)?;
            std::mem::swap(&mut cur, &mut next);
            let drift = (cur.iter().sum::<f64>() - start).abs();
            if drift > 1e-9 {
                return Err(Error::Drift { step, drift });
            }
            f(step, &cur)?;
        }
        Ok(ChainDistribution { probs: cur, ..self.clone() })
    }
}

/// `evolve_distribution(m, d, ℓ)`: the trajectory `d, Md, …, M^ℓ d`.
pub fn evolve_distribution(m: &TransitionMatrix, d: &ChainDistribution, steps: usize) -> Result<Vec<ChainDistribution>> {
    d.evolve(m, steps)
}

fn digits_of(mut i: usize, k: usize, n: usize) -> impl Iterator<Item = usize> {
    (0..n).map(move |_| {
        let d = i % k;
        i /= k;
        d
    })
}

/// `2^{#ξ}`: the number of full strings in each reduced class.
pub fn multiplicities(n: usize) -> Vec<f64> {
    (0..3usize.pow(n as u32))
        .map(|i| 2f64.powi(digits_of(i, 3, n).filter(|&d| d == 2).count() as i32))
        .collect()
}

fn in_zero_z(i: usize, space: Space, n: usize) -> bool {
    let z = match space {
        Space::Full => 3,
        Space::Reduced => 1,
    };
    digits_of(i, space.local_dim(), n).all(|d| d == 0 || d == z)
}

/// The `|0…0⟩` start: mass `2^{-n}` on every string over `{0, z}`. With
/// the identity removed the rest is renormalized.
pub fn initial_distribution(n: usize, space: Space, remove_identity: bool) -> ChainDistribution {
    let states = space.local_dim().pow(n as u32);
    let w = 0.5f64.powi(n as i32);
    let mut probs: Vec<f64> = (0..states).map(|i| if in_zero_z(i, space, n) { w } else { 0.0 }).collect();
    if remove_identity {
        probs.remove(0);
        let scale = 1.0 / (1.0 - w);
        probs.iter_mut().for_each(|p| *p *= scale);
    }
    ChainDistribution {
        n,
        space,
        identity_removed: remove_identity,
        probs,
    }
}

/// Uniform over the non-identity full strings (reduced: proportional to
/// multiplicity). With the identity kept it retains its conserved `2^{-n}`.
pub fn stationary_distribution(n: usize, space: Space, remove_identity: bool) -> ChainDistribution {
    let four_n = 4f64.powi(n as i32);
    let mut probs: Vec<f64> = match space {
        Space::Full => vec![1.0 / (four_n - 1.0); 4usize.pow(n as u32)],
        Space::Reduced => multiplicities(n).into_iter().map(|m| m / (four_n - 1.0)).collect(),
    };
    if remove_identity {
        probs.remove(0);
    } else {
        let w = 0.5f64.powi(n as i32);
        probs.iter_mut().for_each(|p| *p *= 1.0 - w);
        probs[0] = w;
    }
    ChainDistribution {
        n,
        space,
        identity_removed: remove_identity,
        probs,
    }
}

/// Sums a full-space distribution over each reduced class.
pub fn lump_to_reduced(d: &ChainDistribution) -> Result<ChainDistribution> {
    if d.space != Space::Full {
        return Err(Error::invalid("distribution is already reduced"));
    }
    let n = d.n;
    let off = usize::from(d.identity_removed);
    let mut out = vec![0.0; 3usize.pow(n as u32)];
    for (j, p) in d.probs.iter().enumerate() {
        let i = j + off;
        let mut r = 0;
        let mut place = 1;
        for dgt in digits_of(i, 4, n) {
            r += place * [0, 2, 2, 1][dgt];
            place *= 3;
        }
        out[r] += p;
    }
    if d.identity_removed {
        out.remove(0);
    }
    Ok(ChainDistribution {
        n,
        space: Space::Reduced,
        identity_removed: d.identity_removed,
        probs: out,
    })
}
