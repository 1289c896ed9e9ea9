use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::chain::{initial_distribution, stationary_distribution, TransitionMatrix};
use super::rotation::{reduced_rotation, Space};
use crate::gates::C64;
use crate::pauli::Topology;
use crate::{Error, Result};

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum GapMethod {
    /// Dense eigensolve with an explicit relevance test.
    Dense,
    /// Arnoldi iteration started from the physical initial condition.
    Iterative,
    /// Dense up to 728 states, iterative above.
    #[default]
    Auto,
}

impl fmt::Display for GapMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GapMethod::Dense => "dense",
            GapMethod::Iterative => "iterative",
            GapMethod::Auto => "auto",
        })
    }
}

impl FromStr for GapMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(GapMethod::Dense),
            "iterative" => Ok(GapMethod::Iterative),
            "auto" => Ok(GapMethod::Auto),
            other => Err(Error::invalid(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Copy, Clone, Debug)]
pub struct GapOptions {
    pub method: GapMethod,
    /// Matrix-vector products allowed to the iterative method.
    pub max_iterations: usize,
    /// Relative change of the leading Ritz value accepted as converged.
    pub tolerance: f64,
    /// Krylov basis size before a restart.
    pub krylov_dim: usize,
    /// Minimum normalized pairing of a left eigenvector with `d₀ - π`.
    pub relevance: f64,
    /// Largest dimension the dense method accepts.
    pub dense_limit: usize,
}

impl Default for GapOptions {
    fn default() -> Self {
        GapOptions {
            method: GapMethod::Auto,
            max_iterations: 100_000,
            tolerance: 1e-10,
            krylov_dim: 60,
            relevance: 1e-8,
            dense_limit: 20_000,
        }
    }
}

impl GapOptions {
    pub fn with_method(method: GapMethod) -> Self {
        GapOptions { method, ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralReport {
    pub n: usize,
    pub c: f64,
    pub space: Space,
    /// Largest eigenvalue modulus.
    pub lambda1: f64,
    /// Largest relevant modulus below `λ₁`'s stationary mode.
    pub lambda2: f64,
    /// The relevant eigenvalue itself, `(re, im)`.
    pub lambda2_value: (f64, f64),
    /// `λ₁ - λ₂`.
    pub gap: f64,
    /// `-ln(1 - Δ)`.
    pub rate: f64,
    pub method: GapMethod,
    /// Matrix-vector products (iterative) or eigenvalues screened (dense).
    pub work: usize,
    pub note: String,
}

/// Gap of the identity-removed reduced chain with `R(c)` on `t`.
pub fn spectral_gap(n: usize, c: f64, t: &Topology, opts: &GapOptions) -> Result<SpectralReport> {
    let m = super::chain::build_chain(n, &reduced_rotation(c)?, t, true)?;
    spectral_gap_of(&m, opts)
}

/// Gap of any identity-removed chain.
pub fn spectral_gap_of(m: &TransitionMatrix, opts: &GapOptions) -> Result<SpectralReport> {
    if !m.identity_removed() {
        return Err(Error::invalid("spectral gap needs the identity removed"));
    }
    let n = m.n();
    let d0 = initial_distribution(n, m.space(), true).probs;
    let pi = stationary_distribution(n, m.space(), true).probs;
    let v: Vec<f64> = d0.iter().zip(&pi).map(|(a, b)| a - b).collect();
    let method = match opts.method {
        GapMethod::Auto if m.dim() <= 728 => GapMethod::Dense,
        GapMethod::Auto => GapMethod::Iterative,
        other => other,
    };
    let (lambda1, l2, work, note) = match method {
        GapMethod::Dense => {
            if m.dim() > opts.dense_limit {
                return Err(Error::Capacity {
                    what: "dense eigensolve dimension",
                    requested: m.dim(),
                    limit: opts.dense_limit,
                });
            }
            dense_relevant(m, &v, opts.relevance)?
        }
        _ => {
            let (l2, work) = arnoldi_relevant(m, &v, &pi, opts)?;
            (1.0, l2, work, "lambda1 = 1 (column-stochastic)".to_string())
        }
    };
    let lambda2 = l2.norm();
    let gap = (lambda1 - lambda2).max(0.0);
    Ok(SpectralReport {
        n,
        c: m.c(),
        space: m.space(),
        lambda1,
        lambda2,
        lambda2_value: (l2.re, l2.im),
        gap,
        rate: if gap > 0.0 { -(1.0 - gap).ln() } else { 0.0 },
        method,
        work,
        note,
    })
}

fn dense_relevant(m: &TransitionMatrix, v: &[f64], threshold: f64) -> Result<(f64, C64, usize, String)> {
    let a = m.to_dense()?;
    let r = relevant_eigenvalue(&a, v, threshold)?;
    let lambda1 = r.lambda1;
    let note = match r.pairing {
        Some(p) => format!("{} larger eigenvalue(s) skipped as irrelevant; pairing {p:.2e}", r.skipped),
        None => "no relevant eigenvalue above 1e-6".into(),
    };
    Ok((lambda1, r.value, r.screened, note))
}

struct Relevant {
    lambda1: f64,
    value: C64,
    screened: usize,
    skipped: usize,
    pairing: Option<f64>,
}

/// Largest-modulus eigenvalue of `a` whose left eigenvector `y` pairs with
/// `v`: `|y·v| / (|y| |v|) > threshold`. Eigenvalues below `1e-6` are not
/// screened.
///
/// The decomposition of `aᵀ` gives every left eigenvector at the cost of the
/// eigenvalues alone. faer's multishift QR is used because these chains are
/// far from normal and carry defective zero eigenvalues, on which nalgebra's
/// unbalanced QR iteration cycles.
fn relevant_eigenvalue(a: &DMatrix<f64>, v: &[f64], threshold: f64) -> Result<Relevant> {
    let dim = a.nrows();
    let at = faer::Mat::<f64>::from_fn(dim, dim, |i, j| a[(j, i)]);
    let evd = at
        .eigen()
        .map_err(|_| Error::NonConvergence { iterations: 0, last_estimate: f64::NAN })?;
    let values = evd.S().column_vector();
    let vectors = evd.U();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&x, &y| values[y].norm().total_cmp(&values[x].norm()));

    let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let lambda1 = order.first().map_or(0.0, |&k| values[k].norm());
    let mut r = Relevant { lambda1, value: C64::new(0.0, 0.0), screened: 0, skipped: 0, pairing: None };
    for &k in &order {
        let lam = values[k];
        if lam.norm() < 1e-6 {
            break;
        }
        // conjugate partners share relevance; test the upper one only
        if lam.im < -1e-12 && order.iter().any(|&j| (values[j] - lam.conj()).norm() < 1e-9) {
            continue;
        }
        r.screened += 1;
        let y = vectors.col(k);
        let dot: C64 = (0..dim).map(|i| y[i] * v[i]).sum();
        let yn = (0..dim).map(|i| y[i].norm_sqr()).sum::<f64>().sqrt();
        let pairing = dot.norm() / (yn * vn);
        if pairing > threshold {
            r.value = lam;
            r.pairing = Some(pairing);
            return Ok(r);
        }
        r.skipped += 1;
    }
    Ok(r)
}

/// Eigenvector of `a` for an eigenvalue close to `lam`.
fn inverse_iteration(a: &DMatrix<C64>, lam: C64, dim: usize) -> Result<DVector<C64>> {
    let shift = lam + C64::new(1e-10, 1e-11) * lam.norm().max(1.0);
    let shifted = a - DMatrix::<C64>::identity(dim, dim) * shift;
    let lu = shifted.lu();
    // deterministic start with no special symmetry
    let mut x = DVector::from_fn(dim, |i, _| C64::new(((i * 7919 + 13) % 997) as f64 / 997.0 - 0.5, ((i * 104729 + 7) % 991) as f64 / 991.0 - 0.5));
    for _ in 0..3 {
        let Some(mut y) = lu.solve(&x) else {
            return Err(Error::NonConvergence { iterations: 0, last_estimate: lam.norm() });
        };
        let norm = y.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NonConvergence { iterations: 0, last_estimate: lam.norm() });
        }
        y /= C64::new(norm, 0.0);
        x = y;
    }
    Ok(x)
}

/// Strings-index permutation for the site reflection `i ↦ n-1-i`, when it
/// maps the topology onto itself.
fn reflection(m: &TransitionMatrix) -> Option<Vec<usize>> {
    let t = m.topology();
    let n = t.n();
    let norm = |(a, b): (usize, usize)| (a.min(b), a.max(b));
    let mut edges: Vec<_> = t.edges().iter().map(|&e| norm(e)).collect();
    let mut mirrored: Vec<_> = t.edges().iter().map(|&(a, b)| norm((n - 1 - a, n - 1 - b))).collect();
    edges.sort_unstable();
    mirrored.sort_unstable();
    if edges != mirrored || n < 2 {
        return None;
    }
    let k = m.space().local_dim();
    let off = usize::from(m.identity_removed());
    Some(
        (off..m.states())
            .map(|i| {
                let mut rest = i;
                let mut image = 0;
                for q in 0..n {
                    image += (rest % k) * k.pow((n - 1 - q) as u32);
                    rest /= k;
                }
                image - off
            })
            .collect(),
    )
}

/// Arnoldi with explicit restarts. Every new Krylov vector has the stationary
/// component removed and, when the topology allows, is symmetrized under
/// site reflection (the initial condition is reflection-symmetric), so modes
/// the initial condition does not excite cannot grow out of rounding noise.
fn arnoldi_relevant(m: &TransitionMatrix, v: &[f64], pi: &[f64], opts: &GapOptions) -> Result<(C64, usize)> {
    let dim = m.dim();
    let kdim = opts.krylov_dim.clamp(4, dim.max(4));
    let refl = reflection(m);
    let clean = |w: &mut Vec<f64>| {
        let s: f64 = w.iter().sum();
        for (x, p) in w.iter_mut().zip(pi) {
            *x -= s * p;
        }
        if let Some(r) = &refl {
            let copy = w.clone();
            for (i, &j) in r.iter().enumerate() {
                w[i] = 0.5 * (copy[i] + copy[j]);
            }
        }
    };

    let mut start = v.to_vec();
    clean(&mut start);
    let mut matvecs = 0;
    let mut last = f64::NAN;
    let mut stable = 0;
    loop {
        let norm = dot(&start, &start).sqrt();
        if norm == 0.0 {
            return Ok((C64::new(0.0, 0.0), matvecs));
        }
        let mut basis: Vec<Vec<f64>> = vec![start.iter().map(|x| x / norm).collect()];
        let mut h = DMatrix::<f64>::zeros(kdim + 1, kdim);
        let mut w = vec![0.0; dim];
        let mut size = kdim;
        for j in 0..kdim {
            m.apply_into(&basis[j], &mut w)?;
            matvecs += 1;
            clean(&mut w);
            for _ in 0..2 {
                for (i, b) in basis.iter().enumerate() {
                    let c = dot(&w, b);
                    h[(i, j)] += c;
                    axpy(&mut w, -c, b);
                }
            }
            let beta = dot(&w, &w).sqrt();
            h[(j + 1, j)] = beta;
            let invariant = beta <= 1e-13 * h.column(j).norm().max(1e-300);
            let check = invariant || j + 1 == kdim || (j + 1) % 5 == 0;
            if check && j >= 1 {
                let top = leading_ritz(&h, j + 1, opts.relevance)?;
                let rel = ((top.norm() - last) / top.norm().max(1e-300)).abs();
                if invariant {
                    return Ok((top, matvecs));
                }
                if rel < opts.tolerance {
                    stable += 1;
                    if stable >= 2 {
                        return Ok((top, matvecs));
                    }
                } else {
                    stable = 0;
                }
                last = top.norm();
            }
            if matvecs >= opts.max_iterations {
                return Err(Error::NonConvergence { iterations: matvecs, last_estimate: last });
            }
            if j + 1 < kdim {
                basis.push(w.iter().map(|x| x / beta).collect());
            } else {
                size = j + 1;
            }
        }
        // restart from the leading Ritz vector (both parts of a complex pair)
        let hk = h.view((0, 0), (size, size)).into_owned();
        let top = leading_ritz(&h, size, opts.relevance)?;
        let hc: DMatrix<C64> = hk.map(|x| C64::new(x, 0.0));
        let s = inverse_iteration(&hc, top, size)?;
        start = vec![0.0; dim];
        for (b, coef) in basis.iter().zip(s.iter()) {
            axpy(&mut start, coef.re + coef.im, b);
        }
        clean(&mut start);
    }
}

/// Leading relevant Ritz value. The start vector is `e1` in the Krylov
/// basis, so the same left-eigenvector pairing as the dense path applies;
/// values seeded only by rounding pair with `e1` at roundoff level.
fn leading_ritz(h: &DMatrix<f64>, size: usize, threshold: f64) -> Result<C64> {
    let hk = h.view((0, 0), (size, size)).into_owned();
    let mut e1 = vec![0.0; size];
    e1[0] = 1.0;
    Ok(relevant_eigenvalue(&hk, &e1, threshold)?.value)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (u, v) in y.iter_mut().zip(x) {
        *u += a * v;
    }
}

#[derive(Clone, Debug)]
pub struct GapScan {
    pub rows: Vec<SpectralReport>,
    pub argmax_c: f64,
    pub max_gap: f64,
    /// `Γ(0)/Γ(1/3)`.
    pub rate_ratio: f64,
}

/// Gaps over a grid of `c`, evaluated in parallel, plus the argmax and
/// `Γ(0)/Γ(1/3)` (computed separately when the grid misses those points).
pub fn gap_scan(n: usize, grid: &[f64], t: &Topology, opts: &GapOptions) -> Result<GapScan> {
    if grid.is_empty() {
        return Err(Error::invalid("empty c grid"));
    }
    let rows = grid
        .par_iter()
        .map(|&c| spectral_gap(n, c, t, opts))
        .collect::<Result<Vec<_>>>()?;
    let best = rows
        .iter()
        .max_by(|a, b| a.gap.total_cmp(&b.gap))
        .expect("grid is non-empty");
    let rate_at = |c: f64| -> Result<f64> {
        match rows.iter().find(|r| r.c == c) {
            Some(r) => Ok(r.rate),
            None => Ok(spectral_gap(n, c, t, opts)?.rate),
        }
    };
    let rate_ratio = rate_at(0.0)? / rate_at(1.0 / 3.0)?;
    Ok(GapScan {
        argmax_c: best.c,
        max_gap: best.gap,
        rate_ratio,
        rows,
    })
}
