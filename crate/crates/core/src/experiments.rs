//! Figure-level drivers behind the `prq` binary.
//!
//! Every driver returns its table plus footer lines and renders to CSV with a
//! `#`-prefixed manifest header. Floats use 12 significant digits and the
//! manifest carries no wall-clock time, so identical flags give
//! byte-identical output regardless of worker count.

use std::fmt;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::circuit::{run_pr_circuit_with_rng, CircuitConfig};
use crate::gates::GateEnsemble;
use crate::markov::{
    averaged_rotation, build_chain, gap_scan, initial_distribution, read_matrix_market, reduced_rotation,
    stationary_distribution, write_matrix_market, GapMethod, GapOptions, Space,
};
use crate::mbqc::{execute_pattern_observed, AngleSource, ClusterPattern, OutcomePolicy, PatternMode, StandardPlacement, DEFAULT_MAX_ROWS};
use crate::metrics::{
    detect_cutoff, haar_control_distance, fit_exponential_decay, fit_to_floor, mean_and_se, meyer_wallach_q,
    q_random_expectation, tv_distance, BinSpec, DecayFit, TrajectoryPoint,
};
use crate::pauli::Topology;
use crate::rng::{map_realizations, realization_rng};
use crate::state::StateVector;
use crate::{Error, Result};

/// `{:.11e}`: 12 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.11e}")
    }
}

/// Flag values recorded at the top of every CSV.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunManifest {
    pub subcommand: String,
    pub flags: Vec<(String, String)>,
    pub seed: Option<u64>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(subcommand: &str) -> Self {
        RunManifest { subcommand: subcommand.into(), ..Default::default() }
    }

    pub fn flag(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.flags.push((key.into(), value.to_string()));
        self
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# prq {} {}", env!("CARGO_PKG_VERSION"), self.subcommand).unwrap();
        for (k, v) in &self.flags {
            writeln!(s, "# {k}: {v}").unwrap();
        }
        if let Some(seed) = self.seed {
            writeln!(s, "# seed: {seed}").unwrap();
        }
        for o in &self.outputs {
            writeln!(s, "# output: {o}").unwrap();
        }
        s
    }
}

/// A finished table: header, rows and `#` footer lines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub footer: Vec<String>,
}

impl Table {
    pub fn to_csv(&self, manifest: &RunManifest) -> String {
        let mut s = manifest.render();
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        for f in &self.footer {
            writeln!(s, "# {f}").unwrap();
        }
        s
    }
}

/// Writes `text` to `path` through a temporary file and a rename.
pub fn write_atomic(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    let name = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    let r = fs::write(&tmp, text).and_then(|_| fs::rename(&tmp, path));
    if let Err(e) = r {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}

pub fn parse_topology(kind: &str, n: usize) -> Result<Topology> {
    match kind {
        "open" => Ok(Topology::open_chain(n)),
        "closed" => Ok(Topology::closed_chain(n)),
        other => Err(Error::InvalidTopology(format!("unknown topology '{other}'"))),
    }
}

/// `start:stop:step`, inclusive of `stop` up to rounding.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::invalid(format!("bad grid '{spec}', expected start:stop:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let p = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let (start, stop, step) = (p(parts[0])?, p(parts[1])?, p(parts[2])?);
    if !(step > 0.0) || stop < start {
        return Err(bad());
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

pub fn parse_ensemble(name: &str, c: Option<f64>) -> Result<GateEnsemble> {
    match name {
        "haar" => Ok(GateEnsemble::Haar),
        "hz" => Ok(GateEnsemble::Hz),
        "zrot" => Ok(GateEnsemble::ZRotation),
        "mixture" => GateEnsemble::mixture(c.ok_or_else(|| Error::invalid("mixture needs --c"))?),
        other => Err(Error::invalid(format!("unknown ensemble '{other}'"))),
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum DecayMode {
    Circuit,
    ClusterStandard,
    ClusterEnhanced,
}

impl FromStr for DecayMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circuit" => Ok(DecayMode::Circuit),
            "cluster-standard" => Ok(DecayMode::ClusterStandard),
            "cluster-enhanced" => Ok(DecayMode::ClusterEnhanced),
            other => Err(Error::invalid(format!("unknown mode '{other}'"))),
        }
    }
}

impl fmt::Display for DecayMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecayMode::Circuit => "circuit",
            DecayMode::ClusterStandard => "cluster-standard",
            DecayMode::ClusterEnhanced => "cluster-enhanced",
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Metric {
    /// Porter-Thomas distance.
    Pt,
    /// `|⟨Q⟩ - Q_R|`.
    Q,
    /// Chain total variation.
    Tv,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pt" => Ok(Metric::Pt),
            "q" => Ok(Metric::Q),
            "tv" => Ok(Metric::Tv),
            other => Err(Error::invalid(format!("unknown metric '{other}'"))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Pt => "pt",
            Metric::Q => "q",
            Metric::Tv => "tv",
        })
    }
}

#[derive(Clone, Debug)]
pub struct DecayConfig {
    pub n: usize,
    pub mode: DecayMode,
    /// Gate ensemble of circuit mode.
    pub ensemble: GateEnsemble,
    /// Iterations (circuit) or columns (cluster).
    pub steps: usize,
    pub ensemble_size: usize,
    pub seed: u64,
    pub metrics: Vec<Metric>,
    pub topology: Topology,
    pub bins: BinSpec,
}

impl DecayConfig {
    pub fn new(n: usize, mode: DecayMode, steps: usize, ensemble_size: usize, seed: u64) -> Self {
        DecayConfig {
            n,
            mode,
            ensemble: GateEnsemble::Haar,
            steps,
            ensemble_size,
            seed,
            metrics: vec![Metric::Q, Metric::Pt],
            topology: Topology::open_chain(n),
            bins: BinSpec::default(),
        }
    }

    pub fn manifest(&self) -> RunManifest {
        let metrics: Vec<String> = self.metrics.iter().map(Metric::to_string).collect();
        let mut m = RunManifest::new("decay")
            .flag("n", self.n)
            .flag("mode", self.mode)
            .flag("ensemble", self.ensemble)
            .flag(if self.mode == DecayMode::Circuit { "iters" } else { "columns" }, self.steps)
            .flag("ensemble-size", self.ensemble_size)
            .flag("metric", metrics.join(","))
            .flag("topology", self.topology.kind())
            .flag("bins", format!("{} on [0, {}]", self.bins.bins, self.bins.y_max));
        if self.mode != DecayMode::Circuit {
            m = m.flag("step axis", "columns run, counting the unmeasured last column");
        }
        m.seed = Some(self.seed);
        m
    }

    fn burn_in(&self) -> f64 {
        match self.mode {
            // ℓ = 0 is the unentangled input
            DecayMode::Circuit => 1.0,
            // steps count run columns, so the first Euler block (columns
            // 0..=2) ends at step 3
            DecayMode::ClusterStandard => 4.0,
            // H Z(θ)|0⟩ = |+⟩ for every θ: step 2 is the same cluster
            // state in every realization and randomness first shows at step 3
            DecayMode::ClusterEnhanced => 3.0,
        }
    }
}

/// Per-step ensemble statistics of a decay run.
#[derive(Debug)]
pub struct DecayResult {
    pub steps: Vec<f64>,
    /// Mean and standard error of `Q` per step.
    pub q: Vec<(f64, f64)>,
    /// Pooled Porter-Thomas distance per step.
    pub pt: Vec<f64>,
    /// Exact-exponential control distance at the same sample count.
    pub pt_floor: f64,
    pub q_random: f64,
    pub fits: Vec<(Metric, Result<DecayFit>)>,
}

impl DecayResult {
    pub fn q_points(&self) -> Vec<TrajectoryPoint> {
        self.steps
            .iter()
            .zip(&self.q)
            .map(|(&step, &(m, se))| TrajectoryPoint { step, mean: (m - self.q_random).abs(), se })
            .collect()
    }

    pub fn pt_points(&self) -> Vec<TrajectoryPoint> {
        self.steps
            .iter()
            .zip(&self.pt)
            .map(|(&step, &d)| TrajectoryPoint { step, mean: d, se: 0.0 })
            .collect()
    }

    pub fn fit(&self, metric: Metric) -> Option<&Result<DecayFit>> {
        self.fits.iter().find(|f| f.0 == metric).map(|f| &f.1)
    }
}

/// Plateau threshold used by the decay fits.
pub const PLATEAU_THRESHOLD: f64 = 1e-9;

struct StepSample {
    q: f64,
    counts: Vec<u32>,
}

fn sample_state(s: &StateVector, bins: &BinSpec, want_pt: bool) -> StepSample {
    let mut counts = Vec::new();
    if want_pt {
        counts = vec![0u32; bins.bins];
        let scale = s.dim() as f64;
        for a in s.amplitudes() {
            counts[bins.bin_of(scale * a.norm_sqr())] += 1;
        }
    }
    StepSample { q: meyer_wallach_q(s), counts }
}

pub fn run_decay(cfg: &DecayConfig) -> Result<DecayResult> {
    if cfg.metrics.contains(&Metric::Tv) {
        return Err(Error::invalid("metric tv comes from the chain; use the tv subcommand"));
    }
    if cfg.ensemble_size == 0 {
        return Err(Error::invalid("ensemble size must be positive"));
    }
    if cfg.bins.bins == 0 || !(cfg.bins.y_max > 0.0) {
        return Err(Error::invalid("histogram needs at least one bin and y_max > 0"));
    }
    let want_pt = cfg.metrics.contains(&Metric::Pt);
    let per_realization: Vec<Result<Vec<StepSample>>> = match cfg.mode {
        DecayMode::Circuit => {
            let ccfg = CircuitConfig::new(cfg.n, cfg.steps, cfg.ensemble, cfg.seed).with_topology(cfg.topology.clone());
            ccfg.validate()?;
            map_realizations(cfg.ensemble_size, cfg.seed, |_, rng| {
                run_pr_circuit_with_rng(&ccfg, rng, |_, s| sample_state(s, &cfg.bins, want_pt))
            })
        }
        DecayMode::ClusterStandard | DecayMode::ClusterEnhanced => {
            let mode = if cfg.mode == DecayMode::ClusterStandard {
                PatternMode::Standard
            } else {
                PatternMode::Enhanced
            };
            if cfg.steps == 0 || (mode == PatternMode::Standard && cfg.steps % 3 != 1) {
                return Err(Error::invalid(format!("{} needs a column count of the form 3l+1", cfg.mode)));
            }
            if cfg.n > DEFAULT_MAX_ROWS {
                return Err(Error::Capacity { what: "cluster rows", requested: cfg.n, limit: DEFAULT_MAX_ROWS });
            }
            map_realizations(cfg.ensemble_size, cfg.seed, |_, rng| {
                let p = ClusterPattern::from_columns(
                    cfg.n,
                    cfg.steps,
                    mode,
                    StandardPlacement::default(),
                    AngleSource::HaarEuler,
                    &cfg.topology,
                    rng,
                )?;
                let mut out = Vec::with_capacity(cfg.steps);
                execute_pattern_observed(&p, OutcomePolicy::Sampled, rng, DEFAULT_MAX_ROWS, |_, s| {
                    out.push(sample_state(s, &cfg.bins, want_pt))
                })?;
                Ok(out)
            })
        }
    };
    let per_realization = per_realization.into_iter().collect::<Result<Vec<_>>>()?;
    let len = per_realization[0].len();
    let steps: Vec<f64> = match cfg.mode {
        DecayMode::Circuit => (0..len).map(|l| l as f64).collect(),
        _ => (1..=len).map(|k| k as f64).collect(),
    };

    let mut q = Vec::with_capacity(len);
    let mut pt = Vec::with_capacity(len);
    let samples = cfg.ensemble_size << cfg.n;
    for k in 0..len {
        let qs: Vec<f64> = per_realization.iter().map(|r| r[k].q).collect();
        q.push(mean_and_se(&qs));
        if want_pt {
            let mut counts = vec![0u64; cfg.bins.bins];
            for r in &per_realization {
                for (c, x) in counts.iter_mut().zip(&r[k].counts) {
                    *c += u64::from(*x);
                }
            }
            let dy = cfg.bins.width();
            let d = counts
                .iter()
                .enumerate()
                .map(|(b, &c)| (c as f64 / samples as f64 / dy - (-cfg.bins.midpoint(b)).exp()).powi(2) * dy)
                .sum::<f64>()
                .sqrt();
            pt.push(d);
        }
    }

    let pt_floor = if want_pt { control_floor(cfg.n, cfg.ensemble_size, cfg.bins, cfg.seed)? } else { f64::NAN };
    let mut result = DecayResult {
        steps,
        q,
        pt,
        pt_floor,
        q_random: q_random_expectation(cfg.n as u32),
        fits: Vec::new(),
    };
    let burn_in = cfg.burn_in();
    for &metric in &cfg.metrics {
        let fit = match metric {
            Metric::Q => fit_to_floor(&result.q_points(), burn_in, PLATEAU_THRESHOLD, |p| p.mean <= 3.0 * p.se),
            Metric::Pt => {
                let floor = 2.0 * result.pt_floor;
                fit_to_floor(&result.pt_points(), burn_in, PLATEAU_THRESHOLD, |p| p.mean <= floor)
            }
            Metric::Tv => unreachable!("rejected above"),
        };
        result.fits.push((metric, fit));
    }
    Ok(result)
}

/// Mean Haar-state control distance over 5 independent ensembles of the
/// same size as the run.
pub fn control_floor(n: usize, realizations: usize, bins: BinSpec, seed: u64) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..5 {
        let mut rng = realization_rng(seed ^ 0x5eed_f100, i);
        total += haar_control_distance(n, realizations, bins, &mut rng)?;
    }
    Ok(total / 5.0)
}

fn fit_footer(label: &str, fit: &Result<DecayFit>) -> String {
    match fit {
        Ok(f) => format!(
            "fit {label}: rate={} intercept={} unexplained_variance={} residual_rms={} start={} points={}",
            fmt_f64(f.rate),
            fmt_f64(f.intercept),
            fmt_f64(f.unexplained_variance),
            fmt_f64(f.residual_rms),
            f.burn_in,
            f.points
        ),
        Err(e) => format!("fit {label}: failed: {e}"),
    }
}

pub fn decay_table(cfg: &DecayConfig, r: &DecayResult) -> Table {
    let mut columns = vec![if cfg.mode == DecayMode::Circuit { "iteration" } else { "column" }.to_string()];
    let want_q = cfg.metrics.contains(&Metric::Q);
    let want_pt = cfg.metrics.contains(&Metric::Pt);
    if want_q {
        columns.extend(["q_mean", "q_se", "q_abs_dev"].map(String::from));
    }
    if want_pt {
        columns.push("pt_distance".into());
    }
    let rows = (0..r.steps.len())
        .map(|k| {
            let mut row = vec![format!("{}", r.steps[k] as usize)];
            if want_q {
                row.push(fmt_f64(r.q[k].0));
                row.push(fmt_f64(r.q[k].1));
                row.push(fmt_f64((r.q[k].0 - r.q_random).abs()));
            }
            if want_pt {
                row.push(fmt_f64(r.pt[k]));
            }
            row
        })
        .collect();
    let mut footer = vec![format!("q_random: {}", fmt_f64(r.q_random))];
    if want_pt {
        footer.push(format!("pt_control_floor: {}", fmt_f64(r.pt_floor)));
    }
    for (m, f) in &r.fits {
        footer.push(fit_footer(&m.to_string(), f));
    }
    Table { columns, rows, footer }
}

#[derive(Clone, Debug)]
pub struct GapConfig {
    pub ns: Vec<usize>,
    pub grid: Vec<f64>,
    pub topology: String,
    pub method: GapMethod,
}

impl GapConfig {
    pub fn manifest(&self) -> RunManifest {
        let ns: Vec<String> = self.ns.iter().map(usize::to_string).collect();
        let grid: Vec<String> = self.grid.iter().map(|c| fmt_f64(*c)).collect();
        RunManifest::new("gap")
            .flag("n", ns.join(","))
            .flag("c-grid", grid.join(" "))
            .flag("topology", &self.topology)
            .flag("method", self.method)
            .flag("chain", "reduced, identity removed")
    }
}

pub fn cmd_gap(cfg: &GapConfig) -> Result<Table> {
    if cfg.ns.is_empty() {
        return Err(Error::invalid("no n given"));
    }
    let columns = ["n", "c", "lambda2", "gap", "rate", "method"].map(String::from).to_vec();
    let mut rows = Vec::new();
    let mut footer = Vec::new();
    for &n in &cfg.ns {
        let t = parse_topology(&cfg.topology, n)?;
        let scan = gap_scan(n, &cfg.grid, &t, &GapOptions::with_method(cfg.method))?;
        for r in &scan.rows {
            rows.push(vec![
                n.to_string(),
                fmt_f64(r.c),
                fmt_f64(r.lambda2),
                fmt_f64(r.gap),
                fmt_f64(r.rate),
                r.method.to_string(),
            ]);
        }
        footer.push(format!("argmax n={n}: c={} gap={}", fmt_f64(scan.argmax_c), fmt_f64(scan.max_gap)));
        footer.push(format!("rate_ratio n={n}: Gamma(0)/Gamma(1/3)={}", fmt_f64(scan.rate_ratio)));
    }
    Ok(Table { columns, rows, footer })
}

#[derive(Clone, Debug)]
pub struct TvConfig {
    pub n: usize,
    pub c: f64,
    pub steps: usize,
    pub topology: String,
    pub burn_in: f64,
    /// Plateau threshold as a fraction of `TV(0)`.
    pub threshold_fraction: f64,
    /// Companion Monte-Carlo `1 - Q` with `mixture(c)` circuits:
    /// (ensemble size, seed).
    pub companion_q: Option<(usize, u64)>,
}

impl TvConfig {
    pub fn new(n: usize, c: f64, steps: usize) -> Self {
        TvConfig {
            n,
            c,
            steps,
            topology: "open".into(),
            burn_in: 3.0,
            threshold_fraction: 0.01,
            companion_q: None,
        }
    }

    pub fn manifest(&self) -> RunManifest {
        let mut m = RunManifest::new("tv")
            .flag("n", self.n)
            .flag("c", fmt_f64(self.c))
            .flag("iters", self.steps)
            .flag("topology", &self.topology)
            .flag("chain", "reduced, identity kept")
            .flag("fit burn-in", self.burn_in)
            .flag("cutoff threshold", format!("{} * TV(0)", self.threshold_fraction));
        if let Some((size, seed)) = self.companion_q {
            m = m.flag("metric", "tv,q").flag("ensemble-size", size);
            m.seed = Some(seed);
        }
        m
    }
}

#[derive(Debug)]
pub struct TvResult {
    pub tv: Vec<f64>,
    /// Mean and standard error of `1 - Q` per iteration.
    pub one_minus_q: Option<Vec<(f64, f64)>>,
    pub fit: Result<DecayFit>,
    pub tau: usize,
    pub q_tau: Option<usize>,
}

pub fn run_tv(cfg: &TvConfig) -> Result<TvResult> {
    let t = parse_topology(&cfg.topology, cfg.n)?;
    let m = build_chain(cfg.n, &reduced_rotation(cfg.c)?, &t, false)?;
    let pi = stationary_distribution(cfg.n, Space::Reduced, false);
    let d0 = initial_distribution(cfg.n, Space::Reduced, false);
    let mut tv = vec![tv_distance(&d0.probs, &pi.probs)?];
    d0.evolve_with(&m, cfg.steps, |_, p| {
        tv.push(tv_distance(p, &pi.probs)?);
        Ok(())
    })?;
    let series: Vec<(f64, f64)> = tv.iter().enumerate().map(|(l, v)| (l as f64, *v)).collect();
    let fit = fit_exponential_decay(&series, cfg.burn_in);
    let tau = detect_cutoff(&tv, cfg.threshold_fraction * tv[0]).tau;

    let (one_minus_q, q_tau) = match cfg.companion_q {
        None => (None, None),
        Some((size, seed)) => {
            let ccfg = CircuitConfig::new(cfg.n, cfg.steps, GateEnsemble::mixture(cfg.c)?, seed).with_topology(t.clone());
            ccfg.validate()?;
            let runs = map_realizations(size, seed, |_, rng| {
                run_pr_circuit_with_rng(&ccfg, rng, |_, s| 1.0 - meyer_wallach_q(s))
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            let stats: Vec<(f64, f64)> = (0..=cfg.steps)
                .map(|l| mean_and_se(&runs.iter().map(|r| r[l]).collect::<Vec<_>>()))
                .collect();
            // ℓ = 0 is the product input; the plateau is sought from ℓ = 1
            let means: Vec<f64> = stats.iter().skip(1).map(|s| s.0).collect();
            let q_tau = detect_cutoff(&means, PLATEAU_THRESHOLD).tau;
            (Some(stats), Some(q_tau))
        }
    };
    Ok(TvResult { tv, one_minus_q, fit, tau, q_tau })
}

pub fn tv_table(cfg: &TvConfig, r: &TvResult) -> Table {
    let mut columns = vec!["iteration".to_string(), "tv".to_string()];
    if r.one_minus_q.is_some() {
        columns.push("one_minus_q_mean".into());
        columns.push("one_minus_q_se".into());
    }
    let rows = r
        .tv
        .iter()
        .enumerate()
        .map(|(l, v)| {
            let mut row = vec![l.to_string(), fmt_f64(*v)];
            if let Some(q) = &r.one_minus_q {
                row.push(fmt_f64(q[l].0));
                row.push(fmt_f64(q[l].1));
            }
            row
        })
        .collect();
    let mut footer = vec![fit_footer("tv", &r.fit)];
    footer.push(format!(
        "cutoff tv: tau={} threshold={}",
        r.tau,
        fmt_f64(cfg.threshold_fraction * r.tv[0])
    ));
    if let Some(q_tau) = r.q_tau {
        footer.push(format!("cutoff one_minus_q: tau={q_tau} threshold={}", fmt_f64(PLATEAU_THRESHOLD)));
    }
    Table { columns, rows, footer }
}

#[derive(Clone, Debug)]
pub struct ExportConfig {
    pub n: usize,
    pub c: f64,
    pub space: Space,
    pub topology: String,
    pub remove_identity: bool,
}

/// Writes the chain to `path` and verifies it reads back identically.
/// Returns `(dimension, nonzeros)`.
pub fn cmd_chain_export(cfg: &ExportConfig, path: impl AsRef<Path>) -> Result<(usize, usize)> {
    let t = parse_topology(&cfg.topology, cfg.n)?;
    let rotation = match cfg.space {
        Space::Reduced => reduced_rotation(cfg.c)?,
        Space::Full => averaged_rotation(&GateEnsemble::mixture(cfg.c)?)?,
    };
    let m = build_chain(cfg.n, &rotation, &t, cfg.remove_identity)?;
    let written = write_matrix_market(&m, &path)?;
    let (_, read) = read_matrix_market(&path)?;
    if read != written {
        let _ = fs::remove_file(&path);
        return Err(Error::invalid("exported matrix did not read back identically"));
    }
    Ok((written.rows, written.nnz()))
}
