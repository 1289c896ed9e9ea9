//! Cluster-state pseudo-random patterns, simulated column by column.
//!
//! A pattern is an `rows × columns` lattice. Column 0 holds the input
//! `|0…0⟩`; every column but the last is measured, left to right, in the
//! x-y plane. Measuring a site at angle `θ` with outcome `m` teleports its
//! row one column to the right and applies `H Z(θ + πm)`, with
//! `Z(θ) = diag(1, e^{-iθ})`. Vertical CZ edges listed for column `k` act
//! on the state while it is held in column `k`.
//!
//! Three consecutive measured columns with angles `(γ, β, α)` therefore
//! implement `H Z(α) X(β) Z(γ)` on each row.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::circuit::CircuitLayer;
use crate::gates::{sample_euler_polar, SingleQubitGate, C64};
use crate::pauli::Topology;
use crate::state::StateVector;
use crate::{Error, Result};

/// Default row cap. The streamed register never exceeds `rows + 1` qubits.
pub const DEFAULT_MAX_ROWS: usize = 20;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum PatternMode {
    /// Vertical edges once per three measured columns.
    Standard,
    /// Vertical edges on every column after the input.
    Enhanced,
}

impl fmt::Display for PatternMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PatternMode::Standard => "standard",
            PatternMode::Enhanced => "enhanced",
        })
    }
}

impl FromStr for PatternMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(PatternMode::Standard),
            "enhanced" => Ok(PatternMode::Enhanced),
            other => Err(Error::invalid(format!("unknown pattern mode '{other}'"))),
        }
    }
}

/// Where the standard pattern puts each iteration's vertical edges.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum StandardPlacement {
    /// On columns `3, 6, …, 3ℓ`: gate triple, then CZ.
    #[default]
    AfterBlock,
    /// On columns `2, 5, …, 3ℓ-1`: the CZ lands before the third measurement.
    BeforeThird,
}

/// How measurement angles are chosen when building a pattern.
#[derive(Clone, Debug)]
pub enum AngleSource {
    /// Row-major, one per measured site.
    Fixed(Vec<f64>),
    /// Every angle uniform on `[0, 2π)`.
    Uniform,
    /// Standard mode: Haar Euler triples (outer angles uniform, middle with
    /// density `sin β / 2`). Enhanced mode: same as `Uniform`.
    HaarEuler,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterPattern {
    rows: usize,
    columns: usize,
    mode: PatternMode,
    vertical_edges: Vec<Vec<(usize, usize)>>,
    angles: Vec<f64>,
}

impl ClusterPattern {
    /// Builds a pattern from explicit parts. `angles` is row-major over the
    /// `columns - 1` measured columns.
    pub fn from_parts(
        rows: usize,
        columns: usize,
        mode: PatternMode,
        vertical_edges: Vec<Vec<(usize, usize)>>,
        angles: Vec<f64>,
    ) -> Result<Self> {
        if rows == 0 || columns == 0 {
            return Err(Error::invalid("pattern needs at least one row and one column"));
        }
        if mode == PatternMode::Standard && columns % 3 != 1 {
            return Err(Error::invalid(format!(
                "standard pattern needs 3l+1 columns, got {columns}"
            )));
        }
        if vertical_edges.len() != columns {
            return Err(Error::DimensionMismatch {
                expected: columns,
                actual: vertical_edges.len(),
            });
        }
        if angles.len() != rows * (columns - 1) {
            return Err(Error::DimensionMismatch {
                expected: rows * (columns - 1),
                actual: angles.len(),
            });
        }
        for edges in &vertical_edges {
            for &(a, b) in edges {
                if a == b || a >= rows || b >= rows {
                    return Err(Error::InvalidTopology(format!(
                        "edge ({a}, {b}) in a pattern with {rows} rows"
                    )));
                }
            }
        }
        if let Some(bad) = angles.iter().find(|a| !a.is_finite()) {
            return Err(Error::invalid(format!("non-finite angle {bad}")));
        }
        Ok(ClusterPattern {
            rows,
            columns,
            mode,
            vertical_edges,
            angles,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn measured_columns(&self) -> usize {
        self.columns - 1
    }

    pub fn mode(&self) -> PatternMode {
        self.mode
    }

    pub fn vertical_edges(&self, column: usize) -> &[(usize, usize)] {
        &self.vertical_edges[column]
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn angle(&self, row: usize, column: usize) -> f64 {
        self.angles[self.site(row, column)]
    }

    /// Row-major index of a measured site.
    pub fn site(&self, row: usize, column: usize) -> usize {
        row * self.measured_columns() + column
    }

    /// Number of circuit iterations the pattern simulates.
    pub fn iterations(&self) -> usize {
        match self.mode {
            PatternMode::Standard => self.measured_columns() / 3,
            PatternMode::Enhanced => self.measured_columns(),
        }
    }

    /// Plain-text form; [`ClusterPattern::parse`] reads it back exactly.
    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        writeln!(s, "prq-pattern 1").unwrap();
        writeln!(s, "rows {}", self.rows).unwrap();
        writeln!(s, "columns {}", self.columns).unwrap();
        writeln!(s, "mode {}", self.mode).unwrap();
        for (k, edges) in self.vertical_edges.iter().enumerate() {
            if edges.is_empty() {
                continue;
            }
            write!(s, "edges {k}").unwrap();
            for (a, b) in edges {
                write!(s, " {a}-{b}").unwrap();
            }
            s.push('\n');
        }
        for r in 0..self.rows {
            write!(s, "angles {r}").unwrap();
            for k in 0..self.measured_columns() {
                write!(s, " {:?}", self.angle(r, k)).unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse { line, msg };
        let mut rows = None;
        let mut columns = None;
        let mut mode = None;
        let mut edge_lines = Vec::new();
        let mut angle_lines = Vec::new();
        let mut saw_header = false;

        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut words = line.split_whitespace();
            let key = words.next().unwrap();
            let rest: Vec<&str> = words.collect();
            match key {
                "prq-pattern" => {
                    if rest != ["1"] {
                        return Err(err(ln, format!("unsupported version {rest:?}")));
                    }
                    saw_header = true;
                }
                "rows" | "columns" => {
                    let v: usize = rest
                        .first()
                        .and_then(|w| w.parse().ok())
                        .ok_or_else(|| err(ln, format!("bad {key} line")))?;
                    if key == "rows" {
                        rows = Some(v);
                    } else {
                        columns = Some(v);
                    }
                }
                "mode" => {
                    let m = rest
                        .first()
                        .ok_or_else(|| err(ln, "missing mode".into()))?
                        .parse::<PatternMode>()
                        .map_err(|e| err(ln, e.to_string()))?;
                    mode = Some(m);
                }
                "edges" => edge_lines.push((ln, rest.iter().map(|w| w.to_string()).collect::<Vec<_>>())),
                "angles" => angle_lines.push((ln, rest.iter().map(|w| w.to_string()).collect::<Vec<_>>())),
                other => return Err(err(ln, format!("unknown key '{other}'"))),
            }
        }
        if !saw_header {
            return Err(err(1, "missing 'prq-pattern 1' header".into()));
        }
        let rows = rows.ok_or_else(|| err(0, "missing rows".into()))?;
        let columns = columns.ok_or_else(|| err(0, "missing columns".into()))?;
        let mode = mode.ok_or_else(|| err(0, "missing mode".into()))?;
        if rows == 0 || columns == 0 {
            return Err(err(0, "rows and columns must be positive".into()));
        }

        let mut vertical = vec![Vec::new(); columns];
        for (ln, words) in edge_lines {
            let k: usize = words
                .first()
                .and_then(|w| w.parse().ok())
                .filter(|&k| k < columns)
                .ok_or_else(|| err(ln, "bad column index".into()))?;
            for w in &words[1..] {
                let (a, b) = w
                    .split_once('-')
                    .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
                    .ok_or_else(|| err(ln, format!("bad edge '{w}'")))?;
                vertical[k].push((a, b));
            }
        }

        let measured = columns - 1;
        let mut angles = vec![f64::NAN; rows * measured];
        let mut seen = vec![false; rows];
        for (ln, words) in angle_lines {
            let r: usize = words
                .first()
                .and_then(|w| w.parse().ok())
                .filter(|&r| r < rows)
                .ok_or_else(|| err(ln, "bad row index".into()))?;
            if seen[r] {
                return Err(err(ln, format!("row {r} listed twice")));
            }
            seen[r] = true;
            if words.len() - 1 != measured {
                return Err(err(ln, format!("expected {measured} angles, got {}", words.len() - 1)));
            }
            for (k, w) in words[1..].iter().enumerate() {
                angles[r * measured + k] = w.parse().map_err(|_| err(ln, format!("bad angle '{w}'")))?;
            }
        }
        if measured > 0 && seen.iter().any(|s| !s) {
            return Err(err(0, "angles missing for some rows".into()));
        }
        ClusterPattern::from_parts(rows, columns, mode, vertical, angles)
    }
}

/// Builds the `n × (3ℓ+1)` lattice simulating `ℓ` iterations, with vertical
/// edges from `topology`.
pub fn build_pattern<R: Rng + ?Sized>(
    n: usize,
    iterations: usize,
    mode: PatternMode,
    angles: AngleSource,
    topology: &Topology,
    rng: &mut R,
) -> Result<ClusterPattern> {
    build_pattern_with(n, iterations, mode, StandardPlacement::default(), angles, topology, rng)
}

pub fn build_pattern_with<R: Rng + ?Sized>(
    n: usize,
    iterations: usize,
    mode: PatternMode,
    placement: StandardPlacement,
    angles: AngleSource,
    topology: &Topology,
    rng: &mut R,
) -> Result<ClusterPattern> {
    ClusterPattern::from_columns(n, 3 * iterations + 1, mode, placement, angles, topology, rng)
}

impl ClusterPattern {
    /// A pattern with an arbitrary column count (`3ℓ+1` in standard mode).
    pub fn from_columns<R: Rng + ?Sized>(
        n: usize,
        columns: usize,
        mode: PatternMode,
        placement: StandardPlacement,
        angles: AngleSource,
        topology: &Topology,
        rng: &mut R,
    ) -> Result<ClusterPattern> {
        build_columns(n, columns, mode, placement, angles, topology, rng)
    }
}

fn build_columns<R: Rng + ?Sized>(
    n: usize,
    columns: usize,
    mode: PatternMode,
    placement: StandardPlacement,
    angles: AngleSource,
    topology: &Topology,
    rng: &mut R,
) -> Result<ClusterPattern> {
    if topology.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: topology.n(),
        });
    }
    if columns == 0 || (mode == PatternMode::Standard && columns % 3 != 1) {
        return Err(Error::invalid(format!("{mode} pattern cannot have {columns} columns")));
    }
    let iterations = (columns - 1) / 3;
    let edges = topology.edges().to_vec();
    let mut vertical = vec![Vec::new(); columns];
    match mode {
        PatternMode::Standard => {
            for b in 1..=iterations {
                let k = match placement {
                    StandardPlacement::AfterBlock => 3 * b,
                    StandardPlacement::BeforeThird => 3 * b - 1,
                };
                vertical[k] = edges.clone();
            }
        }
        PatternMode::Enhanced => {
            for col in vertical.iter_mut().skip(1) {
                *col = edges.clone();
            }
        }
    }
    let measured = columns - 1;
    let angles = match angles {
        AngleSource::Fixed(a) => a,
        AngleSource::Uniform => (0..n * measured).map(|_| rng.random_range(0.0..TAU)).collect(),
        AngleSource::HaarEuler => {
            let mut a = Vec::with_capacity(n * measured);
            for _ in 0..n {
                for k in 0..measured {
                    let middle = mode == PatternMode::Standard && k % 3 == 1;
                    a.push(if middle {
                        sample_euler_polar(rng)
                    } else {
                        rng.random_range(0.0..TAU)
                    });
                }
            }
            a
        }
    };
    ClusterPattern::from_parts(n, columns, mode, vertical, angles)
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum OutcomePolicy {
    /// Born-rule sampling, no feed-forward.
    #[default]
    Sampled,
    /// Every outcome post-selected to 0.
    ForcedZero,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementRecord {
    /// Row-major, same layout as the pattern's angles.
    pub outcomes: Vec<u8>,
    pub policy: OutcomePolicy,
}

#[derive(Clone, Debug)]
pub struct Execution {
    pub state: StateVector,
    pub record: MeasurementRecord,
    /// Largest register simulated, in qubits.
    pub peak_qubits: usize,
}

/// Runs a pattern and returns the state of the unmeasured last column.
pub fn execute_pattern<R: Rng + ?Sized>(
    p: &ClusterPattern,
    policy: OutcomePolicy,
    rng: &mut R,
) -> Result<Execution> {
    execute_pattern_observed(p, policy, rng, DEFAULT_MAX_ROWS, |_, _| {})
}

/// As [`execute_pattern`], calling `observe(k, state)` with the state held
/// in column `k` once that column's vertical edges have been applied, for
/// every column including the input and the output.
pub fn execute_pattern_observed<R, F>(
    p: &ClusterPattern,
    policy: OutcomePolicy,
    rng: &mut R,
    max_rows: usize,
    mut observe: F,
) -> Result<Execution>
where
    R: Rng + ?Sized,
    F: FnMut(usize, &StateVector),
{
    if p.rows > max_rows {
        return Err(Error::Capacity {
            what: "cluster rows",
            requested: p.rows,
            limit: max_rows,
        });
    }
    let mut state = StateVector::zero(p.rows);
    let mut outcomes = vec![0u8; p.angles.len()];
    let mut peak = p.rows;
    for k in 0..p.columns {
        for &(a, b) in &p.vertical_edges[k] {
            state.apply_cz(a, b)?;
        }
        observe(k, &state);
        if k + 1 == p.columns {
            break;
        }
        for r in 0..p.rows {
            let (next, m) = teleport_row(&state, r, p.angle(r, k), policy, rng);
            peak = peak.max(p.rows + 1);
            outcomes[p.site(r, k)] = m;
            state = next;
        }
    }
    Ok(Execution {
        state,
        record: MeasurementRecord { outcomes, policy },
        peak_qubits: peak,
    })
}

/// Attaches a `|+⟩` ancilla as the top qubit, entangles it with `row`,
/// measures `row` in the basis `(|0⟩ ± e^{iθ}|1⟩)/√2` and returns the
/// remaining register with the ancilla moved into `row`'s slot.
fn teleport_row<R: Rng + ?Sized>(
    state: &StateVector,
    row: usize,
    theta: f64,
    policy: OutcomePolicy,
    rng: &mut R,
) -> (StateVector, u8) {
    let n = state.n();
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let ancilla = 1usize << n;
    let bit = 1usize << row;

    let mut reg = Vec::with_capacity(2 * ancilla);
    reg.extend(state.amplitudes().iter().map(|a| a * half));
    reg.extend(state.amplitudes().iter().map(|a| a * half));
    for (x, amp) in reg.iter_mut().enumerate().skip(ancilla) {
        if x & bit != 0 {
            *amp = -*amp;
        }
    }

    let project = |m: u8| -> Vec<C64> {
        let sign = if m == 0 { 1.0 } else { -1.0 };
        let c0 = C64::new(half, 0.0);
        let c1 = C64::from_polar(sign * half, -theta);
        (0..ancilla)
            .map(|x| {
                let t = if x & bit != 0 { ancilla } else { 0 };
                let low = x & !bit;
                c0 * reg[low | t] + c1 * reg[low | bit | t]
            })
            .collect()
    };

    let zero = project(0);
    let m = match policy {
        OutcomePolicy::ForcedZero => 0,
        OutcomePolicy::Sampled => {
            let p0: f64 = zero.iter().map(|a| a.norm_sqr()).sum();
            u8::from(rng.random::<f64>() >= p0)
        }
    };
    let mut amps = if m == 0 { zero } else { project(1) };
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    (StateVector::from_raw(n, amps), m)
}

/// Measured angles with the byproduct shifts folded in: `θ + π m`, reduced
/// to `[0, 2π)`.
pub fn effective_angles(p: &ClusterPattern, record: &MeasurementRecord) -> Result<Vec<f64>> {
    if record.outcomes.len() != p.angles.len() {
        return Err(Error::DimensionMismatch {
            expected: p.angles.len(),
            actual: record.outcomes.len(),
        });
    }
    Ok(p.angles
        .iter()
        .zip(&record.outcomes)
        .map(|(a, &m)| (a + PI * f64::from(m)).rem_euclid(TAU))
        .collect())
}

/// The circuit a pattern executes for a given record: per measured column an
/// `H Z(θ + πm)` layer, with each column's vertical edges as CZ layers.
/// Consecutive gate layers are multiplied together.
pub fn compile_to_circuit(p: &ClusterPattern, record: &MeasurementRecord) -> Result<Vec<CircuitLayer>> {
    let angles = effective_angles(p, record)?;
    let measured = p.measured_columns();
    let mut layers = Vec::new();
    for k in 0..p.columns {
        if !p.vertical_edges[k].is_empty() {
            layers.push(CircuitLayer::Cz(p.vertical_edges[k].clone()));
        }
        if k < measured {
            let gates = (0..p.rows)
                .map(|r| SingleQubitGate::hz(angles[r * measured + k]))
                .collect();
            layers.push(CircuitLayer::Gates(gates));
        }
    }
    Ok(merge_gate_layers(layers))
}

/// Multiplies runs of adjacent gate layers into single layers.
pub fn merge_gate_layers(layers: Vec<CircuitLayer>) -> Vec<CircuitLayer> {
    let mut out: Vec<CircuitLayer> = Vec::with_capacity(layers.len());
    for layer in layers {
        match (out.last_mut(), layer) {
            (Some(CircuitLayer::Gates(prev)), CircuitLayer::Gates(next)) => {
                for (p, g) in prev.iter_mut().zip(next) {
                    *p = g * *p;
                }
            }
            (_, layer) => out.push(layer),
        }
    }
    out
}
