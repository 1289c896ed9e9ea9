//! Pauli strings over `{0, x, y, z}^n`, reduced strings over `{0, z, ξ}^n`,
//! and the action of a CZ layer on them.
//!
//! Strings are stored qubit-0-first and encoded as little-endian base-4
//! (base-3 for reduced strings) integers, so qubit 0 is the least
//! significant digit of the index. Conjugation by CZ maps Pauli strings to
//! Pauli strings up to a sign; the sign is dropped here because only squared
//! coefficients are ever evolved.

use std::collections::HashSet;
use std::fmt;

use crate::{Error, Result};

/// Single-qubit Pauli label. The discriminant is the base-4 digit.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_digit(d: usize) -> Pauli {
        Pauli::ALL[d & 3]
    }

    pub fn digit(self) -> usize {
        self as usize
    }

    /// True for X and Y, the labels CZ does not leave alone.
    pub fn is_transverse(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    fn toggle_iz(self) -> Pauli {
        match self {
            Pauli::I => Pauli::Z,
            Pauli::Z => Pauli::I,
            p => p,
        }
    }

    fn toggle_xy(self) -> Pauli {
        match self {
            Pauli::X => Pauli::Y,
            Pauli::Y => Pauli::X,
            p => p,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => '0',
            Pauli::X => 'x',
            Pauli::Y => 'y',
            Pauli::Z => 'z',
        }
    }
}

/// Label of the reduced alphabet. `Xi` stands for the symmetric
/// combination of X and Y.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reduced {
    I = 0,
    Z = 1,
    Xi = 2,
}

impl Reduced {
    pub const ALL: [Reduced; 3] = [Reduced::I, Reduced::Z, Reduced::Xi];

    pub fn from_digit(d: usize) -> Reduced {
        Reduced::ALL[d]
    }

    pub fn digit(self) -> usize {
        self as usize
    }

    pub fn symbol(self) -> char {
        match self {
            Reduced::I => '0',
            Reduced::Z => 'z',
            Reduced::Xi => 'ξ',
        }
    }
}

impl From<Pauli> for Reduced {
    fn from(p: Pauli) -> Reduced {
        match p {
            Pauli::I => Reduced::I,
            Pauli::Z => Reduced::Z,
            Pauli::X | Pauli::Y => Reduced::Xi,
        }
    }
}

/// Image of a label pair under conjugation by CZ, sign discarded.
///
/// Both in `{0, z}`: unchanged. Exactly one transverse: the other toggles
/// `0 ↔ z`. Both transverse: both toggle `x ↔ y`.
pub fn cz_conjugate_pair(a: Pauli, b: Pauli) -> (Pauli, Pauli) {
    match (a.is_transverse(), b.is_transverse()) {
        (false, false) => (a, b),
        (true, false) => (a, b.toggle_iz()),
        (false, true) => (a.toggle_iz(), b),
        (true, true) => (a.toggle_xy(), b.toggle_xy()),
    }
}

/// Reduced counterpart of [`cz_conjugate_pair`]. Two ξ labels stay ξ.
pub fn cz_conjugate_pair_reduced(a: Reduced, b: Reduced) -> (Reduced, Reduced) {
    let flip = |r: Reduced| match r {
        Reduced::I => Reduced::Z,
        Reduced::Z => Reduced::I,
        Reduced::Xi => Reduced::Xi,
    };
    match (a == Reduced::Xi, b == Reduced::Xi) {
        (true, false) => (a, flip(b)),
        (false, true) => (flip(a), b),
        _ => (a, b),
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum TopologyKind {
    OpenChain,
    ClosedChain,
    Explicit,
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TopologyKind::OpenChain => "open",
            TopologyKind::ClosedChain => "closed",
            TopologyKind::Explicit => "explicit",
        })
    }
}

/// The simple graph of CZ gates applied in each layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    n: usize,
    edges: Vec<(usize, usize)>,
    kind: TopologyKind,
}

impl Topology {
    /// Nearest neighbours `(i, i+1)`.
    pub fn open_chain(n: usize) -> Topology {
        let edges = (1..n).map(|i| (i - 1, i)).collect();
        Topology {
            n,
            edges,
            kind: TopologyKind::OpenChain,
        }
    }

    /// Ring. For `n <= 2` the wrap-around edge would duplicate or self-loop,
    /// so the ring degenerates to the open chain.
    pub fn closed_chain(n: usize) -> Topology {
        let mut t = Topology::open_chain(n);
        if n >= 3 {
            t.edges.push((n - 1, 0));
        }
        t.kind = TopologyKind::ClosedChain;
        t
    }

    pub fn explicit(n: usize, edges: Vec<(usize, usize)>) -> Result<Topology> {
        let mut seen = HashSet::new();
        for &(a, b) in &edges {
            if a == b {
                return Err(Error::InvalidTopology(format!("self-loop on qubit {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::InvalidTopology(format!(
                    "edge ({a}, {b}) has an endpoint >= n = {n}"
                )));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidTopology(format!("duplicate edge ({a}, {b})")));
            }
        }
        Ok(Topology {
            n,
            edges,
            kind: TopologyKind::Explicit,
        })
    }

    /// No CZ gates at all.
    pub fn empty(n: usize) -> Topology {
        Topology {
            n,
            edges: Vec::new(),
            kind: TopologyKind::Explicit,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    /// Same graph with its edge list reordered; used to check order independence.
    pub fn with_edge_order(&self, order: &[usize]) -> Topology {
        Topology {
            n: self.n,
            edges: order.iter().map(|&i| self.edges[i]).collect(),
            kind: self.kind,
        }
    }
}

/// A Pauli string `P_ν`, qubit 0 first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(labels: Vec<Pauli>) -> Self {
        PauliString(labels)
    }

    pub fn identity(n: usize) -> Self {
        PauliString(vec![Pauli::I; n])
    }

    pub fn from_index(index: usize, n: usize) -> Self {
        PauliString((0..n).map(|q| Pauli::from_digit(index >> (2 * q))).collect())
    }

    pub fn index(&self) -> usize {
        self.0
            .iter()
            .rev()
            .fold(0, |acc, p| (acc << 2) | p.digit())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> &[Pauli] {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&p| p != Pauli::I).count()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|p| write!(f, "{}", p.symbol()))
    }
}

/// A string over the reduced alphabet `{0, z, ξ}`, qubit 0 first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedString(Vec<Reduced>);

impl ReducedString {
    pub fn new(labels: Vec<Reduced>) -> Self {
        ReducedString(labels)
    }

    pub fn from_index(mut index: usize, n: usize) -> Self {
        let mut v = Vec::with_capacity(n);
        for _ in 0..n {
            v.push(Reduced::from_digit(index % 3));
            index /= 3;
        }
        ReducedString(v)
    }

    pub fn index(&self) -> usize {
        self.0.iter().rev().fold(0, |acc, r| acc * 3 + r.digit())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> &[Reduced] {
        &self.0
    }

    /// Number of full strings lumped into this one: `2^(#ξ)`.
    pub fn multiplicity(&self) -> usize {
        1 << self.0.iter().filter(|&&r| r == Reduced::Xi).count()
    }
}

impl fmt::Display for ReducedString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|r| write!(f, "{}", r.symbol()))
    }
}

/// `x, y ↦ ξ`.
pub fn reduce(s: &PauliString) -> ReducedString {
    ReducedString(s.0.iter().map(|&p| Reduced::from(p)).collect())
}

/// All full strings that reduce to `s`, in increasing index order.
pub fn lift_class(s: &ReducedString) -> Vec<PauliString> {
    let mut out = vec![Vec::with_capacity(s.len())];
    for &r in &s.0 {
        let choices: &[Pauli] = match r {
            Reduced::I => &[Pauli::I],
            Reduced::Z => &[Pauli::Z],
            Reduced::Xi => &[Pauli::X, Pauli::Y],
        };
        out = out
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |&c| {
                    let mut p = prefix.clone();
                    p.push(c);
                    p
                })
            })
            .collect();
    }
    let mut v: Vec<PauliString> = out.into_iter().map(PauliString).collect();
    v.sort_by_key(PauliString::index);
    v
}

fn check_len(len: usize, t: &Topology) -> Result<()> {
    if len != t.n() {
        return Err(Error::DimensionMismatch {
            expected: t.n(),
            actual: len,
        });
    }
    Ok(())
}

/// Conjugate a Pauli string by every CZ of the topology.
pub fn apply_cz_layer(s: &PauliString, t: &Topology) -> Result<PauliString> {
    check_len(s.len(), t)?;
    let mut v = s.0.clone();
    for &(a, b) in t.edges() {
        let (pa, pb) = cz_conjugate_pair(v[a], v[b]);
        v[a] = pa;
        v[b] = pb;
    }
    Ok(PauliString(v))
}

/// Reduced-alphabet CZ layer. Commutes with [`reduce`].
pub fn apply_cz_layer_reduced(s: &ReducedString, t: &Topology) -> Result<ReducedString> {
    check_len(s.len(), t)?;
    let mut v = s.0.clone();
    for &(a, b) in t.edges() {
        let (ra, rb) = cz_conjugate_pair_reduced(v[a], v[b]);
        v[a] = ra;
        v[b] = rb;
    }
    Ok(ReducedString(v))
}

/// Index permutation of the CZ layer on the full space: `perm[i]` is the
/// image of string `i`.
pub fn cz_permutation_full(t: &Topology) -> Vec<usize> {
    let n = t.n();
    let total = 1usize << (2 * n);
    (0..total)
        .map(|i| {
            apply_cz_layer(&PauliString::from_index(i, n), t)
                .expect("lengths agree by construction")
                .index()
        })
        .collect()
}

/// Index permutation of the CZ layer on the reduced space.
///
/// Only the transverse mask matters for the `0 ↔ z` toggles, so this works
/// on digit vectors directly instead of allocating strings.
pub fn cz_permutation_reduced(t: &Topology) -> Vec<usize> {
    let n = t.n();
    let total = 3usize.pow(n as u32);
    let pow3: Vec<usize> = (0..n).map(|q| 3usize.pow(q as u32)).collect();
    let mut digits = vec![0u8; n];
    (0..total)
        .map(|i| {
            let mut rest = i;
            for d in digits.iter_mut() {
                *d = (rest % 3) as u8;
                rest /= 3;
            }
            let mut image = i;
            for &(a, b) in t.edges() {
                let (xa, xb) = (digits[a] == 2, digits[b] == 2);
                if xa && !xb {
                    // toggle 0 <-> z on b
                    image = if digits[b] == 0 { image + pow3[b] } else { image - pow3[b] };
                    digits[b] ^= 1;
                } else if xb && !xa {
                    image = if digits[a] == 0 { image + pow3[a] } else { image - pow3[a] };
                    digits[a] ^= 1;
                }
            }
            image
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    type M4 = [[C; 4]; 4];

    fn pauli_2x2(p: Pauli) -> [[C; 2]; 2] {
        let (o, z, i) = (C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 1.0));
        match p {
            Pauli::I => [[o, z], [z, o]],
            Pauli::X => [[z, o], [o, z]],
            Pauli::Y => [[z, -i], [i, z]],
            Pauli::Z => [[o, z], [z, -o]],
        }
    }

    // qubit 0 is the low bit of the 2-qubit basis index
    fn kron2(a: [[C; 2]; 2], b: [[C; 2]; 2]) -> M4 {
        let mut m = [[C::new(0.0, 0.0); 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                m[r][c] = a[r & 1][c & 1] * b[r >> 1][c >> 1];
            }
        }
        m
    }

    fn mul(a: &M4, b: &M4) -> M4 {
        let mut m = [[C::new(0.0, 0.0); 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                m[r][c] = (0..4).map(|k| a[r][k] * b[k][c]).sum();
            }
        }
        m
    }

    fn equal_up_to_sign(a: &M4, b: &M4) -> bool {
        let same = (0..16).all(|k| (a[k / 4][k % 4] - b[k / 4][k % 4]).norm() < 1e-12);
        let neg = (0..16).all(|k| (a[k / 4][k % 4] + b[k / 4][k % 4]).norm() < 1e-12);
        same || neg
    }

    #[test]
    fn pair_rule_matches_matrix_conjugation() {
        let mut cz = [[C::new(0.0, 0.0); 4]; 4];
        for (k, row) in cz.iter_mut().enumerate() {
            row[k] = C::new(if k == 3 { -1.0 } else { 1.0 }, 0.0);
        }
        for a in Pauli::ALL {
            for b in Pauli::ALL {
                let conj = mul(&mul(&cz, &kron2(pauli_2x2(a), pauli_2x2(b))), &cz);
                let (pa, pb) = cz_conjugate_pair(a, b);
                assert!(
                    equal_up_to_sign(&conj, &kron2(pauli_2x2(pa), pauli_2x2(pb))),
                    "{a:?}{b:?}"
                );
            }
        }
    }

    #[test]
    fn pair_examples() {
        assert_eq!(cz_conjugate_pair(Pauli::Z, Pauli::I), (Pauli::Z, Pauli::I));
        assert_eq!(cz_conjugate_pair(Pauli::X, Pauli::I), (Pauli::X, Pauli::Z));
        assert_eq!(cz_conjugate_pair(Pauli::X, Pauli::X), (Pauli::Y, Pauli::Y));
    }

    fn ps(s: &str) -> PauliString {
        PauliString::new(
            s.chars()
                .map(|c| match c {
                    '0' => Pauli::I,
                    'x' => Pauli::X,
                    'y' => Pauli::Y,
                    'z' => Pauli::Z,
                    _ => panic!("bad label"),
                })
                .collect(),
        )
    }

    fn rs(s: &str) -> ReducedString {
        ReducedString::new(
            s.chars()
                .map(|c| match c {
                    '0' => Reduced::I,
                    'z' => Reduced::Z,
                    'ξ' => Reduced::Xi,
                    _ => panic!("bad label"),
                })
                .collect(),
        )
    }

    // 8x8 oracle: conjugate the explicit 3-qubit operator by CZ(0,1) CZ(1,2)
    fn conj_oracle_3q(s: &PauliString) -> Vec<Vec<C>> {
        let dim = 8;
        let op = |i: usize, j: usize| -> C {
            (0..3)
                .map(|q| pauli_2x2(s.labels()[q])[(i >> q) & 1][(j >> q) & 1])
                .product()
        };
        let sign = |i: usize| -> f64 {
            let b = |q: usize| (i >> q) & 1;
            if (b(0) & b(1)) ^ (b(1) & b(2)) == 1 {
                -1.0
            } else {
                1.0
            }
        };
        (0..dim)
            .map(|i| (0..dim).map(|j| op(i, j) * sign(i) * sign(j)).collect())
            .collect()
    }

    fn explicit_3q(s: &PauliString) -> Vec<Vec<C>> {
        (0..8)
            .map(|i| {
                (0..8)
                    .map(|j| {
                        (0..3)
                            .map(|q| pauli_2x2(s.labels()[q])[(i >> q) & 1][(j >> q) & 1])
                            .product()
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn layer_examples_match_8x8_oracle() {
        let t = Topology::open_chain(3);
        for (input, expected) in [("x00", "xz0"), ("xx0", "yyz")] {
            let out = apply_cz_layer(&ps(input), &t).unwrap();
            assert_eq!(out, ps(expected));
            let oracle = conj_oracle_3q(&ps(input));
            let mine = explicit_3q(&out);
            let same = (0..64).all(|k| (oracle[k / 8][k % 8] - mine[k / 8][k % 8]).norm() < 1e-12);
            let neg = (0..64).all(|k| (oracle[k / 8][k % 8] + mine[k / 8][k % 8]).norm() < 1e-12);
            assert!(same || neg, "{input}");
        }
        assert_eq!(
            apply_cz_layer(&PauliString::identity(3), &t).unwrap(),
            PauliString::identity(3)
        );
    }

    #[test]
    fn reduced_examples() {
        let t = Topology::open_chain(2);
        assert_eq!(apply_cz_layer_reduced(&rs("ξ0"), &t).unwrap(), rs("ξz"));
        assert_eq!(apply_cz_layer_reduced(&rs("ξξ"), &t).unwrap(), rs("ξξ"));
        assert_eq!(apply_cz_layer_reduced(&rs("zz"), &t).unwrap(), rs("zz"));
    }

    #[test]
    fn reduce_and_lift() {
        assert_eq!(reduce(&ps("xyz")), rs("ξξz"));
        assert_eq!(lift_class(&rs("ξz")), vec![ps("xz"), ps("yz")]);
        assert_eq!(rs("ξξ0").multiplicity(), 4);
        assert_eq!(lift_class(&rs("ξξ0")).len(), 4);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let t = Topology::open_chain(3);
        assert!(matches!(
            apply_cz_layer(&ps("xx"), &t),
            Err(Error::DimensionMismatch { expected: 3, actual: 2 })
        ));
        assert!(apply_cz_layer_reduced(&rs("ξ"), &t).is_err());
    }

    #[test]
    fn index_roundtrip_exhaustive() {
        for n in 0..=5 {
            for i in 0..(1usize << (2 * n)) {
                assert_eq!(PauliString::from_index(i, n).index(), i);
            }
            for i in 0..3usize.pow(n as u32) {
                assert_eq!(ReducedString::from_index(i, n).index(), i);
            }
        }
        // qubit 0 is the least significant digit
        assert_eq!(ps("x0").index(), 1);
        assert_eq!(ps("0x").index(), 4);
        assert_eq!(rs("0ξ").index(), 6);
    }

    #[test]
    fn layer_is_a_permutation() {
        for n in 1..=6 {
            for t in [Topology::open_chain(n), Topology::closed_chain(n)] {
                let perm = cz_permutation_full(&t);
                let image: HashSet<usize> = perm.iter().copied().collect();
                assert_eq!(image.len(), 1 << (2 * n));
                let rperm = cz_permutation_reduced(&t);
                let rimage: HashSet<usize> = rperm.iter().copied().collect();
                assert_eq!(rimage.len(), 3usize.pow(n as u32));
            }
        }
    }

    #[test]
    fn reduction_commutes_with_layer_exhaustive() {
        for n in 1..=4 {
            for t in [Topology::open_chain(n), Topology::closed_chain(n)] {
                let rperm = cz_permutation_reduced(&t);
                for i in 0..(1usize << (2 * n)) {
                    let s = PauliString::from_index(i, n);
                    let lhs = reduce(&apply_cz_layer(&s, &t).unwrap());
                    let rhs = apply_cz_layer_reduced(&reduce(&s), &t).unwrap();
                    assert_eq!(lhs, rhs);
                    assert_eq!(rperm[reduce(&s).index()], rhs.index());
                }
            }
        }
    }

    #[test]
    fn topology_validation() {
        assert!(Topology::explicit(3, vec![(0, 0)]).is_err());
        assert!(Topology::explicit(3, vec![(0, 3)]).is_err());
        assert!(Topology::explicit(3, vec![(0, 1), (1, 0)]).is_err());
        assert!(Topology::explicit(3, vec![(0, 2), (1, 2)]).is_ok());
        assert_eq!(Topology::closed_chain(2).edges(), &[(0, 1)]);
        assert_eq!(Topology::closed_chain(4).edges().len(), 4);
    }
}
