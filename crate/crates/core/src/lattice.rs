//! Small 2d lattices, the statistical and hopping model Hamiltonians built
//! on them, and their symmetry generating sets.
//!
//! Node models (Ising, Potts, clock) put `P = log2 Q` qubits on every node;
//! the gauge model puts them on every link. States `k = 0..Q` are binary
//! encoded with the first qubit of a group as the most significant bit.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{decompose_diagonal, PauliString, PauliSum, DEFAULT_DENSE_CAP};
use crate::symmetry::{
    qubit_bit, solve_constraints, Factor, GeneratorBasis, LocalOp, SymmetryGenerator,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    X,
    Y,
}

/// A directed edge from `from` to its neighbor `to` along `dir`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Link {
    pub from: usize,
    pub to: usize,
    pub dir: Direction,
}

/// Four links of a plaquette at node `n`: `x(n), y(n+x), x(n+y), y(n)`,
/// entering the plaquette angle with signs `+, +, -, -`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Plaquette {
    pub origin: usize,
    pub links: [usize; 4],
}

pub const PLAQUETTE_SIGNS: [i64; 4] = [1, 1, -1, -1];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    pub lx: usize,
    pub ly: usize,
    pub boundary: Boundary,
}

impl Lattice {
    pub fn new(lx: usize, ly: usize, boundary: Boundary) -> Result<Self> {
        if lx == 0 || ly == 0 {
            return Err(Error::Config(format!("lattice {lx}x{ly} has no sites")));
        }
        Ok(Lattice { lx, ly, boundary })
    }

    pub fn n_nodes(&self) -> usize {
        self.lx * self.ly
    }

    pub fn node(&self, x: usize, y: usize) -> usize {
        y * self.lx + x
    }

    pub fn coords(&self, n: usize) -> (usize, usize) {
        (n % self.lx, n / self.lx)
    }

    /// Neighbor of `n` one step along `dir`, if the boundary allows it.
    pub fn neighbor(&self, n: usize, dir: Direction) -> Option<usize> {
        let (x, y) = self.coords(n);
        let (len, pos) = match dir {
            Direction::X => (self.lx, x),
            Direction::Y => (self.ly, y),
        };
        let next = if pos + 1 < len {
            pos + 1
        } else if self.boundary == Boundary::Periodic && len > 1 {
            0
        } else {
            return None;
        };
        Some(match dir {
            Direction::X => self.node(next, y),
            Direction::Y => self.node(x, next),
        })
    }

    /// Unordered nearest-neighbor pairs, each once, sorted.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for n in 0..self.n_nodes() {
            for dir in [Direction::X, Direction::Y] {
                if let Some(m) = self.neighbor(n, dir) {
                    out.push((n.min(m), n.max(m)));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Horizontal links (row-major by origin) followed by vertical ones.
    pub fn links(&self) -> Vec<Link> {
        let mut out = Vec::new();
        for dir in [Direction::X, Direction::Y] {
            for n in 0..self.n_nodes() {
                if let Some(m) = self.neighbor(n, dir) {
                    out.push(Link { from: n, to: m, dir });
                }
            }
        }
        out
    }

    pub fn link_index(&self, from: usize, dir: Direction) -> Option<usize> {
        self.links().iter().position(|l| l.from == from && l.dir == dir)
    }

    pub fn plaquettes(&self) -> Vec<Plaquette> {
        let mut out = Vec::new();
        for n in 0..self.n_nodes() {
            let (Some(nx), Some(ny)) = (self.neighbor(n, Direction::X), self.neighbor(n, Direction::Y)) else {
                continue;
            };
            let ids = [
                self.link_index(n, Direction::X),
                self.link_index(nx, Direction::Y),
                self.link_index(ny, Direction::X),
                self.link_index(n, Direction::Y),
            ];
            if let [Some(a), Some(b), Some(c), Some(d)] = ids {
                out.push(Plaquette {
                    origin: n,
                    links: [a, b, c, d],
                });
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Ising,
    Potts,
    Clock,
    Gauge,
    Hopping,
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ising" => Ok(ModelKind::Ising),
            "potts" => Ok(ModelKind::Potts),
            "clock" => Ok(ModelKind::Clock),
            "gauge" => Ok(ModelKind::Gauge),
            "hopping" => Ok(ModelKind::Hopping),
            other => Err(Error::UnsupportedModel(other.to_string())),
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ModelKind::Ising => "ising",
            ModelKind::Potts => "potts",
            ModelKind::Clock => "clock",
            ModelKind::Gauge => "gauge",
            ModelKind::Hopping => "hopping",
        };
        f.write_str(s)
    }
}

/// Jordan-Wigner variant of the hopping term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Encoding {
    /// `(XX + YY)/2`, real matrix.
    Real,
    /// `(YX - XY)/2`, purely imaginary matrix.
    Imaginary,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub q: usize,
    pub lattice: Lattice,
    pub encoding: Encoding,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, q: usize, lattice: Lattice) -> Result<Self> {
        let spec = ModelSpec {
            kind,
            q,
            lattice,
            encoding: Encoding::Real,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The 2x2 layouts used for thermal experiments: open bonds for node
    /// models, periodic links for the gauge model.
    pub fn square(kind: ModelKind, q: usize) -> Result<Self> {
        let boundary = match kind {
            ModelKind::Gauge => Boundary::Periodic,
            _ => Boundary::Open,
        };
        Self::new(kind, q, Lattice::new(2, 2, boundary)?)
    }

    pub fn hopping_chain(n: usize, encoding: Encoding) -> Result<Self> {
        let mut spec = Self::new(ModelKind::Hopping, 2, Lattice::new(n, 1, Boundary::Open)?)?;
        spec.encoding = encoding;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.q < 2 || !self.q.is_power_of_two() {
            return Err(Error::UnsupportedModel(format!("Q = {} is not a power of two >= 2", self.q)));
        }
        match self.kind {
            ModelKind::Ising if self.q != 2 => {
                return Err(Error::UnsupportedModel("Ising needs Q = 2".into()));
            }
            ModelKind::Hopping if self.lattice.ly != 1 => {
                return Err(Error::UnsupportedModel("hopping runs on a 1d chain (ly = 1)".into()));
            }
            ModelKind::Hopping if self.q != 2 => {
                return Err(Error::UnsupportedModel("hopping needs Q = 2".into()));
            }
            _ => {}
        }
        if self.n_qubits() > 64 {
            return Err(Error::CapExceeded {
                what: "register qubits",
                value: self.n_qubits(),
                cap: 64,
            });
        }
        Ok(())
    }

    /// Qubits per node or link.
    pub fn p(&self) -> usize {
        self.q.trailing_zeros() as usize
    }

    pub fn n_qubits(&self) -> usize {
        match self.kind {
            ModelKind::Gauge => self.p() * self.lattice.links().len(),
            ModelKind::Hopping => self.lattice.lx,
            _ => self.p() * self.lattice.n_nodes(),
        }
    }

    /// Qubits of node `n` (or link `n` for the gauge model).
    pub fn site_qubits(&self, n: usize) -> Vec<usize> {
        let p = self.p();
        (n * p..(n + 1) * p).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalTerm {
    /// Operator on the local qubits, letters in `qubits` order.
    pub operator: PauliSum,
    /// Register qubits, ascending.
    pub qubits: Vec<usize>,
    pub label: String,
}

impl LocalTerm {
    pub fn embedded(&self, n: usize) -> Result<PauliSum> {
        self.operator.embed(n, &self.qubits)
    }
}

/// Binary value of the `P`-qubit group at local positions `pos` in index `x`.
fn group_value(x: usize, k: usize, pos: &[usize]) -> usize {
    pos.iter()
        .fold(0, |acc, &q| (acc << 1) | ((x & qubit_bit(k, q)) != 0) as usize)
}

/// Diagonal local term `f(k_1, .., k_g)` over groups of local positions.
fn diagonal_term(k: usize, groups: &[Vec<usize>], f: impl Fn(&[usize]) -> f64) -> Result<PauliSum> {
    let diag: Vec<Complex64> = (0..1usize << k)
        .map(|x| {
            let vals: Vec<usize> = groups.iter().map(|g| group_value(x, k, g)).collect();
            Complex64::new(f(&vals), 0.0)
        })
        .collect();
    decompose_diagonal(&diag)
}

fn positions(sorted: &[usize], qubits: &[usize]) -> Vec<usize> {
    qubits
        .iter()
        .map(|q| sorted.iter().position(|s| s == q).expect("qubit in support"))
        .collect()
}

pub fn build_hamiltonian(spec: &ModelSpec) -> Result<Vec<LocalTerm>> {
    spec.validate()?;
    let q = spec.q as f64;
    let mut out = Vec::new();
    match spec.kind {
        ModelKind::Ising | ModelKind::Potts | ModelKind::Clock => {
            for (a, b) in spec.lattice.bonds() {
                let (qa, qb) = (spec.site_qubits(a), spec.site_qubits(b));
                let mut support: Vec<usize> = qa.iter().chain(&qb).copied().collect();
                support.sort_unstable();
                let groups = vec![positions(&support, &qa), positions(&support, &qb)];
                let kind = spec.kind;
                let op = diagonal_term(support.len(), &groups, |v| match kind {
                    ModelKind::Clock => -(2.0 * PI * (v[0] as f64 - v[1] as f64) / q).cos(),
                    ModelKind::Potts => -((v[0] == v[1]) as u8 as f64),
                    _ => {
                        if v[0] == v[1] {
                            -1.0
                        } else {
                            1.0
                        }
                    }
                })?;
                out.push(LocalTerm {
                    operator: op,
                    qubits: support,
                    label: format!("bond({a},{b})"),
                });
            }
        }
        ModelKind::Gauge => {
            for p in spec.lattice.plaquettes() {
                let link_qubits: Vec<Vec<usize>> = p.links.iter().map(|&l| spec.site_qubits(l)).collect();
                let mut support: Vec<usize> = link_qubits.iter().flatten().copied().collect();
                support.sort_unstable();
                support.dedup();
                if support.len() != 4 * spec.p() {
                    return Err(Error::UnsupportedModel(
                        "plaquette touches a link twice; lattice too small".into(),
                    ));
                }
                let groups: Vec<Vec<usize>> = link_qubits.iter().map(|g| positions(&support, g)).collect();
                let op = diagonal_term(support.len(), &groups, |v| {
                    let total: i64 = v.iter().zip(PLAQUETTE_SIGNS).map(|(&k, s)| s * k as i64).sum();
                    -(2.0 * PI * total as f64 / q).cos()
                })?;
                out.push(LocalTerm {
                    operator: op,
                    qubits: support,
                    label: format!("plaquette({})", p.origin),
                });
            }
        }
        ModelKind::Hopping => {
            for i in 0..spec.lattice.lx.saturating_sub(1) {
                let text = match spec.encoding {
                    Encoding::Real => "0.5*XX + 0.5*YY",
                    Encoding::Imaginary => "0.5*YX - 0.5*XY",
                };
                out.push(LocalTerm {
                    operator: text.parse()?,
                    qubits: vec![i, i + 1],
                    label: format!("hop({i},{})", i + 1),
                });
            }
        }
    }
    Ok(out)
}

/// Sum of all local terms on the full register.
pub fn total_hamiltonian(spec: &ModelSpec, terms: &[LocalTerm]) -> Result<PauliSum> {
    let n = spec.n_qubits();
    terms
        .iter()
        .try_fold(PauliSum::zero(n), |acc, t| acc.add(&t.embedded(n)?))
}

/// Same permutation of the `Q` states on every site in `sites`.
fn site_permutation(spec: &ModelSpec, label: String, sites: &[(usize, Vec<usize>)]) -> Result<SymmetryGenerator> {
    let factors = sites
        .iter()
        .map(|(s, perm)| Factor::new(spec.site_qubits(*s), LocalOp::permutation(perm.clone())))
        .collect::<Result<Vec<_>>>()?;
    Ok(SymmetryGenerator::unitary(label, factors))
}

fn shift(q: usize, by: isize) -> Vec<usize> {
    (0..q).map(|k| (k as isize + by).rem_euclid(q as isize) as usize).collect()
}

pub fn build_symmetry_generators(spec: &ModelSpec) -> Result<Vec<SymmetryGenerator>> {
    spec.validate()?;
    let n = spec.n_qubits();
    let q = spec.q;
    let nodes = spec.lattice.n_nodes();
    let mut out = Vec::new();
    match spec.kind {
        ModelKind::Ising => {
            let sites: Vec<_> = (0..nodes).map(|s| (s, vec![1, 0])).collect();
            out.push(site_permutation(spec, "prod X".into(), &sites)?);
        }
        ModelKind::Potts => {
            let mut pairs: Vec<(usize, usize)> = (0..q).map(|a| (a.min((a + 1) % q), a.max((a + 1) % q))).collect();
            pairs.sort_unstable();
            pairs.dedup();
            for (a, b) in pairs {
                let mut perm: Vec<usize> = (0..q).collect();
                perm.swap(a, b);
                let sites: Vec<_> = (0..nodes).map(|s| (s, perm.clone())).collect();
                out.push(site_permutation(spec, format!("S{q} ({a} {b})"), &sites)?);
            }
        }
        ModelKind::Clock => {
            let sites: Vec<_> = (0..nodes).map(|s| (s, shift(q, 1))).collect();
            out.push(site_permutation(spec, format!("Z{q} shift"), &sites)?);
        }
        ModelKind::Gauge => {
            let lat = &spec.lattice;
            for node in 0..nodes {
                let mut sites = Vec::new();
                for dir in [Direction::X, Direction::Y] {
                    if let Some(l) = lat.link_index(node, dir) {
                        sites.push((l, shift(q, 1)));
                    }
                    let incoming = lat.links().iter().position(|l| l.to == node && l.dir == dir);
                    if let Some(l) = incoming {
                        sites.push((l, shift(q, -1)));
                    }
                }
                out.push(site_permutation(spec, format!("G({node})"), &sites)?);
            }
        }
        ModelKind::Hopping => {
            out.push(SymmetryGenerator::u1((0..n).collect()));
            if spec.encoding == Encoding::Real {
                out.push(SymmetryGenerator::conjugation(n));
            }
            return Ok(out);
        }
    }
    out.push(SymmetryGenerator::conjugation(n));
    Ok(out)
}

/// Which symmetries constrain the relevant generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionMode {
    None,
    TrOnly,
    InternalOnly,
    InternalPlusTr,
}

impl std::str::FromStr for ReductionMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(ReductionMode::None),
            "tr_only" => Ok(ReductionMode::TrOnly),
            "internal_only" => Ok(ReductionMode::InternalOnly),
            "internal_plus_tr" => Ok(ReductionMode::InternalPlusTr),
            other => Err(Error::Config(format!("unknown reduction mode `{other}`"))),
        }
    }
}

impl std::fmt::Display for ReductionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ReductionMode::None => "none",
            ReductionMode::TrOnly => "tr_only",
            ReductionMode::InternalOnly => "internal_only",
            ReductionMode::InternalPlusTr => "internal_plus_tr",
        })
    }
}

/// How a reduced basis is turned into ansatz generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisForm {
    /// One exponential per relevant Pauli string.
    Strings,
    /// One exponential per symmetric linear combination.
    Combined,
}

impl std::str::FromStr for BasisForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "strings" => Ok(BasisForm::Strings),
            "combined" => Ok(BasisForm::Combined),
            other => Err(Error::Config(format!("unknown basis form `{other}`"))),
        }
    }
}

pub fn select_generators(all: &[SymmetryGenerator], mode: ReductionMode) -> Vec<SymmetryGenerator> {
    all.iter()
        .filter(|g| match mode {
            ReductionMode::None => false,
            ReductionMode::TrOnly => !g.is_internal(),
            ReductionMode::InternalOnly => g.is_internal(),
            ReductionMode::InternalPlusTr => true,
        })
        .cloned()
        .collect()
}

/// Reduced basis of each local term.
pub fn relevant_basis(spec: &ModelSpec, mode: ReductionMode, form: BasisForm) -> Result<Vec<(LocalTerm, GeneratorBasis)>> {
    let terms = build_hamiltonian(spec)?;
    let gens = select_generators(&build_symmetry_generators(spec)?, mode);
    terms
        .into_iter()
        .map(|t| {
            let basis: Vec<PauliString> = PauliString::all(t.qubits.len()).collect();
            let gb = solve_constraints(&gens, &t.qubits, &basis)?;
            if gb.is_empty() {
                return Err(Error::EmptyBasis(t.label.clone()));
            }
            let gb = match form {
                BasisForm::Strings => gb.string_split(),
                BasisForm::Combined => gb,
            };
            Ok((t, gb))
        })
        .collect()
}

/// U(1) (and optionally TR) symmetric generators on `n` qubits, identity excluded.
pub fn particle_number_basis(n: usize, with_tr: bool) -> Result<GeneratorBasis> {
    let qubits: Vec<usize> = (0..n).collect();
    let mut gens = vec![SymmetryGenerator::u1(qubits.clone())];
    if with_tr {
        gens.push(SymmetryGenerator::conjugation(n));
    }
    let basis: Vec<PauliString> = PauliString::all(n).collect();
    solve_constraints(&gens, &qubits, &basis)
}

/// Dense check that every internal generator commutes with the Hamiltonian.
pub fn max_commutator(spec: &ModelSpec, alpha: f64) -> Result<f64> {
    let n = spec.n_qubits();
    if n > DEFAULT_DENSE_CAP {
        return Err(Error::CapExceeded {
            what: "dense matrix qubits",
            value: n,
            cap: DEFAULT_DENSE_CAP,
        });
    }
    let h = total_hamiltonian(spec, &build_hamiltonian(spec)?)?.dense_matrix()?;
    let dim = 1usize << n;
    let mut worst: f64 = 0.0;
    for g in build_symmetry_generators(spec)?.iter().filter(|g| g.is_internal()) {
        let mut u = DMatrix::<Complex64>::zeros(dim, dim);
        for c in 0..dim {
            let mut e = vec![Complex64::new(0.0, 0.0); dim];
            e[c] = Complex64::new(1.0, 0.0);
            let col = g.apply_unitary(&e, n, Some(alpha))?;
            for (r, v) in col.into_iter().enumerate() {
                u[(r, c)] = v;
            }
        }
        worst = worst.max((&u * &h - &h * &u).camax());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lines(gb: &GeneratorBasis) -> Vec<String> {
        gb.to_lines()
    }

    #[test]
    fn periodic_square_layout() {
        let lat = Lattice::new(2, 2, Boundary::Periodic).unwrap();
        assert_eq!(lat.n_nodes(), 4);
        assert_eq!(lat.links().len(), 8);
        assert_eq!(lat.plaquettes().len(), 4);
        assert_eq!(lat.bonds(), [(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(Lattice::new(2, 2, Boundary::Open).unwrap().bonds().len(), 4);
        assert_eq!(lat.plaquettes()[0].links, [0, 5, 2, 4]);
    }

    #[test]
    fn potts_bond_strings() {
        let spec = ModelSpec::new(ModelKind::Potts, 4, Lattice::new(2, 1, Boundary::Open).unwrap()).unwrap();
        let terms = build_hamiltonian(&spec).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].operator.to_string(), "-0.25*IIII - 0.25*IZIZ - 0.25*ZIZI - 0.25*ZZZZ");
    }

    #[test]
    fn gauge_z2_plaquette() {
        let spec = ModelSpec::square(ModelKind::Gauge, 2).unwrap();
        let terms = build_hamiltonian(&spec).unwrap();
        assert_eq!(terms.len(), 4);
        assert_eq!(terms[0].qubits, [0, 2, 4, 5]);
        for t in &terms {
            assert_eq!(t.operator.to_string(), "-ZZZZ");
        }
    }

    #[test]
    fn clock_two_is_ising() {
        let lat = Lattice::new(2, 1, Boundary::Open).unwrap();
        let spec = ModelSpec::new(ModelKind::Clock, 2, lat).unwrap();
        assert_eq!(build_hamiltonian(&spec).unwrap()[0].operator.to_string(), "-ZZ");
    }

    #[test]
    fn generators_commute_with_hamiltonians() {
        for (kind, q) in [
            (ModelKind::Ising, 2),
            (ModelKind::Potts, 4),
            (ModelKind::Clock, 4),
            (ModelKind::Gauge, 2),
        ] {
            let spec = ModelSpec::square(kind, q).unwrap();
            assert!(max_commutator(&spec, 0.0).unwrap() < 1e-12, "{kind}");
        }
        let spec = ModelSpec::hopping_chain(4, Encoding::Real).unwrap();
        assert!(max_commutator(&spec, 0.9).unwrap() < 1e-12);
    }

    #[test]
    fn ising_square_generator_is_global_x() {
        let spec = ModelSpec::square(ModelKind::Ising, 2).unwrap();
        let gens = build_symmetry_generators(&spec).unwrap();
        assert_eq!(gens.len(), 2);
        assert_eq!(gens[0].support, [0, 1, 2, 3]);
    }

    #[test]
    fn ising_relevant_basis() {
        let spec = ModelSpec::square(ModelKind::Ising, 2).unwrap();
        for (_, gb) in relevant_basis(&spec, ReductionMode::InternalPlusTr, BasisForm::Strings).unwrap() {
            assert_eq!(lines(&gb), ["YZ", "ZY"]);
        }
    }

    #[test]
    fn gauge_relevant_basis() {
        let spec = ModelSpec::square(ModelKind::Gauge, 2).unwrap();
        let all = relevant_basis(&spec, ReductionMode::InternalPlusTr, BasisForm::Strings).unwrap();
        let mut got = lines(&all[0].1);
        got.sort();
        let mut want = ["ZZZY", "ZZYZ", "ZYZZ", "YZZZ", "YYYZ", "YYZY", "YZYY", "ZYYY"];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn particle_number_three_qubits() {
        assert_eq!(particle_number_basis(3, false).unwrap().len(), 19);
        assert_eq!(particle_number_basis(3, true).unwrap().len(), 6);
    }
}
