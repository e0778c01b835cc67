//! Layered, ladder-ordered ansatz built from per-term generator bases, and
//! its naive gate-level compilation.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::LocalTerm;
use crate::pauli::{Pauli, PauliSum};
use crate::statevector::{ExpGenerator, StateVector};
use crate::symmetry::GeneratorBasis;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialState {
    /// `|+>^n`, invariant under every permutation symmetry.
    Plus,
}

/// One parameterized exponential `e^{-i theta G}`.
#[derive(Clone, Debug)]
pub struct Block {
    /// Generator on the full register.
    pub generator: PauliSum,
    pub support: Vec<usize>,
    pub param: usize,
    pub layer: usize,
    pub term_label: String,
    pub(crate) exp: ExpGenerator,
}

#[derive(Clone, Debug)]
pub struct Ansatz {
    n_qubits: usize,
    layers: usize,
    blocks: Vec<Block>,
    pub initial_state: InitialState,
}

/// Key of the ladder order: smallest, then largest support qubit.
fn ladder_key(t: &LocalTerm) -> (usize, usize, Vec<usize>) {
    let lo = t.qubits.iter().copied().min().unwrap_or(0);
    let hi = t.qubits.iter().copied().max().unwrap_or(0);
    (lo, hi, t.qubits.clone())
}

impl Ansatz {
    /// `layers` repetitions of every term's generators, terms in ladder order.
    pub fn build(n_qubits: usize, terms: &[(LocalTerm, GeneratorBasis)], layers: usize) -> Result<Self> {
        if layers == 0 {
            return Err(Error::Config("ansatz needs at least one layer".into()));
        }
        let mut ordered: Vec<&(LocalTerm, GeneratorBasis)> = terms.iter().collect();
        ordered.sort_by_key(|(t, _)| ladder_key(t));

        let mut per_term = Vec::new();
        for (t, gb) in &ordered {
            if gb.is_empty() {
                return Err(Error::EmptyBasis(t.label.clone()));
            }
            let gens = gb.embedded(n_qubits)?;
            let compiled = gens.iter().map(ExpGenerator::new).collect::<Result<Vec<_>>>()?;
            per_term.push((t, gens, compiled));
        }

        let mut blocks = Vec::new();
        for layer in 0..layers {
            for (t, gens, compiled) in &per_term {
                for (g, exp) in gens.iter().zip(compiled) {
                    blocks.push(Block {
                        generator: g.clone(),
                        support: g.support(),
                        param: blocks.len(),
                        layer,
                        term_label: t.label.clone(),
                        exp: exp.clone(),
                    });
                }
            }
        }
        Ok(Ansatz {
            n_qubits,
            layers,
            blocks,
            initial_state: InitialState::Plus,
        })
    }

    /// Ansatz with no blocks.
    pub fn empty(n_qubits: usize) -> Self {
        Ansatz {
            n_qubits,
            layers: 0,
            blocks: Vec::new(),
            initial_state: InitialState::Plus,
        }
    }

    /// Ansatz from explicit generators, applied in the given order.
    pub fn from_generators(n_qubits: usize, generators: &[PauliSum]) -> Result<Self> {
        let blocks = generators
            .iter()
            .enumerate()
            .map(|(k, g)| {
                if g.n_qubits() != n_qubits {
                    return Err(Error::LengthMismatch {
                        left: n_qubits,
                        right: g.n_qubits(),
                    });
                }
                Ok(Block {
                    generator: g.clone(),
                    support: g.support(),
                    param: k,
                    layer: 0,
                    term_label: String::new(),
                    exp: ExpGenerator::new(g)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Ansatz {
            n_qubits,
            layers: 1,
            blocks,
            initial_state: InitialState::Plus,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn n_params(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn initial(&self) -> Result<StateVector> {
        match self.initial_state {
            InitialState::Plus => StateVector::init_plus(self.n_qubits),
        }
    }

    pub fn counts_report(&self) -> CountsReport {
        CountsReport {
            n_params: self.n_params(),
            naive_cnots: self.compile_naive().ok().map(|g| g.cnot_count()),
        }
    }

    /// Textbook compilation of single-string exponentials.
    pub fn compile_naive(&self) -> Result<GateList> {
        let mut gates = Vec::new();
        for b in &self.blocks {
            let (s, coef) = b
                .generator
                .as_single_string()
                .ok_or_else(|| Error::NotNaiveCompilable(b.generator.to_string()))?;
            let support = s.support();
            let Some(&last) = support.last() else {
                // identity generator: global phase only
                continue;
            };
            let change: Vec<Gate> = support
                .iter()
                .filter_map(|&q| match s.letter(q) {
                    Pauli::X => Some(Gate::H(q)),
                    Pauli::Y => Some(Gate::Rx(q, FRAC_PI_2)),
                    _ => None,
                })
                .collect();
            let ladder: Vec<Gate> = support
                .windows(2)
                .map(|w| Gate::Cnot {
                    control: w[0],
                    target: w[1],
                })
                .collect();
            gates.extend(change.iter().copied());
            gates.extend(ladder.iter().copied());
            gates.push(Gate::Rz {
                qubit: last,
                param: b.param,
                scale: 2.0 * coef,
            });
            gates.extend(ladder.iter().rev().copied());
            gates.extend(change.iter().rev().map(Gate::inverse));
        }
        Ok(GateList { n_qubits: self.n_qubits, gates })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountsReport {
    pub n_params: usize,
    /// `None` when some generator is not a single string.
    pub naive_cnots: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    /// `e^{-i angle X / 2}`.
    Rx(usize, f64),
    /// `e^{-i scale theta[param] Z / 2}`.
    Rz { qubit: usize, param: usize, scale: f64 },
    Cnot { control: usize, target: usize },
}

impl Gate {
    fn inverse(&self) -> Gate {
        match *self {
            Gate::Rx(q, a) => Gate::Rx(q, -a),
            Gate::Rz { qubit, param, scale } => Gate::Rz {
                qubit,
                param,
                scale: -scale,
            },
            g => g,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GateList {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl GateList {
    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Cnot { .. })).count()
    }

    pub fn simulate(&self, theta: &[f64], psi: &StateVector) -> Result<StateVector> {
        let mut s = psi.clone();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let r = |x: f64| Complex64::new(x, 0.0);
        for g in &self.gates {
            match *g {
                Gate::H(q) => s.apply_single_qubit(q, [[r(h), r(h)], [r(h), r(-h)]]),
                Gate::Rx(q, a) => {
                    let (sn, cs) = (a / 2.0).sin_cos();
                    let m = Complex64::new(0.0, -sn);
                    s.apply_single_qubit(q, [[r(cs), m], [m, r(cs)]]);
                }
                Gate::Rz { qubit, param, scale } => {
                    let t = *theta.get(param).ok_or(Error::IndexOutOfRange {
                        index: param,
                        len: theta.len(),
                    })?;
                    let half = scale * t / 2.0;
                    let z = Complex64::new(0.0, 0.0);
                    s.apply_single_qubit(
                        qubit,
                        [[Complex64::from_polar(1.0, -half), z], [z, Complex64::from_polar(1.0, half)]],
                    );
                }
                Gate::Cnot { control, target } => s.apply_cnot(control, target),
            }
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_hamiltonian, relevant_basis, BasisForm, ModelKind, ModelSpec, ReductionMode};
    use crate::statevector::run_ansatz;

    fn ansatz(kind: ModelKind, q: usize, mode: ReductionMode) -> Ansatz {
        let spec = ModelSpec::square(kind, q).unwrap();
        let rb = relevant_basis(&spec, mode, BasisForm::Strings).unwrap();
        Ansatz::build(spec.n_qubits(), &rb, 1).unwrap()
    }

    #[test]
    fn ising_counts() {
        let a = ansatz(ModelKind::Ising, 2, ReductionMode::InternalPlusTr);
        assert_eq!(a.counts_report(), CountsReport { n_params: 8, naive_cnots: Some(16) });
    }

    #[test]
    fn gauge_counts() {
        let a = ansatz(ModelKind::Gauge, 2, ReductionMode::InternalPlusTr);
        assert_eq!(a.counts_report(), CountsReport { n_params: 32, naive_cnots: Some(192) });
    }

    #[test]
    fn single_zy_compiles_to_two_cnots() {
        let a = Ansatz::from_generators(2, &["ZY".parse().unwrap()]).unwrap();
        assert_eq!(a.compile_naive().unwrap().cnot_count(), 2);
    }

    #[test]
    fn multi_string_is_not_naive_compilable() {
        let a = Ansatz::from_generators(2, &["XY - YX".parse().unwrap()]).unwrap();
        assert!(matches!(a.compile_naive(), Err(Error::NotNaiveCompilable(_))));
        assert_eq!(a.counts_report().naive_cnots, None);
    }

    #[test]
    fn empty_ansatz_counts() {
        assert_eq!(Ansatz::empty(3).counts_report(), CountsReport { n_params: 0, naive_cnots: Some(0) });
    }

    #[test]
    fn blocks_follow_ladder_order() {
        let spec = ModelSpec::square(ModelKind::Ising, 2).unwrap();
        let mut rb = relevant_basis(&spec, ReductionMode::InternalPlusTr, BasisForm::Strings).unwrap();
        rb.reverse();
        let a = Ansatz::build(4, &rb, 2).unwrap();
        let labels: Vec<&str> = a.blocks().iter().step_by(2).map(|b| b.term_label.as_str()).collect();
        assert_eq!(
            labels,
            ["bond(0,1)", "bond(0,2)", "bond(1,3)", "bond(2,3)", "bond(0,1)", "bond(0,2)", "bond(1,3)", "bond(2,3)"]
        );
        assert_eq!(build_hamiltonian(&spec).unwrap().len(), 4);
        assert!(a.blocks().iter().enumerate().all(|(k, b)| b.param == k));
    }

    #[test]
    fn zero_parameters_act_as_identity() {
        let a = ansatz(ModelKind::Ising, 2, ReductionMode::TrOnly);
        let psi = StateVector::basis_state(4, 5).unwrap();
        let out = run_ansatz(&a, &vec![0.0; a.n_params()], &psi).unwrap();
        assert_eq!(out, psi);
    }
}
