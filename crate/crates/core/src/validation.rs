//! Invariant checks shared by the `validate` command and the test suites.

use crate::ansatz::Ansatz;
use crate::error::Result;
use crate::lattice::{
    build_hamiltonian, build_symmetry_generators, max_commutator, particle_number_basis, relevant_basis,
    total_hamiltonian, BasisForm, Encoding, ModelKind, ModelSpec, ReductionMode,
};
use crate::oracle::{detqite_coefficients, Spectrum};
use crate::pauli::{PauliString, PauliSum};
use crate::statevector::{ExpGenerator, StateVector};
use crate::symmetry::{c_matrix, fixed_point_residual, group_closure, tr_filter, CMatrix};
use crate::varqite::{evolve, EvolutionConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        CheckResult {
            name: name.into(),
            passed,
            detail,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub const ORTHOGONALITY_TOL: f64 = 1e-9;

/// Orthogonality and realness of one c-matrix.
pub fn check_c_matrix(name: &str, c: &CMatrix) -> CheckResult {
    let err = c.orthogonality_error();
    let real = c.is_real(ORTHOGONALITY_TOL);
    CheckResult::new(
        name,
        err <= ORTHOGONALITY_TOL && real,
        format!("||c c^T - I||_max = {err:.2e}, max imag {:.2e}", c.max_imag),
    )
}

fn square(kind: ModelKind) -> Result<ModelSpec> {
    ModelSpec::square(kind, if kind == ModelKind::Gauge || kind == ModelKind::Ising { 2 } else { 4 })
}

const LATTICE_MODELS: [ModelKind; 4] = [ModelKind::Ising, ModelKind::Potts, ModelKind::Clock, ModelKind::Gauge];

fn c_matrices() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for kind in LATTICE_MODELS {
        let spec = square(kind)?;
        let term = &build_hamiltonian(&spec)?[0];
        let basis: Vec<PauliString> = PauliString::all(term.qubits.len()).collect();
        for g in build_symmetry_generators(&spec)? {
            if !g.support.iter().any(|q| term.qubits.contains(q)) {
                continue;
            }
            let c = c_matrix(&g, &term.qubits, &basis, Some(1.0))?;
            out.push(check_c_matrix(&format!("c_matrix/{kind}/{}", g.label), &c));
        }
    }
    Ok(out)
}

fn u1_counts() -> Result<CheckResult> {
    let counts = [
        particle_number_basis(3, false)?.len(),
        particle_number_basis(3, true)?.len(),
        particle_number_basis(4, false)?.len(),
        particle_number_basis(4, true)?.len(),
    ];
    Ok(CheckResult::new(
        "u1_counts",
        counts == [19, 6, 69, 27],
        counts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("/"),
    ))
}

fn tr_law() -> CheckResult {
    let sizes: Vec<(usize, usize)> = (1..=5u32)
        .map(|n| {
            let all: Vec<PauliString> = PauliString::all(n as usize).collect();
            (tr_filter(&all).len(), (4usize.pow(n) - 2usize.pow(n)) / 2)
        })
        .collect();
    CheckResult::new(
        "tr_count_law",
        sizes.iter().all(|(a, b)| a == b),
        sizes.iter().map(|(a, _)| a.to_string()).collect::<Vec<_>>().join(" "),
    )
}

fn commutation() -> Result<Vec<CheckResult>> {
    let mut specs: Vec<ModelSpec> = LATTICE_MODELS.iter().map(|&k| square(k)).collect::<Result<_>>()?;
    specs.push(ModelSpec::hopping_chain(4, Encoding::Real)?);
    specs
        .iter()
        .map(|spec| {
            let err = max_commutator(spec, 0.7)?;
            Ok(CheckResult::new(
                &format!("commutation/{}", spec.kind),
                err <= 1e-10,
                format!("max |[U_g, H]| = {err:.2e}"),
            ))
        })
        .collect()
}

fn closure() -> Result<CheckResult> {
    let spec = square(ModelKind::Potts)?;
    let term = &build_hamiltonian(&spec)?[0];
    let basis: Vec<PauliString> = PauliString::all(term.qubits.len()).collect();
    let gens: Vec<_> = build_symmetry_generators(&spec)?
        .into_iter()
        .filter(|g| g.is_internal())
        .collect();
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for (i, g) in gens.iter().enumerate() {
        for h in &gens[i + 1..] {
            let (d2, d3, resid) = group_closure(g, h, &term.qubits, &basis)?;
            ok &= d2 == d3;
            worst = worst.max(resid);
        }
    }
    Ok(CheckResult::new(
        "group_closure/potts",
        ok && worst <= 1e-9,
        format!("{} generators, max residual {worst:.2e}", gens.len()),
    ))
}

/// Pseudo-inverse DetQITE coefficients on the symmetric initial state are a
/// fixed point of every c-matrix.
fn fixed_point() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for kind in LATTICE_MODELS {
        let spec = square(kind)?;
        let n = spec.n_qubits();
        let term = &build_hamiltonian(&spec)?[0];
        let gens = build_symmetry_generators(&spec)?;
        let basis: Vec<PauliString> = PauliString::all(term.qubits.len()).collect();
        let pool = basis
            .iter()
            .map(|s| ExpGenerator::new(&PauliSum::from_string(*s).embed(n, &term.qubits)?))
            .collect::<Result<Vec<_>>>()?;
        let a = detqite_coefficients(&term.embedded(n)?, &StateVector::init_plus(n)?, &pool)?;
        let r = fixed_point_residual(&a, &gens, &term.qubits, &basis)?;
        out.push(CheckResult::new(
            &format!("fixed_point/{kind}"),
            r <= 1e-8,
            format!("||c a - xi a||_inf = {r:.2e}"),
        ));
    }
    Ok(out)
}

fn table_counts() -> Result<Vec<CheckResult>> {
    let strings = [(ModelKind::Ising, 2usize), (ModelKind::Potts, 24), (ModelKind::Gauge, 8)];
    let mut out = Vec::new();
    for (kind, want) in strings {
        let rb = relevant_basis(&square(kind)?, ReductionMode::InternalPlusTr, BasisForm::Strings)?;
        let sizes: Vec<usize> = rb.iter().map(|(_, gb)| gb.len()).collect();
        out.push(CheckResult::new(
            &format!("relevant_strings/{kind}"),
            sizes.iter().all(|&s| s == want),
            format!("{sizes:?} per term, want {want}"),
        ));
    }
    let params = [
        (ModelKind::Potts, ReductionMode::TrOnly, 480usize),
        (ModelKind::Potts, ReductionMode::InternalPlusTr, 96),
        (ModelKind::Clock, ReductionMode::InternalPlusTr, 224),
        (ModelKind::Gauge, ReductionMode::InternalPlusTr, 32),
    ];
    for (kind, mode, want) in params {
        let spec = square(kind)?;
        let rb = relevant_basis(&spec, mode, BasisForm::Strings)?;
        let got = Ansatz::build(spec.n_qubits(), &rb, 1)?.n_params();
        out.push(CheckResult::new(
            &format!("n_params/{kind}/{mode}"),
            got == want,
            format!("{got}, want {want}"),
        ));
    }
    Ok(out)
}

/// Short noiseless Ising run: monotone energy, symmetric sector, and the
/// `beta = 2 tau` identity of the oracle.
fn ising_run() -> Result<Vec<CheckResult>> {
    let spec = square(ModelKind::Ising)?;
    let n = spec.n_qubits();
    let h = total_hamiltonian(&spec, &build_hamiltonian(&spec)?)?;
    let rb = relevant_basis(&spec, ReductionMode::InternalPlusTr, BasisForm::Combined)?;
    let a = Ansatz::build(n, &rb, 1)?;
    let trace = evolve(&a, &EvolutionConfig::default(), &h)?;
    let rise = trace
        .energies()
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);

    let gens: Vec<_> = build_symmetry_generators(&spec)?
        .into_iter()
        .filter(|g| g.is_internal())
        .collect();
    let psi0 = a.initial()?;
    let mut leak: f64 = 0.0;
    for row in &trace.rows {
        let phi = crate::statevector::run_ansatz(&a, &row.theta, &psi0)?;
        for g in &gens {
            let ug = g.apply_unitary(phi.amplitudes(), n, None)?;
            let v = crate::statevector::inner(phi.amplitudes(), &ug);
            leak = leak.max((v - 1.0).norm());
        }
    }

    let sp = Spectrum::of(&h)?;
    let plus = StateVector::init_plus(n)?;
    let mut ident: f64 = 0.0;
    for beta in [0.2, 1.0, 2.0] {
        let lhs = sp.gibbs_expectation(&h, beta)?;
        ident = ident.max((lhs - sp.exact_qite(&plus, beta / 2.0)?.expectation(&h)?).abs());
    }
    Ok(vec![
        CheckResult::new("varqite/monotone", rise <= 1e-6, format!("max step rise {rise:.2e}")),
        CheckResult::new("varqite/sector", leak <= 1e-8, format!("max |<phi|U_g|phi> - 1| = {leak:.2e}")),
        CheckResult::new("oracle/beta_2tau", ident <= 1e-9, format!("max deviation {ident:.2e}")),
    ])
}

/// Default suite.
pub fn run_suite() -> Result<ValidationReport> {
    let mut checks = c_matrices()?;
    checks.push(u1_counts()?);
    checks.push(tr_law());
    checks.extend(commutation()?);
    checks.push(closure()?);
    checks.extend(fixed_point()?);
    checks.extend(table_counts()?);
    checks.extend(ising_run()?);
    Ok(ValidationReport { checks })
}
