use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use symqite_core::lattice::total_hamiltonian;
use symqite_core::statevector::CompiledSum;
use symqite_core::varqite::compute_m_v;
use symqite_core::*;

fn potts() -> ModelSpec {
    ModelSpec::square(ModelKind::Potts, 4).unwrap()
}

fn exponentials(c: &mut Criterion) {
    let spec = potts();
    let rb = relevant_basis(&spec, ReductionMode::InternalPlusTr, BasisForm::Combined).unwrap();
    let combined = rb[0].1.embedded(8).unwrap().into_iter().max_by_key(|g| g.len()).unwrap();
    let single: PauliSum = "ZYZZIIII".parse().unwrap();
    let psi = StateVector::init_plus(8).unwrap();
    c.bench_function("apply_exponential/single_string_8q", |b| {
        b.iter(|| {
            let mut s = psi.clone();
            s.apply_exponential(black_box(&single), 0.3).unwrap();
            s
        })
    });
    c.bench_function("apply_exponential/combined_4q_support_8q", |b| {
        b.iter(|| {
            let mut s = psi.clone();
            s.apply_exponential(black_box(&combined), 0.3).unwrap();
            s
        })
    });
}

fn metric(c: &mut Criterion) {
    let spec = potts();
    let h = total_hamiltonian(&spec, &build_hamiltonian(&spec).unwrap()).unwrap();
    let hc = CompiledSum::new(&h, 8).unwrap();
    let mut group = c.benchmark_group("compute_m_v");
    group.sample_size(10);
    for mode in [ReductionMode::InternalPlusTr, ReductionMode::TrOnly] {
        let rb = relevant_basis(&spec, mode, BasisForm::Strings).unwrap();
        let a = Ansatz::build(8, &rb, 1).unwrap();
        let theta: Vec<f64> = (0..a.n_params()).map(|k| 0.01 * k as f64).collect();
        group.bench_function(format!("potts_{mode}_{}p", a.n_params()), |b| {
            b.iter(|| compute_m_v(black_box(&a), &theta, &hc).unwrap())
        });
    }
    group.finish();
}

fn constraints(c: &mut Criterion) {
    let spec = potts();
    let term = &build_hamiltonian(&spec).unwrap()[0];
    let gens = build_symmetry_generators(&spec).unwrap();
    let basis: Vec<PauliString> = PauliString::all(4).collect();
    let mut group = c.benchmark_group("solve_constraints");
    group.sample_size(10);
    group.bench_function("potts_term_internal_plus_tr", |b| {
        b.iter(|| solve_constraints(black_box(&gens), &term.qubits, &basis).unwrap())
    });
    group.finish();
}

criterion_group!(benches, exponentials, metric, constraints);
criterion_main!(benches);
