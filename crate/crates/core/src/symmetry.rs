//! Symmetry generators, their adjoint action on a Pauli basis (c-matrices),
//! and the constraint solver that yields the reduced generator basis of a
//! local interaction term.
//!
//! Generators are global operators described as products of local factors.
//! Acting on a term, only the factors that overlap the term's qubits matter;
//! the c-matrix is computed on the union of the term and those factors.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{MonomialAction, Parity, PauliString, PauliSum};

/// Singular values below this bound span the constraint nullspace.
pub const NULLSPACE_CUTOFF: f64 = 1e-9;
/// Canonicalized coefficients below this magnitude are set to zero.
pub const CANONICAL_ZERO: f64 = 1e-9;
/// Tolerance of [`verify_fixed_point`].
pub const FIXED_POINT_TOL: f64 = 1e-8;
const CLOSURE_TOL: f64 = 1e-9;
/// Largest register (term plus overlapping factors) a c-matrix is built on.
pub const C_MATRIX_QUBIT_CAP: usize = 6;

/// Angles at which a U(1) family is sampled when solving constraints.
pub fn u1_sample_angles() -> Vec<f64> {
    vec![2.0 * PI / 7.0, 4.0 * PI / 7.0, 6.0 * PI / 7.0, 1.0]
}

/// Disjoint angles used to verify the sampled U(1) fixed space.
pub fn u1_check_angles() -> Vec<f64> {
    vec![0.37, 2.2, 4.9]
}

/// Local operator acting on the `2^k` states of a factor's qubits.
#[derive(Clone, Debug)]
pub enum LocalOp {
    Dense(DMatrix<Complex64>),
    /// `U|k> = phase[k] |perm[k]>`.
    PermutationPhase { perm: Vec<usize>, phase: Vec<Complex64> },
}

impl LocalOp {
    pub fn permutation(perm: Vec<usize>) -> Self {
        let phase = vec![Complex64::new(1.0, 0.0); perm.len()];
        LocalOp::PermutationPhase { perm, phase }
    }

    pub fn dim(&self) -> usize {
        match self {
            LocalOp::Dense(m) => m.nrows(),
            LocalOp::PermutationPhase { perm, .. } => perm.len(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        match self {
            LocalOp::Dense(m) => m.clone(),
            LocalOp::PermutationPhase { perm, phase } => {
                let d = perm.len();
                let mut m = DMatrix::zeros(d, d);
                for k in 0..d {
                    m[(perm[k], k)] = phase[k];
                }
                m
            }
        }
    }
}

/// A local factor of a product-form unitary.
#[derive(Clone, Debug)]
pub struct Factor {
    pub qubits: Vec<usize>,
    pub op: LocalOp,
}

impl Factor {
    pub fn new(qubits: Vec<usize>, op: LocalOp) -> Result<Self> {
        if op.dim() != 1usize << qubits.len() {
            return Err(Error::LengthMismatch {
                left: 1usize << qubits.len(),
                right: op.dim(),
            });
        }
        Ok(Factor { qubits, op })
    }
}

#[derive(Clone, Debug)]
pub enum GeneratorKind {
    /// Product of unitary factors on disjoint qubit sets.
    Unitary(Vec<Factor>),
    /// Complex conjugation in the computational basis.
    Conjugation,
    /// `diag(e^{i |x| alpha})` over the support qubits.
    U1Family,
}

#[derive(Clone, Debug)]
pub struct SymmetryGenerator {
    pub label: String,
    pub kind: GeneratorKind,
    pub support: Vec<usize>,
}

impl SymmetryGenerator {
    pub fn unitary(label: impl Into<String>, factors: Vec<Factor>) -> Self {
        let mut support: Vec<usize> = factors.iter().flat_map(|f| f.qubits.clone()).collect();
        support.sort_unstable();
        support.dedup();
        SymmetryGenerator {
            label: label.into(),
            kind: GeneratorKind::Unitary(factors),
            support,
        }
    }

    /// The same dense matrix placed on `qubits` as a single factor.
    pub fn dense(label: impl Into<String>, qubits: Vec<usize>, u: DMatrix<Complex64>) -> Result<Self> {
        let f = Factor::new(qubits, LocalOp::Dense(u))?;
        Ok(Self::unitary(label, vec![f]))
    }

    pub fn conjugation(n_qubits: usize) -> Self {
        SymmetryGenerator {
            label: "TR".into(),
            kind: GeneratorKind::Conjugation,
            support: (0..n_qubits).collect(),
        }
    }

    pub fn u1(support: Vec<usize>) -> Self {
        SymmetryGenerator {
            label: "U(1)".into(),
            kind: GeneratorKind::U1Family,
            support,
        }
    }

    /// `+1` for unitary kinds, `-1` for conjugation.
    pub fn xi(&self) -> f64 {
        match self.kind {
            GeneratorKind::Conjugation => -1.0,
            _ => 1.0,
        }
    }

    pub fn is_internal(&self) -> bool {
        !matches!(self.kind, GeneratorKind::Conjugation)
    }

    /// Unitary factors at a concrete angle (U(1) becomes single-qubit phases).
    fn factors_at(&self, alpha: Option<f64>) -> Result<Vec<Factor>> {
        match &self.kind {
            GeneratorKind::Unitary(f) => Ok(f.clone()),
            GeneratorKind::U1Family => {
                let a = alpha.ok_or_else(|| Error::Config("U(1) family needs an angle".into()))?;
                let phase = Complex64::from_polar(1.0, a);
                Ok(self
                    .support
                    .iter()
                    .map(|&q| Factor {
                        qubits: vec![q],
                        op: LocalOp::PermutationPhase {
                            perm: vec![0, 1],
                            phase: vec![Complex64::new(1.0, 0.0), phase],
                        },
                    })
                    .collect())
            }
            GeneratorKind::Conjugation => Ok(Vec::new()),
        }
    }

    /// Apply the full unitary (at `alpha` for U(1)) to a register of `n`
    /// qubits; amplitudes indexed with qubit 0 as the most significant bit.
    pub fn apply_unitary(&self, amps: &[Complex64], n: usize, alpha: Option<f64>) -> Result<Vec<Complex64>> {
        if matches!(self.kind, GeneratorKind::Conjugation) {
            return Ok(amps.iter().map(|a| a.conj()).collect());
        }
        let mut out = amps.to_vec();
        for f in self.factors_at(alpha)? {
            out = apply_factor(&out, n, &f.qubits, &f.op.to_dense());
        }
        Ok(out)
    }

    /// Restriction to the qubits of a term: the register `R` (term qubits
    /// plus those of overlapping factors, sorted) and the unitary on it.
    fn restricted(&self, term: &[usize], alpha: Option<f64>) -> Result<(Vec<usize>, DMatrix<Complex64>)> {
        let kept: Vec<Factor> = self
            .factors_at(alpha)?
            .into_iter()
            .filter(|f| f.qubits.iter().any(|q| term.contains(q)))
            .collect();
        let mut reg: Vec<usize> = term.to_vec();
        for f in &kept {
            reg.extend(&f.qubits);
        }
        reg.sort_unstable();
        reg.dedup();
        if reg.len() > C_MATRIX_QUBIT_CAP {
            return Err(Error::CapExceeded {
                what: "c-matrix register qubits",
                value: reg.len(),
                cap: C_MATRIX_QUBIT_CAP,
            });
        }
        let dim = 1usize << reg.len();
        let mut u = DMatrix::<Complex64>::identity(dim, dim);
        for f in &kept {
            let local: Vec<usize> = f
                .qubits
                .iter()
                .map(|q| reg.iter().position(|r| r == q).expect("factor qubit in register"))
                .collect();
            let e = embed_operator(reg.len(), &local, &f.op.to_dense());
            u = e * u;
        }
        Ok((reg, u))
    }
}

/// Bit of qubit `q` in a `k`-qubit basis index.
#[inline]
pub(crate) fn qubit_bit(k: usize, q: usize) -> usize {
    1usize << (k - 1 - q)
}

/// Full `2^k` matrix of an operator acting on the listed qubits.
fn embed_operator(k: usize, qubits: &[usize], op: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let dim = 1usize << k;
    let m = qubits.len();
    let mask: usize = qubits.iter().map(|&q| qubit_bit(k, q)).sum();
    let sub = |x: usize| -> usize {
        qubits
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &q)| acc | (((x & qubit_bit(k, q)) != 0) as usize) << (m - 1 - j))
    };
    let mut out = DMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            if r & !mask == c & !mask {
                out[(r, c)] = op[(sub(r), sub(c))];
            }
        }
    }
    out
}

fn apply_factor(amps: &[Complex64], n: usize, qubits: &[usize], op: &DMatrix<Complex64>) -> Vec<Complex64> {
    let m = qubits.len();
    let bits: Vec<usize> = qubits.iter().map(|&q| qubit_bit(n, q)).collect();
    let mask: usize = bits.iter().sum();
    let offsets: Vec<usize> = (0..1usize << m)
        .map(|s| {
            (0..m)
                .filter(|j| s & (1 << (m - 1 - j)) != 0)
                .map(|j| bits[j])
                .sum()
        })
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for base in (0..amps.len()).filter(|x| x & mask == 0) {
        for (r, &ro) in offsets.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, &co) in offsets.iter().enumerate() {
                acc += op[(r, c)] * amps[base | co];
            }
            out[base | ro] = acc;
        }
    }
    out
}

/// Coefficient of string `tau` in a dense operator: `tr(tau op) / 2^k`.
fn hs_coefficient(tau: &PauliString, op: &DMatrix<Complex64>) -> Complex64 {
    let act = MonomialAction::of(tau);
    let dim = op.nrows() as u64;
    let sum: Complex64 = (0..dim)
        .map(|y| {
            let (x, amp) = act.apply(y);
            amp * op[(y as usize, x as usize)]
        })
        .sum();
    sum / dim as f64
}

/// Real orthogonal matrix of a generator's adjoint action; row `i` holds the
/// coefficients of the transformed `basis[i]`.
#[derive(Clone, Debug)]
pub struct CMatrix {
    pub entries: DMatrix<f64>,
    pub basis: Vec<PauliString>,
    /// Largest imaginary part discarded while building `entries`.
    pub max_imag: f64,
}

impl CMatrix {
    /// `max |C^T C - I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let m = self.entries.nrows();
        (self.entries.transpose() * &self.entries - DMatrix::<f64>::identity(m, m)).amax()
    }

    pub fn is_orthogonal(&self, tol: f64) -> bool {
        self.orthogonality_error() <= tol
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.max_imag <= tol
    }
}

/// c-matrix of `g` on `basis`, whose strings act on the register qubits `term`.
pub fn c_matrix(g: &SymmetryGenerator, term: &[usize], basis: &[PauliString], alpha: Option<f64>) -> Result<CMatrix> {
    if basis.is_empty() {
        return Err(Error::EmptyBasis("c-matrix basis".into()));
    }
    for s in basis {
        if s.len() != term.len() {
            return Err(Error::LengthMismatch {
                left: term.len(),
                right: s.len(),
            });
        }
    }
    let m = basis.len();
    if let GeneratorKind::Conjugation = g.kind {
        let diag = DVector::from_iterator(
            m,
            basis.iter().map(|s| match s.y_parity() {
                Parity::Even => 1.0,
                Parity::Odd => -1.0,
            }),
        );
        return Ok(CMatrix {
            entries: DMatrix::from_diagonal(&diag),
            basis: basis.to_vec(),
            max_imag: 0.0,
        });
    }

    let (reg, u) = g.restricted(term, alpha)?;
    let pos: Vec<usize> = term
        .iter()
        .map(|q| reg.iter().position(|r| r == q).expect("term qubit in register"))
        .collect();
    let lifted: Vec<PauliString> = basis
        .iter()
        .map(|s| PauliString::embedded(reg.len(), &pos, s))
        .collect::<Result<_>>()?;
    let u_adj = u.adjoint();

    let mut entries = DMatrix::<f64>::zeros(m, m);
    let mut max_imag: f64 = 0.0;
    for (i, s) in lifted.iter().enumerate() {
        let sigma = s.dense()?;
        let t = &u_adj * sigma * &u;
        let mut captured = 0.0;
        for (j, tau) in lifted.iter().enumerate() {
            let c = hs_coefficient(tau, &t);
            captured += c.norm_sqr();
            max_imag = max_imag.max(c.im.abs());
            entries[(i, j)] = c.re;
        }
        if (1.0 - captured).abs() > CLOSURE_TOL {
            return Err(Error::NonClosedBasis {
                generator: g.label.clone(),
                captured,
            });
        }
    }
    Ok(CMatrix {
        entries,
        basis: basis.to_vec(),
        max_imag,
    })
}

/// All c-matrices a generator contributes: one per sampled angle for U(1).
fn constraint_matrices(g: &SymmetryGenerator, term: &[usize], basis: &[PauliString], angles: &[f64]) -> Result<Vec<CMatrix>> {
    match g.kind {
        GeneratorKind::U1Family => angles.iter().map(|&a| c_matrix(g, term, basis, Some(a))).collect(),
        _ => Ok(vec![c_matrix(g, term, basis, None)?]),
    }
}

/// Real linear combinations of Pauli strings spanning the symmetry-allowed
/// generators of one local term.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorBasis {
    /// Register qubits of the term, ascending; element letters follow this order.
    pub term_support: Vec<usize>,
    /// Elements as sums of local strings (length `term_support.len()`).
    pub elements: Vec<PauliSum>,
    /// Labels of the generators whose constraints produced the basis.
    pub provenance: Vec<String>,
}

impl GeneratorBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Strings carrying a nonzero coefficient in some element, in canonical order.
    pub fn relevant_strings(&self) -> Vec<PauliString> {
        let mut out: Vec<PauliString> = self
            .elements
            .iter()
            .flat_map(|e| e.strings().collect::<Vec<_>>())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// One single-string element per relevant string.
    pub fn string_split(&self) -> GeneratorBasis {
        GeneratorBasis {
            term_support: self.term_support.clone(),
            elements: self
                .relevant_strings()
                .into_iter()
                .map(PauliSum::from_string)
                .collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// Elements lifted to an `n`-qubit register.
    pub fn embedded(&self, n: usize) -> Result<Vec<PauliSum>> {
        self.elements.iter().map(|e| e.embed(n, &self.term_support)).collect()
    }

    /// Text form, one element per line.
    pub fn to_lines(&self) -> Vec<String> {
        self.elements.iter().map(|e| e.to_string()).collect()
    }
}

/// Orthonormal basis of the common nullspace of stacked constraint blocks,
/// returned as rows.
fn nullspace(blocks: &[DMatrix<f64>], m: usize) -> DMatrix<f64> {
    if blocks.is_empty() {
        return DMatrix::identity(m, m);
    }
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut a = DMatrix::<f64>::zeros(rows, m);
    let mut r0 = 0;
    for b in blocks {
        a.view_mut((r0, 0), (b.nrows(), m)).copy_from(b);
        r0 += b.nrows();
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let null: Vec<usize> = (0..v_t.nrows())
        .filter(|&k| svd.singular_values[k] < NULLSPACE_CUTOFF)
        .collect();
    let mut out = DMatrix::<f64>::zeros(null.len(), m);
    for (r, &k) in null.iter().enumerate() {
        out.set_row(r, &v_t.row(k));
    }
    out
}

/// Reduced row echelon form with columns in the given (canonical) order,
/// unit pivots and dust rounded to zero. Zero rows are dropped.
pub fn canonicalize_rows(rows: &DMatrix<f64>) -> DMatrix<f64> {
    let mut a = rows.clone();
    let (nr, nc) = a.shape();
    let mut pivot_row = 0;
    for col in 0..nc {
        if pivot_row == nr {
            break;
        }
        let (best, val) = (pivot_row..nr)
            .map(|r| (r, a[(r, col)].abs()))
            .fold((pivot_row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= CANONICAL_ZERO {
            continue;
        }
        a.swap_rows(pivot_row, best);
        let p = a[(pivot_row, col)];
        let scaled = a.row(pivot_row) / p;
        a.set_row(pivot_row, &scaled);
        for r in 0..nr {
            if r != pivot_row {
                let f = a[(r, col)];
                if f != 0.0 {
                    let upd = a.row(r) - a.row(pivot_row) * f;
                    a.set_row(r, &upd);
                }
            }
        }
        pivot_row += 1;
    }
    a.apply(|x| {
        if x.abs() < CANONICAL_ZERO {
            *x = 0.0
        }
    });
    a.rows(0, pivot_row).into_owned()
}

fn rows_to_elements(rows: &DMatrix<f64>, basis: &[PauliString]) -> Result<Vec<PauliSum>> {
    (0..rows.nrows())
        .map(|r| {
            let coeffs: Vec<f64> = rows.row(r).iter().copied().collect();
            PauliSum::from_real_vector(basis, &coeffs)
        })
        .collect()
}

/// Solve `c^(g) a = xi_g a` for all generators on the span of `basis`.
///
/// The identity string is excluded from the result since it only
/// contributes a global phase.
pub fn solve_constraints(generators: &[SymmetryGenerator], term: &[usize], basis: &[PauliString]) -> Result<GeneratorBasis> {
    if basis.is_empty() {
        return Err(Error::EmptyBasis("constraint basis".into()));
    }
    let m = basis.len();
    let mut blocks = Vec::new();
    for g in generators {
        for c in constraint_matrices(g, term, basis, &u1_sample_angles())? {
            blocks.push(c.entries - DMatrix::<f64>::identity(m, m) * g.xi());
        }
    }
    let null = nullspace(&blocks, m);

    for g in generators.iter().filter(|g| matches!(g.kind, GeneratorKind::U1Family)) {
        for c in constraint_matrices(g, term, basis, &u1_check_angles())? {
            let resid = (&c.entries - DMatrix::<f64>::identity(m, m)) * null.transpose();
            if resid.amax() > CLOSURE_TOL {
                return Err(Error::NonClosedBasis {
                    generator: format!("{} (angle sample)", g.label),
                    captured: resid.amax(),
                });
            }
        }
    }

    let rows = canonicalize_rows(&null);
    let gb = GeneratorBasis {
        term_support: term.to_vec(),
        elements: rows_to_elements(&rows, basis)?,
        provenance: generators.iter().map(|g| g.label.clone()).collect(),
    };
    Ok(exclude_identity(&gb))
}

/// Drop the component along the all-`I` string and re-canonicalize.
pub fn exclude_identity(gb: &GeneratorBasis) -> GeneratorBasis {
    let mut basis: Vec<PauliString> = gb
        .elements
        .iter()
        .flat_map(|e| e.strings().collect::<Vec<_>>())
        .filter(|s| !s.is_identity())
        .collect();
    basis.sort();
    basis.dedup();
    let mut rows = DMatrix::<f64>::zeros(gb.elements.len(), basis.len());
    for (r, e) in gb.elements.iter().enumerate() {
        for (c, s) in basis.iter().enumerate() {
            rows[(r, c)] = e.coefficient(s).re;
        }
    }
    let rows = canonicalize_rows(&rows);
    GeneratorBasis {
        term_support: gb.term_support.clone(),
        elements: rows_to_elements(&rows, &basis).expect("lengths agree"),
        provenance: gb.provenance.clone(),
    }
}

/// Strings with an odd number of `Y` letters.
pub fn tr_filter(basis: &[PauliString]) -> Vec<PauliString> {
    basis
        .iter()
        .copied()
        .filter(|s| s.y_parity() == Parity::Odd)
        .collect()
}

/// `true` iff `||c^(g) a0 - xi_g a0||_inf <= 1e-8` for every generator
/// (every sampled and check angle for U(1) families).
pub fn verify_fixed_point(a0: &[f64], generators: &[SymmetryGenerator], term: &[usize], basis: &[PauliString]) -> Result<bool> {
    Ok(fixed_point_residual(a0, generators, term, basis)? <= FIXED_POINT_TOL)
}

pub fn fixed_point_residual(a0: &[f64], generators: &[SymmetryGenerator], term: &[usize], basis: &[PauliString]) -> Result<f64> {
    if a0.len() != basis.len() {
        return Err(Error::LengthMismatch {
            left: basis.len(),
            right: a0.len(),
        });
    }
    let a = DVector::from_column_slice(a0);
    let mut angles = u1_sample_angles();
    angles.extend(u1_check_angles());
    let mut worst: f64 = 0.0;
    for g in generators {
        for c in constraint_matrices(g, term, basis, &angles)? {
            let r = &c.entries * &a - &a * g.xi();
            worst = worst.max(r.amax());
        }
    }
    Ok(worst)
}

/// Dimension of the common fixed space of `{c_g, c_h}` and of
/// `{c_g, c_h, c_g c_h}`, plus the largest residual of either nullspace
/// under the other's constraints. Equal dimensions and a small residual
/// mean the product generator adds no constraint.
pub fn group_closure(g: &SymmetryGenerator, h: &SymmetryGenerator, term: &[usize], basis: &[PauliString]) -> Result<(usize, usize, f64)> {
    if !g.is_internal() || !h.is_internal() {
        return Err(Error::Config("group closure check takes unitary generators".into()));
    }
    let m = basis.len();
    let id = DMatrix::<f64>::identity(m, m);
    let alpha = Some(1.0);
    let cg = c_matrix(g, term, basis, alpha)?.entries;
    let ch = c_matrix(h, term, basis, alpha)?.entries;
    let cgh = &cg * &ch;
    let two = [&cg - &id, &ch - &id];
    let three = [&cg - &id, &ch - &id, &cgh - &id];
    let n2 = nullspace(&two, m);
    let n3 = nullspace(&three, m);
    let mut resid: f64 = 0.0;
    for b in &three {
        resid = resid.max((b * n2.transpose()).amax());
    }
    for b in &two {
        resid = resid.max((b * n3.transpose()).amax());
    }
    Ok((n2.nrows(), n3.nrows(), resid))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn x_factor(q: usize) -> Factor {
        Factor::new(vec![q], LocalOp::permutation(vec![1, 0])).unwrap()
    }

    fn all_x(n: usize) -> SymmetryGenerator {
        SymmetryGenerator::unitary("X", (0..n).map(x_factor).collect())
    }

    #[test]
    fn c_matrix_of_xx_is_commutation_sign() {
        let basis: Vec<_> = PauliString::all(2).collect();
        let c = c_matrix(&all_x(2), &[0, 1], &basis, None).unwrap();
        let xx = ps("XX");
        for (i, s) in basis.iter().enumerate() {
            let expect = if s.commutes(&xx).unwrap() { 1.0 } else { -1.0 };
            for j in 0..basis.len() {
                let e = if i == j { expect } else { 0.0 };
                assert!((c.entries[(i, j)] - e).abs() < 1e-12);
            }
        }
        assert!(c.is_orthogonal(1e-10));
        assert!(c.is_real(1e-10));
    }

    #[test]
    fn c_matrix_of_conjugation_is_y_parity() {
        let basis: Vec<_> = PauliString::all(2).collect();
        let c = c_matrix(&SymmetryGenerator::conjugation(2), &[0, 1], &basis, None).unwrap();
        for (i, s) in basis.iter().enumerate() {
            let e = if s.y_count() % 2 == 1 { -1.0 } else { 1.0 };
            assert_eq!(c.entries[(i, i)], e);
        }
    }

    #[test]
    fn c_matrix_of_u1_rotates_pairs() {
        let basis: Vec<_> = PauliString::all(2).collect();
        let a = 0.7;
        let c = c_matrix(&SymmetryGenerator::u1(vec![0, 1]), &[0, 1], &basis, Some(a)).unwrap();
        let idx = |s: &str| basis.iter().position(|b| *b == ps(s)).unwrap();
        for s in ["II", "IZ", "ZI", "ZZ"] {
            assert!((c.entries[(idx(s), idx(s))] - 1.0).abs() < 1e-12);
        }
        for (x, y) in [("IX", "IY"), ("XI", "YI"), ("ZX", "ZY"), ("XZ", "YZ")] {
            let (i, j) = (idx(x), idx(y));
            assert!((c.entries[(i, i)] - a.cos()).abs() < 1e-12);
            assert!((c.entries[(j, j)] - a.cos()).abs() < 1e-12);
            assert!((c.entries[(i, j)].abs() - a.sin()).abs() < 1e-12);
            assert!((c.entries[(i, j)] + c.entries[(j, i)]).abs() < 1e-12);
        }
        // XY+YX and YY-XX rotate by 2a
        let (xx, yy, xy, yx) = (idx("XX"), idx("YY"), idx("XY"), idx("YX"));
        let v = |p: usize, q: usize, sp: f64, sq: f64| {
            let mut out = DVector::<f64>::zeros(16);
            out[p] = sp;
            out[q] = sq;
            out
        };
        let sym = v(xy, yx, 1.0, 1.0);
        let anti = v(yy, xx, 1.0, -1.0);
        let rotated = c.entries.transpose() * &sym;
        let expect = &sym * (2.0 * a).cos() + &anti * (2.0 * a).sin();
        let flipped = &sym * (2.0 * a).cos() - &anti * (2.0 * a).sin();
        assert!((&rotated - &expect).amax() < 1e-12 || (&rotated - &flipped).amax() < 1e-12);
        assert!(c.is_orthogonal(1e-10));
    }

    #[test]
    fn non_closed_basis_is_reported() {
        let basis = vec![ps("IX")];
        let err = c_matrix(&SymmetryGenerator::u1(vec![0, 1]), &[0, 1], &basis, Some(0.5));
        assert!(matches!(err, Err(Error::NonClosedBasis { .. })));
    }

    #[test]
    fn ising_bond_reduces_to_zy_yz() {
        let basis: Vec<_> = PauliString::all(2).collect();
        let gens = [all_x(4), SymmetryGenerator::conjugation(4)];
        let gb = solve_constraints(&gens, &[1, 3], &basis).unwrap();
        assert_eq!(gb.to_lines(), ["YZ", "ZY"]);
    }

    #[test]
    fn hopping_term_tables() {
        let basis: Vec<_> = PauliString::all(2).collect();
        let u1 = SymmetryGenerator::u1(vec![0, 1]);
        let gb = solve_constraints(std::slice::from_ref(&u1), &[0, 1], &basis).unwrap();
        assert_eq!(gb.to_lines(), ["IZ", "XX + YY", "XY - YX", "ZI", "ZZ"]);
        let gb = solve_constraints(&[u1, SymmetryGenerator::conjugation(2)], &[0, 1], &basis).unwrap();
        assert_eq!(gb.to_lines(), ["XY - YX"]);
    }

    #[test]
    fn exclude_identity_examples() {
        let mk = |lines: &[&str]| GeneratorBasis {
            term_support: vec![0, 1],
            elements: lines.iter().map(|l| l.parse().unwrap()).collect(),
            provenance: vec![],
        };
        assert_eq!(exclude_identity(&mk(&["II", "ZZ"])).to_lines(), ["ZZ"]);
        assert_eq!(exclude_identity(&mk(&["XY - YX"])).to_lines(), ["XY - YX"]);
    }

    #[test]
    fn tr_filter_two_qubits() {
        let basis: Vec<_> = PauliString::all(2).collect();
        let kept: Vec<String> = tr_filter(&basis).iter().map(|s| s.to_string()).collect();
        assert_eq!(kept, ["IY", "XY", "YI", "YX", "YZ", "ZY"]);
        assert!(tr_filter(&[ps("XX"), ps("YY")]).is_empty());
    }

    #[test]
    fn fixed_point_examples() {
        let basis: Vec<_> = PauliString::all(2).collect();
        let gens = [all_x(2)];
        let mut a = vec![0.0; 16];
        assert!(verify_fixed_point(&a, &gens, &[0, 1], &basis).unwrap());
        a[basis.iter().position(|s| *s == ps("IZ")).unwrap()] = 1.0;
        assert!(!verify_fixed_point(&a, &gens, &[0, 1], &basis).unwrap());
    }

    #[test]
    fn closure_of_two_transpositions() {
        let basis: Vec<_> = PauliString::all(2).collect();
        let swap = |a: usize, b: usize| {
            let mut p: Vec<usize> = (0..4).collect();
            p.swap(a, b);
            SymmetryGenerator::unitary(
                format!("({a} {b})"),
                vec![Factor::new(vec![0, 1], LocalOp::permutation(p)).unwrap()],
            )
        };
        let (d2, d3, resid) = group_closure(&swap(0, 1), &swap(1, 2), &[0, 1], &basis).unwrap();
        assert_eq!(d2, d3);
        assert!(resid < 1e-9);
    }

    #[test]
    fn apply_unitary_of_u1_on_two_particles() {
        // |0011> picks up e^{2ia}
        let n = 4;
        let mut amps = vec![Complex64::new(0.0, 0.0); 16];
        amps[0b0011] = Complex64::new(1.0, 0.0);
        let a = 0.3;
        let out = SymmetryGenerator::u1((0..n).collect())
            .apply_unitary(&amps, n, Some(a))
            .unwrap();
        assert!((out[0b0011] - Complex64::from_polar(1.0, 2.0 * a)).norm() < 1e-12);
    }
}
