//! Dense statevector engine.
//!
//! Basis index bit `n-1-q` holds qubit `q`, so qubit 0 is the most
//! significant bit, matching the dense matrices of [`crate::pauli`].

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::ansatz::Ansatz;
use crate::error::{Error, Result};
use crate::pauli::{MonomialAction, PauliString, PauliSum};

/// Largest register simulated densely.
pub const STATE_QUBIT_CAP: usize = 24;
/// Largest support of a multi-string generator exponentiated exactly.
pub const EXP_SUPPORT_CAP: usize = 6;
pub const NORM_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

fn check_cap(n: usize) -> Result<()> {
    if n > STATE_QUBIT_CAP {
        return Err(Error::CapExceeded {
            what: "statevector qubits",
            value: n,
            cap: STATE_QUBIT_CAP,
        });
    }
    Ok(())
}

impl StateVector {
    /// `|+>^n`, the uniform superposition.
    pub fn init_plus(n: usize) -> Result<Self> {
        check_cap(n)?;
        let dim = 1usize << n;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(StateVector { n, amps: vec![a; dim] })
    }

    pub fn basis_state(n: usize, index: usize) -> Result<Self> {
        check_cap(n)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, len: dim });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    /// Normalized state from raw amplitudes.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        let n = dim.trailing_zeros() as usize;
        check_cap(n)?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NormDrift(norm));
        }
        Ok(StateVector { n, amps })
    }

    /// Rescale arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NormDrift(norm));
        }
        Self::from_amplitudes(amps.into_iter().map(|a| a / norm).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        inner(&self.amps, &other.amps)
    }

    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `|| self - e^{i phi} other ||` minimized over the global phase.
    pub fn distance_up_to_phase(&self, other: &StateVector) -> f64 {
        (2.0 - 2.0 * self.inner(other).norm()).max(0.0).sqrt()
    }

    fn check_norm(&self) -> Result<()> {
        let norm = self.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NormDrift(norm));
        }
        Ok(())
    }

    /// `e^{-i theta G}` for a real-Hermitian `G`.
    pub fn apply_exponential(&mut self, g: &PauliSum, theta: f64) -> Result<()> {
        ExpGenerator::new(g)?.apply(&mut self.amps, theta);
        self.check_norm()
    }

    pub fn apply_compiled(&mut self, g: &ExpGenerator, theta: f64) {
        g.apply(&mut self.amps, theta);
    }

    pub fn apply_single_qubit(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1usize << (self.n - 1 - q);
        for x in (0..self.amps.len()).filter(|x| x & bit == 0) {
            let (a0, a1) = (self.amps[x], self.amps[x | bit]);
            self.amps[x] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[x | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        let cb = 1usize << (self.n - 1 - control);
        let tb = 1usize << (self.n - 1 - target);
        for x in 0..self.amps.len() {
            if x & cb != 0 && x & tb == 0 {
                self.amps.swap(x, x | tb);
            }
        }
    }

    /// `O|self>` (not normalized).
    pub fn apply_sum(&self, o: &PauliSum) -> Result<Vec<Complex64>> {
        Ok(CompiledSum::new(o, self.n)?.apply(&self.amps))
    }

    /// `<self|O|self>` for a real-Hermitian `O`.
    pub fn expectation(&self, o: &PauliSum) -> Result<f64> {
        if o.max_imag() > HERMITIAN_TOL {
            return Err(Error::NotHermitian(o.max_imag()));
        }
        let v = inner(&self.amps, &self.apply_sum(o)?);
        if v.im.abs() > NORM_TOL {
            return Err(Error::NotHermitian(v.im.abs()));
        }
        Ok(v.re)
    }
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// A Pauli sum prepared for repeated application to `n`-qubit states.
#[derive(Clone, Debug)]
pub struct CompiledSum {
    n: usize,
    diagonal: Option<Vec<Complex64>>,
    terms: Vec<(MonomialAction, Complex64)>,
}

impl CompiledSum {
    pub fn new(o: &PauliSum, n: usize) -> Result<Self> {
        if o.n_qubits() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: o.n_qubits(),
            });
        }
        let diagonal = if o.is_diagonal() && !o.is_empty() { o.diagonal() } else { None };
        let terms = o.terms().iter().map(|(s, c)| (MonomialAction::of(s), *c)).collect();
        Ok(CompiledSum { n, diagonal, terms })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn apply(&self, amps: &[Complex64]) -> Vec<Complex64> {
        if let Some(d) = &self.diagonal {
            return d.iter().zip(amps).map(|(a, b)| a * b).collect();
        }
        let mut out = vec![ZERO; amps.len()];
        for (act, c) in &self.terms {
            for (y, &a) in amps.iter().enumerate() {
                let (x, amp) = act.apply(y as u64);
                out[x as usize] += c * amp * a;
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
enum ExpKind {
    /// `c * sigma`.
    Single { act: MonomialAction, coef: f64 },
    /// Eigendecomposition of the generator on its support qubits.
    Local {
        mask: usize,
        offsets: Vec<usize>,
        vectors: DMatrix<Complex64>,
        values: Vec<f64>,
    },
}

/// A real-Hermitian generator prepared for `e^{-i theta G}` and `G|psi>`.
#[derive(Clone, Debug)]
pub struct ExpGenerator {
    generator: PauliSum,
    kind: ExpKind,
    sum: CompiledSum,
}

impl ExpGenerator {
    pub fn new(g: &PauliSum) -> Result<Self> {
        if g.max_imag() > HERMITIAN_TOL {
            return Err(Error::NotHermitian(g.max_imag()));
        }
        let n = g.n_qubits();
        let sum = CompiledSum::new(g, n)?;
        let kind = match g.terms() {
            [] => ExpKind::Single {
                act: MonomialAction::of(&PauliString::identity(n)),
                coef: 0.0,
            },
            [(s, c)] => ExpKind::Single {
                act: MonomialAction::of(s),
                coef: c.re,
            },
            _ => {
                let support = g.support();
                if support.len() > EXP_SUPPORT_CAP {
                    return Err(Error::CapExceeded {
                        what: "exponential support qubits",
                        value: support.len(),
                        cap: EXP_SUPPORT_CAP,
                    });
                }
                let local_terms = g.terms().iter().map(|(s, c)| (*c, s.restricted(&support)));
                let local = PauliSum::from_terms(support.len(), local_terms)?;
                let eig = SymmetricEigen::new(local.dense_matrix()?);
                let bits: Vec<usize> = support.iter().map(|&q| 1usize << (n - 1 - q)).collect();
                let k = support.len();
                let offsets = (0..1usize << k)
                    .map(|s| (0..k).filter(|j| s & (1 << (k - 1 - j)) != 0).map(|j| bits[j]).sum())
                    .collect();
                ExpKind::Local {
                    mask: bits.iter().sum(),
                    offsets,
                    vectors: eig.eigenvectors,
                    values: eig.eigenvalues.iter().copied().collect(),
                }
            }
        };
        Ok(ExpGenerator {
            generator: g.clone(),
            kind,
            sum,
        })
    }

    pub fn generator(&self) -> &PauliSum {
        &self.generator
    }

    pub fn is_single_string(&self) -> bool {
        matches!(self.kind, ExpKind::Single { .. })
    }

    /// `amps <- e^{-i theta G} amps`.
    pub fn apply(&self, amps: &mut [Complex64], theta: f64) {
        self.prepare(theta).apply(amps);
    }

    /// The exponential at a fixed angle, for application to many states.
    pub(crate) fn prepare(&self, theta: f64) -> PreparedExp<'_> {
        match &self.kind {
            ExpKind::Single { act, coef } => {
                let (s, c) = (theta * coef).sin_cos();
                PreparedExp::Single {
                    act,
                    cos: c,
                    msin: Complex64::new(0.0, -s),
                }
            }
            ExpKind::Local {
                mask,
                offsets,
                vectors,
                values,
            } => {
                let phases = nalgebra::DVector::from_iterator(
                    values.len(),
                    values.iter().map(|&l| Complex64::from_polar(1.0, -theta * l)),
                );
                let u = vectors * DMatrix::from_diagonal(&phases) * vectors.adjoint();
                PreparedExp::Local {
                    mask: *mask,
                    offsets,
                    u,
                }
            }
        }
    }

    /// `G|amps>`.
    pub fn apply_generator(&self, amps: &[Complex64]) -> Vec<Complex64> {
        match &self.kind {
            ExpKind::Single { act, coef } => {
                let mut out = vec![ZERO; amps.len()];
                for (y, &a) in amps.iter().enumerate() {
                    let (x, amp) = act.apply(y as u64);
                    out[x as usize] = amp * a * *coef;
                }
                out
            }
            ExpKind::Local { .. } => self.sum.apply(amps),
        }
    }
}

pub(crate) enum PreparedExp<'a> {
    Single {
        act: &'a MonomialAction,
        cos: f64,
        msin: Complex64,
    },
    Local {
        mask: usize,
        offsets: &'a [usize],
        u: DMatrix<Complex64>,
    },
}

impl PreparedExp<'_> {
    pub fn apply(&self, amps: &mut [Complex64]) {
        match self {
            PreparedExp::Single { act, cos, msin } => {
                let (c, ms) = (*cos, *msin);
                if act.flip == 0 {
                    for (x, a) in amps.iter_mut().enumerate() {
                        *a *= c + ms * act.base * act.sign(x as u64);
                    }
                    return;
                }
                let flip = act.flip as usize;
                let top = 1usize << (usize::BITS - 1 - flip.leading_zeros());
                let k = ms * act.base;
                for x in (0..amps.len()).filter(|x| x & top == 0) {
                    let y = x ^ flip;
                    // sigma|x> = base*sign(x)|y>, sigma|y> = base*sign(y)|x>
                    let (ax, ay) = (amps[x], amps[y]);
                    amps[x] = c * ax + k * act.sign(y as u64) * ay;
                    amps[y] = c * ay + k * act.sign(x as u64) * ax;
                }
            }
            PreparedExp::Local { mask, offsets, u } => {
                let d = offsets.len();
                let mut buf = vec![ZERO; d];
                for base in (0..amps.len()).filter(|x| x & mask == 0) {
                    for (r, slot) in buf.iter_mut().enumerate() {
                        *slot = (0..d).map(|c| u[(r, c)] * amps[base | offsets[c]]).sum();
                    }
                    for (r, &o) in offsets.iter().enumerate() {
                        amps[base | o] = buf[r];
                    }
                }
            }
        }
    }
}

/// Check that `theta` fits the ansatz.
fn check_params(a: &Ansatz, theta: &[f64]) -> Result<()> {
    if theta.len() != a.n_params() {
        return Err(Error::LengthMismatch {
            left: a.n_params(),
            right: theta.len(),
        });
    }
    Ok(())
}

/// `|phi(theta)> = U_P ... U_1 |psi0>`.
pub fn run_ansatz(a: &Ansatz, theta: &[f64], psi0: &StateVector) -> Result<StateVector> {
    check_params(a, theta)?;
    if psi0.n != a.n_qubits() {
        return Err(Error::LengthMismatch {
            left: a.n_qubits(),
            right: psi0.n,
        });
    }
    let mut psi = psi0.clone();
    for b in a.blocks() {
        psi.apply_compiled(&b.exp, theta[b.param]);
    }
    psi.check_norm()?;
    Ok(psi)
}

/// `d|phi>/d theta_k`: `-i G_k` inserted right after block `k`.
pub fn derivative_state(a: &Ansatz, theta: &[f64], k: usize, psi0: &StateVector) -> Result<Vec<Complex64>> {
    check_params(a, theta)?;
    if k >= a.n_params() {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: a.n_params(),
        });
    }
    let mut amps = psi0.amps.clone();
    for b in a.blocks() {
        b.exp.apply(&mut amps, theta[b.param]);
        if b.param == k {
            amps = b.exp.apply_generator(&amps);
            amps.iter_mut().for_each(|x| *x *= MINUS_I);
        }
    }
    Ok(amps)
}

/// Final state and every derivative state in one forward sweep.
pub fn all_derivative_states(a: &Ansatz, theta: &[f64], psi0: &StateVector) -> Result<(StateVector, Vec<Vec<Complex64>>)> {
    check_params(a, theta)?;
    let mut psi = psi0.amps.clone();
    let mut derivs: Vec<Vec<Complex64>> = Vec::with_capacity(a.n_params());
    for b in a.blocks() {
        let u = b.exp.prepare(theta[b.param]);
        u.apply(&mut psi);
        for d in derivs.iter_mut() {
            u.apply(d);
        }
        let mut d = b.exp.apply_generator(&psi);
        d.iter_mut().for_each(|x| *x *= MINUS_I);
        derivs.push(d);
    }
    let state = StateVector { n: psi0.n, amps: psi };
    state.check_norm()?;
    Ok((state, derivs))
}
