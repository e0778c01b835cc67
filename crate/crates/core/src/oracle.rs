//! Exact references: normalized imaginary-time propagation, Gibbs
//! expectations, and a deterministic QITE (DetQITE) implementation.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{PauliSum, DEFAULT_DENSE_CAP};
use crate::statevector::{inner, CompiledSum, ExpGenerator, StateVector};
use crate::varqite::{solve_step, DEFAULT_SVD_CUTOFF};

/// Eigendecomposition of a Hamiltonian on at most 12 qubits.
#[derive(Clone, Debug)]
pub struct Spectrum {
    n: usize,
    values: Vec<f64>,
    /// `None` when the Hamiltonian is diagonal in the computational basis.
    vectors: Option<DMatrix<Complex64>>,
}

impl Spectrum {
    pub fn of(h: &PauliSum) -> Result<Self> {
        let n = h.n_qubits();
        if n > DEFAULT_DENSE_CAP {
            return Err(Error::CapExceeded {
                what: "exact diagonalization qubits",
                value: n,
                cap: DEFAULT_DENSE_CAP,
            });
        }
        if h.max_imag() > 1e-12 {
            return Err(Error::NotHermitian(h.max_imag()));
        }
        if let Some(diag) = h.diagonal() {
            return Ok(Spectrum {
                n,
                values: diag.iter().map(|c| c.re).collect(),
                vectors: None,
            });
        }
        let eig = SymmetricEigen::new(h.dense_matrix()?);
        Ok(Spectrum {
            n,
            values: eig.eigenvalues.iter().copied().collect(),
            vectors: Some(eig.eigenvectors),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn ground_energy(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    /// Amplitudes in the eigenbasis.
    fn to_eigenbasis(&self, amps: &[Complex64]) -> Vec<Complex64> {
        match &self.vectors {
            None => amps.to_vec(),
            Some(v) => (v.adjoint() * DVector::from_column_slice(amps)).iter().copied().collect(),
        }
    }

    fn from_eigenbasis(&self, coeffs: Vec<Complex64>) -> Vec<Complex64> {
        match &self.vectors {
            None => coeffs,
            Some(v) => (v * DVector::from_vec(coeffs)).iter().copied().collect(),
        }
    }

    /// `<k|O|k>` for every eigenvector `k`.
    fn diagonal_elements(&self, o: &PauliSum) -> Result<Vec<f64>> {
        match &self.vectors {
            None => {
                let dim = 1usize << self.n;
                let diag_part = PauliSum::from_terms(
                    self.n,
                    o.terms().iter().filter(|(s, _)| s.x_mask() == 0).map(|(s, c)| (*c, *s)),
                )?;
                Ok(match diag_part.diagonal() {
                    Some(d) if !diag_part.is_empty() => d.iter().map(|c| c.re).collect(),
                    _ => vec![0.0; dim],
                })
            }
            Some(v) => {
                let oc = CompiledSum::new(o, self.n)?;
                Ok((0..v.ncols())
                    .map(|k| {
                        let col: Vec<Complex64> = v.column(k).iter().copied().collect();
                        inner(&col, &oc.apply(&col)).re
                    })
                    .collect())
            }
        }
    }

    /// `e^{-tau H} psi0 / ||.||`.
    pub fn exact_qite(&self, psi0: &StateVector, tau: f64) -> Result<StateVector> {
        if psi0.n_qubits() != self.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: psi0.n_qubits(),
            });
        }
        let e0 = self.ground_energy();
        let c = self.to_eigenbasis(psi0.amplitudes());
        let c = c
            .into_iter()
            .zip(&self.values)
            .map(|(a, &e)| a * (-(e - e0) * tau).exp())
            .collect();
        StateVector::normalized(self.from_eigenbasis(c))
    }

    /// `Tr(O e^{-beta H}) / Tr(e^{-beta H})`.
    pub fn gibbs_expectation(&self, o: &PauliSum, beta: f64) -> Result<f64> {
        if beta < 0.0 || !beta.is_finite() {
            return Err(Error::Config(format!("beta must be finite and >= 0, got {beta}")));
        }
        if o.max_imag() > 1e-12 {
            return Err(Error::NotHermitian(o.max_imag()));
        }
        let e0 = self.ground_energy();
        let diag = self.diagonal_elements(o)?;
        let (mut num, mut z) = (0.0, 0.0);
        for (&e, &ok) in self.values.iter().zip(&diag) {
            let w = (-beta * (e - e0)).exp();
            num += w * ok;
            z += w;
        }
        Ok(num / z)
    }
}

pub fn exact_qite(h: &PauliSum, psi0: &StateVector, tau: f64) -> Result<StateVector> {
    Spectrum::of(h)?.exact_qite(psi0, tau)
}

pub fn gibbs_expectation(h: &PauliSum, o: &PauliSum, beta: f64) -> Result<f64> {
    Spectrum::of(h)?.gibbs_expectation(o, beta)
}

/// One DetQITE update for a local term `h_m` with a pool of Hermitian
/// generators (all on the full register): solve `M a = V` with
/// `M_ij = Re<G_i psi|G_j psi>`, `V_i = Im<G_i psi|h_m psi>`, then apply
/// `prod_i e^{-i dtau a_i G_i}` in pool order.
pub fn detqite_step(h_m: &PauliSum, psi: &StateVector, dtau: f64, pool: &[PauliSum]) -> Result<(Vec<f64>, StateVector)> {
    let compiled = pool.iter().map(ExpGenerator::new).collect::<Result<Vec<_>>>()?;
    detqite_step_compiled(h_m, psi, dtau, &compiled)
}

pub fn detqite_step_compiled(h_m: &PauliSum, psi: &StateVector, dtau: f64, pool: &[ExpGenerator]) -> Result<(Vec<f64>, StateVector)> {
    let a = detqite_coefficients(h_m, psi, pool)?;
    let mut out = psi.clone();
    for (g, &ai) in pool.iter().zip(&a) {
        out.apply_compiled(g, dtau * ai);
    }
    Ok((a, StateVector::normalized(out.amplitudes().to_vec())?))
}

/// Same coefficients as [`detqite_step`], applied as the single exponential
/// `e^{-i dtau sum_i a_i G_i}`. Unlike the ordered product, this keeps a
/// symmetric state symmetric exactly.
pub fn detqite_step_joint(h_m: &PauliSum, psi: &StateVector, dtau: f64, pool: &[ExpGenerator]) -> Result<(Vec<f64>, StateVector)> {
    let a = detqite_coefficients(h_m, psi, pool)?;
    let mut gen = PauliSum::zero(psi.n_qubits());
    for (g, &ai) in pool.iter().zip(&a) {
        gen = gen.add(&g.generator().scale(Complex64::new(ai, 0.0)))?;
    }
    let mut out = psi.clone();
    if !gen.is_empty() {
        out.apply_exponential(&gen, dtau)?;
    }
    Ok((a, StateVector::normalized(out.amplitudes().to_vec())?))
}

/// Pseudo-inverse solution of `M a = V` for one local term.
pub fn detqite_coefficients(h_m: &PauliSum, psi: &StateVector, pool: &[ExpGenerator]) -> Result<Vec<f64>> {
    let n = psi.n_qubits();
    let amps = psi.amplitudes();
    let hpsi = CompiledSum::new(h_m, n)?.apply(amps);
    let dim = amps.len();
    let p = pool.len();
    let gpsi: Vec<Vec<Complex64>> = pool.iter().map(|g| g.apply_generator(amps)).collect();
    let d = DMatrix::<Complex64>::from_fn(dim, p, |r, c| gpsi[c][r]);
    let gram = d.adjoint() * &d;
    let m = DMatrix::<f64>::from_fn(p, p, |i, j| 0.5 * (gram[(i, j)].re + gram[(j, i)].re));
    let v = DVector::<f64>::from_iterator(p, gpsi.iter().map(|g| inner(g, &hpsi).im));
    let sol = solve_step(&m, &v, DEFAULT_SVD_CUTOFF)?;
    Ok(sol.theta_dot.iter().copied().collect())
}

/// `round(tau / dtau)` sweeps of [`detqite_step`] over the terms in order.
pub fn detqite_run(terms: &[PauliSum], psi0: &StateVector, tau: f64, dtau: f64, pools: &[Vec<PauliSum>]) -> Result<StateVector> {
    if terms.len() != pools.len() {
        return Err(Error::LengthMismatch {
            left: terms.len(),
            right: pools.len(),
        });
    }
    if !(dtau > 0.0) {
        return Err(Error::Config(format!("dtau must be positive, got {dtau}")));
    }
    let ratio = tau / dtau;
    let steps = ratio.round() as usize;
    if (ratio - steps as f64).abs() > 1e-9 {
        log::warn!("tau/dtau = {ratio} is not an integer; running {steps} steps");
    }
    let compiled: Vec<Vec<ExpGenerator>> = pools
        .iter()
        .map(|p| p.iter().map(ExpGenerator::new).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let mut psi = psi0.clone();
    for _ in 0..steps {
        for (h, pool) in terms.iter().zip(&compiled) {
            psi = detqite_step_compiled(h, &psi, dtau, pool)?.1;
        }
    }
    Ok(psi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ising4() -> PauliSum {
        "-1*ZZII - 1*ZIZI - 1*IZIZ - 1*IIZZ".parse().unwrap()
    }

    #[test]
    fn qite_limits() {
        let h = ising4();
        let psi = StateVector::init_plus(4).unwrap();
        let s = Spectrum::of(&h).unwrap();
        assert_eq!(s.exact_qite(&psi, 0.0).unwrap(), psi);
        let far = s.exact_qite(&psi, 50.0).unwrap();
        assert!((far.expectation(&h).unwrap() + 4.0).abs() < 1e-12);
    }

    #[test]
    fn gibbs_limits() {
        let h = ising4();
        assert!(gibbs_expectation(&h, &h, 0.0).unwrap().abs() < 1e-14);
        assert!((gibbs_expectation(&h, &h, 60.0).unwrap() + 4.0).abs() < 1e-12);
    }

    #[test]
    fn non_diagonal_spectrum_matches_diagonal_route() {
        let h: PauliSum = "0.5*XX + 0.5*YY + 0.3*ZI".parse().unwrap();
        let o: PauliSum = "ZI + 0.2*XX".parse().unwrap();
        let s = Spectrum::of(&h).unwrap();
        let m = h.dense_matrix().unwrap();
        let eig = SymmetricEigen::new(m);
        let beta = 0.8;
        let om = o.dense_matrix().unwrap();
        let w: Vec<f64> = eig.eigenvalues.iter().map(|e| (-beta * e).exp()).collect();
        let z: f64 = w.iter().sum();
        let rho = &eig.eigenvectors
            * DMatrix::from_diagonal(&DVector::from_iterator(4, w.iter().map(|&x| Complex64::new(x / z, 0.0))))
            * eig.eigenvectors.adjoint();
        let expect = (rho * om).trace().re;
        assert!((s.gibbs_expectation(&o, beta).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn detqite_zero_tau_is_identity() {
        let psi = StateVector::init_plus(4).unwrap();
        let h = ising4();
        let out = detqite_run(&[h], &psi, 0.0, 0.01, &[vec!["ZYII".parse().unwrap()]]).unwrap();
        assert_eq!(out, psi);
    }
}
