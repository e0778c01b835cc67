//! Variational imaginary time evolution: McLachlan linear system, optional
//! Gaussian shot-noise model, pseudo-inverse solve and Euler integration.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::ansatz::Ansatz;
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::statevector::{all_derivative_states, inner, CompiledSum, StateVector};

pub const DEFAULT_SVD_CUTOFF: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionConfig {
    pub delta_tau: f64,
    pub tau_max: f64,
    /// Relative eigenvalue threshold of the pseudo-inverse.
    pub svd_cutoff: f64,
    pub noise_sigma: f64,
    pub rng_seed: u64,
    pub observables: Vec<(String, PauliSum)>,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            delta_tau: 0.01,
            tau_max: 1.0,
            svd_cutoff: DEFAULT_SVD_CUTOFF,
            noise_sigma: 0.0,
            rng_seed: 0,
            observables: Vec::new(),
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta_tau > 0.0 && self.delta_tau.is_finite()) {
            return Err(Error::Config(format!("delta_tau must be positive, got {}", self.delta_tau)));
        }
        if !(self.tau_max >= 0.0 && self.tau_max.is_finite()) {
            return Err(Error::Config(format!("tau_max must be >= 0, got {}", self.tau_max)));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::Config(format!("noise_sigma must be >= 0, got {}", self.noise_sigma)));
        }
        if !(self.svd_cutoff >= 0.0 && self.svd_cutoff < 1.0) {
            return Err(Error::Config(format!("svd_cutoff must lie in [0, 1), got {}", self.svd_cutoff)));
        }
        Ok(())
    }

    /// Number of Euler steps, `tau_max / delta_tau` rounded.
    pub fn n_steps(&self) -> usize {
        (self.tau_max / self.delta_tau).round() as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub tau: f64,
    pub beta: f64,
    pub energy: f64,
    pub residual: f64,
    pub rank: usize,
    pub observables: Vec<f64>,
    pub theta: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EvolutionTrace {
    pub observable_labels: Vec<String>,
    pub rows: Vec<TraceRow>,
}

/// 12 significant digits in scientific notation.
pub fn format_float(x: f64) -> String {
    format!("{x:.11e}")
}

impl EvolutionTrace {
    pub fn energies(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.energy).collect()
    }

    pub fn to_csv(&self) -> String {
        let n_theta = self.rows.first().map_or(0, |r| r.theta.len());
        let mut head = vec!["tau".to_string(), "beta".into(), "energy".into(), "residual".into(), "rank".into()];
        head.extend(self.observable_labels.iter().cloned());
        head.extend((0..n_theta).map(|k| format!("theta_{k}")));
        let mut out = head.join(",");
        out.push('\n');
        for r in &self.rows {
            let mut cells = vec![
                format_float(r.tau),
                format_float(r.beta),
                format_float(r.energy),
                format_float(r.residual),
                r.rank.to_string(),
            ];
            cells.extend(r.observables.iter().map(|&v| format_float(v)));
            cells.extend(r.theta.iter().map(|&v| format_float(v)));
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// `M_ij = Re<d_i phi|d_j phi>`, `V_i = -Re<d_i phi|H|phi>`, and the state.
pub fn compute_m_v(a: &Ansatz, theta: &[f64], h: &CompiledSum) -> Result<(DMatrix<f64>, DVector<f64>, StateVector)> {
    let psi0 = a.initial()?;
    let (phi, derivs) = all_derivative_states(a, theta, &psi0)?;
    let p = derivs.len();
    let dim = phi.amplitudes().len();
    let hphi = h.apply(phi.amplitudes());

    // Re<d_i|d_j> as a real product over stacked (Re, Im) parts.
    let d = DMatrix::<f64>::from_fn(2 * dim, p, |r, c| {
        let z = derivs[c][r % dim];
        if r < dim {
            z.re
        } else {
            z.im
        }
    });
    let m = d.tr_mul(&d);
    let m = (&m + m.transpose()) * 0.5;
    let v = DVector::<f64>::from_iterator(p, derivs.iter().map(|di| -inner(di, &hphi).re));
    Ok((m, v, phi))
}

/// Independent `N(0, sigma^2)` per entry; `M` re-symmetrized as `(A + A^T)/2`.
pub fn add_noise(m: &DMatrix<f64>, v: &DVector<f64>, sigma: f64, rng: &mut ChaCha8Rng) -> (DMatrix<f64>, DVector<f64>) {
    if sigma == 0.0 {
        return (m.clone(), v.clone());
    }
    let normal = Normal::new(0.0, sigma).expect("sigma is finite and positive");
    let noisy = DMatrix::<f64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] + normal.sample(rng));
    let noisy = (&noisy + noisy.transpose()) * 0.5;
    let nv = DVector::<f64>::from_fn(v.len(), |i, _| v[i] + normal.sample(rng));
    (noisy, nv)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepSolution {
    pub theta_dot: DVector<f64>,
    pub rank: usize,
    pub residual: f64,
    /// No eigenvalue survived the cutoff; the step is zero.
    pub degenerate: bool,
}

/// Pseudo-inverse solve keeping eigenpairs with `d_j > cutoff * d_max`.
pub fn solve_step(m: &DMatrix<f64>, v: &DVector<f64>, svd_cutoff: f64) -> Result<StepSolution> {
    if m.nrows() != m.ncols() || m.nrows() != v.len() {
        return Err(Error::LengthMismatch {
            left: m.nrows(),
            right: v.len(),
        });
    }
    let p = v.len();
    if p == 0 {
        return Ok(StepSolution {
            theta_dot: DVector::zeros(0),
            rank: 0,
            residual: 0.0,
            degenerate: true,
        });
    }
    let eig = SymmetricEigen::new(m.clone());
    let d_max = eig.eigenvalues.max();
    let mut theta_dot = DVector::<f64>::zeros(p);
    let mut rank = 0;
    if d_max > 0.0 {
        for (j, &d) in eig.eigenvalues.iter().enumerate() {
            if d > svd_cutoff * d_max {
                let vec = eig.eigenvectors.column(j);
                theta_dot += vec * (vec.dot(v) / d);
                rank += 1;
            }
        }
    }
    let residual = (m * &theta_dot - v).norm();
    Ok(StepSolution {
        theta_dot,
        rank,
        residual,
        degenerate: rank == 0,
    })
}

/// Euler integration from `theta = 0`, recording every step.
pub fn evolve(a: &Ansatz, cfg: &EvolutionConfig, h: &PauliSum) -> Result<EvolutionTrace> {
    cfg.validate()?;
    let n = a.n_qubits();
    let hc = CompiledSum::new(h, n)?;
    let obs = cfg
        .observables
        .iter()
        .map(|(_, o)| {
            if o.max_imag() > 1e-12 {
                return Err(Error::NotHermitian(o.max_imag()));
            }
            CompiledSum::new(o, n)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut theta = vec![0.0; a.n_params()];
    let mut trace = EvolutionTrace {
        observable_labels: cfg.observables.iter().map(|(l, _)| l.clone()).collect(),
        rows: Vec::new(),
    };
    let steps = cfg.n_steps();
    for s in 0..=steps {
        let (m, v, phi) = compute_m_v(a, &theta, &hc)?;
        let amps = phi.amplitudes();
        let energy = inner(amps, &hc.apply(amps)).re;
        let observables = obs.iter().map(|o| inner(amps, &o.apply(amps)).re).collect();
        let (m, v) = add_noise(&m, &v, cfg.noise_sigma, &mut rng);
        let sol = solve_step(&m, &v, cfg.svd_cutoff)?;
        if sol.degenerate && a.n_params() > 0 {
            log::debug!("step {s}: no eigenvalue above cutoff, zero update");
        }
        let tau = s as f64 * cfg.delta_tau;
        trace.rows.push(TraceRow {
            tau,
            beta: 2.0 * tau,
            energy,
            residual: sol.residual,
            rank: sol.rank,
            observables,
            theta: theta.clone(),
        });
        if s == steps {
            break;
        }
        for (t, d) in theta.iter_mut().zip(sol.theta_dot.iter()) {
            *t += d * cfg.delta_tau;
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite {
                step: s + 1,
                trace: Box::new(trace),
            });
        }
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_identity_and_singular() {
        let v = DVector::from_vec(vec![0.3, -1.2]);
        let sol = solve_step(&DMatrix::identity(2, 2), &v, 1e-8).unwrap();
        assert!((sol.theta_dot - &v).amax() < 1e-14);
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0]));
        let sol = solve_step(&m, &DVector::from_vec(vec![1.0, 1.0]), 1e-8).unwrap();
        assert!((sol.theta_dot[0] - 1.0).abs() < 1e-14 && sol.theta_dot[1].abs() < 1e-14);
        assert_eq!(sol.rank, 1);
        let sol = solve_step(&DMatrix::zeros(2, 2), &v, 1e-8).unwrap();
        assert!(sol.degenerate);
        assert_eq!(sol.theta_dot.amax(), 0.0);
    }

    #[test]
    fn zero_noise_is_identity() {
        let m = DMatrix::from_fn(3, 3, |i, j| (i + j) as f64);
        let v = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (m2, v2) = add_noise(&m, &v, 0.0, &mut rng);
        assert_eq!((m2, v2), (m, v));
    }

    #[test]
    fn single_block_metric_is_one() {
        let a = Ansatz::from_generators(2, &["ZY".parse().unwrap()]).unwrap();
        let h = CompiledSum::new(&"-1*ZZ".parse().unwrap(), 2).unwrap();
        for t in [0.0, 0.4, 1.3] {
            let (m, _, _) = compute_m_v(&a, &[t], &h).unwrap();
            assert!((m[(0, 0)] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn duplicated_generator_is_singular() {
        let g: PauliSum = "ZY".parse().unwrap();
        let a = Ansatz::from_generators(2, &[g.clone(), g]).unwrap();
        let h = CompiledSum::new(&"-1*ZZ".parse().unwrap(), 2).unwrap();
        let (m, v, _) = compute_m_v(&a, &[0.1, 0.2], &h).unwrap();
        assert_eq!(solve_step(&m, &v, 1e-8).unwrap().rank, 1);
    }

    #[test]
    fn zero_hamiltonian_keeps_theta() {
        let a = Ansatz::from_generators(2, &["ZY".parse().unwrap(), "YZ".parse().unwrap()]).unwrap();
        let cfg = EvolutionConfig {
            delta_tau: 0.1,
            tau_max: 0.5,
            ..Default::default()
        };
        let trace = evolve(&a, &cfg, &PauliSum::zero(2)).unwrap();
        assert_eq!(trace.rows.len(), 6);
        for r in &trace.rows {
            assert!(r.theta.iter().all(|&t| t == 0.0));
            assert_eq!(r.energy, 0.0);
            assert_eq!(r.beta, 2.0 * r.tau);
        }
    }

    #[test]
    fn config_validation() {
        let bad = EvolutionConfig {
            delta_tau: 0.0,
            ..Default::default()
        };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let bad = EvolutionConfig {
            noise_sigma: -1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn csv_header_and_format() {
        let trace = EvolutionTrace {
            observable_labels: vec!["Z0".into()],
            rows: vec![TraceRow {
                tau: 0.01,
                beta: 0.02,
                energy: -1.0,
                residual: 0.0,
                rank: 2,
                observables: vec![0.5],
                theta: vec![0.1, 0.2],
            }],
        };
        let csv = trace.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "tau,beta,energy,residual,rank,Z0,theta_0,theta_1");
        assert!(lines.next().unwrap().starts_with("1.00000000000e-2,2.00000000000e-2,-1.00000000000e0,"));
    }
}
