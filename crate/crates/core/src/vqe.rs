//! FCI references, BFGS optimisation of the Trotterized ansatz and the
//! initialization-gradient plateau diagnostic.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{FockBasis, SparseOperator};
use crate::hamiltonian::MolecularHamiltonian;
use crate::pool::{ExcitationKind, Pool};
use crate::simulator::{Ansatz, SparseHamiltonian, Statevector};

/// Largest sector diagonalized densely.
pub const DENSE_CAP: usize = 2000;
/// Largest sector handled by the Lanczos path.
pub const LANCZOS_CAP: usize = 1 << 22;
pub const FCI_RESIDUAL_TOL: f64 = 1e-8;
pub const PLATEAU_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EigenMethod {
    Dense,
    Lanczos,
}

#[derive(Clone, Debug)]
pub struct FciResult {
    pub energy: f64,
    pub vector: Statevector,
    pub residual: f64,
    pub method: EigenMethod,
}

/// Lowest eigenpair of `h` on its `(N, S_z = 0)` sector.
pub fn fci_reference(h: &MolecularHamiltonian) -> Result<FciResult> {
    let basis = Arc::new(h.sector()?);
    let sh = SparseHamiltonian::new(h, &basis)?;
    fci_on(&sh, basis)
}

/// Lowest eigenpair of an already realized Hamiltonian.
pub fn fci_on(sh: &SparseHamiltonian, basis: Arc<FockBasis>) -> Result<FciResult> {
    let dim = basis.dim();
    let m = sh.matrix();
    let (value, vector, method) = if dim <= DENSE_CAP {
        let eig = m.to_dense().symmetric_eigen();
        let k = eig.eigenvalues.imin();
        let v: Vec<Complex64> = eig.eigenvectors.column(k).iter().copied().collect();
        (eig.eigenvalues[k], v, EigenMethod::Dense)
    } else if dim <= LANCZOS_CAP {
        let (value, v) = lanczos_ground(m)?;
        (value, v, EigenMethod::Lanczos)
    } else {
        return Err(Error::SectorTooLarge { dim });
    };
    let hv = m.apply(&vector);
    let residual = hv.iter().zip(&vector).map(|(a, b)| (a - b * value).norm_sqr()).sum::<f64>().sqrt();
    if residual > FCI_RESIDUAL_TOL {
        return Err(Error::Eigensolver(format!("residual {residual:.3e} above {FCI_RESIDUAL_TOL:e}")));
    }
    Ok(FciResult {
        energy: value + sh.e_core(),
        vector: Statevector::from_amplitudes(basis, vector)?,
        residual,
        method,
    })
}

/// Restarted Lanczos with full reorthogonalization.
fn lanczos_ground(m: &SparseOperator) -> Result<(f64, Vec<Complex64>)> {
    let dim = m.dim();
    let krylov = dim.min(120);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut start: Vec<Complex64> = (0..dim).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, 0.0)).collect();
    normalize(&mut start);
    for _restart in 0..50 {
        let mut q: Vec<Vec<Complex64>> = vec![start.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        for j in 0..krylov {
            let mut w = m.apply(&q[j]);
            alpha.push(dot(&q[j], &w).re);
            for _ in 0..2 {
                for v in &q {
                    let c = dot(v, &w);
                    for (wi, vi) in w.iter_mut().zip(v) {
                        *wi -= vi * c;
                    }
                }
            }
            let b = norm(&w);
            if j + 1 == krylov || b < 1e-12 {
                break;
            }
            beta.push(b);
            w.iter_mut().for_each(|x| *x /= b);
            q.push(w);
        }
        let k = alpha.len();
        let t = DMatrix::from_fn(k, k, |r, c| {
            if r == c {
                alpha[r]
            } else if r + 1 == c {
                beta[r]
            } else if c + 1 == r {
                beta[c]
            } else {
                0.0
            }
        });
        let eig = t.symmetric_eigen();
        let idx = eig.eigenvalues.imin();
        let value = eig.eigenvalues[idx];
        let y = eig.eigenvectors.column(idx);
        let mut ritz = vec![Complex64::default(); dim];
        for (coef, v) in y.iter().zip(&q) {
            for (r, vi) in ritz.iter_mut().zip(v) {
                *r += vi * *coef;
            }
        }
        normalize(&mut ritz);
        let hv = m.apply(&ritz);
        let res = hv.iter().zip(&ritz).map(|(a, b)| (a - b * value).norm_sqr()).sum::<f64>().sqrt();
        if res < 1e-10 {
            return Ok((value, ritz));
        }
        start = ritz;
    }
    Err(Error::Eigensolver("Lanczos did not converge within 50 restarts".into()))
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(a: &mut [Complex64]) {
    let n = norm(a);
    a.iter_mut().for_each(|x| *x /= n);
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VqeConfig {
    pub grad_norm_tol: f64,
    pub energy_stationarity_tol: f64,
    pub max_iterations: usize,
    pub fd_step: f64,
    /// Starting point; zeros (the reference state) when absent.
    pub initial_theta: Option<Vec<f64>>,
}

impl Default for VqeConfig {
    fn default() -> Self {
        VqeConfig {
            grad_norm_tol: 1e-4,
            energy_stationarity_tol: 1e-6,
            max_iterations: 1000,
            fd_step: 1e-5,
            initial_theta: None,
        }
    }
}

impl VqeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.grad_norm_tol > 0.0 && self.energy_stationarity_tol > 0.0 && self.fd_step > 0.0) {
            return Err(Error::Config("tolerances and the finite-difference step must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub energy: f64,
    pub grad_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VqeResult {
    pub energy: f64,
    pub theta: Vec<f64>,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub delta_fci_mha: Option<f64>,
    pub energy_evaluations: usize,
    pub trace: Vec<IterationRecord>,
}

/// Energy landscape `E(theta)` of an ansatz.
pub struct Objective<'a> {
    pub hamiltonian: &'a SparseHamiltonian,
    pub ansatz: &'a Ansatz,
    evaluations: std::cell::Cell<usize>,
}

impl<'a> Objective<'a> {
    pub fn new(hamiltonian: &'a SparseHamiltonian, ansatz: &'a Ansatz) -> Self {
        Objective { hamiltonian, ansatz, evaluations: std::cell::Cell::new(0) }
    }

    pub fn energy(&self, theta: &[f64]) -> Result<f64> {
        self.evaluations.set(self.evaluations.get() + 1);
        self.hamiltonian.energy(&self.ansatz.state(theta)?)
    }

    /// Central finite differences.
    pub fn gradient(&self, theta: &[f64], step: f64) -> Result<Vec<f64>> {
        let mut x = theta.to_vec();
        let mut g = Vec::with_capacity(theta.len());
        for k in 0..theta.len() {
            x[k] = theta[k] + step;
            let plus = self.energy(&x)?;
            x[k] = theta[k] - step;
            let minus = self.energy(&x)?;
            x[k] = theta[k];
            g.push((plus - minus) / (2.0 * step));
        }
        Ok(g)
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations.get()
    }
}

/// BFGS with Armijo backtracking from the configured starting point.
pub fn minimize(objective: &Objective<'_>, config: &VqeConfig) -> Result<VqeResult> {
    config.validate()?;
    let n = objective.ansatz.n_parameters();
    let mut x = DVector::from_vec(match &config.initial_theta {
        Some(t) if t.len() == n => t.clone(),
        Some(t) => {
            return Err(Error::Config(format!("initial theta has {} entries, pool has {n} parameters", t.len())));
        }
        None => vec![0.0; n],
    });
    let mut f = objective.energy(x.as_slice())?;
    let mut g = DVector::from_vec(objective.gradient(x.as_slice(), config.fd_step)?);
    let mut h_inv = DMatrix::<f64>::identity(n, n);
    let mut trace = vec![IterationRecord { iteration: 0, energy: f, grad_norm: g.norm() }];
    let mut last_change = f64::INFINITY;
    let mut iterations = 0;
    let finish = |x: &DVector<f64>, f: f64, g: &DVector<f64>, iterations, converged, trace| VqeResult {
        energy: f,
        theta: x.as_slice().to_vec(),
        grad_norm: g.norm(),
        iterations,
        converged,
        delta_fci_mha: None,
        energy_evaluations: objective.evaluations(),
        trace,
    };
    loop {
        let stationary = iterations == 0 || last_change.abs() < config.energy_stationarity_tol;
        if g.norm() < config.grad_norm_tol && stationary {
            return Ok(finish(&x, f, &g, iterations, true, trace));
        }
        if iterations >= config.max_iterations {
            return Ok(finish(&x, f, &g, iterations, false, trace));
        }
        let mut p = -(&h_inv * &g);
        let mut slope = g.dot(&p);
        if slope >= 0.0 {
            h_inv = DMatrix::identity(n, n);
            p = -g.clone();
            slope = g.dot(&p);
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = &x + &p * step;
            let ft = objective.energy(trial.as_slice())?;
            if ft <= f + 1e-4 * step * slope {
                accepted = Some((trial, ft));
                break;
            }
            step *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            return Err(Error::LineSearch { iterations, energy: f, theta: x.as_slice().to_vec() });
        };
        let g_new = DVector::from_vec(objective.gradient(x_new.as_slice(), config.fd_step)?);
        let s = &x_new - &x;
        let y = &g_new - &g;
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() && sy > 0.0 {
            if iterations == 0 {
                h_inv *= sy / y.dot(&y);
            }
            let rho = 1.0 / sy;
            let hy = &h_inv * &y;
            let yhy = y.dot(&hy);
            h_inv += (&s * s.transpose()) * (rho * rho * yhy + rho) - (&hy * s.transpose() + &s * hy.transpose()) * rho;
        }
        last_change = f_new - f;
        x = x_new;
        f = f_new;
        g = g_new;
        iterations += 1;
        trace.push(IterationRecord { iteration: iterations, energy: f, grad_norm: g.norm() });
    }
}

/// Prepared VQE problem on the Hamiltonian's `(N, S_z = 0)` sector with the
/// closed-shell reference determinant.
pub struct VqeProblem {
    pub basis: Arc<FockBasis>,
    pub hamiltonian: SparseHamiltonian,
    pub reference: Statevector,
}

impl VqeProblem {
    pub fn new(h: &MolecularHamiltonian, occupied_spin_orbitals: &[usize]) -> Result<Self> {
        let basis = Arc::new(h.sector()?);
        let hamiltonian = SparseHamiltonian::new(h, &basis)?;
        let reference = Statevector::basis_state(basis.clone(), occupied_spin_orbitals)?;
        Ok(VqeProblem { basis, hamiltonian, reference })
    }

    pub fn reference_energy(&self) -> Result<f64> {
        self.hamiltonian.energy(&self.reference)
    }

    pub fn fci(&self) -> Result<FciResult> {
        fci_on(&self.hamiltonian, self.basis.clone())
    }

    pub fn run(&self, pool: &Pool, config: &VqeConfig, fci_energy: Option<f64>) -> Result<VqeResult> {
        let ansatz = Ansatz::new(pool, self.reference.clone())?;
        let objective = Objective::new(&self.hamiltonian, &ansatz);
        let mut result = minimize(&objective, config)?;
        result.delta_fci_mha = fci_energy.map(|e| (result.energy - e) * 1e3);
        Ok(result)
    }
}

/// Minimize the energy over a pool from the reference determinant.
pub fn run_vqe(
    h: &MolecularHamiltonian,
    occupied_spin_orbitals: &[usize],
    pool: &Pool,
    config: &VqeConfig,
    fci_energy: Option<f64>,
) -> Result<VqeResult> {
    VqeProblem::new(h, occupied_spin_orbitals)?.run(pool, config, fci_energy)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlateauRow {
    pub index: usize,
    pub class: String,
    pub kind: ExcitationKind,
    pub gradient: f64,
    pub plateau: bool,
    /// Whether the class survives the cross-referenced filter, when one is given.
    pub in_reference_pool: Option<bool>,
}

/// `<ref|[H, A_k]|ref>` for every class of `pool`, flagging `|g| < 1e-10`.
pub fn plateau_diagnostic(
    hamiltonian: &SparseHamiltonian,
    pool: &Pool,
    reference: &Statevector,
    cross_reference: Option<&Pool>,
) -> Result<Vec<PlateauRow>> {
    let ansatz = Ansatz::new(pool, reference.clone())?;
    Ok(pool
        .classes()
        .iter()
        .zip(ansatz.generators())
        .enumerate()
        .map(|(index, (class, gen))| {
            let gradient = hamiltonian.init_gradient(gen, reference);
            PlateauRow {
                index,
                class: class.key.to_string(),
                kind: class.kind(),
                gradient,
                plateau: gradient.abs() < PLATEAU_TOL,
                in_reference_pool: cross_reference.map(|p| p.contains(&class.key)),
            }
        })
        .collect())
}
