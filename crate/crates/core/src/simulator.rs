//! Jordan–Wigner statevectors over a [`FockBasis`]: reference states, exact
//! generator exponentials by truncated Taylor series, energies and the
//! initialization-gradient commutator.
//!
//! Vectors live on the full Fock space or on a symmetry sector; every operator used
//! here conserves particle number and `S_z`, so sector restriction is exact.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fermion::Generator;
use crate::fock::{FockBasis, SparseOperator};
use crate::hamiltonian::MolecularHamiltonian;
use crate::pool::Pool;

pub const TAYLOR_TOL: f64 = 1e-13;
pub const TAYLOR_MAX_TERMS: usize = 200;
pub const IMAGINARY_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Statevector {
    basis: Arc<FockBasis>,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// Occupation-number basis state with the listed spin orbitals occupied.
    pub fn basis_state(basis: Arc<FockBasis>, occupied: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        for &m in occupied {
            if m >= basis.n_modes() {
                return Err(Error::ModeOutOfRange { mode: m, n_modes: basis.n_modes() });
            }
            if mask & (1 << m) != 0 {
                return Err(Error::DimensionMismatch(format!("mode {m} listed twice")));
            }
            mask |= 1 << m;
        }
        let idx = basis
            .index_of(mask)
            .ok_or_else(|| Error::DimensionMismatch(format!("occupation {mask:#b} is outside the basis")))?;
        let mut amps = vec![Complex64::default(); basis.dim()];
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(Statevector { basis, amps })
    }

    pub fn from_amplitudes(basis: Arc<FockBasis>, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::DimensionMismatch(format!("{} amplitudes for dimension {}", amps.len(), basis.dim())));
        }
        Ok(Statevector { basis, amps })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Statevector) -> Complex64 {
        dot(&self.amps, &other.amps)
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Hartree–Fock determinant on the full `2^n` Fock space.
pub fn hartree_fock_state(n_modes: usize, occupied: &[usize]) -> Result<Statevector> {
    Statevector::basis_state(Arc::new(FockBasis::full(n_modes)?), occupied)
}

/// Anti-Hermitian generator realized on a basis, with the 1-norm used to choose
/// exponential sub-steps.
#[derive(Clone, Debug)]
pub struct SparseGenerator {
    matrix: SparseOperator,
    norm1: f64,
}

impl SparseGenerator {
    pub fn new(generator: &Generator, basis: &FockBasis) -> Result<Self> {
        let matrix = SparseOperator::from_operator(generator.op(), basis)?;
        let norm1 = matrix.norm1();
        Ok(SparseGenerator { matrix, norm1 })
    }

    pub fn matrix(&self) -> &SparseOperator {
        &self.matrix
    }

    /// `exp(theta A) psi` in place, by Taylor series over sub-steps with
    /// `|theta| ||A||_1 / steps <= 1`.
    pub fn apply_exp(&self, amps: &mut [Complex64], theta: f64) -> Result<()> {
        if theta == 0.0 || self.norm1 == 0.0 {
            return Ok(());
        }
        let steps = (theta.abs() * self.norm1).ceil().max(1.0) as usize;
        let h = theta / steps as f64;
        let mut term = vec![Complex64::default(); amps.len()];
        let mut next = vec![Complex64::default(); amps.len()];
        for _ in 0..steps {
            term.copy_from_slice(amps);
            let mut converged = false;
            for k in 1..=TAYLOR_MAX_TERMS {
                self.matrix.apply_into(&term, &mut next);
                let scale = h / k as f64;
                let mut norm = 0.0;
                for (t, n) in term.iter_mut().zip(&next) {
                    *t = n * scale;
                    norm += t.norm_sqr();
                }
                for (a, t) in amps.iter_mut().zip(&term) {
                    *a += t;
                }
                if norm.sqrt() < TAYLOR_TOL {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::SeriesDivergence(TAYLOR_MAX_TERMS));
            }
        }
        Ok(())
    }
}

/// `exp(theta A) psi`.
pub fn apply_exponential(psi: &Statevector, generator: &Generator, theta: f64) -> Result<Statevector> {
    let sparse = SparseGenerator::new(generator, &psi.basis)?;
    let mut out = psi.clone();
    sparse.apply_exp(&mut out.amps, theta)?;
    Ok(out)
}

/// Hamiltonian realized on a basis.
#[derive(Clone, Debug)]
pub struct SparseHamiltonian {
    matrix: SparseOperator,
    e_core: f64,
}

impl SparseHamiltonian {
    pub fn new(h: &MolecularHamiltonian, basis: &FockBasis) -> Result<Self> {
        Ok(SparseHamiltonian { matrix: h.sparse(basis)?, e_core: h.e_core })
    }

    pub fn matrix(&self) -> &SparseOperator {
        &self.matrix
    }

    pub fn e_core(&self) -> f64 {
        self.e_core
    }

    /// `Re <psi|H|psi> + e_core` for a normalized `psi`.
    pub fn energy(&self, psi: &Statevector) -> Result<f64> {
        self.energy_of(&psi.amps)
    }

    pub fn energy_of(&self, amps: &[Complex64]) -> Result<f64> {
        if amps.len() != self.matrix.dim() {
            return Err(Error::DimensionMismatch(format!("state of dimension {} for H of {}", amps.len(), self.matrix.dim())));
        }
        let e = dot(amps, &self.matrix.apply(amps));
        if e.im.abs() > IMAGINARY_TOL {
            return Err(Error::ImaginaryEnergy(e.im));
        }
        Ok(e.re + self.e_core)
    }

    /// `<ref|[H, A]|ref> = 2 Re <H ref | A ref>`.
    pub fn init_gradient(&self, generator: &SparseGenerator, reference: &Statevector) -> f64 {
        let h_ref = self.matrix.apply(&reference.amps);
        let a_ref = generator.matrix.apply(&reference.amps);
        2.0 * dot(&h_ref, &a_ref).re
    }
}

/// Energy of `psi` under `h`, building the sparse matrix on `psi`'s basis.
pub fn energy(psi: &Statevector, h: &MolecularHamiltonian) -> Result<f64> {
    SparseHamiltonian::new(h, &psi.basis)?.energy(psi)
}

/// `<ref|[H, A]|ref>`.
pub fn init_gradient(h: &MolecularHamiltonian, generator: &Generator, reference: &Statevector) -> Result<f64> {
    let sh = SparseHamiltonian::new(h, &reference.basis)?;
    let sg = SparseGenerator::new(generator, &reference.basis)?;
    Ok(sh.init_gradient(&sg, reference))
}

/// Trotterized ansatz `prod_k exp(theta_k A_k) |ref>` with the first class applied
/// first (innermost).
#[derive(Clone, Debug)]
pub struct Ansatz {
    reference: Statevector,
    generators: Vec<SparseGenerator>,
}

impl Ansatz {
    pub fn new(pool: &Pool, reference: Statevector) -> Result<Self> {
        let generators = pool
            .classes()
            .iter()
            .map(|c| SparseGenerator::new(&c.generator, &reference.basis))
            .collect::<Result<_>>()?;
        Ok(Ansatz { reference, generators })
    }

    pub fn from_generators(generators: &[Generator], reference: Statevector) -> Result<Self> {
        let generators =
            generators.iter().map(|g| SparseGenerator::new(g, &reference.basis)).collect::<Result<_>>()?;
        Ok(Ansatz { reference, generators })
    }

    pub fn n_parameters(&self) -> usize {
        self.generators.len()
    }

    pub fn reference(&self) -> &Statevector {
        &self.reference
    }

    pub fn generators(&self) -> &[SparseGenerator] {
        &self.generators
    }

    pub fn state(&self, theta: &[f64]) -> Result<Statevector> {
        if theta.len() != self.generators.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} parameters for {} generators",
                theta.len(),
                self.generators.len()
            )));
        }
        let mut out = self.reference.clone();
        for (g, &t) in self.generators.iter().zip(theta) {
            g.apply_exp(&mut out.amps, t)?;
        }
        Ok(out)
    }
}

/// Ansatz state for a pool on the reference's basis.
pub fn ansatz_state(theta: &[f64], pool: &Pool, reference: &Statevector) -> Result<Statevector> {
    Ansatz::new(pool, reference.clone())?.state(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::FermionOperator;

    fn single(a: usize, i: usize) -> Generator {
        Generator::from_excitation(&FermionOperator::hop(a, i))
    }

    #[test]
    fn hartree_fock_bits() {
        let psi = hartree_fock_state(4, &[0, 1]).unwrap();
        assert_eq!(psi.amplitudes()[0b0011], Complex64::new(1.0, 0.0));
        assert!(hartree_fock_state(4, &[0, 0]).is_err());
        let vac = hartree_fock_state(3, &[]).unwrap();
        assert_eq!(vac.amplitudes()[0], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn givens_rotation_by_half_pi_transfers_population() {
        let psi = hartree_fock_state(2, &[0]).unwrap();
        let out = apply_exponential(&psi, &single(1, 0), std::f64::consts::FRAC_PI_2).unwrap();
        assert!(out.amplitudes()[0b01].norm() < 1e-12);
        assert!((out.amplitudes()[0b10].norm() - 1.0).abs() < 1e-12);
        let same = apply_exponential(&psi, &single(1, 0), 0.0).unwrap();
        assert_eq!(same.amplitudes(), psi.amplitudes());
    }

    #[test]
    fn large_angles_stay_unitary() {
        let psi = hartree_fock_state(4, &[0, 1]).unwrap();
        let g = Generator::from_excitation(&(FermionOperator::hop(2, 0) + FermionOperator::hop(3, 1)));
        let out = apply_exponential(&psi, &g, 17.3).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-10);
    }
}
