//! Lie closure of generator sets over the real numbers, commutativity checks and
//! the torus identity `prod_k exp(theta_k A_k) = exp(sum_k theta_k A_k)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fermion::{commutator, FermionOperator, Generator};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const TORUS_TOL: f64 = 1e-10;

/// Element of a real Lie algebra of anti-Hermitian operators.
pub trait LieElement: Clone {
    fn bracket(&self, other: &Self) -> Self;
    /// Real part of the Hermitian inner product.
    fn real_inner(&self, other: &Self) -> f64;
    /// `self += c * other`.
    fn axpy(&mut self, c: f64, other: &Self);
    fn scaled(&self, c: f64) -> Self;

    fn norm(&self) -> f64 {
        self.real_inner(self).max(0.0).sqrt()
    }
}

impl LieElement for FermionOperator {
    fn bracket(&self, other: &Self) -> Self {
        commutator(self, other)
    }

    fn real_inner(&self, other: &Self) -> f64 {
        self.inner(other).re
    }

    fn axpy(&mut self, c: f64, other: &Self) {
        FermionOperator::axpy(self, Complex64::new(c, 0.0), other);
    }

    fn scaled(&self, c: f64) -> Self {
        self.scale_real(c)
    }
}

impl LieElement for DMatrix<Complex64> {
    fn bracket(&self, other: &Self) -> Self {
        self * other - other * self
    }

    fn real_inner(&self, other: &Self) -> f64 {
        self.iter().zip(other.iter()).map(|(a, b)| (a.conj() * b).re).sum()
    }

    fn axpy(&mut self, c: f64, other: &Self) {
        *self += other * Complex64::new(c, 0.0);
    }

    fn scaled(&self, c: f64) -> Self {
        self * Complex64::new(c, 0.0)
    }
}

#[derive(Clone, Debug)]
pub struct DlaResult<T> {
    /// Orthonormal basis of the closure under the real inner product.
    pub basis: Vec<T>,
    pub dimension: usize,
    pub is_abelian: bool,
    pub truncated: bool,
    pub deficit_vs_full: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DlaSummary {
    pub dimension: usize,
    pub is_abelian: bool,
    pub truncated: bool,
    pub basis_size: usize,
    pub deficit_vs_full: Option<i64>,
}

impl<T> DlaResult<T> {
    pub fn summary(&self) -> DlaSummary {
        DlaSummary {
            dimension: self.dimension,
            is_abelian: self.is_abelian,
            truncated: self.truncated,
            basis_size: self.basis.len(),
            deficit_vs_full: self.deficit_vs_full,
        }
    }
}

/// Modified Gram–Schmidt with one reorthogonalization pass; appends the normalized
/// residual when it exceeds `tol` relative to the input norm.
fn try_extend<T: LieElement>(basis: &mut Vec<T>, x: &T, tol: f64) -> bool {
    let scale = x.norm();
    if scale < 1e-13 {
        return false;
    }
    let mut r = x.scaled(1.0 / scale);
    for _ in 0..2 {
        for b in basis.iter() {
            let c = b.real_inner(&r);
            r.axpy(-c, b);
        }
    }
    let n = r.norm();
    if n <= tol {
        return false;
    }
    basis.push(r.scaled(1.0 / n));
    true
}

/// Real span of iterated commutators of `gens`, grown sweep by sweep until no new
/// direction appears or `max_dim` is reached.
pub fn lie_closure<T: LieElement>(gens: &[T], tol: f64, max_dim: usize) -> DlaResult<T> {
    let mut basis: Vec<T> = Vec::new();
    let mut truncated = false;
    for g in gens {
        if basis.len() >= max_dim {
            truncated = true;
            break;
        }
        try_extend(&mut basis, g, tol);
    }
    let mut done = 0;
    'outer: while !truncated && done < basis.len() {
        let j = done;
        for i in 0..j {
            let c = basis[i].bracket(&basis[j]);
            if try_extend(&mut basis, &c, tol) && basis.len() >= max_dim {
                truncated = true;
                break 'outer;
            }
        }
        done += 1;
    }
    let is_abelian = (0..basis.len()).all(|j| (0..j).all(|i| basis[i].bracket(&basis[j]).norm() <= tol));
    DlaResult { dimension: basis.len(), basis, is_abelian, truncated, deficit_vs_full: None }
}

/// Closure of pool generators as symbolic operators.
pub fn generator_closure(gens: &[Generator], tol: f64, max_dim: usize) -> DlaResult<FermionOperator> {
    let ops: Vec<FermionOperator> = gens.iter().map(|g| g.op().clone()).collect();
    lie_closure(&ops, tol, max_dim)
}

/// Every pairwise commutator canonicalizes to zero.
pub fn is_abelian(gens: &[Generator]) -> bool {
    (0..gens.len()).all(|j| (0..j).all(|i| commutator(gens[i].op(), gens[j].op()).is_empty()))
}

/// Residual of the largest commutator left after projecting onto the closure basis.
pub fn closure_residual<T: LieElement>(result: &DlaResult<T>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..result.basis.len() {
        for j in 0..i {
            let mut r = result.basis[j].bracket(&result.basis[i]);
            for b in &result.basis {
                let c = b.real_inner(&r);
                r.axpy(-c, b);
            }
            worst = worst.max(r.norm());
        }
    }
    worst
}

/// `d (d - 1)`: dimension of `u(d)` beyond its maximal torus.
pub fn dimension_deficit(d: usize) -> usize {
    d * d.saturating_sub(1)
}

/// Compare `prod_k exp(theta_k A_k)` with `exp(sum_k theta_k A_k)` on `samples`
/// seeded random draws in `[-pi, pi)`, on the full Fock space or a particle-number
/// sector. Returns false on the first draw differing by more than `1e-10` in
/// Frobenius norm (an upper bound on the operator norm).
pub fn torus_check(gens: &[Generator], n_modes: usize, samples: usize, sector: Option<usize>, seed: u64) -> Result<bool> {
    if gens.is_empty() {
        return Ok(true);
    }
    let mats: Vec<DMatrix<Complex64>> =
        gens.iter().map(|g| g.op().to_matrix(n_modes, sector)).collect::<Result<_>>()?;
    Ok(torus_defects(&mats, samples, seed)?.into_iter().all(|d| d <= TORUS_TOL * TORUS_TOL))
}

/// Squared Frobenius distance per draw. Draws depend only on the seed and the number
/// of generators, so blocks of one operator see the same parameters.
fn torus_defects(mats: &[DMatrix<Complex64>], samples: usize, seed: u64) -> Result<Vec<f64>> {
    let dim = mats[0].nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let theta: Vec<f64> = (0..mats.len()).map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)).collect();
        let mut product = DMatrix::<Complex64>::identity(dim, dim);
        let mut sum = DMatrix::<Complex64>::zeros(dim, dim);
        for (m, &t) in mats.iter().zip(&theta) {
            let scaled = m * Complex64::new(t, 0.0);
            product = exp_anti_hermitian(&scaled) * product;
            sum += scaled;
        }
        let diff = (product - exp_anti_hermitian(&sum)).norm_squared();
        if !diff.is_finite() {
            return Err(Error::Eigensolver("matrix exponential overflowed".into()));
        }
        out.push(diff);
    }
    Ok(out)
}

/// `exp(A)` for anti-Hermitian `A` through the eigendecomposition of the Hermitian
/// `iA = V L V+`, so `exp(A) = V exp(-i L) V+`.
fn exp_anti_hermitian(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    let eig = (a * i).symmetric_eigen();
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| (-i * l).exp()));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

/// [`torus_check`] on the full Fock space of the modes the generators touch, relabelled
/// to `0..k`. Number-conserving operators on those modes generate the same algebra
/// there as on the whole system, so this is exact. The space is assembled from its
/// particle-number blocks, with the Frobenius defect summed over blocks.
pub fn torus_check_on_support(gens: &[Generator], samples: usize, seed: u64) -> Result<bool> {
    if gens.is_empty() {
        return Ok(true);
    }
    let mut modes: Vec<usize> = gens.iter().flat_map(|g| g.op().support()).collect();
    modes.sort_unstable();
    modes.dedup();
    let compact: Vec<FermionOperator> =
        gens.iter().map(|g| g.op().relabel(|m| modes.binary_search(&m).unwrap_or(m))).collect();
    if let Some(g) = compact.iter().find(|g| !g.conserves_number()) {
        return Err(Error::DimensionMismatch(format!("generator does not conserve particle number: {g}")));
    }
    let mut total = vec![0.0; samples];
    for n in 0..=modes.len() {
        let mats: Vec<DMatrix<Complex64>> =
            compact.iter().map(|g| g.to_matrix(modes.len(), Some(n))).collect::<Result<_>>()?;
        for (t, d) in total.iter_mut().zip(torus_defects(&mats, samples, seed)?) {
            *t += d;
        }
    }
    Ok(total.into_iter().all(|d| d <= TORUS_TOL * TORUS_TOL))
}

/// The `d^2` anti-Hermitian elementary generators of `u(d)`: `i E_kk`,
/// `E_kl - E_lk` and `i (E_kl + E_lk)` for `k < l`.
pub fn u_generators(d: usize) -> Vec<DMatrix<Complex64>> {
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    let mut out = Vec::new();
    for k in 0..d {
        let mut m = DMatrix::zeros(d, d);
        m[(k, k)] = i;
        out.push(m);
    }
    for k in 0..d {
        for l in k + 1..d {
            let mut real = DMatrix::zeros(d, d);
            real[(k, l)] = one;
            real[(l, k)] = -one;
            out.push(real);
            let mut imag = DMatrix::zeros(d, d);
            imag[(k, l)] = i;
            imag[(l, k)] = i;
            out.push(imag);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(a: usize, i: usize) -> Generator {
        Generator::from_excitation(&FermionOperator::hop(a, i))
    }

    #[test]
    fn deficits() {
        assert_eq!(dimension_deficit(1), 0);
        assert_eq!(dimension_deficit(2), 2);
        assert_eq!(dimension_deficit(3), 6);
    }

    #[test]
    fn u2_closes_at_four() {
        let r = lie_closure(&u_generators(2), DEFAULT_TOL, 64);
        assert_eq!(r.dimension, 4);
        assert!(!r.is_abelian);
        let torus = lie_closure(&u_generators(2)[..2], DEFAULT_TOL, 64);
        assert_eq!(torus.dimension, 2);
        assert!(torus.is_abelian);
    }

    #[test]
    fn disjoint_singles_commute() {
        let gens = vec![single(2, 0), single(3, 1)];
        assert!(is_abelian(&gens));
        let r = generator_closure(&gens, DEFAULT_TOL, 64);
        assert_eq!(r.dimension, 2);
        assert!(r.is_abelian);
        assert!(torus_check(&gens, 4, 10, None, 7).unwrap());
    }

    #[test]
    fn overlapping_singles_break_the_torus() {
        let gens = vec![single(2, 0), single(3, 0)];
        assert!(!is_abelian(&gens));
        assert!(!torus_check(&gens, 4, 10, None, 7).unwrap());
        assert!(torus_check(&[], 4, 10, None, 7).unwrap());
        assert!(is_abelian(&gens[..1]));
    }

    #[test]
    fn truncation_is_flagged() {
        let r = lie_closure(&u_generators(3), DEFAULT_TOL, 5);
        assert!(r.truncated);
        assert_eq!(r.dimension, 5);
    }
}
