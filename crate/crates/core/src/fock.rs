//! Occupation-number bases and sparse operator realizations.
//!
//! A basis state is a bitmask whose bit `k` is the occupation of spin orbital `k`.
//! Spin orbitals are interleaved: `2p` is the alpha and `2p + 1` the beta orbital of
//! spatial orbital `p`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fermion::FermionOperator;

const MAX_MODES: usize = 62;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Kind {
    Full,
    Restricted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockBasis {
    n_modes: usize,
    states: Vec<u64>,
    kind: Kind,
}

impl FockBasis {
    /// All `2^n` occupation patterns.
    pub fn full(n_modes: usize) -> Result<Self> {
        if n_modes > 30 {
            return Err(Error::TooManyModes { n_modes, cap: 30 });
        }
        Ok(FockBasis { n_modes, states: (0..1u64 << n_modes).collect(), kind: Kind::Full })
    }

    /// Fixed total particle number.
    pub fn number(n_modes: usize, n_particles: usize) -> Result<Self> {
        if n_modes > MAX_MODES {
            return Err(Error::TooManyModes { n_modes, cap: MAX_MODES });
        }
        let states = fixed_weight(n_modes, n_particles);
        if states.is_empty() {
            return Err(Error::EmptySector(format!("{n_particles} particles in {n_modes} modes")));
        }
        Ok(FockBasis { n_modes, states, kind: Kind::Restricted })
    }

    /// Fixed alpha and beta particle numbers with interleaved spin orbitals.
    pub fn spin_sector(n_modes: usize, n_alpha: usize, n_beta: usize) -> Result<Self> {
        if n_modes > MAX_MODES {
            return Err(Error::TooManyModes { n_modes, cap: MAX_MODES });
        }
        let n_a_modes = n_modes.div_ceil(2);
        let n_b_modes = n_modes / 2;
        let alphas = fixed_weight(n_a_modes, n_alpha);
        let betas = fixed_weight(n_b_modes, n_beta);
        let mut states = Vec::with_capacity(alphas.len() * betas.len());
        for &a in &alphas {
            for &b in &betas {
                states.push(spread(a, 0) | spread(b, 1));
            }
        }
        if states.is_empty() {
            return Err(Error::EmptySector(format!(
                "({n_alpha} alpha, {n_beta} beta) in {n_modes} modes"
            )));
        }
        states.sort_unstable();
        Ok(FockBasis { n_modes, states, kind: Kind::Restricted })
    }

    /// Closed-shell singlet-compatible sector for `n_electrons` electrons (S_z = 0).
    pub fn closed_shell(n_modes: usize, n_electrons: usize) -> Result<Self> {
        if !n_electrons.is_multiple_of(2) {
            return Err(Error::Partition(format!("{n_electrons} electrons is not closed shell")));
        }
        Self::spin_sector(n_modes, n_electrons / 2, n_electrons / 2)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn index_of(&self, state: u64) -> Option<usize> {
        match self.kind {
            Kind::Full => {
                if (state as usize) < self.states.len() {
                    Some(state as usize)
                } else {
                    None
                }
            }
            Kind::Restricted => self.states.binary_search(&state).ok(),
        }
    }
}

/// All `n`-bit masks with exactly `k` bits set, ascending.
fn fixed_weight(n: usize, k: usize) -> Vec<u64> {
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![0];
    }
    let limit = 1u64 << n;
    let mut out = Vec::new();
    let mut v: u64 = (1u64 << k) - 1;
    while v < limit {
        out.push(v);
        // Gosper's hack: next integer with the same popcount.
        let t = v | (v - 1);
        v = (t + 1) | (((!t & (t + 1)) - 1) >> (v.trailing_zeros() + 1));
    }
    out
}

/// Place bit `j` of `mask` at position `2j + offset`.
fn spread(mask: u64, offset: usize) -> u64 {
    let mut out = 0;
    let mut m = mask;
    while m != 0 {
        let j = m.trailing_zeros() as usize;
        out |= 1u64 << (2 * j + offset);
        m &= m - 1;
    }
    out
}

/// Column-compressed sparse matrix of an operator restricted to a [`FockBasis`].
#[derive(Clone, Debug)]
pub struct SparseOperator {
    dim: usize,
    col_ptr: Vec<usize>,
    rows: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseOperator {
    pub fn from_operator(op: &FermionOperator, basis: &FockBasis) -> Result<Self> {
        if let Some(m) = op.max_mode() {
            if m >= basis.n_modes() {
                return Err(Error::ModeOutOfRange { mode: m, n_modes: basis.n_modes() });
            }
        }
        let terms: Vec<_> = op.terms().collect();
        let mut col_ptr = Vec::with_capacity(basis.dim() + 1);
        let mut rows = Vec::new();
        let mut vals = Vec::new();
        let mut column: Vec<(usize, Complex64)> = Vec::new();
        col_ptr.push(0);
        for &state in basis.states() {
            column.clear();
            for (key, c) in &terms {
                if let Some((next, sign)) = key.apply(state) {
                    if let Some(row) = basis.index_of(next) {
                        column.push((row, **c * sign));
                    }
                }
            }
            column.sort_by_key(|e| e.0);
            let mut k = 0;
            while k < column.len() {
                let row = column[k].0;
                let mut v = Complex64::default();
                while k < column.len() && column[k].0 == row {
                    v += column[k].1;
                    k += 1;
                }
                if v.norm() > 1e-15 {
                    rows.push(row);
                    vals.push(v);
                }
            }
            col_ptr.push(rows.len());
        }
        Ok(SparseOperator { dim: basis.dim(), col_ptr, rows, vals })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `y = A x`.
    pub fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.iter_mut().for_each(|v| *v = Complex64::default());
        for (col, &xv) in x.iter().enumerate() {
            if xv == Complex64::default() {
                continue;
            }
            for k in self.col_ptr[col]..self.col_ptr[col + 1] {
                y[self.rows[k]] += self.vals[k] * xv;
            }
        }
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::default(); self.dim];
        self.apply_into(x, &mut y);
        y
    }

    /// Maximum absolute column sum, an upper bound on the operator 2-norm's scale
    /// used to pick exponential sub-steps.
    pub fn norm1(&self) -> f64 {
        (0..self.dim)
            .map(|c| (self.col_ptr[c]..self.col_ptr[c + 1]).map(|k| self.vals[k].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for col in 0..self.dim {
            for k in self.col_ptr[col]..self.col_ptr[col + 1] {
                m[(self.rows[k], col)] += self.vals[k];
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sector_dimensions() {
        assert_eq!(FockBasis::full(4).unwrap().dim(), 16);
        assert_eq!(FockBasis::number(4, 2).unwrap().dim(), 6);
        // 8 spatial orbitals, 5 alpha and 5 beta electrons: C(8,5)^2.
        assert_eq!(FockBasis::closed_shell(16, 10).unwrap().dim(), 3136);
        assert_eq!(FockBasis::closed_shell(12, 6).unwrap().dim(), 400);
    }

    #[test]
    fn empty_sector_is_an_error() {
        assert!(matches!(FockBasis::number(3, 4), Err(Error::EmptySector(_))));
    }

    #[test]
    fn sparse_matches_dense() {
        let op = FermionOperator::hop(0, 3) + FermionOperator::hop(3, 0).scale_real(0.5);
        let basis = FockBasis::full(4).unwrap();
        let sparse = SparseOperator::from_operator(&op, &basis).unwrap();
        let dense = op.to_matrix_in(&basis).unwrap();
        assert!((sparse.to_dense() - dense).norm() < 1e-14);
    }
}
