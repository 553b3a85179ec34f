//! Second-quantized fermionic operators over the physical vacuum.
//!
//! Every [`FermionOperator`] is kept in canonical normal order: all creation
//! operators first in strictly increasing mode order, then all annihilation
//! operators in strictly increasing mode order. The fermionic sign of the
//! reordering is absorbed into the coefficient, so a term is identified by the
//! pair of mode lists alone and operators can be compared, hashed and treated as
//! vectors over the basis of canonical terms.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::FockBasis;

/// Coefficients at or below this magnitude are dropped after every arithmetic operation.
pub const DEAD_TERM: f64 = 1e-14;

/// Largest mode count for a sector-restricted dense matrix.
pub const SECTOR_MODE_CAP: usize = 16;
/// Largest mode count for a dense matrix over the full Fock space.
pub const FULL_MODE_CAP: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LadderOp {
    pub mode: usize,
    /// Creation operator when true.
    pub dagger: bool,
}

impl LadderOp {
    pub fn cre(mode: usize) -> Self {
        LadderOp { mode, dagger: true }
    }

    pub fn ann(mode: usize) -> Self {
        LadderOp { mode, dagger: false }
    }

    fn adjoint(self) -> Self {
        LadderOp { mode: self.mode, dagger: !self.dagger }
    }
}

/// Canonical operator string: creations then annihilations, each strictly increasing.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermKey {
    cre: Vec<usize>,
    ann: Vec<usize>,
}

impl TermKey {
    pub fn identity() -> Self {
        TermKey::default()
    }

    pub fn creations(&self) -> &[usize] {
        &self.cre
    }

    pub fn annihilations(&self) -> &[usize] {
        &self.ann
    }

    pub fn is_identity(&self) -> bool {
        self.cre.is_empty() && self.ann.is_empty()
    }

    pub fn ops(&self) -> Vec<LadderOp> {
        self.cre
            .iter()
            .map(|&m| LadderOp::cre(m))
            .chain(self.ann.iter().map(|&m| LadderOp::ann(m)))
            .collect()
    }

    pub fn max_mode(&self) -> Option<usize> {
        self.cre.last().copied().max(self.ann.last().copied())
    }

    /// Apply the operator string to an occupation bitmask under the Jordan–Wigner
    /// sign convention (bit `k` is the occupation of mode `k`).
    pub fn apply(&self, state: u64) -> Option<(u64, f64)> {
        let mut s = state;
        let mut sign = 1.0;
        for &m in self.ann.iter().rev() {
            let bit = 1u64 << m;
            if s & bit == 0 {
                return None;
            }
            if (s & (bit - 1)).count_ones() % 2 == 1 {
                sign = -sign;
            }
            s &= !bit;
        }
        for &m in self.cre.iter().rev() {
            let bit = 1u64 << m;
            if s & bit != 0 {
                return None;
            }
            if (s & (bit - 1)).count_ones() % 2 == 1 {
                sign = -sign;
            }
            s |= bit;
        }
        Some((s, sign))
    }
}

impl fmt::Display for TermKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let mut first = true;
        for op in self.ops() {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if op.dagger {
                write!(f, "a+{}", op.mode)?;
            } else {
                write!(f, "a{}", op.mode)?;
            }
        }
        Ok(())
    }
}

/// Complex linear combination of canonical operator strings.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FermionOperator {
    terms: BTreeMap<TermKey, Complex64>,
}

impl FermionOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::scalar(Complex64::new(1.0, 0.0))
    }

    pub fn scalar(c: Complex64) -> Self {
        let mut op = Self::zero();
        op.add_term(TermKey::identity(), c);
        op
    }

    /// Single ladder-operator product with a real coefficient, normal ordered.
    pub fn product(ops: &[LadderOp], coeff: f64) -> Self {
        normal_order(ops, Complex64::new(coeff, 0.0))
    }

    /// Number-conserving hopping term `a+_p a_q`.
    pub fn hop(p: usize, q: usize) -> Self {
        Self::product(&[LadderOp::cre(p), LadderOp::ann(q)], 1.0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, key: &TermKey) -> Complex64 {
        self.terms.get(key).copied().unwrap_or_default()
    }

    /// Coefficient of a term given as an arbitrary ladder-operator string, which must
    /// already be in canonical order.
    pub fn coeff_of(&self, ops: &[LadderOp]) -> Complex64 {
        let (key, sign) = match canonical_key(ops) {
            Some(k) => k,
            None => return Complex64::default(),
        };
        self.coeff(&key) * sign
    }

    pub fn add_term(&mut self, key: TermKey, c: Complex64) {
        let entry = self.terms.entry(key.clone()).or_default();
        *entry += c;
        if entry.norm() <= DEAD_TERM {
            self.terms.remove(&key);
        }
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() > DEAD_TERM);
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = FermionOperator {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        };
        out.prune();
        out
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: Complex64, other: &FermionOperator) {
        for (k, v) in &other.terms {
            *self.terms.entry(k.clone()).or_default() += c * v;
        }
        self.prune();
    }

    /// Operator product `self * other`, normal ordered.
    pub fn mul_op(&self, other: &FermionOperator) -> FermionOperator {
        let mut acc: BTreeMap<TermKey, Complex64> = BTreeMap::new();
        for (k1, c1) in &self.terms {
            let left = k1.ops();
            for (k2, c2) in &other.terms {
                let mut ops = left.clone();
                ops.extend(k2.ops());
                normal_order_into(ops, c1 * c2, &mut acc);
            }
        }
        let mut out = FermionOperator { terms: acc };
        out.prune();
        out
    }

    /// Hermitian conjugate.
    pub fn adjoint(&self) -> FermionOperator {
        let mut acc = BTreeMap::new();
        for (k, c) in &self.terms {
            let ops: Vec<LadderOp> = k.ops().into_iter().rev().map(LadderOp::adjoint).collect();
            normal_order_into(ops, c.conj(), &mut acc);
        }
        let mut out = FermionOperator { terms: acc };
        out.prune();
        out
    }

    /// Rename modes through an injective `map`.
    pub fn relabel(&self, map: impl Fn(usize) -> usize) -> FermionOperator {
        let mut acc = BTreeMap::new();
        for (k, c) in &self.terms {
            let ops: Vec<LadderOp> = k.ops().into_iter().map(|o| LadderOp { mode: map(o.mode), ..o }).collect();
            normal_order_into(ops, *c, &mut acc);
        }
        let mut out = FermionOperator { terms: acc };
        out.prune();
        out
    }

    /// Sorted modes touched by any term.
    pub fn support(&self) -> Vec<usize> {
        let mut modes: Vec<usize> =
            self.terms.keys().flat_map(|k| k.ops().into_iter().map(|o| o.mode)).collect();
        modes.sort_unstable();
        modes.dedup();
        modes
    }

    /// Hermitian inner product `sum conj(c1) c2` over matching canonical terms.
    pub fn inner(&self, other: &FermionOperator) -> Complex64 {
        let (small, large, flip) = if self.len() <= other.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut acc = Complex64::default();
        for (k, c) in &small.terms {
            if let Some(d) = large.terms.get(k) {
                acc += if flip { d.conj() * c } else { c.conj() * d };
            }
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_mode(&self) -> Option<usize> {
        self.terms.keys().filter_map(TermKey::max_mode).max()
    }

    /// Every term has as many creations as annihilations.
    pub fn conserves_number(&self) -> bool {
        self.terms.keys().all(|k| k.cre.len() == k.ann.len())
    }

    /// `A† = -A` up to `tol` in every coefficient.
    pub fn is_anti_hermitian(&self, tol: f64) -> bool {
        let sum = self.adjoint() + self.clone();
        sum.max_abs_coeff() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let diff = self.adjoint() - self.clone();
        diff.max_abs_coeff() <= tol
    }

    /// Dense matrix on the full Fock space (`sector = None`) or on the fixed
    /// particle-number sector `sector = Some(n)`.
    pub fn to_matrix(&self, n_modes: usize, sector: Option<usize>) -> Result<DMatrix<Complex64>> {
        let cap = if sector.is_some() { SECTOR_MODE_CAP } else { FULL_MODE_CAP };
        if n_modes > cap {
            return Err(Error::TooManyModes { n_modes, cap });
        }
        let basis = match sector {
            Some(n) => FockBasis::number(n_modes, n)?,
            None => FockBasis::full(n_modes)?,
        };
        self.to_matrix_in(&basis)
    }

    /// Dense matrix restricted to an arbitrary Fock basis. Transitions leaving the
    /// basis are dropped, so the result is only a faithful restriction when the
    /// operator preserves the basis' quantum numbers.
    pub fn to_matrix_in(&self, basis: &FockBasis) -> Result<DMatrix<Complex64>> {
        if let Some(m) = self.max_mode() {
            if m >= basis.n_modes() {
                return Err(Error::ModeOutOfRange { mode: m, n_modes: basis.n_modes() });
            }
        }
        let dim = basis.dim();
        let mut out = DMatrix::<Complex64>::zeros(dim, dim);
        for (col, &state) in basis.states().iter().enumerate() {
            for (key, c) in &self.terms {
                if let Some((next, sign)) = key.apply(state) {
                    if let Some(row) = basis.index_of(next) {
                        out[(row, col)] += c * sign;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// `[a, b] = ab - ba`.
pub fn commutator(a: &FermionOperator, b: &FermionOperator) -> FermionOperator {
    let mut out = a.mul_op(b);
    out.axpy(Complex64::new(-1.0, 0.0), &b.mul_op(a));
    out
}

pub fn adjoint(a: &FermionOperator) -> FermionOperator {
    a.adjoint()
}

/// Bring an arbitrary ladder-operator product into canonical form using the
/// canonical anticommutation relations.
pub fn normal_order(raw: &[LadderOp], coeff: Complex64) -> FermionOperator {
    let mut acc = BTreeMap::new();
    normal_order_into(raw.to_vec(), coeff, &mut acc);
    let mut out = FermionOperator { terms: acc };
    out.prune();
    out
}

/// Canonical key and sign for a product with no repeated ladder operators and no
/// annihilator to the left of a creator on the same mode. Returns `None` when the
/// string vanishes or needs contraction.
fn canonical_key(ops: &[LadderOp]) -> Option<(TermKey, f64)> {
    let single = normal_order(ops, Complex64::new(1.0, 0.0));
    if single.len() != 1 {
        return None;
    }
    let (k, c) = single.terms.into_iter().next()?;
    Some((k, c.re))
}

fn out_of_order(left: LadderOp, right: LadderOp) -> bool {
    match (left.dagger, right.dagger) {
        (false, true) => true,
        (true, false) => false,
        _ => left.mode >= right.mode,
    }
}

fn normal_order_into(ops: Vec<LadderOp>, coeff: Complex64, acc: &mut BTreeMap<TermKey, Complex64>) {
    let mut stack = vec![(ops, coeff)];
    while let Some((mut ops, mut c)) = stack.pop() {
        if c.norm() <= DEAD_TERM {
            continue;
        }
        let mut zero = false;
        loop {
            let pos = (0..ops.len().saturating_sub(1)).find(|&k| out_of_order(ops[k], ops[k + 1]));
            let k = match pos {
                Some(k) => k,
                None => break,
            };
            let (l, r) = (ops[k], ops[k + 1]);
            if l.dagger == r.dagger && l.mode == r.mode {
                zero = true;
                break;
            }
            if !l.dagger && r.dagger && l.mode == r.mode {
                // a_p a+_p = 1 - a+_p a_p
                let mut contracted = ops.clone();
                contracted.drain(k..k + 2);
                stack.push((contracted, c));
            }
            ops.swap(k, k + 1);
            c = -c;
        }
        if zero {
            continue;
        }
        let split = ops.iter().position(|o| !o.dagger).unwrap_or(ops.len());
        let key = TermKey {
            cre: ops[..split].iter().map(|o| o.mode).collect(),
            ann: ops[split..].iter().map(|o| o.mode).collect(),
        };
        *acc.entry(key).or_default() += c;
    }
}

impl Add for FermionOperator {
    type Output = FermionOperator;
    fn add(mut self, rhs: FermionOperator) -> FermionOperator {
        self.axpy(Complex64::new(1.0, 0.0), &rhs);
        self
    }
}

impl AddAssign<&FermionOperator> for FermionOperator {
    fn add_assign(&mut self, rhs: &FermionOperator) {
        self.axpy(Complex64::new(1.0, 0.0), rhs);
    }
}

impl Sub for FermionOperator {
    type Output = FermionOperator;
    fn sub(mut self, rhs: FermionOperator) -> FermionOperator {
        self.axpy(Complex64::new(-1.0, 0.0), &rhs);
        self
    }
}

impl Neg for FermionOperator {
    type Output = FermionOperator;
    fn neg(self) -> FermionOperator {
        self.scale_real(-1.0)
    }
}

impl Mul for &FermionOperator {
    type Output = FermionOperator;
    fn mul(self, rhs: &FermionOperator) -> FermionOperator {
        self.mul_op(rhs)
    }
}

impl fmt::Display for FermionOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i) [{}]", c.re, c.im, k)?;
        }
        Ok(())
    }
}

/// Anti-Hermitian operator used as a unitary generator, `exp(theta * A)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    op: FermionOperator,
}

impl Generator {
    /// Wrap an operator, checking anti-Hermiticity term by term.
    pub fn new(op: FermionOperator) -> Result<Self> {
        if !op.is_anti_hermitian(1e-12) {
            return Err(Error::Config(format!("operator is not anti-Hermitian: {op}")));
        }
        Ok(Generator { op })
    }

    /// `T - T†` for an arbitrary excitation operator `T`.
    pub fn from_excitation(t: &FermionOperator) -> Self {
        Generator { op: t.clone() - t.adjoint() }
    }

    pub fn op(&self) -> &FermionOperator {
        &self.op
    }

    pub fn into_op(self) -> FermionOperator {
        self.op
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn contraction_of_same_mode() {
        let op = normal_order(&[LadderOp::ann(0), LadderOp::cre(0)], c(1.0));
        let expected = FermionOperator::identity() - FermionOperator::hop(0, 0);
        assert_eq!(op, expected);
    }

    #[test]
    fn antisymmetry_of_creations() {
        let op = normal_order(&[LadderOp::cre(1), LadderOp::cre(0)], c(1.0));
        assert_eq!(op.len(), 1);
        assert_eq!(op.coeff_of(&[LadderOp::cre(0), LadderOp::cre(1)]), c(-1.0));
    }

    #[test]
    fn repeated_operator_vanishes() {
        assert!(normal_order(&[LadderOp::cre(2), LadderOp::cre(2)], c(1.0)).is_empty());
        assert!(normal_order(&[LadderOp::ann(3), LadderOp::ann(3)], c(1.0)).is_empty());
    }

    #[test]
    fn adjoint_of_hop_and_scalar() {
        assert_eq!(FermionOperator::hop(1, 3).adjoint(), FermionOperator::hop(3, 1));
        let s = FermionOperator::scalar(Complex64::new(0.5, 2.0));
        assert_eq!(s.adjoint(), FermionOperator::scalar(Complex64::new(0.5, -2.0)));
    }

    #[test]
    fn self_commutator_is_zero() {
        let a = FermionOperator::hop(0, 2) + FermionOperator::product(
            &[LadderOp::cre(1), LadderOp::cre(3), LadderOp::ann(2), LadderOp::ann(0)],
            0.7,
        );
        assert!(commutator(&a, &a).is_empty());
    }

    #[test]
    fn dead_terms_are_dropped() {
        let a = FermionOperator::hop(0, 1);
        let b = a.scale_real(1.0 - 1e-15);
        assert!((a - b).is_empty());
    }

    #[test]
    fn small_matrices() {
        let id = FermionOperator::identity().to_matrix(2, None).unwrap();
        assert_eq!(id, DMatrix::identity(4, 4));
        let n0 = FermionOperator::hop(0, 0).to_matrix(1, None).unwrap();
        assert_eq!(n0[(0, 0)], c(0.0));
        assert_eq!(n0[(1, 1)], c(1.0));
        assert_eq!(n0[(0, 1)], c(0.0));
    }

    #[test]
    fn number_operator_in_sector() {
        let mut n = FermionOperator::zero();
        for p in 0..4 {
            n += &FermionOperator::hop(p, p);
        }
        let m = n.to_matrix(4, Some(2)).unwrap();
        assert_eq!(m.nrows(), 6);
        assert!((m - DMatrix::<Complex64>::identity(6, 6) * c(2.0)).norm() < 1e-14);
    }

    #[test]
    fn empty_sector_and_caps() {
        assert!(matches!(
            FermionOperator::identity().to_matrix(2, Some(3)),
            Err(Error::EmptySector(_))
        ));
        assert!(matches!(
            FermionOperator::identity().to_matrix(15, None),
            Err(Error::TooManyModes { .. })
        ));
        assert!(matches!(
            FermionOperator::identity().to_matrix(17, Some(2)),
            Err(Error::TooManyModes { .. })
        ));
    }

    #[test]
    fn generator_checks_anti_hermiticity() {
        assert!(Generator::new(FermionOperator::hop(0, 1)).is_err());
        let g = Generator::from_excitation(&FermionOperator::hop(2, 0));
        assert!(Generator::new(g.op().clone()).is_ok());
    }
}
