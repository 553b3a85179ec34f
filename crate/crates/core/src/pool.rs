//! Spin-complemented UCCSD pools and the Abelian, equivariant and integral filters.
//!
//! Amplitude classes follow the singlet structure: one class per spatial single
//! `(a, i)` summing both spins, one paired double `(a i)(a i)` per single, and one
//! class per unordered pair of distinct singles `{(a i), (b j)}` summing all spin
//! combinations that do not repeat a spin orbital.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::Result;
use crate::fermion::{FermionOperator, Generator, LadderOp};
use crate::group::{GroupSpec, SubgroupSpec};
use crate::hamiltonian::IntegralSet;
use crate::orbitals::OrbitalBasis;

/// Spatial excitation `a <- i`.
pub type Single = (usize, usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ExcitationKind {
    Single,
    Double,
}

impl fmt::Display for ExcitationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExcitationKind::Single => "single",
            ExcitationKind::Double => "double",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassKey {
    Single(Single),
    Paired(Single),
    /// Ordered so that the first single precedes the second in pool order.
    Pair(Single, Single),
}

impl ClassKey {
    pub fn kind(&self) -> ExcitationKind {
        match self {
            ClassKey::Single(_) => ExcitationKind::Single,
            _ => ExcitationKind::Double,
        }
    }

    /// `(virtuals, occupieds)` as spatial indices, doubles listing `(a, b)` and `(i, j)`.
    pub fn spatial(&self) -> (Vec<usize>, Vec<usize>) {
        match *self {
            ClassKey::Single((a, i)) => (vec![a], vec![i]),
            ClassKey::Paired((a, i)) => (vec![a, a], vec![i, i]),
            ClassKey::Pair((a, i), (b, j)) => (vec![a, b], vec![i, j]),
        }
    }
}

impl fmt::Display for ClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassKey::Single((a, i)) => write!(f, "{a}<-{i}"),
            ClassKey::Paired((a, i)) => write!(f, "{a}{a}<-{i}{i}"),
            ClassKey::Pair((a, i), (b, j)) => write!(f, "{a}{b}<-{i}{j}"),
        }
    }
}

/// One spin-orbital member of a class: `a+_{vir[0]} a_{occ[0]} (a+_{vir[1]} a_{occ[1]})`.
#[derive(Clone, Debug, PartialEq)]
pub struct Excitation {
    pub kind: ExcitationKind,
    pub occ: Vec<usize>,
    pub vir: Vec<usize>,
}

impl Excitation {
    fn ops(&self) -> Vec<LadderOp> {
        self.vir.iter().zip(&self.occ).flat_map(|(&a, &i)| [LadderOp::cre(a), LadderOp::ann(i)]).collect()
    }

    /// Both spin orbitals of every `a <- i` pair share a spin.
    pub fn same_spin(&self) -> bool {
        self.kind == ExcitationKind::Double && self.occ[0] % 2 == self.occ[1] % 2
    }
}

/// A spin-complemented amplitude class with its anti-Hermitian generator.
#[derive(Clone, Debug)]
pub struct PoolClass {
    pub key: ClassKey,
    pub excitations: Vec<Excitation>,
    pub generator: Generator,
}

impl PoolClass {
    fn new(key: ClassKey) -> Self {
        let excitations = match key {
            ClassKey::Single((a, i)) => (0..2)
                .map(|s| Excitation { kind: ExcitationKind::Single, occ: vec![2 * i + s], vir: vec![2 * a + s] })
                .collect(),
            ClassKey::Paired((a, i)) => {
                vec![Excitation { kind: ExcitationKind::Double, occ: vec![2 * i, 2 * i + 1], vir: vec![2 * a, 2 * a + 1] }]
            }
            ClassKey::Pair((a, i), (b, j)) => {
                let mut out = Vec::new();
                for s in 0..2 {
                    for t in 0..2 {
                        let (va, oi, vb, oj) = (2 * a + s, 2 * i + s, 2 * b + t, 2 * j + t);
                        if va == vb || oi == oj {
                            continue;
                        }
                        out.push(Excitation { kind: ExcitationKind::Double, occ: vec![oi, oj], vir: vec![va, vb] });
                    }
                }
                out
            }
        };
        let mut t = FermionOperator::zero();
        for e in &excitations {
            t += &FermionOperator::product(&e.ops(), 1.0);
        }
        PoolClass { key, excitations, generator: Generator::from_excitation(&t) }
    }

    pub fn kind(&self) -> ExcitationKind {
        self.key.kind()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum FilterTag {
    None,
    Abelian(String),
    Equivariant(String),
    Integral(f64),
}

impl fmt::Display for FilterTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterTag::None => f.write_str("none"),
            FilterTag::Abelian(h) => write!(f, "abelian({h})"),
            FilterTag::Equivariant(g) => write!(f, "equivariant({g})"),
            FilterTag::Integral(e) => write!(f, "integral({e:e})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Pool {
    classes: Vec<PoolClass>,
    filter: FilterTag,
}

impl Pool {
    pub fn empty() -> Self {
        Pool { classes: Vec::new(), filter: FilterTag::None }
    }

    /// One variational parameter per class.
    pub fn parameter_count(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[PoolClass] {
        &self.classes
    }

    pub fn filter(&self) -> &FilterTag {
        &self.filter
    }

    pub fn contains(&self, key: &ClassKey) -> bool {
        self.classes.iter().any(|c| c.key == *key)
    }

    pub fn generators(&self) -> Vec<Generator> {
        self.classes.iter().map(|c| c.generator.clone()).collect()
    }

    pub fn count(&self, kind: ExcitationKind) -> usize {
        self.classes.iter().filter(|c| c.kind() == kind).count()
    }

    /// Keep classes satisfying `keep`, in order.
    pub fn retain(&self, filter: FilterTag, mut keep: impl FnMut(&PoolClass) -> Result<bool>) -> Result<Pool> {
        let mut classes = Vec::new();
        for c in &self.classes {
            if keep(c)? {
                classes.push(c.clone());
            }
        }
        Ok(Pool { classes, filter })
    }

    /// Classes whose virtual orbitals all lie in `virtual_shell` and occupied orbitals
    /// in `occupied_shell` (indices into `basis.shells()`).
    pub fn channel(&self, basis: &OrbitalBasis, occupied_shell: usize, virtual_shell: usize, kinds: &[ExcitationKind]) -> Pool {
        let classes = self
            .classes
            .iter()
            .filter(|c| {
                let (vir, occ) = c.key.spatial();
                kinds.contains(&c.kind())
                    && vir.iter().all(|&a| basis.location(a).0 == virtual_shell)
                    && occ.iter().all(|&i| basis.location(i).0 == occupied_shell)
            })
            .cloned()
            .collect();
        Pool { classes, filter: self.filter.clone() }
    }
}

/// All spin-complemented singles and doubles of the closed-shell reference; singles
/// first, then paired doubles, then pair doubles, each in lexicographic order of the
/// virtual-major single list.
pub fn generate_uccsd(basis: &OrbitalBasis) -> Pool {
    let singles: Vec<Single> =
        basis.virtuals().iter().flat_map(|&a| basis.occupied().iter().map(move |&i| (a, i))).collect();
    let mut classes: Vec<PoolClass> = singles.iter().map(|&s| PoolClass::new(ClassKey::Single(s))).collect();
    classes.extend(singles.iter().map(|&s| PoolClass::new(ClassKey::Paired(s))));
    for (k, &s1) in singles.iter().enumerate() {
        for &s2 in &singles[k + 1..] {
            classes.push(PoolClass::new(ClassKey::Pair(s1, s2)));
        }
    }
    Pool { classes, filter: FilterTag::None }
}

/// Subgroup-label factors `sigma(a) sigma(b) sigma(i)^-1 sigma(j)^-1` of a class.
fn label_factors<'a>(key: &ClassKey, label: impl Fn(usize) -> &'a str) -> Vec<(&'a str, bool)> {
    let (vir, occ) = key.spatial();
    vir.iter().map(|&a| (label(a), false)).chain(occ.iter().map(|&i| (label(i), true))).collect()
}

/// Keep classes whose subgroup-label product is the trivial irrep.
pub fn filter_abelian(pool: &Pool, basis: &OrbitalBasis, subgroup: &SubgroupSpec) -> Result<Pool> {
    pool.retain(FilterTag::Abelian(subgroup.name.clone()), |c| {
        subgroup.product_is_trivial(&label_factors(&c.key, |p| basis.h_label(p)))
    })
}

/// Keep classes whose full-group irrep product contains the trivial irrep.
pub fn filter_equivariant(pool: &Pool, basis: &OrbitalBasis, group: &GroupSpec) -> Result<Pool> {
    pool.retain(FilterTag::Equivariant(group.name().to_string()), |c| {
        Ok(group.a1_multiplicity(&label_factors(&c.key, |p| basis.g_label(p).0))? > 0)
    })
}

/// Magnitude of the Hamiltonian coefficient matching a class. Singles use the
/// largest of `|h_ai|`, `|(ai|pp)|` and `|(ap|pi)|` over all `p`; doubles use the
/// largest antisymmetrized coupling over their spin members, `|(ai|bj) - (aj|bi)|`
/// for equal spins and `|(ai|bj)|` otherwise.
pub fn integral_coefficient(key: &ClassKey, ints: &IntegralSet) -> f64 {
    match *key {
        ClassKey::Single((a, i)) => {
            let mut m = ints.h1_pq(a, i).abs();
            for p in 0..ints.n_spatial() {
                m = m.max(ints.eri(a, i, p, p).abs()).max(ints.eri(a, p, p, i).abs());
            }
            m
        }
        ClassKey::Paired((a, i)) => ints.eri(a, i, a, i).abs(),
        ClassKey::Pair(..) => PoolClass::new(*key)
            .excitations
            .iter()
            .map(|e| {
                let (a, b, i, j) = (e.vir[0] / 2, e.vir[1] / 2, e.occ[0] / 2, e.occ[1] / 2);
                if e.same_spin() {
                    (ints.eri(a, i, b, j) - ints.eri(a, j, b, i)).abs()
                } else {
                    ints.eri(a, i, b, j).abs()
                }
            })
            .fold(0.0, f64::max),
    }
}

/// Keep classes whose matching integral magnitude exceeds `epsilon`.
pub fn filter_integral(pool: &Pool, ints: &IntegralSet, epsilon: f64) -> Result<Pool> {
    pool.retain(FilterTag::Integral(epsilon), |c| Ok(integral_coefficient(&c.key, ints) > epsilon))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeficitRow {
    pub irrep: String,
    /// `(occupied shell index, virtual shell index)` within the irrep.
    pub shell_pair: (usize, usize),
    pub kind: ExcitationKind,
    pub retained: usize,
    pub discarded: usize,
    /// `d (d - 1)` for singles; no closed form is asserted for doubles.
    pub expected_deficit: Option<usize>,
}

impl DeficitRow {
    pub fn total(&self) -> usize {
        self.retained + self.discarded
    }
}

/// For every occupied/virtual shell pair of the same irrep with `d > 1`, count the
/// ordered component tuples that are retained or discarded by `filtered`: `d^2`
/// singles `(a_nu <- i_mu)` and `d^4` doubles `(a_nu b_sigma <- i_mu j_tau)`, each
/// mapped to the amplitude class that carries it.
pub fn deficit_report(full: &Pool, filtered: &Pool, basis: &OrbitalBasis) -> Vec<DeficitRow> {
    let index: HashMap<ClassKey, usize> = full.classes.iter().enumerate().map(|(k, c)| (c.key, k)).collect();
    let kept: std::collections::HashSet<ClassKey> = filtered.classes.iter().map(|c| c.key).collect();
    let mut rows = Vec::new();
    let shells = basis.shells();
    for &os in &basis.partition().occupied_shells {
        for &vs in &basis.partition().virtual_shells {
            let (occ, vir) = (&shells[os], &shells[vs]);
            if occ.irrep != vir.irrep || occ.dim() < 2 || occ.dim() != vir.dim() {
                continue;
            }
            let d = occ.dim();
            let mut singles = (0, 0);
            for &a in &vir.components {
                for &i in &occ.components {
                    tally(&mut singles, kept.contains(&ClassKey::Single((a, i))));
                }
            }
            let mut doubles = (0, 0);
            for &a in &vir.components {
                for &b in &vir.components {
                    for &i in &occ.components {
                        for &j in &occ.components {
                            let key = double_key((a, i), (b, j), &index);
                            tally(&mut doubles, kept.contains(&key));
                        }
                    }
                }
            }
            let shell_pair = (occ.shell_index, vir.shell_index);
            rows.push(DeficitRow {
                irrep: occ.irrep.clone(),
                shell_pair,
                kind: ExcitationKind::Single,
                retained: singles.0,
                discarded: singles.1,
                expected_deficit: Some(d * (d - 1)),
            });
            rows.push(DeficitRow {
                irrep: occ.irrep.clone(),
                shell_pair,
                kind: ExcitationKind::Double,
                retained: doubles.0,
                discarded: doubles.1,
                expected_deficit: None,
            });
        }
    }
    rows
}

fn tally(acc: &mut (usize, usize), kept: bool) {
    if kept {
        acc.0 += 1;
    } else {
        acc.1 += 1;
    }
}

fn double_key(s1: Single, s2: Single, index: &HashMap<ClassKey, usize>) -> ClassKey {
    if s1 == s2 {
        return ClassKey::Paired(s1);
    }
    let forward = ClassKey::Pair(s1, s2);
    if index.contains_key(&forward) {
        forward
    } else {
        ClassKey::Pair(s2, s1)
    }
}

pub fn deficit_tsv(rows: &[DeficitRow]) -> String {
    let mut out = String::from("irrep\tshell_pair\tkind\tretained\tdiscarded\texpected_deficit\n");
    for r in rows {
        let expected = r.expected_deficit.map_or("NA".to_string(), |d| d.to_string());
        let _ = writeln!(
            out,
            "{}\t{}-{}\t{}\t{}\t{}\t{}",
            r.irrep, r.shell_pair.0, r.shell_pair.1, r.kind, r.retained, r.discarded, expected
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::builtin_group;
    use crate::orbitals::OrbitalShell;

    fn shell(irrep: &str, components: Vec<usize>, energy: f64) -> OrbitalShell {
        OrbitalShell { irrep: irrep.into(), shell_index: 0, components, energy }
    }

    /// Occupied E shell (0, 1) and virtual E shell (2, 3) of C3v.
    fn e_pair() -> OrbitalBasis {
        let shells = vec![shell("E", vec![0, 1], -1.0), shell("E", vec![2, 3], 1.0)];
        let h = ["A'", "A''", "A'", "A''"].map(String::from).to_vec();
        OrbitalBasis::new(shells, h, 4).unwrap()
    }

    #[test]
    fn minimal_pool_has_one_single_and_one_double() {
        let shells = vec![shell("A'", vec![0], -1.0), shell("A'", vec![1], 1.0)];
        let basis = OrbitalBasis::new(shells, vec!["A'".into(), "A'".into()], 2).unwrap();
        let pool = generate_uccsd(&basis);
        assert_eq!(pool.parameter_count(), 2);
        assert_eq!(pool.count(ExcitationKind::Single), 1);
        assert_eq!(pool.count(ExcitationKind::Double), 1);
        for c in pool.classes() {
            assert!(c.generator.op().is_anti_hermitian(1e-14));
            assert!(c.generator.op().conserves_number());
        }
    }

    #[test]
    fn no_virtuals_means_empty_pool() {
        let shells = vec![shell("A'", vec![0], -1.0)];
        let basis = OrbitalBasis::new(shells, vec!["A'".into()], 2).unwrap();
        assert!(generate_uccsd(&basis).is_empty());
    }

    #[test]
    fn e_channel_counts() {
        let basis = e_pair();
        let g = builtin_group("C3v").unwrap();
        let full = generate_uccsd(&basis);
        // 4 singles, 4 paired doubles, C(4,2) pair doubles.
        assert_eq!(full.parameter_count(), 14);
        let abelian = filter_abelian(&full, &basis, g.subgroup("Cs").unwrap()).unwrap();
        let equivariant = filter_equivariant(&full, &basis, &g).unwrap();
        assert_eq!(abelian.count(ExcitationKind::Single), 2);
        assert_eq!(equivariant.count(ExcitationKind::Single), 4);
        assert!(!abelian.contains(&ClassKey::Single((2, 1))));
        for c in abelian.classes() {
            assert!(equivariant.contains(&c.key));
        }
        let rows = deficit_report(&full, &abelian, &basis);
        assert_eq!((rows[0].retained, rows[0].discarded), (2, 2));
        assert_eq!((rows[1].retained, rows[1].discarded), (8, 8));
    }

    #[test]
    fn equivariant_single_needs_matching_irreps() {
        let shells = vec![shell("E", vec![0, 1], -1.0), shell("A1", vec![2], 1.0)];
        let h = ["A'", "A''", "A'"].map(String::from).to_vec();
        let basis = OrbitalBasis::new(shells, h, 4).unwrap();
        let g = builtin_group("C3v").unwrap();
        let eq = filter_equivariant(&generate_uccsd(&basis), &basis, &g).unwrap();
        assert_eq!(eq.count(ExcitationKind::Single), 0);
    }

    #[test]
    fn trivial_labels_make_the_abelian_filter_the_identity() {
        let shells = vec![shell("A'", vec![0], -1.0), shell("A'", vec![1], -0.5), shell("A'", vec![2], 1.0)];
        let basis = OrbitalBasis::new(shells, vec!["A'".into(); 3], 4).unwrap();
        let g = builtin_group("Cs").unwrap();
        let full = generate_uccsd(&basis);
        let filtered = filter_abelian(&full, &basis, g.default_subgroup().unwrap()).unwrap();
        assert_eq!(filtered.parameter_count(), full.parameter_count());
    }
}
