//! Finite point groups: multiplication tables, unitary irreps, Abelian subgroups,
//! irrep restriction and the adjoint action on fermionic operators.
//!
//! Built-in groups are constructed from their Cartesian 3x3 matrices so that the
//! multiplication table is exact, and every group (built-in or loaded from JSON)
//! passes the same validation before use.

use std::collections::HashMap;
use std::path::Path;

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{FermionOperator, LadderOp};
use crate::orbitals::OrbitalBasis;

const VALIDATION_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct IrrepSpec {
    pub label: String,
    pub dim: usize,
    /// One `dim x dim` unitary matrix per group element, in element order.
    pub matrices: Vec<DMatrix<Complex64>>,
}

impl IrrepSpec {
    pub fn character(&self, element: usize) -> Complex64 {
        self.matrices[element].trace()
    }

    fn one_dimensional(label: &str, values: &[Complex64]) -> Self {
        IrrepSpec {
            label: label.to_string(),
            dim: 1,
            matrices: values.iter().map(|&v| DMatrix::from_element(1, 1, v)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupSpec {
    name: String,
    elements: Vec<String>,
    mult_table: Vec<Vec<usize>>,
    irreps: Vec<IrrepSpec>,
    identity: usize,
    inverse: Vec<usize>,
    subgroups: Vec<SubgroupSpec>,
}

/// Abelian subgroup with its one-dimensional irreps. Irrep values are indexed by
/// position in `element_indices`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubgroupSpec {
    pub name: String,
    pub parent: String,
    pub element_indices: Vec<usize>,
    pub irreps: Vec<IrrepSpec>,
    pub trivial_label: String,
}

/// Result of restricting an irrep to an Abelian subgroup.
#[derive(Clone, Debug, PartialEq)]
pub struct Restriction {
    /// One subgroup label per component.
    pub labels: Vec<String>,
    /// True when the restricted matrices are diagonal in the irrep's own basis, in
    /// which case `labels[mu]` is the label of component `mu`. Otherwise the labels
    /// are listed in subgroup-irrep order.
    pub aligned: bool,
}

impl Restriction {
    pub fn distinct(&self) -> usize {
        let mut l = self.labels.clone();
        l.sort();
        l.dedup();
        l.len()
    }
}

impl GroupSpec {
    /// Validate and assemble a group from raw data.
    pub fn new(
        name: impl Into<String>,
        elements: Vec<String>,
        mult_table: Vec<Vec<usize>>,
        irreps: Vec<IrrepSpec>,
    ) -> Result<Self> {
        let name = name.into();
        let bad = |reason: String| Error::InvalidGroup { group: name.clone(), reason };
        let n = elements.len();
        if n == 0 {
            return Err(bad("no elements".into()));
        }
        if mult_table.len() != n || mult_table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(bad("multiplication table has the wrong shape or entries".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| mult_table[e][g] == g && mult_table[g][e] == g))
            .ok_or_else(|| bad("no identity element".into()))?;
        let mut inverse = vec![0; n];
        for g in 0..n {
            inverse[g] = (0..n)
                .find(|&h| mult_table[g][h] == identity && mult_table[h][g] == identity)
                .ok_or_else(|| bad(format!("element {} has no inverse", elements[g])))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mult_table[mult_table[a][b]][c] != mult_table[a][mult_table[b][c]] {
                        return Err(bad("multiplication is not associative".into()));
                    }
                }
            }
        }
        let group = GroupSpec { name: name.clone(), elements, mult_table, irreps, identity, inverse, subgroups: Vec::new() };
        group.validate_irreps()?;
        Ok(group)
    }

    fn validate_irreps(&self) -> Result<()> {
        let bad = |reason: String| Error::InvalidGroup { group: self.name.clone(), reason };
        let n = self.order();
        let mut dim_sq = 0;
        for irrep in &self.irreps {
            if irrep.matrices.len() != n {
                return Err(bad(format!("irrep {} has {} matrices", irrep.label, irrep.matrices.len())));
            }
            for m in &irrep.matrices {
                if m.nrows() != irrep.dim || m.ncols() != irrep.dim {
                    return Err(bad(format!("irrep {} has a matrix of the wrong size", irrep.label)));
                }
                let dev = (m.adjoint() * m - DMatrix::<Complex64>::identity(irrep.dim, irrep.dim)).norm();
                if dev > VALIDATION_TOL {
                    return Err(bad(format!("irrep {} is not unitary ({dev:.2e})", irrep.label)));
                }
            }
            for a in 0..n {
                for b in 0..n {
                    let lhs = &irrep.matrices[a] * &irrep.matrices[b];
                    let dev = (lhs - &irrep.matrices[self.mult_table[a][b]]).norm();
                    if dev > VALIDATION_TOL {
                        return Err(bad(format!("irrep {} is not a homomorphism ({dev:.2e})", irrep.label)));
                    }
                }
            }
            dim_sq += irrep.dim * irrep.dim;
        }
        if dim_sq != n {
            return Err(bad(format!("sum of squared irrep dimensions is {dim_sq}, group order is {n}")));
        }
        for (i, a) in self.irreps.iter().enumerate() {
            for (j, b) in self.irreps.iter().enumerate() {
                let overlap = self.character_inner(a, b);
                let expected = if i == j { 1.0 } else { 0.0 };
                if (overlap - Complex64::new(expected, 0.0)).norm() > VALIDATION_TOL {
                    return Err(bad(format!("characters of {} and {} are not orthonormal", a.label, b.label)));
                }
            }
        }
        let mut labels: Vec<&str> = self.irreps.iter().map(|i| i.label.as_str()).collect();
        labels.sort();
        labels.dedup();
        if labels.len() != self.irreps.len() {
            return Err(bad("duplicate irrep labels".into()));
        }
        Ok(())
    }

    /// `(1/|G|) sum_g chi_a(g) conj(chi_b(g))`.
    pub fn character_inner(&self, a: &IrrepSpec, b: &IrrepSpec) -> Complex64 {
        let s: Complex64 = (0..self.order()).map(|g| a.character(g) * b.character(g).conj()).sum();
        s / self.order() as f64
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn element_index(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }

    pub fn mult_table(&self) -> &[Vec<usize>] {
        &self.mult_table
    }

    pub fn multiply(&self, a: usize, b: usize) -> usize {
        self.mult_table[a][b]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn irreps(&self) -> &[IrrepSpec] {
        &self.irreps
    }

    pub fn irrep(&self, label: &str) -> Result<&IrrepSpec> {
        self.irreps.iter().find(|i| i.label == label).ok_or_else(|| Error::UnknownIrrep {
            group: self.name.clone(),
            label: label.to_string(),
        })
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|a| (0..self.order()).all(|b| self.mult_table[a][b] == self.mult_table[b][a]))
    }

    /// The irrep with unit character on every element.
    pub fn trivial_irrep(&self) -> &IrrepSpec {
        self.irreps
            .iter()
            .find(|i| i.dim == 1 && (0..self.order()).all(|g| (i.character(g) - 1.0).norm() < VALIDATION_TOL))
            .expect("validated groups contain the trivial irrep")
    }

    /// Named Abelian subgroups registered with this group.
    pub fn subgroups(&self) -> &[SubgroupSpec] {
        &self.subgroups
    }

    pub fn subgroup(&self, name: &str) -> Result<&SubgroupSpec> {
        self.subgroups.iter().find(|s| s.name == name).ok_or_else(|| Error::InvalidGroup {
            group: self.name.clone(),
            reason: format!("no subgroup named {name}"),
        })
    }

    /// Subgroup used for Abelian filtering when none is named explicitly.
    pub fn default_subgroup(&self) -> Result<&SubgroupSpec> {
        self.subgroups.first().ok_or_else(|| Error::InvalidGroup {
            group: self.name.clone(),
            reason: "no Abelian subgroup registered".into(),
        })
    }

    fn with_subgroup(mut self, sub: SubgroupSpec) -> Result<Self> {
        sub.validate(&self)?;
        self.subgroups.push(sub);
        Ok(self)
    }

    /// Decompose the restriction of `irrep` to `subgroup` into one-dimensional labels
    /// using the subgroup isotypic projectors.
    pub fn restrict_irrep(&self, irrep: &IrrepSpec, subgroup: &SubgroupSpec) -> Result<Restriction> {
        let d = irrep.dim;
        let h = subgroup.order() as f64;
        let mut total = DMatrix::<Complex64>::zeros(d, d);
        let mut projectors = Vec::new();
        for sigma in &subgroup.irreps {
            let mut p = DMatrix::<Complex64>::zeros(d, d);
            for (k, &g) in subgroup.element_indices.iter().enumerate() {
                p += &irrep.matrices[g] * sigma.matrices[k][(0, 0)].conj();
            }
            p /= Complex64::new(h, 0.0);
            let idempotent = (&p * &p - &p).norm();
            let hermitian = (p.adjoint() - &p).norm();
            if idempotent > 1e-8 || hermitian > 1e-8 {
                return Err(Error::Restriction(format!(
                    "projector for {} in {} is not an orthogonal projector",
                    sigma.label, irrep.label
                )));
            }
            let trace = p.trace();
            let mult = trace.re.round();
            if (trace - Complex64::new(mult, 0.0)).norm() > 1e-8 {
                return Err(Error::Restriction(format!(
                    "non-integral multiplicity {trace} of {} in {}",
                    sigma.label, irrep.label
                )));
            }
            total += &p;
            projectors.push((sigma.label.clone(), p, mult as usize));
        }
        if (total - DMatrix::<Complex64>::identity(d, d)).norm() > 1e-8 {
            return Err(Error::Restriction(format!(
                "restriction of {} to {} is not completely reducible",
                irrep.label, subgroup.name
            )));
        }
        let aligned = projectors.iter().all(|(_, p, _)| {
            (0..d).all(|r| (0..d).all(|c| r == c || p[(r, c)].norm() < 1e-10))
        });
        let labels = if aligned {
            (0..d)
                .map(|mu| {
                    projectors
                        .iter()
                        .find(|(_, p, _)| (p[(mu, mu)] - 1.0).norm() < 1e-8)
                        .map(|(l, _, _)| l.clone())
                        .ok_or_else(|| Error::Restriction(format!("component {mu} has no pure label")))
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            projectors
                .iter()
                .flat_map(|(l, _, m)| std::iter::repeat_n(l.clone(), *m))
                .collect()
        };
        Ok(Restriction { labels, aligned })
    }

    /// `Ad(g)(T) = R(g) T R(g)^-1`: creation operators of component `mu` map to
    /// `sum_nu D_{nu,mu}(g) a+_nu`, annihilation operators with the conjugate matrix.
    pub fn adjoint_action(&self, element: usize, op: &FermionOperator, basis: &OrbitalBasis) -> Result<FermionOperator> {
        let mut cache: HashMap<LadderOp, FermionOperator> = HashMap::new();
        let mut out = FermionOperator::zero();
        for (key, c) in op.terms() {
            let mut product = FermionOperator::scalar(*c);
            for ladder in key.ops() {
                if let std::collections::hash_map::Entry::Vacant(slot) = cache.entry(ladder) {
                    slot.insert(self.transform_ladder(element, ladder, basis)?);
                }
                product = product.mul_op(&cache[&ladder]);
            }
            out += &product;
        }
        Ok(out)
    }

    fn transform_ladder(&self, element: usize, ladder: LadderOp, basis: &OrbitalBasis) -> Result<FermionOperator> {
        let spatial = ladder.mode / 2;
        let spin = ladder.mode % 2;
        if spatial >= basis.n_spatial() {
            return Err(Error::UnlabeledMode(ladder.mode));
        }
        let (shell_idx, mu) = basis.location(spatial);
        let shell = &basis.shells()[shell_idx];
        let d = &self.irrep(&shell.irrep)?.matrices[element];
        let mut image = FermionOperator::zero();
        for (nu, &p) in shell.components.iter().enumerate() {
            let coeff = if ladder.dagger { d[(nu, mu)] } else { d[(nu, mu)].conj() };
            let target = LadderOp { mode: 2 * p + spin, dagger: ladder.dagger };
            image.axpy(coeff, &FermionOperator::product(&[target], 1.0));
        }
        Ok(image)
    }

    /// Group-averaged projection `(d/|G|) sum_g conj(chi(g)) Ad(g)(T)`.
    pub fn project_onto_irrep(&self, op: &FermionOperator, target: &str, basis: &OrbitalBasis) -> Result<FermionOperator> {
        let irrep = self.irrep(target)?;
        let mut out = FermionOperator::zero();
        for g in 0..self.order() {
            let chi = irrep.character(g).conj();
            if chi.norm() < 1e-15 {
                continue;
            }
            let image = self.adjoint_action(g, op, basis)?;
            out.axpy(chi * (irrep.dim as f64 / self.order() as f64), &image);
        }
        Ok(out)
    }

    /// Multiplicity of the trivial irrep in a tensor product of irreps; each factor is
    /// `(label, conjugated)`.
    pub fn a1_multiplicity(&self, factors: &[(&str, bool)]) -> Result<usize> {
        let irreps: Vec<(&IrrepSpec, bool)> =
            factors.iter().map(|&(l, c)| self.irrep(l).map(|i| (i, c))).collect::<Result<_>>()?;
        let mut total = Complex64::default();
        for g in 0..self.order() {
            let mut prod = Complex64::new(1.0, 0.0);
            for (irrep, conj) in &irreps {
                let chi = irrep.character(g);
                prod *= if *conj { chi.conj() } else { chi };
            }
            total += prod;
        }
        total /= self.order() as f64;
        let m = total.re.round();
        if (total - Complex64::new(m, 0.0)).norm() > 1e-8 || m < 0.0 {
            return Err(Error::InvalidGroup {
                group: self.name.clone(),
                reason: format!("non-integral multiplicity {total}"),
            });
        }
        Ok(m as usize)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: GroupFile = serde_json::from_str(text)?;
        file.into_group()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let file = GroupFile {
            name: self.name.clone(),
            elements: self.elements.clone(),
            mult_table: self.mult_table.clone(),
            irreps: self
                .irreps
                .iter()
                .map(|i| IrrepFile {
                    label: i.label.clone(),
                    dim: i.dim,
                    matrices: i.matrices.iter().map(MatrixFile::from_matrix).collect(),
                })
                .collect(),
            subgroups: self
                .subgroups
                .iter()
                .map(|s| SubgroupFile { name: s.name.clone(), elements: s.element_indices.clone() })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }
}

impl SubgroupSpec {
    pub fn order(&self) -> usize {
        self.element_indices.len()
    }

    fn validate(&self, parent: &GroupSpec) -> Result<()> {
        let bad = |reason: String| Error::InvalidGroup { group: format!("{}<{}", self.name, parent.name), reason };
        let n = self.order();
        let pos: HashMap<usize, usize> = self.element_indices.iter().enumerate().map(|(k, &g)| (g, k)).collect();
        if pos.len() != n || self.element_indices.iter().any(|&g| g >= parent.order()) {
            return Err(bad("element indices are not a subset of the parent".into()));
        }
        for &a in &self.element_indices {
            for &b in &self.element_indices {
                if !pos.contains_key(&parent.multiply(a, b)) {
                    return Err(bad("subset is not closed under multiplication".into()));
                }
                if parent.multiply(a, b) != parent.multiply(b, a) {
                    return Err(bad("subgroup is not Abelian".into()));
                }
            }
        }
        if self.irreps.len() != n {
            return Err(bad(format!("{} irreps for an Abelian group of order {n}", self.irreps.len())));
        }
        for irrep in &self.irreps {
            if irrep.dim != 1 || irrep.matrices.len() != n {
                return Err(bad(format!("irrep {} is not one-dimensional over the subgroup", irrep.label)));
            }
            for &a in &self.element_indices {
                for &b in &self.element_indices {
                    let lhs = irrep.matrices[pos[&a]][(0, 0)] * irrep.matrices[pos[&b]][(0, 0)];
                    let rhs = irrep.matrices[pos[&parent.multiply(a, b)]][(0, 0)];
                    if (lhs - rhs).norm() > VALIDATION_TOL {
                        return Err(bad(format!("irrep {} is not a homomorphism", irrep.label)));
                    }
                }
            }
        }
        let trivial = self.irrep(&self.trivial_label).map_err(|_| bad("missing trivial irrep".into()))?;
        if trivial.matrices.iter().any(|m| (m[(0, 0)] - 1.0).norm() > VALIDATION_TOL) {
            return Err(bad("trivial irrep is not identically one".into()));
        }
        for (i, a) in self.irreps.iter().enumerate() {
            for (j, b) in self.irreps.iter().enumerate() {
                let s: Complex64 =
                    (0..n).map(|k| a.matrices[k][(0, 0)] * b.matrices[k][(0, 0)].conj()).sum::<Complex64>() / n as f64;
                let e = if i == j { 1.0 } else { 0.0 };
                if (s - e).norm() > VALIDATION_TOL {
                    return Err(bad("subgroup characters are not orthonormal".into()));
                }
            }
        }
        Ok(())
    }

    pub fn irrep(&self, label: &str) -> Result<&IrrepSpec> {
        self.irreps.iter().find(|i| i.label == label).ok_or_else(|| Error::UnknownIrrep {
            group: self.name.clone(),
            label: label.to_string(),
        })
    }

    /// Character values of a label over the subgroup elements.
    pub fn characters(&self, label: &str) -> Result<Vec<Complex64>> {
        Ok(self.irrep(label)?.matrices.iter().map(|m| m[(0, 0)]).collect())
    }

    /// Whether the product of labels (each optionally inverted) is the trivial irrep.
    pub fn product_is_trivial(&self, factors: &[(&str, bool)]) -> Result<bool> {
        let mut prod = vec![Complex64::new(1.0, 0.0); self.order()];
        for &(label, inverse) in factors {
            for (p, v) in prod.iter_mut().zip(self.characters(label)?) {
                *p *= if inverse { v.conj() } else { v };
            }
        }
        Ok(prod.iter().all(|v| (v - 1.0).norm() < 1e-9))
    }

    /// The whole of an Abelian group viewed as its own filtering subgroup.
    pub fn whole(group: &GroupSpec) -> Result<Self> {
        if !group.is_abelian() {
            return Err(Error::InvalidGroup { group: group.name.clone(), reason: "group is not Abelian".into() });
        }
        let sub = SubgroupSpec {
            name: group.name.clone(),
            parent: group.name.clone(),
            element_indices: (0..group.order()).collect(),
            irreps: group.irreps.clone(),
            trivial_label: group.trivial_irrep().label.clone(),
        };
        sub.validate(group)?;
        Ok(sub)
    }

    /// Abelian subgroup given by element indices, with characters found by jointly
    /// diagonalizing the restricted parent irreps. The trivial irrep is labelled `A`,
    /// the others `G1`, `G2`, ... in order of discovery.
    pub fn derive(parent: &GroupSpec, name: &str, element_indices: Vec<usize>) -> Result<Self> {
        let n = element_indices.len();
        let mut found: Vec<Vec<Complex64>> = vec![vec![Complex64::new(1.0, 0.0); n]];
        for irrep in &parent.irreps {
            let d = irrep.dim;
            // Generic Hermitian element of the commutative algebra spanned by D(h).
            let mut k = DMatrix::<Complex64>::zeros(d, d);
            for (j, &g) in element_indices.iter().enumerate() {
                let w = Complex64::new(0.37 + 0.11 * j as f64, 0.23 + 0.07 * (j * j) as f64);
                k += &irrep.matrices[g] * w + irrep.matrices[g].adjoint() * w.conj();
            }
            let eig = k.symmetric_eigen();
            for col in 0..d {
                let v = eig.eigenvectors.column(col);
                let chars: Vec<Complex64> = element_indices
                    .iter()
                    .map(|&g| (v.adjoint() * &irrep.matrices[g] * v)[(0, 0)])
                    .collect();
                if !found.iter().any(|f| f.iter().zip(&chars).all(|(a, b)| (a - b).norm() < 1e-8)) {
                    found.push(chars);
                }
            }
        }
        let irreps = found
            .iter()
            .enumerate()
            .map(|(i, chars)| {
                let label = if i == 0 { "A".to_string() } else { format!("G{i}") };
                IrrepSpec::one_dimensional(&label, chars)
            })
            .collect();
        let sub = SubgroupSpec {
            name: name.to_string(),
            parent: parent.name.clone(),
            element_indices,
            irreps,
            trivial_label: "A".into(),
        };
        sub.validate(parent)?;
        Ok(sub)
    }
}

#[derive(Serialize, Deserialize)]
struct GroupFile {
    name: String,
    elements: Vec<String>,
    mult_table: Vec<Vec<usize>>,
    irreps: Vec<IrrepFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    subgroups: Vec<SubgroupFile>,
}

#[derive(Serialize, Deserialize)]
struct IrrepFile {
    label: String,
    dim: usize,
    matrices: Vec<MatrixFile>,
}

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    real: Vec<Vec<f64>>,
    imag: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct SubgroupFile {
    name: String,
    elements: Vec<usize>,
}

impl MatrixFile {
    fn from_matrix(m: &DMatrix<Complex64>) -> Self {
        let rows = |f: fn(&Complex64) -> f64| (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| f(&m[(r, c)])).collect()).collect();
        MatrixFile { real: rows(|z| z.re), imag: rows(|z| z.im) }
    }

    fn to_matrix(&self, dim: usize) -> Result<DMatrix<Complex64>> {
        let shape_ok = |v: &Vec<Vec<f64>>| v.len() == dim && v.iter().all(|r| r.len() == dim);
        if !shape_ok(&self.real) || !shape_ok(&self.imag) {
            return Err(Error::InvalidGroup { group: String::new(), reason: "matrix has the wrong shape".into() });
        }
        Ok(DMatrix::from_fn(dim, dim, |r, c| Complex64::new(self.real[r][c], self.imag[r][c])))
    }
}

impl GroupFile {
    fn into_group(self) -> Result<GroupSpec> {
        let irreps = self
            .irreps
            .iter()
            .map(|i| {
                Ok(IrrepSpec {
                    label: i.label.clone(),
                    dim: i.dim,
                    matrices: i.matrices.iter().map(|m| m.to_matrix(i.dim)).collect::<Result<_>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e| match e {
                Error::InvalidGroup { reason, .. } => Error::InvalidGroup { group: self.name.clone(), reason },
                other => other,
            })?;
        let mut group = GroupSpec::new(self.name.clone(), self.elements, self.mult_table, irreps)?;
        for sub in self.subgroups {
            let spec = SubgroupSpec::derive(&group, &sub.name, sub.elements)?;
            group = group.with_subgroup(spec)?;
        }
        if group.subgroups.is_empty() && group.is_abelian() {
            let whole = SubgroupSpec::whole(&group)?;
            group = group.with_subgroup(whole)?;
        }
        Ok(group)
    }
}

// ---------------------------------------------------------------------------
// Built-in groups
// ---------------------------------------------------------------------------

pub const BUILTIN_GROUPS: [&str; 4] = ["Cs", "C2v", "C3v", "Td"];

/// Validated built-in point group with its registered Abelian subgroups; the first
/// registered subgroup is the default filtering subgroup.
pub fn builtin_group(name: &str) -> Result<GroupSpec> {
    match name {
        "Cs" => cs(),
        "C2v" => c2v(),
        "C3v" => c3v(),
        "Td" => td(),
        other => Err(Error::UnknownGroup(other.to_string())),
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn mult_table_from(mats: &[Matrix3<f64>]) -> Vec<Vec<usize>> {
    mats.iter()
        .map(|a| {
            mats.iter()
                .map(|b| {
                    let p = a * b;
                    mats.iter().position(|m| (m - p).norm() < 1e-9).expect("closed set of matrices")
                })
                .collect()
        })
        .collect()
}

fn irrep_from(label: &str, mats: &[Matrix3<f64>], f: impl Fn(&Matrix3<f64>) -> DMatrix<f64>) -> IrrepSpec {
    let matrices: Vec<DMatrix<Complex64>> = mats.iter().map(|m| f(m).map(c)).collect();
    IrrepSpec { label: label.into(), dim: matrices[0].nrows(), matrices }
}

fn one_d(label: &str, mats: &[Matrix3<f64>], f: impl Fn(&Matrix3<f64>) -> f64) -> IrrepSpec {
    irrep_from(label, mats, |m| DMatrix::from_element(1, 1, f(m)))
}

/// Subgroup from named parent matrices with a hard-coded real character table.
fn subgroup_from(
    parent: &GroupSpec,
    parent_mats: &[Matrix3<f64>],
    name: &str,
    mats: &[Matrix3<f64>],
    table: &[(&str, &[f64])],
) -> SubgroupSpec {
    let element_indices = mats
        .iter()
        .map(|m| parent_mats.iter().position(|p| (p - m).norm() < 1e-9).expect("subgroup element in parent"))
        .collect();
    let irreps = table
        .iter()
        .map(|(label, chars)| IrrepSpec::one_dimensional(label, &chars.iter().map(|&x| c(x)).collect::<Vec<_>>()))
        .collect();
    SubgroupSpec {
        name: name.into(),
        parent: parent.name.clone(),
        element_indices,
        irreps,
        trivial_label: table[0].0.into(),
    }
}

fn rot_z(angle: f64) -> Matrix3<f64> {
    let (s, co) = angle.sin_cos();
    Matrix3::new(co, -s, 0.0, s, co, 0.0, 0.0, 0.0, 1.0)
}

fn cs() -> Result<GroupSpec> {
    let mats = [Matrix3::identity(), Matrix3::from_diagonal(&[1.0, -1.0, 1.0].into())];
    let irreps = vec![one_d("A'", &mats, |_| 1.0), one_d("A''", &mats, |m| m.determinant())];
    let g = GroupSpec::new("Cs", vec!["E".into(), "sigma".into()], mult_table_from(&mats), irreps)?;
    let whole = SubgroupSpec::whole(&g)?;
    g.with_subgroup(whole)
}

const C2V_TABLE: [(&str, &[f64]); 4] = [
    ("A1", &[1.0, 1.0, 1.0, 1.0]),
    ("A2", &[1.0, 1.0, -1.0, -1.0]),
    ("B1", &[1.0, -1.0, 1.0, -1.0]),
    ("B2", &[1.0, -1.0, -1.0, 1.0]),
];

fn c2v() -> Result<GroupSpec> {
    let mats = [
        Matrix3::identity(),
        Matrix3::from_diagonal(&[-1.0, -1.0, 1.0].into()),
        Matrix3::from_diagonal(&[1.0, -1.0, 1.0].into()),
        Matrix3::from_diagonal(&[-1.0, 1.0, 1.0].into()),
    ];
    let irreps = C2V_TABLE
        .iter()
        .map(|(label, chars)| {
            let chars = chars.to_vec();
            let values: Vec<Complex64> = chars.iter().map(|&x| c(x)).collect();
            IrrepSpec::one_dimensional(label, &values)
        })
        .collect();
    let names = ["E", "C2", "sigma_v(xz)", "sigma_v(yz)"].map(String::from).to_vec();
    let g = GroupSpec::new("C2v", names, mult_table_from(&mats), irreps)?;
    let whole = SubgroupSpec::whole(&g)?;
    g.with_subgroup(whole)
}

/// C3v with the E irrep in real orthogonal form; sigma_v is the xz mirror, so
/// `D_E(sigma_v) = diag(1, -1)` and the x component is A', the y component A''.
fn c3v() -> Result<GroupSpec> {
    let third = 2.0 * std::f64::consts::PI / 3.0;
    let sigma = Matrix3::from_diagonal(&[1.0, -1.0, 1.0].into());
    let mats = [
        Matrix3::identity(),
        rot_z(third),
        rot_z(2.0 * third),
        sigma,
        rot_z(third) * sigma,
        rot_z(2.0 * third) * sigma,
    ];
    let irreps = vec![
        one_d("A1", &mats, |_| 1.0),
        one_d("A2", &mats, |m| m.determinant()),
        irrep_from("E", &mats, |m| DMatrix::from_fn(2, 2, |r, col| m[(r, col)])),
    ];
    let names = ["E", "C3", "C3^2", "sigma_v", "sigma_v'", "sigma_v''"].map(String::from).to_vec();
    let g = GroupSpec::new("C3v", names, mult_table_from(&mats), irreps)?;
    let cs = subgroup_from(&g, &mats, "Cs", &[mats[0], mats[3]], &[("A'", &[1.0, 1.0]), ("A''", &[1.0, -1.0])]);
    g.with_subgroup(cs)
}

/// Td as the signed permutation matrices with an even number of sign flips, with
/// the C2 axes along x, y and z.
fn td() -> Result<GroupSpec> {
    let perms: [[usize; 3]; 6] = [[0, 1, 2], [1, 2, 0], [2, 0, 1], [1, 0, 2], [2, 1, 0], [0, 2, 1]];
    let signs: [[f64; 3]; 4] = [[1.0, 1.0, 1.0], [-1.0, -1.0, 1.0], [-1.0, 1.0, -1.0], [1.0, -1.0, -1.0]];
    let mut mats = Vec::new();
    for perm in &perms {
        for sign in &signs {
            let mut m = Matrix3::zeros();
            for r in 0..3 {
                m[(r, perm[r])] = sign[r];
            }
            mats.push(m);
        }
    }
    let class_of = |m: &Matrix3<f64>| -> (usize, &'static str) {
        let tr = m.trace().round() as i64;
        let det = m.determinant().round() as i64;
        match (det, tr) {
            (1, 3) => (0, "E"),
            (1, 0) => (1, "C3"),
            (1, -1) => (2, "C2"),
            (-1, -1) => (3, "S4"),
            (-1, 1) => (4, "sigma_d"),
            _ => unreachable!("not an element of Td"),
        }
    };
    mats.sort_by_key(|m| class_of(m).0);
    let mut counters = [0usize; 5];
    let names: Vec<String> = mats
        .iter()
        .map(|m| {
            let (k, base) = class_of(m);
            counters[k] += 1;
            if k == 0 { base.to_string() } else { format!("{base}_{}", counters[k]) }
        })
        .collect();
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let s6 = 1.0 / 6f64.sqrt();
    // Orthonormal basis of the complement of (1,1,1) for the axis-permutation action.
    let e_basis = nalgebra::Matrix3x2::new(s2, s6, -s2, s6, 0.0, -2.0 * s6);
    let irreps = vec![
        one_d("A1", &mats, |_| 1.0),
        one_d("A2", &mats, |m| m.determinant()),
        irrep_from("E", &mats, |m| {
            let p = m.abs();
            let e = e_basis.transpose() * p * e_basis;
            DMatrix::from_fn(2, 2, |r, col| e[(r, col)])
        }),
        irrep_from("T1", &mats, |m| DMatrix::from_fn(3, 3, |r, col| m.determinant() * m[(r, col)])),
        irrep_from("T2", &mats, |m| DMatrix::from_fn(3, 3, |r, col| m[(r, col)])),
    ];
    let g = GroupSpec::new("Td", names, mult_table_from(&mats), irreps)?;
    let swap_xy = Matrix3::new(0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
    let anti_xy = Matrix3::new(0.0, -1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
    let c2z = Matrix3::from_diagonal(&[-1.0, -1.0, 1.0].into());
    let c2y = Matrix3::from_diagonal(&[-1.0, 1.0, -1.0].into());
    let c2x = Matrix3::from_diagonal(&[1.0, -1.0, -1.0].into());
    let c2v = subgroup_from(&g, &mats, "C2v", &[Matrix3::identity(), c2z, swap_xy, anti_xy], &C2V_TABLE);
    let d2 = subgroup_from(
        &g,
        &mats,
        "D2",
        &[Matrix3::identity(), c2z, c2y, c2x],
        &[
            ("A", &[1.0, 1.0, 1.0, 1.0]),
            ("B1", &[1.0, 1.0, -1.0, -1.0]),
            ("B2", &[1.0, -1.0, 1.0, -1.0]),
            ("B3", &[1.0, -1.0, -1.0, 1.0]),
        ],
    );
    g.with_subgroup(c2v)?.with_subgroup(d2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_orders_and_dimensions() {
        let dims = |g: &GroupSpec| g.irreps().iter().map(|i| i.dim).collect::<Vec<_>>();
        let c3v = builtin_group("C3v").unwrap();
        assert_eq!(c3v.order(), 6);
        assert_eq!(dims(&c3v), vec![1, 1, 2]);
        let cs = builtin_group("Cs").unwrap();
        assert_eq!(cs.order(), 2);
        assert_eq!(cs.irreps().iter().map(|i| i.label.as_str()).collect::<Vec<_>>(), vec!["A'", "A''"]);
        let td = builtin_group("Td").unwrap();
        assert_eq!(td.order(), 24);
        assert_eq!(dims(&td), vec![1, 1, 2, 3, 3]);
        assert_eq!(builtin_group("C2v").unwrap().order(), 4);
        assert!(matches!(builtin_group("Oh"), Err(Error::UnknownGroup(_))));
    }

    #[test]
    fn c3v_e_has_diagonal_mirror() {
        let g = builtin_group("C3v").unwrap();
        let e = g.irrep("E").unwrap();
        let sv = g.element_index("sigma_v").unwrap();
        assert!((e.matrices[sv][(0, 0)] - 1.0).norm() < 1e-15);
        assert!((e.matrices[sv][(1, 1)] + 1.0).norm() < 1e-15);
        assert!(e.matrices[sv][(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn td_classes_have_expected_sizes() {
        let g = builtin_group("Td").unwrap();
        let count = |prefix: &str| g.elements().iter().filter(|e| e.starts_with(prefix)).count();
        assert_eq!(count("C3"), 8);
        assert_eq!(count("C2"), 3);
        assert_eq!(count("S4"), 6);
        assert_eq!(count("sigma_d"), 6);
        // T2 characters: 3, 0, -1, -1, 1 on E, C3, C2, S4, sigma_d
        let t2 = g.irrep("T2").unwrap();
        for (k, name) in g.elements().iter().enumerate() {
            let expected = match name.split('_').next().unwrap() {
                "E" => 3.0,
                "C3" => 0.0,
                "C2" => -1.0,
                "S4" => -1.0,
                "sigma" => 1.0,
                _ => unreachable!(),
            };
            assert!((t2.character(k) - expected).norm() < 1e-12, "{name}");
        }
    }

    #[test]
    fn restriction_to_mirror_splits_e() {
        let g = builtin_group("C3v").unwrap();
        let cs = g.subgroup("Cs").unwrap();
        let r = g.restrict_irrep(g.irrep("E").unwrap(), cs).unwrap();
        assert!(r.aligned);
        assert_eq!(r.labels, vec!["A'", "A''"]);
        let r = g.restrict_irrep(g.irrep("A1").unwrap(), cs).unwrap();
        assert_eq!(r.labels, vec!["A'"]);
        let r = g.restrict_irrep(g.irrep("A2").unwrap(), cs).unwrap();
        assert_eq!(r.labels, vec!["A''"]);
    }

    #[test]
    fn td_d2_leaves_e_unsplit() {
        let g = builtin_group("Td").unwrap();
        let d2 = g.subgroup("D2").unwrap();
        let r = g.restrict_irrep(g.irrep("E").unwrap(), d2).unwrap();
        assert_eq!(r.distinct(), 1);
        let r = g.restrict_irrep(g.irrep("T2").unwrap(), d2).unwrap();
        assert!(r.aligned);
        assert_eq!(r.labels, vec!["B3", "B2", "B1"]);
    }

    #[test]
    fn a1_multiplicities() {
        let g = builtin_group("C3v").unwrap();
        assert_eq!(g.a1_multiplicity(&[("E", false), ("E", true)]).unwrap(), 1);
        assert_eq!(g.a1_multiplicity(&[("A1", false), ("A1", true), ("A1", false), ("A1", true)]).unwrap(), 1);
        assert_eq!(g.a1_multiplicity(&[("A1", false), ("E", true)]).unwrap(), 0);
    }

    #[test]
    fn json_round_trip_revalidates() {
        let g = builtin_group("C3v").unwrap();
        let text = g.to_json_string().unwrap();
        let back = GroupSpec::from_json_str(&text).unwrap();
        assert_eq!(back.order(), 6);
        assert_eq!(back.mult_table(), g.mult_table());
        // The derived subgroup reproduces the same split with generic labels.
        let r = back.restrict_irrep(back.irrep("E").unwrap(), back.subgroup("Cs").unwrap()).unwrap();
        assert_eq!(r.distinct(), 2);
    }

    #[test]
    fn json_loader_rejects_broken_groups() {
        let g = builtin_group("C3v").unwrap();
        let mut value: serde_json::Value = serde_json::from_str(&g.to_json_string().unwrap()).unwrap();
        value["mult_table"][1][1] = serde_json::json!(0);
        assert!(GroupSpec::from_json_str(&value.to_string()).is_err());

        let mut value: serde_json::Value = serde_json::from_str(&g.to_json_string().unwrap()).unwrap();
        value["irreps"][2]["matrices"][1]["real"][0][0] = serde_json::json!(0.9);
        assert!(matches!(GroupSpec::from_json_str(&value.to_string()), Err(Error::InvalidGroup { .. })));

        let mut value: serde_json::Value = serde_json::from_str(&g.to_json_string().unwrap()).unwrap();
        value["irreps"].as_array_mut().unwrap().pop();
        assert!(GroupSpec::from_json_str(&value.to_string()).is_err());
    }
}
