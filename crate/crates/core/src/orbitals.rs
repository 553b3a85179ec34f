//! Symmetry-labelled orbital bookkeeping.
//!
//! Spatial orbitals are grouped into shells of `d` degenerate components that
//! transform together under a `d`-dimensional irrep of the full point group. Every
//! spatial orbital also carries the one-dimensional label it receives under the
//! Abelian subgroup used for filtering.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupSpec, SubgroupSpec};

pub const DEFAULT_DEGENERACY_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitalShell {
    /// Irrep of the full group; empty until the shell has been labelled.
    pub irrep: String,
    /// Position of this shell among the shells of the same irrep.
    pub shell_index: usize,
    /// Spatial orbital index of each component, in component order.
    pub components: Vec<usize>,
    pub energy: f64,
}

impl OrbitalShell {
    pub fn dim(&self) -> usize {
        self.components.len()
    }
}

/// JSON sidecar accompanying an FCIDUMP: orbital energies, subgroup labels and
/// optionally the full-group `(irrep, component)` label of every spatial orbital.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelSidecar {
    pub energies: Vec<f64>,
    pub h_labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_labels: Option<Vec<(String, usize)>>,
}

impl LabelSidecar {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let sidecar: LabelSidecar = serde_json::from_str(&text)?;
        sidecar.validate()?;
        Ok(sidecar)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.energies.len() != self.h_labels.len() {
            return Err(Error::Labels(format!(
                "{} energies but {} subgroup labels",
                self.energies.len(),
                self.h_labels.len()
            )));
        }
        if let Some(g) = &self.g_labels {
            if g.len() != self.energies.len() {
                return Err(Error::Labels(format!(
                    "{} energies but {} group labels",
                    self.energies.len(),
                    g.len()
                )));
            }
        }
        if self.energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::Labels("non-finite orbital energy".into()));
        }
        Ok(())
    }
}

/// Group orbitals into shells from their energies and subgroup labels.
///
/// Orbitals closer than `threshold` in energy with pairwise distinct subgroup labels
/// form one multi-component shell; everything else becomes a one-dimensional shell.
/// The returned shells are unlabelled (empty `irrep`).
pub fn detect_degenerate_shells(
    energies: &[f64],
    h_labels: &[String],
    threshold: f64,
) -> Result<Vec<OrbitalShell>> {
    if energies.len() != h_labels.len() {
        return Err(Error::Labels("energies and labels differ in length".into()));
    }
    if energies.windows(2).any(|w| w[1] < w[0] - threshold) {
        return Err(Error::Labels("orbital energies are not in ascending order".into()));
    }
    let mut shells = Vec::new();
    let mut start = 0;
    while start < energies.len() {
        let mut end = start + 1;
        while end < energies.len() && energies[end] - energies[end - 1] < threshold {
            end += 1;
        }
        let cluster: Vec<usize> = (start..end).collect();
        let mut labels: Vec<&String> = cluster.iter().map(|&p| &h_labels[p]).collect();
        labels.sort();
        labels.dedup();
        let energy = energies[start];
        if cluster.len() == 1 || labels.len() == cluster.len() {
            shells.push(OrbitalShell { irrep: String::new(), shell_index: 0, components: cluster, energy });
        } else if cluster.len() == 2 {
            // Same label twice: an accidental degeneracy, not a multi-component shell.
            for p in cluster {
                shells.push(OrbitalShell { irrep: String::new(), shell_index: 0, components: vec![p], energy: energies[p] });
            }
        } else {
            return Err(Error::AmbiguousDegeneracy(format!(
                "orbitals {start}..{end} are degenerate within {threshold:e} Ha but carry only {} distinct labels",
                labels.len()
            )));
        }
        start = end;
    }
    Ok(shells)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub occupied_shells: Vec<usize>,
    pub virtual_shells: Vec<usize>,
    /// Occupied spatial orbitals, ascending.
    pub occupied: Vec<usize>,
    /// Virtual spatial orbitals, ascending.
    pub virtuals: Vec<usize>,
}

/// Aufbau filling of the lowest `n_electrons / 2` spatial orbitals, shell by shell.
pub fn partition(shells: &[OrbitalShell], n_electrons: usize) -> Result<Partition> {
    let n_spatial: usize = shells.iter().map(OrbitalShell::dim).sum();
    if !n_electrons.is_multiple_of(2) {
        return Err(Error::Partition(format!("{n_electrons} electrons is not a closed shell")));
    }
    if n_electrons > 2 * n_spatial {
        return Err(Error::Partition(format!(
            "{n_electrons} electrons do not fit in {n_spatial} spatial orbitals"
        )));
    }
    let mut order: Vec<usize> = (0..shells.len()).collect();
    order.sort_by(|&a, &b| {
        shells[a]
            .energy
            .total_cmp(&shells[b].energy)
            .then(shells[a].components[0].cmp(&shells[b].components[0]))
    });
    let mut remaining = n_electrons / 2;
    let mut occupied_shells = Vec::new();
    let mut virtual_shells = Vec::new();
    for s in order {
        let d = shells[s].dim();
        if remaining >= d {
            occupied_shells.push(s);
            remaining -= d;
        } else if remaining > 0 {
            return Err(Error::Partition(format!(
                "shell with components {:?} straddles the Fermi level ({remaining} of {d} components would be filled)",
                shells[s].components
            )));
        } else {
            virtual_shells.push(s);
        }
    }
    occupied_shells.sort_unstable();
    virtual_shells.sort_unstable();
    let collect = |set: &[usize]| {
        let mut v: Vec<usize> = set.iter().flat_map(|&s| shells[s].components.iter().copied()).collect();
        v.sort_unstable();
        v
    };
    Ok(Partition {
        occupied: collect(&occupied_shells),
        virtuals: collect(&virtual_shells),
        occupied_shells,
        virtual_shells,
    })
}

/// Spatial orbitals with shell structure, subgroup labels and a closed-shell partition.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitalBasis {
    n_spatial: usize,
    shells: Vec<OrbitalShell>,
    partition: Partition,
    h_labels: Vec<String>,
    g_labels: Vec<(String, usize)>,
    location: Vec<(usize, usize)>,
    n_electrons: usize,
}

impl OrbitalBasis {
    /// Build from labelled shells. Shell indices within each irrep are renumbered in
    /// order of first component.
    pub fn new(mut shells: Vec<OrbitalShell>, h_labels: Vec<String>, n_electrons: usize) -> Result<Self> {
        let n_spatial = h_labels.len();
        let mut location = vec![None; n_spatial];
        shells.sort_by_key(|s| s.components.iter().copied().min().unwrap_or(usize::MAX));
        let mut per_irrep: BTreeMap<String, usize> = BTreeMap::new();
        for (si, shell) in shells.iter_mut().enumerate() {
            if shell.irrep.is_empty() {
                return Err(Error::Labels(format!("shell {:?} has no irrep label", shell.components)));
            }
            if shell.components.is_empty() {
                return Err(Error::Labels("empty shell".into()));
            }
            let counter = per_irrep.entry(shell.irrep.clone()).or_default();
            shell.shell_index = *counter;
            *counter += 1;
            for (mu, &p) in shell.components.iter().enumerate() {
                if p >= n_spatial {
                    return Err(Error::Labels(format!("orbital {p} has no subgroup label")));
                }
                if location[p].is_some() {
                    return Err(Error::Labels(format!("orbital {p} appears in two shells")));
                }
                location[p] = Some((si, mu));
            }
        }
        let location: Vec<(usize, usize)> = location
            .into_iter()
            .enumerate()
            .map(|(p, l)| l.ok_or_else(|| Error::Labels(format!("orbital {p} belongs to no shell"))))
            .collect::<Result<_>>()?;
        let g_labels = location.iter().map(|&(s, mu)| (shells[s].irrep.clone(), mu)).collect();
        let partition = partition(&shells, n_electrons)?;
        Ok(OrbitalBasis { n_spatial, shells, partition, h_labels, g_labels, location, n_electrons })
    }

    /// Build from a label sidecar. Shells come from degeneracy detection; full-group
    /// labels are taken from the sidecar when present and otherwise inferred by
    /// matching each shell's subgroup labels against irrep restrictions of `group`.
    pub fn from_sidecar(
        sidecar: &LabelSidecar,
        symmetry: Option<(&GroupSpec, &SubgroupSpec)>,
        n_electrons: usize,
        threshold: f64,
    ) -> Result<Self> {
        sidecar.validate()?;
        let mut shells = detect_degenerate_shells(&sidecar.energies, &sidecar.h_labels, threshold)?;
        for shell in &mut shells {
            label_shell(shell, sidecar, symmetry)?;
        }
        let basis = OrbitalBasis::new(shells, sidecar.h_labels.clone(), n_electrons)?;
        if let Some((g, h)) = symmetry {
            basis.check_label_consistency(g, h)?;
        }
        Ok(basis)
    }

    /// Every shell's subgroup labels must be the restriction of its irrep.
    pub fn check_label_consistency(&self, group: &GroupSpec, subgroup: &SubgroupSpec) -> Result<()> {
        for shell in &self.shells {
            let irrep = group.irrep(&shell.irrep)?;
            let restriction = group.restrict_irrep(irrep, subgroup)?;
            let mut expected = restriction.labels.clone();
            let mut actual: Vec<String> = shell.components.iter().map(|&p| self.h_labels[p].clone()).collect();
            if restriction.aligned {
                if expected != actual {
                    return Err(Error::Labels(format!(
                        "shell {:?} ({}) has labels {actual:?}, restriction gives {expected:?}",
                        shell.components, shell.irrep
                    )));
                }
            } else {
                expected.sort();
                actual.sort();
                if expected != actual {
                    return Err(Error::Labels(format!(
                        "shell {:?} ({}) has labels {actual:?}, restriction gives {expected:?}",
                        shell.components, shell.irrep
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n_spatial(&self) -> usize {
        self.n_spatial
    }

    pub fn n_modes(&self) -> usize {
        2 * self.n_spatial
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    pub fn shells(&self) -> &[OrbitalShell] {
        &self.shells
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn occupied(&self) -> &[usize] {
        &self.partition.occupied
    }

    pub fn virtuals(&self) -> &[usize] {
        &self.partition.virtuals
    }

    pub fn is_occupied(&self, p: usize) -> bool {
        self.partition.occupied.binary_search(&p).is_ok()
    }

    pub fn h_label(&self, p: usize) -> &str {
        &self.h_labels[p]
    }

    pub fn h_labels(&self) -> &[String] {
        &self.h_labels
    }

    /// `(irrep, component)` of spatial orbital `p`.
    pub fn g_label(&self, p: usize) -> (&str, usize) {
        (&self.g_labels[p].0, self.g_labels[p].1)
    }

    /// `(shell index into shells(), component)` of spatial orbital `p`.
    pub fn location(&self, p: usize) -> (usize, usize) {
        self.location[p]
    }

    pub fn shell_of(&self, p: usize) -> &OrbitalShell {
        &self.shells[self.location[p].0]
    }

    /// Spin orbitals occupied in the reference determinant.
    pub fn occupied_spin_orbitals(&self) -> Vec<usize> {
        self.partition.occupied.iter().flat_map(|&p| [2 * p, 2 * p + 1]).collect()
    }

    /// `(N_occ, N_vir)` shell counts per irrep.
    pub fn shell_counts(&self) -> BTreeMap<String, (usize, usize)> {
        let mut out: BTreeMap<String, (usize, usize)> = BTreeMap::new();
        for &s in &self.partition.occupied_shells {
            out.entry(self.shells[s].irrep.clone()).or_default().0 += 1;
        }
        for &s in &self.partition.virtual_shells {
            out.entry(self.shells[s].irrep.clone()).or_default().1 += 1;
        }
        out
    }

    /// Replace subgroup labels, e.g. after choosing a different Abelian subgroup.
    pub fn with_h_labels(&self, h_labels: Vec<String>) -> Result<Self> {
        if h_labels.len() != self.n_spatial {
            return Err(Error::Labels("label count does not match orbital count".into()));
        }
        Ok(OrbitalBasis { h_labels, ..self.clone() })
    }

    pub fn to_sidecar(&self) -> LabelSidecar {
        let mut energies = vec![0.0; self.n_spatial];
        for shell in &self.shells {
            for &p in &shell.components {
                energies[p] = shell.energy;
            }
        }
        LabelSidecar { energies, h_labels: self.h_labels.clone(), g_labels: Some(self.g_labels.clone()) }
    }
}

fn label_shell(
    shell: &mut OrbitalShell,
    sidecar: &LabelSidecar,
    symmetry: Option<(&GroupSpec, &SubgroupSpec)>,
) -> Result<()> {
    if let Some(g_labels) = &sidecar.g_labels {
        let irrep = &g_labels[shell.components[0]].0;
        let mut ordered = vec![None; shell.dim()];
        for &p in &shell.components {
            let (label, mu) = &g_labels[p];
            if label != irrep {
                return Err(Error::Labels(format!(
                    "degenerate orbitals {:?} carry different irreps",
                    shell.components
                )));
            }
            if *mu >= shell.dim() || ordered[*mu].is_some() {
                return Err(Error::Labels(format!("bad component index {mu} for orbital {p}")));
            }
            ordered[*mu] = Some(p);
        }
        if let Some((g, _)) = symmetry {
            let d = g.irrep(irrep)?.dim;
            if d != shell.dim() {
                return Err(Error::Labels(format!(
                    "irrep {irrep} has dimension {d} but shell {:?} has {}",
                    shell.components,
                    shell.dim()
                )));
            }
        }
        shell.irrep = irrep.clone();
        shell.components = ordered.into_iter().map(|p| p.expect("filled above")).collect();
        return Ok(());
    }
    let labels: Vec<String> = shell.components.iter().map(|&p| sidecar.h_labels[p].clone()).collect();
    let (group, subgroup) = match symmetry {
        Some(s) => s,
        None if shell.dim() == 1 => {
            shell.irrep = labels[0].clone();
            return Ok(());
        }
        None => {
            return Err(Error::Labels(format!(
                "multi-component shell {:?} needs a point group or explicit group labels",
                shell.components
            )))
        }
    };
    let mut sorted = labels.clone();
    sorted.sort();
    let mut matches = Vec::new();
    for irrep in group.irreps().iter().filter(|i| i.dim == shell.dim()) {
        let r = group.restrict_irrep(irrep, subgroup)?;
        let mut rs = r.labels.clone();
        rs.sort();
        if rs == sorted {
            matches.push((irrep.label.clone(), r));
        }
    }
    if matches.len() != 1 {
        return Err(Error::Labels(format!(
            "cannot infer the irrep of shell {:?} with labels {labels:?}: {} candidates",
            shell.components,
            matches.len()
        )));
    }
    let (irrep, restriction) = matches.pop().expect("one match");
    if restriction.aligned {
        // Order components so that component mu carries the mu-th restricted label.
        let mut remaining = shell.components.clone();
        let mut ordered = Vec::with_capacity(shell.dim());
        for label in &restriction.labels {
            let k = remaining
                .iter()
                .position(|&p| &sidecar.h_labels[p] == label)
                .ok_or_else(|| Error::Labels(format!("no component labelled {label}")))?;
            ordered.push(remaining.remove(k));
        }
        shell.components = ordered;
    }
    shell.irrep = irrep;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn distinct_energies_give_one_dimensional_shells() {
        let e = [-1.0, -0.5, 0.2, 0.9];
        let shells = detect_degenerate_shells(&e, &labels(&["A'", "A''", "A'", "A'"]), 1e-6).unwrap();
        assert_eq!(shells.len(), 4);
        assert!(shells.iter().all(|s| s.dim() == 1));
    }

    #[test]
    fn degenerate_pair_with_distinct_labels() {
        let e = [-1.0, -0.5, -0.5 + 1e-9, 0.3];
        let shells = detect_degenerate_shells(&e, &labels(&["A'", "A'", "A''", "A'"]), 1e-6).unwrap();
        assert_eq!(shells.len(), 3);
        assert_eq!(shells[1].components, vec![1, 2]);
    }

    #[test]
    fn three_way_degeneracy_with_two_labels_is_ambiguous() {
        let e = [-1.0, -1.0, -1.0];
        let err = detect_degenerate_shells(&e, &labels(&["A'", "A''", "A'"]), 1e-6).unwrap_err();
        assert!(matches!(err, Error::AmbiguousDegeneracy(_)));
    }

    #[test]
    fn same_label_pair_is_accidental() {
        let e = [0.5, 0.5];
        let shells = detect_degenerate_shells(&e, &labels(&["A'", "A'"]), 1e-6).unwrap();
        assert_eq!(shells.len(), 2);
    }

    fn shell(irrep: &str, components: Vec<usize>, energy: f64) -> OrbitalShell {
        OrbitalShell { irrep: irrep.into(), shell_index: 0, components, energy }
    }

    #[test]
    fn zero_electrons_leave_everything_virtual() {
        let shells = vec![shell("A1", vec![0], -1.0), shell("E", vec![1, 2], 0.0)];
        let p = partition(&shells, 0).unwrap();
        assert!(p.occupied.is_empty());
        assert_eq!(p.virtuals, vec![0, 1, 2]);
    }

    #[test]
    fn straddling_shell_is_rejected() {
        let shells = vec![shell("A1", vec![0], -1.0), shell("E", vec![1, 2], 0.0)];
        assert!(matches!(partition(&shells, 4), Err(Error::Partition(_))));
        assert!(matches!(partition(&shells, 3), Err(Error::Partition(_))));
        assert!(matches!(partition(&shells, 8), Err(Error::Partition(_))));
    }

    #[test]
    fn shell_dimensions_add_up() {
        let shells = vec![
            shell("A1", vec![0], -2.0),
            shell("E", vec![1, 2], -1.0),
            shell("A1", vec![3], 0.5),
            shell("E", vec![4, 5], 1.0),
        ];
        let basis = OrbitalBasis::new(shells, labels(&["A'", "A'", "A''", "A'", "A'", "A''"]), 6).unwrap();
        let total: usize = basis.shells().iter().map(OrbitalShell::dim).sum();
        assert_eq!(total, basis.n_spatial());
        assert_eq!(basis.occupied(), &[0, 1, 2]);
        assert_eq!(basis.shell_counts()["E"], (1, 1));
        assert_eq!(basis.shells()[3].shell_index, 1);
        assert_eq!(basis.occupied_spin_orbitals(), vec![0, 1, 2, 3, 4, 5]);
    }
}
