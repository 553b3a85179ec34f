#![allow(dead_code)]

use std::path::PathBuf;

use symvqe::group::{builtin_group, GroupSpec, SubgroupSpec};
use symvqe::hamiltonian::{read_fcidump, IntegralSet};
use symvqe::orbitals::{LabelSidecar, OrbitalBasis, OrbitalShell, DEFAULT_DEGENERACY_THRESHOLD};

/// Prism parameters used throughout: the E levels are separated from the A1 levels.
pub const PRISM: (f64, f64, f64) = (1.0, 2.0, 2.0);
pub const PI_OVER_7: f64 = std::f64::consts::PI / 7.0;

pub const NH3_HF: f64 = -55.454565;
pub const NH3_FCI: f64 = -55.520471;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn c3v() -> GroupSpec {
    builtin_group("C3v").unwrap()
}

pub fn shell(irrep: &str, components: Vec<usize>, energy: f64) -> OrbitalShell {
    OrbitalShell { irrep: irrep.into(), shell_index: 0, components, energy }
}

/// One occupied and one virtual shell of `irrep`, labelled by the restriction to
/// `subgroup`.
pub fn shell_pair(group: &GroupSpec, subgroup: &SubgroupSpec, irrep: &str) -> OrbitalBasis {
    let r = group.restrict_irrep(group.irrep(irrep).unwrap(), subgroup).unwrap();
    assert!(r.aligned);
    let d = r.labels.len();
    let shells = vec![shell(irrep, (0..d).collect(), -1.0), shell(irrep, (d..2 * d).collect(), 1.0)];
    let labels = r.labels.iter().chain(&r.labels).cloned().collect();
    OrbitalBasis::new(shells, labels, 2 * d).unwrap()
}

pub fn nh3() -> (IntegralSet, OrbitalBasis, GroupSpec) {
    let g = c3v();
    let ints = read_fcidump(fixture("nh3_sto3g.fcidump")).unwrap();
    let side = LabelSidecar::read(fixture("nh3_sto3g.labels.json")).unwrap();
    let basis = OrbitalBasis::from_sidecar(
        &side,
        Some((&g, g.subgroup("Cs").unwrap())),
        ints.n_electrons(),
        DEFAULT_DEGENERACY_THRESHOLD,
    )
    .unwrap();
    (ints, basis, g)
}
