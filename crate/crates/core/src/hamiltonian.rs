//! Integrals, FCIDUMP I/O, second-quantized Hamiltonians, the triangular-prism
//! Hubbard testbed, integral selection rules and degenerate-shell rotations.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fermion::{FermionOperator, LadderOp};
use crate::fock::{FockBasis, SparseOperator};
use crate::group::SubgroupSpec;
use crate::orbitals::{OrbitalBasis, OrbitalShell};

const SYMMETRY_TOL: f64 = 1e-12;
const FCIDUMP_CONFLICT_TOL: f64 = 1e-10;
pub const SELECTION_RULE_TOL: f64 = 1e-10;

/// One- and two-electron integrals over spatial orbitals. Two-electron integrals
/// are stored densely in chemists' notation `(pq|rs)`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralSet {
    n_spatial: usize,
    n_electrons: usize,
    ms2: i64,
    h1: DMatrix<f64>,
    h2: Vec<f64>,
    e_core: f64,
}

impl IntegralSet {
    pub fn new(h1: DMatrix<f64>, h2: Vec<f64>, e_core: f64, n_electrons: usize, ms2: i64) -> Result<Self> {
        let n = h1.nrows();
        if h1.ncols() != n || h2.len() != n.pow(4) {
            return Err(Error::Integrals(format!("inconsistent shapes for {n} orbitals")));
        }
        let ints = IntegralSet { n_spatial: n, n_electrons, ms2, h1, h2, e_core };
        ints.validate()?;
        Ok(ints)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n_spatial;
        if !self.e_core.is_finite() || self.h1.iter().chain(&self.h2).any(|v| !v.is_finite()) {
            return Err(Error::Integrals("non-finite integral".into()));
        }
        for p in 0..n {
            for q in 0..n {
                if (self.h1[(p, q)] - self.h1[(q, p)]).abs() > SYMMETRY_TOL {
                    return Err(Error::Integrals(format!("h1 not symmetric at ({p},{q})")));
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = self.eri(p, q, r, s);
                        for (a, b, c, d) in permutations(p, q, r, s) {
                            if (self.eri(a, b, c, d) - v).abs() > SYMMETRY_TOL {
                                return Err(Error::Integrals(format!(
                                    "(pq|rs) not 8-fold symmetric at ({p}{q}|{r}{s})"
                                )));
                            }
                        }
                    }
                }
            }
        }
        if self.n_electrons > 2 * n {
            return Err(Error::Integrals(format!("{} electrons in {n} orbitals", self.n_electrons)));
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

    pub fn ms2(&self) -> i64 {
        self.ms2
    }

    pub fn e_core(&self) -> f64 {
        self.e_core
    }

    pub fn h1(&self) -> &DMatrix<f64> {
        &self.h1
    }

    pub fn h1_pq(&self, p: usize, q: usize) -> f64 {
        self.h1[(p, q)]
    }

    /// `(pq|rs)` in chemists' notation.
    pub fn eri(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_spatial;
        self.h2[((p * n + q) * n + r) * n + s]
    }

    /// Closed-shell determinant energy of the given doubly occupied orbitals.
    pub fn determinant_energy(&self, occupied: &[usize]) -> f64 {
        let mut e = self.e_core;
        for &i in occupied {
            e += 2.0 * self.h1[(i, i)];
            for &j in occupied {
                e += 2.0 * self.eri(i, i, j, j) - self.eri(i, j, j, i);
            }
        }
        e
    }

    /// Change of orbital basis `phi'_m = sum_p phi_p C_{pm}` with orthogonal `C`.
    pub fn transform(&self, c: &DMatrix<f64>) -> Result<IntegralSet> {
        let n = self.n_spatial;
        if c.nrows() != n || c.ncols() != n {
            return Err(Error::DimensionMismatch(format!("{}x{} rotation for {n} orbitals", c.nrows(), c.ncols())));
        }
        let dev = (c.transpose() * c - DMatrix::<f64>::identity(n, n)).amax();
        if dev > 1e-10 {
            return Err(Error::NotOrthogonal(dev));
        }
        if *c == DMatrix::<f64>::identity(n, n) {
            return Ok(self.clone());
        }
        let h1 = c.transpose() * &self.h1 * c;
        let h1 = (&h1 + h1.transpose()) * 0.5;
        // Four successive quarter transformations, one index at a time.
        let mut cur = self.h2.clone();
        for axis in 0..4 {
            let mut next = vec![0.0; cur.len()];
            let stride = n.pow(3 - axis as u32);
            for (idx, &v) in cur.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                let old = (idx / stride) % n;
                let base = idx - old * stride;
                for m in 0..n {
                    let cm = c[(old, m)];
                    if cm != 0.0 {
                        next[base + m * stride] += v * cm;
                    }
                }
            }
            cur = next;
        }
        symmetrize_eri(&mut cur, n);
        IntegralSet::new(h1, cur, self.e_core, self.n_electrons, self.ms2)
    }
}

fn permutations(p: usize, q: usize, r: usize, s: usize) -> [(usize, usize, usize, usize); 8] {
    [(p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r), (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p)]
}

/// Average every 8-fold orbit to remove roundoff asymmetry.
fn symmetrize_eri(h2: &mut [f64], n: usize) {
    let at = |p: usize, q: usize, r: usize, s: usize| ((p * n + q) * n + r) * n + s;
    for p in 0..n {
        for q in 0..=p {
            for r in 0..n {
                for s in 0..=r {
                    if at(p, q, r, s) < at(r, s, p, q) {
                        continue;
                    }
                    let perms = permutations(p, q, r, s);
                    let mean = perms.iter().map(|&(a, b, c, d)| h2[at(a, b, c, d)]).sum::<f64>() / 8.0;
                    for (a, b, c, d) in perms {
                        h2[at(a, b, c, d)] = mean;
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// FCIDUMP
// ---------------------------------------------------------------------------

pub fn read_fcidump(path: impl AsRef<Path>) -> Result<IntegralSet> {
    parse_fcidump(&std::fs::read_to_string(path)?)
}

pub fn parse_fcidump(text: &str) -> Result<IntegralSet> {
    let err = |line: usize, reason: String| Error::Fcidump { line, reason };
    let lines: Vec<&str> = text.lines().collect();
    let end = lines
        .iter()
        .position(|l| {
            let t = l.trim().to_ascii_uppercase();
            t.starts_with("&END") || t == "/" || t.ends_with("&END")
        })
        .ok_or_else(|| err(1, "missing &END or / terminating the namelist header".into()))?;
    let header = lines[..=end].join(" ");
    if !header.to_ascii_uppercase().contains("&FCI") {
        return Err(err(1, "header does not start with &FCI".into()));
    }
    let field = |name: &str| -> Result<Option<i64>> {
        let upper = header.to_ascii_uppercase();
        let mut search = 0;
        while let Some(pos) = upper[search..].find(name) {
            let start = search + pos;
            search = start + name.len();
            let boundary_before = start == 0 || !upper.as_bytes()[start - 1].is_ascii_alphanumeric();
            let rest = upper[search..].trim_start();
            if !boundary_before || !rest.starts_with('=') {
                continue;
            }
            let value: String = rest[1..]
                .trim_start()
                .chars()
                .take_while(|c| c.is_ascii_digit() || *c == '-' || *c == '+')
                .collect();
            return value.parse().map(Some).map_err(|_| err(1, format!("cannot parse {name}")));
        }
        Ok(None)
    };
    let n = field("NORB")?.ok_or_else(|| err(1, "missing NORB".into()))?;
    let nelec = field("NELEC")?.ok_or_else(|| err(1, "missing NELEC".into()))?;
    let ms2 = field("MS2")?.unwrap_or(0);
    if n <= 0 || nelec < 0 {
        return Err(err(1, format!("invalid NORB={n} or NELEC={nelec}")));
    }
    let n = n as usize;
    let mut h1 = DMatrix::<f64>::zeros(n, n);
    let mut h1_set = vec![false; n * n];
    let mut h2 = vec![0.0; n.pow(4)];
    let mut h2_set = vec![false; n.pow(4)];
    let mut e_core = 0.0;
    for (k, raw) in lines.iter().enumerate().skip(end + 1) {
        let lineno = k + 1;
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 5 {
            return Err(err(lineno, format!("expected `value p q r s`, found {} fields", fields.len())));
        }
        let value: f64 = fields[0]
            .replace(['D', 'd'], "e")
            .parse()
            .map_err(|_| err(lineno, format!("bad value `{}`", fields[0])))?;
        let mut idx = [0usize; 4];
        for (slot, f) in idx.iter_mut().zip(&fields[1..]) {
            *slot = f.parse().map_err(|_| err(lineno, format!("bad index `{f}`")))?;
            if *slot > n {
                return Err(err(lineno, format!("index {slot} exceeds NORB={n}")));
            }
        }
        let [p, q, r, s] = idx;
        match (p > 0, q > 0, r > 0, s > 0) {
            (true, true, true, true) => {
                let (p, q, r, s) = (p - 1, q - 1, r - 1, s - 1);
                for (a, b, c, d) in permutations(p, q, r, s) {
                    let at = ((a * n + b) * n + c) * n + d;
                    if h2_set[at] && (h2[at] - value).abs() > FCIDUMP_CONFLICT_TOL {
                        return Err(err(lineno, format!("({p}{q}|{r}{s}) contradicts an earlier symmetric entry")));
                    }
                    h2[at] = value;
                    h2_set[at] = true;
                }
            }
            (true, true, false, false) => {
                let (p, q) = (p - 1, q - 1);
                for (a, b) in [(p, q), (q, p)] {
                    if h1_set[a * n + b] && (h1[(a, b)] - value).abs() > FCIDUMP_CONFLICT_TOL {
                        return Err(err(lineno, format!("h({p},{q}) contradicts an earlier symmetric entry")));
                    }
                    h1[(a, b)] = value;
                    h1_set[a * n + b] = true;
                }
            }
            (false, false, false, false) => e_core = value,
            // Orbital energies; not needed.
            (true, false, false, false) => {}
            _ => return Err(err(lineno, format!("unsupported index pattern {p} {q} {r} {s}"))),
        }
    }
    IntegralSet::new(h1, h2, e_core, nelec as usize, ms2)
}

/// Serialize with shortest round-trip float formatting, unique entries only.
pub fn format_fcidump(ints: &IntegralSet) -> String {
    let n = ints.n_spatial;
    let mut out = String::new();
    let _ = writeln!(out, " &FCI NORB={n},NELEC={},MS2={},", ints.n_electrons, ints.ms2);
    let _ = writeln!(out, "  ORBSYM={}", vec!["1"; n].join(","));
    let _ = writeln!(out, "  ISYM=1,");
    let _ = writeln!(out, " &END");
    for p in 0..n {
        for q in 0..=p {
            for r in 0..n {
                for s in 0..=r {
                    if p * (p + 1) / 2 + q < r * (r + 1) / 2 + s {
                        continue;
                    }
                    let v = ints.eri(p, q, r, s);
                    if v != 0.0 {
                        let _ = writeln!(out, "{v:e} {} {} {} {}", p + 1, q + 1, r + 1, s + 1);
                    }
                }
            }
        }
    }
    for p in 0..n {
        for q in 0..=p {
            let v = ints.h1[(p, q)];
            if v != 0.0 {
                let _ = writeln!(out, "{v:e} {} {} 0 0", p + 1, q + 1);
            }
        }
    }
    let _ = writeln!(out, "{:e} 0 0 0 0", ints.e_core);
    out
}

pub fn write_fcidump(ints: &IntegralSet, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_fcidump(ints))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Hamiltonian assembly
// ---------------------------------------------------------------------------

/// Electronic Hamiltonian over interleaved spin orbitals; `op` excludes `e_core`.
#[derive(Clone, Debug)]
pub struct MolecularHamiltonian {
    pub op: FermionOperator,
    pub e_core: f64,
    pub n_electrons: usize,
    pub n_modes: usize,
}

impl MolecularHamiltonian {
    pub fn sparse(&self, basis: &FockBasis) -> Result<SparseOperator> {
        SparseOperator::from_operator(&self.op, basis)
    }

    /// The `(N, S_z = 0)` sector of this Hamiltonian's electron count.
    pub fn sector(&self) -> Result<FockBasis> {
        FockBasis::closed_shell(self.n_modes, self.n_electrons)
    }
}

/// `H = sum h_pq a+_ps a_qs + 1/2 sum (pq|rs) a+_ps a+_rt a_st a_qs`, with the
/// chemists' integral converted to physicists' order at this single point.
pub fn build_hamiltonian(ints: &IntegralSet) -> MolecularHamiltonian {
    let n = ints.n_spatial;
    let mut op = FermionOperator::zero();
    for p in 0..n {
        for q in 0..n {
            let h = ints.h1[(p, q)];
            if h == 0.0 {
                continue;
            }
            for spin in 0..2 {
                op += &FermionOperator::product(&[LadderOp::cre(2 * p + spin), LadderOp::ann(2 * q + spin)], h);
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = ints.eri(p, q, r, s);
                    if v == 0.0 {
                        continue;
                    }
                    for sigma in 0..2 {
                        for tau in 0..2 {
                            let (ps, qs, rt, st) = (2 * p + sigma, 2 * q + sigma, 2 * r + tau, 2 * s + tau);
                            if ps == rt || qs == st {
                                continue;
                            }
                            op += &FermionOperator::product(
                                &[LadderOp::cre(ps), LadderOp::cre(rt), LadderOp::ann(st), LadderOp::ann(qs)],
                                0.5 * v,
                            );
                        }
                    }
                }
            }
        }
    }
    MolecularHamiltonian { op, e_core: ints.e_core, n_electrons: ints.n_electrons, n_modes: 2 * n }
}

// ---------------------------------------------------------------------------
// Triangular-prism Hubbard model
// ---------------------------------------------------------------------------

/// Site hopping matrix of two stacked three-site rings, with `-t_intra` inside each
/// ring and `-t_inter` between site `k` and site `k + 3`. Site `k` of each ring sits
/// at azimuth `2 pi k / 3`, so the `sigma_v` mirror fixes sites 0 and 3.
pub fn prism_hopping_matrix(t_intra: f64, t_inter: f64) -> DMatrix<f64> {
    let mut t = DMatrix::zeros(6, 6);
    for ring in 0..2 {
        for a in 0..3 {
            for b in 0..3 {
                if a != b {
                    t[(3 * ring + a, 3 * ring + b)] = -t_intra;
                }
            }
        }
    }
    for k in 0..3 {
        t[(k, k + 3)] = -t_inter;
        t[(k + 3, k)] = -t_inter;
    }
    t
}

/// Symmetry-adapted orbitals of the prism in order of increasing energy, with
/// each E level as an `(x, y)` pair: x is even and y odd under the mirror.
fn prism_orbitals(t_intra: f64, t_inter: f64) -> Vec<(&'static str, f64, [f64; 6])> {
    let s3 = 1.0 / 3f64.sqrt();
    let a = [s3, s3, s3];
    let x = [2.0 / 6f64.sqrt(), -1.0 / 6f64.sqrt(), -1.0 / 6f64.sqrt()];
    let y = [0.0, std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2];
    let stack = |v: [f64; 3], sign: f64| {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        [v[0] * h, v[1] * h, v[2] * h, sign * v[0] * h, sign * v[1] * h, sign * v[2] * h]
    };
    let mut levels = vec![
        ("A1", -2.0 * t_intra - t_inter, vec![stack(a, 1.0)]),
        ("A1", -2.0 * t_intra + t_inter, vec![stack(a, -1.0)]),
        ("E", t_intra - t_inter, vec![stack(x, 1.0), stack(y, 1.0)]),
        ("E", t_intra + t_inter, vec![stack(x, -1.0), stack(y, -1.0)]),
    ];
    levels.sort_by(|l, r| l.1.total_cmp(&r.1));
    levels
        .into_iter()
        .flat_map(|(irrep, e, vecs)| vecs.into_iter().map(move |v| (irrep, e, v)))
        .collect()
}

/// Prism Hubbard model at half filling (6 electrons) in its symmetry-adapted MO
/// basis: `h = C^T T C`, `(pq|rs) = u sum_i C_ip C_iq C_ir C_is`.
pub fn build_prism_model(t_intra: f64, t_inter: f64, u: f64) -> Result<(IntegralSet, OrbitalBasis)> {
    // Written to reject NaN as well.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    let bad_hopping = !(t_intra > 0.0);
    if bad_hopping || !t_inter.is_finite() || !u.is_finite() {
        return Err(Error::ModelParameters(format!("need t_intra > 0 and finite parameters, got ({t_intra}, {t_inter}, {u})")));
    }
    let orbitals = prism_orbitals(t_intra, t_inter);
    let energies: Vec<f64> = orbitals.iter().map(|o| o.1).collect();
    for w in orbitals.windows(2) {
        if w[0].0 != w[1].0 && (w[0].1 - w[1].1).abs() < 1e-8 {
            return Err(Error::ModelParameters(format!(
                "accidental A1/E degeneracy at energy {:.6}; avoid |t_inter| = 1.5 t_intra and t_inter = 0 \
                 (use e.g. t_inter = 2 t_intra)",
                w[0].1
            )));
        }
    }
    // 6 electrons fill three spatial orbitals; the third and fourth must not share an E level.
    if orbitals[2].0 == "E" && orbitals[3].0 == "E" && (energies[2] - energies[3]).abs() < 1e-8 {
        return Err(Error::ModelParameters(format!(
            "6 electrons half-fill an E level for t_inter/t_intra = {:.3}; the closed-shell \
             occupied-E/virtual-E scenario needs |t_inter| > 1.5 t_intra",
            t_inter / t_intra
        )));
    }
    let c = DMatrix::from_fn(6, 6, |site, m| orbitals[m].2[site]);
    let t = prism_hopping_matrix(t_intra, t_inter);
    let h1 = c.transpose() * t * &c;
    let h1 = (&h1 + h1.transpose()) * 0.5;
    let mut h2 = vec![0.0; 6usize.pow(4)];
    for p in 0..6 {
        for q in 0..6 {
            for r in 0..6 {
                for s in 0..6 {
                    h2[((p * 6 + q) * 6 + r) * 6 + s] =
                        u * (0..6).map(|i| c[(i, p)] * c[(i, q)] * c[(i, r)] * c[(i, s)]).sum::<f64>();
                }
            }
        }
    }
    symmetrize_eri(&mut h2, 6);
    let ints = IntegralSet::new(h1, h2, 0.0, 6, 0)?;

    let mut shells = Vec::new();
    let mut h_labels = Vec::new();
    let mut m = 0;
    while m < 6 {
        let (irrep, energy, _) = orbitals[m];
        if irrep == "E" {
            shells.push(OrbitalShell { irrep: "E".into(), shell_index: 0, components: vec![m, m + 1], energy });
            h_labels.extend(["A'".to_string(), "A''".to_string()]);
            m += 2;
        } else {
            shells.push(OrbitalShell { irrep: "A1".into(), shell_index: 0, components: vec![m], energy });
            h_labels.push("A'".into());
            m += 1;
        }
    }
    let basis = OrbitalBasis::new(shells, h_labels, 6)?;
    Ok((ints, basis))
}

// ---------------------------------------------------------------------------
// Selection rules and rotations
// ---------------------------------------------------------------------------

/// An integral whose subgroup-label product is nontrivial but whose magnitude
/// exceeds the tolerance. One-electron entries have `r = s = None`.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionViolation {
    pub indices: Vec<usize>,
    pub value: f64,
}

/// Scan unique integrals for nonzero entries forbidden by the subgroup labels.
pub fn check_selection_rules(
    ints: &IntegralSet,
    basis: &OrbitalBasis,
    subgroup: &SubgroupSpec,
) -> Result<Vec<SelectionViolation>> {
    let n = ints.n_spatial;
    if basis.n_spatial() != n {
        return Err(Error::DimensionMismatch(format!("{} labels for {n} orbitals", basis.n_spatial())));
    }
    let l = |p: usize| basis.h_label(p);
    let mut out = Vec::new();
    for p in 0..n {
        for q in 0..=p {
            let v = ints.h1[(p, q)];
            if v.abs() > SELECTION_RULE_TOL && !subgroup.product_is_trivial(&[(l(p), false), (l(q), true)])? {
                out.push(SelectionViolation { indices: vec![p, q], value: v });
            }
        }
    }
    for p in 0..n {
        for q in 0..=p {
            for r in 0..n {
                for s in 0..=r {
                    if p * (p + 1) / 2 + q < r * (r + 1) / 2 + s {
                        continue;
                    }
                    let v = ints.eri(p, q, r, s);
                    if v.abs() > SELECTION_RULE_TOL
                        && !subgroup.product_is_trivial(&[(l(p), false), (l(q), true), (l(r), false), (l(s), true)])?
                    {
                        out.push(SelectionViolation { indices: vec![p, q, r, s], value: v });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Mix the components of one shell with an orthogonal matrix `u`
/// (`phi'_mu = sum_nu phi_nu u_{nu mu}`) and transform all integrals.
pub fn rotate_shell(ints: &IntegralSet, shell: &OrbitalShell, u: &DMatrix<f64>) -> Result<IntegralSet> {
    let d = shell.dim();
    if u.nrows() != d || u.ncols() != d {
        return Err(Error::DimensionMismatch(format!("{}x{} matrix for a {d}-component shell", u.nrows(), u.ncols())));
    }
    let dev = (u.transpose() * u - DMatrix::<f64>::identity(d, d)).amax();
    if dev > 1e-10 {
        return Err(Error::NotOrthogonal(dev));
    }
    let mut c = DMatrix::<f64>::identity(ints.n_spatial, ints.n_spatial);
    for (a, &p) in shell.components.iter().enumerate() {
        if p >= ints.n_spatial {
            return Err(Error::ModeOutOfRange { mode: p, n_modes: ints.n_spatial });
        }
        for (b, &q) in shell.components.iter().enumerate() {
            c[(p, q)] = u[(a, b)];
        }
    }
    ints.transform(&c)
}

/// Rotate a two-component shell by `angle` radians.
pub fn rotate_degenerate_shells(ints: &IntegralSet, shell: &OrbitalShell, angle: f64) -> Result<IntegralSet> {
    if shell.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "an angle rotates a 2-component shell, this one has {}; supply a matrix instead",
            shell.dim()
        )));
    }
    let (s, c) = angle.sin_cos();
    rotate_shell(ints, shell, &DMatrix::from_row_slice(2, 2, &[c, -s, s, c]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::builtin_group;

    fn toy() -> IntegralSet {
        let h1 = DMatrix::from_row_slice(2, 2, &[-1.2, 0.1, 0.1, -0.4]);
        let mut h2 = vec![0.0; 16];
        let mut set = |p: usize, q: usize, r: usize, s: usize, v: f64| {
            for (a, b, c, d) in permutations(p, q, r, s) {
                h2[((a * 2 + b) * 2 + c) * 2 + d] = v;
            }
        };
        set(0, 0, 0, 0, 0.7);
        set(1, 1, 1, 1, 0.5);
        set(0, 0, 1, 1, 0.45);
        set(0, 1, 0, 1, 0.12);
        set(0, 0, 0, 1, 0.03);
        IntegralSet::new(h1, h2, 0.25, 2, 0).unwrap()
    }

    #[test]
    fn fcidump_round_trip_is_exact() {
        let ints = toy();
        let back = parse_fcidump(&format_fcidump(&ints)).unwrap();
        assert_eq!(back, ints);
    }

    #[test]
    fn core_only_fcidump() {
        let ints = parse_fcidump("&FCI NORB=1,NELEC=0,MS2=0,\n&END\n 1.5 0 0 0 0\n").unwrap();
        assert_eq!(ints.e_core(), 1.5);
        let h = build_hamiltonian(&ints);
        assert!(h.op.is_empty());
    }

    #[test]
    fn fcidump_errors() {
        assert!(matches!(parse_fcidump("&FCI NELEC=2\n&END\n"), Err(Error::Fcidump { .. })));
        assert!(matches!(parse_fcidump("&FCI NORB=1,NELEC=2\n&END\n1.0 2 1 0 0\n"), Err(Error::Fcidump { .. })));
        let asym = "&FCI NORB=2,NELEC=2\n&END\n1.0 2 1 0 0\n1.5 1 2 0 0\n";
        assert!(matches!(parse_fcidump(asym), Err(Error::Fcidump { line: 4, .. })));
    }

    #[test]
    fn diagonal_one_body_hamiltonian() {
        let h1 = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, 0.5]));
        let ints = IntegralSet::new(h1, vec![0.0; 16], 0.0, 2, 0).unwrap();
        let h = build_hamiltonian(&ints);
        let mut expected = FermionOperator::zero();
        for (p, e) in [(0, -1.0), (1, 0.5)] {
            for spin in 0..2 {
                expected += &FermionOperator::hop(2 * p + spin, 2 * p + spin).scale_real(e);
            }
        }
        assert_eq!(h.op, expected);
    }

    #[test]
    fn hamiltonian_is_hermitian_and_matches_determinant_energy() {
        let ints = toy();
        let h = build_hamiltonian(&ints);
        assert!(h.op.is_hermitian(1e-12));
        assert!(h.op.conserves_number());
        let basis = FockBasis::closed_shell(4, 2).unwrap();
        let m = h.op.to_matrix_in(&basis).unwrap();
        let hf = basis.index_of(0b0011).unwrap();
        assert!((m[(hf, hf)].re + ints.e_core() - ints.determinant_energy(&[0])).abs() < 1e-12);
    }

    #[test]
    fn prism_spectrum_and_partition() {
        let t = prism_hopping_matrix(1.0, 0.5);
        let mut ev: Vec<f64> = t.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let expected = [-2.5, -1.5, 0.5, 0.5, 1.5, 1.5];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(matches!(build_prism_model(1.0, 0.5, 2.0), Err(Error::ModelParameters(_))));
        assert!(matches!(build_prism_model(1.0, 1.5, 2.0), Err(Error::ModelParameters(_))));

        let (ints, basis) = build_prism_model(1.0, 2.0, 2.0).unwrap();
        assert_eq!(basis.occupied(), &[0, 1, 2]);
        assert_eq!(basis.shells()[1].irrep, "E");
        assert_eq!(basis.shells()[1].components, vec![1, 2]);
        assert_eq!(basis.shells()[3].components, vec![4, 5]);
        assert!(ints.h1_pq(1, 2).abs() < 1e-14 && ints.h1_pq(4, 5).abs() < 1e-14);
        let g = builtin_group("C3v").unwrap();
        basis.check_label_consistency(&g, g.subgroup("Cs").unwrap()).unwrap();
        assert!(check_selection_rules(&ints, &basis, g.subgroup("Cs").unwrap()).unwrap().is_empty());
    }

    #[test]
    fn rotation_breaks_selection_rules_and_zero_angle_is_identity() {
        let (ints, basis) = build_prism_model(1.0, 2.0, 2.0).unwrap();
        let g = builtin_group("C3v").unwrap();
        let cs = g.subgroup("Cs").unwrap();
        let virt_e = &basis.shells()[3];
        assert!(rotate_degenerate_shells(&ints, virt_e, 0.0).unwrap() == ints);
        let rotated = rotate_degenerate_shells(&ints, virt_e, std::f64::consts::PI / 6.0).unwrap();
        assert!(!check_selection_rules(&rotated, &basis, cs).unwrap().is_empty());
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(rotate_shell(&ints, virt_e, &bad), Err(Error::NotOrthogonal(_))));
    }
}
