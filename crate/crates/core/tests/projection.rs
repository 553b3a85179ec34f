mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symvqe::fermion::FermionOperator;
use symvqe::orbitals::OrbitalBasis;

/// Spin-summed `a+_{v nu} a_{o mu}` from component `mu` of the occupied E shell
/// (orbitals 0, 1) to component `nu` of the virtual E shell (orbitals 2, 3).
fn e(nu: usize, mu: usize) -> FermionOperator {
    let (a, i) = (2 + nu, mu);
    FermionOperator::hop(2 * a, 2 * i) + FermionOperator::hop(2 * a + 1, 2 * i + 1)
}

fn setup() -> (symvqe::group::GroupSpec, OrbitalBasis) {
    let g = common::c3v();
    let basis = common::shell_pair(&g, g.subgroup("Cs").unwrap(), "E");
    (g, basis)
}

fn assert_same(a: &FermionOperator, b: &FermionOperator) {
    let diff = (a.clone() - b.clone()).max_abs_coeff();
    assert!(diff < 1e-12, "differ by {diff}:\n{a}\nvs\n{b}");
}

#[test]
fn cross_channel_singles_project_onto_closed_forms() {
    let (g, basis) = setup();
    let p = |t: &FermionOperator, l: &str| g.project_onto_irrep(t, l, &basis).unwrap();
    let (xx, yy, xy, yx) = (e(0, 0), e(1, 1), e(0, 1), e(1, 0));
    let trace = (xx.clone() + yy.clone()).scale_real(0.5);
    let rot = (xy.clone() - yx.clone()).scale_real(0.5);
    let e1 = (xx.clone() - yy.clone()).scale_real(0.5);
    let e2 = (xy.clone() + yx.clone()).scale_real(0.5);

    assert_same(&p(&xx, "A1"), &trace);
    assert_same(&p(&yy, "A1"), &trace);
    assert!(p(&xy, "A1").is_empty());
    assert_same(&p(&xy, "A2"), &rot);
    assert_same(&p(&yx, "A2"), &-rot.clone());
    assert!(p(&xx, "A2").is_empty());
    assert_same(&p(&xx, "E"), &e1);
    assert_same(&p(&yy, "E"), &-e1.clone());
    assert_same(&p(&xy, "E"), &e2);
    assert_same(&p(&yx, "E"), &e2);
}

#[test]
fn diagonal_singles_never_reach_the_rotational_generator() {
    let (g, basis) = setup();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let (t1, t2): (f64, f64) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let t = e(0, 0).scale_real(t1) + e(1, 1).scale_real(t2);
        assert!(g.project_onto_irrep(&t, "A2", &basis).unwrap().max_abs_coeff() < 1e-12);
    }
}
