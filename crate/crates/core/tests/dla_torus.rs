mod common;

use nalgebra::DMatrix;
use symvqe::dla::{
    generator_closure, lie_closure, torus_check, torus_check_on_support, u_generators, DEFAULT_TOL,
};
use symvqe::fermion::Generator;
use symvqe::orbitals::OrbitalBasis;
use symvqe::pool::{filter_abelian, filter_equivariant, generate_uccsd, ExcitationKind, Pool};
use symvqe::Complex64;

fn e_pair_singles() -> (OrbitalBasis, Pool, Pool) {
    let g = common::c3v();
    let cs = g.subgroup("Cs").unwrap();
    let basis = common::shell_pair(&g, cs, "E");
    let full = generate_uccsd(&basis).channel(&basis, 0, 1, &[ExcitationKind::Single]);
    let ab = filter_abelian(&full, &basis, cs).unwrap();
    let eq = filter_equivariant(&full, &basis, &g).unwrap();
    (basis, ab, eq)
}

#[test]
fn abelian_singles_close_on_a_torus() {
    let (basis, ab, _) = e_pair_singles();
    let gens = ab.generators();
    assert_eq!(gens.len(), 2);
    let r = generator_closure(&gens, DEFAULT_TOL, 64);
    assert_eq!(r.dimension, 2);
    assert!(r.is_abelian && !r.truncated);
    assert!(symvqe::dla::is_abelian(&gens));
    assert!(torus_check(&gens, basis.n_modes(), 10, Some(4), 3).unwrap());
    assert!(torus_check_on_support(&gens, 10, 3).unwrap());
}

#[test]
fn equivariant_singles_do_not_commute() {
    let (basis, _, eq) = e_pair_singles();
    let gens = eq.generators();
    assert_eq!(gens.len(), 4);
    let r = generator_closure(&gens, DEFAULT_TOL, 64);
    assert!(!r.is_abelian);
    assert!(!torus_check(&gens, basis.n_modes(), 10, Some(4), 3).unwrap());
    assert!(!torus_check_on_support(&gens, 10, 3).unwrap());
}

/// One-body operators act faithfully on the one-particle sector, so the symbolic
/// closure dimension must equal the dense closure dimension there.
#[test]
fn symbolic_and_matrix_closures_agree() {
    let (basis, ab, eq) = e_pair_singles();
    for pool in [&ab, &eq] {
        let gens = pool.generators();
        let symbolic = generator_closure(&gens, DEFAULT_TOL, 64);
        let mats: Vec<DMatrix<Complex64>> =
            gens.iter().map(|g| g.op().to_matrix(basis.n_modes(), Some(1)).unwrap()).collect();
        let dense = lie_closure(&mats, DEFAULT_TOL, 64);
        assert_eq!(symbolic.dimension, dense.dimension);
        assert_eq!(symbolic.is_abelian, dense.is_abelian);
    }
    // Real antisymmetric rotations mixing two occupied and two virtual orbitals: so(4).
    assert_eq!(generator_closure(&eq.generators(), DEFAULT_TOL, 64).dimension, 6);
}

#[test]
fn closure_dimension_ignores_generator_order() {
    let (_, _, eq) = e_pair_singles();
    let mut gens: Vec<Generator> = eq.generators();
    let forward = generator_closure(&gens, DEFAULT_TOL, 64).dimension;
    gens.reverse();
    gens.swap(0, 2);
    assert_eq!(generator_closure(&gens, DEFAULT_TOL, 64).dimension, forward);
}

#[test]
fn unitary_algebra_and_its_torus() {
    assert_eq!(lie_closure(&u_generators(2), DEFAULT_TOL, 64).dimension, 4);
    assert_eq!(lie_closure(&u_generators(3), DEFAULT_TOL, 64).dimension, 9);
    let diag = lie_closure(&u_generators(3)[..3], DEFAULT_TOL, 64);
    assert_eq!(diag.dimension, 3);
    assert!(diag.is_abelian);
}

#[test]
fn empty_and_truncated_closures() {
    let r = generator_closure(&[], DEFAULT_TOL, 64);
    assert_eq!(r.dimension, 0);
    assert!(r.is_abelian);
    let (_, _, eq) = e_pair_singles();
    let capped = generator_closure(&eq.generators(), DEFAULT_TOL, 5);
    assert!(capped.truncated);
    assert_eq!(capped.dimension, 5);
}
