mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;
use symvqe::fermion::{commutator, FermionOperator, LadderOp};
use symvqe::group::builtin_group;
use symvqe::Complex64;

fn op_strategy(n_modes: usize, max_terms: usize) -> impl Strategy<Value = FermionOperator> {
    let term = (prop::collection::vec((0..n_modes, any::<bool>()), 0..=4), -1.0..1.0f64, -1.0..1.0f64);
    prop::collection::vec(term, 1..=max_terms).prop_map(|terms| {
        let mut out = FermionOperator::zero();
        for (ops, re, im) in terms {
            let ladders: Vec<LadderOp> = ops.into_iter().map(|(mode, dagger)| LadderOp { mode, dagger }).collect();
            out += &FermionOperator::product(&ladders, 1.0).scale(Complex64::new(re, im));
        }
        out
    })
}

fn matrix(op: &FermionOperator, n: usize) -> DMatrix<Complex64> {
    op.to_matrix(n, None).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobi_identity(a in op_strategy(4, 3), b in op_strategy(4, 3), c in op_strategy(4, 3)) {
        let j = commutator(&a, &commutator(&b, &c))
            + commutator(&b, &commutator(&c, &a))
            + commutator(&c, &commutator(&a, &b));
        prop_assert!(j.max_abs_coeff() < 1e-10, "Jacobi residual {}", j.max_abs_coeff());
    }

    #[test]
    fn commutators_of_anti_hermitian_operators_are_anti_hermitian(t in op_strategy(5, 3), s in op_strategy(5, 3)) {
        let a = t.clone() - t.adjoint();
        let b = s.clone() - s.adjoint();
        prop_assert!(a.is_anti_hermitian(1e-12));
        prop_assert!(commutator(&a, &b).is_anti_hermitian(1e-12));
    }

    #[test]
    fn symbolic_products_match_matrices(n in 1usize..=6, seed_a in op_strategy(6, 3), seed_b in op_strategy(6, 3)) {
        let keep = |op: &FermionOperator| {
            let mut out = FermionOperator::zero();
            for (k, c) in op.terms() {
                if k.max_mode().is_none_or(|m| m < n) {
                    let mut t = FermionOperator::zero();
                    t.add_term(k.clone(), *c);
                    out += &t;
                }
            }
            out
        };
        let (a, b) = (keep(&seed_a), keep(&seed_b));
        let (ma, mb) = (matrix(&a, n), matrix(&b, n));
        prop_assert!((matrix(&(&a * &b), n) - &ma * &mb).camax() < 1e-12);
        prop_assert!((matrix(&commutator(&a, &b), n) - (&ma * &mb - &mb * &ma)).camax() < 1e-12);
        prop_assert!((matrix(&a.adjoint(), n) - ma.adjoint()).camax() < 1e-12);
    }

    #[test]
    fn irrep_projectors_are_idempotent_and_complete(
        group_name in prop::sample::select(vec!["C3v", "Td"]),
        coeffs in prop::collection::vec(-1.0..1.0f64, 36),
    ) {
        let g = builtin_group(group_name).unwrap();
        let (irrep, sub) = if group_name == "C3v" { ("E", "Cs") } else { ("T2", "D2") };
        let basis = common::shell_pair(&g, g.subgroup(sub).unwrap(), irrep);
        let d = basis.n_spatial() / 2;
        // Random spin-summed single excitation from the occupied into the virtual shell.
        let mut t = FermionOperator::zero();
        for (k, c) in coeffs.iter().take(d * d).enumerate() {
            let (a, i) = (d + k / d, k % d);
            t += &(FermionOperator::hop(2 * a, 2 * i) + FermionOperator::hop(2 * a + 1, 2 * i + 1)).scale_real(*c);
        }
        let mut total = FermionOperator::zero();
        let labels: Vec<String> = g.irreps().iter().map(|r| r.label.clone()).collect();
        for label in &labels {
            let p = g.project_onto_irrep(&t, label, &basis).unwrap();
            let pp = g.project_onto_irrep(&p, label, &basis).unwrap();
            prop_assert!((pp - p.clone()).max_abs_coeff() < 1e-12);
            for other in labels.iter().filter(|l| *l != label) {
                prop_assert!(g.project_onto_irrep(&p, other, &basis).unwrap().max_abs_coeff() < 1e-12);
            }
            total += &p;
        }
        prop_assert!((total - t).max_abs_coeff() < 1e-12);
    }
}

#[test]
fn characters_are_orthonormal() {
    for name in ["Cs", "C2v", "C3v", "Td"] {
        let g = builtin_group(name).unwrap();
        for (i, a) in g.irreps().iter().enumerate() {
            for (j, b) in g.irreps().iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                let ip = g.character_inner(a, b);
                assert!((ip - Complex64::new(expected, 0.0)).norm() < 1e-12, "{name} {} {}", a.label, b.label);
            }
        }
    }
}

#[test]
fn number_operator_on_a_sector_is_a_multiple_of_identity() {
    let mut n_op = FermionOperator::zero();
    for p in 0..4 {
        n_op += &FermionOperator::hop(p, p);
    }
    let m = n_op.to_matrix(4, Some(2)).unwrap();
    assert_eq!(m.nrows(), 6);
    assert!((m - DMatrix::<Complex64>::identity(6, 6) * Complex64::new(2.0, 0.0)).camax() < 1e-15);
}
