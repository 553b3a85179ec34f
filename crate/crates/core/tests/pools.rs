mod common;

use symvqe::group::builtin_group;
use symvqe::pool::{
    deficit_report, filter_abelian, filter_equivariant, filter_integral, generate_uccsd, ClassKey, ExcitationKind,
};

#[test]
fn nh3_pool_sizes() {
    let (ints, basis, g) = common::nh3();
    let full = generate_uccsd(&basis);
    assert_eq!(full.parameter_count(), 135);
    assert_eq!(full.count(ExcitationKind::Single), 15);
    let cs = filter_abelian(&full, &basis, g.subgroup("Cs").unwrap()).unwrap();
    assert_eq!(cs.parameter_count(), 75);
    let eq = filter_equivariant(&full, &basis, &g).unwrap();
    assert!(eq.parameter_count() > cs.parameter_count() && eq.parameter_count() < 135);
    // Every class the subgroup forbids has vanishing integrals in an adapted basis.
    let by_integrals = filter_integral(&full, &ints, 1e-8).unwrap();
    for c in by_integrals.classes() {
        assert!(cs.contains(&c.key), "{} survives the integral filter but breaks Cs", c.key);
    }
}

#[test]
fn paired_doubles_are_always_symmetric() {
    let (_, basis, g) = common::nh3();
    let full = generate_uccsd(&basis);
    let cs = filter_abelian(&full, &basis, g.subgroup("Cs").unwrap()).unwrap();
    let paired = |p: &symvqe::pool::Pool| p.classes().iter().filter(|c| matches!(c.key, ClassKey::Paired(_))).count();
    assert_eq!(paired(&full), 15);
    assert_eq!(paired(&cs), 15);
}

/// Ordered tuples of one-dimensional labels whose product is trivial, counted by
/// brute force over the label group `Z2^k` (labels as bit masks).
fn trivial_tuples(labels: &[u8], arity: usize) -> usize {
    let n = labels.len();
    (0..n.pow(arity as u32))
        .filter(|&code| {
            let mut x = 0u8;
            let mut c = code;
            for _ in 0..arity {
                x ^= labels[c % n];
                c /= n;
            }
            x == 0
        })
        .count()
}

#[test]
fn c3v_e_channel_deficit() {
    let g = builtin_group("C3v").unwrap();
    let basis = common::shell_pair(&g, g.subgroup("Cs").unwrap(), "E");
    let full = generate_uccsd(&basis);
    let cs = filter_abelian(&full, &basis, g.subgroup("Cs").unwrap()).unwrap();
    let rows = deficit_report(&full, &cs, &basis);
    // A' = 0, A'' = 1.
    let labels = [0u8, 1];
    let single = rows.iter().find(|r| r.kind == ExcitationKind::Single).unwrap();
    let double = rows.iter().find(|r| r.kind == ExcitationKind::Double).unwrap();
    assert_eq!((single.retained, single.discarded), (trivial_tuples(&labels, 2), 2));
    assert_eq!((single.total(), single.discarded), (4, 2));
    assert_eq!(single.expected_deficit, Some(2));
    assert_eq!(double.retained, trivial_tuples(&labels, 4));
    assert_eq!((double.total(), double.discarded), (16, 8));
}

#[test]
fn td_t2_channel_deficit_on_the_klein_subgroup() {
    let g = builtin_group("Td").unwrap();
    let d2 = g.subgroup("D2").unwrap();
    let basis = common::shell_pair(&g, d2, "T2");
    let full = generate_uccsd(&basis);
    let filtered = filter_abelian(&full, &basis, d2).unwrap();
    let rows = deficit_report(&full, &filtered, &basis);
    // B1, B2, B3 as the three nonzero elements of Z2 x Z2.
    let labels = [1u8, 2, 3];
    let single = rows.iter().find(|r| r.kind == ExcitationKind::Single).unwrap();
    let double = rows.iter().find(|r| r.kind == ExcitationKind::Double).unwrap();
    assert_eq!((single.total(), single.discarded), (9, 6));
    assert_eq!(single.retained, trivial_tuples(&labels, 2));
    assert_eq!(double.total(), 81);
    assert_eq!(double.retained, trivial_tuples(&labels, 4));
    assert_eq!(double.retained, 21);
}

#[test]
fn unfiltered_channel_loses_nothing() {
    let g = builtin_group("C3v").unwrap();
    let basis = common::shell_pair(&g, g.subgroup("Cs").unwrap(), "E");
    let full = generate_uccsd(&basis);
    for row in deficit_report(&full, &full, &basis) {
        assert_eq!(row.discarded, 0);
    }
}
