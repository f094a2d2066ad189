mod common;

use common::{catalog_group, fixtures, point};
use orbitscope::group::DEFAULT_SUBGROUP_CAP;
use proptest::prelude::*;

#[test]
fn cayley_table_matches_matrix_products() {
    for (name, rep, _) in fixtures() {
        for i in 0..rep.order() {
            for j in 0..rep.order() {
                let prod = rep.element(i).matrix().mul(rep.element(j).matrix());
                assert_eq!(&prod, rep.element(rep.product(i, j)).matrix(), "{name}: {i}·{j}");
            }
            assert_eq!(rep.product(i, rep.inverse(i)), 0);
            assert_eq!(rep.product(i, 0), i);
        }
        assert!(rep.verify_tables(), "{name}");
    }
}

#[test]
fn lagrange_and_subgroup_closure() {
    for (name, rep, _) in fixtures() {
        for h in rep.all_subgroups(DEFAULT_SUBGROUP_CAP).unwrap() {
            assert_eq!(rep.order() % h.order(), 0, "{name}");
            assert!(h.contains(0));
            for &a in h.members() {
                assert!(h.contains(rep.inverse(a)));
                for &b in h.members() {
                    assert!(h.contains(rep.product(a, b)));
                }
            }
        }
    }
}

#[test]
fn invariant_metric_is_preserved() {
    for (name, rep, _) in fixtures() {
        let metric = rep.invariant_metric();
        assert!(metric.is_invariant_under(rep), "{name}");
        for g in rep.elements() {
            let t = g.matrix();
            assert_eq!(&t.transpose().mul(metric.eta()).mul(t), metric.eta(), "{name}");
        }
    }
    // orthogonal catalog groups keep the identity metric; the skewed D4 does not
    assert!(common::fixture("d4").1.invariant_metric().is_identity());
    assert!(!common::fixture("d4-skew").1.invariant_metric().is_identity());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn orbit_stabilizer(gi in 0usize..7, x in point(4)) {
        let rep = catalog_group(gi);
        let x = &x[..rep.dim()];
        let orbit = rep.orbit(x).unwrap();
        let iso = rep.isotropy_subgroup(x).unwrap();
        prop_assert_eq!(orbit.len() * iso.order(), rep.order());
    }

    #[test]
    fn isotropy_of_moved_point_is_conjugate(gi in 0usize..7, x in point(4), g in 0usize..24) {
        let rep = catalog_group(gi);
        let x = &x[..rep.dim()];
        let g = g % rep.order();
        let y = rep.element(g).apply(x);
        let lhs = rep.isotropy_subgroup(&y).unwrap();
        let rhs = rep.conjugate_subgroup(&rep.isotropy_subgroup(x).unwrap(), g).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
