mod common;

use common::{fixtures, point};
use orbitscope::group::catalog;
use orbitscope::strata::{isotropy_lattice, principal_critical_orbits, stratum_of};
use proptest::prelude::*;

/// `span(a) ⊆ span(b)` via ranks.
fn contained(a: &[Vec<orbitscope::rational::Q>], b: &[Vec<orbitscope::rational::Q>]) -> bool {
    use orbitscope::linalg::QMatrix;
    if a.is_empty() {
        return true;
    }
    if b.is_empty() {
        return false;
    }
    let rb = QMatrix::from_rows(b.to_vec()).rank();
    let both: Vec<_> = a.iter().chain(b).cloned().collect();
    QMatrix::from_rows(both).rank() == rb
}

#[test]
fn lattice_is_a_strict_order_compatible_with_fixed_spaces() {
    for (name, rep, _) in fixtures() {
        let lat = isotropy_lattice(rep).unwrap();
        for t in &lat.types {
            for c in &t.conjugates {
                assert_eq!(c.order(), t.order);
                assert_eq!(rep.fixed_subspace(c).len(), t.fix_dim, "{name}");
            }
        }
        for &(i, j) in &lat.order_pairs {
            assert_ne!(i, j);
            assert!(lat.types[i].fix_dim >= lat.types[j].fix_dim, "{name}");
            for &(k, l) in &lat.order_pairs {
                if k == j {
                    assert!(lat.less(i, l), "{name}: not transitive");
                }
            }
            // some conjugate of H_i sits inside K = H_j, so Fix(K) ⊆ Fix(that conjugate)
            let k = &lat.types[j].representative;
            let h = lat.types[i].conjugates.iter().find(|h| h.is_subset_of(k)).unwrap();
            assert!(contained(&rep.fixed_subspace(k), &rep.fixed_subspace(h)), "{name}");
        }
    }
}

#[test]
fn critical_rays_have_the_named_isotropy() {
    for (name, rep, _) in fixtures() {
        let set = principal_critical_orbits(rep).unwrap();
        for ray in &set.rays {
            let t = &set.types[ray.type_id];
            assert_eq!(t.fix_dim, 1, "{name}");
            assert!(t.contains_subgroup(&rep.isotropy_subgroup(&ray.direction).unwrap()), "{name}");
        }
    }
    assert!(principal_critical_orbits(&catalog::z2_inversion(2)).unwrap().rays.is_empty());
    assert_eq!(principal_critical_orbits(&catalog::z2xz2()).unwrap().rays.len(), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stratum_is_constant_on_orbits(gi in 0usize..8, x in point(4)) {
        let (_, rep, _) = &fixtures()[gi];
        let x = &x[..rep.dim()];
        let t = stratum_of(rep, x).unwrap();
        for y in rep.orbit(x).unwrap() {
            prop_assert_eq!(stratum_of(rep, &y).unwrap().id, t.id);
        }
    }
}
