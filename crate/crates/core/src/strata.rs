//! Symmetry types, the isotropy lattice, and principal critical orbits.
//!
//! A symmetry type is a conjugacy class `[H]` of subgroups. It is realized when
//! some point has isotropy exactly `H`; realization is tested at a seeded
//! random rational point of `Fix(H)`. On the unit sphere an orbit is isolated
//! in its stratum exactly when its isotropy fixes a line, so the principal
//! critical orbits are read off the realized types with `fix_dim = 1`.

use std::collections::BTreeSet;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{conjugacy_class, FiniteGroupRep, Subgroup, DEFAULT_SUBGROUP_CAP};
use crate::rational::{q, to_f64, Q};

pub const DEFAULT_SEED: u64 = 20_240_917;

/// Draws tried per type before declaring it unrealized.
const REALIZATION_DRAWS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymmetryType {
    /// Position in the ordered type list.
    pub id: usize,
    pub representative: Subgroup,
    pub conjugates: Vec<Subgroup>,
    pub order: usize,
    pub fix_dim: usize,
    pub realized: bool,
}

impl SymmetryType {
    pub fn contains_subgroup(&self, h: &Subgroup) -> bool {
        self.conjugates.binary_search(h).is_ok()
    }

    /// Short label such as `T3[o2,f1]`: type id, subgroup order, fixed dimension.
    pub fn label(&self) -> String {
        format!("T{}[o{},f{}]", self.id, self.order, self.fix_dim)
    }
}

fn random_fixed_point(basis: &[Vec<Q>], n: usize, rng: &mut ChaCha8Rng) -> Vec<Q> {
    let mut x = vec![Q::zero(); n];
    for b in basis {
        let c = q(rng.random_range(-997i64..=997));
        for (xi, bi) in x.iter_mut().zip(b) {
            *xi += &c * bi;
        }
    }
    x
}

/// All conjugacy classes of subgroups, ordered by their smallest member
/// (by order, then member list).
pub fn symmetry_types(rep: &FiniteGroupRep) -> Result<Vec<SymmetryType>> {
    symmetry_types_seeded(rep, DEFAULT_SEED)
}

pub fn symmetry_types_seeded(rep: &FiniteGroupRep, seed: u64) -> Result<Vec<SymmetryType>> {
    let subgroups = rep.all_subgroups(DEFAULT_SUBGROUP_CAP)?;
    let mut assigned: BTreeSet<Subgroup> = BTreeSet::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for h in subgroups {
        if assigned.contains(&h) {
            continue;
        }
        let class = conjugacy_class(rep, &h);
        assigned.extend(class.iter().cloned());
        let basis = rep.fixed_subspace(&h);
        let realized = if basis.is_empty() {
            h.order() == rep.order()
        } else {
            (0..REALIZATION_DRAWS).any(|_| {
                let x = random_fixed_point(&basis, rep.dim(), &mut rng);
                rep.isotropy_subgroup(&x).expect("dimension") == h
            })
        };
        out.push(SymmetryType {
            id: out.len(),
            order: h.order(),
            fix_dim: basis.len(),
            conjugates: class.into_iter().collect(),
            representative: h,
            realized,
        });
    }
    Ok(out)
}

/// Symmetry types with the strict order `[H] < [K]` (a conjugate of `H` is a
/// proper subgroup of `K`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsotropyLattice {
    pub types: Vec<SymmetryType>,
    pub order_pairs: BTreeSet<(usize, usize)>,
    /// Covering pairs of the order.
    pub hasse: Vec<(usize, usize)>,
    pub principal: Option<usize>,
}

impl IsotropyLattice {
    pub fn less(&self, i: usize, j: usize) -> bool {
        self.order_pairs.contains(&(i, j))
    }

    /// Index of the type containing `h`.
    pub fn type_of(&self, h: &Subgroup) -> Option<usize> {
        self.types.iter().position(|t| t.contains_subgroup(h))
    }

    pub fn realized(&self) -> impl Iterator<Item = &SymmetryType> {
        self.types.iter().filter(|t| t.realized)
    }
}

pub fn isotropy_lattice(rep: &FiniteGroupRep) -> Result<IsotropyLattice> {
    let types = symmetry_types(rep)?;
    Ok(lattice_from_types(types))
}

pub fn lattice_from_types(types: Vec<SymmetryType>) -> IsotropyLattice {
    let t = types.len();
    let mut order_pairs = BTreeSet::new();
    for i in 0..t {
        for j in 0..t {
            if i == j || types[i].order >= types[j].order {
                continue;
            }
            let k = &types[j].representative;
            if types[i].conjugates.iter().any(|h| h.is_subset_of(k)) {
                order_pairs.insert((i, j));
            }
        }
    }
    let hasse = order_pairs
        .iter()
        .filter(|&&(i, j)| !(0..t).any(|k| order_pairs.contains(&(i, k)) && order_pairs.contains(&(k, j))))
        .copied()
        .collect();
    let minimal: Vec<usize> = (0..t)
        .filter(|&i| types[i].realized && !(0..t).any(|j| types[j].realized && order_pairs.contains(&(j, i))))
        .collect();
    let principal = (minimal.len() == 1).then(|| minimal[0]);
    IsotropyLattice {
        types,
        order_pairs,
        hasse,
        principal,
    }
}

/// The symmetry type of the isotropy subgroup of `x`.
pub fn stratum_of(rep: &FiniteGroupRep, x: &[Q]) -> Result<SymmetryType> {
    let h = rep.isotropy_subgroup(x)?;
    let types = symmetry_types(rep)?;
    Ok(types
        .into_iter()
        .find(|t| t.contains_subgroup(&h))
        .expect("every subgroup lies in a type"))
}

/// The unique minimal realized type.
pub fn principal_stratum(rep: &FiniteGroupRep) -> Result<SymmetryType> {
    let lattice = isotropy_lattice(rep)?;
    let i = lattice.principal.ok_or(Error::NoUniqueMinimum)?;
    Ok(lattice.types[i].clone())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalRay {
    pub type_id: usize,
    /// Rational direction spanning the fixed line.
    #[serde(serialize_with = "serialize_q_vec")]
    pub direction: Vec<Q>,
    pub unit: Vec<f64>,
    /// Number of sphere points in the orbit of `unit`.
    pub orbit_size: usize,
}

fn serialize_q_vec<S: serde::Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(crate::rational::format_q))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrincipalCriticalOrbitSet {
    pub types: Vec<SymmetryType>,
    pub rays: Vec<CriticalRay>,
}

/// One ray per critical orbit on the unit sphere. When `-v` is not in the
/// orbit of `v`, both directions are listed since they are distinct orbits.
pub fn principal_critical_orbits(rep: &FiniteGroupRep) -> Result<PrincipalCriticalOrbitSet> {
    let types = symmetry_types(rep)?;
    let mut rays = Vec::new();
    for t in types.iter().filter(|t| t.realized && t.fix_dim == 1) {
        let v = rep.fixed_subspace(&t.representative).remove(0);
        let orbit = rep.orbit(&v)?;
        let neg: Vec<Q> = v.iter().map(|a| -a).collect();
        let mut dirs = vec![v.clone()];
        if !orbit.contains(&neg) {
            dirs.push(neg);
        }
        for d in dirs {
            let f: Vec<f64> = d.iter().map(to_f64).collect();
            let norm = f.iter().map(|a| a * a).sum::<f64>().sqrt();
            rays.push(CriticalRay {
                type_id: t.id,
                unit: f.iter().map(|a| a / norm).collect(),
                direction: d,
                orbit_size: orbit.len(),
            });
        }
    }
    Ok(PrincipalCriticalOrbitSet { types, rays })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::catalog;

    fn pt(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q(x)).collect()
    }

    fn summary(types: &[SymmetryType]) -> Vec<(usize, usize, usize, bool)> {
        types.iter().map(|t| (t.order, t.conjugates.len(), t.fix_dim, t.realized)).collect()
    }

    #[test]
    fn types_z2() {
        let t = symmetry_types(&catalog::z2_inversion(2)).unwrap();
        assert_eq!(summary(&t), vec![(1, 1, 2, true), (2, 1, 0, true)]);
    }

    #[test]
    fn types_z2xz2() {
        let t = symmetry_types(&catalog::z2xz2()).unwrap();
        assert_eq!(t.len(), 5);
        let realized: Vec<_> = t.iter().filter(|t| t.realized).map(|t| (t.order, t.fix_dim)).collect();
        assert_eq!(realized, vec![(1, 2), (2, 1), (2, 1), (4, 0)]);
        let minus_i = t.iter().find(|t| t.order == 2 && t.fix_dim == 0).unwrap();
        assert!(!minus_i.realized);
    }

    #[test]
    fn types_d4() {
        let t = symmetry_types(&catalog::d4()).unwrap();
        assert_eq!(t.len(), 8);
        assert_eq!(t.iter().map(|t| t.conjugates.len()).sum::<usize>(), 10);
        let realized: Vec<_> = t.iter().filter(|t| t.realized).map(|t| (t.order, t.fix_dim, t.conjugates.len())).collect();
        assert_eq!(realized, vec![(1, 2, 1), (2, 1, 2), (2, 1, 2), (8, 0, 1)]);
    }

    #[test]
    fn stratum_examples() {
        let d4 = catalog::d4();
        let axis = stratum_of(&d4, &pt(&[1, 0])).unwrap();
        let diag = stratum_of(&d4, &pt(&[1, 1])).unwrap();
        assert_eq!((axis.order, axis.fix_dim), (2, 1));
        assert_eq!((diag.order, diag.fix_dim), (2, 1));
        assert_ne!(axis.id, diag.id);
        assert_eq!(stratum_of(&d4, &pt(&[2, 1])).unwrap().order, 1);
        assert_eq!(stratum_of(&d4, &pt(&[0, 0])).unwrap().order, 8);
    }

    #[test]
    fn lattice_shapes() {
        let l = isotropy_lattice(&catalog::z2_inversion(2)).unwrap();
        assert_eq!(l.order_pairs, BTreeSet::from([(0, 1)]));

        let l = isotropy_lattice(&catalog::d4()).unwrap();
        let e = l.principal.unwrap();
        assert_eq!(l.types[e].order, 1);
        let full = l.types.iter().position(|t| t.order == 8).unwrap();
        for t in l.realized().filter(|t| t.order == 2) {
            assert!(l.less(e, t.id) && l.less(t.id, full));
        }
        for &(i, j) in &l.order_pairs {
            assert!(!l.less(j, i));
            assert!(l.types[i].fix_dim >= l.types[j].fix_dim);
        }

        let l = isotropy_lattice(&catalog::z2xz2()).unwrap();
        let mid: Vec<_> = l.realized().filter(|t| t.order == 2).collect();
        assert_eq!(mid.len(), 2);
    }

    #[test]
    fn principal_examples() {
        assert_eq!(principal_stratum(&catalog::z2_inversion(2)).unwrap().order, 1);
        assert_eq!(principal_stratum(&catalog::d4()).unwrap().order, 1);
        let t = principal_stratum(&catalog::trivial(2)).unwrap();
        assert_eq!((t.order, t.fix_dim), (1, 2));
    }

    #[test]
    fn critical_orbit_examples() {
        let d4 = principal_critical_orbits(&catalog::d4()).unwrap();
        assert_eq!(d4.rays.len(), 2);
        assert!(d4.rays.iter().all(|r| r.orbit_size == 4));
        assert!(principal_critical_orbits(&catalog::z2_inversion(2)).unwrap().rays.is_empty());
        let v = principal_critical_orbits(&catalog::z2xz2()).unwrap();
        assert_eq!(v.rays.len(), 2);
        let s3 = principal_critical_orbits(&catalog::symmetric_perm(3)).unwrap();
        // (1,1,1) and -(1,1,1) are different orbits
        assert_eq!(s3.rays.len(), 2);
    }
}
