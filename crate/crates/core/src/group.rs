//! Finite groups given by exact rational matrices.
//!
//! A [`FiniteGroupRep`] is built by closing a generator set under products.
//! Elements are addressed by index; index 0 is always the identity. All
//! comparisons are exact.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::rational::{format_q, parse_q, Q};

pub const DEFAULT_MAX_ORDER: usize = 10_000;
pub const DEFAULT_SUBGROUP_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    matrix: QMatrix,
}

impl GroupElement {
    pub fn new(matrix: QMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        if matrix.determinant().is_zero() {
            return Err(Error::NonInvertibleGenerator { index: 0 });
        }
        Ok(GroupElement { matrix })
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, x: &[Q]) -> Vec<Q> {
        self.matrix.mul_vec(x)
    }

    pub fn apply_f64(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| crate::rational::to_f64(&self.matrix[(i, j)]) * x[j])
                    .sum()
            })
            .collect()
    }
}

/// Index set of group elements closed under product and inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subgroup {
    members: Vec<usize>,
}

impl Subgroup {
    /// Wraps a sorted, deduplicated index list without checking closure.
    fn from_sorted(members: Vec<usize>) -> Self {
        Subgroup { members }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&i| other.contains(i))
    }
}

/// A finite matrix group with its multiplication table.
#[derive(Debug, Clone)]
pub struct FiniteGroupRep {
    dim: usize,
    elements: Vec<GroupElement>,
    cayley: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    generators: Vec<usize>,
}

impl FiniteGroupRep {
    /// Smallest matrix group containing `generators`, with element 0 the
    /// identity, then the generators, then breadth-first products.
    pub fn close(generators: &[QMatrix], max_order: usize) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(Error::InvalidGroup("no generators".into()));
        };
        let n = first.nrows();
        for (index, g) in generators.iter().enumerate() {
            if !g.is_square() || g.nrows() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: g.nrows(),
                });
            }
            if g.determinant().is_zero() {
                return Err(Error::NonInvertibleGenerator { index });
            }
        }
        let mut elements = vec![QMatrix::identity(n)];
        let mut index: HashMap<QMatrix, usize> = HashMap::new();
        index.insert(elements[0].clone(), 0);
        let mut gen_idx = Vec::new();
        for g in generators {
            let i = *index.entry(g.clone()).or_insert_with(|| {
                elements.push(g.clone());
                elements.len() - 1
            });
            gen_idx.push(i);
        }
        if elements.len() > max_order {
            return Err(Error::OrderCapExceeded { cap: max_order });
        }
        let mut queue: VecDeque<usize> = (0..elements.len()).collect();
        while let Some(i) = queue.pop_front() {
            for &gi in &gen_idx {
                let prod = elements[i].mul(&elements[gi]);
                if !index.contains_key(&prod) {
                    if elements.len() >= max_order {
                        return Err(Error::OrderCapExceeded { cap: max_order });
                    }
                    index.insert(prod.clone(), elements.len());
                    elements.push(prod);
                    queue.push_back(elements.len() - 1);
                }
            }
        }
        let order = elements.len();
        let mut cayley = vec![vec![0usize; order]; order];
        for i in 0..order {
            for j in 0..order {
                let prod = elements[i].mul(&elements[j]);
                cayley[i][j] = *index
                    .get(&prod)
                    .ok_or_else(|| Error::InvalidGroup("closure is not a group".into()))?;
            }
        }
        let inverse: Vec<usize> = (0..order)
            .map(|i| cayley[i].iter().position(|&k| k == 0).expect("finite group element has an inverse"))
            .collect();
        let mut dedup = BTreeSet::new();
        gen_idx.retain(|g| dedup.insert(*g));
        Ok(FiniteGroupRep {
            dim: n,
            elements: elements.into_iter().map(|matrix| GroupElement { matrix }).collect(),
            cayley,
            inverse,
            generators: gen_idx,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &GroupElement {
        &self.elements[i]
    }

    /// Indices of the (deduplicated) generators.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn product(&self, i: usize, j: usize) -> usize {
        self.cayley[i][j]
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn cayley(&self) -> &[Vec<usize>] {
        &self.cayley
    }

    pub fn full(&self) -> Subgroup {
        Subgroup::from_sorted((0..self.order()).collect())
    }

    pub fn trivial(&self) -> Subgroup {
        Subgroup::from_sorted(vec![0])
    }

    /// Checks every table axiom: identity, inverses, associativity, and that
    /// each table entry is the exact matrix product.
    pub fn verify_tables(&self) -> bool {
        let n = self.order();
        for i in 0..n {
            if self.cayley[i][0] != i || self.cayley[0][i] != i || self.cayley[i][self.inverse[i]] != 0 {
                return false;
            }
            for j in 0..n {
                if self.elements[i].matrix.mul(&self.elements[j].matrix) != self.elements[self.cayley[i][j]].matrix {
                    return false;
                }
                for k in 0..n {
                    if self.cayley[self.cayley[i][j]][k] != self.cayley[i][self.cayley[j][k]] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Checks closure and returns the index set as a subgroup.
    pub fn subgroup(&self, indices: &[usize]) -> Result<Subgroup> {
        let set: BTreeSet<usize> = indices.iter().copied().collect();
        if !set.contains(&0) || set.iter().any(|&i| i >= self.order()) {
            return Err(Error::NotASubgroup);
        }
        for &a in &set {
            if !set.contains(&self.inverse[a]) {
                return Err(Error::NotASubgroup);
            }
            for &b in &set {
                if !set.contains(&self.cayley[a][b]) {
                    return Err(Error::NotASubgroup);
                }
            }
        }
        Ok(Subgroup::from_sorted(set.into_iter().collect()))
    }

    /// Subgroup generated by the given elements.
    pub fn generated_by(&self, gens: &[usize]) -> Subgroup {
        let mut inside = vec![false; self.order()];
        inside[0] = true;
        let mut members = vec![0usize];
        let mut queue: VecDeque<usize> = VecDeque::from([0]);
        while let Some(a) = queue.pop_front() {
            for &g in gens {
                let p = self.cayley[a][g];
                if !inside[p] {
                    inside[p] = true;
                    members.push(p);
                    queue.push_back(p);
                }
            }
        }
        members.sort_unstable();
        Subgroup::from_sorted(members)
    }

    fn check_point(&self, x: &[Q]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// The G-orbit of a rational point, deduplicated, in element order.
    pub fn orbit(&self, x: &[Q]) -> Result<Vec<Vec<Q>>> {
        self.check_point(x)?;
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for g in &self.elements {
            let y = g.apply(x);
            if seen.insert(y.clone()) {
                out.push(y);
            }
        }
        Ok(out)
    }

    /// `{g : T_g x = x}`, exactly.
    pub fn isotropy_subgroup(&self, x: &[Q]) -> Result<Subgroup> {
        self.check_point(x)?;
        let members = (0..self.order())
            .filter(|&i| self.elements[i].apply(x) == x)
            .collect();
        Ok(Subgroup::from_sorted(members))
    }

    /// `g H g⁻¹`.
    pub fn conjugate_subgroup(&self, h: &Subgroup, g: usize) -> Result<Subgroup> {
        if g >= self.order() {
            return Err(Error::InvalidGroup(format!("element index {g} out of range")));
        }
        self.subgroup(h.members())?;
        let gi = self.inverse[g];
        let mut members: Vec<usize> = h
            .members
            .iter()
            .map(|&a| self.cayley[self.cayley[g][a]][gi])
            .collect();
        members.sort_unstable();
        Ok(Subgroup::from_sorted(members))
    }

    pub fn is_normal(&self, h: &Subgroup) -> bool {
        (0..self.order()).all(|g| self.conjugate_subgroup(h, g).is_ok_and(|c| &c == h))
    }

    /// Every subgroup exactly once, ordered by (order, member list). Starts
    /// from the cyclic subgroups and closes under pairwise joins until no new
    /// subgroup appears; `cap` bounds the number of join closures computed.
    pub fn all_subgroups(&self, cap: usize) -> Result<Vec<Subgroup>> {
        let mut found: BTreeSet<Subgroup> = BTreeSet::new();
        for g in 0..self.order() {
            found.insert(self.generated_by(&[g]));
        }
        let mut closures = 0usize;
        let mut frontier: Vec<Subgroup> = found.iter().cloned().collect();
        let mut tried: BTreeSet<(Subgroup, Subgroup)> = BTreeSet::new();
        while !frontier.is_empty() {
            let current: Vec<Subgroup> = found.iter().cloned().collect();
            let mut next = Vec::new();
            for a in &frontier {
                for b in &current {
                    if a.is_subset_of(b) || b.is_subset_of(a) {
                        continue;
                    }
                    let key = if a < b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
                    if !tried.insert(key) {
                        continue;
                    }
                    closures += 1;
                    if closures > cap {
                        return Err(Error::SubgroupCapExceeded { cap });
                    }
                    let gens: Vec<usize> = a.members.iter().chain(&b.members).copied().collect();
                    let j = self.generated_by(&gens);
                    if !found.contains(&j) {
                        found.insert(j.clone());
                        next.push(j);
                    }
                }
            }
            frontier = next;
        }
        let mut out: Vec<Subgroup> = found.into_iter().collect();
        out.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.members.cmp(&b.members)));
        Ok(out)
    }

    /// Exact basis of `Fix(H) = {x : T_h x = x ∀ h ∈ H}`.
    pub fn fixed_subspace(&self, h: &Subgroup) -> Vec<Vec<Q>> {
        let n = self.dim;
        let mut rows = Vec::new();
        for &i in h.members() {
            if i == 0 {
                continue;
            }
            let d = self.elements[i].matrix.sub(&QMatrix::identity(n));
            rows.extend(d.to_rows());
        }
        if rows.is_empty() {
            return QMatrix::identity(n).to_rows();
        }
        QMatrix::from_rows(rows).nullspace()
    }

    /// `η = (1/|G|) Σ_g T_gᵀ T_g`.
    pub fn invariant_metric(&self) -> InvariantMetric {
        let n = self.dim;
        let mut acc = QMatrix::zeros(n, n);
        for g in &self.elements {
            acc = acc.add(&g.matrix.transpose().mul(&g.matrix));
        }
        let eta = acc.scale(&Q::from_integer((self.order() as i64).into()).recip());
        InvariantMetric { eta }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantMetric {
    eta: QMatrix,
}

impl InvariantMetric {
    pub fn eta(&self) -> &QMatrix {
        &self.eta
    }

    /// `η⁻¹`, the metric on covectors used to raise gradients.
    pub fn inverse(&self) -> QMatrix {
        self.eta.inverse().expect("averaged metric is positive definite")
    }

    pub fn is_invariant_under(&self, rep: &FiniteGroupRep) -> bool {
        rep.elements()
            .iter()
            .all(|g| g.matrix.transpose().mul(&self.eta).mul(&g.matrix) == self.eta)
    }

    pub fn is_identity(&self) -> bool {
        self.eta == QMatrix::identity(self.eta.nrows())
    }
}

/// On-disk group description: `{ "dim": n, "generators": [...], "name": ... }`
/// with entries written as `"p/q"` strings or integers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub dim: usize,
    pub generators: Vec<Vec<Vec<serde_json::Value>>>,
    #[serde(default)]
    pub name: String,
}

impl GroupSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            what: "group spec".into(),
            message: e.to_string(),
        })
    }

    pub fn from_matrices(name: &str, generators: &[QMatrix]) -> Self {
        let dim = generators.first().map_or(0, QMatrix::nrows);
        GroupSpec {
            dim,
            name: name.to_string(),
            generators: generators
                .iter()
                .map(|g| {
                    g.to_rows()
                        .iter()
                        .map(|r| {
                            r.iter()
                                .map(|x| serde_json::Value::from(format_q(x)))
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("group spec serializes")
    }

    pub fn matrices(&self) -> Result<Vec<QMatrix>> {
        let entry = |v: &serde_json::Value| -> Result<Q> {
            match v {
                serde_json::Value::String(s) => parse_q(s),
                serde_json::Value::Number(n) if n.is_i64() => Ok(Q::from_integer(n.as_i64().unwrap().into())),
                other => Err(Error::Parse {
                    what: "matrix entry".into(),
                    message: format!("{other} (expected integer or \"p/q\" string)"),
                }),
            }
        };
        self.generators
            .iter()
            .map(|g| {
                if g.len() != self.dim || g.iter().any(|r| r.len() != self.dim) {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim,
                        found: g.len(),
                    });
                }
                let rows = g
                    .iter()
                    .map(|r| r.iter().map(entry).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                Ok(QMatrix::from_rows(rows))
            })
            .collect()
    }

    pub fn build(&self, max_order: usize) -> Result<FiniteGroupRep> {
        FiniteGroupRep::close(&self.matrices()?, max_order)
    }
}

/// Ready-made representations used throughout the examples and tests.
pub mod catalog {
    use super::*;

    fn close(gens: &[QMatrix]) -> FiniteGroupRep {
        FiniteGroupRep::close(gens, DEFAULT_MAX_ORDER).expect("catalog groups are finite")
    }

    /// `{1}` acting on `R^n`.
    pub fn trivial(n: usize) -> FiniteGroupRep {
        close(&[QMatrix::identity(n)])
    }

    /// `x ↦ −x` on `R^n`.
    pub fn z2_inversion(n: usize) -> FiniteGroupRep {
        close(&[QMatrix::identity(n).scale(&Q::from_integer((-1).into()))])
    }

    /// Independent sign flips of the two coordinates of `R²`.
    pub fn z2xz2() -> FiniteGroupRep {
        close(&[
            QMatrix::from_i64(&[&[-1, 0], &[0, 1]]),
            QMatrix::from_i64(&[&[1, 0], &[0, -1]]),
        ])
    }

    /// Rotation by a quarter turn.
    pub fn z4() -> FiniteGroupRep {
        close(&[QMatrix::from_i64(&[&[0, -1], &[1, 0]])])
    }

    /// Symmetries of the square: quarter turn and the mirror `y ↦ −y`.
    pub fn d4() -> FiniteGroupRep {
        close(&[
            QMatrix::from_i64(&[&[0, -1], &[1, 0]]),
            QMatrix::from_i64(&[&[1, 0], &[0, -1]]),
        ])
    }

    /// Coordinate permutations of `R^n`.
    pub fn symmetric_perm(n: usize) -> FiniteGroupRep {
        let mut gens = Vec::new();
        for i in 0..n.saturating_sub(1) {
            let mut m = QMatrix::identity(n);
            m[(i, i)] = Q::zero();
            m[(i + 1, i + 1)] = Q::zero();
            m[(i, i + 1)] = Q::from_integer(1.into());
            m[(i + 1, i)] = Q::from_integer(1.into());
            gens.push(m);
        }
        if gens.is_empty() {
            gens.push(QMatrix::identity(n));
        }
        close(&gens)
    }

    /// `S⁻¹ G S` for a representation given by generators.
    pub fn conjugated(rep: &FiniteGroupRep, s: &QMatrix) -> FiniteGroupRep {
        let si = s.inverse().expect("invertible conjugator");
        let gens: Vec<QMatrix> = rep
            .generators()
            .iter()
            .map(|&g| si.mul(rep.element(g).matrix()).mul(s))
            .collect();
        close(&gens)
    }

    pub fn by_name(name: &str) -> Option<FiniteGroupRep> {
        Some(match name {
            "z2" => z2_inversion(1),
            "z2-r2" => z2_inversion(2),
            "z2xz2" => z2xz2(),
            "z4" => z4(),
            "d4" => d4(),
            "s3" => symmetric_perm(3),
            "s4" => symmetric_perm(4),
            _ => return None,
        })
    }

    pub fn names() -> &'static [&'static str] {
        &["z2", "z2-r2", "z2xz2", "z4", "d4", "s3", "s4"]
    }

    pub fn spec(name: &str) -> Option<GroupSpec> {
        let rep = by_name(name)?;
        let gens: Vec<QMatrix> = rep.generators().iter().map(|&g| rep.element(g).matrix().clone()).collect();
        Some(GroupSpec::from_matrices(name, &gens))
    }
}

/// Maps each element index to the class of conjugate subgroups containing `h`.
pub fn conjugacy_class(rep: &FiniteGroupRep, h: &Subgroup) -> BTreeSet<Subgroup> {
    (0..rep.order())
        .map(|g| rep.conjugate_subgroup(h, g).expect("h is a subgroup"))
        .collect()
}

/// Number of elements of each order, for reports.
pub fn element_order_profile(rep: &FiniteGroupRep) -> BTreeMap<usize, usize> {
    let mut out = BTreeMap::new();
    for g in 0..rep.order() {
        *out.entry(rep.generated_by(&[g]).order()).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::catalog::*;
    use super::*;
    use crate::rational::{q, q_frac};

    fn pt(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q(x)).collect()
    }

    /// Brute-force closure oracle: repeatedly multiply every pair until stable.
    fn brute_closure(gens: &[QMatrix]) -> BTreeSet<QMatrix> {
        let mut set: BTreeSet<QMatrix> = gens.iter().cloned().collect();
        set.insert(QMatrix::identity(gens[0].nrows()));
        loop {
            let cur: Vec<QMatrix> = set.iter().cloned().collect();
            let before = set.len();
            for a in &cur {
                for b in &cur {
                    set.insert(a.mul(b));
                }
            }
            if set.len() == before {
                return set;
            }
        }
    }

    #[test]
    fn close_generators_examples() {
        let z2 = z2_inversion(2);
        assert_eq!(z2.order(), 2);
        let gens = [
            QMatrix::from_i64(&[&[0, -1], &[1, 0]]),
            QMatrix::from_i64(&[&[1, 0], &[0, -1]]),
        ];
        assert_eq!(brute_closure(&gens).len(), 8);
        let d4 = FiniteGroupRep::close(&gens, 100).unwrap();
        assert_eq!(d4.order(), 8);
        assert!(d4.verify_tables());
        assert_eq!(d4.element(0).matrix(), &QMatrix::identity(2));
        let r = FiniteGroupRep::close(&[QMatrix::from_i64(&[&[2, 0], &[0, 1]])], 50);
        assert_eq!(r.unwrap_err(), Error::OrderCapExceeded { cap: 50 });
        let singular = FiniteGroupRep::close(&[QMatrix::from_i64(&[&[1, 0], &[0, 0]])], 50);
        assert_eq!(singular.unwrap_err(), Error::NonInvertibleGenerator { index: 0 });
    }

    #[test]
    fn invariant_metric_examples() {
        assert!(d4().invariant_metric().is_identity());
        assert!(trivial(3).invariant_metric().is_identity());
        let s = QMatrix::from_rows(vec![vec![q(1), q(0)], vec![q(0), q(2)]]);
        let conj = conjugated(&d4(), &s);
        let metric = conj.invariant_metric();
        assert!(!metric.is_identity());
        assert!(metric.is_invariant_under(&conj));
        // by hand: Sᵀ·avg(Tᵀ diag(1, 1/4) T)·S = Sᵀ (5/8) S for orthogonal D4
        let expected = QMatrix::from_rows(vec![vec![q_frac(5, 8), q(0)], vec![q(0), q_frac(5, 2)]]);
        assert_eq!(metric.eta(), &expected);
    }

    #[test]
    fn orbit_examples() {
        assert_eq!(z2_inversion(2).orbit(&pt(&[1, 2])).unwrap(), vec![pt(&[1, 2]), pt(&[-1, -2])]);
        let orb = d4().orbit(&pt(&[1, 0])).unwrap();
        let set: BTreeSet<_> = orb.into_iter().collect();
        let expected: BTreeSet<_> = [pt(&[1, 0]), pt(&[-1, 0]), pt(&[0, 1]), pt(&[0, -1])].into_iter().collect();
        assert_eq!(set, expected);
        assert_eq!(d4().orbit(&pt(&[0, 0])).unwrap().len(), 1);
        assert!(d4().orbit(&pt(&[1])).is_err());
    }

    #[test]
    fn isotropy_examples() {
        let g = d4();
        let h = g.isotropy_subgroup(&pt(&[1, 0])).unwrap();
        assert_eq!(h.order(), 2);
        let mirror = g.elements().iter().position(|e| e.matrix() == &QMatrix::from_i64(&[&[1, 0], &[0, -1]])).unwrap();
        assert!(h.contains(mirror));
        assert_eq!(g.isotropy_subgroup(&pt(&[0, 0])).unwrap(), g.full());
        assert_eq!(z2_inversion(2).isotropy_subgroup(&pt(&[1, 2])).unwrap(), z2_inversion(2).trivial());
    }

    #[test]
    fn conjugate_examples() {
        let g = d4();
        let h = g.isotropy_subgroup(&pt(&[1, 0])).unwrap();
        assert_eq!(g.conjugate_subgroup(&h, 0).unwrap(), h);
        let rot = g.elements().iter().position(|e| e.matrix() == &QMatrix::from_i64(&[&[0, -1], &[1, 0]])).unwrap();
        let other = g.conjugate_subgroup(&h, rot).unwrap();
        assert_eq!(other, g.isotropy_subgroup(&pt(&[0, 1])).unwrap());
        assert_ne!(other, h);
        let minus = g.elements().iter().position(|e| e.matrix() == &QMatrix::from_i64(&[&[-1, 0], &[0, -1]])).unwrap();
        let center = g.subgroup(&[0, minus]).unwrap();
        for k in 0..g.order() {
            assert_eq!(g.conjugate_subgroup(&center, k).unwrap(), center);
        }
        assert!(g.is_normal(&center));
        let bogus = Subgroup::from_sorted(vec![0, rot]);
        assert_eq!(g.conjugate_subgroup(&bogus, 1), Err(Error::NotASubgroup));
    }

    /// Oracle: every subset closed under the table, by exhaustive search.
    fn brute_subgroup_count(rep: &FiniteGroupRep) -> usize {
        let n = rep.order();
        assert!(n <= 12);
        (0u32..(1 << n))
            .filter(|mask| {
                mask & 1 == 1
                    && (0..n).all(|a| {
                        mask >> a & 1 == 0 || (0..n).all(|b| mask >> b & 1 == 0 || mask >> rep.product(a, b) & 1 == 1)
                    })
            })
            .count()
    }

    #[test]
    fn all_subgroups_examples() {
        let z2 = z2_inversion(2);
        assert_eq!(z2.all_subgroups(DEFAULT_SUBGROUP_CAP).unwrap().len(), 2);
        let d4 = d4();
        let subs = d4.all_subgroups(DEFAULT_SUBGROUP_CAP).unwrap();
        assert_eq!(brute_subgroup_count(&d4), 10);
        assert_eq!(subs.len(), 10);
        let s3 = symmetric_perm(3);
        assert_eq!(brute_subgroup_count(&s3), 6);
        assert_eq!(s3.all_subgroups(DEFAULT_SUBGROUP_CAP).unwrap().len(), 6);
        for h in &subs {
            assert!(d4.subgroup(h.members()).is_ok());
            assert_eq!(d4.order() % h.order(), 0);
        }
        assert_eq!(symmetric_perm(4).all_subgroups(DEFAULT_SUBGROUP_CAP).unwrap().len(), 30);
        assert_eq!(
            symmetric_perm(4).all_subgroups(3),
            Err(Error::SubgroupCapExceeded { cap: 3 })
        );
    }

    #[test]
    fn fixed_subspace_examples() {
        let g = d4();
        assert_eq!(g.fixed_subspace(&g.trivial()).len(), 2);
        let h = g.isotropy_subgroup(&pt(&[1, 0])).unwrap();
        let fix = g.fixed_subspace(&h);
        assert_eq!(fix.len(), 1);
        assert!(Zero::is_zero(&fix[0][1]) && !Zero::is_zero(&fix[0][0]));
        let z2 = z2_inversion(2);
        assert!(z2.fixed_subspace(&z2.full()).is_empty());
    }

    #[test]
    fn group_spec_round_trip() {
        let spec = catalog::spec("d4").unwrap();
        let parsed = GroupSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(parsed.build(100).unwrap().order(), 8);
        let text = r#"{"dim": 1, "generators": [[["-1"]]], "name": "z2"}"#;
        assert_eq!(GroupSpec::from_json(text).unwrap().build(10).unwrap().order(), 2);
        let frac = r#"{"dim": 1, "generators": [[["1/2"]]]}"#;
        assert!(matches!(
            GroupSpec::from_json(frac).unwrap().build(10),
            Err(Error::OrderCapExceeded { .. })
        ));
        assert!(GroupSpec::from_json(r#"{"dim": 1, "generators": [[[1.5]]]}"#).unwrap().matrices().is_err());
    }
}
