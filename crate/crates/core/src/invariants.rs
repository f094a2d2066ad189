//! Invariant theory of a finite linear action: Molien series, a minimal
//! integrity basis, relations among its elements, rewriting invariants in the
//! basis, and the P-matrix of gradient scalar products.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::FiniteGroupRep;
use crate::linalg::{QMatrix, SparseEchelon, SparseVec};
use crate::poly::{reynolds, Monomial, Polynomial, VarKind};
use crate::rational::{q, Q};

/// Dimensions `c_d` of the degree-`d` invariant subspaces, `d = 0..=cap`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MolienSeries {
    coefficients: Vec<usize>,
}

impl MolienSeries {
    pub fn coefficients(&self) -> &[usize] {
        &self.coefficients
    }

    pub fn get(&self, d: usize) -> usize {
        self.coefficients[d]
    }

    pub fn degree_cap(&self) -> usize {
        self.coefficients.len() - 1
    }
}

/// `(1/|G|) Σ_g 1/det(I − t T_g)`, expanded as a power series. Elements with
/// equal characteristic polynomials share one expansion.
pub fn molien_series(rep: &FiniteGroupRep, degree_cap: usize) -> MolienSeries {
    let mut classes: BTreeMap<Vec<Q>, usize> = BTreeMap::new();
    for g in rep.elements() {
        *classes.entry(g.matrix().reversed_charpoly()).or_default() += 1;
    }
    let mut acc = vec![Q::zero(); degree_cap + 1];
    for (c, mult) in &classes {
        // 1 / (1 + c1 t + … + cn t^n)
        let mut a = vec![Q::zero(); degree_cap + 1];
        a[0] = Q::one();
        for d in 1..=degree_cap {
            let mut s = Q::zero();
            for i in 1..c.len().min(d + 1) {
                s -= &c[i] * &a[d - i];
            }
            a[d] = s;
        }
        let m = q(*mult as i64);
        for d in 0..=degree_cap {
            acc[d] += &a[d] * &m;
        }
    }
    let order = q(rep.order() as i64);
    let coefficients = acc
        .into_iter()
        .map(|v| {
            let v = v / &order;
            assert!(v.is_integer() && !v.is_negative(), "Molien coefficient {v} is not a count");
            v.to_integer().to_usize().expect("Molien coefficient fits usize")
        })
        .collect();
    MolienSeries { coefficients }
}

pub(crate) fn to_sparse(p: &Polynomial) -> SparseVec<Monomial> {
    p.terms().map(|(m, c)| (m.clone(), c.clone())).collect()
}

pub(crate) fn from_sparse(kind: VarKind, nvars: usize, v: &SparseVec<Monomial>) -> Polynomial {
    Polynomial::from_terms(kind, nvars, v.iter().map(|(m, c)| (m.clone(), c.clone())))
}

/// Echelon of the degree-`d` invariant space built from Reynolds images of
/// monomials, stopping once `target` independent images are found.
fn invariant_echelon(rep: &FiniteGroupRep, d: usize, target: Option<usize>) -> Result<SparseEchelon<Monomial>> {
    let n = rep.dim();
    let mut ech = SparseEchelon::new();
    for m in Monomial::all_of_degree(n, d as u32) {
        if target.is_some_and(|t| ech.rank() >= t) {
            break;
        }
        let r = reynolds(rep, &Polynomial::monomial(VarKind::X, m, Q::one()))?;
        if !r.is_zero() {
            ech.insert(&to_sparse(&r));
        }
    }
    Ok(ech)
}

/// Basis of the degree-`d` invariants: the reduced echelon form of the span
/// of Reynolds images of all degree-`d` monomials, largest leading monomial
/// first. Each element has leading coefficient 1.
pub fn invariant_space_basis(rep: &FiniteGroupRep, d: usize) -> Result<Vec<Polynomial>> {
    let ech = invariant_echelon(rep, d, None)?;
    let n = rep.dim();
    Ok(ech
        .reduced_rows()
        .into_iter()
        .rev()
        .map(|(_, row)| from_sparse(VarKind::X, n, &row))
        .collect())
}

/// x-space images of J-monomials, built by multiplying cached smaller products.
#[derive(Debug, Clone)]
pub(crate) struct JImages {
    basis: Vec<Polynomial>,
    cache: HashMap<Monomial, Polynomial>,
}

impl JImages {
    pub(crate) fn new(basis: &[Polynomial]) -> Self {
        JImages {
            basis: basis.to_vec(),
            cache: HashMap::new(),
        }
    }

    pub(crate) fn image(&mut self, m: &Monomial) -> Polynomial {
        if let Some(p) = self.cache.get(m) {
            return p.clone();
        }
        let n = self.basis[0].nvars();
        let p = match m.0.iter().position(|&e| e > 0) {
            None => Polynomial::one(VarKind::X, n),
            Some(i) => {
                let mut rest = m.clone();
                rest.0[i] -= 1;
                let r = self.image(&rest);
                &r * &self.basis[i]
            }
        };
        self.cache.insert(m.clone(), p.clone());
        p
    }
}

/// A minimal integrity basis `J_1..J_k` with its relations of the first kind.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrityBasis {
    dim: usize,
    basis: Vec<Polynomial>,
    degrees: Vec<usize>,
    relations: Vec<Polynomial>,
    relation_cap: usize,
    complete: bool,
}

impl IntegrityBasis {
    /// Wraps given invariants without checking minimality; relations are
    /// computed up to `relation_cap`.
    pub fn from_parts(basis: Vec<Polynomial>, relation_cap: usize) -> Result<Self> {
        let Some(first) = basis.first() else {
            return Err(Error::InvalidGroup("empty integrity basis".into()));
        };
        let dim = first.nvars();
        let mut degrees = Vec::new();
        for b in &basis {
            if b.kind() != VarKind::X || b.nvars() != dim || b.is_zero() || !b.is_homogeneous() {
                return Err(Error::KindMismatch);
            }
            degrees.push(b.degree().unwrap_or(0) as usize);
        }
        let mut out = IntegrityBasis {
            dim,
            basis,
            degrees,
            relations: Vec::new(),
            relation_cap: 0,
            complete: false,
        };
        out.relations = find_relations(&out, relation_cap);
        out.relation_cap = relation_cap;
        Ok(out)
    }

    /// Reassembles a basis saved earlier, relations included, without
    /// recomputing anything but the shape checks.
    pub fn restore(basis: Vec<Polynomial>, relations: Vec<Polynomial>, relation_cap: usize, complete: bool) -> Result<Self> {
        let mut out = Self::from_parts(basis, 0)?;
        let k = out.len();
        if relations.iter().any(|r| r.kind() != VarKind::J || r.nvars() != k) {
            return Err(Error::KindMismatch);
        }
        out.relations = relations;
        out.relation_cap = relation_cap;
        out.complete = complete;
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn relations(&self) -> &[Polynomial] {
        &self.relations
    }

    /// x-degree up to which relations were searched.
    pub fn relation_cap(&self) -> usize {
        self.relation_cap
    }

    /// Whether generation of the whole invariant ring was certified (by the
    /// degree-product criterion or by reaching the order of the group).
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// Recomputes relations up to a new cap.
    pub fn with_relation_cap(mut self, cap: usize) -> Self {
        self.relations = find_relations(&self, cap);
        self.relation_cap = cap;
        self
    }

    /// `Ψ(J_1(x), …, J_k(x))`.
    pub fn substitute(&self, psi: &Polynomial) -> Result<Polynomial> {
        if psi.kind() != VarKind::J || psi.nvars() != self.len() {
            return Err(Error::KindMismatch);
        }
        psi.substitute(&self.basis)
    }

    /// Number of independent products of basis elements of x-degree `d`.
    pub fn product_rank(&self, d: usize) -> usize {
        let mut images = JImages::new(&self.basis);
        let mut ech = SparseEchelon::new();
        for m in Monomial::all_of_weighted_degree(&self.degrees, d) {
            ech.insert(&to_sparse(&images.image(&m)));
        }
        ech.rank()
    }

    pub fn to_float(&self) -> Vec<crate::poly::FloatPoly> {
        self.basis.iter().map(Polynomial::to_float).collect()
    }
}

fn distinct_vars(m: &Monomial) -> usize {
    m.0.iter().filter(|&&e| e > 0).count()
}

/// Jacobian determinant of `basis` is nonzero somewhere among a few fixed
/// integer points. A `false` answer only means no witness was found.
fn jacobian_nonzero(basis: &[Polynomial]) -> bool {
    let n = basis[0].nvars();
    if basis.len() != n {
        return false;
    }
    let grads: Vec<Vec<Polynomial>> = basis.iter().map(Polynomial::gradient).collect();
    const PRIMES: [i64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    (0..4).any(|shift| {
        let point: Vec<Q> = (0..n).map(|i| q(PRIMES[(i * 3 + shift) % 12] * if i % 2 == 0 { 1 } else { -1 } + shift as i64)).collect();
        let rows: Vec<Vec<Q>> = grads
            .iter()
            .map(|g| g.iter().map(|p| p.eval_q(&point).expect("arity")).collect())
            .collect();
        !QMatrix::from_rows(rows).determinant().is_zero()
    })
}

/// Minimal integrity basis by degree-wise complement of products of lower
/// generators in the invariant space.
///
/// At each degree the new generators are the reduced echelon rows of the
/// invariant space whose leading monomials are not leading monomials of the
/// product span, taken largest-first and then stably sorted by the number of
/// distinct variables in the leading monomial. The search stops early when
/// `n` algebraically independent generators have degrees multiplying to
/// `|G|`, which is enough for them to generate every invariant.
///
/// `degree_cap` defaults to `|G|`. A smaller cap is checked against the
/// Molien series on the degrees between the cap and `|G|` that the search
/// skipped; a shortfall is `CapTooLow`.
pub fn compute_mib(rep: &FiniteGroupRep, degree_cap: Option<usize>) -> Result<IntegrityBasis> {
    let order = rep.order();
    let cap = degree_cap.unwrap_or(order).max(1);
    let n = rep.dim();
    let horizon = cap.max(order.min(2 * cap));
    let molien = molien_series(rep, horizon);
    let mut basis: Vec<Polynomial> = Vec::new();
    let mut degrees: Vec<usize> = Vec::new();
    let mut complete = false;
    for d in 1..=cap {
        let c = molien.get(d);
        if c == 0 {
            continue;
        }
        let mut products = SparseEchelon::new();
        if !basis.is_empty() {
            let mut images = JImages::new(&basis);
            for m in Monomial::all_of_weighted_degree(&degrees, d) {
                if products.rank() >= c {
                    break;
                }
                products.insert(&to_sparse(&images.image(&m)));
            }
        }
        if products.rank() < c {
            let inv = invariant_echelon(rep, d, Some(c))?;
            let product_leads: BTreeSet<Monomial> = products.pivots().cloned().collect();
            let mut fresh: Vec<Polynomial> = inv
                .reduced_rows()
                .into_iter()
                .rev()
                .filter(|(lead, _)| !product_leads.contains(lead))
                .map(|(_, row)| from_sparse(VarKind::X, n, &row))
                .collect();
            fresh.sort_by_key(|p| distinct_vars(p.leading().expect("nonzero").0));
            for p in fresh {
                basis.push(p);
                degrees.push(d);
            }
        }
        if basis.len() == n && degrees.iter().product::<usize>() == order && jacobian_nonzero(&basis) {
            complete = true;
            break;
        }
    }
    if basis.is_empty() {
        return Err(Error::CapTooLow { cap, degree: cap + 1 });
    }
    if !complete {
        if cap >= order {
            complete = true;
        } else {
            let probe = IntegrityBasis {
                dim: n,
                basis: basis.clone(),
                degrees: degrees.clone(),
                relations: Vec::new(),
                relation_cap: 0,
                complete: false,
            };
            for d in cap + 1..=horizon {
                if probe.product_rank(d) < molien.get(d) {
                    return Err(Error::CapTooLow { cap, degree: d });
                }
            }
        }
    }
    let relation_cap = 2 * degrees.iter().copied().max().unwrap_or(1);
    let mut out = IntegrityBasis {
        dim: n,
        basis,
        degrees,
        relations: Vec::new(),
        relation_cap,
        complete,
    };
    out.relations = find_relations(&out, relation_cap);
    Ok(out)
}

fn dense_kernel(cols: &[Polynomial]) -> Vec<Vec<Q>> {
    let rows: BTreeSet<Monomial> = cols.iter().flat_map(|p| p.terms().map(|(m, _)| m.clone())).collect();
    if rows.is_empty() {
        return QMatrix::identity(cols.len()).to_rows();
    }
    let mut mat = QMatrix::zeros(rows.len(), cols.len());
    for (i, m) in rows.iter().enumerate() {
        for (j, p) in cols.iter().enumerate() {
            mat[(i, j)] = p.coeff(m);
        }
    }
    mat.nullspace()
}

/// Relations of the first kind up to x-degree `cap`: a minimal generating set
/// of the kernel of substitution, degree by degree. At each degree the kernel
/// is reduced modulo multiples of lower relations and the remaining reduced
/// echelon rows (leading coefficient 1) are returned.
pub fn find_relations(basis: &IntegrityBasis, cap: usize) -> Vec<Polynomial> {
    let k = basis.len();
    let mut images = JImages::new(&basis.basis);
    let mut found: Vec<(usize, Polynomial)> = Vec::new();
    for d in 1..=cap {
        let mons = Monomial::all_of_weighted_degree(&basis.degrees, d);
        if mons.len() < 2 {
            continue;
        }
        let cols: Vec<Polynomial> = mons.iter().map(|m| images.image(m)).collect();
        let kernel = dense_kernel(&cols);
        if kernel.is_empty() {
            continue;
        }
        let mut kech = SparseEchelon::new();
        for v in &kernel {
            let sv: SparseVec<Monomial> = mons
                .iter()
                .zip(v)
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect();
            kech.insert(&sv);
        }
        let mut ideal = SparseEchelon::new();
        for (dr, r) in &found {
            for m in Monomial::all_of_weighted_degree(&basis.degrees, d - dr) {
                let prod = r * &Polynomial::monomial(VarKind::J, m, Q::one());
                ideal.insert(&to_sparse(&prod));
            }
        }
        if ideal.rank() == kech.rank() {
            continue;
        }
        let leads: BTreeSet<Monomial> = ideal.pivots().cloned().collect();
        for (lead, row) in kech.reduced_rows().into_iter().rev() {
            if !leads.contains(&lead) {
                found.push((d, from_sparse(VarKind::J, k, &row)));
            }
        }
    }
    found.into_iter().map(|(_, r)| r).collect()
}

/// True when no relation was found up to the relation cap ("coregular up to
/// that degree").
pub fn is_coregular(basis: &IntegrityBasis) -> bool {
    basis.relations.is_empty()
}

/// Invariant under every generator, hence under the group.
pub fn is_invariant(rep: &FiniteGroupRep, p: &Polynomial) -> Result<bool> {
    for &g in rep.generators() {
        if &p.act(rep.element(g))? != p {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Writes an invariant as a polynomial in the basis. Each x-homogeneous part
/// is solved separately over the J-monomials of that degree, ordered from the
/// smallest up, with free unknowns set to zero; the result therefore prefers
/// small J-monomials when relations make the answer non-unique.
pub fn express_in_basis(rep: &FiniteGroupRep, basis: &IntegrityBasis, p: &Polynomial) -> Result<Polynomial> {
    if p.kind() != VarKind::X || p.nvars() != basis.dim {
        return Err(Error::KindMismatch);
    }
    if !is_invariant(rep, p)? {
        return Err(Error::NotInvariant);
    }
    let mut images = JImages::new(&basis.basis);
    express_with(&mut images, basis, p)
}

pub(crate) fn express_with(images: &mut JImages, basis: &IntegrityBasis, p: &Polynomial) -> Result<Polynomial> {
    let k = basis.len();
    let mut out = Polynomial::zero(VarKind::J, k);
    let degrees: BTreeSet<u32> = p.terms().map(|(m, _)| m.degree()).collect();
    for d in degrees {
        let part = p.homogeneous_component(d);
        let mut mons = Monomial::all_of_weighted_degree(&basis.degrees, d as usize);
        mons.reverse();
        if mons.is_empty() {
            return Err(Error::NotExpressible { degree: d as usize });
        }
        let cols: Vec<Polynomial> = mons.iter().map(|m| images.image(m)).collect();
        let rows: BTreeSet<Monomial> = cols
            .iter()
            .chain(std::iter::once(&part))
            .flat_map(|c| c.terms().map(|(m, _)| m.clone()))
            .collect();
        let nc = cols.len();
        let mut mat = QMatrix::zeros(rows.len(), nc + 1);
        for (i, m) in rows.iter().enumerate() {
            for (j, c) in cols.iter().enumerate() {
                mat[(i, j)] = c.coeff(m);
            }
            mat[(i, nc)] = part.coeff(m);
        }
        let (r, pivots) = mat.rref();
        if pivots.last() == Some(&nc) {
            return Err(Error::NotExpressible { degree: d as usize });
        }
        for (row, &col) in pivots.iter().enumerate() {
            out.add_term(mons[col].clone(), r[(row, nc)].clone());
        }
    }
    Ok(out)
}

/// `P_ih = Σ_ab η̃_ab ∂_a J_i ∂_b J_h`, written in the basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PMatrix {
    entries: Vec<Vec<Polynomial>>,
}

impl PMatrix {
    pub fn from_entries(entries: Vec<Vec<Polynomial>>) -> Self {
        PMatrix { entries }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, h: usize) -> &Polynomial {
        &self.entries[i][h]
    }

    pub fn entries(&self) -> &[Vec<Polynomial>] {
        &self.entries
    }

    pub fn eval_f64(&self, j: &[f64]) -> Vec<Vec<f64>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|p| p.to_float().eval(j)).collect())
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        let k = self.size();
        (0..k).all(|i| (0..k).all(|h| self.entries[i][h] == self.entries[h][i]))
    }
}

/// `Σ_ab η̃_ab ∂_a f ∂_b g` as an x-space polynomial.
pub fn metric_contraction(eta_inv: &QMatrix, f: &Polynomial, g: &Polynomial) -> Polynomial {
    let n = f.nvars();
    let gf = f.gradient();
    let gg = g.gradient();
    let mut acc = Polynomial::zero(VarKind::X, n);
    for a in 0..n {
        for b in 0..n {
            let e = &eta_inv[(a, b)];
            if e.is_zero() || gf[a].is_zero() || gg[b].is_zero() {
                continue;
            }
            acc = &acc + &(&gf[a] * &gg[b]).scale(e);
        }
    }
    acc
}

pub fn p_matrix(rep: &FiniteGroupRep, basis: &IntegrityBasis) -> Result<PMatrix> {
    let eta_inv = rep.invariant_metric().inverse();
    let k = basis.len();
    let mut images = JImages::new(&basis.basis);
    let mut entries = vec![vec![Polynomial::zero(VarKind::J, k); k]; k];
    for i in 0..k {
        for h in i..k {
            let x = metric_contraction(&eta_inv, &basis.basis[i], &basis.basis[h]);
            let e = express_with(&mut images, basis, &x)?;
            entries[h][i] = e.clone();
            entries[i][h] = e;
        }
    }
    Ok(PMatrix { entries })
}

/// `(J_1(x), …, J_k(x))` exactly.
pub fn orbit_map(basis: &IntegrityBasis, x: &[Q]) -> Result<Vec<Q>> {
    basis.basis.iter().map(|j| j.eval_q(x)).collect()
}

pub fn orbit_map_f64(basis: &IntegrityBasis, x: &[f64]) -> Result<Vec<f64>> {
    basis.basis.iter().map(|j| j.eval_f64(x)).collect()
}

/// Symmetric eigenvalues of `P(J(x))`, ascending.
pub fn p_eigenvalues(p: &PMatrix, j: &[f64]) -> Vec<f64> {
    let m = p.eval_f64(j);
    let k = m.len();
    let mat = nalgebra::DMatrix::from_fn(k, k, |i, h| m[i][h]);
    let mut ev: Vec<f64> = mat.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::catalog;
    use crate::rational::q_frac;

    fn xp(s: &str, n: usize) -> Polynomial {
        Polynomial::parse(s, VarKind::X, n).unwrap()
    }

    fn jp(s: &str, k: usize) -> Polynomial {
        Polynomial::parse(s, VarKind::J, k).unwrap()
    }

    /// Independent count: common fixed space of the generators acting on the
    /// coefficient vectors of degree-d polynomials.
    fn fixed_point_dimension(rep: &FiniteGroupRep, d: usize) -> usize {
        let n = rep.dim();
        let mons = Monomial::all_of_degree(n, d as u32);
        let idx: BTreeMap<Monomial, usize> = mons.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut rows = Vec::new();
        for &g in rep.generators() {
            let mut a = QMatrix::zeros(mons.len(), mons.len());
            for (j, m) in mons.iter().enumerate() {
                let img = Polynomial::monomial(VarKind::X, m.clone(), Q::one()).act(rep.element(g)).unwrap();
                for (mm, c) in img.terms() {
                    a[(idx[mm], j)] += c;
                }
                a[(j, j)] -= Q::one();
            }
            rows.extend(a.to_rows());
        }
        if rows.is_empty() {
            return mons.len();
        }
        QMatrix::from_rows(rows).nullspace().len()
    }

    #[test]
    fn molien_examples() {
        assert_eq!(molien_series(&catalog::z2_inversion(2), 4).coefficients(), &[1, 0, 3, 0, 5]);
        assert_eq!(molien_series(&catalog::d4(), 4).coefficients(), &[1, 0, 1, 0, 2]);
        let t = molien_series(&catalog::trivial(3), 6);
        for d in 0..=6 {
            assert_eq!(t.get(d), (d + 1) * (d + 2) / 2);
        }
    }

    #[test]
    fn molien_matches_fixed_point_oracle() {
        for name in ["z2", "z2-r2", "z2xz2", "z4", "d4", "s3"] {
            let rep = catalog::by_name(name).unwrap();
            let m = molien_series(&rep, 6);
            for d in 0..=6 {
                assert_eq!(m.get(d), fixed_point_dimension(&rep, d), "{name} d={d}");
                assert_eq!(invariant_space_basis(&rep, d).unwrap().len(), m.get(d), "{name} d={d}");
            }
        }
    }

    #[test]
    fn invariant_space_examples() {
        let z2 = catalog::z2_inversion(2);
        let b = invariant_space_basis(&z2, 2).unwrap();
        assert_eq!(b, vec![xp("x1^2", 2), xp("x1 x2", 2), xp("x2^2", 2)]);
        assert_eq!(invariant_space_basis(&catalog::d4(), 2).unwrap(), vec![xp("x1^2 + x2^2", 2)]);
        assert_eq!(invariant_space_basis(&catalog::d4(), 0).unwrap(), vec![xp("1", 2)]);
    }

    #[test]
    fn mib_z2_footnote() {
        let b = compute_mib(&catalog::z2_inversion(2), None).unwrap();
        assert_eq!(b.degrees(), &[2, 2, 2]);
        assert_eq!(b.basis(), &[xp("x1^2", 2), xp("x2^2", 2), xp("x1 x2", 2)]);
        assert_eq!(b.relations(), &[jp("J1 J2 - J3^2", 3)]);
        assert!(!is_coregular(&b));
        assert!(b.is_complete());
    }

    #[test]
    fn mib_degrees() {
        let cases: [(&str, &[usize]); 6] = [
            ("d4", &[2, 4]),
            ("s3", &[1, 2, 3]),
            ("z4", &[2, 4, 4]),
            ("z2xz2", &[2, 2]),
            ("s4", &[1, 2, 3, 4]),
            ("z2", &[2]),
        ];
        for (name, deg) in cases {
            let rep = catalog::by_name(name).unwrap();
            let b = compute_mib(&rep, None).unwrap();
            assert_eq!(b.degrees(), deg, "{name}");
            for j in b.basis() {
                assert!(is_invariant(&rep, j).unwrap());
                assert!(j.is_homogeneous());
            }
        }
    }

    #[test]
    fn mib_d4_and_z4_bases() {
        let d4 = compute_mib(&catalog::d4(), None).unwrap();
        assert_eq!(d4.basis(), &[xp("x1^2 + x2^2", 2), xp("x1^2 x2^2", 2)]);
        assert!(is_coregular(&d4));
        let z4 = compute_mib(&catalog::z4(), None).unwrap();
        assert_eq!(z4.basis()[1], xp("x1^3 x2 - x1 x2^3", 2));
        assert_eq!(z4.basis()[2], xp("x1^2 x2^2", 2));
        assert_eq!(z4.relations().len(), 1);
        let r = &z4.relations()[0];
        assert_eq!(r.weighted_degrees(z4.degrees()), vec![8]);
        assert!(z4.substitute(r).unwrap().is_zero());
        // J2² = J1² J3 − 4 J3² by direct expansion of (x²y)²(x² − y²)²
        assert_eq!(r, &jp("J1^2 J3 - J2^2 - 4 J3^2", 3));
    }

    #[test]
    fn cap_too_low() {
        assert!(matches!(
            compute_mib(&catalog::d4(), Some(2)),
            Err(Error::CapTooLow { cap: 2, degree: 4 })
        ));
    }

    #[test]
    fn express_examples() {
        let z2 = catalog::z2_inversion(1);
        let b = compute_mib(&z2, None).unwrap();
        assert_eq!(express_in_basis(&z2, &b, &xp("x1^4", 1)).unwrap(), jp("J1^2", 1));

        let d4 = catalog::d4();
        let b = compute_mib(&d4, None).unwrap();
        assert_eq!(express_in_basis(&d4, &b, &xp("x1^4 + x2^4", 2)).unwrap(), jp("J1^2 - 2 J2", 2));
        assert_eq!(express_in_basis(&d4, &b, &xp("x1^3", 2)), Err(Error::NotInvariant));

        let z2 = catalog::z2_inversion(2);
        let b = compute_mib(&z2, None).unwrap();
        let p = xp("x1^3 x2", 2);
        let psi = express_in_basis(&z2, &b, &p).unwrap();
        assert_eq!(b.substitute(&psi).unwrap(), p);
    }

    #[test]
    fn p_matrix_examples() {
        let z2 = catalog::z2_inversion(1);
        let b = compute_mib(&z2, None).unwrap();
        let p = p_matrix(&z2, &b).unwrap();
        assert_eq!(p.entry(0, 0), &jp("4 J1", 1));

        let v = catalog::z2xz2();
        let b = compute_mib(&v, None).unwrap();
        let p = p_matrix(&v, &b).unwrap();
        assert_eq!(p.entry(0, 0), &jp("4 J1", 2));
        assert!(p.entry(0, 1).is_zero());
        assert_eq!(p.entry(1, 1), &jp("4 J2", 2));

        let d4 = catalog::d4();
        let b = compute_mib(&d4, None).unwrap();
        let p = p_matrix(&d4, &b).unwrap();
        assert_eq!(p.entry(0, 0), &jp("4 J1", 2));
        assert_eq!(p.entry(0, 1), &jp("8 J2", 2));
        // |∇(x²y²)|² = 4x²y⁴ + 4x⁴y² = 4 J1 J2
        assert_eq!(p.entry(1, 1), &jp("4 J1 J2", 2));
    }

    #[test]
    fn p_matrix_identity_non_orthogonal() {
        let s = QMatrix::from_rows(vec![vec![q(1), q(0)], vec![q(0), q(2)]]);
        let rep = catalog::conjugated(&catalog::d4(), &s);
        let b = compute_mib(&rep, None).unwrap();
        let p = p_matrix(&rep, &b).unwrap();
        let eta_inv = rep.invariant_metric().inverse();
        for i in 0..b.len() {
            for h in 0..b.len() {
                let lhs = b.substitute(p.entry(i, h)).unwrap();
                assert_eq!(lhs, metric_contraction(&eta_inv, &b.basis()[i], &b.basis()[h]));
            }
        }
        assert!(p.is_symmetric());
    }

    #[test]
    fn orbit_map_examples() {
        let z2 = catalog::z2_inversion(2);
        let b = compute_mib(&z2, None).unwrap();
        assert_eq!(orbit_map(&b, &[q(1), q(2)]).unwrap(), vec![q(1), q(4), q(2)]);
        assert_eq!(orbit_map(&b, &[q(-1), q(-2)]).unwrap(), vec![q(1), q(4), q(2)]);
        let d4 = catalog::d4();
        let b = compute_mib(&d4, None).unwrap();
        assert_eq!(orbit_map(&b, &[q(1), q(0)]).unwrap(), orbit_map(&b, &[q(0), q(-1)]).unwrap());
        assert_eq!(orbit_map(&b, &[q_frac(1, 1), q(0)]).unwrap(), vec![q(1), q(0)]);
    }

    #[test]
    fn coregular_trivial_line() {
        let b = compute_mib(&catalog::trivial(1), None).unwrap();
        assert_eq!(b.basis(), &[xp("x1", 1)]);
        assert!(is_coregular(&b));
    }
}
