//! Reduction of Landau polynomials by Poincaré changes of coordinates
//! `x = y + η̃∇H(y)` generated by invariant functions `H(J(y))`.
//!
//! Everything is indexed by x-degree. A generator of x-degree `t` shifts a
//! term of x-degree `s` by `(∂Ψ/∂J_a) P_ab (∂H/∂J_b)` at x-degree
//! `s + t − 2` to first order; [`reduce`] solves that linear equation for the
//! generator and then applies the change exactly by formal composition up to
//! the truncation degree.
//!
//! Coefficients are [`RatFn`]s in the model parameters. A solve is accepted
//! only when every solved coefficient is regular: its denominator does not
//! vanish when the critical parameters go to zero. A division by a critical
//! factor is therefore only ever taken when it cancels exactly.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::FiniteGroupRep;
use crate::invariants::{p_matrix, IntegrityBasis, JImages, PMatrix};
use crate::landau::{CoeffKind, LandauModel, Param, Potential};
use crate::linalg::QMatrix;
use crate::poly::{FloatPoly, Monomial, Poly, Polynomial, Ring, VarKind};
use crate::ratfn::RatFn;
use crate::rational::{from_f64, Q};

pub type RPoly = Poly<RatFn>;

/// `δJ_a = Σ_b P_ab ∂H/∂J_b`.
pub fn delta_j<C: Ring>(h: &Poly<C>, p: &PMatrix) -> Vec<Poly<C>> {
    let k = p.size();
    let dh = h.gradient();
    (0..k)
        .map(|a| {
            let mut acc = Poly::zero(VarKind::J, k);
            for (b, dhb) in dh.iter().enumerate() {
                if dhb.is_zero() || p.entry(a, b).is_zero() {
                    continue;
                }
                acc = &acc + &(&p.entry(a, b).lift::<C>() * dhb);
            }
            acc
        })
        .collect()
}

/// First-order change of `psi` under the generator `h`:
/// `Σ_ab (∂Ψ/∂J_a) P_ab (∂H/∂J_b)`.
pub fn homological_image<C: Ring>(psi: &Poly<C>, h: &Poly<C>, p: &PMatrix) -> Poly<C> {
    let k = p.size();
    let dpsi = psi.gradient();
    let mut acc = Poly::zero(VarKind::J, k);
    for (dp, dj) in dpsi.iter().zip(delta_j(h, p)) {
        if dp.is_zero() || dj.is_zero() {
            continue;
        }
        acc = &acc + &(dp * &dj);
    }
    acc
}

/// `U_i = Σ_s (∂Ψ/∂J_s) P_si`.
pub fn u_functions<C: Ring>(psi: &Poly<C>, p: &PMatrix) -> Vec<Poly<C>> {
    let k = p.size();
    let dpsi = psi.gradient();
    (0..k)
        .map(|i| {
            let mut acc = Poly::zero(VarKind::J, k);
            for (s, dp) in dpsi.iter().enumerate() {
                if dp.is_zero() || p.entry(s, i).is_zero() {
                    continue;
                }
                acc = &acc + &(dp * &p.entry(s, i).lift::<RatFn>().map_coeffs(|c| C::from_q(&const_of(c))));
            }
            acc
        })
        .collect()
}

fn const_of(c: &RatFn) -> Q {
    c.as_constant().expect("P-matrix entries are rational")
}

/// A Landau polynomial with coefficients that are rational functions of named
/// parameters, each parameter labelled critical or generic.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedPotential {
    params: Vec<Param>,
    degrees: Vec<usize>,
    psi: RPoly,
}

impl GradedPotential {
    pub fn new(params: Vec<Param>, degrees: Vec<usize>, psi: RPoly) -> Result<Self> {
        if psi.kind() != VarKind::J || psi.nvars() != degrees.len() {
            return Err(Error::KindMismatch);
        }
        Ok(GradedPotential { params, degrees, psi })
    }

    pub fn from_model(model: &LandauModel) -> Self {
        let np = model.params().len();
        let k = model.basis().len();
        let psi = RPoly::from_terms(
            VarKind::J,
            k,
            model.terms().iter().map(|(m, a)| {
                let mut num = Polynomial::constant(VarKind::Param, np, a.constant.clone());
                for (i, c) in &a.linear {
                    num.add_term(Monomial::var(np, *i), c.clone());
                }
                (m.clone(), RatFn::from_poly(num))
            }),
        );
        GradedPotential {
            params: model.params().to_vec(),
            degrees: model.basis().degrees().to_vec(),
            psi,
        }
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    pub fn param_names(&self) -> Vec<String> {
        self.params.iter().map(|p| p.name.clone()).collect()
    }

    pub fn critical_mask(&self) -> Vec<bool> {
        self.params.iter().map(|p| p.kind == CoeffKind::Critical).collect()
    }

    pub fn basis_degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn psi(&self) -> &RPoly {
        &self.psi
    }

    pub fn x_degree(&self, m: &Monomial) -> usize {
        m.weighted_degree(&self.degrees)
    }

    /// `Ψ_d`: the J-monomials of x-degree `d`.
    pub fn component(&self, d: usize) -> RPoly {
        self.psi.weighted_component(&self.degrees, d)
    }

    pub fn components(&self) -> BTreeMap<usize, RPoly> {
        let ds: BTreeSet<usize> = self.psi.weighted_degrees(&self.degrees).into_iter().collect();
        ds.into_iter().map(|d| (d, self.component(d))).collect()
    }

    pub fn coefficient(&self, m: &Monomial) -> RatFn {
        self.psi.coeff(m)
    }

    pub fn truncated(&self, t: usize) -> Self {
        let psi = RPoly::from_terms(
            VarKind::J,
            self.degrees.len(),
            self.psi
                .terms()
                .filter(|(m, _)| m.weighted_degree(&self.degrees) <= t)
                .map(|(m, c)| (m.clone(), c.clone())),
        );
        GradedPotential { psi, ..self.clone() }
    }

    fn with_psi(&self, psi: RPoly) -> Self {
        GradedPotential { psi, ..self.clone() }
    }

    /// Numeric `Ψ` at a parameter point.
    pub fn eval(&self, lambda: &[f64]) -> FloatPoly {
        FloatPoly::from_terms(
            self.degrees.len(),
            self.psi.terms().map(|(m, c)| (m.0.clone(), c.eval(lambda))).collect(),
        )
    }

    /// Exact `Ψ` at a rational parameter point; `None` on a pole.
    pub fn eval_q(&self, lambda: &[Q]) -> Option<Polynomial> {
        let mut out = Polynomial::zero(VarKind::J, self.degrees.len());
        for (m, c) in self.psi.terms() {
            out.add_term(m.clone(), c.eval_q(lambda)?);
        }
        Some(out)
    }

    pub fn render_poly(&self, p: &RPoly) -> String {
        let names = self.param_names();
        p.fmt_with(&|i| format!("J{}", i + 1), &|c: &RatFn| c.sign_and_text(&names))
    }
}

impl fmt::Display for GradedPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_poly(&self.psi))
    }
}

/// One Poincaré change `x = y + η̃∇H(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoincareGenerator {
    /// x-degree of `H(J(x))`.
    pub degree: usize,
    pub h: RPoly,
}

/// Basis, P-matrix and metric shared by every reduction over one action.
#[derive(Debug, Clone)]
pub struct ReductionContext {
    basis: IntegrityBasis,
    pmatrix: PMatrix,
    eta_inv: QMatrix,
}

impl ReductionContext {
    pub fn new(rep: &FiniteGroupRep, basis: &IntegrityBasis) -> Result<Self> {
        Ok(ReductionContext {
            basis: basis.clone(),
            pmatrix: p_matrix(rep, basis)?,
            eta_inv: rep.invariant_metric().inverse(),
        })
    }

    pub fn basis(&self) -> &IntegrityBasis {
        &self.basis
    }

    pub fn pmatrix(&self) -> &PMatrix {
        &self.pmatrix
    }

    pub fn eta_inv(&self) -> &QMatrix {
        &self.eta_inv
    }
}

/// Solves `Σ_j c_j · image(J^{m_j}) = p` for one x-degree. The matrix is
/// rational, so the elimination is done once and replayed on parameter-valued
/// right-hand sides.
struct Expressor {
    jmons: Vec<Monomial>,
    rows: HashMap<Monomial, usize>,
    solve: Vec<(usize, Vec<(usize, Q)>)>,
    checks: Vec<Vec<(usize, Q)>>,
}

impl Expressor {
    fn new(images: &mut JImages, degrees: &[usize], d: usize) -> Self {
        let mut jmons = Monomial::all_of_weighted_degree(degrees, d);
        jmons.reverse();
        let cols: Vec<Polynomial> = jmons.iter().map(|m| images.image(m)).collect();
        let xmons: BTreeSet<Monomial> = cols.iter().flat_map(|c| c.terms().map(|(m, _)| m.clone())).collect();
        let rows: HashMap<Monomial, usize> = xmons.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let (nr, nc) = (rows.len(), jmons.len());
        let mut mat = QMatrix::zeros(nr, nc + nr);
        for (j, c) in cols.iter().enumerate() {
            for (m, v) in c.terms() {
                mat[(rows[m], j)] = v.clone();
            }
        }
        for i in 0..nr {
            mat[(i, nc + i)] = Q::from_integer(1.into());
        }
        let (r, pivots) = mat.rref();
        let rank = pivots.iter().filter(|&&p| p < nc).count();
        let comb = |i: usize| -> Vec<(usize, Q)> {
            (0..nr)
                .filter(|&x| !r[(i, nc + x)].is_zero())
                .map(|x| (x, r[(i, nc + x)].clone()))
                .collect()
        };
        let solve = (0..rank).map(|i| (pivots[i], comb(i))).collect();
        let checks = (rank..nr).map(comb).collect();
        Expressor {
            jmons,
            rows,
            solve,
            checks,
        }
    }

    fn apply(&self, part: &RPoly, d: usize) -> Result<Vec<(Monomial, RatFn)>> {
        let mut v: Vec<RatFn> = vec![RatFn::rzero(); self.rows.len()];
        for (m, c) in part.terms() {
            let i = *self.rows.get(m).ok_or(Error::NotExpressible { degree: d })?;
            v[i] = c.clone();
        }
        let combine = |comb: &[(usize, Q)]| {
            comb.iter()
                .filter(|(i, _)| !v[*i].is_zero())
                .fold(RatFn::rzero(), |acc, (i, q)| acc.radd(&v[*i].rmul(&RatFn::from_q(q))))
        };
        if self.checks.iter().any(|c| !combine(c).is_zero()) {
            return Err(Error::NotExpressible { degree: d });
        }
        Ok(self
            .solve
            .iter()
            .map(|(j, comb)| (self.jmons[*j].clone(), combine(comb)))
            .filter(|(_, c)| !c.is_zero())
            .collect())
    }
}

/// Exact composition `Ψ(J(y + η̃∇H(y)))` truncated at x-degree `trunc`,
/// re-expressed in the basis.
struct Composer<'a> {
    ctx: &'a ReductionContext,
    basis_r: Vec<RPoly>,
    images: JImages,
    expressors: BTreeMap<usize, Expressor>,
}

impl<'a> Composer<'a> {
    fn new(ctx: &'a ReductionContext) -> Self {
        Composer {
            ctx,
            basis_r: ctx.basis.basis().iter().map(|b| b.lift::<RatFn>()).collect(),
            images: JImages::new(ctx.basis.basis()),
            expressors: BTreeMap::new(),
        }
    }

    fn to_x(&self, p: &RPoly, trunc: Option<u32>) -> Result<RPoly> {
        p.substitute_truncated(&self.basis_r, trunc)
    }

    fn express(&mut self, px: &RPoly) -> Result<RPoly> {
        let k = self.ctx.basis.len();
        let mut out = RPoly::zero(VarKind::J, k);
        let ds: BTreeSet<u32> = px.terms().map(|(m, _)| m.degree()).collect();
        for d in ds {
            let part = px.homogeneous_component(d);
            let d = d as usize;
            if !self.expressors.contains_key(&d) {
                let e = Expressor::new(&mut self.images, self.ctx.basis.degrees(), d);
                self.expressors.insert(d, e);
            }
            for (m, c) in self.expressors[&d].apply(&part, d)? {
                out.add_term(m, c);
            }
        }
        Ok(out)
    }

    fn generator_field(&self, h: &RPoly) -> Result<Vec<RPoly>> {
        let hx = self.to_x(h, None)?;
        let grad = hx.gradient();
        let n = self.ctx.basis.dim();
        Ok((0..n)
            .map(|i| {
                let mut acc = RPoly::zero(VarKind::X, n);
                for (j, g) in grad.iter().enumerate() {
                    let e = &self.ctx.eta_inv[(i, j)];
                    if !e.is_zero() && !g.is_zero() {
                        acc = &acc + &g.scale(&RatFn::from_q(e));
                    }
                }
                acc
            })
            .collect())
    }

    fn compose(&mut self, psi: &RPoly, h: &RPoly, trunc: usize) -> Result<RPoly> {
        let t = Some(trunc as u32);
        let phi = self.to_x(psi, t)?;
        let n = self.ctx.basis.dim();
        let maps: Vec<RPoly> = self
            .generator_field(h)?
            .into_iter()
            .enumerate()
            .map(|(i, hi)| &RPoly::var(VarKind::X, n, i) + &hi)
            .collect();
        let composed = phi.substitute_truncated(&maps, t)?;
        self.express(&composed)
    }
}

/// Span of the first-order changes at one x-degree, echelonized with pivots
/// restricted to uniformly invertible coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct RemovableSpace {
    pub degree: usize,
    /// Echelon basis, each normalized to coefficient 1 at its pivot.
    pub basis: Vec<RPoly>,
    pub pivots: Vec<Monomial>,
    /// The coefficients inverted to normalize each basis element.
    pub divisors: Vec<RatFn>,
    /// Generators `J^m` whose image was independent but had no uniformly
    /// invertible coefficient.
    pub blocked: Vec<Monomial>,
}

impl RemovableSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains_monomial(&self, m: &Monomial) -> bool {
        self.pivots.contains(m)
    }
}

fn j_monomial(m: &Monomial) -> RPoly {
    RPoly::monomial(VarKind::J, m.clone(), RatFn::rone())
}

/// Degree-`degree` J-polynomials of the form `Σ_α Q_α U_α` with
/// `Q = ∇_J H`, for generators `H` of x-degree at least
/// `min_generator_degree`. Gradients are exactly the curl-free `Q`.
pub fn removable_terms(psi: &GradedPotential, degree: usize, p: &PMatrix, min_generator_degree: usize) -> RemovableSpace {
    let k = psi.degrees.len();
    let critical = psi.critical_mask();
    let mut rows: Vec<(Monomial, BTreeMap<Monomial, RatFn>)> = Vec::new();
    let mut out = RemovableSpace {
        degree,
        basis: Vec::new(),
        pivots: Vec::new(),
        divisors: Vec::new(),
        blocked: Vec::new(),
    };
    for t in min_generator_degree.max(1)..=degree {
        let mut gens = Monomial::all_of_weighted_degree(&psi.degrees, t);
        gens.reverse();
        for g in gens {
            let img = homological_image(&psi.psi, &j_monomial(&g), p).weighted_component(&psi.degrees, degree);
            let mut v: BTreeMap<Monomial, RatFn> = img.into_terms();
            for (pm, row) in &rows {
                let f = v.get(pm).cloned().unwrap_or_else(RatFn::rzero);
                if f.is_zero() {
                    continue;
                }
                sub_scaled(&mut v, row, &f);
            }
            if v.is_empty() {
                continue;
            }
            let pick = v.iter().rev().find(|(_, c)| c.is_invertible_uniformly(&critical)).map(|(m, c)| (m.clone(), c.clone()));
            match pick {
                Some((pm, c)) => {
                    let inv = c.inv();
                    let row: BTreeMap<Monomial, RatFn> = v.iter().map(|(m, x)| (m.clone(), x.rmul(&inv))).collect();
                    for (_, other) in rows.iter_mut() {
                        let f = other.get(&pm).cloned().unwrap_or_else(RatFn::rzero);
                        if !f.is_zero() {
                            sub_scaled(other, &row, &f);
                        }
                    }
                    rows.push((pm.clone(), row));
                    out.divisors.push(c);
                }
                None => out.blocked.push(g),
            }
        }
    }
    for (pm, row) in rows {
        out.pivots.push(pm);
        out.basis.push(RPoly::from_terms(VarKind::J, k, row));
    }
    out
}

fn sub_scaled<K: Ord + Clone>(v: &mut BTreeMap<K, RatFn>, row: &BTreeMap<K, RatFn>, f: &RatFn) {
    for (m, x) in row {
        let nv = v.get(m).cloned().unwrap_or_else(RatFn::rzero).rsub(&x.rmul(f));
        if nv.is_zero() {
            v.remove(m);
        } else {
            v.insert(m.clone(), nv);
        }
    }
}

/// One row of the homological system: the coefficient of `J^m` at x-degree
/// `degree` after the change.
struct SolveRow {
    key: (usize, Monomial),
    coeffs: BTreeMap<usize, RatFn>,
    rhs: RatFn,
}

struct Solution {
    values: Vec<RatFn>,
    pivots: Vec<(usize, Monomial)>,
    blocked: Vec<(usize, Monomial)>,
    violations: usize,
}

/// Forward elimination row by row. A row's pivot is the first column whose
/// normalized row (and right-hand side) is regular; rows without one are
/// left alone. Free unknowns are zero.
fn uniform_solve(rows: Vec<SolveRow>, ncols: usize, critical: &[bool]) -> Solution {
    let mut accepted: Vec<(usize, SolveRow)> = Vec::new();
    let mut blocked = Vec::new();
    for mut row in rows {
        for (pc, prow) in &accepted {
            let f = row.coeffs.get(pc).cloned().unwrap_or_else(RatFn::rzero);
            if f.is_zero() {
                continue;
            }
            sub_scaled(&mut row.coeffs, &prow.coeffs, &f);
            row.rhs = row.rhs.rsub(&prow.rhs.rmul(&f));
        }
        if row.coeffs.is_empty() {
            continue;
        }
        let pick = row.coeffs.iter().find_map(|(&j, c)| {
            let inv = c.inv();
            let rhs = row.rhs.rmul(&inv);
            let entries: BTreeMap<usize, RatFn> = row.coeffs.iter().map(|(&i, x)| (i, x.rmul(&inv))).collect();
            (rhs.is_regular(critical) && entries.values().all(|x| x.is_regular(critical))).then_some((j, entries, rhs))
        });
        match pick {
            Some((j, coeffs, rhs)) => accepted.push((
                j,
                SolveRow {
                    key: row.key,
                    coeffs,
                    rhs,
                },
            )),
            None => {
                if !row.rhs.is_zero() {
                    blocked.push(row.key);
                }
            }
        }
    }
    let mut values = vec![RatFn::rzero(); ncols];
    for (j, row) in accepted.iter().rev() {
        let mut v = row.rhs.clone();
        for (&i, c) in &row.coeffs {
            if i != *j && !values[i].is_zero() {
                v = v.rsub(&c.rmul(&values[i]));
            }
        }
        values[*j] = v;
    }
    let violations = values.iter().filter(|v| !v.is_regular(critical)).count();
    Solution {
        values,
        pivots: accepted.into_iter().map(|(_, r)| r.key).collect(),
        blocked,
        violations,
    }
}

/// What happened at one generator degree.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionStep {
    pub degree: usize,
    /// Terms targeted by the solve (nonzero before the step).
    pub targeted: Vec<(usize, Monomial)>,
    /// Nonzero terms the solve could only reach by a non-uniform division.
    pub blocked: Vec<(usize, Monomial)>,
    pub generator: Option<PoincareGenerator>,
    /// Components of x-degree below `degree` compared equal after the change.
    pub filtration_preserved: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionReport {
    pub original: GradedPotential,
    pub reduced: GradedPotential,
    pub generators: Vec<PoincareGenerator>,
    pub removed_terms: Vec<(usize, Monomial)>,
    /// Terms that stayed because removing them would divide by a critical
    /// coefficient.
    pub non_removable: Vec<(usize, Monomial)>,
    /// Nonzero terms of x-degree at least 3 in the reduced potential.
    pub survivors: Vec<(usize, Monomial)>,
    pub steps: Vec<ReductionStep>,
    /// Truncation order: the reduction is exact through this x-degree.
    pub residual_degree: usize,
    /// Solved coefficients that came out non-regular. Always zero unless the
    /// solver is broken.
    pub violations: usize,
}

impl ReductionReport {
    pub fn filtration_preserved(&self) -> bool {
        self.steps.iter().all(|s| s.filtration_preserved)
    }

    /// Structured text: generators, removed and surviving terms per degree.
    pub fn render(&self) -> String {
        let j = |m: &Monomial| {
            let s = RPoly::monomial(VarKind::J, m.clone(), RatFn::rone());
            self.reduced.render_poly(&s)
        };
        let list = |v: &[(usize, Monomial)]| -> String {
            let mut by: BTreeMap<usize, Vec<String>> = BTreeMap::new();
            for (d, m) in v {
                by.entry(*d).or_default().push(j(m));
            }
            if by.is_empty() {
                return "  (none)\n".into();
            }
            by.iter().map(|(d, ms)| format!("  degree {d}: {}\n", ms.join(", "))).collect()
        };
        let mut s = String::new();
        s.push_str(&format!("original: {}\n", self.original));
        s.push_str(&format!("reduced (exact through x-degree {}): {}\n", self.residual_degree, self.reduced));
        s.push_str("generators:\n");
        if self.generators.is_empty() {
            s.push_str("  (none)\n");
        }
        for g in &self.generators {
            s.push_str(&format!("  H_{} = {}\n", g.degree, self.reduced.render_poly(&g.h)));
        }
        s.push_str("removed terms:\n");
        s.push_str(&list(&self.removed_terms));
        s.push_str("surviving terms:\n");
        s.push_str(&list(&self.survivors));
        s.push_str("non-removable under the declared coefficient kinds:\n");
        s.push_str(&list(&self.non_removable));
        s.push_str(&format!(
            "filtration preserved: {}\nuniformity violations: {}\n",
            self.filtration_preserved(),
            self.violations
        ));
        s
    }
}

/// Removes, degree by degree from `t = 3`, every term reachable by a
/// uniformly solvable homological equation, applying each change exactly up
/// to x-degree `truncation`.
///
/// At generator degree `t` the unknowns are the coefficients of the
/// J-monomials of x-degree `t`; the rows are the J-monomial coefficients at
/// x-degrees `t..=truncation`, taken lowest degree first and in canonical
/// order within a degree.
pub fn reduce(psi: &GradedPotential, truncation: usize, ctx: &ReductionContext) -> Result<ReductionReport> {
    if psi.degrees != ctx.basis.degrees() {
        return Err(Error::KindMismatch);
    }
    if psi.components().keys().any(|&d| d < 2) {
        return Err(Error::InvalidModel("reduction needs a potential without terms below x-degree 2".into()));
    }
    let k = psi.degrees.len();
    let critical = psi.critical_mask();
    let p = &ctx.pmatrix;
    let mut composer = Composer::new(ctx);
    let mut cur = psi.truncated(truncation);
    let mut steps = Vec::new();
    let mut generators = Vec::new();
    let mut violations = 0;
    let mut targeted_all: BTreeSet<(usize, Monomial)> = BTreeSet::new();
    let mut blocked_all: BTreeSet<(usize, Monomial)> = BTreeSet::new();
    for t in 3..=truncation {
        let mut gens = Monomial::all_of_weighted_degree(&psi.degrees, t);
        gens.reverse();
        if gens.is_empty() {
            continue;
        }
        let images: Vec<RPoly> = gens.iter().map(|g| homological_image(&cur.psi, &j_monomial(g), p)).collect();
        let mut rows = Vec::new();
        for d in t..=truncation {
            for m in Monomial::all_of_weighted_degree(&psi.degrees, d) {
                let coeffs: BTreeMap<usize, RatFn> = images
                    .iter()
                    .enumerate()
                    .map(|(j, img)| (j, img.coeff(&m)))
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
                if coeffs.is_empty() {
                    continue;
                }
                rows.push(SolveRow {
                    key: (d, m.clone()),
                    coeffs,
                    rhs: cur.psi.coeff(&m).rneg(),
                });
            }
        }
        let present: BTreeSet<(usize, Monomial)> =
            rows.iter().filter(|r| !r.rhs.is_zero()).map(|r| r.key.clone()).collect();
        let sol = uniform_solve(rows, gens.len(), &critical);
        violations += sol.violations;
        let targeted: Vec<_> = sol.pivots.into_iter().filter(|k| present.contains(k)).collect();
        targeted_all.extend(targeted.iter().cloned());
        blocked_all.extend(sol.blocked.iter().cloned());
        let h = RPoly::from_terms(VarKind::J, k, gens.iter().cloned().zip(sol.values));
        if h.is_zero() {
            steps.push(ReductionStep {
                degree: t,
                targeted,
                blocked: sol.blocked,
                generator: None,
                filtration_preserved: true,
            });
            continue;
        }
        let next = cur.with_psi(composer.compose(&cur.psi, &h, truncation)?);
        let filtration_preserved = (0..t).all(|d| next.component(d) == cur.component(d));
        let g = PoincareGenerator { degree: t, h };
        generators.push(g.clone());
        steps.push(ReductionStep {
            degree: t,
            targeted,
            blocked: sol.blocked,
            generator: Some(g),
            filtration_preserved,
        });
        cur = next;
    }
    if violations > 0 {
        return Err(Error::SingularHomologicalSolve(format!("{violations} solved coefficients are not uniform in the parameters")));
    }
    let nonzero = |key: &(usize, Monomial)| !cur.psi.coeff(&key.1).is_zero();
    let removed_terms: Vec<_> = targeted_all.iter().filter(|key| !nonzero(key)).cloned().collect();
    let non_removable: Vec<_> = blocked_all
        .iter()
        .filter(|key| nonzero(key) && !removed_terms.contains(key))
        .cloned()
        .collect();
    let mut survivors: Vec<(usize, Monomial)> = cur
        .psi
        .terms()
        .map(|(m, _)| (cur.x_degree(m), m.clone()))
        .filter(|(d, _)| *d >= 3)
        .collect();
    survivors.sort();
    Ok(ReductionReport {
        original: psi.clone(),
        reduced: cur,
        generators,
        removed_terms,
        non_removable,
        survivors,
        steps,
        residual_degree: truncation,
        violations,
    })
}

/// Residuals of one `(λ, y)` pair at the scales.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualCase {
    pub lambda: Vec<f64>,
    pub point: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Least-squares slope of `log|r|` against `log s`; `None` when the
    /// residual is zero to rounding at every scale.
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub scales: Vec<f64>,
    pub required_slope: usize,
    pub cases: Vec<ResidualCase>,
}

impl VerificationReport {
    pub fn min_slope(&self) -> Option<f64> {
        self.cases.iter().filter_map(|c| c.slope).min_by(f64::total_cmp)
    }

    pub fn render(&self) -> String {
        let mut s = format!("verification (required slope {}):\n", self.required_slope);
        for c in &self.cases {
            let slope = c.slope.map_or("exact".to_string(), |v| format!("{v:.3}"));
            s.push_str(&format!(
                "  lambda {:?} point {:?}: slope {slope}, residuals [{}]\n",
                c.lambda,
                c.point,
                c.residuals.iter().map(|r| format!("{r:.3e}")).collect::<Vec<_>>().join(", ")
            ));
        }
        s
    }
}

pub const VERIFY_SCALES: [f64; 4] = [1.0, 0.5, 0.25, 0.125];

fn float_generator(ctx: &ReductionContext, g: &PoincareGenerator, lambda: &[f64]) -> Potential {
    let k = ctx.basis.len();
    Potential::new(
        &ctx.basis,
        FloatPoly::from_terms(k, g.h.terms().map(|(m, c)| (m.0.clone(), c.eval(lambda))).collect()),
    )
}

/// `x(y)`: the changes applied last-to-first, so that the first generator
/// acts on the original coordinates.
pub fn compose_changes(ctx: &ReductionContext, generators: &[PoincareGenerator], lambda: &[f64], y: &[f64]) -> Vec<f64> {
    let eta: Vec<Vec<f64>> = (0..ctx.basis.dim())
        .map(|i| (0..ctx.basis.dim()).map(|j| crate::rational::to_f64(&ctx.eta_inv[(i, j)])).collect())
        .collect();
    let mut z = y.to_vec();
    for g in generators.iter().rev() {
        let grad = float_generator(ctx, g, lambda).gradient(&z);
        z = z
            .iter()
            .enumerate()
            .map(|(i, zi)| zi + eta[i].iter().zip(&grad).map(|(e, g)| e * g).sum::<f64>())
            .collect();
    }
    z
}

fn fit_slope(scales: &[f64], residuals: &[f64], noise: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = scales
        .iter()
        .zip(residuals)
        .zip(noise)
        .filter(|((_, r), n)| r.abs() > **n)
        .map(|((s, r), _)| (s.ln(), r.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Some(num / den)
}

/// Evaluates `Φ_original(x(s·y)) − Ψ̂(J(s·y))` over the scales and requires a
/// log-log slope of at least `residual_degree + 1` for every `(λ, y)`.
/// Residuals within rounding of the potential's size count as zero.
pub fn verify_reduction(
    original: &GradedPotential,
    report: &ReductionReport,
    ctx: &ReductionContext,
    lambdas: &[Vec<f64>],
    points: &[Vec<f64>],
) -> Result<VerificationReport> {
    let required = report.residual_degree + 1;
    let pairs: Vec<(&Vec<f64>, &Vec<f64>)> = lambdas.iter().flat_map(|l| points.iter().map(move |p| (l, p))).collect();
    let eval_case = |lambda: &Vec<f64>, point: &Vec<f64>| -> Result<ResidualCase> {
        if point.len() != ctx.basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: ctx.basis.dim(),
                found: point.len(),
            });
        }
        let phi = Potential::new(&ctx.basis, original.eval(lambda));
        let psi_hat = Potential::new(&ctx.basis, report.reduced.eval(lambda));
        let mut residuals = Vec::new();
        let mut noise = Vec::new();
        for s in VERIFY_SCALES {
            let y: Vec<f64> = point.iter().map(|v| v * s).collect();
            let x = compose_changes(ctx, &report.generators, lambda, &y);
            let (a, b) = (phi.value(&x), psi_hat.value(&y));
            residuals.push(a - b);
            noise.push(1e-13 * (a.abs() + b.abs()));
        }
        let slope = fit_slope(&VERIFY_SCALES, &residuals, &noise);
        Ok(ResidualCase {
            lambda: lambda.clone(),
            point: point.clone(),
            residuals,
            slope,
        })
    };
    let cases: Vec<Result<ResidualCase>> = std::thread::scope(|scope| {
        let handles: Vec<_> = pairs.iter().map(|(l, p)| scope.spawn(move || eval_case(l, p))).collect();
        handles.into_iter().map(|h| h.join().expect("verification worker panicked")).collect()
    });
    let cases: Vec<ResidualCase> = cases.into_iter().collect::<Result<_>>()?;
    for c in &cases {
        if let Some(slope) = c.slope {
            if !slope.is_finite() || slope < required as f64 {
                return Err(Error::VerificationFailed {
                    lambda: c.lambda.clone(),
                    point: c.point.clone(),
                    slope,
                    required,
                });
            }
        }
    }
    Ok(VerificationReport {
        scales: VERIFY_SCALES.to_vec(),
        required_slope: required,
        cases,
    })
}

/// Exact `Ψ` at a float parameter point, via the binary value of each float.
pub fn exact_at(psi: &GradedPotential, lambda: &[f64]) -> Option<Polynomial> {
    let lq: Vec<Q> = lambda.iter().map(|v| from_f64(*v)).collect();
    psi.eval_q(&lq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::catalog;
    use crate::invariants::compute_mib;
    use crate::rational::q;

    fn setup(name: &str, text: &str, critical: &[&str]) -> (ReductionContext, GradedPotential, LandauModel) {
        let rep = catalog::by_name(name).unwrap();
        let basis = compute_mib(&rep, None).unwrap();
        let model = LandauModel::parse(&rep, &basis, text, critical).unwrap();
        let ctx = ReductionContext::new(&rep, &basis).unwrap();
        let g = GradedPotential::from_model(&model);
        (ctx, g, model)
    }

    fn jq(s: &str, k: usize) -> Polynomial {
        Polynomial::parse(s, VarKind::J, k).unwrap()
    }

    fn mono(e: &[u32]) -> Monomial {
        Monomial(e.to_vec())
    }

    #[test]
    fn delta_j_examples() {
        let (ctx, _, _) = setup("z2", "a*J1 + b*J1^2", &["a"]);
        assert_eq!(delta_j(&jq("J1^2", 1), ctx.pmatrix()), vec![jq("8 J1^2", 1)]);
        assert_eq!(delta_j(&jq("5", 1), ctx.pmatrix()), vec![jq("0", 1)]);
        let (ctx2, _, _) = setup("z2xz2", "a*J1 + b*J2", &["a"]);
        assert_eq!(delta_j(&jq("J1 J2", 2), ctx2.pmatrix()), vec![jq("4 J1 J2", 2), jq("4 J1 J2", 2)]);
    }

    #[test]
    fn homological_and_u_examples() {
        let (ctx, g, _) = setup("z2", "a*J1 + b*J1^2", &["a"]);
        let p = ctx.pmatrix();
        let a_term = g.component(2);
        let h3 = j_monomial(&mono(&[3]));
        assert_eq!(g.render_poly(&homological_image(&a_term, &h3, p)), "12 * a * J1^3");
        let h2 = j_monomial(&mono(&[2]));
        assert_eq!(g.render_poly(&homological_image(&a_term, &h2, p)), "8 * a * J1^2");
        let c = RPoly::constant(VarKind::J, 1, RatFn::from_q(&q(3)));
        assert!(homological_image(&c, &h2, p).is_zero());
        let u = u_functions(g.psi(), p);
        assert_eq!(g.render_poly(&u[0]), "8 * b * J1^2 + 4 * a * J1");
        let (ctx2, g2, _) = setup("z2xz2", "a*J1 + b*J2", &["a"]);
        let u2 = u_functions(g2.psi(), ctx2.pmatrix());
        assert_eq!(g2.render_poly(&u2[0]), "4 * a * J1");
        assert_eq!(g2.render_poly(&u2[1]), "4 * b * J2");
    }

    #[test]
    fn grading_law_by_substitution() {
        let (ctx, g, _) = setup("d4", "a*J1 + b*J1^2 + c*J2 + d*J1 J2", &["a"]);
        let basis_r: Vec<RPoly> = ctx.basis().basis().iter().map(|b| b.lift()).collect();
        for (s, comp) in g.components() {
            for t in [2usize, 4, 6] {
                for m in Monomial::all_of_weighted_degree(ctx.basis().degrees(), t) {
                    let img = homological_image(&comp, &j_monomial(&m), ctx.pmatrix());
                    if img.is_zero() {
                        continue;
                    }
                    let x = img.substitute(&basis_r).unwrap();
                    assert!(x.terms().all(|(mm, _)| mm.degree() as usize == s + t - 2));
                }
            }
        }
    }

    #[test]
    fn removable_examples() {
        let (ctx, g, _) = setup("z2", "a*J1 + b*J1^2", &["a"]);
        let r = removable_terms(&g, 6, ctx.pmatrix(), 3);
        assert!(r.contains_monomial(&mono(&[3])));
        let r = removable_terms(&g, 4, ctx.pmatrix(), 2);
        assert_eq!(r.pivots, vec![mono(&[2])]);
        let (ctx, g, _) = setup("z2", "a*J1 + b*J1^2", &["a", "b"]);
        for d in 2..=8 {
            assert_eq!(removable_terms(&g, d, ctx.pmatrix(), 2).dim(), 0, "degree {d}");
        }
    }

    #[test]
    fn z2_sextic_reduction() {
        let (ctx, g, _) = setup("z2", "a*J1 + b*J1^2 + c*J1^3", &["a"]);
        let rep = reduce(&g, 6, &ctx).unwrap();
        assert_eq!(rep.violations, 0);
        assert!(rep.filtration_preserved());
        assert!(rep.reduced.coefficient(&mono(&[3])).is_zero());
        assert_eq!(rep.reduced.to_string(), "(-1/2 * a c + b^2)/b * J1^2 + a * J1");
        assert_eq!(rep.generators.len(), 2);
        assert_eq!(rep.reduced.render_poly(&rep.generators[0].h), "-1/16 * c/b * J1^2");
        assert_eq!(rep.reduced.render_poly(&rep.generators[1].h), "-1/192 * c^2/b^2 * J1^3");
        assert_eq!(rep.removed_terms, vec![(6, mono(&[3]))]);
        let lambdas = vec![vec![-0.5, 1.0, 0.3], vec![0.2, 1.0, -0.4], vec![0.0, 1.0, 1.0], vec![-0.3, 1.0, 0.5]];
        let v = verify_reduction(&g, &rep, &ctx, &lambdas, &[vec![0.4], vec![-0.25]]).unwrap();
        assert!(v.min_slope().unwrap() >= 7.0, "{}", v.render());
    }

    #[test]
    fn fixed_point_and_zero_residual() {
        let (ctx, g, _) = setup("z2", "a*J1 + b*J1^2", &["a"]);
        let rep = reduce(&g, 6, &ctx).unwrap();
        assert!(rep.generators.is_empty());
        assert_eq!(rep.reduced, g);
        let v = verify_reduction(&g, &rep, &ctx, &[vec![0.3, 1.0]], &[vec![0.5]]).unwrap();
        assert!(v.cases.iter().all(|c| c.residuals.iter().all(|r| *r == 0.0)));
    }

    #[test]
    fn corrupted_generator_fails_verification() {
        let (ctx, g, _) = setup("z2", "a*J1 + b*J1^2 + c*J1^3", &["a"]);
        let mut rep = reduce(&g, 6, &ctx).unwrap();
        rep.generators[0].h = rep.generators[0].h.scale(&RatFn::from_q(&q(2)));
        let err = verify_reduction(&g, &rep, &ctx, &[vec![-0.5, 1.0, 0.3]], &[vec![0.4]]).unwrap_err();
        assert!(matches!(err, Error::VerificationFailed { required: 7, .. }), "{err:?}");
    }

    #[test]
    fn all_critical_removes_nothing() {
        let (ctx, g, _) = setup("z2", "a*J1 + b*J1^2 + c*J1^3", &["a", "b", "c"]);
        let rep = reduce(&g, 6, &ctx).unwrap();
        assert!(rep.generators.is_empty());
        assert!(rep.removed_terms.is_empty());
        assert_eq!(rep.violations, 0);
        assert_eq!(rep.non_removable, vec![(4, mono(&[2])), (6, mono(&[3]))]);
        assert_eq!(rep.reduced, g);
    }

    #[test]
    fn z2xz2_degree_six() {
        let text = "a*J1 + a*J2 + J1^2 + 2 J1 J2 + J2^2 + e*J1 J2 + c1*J1^3 + c2*J1^2 J2 + c3*J1 J2^2 + c4*J2^3";
        let (ctx, g, _) = setup("z2xz2", text, &["a"]);
        let rep = reduce(&g, 6, &ctx).unwrap();
        assert_eq!(rep.violations, 0);
        assert!(rep.filtration_preserved());
        let removable = removable_terms(&g, 6, ctx.pmatrix(), 3);
        // the third direction needs 1/(16 + 4e), which is not uniform in e
        assert_eq!(removable.dim(), 2);
        assert_eq!(removable.blocked[0], mono(&[1, 1]));
        let sextic = rep.reduced.component(6);
        assert_eq!(sextic.len(), 2, "{}", rep.render());
        assert_eq!(rep.survivors.iter().filter(|(d, _)| *d == 6).count(), 2);
        assert_eq!(rep.removed_terms.len(), 2, "{}", rep.render());
        let lambdas = vec![vec![-0.4, 0.3, 0.2, -0.1, 0.5, 0.7], vec![0.1, -0.2, 0.3, 0.4, -0.5, 0.2]];
        let v = verify_reduction(&g, &rep, &ctx, &lambdas, &[vec![0.3, -0.2], vec![0.1, 0.35]]).unwrap();
        assert!(v.min_slope().unwrap() >= 7.0, "{}", v.render());
    }

    #[test]
    fn intermediate_potentials_stay_invariant() {
        let rep_g = catalog::by_name("d4").unwrap();
        let basis = compute_mib(&rep_g, None).unwrap();
        let model = LandauModel::parse(&rep_g, &basis, "a*J1 + b*J1^2 + c*J2 + d*J1^3 + e*J1 J2", &["a"]).unwrap();
        let ctx = ReductionContext::new(&rep_g, &basis).unwrap();
        let g = GradedPotential::from_model(&model);
        let rep = reduce(&g, 6, &ctx).unwrap();
        assert!(rep.filtration_preserved());
        let basis_r: Vec<RPoly> = basis.basis().iter().map(|b| b.lift()).collect();
        let x = rep.reduced.psi().substitute(&basis_r).unwrap();
        for el in rep_g.elements() {
            assert_eq!(x.act_matrix(el.matrix()).unwrap(), x);
        }
        let v = verify_reduction(&g, &rep, &ctx, &[vec![-0.3, 1.0, 0.4, 0.2, -0.3]], &[vec![0.3, 0.1]]).unwrap();
        assert!(v.cases.iter().all(|c| c.slope.is_none_or(|s| s >= 7.0)), "{}", v.render());
    }
}
