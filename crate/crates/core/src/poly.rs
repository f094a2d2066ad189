//! Sparse multivariate polynomials with exact coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic (`x1 > x2 > …`). The canonical text form lists terms
//! from the largest monomial down, so basis choices made by pivoting on this
//! order are deterministic.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::rational::{format_q, parse_q, to_f64, Q};

/// Coefficient ring for [`Poly`].
pub trait Ring: Clone + PartialEq + fmt::Debug {
    fn rzero() -> Self;
    fn rone() -> Self;
    fn is_rzero(&self) -> bool;
    fn radd(&self, other: &Self) -> Self;
    fn rsub(&self, other: &Self) -> Self;
    fn rmul(&self, other: &Self) -> Self;
    fn rneg(&self) -> Self;
    fn from_q(q: &Q) -> Self;
}

impl Ring for Q {
    fn rzero() -> Self {
        Zero::zero()
    }
    fn rone() -> Self {
        One::one()
    }
    fn is_rzero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn radd(&self, other: &Self) -> Self {
        self + other
    }
    fn rsub(&self, other: &Self) -> Self {
        self - other
    }
    fn rmul(&self, other: &Self) -> Self {
        self * other
    }
    fn rneg(&self) -> Self {
        -self
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
}

/// Which space a polynomial's variables live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    /// Coordinates `x1..xn` of the representation space.
    X,
    /// Basic invariants `J1..Jk`.
    J,
    /// Control parameters (symbolic coefficients).
    Param,
}

impl VarKind {
    fn prefix(self) -> &'static str {
        match self {
            VarKind::X => "x",
            VarKind::J => "J",
            VarKind::Param => "p",
        }
    }
}

/// Exponent vector. Ordered graded-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Degree with variable `i` weighted by `weights[i]`.
    pub fn weighted_degree(&self, weights: &[usize]) -> usize {
        self.0
            .iter()
            .zip(weights)
            .map(|(&e, &w)| e as usize * w)
            .sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    /// All monomials of total degree `d` in `n` variables, largest first.
    pub fn all_of_degree(n: usize, d: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            let n = cur.len();
            if i + 1 == n {
                cur[i] = left;
                out.push(Monomial(cur.clone()));
                return;
            }
            for e in (0..=left).rev() {
                cur[i] = e;
                rec(i + 1, left - e, cur, out);
            }
            cur[i] = 0;
        }
        if n == 0 {
            if d == 0 {
                out.push(Monomial(vec![]));
            }
            return out;
        }
        rec(0, d, &mut cur, &mut out);
        out
    }

    /// All monomials whose weighted degree equals `d`, largest first.
    pub fn all_of_weighted_degree(weights: &[usize], d: usize) -> Vec<Monomial> {
        let k = weights.len();
        let mut out = Vec::new();
        let mut cur = vec![0u32; k];
        fn rec(i: usize, left: usize, w: &[usize], cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if i == w.len() {
                if left == 0 {
                    out.push(Monomial(cur.clone()));
                }
                return;
            }
            let max = left / w[i].max(1);
            for e in (0..=max).rev() {
                if w[i] == 0 && e > 0 {
                    continue;
                }
                cur[i] = e as u32;
                rec(i + 1, left - e * w[i], w, cur, out);
            }
            cur[i] = 0;
        }
        rec(0, d, weights, &mut cur, &mut out);
        out.sort_by(|a, b| b.cmp(a));
        if k == 0 && d == 0 {
            return vec![Monomial(vec![])];
        }
        out
    }

    fn fmt_factors(&self, names: &dyn Fn(usize) -> String) -> String {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    names(i)
                } else {
                    format!("{}^{}", names(i), e)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial over the ring `C`. No zero coefficients are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<C: Ring> {
    kind: VarKind,
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

/// Polynomial with exact rational coefficients.
pub type Polynomial = Poly<Q>;

impl<C: Ring> Poly<C> {
    pub fn zero(kind: VarKind, nvars: usize) -> Self {
        Poly {
            kind,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(kind: VarKind, nvars: usize, c: C) -> Self {
        Self::monomial(kind, Monomial::one(nvars), c)
    }

    pub fn one(kind: VarKind, nvars: usize) -> Self {
        Self::constant(kind, nvars, C::rone())
    }

    pub fn var(kind: VarKind, nvars: usize, i: usize) -> Self {
        Self::monomial(kind, Monomial::var(nvars, i), C::rone())
    }

    pub fn monomial(kind: VarKind, m: Monomial, c: C) -> Self {
        let nvars = m.nvars();
        let mut p = Self::zero(kind, nvars);
        if !c.is_rzero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(kind: VarKind, nvars: usize, terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero(kind, nvars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial arity");
            p.add_term(m, c);
        }
        p
    }

    pub fn kind(&self) -> VarKind {
        self.kind
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, C> {
        self.terms
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::rzero)
    }

    pub fn leading(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_rzero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(e) => {
                let s = e.radd(&c);
                if s.is_rzero() {
                    self.terms.remove(&m);
                } else {
                    *e = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    pub fn weighted_degrees(&self, weights: &[usize]) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(|m| m.weighted_degree(weights)).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(Monomial::degree);
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    /// Part of weighted degree `d` (plain degree when `weights` is all ones).
    pub fn weighted_component(&self, weights: &[usize], d: usize) -> Self {
        Self {
            kind: self.kind,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.weighted_degree(weights) == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn homogeneous_component(&self, d: u32) -> Self {
        self.weighted_component(&vec![1; self.nvars], d as usize)
    }

    /// Drops all terms of total degree above `d`.
    pub fn truncate(&self, d: u32) -> Self {
        Self {
            kind: self.kind,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        let mut out = Poly::zero(self.kind, self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn with_kind(mut self, kind: VarKind) -> Self {
        self.kind = kind;
        self
    }

    fn compatible(&self, other: &Self) -> bool {
        self.kind == other.kind && self.nvars == other.nvars
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if !self.compatible(other) {
            return Err(Error::KindMismatch);
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        if !self.compatible(other) {
            return Err(Error::KindMismatch);
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.rneg());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if !self.compatible(other) {
            return Err(Error::KindMismatch);
        }
        Ok(self.mul_truncated(other, None))
    }

    /// Product, discarding terms of total degree above `max_deg`.
    pub fn mul_truncated(&self, other: &Self, max_deg: Option<u32>) -> Self {
        let mut acc: HashMap<Monomial, C> = HashMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m = m1.mul(m2);
                if max_deg.is_some_and(|d| m.degree() > d) {
                    continue;
                }
                let p = c1.rmul(c2);
                match acc.get_mut(&m) {
                    Some(e) => *e = e.radd(&p),
                    None => {
                        acc.insert(m, p);
                    }
                }
            }
        }
        Self {
            kind: self.kind,
            nvars: self.nvars,
            terms: acc.into_iter().filter(|(_, c)| !c.is_rzero()).collect(),
        }
    }

    pub fn scale(&self, s: &C) -> Self {
        if s.is_rzero() {
            return Self::zero(self.kind, self.nvars);
        }
        self.map_coeffs(|c| c.rmul(s))
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.rneg())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one(self.kind, self.nvars);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.kind, self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut mm = m.clone();
            mm.0[i] -= 1;
            out.add_term(mm, c.rmul(&C::from_q(&Q::from_integer((e as i64).into()))));
        }
        out
    }

    /// All first partial derivatives.
    pub fn gradient(&self) -> Vec<Self> {
        (0..self.nvars).map(|i| self.derivative(i)).collect()
    }

    /// `p(maps[0], …, maps[k-1])`: composition with the given polynomials.
    pub fn substitute(&self, maps: &[Poly<C>]) -> Result<Poly<C>> {
        self.substitute_truncated(maps, None)
    }

    /// Composition keeping only terms of total degree at most `max_deg`.
    pub fn substitute_truncated(&self, maps: &[Poly<C>], max_deg: Option<u32>) -> Result<Poly<C>> {
        if maps.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: maps.len(),
            });
        }
        let Some(first) = maps.first() else {
            // no variables: p is a constant
            return Ok(Poly::zero(VarKind::X, 0).plus_constant(self.coeff(&Monomial(vec![]))));
        };
        let (kind, n) = (first.kind, first.nvars);
        if maps.iter().any(|m| m.kind != kind || m.nvars != n) {
            return Err(Error::KindMismatch);
        }
        let mut powers: Vec<Vec<Poly<C>>> = vec![vec![Poly::one(kind, n)]; maps.len()];
        let mut out = Poly::zero(kind, n);
        for (m, c) in &self.terms {
            let mut term = Poly::constant(kind, n, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i]
                        .last()
                        .unwrap()
                        .mul_truncated(&maps[i], max_deg);
                    powers[i].push(next);
                }
                term = term.mul_truncated(&powers[i][e as usize], max_deg);
                if term.is_zero() {
                    break;
                }
            }
            for (mm, cc) in term.terms {
                out.add_term(mm, cc);
            }
        }
        Ok(out)
    }

    fn plus_constant(mut self, c: C) -> Self {
        self.add_term(Monomial::one(self.nvars), c);
        self
    }

    /// `p ∘ T`: the polynomial `x ↦ p(T x)` for a linear map with rational entries.
    pub fn act_matrix(&self, t: &crate::linalg::QMatrix) -> Result<Self> {
        if self.kind != VarKind::X {
            return Err(Error::KindMismatch);
        }
        if t.nrows() != self.nvars || t.ncols() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: t.nrows(),
            });
        }
        let n = self.nvars;
        // monomial (signed permutation or scaled) matrices map monomials to monomials
        let single: Option<Vec<(usize, Q)>> = (0..n)
            .map(|i| {
                let nz: Vec<usize> = (0..n).filter(|&j| !Zero::is_zero(&t[(i, j)])).collect();
                (nz.len() == 1).then(|| (nz[0], t[(i, nz[0])].clone()))
            })
            .collect();
        if let Some(rows) = single {
            let mut out = Self::zero(self.kind, n);
            for (m, c) in &self.terms {
                let mut e = vec![0u32; n];
                let mut f = <Q as One>::one();
                for (i, &a) in m.0.iter().enumerate() {
                    if a > 0 {
                        let (j, ref s) = rows[i];
                        e[j] += a;
                        f *= num_traits::pow(s.clone(), a as usize);
                    }
                }
                out.add_term(Monomial(e), c.rmul(&C::from_q(&f)));
            }
            return Ok(out);
        }
        let forms: Vec<Poly<C>> = (0..n)
            .map(|i| {
                let mut l = Poly::zero(VarKind::X, n);
                for j in 0..n {
                    l.add_term(Monomial::var(n, j), C::from_q(&t[(i, j)]));
                }
                l
            })
            .collect();
        self.substitute(&forms)
    }

    pub fn fmt_with(&self, names: &dyn Fn(usize) -> String, coeff: &dyn Fn(&C) -> (bool, String)) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let (negative, mag) = coeff(c);
            let sign = match (idx == 0, negative) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            s.push_str(sign);
            let factors = m.fmt_factors(names);
            if factors.is_empty() {
                s.push_str(&mag);
            } else if mag == "1" {
                s.push_str(&factors);
            } else {
                s.push_str(&format!("{mag} * {factors}"));
            }
        }
        s
    }
}

impl Polynomial {
    /// Exact evaluation at a rational point.
    pub fn eval_q(&self, point: &[Q]) -> Result<Q> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: point.len(),
            });
        }
        let mut acc = <Q as Zero>::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Floating evaluation.
    pub fn eval_f64(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: point.len(),
            });
        }
        Ok(self.to_float().eval(point))
    }

    pub fn to_float(&self) -> FloatPoly {
        FloatPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.0.clone(), to_f64(c))).collect(),
        }
    }

    /// `(g·p)(x) = p(T_g x)`.
    pub fn act(&self, g: &GroupElement) -> Result<Self> {
        self.act_matrix(g.matrix())
    }

    pub fn lift<C: Ring>(&self) -> Poly<C> {
        self.map_coeffs(C::from_q)
    }

    /// Parses the canonical text form (or anything close to it): terms joined
    /// by `+`/`-`, each a product of rationals and `x3^2`-style factors
    /// separated by `*` or whitespace. The prefix of the variable names must
    /// match `kind` (`x` for X, `J` for J, `p` for Param).
    pub fn parse(text: &str, kind: VarKind, nvars: usize) -> Result<Self> {
        let names = |i: usize| format!("{}{}", kind.prefix(), i + 1);
        let lookup = |name: &str| -> Option<usize> { (0..nvars).find(|&i| names(i) == name) };
        let mut out = Self::zero(kind, nvars);
        for (sign, term) in split_terms(text)? {
            let mut c = <Q as One>::one();
            let mut m = vec![0u32; nvars];
            for factor in term.split(|ch: char| ch == '*' || ch.is_whitespace()).filter(|f| !f.is_empty()) {
                let (base, exp) = match factor.split_once('^') {
                    Some((b, e)) => (
                        b,
                        e.parse::<u32>()
                            .map_err(|_| Error::PolyParse(format!("bad exponent in {factor:?}")))?,
                    ),
                    None => (factor, 1),
                };
                if let Some(i) = lookup(base) {
                    m[i] += exp;
                } else if let Ok(v) = parse_q(base) {
                    c *= num_traits::pow(v, exp as usize);
                } else {
                    return Err(Error::PolyParse(format!("unknown factor {factor:?}")));
                }
            }
            if sign {
                c = -c;
            }
            out.add_term(Monomial(m), c);
        }
        Ok(out)
    }
}

/// Splits `a - b + c` into signed terms; `-` inside a rational like `-3/2` at
/// term start is handled as a sign.
pub(crate) fn split_terms(text: &str) -> Result<Vec<(bool, String)>> {
    let t = text.trim();
    if t.is_empty() {
        return Err(Error::PolyParse("empty".into()));
    }
    let mut out = Vec::new();
    let mut negative = false;
    let mut cur = String::new();
    let mut expect_term = true;
    for ch in t.chars() {
        match ch {
            '+' | '-' if expect_term => {
                if ch == '-' {
                    negative = !negative;
                }
            }
            '+' | '-' if !cur.trim().is_empty() && !cur.trim_end().ends_with('^') => {
                out.push((negative, cur.trim().to_string()));
                cur.clear();
                negative = ch == '-';
                expect_term = true;
            }
            _ => {
                if !ch.is_whitespace() {
                    expect_term = false;
                }
                cur.push(ch);
            }
        }
    }
    if cur.trim().is_empty() {
        return Err(Error::PolyParse(format!("dangling sign in {text:?}")));
    }
    out.push((negative, cur.trim().to_string()));
    if out.len() == 1 && out[0].1 == "0" {
        return Ok(Vec::new());
    }
    Ok(out)
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = self.kind.prefix();
        f.write_str(&self.fmt_with(&|i| format!("{prefix}{}", i + 1), &|c: &Q| {
            (c.is_negative(), format_q(&c.abs()))
        }))
    }
}

impl<C: Ring> std::ops::Add for &Poly<C> {
    type Output = Poly<C>;
    fn add(self, rhs: Self) -> Poly<C> {
        self.checked_add(rhs).expect("polynomial kind mismatch")
    }
}

impl<C: Ring> std::ops::Sub for &Poly<C> {
    type Output = Poly<C>;
    fn sub(self, rhs: Self) -> Poly<C> {
        self.checked_sub(rhs).expect("polynomial kind mismatch")
    }
}

impl<C: Ring> std::ops::Mul for &Poly<C> {
    type Output = Poly<C>;
    fn mul(self, rhs: Self) -> Poly<C> {
        self.checked_mul(rhs).expect("polynomial kind mismatch")
    }
}

impl<C: Ring> std::ops::Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        Poly::neg(self)
    }
}

/// Reynolds projection `(1/|G|) Σ_g p ∘ T_g`.
pub fn reynolds(rep: &crate::group::FiniteGroupRep, p: &Polynomial) -> Result<Polynomial> {
    if p.kind() != VarKind::X {
        return Err(Error::KindMismatch);
    }
    if p.nvars() != rep.dim() {
        return Err(Error::DimensionMismatch {
            expected: rep.dim(),
            found: p.nvars(),
        });
    }
    let mut acc = Polynomial::zero(VarKind::X, p.nvars());
    for g in rep.elements() {
        for (m, c) in p.act(g)?.terms {
            acc.add_term(m, c);
        }
    }
    let inv = Q::from_integer((rep.order() as i64).into()).recip();
    Ok(acc.scale(&inv))
}

/// Floating-point polynomial compiled from an exact one, for numerics.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatPoly {
    nvars: usize,
    terms: Vec<(Vec<u32>, f64)>,
}

impl FloatPoly {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn from_terms(nvars: usize, terms: Vec<(Vec<u32>, f64)>) -> Self {
        FloatPoly {
            nvars,
            terms: terms.into_iter().filter(|(_, c)| *c != 0.0).collect(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(x)
                    .fold(*c, |acc, (&k, &xi)| if k == 0 { acc } else { acc * xi.powi(k as i32) })
            })
            .sum()
    }

    pub fn derivative(&self, i: usize) -> FloatPoly {
        FloatPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e[i] > 0)
                .map(|(e, c)| {
                    let mut e2 = e.clone();
                    e2[i] -= 1;
                    (e2, c * e[i] as f64)
                })
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroupRep;
    use crate::linalg::QMatrix;
    use crate::rational::{q, q_frac};

    fn x(s: &str) -> Polynomial {
        Polynomial::parse(s, VarKind::X, 2).unwrap()
    }

    #[test]
    fn ring_examples() {
        assert_eq!(&x("x1^2 + x2") + &x("-x1^2"), x("x2"));
        assert_eq!(&x("x1 + x2") * &x("x1 - x2"), x("x1^2 - x2^2"));
        assert!(x("x1^2").scale(&q(0)).is_zero());
        let j = Polynomial::var(VarKind::J, 2, 0);
        assert_eq!(x("x1").checked_add(&j), Err(Error::KindMismatch));
    }

    #[test]
    fn canonical_text_round_trip() {
        let p = x("3/2 * x1^2 x2 - x2^3 + 7 - 1/3 * x1");
        let s = p.to_string();
        assert_eq!(s, "3/2 * x1^2 x2 - x2^3 - 1/3 * x1 + 7");
        assert_eq!(Polynomial::parse(&s, VarKind::X, 2).unwrap(), p);
        assert_eq!(Polynomial::zero(VarKind::X, 2).to_string(), "0");
        assert!(Polynomial::parse("0", VarKind::X, 2).unwrap().is_zero());
        assert!(Polynomial::parse("x3", VarKind::X, 2).is_err());
    }

    #[test]
    fn act_examples() {
        let neg = FiniteGroupRep::close(&[QMatrix::from_i64(&[&[-1]])], 10).unwrap();
        let g = &neg.elements()[1];
        let p1 = |s: &str| Polynomial::parse(s, VarKind::X, 1).unwrap();
        assert_eq!(p1("x1^2").act(g).unwrap(), p1("x1^2"));
        assert_eq!(p1("x1^3").act(g).unwrap(), p1("-x1^3"));
        let rot = QMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        assert_eq!(x("x1").act_matrix(&rot).unwrap(), x("-x2"));
        // generic (non-monomial) path agrees with direct substitution
        let shear = QMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert_eq!(x("x1^2").act_matrix(&shear).unwrap(), x("x1^2 + 2 x1 x2 + x2^2"));
    }

    #[test]
    fn reynolds_examples() {
        let z2 = FiniteGroupRep::close(&[QMatrix::from_i64(&[&[-1, 0], &[0, -1]])], 10).unwrap();
        assert_eq!(reynolds(&z2, &x("x1 x2")).unwrap(), x("x1 x2"));
        assert!(reynolds(&z2, &x("x1")).unwrap().is_zero());
        let d4 = FiniteGroupRep::close(
            &[
                QMatrix::from_i64(&[&[0, -1], &[1, 0]]),
                QMatrix::from_i64(&[&[1, 0], &[0, -1]]),
            ],
            100,
        )
        .unwrap();
        assert_eq!(reynolds(&d4, &x("x1^4")).unwrap(), x("1/2 x1^4 + 1/2 x2^4"));
    }

    #[test]
    fn gradient_examples() {
        assert_eq!(x("x1^2 x2").gradient(), vec![x("2 x1 x2"), x("x1^2")]);
        assert!(x("5").gradient().iter().all(Poly::is_zero));
        assert_eq!(x("x1^2 + x2^2").gradient(), vec![x("2 x1"), x("2 x2")]);
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(x("x1^2 + x2^2").eval_q(&[q(3), q(4)]).unwrap(), q(25));
        assert_eq!(x("0").eval_f64(&[1.5, -2.0]).unwrap(), 0.0);
        let j = Polynomial::parse("J1 J2", VarKind::J, 2).unwrap();
        assert_eq!(j.eval_q(&[q(2), q(5)]).unwrap(), q(10));
        assert!(x("x1").eval_q(&[q(1)]).is_err());
        assert_eq!(x("1/2 x1").eval_q(&[q_frac(1, 3), q(0)]).unwrap(), q_frac(1, 6));
    }

    #[test]
    fn substitute_examples() {
        let j1 = |s: &str| Polynomial::parse(s, VarKind::J, 1).unwrap();
        let p1 = |s: &str| Polynomial::parse(s, VarKind::X, 1).unwrap();
        assert_eq!(j1("J1^2").substitute(&[p1("x1^2")]).unwrap(), p1("x1^4"));
        let rel = Polynomial::parse("J1 J2 - J3^2", VarKind::J, 3).unwrap();
        let basis = [x("x1^2"), x("x2^2"), x("x1 x2")];
        assert!(rel.substitute(&basis).unwrap().is_zero());
        assert_eq!(
            Polynomial::parse("J1", VarKind::J, 3).unwrap().substitute(&basis).unwrap(),
            x("x1^2")
        );
        assert!(rel.substitute(&basis[..2]).is_err());
    }

    #[test]
    fn monomial_enumeration() {
        let m = Monomial::all_of_degree(2, 2);
        assert_eq!(m, vec![Monomial(vec![2, 0]), Monomial(vec![1, 1]), Monomial(vec![0, 2])]);
        assert_eq!(Monomial::all_of_degree(3, 4).len(), 15);
        let w = Monomial::all_of_weighted_degree(&[2, 4], 8);
        assert_eq!(w.len(), 3);
        assert!(w.windows(2).all(|p| p[0] > p[1]));
    }
}
