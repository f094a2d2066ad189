//! Landau polynomials over an integrity basis: construction, stability
//! screening, multistart minimization with symmetry classification, and
//! one-parameter sweeps.
//!
//! Coefficients of `Ψ(J)` are affine in named control parameters. Numerics
//! evaluate `Φ(x) = Ψ(J(x))` through the chain rule, so only the basis and the
//! J-polynomial are compiled to floating form.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::FiniteGroupRep;
use crate::invariants::IntegrityBasis;
use crate::poly::{split_terms, FloatPoly, Monomial, Polynomial, VarKind};
use crate::rational::{format_q, parse_q, to_f64, Q};
use crate::strata::{symmetry_types, PrincipalCriticalOrbitSet, SymmetryType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoeffKind {
    /// May vanish inside the parameter domain; never divided by.
    Critical,
    /// Bounded away from zero on the parameter domain.
    Generic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Param {
    pub name: String,
    pub kind: CoeffKind,
}

/// `constant + Σ linear[i]·λ_i`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Affine {
    pub constant: Q,
    pub linear: BTreeMap<usize, Q>,
}

impl Affine {
    pub fn constant(c: Q) -> Self {
        Affine {
            constant: c,
            linear: BTreeMap::new(),
        }
    }

    pub fn param(i: usize) -> Self {
        Affine {
            constant: Q::zero(),
            linear: BTreeMap::from([(i, Q::one())]),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.linear.values().all(Zero::is_zero)
    }

    fn add_assign(&mut self, other: &Affine) {
        self.constant += &other.constant;
        for (i, c) in &other.linear {
            let e = self.linear.entry(*i).or_insert_with(Q::zero);
            *e += c;
            if e.is_zero() {
                self.linear.remove(i);
            }
        }
    }

    pub fn eval(&self, lambda: &[f64]) -> f64 {
        to_f64(&self.constant) + self.linear.iter().map(|(i, c)| to_f64(c) * lambda[*i]).sum::<f64>()
    }

    pub fn eval_q(&self, lambda: &[Q]) -> Q {
        let mut s = self.constant.clone();
        for (i, c) in &self.linear {
            s += c * &lambda[*i];
        }
        s
    }

    fn render(&self, params: &[Param]) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (i, c) in &self.linear {
            let name = &params[*i].name;
            let s = if c.is_one() {
                name.clone()
            } else if (-c).is_one() {
                format!("-{name}")
            } else {
                format!("{}*{name}", format_q(c))
            };
            parts.push(s);
        }
        if !self.constant.is_zero() || parts.is_empty() {
            parts.push(format_q(&self.constant));
        }
        let mut s = parts[0].clone();
        for p in &parts[1..] {
            match p.strip_prefix('-') {
                Some(rest) => s.push_str(&format!(" - {rest}")),
                None => s.push_str(&format!(" + {p}")),
            }
        }
        s
    }
}

/// `Ψ(J) = Σ_m coeff_m(λ) J^m` over a fixed integrity basis.
#[derive(Debug, Clone)]
pub struct LandauModel {
    rep: FiniteGroupRep,
    basis: IntegrityBasis,
    params: Vec<Param>,
    terms: BTreeMap<Monomial, Affine>,
    degree_x: usize,
}

fn j_name(m: &Monomial) -> String {
    m.0.iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| if e == 1 { format!("J{}", i + 1) } else { format!("J{}^{}", i + 1, e) })
        .collect::<Vec<_>>()
        .join("*")
}

impl LandauModel {
    /// Every J-monomial of x-degree `2..=ℓ` with its own coefficient
    /// `c_<degree>_<index>`. `ℓ` defaults to twice the top basis degree. The
    /// coefficients of the lowest x-degree are critical, the rest generic.
    pub fn build_generic(rep: &FiniteGroupRep, basis: &IntegrityBasis, degree_x: Option<usize>) -> Self {
        let ell = degree_x.unwrap_or(2 * basis.max_degree());
        let mut params = Vec::new();
        let mut terms = BTreeMap::new();
        let mut lowest: Option<usize> = None;
        for d in 2..=ell {
            let mut mons = Monomial::all_of_weighted_degree(basis.degrees(), d);
            mons.reverse();
            for (i, m) in mons.into_iter().enumerate() {
                let critical = *lowest.get_or_insert(d) == d;
                terms.insert(m, Affine::param(params.len()));
                params.push(Param {
                    name: format!("c_{d}_{i}"),
                    kind: if critical { CoeffKind::Critical } else { CoeffKind::Generic },
                });
            }
        }
        LandauModel {
            rep: rep.clone(),
            basis: basis.clone(),
            params,
            terms,
            degree_x: ell,
        }
    }

    /// Parses text such as `a*J1 + J1^2 + c*J2 - 1/2*J2^2`. Each term is a
    /// product of an optional rational, at most one parameter name and powers
    /// of `J1..Jk`. Parameters listed in `critical` are critical; if the list
    /// is empty, the parameters multiplying monomials of the lowest x-degree
    /// are critical. All others are generic.
    pub fn parse(rep: &FiniteGroupRep, basis: &IntegrityBasis, text: &str, critical: &[&str]) -> Result<Self> {
        let k = basis.len();
        let bad = |m: String| Error::InvalidModel(m);
        let mut names: Vec<String> = Vec::new();
        let mut terms: BTreeMap<Monomial, Affine> = BTreeMap::new();
        for (negative, term) in split_terms(text).map_err(|e| bad(e.to_string()))? {
            let mut c = Q::one();
            let mut param: Option<usize> = None;
            let mut mon = vec![0u32; k];
            for factor in term.split(|ch: char| ch == '*' || ch.is_whitespace()).filter(|f| !f.is_empty()) {
                let (base, exp) = match factor.split_once('^') {
                    Some((b, e)) => (b, e.parse::<u32>().map_err(|_| bad(format!("bad exponent in {factor:?}")))?),
                    None => (factor, 1),
                };
                if let Some(idx) = base.strip_prefix('J').and_then(|s| s.parse::<usize>().ok()) {
                    if idx == 0 || idx > k {
                        return Err(bad(format!("{base} outside J1..J{k}")));
                    }
                    mon[idx - 1] += exp;
                } else if let Ok(v) = parse_q(base) {
                    c *= num_traits::pow(v, exp as usize);
                } else if base.chars().next().is_some_and(|ch| ch.is_ascii_alphabetic() || ch == '_')
                    && base.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_')
                {
                    if exp != 1 || param.is_some() {
                        return Err(bad(format!("term {term:?} is not affine in the parameters")));
                    }
                    let i = names.iter().position(|n| n == base).unwrap_or_else(|| {
                        names.push(base.to_string());
                        names.len() - 1
                    });
                    param = Some(i);
                } else {
                    return Err(bad(format!("unknown factor {factor:?}")));
                }
            }
            if negative {
                c = -c;
            }
            let m = Monomial(mon);
            if m.degree() == 0 {
                return Err(bad("constant term".into()));
            }
            let mut a = match param {
                Some(i) => Affine::param(i),
                None => Affine::constant(Q::one()),
            };
            a.constant *= &c;
            for v in a.linear.values_mut() {
                *v *= &c;
            }
            terms.entry(m).or_default().add_assign(&a);
        }
        terms.retain(|_, a| !a.is_zero());
        if terms.is_empty() {
            return Err(bad("empty model".into()));
        }
        for c in critical {
            if !names.iter().any(|n| n == c) {
                return Err(bad(format!("critical parameter {c:?} does not occur")));
            }
        }
        let degrees = basis.degrees();
        let lowest = terms.keys().map(|m| m.weighted_degree(degrees)).min().unwrap_or(0);
        let params = names
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let is_critical = if critical.is_empty() {
                    terms
                        .iter()
                        .any(|(m, a)| m.weighted_degree(degrees) == lowest && a.linear.contains_key(&i))
                } else {
                    critical.contains(&name.as_str())
                };
                Param {
                    name: name.clone(),
                    kind: if is_critical { CoeffKind::Critical } else { CoeffKind::Generic },
                }
            })
            .collect();
        let degree_x = terms.keys().map(|m| m.weighted_degree(degrees)).max().unwrap_or(0);
        Ok(LandauModel {
            rep: rep.clone(),
            basis: basis.clone(),
            params,
            terms,
            degree_x,
        })
    }

    pub fn rep(&self) -> &FiniteGroupRep {
        &self.rep
    }

    pub fn basis(&self) -> &IntegrityBasis {
        &self.basis
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Affine> {
        &self.terms
    }

    pub fn degree_x(&self) -> usize {
        self.degree_x
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p.name == name)
    }

    /// Overrides the kind of one parameter.
    pub fn set_kind(&mut self, name: &str, kind: CoeffKind) -> Result<()> {
        let i = self
            .param_index(name)
            .ok_or_else(|| Error::InvalidModel(format!("unknown parameter {name:?}")))?;
        self.params[i].kind = kind;
        Ok(())
    }

    /// Parameter vector in model order from `(name, value)` pairs; every
    /// parameter must be given exactly once.
    pub fn lambda(&self, values: &[(&str, f64)]) -> Result<Vec<f64>> {
        let mut out = vec![f64::NAN; self.params.len()];
        for (name, v) in values {
            let i = self
                .param_index(name)
                .ok_or_else(|| Error::InvalidModel(format!("unknown parameter {name:?}")))?;
            out[i] = *v;
        }
        if let Some(i) = out.iter().position(|v| v.is_nan()) {
            return Err(Error::InvalidModel(format!("no value for parameter {:?}", self.params[i].name)));
        }
        Ok(out)
    }

    /// `Ψ` at numeric parameters, as a rational J-polynomial of the exact
    /// binary values of the floats.
    pub fn psi_exact(&self, lambda: &[Q]) -> Polynomial {
        Polynomial::from_terms(
            VarKind::J,
            self.basis.len(),
            self.terms.iter().map(|(m, a)| (m.clone(), a.eval_q(lambda))),
        )
    }

    pub fn psi_float(&self, lambda: &[f64]) -> FloatPoly {
        FloatPoly::from_terms(
            self.basis.len(),
            self.terms.iter().map(|(m, a)| (m.0.clone(), a.eval(lambda))).collect(),
        )
    }

    pub fn potential(&self, lambda: &[f64]) -> Potential {
        Potential::new(&self.basis, self.psi_float(lambda))
    }
}

impl fmt::Display for LandauModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, a)| {
                let c = a.render(&self.params);
                let simple = a.linear.len() + usize::from(!a.constant.is_zero()) == 1;
                match (c.as_str(), simple) {
                    ("1", _) => j_name(m),
                    ("-1", _) => format!("-{}", j_name(m)),
                    (_, true) => format!("{c}*{}", j_name(m)),
                    _ => format!("({c})*{}", j_name(m)),
                }
            })
            .collect();
        let mut s = parts[0].clone();
        for p in &parts[1..] {
            match p.strip_prefix('-') {
                Some(rest) => s.push_str(&format!(" - {rest}")),
                None => s.push_str(&format!(" + {p}")),
            }
        }
        f.write_str(&s)
    }
}

/// `Φ(x) = Ψ(J(x))` compiled for floating evaluation of value, gradient and
/// Hessian through the chain rule.
#[derive(Debug, Clone)]
pub struct Potential {
    n: usize,
    j: Vec<FloatPoly>,
    dj: Vec<Vec<FloatPoly>>,
    ddj: Vec<Vec<Vec<FloatPoly>>>,
    psi: FloatPoly,
    dpsi: Vec<FloatPoly>,
    ddpsi: Vec<Vec<FloatPoly>>,
}

impl Potential {
    pub fn new(basis: &IntegrityBasis, psi: FloatPoly) -> Self {
        let n = basis.dim();
        let k = basis.len();
        let j = basis.to_float();
        let dj: Vec<Vec<FloatPoly>> = j.iter().map(|p| (0..n).map(|i| p.derivative(i)).collect()).collect();
        let ddj = dj
            .iter()
            .map(|row| row.iter().map(|p| (0..n).map(|i| p.derivative(i)).collect()).collect())
            .collect();
        let dpsi: Vec<FloatPoly> = (0..k).map(|a| psi.derivative(a)).collect();
        let ddpsi = dpsi.iter().map(|p| (0..k).map(|b| p.derivative(b)).collect()).collect();
        Potential {
            n,
            j,
            dj,
            ddj,
            psi,
            dpsi,
            ddpsi,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn orbit_map(&self, x: &[f64]) -> Vec<f64> {
        self.j.iter().map(|p| p.eval(x)).collect()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.psi.eval(&self.orbit_map(x))
    }

    /// `Ψ` at a point of orbit space.
    pub fn psi_value(&self, j: &[f64]) -> f64 {
        self.psi.eval(j)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let jv = self.orbit_map(x);
        let mut g = vec![0.0; self.n];
        for (a, dp) in self.dpsi.iter().enumerate() {
            let w = dp.eval(&jv);
            if w == 0.0 {
                continue;
            }
            for (i, gi) in g.iter_mut().enumerate() {
                *gi += w * self.dj[a][i].eval(x);
            }
        }
        g
    }

    pub fn hessian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let n = self.n;
        let k = self.j.len();
        let jv = self.orbit_map(x);
        let grads: Vec<Vec<f64>> = self.dj.iter().map(|row| row.iter().map(|p| p.eval(x)).collect()).collect();
        let mut h = vec![vec![0.0; n]; n];
        for a in 0..k {
            let w = self.dpsi[a].eval(&jv);
            if w != 0.0 {
                for i in 0..n {
                    for l in 0..n {
                        h[i][l] += w * self.ddj[a][i][l].eval(x);
                    }
                }
            }
            for b in 0..k {
                let w2 = self.ddpsi[a][b].eval(&jv);
                if w2 == 0.0 {
                    continue;
                }
                for i in 0..n {
                    for l in 0..n {
                        h[i][l] += w2 * grads[a][i] * grads[b][l];
                    }
                }
            }
        }
        h
    }

    /// Jacobian `∂J_a/∂x_i` at `x`.
    pub fn orbit_map_jacobian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.dj.iter().map(|row| row.iter().map(|p| p.eval(x)).collect()).collect()
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub stable: bool,
    pub radius: f64,
    pub samples: usize,
    /// Smallest `⟨∇Φ(x), x⟩` over the samples.
    pub min_radial: f64,
    /// Sphere points where the descent flow does not point inwards.
    pub witnesses: Vec<Vec<f64>>,
}

/// Standard normal deviate by Box–Muller.
fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.random_range(f64::EPSILON..1.0);
    let v: f64 = rng.random::<f64>();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

pub(crate) fn random_sphere_point(n: usize, radius: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
        let r = norm(&v);
        if r > 1e-12 {
            return v.iter().map(|a| a * radius / r).collect();
        }
    }
}

/// Samples the sphere of the given radius (plus the coordinate poles) and
/// checks `⟨∇Φ(x), x⟩ > 0`, i.e. the descent flow `-∇Φ` points inwards.
pub fn check_stability(model: &LandauModel, lambda: &[f64], radius: f64, samples: usize, seed: u64) -> StabilityReport {
    let pot = model.potential(lambda);
    let n = pot.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[i] = s * radius;
            points.push(e);
        }
    }
    for _ in 0..samples {
        points.push(random_sphere_point(n, radius, &mut rng));
    }
    let mut min_radial = f64::INFINITY;
    let mut witnesses = Vec::new();
    for x in &points {
        let r = dot(&pot.gradient(x), x);
        min_radial = min_radial.min(r);
        if r.is_nan() || r <= 0.0 {
            witnesses.push(x.clone());
        }
    }
    StabilityReport {
        stable: witnesses.is_empty(),
        radius,
        samples: points.len(),
        min_radial,
        witnesses,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizeOptions {
    /// Number of quasi-random starts besides the origin; `None` means 16·k.
    pub starts: Option<usize>,
    pub radius: f64,
    /// Descent leaving this ball is a stability violation.
    pub escape_radius: f64,
    pub seed: u64,
    pub grad_tol: f64,
    pub cluster_tol: f64,
    pub symmetry_tol: f64,
    pub marginal_tol: f64,
    pub max_descent_steps: usize,
    pub max_newton_steps: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            starts: None,
            radius: 2.0,
            escape_radius: 1e3,
            seed: crate::strata::DEFAULT_SEED,
            grad_tol: 1e-10,
            cluster_tol: 1e-7,
            symmetry_tol: 1e-8,
            marginal_tol: 1e-8,
            max_descent_steps: 20_000,
            max_newton_steps: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub location: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub hessian_eigenvalues: Vec<f64>,
    /// (negative, marginal, positive) eigenvalue counts.
    pub inertia: (usize, usize, usize),
    pub symmetry: SymmetryType,
    pub orbit_size: usize,
    pub orbit_space: Vec<f64>,
}

impl CriticalPoint {
    pub fn is_minimum(&self) -> bool {
        self.inertia.0 == 0 && self.inertia.1 == 0
    }

    pub fn is_marginal(&self) -> bool {
        self.inertia.1 > 0
    }

    pub fn kind(&self) -> &'static str {
        match self.inertia {
            (0, 0, _) => "minimum",
            (_, 0, 0) => "maximum",
            (_, 0, _) => "saddle",
            _ => "marginal",
        }
    }
}

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as f64;
    let mut f = 1.0 / b;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base as u64) as f64;
        i /= base as u64;
        f /= b;
    }
    r
}

/// Shifted Halton points mapped from the cube onto the ball.
fn halton_ball(n: usize, count: usize, radius: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let shift: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    (1..=count as u64)
        .map(|i| {
            let y: Vec<f64> = (0..n)
                .map(|d| {
                    let u = (radical_inverse(i, PRIMES[d % PRIMES.len()]) + shift[d]).fract();
                    2.0 * u - 1.0
                })
                .collect();
            let l2 = norm(&y);
            let linf = y.iter().fold(0.0f64, |m, a| m.max(a.abs()));
            if l2 == 0.0 {
                y
            } else {
                y.iter().map(|a| a * radius * linf / l2).collect()
            }
        })
        .collect()
}

fn solve(h: &[Vec<f64>], g: &[f64]) -> Option<Vec<f64>> {
    let n = g.len();
    let m = DMatrix::from_fn(n, n, |i, j| h[i][j]);
    let sol = m.lu().solve(&DVector::from_column_slice(g))?;
    sol.iter().all(|v| v.is_finite()).then(|| sol.iter().copied().collect())
}

enum Descent {
    Converged(Vec<f64>),
    Failed,
}

fn descend(pot: &Potential, x0: &[f64], opts: &MinimizeOptions) -> Result<Descent> {
    let mut x = x0.to_vec();
    let mut f = pot.value(&x);
    let mut step: f64 = 1.0;
    for _ in 0..opts.max_descent_steps {
        let g = pot.gradient(&x);
        let gn = norm(&g);
        if gn <= 1e-6 * (1.0 + f.abs()) {
            break;
        }
        let mut accepted = false;
        step = (step * 4.0).min(1e6);
        while step > 1e-300 {
            let y: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - step * b).collect();
            let fy = pot.value(&y);
            if fy.is_finite() && fy <= f - 1e-4 * step * gn * gn {
                x = y;
                f = fy;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        let r = norm(&x);
        if !r.is_finite() || r > opts.escape_radius {
            return Err(Error::StabilityViolation { norm: r });
        }
        if !accepted {
            break;
        }
    }
    // Newton polish on the gradient
    for _ in 0..opts.max_newton_steps {
        let g = pot.gradient(&x);
        let gn = norm(&g);
        if gn == 0.0 {
            break;
        }
        let Some(dx) = solve(&pot.hessian(&x), &g) else { break };
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..40 {
            let y: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a - t * b).collect();
            if norm(&pot.gradient(&y)) < gn {
                x = y;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved || t * norm(&dx) <= 1e-13 * (1.0 + norm(&x)) {
            break;
        }
    }
    let r = norm(&x);
    if !r.is_finite() || r > opts.escape_radius {
        return Err(Error::StabilityViolation { norm: r });
    }
    if norm(&pot.gradient(&x)) <= opts.grad_tol {
        Ok(Descent::Converged(x))
    } else {
        Ok(Descent::Failed)
    }
}

/// The symmetry type of `{g : |T_g x − x| ≤ tol·|x|}`.
pub fn classify_symmetry(rep: &FiniteGroupRep, x: &[f64], tol: f64) -> Result<SymmetryType> {
    let types = symmetry_types(rep)?;
    classify_with(rep, &types, x, tol)
}

pub fn classify_with(rep: &FiniteGroupRep, types: &[SymmetryType], x: &[f64], tol: f64) -> Result<SymmetryType> {
    if x.len() != rep.dim() {
        return Err(Error::DimensionMismatch {
            expected: rep.dim(),
            found: x.len(),
        });
    }
    let r = norm(x);
    let members: Vec<usize> = (0..rep.order())
        .filter(|&g| {
            let y = rep.element(g).apply_f64(x);
            norm(&y.iter().zip(x).map(|(a, b)| a - b).collect::<Vec<_>>()) <= tol * r
        })
        .collect();
    let h = rep.subgroup(&members).map_err(|_| Error::AmbiguousClassification { tol })?;
    Ok(types
        .iter()
        .find(|t| t.contains_subgroup(&h))
        .expect("every subgroup lies in a type")
        .clone())
}

fn same_orbit(rep: &FiniteGroupRep, x: &[f64], y: &[f64], tol: f64) -> bool {
    rep.elements().iter().any(|g| {
        let gx = g.apply_f64(x);
        norm(&gx.iter().zip(y).map(|(a, b)| a - b).collect::<Vec<_>>()) <= tol * (1.0 + norm(y))
    })
}

/// Relative distance within which a near-fixed point is projected onto the
/// fixed space of the elements that almost fix it.
const SNAP_TOL: f64 = 1e-6;

/// Averages `x` over the elements that move it by less than `SNAP_TOL·|x|`.
/// The average is kept only if it is still a critical point, so flat
/// directions (degenerate minima) do not leave spurious symmetry breaking.
fn snap_to_fixed_space(pot: &Potential, rep: &FiniteGroupRep, x: Vec<f64>, grad_tol: f64) -> Vec<f64> {
    let r = norm(&x);
    let near: Vec<usize> = (0..rep.order())
        .filter(|&g| {
            let y = rep.element(g).apply_f64(&x);
            norm(&y.iter().zip(&x).map(|(a, b)| a - b).collect::<Vec<_>>()) <= SNAP_TOL * r
        })
        .collect();
    let Ok(h) = rep.subgroup(&near) else {
        return x;
    };
    let mut avg = vec![0.0; x.len()];
    for &g in h.members() {
        for (a, b) in avg.iter_mut().zip(rep.element(g).apply_f64(&x)) {
            *a += b / h.order() as f64;
        }
    }
    if norm(&pot.gradient(&avg)) <= grad_tol && pot.value(&avg) <= pot.value(&x) + grad_tol {
        avg
    } else {
        x
    }
}

/// Lexicographically largest image, used as the orbit representative.
fn orbit_representative(rep: &FiniteGroupRep, x: &[f64]) -> Vec<f64> {
    let mut best = x.to_vec();
    for g in rep.elements() {
        let y = g.apply_f64(x);
        if y.iter().zip(&best).map(|(a, b)| a.total_cmp(b)).find(|o| o.is_ne()) == Some(std::cmp::Ordering::Greater) {
            best = y;
        }
    }
    best
}

fn inertia(eigs: &[f64], tol: f64) -> (usize, usize, usize) {
    let neg = eigs.iter().filter(|&&e| e < -tol).count();
    let pos = eigs.iter().filter(|&&e| e > tol).count();
    (neg, eigs.len() - neg - pos, pos)
}

/// Multistart descent with Newton polishing. Returns one critical point per
/// orbit, sorted by value and then by location.
pub fn minimize(model: &LandauModel, lambda: &[f64], opts: &MinimizeOptions) -> Result<Vec<CriticalPoint>> {
    let pot = model.potential(lambda);
    let rep = model.rep();
    let types = symmetry_types(rep)?;
    minimize_with(&pot, rep, &types, model.basis().len(), opts)
}

pub fn minimize_with(
    pot: &Potential,
    rep: &FiniteGroupRep,
    types: &[SymmetryType],
    k: usize,
    opts: &MinimizeOptions,
) -> Result<Vec<CriticalPoint>> {
    let n = pot.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let count = opts.starts.unwrap_or(16 * k);
    let mut starts = vec![vec![0.0; n]];
    starts.extend(halton_ball(n, count, opts.radius, &mut rng));
    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut failed = 0;
    for s in &starts {
        match descend(pot, s, opts)? {
            Descent::Converged(mut x) => {
                if norm(&x) <= opts.cluster_tol {
                    x = vec![0.0; n];
                }
                x = snap_to_fixed_space(pot, rep, x, opts.grad_tol);
                if !found.iter().any(|y| same_orbit(rep, &x, y, opts.cluster_tol)) {
                    found.push(x);
                }
            }
            Descent::Failed => failed += 1,
        }
    }
    if found.is_empty() {
        return Err(Error::NoConvergence { unconverged: failed });
    }
    let mut out = Vec::new();
    for x in found {
        let x = orbit_representative(rep, &x);
        let h = pot.hessian(&x);
        let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (h[i][j] + h[j][i]));
        let mut eigs: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        eigs.sort_by(f64::total_cmp);
        let symmetry = classify_with(rep, types, &x, opts.symmetry_tol)?;
        out.push(CriticalPoint {
            value: pot.value(&x),
            gradient_norm: norm(&pot.gradient(&x)),
            inertia: inertia(&eigs, opts.marginal_tol),
            hessian_eigenvalues: eigs,
            orbit_size: rep.order() / symmetry.order,
            symmetry,
            orbit_space: pot.orbit_map(&x),
            location: x,
        });
    }
    out.sort_by(|a, b| {
        a.value.total_cmp(&b.value).then_with(|| {
            a.location
                .iter()
                .zip(&b.location)
                .map(|(p, q)| p.total_cmp(q))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    Ok(out)
}

/// The lowest critical point (the global minimizer among those found).
pub fn global_minimizer(points: &[CriticalPoint]) -> Option<&CriticalPoint> {
    points.first()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseRow {
    pub value: f64,
    pub type_id: Option<usize>,
    pub type_label: Option<String>,
    pub min_value: Option<f64>,
    pub location: Option<Vec<f64>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transition {
    pub lo: f64,
    pub hi: f64,
    pub estimate: f64,
    pub from_type: usize,
    pub to_type: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseDiagram {
    pub parameter: String,
    pub rows: Vec<PhaseRow>,
    pub transitions: Vec<Transition>,
}

impl PhaseDiagram {
    /// `parameter,type_id,type,min_value,x1..xn`; failed points leave the
    /// result columns empty and carry the error code in the type column.
    pub fn to_csv(&self, n: usize) -> String {
        let mut s = format!("{},type_id,type,min_value", self.parameter);
        for i in 1..=n {
            s.push_str(&format!(",x{i}"));
        }
        s.push('\n');
        for r in &self.rows {
            s.push_str(&format!("{}", r.value));
            match (&r.type_id, &r.min_value, &r.location) {
                (Some(t), Some(v), Some(x)) => {
                    s.push_str(&format!(",{t},\"{}\",{v}", r.type_label.as_deref().unwrap_or("")));
                    for c in x {
                        s.push_str(&format!(",{c}"));
                    }
                }
                _ => {
                    s.push_str(&format!(",,{},", r.error.as_deref().unwrap_or("error")));
                    s.push_str(&",".repeat(n));
                }
            }
            s.push('\n');
        }
        s
    }
}

/// Evenly spaced grid of `steps` points from `lo` to `hi`.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect(),
    }
}

/// Runs [`minimize`] at each grid value of `parameter` (other parameters
/// from `fixed`), records the type of the global minimizer, and bisects each
/// grid interval where the type changes down to `bisect_width`.
pub fn sweep(
    model: &LandauModel,
    parameter: &str,
    grid: &[f64],
    fixed: &[(&str, f64)],
    opts: &MinimizeOptions,
    bisect_width: f64,
) -> Result<PhaseDiagram> {
    let idx = model
        .param_index(parameter)
        .ok_or_else(|| Error::InvalidModel(format!("unknown parameter {parameter:?}")))?;
    let mut pairs: Vec<(&str, f64)> = fixed.iter().filter(|(n, _)| *n != parameter).copied().collect();
    pairs.push((parameter, 0.0));
    let base = model.lambda(&pairs)?;
    let rep = model.rep();
    let types = symmetry_types(rep)?;
    let k = model.basis().len();
    let run = |v: f64| -> Result<CriticalPoint> {
        let mut lam = base.clone();
        lam[idx] = v;
        let pot = model.potential(&lam);
        let pts = minimize_with(&pot, rep, &types, k, opts)?;
        Ok(pts.into_iter().next().expect("nonempty"))
    };
    let row = |v: f64| -> PhaseRow {
        match run(v) {
            Ok(p) => PhaseRow {
                value: v,
                type_id: Some(p.symmetry.id),
                type_label: Some(p.symmetry.label()),
                min_value: Some(p.value),
                location: Some(p.location),
                error: None,
            },
            Err(e) => PhaseRow {
                value: v,
                type_id: None,
                type_label: None,
                min_value: None,
                location: None,
                error: Some(e.qualified_code()),
            },
        }
    };
    // grid points are independent; chunks run concurrently and are joined in order
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).max(1);
    let chunk = grid.len().div_ceil(workers).max(1);
    let rows: Vec<PhaseRow> = std::thread::scope(|scope| {
        let handles: Vec<_> = grid
            .chunks(chunk)
            .map(|c| scope.spawn(|| c.iter().map(|&v| row(v)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let mut transitions = Vec::new();
    for w in rows.windows(2) {
        let (Some(t0), Some(t1)) = (w[0].type_id, w[1].type_id) else { continue };
        if t0 == t1 {
            continue;
        }
        let (mut lo, mut hi) = (w[0].value, w[1].value);
        while (hi - lo).abs() > bisect_width {
            let mid = 0.5 * (lo + hi);
            match run(mid) {
                Ok(p) if p.symmetry.id == t0 => lo = mid,
                Ok(p) if p.symmetry.id == t1 => hi = mid,
                _ => break,
            }
        }
        transitions.push(Transition {
            lo,
            hi,
            estimate: 0.5 * (lo + hi),
            from_type: t0,
            to_type: t1,
        });
    }
    Ok(PhaseDiagram {
        parameter: parameter.to_string(),
        rows,
        transitions,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayCheck {
    pub type_id: usize,
    pub direction: Vec<f64>,
    /// Radii `t > 0` where `t ↦ Φ(t v)` is critical, within the scanned range.
    pub critical_radii: Vec<f64>,
    /// Largest `|∇Φ − ⟨∇Φ, v⟩ v| / (1 + |∇Φ|)` along the ray.
    pub max_tangential: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalOrbitReport {
    pub rays: Vec<RayCheck>,
    pub passed: bool,
}

fn tangential(g: &[f64], v: &[f64]) -> f64 {
    let p = dot(g, v);
    norm(&g.iter().zip(v).map(|(a, b)| a - p * b).collect::<Vec<_>>())
}

/// Checks each principal critical ray: the gradient of `Φ` along the ray is
/// parallel to it, and locates the interior critical points of `Φ(t v)` for
/// `0 < t ≤ max_radius`.
pub fn verify_critical_orbits(
    model: &LandauModel,
    lambda: &[f64],
    orbit_set: &PrincipalCriticalOrbitSet,
    max_radius: f64,
    tol: f64,
) -> CriticalOrbitReport {
    let pot = model.potential(lambda);
    let mut out = Vec::new();
    for ray in &orbit_set.rays {
        let v = &ray.unit;
        let at = |t: f64| v.iter().map(|a| a * t).collect::<Vec<f64>>();
        let radial = |t: f64| dot(&pot.gradient(&at(t)), v);
        let samples = 400;
        let mut max_tan: f64 = 0.0;
        let mut radii = Vec::new();
        let mut prev: Option<(f64, f64)> = None;
        for s in 1..=samples {
            let t = max_radius * s as f64 / samples as f64;
            let g = pot.gradient(&at(t));
            max_tan = max_tan.max(tangential(&g, v) / (1.0 + norm(&g)));
            let r = dot(&g, v);
            if let Some((t0, r0)) = prev {
                if r0 == 0.0 || r0.signum() != r.signum() {
                    let (mut lo, mut hi) = (t0, t);
                    for _ in 0..80 {
                        let mid = 0.5 * (lo + hi);
                        if radial(mid).signum() == radial(lo).signum() {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    let tc = 0.5 * (lo + hi);
                    let g = pot.gradient(&at(tc));
                    max_tan = max_tan.max(tangential(&g, v) / (1.0 + norm(&g)));
                    radii.push(tc);
                }
            }
            prev = Some((t, r));
        }
        out.push(RayCheck {
            type_id: ray.type_id,
            direction: v.clone(),
            critical_radii: radii,
            max_tangential: max_tan,
            passed: max_tan <= tol,
        });
    }
    let passed = out.iter().all(|r| r.passed);
    CriticalOrbitReport { rays: out, passed }
}
