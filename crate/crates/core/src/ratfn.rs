//! Rational functions of the control parameters, used as coefficients when a
//! Landau polynomial is reduced symbolically.
//!
//! Cancellation is partial: common monomial factors, constant denominators
//! and exact polynomial division are simplified; general gcds are not.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::poly::{Monomial, Polynomial, Ring, VarKind};
use crate::rational::{format_q, to_f64, Q};

#[derive(Debug, Clone, PartialEq)]
pub struct RatFn {
    num: Polynomial,
    den: Polynomial,
}

fn pad(p: &Polynomial, k: usize) -> Polynomial {
    if p.nvars() == k {
        return p.clone();
    }
    Polynomial::from_terms(
        VarKind::Param,
        k,
        p.terms().map(|(m, c)| {
            let mut e = m.0.clone();
            e.resize(k, 0);
            (Monomial(e), c.clone())
        }),
    )
}

/// `a / b` when `b` divides `a` exactly.
pub fn div_exact(a: &Polynomial, b: &Polynomial) -> Option<Polynomial> {
    let (lm, lc) = b.leading().map(|(m, c)| (m.clone(), c.clone()))?;
    let mut rem = a.clone();
    let mut quo = Polynomial::zero(a.kind(), a.nvars());
    while let Some((m, c)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
        if !lm.divides(&m) {
            return None;
        }
        let t = Polynomial::monomial(a.kind(), m.div(&lm), c / &lc);
        rem = &rem - &(&t * b);
        quo = &quo + &t;
    }
    Some(quo)
}

impl RatFn {
    pub fn constant(c: Q) -> Self {
        RatFn {
            num: Polynomial::constant(VarKind::Param, 0, c),
            den: Polynomial::one(VarKind::Param, 0),
        }
    }

    pub fn from_poly(p: Polynomial) -> Self {
        let den = Polynomial::one(VarKind::Param, p.nvars());
        RatFn { num: p.with_kind(VarKind::Param), den }.normalized()
    }

    /// The parameter `λ_i` among `k`.
    pub fn param(k: usize, i: usize) -> Self {
        Self::from_poly(Polynomial::var(VarKind::Param, k, i))
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    fn nvars(&self) -> usize {
        self.num.nvars().max(self.den.nvars())
    }

    fn normalized(self) -> Self {
        let k = self.nvars();
        let mut num = pad(&self.num, k);
        let mut den = pad(&self.den, k);
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFn {
                num: Polynomial::zero(VarKind::Param, k),
                den: Polynomial::one(VarKind::Param, k),
            };
        }
        // common monomial factor
        let mut g: Option<Vec<u32>> = None;
        for (m, _) in num.terms().chain(den.terms()) {
            g = Some(match g {
                None => m.0.clone(),
                Some(v) => v.iter().zip(&m.0).map(|(a, b)| *a.min(b)).collect(),
            });
        }
        if let Some(g) = g.filter(|g| g.iter().any(|&e| e > 0)) {
            let gm = Monomial(g);
            let strip = |p: &Polynomial| {
                Polynomial::from_terms(VarKind::Param, k, p.terms().map(|(m, c)| (m.div(&gm), c.clone())))
            };
            num = strip(&num);
            den = strip(&den);
        }
        if den.degree() != Some(0) {
            if let Some(q) = div_exact(&num, &den) {
                num = q;
                den = Polynomial::one(VarKind::Param, k);
            } else if let Some(q) = div_exact(&den, &num) {
                num = Polynomial::one(VarKind::Param, k);
                den = q;
            }
        }
        let lc = den.leading().expect("nonzero").1.clone();
        if !lc.is_one() {
            let inv = lc.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        RatFn { num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        RatFn {
            num: self.den.clone(),
            den: self.num.clone(),
        }
        .normalized()
    }

    pub fn div(&self, other: &Self) -> Self {
        self.rmul(&other.inv())
    }

    /// Denominator stays a nonzero constant times a monomial in the
    /// non-critical parameters once every critical parameter is set to zero.
    pub fn is_regular(&self, critical: &[bool]) -> bool {
        let surviving: Vec<_> = self
            .den
            .terms()
            .filter(|(m, _)| !m.0.iter().enumerate().any(|(i, &e)| e > 0 && critical.get(i).copied().unwrap_or(false)))
            .collect();
        surviving.len() == 1
    }

    /// `1/self` is regular.
    pub fn is_invertible_uniformly(&self, critical: &[bool]) -> bool {
        !self.is_zero() && self.inv().is_regular(critical)
    }

    pub fn eval(&self, lambda: &[f64]) -> f64 {
        let k = self.nvars();
        let pt = &lambda[..k.min(lambda.len())];
        if pt.len() < k {
            return f64::NAN;
        }
        self.num.to_float().eval(pt) / self.den.to_float().eval(pt)
    }

    pub fn eval_q(&self, lambda: &[Q]) -> Option<Q> {
        let k = self.nvars();
        let d = self.den.eval_q(&lambda[..k]).ok()?;
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval_q(&lambda[..k]).ok()? / d)
    }

    /// Rational constant, if the function is one.
    pub fn as_constant(&self) -> Option<Q> {
        (self.num.degree().unwrap_or(0) == 0 && self.is_polynomial())
            .then(|| self.num.coeff(&Monomial::one(self.num.nvars())) / self.den.coeff(&Monomial::one(self.den.nvars())))
    }

    pub fn render(&self, names: &[String]) -> String {
        let name = |i: usize| names.get(i).cloned().unwrap_or_else(|| format!("p{}", i + 1));
        let coeff = |c: &Q| (c.is_negative(), format_q(&c.abs()));
        let n = self.num.fmt_with(&name, &coeff);
        if self.is_polynomial() {
            return n;
        }
        let d = self.den.fmt_with(&name, &coeff);
        let wrap = |s: String, p: &Polynomial| if p.len() > 1 { format!("({s})") } else { s };
        format!("{}/{}", wrap(n, &self.num), wrap(d, &self.den))
    }

    /// `(negative, magnitude)` for polynomial printing with named parameters.
    pub fn sign_and_text(&self, names: &[String]) -> (bool, String) {
        if let Some(c) = self.as_constant() {
            return (c.is_negative(), format_q(&c.abs()));
        }
        if self.num.len() == 1 && self.is_polynomial() {
            let (_, c) = self.num.leading().expect("nonzero");
            if c.is_negative() {
                return (true, self.neg_text(names));
            }
        }
        let s = self.render(names);
        (false, if self.num.len() > 1 && self.is_polynomial() { format!("({s})") } else { s })
    }

    fn neg_text(&self, names: &[String]) -> String {
        self.rneg().render(names)
    }

    pub fn to_f64_const(&self) -> Option<f64> {
        self.as_constant().map(|c| to_f64(&c))
    }
}

impl Ring for RatFn {
    fn rzero() -> Self {
        RatFn::constant(Q::zero())
    }

    fn rone() -> Self {
        RatFn::constant(Q::one())
    }

    fn is_rzero(&self) -> bool {
        self.num.is_zero()
    }

    fn radd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let k = self.nvars().max(other.nvars());
        let (a, b) = (pad(&self.num, k), pad(&self.den, k));
        let (c, d) = (pad(&other.num, k), pad(&other.den, k));
        let r = if b == d {
            RatFn { num: &a + &c, den: b }
        } else if let Some(e) = div_exact(&b, &d) {
            RatFn { num: &a + &(&c * &e), den: b }
        } else if let Some(e) = div_exact(&d, &b) {
            RatFn { num: &(&a * &e) + &c, den: d }
        } else {
            RatFn {
                num: &(&a * &d) + &(&c * &b),
                den: &b * &d,
            }
        };
        r.normalized()
    }

    fn rsub(&self, other: &Self) -> Self {
        self.radd(&other.rneg())
    }

    fn rmul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::rzero();
        }
        let k = self.nvars().max(other.nvars());
        RatFn {
            num: &pad(&self.num, k) * &pad(&other.num, k),
            den: &pad(&self.den, k) * &pad(&other.den, k),
        }
        .normalized()
    }

    fn rneg(&self) -> Self {
        RatFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    fn from_q(q: &Q) -> Self {
        RatFn::constant(q.clone())
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&[]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn p(s: &str) -> RatFn {
        RatFn::from_poly(Polynomial::parse(s, VarKind::Param, 3).unwrap())
    }

    #[test]
    fn arithmetic_and_cancellation() {
        let a = p("p1");
        let b = p("p2");
        let x = a.div(&b).rmul(&b);
        assert_eq!(x, a);
        let y = p("p1 p2 + p1^2").div(&p("p1 + p2"));
        assert_eq!(y, a);
        assert!(a.rsub(&a).is_zero());
        let z = RatFn::constant(q(3)).div(&p("16 p2"));
        assert_eq!(z.render(&["a".into(), "b".into(), "c".into()]), "3/16/b");
        let s = a.div(&b).radd(&RatFn::constant(q(1)));
        assert_eq!(s.eval(&[1.0, 2.0, 0.0]), 1.5);
    }

    #[test]
    fn regularity() {
        let crit = [true, false, false];
        assert!(p("p3").div(&p("16 p2")).is_regular(&crit));
        assert!(!p("p3").div(&p("12 p1")).is_regular(&crit));
        assert!(!p("1").div(&p("p2 + p1")).is_regular(&[false, false, false]));
        assert!(!p("1").div(&p("p2 + p1")).is_regular(&[true, true, false]));
        assert!(p("1").div(&p("p2 + p1")).is_regular(&crit));
        assert!(p("p1 p3").div(&p("12 p1")).is_regular(&crit));
        assert!(p("8 p2").is_invertible_uniformly(&crit));
        assert!(!p("8 p1").is_invertible_uniformly(&crit));
    }

    #[test]
    fn exact_division() {
        let a = Polynomial::parse("p1^2 - p2^2", VarKind::Param, 2).unwrap();
        let b = Polynomial::parse("p1 - p2", VarKind::Param, 2).unwrap();
        assert_eq!(div_exact(&a, &b).unwrap(), Polynomial::parse("p1 + p2", VarKind::Param, 2).unwrap());
        assert!(div_exact(&b, &a).is_none());
    }
}
