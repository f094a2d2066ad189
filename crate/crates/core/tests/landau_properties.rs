mod common;

use common::{fixture, float_point};
use orbitscope::landau::{classify_symmetry, linspace, minimize, sweep, CoeffKind, LandauModel, MinimizeOptions};
use orbitscope::rational::{to_f64, Q};
use orbitscope::strata::principal_critical_orbits;
use proptest::prelude::*;

const MODELS: [(&str, &str, &[(&str, f64)]); 4] = [
    ("z2xz2", "a*J1 + b*J2 + J1^2 + J2^2 + e*J1 J2", &[("a", -1.0), ("b", -0.5), ("e", 0.5)]),
    ("d4", "a*J1 + J1^2 + c*J2 + J2^2", &[("a", -1.0), ("c", 0.5)]),
    ("d4-skew", "a*J1 + J1^2 + c*J2 + J2^2", &[("a", -1.0), ("c", -0.5)]),
    ("z4", "a*J1 + J1^2 + b*J2 + c*J3", &[("a", -1.0), ("b", 0.3), ("c", 0.2)]),
];

fn model(i: usize) -> (LandauModel, Vec<f64>) {
    let (g, text, values) = MODELS[i];
    let (_, rep, basis) = fixture(g);
    let m = LandauModel::parse(rep, basis, text, &[]).unwrap();
    let l = m.lambda(values).unwrap();
    (m, l)
}

fn frob(rows: &[Vec<Q>]) -> f64 {
    rows.iter().flatten().map(|x| to_f64(x).powi(2)).sum::<f64>().sqrt()
}

#[test]
fn critical_points_come_in_orbits() {
    for i in 0..MODELS.len() {
        let (m, l) = model(i);
        let rep = m.rep();
        let pot = m.potential(&l);
        let opts = MinimizeOptions::default();
        for p in minimize(&m, &l, &opts).unwrap() {
            assert!(p.gradient_norm <= opts.grad_tol, "{}: {}", MODELS[i].0, p.gradient_norm);
            for g in rep.elements() {
                // ∇Φ(gx) = T_g^{-T} ∇Φ(x); Frobenius norms bound the condition number
                let t = g.matrix();
                let cond = frob(&t.to_rows()) * frob(&t.inverse().unwrap().to_rows());
                let moved = g.apply_f64(&p.location);
                let r = pot.gradient(&moved).iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!(r <= p.gradient_norm * cond + 1e-12, "{}: {r}", MODELS[i].0);
            }
            let mut images: Vec<Vec<f64>> = Vec::new();
            for g in rep.elements() {
                let y = g.apply_f64(&p.location);
                if !images.iter().any(|z| z.iter().zip(&y).all(|(a, b)| (a - b).abs() < 1e-7)) {
                    images.push(y);
                }
            }
            assert_eq!(images.len(), p.orbit_size);
            assert_eq!(p.orbit_size * p.symmetry.order, rep.order());
        }
    }
}

#[test]
fn pitchfork_minimizer_magnitude() {
    let (_, rep, basis) = fixture("z2");
    let m = LandauModel::parse(rep, basis, "a*J1 + b*J1^2", &[]).unwrap();
    for (a, b) in [(-1.0, 0.5), (-0.3, 2.0), (-0.01, 1.0), (-2.0, 3.0)] {
        let pts = minimize(&m, &m.lambda(&[("a", a), ("b", b)]).unwrap(), &MinimizeOptions::default()).unwrap();
        let x = pts[0].location[0].abs();
        assert!((x - (-a / (2.0 * b)).sqrt()).abs() <= 1e-8, "a={a} b={b}: {x}");
    }
}

#[test]
fn bifurcating_minima_lie_on_critical_rays() {
    let (m, _) = model(1);
    let rays = principal_critical_orbits(m.rep()).unwrap();
    let ray_types: Vec<usize> = rays.rays.iter().map(|r| r.type_id).collect();
    for c in [0.5, -0.5] {
        let d = sweep(&m, "a", &linspace(-1.0, 1.0, 11), &[("c", c)], &MinimizeOptions::default(), 1e-6).unwrap();
        assert_eq!(d.rows.len(), 11);
        for row in &d.rows {
            let t = row.type_id.expect("every grid point is classified");
            if row.value < 0.0 {
                assert!(ray_types.contains(&t), "c={c} a={}: type {t}", row.value);
            }
        }
        assert_eq!(d.transitions.len(), 1);
        assert!(d.transitions[0].estimate.abs() < 1e-5);
    }
}

#[test]
fn critical_kinds_follow_declarations() {
    let (_, rep, basis) = fixture("d4");
    let mut m = LandauModel::parse(rep, basis, "a*J1 + J1^2 + c*J2 + J2^2", &["a"]).unwrap();
    assert_eq!(m.params()[m.param_index("a").unwrap()].kind, CoeffKind::Critical);
    m.set_kind("a", CoeffKind::Generic).unwrap();
    assert_eq!(m.params()[m.param_index("a").unwrap()].kind, CoeffKind::Generic);
    assert!(m.set_kind("zz", CoeffKind::Generic).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn potential_is_invariant(i in 0usize..4, x in float_point(2)) {
        let (m, l) = model(i);
        let pot = m.potential(&l);
        let v = pot.value(&x);
        for g in m.rep().elements() {
            prop_assert!((pot.value(&g.apply_f64(&x)) - v).abs() <= 1e-10 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn classification_is_conjugation_invariant(i in 0usize..4, sub in 0usize..16, c in proptest::collection::vec(-5i64..=5, 2)) {
        let (m, _) = model(i);
        let rep = m.rep();
        let subs = rep.all_subgroups(1000).unwrap();
        let h = &subs[sub % subs.len()];
        let fix = rep.fixed_subspace(h);
        let mut x = vec![0.0; rep.dim()];
        for (b, k) in fix.iter().zip(&c) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += *k as f64 * to_f64(bi);
            }
        }
        prop_assume!(x.iter().any(|v| v.abs() > 0.0));
        let t = classify_symmetry(rep, &x, 1e-8).unwrap();
        for g in rep.elements() {
            prop_assert_eq!(classify_symmetry(rep, &g.apply_f64(&x), 1e-8).unwrap().id, t.id);
        }
    }
}
