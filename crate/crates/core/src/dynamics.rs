//! Equivariant gradient flow `ẋ = −η̃∇Φ(x)`, invariance of fixed spaces
//! under the flow, and projection of trajectories to orbit space.
//!
//! The sign makes minima of `Φ` attractors. Finite groups have finite
//! orbits, so relative equilibria are plain equilibria and need no separate
//! treatment.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{FiniteGroupRep, Subgroup};
use crate::invariants::IntegrityBasis;
use crate::landau::{LandauModel, Potential};
use crate::rational::to_f64;

/// Tolerated energy increase per step before a step is retried.
pub const MONOTONICITY_SLACK: f64 = 1e-9;
/// Step-halving levels tried before giving up on monotonicity.
pub const MAX_RETRIES: usize = 8;

pub trait VectorField: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> Vec<f64>;

    /// Lyapunov function for gradient fields; `None` disables the
    /// monotonicity guard.
    fn energy(&self, _x: &[f64]) -> Option<f64> {
        None
    }
}

/// `f(x) = −η̃ ∇Φ(x)`.
#[derive(Debug, Clone)]
pub struct GradientField {
    potential: Potential,
    eta_inv: Vec<Vec<f64>>,
}

pub fn gradient_field(model: &LandauModel, lambda: &[f64]) -> GradientField {
    GradientField::new(model.potential(lambda), model.rep())
}

impl GradientField {
    pub fn new(potential: Potential, rep: &FiniteGroupRep) -> Self {
        let e = rep.invariant_metric().inverse();
        let n = potential.dim();
        let eta_inv = (0..n).map(|i| (0..n).map(|j| to_f64(&e[(i, j)])).collect()).collect();
        GradientField { potential, eta_inv }
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }
}

impl VectorField for GradientField {
    fn dim(&self) -> usize {
        self.potential.dim()
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        let g = self.potential.gradient(x);
        self.eta_inv
            .iter()
            .map(|row| -row.iter().zip(&g).map(|(e, gi)| e * gi).sum::<f64>())
            .collect()
    }

    fn energy(&self, x: &[f64]) -> Option<f64> {
        Some(self.potential.value(x))
    }
}

/// Any closure as a field, without energy diagnostics.
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> Vec<f64> + Sync> FnField<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnField { dim, f }
    }
}

impl<F: Fn(&[f64]) -> Vec<f64> + Sync> VectorField for FnField<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        (self.f)(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub dt: f64,
    pub integrator: String,
    /// Number of steps that needed step halving to stay monotone.
    pub retried_steps: usize,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory has the initial state")
    }

    /// `t, x1..xn, J1..Jk, phi` with `Φ` from the potential.
    pub fn to_csv(&self, potential: &Potential) -> String {
        let n = potential.dim();
        let k = self.states.first().map_or(0, |x| potential.orbit_map(x).len());
        let mut s = String::from("t");
        for i in 1..=n {
            s.push_str(&format!(",x{i}"));
        }
        for a in 1..=k {
            s.push_str(&format!(",J{a}"));
        }
        s.push_str(",phi\n");
        for (t, x) in self.times.iter().zip(&self.states) {
            s.push_str(&format!("{t:.6}"));
            for v in x {
                s.push_str(&format!(",{v:.12e}"));
            }
            for v in potential.orbit_map(x) {
                s.push_str(&format!(",{v:.12e}"));
            }
            s.push_str(&format!(",{:.12e}\n", potential.value(x)));
        }
        s
    }
}

fn rk4_step(field: &dyn VectorField, x: &[f64], h: f64) -> Vec<f64> {
    let axpy = |a: &[f64], s: f64, b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(u, v)| u + s * v).collect() };
    let k1 = field.eval(x);
    let k2 = field.eval(&axpy(x, h / 2.0, &k1));
    let k3 = field.eval(&axpy(x, h / 2.0, &k2));
    let k4 = field.eval(&axpy(x, h, &k3));
    (0..x.len())
        .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// `2^level` RK4 substeps covering one step of size `dt`.
fn substeps(field: &dyn VectorField, x: &[f64], dt: f64, level: usize) -> Vec<f64> {
    let m = 1usize << level;
    let h = dt / m as f64;
    let mut y = x.to_vec();
    for _ in 0..m {
        y = rk4_step(field, &y, h);
    }
    y
}

/// Fixed-step classical Runge–Kutta on the grid `t_i = i·dt`. For fields
/// with an energy, a step that raises it by more than
/// [`MONOTONICITY_SLACK`] is redone with 2, 4, … substeps.
pub fn integrate(field: &dyn VectorField, x0: &[f64], t_end: f64, dt: f64) -> Result<Trajectory> {
    if !(dt > 0.0) || !t_end.is_finite() || t_end < 0.0 {
        return Err(Error::InvalidModel(format!("need dt > 0 and t_end >= 0, got dt={dt}, t_end={t_end}")));
    }
    if x0.len() != field.dim() {
        return Err(Error::DimensionMismatch {
            expected: field.dim(),
            found: x0.len(),
        });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteState { step: 0 });
    }
    let steps = (t_end / dt).round() as usize;
    let mut times = vec![0.0];
    let mut states = vec![x0.to_vec()];
    let mut x = x0.to_vec();
    let mut energy = field.energy(&x);
    let mut retried_steps = 0;
    for step in 1..=steps {
        let mut level = 0;
        let next = loop {
            let y = substeps(field, &x, dt, level);
            if y.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteState { step });
            }
            let Some(e0) = energy else { break y };
            let e1 = field.energy(&y).unwrap_or(f64::NAN);
            if e1 <= e0 + MONOTONICITY_SLACK {
                energy = Some(e1);
                break y;
            }
            if level == MAX_RETRIES {
                return Err(Error::MonotonicityViolation { step, retries: level });
            }
            level += 1;
        };
        if level > 0 {
            retried_steps += 1;
        }
        x = next;
        times.push(step as f64 * dt);
        states.push(x.clone());
    }
    Ok(Trajectory {
        times,
        states,
        dt,
        integrator: "rk4-fixed".into(),
        retried_steps,
    })
}

/// Independent trajectories, one thread each.
pub fn integrate_many(field: &dyn VectorField, starts: &[Vec<f64>], t_end: f64, dt: f64) -> Vec<Result<Trajectory>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = starts
            .iter()
            .map(|x0| scope.spawn(move || integrate(field, x0, t_end, dt)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("integration worker panicked")).collect()
    })
}

/// Orthonormal basis (Gram–Schmidt) of the span of `vs`.
fn orthonormal(vs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for u in &out {
            let d: f64 = w.iter().zip(u).map(|(a, b)| a * b).sum();
            w.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
        }
        let n = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-12 {
            out.push(w.into_iter().map(|a| a / n).collect());
        }
    }
    out
}

/// Distance from `v` to the span of the orthonormal `basis`.
fn off_subspace(basis: &[Vec<f64>], v: &[f64]) -> f64 {
    let mut w = v.to_vec();
    for u in basis {
        let d: f64 = w.iter().zip(u).map(|(a, b)| a * b).sum();
        w.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
    }
    w.iter().map(|a| a * a).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StratumInvarianceReport {
    pub subgroup: Vec<usize>,
    pub fix_dim: usize,
    pub samples: usize,
    /// Largest component of `f(x)` off `Fix(H)` over the samples.
    pub max_field_offset: f64,
    /// Largest distance from `Fix(H)` along the sampled trajectories.
    pub max_trajectory_offset: f64,
    pub violations: Vec<Vec<f64>>,
    pub passed: bool,
}

pub const FIELD_OFFSET_TOL: f64 = 1e-10;
pub const TRAJECTORY_OFFSET_TOL: f64 = 1e-8;

/// `f(Fix H) ⊂ Fix H`, checked on seeded random points of `Fix(H)` and along
/// short trajectories started there.
pub fn check_stratum_invariance(
    rep: &FiniteGroupRep,
    field: &dyn VectorField,
    h: &Subgroup,
    samples: usize,
    seed: u64,
) -> Result<StratumInvarianceReport> {
    let fix: Vec<Vec<f64>> = rep.fixed_subspace(h).iter().map(|v| v.iter().map(to_f64).collect()).collect();
    let onb = orthonormal(&fix);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = StratumInvarianceReport {
        subgroup: h.members().to_vec(),
        fix_dim: onb.len(),
        samples,
        max_field_offset: 0.0,
        max_trajectory_offset: 0.0,
        violations: Vec::new(),
        passed: true,
    };
    let n = rep.dim();
    let mut starts = Vec::new();
    for _ in 0..samples {
        let mut x = vec![0.0; n];
        for u in &onb {
            let c = rng.random_range(-1.0..1.0);
            x.iter_mut().zip(u).for_each(|(a, b)| *a += c * b);
        }
        let off = off_subspace(&onb, &field.eval(&x));
        report.max_field_offset = report.max_field_offset.max(off);
        if off > FIELD_OFFSET_TOL {
            report.violations.push(x.clone());
        }
        starts.push(x);
    }
    for (x, traj) in starts.iter().zip(integrate_many(field, &starts, 1.0, 1e-2)) {
        let traj = traj?;
        let off = traj.states.iter().map(|s| off_subspace(&onb, s)).fold(0.0, f64::max);
        report.max_trajectory_offset = report.max_trajectory_offset.max(off);
        if off > TRAJECTORY_OFFSET_TOL && !report.violations.contains(x) {
            report.violations.push(x.clone());
        }
    }
    report.passed = report.violations.is_empty();
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitSpaceTrajectory {
    pub times: Vec<f64>,
    pub j_states: Vec<Vec<f64>>,
}

pub fn project_trajectory(basis: &IntegrityBasis, traj: &Trajectory) -> OrbitSpaceTrajectory {
    let js = basis.to_float();
    OrbitSpaceTrajectory {
        times: traj.times.clone(),
        j_states: traj.states.iter().map(|x| js.iter().map(|p| p.eval(x)).collect()).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    /// Largest `|ΔJ/2dt − DJ(x)·f(x)|` over interior grid points.
    pub max_residual: f64,
    /// Largest increase of `Ψ` between consecutive orbit-space states.
    pub max_energy_increase: f64,
    pub energy_monotone: bool,
}

/// Central differences of `J(x(t))` against `DJ(x)·f(x)`; the residual is
/// `O(dt²)`. Also checks that `Ψ` does not increase along the projection.
pub fn orbit_space_consistency(field: &GradientField, traj: &Trajectory) -> ConsistencyReport {
    let pot = field.potential();
    let js: Vec<Vec<f64>> = traj.states.iter().map(|x| pot.orbit_map(x)).collect();
    let mut max_residual: f64 = 0.0;
    for i in 1..js.len().saturating_sub(1) {
        let x = &traj.states[i];
        let f = field.eval(x);
        let dj = pot.orbit_map_jacobian(x);
        for (a, row) in dj.iter().enumerate() {
            let pred: f64 = row.iter().zip(&f).map(|(d, v)| d * v).sum();
            let fd = (js[i + 1][a] - js[i - 1][a]) / (traj.times[i + 1] - traj.times[i - 1]);
            max_residual = max_residual.max((fd - pred).abs());
        }
    }
    let energies: Vec<f64> = js.iter().map(|j| pot.psi_value(j)).collect();
    let max_energy_increase = energies.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max).max(0.0);
    ConsistencyReport {
        max_residual,
        max_energy_increase,
        energy_monotone: max_energy_increase <= MONOTONICITY_SLACK,
    }
}
