//! Gradient flow of a D4 Landau potential: the trajectory, its image in
//! orbit space and the checks that the flow respects the symmetry.

use orbitscope::dynamics::{check_stratum_invariance, gradient_field, integrate, orbit_space_consistency, project_trajectory};
use orbitscope::group::catalog;
use orbitscope::invariants::compute_mib;
use orbitscope::landau::LandauModel;

fn main() -> orbitscope::Result<()> {
    let rep = catalog::d4();
    let basis = compute_mib(&rep, None)?;
    let model = LandauModel::parse(&rep, &basis, "a*J1 + J1^2 + c*J2 + J2^2", &[])?;
    let field = gradient_field(&model, &model.lambda(&[("a", -1.0), ("c", -0.5)])?);

    let traj = integrate(&field, &[0.4, 0.1], 15.0, 1e-2)?;
    let orbit = project_trajectory(&basis, &traj);
    for i in (0..traj.len()).step_by(250) {
        println!("t {:>5.2}  x {:.6?}  J {:.6?}", traj.times[i], traj.states[i], orbit.j_states[i]);
    }
    let c = orbit_space_consistency(&field, &traj);
    println!("orbit-space residual {:.2e}, energy monotone {}", c.max_residual, c.energy_monotone);

    for h in rep.all_subgroups(1000)? {
        let r = check_stratum_invariance(&rep, &field, &h, 4, 1)?;
        println!("Fix{:?} (dim {}) invariant: {}", h.members(), r.fix_dim, r.passed);
    }
    Ok(())
}
