//! Removes the sextic term of `aJ + bJ² + cJ³` on the Z2 line by invariant
//! changes of coordinates, then checks numerically that the original and
//! reduced potentials agree to seventh order.

use orbitscope::group::catalog;
use orbitscope::invariants::compute_mib;
use orbitscope::landau::LandauModel;
use orbitscope::reduction::{reduce, verify_reduction, GradedPotential, ReductionContext};

fn main() -> orbitscope::Result<()> {
    let rep = catalog::z2_inversion(1);
    let basis = compute_mib(&rep, None)?;
    let ctx = ReductionContext::new(&rep, &basis)?;

    // `a` may vanish, `b` stays away from zero
    let model = LandauModel::parse(&rep, &basis, "a*J1 + b*J1^2 + c*J1^3", &["a"])?;
    let psi = GradedPotential::from_model(&model);
    let report = reduce(&psi, 6, &ctx)?;
    print!("{}", report.render());

    let lambdas = [vec![-0.5, 1.0, 0.3], vec![0.2, 1.0, -0.4], vec![0.0, 1.0, 1.0]];
    let check = verify_reduction(&psi, &report, &ctx, &lambdas, &[vec![0.3]])?;
    print!("{}", check.render());

    // with every coefficient critical nothing can be removed
    let model = LandauModel::parse(&rep, &basis, "a*J1 + b*J1^2 + c*J1^3", &["a", "b", "c"])?;
    let frozen = reduce(&GradedPotential::from_model(&model), 6, &ctx)?;
    println!("all critical: {} non-removable, reduced {}", frozen.non_removable.len(), frozen.reduced);
    Ok(())
}
