//! Critical points of a D4 Landau polynomial and its phase diagram in `c`.
//!
//! For `a < 0` the minimum sits on an axis when `c > 0`; for
//! `c < -1/8` it moves to a diagonal, with a low-symmetry window between.

use orbitscope::group::catalog;
use orbitscope::invariants::compute_mib;
use orbitscope::landau::{check_stability, linspace, minimize, sweep, LandauModel, MinimizeOptions};

fn main() -> orbitscope::Result<()> {
    let rep = catalog::d4();
    let basis = compute_mib(&rep, None)?;
    let model = LandauModel::parse(&rep, &basis, "a*J1 + J1^2 + c*J2 + J2^2", &["a"])?;
    println!("model {model}");

    let opts = MinimizeOptions::default();
    for c in [0.5, -0.05, -0.5] {
        let lambda = model.lambda(&[("a", -1.0), ("c", c)])?;
        println!("c = {c}: bounded below {}", check_stability(&model, &lambda, 100.0, 64, opts.seed).stable);
        for p in minimize(&model, &lambda, &opts)? {
            println!("  {:<8} {} value {:+.6} at {:.5?}", p.kind(), p.symmetry.label(), p.value, p.location);
        }
    }

    let diagram = sweep(&model, "c", &linspace(-1.0, 1.0, 21), &[("a", -1.0)], &opts, 1e-9)?;
    for t in &diagram.transitions {
        println!("transition T{} -> T{} at c = {:.8}", t.from_type, t.to_type, t.estimate);
    }
    print!("{}", diagram.to_csv(2));
    Ok(())
}
