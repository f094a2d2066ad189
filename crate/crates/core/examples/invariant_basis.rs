//! Molien series, minimal integrity basis, relations and P-matrix.
//!
//! `{±I}` on the plane needs three quadratic invariants tied by one relation;
//! the permutation action of S3 is coregular.

use orbitscope::group::catalog;
use orbitscope::invariants::{compute_mib, express_in_basis, is_coregular, molien_series, p_matrix};
use orbitscope::poly::{reynolds, Polynomial, VarKind};

fn show(name: &str, rep: &orbitscope::group::FiniteGroupRep) -> orbitscope::Result<()> {
    let basis = compute_mib(rep, None)?;
    println!("== {name}: molien {:?}", molien_series(rep, 8).coefficients());
    for (a, j) in basis.basis().iter().enumerate() {
        println!("  J{} = {j}", a + 1);
    }
    for r in basis.relations() {
        println!("  relation {r} = 0");
    }
    println!("  coregular: {}", is_coregular(&basis));
    let p = p_matrix(rep, &basis)?;
    for i in 0..p.size() {
        for h in i..p.size() {
            println!("  P{}{} = {}", i + 1, h + 1, p.entry(i, h));
        }
    }
    Ok(())
}

fn main() -> orbitscope::Result<()> {
    show("Z2 on R2", &catalog::z2_inversion(2))?;
    show("D4", &catalog::d4())?;
    let s3 = catalog::symmetric_perm(3);
    show("S3", &s3)?;

    // any invariant is a polynomial in the basis
    let basis = compute_mib(&s3, None)?;
    let p = reynolds(&s3, &Polynomial::parse("x1^4 + 2 x1 x2^2", VarKind::X, 3)?)?;
    println!("Reynolds image {p}\n  = {}", express_in_basis(&s3, &basis, &p)?);
    Ok(())
}
