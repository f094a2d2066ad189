//! Symmetry types, the isotropy lattice and the critical rays that every
//! invariant potential has on the unit sphere.

use orbitscope::group::catalog;
use orbitscope::rational::q;
use orbitscope::strata::{isotropy_lattice, principal_critical_orbits, stratum_of};

fn main() -> orbitscope::Result<()> {
    for (name, rep) in [("D4", catalog::d4()), ("Z2xZ2", catalog::z2xz2()), ("S3", catalog::symmetric_perm(3))] {
        let lattice = isotropy_lattice(&rep)?;
        println!("== {name}");
        for t in &lattice.types {
            println!("  {} realized {} conjugates {}", t.label(), t.realized, t.conjugates.len());
        }
        println!("  covers {:?}, principal {:?}", lattice.hasse, lattice.principal);
        for ray in principal_critical_orbits(&rep)?.rays {
            println!("  critical ray of T{} through {:?}, orbit of {}", ray.type_id, ray.unit, ray.orbit_size);
        }
    }
    let d4 = catalog::d4();
    let x = [q(2), q(2)];
    println!("stratum of (2, 2) under D4: {}", stratum_of(&d4, &x)?.label());
    Ok(())
}
