//! Writes the catalog groups as spec files.
//!
//! `cargo run --example group_specs -- data` fills `data/` with one JSON file
//! per group; without an argument the D4 spec is printed.

use orbitscope::group::{catalog, GroupSpec};
use orbitscope::linalg::QMatrix;
use orbitscope::rational::q_frac;

fn main() -> orbitscope::Result<()> {
    let mut specs: Vec<GroupSpec> = catalog::names().iter().filter_map(|n| catalog::spec(n)).collect();

    // D4 in a skewed basis: same group, rational non-orthogonal matrices.
    let s = QMatrix::from_rows(vec![vec![q_frac(2, 1), q_frac(1, 1)], vec![q_frac(0, 1), q_frac(1, 2)]]);
    let skew = catalog::conjugated(&catalog::d4(), &s);
    let gens: Vec<QMatrix> = skew.generators().iter().map(|&g| skew.element(g).matrix().clone()).collect();
    specs.push(GroupSpec::from_matrices("d4-skew", &gens));

    match std::env::args().nth(1) {
        Some(dir) => {
            std::fs::create_dir_all(&dir)?;
            for spec in &specs {
                let rep = spec.build(orbitscope::group::DEFAULT_MAX_ORDER)?;
                let path = std::path::Path::new(&dir).join(format!("{}.json", spec.name));
                std::fs::write(&path, spec.to_json() + "\n")?;
                println!("{}  order {}  dim {}", path.display(), rep.order(), rep.dim());
            }
        }
        None => println!("{}", specs[4].to_json()),
    }
    Ok(())
}
