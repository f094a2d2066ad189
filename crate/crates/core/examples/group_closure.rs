//! Closes a set of generator matrices into a finite group and prints its
//! structure: order, element orders, subgroups and the invariant metric.
//!
//! `cargo run --example group_closure -- data/d4-skew.json`

use orbitscope::group::{catalog, element_order_profile, GroupSpec, DEFAULT_MAX_ORDER, DEFAULT_SUBGROUP_CAP};

fn main() -> orbitscope::Result<()> {
    let rep = match std::env::args().nth(1) {
        Some(path) => GroupSpec::from_json(&std::fs::read_to_string(path)?)?.build(DEFAULT_MAX_ORDER)?,
        None => catalog::d4(),
    };
    println!("dim {} order {} tables ok: {}", rep.dim(), rep.order(), rep.verify_tables());
    println!("element orders {:?}", element_order_profile(&rep));

    let subgroups = rep.all_subgroups(DEFAULT_SUBGROUP_CAP)?;
    println!("{} subgroups", subgroups.len());
    for h in &subgroups {
        let fix = rep.fixed_subspace(h);
        println!("  order {:>2} members {:?} normal {} dim Fix {}", h.order(), h.members(), rep.is_normal(h), fix.len());
    }

    let eta = rep.invariant_metric();
    println!("invariant metric (identity: {}):", eta.is_identity());
    for row in eta.eta().to_rows() {
        let row: Vec<String> = row.iter().map(orbitscope::rational::format_q).collect();
        println!("  [{}]", row.join(", "));
    }
    Ok(())
}
