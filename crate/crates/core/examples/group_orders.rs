//! Orders of Aut(T_n), the branch stabilizer and the aligned subgroup S_n,
//! from closed forms and by enumeration.

use arboreal::subgroup::{
    build_branch_stabilizer, build_s_subgroup, s_group_order, stab_branch_order, stab_s_index, BranchSpec,
};
use arboreal::tree::{aut_order, enumerate_aut, TreeShape, DEFAULT_ENUMERATION_LIMIT};

fn main() -> arboreal::Result<()> {
    println!("{:>3} {:>3} {:>3} {:>10} {:>8} {:>6} {:>6}  enumerated", "d", "n", "m", "|Aut|", "|Stab|", "|S|", "index");
    for (d, n) in [(2, 2), (2, 3), (2, 4), (3, 2)] {
        let shape = TreeShape::new(d, n)?;
        for m in 1..=n.min(2) {
            let spec = BranchSpec::zeros(shape, m)?;
            let stab = build_branch_stabilizer(&spec, DEFAULT_ENUMERATION_LIMIT)?;
            let s = build_s_subgroup(&spec, DEFAULT_ENUMERATION_LIMIT)?;
            let aut = if n <= 3 {
                enumerate_aut(shape, DEFAULT_ENUMERATION_LIMIT)?.len().to_string()
            } else {
                "-".into()
            };
            println!(
                "{d:>3} {n:>3} {m:>3} {:>10} {:>8} {:>6} {:>6}  {aut}/{}/{}",
                aut_order(&shape),
                stab_branch_order(d, n),
                s_group_order(d, n, m)?,
                stab_s_index(d, n, m)?,
                stab.order()?,
                s.order()?,
            );
        }
    }

    // Closed forms stay exact far past enumeration.
    let big = s_group_order(2, 12, 3)?;
    println!("|S_12| (d=2, m=3) has {} digits", big.to_string().len());
    Ok(())
}
