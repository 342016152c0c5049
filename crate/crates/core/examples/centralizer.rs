//! Centralizers of small groups, their orbits, kernels and level bounds.

use arboreal::subgroup::{centralizer, centralizer_level_report, close_under_group_ops};
use arboreal::tree::{TreeAutomorphism, TreeShape, DEFAULT_ENUMERATION_LIMIT};

fn main() -> arboreal::Result<()> {
    for (d, n) in [(2, 2), (2, 3), (3, 2)] {
        let shape = TreeShape::new(d, n)?;
        let g = TreeAutomorphism::root_rotation(shape)?;
        let h = close_under_group_ops(shape, vec![g], DEFAULT_ENUMERATION_LIMIT)?;
        let c = centralizer(&h, DEFAULT_ENUMERATION_LIMIT)?;
        println!("{shape}: |H| = {}, |C(H)| = {}", h.order()?, c.order()?);
        for level in 1..n {
            let r = centralizer_level_report(&h, &c, level)?;
            println!(
                "  level {level}: m = {}, free = {}, kernel {} of at most {}, bound {}",
                r.m, r.free, r.kernel_order, r.kernel_bound, r.bound
            );
        }
    }
    Ok(())
}
