//! log|S_n| / log|Stab_n| approaching 1 - d^-m.

use arboreal::subgroup::{hausdorff_estimate, LogRatio};

fn main() -> arboreal::Result<()> {
    for (d, m) in [(2, 1), (2, 2), (3, 1)] {
        let est = hausdorff_estimate(d, m, [2, 5, 10, 20, 40])?;
        let limit = est.limit.clone().unwrap();
        println!("d={d} m={m} limit {limit}");
        for (n, r) in &est.ratios {
            let tag = match r {
                LogRatio::Exact(q) if q.denom().bits() < 64 => format!("= {q}"),
                LogRatio::Exact(_) => "exact".into(),
                LogRatio::Approximate(_) => "approx".into(),
            };
            println!("  n={n:>2}  {:.15}  {tag}", r.to_f64());
        }
    }
    Ok(())
}
