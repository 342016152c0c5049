//! Proportion of primes dividing some orbit term, at growing bounds.

use arboreal::density::{density_curve, theorem13_containment, IntegerMapSpec};

fn main() -> arboreal::Result<()> {
    let maps = [("x^2+3*x", 1), ("x^2-2*x+2", 3), ("x^2-x+1", 2), ("x^2", 2)];
    for (map, a0) in maps {
        let spec = IntegerMapSpec::parse(map, a0)?;
        let rep = density_curve(&spec, &[1_000, 10_000, 100_000])?;
        println!("{map}, a0={a0}");
        for c in &rep.checkpoints {
            println!("  X={:>6}  {:>3}/{:<5} = {}", c.x, c.members, c.pi_x, c.proportion());
        }
        let first: Vec<u64> = rep.members.iter().take(8).copied().collect();
        println!("  smallest members {first:?}");
    }

    for (k, a0) in [(3, 1), (1, 2), (-2, 5)] {
        let r = theorem13_containment(k, a0, 10_000)?;
        println!(
            "k={k} a0={a0}: {} shifted primes, {} violations",
            r.shifted_primes.len(),
            r.violations.len()
        );
    }
    Ok(())
}
