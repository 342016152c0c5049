//! Parsing, iterating and orbiting rational maps over Q.

use arboreal::dynamics::{check_separable_preimages, forward_orbit, iterate, parse_map, parse_rational};

fn main() -> arboreal::Result<()> {
    let phi = parse_map("(x^2+1)/(2x)")?;
    println!("φ = {phi}, degree {}", phi.degree());
    println!("φ² = {}", iterate(&phi, 2));

    let psi = parse_map("x^2-x+1")?;
    let orbit = forward_orbit(&psi, &parse_rational("2")?, 6)?;
    let terms: Vec<String> = orbit.terms.iter().map(|t| t.to_string()).collect();
    println!("Sylvester orbit: {}", terms.join(", "));

    let cheb = parse_map("x^2-2")?;
    let orbit = forward_orbit(&cheb, &parse_rational("0")?, 10)?;
    println!("x^2-2 from 0: preperiod {:?}, period {:?}", orbit.preperiod(), orbit.period());

    let zero = parse_rational("0")?;
    for n in 1..=4 {
        println!(
            "x^2+3x: φ^{n}(x) = 0 separable: {}",
            check_separable_preimages(&parse_map("x^2+3*x")?, &zero, n)
        );
    }
    Ok(())
}
