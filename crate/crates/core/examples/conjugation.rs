//! Möbius conjugation of quadratic maps.

use arboreal::dynamics::{
    conjugation_identity_suite, exceptional_conjugates, mobius_conjugate, parse_map, MobiusTransform,
};
use num_rational::BigRational;

fn main() -> arboreal::Result<()> {
    let phi = parse_map("x^2+4*x")?;
    let nu = MobiusTransform::translation(BigRational::from_integer(2.into()));
    println!("φ = {phi}");
    println!("ν⁻¹∘φ∘ν = {}", mobius_conjugate(&phi, &nu));
    println!("ν∘φ∘ν⁻¹ = {}", mobius_conjugate(&phi, &nu.inverse()));

    for k in [-3, 1, 5] {
        println!("k = {k}");
        for c in conjugation_identity_suite(&BigRational::from_integer(k.into())) {
            println!("  [{}] {}: {}", if c.holds { "ok" } else { "!!" }, c.name, c.lhs);
        }
    }
    for c in exceptional_conjugates() {
        println!("[{}] {}: {}", if c.holds { "ok" } else { "!!" }, c.name, c.lhs);
    }
    Ok(())
}
