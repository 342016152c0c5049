//! Factorization, power, Chebyshev, rotation and cyclotomic-order checks.

use arboreal::dynamics::{
    commutes_with_rotation, cyclotomic_orders, factorization_identity_symbolic, verify_chebyshev_identity,
    verify_power_identity, RotationSign,
};

fn main() -> arboreal::Result<()> {
    for n in 1..=5 {
        println!("φⁿ = x(x+k)Π(φⁱ+k) in Z[k][x], n={n}: {}", factorization_identity_symbolic(n));
    }
    let power = (1..=10).all(verify_power_identity);
    let cheb = (1..=10).all(verify_chebyshev_identity);
    println!("(x+1)^(2^n) - 1 identity, n ≤ 10: {power}");
    println!("Chebyshev identity, n ≤ 10: {cheb}");
    for n in [2, 3, 4] {
        for sign in [RotationSign::Plus, RotationSign::Minus] {
            println!("rotation commutation n={n} {sign:?}: {}", commutes_with_rotation(n, sign)?);
        }
    }
    println!("{:>3} {:>8} {:>8} {:>8}", "n", "k=-2", "k=2", "k=4");
    for n in 2..=10 {
        println!(
            "{n:>3} {:>8} {:>8} {:>8}",
            cyclotomic_orders(-2, n)?,
            cyclotomic_orders(2, n)?,
            cyclotomic_orders(4, n)?
        );
    }
    Ok(())
}
