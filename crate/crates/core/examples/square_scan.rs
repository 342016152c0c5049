//! Exhaustive squareness scan of δₙ(k₀).

use arboreal::delta::{scan_squares, DEFAULT_BIT_CAP};

fn main() -> arboreal::Result<()> {
    let rows = scan_squares(2..=12, 1..=500, DEFAULT_BIT_CAP)?;
    let squares: Vec<_> = rows.iter().filter(|r| r.is_square).collect();
    let largest = rows.iter().map(|r| r.delta_bits).max().unwrap_or(0);
    println!("tested {} values, largest δ has {largest} bits", rows.len());
    if squares.is_empty() {
        println!("no squares found");
    } else {
        for r in squares {
            println!("square: n={} k0={}", r.n, r.k0);
        }
    }
    Ok(())
}
