//! Residue-class certificates that δₙ(k₀) is never a square for even n.

use arboreal::sieve::{
    certificate_for_k0, certified_set, compare_reference_table, computed_certificates, coverage_check,
    diagnose_class, mod_orbit, reference_certificates, REFERENCE_COVERAGE_BOUND,
};

fn main() -> arboreal::Result<()> {
    let p = mod_orbit(2, 5)?;
    println!("k0 ≡ 2 mod 5: states {:?}, t={}, ℓ={}", p.states, p.preperiod, p.period);

    for m in [3, 5, 7, 8, 11, 13] {
        println!("m={m:>2}: {:?}", certified_set(m)?.residues);
    }

    let d = diagnose_class(1, 11)?;
    println!("1 mod 11: square δ at even n = {:?}, preperiod {}", d.square_hits, d.preperiod);

    let rows = compare_reference_table()?;
    let short: Vec<u64> = rows.iter().filter(|r| !r.is_superset()).map(|r| r.modulus).collect();
    println!("reference rows not contained in the computed sets: {short:?}");

    let table = reference_certificates();
    let rep = coverage_check(&table, 1_000_000, REFERENCE_COVERAGE_BOUND + 1);
    println!(
        "reference rows: {} uncovered in [1, 10^6], first {:?}",
        rep.uncovered.len(),
        rep.first_uncovered
    );
    let full = computed_certificates()?;
    let rep = coverage_check(&full, 1_000_000, 1_000_000);
    println!("computed sets: {} uncovered, first {:?}", rep.uncovered.len(), rep.first_uncovered);

    for k0 in [7, 6, -11, 4260] {
        println!("k0={k0}: {:?}", certificate_for_k0(k0, &full));
    }
    Ok(())
}
