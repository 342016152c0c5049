//! The (δ, ε) recursion over Z[k] and at integer k.

use arboreal::delta::{
    check_structure_lemma, delta_eps_int, delta_eps_poly, delta_only_recursion_check, normalized_delta,
    poly_sqrt, DegreeProfile, DEFAULT_BIT_CAP,
};
use num_bigint::BigInt;

fn main() -> arboreal::Result<()> {
    let polys = delta_eps_poly(10)?;
    for (i, (d, e)) in polys.iter().take(3).enumerate() {
        println!("δ_{} = {d}\nε_{} = {e}", i + 1, i + 1);
    }

    println!("\n  n  deg δ  low δ  deg ε  low ε  terms  structure  δ-only");
    for (i, (d, e)) in polys.iter().enumerate() {
        let n = i + 1;
        let p = DegreeProfile::measure(n, d, e);
        assert_eq!(p, DegreeProfile::closed_form(n));
        let rec = if n >= 3 { delta_only_recursion_check(&polys, n)?.to_string() } else { "-".into() };
        println!(
            "{n:>3} {:>6} {:>6} {:>6} {:>6} {:>6}  {:>9}  {rec}",
            p.deg_delta,
            p.low_delta,
            p.deg_eps,
            p.low_eps,
            d.term_count(),
            check_structure_lemma(n, d)
        );
    }

    for n in [2, 4, 6] {
        let f = normalized_delta(&polys[n - 1].0);
        println!("δ_{n}/k^low a square in Z[k]? {}", poly_sqrt(&f).is_some());
    }

    for pair in delta_eps_int(&BigInt::from(1), 5, DEFAULT_BIT_CAP)? {
        println!("k0=1 n={} δ={} ε={}", pair.n, pair.delta, pair.eps);
    }
    Ok(())
}
