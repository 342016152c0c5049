//! Storing a certificate as JSON and loading it back.

use arboreal::sieve::{certified_set, coverage_check, SieveCertificate};

fn main() -> arboreal::Result<()> {
    let cert = certified_set(29)?;
    let path = std::env::temp_dir().join("arboreal-cert-29.json");
    std::fs::write(&path, cert.to_json()).expect("write certificate");
    let text = std::fs::read_to_string(&path).expect("read certificate");
    let loaded = SieveCertificate::from_json(&text)?;
    println!("loaded m={} residues {:?}, verified {}", loaded.modulus, loaded.residues, loaded.verify()?);
    let rep = coverage_check(&[loaded], 100, 100);
    println!("covers {} of 100", 100 - rep.uncovered.len());
    Ok(())
}
