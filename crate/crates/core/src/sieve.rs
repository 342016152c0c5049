//! Congruence certificates that `δₙ(k₀)` is not a square for even `n`.
//!
//! For `k₀ ≡ r (mod m)` with `r` invertible, the pair `(δₙ, εₙ) mod m` depends
//! only on `r`, and `εₙ ≡ δε·r⁻¹`. The state sequence is eventually periodic,
//! so finitely many terms decide every even `n`.

use std::collections::BTreeSet;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Published congruence rows. The odd-`k₀` row is stored at modulus 8.
pub const REFERENCE_TABLE: &[(u64, &[u64])] = &[
    (3, &[1, 2]),
    (5, &[2, 3]),
    (7, &[1, 2, 5, 6]),
    (8, &[1, 3, 5, 7]),
    (11, &[1, 2, 5, 6, 9, 10]),
    (13, &[3, 6, 7, 10]),
    (17, &[1, 3, 14, 16]),
    (19, &[6, 7, 9, 10, 12, 13]),
    (23, &[1, 6, 8, 9, 14, 15, 17, 22]),
    (29, &[2, 11, 12, 14, 15, 17, 18, 27]),
    (31, &[6, 10, 11, 14, 17, 20, 21, 25]),
    (37, &[6, 8, 10, 11, 14, 17, 18, 19, 20, 23, 26, 27, 29, 31]),
    (41, &[2, 11, 13, 14, 15, 26, 27, 28, 30, 39]),
    (43, &[4, 5, 12, 14, 17, 21, 22, 26, 29, 31, 38, 39]),
    (47, &[4, 7, 11, 12, 15, 19, 21, 26, 28, 32, 35, 36, 40, 43]),
    (53, &[2, 19, 22, 25, 26, 27, 28, 31, 34, 51]),
    (59, &[1, 3, 7, 8, 51, 25, 29, 30, 34, 52, 56, 58]),
    (61, &[1, 2, 3, 12, 17, 24, 29, 30, 31, 32, 37, 44, 49, 58, 59, 60]),
    (67, &[5, 6, 9, 15, 18, 22, 27, 30, 32, 33, 34, 35, 37, 40, 45, 49, 52, 58, 61, 62]),
    (71, &[6, 7, 11, 12, 16, 20, 27, 28, 30, 33, 38, 41, 43, 44, 51, 55, 59, 60, 64, 65]),
    (73, &[6, 7, 12, 13, 14, 20, 24, 29, 32, 33, 40, 41, 44, 49, 53, 59, 60, 61, 66, 67]),
    (79, &[20, 68]),
    (83, &[12, 16, 21, 62, 71]),
    (103, &[9, 50]),
    (107, &[106]),
    (109, &[92]),
    (131, &[26, 105]),
    (149, &[89]),
    (157, &[24]),
    (173, &[19]),
    (197, &[52, 145]),
];

/// Claimed coverage bound for the reference table.
pub const REFERENCE_COVERAGE_BOUND: u64 = 1_056_575;

/// `{x² mod m}`, including 0.
pub fn squares_mod(m: u64) -> BTreeSet<u64> {
    (0..m).map(|x| ((x as u128 * x as u128) % m as u128) as u64).collect()
}

fn square_table(m: u64) -> Vec<bool> {
    let mut t = vec![false; m as usize];
    for s in squares_mod(m) {
        t[s as usize] = true;
    }
    t
}

fn mod_inverse(r: u64, m: u64) -> Option<u64> {
    let e = (r as i128).extended_gcd(&(m as i128));
    (e.gcd == 1).then(|| e.x.rem_euclid(m as i128) as u64)
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// The state sequence `(δₙ mod m, εₙ mod m)` for `n = 1, 2, …` up to the
/// first repeat.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModOrbitProfile {
    pub modulus: u64,
    pub residue: u64,
    /// `states[i]` is the state at `n = i + 1`; all states are distinct.
    pub states: Vec<(u64, u64)>,
    pub preperiod: usize,
    pub period: usize,
}

impl ModOrbitProfile {
    /// State at index `n ≥ 1`.
    pub fn state(&self, n: usize) -> (u64, u64) {
        assert!(n >= 1, "indices start at 1");
        let i = n - 1;
        if i < self.states.len() {
            self.states[i]
        } else {
            self.states[self.preperiod + (i - self.preperiod) % self.period]
        }
    }

    pub fn delta(&self, n: usize) -> u64 {
        self.state(n).0
    }

    /// Even indices that decide every even `n ≥ 2`.
    pub fn window(&self) -> impl Iterator<Item = usize> {
        (2..=self.preperiod + 2 * self.period).step_by(2)
    }

    /// Even `n` in the window with `δₙ` a square mod `m`.
    pub fn square_hits(&self) -> Vec<usize> {
        let sq = square_table(self.modulus);
        self.window().filter(|&n| sq[self.delta(n) as usize]).collect()
    }
}

/// Orbit of `(2r², r)` under `(δ, ε) ↦ (δ² + ε², δε·r⁻¹)` modulo `m`.
pub fn mod_orbit(r: u64, m: u64) -> Result<ModOrbitProfile> {
    if m < 2 {
        return Err(Error::OutOfRange {
            what: "modulus",
            value: m as i128,
            range: "[2, ∞)".into(),
        });
    }
    let r = r % m;
    let inv = mod_inverse(r, m).ok_or(Error::NotInvertible { residue: r, modulus: m })?;
    let mut seen = std::collections::HashMap::new();
    let mut states = Vec::new();
    let mut s = (mulmod(2 * r % m, r, m), r);
    while !seen.contains_key(&s) {
        seen.insert(s, states.len());
        states.push(s);
        let (d, e) = s;
        s = (
            (mulmod(d, d, m) + mulmod(e, e, m)) % m,
            mulmod(mulmod(d, e, m), inv, m),
        );
    }
    let preperiod = seen[&s];
    let period = states.len() - preperiod;
    Ok(ModOrbitProfile { modulus: m, residue: r, states, preperiod, period })
}

/// True when `δₙ mod m` is a non-square for every even `n ≥ 2` and every
/// `k₀ ≡ r (mod m)`.
pub fn certify_class(r: u64, m: u64) -> Result<bool> {
    Ok(mod_orbit(r, m)?.square_hits().is_empty())
}

/// Why a class fails certification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassDiagnosis {
    pub modulus: u64,
    pub residue: u64,
    pub preperiod: usize,
    pub period: usize,
    pub square_hits: Vec<usize>,
    /// Every hit has `n ≤ preperiod`, so the cycle itself is clean.
    pub preperiod_only: bool,
}

pub fn diagnose_class(r: u64, m: u64) -> Result<ClassDiagnosis> {
    let p = mod_orbit(r, m)?;
    let hits = p.square_hits();
    Ok(ClassDiagnosis {
        modulus: m,
        residue: p.residue,
        preperiod: p.preperiod,
        period: p.period,
        preperiod_only: !hits.is_empty() && hits.iter().all(|&n| n <= p.preperiod),
        square_hits: hits,
    })
}

/// Residue classes mod `m` known to give non-squares.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveCertificate {
    pub modulus: u64,
    pub residues: Vec<u64>,
    #[serde(default)]
    pub profiles: Vec<ModOrbitProfile>,
}

impl SieveCertificate {
    /// Certificate from residue data alone, without profiles.
    pub fn from_residues(modulus: u64, residues: &[u64]) -> Self {
        let set: BTreeSet<u64> = residues.iter().map(|r| r % modulus).collect();
        SieveCertificate { modulus, residues: set.into_iter().collect(), profiles: Vec::new() }
    }

    pub fn contains(&self, k: u64) -> bool {
        self.residues.binary_search(&(k % self.modulus)).is_ok()
    }

    /// Re-checks every residue against a fresh orbit computation.
    pub fn verify(&self) -> Result<bool> {
        for &r in &self.residues {
            if !certify_class(r, self.modulus)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let mut c: SieveCertificate =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        c.residues.sort_unstable();
        c.residues.dedup();
        Ok(c)
    }
}

/// All invertible classes mod `m` that pass [`certify_class`].
pub fn certified_set(m: u64) -> Result<SieveCertificate> {
    if m < 3 {
        return Err(Error::OutOfRange {
            what: "modulus",
            value: m as i128,
            range: "[3, ∞)".into(),
        });
    }
    let profiles: Vec<ModOrbitProfile> = (1..m)
        .into_par_iter()
        .filter(|r| r.gcd(&m) == 1)
        .map(|r| mod_orbit(r, m))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|p| p.square_hits().is_empty())
        .collect();
    Ok(SieveCertificate {
        modulus: m,
        residues: profiles.iter().map(|p| p.residue).collect(),
        profiles,
    })
}

/// Certificates built from [`REFERENCE_TABLE`] as residue data.
pub fn reference_certificates() -> Vec<SieveCertificate> {
    REFERENCE_TABLE
        .iter()
        .map(|(m, rows)| SieveCertificate::from_residues(*m, rows))
        .collect()
}

/// Fully computed certificates for every modulus of [`REFERENCE_TABLE`].
pub fn computed_certificates() -> Result<Vec<SieveCertificate>> {
    REFERENCE_TABLE.iter().map(|(m, _)| certified_set(*m)).collect()
}

/// Computed set against a reference row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowComparison {
    pub modulus: u64,
    pub expected: Vec<u64>,
    pub computed: Vec<u64>,
    pub missing: Vec<u64>,
    pub extra: Vec<u64>,
    /// Every missing residue fails only in the preperiod.
    pub missing_preperiod_only: bool,
}

impl RowComparison {
    pub fn is_superset(&self) -> bool {
        self.missing.is_empty()
    }
}

pub fn compare_row(modulus: u64, expected: &[u64]) -> Result<RowComparison> {
    let cert = certified_set(modulus)?;
    let exp: BTreeSet<u64> = expected.iter().copied().collect();
    let got: BTreeSet<u64> = cert.residues.iter().copied().collect();
    let missing: Vec<u64> = exp.difference(&got).copied().collect();
    let missing_preperiod_only = missing
        .iter()
        .map(|&r| diagnose_class(r, modulus).map(|d| d.preperiod_only))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|b| b);
    Ok(RowComparison {
        modulus,
        expected: exp.iter().copied().collect(),
        extra: got.difference(&exp).copied().collect(),
        computed: cert.residues,
        missing,
        missing_preperiod_only,
    })
}

pub fn compare_reference_table() -> Result<Vec<RowComparison>> {
    REFERENCE_TABLE.par_iter().map(|(m, row)| compare_row(*m, row)).collect()
}

/// Coverage of `[1, B]` by a list of certificates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    pub moduli: Vec<u64>,
    pub bound: u64,
    pub uncovered: Vec<u64>,
    /// Smallest uncovered positive integer, searched up to `search_limit`.
    pub first_uncovered: Option<u64>,
    pub search_limit: u64,
}

impl CoverageReport {
    pub fn fully_covered(&self) -> bool {
        self.uncovered.is_empty()
    }
}

struct Lookup {
    tables: Vec<(u64, Vec<bool>)>,
}

impl Lookup {
    fn new(certs: &[SieveCertificate]) -> Self {
        let mut tables: Vec<(u64, Vec<bool>)> = certs
            .iter()
            .map(|c| {
                let mut t = vec![false; c.modulus as usize];
                for &r in &c.residues {
                    t[(r % c.modulus) as usize] = true;
                }
                (c.modulus, t)
            })
            .collect();
        tables.sort_by_key(|(m, _)| *m);
        Lookup { tables }
    }

    fn find(&self, k: u64) -> Option<(u64, u64)> {
        self.tables
            .iter()
            .find(|(m, t)| t[(k % m) as usize])
            .map(|(m, _)| (*m, k % m))
    }

    fn uncovered_in(&self, lo: u64, hi: u64) -> Vec<u64> {
        const CHUNK: u64 = 1 << 14;
        let chunks: Vec<u64> = (lo..=hi).step_by(CHUNK as usize).collect();
        chunks
            .par_iter()
            .flat_map_iter(|&start| {
                let end = (start + CHUNK - 1).min(hi);
                (start..=end).filter(|&k| self.find(k).is_none())
            })
            .collect()
    }
}

/// Scans `[1, bound]`. When everything there is covered, the search for the
/// first uncovered value continues up to `search_limit`.
pub fn coverage_check(certs: &[SieveCertificate], bound: u64, search_limit: u64) -> CoverageReport {
    let lookup = Lookup::new(certs);
    let uncovered = if bound == 0 { Vec::new() } else { lookup.uncovered_in(1, bound) };
    let search_limit = search_limit.max(bound);
    let first_uncovered = uncovered.first().copied().or_else(|| {
        let mut lo = bound + 1;
        while lo <= search_limit {
            let hi = (lo + (1 << 20) - 1).min(search_limit);
            if let Some(&k) = lookup.uncovered_in(lo, hi).first() {
                return Some(k);
            }
            lo = hi + 1;
        }
        None
    });
    CoverageReport {
        moduli: lookup.tables.iter().map(|(m, _)| *m).collect(),
        bound,
        uncovered,
        first_uncovered,
        search_limit,
    }
}

/// `(modulus, residue)` covering `|k₀|`, smallest modulus first.
pub fn certificate_for_k0(k0: i64, certs: &[SieveCertificate]) -> Option<(u64, u64)> {
    if k0 == 0 {
        return None;
    }
    Lookup::new(certs).find(k0.unsigned_abs())
}

/// One CSV row per `k₀` in `[1, bound]`: covering modulus and residue, if any.
pub fn coverage_rows(certs: &[SieveCertificate], bound: u64) -> Vec<(u64, Option<(u64, u64)>)> {
    let lookup = Lookup::new(certs);
    (1..=bound).into_par_iter().map(|k| (k, lookup.find(k))).collect()
}
