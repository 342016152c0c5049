//! Primes dividing some term of an integer orbit `a₀, φ(a₀), φ²(a₀), …`.

use num_bigint::BigInt;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::parse_map;
use crate::error::{Error, Result};

/// Largest `X` accepted by [`density_curve`].
pub const DEFAULT_X_CAP: u64 = 10_000_000;

/// Default checkpoints for density curves.
pub const DEFAULT_CHECKPOINTS: [u64; 3] = [1_000, 10_000, 100_000];

/// A polynomial `φ ∈ Z[x]` of degree at least 2 and a starting value `a₀`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntegerMapSpec {
    /// Coefficients, constant term first.
    pub coeffs: Vec<i64>,
    pub a0: i64,
}

impl IntegerMapSpec {
    pub fn new(coeffs: &[i64], a0: i64) -> Result<Self> {
        let mut coeffs = coeffs.to_vec();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.len() < 3 {
            return Err(Error::Degenerate(format!(
                "degree {} polynomial; need degree ≥ 2",
                coeffs.len().saturating_sub(1)
            )));
        }
        Ok(IntegerMapSpec { coeffs, a0 })
    }

    /// Parses a polynomial such as `x^2-2*x+2`.
    pub fn parse(map: &str, a0: i64) -> Result<Self> {
        let phi = parse_map(map)?;
        if !phi.is_polynomial() {
            return Err(Error::Parse(format!("{map} is not a polynomial")));
        }
        let ints = phi
            .numerator()
            .to_bigints()
            .ok_or_else(|| Error::Parse(format!("{map} has non-integer coefficients")))?;
        let coeffs = ints
            .iter()
            .map(|c| i64::try_from(c).map_err(|_| Error::Parse(format!("coefficient {c} too large"))))
            .collect::<Result<Vec<_>>>()?;
        IntegerMapSpec::new(&coeffs, a0)
    }

    /// `φ(x) mod p` for `x` in `[0, p)`.
    pub fn eval_mod(&self, x: u64, p: u64) -> u64 {
        let pm = p as i128;
        let mut acc: u128 = 0;
        for &c in self.coeffs.iter().rev() {
            let c = (c as i128).rem_euclid(pm) as u128;
            acc = (acc * x as u128 + c) % p as u128;
        }
        acc as u64
    }

    /// `φ(x)` over the integers.
    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::from(0), |acc, &c| acc * x + c)
    }

    /// The same map started at `a₁ = φ(a₀)`, if it fits in an `i64`.
    pub fn shifted(&self) -> Option<Self> {
        let a1 = i64::try_from(self.eval(&BigInt::from(self.a0))).ok()?;
        Some(IntegerMapSpec { coeffs: self.coeffs.clone(), a0: a1 })
    }
}

/// True when the orbit of `start` under `φ mod p` reaches `target`.
///
/// Brent's cycle detection visits the whole tail and cycle before stopping.
pub fn orbit_reaches(spec: &IntegerMapSpec, start: i64, target: i64, p: u64) -> bool {
    let red = |v: i64| (v as i128).rem_euclid(p as i128) as u64;
    let (x0, goal) = (red(start), red(target));
    if x0 == goal {
        return true;
    }
    let mut power = 1usize;
    let mut lam = 1usize;
    let mut tortoise = x0;
    let mut hare = spec.eval_mod(x0, p);
    while tortoise != hare {
        if hare == goal {
            return true;
        }
        if power == lam {
            tortoise = hare;
            power *= 2;
            lam = 0;
        }
        hare = spec.eval_mod(hare, p);
        lam += 1;
    }
    false
}

/// `p` divides some term of the orbit of `a₀`.
pub fn divides_orbit(spec: &IntegerMapSpec, p: u64) -> bool {
    orbit_reaches(spec, spec.a0, 0, p)
}

/// Primes up to `x` by the sieve of Eratosthenes.
pub fn prime_sieve(x: u64) -> Vec<u64> {
    if x < 2 {
        return Vec::new();
    }
    let n = x as usize;
    let mut composite = vec![false; n + 1];
    let mut i = 2;
    while i * i <= n {
        if !composite[i] {
            for j in (i * i..=n).step_by(i) {
                composite[j] = true;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&i| !composite[i]).map(|i| i as u64).collect()
}

/// Counts at one bound `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DensityCheckpoint {
    pub x: u64,
    pub pi_x: u64,
    pub members: u64,
    pub proportion_num: u64,
    pub proportion_den: u64,
}

impl DensityCheckpoint {
    pub fn proportion(&self) -> Ratio<u64> {
        Ratio::new(self.proportion_num, self.proportion_den)
    }
}

/// Membership counts of the prime set at several bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityReport {
    pub spec: IntegerMapSpec,
    pub checkpoints: Vec<DensityCheckpoint>,
    /// Members up to the largest checkpoint, ascending.
    pub members: Vec<u64>,
}

impl DensityReport {
    /// Proportions strictly decrease from the first checkpoint to the last.
    pub fn decreasing_trend(&self) -> bool {
        match (self.checkpoints.first(), self.checkpoints.last()) {
            (Some(a), Some(b)) if self.checkpoints.len() > 1 => b.proportion() < a.proportion(),
            _ => false,
        }
    }
}

/// Exact counts at each checkpoint. Finite counts say nothing rigorous about
/// the limit; they only show the trend.
pub fn density_curve(spec: &IntegerMapSpec, checkpoints: &[u64]) -> Result<DensityReport> {
    let mut cps: Vec<u64> = checkpoints.to_vec();
    cps.sort_unstable();
    cps.dedup();
    let x_max = *cps.last().ok_or_else(|| Error::Parse("no checkpoints".into()))?;
    if cps[0] < 2 {
        return Err(Error::OutOfRange {
            what: "checkpoint",
            value: cps[0] as i128,
            range: "[2, ∞)".into(),
        });
    }
    if x_max > DEFAULT_X_CAP {
        return Err(Error::Guard(format!("X = {x_max} exceeds cap {DEFAULT_X_CAP}")));
    }
    let primes = prime_sieve(x_max);
    let members: Vec<u64> = primes
        .par_iter()
        .copied()
        .filter(|&p| divides_orbit(spec, p))
        .collect();
    let checkpoints = cps
        .iter()
        .map(|&x| {
            let pi_x = primes.partition_point(|&p| p <= x) as u64;
            let count = members.partition_point(|&p| p <= x) as u64;
            let r = Ratio::new(count, pi_x);
            DensityCheckpoint {
                x,
                pi_x,
                members: count,
                proportion_num: *r.numer(),
                proportion_den: *r.denom(),
            }
        })
        .collect();
    Ok(DensityReport { spec: spec.clone(), checkpoints, members })
}

/// `x² + kx`.
pub fn quadratic_family(k: i64, a0: i64) -> Result<IntegerMapSpec> {
    IntegerMapSpec::new(&[0, k, 1], a0)
}

/// `x² − kx + k`, the conjugate of `x² + kx` by `x ↦ x − k`.
pub fn shifted_family(k: i64, a0: i64) -> Result<IntegerMapSpec> {
    IntegerMapSpec::new(&[k, -k, 1], a0)
}

/// Result of comparing the shifted-orbit primes with the conjugate map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContainmentReport {
    pub k: i64,
    pub a0: i64,
    pub x: u64,
    /// Primes `p ≤ X` with `p | φⁱ(a₀) + k` for some `i ≥ 0`.
    pub shifted_primes: Vec<u64>,
    /// Those not dividing any `ψⁱ(a₀ + k)`; expected empty.
    pub violations: Vec<u64>,
}

impl ContainmentReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every prime dividing some `φⁱ(a₀) + k`, `φ = x² + kx`, also
/// divides some `ψⁱ(a₀ + k)`, `ψ = x² − kx + k`.
pub fn theorem13_containment(k: i64, a0: i64, x: u64) -> Result<ContainmentReport> {
    if k == 0 {
        return Err(Error::ZeroParameter("k"));
    }
    let phi = quadratic_family(k, a0)?;
    let psi = shifted_family(k, a0 + k)?;
    let primes = prime_sieve(x);
    let shifted_primes: Vec<u64> = primes
        .par_iter()
        .copied()
        .filter(|&p| orbit_reaches(&phi, a0, -k, p))
        .collect();
    let violations = shifted_primes
        .par_iter()
        .copied()
        .filter(|&p| !divides_orbit(&psi, p))
        .collect();
    Ok(ContainmentReport { k, a0, x, shifted_primes, violations })
}

/// Primes `p ≤ X` dividing the orbit of `a₀` under `x² + kx` that neither
/// divide `a₀² + ka₀` nor any `φⁱ(a₀) + k`; expected empty.
pub fn finite_exception_check(k: i64, a0: i64, x: u64) -> Result<Vec<u64>> {
    let phi = quadratic_family(k, a0)?;
    let base = (a0 as i128) * (a0 as i128) + (k as i128) * (a0 as i128);
    Ok(prime_sieve(x)
        .into_par_iter()
        .filter(|&p| divides_orbit(&phi, p))
        .filter(|&p| base.rem_euclid(p as i128) != 0)
        .filter(|&p| !orbit_reaches(&phi, a0, -k, p))
        .collect())
}
