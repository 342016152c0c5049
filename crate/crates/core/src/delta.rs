//! The pair `(δₙ, εₙ)` defined by `(δ₁, ε₁) = (2k², k)` and
//! `δₙ = δ² + ε²`, `εₙ = δε/k`, as exact integers and as polynomials in `k`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default cap on the predicted bit length of `δₙ(k₀)`.
pub const DEFAULT_BIT_CAP: u64 = 1 << 26;

/// Largest `n` accepted by [`delta_eps_poly`].
pub const MAX_POLY_INDEX: usize = 14;

/// Sparse polynomial in `k` with big-integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntPolynomial {
    terms: BTreeMap<u32, BigInt>,
}

impl IntPolynomial {
    pub fn zero() -> Self {
        IntPolynomial::default()
    }

    pub fn monomial(c: impl Into<BigInt>, e: u32) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        IntPolynomial { terms }
    }

    /// From `(exponent, coefficient)` pairs; repeated exponents are summed.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (u32, C)>,
        C: Into<BigInt>,
    {
        let mut out: BTreeMap<u32, BigInt> = BTreeMap::new();
        for (e, c) in terms {
            *out.entry(e).or_default() += c.into();
        }
        out.retain(|_, c| !c.is_zero());
        IntPolynomial { terms: out }
    }

    fn from_dense(dense: Vec<BigInt>) -> Self {
        IntPolynomial {
            terms: dense
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(e, c)| (e as u32, c))
                .collect(),
        }
    }

    pub fn terms(&self) -> &BTreeMap<u32, BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: u32) -> BigInt {
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    /// Smallest exponent with a nonzero coefficient.
    pub fn low_degree(&self) -> Option<u32> {
        self.terms.keys().next().copied()
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.terms.values().next_back()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.terms.clone();
        for (e, c) in &other.terms {
            *out.entry(*e).or_default() += c;
        }
        out.retain(|_, c| !c.is_zero());
        IntPolynomial { terms: out }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.terms.clone();
        for (e, c) in &other.terms {
            *out.entry(*e).or_default() -= c;
        }
        out.retain(|_, c| !c.is_zero());
        IntPolynomial { terms: out }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (Some(da), Some(db)) = (self.degree(), other.degree()) else {
            return IntPolynomial::zero();
        };
        let mut dense = vec![BigInt::zero(); (da + db + 1) as usize];
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                dense[(ea + eb) as usize] += ca * cb;
            }
        }
        IntPolynomial::from_dense(dense)
    }

    /// Divides by `k^e`; `None` unless every exponent is at least `e`.
    pub fn div_monomial(&self, e: u32) -> Option<Self> {
        if self.low_degree().is_some_and(|l| l < e) {
            return None;
        }
        Some(IntPolynomial {
            terms: self.terms.iter().map(|(x, c)| (x - e, c.clone())).collect(),
        })
    }

    pub fn eval(&self, k: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        let mut prev = self.degree().unwrap_or(0);
        for (e, c) in self.terms.iter().rev() {
            acc *= num_traits::pow(k.clone(), (prev - e) as usize);
            acc += c;
            prev = *e;
        }
        acc * num_traits::pow(k.clone(), prev as usize)
    }

    /// Text form with variable `k`, highest degree first.
    pub fn to_string_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (e, c) in self.terms.iter().rev() {
            if c.is_negative() {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            let mag = c.abs();
            if *e == 0 || !mag.is_one() {
                out.push_str(&mag.to_string());
                if *e > 0 {
                    out.push('*');
                }
            }
            match e {
                0 => {}
                1 => out.push_str(var),
                _ => out.push_str(&format!("{var}^{e}")),
            }
        }
        out
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_in("k"))
    }
}

/// `(δₙ(k₀), εₙ(k₀))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaEpsPair {
    pub n: usize,
    pub k0: BigInt,
    pub delta: BigInt,
    pub eps: BigInt,
}

/// Bit length of `δₙ(k₀)` is about `2ⁿ(log₂|k₀| + 2)`.
fn predicted_bits(k0: &BigInt, n: usize) -> u64 {
    let per = k0.bits() + 2;
    per.saturating_mul(1u64.checked_shl(n as u32).unwrap_or(u64::MAX))
}

/// Exact values for `n = 1..=n_max`.
pub fn delta_eps_int(k0: &BigInt, n_max: usize, bit_cap: u64) -> Result<Vec<DeltaEpsPair>> {
    if k0.is_zero() {
        return Err(Error::ZeroParameter("k0"));
    }
    if n_max == 0 {
        return Err(Error::OutOfRange {
            what: "n_max",
            value: 0,
            range: "[1, ∞)".into(),
        });
    }
    if predicted_bits(k0, n_max) > bit_cap {
        return Err(Error::Guard(format!(
            "δ_{n_max}({k0}) would have about {} bits, cap is {bit_cap}",
            predicted_bits(k0, n_max)
        )));
    }
    let mut delta = BigInt::from(2) * k0 * k0;
    let mut eps = k0.clone();
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        if n > 1 {
            let (quot, rem) = (&delta * &eps).div_rem(k0);
            if !rem.is_zero() {
                return Err(Error::InexactDivision(format!("ε_{n}({k0})")));
            }
            delta = &delta * &delta + &eps * &eps;
            eps = quot;
        }
        out.push(DeltaEpsPair {
            n,
            k0: k0.clone(),
            delta: delta.clone(),
            eps: eps.clone(),
        });
    }
    Ok(out)
}

/// `(δₙ, εₙ)` in `Z[k]` for `n = 1..=n_max`.
pub fn delta_eps_poly(n_max: usize) -> Result<Vec<(IntPolynomial, IntPolynomial)>> {
    if n_max == 0 || n_max > MAX_POLY_INDEX {
        return Err(Error::OutOfRange {
            what: "n_max",
            value: n_max as i128,
            range: format!("[1, {MAX_POLY_INDEX}]"),
        });
    }
    let mut delta = IntPolynomial::monomial(2, 2);
    let mut eps = IntPolynomial::monomial(1, 1);
    let mut out = vec![(delta.clone(), eps.clone())];
    for _ in 2..=n_max {
        let next_eps = delta
            .mul(&eps)
            .div_monomial(1)
            .ok_or_else(|| Error::InexactDivision("δε/k".into()))?;
        delta = delta.mul(&delta).add(&eps.mul(&eps));
        eps = next_eps;
        out.push((delta.clone(), eps.clone()));
    }
    Ok(out)
}

/// Degree and low degree of `δₙ` and `εₙ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DegreeProfile {
    pub n: usize,
    pub deg_delta: u64,
    pub low_delta: u64,
    pub deg_eps: u64,
    pub low_eps: u64,
}

impl DegreeProfile {
    /// Measured from the supports of `δₙ` and `εₙ`.
    pub fn measure(n: usize, delta: &IntPolynomial, eps: &IntPolynomial) -> Self {
        DegreeProfile {
            n,
            deg_delta: delta.degree().unwrap_or(0) as u64,
            low_delta: delta.low_degree().unwrap_or(0) as u64,
            deg_eps: eps.degree().unwrap_or(0) as u64,
            low_eps: eps.low_degree().unwrap_or(0) as u64,
        }
    }

    /// `deg δₙ = 2ⁿ`, `low δₙ = (2ⁿ - (-1)ⁿ)/3 + 1`, `deg εₙ = 2ⁿ - n`,
    /// `low εₙ = (2ⁿ⁺¹ + (-1)ⁿ + 3)/6`.
    pub fn closed_form(n: usize) -> Self {
        let p = 1i64 << n;
        let sign = if n.is_multiple_of(2) { 1 } else { -1 };
        DegreeProfile {
            n,
            deg_delta: p as u64,
            low_delta: ((p - sign) / 3 + 1) as u64,
            deg_eps: (p - n as i64) as u64,
            low_eps: ((2 * p + sign + 3) / 6) as u64,
        }
    }
}

/// Measured profile for `n`, computing the polynomials.
pub fn degree_profile(n: usize) -> Result<DegreeProfile> {
    let polys = delta_eps_poly(n)?;
    let (d, e) = &polys[n - 1];
    Ok(DegreeProfile::measure(n, d, e))
}

/// Every exponent of `δₙ` is even, and for `n ≥ 2` its leading coefficient is
/// a perfect square.
pub fn check_structure_lemma(n: usize, delta: &IntPolynomial) -> bool {
    let even = delta.terms().keys().all(|e| e % 2 == 0);
    let square_lead = n < 2 || delta.leading().is_some_and(is_perfect_square);
    even && square_lead
}

/// `δₙ = δₙ₋₁² + (δₙ₋₁ δₙ₋₂² - δₙ₋₂⁴)/k²` with the division exact.
/// `polys[i]` holds `(δ_{i+1}, ε_{i+1})`.
pub fn delta_only_recursion_check(polys: &[(IntPolynomial, IntPolynomial)], n: usize) -> Result<bool> {
    if n < 3 || n > polys.len() {
        return Err(Error::OutOfRange {
            what: "n",
            value: n as i128,
            range: format!("[3, {}]", polys.len()),
        });
    }
    let d1 = &polys[n - 2].0;
    let d2 = &polys[n - 3].0;
    let d2sq = d2.mul(d2);
    let numer = d1.mul(&d2sq).sub(&d2sq.mul(&d2sq));
    let Some(quot) = numer.div_monomial(2) else {
        return Err(Error::InexactDivision(format!("δ-only recursion at n = {n}")));
    };
    Ok(d1.mul(d1).add(&quot) == polys[n - 1].0)
}

/// `g` with `g² = f` and positive leading coefficient, or `None` when `f` is
/// not the square of an integer polynomial.
pub fn poly_sqrt(f: &IntPolynomial) -> Option<IntPolynomial> {
    let Some(top) = f.degree() else {
        return Some(IntPolynomial::zero());
    };
    if top % 2 == 1 {
        return None;
    }
    let lead = f.leading()?;
    if !is_perfect_square(lead) {
        return None;
    }
    let d = (top / 2) as usize;
    let mut g = vec![BigInt::zero(); d + 1];
    g[d] = lead.sqrt();
    let two_lead = BigInt::from(2) * &g[d];
    for j in (0..d).rev() {
        // Coefficient of k^{d+j} in g² is 2 g_d g_j + Σ g_i g_l over
        // j < i, l < d with i + l = d + j.
        let mut rest = BigInt::zero();
        for i in (j + 1)..d {
            let l = d + j - i;
            if l > j && l < d {
                rest += &g[i] * &g[l];
            }
        }
        let (quot, rem) = (f.coeff((d + j) as u32) - rest).div_rem(&two_lead);
        if !rem.is_zero() {
            return None;
        }
        g[j] = quot;
    }
    let g = IntPolynomial::from_dense(g);
    (g.mul(&g) == *f).then_some(g)
}

/// `δₙ / k^{low(δₙ)}`.
pub fn normalized_delta(delta: &IntPolynomial) -> IntPolynomial {
    delta
        .div_monomial(delta.low_degree().unwrap_or(0))
        .expect("dividing by the lowest power")
}

/// Exact test for `v = w²`.
pub fn is_perfect_square(v: &BigInt) -> bool {
    if v.is_negative() {
        return false;
    }
    let r = v.sqrt();
    &r * &r == *v
}

/// One row of a square scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanRow {
    pub n: usize,
    pub k0: i64,
    pub delta_bits: u64,
    pub is_square: bool,
}

/// Tests `δₙ(k₀)` for squareness over the given grid. Rows are ordered by
/// `k₀`, then `n`.
pub fn scan_squares(
    n_range: std::ops::RangeInclusive<usize>,
    k_range: std::ops::RangeInclusive<i64>,
    bit_cap: u64,
) -> Result<Vec<ScanRow>> {
    let n_max = *n_range.end();
    let n_min = *n_range.start();
    if n_min == 0 {
        return Err(Error::OutOfRange {
            what: "n",
            value: 0,
            range: "[1, ∞)".into(),
        });
    }
    let ks: Vec<i64> = k_range.filter(|&k| k != 0).collect();
    let rows: Vec<Vec<ScanRow>> = ks
        .par_iter()
        .map(|&k| {
            let pairs = delta_eps_int(&BigInt::from(k), n_max, bit_cap)?;
            Ok(pairs
                .into_iter()
                .filter(|p| p.n >= n_min)
                .map(|p| ScanRow {
                    n: p.n,
                    k0: k,
                    delta_bits: p.delta.bits(),
                    is_square: is_perfect_square(&p.delta),
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}
