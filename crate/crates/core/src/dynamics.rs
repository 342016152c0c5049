//! Rational maps over `Q`: iteration, Möbius conjugation, orbits, and the
//! polynomial identities behind the iterated-preimage computations.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::subgroup::{centralizer_hd_bound, close_under_group_ops, is_free_on_level};
use crate::tree::{TreeAutomorphism, TreeShape};

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `p(x)/q(x)` in lowest terms with a monic denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalMap {
    num: Poly,
    den: Poly,
}

impl RationalMap {
    /// A map of degree at least 1.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        let map = RationalMap::from_parts(num, den)?;
        if map.degree() == 0 {
            return Err(Error::Degenerate(format!("{map} is constant")));
        }
        Ok(map)
    }

    /// Normalizes `num/den` without the degree check.
    fn from_parts(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Degenerate("zero denominator".into()));
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = num.gcd(&den);
            (
                num.div_exact(&g).expect("gcd divides"),
                den.div_exact(&g).expect("gcd divides"),
            )
        };
        let lead = BigRational::one() / den.leading();
        Ok(RationalMap {
            num: num.scale(&lead),
            den: den.scale(&lead),
        })
    }

    pub fn polynomial(p: Poly) -> Result<Self> {
        RationalMap::new(p, Poly::one())
    }

    /// Polynomial with integer coefficients, lowest degree first.
    pub fn from_int_coeffs(coeffs: &[i64]) -> Result<Self> {
        RationalMap::polynomial(Poly::from_ints(coeffs))
    }

    pub fn identity() -> Self {
        RationalMap {
            num: Poly::x(),
            den: Poly::one(),
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// `max(deg num, deg den)`.
    pub fn degree(&self) -> usize {
        self.num.deg0().max(self.den.deg0())
    }

    /// `φ(x)`, or `None` at a pole.
    pub fn eval(&self, x: &BigRational) -> Option<BigRational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(x) / d)
    }

    /// `self ∘ inner` (`inner` applied first).
    pub fn compose(&self, inner: &RationalMap) -> RationalMap {
        if self.is_polynomial() && inner.is_polynomial() {
            let num = self.num.compose(&inner.num.scale(&(BigRational::one() / inner.den.leading())));
            return RationalMap::from_parts(num, self.den.clone()).expect("nonzero denominator");
        }
        // Homogenize: P(p/q) = Σ P_i p^i q^{D-i} / q^D, and the q^D cancels.
        let big_d = self.degree();
        let homogenize = |f: &Poly| -> Poly {
            let mut acc = Poly::zero();
            for (i, c) in f.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let term = &inner.num.pow(i) * &inner.den.pow(big_d - i);
                acc = &acc + &term.scale(c);
            }
            acc
        };
        RationalMap::from_parts(homogenize(&self.num), homogenize(&self.den))
            .expect("a composition of nonconstant maps has a nonzero denominator")
    }

    /// `φ - c` as a map.
    pub fn sub_constant(&self, c: &BigRational) -> RationalMap {
        RationalMap::from_parts(&self.num - &self.den.scale(c), self.den.clone())
            .expect("denominator unchanged")
    }
}

impl fmt::Display for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl FromStr for RationalMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_map(s)
    }
}

/// `φⁿ`, with `φ⁰ = x`.
pub fn iterate(phi: &RationalMap, n: usize) -> RationalMap {
    let mut acc = RationalMap::identity();
    for _ in 0..n {
        acc = phi.compose(&acc);
    }
    acc
}

/// An invertible degree-1 map `(a x + b)/(c x + d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MobiusTransform {
    a: BigRational,
    b: BigRational,
    c: BigRational,
    d: BigRational,
}

impl MobiusTransform {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Result<Self> {
        if (&a * &d - &b * &c).is_zero() {
            return Err(Error::Degenerate("ad - bc = 0".into()));
        }
        Ok(MobiusTransform { a, b, c, d })
    }

    /// `x + t`.
    pub fn translation(t: BigRational) -> Self {
        MobiusTransform {
            a: BigRational::one(),
            b: t,
            c: BigRational::zero(),
            d: BigRational::one(),
        }
    }

    /// `λ x`.
    pub fn scaling(lambda: BigRational) -> Result<Self> {
        MobiusTransform::new(lambda, BigRational::zero(), BigRational::zero(), BigRational::one())
    }

    pub fn inverse(&self) -> MobiusTransform {
        MobiusTransform {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
    }

    pub fn to_map(&self) -> RationalMap {
        RationalMap::new(
            Poly::from_coeffs(vec![self.b.clone(), self.a.clone()]),
            Poly::from_coeffs(vec![self.d.clone(), self.c.clone()]),
        )
        .expect("invertible Möbius maps have degree 1")
    }

    /// Reads a degree-1 rational map as a Möbius transformation.
    pub fn from_map(map: &RationalMap) -> Result<Self> {
        if map.degree() != 1 {
            return Err(Error::Degenerate(format!("{map} does not have degree 1")));
        }
        MobiusTransform::new(
            map.num.coeff(1),
            map.num.coeff(0),
            map.den.coeff(1),
            map.den.coeff(0),
        )
    }
}

/// `μ⁻¹ ∘ φ ∘ μ`.
pub fn mobius_conjugate(phi: &RationalMap, mu: &MobiusTransform) -> RationalMap {
    mu.inverse().to_map().compose(&phi.compose(&mu.to_map()))
}

/// One named identity and whether it held.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

fn check(name: &str, lhs: RationalMap, rhs: RationalMap) -> IdentityCheck {
    IdentityCheck {
        name: name.into(),
        holds: lhs == rhs,
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
    }
}

fn quad(b: BigRational, c: BigRational) -> RationalMap {
    RationalMap::polynomial(Poly::from_coeffs(vec![c, b, BigRational::one()])).expect("degree 2")
}

/// The conjugation identities for the families `x²+kx` and
/// `x²-(k+1)x+k`, evaluated at a fixed `k`.
pub fn conjugation_identity_suite(k: &BigRational) -> Vec<IdentityCheck> {
    let one = BigRational::one();
    let zero = BigRational::zero();
    let shift = |t: BigRational| MobiusTransform::translation(t);
    let k1 = k + &one;
    let period_two = quad(-&k1, k.clone());
    vec![
        check(
            "x^2+kx by x-k",
            mobius_conjugate(&quad(k.clone(), zero.clone()), &shift(-k)),
            quad(-k, k.clone()),
        ),
        check(
            "x^2-(k+1)x+k by x+1",
            mobius_conjugate(&period_two, &shift(one.clone())),
            quad(&one - k, -&one),
        ),
        check(
            "x^2-(k+1)x+k by x+(k+1)",
            mobius_conjugate(&period_two, &shift(k1.clone())),
            quad(k1, -&one),
        ),
        check(
            "x^2+x by x-1 (Sylvester)",
            mobius_conjugate(&quad(one.clone(), zero.clone()), &shift(-&one)),
            quad(-&one, one.clone()),
        ),
        check(
            "x^2-1 by x-1",
            mobius_conjugate(&quad(zero.clone(), -&one), &shift(-&one)),
            quad(q(-2), one),
        ),
    ]
}

/// The three exceptional cases `k = -2, 2, 4` of `x² + kx`.
pub fn exceptional_conjugates() -> Vec<IdentityCheck> {
    let zero = BigRational::zero();
    let shift = |t: i64| MobiusTransform::translation(q(t));
    vec![
        check(
            "x^2-2x by x+1",
            mobius_conjugate(&quad(q(-2), zero.clone()), &shift(1)),
            quad(zero.clone(), q(-2)),
        ),
        check(
            "x^2+2x by x-1",
            mobius_conjugate(&quad(q(2), zero.clone()), &shift(-1)),
            quad(zero.clone(), zero.clone()),
        ),
        // θ = ν ∘ φ ∘ ν⁻¹ with ν = x+2, so that ν carries φ⁻ⁿ(-2) to θ⁻ⁿ(0).
        check(
            "x^2+4x by x+2 (as ν∘φ∘ν⁻¹)",
            mobius_conjugate(&quad(q(4), zero.clone()), &shift(2).inverse()),
            quad(zero, q(-2)),
        ),
    ]
}

/// True iff the numerator of `φⁿ(x) - α` is squarefree of degree `dⁿ`.
pub fn check_separable_preimages(phi: &RationalMap, alpha: &BigRational, n: usize) -> bool {
    let f = iterate(phi, n).sub_constant(alpha);
    let num = f.numerator();
    let full = phi.degree().checked_pow(n as u32);
    if num.degree() != full {
        return false;
    }
    num.gcd(&num.derivative()).is_constant()
}

/// Forward orbit `a₀, φ(a₀), φ²(a₀), ...` with period detection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitSequence {
    pub terms: Vec<BigRational>,
    /// `(preperiod, period)` once a value repeats.
    pub cycle: Option<(usize, usize)>,
}

impl OrbitSequence {
    pub fn preperiod(&self) -> Option<usize> {
        self.cycle.map(|c| c.0)
    }

    pub fn period(&self) -> Option<usize> {
        self.cycle.map(|c| c.1)
    }
}

/// Computes up to `max_steps` applications of `φ`, stopping at the first
/// repeated value.
pub fn forward_orbit(phi: &RationalMap, a0: &BigRational, max_steps: usize) -> Result<OrbitSequence> {
    let mut terms = vec![a0.clone()];
    let mut seen: HashMap<BigRational, usize> = HashMap::from([(a0.clone(), 0)]);
    for step in 1..=max_steps {
        let next = phi
            .eval(terms.last().expect("non-empty"))
            .ok_or(Error::Pole { step })?;
        if let Some(&first) = seen.get(&next) {
            return Ok(OrbitSequence {
                terms,
                cycle: Some((first, step - first)),
            });
        }
        seen.insert(next.clone(), step);
        terms.push(next);
    }
    Ok(OrbitSequence { terms, cycle: None })
}

fn kx_map(k: &BigRational) -> RationalMap {
    quad(k.clone(), BigRational::zero())
}

/// `φⁿ(x) = x(x+k) Π_{i=1}^{n-1} (φⁱ(x) + k)` for `φ = x² + kx`.
pub fn factorization_identity(k: &BigRational, n: usize) -> bool {
    let phi = kx_map(k);
    let lhs = iterate(&phi, n);
    let kc = Poly::constant(k.clone());
    let mut rhs = &Poly::x() * &(&Poly::x() + &kc);
    let mut it = RationalMap::identity();
    for _ in 1..n {
        it = phi.compose(&it);
        rhs = &rhs * &(it.numerator() + &kc);
    }
    n >= 1 && lhs.numerator() == &rhs
}

/// The factorization identity as an identity in `Z[k][x]`: both sides have
/// degree at most `2ⁿ` in `k`, so agreement at `2ⁿ + 1` integers is a proof.
pub fn factorization_identity_symbolic(n: usize) -> bool {
    let samples = (1i64 << n) + 1;
    (0..samples)
        .into_par_iter()
        .all(|k| factorization_identity(&q(k - samples / 2), n))
}

/// `iterate(x² + 2x, n) = (x + 1)^{2ⁿ} - 1`.
pub fn verify_power_identity(n: usize) -> bool {
    let phi = RationalMap::from_int_coeffs(&[0, 2, 1]).expect("degree 2");
    let rhs = &Poly::from_ints(&[1, 1]).pow(1 << n) - &Poly::one();
    iterate(&phi, n).numerator() == &rhs
}

/// Laurent polynomial in `z` with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly(BTreeMap<i64, BigInt>);

impl LaurentPoly {
    pub fn monomial(c: BigInt, e: i64) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(e, c);
        }
        LaurentPoly(m)
    }

    pub fn terms(&self) -> &BTreeMap<i64, BigInt> {
        &self.0
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.0.clone();
        for (e, c) in &other.0 {
            *out.entry(*e).or_default() += c;
        }
        out.retain(|_, c| !c.is_zero());
        LaurentPoly(out)
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (e1, c1) in &self.0 {
            for (e2, c2) in &other.0 {
                *out.entry(e1 + e2).or_default() += c1 * c2;
            }
        }
        out.retain(|_, c| !c.is_zero());
        LaurentPoly(out)
    }
}

/// With `ψ = x² - 2`: `ψⁿ(z + z⁻¹) = z^{2ⁿ} + z^{-2ⁿ}`.
pub fn verify_chebyshev_identity(n: usize) -> bool {
    let one = BigInt::one();
    let two = LaurentPoly::monomial(BigInt::from(-2), 0);
    let mut l = LaurentPoly::monomial(one.clone(), 1).add(&LaurentPoly::monomial(one.clone(), -1));
    for _ in 0..n {
        l = l.mul(&l).add(&two);
    }
    let e = 1i64 << n;
    l == LaurentPoly::monomial(one.clone(), e).add(&LaurentPoly::monomial(one, -e))
}

fn totient(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// `|G_n(φ)|` for `φ = x² + kx`, `k ∈ {-2, 2, 4}`, read off the cyclotomic
/// field containing the splitting field.
pub fn cyclotomic_orders(k: i64, n: usize) -> Result<BigUint> {
    if !(2..=62).contains(&n) {
        return Err(Error::OutOfRange {
            what: "n",
            value: n as i128,
            range: "[2, 62]".into(),
        });
    }
    let pow2 = |e: usize| 1u64 << e;
    let order = match k {
        // Index 2 in Gal(Q(ζ_{3·2ⁿ})/Q).
        -2 => totient(3 * pow2(n)) / 2,
        // Gal(Q(ζ_{2ⁿ})/Q).
        2 => totient(pow2(n)),
        // Index 2 in Gal(Q(ζ_{3·2^{n-1}})/Q).
        4 => totient(3 * pow2(n - 1)) / 2,
        _ => {
            return Err(Error::OutOfRange {
                what: "k",
                value: k as i128,
                range: "{-2, 2, 4}".into(),
            })
        }
    };
    Ok(BigUint::from(order))
}

/// An element of `Z[t]/(tⁿ - 1)`, stored as `n` coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationRingElement {
    coeffs: Vec<BigInt>,
}

impl RotationRingElement {
    pub fn zero(n: usize) -> Self {
        RotationRingElement {
            coeffs: vec![BigInt::zero(); n],
        }
    }

    /// `c · t^e`, with `e` reduced mod `n`.
    pub fn monomial(n: usize, c: BigInt, e: usize) -> Self {
        let mut r = RotationRingElement::zero(n);
        r.coeffs[e % n] = c;
        r
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        RotationRingElement {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.coeffs.len();
        let mut out = RotationRingElement::zero(n);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out.coeffs[(i + j) % n] += a * b;
            }
        }
        out
    }
}

/// Polynomial in `x` over `Z[t]/(tⁿ - 1)`.
type RingPoly = Vec<RotationRingElement>;

fn ring_poly_mul(a: &RingPoly, b: &RingPoly, n: usize) -> RingPoly {
    let mut out = vec![RotationRingElement::zero(n); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

/// `f(t^s · x)` for an integer polynomial `f`.
fn twist(f: &[BigInt], n: usize, s: usize) -> RingPoly {
    f.iter()
        .enumerate()
        .map(|(i, c)| RotationRingElement::monomial(n, c.clone(), i * s))
        .collect()
}

/// Which of the two families `±k(xⁿ ∓ a)/x^{n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationSign {
    /// `k(xⁿ - a)/x^{n-1}`.
    Plus,
    /// `-k(xⁿ + a)/x^{n-1}`.
    Minus,
}

/// Numerator and denominator of `φ_n` for integer `k`, `a`.
pub fn rotation_family(n: usize, sign: RotationSign, k: i64, a: i64) -> (Vec<BigInt>, Vec<BigInt>) {
    let s = match sign {
        RotationSign::Plus => 1,
        RotationSign::Minus => -1,
    };
    let mut num = vec![BigInt::zero(); n + 1];
    num[0] = BigInt::from(-k * a);
    num[n] = BigInt::from(s * k);
    let mut den = vec![BigInt::zero(); n];
    den[n - 1] = BigInt::one();
    (num, den)
}

/// `φ_n(t x) = t φ_n(x)` in `Z[t]/(tⁿ - 1)`, checked by cross-multiplying
/// `N(tx) D(x) = t N(x) D(tx)` at three sample values each of `k` and `a`
/// (both sides have degree at most 1 in each of `k` and `a`).
pub fn commutes_with_rotation(n: usize, sign: RotationSign) -> Result<bool> {
    if n < 2 {
        return Err(Error::OutOfRange {
            what: "n",
            value: n as i128,
            range: "[2, ∞)".into(),
        });
    }
    let t = vec![RotationRingElement::monomial(n, BigInt::one(), 1)];
    for k in [1i64, 2, -3] {
        for a in [1i64, -2, 5] {
            let (num, den) = rotation_family(n, sign, k, a);
            let lhs = ring_poly_mul(&twist(&num, n, 1), &twist(&den, n, 0), n);
            let rhs = ring_poly_mul(
                &ring_poly_mul(&t, &twist(&num, n, 0), n),
                &twist(&den, n, 1),
                n,
            );
            if lhs.len() != rhs.len() || lhs.iter().zip(&rhs).any(|(x, y)| x != y) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `m(1)/d` for the group generated by the rotation `x ↦ ζ_n x` acting on
/// the `n` preimages at level 1: the rotation permutes them cyclically.
pub fn hd_contradiction_witness(n: usize) -> Result<BigRational> {
    let shape = TreeShape::new(n, 1)?;
    let h = close_under_group_ops(shape, vec![TreeAutomorphism::root_rotation(shape)?], n)?;
    if !is_free_on_level(&h, 1)? {
        return Err(Error::Degenerate("rotation does not act freely on level 1".into()));
    }
    centralizer_hd_bound(&h, 1)
}

// Parsing of rational-function text.

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(BigInt),
    X,
    Op(char),
    Open,
    Close,
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                out.push(Token::Num(text.parse().expect("digits")));
            }
            'x' | 'X' => {
                out.push(Token::X);
                i += 1;
            }
            '+' | '-' | '*' | '/' | '^' => {
                out.push(Token::Op(c));
                i += 1;
            }
            '(' => {
                out.push(Token::Open);
                i += 1;
            }
            ')' => {
                out.push(Token::Close);
                i += 1;
            }
            _ => return Err(Error::Parse(format!("unexpected {c:?} in {s:?}"))),
        }
    }
    Ok(out)
}

/// Intermediate value: a quotient of polynomials, possibly constant.
#[derive(Debug, Clone)]
struct Frac(Poly, Poly);

impl Frac {
    fn add(&self, o: &Frac) -> Frac {
        Frac(&(&self.0 * &o.1) + &(&o.0 * &self.1), &self.1 * &o.1)
    }
    fn sub(&self, o: &Frac) -> Frac {
        Frac(&(&self.0 * &o.1) - &(&o.0 * &self.1), &self.1 * &o.1)
    }
    fn mul(&self, o: &Frac) -> Frac {
        Frac(&self.0 * &o.0, &self.1 * &o.1)
    }
    fn div(&self, o: &Frac) -> Result<Frac> {
        if o.0.is_zero() {
            return Err(Error::Parse("division by zero".into()));
        }
        Ok(Frac(&self.0 * &o.1, &self.1 * &o.0))
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Frac> {
        let mut acc = self.term()?;
        while let Some(Token::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == '+' { acc.add(&rhs) } else { acc.sub(&rhs) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Frac> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Op('*')) => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(Token::Op('/')) => {
                    self.pos += 1;
                    acc = acc.div(&self.unary()?)?;
                }
                // Implicit product, as in `3x` or `2(x+1)`.
                Some(Token::X | Token::Open | Token::Num(_)) => acc = acc.mul(&self.power()?),
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Frac> {
        match self.peek() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                let v = self.unary()?;
                Ok(Frac(-&v.0, v.1))
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Frac> {
        let base = self.atom()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.pos += 1;
            let negative = matches!(self.peek(), Some(Token::Op('-')));
            if negative {
                self.pos += 1;
            }
            let e = match self.next() {
                Some(Token::Num(e)) => e
                    .to_usize()
                    .filter(|&e| e <= 1 << 16)
                    .ok_or_else(|| Error::Parse("exponent too large".into()))?,
                _ => return Err(Error::Parse("expected an integer exponent".into())),
            };
            let p = Frac(base.0.pow(e), base.1.pow(e));
            return if negative {
                Frac(Poly::one(), Poly::one()).div(&p)
            } else {
                Ok(p)
            };
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Frac> {
        match self.next() {
            Some(Token::Num(n)) => Ok(Frac(Poly::from_bigints([n]), Poly::one())),
            Some(Token::X) => Ok(Frac(Poly::x(), Poly::one())),
            Some(Token::Open) => {
                let v = self.expr()?;
                match self.next() {
                    Some(Token::Close) => Ok(v),
                    _ => Err(Error::Parse("missing ')'".into())),
                }
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parses text such as `x^2+3*x`, `(x^2+1)/x` or `3/2*x^2-1`.
pub fn parse_map(s: &str) -> Result<RationalMap> {
    let tokens = tokenize(s)?;
    if tokens.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut parser = Parser { tokens, pos: 0 };
    let v = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::Parse(format!("trailing input in {s:?}")));
    }
    RationalMap::new(v.0, v.1)
}

/// Parses a rational number such as `-3`, `7/2`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: BigInt = n.trim().parse().map_err(|_| Error::Parse(format!("bad number {s:?}")))?;
    let d: BigInt = d.trim().parse().map_err(|_| Error::Parse(format!("bad number {s:?}")))?;
    if d.is_zero() {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok(BigRational::new(n, d))
}
