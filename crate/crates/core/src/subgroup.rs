//! Finite subgroups of `Aut(T_n)`: closure, orbits, centralizers, branch
//! stabilizers and the periodic-alignment subgroups, plus closed-form orders
//! and Hausdorff dimensions.

use std::collections::{BTreeMap, HashSet, VecDeque};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tree::{
    aut_order, enumerate_aut, enumerate_portraits, NodeAddress, NodeRule,
    Permutation, TreeAutomorphism, TreeShape,
};

/// A subgroup of `Aut(T_n)` given by generators, optionally with its full
/// element list.
#[derive(Debug, Clone)]
pub struct FiniteSubgroup {
    shape: TreeShape,
    generators: Vec<TreeAutomorphism>,
    elements: Option<Vec<TreeAutomorphism>>,
}

impl FiniteSubgroup {
    /// A subgroup known only by generators.
    pub fn from_generators(shape: TreeShape, generators: Vec<TreeAutomorphism>) -> Result<Self> {
        for g in &generators {
            if g.shape() != shape {
                return Err(Error::ShapeMismatch {
                    left: shape.to_string(),
                    right: g.shape().to_string(),
                });
            }
        }
        Ok(FiniteSubgroup {
            shape,
            generators,
            elements: None,
        })
    }

    pub fn trivial(shape: TreeShape) -> Self {
        FiniteSubgroup {
            shape,
            generators: Vec::new(),
            elements: Some(vec![TreeAutomorphism::identity(shape)]),
        }
    }

    /// Wraps an element list already known to be a subgroup. The list is
    /// sorted so that equal groups compare equal.
    fn from_elements(
        shape: TreeShape,
        generators: Vec<TreeAutomorphism>,
        mut elements: Vec<TreeAutomorphism>,
    ) -> Self {
        elements.sort();
        FiniteSubgroup {
            shape,
            generators,
            elements: Some(elements),
        }
    }

    pub fn shape(&self) -> TreeShape {
        self.shape
    }

    pub fn generators(&self) -> &[TreeAutomorphism] {
        &self.generators
    }

    pub fn elements(&self) -> Option<&[TreeAutomorphism]> {
        self.elements.as_deref()
    }

    fn require_elements(&self) -> Result<&[TreeAutomorphism]> {
        self.elements
            .as_deref()
            .ok_or_else(|| Error::Guard("subgroup has not been enumerated".into()))
    }

    /// Group order; requires an enumerated subgroup.
    pub fn order(&self) -> Result<usize> {
        Ok(self.require_elements()?.len())
    }

    pub fn contains(&self, a: &TreeAutomorphism) -> Result<bool> {
        Ok(self.require_elements()?.binary_search(a).is_ok())
    }

    /// Checks closure, inverses, identity and Lagrange's theorem.
    pub fn is_valid_subgroup(&self) -> Result<bool> {
        let elements = self.require_elements()?;
        let set: HashSet<&TreeAutomorphism> = elements.iter().collect();
        if !set.contains(&TreeAutomorphism::identity(self.shape)) {
            return Ok(false);
        }
        let lagrange = (aut_order(&self.shape) % BigUint::from(elements.len())).is_zero();
        let closed = elements.par_iter().all(|a| {
            set.contains(&a.invert())
                && elements
                    .iter()
                    .all(|b| set.contains(&a.compose(b).expect("same shape")))
        });
        Ok(lagrange && closed)
    }

    /// The image under restriction to `T_i`, enumerated.
    pub fn restrict(&self, level: usize) -> Result<FiniteSubgroup> {
        let shape = self.shape.truncated(level)?;
        let generators = self
            .generators
            .iter()
            .map(|g| g.restrict(level))
            .collect::<Result<Vec<_>>>()?;
        let elements: HashSet<TreeAutomorphism> = self
            .require_elements()?
            .iter()
            .map(|g| g.restrict(level))
            .collect::<Result<_>>()?;
        Ok(FiniteSubgroup::from_elements(
            shape,
            generators,
            elements.into_iter().collect(),
        ))
    }

    /// One portrait text per element (or per generator when not enumerated),
    /// separated by blank lines.
    pub fn to_portrait_texts(&self) -> Vec<String> {
        self.elements
            .as_deref()
            .unwrap_or(&self.generators)
            .iter()
            .map(TreeAutomorphism::to_portrait_text)
            .collect()
    }
}

/// Smallest subgroup containing `generators`, by breadth-first closure.
pub fn close_under_group_ops(
    shape: TreeShape,
    generators: Vec<TreeAutomorphism>,
    limit: usize,
) -> Result<FiniteSubgroup> {
    let group = FiniteSubgroup::from_generators(shape, generators)?;
    let identity = TreeAutomorphism::identity(shape);
    let mut seen: HashSet<TreeAutomorphism> = HashSet::from([identity.clone()]);
    let mut queue = VecDeque::from([identity]);
    // For a finite group, closing under right multiplication by generators
    // already yields inverses.
    while let Some(x) = queue.pop_front() {
        for g in &group.generators {
            let y = x.compose(g)?;
            if seen.insert(y.clone()) {
                if seen.len() > limit {
                    return Err(Error::TooLarge {
                        what: "generated subgroup".into(),
                        size: format!("> {limit}"),
                        limit,
                    });
                }
                queue.push_back(y);
            }
        }
    }
    Ok(FiniteSubgroup::from_elements(
        shape,
        group.generators,
        seen.into_iter().collect(),
    ))
}

/// The orbits of a subgroup on the vertices of one level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitPartition {
    pub level: usize,
    /// Each orbit lists base-`d` vertex values in increasing order; orbits are
    /// ordered by their smallest vertex.
    pub orbits: Vec<Vec<usize>>,
    pub m: usize,
}

impl OrbitPartition {
    /// Orbits written as node addresses.
    pub fn orbit_addresses(&self, arity: usize) -> Vec<Vec<NodeAddress>> {
        self.orbits
            .iter()
            .map(|o| {
                o.iter()
                    .map(|&x| NodeAddress::from_level_value(arity, self.level, x))
                    .collect()
            })
            .collect()
    }
}

/// Orbits on level `i`, computed from the generators alone.
pub fn orbits_on_level(h: &FiniteSubgroup, level: usize) -> Result<OrbitPartition> {
    let shape = h.shape();
    if level > shape.height() {
        return Err(Error::OutOfRange {
            what: "level",
            value: level as i128,
            range: format!("[0, {}]", shape.height()),
        });
    }
    let size = shape.level_size(level);
    let mut orbit_of = vec![usize::MAX; size];
    let mut orbits = Vec::new();
    for start in 0..size {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        orbit_of[start] = id;
        let mut members = vec![start];
        let mut frontier = vec![start];
        while let Some(x) = frontier.pop() {
            for g in h.generators() {
                let y = g.apply_level(level, x);
                if orbit_of[y] == usize::MAX {
                    orbit_of[y] = id;
                    members.push(y);
                    frontier.push(y);
                }
            }
        }
        members.sort_unstable();
        orbits.push(members);
    }
    let m = orbits.len();
    Ok(OrbitPartition { level, orbits, m })
}

/// True iff no non-identity element of `h` fixes a vertex of level `i`.
pub fn is_free_on_level(h: &FiniteSubgroup, level: usize) -> Result<bool> {
    let shape = h.shape();
    shape.truncated(level)?;
    let size = shape.level_size(level);
    Ok(h.require_elements()?.par_iter().all(|g| {
        g.is_identity() || (0..size).all(|x| g.apply_level(level, x) != x)
    }))
}

/// The centralizer of `h` in `Aut(T_n)` by brute force over the whole group.
pub fn centralizer(h: &FiniteSubgroup, limit: usize) -> Result<FiniteSubgroup> {
    let shape = h.shape();
    let all = enumerate_aut(shape, limit)?;
    let gens = h.generators();
    let elements: Vec<TreeAutomorphism> = all
        .into_par_iter()
        .filter(|g| {
            gens.iter()
                .all(|x| g.compose(x).expect("same shape") == x.compose(g).expect("same shape"))
        })
        .collect();
    Ok(FiniteSubgroup::from_elements(shape, Vec::new(), elements))
}

/// `{g ∈ C : g acts trivially on T_i}`.
pub fn kernel_of_restriction(c: &FiniteSubgroup, level: usize) -> Result<FiniteSubgroup> {
    c.shape().truncated(level)?;
    let elements: Vec<TreeAutomorphism> = c
        .require_elements()?
        .iter()
        .filter(|g| g.restrict(level).map(|r| r.is_identity()).unwrap_or(false))
        .cloned()
        .collect();
    Ok(FiniteSubgroup::from_elements(c.shape(), Vec::new(), elements))
}

/// `|Aut(T_{n-i})|^{m(i)}`, the size of the target of the injection from the
/// kernel of restriction to level `i`.
pub fn kernel_bound(shape: &TreeShape, level: usize, m: usize) -> Result<BigUint> {
    let rest = TreeShape::new(shape.arity(), shape.height() - shape.truncated(level)?.height())?;
    Ok(num_traits::pow(aut_order(&rest), m))
}

/// Exact `m(i)/d^i`.
pub fn centralizer_hd_bound(h: &FiniteSubgroup, level: usize) -> Result<BigRational> {
    let orbits = orbits_on_level(h, level)?;
    Ok(BigRational::new(
        BigInt::from(orbits.m),
        BigInt::from(h.shape().level_size(level)),
    ))
}

/// A distinguished branch through the tree whose digits repeat with period
/// `m`, standing in for the branch of a periodic orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchSpec {
    shape: TreeShape,
    pattern: Vec<u8>,
}

impl BranchSpec {
    /// The all-zeros branch with period `m`.
    pub fn zeros(shape: TreeShape, m: usize) -> Result<Self> {
        BranchSpec::periodic(shape, vec![0; m])
    }

    /// The branch whose `j`-th digit is `pattern[j mod m]`, where
    /// `m = pattern.len()`.
    pub fn periodic(shape: TreeShape, pattern: Vec<u8>) -> Result<Self> {
        let m = pattern.len();
        if m == 0 || m > shape.height() {
            return Err(Error::OutOfRange {
                what: "period m",
                value: m as i128,
                range: format!("[1, {}]", shape.height()),
            });
        }
        if pattern.iter().any(|&c| c as usize >= shape.arity()) {
            return Err(Error::InvalidBranch(format!("{pattern:?}")));
        }
        Ok(BranchSpec { shape, pattern })
    }

    /// Builds a spec from explicit branch nodes `a_0 = ε, a_1, ..., a_n`.
    /// Each node must be the parent of the next, and the digit sequence must
    /// repeat with period `m`.
    pub fn from_nodes(shape: TreeShape, nodes: &[NodeAddress], m: usize) -> Result<Self> {
        if nodes.len() != shape.height() + 1 || !nodes[0].is_root() {
            return Err(Error::InvalidBranch(format!(
                "expected {} nodes starting at the root",
                shape.height() + 1
            )));
        }
        for w in nodes.windows(2) {
            if w[1].parent().as_ref() != Some(&w[0]) {
                return Err(Error::InvalidBranch("consecutive nodes are not parent and child".into()));
            }
            w[1].validate(&shape)?;
        }
        let digits = nodes.last().expect("non-empty").digits();
        if m == 0 || m > shape.height() {
            return Err(Error::OutOfRange {
                what: "period m",
                value: m as i128,
                range: format!("[1, {}]", shape.height()),
            });
        }
        if (m..digits.len()).any(|j| digits[j] != digits[j - m]) {
            return Err(Error::InvalidBranch(format!(
                "digits {digits:?} are not {m}-periodic"
            )));
        }
        BranchSpec::periodic(shape, digits[..m].to_vec())
    }

    pub fn shape(&self) -> TreeShape {
        self.shape
    }

    pub fn period(&self) -> usize {
        self.pattern.len()
    }

    pub fn digit(&self, level: usize) -> u8 {
        self.pattern[level % self.pattern.len()]
    }

    /// Branch node `a_j`.
    pub fn node(&self, level: usize) -> NodeAddress {
        let digits = (0..level).map(|j| self.digit(j)).collect();
        NodeAddress::new(&self.shape, digits).expect("valid by construction")
    }

    /// Length of the common prefix of `v` with the branch.
    fn branch_depth(&self, v: &NodeAddress) -> usize {
        v.digits()
            .iter()
            .enumerate()
            .take_while(|&(j, &c)| c == self.digit(j))
            .count()
    }

    /// True iff `a` fixes the leaf `a_n` of the branch (hence every `a_j`).
    pub fn stabilizes(&self, a: &TreeAutomorphism) -> bool {
        let leaf = self.node(self.shape.height());
        a.apply(&leaf).map(|img| img == leaf).unwrap_or(false)
    }

    /// True iff `a` fixes the branch and acts the same way on the subtrees at
    /// `a_r` and `a_s` whenever `r ≡ s (mod m)`.
    pub fn aligns(&self, a: &TreeAutomorphism) -> bool {
        if !self.stabilizes(a) {
            return false;
        }
        let m = self.period();
        let n = self.shape.height();
        (m..n).all(|j| {
            let deep = a.subtree_section(&self.node(j)).expect("branch is fixed");
            let shallow = a.subtree_section(&self.node(j - m)).expect("branch is fixed");
            shallow.restrict(n - j).expect("in range") == deep
        })
    }

    fn stabilizer_rules(&self) -> Vec<NodeRule> {
        let d = self.shape.arity();
        let all = Permutation::all(d);
        (0..self.shape.height())
            .flat_map(|level| self.shape.level_addresses(level))
            .map(|v| {
                if self.branch_depth(&v) == v.len() {
                    let keep = self.digit(v.len()) as usize;
                    NodeRule::Free(all.iter().filter(|p| p.apply(keep) == keep).cloned().collect())
                } else {
                    NodeRule::Free(all.clone())
                }
            })
            .collect()
    }

    fn alignment_rules(&self) -> Vec<NodeRule> {
        let m = self.period();
        let mut rules = self.stabilizer_rules();
        for level in 0..self.shape.height() {
            for v in self.shape.level_addresses(level) {
                let j = self.branch_depth(&v);
                if j < m {
                    continue;
                }
                // v = a_j · w is labelled like a_{j-m} · w.
                let mut digits = self.node(j - m).digits().to_vec();
                digits.extend_from_slice(&v.digits()[j..]);
                let src = NodeAddress::new(&self.shape, digits).expect("shallower node");
                rules[v.canonical_index(&self.shape)] =
                    NodeRule::Copy(src.canonical_index(&self.shape));
            }
        }
        rules
    }
}

/// Every element of `Stab_n` for the branch in `spec`.
pub fn build_branch_stabilizer(spec: &BranchSpec, limit: usize) -> Result<FiniteSubgroup> {
    let shape = spec.shape();
    let elements = enumerate_portraits(shape, &spec.stabilizer_rules(), limit, "Stab_n")?;
    Ok(FiniteSubgroup::from_elements(shape, Vec::new(), elements))
}

/// Every element of `S_n` for the branch and period in `spec`.
pub fn build_s_subgroup(spec: &BranchSpec, limit: usize) -> Result<FiniteSubgroup> {
    let shape = spec.shape();
    let elements = enumerate_portraits(shape, &spec.alignment_rules(), limit, "S_n")?;
    Ok(FiniteSubgroup::from_elements(shape, Vec::new(), elements))
}

fn check_period(n: usize, m: usize) -> Result<()> {
    if m == 0 || m > n {
        return Err(Error::OutOfRange {
            what: "m",
            value: m as i128,
            range: format!("[1, {n}]"),
        });
    }
    Ok(())
}

fn geometric(d: usize, terms: usize) -> BigUint {
    // 1 + d + ... + d^{terms-1}
    (BigUint::from(d).pow(terms as u32) - 1u32) / BigUint::from(d - 1)
}

/// `|Stab_n| = (d!)^{(d^n-1)/(d-1)} / d^n`.
pub fn stab_branch_order(d: usize, n: usize) -> BigUint {
    stab_order_exponents(d, n).value()
}

/// `|S_n| = (d!)^{(d^n - d^{n-m})/(d-1)} / d^m`.
pub fn s_group_order(d: usize, n: usize, m: usize) -> Result<BigUint> {
    Ok(s_order_exponents(d, n, m)?.value())
}

/// `[Stab_n : S_n] = (d!)^{(d^{n-m}-1)/(d-1)} / d^{n-m}`.
pub fn stab_s_index(d: usize, n: usize, m: usize) -> Result<BigUint> {
    check_period(n, m)?;
    Ok(OrderExponents::factorial_over_power(d, geometric(d, n - m), BigUint::from(n - m)).value())
}

/// A group order kept as `Π p^{e_p}` so that doubly exponential orders stay
/// representable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderExponents(BTreeMap<u64, BigUint>);

impl OrderExponents {
    /// `(d!)^a / d^b`.
    pub fn factorial_over_power(d: usize, a: BigUint, b: BigUint) -> Self {
        let mut map: BTreeMap<u64, BigUint> = BTreeMap::new();
        for k in 2..=d as u64 {
            for (p, e) in factor_small(k) {
                *map.entry(p).or_default() += &a * e;
            }
        }
        for (p, e) in factor_small(d as u64) {
            let slot = map.entry(p).or_default();
            *slot -= &b * e;
        }
        map.retain(|_, e| !e.is_zero());
        OrderExponents(map)
    }

    pub fn exponents(&self) -> &BTreeMap<u64, BigUint> {
        &self.0
    }

    /// The order itself; only sensible when the exponents are small.
    pub fn value(&self) -> BigUint {
        self.0.iter().fold(BigUint::one(), |acc, (&p, e)| {
            acc * BigUint::from(p).pow(e.to_u32().expect("exponent too large to expand"))
        })
    }
}

fn factor_small(mut k: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= k {
        let mut e = 0;
        while k.is_multiple_of(p) {
            k /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if k > 1 {
        out.push((k, 1));
    }
    out
}

pub fn aut_order_exponents(d: usize, n: usize) -> OrderExponents {
    OrderExponents::factorial_over_power(d, geometric(d, n), BigUint::zero())
}

pub fn stab_order_exponents(d: usize, n: usize) -> OrderExponents {
    OrderExponents::factorial_over_power(d, geometric(d, n), BigUint::from(n))
}

pub fn s_order_exponents(d: usize, n: usize, m: usize) -> Result<OrderExponents> {
    check_period(n, m)?;
    let dd = BigUint::from(d);
    let a = (dd.pow(n as u32) - dd.pow((n - m) as u32)) / BigUint::from(d - 1);
    Ok(OrderExponents::factorial_over_power(d, a, BigUint::from(m)))
}

/// `1 - d^{-m}`.
pub fn hausdorff_closed_form(d: usize, m: usize) -> BigRational {
    let dm = BigInt::from(d).pow(m as u32);
    BigRational::one() - BigRational::new(BigInt::one(), dm)
}

/// One finite-level value of `log|H_n| / log|G_n|`.
#[derive(Debug, Clone, PartialEq)]
pub enum LogRatio {
    /// Both orders are powers of a common base, so the ratio is rational.
    Exact(BigRational),
    /// Evaluated from prime exponents with floating-point logarithms.
    Approximate(f64),
}

impl LogRatio {
    pub fn to_f64(&self) -> f64 {
        match self {
            LogRatio::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            LogRatio::Approximate(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            LogRatio::Exact(r) => Some(r),
            LogRatio::Approximate(_) => None,
        }
    }
}

/// `log|H| / log|G|`. Undefined (None) when `|G| = 1`.
pub fn log_ratio(h: &OrderExponents, g: &OrderExponents) -> Option<LogRatio> {
    let (&p0, g0) = g.0.iter().next()?;
    let h0 = h.0.get(&p0).cloned().unwrap_or_default();
    let candidate = BigRational::new(BigInt::from(h0), BigInt::from(g0.clone()));
    let parallel = h.0.keys().all(|p| g.0.contains_key(p))
        && g.0.iter().all(|(p, ge)| {
            let he = h.0.get(p).cloned().unwrap_or_default();
            BigRational::new(BigInt::from(he), BigInt::from(ge.clone())) == candidate
        });
    if parallel {
        return Some(LogRatio::Exact(candidate));
    }
    let log = |o: &OrderExponents| -> f64 {
        o.0.iter()
            .map(|(&p, e)| e.to_f64().unwrap_or(f64::INFINITY) * (p as f64).ln())
            .sum()
    };
    Some(LogRatio::Approximate(log(h) / log(g)))
}

/// Finite-level ratios and the known limit.
#[derive(Debug, Clone)]
pub struct HausdorffEstimate {
    pub ratios: Vec<(usize, LogRatio)>,
    pub limit: Option<BigRational>,
}

/// `log|S_n| / log|Stab_n|` for `n` in `levels`, with limit `1 - d^{-m}`.
/// Levels where `|Stab_n| = 1` or `n < m` are skipped.
pub fn hausdorff_estimate(
    d: usize,
    m: usize,
    levels: impl IntoIterator<Item = usize>,
) -> Result<HausdorffEstimate> {
    let mut ratios = Vec::new();
    for n in levels {
        if n < m {
            continue;
        }
        let s = s_order_exponents(d, n, m)?;
        let stab = stab_order_exponents(d, n);
        if let Some(r) = log_ratio(&s, &stab) {
            ratios.push((n, r));
        }
    }
    Ok(HausdorffEstimate {
        ratios,
        limit: Some(hausdorff_closed_form(d, m)),
    })
}

/// Record emitted by the CLI for one centralizer level.
#[derive(Debug, Clone, Serialize)]
pub struct CentralizerLevelReport {
    pub level: usize,
    pub orbits: Vec<Vec<String>>,
    pub m: usize,
    pub free: bool,
    pub kernel_order: usize,
    pub kernel_bound: String,
    pub bound: String,
}

/// Orbits, freeness, kernel size and Hausdorff bound of `C(H)` at `level`.
pub fn centralizer_level_report(
    h: &FiniteSubgroup,
    c: &FiniteSubgroup,
    level: usize,
) -> Result<CentralizerLevelReport> {
    let shape = h.shape();
    let orbits = orbits_on_level(h, level)?;
    let kernel = kernel_of_restriction(c, level)?;
    Ok(CentralizerLevelReport {
        level,
        orbits: orbits
            .orbit_addresses(shape.arity())
            .iter()
            .map(|o| o.iter().map(|v| v.display(shape.arity())).collect())
            .collect(),
        m: orbits.m,
        free: is_free_on_level(h, level)?,
        kernel_order: kernel.order()?,
        kernel_bound: kernel_bound(&shape, level, orbits.m)?.to_string(),
        bound: centralizer_hd_bound(h, level)?.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{enumerate_aut, factorial, DEFAULT_ENUMERATION_LIMIT};
    use num_traits::Signed;
    use proptest::prelude::*;

    fn shape(d: usize, n: usize) -> TreeShape {
        TreeShape::new(d, n).unwrap()
    }

    fn addr(digits: &[u8]) -> NodeAddress {
        NodeAddress::new(&shape(10, digits.len()), digits.to_vec()).unwrap()
    }

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    fn dihedral_pair() -> (TreeAutomorphism, TreeAutomorphism) {
        let s = shape(2, 2);
        let swap = Permutation::transposition(2, 0, 1);
        let a = TreeAutomorphism::from_node_labels(
            s,
            [(NodeAddress::root(), swap.clone()), (addr(&[1]), swap)],
        )
        .unwrap();
        let x = TreeAutomorphism::root_rotation(s).unwrap();
        (a, x)
    }

    /// `ã` acts as `a` on `T_2` and swaps the children of every level-2 vertex.
    fn lifted_pair() -> (TreeAutomorphism, TreeAutomorphism) {
        let s = shape(2, 3);
        let swap = Permutation::transposition(2, 0, 1);
        let mut labels = vec![
            (NodeAddress::root(), swap.clone()),
            (addr(&[1]), swap.clone()),
        ];
        for v in s.level_addresses(2) {
            labels.push((v, swap.clone()));
        }
        let a = TreeAutomorphism::from_node_labels(s, labels).unwrap();
        let x = TreeAutomorphism::root_rotation(s).unwrap();
        (a, x)
    }

    fn brute_stab(spec: &BranchSpec) -> Vec<TreeAutomorphism> {
        enumerate_aut(spec.shape(), DEFAULT_ENUMERATION_LIMIT)
            .unwrap()
            .into_iter()
            .filter(|a| spec.stabilizes(a))
            .collect()
    }

    fn brute_s(spec: &BranchSpec) -> Vec<TreeAutomorphism> {
        brute_stab(spec).into_iter().filter(|a| spec.aligns(a)).collect()
    }

    #[test]
    fn cyclic_closure() {
        let s = shape(2, 2);
        let g = close_under_group_ops(
            s,
            vec![TreeAutomorphism::root_rotation(s).unwrap()],
            100,
        )
        .unwrap();
        assert_eq!(g.order().unwrap(), 2);
        assert!(g.is_valid_subgroup().unwrap());
    }

    #[test]
    fn dihedral_generators_give_all_of_aut_t2() {
        let (a, x) = dihedral_pair();
        let g = close_under_group_ops(shape(2, 2), vec![a.clone(), x.clone()], 100).unwrap();
        assert_eq!(g.order().unwrap(), 8);
        assert!(a.pow(4).is_identity());
        assert!(x.pow(2).is_identity());
        let xax = x.compose(&a).unwrap().compose(&x).unwrap();
        assert_eq!(xax, a.pow(3));
    }

    #[test]
    fn lifted_dihedral_acts_simply_transitively_on_level_three() {
        let (a, x) = lifted_pair();
        let h = close_under_group_ops(shape(2, 3), vec![a.clone(), x.clone()], 100).unwrap();
        assert_eq!(h.order().unwrap(), 8);
        assert!(a.pow(4).is_identity());
        let xax = x.compose(&a).unwrap().compose(&x).unwrap();
        assert_eq!(xax, a.pow(3));
        let orbits = orbits_on_level(&h, 3).unwrap();
        assert_eq!(orbits.m, 1);
        assert!(is_free_on_level(&h, 3).unwrap());
        let down = h.restrict(2).unwrap();
        assert_eq!(down.order().unwrap(), 8);
        assert!(!is_free_on_level(&down, 2).unwrap());
    }

    #[test]
    fn orbits_of_trivial_and_swap() {
        let s = shape(2, 3);
        let trivial = FiniteSubgroup::trivial(s);
        for i in 0..=3 {
            assert_eq!(orbits_on_level(&trivial, i).unwrap().m, 1 << i);
            assert!(is_free_on_level(&trivial, i).unwrap());
        }
        let h = close_under_group_ops(s, vec![TreeAutomorphism::root_rotation(s).unwrap()], 10)
            .unwrap();
        assert_eq!(orbits_on_level(&h, 1).unwrap().m, 1);
        assert!(is_free_on_level(&h, 1).unwrap());
        assert!(orbits_on_level(&h, 4).is_err());
    }

    #[test]
    fn orbit_partition_covers_level() {
        let (a, x) = lifted_pair();
        let h = FiniteSubgroup::from_generators(shape(2, 3), vec![a, x]).unwrap();
        for i in 0..=3 {
            let p = orbits_on_level(&h, i).unwrap();
            let mut all: Vec<usize> = p.orbits.concat();
            all.sort_unstable();
            assert_eq!(all, (0..1 << i).collect::<Vec<_>>());
        }
    }

    fn swap_group(n: usize) -> FiniteSubgroup {
        let s = shape(2, n);
        close_under_group_ops(s, vec![TreeAutomorphism::root_rotation(s).unwrap()], 10).unwrap()
    }

    fn brute_centralizer_order(h: &FiniteSubgroup) -> usize {
        // Independent of the generator shortcut: commute with every element.
        let elems = h.elements().unwrap();
        enumerate_aut(h.shape(), DEFAULT_ENUMERATION_LIMIT)
            .unwrap()
            .iter()
            .filter(|g| {
                elems
                    .iter()
                    .all(|x| g.compose(x).unwrap() == x.compose(g).unwrap())
            })
            .count()
    }

    #[test]
    fn swap_centralizers() {
        let c2 = centralizer(&swap_group(2), DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert_eq!(c2.order().unwrap(), 4);
        assert_eq!(brute_centralizer_order(&swap_group(2)), 4);
        let h3 = swap_group(3);
        let c3 = centralizer(&h3, DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert_eq!(c3.order().unwrap(), 16);
        assert_eq!(brute_centralizer_order(&h3), 16);
        assert!(c3.is_valid_subgroup().unwrap());
    }

    #[test]
    fn swap_kernel_meets_bound_under_free_action() {
        let h = swap_group(3);
        let c = centralizer(&h, DEFAULT_ENUMERATION_LIMIT).unwrap();
        let k = kernel_of_restriction(&c, 1).unwrap();
        let m = orbits_on_level(&h, 1).unwrap().m;
        assert_eq!(m, 1);
        assert_eq!(k.order().unwrap(), 8);
        assert_eq!(kernel_bound(&h.shape(), 1, m).unwrap(), big(8));
        assert_eq!(kernel_of_restriction(&c, 3).unwrap().order().unwrap(), 1);
        assert_eq!(kernel_of_restriction(&c, 0).unwrap().order().unwrap(), 16);
    }

    #[test]
    fn three_cycle_centralizer() {
        let s = shape(3, 2);
        let h = close_under_group_ops(s, vec![TreeAutomorphism::root_rotation(s).unwrap()], 10)
            .unwrap();
        let c = centralizer(&h, DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert_eq!(c.order().unwrap(), 18);
        assert_eq!(brute_centralizer_order(&h), 18);
        let k = kernel_of_restriction(&c, 1).unwrap();
        assert_eq!(k.order().unwrap(), 6);
        assert_eq!(kernel_bound(&s, 1, 1).unwrap(), big(6));
        assert_eq!(centralizer_hd_bound(&h, 1).unwrap(), rat(1, 3));
    }

    #[test]
    fn trivial_group_kernel_is_everything_below_level() {
        let s = shape(2, 3);
        let c = centralizer(&FiniteSubgroup::trivial(s), DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert_eq!(c.order().unwrap(), 128);
        let k = kernel_of_restriction(&c, 1).unwrap();
        assert_eq!(BigUint::from(k.order().unwrap()), kernel_bound(&s, 1, 2).unwrap());
        assert_eq!(
            centralizer_hd_bound(&FiniteSubgroup::trivial(s), 2).unwrap(),
            BigRational::one()
        );
    }

    #[test]
    fn hd_bounds() {
        assert_eq!(centralizer_hd_bound(&swap_group(2), 1).unwrap(), rat(1, 2));
    }

    fn small_subgroups() -> Vec<FiniteSubgroup> {
        let mut out = Vec::new();
        for (d, n) in [(2, 2), (2, 3), (3, 2)] {
            let s = shape(d, n);
            let all = enumerate_aut(s, DEFAULT_ENUMERATION_LIMIT).unwrap();
            out.push(FiniteSubgroup::trivial(s));
            for step in [1usize, 5, 37] {
                let g = all[(step * 13) % all.len()].clone();
                let h = all[(step * 29 + 3) % all.len()].clone();
                out.push(close_under_group_ops(s, vec![g.clone()], 10_000).unwrap());
                out.push(close_under_group_ops(s, vec![g, h], 10_000).unwrap());
            }
        }
        out
    }

    #[test]
    fn kernel_injection_bound_and_free_equality() {
        for h in small_subgroups() {
            let s = h.shape();
            let c = centralizer(&h, DEFAULT_ENUMERATION_LIMIT).unwrap();
            for i in 0..=s.height() {
                let m = orbits_on_level(&h, i).unwrap().m;
                let k = BigUint::from(kernel_of_restriction(&c, i).unwrap().order().unwrap());
                let bound = kernel_bound(&s, i, m).unwrap();
                assert!(k <= bound);
                if is_free_on_level(&h, i).unwrap() {
                    assert_eq!(k, bound, "free action at level {i} of {s}");
                }
            }
        }
    }

    #[test]
    fn finite_level_centralizer_bound() {
        // |C_n| <= |C_i| * |Aut(T_{n-i})|^{m(i)}, with C_i the centralizer of
        // the restricted group.
        for h in small_subgroups() {
            let s = h.shape();
            let c = centralizer(&h, DEFAULT_ENUMERATION_LIMIT).unwrap();
            for i in 0..=s.height() {
                let hi = h.restrict(i).unwrap();
                let ci = centralizer(&hi, DEFAULT_ENUMERATION_LIMIT).unwrap();
                let m = orbits_on_level(&h, i).unwrap().m;
                let rhs = BigUint::from(ci.order().unwrap()) * kernel_bound(&s, i, m).unwrap();
                assert!(BigUint::from(c.order().unwrap()) <= rhs);
            }
        }
    }

    #[test]
    fn orbit_count_doubles_on_consecutive_free_levels() {
        for h in small_subgroups() {
            let s = h.shape();
            for i in 0..s.height() {
                if is_free_on_level(&h, i).unwrap() && is_free_on_level(&h, i + 1).unwrap() {
                    let a = orbits_on_level(&h, i).unwrap().m;
                    let b = orbits_on_level(&h, i + 1).unwrap().m;
                    assert_eq!(b, s.arity() * a);
                }
            }
        }
    }

    #[test]
    fn closed_form_orders() {
        assert_eq!(stab_branch_order(2, 3), big(16));
        assert_eq!(stab_branch_order(2, 1), big(1));
        assert_eq!(stab_branch_order(3, 2), big(144));
        assert_eq!(s_group_order(2, 3, 1).unwrap(), big(8));
        assert_eq!(s_group_order(2, 3, 2).unwrap(), big(16));
        assert_eq!(s_group_order(3, 2, 1).unwrap(), big(72));
        assert_eq!(stab_s_index(2, 3, 1).unwrap(), big(2));
        assert_eq!(stab_s_index(2, 4, 1).unwrap(), big(16));
        assert!(s_group_order(2, 3, 0).is_err());
        assert!(s_group_order(2, 3, 4).is_err());
    }

    #[test]
    fn order_formulas_used_in_family_proofs() {
        for n in 1..=12 {
            // 2^{2^{n-1}-1} for m = 1
            let expected = BigUint::from(2u32).pow((1u32 << (n - 1)) - 1);
            assert_eq!(s_group_order(2, n, 1).unwrap(), expected);
        }
        for n in 2..=12 {
            // 2^{2^n - 2^{n-2} - 2} for m = 2
            let e = (1u32 << n) - (1u32 << (n - 2)) - 2;
            assert_eq!(s_group_order(2, n, 2).unwrap(), BigUint::from(2u32).pow(e));
        }
    }

    #[test]
    fn stabilizer_order_is_product_of_forest_groups() {
        for d in 2..=4 {
            for n in 0..=5 {
                let prod = (1..=n).fold(BigUint::one(), |acc, i| {
                    acc * num_traits::pow(factorial(d), d.pow((n - i) as u32)) / BigUint::from(d)
                });
                assert_eq!(stab_branch_order(d, n), prod);
                for m in 1..=n {
                    let s = (1..=m).fold(BigUint::one(), |acc, i| {
                        acc * num_traits::pow(factorial(d), d.pow((n - i) as u32))
                            / BigUint::from(d)
                    });
                    assert_eq!(s_group_order(d, n, m).unwrap(), s.clone());
                    assert_eq!(stab_s_index(d, n, m).unwrap() * s, stab_branch_order(d, n));
                }
            }
        }
    }

    #[test]
    fn full_period_gives_whole_stabilizer() {
        for n in 1..=8 {
            assert_eq!(s_group_order(2, n, n).unwrap(), stab_branch_order(2, n));
            assert_eq!(stab_s_index(3, n, n).unwrap(), big(1));
        }
    }

    #[test]
    fn index_grows_without_bound() {
        for m in 1..=3 {
            let mut prev = stab_s_index(2, m + 1, m).unwrap();
            for n in m + 2..=14 {
                let next = stab_s_index(2, n, m).unwrap();
                assert!(next > prev);
                prev = next;
            }
        }
    }

    #[test]
    fn builders_match_formulas_and_brute_force() {
        for (d, n, m) in [(2, 3, 1), (2, 3, 2), (2, 3, 3), (2, 2, 2), (2, 2, 1), (3, 2, 1), (3, 2, 2)]
        {
            let spec = BranchSpec::zeros(shape(d, n), m).unwrap();
            let stab = build_branch_stabilizer(&spec, DEFAULT_ENUMERATION_LIMIT).unwrap();
            let sg = build_s_subgroup(&spec, DEFAULT_ENUMERATION_LIMIT).unwrap();
            assert_eq!(BigUint::from(stab.order().unwrap()), stab_branch_order(d, n));
            assert_eq!(BigUint::from(sg.order().unwrap()), s_group_order(d, n, m).unwrap());
            let mut bs = brute_stab(&spec);
            bs.sort();
            assert_eq!(stab.elements().unwrap(), bs.as_slice());
            let mut bsg = brute_s(&spec);
            bsg.sort();
            assert_eq!(sg.elements().unwrap(), bsg.as_slice(), "d={d} n={n} m={m}");
            assert!(sg.is_valid_subgroup().unwrap());
            assert!(stab.is_valid_subgroup().unwrap());
        }
    }

    #[test]
    fn builders_accept_other_periodic_branches() {
        let s = shape(2, 4);
        let spec = BranchSpec::periodic(s, vec![1, 0]).unwrap();
        let sg = build_s_subgroup(&spec, DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert_eq!(BigUint::from(sg.order().unwrap()), s_group_order(2, 4, 2).unwrap());
        assert!(sg.is_valid_subgroup().unwrap());
        let nodes: Vec<_> = (0..=4).map(|j| spec.node(j)).collect();
        assert_eq!(BranchSpec::from_nodes(s, &nodes, 2).unwrap(), spec);
        assert!(BranchSpec::from_nodes(s, &nodes, 1).is_err());
    }

    #[test]
    fn hausdorff_limits() {
        assert_eq!(hausdorff_closed_form(2, 1), rat(1, 2));
        assert_eq!(hausdorff_closed_form(2, 2), rat(3, 4));
        assert_eq!(hausdorff_closed_form(3, 1), rat(2, 3));
    }

    #[test]
    fn exact_hausdorff_error_formula() {
        // For d = 2: ratio - (1 - 2^{-m}) = (L(n+1) - m) / (2^n - 1 - n).
        for m in 1..=3usize {
            let est = hausdorff_estimate(2, m, m.max(2)..=40).unwrap();
            let l = hausdorff_closed_form(2, m);
            for (n, r) in &est.ratios {
                let r = r.as_exact().unwrap();
                let num = &l * BigRational::from_integer(BigInt::from(n + 1))
                    - BigRational::from_integer(BigInt::from(m));
                let den = BigRational::from_integer(
                    (BigInt::one() << *n) - BigInt::one() - BigInt::from(*n),
                );
                assert_eq!(r - &l, num / den);
            }
        }
    }

    #[test]
    fn hausdorff_ratios_approach_limit() {
        let est = hausdorff_estimate(2, 1, 2..=60).unwrap();
        let limit = est.limit.clone().unwrap();
        let errs: Vec<BigRational> = est
            .ratios
            .iter()
            .map(|(_, r)| (r.as_exact().unwrap() - &limit).abs())
            .collect();
        assert!(errs.windows(2).skip(3).all(|w| w[1] < w[0]));
        assert!(errs.last().unwrap() < &rat(1, 1 << 40));
    }

    #[test]
    fn non_parallel_orders_are_approximate() {
        let est = hausdorff_estimate(3, 1, 2..=12).unwrap();
        assert!(matches!(est.ratios[0].1, LogRatio::Approximate(_)));
        let last = est.ratios.last().unwrap().1.to_f64();
        assert!((last - 2.0 / 3.0).abs() < 1e-4);
    }

    #[test]
    fn order_exponents_round_trip_small_values() {
        for d in 2..=5 {
            for n in 0..=3 {
                assert_eq!(aut_order_exponents(d, n).value(), aut_order(&shape(d, n)));
            }
        }
    }

    proptest! {
        #[test]
        fn s_divides_stab(d in 2usize..5, n in 1usize..7, m in 1usize..7) {
            prop_assume!(m <= n);
            let stab = stab_branch_order(d, n);
            let s = s_group_order(d, n, m).unwrap();
            prop_assert!((&stab % &s).is_zero());
            prop_assert_eq!(stab / s, stab_s_index(d, n, m).unwrap());
        }

        #[test]
        fn generated_subgroups_are_subgroups(i in 0usize..128, j in 0usize..128) {
            let s = shape(2, 3);
            let all = enumerate_aut(s, 1000).unwrap();
            let h = close_under_group_ops(s, vec![all[i].clone(), all[j].clone()], 1000).unwrap();
            prop_assert!(h.is_valid_subgroup().unwrap());
            let c = centralizer(&h, 1000).unwrap();
            prop_assert!(c.is_valid_subgroup().unwrap());
        }
    }
}
