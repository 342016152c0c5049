//! Complete rooted d-ary trees of finite height and their automorphisms.
//!
//! An automorphism is stored as a *portrait*: one permutation of the child
//! slots `0..d` at every internal node. Internal nodes are kept in canonical
//! order (by length, then lexicographically), so node `v` at level `l` with
//! base-`d` value `x` sits at index `(d^l - 1)/(d - 1) + x`.
//!
//! The portrait is keyed by the source node: the image of the address
//! `x1 x2 ... xk` is `s_root(x1) s_{x1}(x2) s_{x1 x2}(x3) ...`.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};

/// Default cap on the number of elements any enumeration may produce.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 1_000_000;

/// Arity and height of a complete rooted tree `T_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeShape {
    arity: usize,
    height: usize,
}

impl TreeShape {
    pub fn new(arity: usize, height: usize) -> Result<Self> {
        if !(2..=u8::MAX as usize).contains(&arity) {
            return Err(Error::InvalidShape { arity, height });
        }
        // The number of internal nodes must fit in a usize.
        let mut total: usize = 0;
        let mut level: usize = 1;
        for _ in 0..height {
            total = total
                .checked_add(level)
                .ok_or(Error::InvalidShape { arity, height })?;
            level = level.saturating_mul(arity);
        }
        Ok(TreeShape { arity, height })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of vertices on level `i`, that is `d^i`.
    pub fn level_size(&self, level: usize) -> usize {
        self.arity.pow(level as u32)
    }

    /// Index of the first node of `level` in canonical order.
    pub fn level_offset(&self, level: usize) -> usize {
        (self.level_size(level) - 1) / (self.arity - 1)
    }

    /// Number of internal nodes, `(d^n - 1)/(d - 1)`.
    pub fn internal_count(&self) -> usize {
        self.level_offset(self.height)
    }

    /// The shape of the truncation `T_i`.
    pub fn truncated(&self, height: usize) -> Result<TreeShape> {
        if height > self.height {
            return Err(Error::OutOfRange {
                what: "level",
                value: height as i128,
                range: format!("[0, {}]", self.height),
            });
        }
        Ok(TreeShape {
            arity: self.arity,
            height,
        })
    }

    /// All addresses on `level`, in lexicographic order.
    pub fn level_addresses(&self, level: usize) -> Vec<NodeAddress> {
        (0..self.level_size(level))
            .map(|value| NodeAddress::from_level_value(self.arity, level, value))
            .collect()
    }

    fn check_same(&self, other: &TreeShape) -> Result<()> {
        if self != other {
            return Err(Error::ShapeMismatch {
                left: self.to_string(),
                right: other.to_string(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for TreeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T(d={}, n={})", self.arity, self.height)
    }
}

/// A vertex of a d-ary tree, written as the path of child digits from the
/// root. The empty path is the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct NodeAddress {
    digits: Vec<u8>,
}

impl NodeAddress {
    pub fn root() -> Self {
        NodeAddress { digits: Vec::new() }
    }

    /// Builds an address and checks it against `shape`.
    pub fn new(shape: &TreeShape, digits: Vec<u8>) -> Result<Self> {
        let address = NodeAddress { digits };
        address.validate(shape)?;
        Ok(address)
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_root(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn parent(&self) -> Option<NodeAddress> {
        if self.is_root() {
            return None;
        }
        Some(NodeAddress {
            digits: self.digits[..self.digits.len() - 1].to_vec(),
        })
    }

    pub fn child(&self, digit: u8) -> NodeAddress {
        let mut digits = self.digits.clone();
        digits.push(digit);
        NodeAddress { digits }
    }

    /// Concatenation `self · suffix`.
    pub fn join(&self, suffix: &NodeAddress) -> NodeAddress {
        let mut digits = self.digits.clone();
        digits.extend_from_slice(&suffix.digits);
        NodeAddress { digits }
    }

    pub fn starts_with(&self, prefix: &NodeAddress) -> bool {
        self.digits.starts_with(&prefix.digits)
    }

    pub fn validate(&self, shape: &TreeShape) -> Result<()> {
        if self.len() > shape.height() {
            return Err(Error::InvalidAddress(format!(
                "{} is deeper than {}",
                self.display(shape.arity()),
                shape
            )));
        }
        if self.digits.iter().any(|&c| c as usize >= shape.arity()) {
            return Err(Error::InvalidAddress(format!(
                "{} has a digit >= {}",
                self.display(shape.arity()),
                shape.arity()
            )));
        }
        Ok(())
    }

    /// Base-`d` value of the digit string (most significant digit first).
    pub fn level_value(&self, arity: usize) -> usize {
        self.digits
            .iter()
            .fold(0, |acc, &c| acc * arity + c as usize)
    }

    pub fn from_level_value(arity: usize, level: usize, mut value: usize) -> Self {
        let mut digits = vec![0u8; level];
        for slot in digits.iter_mut().rev() {
            *slot = (value % arity) as u8;
            value /= arity;
        }
        NodeAddress { digits }
    }

    /// Canonical (length-then-lexicographic) index of this node.
    pub fn canonical_index(&self, shape: &TreeShape) -> usize {
        shape.level_offset(self.len()) + self.level_value(shape.arity())
    }

    /// Text form used by the portrait format; the root prints as `ε`.
    pub fn display(&self, arity: usize) -> String {
        if self.is_root() {
            return "ε".to_string();
        }
        let sep = if arity <= 10 { "" } else { "," };
        self.digits.iter().join(sep)
    }

    fn parse(text: &str, arity: usize) -> Result<Self> {
        let text = text.trim();
        if text == "ε" || text == "e" {
            return Ok(NodeAddress::root());
        }
        Ok(NodeAddress {
            digits: parse_digit_list(text, arity)?,
        })
    }
}

fn parse_digit_list(text: &str, arity: usize) -> Result<Vec<u8>> {
    let parts: Vec<&str> = if text.contains(',') {
        text.split(',').map(str::trim).collect()
    } else {
        text.split("").filter(|s| !s.is_empty()).collect()
    };
    parts
        .into_iter()
        .map(|p| {
            let v: usize = p
                .parse()
                .map_err(|_| Error::Parse(format!("bad digit {p:?} in {text:?}")))?;
            if v >= arity {
                return Err(Error::Parse(format!("digit {v} >= arity {arity}")));
            }
            Ok(v as u8)
        })
        .collect()
}

/// A permutation of `0..d`, stored as its image sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<u8>);

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation((0..degree as u8).collect())
    }

    pub fn from_images(images: Vec<u8>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            let i = i as usize;
            if i >= images.len() || seen[i] {
                return Err(Error::InvalidPermutation(format!("{images:?}")));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    /// Cycle `0 -> 1 -> ... -> d-1 -> 0`.
    pub fn rotation(degree: usize) -> Self {
        Permutation((0..degree).map(|i| ((i + 1) % degree) as u8).collect())
    }

    /// Transposition of `a` and `b`.
    pub fn transposition(degree: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<u8> = (0..degree as u8).collect();
        images.swap(a, b);
        Permutation(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u8] {
        &self.0
    }

    pub fn apply(&self, point: usize) -> usize {
        self.0[point] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v as usize)
    }

    /// `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize] = i as u8;
        }
        Permutation(inv)
    }

    /// All `d!` permutations in lexicographic order of their image sequences.
    pub fn all(degree: usize) -> Vec<Permutation> {
        (0..degree as u8)
            .permutations(degree)
            .map(Permutation)
            .collect()
    }

    fn display(&self) -> String {
        let sep = if self.degree() <= 10 { "" } else { "," };
        self.0.iter().join(sep)
    }
}

/// One element of `Aut(T_n)` in portrait form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeAutomorphism {
    shape: TreeShape,
    // Flat image table: node `i` owns `labels[i*d .. (i+1)*d]`.
    labels: Vec<u8>,
}

impl TreeAutomorphism {
    pub fn identity(shape: TreeShape) -> Self {
        let d = shape.arity();
        let labels = (0..shape.internal_count())
            .flat_map(|_| 0..d as u8)
            .collect();
        TreeAutomorphism { shape, labels }
    }

    /// Builds an automorphism from one permutation per internal node, given in
    /// canonical order.
    pub fn from_labels(shape: TreeShape, labels: &[Permutation]) -> Result<Self> {
        if labels.len() != shape.internal_count() {
            return Err(Error::InvalidPermutation(format!(
                "expected {} labels for {}, got {}",
                shape.internal_count(),
                shape,
                labels.len()
            )));
        }
        let mut flat = Vec::with_capacity(labels.len() * shape.arity());
        for p in labels {
            if p.degree() != shape.arity() {
                return Err(Error::InvalidPermutation(format!(
                    "label of degree {} on a {}-ary tree",
                    p.degree(),
                    shape.arity()
                )));
            }
            flat.extend_from_slice(p.images());
        }
        Ok(TreeAutomorphism {
            shape,
            labels: flat,
        })
    }

    /// Builds an automorphism from `(address, permutation)` pairs; unlisted
    /// internal nodes get the identity label.
    pub fn from_node_labels<I>(shape: TreeShape, labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeAddress, Permutation)>,
    {
        let mut a = TreeAutomorphism::identity(shape);
        for (address, perm) in labels {
            address.validate(&shape)?;
            if address.len() >= shape.height() {
                return Err(Error::InvalidAddress(format!(
                    "{} is a leaf of {}",
                    address.display(shape.arity()),
                    shape
                )));
            }
            if perm.degree() != shape.arity() {
                return Err(Error::InvalidPermutation(format!("{perm:?}")));
            }
            let idx = address.canonical_index(&shape);
            a.set_label(idx, perm.images());
        }
        Ok(a)
    }

    /// The root swap (or root rotation for d > 2) with identity sections.
    pub fn root_rotation(shape: TreeShape) -> Result<Self> {
        if shape.height() == 0 {
            return Err(Error::OutOfRange {
                what: "height",
                value: 0,
                range: "[1, ∞)".into(),
            });
        }
        TreeAutomorphism::from_node_labels(
            shape,
            [(NodeAddress::root(), Permutation::rotation(shape.arity()))],
        )
    }

    pub fn shape(&self) -> TreeShape {
        self.shape
    }

    /// Permutation at the internal node with canonical index `index`.
    pub fn label_at(&self, index: usize) -> &[u8] {
        let d = self.shape.arity();
        &self.labels[index * d..(index + 1) * d]
    }

    pub fn label(&self, node: &NodeAddress) -> Result<Permutation> {
        node.validate(&self.shape)?;
        if node.len() >= self.shape.height() {
            return Err(Error::InvalidAddress(format!(
                "{} is a leaf",
                node.display(self.shape.arity())
            )));
        }
        Ok(Permutation(
            self.label_at(node.canonical_index(&self.shape)).to_vec(),
        ))
    }

    fn set_label(&mut self, index: usize, images: &[u8]) {
        let d = self.shape.arity();
        self.labels[index * d..(index + 1) * d].copy_from_slice(images);
    }

    pub fn is_identity(&self) -> bool {
        let d = self.shape.arity();
        self.labels
            .chunks(d)
            .all(|c| c.iter().enumerate().all(|(i, &v)| i == v as usize))
    }

    /// Image of the vertex with base-`d` value `value` on `level`.
    pub fn apply_level(&self, level: usize, value: usize) -> usize {
        let d = self.shape.arity();
        let mut src = 0usize;
        let mut dst = 0usize;
        for l in 0..level {
            let digit = (value / d.pow((level - l - 1) as u32)) % d;
            let label = self.label_at(self.shape.level_offset(l) + src);
            dst = dst * d + label[digit] as usize;
            src = src * d + digit;
        }
        dst
    }

    pub fn apply(&self, v: &NodeAddress) -> Result<NodeAddress> {
        v.validate(&self.shape)?;
        let image = self.apply_level(v.len(), v.level_value(self.shape.arity()));
        Ok(NodeAddress::from_level_value(
            self.shape.arity(),
            v.len(),
            image,
        ))
    }

    /// Images of all internal nodes, as canonical indices.
    fn internal_images(&self) -> Vec<usize> {
        let d = self.shape.arity();
        let mut value_images = vec![0usize; self.shape.internal_count()];
        for level in 1..self.shape.height() {
            let parent_offset = self.shape.level_offset(level - 1);
            let offset = self.shape.level_offset(level);
            for x in 0..self.shape.level_size(level) {
                let parent = x / d;
                let digit = x % d;
                let label = self.label_at(parent_offset + parent);
                value_images[offset + x] =
                    value_images[parent_offset + parent] * d + label[digit] as usize;
            }
        }
        (0..self.shape.height())
            .flat_map(|level| {
                let offset = self.shape.level_offset(level);
                let vi = &value_images;
                (0..self.shape.level_size(level)).map(move |x| offset + vi[offset + x])
            })
            .collect()
    }

    /// `self ∘ other` (`other` acts first).
    pub fn compose(&self, other: &TreeAutomorphism) -> Result<TreeAutomorphism> {
        self.shape.check_same(&other.shape)?;
        let d = self.shape.arity();
        let other_images = other.internal_images();
        let mut labels = Vec::with_capacity(self.labels.len());
        for (u, &bu) in other_images.iter().enumerate() {
            let outer = self.label_at(bu);
            labels.extend(other.label_at(u).iter().map(|&c| outer[c as usize]));
        }
        debug_assert_eq!(labels.len(), self.shape.internal_count() * d);
        Ok(TreeAutomorphism {
            shape: self.shape,
            labels,
        })
    }

    pub fn invert(&self) -> TreeAutomorphism {
        let d = self.shape.arity();
        let mut labels = vec![0u8; self.labels.len()];
        for (u, &w) in self.internal_images().iter().enumerate() {
            for (i, &v) in self.label_at(u).iter().enumerate() {
                labels[w * d + v as usize] = i as u8;
            }
        }
        TreeAutomorphism {
            shape: self.shape,
            labels,
        }
    }

    pub fn pow(&self, exponent: usize) -> TreeAutomorphism {
        let mut acc = TreeAutomorphism::identity(self.shape);
        for _ in 0..exponent {
            acc = self.compose(&acc).expect("same shape");
        }
        acc
    }

    /// The induced action on `T_i`.
    pub fn restrict(&self, level: usize) -> Result<TreeAutomorphism> {
        let shape = self.shape.truncated(level)?;
        let n = shape.internal_count() * shape.arity();
        Ok(TreeAutomorphism {
            shape,
            labels: self.labels[..n].to_vec(),
        })
    }

    /// Action on the subtree rooted at `v`, re-rooted as an automorphism of
    /// `T_{n-|v|}`. Requires that `v` is fixed.
    pub fn subtree_section(&self, v: &NodeAddress) -> Result<TreeAutomorphism> {
        if &self.apply(v)? != v {
            return Err(Error::NodeNotFixed(v.display(self.shape.arity())));
        }
        let d = self.shape.arity();
        let sub = TreeShape::new(d, self.shape.height() - v.len())?;
        let base = v.level_value(d);
        let mut labels = Vec::with_capacity(sub.internal_count() * d);
        for level in 0..sub.height() {
            for w in 0..sub.level_size(level) {
                let value = base * sub.level_size(level) + w;
                let idx = self.shape.level_offset(v.len() + level) + value;
                labels.extend_from_slice(self.label_at(idx));
            }
        }
        Ok(TreeAutomorphism { shape: sub, labels })
    }

    /// Portrait text: one `address:permutation` line per internal node in
    /// canonical order.
    pub fn to_portrait_text(&self) -> String {
        let d = self.shape.arity();
        let mut out = String::new();
        for level in 0..self.shape.height() {
            for x in 0..self.shape.level_size(level) {
                let addr = NodeAddress::from_level_value(d, level, x);
                let idx = self.shape.level_offset(level) + x;
                out.push_str(&addr.display(d));
                out.push(':');
                out.push_str(&Permutation(self.label_at(idx).to_vec()).display());
                out.push('\n');
            }
        }
        out
    }

    /// Parses the portrait text format. Arity is read off the permutation
    /// length and height off the deepest listed node; every internal node
    /// must be listed exactly once.
    pub fn from_portrait_text(text: &str) -> Result<TreeAutomorphism> {
        let lines: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        let Some(first) = lines.first() else {
            return Err(Error::Parse("empty portrait".into()));
        };
        let (_, first_perm) = first
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing ':' in {first:?}")))?;
        let arity = if first_perm.contains(',') {
            first_perm.split(',').count()
        } else {
            first_perm.trim().chars().count()
        };
        let mut entries = Vec::with_capacity(lines.len());
        for line in &lines {
            let (addr, perm) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("missing ':' in {line:?}")))?;
            let address = NodeAddress::parse(addr, arity)?;
            let perm = Permutation::from_images(parse_digit_list(perm.trim(), arity)?)?;
            if perm.degree() != arity {
                return Err(Error::Parse(format!("inconsistent arity in {line:?}")));
            }
            entries.push((address, perm));
        }
        let height = entries.iter().map(|(a, _)| a.len()).max().unwrap_or(0) + 1;
        let shape = TreeShape::new(arity, height)?;
        if entries.len() != shape.internal_count() {
            return Err(Error::Parse(format!(
                "{} lines for {}, expected {}",
                entries.len(),
                shape,
                shape.internal_count()
            )));
        }
        let mut seen = vec![false; shape.internal_count()];
        for (a, _) in &entries {
            let idx = a.canonical_index(&shape);
            if std::mem::replace(&mut seen[idx], true) {
                return Err(Error::Parse(format!(
                    "node {} listed twice",
                    a.display(arity)
                )));
            }
        }
        TreeAutomorphism::from_node_labels(shape, entries)
    }
}

impl fmt::Display for TreeAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_portrait_text())
    }
}

impl FromStr for TreeAutomorphism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TreeAutomorphism::from_portrait_text(s)
    }
}

/// `|Aut(T_n)| = (d!)^((d^n - 1)/(d - 1))`.
pub fn aut_order(shape: &TreeShape) -> BigUint {
    num_traits::pow(factorial(shape.arity()), shape.internal_count())
}

pub(crate) fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// How the label at one internal node is chosen during enumeration.
#[derive(Debug, Clone)]
pub(crate) enum NodeRule {
    /// Any of the listed permutations.
    Free(Vec<Permutation>),
    /// Same label as the node with this (smaller) canonical index.
    Copy(usize),
}

/// Enumerates all portraits allowed by `rules`, one rule per internal node in
/// canonical order. Free nodes vary like an odometer, last node fastest.
pub(crate) fn enumerate_portraits(
    shape: TreeShape,
    rules: &[NodeRule],
    limit: usize,
    what: &str,
) -> Result<Vec<TreeAutomorphism>> {
    debug_assert_eq!(rules.len(), shape.internal_count());
    let free: Vec<(usize, &[Permutation])> = rules
        .iter()
        .enumerate()
        .filter_map(|(i, r)| match r {
            NodeRule::Free(c) => Some((i, c.as_slice())),
            NodeRule::Copy(_) => None,
        })
        .collect();
    let total = free
        .iter()
        .fold(BigUint::one(), |acc, (_, c)| acc * BigUint::from(c.len()));
    let count = match total.to_usize() {
        Some(c) if c <= limit => c,
        _ => {
            return Err(Error::TooLarge {
                what: what.to_string(),
                size: total.to_string(),
                limit,
            })
        }
    };
    let d = shape.arity();
    let mut out = Vec::with_capacity(count);
    let mut counters = vec![0usize; free.len()];
    let mut labels = vec![0u8; rules.len() * d];
    for &(i, c) in &free {
        labels[i * d..(i + 1) * d].copy_from_slice(c[0].images());
    }
    for _ in 0..count {
        for (i, rule) in rules.iter().enumerate() {
            if let NodeRule::Copy(src) = *rule {
                debug_assert!(src < i);
                labels.copy_within(src * d..(src + 1) * d, i * d);
            }
        }
        out.push(TreeAutomorphism {
            shape,
            labels: labels.clone(),
        });
        for (slot, &(i, c)) in free.iter().enumerate().rev() {
            counters[slot] += 1;
            if counters[slot] < c.len() {
                labels[i * d..(i + 1) * d].copy_from_slice(c[counters[slot]].images());
                break;
            }
            counters[slot] = 0;
            labels[i * d..(i + 1) * d].copy_from_slice(c[0].images());
        }
    }
    Ok(out)
}

/// Every element of `Aut(T_n)`, provided the group order is at most `limit`.
pub fn enumerate_aut(shape: TreeShape, limit: usize) -> Result<Vec<TreeAutomorphism>> {
    let all = Permutation::all(shape.arity());
    let rules = vec![NodeRule::Free(all); shape.internal_count()];
    enumerate_portraits(shape, &rules, limit, &format!("Aut({shape})"))
}
