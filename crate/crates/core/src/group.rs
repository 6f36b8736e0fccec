//! Finite abelian groups presented as products of cyclic groups.
//!
//! A group `Z_{n_1} x ... x Z_{n_k}` is identified with its own dual: the
//! character attached to `γ` is `g ↦ exp(2πi Σ_j g_j γ_j / n_j)`. Elements are
//! enumerated lexicographically in their residue vectors (last factor fastest),
//! and every vector over the group is indexed in that order.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::unit_root;

/// Largest group order accepted by [`GroupSpec::new`].
pub const MAX_ORDER: usize = 1 << 22;

#[derive(Clone)]
pub struct GroupSpec {
    inner: Arc<Tables>,
}

struct Tables {
    factors: Vec<usize>,
    order: usize,
    strides: Vec<usize>,
    /// lcm of the factors; every character value is a power of `exp(2πi / lcm)`.
    exponent: u64,
    /// `exponent / n_j`, the weight that puts factor `j` over the common denominator.
    weights: Vec<u64>,
    roots: Vec<Complex64>,
    /// Row-major `order x rank` table of residues.
    residues: Vec<u32>,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl GroupSpec {
    pub fn new(factors: &[i64]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidSpec("at least one cyclic factor is required".into()));
        }
        let mut order: usize = 1;
        let mut parsed = Vec::with_capacity(factors.len());
        for &f in factors {
            if f < 1 {
                return Err(Error::InvalidSpec(format!("cyclic factor {f} is not positive")));
            }
            let f = f as usize;
            order = order
                .checked_mul(f)
                .filter(|&o| o <= MAX_ORDER)
                .ok_or_else(|| Error::InvalidSpec(format!("group order exceeds {MAX_ORDER}")))?;
            parsed.push(f);
        }

        let rank = parsed.len();
        let mut strides = vec![1usize; rank];
        for j in (0..rank.saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * parsed[j + 1];
        }

        let exponent = parsed
            .iter()
            .fold(1u64, |acc, &n| acc / gcd(acc, n as u64) * n as u64);
        let weights = parsed.iter().map(|&n| exponent / n as u64).collect();
        let roots = (0..exponent).map(|k| unit_root(k, exponent)).collect();

        let mut residues = Vec::with_capacity(order * rank);
        for idx in 0..order {
            for j in 0..rank {
                residues.push(((idx / strides[j]) % parsed[j]) as u32);
            }
        }

        Ok(Self {
            inner: Arc::new(Tables {
                factors: parsed,
                order,
                strides,
                exponent,
                weights,
                roots,
                residues,
            }),
        })
    }

    pub fn factors(&self) -> &[usize] {
        &self.inner.factors
    }

    pub fn order(&self) -> usize {
        self.inner.order
    }

    pub fn rank(&self) -> usize {
        self.inner.factors.len()
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    /// Builds an element from residues, rejecting out-of-range coordinates.
    pub fn element(&self, residues: &[i64]) -> Result<GroupElement> {
        self.check_len(residues.len())?;
        let mut out = Vec::with_capacity(residues.len());
        for (&r, &n) in residues.iter().zip(self.factors()) {
            if r < 0 || r as usize >= n {
                return Err(Error::InvalidElement(format!(
                    "residue {r} is outside [0, {n})"
                )));
            }
            out.push(r as usize);
        }
        Ok(GroupElement(out))
    }

    /// Builds an element from arbitrary integers by reducing each coordinate.
    pub fn reduce(&self, residues: &[i64]) -> Result<GroupElement> {
        self.check_len(residues.len())?;
        Ok(GroupElement(
            residues
                .iter()
                .zip(self.factors())
                .map(|(&r, &n)| r.rem_euclid(n as i64) as usize)
                .collect(),
        ))
    }

    pub fn element_at(&self, index: usize) -> GroupElement {
        assert!(index < self.order(), "element index {index} out of range");
        GroupElement(self.residues_at(index).iter().map(|&r| r as usize).collect())
    }

    pub fn index_of(&self, g: &GroupElement) -> Result<usize> {
        self.validate(g)?;
        Ok(g.0.iter().zip(&self.inner.strides).map(|(r, s)| r * s).sum())
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order()).map(|i| self.element_at(i))
    }

    pub fn add(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.validate(g)?;
        self.validate(h)?;
        Ok(GroupElement(
            g.0.iter()
                .zip(&h.0)
                .zip(self.factors())
                .map(|((a, b), n)| (a + b) % n)
                .collect(),
        ))
    }

    pub fn neg(&self, g: &GroupElement) -> Result<GroupElement> {
        self.validate(g)?;
        Ok(GroupElement(
            g.0.iter()
                .zip(self.factors())
                .map(|(a, n)| (n - a) % n)
                .collect(),
        ))
    }

    pub fn sub(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.add(g, &self.neg(h)?)
    }

    /// The character value `(g, γ) = exp(2πi Σ_j g_j γ_j / n_j)`.
    pub fn pairing(&self, g: &GroupElement, gamma: &GroupElement) -> Result<Complex64> {
        Ok(self.pairing_idx(self.index_of(g)?, self.index_of(gamma)?))
    }

    pub(crate) fn residues_at(&self, index: usize) -> &[u32] {
        let k = self.rank();
        &self.inner.residues[index * k..(index + 1) * k]
    }

    pub(crate) fn add_idx(&self, a: usize, b: usize) -> usize {
        let (ra, rb) = (self.residues_at(a), self.residues_at(b));
        let t = &self.inner;
        (0..self.rank())
            .map(|j| ((ra[j] + rb[j]) as usize % t.factors[j]) * t.strides[j])
            .sum()
    }

    pub(crate) fn neg_idx(&self, a: usize) -> usize {
        let ra = self.residues_at(a);
        let t = &self.inner;
        (0..self.rank())
            .map(|j| ((t.factors[j] - ra[j] as usize) % t.factors[j]) * t.strides[j])
            .sum()
    }

    pub(crate) fn sub_idx(&self, a: usize, b: usize) -> usize {
        self.add_idx(a, self.neg_idx(b))
    }

    /// Exponent `e` with `(g, γ) = exp(2πi e / lcm)`.
    #[inline]
    pub(crate) fn phase_idx(&self, g: usize, gamma: usize) -> usize {
        let (rg, rh) = (self.residues_at(g), self.residues_at(gamma));
        let t = &self.inner;
        let mut e = 0u64;
        for j in 0..rg.len() {
            e += (rg[j] as u64 * rh[j] as u64 % t.factors[j] as u64) * t.weights[j];
        }
        (e % t.exponent) as usize
    }

    #[inline]
    pub(crate) fn pairing_idx(&self, g: usize, gamma: usize) -> Complex64 {
        self.inner.roots[self.phase_idx(g, gamma)]
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.rank() {
            return Err(Error::InvalidElement(format!(
                "expected {} residues, got {len}",
                self.rank()
            )));
        }
        Ok(())
    }

    pub fn validate(&self, g: &GroupElement) -> Result<()> {
        self.check_len(g.0.len())?;
        for (&r, &n) in g.0.iter().zip(self.factors()) {
            if r >= n {
                return Err(Error::InvalidElement(format!("residue {r} is outside [0, {n})")));
            }
        }
        Ok(())
    }
}

impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.factors() == other.factors()
    }
}

impl Eq for GroupSpec {}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupSpec")
            .field("factors", &self.factors())
            .field("order", &self.order())
            .finish()
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors().iter().map(|n| format!("Z{n}")).collect();
        f.write_str(&parts.join("x"))
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.factors().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let factors = Vec::<i64>::deserialize(deserializer)?;
        GroupSpec::new(&factors).map_err(serde::de::Error::custom)
    }
}

/// A residue vector; comparison order is the group's enumeration order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(Vec<usize>);

impl GroupElement {
    pub fn residues(&self) -> &[usize] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&r| r == 0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            let parts: Vec<String> = self.0.iter().map(|r| r.to_string()).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}

/// A nonempty set of distinct points `K = {t_1, ..., t_n}`, sorted in
/// enumeration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    points: Vec<GroupElement>,
    indices: Vec<usize>,
}

impl PointSet {
    pub fn new(spec: &GroupSpec, points: Vec<GroupElement>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidPointSet("point set must be nonempty".into()));
        }
        let mut pairs = points
            .into_iter()
            .map(|p| spec.index_of(&p).map(|i| (i, p)))
            .collect::<Result<Vec<_>>>()?;
        pairs.sort_by_key(|(i, _)| *i);
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidPointSet(format!("duplicate point {}", w[0].1)));
        }
        let (indices, points) = pairs.into_iter().unzip();
        Ok(Self { points, indices })
    }

    pub fn from_residues(spec: &GroupSpec, residues: &[Vec<i64>]) -> Result<Self> {
        let points = residues
            .iter()
            .map(|r| spec.element(r))
            .collect::<Result<Vec<_>>>()?;
        Self::new(spec, points)
    }

    pub fn from_indices(spec: &GroupSpec, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= spec.order()) {
            return Err(Error::InvalidElement(format!("element index {bad} out of range")));
        }
        Self::new(spec, indices.iter().map(|&i| spec.element_at(i)).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[GroupElement] {
        &self.points
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }
}

/// A subset of a group stored as a membership mask over enumeration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementSet {
    mask: Vec<bool>,
}

impl ElementSet {
    pub fn empty(spec: &GroupSpec) -> Self {
        Self { mask: vec![false; spec.order()] }
    }

    pub fn from_elements<'a>(
        spec: &GroupSpec,
        elements: impl IntoIterator<Item = &'a GroupElement>,
    ) -> Result<Self> {
        let mut set = Self::empty(spec);
        for g in elements {
            set.mask[spec.index_of(g)?] = true;
        }
        Ok(set)
    }

    pub(crate) fn insert_idx(&mut self, i: usize) {
        self.mask[i] = true;
    }

    pub fn contains_idx(&self, i: usize) -> bool {
        self.mask.get(i).copied().unwrap_or(false)
    }

    pub fn contains(&self, spec: &GroupSpec, g: &GroupElement) -> bool {
        spec.index_of(g).map(|i| self.contains_idx(i)).unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn elements(&self, spec: &GroupSpec) -> Vec<GroupElement> {
        self.indices().map(|i| spec.element_at(i)).collect()
    }

    pub fn universe(&self) -> usize {
        self.mask.len()
    }
}

/// `(K - K) \ {0}`.
pub fn difference_set(spec: &GroupSpec, points: &PointSet) -> ElementSet {
    let mut set = ElementSet::empty(spec);
    for &p in points.indices() {
        for &q in points.indices() {
            if p != q {
                set.insert_idx(spec.sub_idx(p, q));
            }
        }
    }
    set
}
