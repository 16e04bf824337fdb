//! Finite state spaces, subsets and exact subprobability distributions.
//!
//! On a finite carrier every subset is measurable, so state sets are plain
//! bitmasks keyed by the fixed state order of the owning [`StateSpace`].

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::num::Rational;
use crate::{Error, Result};

/// Hard cap on the number of states; state sets are 64-bit masks.
pub const MAX_STATES: usize = 64;

#[derive(Clone, PartialEq, Eq)]
pub struct StateSpace {
    inner: Arc<SpaceInner>,
}

#[derive(PartialEq, Eq)]
struct SpaceInner {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl StateSpace {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::Model("state space must be nonempty".into()));
        }
        if names.len() > MAX_STATES {
            return Err(Error::TooLarge {
                what: "state space",
                limit: MAX_STATES,
                found: names.len(),
            });
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::Model(format!("duplicate state name `{name}`")));
            }
        }
        Ok(Self {
            inner: Arc::new(SpaceInner { names, index }),
        })
    }

    /// Space with states named `s0`, `s1`, ...
    pub fn numbered(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| format!("s{i}")))
    }

    pub fn len(&self) -> usize {
        self.inner.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn names(&self) -> &[String] {
        &self.inner.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.inner.names[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.inner
            .index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn empty_set(&self) -> StateSet {
        StateSet::empty(self.len())
    }

    pub fn full_set(&self) -> StateSet {
        StateSet::full(self.len())
    }

    pub fn set_from_names<I, S>(&self, names: I) -> Result<StateSet>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set = self.empty_set();
        for name in names {
            set.insert(self.index_of(name.as_ref())?);
        }
        Ok(set)
    }

    /// Member names in state order.
    pub fn set_names(&self, set: &StateSet) -> Vec<String> {
        set.iter().map(|i| self.name(i).to_string()).collect()
    }

    pub fn dirac(&self, name: &str) -> Result<Dist> {
        Ok(Dist::dirac(self.len(), self.index_of(name)?))
    }
}

impl fmt::Debug for StateSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

/// A subset of a finite state space.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet {
    len: u8,
    bits: u64,
}

impl StateSet {
    pub fn empty(len: usize) -> Self {
        assert!(len <= MAX_STATES);
        Self { len: len as u8, bits: 0 }
    }

    pub fn full(len: usize) -> Self {
        assert!(len <= MAX_STATES);
        Self {
            len: len as u8,
            bits: full_mask(len),
        }
    }

    pub fn singleton(len: usize, i: usize) -> Self {
        let mut s = Self::empty(len);
        s.insert(i);
        s
    }

    /// Builds a set from the low `len` bits of `bits`.
    pub fn from_bits(len: usize, bits: u64) -> Self {
        assert!(len <= MAX_STATES);
        Self {
            len: len as u8,
            bits: bits & full_mask(len),
        }
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(len);
        for i in indices {
            s.insert(i);
        }
        s
    }

    /// All `2^len` subsets in mask order.
    pub fn all_subsets(len: usize) -> impl Iterator<Item = StateSet> {
        assert!(len < 64, "subset enumeration needs len < 64");
        (0..1u64 << len).map(move |bits| StateSet::from_bits(len, bits))
    }

    pub fn universe_len(&self) -> usize {
        self.len as usize
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len as usize && self.bits >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len as usize, "state index {i} out of range");
        self.bits |= 1 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.bits &= !(1 << i);
    }

    pub fn count(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_full(&self) -> bool {
        self.bits == full_mask(self.len as usize)
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let bits = self.bits;
        (0..self.len as usize).filter(move |i| bits >> i & 1 == 1)
    }

    pub fn complement(&self) -> StateSet {
        Self {
            len: self.len,
            bits: !self.bits & full_mask(self.len as usize),
        }
    }

    pub fn union(&self, other: &StateSet) -> Result<StateSet> {
        self.same_space(other)?;
        Ok(self.union_unchecked(other))
    }

    pub fn intersection(&self, other: &StateSet) -> Result<StateSet> {
        self.same_space(other)?;
        Ok(self.intersection_unchecked(other))
    }

    pub fn difference(&self, other: &StateSet) -> Result<StateSet> {
        self.same_space(other)?;
        Ok(Self {
            len: self.len,
            bits: self.bits & !other.bits,
        })
    }

    pub(crate) fn union_unchecked(&self, other: &StateSet) -> StateSet {
        debug_assert_eq!(self.len, other.len);
        Self {
            len: self.len,
            bits: self.bits | other.bits,
        }
    }

    pub(crate) fn intersection_unchecked(&self, other: &StateSet) -> StateSet {
        debug_assert_eq!(self.len, other.len);
        Self {
            len: self.len,
            bits: self.bits & other.bits,
        }
    }

    fn same_space(&self, other: &StateSet) -> Result<()> {
        Error::check_len(self.len as usize, other.len as usize)
    }

    /// Indicator weight vector `1_A`.
    pub fn indicator(&self) -> Vec<Rational> {
        (0..self.len as usize)
            .map(|i| if self.contains(i) { Rational::one() } else { Rational::zero() })
            .collect()
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

fn full_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// A subprobability distribution: nonnegative weights summing to at most 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dist {
    weights: Vec<Rational>,
}

impl Dist {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(Error::InvalidValue(format!("negative weight {w}")));
        }
        let mass: Rational = weights.iter().sum();
        if mass > Rational::one() {
            return Err(Error::InvalidValue(format!("total mass {mass} exceeds 1")));
        }
        Ok(Self { weights })
    }

    pub(crate) fn from_weights_unchecked(weights: Vec<Rational>) -> Self {
        Self { weights }
    }

    pub fn zero(len: usize) -> Self {
        Self {
            weights: vec![Rational::zero(); len],
        }
    }

    pub fn dirac(len: usize, at: usize) -> Self {
        let mut d = Self::zero(len);
        d.weights[at] = Rational::one();
        d
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> &Rational {
        &self.weights[i]
    }

    /// `μ(A)`.
    pub fn eval(&self, set: &StateSet) -> Result<Rational> {
        Error::check_len(self.len(), set.universe_len())?;
        Ok(set.iter().map(|i| &self.weights[i]).sum())
    }

    pub fn mass(&self) -> Rational {
        self.weights.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(Zero::is_zero)
    }

    /// `Σ_s w(s)·μ(s)`.
    pub fn expectation(&self, w: &[Rational]) -> Rational {
        debug_assert_eq!(w.len(), self.len());
        self.weights
            .iter()
            .zip(w)
            .filter(|(m, _)| !m.is_zero())
            .map(|(m, x)| m * x)
            .sum()
    }

    /// Localization `F_A(μ)(B) = μ(A ∩ B)`.
    pub fn localize(&self, set: &StateSet) -> Result<Dist> {
        Error::check_len(self.len(), set.universe_len())?;
        let weights = self
            .weights
            .iter()
            .enumerate()
            .map(|(i, w)| if set.contains(i) { w.clone() } else { Rational::zero() })
            .collect();
        Ok(Self { weights })
    }

    /// Image measure along `f: S → T` given as an index map.
    pub fn pushforward(&self, map: &[usize], target_len: usize) -> Dist {
        debug_assert_eq!(map.len(), self.len());
        let mut weights = vec![Rational::zero(); target_len];
        for (w, &t) in self.weights.iter().zip(map) {
            weights[t] += w;
        }
        Self { weights }
    }

    pub fn support(&self) -> StateSet {
        StateSet::from_indices(
            self.len(),
            self.weights
                .iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .map(|(i, _)| i),
        )
    }
}

impl fmt::Debug for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(
                self.weights
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| !w.is_zero())
                    .map(|(i, w)| (i, w.to_string())),
            )
            .finish()
    }
}
