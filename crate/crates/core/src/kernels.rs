//! Substochastic kernels, extended kernels and their algebra.
//!
//! A [`Kernel`] is a finite substochastic matrix, one [`Dist`] per state. An
//! [`ExtKernel`] has entries in the nonnegative rationals extended by `+∞`;
//! such kernels arise as sums and iterations of program kernels.
//!
//! Extended arithmetic uses `0·∞ = 0`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

use num_traits::{One, Signed, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::num::Rational;
use crate::space::{Dist, StateSet};
use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Kernel {
    rows: Vec<Dist>,
}

impl Kernel {
    pub fn new(rows: Vec<Dist>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Model("kernel needs at least one row".into()));
        }
        for row in &rows {
            Error::check_len(n, row.len())?;
        }
        Ok(Self { rows })
    }

    /// Builds a kernel from a square matrix, validating each row.
    pub fn from_matrix(matrix: Vec<Vec<Rational>>) -> Result<Self> {
        Self::new(matrix.into_iter().map(Dist::new).collect::<Result<_>>()?)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: (0..n).map(|i| Dist::dirac(n, i)).collect(),
        }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            rows: vec![Dist::zero(n); n],
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Dist] {
        &self.rows
    }

    pub fn row(&self, s: usize) -> &Dist {
        &self.rows[s]
    }

    pub fn entry(&self, s: usize, t: usize) -> &Rational {
        self.rows[s].weight(t)
    }

    /// Kleisli product `(self ⋆ other)(s)(t) = Σ_u self(s)(u)·other(u)(t)`.
    pub fn convolve(&self, other: &Kernel) -> Result<Kernel> {
        Error::check_len(self.len(), other.len())?;
        let n = self.len();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out = vec![Rational::zero(); n];
                for (u, w) in row.weights().iter().enumerate() {
                    if w.is_zero() {
                        continue;
                    }
                    for (t, v) in other.rows[u].weights().iter().enumerate() {
                        if !v.is_zero() {
                            out[t] += w * v;
                        }
                    }
                }
                Dist::from_weights_unchecked(out)
            })
            .collect();
        Ok(Kernel { rows })
    }

    pub fn to_ext(&self) -> ExtKernel {
        ExtKernel::from(self)
    }
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.rows).finish()
    }
}

/// A nonnegative rational or `+∞`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ExtValue {
    Finite(Rational),
    Infinite,
}

impl ExtValue {
    pub fn zero() -> Self {
        ExtValue::Finite(Rational::zero())
    }

    pub fn one() -> Self {
        ExtValue::Finite(Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtValue::Finite(r) if r.is_zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtValue::Infinite)
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtValue::Finite(r) => Some(r),
            ExtValue::Infinite => None,
        }
    }

    /// `self > q`, with `∞ > q` for every rational `q`.
    pub fn exceeds(&self, q: &Rational) -> bool {
        match self {
            ExtValue::Finite(r) => r > q,
            ExtValue::Infinite => true,
        }
    }
}

impl PartialOrd for ExtValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtValue::Finite(a), ExtValue::Finite(b)) => a.cmp(b),
            (ExtValue::Finite(_), ExtValue::Infinite) => Ordering::Less,
            (ExtValue::Infinite, ExtValue::Finite(_)) => Ordering::Greater,
            (ExtValue::Infinite, ExtValue::Infinite) => Ordering::Equal,
        }
    }
}

impl Add for &ExtValue {
    type Output = ExtValue;

    fn add(self, rhs: &ExtValue) -> ExtValue {
        match (self, rhs) {
            (ExtValue::Finite(a), ExtValue::Finite(b)) => ExtValue::Finite(a + b),
            _ => ExtValue::Infinite,
        }
    }
}

impl Mul for &ExtValue {
    type Output = ExtValue;

    fn mul(self, rhs: &ExtValue) -> ExtValue {
        if self.is_zero() || rhs.is_zero() {
            return ExtValue::zero();
        }
        match (self, rhs) {
            (ExtValue::Finite(a), ExtValue::Finite(b)) => ExtValue::Finite(a * b),
            _ => ExtValue::Infinite,
        }
    }
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::Finite(r) => write!(f, "{r}"),
            ExtValue::Infinite => f.write_str("inf"),
        }
    }
}

impl fmt::Debug for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<Rational> for ExtValue {
    fn from(r: Rational) -> Self {
        ExtValue::Finite(r)
    }
}

/// State-indexed square matrix over `ℚ₊ ∪ {∞}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExtKernel {
    entries: Vec<Vec<ExtValue>>,
}

impl ExtKernel {
    pub fn new(entries: Vec<Vec<ExtValue>>) -> Result<Self> {
        let n = entries.len();
        for row in &entries {
            Error::check_len(n, row.len())?;
            if row
                .iter()
                .any(|v| matches!(v, ExtValue::Finite(r) if r.is_negative()))
            {
                return Err(Error::InvalidValue("negative kernel entry".into()));
            }
        }
        Ok(Self { entries })
    }

    pub fn identity(n: usize) -> Self {
        Kernel::identity(n).to_ext()
    }

    pub fn zero(n: usize) -> Self {
        Self {
            entries: vec![vec![ExtValue::zero(); n]; n],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, s: usize, t: usize) -> &ExtValue {
        &self.entries[s][t]
    }

    pub fn rows(&self) -> &[Vec<ExtValue>] {
        &self.entries
    }

    /// `N(s)(A) = Σ_{t∈A} N(s)(t)`.
    pub fn eval(&self, s: usize, set: &StateSet) -> Result<ExtValue> {
        Error::check_len(self.len(), set.universe_len())?;
        Ok(set
            .iter()
            .fold(ExtValue::zero(), |acc, t| &acc + &self.entries[s][t]))
    }

    /// Converts back to a substochastic kernel when every row qualifies.
    pub fn to_kernel(&self) -> Option<Kernel> {
        let rows = self
            .entries
            .iter()
            .map(|row| {
                let weights = row
                    .iter()
                    .map(|v| v.finite().cloned())
                    .collect::<Option<Vec<_>>>()?;
                Dist::new(weights).ok()
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Kernel { rows })
    }

    /// `Σ_{n≥0} N^n` for an arbitrary extended kernel.
    ///
    /// An entry `(s, t)` diverges iff some walk from `s` to `t` uses an `∞`
    /// edge or passes through a strongly connected component whose block `B`
    /// has spectral radius at least 1. For a nonnegative irreducible block,
    /// radius `< 1` holds iff `I − B` is invertible with a nonnegative
    /// inverse, which is decided exactly. Finite entries solve
    /// `x = e_t + N x` on the states that reach `t`.
    pub fn star(&self) -> Result<ExtKernel> {
        let n = self.len();
        let support = |s: usize, t: usize| !self.entries[s][t].is_zero();
        let sccs = components(n, support);
        let reach = reachability(n, support);

        let mut divergent_node = vec![false; n];
        for comp in &sccs {
            if block_diverges(self, comp, support)? {
                for &u in comp {
                    divergent_node[u] = true;
                }
            }
        }

        let mut out = vec![vec![ExtValue::zero(); n]; n];
        for s in 0..n {
            for t in 0..n {
                if !reach[s].contains(t) {
                    continue;
                }
                let through_node = (0..n).any(|u| divergent_node[u] && reach[s].contains(u) && reach[u].contains(t));
                let through_edge = (0..n).any(|u| {
                    reach[s].contains(u)
                        && (0..n).any(|v| self.entries[u][v].is_infinite() && reach[v].contains(t))
                });
                if through_node || through_edge {
                    out[s][t] = ExtValue::Infinite;
                }
            }
        }

        for t in 0..n {
            let rows: Vec<usize> = (0..n)
                .filter(|&s| reach[s].contains(t) && !out[s][t].is_infinite())
                .collect();
            if rows.is_empty() {
                continue;
            }
            let m = rows.len();
            let mut a = vec![vec![Rational::zero(); m]; m];
            let mut b = vec![Rational::zero(); m];
            for (i, &s) in rows.iter().enumerate() {
                a[i][i] = Rational::one();
                if s == t {
                    b[i] = Rational::one();
                }
                for (j, &u) in rows.iter().enumerate() {
                    match &self.entries[s][u] {
                        ExtValue::Finite(w) => a[i][j] -= w,
                        ExtValue::Infinite => {
                            return Err(Error::Invariant("infinite edge inside a finite column".into()))
                        }
                    }
                }
            }
            let x = linalg::solve(a, b)
                .ok_or_else(|| Error::Invariant("singular system for a finite star column".into()))?;
            for (i, &s) in rows.iter().enumerate() {
                out[s][t] = ExtValue::Finite(x[i].clone());
            }
        }
        Ok(ExtKernel { entries: out })
    }
}

impl From<&Kernel> for ExtKernel {
    fn from(k: &Kernel) -> Self {
        Self {
            entries: k
                .rows
                .iter()
                .map(|row| row.weights().iter().cloned().map(ExtValue::Finite).collect())
                .collect(),
        }
    }
}

impl fmt::Debug for ExtKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.entries).finish()
    }
}

/// `(a ⋆ b)(s)(t) = Σ_u a(s)(u)·b(u)(t)` with `∞`-absorbing arithmetic.
pub fn convolve(a: &ExtKernel, b: &ExtKernel) -> Result<ExtKernel> {
    Error::check_len(a.len(), b.len())?;
    let n = a.len();
    let mut entries = vec![vec![ExtValue::zero(); n]; n];
    for (s, row) in a.entries.iter().enumerate() {
        for (u, w) in row.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for t in 0..n {
                let term = w * &b.entries[u][t];
                if !term.is_zero() {
                    entries[s][t] = &entries[s][t] + &term;
                }
            }
        }
    }
    Ok(ExtKernel { entries })
}

/// Pointwise sum.
pub fn kernel_sum(a: &ExtKernel, b: &ExtKernel) -> Result<ExtKernel> {
    Error::check_len(a.len(), b.len())?;
    let entries = a
        .entries
        .iter()
        .zip(&b.entries)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect();
    Ok(ExtKernel { entries })
}

/// `Σ_{n≥0} K^n` for a substochastic kernel.
///
/// A strongly connected component `C` of the support digraph is recurrent iff
/// `K(s)(C) = 1` for all `s ∈ C`. Entries into a recurrent class reachable
/// from the source are `∞`; entries between transient states come from
/// `(I − Q)^{-1}` where `Q` is the transient-to-transient block; recurrent
/// classes are closed, so they contribute nothing to transient targets.
pub fn star_closure(k: &Kernel) -> Result<ExtKernel> {
    let n = k.len();
    let support = |s: usize, t: usize| !k.entry(s, t).is_zero();
    let sccs = components(n, support);
    let reach = reachability(n, support);

    let mut recurrent = vec![false; n];
    for comp in &sccs {
        let members = StateSet::from_indices(n, comp.iter().copied());
        let closed_stochastic = comp
            .iter()
            .all(|&s| k.row(s).eval(&members).map(|m| m.is_one()).unwrap_or(false));
        if closed_stochastic {
            for &s in comp {
                recurrent[s] = true;
            }
        }
    }

    let transient: Vec<usize> = (0..n).filter(|&s| !recurrent[s]).collect();
    let m = transient.len();
    let mut i_minus_q = vec![vec![Rational::zero(); m]; m];
    for (i, &s) in transient.iter().enumerate() {
        i_minus_q[i][i] = Rational::one();
        for (j, &t) in transient.iter().enumerate() {
            i_minus_q[i][j] -= k.entry(s, t);
        }
    }
    let fundamental = if m == 0 {
        Vec::new()
    } else {
        linalg::invert(i_minus_q)
            .ok_or_else(|| Error::Invariant("I - Q is singular on transient states".into()))?
    };

    let mut entries = vec![vec![ExtValue::zero(); n]; n];
    for s in 0..n {
        for t in 0..n {
            if recurrent[t] {
                if reach[s].contains(t) {
                    entries[s][t] = ExtValue::Infinite;
                }
            } else if !recurrent[s] {
                let i = transient.binary_search(&s).expect("transient index");
                let j = transient.binary_search(&t).expect("transient index");
                entries[s][t] = ExtValue::Finite(fundamental[i][j].clone());
            }
        }
    }
    Ok(ExtKernel { entries })
}

/// Localization of a distribution to `set`.
pub fn localize(set: &StateSet, mu: &Dist) -> Result<Dist> {
    mu.localize(set)
}

/// Kernel of a test: `row(s) = δ_s` localized to `set` (or its complement).
pub fn test_kernel(set: &StateSet, positive: bool) -> Kernel {
    let n = set.universe_len();
    let keep = if positive { *set } else { set.complement() };
    Kernel {
        rows: (0..n)
            .map(|s| if keep.contains(s) { Dist::dirac(n, s) } else { Dist::zero(n) })
            .collect(),
    }
}

fn components(n: usize, edge: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut graph = DiGraph::<(), ()>::with_capacity(n, n * n);
    let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
    for s in 0..n {
        for t in 0..n {
            if edge(s, t) {
                graph.add_edge(nodes[s], nodes[t], ());
            }
        }
    }
    tarjan_scc(&graph)
        .into_iter()
        .map(|comp| {
            let mut c: Vec<usize> = comp.into_iter().map(|ix| ix.index()).collect();
            c.sort_unstable();
            c
        })
        .collect()
}

/// Reflexive-transitive closure of the support relation.
fn reachability(n: usize, edge: impl Fn(usize, usize) -> bool) -> Vec<StateSet> {
    let mut reach: Vec<StateSet> = (0..n).map(|s| StateSet::singleton(n, s)).collect();
    for s in 0..n {
        for t in 0..n {
            if edge(s, t) {
                reach[s].insert(t);
            }
        }
    }
    for k in 0..n {
        for s in 0..n {
            if reach[s].contains(k) {
                reach[s] = reach[s].union_unchecked(&reach[k]);
            }
        }
    }
    reach
}

fn block_diverges(
    kernel: &ExtKernel,
    comp: &[usize],
    edge: impl Fn(usize, usize) -> bool,
) -> Result<bool> {
    let has_cycle = comp.len() > 1 || edge(comp[0], comp[0]);
    if !has_cycle {
        return Ok(false);
    }
    let m = comp.len();
    let mut a = vec![vec![Rational::zero(); m]; m];
    for (i, &s) in comp.iter().enumerate() {
        a[i][i] = Rational::one();
        for (j, &t) in comp.iter().enumerate() {
            match kernel.entry(s, t) {
                ExtValue::Finite(w) => a[i][j] -= w,
                ExtValue::Infinite => return Ok(true),
            }
        }
    }
    Ok(match linalg::invert(a) {
        None => true,
        Some(inv) => inv.iter().flatten().any(Signed::is_negative),
    })
}

/// Exact Gaussian elimination; the pivot is the first nonzero entry at or
/// below the diagonal in the current column.
pub(crate) mod linalg {
    use super::*;

    pub fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
        let n = a.len();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, pivot);
            b.swap(col, pivot);
            let p = a[col][col].clone();
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let factor = &a[r][col] / &p;
                for c in col..n {
                    let delta = &factor * &a[col][c];
                    a[r][c] -= delta;
                }
                let delta = &factor * &b[col];
                b[r] -= delta;
            }
        }
        Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
    }

    pub fn invert(a: Vec<Vec<Rational>>) -> Option<Vec<Vec<Rational>>> {
        let n = a.len();
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![Rational::zero(); n];
            e[j] = Rational::one();
            cols.push(solve(a.clone(), e)?);
        }
        Some((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::num::{int, rat};
    use proptest::prelude::*;

    fn fin(r: Rational) -> ExtValue {
        ExtValue::Finite(r)
    }

    fn kernel(rows: Vec<Vec<Rational>>) -> Kernel {
        Kernel::from_matrix(rows).unwrap()
    }

    #[test]
    fn identity_is_unit_for_convolution() {
        let k = kernel(vec![vec![rat(1, 2), rat(1, 2)], vec![rat(1, 3), int(0)]]);
        assert_eq!(Kernel::identity(2).convolve(&k).unwrap(), k);
        assert_eq!(k.convolve(&Kernel::identity(2)).unwrap(), k);
        assert_eq!(Kernel::zero(2).convolve(&k).unwrap(), Kernel::zero(2));
    }

    #[test]
    fn convolution_hand_product() {
        let k = kernel(vec![vec![rat(1, 2), rat(1, 2)], vec![int(0), int(1)]]);
        let l = kernel(vec![vec![int(0), int(1)], vec![int(0), int(1)]]);
        assert_eq!(*k.convolve(&l).unwrap().entry(0, 1), int(1));
    }

    #[test]
    fn sums_are_pointwise_and_absorbing() {
        let id = ExtKernel::identity(2);
        assert_eq!(kernel_sum(&id, &ExtKernel::zero(2)).unwrap(), id);
        let twice = kernel_sum(&id, &id).unwrap();
        assert_eq!(*twice.entry(0, 0), fin(int(2)));
        assert_eq!(*twice.entry(0, 1), ExtValue::zero());
        assert_eq!(&ExtValue::Infinite + &fin(int(3)), ExtValue::Infinite);
        assert_eq!(&ExtValue::Infinite * &ExtValue::zero(), ExtValue::zero());
    }

    #[test]
    fn star_examples() {
        assert_eq!(star_closure(&Kernel::zero(3)).unwrap(), ExtKernel::identity(3));
        let diverge = star_closure(&Kernel::identity(2)).unwrap();
        assert_eq!(*diverge.entry(0, 0), ExtValue::Infinite);
        assert_eq!(*diverge.entry(1, 1), ExtValue::Infinite);
        assert_eq!(*diverge.entry(0, 1), ExtValue::zero());
        let half = kernel(vec![vec![rat(1, 2)]]);
        assert_eq!(*star_closure(&half).unwrap().entry(0, 0), fin(int(2)));
    }

    #[test]
    fn star_transient_into_recurrent() {
        // s0 -> s0 (1/2), s0 -> s1 (1/2), s1 absorbing.
        let k = kernel(vec![vec![rat(1, 2), rat(1, 2)], vec![int(0), int(1)]]);
        let x = star_closure(&k).unwrap();
        assert_eq!(*x.entry(0, 0), fin(int(2)));
        assert_eq!(*x.entry(0, 1), ExtValue::Infinite);
        assert_eq!(*x.entry(1, 0), ExtValue::zero());
        assert_eq!(*x.entry(1, 1), ExtValue::Infinite);
    }

    #[test]
    fn general_star_detects_superunit_cycles() {
        let two = ExtKernel::new(vec![vec![fin(int(2))]]).unwrap();
        assert_eq!(*two.star().unwrap().entry(0, 0), ExtValue::Infinite);
        let third = ExtKernel::new(vec![vec![fin(rat(1, 3)), ExtValue::Infinite], vec![int(0).into(), int(0).into()]])
            .unwrap();
        let x = third.star().unwrap();
        assert_eq!(*x.entry(0, 0), fin(rat(3, 2)));
        assert_eq!(*x.entry(0, 1), ExtValue::Infinite);
        assert_eq!(*x.entry(1, 1), ExtValue::one());
    }

    #[test]
    fn test_kernels() {
        let all = StateSet::full(2);
        assert_eq!(test_kernel(&all, true), Kernel::identity(2));
        assert_eq!(test_kernel(&StateSet::empty(2), true), Kernel::zero(2));
        let s0 = StateSet::singleton(2, 0);
        let k = test_kernel(&s0, true);
        assert_eq!(*k.row(0), Dist::dirac(2, 0));
        assert!(k.row(1).is_zero());
        let neg = test_kernel(&s0, false);
        assert!(neg.row(0).is_zero());
        assert_eq!(*neg.row(1), Dist::dirac(2, 1));
    }

    #[test]
    fn mismatched_spaces() {
        assert!(matches!(
            Kernel::identity(2).convolve(&Kernel::identity(3)),
            Err(Error::SpaceMismatch { .. })
        ));
        assert!(kernel_sum(&ExtKernel::zero(2), &ExtKernel::zero(1)).is_err());
    }

    pub(crate) fn arb_kernel(n: usize, den: u32) -> impl Strategy<Value = Kernel> {
        proptest::collection::vec(proptest::collection::vec(0..=den, n), n).prop_map(move |raw| {
            let rows = raw
                .into_iter()
                .map(|row| {
                    let total = row.iter().sum::<u32>().max(den);
                    Dist::new(row.into_iter().map(|k| rat(k as i64, total as i64)).collect()).unwrap()
                })
                .collect();
            Kernel::new(rows).unwrap()
        })
    }

    proptest! {
        #[test]
        fn convolution_is_associative_and_substochastic(
            (a, b, c) in (1usize..=4).prop_flat_map(|n| (arb_kernel(n, 4), arb_kernel(n, 4), arb_kernel(n, 4)))
        ) {
            let left = a.convolve(&b).unwrap().convolve(&c).unwrap();
            let right = a.convolve(&b.convolve(&c).unwrap()).unwrap();
            prop_assert_eq!(&left, &right);
            for row in left.rows() {
                prop_assert!(row.mass() <= int(1));
            }
        }

        #[test]
        fn star_satisfies_fixed_point(k in (1usize..=4).prop_flat_map(|n| arb_kernel(n, 3))) {
            let x = star_closure(&k).unwrap();
            let n = k.len();
            let rhs = kernel_sum(&ExtKernel::identity(n), &convolve(&k.to_ext(), &x).unwrap()).unwrap();
            prop_assert_eq!(&x, &rhs);
            // The general extended-kernel route agrees on substochastic input.
            prop_assert_eq!(&x, &k.to_ext().star().unwrap());
        }
    }
}
