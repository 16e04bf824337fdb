//! Brute-force reference computations.
//!
//! Each function evaluates a definition literally over a finite grid or a
//! finite horizon, and has a `*_report` companion that runs the fast path
//! alongside and records whether they agree.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::effectivity::{EffectivityFn, PortfolioTest, Relation};
use crate::kernels::{convolve, kernel_sum, star_closure, ExtKernel, ExtValue, Kernel};
use crate::num::{parse_rational, Rational};
use crate::profiles::{choice_combine, star_combine, Interval, IntervalSet, StarTerm};
use crate::space::StateSet;
use crate::{Error, Result};

/// `{k/den | 0 ≤ k ≤ den}`.
pub fn grid(den: u32) -> Vec<Rational> {
    (0..=den)
        .map(|k| Rational::new(BigInt::from(k), BigInt::from(den)))
        .collect()
}

/// Parses interval sets written as in their display form, e.g.
/// `[0, 1/2) ∪ (3/4, 1]`, `∅` or `empty`. Text between intervals is ignored.
pub fn parse_interval_set(text: &str) -> Result<IntervalSet> {
    let bad = |m: &str| Error::InvalidValue(format!("interval set `{text}`: {m}"));
    let mut parts = Vec::new();
    let mut rest = text;
    while let Some(start) = rest.find(['[', '(']) {
        let lo_closed = rest.as_bytes()[start] == b'[';
        let tail = &rest[start + 1..];
        let end = tail.find([']', ')']).ok_or_else(|| bad("unclosed interval"))?;
        let hi_closed = tail.as_bytes()[end] == b']';
        let (lo, hi) = tail[..end].split_once(',').ok_or_else(|| bad("missing comma"))?;
        let lo = parse_rational(lo.trim())?;
        let hi = parse_rational(hi.trim())?;
        parts.push(Interval::new(lo, hi, lo_closed, hi_closed));
        rest = &tail[end + 1..];
    }
    if parts.is_empty() && !matches!(text.trim(), "∅" | "empty" | "") {
        return Err(bad("no intervals"));
    }
    IntervalSet::new(parts)
}

/// Membership of every grid point `k/den`.
fn grid_members(r: &IntervalSet, den: u32) -> Vec<bool> {
    grid(den).iter().map(|q| r.member(q)).collect()
}

/// Angelic choice by its definition: `q` holds iff every split
/// `a1 + a2 ≤ q` with `a1, a2` multiples of `1/(2·den)` has `a1 ∈ r1` or
/// `a2 ∈ r2`. Returns membership at each `k/den`.
///
/// The split grid is twice as fine as the threshold grid, so an open
/// infimum in each argument still fits below the next threshold when the
/// interval endpoints are multiples of `1/den`.
pub fn choice_by_definition(r1: &IntervalSet, r2: &IntervalSet, den: u32) -> Vec<bool> {
    let fine = 2 * den;
    let m1 = grid_members(r1, fine);
    let m2 = grid_members(r2, fine);
    (0..=den as usize)
        .map(|k| {
            let budget = 2 * k;
            (0..=budget).all(|a1| (0..=budget - a1).all(|a2| m1[a1] || m2[a2]))
        })
        .collect()
}

/// Iteration by its definition over a finite stream followed by empty
/// terms: `q` fails iff some sequence of multiples of `1/(L·den)` with sum
/// at most `q` has `a_{n+1} ∉ Rⁿ` for every `n < L`. Returns membership at
/// each `k/den`.
pub fn star_by_definition(terms: &[IntervalSet], den: u32) -> Vec<bool> {
    let len = terms.len().max(1) as u32;
    let fine = len * den;
    let members: Vec<Vec<bool>> = terms.iter().map(|r| grid_members(r, fine)).collect();
    // fails[b]: some suffix sequence from term n avoids every Rⁿ with sum ≤ b/fine.
    let size = fine as usize + 1;
    let mut fails = vec![true; size];
    for m in members.iter().rev() {
        fails = (0..size)
            .map(|b| (0..=b).any(|a| !m[a] && fails[b - a]))
            .collect();
    }
    (0..=den as usize).map(|k| !fails[k * len as usize]).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct GridReport {
    pub grid: u32,
    pub fast: IntervalSet,
    /// Grid thresholds where the fast path and the definition disagree.
    pub mismatches: Vec<String>,
}

impl GridReport {
    pub fn matches(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn grid_report(fast: IntervalSet, oracle: &[bool], den: u32) -> GridReport {
    let mismatches = grid(den)
        .iter()
        .zip(oracle)
        .filter(|(q, o)| fast.member(q) != **o)
        .map(|(q, _)| q.to_string())
        .collect();
    GridReport {
        grid: den,
        fast,
        mismatches,
    }
}

pub fn choice_report(r1: &IntervalSet, r2: &IntervalSet, den: u32) -> GridReport {
    grid_report(choice_combine(r1, r2), &choice_by_definition(r1, r2, den), den)
}

/// Compares `star_combine` on a finite stream (read as ending in an
/// absorbing empty tail) with the definition.
pub fn star_report(terms: &[IntervalSet], den: u32) -> GridReport {
    let stream = terms.iter().cloned().map(StarTerm::Term);
    let (fast, _) = star_combine(stream, terms.len() + 1);
    grid_report(fast, &star_by_definition(terms, den), den)
}

/// `Σ_{n=0}^{depth} K^n` by repeated multiplication.
pub fn kernel_power_sum(k: &Kernel, depth: usize) -> Vec<Vec<Rational>> {
    let n = k.len();
    let mut sum: Vec<Vec<Rational>> = (0..n)
        .map(|s| (0..n).map(|t| if s == t { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    let mut power = sum.clone();
    for _ in 0..depth {
        power = (0..n)
            .map(|s| {
                (0..n)
                    .map(|t| (0..n).map(|u| &power[s][u] * k.entry(u, t)).sum())
                    .collect()
            })
            .collect();
        for s in 0..n {
            for t in 0..n {
                sum[s][t] += &power[s][t];
            }
        }
    }
    sum
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelSumReport {
    pub depth: usize,
    #[serde(skip)]
    pub partial: Vec<Vec<Rational>>,
    #[serde(skip)]
    pub closure: ExtKernel,
    /// Every partial sum is at most the closure entry.
    pub below_closure: bool,
    /// The closure satisfies `X = I + K⋆X`.
    pub fixed_point: bool,
}

impl KernelSumReport {
    pub fn matches(&self) -> bool {
        self.below_closure && self.fixed_point
    }
}

pub fn kernel_sum_report(k: &Kernel, depth: usize) -> Result<KernelSumReport> {
    let partial = kernel_power_sum(k, depth);
    let closure = star_closure(k)?;
    let below_closure = partial.iter().enumerate().all(|(s, row)| {
        row.iter().enumerate().all(|(t, v)| match closure.entry(s, t) {
            ExtValue::Infinite => true,
            ExtValue::Finite(c) => v <= c,
        })
    });
    let n = k.len();
    let rhs = kernel_sum(&ExtKernel::identity(n), &convolve(&k.to_ext(), &closure)?)?;
    Ok(KernelSumReport {
        depth,
        partial,
        fixed_point: rhs == closure,
        closure,
        below_closure,
    })
}

/// Whether `P(s)` contains the basis portfolio of `test`, decided by
/// checking generator containment directly.
///
/// A generator lies inside a portfolio iff it lies inside the portfolio's
/// trace on the finitely many measures occurring in generators, so that
/// trace is enumerated and handed to the containment check.
pub fn portfolio_by_containment(p: &EffectivityFn, s: usize, test: &PortfolioTest) -> Result<bool> {
    let mut trace = BTreeSet::new();
    for g in p.generators(s) {
        for mu in g {
            if test.contains(mu)? {
                trace.insert(mu.clone());
            }
        }
    }
    Ok(p.contains_portfolio(s, &trace))
}

#[derive(Clone, Debug, Serialize)]
pub struct PortfolioMismatch {
    pub state: usize,
    pub set: Vec<usize>,
    pub strict: bool,
    pub bound: String,
    pub fast: bool,
    pub oracle: bool,
}

/// Runs every subset `A` of the space and every bound `k/den`, strict and
/// weak, through both the bound-based check and generator containment.
pub fn portfolio_report(p: &EffectivityFn, den: u32) -> Result<Vec<PortfolioMismatch>> {
    let n = p.len();
    if n > 16 {
        return Err(Error::TooLarge {
            what: "states for exhaustive portfolio check".into(),
            limit: 16,
            found: n,
        });
    }
    let bounds = grid(den);
    let mut out = Vec::new();
    for s in 0..n {
        for set in StateSet::all_subsets(n) {
            for bound in &bounds {
                for rel in [Relation::Strict, Relation::Weak] {
                    let test = PortfolioTest {
                        set,
                        rel,
                        bound: bound.clone(),
                    };
                    let fast = p.holds(s, &test)?;
                    let oracle = portfolio_by_containment(p, s, &test)?;
                    if fast != oracle {
                        out.push(PortfolioMismatch {
                            state: s,
                            set: set.iter().collect(),
                            strict: rel == Relation::Strict,
                            bound: bound.to_string(),
                            fast,
                            oracle,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}
