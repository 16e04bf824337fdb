//! Threshold profiles.
//!
//! For a game `τ`, a target set `A` and a state `s`, the set of thresholds
//! `q ∈ [0, 1]` with `s ∈ ⦗τ⦘(A, q)` is a finite union of intervals with
//! rational endpoints. [`IntervalSet`] stores such a union canonically and
//! this module provides the operations that build profiles game by game.
//!
//! A [`Cell`] carries a certified lower and upper bound on the true interval
//! set; the two coincide except where an iteration was cut off at the
//! configured depth.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::effectivity::EffectivityFn;
use crate::num::{format_rational, parse_rational, Rational};
use crate::{Error, Result};

/// An interval inside `[0, 1]` with rational endpoints.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational, lo_closed: bool, hi_closed: bool) -> Self {
        Self {
            lo,
            hi,
            lo_closed,
            hi_closed,
        }
    }

    pub fn closed(lo: Rational, hi: Rational) -> Self {
        Self::new(lo, hi, true, true)
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn contains(&self, q: &Rational) -> bool {
        let above = if self.lo_closed { *q >= self.lo } else { *q > self.lo };
        let below = if self.hi_closed { *q <= self.hi } else { *q < self.hi };
        above && below
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lo_closed { '[' } else { '(' };
        let close = if self.hi_closed { ']' } else { ')' };
        write!(f, "{open}{}, {}{close}", self.lo, self.hi)
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Interval", 4)?;
        st.serialize_field("lo", &format_rational(&self.lo))?;
        st.serialize_field("hi", &format_rational(&self.hi))?;
        st.serialize_field("lo_closed", &self.lo_closed)?;
        st.serialize_field("hi_closed", &self.hi_closed)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            lo: String,
            hi: String,
            lo_closed: bool,
            hi_closed: bool,
        }
        let raw = Raw::deserialize(d)?;
        let lo = parse_rational(&raw.lo).map_err(serde::de::Error::custom)?;
        let hi = parse_rational(&raw.hi).map_err(serde::de::Error::custom)?;
        Ok(Interval::new(lo, hi, raw.lo_closed, raw.hi_closed))
    }
}

/// Canonical finite union of disjoint, non-touching intervals in `[0, 1]`,
/// sorted by left endpoint.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    /// `[0, 1]`.
    pub fn full() -> Self {
        Self {
            parts: vec![Interval::closed(Rational::zero(), Rational::one())],
        }
    }

    /// Canonicalizes an arbitrary list of intervals within `[0, 1]`.
    pub fn new(mut parts: Vec<Interval>) -> Result<Self> {
        for p in &parts {
            if p.lo.is_negative() || p.hi > Rational::one() {
                return Err(Error::InvalidValue(format!("interval {p} leaves [0, 1]")));
            }
        }
        parts.retain(|p| !p.is_empty());
        parts.sort_by(|a, b| a.lo.cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for p in parts {
            if let Some(last) = merged.last_mut() {
                let touches = last.hi > p.lo || (last.hi == p.lo && (last.hi_closed || p.lo_closed));
                if touches {
                    if p.hi > last.hi {
                        last.hi = p.hi;
                        last.hi_closed = p.hi_closed;
                    } else if p.hi == last.hi {
                        last.hi_closed |= p.hi_closed;
                    }
                    continue;
                }
            }
            merged.push(p);
        }
        Ok(Self { parts: merged })
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_full(&self) -> bool {
        *self == Self::full()
    }

    pub fn member(&self, q: &Rational) -> bool {
        self.parts.iter().any(|p| p.contains(q))
    }

    /// Lebesgue measure; endpoint flags are irrelevant.
    pub fn lebesgue(&self) -> Rational {
        self.parts.iter().map(Interval::length).sum()
    }

    /// Complement relative to `[0, 1]`.
    pub fn complement(&self) -> Self {
        let mut out = Vec::with_capacity(self.parts.len() + 1);
        let mut cursor = Rational::zero();
        let mut cursor_closed = true;
        for p in &self.parts {
            let gap = Interval::new(cursor.clone(), p.lo.clone(), cursor_closed, !p.lo_closed);
            if !gap.is_empty() {
                out.push(gap);
            }
            cursor = p.hi.clone();
            cursor_closed = !p.hi_closed;
        }
        let tail = Interval::new(cursor, Rational::one(), cursor_closed, true);
        if !tail.is_empty() {
            out.push(tail);
        }
        Self { parts: out }
    }

    /// Infimum of the set and whether it is attained; `None` when empty.
    pub fn infimum(&self) -> Option<(Rational, bool)> {
        self.parts.first().map(|p| (p.lo.clone(), p.lo_closed))
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.complement().union(other).is_full()
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let parts = self.parts.iter().chain(&other.parts).cloned().collect();
        IntervalSet::new(parts).expect("parts already within [0, 1]")
    }

    /// True when the set is `∅`, `[0, m)`, `[0, m]` or `[0, 1]`.
    pub fn is_down_set(&self) -> bool {
        match self.parts.as_slice() {
            [] => true,
            [p] => p.lo.is_zero() && p.lo_closed,
            _ => false,
        }
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("∅");
        }
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for IntervalSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<Interval>::deserialize(d)?;
        IntervalSet::new(parts).map_err(serde::de::Error::custom)
    }
}

/// `[0, t)` or `[0, t]`.
pub fn down_interval(t: &Rational, inclusive: bool) -> Result<IntervalSet> {
    if t.is_negative() || *t > Rational::one() {
        return Err(Error::InvalidValue(format!("threshold bound {t} outside [0, 1]")));
    }
    Ok(IntervalSet::new(vec![Interval::new(Rational::zero(), t.clone(), true, inclusive)])
        .expect("within [0, 1]"))
}

/// The profile of an angelic choice.
///
/// `q` is in the result iff for all rational `a1, a2 ≥ 0` with
/// `a1 + a2 ≤ q`, `a1 ∈ r1` or `a2 ∈ r2`. With complements `C1, C2` the
/// failure set is `{q ≥ inf C1 + inf C2}`, closed at the bound iff both
/// infima are attained.
pub fn choice_combine(r1: &IntervalSet, r2: &IntervalSet) -> IntervalSet {
    let (c1, c2) = (r1.complement(), r2.complement());
    let (Some((i1, a1)), Some((i2, a2))) = (c1.infimum(), c2.infimum()) else {
        return IntervalSet::full();
    };
    failure_complement(&(i1 + i2), a1 && a2)
}

fn failure_complement(bound: &Rational, attained: bool) -> IntervalSet {
    if *bound > Rational::one() {
        return IntervalSet::full();
    }
    // Failure set is [bound, 1] or (bound, 1]; its complement is a down-set.
    IntervalSet::new(vec![Interval::new(Rational::zero(), bound.clone(), true, !attained)])
        .expect("within [0, 1]")
}

/// Running state of the iteration rule for one state.
///
/// Term `n` is the profile of `τ^n;τ0` at the state. `q` fails iff some
/// rational sequence `(a_n)` with `Σ a_n ≤ q` has `a_{n+1} ∉ Rⁿ` for all `n`,
/// so the failure threshold is `Σ_n inf Cⁿ`, attained iff every infimum is.
#[derive(Clone, Debug)]
pub struct StarFold {
    sum: Rational,
    attained: bool,
    saturated: bool,
    terms: usize,
}

impl Default for StarFold {
    fn default() -> Self {
        Self::new()
    }
}

impl StarFold {
    pub fn new() -> Self {
        Self {
            sum: Rational::zero(),
            attained: true,
            saturated: false,
            terms: 0,
        }
    }

    pub fn push(&mut self, term: &IntervalSet) {
        self.terms += 1;
        if self.saturated {
            return;
        }
        match term.complement().infimum() {
            None => self.saturated = true,
            Some((inf, attained)) => {
                self.sum += inf;
                self.attained &= attained;
            }
        }
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    /// `Σ inf Cⁿ` over the terms pushed so far.
    pub fn partial_sum(&self) -> &Rational {
        &self.sum
    }

    /// True once further terms cannot change the result.
    pub fn is_decided(&self) -> bool {
        self.saturated
            || self.sum > Rational::one()
            || (self.sum.is_one() && !self.attained)
    }

    /// Result assuming every further term has `inf Cⁿ = 0`, attained.
    pub fn finish_exact(&self) -> IntervalSet {
        if self.saturated {
            return IntervalSet::full();
        }
        failure_complement(&self.sum, self.attained)
    }

    /// Certified subset of the result when the stream was cut off.
    ///
    /// The true failure threshold is at least the current partial sum, so
    /// `[0, m_N)` always holds, and `[0, m_N]` when some infimum so far was
    /// not attained.
    pub fn finish_truncated(&self) -> IntervalSet {
        if self.is_decided() {
            return self.finish_exact();
        }
        IntervalSet::new(vec![Interval::new(Rational::zero(), self.sum.clone(), true, !self.attained)])
            .expect("within [0, 1]")
    }
}

/// One element of an iteration stream.
#[derive(Clone, Debug)]
pub enum StarTerm {
    Term(IntervalSet),
    /// Certificate that this and every later term is empty.
    AbsorbingEmpty,
}

/// Whether a profile cell was computed exactly or cut off.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Exact,
    Truncated(usize),
}

/// Folds an iteration stream, stopping after `cap` terms.
///
/// The iterator ending is read as an absorbing empty tail.
pub fn star_combine(
    stream: impl IntoIterator<Item = StarTerm>,
    cap: usize,
) -> (IntervalSet, CellStatus) {
    let mut fold = StarFold::new();
    let mut stream = stream.into_iter();
    while fold.terms() < cap {
        match stream.next() {
            None | Some(StarTerm::AbsorbingEmpty) => return (fold.finish_exact(), CellStatus::Exact),
            Some(StarTerm::Term(r)) => {
                fold.push(&r);
                if fold.is_decided() {
                    return (fold.finish_exact(), CellStatus::Exact);
                }
            }
        }
    }
    if matches!(stream.next(), None | Some(StarTerm::AbsorbingEmpty)) {
        return (fold.finish_exact(), CellStatus::Exact);
    }
    (fold.finish_truncated(), CellStatus::Truncated(cap))
}

/// Three-valued membership.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Undecided,
}

/// Certified bounds `lower ⊆ true set ⊆ upper` for one state.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Cell {
    pub lower: IntervalSet,
    pub upper: IntervalSet,
}

impl Cell {
    pub fn exact(set: IntervalSet) -> Self {
        Self {
            lower: set.clone(),
            upper: set,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn verdict(&self, q: &Rational) -> Verdict {
        if self.lower.member(q) {
            Verdict::Holds
        } else if !self.upper.member(q) {
            Verdict::Fails
        } else {
            Verdict::Undecided
        }
    }

    /// Dual: thresholds flip to the complement, so the bounds swap.
    pub fn complement(&self) -> Cell {
        Cell {
            lower: self.upper.complement(),
            upper: self.lower.complement(),
        }
    }
}

/// Per-state cells for one game and target set.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Profile {
    cells: Vec<Cell>,
    cap: usize,
}

impl Profile {
    pub fn new(cells: Vec<Cell>, cap: usize) -> Self {
        Self { cells, cap }
    }

    pub fn exact(sets: Vec<IntervalSet>) -> Self {
        Self {
            cells: sets.into_iter().map(Cell::exact).collect(),
            cap: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, s: usize) -> &Cell {
        &self.cells[s]
    }

    /// Certified interval set at `s` (exact when the status is exact).
    pub fn set(&self, s: usize) -> &IntervalSet {
        &self.cells[s].lower
    }

    pub fn status(&self, s: usize) -> CellStatus {
        if self.cells[s].is_exact() {
            CellStatus::Exact
        } else {
            CellStatus::Truncated(self.cap)
        }
    }

    pub fn is_exact(&self) -> bool {
        self.cells.iter().all(Cell::is_exact)
    }

    pub fn member(&self, s: usize, q: &Rational) -> Verdict {
        self.cells[s].verdict(q)
    }

    /// True when every cell is certainly empty.
    pub fn is_certainly_empty(&self) -> bool {
        self.cells.iter().all(|c| c.upper.is_empty())
    }

    pub fn complement(&self) -> Profile {
        Profile {
            cells: self.cells.iter().map(Cell::complement).collect(),
            cap: self.cap,
        }
    }

    pub fn choice(&self, other: &Profile) -> Profile {
        let cells = self
            .cells
            .iter()
            .zip(&other.cells)
            .map(|(a, b)| Cell {
                lower: choice_combine(&a.lower, &b.lower),
                upper: choice_combine(&a.upper, &b.upper),
            })
            .collect();
        Profile {
            cells,
            cap: self.cap.max(other.cap),
        }
    }

    pub(crate) fn with_cap(mut self, cap: usize) -> Self {
        self.cap = self.cap.max(cap);
        self
    }
}

/// Composition with a primitive prefix.
///
/// `s` is in `⦗γ;τ⦘(A, q)` iff Angel can force a distribution `μ` with
/// `Σ_{s'} μ(s')·λ(R_{s'}) > q`, where `R_{s'}` is the target profile at
/// `s'` and `λ` Lebesgue measure. The result is `[0, t)` with `t` the best
/// guaranteed expectation.
pub fn compose_prefix(eff: &EffectivityFn, target: &Profile) -> Result<Profile> {
    Error::check_len(eff.len(), target.len())?;
    let w_lower: Vec<Rational> = target.cells.iter().map(|c| c.lower.lebesgue()).collect();
    let exact = target.is_exact();
    let w_upper: Vec<Rational> = if exact {
        w_lower.clone()
    } else {
        target.cells.iter().map(|c| c.upper.lebesgue()).collect()
    };
    let cells = (0..eff.len())
        .map(|s| {
            let lower = down_interval(&eff.sup_expectation(s, &w_lower), false)?;
            let upper = if exact {
                lower.clone()
            } else {
                down_interval(&eff.sup_expectation(s, &w_upper), false)?
            };
            Ok(Cell { lower, upper })
        })
        .collect::<Result<_>>()?;
    Ok(Profile {
        cells,
        cap: target.cap,
    })
}
