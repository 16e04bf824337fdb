//! Characteristic relations and the Kripke-generation decision.
//!
//! A characteristic relation `R ⊆ [0, 1] × 2^S` is stored in bound form:
//! `⟨r, A⟩ ∈ R` iff `r ≤ bound(A)`. The relation induced by an effectivity
//! function at a state uses weak basis portfolios, `bound(A) =
//! sup_expectation(P, s, 1_A)`.
//!
//! The axioms in bound form, for all sets and disjoint `X, Y`:
//!
//! 1. `A ⊆ B ⇒ bound(A) ≤ bound(B)`
//! 2. automatic for down-sets
//! 3. `bound(X) + bound(Y) < 1 ⇒ bound(X ∪ Y) ≤ bound(X) + bound(Y)`
//! 4. `bound(X ∪ Y) ≥ min(bound(X) + bound(Y), 1)`
//! 5. `bound(A) + bound(S ∖ A) ≤ 1`
//! 6. `bound(∅) = 0`
//! 7. automatic: decreasing chains of subsets of a finite set stabilize
//!
//! Axiom 3 is stated for arbitrary pairs; given axiom 1 the disjoint case
//! implies the general one. Axiom 4 is the intersection form
//! `bound(A) ≥ min(bound(A ∩ B) + bound(A ∖ B), 1)`.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::effectivity::{up_family_eq, EffectivityFn};
use crate::kernels::Kernel;
use crate::num::Rational;
use crate::space::{Dist, StateSet};
use crate::{Error, Result};

/// Largest state space for which all subsets are enumerated.
pub const MAX_DEDUCTION_STATES: usize = 16;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CharacteristicRelation {
    len: usize,
    bounds: Vec<Rational>,
}

impl CharacteristicRelation {
    /// Builds a relation from `bound(A)` for every subset, indexed by the
    /// subset's bitmask.
    pub fn new(len: usize, bounds: Vec<Rational>) -> Result<Self> {
        check_size(len)?;
        Error::check_len(1 << len, bounds.len())?;
        if let Some(b) = bounds.iter().find(|b| !crate::num::in_unit_interval(b)) {
            return Err(Error::InvalidValue(format!("bound {b} outside [0, 1]")));
        }
        Ok(Self { len, bounds })
    }

    pub fn from_fn(len: usize, f: impl Fn(&StateSet) -> Rational) -> Result<Self> {
        check_size(len)?;
        Self::new(len, StateSet::all_subsets(len).map(|a| f(&a)).collect())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bound(&self, set: &StateSet) -> &Rational {
        &self.bounds[set.bits() as usize]
    }

    /// Whether `⟨r, A⟩ ∈ R`.
    pub fn contains(&self, r: &Rational, set: &StateSet) -> bool {
        r <= self.bound(set)
    }
}

fn check_size(len: usize) -> Result<()> {
    if len > MAX_DEDUCTION_STATES {
        return Err(Error::TooLarge {
            what: "state space for subset enumeration",
            limit: MAX_DEDUCTION_STATES,
            found: len,
        });
    }
    Ok(())
}

/// `R(s) = {⟨r, A⟩ | β(A, ≥ r) ∈ P(s)}`.
pub fn characteristic_from_eff(p: &EffectivityFn, s: usize) -> Result<CharacteristicRelation> {
    let n = p.len();
    check_size(n)?;
    CharacteristicRelation::from_fn(n, |a| p.sup_expectation(s, &a.indicator()))
}

/// A violated axiom with the sets that witness it.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct AxiomViolation {
    pub axiom: u8,
    #[serde(skip)]
    pub sets: Vec<StateSet>,
    pub detail: String,
}

/// Checks the axioms; returns every violated axiom with its first witness.
pub fn axioms_check(r: &CharacteristicRelation) -> Vec<AxiomViolation> {
    let n = r.len;
    let b = |bits: u64| &r.bounds[bits as usize];
    let set = |bits: u64| StateSet::from_bits(n, bits);
    let full = StateSet::full(n).bits();
    let mut found: [Option<AxiomViolation>; 7] = Default::default();

    'one: for a in 0..=full {
        for x in 0..n {
            let bigger = a | (1 << x);
            if bigger != a && b(a) > b(bigger) {
                found[0] = Some(AxiomViolation {
                    axiom: 1,
                    sets: vec![set(a), set(bigger)],
                    detail: format!("bound(A) = {} > bound(B) = {} with A ⊆ B", b(a), b(bigger)),
                });
                break 'one;
            }
        }
    }

    let one = Rational::one();
    for u in 0..=full {
        if found[2].is_some() && found[3].is_some() {
            break;
        }
        // Unordered splits of u into disjoint x, y = u ∖ x.
        let mut x = u;
        loop {
            let y = u & !x;
            if x >= y {
                let sum = b(x) + b(y);
                if found[2].is_none() && sum < one && *b(u) > sum {
                    found[2] = Some(AxiomViolation {
                        axiom: 3,
                        sets: vec![set(x), set(y)],
                        detail: format!("bound(X ∪ Y) = {} > bound(X) + bound(Y) = {sum}", b(u)),
                    });
                }
                let need = if sum > one { one.clone() } else { sum };
                if found[3].is_none() && *b(u) < need {
                    found[3] = Some(AxiomViolation {
                        axiom: 4,
                        sets: vec![set(x), set(y)],
                        detail: format!("bound(X ∪ Y) = {} < min(bound(X) + bound(Y), 1) = {need}", b(u)),
                    });
                }
            }
            if x == 0 {
                break;
            }
            x = (x - 1) & u;
        }
    }

    for a in 0..=full {
        let c = full & !a;
        let sum = b(a) + b(c);
        if sum > one {
            found[4] = Some(AxiomViolation {
                axiom: 5,
                sets: vec![set(a), set(c)],
                detail: format!("bound(A) + bound(S ∖ A) = {sum} > 1"),
            });
            break;
        }
    }

    if !b(0).is_zero() {
        found[5] = Some(AxiomViolation {
            axiom: 6,
            sets: vec![set(0)],
            detail: format!("bound(∅) = {}", b(0)),
        });
    }

    found.into_iter().flatten().collect()
}

/// `μ_R(A) = bound(A)`, checked for finite additivity. On failure returns a
/// disjoint pair `(X, Y)` with `bound(X ∪ Y) ≠ bound(X) + bound(Y)`.
pub fn mu_from_characteristic(r: &CharacteristicRelation) -> std::result::Result<Dist, (StateSet, StateSet)> {
    let n = r.len;
    if !r.bounds[0].is_zero() {
        let empty = StateSet::empty(n);
        return Err((empty, empty));
    }
    let weights: Vec<Rational> = (0..n).map(|i| r.bound(&StateSet::singleton(n, i)).clone()).collect();
    // Subsets in increasing bitmask order visit every proper subset first, so
    // the first failure splits as {lowest element} and the rest.
    for a in StateSet::all_subsets(n) {
        let sum: Rational = a.iter().map(|i| &weights[i]).sum();
        if sum != *r.bound(&a) {
            let lowest = a.iter().next().expect("nonempty");
            let x = StateSet::singleton(n, lowest);
            let mut y = a;
            y.remove(lowest);
            return Err((x, y));
        }
    }
    Ok(Dist::new(weights).expect("additive bounds within [0, 1] form a subprobability"))
}

/// `P(s) ⊢ R`: `bound_R(A) = sup_expectation(P, s, 1_A)` for all `A`.
/// Returns the first set where they differ.
pub fn satisfies_check(p: &EffectivityFn, s: usize, r: &CharacteristicRelation) -> Result<Option<StateSet>> {
    check_size(p.len())?;
    Error::check_len(p.len(), r.len)?;
    Ok(StateSet::all_subsets(p.len()).find(|a| p.sup_expectation(s, &a.indicator()) != *r.bound(a)))
}

/// `P(s) ⊨ μ`: `μ(A) = sup_expectation(P, s, 1_A)` for all `A`.
pub fn implements_check(p: &EffectivityFn, s: usize, mu: &Dist) -> Result<Option<StateSet>> {
    check_size(p.len())?;
    Error::check_len(p.len(), mu.len())?;
    Ok(StateSet::all_subsets(p.len()).find(|a| p.sup_expectation(s, &a.indicator()) != mu.eval(a).expect("same space")))
}

/// Outcome of the Kripke-generation decision at one state.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum StateVerdict {
    /// `P(s) = P_μ` for the recovered row.
    Kripke(Dist),
    /// The induced relation violates axioms.
    Axioms(Vec<AxiomViolation>),
    /// The axioms pass but the bounds are not additive.
    Additivity(StateSet, StateSet),
    /// The axioms pass and `μ_R` exists, but `P(s) ≠ P_{μ_R}`.
    NotGenerated(Dist),
}

impl StateVerdict {
    pub fn is_kripke(&self) -> bool {
        matches!(self, StateVerdict::Kripke(_))
    }

    pub fn stage(&self) -> &'static str {
        match self {
            StateVerdict::Kripke(_) => "kripke",
            StateVerdict::Axioms(_) => "axioms",
            StateVerdict::Additivity(..) => "additivity",
            StateVerdict::NotGenerated(_) => "equality",
        }
    }
}

/// Per-state verdicts and, when all states pass, the generating kernel.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KripkeReport {
    pub states: Vec<StateVerdict>,
    pub kernel: Option<Kernel>,
}

impl KripkeReport {
    pub fn first_failure(&self) -> Option<(usize, &StateVerdict)> {
        self.states.iter().enumerate().find(|(_, v)| !v.is_kripke())
    }
}

pub fn kripke_state(p: &EffectivityFn, s: usize) -> Result<StateVerdict> {
    let r = characteristic_from_eff(p, s)?;
    let violations = axioms_check(&r);
    if !violations.is_empty() {
        return Ok(StateVerdict::Axioms(violations));
    }
    let mu = match mu_from_characteristic(&r) {
        Ok(mu) => mu,
        Err((x, y)) => return Ok(StateVerdict::Additivity(x, y)),
    };
    if up_family_eq(p.generators(s), &[vec![mu.clone()]]) {
        Ok(StateVerdict::Kripke(mu))
    } else {
        Ok(StateVerdict::NotGenerated(mu))
    }
}

/// Decides whether `P = P_K` for some kernel `K` and recovers `K`.
pub fn kripke_generated(p: &EffectivityFn) -> Result<KripkeReport> {
    check_size(p.len())?;
    let states = (0..p.len()).map(|s| kripke_state(p, s)).collect::<Result<Vec<_>>>()?;
    let kernel = states
        .iter()
        .map(|v| match v {
            StateVerdict::Kripke(mu) => Some(mu.clone()),
            _ => None,
        })
        .collect::<Option<Vec<_>>>()
        .map(|rows| Kernel::new(rows).expect("rows over the same space"));
    Ok(KripkeReport { states, kernel })
}
