//! Finitely generated stochastic effectivity functions.
//!
//! `P(s)` is represented by a finite antichain of generators, each a finite
//! nonempty set of distributions. A portfolio `W` belongs to `P(s)` iff some
//! generator `M` satisfies `M ⊆ W`, so the family is upward closed by
//! construction. A Kripke-generated function has one singleton generator
//! `{K(s)}` per state.

use std::collections::BTreeSet;

use num_traits::{One, Signed};

use crate::kernels::Kernel;
use crate::num::Rational;
use crate::space::{Dist, StateSet};
use crate::{Error, Result};

/// A generator: a sorted set of distinct distributions.
pub type Generator = Vec<Dist>;

/// Strict (`>`) or weak (`≥`) comparison in a basis portfolio.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Relation {
    Strict,
    Weak,
}

/// The portfolio `β(A, ⋈ q) = {μ | μ(A) ⋈ q}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PortfolioTest {
    pub set: StateSet,
    pub rel: Relation,
    pub bound: Rational,
}

impl PortfolioTest {
    pub fn strict(set: StateSet, bound: Rational) -> Self {
        Self {
            set,
            rel: Relation::Strict,
            bound,
        }
    }

    pub fn weak(set: StateSet, bound: Rational) -> Self {
        Self {
            set,
            rel: Relation::Weak,
            bound,
        }
    }

    pub fn contains(&self, mu: &Dist) -> Result<bool> {
        let v = mu.eval(&self.set)?;
        Ok(match self.rel {
            Relation::Strict => v > self.bound,
            Relation::Weak => v >= self.bound,
        })
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct EffectivityFn {
    states: Vec<Vec<Generator>>,
}

impl EffectivityFn {
    /// Validates dimensions and reduces every state's generators to an
    /// antichain.
    pub fn new(states: Vec<Vec<Vec<Dist>>>) -> Result<Self> {
        let n = states.len();
        if n == 0 {
            return Err(Error::Model("effectivity function needs at least one state".into()));
        }
        let mut out = Vec::with_capacity(n);
        for (s, gens) in states.into_iter().enumerate() {
            if gens.is_empty() {
                return Err(Error::Model(format!("state {s} has no generators")));
            }
            let mut canon = Vec::with_capacity(gens.len());
            for g in gens {
                if g.is_empty() {
                    return Err(Error::Model(format!("state {s} has an empty generator")));
                }
                for mu in &g {
                    Error::check_len(n, mu.len())?;
                }
                canon.push(canonical_generator(g));
            }
            out.push(antichain(canon));
        }
        Ok(Self { states: out })
    }

    /// `P_K(s) = {W | K(s) ∈ W}`.
    pub fn from_kernel(k: &Kernel) -> Self {
        Self {
            states: k.rows().iter().map(|row| vec![vec![row.clone()]]).collect(),
        }
    }

    /// The Dirac effectivity function, `P(s) = {W | δ_s ∈ W}`.
    pub fn dirac(n: usize) -> Self {
        Self::from_kernel(&Kernel::identity(n))
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn generators(&self, s: usize) -> &[Generator] {
        &self.states[s]
    }

    /// `max_M min_{μ ∈ M} Σ_t w(t)·μ(t)`.
    pub fn sup_expectation(&self, s: usize, w: &[Rational]) -> Rational {
        self.states[s]
            .iter()
            .map(|g| {
                g.iter()
                    .map(|mu| mu.expectation(w))
                    .min()
                    .expect("generators are nonempty")
            })
            .max()
            .expect("states have generators")
    }

    /// `sup_expectation` against the indicator of `set`.
    pub fn bound(&self, s: usize, set: &StateSet) -> Result<Rational> {
        Error::check_len(self.len(), set.universe_len())?;
        Ok(self.sup_expectation(s, &set.indicator()))
    }

    /// Whether `β(A, ⋈ q) ∈ P(s)`.
    pub fn holds(&self, s: usize, test: &PortfolioTest) -> Result<bool> {
        let v = self.bound(s, &test.set)?;
        Ok(match test.rel {
            Relation::Strict => v > test.bound,
            Relation::Weak => v >= test.bound,
        })
    }

    /// Whether an arbitrary finite portfolio belongs to `P(s)`.
    pub fn contains_portfolio(&self, s: usize, portfolio: &BTreeSet<Dist>) -> bool {
        self.states[s].iter().any(|g| g.iter().all(|mu| portfolio.contains(mu)))
    }

    /// The kernel this function is generated by, when every state has a
    /// single singleton generator.
    pub fn as_kernel(&self) -> Option<Kernel> {
        let rows = self
            .states
            .iter()
            .map(|gens| match gens.as_slice() {
                [g] if g.len() == 1 => Some(g[0].clone()),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Kernel::new(rows).expect("validated on construction"))
    }

    /// Generators of `P(s)` pushed forward along `map` into a space of
    /// `target_len` states, as an antichain.
    pub fn pushforward(&self, s: usize, map: &[usize], target_len: usize) -> Vec<Generator> {
        let gens = self.states[s]
            .iter()
            .map(|g| canonical_generator(g.iter().map(|mu| mu.pushforward(map, target_len)).collect()))
            .collect();
        antichain(gens)
    }
}

fn canonical_generator(mut g: Vec<Dist>) -> Generator {
    g.sort();
    g.dedup();
    g
}

fn is_subset(a: &Generator, b: &Generator) -> bool {
    a.iter().all(|mu| b.binary_search(mu).is_ok())
}

fn antichain(mut gens: Vec<Generator>) -> Vec<Generator> {
    gens.sort();
    gens.dedup();
    let keep: Vec<bool> = gens
        .iter()
        .enumerate()
        .map(|(i, g)| !gens.iter().enumerate().any(|(j, h)| i != j && h.len() < g.len() && is_subset(h, g)))
        .collect();
    gens.into_iter().zip(keep).filter(|(_, k)| *k).map(|(g, _)| g).collect()
}

/// Equality of the upward-closed families generated by two generator lists:
/// every generator of one side contains some generator of the other.
pub fn up_family_eq(a: &[Generator], b: &[Generator]) -> bool {
    let covered = |x: &[Generator], y: &[Generator]| x.iter().all(|g| y.iter().any(|h| is_subset(h, g)));
    covered(a, b) && covered(b, a)
}

/// Checks `W ∈ Q(f(s)) ⇔ (Sf)^{-1}(W) ∈ P(s)` for all `s` and `W`.
///
/// Returns the first state where the families differ.
pub fn eff_morphism_check(f: &[usize], p: &EffectivityFn, q: &EffectivityFn) -> Result<Option<usize>> {
    check_map(f, p.len(), q.len())?;
    Ok((0..p.len()).find(|&s| !up_family_eq(&p.pushforward(s, f, q.len()), q.generators(f[s]))))
}

/// Checks `L(f(s))(B) = K(s)(f^{-1}(B))` for all `s` and `B`.
///
/// Singletons suffice; the witness is `(s, t)` with `B = {t}`.
pub fn kernel_morphism_check(f: &[usize], k: &Kernel, l: &Kernel) -> Result<Option<(usize, usize)>> {
    check_map(f, k.len(), l.len())?;
    for s in 0..k.len() {
        let image = k.row(s).pushforward(f, l.len());
        if let Some(t) = (0..l.len()).find(|&t| image.weight(t) != l.entry(f[s], t)) {
            return Ok(Some((s, t)));
        }
    }
    Ok(None)
}

pub(crate) fn check_map(f: &[usize], from: usize, to: usize) -> Result<()> {
    Error::check_len(from, f.len())?;
    if let Some(&bad) = f.iter().find(|&&t| t >= to) {
        return Err(Error::InvalidValue(format!("map target {bad} outside a space of {to} states")));
    }
    Ok(())
}

/// Checks the value range a weight function must have for
/// [`EffectivityFn::sup_expectation`].
pub fn check_weights(w: &[Rational]) -> Result<()> {
    match w.iter().find(|x| x.is_negative() || **x > Rational::one()) {
        Some(x) => Err(Error::InvalidValue(format!("weight {x} outside [0, 1]"))),
        None => Ok(()),
    }
}
