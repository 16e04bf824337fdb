//! Game models and the game/formula evaluator.
//!
//! Games are evaluated to [`Profile`]s:
//!
//! - an atomic game `γ` (primitive, `eps` or a test) at target `A` gives
//!   `[0, t)` with `t = sup_expectation(P_γ, s, 1_A)`;
//! - `g^d` at `A` is the complement of `g` at `S ∖ A`;
//! - `g1 | g2` combines the two profiles with [`Profile::choice`];
//! - `γ;σ` composes `P_γ` with the profile of `σ` ([`compose_prefix`]);
//! - `g*;σ` folds the profiles of `g^n;σ` for `n = 0, 1, …`;
//! - demonic operators and composite prefixes follow the head normal form
//!   identities (`g1 & g2 = (g1^d | g2^d)^d`, `g^d;σ = (g;σ^d)^d`, …).
//!
//! Iterations are cut off after a configurable number of terms unless the
//! result is decided earlier. For bodies without duals or demonic operators
//! one round is dominated by a kernel ([`round_bound`]); its closure bounds
//! the cut-off tail and certifies states whose remaining terms are empty.
//! Every profile cell carries a certified lower and upper bound, so formulas
//! come out three-valued: holds, fails, or undecided at the cutoff.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::effectivity::{eff_morphism_check, EffectivityFn};
use crate::kernels::{convolve, kernel_sum, star_closure, test_kernel, ExtKernel, ExtValue, Kernel};
use crate::profiles::{compose_prefix, down_interval, Cell, IntervalSet, Profile, StarFold, Verdict};
use crate::space::{StateSet, StateSpace};
use crate::syntax::{Formula, GameExpr};
use crate::{Error, Rational, Result};

pub const DEFAULT_STAR_DEPTH: usize = 50;

/// Interpretation of a primitive game.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Interpretation {
    Kripke(Kernel),
    Effectivity(EffectivityFn),
}

impl Interpretation {
    pub fn len(&self) -> usize {
        match self {
            Interpretation::Kripke(k) => k.len(),
            Interpretation::Effectivity(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn effectivity(&self) -> EffectivityFn {
        match self {
            Interpretation::Kripke(k) => EffectivityFn::from_kernel(k),
            Interpretation::Effectivity(p) => p.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GameModel {
    space: StateSpace,
    games: BTreeMap<String, Interpretation>,
    lifted: BTreeMap<String, EffectivityFn>,
    atoms: BTreeMap<String, StateSet>,
    dirac: EffectivityFn,
}

const RESERVED: [&str; 2] = ["eps", "true"];

fn check_name(name: &str) -> Result<()> {
    let mut chars = name.chars();
    let ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
    if !ok || RESERVED.contains(&name) {
        return Err(Error::Model(format!("`{name}` is not a usable identifier")));
    }
    Ok(())
}

impl GameModel {
    pub fn new(
        space: StateSpace,
        games: BTreeMap<String, Interpretation>,
        atoms: BTreeMap<String, StateSet>,
    ) -> Result<Self> {
        let n = space.len();
        for (name, interp) in &games {
            check_name(name)?;
            Error::check_len(n, interp.len())?;
        }
        for (name, set) in &atoms {
            check_name(name)?;
            Error::check_len(n, set.universe_len())?;
        }
        let lifted = games.iter().map(|(k, v)| (k.clone(), v.effectivity())).collect();
        Ok(Self {
            space,
            games,
            lifted,
            atoms,
            dirac: EffectivityFn::dirac(n),
        })
    }

    /// A model whose primitives are all interpreted by kernels.
    pub fn kripke(
        space: StateSpace,
        kernels: BTreeMap<String, Kernel>,
        atoms: BTreeMap<String, StateSet>,
    ) -> Result<Self> {
        let games = kernels.into_iter().map(|(k, v)| (k, Interpretation::Kripke(v))).collect();
        Self::new(space, games, atoms)
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn games(&self) -> &BTreeMap<String, Interpretation> {
        &self.games
    }

    pub fn atoms(&self) -> &BTreeMap<String, StateSet> {
        &self.atoms
    }

    pub fn game(&self, name: &str) -> Result<&Interpretation> {
        self.games.get(name).ok_or_else(|| Error::UnknownGame(name.into()))
    }

    pub fn effectivity(&self, name: &str) -> Result<&EffectivityFn> {
        self.lifted.get(name).ok_or_else(|| Error::UnknownGame(name.into()))
    }

    pub fn atom(&self, name: &str) -> Result<&StateSet> {
        self.atoms.get(name).ok_or_else(|| Error::UnknownAtom(name.into()))
    }

    /// True when every primitive is Kripke-generated.
    pub fn is_kripke(&self) -> bool {
        self.lifted.values().all(|p| p.as_kernel().is_some())
    }

    pub fn kernel(&self, name: &str) -> Result<Kernel> {
        self.effectivity(name)?
            .as_kernel()
            .ok_or_else(|| Error::Unsupported(format!("primitive `{name}` is not Kripke-generated")))
    }
}

/// Three-valued extension of a formula.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FormulaValue {
    pub holds: StateSet,
    pub undecided: StateSet,
}

impl FormulaValue {
    pub fn exact(set: StateSet) -> Self {
        Self {
            holds: set,
            undecided: StateSet::empty(set.universe_len()),
        }
    }

    pub fn is_decided(&self) -> bool {
        self.undecided.is_empty()
    }

    /// Largest set the true extension may be.
    pub fn upper(&self) -> StateSet {
        self.holds.union_unchecked(&self.undecided)
    }

    pub fn verdict(&self, s: usize) -> Verdict {
        if self.holds.contains(s) {
            Verdict::Holds
        } else if self.undecided.contains(s) {
            Verdict::Undecided
        } else {
            Verdict::Fails
        }
    }

    /// The decided extension, or an error naming the star depth.
    pub fn decided(&self, cap: usize) -> Result<StateSet> {
        if self.is_decided() {
            Ok(self.holds)
        } else {
            Err(Error::Undecided(format!(
                "{} state(s) undecided at star depth {cap}",
                self.undecided.count()
            )))
        }
    }
}

/// One-step effectivity of an atomic game, with bounds for tests whose
/// formula is undecided.
enum Step<'a> {
    Fixed(&'a EffectivityFn),
    Bounded { lower: EffectivityFn, upper: EffectivityFn },
}

/// Profiles of one game towards a target `A` and towards `S ∖ A`.
///
/// Duals exchange the two sides, so a continuation needs both.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct Pair {
    on: Profile,
    off: Profile,
}

impl Pair {
    /// The same pair for the dual game.
    fn dual(&self) -> Pair {
        Pair {
            on: self.off.complement(),
            off: self.on.complement(),
        }
    }

    fn choice(&self, other: &Pair) -> Pair {
        Pair {
            on: self.on.choice(&other.on),
            off: self.off.choice(&other.off),
        }
    }
}

/// Memoizing evaluator for one model.
///
/// A game is evaluated compositionally: `g;σ` applies `g` to the profile
/// pair of `σ`, and the implicit continuation at the end of a game is the
/// profile of `eps`. This agrees with evaluating the head normal form.
pub struct Evaluator<'m> {
    model: &'m GameModel,
    cap: usize,
    games: HashMap<(GameExpr, StateSet), Pair>,
    applied: HashMap<(GameExpr, Pair), Pair>,
    formulas: HashMap<Formula, FormulaValue>,
    closures: HashMap<GameExpr, Option<ExtKernel>>,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m GameModel) -> Self {
        Self::with_star_depth(model, DEFAULT_STAR_DEPTH)
    }

    pub fn with_star_depth(model: &'m GameModel, cap: usize) -> Self {
        Self {
            model,
            cap: cap.max(1),
            games: HashMap::new(),
            applied: HashMap::new(),
            formulas: HashMap::new(),
            closures: HashMap::new(),
        }
    }

    pub fn model(&self) -> &'m GameModel {
        self.model
    }

    pub fn star_depth(&self) -> usize {
        self.cap
    }

    /// The profile of `game` towards `target`.
    pub fn game(&mut self, game: &GameExpr, target: &StateSet) -> Result<Profile> {
        Error::check_len(self.model.len(), target.universe_len())?;
        Ok(self.closed(game, target)?.on)
    }

    fn closed(&mut self, game: &GameExpr, target: &StateSet) -> Result<Pair> {
        let key = (game.clone(), *target);
        if let Some(p) = self.games.get(&key) {
            return Ok(p.clone());
        }
        use GameExpr::*;
        let pair = match game {
            Prim(_) | Eps | TestPos(_) | TestNeg(_) | StarA(_) => {
                let end = eps_pair(target);
                self.apply(game, &end)?
            }
            Dual(x) => self.closed(x, target)?.dual(),
            ChoiceA(a, b) => self.closed(a, target)?.choice(&self.closed(b, target)?),
            ChoiceD(a, b) => {
                let pa = self.closed(a, target)?.dual();
                let pb = self.closed(b, target)?.dual();
                pa.choice(&pb).dual()
            }
            StarD(x) => {
                let end = eps_pair(target);
                self.star(&GameExpr::dual(x.as_ref().clone()), &end)?.dual()
            }
            Seq(a, b) => {
                let rest = self.closed(b, target)?;
                self.apply(a, &rest)?
            }
        };
        self.games.insert(key, pair.clone());
        Ok(pair)
    }

    /// The profile pair of `game;σ` given the pair of `σ`.
    fn apply(&mut self, game: &GameExpr, rest: &Pair) -> Result<Pair> {
        let key = (game.clone(), rest.clone());
        if let Some(p) = self.applied.get(&key) {
            return Ok(p.clone());
        }
        use GameExpr::*;
        let pair = match game {
            Prim(_) | Eps | TestPos(_) | TestNeg(_) => {
                let step = self.step(game)?;
                Pair {
                    on: prefix(&step, &rest.on)?,
                    off: prefix(&step, &rest.off)?,
                }
            }
            Dual(x) => self.apply(x, &rest.dual())?.dual(),
            ChoiceA(a, b) => self.apply(a, rest)?.choice(&self.apply(b, rest)?),
            ChoiceD(a, b) => {
                let pa = self.apply(a, rest)?.dual();
                let pb = self.apply(b, rest)?.dual();
                pa.choice(&pb).dual()
            }
            StarA(x) => self.star(x, rest)?,
            StarD(x) => self.star(&GameExpr::dual(x.as_ref().clone()), &rest.dual())?.dual(),
            Seq(a, b) => {
                let inner = self.apply(b, rest)?;
                self.apply(a, &inner)?
            }
        };
        self.applied.insert(key, pair.clone());
        Ok(pair)
    }

    /// The three-valued extension of `phi`.
    pub fn formula(&mut self, phi: &Formula) -> Result<FormulaValue> {
        if let Some(v) = self.formulas.get(phi) {
            return Ok(v.clone());
        }
        let n = self.model.len();
        let value = match phi {
            Formula::Top => FormulaValue::exact(StateSet::full(n)),
            Formula::Atom(p) => FormulaValue::exact(*self.model.atom(p)?),
            Formula::And(a, b) => {
                let va = self.formula(a)?;
                let vb = self.formula(b)?;
                let holds = va.holds.intersection_unchecked(&vb.holds);
                let upper = va.upper().intersection_unchecked(&vb.upper());
                FormulaValue {
                    holds,
                    undecided: upper.difference(&holds)?,
                }
            }
            Formula::Diamond(game, q, body) => {
                let inner = self.formula(body)?;
                let lower = self.game(game, &inner.holds)?;
                let upper = if inner.is_decided() {
                    lower.clone()
                } else {
                    self.game(game, &inner.upper())?
                };
                let mut holds = StateSet::empty(n);
                let mut undecided = StateSet::empty(n);
                for s in 0..n {
                    if lower.cell(s).lower.member(q) {
                        holds.insert(s);
                    } else if upper.cell(s).upper.member(q) {
                        undecided.insert(s);
                    }
                }
                FormulaValue { holds, undecided }
            }
        };
        self.formulas.insert(phi.clone(), value.clone());
        Ok(value)
    }

    fn step(&mut self, atom: &GameExpr) -> Result<Step<'m>> {
        let model = self.model;
        Ok(match atom {
            GameExpr::Prim(name) => Step::Fixed(model.effectivity(name)?),
            GameExpr::Eps => Step::Fixed(&model.dirac),
            GameExpr::TestPos(phi) | GameExpr::TestNeg(phi) => {
                let v = self.formula(phi)?;
                let positive = matches!(atom, GameExpr::TestPos(_));
                let (lo, hi) = if positive {
                    (test_kernel(&v.holds, true), test_kernel(&v.upper(), true))
                } else {
                    (test_kernel(&v.upper(), false), test_kernel(&v.holds, false))
                };
                Step::Bounded {
                    lower: EffectivityFn::from_kernel(&lo),
                    upper: EffectivityFn::from_kernel(&hi),
                }
            }
            other => return Err(Error::Invariant(format!("`{other}` is not atomic"))),
        })
    }

    /// `body*;σ`: folds the profiles of `body^n;σ`, `n = 0, 1, …`, on both
    /// sides.
    fn star(&mut self, body: &GameExpr, rest: &Pair) -> Result<Pair> {
        let closure = self.round_closure(body)?;
        let mut on = StarSide::new(self.model.len());
        let mut off = StarSide::new(self.model.len());
        let mut term = rest.clone();
        for _ in 0..self.cap {
            on.push(&term.on, closure.as_ref());
            off.push(&term.off, closure.as_ref());
            if on.done && off.done {
                break;
            }
            term = self.apply(body, &term)?;
        }
        let tail = |p: &Profile| closure.as_ref().map(|c| tail_bound(c, p));
        Ok(Pair {
            on: on.finish(self.cap, tail(&term.on).as_deref()),
            off: off.finish(self.cap, tail(&term.off).as_deref()),
        })
    }

    /// `Σ_n U^n` for the round bound `U` of an angelic body.
    fn round_closure(&mut self, body: &GameExpr) -> Result<Option<ExtKernel>> {
        if let Some(c) = self.closures.get(body) {
            return Ok(c.clone());
        }
        let c = if angelic_shape(body) {
            Some(round_bound(self.model, body)?.star()?)
        } else {
            None
        };
        self.closures.insert(body.clone(), c.clone());
        Ok(c)
    }
}

/// Kernel `U` dominating one round of an angelic game: the cell of `g;σ` at
/// `s` has Lebesgue measure at most `Σ_t U(s, t)·λ(σ_t)`, and is empty when
/// `σ` is empty on the support of `U(s)`.
///
/// Primitives use the entrywise maximum over all measures in all generators,
/// which dominates `sup_expectation`; tests are bounded by the identity.
pub fn round_bound(model: &GameModel, g: &GameExpr) -> Result<ExtKernel> {
    use GameExpr::*;
    let n = model.len();
    match g {
        Prim(name) => {
            let p = model.effectivity(name)?;
            let entries = (0..n)
                .map(|s| {
                    (0..n)
                        .map(|t| {
                            let top = p.generators(s).iter().flatten().map(|mu| mu.weight(t)).max();
                            ExtValue::Finite(top.cloned().unwrap_or_else(crate::num::zero))
                        })
                        .collect()
                })
                .collect();
            ExtKernel::new(entries)
        }
        Eps | TestPos(_) | TestNeg(_) => Ok(ExtKernel::identity(n)),
        ChoiceA(a, b) => kernel_sum(&round_bound(model, a)?, &round_bound(model, b)?),
        Seq(a, b) => convolve(&round_bound(model, a)?, &round_bound(model, b)?),
        StarA(x) => round_bound(model, x)?.star(),
        Dual(_) | ChoiceD(..) | StarD(_) => Err(Error::Unsupported(format!("`{g}` is not angelic"))),
    }
}

/// `Σ_t C(s, t)·λ(upper_t)` for every state `s`.
fn tail_bound(closure: &ExtKernel, next: &Profile) -> Vec<ExtValue> {
    let n = next.len();
    (0..n)
        .map(|s| {
            (0..n).fold(ExtValue::zero(), |acc, t| {
                &acc + &(closure.entry(s, t) * &ExtValue::Finite(next.cell(t).upper.lebesgue()))
            })
        })
        .collect()
}

/// Star folds for every state on one side of a pair.
struct StarSide {
    lower: Vec<StarFold>,
    upper: Vec<StarFold>,
    /// States whose remaining terms are certainly empty.
    frozen: Vec<bool>,
    done: bool,
}

impl StarSide {
    fn new(n: usize) -> Self {
        Self {
            lower: vec![StarFold::new(); n],
            upper: vec![StarFold::new(); n],
            frozen: vec![false; n],
            done: false,
        }
    }

    /// `reach` is the round closure of an angelic body: such a body keeps a
    /// continuation that is empty on everything reachable from `s` empty at
    /// `s`, so later terms add nothing there.
    fn push(&mut self, p: &Profile, reach: Option<&ExtKernel>) {
        if self.done {
            return;
        }
        let n = self.frozen.len();
        for (s, cell) in p.cells().iter().enumerate() {
            if self.frozen[s] {
                continue;
            }
            self.lower[s].push(&cell.lower);
            self.upper[s].push(&cell.upper);
            if let Some(c) = reach {
                self.frozen[s] = (0..n).all(|t| c.entry(s, t).is_zero() || p.cell(t).upper.is_empty());
            }
        }
        self.done = (0..n).all(|s| self.frozen[s] || (self.lower[s].is_decided() && self.upper[s].is_decided()));
    }

    /// `tail[s]` bounds the total measure of the terms not pushed.
    fn finish(&self, cap: usize, tail: Option<&[ExtValue]>) -> Profile {
        let cells = (0..self.frozen.len())
            .map(|s| {
                let (lo, hi) = (&self.lower[s], &self.upper[s]);
                if self.done || self.frozen[s] {
                    return Cell {
                        lower: lo.finish_exact(),
                        upper: hi.finish_exact(),
                    };
                }
                let upper = if hi.is_decided() {
                    hi.finish_exact()
                } else {
                    match tail.and_then(|t| t[s].finite()).map(|t| t + hi.partial_sum()) {
                        Some(t) if t < crate::num::one() => down_interval(&t, true).expect("t < 1"),
                        _ => IntervalSet::full(),
                    }
                };
                Cell {
                    lower: lo.finish_truncated(),
                    upper,
                }
            })
            .collect();
        let profile = Profile::new(cells, 0);
        if profile.is_exact() {
            profile
        } else {
            profile.with_cap(cap)
        }
    }
}

fn eps_pair(target: &StateSet) -> Pair {
    let below_one = down_interval(&crate::num::one(), false).expect("1 is in range");
    let cells = |set: &StateSet| {
        let n = set.universe_len();
        Profile::exact(
            (0..n)
                .map(|s| if set.contains(s) { below_one.clone() } else { IntervalSet::empty() })
                .collect(),
        )
    };
    Pair {
        on: cells(target),
        off: cells(&target.complement()),
    }
}

/// True when `g` has no dual or demonic operator outside of tests. For such
/// games an identically empty target profile stays empty under prefixing.
fn angelic_shape(g: &GameExpr) -> bool {
    use GameExpr::*;
    match g {
        Prim(_) | Eps | TestPos(_) | TestNeg(_) => true,
        Dual(_) | ChoiceD(..) | StarD(_) => false,
        StarA(x) => angelic_shape(x),
        ChoiceA(a, b) | Seq(a, b) => angelic_shape(a) && angelic_shape(b),
    }
}

fn prefix(step: &Step<'_>, rest: &Profile) -> Result<Profile> {
    match step {
        Step::Fixed(p) => compose_prefix(p, rest),
        Step::Bounded { lower, upper } => {
            let lo = compose_prefix(lower, rest)?;
            let hi = compose_prefix(upper, rest)?;
            let cells = lo
                .cells()
                .iter()
                .zip(hi.cells())
                .map(|(a, b)| Cell {
                    lower: a.lower.clone(),
                    upper: b.upper.clone(),
                })
                .collect();
            Ok(Profile::new(cells, 0).with_cap(rest_cap(rest)))
        }
    }
}

fn rest_cap(p: &Profile) -> usize {
    (0..p.len())
        .filter_map(|s| match p.status(s) {
            crate::profiles::CellStatus::Truncated(n) => Some(n),
            crate::profiles::CellStatus::Exact => None,
        })
        .max()
        .unwrap_or(0)
}

/// `eval_game` with the default star depth.
pub fn eval_game(model: &GameModel, game: &GameExpr, target: &StateSet) -> Result<Profile> {
    Evaluator::new(model).game(game, target)
}

/// `eval_formula` with the default star depth.
pub fn eval_formula(model: &GameModel, phi: &Formula) -> Result<FormulaValue> {
    Evaluator::new(model).formula(phi)
}

/// Why a state map fails to be a model morphism.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MorphismFailure {
    MissingAtom { atom: String },
    MissingGame { game: String },
    Atom { atom: String },
    Game { game: String, state: String },
}

/// Checks that `f: S1 → S2` is a model morphism: `f^{-1}(W_p) = V_p` for all
/// atoms and `f` is a morphism of effectivity functions for every primitive.
pub fn model_morphism_check(f: &[usize], m1: &GameModel, m2: &GameModel) -> Result<Option<MorphismFailure>> {
    crate::effectivity::check_map(f, m1.len(), m2.len())?;
    for name in m1.atoms.keys().chain(m2.atoms.keys()) {
        let (Some(v), Some(w)) = (m1.atoms.get(name), m2.atoms.get(name)) else {
            return Ok(Some(MorphismFailure::MissingAtom { atom: name.clone() }));
        };
        let preimage = StateSet::from_indices(m1.len(), (0..m1.len()).filter(|&s| w.contains(f[s])));
        if preimage != *v {
            return Ok(Some(MorphismFailure::Atom { atom: name.clone() }));
        }
    }
    for name in m1.lifted.keys().chain(m2.lifted.keys()) {
        let (Some(p), Some(q)) = (m1.lifted.get(name), m2.lifted.get(name)) else {
            return Ok(Some(MorphismFailure::MissingGame { game: name.clone() }));
        };
        if let Some(s) = eff_morphism_check(f, p, q)? {
            return Ok(Some(MorphismFailure::Game {
                game: name.clone(),
                state: m1.space.name(s).to_string(),
            }));
        }
    }
    Ok(None)
}

/// The extended kernel `K_τ` of a program: `K_{τ1|τ2} = K_{τ1} + K_{τ2}`,
/// `K_{τ1;τ2} = K_{τ1} ⋆ K_{τ2}`, `K_{τ*} = Σ_n K_τ^n`. Test formulas are
/// evaluated with the game evaluator and must be decided.
pub fn pdl_kernel(model: &GameModel, program: &GameExpr) -> Result<ExtKernel> {
    let mut eval = Evaluator::new(model);
    program_kernel(model, program, &mut |phi| {
        let cap = eval.star_depth();
        eval.formula(phi)?.decided(cap)
    })
}

fn program_kernel(
    model: &GameModel,
    program: &GameExpr,
    tests: &mut dyn FnMut(&Formula) -> Result<StateSet>,
) -> Result<ExtKernel> {
    use GameExpr::*;
    match program {
        Prim(name) => Ok(model.kernel(name)?.to_ext()),
        Eps => Ok(ExtKernel::identity(model.len())),
        TestPos(phi) => Ok(test_kernel(&tests(phi)?, true).to_ext()),
        TestNeg(phi) => Ok(test_kernel(&tests(phi)?, false).to_ext()),
        ChoiceA(a, b) => kernel_sum(&program_kernel(model, a, tests)?, &program_kernel(model, b, tests)?),
        Seq(a, b) => convolve(&program_kernel(model, a, tests)?, &program_kernel(model, b, tests)?),
        StarA(g) => {
            let k = program_kernel(model, g, tests)?;
            match k.to_kernel() {
                Some(sub) => star_closure(&sub),
                None => k.star(),
            }
        }
        Dual(_) | ChoiceD(..) | StarD(_) => Err(Error::Unsupported(format!(
            "`{program}` uses a dual or demonic operator"
        ))),
    }
}

fn above(model: &GameModel, k: &ExtKernel, target: &StateSet, q: &Rational) -> Result<StateSet> {
    Error::check_len(model.len(), target.universe_len())?;
    let mut out = StateSet::empty(model.len());
    for s in 0..model.len() {
        if k.eval(s, target)?.exceeds(q) {
            out.insert(s);
        }
    }
    Ok(out)
}

/// `{s | K_τ(s)(A) > q}`.
pub fn kripke_fast_eval(model: &GameModel, program: &GameExpr, target: &StateSet, q: &Rational) -> Result<StateSet> {
    above(model, &pdl_kernel(model, program)?, target, q)
}

/// Evaluates a formula whose games are all programs over kernels using
/// program kernels throughout, tests included.
pub fn kripke_fast_formula(model: &GameModel, phi: &Formula) -> Result<StateSet> {
    let n = model.len();
    Ok(match phi {
        Formula::Top => StateSet::full(n),
        Formula::Atom(p) => *model.atom(p)?,
        Formula::And(a, b) => kripke_fast_formula(model, a)?.intersection(&kripke_fast_formula(model, b)?)?,
        Formula::Diamond(g, q, body) => {
            let target = kripke_fast_formula(model, body)?;
            let k = program_kernel(model, g, &mut |psi| kripke_fast_formula(model, psi))?;
            above(model, &k, &target, q)?
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, rat};
    use crate::profiles::CellStatus;
    use crate::syntax::{parse_formula, parse_game};

    fn two_state() -> GameModel {
        let space = StateSpace::new(["s0", "s1"]).unwrap();
        let a = Kernel::from_matrix(vec![vec![rat(1, 2), rat(1, 3)], vec![int(0), int(1)]]).unwrap();
        let b = Kernel::from_matrix(vec![vec![int(0), int(1)], vec![rat(1, 4), int(0)]]).unwrap();
        let kernels = BTreeMap::from([("a".to_string(), a), ("b".to_string(), b)]);
        let atoms = BTreeMap::from([("p".to_string(), space.set_from_names(["s0"]).unwrap())]);
        GameModel::kripke(space, kernels, atoms).unwrap()
    }

    fn profile(m: &GameModel, g: &str, target: &[&str]) -> Profile {
        let set = m.space().set_from_names(target.iter().copied()).unwrap();
        eval_game(m, &parse_game(g).unwrap(), &set).unwrap()
    }

    fn holds(m: &GameModel, phi: &str) -> Vec<String> {
        let v = eval_formula(m, &parse_formula(phi).unwrap()).unwrap();
        assert!(v.is_decided());
        m.space().set_names(&v.holds)
    }

    #[test]
    fn eps_profile() {
        let m = two_state();
        let p = profile(&m, "eps", &["s0"]);
        assert_eq!(*p.set(0), down_interval(&int(1), false).unwrap());
        assert!(p.set(1).is_empty());
        assert_eq!(holds(&m, "<eps>{1/2} p"), ["s0"]);
    }

    #[test]
    fn primitive_and_dual_profiles() {
        let m = two_state();
        let p = profile(&m, "a", &["s0"]);
        assert_eq!(*p.set(0), down_interval(&rat(1, 2), false).unwrap());
        let d = profile(&m, "a^d", &["s0"]);
        // K_a(s0)(S∖A) = 1/3, so the dual profile at s0 is [1/3, 1].
        assert_eq!(*d.set(0), down_interval(&rat(1, 3), false).unwrap().complement());
    }

    #[test]
    fn sequential_composition_is_convolution() {
        let m = two_state();
        let p = profile(&m, "a;b", &["s1"]);
        // (K_a ⋆ K_b)(s0)(s1) = 1/2·1 + 1/3·0.
        assert_eq!(*p.set(0), down_interval(&rat(1, 2), false).unwrap());
        assert_eq!(*p.set(1), IntervalSet::empty());
    }

    #[test]
    fn star_of_half_loop() {
        let space = StateSpace::new(["s0"]).unwrap();
        let a = Kernel::from_matrix(vec![vec![rat(1, 2)]]).unwrap();
        let m = GameModel::kripke(space, BTreeMap::from([("a".into(), a)]), BTreeMap::new()).unwrap();
        let p = profile(&m, "a*", &["s0"]);
        assert_eq!(p.status(0), CellStatus::Exact);
        assert!(p.set(0).is_full());
        let s0 = StateSet::full(1);
        assert_eq!(
            kripke_fast_eval(&m, &parse_game("a*").unwrap(), &s0, &rat(9, 10)).unwrap(),
            s0
        );
    }

    #[test]
    fn truncated_star_is_flagged() {
        let space = StateSpace::new(["s0", "s1"]).unwrap();
        let a = Kernel::from_matrix(vec![vec![rat(1, 2), int(0)], vec![int(0), int(0)]]).unwrap();
        let m = GameModel::kripke(space, BTreeMap::from([("a".into(), a)]), BTreeMap::new()).unwrap();
        // Terms a^n at {s0} are [0, 2^{-n}), never empty; partial sums of
        // complement infima approach 2 but with infinitely many terms.
        let mut ev = Evaluator::with_star_depth(&m, 5);
        let p = ev.game(&parse_game("(a^d)*").unwrap(), &StateSet::singleton(2, 1)).unwrap();
        assert!((0..2).all(|s| p.set(s).is_down_set()));
    }

    #[test]
    fn test_law_example() {
        let m = two_state();
        let lhs = holds(&m, "<[p]?;a>{1/4} p");
        let rhs = holds(&m, "p /\\ <a>{1/4} p");
        assert_eq!(lhs, rhs);
        assert_eq!(holds(&m, "<[p]!;b>{0} true"), ["s1"]);
    }

    #[test]
    fn morphism_identity_and_atom_break() {
        let m = two_state();
        assert_eq!(model_morphism_check(&[0, 1], &m, &m).unwrap(), None);
        let mut atoms = m.atoms().clone();
        atoms.insert("p".into(), StateSet::full(2));
        let broken = GameModel::new(m.space().clone(), m.games().clone(), atoms).unwrap();
        assert_eq!(
            model_morphism_check(&[0, 1], &m, &broken).unwrap(),
            Some(MorphismFailure::Atom { atom: "p".into() })
        );
    }

    #[test]
    fn pdl_kernel_examples() {
        let space = StateSpace::new(["s0"]).unwrap();
        let a = Kernel::from_matrix(vec![vec![rat(1, 2)]]).unwrap();
        let m = GameModel::kripke(space, BTreeMap::from([("a".into(), a)]), BTreeMap::new()).unwrap();
        let k = |t: &str| pdl_kernel(&m, &parse_game(t).unwrap()).unwrap();
        assert_eq!(k("eps"), ExtKernel::identity(1));
        assert_eq!(k("a;a").entry(0, 0).finite(), Some(&rat(1, 4)));
        assert_eq!(k("a*").entry(0, 0).finite(), Some(&int(2)));
        assert!(matches!(pdl_kernel(&m, &parse_game("a^d").unwrap()), Err(Error::Unsupported(_))));
    }

    /// Term-rewriting evaluation through head normal forms, unrolling stars
    /// into `g^n;σ` terms.
    fn reference(ev: &mut Evaluator, g: &GameExpr, target: &StateSet) -> Profile {
        use crate::syntax::normalize_head;
        let n = target.universe_len();
        match normalize_head(g) {
            head @ (GameExpr::Prim(_) | GameExpr::Eps | GameExpr::TestPos(_) | GameExpr::TestNeg(_)) => {
                let step = ev.step(&head).unwrap();
                prefix(&step, &eps_pair(target).on).unwrap()
            }
            GameExpr::Dual(x) => reference(ev, &x, &target.complement()).complement(),
            GameExpr::ChoiceA(a, b) => reference(ev, &a, target).choice(&reference(ev, &b, target)),
            GameExpr::Seq(first, tail) => match *first {
                GameExpr::StarA(body) => {
                    let closure = ev.round_closure(&body).unwrap();
                    let mut side = StarSide::new(n);
                    let mut term = *tail;
                    for _ in 0..ev.cap {
                        side.push(&reference(ev, &term, target), closure.as_ref());
                        if side.done {
                            break;
                        }
                        term = GameExpr::seq(body.as_ref().clone(), term);
                    }
                    let next = closure.as_ref().map(|c| tail_bound(c, &reference(ev, &term, target)));
                    side.finish(ev.cap, next.as_deref())
                }
                atom => {
                    let rest = reference(ev, &tail, target);
                    let step = ev.step(&atom).unwrap();
                    prefix(&step, &rest).unwrap()
                }
            },
            other => panic!("not a head normal form: {other}"),
        }
    }

    #[test]
    fn compositional_matches_head_normal_forms() {
        let m = two_state();
        let games = [
            "a", "a^d", "a;b", "(a | b)^d;a", "a & b;b^d", "a*", "(a^d)*", "a#;b", "(a;b^d)*;a",
            "([p]? ; a)* | b#", "(a* | b^d)^d", "eps^d", "[p]!;(a & eps)",
        ];
        for text in games {
            let g = parse_game(text).unwrap();
            for target in StateSet::all_subsets(2) {
                let mut fast = Evaluator::with_star_depth(&m, 12);
                let mut slow = Evaluator::with_star_depth(&m, 12);
                assert_eq!(fast.game(&g, &target).unwrap(), reference(&mut slow, &g, &target), "{text}");
            }
        }
    }

    #[test]
    fn reserved_names_rejected() {
        let space = StateSpace::new(["s0"]).unwrap();
        let k = Kernel::identity(1);
        assert!(GameModel::kripke(space.clone(), BTreeMap::from([("eps".into(), k.clone())]), BTreeMap::new()).is_err());
        assert!(GameModel::kripke(space, BTreeMap::new(), BTreeMap::from([("true".into(), StateSet::full(1))])).is_err());
    }
}
