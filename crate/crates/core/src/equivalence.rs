//! Logical equivalence, congruences, factor models and model equivalence.
//!
//! Two routes compute the logic-induced partition of a model:
//!
//! - refinement starts from atom valuations and splits blocks by the values
//!   `sup_expectation(P_γ, s, 1_U)` for every primitive `γ` and every union
//!   `U` of current blocks, until nothing changes. Each split is justified by
//!   a formula, so every final block gets a characteristic formula;
//! - enumeration evaluates all formulas of bounded modal depth over games of
//!   size at most 3 with thresholds `k/D`, working on extensions rather than
//!   syntax: formulas with equal extensions are interchangeable as bodies.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::effectivity::{up_family_eq, EffectivityFn};
use crate::kernels::Kernel;
use crate::num::Rational;
use crate::semantics::{kripke_fast_formula, model_morphism_check, Evaluator, GameModel, Interpretation};
use crate::space::{StateSet, StateSpace};
use crate::syntax::{Formula, GameExpr};
use crate::{Error, Result};

/// Largest number of blocks for which all block unions are enumerated.
pub const MAX_BLOCKS: usize = 12;

/// A partition of the state space into nonempty blocks, ordered by their
/// least state.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Partition {
    len: usize,
    blocks: Vec<StateSet>,
}

impl Partition {
    pub fn new(len: usize, mut blocks: Vec<StateSet>) -> Result<Self> {
        let mut seen = StateSet::empty(len);
        for b in &blocks {
            Error::check_len(len, b.universe_len())?;
            if b.is_empty() {
                return Err(Error::InvalidValue("partition has an empty block".into()));
            }
            if !seen.intersection_unchecked(b).is_empty() {
                return Err(Error::InvalidValue("partition blocks overlap".into()));
            }
            seen = seen.union_unchecked(b);
        }
        if !seen.is_full() {
            return Err(Error::InvalidValue("partition blocks do not cover the space".into()));
        }
        blocks.sort_by_key(|b| b.iter().next());
        Ok(Self { len, blocks })
    }

    /// Groups states by a key.
    pub fn by_key<K: Ord>(len: usize, key: impl Fn(usize) -> K) -> Self {
        let mut groups: BTreeMap<K, StateSet> = BTreeMap::new();
        for s in 0..len {
            groups.entry(key(s)).or_insert_with(|| StateSet::empty(len)).insert(s);
        }
        Self::new(len, groups.into_values().collect()).expect("groups cover the space")
    }

    pub fn discrete(len: usize) -> Self {
        Self::by_key(len, |s| s)
    }

    pub fn universe_len(&self) -> usize {
        self.len
    }

    pub fn blocks(&self) -> &[StateSet] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, s: usize) -> usize {
        self.blocks.iter().position(|b| b.contains(s)).expect("partition covers the space")
    }

    /// The quotient map `s ↦ index of its block`.
    pub fn map(&self) -> Vec<usize> {
        let mut out = vec![0; self.len];
        for (i, b) in self.blocks.iter().enumerate() {
            for s in b.iter() {
                out[s] = i;
            }
        }
        out
    }

    pub fn union_of(&self, mask: u64) -> StateSet {
        self.blocks
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .fold(StateSet::empty(self.len), |acc, (_, b)| acc.union_unchecked(b))
    }

    pub fn is_union_of_blocks(&self, set: &StateSet) -> bool {
        self.blocks.iter().all(|b| b.is_subset(set) || b.intersection_unchecked(set).is_empty())
    }
}

/// Refinement result: the partition, the partitions of every round, and a
/// characteristic formula for each final block.
#[derive(Clone, Debug)]
pub struct Refinement {
    pub partition: Partition,
    pub rounds: Vec<Partition>,
    pub formulas: Vec<Formula>,
}

fn union_formula(blocks: &[(StateSet, Formula)], mask: u64) -> Formula {
    let picked: Vec<&Formula> = blocks
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, (_, f))| f)
        .collect();
    if picked.len() == blocks.len() {
        return Formula::Top;
    }
    match picked.as_slice() {
        [one] => (*one).clone(),
        many => {
            // Disjunction: Angel picks the test that passes.
            let game = many
                .iter()
                .map(|f| GameExpr::test((*f).clone()))
                .reduce(GameExpr::choice)
                .expect("nonempty union");
            Formula::diamond(game, Rational::zero(), Formula::Top)
        }
    }
}

/// Logic-induced partition by signature refinement.
pub fn refine(model: &GameModel) -> Result<Refinement> {
    let n = model.len();
    let atoms: Vec<(&String, &StateSet)> = model.atoms().iter().collect();
    let initial = Partition::by_key(n, |s| atoms.iter().map(|(_, v)| v.contains(s)).collect::<Vec<_>>());
    let mut blocks: Vec<(StateSet, Formula)> = initial
        .blocks()
        .iter()
        .map(|b| {
            let s = b.iter().next().expect("nonempty");
            let parts = atoms.iter().map(|(name, v)| {
                let p = Formula::atom((*name).clone());
                if v.contains(s) {
                    p
                } else {
                    Formula::not(p)
                }
            });
            (*b, Formula::and_all(parts))
        })
        .collect();
    let mut rounds = vec![initial];
    let games: Vec<(&String, &EffectivityFn)> =
        model.games().keys().map(|k| (k, model.effectivity(k).expect("listed game"))).collect();

    loop {
        let current = rounds.last().expect("at least one round").clone();
        let k = current.num_blocks();
        if k > MAX_BLOCKS {
            return Err(Error::TooLarge {
                what: "partition block count",
                limit: MAX_BLOCKS,
                found: k,
            });
        }
        let masks: Vec<u64> = (1..1u64 << k).collect();
        let unions: Vec<Vec<Rational>> = masks.iter().map(|&m| current.union_of(m).indicator()).collect();
        let signature = |s: usize| -> Vec<Rational> {
            games
                .iter()
                .flat_map(|(_, p)| unions.iter().map(move |w| p.sup_expectation(s, w)))
                .collect()
        };
        let sigs: Vec<Vec<Rational>> = (0..n).map(signature).collect();

        let mut next: Vec<(StateSet, Formula)> = Vec::new();
        let mut split = false;
        for (block, chi) in &blocks {
            let sub = Partition::by_key(n, |s| if block.contains(s) { Some(sigs[s].clone()) } else { None });
            let parts: Vec<StateSet> = sub.blocks().iter().filter(|b| b.is_subset(block)).copied().collect();
            if parts.len() == 1 {
                next.push((*block, chi.clone()));
                continue;
            }
            split = true;
            for (i, part) in parts.iter().enumerate() {
                let si = part.iter().next().expect("nonempty");
                let mut conj = vec![chi.clone()];
                for (j, other) in parts.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    let sj = other.iter().next().expect("nonempty");
                    let idx = (0..sigs[si].len()).find(|&x| sigs[si][x] != sigs[sj][x]).expect("signatures differ");
                    let (game, mask) = (games[idx / masks.len()].0, masks[idx % masks.len()]);
                    let target = union_formula(&blocks, mask);
                    let (vi, vj) = (&sigs[si][idx], &sigs[sj][idx]);
                    let g = GameExpr::prim(game.clone());
                    conj.push(if vi > vj {
                        Formula::diamond(g, vj.clone(), target)
                    } else {
                        Formula::not(Formula::diamond(g, vi.clone(), target))
                    });
                }
                next.push((*part, Formula::and_all(conj)));
            }
        }
        if !split {
            break;
        }
        next.sort_by_key(|(b, _)| b.iter().next());
        rounds.push(Partition::new(n, next.iter().map(|(b, _)| *b).collect())?);
        blocks = next;
    }
    Ok(Refinement {
        partition: rounds.last().expect("at least one round").clone(),
        formulas: blocks.into_iter().map(|(_, f)| f).collect(),
        rounds,
    })
}

/// Bounds for the enumeration route.
#[derive(Clone, Debug)]
pub struct EnumerationConfig {
    pub depth: usize,
    pub grid: u32,
    pub star_depth: usize,
    /// Upper bound on (game, threshold, body) evaluations.
    pub max_work: usize,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        Self {
            depth: 3,
            grid: 8,
            star_depth: crate::semantics::DEFAULT_STAR_DEPTH,
            max_work: 2_000_000,
        }
    }
}

/// Result of the enumeration route. `extensions` maps each distinct
/// extension to the first formula found with it.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub partition: Partition,
    pub extensions: Vec<(StateSet, Formula)>,
    /// Formulas skipped because a cell stayed undecided at the star depth.
    pub undecided: usize,
    pub evaluated: usize,
}

/// All games of size at most `max_size` over the primitives, `eps` and
/// atom tests.
pub fn small_games(model: &GameModel, max_size: usize) -> Vec<GameExpr> {
    let mut by_size: Vec<Vec<GameExpr>> = vec![Vec::new()];
    let mut atomic: Vec<GameExpr> = model.games().keys().map(|k| GameExpr::prim(k.clone())).collect();
    atomic.push(GameExpr::Eps);
    for p in model.atoms().keys() {
        atomic.push(GameExpr::test(Formula::atom(p.clone())));
        atomic.push(GameExpr::neg_test(Formula::atom(p.clone())));
    }
    by_size.push(atomic);
    for size in 2..=max_size {
        let mut level = Vec::new();
        for g in &by_size[size - 1] {
            level.push(GameExpr::dual(g.clone()));
            level.push(GameExpr::star(g.clone()));
            level.push(GameExpr::demonic_star(g.clone()));
        }
        for left in 1..size - 1 {
            let right = size - 1 - left;
            for a in &by_size[left] {
                for b in &by_size[right] {
                    level.push(GameExpr::choice(a.clone(), b.clone()));
                    level.push(GameExpr::demonic_choice(a.clone(), b.clone()));
                    level.push(GameExpr::seq(a.clone(), b.clone()));
                }
            }
        }
        by_size.push(level);
    }
    by_size.into_iter().flatten().collect()
}

fn close_under_and(ext: &mut BTreeMap<StateSet, Formula>) {
    loop {
        let items: Vec<(StateSet, Formula)> = ext.iter().map(|(k, v)| (*k, v.clone())).collect();
        let mut added = false;
        for (i, (a, fa)) in items.iter().enumerate() {
            for (b, fb) in &items[i + 1..] {
                let c = a.intersection_unchecked(b);
                if let std::collections::btree_map::Entry::Vacant(slot) = ext.entry(c) {
                    slot.insert(Formula::and(fa.clone(), fb.clone()));
                    added = true;
                }
            }
        }
        if !added {
            return;
        }
    }
}

/// Logic-induced partition by bounded formula enumeration.
pub fn enumerate(model: &GameModel, config: &EnumerationConfig) -> Result<Enumeration> {
    if config.depth > 4 {
        return Err(Error::TooLarge {
            what: "enumeration depth",
            limit: 4,
            found: config.depth,
        });
    }
    if config.grid == 0 {
        return Err(Error::InvalidValue("grid denominator must be positive".into()));
    }
    let n = model.len();
    let mut ext: BTreeMap<StateSet, Formula> = BTreeMap::new();
    ext.insert(StateSet::full(n), Formula::Top);
    for (p, v) in model.atoms() {
        ext.entry(*v).or_insert_with(|| Formula::atom(p.clone()));
    }
    close_under_and(&mut ext);

    let games = small_games(model, 3);
    let thresholds: Vec<Rational> = (0..config.grid)
        .map(|k| Rational::new(k.into(), config.grid.into()))
        .collect();
    let mut eval = Evaluator::with_star_depth(model, config.star_depth);
    let mut undecided = 0;
    let mut evaluated = 0;
    for _ in 0..config.depth {
        let bodies: Vec<(StateSet, Formula)> = ext.iter().map(|(k, v)| (*k, v.clone())).collect();
        let work = games.len() * thresholds.len() * bodies.len();
        if evaluated + work > config.max_work {
            return Err(Error::Resource(format!(
                "enumeration needs more than {} evaluations",
                config.max_work
            )));
        }
        let before = ext.len();
        for g in &games {
            for (body_set, body) in &bodies {
                let profile = eval.game(g, body_set)?;
                for q in &thresholds {
                    evaluated += 1;
                    let mut set = StateSet::empty(n);
                    let mut open = false;
                    for s in 0..n {
                        let cell = profile.cell(s);
                        if cell.lower.member(q) {
                            set.insert(s);
                        } else if cell.upper.member(q) {
                            open = true;
                        }
                    }
                    if open {
                        undecided += 1;
                        continue;
                    }
                    ext.entry(set)
                        .or_insert_with(|| Formula::diamond(g.clone(), q.clone(), body.clone()));
                }
            }
        }
        close_under_and(&mut ext);
        if ext.len() == before {
            break;
        }
    }
    let sets: Vec<StateSet> = ext.keys().copied().collect();
    let partition = Partition::by_key(n, |s| sets.iter().map(|e| e.contains(s)).collect::<Vec<_>>());
    Ok(Enumeration {
        partition,
        extensions: ext.into_iter().collect(),
        undecided,
        evaluated,
    })
}

/// Which mode computes the logical partition.
#[derive(Clone, Debug)]
pub enum PartitionMode {
    Refinement,
    Enumeration(EnumerationConfig),
}

pub fn logical_partition(model: &GameModel, mode: &PartitionMode) -> Result<Partition> {
    match mode {
        PartitionMode::Refinement => Ok(refine(model)?.partition),
        PartitionMode::Enumeration(config) => Ok(enumerate(model, config)?.partition),
    }
}

/// Why a partition is not a congruence.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CongruenceFailure {
    /// The atom's valuation cuts through a block.
    Atom { atom: String, block: usize },
    /// Two states of one block have different projected generators.
    Game { game: String, state: usize, other: usize },
}

/// Checks that `rho` is a congruence: every valuation is a union of blocks
/// and equivalent states have equal block-mass projections of their
/// generator antichains.
pub fn congruence_check(model: &GameModel, rho: &Partition) -> Result<Option<CongruenceFailure>> {
    Error::check_len(model.len(), rho.universe_len())?;
    for (atom, v) in model.atoms() {
        if let Some(block) = rho
            .blocks()
            .iter()
            .position(|b| !(b.is_subset(v) || b.intersection_unchecked(v).is_empty()))
        {
            return Ok(Some(CongruenceFailure::Atom { atom: atom.clone(), block }));
        }
    }
    let map = rho.map();
    let k = rho.num_blocks();
    for name in model.games().keys() {
        let p = model.effectivity(name)?;
        for block in rho.blocks() {
            let mut states = block.iter();
            let rep = states.next().expect("nonempty");
            let reference = p.pushforward(rep, &map, k);
            for s in states {
                if !up_family_eq(&reference, &p.pushforward(s, &map, k)) {
                    return Ok(Some(CongruenceFailure::Game {
                        game: name.clone(),
                        state: rep,
                        other: s,
                    }));
                }
            }
        }
    }
    Ok(None)
}

fn block_name(model: &GameModel, block: &StateSet) -> String {
    let names: Vec<&str> = block.iter().map(|s| model.space().name(s)).collect();
    if names.len() == 1 {
        names[0].to_string()
    } else {
        format!("{{{}}}", names.join(","))
    }
}

/// The factor model over the blocks of a verified congruence. The quotient
/// map is checked to be a model morphism before returning.
pub fn factor_model(model: &GameModel, rho: &Partition) -> Result<GameModel> {
    if let Some(failure) = congruence_check(model, rho)? {
        return Err(Error::InvalidValue(format!("partition is not a congruence: {failure:?}")));
    }
    let map = rho.map();
    let k = rho.num_blocks();
    let space = StateSpace::new(rho.blocks().iter().map(|b| block_name(model, b)))?;
    let reps: Vec<usize> = rho.blocks().iter().map(|b| b.iter().next().expect("nonempty")).collect();
    let mut games = BTreeMap::new();
    for (name, interp) in model.games() {
        let lifted = model.effectivity(name)?;
        let factor = match interp {
            Interpretation::Kripke(kernel) => Interpretation::Kripke(Kernel::new(
                reps.iter().map(|&s| kernel.row(s).pushforward(&map, k)).collect(),
            )?),
            Interpretation::Effectivity(_) => Interpretation::Effectivity(EffectivityFn::new(
                reps.iter().map(|&s| lifted.pushforward(s, &map, k)).collect(),
            )?),
        };
        games.insert(name.clone(), factor);
    }
    let atoms = model
        .atoms()
        .iter()
        .map(|(p, v)| (p.clone(), StateSet::from_indices(k, v.iter().map(|s| map[s]))))
        .collect();
    let factor = GameModel::new(space, games, atoms)?;
    if let Some(failure) = model_morphism_check(&map, model, &factor)? {
        return Err(Error::Invariant(format!("quotient map is not a morphism: {failure:?}")));
    }
    Ok(factor)
}

/// The disjoint union of two models over the same vocabulary. States of the
/// first model come first.
pub fn disjoint_union(m1: &GameModel, m2: &GameModel) -> Result<GameModel> {
    let same_games = m1.games().keys().eq(m2.games().keys());
    let same_atoms = m1.atoms().keys().eq(m2.atoms().keys());
    if !same_games || !same_atoms {
        return Err(Error::Model("models use different games or atoms".into()));
    }
    let (n1, n2) = (m1.len(), m2.len());
    let n = n1 + n2;
    if n > crate::space::MAX_STATES {
        return Err(Error::TooLarge {
            what: "disjoint union state count",
            limit: crate::space::MAX_STATES,
            found: n,
        });
    }
    let names = m1
        .space()
        .names()
        .iter()
        .map(|s| format!("{s}@1"))
        .chain(m2.space().names().iter().map(|s| format!("{s}@2")));
    let space = StateSpace::new(names)?;
    let embed1: Vec<usize> = (0..n1).collect();
    let embed2: Vec<usize> = (n1..n).collect();
    let mut games = BTreeMap::new();
    for name in m1.games().keys() {
        let (p1, p2) = (m1.effectivity(name)?, m2.effectivity(name)?);
        let interp = match (p1.as_kernel(), p2.as_kernel()) {
            (Some(k1), Some(k2)) => {
                let rows = (0..n1)
                    .map(|s| k1.row(s).pushforward(&embed1, n))
                    .chain((0..n2).map(|s| k2.row(s).pushforward(&embed2, n)))
                    .collect();
                Interpretation::Kripke(Kernel::new(rows)?)
            }
            _ => {
                let gens = (0..n1)
                    .map(|s| p1.pushforward(s, &embed1, n))
                    .chain((0..n2).map(|s| p2.pushforward(s, &embed2, n)))
                    .collect();
                Interpretation::Effectivity(EffectivityFn::new(gens)?)
            }
        };
        games.insert(name.clone(), interp);
    }
    let atoms = m1
        .atoms()
        .iter()
        .map(|(p, v)| {
            let w = m2.atom(p).expect("same atoms");
            let set = StateSet::from_indices(n, v.iter().chain(w.iter().map(|s| s + n1)));
            (p.clone(), set)
        })
        .collect();
    GameModel::new(space, games, atoms)
}

/// A cospan of surjective model morphisms `m1 → target ← m2`.
#[derive(Clone, Debug)]
pub struct Cospan {
    pub target: GameModel,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    First,
    Second,
}

#[derive(Clone, Debug)]
pub enum EquivVerdict {
    Equivalent(Cospan),
    /// `formula` is satisfiable in the model on `side` and nowhere in the
    /// other one. `fast_confirmed` records the program-kernel evaluator's
    /// agreement when both models are Kripke and the formula is a program
    /// formula.
    Distinguished {
        formula: Formula,
        side: Side,
        fast_confirmed: Option<bool>,
    },
    Undecided(String),
}

fn surjective(map: &[usize], k: usize) -> bool {
    let hit: BTreeSet<usize> = map.iter().copied().collect();
    hit.len() == k
}

/// Decides logical equivalence of two models, with a witness either way.
pub fn logical_equiv(m1: &GameModel, m2: &GameModel) -> Result<EquivVerdict> {
    let union = disjoint_union(m1, m2)?;
    let refinement = match refine(&union) {
        Ok(r) => r,
        Err(Error::TooLarge { what, limit, found }) => {
            return Ok(EquivVerdict::Undecided(format!("{what} {found} exceeds {limit}")))
        }
        Err(e) => return Err(e),
    };
    let n1 = m1.len();
    let first = StateSet::from_indices(union.len(), 0..n1);
    for (block, chi) in refinement.partition.blocks().iter().zip(&refinement.formulas) {
        let in_first = !block.intersection_unchecked(&first).is_empty();
        let in_second = !block.difference(&first)?.is_empty();
        if in_first && in_second {
            continue;
        }
        let side = if in_first { Side::First } else { Side::Second };
        let (here, there) = match side {
            Side::First => (m1, m2),
            Side::Second => (m2, m1),
        };
        let (vh, vt) = (eval_formula_decided(here, chi)?, eval_formula_decided(there, chi)?);
        let (Some(vh), Some(vt)) = (vh, vt) else {
            return Ok(EquivVerdict::Undecided("distinguishing formula is undecided".into()));
        };
        if vh.is_empty() || !vt.is_empty() {
            return Err(Error::Invariant(format!("formula `{chi}` does not separate the models")));
        }
        let fast_confirmed = match (kripke_fast_formula(here, chi), kripke_fast_formula(there, chi)) {
            (Ok(a), Ok(b)) => Some(a == vh && b == vt),
            _ => None,
        };
        return Ok(EquivVerdict::Distinguished {
            formula: chi.clone(),
            side,
            fast_confirmed,
        });
    }

    let union_map = refinement.partition.map();
    let rho = Partition::by_key(n1, |s| union_map[s]);
    let theta = Partition::by_key(m2.len(), |s| union_map[s + n1]);
    let (f1, f2) = match (factor_model(m1, &rho), factor_model(m2, &theta)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(Error::InvalidValue(msg)), _) | (_, Err(Error::InvalidValue(msg))) => {
            return Ok(EquivVerdict::Undecided(msg))
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    // Blocks of both factors are matched through the union blocks.
    let alpha: Vec<usize> = theta
        .blocks()
        .iter()
        .map(|b| {
            let s = b.iter().next().expect("nonempty");
            let u = union_map[s + n1];
            rho.map()[(0..n1).find(|&t| union_map[t] == u).expect("block has states of both models")]
        })
        .collect();
    let inverse: Vec<usize> = (0..rho.num_blocks())
        .map(|i| alpha.iter().position(|&a| a == i).expect("matching is a bijection"))
        .collect();
    if model_morphism_check(&alpha, &f2, &f1)?.is_some() || model_morphism_check(&inverse, &f1, &f2)?.is_some() {
        return Ok(EquivVerdict::Undecided("block matching is not an isomorphism of factors".into()));
    }
    let left = rho.map();
    let right: Vec<usize> = theta.map().into_iter().map(|b| alpha[b]).collect();
    let ok = model_morphism_check(&left, m1, &f1)?.is_none()
        && model_morphism_check(&right, m2, &f1)?.is_none()
        && surjective(&left, f1.len())
        && surjective(&right, f1.len());
    if !ok {
        return Err(Error::Invariant("cospan legs failed verification".into()));
    }
    Ok(EquivVerdict::Equivalent(Cospan {
        target: f1,
        left,
        right,
    }))
}

fn eval_formula_decided(model: &GameModel, phi: &Formula) -> Result<Option<StateSet>> {
    let v = Evaluator::new(model).formula(phi)?;
    Ok(v.is_decided().then_some(v.holds))
}

/// States of `m1` and `m2` grouped by theory, via enumeration on the
/// disjoint union. Returns, per union block, the states on each side.
pub fn theory_classes(
    m1: &GameModel,
    m2: &GameModel,
    config: &EnumerationConfig,
) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    let union = disjoint_union(m1, m2)?;
    let e = enumerate(&union, config)?;
    let n1 = m1.len();
    Ok(e.partition
        .blocks()
        .iter()
        .map(|b| {
            let left = b.iter().filter(|&s| s < n1).collect();
            let right = b.iter().filter(|&s| s >= n1).map(|s| s - n1).collect();
            (left, right)
        })
        .collect())
}
