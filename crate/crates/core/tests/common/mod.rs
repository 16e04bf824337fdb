//! Random models and terms shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use effgame::effectivity::EffectivityFn;
use effgame::kernels::Kernel;
use effgame::model_io::load_model;
use effgame::semantics::{GameModel, Interpretation};
use effgame::space::{Dist, StateSet, StateSpace};
use effgame::syntax::{Formula, GameExpr};
use effgame::Rational;

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn corpus(name: &str) -> GameModel {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name);
    load_model(path).expect("corpus model loads")
}

/// A subprobability row whose weights are multiples of 1/4.
pub fn quarter_row(rng: &mut impl Rng, n: usize) -> Dist {
    let mut w = vec![Rational::zero(); n];
    for _ in 0..rng.gen_range(0..=4) {
        w[rng.gen_range(0..n)] += rat(1, 4);
    }
    Dist::new(w).expect("mass at most 1")
}

pub fn quarter_kernel(rng: &mut impl Rng, n: usize) -> Kernel {
    Kernel::new((0..n).map(|_| quarter_row(rng, n)).collect()).expect("rows over one space")
}

/// One or two generators per state, each of one or two quarter rows.
pub fn random_effectivity(rng: &mut impl Rng, n: usize) -> EffectivityFn {
    let states = (0..n)
        .map(|_| {
            (0..rng.gen_range(1..=2))
                .map(|_| (0..rng.gen_range(1..=2)).map(|_| quarter_row(rng, n)).collect())
                .collect()
        })
        .collect();
    EffectivityFn::new(states).expect("valid generators")
}

fn random_atoms(rng: &mut impl Rng, n: usize, atoms: &[&str]) -> BTreeMap<String, StateSet> {
    let full = StateSet::full(n).bits();
    atoms
        .iter()
        .map(|p| (p.to_string(), StateSet::from_bits(n, rng.gen_range(0..=full))))
        .collect()
}

pub fn random_kripke(rng: &mut impl Rng, n: usize, games: &[&str], atoms: &[&str]) -> GameModel {
    let kernels = games.iter().map(|g| (g.to_string(), quarter_kernel(rng, n))).collect();
    let atoms = random_atoms(rng, n, atoms);
    GameModel::kripke(StateSpace::numbered(n).unwrap(), kernels, atoms).unwrap()
}

/// Each primitive is a kernel or a general effectivity function with equal
/// odds.
pub fn random_mixed(rng: &mut impl Rng, n: usize, games: &[&str], atoms: &[&str]) -> GameModel {
    let interp = games
        .iter()
        .map(|g| {
            let i = if rng.gen_bool(0.5) {
                Interpretation::Kripke(quarter_kernel(rng, n))
            } else {
                Interpretation::Effectivity(random_effectivity(rng, n))
            };
            (g.to_string(), i)
        })
        .collect();
    let atoms = random_atoms(rng, n, atoms);
    GameModel::new(StateSpace::numbered(n).unwrap(), interp, atoms).unwrap()
}

/// Which constructors a random game may use.
#[derive(Clone)]
pub struct GameGen {
    pub prims: Vec<String>,
    pub atoms: Vec<String>,
    pub eps: bool,
    pub tests: bool,
    pub dual: bool,
    pub demonic: bool,
    pub star: bool,
    pub choice: bool,
}

impl GameGen {
    /// Primitives, sequencing, choice and tests.
    pub fn programs(prims: &[&str], atoms: &[&str]) -> Self {
        Self {
            prims: prims.iter().map(|s| s.to_string()).collect(),
            atoms: atoms.iter().map(|s| s.to_string()).collect(),
            eps: true,
            tests: !atoms.is_empty(),
            dual: false,
            demonic: false,
            star: false,
            choice: true,
        }
    }

    pub fn with_star(mut self) -> Self {
        self.star = true;
        self
    }

    pub fn with_duals(mut self) -> Self {
        self.dual = true;
        self.demonic = true;
        self
    }

    fn leaf(&self, rng: &mut impl Rng) -> GameExpr {
        let mut options = vec![0, 0, 0];
        if self.eps {
            options.push(1);
        }
        if self.tests {
            options.extend([2, 3]);
        }
        match *options.choose(rng).unwrap() {
            0 => GameExpr::prim(self.prims.choose(rng).unwrap().clone()),
            1 => GameExpr::Eps,
            2 => GameExpr::test(Formula::atom(self.atoms.choose(rng).unwrap().clone())),
            _ => GameExpr::neg_test(Formula::atom(self.atoms.choose(rng).unwrap().clone())),
        }
    }

    /// A game with at most `size` constructors.
    pub fn game(&self, rng: &mut impl Rng, size: usize) -> GameExpr {
        if size <= 1 {
            return self.leaf(rng);
        }
        let mut ops = vec!["seq", "seq"];
        if self.choice {
            ops.push("choice");
        }
        if self.dual {
            ops.push("dual");
        }
        if self.demonic && self.choice {
            ops.push("dchoice");
        }
        if self.star {
            ops.push("star");
            if self.demonic {
                ops.push("dstar");
            }
        }
        match *ops.choose(rng).unwrap() {
            "dual" => GameExpr::dual(self.game(rng, size - 1)),
            "star" => GameExpr::star(self.game(rng, size - 1)),
            "dstar" => GameExpr::demonic_star(self.game(rng, size - 1)),
            op if size == 2 => {
                // Binary operators need two leaves.
                let (a, b) = (self.leaf(rng), self.leaf(rng));
                match op {
                    "choice" => GameExpr::choice(a, b),
                    "dchoice" => GameExpr::demonic_choice(a, b),
                    _ => GameExpr::seq(a, b),
                }
            }
            op => {
                let l = rng.gen_range(1..size - 1);
                let r = size - 1 - l;
                let (a, b) = (self.game(rng, l), self.game(rng, r));
                match op {
                    "choice" => GameExpr::choice(a, b),
                    "dchoice" => GameExpr::demonic_choice(a, b),
                    _ => GameExpr::seq(a, b),
                }
            }
        }
    }

    /// A game of random size between 1 and `max`.
    pub fn game_upto(&self, rng: &mut impl Rng, max: usize) -> GameExpr {
        let size = rng.gen_range(1..=max);
        self.game(rng, size)
    }

    fn atom_formula(&self, rng: &mut impl Rng) -> Formula {
        if self.atoms.is_empty() || rng.gen_bool(0.3) {
            Formula::Top
        } else {
            Formula::atom(self.atoms.choose(rng).unwrap().clone())
        }
    }

    /// A formula of modal depth at most `depth` with thresholds `k/den`.
    pub fn formula(&self, rng: &mut impl Rng, depth: usize, game_size: usize) -> Formula {
        if depth == 0 {
            return self.atom_formula(rng);
        }
        match rng.gen_range(0..4) {
            0 => self.atom_formula(rng),
            1 => Formula::and(
                self.formula(rng, depth - 1, game_size),
                self.formula(rng, depth - 1, game_size),
            ),
            _ => {
                let den = rng.gen_range(1..=12);
                let q = rat(rng.gen_range(0..den), den);
                let size = rng.gen_range(1..=game_size);
                Formula::diamond(self.game(rng, size), q, self.formula(rng, depth - 1, game_size))
            }
        }
    }
}

pub fn all_subsets(n: usize) -> impl Iterator<Item = StateSet> {
    StateSet::all_subsets(n)
}

/// `{k/den | 0 ≤ k < den}`.
pub fn thresholds(den: i64) -> Vec<Rational> {
    (0..den).map(|k| rat(k, den)).collect()
}
