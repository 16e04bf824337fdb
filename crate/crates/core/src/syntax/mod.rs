//! Game and formula syntax.
//!
//! Concrete syntax (ASCII):
//!
//! ```text
//! formula := "true" | ident | formula "/\" formula
//!          | "<" game ">" "{" rational "}" formula | "(" formula ")"
//! game    := ident | "eps" | "[" formula "]?" | "[" formula "]!"
//!          | game "^d" | game "*" | game "#"
//!          | game ";" game | game "&" game | game "|" game | "(" game ")"
//! ```
//!
//! Postfix operators bind tightest, then `;`, then `&`, then `|`; binary
//! operators associate to the left. The relative precedence of `&` over `|`
//! is a convention of this tool. A modality binds tighter than `/\`, so
//! `<a>{1/2} p /\ q` reads as `(<a>{1/2} p) /\ q`.

mod normalize;
mod parser;
mod print;

pub use normalize::{normalize, normalize_head};
pub use parser::{parse_formula, parse_game};

use crate::num::Rational;

/// Game terms. `ChoiceA`/`StarA` are Angel's choice and iteration,
/// `ChoiceD`/`StarD` Demon's.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum GameExpr {
    Prim(String),
    Eps,
    Dual(Box<GameExpr>),
    ChoiceA(Box<GameExpr>, Box<GameExpr>),
    ChoiceD(Box<GameExpr>, Box<GameExpr>),
    Seq(Box<GameExpr>, Box<GameExpr>),
    StarA(Box<GameExpr>),
    StarD(Box<GameExpr>),
    TestPos(Box<Formula>),
    TestNeg(Box<Formula>),
}

/// Negation-free formulas: `⊤`, atoms, conjunction and `⟨τ⟩_q φ`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Atom(String),
    And(Box<Formula>, Box<Formula>),
    Diamond(Box<GameExpr>, Rational, Box<Formula>),
}

impl GameExpr {
    pub fn prim(name: impl Into<String>) -> Self {
        GameExpr::Prim(name.into())
    }

    pub fn dual(g: GameExpr) -> Self {
        GameExpr::Dual(Box::new(g))
    }

    pub fn choice(a: GameExpr, b: GameExpr) -> Self {
        GameExpr::ChoiceA(Box::new(a), Box::new(b))
    }

    pub fn demonic_choice(a: GameExpr, b: GameExpr) -> Self {
        GameExpr::ChoiceD(Box::new(a), Box::new(b))
    }

    pub fn seq(a: GameExpr, b: GameExpr) -> Self {
        GameExpr::Seq(Box::new(a), Box::new(b))
    }

    pub fn star(g: GameExpr) -> Self {
        GameExpr::StarA(Box::new(g))
    }

    pub fn demonic_star(g: GameExpr) -> Self {
        GameExpr::StarD(Box::new(g))
    }

    pub fn test(phi: Formula) -> Self {
        GameExpr::TestPos(Box::new(phi))
    }

    pub fn neg_test(phi: Formula) -> Self {
        GameExpr::TestNeg(Box::new(phi))
    }

    /// Left-nested composition of a nonempty list.
    pub fn seq_all(parts: impl IntoIterator<Item = GameExpr>) -> Option<Self> {
        parts.into_iter().reduce(GameExpr::seq)
    }

    /// Number of nodes, counting each test as one node.
    pub fn size(&self) -> usize {
        use GameExpr::*;
        match self {
            Prim(_) | Eps | TestPos(_) | TestNeg(_) => 1,
            Dual(g) | StarA(g) | StarD(g) => 1 + g.size(),
            ChoiceA(a, b) | ChoiceD(a, b) | Seq(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// True when no dual or demonic operator occurs, tests included.
    pub fn is_dual_free(&self) -> bool {
        use GameExpr::*;
        match self {
            Prim(_) | Eps => true,
            TestPos(phi) | TestNeg(phi) => phi.is_dual_free(),
            Dual(_) | ChoiceD(..) | StarD(_) => false,
            StarA(g) => g.is_dual_free(),
            ChoiceA(a, b) | Seq(a, b) => a.is_dual_free() && b.is_dual_free(),
        }
    }

    pub fn has_star(&self) -> bool {
        use GameExpr::*;
        match self {
            Prim(_) | Eps => false,
            TestPos(phi) | TestNeg(phi) => phi.has_star(),
            StarA(_) | StarD(_) => true,
            Dual(g) => g.has_star(),
            ChoiceA(a, b) | ChoiceD(a, b) | Seq(a, b) => a.has_star() || b.has_star(),
        }
    }

    /// Primitive names occurring in the term (tests included).
    pub fn primitives(&self, out: &mut Vec<String>) {
        use GameExpr::*;
        match self {
            Prim(name) => {
                if !out.contains(name) {
                    out.push(name.clone())
                }
            }
            Eps => {}
            TestPos(phi) | TestNeg(phi) => phi.primitives(out),
            Dual(g) | StarA(g) | StarD(g) => g.primitives(out),
            ChoiceA(a, b) | ChoiceD(a, b) | Seq(a, b) => {
                a.primitives(out);
                b.primitives(out);
            }
        }
    }
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn diamond(game: GameExpr, q: Rational, body: Formula) -> Self {
        Formula::Diamond(Box::new(game), q, Box::new(body))
    }

    /// `¬φ`, expressed as `<[φ]!>{0} true`.
    pub fn not(phi: Formula) -> Self {
        Formula::diamond(GameExpr::neg_test(phi), Rational::from_integer(0.into()), Formula::Top)
    }

    /// Conjunction of a list; `true` when empty.
    pub fn and_all(parts: impl IntoIterator<Item = Formula>) -> Self {
        parts.into_iter().reduce(Formula::and).unwrap_or(Formula::Top)
    }

    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Atom(_) => 0,
            Formula::And(a, b) => a.modal_depth().max(b.modal_depth()),
            Formula::Diamond(_, _, body) => 1 + body.modal_depth(),
        }
    }

    pub fn is_dual_free(&self) -> bool {
        match self {
            Formula::Top | Formula::Atom(_) => true,
            Formula::And(a, b) => a.is_dual_free() && b.is_dual_free(),
            Formula::Diamond(g, _, body) => g.is_dual_free() && body.is_dual_free(),
        }
    }

    pub fn has_star(&self) -> bool {
        match self {
            Formula::Top | Formula::Atom(_) => false,
            Formula::And(a, b) => a.has_star() || b.has_star(),
            Formula::Diamond(g, _, body) => g.has_star() || body.has_star(),
        }
    }

    pub fn primitives(&self, out: &mut Vec<String>) {
        match self {
            Formula::Top | Formula::Atom(_) => {}
            Formula::And(a, b) => {
                a.primitives(out);
                b.primitives(out);
            }
            Formula::Diamond(g, _, body) => {
                g.primitives(out);
                body.primitives(out);
            }
        }
    }
}
