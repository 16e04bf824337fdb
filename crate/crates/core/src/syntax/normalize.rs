//! Head normalization of game terms.
//!
//! Rewrites applied at the head:
//!
//! - `(g^d)^d → g`
//! - `g1 & g2 → (g1^d | g2^d)^d`
//! - `g# → ((g^d)*)^d`
//! - `(a;b);c → a;(b;c)`
//! - `(a | b);c → a;c | b;c`
//! - `a^d;b → (a;b^d)^d`
//! - a standalone `g*` becomes `g*;eps`
//!
//! The result has one of the heads `Prim`, `Eps`, a test, `Dual(_)`,
//! `ChoiceA(_, _)`, `Seq(atomic, _)` or `Seq(StarA(_), _)`.
//!
//! Termination: every looping step either removes a double dual at the head
//! or rotates a left-nested `Seq` to the right, which strictly decreases the
//! size of the left spine under the weight `w(Seq(l, r)) = w(l)·(w(r) + 1)`.
//! The two steps that rewrite a demonic operator at the left of a `Seq` are
//! followed immediately by the non-looping dual step.

use super::{Formula, GameExpr};

pub fn normalize_head(game: &GameExpr) -> GameExpr {
    use GameExpr::*;
    let mut g = game.clone();
    loop {
        g = match g {
            Dual(inner) => match *inner {
                Dual(x) => *x,
                other => return Dual(Box::new(other)),
            },
            ChoiceD(a, b) => {
                return GameExpr::dual(GameExpr::choice(GameExpr::Dual(a), GameExpr::Dual(b)))
            }
            StarD(x) => return GameExpr::dual(GameExpr::star(GameExpr::Dual(x))),
            StarA(x) => return Seq(Box::new(StarA(x)), Box::new(Eps)),
            Seq(left, right) => match *left {
                Seq(a, b) => Seq(a, Box::new(Seq(b, right))),
                ChoiceA(a, b) => return ChoiceA(Box::new(Seq(a, right.clone())), Box::new(Seq(b, right))),
                Dual(a) => match *a {
                    Dual(x) => Seq(x, right),
                    a => return GameExpr::dual(GameExpr::seq(a, GameExpr::Dual(right))),
                },
                ChoiceD(a, b) => {
                    let head = GameExpr::choice(GameExpr::Dual(a), GameExpr::Dual(b));
                    return GameExpr::dual(GameExpr::seq(head, GameExpr::Dual(right)));
                }
                StarD(x) => {
                    let head = GameExpr::star(GameExpr::Dual(x));
                    return GameExpr::dual(GameExpr::seq(head, GameExpr::Dual(right)));
                }
                left @ (Prim(_) | Eps | TestPos(_) | TestNeg(_) | StarA(_)) => {
                    return Seq(Box::new(left), right)
                }
            },
            other @ (Prim(_) | Eps | TestPos(_) | TestNeg(_) | ChoiceA(..)) => return other,
        };
    }
}

/// Applies [`normalize_head`] throughout the term, including games inside
/// tests. Iterations in head position keep their `Seq(g*, tail)` shape.
pub fn normalize(game: &GameExpr) -> GameExpr {
    use GameExpr::*;
    match normalize_head(game) {
        Dual(inner) => match normalize(&inner) {
            Dual(x) => *x,
            other => GameExpr::dual(other),
        },
        ChoiceA(a, b) => GameExpr::choice(normalize(&a), normalize(&b)),
        Seq(head, tail) => {
            let head = match *head {
                StarA(body) => GameExpr::star(normalize(&body)),
                atomic => normalize_atomic(atomic),
            };
            GameExpr::seq(head, normalize(&tail))
        }
        atomic => normalize_atomic(atomic),
    }
}

fn normalize_atomic(g: GameExpr) -> GameExpr {
    match g {
        GameExpr::TestPos(phi) => GameExpr::test(normalize_formula(&phi)),
        GameExpr::TestNeg(phi) => GameExpr::neg_test(normalize_formula(&phi)),
        other => other,
    }
}

fn normalize_formula(phi: &Formula) -> Formula {
    match phi {
        Formula::Top | Formula::Atom(_) => phi.clone(),
        Formula::And(a, b) => Formula::and(normalize_formula(a), normalize_formula(b)),
        Formula::Diamond(g, q, body) => Formula::diamond(normalize(g), q.clone(), normalize_formula(body)),
    }
}
