use std::fmt::{self, Display, Formatter};

use super::{Formula, GameExpr};

const CHOICE_A: u8 = 1;
const CHOICE_D: u8 = 2;
const SEQ: u8 = 3;
const POSTFIX: u8 = 4;
const ATOMIC: u8 = 5;

fn game_level(g: &GameExpr) -> u8 {
    use GameExpr::*;
    match g {
        ChoiceA(..) => CHOICE_A,
        ChoiceD(..) => CHOICE_D,
        Seq(..) => SEQ,
        Dual(_) | StarA(_) | StarD(_) => POSTFIX,
        Prim(_) | Eps | TestPos(_) | TestNeg(_) => ATOMIC,
    }
}

fn write_game(f: &mut Formatter<'_>, g: &GameExpr, min: u8) -> fmt::Result {
    use GameExpr::*;
    let level = game_level(g);
    if level < min {
        f.write_str("(")?;
        write_game(f, g, 0)?;
        return f.write_str(")");
    }
    match g {
        Prim(name) => f.write_str(name),
        Eps => f.write_str("eps"),
        TestPos(phi) => write!(f, "[{phi}]?"),
        TestNeg(phi) => write!(f, "[{phi}]!"),
        Dual(inner) => {
            write_game(f, inner, POSTFIX)?;
            f.write_str("^d")
        }
        StarA(inner) => {
            write_game(f, inner, POSTFIX)?;
            f.write_str("*")
        }
        StarD(inner) => {
            write_game(f, inner, POSTFIX)?;
            f.write_str("#")
        }
        ChoiceA(a, b) => binary(f, a, b, " | ", CHOICE_A),
        ChoiceD(a, b) => binary(f, a, b, " & ", CHOICE_D),
        Seq(a, b) => binary(f, a, b, ";", SEQ),
    }
}

fn binary(f: &mut Formatter<'_>, a: &GameExpr, b: &GameExpr, op: &str, level: u8) -> fmt::Result {
    write_game(f, a, level)?;
    f.write_str(op)?;
    write_game(f, b, level + 1)
}

fn write_formula(f: &mut Formatter<'_>, phi: &Formula, min: u8) -> fmt::Result {
    let level = if matches!(phi, Formula::And(..)) { 1 } else { 2 };
    if level < min {
        f.write_str("(")?;
        write_formula(f, phi, 0)?;
        return f.write_str(")");
    }
    match phi {
        Formula::Top => f.write_str("true"),
        Formula::Atom(name) => f.write_str(name),
        Formula::And(a, b) => {
            write_formula(f, a, 1)?;
            f.write_str(" /\\ ")?;
            write_formula(f, b, 2)
        }
        Formula::Diamond(g, q, body) => {
            f.write_str("<")?;
            write_game(f, g, 0)?;
            write!(f, ">{{{q}}} ")?;
            write_formula(f, body, 2)
        }
    }
}

impl Display for GameExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_game(f, self, 0)
    }
}

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0)
    }
}
