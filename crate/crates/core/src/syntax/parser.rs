use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Formula, GameExpr};
use crate::num::Rational;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Slash,
    And,
    LParen,
    RParen,
    LAngle,
    RAngle,
    LBrace,
    RBrace,
    LBracket,
    TestPos,
    TestNeg,
    Pipe,
    Amp,
    Semi,
    Star,
    Hash,
    DualMark,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Slash => "/",
            Tok::And => "/\\",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LAngle => "<",
            Tok::RAngle => ">",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::TestPos => "]?",
            Tok::TestNeg => "]!",
            Tok::Pipe => "|",
            Tok::Amp => "&",
            Tok::Semi => ";",
            Tok::Star => "*",
            Tok::Hash => "#",
            Tok::DualMark => "^d",
            Tok::Ident(_) | Tok::Int(_) | Tok::Eof => "",
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

fn err(pos: Pos, message: impl Into<String>) -> Error {
    Error::Parse {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column };
        let next = chars.get(i + 1).copied();
        let (tok, width) = match c {
            '\n' => {
                i += 1;
                line += 1;
                column = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                column += 1;
                continue;
            }
            '/' if next == Some('\\') => (Tok::And, 2),
            '/' => (Tok::Slash, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '<' => (Tok::LAngle, 1),
            '>' => (Tok::RAngle, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            '[' => (Tok::LBracket, 1),
            ']' if next == Some('?') => (Tok::TestPos, 2),
            ']' if next == Some('!') => (Tok::TestNeg, 2),
            ']' => return Err(err(pos, "`]` must be followed by `?` or `!`")),
            '|' => (Tok::Pipe, 1),
            '&' => (Tok::Amp, 1),
            ';' => (Tok::Semi, 1),
            '*' => (Tok::Star, 1),
            '#' => (Tok::Hash, 1),
            '^' => {
                let after = chars.get(i + 2).copied();
                if next == Some('d') && !after.is_some_and(is_ident_char) {
                    (Tok::DualMark, 2)
                } else {
                    return Err(err(pos, "expected `^d`"));
                }
            }
            c if c.is_ascii_digit() => {
                let len = chars[i..].iter().take_while(|c| c.is_ascii_digit()).count();
                let digits: String = chars[i..i + len].iter().collect();
                (Tok::Int(digits.parse().expect("ascii digits")), len)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let len = chars[i..].iter().take_while(|c| is_ident_char(**c)).count();
                (Tok::Ident(chars[i..i + len].iter().collect()), len)
            }
            other => return Err(err(pos, format!("unexpected character `{other}`"))),
        };
        out.push((tok, pos));
        i += width;
        column += width;
    }
    out.push((Tok::Eof, Pos { line, column }));
    Ok(out)
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        tok
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(err(
                self.pos(),
                format!("expected {}, found {}", tok.describe(), self.peek().describe()),
            ))
        }
    }

    fn finish(&self) -> Result<()> {
        match self.peek() {
            Tok::Eof => Ok(()),
            other => Err(err(self.pos(), format!("unexpected {}", other.describe()))),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut lhs = self.unary_formula()?;
        while self.eat(&Tok::And) {
            let rhs = self.unary_formula()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary_formula(&mut self) -> Result<Formula> {
        let pos = self.pos();
        match self.bump() {
            Tok::Ident(name) if name == "true" => Ok(Formula::Top),
            Tok::Ident(name) if name == "eps" => Err(err(pos, "`eps` is a game, not a formula")),
            Tok::Ident(name) => Ok(Formula::Atom(name)),
            Tok::LParen => {
                let inner = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::LAngle => {
                let game = self.game()?;
                self.expect(Tok::RAngle)?;
                self.expect(Tok::LBrace)?;
                let q = self.threshold()?;
                self.expect(Tok::RBrace)?;
                let body = self.unary_formula()?;
                Ok(Formula::diamond(game, q, body))
            }
            other => Err(err(pos, format!("expected a formula, found {}", other.describe()))),
        }
    }

    fn threshold(&mut self) -> Result<Rational> {
        let pos = self.pos();
        let numer = match self.bump() {
            Tok::Int(n) => n,
            other => return Err(err(pos, format!("expected a rational, found {}", other.describe()))),
        };
        let q = if self.eat(&Tok::Slash) {
            let dpos = self.pos();
            match self.bump() {
                Tok::Int(d) if !d.is_zero() => Rational::new(numer, d),
                Tok::Int(_) => return Err(err(dpos, "denominator must be positive")),
                other => return Err(err(dpos, format!("expected a denominator, found {}", other.describe()))),
            }
        } else {
            Rational::from_integer(numer)
        };
        if q >= Rational::one() {
            return Err(err(pos, format!("threshold {q} must lie in [0, 1)")));
        }
        Ok(q)
    }

    fn game(&mut self) -> Result<GameExpr> {
        let mut lhs = self.demonic()?;
        while self.eat(&Tok::Pipe) {
            lhs = GameExpr::choice(lhs, self.demonic()?);
        }
        Ok(lhs)
    }

    fn demonic(&mut self) -> Result<GameExpr> {
        let mut lhs = self.sequence()?;
        while self.eat(&Tok::Amp) {
            lhs = GameExpr::demonic_choice(lhs, self.sequence()?);
        }
        Ok(lhs)
    }

    fn sequence(&mut self) -> Result<GameExpr> {
        let mut lhs = self.postfix()?;
        while self.eat(&Tok::Semi) {
            lhs = GameExpr::seq(lhs, self.postfix()?);
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> Result<GameExpr> {
        let mut g = self.primary_game()?;
        loop {
            g = match self.peek() {
                Tok::Star => GameExpr::star(g),
                Tok::Hash => GameExpr::demonic_star(g),
                Tok::DualMark => GameExpr::dual(g),
                _ => return Ok(g),
            };
            self.bump();
        }
    }

    fn primary_game(&mut self) -> Result<GameExpr> {
        let pos = self.pos();
        match self.bump() {
            Tok::Ident(name) if name == "eps" => Ok(GameExpr::Eps),
            Tok::Ident(name) if name == "true" => Err(err(pos, "`true` is a formula, not a game")),
            Tok::Ident(name) => Ok(GameExpr::Prim(name)),
            Tok::LParen => {
                let inner = self.game()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::LBracket => {
                let phi = self.formula()?;
                let close = self.pos();
                match self.bump() {
                    Tok::TestPos => Ok(GameExpr::test(phi)),
                    Tok::TestNeg => Ok(GameExpr::neg_test(phi)),
                    other => Err(err(close, format!("expected `]?` or `]!`, found {}", other.describe()))),
                }
            }
            other => Err(err(pos, format!("expected a game, found {}", other.describe()))),
        }
    }
}

pub fn parse_game(text: &str) -> Result<GameExpr> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let g = p.game()?;
    p.finish()?;
    Ok(g)
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let phi = p.formula()?;
    p.finish()?;
    Ok(phi)
}
