//! Exact model checking for probabilistic game logic over finite state
//! spaces.
//!
//! Primitive games are interpreted by stochastic effectivity functions,
//! represented per state as a finite antichain of finite generator sets of
//! subprobability distributions. Kripke models (substochastic kernels) are the
//! special case where every state has a single singleton generator.
//!
//! All arithmetic is exact over arbitrary-precision rationals.
//!
//! Module map:
//! - [`space`]: state spaces, state sets and distributions
//! - [`kernels`]: substochastic and extended kernels, convolution, star closure
//! - [`syntax`]: game and formula ASTs, parser, printer and head normalizer
//! - [`effectivity`]: finitely generated effectivity functions and morphisms
//! - [`profiles`]: interval sets over thresholds and the profile algebra
//! - [`semantics`]: game models and the game/formula evaluator
//! - [`deduction`]: characteristic relations and Kripke-generation
//! - [`equivalence`]: partitions, congruences, factor models, model equivalence
//! - [`oracle`]: brute-force reference computations used for cross-checking

pub mod deduction;
pub mod effectivity;
pub mod equivalence;
mod error;
pub mod kernels;
pub mod model_io;
pub mod num;
pub mod oracle;
pub mod profiles;
pub mod semantics;
pub mod space;
pub mod syntax;

pub use error::{Error, Result};
pub use num::Rational;
