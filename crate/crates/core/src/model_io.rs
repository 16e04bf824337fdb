//! JSON encoding of models, distributions, kernels and profiles.
//!
//! Model files have the shape
//!
//! ```json
//! {
//!   "states": ["s0", "s1"],
//!   "atoms": {"p": ["s0"]},
//!   "games": {
//!     "a": {"kind": "kripke", "rows": {"s0": {"s1": "1/2"}}},
//!     "b": {"kind": "effectivity", "generators": {"s0": [[{"s0": "1"}, {"s1": "1"}]], "s1": [[{}]]}}
//!   }
//! }
//! ```
//!
//! Rationals are strings `"p/q"` or integers. Missing Kripke rows are zero
//! rows; every state of an effectivity game needs at least one generator.
//! Output lists states, atoms and games in a fixed order: states in space
//! order, names sorted.

use std::collections::BTreeMap;
use std::path::Path;

use num_traits::Zero;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::effectivity::EffectivityFn;
use crate::kernels::{ExtKernel, ExtValue, Kernel};
use crate::num::{format_rational, parse_rational, Rational};
use crate::profiles::{CellStatus, Profile};
use crate::semantics::{GameModel, Interpretation};
use crate::space::{Dist, StateSet, StateSpace};
use crate::{Error, Result};

type DistFile = BTreeMap<String, String>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    states: Vec<String>,
    #[serde(default)]
    atoms: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    games: BTreeMap<String, GameFile>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum GameFile {
    Kripke {
        #[serde(default)]
        rows: BTreeMap<String, DistFile>,
    },
    Effectivity {
        generators: BTreeMap<String, Vec<Vec<DistFile>>>,
    },
}

fn read_dist(space: &StateSpace, raw: &DistFile) -> Result<Dist> {
    let mut weights = vec![Rational::zero(); space.len()];
    for (name, value) in raw {
        weights[space.index_of(name)?] = parse_rational(value)?;
    }
    Dist::new(weights)
}

fn check_states(space: &StateSpace, keys: impl Iterator<Item = String>) -> Result<()> {
    for k in keys {
        space.index_of(&k)?;
    }
    Ok(())
}

pub fn parse_model(text: &str) -> Result<GameModel> {
    let file: ModelFile = serde_json::from_str(text)?;
    let space = StateSpace::new(file.states)?;
    let mut atoms = BTreeMap::new();
    for (p, names) in file.atoms {
        atoms.insert(p, space.set_from_names(&names)?);
    }
    let mut games = BTreeMap::new();
    for (name, game) in file.games {
        let interp = match game {
            GameFile::Kripke { rows } => {
                check_states(&space, rows.keys().cloned())?;
                let rows = space
                    .names()
                    .iter()
                    .map(|s| match rows.get(s) {
                        Some(raw) => read_dist(&space, raw),
                        None => Ok(Dist::zero(space.len())),
                    })
                    .collect::<Result<_>>()?;
                Interpretation::Kripke(Kernel::new(rows)?)
            }
            GameFile::Effectivity { generators } => {
                check_states(&space, generators.keys().cloned())?;
                let states = space
                    .names()
                    .iter()
                    .map(|s| {
                        let gens = generators
                            .get(s)
                            .ok_or_else(|| Error::Model(format!("game `{name}` has no generators at `{s}`")))?;
                        gens.iter()
                            .map(|g| g.iter().map(|d| read_dist(&space, d)).collect::<Result<Vec<_>>>())
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Interpretation::Effectivity(EffectivityFn::new(states)?)
            }
        };
        games.insert(name, interp);
    }
    GameModel::new(space, games, atoms)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<GameModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Model(format!("cannot read {}: {e}", path.display())))?;
    parse_model(&text)
}

pub fn rational_json(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

/// A distribution as a map from state names to weights, zero weights
/// omitted.
pub fn dist_json(space: &StateSpace, mu: &Dist) -> Value {
    let mut map = Map::new();
    for (i, w) in mu.weights().iter().enumerate() {
        if !w.is_zero() {
            map.insert(space.name(i).to_string(), rational_json(w));
        }
    }
    Value::Object(map)
}

pub fn state_set_json(space: &StateSpace, set: &StateSet) -> Value {
    json!(space.set_names(set))
}

pub fn kernel_json(space: &StateSpace, k: &Kernel) -> Value {
    let mut map = Map::new();
    for (s, row) in k.rows().iter().enumerate() {
        map.insert(space.name(s).to_string(), dist_json(space, row));
    }
    Value::Object(map)
}

pub fn ext_value_json(v: &ExtValue) -> Value {
    match v {
        ExtValue::Finite(r) => rational_json(r),
        ExtValue::Infinite => Value::String("inf".into()),
    }
}

/// Extended kernel rows, zero entries omitted.
pub fn ext_kernel_json(space: &StateSpace, k: &ExtKernel) -> Value {
    let mut map = Map::new();
    for (s, row) in k.rows().iter().enumerate() {
        let mut entries = Map::new();
        for (t, v) in row.iter().enumerate() {
            if !v.is_zero() {
                entries.insert(space.name(t).to_string(), ext_value_json(v));
            }
        }
        map.insert(space.name(s).to_string(), Value::Object(entries));
    }
    Value::Object(map)
}

pub fn effectivity_json(space: &StateSpace, p: &EffectivityFn) -> Value {
    let mut map = Map::new();
    for s in 0..p.len() {
        let gens: Vec<Value> = p
            .generators(s)
            .iter()
            .map(|g| Value::Array(g.iter().map(|mu| dist_json(space, mu)).collect()))
            .collect();
        map.insert(space.name(s).to_string(), Value::Array(gens));
    }
    Value::Object(map)
}

pub fn model_json(model: &GameModel) -> Value {
    let space = model.space();
    let mut atoms = Map::new();
    for (p, v) in model.atoms() {
        atoms.insert(p.clone(), state_set_json(space, v));
    }
    let mut games = Map::new();
    for (name, interp) in model.games() {
        let value = match interp {
            Interpretation::Kripke(k) => json!({"kind": "kripke", "rows": kernel_json(space, k)}),
            Interpretation::Effectivity(p) => {
                json!({"kind": "effectivity", "generators": effectivity_json(space, p)})
            }
        };
        games.insert(name.clone(), value);
    }
    json!({"states": space.names(), "atoms": atoms, "games": games})
}

pub fn status_json(status: CellStatus) -> Value {
    match status {
        CellStatus::Exact => json!("exact"),
        CellStatus::Truncated(n) => json!({ "truncated": n }),
    }
}

/// Per-state dump: certified intervals, status, and the upper bound when
/// the cell is truncated.
pub fn profile_json(space: &StateSpace, profile: &Profile) -> Value {
    let cells: Vec<Value> = (0..profile.len())
        .map(|s| {
            let cell = profile.cell(s);
            let mut obj = Map::new();
            obj.insert("state".into(), json!(space.name(s)));
            obj.insert("intervals".into(), serde_json::to_value(&cell.lower).expect("serializable"));
            obj.insert("status".into(), status_json(profile.status(s)));
            if !cell.is_exact() {
                obj.insert("upper".into(), serde_json::to_value(&cell.upper).expect("serializable"));
            }
            Value::Object(obj)
        })
        .collect();
    Value::Array(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    const MODEL: &str = r#"{
        "states": ["s0", "s1"],
        "atoms": {"p": ["s0"]},
        "games": {
            "a": {"kind": "kripke", "rows": {"s0": {"s0": "1/2", "s1": "1/4"}}},
            "g": {"kind": "effectivity", "generators": {
                "s0": [[{"s0": "1"}, {"s1": "1"}]],
                "s1": [[{"s1": "1"}], [{"s0": "1"}, {"s1": "1"}]]
            }}
        }
    }"#;

    #[test]
    fn parse_and_round_trip() {
        let m = parse_model(MODEL).unwrap();
        assert_eq!(*m.kernel("a").unwrap().entry(0, 0), rat(1, 2));
        assert!(m.kernel("a").unwrap().row(1).is_zero());
        // The superset generator at s1 is dropped.
        assert_eq!(m.effectivity("g").unwrap().generators(1).len(), 1);
        let text = serde_json::to_string(&model_json(&m)).unwrap();
        let again = parse_model(&text).unwrap();
        assert_eq!(model_json(&again), model_json(&m));
        assert_eq!(serde_json::to_string(&model_json(&again)).unwrap(), text);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_model(r#"{"states": []}"#).is_err());
        assert!(parse_model(r#"{"states": ["a", "a"]}"#).is_err());
        assert!(parse_model(r#"{"states": ["s"], "atoms": {"p": ["t"]}}"#).is_err());
        assert!(parse_model(r#"{"states": ["s"], "games": {"a": {"kind": "kripke", "rows": {"s": {"s": "3/2"}}}}}"#).is_err());
        assert!(parse_model(r#"{"states": ["s"], "games": {"a": {"kind": "effectivity", "generators": {}}}}"#).is_err());
        assert!(parse_model(r#"{"states": ["s"], "extra": 1}"#).is_err());
    }

    #[test]
    fn ext_kernel_prints_inf() {
        let space = StateSpace::numbered(1).unwrap();
        let k = ExtKernel::new(vec![vec![ExtValue::Infinite]]).unwrap();
        assert_eq!(ext_kernel_json(&space, &k), json!({"s0": {"s0": "inf"}}));
    }
}
