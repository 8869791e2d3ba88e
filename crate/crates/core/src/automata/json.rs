use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Alphabet, PaddedTuple, SyncAutomaton};
use crate::error::{Error, Result};

/// Serialised form of an automaton.  Padding is written as `"$"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonJson {
    pub tapes: usize,
    pub alphabet: Vec<String>,
    pub states: usize,
    pub initial: usize,
    pub accepting: Vec<usize>,
    pub transitions: Vec<TransitionJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionJson {
    pub from: usize,
    pub label: Vec<String>,
    pub to: Vec<usize>,
}

fn at(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidAutomaton(format!("{path}: {msg}"))
}

impl AutomatonJson {
    pub fn to_automaton(&self) -> Result<SyncAutomaton> {
        let alphabet = Alphabet::new(self.alphabet.iter().cloned()).map_err(|e| at("alphabet", e))?;
        let alphabet = Arc::new(alphabet);
        if self.tapes == 0 || self.tapes > super::MAX_TAPES {
            return Err(at("tapes", format!("unsupported tape count {}", self.tapes)));
        }
        if self.states == 0 {
            return Err(at("states", "at least one state is required"));
        }
        if self.initial >= self.states {
            return Err(at("initial", format!("state {} out of range", self.initial)));
        }
        for (i, &q) in self.accepting.iter().enumerate() {
            if q >= self.states {
                return Err(at(&format!("accepting[{i}]"), format!("state {q} out of range")));
            }
        }
        let mut edges = Vec::new();
        for (i, t) in self.transitions.iter().enumerate() {
            let path = format!("transitions[{i}]");
            if t.from >= self.states {
                return Err(at(&format!("{path}.from"), format!("state {} out of range", t.from)));
            }
            if t.label.len() != self.tapes {
                return Err(at(
                    &format!("{path}.label"),
                    format!("expected {} symbols, found {}", self.tapes, t.label.len()),
                ));
            }
            let mut syms = Vec::with_capacity(self.tapes);
            for (k, name) in t.label.iter().enumerate() {
                let s = alphabet
                    .lookup(name)
                    .ok_or_else(|| at(&format!("{path}.label[{k}]"), format!("unknown symbol `{name}`")))?;
                syms.push(s);
            }
            let label = PaddedTuple::new(syms);
            if label.is_all_pad() {
                return Err(at(&format!("{path}.label"), "label is all padding"));
            }
            for (k, &to) in t.to.iter().enumerate() {
                if to >= self.states {
                    return Err(at(&format!("{path}.to[{k}]"), format!("state {to} out of range")));
                }
                edges.push((t.from, label.clone(), to));
            }
        }
        SyncAutomaton::new(self.tapes, alphabet, self.states, self.initial, &self.accepting, edges)
    }
}

impl SyncAutomaton {
    pub fn to_json(&self) -> AutomatonJson {
        let mut transitions = Vec::new();
        for (q, d) in self.delta.iter().enumerate() {
            for (label, ts) in d {
                transitions.push(TransitionJson {
                    from: q,
                    label: label.iter().map(|&s| self.alphabet.name(s).to_string()).collect(),
                    to: ts.clone(),
                });
            }
        }
        AutomatonJson {
            tapes: self.tapes,
            alphabet: self.alphabet.letters().to_vec(),
            states: self.num_states(),
            initial: self.initial,
            accepting: self.accepting_states().collect(),
            transitions,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("automaton serialises")
    }

    pub fn from_json_str(text: &str) -> Result<SyncAutomaton> {
        let raw: AutomatonJson = serde_json::from_str(text)?;
        raw.to_automaton()
    }

    pub fn load(path: &Path) -> Result<SyncAutomaton> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text).map_err(|e| match e {
            Error::InvalidAutomaton(msg) => {
                Error::InvalidAutomaton(format!("{}: {msg}", path.display()))
            }
            other => other,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAIRS: &str = r#"{
        "tapes": 2, "alphabet": ["a"], "states": 2, "initial": 0, "accepting": [1],
        "transitions": [
            {"from": 0, "label": ["a", "a"], "to": [0]},
            {"from": 0, "label": ["$", "a"], "to": [1]}
        ]
    }"#;

    #[test]
    fn round_trip() {
        let m = SyncAutomaton::from_json_str(PAIRS).unwrap();
        let again = SyncAutomaton::from_json_str(&m.to_json_string()).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn errors_name_the_offending_field() {
        let bad = PAIRS.replace(r#"["$", "a"]"#, r#"["$", "z"]"#);
        let err = SyncAutomaton::from_json_str(&bad).unwrap_err().to_string();
        assert!(err.contains("transitions[1].label[1]"), "{err}");
        let bad = PAIRS.replace(r#""to": [1]"#, r#""to": [7]"#);
        let err = SyncAutomaton::from_json_str(&bad).unwrap_err().to_string();
        assert!(err.contains("transitions[1].to[0]"), "{err}");
    }
}
