use std::collections::BTreeSet;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use super::{GroupElement, GroupModel};
use crate::error::{Error, Result};

/// A word over a generating set, as generator indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn concat(parts: &[&Word]) -> Word {
        Word(parts.iter().flat_map(|w| w.0.iter().copied()).collect())
    }
}

impl Deref for Word {
    type Target = [usize];
    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for Word {
    fn from(v: Vec<usize>) -> Self {
        Word(v)
    }
}

/// A named generator with its value and the index of its formal inverse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub value: GroupElement,
    pub inverse: usize,
}

/// A finite generating set closed under formal inverses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSet {
    model: GroupModel,
    gens: Vec<Generator>,
}

/// Conventional name of the inverse of `name`: swapped case for a single
/// ASCII letter, otherwise `name^-1`.
pub fn inverse_name(name: &str) -> String {
    if let Some(base) = name.strip_suffix("^-1") {
        return base.to_string();
    }
    let mut chars = name.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_ascii_lowercase() => c.to_ascii_uppercase().to_string(),
        (Some(c), None) if c.is_ascii_uppercase() => c.to_ascii_lowercase().to_string(),
        _ => format!("{name}^-1"),
    }
}

impl GeneratorSet {
    pub fn new(model: GroupModel, gens: Vec<Generator>) -> Result<Self> {
        let set = GeneratorSet { model, gens };
        set.validate()?;
        Ok(set)
    }

    /// Builds a set from positive generators, adding an inverse after each
    /// one unless its value is an involution or the identity.
    pub fn symmetric(model: GroupModel, positives: Vec<(String, GroupElement)>) -> Result<Self> {
        let mut set = GeneratorSet { model, gens: Vec::new() };
        for (name, value) in positives {
            set.push_symmetric(&name, value)?;
        }
        Ok(set)
    }

    /// Appends a generator and, if needed, its inverse.  Returns both indices.
    pub fn push_symmetric(&mut self, name: &str, value: GroupElement) -> Result<(usize, usize)> {
        self.model.check(&value)?;
        let id = self.gens.len();
        let inv_value = self.model.inverse(&value);
        if inv_value == value {
            self.gens.push(Generator { name: name.to_string(), value, inverse: id });
            self.validate()?;
            return Ok((id, id));
        }
        self.gens.push(Generator { name: name.to_string(), value, inverse: id + 1 });
        self.gens.push(Generator { name: inverse_name(name), value: inv_value, inverse: id });
        self.validate()?;
        Ok((id, id + 1))
    }

    fn validate(&self) -> Result<()> {
        let mut names = BTreeSet::new();
        for (i, g) in self.gens.iter().enumerate() {
            let bad = |msg: &str| Error::InvalidGenerators(format!("generator `{}`: {msg}", g.name));
            if g.name.is_empty() || g.name.chars().any(char::is_whitespace) || g.name == "ε" {
                return Err(bad("invalid name"));
            }
            if !names.insert(g.name.as_str()) {
                return Err(bad("duplicate name"));
            }
            if !self.model.contains(&g.value) {
                return Err(bad("value outside the group"));
            }
            let Some(inv) = self.gens.get(g.inverse) else {
                return Err(bad("inverse index out of range"));
            };
            if inv.inverse != i {
                return Err(bad("inverse is not an involution"));
            }
            if self.model.multiply(&g.value, &inv.value) != self.model.identity() {
                return Err(bad("inverse value does not invert"));
            }
        }
        Ok(())
    }

    pub fn model(&self) -> GroupModel {
        self.model
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn get(&self, id: usize) -> &Generator {
        &self.gens[id]
    }

    pub fn name(&self, id: usize) -> &str {
        &self.gens[id].name
    }

    pub fn value(&self, id: usize) -> &GroupElement {
        &self.gens[id].value
    }

    pub fn inverse_of(&self, id: usize) -> usize {
        self.gens[id].inverse
    }

    pub fn lookup(&self, name: &str) -> Result<usize> {
        self.gens
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    /// Parses whitespace-separated generator names, or an unseparated string
    /// split greedily into the longest matching names.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() || text == "ε" {
            return Ok(Word::empty());
        }
        if text.contains(char::is_whitespace) {
            return text.split_whitespace().map(|t| self.lookup(t)).collect::<Result<_>>().map(Word);
        }
        let mut out = Vec::new();
        let mut rest = text;
        while !rest.is_empty() {
            let best = self
                .gens
                .iter()
                .enumerate()
                .filter(|(_, g)| rest.starts_with(g.name.as_str()))
                .max_by_key(|(_, g)| g.name.len());
            match best {
                Some((i, g)) => {
                    out.push(i);
                    rest = &rest[g.name.len()..];
                }
                None => return Err(Error::UnknownGenerator(rest.to_string())),
            }
        }
        Ok(Word(out))
    }

    pub fn format_word(&self, w: &[usize]) -> String {
        if w.is_empty() {
            return "ε".into();
        }
        let single = self.gens.iter().all(|g| g.name.chars().count() == 1);
        let names: Vec<&str> = w.iter().map(|&i| self.gens[i].name.as_str()).collect();
        if single {
            names.concat()
        } else {
            names.join(" ")
        }
    }

    pub fn evaluate(&self, w: &[usize]) -> GroupElement {
        self.evaluate_from(&self.model.identity(), w)
    }

    pub fn evaluate_from(&self, start: &GroupElement, w: &[usize]) -> GroupElement {
        w.iter().fold(start.clone(), |acc, &i| self.model.multiply(&acc, &self.gens[i].value))
    }

    pub fn inverse_word(&self, w: &[usize]) -> Word {
        Word(w.iter().rev().map(|&i| self.gens[i].inverse).collect())
    }

    /// Cancels adjacent inverse pairs until none remain.
    pub fn free_reduce(&self, w: &[usize]) -> Word {
        let mut out: Vec<usize> = Vec::with_capacity(w.len());
        for &i in w {
            if out.last().is_some_and(|&j| self.gens[j].inverse == i) {
                out.pop();
            } else {
                out.push(i);
            }
        }
        Word(out)
    }

    /// Index of the generator whose value equals `g`, if any.
    pub fn find_value(&self, g: &GroupElement) -> Option<usize> {
        self.gens.iter().position(|x| &x.value == g)
    }
}
