//! Cayley automatic structures: a regular language of normal forms, a
//! bijection onto the group, and one multiplier automaton per generator.

mod bundle;
mod catalog;
mod codecs;
mod transform;
mod verify;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::automata::{compose_word_multiplier, state_bound_constants, Alphabet, StateBoundConstants, Sym, SyncAutomaton};
use crate::error::{Error, Result};
use crate::group::{GeneratorSet, GroupElement, GroupModel, Word, WordMetric};

pub use bundle::{StructureBundle, BUNDLE_FILE};
pub use catalog::{build_structure, catalog, doubled_spec, find_entry, CatalogEntry};
pub use codecs::{
    from_lsb_bits, lsb_bits, pair_index, pair_letter, zigzag_decode, zigzag_encode, zigzag_index,
    zigzag_position, Codec, LAMP_LETTERS, PAIR_LETTERS,
};
pub use transform::{TransportSpec, Transported};
pub use verify::{verify_structure, CheckOutcome, VerificationReport, VerifyOptions};

/// How a letter of the language alphabet is read as a generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolBinding {
    /// Generator whose value the letter carries.
    pub generator: usize,
    /// Word over the original generators with the same value, when the letter
    /// was added to an existing generating set.
    pub designated: Option<Word>,
}

/// A Cayley automatic structure.
///
/// When `symbols` is present every letter of the language alphabet is also
/// a generator, so a normal form can be evaluated directly as a word.
#[derive(Clone, Debug)]
pub struct CayleyAutomaticStructure {
    pub name: String,
    pub generators: GeneratorSet,
    pub language: SyncAutomaton,
    pub codec: Codec,
    pub multipliers: BTreeMap<usize, SyncAutomaton>,
    pub symbols: Option<Vec<SymbolBinding>>,
}

impl CayleyAutomaticStructure {
    pub fn model(&self) -> GroupModel {
        self.generators.model()
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        self.language.alphabet()
    }

    pub fn is_merged(&self) -> bool {
        self.symbols.is_some()
    }

    pub fn metric(&self) -> WordMetric<'_> {
        WordMetric::new(&self.generators)
    }

    pub fn multiplier(&self, generator: usize) -> Result<&SyncAutomaton> {
        self.multipliers
            .get(&generator)
            .ok_or_else(|| Error::MissingMultiplier(self.generators.name(generator).to_string()))
    }

    /// `ψ(w)`.
    pub fn psi(&self, word: &[Sym]) -> Result<GroupElement> {
        self.codec.decode(word)
    }

    /// `ψ^-1(g)`.
    pub fn psi_inv(&self, g: &GroupElement) -> Result<Vec<Sym>> {
        self.model().check(g)?;
        self.codec.encode(g)
    }

    /// The normal form read as a word over the generators.
    pub fn letters_as_word(&self, word: &[Sym]) -> Result<Word> {
        let symbols = self.symbols.as_ref().ok_or_else(|| {
            Error::InvalidParameter(format!("structure `{}` has no letter bindings", self.name))
        })?;
        Ok(Word(word.iter().map(|s| symbols[s.index().expect("letter")].generator).collect()))
    }

    /// `π(w)`: the value of the normal form read as a word.
    pub fn pi(&self, word: &[Sym]) -> Result<GroupElement> {
        Ok(self.generators.evaluate(&self.letters_as_word(word)?))
    }

    pub fn constants(&self) -> Result<StateBoundConstants> {
        let e = self.psi_inv(&self.model().identity())?.len();
        Ok(state_bound_constants(self.multipliers.values(), e))
    }

    /// Two-tape automaton for `ψ(v) = ψ(u) w`.
    pub fn word_multiplier(&self, w: &[usize]) -> Result<SyncAutomaton> {
        compose_word_multiplier(&self.multipliers, w, |g| self.generators.name(g).to_string())
    }

    pub fn format_word(&self, word: &[Sym]) -> String {
        if word.is_empty() {
            return "ε".into();
        }
        self.alphabet().format_word(word)
    }

    pub fn parse_word(&self, text: &str) -> Result<Vec<Sym>> {
        self.alphabet().parse_word(text)
    }
}
