use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{CayleyAutomaticStructure, Codec, SymbolBinding};
use crate::automata::{Alphabet, Sym};
use crate::error::{Error, Result};
use crate::group::{GeneratorSet, GroupElement, Word};

impl CayleyAutomaticStructure {
    /// Adds every letter of the language alphabet to the generating set.
    ///
    /// `designated[i]` is a word over the current generators giving the value
    /// of letter `i`.  Letters with non-involutive values also get an inverse
    /// generator.  Existing generator indices, the language and the codec are
    /// unchanged; multipliers of the new generators are composed from the
    /// existing ones along the designated words.
    pub fn merge_alphabet(&self, name: &str, designated: &[Word]) -> Result<CayleyAutomaticStructure> {
        let alphabet = self.alphabet().clone();
        if designated.len() != alphabet.len() {
            return Err(Error::InvalidParameter(format!(
                "{} designated words for {} letters",
                designated.len(),
                alphabet.len()
            )));
        }
        let mut gens = self.generators.clone();
        let mut multipliers = self.multipliers.clone();
        let mut symbols = Vec::with_capacity(alphabet.len());
        for (letter, w) in alphabet.letters().iter().zip(designated) {
            if let Some(&bad) = w.iter().find(|&&g| g >= self.generators.len()) {
                return Err(Error::UnknownGenerator(format!("#{bad}")));
            }
            let value = self.generators.evaluate(w);
            let (id, inv) = gens.push_symmetric(letter, value)?;
            multipliers.insert(id, self.word_multiplier(w)?);
            if inv != id {
                let wi = self.generators.inverse_word(w);
                multipliers.insert(inv, self.word_multiplier(&wi)?);
            }
            symbols.push(SymbolBinding { generator: id, designated: Some(w.clone()) });
        }
        Ok(CayleyAutomaticStructure {
            name: name.to_string(),
            generators: gens,
            language: self.language.clone(),
            codec: self.codec.clone(),
            multipliers,
            symbols: Some(symbols),
        })
    }

    /// Like [`merge_alphabet`](Self::merge_alphabet), taking letter values
    /// and choosing geodesic designated words.
    pub fn merge_with_values(&self, name: &str, values: &[GroupElement]) -> Result<CayleyAutomaticStructure> {
        let metric = self.metric();
        let id = self.model().identity();
        let words = values
            .iter()
            .map(|v| metric.geodesic(&id, v, None))
            .collect::<Result<Vec<_>>>()?;
        self.merge_alphabet(name, &words)
    }
}

/// A change of generating set for a structure whose letters are generators.
///
/// `rho[x]` writes generator `x` of the structure as a word over the new set;
/// `kappa[y]` writes new generator `y` as a word over the structure's set.
#[derive(Clone, Debug)]
pub struct TransportSpec {
    pub generators: GeneratorSet,
    pub rho: Vec<Word>,
    pub kappa: Vec<Word>,
}

/// Result of a transport, with the length constants of the substitution.
#[derive(Clone, Debug)]
pub struct Transported {
    pub structure: CayleyAutomaticStructure,
    /// `max |kappa(y)|`.
    pub m1: u64,
    /// `max |rho(x)|`.
    pub m2: u64,
}

impl CayleyAutomaticStructure {
    /// Re-expresses the structure over a new generating set.
    ///
    /// The normal forms become `rho`-images of the old ones.  Letter images
    /// must be distinct words of one common length, which keeps the image
    /// language and the multipliers synchronous.
    pub fn transport(&self, name: &str, spec: &TransportSpec, sample_depth: usize) -> Result<Transported> {
        let symbols = self
            .symbols
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("transport needs letters bound to generators".into()))?;
        let ys = &spec.generators;
        if ys.model() != self.model() {
            return Err(Error::ModelMismatch(self.model().name()));
        }
        if spec.rho.len() != self.generators.len() || spec.kappa.len() != ys.len() {
            return Err(Error::InvalidParameter("rho and kappa must cover every generator".into()));
        }
        for (x, w) in spec.rho.iter().enumerate() {
            if w.iter().any(|&y| y >= ys.len()) || ys.evaluate(w) != *self.generators.value(x) {
                return Err(Error::ValueMismatch(format!(
                    "rho({}) = {} does not evaluate to the generator",
                    self.generators.name(x),
                    safe_format(ys, w)
                )));
            }
        }
        for (y, w) in spec.kappa.iter().enumerate() {
            if w.iter().any(|&x| x >= self.generators.len()) || self.generators.evaluate(w) != *ys.value(y) {
                return Err(Error::ValueMismatch(format!(
                    "kappa({}) = {} does not evaluate to the generator",
                    ys.name(y),
                    safe_format(&self.generators, w)
                )));
            }
        }
        let images: Vec<Vec<Sym>> = symbols
            .iter()
            .map(|b| spec.rho[b.generator].iter().map(|&y| Sym::letter(y)).collect())
            .collect();
        let block = images[0].len();
        if block == 0 || images.iter().any(|w| w.len() != block) {
            return Err(Error::InvalidParameter(
                "letter images under rho must be non-empty and of equal length".into(),
            ));
        }
        let distinct: BTreeSet<&Vec<Sym>> = images.iter().collect();
        if distinct.len() != images.len() {
            return Err(Error::NotInjective("rho identifies two letters".into()));
        }
        let alphabet = Arc::new(Alphabet::new(ys.generators().iter().map(|g| g.name.clone()))?);
        let language = self.language.substitute_uniform(alphabet.clone(), &images, block)?;
        let mut multipliers = BTreeMap::new();
        for (y, w) in spec.kappa.iter().enumerate() {
            let m = self.word_multiplier(w)?;
            multipliers.insert(y, m.substitute_uniform(alphabet.clone(), &images, block)?);
        }
        // Sampled injectivity of the induced map on normal forms.
        let mut seen = BTreeSet::new();
        for conv in self.language.enumerate(sample_depth) {
            let img: Vec<Sym> = conv.0[0].iter().flat_map(|s| images[s.index().unwrap()].clone()).collect();
            if !seen.insert(img) {
                return Err(Error::NotInjective(format!(
                    "two normal forms share the image of {}",
                    self.format_word(&conv.0[0])
                )));
            }
        }
        let codec = Codec::Block {
            inner: Box::new(self.codec.clone()),
            block,
            images: images
                .iter()
                .map(|w| w.iter().map(|s| s.index().unwrap()).collect())
                .collect(),
        };
        let structure = CayleyAutomaticStructure {
            name: name.to_string(),
            generators: ys.clone(),
            language,
            codec,
            multipliers,
            symbols: Some((0..ys.len()).map(|y| SymbolBinding { generator: y, designated: None }).collect()),
        };
        Ok(Transported {
            structure,
            m1: spec.kappa.iter().map(|w| w.len() as u64).max().unwrap_or(0),
            m2: spec.rho.iter().map(|w| w.len() as u64).max().unwrap_or(0),
        })
    }
}

fn safe_format(gens: &GeneratorSet, w: &Word) -> String {
    if w.iter().all(|&g| g < gens.len()) {
        gens.format_word(w)
    } else {
        format!("{:?}", w.0)
    }
}
