use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{CayleyAutomaticStructure, Codec, SymbolBinding};
use crate::automata::SyncAutomaton;
use crate::error::{Error, Result};
use crate::group::{GeneratorSet, GroupModel};

/// On-disk description of a structure. Automata live in separate files
/// whose paths are relative to the bundle file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureBundle {
    pub name: String,
    pub model: String,
    pub codec: Codec,
    pub generators: GeneratorSet,
    pub language: String,
    /// Generator name to automaton file.
    pub multipliers: BTreeMap<String, String>,
    #[serde(default)]
    pub symbols: Option<Vec<SymbolBinding>>,
}

pub const BUNDLE_FILE: &str = "bundle.json";

impl CayleyAutomaticStructure {
    /// Writes `bundle.json`, `language.json` and one `multiplier-<i>.json`
    /// per generator into `dir`, returning the bundle path.
    pub fn export_bundle(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("language.json"), self.language.to_json_string())?;
        let mut multipliers = BTreeMap::new();
        for (&g, m) in &self.multipliers {
            let file = format!("multiplier-{g}.json");
            std::fs::write(dir.join(&file), m.to_json_string())?;
            multipliers.insert(self.generators.name(g).to_string(), file);
        }
        let bundle = StructureBundle {
            name: self.name.clone(),
            model: self.model().name(),
            codec: self.codec.clone(),
            generators: self.generators.clone(),
            language: "language.json".into(),
            multipliers,
            symbols: self.symbols.clone(),
        };
        let path = dir.join(BUNDLE_FILE);
        std::fs::write(&path, serde_json::to_string_pretty(&bundle)? + "\n")?;
        Ok(path)
    }

    /// Reads a bundle written by [`export_bundle`](Self::export_bundle) or by
    /// hand, checking tape counts, alphabets and generator names.
    pub fn load_bundle(path: &Path) -> Result<CayleyAutomaticStructure> {
        let text = std::fs::read_to_string(path)?;
        let bundle: StructureBundle = serde_json::from_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let model = GroupModel::from_name(&bundle.model)?;
        if bundle.generators.model() != model {
            return Err(Error::ModelMismatch(bundle.model.clone()));
        }
        let generators = GeneratorSet::new(model, bundle.generators.generators().to_vec())?;
        let language = SyncAutomaton::load(&base.join(&bundle.language))?;
        if language.tapes() != 1 {
            return Err(Error::TapeMismatch { expected: 1, found: language.tapes() });
        }
        let mut multipliers = BTreeMap::new();
        for (name, file) in &bundle.multipliers {
            let g = generators.lookup(name)?;
            let m = SyncAutomaton::load(&base.join(file))?;
            if m.tapes() != 2 {
                return Err(Error::TapeMismatch { expected: 2, found: m.tapes() });
            }
            if m.alphabet() != language.alphabet() {
                return Err(Error::AlphabetMismatch);
            }
            multipliers.insert(g, m);
        }
        if let Some(symbols) = &bundle.symbols {
            if symbols.len() != language.alphabet().len()
                || symbols.iter().any(|b| b.generator >= generators.len())
            {
                return Err(Error::InvalidParameter("symbol bindings must cover the alphabet".into()));
            }
        }
        Ok(CayleyAutomaticStructure {
            name: bundle.name,
            generators,
            language,
            codec: bundle.codec,
            multipliers,
            symbols: bundle.symbols,
        })
    }
}
