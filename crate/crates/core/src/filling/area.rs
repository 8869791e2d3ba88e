use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GeneratorSet, GroupModel, Word};

/// A finite presentation over a model's generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: GeneratorSet,
    pub relators: Vec<Word>,
}

/// File form of a presentation: relators are spelled over the model's
/// standard generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationJson {
    pub model: String,
    pub relators: Vec<String>,
}

impl Presentation {
    pub fn new(generators: GeneratorSet, relators: Vec<Word>) -> Result<Self> {
        let id = generators.model().identity();
        for r in &relators {
            if r.is_empty() || r.iter().any(|&g| g >= generators.len()) {
                return Err(Error::InvalidParameter("relators must be non-empty words over the generators".into()));
            }
            if generators.evaluate(r) != id {
                return Err(Error::NotALoop(generators.format_word(r)));
            }
        }
        Ok(Presentation { generators, relators })
    }

    /// The usual presentation of a model over its standard generators.
    pub fn standard(model: GroupModel) -> Result<Self> {
        let gens = model.standard_generators();
        let texts: Vec<String> = match model {
            GroupModel::Abelian(k) => {
                let names: Vec<String> = (0..k)
                    .map(|i| gens.name(2 * i as usize).to_string())
                    .collect();
                let mut out = Vec::new();
                for i in 0..names.len() {
                    for j in i + 1..names.len() {
                        out.push(commutator_text(&names[i], &names[j]));
                    }
                }
                out
            }
            GroupModel::Heisenberg => vec!["x x y X Y X y x Y X".into(), "y x y X Y x Y X".into()],
            GroupModel::BaumslagSolitar => vec!["t a T A A".into()],
            GroupModel::Lamplighter => {
                return Err(Error::InvalidParameter("the lamplighter group is not finitely presented".into()))
            }
        };
        let relators = texts.iter().map(|t| gens.parse_word(t)).collect::<Result<_>>()?;
        Presentation::new(gens, relators)
    }

    pub fn from_json(json: &PresentationJson) -> Result<Self> {
        let model = GroupModel::from_name(&json.model)?;
        let gens = model.standard_generators();
        let relators = json
            .relators
            .iter()
            .enumerate()
            .map(|(i, t)| {
                gens.parse_word(t)
                    .map_err(|e| Error::InvalidParameter(format!("relators[{i}]: {e}")))
            })
            .collect::<Result<_>>()?;
        Presentation::new(gens, relators)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Presentation::from_json(&serde_json::from_str(text)?)
    }

    pub fn max_relator_len(&self) -> usize {
        self.relators.iter().map(|r| r.len()).max().unwrap_or(0)
    }

    /// Cyclic conjugates of the relators and their inverses, deduplicated and
    /// sorted.
    pub fn insertions(&self) -> Vec<Word> {
        let mut out = BTreeSet::new();
        for r in &self.relators {
            for w in [r.clone(), self.generators.inverse_word(r)] {
                for k in 0..w.len() {
                    let mut c = w[k..].to_vec();
                    c.extend_from_slice(&w[..k]);
                    out.insert(Word(c));
                }
            }
        }
        out.into_iter().collect()
    }
}

fn commutator_text(a: &str, b: &str) -> String {
    let inv = |x: &str| crate::group::inverse_name(x);
    format!("{a} {b} {} {}", inv(a), inv(b))
}

/// One move: insert `inserted` before position `position` of the current
/// freely reduced word, then reduce freely.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AreaStep {
    pub position: usize,
    pub inserted: Word,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AreaResult {
    pub word: Word,
    pub area: u32,
    pub steps: Vec<AreaStep>,
    pub nodes: u64,
}

fn reduce_into(inverse: &[usize], parts: &[&[usize]]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(parts.iter().map(|p| p.len()).sum());
    for p in parts {
        for &x in *p {
            if out.last().is_some_and(|&y| inverse[y] == x) {
                out.pop();
            } else {
                out.push(x);
            }
        }
    }
    out
}

struct Search<'a> {
    inverse: Vec<usize>,
    moves: &'a [Word],
    /// Words known not to reach the empty word within the stored budget.
    failed: HashMap<Vec<usize>, u32>,
    nodes: u64,
    node_budget: u64,
    path: Vec<AreaStep>,
}

impl Search<'_> {
    fn lower_bound(&self, w: &[usize]) -> u32 {
        u32::from(!w.is_empty())
    }

    fn dfs(&mut self, w: &[usize], budget: u32) -> Result<bool> {
        if w.is_empty() {
            return Ok(true);
        }
        if self.lower_bound(w) > budget || self.failed.get(w).is_some_and(|&b| b >= budget) {
            return Ok(false);
        }
        self.nodes += 1;
        if self.nodes > self.node_budget {
            return Err(Error::SearchBudget(self.node_budget));
        }
        let mut children: Vec<(usize, usize, usize, Vec<usize>)> = Vec::new();
        let mut seen = BTreeSet::new();
        // Some face of a minimal diagram shares an edge with the boundary, so
        // insertions that cancel nothing can be skipped.
        for p in 0..=w.len() {
            for (i, r) in self.moves.iter().enumerate() {
                let child = reduce_into(&self.inverse, &[&w[..p], r, &w[p..]]);
                if child.len() < w.len() + r.len()
                    && self.lower_bound(&child) < budget
                    && seen.insert(child.clone())
                {
                    children.push((child.len(), p, i, child));
                }
            }
        }
        children.sort();
        for (_, p, i, child) in children {
            self.path.push(AreaStep { position: p, inserted: self.moves[i].clone() });
            if self.dfs(&child, budget - 1)? {
                return Ok(true);
            }
            self.path.pop();
        }
        let entry = self.failed.entry(w.to_vec()).or_insert(0);
        *entry = (*entry).max(budget);
        Ok(false)
    }
}

/// Exact area of a loop by iterative deepening over relator insertions.
///
/// Fails with [`Error::AreaExceedsMax`] when the area exceeds `max_area` and
/// with [`Error::SearchBudget`] when more than `node_budget` nodes are
/// expanded.
pub fn area(p: &Presentation, w: &Word, max_area: u32, node_budget: u64) -> Result<AreaResult> {
    match area_search(p, w, max_area, node_budget)? {
        SearchOutcome::Found(r) => Ok(r),
        SearchOutcome::Exceeded => Err(Error::AreaExceedsMax(max_area)),
        SearchOutcome::Budget { .. } => Err(Error::SearchBudget(node_budget)),
    }
}

pub(crate) enum SearchOutcome {
    Found(AreaResult),
    Exceeded,
    /// The node budget ran out; every bound below `proved` was refuted.
    Budget { proved: u32 },
}

pub(crate) fn area_search(p: &Presentation, w: &Word, max_area: u32, node_budget: u64) -> Result<SearchOutcome> {
    let gens = &p.generators;
    if w.iter().any(|&g| g >= gens.len()) {
        return Err(Error::InvalidParameter("word uses letters outside the presentation".into()));
    }
    if gens.evaluate(w) != gens.model().identity() {
        return Err(Error::NotALoop(gens.format_word(w)));
    }
    let moves = p.insertions();
    let mut search = Search {
        inverse: (0..gens.len()).map(|i| gens.inverse_of(i)).collect(),
        moves: &moves,
        failed: HashMap::new(),
        nodes: 0,
        node_budget,
        path: Vec::new(),
    };
    let start = gens.free_reduce(w).0;
    if start.is_empty() {
        return Ok(SearchOutcome::Found(AreaResult { word: w.clone(), area: 0, steps: Vec::new(), nodes: 0 }));
    }
    if moves.is_empty() {
        return Ok(SearchOutcome::Exceeded);
    }
    let first = search.lower_bound(&start);
    for bound in first..=max_area {
        match search.dfs(&start, bound) {
            Ok(true) => {
                return Ok(SearchOutcome::Found(AreaResult {
                    word: w.clone(),
                    area: bound,
                    steps: search.path,
                    nodes: search.nodes,
                }))
            }
            Ok(false) => {}
            Err(Error::SearchBudget(_)) => return Ok(SearchOutcome::Budget { proved: bound.max(first) }),
            Err(e) => return Err(e),
        }
    }
    Ok(SearchOutcome::Exceeded)
}

/// Lower bound on the area of a loop and whether it is exact.
pub(crate) fn area_lower_bound(p: &Presentation, w: &Word, max_area: u32, node_budget: u64) -> Result<(u32, bool)> {
    Ok(match area_search(p, w, max_area, node_budget)? {
        SearchOutcome::Found(r) => (r.area, true),
        SearchOutcome::Exceeded => (max_area + 1, false),
        SearchOutcome::Budget { proved } => (proved, false),
    })
}

/// Replays a certificate: each step must insert a cyclic conjugate of a
/// relator or its inverse, and the word must end empty after exactly
/// `area` steps.
pub fn replay_area(p: &Presentation, result: &AreaResult) -> bool {
    let gens = &p.generators;
    let inverse: Vec<usize> = (0..gens.len()).map(|i| gens.inverse_of(i)).collect();
    let allowed: BTreeSet<Word> = p.insertions().into_iter().collect();
    let mut cur = gens.free_reduce(&result.word).0;
    for step in &result.steps {
        if !allowed.contains(&step.inserted) || step.position > cur.len() {
            return false;
        }
        cur = reduce_into(&inverse, &[&cur[..step.position], &step.inserted, &cur[step.position..]]);
    }
    cur.is_empty() && result.steps.len() == result.area as usize
}
