use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::area::{area, area_lower_bound, Presentation};
use super::{check_certificate, corridor_fill, FillingCertificate, FillingConstants};
use crate::error::{Error, Result};
use crate::group::{GeneratorSet, Word, WordMetric};
use crate::structures::CayleyAutomaticStructure;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DehnOptions {
    /// Loops sampled per call.
    pub samples: usize,
    pub seed: u64,
    /// Area limit for the sampled loops.
    pub max_area: u32,
    /// Area limit for the cells; larger cells get a lower bound.
    pub cell_max_area: u32,
    /// Node budget of each area search.
    pub node_budget: u64,
}

impl Default for DehnOptions {
    fn default() -> Self {
        DehnOptions { samples: 12, seed: 0, max_area: 8, cell_max_area: 6, node_budget: 200_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DehnLoopReport {
    #[serde(rename = "loop")]
    pub loop_word: String,
    pub length: u64,
    pub certificate_valid: bool,
    pub loop_area: u32,
    pub cells: u64,
    /// Largest cell area, or a lower bound when not every cell was solved.
    pub max_cell_area: u32,
    pub max_cell_area_exact: bool,
    /// `D n^2` times the largest cell area.
    pub bound: u64,
    pub margin: i64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DehnReport {
    pub structure: String,
    pub n: u64,
    pub seed: u64,
    pub constants: FillingConstants,
    pub loops: Vec<DehnLoopReport>,
}

impl DehnReport {
    pub fn passed(&self) -> bool {
        self.loops.iter().all(|l| l.passed)
    }

    pub fn min_margin(&self) -> Option<i64> {
        self.loops.iter().map(|l| l.margin).min()
    }
}

/// A random loop of length at most `max_len`: a freely reduced random word of
/// length up to `max_len / 2` closed off by a geodesic.
pub fn random_loop<R: Rng>(gens: &GeneratorSet, max_len: usize, rng: &mut R) -> Result<Word> {
    if max_len < 2 || gens.is_empty() {
        return Ok(Word::empty());
    }
    let half = rng.gen_range(1..=max_len / 2);
    let mut w: Vec<usize> = Vec::with_capacity(max_len);
    while w.len() < half {
        let g = rng.gen_range(0..gens.len());
        if w.last().is_none_or(|&last| gens.inverse_of(last) != g) {
            w.push(g);
        }
    }
    let end = gens.evaluate(&w);
    let back = WordMetric::new(gens).geodesic(&end, &gens.model().identity(), Some(half as u64))?;
    w.extend(back.0);
    Ok(Word(w))
}

/// Images of structure generators as words over the presentation.
fn generator_images(s: &CayleyAutomaticStructure, p: &Presentation) -> Result<Vec<Word>> {
    let metric = WordMetric::new(&p.generators);
    let id = s.model().identity();
    s.generators
        .generators()
        .iter()
        .map(|g| match p.generators.find_value(&g.value) {
            Some(i) => Ok(Word(vec![i])),
            None => metric.geodesic(&id, &g.value, None),
        })
        .collect()
}

fn substitute(images: &[Word], w: &[usize]) -> Word {
    Word(w.iter().flat_map(|&g| images[g].iter().copied()).collect())
}

/// Checks `area(w) <= D |w|^2 max_i area(w_i)` for one certificate, with
/// cell words pushed into the presentation's generators.
pub fn dehn_check_certificate(
    s: &CayleyAutomaticStructure,
    p: &Presentation,
    cert: &FillingCertificate,
    options: &DehnOptions,
) -> Result<DehnLoopReport> {
    if p.generators.model() != s.model() {
        return Err(Error::ModelMismatch(s.model().name()));
    }
    let images = generator_images(s, p)?;
    let check = check_certificate(s, cert, None)?;
    let valid = check.free_reduction_identity && check.cells_are_loops;
    let loop_p = substitute(&images, &cert.loop_word);
    let loop_area = area(p, &loop_p, options.max_area, options.node_budget)?.area;
    let (max_cell_area, exact) = if valid {
        let cells: BTreeSet<Word> = cert
            .cells
            .iter()
            .map(|c| p.generators.free_reduce(&substitute(&images, &c.boundary)))
            .collect();
        let cells: Vec<Word> = cells.into_iter().collect();
        let bounds = cells
            .par_iter()
            .map(|w| area_lower_bound(p, w, options.cell_max_area, options.node_budget))
            .collect::<Result<Vec<_>>>()?;
        let max = bounds.iter().map(|b| b.0).max().unwrap_or(0);
        // The maximum is exact when some cell attaining it was solved and
        // every other cell was solved or bounded below it.
        let exact = bounds.iter().all(|&(a, e)| e || a < max) && bounds.iter().any(|&(a, e)| e && a == max)
            || bounds.is_empty();
        (max, exact)
    } else {
        (0, false)
    };
    let n = cert.loop_word.len() as u64;
    let bound = cert.constants.dehn * n * n * max_cell_area as u64;
    Ok(DehnLoopReport {
        loop_word: s.generators.format_word(&cert.loop_word),
        length: n,
        certificate_valid: valid,
        loop_area,
        cells: cert.cells.len() as u64,
        max_cell_area,
        max_cell_area_exact: exact,
        bound,
        margin: bound as i64 - loop_area as i64,
        passed: valid && loop_area as u64 <= bound,
    })
}

/// Samples loops of length at most `n` over the presentation's generators,
/// fills each through the structure and checks the Dehn inequality with
/// `D = c + e`.
pub fn dehn_inequality_check(
    s: &CayleyAutomaticStructure,
    p: &Presentation,
    n: usize,
    options: &DehnOptions,
) -> Result<DehnReport> {
    if p.generators.model() != s.model() {
        return Err(Error::ModelMismatch(s.model().name()));
    }
    let to_structure: Vec<usize> = p
        .generators
        .generators()
        .iter()
        .map(|g| {
            s.generators
                .lookup(&g.name)
                .ok()
                .filter(|&i| s.generators.value(i) == &g.value)
                .or_else(|| s.generators.find_value(&g.value))
                .ok_or_else(|| Error::UnknownGenerator(g.name.clone()))
        })
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed ^ (n as u64).rotate_left(32));
    let loops: Vec<Word> = (0..options.samples)
        .map(|_| random_loop(&p.generators, n, &mut rng))
        .collect::<Result<_>>()?;
    let loops = loops
        .par_iter()
        .map(|w| {
            let mapped = Word(w.iter().map(|&g| to_structure[g]).collect());
            let cert = corridor_fill(s, &mapped)?;
            dehn_check_certificate(s, p, &cert, options)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DehnReport {
        structure: s.name.clone(),
        n: n as u64,
        seed: options.seed,
        constants: FillingConstants::from_structure(s)?,
        loops,
    })
}
