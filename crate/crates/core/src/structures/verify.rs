use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CayleyAutomaticStructure;
use crate::automata::{Convolution, Sym};
use crate::error::{Error, Result};
use crate::group::GroupElement;

/// Depths and budgets for [`verify_structure`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Normal forms and multiplier pairs are checked up to this length.
    pub depth: usize,
    /// Radius of the ball on which `ψ ψ^-1 = id` is checked.
    pub ball_radius: u64,
    /// Maximum number of words any single enumeration may produce.
    pub max_words: usize,
}

impl VerifyOptions {
    pub fn new(depth: usize) -> Self {
        VerifyOptions { depth, ball_radius: depth.min(4) as u64, max_words: 4_000_000 }
    }
}

/// Result of one family of checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub passed: bool,
    pub checked: u64,
    pub counterexample: Option<String>,
}

impl CheckOutcome {
    fn from_first(checked: u64, failure: Option<String>) -> Self {
        CheckOutcome { passed: failure.is_none(), checked, counterexample: failure }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub structure: String,
    pub depth: usize,
    pub regularity: CheckOutcome,
    pub bijectivity: CheckOutcome,
    pub soundness: CheckOutcome,
    pub completeness: CheckOutcome,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.regularity.passed
            && self.bijectivity.passed
            && self.soundness.passed
            && self.completeness.passed
    }

    /// First failing check and its counterexample.
    pub fn first_failure(&self) -> Option<(&'static str, &CheckOutcome)> {
        [
            ("regularity", &self.regularity),
            ("bijectivity", &self.bijectivity),
            ("soundness", &self.soundness),
            ("completeness", &self.completeness),
        ]
        .into_iter()
        .find(|(_, c)| !c.passed)
    }
}

fn collect_bounded(
    it: impl Iterator<Item = Convolution>,
    max_words: usize,
) -> Result<Vec<Convolution>> {
    let mut out = Vec::new();
    for c in it {
        if out.len() == max_words {
            return Err(Error::EnumerationBudget(max_words));
        }
        out.push(c);
    }
    Ok(out)
}

/// Checks the defining properties of a structure on all normal forms of
/// length at most `options.depth`:
///
/// * regularity: tape counts, alphabets and a multiplier for every generator;
/// * bijectivity: `ψ^-1 ψ = id` on normal forms, and `ψ ψ^-1 = id` with
///   `ψ^-1(g)` a normal form for `g` in a ball;
/// * soundness: every accepted pair `(u, v)` has `u, v` normal forms and
///   `ψ(v) = ψ(u) a`;
/// * completeness: for every normal form `u`, the pair `(u, ψ^-1(ψ(u) a))`
///   is accepted.
///
/// Counterexamples are the first in enumeration order, independent of the
/// thread count.
pub fn verify_structure(s: &CayleyAutomaticStructure, options: &VerifyOptions) -> Result<VerificationReport> {
    let regularity = check_regularity(s);
    let gens = &s.generators;
    let model = s.model();
    let words: Vec<Vec<Sym>> = collect_bounded(s.language.enumerate(options.depth), options.max_words)?
        .into_iter()
        .map(|c| c.0.into_iter().next().unwrap())
        .collect();
    let values: Vec<Result<GroupElement>> = words.par_iter().map(|w| s.psi(w)).collect();

    let bijectivity = {
        let on_words = words
            .par_iter()
            .zip(values.par_iter())
            .find_map_first(|(w, g)| {
                let back = g.as_ref().ok().map(|g| s.psi_inv(g));
                match back {
                    Some(Ok(ref b)) if b == w => None,
                    _ => Some(format!("ψ^-1(ψ({})) differs from the word", s.format_word(w))),
                }
            });
        let ball = s.metric().ball(options.ball_radius)?;
        let on_ball = on_words.clone().or_else(|| {
            ball.par_iter().find_map_first(|g| match s.psi_inv(g) {
                Err(_) => Some(format!("{g} has no normal form")),
                Ok(w) => {
                    let accepted = s.language.accepts(&Convolution(vec![w.clone()])).unwrap_or(false);
                    if !accepted {
                        Some(format!("ψ^-1({g}) = {} is not accepted", s.format_word(&w)))
                    } else if s.psi(&w).ok().as_ref() != Some(g) {
                        Some(format!("ψ(ψ^-1({g})) differs from {g}"))
                    } else {
                        None
                    }
                }
            })
        });
        CheckOutcome::from_first((words.len() + ball.len()) as u64, on_ball)
    };

    let mut sound_checked = 0u64;
    let mut sound_fail = None;
    for (&a, m) in &s.multipliers {
        let pairs = collect_bounded(m.enumerate(options.depth), options.max_words)?;
        sound_checked += pairs.len() as u64;
        let fail = pairs.par_iter().find_map_first(|p| {
            let (u, v) = (&p.0[0], &p.0[1]);
            let in_lang = |w: &Vec<Sym>| s.language.accepts(&Convolution(vec![w.clone()])).unwrap_or(false);
            let describe = || format!("({}, {}) under {}", s.format_word(u), s.format_word(v), gens.name(a));
            if !in_lang(u) || !in_lang(v) {
                return Some(format!("{} contains a word outside the language", describe()));
            }
            match (s.psi(u), s.psi(v)) {
                (Ok(gu), Ok(gv)) if model.multiply(&gu, gens.value(a)) == gv => None,
                _ => Some(format!("{} is accepted but ψ(v) ≠ ψ(u)·{}", describe(), gens.name(a))),
            }
        });
        if fail.is_some() {
            sound_fail = fail;
            break;
        }
    }
    let soundness = CheckOutcome::from_first(sound_checked, sound_fail);

    let targets: HashMap<usize, &GroupElement> =
        (0..gens.len()).map(|a| (a, gens.value(a))).collect();
    let mut complete_fail = None;
    let mut complete_checked = 0u64;
    for a in 0..gens.len() {
        let Ok(m) = s.multiplier(a) else { continue };
        complete_checked += words.len() as u64;
        let fail = words.par_iter().zip(values.par_iter()).find_map_first(|(u, g)| {
            let g = g.as_ref().ok()?;
            let target = model.multiply(g, targets[&a]);
            let v = match s.psi_inv(&target) {
                Ok(v) => v,
                Err(_) => return Some(format!("{target} has no normal form")),
            };
            match m.accepts(&Convolution(vec![u.clone(), v.clone()])) {
                Ok(true) => None,
                _ => Some(format!(
                    "multiplier for {} rejects ({}, {})",
                    gens.name(a),
                    s.format_word(u),
                    s.format_word(&v)
                )),
            }
        });
        if fail.is_some() {
            complete_fail = fail;
            break;
        }
    }
    let completeness = CheckOutcome::from_first(complete_checked, complete_fail);

    Ok(VerificationReport {
        structure: s.name.clone(),
        depth: options.depth,
        regularity,
        bijectivity,
        soundness,
        completeness,
    })
}

fn check_regularity(s: &CayleyAutomaticStructure) -> CheckOutcome {
    let mut checked = 1u64;
    let fail = (|| {
        if s.language.tapes() != 1 {
            return Some("language automaton must have one tape".to_string());
        }
        if let Some(symbols) = &s.symbols {
            if symbols.len() != s.alphabet().len() {
                return Some("every letter needs a generator binding".into());
            }
            for (i, b) in symbols.iter().enumerate() {
                if b.generator >= s.generators.len() {
                    return Some(format!("letter {i} is bound to a missing generator"));
                }
            }
        }
        for a in 0..s.generators.len() {
            checked += 1;
            let Ok(m) = s.multiplier(a) else {
                return Some(format!("no multiplier for {}", s.generators.name(a)));
            };
            if m.tapes() != 2 {
                return Some(format!("multiplier for {} must have two tapes", s.generators.name(a)));
            }
            if m.alphabet() != s.alphabet() {
                return Some(format!("multiplier for {} uses another alphabet", s.generators.name(a)));
            }
        }
        None
    })();
    CheckOutcome::from_first(checked, fail)
}
