//! Corridor fillings of loops, a small van Kampen area oracle, the Dehn
//! inequality check and relator-length step functions.

mod area;
mod dehn;
mod step;

use serde::{Deserialize, Serialize};

use crate::automata::{Convolution, Sym};
use crate::error::{Error, Result};
use crate::group::{GeneratorSet, GroupElement, Word};
use crate::profile::DistanceProfile;
use crate::structures::CayleyAutomaticStructure;

pub use area::{area, replay_area, AreaResult, AreaStep, Presentation, PresentationJson};
pub use dehn::{
    dehn_check_certificate, dehn_inequality_check, random_loop, DehnLoopReport, DehnOptions, DehnReport,
};
pub use step::{phi_step_function, StepFunction};

/// Constants of the corridor construction: `c = m/2`, `d = e + m`,
/// `ς = 4m + 4`, and `D = c + e` for the Dehn inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillingConstants {
    pub m: u64,
    pub e: u64,
    pub c: u64,
    pub d: u64,
    pub varsigma: u64,
    #[serde(rename = "D")]
    pub dehn: u64,
}

impl FillingConstants {
    pub fn from_structure(s: &CayleyAutomaticStructure) -> Result<Self> {
        let k = s.constants()?;
        Ok(FillingConstants {
            m: k.m,
            e: k.e,
            c: k.m / 2,
            d: k.e + k.m,
            varsigma: 4 * k.m + 4,
            dehn: k.m / 2 + k.e,
        })
    }

    /// Argument `c n + d` at which `h` bounds the cells of a loop of length `n`.
    pub fn h_argument(&self, n: u64) -> u64 {
        self.c * n + self.d
    }

    /// `n (m n / 2 + e)`.
    pub fn cell_count_bound(&self, n: u64) -> u64 {
        n * (self.m * n / 2 + self.e)
    }
}

/// A cell `ρ w ρ^-1` of a filling: `boundary` is a loop, `conjugator` a path
/// from the basepoint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub corridor: usize,
    pub row: usize,
    pub conjugator: Word,
    pub boundary: Word,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillingCertificate {
    pub structure: String,
    #[serde(rename = "loop")]
    pub loop_word: Word,
    pub constants: FillingConstants,
    pub cells: Vec<Cell>,
    pub max_cell_perimeter: u64,
    /// Longest normal form or completed row word used.
    pub max_row_word: u64,
    /// Largest `d(π(x), ψ(x))` over construction words `x` with
    /// `|x| <= c n + d`; a lower bound for `h(c n + d)`.
    pub observed_h: u64,
}

impl FillingCertificate {
    /// `∏ ρ_i w_i ρ_i^-1` as an unreduced word.
    pub fn product(&self, gens: &GeneratorSet) -> Word {
        let mut out = Vec::new();
        for cell in &self.cells {
            out.extend_from_slice(&cell.conjugator);
            out.extend_from_slice(&cell.boundary);
            out.extend_from_slice(&gens.inverse_word(&cell.conjugator));
        }
        Word(out)
    }

    pub fn render(&self, gens: &GeneratorSet) -> RenderedCertificate {
        RenderedCertificate {
            structure: self.structure.clone(),
            loop_word: gens.format_word(&self.loop_word),
            loop_length: self.loop_word.len() as u64,
            constants: self.constants,
            max_cell_perimeter: self.max_cell_perimeter,
            observed_h: self.observed_h,
            cells: self
                .cells
                .iter()
                .map(|c| RenderedCell {
                    corridor: c.corridor,
                    row: c.row,
                    conjugator: gens.format_word(&c.conjugator),
                    boundary: gens.format_word(&c.boundary),
                    perimeter: c.boundary.len() as u64,
                })
                .collect(),
        }
    }
}

/// A certificate with words spelled out by generator names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedCertificate {
    pub structure: String,
    #[serde(rename = "loop")]
    pub loop_word: String,
    pub loop_length: u64,
    pub constants: FillingConstants,
    pub max_cell_perimeter: u64,
    pub observed_h: u64,
    pub cells: Vec<RenderedCell>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedCell {
    pub corridor: usize,
    pub row: usize,
    pub conjugator: String,
    pub boundary: String,
    pub perimeter: u64,
}

struct Corridor<'a> {
    s: &'a CayleyAutomaticStructure,
    h_argument: u64,
    max_row_word: u64,
    observed_h: u64,
}

impl Corridor<'_> {
    /// Path `π(x) -> ψ(x)`, recording its length.
    fn to_value(&mut self, x: &[Sym]) -> Result<Word> {
        let s = self.s;
        let geo = s.metric().geodesic(&s.pi(x)?, &s.psi(x)?, None)?;
        self.max_row_word = self.max_row_word.max(x.len() as u64);
        if x.len() as u64 <= self.h_argument {
            self.observed_h = self.observed_h.max(geo.len() as u64);
        }
        Ok(geo)
    }

    /// Row from `π(u_prefix)` to `π(v_prefix)` through the completion
    /// `(x_a, x_b)` of a multiplier run.
    fn row(&mut self, a: usize, u_prefix: &[Sym], v_prefix: &[Sym], tail: (&[Sym], &[Sym])) -> Result<Word> {
        let s = self.s;
        let gens = &s.generators;
        let x_a: Vec<Sym> = u_prefix.iter().chain(tail.0).copied().collect();
        let x_b: Vec<Sym> = v_prefix.iter().chain(tail.1).copied().collect();
        let mut out = s.letters_as_word(tail.0)?.0;
        out.extend(self.to_value(&x_a)?.0);
        out.push(a);
        out.extend(gens.inverse_word(&self.to_value(&x_b)?).0);
        out.extend(gens.inverse_word(&s.letters_as_word(tail.1)?).0);
        Ok(Word(out))
    }
}

/// Fills a loop over the structure's generators with cells whose perimeters
/// are bounded through the Cayley distance function.
///
/// For each letter `s_k` of the loop, the normal forms `u_{k-1}`, `u_k` of
/// consecutive prefix values are joined through the accepting run of the
/// multiplier for `s_k`: each row of the run is closed off by a shortest
/// completion, and consecutive rows bound a cell.  The result satisfies
/// `loop =_F ∏ ρ_i w_i ρ_i^-1` with cells listed corridor by corridor,
/// bottom to top.
pub fn corridor_fill(s: &CayleyAutomaticStructure, loop_word: &Word) -> Result<FillingCertificate> {
    let gens = &s.generators;
    let model = s.model();
    if let Some(&bad) = loop_word.iter().find(|&&g| g >= gens.len()) {
        return Err(Error::UnknownGenerator(format!("#{bad}")));
    }
    if gens.evaluate(loop_word) != model.identity() {
        return Err(Error::NotALoop(gens.format_word(loop_word)));
    }
    let constants = FillingConstants::from_structure(s)?;
    let n = loop_word.len() as u64;
    let mut corridor = Corridor { s, h_argument: constants.h_argument(n), max_row_word: 0, observed_h: 0 };

    let mut values: Vec<GroupElement> = vec![model.identity()];
    for &g in loop_word.iter() {
        values.push(model.multiply(values.last().unwrap(), gens.value(g)));
    }
    let forms: Vec<Vec<Sym>> = values.iter().map(|g| s.psi_inv(g)).collect::<Result<_>>()?;
    let base = {
        let u0 = &forms[0];
        let mut p = s.letters_as_word(u0)?.0;
        p.extend(corridor.to_value(u0)?.0);
        gens.inverse_word(&p)
    };

    let mut cells = Vec::new();
    for (k, &a) in loop_word.iter().enumerate() {
        let (u, v) = (&forms[k], &forms[k + 1]);
        let m = s.multiplier(a)?;
        let conv = Convolution(vec![u.clone(), v.clone()]);
        let run = m.accepting_run(&conv)?.ok_or_else(|| {
            Error::StructureViolation(format!(
                "multiplier for {} rejects ({}, {})",
                gens.name(a),
                s.format_word(u),
                s.format_word(v)
            ))
        })?;
        let len = conv.len();
        if len == 0 {
            let row = corridor.row(a, &[], &[], (&[], &[]))?;
            cells.push(Cell { corridor: k, row: 0, conjugator: base.clone(), boundary: row });
            continue;
        }
        let mut prev: Option<Word> = None;
        for j in 1..=len {
            let completion = m
                .shortest_completion(run[j])
                .ok_or_else(|| Error::NotCoAccessible(format!("state {} of {}", run[j], gens.name(a))))?;
            let tail_a: Vec<Sym> = completion.iter().map(|t| t[0]).filter(|x| !x.is_pad()).collect();
            let tail_b: Vec<Sym> = completion.iter().map(|t| t[1]).filter(|x| !x.is_pad()).collect();
            let (ua, vb) = (&u[..j.min(u.len())], &v[..j.min(v.len())]);
            let row = corridor.row(a, ua, vb, (&tail_a, &tail_b))?;
            let up = if j <= u.len() { s.letters_as_word(&u[j - 1..j])?.0 } else { Vec::new() };
            let down = if j <= v.len() { s.letters_as_word(&v[j - 1..j])?.0 } else { Vec::new() };
            let mut boundary = match &prev {
                Some(p) => gens.inverse_word(p).0,
                None => Vec::new(),
            };
            boundary.extend(up);
            boundary.extend_from_slice(&row);
            boundary.extend(down.iter().rev().map(|&x| gens.inverse_of(x)));
            let mut conjugator = base.0.clone();
            conjugator.extend(s.letters_as_word(&v[..(j - 1).min(v.len())])?.0);
            cells.push(Cell { corridor: k, row: j, conjugator: Word(conjugator), boundary: Word(boundary) });
            prev = Some(row);
        }
    }
    let max_cell_perimeter = cells.iter().map(|c| c.boundary.len() as u64).max().unwrap_or(0);
    Ok(FillingCertificate {
        structure: s.name.clone(),
        loop_word: loop_word.clone(),
        constants,
        cells,
        max_cell_perimeter,
        max_row_word: corridor.max_row_word,
        observed_h: corridor.observed_h,
    })
}

/// Checks of a certificate against its defining properties.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillingCheck {
    pub free_reduction_identity: bool,
    pub cells_are_loops: bool,
    pub first_open_cell: Option<usize>,
    pub h_argument: u64,
    pub h_value: u64,
    /// Whether `h_value` is `h(c n + d)` itself rather than a lower bound.
    pub h_exact: bool,
    pub perimeter_bound: u64,
    pub max_cell_perimeter: u64,
    pub perimeter_ok: bool,
    pub cell_count: u64,
    pub cell_count_bound: u64,
    pub cell_count_ok: bool,
}

impl FillingCheck {
    pub fn passed(&self) -> bool {
        self.free_reduction_identity && self.cells_are_loops && self.perimeter_ok && self.cell_count_ok
    }
}

/// `|cells| <= n (m n / 2 + e)` for `n = |loop|`.
pub fn cell_count_bound_check(cert: &FillingCertificate) -> bool {
    cert.cells.len() as u64 <= cert.constants.cell_count_bound(cert.loop_word.len() as u64)
}

/// Verifies a certificate.  The perimeter bound uses `h(c n + d)` from the
/// profile when it reaches that far; otherwise the larger of the profile's
/// last value and the certificate's observed distances, both lower bounds
/// for `h(c n + d)`, which makes the check stricter.
pub fn check_certificate(
    s: &CayleyAutomaticStructure,
    cert: &FillingCertificate,
    profile: Option<&DistanceProfile>,
) -> Result<FillingCheck> {
    let gens = &s.generators;
    let id = s.model().identity();
    let k = cert.constants;
    let n = cert.loop_word.len() as u64;
    let free_reduction_identity =
        gens.free_reduce(&cert.product(gens)) == gens.free_reduce(&cert.loop_word);
    let first_open_cell = cert.cells.iter().position(|c| gens.evaluate(&c.boundary) != id);
    let h_argument = k.h_argument(n);
    let exact = profile.and_then(|p| p.h(h_argument));
    let (h_value, h_exact) = match exact {
        Some(h) => (h, true),
        None => {
            let last = profile.and_then(|p| p.entries.last()).map_or(0, |e| e.h);
            (last.max(cert.observed_h), false)
        }
    };
    let perimeter_bound = 4 * h_value + k.varsigma;
    let max_cell_perimeter = cert.cells.iter().map(|c| c.boundary.len() as u64).max().unwrap_or(0);
    let cell_count_bound = k.cell_count_bound(n);
    Ok(FillingCheck {
        free_reduction_identity,
        cells_are_loops: first_open_cell.is_none(),
        first_open_cell,
        h_argument,
        h_value,
        h_exact,
        perimeter_bound,
        max_cell_perimeter,
        perimeter_ok: max_cell_perimeter <= perimeter_bound,
        cell_count: cert.cells.len() as u64,
        cell_count_bound,
        cell_count_ok: cell_count_bound_check(cert),
    })
}
