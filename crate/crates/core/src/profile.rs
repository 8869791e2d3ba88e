//! The Cayley distance function `h(n) = max { d(π(w), ψ(w)) : w ∈ L, |w| ≤ n }`
//! and the normal-form length bound `|u| ≤ m d(1, ψ(u)) + e`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automata::{StateBoundConstants, Sym};
use crate::error::{Error, Result};
use crate::structures::{CayleyAutomaticStructure, Transported};

/// Budgets for profile computations.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProfileOptions {
    /// Maximum number of normal forms enumerated.
    pub max_words: usize,
    /// Optional cap on individual distances.
    pub distance_cap: Option<u64>,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions { max_words: 4_000_000, distance_cap: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub n: u64,
    pub h: u64,
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceProfile {
    pub structure: String,
    pub constants: StateBoundConstants,
    pub entries: Vec<ProfileEntry>,
}

impl DistanceProfile {
    pub fn n_max(&self) -> u64 {
        self.entries.last().map_or(0, |e| e.n)
    }

    pub fn h(&self, n: u64) -> Option<u64> {
        self.entries.get(n as usize).map(|e| e.h)
    }

    pub fn values(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.h).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,h,witness\n");
        for e in &self.entries {
            out.push_str(&format!("{},{},{}\n", e.n, e.h, e.witness));
        }
        out
    }
}

/// Normal forms of length at most `n`, in enumeration order.
pub fn normal_forms(s: &CayleyAutomaticStructure, n: usize, max_words: usize) -> Result<Vec<Vec<Sym>>> {
    let mut out = Vec::new();
    for c in s.language.enumerate(n) {
        if out.len() == max_words {
            return Err(Error::EnumerationBudget(max_words));
        }
        out.push(c.0.into_iter().next().unwrap());
    }
    Ok(out)
}

/// `d(π(w), ψ(w))` for one normal form.
pub fn displacement(s: &CayleyAutomaticStructure, w: &[Sym], cap: Option<u64>) -> Result<u64> {
    let pi = s.pi(w)?;
    let psi = s.psi(w)?;
    s.metric().distance(&pi, &psi, cap).map_err(|e| match e {
        Error::DistanceExceedsCap { cap } => {
            Error::WordDistanceExceedsCap { word: s.format_word(w), cap }
        }
        other => other,
    })
}

/// Exact `h(n)` for `0 <= n <= n_max`, each with the first maximising normal
/// form in enumeration order.  An empty maximum counts as 0.
pub fn compute_h(s: &CayleyAutomaticStructure, n_max: usize, options: &ProfileOptions) -> Result<DistanceProfile> {
    let constants = s.constants()?;
    let words = normal_forms(s, n_max, options.max_words)?;
    let dists: Vec<u64> = words
        .par_iter()
        .map(|w| displacement(s, w, options.distance_cap))
        .collect::<Result<_>>()?;
    let mut entries = Vec::with_capacity(n_max + 1);
    let mut best: Option<usize> = None;
    let mut i = 0;
    for n in 0..=n_max {
        while i < words.len() && words[i].len() <= n {
            if best.is_none_or(|b| dists[i] > dists[b]) {
                best = Some(i);
            }
            i += 1;
        }
        let (h, witness) = match best {
            Some(b) => (dists[b], s.format_word(&words[b])),
            None => (0, String::new()),
        };
        entries.push(ProfileEntry { n: n as u64, h, witness });
    }
    Ok(DistanceProfile { structure: s.name.clone(), constants, entries })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthBoundReport {
    pub structure: String,
    pub n: u64,
    pub constants: StateBoundConstants,
    pub checked: u64,
    pub violations: u64,
    /// Smallest `m d(1, ψ(u)) + e - |u|` over the checked words.
    pub min_slack: i64,
    /// First word attaining the smallest slack.
    pub tightest: String,
    /// First violating word, if any.
    pub first_violation: Option<String>,
}

impl LengthBoundReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Checks `|u| <= m d(1, ψ(u)) + e` for every normal form of length at most `n`.
pub fn check_length_bound(s: &CayleyAutomaticStructure, n: usize, options: &ProfileOptions) -> Result<LengthBoundReport> {
    let constants = s.constants()?;
    let words = normal_forms(s, n, options.max_words)?;
    let metric = s.metric();
    let slacks: Vec<i64> = words
        .par_iter()
        .map(|w| {
            let d = metric.norm(&s.psi(w)?)?;
            Ok((constants.m * d + constants.e) as i64 - w.len() as i64)
        })
        .collect::<Result<_>>()?;
    let mut min_at = 0;
    for (i, &sl) in slacks.iter().enumerate() {
        if sl < slacks[min_at] {
            min_at = i;
        }
    }
    let violations = slacks.iter().filter(|&&sl| sl < 0).count() as u64;
    let first_violation = slacks.iter().position(|&sl| sl < 0).map(|i| s.format_word(&words[i]));
    Ok(LengthBoundReport {
        structure: s.name.clone(),
        n: n as u64,
        constants,
        checked: words.len() as u64,
        violations,
        min_slack: slacks.get(min_at).copied().unwrap_or(0),
        tightest: words.get(min_at).map(|w| s.format_word(w)).unwrap_or_default(),
        first_violation,
    })
}

/// True iff `p(n) <= K q(M n)` for every `n` in `[N, min(n_max(p), n_max(q) / M)]`.
pub fn check_equivalence_constants(p: &DistanceProfile, q: &DistanceProfile, k: u64, m: u64, n: u64) -> Result<bool> {
    if k == 0 || m == 0 {
        return Err(Error::InvalidParameter("K and M must be positive".into()));
    }
    let end = p.n_max().min(q.n_max() / m);
    if n > end {
        return Err(Error::InsufficientRange { start: n, end, available: end });
    }
    Ok((n..=end).all(|i| p.h(i).unwrap() <= k * q.h(m * i).unwrap()))
}

/// Outcome of checking the two inequalities relating a structure and its
/// transport on `n <= range`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransportCheck {
    pub m1: u64,
    pub m2: u64,
    pub range: u64,
    /// `h_S(n) <= M1 h_Y(M2 n)`.
    pub old_below_new: bool,
    /// `h_Y(n) <= M2 h_S(M1 n)`.
    pub new_below_old: bool,
    pub old_profile: Vec<u64>,
    pub new_profile: Vec<u64>,
}

impl TransportCheck {
    pub fn passed(&self) -> bool {
        self.old_below_new && self.new_below_old
    }
}

pub fn check_transport(
    old: &CayleyAutomaticStructure,
    transported: &Transported,
    range: usize,
    options: &ProfileOptions,
) -> Result<TransportCheck> {
    let (m1, m2) = (transported.m1, transported.m2);
    let depth = range * m1.max(m2).max(1) as usize;
    let hs = compute_h(old, depth, options)?;
    let hy = compute_h(&transported.structure, depth, options)?;
    let within = |p: &DistanceProfile, q: &DistanceProfile, k: u64, m: u64| {
        (0..=range as u64).all(|i| p.h(i).unwrap() <= k * q.h(m * i).unwrap())
    };
    Ok(TransportCheck {
        m1,
        m2,
        range: range as u64,
        old_below_new: within(&hs, &hy, m1, m2),
        new_below_old: within(&hy, &hs, m2, m1),
        old_profile: hs.values(),
        new_profile: hy.values(),
    })
}
