use rayon::prelude::*;
use serde::Serialize;

use super::function::SymbolicFunction;
use super::magnitude::{widen, Magnitude};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadraticRow {
    #[serde(rename = "M")]
    pub m: u64,
    /// Largest `n` in range with `f(n) <= M n^2`; undecided comparisons count
    /// as `<=`.
    pub last_at_most: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuperquadraticReport {
    pub function: SymbolicFunction,
    pub range_start: u64,
    pub range_end: u64,
    pub rows: Vec<QuadraticRow>,
    /// Every row's last `n` lies in the lower half of the range.
    pub evidence_super_quadratic: bool,
    pub ground_truth: Option<bool>,
    pub agrees: Option<bool>,
    pub label: String,
}

/// For each `M <= m_max`, the last `n` in range with `f(n) <= M n^2`.
pub fn superquadratic_check(f: &SymbolicFunction, m_max: u64, range_end: u64) -> Result<SuperquadraticReport> {
    if m_max == 0 {
        return Err(Error::InvalidParameter("M_max must be positive".into()));
    }
    let start = f.domain_start;
    if range_end < start {
        return Err(Error::InsufficientRange { start, end: range_end, available: range_end });
    }
    let mut last: Vec<Option<u64>> = vec![None; m_max as usize];
    let mut open = m_max as usize;
    let mut n = range_end;
    while open > 0 {
        let v = f.eval(n)?;
        let sq = Magnitude::Small(n as u128 * n as u128);
        for (i, slot) in last.iter_mut().enumerate() {
            if slot.is_none() && v.le(&sq.mul_u64(i as u64 + 1)) != Some(false) {
                *slot = Some(n);
                open -= 1;
            }
        }
        if n == start {
            break;
        }
        n -= 1;
    }
    let rows: Vec<QuadraticRow> = last
        .iter()
        .enumerate()
        .map(|(i, &l)| QuadraticRow { m: i as u64 + 1, last_at_most: l })
        .collect();
    let evidence = rows.iter().all(|r| r.last_at_most.is_none_or(|n| n <= range_end / 2));
    let truth = f.classification().super_quadratic;
    Ok(SuperquadraticReport {
        function: f.clone(),
        range_start: start,
        range_end,
        rows,
        evidence_super_quadratic: evidence,
        ground_truth: truth,
        agrees: truth.map(|t| t == evidence),
        label: format!("sampled on [{start}, {range_end}]"),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StrongWitness {
    #[serde(rename = "K")]
    pub k: u64,
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(rename = "N")]
    pub n: u64,
    /// Lower bound on `ln t(N)` for the staircase `t`.
    pub ln_t_start: f64,
    /// Lower bound on `ln t(range_end)`.
    pub ln_t_end: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrongRow {
    #[serde(rename = "M")]
    pub m: u64,
    /// The witness with the smallest `K` for this `M`, if any.
    pub witness: Option<StrongWitness>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StronglySuperpolyReport {
    pub function: SymbolicFunction,
    pub k_max: u64,
    pub m_max: u64,
    pub range_end: u64,
    /// Required growth factor of the staircase across the range.
    pub threshold: f64,
    pub rows: Vec<StrongRow>,
    /// Smallest `M`, then smallest `K`.
    pub witness: Option<StrongWitness>,
    pub ground_truth: Option<bool>,
    pub agrees: Option<bool>,
    /// `(n, ln f(n) / ln n)` at powers of ten.
    pub log_ratio_samples: Vec<(u64, f64)>,
    pub label: String,
}

/// Lower bound on `ln(f(M n) / (n^2 f(n)))`, the largest admissible
/// `ln t(n)` at `K = 1`.
fn ln_slack(f: &SymbolicFunction, m: u64, n: u64) -> Result<f64> {
    let top = f.eval(m * n)?;
    let bottom = f.eval(n)?;
    if bottom.is_zero() {
        return Ok(f64::INFINITY);
    }
    if top.is_zero() {
        return Ok(f64::NEG_INFINITY);
    }
    let (top_lo, _) = top.ln_interval();
    let (_, bottom_hi) = bottom.ln_interval();
    let (_, two_ln_n) = widen(2.0 * (n as f64).ln());
    let (lo, _) = widen(top_lo - bottom_hi - two_ln_n);
    Ok(lo)
}

fn strong_row(f: &SymbolicFunction, m: u64, k_max: u64, start: u64, end: u64, ln_threshold: f64) -> Result<StrongRow> {
    let r: Vec<f64> = (start..=end).map(|n| ln_slack(f, m, n)).collect::<Result<_>>()?;
    // s[i] = min r[i..]: the largest non-decreasing staircase under r.
    let mut s = r;
    for i in (0..s.len().saturating_sub(1)).rev() {
        s[i] = s[i].min(s[i + 1]);
    }
    let s_end = *s.last().expect("non-empty range");
    // The staircase must grow by the threshold, so N can be at most the last
    // index with s_end - s[N] >= ln_threshold.
    let grows = s.partition_point(|&x| s_end - x >= ln_threshold);
    if grows == 0 {
        return Ok(StrongRow { m, witness: None });
    }
    let best = s[grows - 1];
    let k = if best >= 0.0 { 1.0 } else { (-best).exp().ceil() };
    if !(k.is_finite() && k <= k_max as f64) {
        return Ok(StrongRow { m, witness: None });
    }
    let k = k as u64;
    let ln_k = (k as f64).ln();
    let first = s.partition_point(|&x| x + ln_k < 0.0);
    Ok(StrongRow {
        m,
        witness: Some(StrongWitness {
            k,
            m,
            n: start + first as u64,
            ln_t_start: s[first] + ln_k,
            ln_t_end: s_end + ln_k,
        }),
    })
}

/// Searches for `K`, `M` and a staircase `t` with
/// `n^2 f(n) t(n) <= K f(M n)` on `[N, range_end]`, `t(N) >= 1` and
/// `t(range_end) >= threshold t(N)`.
pub fn strongly_superpoly_check(
    f: &SymbolicFunction,
    k_max: u64,
    m_max: u64,
    range_end: u64,
    threshold: f64,
) -> Result<StronglySuperpolyReport> {
    if k_max == 0 || m_max == 0 || !(threshold > 1.0) {
        return Err(Error::InvalidParameter("need K_max, M_max >= 1 and threshold > 1".into()));
    }
    let start = f.domain_start.max(2);
    if range_end <= start {
        return Err(Error::InsufficientRange { start, end: range_end, available: range_end });
    }
    let ln_threshold = threshold.ln();
    let rows = (1..=m_max)
        .into_par_iter()
        .map(|m| strong_row(f, m, k_max, start, range_end, ln_threshold))
        .collect::<Result<Vec<_>>>()?;
    let witness = rows.iter().find_map(|r| r.witness);
    let mut log_ratio_samples = Vec::new();
    let mut n = 10u64;
    while n <= range_end {
        if n >= f.domain_start {
            log_ratio_samples.push((n, f.eval(n)?.ln_estimate() / (n as f64).ln()));
        }
        n *= 10;
    }
    let truth = f.classification().strongly_super_polynomial;
    Ok(StronglySuperpolyReport {
        function: f.clone(),
        k_max,
        m_max,
        range_end,
        threshold,
        rows,
        witness,
        ground_truth: truth,
        agrees: truth.map(|t| t == witness.is_some()),
        log_ratio_samples,
        label: format!("sampled on [{start}, {range_end}]"),
    })
}
