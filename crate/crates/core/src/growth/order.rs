use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::function::{FunctionKind, SymbolicFunction};
use super::magnitude::Magnitude;
use crate::error::{Error, Result};

/// Ranges up to this length are checked at every integer in `Auto` mode.
pub const DENSE_LIMIT: u64 = 2_000_000;

/// Candidate `(K, M, N)` for `g(n) <= K f(M n)` on `n >= N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderWitness {
    #[serde(rename = "K")]
    pub k: u64,
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(rename = "N")]
    pub n: u64,
}

impl OrderWitness {
    pub fn new(k: u64, m: u64, n: u64) -> Result<Self> {
        if k == 0 || m == 0 || n == 0 {
            return Err(Error::InvalidParameter(format!("witness ({k},{m},{n}) must be positive")));
        }
        Ok(OrderWitness { k, m, n })
    }

    /// The composite witness of a chain `g <= f` (self) and `f <= e` (next).
    pub fn compose(&self, next: &OrderWitness) -> OrderWitness {
        OrderWitness {
            k: self.k * next.k,
            m: self.m * next.m,
            n: self.n.max(next.n * self.m),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    /// Breakpoints when either side is a step function, every integer for
    /// short ranges and a geometric sample otherwise.
    Auto,
    Exhaustive,
    /// Only the points where a violation can first appear; exact when
    /// either side is a step function.
    Breakpoints,
    Sampled,
}

impl std::str::FromStr for CheckMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(CheckMode::Auto),
            "exhaustive" => Ok(CheckMode::Exhaustive),
            "breakpoints" => Ok(CheckMode::Breakpoints),
            "sampled" => Ok(CheckMode::Sampled),
            other => Err(Error::InvalidParameter(format!("unknown check mode `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Verified,
    Refuted { n: u64, g: Magnitude, k_f: Magnitude },
    /// No violation found, but the comparison at `n` could not be decided.
    Undecided { n: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PreceqReport {
    pub g: SymbolicFunction,
    pub f: SymbolicFunction,
    pub witness: OrderWitness,
    pub range_end: u64,
    pub mode: CheckMode,
    /// True when the checked points cover every integer of the range.
    pub exhaustive: bool,
    pub points: u64,
    #[serde(flatten)]
    pub verdict: Verdict,
    pub label: String,
}

impl PreceqReport {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Verified
    }
}

fn check_domains(g: &SymbolicFunction, f: &SymbolicFunction, m: u64, start: u64, end: u64) -> Result<()> {
    if start > end {
        return Err(Error::InsufficientRange { start, end, available: end });
    }
    if start < g.domain_start {
        return Err(Error::DomainShortfall { domain_start: g.domain_start, requested: start });
    }
    let fm = start.saturating_mul(m);
    if fm < f.domain_start {
        return Err(Error::DomainShortfall { domain_start: f.domain_start, requested: fm });
    }
    let f_end = end
        .checked_mul(m)
        .ok_or_else(|| Error::InvalidParameter(format!("{m} * {end} overflows")))?;
    if let Some(available) = g.domain_end().filter(|&e| e < end) {
        return Err(Error::InsufficientRange { start, end, available });
    }
    if let Some(available) = f.domain_end().filter(|&e| e < f_end) {
        return Err(Error::InsufficientRange { start: fm, end: f_end, available });
    }
    Ok(())
}

/// Geometric sample of `[start, end]`: every integer up to `start + 10^4`,
/// then ratio `1.0005`, plus `end`.
fn sample_points(start: u64, end: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (start..=end.min(start.saturating_add(10_000))).collect();
    let mut x = *out.last().unwrap_or(&start) as f64;
    loop {
        x *= 1.0005;
        let p = x.floor() as u64;
        if x >= end as f64 {
            break;
        }
        if out.last().is_none_or(|&l| p > l) {
            out.push(p);
        }
    }
    out.push(end);
    out
}

/// Points at which `g(n) <= K f(M n)` can first fail: for step `g` the
/// left ends of its constant pieces, for step `f` the right ends of the
/// pieces of `n -> f(M n)`.
fn breakpoint_points(g: &SymbolicFunction, f: &SymbolicFunction, m: u64, start: u64, end: u64) -> Vec<u64> {
    let mut out = vec![start, end];
    out.extend(g.breakpoints(start, end));
    for b in f.breakpoints(start.saturating_mul(m).max(1), end.saturating_mul(m).saturating_add(1)) {
        out.push((b - 1) / m);
    }
    out.retain(|&p| start <= p && p <= end);
    out.sort_unstable();
    out.dedup();
    out
}

struct Plan {
    mode: CheckMode,
    exhaustive: bool,
    points: Vec<u64>,
}

/// Explicit exhaustive checks longer than this are rejected.
pub const EXHAUSTIVE_LIMIT: u64 = 64 * DENSE_LIMIT;

fn plan(g: &SymbolicFunction, f: &SymbolicFunction, m: u64, start: u64, end: u64, mode: CheckMode) -> Result<Plan> {
    let step = g.is_step() || f.is_step();
    let dense_ok = end - start < DENSE_LIMIT;
    let mode = match mode {
        CheckMode::Auto if step => CheckMode::Breakpoints,
        CheckMode::Auto if dense_ok => CheckMode::Exhaustive,
        CheckMode::Auto => CheckMode::Sampled,
        CheckMode::Breakpoints if !step => CheckMode::Sampled,
        other => other,
    };
    if mode == CheckMode::Exhaustive && end - start >= EXHAUSTIVE_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "exhaustive checks are limited to {EXHAUSTIVE_LIMIT} points"
        )));
    }
    Ok(match mode {
        CheckMode::Exhaustive => Plan { mode, exhaustive: true, points: (start..=end).collect() },
        CheckMode::Breakpoints => Plan { mode, exhaustive: true, points: breakpoint_points(g, f, m, start, end) },
        _ => {
            let mut points = sample_points(start, end);
            points.extend(breakpoint_points(g, f, m, start, end));
            points.sort_unstable();
            points.dedup();
            Plan { mode: CheckMode::Sampled, exhaustive: false, points }
        }
    })
}

enum PointResult {
    Holds,
    Fails(Magnitude, Magnitude),
    Undecided,
}

/// `(base, a, b, c, d)` with `f(n) = d base(a n + b) + c`.
fn affine_view(f: &SymbolicFunction) -> Option<(&SymbolicFunction, u128, u128, u128, u128)> {
    match &f.kind {
        FunctionKind::Affine { inner, a, b, c, d } => {
            let (base, a2, b2, c2, d2) = affine_view(inner)?;
            let (a, b, c, d) = (*a as u128, *b as u128, *c as u128, *d as u128);
            Some((
                base,
                a2.checked_mul(a)?,
                a2.checked_mul(b)?.checked_add(b2)?,
                d.checked_mul(c2)?.checked_add(c)?,
                d.checked_mul(d2)?,
            ))
        }
        _ => Some((f, 1, 0, 0, 1)),
    }
}

/// Decides `g(n) <= K f(M n)` without evaluation when both sides are affine
/// images of one base function and every coefficient is dominated.
fn dominated(g: &SymbolicFunction, f: &SymbolicFunction, k: u64, m: u64, n: u64) -> bool {
    let (Some((bg, ag, b_g, cg, dg)), Some((bf, af, b_f, cf, df))) = (affine_view(g), affine_view(f)) else {
        return false;
    };
    let (k, m, n) = (k as u128, m as u128, n as u128);
    let arg_g = ag.checked_mul(n).and_then(|x| x.checked_add(b_g));
    let arg_f = af.checked_mul(m).and_then(|x| x.checked_mul(n)).and_then(|x| x.checked_add(b_f));
    let scaled = |x: u128| k.checked_mul(x);
    bg == bf
        && matches!((arg_g, arg_f), (Some(x), Some(y)) if x <= y)
        && scaled(df).is_some_and(|v| dg <= v)
        && scaled(cf).is_some_and(|v| cg <= v)
}

fn check_point(g: &SymbolicFunction, f: &SymbolicFunction, k: u64, m: u64, n: u64) -> Result<PointResult> {
    if dominated(g, f, k, m, n) {
        return Ok(PointResult::Holds);
    }
    let gv = g.eval(n)?;
    let kf = f.eval(n * m)?.mul_u64(k);
    Ok(match gv.le(&kf) {
        Some(true) => PointResult::Holds,
        Some(false) => PointResult::Fails(gv, kf),
        None => PointResult::Undecided,
    })
}

fn range_label(exhaustive: bool, start: u64, end: u64) -> String {
    if exhaustive {
        format!("verified on [{start}, {end}]")
    } else {
        format!("sampled on [{start}, {end}]")
    }
}

/// Checks `g(n) <= K f(M n)` for `n` in `[N, range_end]`. A finite-range
/// check: a verified report says nothing beyond `range_end`.
pub fn verify_preceq(
    g: &SymbolicFunction,
    f: &SymbolicFunction,
    w: OrderWitness,
    range_end: u64,
    mode: CheckMode,
) -> Result<PreceqReport> {
    let w = OrderWitness::new(w.k, w.m, w.n)?;
    check_domains(g, f, w.m, w.n, range_end)?;
    let plan = plan(g, f, w.m, w.n, range_end, mode)?;
    let mut undecided = None;
    let mut verdict = Verdict::Verified;
    for &n in &plan.points {
        match check_point(g, f, w.k, w.m, n)? {
            PointResult::Holds => {}
            PointResult::Fails(gv, kf) => {
                verdict = Verdict::Refuted { n, g: gv, k_f: kf };
                break;
            }
            PointResult::Undecided => {
                undecided.get_or_insert(n);
            }
        }
    }
    if let (Verdict::Verified, Some(n)) = (&verdict, undecided) {
        verdict = Verdict::Undecided { n };
    }
    let label = match &verdict {
        Verdict::Verified => range_label(plan.exhaustive, w.n, range_end),
        Verdict::Refuted { n, .. } => format!("refuted at n = {n}"),
        Verdict::Undecided { n } => format!("undecided at n = {n}"),
    };
    Ok(PreceqReport {
        g: g.clone(),
        f: f.clone(),
        witness: w,
        range_end,
        mode: plan.mode,
        exhaustive: plan.exhaustive,
        points: plan.points.len() as u64,
        verdict,
        label,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridCell {
    #[serde(rename = "K")]
    pub k: u64,
    #[serde(rename = "M")]
    pub m: u64,
    pub first_violation: Option<u64>,
    /// The largest violation found; every `N` up to it is refuted.
    pub last_violation: Option<u64>,
    pub undecided: u64,
    /// The smallest ladder `N` with no violation or undecided point in
    /// `[N, range_end]`.
    pub survivor: Option<OrderWitness>,
}

impl GridCell {
    pub fn survives(&self) -> bool {
        self.survivor.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridReport {
    pub g: SymbolicFunction,
    pub f: SymbolicFunction,
    pub k_max: u64,
    pub m_max: u64,
    pub range_end: u64,
    /// Largest `N` tried for survivors.
    pub n_cap: u64,
    pub mode: CheckMode,
    pub exhaustive: bool,
    pub cells: Vec<GridCell>,
    pub survivors: Vec<OrderWitness>,
    pub label: String,
}

impl GridReport {
    pub fn all_refuted(&self) -> bool {
        self.survivors.is_empty()
    }
}

/// Smallest `N >= 1` with both sides defined at `N` and `M N`.
pub fn first_admissible(g: &SymbolicFunction, f: &SymbolicFunction, m: u64) -> u64 {
    g.domain_start.max(f.domain_start.div_ceil(m)).max(1)
}

/// The first admissible point followed by the powers of two up to `cap`.
fn ladder(start: u64, cap: u64) -> Vec<u64> {
    let mut out = vec![start];
    out.extend((0..64).map(|j| 1u64 << j).filter(|&p| p > start && p <= cap));
    out
}

/// Looks for violations of `g(n) <= K f(M n)` for every `(K, M)` in
/// `[1, k_max] x [1, m_max]`. A cell survives when some `N` on a ladder up
/// to `sqrt(range_end)` has no violation in `[N, range_end]`; survival is
/// only evidence on the checked range, not a proof of the order relation.
pub fn refute_preceq_grid(
    g: &SymbolicFunction,
    f: &SymbolicFunction,
    k_max: u64,
    m_max: u64,
    range_end: u64,
    mode: CheckMode,
) -> Result<GridReport> {
    if k_max == 0 || m_max == 0 {
        return Err(Error::InvalidParameter("grid bounds must be positive".into()));
    }
    for m in 1..=m_max {
        check_domains(g, f, m, first_admissible(g, f, m), range_end)?;
    }
    let n_cap = range_end.isqrt();
    let plans: Vec<(Vec<u64>, Plan)> = (1..=m_max)
        .map(|m| {
            let start = first_admissible(g, f, m);
            let mut p = plan(g, f, m, start, range_end, mode)?;
            let rungs = ladder(start, n_cap);
            p.points.extend(&rungs);
            p.points.sort_unstable();
            p.points.dedup();
            Ok((rungs, p))
        })
        .collect::<Result<_>>()?;
    let cells: Vec<(u64, u64)> = (1..=m_max).flat_map(|m| (1..=k_max).map(move |k| (k, m))).collect();
    let cells = cells
        .par_iter()
        .map(|&(k, m)| {
            let (rungs, plan) = &plans[(m - 1) as usize];
            let mut cell = GridCell { k, m, first_violation: None, last_violation: None, undecided: 0, survivor: None };
            let mut last_open = None;
            for &n in &plan.points {
                match check_point(g, f, k, m, n)? {
                    PointResult::Holds => {}
                    PointResult::Fails(..) => {
                        cell.first_violation.get_or_insert(n);
                        cell.last_violation = Some(n);
                        last_open = Some(n);
                    }
                    PointResult::Undecided => {
                        cell.undecided += 1;
                        last_open = Some(n);
                    }
                }
            }
            cell.survivor = rungs
                .iter()
                .find(|&&r| last_open.is_none_or(|l| l < r))
                .map(|&n| OrderWitness { k, m, n });
            Ok(cell)
        })
        .collect::<Result<Vec<_>>>()?;
    let survivors = cells.iter().filter_map(|c| c.survivor).collect();
    let exhaustive = plans.iter().all(|(_, p)| p.exhaustive);
    let start = (1..=m_max).map(|m| first_admissible(g, f, m)).min().unwrap_or(1);
    Ok(GridReport {
        g: g.clone(),
        f: f.clone(),
        k_max,
        m_max,
        range_end,
        n_cap,
        mode: plans[0].1.mode,
        exhaustive,
        cells,
        survivors,
        label: range_label(exhaustive, start, range_end),
    })
}

/// `n -> D f(A n + B) + C` with witnesses for both directions of its
/// equivalence with `f`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AffineNormalization {
    pub function: SymbolicFunction,
    pub equivalent_to: SymbolicFunction,
    /// `h <= f`.
    pub upper: OrderWitness,
    /// `f <= h`.
    pub lower: OrderWitness,
}

/// Largest argument probed when locating where `f(2 A n)` reaches `C`.
const SEARCH_LIMIT: u64 = 1 << 40;

/// Smallest `n >= from` with `pred(n)`, assuming `pred` is monotone; `None`
/// when `pred` fails up to `limit` or evaluation leaves the domain.
fn first_true(from: u64, limit: u64, pred: impl Fn(u64) -> Result<bool>) -> Result<Option<u64>> {
    let mut lo = from;
    let mut hi = from;
    loop {
        match pred(hi) {
            Ok(true) => break,
            Ok(false) => {}
            Err(Error::InsufficientRange { .. }) => return Ok(None),
            Err(e) => return Err(e),
        }
        if hi >= limit {
            return Ok(None);
        }
        lo = hi + 1;
        hi = (hi.saturating_mul(2)).min(limit);
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(Some(hi))
}

pub fn normalize_affine(f: &SymbolicFunction, a: u64, b: u64, c: u64, d: u64) -> Result<AffineNormalization> {
    if a == 0 || d == 0 {
        return Err(Error::InvalidParameter("affine parameters need A >= 1 and D >= 1".into()));
    }
    if f.is_zero_function() {
        return Err(Error::InvalidParameter("the zero function has no affine normal form".into()));
    }
    if (a, b, c, d) == (1, 0, 0, 1) {
        let w = OrderWitness::new(1, 1, f.domain_start)?;
        return Ok(AffineNormalization { function: f.clone(), equivalent_to: f.clone(), upper: w, lower: w });
    }
    let h = SymbolicFunction::new(FunctionKind::Affine { inner: Box::new(f.clone()), a, b, c, d })?;
    let lower = OrderWitness::new(1, 1, h.domain_start.max(f.domain_start))?;
    let a2 = 2 * a;
    let start = h.domain_start.max(f.domain_start.div_ceil(a2)).max(b.div_ceil(a)).max(1);
    let limit = SEARCH_LIMIT / a2;
    let reaches_c = first_true(start, limit, |n| {
        let v = f.eval(a2 * n)?;
        Ok(matches!(v.compare(&Magnitude::from_u64(c)), Some(Ordering::Greater | Ordering::Equal)))
    })?;
    let upper = match reaches_c {
        Some(n1) => OrderWitness::new(d + 1, a2, n1)?,
        None => {
            // f stays below C: absorb C into the multiplier instead.
            let n1 = first_true(start, limit, |n| Ok(!f.eval(a2 * n)?.is_zero()))?.ok_or_else(|| {
                Error::InvalidParameter(format!("{f} vanishes on the searched range"))
            })?;
            let v = match f.eval(a2 * n1)? {
                Magnitude::Small(v) => v,
                _ => 1,
            };
            let extra = (c as u128).div_ceil(v) as u64;
            OrderWitness::new(d + extra, a2, n1)?
        }
    };
    Ok(AffineNormalization { function: h, equivalent_to: f.clone(), upper, lower })
}
