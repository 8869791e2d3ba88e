use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::magnitude::Magnitude;
use crate::error::{Error, Result};
use crate::filling::{phi_step_function, StepFunction};

/// Breakpoints `n_i = 2^(2^i)` of the incomparable step function that fit in
/// a `u64`.
pub const INCOMPARABLE_BREAKPOINTS: [u64; 6] = [2, 4, 16, 256, 65_536, 1 << 32];

/// Largest exponent for which `b^n` is kept as an exact integer.
const EXACT_POWER_BITS: f64 = 4096.0;

#[derive(Clone, Debug, PartialEq)]
pub enum FunctionKind {
    Constant(u64),
    Identity,
    /// `n^α`.
    Power(f64),
    /// `n^2 ln n`.
    NSquaredLogN,
    /// `b^n`.
    Exponential(u32),
    /// `α^((ln n)^1.5)`.
    FAlpha(f64),
    Step(StepFunction),
    /// `n_{2i}` on `[n_{2i}, n_{2i+1})` and `n_{2i+2}` on `[n_{2i+1}, n_{2i+2})`
    /// with `n_0 = 2`, `n_{i+1} = n_i^2`.
    IncomparableStep,
    /// Sampled values `f(start), f(start + 1), ...`.
    Table { start: u64, values: Vec<u64> },
    /// `d f(a n + b) + c`.
    Affine { inner: Box<SymbolicFunction>, a: u64, b: u64, c: u64, d: u64 },
}

/// Known asymptotic classification of a catalog function.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub super_quadratic: Option<bool>,
    pub super_polynomial: Option<bool>,
    pub strongly_super_polynomial: Option<bool>,
}

impl Classification {
    fn known(sq: bool, sp: bool, ssp: bool) -> Self {
        Classification {
            super_quadratic: Some(sq),
            super_polynomial: Some(sp),
            strongly_super_polynomial: Some(ssp),
        }
    }
}

/// A non-decreasing function on `[domain_start, domain_end]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicFunction {
    pub kind: FunctionKind,
    pub domain_start: u64,
}

impl SymbolicFunction {
    pub fn new(kind: FunctionKind) -> Result<Self> {
        let domain_start = match &kind {
            FunctionKind::Power(a) if !(a.is_finite() && *a >= 0.0) => {
                return Err(Error::InvalidParameter(format!("power exponent {a} must be non-negative")))
            }
            FunctionKind::Exponential(b) if *b < 1 => {
                return Err(Error::InvalidParameter("exponential base must be at least 1".into()))
            }
            FunctionKind::FAlpha(a) if !(a.is_finite() && *a >= 1.0) => {
                return Err(Error::InvalidParameter(format!("f_alpha base {a} must be at least 1")))
            }
            FunctionKind::Table { values, .. } if values.is_empty() => {
                return Err(Error::InvalidParameter("a table needs at least one value".into()))
            }
            FunctionKind::Table { start, values } => {
                if let Some(i) = values.windows(2).position(|w| w[0] > w[1]) {
                    return Err(Error::InvalidParameter(format!(
                        "table decreases at n = {}",
                        start + i as u64 + 1
                    )));
                }
                (*start).max(1)
            }
            FunctionKind::Affine { a, d, .. } if *a == 0 || *d == 0 => {
                return Err(Error::InvalidParameter("affine parameters need A >= 1 and D >= 1".into()))
            }
            FunctionKind::Affine { inner, a, b, .. } => {
                let s = inner.domain_start;
                if s > *b { (s - b).div_ceil(*a).max(1) } else { 1 }
            }
            FunctionKind::IncomparableStep => 2,
            _ => 1,
        };
        Ok(SymbolicFunction { kind, domain_start })
    }

    pub fn constant(c: u64) -> Self {
        SymbolicFunction::new(FunctionKind::Constant(c)).expect("valid")
    }

    pub fn identity() -> Self {
        SymbolicFunction::new(FunctionKind::Identity).expect("valid")
    }

    pub fn power(alpha: f64) -> Result<Self> {
        SymbolicFunction::new(FunctionKind::Power(alpha))
    }

    pub fn exponential(base: u32) -> Result<Self> {
        SymbolicFunction::new(FunctionKind::Exponential(base))
    }

    pub fn f_alpha(alpha: f64) -> Result<Self> {
        SymbolicFunction::new(FunctionKind::FAlpha(alpha))
    }

    pub fn incomparable_step() -> Self {
        SymbolicFunction::new(FunctionKind::IncomparableStep).expect("valid")
    }

    pub fn step(step: StepFunction) -> Self {
        SymbolicFunction::new(FunctionKind::Step(step)).expect("valid")
    }

    pub fn table(start: u64, values: Vec<u64>) -> Result<Self> {
        SymbolicFunction::new(FunctionKind::Table { start, values })
    }

    /// The catalog used for classification reports.
    pub fn catalog() -> Vec<SymbolicFunction> {
        [
            "const:5",
            "identity",
            "power:2",
            "power:3",
            "n2logn",
            "exp:2",
            "falpha:2",
            "step:incomparable",
        ]
        .iter()
        .map(|s| s.parse().expect("catalog entry"))
        .collect()
    }

    /// Last point of the domain, if bounded.
    pub fn domain_end(&self) -> Option<u64> {
        match &self.kind {
            FunctionKind::Table { start, values } => Some(start + values.len() as u64 - 1),
            FunctionKind::Affine { inner, a, b, .. } => match inner.domain_end() {
                Some(e) if e < *b => Some(0),
                Some(e) => Some((e - b) / a),
                None => Some((u64::MAX - b) / a),
            },
            _ => None,
        }
    }

    pub fn is_zero_function(&self) -> bool {
        match &self.kind {
            FunctionKind::Constant(0) => true,
            FunctionKind::Table { values, .. } => values.iter().all(|&v| v == 0),
            FunctionKind::Affine { inner, c, .. } => *c == 0 && inner.is_zero_function(),
            _ => false,
        }
    }

    /// True when the function is constant between consecutive breakpoints.
    pub fn is_step(&self) -> bool {
        match &self.kind {
            FunctionKind::Constant(_)
            | FunctionKind::Step(_)
            | FunctionKind::IncomparableStep
            | FunctionKind::Table { .. } => true,
            FunctionKind::Power(a) => *a == 0.0,
            FunctionKind::Exponential(b) => *b == 1,
            FunctionKind::FAlpha(a) => *a == 1.0,
            FunctionKind::Affine { inner, .. } => inner.is_step(),
            _ => false,
        }
    }

    /// Points in `[lo, hi]` where a step function changes value.
    pub fn breakpoints(&self, lo: u64, hi: u64) -> Vec<u64> {
        let raw: Vec<u64> = match &self.kind {
            FunctionKind::Step(s) => s.breakpoints().to_vec(),
            FunctionKind::IncomparableStep => INCOMPARABLE_BREAKPOINTS.to_vec(),
            FunctionKind::Table { start, values } => (1..values.len())
                .filter(|&i| values[i] != values[i - 1])
                .map(|i| start + i as u64)
                .collect(),
            FunctionKind::Affine { inner, a, b, .. } => inner
                .breakpoints(0, u64::MAX)
                .into_iter()
                .filter(|&p| p > *b)
                .map(|p| (p - b).div_ceil(*a))
                .collect(),
            _ => Vec::new(),
        };
        let mut out: Vec<u64> = raw.into_iter().filter(|&p| lo <= p && p <= hi).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn eval(&self, n: u64) -> Result<Magnitude> {
        if n < self.domain_start {
            return Err(Error::DomainShortfall { domain_start: self.domain_start, requested: n });
        }
        if let Some(end) = self.domain_end() {
            if n > end {
                return Err(Error::InsufficientRange { start: n, end: n, available: end });
            }
        }
        Ok(match &self.kind {
            FunctionKind::Constant(c) => Magnitude::from_u64(*c),
            FunctionKind::Identity => Magnitude::from_u64(n),
            FunctionKind::Power(a) => {
                if a.fract() == 0.0 && *a <= 64.0 {
                    Magnitude::from_big(BigUint::from(n).pow(*a as u32))
                } else if n == 0 {
                    Magnitude::zero()
                } else {
                    Magnitude::from_ln(a * (n as f64).ln())
                }
            }
            FunctionKind::NSquaredLogN => {
                if n <= 1 {
                    Magnitude::zero()
                } else {
                    let l = (n as f64).ln();
                    Magnitude::from_ln(2.0 * l + l.ln())
                }
            }
            FunctionKind::Exponential(b) => {
                let bits = n as f64 * (*b as f64).log2();
                if bits <= EXACT_POWER_BITS {
                    Magnitude::from_big(BigUint::from(*b).pow(n as u32))
                } else {
                    Magnitude::from_ln(n as f64 * (*b as f64).ln())
                }
            }
            FunctionKind::FAlpha(a) => {
                if n == 1 || *a == 1.0 {
                    Magnitude::from_u64(1)
                } else {
                    Magnitude::from_ln(a.ln() * (n as f64).ln().powf(1.5))
                }
            }
            FunctionKind::Step(s) => Magnitude::from_u64(s.eval(n)),
            FunctionKind::IncomparableStep => incomparable_value(n),
            FunctionKind::Table { start, values } => Magnitude::from_u64(values[(n - start) as usize]),
            FunctionKind::Affine { inner, a, b, c, d } => {
                let arg = a
                    .checked_mul(n)
                    .and_then(|x| x.checked_add(*b))
                    .ok_or_else(|| Error::InvalidParameter(format!("argument {a}*{n}+{b} overflows")))?;
                inner.eval(arg)?.mul_u64(*d).add_u64(*c)
            }
        })
    }

    pub fn classification(&self) -> Classification {
        match &self.kind {
            FunctionKind::Constant(_) | FunctionKind::Identity | FunctionKind::Step(_) => {
                Classification::known(false, false, false)
            }
            FunctionKind::Power(a) => Classification::known(*a > 2.0, false, false),
            FunctionKind::NSquaredLogN => Classification::known(true, false, false),
            FunctionKind::Exponential(b) => {
                let grows = *b >= 2;
                Classification::known(grows, grows, grows)
            }
            FunctionKind::FAlpha(a) => {
                let grows = *a > 1.0;
                Classification::known(grows, grows, false)
            }
            FunctionKind::IncomparableStep => Classification::known(false, false, false),
            FunctionKind::Table { .. } => Classification::default(),
            FunctionKind::Affine { inner, .. } => inner.classification(),
        }
    }
}

fn incomparable_value(n: u64) -> Magnitude {
    let i = INCOMPARABLE_BREAKPOINTS.partition_point(|&b| b <= n) - 1;
    if i % 2 == 0 {
        Magnitude::from_u64(INCOMPARABLE_BREAKPOINTS[i])
    } else {
        let next = INCOMPARABLE_BREAKPOINTS[i] as u128;
        Magnitude::Small(next * next)
    }
}

fn fmt_float(x: f64) -> String {
    if x.fract() == 0.0 { format!("{}", x as i64) } else { format!("{x}") }
}

impl fmt::Display for SymbolicFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FunctionKind::Constant(c) => write!(f, "const:{c}"),
            FunctionKind::Identity => write!(f, "identity"),
            FunctionKind::Power(a) => write!(f, "power:{}", fmt_float(*a)),
            FunctionKind::NSquaredLogN => write!(f, "n2logn"),
            FunctionKind::Exponential(b) => write!(f, "exp:{b}"),
            FunctionKind::FAlpha(a) => write!(f, "falpha:{}", fmt_float(*a)),
            FunctionKind::Step(s) => {
                let parts: Vec<String> = s.breakpoints().iter().map(|b| b.to_string()).collect();
                write!(f, "step:{}", parts.join(","))
            }
            FunctionKind::IncomparableStep => write!(f, "step:incomparable"),
            FunctionKind::Table { start, values } => {
                let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                write!(f, "table:{start}:{}", parts.join(","))
            }
            FunctionKind::Affine { inner, a, b, c, d } => write!(f, "affine:{a},{b},{c},{d}:{inner}"),
        }
    }
}

fn parse_list(text: &str, what: &str) -> Result<Vec<u64>> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<u64>()
                .map_err(|_| Error::InvalidParameter(format!("bad {what} entry `{p}`")))
        })
        .collect()
}

fn parse_float(text: &str, what: &str) -> Result<f64> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| Error::InvalidParameter(format!("bad {what} `{text}`")))
}

impl FromStr for SymbolicFunction {
    type Err = Error;

    /// Parses `const:C`, `identity`, `power:A`, `n2logn`, `exp:B`,
    /// `falpha:A`, `step:L1,L2,...`, `step:incomparable`,
    /// `table:START:V1,V2,...` and `affine:A,B,C,D:INNER`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        let need = |what: &str| rest.ok_or_else(|| Error::InvalidParameter(format!("`{head}` needs {what}")));
        match head {
            "identity" | "id" => Ok(SymbolicFunction::identity()),
            "n2logn" => SymbolicFunction::new(FunctionKind::NSquaredLogN),
            "const" | "constant" => {
                let c = need("a value")?;
                let v = c.trim().parse().map_err(|_| Error::InvalidParameter(format!("bad constant `{c}`")))?;
                Ok(SymbolicFunction::constant(v))
            }
            "power" => SymbolicFunction::power(parse_float(need("an exponent")?, "exponent")?),
            "exp" => {
                let b = need("a base")?;
                let v = b.trim().parse().map_err(|_| Error::InvalidParameter(format!("bad base `{b}`")))?;
                SymbolicFunction::exponential(v)
            }
            "falpha" => SymbolicFunction::f_alpha(parse_float(need("a base")?, "base")?),
            "step" => match need("breakpoints")?.trim() {
                "incomparable" => Ok(SymbolicFunction::incomparable_step()),
                list => Ok(SymbolicFunction::step(phi_step_function(&parse_list(list, "breakpoint")?)?)),
            },
            "table" => {
                let (start, values) = need("a start and values")?
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidParameter("table format is table:START:V1,V2,...".into()))?;
                let start = start
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad table start `{start}`")))?;
                SymbolicFunction::table(start, parse_list(values, "table")?)
            }
            "affine" => {
                let (params, inner) = need("parameters")?
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidParameter("affine format is affine:A,B,C,D:INNER".into()))?;
                let p = parse_list(params, "affine parameter")?;
                if p.len() != 4 {
                    return Err(Error::InvalidParameter("affine needs exactly four parameters".into()));
                }
                SymbolicFunction::new(FunctionKind::Affine {
                    inner: Box::new(inner.parse()?),
                    a: p[0],
                    b: p[1],
                    c: p[2],
                    d: p[3],
                })
            }
            other => Err(Error::InvalidParameter(format!("unknown function `{other}`"))),
        }
    }
}

impl Serialize for SymbolicFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SymbolicFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
