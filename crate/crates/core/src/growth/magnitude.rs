use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// Relative slack added to every logarithm computed in floating point.
const SLACK: f64 = 1e-12;

/// Exact integers above this many bits are carried as logarithms.
const MAX_EXACT_BITS: u64 = 8192;

/// A non-negative function value: exact when it is an integer of moderate
/// size, otherwise an interval `[lo, hi]` containing its natural logarithm.
#[derive(Clone, Debug, PartialEq)]
pub enum Magnitude {
    Small(u128),
    Big(BigUint),
    Log { lo: f64, hi: f64 },
}

pub(crate) fn widen(x: f64) -> (f64, f64) {
    let e = SLACK * (x.abs() + 1.0);
    (x - e, x + e)
}

impl Magnitude {
    pub fn zero() -> Self {
        Magnitude::Small(0)
    }

    pub fn from_u64(x: u64) -> Self {
        Magnitude::Small(x as u128)
    }

    pub fn from_big(x: BigUint) -> Self {
        match x.to_u128() {
            Some(v) => Magnitude::Small(v),
            None if x.bits() > MAX_EXACT_BITS => {
                let (lo, hi) = big_ln(&x);
                Magnitude::Log { lo, hi }
            }
            None => Magnitude::Big(x),
        }
    }

    /// The value `exp(x)` for `x` computed in floating point.
    pub fn from_ln(x: f64) -> Self {
        let (lo, hi) = widen(x);
        Magnitude::Log { lo, hi }
    }

    pub fn from_ln_interval(lo: f64, hi: f64) -> Self {
        Magnitude::Log { lo, hi }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Magnitude::Small(v) => *v == 0,
            Magnitude::Big(b) => b.is_zero(),
            Magnitude::Log { .. } => false,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Magnitude::Log { .. })
    }

    /// Interval containing `ln` of the value; `-inf` for zero.
    pub fn ln_interval(&self) -> (f64, f64) {
        match self {
            Magnitude::Small(0) => (f64::NEG_INFINITY, f64::NEG_INFINITY),
            Magnitude::Small(v) if *v < (1u128 << 53) => {
                let x = (*v as f64).ln();
                widen(x)
            }
            Magnitude::Small(v) => big_ln(&BigUint::from(*v)),
            Magnitude::Big(b) => big_ln(b),
            Magnitude::Log { lo, hi } => (*lo, *hi),
        }
    }

    /// Midpoint estimate of the natural logarithm.
    pub fn ln_estimate(&self) -> f64 {
        let (lo, hi) = self.ln_interval();
        if lo == f64::NEG_INFINITY {
            return lo;
        }
        (lo + hi) / 2.0
    }

    fn to_big(&self) -> Option<BigUint> {
        match self {
            Magnitude::Small(v) => Some(BigUint::from(*v)),
            Magnitude::Big(b) => Some(b.clone()),
            Magnitude::Log { .. } => None,
        }
    }

    pub fn mul(&self, other: &Magnitude) -> Magnitude {
        if self.is_zero() || other.is_zero() {
            return Magnitude::zero();
        }
        match (self, other) {
            (Magnitude::Small(a), Magnitude::Small(b)) => match a.checked_mul(*b) {
                Some(v) => Magnitude::Small(v),
                None => Magnitude::from_big(BigUint::from(*a) * BigUint::from(*b)),
            },
            _ => match (self.to_big(), other.to_big()) {
                (Some(a), Some(b)) if a.bits() + b.bits() <= MAX_EXACT_BITS => Magnitude::from_big(a * b),
                _ => {
                    let (a0, a1) = self.ln_interval();
                    let (b0, b1) = other.ln_interval();
                    let (lo, _) = widen(a0 + b0);
                    let (_, hi) = widen(a1 + b1);
                    Magnitude::Log { lo, hi }
                }
            },
        }
    }

    pub fn mul_u64(&self, k: u64) -> Magnitude {
        self.mul(&Magnitude::from_u64(k))
    }

    pub fn add_u64(&self, c: u64) -> Magnitude {
        match self {
            Magnitude::Small(v) => match v.checked_add(c as u128) {
                Some(s) => Magnitude::Small(s),
                None => Magnitude::from_big(BigUint::from(*v) + c),
            },
            Magnitude::Big(b) => Magnitude::from_big(b + c),
            Magnitude::Log { lo, hi } => {
                if c == 0 {
                    return self.clone();
                }
                // ln(x + c) lies between ln x and ln x + ln(1 + c e^{-lo}).
                let bump = (1.0 + c as f64 * (-lo).exp()).ln();
                let (_, hi2) = widen(hi + bump);
                Magnitude::Log { lo: *lo, hi: hi2 }
            }
        }
    }

    /// Ordering when it can be decided; `None` when the intervals overlap.
    pub fn compare(&self, other: &Magnitude) -> Option<Ordering> {
        if let (Some(a), Some(b)) = (self.to_big(), other.to_big()) {
            return Some(a.cmp(&b));
        }
        let (a0, a1) = self.ln_interval();
        let (b0, b1) = other.ln_interval();
        if a1 < b0 {
            Some(Ordering::Less)
        } else if a0 > b1 {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    /// `self <= other`, when decidable.
    pub fn le(&self, other: &Magnitude) -> Option<bool> {
        self.compare(other).map(|o| o != Ordering::Greater)
    }
}

fn big_ln(x: &BigUint) -> (f64, f64) {
    if x.is_zero() {
        return (f64::NEG_INFINITY, f64::NEG_INFINITY);
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top = (x >> shift).to_u64().expect("64 bits") as f64;
    // The discarded low bits change the value by less than one part in 2^63.
    let est = top.ln() + shift as f64 * std::f64::consts::LN_2;
    let (lo, hi) = widen(est);
    (lo, hi + 2f64.powi(-62))
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Magnitude::Small(v) => write!(f, "{v}"),
            Magnitude::Big(b) => write!(f, "{b}"),
            Magnitude::Log { lo, hi } => {
                let mid = (lo + hi) / 2.0;
                let log10 = mid / std::f64::consts::LN_10;
                let exp = log10.floor();
                let mantissa = 10f64.powf(log10 - exp);
                write!(f, "{mantissa:.6}e{exp}")
            }
        }
    }
}

impl Serialize for Magnitude {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
