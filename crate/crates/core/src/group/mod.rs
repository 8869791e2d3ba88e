//! Concrete finitely generated groups with exact element arithmetic.
//!
//! Supported models: free abelian groups `Z^k`, the integral Heisenberg
//! group, the Baumslag–Solitar group `BS(1,2)` realised as dyadic affine
//! maps of the line, and the lamplighter group `Z_2 wr Z`.

mod dense;
mod metric;
mod words;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use dense::{commutator, dense_witness_loops};
pub use metric::{WordMetric, DEFAULT_BALL_BOUND};
pub use words::{inverse_name, Generator, GeneratorSet, Word};

/// An element of one of the supported groups.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupElement {
    Abelian(Vec<i64>),
    /// Upper unitriangular matrix with entries `x`, `z` on the first row and
    /// `y` on the second.  Multiplication: `(x,y,z)(x',y',z') = (x+x', y+y', z+z'+x y')`.
    Heisenberg { x: i64, y: i64, z: i64 },
    /// The affine map `s -> 2^e s + p / 2^q`, with `p` odd or `q = 0`.
    /// Products compose maps: `(f g)(s) = f(g(s))`.
    Dyadic { p: i64, q: u32, e: i64 },
    /// Finite set of lit lamps and the cursor position.
    Lamplighter { lamps: BTreeSet<i64>, cursor: i64 },
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Abelian(v) => {
                let parts: Vec<String> = v.iter().map(i64::to_string).collect();
                write!(f, "({})", parts.join(","))
            }
            GroupElement::Heisenberg { x, y, z } => write!(f, "[{x},{y},{z}]"),
            GroupElement::Dyadic { p, q, e } => write!(f, "s -> 2^{e} s + {p}/2^{q}"),
            GroupElement::Lamplighter { lamps, cursor } => {
                let parts: Vec<String> = lamps.iter().map(i64::to_string).collect();
                write!(f, "{{{}}}@{cursor}", parts.join(","))
            }
        }
    }
}

/// One of the supported groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupModel {
    Abelian(u8),
    Heisenberg,
    BaumslagSolitar,
    Lamplighter,
}

impl GroupModel {
    pub fn name(&self) -> String {
        match self {
            GroupModel::Abelian(1) => "Z".into(),
            GroupModel::Abelian(k) => format!("Z{k}"),
            GroupModel::Heisenberg => "H3".into(),
            GroupModel::BaumslagSolitar => "BS12".into(),
            GroupModel::Lamplighter => "LL2".into(),
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "Z" => Ok(GroupModel::Abelian(1)),
            "H3" => Ok(GroupModel::Heisenberg),
            "BS12" => Ok(GroupModel::BaumslagSolitar),
            "LL2" => Ok(GroupModel::Lamplighter),
            _ => name
                .strip_prefix('Z')
                .and_then(|k| k.parse::<u8>().ok())
                .filter(|&k| k >= 1)
                .map(GroupModel::Abelian)
                .ok_or_else(|| Error::UnknownModel(name.to_string())),
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            GroupModel::Abelian(k) => GroupElement::Abelian(vec![0; *k as usize]),
            GroupModel::Heisenberg => GroupElement::Heisenberg { x: 0, y: 0, z: 0 },
            GroupModel::BaumslagSolitar => GroupElement::Dyadic { p: 0, q: 0, e: 0 },
            GroupModel::Lamplighter => {
                GroupElement::Lamplighter { lamps: BTreeSet::new(), cursor: 0 }
            }
        }
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        match (self, g) {
            (GroupModel::Abelian(k), GroupElement::Abelian(v)) => v.len() == *k as usize,
            (GroupModel::Heisenberg, GroupElement::Heisenberg { .. }) => true,
            (GroupModel::BaumslagSolitar, GroupElement::Dyadic { p, q, .. }) => {
                *q == 0 || p % 2 != 0
            }
            (GroupModel::Lamplighter, GroupElement::Lamplighter { .. }) => true,
            _ => false,
        }
    }

    pub fn check(&self, g: &GroupElement) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::ModelMismatch(self.name()))
        }
    }

    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        match (a, b) {
            (GroupElement::Abelian(u), GroupElement::Abelian(v)) => {
                GroupElement::Abelian(u.iter().zip(v).map(|(x, y)| x + y).collect())
            }
            (
                GroupElement::Heisenberg { x, y, z },
                GroupElement::Heisenberg { x: x2, y: y2, z: z2 },
            ) => GroupElement::Heisenberg { x: x + x2, y: y + y2, z: z + z2 + x * y2 },
            (GroupElement::Dyadic { p, q, e }, GroupElement::Dyadic { p: p2, q: q2, e: e2 }) => {
                // 2^e (2^e2 s + p2/2^q2) + p/2^q
                let (sp, sq) = dyadic_add((*p2 as i128, *q2 as i64 - e), (*p as i128, *q as i64));
                GroupElement::Dyadic { p: sp, q: sq, e: e + e2 }
            }
            (
                GroupElement::Lamplighter { lamps, cursor },
                GroupElement::Lamplighter { lamps: l2, cursor: c2 },
            ) => {
                let shifted: BTreeSet<i64> = l2.iter().map(|x| x + cursor).collect();
                GroupElement::Lamplighter {
                    lamps: lamps.symmetric_difference(&shifted).copied().collect(),
                    cursor: cursor + c2,
                }
            }
            _ => panic!("elements of different groups: {a} and {b}"),
        }
    }

    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        match g {
            GroupElement::Abelian(v) => GroupElement::Abelian(v.iter().map(|x| -x).collect()),
            GroupElement::Heisenberg { x, y, z } => {
                GroupElement::Heisenberg { x: -x, y: -y, z: x * y - z }
            }
            GroupElement::Dyadic { p, q, e } => {
                // s = 2^e t + b  =>  t = 2^-e s - b 2^-e
                let (np, nq) = normalize_dyadic(-(*p as i128), *q as i64 + e);
                GroupElement::Dyadic { p: np, q: nq, e: -e }
            }
            GroupElement::Lamplighter { lamps, cursor } => GroupElement::Lamplighter {
                lamps: lamps.iter().map(|x| x - cursor).collect(),
                cursor: -cursor,
            },
        }
    }

    /// Product of a sequence of elements, left to right.
    pub fn product<'a>(&self, items: impl IntoIterator<Item = &'a GroupElement>) -> GroupElement {
        items.into_iter().fold(self.identity(), |acc, g| self.multiply(&acc, g))
    }

    /// The standard symmetric generating set.
    pub fn standard_generators(&self) -> GeneratorSet {
        let gens: Vec<(String, GroupElement)> = match self {
            GroupModel::Abelian(1) => vec![("t".into(), GroupElement::Abelian(vec![1]))],
            GroupModel::Abelian(k) => (0..*k as usize)
                .map(|i| {
                    let mut v = vec![0; *k as usize];
                    v[i] = 1;
                    let name = ["x", "y", "z", "w"]
                        .get(i)
                        .map(|s| s.to_string())
                        .unwrap_or_else(|| format!("x{i}"));
                    (name, GroupElement::Abelian(v))
                })
                .collect(),
            GroupModel::Heisenberg => vec![
                ("x".into(), GroupElement::Heisenberg { x: 1, y: 0, z: 0 }),
                ("y".into(), GroupElement::Heisenberg { x: 0, y: 1, z: 0 }),
            ],
            GroupModel::BaumslagSolitar => vec![
                ("a".into(), GroupElement::Dyadic { p: 1, q: 0, e: 0 }),
                ("t".into(), GroupElement::Dyadic { p: 0, q: 0, e: 1 }),
            ],
            GroupModel::Lamplighter => vec![
                ("t".into(), GroupElement::Lamplighter { lamps: BTreeSet::new(), cursor: 1 }),
                ("a".into(), GroupElement::Lamplighter { lamps: BTreeSet::from([0]), cursor: 0 }),
            ],
        };
        GeneratorSet::symmetric(*self, gens).expect("standard generators are valid")
    }
}

fn normalize_dyadic(mut p: i128, mut q: i64) -> (i64, u32) {
    if p == 0 {
        return (0, 0);
    }
    while q > 0 && p % 2 == 0 {
        p /= 2;
        q -= 1;
    }
    while q < 0 {
        p = p.checked_mul(2).expect("dyadic numerator overflow");
        q += 1;
    }
    (i64::try_from(p).expect("dyadic numerator overflow"), q as u32)
}

fn dyadic_add(a: (i128, i64), b: (i128, i64)) -> (i64, u32) {
    let q = a.1.max(b.1);
    let scale = |(p, k): (i128, i64)| -> i128 {
        let shift = u32::try_from(q - k).expect("shift fits");
        p.checked_mul(1i128.checked_shl(shift).expect("dyadic shift overflow"))
            .expect("dyadic numerator overflow")
    };
    normalize_dyadic(scale(a) + scale(b), q)
}
