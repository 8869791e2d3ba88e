use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::automata::Sym;
use crate::error::{Error, Result};
use crate::group::GroupElement;

/// Bit letters `0`, `1` for one coordinate of a pair letter.
pub const PAIR_LETTERS: [&str; 8] = ["00", "01", "10", "11", "0$", "1$", "$0", "$1"];

/// Pair letter `(x, y)` where `None` is inner padding.
pub fn pair_letter(index: usize) -> (Option<u8>, Option<u8>) {
    match index {
        0 => (Some(0), Some(0)),
        1 => (Some(0), Some(1)),
        2 => (Some(1), Some(0)),
        3 => (Some(1), Some(1)),
        4 => (Some(0), None),
        5 => (Some(1), None),
        6 => (None, Some(0)),
        7 => (None, Some(1)),
        _ => panic!("pair letter {index} out of range"),
    }
}

pub fn pair_index(x: Option<u8>, y: Option<u8>) -> Option<usize> {
    (0..8).find(|&i| pair_letter(i) == (x, y))
}

/// Letters of the lamplighter encoding: lamp state, and whether the cursor
/// sits at this position.
pub const LAMP_LETTERS: [&str; 4] = ["0", "1", "c0", "c1"];

/// Position encoded at index `i` of a lamplighter word: `0, -1, 1, -2, 2, ...`.
pub fn zigzag_position(i: usize) -> i64 {
    if i % 2 == 0 {
        (i / 2) as i64
    } else {
        -(((i + 1) / 2) as i64)
    }
}

pub fn zigzag_index(p: i64) -> usize {
    if p >= 0 {
        (2 * p) as usize
    } else {
        (-2 * p - 1) as usize
    }
}

/// Integer `z` encoded by the natural number `n`: `n/2` for even `n`,
/// `-(n+1)/2` for odd `n`.
pub fn zigzag_decode(n: u64) -> i64 {
    if n % 2 == 0 {
        (n / 2) as i64
    } else {
        -(n.div_ceil(2) as i64)
    }
}

pub fn zigzag_encode(z: i64) -> u64 {
    if z >= 0 {
        2 * z as u64
    } else {
        2 * z.unsigned_abs() - 1
    }
}

/// Least-significant-bit-first binary digits without trailing zeros.
pub fn lsb_bits(mut n: u64) -> Vec<u8> {
    let mut out = Vec::new();
    while n > 0 {
        out.push((n & 1) as u8);
        n >>= 1;
    }
    out
}

pub fn from_lsb_bits(bits: impl IntoIterator<Item = u8>) -> Result<u64> {
    let mut n: u64 = 0;
    for (i, b) in bits.into_iter().enumerate() {
        if b == 1 {
            if i >= 63 {
                return Err(Error::InvalidParameter("binary word too long".into()));
            }
            n |= 1 << i;
        }
    }
    Ok(n)
}

/// The bijection between a structure's language and the group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Codec {
    /// `t^k -> k`, `T^k -> -k` over letters `t`, `T`.
    Unary,
    /// Zigzag integer of an LSB-first binary word over `0`, `1`.
    Zigzag,
    /// Componentwise zigzag over pair letters, for `Z^2`.
    ZigzagPair,
    /// Lamp states listed at positions `0, -1, 1, -2, ...` with one cursor letter.
    LamplighterZigzag,
    /// Words cut into blocks of `block` letters, each block being the image
    /// of one letter of the inner codec's alphabet.
    Block { inner: Box<Codec>, block: usize, images: Vec<Vec<usize>> },
}

impl Codec {
    pub fn name(&self) -> String {
        match self {
            Codec::Unary => "unary".into(),
            Codec::Zigzag => "zigzag".into(),
            Codec::ZigzagPair => "zigzag-pair".into(),
            Codec::LamplighterZigzag => "lamplighter-zigzag".into(),
            Codec::Block { inner, block, .. } => format!("block{block}({})", inner.name()),
        }
    }

    /// `ψ`: the group element a word represents.
    pub fn decode(&self, word: &[Sym]) -> Result<GroupElement> {
        let idx = |s: &Sym| s.index().ok_or_else(|| Error::InvalidParameter("padding in word".into()));
        match self {
            Codec::Unary => {
                let mut k = 0i64;
                for s in word {
                    k += if idx(s)? == 0 { 1 } else { -1 };
                }
                Ok(GroupElement::Abelian(vec![k]))
            }
            Codec::Zigzag => {
                let bits: Vec<u8> = word.iter().map(|s| idx(s).map(|i| i as u8)).collect::<Result<_>>()?;
                Ok(GroupElement::Abelian(vec![zigzag_decode(from_lsb_bits(bits)?)]))
            }
            Codec::ZigzagPair => {
                let mut xs = Vec::new();
                let mut ys = Vec::new();
                for s in word {
                    let (x, y) = pair_letter(idx(s)?);
                    xs.extend(x);
                    ys.extend(y);
                }
                Ok(GroupElement::Abelian(vec![
                    zigzag_decode(from_lsb_bits(xs)?),
                    zigzag_decode(from_lsb_bits(ys)?),
                ]))
            }
            Codec::LamplighterZigzag => {
                let mut lamps = BTreeSet::new();
                let mut cursor = 0;
                for (i, s) in word.iter().enumerate() {
                    let l = idx(s)?;
                    if l == 1 || l == 3 {
                        lamps.insert(zigzag_position(i));
                    }
                    if l >= 2 {
                        cursor = zigzag_position(i);
                    }
                }
                Ok(GroupElement::Lamplighter { lamps, cursor })
            }
            Codec::Block { inner, block, images } => {
                if word.len() % block != 0 {
                    return Err(Error::InvalidParameter("word length is not a multiple of the block".into()));
                }
                let mut letters = Vec::with_capacity(word.len() / block);
                for chunk in word.chunks(*block) {
                    let ids: Vec<usize> = chunk.iter().map(idx).collect::<Result<_>>()?;
                    let l = images
                        .iter()
                        .position(|img| *img == ids)
                        .ok_or_else(|| Error::InvalidParameter("block is not a letter image".into()))?;
                    letters.push(Sym::letter(l));
                }
                inner.decode(&letters)
            }
        }
    }

    /// `ψ^-1`: the word representing a group element.
    pub fn encode(&self, g: &GroupElement) -> Result<Vec<Sym>> {
        let unencodable = || Error::Unencodable(format!("{g} for codec {}", self.name()));
        match (self, g) {
            (Codec::Unary, GroupElement::Abelian(v)) if v.len() == 1 => {
                let letter = Sym::letter(usize::from(v[0] < 0));
                Ok(vec![letter; v[0].unsigned_abs() as usize])
            }
            (Codec::Zigzag, GroupElement::Abelian(v)) if v.len() == 1 => {
                Ok(lsb_bits(zigzag_encode(v[0])).into_iter().map(|b| Sym::letter(b as usize)).collect())
            }
            (Codec::ZigzagPair, GroupElement::Abelian(v)) if v.len() == 2 => {
                let xs = lsb_bits(zigzag_encode(v[0]));
                let ys = lsb_bits(zigzag_encode(v[1]));
                let len = xs.len().max(ys.len());
                Ok((0..len)
                    .map(|j| Sym::letter(pair_index(xs.get(j).copied(), ys.get(j).copied()).unwrap()))
                    .collect())
            }
            (Codec::LamplighterZigzag, GroupElement::Lamplighter { lamps, cursor }) => {
                let cur = zigzag_index(*cursor);
                let len = lamps.iter().map(|&p| zigzag_index(p)).chain([cur]).max().unwrap() + 1;
                let mut out = vec![0usize; len];
                for &p in lamps {
                    out[zigzag_index(p)] = 1;
                }
                out[cur] += 2;
                Ok(out.into_iter().map(Sym::letter).collect())
            }
            (Codec::Block { inner, images, .. }, _) => Ok(inner
                .encode(g)?
                .iter()
                .flat_map(|s| images[s.index().unwrap()].iter().map(|&i| Sym::letter(i)))
                .collect()),
            _ => Err(unencodable()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zigzag_enumerates_integers() {
        let got: Vec<i64> = (0..7).map(zigzag_decode).collect();
        assert_eq!(got, [0, -1, 1, -2, 2, -3, 3]);
        for z in -50..50 {
            assert_eq!(zigzag_decode(zigzag_encode(z)), z);
        }
    }

    #[test]
    fn lamplighter_words_round_trip() {
        let g = GroupElement::Lamplighter { lamps: BTreeSet::from([-2, 1]), cursor: -1 };
        let w = Codec::LamplighterZigzag.encode(&g).unwrap();
        // Positions 0, -1, 1, -2 carry: off, cursor, lit, lit.
        let idx: Vec<usize> = w.iter().map(|s| s.index().unwrap()).collect();
        assert_eq!(idx, [0, 2, 1, 1]);
        assert_eq!(Codec::LamplighterZigzag.decode(&w).unwrap(), g);
    }

    #[test]
    fn pair_words_pad_the_shorter_coordinate() {
        let g = GroupElement::Abelian(vec![-2, 0]);
        let w = Codec::ZigzagPair.encode(&g).unwrap();
        let names: Vec<&str> = w.iter().map(|s| PAIR_LETTERS[s.index().unwrap()]).collect();
        assert_eq!(names, ["1$", "1$"]);
        assert_eq!(Codec::ZigzagPair.decode(&w).unwrap(), g);
    }
}
