use std::collections::BTreeMap;
use std::sync::Arc;

use super::codecs::{pair_letter, LAMP_LETTERS, PAIR_LETTERS};
use super::{CayleyAutomaticStructure, Codec, SymbolBinding, TransportSpec};
use crate::automata::{Alphabet, PaddedTuple, Sym, SyncAutomaton};
use crate::error::{Error, Result};
use crate::group::{GeneratorSet, GroupElement, GroupModel, Word};

/// A named, reproducible structure construction.
#[derive(Clone, Copy)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub model: &'static str,
    pub summary: &'static str,
    pub build: fn() -> Result<CayleyAutomaticStructure>,
}

pub fn catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "Z-unary",
            model: "Z",
            summary: "normal forms t^k and T^k; letters are the generators",
            build: z_unary,
        },
        CatalogEntry {
            name: "Z-zigzag-binary-base",
            model: "Z",
            summary: "LSB-first binary of the zigzag index, generators t, T only",
            build: z_zigzag_base,
        },
        CatalogEntry {
            name: "Z-zigzag-binary",
            model: "Z",
            summary: "Z-zigzag-binary-base with letters 0 -> 1 and 1 -> t added as generators",
            build: z_zigzag,
        },
        CatalogEntry {
            name: "Z2-zigzag-binary-base",
            model: "Z2",
            summary: "componentwise zigzag binary over pair letters, generators x, y",
            build: z2_zigzag_base,
        },
        CatalogEntry {
            name: "Z2-zigzag-binary",
            model: "Z2",
            summary: "Z2-zigzag-binary-base with pair letters added as generators",
            build: z2_zigzag,
        },
        CatalogEntry {
            name: "LL2-zigzag-base",
            model: "LL2",
            summary: "lamp states at positions 0, -1, 1, -2, ... with a cursor letter, generators t, a",
            build: ll2_zigzag_base,
        },
        CatalogEntry {
            name: "LL2-zigzag",
            model: "LL2",
            summary: "LL2-zigzag-base with lamp letters added as generators",
            build: ll2_zigzag,
        },
        CatalogEntry {
            name: "Z-unary-renamed",
            model: "Z",
            summary: "Z-unary transported to generators u, U",
            build: z_unary_renamed,
        },
        CatalogEntry {
            name: "Z-unary-doubled",
            model: "Z",
            summary: "Z-unary transported to generators t, T, s = t^2, S",
            build: z_unary_doubled,
        },
        CatalogEntry {
            name: "Z-zigzag-binary-doubled",
            model: "Z",
            summary: "Z-zigzag-binary transported to generators t, T, s = t^2, S and an identity letter e",
            build: z_zigzag_doubled,
        },
    ]
}

/// Short names accepted in place of full catalog names.
const ALIASES: [(&str, &str); 4] = [
    ("Z", "Z-unary"),
    ("Z2", "Z2-zigzag-binary"),
    ("LL2", "LL2-zigzag"),
    ("Z-zigzag", "Z-zigzag-binary"),
];

/// Looks up a catalog entry by name or alias, ignoring ASCII case.
pub fn find_entry(name: &str) -> Result<CatalogEntry> {
    let full = ALIASES
        .iter()
        .find(|(alias, _)| alias.eq_ignore_ascii_case(name))
        .map_or(name, |(_, full)| full);
    catalog()
        .into_iter()
        .find(|e| e.name.eq_ignore_ascii_case(full))
        .ok_or_else(|| Error::UnknownStructure(name.to_string()))
}

pub fn build_structure(name: &str) -> Result<CayleyAutomaticStructure> {
    find_entry(name)
        .and_then(|e| (e.build)())
}

/// Restricts a relation to pairs of normal forms.
fn over_language(raw: SyncAutomaton, language: &SyncAutomaton) -> Result<SyncAutomaton> {
    raw.product(&language.cylindrify(2, &[0])?)?
        .product(&language.cylindrify(2, &[1])?)
}

fn swapped(m: &SyncAutomaton) -> Result<SyncAutomaton> {
    m.permute_tapes(&[1, 0])
}

fn letters_are_generators(n: usize) -> Option<Vec<SymbolBinding>> {
    Some((0..n).map(|g| SymbolBinding { generator: g, designated: None }).collect())
}

fn z_unary() -> Result<CayleyAutomaticStructure> {
    let alphabet = Arc::new(Alphabet::new(["t", "T"])?);
    let generators = GroupModel::Abelian(1).standard_generators();
    let language = SyncAutomaton::from_fn(
        1,
        alphabet.clone(),
        0u8,
        |&s, col| match (s, col[0].index()?) {
            (0 | 1, 0) => Some(1),
            (0 | 2, 1) => Some(2),
            _ => None,
        },
        |_| true,
    );
    // 0 start, 1 both reading t, 2 both reading T, 3 done.
    let raw_t = SyncAutomaton::from_fn(
        2,
        alphabet,
        0u8,
        |&s, col| match (s, col[0].index(), col[1].index()) {
            (0 | 1, Some(0), Some(0)) => Some(1),
            (0 | 1, None, Some(0)) => Some(3),
            (0 | 2, Some(1), Some(1)) => Some(2),
            (0 | 2, Some(1), None) => Some(3),
            _ => None,
        },
        |&s| s == 3,
    );
    let m_t = over_language(raw_t, &language)?;
    let m_inv = swapped(&m_t)?;
    Ok(CayleyAutomaticStructure {
        name: "Z-unary".into(),
        multipliers: BTreeMap::from([(0, m_t), (1, m_inv)]),
        symbols: letters_are_generators(2),
        generators,
        language,
        codec: Codec::Unary,
    })
}

/// Binary words over `0`, `1` that are empty or end in `1`.
fn canonical_binary(alphabet: Arc<Alphabet>) -> SyncAutomaton {
    // 0 empty, 1 last letter 1, 2 last letter 0.
    SyncAutomaton::from_fn(
        1,
        alphabet,
        0u8,
        |_, col| col[0].index().map(|b| if b == 1 { 1 } else { 2 }),
        |&s| s != 2,
    )
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Inc {
    Start,
    ExpectOne,
    Add(u8),
    Sub(u8),
    Done,
}

/// Pairs `(u, v)` of LSB-first binary words with `zigzag(v) = zigzag(u) + 1`.
///
/// On naturals this is `n -> n + 2` for even `n`, `n -> n - 2` for odd
/// `n >= 3`, `0 -> 2` and `1 -> 0`.
fn zigzag_successor(alphabet: Arc<Alphabet>) -> SyncAutomaton {
    let bit = |s: Sym| s.index().unwrap_or(0) as u8;
    SyncAutomaton::from_fn(
        2,
        alphabet,
        Inc::Start,
        move |s, col| {
            let (a, b) = (col[0], col[1]);
            match s {
                Inc::Start => match (a.index(), b.index()) {
                    (None, Some(0)) => Some(Inc::ExpectOne),
                    (Some(0), Some(0)) => Some(Inc::Add(1)),
                    (Some(1), Some(1)) => Some(Inc::Sub(1)),
                    (Some(1), None) => Some(Inc::Done),
                    _ => None,
                },
                Inc::ExpectOne => (a.is_pad() && b.index() == Some(1)).then_some(Inc::Done),
                Inc::Add(c) => {
                    let sum = bit(a) + c;
                    (bit(b) == sum % 2).then_some(Inc::Add(sum / 2))
                }
                Inc::Sub(br) => {
                    let (d, nb) = if bit(a) >= *br { (bit(a) - br, 0) } else { (1, 1) };
                    (bit(b) == d).then_some(Inc::Sub(nb))
                }
                Inc::Done => None,
            }
        },
        |s| matches!(s, Inc::Add(0) | Inc::Sub(0) | Inc::Done),
    )
}

fn z_zigzag_base() -> Result<CayleyAutomaticStructure> {
    let alphabet = Arc::new(Alphabet::new(["0", "1"])?);
    let language = canonical_binary(alphabet.clone());
    let m_t = over_language(zigzag_successor(alphabet), &language)?;
    let m_inv = swapped(&m_t)?;
    Ok(CayleyAutomaticStructure {
        name: "Z-zigzag-binary-base".into(),
        generators: GroupModel::Abelian(1).standard_generators(),
        language,
        codec: Codec::Zigzag,
        multipliers: BTreeMap::from([(0, m_t), (1, m_inv)]),
        symbols: None,
    })
}

fn z_zigzag() -> Result<CayleyAutomaticStructure> {
    let base = z_zigzag_base()?;
    let t = base.generators.lookup("t")?;
    base.merge_alphabet("Z-zigzag-binary", &[Word::empty(), Word(vec![t])])
}

fn pair_language(alphabet: Arc<Alphabet>) -> SyncAutomaton {
    // Per coordinate: 0 nothing read, 1 last bit 1, 2 last bit 0, 3 ended.
    let advance = |s: u8, bit: Option<u8>| match (s, bit) {
        (3, Some(_)) => None,
        (_, Some(1)) => Some(1),
        (_, Some(_)) => Some(2),
        (2, None) => None,
        (_, None) => Some(3),
    };
    SyncAutomaton::from_fn(
        1,
        alphabet,
        (0u8, 0u8),
        move |&(sx, sy), col| {
            let (x, y) = pair_letter(col[0].index()?);
            Some((advance(sx, x)?, advance(sy, y)?))
        },
        |&(sx, sy)| sx != 2 && sy != 2,
    )
}

/// Lifts a one-coordinate multiplier to pair letters: coordinate `moving`
/// follows `inner`, the other coordinate is copied unchanged.
fn pair_multiplier(alphabet: Arc<Alphabet>, inner: &SyncAutomaton, moving: usize) -> SyncAutomaton {
    let split = |s: Sym| -> (Option<u8>, Option<u8>) {
        match s.index() {
            None => (None, None),
            Some(i) => {
                let (x, y) = pair_letter(i);
                if moving == 0 {
                    (x, y)
                } else {
                    (y, x)
                }
            }
        }
    };
    let sym = |b: Option<u8>| b.map_or(Sym::PAD, |b| Sym::letter(b as usize));
    let accepting = |set: &[usize]| set.iter().any(|&q| inner.is_accepting(q));
    SyncAutomaton::from_fn(
        2,
        alphabet,
        Some(vec![inner.initial()]),
        |state: &Option<Vec<usize>>, col| {
            let (um, us) = split(col[0]);
            let (vm, vs) = split(col[1]);
            if us != vs {
                return None;
            }
            match (state, um, vm) {
                (None, None, None) => Some(None),
                (Some(set), None, None) => accepting(set).then_some(None),
                (None, _, _) => None,
                (Some(set), _, _) => {
                    let next = inner.step_set(set, &PaddedTuple::new(vec![sym(um), sym(vm)]));
                    (!next.is_empty()).then_some(Some(next))
                }
            }
        },
        |state| state.as_ref().is_none_or(|set| accepting(set)),
    )
}

fn z2_zigzag_base() -> Result<CayleyAutomaticStructure> {
    let alphabet = Arc::new(Alphabet::new(PAIR_LETTERS)?);
    let language = pair_language(alphabet.clone());
    let one_dim = z_zigzag_base()?;
    let inner = one_dim.multiplier(0)?;
    let generators = GroupModel::Abelian(2).standard_generators();
    let mut multipliers = BTreeMap::new();
    for (coord, name) in [(0, "x"), (1, "y")] {
        let m = over_language(pair_multiplier(alphabet.clone(), inner, coord), &language)?;
        let g = generators.lookup(name)?;
        multipliers.insert(generators.inverse_of(g), swapped(&m)?);
        multipliers.insert(g, m);
    }
    Ok(CayleyAutomaticStructure {
        name: "Z2-zigzag-binary-base".into(),
        generators,
        language,
        codec: Codec::ZigzagPair,
        multipliers,
        symbols: None,
    })
}

fn z2_zigzag() -> Result<CayleyAutomaticStructure> {
    let base = z2_zigzag_base()?;
    let x = base.generators.lookup("x")?;
    let y = base.generators.lookup("y")?;
    // A letter carrying an x-bit 1 stands for x, else a y-bit 1 for y.
    let words: Vec<Word> = (0..PAIR_LETTERS.len())
        .map(|i| match pair_letter(i) {
            (Some(1), _) => Word(vec![x]),
            (_, Some(1)) => Word(vec![y]),
            _ => Word::empty(),
        })
        .collect();
    base.merge_alphabet("Z2-zigzag-binary", &words)
}

fn ll2_language(alphabet: Arc<Alphabet>) -> SyncAutomaton {
    // (cursor seen, last letter is lit or the cursor)
    SyncAutomaton::from_fn(
        1,
        alphabet,
        (false, false),
        |&(seen, _), col| {
            let l = col[0].index()?;
            let cursor = l >= 2;
            if seen && cursor {
                return None;
            }
            Some((seen || cursor, l != 0))
        },
        |&(seen, last)| seen && last,
    )
}

fn lamp(s: Sym) -> bool {
    matches!(s.index(), Some(1 | 3))
}

fn cursor(s: Sym) -> bool {
    matches!(s.index(), Some(2 | 3))
}

fn ll2_toggle(alphabet: Arc<Alphabet>) -> SyncAutomaton {
    SyncAutomaton::from_fn(
        2,
        alphabet,
        false,
        |&seen, col| {
            let (u, v) = (col[0], col[1]);
            if cursor(u) != cursor(v) {
                return None;
            }
            if cursor(u) {
                (lamp(u) != lamp(v)).then_some(true)
            } else {
                (lamp(u) == lamp(v)).then_some(seen)
            }
        },
        |&seen| seen,
    )
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Shift {
    Start,
    Scan { odd: bool },
    AwaitV(u8),
    AwaitU(u8),
    Done,
}

/// Pairs of lamplighter words whose cursors differ by `+1`.
///
/// Position `p` sits at index `2p` for `p >= 0` and `-2p - 1` otherwise, so
/// the new cursor is two letters later, or at index 0 when moving from -1.
fn ll2_shift(alphabet: Arc<Alphabet>) -> SyncAutomaton {
    SyncAutomaton::from_fn(
        2,
        alphabet,
        Shift::Start,
        |s, col| {
            let (u, v) = (col[0], col[1]);
            if lamp(u) != lamp(v) {
                return None;
            }
            match (s, cursor(u), cursor(v)) {
                (_, true, true) => None,
                (Shift::Start, false, false) => Some(Shift::Scan { odd: true }),
                (Shift::Start, true, false) => Some(Shift::AwaitV(2)),
                (Shift::Start, false, true) => Some(Shift::AwaitU(1)),
                (Shift::Scan { odd }, false, false) => Some(Shift::Scan { odd: !odd }),
                (Shift::Scan { odd: false }, true, false) => Some(Shift::AwaitV(2)),
                (Shift::Scan { odd: true }, false, true) => Some(Shift::AwaitU(2)),
                (Shift::AwaitV(1), false, true) => Some(Shift::Done),
                (Shift::AwaitV(k), false, false) if *k > 1 => Some(Shift::AwaitV(k - 1)),
                (Shift::AwaitU(1), true, false) => Some(Shift::Done),
                (Shift::AwaitU(k), false, false) if *k > 1 => Some(Shift::AwaitU(k - 1)),
                (Shift::Done, false, false) => Some(Shift::Done),
                _ => None,
            }
        },
        |s| *s == Shift::Done,
    )
}

fn ll2_zigzag_base() -> Result<CayleyAutomaticStructure> {
    let alphabet = Arc::new(Alphabet::new(LAMP_LETTERS)?);
    let language = ll2_language(alphabet.clone());
    let generators = GroupModel::Lamplighter.standard_generators();
    let t = generators.lookup("t")?;
    let a = generators.lookup("a")?;
    let m_t = over_language(ll2_shift(alphabet.clone()), &language)?;
    let m_a = over_language(ll2_toggle(alphabet), &language)?;
    let multipliers =
        BTreeMap::from([(generators.inverse_of(t), swapped(&m_t)?), (t, m_t), (a, m_a)]);
    Ok(CayleyAutomaticStructure {
        name: "LL2-zigzag-base".into(),
        generators,
        language,
        codec: Codec::LamplighterZigzag,
        multipliers,
        symbols: None,
    })
}

fn ll2_zigzag() -> Result<CayleyAutomaticStructure> {
    let base = ll2_zigzag_base()?;
    let a = base.generators.lookup("a")?;
    let words: Vec<Word> = (0..LAMP_LETTERS.len())
        .map(|i| if lamp(Sym::letter(i)) { Word(vec![a]) } else { Word::empty() })
        .collect();
    base.merge_alphabet("LL2-zigzag", &words)
}

fn z_unary_renamed() -> Result<CayleyAutomaticStructure> {
    let s = z_unary()?;
    let ys = GeneratorSet::symmetric(
        GroupModel::Abelian(1),
        vec![("u".into(), GroupElement::Abelian(vec![1]))],
    )?;
    let spec = TransportSpec {
        generators: ys,
        rho: vec![Word(vec![0]), Word(vec![1])],
        kappa: vec![Word(vec![0]), Word(vec![1])],
    };
    Ok(s.transport("Z-unary-renamed", &spec, 8)?.structure)
}

/// `Y = {t, T, s, S}` with `s = t^2`, identity on the old letters.  With
/// `with_identity`, `Y` also gets a letter `e` for generators of value 0.
pub fn doubled_spec(s: &CayleyAutomaticStructure, with_identity: bool) -> Result<TransportSpec> {
    let mut ys = GeneratorSet::symmetric(
        GroupModel::Abelian(1),
        vec![
            ("t".into(), GroupElement::Abelian(vec![1])),
            ("s".into(), GroupElement::Abelian(vec![2])),
        ],
    )?;
    if with_identity {
        ys.push_symmetric("e", GroupElement::Abelian(vec![0]))?;
    }
    let (t, tt) = (ys.lookup("t")?, ys.lookup("T")?);
    let st = s.generators.lookup("t")?;
    let sti = s.generators.inverse_of(st);
    let rho = (0..s.generators.len())
        .map(|x| match s.generators.value(x) {
            GroupElement::Abelian(v) if v[0] == 1 => Ok(Word(vec![t])),
            GroupElement::Abelian(v) if v[0] == -1 => Ok(Word(vec![tt])),
            GroupElement::Abelian(v) if v[0] == 0 && with_identity => Ok(Word(vec![ys.lookup("e")?])),
            other => Err(Error::InvalidParameter(format!("no image for value {other}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    let kappa = ys
        .generators()
        .iter()
        .map(|y| match &y.value {
            GroupElement::Abelian(v) => {
                let g = if v[0] >= 0 { st } else { sti };
                Word(vec![g; v[0].unsigned_abs() as usize])
            }
            _ => unreachable!(),
        })
        .collect();
    Ok(TransportSpec { generators: ys, rho, kappa })
}

fn z_unary_doubled() -> Result<CayleyAutomaticStructure> {
    let s = z_unary()?;
    let spec = doubled_spec(&s, false)?;
    Ok(s.transport("Z-unary-doubled", &spec, 8)?.structure)
}

fn z_zigzag_doubled() -> Result<CayleyAutomaticStructure> {
    let s = z_zigzag()?;
    let spec = doubled_spec(&s, true)?;
    Ok(s.transport("Z-zigzag-binary-doubled", &spec, 8)?.structure)
}
