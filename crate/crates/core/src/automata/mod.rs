//! Synchronous multi-tape automata over a padded alphabet.
//!
//! A `k`-tape automaton reads columns of `k` symbols.  Each tape carries a
//! word over the alphabet followed by padding, so a run reads the convolution
//! of a `k`-tuple of words.  Every automaton built by this module is kept in
//! a *normalised* form: each state remembers which tapes are already padded,
//! no transition resumes a padded tape, and every state is accessible and
//! co-accessible.  States are numbered in breadth-first order from the
//! initial state, so structurally equal constructions serialise identically.

mod enumerate;
mod json;
mod ops;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;
use std::ops::Deref;
use std::sync::Arc;

use crate::error::{Error, Result};

pub use enumerate::Enumeration;
pub use json::AutomatonJson;
pub use ops::{compose_word_multiplier, state_bound_constants, StateBoundConstants};

/// Largest supported tape count.
pub const MAX_TAPES: usize = 32;

/// A tape symbol: either a letter of the alphabet or the padding symbol.
///
/// Symbols order letters by their declared position; padding sorts after
/// every letter.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(u16);

impl Sym {
    pub const PAD: Sym = Sym(u16::MAX);

    pub fn letter(index: usize) -> Sym {
        assert!(index < u16::MAX as usize, "letter index {index} out of range");
        Sym(index as u16)
    }

    pub fn is_pad(self) -> bool {
        self == Sym::PAD
    }

    /// Letter index, or `None` for padding.
    pub fn index(self) -> Option<usize> {
        if self.is_pad() {
            None
        } else {
            Some(self.0 as usize)
        }
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index() {
            Some(i) => write!(f, "#{i}"),
            None => f.write_str("$"),
        }
    }
}

/// Printable token used for the padding symbol.
pub const PAD_TOKEN: &str = "$";

/// Finite ordered alphabet of named letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    letters: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(letters: impl IntoIterator<Item = S>) -> Result<Self> {
        let letters: Vec<String> = letters.into_iter().map(Into::into).collect();
        if letters.is_empty() {
            return Err(Error::InvalidAutomaton("alphabet is empty".into()));
        }
        let mut seen = BTreeSet::new();
        for l in &letters {
            if l.is_empty() || l == PAD_TOKEN || l.chars().any(char::is_whitespace) {
                return Err(Error::InvalidAutomaton(format!("invalid letter `{l}`")));
            }
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidAutomaton(format!("duplicate letter `{l}`")));
            }
        }
        if letters.len() >= u16::MAX as usize {
            return Err(Error::InvalidAutomaton("alphabet too large".into()));
        }
        Ok(Alphabet { letters })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn name(&self, sym: Sym) -> &str {
        match sym.index() {
            Some(i) => &self.letters[i],
            None => PAD_TOKEN,
        }
    }

    pub fn lookup(&self, name: &str) -> Option<Sym> {
        if name == PAD_TOKEN {
            return Some(Sym::PAD);
        }
        self.letters.iter().position(|l| l == name).map(Sym::letter)
    }

    pub fn letter(&self, name: &str) -> Result<Sym> {
        match self.lookup(name) {
            Some(s) if !s.is_pad() => Ok(s),
            _ => Err(Error::UnknownSymbol(name.to_string())),
        }
    }

    /// All symbols in enumeration order: letters, then padding.
    pub fn symbols_with_pad(&self) -> impl Iterator<Item = Sym> + '_ {
        (0..self.letters.len()).map(Sym::letter).chain(std::iter::once(Sym::PAD))
    }

    fn single_char(&self) -> bool {
        self.letters.iter().all(|l| l.chars().count() == 1)
    }

    /// Parses a word.  Whitespace separates letters when present; otherwise
    /// the text is split greedily into the longest matching letters.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Sym>> {
        let text = text.trim();
        if text.is_empty() || text == "ε" {
            return Ok(Vec::new());
        }
        if text.contains(char::is_whitespace) {
            return text.split_whitespace().map(|t| self.letter(t)).collect();
        }
        let mut out = Vec::new();
        let mut rest = text;
        while !rest.is_empty() {
            let best = self
                .letters
                .iter()
                .enumerate()
                .filter(|(_, l)| rest.starts_with(l.as_str()))
                .max_by_key(|(_, l)| l.len());
            match best {
                Some((i, l)) => {
                    out.push(Sym::letter(i));
                    rest = &rest[l.len()..];
                }
                None => return Err(Error::UnknownSymbol(rest.to_string())),
            }
        }
        Ok(out)
    }

    pub fn format_word(&self, word: &[Sym]) -> String {
        let names: Vec<&str> = word.iter().map(|&s| self.name(s)).collect();
        if self.single_char() {
            names.concat()
        } else {
            names.join(" ")
        }
    }
}

/// One column of a convolution: a symbol per tape, never all padding.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PaddedTuple(Box<[Sym]>);

impl PaddedTuple {
    pub fn new(syms: Vec<Sym>) -> Self {
        PaddedTuple(syms.into_boxed_slice())
    }

    pub fn is_all_pad(&self) -> bool {
        self.0.iter().all(|s| s.is_pad())
    }

    fn pad_mask(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_pad())
            .fold(0, |m, (i, _)| m | (1 << i))
    }

    /// True when no padded tape (per `mask`) carries a letter.
    fn respects(&self, mask: u64) -> bool {
        self.0
            .iter()
            .enumerate()
            .all(|(i, s)| mask & (1 << i) == 0 || s.is_pad())
    }
}

impl Deref for PaddedTuple {
    type Target = [Sym];
    fn deref(&self) -> &[Sym] {
        &self.0
    }
}

impl fmt::Debug for PaddedTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// A tuple of words, read in parallel with padding.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Convolution(pub Vec<Vec<Sym>>);

impl Convolution {
    pub fn tapes(&self) -> usize {
        self.0.len()
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn columns(&self) -> Vec<PaddedTuple> {
        (0..self.len())
            .map(|j| {
                PaddedTuple::new(
                    self.0
                        .iter()
                        .map(|w| w.get(j).copied().unwrap_or(Sym::PAD))
                        .collect(),
                )
            })
            .collect()
    }

    pub fn from_columns(tapes: usize, columns: &[PaddedTuple]) -> Self {
        let mut words = vec![Vec::new(); tapes];
        for col in columns {
            for (w, &s) in words.iter_mut().zip(col.iter()) {
                if !s.is_pad() {
                    w.push(s);
                }
            }
        }
        Convolution(words)
    }

    pub fn format(&self, alphabet: &Alphabet) -> String {
        let parts: Vec<String> = self.0.iter().map(|w| alphabet.format_word(w)).collect();
        format!("({})", parts.join(", "))
    }
}

type Delta = BTreeMap<PaddedTuple, Vec<usize>>;

/// A normalised synchronous `k`-tape automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyncAutomaton {
    tapes: usize,
    alphabet: Arc<Alphabet>,
    initial: usize,
    accepting: Vec<bool>,
    delta: Vec<Delta>,
}

impl SyncAutomaton {
    /// Builds an automaton from explicit parts.
    ///
    /// Labels must have one symbol per tape and must not be all padding; no
    /// accepted run may read a letter on a tape after padding it.  The result
    /// is normalised and trimmed.
    pub fn new(
        tapes: usize,
        alphabet: Arc<Alphabet>,
        states: usize,
        initial: usize,
        accepting: &[usize],
        transitions: impl IntoIterator<Item = (usize, PaddedTuple, usize)>,
    ) -> Result<Self> {
        if tapes == 0 || tapes > MAX_TAPES {
            return Err(Error::InvalidAutomaton(format!("unsupported tape count {tapes}")));
        }
        if initial >= states {
            return Err(Error::InvalidAutomaton(format!("initial state {initial} out of range")));
        }
        let mut acc = vec![false; states];
        for &q in accepting {
            if q >= states {
                return Err(Error::InvalidAutomaton(format!("accepting state {q} out of range")));
            }
            acc[q] = true;
        }
        let mut delta = vec![Delta::new(); states];
        for (from, label, to) in transitions {
            if from >= states || to >= states {
                return Err(Error::InvalidAutomaton(format!(
                    "transition {from} -> {to} references a missing state"
                )));
            }
            check_label(tapes, &alphabet, &label)?;
            delta[from].entry(label).or_default().push(to);
        }
        if let Some((q, label)) = padding_violation(initial, &acc, &delta) {
            return Err(Error::InvalidAutomaton(format!(
                "state {q}: transition on {} resumes a padded tape on an accepting path",
                format_label(&alphabet, &label)
            )));
        }
        Ok(canonical(tapes, alphabet, initial, &acc, &delta))
    }

    /// Builds the automaton whose states are those reachable from `initial`
    /// under a deterministic step function.  `step` is offered every column
    /// that is not all padding; columns that resume a padded tape are
    /// discarded during normalisation.
    pub fn from_fn<S, F, A>(
        tapes: usize,
        alphabet: Arc<Alphabet>,
        initial: S,
        step: F,
        accept: A,
    ) -> SyncAutomaton
    where
        S: Clone + Eq + Hash,
        F: Fn(&S, &[Sym]) -> Option<S>,
        A: Fn(&S) -> bool,
    {
        assert!(tapes >= 1 && tapes <= MAX_TAPES);
        let labels = all_labels(tapes, &alphabet);
        let mut index: HashMap<S, usize> = HashMap::new();
        let mut states = vec![initial.clone()];
        index.insert(initial, 0);
        let mut delta: Vec<Delta> = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let s = states[i].clone();
            let mut row = Delta::new();
            for label in &labels {
                if let Some(t) = step(&s, label) {
                    let j = *index.entry(t.clone()).or_insert_with(|| {
                        states.push(t);
                        states.len() - 1
                    });
                    row.insert(label.clone(), vec![j]);
                }
            }
            delta.push(row);
            i += 1;
        }
        let acc: Vec<bool> = states.iter().map(&accept).collect();
        canonical(tapes, alphabet, 0, &acc, &delta)
    }

    /// The automaton with no accepted convolution.
    pub fn empty(tapes: usize, alphabet: Arc<Alphabet>) -> Self {
        SyncAutomaton {
            tapes,
            alphabet,
            initial: 0,
            accepting: vec![false],
            delta: vec![Delta::new()],
        }
    }

    pub fn tapes(&self) -> usize {
        self.tapes
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = usize> + '_ {
        self.accepting.iter().enumerate().filter(|(_, &a)| a).map(|(q, _)| q)
    }

    pub fn transitions(&self, q: usize) -> &BTreeMap<PaddedTuple, Vec<usize>> {
        &self.delta[q]
    }

    pub fn num_transitions(&self) -> usize {
        self.delta.iter().flat_map(|d| d.values()).map(Vec::len).sum()
    }

    pub fn is_empty_language(&self) -> bool {
        !self.accepting.iter().any(|&a| a)
    }

    /// All `(from, label, to)` triples in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, &PaddedTuple, usize)> + '_ {
        self.delta.iter().enumerate().flat_map(|(q, d)| {
            d.iter().flat_map(move |(l, ts)| ts.iter().map(move |&t| (q, l, t)))
        })
    }

    /// Subset of states reached from `from` on `label`.
    pub fn step_set(&self, from: &[usize], label: &PaddedTuple) -> Vec<usize> {
        let mut out: Vec<usize> = from
            .iter()
            .filter_map(|&q| self.delta[q].get(label))
            .flatten()
            .copied()
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// States reachable after reading each prefix of the convolution; the
    /// first entry is `{initial}`.
    pub fn run_sets(&self, conv: &Convolution) -> Result<Vec<Vec<usize>>> {
        self.check_convolution(conv)?;
        let mut sets = vec![vec![self.initial]];
        for col in conv.columns() {
            let next = self.step_set(sets.last().unwrap(), &col);
            sets.push(next);
        }
        Ok(sets)
    }

    pub fn accepts(&self, conv: &Convolution) -> Result<bool> {
        let sets = self.run_sets(conv)?;
        Ok(sets.last().unwrap().iter().any(|&q| self.accepting[q]))
    }

    /// An accepting run on the convolution, as the list of visited states.
    pub fn accepting_run(&self, conv: &Convolution) -> Result<Option<Vec<usize>>> {
        let sets = self.run_sets(conv)?;
        let cols = conv.columns();
        let Some(&last) = sets.last().unwrap().iter().find(|&&q| self.accepting[q]) else {
            return Ok(None);
        };
        let mut run = vec![last];
        for j in (0..cols.len()).rev() {
            let cur = *run.last().unwrap();
            let prev = sets[j]
                .iter()
                .copied()
                .find(|&p| self.delta[p].get(&cols[j]).is_some_and(|ts| ts.contains(&cur)))
                .expect("backward step exists");
            run.push(prev);
        }
        run.reverse();
        Ok(Some(run))
    }

    fn check_convolution(&self, conv: &Convolution) -> Result<()> {
        if conv.tapes() != self.tapes {
            return Err(Error::TapeMismatch { expected: self.tapes, found: conv.tapes() });
        }
        for w in &conv.0 {
            for &s in w {
                match s.index() {
                    Some(i) if i < self.alphabet.len() => {}
                    _ => return Err(Error::UnknownSymbol(format!("{s:?}"))),
                }
            }
        }
        Ok(())
    }

    /// Copy of the automaton with one transition removed.
    pub fn without_transition(&self, from: usize, label: &PaddedTuple, to: usize) -> Self {
        let mut delta = self.delta.clone();
        if let Some(ts) = delta[from].get_mut(label) {
            ts.retain(|&t| t != to);
            if ts.is_empty() {
                delta[from].remove(label);
            }
        }
        canonical(self.tapes, self.alphabet.clone(), self.initial, &self.accepting, &delta)
    }

    pub fn format_label(&self, label: &PaddedTuple) -> String {
        format_label(&self.alphabet, label)
    }
}

fn format_label(alphabet: &Alphabet, label: &PaddedTuple) -> String {
    let names: Vec<&str> = label.iter().map(|&s| alphabet.name(s)).collect();
    format!("({})", names.join(","))
}

fn check_label(tapes: usize, alphabet: &Alphabet, label: &PaddedTuple) -> Result<()> {
    if label.len() != tapes {
        return Err(Error::TapeMismatch { expected: tapes, found: label.len() });
    }
    if label.is_all_pad() {
        return Err(Error::InvalidAutomaton("label is all padding".into()));
    }
    for s in label.iter() {
        if let Some(i) = s.index() {
            if i >= alphabet.len() {
                return Err(Error::UnknownSymbol(format!("{s:?}")));
            }
        }
    }
    Ok(())
}

/// Every column over `tapes` tapes that is not all padding, in label order.
pub(crate) fn all_labels(tapes: usize, alphabet: &Alphabet) -> Vec<PaddedTuple> {
    let syms: Vec<Sym> = alphabet.symbols_with_pad().collect();
    let mut out: Vec<Vec<Sym>> = vec![Vec::new()];
    for _ in 0..tapes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                syms.iter().map(move |&s| {
                    let mut p = prefix.clone();
                    p.push(s);
                    p
                })
            })
            .collect();
    }
    out.into_iter()
        .map(PaddedTuple::new)
        .filter(|l| !l.is_all_pad())
        .collect()
}

fn co_accessible(accepting: &[bool], delta: &[Delta]) -> Vec<bool> {
    let n = accepting.len();
    let mut rev = vec![Vec::new(); n];
    for (q, d) in delta.iter().enumerate() {
        for ts in d.values() {
            for &t in ts {
                rev[t].push(q);
            }
        }
    }
    let mut live = accepting.to_vec();
    let mut queue: VecDeque<usize> = (0..n).filter(|&q| live[q]).collect();
    while let Some(q) = queue.pop_front() {
        for &p in &rev[q] {
            if !live[p] {
                live[p] = true;
                queue.push_back(p);
            }
        }
    }
    live
}

/// A reachable transition that resumes a padded tape and still leads to
/// acceptance, if any.
fn padding_violation(
    initial: usize,
    accepting: &[bool],
    delta: &[Delta],
) -> Option<(usize, PaddedTuple)> {
    let live = co_accessible(accepting, delta);
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert((initial, 0u64));
    queue.push_back((initial, 0u64));
    while let Some((q, mask)) = queue.pop_front() {
        for (label, ts) in &delta[q] {
            let ok = label.respects(mask);
            for &t in ts {
                if !live[t] {
                    continue;
                }
                if !ok {
                    return Some((q, label.clone()));
                }
                let next = (t, mask | label.pad_mask());
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
    }
    None
}

/// Normalises, trims and renumbers an automaton given as raw parts.
pub(crate) fn canonical(
    tapes: usize,
    alphabet: Arc<Alphabet>,
    initial: usize,
    accepting: &[bool],
    delta: &[Delta],
) -> SyncAutomaton {
    let mut index: HashMap<(usize, u64), usize> = HashMap::new();
    let mut nodes = vec![(initial, 0u64)];
    index.insert((initial, 0), 0);
    let mut edges: Vec<Vec<(PaddedTuple, usize)>> = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        let (q, mask) = nodes[i];
        let mut out = Vec::new();
        for (label, ts) in &delta[q] {
            if !label.respects(mask) {
                continue;
            }
            let nm = mask | label.pad_mask();
            for &t in ts {
                let j = *index.entry((t, nm)).or_insert_with(|| {
                    nodes.push((t, nm));
                    nodes.len() - 1
                });
                out.push((label.clone(), j));
            }
        }
        edges.push(out);
        i += 1;
    }
    let node_acc: Vec<bool> = nodes.iter().map(|&(q, _)| accepting[q]).collect();
    let node_delta: Vec<Delta> = edges
        .iter()
        .map(|es| {
            let mut d = Delta::new();
            for (l, t) in es {
                d.entry(l.clone()).or_default().push(*t);
            }
            d
        })
        .collect();
    let live = co_accessible(&node_acc, &node_delta);
    if !live[0] {
        return SyncAutomaton::empty(tapes, alphabet);
    }
    let mut renum = vec![usize::MAX; nodes.len()];
    let mut order = vec![0usize];
    renum[0] = 0;
    let mut k = 0;
    while k < order.len() {
        let v = order[k];
        for ts in node_delta[v].values() {
            let mut ts = ts.clone();
            ts.sort_unstable();
            for t in ts {
                if live[t] && renum[t] == usize::MAX {
                    renum[t] = order.len();
                    order.push(t);
                }
            }
        }
        k += 1;
    }
    let mut new_delta = vec![Delta::new(); order.len()];
    for (new_q, &v) in order.iter().enumerate() {
        for (l, ts) in &node_delta[v] {
            let mut mapped: Vec<usize> =
                ts.iter().filter(|&&t| live[t]).map(|&t| renum[t]).collect();
            if mapped.is_empty() {
                continue;
            }
            mapped.sort_unstable();
            mapped.dedup();
            new_delta[new_q].insert(l.clone(), mapped);
        }
    }
    SyncAutomaton {
        tapes,
        alphabet,
        initial: 0,
        accepting: order.iter().map(|&v| node_acc[v]).collect(),
        delta: new_delta,
    }
}
