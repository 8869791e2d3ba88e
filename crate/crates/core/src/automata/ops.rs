use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{all_labels, canonical, Alphabet, Delta, PaddedTuple, Sym, SyncAutomaton};
use crate::error::{Error, Result};

impl SyncAutomaton {
    /// Intersection of two automata with the same tape count and alphabet.
    pub fn product(&self, other: &SyncAutomaton) -> Result<SyncAutomaton> {
        if self.tapes != other.tapes {
            return Err(Error::TapeMismatch { expected: self.tapes, found: other.tapes });
        }
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs = vec![(self.initial, other.initial)];
        index.insert(pairs[0], 0);
        let mut delta: Vec<Delta> = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (p, q) = pairs[i];
            let mut row = Delta::new();
            for (label, ps) in &self.delta[p] {
                let Some(qs) = other.delta[q].get(label) else { continue };
                let mut targets = Vec::with_capacity(ps.len() * qs.len());
                for &a in ps {
                    for &b in qs {
                        let j = *index.entry((a, b)).or_insert_with(|| {
                            pairs.push((a, b));
                            pairs.len() - 1
                        });
                        targets.push(j);
                    }
                }
                row.insert(label.clone(), targets);
            }
            delta.push(row);
            i += 1;
        }
        let acc: Vec<bool> = pairs
            .iter()
            .map(|&(p, q)| self.accepting[p] && other.accepting[q])
            .collect();
        Ok(canonical(self.tapes, self.alphabet.clone(), 0, &acc, &delta))
    }

    /// Extends the automaton to `tapes` tapes, reading its own tapes at
    /// `positions` and leaving the others unconstrained.  Unconstrained tapes
    /// may run past the end of the constrained ones.
    pub fn cylindrify(&self, tapes: usize, positions: &[usize]) -> Result<SyncAutomaton> {
        if positions.len() != self.tapes {
            return Err(Error::InvalidTapes(format!(
                "{} positions given for a {}-tape automaton",
                positions.len(),
                self.tapes
            )));
        }
        check_positions(tapes, positions)?;
        let free: Vec<usize> = (0..tapes).filter(|t| !positions.contains(t)).collect();
        let syms: Vec<Sym> = self.alphabet.symbols_with_pad().collect();
        let mut assignments: Vec<Vec<Sym>> = vec![Vec::new()];
        for _ in 0..free.len() {
            assignments = assignments
                .into_iter()
                .flat_map(|a| {
                    syms.iter().map(move |&s| {
                        let mut a = a.clone();
                        a.push(s);
                        a
                    })
                })
                .collect();
        }
        let combine = |own: &[Sym], extra: &[Sym]| {
            let mut label = vec![Sym::PAD; tapes];
            for (&p, &s) in positions.iter().zip(own) {
                label[p] = s;
            }
            for (&f, &s) in free.iter().zip(extra) {
                label[f] = s;
            }
            PaddedTuple::new(label)
        };
        let n = self.num_states();
        let tail = n;
        let mut delta = vec![Delta::new(); n + 1];
        for q in 0..n {
            for (label, ts) in &self.delta[q] {
                for extra in &assignments {
                    delta[q].insert(combine(label, extra), ts.clone());
                }
            }
        }
        let own_pad = vec![Sym::PAD; self.tapes];
        for extra in assignments.iter().filter(|a| a.iter().any(|s| !s.is_pad())) {
            let label = combine(&own_pad, extra);
            for q in self.accepting_states() {
                delta[q].insert(label.clone(), vec![tail]);
            }
            delta[tail].insert(label, vec![tail]);
        }
        let mut acc = self.accepting.clone();
        acc.push(true);
        Ok(canonical(tapes, self.alphabet.clone(), self.initial, &acc, &delta))
    }

    /// Keeps the tapes listed in `keep`, in that order, and forgets the rest.
    pub fn project(&self, keep: &[usize]) -> Result<SyncAutomaton> {
        if keep.is_empty() {
            return Err(Error::InvalidTapes("projection onto no tapes".into()));
        }
        check_positions(self.tapes, keep)?;
        let n = self.num_states();
        let mut delta = vec![Delta::new(); n];
        let mut eps: Vec<Vec<usize>> = vec![Vec::new(); n];
        for q in 0..n {
            for (label, ts) in &self.delta[q] {
                let kept = PaddedTuple::new(keep.iter().map(|&i| label[i]).collect());
                if kept.is_all_pad() {
                    eps[q].extend(ts.iter().copied());
                } else {
                    let e = delta[q].entry(kept).or_default();
                    e.extend(ts.iter().copied());
                    e.sort_unstable();
                    e.dedup();
                }
            }
        }
        // Once every kept tape is padded only silent moves remain, so silent
        // moves only matter for acceptance.
        let mut acc = self.accepting.clone();
        let mut changed = true;
        while changed {
            changed = false;
            for q in 0..n {
                if !acc[q] && eps[q].iter().any(|&t| acc[t]) {
                    acc[q] = true;
                    changed = true;
                }
            }
        }
        Ok(canonical(keep.len(), self.alphabet.clone(), self.initial, &acc, &delta))
    }

    /// Reorders tapes: tape `i` of the result is tape `perm[i]` of `self`.
    pub fn permute_tapes(&self, perm: &[usize]) -> Result<SyncAutomaton> {
        if perm.len() != self.tapes {
            return Err(Error::InvalidTapes("permutation length differs from tape count".into()));
        }
        check_positions(self.tapes, perm)?;
        let delta: Vec<Delta> = self
            .delta
            .iter()
            .map(|d| {
                d.iter()
                    .map(|(l, ts)| (PaddedTuple::new(perm.iter().map(|&i| l[i]).collect()), ts.clone()))
                    .collect()
            })
            .collect();
        Ok(canonical(self.tapes, self.alphabet.clone(), self.initial, &self.accepting, &delta))
    }

    /// Two-tape automaton accepting `(w, w)` for each accepted `w`.
    pub fn diagonal(&self) -> Result<SyncAutomaton> {
        if self.tapes != 1 {
            return Err(Error::TapeMismatch { expected: 1, found: self.tapes });
        }
        let delta: Vec<Delta> = self
            .delta
            .iter()
            .map(|d| {
                d.iter()
                    .map(|(l, ts)| (PaddedTuple::new(vec![l[0], l[0]]), ts.clone()))
                    .collect()
            })
            .collect();
        Ok(canonical(2, self.alphabet.clone(), self.initial, &self.accepting, &delta))
    }

    /// Replaces every letter by a block of `block` letters of `alphabet`;
    /// padding becomes a block of padding.  All images must be distinct
    /// words of length exactly `block`.
    pub fn substitute_uniform(
        &self,
        alphabet: Arc<Alphabet>,
        images: &[Vec<Sym>],
        block: usize,
    ) -> Result<SyncAutomaton> {
        if images.len() != self.alphabet.len() {
            return Err(Error::InvalidParameter("one image per letter is required".into()));
        }
        if block == 0 || images.iter().any(|w| w.len() != block || w.iter().any(|s| s.is_pad())) {
            return Err(Error::InvalidParameter(format!(
                "letter images must all have length {block}"
            )));
        }
        let n = self.num_states();
        let mut delta = vec![Delta::new(); n];
        for q in 0..n {
            for (label, ts) in &self.delta[q] {
                for &t in ts {
                    let mut cur = q;
                    for j in 0..block {
                        let col = PaddedTuple::new(
                            label
                                .iter()
                                .map(|s| s.index().map_or(Sym::PAD, |i| images[i][j]))
                                .collect(),
                        );
                        let next = if j + 1 == block {
                            t
                        } else {
                            delta.push(Delta::new());
                            delta.len() - 1
                        };
                        delta[cur].entry(col).or_default().push(next);
                        cur = next;
                    }
                }
            }
        }
        let mut acc = self.accepting.clone();
        acc.resize(delta.len(), false);
        Ok(canonical(self.tapes, alphabet, self.initial, &acc, &delta))
    }

    /// Shortest label sequence leading from `q` to an accepting state,
    /// breaking ties by label order.
    pub fn shortest_completion(&self, q: usize) -> Option<Vec<PaddedTuple>> {
        let n = self.num_states();
        let mut parent: Vec<Option<(usize, &PaddedTuple)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[q] = true;
        let mut queue = VecDeque::from([q]);
        while let Some(p) = queue.pop_front() {
            if self.accepting[p] {
                let mut path = Vec::new();
                let mut cur = p;
                while let Some((prev, label)) = parent[cur] {
                    path.push(label.clone());
                    cur = prev;
                }
                path.reverse();
                return Some(path);
            }
            for (label, ts) in &self.delta[p] {
                for &t in ts {
                    if !seen[t] {
                        seen[t] = true;
                        parent[t] = Some((p, label));
                        queue.push_back(t);
                    }
                }
            }
        }
        None
    }

    /// Labels present in the automaton, in order.
    pub fn used_labels(&self) -> Vec<PaddedTuple> {
        let mut all: Vec<PaddedTuple> = self.delta.iter().flat_map(|d| d.keys().cloned()).collect();
        all.sort();
        all.dedup();
        all
    }

    /// Every column over this automaton's tapes and alphabet.
    pub fn all_labels(&self) -> Vec<PaddedTuple> {
        all_labels(self.tapes, &self.alphabet)
    }
}

fn check_positions(tapes: usize, positions: &[usize]) -> Result<()> {
    let mut seen = vec![false; tapes];
    for &p in positions {
        if p >= tapes {
            return Err(Error::InvalidTapes(format!("tape {p} out of range for {tapes} tapes")));
        }
        if seen[p] {
            return Err(Error::InvalidTapes(format!("tape {p} listed twice")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Two-tape automaton for the relation `ψ(v) = ψ(u)·w`, built from the
/// single-generator multipliers by chaining them through intermediate tapes
/// and projecting the intermediates away.  The empty word yields the
/// diagonal of the language.
pub fn compose_word_multiplier(
    multipliers: &BTreeMap<usize, SyncAutomaton>,
    word: &[usize],
    name: impl Fn(usize) -> String,
) -> Result<SyncAutomaton> {
    if word.is_empty() {
        let any = multipliers
            .values()
            .next()
            .ok_or_else(|| Error::MissingMultiplier("<any>".into()))?;
        return any.project(&[0])?.diagonal();
    }
    let get = |g: usize| multipliers.get(&g).ok_or_else(|| Error::MissingMultiplier(name(g)));
    if word.len() == 1 {
        return Ok(get(word[0])?.clone());
    }
    let tapes = word.len() + 1;
    let mut acc: Option<SyncAutomaton> = None;
    for (i, &g) in word.iter().enumerate() {
        let cyl = get(g)?.cylindrify(tapes, &[i, i + 1])?;
        acc = Some(match acc {
            None => cyl,
            Some(a) => a.product(&cyl)?,
        });
    }
    acc.unwrap().project(&[0, word.len()])
}

/// State-count constants of a structure: `m` bounds the state count of every
/// multiplier and is even; `e` is the length of the identity's representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateBoundConstants {
    pub m: u64,
    pub e: u64,
}

pub fn state_bound_constants<'a>(
    multipliers: impl IntoIterator<Item = &'a SyncAutomaton>,
    identity_len: usize,
) -> StateBoundConstants {
    let max = multipliers.into_iter().map(|a| a.num_states() as u64).max().unwrap_or(0);
    let m = max.max(2);
    StateBoundConstants { m: m + (m % 2), e: identity_len as u64 }
}

#[cfg(test)]
mod tests {
    use super::super::Convolution;
    use super::*;

    fn ab() -> Arc<Alphabet> {
        Arc::new(Alphabet::new(["a", "b"]).unwrap())
    }

    /// Pairs (u, v) with |v| = |u| + 1, over {a, b}.
    fn longer_by_one() -> SyncAutomaton {
        SyncAutomaton::from_fn(
            2,
            ab(),
            0u8,
            |&s, col| match (s, col[0].is_pad(), col[1].is_pad()) {
                (0, false, false) => Some(0),
                (0, true, false) => Some(1),
                _ => None,
            },
            |&s| s == 1,
        )
    }

    fn conv(words: &[&str]) -> Convolution {
        let a = ab();
        Convolution(words.iter().map(|w| a.parse_word(w).unwrap()).collect())
    }

    #[test]
    fn product_intersects() {
        let m = longer_by_one();
        let starts_with_a = SyncAutomaton::from_fn(
            2,
            ab(),
            0u8,
            |&s, col| match s {
                0 if col[1] == Sym::letter(0) => Some(1),
                1 => Some(1),
                _ => None,
            },
            |&s| s == 1,
        );
        let p = m.product(&starts_with_a).unwrap();
        assert!(p.accepts(&conv(&["b", "ab"])).unwrap());
        assert!(!p.accepts(&conv(&["b", "bb"])).unwrap());
        assert!(!p.accepts(&conv(&["b", "abb"])).unwrap());
    }

    #[test]
    fn cylindrify_then_project_recovers_language() {
        let m = longer_by_one();
        let c = m.cylindrify(3, &[0, 2]).unwrap();
        assert!(c.accepts(&conv(&["a", "bbbb", "ab"])).unwrap());
        assert!(c.accepts(&conv(&["a", "", "ab"])).unwrap());
        assert!(!c.accepts(&conv(&["a", "", "abb"])).unwrap());
        let back = c.project(&[0, 2]).unwrap();
        let lhs: Vec<_> = back.enumerate(3).collect();
        let rhs: Vec<_> = m.enumerate(3).collect();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn composing_adds_lengths() {
        let m = longer_by_one();
        let map = BTreeMap::from([(0usize, m)]);
        let two = compose_word_multiplier(&map, &[0, 0], |g| g.to_string()).unwrap();
        assert!(two.accepts(&conv(&["a", "abb"])).unwrap());
        assert!(!two.accepts(&conv(&["a", "ab"])).unwrap());
        let zero = compose_word_multiplier(&map, &[], |g| g.to_string()).unwrap();
        assert!(zero.accepts(&conv(&["ab", "ab"])).unwrap());
        assert!(!zero.accepts(&conv(&["ab", "ba"])).unwrap());
    }

    #[test]
    fn shortest_completion_breaks_ties_by_label() {
        let m = longer_by_one();
        let path = m.shortest_completion(m.initial()).unwrap();
        assert_eq!(path.len(), 1);
        assert_eq!(&path[0][..], &[Sym::PAD, Sym::letter(0)]);
    }

    #[test]
    fn substitution_doubles_lengths() {
        let m = longer_by_one();
        let images = vec![
            vec![Sym::letter(0), Sym::letter(0)],
            vec![Sym::letter(0), Sym::letter(1)],
        ];
        let s = m.substitute_uniform(ab(), &images, 2).unwrap();
        assert!(s.accepts(&conv(&["ab", "aaab"])).unwrap());
        assert!(!s.accepts(&conv(&["ab", "aab"])).unwrap());
    }
}
