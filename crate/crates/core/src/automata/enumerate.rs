use std::collections::BTreeMap;

use super::{Convolution, PaddedTuple, SyncAutomaton};

struct Frame {
    choices: Vec<(PaddedTuple, Vec<usize>)>,
    next: usize,
}

/// Accepted convolutions of padded length at most `max_len`, in
/// length-lexicographic order of their column sequences.
///
/// Every accepted convolution is produced exactly once, even when the
/// automaton is nondeterministic.
pub struct Enumeration<'a> {
    automaton: &'a SyncAutomaton,
    max_len: usize,
    /// `finish[d][q]`: an accepting state is reachable from `q` in exactly `d` steps.
    finish: Vec<Vec<bool>>,
    target: usize,
    started: bool,
    stack: Vec<Frame>,
    path: Vec<PaddedTuple>,
}

impl<'a> Enumeration<'a> {
    fn new(automaton: &'a SyncAutomaton, max_len: usize) -> Self {
        let n = automaton.num_states();
        let mut finish = Vec::with_capacity(max_len + 1);
        finish.push(automaton.accepting.clone());
        for d in 1..=max_len {
            let prev: &Vec<bool> = &finish[d - 1];
            let row = (0..n)
                .map(|q| automaton.delta[q].values().flatten().any(|&t| prev[t]))
                .collect();
            finish.push(row);
        }
        Enumeration {
            automaton,
            max_len,
            finish,
            target: 0,
            started: false,
            stack: Vec::new(),
            path: Vec::new(),
        }
    }

    fn viable(&self, set: &[usize], remaining: usize) -> bool {
        set.iter().any(|&q| self.finish[remaining][q])
    }

    fn frame(&self, set: &[usize]) -> Frame {
        let mut merged: BTreeMap<&PaddedTuple, Vec<usize>> = BTreeMap::new();
        for &q in set {
            for (l, ts) in &self.automaton.delta[q] {
                merged.entry(l).or_default().extend(ts.iter().copied());
            }
        }
        let choices = merged
            .into_iter()
            .map(|(l, mut ts)| {
                ts.sort_unstable();
                ts.dedup();
                (l.clone(), ts)
            })
            .collect();
        Frame { choices, next: 0 }
    }

    fn emit(&self, last: &PaddedTuple) -> Convolution {
        let mut cols = self.path.clone();
        cols.push(last.clone());
        Convolution::from_columns(self.automaton.tapes, &cols)
    }
}

impl Iterator for Enumeration<'_> {
    type Item = Convolution;

    fn next(&mut self) -> Option<Convolution> {
        loop {
            if self.stack.is_empty() {
                if self.started {
                    self.target += 1;
                }
                self.started = true;
                if self.target > self.max_len {
                    return None;
                }
                let root = [self.automaton.initial];
                if self.target == 0 {
                    if self.automaton.accepting[self.automaton.initial] {
                        return Some(Convolution(vec![Vec::new(); self.automaton.tapes]));
                    }
                    continue;
                }
                if self.viable(&root, self.target) {
                    let f = self.frame(&root);
                    self.stack.push(f);
                    self.path.clear();
                }
                continue;
            }
            let depth = self.stack.len();
            let top = self.stack.last_mut().unwrap();
            if top.next == top.choices.len() {
                self.stack.pop();
                self.path.pop();
                continue;
            }
            let (label, targets) = top.choices[top.next].clone();
            top.next += 1;
            let remaining = self.target - depth;
            if !self.viable(&targets, remaining) {
                continue;
            }
            if remaining == 0 {
                return Some(self.emit(&label));
            }
            let f = self.frame(&targets);
            self.path.push(label);
            self.stack.push(f);
        }
    }
}

impl SyncAutomaton {
    /// Enumerates accepted convolutions of padded length at most `max_len`.
    pub fn enumerate(&self, max_len: usize) -> Enumeration<'_> {
        Enumeration::new(self, max_len)
    }

    /// Number of accepted convolutions of each padded length up to `max_len`,
    /// counted without materialising them. Counts saturate at `u128::MAX`.
    pub fn count_by_length(&self, max_len: usize) -> Vec<u128> {
        // Counting label sequences is exact only for deterministic automata;
        // fall back to enumeration otherwise.
        let deterministic = self.delta.iter().all(|d| d.values().all(|ts| ts.len() == 1));
        if !deterministic {
            let mut counts = vec![0u128; max_len + 1];
            for c in self.enumerate(max_len) {
                counts[c.len()] += 1;
            }
            return counts;
        }
        let n = self.num_states();
        let mut cur = vec![0u128; n];
        cur[self.initial] = 1;
        let mut counts = Vec::with_capacity(max_len + 1);
        for len in 0..=max_len {
            counts.push((0..n).filter(|&q| self.accepting[q]).fold(0u128, |acc, q| acc.saturating_add(cur[q])));
            if len == max_len {
                break;
            }
            let mut next = vec![0u128; n];
            for q in 0..n {
                if cur[q] == 0 {
                    continue;
                }
                for ts in self.delta[q].values() {
                    next[ts[0]] = next[ts[0]].saturating_add(cur[q]);
                }
            }
            cur = next;
        }
        counts
    }
}
