use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use cadist_core::automata::{Alphabet, Convolution, Sym, SyncAutomaton};
use cadist_core::structures::{build_structure, catalog};
use proptest::prelude::*;

fn ab() -> Arc<Alphabet> {
    Arc::new(Alphabet::new(["a", "b"]).unwrap())
}

/// Every column over `tapes` tapes with letters `a`, `b` and padding.
fn columns(tapes: usize) -> Vec<Vec<Sym>> {
    let syms = [Sym::letter(0), Sym::letter(1), Sym::PAD];
    let mut out: Vec<Vec<Sym>> = vec![vec![]];
    for _ in 0..tapes {
        out = out
            .into_iter()
            .flat_map(|c| syms.iter().map(move |&s| [c.clone(), vec![s]].concat()))
            .collect();
    }
    out.retain(|c| !c.iter().all(|s| s.is_pad()));
    out
}

/// A deterministic automaton given by a table over `columns(tapes)`.
#[derive(Clone, Debug)]
struct Table {
    tapes: usize,
    next: Vec<Vec<Option<usize>>>,
    accepting: Vec<bool>,
}

impl Table {
    fn run(&self, conv: &Convolution) -> bool {
        let cols = columns(self.tapes);
        let mut q = 0;
        for c in conv.columns() {
            let i = cols.iter().position(|x| x[..] == c[..]).unwrap();
            match self.next[q][i] {
                Some(t) => q = t,
                None => return false,
            }
        }
        self.accepting[q]
    }

    fn build(&self) -> SyncAutomaton {
        let cols = columns(self.tapes);
        let t = self.clone();
        SyncAutomaton::from_fn(
            self.tapes,
            ab(),
            0usize,
            move |&q, col| {
                let i = cols.iter().position(|x| x[..] == *col).unwrap();
                t.next[q][i]
            },
            |&q| self.accepting[q],
        )
    }
}

fn table(tapes: usize) -> impl Strategy<Value = Table> {
    let width = columns(tapes).len();
    (1usize..=3).prop_flat_map(move |states| {
        (
            prop::collection::vec(prop::collection::vec(prop::option::weighted(0.7, 0..states), width), states),
            prop::collection::vec(any::<bool>(), states),
        )
            .prop_map(move |(next, accepting)| Table { tapes, next, accepting })
    })
}

fn words(max_len: usize) -> Vec<Vec<Sym>> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Vec<Sym>> = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| (0..2).map(move |i| [w.clone(), vec![Sym::letter(i)]].concat()))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// All convolutions with `tapes` tapes and padded length at most `max_len`.
fn universe(tapes: usize, max_len: usize) -> Vec<Convolution> {
    let ws = words(max_len);
    let mut out: Vec<Vec<Vec<Sym>>> = vec![vec![]];
    for _ in 0..tapes {
        out = out
            .into_iter()
            .flat_map(|c| ws.iter().map(move |w| [c.clone(), vec![w.clone()]].concat()))
            .collect();
    }
    out.into_iter().map(Convolution).collect()
}

fn language(a: &SyncAutomaton, max_len: usize) -> BTreeSet<Convolution> {
    a.enumerate(max_len).collect()
}

fn is_length_lex(items: &[Convolution]) -> bool {
    items.windows(2).all(|p| (p[0].len(), p[0].columns()) < (p[1].len(), p[1].columns()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn enumeration_matches_simulation(t in table(2)) {
        let a = t.build();
        let listed: Vec<Convolution> = a.enumerate(4).collect();
        prop_assert!(is_length_lex(&listed));
        let expected: BTreeSet<Convolution> = universe(2, 4).into_iter().filter(|c| t.run(c)).collect();
        prop_assert_eq!(listed.into_iter().collect::<BTreeSet<_>>(), expected);
    }

    #[test]
    fn product_is_intersection(s in table(2), t in table(2)) {
        let p = s.build().product(&t.build()).unwrap();
        let expected: BTreeSet<Convolution> =
            universe(2, 4).into_iter().filter(|c| s.run(c) && t.run(c)).collect();
        prop_assert_eq!(language(&p, 4), expected);
        // One node per state pair and set of padded tapes.
        prop_assert!(p.num_states() <= s.next.len() * t.next.len() * 4);
    }

    #[test]
    fn product_with_one_tape_languages(s in table(1), t in table(1)) {
        let p = s.build().product(&t.build()).unwrap();
        let lhs = language(&p, 6);
        let rhs: BTreeSet<Convolution> = language(&s.build(), 6)
            .intersection(&language(&t.build(), 6))
            .cloned()
            .collect();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn cylindrify_adds_free_tapes(t in table(2)) {
        let c = t.build().cylindrify(3, &[0, 2]).unwrap();
        for conv in universe(3, 3) {
            let restricted = Convolution(vec![conv.0[0].clone(), conv.0[2].clone()]);
            prop_assert_eq!(c.accepts(&conv).unwrap(), t.run(&restricted), "{:?}", conv);
        }
        let back = c.project(&[0, 2]).unwrap();
        prop_assert_eq!(language(&back, 4), language(&t.build(), 4));
    }

    #[test]
    fn projection_is_existential(t in table(2)) {
        let a = t.build();
        let p = a.project(&[0]).unwrap();
        // An accepted extension exists iff one exists within |u| + states letters.
        let vs = words(3 + t.next.len() + 1);
        for u in words(3) {
            let exists = vs.iter().any(|v| t.run(&Convolution(vec![u.clone(), v.clone()])));
            prop_assert_eq!(p.accepts(&Convolution(vec![u.clone()])).unwrap(), exists);
        }
    }

    #[test]
    fn shortest_completion_is_bfs_distance(t in table(2)) {
        let a = t.build();
        prop_assume!(!a.is_empty_language());
        for q in 0..a.num_states() {
            let path = a.shortest_completion(q).expect("trimmed automata are co-accessible");
            prop_assert_eq!(path.len(), bfs_to_accepting(&a, q));
            prop_assert!(path.len() <= a.num_states());
        }
    }
}

fn bfs_to_accepting(a: &SyncAutomaton, q: usize) -> usize {
    let mut dist = vec![usize::MAX; a.num_states()];
    dist[q] = 0;
    let mut queue = VecDeque::from([q]);
    while let Some(p) = queue.pop_front() {
        if a.is_accepting(p) {
            return dist[p];
        }
        for (from, _, to) in a.edges() {
            if from == p && dist[to] == usize::MAX {
                dist[to] = dist[p] + 1;
                queue.push_back(to);
            }
        }
    }
    usize::MAX
}

#[test]
fn empty_language_stays_empty() {
    let e = SyncAutomaton::empty(2, ab());
    assert_eq!(e.enumerate(5).count(), 0);
    assert!(e.cylindrify(3, &[0, 1]).unwrap().is_empty_language());
    assert!(e.project(&[1]).unwrap().is_empty_language());
}

#[test]
fn equal_length_and_first_letter() {
    let equal_len = SyncAutomaton::from_fn(2, ab(), (), |_, c| (!c[0].is_pad() && !c[1].is_pad()).then_some(()), |_| true);
    let first_equal = SyncAutomaton::from_fn(
        2,
        ab(),
        0u8,
        |&s, c| match s {
            0 => (c[0] == c[1]).then_some(1),
            _ => Some(1),
        },
        |&s| s == 1,
    );
    let p = equal_len.product(&first_equal).unwrap();
    for conv in universe(2, 4) {
        let (u, v) = (&conv.0[0], &conv.0[1]);
        let expected = u.len() == v.len() && !u.is_empty() && u[0] == v[0];
        assert_eq!(p.accepts(&conv).unwrap(), expected, "{conv:?}");
    }
}

/// Reachable `(state, padded tapes)` pairs never read a letter on a padded tape.
fn padding_closed(a: &SyncAutomaton) -> bool {
    let mut seen = BTreeSet::from([(a.initial(), 0u64)]);
    let mut queue = VecDeque::from([(a.initial(), 0u64)]);
    while let Some((q, mask)) = queue.pop_front() {
        for (label, targets) in a.transitions(q) {
            let mut next = mask;
            for (i, s) in label.iter().enumerate() {
                if s.is_pad() {
                    next |= 1 << i;
                } else if mask & (1 << i) != 0 {
                    return false;
                }
            }
            for &t in targets {
                if seen.insert((t, next)) {
                    queue.push_back((t, next));
                }
            }
        }
    }
    true
}

#[test]
fn catalog_automata_are_padding_closed_and_round_trip() {
    for entry in catalog() {
        let s = (entry.build)().unwrap();
        let mut all = vec![&s.language];
        all.extend(s.multipliers.values());
        for a in all {
            assert!(padding_closed(a), "{}", entry.name);
            let back = SyncAutomaton::from_json_str(&a.to_json_string()).unwrap();
            assert_eq!(&back, a, "{}", entry.name);
        }
    }
}

#[test]
fn catalog_completions_are_bounded_by_state_count() {
    for entry in catalog() {
        let s = (entry.build)().unwrap();
        let k = s.constants().unwrap();
        let max_states = s.multipliers.values().map(|m| m.num_states() as u64).max().unwrap();
        let even = max_states.max(2).next_multiple_of(2);
        assert_eq!(k.m, even, "{}", entry.name);
        for m in s.multipliers.values() {
            for q in 0..m.num_states() {
                let path = m.shortest_completion(q).unwrap();
                assert_eq!(path.len(), bfs_to_accepting(m, q));
                assert!(path.len() as u64 <= k.m);
            }
        }
    }
}

fn format_all(s: &cadist_core::structures::CayleyAutomaticStructure, max_len: usize) -> Vec<String> {
    s.language.enumerate(max_len).map(|c| s.format_word(&c.0[0])).collect()
}

#[test]
fn language_listings() {
    let unary = build_structure("Z-unary").unwrap();
    assert_eq!(format_all(&unary, 3), ["ε", "t", "T", "tt", "TT", "ttt", "TTT"]);
    let zigzag = build_structure("Z-zigzag-binary").unwrap();
    assert_eq!(format_all(&zigzag, 2), ["ε", "1", "01", "11"]);
}

fn pair(s: &cadist_core::structures::CayleyAutomaticStructure, u: &str, v: &str) -> Convolution {
    Convolution(vec![s.parse_word(u).unwrap(), s.parse_word(v).unwrap()])
}

#[test]
fn unary_multipliers() {
    let s = build_structure("Z-unary").unwrap();
    let t = s.generators.lookup("t").unwrap();
    assert!(s.multiplier(t).unwrap().accepts(&pair(&s, "tt", "ttt")).unwrap());
    let tt = s.word_multiplier(&[t, t]).unwrap();
    for k in 0..=6 {
        let u = "t".repeat(k);
        assert!(tt.accepts(&pair(&s, &u, &"t".repeat(k + 2))).unwrap(), "k = {k}");
        assert!(!tt.accepts(&pair(&s, &u, &"t".repeat(k + 1))).unwrap(), "k = {k}");
    }
}

#[test]
fn zigzag_inverse_pair_is_the_diagonal() {
    let s = build_structure("Z-zigzag-binary-base").unwrap();
    let t = s.generators.lookup("t").unwrap();
    let inv = s.generators.lookup("T").unwrap();
    let diag: BTreeSet<Convolution> = s
        .language
        .enumerate(6)
        .map(|c| Convolution(vec![c.0[0].clone(), c.0[0].clone()]))
        .collect();
    assert_eq!(language(&s.word_multiplier(&[t, inv]).unwrap(), 6), diag);
    assert_eq!(language(&s.word_multiplier(&[]).unwrap(), 6), diag);
}

#[test]
fn binary_increment_reads_lsb_first() {
    let s = build_structure("Z-zigzag-binary-base").unwrap();
    let t = s.generators.lookup("t").unwrap();
    // Zigzag index 1 is -1 and index 2 is 1, so t maps "1" to "ε" and "ε" to "01".
    let m = s.multiplier(t).unwrap();
    assert!(m.accepts(&pair(&s, "", "01")).unwrap());
    assert!(m.accepts(&pair(&s, "1", "")).unwrap());
    assert!(!m.accepts(&pair(&s, "1", "01")).unwrap());
}

/// Pairs related by the chain semantics: `z_0 = u`, `(z_i, z_{i+1})` accepted
/// by the multiplier of `w_i`, intermediate words drawn from `L` up to
/// `bound` letters.
fn chain_related(
    s: &cadist_core::structures::CayleyAutomaticStructure,
    w: &[usize],
    max_len: usize,
    bound: usize,
) -> BTreeSet<Convolution> {
    let ls: Vec<Vec<Sym>> = s.language.enumerate(bound).map(|c| c.0[0].clone()).collect();
    let mut out = BTreeSet::new();
    for u in ls.iter().filter(|u| u.len() <= max_len) {
        let mut layer: BTreeSet<Vec<Sym>> = BTreeSet::from([u.clone()]);
        for &g in w {
            let m = s.multiplier(g).unwrap();
            layer = ls
                .iter()
                .filter(|z2| layer.iter().any(|z| m.accepts(&Convolution(vec![z.clone(), (*z2).clone()])).unwrap()))
                .cloned()
                .collect();
        }
        for v in layer.into_iter().filter(|v| v.len() <= max_len) {
            out.insert(Convolution(vec![u.clone(), v]));
        }
    }
    out
}

#[test]
fn composition_matches_chain_semantics() {
    let s = build_structure("Z-zigzag-binary-base").unwrap();
    let t = s.generators.lookup("t").unwrap();
    let inv = s.generators.lookup("T").unwrap();
    for w in [vec![t], vec![t, t], vec![inv, t, t], vec![inv, inv, inv], vec![t, inv]] {
        let composed = s.word_multiplier(&w).unwrap();
        assert_eq!(language(&composed, 5), chain_related(&s, &w, 5, 8), "{w:?}");
    }
}

#[test]
fn loader_reports_positions() {
    let bad = r#"{"tapes": 2, "alphabet": ["a"], "states": 1, "initial": 0, "accepting": [0],
        "transitions": [{"from": 0, "label": ["a"], "to": [0]}]}"#;
    let err = SyncAutomaton::from_json_str(bad).unwrap_err().to_string();
    assert!(err.contains("transitions[0]"), "{err}");
}
