use std::collections::HashSet;

use cadist_core::filling::*;
use cadist_core::group::{dense_witness_loops, GeneratorSet, GroupElement, GroupModel, Word};
use cadist_core::profile::{compute_h, ProfileOptions};
use cadist_core::structures::build_structure;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Free reduction written against inverse pairs directly.
fn reduce(inverse: &dyn Fn(usize) -> usize, w: &[usize]) -> Vec<usize> {
    let mut changed = true;
    let mut cur = w.to_vec();
    while changed {
        changed = false;
        for i in 0..cur.len().saturating_sub(1) {
            if inverse(cur[i]) == cur[i + 1] {
                cur.drain(i..i + 2);
                changed = true;
                break;
            }
        }
    }
    cur
}

fn assert_certificate(name: &str, loop_text: &str) {
    let s = build_structure(name).unwrap();
    let gens = &s.generators;
    let w = gens.parse_word(loop_text).unwrap();
    let cert = corridor_fill(&s, &w).unwrap();
    let inv = |i: usize| gens.inverse_of(i);
    assert_eq!(reduce(&inv, &cert.product(gens)), reduce(&inv, &w));
    let check = check_certificate(&s, &cert, None).unwrap();
    assert!(check.passed(), "{check:?}");
}

#[test]
fn trivial_and_backtracking_loops() {
    for name in ["Z-unary", "Z-zigzag-binary", "Z2", "LL2"] {
        assert_certificate(name, "");
    }
    assert_certificate("Z-unary", "tT");
    assert_certificate("Z2", "xX");
    assert_certificate("LL2", "aa");
}

#[test]
fn z2_commutator_fills() {
    assert_certificate("Z2", "xyXY");
    assert_certificate("Z2", "xxyXXY");
}

#[test]
fn unary_loops_fill_with_exact_profile() {
    let s = build_structure("Z-unary").unwrap();
    let w = s.generators.parse_word("ttTT").unwrap();
    let cert = corridor_fill(&s, &w).unwrap();
    let arg = cert.constants.h_argument(4) as usize;
    let p = compute_h(&s, arg, &ProfileOptions::default()).unwrap();
    let check = check_certificate(&s, &cert, Some(&p)).unwrap();
    assert!(check.h_exact);
    assert!(check.passed(), "{check:?}");
}

#[test]
fn lamplighter_dense_loops_fill() {
    let s = build_structure("LL2").unwrap();
    for w in dense_witness_loops(&s.generators, 2).unwrap() {
        let cert = corridor_fill(&s, &w).unwrap();
        let check = check_certificate(&s, &cert, None).unwrap();
        assert!(check.passed(), "{check:?}");
        assert!(cell_count_bound_check(&cert));
    }
}

#[test]
fn random_z2_loops_fill() {
    let s = build_structure("Z2").unwrap();
    let base = GroupModel::Abelian(2).standard_generators();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let w = random_loop(&base, 12, &mut rng).unwrap();
        let mapped = Word(w.iter().map(|&g| s.generators.lookup(base.name(g)).unwrap()).collect());
        let cert = corridor_fill(&s, &mapped).unwrap();
        let check = check_certificate(&s, &cert, None).unwrap();
        assert!(check.passed(), "{check:?}");
    }
}

#[test]
fn non_loop_is_rejected() {
    let s = build_structure("Z2").unwrap();
    let w = s.generators.parse_word("xy").unwrap();
    assert!(matches!(corridor_fill(&s, &w), Err(cadist_core::Error::NotALoop(_))));
}

/// Sum of absolute winding numbers of a closed walk in Z^2 around unit
/// cells; each relator insertion changes it by at most one.
fn winding_mass(gens: &GeneratorSet, w: &[usize]) -> u32 {
    // Horizontal edges as (column, height, direction).
    let mut edges: Vec<(i64, i64, i64)> = Vec::new();
    let (mut x, mut y) = (0i64, 0i64);
    for &g in w {
        let GroupElement::Abelian(v) = gens.value(g) else { unreachable!() };
        if v[0] != 0 {
            edges.push((x.min(x + v[0]), y, v[0]));
        }
        x += v[0];
        y += v[1];
    }
    edges.sort_unstable();
    let mut mass = 0i64;
    for col in edges.chunk_by(|a, b| a.0 == b.0) {
        // Walking down from above the column, the winding of the cells
        // below each edge changes by its direction.
        let mut winding = 0i64;
        for pair in col.windows(2).rev() {
            winding += pair[1].2;
            mass += winding.abs() * (pair[1].1 - pair[0].1);
        }
    }
    mass as u32
}

/// Whether the empty word is reachable within `budget` moves, by
/// breadth-first search over every insertion of a cyclic conjugate of a
/// relator or its inverse, keeping only words whose winding mass fits the
/// remaining budget.
fn reachable_within(p: &Presentation, w: &[usize], budget: u32) -> bool {
    let gens = &p.generators;
    let moves = p.insertions();
    let mut level: HashSet<Vec<usize>> = HashSet::from([gens.free_reduce(w).0]);
    for k in 0..=budget {
        if level.contains(&Vec::new()) {
            return true;
        }
        let left = budget - k;
        let mut next = HashSet::new();
        for u in &level {
            for pos in 0..=u.len() {
                for m in &moves {
                    let mut c = u[..pos].to_vec();
                    c.extend_from_slice(m);
                    c.extend_from_slice(&u[pos..]);
                    let c = gens.free_reduce(&c).0;
                    if left >= 1 && winding_mass(gens, &c) < left {
                        next.insert(c);
                    }
                }
            }
        }
        level = next;
    }
    false
}

fn backward_bfs_area(p: &Presentation, w: &[usize], max_area: u32) -> Option<u32> {
    (0..=max_area).find(|&b| reachable_within(p, w, b))
}

#[test]
fn area_matches_backward_search_up_to_length_eight() {
    let p = Presentation::standard(GroupModel::Abelian(2)).unwrap();
    let gens = &p.generators;
    let mut targets = HashSet::new();
    for len in 0..=8usize {
        for code in 0..4usize.pow(len as u32) {
            let w: Vec<usize> = (0..len).map(|i| (code / 4usize.pow(i as u32)) % 4).collect();
            if gens.evaluate(&w) == gens.model().identity() {
                targets.insert(gens.free_reduce(&w).0);
            }
        }
    }
    let mut targets: Vec<Vec<usize>> = targets.into_iter().collect();
    targets.sort();
    for w in targets {
        let expected = backward_bfs_area(&p, &w, 4);
        let got = area(&p, &Word(w.clone()), 4, 10_000_000);
        match (expected, got) {
            (Some(e), Ok(r)) => {
                assert_eq!(r.area, e, "{}", gens.format_word(&w));
                assert!(replay_area(&p, &r));
            }
            (None, Err(cadist_core::Error::AreaExceedsMax(_))) => {}
            (e, g) => panic!("{}: search {e:?}, oracle {g:?}", gens.format_word(&w)),
        }
    }
}

#[test]
fn dehn_check_on_z2() {
    let s = build_structure("Z2").unwrap();
    let p = Presentation::standard(GroupModel::Abelian(2)).unwrap();
    for n in [4, 6, 8] {
        let r = dehn_inequality_check(&s, &p, n, &DehnOptions::default()).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}

#[test]
fn dehn_check_flags_broken_certificate() {
    let s = build_structure("Z2").unwrap();
    let p = Presentation::standard(GroupModel::Abelian(2)).unwrap();
    let w = s.generators.parse_word("xyXY").unwrap();
    let mut cert = corridor_fill(&s, &w).unwrap();
    let x = s.generators.lookup("x").unwrap();
    cert.cells[0].boundary.0.push(x);
    let r = dehn_check_certificate(&s, &p, &cert, &DehnOptions::default()).unwrap();
    assert!(!r.passed);
    let empty = corridor_fill(&s, &Word::empty()).unwrap();
    let r = dehn_check_certificate(&s, &p, &empty, &DehnOptions::default()).unwrap();
    assert!(r.passed);
    assert_eq!(r.margin, 0);
}

#[test]
fn relators_have_area_one() {
    for model in [GroupModel::Abelian(3), GroupModel::Heisenberg, GroupModel::BaumslagSolitar] {
        let p = Presentation::standard(model).unwrap();
        for r in &p.relators {
            let res = area(&p, r, 3, 100_000).unwrap();
            assert_eq!(res.area, 1);
            assert!(replay_area(&p, &res));
        }
    }
    assert!(Presentation::standard(GroupModel::Lamplighter).is_err());
}

#[test]
fn tampered_area_certificates_fail_replay() {
    let p = Presentation::standard(GroupModel::Abelian(2)).unwrap();
    let w = p.generators.parse_word("xxyXXY").unwrap();
    let mut r = area(&p, &w, 4, 100_000).unwrap();
    r.steps.pop();
    assert!(!replay_area(&p, &r));
}

#[test]
fn presentation_files() {
    let p = Presentation::from_json_str(r#"{"model": "Z2", "relators": ["x y X Y"]}"#).unwrap();
    assert_eq!(p, Presentation::standard(GroupModel::Abelian(2)).unwrap());
    assert!(Presentation::from_json_str(r#"{"model": "Z2", "relators": ["x y"]}"#).is_err());
    assert!(Presentation::from_json_str(r#"{"model": "Z2", "relators": [], "x": 1}"#).is_err());
}

#[test]
fn dehn_samples_are_reproducible() {
    let s = build_structure("Z2").unwrap();
    let p = Presentation::standard(GroupModel::Abelian(2)).unwrap();
    let options = DehnOptions { samples: 6, seed: 11, ..DehnOptions::default() };
    let a = dehn_inequality_check(&s, &p, 8, &options).unwrap();
    assert_eq!(a.loops.len(), 6);
    assert!(a.loops.iter().all(|l| l.certificate_valid && l.length <= 8));
    assert_eq!(a, dehn_inequality_check(&s, &p, 8, &options).unwrap());
}

#[test]
fn dense_loop_lengths_give_a_step_function() {
    let gens = GroupModel::Lamplighter.standard_generators();
    let lengths: Vec<u64> = dense_witness_loops(&gens, 6).unwrap().iter().map(|w| w.len() as u64).collect();
    let phi = phi_step_function(&lengths).unwrap();
    assert_eq!(phi.breakpoints(), &[16, 24, 32, 40, 48, 56]);
    for n in 0..80 {
        let expected = lengths.iter().copied().filter(|&l| l <= n).max().unwrap_or(0);
        assert_eq!(phi.eval(n), expected);
    }
}
