use cadist_core::growth::*;
use num_bigint::BigUint;
use proptest::prelude::*;

fn f(text: &str) -> SymbolicFunction {
    text.parse().unwrap()
}

/// `n_i = 2^(2^i)` computed by repeated squaring.
fn squares() -> Vec<u128> {
    let mut out = vec![2u128];
    while out.len() < 7 {
        let last = *out.last().unwrap();
        out.push(last * last);
    }
    out
}

fn incomparable_oracle(x: u128) -> u128 {
    let n = squares();
    let i = (0..n.len() - 1).find(|&i| n[i] <= x && x < n[i + 1]).unwrap();
    if i % 2 == 0 {
        n[i]
    } else {
        n[i + 1]
    }
}

fn exact(m: Magnitude) -> u128 {
    match m {
        Magnitude::Small(v) => v,
        other => panic!("expected an exact value, got {other}"),
    }
}

#[test]
fn incomparable_step_matches_defining_formula() {
    let g = SymbolicFunction::incomparable_step();
    for (x, v) in [(2u64, 2u128), (4, 16), (16, 16), (256, 65_536)] {
        assert_eq!(exact(g.eval(x).unwrap()), v);
    }
    let mut x = 2u64;
    while x < 1 << 34 {
        assert_eq!(exact(g.eval(x).unwrap()), incomparable_oracle(x as u128), "n = {x}");
        assert_eq!(exact(g.eval(x - 1 + u64::from(x == 2)).unwrap()), incomparable_oracle((x - 1 + u64::from(x == 2)) as u128));
        x = x * 3 / 2 + 1;
    }
}

#[test]
fn incomparable_step_is_not_below_identity() {
    let g = SymbolicFunction::incomparable_step();
    let id = SymbolicFunction::identity();
    let report = refute_preceq_grid(&g, &id, 16, 8, 1 << 32, CheckMode::Breakpoints).unwrap();
    assert!(report.all_refuted(), "survivors {:?}", report.survivors);
    assert!(report.exhaustive);
    let n = squares();
    for cell in &report.cells {
        // The first failing breakpoint is the first n_{2i+1} exceeding K M.
        let expected = (0..3).map(|i| n[2 * i + 1]).find(|&b| b > (cell.k * cell.m) as u128).unwrap();
        assert_eq!(cell.first_violation, Some(expected as u64), "{cell:?}");
        assert_eq!(cell.last_violation, Some(1 << 32));
    }
}

#[test]
fn identity_is_not_below_incomparable_step() {
    let g = SymbolicFunction::incomparable_step();
    let id = SymbolicFunction::identity();
    let report = refute_preceq_grid(&id, &g, 16, 8, 1 << 32, CheckMode::Breakpoints).unwrap();
    assert!(report.all_refuted(), "survivors {:?}", report.survivors);
    let n = squares();
    for cell in &report.cells {
        let (k, m) = (cell.k as u128, cell.m as u128);
        let first = cell.first_violation.expect("violation") as u128;
        assert!(first > k * incomparable_oracle(m * first), "{cell:?}");
        // Just below n_5 / M the value f(M x) is still n_4.
        let x = (n[5] - 1) / m;
        assert!(x > k * n[4]);
        assert_eq!(cell.last_violation, Some(x as u64), "{cell:?}");
    }
}

#[test]
fn constant_below_identity_survives_from_the_expected_ladder_step() {
    let report = refute_preceq_grid(&f("const:5"), &f("identity"), 16, 8, 10_000, CheckMode::Auto).unwrap();
    assert!(report.survivors.contains(&OrderWitness { k: 5, m: 1, n: 1 }));
    for cell in &report.cells {
        // K M n >= 5 from N = ceil(5 / (K M)) on; the ladder rounds N up to a power of two.
        let need = 5u64.div_ceil(cell.k * cell.m);
        let expected = (0..).map(|j| 1u64 << j).find(|&p| p >= need).unwrap();
        assert_eq!(cell.survivor.map(|w| w.n), Some(expected), "{cell:?}");
    }
}

#[test]
fn squares_below_cubes() {
    let w = OrderWitness::new(1, 1, 1).unwrap();
    let r = verify_preceq(&f("power:2"), &f("power:3"), w, 1_000_000, CheckMode::Auto).unwrap();
    assert!(r.holds());
    assert!(r.exhaustive);
    assert_eq!(r.label, "verified on [1, 1000000]");
    let back = verify_preceq(&f("power:3"), &f("power:2"), w, 1_000, CheckMode::Auto).unwrap();
    assert!(matches!(back.verdict, Verdict::Refuted { n: 2, .. }));
}

#[test]
fn domain_shortfall_is_reported() {
    let w = OrderWitness::new(1, 1, 1).unwrap();
    let err = verify_preceq(&SymbolicFunction::incomparable_step(), &f("identity"), w, 100, CheckMode::Auto);
    assert!(matches!(err, Err(cadist_core::Error::DomainShortfall { domain_start: 2, requested: 1 })));
    let t = f("table:1:1,2,3");
    let err = verify_preceq(&f("identity"), &t, w, 10, CheckMode::Auto);
    assert!(matches!(err, Err(cadist_core::Error::InsufficientRange { .. })));
}

#[test]
fn affine_normal_form_of_identity() {
    let id = f("identity");
    let norm = normalize_affine(&id, 2, 3, 4, 5).unwrap();
    for n in 1..=1000u64 {
        assert_eq!(exact(norm.function.eval(n).unwrap()), (10 * n + 19) as u128);
    }
    assert_eq!(norm.upper, OrderWitness { k: 6, m: 4, n: 2 });
    assert_eq!(norm.lower, OrderWitness { k: 1, m: 1, n: 1 });
    let up = verify_preceq(&norm.function, &id, norm.upper, 10_000, CheckMode::Exhaustive).unwrap();
    let down = verify_preceq(&id, &norm.function, norm.lower, 10_000, CheckMode::Exhaustive).unwrap();
    assert!(up.holds() && down.holds());
    assert_eq!(up.label, "verified on [2, 10000]");
}

#[test]
fn affine_identity_parameters_return_the_function() {
    let g = f("falpha:2");
    let norm = normalize_affine(&g, 1, 0, 0, 1).unwrap();
    assert_eq!(norm.function, g);
}

#[test]
fn affine_rejects_zero_function_and_bad_parameters() {
    assert!(normalize_affine(&f("const:0"), 1, 0, 0, 1).is_err());
    assert!(normalize_affine(&f("identity"), 0, 0, 0, 1).is_err());
    assert!(normalize_affine(&f("identity"), 1, 0, 0, 0).is_err());
}

#[test]
fn affine_of_bounded_function_absorbs_the_constant() {
    let g = f("step:3,7");
    let norm = normalize_affine(&g, 1, 0, 20, 1).unwrap();
    let up = verify_preceq(&norm.function, &g, norm.upper, 10_000, CheckMode::Auto).unwrap();
    assert!(up.holds(), "{up:?}");
}

#[test]
fn catalog_functions_are_non_decreasing() {
    let mut fns = SymbolicFunction::catalog();
    fns.push(f("affine:3,2,1,2:n2logn"));
    fns.push(f("step:5,9,40"));
    fns.push(f("power:2.5"));
    for g in &fns {
        for i in 0..1000u64 {
            let n = g.domain_start + i * i * 7 + i;
            let a = g.eval(n).unwrap();
            let b = g.eval(n + 1).unwrap();
            assert_ne!(a.le(&b), Some(false), "{g} at {n}");
        }
    }
}

#[test]
fn constants_are_comparable_with_catalog() {
    for g in SymbolicFunction::catalog() {
        for c in [1u64, 5, 100] {
            let k = f(&format!("const:{c}"));
            let up = refute_preceq_grid(&g, &k, 8, 4, 10_000, CheckMode::Auto).unwrap();
            let down = refute_preceq_grid(&k, &g, 8, 4, 10_000, CheckMode::Auto).unwrap();
            assert!(!(up.all_refuted() && down.all_refuted()), "{g} vs {c}");
        }
    }
}

#[test]
fn superquadratic_evidence_matches_catalog() {
    for g in SymbolicFunction::catalog() {
        let r = superquadratic_check(&g, 8, 100_000).unwrap();
        assert_eq!(r.agrees, Some(true), "{g}: {:?}", r.rows);
    }
    let sq = superquadratic_check(&f("power:2"), 8, 1000).unwrap();
    assert!(sq.rows.iter().all(|r| r.last_at_most == Some(1000)));
}

#[test]
fn exponential_is_strongly_superpolynomial() {
    let r = strongly_superpoly_check(&f("exp:2"), 1 << 10, 8, 1_000_000, 4.0).unwrap();
    let w = r.witness.expect("witness");
    assert_eq!((w.k, w.m), (1, 2));
    assert!(w.ln_t_start >= 0.0);
    // 2^(2n) >= n^2 2^n t(n) with t >= 1 from N on, checked exactly.
    for n in w.n..200 {
        let lhs = BigUint::from(n * n) << n;
        assert!(lhs <= BigUint::from(1u8) << (2 * n), "n = {n}");
    }
    assert_eq!(r.agrees, Some(true));
    assert!(r.log_ratio_samples.windows(2).all(|p| p[1].1 > p[0].1));
}

#[test]
fn f_alpha_and_cubes_have_no_strong_witness() {
    for text in ["falpha:2", "power:3"] {
        let r = strongly_superpoly_check(&f(text), 1 << 10, 8, 1_000_000, 4.0).unwrap();
        assert!(r.witness.is_none(), "{text}: {:?}", r.witness);
        assert_eq!(r.agrees, Some(true));
    }
    let cubes = strongly_superpoly_check(&f("power:3"), 4, 2, 1000, 4.0).unwrap();
    let last = cubes.log_ratio_samples.last().unwrap();
    assert!((last.1 - 3.0).abs() < 1e-9);
}

fn smooth_function() -> impl Strategy<Value = SymbolicFunction> {
    prop_oneof![
        Just(f("identity")),
        Just(f("power:2")),
        Just(f("n2logn")),
        Just(f("falpha:2")),
        Just(f("power:1.5")),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn preceq_is_reflexive(g in smooth_function(), end in 10u64..5000) {
        let w = OrderWitness::new(1, 1, g.domain_start).unwrap();
        prop_assert!(verify_preceq(&g, &g, w, end, CheckMode::Auto).unwrap().holds());
    }

    #[test]
    fn composite_witnesses_verify(
        g in smooth_function(),
        p in (1u64..4, 0u64..6, 0u64..20, 1u64..4),
        q in (1u64..4, 0u64..6, 0u64..20, 1u64..4),
    ) {
        let lo = normalize_affine(&g, p.0, p.1, p.2, p.3).unwrap();
        let hi = normalize_affine(&g, q.0, q.1, q.2, q.3).unwrap();
        let end = 2000;
        let first = verify_preceq(&lo.function, &g, lo.upper, end, CheckMode::Auto).unwrap();
        let second = verify_preceq(&g, &hi.function, hi.lower, end * lo.upper.m, CheckMode::Auto).unwrap();
        prop_assert!(first.holds(), "{:?}", first);
        prop_assert!(second.holds(), "{:?}", second);
        let w = lo.upper.compose(&hi.lower);
        let r = verify_preceq(&lo.function, &hi.function, w, end, CheckMode::Auto).unwrap();
        prop_assert!(r.holds(), "{:?}", r);
    }
}
