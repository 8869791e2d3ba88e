use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use cadist_core::filling::{
    area, check_certificate, corridor_fill, dehn_inequality_check, phi_step_function, random_loop,
    replay_area, AreaResult, DehnOptions, FillingConstants, Presentation,
};
use cadist_core::group::{dense_witness_loops, GeneratorSet, GroupModel, Word};
use cadist_core::growth::{
    refute_preceq_grid, strongly_superpoly_check, superquadratic_check, verify_preceq, CheckMode,
    OrderWitness, SymbolicFunction,
};
use cadist_core::profile::{check_length_bound, check_transport, compute_h, ProfileOptions};
use cadist_core::structures::{
    build_structure, catalog, doubled_spec, verify_structure, CayleyAutomaticStructure,
    VerifyOptions,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::*;
use crate::config::merge;
use crate::{Body, CliError, Outcome, Run};

type Result<T> = std::result::Result<T, CliError>;

/// Merges config options into the flags and runs the subcommand; returns
/// the effective options alongside the outcome.
pub fn dispatch(
    command: &Command,
    options: Map<String, Value>,
    run: &Run,
) -> Result<(Value, Outcome)> {
    fn go<T: Serialize + DeserializeOwned>(
        flags: &T,
        options: Map<String, Value>,
        run: &Run,
        f: fn(&T, &Run) -> Result<Outcome>,
    ) -> Result<(Value, Outcome)> {
        let merged = merge(flags, options)?;
        let effective =
            serde_json::to_value(&merged).map_err(|e| CliError::Usage(e.to_string()))?;
        Ok((effective, f(&merged, run)?))
    }
    match command {
        Command::List(a) => go(a, options, run, list),
        Command::Verify(a) => go(a, options, run, verify),
        Command::Hfun(a) => go(a, options, run, hfun),
        Command::Fill(a) => go(a, options, run, fill),
        Command::Area(a) => go(a, options, run, area_cmd),
        Command::DehnCheck(a) => go(a, options, run, dehn),
        Command::DenseLoops(a) => go(a, options, run, dense_loops),
        Command::Phi(a) => go(a, options, run, phi),
        Command::Compare(a) => go(a, options, run, compare),
        Command::Transport(a) => go(a, options, run, transport),
        Command::Export(a) => go(a, options, run, export),
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn outcome(file_name: &str, body: Value, summary: String) -> Outcome {
    Outcome {
        file_name: file_name.into(),
        body: Body::Json(body),
        summary,
        constants: None,
        failures: Vec::new(),
    }
}

fn load_structure(
    structure: &Option<String>,
    bundle: &Option<PathBuf>,
) -> Result<CayleyAutomaticStructure> {
    match (structure, bundle) {
        (Some(name), None) => Ok(build_structure(name)?),
        (None, Some(path)) => Ok(CayleyAutomaticStructure::load_bundle(path)?),
        (Some(_), Some(_)) => Err(CliError::Usage(
            "give either --structure or --bundle, not both".into(),
        )),
        (None, None) => Err(CliError::Usage(
            "--structure or --bundle is required".into(),
        )),
    }
}

fn profile_options(run: &Run, cap: Option<u64>) -> ProfileOptions {
    ProfileOptions {
        max_words: run.budgets.max_words,
        distance_cap: cap,
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

/// Maps a word over `from` to the generator of `to` with the same name, or
/// else with the same value.
fn translate(from: &GeneratorSet, to: &GeneratorSet, w: &Word) -> Result<Word> {
    w.iter()
        .map(|&g| {
            to.lookup(from.name(g))
                .or_else(|e| to.find_value(from.value(g)).ok_or(CliError::Core(e)))
        })
        .collect::<Result<Vec<_>>>()
        .map(Word)
}

fn list(_: &ListArgs, _: &Run) -> Result<Outcome> {
    let structures = catalog()
        .into_iter()
        .map(|e| {
            let s = (e.build)()?;
            Ok(json!({
                "name": e.name,
                "model": e.model,
                "summary": e.summary,
                "generators": s.generators.generators().iter().map(|g| g.name.clone()).collect::<Vec<_>>(),
                "constants": FillingConstants::from_structure(&s)?,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let functions: Vec<Value> = SymbolicFunction::catalog()
        .iter()
        .map(|f| json!({ "function": f.to_string(), "classification": f.classification() }))
        .collect();
    let models = ["Z", "Z2", "H3", "BS12", "LL2"];
    let summary = format!(
        "{} structures, {} models, {} functions",
        structures.len(),
        models.len(),
        functions.len()
    );
    Ok(outcome(
        "list.json",
        json!({ "structures": structures, "models": models, "functions": functions }),
        summary,
    ))
}

fn verify(a: &VerifyArgs, run: &Run) -> Result<Outcome> {
    let s = load_structure(&a.structure, &a.bundle)?;
    let mut options = VerifyOptions::new(a.depth.unwrap_or(8));
    options.max_words = run.budgets.max_words;
    if let Some(r) = a.ball_radius {
        options.ball_radius = r;
    }
    let report = verify_structure(&s, &options)?;
    let mut failures = Vec::new();
    if let Some((family, o)) = report.first_failure() {
        failures.push(json!({ "check": family, "counterexample": o.counterexample }));
    }
    let length_bound = match a.length_bound {
        Some(n) => {
            let r = check_length_bound(&s, n, &profile_options(run, None))?;
            if !r.passed() {
                failures.push(json!({ "check": "length_bound", "violations": r.violations, "first_violation": r.first_violation }));
            }
            Some(r)
        }
        None => None,
    };
    let summary = match failures.first() {
        None => format!("{}: all conditions hold at depth {}", s.name, report.depth),
        Some(f) => format!(
            "{}: {} fails",
            s.name,
            f["check"].as_str().unwrap_or("check")
        ),
    };
    Ok(Outcome {
        constants: Some(FillingConstants::from_structure(&s)?),
        failures,
        ..outcome(
            "verify.json",
            json!({ "verification": report, "length_bound": length_bound }),
            summary,
        )
    })
}

fn hfun(a: &HfunArgs, run: &Run) -> Result<Outcome> {
    let s = load_structure(&a.structure, &a.bundle)?;
    let n = a.n.unwrap_or(12);
    let p = compute_h(&s, n, &profile_options(run, a.cap))?;
    let summary = format!("{}: h({n}) = {}", s.name, p.h(n as u64).unwrap_or(0));
    let (file_name, body) = match a.format.as_deref().unwrap_or("csv") {
        "csv" => ("profile.csv", Body::Csv(p.to_csv())),
        "json" => ("profile.json", Body::Json(to_json(&p))),
        other => {
            return Err(CliError::Usage(format!(
                "unknown format `{other}`; use csv or json"
            )))
        }
    };
    Ok(Outcome {
        file_name: file_name.into(),
        body,
        summary,
        constants: Some(FillingConstants::from_structure(&s)?),
        failures: Vec::new(),
    })
}

/// Largest profile length whose normal forms fit in `budget`.
fn affordable_profile(s: &CayleyAutomaticStructure, up_to: usize, budget: usize) -> usize {
    let mut total = 0u128;
    let mut best = 0;
    for (n, count) in s.language.count_by_length(up_to).into_iter().enumerate() {
        total = total.saturating_add(count);
        if total > budget as u128 {
            break;
        }
        best = n;
    }
    best
}

fn fill(a: &FillArgs, run: &Run) -> Result<Outcome> {
    let s = load_structure(&a.structure, &a.bundle)?;
    let gens = &s.generators;
    let base = s.model().standard_generators();
    let mut loops: Vec<Word> = Vec::new();
    if let Some(text) = &a.loop_word {
        loops.push(gens.parse_word(text)?);
    }
    if let Some(path) = &a.loop_file {
        for line in read_file(path)?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
        {
            loops.push(gens.parse_word(line)?);
        }
    }
    if let Some(k) = a.dense_n {
        for w in dense_witness_loops(&base, k)? {
            loops.push(translate(&base, gens, &w)?);
        }
    }
    if let Some(count) = a.random {
        let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
        let max_len = a.max_len.unwrap_or(12);
        for _ in 0..count {
            loops.push(translate(
                &base,
                gens,
                &random_loop(&base, max_len, &mut rng)?,
            )?);
        }
    }
    if loops.is_empty() {
        return Err(CliError::Usage(
            "no loops: give --loop, --loop-file, --dense-n or --random".into(),
        ));
    }

    let constants = FillingConstants::from_structure(&s)?;
    let longest = loops.iter().map(|w| w.len() as u64).max().unwrap_or(0);
    let wanted = constants.h_argument(longest) as usize;
    let profile_n = match a.profile_n {
        Some(n) => n,
        None => affordable_profile(&s, wanted, run.budgets.max_words.min(100_000)),
    };
    let profile = compute_h(&s, profile_n, &profile_options(run, None))?;

    let results = loops
        .par_iter()
        .map(|w| {
            let cert = corridor_fill(&s, w)?;
            let check = check_certificate(&s, &cert, Some(&profile))?;
            Ok((cert.render(gens), check))
        })
        .collect::<std::result::Result<Vec<_>, cadist_core::Error>>()?;
    let failures: Vec<Value> = results
        .iter()
        .filter(|(_, check)| !check.passed())
        .map(|(cert, check)| json!({ "loop": cert.loop_word, "check": check }))
        .collect();
    let entries: Vec<Value> = results
        .iter()
        .map(|(cert, check)| json!({ "certificate": cert, "check": check }))
        .collect();
    let summary = format!(
        "{}: {}/{} certificates pass",
        s.name,
        results.len() - failures.len(),
        results.len()
    );
    let body = json!({ "structure": s.name, "profile_n": profile_n, "loops": entries });
    Ok(Outcome {
        constants: Some(constants),
        failures,
        ..outcome("cert.json", body, summary)
    })
}

fn load_presentation(path: &Option<PathBuf>, model: &Option<String>) -> Result<Presentation> {
    match (path, model) {
        (Some(p), None) => Ok(Presentation::from_json_str(&read_file(p)?)?),
        (None, m) => Ok(Presentation::standard(GroupModel::from_name(
            m.as_deref().unwrap_or("Z2"),
        )?)?),
        (Some(_), Some(_)) => Err(CliError::Usage(
            "give either --presentation or --model, not both".into(),
        )),
    }
}

fn render_area(p: &Presentation, r: &AreaResult) -> Value {
    let gens = &p.generators;
    json!({
        "word": gens.format_word(&r.word),
        "area": r.area,
        "steps": r.steps.iter().map(|s| json!({ "position": s.position, "inserted": gens.format_word(&s.inserted) })).collect::<Vec<_>>(),
        "nodes": r.nodes,
        "replay_valid": replay_area(p, r),
    })
}

/// Freely reduced words of length at most `max_len` that evaluate to the
/// identity, in length-lexicographic order of generator indices.
fn identity_words(gens: &GeneratorSet, max_len: usize, budget: usize) -> Result<Vec<Word>> {
    let id = gens.model().identity();
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    let mut seen = 0usize;
    for len in 0..=max_len {
        for w in &layer {
            if gens.evaluate(w) == id {
                out.push(Word(w.clone()));
            }
        }
        if len == max_len {
            break;
        }
        let mut next = Vec::new();
        for w in &layer {
            for g in 0..gens.len() {
                if w.last().is_some_and(|&l| gens.inverse_of(l) == g) {
                    continue;
                }
                let mut v = w.clone();
                v.push(g);
                next.push(v);
            }
        }
        seen += next.len();
        if seen > budget {
            return Err(cadist_core::Error::EnumerationBudget(budget).into());
        }
        layer = next;
    }
    Ok(out)
}

fn area_cmd(a: &AreaArgs, run: &Run) -> Result<Outcome> {
    let p = load_presentation(&a.presentation, &a.model)?;
    let nodes = run.budgets.nodes_or(10_000_000);
    let max_area = run.budgets.max_area;
    let mut words = a
        .word
        .iter()
        .map(|t| p.generators.parse_word(t))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let sweep = a.identity_words.is_some();
    if let Some(len) = a.identity_words {
        words.extend(identity_words(&p.generators, len, run.budgets.max_words)?);
    }
    if words.is_empty() {
        return Err(CliError::Usage("give --word or --identity-words".into()));
    }
    let results = words
        .par_iter()
        .map(|w| match area(&p, w, max_area, nodes) {
            Ok(r) => Ok(render_area(&p, &r)),
            // In a sweep, words beyond the cap are reported rather than fatal.
            Err(cadist_core::Error::AreaExceedsMax(m)) if sweep => {
                Ok(json!({ "word": p.generators.format_word(w), "area": null, "exceeds": m }))
            }
            Err(e) => Err(e),
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut histogram: BTreeMap<String, u64> = BTreeMap::new();
    for r in &results {
        let key = match r["area"].as_u64() {
            Some(v) => v.to_string(),
            None => format!(">{max_area}"),
        };
        *histogram.entry(key).or_default() += 1;
    }
    let failures: Vec<Value> = results
        .iter()
        .filter(|r| r["replay_valid"] == Value::Bool(false))
        .map(|r| json!({ "check": "replay", "word": r["word"] }))
        .collect();
    let summary = match results.as_slice() {
        [one] => format!(
            "area({}) = {}",
            one["word"].as_str().unwrap_or(""),
            one["area"]
        ),
        _ => format!("{} words, areas {}", results.len(), to_json(&histogram)),
    };
    let body = json!({ "model": p.generators.model().name(), "max_area": max_area, "words": results, "histogram": histogram });
    Ok(Outcome {
        failures,
        ..outcome("area.json", body, summary)
    })
}

fn dehn(a: &DehnArgs, run: &Run) -> Result<Outcome> {
    let s = load_structure(&a.structure, &a.bundle)?;
    let p = match &a.presentation {
        Some(path) => Presentation::from_json_str(&read_file(path)?)?,
        None => Presentation::standard(s.model())?,
    };
    let defaults = DehnOptions::default();
    let options = DehnOptions {
        samples: a.samples.unwrap_or(defaults.samples),
        seed: run.seed,
        max_area: run.budgets.max_area,
        cell_max_area: a.cell_max_area.unwrap_or(defaults.cell_max_area),
        node_budget: run.budgets.nodes_or(defaults.node_budget),
    };
    let ns = if a.n.is_empty() {
        vec![4, 6, 8]
    } else {
        a.n.clone()
    };
    let reports = ns
        .par_iter()
        .map(|&n| dehn_inequality_check(&s, &p, n, &options))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let failures: Vec<Value> = reports
        .iter()
        .flat_map(|r| {
            r.loops
                .iter()
                .filter(|l| !l.passed)
                .map(move |l| json!({ "n": r.n, "loop": l }))
        })
        .collect();
    let margins: Vec<String> = reports
        .iter()
        .map(|r| {
            format!(
                "n={}: min margin {}",
                r.n,
                r.min_margin().map_or("-".into(), |m| m.to_string())
            )
        })
        .collect();
    let summary = format!("{}: {}", s.name, margins.join(", "));
    Ok(Outcome {
        constants: Some(FillingConstants::from_structure(&s)?),
        failures,
        ..outcome(
            "dehn.json",
            json!({ "structure": s.name, "reports": reports }),
            summary,
        )
    })
}

fn dense_loops(a: &DenseArgs, _: &Run) -> Result<Outcome> {
    let gens = GroupModel::Lamplighter.standard_generators();
    let n = a.n.unwrap_or(4);
    let loops = dense_witness_loops(&gens, n)?;
    let entries: Vec<Value> = loops
        .iter()
        .enumerate()
        .map(|(i, w)| json!({ "k": i + 1, "word": gens.format_word(w), "length": w.len() }))
        .collect();
    let lengths: Vec<String> = loops.iter().map(|w| w.len().to_string()).collect();
    Ok(outcome(
        "dense.json",
        json!({ "model": "LL2", "loops": entries }),
        format!("lengths {}", lengths.join(", ")),
    ))
}

fn phi(a: &PhiArgs, _: &Run) -> Result<Outcome> {
    let mut lengths = a.lengths.clone();
    if let Some(k) = a.dense_n {
        let gens = GroupModel::Lamplighter.standard_generators();
        lengths.extend(
            dense_witness_loops(&gens, k)?
                .iter()
                .map(|w| w.len() as u64),
        );
    }
    if lengths.is_empty() {
        return Err(CliError::Usage("give --lengths or --dense-n".into()));
    }
    let step = phi_step_function(&lengths)?;
    let upto = a
        .upto
        .unwrap_or_else(|| step.breakpoints().last().copied().unwrap_or(0) + 8);
    let mut csv = String::from("n,phi\n");
    for n in 0..=upto {
        csv.push_str(&format!("{n},{}\n", step.eval(n)));
    }
    let summary = format!("breakpoints {:?}", step.breakpoints());
    Ok(Outcome {
        file_name: "phi.csv".into(),
        body: Body::Csv(csv),
        summary,
        constants: None,
        failures: Vec::new(),
    })
}

fn parse_function(text: &Option<String>, flag: &str) -> Result<SymbolicFunction> {
    text.as_deref()
        .ok_or_else(|| CliError::Usage(format!("--{flag} is required")))?
        .parse()
        .map_err(CliError::Core)
}

fn parse_numbers(text: &str, sep: char, count: usize, what: &str) -> Result<Vec<u64>> {
    let parts: Vec<u64> = text
        .split(sep)
        .map(|p| p.trim().parse::<u64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("bad {what} `{text}`")))?;
    if parts.len() != count {
        return Err(CliError::Usage(format!("bad {what} `{text}`")));
    }
    Ok(parts)
}

fn compare(a: &CompareArgs, _: &Run) -> Result<Outcome> {
    let mode = match (a.breakpoints_only, &a.mode) {
        (true, Some(m)) if m != "breakpoints" => {
            return Err(CliError::Usage(
                "--breakpoints-only conflicts with --mode".into(),
            ));
        }
        (true, _) => CheckMode::Breakpoints,
        (false, Some(m)) => m.parse()?,
        (false, None) => CheckMode::Auto,
    };
    if a.classify {
        return classify(a);
    }
    let g = parse_function(&a.g, "g")?;
    let f = parse_function(&a.f, "f")?;
    let range = a.range.unwrap_or(1 << 32);
    if let Some(w) = &a.witness {
        let v = parse_numbers(w, ',', 3, "witness")?;
        let report = verify_preceq(&g, &f, OrderWitness::new(v[0], v[1], v[2])?, range, mode)?;
        let summary = format!(
            "{g} <= {f} with K={}, M={}, N={}: {}",
            v[0],
            v[1],
            v[2],
            verdict_text(&to_json(&report))
        );
        let failures = if report.holds() {
            Vec::new()
        } else {
            vec![json!({ "check": "preceq", "report": report })]
        };
        return Ok(Outcome {
            failures,
            ..outcome("compare.json", to_json(&report), summary)
        });
    }
    let grid = parse_numbers(a.grid.as_deref().unwrap_or("16x8"), 'x', 2, "grid")?;
    let (forward, backward) = rayon::join(
        || refute_preceq_grid(&g, &f, grid[0], grid[1], range, mode),
        || refute_preceq_grid(&f, &g, grid[0], grid[1], range, mode),
    );
    let (forward, backward) = (forward?, backward?);
    let summary = match (forward.all_refuted(), backward.all_refuted()) {
        (true, true) => "all witnesses refuted both directions".to_string(),
        _ => format!(
            "surviving witnesses: {} for g <= f, {} for f <= g",
            forward.survivors.len(),
            backward.survivors.len()
        ),
    };
    let body = json!({ "g_below_f": forward, "f_below_g": backward, "summary": summary });
    Ok(outcome("compare.json", body, summary))
}

fn verdict_text(report: &Value) -> String {
    match report["verdict"].as_str() {
        Some("refuted") => format!("refuted at n={}", report["n"]),
        Some("undecided") => format!("undecided at n={}", report["n"]),
        Some(v) => format!("{v} ({})", report["label"].as_str().unwrap_or("")),
        None => "no verdict".into(),
    }
}

fn classify(a: &CompareArgs) -> Result<Outcome> {
    let functions = match &a.f {
        Some(_) => vec![parse_function(&a.f, "f")?],
        None => SymbolicFunction::catalog(),
    };
    let grid = parse_numbers(a.grid.as_deref().unwrap_or("1024x8"), 'x', 2, "grid")?;
    let range = a.range.unwrap_or(1_000_000);
    let threshold = a.threshold.unwrap_or(4.0);
    let rows = functions
        .par_iter()
        .map(|f| {
            let quadratic = superquadratic_check(f, grid[1], range)?;
            let strong = strongly_superpoly_check(f, grid[0], grid[1], range, threshold)?;
            Ok((f.to_string(), quadratic, strong))
        })
        .collect::<std::result::Result<Vec<_>, cadist_core::Error>>()?;
    let mut failures = Vec::new();
    for (name, q, s) in &rows {
        if q.agrees == Some(false) {
            failures.push(json!({ "check": "superquadratic", "function": name, "evidence": q.evidence_super_quadratic }));
        }
        if s.agrees == Some(false) {
            failures.push(json!({ "check": "strongly_superpolynomial", "function": name, "witness": s.witness }));
        }
    }
    let entries: Vec<Value> = rows
        .iter()
        .map(|(name, q, s)| json!({ "function": name, "superquadratic": q, "strongly_superpolynomial": s }))
        .collect();
    let summary = format!(
        "{} functions, evidence disagrees with ground truth in {} checks",
        rows.len(),
        failures.len()
    );
    Ok(Outcome {
        failures,
        ..outcome("classify.json", json!({ "functions": entries }), summary)
    })
}

fn transport(a: &TransportArgs, run: &Run) -> Result<Outcome> {
    let s = build_structure(a.structure.as_deref().unwrap_or("Z-unary"))?;
    let with_identity = match a.to.as_deref().unwrap_or("doubled") {
        "doubled" => false,
        "doubled-identity" => true,
        other => {
            return Err(CliError::Usage(format!(
                "unknown target `{other}`; use doubled or doubled-identity"
            )))
        }
    };
    let n = a.n.unwrap_or(8);
    let spec = doubled_spec(&s, with_identity)?;
    let moved = s.transport(&format!("{}-transported", s.name), &spec, n)?;
    let check = check_transport(&s, &moved, n, &profile_options(run, None))?;
    let summary = format!(
        "{}: M1={}, M2={}, inequalities {}",
        s.name,
        check.m1,
        check.m2,
        if check.passed() { "hold" } else { "fail" }
    );
    let failures = if check.passed() {
        Vec::new()
    } else {
        vec![json!({ "check": "transport", "report": check })]
    };
    let body = json!({
        "structure": s.name,
        "generators": moved.structure.generators.generators().iter().map(|g| g.name.clone()).collect::<Vec<_>>(),
        "check": check,
    });
    Ok(Outcome {
        constants: Some(FillingConstants::from_structure(&s)?),
        failures,
        ..outcome("transport.json", body, summary)
    })
}

fn export(a: &ExportArgs, run: &Run) -> Result<Outcome> {
    let s = load_structure(&a.structure, &None)?;
    let dir = run
        .out_dir
        .as_ref()
        .ok_or_else(|| CliError::Usage("export needs --out-dir".into()))?;
    let manifest = s.export_bundle(&dir.join(&s.name))?;
    let summary = format!("{}: bundle at {}", s.name, manifest.display());
    Ok(Outcome {
        constants: Some(FillingConstants::from_structure(&s)?),
        ..outcome(
            "export.json",
            json!({ "structure": s.name, "bundle": manifest }),
            summary,
        )
    })
}
