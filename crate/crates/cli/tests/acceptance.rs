//! End-to-end acceptance run against the `cadist` binary. Prints one line
//! per criterion and exits non-zero if any fails.

use std::collections::{HashMap, HashSet, VecDeque};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use cadist_core::filling::Presentation;
use cadist_core::group::{GeneratorSet, GroupElement, GroupModel};
use cadist_core::growth::INCOMPARABLE_BREAKPOINTS;
use cadist_core::structures::{build_structure, catalog};
use serde_json::Value;

struct Invocation {
    code: i32,
    stderr: String,
    elapsed: Duration,
    artifact: Option<Vec<u8>>,
}

impl Invocation {
    fn json(&self) -> Value {
        serde_json::from_slice(self.artifact.as_deref().expect("artifact written")).expect("artifact is JSON")
    }

    fn result(&self) -> Value {
        self.json()["result"].clone()
    }
}

/// Runs the binary with an artifact path and remembers every call so the
/// determinism check can replay it.
struct Runner {
    dir: tempfile::TempDir,
    calls: Vec<(Vec<String>, Option<Vec<u8>>)>,
    counter: usize,
}

impl Runner {
    fn new() -> Runner {
        Runner { dir: tempfile::tempdir().unwrap(), calls: Vec::new(), counter: 0 }
    }

    fn exec(&mut self, args: &[&str], threads: usize) -> Invocation {
        self.counter += 1;
        let out = self.dir.path().join(format!("artifact-{}", self.counter));
        let start = Instant::now();
        let output = Command::new(env!("CARGO_BIN_EXE_cadist"))
            .args(args)
            .arg("--out")
            .arg(&out)
            .arg("--threads")
            .arg(threads.to_string())
            .env_remove(cadist::BUDGET_ENV)
            .output()
            .expect("binary runs");
        let elapsed = start.elapsed();
        Invocation {
            code: output.status.code().unwrap_or(-1),
            stderr: String::from_utf8_lossy(&output.stderr).into_owned(),
            elapsed,
            artifact: std::fs::read(&out).ok(),
        }
    }

    fn run(&mut self, args: &[&str]) -> Invocation {
        let inv = self.exec(args, 8);
        self.calls.push((args.iter().map(|s| s.to_string()).collect(), inv.artifact.clone()));
        inv
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

type Criterion = fn(&mut Runner) -> Verdict;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

fn values(profile: &Value) -> Vec<u64> {
    profile["entries"].as_array().unwrap().iter().map(|e| e["h"].as_u64().unwrap()).collect()
}

fn criterion_1(r: &mut Runner) -> Verdict {
    let inv = r.run(&["hfun", "--structure", "Z-unary", "--n", "12", "--format", "json"]);
    let h = values(&inv.result());
    let ok = inv.code == 0 && h.len() == 13 && h.iter().all(|&v| v == 0) && inv.elapsed < Duration::from_secs(1);
    verdict(ok, format!("h = {h:?} in {:.2?}", inv.elapsed))
}

/// Breadth-first distance in the Cayley graph of `Z` with the structure's
/// generators.
fn bfs_distance(gens: &GeneratorSet, from: &GroupElement, to: &GroupElement) -> u64 {
    let model = gens.model();
    let mut seen = HashSet::from([from.clone()]);
    let mut layer = vec![from.clone()];
    let mut d = 0;
    while !layer.contains(to) {
        let mut next = Vec::new();
        for x in &layer {
            for g in gens.generators() {
                let y = model.multiply(x, &g.value);
                if seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        layer = next;
        d += 1;
    }
    d
}

fn criterion_2(r: &mut Runner) -> Verdict {
    let inv = r.run(&["hfun", "--structure", "Z-zigzag-binary", "--n", "14", "--format", "json"]);
    let h = values(&inv.result());
    let s = build_structure("Z-zigzag-binary").unwrap();
    let oracle = s
        .language
        .enumerate(4)
        .map(|c| {
            let w = &c.0[0];
            bfs_distance(&s.generators, &s.pi(w).unwrap(), &s.psi(w).unwrap())
        })
        .max()
        .unwrap();
    let monotone = h.windows(2).all(|w| w[0] <= w[1]);
    // Growth well past any constant: the last value dwarfs the early ones.
    let growing = h.len() == 15 && h[14] > 2 * h[7] && h[7] > 2 * h[3];
    let ok = inv.code == 0 && monotone && growing && h[4] == oracle && inv.elapsed < Duration::from_secs(30);
    verdict(ok, format!("h(4) = {} (oracle {oracle}), h(14) = {}, {:.2?}", h[4], h[14], inv.elapsed))
}

fn criterion_3(r: &mut Runner) -> Verdict {
    let mut bad = Vec::new();
    for e in catalog() {
        let inv = r.run(&["verify", "--structure", e.name, "--depth", "1", "--length-bound", "10"]);
        let lb = &inv.result()["length_bound"];
        if inv.code != 0 || lb["violations"] != 0 || lb["checked"].as_u64().unwrap_or(0) == 0 {
            bad.push(e.name);
        }
    }
    verdict(bad.is_empty(), format!("{} structures, failing: {bad:?}", catalog().len()))
}

/// Drops transitions of the first multiplier of an exported bundle until
/// verification reports a failure.
fn fault_injection(r: &mut Runner) -> Option<String> {
    let dir = r.path("bundle");
    let export = r.exec(&["export", "--structure", "Z-unary", "--out-dir", dir.to_str().unwrap()], 1);
    assert_eq!(export.code, 0, "{}", export.stderr);
    let manifest = dir.join("Z-unary").join("bundle.json");
    let file = dir.join("Z-unary").join("multiplier-0.json");
    let original: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    let count = original["transitions"].as_array().unwrap().len();
    for i in 0..count {
        let mut broken = original.clone();
        broken["transitions"].as_array_mut().unwrap().remove(i);
        std::fs::write(&file, broken.to_string()).unwrap();
        let inv = r.exec(&["verify", "--bundle", manifest.to_str().unwrap(), "--depth", "8"], 1);
        if inv.code == 1 {
            let record: Value = serde_json::from_str(inv.stderr.lines().last().unwrap_or("{}")).ok()?;
            let failure = &record["failures"][0];
            if let Some(pair) = failure["counterexample"].as_str() {
                return Some(format!("{} fails on {pair}", failure["check"].as_str().unwrap_or("?")));
            }
        }
    }
    None
}

fn criterion_4(r: &mut Runner) -> Verdict {
    let mut bad = Vec::new();
    for e in catalog() {
        let inv = r.run(&["verify", "--structure", e.name, "--depth", "8"]);
        let v = &inv.result()["verification"];
        let all = ["regularity", "bijectivity", "soundness", "completeness"].iter().all(|k| v[k]["passed"] == true);
        if inv.code != 0 || !all {
            bad.push(e.name);
        }
    }
    let caught = fault_injection(r);
    let ok = bad.is_empty() && caught.is_some();
    verdict(ok, format!("failing: {bad:?}; injected fault: {}", caught.unwrap_or_else(|| "missed".into())))
}

fn criterion_5(r: &mut Runner) -> Verdict {
    let inv = r.run(&["transport", "--structure", "Z-unary", "--to", "doubled", "--n", "8"]);
    let c = &inv.result()["check"];
    let ok = inv.code == 0 && c["old_below_new"] == true && c["new_below_old"] == true && c["range"] == 8;
    verdict(ok, format!("M1 = {}, M2 = {}", c["m1"], c["m2"]))
}

fn certificates_pass(result: &Value) -> (usize, usize) {
    let loops = result["loops"].as_array().unwrap();
    let passing = loops
        .iter()
        .filter(|l| {
            let c = &l["check"];
            c["free_reduction_identity"] == true
                && c["cells_are_loops"] == true
                && c["perimeter_ok"] == true
                && c["cell_count_ok"] == true
        })
        .count();
    (passing, loops.len())
}

fn criterion_6(r: &mut Runner) -> Verdict {
    let start = Instant::now();
    let z2 = r.run(&["fill", "--structure", "Z2", "--random", "50", "--max-len", "12", "--seed", "6"]);
    let ll2 = r.run(&["fill", "--structure", "LL2", "--dense-n", "2"]);
    let elapsed = start.elapsed();
    let (a, na) = certificates_pass(&z2.result());
    let (b, nb) = certificates_pass(&ll2.result());
    let ok = z2.code == 0 && ll2.code == 0 && a == na && na == 50 && b == nb && nb == 2 && elapsed < Duration::from_secs(120);
    verdict(ok, format!("Z2 {a}/{na}, LL2 {b}/{nb}, {elapsed:.2?}"))
}

/// Sum of absolute winding numbers of a closed walk in `Z^2` around unit
/// cells. One relator move changes it by at most one.
fn winding_mass(gens: &GeneratorSet, w: &[usize]) -> u32 {
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
        let mut winding = 0i64;
        for pair in col.windows(2).rev() {
            winding += pair[1].2;
            mass += winding.abs() * (pair[1].1 - pair[0].1);
        }
    }
    mass as u32
}

/// Breadth-first search over the rewriting graph, from `w` towards the
/// empty word, pruned by winding mass.
fn bfs_area(p: &Presentation, w: &[usize], max_area: u32) -> Option<u32> {
    let gens = &p.generators;
    let moves = p.insertions();
    let start = gens.free_reduce(w).0;
    let mut dist: HashMap<Vec<usize>, u32> = HashMap::from([(start.clone(), 0)]);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        let d = dist[&u];
        if u.is_empty() {
            return Some(d);
        }
        for pos in 0..=u.len() {
            for m in &moves {
                let mut c = u[..pos].to_vec();
                c.extend_from_slice(m);
                c.extend_from_slice(&u[pos..]);
                let c = gens.free_reduce(&c).0;
                if d + 1 + winding_mass(gens, &c) <= max_area && !dist.contains_key(&c) {
                    dist.insert(c.clone(), d + 1);
                    queue.push_back(c);
                }
            }
        }
    }
    None
}

fn criterion_7(r: &mut Runner) -> Verdict {
    let single = r.run(&["area", "--model", "Z2", "--word", "x y X Y", "--word", "x x y X X Y", "--word", "x y Y X"]);
    let areas: Vec<Option<u64>> = single.result()["words"].as_array().unwrap().iter().map(|w| w["area"].as_u64()).collect();
    let basics = single.code == 0 && areas == [Some(1), Some(2), Some(0)];

    let sweep = r.run(&["area", "--model", "Z2", "--identity-words", "8"]);
    let p = Presentation::standard(GroupModel::Abelian(2)).unwrap();
    let words = sweep.result()["words"].as_array().unwrap().clone();
    let mut mismatches = 0;
    for entry in &words {
        let w = p.generators.parse_word(entry["word"].as_str().unwrap()).unwrap();
        let expected = bfs_area(&p, &w, 8);
        if entry["area"].as_u64().map(|a| a as u32) != expected || entry["replay_valid"] != true {
            mismatches += 1;
        }
    }
    let ok = basics && sweep.code == 0 && mismatches == 0 && !words.is_empty();
    verdict(ok, format!("areas {:?}; {} identity words, {mismatches} disagree with the oracle", areas.iter().flatten().collect::<Vec<_>>(), words.len()))
}

fn criterion_8(r: &mut Runner) -> Verdict {
    let inv = r.run(&["dehn-check", "--structure", "Z2", "--n", "4,6,8", "--seed", "3"]);
    let doc = inv.json();
    let k = &doc["header"]["constants"];
    let d_ok = k["D"].as_u64() == Some(k["c"].as_u64().unwrap() + k["e"].as_u64().unwrap());
    let reports = doc["result"]["reports"].as_array().unwrap().clone();
    let all = reports.iter().all(|r| r["loops"].as_array().unwrap().iter().all(|l| l["passed"] == true));
    let ok = inv.code == 0 && d_ok && all && reports.len() == 3;
    verdict(ok, format!("D = {}, {} reports", k["D"], reports.len()))
}

fn criterion_9(r: &mut Runner) -> Verdict {
    let range = 1u64 << 32;
    let inv = r.run(&[
        "compare",
        "--g",
        "step:incomparable",
        "--f",
        "identity",
        "--grid",
        "16x8",
        "--range",
        &range.to_string(),
        "--breakpoints-only",
    ]);
    let res = inv.result();
    let summary_ok = res["summary"] == "all witnesses refuted both directions";
    // Above the line the violations sit on breakpoints; below it, just
    // before the last breakpoint scaled by M.
    let on_breakpoints = res["g_below_f"]["cells"].as_array().unwrap().iter().all(|c| {
        c["survivor"].is_null()
            && INCOMPARABLE_BREAKPOINTS.contains(&c["first_violation"].as_u64().unwrap_or(0))
            && c["last_violation"].as_u64() == Some(range)
    });
    let below_breakpoints = res["f_below_g"]["cells"].as_array().unwrap().iter().all(|c| {
        let m = c["M"].as_u64().unwrap();
        c["survivor"].is_null() && c["last_violation"].as_u64() == Some((range - 1) / m)
    });
    let ok = inv.code == 0
        && summary_ok
        && on_breakpoints
        && below_breakpoints
        && inv.elapsed < Duration::from_secs(10);
    verdict(ok, format!("{} in {:.2?}", res["summary"], inv.elapsed))
}

fn criterion_10(r: &mut Runner) -> Verdict {
    let inv = r.run(&["compare", "--classify", "--grid", "1024x8", "--range", "1000000"]);
    let res = inv.result();
    let entries = res["functions"].as_array().unwrap();
    let find = |name: &str| entries.iter().find(|e| e["function"] == name).cloned().unwrap_or(Value::Null);
    let strong = |name: &str| !find(name)["strongly_superpolynomial"]["witness"].is_null();
    let exp_found = strong("exp:2");
    let none_for_others = !strong("falpha:2") && !strong("power:3");
    let quadratic_agrees = entries.iter().all(|e| e["superquadratic"]["agrees"] == true);
    let ok = inv.code == 0 && exp_found && none_for_others && quadratic_agrees;
    verdict(
        ok,
        format!(
            "witness for exp:2 {}, none for falpha:2 and power:3 {}, superquadratic agrees on {} functions {}",
            exp_found,
            none_for_others,
            entries.len(),
            quadratic_agrees
        ),
    )
}

fn criterion_11(r: &mut Runner) -> Verdict {
    let calls = std::mem::take(&mut r.calls);
    let mut differing = Vec::new();
    for (args, artifact) in &calls {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let again = r.exec(&args, 1);
        if again.artifact.is_none() || again.artifact != *artifact {
            differing.push(args.join(" "));
        }
    }
    verdict(differing.is_empty(), format!("{} artifacts compared, differing: {differing:?}", calls.len()))
}

fn main() {
    let mut runner = Runner::new();
    let criteria: [(u32, Criterion); 11] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let mut failed = 0;
    for (n, check) in criteria {
        let v = check(&mut runner);
        println!("criterion {n}: {} {}", if v.passed { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.passed);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
