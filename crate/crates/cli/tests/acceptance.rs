//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use clap::ValueEnum;
use gwasym::bounds::{check_p2_sandwich, check_p3_coarse_bound, check_p3_majorants, check_stirling};
use gwasym::empirics::{fit_exponent, monotone_from, Sequence};
use gwasym::numerics::{ln_rational, ExactRational, Factorials, Precision};
use gwasym::recursions::{model_closed_form, model_recursion, p2_genus0, p2_genus1, p3_genus0, CountTable, ModelSpec};
use gwasym::singularity::{asymptotic_predict, ode_residual, pole_residue, solve_x0, F0Series, SingularityProfile};
use gwasym_cli::cache::{self, Format};
use rug::{Float, Integer};
use serde_json::Value;

const PREC_BITS: u32 = 256;

struct Line {
    id: u32,
    pass: bool,
    detail: String,
}

fn binom(n: i64, k: i64) -> Integer {
    if k < 0 || k > n || n < 0 {
        return Integer::new();
    }
    Integer::from(Integer::binomial_u(n as u32, k as u32))
}

fn oracle_genus0(d_max: usize) -> Vec<Integer> {
    let mut n = vec![Integer::new(), Integer::from(1)];
    for d in 2..=d_max as i64 {
        let mut acc = Integer::new();
        for d1 in 1..d {
            let d2 = d - d1;
            let w = binom(3 * d - 4, 3 * d1 - 2) * d2 - binom(3 * d - 4, 3 * d1 - 1) * d1;
            acc += Integer::from(&n[d1 as usize] * &n[d2 as usize]) * (d1 * d1 * d2) * w;
        }
        n.push(acc);
    }
    n
}

fn oracle_genus1(g0: &[Integer], d_max: usize) -> Vec<Integer> {
    let mut n1 = vec![Integer::new()];
    for d in 1..=d_max as i64 {
        let mut acc = binom(d, 3) * &g0[d as usize] * 3u32;
        for d1 in 1..d {
            let d0 = d - d1;
            let w = binom(3 * d - 1, 3 * d1) * (3 * d0 * d0 - 2 * d0) * d1;
            acc += Integer::from(&g0[d0 as usize] * &n1[d1 as usize]) * w * 4u32;
        }
        n1.push(acc / 36u32);
    }
    n1
}

fn counts(table: &CountTable, d_max: usize) -> Vec<Integer> {
    let f = Factorials::up_to(table.max_factorial_index());
    (1..=d_max).map(|d| table.count_with(&f, d, 0).expect("integral")).collect()
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn secs(t: Duration) -> f64 {
    t.as_secs_f64()
}

struct Tables {
    g0: CountTable,
    g1: CountTable,
    p3: CountTable,
    g0_time: Duration,
    p3_time: Duration,
}

fn criterion1(t: &Tables) -> Line {
    let oracle = oracle_genus0(8);
    let classical = [1u64, 1, 12, 620, 87304, 26312976, 14616808192];
    let got = counts(&t.g0, 8);
    let exact = got == oracle[1..];
    let classic = got.iter().zip(classical).all(|(g, c)| *g == c);
    let fast = t.g0_time < Duration::from_secs(300);
    Line {
        id: 1,
        pass: exact && classic && fast,
        detail: format!(
            "genus-0 d<=8 oracle {exact}, classical {classic}, d_max=400 in {:.1}s (< 300s)",
            secs(t.g0_time)
        ),
    }
}

fn criterion2(t: &Tables) -> Line {
    let oracle = oracle_genus1(&oracle_genus0(6), 6);
    let got = counts(&t.g1, 6);
    let exact = got == oracle[1..];
    let forced = got[0] == 0 && got[1] == 0 && got[2] == 1;
    Line { id: 2, pass: exact && forced, detail: format!("genus-1 d<=6 oracle {exact}, N1,N2,N3 = 0,0,1 {forced}") }
}

fn criterion3(t: &Tables) -> Line {
    let f = Factorials::up_to(t.p3.max_factorial_index());
    let n = |d, p| t.p3.count_with(&f, d, p).expect("integral");
    let values = n(1, 0) == 1 && n(1, 2) == 2 && n(2, 4) == 92 && n(3, 6) == 80160;
    let fast = t.p3_time < Duration::from_secs(600);
    Line {
        id: 3,
        pass: values && fast && t.p3.d_max() == 40,
        detail: format!("P3 classical values {values}, d_max=40 grid in {:.1}s (< 600s)", secs(t.p3_time)),
    }
}

fn criterion4(t: &Tables) -> Line {
    let sandwich = check_p2_sandwich(&t.g0).expect("genus-0 table");
    let stirling = check_stirling(10_000);
    let coarse = check_p3_coarse_bound(&t.p3).expect("P3 table");
    let majorant = check_p3_majorants(&t.p3).expect("P3 table");
    let v = [&sandwich, &stirling, &coarse, &majorant].map(|r| r.violations.len());
    Line {
        id: 4,
        pass: v.iter().all(|&x| x == 0),
        detail: format!(
            "violations: sandwich(d<=400) {}, stirling(d<=1e4) {}, P3 coarse {}, P3 majorant {}",
            v[0], v[1], v[2], v[3]
        ),
    }
}

fn criterion5(t: &Tables, prec: Precision, profile: &SingularityProfile) -> Line {
    let x = &profile.x0;
    let lower = ln_rational(&ExactRational::from((15, 4)), prec);
    let upper = ln_rational(&ExactRational::from(27), prec);
    let bracket = x.value >= lower && x.value <= upper;
    let agree = x.discrepancy() < 1e-6;
    let x200 = solve_x0(&t.g0.truncated(200).expect("truncate"), prec).expect("x0 at d_max 200");
    let change = Float::with_val(PREC_BITS, &x.value - &x200.value).abs();
    let allowed = Float::with_val(PREC_BITS, &x.error_bar + &x200.error_bar);
    let stable = change <= allowed;
    Line {
        id: 5,
        pass: bracket && agree && stable,
        detail: format!(
            "x0 = {} in [ln 15/4, ln 27] {bracket}; estimator gap {:.2e} < 1e-6 {agree}; |x0(400)-x0(200)| = {:.2e} <= {:.2e} {stable}",
            x.value.to_string_radix(10, Some(21)),
            x.discrepancy().to_f64(),
            change.to_f64(),
            allowed.to_f64()
        ),
    }
}

fn criterion6(t: &Tables, profile: &SingularityProfile, prec: Precision) -> Line {
    let a4 = &profile.a[4].value;
    let rel = Float::with_val(PREC_BITS, profile.a4_defect() / a4).abs();
    // F0''(x0)/2 summed from the table, for comparison with the recursion value.
    let x = &profile.x0;
    let series = F0Series::new(&t.g0, prec).expect("series");
    let f2 = series.corrected(&x.value, 2, x.terms, x.fit_terms, x.window).expect("second derivative");
    let from_table = Float::with_val(PREC_BITS, Float::with_val(PREC_BITS, &f2 / 2u32) - a4).abs() / a4;
    let a4_ok = rel < 1e-30;
    let disc = profile.discriminant();
    let disc_ok = disc > 0;
    let parity =
        profile.a.iter().all(|c| c.parity_consistent()) && profile.genus1.b.iter().all(|c| c.parity_consistent());
    let expected = ExactRational::from((-1, 48));
    let residue = profile.genus1.residue == expected && pole_residue() == expected;
    Line {
        id: 6,
        pass: a4_ok && disc_ok && parity && residue,
        detail: format!(
            "a4 relation rel {:.1e} < 1e-30 {a4_ok} (table F0''/2 within {:.1e}); discriminant {:.6} > 0 {disc_ok}; parity ({} a, {} b) {parity}; residue -1/48 {residue}",
            rel.to_f64(),
            Float::with_val(PREC_BITS, from_table).to_f64(),
            disc.to_f64(),
            profile.a.len(),
            profile.genus1.b.len()
        ),
    }
}

fn criterion7(profile: &SingularityProfile, prec: Precision) -> Line {
    let m = 20usize;
    let zs: Vec<Float> = [1e-3, 1e-4, 1e-5].iter().map(|z| Float::with_val(PREC_BITS, -z)).collect();
    let ode = ode_residual(&profile.a, m, &zs, prec).expect("residual");
    let slopes: Vec<f64> = ode.samples.windows(2).map(|w| (w[0].1.to_f64() / w[1].1.to_f64()).log10()).collect();
    let target = (m as f64 - 5.0) / 2.0;
    let ok = slopes.iter().all(|s| (s - target).abs() <= 0.25);
    Line { id: 7, pass: ok, detail: format!("M=20 residual slopes {slopes:.4?}, target {target} +- 0.25") }
}

fn criterion8(t: &Tables, profile: &SingularityProfile, prec: Precision) -> Line {
    let degrees = [100usize, 200, 300];
    let errs: Vec<f64> = degrees
        .iter()
        .map(|&d| {
            let pred = asymptotic_predict(0, profile, d as u64, 6, prec).expect("prediction");
            let exact = Float::with_val(PREC_BITS, t.g0.n(d).unwrap());
            (Float::with_val(PREC_BITS, &pred / &exact) - 1u32).abs().to_f64()
        })
        .collect();
    let dev: Vec<f64> = degrees
        .iter()
        .map(|&d| {
            let n = Float::with_val(PREC_BITS, t.g1.n(d).unwrap());
            let e = Float::with_val(PREC_BITS, &profile.x0.value * d as u32).exp();
            (n * e * (48 * d as u32) - 1u32).to_f64().abs()
        })
        .collect();
    let shown: Vec<String> = errs.iter().map(|e| format!("{e:.2e}")).collect();
    let g0_ok = errs[2] < 1e-3 && strictly_decreasing(&errs);
    let g1_ok = strictly_decreasing(&dev);
    Line {
        id: 8,
        pass: g0_ok && g1_ok,
        detail: format!(
            "genus-0 N=6 rel errors at d=100,200,300 [{}] {g0_ok}; genus-1 |48 d n e^(d x0) - 1| {dev:.4?} {g1_ok}",
            shown.join(", ")
        ),
    }
}

fn criterion9(t: &Tables, profile: &SingularityProfile, prec: Precision) -> Line {
    let b = profile.x0.growth_constant();
    let slope = |table: &CountTable| {
        let seq = Sequence::from_table(table).expect("sequence");
        fit_exponent(&seq, &b, 200..=400, prec).expect("fit").slope.to_f64()
    };
    let (s0, s1) = (slope(&t.g0), slope(&t.g1));
    let ok0 = (s0 + 3.5).abs() <= 0.05;
    let ok1 = (s1 + 1.0).abs() <= 0.1;
    Line {
        id: 9,
        pass: ok0 && ok1,
        detail: format!(
            "slopes over [200,400]: genus 0 {s0:.5} (-3.5 +- 0.05) {ok0}; genus 1 {s1:.5} (-1 +- 0.1) {ok1}"
        ),
    }
}

fn criterion10() -> Line {
    let halves = [(1, 2), (1, 1), (3, 1)];
    let n1s = [(1, 2), (1, 1), (2, 1)];
    let mut failures = Vec::new();
    let mut worst = 0usize;
    for a in halves {
        for k in 0..=3u32 {
            for n1 in n1s {
                let spec = ModelSpec::new(ExactRational::from(a), k, ExactRational::from(n1)).expect("valid model");
                let closed = model_closed_form(&spec, 200);
                let same = closed[..30] == model_recursion(&spec, 30)[..];
                match monotone_from(&Sequence::new(1, closed)).expect("positive") {
                    Some(d) if same => worst = worst.max(d),
                    other => failures.push(format!("{a:?},{k},{n1:?}: d*={other:?} identity={same}")),
                }
            }
        }
    }
    Line {
        id: 10,
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("36 models: finite d* (largest {worst}), closed form = recursion for d<=30")
        } else {
            format!("failures: {}", failures.join("; "))
        },
    }
}

fn gwasym(args: &[&str], cache_dir: &Path) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gwasym"))
        .args(args)
        .env("GWASYM_CACHE_DIR", cache_dir)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn without_runtime(report: &str) -> Value {
    let mut v: Value = serde_json::from_str(report).expect("report is JSON");
    v.as_object_mut().expect("object").remove("runtime");
    v
}

fn criterion11(t: &Tables) -> Line {
    let dir = tempfile::tempdir().expect("temp dir");
    let d = dir.path();
    let mut problems = Vec::new();

    // Round trip of every produced cache kind and format.
    let mut produced = 0;
    for (args, expected) in [
        (vec!["compute", "p2", "--dmax", "60"], t.g0.truncated(60).unwrap()),
        (vec!["compute", "p2", "--genus", "1", "--dmax", "60"], t.g1.truncated(60).unwrap()),
        (vec!["compute", "p3", "--dmax", "12"], t.p3.truncated(12).unwrap()),
    ] {
        for format in [Format::Cache, Format::Csv, Format::Json] {
            let mut full = args.clone();
            let name = format.to_possible_value().expect("named variant");
            full.extend(["--format", name.get_name()]);
            let (code, _, err) = gwasym(&full, d);
            if code != 0 {
                problems.push(format!("{full:?} exited {code}: {err}"));
                continue;
            }
            let file = format!(
                "{}-g{}-d{}.{}",
                expected.target().as_str(),
                expected.genus(),
                expected.d_max(),
                format.extension()
            );
            let path = d.join(file);
            let text = std::fs::read_to_string(&path).expect("cache written");
            match cache::parse(&text) {
                Ok(table) if table == expected && cache::serialize(&table, format) == text => produced += 1,
                Ok(_) => problems.push(format!("{} does not round-trip", path.display())),
                Err(e) => problems.push(format!("{}: {e}", path.display())),
            }
        }
    }

    // Deterministic reports.
    let g0_path = d.join("p2-g0-d60.txt");
    let g0 = g0_path.to_str().unwrap();
    let (_, r1, _) = gwasym(&["bounds", g0], d);
    let (_, r2, _) = gwasym(&["bounds", g0], d);
    let deterministic = without_runtime(&r1) == without_runtime(&r2);
    if !deterministic {
        problems.push("bounds reports differ between runs".into());
    }

    // Exit codes, including forced failures.
    let doubled = {
        let n = t.g0.n(5).unwrap().clone() * 2u32;
        let bad = t.g0.truncated(60).unwrap().with_entry(5, 0, n).unwrap();
        let path = d.join("doubled.txt");
        std::fs::write(&path, cache::serialize(&bad, Format::Cache)).unwrap();
        path
    };
    let missing = d.join("missing.txt");
    let p3_path = d.join("p3-g0-d12.txt");
    let cases: [(&str, Vec<&str>, i32); 5] = [
        ("clean bounds", vec!["bounds", g0], 0),
        ("doubled entry", vec!["bounds", doubled.to_str().unwrap()], 1),
        ("unknown flag", vec!["bounds", g0, "--bogus"], 2),
        ("ray outside grid", vec!["verify", p3_path.to_str().unwrap(), "--suite", "rays", "--ray", "1,3"], 2),
        ("missing cache", vec!["bounds", missing.to_str().unwrap()], 3),
    ];
    let mut codes = Vec::new();
    for (name, args, want) in cases {
        let (code, _, err) = gwasym(&args, d);
        codes.push(code);
        if code != want {
            problems.push(format!("{name}: exit {code}, expected {want}"));
        }
        if want == 1 && !err.contains("FAIL") {
            problems.push(format!("{name}: no violation reported on stderr"));
        }
    }

    Line {
        id: 11,
        pass: problems.is_empty() && produced == 9,
        detail: if problems.is_empty() {
            format!("{produced}/9 caches round-trip bit-exactly; reports deterministic; exit codes {codes:?}")
        } else {
            problems.join("; ")
        },
    }
}

fn main() -> ExitCode {
    let prec = Precision::new(PREC_BITS).expect("valid precision");

    let start = Instant::now();
    let g0 = p2_genus0(400);
    let g0_time = start.elapsed();
    let g1 = p2_genus1(400, &g0).expect("genus-0 table is long enough");
    let start = Instant::now();
    let p3 = p3_genus0(40);
    let p3_time = start.elapsed();
    let tables = Tables { g0, g1, p3, g0_time, p3_time };

    let profile = SingularityProfile::build(&tables.g0, prec, 20, 13).expect("singularity profile");

    let lines = [
        criterion1(&tables),
        criterion2(&tables),
        criterion3(&tables),
        criterion4(&tables),
        criterion5(&tables, prec, &profile),
        criterion6(&tables, &profile, prec),
        criterion7(&profile, prec),
        criterion8(&tables, &profile, prec),
        criterion9(&tables, &profile, prec),
        criterion10(),
        criterion11(&tables),
    ];
    for l in &lines {
        println!("criterion {:>2}: {} | {}", l.id, if l.pass { "PASS" } else { "FAIL" }, l.detail);
    }
    let failed = lines.iter().filter(|l| !l.pass).count();
    println!("acceptance: {} of {} criteria pass", lines.len() - failed, lines.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
