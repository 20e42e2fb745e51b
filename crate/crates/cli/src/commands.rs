use std::path::{Path, PathBuf};
use std::time::Instant;

use gwasym::bounds::{
    check_integrality, check_ordering_f0, check_p2_sandwich, check_p3_coarse_bound, check_p3_majorants,
    check_recomputation, check_stirling, BoundReport,
};
use gwasym::empirics::{analyze, monotone_from, p3_ray, AsymptoticReport, EmpiricsError, Sequence};
use gwasym::numerics::{ln_rational, ExactRational, Factorials, Precision};
use gwasym::recursions::{
    model_closed_form, p2_genus0_with_progress, p2_genus1_with_progress, p3_genus0_with_progress, CountTable,
    ModelSpec, Target,
};
use gwasym::singularity::{
    asymptotic_predict, ode_residual, pole_residue, solve_x0, SingularityError, SingularityProfile,
};
use rug::Float;
use serde_json::{json, Value};

use crate::cache::{self, Format};
use crate::report::{coeff, real, real_digits, ReportDocument};
use crate::{CliError, Outcome, Suite, TargetArg};

fn load(path: &Path) -> Result<CountTable, CliError> {
    Ok(cache::read(path)?)
}

fn precision(bits: u32) -> Result<Precision, CliError> {
    Precision::new(bits).map_err(|e| CliError::Usage(e.to_string()))
}

fn progress(label: &'static str, d_max: usize) -> impl Fn(usize) + Sync {
    move |d| {
        if d % 10 == 0 || d == d_max {
            eprintln!("{label}: d = {d}/{d_max}");
        }
    }
}

fn singularity_error(e: SingularityError) -> CliError {
    match e {
        SingularityError::BracketFailure(msg) => CliError::Computation(format!(
            "bracket failure: {msg}\nhint: compute a genus-0 P2 table with --dmax 200 or more (400 recommended)"
        )),
        other => CliError::Computation(other.to_string()),
    }
}

fn table_summary(table: &CountTable) -> Value {
    json!({ "target": table.target().as_str(), "genus": table.genus(), "dmax": table.d_max() })
}

pub fn compute(
    argv: Vec<String>,
    target: TargetArg,
    genus: u32,
    d_max: usize,
    out: Option<PathBuf>,
    format: Format,
) -> Result<Outcome, CliError> {
    let start = Instant::now();
    if d_max == 0 {
        return Err(CliError::Usage("--dmax must be at least 1".into()));
    }
    let table = match (target, genus) {
        (TargetArg::P2, 0) => p2_genus0_with_progress(d_max, &progress("p2 genus 0", d_max)),
        (TargetArg::P2, 1) => {
            let g0 = p2_genus0_with_progress(d_max, &progress("p2 genus 0", d_max));
            p2_genus1_with_progress(d_max, &g0, &progress("p2 genus 1", d_max))
                .map_err(|e| CliError::Computation(e.to_string()))?
        }
        (TargetArg::P3, 0) => p3_genus0_with_progress(d_max, &progress("p3 genus 0", d_max)),
        (TargetArg::P3, g) => {
            return Err(CliError::Usage(format!(
                "unsupported combination: p3 genus {g} (only genus 0 has a recursion)"
            )))
        }
        (TargetArg::P2, g) => {
            return Err(CliError::Usage(format!("unsupported combination: p2 genus {g} (genus 0 or 1)")))
        }
    };
    let path = out.unwrap_or_else(|| cache::default_path(table.target(), table.genus(), d_max, format));
    cache::write_atomic(&path, &cache::serialize(&table, format))?;

    let f = Factorials::up_to(table.max_factorial_index());
    let (mut best_at, mut best) = ((1, 0), rug::Integer::new());
    for (d, p, _) in table.entries() {
        if let Some(n) = table.count_with(&f, d, p) {
            if n > best {
                best = n;
                best_at = (d, p);
            }
        }
    }
    let largest = match table.target() {
        Target::P2 => json!({ "d": best_at.0, "N": best.to_string() }),
        Target::P3 => json!({ "d": best_at.0, "p": best_at.1, "N": best.to_string() }),
    };
    let report = ReportDocument::new(
        argv,
        json!({ "target": table.target().as_str(), "genus": genus, "dmax": d_max, "format": format!("{format:?}").to_lowercase() }),
        json!({ "path": path.display().to_string(), "entries": table.len(), "largest_count": largest }),
        json!({ "dmax": d_max, "cache_version": cache::CACHE_VERSION }),
        start.elapsed(),
    );
    Ok(Outcome { report, passed: true, notes: vec![] })
}

fn bound_json(r: &BoundReport) -> Value {
    json!({
        "bound_id": r.bound_id,
        "pass": r.pass(),
        "d_range": [r.d_range.start(), r.d_range.end()],
        "checked": r.checked,
        "violations": r.violations.len(),
        "first_violation": r.first_violation().map(|v| v.to_string()),
    })
}

pub fn bounds(argv: Vec<String>, path: &Path) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let table = load(path)?;
    let err = |e: gwasym::bounds::BoundsError| CliError::Computation(e.to_string());
    let mut reports = Vec::new();
    match (table.target(), table.genus()) {
        (Target::P2, 0) => {
            reports.push(check_p2_sandwich(&table).map_err(err)?);
            reports.push(check_stirling(table.d_max()));
            // e^x < 15/4 lies inside the disc of convergence.
            let prec = Precision::DEFAULT;
            let limit = ln_rational(&ExactRational::from((15, 4)), prec);
            let samples: Vec<Float> = [-1.0, 0.0, 1.0, 1.3].iter().map(|&x| Float::with_val(prec.bits(), x)).collect();
            reports.push(check_ordering_f0(&table, &samples, &limit, table.d_max()).map_err(err)?);
        }
        (Target::P3, _) => {
            reports.push(check_p3_coarse_bound(&table).map_err(err)?);
            reports.push(check_p3_majorants(&table).map_err(err)?);
        }
        _ => {}
    }
    reports.push(check_integrality(&table));
    reports.push(check_recomputation(&table));

    let passed = reports.iter().all(BoundReport::pass);
    let notes = reports
        .iter()
        .filter_map(|r| {
            r.first_violation().map(|v| format!("FAIL {} ({} violations): {v}", r.bound_id, r.violations.len()))
        })
        .collect();
    let report = ReportDocument::new(
        argv,
        json!({ "cache": path.display().to_string() }),
        json!({ "all_pass": passed, "checks": reports.iter().map(bound_json).collect::<Vec<_>>() }),
        json!({ "table": table_summary(&table), "arithmetic": "exact rational" }),
        start.elapsed(),
    );
    Ok(Outcome { report, passed, notes })
}

fn require_p2_genus0(table: &CountTable, what: &str) -> Result<(), CliError> {
    if table.target() != Target::P2 || table.genus() != 0 {
        return Err(CliError::Usage(format!(
            "{what} needs a genus-0 P2 cache, got {} genus {}",
            table.target(),
            table.genus()
        )));
    }
    Ok(())
}

pub fn singularity(
    argv: Vec<String>,
    path: &Path,
    bits: u32,
    coeffs: usize,
    terms: Option<usize>,
) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let prec = precision(bits)?;
    if coeffs < 6 {
        return Err(CliError::Usage("--coeffs must be at least 6".into()));
    }
    let full = load(path)?;
    require_p2_genus0(&full, "singularity")?;
    let terms = terms.unwrap_or(full.d_max());
    let table = full
        .truncated(terms)
        .map_err(|_| CliError::Usage(format!("--terms {terms} exceeds the cache (dmax {})", full.d_max())))?;

    let x0 = solve_x0(&table, prec).map_err(singularity_error)?;
    let max_b = coeffs.saturating_sub(7);
    let profile = SingularityProfile::build_at(&table, x0, prec, coeffs, max_b).map_err(singularity_error)?;
    let x = &profile.x0;

    let p = bits;
    let a4 = &profile.a[4].value;
    let tol = (Float::with_val(p, a4.abs_ref()) * 10u32) >> p;
    let a4_ok = Float::with_val(p, profile.a4_defect().abs_ref()) <= tol;
    let agree = x.discrepancy() < 1e-6;
    let expected_residue = ExactRational::from((-1, 48));
    let residue_ok = pole_residue() == expected_residue && profile.genus1.residue == expected_residue;

    let kept = coeffs.min(profile.a.len());
    let zs: Vec<Float> = [1e-3, 1e-4, 1e-5].iter().map(|t| Float::with_val(p, -t)).collect();
    let ode = ode_residual(&profile.a, kept, &zs, prec).map_err(singularity_error)?;
    let slopes: Vec<f64> = ode.samples.windows(2).map(|w| (w[0].1.to_f64() / w[1].1.to_f64()).log10()).collect();

    let parity_ok =
        profile.a.iter().all(|c| c.parity_consistent()) && profile.genus1.b.iter().all(|c| c.parity_consistent());
    let lower = ln_rational(&ExactRational::from((15, 4)), prec);
    let upper = ln_rational(&ExactRational::from(27), prec);
    let in_bracket = x.value >= lower && x.value <= upper;

    let results = json!({
        "x0": {
            "root_solve": real(&x.value),
            "error_bar": real_digits(&x.error_bar, 6),
            "raw_upper_bound": real(&x.raw_upper),
            "fit_defect": real_digits(&x.fit_defect, 6),
            "truncation_defect": real_digits(&x.truncation_defect, 6),
            "ratio_extrapolation": real(&x.by_ratio),
            "ratio_error": real_digits(&x.ratio_error, 6),
            "discrepancy": real_digits(&x.discrepancy(), 6),
            "estimators_agree_1e-6": agree,
            "within_bracket": in_bracket,
            "growth_constant": real(&x.growth_constant()),
        },
        "a0": real(&profile.a0),
        "a2": real(&profile.a2),
        "a4": real(a4),
        "a4_relation": { "defect": real_digits(&profile.a4_defect(), 6), "check": if a4_ok { "pass" } else { "fail" } },
        "a5_abs": real(&profile.a[5].magnitude()),
        "discriminant": real(&profile.discriminant()),
        "coefficients": profile.a.iter().take(coeffs + 1).map(coeff).collect::<Vec<_>>(),
        "genus1": {
            "residue": profile.genus1.residue.to_string(),
            "residue_check": if residue_ok { "pass" } else { "fail" },
            "b": profile.genus1.b.iter().map(coeff).collect::<Vec<_>>(),
        },
        "parity_check": if parity_ok { "pass" } else { "fail" },
        "ode_residual": {
            "kept": kept,
            "expected_slope": (kept as f64 - 5.0) / 2.0,
            "samples": ode.samples.iter().map(|(z, r)| json!({ "z": real_digits(z, 6), "residual": real_digits(r, 6) })).collect::<Vec<_>>(),
            "slopes": slopes,
        },
    });
    let passed = a4_ok && agree && residue_ok && parity_ok && in_bracket;
    let report = ReportDocument::new(
        argv,
        json!({ "cache": path.display().to_string(), "prec": bits, "coeffs": coeffs, "terms": terms }),
        results,
        json!({
            "table": table_summary(&full),
            "terms": terms,
            "precision_bits": bits,
            "a_truncation": profile.a.len() - 1,
            "b_truncation": profile.genus1.max_index(),
            "tail_fit_terms": x.fit_terms,
            "tail_window": x.window,
            "bisection_iterations": x.iterations,
            "ratio_order": 6,
        }),
        start.elapsed(),
    );
    Ok(Outcome { report, passed, notes: vec![] })
}

fn empirics_error(e: EmpiricsError) -> CliError {
    match e {
        EmpiricsError::RayOutOfRange { .. } | EmpiricsError::BadRay | EmpiricsError::NotASequence => {
            CliError::Usage(e.to_string())
        }
        other => CliError::Computation(other.to_string()),
    }
}

fn growth_json(r: &AsymptoticReport) -> Value {
    json!({
        "sequence": r.sequence_id,
        "b": real(&r.b_estimate.b),
        "b_error": real_digits(&r.b_estimate.error, 6),
        "ratio_order": r.b_estimate.order,
        "exponent": r.exponent_fit.as_ref().map(|f| json!({
            "slope": real_digits(&f.slope, 12),
            "residual": real_digits(&f.residual, 6),
            "window": [f.window.start(), f.window.end()],
        })),
        "monotone_from": r.monotone_from,
    })
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

pub fn verify(
    argv: Vec<String>,
    paths: &[PathBuf],
    suite: Suite,
    bits: u32,
    rays: &[(usize, usize)],
    models: &[String],
    model_dmax: usize,
) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let prec = precision(bits)?;
    let tables = paths.iter().map(|p| load(p)).collect::<Result<Vec<_>, _>>()?;
    let (results, passed, notes) = match suite {
        Suite::Asymptotics => asymptotics(&tables, prec)?,
        Suite::Monotone => monotone(&tables, models, model_dmax)?,
        Suite::Rays => ray_tables(&tables, rays, prec)?,
    };
    let report = ReportDocument::new(
        argv,
        json!({
            "caches": paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            "suite": suite.as_str(),
            "prec": bits,
        }),
        results,
        json!({
            "tables": tables.iter().map(table_summary).collect::<Vec<_>>(),
            "precision_bits": bits,
            "model_dmax": (suite == Suite::Monotone && !models.is_empty()).then_some(model_dmax),
        }),
        start.elapsed(),
    );
    Ok(Outcome { report, passed, notes })
}

const GENUS0_ORDERS: [u32; 5] = [4, 6, 8, 10, 12];
const GENUS1_ORDERS: [u32; 8] = [0, 1, 2, 4, 6, 8, 10, 12];
/// Order at which the genus-0 error must fall with d. Higher orders reach
/// the floor set by the uncertainty of x0, which grows like d.
const CHECK_ORDER: u32 = 6;

type SuiteResult = (Value, bool, Vec<String>);

fn asymptotics(tables: &[CountTable], prec: Precision) -> Result<SuiteResult, CliError> {
    let g0 = tables
        .iter()
        .find(|t| t.target() == Target::P2 && t.genus() == 0)
        .ok_or_else(|| CliError::Usage("the asymptotics suite needs a genus-0 P2 cache".into()))?;
    let g1 = tables.iter().find(|t| t.target() == Target::P2 && t.genus() == 1);
    let x0 = solve_x0(g0, prec).map_err(singularity_error)?;
    let max_b = 2 * *GENUS0_ORDERS.last().unwrap() as usize;
    let profile = SingularityProfile::build_at(g0, x0, prec, max_b + 7, max_b).map_err(singularity_error)?;
    let wp = prec.bits();
    let mut notes = Vec::new();

    let mut out = json!({ "x0": real(&profile.x0.value), "x0_error_bar": real_digits(&profile.x0.error_bar, 6) });
    let mut passed = true;
    for (genus, table) in [(0u32, Some(g0)), (1, g1)] {
        let Some(table) = table else { continue };
        let top = table.d_max().min(g0.d_max());
        let degrees: Vec<usize> = (1..=top / 100).map(|k| 100 * k).collect();
        let mut rows = Vec::new();
        let mut check = Vec::new();
        let mut best = (f64::INFINITY, 0u32);
        let orders: &[u32] = if genus == 0 { &GENUS0_ORDERS } else { &GENUS1_ORDERS };
        for &n in orders {
            let mut errs = Vec::new();
            for &d in &degrees {
                let pred = asymptotic_predict(genus, &profile, d as u64, n, prec).map_err(singularity_error)?;
                let exact = Float::with_val(wp, table.n(d).expect("degree in table"));
                let rel = (Float::with_val(wp, &pred / &exact) - 1u32).abs().to_f64();
                errs.push(rel);
            }
            if let Some(&last) = errs.last() {
                if last < best.0 {
                    best = (last, n);
                }
            }
            if n == CHECK_ORDER {
                check = errs.clone();
            }
            rows.push(json!({ "order": n, "relative_error": errs }));
        }
        let decreasing = strictly_decreasing(&check);
        let mut entry = json!({
            "degrees": degrees,
            "errors": rows,
            "check_order": CHECK_ORDER,
            "decreasing_in_d": decreasing,
            "best_order_at_largest_d": best.1,
        });
        if genus == 0 && !decreasing {
            passed = false;
            notes.push(format!("FAIL genus 0: error at N={CHECK_ORDER} not decreasing in d: {check:?}"));
        }
        let seq = Sequence::from_table(table).map_err(empirics_error)?;
        let window = 50.max(table.d_max() / 2)..=table.d_max();
        let order = if genus == 0 { 6 } else { 2 };
        let growth = analyze(&format!("p2-g{genus}"), &seq, order, window, prec).map_err(empirics_error)?;
        entry["growth"] = growth_json(&growth);
        if genus == 0 {
            if let Some(&e) = check.last() {
                let ok = e < 1e-3;
                passed &= ok;
                entry["largest_d_below_1e-3"] = json!(ok);
            }
        } else {
            let dev: Vec<f64> = degrees
                .iter()
                .map(|&d| {
                    let n = Float::with_val(wp, table.n(d).expect("degree in table"));
                    let e = Float::with_val(wp, Float::with_val(wp, &profile.x0.value * d as u32).exp_ref());
                    (n * e * (48 * d as u32) - 1u32).to_f64()
                })
                .collect();
            let abs: Vec<f64> = dev.iter().map(|v| v.abs()).collect();
            let ok = strictly_decreasing(&abs);
            passed &= ok;
            if !ok {
                notes.push(format!("FAIL genus 1: |48 d n e^(d x0) - 1| not decreasing: {dev:?}"));
            }
            entry["pole_deviation"] = json!(dev);
            entry["pole_deviation_decreasing"] = json!(ok);
        }
        out[format!("genus{genus}")] = entry;
    }
    Ok((out, passed, notes))
}

fn parse_model(s: &str) -> Result<ModelSpec, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || CliError::Usage(format!("expected --model a,k,n1, got `{s}`"));
    let [a, k, n1] = parts.as_slice() else {
        return Err(bad());
    };
    let rat = |t: &str| -> Result<ExactRational, CliError> {
        let (n, d) = t.split_once('/').unwrap_or((t, "1"));
        let n: rug::Integer = n.parse().map_err(|_| bad())?;
        let d: rug::Integer = d.parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        Ok(ExactRational::from((n, d)))
    };
    let k: u32 = k.parse().map_err(|_| bad())?;
    ModelSpec::new(rat(a)?, k, rat(n1)?).map_err(|e| CliError::Usage(e.to_string()))
}

fn monotone(tables: &[CountTable], models: &[String], model_dmax: usize) -> Result<SuiteResult, CliError> {
    if tables.is_empty() && models.is_empty() {
        return Err(CliError::Usage("the monotone suite needs a cache or --model".into()));
    }
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    let mut passed = true;
    for t in tables {
        let seq = Sequence::from_table(t).map_err(empirics_error)?;
        let d = monotone_from(&seq).map_err(empirics_error)?;
        notes.push(format!("p2 genus {}: d* = {}", t.genus(), d.map_or("not observed".into(), |d| d.to_string())));
        rows.push(json!({
            "sequence": format!("p2-g{}", t.genus()),
            "checked": [seq.first_index, seq.last_index()],
            "monotone_from": d,
            "empirical": true,
        }));
    }
    for m in models {
        let spec = parse_model(m)?;
        let seq = Sequence::new(1, model_closed_form(&spec, model_dmax));
        let d = monotone_from(&seq).map_err(empirics_error)?;
        match d {
            Some(d) => notes.push(format!("model {m}: d* = {d}")),
            None => {
                passed = false;
                notes.push(format!("FAIL model {m}: no threshold within d <= {model_dmax}"));
            }
        }
        rows.push(json!({
            "sequence": format!("model a={} k={} n1={}", spec.a(), spec.k(), spec.n1()),
            "checked": [1, model_dmax],
            "monotone_from": d,
            "empirical": false,
        }));
    }
    Ok((json!({ "sequences": rows }), passed, notes))
}

fn ray_tables(tables: &[CountTable], rays: &[(usize, usize)], prec: Precision) -> Result<SuiteResult, CliError> {
    let table = tables
        .iter()
        .find(|t| t.target() == Target::P3)
        .ok_or_else(|| CliError::Usage("the rays suite needs a P3 cache".into()))?;
    let rays: Vec<(usize, usize)> = if rays.is_empty() { vec![(1, 1), (2, 2)] } else { rays.to_vec() };
    let reports =
        rays.iter().map(|&(a, b)| p3_ray(table, a, b, prec).map_err(empirics_error)).collect::<Result<Vec<_>, _>>()?;
    let longest = reports.iter().map(|r| r.roots.last().map_or(0, |x| x.0)).max().unwrap_or(0);
    let side_by_side: Vec<Value> = (1..=longest)
        .map(|d| {
            let mut row = json!({ "d": d });
            for r in &reports {
                let v = r.roots.iter().find(|(e, _)| *e == d).map(|(_, x)| real_digits(x, 12));
                row[format!("{},{}", r.alpha, r.beta)] = json!(v);
            }
            row
        })
        .collect();
    let notes = reports
        .iter()
        .map(|r| format!("ray ({},{}): {} points, {}", r.alpha, r.beta, r.roots.len(), r.verdict.as_str()))
        .collect();
    let summary: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "ray": [r.alpha, r.beta],
                "points": r.roots.len(),
                "skipped": r.skipped,
                "last_difference": r.differences.last().map(|x| real_digits(x, 6)),
                "verdict": r.verdict.as_str(),
            })
        })
        .collect();
    Ok((json!({ "rays": summary, "roots": side_by_side }), true, notes))
}
