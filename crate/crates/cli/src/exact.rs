//! Commands on exact rationals: cores, catalogs, enumeration, coefficients and series.

use anyhow::{anyhow, bail, Result};
use num_traits::Zero;
use serde_json::{json, Value};

use lstring_core::coeff::{check_bounds, coefficient_bound, CoeffRecord};
use lstring_core::enumerate::{enumerate_vanishing, sums_exact, sums_over_trajectories, CatalogCache, EnumConfig, TrajectorySums};
use lstring_core::fixtures::{worked_states, worked_trajectory};
use lstring_core::ops::catalog_lines;
use lstring_core::series::{f_value, master_residual_limit, parse_rational, reduced_residual, to_f64};
use lstring_core::{operation_catalog, LoopSequence, OpKind, SymbolicWeight, Trajectory};

use crate::{cached_table, parse_words, save_table, CoeffArgs, EnumerateArgs, Outcome, SeriesArgs, Table, VerifyArgs};

fn outcome(passed: bool, summary: String, result: Value, warnings: Vec<String>) -> Outcome {
    Outcome { passed, summary, result, provenance: Value::Null, warnings, tables: Vec::new() }
}

fn dim_of(s: &LoopSequence) -> usize {
    s.dim().unwrap_or(2)
}

pub fn core(words: &str, dim: Option<usize>) -> Result<Outcome> {
    let (s, warnings) = parse_words(words, dim)?;
    let stats = s.stats();
    let result = json!({
        "sequence": s.to_string(),
        "loops": s.loops().iter().map(|l| l.to_string()).collect::<Vec<_>>(),
        "stats": stats,
        "dim": s.dim(),
    });
    let summary = format!("{s}  |s|={} #s={} ι={} ℓ={}", stats.len, stats.size, stats.index, stats.ell);
    Ok(outcome(true, summary, result, warnings))
}

pub fn catalog(words: &str, dim: Option<usize>) -> Result<Outcome> {
    let (s, warnings) = parse_words(words, dim)?;
    let cat = operation_catalog(&s)?;
    let counts: serde_json::Map<String, Value> = OpKind::ALL
        .iter()
        .map(|&k| (format!("{k:?}"), json!(cat.count(k))))
        .collect();
    let lines = catalog_lines(&cat);
    let summary = format!("{} operations on {s}", lines.len());
    let result = json!({ "sequence": s.to_string(), "counts": counts, "entries": lines });
    Ok(outcome(true, summary, result, warnings))
}

fn sums_json(t: &TrajectorySums) -> Value {
    json!({
        "count": t.count,
        "signed": t.signed.to_string(),
        "absolute": t.absolute.to_string(),
        "max_splits": t.max_splits,
        "split_bound_ok": t.split_bound_ok,
    })
}

fn trajectory_json(t: &Trajectory) -> Value {
    json!({
        "states": t.states().iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "ops": t.ops().iter().map(|o| format!("{:?}", o.kind)).collect::<Vec<_>>(),
        "weight": t.weight().to_string(),
    })
}

pub fn enumerate(args: &EnumerateArgs, dim: Option<usize>) -> Result<Outcome> {
    let (s, warnings) = parse_words(&args.words, dim)?;
    let cfg = EnumConfig {
        max_trajectories: args.max_trajectories,
        include_zero_weight: args.include_zero_weight,
        ..Default::default()
    };
    let cache = CatalogCache::new();
    let exact = [args.a, args.b, args.c, args.d].iter().any(Option::is_some);
    if exact && (args.imax.is_some() || args.k.is_some()) {
        bail!("give either --a/--b/--c/--d or --imax/--k, not both");
    }
    let (sums, mode, list) = if exact {
        let (a, b, c, d) = (args.a.unwrap_or(0), args.b.unwrap_or(0), args.c.unwrap_or(0), args.d.unwrap_or(0));
        let sums = sums_exact(&s, a, b, c, d, &cfg, &cache)?;
        let list = if args.list {
            Some(enumerate_vanishing(&s, a, b, c, d, &cfg)?.iter().map(trajectory_json).collect::<Vec<_>>())
        } else {
            None
        };
        (sums, json!({ "a": a, "b": b, "c": c, "d": d }), list)
    } else {
        if args.list {
            bail!("--list needs exact counts --a/--b/--c/--d");
        }
        let (i, k) = (args.imax.unwrap_or(0), args.k.unwrap_or(0));
        (sums_over_trajectories(i, k, &s, &cfg, &cache)?, json!({ "i": i, "k": k }), None)
    };
    let summary = format!("{} trajectories, Σw = {}, Σ|w| = {}", sums.count, sums.signed, sums.absolute);
    let mut result = json!({ "sequence": s.to_string(), "budget": mode, "sums": sums_json(&sums) });
    if let Some(l) = list {
        result["trajectories"] = Value::Array(l);
    }
    Ok(outcome(sums.split_bound_ok, summary, result, warnings))
}

pub fn coeff(args: &CoeffArgs, dim: Option<usize>) -> Result<Outcome> {
    let (s, warnings) = parse_words(&args.words, dim)?;
    let d = dim_of(&s);
    let table = cached_table()?;
    let mut csv = Table::new("coefficients", &["i", "k", "a", "b", "a_f64", "b_f64", "bound_ok"]);
    let mut rows = Vec::new();
    let mut all_ok = true;
    for k in 0..=args.k {
        for i in 0..=args.imax {
            let a = table.a(i as i64, k as i64, &s);
            let b = table.b(i as i64, k as i64, &s);
            let ok = check_bounds(&a, &b, &coefficient_bound(i, k, &s, d));
            all_ok &= ok;
            csv.push([
                i.to_string(),
                k.to_string(),
                a.to_string(),
                b.to_string(),
                to_f64(&a).to_string(),
                to_f64(&b).to_string(),
                ok.to_string(),
            ]);
            let mut rec = serde_json::to_value(CoeffRecord::new(i, k, &s, Some(&a), Some(&b)))?;
            rec["bound_ok"] = json!(ok);
            rows.push(rec);
        }
    }
    save_table(&table)?;
    let summary = format!("{} entries for {s}, bounds {}", rows.len(), if all_ok { "hold" } else { "VIOLATED" });
    let mut out = outcome(all_ok, summary, json!({ "sequence": s.to_string(), "table": rows }), warnings);
    out.tables.push(csv);
    Ok(out)
}

fn beta_arg(text: &str) -> Result<num_rational::BigRational> {
    parse_rational(text).ok_or_else(|| anyhow!("cannot read β = {text:?} as an exact number"))
}

pub fn series(args: &SeriesArgs, dim: Option<usize>) -> Result<Outcome> {
    let (s, mut warnings) = parse_words(&args.words, dim)?;
    let beta = beta_arg(&args.beta)?;
    let table = cached_table()?;
    let v = f_value(&table, args.k, &s, &beta, args.imax, dim_of(&s));
    save_table(&table)?;
    if !v.certified {
        warnings.push(format!("β = {} lies outside the certified radius; the tail bound is infinite", args.beta));
    }
    let mut csv = Table::new("series", &["i", "a", "a_f64", "term_f64"]);
    let b = to_f64(&beta);
    for (i, a) in v.coefficients.iter().enumerate() {
        let af = to_f64(a);
        csv.push([i.to_string(), a.to_string(), af.to_string(), (af * b.powi(i as i32)).to_string()]);
    }
    let summary = format!("f_{}({s}) = {:e} ± {:e} (certified: {})", 2 * args.k, v.value, v.tail_bound, v.certified);
    let result = json!({
        "sequence": s.to_string(),
        "series": v.report(),
        "coefficients": v.coefficients.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    });
    let mut out = outcome(true, summary, result, warnings);
    out.tables.push(csv);
    Ok(out)
}

pub fn verify_master(args: &VerifyArgs, dim: Option<usize>) -> Result<Outcome> {
    if args.figure7 {
        return worked();
    }
    let words = args.words.as_deref().expect("clap requires words without --figure7");
    let (s, warnings) = parse_words(words, dim)?;
    let beta = beta_arg(&args.beta)?;
    let table = cached_table()?;
    let r = master_residual_limit(&table, &s, args.k, &beta, args.imax, dim_of(&s));
    let mut passed = r.lower_orders_vanish() && r.top_matches() && r.within_budget();
    let mut result = json!({
        "sequence": s.to_string(),
        "k": args.k,
        "beta": beta.to_string(),
        "i_max": args.imax,
        "polynomial": r.polynomial.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "predicted_top": r.predicted_top.to_string(),
        "residual": r.residual.to_string(),
        "residual_f64": r.residual_f64,
        "tail_budget": r.tail_budget,
        "lower_orders_vanish": r.lower_orders_vanish(),
        "top_matches": r.top_matches(),
        "within_budget": r.within_budget(),
    });
    if args.reduced {
        let rr = reduced_residual(&table, &s, args.imax);
        let ok = rr.polynomial.iter().all(Zero::is_zero) && rr.expansion_sum.iter().all(Zero::is_zero);
        passed &= ok;
        result["reduced"] = json!({
            "polynomial": rr.polynomial.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "expansion_sum": rr.expansion_sum.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "vanishes": ok,
        });
    }
    save_table(&table)?;
    let summary = format!(
        "residual {:e} (budget {:e}), orders ≤ {} vanish: {}, top order matches: {}",
        r.residual_f64,
        r.tail_budget,
        args.imax,
        r.lower_orders_vanish(),
        r.top_matches()
    );
    Ok(outcome(passed, summary, result, warnings))
}

fn worked() -> Result<Outcome> {
    let t = worked_trajectory();
    let expected = SymbolicWeight::from_ratio(-1, 226_492_416_000, 7);
    let w = t.weight();
    let states_ok = t.states() == worked_states().as_slice();
    let c = t.counts();
    let passed = w == expected && states_ok && t.is_vanishing();
    let result = json!({
        "trajectory": trajectory_json(&t),
        "expected_weight": expected.to_string(),
        "states_match": states_ok,
        "counts": c,
    });
    Ok(outcome(passed, format!("worked trajectory weight {w} (expected {expected})"), result, Vec::new()))
}
