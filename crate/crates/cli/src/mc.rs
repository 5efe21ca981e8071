//! Monte Carlo commands.

use std::fs;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use lstring_core::LoopSequence;
use lstring_gauge::{correspondence, estimate_phi, factorization_point, master_residual_mc, Boundary, Provenance, RunConfig, Start};

use crate::checks::{expansion_check, ladder_steps};
use crate::{cached_table, parse_words, save_table, McArgs, McEstimateArgs, McVerifyArgs, Outcome, Table};

fn parse_box(text: &str, dim: usize) -> Result<Vec<i32>> {
    let v = text
        .split(['x', ','])
        .map(|t| t.trim().parse::<i32>())
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("bad --box {text:?}"))?;
    Ok(if v.len() == 1 { vec![v[0]; dim] } else { v })
}

/// File configuration (if any), then flags, then the dimension of the loops.
pub fn run_config(args: &McArgs, s: &LoopSequence, dim: Option<usize>) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            RunConfig::from_toml(&text)?
        }
        None => RunConfig::default(),
    };
    let d = dim.or(s.dim()).unwrap_or(cfg.dimension);
    if d != cfg.dimension {
        cfg.dimension = d;
        cfg.extent = Vec::new();
    }
    if let Some(b) = &args.extent {
        cfg.extent = parse_box(b, d)?;
    }
    if let Some(b) = &args.boundary {
        cfg.boundary = match b.to_ascii_lowercase().as_str() {
            "free" => Boundary::Free,
            "periodic" => Boundary::Periodic,
            _ => bail!("unknown boundary {b:?}"),
        };
    }
    if let Some(g) = args.group {
        cfg.group = g;
    }
    macro_rules! set {
        ($($f:ident => $t:ident),*) => {$( if let Some(v) = args.$f { cfg.$t = v; } )*};
    }
    set!(n => n, beta => beta, sweeps => sweeps, burn_in => burn_in, replicas => replicas, seed => seed, epsilon => epsilon);
    if args.hits.is_some() {
        cfg.hits = args.hits;
    }
    if args.hot {
        cfg.start = Start::Hot;
    }
    Ok(cfg.validated()?)
}

fn provenance(cfg: &RunConfig) -> Value {
    serde_json::to_value(Provenance::new(cfg)).expect("provenance serializes")
}

pub fn estimate(args: &McEstimateArgs, dim: Option<usize>) -> Result<Outcome> {
    let (s, warnings) = parse_words(&args.mc.words, dim)?;
    let cfg = run_config(&args.mc, &s, dim)?;
    let (result, passed, summary) = match args.imax {
        None => {
            let (e, chain) = estimate_phi(&s, &cfg)?;
            let summary = format!("φ_{}({s}) = {:.6} ± {:.6}", cfg.n, e.mean_re, e.stderr_re);
            (json!({ "sequence": s.to_string(), "estimate": e, "chain": chain, "config": cfg }), true, summary)
        }
        Some(i_max) => {
            let table = cached_table()?;
            let c = expansion_check(&s, &cfg, i_max, &table)?;
            save_table(&table)?;
            let summary = format!(
                "φ_{}({s}) = {:.6} ± {:.6}, series {:.6}, deviation {:.2e} ≤ budget {:.2e}: {}",
                cfg.n, c.phi.mean_re, c.phi.stderr_re, c.series.value, c.deviation, c.budget, c.passed
            );
            (json!({ "sequence": s.to_string(), "check": c, "config": cfg }), c.passed, summary)
        }
    };
    Ok(Outcome { passed, summary, result, provenance: provenance(&cfg), warnings, tables: Vec::new() })
}

pub fn verify(args: &McVerifyArgs, dim: Option<usize>) -> Result<Outcome> {
    let (s, warnings) = parse_words(&args.mc.words, dim)?;
    let cfg = run_config(&args.mc, &s, dim)?;
    if let Some(list) = &args.ladder {
        return ladder(list, &s, cfg, warnings);
    }
    let m = master_residual_mc(&s, &cfg)?;
    let passed = m.z_re.abs() <= 3.0 && m.z_im.abs() <= 3.0;
    let summary = format!(
        "LHS {:.6} RHS {:.6} residual {:.2e} ± {:.2e}, z = {:.2} (im {:.2}), {} terms",
        m.lhs.mean_re, m.rhs.mean_re, m.residual.mean_re, m.residual.stderr_re, m.z_re, m.z_im, m.terms
    );
    let result = json!({ "sequence": s.to_string(), "master": m, "config": cfg });
    Ok(Outcome { passed, summary, result, provenance: provenance(&cfg), warnings, tables: Vec::new() })
}

fn single_loop(s: &LoopSequence) -> Result<&lstring_core::Loop> {
    match s.loops() {
        [l] => Ok(l),
        _ => bail!("this command takes a single loop, got {} components", s.size()),
    }
}

fn ladder(list: &str, s: &LoopSequence, cfg: RunConfig, warnings: Vec<String>) -> Result<Outcome> {
    let ns = list
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("bad --ladder {list:?}"))?;
    let l = single_loop(s)?;
    let mut points = Vec::new();
    let mut csv = Table::new(
        "ladder",
        &["N", "w_re", "w_stderr", "delta", "delta_stderr", "holomorphic", "holomorphic_stderr", "acceptance"],
    );
    for &n in &ns {
        let c = RunConfig { n, ..cfg.clone() }.validated()?;
        let p = factorization_point(l, &c)?;
        csv.push([
            n.to_string(),
            p.w.mean_re.to_string(),
            p.w.stderr_re.to_string(),
            p.delta.value.to_string(),
            p.delta.stderr.to_string(),
            p.holomorphic.value.to_string(),
            p.holomorphic.stderr.to_string(),
            p.chain.acceptance.to_string(),
        ]);
        points.push(p);
    }
    let steps = ladder_steps(&points);
    let passed = steps.iter().all(|&b| b);
    let summary = points
        .iter()
        .map(|p| format!("N={} Δ={:.2e}±{:.1e}", p.n, p.delta.value, p.delta.stderr))
        .collect::<Vec<_>>()
        .join(", ")
        + if passed { " (strictly decreasing)" } else { " (NOT resolved as decreasing)" };
    let result = json!({ "sequence": s.to_string(), "points": points, "decreasing": steps, "config": cfg });
    Ok(Outcome { passed, summary, result, provenance: provenance(&cfg), warnings, tables: vec![csv] })
}

pub fn compare(args: &McArgs, dim: Option<usize>) -> Result<Outcome> {
    let (s, warnings) = parse_words(&args.words, dim)?;
    let cfg = run_config(args, &s, dim)?;
    let c = correspondence(single_loop(&s)?, &cfg)?;
    let summary = format!(
        "SU(2β) {:.6} ± {:.6}, SO(β) {:.6} ± {:.6}, |difference| {:.2e} ≤ {:.2e}: {}",
        c.su.mean_re, c.su.stderr_re, c.so.mean_re, c.so.stderr_re, c.deficit, c.budget, c.consistent
    );
    let result = json!({ "sequence": s.to_string(), "comparison": c, "config": cfg });
    Ok(Outcome { passed: c.consistent, summary, result, provenance: provenance(&cfg), warnings, tables: Vec::new() })
}
