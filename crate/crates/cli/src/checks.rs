//! Budgeted comparisons between Monte Carlo estimates and the exact series.

use anyhow::{anyhow, Result};
use serde::Serialize;

use lstring_core::coeff::CoeffTable;
use lstring_core::series::{f_value, ln_magnitude_bound, parse_rational, SeriesReport};
use lstring_core::LoopSequence;
use lstring_gauge::observables::{ChainSummary, FactorizationPoint};
use lstring_gauge::{estimate_phi, Estimate, RunConfig};

/// φ_N(s) against the truncated f_0(s) series.
#[derive(Clone, Debug, Serialize)]
pub struct ExpansionCheck {
    pub n: usize,
    pub phi: Estimate,
    pub chain: ChainSummary,
    pub series: SeriesReport,
    pub deviation: f64,
    /// (2^{15} d)^{|s|} / N², the bound on the f_2 term.
    pub f2_budget: f64,
    /// 3σ + tail + f2_budget
    pub budget: f64,
    pub passed: bool,
}

/// Exact rational for the shortest decimal that round-trips `x`.
pub fn exact_beta(x: f64) -> Result<num_rational::BigRational> {
    parse_rational(&format!("{x:e}")).ok_or_else(|| anyhow!("β = {x} is not finite"))
}

pub fn expansion_check(s: &LoopSequence, cfg: &RunConfig, i_max: u32, table: &CoeffTable) -> Result<ExpansionCheck> {
    let d = cfg.dimension;
    let (phi, chain) = estimate_phi(s, cfg)?;
    let v = f_value(table, 0, s, &exact_beta(cfg.beta)?, i_max, d);
    let n2 = (cfg.n * cfg.n) as f64;
    let f2_budget = ln_magnitude_bound(1, s, d).exp() / n2;
    let budget = 3.0 * phi.stderr_re + v.tail_bound + f2_budget;
    let deviation = (phi.mean_re - v.value).abs();
    Ok(ExpansionCheck {
        n: cfg.n,
        passed: deviation <= budget,
        phi,
        chain,
        series: v.report(),
        deviation,
        f2_budget,
        budget,
    })
}

/// For each consecutive pair, whether Δ drops by more than the combined error bar.
pub fn ladder_steps(points: &[FactorizationPoint]) -> Vec<bool> {
    points
        .windows(2)
        .map(|w| w[0].delta.value - w[1].delta.value > w[0].delta.stderr.hypot(w[1].delta.stderr))
        .collect()
}
