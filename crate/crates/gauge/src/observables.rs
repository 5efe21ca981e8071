//! Wilson-loop expectations, the finite-N loop equation, factorization and the SO/SU
//! correspondence, all estimated by Monte Carlo.

use std::collections::HashMap;

use serde::Serialize;

use lstring_core::{operation_catalog, Family, Loop, LoopSequence, Sign};

use crate::chain::{run_replicas, ChainRun};
use crate::config::RunConfig;
use crate::error::GaugeError;
use crate::field::GaugeField;
use crate::group::{Group, C64};
use crate::stats::{batch_means, pool, Estimate};

/// Distinct loops measured once per sweep, and the sequences built from them.
#[derive(Default)]
pub struct LoopBank {
    loops: Vec<Loop>,
    index: HashMap<Loop, usize>,
    sequences: Vec<Vec<usize>>,
}

impl LoopBank {
    /// Register a sequence and return its index.
    pub fn add(&mut self, s: &LoopSequence) -> usize {
        let ids = s
            .loops()
            .iter()
            .map(|l| {
                *self.index.entry(l.clone()).or_insert_with(|| {
                    self.loops.push(l.clone());
                    self.loops.len() - 1
                })
            })
            .collect();
        self.sequences.push(ids);
        self.sequences.len() - 1
    }

    pub fn loops(&self) -> &[Loop] {
        &self.loops
    }

    /// φ sample of every registered sequence: Π W_l / N.
    pub fn evaluate(&self, field: &GaugeField, out: &mut Vec<C64>) -> Result<(), GaugeError> {
        let n = field.n() as f64;
        let w = self
            .loops
            .iter()
            .map(|l| field.wilson_loop(l).map(|x| x / n))
            .collect::<Result<Vec<_>, _>>()?;
        out.clear();
        out.extend(self.sequences.iter().map(|ids| ids.iter().fold(C64::new(1.0, 0.0), |acc, &i| acc * w[i])));
        Ok(())
    }
}

fn pooled(runs: &[ChainRun], k: usize) -> Result<Estimate, GaugeError> {
    let parts = runs.iter().map(|r| batch_means(&r.series[k])).collect::<Result<Vec<_>, _>>()?;
    Ok(pool(&parts))
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainSummary {
    pub acceptance: f64,
    pub eps: f64,
    pub max_drift: f64,
    pub repairs: usize,
}

fn summary(runs: &[ChainRun]) -> ChainSummary {
    let k = runs.len() as f64;
    ChainSummary {
        acceptance: runs.iter().map(|r| r.acceptance).sum::<f64>() / k,
        eps: runs.iter().map(|r| r.eps).sum::<f64>() / k,
        max_drift: runs.iter().map(|r| r.max_drift).fold(0.0, f64::max),
        repairs: runs.iter().map(|r| r.repairs).sum(),
    }
}

/// ⟨Π W_{l_r}⟩ / N^n.
pub fn estimate_phi(s: &LoopSequence, cfg: &RunConfig) -> Result<(Estimate, ChainSummary), GaugeError> {
    if s.is_null() {
        return Ok((Estimate::exact(C64::new(1.0, 0.0)), ChainSummary { acceptance: 1.0, eps: 0.0, max_drift: 0.0, repairs: 0 }));
    }
    let region = cfg.region()?;
    if let Some(d) = s.dim() {
        if d != region.dim() {
            return Err(GaugeError::Dimension { loops: d, region: region.dim() });
        }
    }
    for l in s.loops() {
        for e in l.edges() {
            region.step_of(e)?;
        }
    }
    let mut bank = LoopBank::default();
    bank.add(s);
    let runs = run_replicas(cfg, 1, |f, row| {
        let mut v = Vec::with_capacity(1);
        bank.evaluate(f, &mut v)?;
        row[0] = v[0];
        Ok(())
    })?;
    Ok((pooled(&runs, 0)?, summary(&runs)))
}

#[derive(Clone, Debug, Serialize)]
pub struct MasterMc {
    /// (|s| − ℓ(s)/N²) φ_N(s)
    pub lhs: Estimate,
    pub rhs: Estimate,
    pub residual: Estimate,
    pub z_re: f64,
    pub z_im: f64,
    pub terms: usize,
    pub distinct_loops: usize,
    pub chain: ChainSummary,
}

/// The coefficient of φ_N(s') on the right side of the finite-N equation.
fn rhs_coefficient(kind: lstring_core::OpKind, n: f64, beta: f64) -> f64 {
    let sgn = if kind.sign() == Some(Sign::Minus) { 1.0 } else { -1.0 };
    match kind.family() {
        Family::Merger => sgn / (n * n),
        Family::Split => sgn,
        Family::Deform | Family::Expand => sgn * beta / 2.0,
        Family::Inaction => 0.0,
    }
}

/// LHS and RHS of the symmetrized finite-N loop equation at s, estimated on the same
/// samples, with the z-score of their difference.
pub fn master_residual_mc(s: &LoopSequence, cfg: &RunConfig) -> Result<MasterMc, GaugeError> {
    if cfg.group != Group::SU {
        return Err(GaugeError::NeedsSu);
    }
    let region = cfg.region()?;
    region.check_covers(s)?;
    let cat = operation_catalog(s)?;
    let n = cfg.n as f64;
    let mut bank = LoopBank::default();
    let own = bank.add(s);
    let mut null_term = 0.0;
    let mut terms: Vec<(f64, usize)> = Vec::new();
    for en in cat.entries.iter().skip(1) {
        let c = rhs_coefficient(en.op.kind, n, cfg.beta);
        if en.result.is_null() {
            null_term += c;
        } else {
            terms.push((c, bank.add(&en.result)));
        }
    }
    let lhs_coef = s.len() as f64 - s.ell() as f64 / (n * n);
    let runs = run_replicas(cfg, 3, |f, row| {
        let mut phi = Vec::new();
        bank.evaluate(f, &mut phi)?;
        let lhs = phi[own] * lhs_coef;
        let rhs = terms.iter().fold(C64::new(null_term, 0.0), |acc, &(c, i)| acc + phi[i] * c);
        row[0] = lhs;
        row[1] = rhs;
        row[2] = lhs - rhs;
        Ok(())
    })?;
    let residual = pooled(&runs, 2)?;
    Ok(MasterMc {
        lhs: pooled(&runs, 0)?,
        rhs: pooled(&runs, 1)?,
        z_re: residual.z_re(),
        z_im: residual.z_im(),
        residual,
        terms: cat.entries.len() - 1,
        distinct_loops: bank.loops().len(),
        chain: summary(&runs),
    })
}

/// A derived quantity with a delta-method error bar.
#[derive(Clone, Debug, Serialize)]
pub struct Derived {
    pub value: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationPoint {
    pub n: usize,
    pub w: Estimate,
    /// |⟨W_l W_{l⁻¹}⟩/N² − |⟨W_l⟩/N|²|
    pub delta: Derived,
    /// |⟨W_l²⟩/N² − (⟨W_l⟩/N)²|, reported for reference.
    pub holomorphic: Derived,
    pub chain: ChainSummary,
}

fn pool_derived(parts: &[Derived]) -> Derived {
    if parts.len() == 1 || parts.iter().any(|p| p.stderr == 0.0) {
        let k = parts.len() as f64;
        let v = parts.iter().map(|p| p.value).sum::<f64>() / k;
        let s = (parts.iter().map(|p| p.stderr * p.stderr).sum::<f64>()).sqrt() / k;
        return Derived { value: v, stderr: s };
    }
    let w: f64 = parts.iter().map(|p| 1.0 / (p.stderr * p.stderr)).sum();
    let v = parts.iter().map(|p| p.value / (p.stderr * p.stderr)).sum::<f64>() / w;
    Derived { value: v, stderr: (1.0 / w).sqrt() }
}

/// Connected two-point functions of W_l at the N and β of `cfg`.
pub fn factorization_point(l: &Loop, cfg: &RunConfig) -> Result<FactorizationPoint, GaugeError> {
    let n = cfg.n as f64;
    let runs = run_replicas(cfg, 3, |f, row| {
        let w = f.wilson_loop(l)? / n;
        row[0] = w;
        row[1] = C64::new(w.norm_sqr(), 0.0);
        row[2] = w * w;
        Ok(())
    })?;
    let mut deltas = Vec::new();
    let mut holos = Vec::new();
    for r in &runs {
        let k = r.series[0].len() as f64;
        let y = r.series[0].iter().sum::<C64>() / k;
        let x = r.series[1].iter().sum::<C64>() / k;
        let h = r.series[2].iter().sum::<C64>() / k;
        // linearized series whose mean carries the fluctuation of the estimator
        let lin: Vec<C64> = r.series[0]
            .iter()
            .zip(&r.series[1])
            .map(|(yt, xt)| C64::new(xt.re - 2.0 * (y.conj() * yt).re, 0.0))
            .collect();
        let hlin: Vec<C64> = r.series[0].iter().zip(&r.series[2]).map(|(yt, ht)| ht - 2.0 * y * yt).collect();
        let d = x.re - y.norm_sqr();
        deltas.push(Derived { value: d, stderr: batch_means(&lin)?.stderr_re });
        holos.push(Derived { value: (h - y * y).norm(), stderr: batch_means(&hlin)?.stderr });
    }
    let delta = pool_derived(&deltas);
    Ok(FactorizationPoint {
        n: cfg.n,
        w: pooled(&runs, 0)?,
        delta: Derived { value: delta.value.abs(), stderr: delta.stderr },
        holomorphic: pool_derived(&holos),
        chain: summary(&runs),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Correspondence {
    pub n: usize,
    pub beta: f64,
    /// ⟨W_l⟩/N in SU(N) at 2β
    pub su: Estimate,
    /// ⟨W_l⟩/N in SO(N) at β
    pub so: Estimate,
    pub deficit: f64,
    pub stderr: f64,
    /// 3σ + 1/N²
    pub budget: f64,
    pub consistent: bool,
}

/// SU(N) at coupling 2β against SO(N) at coupling β.
pub fn correspondence(l: &Loop, cfg: &RunConfig) -> Result<Correspondence, GaugeError> {
    let s = LoopSequence::single(l.clone());
    let su_cfg = RunConfig { group: Group::SU, beta: 2.0 * cfg.beta, ..cfg.clone() };
    let so_cfg = RunConfig { group: Group::SO, seed: cfg.seed.wrapping_add(1), ..cfg.clone() };
    let (su, _) = estimate_phi(&s, &su_cfg)?;
    let (so, _) = estimate_phi(&s, &so_cfg)?;
    let deficit = (su.mean_re - so.mean_re).abs();
    let stderr = su.stderr_re.hypot(so.stderr_re);
    let n = cfg.n as f64;
    let budget = 3.0 * stderr + 1.0 / (n * n);
    Ok(Correspondence { n: cfg.n, beta: cfg.beta, su, so, deficit, stderr, budget, consistent: deficit <= budget })
}
