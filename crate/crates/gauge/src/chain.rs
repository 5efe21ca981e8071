//! Seeded Markov chains with burn-in, ε tuning, drift repair and per-sweep measurement.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{RunConfig, Start, REPAIR_TOL};
use crate::error::GaugeError;
use crate::field::GaugeField;
use crate::group::C64;
use crate::metropolis::Metropolis;
use crate::region::Region;

/// Output of one replica: one time series per observable.
#[derive(Clone, Debug)]
pub struct ChainRun {
    pub series: Vec<Vec<C64>>,
    pub acceptance: f64,
    pub eps: f64,
    /// Largest drift seen before any repair.
    pub max_drift: f64,
    pub repairs: usize,
}

/// Replica `r` uses stream `r` of the ChaCha8 generator seeded by `seed`.
pub fn replica_rng(seed: u64, replica: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica as u64);
    rng
}

pub fn run_chain<F>(
    cfg: &RunConfig,
    region: Arc<Region>,
    replica: usize,
    observables: usize,
    measure: &F,
) -> Result<ChainRun, GaugeError>
where
    F: Fn(&GaugeField, &mut [C64]) -> Result<(), GaugeError>,
{
    let mut rng = replica_rng(cfg.seed, replica);
    let mut field = match cfg.start {
        Start::Cold => GaugeField::cold(region, cfg.group, cfg.n)?,
        Start::Hot => GaugeField::hot(region, cfg.group, cfg.n, &mut rng)?,
    };
    let mut mc = Metropolis::new(cfg.beta, cfg.epsilon, cfg.hits());
    let (mut max_drift, mut repairs) = (0.0f64, 0usize);
    let mut window = 0.0;
    for t in 0..cfg.burn_in {
        window += mc.sweep(&mut field, &mut rng);
        if cfg.tune && (t + 1) % 20 == 0 {
            mc.tune(window / 20.0, cfg.target_acceptance);
            window = 0.0;
        }
        if (t + 1) % cfg.check_every == 0 {
            let (d, k) = field.repair(REPAIR_TOL);
            max_drift = max_drift.max(d);
            repairs += k;
        }
    }
    let mut series = vec![Vec::with_capacity(cfg.sweeps); observables];
    let mut row = vec![C64::new(0.0, 0.0); observables];
    let mut acc = 0.0;
    for t in 0..cfg.sweeps {
        acc += mc.sweep(&mut field, &mut rng);
        if (t + 1) % cfg.check_every == 0 {
            let (d, k) = field.repair(REPAIR_TOL);
            max_drift = max_drift.max(d);
            repairs += k;
        }
        measure(&field, &mut row)?;
        for (s, v) in series.iter_mut().zip(&row) {
            s.push(*v);
        }
    }
    Ok(ChainRun {
        series,
        acceptance: if cfg.sweeps > 0 { acc / cfg.sweeps as f64 } else { 1.0 },
        eps: mc.eps,
        max_drift,
        repairs,
    })
}

/// All replicas, in parallel, returned in replica order.
pub fn run_replicas<F>(cfg: &RunConfig, observables: usize, measure: F) -> Result<Vec<ChainRun>, GaugeError>
where
    F: Fn(&GaugeField, &mut [C64]) -> Result<(), GaugeError> + Sync,
{
    let region = cfg.region()?;
    (0..cfg.replicas)
        .into_par_iter()
        .map(|r| run_chain(cfg, region.clone(), r, observables, &measure))
        .collect()
}
