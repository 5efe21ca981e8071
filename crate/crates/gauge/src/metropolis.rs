//! Local Metropolis updates for exp(Nβ Σ_p Re Tr Q_p).

use rand::Rng;

use crate::error::GaugeError;
use crate::field::GaugeField;
use crate::group::{haar_sample, Mat, Rotation, C64};

#[derive(Clone, Debug)]
pub struct Metropolis {
    pub beta: f64,
    /// Proposal width ε ∈ (0, 1).
    pub eps: f64,
    /// Proposals per link visit, each an exact Metropolis step against the same staple.
    pub hits: usize,
}

impl Metropolis {
    pub fn new(beta: f64, eps: f64, hits: usize) -> Self {
        Metropolis { beta, eps, hits: hits.max(1) }
    }

    /// Σ of A over plaquettes through `slot`, where Re Tr Q_p = Re Tr(Q_slot A).
    pub fn staple(field: &GaugeField, slot: usize) -> Mat {
        let n = field.n();
        let region = field.region();
        let mut total = Mat::zeros(n, n);
        for &(p, pos) in region.touching(slot) {
            let steps = &region.plaquettes()[p];
            let rest = [steps[(pos + 1) % 4], steps[(pos + 2) % 4], steps[(pos + 3) % 4]];
            let b = field.product(&rest);
            if steps[pos].dagger {
                total += b.adjoint();
            } else {
                total += b;
            }
        }
        total
    }

    /// One pass over E⁺_Λ; returns the acceptance rate.
    pub fn sweep<R: Rng + ?Sized>(&self, field: &mut GaugeField, rng: &mut R) -> f64 {
        let n = field.n();
        let group = field.group();
        let scale = n as f64 * self.beta;
        let mut ru = vec![C64::new(0.0, 0.0); n];
        let mut rv = vec![C64::new(0.0, 0.0); n];
        let (mut accepted, mut total) = (0usize, 0usize);
        for &slot in field.region().clone().edges() {
            let a = Self::staple(field, slot);
            let q = field.link_mut(slot);
            for _ in 0..self.hits {
                let rot = Rotation::random(group, n, self.eps, rng);
                rot.rows(q, &mut ru, &mut rv);
                // Re Tr((RQ − Q)A) only involves rows U and V
                let mut delta = 0.0;
                for k in 0..n {
                    delta += ((ru[k] - q[(rot.u, k)]) * a[(k, rot.u)]).re;
                    delta += ((rv[k] - q[(rot.v, k)]) * a[(k, rot.v)]).re;
                }
                let ds = scale * delta;
                total += 1;
                if ds >= 0.0 || rng.random::<f64>() < ds.exp() {
                    for k in 0..n {
                        q[(rot.u, k)] = ru[k];
                        q[(rot.v, k)] = rv[k];
                    }
                    accepted += 1;
                }
            }
        }
        if total == 0 {
            1.0
        } else {
            accepted as f64 / total as f64
        }
    }

    /// Independence Metropolis: propose a fresh Haar link, accept with min(1, e^{ΔS}).
    pub fn independence_sweep<R: Rng + ?Sized>(&self, field: &mut GaugeField, rng: &mut R) -> Result<f64, GaugeError> {
        let n = field.n();
        let group = field.group();
        let scale = n as f64 * self.beta;
        let (mut accepted, mut total) = (0usize, 0usize);
        for &slot in field.region().clone().edges() {
            let a = Self::staple(field, slot);
            let prop = haar_sample(group, n, rng)?;
            let old = (field.link(slot) * &a).trace().re;
            let new = (&prop * &a).trace().re;
            let ds = scale * (new - old);
            total += 1;
            if ds >= 0.0 || rng.random::<f64>() < ds.exp() {
                field.set_link(slot, prop);
                accepted += 1;
            }
        }
        Ok(if total == 0 { 1.0 } else { accepted as f64 / total as f64 })
    }

    /// Move ε toward `target` acceptance. Only used during burn-in.
    pub fn tune(&mut self, acceptance: f64, target: f64) {
        self.eps = (self.eps * (acceptance - target).exp()).clamp(1e-3, 0.95);
    }
}
