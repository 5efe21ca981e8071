//! Link variables on a region and Wilson loops.

use std::sync::Arc;

use rand::Rng;

use lstring_core::Loop;

use crate::error::GaugeError;
use crate::group::{drift, haar_sample, reunitarize, Group, Mat, C64};
use crate::region::{Region, Step};

#[derive(Clone, Debug)]
pub struct GaugeField {
    group: Group,
    n: usize,
    region: Arc<Region>,
    links: Vec<Mat>,
}

impl GaugeField {
    /// All links equal to the identity.
    pub fn cold(region: Arc<Region>, group: Group, n: usize) -> Result<Self, GaugeError> {
        if n < 2 {
            return Err(GaugeError::SmallN(n));
        }
        let links = vec![Mat::identity(n, n); region.slots()];
        Ok(GaugeField { group, n, region, links })
    }

    /// Independent Haar links.
    pub fn hot<R: Rng + ?Sized>(region: Arc<Region>, group: Group, n: usize, rng: &mut R) -> Result<Self, GaugeError> {
        let mut f = Self::cold(region, group, n)?;
        for &slot in f.region.clone().edges() {
            f.links[slot] = haar_sample(group, n, rng)?;
        }
        Ok(f)
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn region(&self) -> &Arc<Region> {
        &self.region
    }

    pub fn link(&self, slot: usize) -> &Mat {
        &self.links[slot]
    }

    pub fn link_mut(&mut self, slot: usize) -> &mut Mat {
        &mut self.links[slot]
    }

    pub fn set_link(&mut self, slot: usize, q: Mat) {
        self.links[slot] = q;
    }

    /// Ordered product of steps.
    pub fn product(&self, steps: &[Step]) -> Mat {
        let mut m = Mat::identity(self.n, self.n);
        for st in steps {
            let q = &self.links[st.slot];
            m = if st.dagger { &m * q.adjoint() } else { &m * q };
        }
        m
    }

    pub fn steps_of(&self, l: &Loop) -> Result<Vec<Step>, GaugeError> {
        if let Some(d) = l.dim() {
            if d != self.region.dim() {
                return Err(GaugeError::Dimension { loops: d, region: self.region.dim() });
            }
        }
        l.edges().iter().map(|e| self.region.step_of(e)).collect()
    }

    /// W_l = Tr(Q_{e_1}⋯Q_{e_n}); W of the null loop is N.
    pub fn wilson_loop(&self, l: &Loop) -> Result<C64, GaugeError> {
        Ok(self.product(&self.steps_of(l)?).trace())
    }

    pub fn plaquette_trace(&self, p: usize) -> C64 {
        self.product(&self.region.plaquettes()[p]).trace()
    }

    /// Σ_p Re Tr Q_p over P⁺_Λ.
    pub fn action_sum(&self) -> f64 {
        (0..self.region.plaquettes().len()).map(|p| self.plaquette_trace(p).re).sum()
    }

    pub fn max_drift(&self) -> f64 {
        self.region.edges().iter().map(|&s| drift(self.group, &self.links[s])).fold(0.0, f64::max)
    }

    /// Re-project every link whose drift exceeds `tol`; returns (largest drift seen, repairs).
    pub fn repair(&mut self, tol: f64) -> (f64, usize) {
        let mut worst: f64 = 0.0;
        let mut fixed = 0;
        for &s in self.region.clone().edges() {
            let d = drift(self.group, &self.links[s]);
            worst = worst.max(d);
            if d > tol {
                self.links[s] = reunitarize(self.group, &self.links[s]);
                fixed += 1;
            }
        }
        (worst, fixed)
    }
}
