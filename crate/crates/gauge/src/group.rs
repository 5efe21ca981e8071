//! SU(N) and SO(N): Haar sampling, the two-index rotation proposals, and drift repair.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::GaugeError;

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "UPPERCASE")]
pub enum Group {
    #[default]
    SU,
    SO,
}

impl std::str::FromStr for Group {
    type Err = GaugeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "SU" => Ok(Group::SU),
            "SO" => Ok(Group::SO),
            _ => Err(GaugeError::Config(format!("unknown group {s:?}"))),
        }
    }
}

/// Q·diag(r_ii/|r_ii|) from the QR factors of m.
fn phase_fixed_q(m: Mat) -> Mat {
    let n = m.nrows();
    let qr = m.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

pub fn haar_sample<R: Rng + ?Sized>(group: Group, n: usize, rng: &mut R) -> Result<Mat, GaugeError> {
    if n < 2 {
        return Err(GaugeError::SmallN(n));
    }
    let mut normal = || -> f64 { rng.sample(StandardNormal) };
    match group {
        Group::SU => {
            let z = Mat::from_fn(n, n, |_, _| C64::new(normal(), normal()) * std::f64::consts::FRAC_1_SQRT_2);
            let mut q = phase_fixed_q(z);
            let alpha = q.determinant().arg();
            let k = rng.random_range(0..n) as f64;
            q *= C64::from_polar(1.0, (TAU * k - alpha) / n as f64);
            Ok(q)
        }
        Group::SO => {
            let z = Mat::from_fn(n, n, |_, _| C64::new(normal(), 0.0));
            let mut q = phase_fixed_q(z);
            if q.determinant().re < 0.0 {
                q.column_mut(0).neg_mut();
            }
            Ok(q)
        }
    }
}

/// A rotation acting on rows U and V: [[r_UU, r_UV], [r_VU, r_VV]].
#[derive(Clone, Copy, Debug)]
pub struct Rotation {
    pub u: usize,
    pub v: usize,
    pub r: [[C64; 2]; 2],
}

impl Rotation {
    /// SU(N): the complex two-index rotation with random η, ξ = ±1 and uniform θ, φ.
    /// SO(N): a Givens rotation with cos = √(1−ε²), sin = ξε.
    pub fn random<R: Rng + ?Sized>(group: Group, n: usize, eps: f64, rng: &mut R) -> Rotation {
        let u = rng.random_range(0..n);
        let mut v = rng.random_range(0..n - 1);
        if v >= u {
            v += 1;
        }
        let c = (1.0 - eps * eps).sqrt();
        let xi = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let r = match group {
            Group::SU => {
                let eta = if rng.random::<bool>() { 1.0 } else { -1.0 };
                let theta = rng.random::<f64>() * TAU;
                let phi = rng.random::<f64>() * TAU;
                let (st, ct) = theta.sin_cos();
                [
                    [C64::new(c, eps * eta * ct), C64::from_polar(eps * xi * st, phi)],
                    [-C64::from_polar(eps * xi * st, -phi), C64::new(c, -eps * eta * ct)],
                ]
            }
            Group::SO => [
                [C64::new(c, 0.0), C64::new(xi * eps, 0.0)],
                [C64::new(-xi * eps, 0.0), C64::new(c, 0.0)],
            ],
        };
        Rotation { u, v, r }
    }

    pub fn to_matrix(&self, n: usize) -> Mat {
        let mut m = Mat::identity(n, n);
        let idx = [self.u, self.v];
        for a in 0..2 {
            for b in 0..2 {
                m[(idx[a], idx[b])] = self.r[a][b];
            }
        }
        m
    }

    /// The two rows of R·Q that differ from Q.
    pub fn rows(&self, q: &Mat, out_u: &mut [C64], out_v: &mut [C64]) {
        for k in 0..q.ncols() {
            let (a, b) = (q[(self.u, k)], q[(self.v, k)]);
            out_u[k] = self.r[0][0] * a + self.r[0][1] * b;
            out_v[k] = self.r[1][0] * a + self.r[1][1] * b;
        }
    }
}

/// max |Q*Q − I|, with |det Q − 1| and (for SO) the largest imaginary part folded in.
pub fn drift(group: Group, q: &Mat) -> f64 {
    let n = q.nrows();
    let g = q.adjoint() * q;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst = worst.max((q.determinant() - 1.0).norm());
    if group == Group::SO {
        worst = q.iter().fold(worst, |w, z| w.max(z.im.abs()));
    }
    worst
}

/// Project back onto the group: phase-fixed QR, then divide out det^{1/N} (principal root).
pub fn reunitarize(group: Group, q: &Mat) -> Mat {
    let n = q.nrows();
    let mut m = q.clone();
    if group == Group::SO {
        m.iter_mut().for_each(|z| z.im = 0.0);
    }
    let mut out = phase_fixed_q(m);
    let det = out.determinant();
    match group {
        Group::SU => out *= C64::from_polar(1.0, -det.arg() / n as f64),
        Group::SO => {
            if det.re < 0.0 {
                out.column_mut(0).neg_mut();
            }
        }
    }
    out
}
