//! Batch-means error bars, integrated autocorrelation, replica pooling and a two-sample
//! Kolmogorov–Smirnov test.

use serde::Serialize;

use crate::error::GaugeError;
use crate::group::C64;

/// A Monte Carlo mean with batch-means error bars (separately for Re and Im).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean_re: f64,
    pub mean_im: f64,
    pub stderr: f64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    pub n_samples: usize,
    pub batch_size: usize,
    pub tau: f64,
}

impl Estimate {
    pub fn exact(v: C64) -> Self {
        Estimate {
            mean_re: v.re,
            mean_im: v.im,
            stderr: 0.0,
            stderr_re: 0.0,
            stderr_im: 0.0,
            n_samples: 0,
            batch_size: 0,
            tau: 0.0,
        }
    }

    pub fn mean(&self) -> C64 {
        C64::new(self.mean_re, self.mean_im)
    }

    /// mean.re / stderr_re (0 when both vanish).
    pub fn z_re(&self) -> f64 {
        z(self.mean_re, self.stderr_re)
    }

    pub fn z_im(&self) -> f64 {
        z(self.mean_im, self.stderr_im)
    }
}

fn z(m: f64, s: f64) -> f64 {
    if s > 0.0 {
        m / s
    } else if m == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(m)
    }
}

/// Integrated autocorrelation time with Sokal's self-consistent window (c = 6).
pub fn integrated_tau(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.5;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let d: Vec<f64> = xs.iter().map(|x| x - mean).collect();
    let c0 = d.iter().map(|x| x * x).sum::<f64>() / n as f64;
    // constant series up to rounding
    let scale = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if c0 <= (1e-12 * scale).powi(2) {
        return 0.5;
    }
    let mut tau = 0.5;
    for t in 1..n / 2 {
        let ct = d[..n - t].iter().zip(&d[t..]).map(|(a, b)| a * b).sum::<f64>() / n as f64;
        tau += ct / c0;
        if t as f64 >= 6.0 * tau {
            break;
        }
    }
    tau.max(0.5)
}

/// Minimum number of batches accepted by [`batch_means`].
pub const MIN_BATCHES: usize = 10;

/// Standard error of the mean from batches of length b.
fn batch_stderr(xs: &[f64], b: usize) -> f64 {
    let nb = xs.len() / b;
    let means: Vec<f64> = (0..nb).map(|i| xs[i * b..(i + 1) * b].iter().sum::<f64>() / b as f64).collect();
    let m = means.iter().sum::<f64>() / nb as f64;
    let var = means.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (nb - 1) as f64;
    (var / nb as f64).sqrt()
}

/// Batch means with batch length ≥ 20 τ_int, over the largest whole number of batches.
pub fn batch_means(xs: &[C64]) -> Result<Estimate, GaugeError> {
    let re: Vec<f64> = xs.iter().map(|z| z.re).collect();
    let im: Vec<f64> = xs.iter().map(|z| z.im).collect();
    let tau = integrated_tau(&re).max(integrated_tau(&im));
    let b = ((20.0 * tau).ceil() as usize).max(1);
    if xs.len() / b < MIN_BATCHES {
        return Err(GaugeError::InsufficientSamples { samples: xs.len(), batch: b });
    }
    let used = (xs.len() / b) * b;
    let sr = batch_stderr(&re[..used], b);
    let si = batch_stderr(&im[..used], b);
    let n = xs.len() as f64;
    Ok(Estimate {
        mean_re: re.iter().sum::<f64>() / n,
        mean_im: im.iter().sum::<f64>() / n,
        stderr: sr.hypot(si),
        stderr_re: sr,
        stderr_im: si,
        n_samples: xs.len(),
        batch_size: b,
        tau,
    })
}

fn pool_part(parts: &[(f64, f64)]) -> (f64, f64) {
    if parts.iter().any(|&(_, s)| s == 0.0) {
        let m = parts.iter().map(|p| p.0).sum::<f64>() / parts.len() as f64;
        return (m, 0.0);
    }
    let w: f64 = parts.iter().map(|&(_, s)| 1.0 / (s * s)).sum();
    let m = parts.iter().map(|&(x, s)| x / (s * s)).sum::<f64>() / w;
    (m, (1.0 / w).sqrt())
}

/// Inverse-variance pooling across replicas, Re and Im separately.
pub fn pool(estimates: &[Estimate]) -> Estimate {
    assert!(!estimates.is_empty());
    if estimates.len() == 1 {
        return estimates[0].clone();
    }
    let (mr, sr) = pool_part(&estimates.iter().map(|e| (e.mean_re, e.stderr_re)).collect::<Vec<_>>());
    let (mi, si) = pool_part(&estimates.iter().map(|e| (e.mean_im, e.stderr_im)).collect::<Vec<_>>());
    Estimate {
        mean_re: mr,
        mean_im: mi,
        stderr: sr.hypot(si),
        stderr_re: sr,
        stderr_im: si,
        n_samples: estimates.iter().map(|e| e.n_samples).sum(),
        batch_size: estimates.iter().map(|e| e.batch_size).max().unwrap_or(0),
        tau: estimates.iter().map(|e| e.tau).fold(0.0, f64::max),
    }
}

/// Two-sample KS statistic and its asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    (d, kolmogorov_q(lambda))
}

/// Q_KS(λ) = 2 Σ (−1)^{k−1} e^{−2k²λ²}.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..200 {
        let t = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { t } else { -t };
        if t < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
