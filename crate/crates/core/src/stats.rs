//! Sample statistics used to compare Monte Carlo output with analytic values.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Asymptotic Kolmogorov critical coefficient at the 1% level.
pub const KS_COEFF_1PCT: f64 = 1.628;

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

impl MeanEstimate {
    /// `(mean - target) / std_error`; infinite when the error is zero and the values differ.
    pub fn z_score(&self, target: f64) -> f64 {
        z_score(self.mean, target, self.std_error)
    }
}

pub fn z_score(estimate: f64, target: f64, std_error: f64) -> f64 {
    let d = estimate - target;
    if d == 0.0 {
        0.0
    } else if std_error > 0.0 {
        d / std_error
    } else {
        f64::INFINITY.copysign(d)
    }
}

/// Mean and standard error of the mean (unbiased sample variance).
pub fn mean_estimate(xs: &[f64]) -> Result<MeanEstimate> {
    let n = xs.len();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    Ok(MeanEstimate {
        mean,
        std_error: (ss / ((n - 1) as f64 * n as f64)).sqrt(),
        n,
    })
}

/// Moments of a complex sample with jackknife standard errors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub mean: Complex64,
    /// `E|z|^2`.
    pub second_abs: f64,
    /// `E|z - E z|^2` (plug-in estimator, equal to `second_abs - |mean|^2`).
    pub variance: f64,
    /// Standard error of the complex mean, `sqrt(E|z - m|^2 / n)`.
    pub std_error_mean: f64,
    pub std_error_var: f64,
    pub std_error_second_abs: f64,
    pub n_samples: usize,
}

impl MomentEstimate {
    pub fn from_samples(zs: &[Complex64]) -> Result<Self> {
        let n = zs.len();
        if n < 2 {
            return Err(Error::InvalidArgument("need at least two samples".into()));
        }
        let nf = n as f64;
        let mean = zs.iter().sum::<Complex64>() / nf;
        let second_abs = zs.iter().map(|z| z.norm_sqr()).sum::<f64>() / nf;
        let q: f64 = zs.iter().map(|z| (z - mean).norm_sqr()).sum();
        let variance = q / nf;

        // Leave-one-out variances are V_(i) = Q/(n-1) - n |w_i|^2 / (n-1)^2 with
        // w_i = z_i - m, so the jackknife spread reduces to that of |w_i|^2.
        let w2_mean = q / nf;
        let w2_ss: f64 = zs
            .iter()
            .map(|z| {
                let d = (z - mean).norm_sqr() - w2_mean;
                d * d
            })
            .sum();
        let std_error_var = (nf / ((nf - 1.0).powi(3)) * w2_ss).sqrt();

        let s2_ss: f64 = zs
            .iter()
            .map(|z| {
                let d = z.norm_sqr() - second_abs;
                d * d
            })
            .sum();
        Ok(MomentEstimate {
            mean,
            second_abs,
            variance,
            std_error_mean: (q / (nf * (nf - 1.0))).sqrt(),
            std_error_var,
            std_error_second_abs: (s2_ss / (nf * (nf - 1.0))).sqrt(),
            n_samples: n,
        })
    }
}

/// Outcome of a Kolmogorov-Smirnov test at the 1% level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub critical_1pct: f64,
}

impl KsResult {
    pub fn passes(&self) -> bool {
        self.statistic <= self.critical_1pct
    }
}

fn sorted(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.is_empty() {
        return Err(Error::InvalidArgument("empty sample".into()));
    }
    if xs.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidArgument("sample contains NaN".into()));
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Two-sample KS statistic `sup |F_a - F_b|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    let a = sorted(a)?;
    let b = sorted(b)?;
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(KsResult {
        statistic: d,
        critical_1pct: KS_COEFF_1PCT * ((n + m) / (n * m)).sqrt(),
    })
}

/// One-sample KS statistic against a continuous CDF.
pub fn ks_one_sample(xs: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsResult> {
    let xs = sorted(xs)?;
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    Ok(KsResult {
        statistic: d,
        critical_1pct: KS_COEFF_1PCT / n.sqrt(),
    })
}

/// Equal-width 1-D histogram on `[lo, hi)`; values outside are counted separately.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram1D {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub n_outside: u64,
}

impl Histogram1D {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if !(lo < hi) || bins == 0 {
            return Err(Error::InvalidArgument(format!(
                "bad histogram range [{lo}, {hi}) with {bins} bins"
            )));
        }
        Ok(Histogram1D {
            lo,
            hi,
            counts: vec![0; bins],
            n_outside: 0,
        })
    }

    pub fn from_samples(xs: &[f64], lo: f64, hi: f64, bins: usize) -> Result<Self> {
        let mut h = Self::new(lo, hi, bins)?;
        xs.iter().for_each(|&x| h.add(x));
        Ok(h)
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn bin_of(&self, x: f64) -> Option<usize> {
        if !(x >= self.lo && x <= self.hi) {
            return None;
        }
        let k = ((x - self.lo) / self.bin_width()) as usize;
        Some(k.min(self.bins() - 1))
    }

    pub fn add(&mut self, x: f64) {
        match self.bin_of(x) {
            Some(k) => self.counts[k] += 1,
            None => self.n_outside += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.n_outside
    }

    /// Fraction of all samples in each bin.
    pub fn probabilities(&self) -> Vec<f64> {
        let t = self.total().max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / t).collect()
    }

    pub fn bin_edges(&self, k: usize) -> (f64, f64) {
        let w = self.bin_width();
        (self.lo + k as f64 * w, self.lo + (k + 1) as f64 * w)
    }
}

/// `(1/2) sum |p_k - q_k|` for two probability vectors on the same bins.
pub fn total_variation(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Total variation between a histogram and the bin masses of a reference CDF.
pub fn total_variation_to_cdf(h: &Histogram1D, cdf: impl Fn(f64) -> f64) -> f64 {
    let p = h.probabilities();
    let tail = (cdf(h.lo) + 1.0 - cdf(h.hi)).max(0.0);
    let inside: f64 = (0..h.bins())
        .map(|k| {
            let (a, b) = h.bin_edges(k);
            (p[k] - (cdf(b) - cdf(a))).abs()
        })
        .sum();
    0.5 * (inside + (h.n_outside as f64 / h.total().max(1) as f64 - tail).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn mean_estimate_small() {
        let m = mean_estimate(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_abs_diff_eq!(m.mean, 2.5);
        // sample sd = sqrt(5/3), se = sd / 2
        assert_abs_diff_eq!(m.std_error, (5.0f64 / 3.0).sqrt() / 2.0, epsilon = 1e-15);
        assert!(mean_estimate(&[1.0]).is_err());
    }

    #[test]
    fn moment_estimate_matches_direct_jackknife() {
        let zs: Vec<Complex64> = (0..9)
            .map(|k| Complex64::new((k as f64 * 0.7).sin() + 1.0, (k * k) as f64 * 0.1))
            .collect();
        let est = MomentEstimate::from_samples(&zs).unwrap();
        assert_abs_diff_eq!(est.variance, est.second_abs - est.mean.norm_sqr(), epsilon = 1e-12);

        let n = zs.len();
        let plug_in = |s: &[Complex64]| {
            let m = s.iter().sum::<Complex64>() / s.len() as f64;
            s.iter().map(|z| (z - m).norm_sqr()).sum::<f64>() / s.len() as f64
        };
        let loo: Vec<f64> = (0..n)
            .map(|i| {
                let s: Vec<Complex64> = zs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, z)| *z).collect();
                plug_in(&s)
            })
            .collect();
        let bar = loo.iter().sum::<f64>() / n as f64;
        let jk = ((n - 1) as f64 / n as f64 * loo.iter().map(|v| (v - bar).powi(2)).sum::<f64>()).sqrt();
        assert_abs_diff_eq!(est.std_error_var, jk, epsilon = 1e-12);
    }

    #[test]
    fn constant_sample_has_zero_spread() {
        let zs = vec![Complex64::new(1.0, 0.0); 10];
        let est = MomentEstimate::from_samples(&zs).unwrap();
        assert_eq!(est.variance, 0.0);
        assert_eq!(est.std_error_mean, 0.0);
        assert_eq!(z_score(1.0, 1.0, 0.0), 0.0);
        assert!(z_score(1.0, 2.0, 0.0).is_infinite());
    }

    #[test]
    fn ks_identical_and_disjoint() {
        let a: Vec<f64> = (0..100).map(|k| k as f64).collect();
        assert_eq!(ks_two_sample(&a, &a).unwrap().statistic, 0.0);
        let b: Vec<f64> = (0..100).map(|k| 1000.0 + k as f64).collect();
        let r = ks_two_sample(&a, &b).unwrap();
        assert_abs_diff_eq!(r.statistic, 1.0);
        assert!(!r.passes());
    }

    #[test]
    fn ks_one_sample_grid_is_near_zero() {
        let n = 1000;
        let xs: Vec<f64> = (0..n).map(|k| (k as f64 + 0.5) / n as f64).collect();
        let r = ks_one_sample(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(r.statistic, 0.5 / n as f64, epsilon = 1e-12);
        assert!(r.passes());
    }

    #[test]
    fn histogram_and_tv() {
        let h = Histogram1D::from_samples(&[0.1, 0.2, 0.6, 1.0, 2.0], 0.0, 1.0, 2).unwrap();
        assert_eq!(h.counts, vec![2, 2]);
        assert_eq!(h.n_outside, 1);
        assert_abs_diff_eq!(total_variation(&[0.5, 0.5], &[1.0, 0.0]).unwrap(), 0.5);
        let u = Histogram1D::from_samples(&[0.25, 0.75], 0.0, 1.0, 2).unwrap();
        assert_abs_diff_eq!(total_variation_to_cdf(&u, |x| x.clamp(0.0, 1.0)), 0.0);
    }
}
