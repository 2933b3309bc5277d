//! Circular von Mises distribution `VM(μ, κ)`, density ∝ exp(κ cos(θ − μ)).

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::UnitCircle;

use crate::error::{Error, Result};

/// Von Mises sampler using the Best–Fisher wrapped-Cauchy rejection scheme.
#[derive(Clone, Copy, Debug)]
pub struct VonMises {
    mean: f64,
    kappa: f64,
    // Envelope parameter s = (1 + ρ²)/(2ρ); None means uniform.
    s: Option<f64>,
}

impl VonMises {
    pub fn new(mean: f64, kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0) || !kappa.is_finite() || !mean.is_finite() {
            return Err(Error::InvalidSpec(format!("von Mises needs finite mean and kappa >= 0, got ({mean}, {kappa})")));
        }
        let s = if kappa < 1e-8 {
            // exp(κ cos θ) = 1 + O(1e-8): indistinguishable from uniform in double precision sampling
            None
        } else if kappa < 1e-5 {
            // Taylor expansion of the exact s to avoid cancellation
            Some(1.0 / kappa + kappa)
        } else {
            let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
            let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
            Some((1.0 + rho * rho) / (2.0 * rho))
        };
        Ok(VonMises { mean, kappa, s })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

fn wrap(theta: f64) -> f64 {
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t >= PI {
        -PI
    } else {
        t
    }
}

impl VonMises {
    // cos θ of a centred draw and the sign of θ. The envelope variable cos(πU)
    // is the real part of a uniform point on the unit circle; the sign of its
    // imaginary part is independent of it and supplies the sign of θ.
    fn centred_cos<R: Rng + ?Sized>(&self, s: f64, rng: &mut R) -> (f64, bool) {
        loop {
            let [z, sign]: [f64; 2] = UnitCircle.sample(rng);
            let w = (1.0 + s * z) / (s + z);
            let y = self.kappa * (s - w);
            let v: f64 = rng.random();
            if y * (2.0 - y) - v >= 0.0 || (y / v).ln() + 1.0 - y >= 0.0 {
                return (w.clamp(-1.0, 1.0), sign >= 0.0);
            }
        }
    }

    /// `e^{i(θ−μ)}` for a draw `θ`, computed without trigonometric calls.
    /// Consumes the same random numbers as [`Distribution::sample`].
    pub fn sample_phasor<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        let Some(s) = self.s else {
            let [x, y]: [f64; 2] = UnitCircle.sample(rng);
            return Complex64::new(x, y);
        };
        let (w, positive) = self.centred_cos(s, rng);
        let sin = (1.0 - w * w).sqrt();
        Complex64::new(w, if positive { sin } else { -sin })
    }
}

impl Distribution<f64> for VonMises {
    /// Angle in `[−π, π)`.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        wrap(self.mean + self.sample_phasor(rng).arg())
    }
}

/// One draw from `VM(0, κ)`.
pub fn sample_von_mises<R: Rng + ?Sized>(kappa: f64, rng: &mut R) -> Result<f64> {
    Ok(VonMises::new(0.0, kappa)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::special::{bessel_i0, bessel_i1};

    fn draws(kappa: f64, n: usize, seed: u64) -> Vec<f64> {
        let vm = VonMises::new(0.0, kappa).unwrap();
        let mut rng = stream(seed, 0);
        (0..n).map(|_| vm.sample(&mut rng)).collect()
    }

    #[test]
    fn uniform_at_zero_concentration() {
        let n = 100_000;
        let mut x = draws(0.0, n, 1);
        assert!(x.iter().all(|t| (-PI..PI).contains(t)));
        x.sort_by(f64::total_cmp);
        let d = x
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let cdf = (t + PI) / (2.0 * PI);
                (cdf - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - cdf).abs())
            })
            .fold(0.0, f64::max);
        // KS critical value at α = 0.01: 1.628/√n
        assert!(d < 1.628 / (n as f64).sqrt(), "KS statistic {d}");
    }

    #[test]
    fn mean_resultant_matches_bessel_ratio() {
        for (kappa, seed) in [(0.01, 2), (0.64, 3), (4.0, 4)] {
            let n = 200_000;
            let x = draws(kappa, n, seed);
            let cos: Vec<f64> = x.iter().map(|t| t.cos()).collect();
            let mean = cos.iter().sum::<f64>() / n as f64;
            let var = cos.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let target = bessel_i1(kappa) / bessel_i0(kappa);
            assert!((mean - target).abs() < 4.0 * (var / n as f64).sqrt(), "kappa={kappa}: {mean} vs {target}");
        }
        assert!((bessel_i1(0.01) / bessel_i0(0.01) - 0.005).abs() < 1e-6);
    }

    #[test]
    fn symmetric_about_mean() {
        let n = 100_000;
        let x = draws(4.0, n, 5);
        let sin: Vec<f64> = x.iter().map(|t| t.sin()).collect();
        let mean = sin.iter().sum::<f64>() / n as f64;
        let var = sin.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 4.0 * (var / n as f64).sqrt());
    }

    #[test]
    fn small_kappa_branches_are_continuous() {
        // s from the Taylor branch vs the exact formula near the switch.
        let k: f64 = 2e-5;
        let tau = 1.0 + (1.0 + 4.0 * k * k).sqrt();
        let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * k);
        let exact = (1.0 + rho * rho) / (2.0 * rho);
        assert!((exact / (1.0 / k + k) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(VonMises::new(0.0, -1.0).is_err());
        assert!(VonMises::new(0.0, f64::NAN).is_err());
        assert!(sample_von_mises(f64::INFINITY, &mut stream(0, 0)).is_err());
    }
}
