//! Continuous complex-P sampling with von Mises nonclassical phases (VCP).
//!
//! Each occupied input mode carries a classical phase `φ ~ U(−π, π)` and a
//! nonclassical phase `θ ~ VM(0, r²)`. The amplitudes are
//! `α = r·e^{i(φ+θ/2)}` and `β = r·e^{−i(φ−θ/2)}`, and the complex weight of
//! a single-photon mode is `Ω = I₀(r²)/r² · e^{i(r² sin θ − θ)}`. Empty modes
//! sit at the origin with unit weight.
//!
//! An `N`-photon max-order run at `r = 0.1` has `|Ω| ≈ 100^N`, which
//! overflows near `N ≈ 154`. The estimator therefore never forms `Ω` on its
//! own: the `r` factors of `Ω` and of each output number `n_k = α_k β_k` are
//! collected into one real prefactor `I₀(r²)^N · r^{−2(N−|σ′|)}` computed in
//! log space, and the per-sample product only involves unit-modulus phases.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::UnitCircle;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimate::{Ensemble, EstimateResult, Method, PairwiseSum};
use crate::exact::validate_modes;
use crate::matrix::ComplexMatrix;
use crate::networks::UnitaryMatrix;
use crate::rng::stream;
use crate::special::ln_bessel_i0;
use crate::von_mises::VonMises;

/// Default contour radius for maximum-order correlations.
pub const DEFAULT_RADIUS_MAX_ORDER: f64 = 0.1;
/// Default contour radius for lower-order correlations.
pub const DEFAULT_RADIUS_LOW_ORDER: f64 = 0.8;

#[derive(Clone, Debug, PartialEq)]
pub struct VcpConfig {
    pub radius: f64,
    /// Input photon number per mode, each 0 or 1.
    pub occupancy: Vec<u8>,
}

impl VcpConfig {
    pub fn new(radius: f64, occupancy: Vec<u8>) -> Result<Self> {
        let cfg = VcpConfig { radius, occupancy };
        cfg.validate()?;
        Ok(cfg)
    }

    /// One photon in every one of `m` modes.
    pub fn all_occupied(m: usize, radius: f64) -> Result<Self> {
        Self::new(radius, vec![1; m])
    }

    /// One photon in each listed mode of an `m`-mode network.
    pub fn from_inputs(m: usize, inputs: &[usize], radius: f64) -> Result<Self> {
        validate_modes(m, inputs, "input")?;
        let mut occupancy = vec![0; m];
        for &j in inputs {
            occupancy[j] = 1;
        }
        Self::new(radius, occupancy)
    }

    fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::InvalidSpec(format!("contour radius must be finite and > 0, got {}", self.radius)));
        }
        if let Some(n) = self.occupancy.iter().find(|&&n| n > 1) {
            return Err(Error::InvalidSpec(format!("input occupancy must be 0 or 1, got {n}")));
        }
        Ok(())
    }

    pub fn kappa(&self) -> f64 {
        self.radius * self.radius
    }

    pub fn occupied(&self) -> Vec<usize> {
        (0..self.occupancy.len()).filter(|&k| self.occupancy[k] == 1).collect()
    }

    pub fn photons(&self) -> usize {
        self.occupancy.iter().map(|&n| n as usize).sum()
    }
}

/// One weighted phase-space sample.
#[derive(Clone, Debug)]
pub struct VcpSample {
    pub classical_phases: Vec<f64>,
    pub nonclassical_phases: Vec<f64>,
    pub alpha: Vec<Complex64>,
    pub beta: Vec<Complex64>,
    /// `ln |Ω|`.
    pub log_weight_magnitude: f64,
    /// `arg Ω`, unwrapped.
    pub weight_phase: f64,
}

impl VcpSample {
    /// Builds the sample for given phases. Entries for empty modes are ignored
    /// and stored as zero.
    pub fn from_phases(cfg: &VcpConfig, classical: &[f64], nonclassical: &[f64]) -> Result<Self> {
        cfg.validate()?;
        let m = cfg.occupancy.len();
        if classical.len() != m || nonclassical.len() != m {
            return Err(Error::InvalidDimension(format!(
                "{} and {} phases for {m} modes",
                classical.len(),
                nonclassical.len()
            )));
        }
        let r = cfg.radius;
        let kappa = cfg.kappa();
        let zero = Complex64::new(0.0, 0.0);
        let mut sample = VcpSample {
            classical_phases: vec![0.0; m],
            nonclassical_phases: vec![0.0; m],
            alpha: vec![zero; m],
            beta: vec![zero; m],
            log_weight_magnitude: 0.0,
            weight_phase: 0.0,
        };
        let per_mode_log = ln_bessel_i0(kappa) - 2.0 * r.ln();
        for k in cfg.occupied() {
            let (phi, theta) = (classical[k], nonclassical[k]);
            sample.classical_phases[k] = phi;
            sample.nonclassical_phases[k] = theta;
            sample.alpha[k] = Complex64::from_polar(r, phi + theta / 2.0);
            sample.beta[k] = Complex64::from_polar(r, -(phi - theta / 2.0));
            sample.log_weight_magnitude += per_mode_log;
            sample.weight_phase += kappa * theta.sin() - theta;
        }
        Ok(sample)
    }

    /// The complex weight `Ω`; may overflow to infinity for many photons.
    pub fn weight(&self) -> Complex64 {
        Complex64::from_polar(self.log_weight_magnitude.exp(), self.weight_phase)
    }
}

/// Draws one sample: `φ_k ~ U(−π, π)`, `θ_k ~ VM(0, r²)` on occupied modes.
pub fn draw_sample<R: Rng + ?Sized>(cfg: &VcpConfig, rng: &mut R) -> Result<VcpSample> {
    cfg.validate()?;
    let vm = VonMises::new(0.0, cfg.kappa())?;
    let m = cfg.occupancy.len();
    let mut classical = vec![0.0; m];
    let mut nonclassical = vec![0.0; m];
    for k in cfg.occupied() {
        let (psi, turn) = draw_phasors(&vm, rng);
        let theta = turn.arg();
        let theta = if theta >= PI { -PI } else { theta };
        let phi = psi.arg() - 0.5 * theta;
        classical[k] = if phi >= PI {
            phi - 2.0 * PI
        } else if phi < -PI {
            phi + 2.0 * PI
        } else {
            phi
        };
        nonclassical[k] = theta;
    }
    VcpSample::from_phases(cfg, &classical, &nonclassical)
}

// (e^{iψ}, e^{iθ}) for one occupied mode, where ψ = φ + θ/2. With φ uniform
// and independent of θ, ψ is uniform and independent of θ too, so it is drawn
// directly and α = r e^{iψ}, β = r e^{−iψ} e^{iθ}.
fn draw_phasors<R: Rng + ?Sized>(vm: &VonMises, rng: &mut R) -> (Complex64, Complex64) {
    let [c, s]: [f64; 2] = UnitCircle.sample(rng);
    (Complex64::new(c, s), vm.sample_phasor(rng))
}

/// Estimates `⟨Π_{k∈outputs} n̂_k⟩` for the input pattern in `cfg`.
///
/// Subensemble `i` draws from stream `i` of `seed`, and the reduction runs in
/// subensemble order, so results do not depend on the thread count.
pub fn estimate_correlation(
    u: &UnitaryMatrix,
    cfg: &VcpConfig,
    outputs: &[usize],
    ensemble: Ensemble,
    seed: u64,
) -> Result<EstimateResult> {
    let start = Instant::now();
    cfg.validate()?;
    let m = u.dim();
    if cfg.occupancy.len() != m {
        return Err(Error::InvalidDimension(format!(
            "occupancy pattern of length {} for {m} modes",
            cfg.occupancy.len()
        )));
    }
    if outputs.is_empty() {
        return Err(Error::InvalidSpec("correlation needs at least one output mode".into()));
    }
    validate_modes(m, outputs, "output")?;

    let occupied = cfg.occupied();
    let photons = occupied.len();
    let order = outputs.len();
    let kernel = Kernel {
        sub: u.select(outputs, &occupied)?,
        vm: VonMises::new(0.0, cfg.kappa())?,
        kappa: cfg.kappa(),
    };

    let log_prefactor =
        photons as f64 * ln_bessel_i0(cfg.kappa()) - 2.0 * (photons as f64 - order as f64) * cfg.radius.ln();
    let prefactor = log_prefactor.exp();
    if !prefactor.is_finite() {
        return Err(Error::NumericFailure(format!(
            "weight prefactor exp({log_prefactor:.1}) overflows; reduce the radius mismatch or the number of uncancelled photons"
        )));
    }

    let means: Vec<Complex64> = (0..ensemble.subensembles as u64)
        .into_par_iter()
        .map(|i| kernel.subensemble_mean(ensemble.samples, &mut stream(seed, i)))
        .collect();
    let result = EstimateResult::from_subensembles(&means, ensemble.samples, seed, Method::Vcp)?.scaled(prefactor);
    if !result.mean.is_finite() || !result.stderr.is_finite() {
        return Err(Error::NumericFailure("non-finite VCP estimate".into()));
    }
    Ok(result.with_wall_time(start.elapsed().as_secs_f64()))
}

struct Kernel {
    /// Rows: output modes; columns: occupied input modes.
    sub: ComplexMatrix,
    vm: VonMises,
    kappa: f64,
}

impl Kernel {
    // Mean over `samples` of e^{iΣ(κ sin θ − θ)} Π_k (Σ_j U_kj a_j)(Σ_j U*_kj b_j),
    // with unit-modulus a_j = e^{iψ}, b_j = e^{−iψ} e^{iθ}.
    fn subensemble_mean<R: Rng + ?Sized>(&self, samples: usize, rng: &mut R) -> Complex64 {
        let photons = self.sub.cols();
        let mut a = vec![Complex64::new(0.0, 0.0); photons];
        let mut b = vec![Complex64::new(0.0, 0.0); photons];
        let mut acc = PairwiseSum::new();
        for _ in 0..samples {
            // Σ κ sin θ_j, and Π e^{−iθ_j} kept as a unit complex number
            let mut phase = 0.0;
            let mut turn = Complex64::new(1.0, 0.0);
            for j in 0..photons {
                let (psi, theta) = draw_phasors(&self.vm, rng);
                a[j] = psi;
                b[j] = psi.conj() * theta;
                phase += self.kappa * theta.im;
                turn *= theta.conj();
            }
            let mut product = turn * Complex64::from_polar(1.0, phase);
            for k in 0..self.sub.rows() {
                let row = self.sub.row(k);
                let mut sa = Complex64::new(0.0, 0.0);
                let mut sb = Complex64::new(0.0, 0.0);
                for j in 0..photons {
                    sa += row[j] * a[j];
                    sb += row[j].conj() * b[j];
                }
                product *= sa * sb;
            }
            acc.add(product);
        }
        acc.sum() / samples as f64
    }
}
