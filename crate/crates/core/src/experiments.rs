//! Fringe scans, phase-noise sweeps and contour-radius sweeps over the QuFTI.
//!
//! Every `(grid point, noise realization)` pair is an independent work unit.
//! Realization `ρ` draws its phase offsets from a stream keyed by
//! `(seed, ρ)`, so all grid points (and all noise levels of a sweep) share the
//! same standard-normal draws scaled by `σ`. The estimator for a pair is
//! keyed by `(seed, φ, ρ)`, which makes any single output row reproducible
//! from its own `(φ, seed)` alone.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{mean_and_stderr, Ensemble, EstimateResult, Method};
use crate::exact::{correlation_by_subsets, permanent_ryser, q_conjecture};
use crate::networks::{build_qufti, sample_noise, PhaseProfile, UnitaryMatrix};
use crate::qcp::{self, QcpConfig};
use crate::rng::{derive_seed, stream, tag, DEFAULT_SEED};
use crate::vcp::{self, VcpConfig, DEFAULT_RADIUS_LOW_ORDER, DEFAULT_RADIUS_MAX_ORDER};

/// Noise levels used by [`noise_sweep`] when none are given.
pub const DEFAULT_NOISE_LEVELS: [f64; 5] = [0.0, 0.05, 0.1, 0.2, 0.4];
/// Realizations per point in noise sweeps when none are given.
pub const DEFAULT_NOISE_REALIZATIONS: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub m: usize,
    pub phis: Vec<f64>,
    pub method: Method,
    /// Correlation order `N`.
    pub order: usize,
    /// Output modes; `None` means the first `order` modes.
    pub outputs: Option<Vec<usize>>,
    pub radius: f64,
    pub d: u32,
    pub l1: usize,
    pub l2: usize,
    pub noise_sigma: f64,
    pub realizations: usize,
    pub seed: u64,
}

impl ScanSpec {
    /// Maximum-order spec with the default sampling parameters.
    pub fn new(m: usize, method: Method) -> Self {
        ScanSpec {
            m,
            phis: Vec::new(),
            method,
            order: m,
            outputs: None,
            radius: DEFAULT_RADIUS_MAX_ORDER,
            d: qcp::DEFAULT_D,
            l1: 200,
            l2: 10_000,
            noise_sigma: 0.0,
            realizations: 1,
            seed: DEFAULT_SEED,
        }
    }

    /// Sets the order and picks the matching default radius.
    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self.radius = default_radius(self.m, order);
        self
    }

    pub fn with_phis(mut self, phis: Vec<f64>) -> Self {
        self.phis = phis;
        self
    }

    pub fn with_ensemble(mut self, l1: usize, l2: usize) -> Self {
        self.l1 = l1;
        self.l2 = l2;
        self
    }

    pub fn with_noise(mut self, sigma: f64, realizations: usize) -> Self {
        self.noise_sigma = sigma;
        self.realizations = realizations;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn output_modes(&self) -> Vec<usize> {
        self.outputs.clone().unwrap_or_else(|| (0..self.order).collect())
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidDimension("scan needs M >= 1".into()));
        }
        if self.phis.is_empty() {
            return Err(Error::InvalidSpec("phase grid is empty".into()));
        }
        if self.phis.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidSpec("phase grid contains non-finite values".into()));
        }
        if self.order == 0 || self.order > self.m {
            return Err(Error::InvalidSpec(format!("order N = {} must be in 1..={}", self.order, self.m)));
        }
        if self.output_modes().len() != self.order {
            return Err(Error::InvalidSpec(format!(
                "{} output modes given for order {}",
                self.output_modes().len(),
                self.order
            )));
        }
        if self.realizations == 0 {
            return Err(Error::InvalidSpec("need at least one noise realization".into()));
        }
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return Err(Error::InvalidSpec(format!("noise sigma must be finite and >= 0, got {}", self.noise_sigma)));
        }
        match self.method {
            Method::Conjecture => {
                if self.order != self.m {
                    return Err(Error::InvalidSpec("the analytic count rate exists only at maximum order".into()));
                }
                if self.noise_sigma > 0.0 {
                    return Err(Error::InvalidSpec("the analytic count rate has no phase-noise form".into()));
                }
                if self.m < 2 {
                    return Err(Error::InvalidDimension("the analytic count rate needs M >= 2".into()));
                }
            }
            Method::Qcp if self.order != self.m => {
                return Err(Error::MaxOrderOnly {
                    inputs: self.m,
                    outputs: self.order,
                })
            }
            Method::Vcp | Method::Qcp => {
                Ensemble::new(self.l1, self.l2)?;
            }
            Method::Exact => {}
        }
        Ok(())
    }
}

/// `r = 0.1` at maximum order, `r = 0.8` below it.
pub fn default_radius(m: usize, order: usize) -> f64 {
    if order >= m {
        DEFAULT_RADIUS_MAX_ORDER
    } else {
        DEFAULT_RADIUS_LOW_ORDER
    }
}

/// `points` equally spaced phases from `min` to `max` inclusive.
pub fn phi_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![min],
        _ => (0..points)
            .map(|i| min + (max - min) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub phi: f64,
    pub q_mean: f64,
    pub q_stderr: f64,
    pub q_imag: f64,
    pub wall_time: f64,
    /// Per-realization estimates that were averaged into `q_mean`.
    pub realization_values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub spec: ScanSpec,
    pub rows: Vec<ScanRow>,
}

impl ScanResult {
    /// Copy with every `wall_time` zeroed, for comparing reruns.
    pub fn without_timing(&self) -> ScanResult {
        let mut out = self.clone();
        for row in &mut out.rows {
            row.wall_time = 0.0;
        }
        out
    }

    /// `Q(φ)/Q(φ₀)` with `φ₀` the grid point closest to zero.
    pub fn normalized(&self) -> Vec<f64> {
        let Some(reference) = self
            .rows
            .iter()
            .min_by(|a, b| a.phi.abs().total_cmp(&b.phi.abs()))
            .map(|r| r.q_mean)
        else {
            return Vec::new();
        };
        self.rows.iter().map(|r| r.q_mean / reference).collect()
    }

    /// Grid phase with the largest mean.
    pub fn peak_phi(&self) -> Option<f64> {
        self.rows.iter().max_by(|a, b| a.q_mean.total_cmp(&b.q_mean)).map(|r| r.phi)
    }

    pub fn row_at(&self, phi: f64) -> Option<&ScanRow> {
        self.rows.iter().find(|r| r.phi == phi)
    }

    /// Distance from the peak to where the normalised fringe first falls to
    /// one half on the positive side, by linear interpolation.
    pub fn half_width(&self) -> Option<f64> {
        let peak = self
            .rows
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.q_mean.total_cmp(&b.1.q_mean))?
            .0;
        let top = self.rows[peak].q_mean;
        let level = 0.5 * top;
        self.rows[peak..].windows(2).find_map(|w| {
            let (a, b) = (&w[0], &w[1]);
            (a.q_mean >= level && b.q_mean < level).then(|| {
                let t = (a.q_mean - level) / (a.q_mean - b.q_mean);
                a.phi + t * (b.phi - a.phi) - self.rows[peak].phi
            })
        })
    }
}

/// Runs `spec.method` at every grid phase, averaging over noise realizations.
pub fn fringe_scan(spec: &ScanSpec) -> Result<ScanResult> {
    spec.validate()?;
    let outputs = spec.output_modes();
    let units: Vec<(usize, usize)> = (0..spec.phis.len())
        .flat_map(|p| (0..spec.realizations).map(move |r| (p, r)))
        .collect();
    let estimates: Vec<EstimateResult> = units
        .par_iter()
        .map(|&(p, r)| run_unit(spec, &outputs, spec.phis[p], r))
        .collect::<Result<_>>()?;

    let rows = estimates
        .chunks(spec.realizations)
        .zip(&spec.phis)
        .map(|(ests, &phi)| aggregate(phi, ests))
        .collect();
    Ok(ScanResult {
        spec: spec.clone(),
        rows,
    })
}

fn aggregate(phi: f64, ests: &[EstimateResult]) -> ScanRow {
    let wall_time = ests.iter().map(|e| e.wall_time).sum();
    let realization_values: Vec<f64> = ests.iter().map(|e| e.mean).collect();
    let (q_mean, q_stderr, q_imag) = if let [single] = ests {
        (single.mean, single.stderr, single.imag_diagnostic)
    } else {
        let (mean, stderr) = mean_and_stderr(realization_values.iter().copied());
        let imag = ests.iter().map(|e| e.imag_diagnostic).sum::<f64>() / ests.len() as f64;
        (mean, stderr, imag)
    };
    ScanRow {
        phi,
        q_mean,
        q_stderr,
        q_imag,
        wall_time,
        realization_values,
    }
}

/// Network for realization `r` of a scan at gradient `phi`.
pub fn realization_network(spec: &ScanSpec, phi: f64, realization: usize) -> Result<UnitaryMatrix> {
    let profile = if spec.noise_sigma == 0.0 {
        PhaseProfile::noiseless(spec.m, phi)
    } else {
        let noise_seed = derive_seed(spec.seed, &[tag::NOISE, realization as u64]);
        sample_noise(spec.m, phi, spec.noise_sigma, &mut stream(noise_seed, 0))?
    };
    build_qufti(spec.m, &profile)
}

/// Estimator seed for one `(φ, realization)` unit.
pub fn unit_seed(master: u64, phi: f64, realization: usize) -> u64 {
    derive_seed(master, &[tag::ESTIMATE, phi.to_bits(), realization as u64])
}

fn run_unit(spec: &ScanSpec, outputs: &[usize], phi: f64, realization: usize) -> Result<EstimateResult> {
    let start = Instant::now();
    let seed = unit_seed(spec.seed, phi, realization);
    let result = match spec.method {
        Method::Conjecture => EstimateResult::exact(q_conjecture(spec.m, phi)?, Method::Conjecture),
        Method::Exact => {
            let u = realization_network(spec, phi, realization)?;
            let value = if spec.order == spec.m {
                permanent_ryser(&u)?.norm_sqr()
            } else {
                let inputs: Vec<usize> = (0..spec.m).collect();
                correlation_by_subsets(&u, &inputs, outputs)?
            };
            EstimateResult::exact(value, Method::Exact)
        }
        Method::Qcp => {
            let u = realization_network(spec, phi, realization)?;
            let cfg = QcpConfig::new(spec.d, (0..spec.m).collect(), outputs.to_vec())?;
            qcp::estimate_perm_squared(&u, &cfg, Ensemble::new(spec.l1, spec.l2)?, seed)?
        }
        Method::Vcp => {
            let u = realization_network(spec, phi, realization)?;
            let cfg = VcpConfig::all_occupied(spec.m, spec.radius)?;
            vcp::estimate_correlation(&u, &cfg, outputs, Ensemble::new(spec.l1, spec.l2)?, seed)?
        }
    };
    Ok(result.with_wall_time(start.elapsed().as_secs_f64()))
}

/// One fringe scan per noise level, all with the spec's master seed.
///
/// Level `σ` of the sweep equals `fringe_scan` of the same spec with
/// `noise_sigma = σ`.
pub fn noise_sweep(spec: &ScanSpec, noise_levels: &[f64]) -> Result<Vec<ScanResult>> {
    if noise_levels.is_empty() {
        return Err(Error::InvalidSpec("noise sweep needs at least one level".into()));
    }
    noise_levels
        .iter()
        .map(|&sigma| {
            let mut level = spec.clone();
            level.noise_sigma = sigma;
            fringe_scan(&level)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RSweepRow {
    pub radius: f64,
    pub estimate: EstimateResult,
}

/// VCP error versus contour radius at a fixed noiseless QuFTI point. Every
/// radius reuses the same seed and sample budget.
pub fn r_sweep(
    m: usize,
    phi: f64,
    order: usize,
    radii: &[f64],
    ensemble: Ensemble,
    seed: u64,
) -> Result<Vec<RSweepRow>> {
    if order == 0 || order > m {
        return Err(Error::InvalidSpec(format!("order N = {order} must be in 1..={m}")));
    }
    if radii.is_empty() {
        return Err(Error::InvalidSpec("radius grid is empty".into()));
    }
    let u = build_qufti(m, &PhaseProfile::noiseless(m, phi))?;
    let outputs: Vec<usize> = (0..order).collect();
    radii
        .iter()
        .map(|&radius| {
            let cfg = VcpConfig::all_occupied(m, radius)?;
            let estimate = vcp::estimate_correlation(&u, &cfg, &outputs, ensemble, seed)?;
            Ok(RSweepRow { radius, estimate })
        })
        .collect()
}

/// Counting error of an experiment recording `L1·L2` events:
/// `√(Q_conj(M, φ)/(L1·L2))`.
pub fn shot_noise_baseline(m: usize, phi: f64, l1: usize, l2: usize) -> Result<f64> {
    let events = l1 * l2;
    if events == 0 {
        return Err(Error::InvalidSpec("baseline needs a positive event count".into()));
    }
    Ok((q_conjecture(m, phi)?.max(0.0) / events as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::fock_correlation;
    use std::f64::consts::PI;

    #[test]
    fn conjecture_scan_peaks_at_one() {
        let spec = ScanSpec::new(100, Method::Conjecture).with_phis(phi_grid(-0.01, 0.01, 21));
        let r = fringe_scan(&spec).unwrap();
        assert_eq!(r.row_at(0.0).unwrap().q_mean, 1.0);
        assert_eq!(r.peak_phi(), Some(0.0));
        assert!(r.rows.iter().all(|row| row.q_stderr == 0.0));
    }

    #[test]
    fn qcp_scan_tracks_conjecture() {
        let spec = ScanSpec::new(6, Method::Qcp)
            .with_phis(phi_grid(-0.3, 0.3, 10))
            .with_ensemble(50, 2000);
        let r = fringe_scan(&spec).unwrap();
        for row in &r.rows {
            let q = q_conjecture(6, row.phi).unwrap();
            assert!((row.q_mean - q).abs() <= 4.0 * row.q_stderr.max(1e-15), "phi={} {} vs {q}", row.phi, row.q_mean);
        }
    }

    #[test]
    fn vcp_low_order_scan_tracks_fock() {
        let spec = ScanSpec::new(4, Method::Vcp)
            .with_order(3)
            .with_phis(phi_grid(-0.4, 0.4, 5))
            .with_ensemble(50, 4000);
        assert_eq!(spec.radius, 0.8);
        let r = fringe_scan(&spec).unwrap();
        for row in &r.rows {
            let u = build_qufti(4, &PhaseProfile::noiseless(4, row.phi)).unwrap();
            let exact = fock_correlation(&u, &[0, 1, 2, 3], &[0, 1, 2]).unwrap();
            assert!((row.q_mean - exact).abs() <= 4.0 * row.q_stderr, "phi={}", row.phi);
        }
    }

    #[test]
    fn spec_validation() {
        let base = ScanSpec::new(4, Method::Qcp).with_phis(vec![0.0]);
        assert!(matches!(fringe_scan(&base.clone().with_order(3)), Err(Error::MaxOrderOnly { .. })));
        assert!(fringe_scan(&base.clone().with_phis(vec![])).is_err());
        assert!(fringe_scan(&base.clone().with_noise(0.1, 0)).is_err());
        assert!(fringe_scan(&base.clone().with_order(5)).is_err());
        let conj = ScanSpec::new(4, Method::Conjecture).with_phis(vec![0.1]);
        assert!(fringe_scan(&conj.clone().with_noise(0.1, 2)).is_err());
        assert!(fringe_scan(&conj.with_order(2)).is_err());
        let exact = ScanSpec::new(31, Method::Exact).with_phis(vec![0.0]);
        assert!(matches!(fringe_scan(&exact), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn exact_and_conjecture_fringes_are_symmetric() {
        let grid = phi_grid(-0.5, 0.5, 11);
        for method in [Method::Exact, Method::Conjecture] {
            let r = fringe_scan(&ScanSpec::new(7, method).with_phis(grid.clone())).unwrap();
            for i in 0..grid.len() {
                let j = grid.len() - 1 - i;
                assert!((r.rows[i].q_mean - r.rows[j].q_mean).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn methods_agree_at_small_m() {
        let phi = 0.15;
        let m = 5;
        let exact = fringe_scan(&ScanSpec::new(m, Method::Exact).with_phis(vec![phi])).unwrap().rows[0].q_mean;
        let conj = fringe_scan(&ScanSpec::new(m, Method::Conjecture).with_phis(vec![phi])).unwrap().rows[0].q_mean;
        assert!((exact - conj).abs() < 1e-12);
        for (method, radius) in [(Method::Qcp, 0.1), (Method::Vcp, 0.3)] {
            let mut spec = ScanSpec::new(m, method).with_phis(vec![phi]).with_ensemble(50, 4000);
            spec.radius = radius;
            let row = &fringe_scan(&spec).unwrap().rows[0];
            assert!((row.q_mean - exact).abs() <= 5.0 * row.q_stderr, "{method}: {} vs {exact}", row.q_mean);
        }
    }

    #[test]
    fn sampled_fringe_symmetric_within_error() {
        let spec = ScanSpec::new(6, Method::Qcp)
            .with_phis(vec![-0.2, 0.2])
            .with_ensemble(50, 2000);
        let r = fringe_scan(&spec).unwrap();
        let (a, b) = (&r.rows[0], &r.rows[1]);
        let combined = (a.q_stderr.powi(2) + b.q_stderr.powi(2)).sqrt();
        assert!((a.q_mean - b.q_mean).abs() <= 4.0 * combined);
    }

    #[test]
    fn zero_noise_sweep_level_equals_plain_scan() {
        let spec = ScanSpec::new(5, Method::Qcp)
            .with_phis(phi_grid(-0.2, 0.2, 3))
            .with_ensemble(10, 200)
            .with_noise(0.0, 3);
        let sweep = noise_sweep(&spec, &[0.0, 0.1]).unwrap();
        assert_eq!(sweep[0].without_timing(), fringe_scan(&spec).unwrap().without_timing());
        assert_eq!(sweep[1].spec.noise_sigma, 0.1);
        let again = noise_sweep(&spec, &[0.0, 0.1]).unwrap();
        for (a, b) in again.iter().zip(&sweep) {
            assert_eq!(a.without_timing(), b.without_timing());
        }
    }

    #[test]
    fn noise_realizations_are_shared_across_grid() {
        let spec = ScanSpec::new(6, Method::Exact).with_noise(0.2, 2).with_phis(vec![0.0, 0.1]);
        let a = realization_network(&spec, 0.0, 1).unwrap();
        let b = realization_network(&spec, 0.1, 1).unwrap();
        let c = realization_network(&spec, 0.0, 0).unwrap();
        // Same offsets, different gradient: b = a·QuFTI(0.1).
        let g = build_qufti(6, &PhaseProfile::noiseless(6, 0.1)).unwrap();
        assert!(a.compose(&g).unwrap().max_abs_diff(&b) < 1e-10);
        assert!(a.max_abs_diff(&c) > 1e-3);
    }

    #[test]
    fn realization_stderr_matches_spread() {
        let spec = ScanSpec::new(8, Method::Exact).with_noise(0.3, 12).with_phis(vec![0.0]);
        let row = &fringe_scan(&spec).unwrap().rows[0];
        assert_eq!(row.realization_values.len(), 12);
        let (mean, se) = mean_and_stderr(row.realization_values.iter().copied());
        assert_eq!((row.q_mean, row.q_stderr), (mean, se));
        assert!(se > 0.0);
    }

    #[test]
    fn r_sweep_is_reproducible_and_grows_with_radius() {
        let ens = Ensemble::new(100, 1000).unwrap();
        let rows = r_sweep(12, 0.03, 12, &[0.1, 0.5, 1.0], ens, 4).unwrap();
        assert!(rows[0].estimate.stderr < rows[1].estimate.stderr);
        assert!(rows[1].estimate.stderr < rows[2].estimate.stderr);
        let again = r_sweep(12, 0.03, 12, &[0.5], ens, 4).unwrap();
        assert_eq!(again[0].estimate.stderr, rows[1].estimate.stderr);
    }

    #[test]
    fn baseline_values() {
        assert!((shot_noise_baseline(10, 0.0, 100, 100).unwrap() - 0.01).abs() < 1e-15);
        assert!(shot_noise_baseline(2, PI / 2.0, 10, 10).unwrap() < 1e-9);
        let q = q_conjecture(100, 0.007).unwrap();
        let b = shot_noise_baseline(100, 0.007, 200, 10_000).unwrap();
        assert!((b - (q / 2e6).sqrt()).abs() < 1e-18);
    }

    #[test]
    fn half_width_interpolates() {
        let spec = ScanSpec::new(2, Method::Conjecture).with_phis(phi_grid(0.0, PI / 2.0, 2001));
        let r = fringe_scan(&spec).unwrap();
        // cos²φ = 1/2 at φ = π/4
        assert!((r.half_width().unwrap() - PI / 4.0).abs() < 1e-6);
        assert_eq!(r.normalized()[0], 1.0);
    }
}
