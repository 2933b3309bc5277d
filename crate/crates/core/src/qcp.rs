//! Discrete (qudit) complex-P sampling of permanents (QCP).
//!
//! Coherent amplitudes are restricted to `d`-th roots of unity
//! `z^q, z = e^{2πi/d}`. For single photons in the input set `σ` and the
//! output set `σ′` with `|σ| = |σ′|`, one draw of the phase vector `q` gives
//!
//! ```text
//! p(q) = Π_{i∈σ} z^{−q_i} · Π_{k∈σ′} Σ_{j∈σ} U_kj z^{q_j}
//! ```
//!
//! whose average over uniform `q` is exactly `perm U(σ′, σ)`. The contour
//! radius cancels at maximum order and never enters the arithmetic.
//!
//! The coincidence rate `|perm|²` is estimated per subensemble as
//! `⟨p(q)⟩ · conj⟨p(q̃)⟩` with `q` and `q̃` drawn from independent streams,
//! which is unbiased; `⟨|p(q)|²⟩` is not.

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimate::{Ensemble, EstimateResult, Method, PairwiseSum};
use crate::exact::validate_modes;
use crate::networks::UnitaryMatrix;
use crate::rng::{stream, Stream};

pub const DEFAULT_D: u32 = 2;
/// Largest number of phase vectors [`enumerate_perm_exact`] will sum.
pub const ENUMERATION_LIMIT: usize = 1 << 24;

#[derive(Clone, Debug, PartialEq)]
pub struct QcpConfig {
    pub d: u32,
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
}

impl QcpConfig {
    pub fn new(d: u32, inputs: Vec<usize>, outputs: Vec<usize>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidSpec(format!("phase-circle size d must be >= 2, got {d}")));
        }
        if inputs.len() != outputs.len() {
            return Err(Error::MaxOrderOnly {
                inputs: inputs.len(),
                outputs: outputs.len(),
            });
        }
        if inputs.is_empty() {
            return Err(Error::InvalidSpec("QCP needs at least one photon".into()));
        }
        Ok(QcpConfig { d, inputs, outputs })
    }

    /// Full permanent of an `m`-mode network: every mode in and out.
    pub fn full(m: usize, d: u32) -> Result<Self> {
        Self::new(d, (0..m).collect(), (0..m).collect())
    }

    pub fn order(&self) -> usize {
        self.inputs.len()
    }

    fn validate_for(&self, u: &UnitaryMatrix) -> Result<()> {
        validate_modes(u.dim(), &self.inputs, "input")?;
        validate_modes(u.dim(), &self.outputs, "output")
    }
}

/// A pair of independent phase-index vectors over the input set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuditDraw {
    pub q: Vec<u32>,
    pub q_tilde: Vec<u32>,
}

impl QuditDraw {
    /// Draws `q` from `rng` and `q̃` from the separate `rng_tilde`.
    pub fn draw<R: Rng + ?Sized>(cfg: &QcpConfig, rng: &mut R, rng_tilde: &mut R) -> Self {
        let n = cfg.order();
        QuditDraw {
            q: (0..n).map(|_| rng.random_range(0..cfg.d)).collect(),
            q_tilde: (0..n).map(|_| rng_tilde.random_range(0..cfg.d)).collect(),
        }
    }
}

/// One-sample permanent estimator `p(q)`.
pub fn sample_p(u: &UnitaryMatrix, cfg: &QcpConfig, q: &[u32]) -> Result<Complex64> {
    cfg.validate_for(u)?;
    check_draw(cfg, q)?;
    Ok(Kernel::new(u, cfg).eval(q))
}

/// `p(q)` accumulated as `(ln|p|, arg p)`, immune to overflow and underflow.
/// Used to cross-check the plain product at large `N`.
pub fn sample_p_log(u: &UnitaryMatrix, cfg: &QcpConfig, q: &[u32]) -> Result<(f64, f64)> {
    cfg.validate_for(u)?;
    check_draw(cfg, q)?;
    let kernel = Kernel::new(u, cfg);
    let n = cfg.order();
    let mut log_mag = 0.0;
    let mut arg = 0.0;
    for &qi in q {
        arg -= kernel.root_angle(qi);
    }
    for k in 0..n {
        let s: Complex64 = (0..n).map(|j| kernel.sub[k * n + j] * kernel.roots[q[j] as usize]).sum();
        log_mag += s.norm().ln();
        arg += s.arg();
    }
    Ok((log_mag, arg))
}

fn check_draw(cfg: &QcpConfig, q: &[u32]) -> Result<()> {
    if q.len() != cfg.order() {
        return Err(Error::InvalidDraw(format!("{} phase indices for {} photons", q.len(), cfg.order())));
    }
    if let Some(bad) = q.iter().find(|&&x| x >= cfg.d) {
        return Err(Error::InvalidDraw(format!("phase index {bad} outside 0..{}", cfg.d)));
    }
    Ok(())
}

/// Sampled permanent with its standard error.
#[derive(Clone, Debug, PartialEq)]
pub struct PermanentEstimate {
    pub value: Complex64,
    /// `√(⟨|p − ⟨p⟩|²⟩ / L)`.
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

/// `perm U(σ′, σ) ≈ (1/L) Σ p(q⁽ʲ⁾)` over uniform draws from stream 0 of `seed`.
pub fn estimate_permanent(u: &UnitaryMatrix, cfg: &QcpConfig, samples: usize, seed: u64) -> Result<PermanentEstimate> {
    cfg.validate_for(u)?;
    if samples == 0 {
        return Err(Error::InvalidSpec("need at least one sample".into()));
    }
    let kernel = Kernel::new(u, cfg);
    let mut rng = stream(seed, 0);
    let mut q = vec![0; cfg.order()];
    let values: Vec<Complex64> = (0..samples)
        .map(|_| {
            kernel.draw(&mut rng, &mut q);
            kernel.eval(&q)
        })
        .collect();
    let mut sum = PairwiseSum::new();
    values.iter().for_each(|&v| sum.add(v));
    let mean = sum.sum() / samples as f64;
    let var = values.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / samples as f64;
    Ok(PermanentEstimate {
        value: mean,
        stderr: (var / samples as f64).sqrt(),
        samples,
        seed,
    })
}

/// Unbiased estimate of `|perm U(σ′, σ)|²`.
///
/// Subensemble `i` draws `q` from stream `2i` and `q̃` from stream `2i + 1` of
/// `seed`, and contributes `⟨p(q)⟩ · conj⟨p(q̃)⟩`. The real parts form the
/// estimate; the imaginary parts are reported as a diagnostic.
pub fn estimate_perm_squared(u: &UnitaryMatrix, cfg: &QcpConfig, ensemble: Ensemble, seed: u64) -> Result<EstimateResult> {
    let start = Instant::now();
    cfg.validate_for(u)?;
    let kernel = Kernel::new(u, cfg);
    let products: Vec<Complex64> = (0..ensemble.subensembles as u64)
        .into_par_iter()
        .map(|i| {
            let p = kernel.mean(ensemble.samples, &mut stream(seed, 2 * i));
            let p_tilde = kernel.mean(ensemble.samples, &mut stream(seed, 2 * i + 1));
            p * p_tilde.conj()
        })
        .collect();
    let result = EstimateResult::from_subensembles(&products, ensemble.samples, seed, Method::Qcp)?;
    Ok(result.with_wall_time(start.elapsed().as_secs_f64()))
}

/// Exact permanent as the full average of `p(q)` over all `d^N` phase vectors.
pub fn enumerate_perm_exact(u: &UnitaryMatrix, cfg: &QcpConfig) -> Result<Complex64> {
    cfg.validate_for(u)?;
    let n = cfg.order();
    let count = (cfg.d as usize)
        .checked_pow(n as u32)
        .filter(|&c| c <= ENUMERATION_LIMIT)
        .ok_or(Error::SizeLimit {
            what: "QCP phase-vector enumeration",
            limit: ENUMERATION_LIMIT,
            got: (cfg.d as f64).powi(n as i32).min(usize::MAX as f64) as usize,
        })?;
    let kernel = Kernel::new(u, cfg);
    let mut q = vec![0u32; n];
    let mut sum = PairwiseSum::new();
    for _ in 0..count {
        sum.add(kernel.eval(&q));
        // odometer increment
        for digit in q.iter_mut() {
            *digit += 1;
            if *digit < cfg.d {
                break;
            }
            *digit = 0;
        }
    }
    Ok(sum.sum() / count as f64)
}

struct Kernel {
    n: usize,
    d: u32,
    /// Row-major `U(σ′, σ)`.
    sub: Vec<Complex64>,
    sub_re: Vec<f64>,
    sub_im: Vec<f64>,
    /// `z^m` for `m = 0..d`.
    roots: Vec<Complex64>,
}

impl Kernel {
    fn new(u: &UnitaryMatrix, cfg: &QcpConfig) -> Self {
        let sub = u.select(&cfg.outputs, &cfg.inputs).expect("validated indices");
        let sub: Vec<Complex64> = sub.as_slice().to_vec();
        let d = cfg.d;
        let roots = (0..d)
            .map(|m| match (m, d) {
                // exact values where they exist, so d = 2 and d = 4 stay real/imaginary
                (0, _) => Complex64::new(1.0, 0.0),
                (1, 2) => Complex64::new(-1.0, 0.0),
                (1, 4) => Complex64::new(0.0, 1.0),
                (2, 4) => Complex64::new(-1.0, 0.0),
                (3, 4) => Complex64::new(0.0, -1.0),
                _ => Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * m as f64 / d as f64),
            })
            .collect();
        Kernel {
            n: cfg.order(),
            d,
            sub_re: sub.iter().map(|z| z.re).collect(),
            sub_im: sub.iter().map(|z| z.im).collect(),
            sub,
            roots,
        }
    }

    fn root_angle(&self, q: u32) -> f64 {
        2.0 * std::f64::consts::PI * q as f64 / self.d as f64
    }

    fn draw(&self, rng: &mut Stream, q: &mut [u32]) {
        if self.d == 2 {
            let mut bits = 0u64;
            for (i, qi) in q.iter_mut().enumerate() {
                if i % 64 == 0 {
                    bits = rng.random();
                }
                *qi = (bits & 1) as u32;
                bits >>= 1;
            }
        } else {
            for qi in q.iter_mut() {
                *qi = rng.random_range(0..self.d);
            }
        }
    }

    fn eval(&self, q: &[u32]) -> Complex64 {
        if self.d == 2 {
            let signs: Vec<f64> = q.iter().map(|&x| if x == 0 { 1.0 } else { -1.0 }).collect();
            self.eval_signs(&signs)
        } else {
            let n = self.n;
            let phases: Vec<Complex64> = q.iter().map(|&x| self.roots[x as usize]).collect();
            let mut p: Complex64 = phases.iter().map(|z| z.conj()).product();
            for k in 0..n {
                let row = &self.sub[k * n..(k + 1) * n];
                p *= row.iter().zip(&phases).map(|(a, z)| a * z).sum::<Complex64>();
            }
            p
        }
    }

    // d = 2: z^q = ±1 and z^{−q} = z^q.
    fn eval_signs(&self, signs: &[f64]) -> Complex64 {
        let n = self.n;
        let parity: f64 = signs.iter().product();
        let mut p = Complex64::new(parity, 0.0);
        for k in 0..n {
            let re = &self.sub_re[k * n..(k + 1) * n];
            let im = &self.sub_im[k * n..(k + 1) * n];
            let mut sr = 0.0;
            let mut si = 0.0;
            for j in 0..n {
                sr += re[j] * signs[j];
                si += im[j] * signs[j];
            }
            p *= Complex64::new(sr, si);
        }
        p
    }

    fn mean(&self, samples: usize, rng: &mut Stream) -> Complex64 {
        let mut q = vec![0u32; self.n];
        let mut signs = vec![0.0; self.n];
        let mut acc = PairwiseSum::new();
        for _ in 0..samples {
            self.draw(rng, &mut q);
            let v = if self.d == 2 {
                for (s, &x) in signs.iter_mut().zip(&q) {
                    *s = if x == 0 { 1.0 } else { -1.0 };
                }
                self.eval_signs(&signs)
            } else {
                self.eval(&q)
            };
            acc.add(v);
        }
        acc.sum() / samples as f64
    }
}
