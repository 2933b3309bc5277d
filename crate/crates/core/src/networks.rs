//! Interferometer matrices.
//!
//! The quantum Fourier interferometer is `V = F† Φ F`, where `F` is the
//! discrete Fourier matrix `F[j][k] = exp(2πi·jk/M)/√M` and
//! `Φ = diag(exp(i(jφ + ξ_j)))` carries a linear phase gradient `φ` plus
//! optional per-mode phase noise `ξ_j`, with mode labels `j = 1..M`.

use std::f64::consts::PI;
use std::ops::Deref;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Largest tolerated `max |U†U − I|` for a [`UnitaryMatrix`].
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

/// A square matrix verified unitary at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix(ComplexMatrix);

impl UnitaryMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::InvalidDimension(format!(
                "unitary must be square and non-empty, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::NumericFailure("non-finite matrix entry".into()));
        }
        let defect = matrix.unitarity_defect();
        if !(defect < UNITARITY_TOLERANCE) {
            return Err(Error::NumericFailure(format!(
                "matrix is not unitary: max |U†U - I| = {defect:e}"
            )));
        }
        Ok(UnitaryMatrix(matrix))
    }

    pub fn identity(m: usize) -> Result<Self> {
        Self::new(ComplexMatrix::identity(m))
    }

    /// Number of modes.
    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_inner(self) -> ComplexMatrix {
        self.0
    }

    /// Product of two unitaries, re-verified.
    pub fn compose(&self, other: &UnitaryMatrix) -> Result<UnitaryMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::InvalidDimension(format!(
                "cannot compose {}-mode and {}-mode networks",
                self.dim(),
                other.dim()
            )));
        }
        UnitaryMatrix::new(&self.0 * &other.0)
    }
}

impl Deref for UnitaryMatrix {
    type Target = ComplexMatrix;

    fn deref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// Phase gradient plus one realization of per-mode phase noise.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseProfile {
    pub gradient: f64,
    pub noise_sigma: f64,
    pub offsets: Vec<f64>,
}

impl PhaseProfile {
    /// Noise-free profile for `m` modes.
    pub fn noiseless(m: usize, gradient: f64) -> Self {
        PhaseProfile {
            gradient,
            noise_sigma: 0.0,
            offsets: vec![0.0; m],
        }
    }

    /// Phase applied to mode `j` (1-based): `jφ + ξ_j`.
    pub fn phase(&self, j: usize) -> f64 {
        j as f64 * self.gradient + self.offsets[j - 1]
    }

    fn validate(&self, m: usize) -> Result<()> {
        if self.offsets.len() != m {
            return Err(Error::InvalidProfile(format!(
                "{} offsets for {m} modes",
                self.offsets.len()
            )));
        }
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return Err(Error::InvalidProfile(format!("noise sigma {} must be finite and >= 0", self.noise_sigma)));
        }
        if self.noise_sigma == 0.0 && self.offsets.iter().any(|&x| x != 0.0) {
            return Err(Error::InvalidProfile("non-zero offsets with zero noise sigma".into()));
        }
        if !self.gradient.is_finite() || self.offsets.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidProfile("non-finite phase".into()));
        }
        Ok(())
    }
}

fn fourier_matrix(m: usize) -> ComplexMatrix {
    let norm = 1.0 / (m as f64).sqrt();
    ComplexMatrix::from_fn(m, m, |j, k| {
        // Reduce jk mod M first so large indices keep full phase accuracy.
        let t = 2.0 * PI * ((j * k) % m) as f64 / m as f64;
        Complex64::from_polar(norm, t)
    })
}

/// The `M`-mode discrete Fourier network.
pub fn build_fourier(m: usize) -> Result<UnitaryMatrix> {
    if m == 0 {
        return Err(Error::InvalidDimension("Fourier network needs M >= 1".into()));
    }
    UnitaryMatrix::new(fourier_matrix(m))
}

/// The quantum Fourier transform interferometer `F† Φ F`.
pub fn build_qufti(m: usize, profile: &PhaseProfile) -> Result<UnitaryMatrix> {
    if m == 0 {
        return Err(Error::InvalidDimension("QuFTI needs M >= 1".into()));
    }
    profile.validate(m)?;
    let f = fourier_matrix(m);
    let phases: Vec<Complex64> = (1..=m).map(|j| Complex64::from_polar(1.0, profile.phase(j))).collect();
    // (F† Φ F)[a][b] = Σ_j conj(F[j][a]) e^{iφ_j} F[j][b]
    let v = ComplexMatrix::from_fn(m, m, |a, b| {
        (0..m).map(|j| f[(j, a)].conj() * phases[j] * f[(j, b)]).sum()
    });
    UnitaryMatrix::new(v)
}

/// Draws i.i.d. `Normal(0, σ²)` phase offsets for `m` modes.
pub fn sample_noise<R: Rng + ?Sized>(m: usize, gradient: f64, noise_sigma: f64, rng: &mut R) -> Result<PhaseProfile> {
    if m == 0 {
        return Err(Error::InvalidDimension("noise profile needs M >= 1".into()));
    }
    if !(noise_sigma >= 0.0) || !noise_sigma.is_finite() {
        return Err(Error::InvalidProfile(format!("noise sigma {noise_sigma} must be finite and >= 0")));
    }
    let offsets = if noise_sigma == 0.0 {
        vec![0.0; m]
    } else {
        (0..m)
            .map(|_| noise_sigma * rng.sample::<f64, _>(StandardNormal))
            .collect()
    };
    Ok(PhaseProfile {
        gradient,
        noise_sigma,
        offsets,
    })
}

/// Maps input phase-space amplitudes through the network: `(Uα, U*β)`.
pub fn apply_network(u: &UnitaryMatrix, alpha: &[Complex64], beta: &[Complex64]) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let m = u.dim();
    if alpha.len() != m || beta.len() != m {
        return Err(Error::InvalidDimension(format!(
            "amplitude vectors of length {} and {} for {m} modes",
            alpha.len(),
            beta.len()
        )));
    }
    let alpha_out = u.mul_vec(alpha)?;
    let beta_out = (0..m)
        .map(|k| u.row(k).iter().zip(beta).map(|(a, b)| a.conj() * b).sum())
        .collect();
    Ok((alpha_out, beta_out))
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// `R`'s diagonal moved into `Q`.
///
/// The QR step is Gram–Schmidt with one re-orthogonalisation pass, which
/// yields a real positive diagonal in `R` directly.
pub fn random_unitary<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<UnitaryMatrix> {
    if m == 0 {
        return Err(Error::InvalidDimension("random unitary needs M >= 1".into()));
    }
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut columns: Vec<Vec<Complex64>> = (0..m)
        .map(|_| {
            (0..m)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re * scale, im * scale)
                })
                .collect()
        })
        .collect();

    for j in 0..m {
        let (done, rest) = columns.split_at_mut(j);
        let col = &mut rest[0];
        for _pass in 0..2 {
            for q in done.iter() {
                let proj: Complex64 = q.iter().zip(col.iter()).map(|(a, b)| a.conj() * b).sum();
                for (c, a) in col.iter_mut().zip(q) {
                    *c -= proj * a;
                }
            }
        }
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::NumericFailure("degenerate Gaussian draw".into()));
        }
        for c in col.iter_mut() {
            *c /= norm;
        }
    }
    UnitaryMatrix::new(ComplexMatrix::from_fn(m, m, |i, j| columns[j][i]))
}
