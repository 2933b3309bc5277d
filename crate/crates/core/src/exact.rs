//! Exact reference values: permanents, brute-force Fock statistics and the
//! analytic QuFTI count-rate formula.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::networks::UnitaryMatrix;

/// Largest matrix accepted by [`permanent_ryser`].
pub const RYSER_MAX_DIM: usize = 30;
/// Largest matrix accepted by [`permanent_by_definition`].
pub const DEFINITION_MAX_DIM: usize = 9;
/// Largest photon number accepted by [`fock_output_distribution`].
pub const FOCK_MAX_PHOTONS: usize = 6;
/// Largest number of output configurations [`fock_output_distribution`] will enumerate.
pub const FOCK_MAX_CONFIGURATIONS: usize = 5_000_000;
/// Work guard for [`correlation_by_subsets`], in units of `C(|σ|, N)·N·2^N`.
pub const SUBSET_MAX_WORK: usize = 1 << 37;

// Below this size the Gray-code walk runs as one serial sweep.
const RYSER_PARALLEL_MIN_DIM: usize = 18;
const RYSER_CHUNKS: u64 = 64;

fn require_square(a: &ComplexMatrix) -> Result<usize> {
    if !a.is_square() || a.rows() == 0 {
        return Err(Error::InvalidDimension(format!(
            "permanent needs a non-empty square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(a.rows())
}

/// Permanent by Ryser's formula with Gray-code column updates, `O(2ⁿ·n)`.
pub fn permanent_ryser(a: &ComplexMatrix) -> Result<Complex64> {
    let n = require_square(a)?;
    if n > RYSER_MAX_DIM {
        return Err(Error::SizeLimit {
            what: "Ryser permanent dimension",
            limit: RYSER_MAX_DIM,
            got: n,
        });
    }
    let chunks = if n >= RYSER_PARALLEL_MIN_DIM { RYSER_CHUNKS } else { 1 };
    Ok(ryser_chunked(a, chunks))
}

/// Ryser sum split into `chunks` contiguous stretches of the Gray-code walk,
/// evaluated in parallel and reduced in index order.
pub(crate) fn ryser_chunked(a: &ComplexMatrix, chunks: u64) -> Complex64 {
    let n = a.rows();
    let total: u64 = 1 << n;
    let chunks = chunks.clamp(1, total - 1);
    let span = (total - 1).div_ceil(chunks);
    let partials: Vec<Complex64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = 1 + c * span;
            let end = (start + span).min(total);
            ryser_range(a, start, end)
        })
        .collect();
    let sum: Complex64 = partials.into_iter().sum();
    if n % 2 == 1 {
        -sum
    } else {
        sum
    }
}

// Σ over Gray-code steps k in [start, end) of (−1)^{|S_k|} Π_i rowsum_{S_k}(i).
fn ryser_range(a: &ComplexMatrix, start: u64, end: u64) -> Complex64 {
    let n = a.rows();
    let mut gray = (start - 1) ^ ((start - 1) >> 1);
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    for (i, s) in row_sums.iter_mut().enumerate() {
        let row = a.row(i);
        *s = (0..n).filter(|&j| gray >> j & 1 == 1).map(|j| row[j]).sum();
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for k in start..end {
        let j = k.trailing_zeros() as usize;
        gray ^= 1 << j;
        if gray >> j & 1 == 1 {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += a[(i, j)];
            }
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= a[(i, j)];
            }
        }
        let prod: Complex64 = row_sums.iter().product();
        if gray.count_ones() % 2 == 1 {
            acc -= prod;
        } else {
            acc += prod;
        }
    }
    acc
}

/// Permanent as the explicit sum over all `n!` permutations.
pub fn permanent_by_definition(a: &ComplexMatrix) -> Result<Complex64> {
    let n = require_square(a)?;
    if n > DEFINITION_MAX_DIM {
        return Err(Error::SizeLimit {
            what: "permutation-sum permanent dimension",
            limit: DEFINITION_MAX_DIM,
            got: n,
        });
    }
    // Heap's algorithm.
    let mut perm: Vec<usize> = (0..n).collect();
    let mut counters = vec![0usize; n];
    let term = |p: &[usize]| -> Complex64 { p.iter().enumerate().map(|(i, &j)| a[(i, j)]).product() };
    let mut sum = term(&perm);
    let mut i = 0;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            sum += term(&perm);
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    Ok(sum)
}

/// Output photon-number distribution of a linear network.
#[derive(Clone, Debug)]
pub struct FockDistribution {
    pub modes: usize,
    pub photons: usize,
    pub outcomes: Vec<(Vec<usize>, f64)>,
}

impl FockDistribution {
    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|(_, p)| p).sum()
    }

    pub fn probability(&self, occupation: &[usize]) -> f64 {
        self.outcomes
            .iter()
            .find(|(n, _)| n == occupation)
            .map_or(0.0, |(_, p)| *p)
    }

    /// `⟨Π_{k ∈ outputs} n̂_k⟩`.
    pub fn correlation(&self, outputs: &[usize]) -> f64 {
        self.outcomes
            .iter()
            .map(|(n, p)| p * outputs.iter().map(|&k| n[k] as f64).product::<f64>())
            .sum()
    }
}

pub(crate) fn validate_modes(m: usize, modes: &[usize], what: &str) -> Result<()> {
    let mut seen = vec![false; m];
    for &k in modes {
        if k >= m {
            return Err(Error::InvalidSpec(format!("{what} mode {k} out of range for {m} modes")));
        }
        if std::mem::replace(&mut seen[k], true) {
            return Err(Error::InvalidSpec(format!("{what} mode {k} listed twice")));
        }
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> Option<usize> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return None;
        }
    }
    Some(acc as usize)
}

/// Calls `f` on every occupation vector of `photons` bosons in `modes` modes.
fn for_each_occupation(modes: usize, photons: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(n: &mut Vec<usize>, mode: usize, left: usize, f: &mut impl FnMut(&[usize])) {
        if mode + 1 == n.len() {
            n[mode] = left;
            f(n);
            return;
        }
        for here in (0..=left).rev() {
            n[mode] = here;
            rec(n, mode + 1, left - here, f);
        }
    }
    let mut n = vec![0; modes];
    rec(&mut n, 0, photons, f);
}

/// Exact output distribution for one photon in each input mode of `inputs`
/// (0-based). `p_n = |perm U(n, σ)|² / Π n_k!`, where `U(n, σ)` repeats
/// output row `k` `n_k` times.
pub fn fock_output_distribution(u: &UnitaryMatrix, inputs: &[usize]) -> Result<FockDistribution> {
    let m = u.dim();
    validate_modes(m, inputs, "input")?;
    let photons = inputs.len();
    if photons > FOCK_MAX_PHOTONS {
        return Err(Error::SizeLimit {
            what: "Fock enumeration photon number",
            limit: FOCK_MAX_PHOTONS,
            got: photons,
        });
    }
    let configurations = binomial(m + photons - 1, photons).unwrap_or(usize::MAX);
    if configurations > FOCK_MAX_CONFIGURATIONS {
        return Err(Error::SizeLimit {
            what: "Fock enumeration output configurations",
            limit: FOCK_MAX_CONFIGURATIONS,
            got: configurations,
        });
    }
    let mut outcomes = Vec::with_capacity(configurations);
    if photons == 0 {
        outcomes.push((vec![0; m], 1.0));
    } else {
        let mut failure = None;
        for_each_occupation(m, photons, &mut |n| {
            let rows: Vec<usize> = n.iter().enumerate().flat_map(|(k, &c)| std::iter::repeat_n(k, c)).collect();
            let sub = u.select(&rows, inputs).expect("indices validated");
            match permanent_ryser(&sub) {
                Ok(p) => {
                    let norm: f64 = n.iter().map(|&c| factorial(c)).product();
                    outcomes.push((n.to_vec(), p.norm_sqr() / norm));
                }
                Err(e) => failure = Some(e),
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
    }
    Ok(FockDistribution { modes: m, photons, outcomes })
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Exact normally ordered correlation `⟨Π_{k∈outputs} n̂_k⟩` by Fock-space
/// enumeration.
pub fn fock_correlation(u: &UnitaryMatrix, inputs: &[usize], outputs: &[usize]) -> Result<f64> {
    validate_modes(u.dim(), outputs, "output")?;
    Ok(fock_output_distribution(u, inputs)?.correlation(outputs))
}

/// Exact `⟨Π_{k∈outputs} n̂_k⟩` for single photons in `inputs`, as
/// `Σ_T |perm U(outputs, T)|²` over input subsets `T` with `|T| = |outputs|`.
///
/// Annihilating one photon in each output mode leaves the orthogonal states
/// `|σ∖T⟩`, so the squared norm is a sum of squared sub-permanents. This
/// reaches much larger photon numbers than [`fock_correlation`].
pub fn correlation_by_subsets(u: &UnitaryMatrix, inputs: &[usize], outputs: &[usize]) -> Result<f64> {
    let m = u.dim();
    validate_modes(m, inputs, "input")?;
    validate_modes(m, outputs, "output")?;
    let order = outputs.len();
    if order == 0 {
        return Ok(1.0);
    }
    if order > inputs.len() {
        return Ok(0.0);
    }
    if order > RYSER_MAX_DIM {
        return Err(Error::SizeLimit {
            what: "Ryser permanent dimension",
            limit: RYSER_MAX_DIM,
            got: order,
        });
    }
    let subsets = binomial(inputs.len(), order).unwrap_or(usize::MAX);
    let work = subsets.saturating_mul(order).saturating_mul(1 << order);
    if work > SUBSET_MAX_WORK {
        return Err(Error::SizeLimit {
            what: "subset-sum correlation work",
            limit: SUBSET_MAX_WORK,
            got: work,
        });
    }
    let mut total = 0.0;
    let mut chosen: Vec<usize> = (0..order).collect();
    loop {
        let cols: Vec<usize> = chosen.iter().map(|&i| inputs[i]).collect();
        total += permanent_ryser(&u.select(outputs, &cols)?)?.norm_sqr();
        // next combination in lexicographic order
        let mut i = order;
        loop {
            if i == 0 {
                return Ok(total);
            }
            i -= 1;
            if chosen[i] != i + inputs.len() - order {
                break;
            }
        }
        chosen[i] += 1;
        for j in i + 1..order {
            chosen[j] = chosen[j - 1] + 1;
        }
    }
}

/// Conjectured QuFTI coincidence rate
/// `Π_{j=1}^{M−1} [2j(M−j)cos(Mφ) + M² − 2jM + 2j²] / M²`.
pub fn q_conjecture(m: usize, phi: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::InvalidDimension(format!("count-rate formula needs M >= 2, got {m}")));
    }
    let mf = m as f64;
    let c = (mf * phi).cos();
    Ok((1..m)
        .map(|j| {
            let j = j as f64;
            (2.0 * j * (mf - j) * c + mf * mf - 2.0 * j * mf + 2.0 * j * j) / (mf * mf)
        })
        .product())
}
