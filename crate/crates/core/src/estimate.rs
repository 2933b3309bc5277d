//! Ensemble bookkeeping shared by the samplers.
//!
//! A run is `L1` independent subensembles of `L2` samples each. The reported
//! value is the mean of the subensemble means and the error bar is
//! `√((⟨Q²⟩ − ⟨Q⟩²)/L1)` over those means.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Vcp,
    Qcp,
    Exact,
    Conjecture,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Vcp => "vcp",
            Method::Qcp => "qcp",
            Method::Exact => "exact",
            Method::Conjecture => "conjecture",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vcp" => Ok(Method::Vcp),
            "qcp" => Ok(Method::Qcp),
            "exact" => Ok(Method::Exact),
            "conjecture" => Ok(Method::Conjecture),
            other => Err(Error::InvalidSpec(format!("unknown method '{other}'"))),
        }
    }
}

/// Subensemble layout of a Monte Carlo run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ensemble {
    /// Number of subensembles (L1).
    pub subensembles: usize,
    /// Samples per subensemble (L2).
    pub samples: usize,
}

impl Ensemble {
    pub fn new(subensembles: usize, samples: usize) -> Result<Self> {
        if subensembles < 2 {
            return Err(Error::InvalidSpec(format!("need at least 2 subensembles, got {subensembles}")));
        }
        if samples < 1 {
            return Err(Error::InvalidSpec("need at least 1 sample per subensemble".into()));
        }
        Ok(Ensemble { subensembles, samples })
    }

    pub fn total(&self) -> usize {
        self.subensembles * self.samples
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub mean: f64,
    pub stderr: f64,
    /// Mean imaginary part; the target quantity is real so this should vanish
    /// within `imag_stderr`.
    pub imag_diagnostic: f64,
    pub imag_stderr: f64,
    pub l1: usize,
    pub l2: usize,
    pub seed: u64,
    pub method: Method,
    pub wall_time: f64,
}

impl EstimateResult {
    /// Summarises per-subensemble complex means.
    pub(crate) fn from_subensembles(means: &[Complex64], l2: usize, seed: u64, method: Method) -> Result<Self> {
        if means.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NumericFailure("non-finite subensemble mean".into()));
        }
        let (mean, stderr) = mean_and_stderr(means.iter().map(|z| z.re));
        let (imag, imag_stderr) = mean_and_stderr(means.iter().map(|z| z.im));
        Ok(EstimateResult {
            mean,
            stderr,
            imag_diagnostic: imag,
            imag_stderr,
            l1: means.len(),
            l2,
            seed,
            method,
            wall_time: 0.0,
        })
    }

    /// Exact value with no sampling error.
    pub(crate) fn exact(value: f64, method: Method) -> Self {
        EstimateResult {
            mean: value,
            stderr: 0.0,
            imag_diagnostic: 0.0,
            imag_stderr: 0.0,
            l1: 0,
            l2: 0,
            seed: 0,
            method,
            wall_time: 0.0,
        }
    }

    pub(crate) fn scaled(mut self, factor: f64) -> Self {
        self.mean *= factor;
        self.stderr *= factor.abs();
        self.imag_diagnostic *= factor;
        self.imag_stderr *= factor.abs();
        self
    }

    pub(crate) fn with_wall_time(mut self, seconds: f64) -> Self {
        self.wall_time = seconds;
        self
    }
}

/// Mean and `√((⟨x²⟩ − ⟨x⟩²)/n)` of the values, both computed in index order.
pub fn mean_and_stderr(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let values: Vec<f64> = values.into_iter().collect();
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    (mean, (var / n as f64).sqrt())
}

/// Streaming pairwise (cascade) summation of complex terms.
///
/// Terms are added to a 64-element block with plain summation; full blocks
/// are merged in a binary tree, so rounding error grows like `O(log n)`.
#[derive(Clone, Debug, Default)]
pub struct PairwiseSum {
    block: Complex64,
    in_block: usize,
    // (level, partial sum); levels strictly decreasing from bottom to top
    stack: Vec<(u32, Complex64)>,
}

const BLOCK: usize = 64;

impl PairwiseSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: Complex64) {
        self.block += x;
        self.in_block += 1;
        if self.in_block == BLOCK {
            let mut carry = (0u32, std::mem::take(&mut self.block));
            self.in_block = 0;
            while let Some(&(level, value)) = self.stack.last() {
                if level != carry.0 {
                    break;
                }
                self.stack.pop();
                carry = (level + 1, value + carry.1);
            }
            self.stack.push(carry);
        }
    }

    pub fn sum(&self) -> Complex64 {
        self.stack.iter().rev().fold(self.block, |acc, &(_, v)| v + acc)
    }
}
