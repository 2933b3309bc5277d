//! Complex P-representation Monte Carlo for boson-sampling correlations.
//!
//! `qufti` estimates normally ordered output correlations `⟨n̂_{k₁}…n̂_{k_N}⟩`
//! of linear photonic networks fed with single photons, with a focus on the
//! quantum Fourier transform interferometer (QuFTI). Two samplers are provided:
//!
//! - [`vcp`]: continuous phases with von Mises nonclassical components;
//!   handles correlations of any order.
//! - [`qcp`]: discrete qubit phases; estimates permanents and
//!   permanent-squared coincidence rates at maximum order with much lower
//!   variance.
//!
//! [`exact`] supplies oracles (Ryser permanents, Fock-space enumeration, the
//! analytic QuFTI count rate) and [`experiments`] runs fringe scans, phase
//! noise sweeps and contour-radius sweeps on top of both.
//!
//! ```
//! use qufti::networks::{build_qufti, PhaseProfile};
//! use qufti::exact::{permanent_ryser, q_conjecture};
//!
//! let v = build_qufti(6, &PhaseProfile::noiseless(6, 0.05)).unwrap();
//! let q = permanent_ryser(&v).unwrap().norm_sqr();
//! assert!((q - q_conjecture(6, 0.05).unwrap()).abs() < 1e-12);
//! ```

pub mod cli;
pub mod error;
pub mod estimate;
pub mod exact;
pub mod experiments;
pub mod matrix;
pub mod networks;
pub mod output;
pub mod qcp;
pub mod rng;
pub mod special;
pub mod vcp;
pub mod von_mises;

pub use error::{Error, Result};
pub use estimate::{Ensemble, EstimateResult, Method};
pub use matrix::ComplexMatrix;
pub use networks::{PhaseProfile, UnitaryMatrix};
pub use num_complex::Complex64;
