//! Sensing-SNR simulation and beamforming optimization for IRS-enabled
//! NLoS target sensing.
//!
//! The library models a base station that senses a target through an
//! intelligent reflecting surface (IRS), in two architectures: fully-passive
//! (echoes return through the IRS to the BS) and semi-passive (dedicated
//! sensors at the IRS). It provides:
//!
//! - complex Hermitian linear algebra primitives ([`linalg`]),
//! - scenario geometry, steering vectors and channel construction ([`channel`]),
//! - SNR evaluation and transmit covariance design ([`snr`]),
//! - a unit-diagonal complex SDP solver ([`sdp`]),
//! - reflective beamforming optimizers ([`beamform`]),
//! - closed-form asymptotic laws and crossover thresholds ([`analysis`]),
//! - a reproducible sweep harness with CSV output ([`config`], [`sweep`]).

pub mod analysis;
pub mod beamform;
pub mod channel;
pub mod config;
pub mod linalg;
pub mod sdp;
pub mod snr;
pub mod sweep;

pub use num_complex::Complex64;
