//! Steganalysis feature extraction and wrapper feature selection.
//!
//! Four feature families are extracted from grayscale or color images:
//!
//! - [`features::wam`]: absolute moments of quasi-Wiener wavelet residuals (27)
//! - [`features::iqm`]: image quality metrics against a blurred reference (19)
//! - [`features::fridrich`]: calibrated DCT-domain functionals (23)
//! - [`features::hos`]: multi-scale wavelet statistics and predictor errors (72)
//!
//! Feature subsets are chosen with a genetic algorithm whose elite is
//! refined by Markov-blanket Add/Del local search ([`mbega`]), and scored
//! with linear classifiers ([`classify`]). [`pipeline`] ties the stages
//! together behind the command-line tool.

pub mod classify;
pub mod dataset;
pub mod error;
pub mod features;
pub mod imagedata;
pub mod mbega;
pub mod pipeline;
pub mod rng;
pub mod transforms;

pub use error::{Error, Result};
