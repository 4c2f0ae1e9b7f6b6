//! Gaussian-state tomography from coarse-grained homodyne data.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coarse;
pub mod decoherence;
pub mod direct;
pub mod error;
pub mod experiments;
pub mod gaussian;
pub mod metrics;
pub mod mle;
pub mod selftest;
pub mod simplex;
