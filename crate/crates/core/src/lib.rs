//! Two-phase torsion problems with a Serrin-type overdetermined condition:
//! radial solutions, their linearization, symmetry-breaking branches, the
//! integral identities behind the rigidity argument, and the shifted-ball
//! counterexample.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod annulus;
pub mod branch;
pub mod cli;
pub mod counterexample;
pub mod error;
pub mod field;
pub mod harmonics;
pub mod identities;
pub mod linearization;
pub mod radial;
pub mod selftest;

pub use error::{Error, Result};
