//! Modulus gradients of holomorphic maps between complex unit balls.
//!
//! For `f: B^n -> B^m` holomorphic the modulus `|f|` satisfies
//!
//! ```text
//! |grad |f|(z)| <= (1 - |f(z)|^2) / (1 - |z|^2)
//! ```
//!
//! This crate evaluates both sides for concrete maps, builds the maps that
//! attain equality along a complex line, checks whether a given map has that
//! form, and runs randomized campaigns against a finite-difference oracle.

pub mod cli;
pub mod complex;
pub mod error;
pub mod extremal;
pub mod geometry;
pub mod harness;
pub mod holomap;
pub mod modulus;
pub mod spec;

pub use complex::{herm_inner, sample_unit_sphere, spectral_norm, CMatrix, CScalar, CVector};
pub use error::{Error, Result};
pub use extremal::{
    diagnose_equality_form, extremal_map, extremal_nonzero_case, extremal_zero_case, Diagnosis,
    ExtremalCase, ExtremalSpec,
};
pub use geometry::{bound_factor, disk_slice, in_ball, BoundFactor, DiskSlice};
pub use harness::{fuzz_campaign, gen_random_polymap, CampaignReport, FuzzConfig};
pub use holomap::{HoloMap, PolyMap};
pub use modulus::{
    equality_gap, mod_grad, mod_grad_fd, sp_bound, sp_bound_slice, BoundReport, Branch, FdParams,
    GradResult,
};
pub use spec::{emit_spec, parse_spec, parse_spec_str};
