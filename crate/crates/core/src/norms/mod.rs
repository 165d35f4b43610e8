//! Carleson-measure, BMO and weak-Carleson norms, the `T_{a,b,c}` operator
//! family and the harnesses built on them.

pub mod bmo;
pub mod carleson;
pub mod tents;

pub use bmo::{
    bmo_norm, bmoa_ratio, bmoa_witness, cap_oscillation, sampled_bmoa_witness, BmoaRatio, CapGrid,
};
pub use carleson::{cm_norm, mu_gm_density, wx_norm, ApexValue, NormReport};
pub use tents::{
    cap_integral, from_frame, sphere_directions, tent_integral, unitary_frame, SliceRule, TentGrid,
};
pub mod tabc;

pub use tabc::{
    classify, tabc_apply, tabc_bump_norm, tabc_region_harness, CurvePoint, DiskBump,
    HarnessOptions, HarnessReport, TabcParams, Verdict,
};
pub mod multilinear;

pub use multilinear::{
    bp_sigma_surrogate, hardy_norm_sqr, multilinear_harness, multilinear_lhs, multilinear_ratio,
    sup_norm_boundary, MultilinearRatio, MultilinearReport,
};
pub mod annulus;

pub use annulus::{annulus_check, annulus_sweep, AnnulusReport};
