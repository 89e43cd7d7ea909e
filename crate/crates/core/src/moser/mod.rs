//! Moser isotopies for families of lcs forms.

pub mod family;
pub mod flow;
pub mod generators;
pub mod pipeline;
pub mod verify;

pub use family::{finite_difference, ExactPrimitive, FamilyGenerator, FormFamily};
pub use flow::{integrate_isotopy, FieldSampler, FlowOptions, FlowState, FnSampler, StageField};
pub use generators::{AreaInterpolation, ContactCircle, GcsRescale, LinearFamily, Rescaled, Tabulated};
pub use pipeline::{
    convergence_study, exactness_certificate, moser_vector_field, normalize_family, run_exact_family,
    run_theorem_pipeline, CheckpointRecord, ConvergencePoint, MoserOptions, MoserReport, PathKind,
};
pub use verify::{conformal_compare, pullback_form, verify_eq1};
