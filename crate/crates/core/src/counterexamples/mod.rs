//! Explicit constructions showing where hypotheses are needed.

pub mod c0;
pub mod petrunin;

pub use c0::{c0_convergence_demos, C0Demos};
pub use petrunin::{
    build_petrunin, curve_residuals, flow_agreement_check, halving_check, oscillation_report, OffsetSchedule,
    PetruninConfig, PetruninInstance,
};
