//! Step functions into a group, coboundaries, cocycle kernels, the distance on
//! cocycles and the inner / incremental predicates.

mod kernel;
mod predicates;
mod step;

pub use kernel::{
    check_group_kernel, check_rational_kernel, coboundary_kernel, cocycle_check,
    radon_nikodym_kernel, CocycleKernel, KernelViolation, MAX_KERNEL_DEPTH,
};
pub use predicates::{
    dist, is_incremental, is_inner, ApproxRound, CocycleApproximant, Dist, PredicateReport,
    stabilization_entries, StabilizationEntry,
};
pub use step::{delta, ExtendedStepFunction, Increment, StepFunction};
