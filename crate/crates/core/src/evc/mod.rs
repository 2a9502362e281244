//! Essential-value witnesses, certificates over a finite schedule, and the
//! skew-product connectivity oracle.

mod certificate;
mod skew;
mod witness;

pub use certificate::{
    delta_for, essential_value_certificate, ring, EssentialValueReport, EvcBudget, EvcRecord,
    Verdict,
};
pub use skew::{
    skew_connectivity, skew_edges, skew_ladder, skew_ladder_all, ConnectivityReport, MAX_SKEW_VERTICES,
};
pub use witness::{check_evc, validate_witness, witness_from, EvcWitness, LabelledCocycle};
