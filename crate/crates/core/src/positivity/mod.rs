//! Positivity certificates: Gram matrices on the two sectors that reduce
//! `T(a rho(a)) > 0`, sign checks of `w` and `z^k P(z) w(qz)` on the unit
//! circle, the paired-zero construction of positive traces, and the full
//! classification pipeline.

mod circle;
mod classify;
mod gram;
mod pairing;

pub use circle::{circle_positivity, CircleEvaluator, CircleFunction, CirclePositivityReport};
pub use classify::{
    auto_oracle_window, classify, construct, AnnulusCheck, AnsatzSummary, ClassificationReport,
    ClassifyOptions, ConfigEcho, Construction, MomentBoundReport, MultiplierCheck, NullspaceCheck,
    OracleAgreement, Residuals, Verdict, MULTIPLIER_TOL, ORACLE_COMPARE_RANGE,
};
pub use gram::{
    assess, gram_laurent, gram_u_sector, laurent_gram_matrix, u_sector_closed_form,
    u_sector_gram_matrix, GramBasis, GramReport, GramVerdict,
};
pub use pairing::{
    build_paired_ansatz, default_free_zeros, partner, PairedAnsatz, PAIR_MODULUS_TOL,
};
