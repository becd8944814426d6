//! Exact jet engine for normal-ordered star exponentials.

pub mod expr;
pub mod fps;
pub mod kcalc;
pub mod numeric;
pub mod realization;
pub mod weyl;

pub use fps::{
    Complex64, FpsError, GaussRational, MultiIndex, SeriesVector, TermRecord, TruncatedSeries,
    WeylTermRecord,
};
pub use kcalc::{ASequence, DSeries, KSeries, KcalcError, MomentumCoproduct};
pub use numeric::{
    cross_check, k_ode_integrate, CrossCheckReport, CrossCheckTolerances, NumericError, OdeProblem,
    OdeResult,
};
pub use realization::{Realization, StructureConstants};
pub use weyl::{WeylElement, WeylError};
