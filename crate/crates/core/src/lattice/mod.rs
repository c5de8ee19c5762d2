//! Finite equal-characteristic model of Dieudonné lattices: `W(F)` is
//! replaced by `F_Q[[t]]`, σ by the coefficient Frobenius and `p` by `t`.

pub mod field;
pub mod model;
pub mod points;
pub mod search;

use thiserror::Error;

pub use field::{FieldSpec, FiniteField};
pub use model::{LatticeDisplay, LatticeExport, Model, ModelLattice};
pub use points::{
    base_point, classify, enumerate_web, is_point, partner_report, spin_check, spin_index,
    unique_partner_check, Inclusion, PartnerReport, Side, Stratum, Web, WebPair,
};
pub use search::{
    explore, find_base_points, hyperplane_census, hyperplane_lattices, SearchConfig, SearchOutcome,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("no built-in defining polynomial for p = {p}, j = {j}")]
    UnsupportedField { p: u32, j: u32 },
    #[error("built-in modulus for p = {p}, j = {j} is reducible")]
    ReducibleModulus { p: u32, j: u32 },
    #[error("lattice leaves the representable window")]
    WindowOverflow,
    #[error("first lattice is not contained in the second")]
    NotContained,
    #[error("quotient is not a two-dimensional F_Q-space")]
    NotAPlane,
    #[error("lattice is not a valid point")]
    NotAPoint,
    #[error("operation is not defined for stratum {0}")]
    WrongStratum(Stratum),
    #[error("unknown stratum `{0}`")]
    UnknownStratum(String),
    #[error("malformed lattice export")]
    BadExport,
    #[error("search needs Q >= {min}, got {q}")]
    FieldTooSmall { q: u32, min: u32 },
    #[error("no {stratum} point found at Q = {q} after {examined} of {budget} candidates")]
    NotFound {
        stratum: Stratum,
        q: u32,
        budget: usize,
        examined: usize,
    },
    #[error("candidate {candidate} has {partners} partners")]
    Violation { candidate: String, partners: usize },
}
