//! Extended affine Weyl group of type C̃2, EKOR strata of the basic locus
//! for `μ = (1/2, 1/2)`, the `Σ_K` level maps between them, and a finite
//! lattice model for the strata at paramodular level.

pub mod cli;
pub mod conformance;
pub mod ekor;
pub mod golden;
pub mod lattice;
pub mod weyl;
