//! Divide-and-conquer partitioning for SMT problems.
//!
//! The crate bundles an instrumented CDCL(T) solver for QF_UF and QF_IDL
//! ([`solver`]), the partitioning strategies it drives from its decision
//! callback ([`partition`]), portfolio planning ([`portfolio`]) and an
//! execution and scoring harness ([`harness`]).

pub mod cli;
pub mod frontend;
pub mod harness;
pub mod partition;
pub mod portfolio;
pub mod solver;
pub mod testing;
