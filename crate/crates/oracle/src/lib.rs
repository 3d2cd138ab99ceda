//! Reference oracles for the test suites.
//!
//! Everything here is deliberately written against explicit matrices or
//! brute-force search and shares no code with `tvadal-core`, so that the
//! checks built on it are independent of the implementation under test.

pub mod dense;
pub mod gridsearch;
pub mod rof;
pub mod steps;
