//! Library surface of the `dce` batch front end: configuration parsing and
//! run execution, kept separate from the binary for direct testing.

pub mod config;
pub mod run;
