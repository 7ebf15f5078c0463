//! Documents, generators, trace files, reports and the command-line front
//! end around `tpwalk-core`.

pub mod cli;
pub mod instances;
pub mod report;
pub mod search;
pub mod trace;
