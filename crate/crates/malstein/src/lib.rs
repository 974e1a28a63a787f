//! File formats, report serialization, threaded sampling and the command
//! line for `malstein-core`.

pub mod cli;
pub mod io;
pub mod output;
pub mod parallel;
