//! Command-line front end for `ipgkit`: JSON instance files, solver
//! dispatch, instance generation and benchmark runs.

pub mod commands;
pub mod io;
pub mod record;
