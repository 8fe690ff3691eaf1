//! Command-line front end for `tvgap`: input files, report documents and the
//! `bound`, `paper-examples`, `verify` and `scan` commands.

// `!(a > b)` comparisons are used so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod error;
pub mod report;
pub mod spec_file;
