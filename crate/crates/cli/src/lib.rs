//! Library surface of the command-line tool: report types and the
//! verification suites, shared with the acceptance test target.

pub mod report;
pub mod suites;
