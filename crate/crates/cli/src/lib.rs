//! Input documents and report types for the `addobs` command line tool.

pub mod input;
pub mod report;

pub enum Failure {
    /// Exit 1: unreadable or malformed input, bad flags.
    Usage(String),
    /// Exit 2: well-formed input that fails a physical check.
    Domain(String),
}
