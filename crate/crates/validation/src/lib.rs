//! Holds the workspace acceptance suite in `tests/acceptance.rs`.
//!
//! Kept as its own package so that cargo runs it after every other test binary.
