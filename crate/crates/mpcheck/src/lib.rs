//! Networked harness and command-line front end for the verification
//! workbench in `mpcheck-core`: live protocol sessions over TCP with
//! transcript capture and replay, seeded view sampling, and the `mpcheck`
//! binary driving the check suites.

pub mod cli;
pub mod netexec;
pub mod registry;
