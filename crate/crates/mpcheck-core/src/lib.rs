//! Exact verification of simulation-based security for small two-party MPC
//! protocols.
//!
//! Everything in this crate is computed over exact rational arithmetic, so
//! "these two view distributions are equal" is a decidable statement rather
//! than a sampling estimate. The crate provides:
//!
//! * [`dist`] — a finite subprobability-distribution monad with exact
//!   rational masses,
//! * [`algebra`] — prime fields, a prime-order cyclic group with two
//!   backends, and the DDH random self-reduction,
//! * [`secmult`] — a secure-multiplication protocol with trusted
//!   initializer, its real views and simulators,
//! * [`np_ot`] — the Naor-Pinkas 1-out-of-2 oblivious transfer, its views,
//!   simulators and the DDH reduction,
//! * [`bitot_and`] — single-bit OT with trusted initializer and the AND
//!   gate built on it,
//! * [`secframe`] — ensembles, perfect/statistical indistinguishability
//!   checks, correctness checks and hybrid bounds,
//! * [`suites`] — the named check suites driven by the `mpcheck` CLI.
//!
//! The crate is `no_std` (with `alloc`); all IO, networking and file
//! formats live in the companion `mpcheck` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod algebra;
pub mod bitot_and;
pub mod dist;
pub mod np_ot;
pub mod rational;
pub mod rng;
pub mod secframe;
pub mod secmult;
pub mod suites;

pub use dist::Dist;
pub use rational::Rational;
