//! Networked execution of the protocols: framing, sessions, transcripts,
//! and seeded view sampling.

pub mod sample;
pub mod session;
pub mod transcript;
pub mod wire;

pub use sample::{sample_view, PartySeeds, SampledViews};
pub use session::{
    replay, serve, serve_on, InputMap, Protocol, Role, SessionConfig, SessionError, SessionParams,
    SessionSummary,
};
pub use transcript::{Direction, Transcript, TranscriptError};
pub use wire::{Frame, WireError};
