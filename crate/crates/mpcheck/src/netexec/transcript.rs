//! Per-session transcript files.
//!
//! A transcript is a 16-byte header — magic `MPCT`, format version,
//! session type, role, a reserved byte, and the party's 64-bit seed —
//! followed by a log of direction-prefixed frames. Inputs and the final
//! output are recorded as `Local` entries, so a transcript alone is
//! enough to re-derive everything the role did: replaying it through the
//! protocol state machine must reproduce each sent frame and the output
//! byte for byte.

use std::fmt;
use std::fs;
use std::io::{self, Read};
use std::path::Path;

use super::wire::{Frame, WireError};

pub const TRANSCRIPT_MAGIC: [u8; 4] = *b"MPCT";
pub const TRANSCRIPT_VERSION: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Sent = 0,
    Received = 1,
    Local = 2,
}

impl Direction {
    fn from_byte(b: u8) -> Option<Direction> {
        match b {
            0 => Some(Direction::Sent),
            1 => Some(Direction::Received),
            2 => Some(Direction::Local),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub direction: Direction,
    pub frame: Frame,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranscriptHeader {
    pub version: u8,
    pub session_type: u8,
    pub role_byte: u8,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub header: TranscriptHeader,
    pub entries: Vec<TranscriptEntry>,
}

#[derive(Debug)]
pub enum TranscriptError {
    Io(io::Error),
    BadMagic,
    BadVersion(u8),
    BadDirection(u8),
    Frame(WireError),
}

impl fmt::Display for TranscriptError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TranscriptError::Io(e) => write!(f, "io error: {}", e),
            TranscriptError::BadMagic => write!(f, "not a transcript file"),
            TranscriptError::BadVersion(v) => write!(f, "unsupported transcript version {}", v),
            TranscriptError::BadDirection(b) => write!(f, "bad direction byte 0x{:02x}", b),
            TranscriptError::Frame(e) => write!(f, "bad frame: {}", e),
        }
    }
}

impl std::error::Error for TranscriptError {}

impl From<io::Error> for TranscriptError {
    fn from(e: io::Error) -> Self {
        TranscriptError::Io(e)
    }
}

impl From<WireError> for TranscriptError {
    fn from(e: WireError) -> Self {
        TranscriptError::Frame(e)
    }
}

impl Transcript {
    pub fn new(session_type: u8, role_byte: u8, seed: u64) -> Self {
        Transcript {
            header: TranscriptHeader {
                version: TRANSCRIPT_VERSION,
                session_type,
                role_byte,
                seed,
            },
            entries: Vec::new(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&TRANSCRIPT_MAGIC);
        out.push(self.header.version);
        out.push(self.header.session_type);
        out.push(self.header.role_byte);
        out.push(0);
        out.extend_from_slice(&self.header.seed.to_be_bytes());
        for entry in &self.entries {
            out.push(entry.direction as u8);
            out.extend_from_slice(&entry.frame.to_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Transcript, TranscriptError> {
        if bytes.len() < 16 {
            return Err(TranscriptError::BadMagic);
        }
        if bytes[..4] != TRANSCRIPT_MAGIC {
            return Err(TranscriptError::BadMagic);
        }
        let version = bytes[4];
        if version != TRANSCRIPT_VERSION {
            return Err(TranscriptError::BadVersion(version));
        }
        let header = TranscriptHeader {
            version,
            session_type: bytes[5],
            role_byte: bytes[6],
            seed: u64::from_be_bytes(bytes[8..16].try_into().expect("eight bytes")),
        };
        let mut rest = &bytes[16..];
        let mut entries = Vec::new();
        while !rest.is_empty() {
            let direction =
                Direction::from_byte(rest[0]).ok_or(TranscriptError::BadDirection(rest[0]))?;
            rest = &rest[1..];
            let (frame, remainder) = Frame::from_bytes(rest)?;
            rest = remainder;
            entries.push(TranscriptEntry { direction, frame });
        }
        Ok(Transcript { header, entries })
    }

    pub fn write_file(&self, path: &Path) -> Result<(), TranscriptError> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<Transcript, TranscriptError> {
        let mut bytes = Vec::new();
        fs::File::open(path)?.read_to_end(&mut bytes)?;
        Transcript::from_bytes(&bytes)
    }

    /// The frames recorded with a given direction, in order.
    pub fn frames(&self, direction: Direction) -> impl Iterator<Item = &Frame> {
        self.entries
            .iter()
            .filter(move |e| e.direction == direction)
            .map(|e| &e.frame)
    }

    /// The single local frame with the given tag, if present.
    pub fn local(&self, tag: u8) -> Option<&Frame> {
        self.frames(Direction::Local).find(|f| f.tag == tag)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netexec::wire::{TAG_MSG_A, TAG_OUTPUT};

    #[test]
    fn roundtrip() {
        let mut t = Transcript::new(0x01, 0, 42);
        t.entries.push(TranscriptEntry {
            direction: Direction::Sent,
            frame: Frame::new(0x01, TAG_MSG_A, vec![0, 0, 0, 0, 0, 0, 0, 3]),
        });
        t.entries.push(TranscriptEntry {
            direction: Direction::Local,
            frame: Frame::new(0x01, TAG_OUTPUT, vec![7]),
        });
        let bytes = t.to_bytes();
        assert_eq!(&bytes[..4], b"MPCT");
        assert!(bytes.len() >= 16);
        let back = Transcript::from_bytes(&bytes).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.frames(Direction::Sent).count(), 1);
        assert!(back.local(TAG_OUTPUT).is_some());
    }

    #[test]
    fn bad_magic_rejected() {
        assert!(matches!(
            Transcript::from_bytes(b"NOPE000000000000"),
            Err(TranscriptError::BadMagic)
        ));
    }
}
