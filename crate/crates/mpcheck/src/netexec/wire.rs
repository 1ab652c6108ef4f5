//! Framed binary messages and fixed-width value encodings.
//!
//! Every message on the wire is a frame: a 4-byte big-endian length
//! (counting the bytes after the length field), a session-type byte, a
//! message-tag byte, and a payload whose size is fixed per
//! `(session_type, tag)`. Field and group elements travel as 8-byte
//! big-endian words; bits as a single `0x00`/`0x01` byte.

use std::fmt;
use std::io::{self, Read, Write};

use mpcheck_core::algebra::{Field, FieldElem, GroupDesc, GroupElem};
use mpcheck_core::bitot_and::Bit;

pub const SESSION_SECMULT: u8 = 0x01;
pub const SESSION_NP_OT: u8 = 0x02;
pub const SESSION_BIT_OT: u8 = 0x03;
pub const SESSION_AND_GATE: u8 = 0x04;

pub const TAG_HELLO: u8 = 0x00;
pub const TAG_TI_SHARE: u8 = 0x01;
/// First protocol message of a session (direction depends on protocol).
pub const TAG_MSG_A: u8 = 0x02;
/// Second protocol message.
pub const TAG_MSG_B: u8 = 0x03;
/// Transcript-only record of the role's inputs.
pub const TAG_INPUT: u8 = 0xF1;
/// Transcript-only record of the role's final output.
pub const TAG_OUTPUT: u8 = 0xF0;
pub const TAG_ERROR: u8 = 0xFF;

pub const REASON_PARAM_MISMATCH: u8 = 0x01;
pub const REASON_MALFORMED: u8 = 0x02;
pub const REASON_UNEXPECTED: u8 = 0x03;

pub const HELLO_VERSION: u8 = 1;

/// Frames larger than this are rejected outright; nothing in the protocol
/// set comes close.
pub const MAX_FRAME_LEN: u32 = 4096;

#[derive(Debug)]
pub enum WireError {
    Io(io::Error),
    /// Length field exceeds [`MAX_FRAME_LEN`] or is shorter than a header.
    BadLength(u32),
    /// Payload size does not match the fixed size for the tag.
    PayloadSize {
        tag: u8,
        len: usize,
    },
    /// A decoded value is outside its domain.
    OutOfRange(u64),
    BadBit(u8),
}

impl fmt::Display for WireError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WireError::Io(e) => write!(f, "io error: {}", e),
            WireError::BadLength(n) => write!(f, "bad frame length {}", n),
            WireError::PayloadSize { tag, len } => {
                write!(f, "payload of {} bytes for tag 0x{:02x}", len, tag)
            }
            WireError::OutOfRange(v) => write!(f, "value {} out of range", v),
            WireError::BadBit(b) => write!(f, "byte 0x{:02x} is not a bit", b),
        }
    }
}

impl std::error::Error for WireError {}

impl From<io::Error> for WireError {
    fn from(e: io::Error) -> Self {
        WireError::Io(e)
    }
}

/// One wire message, sans the length prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub session_type: u8,
    pub tag: u8,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn new(session_type: u8, tag: u8, payload: Vec<u8>) -> Self {
        Frame {
            session_type,
            tag,
            payload,
        }
    }

    /// Serializes with the length prefix.
    pub fn to_bytes(&self) -> Vec<u8> {
        let len = (self.payload.len() + 2) as u32;
        let mut out = Vec::with_capacity(self.payload.len() + 6);
        out.extend_from_slice(&len.to_be_bytes());
        out.push(self.session_type);
        out.push(self.tag);
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<(), WireError> {
        w.write_all(&self.to_bytes())?;
        w.flush()?;
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Frame, WireError> {
        let mut len_bytes = [0u8; 4];
        r.read_exact(&mut len_bytes)?;
        let len = u32::from_be_bytes(len_bytes);
        if !(2..=MAX_FRAME_LEN).contains(&len) {
            return Err(WireError::BadLength(len));
        }
        let mut body = vec![0u8; len as usize];
        r.read_exact(&mut body)?;
        Ok(Frame {
            session_type: body[0],
            tag: body[1],
            payload: body[2..].to_vec(),
        })
    }

    /// Parses one frame from a byte slice, returning the remainder.
    pub fn from_bytes(bytes: &[u8]) -> Result<(Frame, &[u8]), WireError> {
        let mut cursor = bytes;
        let frame = Frame::read_from(&mut cursor)?;
        Ok((frame, cursor))
    }
}

pub fn encode_field(v: FieldElem) -> [u8; 8] {
    v.value().to_be_bytes()
}

pub fn encode_group(e: GroupElem) -> [u8; 8] {
    e.encoded().to_be_bytes()
}

pub fn encode_bit(b: Bit) -> u8 {
    b.as_u8()
}

/// Sequential reader over a fixed-size payload; every decode checks its
/// domain and [`PayloadReader::finish`] rejects trailing bytes.
pub struct PayloadReader<'a> {
    tag: u8,
    bytes: &'a [u8],
}

impl<'a> PayloadReader<'a> {
    pub fn new(frame: &'a Frame) -> Self {
        PayloadReader {
            tag: frame.tag,
            bytes: &frame.payload,
        }
    }

    fn size_err(&self) -> WireError {
        WireError::PayloadSize {
            tag: self.tag,
            len: self.bytes.len(),
        }
    }

    pub fn word(&mut self) -> Result<u64, WireError> {
        if self.bytes.len() < 8 {
            return Err(self.size_err());
        }
        let (head, rest) = self.bytes.split_at(8);
        self.bytes = rest;
        Ok(u64::from_be_bytes(head.try_into().expect("eight bytes")))
    }

    pub fn byte(&mut self) -> Result<u8, WireError> {
        let (&head, rest) = self.bytes.split_first().ok_or_else(|| self.size_err())?;
        self.bytes = rest;
        Ok(head)
    }

    pub fn field(&mut self, field: &Field) -> Result<FieldElem, WireError> {
        let v = self.word()?;
        if v >= field.modulus() {
            return Err(WireError::OutOfRange(v));
        }
        Ok(field.elem(v))
    }

    pub fn group(&mut self, desc: &GroupDesc) -> Result<GroupElem, WireError> {
        let v = self.word()?;
        desc.from_encoded(v).map_err(|_| WireError::OutOfRange(v))
    }

    pub fn bit(&mut self) -> Result<Bit, WireError> {
        match self.byte()? {
            0 => Ok(Bit(false)),
            1 => Ok(Bit(true)),
            b => Err(WireError::BadBit(b)),
        }
    }

    pub fn finish(self) -> Result<(), WireError> {
        if self.bytes.is_empty() {
            Ok(())
        } else {
            Err(self.size_err())
        }
    }
}
