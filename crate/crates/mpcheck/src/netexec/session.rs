//! Protocol sessions over byte streams.
//!
//! Each session runs exactly one protocol instance between two parties
//! (plus a trusted initializer endpoint where the protocol uses one). A
//! connecting endpoint opens with a hello frame carrying its role and the
//! session parameters; the acceptor validates and replies with its own
//! hello, so a parameter mismatch aborts both sides with an error frame
//! before any protocol message flows.
//!
//! All party randomness is drawn in a fixed order from a counter-based
//! generator seeded per party, so a session is a pure function of
//! `(inputs, seeds)`: rerunning it reproduces the transcript byte for
//! byte, and `replay` re-derives every sent frame and the output from a
//! stored transcript.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::net::{TcpListener, TcpStream};
use std::path::PathBuf;
use std::rc::Rc;
use std::sync::mpsc;
use std::time::Duration;

use mpcheck_core::algebra::{sr_apply, AlgebraError, Field, FieldElem, GroupDesc, GroupElem};
use mpcheck_core::bitot_and::Bit;
use mpcheck_core::np_ot::{decrypt, Ciphertext, NpReceiverView, NpSenderView};
use mpcheck_core::rng::CounterRng;
use mpcheck_core::secmult::TripleShares;

use super::transcript::{Direction, Transcript, TranscriptEntry, TranscriptError};
use super::wire::{
    encode_bit, encode_field, encode_group, Frame, PayloadReader, WireError, HELLO_VERSION,
    REASON_PARAM_MISMATCH, REASON_UNEXPECTED, SESSION_AND_GATE, SESSION_BIT_OT, SESSION_NP_OT,
    SESSION_SECMULT, TAG_ERROR, TAG_HELLO, TAG_INPUT, TAG_MSG_A, TAG_MSG_B, TAG_OUTPUT,
    TAG_TI_SHARE,
};

/// Largest field/group order accepted for networked execution.
pub const MAX_WIRE_Q: u64 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Role {
    P1,
    P2,
    Ti,
}

impl Role {
    pub fn byte(&self) -> u8 {
        match self {
            Role::P1 => 0,
            Role::P2 => 1,
            Role::Ti => 2,
        }
    }

    pub fn from_byte(b: u8) -> Option<Role> {
        match b {
            0 => Some(Role::P1),
            1 => Some(Role::P2),
            2 => Some(Role::Ti),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Role::P1 => "p1",
            Role::P2 => "p2",
            Role::Ti => "ti",
        }
    }

    pub fn parse(s: &str) -> Option<Role> {
        match s {
            "p1" => Some(Role::P1),
            "p2" => Some(Role::P2),
            "ti" => Some(Role::Ti),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    Secmult,
    NpOt,
    BitOt,
    AndGate,
}

impl Protocol {
    pub fn session_type(&self) -> u8 {
        match self {
            Protocol::Secmult => SESSION_SECMULT,
            Protocol::NpOt => SESSION_NP_OT,
            Protocol::BitOt => SESSION_BIT_OT,
            Protocol::AndGate => SESSION_AND_GATE,
        }
    }

    pub fn from_session_type(b: u8) -> Option<Protocol> {
        match b {
            SESSION_SECMULT => Some(Protocol::Secmult),
            SESSION_NP_OT => Some(Protocol::NpOt),
            SESSION_BIT_OT => Some(Protocol::BitOt),
            SESSION_AND_GATE => Some(Protocol::AndGate),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Protocol::Secmult => "secmult",
            Protocol::NpOt => "np-ot",
            Protocol::BitOt => "bit-ot",
            Protocol::AndGate => "and-gate",
        }
    }

    pub fn parse(s: &str) -> Option<Protocol> {
        match s {
            "secmult" => Some(Protocol::Secmult),
            "np-ot" => Some(Protocol::NpOt),
            "bit-ot" => Some(Protocol::BitOt),
            "and-gate" => Some(Protocol::AndGate),
            _ => None,
        }
    }

    /// Whether the protocol pre-distributes correlated randomness through
    /// a trusted initializer endpoint.
    pub fn uses_ti(&self) -> bool {
        !matches!(self, Protocol::NpOt)
    }

    /// The input names each role must supply, in wire order.
    pub fn input_keys(&self, role: Role) -> &'static [&'static str] {
        match (self, role) {
            (Protocol::Secmult, Role::P1) => &["x"],
            (Protocol::Secmult, Role::P2) => &["y"],
            (Protocol::NpOt, Role::P1) => &["m0", "m1"],
            (Protocol::NpOt, Role::P2) => &["v"],
            (Protocol::BitOt, Role::P1) => &["m0", "m1"],
            (Protocol::BitOt, Role::P2) => &["b"],
            (Protocol::AndGate, Role::P1) => &["a"],
            (Protocol::AndGate, Role::P2) => &["b"],
            (_, Role::Ti) => &[],
        }
    }
}

/// Validated session parameters shared by all endpoints of a session.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SessionParams {
    pub protocol: Protocol,
    pub q: u64,
    pub group: Option<GroupDesc>,
}

impl SessionParams {
    pub fn new(protocol: Protocol, q: u64) -> Result<Self, SessionError> {
        match protocol {
            Protocol::Secmult => {
                if q >= MAX_WIRE_Q {
                    return Err(SessionError::BadConfig(format!(
                        "q = {} exceeds the wire bound 2^31",
                        q
                    )));
                }
                Field::new(q)?;
                Ok(SessionParams {
                    protocol,
                    q,
                    group: None,
                })
            }
            Protocol::NpOt => {
                // Sessions never run in exponent space: the offered tuple
                // would hand the sender every discrete log.
                let group = GroupDesc::schnorr(q)?;
                Ok(SessionParams {
                    protocol,
                    q,
                    group: Some(group),
                })
            }
            Protocol::BitOt | Protocol::AndGate => Ok(SessionParams {
                protocol,
                q: 2,
                group: None,
            }),
        }
    }

    fn session_type(&self) -> u8 {
        self.protocol.session_type()
    }

    fn field(&self) -> Field {
        Field::new(self.q).expect("validated prime")
    }
}

pub type InputMap = BTreeMap<String, u64>;

#[derive(Debug)]
pub enum SessionError {
    Io(io::Error),
    Wire(WireError),
    Transcript(TranscriptError),
    Algebra(AlgebraError),
    /// Hello validation failed; carries a description of the mismatch.
    ParamMismatch(String),
    /// The peer reported an error frame with this reason code.
    PeerError(u8),
    /// A frame with an unexpected tag arrived.
    Unexpected {
        expected: u8,
        got: u8,
    },
    BadConfig(String),
    MissingInput(&'static str),
    ChannelClosed,
    ReplayMismatch(String),
}

impl fmt::Display for SessionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SessionError::Io(e) => write!(f, "io error: {}", e),
            SessionError::Wire(e) => write!(f, "wire error: {}", e),
            SessionError::Transcript(e) => write!(f, "transcript error: {}", e),
            SessionError::Algebra(e) => write!(f, "{}", e),
            SessionError::ParamMismatch(s) => write!(f, "parameter mismatch: {}", s),
            SessionError::PeerError(r) => write!(f, "peer aborted with reason 0x{:02x}", r),
            SessionError::Unexpected { expected, got } => {
                write!(f, "expected tag 0x{:02x}, got 0x{:02x}", expected, got)
            }
            SessionError::BadConfig(s) => write!(f, "bad configuration: {}", s),
            SessionError::MissingInput(k) => write!(f, "missing input {}", k),
            SessionError::ChannelClosed => write!(f, "peer disconnected"),
            SessionError::ReplayMismatch(s) => write!(f, "replay mismatch: {}", s),
        }
    }
}

impl std::error::Error for SessionError {}

impl From<io::Error> for SessionError {
    fn from(e: io::Error) -> Self {
        SessionError::Io(e)
    }
}

impl From<WireError> for SessionError {
    fn from(e: WireError) -> Self {
        SessionError::Wire(e)
    }
}

impl From<TranscriptError> for SessionError {
    fn from(e: TranscriptError) -> Self {
        SessionError::Transcript(e)
    }
}

impl From<AlgebraError> for SessionError {
    fn from(e: AlgebraError) -> Self {
        SessionError::Algebra(e)
    }
}

/// A bidirectional ordered frame stream.
pub trait Endpoint {
    fn send(&mut self, frame: &Frame) -> Result<(), SessionError>;
    fn recv(&mut self) -> Result<Frame, SessionError>;
}

pub struct TcpEndpoint {
    stream: TcpStream,
}

impl TcpEndpoint {
    pub fn new(stream: TcpStream) -> Self {
        let _ = stream.set_nodelay(true);
        TcpEndpoint { stream }
    }
}

impl Endpoint for TcpEndpoint {
    fn send(&mut self, frame: &Frame) -> Result<(), SessionError> {
        frame.write_to(&mut self.stream)?;
        Ok(())
    }

    fn recv(&mut self) -> Result<Frame, SessionError> {
        Ok(Frame::read_from(&mut self.stream)?)
    }
}

/// In-process endpoint over channels, for harness-internal sessions.
pub struct ChannelEndpoint {
    tx: mpsc::Sender<Frame>,
    rx: mpsc::Receiver<Frame>,
}

/// A connected pair of in-process endpoints.
pub fn channel_pair() -> (ChannelEndpoint, ChannelEndpoint) {
    let (tx_a, rx_b) = mpsc::channel();
    let (tx_b, rx_a) = mpsc::channel();
    (
        ChannelEndpoint { tx: tx_a, rx: rx_a },
        ChannelEndpoint { tx: tx_b, rx: rx_b },
    )
}

impl Endpoint for ChannelEndpoint {
    fn send(&mut self, frame: &Frame) -> Result<(), SessionError> {
        self.tx
            .send(frame.clone())
            .map_err(|_| SessionError::ChannelClosed)
    }

    fn recv(&mut self) -> Result<Frame, SessionError> {
        self.rx.recv().map_err(|_| SessionError::ChannelClosed)
    }
}

/// Shared transcript log for the endpoints of one role.
#[derive(Clone, Default)]
pub struct Recorder(Rc<RefCell<Vec<TranscriptEntry>>>);

impl Recorder {
    pub fn new() -> Self {
        Recorder::default()
    }

    pub fn push(&self, direction: Direction, frame: Frame) {
        self.0
            .borrow_mut()
            .push(TranscriptEntry { direction, frame });
    }

    pub fn entries(&self) -> Vec<TranscriptEntry> {
        self.0.borrow().clone()
    }
}

/// Wraps an endpoint, logging traffic into a [`Recorder`].
pub struct Recorded<E: Endpoint> {
    inner: E,
    rec: Recorder,
}

impl<E: Endpoint> Recorded<E> {
    pub fn new(inner: E, rec: Recorder) -> Self {
        Recorded { inner, rec }
    }
}

impl<E: Endpoint> Endpoint for Recorded<E> {
    fn send(&mut self, frame: &Frame) -> Result<(), SessionError> {
        self.inner.send(frame)?;
        self.rec.push(Direction::Sent, frame.clone());
        Ok(())
    }

    fn recv(&mut self) -> Result<Frame, SessionError> {
        let frame = self.inner.recv()?;
        self.rec.push(Direction::Received, frame.clone());
        Ok(frame)
    }
}

/// Replays a stored transcript: sends must match the logged bytes, and
/// receives return the logged frames. One cursor is shared by all of a
/// role's endpoints since the log is in operation order.
#[derive(Clone)]
pub struct ReplayCursor {
    entries: Rc<RefCell<std::vec::IntoIter<TranscriptEntry>>>,
}

impl ReplayCursor {
    pub fn new(entries: Vec<TranscriptEntry>) -> Self {
        ReplayCursor {
            entries: Rc::new(RefCell::new(entries.into_iter())),
        }
    }

    fn next(&self) -> Result<TranscriptEntry, SessionError> {
        self.entries
            .borrow_mut()
            .next()
            .ok_or_else(|| SessionError::ReplayMismatch("transcript ended early".into()))
    }

    pub fn finished(&self) -> bool {
        self.entries.borrow_mut().as_slice().is_empty()
    }
}

pub struct ReplayEndpoint {
    cursor: ReplayCursor,
}

impl ReplayEndpoint {
    pub fn new(cursor: ReplayCursor) -> Self {
        ReplayEndpoint { cursor }
    }
}

impl Endpoint for ReplayEndpoint {
    fn send(&mut self, frame: &Frame) -> Result<(), SessionError> {
        let entry = self.cursor.next()?;
        if entry.direction != Direction::Sent || entry.frame != *frame {
            return Err(SessionError::ReplayMismatch(format!(
                "recomputed frame tag 0x{:02x} differs from the log",
                frame.tag
            )));
        }
        Ok(())
    }

    fn recv(&mut self) -> Result<Frame, SessionError> {
        let entry = self.cursor.next()?;
        if entry.direction != Direction::Received {
            return Err(SessionError::ReplayMismatch(
                "log expects a send where the program receives".into(),
            ));
        }
        Ok(entry.frame)
    }
}

fn hello_frame(params: &SessionParams, role: Role) -> Frame {
    let mut payload = Vec::with_capacity(27);
    payload.push(HELLO_VERSION);
    payload.push(role.byte());
    payload.extend_from_slice(&params.q.to_be_bytes());
    match params.group.map(|g| g.backend()) {
        Some(mpcheck_core::algebra::Backend::Schnorr { p, g }) => {
            payload.push(1);
            payload.extend_from_slice(&p.to_be_bytes());
            payload.extend_from_slice(&g.to_be_bytes());
        }
        _ => {
            payload.push(0);
            payload.extend_from_slice(&0u64.to_be_bytes());
            payload.extend_from_slice(&0u64.to_be_bytes());
        }
    }
    Frame::new(params.session_type(), TAG_HELLO, payload)
}

fn error_frame(session_type: u8, reason: u8) -> Frame {
    Frame::new(session_type, TAG_ERROR, vec![reason])
}

/// Validates a received hello against our parameters and the role we
/// expect on this connection; returns the peer role.
fn check_hello(frame: &Frame, params: &SessionParams, expect: Role) -> Result<Role, SessionError> {
    if frame.tag == TAG_ERROR {
        return Err(SessionError::PeerError(
            frame.payload.first().copied().unwrap_or(0),
        ));
    }
    if frame.tag != TAG_HELLO {
        return Err(SessionError::Unexpected {
            expected: TAG_HELLO,
            got: frame.tag,
        });
    }
    let expected_hello = hello_frame(params, expect);
    if frame.session_type != params.session_type() {
        return Err(SessionError::ParamMismatch(format!(
            "session type 0x{:02x} vs 0x{:02x}",
            frame.session_type,
            params.session_type()
        )));
    }
    if frame.payload != expected_hello.payload {
        return Err(SessionError::ParamMismatch(
            "peer hello parameters differ".into(),
        ));
    }
    Ok(expect)
}

/// Connector side of the hello exchange.
pub(crate) fn client_hello(
    ep: &mut dyn Endpoint,
    params: &SessionParams,
    me: Role,
    expect: Role,
) -> Result<(), SessionError> {
    ep.send(&hello_frame(params, me))?;
    let reply = ep.recv()?;
    check_hello(&reply, params, expect).map(|_| ())
}

/// Acceptor side of the hello exchange for a single expected peer.
pub(crate) fn server_hello(
    ep: &mut dyn Endpoint,
    params: &SessionParams,
    me: Role,
    expect: Role,
) -> Result<(), SessionError> {
    let frame = ep.recv()?;
    if let Err(e) = check_hello(&frame, params, expect) {
        let _ = ep.send(&error_frame(params.session_type(), REASON_PARAM_MISMATCH));
        return Err(e);
    }
    ep.send(&hello_frame(params, me))?;
    Ok(())
}

/// Receives a protocol frame, translating error frames and tag
/// mismatches into session errors.
fn expect_frame(ep: &mut dyn Endpoint, tag: u8) -> Result<Frame, SessionError> {
    let frame = ep.recv()?;
    if frame.tag == TAG_ERROR {
        return Err(SessionError::PeerError(
            frame.payload.first().copied().unwrap_or(0),
        ));
    }
    if frame.tag != tag {
        return Err(SessionError::Unexpected {
            expected: tag,
            got: frame.tag,
        });
    }
    Ok(frame)
}

// --- role drivers ---------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct SecmultP1Out {
    pub x: FieldElem,
    pub c1: FieldElem,
    pub d1: FieldElem,
    pub e1: FieldElem,
    pub e2: FieldElem,
    pub s1: FieldElem,
}

#[derive(Debug, Clone, Copy)]
pub struct SecmultP2Out {
    pub y: FieldElem,
    pub c2: FieldElem,
    pub d2: FieldElem,
    pub e1: FieldElem,
    pub e2: FieldElem,
    pub s2: FieldElem,
}

fn secmult_p1(
    params: &SessionParams,
    x: FieldElem,
    ti: &mut dyn Endpoint,
    p2: &mut dyn Endpoint,
) -> Result<SecmultP1Out, SessionError> {
    let field = params.field();
    let st = params.session_type();
    let share = expect_frame(ti, TAG_TI_SHARE)?;
    let mut r = PayloadReader::new(&share);
    let c1 = r.field(&field)?;
    let d1 = r.field(&field)?;
    r.finish()?;

    let e2 = x + c1;
    let mut payload = Vec::new();
    payload.extend_from_slice(&encode_field(e2));
    p2.send(&Frame::new(st, TAG_MSG_A, payload))?;

    let reply = expect_frame(p2, TAG_MSG_B)?;
    let mut r = PayloadReader::new(&reply);
    let e1 = r.field(&field)?;
    r.finish()?;

    let s1 = x * e1 - d1;
    Ok(SecmultP1Out {
        x,
        c1,
        d1,
        e1,
        e2,
        s1,
    })
}

fn secmult_p2(
    params: &SessionParams,
    y: FieldElem,
    ti: &mut dyn Endpoint,
    p1: &mut dyn Endpoint,
) -> Result<SecmultP2Out, SessionError> {
    let field = params.field();
    let st = params.session_type();
    let share = expect_frame(ti, TAG_TI_SHARE)?;
    let mut r = PayloadReader::new(&share);
    let c2 = r.field(&field)?;
    let d2 = r.field(&field)?;
    r.finish()?;

    let msg = expect_frame(p1, TAG_MSG_A)?;
    let mut r = PayloadReader::new(&msg);
    let e2 = r.field(&field)?;
    r.finish()?;

    let e1 = y - c2;
    p1.send(&Frame::new(st, TAG_MSG_B, encode_field(e1).to_vec()))?;

    let s2 = e2 * c2 - d2;
    Ok(SecmultP2Out {
        y,
        c2,
        d2,
        e1,
        e2,
        s2,
    })
}

fn secmult_ti(
    params: &SessionParams,
    rng: &mut CounterRng,
    p1: &mut dyn Endpoint,
    p2: &mut dyn Endpoint,
) -> Result<TripleShares, SessionError> {
    let field = params.field();
    let st = params.session_type();
    let a = field.elem(rng.below(params.q));
    let b = field.elem(rng.below(params.q));
    let r = field.elem(rng.below(params.q));
    let shares = TripleShares {
        c1: a,
        d1: r,
        c2: b,
        d2: a * b - r,
    };
    let mut payload = encode_field(shares.c1).to_vec();
    payload.extend_from_slice(&encode_field(shares.d1));
    p1.send(&Frame::new(st, TAG_TI_SHARE, payload))?;
    let mut payload = encode_field(shares.c2).to_vec();
    payload.extend_from_slice(&encode_field(shares.d2));
    p2.send(&Frame::new(st, TAG_TI_SHARE, payload))?;
    Ok(shares)
}

#[derive(Debug, Clone, Copy)]
pub struct NpSenderOut {
    pub view: NpSenderView,
    pub cts: [GroupElem; 4],
}

#[derive(Debug, Clone, Copy)]
pub struct NpReceiverOut {
    pub view: NpReceiverView,
    pub output: GroupElem,
}

fn np_sender(
    params: &SessionParams,
    m0: GroupElem,
    m1: GroupElem,
    rng: &mut CounterRng,
    p2: &mut dyn Endpoint,
) -> Result<NpSenderOut, SessionError> {
    let desc = params.group.expect("np-ot has a group");
    let st = params.session_type();
    let q = desc.order();

    let msg = expect_frame(p2, TAG_MSG_A)?;
    let mut r = PayloadReader::new(&msg);
    let x = r.group(&desc)?;
    let y = r.group(&desc)?;
    let z0 = r.group(&desc)?;
    let z1 = r.group(&desc)?;
    r.finish()?;
    if z0 == z1 {
        let _ = p2.send(&error_frame(st, REASON_UNEXPECTED));
        return Err(SessionError::ParamMismatch(
            "offered tuple has equal pads".into(),
        ));
    }

    let (a0, b0) = (rng.unit_below(q), rng.below(q));
    let (a1, b1) = (rng.unit_below(q), rng.below(q));
    let t0 = sr_apply(x, y, z0, a0, b0);
    let t1 = sr_apply(x, y, z1, a1, b1);
    let cts = [t0.1, t0.3 * m0, t1.1, t1.3 * m1];

    let mut payload = Vec::with_capacity(32);
    for ct in cts {
        payload.extend_from_slice(&encode_group(ct));
    }
    p2.send(&Frame::new(st, TAG_MSG_B, payload))?;

    Ok(NpSenderOut {
        view: NpSenderView {
            m0,
            m1,
            t1: x,
            t2: y,
            t3: z0,
            t4: z1,
        },
        cts,
    })
}

fn np_receiver(
    params: &SessionParams,
    v: bool,
    rng: &mut CounterRng,
    p1: &mut dyn Endpoint,
) -> Result<NpReceiverOut, SessionError> {
    let desc = params.group.expect("np-ot has a group");
    let f = desc.exponents();
    let st = params.session_type();
    let q = desc.order();

    let a = rng.below(q);
    let b = rng.unit_below(q);
    let ab = (f.elem(a) * f.elem(b)).value();
    let c = rng.below_except(q, ab);

    let x = desc.gpow_raw(a);
    let y = desc.gpow_raw(b);
    let (z0, z1) = if v {
        (desc.gpow_raw(c), desc.gpow_raw(ab))
    } else {
        (desc.gpow_raw(ab), desc.gpow_raw(c))
    };
    let mut payload = Vec::with_capacity(32);
    for e in [x, y, z0, z1] {
        payload.extend_from_slice(&encode_group(e));
    }
    p1.send(&Frame::new(st, TAG_MSG_A, payload))?;

    let reply = expect_frame(p1, TAG_MSG_B)?;
    let mut r = PayloadReader::new(&reply);
    let h0 = r.group(&desc)?;
    let c0 = r.group(&desc)?;
    let h1 = r.group(&desc)?;
    let c1 = r.group(&desc)?;
    r.finish()?;

    let chosen = if v {
        Ciphertext { h: h1, c: c1 }
    } else {
        Ciphertext { h: h0, c: c0 }
    };
    let output = decrypt(&chosen, f.elem(b));

    Ok(NpReceiverOut {
        view: NpReceiverView {
            v,
            a: f.elem(a),
            b: f.elem(b),
            c_other: f.elem(c),
            y0: y,
            e0: c0,
            y1: y,
            e1: c1,
        },
        output,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct BitOtP1Out {
    pub m0: Bit,
    pub m1: Bit,
    pub r0: Bit,
    pub r1: Bit,
    pub e: Bit,
    pub f0: Bit,
    pub f1: Bit,
}

#[derive(Debug, Clone, Copy)]
pub struct BitOtP2Out {
    pub b: Bit,
    pub d: Bit,
    pub r_d: Bit,
    pub e: Bit,
    pub f0: Bit,
    pub f1: Bit,
    pub output: Bit,
}

fn bitot_p1(
    st: u8,
    m0: Bit,
    m1: Bit,
    ti: &mut dyn Endpoint,
    p2: &mut dyn Endpoint,
) -> Result<BitOtP1Out, SessionError> {
    let share = expect_frame(ti, TAG_TI_SHARE)?;
    let mut r = PayloadReader::new(&share);
    let r0 = r.bit()?;
    let r1 = r.bit()?;
    r.finish()?;

    let msg = expect_frame(p2, TAG_MSG_A)?;
    let mut r = PayloadReader::new(&msg);
    let e = r.bit()?;
    r.finish()?;

    let pick = |i: Bit| if i.0 { r1 } else { r0 };
    let f0 = m0 ^ pick(e);
    let f1 = m1 ^ pick(!e);
    p2.send(&Frame::new(
        st,
        TAG_MSG_B,
        vec![encode_bit(f0), encode_bit(f1)],
    ))?;

    Ok(BitOtP1Out {
        m0,
        m1,
        r0,
        r1,
        e,
        f0,
        f1,
    })
}

fn bitot_p2(
    st: u8,
    b: Bit,
    ti: &mut dyn Endpoint,
    p1: &mut dyn Endpoint,
) -> Result<BitOtP2Out, SessionError> {
    let share = expect_frame(ti, TAG_TI_SHARE)?;
    let mut r = PayloadReader::new(&share);
    let d = r.bit()?;
    let r_d = r.bit()?;
    r.finish()?;

    let e = b ^ d;
    p1.send(&Frame::new(st, TAG_MSG_A, vec![encode_bit(e)]))?;

    let reply = expect_frame(p1, TAG_MSG_B)?;
    let mut r = PayloadReader::new(&reply);
    let f0 = r.bit()?;
    let f1 = r.bit()?;
    r.finish()?;

    let output = if b.0 { f1 } else { f0 } ^ r_d;
    Ok(BitOtP2Out {
        b,
        d,
        r_d,
        e,
        f0,
        f1,
        output,
    })
}

fn bitot_ti(
    st: u8,
    rng: &mut CounterRng,
    p1: &mut dyn Endpoint,
    p2: &mut dyn Endpoint,
) -> Result<(Bit, Bit, Bit), SessionError> {
    let r0 = Bit(rng.coin());
    let r1 = Bit(rng.coin());
    let d = Bit(rng.coin());
    let r_d = if d.0 { r1 } else { r0 };
    p1.send(&Frame::new(
        st,
        TAG_TI_SHARE,
        vec![encode_bit(r0), encode_bit(r1)],
    ))?;
    p2.send(&Frame::new(
        st,
        TAG_TI_SHARE,
        vec![encode_bit(d), encode_bit(r_d)],
    ))?;
    Ok((r0, r1, d))
}

#[derive(Debug, Clone, Copy)]
pub struct AndAOut {
    pub a: Bit,
    pub u: Bit,
    pub ot: BitOtP1Out,
}

#[derive(Debug, Clone, Copy)]
pub struct AndBOut {
    pub b: Bit,
    pub ot: BitOtP2Out,
}

fn and_a(
    st: u8,
    a: Bit,
    rng: &mut CounterRng,
    ti: &mut dyn Endpoint,
    p2: &mut dyn Endpoint,
) -> Result<AndAOut, SessionError> {
    let u = Bit(rng.coin());
    let (m0, m1) = mpcheck_core::bitot_and::and_messages(a, u);
    let ot = bitot_p1(st, m0, m1, ti, p2)?;
    Ok(AndAOut { a, u, ot })
}

fn and_b(
    st: u8,
    b: Bit,
    ti: &mut dyn Endpoint,
    p1: &mut dyn Endpoint,
) -> Result<AndBOut, SessionError> {
    let ot = bitot_p2(st, b, ti, p1)?;
    Ok(AndBOut { b, ot })
}

// --- session orchestration -------------------------------------------

/// Typed result of one role's run.
#[derive(Debug, Clone, Copy)]
pub enum DriverResult {
    SecmultP1(SecmultP1Out),
    SecmultP2(SecmultP2Out),
    SecmultTi(TripleShares),
    NpSender(NpSenderOut),
    NpReceiver(NpReceiverOut),
    BitOtP1(BitOtP1Out),
    BitOtP2(BitOtP2Out),
    BitOtTi { r0: Bit, r1: Bit, d: Bit },
    AndA(AndAOut),
    AndB(AndBOut),
}

impl DriverResult {
    /// The role's protocol outputs as labeled words (empty where the role
    /// produces no output).
    pub fn outputs(&self) -> Vec<(&'static str, u64)> {
        match self {
            DriverResult::SecmultP1(o) => vec![("s1", o.s1.value())],
            DriverResult::SecmultP2(o) => vec![("s2", o.s2.value())],
            DriverResult::NpReceiver(o) => vec![("m_v", o.output.encoded())],
            DriverResult::BitOtP2(o) => vec![("m_b", o.output.as_u8() as u64)],
            DriverResult::AndA(o) => vec![("u", o.u.as_u8() as u64)],
            DriverResult::AndB(o) => vec![("m_b", o.ot.output.as_u8() as u64)],
            DriverResult::SecmultTi(_)
            | DriverResult::NpSender(_)
            | DriverResult::BitOtP1(_)
            | DriverResult::BitOtTi { .. } => vec![],
        }
    }
}

/// Endpoints to a role's counterparts, post-hello.
pub struct PeerChans<'a> {
    pub p1: Option<&'a mut dyn Endpoint>,
    pub p2: Option<&'a mut dyn Endpoint>,
    pub ti: Option<&'a mut dyn Endpoint>,
}

fn need<'b>(
    chan: &'b mut Option<&mut dyn Endpoint>,
    who: &'static str,
) -> Result<&'b mut dyn Endpoint, SessionError> {
    match chan {
        Some(ep) => Ok(&mut **ep),
        None => Err(SessionError::BadConfig(format!(
            "missing connection to {}",
            who
        ))),
    }
}

fn input_bit(inputs: &InputMap, key: &'static str) -> Result<Bit, SessionError> {
    match inputs.get(key) {
        Some(0) => Ok(Bit(false)),
        Some(1) => Ok(Bit(true)),
        Some(v) => Err(SessionError::BadConfig(format!(
            "input {} = {} is not a bit",
            key, v
        ))),
        None => Err(SessionError::MissingInput(key)),
    }
}

fn input_word(inputs: &InputMap, key: &'static str) -> Result<u64, SessionError> {
    inputs
        .get(key)
        .copied()
        .ok_or(SessionError::MissingInput(key))
}

/// Runs one role of one protocol over whatever endpoints are supplied.
/// This single code path backs live sessions, in-process sampling, and
/// transcript replay.
pub fn run_driver(
    params: &SessionParams,
    role: Role,
    inputs: &InputMap,
    rng: &mut CounterRng,
    mut chans: PeerChans<'_>,
) -> Result<DriverResult, SessionError> {
    let st = params.session_type();
    match (params.protocol, role) {
        (Protocol::Secmult, Role::P1) => {
            let x = params.field().elem(input_word(inputs, "x")?);
            let out = secmult_p1(
                params,
                x,
                need(&mut chans.ti, "ti")?,
                need(&mut chans.p2, "p2")?,
            )?;
            Ok(DriverResult::SecmultP1(out))
        }
        (Protocol::Secmult, Role::P2) => {
            let y = params.field().elem(input_word(inputs, "y")?);
            let out = secmult_p2(
                params,
                y,
                need(&mut chans.ti, "ti")?,
                need(&mut chans.p1, "p1")?,
            )?;
            Ok(DriverResult::SecmultP2(out))
        }
        (Protocol::Secmult, Role::Ti) => {
            let out = secmult_ti(
                params,
                rng,
                need(&mut chans.p1, "p1")?,
                need(&mut chans.p2, "p2")?,
            )?;
            Ok(DriverResult::SecmultTi(out))
        }
        (Protocol::NpOt, Role::P1) => {
            let desc = params.group.expect("np-ot has a group");
            let m0 = desc.gpow_raw(input_word(inputs, "m0")?);
            let m1 = desc.gpow_raw(input_word(inputs, "m1")?);
            let out = np_sender(params, m0, m1, rng, need(&mut chans.p2, "p2")?)?;
            Ok(DriverResult::NpSender(out))
        }
        (Protocol::NpOt, Role::P2) => {
            let v = input_bit(inputs, "v")?.0;
            let out = np_receiver(params, v, rng, need(&mut chans.p1, "p1")?)?;
            Ok(DriverResult::NpReceiver(out))
        }
        (Protocol::NpOt, Role::Ti) => Err(SessionError::BadConfig(
            "np-ot has no trusted initializer".into(),
        )),
        (Protocol::BitOt, Role::P1) => {
            let m0 = input_bit(inputs, "m0")?;
            let m1 = input_bit(inputs, "m1")?;
            let out = bitot_p1(
                st,
                m0,
                m1,
                need(&mut chans.ti, "ti")?,
                need(&mut chans.p2, "p2")?,
            )?;
            Ok(DriverResult::BitOtP1(out))
        }
        (Protocol::BitOt, Role::P2) => {
            let b = input_bit(inputs, "b")?;
            let out = bitot_p2(
                st,
                b,
                need(&mut chans.ti, "ti")?,
                need(&mut chans.p1, "p1")?,
            )?;
            Ok(DriverResult::BitOtP2(out))
        }
        (Protocol::BitOt, Role::Ti) | (Protocol::AndGate, Role::Ti) => {
            let (r0, r1, d) = bitot_ti(
                st,
                rng,
                need(&mut chans.p1, "p1")?,
                need(&mut chans.p2, "p2")?,
            )?;
            Ok(DriverResult::BitOtTi { r0, r1, d })
        }
        (Protocol::AndGate, Role::P1) => {
            let a = input_bit(inputs, "a")?;
            let out = and_a(
                st,
                a,
                rng,
                need(&mut chans.ti, "ti")?,
                need(&mut chans.p2, "p2")?,
            )?;
            Ok(DriverResult::AndA(out))
        }
        (Protocol::AndGate, Role::P2) => {
            let b = input_bit(inputs, "b")?;
            let out = and_b(
                st,
                b,
                need(&mut chans.ti, "ti")?,
                need(&mut chans.p1, "p1")?,
            )?;
            Ok(DriverResult::AndB(out))
        }
    }
}

/// A runnable session endpoint configuration.
#[derive(Debug, Clone)]
pub struct SessionConfig {
    pub protocol: Protocol,
    pub q: u64,
    pub role: Role,
    pub seed: u64,
    pub inputs: InputMap,
    pub listen: Option<String>,
    pub connect: Vec<String>,
    pub transcript: Option<PathBuf>,
}

#[derive(Debug)]
pub struct SessionSummary {
    pub role: Role,
    pub outputs: Vec<(&'static str, u64)>,
    pub result: DriverResult,
}

fn input_record(
    params: &SessionParams,
    role: Role,
    inputs: &InputMap,
) -> Result<Frame, SessionError> {
    let mut payload = Vec::new();
    for key in params.protocol.input_keys(role) {
        payload.extend_from_slice(&input_word(inputs, key)?.to_be_bytes());
    }
    Ok(Frame::new(params.session_type(), TAG_INPUT, payload))
}

fn output_record(params: &SessionParams, result: &DriverResult) -> Frame {
    let mut payload = Vec::new();
    for (_, word) in result.outputs() {
        payload.extend_from_slice(&word.to_be_bytes());
    }
    Frame::new(params.session_type(), TAG_OUTPUT, payload)
}

fn connect_with_retry(addr: &str) -> Result<TcpStream, SessionError> {
    let mut last = None;
    for _ in 0..100 {
        match TcpStream::connect(addr) {
            Ok(stream) => return Ok(stream),
            Err(e) => last = Some(e),
        }
        std::thread::sleep(Duration::from_millis(50));
    }
    Err(SessionError::Io(last.expect("at least one attempt")))
}

/// Runs one session endpoint over TCP. `listener`, when supplied, is used
/// instead of binding `config.listen` (tests bind port 0 and pass the
/// listener in).
pub fn serve_on(
    config: &SessionConfig,
    listener: Option<TcpListener>,
) -> Result<SessionSummary, SessionError> {
    let params = SessionParams::new(config.protocol, config.q)?;
    let rec = Recorder::new();
    rec.push(
        Direction::Local,
        input_record(&params, config.role, &config.inputs)?,
    );

    let bind = |explicit: Option<TcpListener>| -> Result<TcpListener, SessionError> {
        match explicit {
            Some(l) => Ok(l),
            None => {
                let addr = config.listen.as_deref().ok_or_else(|| {
                    SessionError::BadConfig("role requires a listen address".into())
                })?;
                Ok(TcpListener::bind(addr)?)
            }
        }
    };

    let mut p1_chan: Option<Recorded<TcpEndpoint>> = None;
    let mut p2_chan: Option<Recorded<TcpEndpoint>> = None;
    let mut ti_chan: Option<Recorded<TcpEndpoint>> = None;

    match config.role {
        Role::P1 => {
            // Accept every counterpart, identify each by its hello, then
            // acknowledge in canonical order (P2 first, then TI) so the
            // transcript does not depend on connection arrival order.
            let listener = bind(listener)?;
            let mut expected: Vec<Role> = vec![Role::P2];
            if params.protocol.uses_ti() {
                expected.push(Role::Ti);
            }
            let mut pending: BTreeMap<Role, (TcpEndpoint, Frame)> = BTreeMap::new();
            while pending.len() < expected.len() {
                let (stream, _) = listener.accept()?;
                let mut ep = TcpEndpoint::new(stream);
                let hello = ep.recv()?;
                let who = expected
                    .iter()
                    .copied()
                    .find(|r| !pending.contains_key(r) && check_hello(&hello, &params, *r).is_ok())
                    .ok_or_else(|| {
                        let _ = ep.send(&error_frame(params.session_type(), REASON_PARAM_MISMATCH));
                        SessionError::ParamMismatch("unidentifiable peer hello".into())
                    })?;
                pending.insert(who, (ep, hello));
            }
            for role in expected {
                let (ep, hello) = pending.remove(&role).expect("identified above");
                rec.push(Direction::Received, hello);
                let mut recorded = Recorded::new(ep, rec.clone());
                recorded.send(&hello_frame(&params, Role::P1))?;
                match role {
                    Role::P2 => p2_chan = Some(recorded),
                    Role::Ti => ti_chan = Some(recorded),
                    Role::P1 => unreachable!(),
                }
            }
        }
        Role::P2 => {
            let ti_listener = if params.protocol.uses_ti() {
                Some(bind(listener)?)
            } else {
                None
            };
            let addr = config
                .connect
                .first()
                .ok_or_else(|| SessionError::BadConfig("p2 connects to p1".into()))?;
            let mut p1 = Recorded::new(TcpEndpoint::new(connect_with_retry(addr)?), rec.clone());
            client_hello(&mut p1, &params, Role::P2, Role::P1)?;
            p1_chan = Some(p1);
            if let Some(listener) = ti_listener {
                let (stream, _) = listener.accept()?;
                let mut ti = Recorded::new(TcpEndpoint::new(stream), rec.clone());
                server_hello(&mut ti, &params, Role::P2, Role::Ti)?;
                ti_chan = Some(ti);
            }
        }
        Role::Ti => {
            if !params.protocol.uses_ti() {
                return Err(SessionError::BadConfig(
                    "np-ot has no trusted initializer".into(),
                ));
            }
            let p1_addr = config
                .connect
                .first()
                .ok_or_else(|| SessionError::BadConfig("ti connects to p1 and p2".into()))?;
            let p2_addr = config
                .connect
                .get(1)
                .ok_or_else(|| SessionError::BadConfig("ti connects to p1 and p2".into()))?;
            let mut p1 = Recorded::new(TcpEndpoint::new(connect_with_retry(p1_addr)?), rec.clone());
            client_hello(&mut p1, &params, Role::Ti, Role::P1)?;
            let mut p2 = Recorded::new(TcpEndpoint::new(connect_with_retry(p2_addr)?), rec.clone());
            client_hello(&mut p2, &params, Role::Ti, Role::P2)?;
            p1_chan = Some(p1);
            p2_chan = Some(p2);
        }
    }

    let mut rng = CounterRng::new(config.seed);
    let result = run_driver(
        &params,
        config.role,
        &config.inputs,
        &mut rng,
        PeerChans {
            p1: p1_chan.as_mut().map(|c| c as &mut dyn Endpoint),
            p2: p2_chan.as_mut().map(|c| c as &mut dyn Endpoint),
            ti: ti_chan.as_mut().map(|c| c as &mut dyn Endpoint),
        },
    )?;
    rec.push(Direction::Local, output_record(&params, &result));

    if let Some(path) = &config.transcript {
        let mut transcript =
            Transcript::new(params.session_type(), config.role.byte(), config.seed);
        transcript.entries = rec.entries();
        transcript.write_file(path)?;
    }

    Ok(SessionSummary {
        role: config.role,
        outputs: result.outputs(),
        result,
    })
}

pub fn serve(config: &SessionConfig) -> Result<SessionSummary, SessionError> {
    serve_on(config, None)
}

/// Re-derives a role's behavior from a stored transcript: inputs and seed
/// come from the log, every recomputed frame must match the recorded
/// bytes, and the recomputed output must match the output record.
pub fn replay(transcript: &Transcript) -> Result<SessionSummary, SessionError> {
    let protocol = Protocol::from_session_type(transcript.header.session_type)
        .ok_or_else(|| SessionError::ReplayMismatch("unknown session type".into()))?;
    let role = Role::from_byte(transcript.header.role_byte)
        .ok_or_else(|| SessionError::ReplayMismatch("unknown role".into()))?;

    // Session parameters are recovered from the first hello in the log.
    let hello = transcript
        .entries
        .iter()
        .map(|e| &e.frame)
        .find(|f| f.tag == TAG_HELLO)
        .ok_or_else(|| SessionError::ReplayMismatch("no hello in transcript".into()))?;
    if hello.payload.len() != 27 {
        return Err(SessionError::ReplayMismatch("malformed hello".into()));
    }
    let q = u64::from_be_bytes(hello.payload[2..10].try_into().expect("eight bytes"));
    let params = SessionParams::new(protocol, q)?;

    let entries = &transcript.entries;
    if entries.is_empty() {
        return Err(SessionError::ReplayMismatch("empty transcript".into()));
    }
    let input_frame = &entries[0];
    if input_frame.direction != Direction::Local || input_frame.frame.tag != TAG_INPUT {
        return Err(SessionError::ReplayMismatch(
            "transcript does not start with an input record".into(),
        ));
    }
    let keys = params.protocol.input_keys(role);
    if input_frame.frame.payload.len() != keys.len() * 8 {
        return Err(SessionError::ReplayMismatch("bad input record".into()));
    }
    let mut inputs = InputMap::new();
    for (i, key) in keys.iter().enumerate() {
        let word = u64::from_be_bytes(
            input_frame.frame.payload[i * 8..(i + 1) * 8]
                .try_into()
                .expect("eight bytes"),
        );
        inputs.insert(key.to_string(), word);
    }

    let output_entry = entries.last().expect("nonempty");
    if output_entry.direction != Direction::Local || output_entry.frame.tag != TAG_OUTPUT {
        return Err(SessionError::ReplayMismatch(
            "transcript does not end with an output record".into(),
        ));
    }

    let cursor = ReplayCursor::new(entries[1..entries.len() - 1].to_vec());
    let mut p1 = ReplayEndpoint::new(cursor.clone());
    let mut p2 = ReplayEndpoint::new(cursor.clone());
    let mut ti = ReplayEndpoint::new(cursor.clone());

    // The hello exchange is part of the log, so replay walks through it
    // with the same calls a live session makes.
    match role {
        Role::P1 => {
            let mut order: Vec<(&mut ReplayEndpoint, Role)> = vec![(&mut p2, Role::P2)];
            if params.protocol.uses_ti() {
                order.push((&mut ti, Role::Ti));
            }
            for (ep, who) in order {
                let hello = ep.recv()?;
                check_hello(&hello, &params, who)?;
                ep.send(&hello_frame(&params, Role::P1))?;
            }
        }
        Role::P2 => {
            client_hello(&mut p1, &params, Role::P2, Role::P1)?;
            if params.protocol.uses_ti() {
                server_hello(&mut ti, &params, Role::P2, Role::Ti)?;
            }
        }
        Role::Ti => {
            client_hello(&mut p1, &params, Role::Ti, Role::P1)?;
            client_hello(&mut p2, &params, Role::Ti, Role::P2)?;
        }
    }

    let mut rng = CounterRng::new(transcript.header.seed);
    let result = run_driver(
        &params,
        role,
        &inputs,
        &mut rng,
        PeerChans {
            p1: Some(&mut p1),
            p2: Some(&mut p2),
            ti: Some(&mut ti),
        },
    )?;

    if !cursor.finished() {
        return Err(SessionError::ReplayMismatch(
            "transcript has frames the program never touched".into(),
        ));
    }
    let recomputed = output_record(&params, &result);
    if recomputed != output_entry.frame {
        return Err(SessionError::ReplayMismatch(
            "recomputed output differs from the record".into(),
        ));
    }

    Ok(SessionSummary {
        role,
        outputs: result.outputs(),
        result,
    })
}
