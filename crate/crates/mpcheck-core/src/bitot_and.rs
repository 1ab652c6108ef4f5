//! Single-bit oblivious transfer with a trusted initializer, and the AND
//! gate protocol built on top of it.
//!
//! The initializer deals `(r0, r1)` to the sender and `(d, r_d)` to the
//! receiver. The receiver masks its choice bit as `e = b ^ d`; the sender
//! replies with `f0 = m0 ^ r_e` and `f1 = m1 ^ r_(1-e)`; the receiver
//! recovers `m_b = f_b ^ r_d`. Every message a party sees is masked by a
//! one-time pad bit the other party never learns.
//!
//! The AND gate uses one such transfer: party A draws a share `u` and
//! offers `(u, a ^ u)`; party B selects with its input `b` and obtains
//! `m_b = (a & b) ^ u`, so the outputs XOR to `a & b`.

use core::fmt;
use core::ops::{BitXor, Not};

use crate::dist::Dist;

/// A single bit with XOR as its group operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Bit(pub bool);

impl Bit {
    pub fn and(self, other: Bit) -> Bit {
        Bit(self.0 && other.0)
    }

    pub fn as_u8(self) -> u8 {
        self.0 as u8
    }
}

impl BitXor for Bit {
    type Output = Bit;
    fn bitxor(self, rhs: Bit) -> Bit {
        Bit(self.0 ^ rhs.0)
    }
}

impl Not for Bit {
    type Output = Bit;
    fn not(self) -> Bit {
        Bit(!self.0)
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0 as u8)
    }
}

/// A fair coin as a [`Bit`].
pub fn coin_bit() -> Dist<Bit> {
    Dist::coin().map(|&b| Bit(b))
}

/// All four / two Boolean inputs, for exhaustive sweeps.
pub const BITS: [Bit; 2] = [Bit(false), Bit(true)];

/// The initializer's dealing for one transfer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct BitOtInit {
    pub r0: Bit,
    pub r1: Bit,
    pub d: Bit,
}

impl BitOtInit {
    /// The pad bit handed to the receiver.
    pub fn r_d(&self) -> Bit {
        if self.d.0 {
            self.r1
        } else {
            self.r0
        }
    }

    fn r_at(&self, i: Bit) -> Bit {
        if i.0 {
            self.r1
        } else {
            self.r0
        }
    }
}

fn bitot_ti() -> Dist<BitOtInit> {
    coin_bit()
        .product(&coin_bit().product(&coin_bit()))
        .map(|&(r0, (r1, d))| BitOtInit { r0, r1, d })
}

/// One full transfer at fixed inputs and initializer randomness.
fn bitot_run(m0: Bit, m1: Bit, b: Bit, init: &BitOtInit) -> (Bit, Bit, Bit, Bit) {
    let e = b ^ init.d;
    let f0 = m0 ^ init.r_at(e);
    let f1 = m1 ^ init.r_at(!e);
    let fb = if b.0 { f1 } else { f0 };
    let out = fb ^ init.r_d();
    (e, f0, f1, out)
}

/// The receiver's output distribution; a point mass on `m_b`.
pub fn bitot_execute(m0: Bit, m1: Bit, b: Bit) -> Dist<Bit> {
    bitot_ti().map(move |init| bitot_run(m0, m1, b, init).3)
}

/// Sender view: inputs, pad bits, and the received masked choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct BitOtView1 {
    pub m0: Bit,
    pub m1: Bit,
    pub r0: Bit,
    pub r1: Bit,
    pub e: Bit,
}

/// Receiver view: input, initializer bits, and the received ciphertexts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct BitOtView2 {
    pub b: Bit,
    pub d: Bit,
    pub r_d: Bit,
    pub f0: Bit,
    pub f1: Bit,
}

pub fn bitot_real_view1(m0: Bit, m1: Bit, b: Bit) -> Dist<BitOtView1> {
    bitot_ti().map(move |init| {
        let (e, _, _, _) = bitot_run(m0, m1, b, init);
        BitOtView1 {
            m0,
            m1,
            r0: init.r0,
            r1: init.r1,
            e,
        }
    })
}

pub fn bitot_real_view2(m0: Bit, m1: Bit, b: Bit) -> Dist<BitOtView2> {
    bitot_ti().map(move |init| {
        let (_, f0, f1, _) = bitot_run(m0, m1, b, init);
        BitOtView2 {
            b,
            d: init.d,
            r_d: init.r_d(),
            f0,
            f1,
        }
    })
}

/// Sender simulator: pads and the masked choice bit are all fresh coins.
pub fn bitot_sim1(m0: Bit, m1: Bit) -> Dist<BitOtView1> {
    coin_bit()
        .product(&coin_bit().product(&coin_bit()))
        .map(move |&(r0, (r1, e))| BitOtView1 { m0, m1, r0, r1, e })
}

/// Receiver simulator, given the choice bit and the received message
/// `m_b`: the chosen ciphertext satisfies `f_b = m_b ^ r_d`, the other is
/// a fresh coin.
pub fn bitot_sim2(b: Bit, m_b: Bit) -> Dist<BitOtView2> {
    coin_bit()
        .product(&coin_bit().product(&coin_bit()))
        .map(move |&(d, (r_d, other))| {
            let chosen = m_b ^ r_d;
            let (f0, f1) = if b.0 {
                (other, chosen)
            } else {
                (chosen, other)
            };
            BitOtView2 { b, d, r_d, f0, f1 }
        })
}

/// Party A's view of the AND protocol: input, share, embedded OT view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct AndViewA {
    pub a: Bit,
    pub u: Bit,
    pub ot: BitOtView1,
}

/// Party B's view: input, output share, embedded OT view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct AndViewB {
    pub b: Bit,
    pub m_b: Bit,
    pub ot: BitOtView2,
}

/// The OT message pair party A offers for input `a` and share `u`:
/// `(u, a ^ u)`, so the transferred bit is `(a & b) ^ u`.
pub fn and_messages(a: Bit, u: Bit) -> (Bit, Bit) {
    (u, a ^ u)
}

/// Joint distribution of the parties' output shares `(u, m_b)`.
pub fn and_execute(a: Bit, b: Bit) -> Dist<(Bit, Bit)> {
    coin_bit().bind(move |&u| {
        let (m0, m1) = and_messages(a, u);
        bitot_execute(m0, m1, b).map(move |&m_b| (u, m_b))
    })
}

pub fn and_real_view_a(a: Bit, b: Bit) -> Dist<AndViewA> {
    coin_bit().bind(move |&u| {
        let (m0, m1) = and_messages(a, u);
        bitot_real_view1(m0, m1, b).map(move |&ot| AndViewA { a, u, ot })
    })
}

pub fn and_sim_a(a: Bit) -> Dist<AndViewA> {
    coin_bit().bind(move |&u| {
        let (m0, m1) = and_messages(a, u);
        bitot_sim1(m0, m1).map(move |&ot| AndViewA { a, u, ot })
    })
}

pub fn and_real_view_b(a: Bit, b: Bit) -> Dist<AndViewB> {
    coin_bit().bind(move |&u| {
        let (m0, m1) = and_messages(a, u);
        bitot_real_view2(m0, m1, b).map(move |&ot| {
            let fb = if b.0 { ot.f1 } else { ot.f0 };
            AndViewB {
                b,
                m_b: fb ^ ot.r_d,
                ot,
            }
        })
    })
}

/// Party B's simulator. B's output is itself a uniform share, so the
/// simulator draws it fresh and embeds the OT receiver simulator around
/// it; the realized output value carried by `_output` adds no further
/// constraint on the view.
pub fn and_sim_b(b: Bit, _output: Bit) -> Dist<AndViewB> {
    coin_bit()
        .bind(move |&share| bitot_sim2(b, share).map(move |&ot| AndViewB { b, m_b: share, ot }))
}
