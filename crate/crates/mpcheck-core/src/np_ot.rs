//! The Naor-Pinkas 1-out-of-2 oblivious transfer.
//!
//! The receiver holds a choice bit `v`, picks `a, b` and publishes
//! `(g^a, g^b, z_0, z_1)` where `z_v = g^(a*b)` and the other exponent is
//! fresh. The sender rerandomizes both tuples through the DDH
//! self-reduction, encrypts `m_i` under the rerandomized pad, and returns
//! both ciphertexts; only the one built from the genuine DH tuple is
//! decryptable with `b`.
//!
//! Receiver security is information-theoretic and is checked as an exact
//! distribution equality ([`receiver_sim_view`]). Sender security at
//! `v = 1` is computational: [`reduction_identity`] checks, in exact
//! rationals, that any distinguisher's advantage between the real and
//! simulated sender views equals the difference of the two induced DDH
//! advantages.
//!
//! One sampling convention differs from the protocol as usually written
//! down: the receiver draws `b` from the units of `Z_q` rather than all of
//! `Z_q`. At `b = 0` the decryptable pad degenerates to the identity and
//! the chosen ciphertext exposes `m_v` inside the view, so no simulator
//! that ignores the messages can match the real view exactly; excluding
//! zero (probability `1/q` per run) is the minimal repair under which the
//! receiver equality is exact. `tests` exercise the full-range variant and
//! record its gap.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::algebra::{
    ddh_rand, ddh_real, ddh_sr, ddh_sr_non_triple, ddh_sr_triple, mul_mod, sr_apply, Backend,
    FieldElem, GroupDesc, GroupElem, Tuple3, Tuple4,
};
use crate::dist::Dist;
use crate::rational::Rational;
use crate::rng::{fnv1a64, mix64};

/// The sender's message pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct NpMessages {
    pub m0: GroupElem,
    pub m1: GroupElem,
}

impl NpMessages {
    pub fn new(m0: GroupElem, m1: GroupElem) -> Self {
        assert_eq!(m0.group(), m1.group(), "messages from different groups");
        NpMessages { m0, m1 }
    }
}

/// The receiver's view: choice bit, own coins, and the two received
/// ciphertext pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct NpReceiverView {
    pub v: bool,
    pub a: FieldElem,
    pub b: FieldElem,
    pub c_other: FieldElem,
    pub y0: GroupElem,
    pub e0: GroupElem,
    pub y1: GroupElem,
    pub e1: GroupElem,
}

/// The sender's view: its input messages and the 4-tuple received from
/// the receiver, ordered `(g^a, g^b, z0, z1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct NpSenderView {
    pub m0: GroupElem,
    pub m1: GroupElem,
    pub t1: GroupElem,
    pub t2: GroupElem,
    pub t3: GroupElem,
    pub t4: GroupElem,
}

/// One ciphertext: the rerandomized component and the padded message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Ciphertext {
    pub h: GroupElem,
    pub c: GroupElem,
}

/// Decryption with the receiver's exponent: `m = c * (h^b)^(-1)`.
pub fn decrypt(ct: &Ciphertext, b: FieldElem) -> GroupElem {
    ct.c * ct.h.pow(b).invert()
}

/// Which realization of the self-reduction the receiver programs use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SrConvention {
    /// The rerandomization formula itself.
    Raw,
    /// The case-split simplified programs it provably equals.
    Simplified,
}

impl SrConvention {
    pub fn name(&self) -> &'static str {
        match self {
            SrConvention::Raw => "raw",
            SrConvention::Simplified => "simplified",
        }
    }
}

fn same_group(m0: GroupElem, m1: GroupElem) -> GroupDesc {
    assert_eq!(m0.group(), m1.group(), "messages from different groups");
    m0.group()
}

/// Self-reduction distribution under the chosen convention. For
/// `Simplified`, dispatches on whether `(x, y, z)` is a DH triple.
fn sr_dist(
    desc: &GroupDesc,
    x: FieldElem,
    y: FieldElem,
    z: FieldElem,
    conv: SrConvention,
) -> Dist<Tuple4> {
    match conv {
        SrConvention::Raw => ddh_sr(desc, x, y, z),
        SrConvention::Simplified => {
            if z == x * y {
                ddh_sr_triple(desc, x, y, z).expect("triple case")
            } else {
                ddh_sr_non_triple(desc, x, y, z).expect("non-triple case")
            }
        }
    }
}

/// The receiver's coin triple `(a, b, c')`: `a` uniform, `b` a uniform
/// unit, `c'` uniform with the runs where `c' = a*b` pruned (so the
/// distribution has weight `(q-1)/q`).
fn receiver_coins(q: u64) -> Dist<(u64, u64, u64)> {
    Dist::uniform(q)
        .product(&Dist::uniform_except(q, 0).product(&Dist::uniform(q)))
        .bind(move |&(a, (b, c))| Dist::guard(c != mul_mod(a, b, q)).map(move |_| (a, b, c)))
}

/// The receiver's real view distribution.
pub fn receiver_real_view(
    m0: GroupElem,
    m1: GroupElem,
    v: bool,
    conv: SrConvention,
) -> Dist<NpReceiverView> {
    let desc = same_group(m0, m1);
    let f = desc.exponents();
    receiver_coins(desc.order()).bind(move |&(a, b, c)| {
        let (a, b, c) = (f.elem(a), f.elem(b), f.elem(c));
        let triple = sr_dist(&desc, a, b, a * b, conv);
        let non_triple = sr_dist(&desc, a, b, c, conv);
        triple.bind(move |&tri| {
            non_triple.map(move |&non| {
                let (m_chosen, m_other) = if v { (m1, m0) } else { (m0, m1) };
                // Position v carries the decryptable pair; the view records
                // the unchanged third component and the padded message.
                let chosen = (tri.2, tri.3 * m_chosen);
                let other = (non.2, non.3 * m_other);
                let ((y0, e0), (y1, e1)) = if v { (other, chosen) } else { (chosen, other) };
                NpReceiverView {
                    v,
                    a,
                    b,
                    c_other: c,
                    y0,
                    e0,
                    y1,
                    e1,
                }
            })
        })
    })
}

/// The receiver's simulator: same coins and pruning as the real view, but
/// both ciphertext slots are fresh uniform group elements. Never reads the
/// sender's messages.
pub fn receiver_sim_view(desc: &GroupDesc, v: bool) -> Dist<NpReceiverView> {
    let d = *desc;
    let f = d.exponents();
    let q = d.order();
    receiver_coins(q).bind(move |&(a, b, c)| {
        Dist::uniform(q)
            .product(&Dist::uniform(q))
            .map(move |&(x1, x2)| {
                let gb = d.gpow_raw(b);
                NpReceiverView {
                    v,
                    a: f.elem(a),
                    b: f.elem(b),
                    c_other: f.elem(c),
                    y0: gb,
                    e0: d.gpow_raw(x1),
                    y1: gb,
                    e1: d.gpow_raw(x2),
                }
            })
    })
}

/// One full protocol run; the receiver's decrypted output. Equals
/// `pure(m_v)` for every input — correctness holds with probability one.
pub fn np_execute(m0: GroupElem, m1: GroupElem, v: bool) -> Dist<GroupElem> {
    let desc = same_group(m0, m1);
    let f = desc.exponents();
    let q = desc.order();
    Dist::uniform(q).bind(move |&a| {
        Dist::uniform_except(q, 0).bind(move |&b| {
            let ab = mul_mod(a, b, q);
            Dist::uniform_except(q, ab).bind(move |&c| {
                let x = desc.gpow_raw(a);
                let y = desc.gpow_raw(b);
                let (z0, z1) = if v {
                    (desc.gpow_raw(c), desc.gpow_raw(ab))
                } else {
                    (desc.gpow_raw(ab), desc.gpow_raw(c))
                };
                sender_sr_coins(q).bind(move |&((a0, b0), (a1, b1))| {
                    let t0 = sr_apply(x, y, z0, a0, b0);
                    let t1 = sr_apply(x, y, z1, a1, b1);
                    let ct0 = Ciphertext {
                        h: t0.1,
                        c: t0.3 * m0,
                    };
                    let ct1 = Ciphertext {
                        h: t1.1,
                        c: t1.3 * m1,
                    };
                    let ct = if v { ct1 } else { ct0 };
                    Dist::pure(decrypt(&ct, f.elem(b)))
                })
            })
        })
    })
}

/// The sender's rerandomization coins for both ciphertexts: a unit scale
/// and a uniform shift each.
fn sender_sr_coins(q: u64) -> Dist<((u64, u64), (u64, u64))> {
    let one = Dist::uniform_except(q, 0).product(&Dist::uniform(q));
    one.product(&one)
}

/// The sender's coin triple `(a, b, c')` with the `c' = a*b` runs pruned,
/// mirroring the receiver-side pruning so real and simulated views carry
/// identical weight.
fn sender_coins(q: u64) -> Dist<(u64, u64, u64)> {
    Dist::uniform(q)
        .product(&Dist::uniform(q).product(&Dist::uniform(q)))
        .bind(move |&(a, (b, c))| Dist::guard(c != mul_mod(a, b, q)).map(move |_| (a, b, c)))
}

/// The sender's real view: `(g^a, g^b, z0, z1)` with the DH exponent in
/// position `v`.
pub fn sender_real_view(m0: GroupElem, m1: GroupElem, v: bool) -> Dist<NpSenderView> {
    let desc = same_group(m0, m1);
    sender_coins(desc.order()).map(move |&(a, b, c)| {
        let ab = mul_mod(a, b, desc.order());
        let (z0, z1) = if v {
            (desc.gpow_raw(c), desc.gpow_raw(ab))
        } else {
            (desc.gpow_raw(ab), desc.gpow_raw(c))
        };
        NpSenderView {
            m0,
            m1,
            t1: desc.gpow_raw(a),
            t2: desc.gpow_raw(b),
            t3: z0,
            t4: z1,
        }
    })
}

/// The sender's simulator: `(g^a, g^b, g^(a*b), g^c)` — the `v = 0` shape.
pub fn sender_sim_view(m0: GroupElem, m1: GroupElem) -> Dist<NpSenderView> {
    let desc = same_group(m0, m1);
    sender_coins(desc.order()).map(move |&(a, b, c)| NpSenderView {
        m0,
        m1,
        t1: desc.gpow_raw(a),
        t2: desc.gpow_raw(b),
        t3: desc.gpow_raw(mul_mod(a, b, desc.order())),
        t4: desc.gpow_raw(c),
    })
}

/// A (possibly randomized) distinguisher over sender views.
pub type Distinguisher<'a> = &'a dyn Fn(&NpSenderView) -> Dist<bool>;

/// An owned distinguisher, for building named families.
pub type BoxedDistinguisher = Box<dyn Fn(&NpSenderView) -> Dist<bool>>;

/// Probability that `d` accepts a draw from `dist`.
pub fn acceptance<V: Ord + Clone>(dist: &Dist<V>, d: impl Fn(&V) -> Dist<bool>) -> Rational {
    dist.bind(d).mass(&true)
}

/// First DDH adversary built from `d`: inserts a fresh `g^c` in position
/// three, passing `(t.0, t.1, g^c, t.2)` to the distinguisher.
pub fn adv1(d: Distinguisher, m0: GroupElem, m1: GroupElem, t: Tuple3) -> Dist<bool> {
    let desc = t.0.group();
    Dist::uniform(desc.order()).bind(move |&c| {
        d(&NpSenderView {
            m0,
            m1,
            t1: t.0,
            t2: t.1,
            t3: desc.gpow_raw(c),
            t4: t.2,
        })
    })
}

/// Second DDH adversary: appends the fresh `g^c` in position four,
/// passing `(t.0, t.1, t.2, g^c)`.
pub fn adv2(d: Distinguisher, m0: GroupElem, m1: GroupElem, t: Tuple3) -> Dist<bool> {
    let desc = t.0.group();
    Dist::uniform(desc.order()).bind(move |&c| {
        d(&NpSenderView {
            m0,
            m1,
            t1: t.0,
            t2: t.1,
            t3: t.2,
            t4: desc.gpow_raw(c),
        })
    })
}

/// The signed DDH advantage of `a`: acceptance on DH triples minus
/// acceptance on random triples.
pub fn ddh_advantage(desc: &GroupDesc, a: impl Fn(&Tuple3) -> Dist<bool>) -> Rational {
    acceptance(&ddh_real(desc), &a) - acceptance(&ddh_rand(desc), &a)
}

/// The reduction identity for the `v = 1` sender case. Returns
/// `(lhs, a1, a2)` where `lhs` is the distinguisher's advantage between
/// the real and simulated sender views and `a1`, `a2` are the DDH
/// advantages of the two induced adversaries. The contract is
/// `lhs = a1 - a2` exactly, hence `|lhs| <= |a1| + |a2|`.
pub fn reduction_identity(
    d: Distinguisher,
    m0: GroupElem,
    m1: GroupElem,
) -> (Rational, Rational, Rational) {
    let desc = same_group(m0, m1);
    let lhs =
        acceptance(&sender_real_view(m0, m1, true), d) - acceptance(&sender_sim_view(m0, m1), d);
    let a1 = ddh_advantage(&desc, |t| adv1(d, m0, m1, *t));
    let a2 = ddh_advantage(&desc, |t| adv2(d, m0, m1, *t));
    (lhs, a1, a2)
}

fn view_words(w: &NpSenderView) -> [u64; 6] {
    [
        w.m0.encoded(),
        w.m1.encoded(),
        w.t1.encoded(),
        w.t2.encoded(),
        w.t3.encoded(),
        w.t4.encoded(),
    ]
}

/// A deterministic pseudo-random Boolean function of the view, keyed by
/// `seed`. Each seed gives a fixed total distinguisher.
pub fn seeded_distinguisher(seed: u64) -> BoxedDistinguisher {
    Box::new(move |w| Dist::pure(mix64(seed ^ fnv1a64(view_words(w))) & 1 == 1))
}

fn boxed(f: impl Fn(&NpSenderView) -> Dist<bool> + 'static) -> BoxedDistinguisher {
    Box::new(f)
}

/// A small fixed family of structured distinguishers: constants,
/// projections, equality tests, and (in the exponent backend, where every
/// discrete log is readable) DH-triple detectors.
pub fn fixed_distinguishers(desc: &GroupDesc) -> Vec<(&'static str, BoxedDistinguisher)> {
    let q = desc.order();
    let identity = desc.identity();
    let mut family: Vec<(&'static str, BoxedDistinguisher)> = alloc::vec![
        ("always-accept", boxed(|_| Dist::pure(true))),
        ("always-reject", boxed(|_| Dist::pure(false))),
        ("third-equals-fourth", boxed(|w| Dist::pure(w.t3 == w.t4))),
        (
            "fourth-is-identity",
            boxed(move |w| Dist::pure(w.t4 == identity)),
        ),
        ("fourth-matches-m0", boxed(|w| Dist::pure(w.t4 == w.m0))),
        (
            "hash-biased-coin",
            boxed(|w| {
                // Accept with view-dependent probability k/4.
                let k = mix64(fnv1a64(view_words(w))) & 3;
                Dist::from_entries([
                    (true, Rational::ratio(k, 4)),
                    (false, Rational::ratio(4 - k, 4)),
                ])
            }),
        ),
    ];
    if desc.backend() == Backend::Exponent {
        family.push((
            "third-is-dh",
            boxed(move |w| {
                Dist::pure(w.t3.encoded() == mul_mod(w.t1.encoded(), w.t2.encoded(), q))
            }),
        ));
        family.push((
            "fourth-is-dh",
            boxed(move |w| {
                Dist::pure(w.t4.encoded() == mul_mod(w.t1.encoded(), w.t2.encoded(), q))
            }),
        ));
    }
    family
}
