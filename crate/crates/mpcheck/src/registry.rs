//! Named analytic programs for `mpcheck tv`.
//!
//! Every program in the registry evaluates, at a given prime and backend,
//! to a distribution over word vectors (the canonical encodings of its
//! values), so any two programs of the same shape can be compared with an
//! exact total-variation distance from the command line.

use std::collections::BTreeMap;

use mpcheck_core::algebra::Field;
use mpcheck_core::algebra::{
    ddh_rand, ddh_real, ddh_sr, ddh_sr_non_triple, ddh_sr_triple, GroupDesc, GroupElem, Tuple4,
};
use mpcheck_core::bitot_and::{self, Bit};
use mpcheck_core::dist::Dist;
use mpcheck_core::np_ot::{self, SrConvention};
use mpcheck_core::secmult;

pub type Words = Vec<u64>;

/// Inputs bound on the command line, `name=value`.
pub type Bindings = BTreeMap<String, u64>;

pub const PROGRAM_IDS: &[&str] = &[
    "uniform",
    "coin",
    "ddh.real",
    "ddh.rand",
    "ddhsr.raw",
    "ddhsr.triple",
    "ddhsr.nontriple",
    "secmult.functionality",
    "secmult.protocol",
    "secmult.real1",
    "secmult.sim1",
    "secmult.real2",
    "secmult.sim2",
    "npot.execute",
    "npot.receiver-real",
    "npot.receiver-sim",
    "npot.sender-real",
    "npot.sender-sim",
    "bitot.execute",
    "bitot.real1",
    "bitot.sim1",
    "bitot.real2",
    "bitot.sim2",
    "and.execute",
    "and.real-a",
    "and.sim-a",
    "and.real-b",
    "and.sim-b",
];

fn group_words(e: &GroupElem) -> u64 {
    e.encoded()
}

fn tuple4_words(t: &Tuple4) -> Words {
    vec![t.0.encoded(), t.1.encoded(), t.2.encoded(), t.3.encoded()]
}

fn want(bindings: &Bindings, key: &str) -> Result<u64, String> {
    bindings
        .get(key)
        .copied()
        .ok_or_else(|| format!("program requires --input {}=<value>", key))
}

fn want_bit(bindings: &Bindings, key: &str) -> Result<Bit, String> {
    match want(bindings, key)? {
        0 => Ok(Bit(false)),
        1 => Ok(Bit(true)),
        v => Err(format!("input {}={} is not a bit", key, v)),
    }
}

/// Evaluates a registered program. Group messages (`m0`, `m1`) are given
/// as exponents of the generator.
pub fn evaluate(
    id: &str,
    q: u64,
    desc: &GroupDesc,
    conv: SrConvention,
    bindings: &Bindings,
) -> Result<Dist<Words>, String> {
    let field = Field::new(q).map_err(|e| e.to_string())?;
    let fe = |key: &str| -> Result<_, String> { Ok(field.elem(want(bindings, key)?)) };
    let ge = |key: &str| -> Result<_, String> { Ok(desc.gpow_raw(want(bindings, key)?)) };
    let d = match id {
        "uniform" => Dist::uniform(q).map(|&v| vec![v]),
        "coin" => Dist::coin().map(|&b| vec![b as u64]),
        "ddh.real" => ddh_real(desc).map(|t| vec![t.0.encoded(), t.1.encoded(), t.2.encoded()]),
        "ddh.rand" => ddh_rand(desc).map(|t| vec![t.0.encoded(), t.1.encoded(), t.2.encoded()]),
        "ddhsr.raw" => ddh_sr(desc, fe("x")?, fe("y")?, fe("z")?).map(tuple4_words),
        "ddhsr.triple" => ddh_sr_triple(desc, fe("x")?, fe("y")?, fe("z")?)
            .map_err(|e| e.to_string())?
            .map(tuple4_words),
        "ddhsr.nontriple" => ddh_sr_non_triple(desc, fe("x")?, fe("y")?, fe("z")?)
            .map_err(|e| e.to_string())?
            .map(tuple4_words),
        "secmult.functionality" => {
            secmult::functionality(fe("x")?, fe("y")?).map(|(s1, s2)| vec![s1.value(), s2.value()])
        }
        "secmult.protocol" => {
            secmult::protocol(fe("x")?, fe("y")?).map(|(s1, s2)| vec![s1.value(), s2.value()])
        }
        "secmult.real1" => secmult::real_view1(fe("x")?, fe("y")?).map(|w| {
            vec![
                w.x.value(),
                w.c1.value(),
                w.d1.value(),
                w.e1.value(),
                w.s1.value(),
                w.s2.value(),
            ]
        }),
        "secmult.sim1" => secmult::sim_view1(fe("x")?, fe("y")?).map(|w| {
            vec![
                w.x.value(),
                w.c1.value(),
                w.d1.value(),
                w.e1.value(),
                w.s1.value(),
                w.s2.value(),
            ]
        }),
        "secmult.real2" => secmult::real_view2(fe("x")?, fe("y")?).map(|w| {
            vec![
                w.y.value(),
                w.c2.value(),
                w.d2.value(),
                w.e2.value(),
                w.s1.value(),
                w.s2.value(),
            ]
        }),
        "secmult.sim2" => secmult::sim_view2(fe("x")?, fe("y")?).map(|w| {
            vec![
                w.y.value(),
                w.c2.value(),
                w.d2.value(),
                w.e2.value(),
                w.s1.value(),
                w.s2.value(),
            ]
        }),
        "npot.execute" => {
            let v = want_bit(bindings, "v")?.0;
            np_ot::np_execute(ge("m0")?, ge("m1")?, v).map(|e| vec![group_words(e)])
        }
        "npot.receiver-real" => {
            let v = want_bit(bindings, "v")?.0;
            np_ot::receiver_real_view(ge("m0")?, ge("m1")?, v, conv).map(receiver_words)
        }
        "npot.receiver-sim" => {
            let v = want_bit(bindings, "v")?.0;
            np_ot::receiver_sim_view(desc, v).map(receiver_words)
        }
        "npot.sender-real" => {
            let v = want_bit(bindings, "v")?.0;
            np_ot::sender_real_view(ge("m0")?, ge("m1")?, v).map(sender_words)
        }
        "npot.sender-sim" => np_ot::sender_sim_view(ge("m0")?, ge("m1")?).map(sender_words),
        "bitot.execute" => {
            let (m0, m1, b) = (
                want_bit(bindings, "m0")?,
                want_bit(bindings, "m1")?,
                want_bit(bindings, "b")?,
            );
            bitot_and::bitot_execute(m0, m1, b).map(|&o| vec![o.as_u8() as u64])
        }
        "bitot.real1" => {
            let (m0, m1, b) = (
                want_bit(bindings, "m0")?,
                want_bit(bindings, "m1")?,
                want_bit(bindings, "b")?,
            );
            bitot_and::bitot_real_view1(m0, m1, b).map(|w| {
                vec![
                    w.m0.as_u8() as u64,
                    w.m1.as_u8() as u64,
                    w.r0.as_u8() as u64,
                    w.r1.as_u8() as u64,
                    w.e.as_u8() as u64,
                ]
            })
        }
        "bitot.sim1" => {
            let (m0, m1) = (want_bit(bindings, "m0")?, want_bit(bindings, "m1")?);
            bitot_and::bitot_sim1(m0, m1).map(|w| {
                vec![
                    w.m0.as_u8() as u64,
                    w.m1.as_u8() as u64,
                    w.r0.as_u8() as u64,
                    w.r1.as_u8() as u64,
                    w.e.as_u8() as u64,
                ]
            })
        }
        "bitot.real2" => {
            let (m0, m1, b) = (
                want_bit(bindings, "m0")?,
                want_bit(bindings, "m1")?,
                want_bit(bindings, "b")?,
            );
            bitot_and::bitot_real_view2(m0, m1, b).map(receiver2_words)
        }
        "bitot.sim2" => {
            let (b, m_b) = (want_bit(bindings, "b")?, want_bit(bindings, "mb")?);
            bitot_and::bitot_sim2(b, m_b).map(receiver2_words)
        }
        "and.execute" => {
            let (a, b) = (want_bit(bindings, "a")?, want_bit(bindings, "b")?);
            bitot_and::and_execute(a, b).map(|&(u, m)| vec![u.as_u8() as u64, m.as_u8() as u64])
        }
        "and.real-a" => {
            let (a, b) = (want_bit(bindings, "a")?, want_bit(bindings, "b")?);
            bitot_and::and_real_view_a(a, b).map(and_a_words)
        }
        "and.sim-a" => {
            let a = want_bit(bindings, "a")?;
            bitot_and::and_sim_a(a).map(and_a_words)
        }
        "and.real-b" => {
            let (a, b) = (want_bit(bindings, "a")?, want_bit(bindings, "b")?);
            bitot_and::and_real_view_b(a, b).map(and_b_words)
        }
        "and.sim-b" => {
            let (b, out) = (want_bit(bindings, "b")?, want_bit(bindings, "out")?);
            bitot_and::and_sim_b(b, out).map(and_b_words)
        }
        other => {
            return Err(format!(
                "unknown program id '{}'; known ids: {}",
                other,
                PROGRAM_IDS.join(", ")
            ))
        }
    };
    Ok(d)
}

fn receiver_words(w: &np_ot::NpReceiverView) -> Words {
    vec![
        w.v as u64,
        w.a.value(),
        w.b.value(),
        w.c_other.value(),
        w.y0.encoded(),
        w.e0.encoded(),
        w.y1.encoded(),
        w.e1.encoded(),
    ]
}

fn sender_words(w: &np_ot::NpSenderView) -> Words {
    vec![
        w.m0.encoded(),
        w.m1.encoded(),
        w.t1.encoded(),
        w.t2.encoded(),
        w.t3.encoded(),
        w.t4.encoded(),
    ]
}

fn receiver2_words(w: &bitot_and::BitOtView2) -> Words {
    vec![
        w.b.as_u8() as u64,
        w.d.as_u8() as u64,
        w.r_d.as_u8() as u64,
        w.f0.as_u8() as u64,
        w.f1.as_u8() as u64,
    ]
}

fn and_a_words(w: &bitot_and::AndViewA) -> Words {
    vec![
        w.a.as_u8() as u64,
        w.u.as_u8() as u64,
        w.ot.m0.as_u8() as u64,
        w.ot.m1.as_u8() as u64,
        w.ot.r0.as_u8() as u64,
        w.ot.r1.as_u8() as u64,
        w.ot.e.as_u8() as u64,
    ]
}

fn and_b_words(w: &bitot_and::AndViewB) -> Words {
    vec![
        w.b.as_u8() as u64,
        w.m_b.as_u8() as u64,
        w.ot.d.as_u8() as u64,
        w.ot.r_d.as_u8() as u64,
        w.ot.f0.as_u8() as u64,
        w.ot.f1.as_u8() as u64,
    ]
}
