//! The check operations applied to the real protocol ensembles, including
//! reports that must come back failing when fed a broken program.

use mpcheck_core::algebra::{Field, GroupDesc};
use mpcheck_core::bitot_and::{self, Bit, BITS};
use mpcheck_core::dist::Dist;
use mpcheck_core::np_ot::{self, SrConvention};
use mpcheck_core::rational::Rational;
use mpcheck_core::secframe::{
    check_correctness, check_perfect, check_statistical, Ensemble, SecurityParam, Verdict,
    DEFAULT_MAX_Q,
};
use mpcheck_core::secmult;

fn all_bit_triples() -> Vec<(Bit, Bit, Bit)> {
    let mut out = Vec::new();
    for m0 in BITS {
        for m1 in BITS {
            for b in BITS {
                out.push((m0, m1, b));
            }
        }
    }
    out
}

#[test]
fn perfect_check_on_the_multiplication_views() {
    let q = 5u64;
    let param = SecurityParam::new(q, DEFAULT_MAX_Q).unwrap();
    let f = Field::new(q).unwrap();
    let domain: Vec<(u64, u64)> = (0..q).flat_map(|x| (0..q).map(move |y| (x, y))).collect();

    let real = Ensemble::new(domain.clone(), move |&(x, y)| {
        secmult::real_view1(f.elem(x), f.elem(y))
    });
    let sim = Ensemble::new(domain, move |&(x, y)| {
        secmult::sim_view1(f.elem(x), f.elem(y))
    });
    let report = check_perfect("secmult", &param, "exact", &real, &sim).unwrap();
    assert!(report.pass);
    assert_eq!(report.max_tv, Rational::zero());
    assert!(report
        .per_input
        .iter()
        .all(|c| c.verdict == Verdict::Perfect));
}

#[test]
fn perfect_check_catches_a_broken_simulator() {
    // same simulator with the d1' relation dropped: the report must fail
    let q = 5u64;
    let param = SecurityParam::new(q, DEFAULT_MAX_Q).unwrap();
    let f = Field::new(q).unwrap();
    let domain: Vec<(u64, u64)> = vec![(2, 3), (1, 4)];

    let real = Ensemble::new(domain.clone(), move |&(x, y)| {
        secmult::real_view1(f.elem(x), f.elem(y))
    });
    let broken = Ensemble::new(domain, move |&(x, y)| {
        let (x, y) = (f.elem(x), f.elem(y));
        Dist::uniform(q).bind(move |&c1| {
            Dist::uniform(q).bind(move |&e1| {
                Dist::uniform(q).bind(move |&s1| {
                    Dist::uniform(q).map(move |&d1| secmult::SecMultView1 {
                        x,
                        c1: f.elem(c1),
                        d1: f.elem(d1),
                        e1: f.elem(e1),
                        s1: f.elem(s1),
                        s2: x * y - f.elem(s1),
                    })
                })
            })
        })
    });
    let report = check_perfect("secmult-mutated", &param, "exact", &real, &broken).unwrap();
    assert!(!report.pass);
    assert!(report.max_tv > Rational::zero());
    assert!(report
        .per_input
        .iter()
        .any(|c| c.verdict == Verdict::Failed));
}

#[test]
fn statistical_check_on_the_receiver_views() {
    // raw-reduction receiver views against the simulator, bounded by 1/q
    let q = 5u64;
    let param = SecurityParam::new(q, DEFAULT_MAX_Q).unwrap();
    let desc = GroupDesc::exponent(q).unwrap();
    let mut domain: Vec<(u64, u64, bool)> = Vec::new();
    for m0 in 0..q {
        for m1 in 0..q {
            for v in [false, true] {
                domain.push((m0, m1, v));
            }
        }
    }
    let real = Ensemble::new(domain.clone(), move |&(m0, m1, v)| {
        np_ot::receiver_real_view(desc.gpow_raw(m0), desc.gpow_raw(m1), v, SrConvention::Raw)
    });
    let sim = Ensemble::new(domain, move |&(_, _, v)| np_ot::receiver_sim_view(&desc, v));
    let report = check_statistical(
        "np-receiver",
        &param,
        "raw",
        &real,
        &sim,
        Rational::ratio(1, q),
    )
    .unwrap();
    assert!(report.pass);
    assert!(report.max_tv <= Rational::ratio(1, q));
}

#[test]
fn correctness_check_on_bit_ot_and_its_mutant() {
    let param = SecurityParam::new(2, DEFAULT_MAX_Q).unwrap();
    let protocol = Ensemble::new(all_bit_triples(), |&(m0, m1, b)| {
        bitot_and::bitot_execute(m0, m1, b)
    });
    let functionality = Ensemble::new(all_bit_triples(), |&(m0, m1, b)| {
        Dist::pure(if b.0 { m1 } else { m0 })
    });
    let report = check_correctness("bit-ot", &param, "exact", &protocol, &functionality).unwrap();
    assert!(report.pass);
    assert_eq!(report.max_tv, Rational::zero());

    // sender that swaps the two ciphertexts
    let swapped = Ensemble::new(all_bit_triples(), |&(m0, m1, b)| {
        bitot_and::coin_bit().bind(move |&r0| {
            bitot_and::coin_bit().bind(move |&r1| {
                bitot_and::coin_bit().map(move |&d| {
                    let e = b ^ d;
                    let pick = |i: Bit| if i.0 { r1 } else { r0 };
                    let f0 = m0 ^ pick(e);
                    let f1 = m1 ^ pick(!e);
                    (if b.0 { f0 } else { f1 }) ^ pick(d)
                })
            })
        })
    });
    let report =
        check_correctness("bit-ot-mutated", &param, "exact", &swapped, &functionality).unwrap();
    assert!(!report.pass);
    assert_eq!(report.max_tv, Rational::ratio(1, 2));
}
