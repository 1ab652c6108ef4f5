//! Cross-backend invariants: the exponent-space and Schnorr realizations
//! of the same group produce isomorphic distributions, and masking a
//! uniform group element by any fixed element leaves it uniform.

use mpcheck_core::algebra::{
    ddh_rand, ddh_real, ddh_sr, ddh_sr_triple, GroupDesc, GroupElem, SCHNORR_TABLE,
};
use mpcheck_core::dist::Dist;
use mpcheck_core::np_ot;

/// Uniform distribution over the group, as images of uniform exponents.
fn uniform_group(desc: &GroupDesc) -> Dist<GroupElem> {
    let d = *desc;
    Dist::uniform(d.order()).map(move |&x| d.gpow_raw(x))
}

#[test]
fn group_one_time_pad_both_backends() {
    // map x -> g^x * c over uniform x is uniform for every fixed c
    let mut descs: Vec<GroupDesc> = [5u64, 7, 11, 101]
        .iter()
        .map(|&q| GroupDesc::exponent(q).unwrap())
        .collect();
    for (q, _, _) in SCHNORR_TABLE {
        if q <= 101 {
            descs.push(GroupDesc::schnorr(q).unwrap());
        }
    }
    for desc in descs {
        let uniform = uniform_group(&desc);
        for c in desc.elements() {
            let masked = Dist::uniform(desc.order()).map(|&x| desc.gpow_raw(x) * c);
            assert_eq!(masked, uniform, "pad broke at order {}", desc.order());
        }
    }
}

#[test]
fn backends_agree_on_every_distribution() {
    // pushing exponent-space outcomes through the Schnorr embedding gives
    // exactly the Schnorr-backend distributions
    for q in [3u64, 5, 11] {
        let exp = GroupDesc::exponent(q).unwrap();
        let sch = GroupDesc::schnorr(q).unwrap();
        let f = exp.exponents();
        let embed = move |e: &GroupElem| sch.gpow_raw(e.encoded());

        assert_eq!(
            ddh_real(&exp).map(|t| (embed(&t.0), embed(&t.1), embed(&t.2))),
            ddh_real(&sch)
        );
        assert_eq!(
            ddh_rand(&exp).map(|t| (embed(&t.0), embed(&t.1), embed(&t.2))),
            ddh_rand(&sch)
        );
        for (x, y, z) in [(1u64, 1, 1), (2, 3, 1), (0, 2, 2)] {
            let (xe, ye, ze) = (f.elem(x), f.elem(y), f.elem(z));
            let (xs, ys, zs) = (
                sch.exponents().elem(x),
                sch.exponents().elem(y),
                sch.exponents().elem(z),
            );
            assert_eq!(
                ddh_sr(&exp, xe, ye, ze).map(|t| (
                    embed(&t.0),
                    embed(&t.1),
                    embed(&t.2),
                    embed(&t.3)
                )),
                ddh_sr(&sch, xs, ys, zs)
            );
        }
        let m0e = exp.gpow_raw(1);
        let m1e = exp.gpow_raw(2);
        let m0s = sch.gpow_raw(1);
        let m1s = sch.gpow_raw(2);
        if q <= 5 {
            // the full execution enumerates seven nested samples; keep it
            // to the small orders
            assert_eq!(
                np_ot::np_execute(m0e, m1e, true).map(|e| embed(e)),
                np_ot::np_execute(m0s, m1s, true)
            );
        }
        assert_eq!(
            np_ot::sender_sim_view(m0e, m1e)
                .map(|w| { (embed(&w.t1), embed(&w.t2), embed(&w.t3), embed(&w.t4)) }),
            np_ot::sender_sim_view(m0s, m1s).map(|w| (w.t1, w.t2, w.t3, w.t4))
        );
    }
}

#[test]
fn self_reduction_triple_case_up_to_q13() {
    for q in [3u64, 5, 7, 11, 13] {
        let desc = GroupDesc::exponent(q).unwrap();
        let f = desc.exponents();
        for x in 0..q {
            for y in 0..q {
                let z = f.elem(x) * f.elem(y);
                assert_eq!(
                    ddh_sr(&desc, f.elem(x), f.elem(y), z),
                    ddh_sr_triple(&desc, f.elem(x), f.elem(y), z).unwrap(),
                    "triple case at ({}, {}) q={}",
                    x,
                    y,
                    q
                );
            }
        }
    }
}
