//! Independent brute-force oracles.
//!
//! Everything here recomputes expected distributions by direct integer
//! enumeration — no distribution monad, no field/group types — and then
//! holds the library to those counts. The oracle is deliberately a second
//! implementation path: when it and the library agree on an exact
//! rational, that value is frozen.

use std::collections::BTreeMap;

use mpcheck_core::algebra::{
    ddh_rand, ddh_real, ddh_sr, ddh_sr_in, ddh_sr_non_triple, ddh_sr_triple, GroupDesc, SrSampling,
};
use mpcheck_core::dist::Dist;
use mpcheck_core::np_ot;
use mpcheck_core::rational::Rational;
use mpcheck_core::secframe::{distinguisher_advantage, hybrid_bound};
use mpcheck_core::secmult;

/// Outcome counts over a common denominator `total`.
struct Counts<K: Ord> {
    counts: BTreeMap<K, u64>,
    total: u64,
}

impl<K: Ord + Clone> Counts<K> {
    fn new() -> Self {
        Counts {
            counts: BTreeMap::new(),
            total: 0,
        }
    }

    fn add(&mut self, key: K) {
        *self.counts.entry(key).or_insert(0) += 1;
        self.total += 1;
    }

    fn mass(&self, key: &K) -> Rational {
        match self.counts.get(key) {
            Some(&c) => Rational::ratio(c, self.total),
            None => Rational::zero(),
        }
    }

    /// Exact total-variation distance between two count tables.
    fn tv(&self, other: &Counts<K>) -> Rational {
        let mut diff_sum: u64 = 0;
        for (key, &c) in &self.counts {
            let oc = other.counts.get(key).copied().unwrap_or(0);
            diff_sum += (c * other.total).abs_diff(oc * self.total);
        }
        for (key, &oc) in &other.counts {
            if !self.counts.contains_key(key) {
                diff_sum += oc * self.total;
            }
        }
        Rational::ratio(diff_sum, 2 * self.total * other.total)
    }

    /// Checks a distribution matches these counts mass for mass.
    fn matches(&self, dist: &Dist<K>) -> bool {
        dist.support_len() == self.counts.len() && dist.iter().all(|(k, m)| *m == self.mass(k))
    }
}

type ExpTuple = (u64, u64, u64, u64);

/// The self-reduction formula, written out directly on exponents.
fn sr_formula(x: u64, y: u64, z: u64, a: u64, b: u64, q: u64) -> ExpTuple {
    (1 % q, (x + b) % q * a % q, y % q, (z + b * y) % q * a % q)
}

fn encode_tuple4(t: &mpcheck_core::algebra::Tuple4) -> ExpTuple {
    (t.0.encoded(), t.1.encoded(), t.2.encoded(), t.3.encoded())
}

#[test]
fn self_reduction_fixes_triples_exactly() {
    // For every DH-triple input the reduction's output distribution is
    // exactly the simplified triple program's.
    for q in [3u64, 5, 7] {
        let desc = GroupDesc::exponent(q).unwrap();
        let f = desc.exponents();
        for x in 0..q {
            for y in 0..q {
                let z = x * y % q;
                let mut oracle = Counts::new();
                for a in 1..q {
                    for b in 0..q {
                        oracle.add(sr_formula(x, y, z, a, b, q));
                    }
                }
                let raw = ddh_sr(&desc, f.elem(x), f.elem(y), f.elem(z)).map(encode_tuple4);
                assert!(
                    oracle.matches(&raw),
                    "oracle disagrees at ({}, {}) q={}",
                    x,
                    y,
                    q
                );
                let simplified = ddh_sr_triple(&desc, f.elem(x), f.elem(y), f.elem(z))
                    .unwrap()
                    .map(encode_tuple4);
                assert_eq!(raw, simplified, "triple case at ({}, {}) q={}", x, y, q);
            }
        }
    }
}

#[test]
fn self_reduction_non_triple_gap_is_one_over_q() {
    // On non-triples the reduction output stays supported on non-triples,
    // so it sits at distance exactly 1/q from the independent-uniform
    // program; the oracle count is authoritative and the library must
    // agree with it to the rational.
    for q in [3u64, 5] {
        let desc = GroupDesc::exponent(q).unwrap();
        let f = desc.exponents();
        for x in 0..q {
            for y in 0..q {
                for z in 0..q {
                    if z == x * y % q {
                        continue;
                    }
                    let mut raw_oracle = Counts::new();
                    for a in 1..q {
                        for b in 0..q {
                            raw_oracle.add(sr_formula(x, y, z, a, b, q));
                        }
                    }
                    let mut simplified_oracle = Counts::new();
                    for w in 0..q {
                        for t in 0..q {
                            simplified_oracle.add((1 % q, w, y, t));
                        }
                    }
                    let oracle_tv = raw_oracle.tv(&simplified_oracle);
                    let raw = ddh_sr(&desc, f.elem(x), f.elem(y), f.elem(z)).map(encode_tuple4);
                    let simplified = ddh_sr_non_triple(&desc, f.elem(x), f.elem(y), f.elem(z))
                        .unwrap()
                        .map(encode_tuple4);
                    assert!(raw_oracle.matches(&raw));
                    assert!(simplified_oracle.matches(&simplified));
                    assert_eq!(raw.tv_distance(&simplified), oracle_tv);
                    assert_eq!(oracle_tv, Rational::ratio(1, q));
                    // substituting the simplified program on both sides
                    // collapses the gap
                    assert_eq!(simplified.tv_distance(&simplified), Rational::zero());
                }
            }
        }
    }
}

#[test]
fn full_range_scale_breaks_the_triple_case() {
    // With the scale factor allowed to be zero the identity tuple picks
    // up excess mass and the triple case is no longer uniform.
    let q = 5u64;
    let desc = GroupDesc::exponent(q).unwrap();
    let f = desc.exponents();
    let full =
        ddh_sr_in(&desc, f.elem(2), f.elem(3), f.elem(1), SrSampling::Full).map(encode_tuple4);
    let simplified = ddh_sr_triple(&desc, f.elem(2), f.elem(3), f.elem(1))
        .unwrap()
        .map(encode_tuple4);
    let mut oracle = Counts::new();
    for a in 0..q {
        for b in 0..q {
            oracle.add(sr_formula(2, 3, 1, a, b, q));
        }
    }
    assert!(oracle.matches(&full));
    let gap = full.tv_distance(&simplified);
    assert!(gap > Rational::zero());
}

#[test]
fn ddh_distribution_distance() {
    // Real triples against random tuples: distance (q-1)/q, measured and
    // counted independently.
    for q in [3u64, 5] {
        let desc = GroupDesc::exponent(q).unwrap();
        let mut real_oracle = Counts::new();
        let mut rand_oracle = Counts::new();
        for a in 0..q {
            for b in 0..q {
                real_oracle.add((a, b, a * b % q));
                for c in 0..q {
                    rand_oracle.add((a, b, c));
                }
            }
        }
        let real = ddh_real(&desc).map(|t| (t.0.encoded(), t.1.encoded(), t.2.encoded()));
        let rand = ddh_rand(&desc).map(|t| (t.0.encoded(), t.1.encoded(), t.2.encoded()));
        assert!(real_oracle.matches(&real));
        assert!(rand_oracle.matches(&rand));
        let oracle_tv = real_oracle.tv(&rand_oracle);
        assert_eq!(real.tv_distance(&rand), oracle_tv);
        assert_eq!(oracle_tv, Rational::ratio(q - 1, q));
    }
}

#[test]
fn secmult_views_match_enumeration() {
    // Direct enumeration of the initializer's coins, recomputing the
    // protocol in plain modular arithmetic.
    for q in [3u64, 5] {
        let field = mpcheck_core::algebra::Field::new(q).unwrap();
        for x in 0..q {
            for y in 0..q {
                let mut view1_oracle = Counts::new();
                let mut view2_oracle = Counts::new();
                for a in 0..q {
                    for b in 0..q {
                        for r in 0..q {
                            let (c1, d1) = (a, r);
                            let (c2, d2) = (b, (a * b + q * q - r) % q);
                            let e2 = (x + c1) % q;
                            let e1 = (y + q - c2) % q;
                            let s1 = (x * e1 + q * q - d1) % q;
                            let s2 = (e2 * c2 + q * q - d2) % q;
                            view1_oracle.add((x, c1, d1, e1, s1, s2));
                            view2_oracle.add((y, c2, d2, e2, s1, s2));
                        }
                    }
                }
                let (xe, ye) = (field.elem(x), field.elem(y));
                let view1 = secmult::real_view1(xe, ye).map(|w| {
                    (
                        w.x.value(),
                        w.c1.value(),
                        w.d1.value(),
                        w.e1.value(),
                        w.s1.value(),
                        w.s2.value(),
                    )
                });
                let view2 = secmult::real_view2(xe, ye).map(|w| {
                    (
                        w.y.value(),
                        w.c2.value(),
                        w.d2.value(),
                        w.e2.value(),
                        w.s1.value(),
                        w.s2.value(),
                    )
                });
                assert!(
                    view1_oracle.matches(&view1),
                    "view1 at ({}, {}) q={}",
                    x,
                    y,
                    q
                );
                assert!(
                    view2_oracle.matches(&view2),
                    "view2 at ({}, {}) q={}",
                    x,
                    y,
                    q
                );
            }
        }
    }
}

#[test]
fn sender_views_at_v1_sit_at_weight_distance() {
    // With the equal-pads runs pruned, both sender programs have weight
    // (q-1)/q and disjoint supports at v = 1 (a DH detector separates
    // them), so the distance is exactly (q-1)/q.
    let q = 5u64;
    let desc = GroupDesc::exponent(q).unwrap();
    let m0 = desc.gpow_raw(1);
    let m1 = desc.gpow_raw(2);
    let real = np_ot::sender_real_view(m0, m1, true);
    let sim = np_ot::sender_sim_view(m0, m1);
    assert_eq!(real.weight(), Rational::ratio(q - 1, q));
    assert_eq!(sim.weight(), Rational::ratio(q - 1, q));
    assert_eq!(real.tv_distance(&sim), Rational::ratio(q - 1, q));
}

#[test]
fn hybrid_chain_bounds_the_sender_gap() {
    let q = 5u64;
    let desc = GroupDesc::exponent(q).unwrap();
    let m0 = desc.gpow_raw(1);
    let m1 = desc.gpow_raw(2);
    // all-uniform middle hybrid, scaled to the same weight
    let hybrid = Dist::uniform(q)
        .bind(|&a| {
            Dist::uniform(q).bind(move |&b| {
                Dist::uniform(q).bind(move |&c| Dist::uniform(q).map(move |&d| (a, b, c, d)))
            })
        })
        .scale(&Rational::ratio(q - 1, q))
        .unwrap();
    let encode = |w: &np_ot::NpSenderView| {
        (
            w.t1.encoded(),
            w.t2.encoded(),
            w.t3.encoded(),
            w.t4.encoded(),
        )
    };
    let chain = [
        np_ot::sender_real_view(m0, m1, true).map(encode),
        hybrid,
        np_ot::sender_sim_view(m0, m1).map(encode),
    ];
    let bound = hybrid_bound(&chain).unwrap();
    assert!(bound.end_to_end <= bound.step_sum);
    assert_eq!(bound.end_to_end, Rational::ratio(q - 1, q));
}

#[test]
fn exhaustive_distinguishers_attain_tv() {
    // Over a support this small every deterministic distinguisher can be
    // enumerated; the best one's advantage is exactly the distance.
    let a = Dist::from_entries([
        (0u64, Rational::ratio(3, 16)),
        (1, Rational::ratio(5, 16)),
        (2, Rational::ratio(2, 16)),
        (5, Rational::ratio(6, 16)),
    ]);
    let b = Dist::from_entries([
        (0u64, Rational::ratio(4, 16)),
        (2, Rational::ratio(6, 16)),
        (3, Rational::ratio(1, 16)),
        (5, Rational::ratio(5, 16)),
    ]);
    let universe: Vec<u64> = (0..6).collect();
    let tv = a.tv_distance(&b);
    let mut best = Rational::zero();
    for subset in 0u32..(1 << universe.len()) {
        let adv =
            distinguisher_advantage(|v: &u64| Dist::pure(subset >> (*v as u32) & 1 == 1), &a, &b);
        assert!(adv <= tv, "subset {:b} exceeds tv", subset);
        if adv > best {
            best = adv;
        }
    }
    assert_eq!(best, tv);
}

#[test]
fn receiver_view_weight_and_masking() {
    // The pruned runs cost exactly 1/q of the mass; the decryptable slot
    // is a fresh uniform pad over the group for every message pair.
    let q = 5u64;
    let desc = GroupDesc::exponent(q).unwrap();
    for conv in [np_ot::SrConvention::Raw, np_ot::SrConvention::Simplified] {
        for v in [false, true] {
            let view = np_ot::receiver_real_view(desc.gpow_raw(2), desc.gpow_raw(3), v, conv);
            assert_eq!(view.weight(), Rational::ratio(q - 1, q));
            let chosen = view.map(|w| if w.v { w.e1 } else { w.e0 });
            let other = view.map(|w| if w.v { w.e0 } else { w.e1 });
            let uniform_scaled = Dist::uniform(q)
                .map(|&k| desc.gpow_raw(k))
                .scale(&Rational::ratio(q - 1, q))
                .unwrap();
            assert_eq!(chosen, uniform_scaled);
            assert_eq!(other, uniform_scaled);
        }
    }
}
