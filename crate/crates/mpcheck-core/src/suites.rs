//! The named check suites behind `mpcheck verify`.
//!
//! Each suite sweeps its full input domain at the given parameter and
//! produces one [`CheckReport`]. All randomness inside suites (permutation
//! sampling, distinguisher seeds) is derived from a fixed constant, so
//! report bytes are deterministic given (suite, parameter, convention).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::algebra::{Field, GroupDesc, SCHNORR_TABLE};
use crate::bitot_and::{self, BITS};
use crate::dist::Dist;
use crate::np_ot::{self, SrConvention};
use crate::rational::Rational;
use crate::rng::CounterRng;
use crate::secframe::{
    check_perfect, CheckReport, Ensemble, ReportBuilder, SecframeError, SecurityParam,
};
use crate::secmult;

const SUITE_SEED: u64 = 0x6D70_6368_6563_6B31;

/// Identifiers of the shipped suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteId {
    DistLaws,
    Secmult,
    NpReceiver,
    NpSender,
    BitOt,
    AndGate,
}

impl SuiteId {
    pub const ALL: [SuiteId; 6] = [
        SuiteId::DistLaws,
        SuiteId::Secmult,
        SuiteId::NpReceiver,
        SuiteId::NpSender,
        SuiteId::BitOt,
        SuiteId::AndGate,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SuiteId::DistLaws => "dist-laws",
            SuiteId::Secmult => "secmult",
            SuiteId::NpReceiver => "np-receiver",
            SuiteId::NpSender => "np-sender",
            SuiteId::BitOt => "bit-ot",
            SuiteId::AndGate => "and-gate",
        }
    }

    pub fn parse(name: &str) -> Option<SuiteId> {
        SuiteId::ALL.iter().copied().find(|s| s.name() == name)
    }

    /// Whether the suite's input domain depends on the field/group order.
    pub fn uses_q(&self) -> bool {
        !matches!(self, SuiteId::BitOt | SuiteId::AndGate)
    }
}

/// Runs one suite at one parameter.
pub fn run_suite(
    id: SuiteId,
    q: u64,
    max_q: u64,
    conv: SrConvention,
) -> Result<CheckReport, SecframeError> {
    match id {
        SuiteId::DistLaws => dist_laws(q, max_q),
        SuiteId::Secmult => secmult_suite(q, max_q),
        SuiteId::NpReceiver => np_receiver_suite(q, max_q, conv),
        SuiteId::NpSender => np_sender_suite(q, max_q),
        SuiteId::BitOt => Ok(bitot_suite()),
        SuiteId::AndGate => Ok(and_gate_suite()),
    }
}

/// The groups a protocol suite sweeps at order `q`: exponent space always,
/// plus the Schnorr subgroup when parameters are on file.
fn backends(q: u64) -> Vec<(&'static str, GroupDesc)> {
    let mut out = alloc::vec![("exponent", GroupDesc::exponent(q).expect("validated prime"))];
    if SCHNORR_TABLE.iter().any(|(tq, _, _)| *tq == q) {
        out.push(("schnorr", GroupDesc::schnorr(q).expect("table entry")));
    }
    out
}

fn random_permutation(rng: &mut CounterRng, q: u64) -> Vec<u64> {
    let mut v: Vec<u64> = (0..q).collect();
    for i in (1..v.len()).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        v.swap(i, j);
    }
    v
}

fn random_small_dist(rng: &mut CounterRng) -> Dist<u64> {
    let n = 1 + rng.below(3);
    let entries = (0..n)
        .map(|_| (rng.below(6), Rational::ratio(1 + rng.below(4), 16)))
        .collect::<Vec<_>>();
    Dist::from_entries(entries)
}

/// Monad and transformation laws of the distribution engine.
fn dist_laws(q: u64, max_q: u64) -> Result<CheckReport, SecframeError> {
    let param = SecurityParam::new(q, max_q)?;
    let mut builder = ReportBuilder::new("dist-laws", &param.label(), "exact");
    let mut rng = CounterRng::new(SUITE_SEED);

    let mut dists: Vec<Dist<u64>> = alloc::vec![
        Dist::pure(0),
        Dist::pure(3),
        Dist::uniform(2),
        Dist::uniform(5),
        Dist::uniform(3).scale(&Rational::ratio(1, 2)).unwrap(),
        Dist::guard(false).map(|_| 0),
        Dist::uniform_except(5, 2),
        Dist::coin().map(|&b| b as u64),
    ];
    for _ in 0..8 {
        dists.push(random_small_dist(&mut rng));
    }
    let mut kernel_tables: Vec<Vec<Dist<u64>>> = Vec::new();
    for _ in 0..4 {
        kernel_tables.push((0..6).map(|_| random_small_dist(&mut rng)).collect());
    }
    kernel_tables.push((0..6).map(Dist::pure).collect());
    kernel_tables.push((0..6).map(|v| Dist::uniform(v % 4 + 1)).collect());
    let kernels: Vec<_> = kernel_tables
        .iter()
        .map(|t| move |v: &u64| t[(*v % 6) as usize].clone())
        .collect();

    let mut left = Rational::zero();
    for k in &kernels {
        for v in 0..6 {
            left = left.max(Dist::pure(v).bind(k).tv_distance(&k(&v)));
        }
    }
    builder.push(String::from("monad-left-identity"), left);

    let mut right = Rational::zero();
    for d in &dists {
        right = right.max(d.bind(|&v| Dist::pure(v)).tv_distance(d));
    }
    builder.push(String::from("monad-right-identity"), right);

    let mut assoc = Rational::zero();
    for d in &dists {
        for k in &kernels {
            for h in &kernels {
                let lhs = d.bind(k).bind(h);
                let rhs = d.bind(|v| k(v).bind(h));
                assoc = assoc.max(lhs.tv_distance(&rhs));
            }
        }
    }
    builder.push(String::from("monad-associativity"), assoc);

    let mut comm = Rational::zero();
    for a in &dists {
        for b in &dists {
            let lhs = a.bind(|&x| b.map(move |&y| (x, y)));
            let rhs = b.bind(|&y| a.map(move |&x| (x, y)));
            comm = comm.max(lhs.tv_distance(&rhs));
        }
    }
    builder.push(String::from("bind-commutativity"), comm);

    // lossless source cancels in a constant bind
    let target = Dist::uniform(3);
    builder.push(
        format!("lossless-constant-bind q={}", q),
        Dist::uniform(q)
            .bind(|_| target.clone())
            .tv_distance(&target),
    );

    // constant bind equals scaling by the source weight
    let mut scale_law = Rational::zero();
    for d in &dists {
        let lhs = d.bind(|_| target.clone());
        let rhs = target.scale(&d.weight()).unwrap();
        scale_law = scale_law.max(lhs.tv_distance(&rhs));
    }
    builder.push(String::from("constant-bind-scales-by-weight"), scale_law);

    // uniform is invariant under 50 sampled permutations of its support
    let uniform = Dist::uniform(q);
    let mut perm_law = Rational::zero();
    for _ in 0..50 {
        let perm = random_permutation(&mut rng, q);
        let mapped = uniform.map(|&v| perm[v as usize]);
        perm_law = perm_law.max(mapped.tv_distance(&uniform));
    }
    builder.push(
        format!("uniform-permutation-invariance q={} perms=50", q),
        perm_law,
    );

    // one-time-pad transformations: subtraction, addition, affine
    let mut sub_law = Rational::zero();
    let mut add_law = Rational::zero();
    for y in 0..q {
        sub_law = sub_law.max(uniform.map(|&b| (y + q - b) % q).tv_distance(&uniform));
        add_law = add_law.max(uniform.map(|&b| (y + b) % q).tv_distance(&uniform));
    }
    builder.push(format!("uniform-subtraction-pad q={}", q), sub_law);
    builder.push(format!("uniform-addition-pad q={}", q), add_law);

    let mut affine_law = Rational::zero();
    for y in 0..q {
        for x in 1..q {
            affine_law = affine_law.max(uniform.map(|&b| (y + x * b) % q).tv_distance(&uniform));
        }
    }
    builder.push(format!("uniform-affine-pad q={}", q), affine_law);

    Ok(builder.finish())
}

fn field_inputs(q: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::with_capacity((q * q) as usize);
    for x in 0..q {
        for y in 0..q {
            out.push((x, y));
        }
    }
    out
}

/// Secure multiplication: both simulator equalities, output marginals,
/// protocol-vs-functionality and correctness, exhaustively over `Z_q^2`.
fn secmult_suite(q: u64, max_q: u64) -> Result<CheckReport, SecframeError> {
    let param = SecurityParam::new(q, max_q)?;
    let f = Field::new(q).expect("validated prime");
    let mut builder = ReportBuilder::new("secmult", &param.label(), "exact");

    let domain = field_inputs(q);
    let real1 = Ensemble::new(domain.clone(), move |&(x, y)| {
        secmult::real_view1(f.elem(x), f.elem(y))
    });
    let sim1 = Ensemble::new(domain.clone(), move |&(x, y)| {
        secmult::sim_view1(f.elem(x), f.elem(y))
    });
    builder.absorb(
        "party1-view ",
        &check_perfect("secmult", &param, "exact", &real1, &sim1)?,
    );

    let real2 = Ensemble::new(domain.clone(), move |&(x, y)| {
        secmult::real_view2(f.elem(x), f.elem(y))
    });
    let sim2 = Ensemble::new(domain.clone(), move |&(x, y)| {
        secmult::sim_view2(f.elem(x), f.elem(y))
    });
    builder.absorb(
        "party2-view ",
        &check_perfect("secmult", &param, "exact", &real2, &sim2)?,
    );

    for &(xv, yv) in &domain {
        let (x, y) = (f.elem(xv), f.elem(yv));
        let func = secmult::functionality(x, y);
        builder.push(
            format!("outputs-marginal1 ({}, {})", xv, yv),
            secmult::real_view1(x, y)
                .map(|w| (w.s1, w.s2))
                .tv_distance(&func),
        );
        builder.push(
            format!("outputs-marginal2 ({}, {})", xv, yv),
            secmult::real_view2(x, y)
                .map(|w| (w.s1, w.s2))
                .tv_distance(&func),
        );
        builder.push(
            format!("protocol-vs-functionality ({}, {})", xv, yv),
            secmult::protocol(x, y).tv_distance(&func),
        );
        builder.push(
            format!("correctness ({}, {})", xv, yv),
            secmult::protocol(x, y)
                .map(|&(s1, s2)| s1 + s2)
                .tv_distance(&Dist::pure(x * y)),
        );
    }
    Ok(builder.finish())
}

/// Naor-Pinkas receiver: simulator equality over every message pair and
/// choice bit, plus execution correctness, on each available backend.
fn np_receiver_suite(q: u64, max_q: u64, conv: SrConvention) -> Result<CheckReport, SecframeError> {
    let param = SecurityParam::new(q, max_q)?;
    let mut builder = ReportBuilder::new("np-receiver", &param.label(), conv.name());
    if conv == SrConvention::Raw {
        builder = builder.bound(Rational::ratio(1, q));
    }
    for (backend_name, desc) in backends(q) {
        let elems = desc.elements();
        for v in [false, true] {
            let sim = np_ot::receiver_sim_view(&desc, v);
            for &m0 in &elems {
                for &m1 in &elems {
                    let real = np_ot::receiver_real_view(m0, m1, v, conv);
                    builder.push(
                        format!(
                            "simulator backend={} m0={} m1={} v={}",
                            backend_name,
                            m0.encoded(),
                            m1.encoded(),
                            v as u8
                        ),
                        real.tv_distance(&sim),
                    );
                    let chosen = if v { m1 } else { m0 };
                    builder.push(
                        format!(
                            "correctness backend={} m0={} m1={} v={}",
                            backend_name,
                            m0.encoded(),
                            m1.encoded(),
                            v as u8
                        ),
                        np_ot::np_execute(m0, m1, v).tv_distance(&Dist::pure(chosen)),
                    );
                }
            }
        }
    }
    Ok(builder.finish())
}

/// Naor-Pinkas sender: exact simulator equality at `v = 0`, and the exact
/// reduction identity for a family of distinguishers at `v = 1`.
fn np_sender_suite(q: u64, max_q: u64) -> Result<CheckReport, SecframeError> {
    let param = SecurityParam::new(q, max_q)?;
    let mut builder = ReportBuilder::new("np-sender", &param.label(), "exact");
    for (backend_name, desc) in backends(q) {
        let elems = desc.elements();
        for &m0 in &elems {
            for &m1 in &elems {
                builder.push(
                    format!(
                        "v0-simulator backend={} m0={} m1={}",
                        backend_name,
                        m0.encoded(),
                        m1.encoded()
                    ),
                    np_ot::sender_real_view(m0, m1, false)
                        .tv_distance(&np_ot::sender_sim_view(m0, m1)),
                );
            }
        }
    }

    // Reduction identity at v = 1: lhs must equal a1 - a2 exactly; the
    // pushed value is the residual |lhs - (a1 - a2)|.
    let desc = GroupDesc::exponent(q).expect("validated prime");
    let m0 = desc.gpow_raw(1);
    let m1 = desc.gpow_raw(2 % q);
    for (name, d) in np_ot::fixed_distinguishers(&desc) {
        let (lhs, a1, a2) = np_ot::reduction_identity(&*d, m0, m1);
        builder.push(
            format!("reduction-identity D={}", name),
            (&lhs - &(a1 - a2)).abs(),
        );
    }
    for i in 0..16u64 {
        let d = np_ot::seeded_distinguisher(SUITE_SEED.wrapping_add(i));
        let (lhs, a1, a2) = np_ot::reduction_identity(&*d, m0, m1);
        builder.push(
            format!("reduction-identity D=seeded-{}", i),
            (&lhs - &(a1 - a2)).abs(),
        );
    }
    Ok(builder.finish())
}

/// Single-bit OT: simulator equalities and correctness over all inputs.
fn bitot_suite() -> CheckReport {
    let mut builder = ReportBuilder::new("bit-ot", "bits", "exact");
    for m0 in BITS {
        for m1 in BITS {
            for b in BITS {
                let label = format!("m0={} m1={} b={}", m0, m1, b);
                builder.push(
                    format!("sender-view {}", label),
                    bitot_and::bitot_real_view1(m0, m1, b)
                        .tv_distance(&bitot_and::bitot_sim1(m0, m1)),
                );
                let m_b = if b.0 { m1 } else { m0 };
                builder.push(
                    format!("receiver-view {}", label),
                    bitot_and::bitot_real_view2(m0, m1, b)
                        .tv_distance(&bitot_and::bitot_sim2(b, m_b)),
                );
                builder.push(
                    format!("correctness {}", label),
                    bitot_and::bitot_execute(m0, m1, b).tv_distance(&Dist::pure(m_b)),
                );
            }
        }
    }
    builder.finish()
}

/// AND gate: simulator equalities, share correctness, and the
/// OT-substitution composition step, over all inputs.
fn and_gate_suite() -> CheckReport {
    let mut builder = ReportBuilder::new("and-gate", "bits", "exact");
    for a in BITS {
        for b in BITS {
            let label = format!("a={} b={}", a, b);
            builder.push(
                format!("party-a-view {}", label),
                bitot_and::and_real_view_a(a, b).tv_distance(&bitot_and::and_sim_a(a)),
            );
            builder.push(
                format!("party-b-view {}", label),
                bitot_and::and_real_view_b(a, b).tv_distance(&bitot_and::and_sim_b(b, a.and(b))),
            );
            builder.push(
                format!("correctness {}", label),
                bitot_and::and_execute(a, b)
                    .map(|&(u, m)| u ^ m)
                    .tv_distance(&Dist::pure(a.and(b))),
            );
            // replacing the embedded OT view by its simulator inside the
            // real view must land exactly on the party-A simulator
            let hybrid = bitot_and::coin_bit().bind(move |&u| {
                let (m0, m1) = bitot_and::and_messages(a, u);
                bitot_and::bitot_sim1(m0, m1).map(move |&ot| bitot_and::AndViewA { a, u, ot })
            });
            builder.push(
                format!("ot-substitution {}", label),
                hybrid.tv_distance(&bitot_and::and_sim_a(a)),
            );
        }
    }
    builder.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::secframe::DEFAULT_MAX_Q;

    #[test]
    fn suite_names_roundtrip() {
        for id in SuiteId::ALL {
            assert_eq!(SuiteId::parse(id.name()), Some(id));
        }
        assert_eq!(SuiteId::parse("nonsense"), None);
    }

    #[test]
    fn dist_laws_pass_at_small_q() {
        let report = run_suite(SuiteId::DistLaws, 5, DEFAULT_MAX_Q, SrConvention::Raw).unwrap();
        assert!(report.pass, "{}", report.to_text());
        assert_eq!(report.max_tv, Rational::zero());
    }

    #[test]
    fn secmult_suite_passes_at_q3() {
        let report = run_suite(SuiteId::Secmult, 3, DEFAULT_MAX_Q, SrConvention::Raw).unwrap();
        assert!(report.pass, "{}", report.to_text());
        assert_eq!(report.max_tv, Rational::zero());
    }

    #[test]
    fn boolean_suites_pass() {
        for id in [SuiteId::BitOt, SuiteId::AndGate] {
            let report = run_suite(id, 2, DEFAULT_MAX_Q, SrConvention::Raw).unwrap();
            assert!(report.pass, "{}", report.to_text());
            assert_eq!(report.max_tv, Rational::zero());
        }
    }

    #[test]
    fn np_suites_pass_at_q3() {
        for conv in [SrConvention::Raw, SrConvention::Simplified] {
            let report = run_suite(SuiteId::NpReceiver, 3, DEFAULT_MAX_Q, conv).unwrap();
            assert!(report.pass, "{}", report.to_text());
        }
        let report = run_suite(SuiteId::NpSender, 3, DEFAULT_MAX_Q, SrConvention::Raw).unwrap();
        assert!(report.pass, "{}", report.to_text());
    }

    #[test]
    fn non_prime_rejected() {
        assert!(run_suite(SuiteId::Secmult, 6, DEFAULT_MAX_Q, SrConvention::Raw).is_err());
    }
}
