//! One seeded draw from a protocol's real view distribution, taken by
//! actually running every role in-process over channel endpoints — the
//! same driver code a live TCP session runs.

use std::thread;

use mpcheck_core::algebra::GroupElem;
use mpcheck_core::bitot_and::{AndViewA, AndViewB, Bit, BitOtView1, BitOtView2};
use mpcheck_core::np_ot::{NpReceiverView, NpSenderView};
use mpcheck_core::rng::CounterRng;
use mpcheck_core::secmult::{SecMultView1, SecMultView2};

use super::session::{
    channel_pair, run_driver, ChannelEndpoint, DriverResult, Endpoint, InputMap, PeerChans,
    Protocol, Role, SessionError, SessionParams,
};

/// Independent seeds for the parties of one session.
#[derive(Debug, Clone, Copy)]
pub struct PartySeeds {
    pub p1: u64,
    pub p2: u64,
    pub ti: u64,
}

/// The typed views sampled from one run, assembled across roles (the
/// analytic view tuples carry both parties' outputs).
#[derive(Debug, Clone, Copy)]
#[allow(clippy::large_enum_variant)]
pub enum SampledViews {
    Secmult {
        view1: SecMultView1,
        view2: SecMultView2,
    },
    NpOt {
        receiver: NpReceiverView,
        sender: NpSenderView,
        output: GroupElem,
    },
    BitOt {
        view1: BitOtView1,
        view2: BitOtView2,
        output: Bit,
    },
    AndGate {
        view_a: AndViewA,
        view_b: AndViewB,
        outputs: (Bit, Bit),
    },
}

struct RoleJob {
    role: Role,
    inputs: InputMap,
    seed: u64,
    p1: Option<ChannelEndpoint>,
    p2: Option<ChannelEndpoint>,
    ti: Option<ChannelEndpoint>,
}

fn run_role_job(params: SessionParams, mut job: RoleJob) -> Result<DriverResult, SessionError> {
    use super::session::{client_hello, server_hello};
    // Hello exchange in the same canonical order a TCP session logs.
    match job.role {
        Role::P1 => {
            server_hello(
                job.p2.as_mut().expect("p1-p2 wired"),
                &params,
                Role::P1,
                Role::P2,
            )?;
            if let Some(ti) = job.ti.as_mut() {
                server_hello(ti, &params, Role::P1, Role::Ti)?;
            }
        }
        Role::P2 => {
            client_hello(
                job.p1.as_mut().expect("p2-p1 wired"),
                &params,
                Role::P2,
                Role::P1,
            )?;
            if let Some(ti) = job.ti.as_mut() {
                server_hello(ti, &params, Role::P2, Role::Ti)?;
            }
        }
        Role::Ti => {
            client_hello(
                job.p1.as_mut().expect("ti-p1 wired"),
                &params,
                Role::Ti,
                Role::P1,
            )?;
            client_hello(
                job.p2.as_mut().expect("ti-p2 wired"),
                &params,
                Role::Ti,
                Role::P2,
            )?;
        }
    }
    let mut rng = CounterRng::new(job.seed);
    run_driver(
        &params,
        job.role,
        &job.inputs,
        &mut rng,
        PeerChans {
            p1: job.p1.as_mut().map(|c| c as &mut dyn Endpoint),
            p2: job.p2.as_mut().map(|c| c as &mut dyn Endpoint),
            ti: job.ti.as_mut().map(|c| c as &mut dyn Endpoint),
        },
    )
}

/// Runs one full seeded session in-process and returns the assembled
/// views; the draw is distributed per the analytic real-view programs
/// when the seeds are fresh.
pub fn sample_view(
    protocol: Protocol,
    q: u64,
    inputs_p1: &InputMap,
    inputs_p2: &InputMap,
    seeds: PartySeeds,
) -> Result<SampledViews, SessionError> {
    let params = SessionParams::new(protocol, q)?;

    let (p1_to_p2, p2_to_p1) = channel_pair();
    let (mut p1_job, mut p2_job, mut ti_job) = (
        RoleJob {
            role: Role::P1,
            inputs: inputs_p1.clone(),
            seed: seeds.p1,
            p1: None,
            p2: Some(p1_to_p2),
            ti: None,
        },
        RoleJob {
            role: Role::P2,
            inputs: inputs_p2.clone(),
            seed: seeds.p2,
            p1: Some(p2_to_p1),
            p2: None,
            ti: None,
        },
        None,
    );
    if protocol.uses_ti() {
        let (ti_to_p1, p1_to_ti) = channel_pair();
        let (ti_to_p2, p2_to_ti) = channel_pair();
        p1_job.ti = Some(p1_to_ti);
        p2_job.ti = Some(p2_to_ti);
        ti_job = Some(RoleJob {
            role: Role::Ti,
            inputs: InputMap::new(),
            seed: seeds.ti,
            p1: Some(ti_to_p1),
            p2: Some(ti_to_p2),
            ti: None,
        });
    }

    let p1_handle = thread::spawn(move || run_role_job(params, p1_job));
    let p2_handle = thread::spawn(move || run_role_job(params, p2_job));
    let ti_handle = ti_job.map(|job| thread::spawn(move || run_role_job(params, job)));

    let p1_result = p1_handle.join().expect("p1 thread")?;
    let p2_result = p2_handle.join().expect("p2 thread")?;
    if let Some(handle) = ti_handle {
        handle.join().expect("ti thread")?;
    }

    Ok(match (p1_result, p2_result) {
        (DriverResult::SecmultP1(p1), DriverResult::SecmultP2(p2)) => SampledViews::Secmult {
            view1: SecMultView1 {
                x: p1.x,
                c1: p1.c1,
                d1: p1.d1,
                e1: p1.e1,
                s1: p1.s1,
                s2: p2.s2,
            },
            view2: SecMultView2 {
                y: p2.y,
                c2: p2.c2,
                d2: p2.d2,
                e2: p2.e2,
                s1: p1.s1,
                s2: p2.s2,
            },
        },
        (DriverResult::NpSender(p1), DriverResult::NpReceiver(p2)) => SampledViews::NpOt {
            receiver: p2.view,
            sender: p1.view,
            output: p2.output,
        },
        (DriverResult::BitOtP1(p1), DriverResult::BitOtP2(p2)) => SampledViews::BitOt {
            view1: BitOtView1 {
                m0: p1.m0,
                m1: p1.m1,
                r0: p1.r0,
                r1: p1.r1,
                e: p1.e,
            },
            view2: BitOtView2 {
                b: p2.b,
                d: p2.d,
                r_d: p2.r_d,
                f0: p2.f0,
                f1: p2.f1,
            },
            output: p2.output,
        },
        (DriverResult::AndA(p1), DriverResult::AndB(p2)) => SampledViews::AndGate {
            view_a: AndViewA {
                a: p1.a,
                u: p1.u,
                ot: BitOtView1 {
                    m0: p1.ot.m0,
                    m1: p1.ot.m1,
                    r0: p1.ot.r0,
                    r1: p1.ot.r1,
                    e: p1.ot.e,
                },
            },
            view_b: AndViewB {
                b: p2.b,
                m_b: p2.ot.output,
                ot: BitOtView2 {
                    b: p2.b,
                    d: p2.ot.d,
                    r_d: p2.ot.r_d,
                    f0: p2.ot.f0,
                    f1: p2.ot.f1,
                },
            },
            outputs: (p1.u, p2.ot.output),
        },
        _ => unreachable!("role results match the protocol"),
    })
}
