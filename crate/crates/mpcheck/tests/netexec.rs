//! Live-session tests: loopback TCP sessions for every protocol,
//! transcript determinism and replay, parameter-mismatch aborts, and
//! malformed-frame handling.

use std::io::Write;
use std::net::{TcpListener, TcpStream};
use std::thread;

use mpcheck::netexec::{
    replay, sample_view, serve, serve_on, PartySeeds, Protocol, Role, SampledViews, SessionConfig,
    SessionError, Transcript,
};

mod common;
use common::{inputs, output, run_tcp_session, SessionSpec};

#[test]
fn secmult_session_produces_shares_of_the_product() {
    let spec = SessionSpec {
        protocol: Protocol::Secmult,
        q: 7,
        p1_inputs: inputs(&[("x", 3)]),
        p2_inputs: inputs(&[("y", 4)]),
        seeds: PartySeeds {
            p1: 11,
            p2: 22,
            ti: 33,
        },
        transcript_dir: None,
    };
    let (p1, p2, _) = run_tcp_session(&spec).unwrap();
    let (s1, s2) = (output(&p1, "s1"), output(&p2, "s2"));
    assert_eq!((s1 + s2) % 7, 12 % 7);
}

#[test]
fn np_ot_session_delivers_chosen_message() {
    for v in [0u64, 1] {
        let spec = SessionSpec {
            protocol: Protocol::NpOt,
            q: 5,
            p1_inputs: inputs(&[("m0", 2), ("m1", 3)]),
            p2_inputs: inputs(&[("v", v)]),
            seeds: PartySeeds {
                p1: 1,
                p2: 2,
                ti: 0,
            },
            transcript_dir: None,
        };
        let (_, p2, _) = run_tcp_session(&spec).unwrap();
        let desc = mpcheck_core::algebra::GroupDesc::schnorr(5).unwrap();
        let expected = desc.gpow_raw(if v == 1 { 3 } else { 2 });
        assert_eq!(output(&p2, "m_v"), expected.encoded());
    }
}

#[test]
fn bit_ot_and_and_gate_sessions() {
    for (m0, m1, b) in [(0u64, 1, 0), (1, 0, 1), (1, 1, 0)] {
        let spec = SessionSpec {
            protocol: Protocol::BitOt,
            q: 2,
            p1_inputs: inputs(&[("m0", m0), ("m1", m1)]),
            p2_inputs: inputs(&[("b", b)]),
            seeds: PartySeeds {
                p1: 5,
                p2: 6,
                ti: 7,
            },
            transcript_dir: None,
        };
        let (_, p2, _) = run_tcp_session(&spec).unwrap();
        let expected = if b == 1 { m1 } else { m0 };
        assert_eq!(output(&p2, "m_b"), expected);
    }

    let spec = SessionSpec {
        protocol: Protocol::AndGate,
        q: 2,
        p1_inputs: inputs(&[("a", 1)]),
        p2_inputs: inputs(&[("b", 1)]),
        seeds: PartySeeds {
            p1: 8,
            p2: 9,
            ti: 10,
        },
        transcript_dir: None,
    };
    let (p1, p2, _) = run_tcp_session(&spec).unwrap();
    assert_eq!(output(&p1, "u") ^ output(&p2, "m_b"), 1);
}

#[test]
fn transcripts_are_deterministic_and_replayable() {
    let dir = std::env::temp_dir().join(format!("mpcheck-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let spec = |d: &std::path::Path| SessionSpec {
        protocol: Protocol::Secmult,
        q: 7,
        p1_inputs: inputs(&[("x", 3)]),
        p2_inputs: inputs(&[("y", 4)]),
        seeds: PartySeeds {
            p1: 101,
            p2: 102,
            ti: 103,
        },
        transcript_dir: Some(d.to_path_buf()),
    };
    let first = dir.join("first");
    let second = dir.join("second");
    std::fs::create_dir_all(&first).unwrap();
    std::fs::create_dir_all(&second).unwrap();
    run_tcp_session(&spec(&first)).unwrap();
    run_tcp_session(&spec(&second)).unwrap();

    for role in ["p1", "p2", "ti"] {
        let a = std::fs::read(first.join(format!("{}.mpct", role))).unwrap();
        let b = std::fs::read(second.join(format!("{}.mpct", role))).unwrap();
        assert_eq!(
            a, b,
            "transcript for {} differs between identical runs",
            role
        );

        let transcript = Transcript::from_bytes(&a).unwrap();
        let summary = replay(&transcript).unwrap();
        assert_eq!(summary.role, Role::parse(role).unwrap());
    }

    // tampering with a payload byte must break the replay
    let mut bytes = std::fs::read(first.join("p1.mpct")).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 1;
    let tampered = Transcript::from_bytes(&bytes).unwrap();
    assert!(matches!(
        replay(&tampered),
        Err(SessionError::ReplayMismatch(_))
    ));

    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn parameter_mismatch_aborts_both_sides() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap().to_string();
    let p1_config = SessionConfig {
        protocol: Protocol::NpOt,
        q: 5,
        role: Role::P1,
        seed: 1,
        inputs: inputs(&[("m0", 1), ("m1", 2)]),
        listen: None,
        connect: vec![],
        transcript: None,
    };
    let p2_config = SessionConfig {
        protocol: Protocol::NpOt,
        q: 11,
        role: Role::P2,
        seed: 2,
        inputs: inputs(&[("v", 0)]),
        listen: None,
        connect: vec![addr],
        transcript: None,
    };
    let p1 = thread::spawn(move || serve_on(&p1_config, Some(listener)));
    let p2 = thread::spawn(move || serve(&p2_config));
    assert!(matches!(
        p1.join().unwrap(),
        Err(SessionError::ParamMismatch(_))
    ));
    assert!(matches!(
        p2.join().unwrap(),
        Err(SessionError::PeerError(_)) | Err(SessionError::ParamMismatch(_))
    ));
}

#[test]
fn malformed_frame_aborts_the_session() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let p1_config = SessionConfig {
        protocol: Protocol::NpOt,
        q: 5,
        role: Role::P1,
        seed: 1,
        inputs: inputs(&[("m0", 1), ("m1", 2)]),
        listen: None,
        connect: vec![],
        transcript: None,
    };
    let p1 = thread::spawn(move || serve_on(&p1_config, Some(listener)));
    let mut stream = TcpStream::connect(addr).unwrap();
    stream.write_all(&[0xFF; 64]).unwrap();
    drop(stream);
    assert!(p1.join().unwrap().is_err());
}

#[test]
fn sampled_views_satisfy_protocol_relations() {
    for seed in 0..50u64 {
        let seeds = PartySeeds {
            p1: seed,
            p2: seed.wrapping_add(1000),
            ti: seed.wrapping_add(2000),
        };
        match sample_view(
            Protocol::Secmult,
            5,
            &inputs(&[("x", 2)]),
            &inputs(&[("y", 3)]),
            seeds,
        )
        .unwrap()
        {
            SampledViews::Secmult { view1, view2 } => {
                assert_eq!(view1.s1, view1.x * view1.e1 - view1.d1);
                assert_eq!(view1.s1 + view2.s2, view1.x * view2.y);
                assert_eq!(view1.s2, view2.s2);
            }
            _ => unreachable!(),
        }
        match sample_view(
            Protocol::NpOt,
            5,
            &inputs(&[("m0", 2), ("m1", 4)]),
            &inputs(&[("v", (seed % 2 == 0) as u64)]),
            seeds,
        )
        .unwrap()
        {
            SampledViews::NpOt {
                receiver,
                sender,
                output,
            } => {
                let desc = sender.m0.group();
                let expected = if receiver.v {
                    desc.gpow_raw(4)
                } else {
                    desc.gpow_raw(2)
                };
                assert_eq!(output, expected);
                // the offered tuple puts the DH exponent at position v
                let dh = sender.t1.pow(receiver.b);
                let offered = if receiver.v { sender.t4 } else { sender.t3 };
                assert_eq!(offered, dh);
            }
            _ => unreachable!(),
        }
        match sample_view(
            Protocol::AndGate,
            2,
            &inputs(&[("a", 1)]),
            &inputs(&[("b", 1)]),
            seeds,
        )
        .unwrap()
        {
            SampledViews::AndGate { outputs, .. } => {
                assert_eq!((outputs.0 ^ outputs.1).as_u8(), 1);
            }
            _ => unreachable!(),
        }
    }
}

#[test]
fn transcript_decodes_to_the_sampled_view() {
    // A live session's transcripts, decoded, assemble to exactly the view
    // tuple the in-process sampler produces under the same seeds.
    use mpcheck::netexec::Direction;

    let dir = std::env::temp_dir().join(format!("mpcheck-decode-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let seeds = PartySeeds {
        p1: 301,
        p2: 302,
        ti: 303,
    };
    let q = 5u64;
    run_tcp_session(&SessionSpec {
        protocol: Protocol::Secmult,
        q,
        p1_inputs: inputs(&[("x", 2)]),
        p2_inputs: inputs(&[("y", 4)]),
        seeds,
        transcript_dir: Some(dir.clone()),
    })
    .unwrap();

    let word = |payload: &[u8], i: usize| {
        u64::from_be_bytes(payload[i * 8..(i + 1) * 8].try_into().unwrap())
    };
    let p1 = Transcript::read_file(&dir.join("p1.mpct")).unwrap();
    let p2 = Transcript::read_file(&dir.join("p2.mpct")).unwrap();
    let ti_share = p1
        .frames(Direction::Received)
        .find(|f| f.tag == 0x01)
        .expect("initializer share");
    let (c1, d1) = (word(&ti_share.payload, 0), word(&ti_share.payload, 1));
    let e1 = word(
        &p1.frames(Direction::Received)
            .find(|f| f.tag == 0x03)
            .expect("second protocol message")
            .payload,
        0,
    );
    let x = word(&p1.local(0xF1).expect("input record").payload, 0);
    let s1 = word(&p1.local(0xF0).expect("output record").payload, 0);
    let s2 = word(&p2.local(0xF0).expect("output record").payload, 0);

    let f = mpcheck_core::algebra::Field::new(q).unwrap();
    let decoded = mpcheck_core::secmult::SecMultView1 {
        x: f.elem(x),
        c1: f.elem(c1),
        d1: f.elem(d1),
        e1: f.elem(e1),
        s1: f.elem(s1),
        s2: f.elem(s2),
    };
    match sample_view(
        Protocol::Secmult,
        q,
        &inputs(&[("x", 2)]),
        &inputs(&[("y", 4)]),
        seeds,
    )
    .unwrap()
    {
        SampledViews::Secmult { view1, .. } => assert_eq!(decoded, view1),
        _ => unreachable!(),
    }
    std::fs::remove_dir_all(&dir).unwrap();
}
