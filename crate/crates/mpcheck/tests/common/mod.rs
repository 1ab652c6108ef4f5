//! Shared helpers for the integration and acceptance tests: full loopback
//! TCP sessions with per-role threads.

use std::collections::BTreeMap;
use std::net::TcpListener;
use std::path::PathBuf;
use std::thread;

use mpcheck::netexec::{
    serve, serve_on, InputMap, PartySeeds, Protocol, Role, SessionConfig, SessionError,
    SessionSummary,
};

pub fn inputs(pairs: &[(&str, u64)]) -> InputMap {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), *v))
        .collect::<BTreeMap<_, _>>()
}

pub struct SessionSpec {
    pub protocol: Protocol,
    pub q: u64,
    pub p1_inputs: InputMap,
    pub p2_inputs: InputMap,
    pub seeds: PartySeeds,
    pub transcript_dir: Option<PathBuf>,
}

/// Runs a full session over loopback TCP, one thread per endpoint, and
/// returns the role summaries (p1, p2, ti).
pub fn run_tcp_session(
    spec: &SessionSpec,
) -> Result<(SessionSummary, SessionSummary, Option<SessionSummary>), SessionError> {
    let p1_listener = TcpListener::bind("127.0.0.1:0")?;
    let p1_addr = p1_listener.local_addr()?.to_string();
    let uses_ti = spec.protocol.uses_ti();
    let (p2_listener, p2_addr) = if uses_ti {
        let l = TcpListener::bind("127.0.0.1:0")?;
        let addr = l.local_addr()?.to_string();
        (Some(l), Some(addr))
    } else {
        (None, None)
    };

    let transcript_path = |role: &str| {
        spec.transcript_dir
            .as_ref()
            .map(|dir| dir.join(format!("{}.mpct", role)))
    };

    let p1_config = SessionConfig {
        protocol: spec.protocol,
        q: spec.q,
        role: Role::P1,
        seed: spec.seeds.p1,
        inputs: spec.p1_inputs.clone(),
        listen: None,
        connect: vec![],
        transcript: transcript_path("p1"),
    };
    let p2_config = SessionConfig {
        protocol: spec.protocol,
        q: spec.q,
        role: Role::P2,
        seed: spec.seeds.p2,
        inputs: spec.p2_inputs.clone(),
        listen: None,
        connect: vec![p1_addr.clone()],
        transcript: transcript_path("p2"),
    };
    let ti_config = uses_ti.then(|| SessionConfig {
        protocol: spec.protocol,
        q: spec.q,
        role: Role::Ti,
        seed: spec.seeds.ti,
        inputs: InputMap::new(),
        listen: None,
        connect: vec![p1_addr, p2_addr.expect("ti needs p2's address")],
        transcript: transcript_path("ti"),
    });

    let p1 = thread::spawn(move || serve_on(&p1_config, Some(p1_listener)));
    let p2 = thread::spawn(move || serve_on(&p2_config, p2_listener));
    let ti = ti_config.map(|config| thread::spawn(move || serve(&config)));

    let p1 = p1.join().expect("p1 thread")?;
    let p2 = p2.join().expect("p2 thread")?;
    let ti = match ti {
        Some(handle) => Some(handle.join().expect("ti thread")?),
        None => None,
    };
    Ok((p1, p2, ti))
}

pub fn output(summary: &SessionSummary, key: &str) -> u64 {
    summary
        .outputs
        .iter()
        .find(|(k, _)| *k == key)
        .unwrap_or_else(|| panic!("no output {}", key))
        .1
}
