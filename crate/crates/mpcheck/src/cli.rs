//! Command-line front end.
//!
//! Exit codes are a stable contract: `0` everything passed, `1` a check
//! or session failed, `2` usage error (bad flags, non-prime order,
//! unknown program id).

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use mpcheck_core::algebra::GroupDesc;
use mpcheck_core::np_ot::{self, SrConvention};
use mpcheck_core::secframe::{CheckReport, SecframeError, DEFAULT_MAX_Q};
use mpcheck_core::suites::{run_suite, SuiteId};

use crate::netexec::{
    replay, serve, InputMap, Protocol, Role, SessionConfig, SessionError, Transcript,
    TranscriptError,
};
use crate::registry;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "mpcheck",
    version,
    about = "Exact verification workbench for small two-party MPC protocols"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SuiteArg {
    All,
    DistLaws,
    Secmult,
    NpReceiver,
    NpSender,
    BitOt,
    AndGate,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum DdhSrArg {
    Raw,
    Simplified,
}

impl DdhSrArg {
    fn convention(self) -> SrConvention {
        match self {
            DdhSrArg::Raw => SrConvention::Raw,
            DdhSrArg::Simplified => SrConvention::Simplified,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum BackendArg {
    Exponent,
    Schnorr,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum RoleArg {
    P1,
    P2,
    Ti,
}

impl RoleArg {
    fn role(self) -> Role {
        match self {
            RoleArg::P1 => Role::P1,
            RoleArg::P2 => Role::P2,
            RoleArg::Ti => Role::Ti,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ProtocolArg {
    Secmult,
    NpOt,
    BitOt,
    AndGate,
}

impl ProtocolArg {
    fn protocol(self) -> Protocol {
        match self {
            ProtocolArg::Secmult => Protocol::Secmult,
            ProtocolArg::NpOt => Protocol::NpOt,
            ProtocolArg::BitOt => Protocol::BitOt,
            ProtocolArg::AndGate => Protocol::AndGate,
        }
    }
}

#[derive(Subcommand)]
pub enum Command {
    /// Run verification suites and emit check reports.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        /// Prime field/group order(s), comma separated.
        #[arg(long, value_delimiter = ',', default_value = "5")]
        q: Vec<u64>,
        /// Which self-reduction realization the receiver programs use.
        #[arg(long = "ddh-sr", value_enum, default_value = "raw")]
        ddh_sr: DdhSrArg,
        /// Write the report to this path instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
    },
    /// Print the exact total-variation distance between two registered
    /// analytic programs.
    Tv {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long)]
        q: u64,
        /// Input binding `name=value`; repeatable or comma separated.
        #[arg(long = "input", value_delimiter = ',')]
        input: Vec<String>,
        #[arg(long = "ddh-sr", value_enum, default_value = "raw")]
        ddh_sr: DdhSrArg,
        #[arg(long, value_enum, default_value = "exponent")]
        backend: BackendArg,
    },
    /// Check the sender-side reduction identity for a family of
    /// distinguishers, exactly in rationals.
    Reduce {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        distinguishers: u64,
        #[arg(long, default_value = "1")]
        seed: u64,
        /// Message exponents `m0=<k>,m1=<k>` (defaults 1 and 2).
        #[arg(long = "input", value_delimiter = ',')]
        input: Vec<String>,
    },
    /// Run one endpoint of a live protocol session.
    Run {
        #[arg(long, value_enum)]
        role: RoleArg,
        #[arg(long, value_enum)]
        protocol: ProtocolArg,
        #[arg(long, default_value = "5")]
        q: u64,
        /// Address to listen on (p1 always; p2 when the protocol has a
        /// trusted initializer).
        #[arg(long)]
        listen: Option<String>,
        /// Address(es) to connect to: p2 connects to p1; ti connects to
        /// p1 then p2.
        #[arg(long = "connect")]
        connect: Vec<String>,
        #[arg(long, default_value = "1")]
        seed: u64,
        /// Write the session transcript to this path.
        #[arg(long)]
        transcript: Option<PathBuf>,
        /// Role input `name=value`; repeatable or comma separated.
        #[arg(long = "input", value_delimiter = ',')]
        input: Vec<String>,
    },
    /// Re-derive a stored transcript and verify it byte for byte.
    Replay {
        #[arg(long)]
        transcript: PathBuf,
    },
}

fn desk_max_q() -> Result<u64, String> {
    match std::env::var("MPC_DESK_MAX_Q") {
        Ok(s) => s
            .parse::<u64>()
            .map_err(|_| format!("MPC_DESK_MAX_Q = '{}' is not a number", s)),
        Err(_) => Ok(DEFAULT_MAX_Q),
    }
}

fn parse_bindings(raw: &[String]) -> Result<BTreeMap<String, u64>, String> {
    let mut out = BTreeMap::new();
    for item in raw {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| format!("input '{}' is not name=value", item))?;
        let value = value
            .parse::<u64>()
            .map_err(|_| format!("input '{}' has a non-numeric value", item))?;
        out.insert(key.to_string(), value);
    }
    Ok(out)
}

fn usage(msg: &str) -> u8 {
    eprintln!("error: {}", msg);
    EXIT_USAGE
}

pub fn run(cli: Cli) -> u8 {
    match cli.command {
        Command::Verify {
            suite,
            q,
            ddh_sr,
            out,
            format,
        } => verify(suite, &q, ddh_sr.convention(), out, format),
        Command::Tv {
            left,
            right,
            q,
            input,
            ddh_sr,
            backend,
        } => tv(&left, &right, q, &input, ddh_sr.convention(), backend),
        Command::Reduce {
            q,
            distinguishers,
            seed,
            input,
        } => reduce(q, distinguishers, seed, &input),
        Command::Run {
            role,
            protocol,
            q,
            listen,
            connect,
            seed,
            transcript,
            input,
        } => run_session(role, protocol, q, listen, connect, seed, transcript, &input),
        Command::Replay { transcript } => replay_cmd(&transcript),
    }
}

fn verify(
    suite: SuiteArg,
    qs: &[u64],
    conv: SrConvention,
    out: Option<PathBuf>,
    format: FormatArg,
) -> u8 {
    let max_q = match desk_max_q() {
        Ok(v) => v,
        Err(e) => return usage(&e),
    };
    // every listed order must be a desk-scale prime, whether or not the
    // selected suites sweep it
    for &q in qs {
        if !mpcheck_core::algebra::is_prime(q) {
            return usage(&format!("{} is not prime", q));
        }
        if q > max_q {
            return usage(&format!("q = {} exceeds the desk-scale bound {}", q, max_q));
        }
    }
    let ids: Vec<SuiteId> = match suite {
        SuiteArg::All => SuiteId::ALL.to_vec(),
        SuiteArg::DistLaws => vec![SuiteId::DistLaws],
        SuiteArg::Secmult => vec![SuiteId::Secmult],
        SuiteArg::NpReceiver => vec![SuiteId::NpReceiver],
        SuiteArg::NpSender => vec![SuiteId::NpSender],
        SuiteArg::BitOt => vec![SuiteId::BitOt],
        SuiteArg::AndGate => vec![SuiteId::AndGate],
    };
    let mut reports: Vec<CheckReport> = Vec::new();
    for id in ids {
        let sweep: &[u64] = if id.uses_q() {
            qs
        } else {
            &qs[..1.min(qs.len())]
        };
        for &q in sweep {
            let started = Instant::now();
            match run_suite(id, q, max_q, conv) {
                Ok(mut report) => {
                    report.elapsed_ms = Some(started.elapsed().as_millis() as u64);
                    eprintln!(
                        "{} [{}]: {} checks in {} ms",
                        report.suite,
                        report.param,
                        report.per_input.len(),
                        report.elapsed_ms.unwrap_or(0)
                    );
                    reports.push(report);
                }
                Err(e @ (SecframeError::NotPrime(_) | SecframeError::ExceedsDeskScale { .. })) => {
                    return usage(&e.to_string())
                }
                Err(e) => {
                    eprintln!("error: {}", e);
                    return EXIT_FAIL;
                }
            }
        }
    }
    let body = match format {
        FormatArg::Json => {
            let mut s = String::from("[\n");
            for (i, r) in reports.iter().enumerate() {
                if i > 0 {
                    s.push_str(",\n");
                }
                s.push_str("  ");
                s.push_str(&r.to_json());
            }
            s.push_str("\n]\n");
            s
        }
        FormatArg::Text => {
            let mut s = String::new();
            for r in &reports {
                s.push_str(&r.to_text());
                s.push('\n');
            }
            s
        }
    };
    if let Some(path) = out {
        if let Err(e) = std::fs::write(&path, &body) {
            eprintln!("error: cannot write {}: {}", path.display(), e);
            return EXIT_FAIL;
        }
    } else {
        print!("{}", body);
    }
    if reports.iter().all(|r| r.pass) {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn tv(
    left: &str,
    right: &str,
    q: u64,
    input: &[String],
    conv: SrConvention,
    backend: BackendArg,
) -> u8 {
    let max_q = match desk_max_q() {
        Ok(v) => v,
        Err(e) => return usage(&e),
    };
    if q > max_q {
        return usage(&format!("q = {} exceeds the desk-scale bound {}", q, max_q));
    }
    let bindings = match parse_bindings(input) {
        Ok(b) => b,
        Err(e) => return usage(&e),
    };
    let desc = match backend {
        BackendArg::Exponent => GroupDesc::exponent(q),
        BackendArg::Schnorr => GroupDesc::schnorr(q),
    };
    let desc = match desc {
        Ok(d) => d,
        Err(e) => return usage(&e.to_string()),
    };
    let lhs = match registry::evaluate(left, q, &desc, conv, &bindings) {
        Ok(d) => d,
        Err(e) => return usage(&e),
    };
    let rhs = match registry::evaluate(right, q, &desc, conv, &bindings) {
        Ok(d) => d,
        Err(e) => return usage(&e),
    };
    println!("{}", lhs.tv_distance(&rhs).fraction_string());
    EXIT_PASS
}

fn reduce(q: u64, distinguishers: u64, seed: u64, input: &[String]) -> u8 {
    let max_q = match desk_max_q() {
        Ok(v) => v,
        Err(e) => return usage(&e),
    };
    if distinguishers == 0 {
        return usage("need at least one distinguisher");
    }
    if q > max_q {
        return usage(&format!("q = {} exceeds the desk-scale bound {}", q, max_q));
    }
    let desc = match GroupDesc::exponent(q) {
        Ok(d) => d,
        Err(e) => return usage(&e.to_string()),
    };
    let bindings = match parse_bindings(input) {
        Ok(b) => b,
        Err(e) => return usage(&e),
    };
    let m0 = desc.gpow_raw(bindings.get("m0").copied().unwrap_or(1));
    let m1 = desc.gpow_raw(bindings.get("m1").copied().unwrap_or(2));

    let mut family: Vec<(String, np_ot::BoxedDistinguisher)> = np_ot::fixed_distinguishers(&desc)
        .into_iter()
        .map(|(name, d)| (name.to_string(), d))
        .collect();
    for i in 0..distinguishers {
        family.push((
            format!("seeded-{}", i),
            np_ot::seeded_distinguisher(seed.wrapping_add(i)),
        ));
    }

    let mut all_hold = true;
    for (name, d) in &family {
        let (lhs, a1, a2) = np_ot::reduction_identity(&**d, m0, m1);
        let holds = lhs == a1.clone() - a2.clone();
        let bounded = lhs.abs() <= a1.abs() + a2.abs();
        if !holds || !bounded {
            all_hold = false;
        }
        println!(
            "D={} lhs={} adv1={} adv2={} {}",
            name,
            lhs.fraction_string(),
            a1.fraction_string(),
            a2.fraction_string(),
            if holds && bounded { "ok" } else { "VIOLATION" }
        );
    }
    println!(
        "reduction identity {} for {} distinguishers at q={}",
        if all_hold { "holds" } else { "VIOLATED" },
        family.len(),
        q
    );
    if all_hold {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

#[allow(clippy::too_many_arguments)]
fn run_session(
    role: RoleArg,
    protocol: ProtocolArg,
    q: u64,
    listen: Option<String>,
    connect: Vec<String>,
    seed: u64,
    transcript: Option<PathBuf>,
    input: &[String],
) -> u8 {
    let bindings = match parse_bindings(input) {
        Ok(b) => b,
        Err(e) => return usage(&e),
    };
    let inputs: InputMap = bindings.into_iter().collect();
    let config = SessionConfig {
        protocol: protocol.protocol(),
        q,
        role: role.role(),
        seed,
        inputs,
        listen,
        connect,
        transcript,
    };
    match serve(&config) {
        Ok(summary) => {
            let mut line = format!(
                "role={} protocol={} q={}",
                summary.role.name(),
                config.protocol.name(),
                config.q
            );
            for (name, value) in &summary.outputs {
                line.push_str(&format!(" {}={}", name, value));
            }
            println!("{}", line);
            EXIT_PASS
        }
        Err(
            e @ (SessionError::BadConfig(_)
            | SessionError::MissingInput(_)
            | SessionError::Algebra(_)),
        ) => usage(&e.to_string()),
        Err(e) => {
            eprintln!("error: {}", e);
            EXIT_FAIL
        }
    }
}

fn replay_cmd(path: &std::path::Path) -> u8 {
    let transcript = match Transcript::read_file(path) {
        Err(TranscriptError::Io(e)) => {
            return usage(&format!("cannot read {}: {}", path.display(), e))
        }
        Err(e) => {
            eprintln!("error: {}", e);
            return EXIT_FAIL;
        }
        Ok(t) => t,
    };
    match replay(&transcript) {
        Ok(summary) => {
            let mut line = String::from("REPLAY OK");
            for (name, value) in &summary.outputs {
                line.push_str(&format!(" {}={}", name, value));
            }
            println!("{}", line);
            EXIT_PASS
        }
        Err(e) => {
            eprintln!("error: {}", e);
            EXIT_FAIL
        }
    }
}
