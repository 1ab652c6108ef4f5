//! The security-definition machinery: input-indexed distribution families,
//! perfect and statistical indistinguishability checks, correctness
//! checks, distinguisher advantages and hybrid-chain bounds.
//!
//! At a fixed security parameter the optimal distinguisher advantage
//! between two finite distributions is their total variation distance, so
//! every check below reduces to exact TV computations: a "perfect" verdict
//! means the distance is the rational zero, not a small float.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::algebra::{is_prime, GroupDesc};
use crate::dist::Dist;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SecframeError {
    /// Two ensembles being compared have different input domains.
    DomainMismatch,
    /// A hybrid chain needs at least two entries.
    ChainTooShort,
    NotPrime(u64),
    /// Parameter above the configured exhaustive-enumeration bound.
    ExceedsDeskScale {
        q: u64,
        max: u64,
    },
}

impl fmt::Display for SecframeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SecframeError::DomainMismatch => write!(f, "ensembles have different input domains"),
            SecframeError::ChainTooShort => write!(f, "hybrid chain needs at least two entries"),
            SecframeError::NotPrime(q) => write!(f, "{} is not prime", q),
            SecframeError::ExceedsDeskScale { q, max } => {
                write!(f, "q = {} exceeds the desk-scale bound {}", q, max)
            }
        }
    }
}

impl core::error::Error for SecframeError {}

/// Default bound on the field/group order for exhaustive suites.
pub const DEFAULT_MAX_Q: u64 = 1009;

/// A fixed security parameter: the prime field/group order, plus the group
/// descriptor where one applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SecurityParam {
    pub q: u64,
    pub group: Option<GroupDesc>,
}

impl SecurityParam {
    pub fn new(q: u64, max_q: u64) -> Result<Self, SecframeError> {
        if !is_prime(q) {
            return Err(SecframeError::NotPrime(q));
        }
        if q > max_q {
            return Err(SecframeError::ExceedsDeskScale { q, max: max_q });
        }
        Ok(SecurityParam { q, group: None })
    }

    pub fn with_group(mut self, group: GroupDesc) -> Self {
        self.group = Some(group);
        self
    }

    pub fn label(&self) -> String {
        alloc::format!("q={}", self.q)
    }
}

/// A probabilistic program from inputs to distributions.
pub type Program<I, V> = Box<dyn Fn(&I) -> Dist<V>>;

/// An input-indexed family of distributions at a fixed parameter, with an
/// explicitly enumerated input domain.
pub struct Ensemble<I, V: Ord + Clone> {
    domain: Vec<I>,
    program: Program<I, V>,
}

impl<I, V: Ord + Clone> Ensemble<I, V> {
    pub fn new(domain: Vec<I>, program: impl Fn(&I) -> Dist<V> + 'static) -> Self {
        Ensemble {
            domain,
            program: Box::new(program),
        }
    }

    pub fn domain(&self) -> &[I] {
        &self.domain
    }

    pub fn eval(&self, input: &I) -> Dist<V> {
        (self.program)(input)
    }
}

/// Per-input outcome of a check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Distributions exactly equal (TV zero).
    Perfect,
    /// Nonzero distance within the declared bound.
    WithinBound,
    Failed,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Perfect => "perfect",
            Verdict::WithinBound => "within-bound",
            Verdict::Failed => "failed",
        }
    }
}

/// One named check inside a report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputCheck {
    pub input: String,
    pub verdict: Verdict,
    pub tv: Rational,
}

/// Aggregated result of a check suite at one parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub suite: String,
    pub param: String,
    pub convention: String,
    pub per_input: Vec<InputCheck>,
    pub max_tv: Rational,
    pub bound: Option<Rational>,
    pub pass: bool,
    /// Wall-clock milliseconds, filled in by the caller; not serialized,
    /// so report bytes stay deterministic.
    pub elapsed_ms: Option<u64>,
}

impl CheckReport {
    fn escape(s: &str, out: &mut String) {
        for ch in s.chars() {
            match ch {
                '"' => out.push_str("\\\""),
                '\\' => out.push_str("\\\\"),
                c if (c as u32) < 0x20 => {
                    out.push_str(&alloc::format!("\\u{:04x}", c as u32));
                }
                c => out.push(c),
            }
        }
    }

    /// Structured rendering: `{suite, param, convention, per_input:
    /// [{input, verdict, tv}], max_tv, bound, pass}` with rationals as
    /// `"num/den"` strings.
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        out.push_str("{\"suite\":\"");
        Self::escape(&self.suite, &mut out);
        out.push_str("\",\"param\":\"");
        Self::escape(&self.param, &mut out);
        out.push_str("\",\"convention\":\"");
        Self::escape(&self.convention, &mut out);
        out.push_str("\",\"per_input\":[");
        for (i, check) in self.per_input.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str("{\"input\":\"");
            Self::escape(&check.input, &mut out);
            out.push_str("\",\"verdict\":\"");
            out.push_str(check.verdict.name());
            out.push_str("\",\"tv\":\"");
            out.push_str(&check.tv.fraction_string());
            out.push_str("\"}");
        }
        out.push_str("],\"max_tv\":\"");
        out.push_str(&self.max_tv.fraction_string());
        out.push_str("\",\"bound\":");
        match &self.bound {
            Some(b) => {
                out.push('"');
                out.push_str(&b.fraction_string());
                out.push('"');
            }
            None => out.push_str("null"),
        }
        out.push_str(",\"pass\":");
        out.push_str(if self.pass { "true" } else { "false" });
        out.push('}');
        out
    }

    /// Human-oriented rendering: a summary line plus one line per
    /// non-perfect check.
    pub fn to_text(&self) -> String {
        let mut out = alloc::format!(
            "{} [{} convention={}] {}: {} checks, max_tv {}",
            self.suite,
            self.param,
            self.convention,
            if self.pass { "PASS" } else { "FAIL" },
            self.per_input.len(),
            self.max_tv.fraction_string(),
        );
        if let Some(b) = &self.bound {
            out.push_str(&alloc::format!(" (bound {})", b.fraction_string()));
        }
        for check in &self.per_input {
            if check.verdict != Verdict::Perfect {
                out.push_str(&alloc::format!(
                    "\n  {} {}: tv {}",
                    check.verdict.name(),
                    check.input,
                    check.tv.fraction_string()
                ));
            }
        }
        out
    }
}

/// Incremental construction of a [`CheckReport`]. Verdicts are derived
/// from the distance and the declared bound: zero is perfect, within the
/// bound is acceptable, anything else fails (no bound means only zero
/// passes).
pub struct ReportBuilder {
    suite: String,
    param: String,
    convention: String,
    bound: Option<Rational>,
    entries: Vec<InputCheck>,
}

impl ReportBuilder {
    pub fn new(suite: &str, param: &str, convention: &str) -> Self {
        ReportBuilder {
            suite: String::from(suite),
            param: String::from(param),
            convention: String::from(convention),
            bound: None,
            entries: Vec::new(),
        }
    }

    pub fn bound(mut self, bound: Rational) -> Self {
        self.bound = Some(bound);
        self
    }

    pub fn push(&mut self, input: String, tv: Rational) {
        let verdict = if tv.is_zero() {
            Verdict::Perfect
        } else {
            match &self.bound {
                Some(b) if tv <= *b => Verdict::WithinBound,
                _ => Verdict::Failed,
            }
        };
        self.entries.push(InputCheck { input, verdict, tv });
    }

    /// Copies another report's checks under a label prefix.
    pub fn absorb(&mut self, prefix: &str, report: &CheckReport) {
        for check in &report.per_input {
            self.entries.push(InputCheck {
                input: alloc::format!("{}{}", prefix, check.input),
                verdict: check.verdict,
                tv: check.tv.clone(),
            });
        }
    }

    pub fn finish(self) -> CheckReport {
        let max_tv = self
            .entries
            .iter()
            .map(|c| c.tv.clone())
            .max()
            .unwrap_or_else(Rational::zero);
        let pass = self.entries.iter().all(|c| c.verdict != Verdict::Failed);
        CheckReport {
            suite: self.suite,
            param: self.param,
            convention: self.convention,
            per_input: self.entries,
            max_tv,
            bound: self.bound,
            pass,
            elapsed_ms: None,
        }
    }
}

fn domains_match<I: PartialEq, V: Ord + Clone>(
    a: &Ensemble<I, V>,
    b: &Ensemble<I, V>,
) -> Result<(), SecframeError> {
    if a.domain().len() != b.domain().len()
        || a.domain().iter().zip(b.domain()).any(|(x, y)| x != y)
    {
        return Err(SecframeError::DomainMismatch);
    }
    Ok(())
}

/// Checks that two ensembles are equal as distributions at every input.
pub fn check_perfect<I: PartialEq + fmt::Debug, V: Ord + Clone>(
    suite: &str,
    param: &SecurityParam,
    convention: &str,
    a: &Ensemble<I, V>,
    b: &Ensemble<I, V>,
) -> Result<CheckReport, SecframeError> {
    domains_match(a, b)?;
    let mut builder = ReportBuilder::new(suite, &param.label(), convention);
    for input in a.domain() {
        builder.push(
            alloc::format!("{:?}", input),
            a.eval(input).tv_distance(&b.eval(input)),
        );
    }
    Ok(builder.finish())
}

/// Checks that the worst-case distance between two ensembles stays within
/// `bound`.
pub fn check_statistical<I: PartialEq + fmt::Debug, V: Ord + Clone>(
    suite: &str,
    param: &SecurityParam,
    convention: &str,
    a: &Ensemble<I, V>,
    b: &Ensemble<I, V>,
    bound: Rational,
) -> Result<CheckReport, SecframeError> {
    domains_match(a, b)?;
    let mut builder = ReportBuilder::new(suite, &param.label(), convention).bound(bound);
    for input in a.domain() {
        builder.push(
            alloc::format!("{:?}", input),
            a.eval(input).tv_distance(&b.eval(input)),
        );
    }
    Ok(builder.finish())
}

/// Per-input disagreement mass between a protocol's output distribution
/// and its target functionality; all shipped protocols must report zero.
pub fn check_correctness<I: PartialEq + fmt::Debug, V: Ord + Clone>(
    suite: &str,
    param: &SecurityParam,
    convention: &str,
    protocol_out: &Ensemble<I, V>,
    functionality: &Ensemble<I, V>,
) -> Result<CheckReport, SecframeError> {
    check_perfect(suite, param, convention, protocol_out, functionality)
}

/// The advantage `|Pr[D(a) = 1] - Pr[D(b) = 1]|` of a single
/// distinguisher. Never exceeds the total variation distance.
pub fn distinguisher_advantage<V: Ord + Clone>(
    d: impl Fn(&V) -> Dist<bool>,
    a: &Dist<V>,
    b: &Dist<V>,
) -> Rational {
    (&a.bind(&d).mass(&true) - &b.bind(&d).mass(&true)).abs()
}

/// End-to-end and stepwise distances of a hybrid chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HybridBound {
    pub end_to_end: Rational,
    pub step_sum: Rational,
}

/// Computes `tv(first, last)` and the sum of adjacent distances along the
/// chain; the triangle inequality guarantees the former never exceeds the
/// latter.
pub fn hybrid_bound<V: Ord + Clone>(chain: &[Dist<V>]) -> Result<HybridBound, SecframeError> {
    if chain.len() < 2 {
        return Err(SecframeError::ChainTooShort);
    }
    let end_to_end = chain[0].tv_distance(chain.last().expect("nonempty"));
    let step_sum = chain.windows(2).map(|w| w[0].tv_distance(&w[1])).sum();
    Ok(HybridBound {
        end_to_end,
        step_sum,
    })
}
