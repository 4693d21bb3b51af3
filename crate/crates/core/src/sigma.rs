//! The two-prover sigma-protocol execution engine.
//!
//! A run consists of four messages: the verifier sends `rand` to the first
//! prover and `ch` to the second simultaneously; the provers answer with
//! `com` and `resp`. Timing is simulated: each message carries an assigned
//! latency, and the verifier aborts when a reply arrives late enough that
//! the provers could have signalled each other (`>= dist / light_speed`,
//! inclusive).
//!
//! The two provers are separate objects sharing only pre-agreed setup, so
//! within-round no-signalling is structural: the responder never receives
//! the committer's input. The round-based three-machine model
//! ([`MachineConfig`] / [`run_rounds`]) makes the same restriction
//! declarative for general multi-round interactions.

use crate::error::{CoreError, Result};
use crate::numeric::BigRat;
use num::bigint::BigInt;
use num::rational::Ratio;
use num::{FromPrimitive, Zero};
use rand::Rng;
use serde::{Serialize, Serializer};

// ---------------------------------------------------------------------------
// Simulated time
// ---------------------------------------------------------------------------

/// Simulated time, exact rational so the inclusive abort boundary is not
/// subject to rounding.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SimTime(BigRat);

impl SimTime {
    pub fn zero() -> Self {
        SimTime(BigRat::zero())
    }

    /// Exact conversion: every finite `f64` is a rational.
    pub fn from_f64(x: f64) -> Result<Self> {
        Ratio::<BigInt>::from_f64(x)
            .map(SimTime)
            .ok_or_else(|| CoreError::Domain(format!("non-finite time {x}")))
    }

    pub fn as_f64(&self) -> f64 {
        crate::numeric::bigrat_to_f64(&self.0)
    }

    pub fn ratio(&self) -> &BigRat {
        &self.0
    }
}

impl std::ops::Add for SimTime {
    type Output = SimTime;
    fn add(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 + rhs.0)
    }
}

impl<'a> std::ops::Add<&'a SimTime> for SimTime {
    type Output = SimTime;
    fn add(self, rhs: &'a SimTime) -> SimTime {
        SimTime(self.0 + &rhs.0)
    }
}

impl Serialize for SimTime {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.as_f64())
    }
}

/// Per-message latency assignment for the four protocol messages.
#[derive(Debug, Clone)]
pub struct MessageLatencies {
    pub rand: SimTime,
    pub com: SimTime,
    pub ch: SimTime,
    pub resp: SimTime,
}

impl MessageLatencies {
    pub fn uniform(latency: SimTime) -> Self {
        MessageLatencies {
            rand: latency.clone(),
            com: latency.clone(),
            ch: latency.clone(),
            resp: latency,
        }
    }

    pub fn zero() -> Self {
        Self::uniform(SimTime::zero())
    }
}

/// Separation distance, signal speed and latency assignment for a run.
#[derive(Debug, Clone)]
pub struct TimingModel {
    pub dist: SimTime,
    pub light_speed: SimTime,
    pub latencies: MessageLatencies,
}

impl TimingModel {
    pub fn new(dist: f64, light_speed: f64, latency: f64) -> Result<Self> {
        if dist <= 0.0 || light_speed <= 0.0 || latency < 0.0 {
            return Err(CoreError::Domain(
                "dist and light_speed must be positive, latency non-negative".into(),
            ));
        }
        Ok(TimingModel {
            dist: SimTime::from_f64(dist)?,
            light_speed: SimTime::from_f64(light_speed)?,
            latencies: MessageLatencies::uniform(SimTime::from_f64(latency)?),
        })
    }

    /// Instantaneous messages at unit separation; never aborts.
    pub fn ideal() -> Self {
        TimingModel {
            dist: SimTime::from_f64(1.0).unwrap(),
            light_speed: SimTime::from_f64(1.0).unwrap(),
            latencies: MessageLatencies::zero(),
        }
    }

    /// One-way light travel time `dist / light_speed`.
    pub fn horizon(&self) -> SimTime {
        SimTime(self.dist.0.clone() / self.light_speed.0.clone())
    }
}

/// Outcome of the relativistic timing check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimingVerdict {
    Pass,
    Abort,
}

/// Abort iff `(t3 - t1) >= dist/light_speed` or `(t2 - t1) >= dist/light_speed`.
/// The boundary is inclusive.
pub fn timing_check(
    t1: &SimTime,
    t2: &SimTime,
    t3: &SimTime,
    timing: &TimingModel,
) -> TimingVerdict {
    let horizon = timing.horizon();
    let commit_elapsed = &t2.0 - &t1.0;
    let unveil_elapsed = &t3.0 - &t1.0;
    if unveil_elapsed >= horizon.0 || commit_elapsed >= horizon.0 {
        TimingVerdict::Abort
    } else {
        TimingVerdict::Pass
    }
}

// ---------------------------------------------------------------------------
// Protocol and prover traits
// ---------------------------------------------------------------------------

/// Result of the verification phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Check {
    Accept,
    /// Rejection, optionally with a diagnostic tag for malformed messages.
    Reject(Option<String>),
}

impl Check {
    pub fn reject(tag: impl Into<String>) -> Self {
        Check::Reject(Some(tag.into()))
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Check::Accept
        } else {
            Check::Reject(None)
        }
    }
}

/// Message signature and verification predicate of a two-prover
/// sigma-protocol.
pub trait SigmaProtocol {
    type Rand: Clone + Serialize;
    type Com: Clone + Serialize;
    type Ch: Clone + Copy + PartialEq + Serialize;
    type Resp: Clone + Serialize;

    fn name(&self) -> &'static str;
    fn sample_rand<R: Rng>(&self, rng: &mut R) -> Self::Rand;
    /// The full challenge space `C`.
    fn challenges(&self) -> Vec<Self::Ch>;
    fn sample_challenge<R: Rng>(&self, rng: &mut R) -> Self::Ch {
        let cs = self.challenges();
        cs[rng.gen_range(0..cs.len())]
    }
    fn verify(
        &self,
        rand: &Self::Rand,
        com: &Self::Com,
        ch: &Self::Ch,
        resp: &Self::Resp,
    ) -> Check;
}

/// The committing prover: receives `rand`, answers `com`.
pub trait CommitProver<P: SigmaProtocol> {
    fn commit(&mut self, rand: &P::Rand) -> P::Com;
}

/// The responding prover: receives `ch`, answers `resp`. It never sees
/// `rand` or `com`; any pre-shared randomness is baked in at setup.
pub trait RespondProver<P: SigmaProtocol> {
    fn respond(&mut self, ch: &P::Ch) -> P::Resp;
}

/// Snapshot/restore rewinding for classical provers.
///
/// Capturing clones the prover state; restoring replaces the live state
/// with the snapshot, so a rewound prover is exactly the pre-activation
/// machine.
#[derive(Debug, Clone)]
pub struct RewindableHandle<S: Clone> {
    snapshot: S,
}

impl<S: Clone> RewindableHandle<S> {
    pub fn capture(state: &S) -> Self {
        RewindableHandle {
            snapshot: state.clone(),
        }
    }

    pub fn restore(&self, state: &mut S) {
        *state = self.snapshot.clone();
    }

    pub fn into_state(self) -> S {
        self.snapshot
    }
}

// ---------------------------------------------------------------------------
// Transcript and execution
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
    Abort,
}

/// One full conversation, with simulated timestamps and the verifier's
/// verdict.
#[derive(Debug, Clone, Serialize)]
pub struct Transcript<P: SigmaProtocol> {
    pub rand: P::Rand,
    pub com: P::Com,
    pub ch: P::Ch,
    pub resp: P::Resp,
    pub t1: SimTime,
    pub t2: SimTime,
    pub t3: SimTime,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl<P: SigmaProtocol> Transcript<P> {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accept
    }
}

/// Execute one run: commit and unveil simultaneously, stamp times, run
/// the timing check and then the verification phase.
pub fn run_sigma<P, C, Re, R>(
    protocol: &P,
    committer: &mut C,
    responder: &mut Re,
    timing: &TimingModel,
    rng: &mut R,
) -> Transcript<P>
where
    P: SigmaProtocol,
    C: CommitProver<P>,
    Re: RespondProver<P>,
    R: Rng,
{
    let rand = protocol.sample_rand(rng);
    let ch = protocol.sample_challenge(rng);
    let t1 = SimTime::zero();
    let com = committer.commit(&rand);
    let resp = responder.respond(&ch);
    let lat = &timing.latencies;
    let t2 = t1.clone() + &lat.rand + &lat.com;
    let t3 = t1.clone() + &lat.ch + &lat.resp;
    let (verdict, diagnostic) = match timing_check(&t1, &t2, &t3, timing) {
        TimingVerdict::Abort => (Verdict::Abort, Some("timing violation".to_string())),
        TimingVerdict::Pass => match protocol.verify(&rand, &com, &ch, &resp) {
            Check::Accept => (Verdict::Accept, None),
            Check::Reject(tag) => (Verdict::Reject, tag),
        },
    };
    Transcript {
        rand,
        com,
        ch,
        resp,
        t1,
        t2,
        t3,
        verdict,
        diagnostic,
    }
}

// ---------------------------------------------------------------------------
// Round-based three-machine model
// ---------------------------------------------------------------------------

/// Register names of the three-machine model: local state registers
/// `S0, S1, S2` and message registers `N1, N2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reg {
    S0,
    S1,
    S2,
    N1,
    N2,
}

/// Classical register contents.
pub type RegData = Vec<u64>;

/// The five registers of a run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegisterFile {
    pub s0: RegData,
    pub s1: RegData,
    pub s2: RegData,
    pub n1: RegData,
    pub n2: RegData,
}

/// Per-round action of the verifier machine, acting on `S0`, `N1`, `N2`.
pub type VerifierAction = Box<dyn FnMut(usize, &mut RegData, &mut RegData, &mut RegData)>;

/// Per-round action of a prover machine, acting on its own `(S_i, N_i)`.
pub struct ProverAction {
    /// Registers the action declares it touches; validated at
    /// configuration time against the machine's locality set.
    pub touches: Vec<Reg>,
    pub apply: Box<dyn FnMut(usize, &mut RegData, &mut RegData)>,
}

/// Validated configuration of the three machines.
///
/// Construction rejects any prover action declaring access to a register
/// outside its locality set, enforcing the tensor-product structure of a
/// round: the first prover may touch only `(S1, N1)`, the second only
/// `(S2, N2)`. The action signatures then physically expose exactly that
/// pair.
pub struct MachineConfig {
    verifier: VerifierAction,
    prover1: ProverAction,
    prover2: ProverAction,
}

impl MachineConfig {
    pub fn new(
        verifier: VerifierAction,
        prover1: ProverAction,
        prover2: ProverAction,
    ) -> Result<Self> {
        let allowed1 = [Reg::S1, Reg::N1];
        let allowed2 = [Reg::S2, Reg::N2];
        for r in &prover1.touches {
            if !allowed1.contains(r) {
                return Err(CoreError::Config(format!(
                    "prover 1 action declares access to {r:?}"
                )));
            }
        }
        for r in &prover2.touches {
            if !allowed2.contains(r) {
                return Err(CoreError::Config(format!(
                    "prover 2 action declares access to {r:?}"
                )));
            }
        }
        Ok(MachineConfig {
            verifier,
            prover1,
            prover2,
        })
    }
}

/// Execute `rounds` rounds: the verifier acts on `(S0, N1, N2)`, then both
/// provers act locally and simultaneously on their `(S_i, N_i)`. The final
/// register file is the readout.
///
/// Registers are classical words; the quantum oracle semantics (unitary
/// activations with adjoint rewinding) live in the extractors, which is
/// the only place the toolkit drives quantum machines.
pub fn run_rounds(
    config: &mut MachineConfig,
    rounds: usize,
    initial: RegisterFile,
) -> Result<RegisterFile> {
    if rounds == 0 {
        return Err(CoreError::Config("need at least one round".into()));
    }
    let mut regs = initial;
    for round in 1..=rounds {
        (config.verifier)(round, &mut regs.s0, &mut regs.n1, &mut regs.n2);
        (config.prover1.apply)(round, &mut regs.s1, &mut regs.n1);
        (config.prover2.apply)(round, &mut regs.s2, &mut regs.n2);
    }
    Ok(regs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(x: f64) -> SimTime {
        SimTime::from_f64(x).unwrap()
    }

    #[test]
    fn timing_check_examples() {
        let timing = TimingModel::new(1.0, 1.0, 0.0).unwrap();
        assert_eq!(
            timing_check(&t(0.0), &t(0.5), &t(0.9), &timing),
            TimingVerdict::Pass
        );
        // The boundary is inclusive.
        assert_eq!(
            timing_check(&t(0.0), &t(0.5), &t(1.0), &timing),
            TimingVerdict::Abort
        );
        assert_eq!(
            timing_check(&t(0.0), &t(1.2), &t(0.5), &timing),
            TimingVerdict::Abort
        );
    }

    #[test]
    fn echo_machines_one_round() {
        let config = MachineConfig::new(
            Box::new(|_, _s0, n1, n2| {
                *n1 = vec![11];
                *n2 = vec![22];
            }),
            ProverAction {
                touches: vec![Reg::S1, Reg::N1],
                apply: Box::new(|_, s1, n1| *s1 = n1.clone()),
            },
            ProverAction {
                touches: vec![Reg::S2, Reg::N2],
                apply: Box::new(|_, s2, n2| *s2 = n2.clone()),
            },
        );
        let out = run_rounds(&mut config.unwrap(), 1, RegisterFile::default()).unwrap();
        assert_eq!(out.s1, vec![11]);
        assert_eq!(out.s2, vec![22]);
    }

    #[test]
    fn verifier_may_forward_between_rounds() {
        // Round 1: prover 1 writes into N1. Round 2: the verifier copies
        // N1 into N2 and prover 2 sees it.
        let config = MachineConfig::new(
            Box::new(|round, _s0, n1, n2| {
                if round == 2 {
                    *n2 = n1.clone();
                }
            }),
            ProverAction {
                touches: vec![Reg::N1],
                apply: Box::new(|round, _s1, n1| {
                    if round == 1 {
                        *n1 = vec![7];
                    }
                }),
            },
            ProverAction {
                touches: vec![Reg::S2, Reg::N2],
                apply: Box::new(|round, s2, n2| {
                    if round == 2 {
                        *s2 = n2.clone();
                    }
                }),
            },
        );
        let out = run_rounds(&mut config.unwrap(), 2, RegisterFile::default()).unwrap();
        assert_eq!(out.s2, vec![7]);
    }

    #[test]
    fn cross_register_declaration_is_rejected() {
        let config = MachineConfig::new(
            Box::new(|_, _, _, _| {}),
            ProverAction {
                touches: vec![Reg::S1, Reg::N1],
                apply: Box::new(|_, _, _| {}),
            },
            ProverAction {
                touches: vec![Reg::N1],
                apply: Box::new(|_, _, _| {}),
            },
        );
        assert!(matches!(config, Err(CoreError::Config(_))));
    }

    #[test]
    fn rewindable_handle_roundtrip() {
        let mut state = vec![1u64, 2, 3];
        let handle = RewindableHandle::capture(&state);
        state.push(4);
        handle.restore(&mut state);
        assert_eq!(state, vec![1, 2, 3]);
    }
}
