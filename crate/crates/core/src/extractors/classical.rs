//! Special extractors and the canonical rewinding extractor for classical
//! provers.
//!
//! From two accepting conversations sharing `(rand, com)` but with
//! different challenges, the special extractor computes a witness
//! candidate: the inverse-permuted cycle for Hamiltonian-cycle, `x xor z`
//! for subset-sum. The canonical extractor obtains such a pair by running
//! the commit phase once, then challenging the responder twice with a
//! snapshot rewind in between.

use crate::error::{CoreError, Result};
use crate::exec;
use crate::field::FieldSpec;
use crate::graph::GraphInstance;
use crate::numeric::Rat;
use crate::protocols::hamiltonian::{HcProtocol, HcResponse};
use crate::protocols::subset_sum::{SubsetResponse, SubsetSumProtocol};
use crate::sigma::{Check, CommitProver, RespondProver, RewindableHandle, SigmaProtocol};
use rand::Rng;
use serde::Serialize;

/// Two accepting conversations with shared first flow and distinct
/// challenges; the input shape every special extractor consumes.
#[derive(Debug, Clone)]
pub struct ConversationPair<P: SigmaProtocol> {
    pub rand: P::Rand,
    pub com: P::Com,
    pub ch1: P::Ch,
    pub resp1: P::Resp,
    pub ch2: P::Ch,
    pub resp2: P::Resp,
}

/// A sigma-protocol with a special extractor and a witness check.
pub trait SpecialExtract: SigmaProtocol {
    type Witness: Clone;

    /// The special extractor `K0`. May return a candidate that fails the
    /// witness check; callers decide what failure means.
    fn k0(&self, pair: &ConversationPair<Self>) -> Result<Self::Witness>
    where
        Self: Sized;

    fn witness_valid(&self, witness: &Self::Witness) -> bool;

    /// `|RA_max|`: the largest number of accepting responses over all
    /// `(rand, com, ch)`, used by the knowledge-error bound.
    fn max_accepting_responses(&self) -> f64;
}

/// Recover the vertex cycle from the inverse-permuted opened entries.
pub fn k0_hc(perm: &[usize], entries: &[(usize, usize)], n: usize) -> Result<Vec<usize>> {
    if perm.len() != n {
        return Err(CoreError::Protocol("permutation has the wrong length".into()));
    }
    let mut inverse = vec![usize::MAX; n];
    for (i, &p) in perm.iter().enumerate() {
        if p >= n || inverse[p] != usize::MAX {
            return Err(CoreError::Protocol("not a permutation".into()));
        }
        inverse[p] = i;
    }
    if entries.len() != n {
        return Err(CoreError::Protocol("cycle must have n entries".into()));
    }
    // Pull the opened cycle back through the permutation and walk it.
    let mut succ = vec![usize::MAX; n];
    for &(u, v) in entries {
        if u >= n || v >= n {
            return Err(CoreError::Protocol("cycle entry out of range".into()));
        }
        let (pu, pv) = (inverse[u], inverse[v]);
        if succ[pu] != usize::MAX {
            return Err(CoreError::Protocol("entries revisit a vertex".into()));
        }
        succ[pu] = pv;
    }
    let mut cycle = Vec::with_capacity(n);
    let mut cur = 0usize;
    for _ in 0..n {
        if cur == usize::MAX {
            return Err(CoreError::Protocol("entries do not close a cycle".into()));
        }
        cycle.push(cur);
        cur = succ[cur];
    }
    if cur != cycle[0] {
        return Err(CoreError::Protocol("entries do not close a cycle".into()));
    }
    Ok(cycle)
}

/// `w = x xor z`.
pub fn k0_subset(z: &[u8], x: &[u8]) -> Result<Vec<u8>> {
    if z.len() != x.len() {
        return Err(CoreError::Protocol(
            "mask and masked witness lengths differ".into(),
        ));
    }
    Ok(z.iter().zip(x).map(|(&zi, &xi)| zi ^ xi).collect())
}

impl SpecialExtract for HcProtocol {
    type Witness = Vec<usize>;

    fn k0(&self, pair: &ConversationPair<Self>) -> Result<Vec<usize>> {
        let (perm, entries) = match (&pair.resp1, &pair.resp2) {
            (HcResponse::Open { perm, .. }, HcResponse::Cycle { entries, .. }) => (perm, entries),
            (HcResponse::Cycle { entries, .. }, HcResponse::Open { perm, .. }) => (perm, entries),
            _ => {
                return Err(CoreError::Protocol(
                    "conversation pair must contain one full and one cycle opening".into(),
                ))
            }
        };
        k0_hc(perm, entries, self.graph.num_vertices())
    }

    fn witness_valid(&self, witness: &Vec<usize>) -> bool {
        self.graph.is_hamiltonian_cycle(witness)
    }

    fn max_accepting_responses(&self) -> f64 {
        // One accepting full opening per permutation.
        let n = self.graph.num_vertices() as u64;
        (1..=n).map(|i| i as f64).product()
    }
}

impl SpecialExtract for SubsetSumProtocol {
    type Witness = Vec<u8>;

    fn k0(&self, pair: &ConversationPair<Self>) -> Result<Vec<u8>> {
        let (z, x) = match (&pair.resp1, &pair.resp2) {
            (SubsetResponse::Vectors { z, .. }, SubsetResponse::Masked { x, .. }) => (z, x),
            (SubsetResponse::Masked { x, .. }, SubsetResponse::Vectors { z, .. }) => (z, x),
            _ => {
                return Err(CoreError::Protocol(
                    "conversation pair must contain one vector and one masked opening".into(),
                ))
            }
        };
        k0_subset(z, x)
    }

    fn witness_valid(&self, witness: &Vec<u8>) -> bool {
        self.instance.witness_valid(self.field, witness)
    }

    fn max_accepting_responses(&self) -> f64 {
        // One accepting opening per mask choice.
        2f64.powi(self.instance.s.len() as i32)
    }
}

/// What one canonical-extraction run produced.
#[derive(Debug, Clone, Serialize)]
pub struct ExtractionOutcome<W> {
    /// `K0`'s output when both conversations accepted.
    pub witness: Option<W>,
    pub both_accepted: bool,
    pub witness_valid: bool,
}

/// Run the canonical extractor against classical provers: commit once,
/// challenge, rewind the responder by snapshot, challenge again with a
/// different challenge, and feed an accepting pair to `K0`.
pub fn canonical_extract_classical<P, C, Re, R>(
    protocol: &P,
    committer: &mut C,
    responder: &mut Re,
    rng: &mut R,
) -> ExtractionOutcome<P::Witness>
where
    P: SpecialExtract,
    C: CommitProver<P>,
    Re: RespondProver<P> + Clone,
    R: Rng,
{
    let rand = protocol.sample_rand(rng);
    let com = committer.commit(&rand);
    let challenges = protocol.challenges();
    let i = rng.gen_range(0..challenges.len());
    let j = {
        let j = rng.gen_range(0..challenges.len() - 1);
        if j >= i {
            j + 1
        } else {
            j
        }
    };
    let (ch1, ch2) = (challenges[i], challenges[j]);

    let handle = RewindableHandle::capture(responder);
    let resp1 = responder.respond(&ch1);
    handle.restore(responder);
    let resp2 = responder.respond(&ch2);

    let acc1 = protocol.verify(&rand, &com, &ch1, &resp1) == Check::Accept;
    let acc2 = protocol.verify(&rand, &com, &ch2, &resp2) == Check::Accept;
    if !(acc1 && acc2) {
        return ExtractionOutcome {
            witness: None,
            both_accepted: false,
            witness_valid: false,
        };
    }
    let pair = ConversationPair {
        rand,
        com,
        ch1,
        resp1,
        ch2,
        resp2,
    };
    let witness = protocol.k0(&pair).ok();
    let witness_valid = witness.as_ref().map_or(false, |w| protocol.witness_valid(w));
    ExtractionOutcome {
        witness,
        both_accepted: true,
        witness_valid,
    }
}

// ---------------------------------------------------------------------------
// Exhaustive double-opening adversaries
// ---------------------------------------------------------------------------

/// Exact statistics of the exhaustive double-opening search.
#[derive(Debug, Clone, Serialize)]
pub struct DoubleOpeningReport {
    pub q: u64,
    pub window: usize,
    pub adversaries: usize,
    /// Largest `Pr[both conversations accept and K0 fails]` over the
    /// family, exact.
    pub max_joint: Rat,
    /// The binding ceiling `1/q` the joint probability must respect.
    pub bound: Rat,
    pub all_within: bool,
}

/// Exhaustively enumerate double-opening adversaries for the
/// Hamiltonian-cycle protocol on the 3-vertex path, which has no
/// Hamiltonian cycle: `K0` can never output a valid witness there, so
/// `Pr[accept and K0 fails]` is the pair-acceptance probability itself.
///
/// The committer plays `Y(B) = A* + B .* M*` and the responder opens
/// `(A, A')`; both deviate arbitrarily on the first `window` cycle entries
/// (ordered so the entry absent from the graph comes first) and play
/// honestly elsewhere. Per-entry acceptance is affine in the matching `B`
/// entry, so acceptance factorizes and the probability over uniform `B`
/// is exact.
pub fn hc_double_opening_enumeration(q: u64, window: usize) -> Result<DoubleOpeningReport> {
    if !(1..=3).contains(&window) {
        return Err(CoreError::Range("window must be between 1 and 3".into()));
    }
    if q > 31 {
        return Err(CoreError::Capacity("enumeration supports q <= 31".into()));
    }
    // Path 0-1-2 with claimed cycle entries (2,0),(0,1),(1,2); the (2,0)
    // entry is the one missing from the graph.
    let truth = [0u64, 1, 1];

    // Per-entry strategy space: (A*, M*, A, A').
    let per_entry = q * 2 * q * q;
    let total = per_entry.pow(window as u32);

    let joints: Vec<u64> = exec::map_indexed(total as usize, |idx| {
        let mut rest = idx as u64;
        // Counts B values (per entry) both challenges tolerate; the
        // product over entries is Pr[both accept] * q^window.
        let mut numerator = 1u64;
        for slot in 0..window {
            let code = rest % per_entry;
            rest /= per_entry;
            let a_star = code % q;
            let m_star = (code / q) % 2;
            let a_open = (code / (q * 2)) % q;
            let a_open1 = code / (q * 2 * q);
            let t = truth[slot];
            let mut count = 0u64;
            for b in 0..q {
                let y = (a_star + b * m_star) % q;
                let ch0_ok = y == (a_open + b * t) % q;
                let ch1_ok = y == (a_open1 + b) % q;
                if ch0_ok && ch1_ok {
                    count += 1;
                }
            }
            numerator *= count;
        }
        numerator
    });
    let max_numerator = joints.into_iter().max().unwrap_or(0);
    let denom = (q as i64).pow(window as u32);
    let max_joint = Rat::new(max_numerator as i64, denom);
    let bound = Rat::new(1, q as i64);
    Ok(DoubleOpeningReport {
        q,
        window,
        adversaries: total as usize,
        max_joint,
        bound,
        all_within: max_joint <= bound,
    })
}

/// A concrete forged conversation pair over `F_2`: with `B = 0` every
/// entry opens to 0 and to 1 simultaneously, so both conversations accept
/// although the extracted cycle is not a cycle of the graph.
pub fn forge_double_opening_pair(
    graph: &GraphInstance,
    field: FieldSpec,
) -> (HcProtocol, ConversationPair<HcProtocol>) {
    use crate::protocols::hamiltonian::FMatrix;
    let n = graph.num_vertices();
    assert_eq!(n, 3, "forgery is built for 3-vertex graphs");
    let protocol = HcProtocol {
        graph: graph.clone(),
        field,
    };
    let b = FMatrix::zeros(n);
    let a_star = FMatrix::zeros(n);
    let y = FMatrix::zeros(n);
    let entries = vec![(0usize, 1usize), (1, 2), (2, 0)];
    let openings = entries.iter().map(|&(u, v)| a_star.get(u, v)).collect();
    let pair = ConversationPair {
        rand: b,
        com: y,
        ch1: 0,
        resp1: HcResponse::Open {
            perm: (0..n).collect(),
            a: a_star,
        },
        ch2: 1,
        resp2: HcResponse::Cycle { entries, openings },
    };
    (protocol, pair)
}
