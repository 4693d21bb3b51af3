//! Two- and three-prover graph 3-coloring games.
//!
//! Provers pre-share labelings `l0, l1` with `l0_v + l1_v = c_v (mod 3)`
//! for a coloring `c`. A question is an edge plus a bit; the answer is the
//! pair of labels at the edge's endpoints. The verifier's checks:
//!
//! * edge verification (same edge, different bits): the label sums at the
//!   two endpoints must differ mod 3;
//! * well-definition (same bit, shared vertices): repeated vertices must
//!   get identical labels;
//! * consistency (three-prover only): a prover echoing another's exact
//!   question must echo its answer.
//!
//! The question distribution is generative: with probability `eps` pick an
//! edge-verification pair, otherwise pick a well-definition pair by
//! walking to a uniformly random incident edge of a uniformly random
//! endpoint. Masses are kept as exact rationals; the printed closed forms
//! are evaluated alongside for reference.

use crate::exec::stream_rng;
use crate::graph::GraphInstance;
use crate::numeric::{rat_to_f64, Rat};
use crate::sigma::{SimTime, TimingModel, TimingVerdict};
use num::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A question `(edge, b)`; `edge` indexes into the graph's edge list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Question {
    pub edge: usize,
    pub b: u8,
}

impl Question {
    pub fn index(&self) -> usize {
        self.edge * 2 + self.b as usize
    }

    pub fn from_index(idx: usize) -> Self {
        Question {
            edge: idx / 2,
            b: (idx % 2) as u8,
        }
    }
}

/// Number of distinct questions, `2 |H|`.
pub fn question_count(graph: &GraphInstance) -> usize {
    2 * graph.num_edges()
}

/// Labels for the two endpoints of the asked edge, in canonical
/// (smaller vertex, larger vertex) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeAnswer {
    pub first: u8,
    pub second: u8,
}

impl EdgeAnswer {
    /// The label this answer assigns to `vertex`, if it is an endpoint.
    pub fn label_at(&self, graph: &GraphInstance, q: Question, vertex: usize) -> Option<u8> {
        let e = graph.edge(q.edge);
        if e.0 == vertex {
            Some(self.first)
        } else if e.1 == vertex {
            Some(self.second)
        } else {
            None
        }
    }
}

/// Shared labeling: per-vertex labels with `l0 + l1 = c (mod 3)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labeling {
    pub l0: Vec<u8>,
    pub l1: Vec<u8>,
}

impl Labeling {
    pub fn random_for_coloring<R: Rng>(coloring: &[u8], rng: &mut R) -> Self {
        let l0: Vec<u8> = coloring.iter().map(|_| rng.gen_range(0..3u8)).collect();
        let l1: Vec<u8> = coloring
            .iter()
            .zip(&l0)
            .map(|(&c, &l)| (3 + c - l) % 3)
            .collect();
        Labeling { l0, l1 }
    }

    pub fn label(&self, vertex: usize, b: u8) -> u8 {
        if b == 0 {
            self.l0[vertex]
        } else {
            self.l1[vertex]
        }
    }

    pub fn answer(&self, graph: &GraphInstance, q: Question) -> EdgeAnswer {
        let e = graph.edge(q.edge);
        EdgeAnswer {
            first: self.label(e.0, q.b),
            second: self.label(e.1, q.b),
        }
    }

    /// The coloring the labeling encodes, `l0 + l1 mod 3`.
    pub fn induced_coloring(&self) -> Vec<u8> {
        self.l0
            .iter()
            .zip(&self.l1)
            .map(|(&a, &b)| (a + b) % 3)
            .collect()
    }
}

/// Deterministic answer table: one answer per question. This is the
/// strategy object both the game runners and the extractors consume.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableStrategy {
    pub answers: Vec<EdgeAnswer>,
}

impl TableStrategy {
    pub fn from_labeling(graph: &GraphInstance, labeling: &Labeling) -> Self {
        let answers = (0..question_count(graph))
            .map(|i| labeling.answer(graph, Question::from_index(i)))
            .collect();
        TableStrategy { answers }
    }

    pub fn random<R: Rng>(graph: &GraphInstance, rng: &mut R) -> Self {
        let answers = (0..question_count(graph))
            .map(|_| EdgeAnswer {
                first: rng.gen_range(0..3),
                second: rng.gen_range(0..3),
            })
            .collect();
        TableStrategy { answers }
    }

    pub fn answer(&self, q: Question) -> EdgeAnswer {
        self.answers[q.index()]
    }
}

// ---------------------------------------------------------------------------
// Question distribution
// ---------------------------------------------------------------------------

/// Sample a question pair from the generative two-branch procedure.
pub fn dg_sample<R: Rng>(graph: &GraphInstance, eps: Rat, rng: &mut R) -> (Question, Question) {
    let m = graph.num_edges();
    let edge = rng.gen_range(0..m);
    let b = rng.gen_range(0..2u8);
    let q1 = Question { edge, b };
    if rng.gen::<f64>() < rat_to_f64(&eps) {
        (q1, Question { edge, b: 1 - b })
    } else {
        let e = graph.edge(edge);
        let endpoint = if rng.gen::<bool>() { e.0 } else { e.1 };
        let incident = graph.incident_edges(endpoint);
        let e2 = incident[rng.gen_range(0..incident.len())];
        (q1, Question { edge: e2, b })
    }
}

/// Exact mass of every ordered question pair under the generative
/// procedure. The map's values sum to one.
pub fn dg_pair_mass(graph: &GraphInstance, eps: Rat) -> BTreeMap<(Question, Question), Rat> {
    let m = graph.num_edges() as i64;
    let mut out: BTreeMap<(Question, Question), Rat> = BTreeMap::new();
    let base = Rat::new(1, 2 * m);
    for edge in 0..graph.num_edges() {
        for b in 0..2u8 {
            let q1 = Question { edge, b };
            // Edge-verification branch.
            let evt_mass = eps * base;
            if !evt_mass.is_zero() {
                *out.entry((q1, Question { edge, b: 1 - b })).or_insert_with(Rat::zero) +=
                    evt_mass;
            }
            // Well-definition branch.
            let e = graph.edge(edge);
            for endpoint in e.endpoints() {
                let incident = graph.incident_edges(endpoint);
                let w = (Rat::one() - eps) * base * Rat::new(1, 2 * incident.len() as i64);
                if w.is_zero() {
                    continue;
                }
                for &e2 in incident {
                    *out.entry((q1, Question { edge: e2, b })).or_insert_with(Rat::zero) += w;
                }
            }
        }
    }
    out
}

/// Printed closed form for the well-definition mass
/// `D_G(e, b, e', b)`. The `b` argument does not enter the value; it is
/// part of the published signature.
pub fn dg_eval_wdt(graph: &GraphInstance, eps: Rat, e: usize, _b: u8, e2: usize) -> Rat {
    let m = graph.num_edges() as i64;
    let edge = graph.edge(e);
    let mut sum = Rat::zero();
    for endpoint in edge.endpoints() {
        let incident = graph.incident_edges(endpoint);
        if incident.contains(&e2) {
            sum += Rat::new(1, incident.len() as i64);
        }
    }
    (Rat::one() - eps) * Rat::new(1, 4 * m) * sum
}

/// Printed closed form for the edge-verification mass `D_G(e, b, e, !b)`.
///
/// The generative sampler produces only the first term (its
/// well-definition branch keeps `b` fixed, so the second term's pairs
/// never arise there); the sampler is normative for the protocol and this
/// evaluator reproduces the published expression for reference.
pub fn dg_eval_evt(graph: &GraphInstance, eps: Rat, e: usize, _b: u8) -> Rat {
    let m = graph.num_edges() as i64;
    let edge = graph.edge(e);
    let mut sum = Rat::zero();
    for endpoint in edge.endpoints() {
        sum += Rat::new(1, graph.incident_edges(endpoint).len() as i64);
    }
    eps * Rat::new(1, 2 * m) + (Rat::one() - eps) * Rat::new(1, 4 * m) * sum
}

/// Sample a question triple: a pair from the two-party distribution, a
/// third slot duplicating one of them uniformly, then a uniformly random
/// permutation of the three slots so the distribution is symmetric.
pub fn dg_sample_triple<R: Rng>(
    graph: &GraphInstance,
    eps: Rat,
    rng: &mut R,
) -> [Question; 3] {
    let (q1, q2) = dg_sample(graph, eps, rng);
    let q3 = if rng.gen::<bool>() { q1 } else { q2 };
    let mut arr = [q1, q2, q3];
    let perm = PERMS3[rng.gen_range(0..6)];
    let orig = arr;
    for (slot, &src) in perm.iter().enumerate() {
        arr[slot] = orig[src];
    }
    arr
}

const PERMS3: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Exact mass of every ordered question triple.
pub fn dg_triple_mass(graph: &GraphInstance, eps: Rat) -> BTreeMap<[Question; 3], Rat> {
    let pair = dg_pair_mass(graph, eps);
    let mut out: BTreeMap<[Question; 3], Rat> = BTreeMap::new();
    let twelfth = Rat::new(1, 12);
    for ((q1, q2), mass) in &pair {
        for q3 in [q1, q2] {
            let base = [*q1, *q2, *q3];
            for perm in PERMS3 {
                let mut arr = base;
                for (slot, &src) in perm.iter().enumerate() {
                    arr[slot] = base[src];
                }
                *out.entry(arr).or_insert_with(Rat::zero) += *mass * twelfth;
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Check phases
// ---------------------------------------------------------------------------

/// Two-prover check phase. Pairs with no applicable test accept vacuously.
pub fn threecol_2p_verify(
    graph: &GraphInstance,
    q1: Question,
    q2: Question,
    a1: EdgeAnswer,
    a2: EdgeAnswer,
) -> bool {
    if q1.edge == q2.edge && q1.b != q2.b {
        // Edge verification: endpoint color sums must differ.
        let i_sum = (a1.first + a2.first) % 3;
        let j_sum = (a1.second + a2.second) % 3;
        return i_sum != j_sum;
    }
    if q1.b == q2.b {
        // Well-definition on every shared vertex.
        let e1 = graph.edge(q1.edge);
        let e2 = graph.edge(q2.edge);
        for v in e1.shared_vertices(&e2) {
            let l1 = a1.label_at(graph, q1, v).expect("shared vertex lies on e1");
            let l2 = a2.label_at(graph, q2, v).expect("shared vertex lies on e2");
            if l1 != l2 {
                return false;
            }
        }
    }
    true
}

/// Three-prover check phase: the pairwise tests between the first two
/// provers plus the third prover's consistency checks.
pub fn threecol_3p_verify(
    graph: &GraphInstance,
    qs: [Question; 3],
    ans: [EdgeAnswer; 3],
) -> bool {
    let [q1, q2, q3] = qs;
    let [a1, a2, a3] = ans;
    // Consistency: an echoed question must get an echoed answer.
    if q3 == q1 && a3 != a1 {
        return false;
    }
    if q3 == q2 && a3 != a2 {
        return false;
    }
    threecol_2p_verify(graph, q1, q2, a1, a2)
}

// ---------------------------------------------------------------------------
// Seeded game execution with simulated timing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GameVerdict {
    Accept,
    Reject,
    Abort,
}

/// One round of the (2- or 3-prover) coloring game.
#[derive(Debug, Clone, Serialize)]
pub struct GameTranscript {
    pub questions: Vec<Question>,
    pub answers: Vec<EdgeAnswer>,
    pub t1: SimTime,
    pub reply_times: Vec<SimTime>,
    pub verdict: GameVerdict,
}

fn timed_verdict(timing: &TimingModel, replies: usize) -> (Vec<SimTime>, bool) {
    let t1 = SimTime::zero();
    let lat = &timing.latencies;
    let reply: Vec<SimTime> = (0..replies)
        .map(|_| t1.clone() + &lat.ch + &lat.resp)
        .collect();
    let aborted = reply.iter().any(|t| {
        timing_abort(&t1, t, timing)
    });
    (reply, aborted)
}

fn timing_abort(t1: &SimTime, reply: &SimTime, timing: &TimingModel) -> bool {
    crate::sigma::timing_check(t1, reply, reply, timing) == TimingVerdict::Abort
}

/// Run one two-prover round against deterministic tables.
pub fn run_threecol_2p<R: Rng>(
    graph: &GraphInstance,
    eps: Rat,
    p1: &TableStrategy,
    p2: &TableStrategy,
    timing: &TimingModel,
    rng: &mut R,
) -> GameTranscript {
    let (q1, q2) = dg_sample(graph, eps, rng);
    let a1 = p1.answer(q1);
    let a2 = p2.answer(q2);
    let (reply_times, aborted) = timed_verdict(timing, 2);
    let verdict = if aborted {
        GameVerdict::Abort
    } else if threecol_2p_verify(graph, q1, q2, a1, a2) {
        GameVerdict::Accept
    } else {
        GameVerdict::Reject
    };
    GameTranscript {
        questions: vec![q1, q2],
        answers: vec![a1, a2],
        t1: SimTime::zero(),
        reply_times,
        verdict,
    }
}

/// Run one three-prover round against deterministic tables.
pub fn run_threecol_3p<R: Rng>(
    graph: &GraphInstance,
    eps: Rat,
    provers: [&TableStrategy; 3],
    timing: &TimingModel,
    rng: &mut R,
) -> GameTranscript {
    let qs = dg_sample_triple(graph, eps, rng);
    let ans = [
        provers[0].answer(qs[0]),
        provers[1].answer(qs[1]),
        provers[2].answer(qs[2]),
    ];
    let (reply_times, aborted) = timed_verdict(timing, 3);
    let verdict = if aborted {
        GameVerdict::Abort
    } else if threecol_3p_verify(graph, qs, ans) {
        GameVerdict::Accept
    } else {
        GameVerdict::Reject
    };
    GameTranscript {
        questions: qs.to_vec(),
        answers: ans.to_vec(),
        t1: SimTime::zero(),
        reply_times,
        verdict,
    }
}

// ---------------------------------------------------------------------------
// Exact acceptance bookkeeping
// ---------------------------------------------------------------------------

/// Pair masses flattened over a common denominator for fast exact
/// acceptance evaluation across many strategies.
pub struct PairMassTable {
    pub entries: Vec<(Question, Question, i64)>,
    pub denom: i64,
}

impl PairMassTable {
    pub fn new(graph: &GraphInstance, eps: Rat) -> Self {
        let masses = dg_pair_mass(graph, eps);
        let denom = masses
            .values()
            .fold(1i64, |acc, r| num::integer::lcm(acc, *r.denom()));
        let entries = masses
            .into_iter()
            .map(|((q1, q2), r)| (q1, q2, r.numer() * (denom / r.denom())))
            .collect();
        PairMassTable { entries, denom }
    }

    /// Exact acceptance probability of a deterministic strategy pair.
    pub fn acceptance(&self, graph: &GraphInstance, f1: &TableStrategy, f2: &TableStrategy) -> Rat {
        let mut num = 0i64;
        for &(q1, q2, w) in &self.entries {
            if threecol_2p_verify(graph, q1, q2, f1.answer(q1), f2.answer(q2)) {
                num += w;
            }
        }
        Rat::new(num, self.denom)
    }
}

/// Triple masses over a common denominator.
pub struct TripleMassTable {
    pub entries: Vec<([Question; 3], i64)>,
    pub denom: i64,
}

impl TripleMassTable {
    pub fn new(graph: &GraphInstance, eps: Rat) -> Self {
        let masses = dg_triple_mass(graph, eps);
        let denom = masses
            .values()
            .fold(1i64, |acc, r| num::integer::lcm(acc, *r.denom()));
        let entries = masses
            .into_iter()
            .map(|(qs, r)| (qs, r.numer() * (denom / r.denom())))
            .collect();
        TripleMassTable { entries, denom }
    }

    pub fn acceptance(&self, graph: &GraphInstance, provers: [&TableStrategy; 3]) -> Rat {
        let mut num = 0i64;
        for &(qs, w) in &self.entries {
            let ans = [
                provers[0].answer(qs[0]),
                provers[1].answer(qs[1]),
                provers[2].answer(qs[2]),
            ];
            if threecol_3p_verify(graph, qs, ans) {
                num += w;
            }
        }
        Rat::new(num, self.denom)
    }
}

/// Exhaustive search over every shared labeling table (two labels per
/// vertex, `3^(2n)` tables): the exact maximum acceptance any such
/// strategy achieves. This is the classical soundness ceiling oracle.
pub fn exhaustive_labeling_ceiling(graph: &GraphInstance, eps: Rat) -> (Rat, Labeling) {
    let n = graph.num_vertices();
    let total = 3usize.pow(2 * n as u32);
    let table = PairMassTable::new(graph, eps);
    let evaluate = |idx: usize| -> (Rat, usize) {
        let mut trits = idx;
        let mut l0 = vec![0u8; n];
        let mut l1 = vec![0u8; n];
        for v in 0..n {
            l0[v] = (trits % 3) as u8;
            trits /= 3;
            l1[v] = (trits % 3) as u8;
            trits /= 3;
        }
        let labeling = Labeling { l0, l1 };
        let f = TableStrategy::from_labeling(graph, &labeling);
        (table.acceptance(graph, &f, &f), idx)
    };
    let results = crate::exec::map_indexed(total, evaluate);
    let (best, idx) = results
        .into_iter()
        .max_by(|a, b| a.0.cmp(&b.0))
        .expect("at least one labeling");
    let mut trits = idx;
    let mut l0 = vec![0u8; n];
    let mut l1 = vec![0u8; n];
    for v in 0..n {
        l0[v] = (trits % 3) as u8;
        trits /= 3;
        l1[v] = (trits % 3) as u8;
        trits /= 3;
    }
    (best, Labeling { l0, l1 })
}

/// Randomized search over arbitrary answer-function pairs (half shared,
/// half independent); returns the best acceptance found.
pub fn random_table_search(graph: &GraphInstance, eps: Rat, tries: usize, seed: u64) -> Rat {
    let table = PairMassTable::new(graph, eps);
    let results = crate::exec::map_indexed(tries, |i| {
        let mut rng = stream_rng(seed, i as u64);
        let f1 = TableStrategy::random(graph, &mut rng);
        let f2 = if i % 2 == 0 {
            f1.clone()
        } else {
            TableStrategy::random(graph, &mut rng)
        };
        table.acceptance(graph, &f1, &f2)
    });
    results.into_iter().max().expect("at least one try")
}
