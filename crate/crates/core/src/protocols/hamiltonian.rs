//! The two-prover Hamiltonian-cycle proof system.
//!
//! The provers pre-agree on a cycle, a random vertex permutation `P` and a
//! random matrix `A`. The verifier sends a random matrix `B`; the
//! committer answers `Y = A + B .* M` entrywise, where `M` is the
//! adjacency matrix of the permuted graph. On challenge 0 the responder
//! opens everything (`P` and `A`); on challenge 1 it opens only the cycle
//! entries, which must all decommit to 1.

use crate::error::{CoreError, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::graph::GraphInstance;
use crate::sigma::{Check, CommitProver, RespondProver, SigmaProtocol};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Dense square matrix over `F_q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FMatrix {
    n: usize,
    data: Vec<FieldElement>,
}

impl FMatrix {
    pub fn zeros(n: usize) -> Self {
        FMatrix {
            n,
            data: vec![FieldElement(0); n * n],
        }
    }

    pub fn random<R: Rng>(n: usize, field: FieldSpec, rng: &mut R) -> Self {
        FMatrix {
            n,
            data: (0..n * n).map(|_| field.sample_uniform(rng)).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.data[i * self.n + j] = v;
    }

    /// Symmetric 0/1 adjacency matrix of the graph's image under `perm`.
    pub fn permuted_adjacency(graph: &GraphInstance, perm: &[usize]) -> Self {
        let n = graph.num_vertices();
        let mut m = FMatrix::zeros(n);
        for e in graph.edges() {
            let (u, v) = (perm[e.0], perm[e.1]);
            m.set(u, v, FieldElement(1));
            m.set(v, u, FieldElement(1));
        }
        m
    }
}

fn is_permutation(perm: &[usize], n: usize) -> bool {
    if perm.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return false;
        }
        seen[p] = true;
    }
    true
}

/// `Y[i][j] = A[i][j] + B[i][j] * M[i][j]` with `M` the adjacency matrix
/// of the permuted graph.
pub fn hc_commit_matrix(
    graph: &GraphInstance,
    field: FieldSpec,
    perm: &[usize],
    b: &FMatrix,
    a: &FMatrix,
) -> Result<FMatrix> {
    let n = graph.num_vertices();
    if a.size() != n || b.size() != n || !is_permutation(perm, n) {
        return Err(CoreError::Dimension(
            "matrices must be n x n and perm a permutation of the vertices".into(),
        ));
    }
    let m = FMatrix::permuted_adjacency(graph, perm);
    let mut y = FMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let masked = field.mul(b.get(i, j), m.get(i, j));
            y.set(i, j, field.add(a.get(i, j), masked));
        }
    }
    Ok(y)
}

/// Pre-agreed prover data: witness cycle, permutation and opening matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HamiltonianWitness {
    pub cycle: Vec<usize>,
    pub perm: Vec<usize>,
    pub a: FMatrix,
}

impl HamiltonianWitness {
    /// Fresh permutation and opening randomness for a known cycle.
    pub fn generate<R: Rng>(
        graph: &GraphInstance,
        field: FieldSpec,
        cycle: Vec<usize>,
        rng: &mut R,
    ) -> Self {
        let n = graph.num_vertices();
        let mut perm: Vec<usize> = (0..n).collect();
        // Fisher-Yates
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            perm.swap(i, j);
        }
        HamiltonianWitness {
            cycle,
            perm,
            a: FMatrix::random(n, field, rng),
        }
    }

    /// The image of the witness cycle under the permutation, as directed
    /// matrix entries.
    pub fn permuted_cycle(&self) -> Vec<(usize, usize)> {
        let n = self.cycle.len();
        (0..n)
            .map(|i| {
                (
                    self.perm[self.cycle[i]],
                    self.perm[self.cycle[(i + 1) % n]],
                )
            })
            .collect()
    }
}

/// Responder message.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum HcResponse {
    /// Challenge 0: open the permutation and the full matrix `A`.
    Open { perm: Vec<usize>, a: FMatrix },
    /// Challenge 1: a directed Hamiltonian cycle on the permuted vertices
    /// with one opening per cycle entry.
    Cycle {
        entries: Vec<(usize, usize)>,
        openings: Vec<FieldElement>,
    },
}

/// Honest response for challenge `ch`.
pub fn hc_respond(witness: &HamiltonianWitness, ch: u8) -> HcResponse {
    match ch {
        0 => HcResponse::Open {
            perm: witness.perm.clone(),
            a: witness.a.clone(),
        },
        _ => {
            let entries = witness.permuted_cycle();
            let openings = entries
                .iter()
                .map(|&(u, v)| witness.a.get(u, v))
                .collect();
            HcResponse::Cycle { entries, openings }
        }
    }
}

/// Directed entries forming a single cycle through all `n` vertices.
fn is_directed_hamiltonian_cycle(entries: &[(usize, usize)], n: usize) -> bool {
    if entries.len() != n || n < 3 {
        return false;
    }
    let mut succ = vec![usize::MAX; n];
    let mut indegree = vec![0usize; n];
    for &(u, v) in entries {
        if u >= n || v >= n || succ[u] != usize::MAX {
            return false;
        }
        succ[u] = v;
        indegree[v] += 1;
    }
    if indegree.iter().any(|&d| d != 1) {
        return false;
    }
    let mut cur = entries[0].0;
    for _ in 0..n {
        cur = succ[cur];
    }
    cur == entries[0].0 && {
        // Single cycle, not a union of shorter ones.
        let mut visited = vec![false; n];
        let mut cur = entries[0].0;
        let mut count = 0usize;
        while !visited[cur] {
            visited[cur] = true;
            count += 1;
            cur = succ[cur];
        }
        count == n
    }
}

/// Verification phase.
pub fn hc_verify(
    graph: &GraphInstance,
    field: FieldSpec,
    b: &FMatrix,
    y: &FMatrix,
    ch: u8,
    resp: &HcResponse,
) -> Check {
    let n = graph.num_vertices();
    if y.size() != n || b.size() != n {
        return Check::reject("matrix dimensions do not match the graph");
    }
    match (ch, resp) {
        (0, HcResponse::Open { perm, a }) => {
            if !is_permutation(perm, n) {
                return Check::reject("claimed permutation is not a permutation");
            }
            if a.size() != n {
                return Check::reject("opening matrix has the wrong size");
            }
            let m = FMatrix::permuted_adjacency(graph, perm);
            for i in 0..n {
                for j in 0..n {
                    let expect = field.add(a.get(i, j), field.mul(b.get(i, j), m.get(i, j)));
                    if y.get(i, j) != expect {
                        return Check::Reject(None);
                    }
                }
            }
            Check::Accept
        }
        (1, HcResponse::Cycle { entries, openings }) => {
            if !is_directed_hamiltonian_cycle(entries, n) {
                return Check::reject("opened entries are not a Hamiltonian cycle");
            }
            if openings.len() != entries.len() {
                return Check::reject("one opening required per cycle entry");
            }
            for (&(u, v), &a_uv) in entries.iter().zip(openings) {
                // Entry must decommit to 1: Y = A' + B.
                if y.get(u, v) != field.add(a_uv, b.get(u, v)) {
                    return Check::Reject(None);
                }
            }
            Check::Accept
        }
        _ => Check::reject("response shape does not match the challenge"),
    }
}

/// Protocol descriptor binding a graph to a field.
#[derive(Debug, Clone)]
pub struct HcProtocol {
    pub graph: GraphInstance,
    pub field: FieldSpec,
}

impl SigmaProtocol for HcProtocol {
    type Rand = FMatrix;
    type Com = FMatrix;
    type Ch = u8;
    type Resp = HcResponse;

    fn name(&self) -> &'static str {
        "hamiltonian-cycle"
    }

    fn sample_rand<R: Rng>(&self, rng: &mut R) -> FMatrix {
        FMatrix::random(self.graph.num_vertices(), self.field, rng)
    }

    fn challenges(&self) -> Vec<u8> {
        vec![0, 1]
    }

    fn verify(&self, rand: &FMatrix, com: &FMatrix, ch: &u8, resp: &HcResponse) -> Check {
        hc_verify(&self.graph, self.field, rand, com, *ch, resp)
    }
}

/// Honest committing prover.
#[derive(Debug, Clone)]
pub struct HcCommitter {
    protocol: HcProtocol,
    witness: HamiltonianWitness,
}

/// Honest responding prover. Holds only the pre-agreed data.
#[derive(Debug, Clone)]
pub struct HcResponder {
    witness: HamiltonianWitness,
}

/// Split the pre-agreed witness data into the two prover machines.
pub fn honest_hc_provers(
    protocol: &HcProtocol,
    witness: HamiltonianWitness,
) -> (HcCommitter, HcResponder) {
    (
        HcCommitter {
            protocol: protocol.clone(),
            witness: witness.clone(),
        },
        HcResponder { witness },
    )
}

impl CommitProver<HcProtocol> for HcCommitter {
    fn commit(&mut self, rand: &FMatrix) -> FMatrix {
        hc_commit_matrix(
            &self.protocol.graph,
            self.protocol.field,
            &self.witness.perm,
            rand,
            &self.witness.a,
        )
        .expect("honest witness dimensions are consistent")
    }
}

impl RespondProver<HcProtocol> for HcResponder {
    fn respond(&mut self, ch: &u8) -> HcResponse {
        hc_respond(&self.witness, *ch)
    }
}

/// Prover pair that answers with uniformly random field elements; used to
/// exercise the soundness side of the engine.
#[derive(Debug, Clone)]
pub struct RandomHcCommitter {
    pub protocol: HcProtocol,
    pub seed_rng: rand_chacha::ChaCha8Rng,
}

#[derive(Debug, Clone)]
pub struct RandomHcResponder {
    pub protocol: HcProtocol,
    pub seed_rng: rand_chacha::ChaCha8Rng,
}

impl CommitProver<HcProtocol> for RandomHcCommitter {
    fn commit(&mut self, _rand: &FMatrix) -> FMatrix {
        FMatrix::random(
            self.protocol.graph.num_vertices(),
            self.protocol.field,
            &mut self.seed_rng,
        )
    }
}

impl RespondProver<HcProtocol> for RandomHcResponder {
    fn respond(&mut self, ch: &u8) -> HcResponse {
        let n = self.protocol.graph.num_vertices();
        let field = self.protocol.field;
        if *ch == 0 {
            HcResponse::Open {
                perm: (0..n).collect(),
                a: FMatrix::random(n, field, &mut self.seed_rng),
            }
        } else {
            let entries: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            let openings = (0..n)
                .map(|_| field.sample_uniform(&mut self.seed_rng))
                .collect();
            HcResponse::Cycle { entries, openings }
        }
    }
}
