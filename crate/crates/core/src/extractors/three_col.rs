//! Knowledge extractors for the graph 3-coloring games.
//!
//! The classical extractor plays the verifier against two rewindable
//! provers, sweeping every question pair in the distribution's support:
//! passing edge-verification tests mark vertex colors, conflicts and
//! failed well-definition tests leave question marks, and question-marked
//! vertices are finally resolved to the majority recorded color (ties to
//! the lowest color index).
//!
//! The quantum extractor interrogates the first two provers of a
//! tripartite strategy question by question, keeping the collapsed
//! post-measurement state between questions, and feeds the two recorded
//! answer tables to the classical extractor's final stage. Exact
//! acceptance and expected-game-value computations are provided so the
//! closeness of the extracted tables to the quantum strategy can be
//! checked without sampling noise.

use crate::error::{CoreError, Result};
use crate::graph::GraphInstance;
use crate::numeric::{rat_to_f64, Rat};
use crate::protocols::three_col::{
    dg_pair_mass, dg_triple_mass, question_count, threecol_2p_verify, threecol_3p_verify,
    EdgeAnswer, Question, TableStrategy,
};
use crate::quantum::{lift, trace_re, CMat, ProjectorFamily, StateVector};
use rand::Rng;
use serde::Serialize;

/// A prover that answers coloring questions and can be rewound by
/// snapshot (classical state copy).
pub trait ColProver: Clone {
    fn answer(&mut self, q: Question) -> EdgeAnswer;
}

impl ColProver for TableStrategy {
    fn answer(&mut self, q: Question) -> EdgeAnswer {
        TableStrategy::answer(self, q)
    }
}

/// Extraction output: a full vertex marking plus bookkeeping.
#[derive(Debug, Clone, Serialize)]
pub struct ColExtraction {
    pub coloring: Vec<u8>,
    pub proper: bool,
    pub question_marked: Vec<bool>,
}

/// Sweep all question pairs in the support, rewinding both provers
/// between pairs, and assemble a coloring from the marks.
pub fn extract_3col_classical<P1, P2>(
    graph: &GraphInstance,
    prover1: &mut P1,
    prover2: &mut P2,
    eps: Rat,
) -> ColExtraction
where
    P1: ColProver,
    P2: ColProver,
{
    let n = graph.num_vertices();
    let mut marks: Vec<Option<u8>> = vec![None; n];
    let mut question_marked = vec![false; n];
    let mut recorded: Vec<Vec<u8>> = vec![Vec::new(); n];

    for (&(q1, q2), _mass) in dg_pair_mass(graph, eps).iter() {
        let snap1 = crate::sigma::RewindableHandle::capture(prover1);
        let snap2 = crate::sigma::RewindableHandle::capture(prover2);
        let a1 = prover1.answer(q1);
        let a2 = prover2.answer(q2);
        snap1.restore(prover1);
        snap2.restore(prover2);

        if q1.edge == q2.edge && q1.b != q2.b {
            // Edge-verification test.
            if threecol_2p_verify(graph, q1, q2, a1, a2) {
                let e = graph.edge(q1.edge);
                let colors = [(e.0, (a1.first + a2.first) % 3), (e.1, (a1.second + a2.second) % 3)];
                let conflict = colors
                    .iter()
                    .any(|&(v, c)| marks[v].map_or(false, |m| m != c));
                for &(v, c) in &colors {
                    recorded[v].push(c);
                    if marks[v].is_none() {
                        marks[v] = Some(c);
                    }
                }
                if conflict {
                    for &(v, _) in &colors {
                        question_marked[v] = true;
                    }
                }
            }
        } else if q1.b == q2.b {
            // Well-definition test: a mismatch taints the shared vertex.
            let e1 = graph.edge(q1.edge);
            let e2 = graph.edge(q2.edge);
            for v in e1.shared_vertices(&e2) {
                let l1 = a1.label_at(graph, q1, v);
                let l2 = a2.label_at(graph, q2, v);
                if l1 != l2 {
                    question_marked[v] = true;
                }
            }
        }
    }

    let coloring: Vec<u8> = (0..n)
        .map(|v| {
            if question_marked[v] {
                majority_color(&recorded[v])
            } else {
                marks[v].unwrap_or(0)
            }
        })
        .collect();
    let proper = graph.is_proper_coloring(&coloring);
    ColExtraction {
        coloring,
        proper,
        question_marked,
    }
}

/// Majority of the recorded colors; ties and empty records resolve to the
/// lowest color index.
fn majority_color(recorded: &[u8]) -> u8 {
    let mut counts = [0usize; 3];
    for &c in recorded {
        counts[c as usize] += 1;
    }
    let best = *counts.iter().max().unwrap();
    counts.iter().position(|&c| c == best).unwrap() as u8
}

// ---------------------------------------------------------------------------
// Quantum strategies and their extractor
// ---------------------------------------------------------------------------

/// Tripartite quantum strategy: shared state and one complete projector
/// family per prover per question, with outcomes indexed by answer pairs
/// (`outcome = 3 * first + second`).
#[derive(Debug, Clone)]
pub struct ThreeColQuantumSpec {
    pub local_dims: [usize; 3],
    pub initial: StateVector,
    /// `families[prover][question_index]`, each on that prover's factor.
    pub families: [Vec<ProjectorFamily>; 3],
}

pub const ANSWER_OUTCOMES: usize = 9;

pub fn answer_from_outcome(outcome: usize) -> EdgeAnswer {
    EdgeAnswer {
        first: (outcome / 3) as u8,
        second: (outcome % 3) as u8,
    }
}

pub fn outcome_from_answer(a: EdgeAnswer) -> usize {
    3 * a.first as usize + a.second as usize
}

impl ThreeColQuantumSpec {
    pub fn validate(&self, graph: &GraphInstance) -> Result<()> {
        let total: usize = self.local_dims.iter().product();
        if self.initial.dim() != total {
            return Err(CoreError::Dimension(
                "state must live on the product of the local factors".into(),
            ));
        }
        if self.local_dims.iter().any(|&d| d > 4) {
            return Err(CoreError::Capacity("local dimensions above 4".into()));
        }
        let nq = question_count(graph);
        for (p, fams) in self.families.iter().enumerate() {
            if fams.len() != nq {
                return Err(CoreError::Dimension(format!(
                    "prover {p} needs one family per question"
                )));
            }
            for fam in fams {
                if fam.dim() != self.local_dims[p] || fam.len() != ANSWER_OUTCOMES {
                    return Err(CoreError::Dimension(format!(
                        "prover {p} families must have {ANSWER_OUTCOMES} outcomes on its factor"
                    )));
                }
                fam.validate_complete()?;
            }
        }
        Ok(())
    }

    /// Product-state embedding of a deterministic shared table: trivial
    /// one-dimensional registers whose only outcome is the table answer.
    pub fn embed_table(graph: &GraphInstance, table: &TableStrategy) -> Self {
        let nq = question_count(graph);
        let families: Vec<ProjectorFamily> = (0..nq)
            .map(|i| {
                let target = outcome_from_answer(table.answer(Question::from_index(i)));
                let projectors: Vec<CMat> = (0..ANSWER_OUTCOMES)
                    .map(|o| {
                        if o == target {
                            CMat::identity(1, 1)
                        } else {
                            CMat::zeros(1, 1)
                        }
                    })
                    .collect();
                ProjectorFamily::new_unchecked(projectors)
            })
            .collect();
        ThreeColQuantumSpec {
            local_dims: [1, 1, 1],
            initial: StateVector::basis(1, 0),
            families: [families.clone(), families.clone(), families],
        }
    }

    /// Diagonal strategy over a basis of labeling tables: prover registers
    /// index into `tables`, measurement projects onto the tables giving
    /// each answer.
    pub fn table_basis(
        graph: &GraphInstance,
        tables: &[TableStrategy],
        initial: StateVector,
    ) -> Result<Self> {
        let d = tables.len();
        if d == 0 || d > 4 {
            return Err(CoreError::Capacity("need 1 to 4 basis tables".into()));
        }
        let nq = question_count(graph);
        let families: Vec<ProjectorFamily> = (0..nq)
            .map(|i| {
                let q = Question::from_index(i);
                let projectors: Vec<CMat> = (0..ANSWER_OUTCOMES)
                    .map(|o| {
                        let mut p = CMat::zeros(d, d);
                        for (t, table) in tables.iter().enumerate() {
                            if outcome_from_answer(table.answer(q)) == o {
                                p[(t, t)] = crate::quantum::C64::new(1.0, 0.0);
                            }
                        }
                        p
                    })
                    .collect();
                ProjectorFamily::new_unchecked(projectors)
            })
            .collect();
        let spec = ThreeColQuantumSpec {
            local_dims: [d, d, d],
            initial,
            families: [families.clone(), families.clone(), families],
        };
        spec.validate(graph)?;
        Ok(spec)
    }
}

/// Result of the quantum extraction phase: the two recorded tables and
/// the classical extraction they induce.
#[derive(Debug, Clone, Serialize)]
pub struct QuantumColExtraction {
    pub f1: TableStrategy,
    pub f2: TableStrategy,
    pub extraction: ColExtraction,
}

/// Interrogate the first two provers question by question (both bits of
/// each edge in order), collapsing the shared state as measurements
/// happen, then run the classical extractor on the recorded tables.
pub fn extract_3col_quantum<R: Rng>(
    graph: &GraphInstance,
    spec: &ThreeColQuantumSpec,
    eps: Rat,
    rng: &mut R,
) -> Result<QuantumColExtraction> {
    spec.validate(graph)?;
    let dims = &spec.local_dims;
    let dims_slice = [dims[0], dims[1], dims[2]];
    let mut rho = spec.initial.density().matrix().clone();
    let nq = question_count(graph);

    let mut record_phase = |prover: usize, rho: &mut CMat, rng: &mut R| -> Vec<EdgeAnswer> {
        let mut answers = Vec::with_capacity(nq);
        for qi in 0..nq {
            let fam = &spec.families[prover][qi];
            let lifted: Vec<CMat> = fam.iter().map(|w| lift(w, &dims_slice, prover)).collect();
            let probs: Vec<f64> = lifted
                .iter()
                .map(|w| trace_re(&(w * &*rho)).max(0.0))
                .collect();
            let outcome = sample_outcome(&probs, rng);
            let w = &lifted[outcome];
            let collapsed = w * &*rho * w;
            let p = trace_re(&collapsed);
            *rho = collapsed.unscale(p);
            answers.push(answer_from_outcome(outcome));
        }
        answers
    };

    let f1 = TableStrategy {
        answers: record_phase(0, &mut rho, rng),
    };
    let f2 = TableStrategy {
        answers: record_phase(1, &mut rho, rng),
    };
    let extraction = extract_3col_classical(graph, &mut f1.clone(), &mut f2.clone(), eps);
    Ok(QuantumColExtraction { f1, f2, extraction })
}

fn sample_outcome<R: Rng>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let mut draw = rng.gen::<f64>() * total;
    let mut pick = probs.len() - 1;
    for (i, p) in probs.iter().enumerate() {
        if draw < *p {
            pick = i;
            break;
        }
        draw -= p;
    }
    while probs[pick] <= 0.0 && pick > 0 {
        pick -= 1;
    }
    pick
}

/// Exact acceptance probability of the three-prover game for a quantum
/// strategy: sum over question triples and accepted answer triples of the
/// Born probabilities.
pub fn exact_acceptance_3p_quantum(
    graph: &GraphInstance,
    eps: Rat,
    spec: &ThreeColQuantumSpec,
) -> Result<f64> {
    spec.validate(graph)?;
    let dims = [spec.local_dims[0], spec.local_dims[1], spec.local_dims[2]];
    let psi = spec.initial.vector();
    let mut acceptance = 0.0;
    for (qs, mass) in dg_triple_mass(graph, eps) {
        let mass = rat_to_f64(&mass);
        if mass == 0.0 {
            continue;
        }
        for a1 in 0..ANSWER_OUTCOMES {
            let w1 = lift(spec.families[0][qs[0].index()].projector(a1), &dims, 0);
            let v1 = &w1 * psi;
            if v1.norm_squared() < 1e-18 {
                continue;
            }
            for a2 in 0..ANSWER_OUTCOMES {
                let w2 = lift(spec.families[1][qs[1].index()].projector(a2), &dims, 1);
                let v2 = &w2 * &v1;
                if v2.norm_squared() < 1e-18 {
                    continue;
                }
                for a3 in 0..ANSWER_OUTCOMES {
                    let ans = [
                        answer_from_outcome(a1),
                        answer_from_outcome(a2),
                        answer_from_outcome(a3),
                    ];
                    if !threecol_3p_verify(graph, qs, ans) {
                        continue;
                    }
                    let w3 = lift(spec.families[2][qs[2].index()].projector(a3), &dims, 2);
                    acceptance += mass * (&w3 * &v2).norm_squared();
                }
            }
        }
    }
    Ok(acceptance)
}

/// Exact expected two-prover game value of the tables the extractor
/// records: the answer to question `i` on one side and `j` on the other
/// is distributed according to the state collapsed by all earlier
/// questions of that side, which is what sequential interrogation
/// produces.
pub fn expected_extracted_game_value(
    graph: &GraphInstance,
    eps: Rat,
    spec: &ThreeColQuantumSpec,
) -> Result<f64> {
    spec.validate(graph)?;
    let dims = [spec.local_dims[0], spec.local_dims[1], spec.local_dims[2]];
    let nq = question_count(graph);
    let masses = dg_pair_mass(graph, eps);
    let rho0 = spec.initial.density().matrix().clone();

    // Side-1 collapse prefix states.
    let mut side1_states = Vec::with_capacity(nq);
    {
        let mut rho = rho0.clone();
        for qi in 0..nq {
            side1_states.push(rho.clone());
            rho = apply_superop(&rho, &spec.families[0][qi], &dims, 0);
        }
    }

    let mut value = 0.0;
    for (i, rho_i) in side1_states.iter().enumerate() {
        let qi = Question::from_index(i);
        let mut rho = rho_i.clone();
        for j in 0..nq {
            let qj = Question::from_index(j);
            if let Some(mass) = masses.get(&(qi, qj)) {
                let mass = rat_to_f64(mass);
                for a1 in 0..ANSWER_OUTCOMES {
                    let w1 = lift(spec.families[0][i].projector(a1), &dims, 0);
                    let partial = &w1 * &rho * &w1;
                    for a2 in 0..ANSWER_OUTCOMES {
                        if !threecol_2p_verify(
                            graph,
                            qi,
                            qj,
                            answer_from_outcome(a1),
                            answer_from_outcome(a2),
                        ) {
                            continue;
                        }
                        let w2 = lift(spec.families[1][j].projector(a2), &dims, 1);
                        value += mass * trace_re(&(&w2 * &partial)).max(0.0);
                    }
                }
            }
            rho = apply_superop(&rho, &spec.families[1][j], &dims, 1);
        }
    }
    Ok(value)
}

fn apply_superop(
    rho: &CMat,
    family: &ProjectorFamily,
    dims: &[usize; 3],
    site: usize,
) -> CMat {
    let mut out = CMat::zeros(rho.nrows(), rho.ncols());
    for w in family.iter() {
        let lw = lift(w, dims, site);
        out += &lw * rho * &lw;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::stream_rng;
    use crate::protocols::three_col::Labeling;
    use crate::quantum::{CVec, C64};

    fn third() -> Rat {
        Rat::new(1, 3)
    }

    fn k3() -> GraphInstance {
        GraphInstance::complete(3)
    }

    fn honest_table(graph: &GraphInstance, seed: u64) -> TableStrategy {
        let coloring: Vec<u8> = (0..graph.num_vertices()).map(|v| (v % 3) as u8).collect();
        let labeling = Labeling::random_for_coloring(&coloring, &mut stream_rng(60, seed));
        TableStrategy::from_labeling(graph, &labeling)
    }

    #[test]
    fn honest_tables_extract_a_proper_coloring() {
        let g = k3();
        for seed in 0..20 {
            let f = honest_table(&g, seed);
            let out = extract_3col_classical(&g, &mut f.clone(), &mut f.clone(), third());
            assert!(out.proper, "seed {seed}");
            assert!(out.question_marked.iter().all(|&m| !m));
        }
    }

    #[test]
    fn corrupted_vertex_is_question_marked_and_others_recover() {
        let g = GraphInstance::complete(3);
        let f1 = honest_table(&g, 3);
        // Second prover disagrees on vertex 0's label for b = 0.
        let mut f2 = f1.clone();
        for qi in 0..question_count(&g) {
            let q = Question::from_index(qi);
            let e = g.edge(q.edge);
            if q.b == 0 && e.0 == 0 {
                f2.answers[qi].first = (f2.answers[qi].first + 1) % 3;
            }
        }
        let out = extract_3col_classical(&g, &mut f1.clone(), &mut f2, third());
        assert!(out.question_marked[0]);
        assert!(!out.question_marked[2]);
    }

    #[test]
    fn k4_never_yields_a_proper_coloring() {
        let g = GraphInstance::complete(4);
        let mut rng = stream_rng(61, 0);
        for _ in 0..20 {
            let f1 = TableStrategy::random(&g, &mut rng);
            let f2 = TableStrategy::random(&g, &mut rng);
            let out = extract_3col_classical(&g, &mut f1.clone(), &mut f2.clone(), third());
            assert!(!out.proper);
        }
    }

    #[test]
    fn product_embedding_extracts_the_table() {
        let g = k3();
        let table = honest_table(&g, 7);
        let spec = ThreeColQuantumSpec::embed_table(&g, &table);
        let out = extract_3col_quantum(&g, &spec, third(), &mut stream_rng(62, 0)).unwrap();
        assert_eq!(out.f1, table);
        assert_eq!(out.f2, table);
        assert!(out.extraction.proper);
    }

    #[test]
    fn ghz_table_superposition_collapses_consistently() {
        let g = k3();
        let t0 = honest_table(&g, 11);
        let t1 = honest_table(&g, 12);
        // (|000> + |111>)/sqrt(2) over the two-table basis.
        let mut v = CVec::zeros(8);
        let amp = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        v[0] = amp;
        v[7] = amp;
        let spec = ThreeColQuantumSpec::table_basis(
            &g,
            &[t0.clone(), t1.clone()],
            StateVector::new(v).unwrap(),
        )
        .unwrap();
        let p = exact_acceptance_3p_quantum(&g, third(), &spec).unwrap();
        assert!((p - 1.0).abs() < 1e-10, "acceptance {p}");
        for seed in 0..10 {
            let out = extract_3col_quantum(&g, &spec, third(), &mut stream_rng(63, seed)).unwrap();
            // The first measurement collapses the branch; both recorded
            // tables agree and extraction succeeds.
            assert_eq!(out.f1, out.f2);
            assert!(out.extraction.proper);
        }
    }

    #[test]
    fn extracted_value_matches_acceptance_for_unentangled_tables() {
        let g = k3();
        let table = honest_table(&g, 21);
        let spec = ThreeColQuantumSpec::embed_table(&g, &table);
        let p3 = exact_acceptance_3p_quantum(&g, third(), &spec).unwrap();
        let v2 = expected_extracted_game_value(&g, third(), &spec).unwrap();
        assert!((p3 - 1.0).abs() < 1e-10);
        assert!((v2 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn closeness_bound_holds_for_perturbed_superpositions() {
        // Entangled strategies mixing two tables plus a small cross term:
        // |E[value] - p| stays within 16 |H| sqrt(1 - p).
        let g = k3();
        let t0 = honest_table(&g, 31);
        let t1 = honest_table(&g, 32);
        for (amp_main, amp_cross) in [(0.999f64, 0.0447f64), (0.99, 0.141), (0.95, 0.312)] {
            let mut v = CVec::zeros(8);
            let a = C64::new(amp_main / 2f64.sqrt(), 0.0);
            v[0] = a;
            v[7] = a;
            // Cross branch: prover 2 draws from the other table.
            v[0b010] = C64::new(amp_cross, 0.0);
            let spec = ThreeColQuantumSpec::table_basis(
                &g,
                &[t0.clone(), t1.clone()],
                StateVector::normalized(v).unwrap(),
            )
            .unwrap();
            let p = exact_acceptance_3p_quantum(&g, third(), &spec).unwrap();
            let v2 = expected_extracted_game_value(&g, third(), &spec).unwrap();
            let delta = 16.0 * g.num_edges() as f64 * (1.0 - p).max(0.0).sqrt();
            assert!(
                (v2 - p).abs() <= delta + 1e-9,
                "p {p}, value {v2}, delta {delta}"
            );
        }
    }
}
