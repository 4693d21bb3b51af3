//! Canonical rewinding extractor for quantum provers.
//!
//! The provers are a shared state with a per-`rand` activation unitary and
//! a commitment measurement on the first register, and a per-challenge
//! activation unitary and response measurement on the second. Rewinding
//! the responder is the adjoint of its activation unitary: the extractor
//! measures the first response, un-applies the challenge unitary, applies
//! the other challenge's unitary and measures again.
//!
//! Because desk-scale dimensions make it feasible, the extractor computes
//! the exact probability of every branch `(rand, com, ch, resp, ch',
//! resp')` alongside a sampled run, so acceptance tests work with exact
//! values instead of Monte-Carlo noise.

use crate::error::{CoreError, Result};
use crate::quantum::{identity, lift, max_abs, CMat, CVec, ProjectorFamily, StateVector};
use rand::Rng;
use serde::Serialize;

/// A two-prover quantum strategy for a sigma-style protocol with message
/// spaces encoded as measurement-outcome indices.
#[derive(Debug, Clone)]
pub struct QuantumProverSpec {
    pub dim1: usize,
    pub dim2: usize,
    /// Joint initial state on `dim1 * dim2`.
    pub initial: StateVector,
    /// One activation unitary per `rand` value, acting on register 1.
    pub rand_unitaries: Vec<CMat>,
    /// Commitment measurement on register 1; outcome index = `com`.
    pub com_family: ProjectorFamily,
    /// One activation unitary per challenge, acting on register 2.
    pub ch_unitaries: Vec<CMat>,
    /// Response measurement on register 2; outcome index = `resp`.
    pub resp_family: ProjectorFamily,
}

impl QuantumProverSpec {
    pub fn validate(&self) -> Result<()> {
        if self.initial.dim() != self.dim1 * self.dim2 {
            return Err(CoreError::Dimension(
                "initial state must live on dim1 * dim2".into(),
            ));
        }
        for (tag, us, d) in [
            ("rand", &self.rand_unitaries, self.dim1),
            ("challenge", &self.ch_unitaries, self.dim2),
        ] {
            if us.is_empty() {
                return Err(CoreError::Operator(format!("no {tag} unitaries")));
            }
            for u in us {
                if u.shape() != (d, d) {
                    return Err(CoreError::Dimension(format!(
                        "{tag} unitary must be {d} x {d}"
                    )));
                }
                if max_abs(&(u * u.adjoint() - identity(d))) > 1e-10 {
                    return Err(CoreError::Operator(format!("{tag} map is not unitary")));
                }
            }
        }
        if self.com_family.dim() != self.dim1 || self.resp_family.dim() != self.dim2 {
            return Err(CoreError::Dimension(
                "measurement families must match their register".into(),
            ));
        }
        self.com_family.validate_complete()?;
        self.resp_family.validate_complete()?;
        Ok(())
    }
}

/// Classical protocol semantics over outcome indices: what accepts, what
/// `K0` returns, and what counts as a witness.
pub trait ExtractionTarget {
    type Witness: Clone;

    fn num_rand(&self) -> usize;
    fn num_challenges(&self) -> usize;
    fn accepts(&self, rand: usize, com: usize, ch: usize, resp: usize) -> bool;
    fn extract(
        &self,
        rand: usize,
        com: usize,
        ch1: usize,
        resp1: usize,
        ch2: usize,
        resp2: usize,
    ) -> Option<Self::Witness>;
    fn witness_valid(&self, witness: &Self::Witness) -> bool;
    /// The field modulus of the underlying commitment, if any; feeds the
    /// special-soundness parameter `1 / (q * p_acc)`.
    fn binding_modulus(&self) -> Option<u64>;
}

/// One row of the exact probability ledger.
#[derive(Debug, Clone, Serialize)]
pub struct BranchRecord {
    pub rand: usize,
    pub com: usize,
    pub ch1: usize,
    pub resp1: usize,
    pub ch2: usize,
    pub resp2: usize,
    pub probability: f64,
    pub accept_first: bool,
    pub accept_second: bool,
    pub witness_valid: bool,
}

/// Full output of a quantum extraction: the sampled witness plus the
/// exact ledger and the knowledge-error bound it is compared against.
#[derive(Debug, Clone, Serialize)]
pub struct QuantumExtractionReport<W> {
    pub witness: Option<W>,
    /// Exact probability that both conversations accept and `K0` outputs
    /// a valid witness.
    pub success_probability: f64,
    /// Exact single-conversation acceptance of an honest verifier.
    pub acceptance_probability: f64,
    /// Exact probability that both conversations accept.
    pub pair_acceptance: f64,
    pub delta_ss: f64,
    pub ra_max: usize,
    /// `(1 - delta_ss) / (64 ra_max) * (p - 1/c)^3`, clipped at zero.
    pub bound_rhs: f64,
    pub branch_ledger: Vec<BranchRecord>,
}

fn weighted_choice<R: Rng>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut draw = rng.gen::<f64>() * total;
    let mut pick = weights.len() - 1;
    for (i, w) in weights.iter().enumerate() {
        if draw < *w {
            pick = i;
            break;
        }
        draw -= w;
    }
    while weights[pick] <= 0.0 && pick > 0 {
        pick -= 1;
    }
    pick
}

/// Run the canonical extractor: exact branch enumeration plus one sampled
/// trajectory through it.
pub fn canonical_extract_quantum<T, R>(
    target: &T,
    spec: &QuantumProverSpec,
    rng: &mut R,
) -> Result<QuantumExtractionReport<T::Witness>>
where
    T: ExtractionTarget,
    R: Rng,
{
    spec.validate()?;
    let num_rand = target.num_rand();
    let c = target.num_challenges();
    if spec.rand_unitaries.len() != num_rand || spec.ch_unitaries.len() != c {
        return Err(CoreError::Dimension(
            "spec unitary counts must match the protocol".into(),
        ));
    }
    if c < 2 {
        return Err(CoreError::Range("need at least two challenges".into()));
    }
    let dims = [spec.dim1, spec.dim2];
    let rand_weight = 1.0 / num_rand as f64;
    let pair_weight = rand_weight / (c * (c - 1)) as f64;
    let single_weight = rand_weight / c as f64;

    let lifted_com: Vec<CMat> = spec.com_family.iter().map(|w| lift(w, &dims, 0)).collect();
    let lifted_resp: Vec<CMat> = spec.resp_family.iter().map(|w| lift(w, &dims, 1)).collect();
    let lifted_ch: Vec<CMat> = spec.ch_unitaries.iter().map(|u| lift(u, &dims, 1)).collect();

    let mut ledger = Vec::new();
    let mut acceptance = 0.0;
    let mut pair_acceptance = 0.0;
    let mut success = 0.0;
    let mut ra_max = 0usize;

    for rand in 0..num_rand {
        let activated = lift(&spec.rand_unitaries[rand], &dims, 0) * spec.initial.vector();
        for com in 0..lifted_com.len() {
            let committed = &lifted_com[com] * &activated;
            if committed.norm_squared() < 1e-18 {
                continue;
            }
            // Honest-verifier acceptance chain (single challenge).
            for ch in 0..c {
                let mut accepting_responses = 0usize;
                let answered = &lifted_ch[ch] * &committed;
                for resp in 0..lifted_resp.len() {
                    if target.accepts(rand, com, ch, resp) {
                        accepting_responses += 1;
                        let projected = &lifted_resp[resp] * &answered;
                        acceptance += single_weight * projected.norm_squared();
                    }
                }
                ra_max = ra_max.max(accepting_responses);
            }
            // Extraction chain: measure, rewind by adjoint, re-activate.
            for ch1 in 0..c {
                let forward = &lifted_ch[ch1] * &committed;
                for resp1 in 0..lifted_resp.len() {
                    let measured = &lifted_resp[resp1] * &forward;
                    if measured.norm_squared() < 1e-18 {
                        continue;
                    }
                    let rewound = lifted_ch[ch1].adjoint() * &measured;
                    for ch2 in 0..c {
                        if ch2 == ch1 {
                            continue;
                        }
                        let forward2 = &lifted_ch[ch2] * &rewound;
                        for resp2 in 0..lifted_resp.len() {
                            let p = pair_weight
                                * (&lifted_resp[resp2] * &forward2).norm_squared();
                            if p < 1e-18 {
                                continue;
                            }
                            let accept_first = target.accepts(rand, com, ch1, resp1);
                            let accept_second = target.accepts(rand, com, ch2, resp2);
                            let witness_valid = accept_first
                                && accept_second
                                && target
                                    .extract(rand, com, ch1, resp1, ch2, resp2)
                                    .map_or(false, |w| target.witness_valid(&w));
                            if accept_first && accept_second {
                                pair_acceptance += p;
                            }
                            if witness_valid {
                                success += p;
                            }
                            ledger.push(BranchRecord {
                                rand,
                                com,
                                ch1,
                                resp1,
                                ch2,
                                resp2,
                                probability: p,
                                accept_first,
                                accept_second,
                                witness_valid,
                            });
                        }
                    }
                }
            }
        }
    }

    let delta_ss = match target.binding_modulus() {
        Some(q) if pair_acceptance > 0.0 => 1.0 / (q as f64 * pair_acceptance),
        Some(_) => 1.0,
        None => 0.0,
    };
    let bound_rhs = crate::bounds::qpok_extraction_lower(
        acceptance,
        c as u64,
        delta_ss,
        ra_max.max(1) as u64,
    );

    let witness = sample_trajectory(target, spec, &lifted_com, &lifted_resp, &lifted_ch, rng);

    Ok(QuantumExtractionReport {
        witness,
        success_probability: success,
        acceptance_probability: acceptance,
        pair_acceptance,
        delta_ss,
        ra_max,
        bound_rhs,
        branch_ledger: ledger,
    })
}

fn sample_trajectory<T, R>(
    target: &T,
    spec: &QuantumProverSpec,
    lifted_com: &[CMat],
    lifted_resp: &[CMat],
    lifted_ch: &[CMat],
    rng: &mut R,
) -> Option<T::Witness>
where
    T: ExtractionTarget,
    R: Rng,
{
    let dims = [spec.dim1, spec.dim2];
    let c = target.num_challenges();
    let rand = rng.gen_range(0..target.num_rand());
    let state = lift(&spec.rand_unitaries[rand], &dims, 0) * spec.initial.vector();

    let com_probs: Vec<f64> = lifted_com.iter().map(|w| (w * &state).norm_squared()).collect();
    let com = weighted_choice(&com_probs, rng);
    let state = {
        let v = &lifted_com[com] * &state;
        let n = v.norm();
        if n < 1e-12 {
            return None;
        }
        v.unscale(n)
    };

    let ch1 = rng.gen_range(0..c);
    let ch2 = {
        let j = rng.gen_range(0..c - 1);
        if j >= ch1 {
            j + 1
        } else {
            j
        }
    };
    let forward = &lifted_ch[ch1] * &state;
    let resp_probs: Vec<f64> = lifted_resp
        .iter()
        .map(|w| (w * &forward).norm_squared())
        .collect();
    let resp1 = weighted_choice(&resp_probs, rng);
    let measured = &lifted_resp[resp1] * &forward;
    let n = measured.norm();
    if n < 1e-12 {
        return None;
    }
    let rewound = lifted_ch[ch1].adjoint() * measured.unscale(n);
    let forward2 = &lifted_ch[ch2] * rewound;
    let resp2_probs: Vec<f64> = lifted_resp
        .iter()
        .map(|w| (w * &forward2).norm_squared())
        .collect();
    let resp2 = weighted_choice(&resp2_probs, rng);

    if target.accepts(rand, com, ch1, resp1) && target.accepts(rand, com, ch2, resp2) {
        target.extract(rand, com, ch1, resp1, ch2, resp2)
    } else {
        None
    }
}

/// Unnormalized joint state after the rewinding step for one branch,
/// computed by the step sequence (activate, project, un-apply). Exposed
/// so the state algebra can be cross-checked against the closed form
/// `(U* W U) sigma (U* W U)`.
pub fn step5_state(
    spec: &QuantumProverSpec,
    rand: usize,
    com: usize,
    ch: usize,
    resp: usize,
) -> CMat {
    let dims = [spec.dim1, spec.dim2];
    let activated = lift(&spec.rand_unitaries[rand], &dims, 0) * spec.initial.vector();
    let committed = lift(spec.com_family.projector(com), &dims, 0) * activated;
    let u = lift(&spec.ch_unitaries[ch], &dims, 1);
    let w = lift(spec.resp_family.projector(resp), &dims, 1);
    let v = u.adjoint() * w * u * committed;
    &v * v.adjoint()
}

// ---------------------------------------------------------------------------
// Unitary prover with adjoint rewinding
// ---------------------------------------------------------------------------

/// A quantum machine driven by recorded unitary activations. Rewinding
/// applies the adjoint of the most recent activation, which restores the
/// pre-activation state exactly when no measurement intervened and the
/// projected image of it otherwise.
#[derive(Debug, Clone)]
pub struct UnitaryProver {
    state: CVec,
    history: Vec<CMat>,
}

impl UnitaryProver {
    pub fn new(state: StateVector) -> Self {
        UnitaryProver {
            state: state.into_vector(),
            history: Vec::new(),
        }
    }

    pub fn state(&self) -> &CVec {
        &self.state
    }

    pub fn activate(&mut self, u: &CMat) -> Result<()> {
        let d = self.state.len();
        if u.shape() != (d, d) {
            return Err(CoreError::Dimension("activation dimension mismatch".into()));
        }
        if max_abs(&(u * u.adjoint() - identity(d))) > 1e-10 {
            return Err(CoreError::Operator("activation must be unitary".into()));
        }
        self.state = u * &self.state;
        self.history.push(u.clone());
        Ok(())
    }

    /// Projective measurement in place; the record stays, so a subsequent
    /// rewind un-applies the activation around the collapsed state.
    pub fn measure<R: Rng>(&mut self, family: &ProjectorFamily, rng: &mut R) -> Result<usize> {
        family.validate_complete()?;
        let probs: Vec<f64> = family.iter().map(|w| (w * &self.state).norm_squared()).collect();
        let outcome = weighted_choice(&probs, rng);
        let v = family.projector(outcome) * &self.state;
        let n = v.norm();
        if n < 1e-12 {
            return Err(CoreError::Domain("measured a zero-probability branch".into()));
        }
        self.state = v.unscale(n);
        Ok(outcome)
    }

    /// Apply the adjoint of the last recorded activation.
    pub fn rewind(&mut self) -> Result<()> {
        let u = self
            .history
            .pop()
            .ok_or_else(|| CoreError::Protocol("rewinding past the initial state".into()))?;
        self.state = u.adjoint() * &self.state;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::stream_rng;
    use crate::quantum::random::haar_unitary;

    #[test]
    fn rewind_without_measurement_restores_the_state() {
        let mut rng = stream_rng(50, 0);
        let psi = crate::quantum::random::random_pure_state(8, &mut rng);
        let mut prover = UnitaryProver::new(psi.clone());
        let u = haar_unitary(8, &mut rng);
        prover.activate(&u).unwrap();
        prover.rewind().unwrap();
        let diff: f64 = (prover.state() - psi.vector()).norm();
        assert!(diff < 1e-12);
    }

    #[test]
    fn rewind_after_measurement_is_the_projected_image() {
        let mut rng = stream_rng(51, 0);
        let psi = crate::quantum::random::random_pure_state(4, &mut rng);
        let u = haar_unitary(4, &mut rng);
        let fam = crate::quantum::random::random_projector_family(4, 2, 4, &mut rng);
        let mut prover = UnitaryProver::new(psi.clone());
        prover.activate(&u).unwrap();
        let outcome = prover.measure(&fam, &mut rng).unwrap();
        prover.rewind().unwrap();
        // Direct computation of U* W U |psi| (normalized).
        let expected = {
            let v = u.adjoint() * fam.projector(outcome) * &u * psi.vector();
            let n = v.norm();
            v.unscale(n)
        };
        // States match up to a global phase; compare projectors.
        let got = prover.state() * prover.state().adjoint();
        let want = &expected * expected.adjoint();
        assert!(max_abs(&(got - want)) < 1e-10);
    }

    #[test]
    fn rewind_past_start_errors() {
        let mut prover = UnitaryProver::new(StateVector::basis(2, 0));
        assert!(prover.rewind().is_err());
    }
}
