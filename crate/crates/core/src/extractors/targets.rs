//! Concrete extraction targets for the quantum canonical extractor:
//! the subset-sum protocol with its messages encoded as measurement
//! outcomes, and a synthetic acceptance-table target for randomized
//! stress tests. Builders produce honest, partially-cheating and
//! superposed prover specifications at desk-scale dimensions.

use super::quantum::{ExtractionTarget, QuantumProverSpec};
use crate::error::{CoreError, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::protocols::subset_sum::{
    subset_commit, subset_respond, SubsetCommitment, SubsetResponse, SubsetSumInstance,
    SubsetSumProtocol, SubsetWitness,
};
use crate::quantum::{random::haar_unitary, CMat, CVec, ProjectorFamily, StateVector, C64};
use crate::sigma::Check;
use crate::sigma::SigmaProtocol;
use rand::Rng;

fn computational_family(dim: usize) -> ProjectorFamily {
    let projectors = (0..dim)
        .map(|i| {
            let mut p = CMat::zeros(dim, dim);
            p[(i, i)] = C64::new(1.0, 0.0);
            p
        })
        .collect();
    ProjectorFamily::new_unchecked(projectors)
}

fn permutation_sending_zero_to(dim: usize, target: usize) -> CMat {
    let mut u = CMat::identity(dim, dim);
    if target != 0 {
        u[(0, 0)] = C64::new(0.0, 0.0);
        u[(target, target)] = C64::new(0.0, 0.0);
        u[(0, target)] = C64::new(1.0, 0.0);
        u[(target, 0)] = C64::new(1.0, 0.0);
    }
    u
}

/// Single-element subset-sum instance with outcome-index encodings:
/// `com = w0 * q + w1`, challenge-0 responses `z + 2 (c0 + q c1)`,
/// challenge-1 responses `x + 2 c'`.
#[derive(Debug, Clone)]
pub struct SubsetTarget {
    pub protocol: SubsetSumProtocol,
}

impl SubsetTarget {
    pub fn new(field: FieldSpec, s: u64, k: u64) -> Self {
        SubsetTarget {
            protocol: SubsetSumProtocol {
                field,
                instance: SubsetSumInstance {
                    s: vec![FieldElement(s % field.modulus())],
                    k: FieldElement(k % field.modulus()),
                },
            },
        }
    }

    fn q(&self) -> usize {
        self.protocol.field.modulus() as usize
    }

    pub fn com_dim(&self) -> usize {
        self.q() * self.q()
    }

    pub fn resp_dim(&self) -> usize {
        2 * self.q() * self.q()
    }

    pub fn com_index(&self, com: &SubsetCommitment) -> usize {
        com.w0[0].0 as usize * self.q() + com.w1[0].0 as usize
    }

    fn decode_com(&self, com: usize) -> SubsetCommitment {
        SubsetCommitment {
            w0: vec![FieldElement((com / self.q()) as u64)],
            w1: vec![FieldElement((com % self.q()) as u64)],
        }
    }

    pub fn resp0_index(&self, z: u8, c0: u64, c1: u64) -> usize {
        z as usize + 2 * (c0 as usize + self.q() * c1 as usize)
    }

    pub fn resp1_index(&self, x: u8, c_prime: u64) -> usize {
        x as usize + 2 * c_prime as usize
    }

    fn decode_resp(&self, ch: usize, resp: usize) -> Option<SubsetResponse> {
        let q = self.q() as u64;
        if ch == 0 {
            let z = (resp % 2) as u8;
            let rest = resp / 2;
            let c0 = (rest % self.q()) as u64;
            let c1 = (rest / self.q()) as u64;
            if c1 >= q {
                return None;
            }
            Some(SubsetResponse::Vectors {
                z: vec![z],
                c0: vec![FieldElement(c0)],
                c1: vec![FieldElement(c1)],
            })
        } else {
            let x = (resp % 2) as u8;
            let c_prime = (resp / 2) as u64;
            if c_prime >= q {
                return None;
            }
            Some(SubsetResponse::Masked {
                x: vec![x],
                c_prime: FieldElement(c_prime),
            })
        }
    }
}

impl ExtractionTarget for SubsetTarget {
    type Witness = Vec<u8>;

    fn num_rand(&self) -> usize {
        self.q()
    }

    fn num_challenges(&self) -> usize {
        2
    }

    fn accepts(&self, rand: usize, com: usize, ch: usize, resp: usize) -> bool {
        let Some(decoded) = self.decode_resp(ch, resp) else {
            return false;
        };
        let commitment = self.decode_com(com);
        self.protocol.verify(
            &FieldElement(rand as u64),
            &commitment,
            &(ch as u8),
            &decoded,
        ) == Check::Accept
    }

    fn extract(
        &self,
        _rand: usize,
        _com: usize,
        ch1: usize,
        resp1: usize,
        ch2: usize,
        resp2: usize,
    ) -> Option<Vec<u8>> {
        let first = self.decode_resp(ch1, resp1)?;
        let second = self.decode_resp(ch2, resp2)?;
        let (z, x) = match (&first, &second) {
            (SubsetResponse::Vectors { z, .. }, SubsetResponse::Masked { x, .. }) => (z, x),
            (SubsetResponse::Masked { x, .. }, SubsetResponse::Vectors { z, .. }) => (z, x),
            _ => return None,
        };
        super::classical::k0_subset(z, x).ok()
    }

    fn witness_valid(&self, witness: &Vec<u8>) -> bool {
        self.protocol
            .instance
            .witness_valid(self.protocol.field, witness)
    }

    fn binding_modulus(&self) -> Option<u64> {
        Some(self.protocol.field.modulus())
    }
}

/// Honest deterministic prover pair for a [`SubsetTarget`], embedded as
/// computational-basis permutation unitaries.
pub fn honest_subset_spec(target: &SubsetTarget, witness: &SubsetWitness) -> QuantumProverSpec {
    let field = target.protocol.field;
    let q = target.q();
    let dim1 = target.com_dim();
    let dim2 = target.resp_dim();
    let rand_unitaries = (0..q)
        .map(|a| {
            let com = subset_commit(
                field,
                &target.protocol.instance,
                witness,
                FieldElement(a as u64),
            );
            permutation_sending_zero_to(dim1, target.com_index(&com))
        })
        .collect();
    let ch_unitaries = (0..2)
        .map(|ch| {
            let idx = match subset_respond(field, witness, ch as u8) {
                SubsetResponse::Vectors { z, c0, c1 } => {
                    target.resp0_index(z[0], c0[0].0, c1[0].0)
                }
                SubsetResponse::Masked { x, c_prime } => target.resp1_index(x[0], c_prime.0),
            };
            permutation_sending_zero_to(dim2, idx)
        })
        .collect();
    QuantumProverSpec {
        dim1,
        dim2,
        initial: StateVector::basis(dim1 * dim2, 0),
        rand_unitaries,
        com_family: computational_family(dim1),
        ch_unitaries,
        resp_family: computational_family(dim2),
    }
}

/// Rotate the challenge-1 activation of an honest spec so only an
/// `angle`-dependent amplitude lands on the correct response; the rest
/// goes to an undecodable index. `angle = pi/2` is the pure one-branch
/// cheater with acceptance exactly 1/2.
pub fn one_branch_subset_spec(
    target: &SubsetTarget,
    witness: &SubsetWitness,
    angle: f64,
) -> QuantumProverSpec {
    let mut spec = honest_subset_spec(target, witness);
    let correct = match subset_respond(target.protocol.field, witness, 1) {
        SubsetResponse::Masked { x, c_prime } => target.resp1_index(x[0], c_prime.0),
        _ => unreachable!(),
    };
    // Highest index never decodes to an accepting challenge-1 response
    // for q >= 2 (c' out of range).
    let garbage = spec.dim2 - 1;
    let rot = rotation(spec.dim2, correct, garbage, angle);
    spec.ch_unitaries[1] = rot * &spec.ch_unitaries[1];
    spec
}

/// Superpose the challenge-0 response between the honest mask and the
/// complementary mask (which is also accepting whenever the committed
/// scalar multiplies out the same way); exercises the special-soundness
/// slack of the extractor.
pub fn superposed_subset_spec(
    target: &SubsetTarget,
    witness: &SubsetWitness,
    angle: f64,
) -> QuantumProverSpec {
    let mut spec = honest_subset_spec(target, witness);
    let honest_idx = match subset_respond(target.protocol.field, witness, 0) {
        SubsetResponse::Vectors { z, c0, c1 } => target.resp0_index(z[0], c0[0].0, c1[0].0),
        _ => unreachable!(),
    };
    let other_idx = match subset_respond(target.protocol.field, witness, 0) {
        SubsetResponse::Vectors { z, c0, c1 } => {
            target.resp0_index(1 - z[0], c0[0].0, c1[0].0)
        }
        _ => unreachable!(),
    };
    let rot = rotation(spec.dim2, honest_idx, other_idx, angle);
    spec.ch_unitaries[0] = rot * &spec.ch_unitaries[0];
    spec
}

fn rotation(dim: usize, i: usize, j: usize, angle: f64) -> CMat {
    let mut u = CMat::identity(dim, dim);
    let (c, s) = (angle.cos(), angle.sin());
    u[(i, i)] = C64::new(c, 0.0);
    u[(j, j)] = C64::new(c, 0.0);
    u[(j, i)] = C64::new(s, 0.0);
    u[(i, j)] = C64::new(-s, 0.0);
    u
}

/// Synthetic target: random acceptance table, witness defined as the
/// accepted response pair itself. `K0` never fails on accepting pairs, so
/// the extractor's exact success equals its pair acceptance and the
/// knowledge-bound comparison reduces to the consecutive-measurement
/// theorem itself.
#[derive(Debug, Clone)]
pub struct PairTarget {
    pub num_rand: usize,
    pub num_com: usize,
    pub num_ch: usize,
    pub num_resp: usize,
    accept: Vec<bool>,
}

impl PairTarget {
    pub fn random<R: Rng>(
        num_rand: usize,
        num_com: usize,
        num_ch: usize,
        num_resp: usize,
        accept_density: f64,
        rng: &mut R,
    ) -> Self {
        let accept = (0..num_rand * num_com * num_ch * num_resp)
            .map(|_| rng.gen::<f64>() < accept_density)
            .collect();
        PairTarget {
            num_rand,
            num_com,
            num_ch,
            num_resp,
            accept,
        }
    }

    fn index(&self, rand: usize, com: usize, ch: usize, resp: usize) -> usize {
        ((rand * self.num_com + com) * self.num_ch + ch) * self.num_resp + resp
    }
}

impl ExtractionTarget for PairTarget {
    type Witness = (usize, usize);

    fn num_rand(&self) -> usize {
        self.num_rand
    }

    fn num_challenges(&self) -> usize {
        self.num_ch
    }

    fn accepts(&self, rand: usize, com: usize, ch: usize, resp: usize) -> bool {
        self.accept[self.index(rand, com, ch, resp)]
    }

    fn extract(
        &self,
        _rand: usize,
        _com: usize,
        _ch1: usize,
        resp1: usize,
        _ch2: usize,
        resp2: usize,
    ) -> Option<(usize, usize)> {
        Some((resp1, resp2))
    }

    fn witness_valid(&self, _witness: &(usize, usize)) -> bool {
        true
    }

    fn binding_modulus(&self) -> Option<u64> {
        None
    }
}

/// Fully random strategy for a [`PairTarget`]: Haar unitaries, Haar-basis
/// complete measurements and a random entangled initial state.
pub fn random_pair_spec<R: Rng>(target: &PairTarget, dim1: usize, dim2: usize, rng: &mut R) -> Result<QuantumProverSpec> {
    if dim1 < target.num_com || dim2 < target.num_resp {
        return Err(CoreError::Dimension(
            "registers must fit the outcome counts".into(),
        ));
    }
    let com_family = random_complete_family(dim1, target.num_com, rng);
    let resp_family = random_complete_family(dim2, target.num_resp, rng);
    let rand_unitaries = (0..target.num_rand).map(|_| haar_unitary(dim1, rng)).collect();
    let ch_unitaries = (0..target.num_ch).map(|_| haar_unitary(dim2, rng)).collect();
    let initial = crate::quantum::random::random_pure_state(dim1 * dim2, rng);
    Ok(QuantumProverSpec {
        dim1,
        dim2,
        initial,
        rand_unitaries,
        com_family,
        ch_unitaries,
        resp_family,
    })
}

fn random_complete_family<R: Rng>(dim: usize, outcomes: usize, rng: &mut R) -> ProjectorFamily {
    let u = haar_unitary(dim, rng);
    // Spread dim basis vectors over `outcomes` bins, at least one each.
    let mut counts = vec![1usize; outcomes];
    for _ in 0..dim - outcomes {
        counts[rng.gen_range(0..outcomes)] += 1;
    }
    let mut projectors = Vec::with_capacity(outcomes);
    let mut col = 0usize;
    for count in counts {
        let mut p = CMat::zeros(dim, dim);
        for _ in 0..count {
            let v = u.column(col);
            p += &v * v.adjoint();
            col += 1;
        }
        projectors.push(p);
    }
    ProjectorFamily::new_unchecked(projectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::stream_rng;
    use crate::extractors::quantum::canonical_extract_quantum;
    use crate::field::make_field;

    fn target_and_witness(seed: u64) -> (SubsetTarget, SubsetWitness) {
        let field = make_field(2);
        let target = SubsetTarget::new(field, 1, 1);
        let witness = SubsetWitness::generate(field, vec![1], &mut stream_rng(70, seed));
        (target, witness)
    }

    #[test]
    fn honest_embedding_extracts_with_certainty() {
        let (target, witness) = target_and_witness(0);
        let spec = honest_subset_spec(&target, &witness);
        let mut rng = stream_rng(71, 0);
        let report = canonical_extract_quantum(&target, &spec, &mut rng).unwrap();
        assert!((report.acceptance_probability - 1.0).abs() < 1e-10);
        assert!((report.success_probability - 1.0).abs() < 1e-10);
        assert!((report.pair_acceptance - 1.0).abs() < 1e-10);
        assert_eq!(report.witness, Some(vec![1]));
    }

    #[test]
    fn pure_one_branch_cheater_has_half_acceptance_and_zero_success() {
        let (target, witness) = target_and_witness(1);
        let spec = one_branch_subset_spec(&target, &witness, std::f64::consts::FRAC_PI_2);
        let mut rng = stream_rng(72, 0);
        let report = canonical_extract_quantum(&target, &spec, &mut rng).unwrap();
        assert!((report.acceptance_probability - 0.5).abs() < 1e-10);
        assert!(report.success_probability.abs() < 1e-12);
        assert!(report.pair_acceptance.abs() < 1e-12);
        assert_eq!(report.bound_rhs, 0.0);
    }

    #[test]
    fn ledger_probabilities_sum_to_one() {
        let (target, witness) = target_and_witness(2);
        for spec in [
            honest_subset_spec(&target, &witness),
            one_branch_subset_spec(&target, &witness, 0.7),
            superposed_subset_spec(&target, &witness, 0.5),
        ] {
            let mut rng = stream_rng(73, 0);
            let report = canonical_extract_quantum(&target, &spec, &mut rng).unwrap();
            let total: f64 = report.branch_ledger.iter().map(|b| b.probability).sum();
            assert!((total - 1.0).abs() < 1e-10, "ledger sums to {total}");
        }
    }

    #[test]
    fn superposed_prover_satisfies_the_extraction_bound() {
        let (target, witness) = target_and_witness(3);
        for angle in [0.2f64, 0.5, 0.9, 1.2] {
            let spec = superposed_subset_spec(&target, &witness, angle);
            let mut rng = stream_rng(74, 0);
            let report = canonical_extract_quantum(&target, &spec, &mut rng).unwrap();
            assert!(report.acceptance_probability > 0.5, "angle {angle}");
            assert!(
                report.success_probability >= report.bound_rhs - 1e-9,
                "angle {angle}: success {} < rhs {}",
                report.success_probability,
                report.bound_rhs
            );
        }
    }

    #[test]
    fn random_pair_targets_meet_the_bound() {
        for seed in 0..10u64 {
            let mut rng = stream_rng(75, seed);
            let target = PairTarget::random(2, 2, 2, 3, 0.8, &mut rng);
            let spec = random_pair_spec(&target, 3, 4, &mut rng).unwrap();
            let report = canonical_extract_quantum(&target, &spec, &mut rng).unwrap();
            assert!((report.success_probability - report.pair_acceptance).abs() < 1e-12);
            assert!(report.success_probability >= report.bound_rhs - 1e-9, "seed {seed}");
            let total: f64 = report.branch_ledger.iter().map(|b| b.probability).sum();
            assert!((total - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn step5_state_matches_the_closed_form() {
        use crate::quantum::{lift, max_abs};
        let (target, witness) = target_and_witness(4);
        let spec = superposed_subset_spec(&target, &witness, 0.8);
        let dims = [spec.dim1, spec.dim2];
        let _ = &target;
        for (rand, com, ch, resp) in [(0usize, 0usize, 0usize, 0usize), (1, 1, 0, 1), (0, 2, 1, 3)]
        {
            let seq = crate::extractors::quantum::step5_state(&spec, rand, com, ch, resp);
            // Closed form: (U* W U) sigma (U* W U) with sigma the
            // unnormalized post-commitment state.
            let activated =
                lift(&spec.rand_unitaries[rand], &dims, 0) * spec.initial.vector();
            let committed = lift(spec.com_family.projector(com), &dims, 0) * activated;
            let sigma = &committed * committed.adjoint();
            let u = lift(&spec.ch_unitaries[ch], &dims, 1);
            let w = lift(spec.resp_family.projector(resp), &dims, 1);
            let op = u.adjoint() * w * u;
            let closed = &op * sigma * &op;
            assert!(max_abs(&(seq - closed)) < 1e-10);
        }
    }
}
