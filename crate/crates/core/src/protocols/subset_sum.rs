//! The two-prover subset-sum proof system.
//!
//! For an instance `(s, k)` with witness `v` (a binary vector with
//! `sum v_i s_i = k`), the provers pre-agree on a random binary mask `z`
//! and random field vectors `c0, c1`. The committer answers the verifier's
//! random scalar `a` with `w0 = a (s .* z) + c0` and `w1 = a (s .* !z) + c1`;
//! challenge 0 opens `(z, c0, c1)`, challenge 1 sends `x = v xor z` and the
//! aggregate `c' = sum (c_{x_i})_i`, which must satisfy
//! `sum (w_{x_i})_i = a k + c'`.

use crate::field::{FieldElement, FieldSpec};
use crate::sigma::{Check, CommitProver, RespondProver, SigmaProtocol};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Public instance `(s, k)` over `F_q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetSumInstance {
    pub s: Vec<FieldElement>,
    pub k: FieldElement,
}

impl SubsetSumInstance {
    /// Check a candidate binary witness against the instance.
    pub fn witness_valid(&self, field: FieldSpec, v: &[u8]) -> bool {
        v.len() == self.s.len()
            && v.iter().all(|&b| b <= 1)
            && self
                .s
                .iter()
                .zip(v)
                .fold(field.zero(), |acc, (&si, &vi)| {
                    field.add(acc, field.mul(si, FieldElement(vi as u64)))
                })
                == self.k
    }
}

/// Witness plus per-run prover randomness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubsetWitness {
    pub v: Vec<u8>,
    pub z: Vec<u8>,
    pub c0: Vec<FieldElement>,
    pub c1: Vec<FieldElement>,
}

impl SubsetWitness {
    pub fn generate<R: Rng>(field: FieldSpec, v: Vec<u8>, rng: &mut R) -> Self {
        let n = v.len();
        SubsetWitness {
            v,
            z: (0..n).map(|_| rng.gen_range(0..2u8)).collect(),
            c0: (0..n).map(|_| field.sample_uniform(rng)).collect(),
            c1: (0..n).map(|_| field.sample_uniform(rng)).collect(),
        }
    }
}

/// Commitment message `(w0, w1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetCommitment {
    pub w0: Vec<FieldElement>,
    pub w1: Vec<FieldElement>,
}

/// Responder message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubsetResponse {
    /// Challenge 0: the mask and both blinding vectors.
    Vectors {
        z: Vec<u8>,
        c0: Vec<FieldElement>,
        c1: Vec<FieldElement>,
    },
    /// Challenge 1: the masked witness and aggregate blinding.
    Masked { x: Vec<u8>, c_prime: FieldElement },
}

/// `w_d = a (s .* m) + c_d` where `m` is `z` for `d = 0` and `!z` for `d = 1`.
pub fn subset_commit(
    field: FieldSpec,
    instance: &SubsetSumInstance,
    witness: &SubsetWitness,
    a: FieldElement,
) -> SubsetCommitment {
    let mask = |zi: u8, flip: bool| -> u64 {
        let bit = if flip { 1 - zi } else { zi };
        bit as u64
    };
    let build = |flip: bool, c: &[FieldElement]| -> Vec<FieldElement> {
        instance
            .s
            .iter()
            .zip(&witness.z)
            .zip(c)
            .map(|((&si, &zi), &ci)| {
                field.add(field.mul(a, field.mul(si, FieldElement(mask(zi, flip)))), ci)
            })
            .collect()
    };
    SubsetCommitment {
        w0: build(false, &witness.c0),
        w1: build(true, &witness.c1),
    }
}

/// Honest response for challenge `ch`.
pub fn subset_respond(field: FieldSpec, witness: &SubsetWitness, ch: u8) -> SubsetResponse {
    if ch == 0 {
        SubsetResponse::Vectors {
            z: witness.z.clone(),
            c0: witness.c0.clone(),
            c1: witness.c1.clone(),
        }
    } else {
        let x: Vec<u8> = witness
            .v
            .iter()
            .zip(&witness.z)
            .map(|(&vi, &zi)| vi ^ zi)
            .collect();
        let c_prime = x.iter().enumerate().fold(field.zero(), |acc, (i, &xi)| {
            let ci = if xi == 0 { witness.c0[i] } else { witness.c1[i] };
            field.add(acc, ci)
        });
        SubsetResponse::Masked { x, c_prime }
    }
}

/// Verification phase.
pub fn subset_verify(
    field: FieldSpec,
    instance: &SubsetSumInstance,
    a: FieldElement,
    com: &SubsetCommitment,
    ch: u8,
    resp: &SubsetResponse,
) -> Check {
    let n = instance.s.len();
    if com.w0.len() != n || com.w1.len() != n {
        return Check::reject("commitment length mismatch");
    }
    match (ch, resp) {
        (0, SubsetResponse::Vectors { z, c0, c1 }) => {
            if z.len() != n || c0.len() != n || c1.len() != n {
                return Check::reject("opening length mismatch");
            }
            if z.iter().any(|&zi| zi > 1) {
                return Check::reject("mask must be binary");
            }
            for i in 0..n {
                let zi = FieldElement(z[i] as u64);
                let nzi = FieldElement(1 - z[i] as u64);
                let e0 = field.add(field.mul(a, field.mul(instance.s[i], zi)), c0[i]);
                let e1 = field.add(field.mul(a, field.mul(instance.s[i], nzi)), c1[i]);
                if com.w0[i] != e0 || com.w1[i] != e1 {
                    return Check::Reject(None);
                }
            }
            Check::Accept
        }
        (1, SubsetResponse::Masked { x, c_prime }) => {
            if x.len() != n {
                return Check::reject("masked witness length mismatch");
            }
            if x.iter().any(|&xi| xi > 1) {
                return Check::reject("masked witness must be binary");
            }
            let mut lhs = field.zero();
            for (i, &xi) in x.iter().enumerate() {
                let wi = if xi == 0 { com.w0[i] } else { com.w1[i] };
                lhs = field.add(lhs, wi);
            }
            let rhs = field.add(field.mul(a, instance.k), *c_prime);
            Check::from_bool(lhs == rhs)
        }
        _ => Check::reject("response shape does not match the challenge"),
    }
}

/// Protocol descriptor.
#[derive(Debug, Clone)]
pub struct SubsetSumProtocol {
    pub field: FieldSpec,
    pub instance: SubsetSumInstance,
}

impl SigmaProtocol for SubsetSumProtocol {
    type Rand = FieldElement;
    type Com = SubsetCommitment;
    type Ch = u8;
    type Resp = SubsetResponse;

    fn name(&self) -> &'static str {
        "subset-sum"
    }

    fn sample_rand<R: Rng>(&self, rng: &mut R) -> FieldElement {
        self.field.sample_uniform(rng)
    }

    fn challenges(&self) -> Vec<u8> {
        vec![0, 1]
    }

    fn verify(
        &self,
        rand: &FieldElement,
        com: &SubsetCommitment,
        ch: &u8,
        resp: &SubsetResponse,
    ) -> Check {
        subset_verify(self.field, &self.instance, *rand, com, *ch, resp)
    }
}

/// Honest committing prover.
#[derive(Debug, Clone)]
pub struct SubsetCommitter {
    protocol: SubsetSumProtocol,
    witness: SubsetWitness,
}

/// Honest responding prover.
#[derive(Debug, Clone)]
pub struct SubsetResponder {
    field: FieldSpec,
    witness: SubsetWitness,
}

pub fn honest_subset_provers(
    protocol: &SubsetSumProtocol,
    witness: SubsetWitness,
) -> (SubsetCommitter, SubsetResponder) {
    (
        SubsetCommitter {
            protocol: protocol.clone(),
            witness: witness.clone(),
        },
        SubsetResponder {
            field: protocol.field,
            witness,
        },
    )
}

impl CommitProver<SubsetSumProtocol> for SubsetCommitter {
    fn commit(&mut self, rand: &FieldElement) -> SubsetCommitment {
        subset_commit(
            self.protocol.field,
            &self.protocol.instance,
            &self.witness,
            *rand,
        )
    }
}

impl RespondProver<SubsetSumProtocol> for SubsetResponder {
    fn respond(&mut self, ch: &u8) -> SubsetResponse {
        subset_respond(self.field, &self.witness, *ch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::stream_rng;
    use crate::field::make_field;
    use crate::sigma::{run_sigma, TimingModel, Verdict};

    fn example() -> (FieldSpec, SubsetSumInstance, Vec<u8>) {
        let f = make_field(101);
        let s = vec![FieldElement(1), FieldElement(2), FieldElement(3)];
        (f, SubsetSumInstance { s, k: FieldElement(3) }, vec![1, 1, 0])
    }

    #[test]
    fn honest_run_accepts() {
        let (field, instance, v) = example();
        assert!(instance.witness_valid(field, &v));
        let protocol = SubsetSumProtocol { field, instance };
        for seed in 0..50 {
            let mut rng = stream_rng(20, seed);
            let witness = SubsetWitness::generate(field, v.clone(), &mut rng);
            let (mut p1, mut p2) = honest_subset_provers(&protocol, witness);
            let t = run_sigma(&protocol, &mut p1, &mut p2, &TimingModel::ideal(), &mut rng);
            assert_eq!(t.verdict, Verdict::Accept);
        }
    }

    #[test]
    fn masked_equation_recomputes_algebraically() {
        // ch = 1: sum (w_{x_i})_i must equal a k + c' with x = v xor z.
        let (field, instance, v) = example();
        let mut rng = stream_rng(21, 0);
        for _ in 0..100 {
            let witness = SubsetWitness::generate(field, v.clone(), &mut rng);
            let a = field.sample_uniform(&mut rng);
            let com = subset_commit(field, &instance, &witness, a);
            let resp = subset_respond(field, &witness, 1);
            let (x, c_prime) = match &resp {
                SubsetResponse::Masked { x, c_prime } => (x.clone(), *c_prime),
                _ => unreachable!(),
            };
            let mut lhs = field.zero();
            for (i, xi) in x.iter().enumerate() {
                lhs = field.add(lhs, if *xi == 0 { com.w0[i] } else { com.w1[i] });
            }
            assert_eq!(lhs, field.add(field.mul(a, instance.k), c_prime));
            assert_eq!(
                subset_verify(field, &instance, a, &com, 1, &resp),
                Check::Accept
            );
        }
    }

    #[test]
    fn perturbed_aggregate_rejects() {
        let (field, instance, v) = example();
        let mut rng = stream_rng(22, 0);
        let witness = SubsetWitness::generate(field, v, &mut rng);
        let a = field.sample_uniform(&mut rng);
        let com = subset_commit(field, &instance, &witness, a);
        if let SubsetResponse::Masked { x, c_prime } = subset_respond(field, &witness, 1) {
            let bad = SubsetResponse::Masked {
                x,
                c_prime: field.add(c_prime, FieldElement(1)),
            };
            assert_eq!(
                subset_verify(field, &instance, a, &com, 1, &bad),
                Check::Reject(None)
            );
        }
    }

    #[test]
    fn vector_opening_accepts_and_rejects() {
        let (field, instance, v) = example();
        let mut rng = stream_rng(23, 0);
        let witness = SubsetWitness::generate(field, v, &mut rng);
        let a = field.sample_uniform(&mut rng);
        let com = subset_commit(field, &instance, &witness, a);
        let good = subset_respond(field, &witness, 0);
        assert_eq!(
            subset_verify(field, &instance, a, &com, 0, &good),
            Check::Accept
        );
        if let SubsetResponse::Vectors { mut z, c0, c1 } = good {
            z[0] ^= 1;
            let bad = SubsetResponse::Vectors { z, c0, c1 };
            assert_eq!(
                subset_verify(field, &instance, a, &com, 0, &bad),
                Check::Reject(None)
            );
        }
    }
}
