//! The relativistic `F_Q` bit commitment: two cooperating senders share a
//! random key `c`; the first answers the receiver's random `a` with
//! `w = a·d + c`, the second later opens `(d, c)`.
//!
//! Binding rests on the senders' spacelike separation, not on hardness:
//! the opener fixes its openings before learning `a`, so a simultaneous
//! opening of both bits forces a correct guess of `a`. The exhaustive
//! search below establishes the resulting `1/q` ceiling empirically.

use crate::error::{CoreError, Result};
use crate::exec;
use crate::field::{FieldElement, FieldSpec};
use crate::numeric::Rat;
use serde::{Deserialize, Serialize};

/// Pre-shared randomness between the two senders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitKey {
    pub c: FieldElement,
}

/// One committed bit together with everything needed to audit it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitmentRecord {
    /// Receiver randomness sent to the first sender.
    pub a: FieldElement,
    /// Committed value `w = a·d + c`.
    pub w: FieldElement,
    /// The committed bit.
    pub d: u8,
}

/// `w = a·d + c` in `F_q`.
pub fn commit(spec: FieldSpec, d: u8, a: FieldElement, key: CommitKey) -> FieldElement {
    debug_assert!(d <= 1);
    spec.add(spec.mul(a, FieldElement(d as u64)), key.c)
}

/// Accept iff `w = a·d + c`.
pub fn verify_open(
    spec: FieldSpec,
    w: FieldElement,
    a: FieldElement,
    d: u8,
    c: FieldElement,
) -> bool {
    w == commit(spec, d, a, CommitKey { c })
}

/// Largest modulus the exhaustive binding search will take on.
pub const BINDING_SEARCH_CAP: u64 = 101;

/// Exhaustive search for the best simultaneous-opening adversary.
///
/// The opener is fixed before `a` is revealed (functional independence
/// models the no-signalling constraint), so its strategy is a pair of
/// openings `(0, c0)` and `(1, c1)`. The committer sees `a` and may answer
/// any `w(a)`; both openings verify only when a single `w` satisfies
/// `w = c0` and `w = a + c1` simultaneously. Deterministic openings
/// dominate mixtures by linearity, so the maximum over this grid is the
/// fairly-binding parameter. Returns the exact maximum probability over
/// uniform `a`.
pub fn binding_adversary_search(spec: FieldSpec) -> Result<Rat> {
    let q = spec.modulus();
    if q > BINDING_SEARCH_CAP {
        return Err(CoreError::Capacity(format!(
            "binding search supports q <= {BINDING_SEARCH_CAP}, got {q}"
        )));
    }
    // Parallel over the opener's (c0, c1) grid; no shared mutable state.
    let best: Vec<u64> = exec::map_indexed((q * q) as usize, |idx| {
        let c0 = FieldElement(idx as u64 / q);
        let c1 = FieldElement(idx as u64 % q);
        let mut wins = 0u64;
        for a in spec.iter() {
            // The committer succeeds at this `a` iff some w verifies both
            // openings; try every w rather than solving the equation.
            let ok = spec
                .iter()
                .any(|w| verify_open(spec, w, a, 0, c0) && verify_open(spec, w, a, 1, c1));
            if ok {
                wins += 1;
            }
        }
        wins
    });
    let max_wins = best.into_iter().max().unwrap_or(0);
    Ok(Rat::new(max_wins as i64, q as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use std::collections::HashSet;

    #[test]
    fn commit_examples() {
        let f7 = make_field(7);
        let key = |c| CommitKey { c: FieldElement(c) };
        assert_eq!(commit(f7, 0, FieldElement(3), key(5)), FieldElement(5));
        assert_eq!(commit(f7, 1, FieldElement(3), key(5)), FieldElement(1));
        let f2 = make_field(2);
        assert_eq!(commit(f2, 1, FieldElement(1), key(1)), FieldElement(0));
    }

    #[test]
    fn verify_examples() {
        let f7 = make_field(7);
        assert!(verify_open(f7, FieldElement(1), FieldElement(3), 1, FieldElement(5)));
        assert!(!verify_open(f7, FieldElement(2), FieldElement(3), 1, FieldElement(5)));
        assert!(verify_open(f7, FieldElement(5), FieldElement(3), 0, FieldElement(5)));
    }

    #[test]
    fn honest_completeness_exhaustive() {
        for q in [2u64, 3, 5, 7, 11] {
            let f = make_field(q);
            for d in [0u8, 1] {
                for a in f.iter() {
                    for c in f.iter() {
                        let w = commit(f, d, a, CommitKey { c });
                        assert!(verify_open(f, w, a, d, c));
                    }
                }
            }
        }
    }

    #[test]
    fn perfect_hiding_exhaustive() {
        // For fixed a and d, w ranges over all of F_q as c does.
        for q in [2u64, 3, 5, 7, 11] {
            let f = make_field(q);
            for d in [0u8, 1] {
                for a in f.iter() {
                    let ws: HashSet<u64> = f
                        .iter()
                        .map(|c| commit(f, d, a, CommitKey { c }).0)
                        .collect();
                    assert_eq!(ws.len() as u64, q);
                }
            }
        }
    }

    #[test]
    fn binding_search_small_primes() {
        for q in [2u64, 3, 7] {
            let f = make_field(q);
            assert_eq!(binding_adversary_search(f).unwrap(), Rat::new(1, q as i64));
        }
    }

    #[test]
    fn binding_search_rejects_large_modulus() {
        let f = make_field(103);
        assert!(binding_adversary_search(f).is_err());
    }
}
