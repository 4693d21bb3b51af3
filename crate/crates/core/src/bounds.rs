//! Closed-form soundness and knowledge-error calculators.
//!
//! Soundness errors for the Hamiltonian-cycle and subset-sum proof
//! systems, the commitment sizes needed to hit a target error, the
//! 3-coloring knowledge-error quantities, and the extraction lower bound
//! of the canonical quantum extractor. Parameter-table identities are
//! checked in exact rational arithmetic; sweep evaluation is floating
//! point with out-of-range values clipped and flagged.

use crate::error::{CoreError, Result};
use crate::numeric::{bigrat_to_f64, exact_cbrt, exact_sqrt, factorial, pow2, BigRat};
use num::bigint::BigInt;
use num::{One, Zero};
use serde::Serialize;

/// Which proof system a calculator refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    Hc,
    Subset,
}

/// Soundness error pair: this work's bound and the earlier cube-root
/// bound, each clipped to 1 with a vacuity flag.
#[derive(Debug, Clone, Serialize)]
pub struct SoundnessPair {
    pub ours: f64,
    pub previous: f64,
    pub ours_vacuous: bool,
    pub previous_vacuous: bool,
}

fn clip(x: f64) -> (f64, bool) {
    if x >= 1.0 {
        (1.0, true)
    } else {
        (x, false)
    }
}

fn check_q(q: &BigInt) -> Result<()> {
    if q < &BigInt::one() {
        return Err(CoreError::Range("Q must be at least 1".into()));
    }
    Ok(())
}

/// `1/2 + sqrt(n!/(2Q))` versus `1/2 + (64 n!/Q)^(1/3)`.
pub fn hc_soundness(n: u64, q: &BigInt) -> Result<SoundnessPair> {
    if !(3..=20).contains(&n) {
        return Err(CoreError::Range(format!(
            "vertex count {n} outside the supported range 3..=20"
        )));
    }
    check_q(q)?;
    let nfact = factorial(n);
    let ours_ratio = BigRat::new(nfact.clone(), BigInt::from(2) * q);
    let previous_ratio = BigRat::new(BigInt::from(64) * nfact, q.clone());
    let (ours, ours_vacuous) = clip(0.5 + bigrat_to_f64(&ours_ratio).sqrt());
    let (previous, previous_vacuous) = clip(0.5 + bigrat_to_f64(&previous_ratio).cbrt());
    Ok(SoundnessPair {
        ours,
        previous,
        ours_vacuous,
        previous_vacuous,
    })
}

/// `1/2 + sqrt(2^(n-1)/Q)` versus `1/2 + (64 * 2^n / Q)^(1/3)`.
pub fn subset_soundness(n: u64, q: &BigInt) -> Result<SoundnessPair> {
    if !(1..=64).contains(&n) {
        return Err(CoreError::Range(format!(
            "set size {n} outside the supported range 1..=64"
        )));
    }
    check_q(q)?;
    let ours_ratio = BigRat::new(pow2(n - 1), q.clone());
    let previous_ratio = BigRat::new(BigInt::from(64) * pow2(n), q.clone());
    let (ours, ours_vacuous) = clip(0.5 + bigrat_to_f64(&ours_ratio).sqrt());
    let (previous, previous_vacuous) = clip(0.5 + bigrat_to_f64(&previous_ratio).cbrt());
    Ok(SoundnessPair {
        ours,
        previous,
        ours_vacuous,
        previous_vacuous,
    })
}

fn half() -> BigRat {
    BigRat::new(BigInt::one(), BigInt::from(2))
}

/// Exact soundness values when the radical is a perfect power, used for
/// the parameter-table identities.
pub fn hc_ours_exact(n: u64, q: &BigInt) -> Option<BigRat> {
    let r = exact_sqrt(&BigRat::new(factorial(n), BigInt::from(2) * q))?;
    Some(half() + r)
}

pub fn hc_previous_exact(n: u64, q: &BigInt) -> Option<BigRat> {
    let r = exact_cbrt(&BigRat::new(BigInt::from(64) * factorial(n), q.clone()))?;
    Some(half() + r)
}

pub fn subset_ours_exact(n: u64, q: &BigInt) -> Option<BigRat> {
    let r = exact_sqrt(&BigRat::new(pow2(n - 1), q.clone()))?;
    Some(half() + r)
}

pub fn subset_previous_exact(n: u64, q: &BigInt) -> Option<BigRat> {
    let r = exact_cbrt(&BigRat::new(BigInt::from(64) * pow2(n), q.clone()))?;
    Some(half() + r)
}

/// Commitment sizes achieving soundness error `1/2 + 2^-eta`.
#[derive(Debug, Clone, Serialize)]
pub struct QTargets {
    pub our_q: BigInt,
    pub previous_q: BigInt,
}

pub fn q_for_target(problem: Problem, n: u64, eta: u32) -> Result<QTargets> {
    if n < 1 || eta < 1 {
        return Err(CoreError::Range("n and eta must be at least 1".into()));
    }
    match problem {
        Problem::Hc => {
            if n > 20 {
                return Err(CoreError::Range("vertex count above 20".into()));
            }
            let nfact = factorial(n);
            Ok(QTargets {
                our_q: pow2(2 * eta as u64 - 1) * &nfact,
                previous_q: pow2(3 * eta as u64 + 6) * nfact,
            })
        }
        Problem::Subset => {
            if n > 64 {
                return Err(CoreError::Range("set size above 64".into()));
            }
            Ok(QTargets {
                our_q: pow2(n + 2 * eta as u64 - 1),
                previous_q: pow2(n + 3 * eta as u64 + 6),
            })
        }
    }
}

/// One row of the parameter-table identity check, all values exact.
#[derive(Debug, Clone)]
pub struct Table1Row {
    pub eta: u32,
    pub targets: QTargets,
    pub ours: BigRat,
    pub previous: BigRat,
    /// `1/2 + 2^-eta`.
    pub goal: BigRat,
    /// `previous_q / our_q`.
    pub ratio: BigRat,
    /// `2^(eta + 7)`.
    pub expected_ratio: BigRat,
    pub exact: bool,
}

pub fn table1_row(problem: Problem, n: u64, eta: u32) -> Result<Table1Row> {
    let targets = q_for_target(problem, n, eta)?;
    let exact_pair = match problem {
        Problem::Hc => {
            hc_ours_exact(n, &targets.our_q).zip(hc_previous_exact(n, &targets.previous_q))
        }
        Problem::Subset => subset_ours_exact(n, &targets.our_q)
            .zip(subset_previous_exact(n, &targets.previous_q)),
    };
    let (ours, previous) = exact_pair.ok_or_else(|| {
        CoreError::Range("table radicals are not exact powers at these parameters".into())
    })?;
    let goal = BigRat::new(BigInt::one(), BigInt::from(2))
        + BigRat::new(BigInt::one(), pow2(eta as u64));
    let ratio = BigRat::new(targets.previous_q.clone(), targets.our_q.clone());
    let expected_ratio = BigRat::from(pow2(eta as u64 + 7));
    let exact = ours == goal && previous == goal && ratio == expected_ratio;
    Ok(Table1Row {
        eta,
        targets,
        ours,
        previous,
        goal,
        ratio,
        expected_ratio,
        exact,
    })
}

/// Knowledge-error quantities of the 3-coloring protocols, exact.
#[derive(Debug, Clone)]
pub struct ThreeColErrors {
    /// Classical knowledge error `1 - 1/(3|H|)`.
    pub kappa_c: BigRat,
    /// Quantum knowledge error `1 - (1/(7|H|))^4`.
    pub kappa_q: BigRat,
    /// `kappa_q - kappa_c`.
    pub delta_tilde: BigRat,
    /// Lower bound `16 / (2401 |H|^4)` on the knowledge-error gap.
    pub delta_lower: BigRat,
    /// `16 |H| sqrt(1 - p)` when an acceptance probability is supplied.
    pub delta_of_p: Option<f64>,
}

pub fn threecol_errors(edge_count: u64, acceptance: Option<f64>) -> Result<ThreeColErrors> {
    if edge_count < 3 {
        return Err(CoreError::Range(
            "the knowledge-error bounds need at least 3 edges".into(),
        ));
    }
    let h = BigInt::from(edge_count);
    let one = BigRat::one();
    let kappa_c = &one - BigRat::new(BigInt::one(), BigInt::from(3) * &h);
    let h4 = BigInt::from(2401) * h.pow(4);
    let kappa_q = &one - BigRat::new(BigInt::one(), h4.clone());
    let delta_tilde = &kappa_q - &kappa_c;
    let delta_lower = BigRat::new(BigInt::from(16), h4);
    let delta_of_p = acceptance.map(|p| 16.0 * edge_count as f64 * (1.0 - p).max(0.0).sqrt());
    Ok(ThreeColErrors {
        kappa_c,
        kappa_q,
        delta_tilde,
        delta_lower,
        delta_of_p,
    })
}

/// Extraction lower bound of the canonical quantum extractor:
/// `(1 - delta_ss) / (64 |RA_max|) * (p_acc - 1/c)^3`, zero when the
/// acceptance precondition `p_acc > 1/c` fails or the bound is vacuous.
pub fn qpok_extraction_lower(p_acc: f64, c: u64, delta_ss: f64, ra_max: u64) -> f64 {
    let inv_c = 1.0 / c as f64;
    if p_acc <= inv_c {
        return 0.0;
    }
    let value = (1.0 - delta_ss) / (64.0 * ra_max as f64) * (p_acc - inv_c).powi(3);
    value.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn big(x: u64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn hc_table_example() {
        // n = 5, eta = 5: our Q column gives exactly 1/2 + 2^-5.
        let q = pow2(9) * factorial(5);
        assert_eq!(q, big(61440));
        let pair = hc_soundness(5, &q).unwrap();
        assert_relative_eq!(pair.ours, 0.53125, epsilon = 1e-12);
        let prev_q = pow2(21) * factorial(5);
        let pair = hc_soundness(5, &prev_q).unwrap();
        assert_relative_eq!(pair.previous, 0.53125, epsilon = 1e-9);
    }

    #[test]
    fn vacuous_bounds_are_clipped() {
        // Q = n!/2 makes the radical 1: clipped to 1 with the flag set.
        let q = factorial(5) / big(2);
        let pair = hc_soundness(5, &q).unwrap();
        assert_eq!(pair.ours, 1.0);
        assert!(pair.ours_vacuous);
        let pair = subset_soundness(4, &pow2(3)).unwrap();
        assert_eq!(pair.ours, 1.0);
        assert!(pair.ours_vacuous);
    }

    #[test]
    fn q_targets_examples() {
        let t = q_for_target(Problem::Hc, 5, 5).unwrap();
        assert_eq!(t.our_q, big(61440));
        let t = q_for_target(Problem::Subset, 4, 5).unwrap();
        assert_eq!(t.our_q, big(8192));
    }

    #[test]
    fn table1_rows_are_exact_for_all_eta() {
        for eta in 1..=20 {
            for (problem, n) in [(Problem::Hc, 5), (Problem::Subset, 4)] {
                let row = table1_row(problem, n, eta).unwrap();
                assert!(row.exact, "{problem:?} eta {eta}");
            }
        }
    }

    #[test]
    fn threecol_error_examples() {
        let e = threecol_errors(3, Some(1.0)).unwrap();
        assert_eq!(e.kappa_c, BigRat::new(big(8).into(), big(9).into()));
        assert_eq!(e.delta_lower, BigRat::new(big(16).into(), big(194481).into()));
        assert_eq!(e.delta_of_p, Some(0.0));
        assert!(threecol_errors(2, None).is_err());
    }

    #[test]
    fn extraction_lower_examples() {
        assert_relative_eq!(
            qpok_extraction_lower(1.0, 2, 0.0, 1),
            1.0 / 512.0,
            epsilon = 1e-15
        );
        assert_eq!(qpok_extraction_lower(0.5, 2, 0.0, 1), 0.0);
        assert_eq!(qpok_extraction_lower(0.9, 2, 1.0, 1), 0.0);
    }

    #[test]
    fn improvement_regime_grid() {
        // ours < previous whenever both are informative and Q exceeds
        // 2^7 n! (resp. 2^(n+7)).
        for n in [4u64, 5, 6] {
            let nfact = factorial(n);
            for shift in 8..24u64 {
                let q = pow2(shift) * &nfact;
                let pair = hc_soundness(n, &q).unwrap();
                if !pair.ours_vacuous && !pair.previous_vacuous {
                    assert!(pair.ours < pair.previous, "hc n={n} shift={shift}");
                }
            }
        }
        for n in [3u64, 4, 8] {
            for shift in 8..30u64 {
                let q = pow2(n + shift);
                let pair = subset_soundness(n, &q).unwrap();
                if !pair.ours_vacuous && !pair.previous_vacuous {
                    assert!(pair.ours < pair.previous, "subset n={n} shift={shift}");
                }
            }
        }
    }

    #[test]
    fn out_of_range_is_rejected() {
        assert!(hc_soundness(21, &big(10)).is_err());
        assert!(hc_soundness(5, &BigInt::zero()).is_err());
    }

    proptest! {
        #[test]
        fn soundness_decreases_in_q(shift in 2u64..40) {
            let q1 = pow2(shift) * factorial(5);
            let q2 = pow2(shift + 1) * factorial(5);
            let p1 = hc_soundness(5, &q1).unwrap();
            let p2 = hc_soundness(5, &q2).unwrap();
            prop_assert!(p2.ours <= p1.ours);
            prop_assert!(p2.previous <= p1.previous);
        }

        #[test]
        fn extraction_bound_increases_in_acceptance(steps in 1u32..40) {
            let p_lo = 0.5 + 0.4 * (steps as f64 / 41.0);
            let p_hi = 0.5 + 0.4 * ((steps + 1) as f64 / 41.0);
            let lo = qpok_extraction_lower(p_lo, 2, 0.1, 3);
            let hi = qpok_extraction_lower(p_hi, 2, 0.1, 3);
            prop_assert!(hi >= lo);
        }
    }

    #[test]
    fn exactness_is_detected() {
        // A Q value off the table row breaks the perfect square.
        let q = pow2(9) * factorial(5) + big(1);
        assert!(hc_ours_exact(5, &q).is_none());
    }
}
