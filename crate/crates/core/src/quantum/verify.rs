//! Numerical verifiers for the consecutive-measurement, gentle-measurement
//! and symmetric-game inequalities. Each verifier computes both sides of
//! its inequality from scratch and reports whether it holds at `BOUND_TOL`;
//! checks whose precondition fails are reported as vacuously holding.

use super::{
    max_abs, psd_sqrt, trace_norm_distance, trace_re, CMat, DensityOperator, ProjectorFamily,
    StateVector, BOUND_TOL,
};
use crate::error::{CoreError, Result};
use serde::Serialize;

/// Outcome of a two-sided inequality check.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    /// Single-measurement figure (left average).
    pub f1: f64,
    /// Consecutive-measurement figure (the lower-bounded side).
    pub f2: f64,
    /// Value of the closed-form lower bound.
    pub rhs: f64,
    /// Whether the precondition (`f1` above threshold) was met.
    pub applicable: bool,
    pub holds: bool,
}

impl BoundCheck {
    fn conclude(f1: f64, f2: f64, rhs: f64, applicable: bool) -> Self {
        let holds = !applicable || f2 >= rhs - BOUND_TOL;
        BoundCheck {
            f1,
            f2,
            rhs,
            applicable,
            holds,
        }
    }

    pub fn margin(&self) -> f64 {
        self.f2 - self.rhs
    }
}

/// Two consecutive projective measurements:
/// `F2 >= (2 / max_i |S_i|) (F1 - 1/2)^2` whenever `F1 > 1/2`.
pub fn check_two_meas_bound(
    fam1: &ProjectorFamily,
    fam2: &ProjectorFamily,
    sigma: &DensityOperator,
) -> Result<BoundCheck> {
    fam1.validate()?;
    fam2.validate()?;
    let rho = sigma.matrix();
    let w1 = fam1.sum();
    let w2 = fam2.sum();
    let f1 = 0.5 * (trace_re(&(&w1 * rho)) + trace_re(&(&w2 * rho)));
    let mut f2 = 0.0;
    for s1 in fam1.iter() {
        f2 += trace_re(&(&w2 * s1 * rho * s1));
    }
    for s2 in fam2.iter() {
        f2 += trace_re(&(&w1 * s2 * rho * s2));
    }
    f2 *= 0.5;
    let max_s = fam1.len().max(fam2.len()) as f64;
    let rhs = (2.0 / max_s) * (f1 - 0.5).powi(2);
    Ok(BoundCheck::conclude(f1, f2, rhs, f1 > 0.5))
}

/// The `c`-projector bound: `F2 >= (1/(64|S|)) (F1 - 1/c)^3` when
/// `F1 >= 1/c`.
pub fn check_cha_bound(
    families: &[ProjectorFamily],
    sigma: &DensityOperator,
) -> Result<BoundCheck> {
    let c = families.len();
    if c < 2 {
        return Err(CoreError::Dimension("need at least two families".into()));
    }
    for fam in families {
        fam.validate()?;
    }
    let rho = sigma.matrix();
    let sums: Vec<CMat> = families.iter().map(|f| f.sum()).collect();
    let f1 = sums.iter().map(|w| trace_re(&(w * rho))).sum::<f64>() / c as f64;
    let mut f2 = 0.0;
    for (i, fam_i) in families.iter().enumerate() {
        for (j, w_j) in sums.iter().enumerate() {
            if i == j {
                continue;
            }
            for s in fam_i.iter() {
                f2 += trace_re(&(w_j * s * rho * s));
            }
        }
    }
    f2 /= (c * (c - 1)) as f64;
    let s_max = families.iter().map(|f| f.len()).max().unwrap() as f64;
    let inv_c = 1.0 / c as f64;
    let rhs = (f1 - inv_c).powi(3) / (64.0 * s_max);
    Ok(BoundCheck::conclude(f1, f2, rhs, f1 >= inv_c))
}

/// `t` consecutive measurements of single projectors on a pure state:
/// `F_t >= F_1^(2t-1)`.
pub fn check_don_bound(
    projectors: &[CMat],
    psi: &StateVector,
    t: u32,
) -> Result<BoundCheck> {
    if t < 1 {
        return Err(CoreError::Range("t must be >= 1".into()));
    }
    let c = projectors.len();
    if c == 0 {
        return Err(CoreError::Dimension("need at least one projector".into()));
    }
    let f1 = projectors
        .iter()
        .map(|w| (w * psi.vector()).norm_squared())
        .sum::<f64>()
        / c as f64;
    // Depth-first over measurement sequences, reusing partial products.
    fn walk(projectors: &[CMat], v: &super::CVec, depth: u32) -> f64 {
        if depth == 0 {
            return v.norm_squared();
        }
        projectors
            .iter()
            .map(|w| walk(projectors, &(w * v), depth - 1))
            .sum()
    }
    let ft = walk(projectors, psi.vector(), t) / (c as f64).powi(t as i32);
    let rhs = f1.powi(2 * t as i32 - 1);
    Ok(BoundCheck::conclude(f1, ft, rhs, true))
}

/// Gentle measurement: `||sigma - sqrt(X) sigma sqrt(X)||_1 <= 2 sqrt(1 - Tr[X sigma])`.
#[derive(Debug, Clone, Serialize)]
pub struct GentleCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub overlap: f64,
    pub holds: bool,
}

pub fn check_gentle(sigma: &DensityOperator, x: &CMat) -> Result<GentleCheck> {
    if x.shape() != (sigma.dim(), sigma.dim()) {
        return Err(CoreError::Dimension("X must match the state dimension".into()));
    }
    let sqrt_x = psd_sqrt(x)?;
    let disturbed = &sqrt_x * sigma.matrix() * &sqrt_x;
    let lhs = trace_norm_distance(sigma.matrix(), &disturbed)?;
    let overlap = trace_re(&(x * sigma.matrix()));
    let rhs = 2.0 * (1.0 - overlap).max(0.0).sqrt();
    Ok(GentleCheck {
        lhs,
        rhs,
        overlap,
        holds: lhs <= rhs + BOUND_TOL,
    })
}

/// Tripartite measurement-disturbance bound and its tightened variant.
///
/// For a symmetric tripartite state and a complete projector family
/// `{W^o}` on one local factor, the reduced pair state is disturbed by at
/// most `6 sqrt(1 - pi2)` in trace norm, where `pi2` is the probability
/// that subsystems 1 and 2 answer identically. The `4 sqrt(1 - pi1)`
/// variant (agreement between subsystems 1 and 3) is evaluated alongside
/// for reporting; `holds` refers to the 6-sqrt form.
#[derive(Debug, Clone, Serialize)]
pub struct Claim20Check {
    pub lhs: f64,
    pub pi2: f64,
    pub rhs6: f64,
    pub pi1: f64,
    pub rhs4: f64,
    pub holds: bool,
    pub holds4: bool,
}

pub fn check_claim20(psi: &StateVector, family: &ProjectorFamily) -> Result<Claim20Check> {
    family.validate_complete()?;
    let d = family.dim();
    if psi.dim() != d * d * d {
        return Err(CoreError::Dimension(format!(
            "state dim {} is not {d}^3",
            psi.dim()
        )));
    }
    let dims = [d, d, d];
    let rho123 = psi.density();
    let rho12 = rho123.partial_trace(&dims, 2);
    let dims12 = [d, d];

    let mut disturbed = CMat::zeros(d * d, d * d);
    let mut pi2 = 0.0;
    let mut pi1 = 0.0;
    for w in family.iter() {
        let w1 = super::lift(w, &dims12, 0);
        disturbed += &w1 * rho12.matrix() * &w1;
        let ww = super::lift(w, &dims12, 0) * super::lift(w, &dims12, 1);
        pi2 += trace_re(&(&ww * rho12.matrix()));
        let w13 = super::lift(w, &dims, 0) * super::lift(w, &dims, 2);
        pi1 += trace_re(&(&w13 * rho123.matrix()));
    }
    let lhs = trace_norm_distance(rho12.matrix(), &disturbed)?;
    let rhs6 = 6.0 * (1.0 - pi2).max(0.0).sqrt();
    let rhs4 = 4.0 * (1.0 - pi1).max(0.0).sqrt();
    Ok(Claim20Check {
        lhs,
        pi2,
        rhs6,
        pi1,
        rhs4,
        holds: lhs <= rhs6 + BOUND_TOL,
        holds4: lhs <= rhs4 + BOUND_TOL,
    })
}

/// Check that `x` is a valid measurement effect (`0 <= X <= Id`).
pub fn validate_effect(x: &CMat) -> Result<()> {
    if max_abs(&(x - x.adjoint())) > 1e-8 {
        return Err(CoreError::Operator("effect is not Hermitian".into()));
    }
    let eigs = super::hermitian_eigenvalues(x);
    if eigs.iter().any(|l| *l < -1e-8 || *l > 1.0 + 1e-8) {
        return Err(CoreError::Operator("effect spectrum outside [0, 1]".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{identity, CVec, C64};
    use approx::assert_relative_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn proj_zero() -> CMat {
        CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)])
    }

    fn proj_one() -> CMat {
        CMat::from_row_slice(2, 2, &[c(0.0), c(0.0), c(0.0), c(1.0)])
    }

    fn proj_plus() -> CMat {
        CMat::from_row_slice(2, 2, &[c(0.5), c(0.5), c(0.5), c(0.5)])
    }

    fn ket0_density() -> DensityOperator {
        StateVector::basis(2, 0).density()
    }

    #[test]
    fn two_meas_identical_families() {
        let fam = ProjectorFamily::new(vec![proj_zero()]).unwrap();
        let chk = check_two_meas_bound(&fam, &fam, &ket0_density()).unwrap();
        assert_relative_eq!(chk.f1, 1.0, epsilon = 1e-12);
        assert_relative_eq!(chk.f2, 1.0, epsilon = 1e-12);
        assert_relative_eq!(chk.rhs, 0.5, epsilon = 1e-12);
        assert!(chk.holds && chk.applicable);
    }

    #[test]
    fn two_meas_zero_plus() {
        let f1 = ProjectorFamily::new(vec![proj_zero()]).unwrap();
        let f2 = ProjectorFamily::new(vec![proj_plus()]).unwrap();
        let chk = check_two_meas_bound(&f1, &f2, &ket0_density()).unwrap();
        assert_relative_eq!(chk.f1, 0.75, epsilon = 1e-12);
        assert_relative_eq!(chk.f2, 0.375, epsilon = 1e-12);
        assert_relative_eq!(chk.rhs, 0.125, epsilon = 1e-12);
        assert!(chk.holds);
    }

    #[test]
    fn two_meas_orthogonal_is_vacuous() {
        let f1 = ProjectorFamily::new(vec![proj_zero()]).unwrap();
        let f2 = ProjectorFamily::new(vec![proj_one()]).unwrap();
        let chk = check_two_meas_bound(&f1, &f2, &ket0_density()).unwrap();
        assert_relative_eq!(chk.f1, 0.5, epsilon = 1e-12);
        assert!(!chk.applicable);
        assert!(chk.holds);
    }

    #[test]
    fn cha_bound_on_the_two_meas_example() {
        let f1 = ProjectorFamily::new(vec![proj_zero()]).unwrap();
        let f2 = ProjectorFamily::new(vec![proj_plus()]).unwrap();
        let chk = check_cha_bound(&[f1, f2], &ket0_density()).unwrap();
        assert_relative_eq!(chk.f1, 0.75, epsilon = 1e-12);
        assert_relative_eq!(chk.f2, 0.375, epsilon = 1e-12);
        assert_relative_eq!(chk.rhs, 0.25f64.powi(3) / 64.0, epsilon = 1e-12);
        assert!(chk.holds);
    }

    #[test]
    fn cha_identical_families_saturate() {
        let fam = ProjectorFamily::new(vec![proj_zero()]).unwrap();
        let chk = check_cha_bound(&[fam.clone(), fam], &ket0_density()).unwrap();
        assert_relative_eq!(chk.f1, 1.0, epsilon = 1e-12);
        assert_relative_eq!(chk.f2, 1.0, epsilon = 1e-12);
        assert!(chk.f2 >= chk.rhs);
    }

    #[test]
    fn don_bound_examples() {
        let psi = StateVector::basis(2, 0);
        // Equal projectors saturate: F_t = 1 = F1^(2t-1).
        let chk = check_don_bound(&[proj_zero(), proj_zero()], &psi, 3).unwrap();
        assert_relative_eq!(chk.f1, 1.0, epsilon = 1e-12);
        assert_relative_eq!(chk.f2, 1.0, epsilon = 1e-12);
        // Hand-computed |0>,|+> case.
        let chk = check_don_bound(&[proj_zero(), proj_plus()], &psi, 2).unwrap();
        assert_relative_eq!(chk.f1, 0.75, epsilon = 1e-12);
        assert_relative_eq!(chk.f2, 9.0 / 16.0, epsilon = 1e-12);
        assert_relative_eq!(chk.rhs, 0.75f64.powi(3), epsilon = 1e-12);
        assert!(chk.holds);
        // t = 1 collapses to F1.
        let chk = check_don_bound(&[proj_zero(), proj_plus()], &psi, 1).unwrap();
        assert_relative_eq!(chk.f1, chk.f2, epsilon = 1e-12);
    }

    #[test]
    fn gentle_boundary_cases() {
        let sigma = ket0_density();
        let id = identity(2);
        let chk = check_gentle(&sigma, &id).unwrap();
        assert_relative_eq!(chk.lhs, 0.0, epsilon = 1e-10);
        assert_relative_eq!(chk.rhs, 0.0, epsilon = 1e-10);
        assert!(chk.holds);
        let chk = check_gentle(&sigma, &proj_one()).unwrap();
        assert_relative_eq!(chk.rhs, 2.0, epsilon = 1e-10);
        assert_relative_eq!(chk.lhs, 1.0, epsilon = 1e-10);
        assert!(chk.holds);
    }

    #[test]
    fn claim20_ghz_saturates() {
        // (|000> + |111>)/sqrt(2) with the computational family: pi2 = 1,
        // lhs = 0.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = CVec::zeros(8);
        v[0] = c(s);
        v[7] = c(s);
        let psi = StateVector::new(v).unwrap();
        let fam = ProjectorFamily::new(vec![proj_zero(), proj_one()]).unwrap();
        let chk = check_claim20(&psi, &fam).unwrap();
        assert_relative_eq!(chk.pi2, 1.0, epsilon = 1e-10);
        assert_relative_eq!(chk.rhs6, 0.0, epsilon = 1e-10);
        assert_relative_eq!(chk.lhs, 0.0, epsilon = 1e-10);
        assert!(chk.holds);
    }

    #[test]
    fn claim20_invariant_state_has_zero_lhs() {
        // Product basis state is invariant under the computational-basis
        // superoperator.
        let mut v = CVec::zeros(8);
        v[0] = c(1.0);
        let psi = StateVector::new(v).unwrap();
        let fam = ProjectorFamily::new(vec![proj_zero(), proj_one()]).unwrap();
        let chk = check_claim20(&psi, &fam).unwrap();
        assert_relative_eq!(chk.lhs, 0.0, epsilon = 1e-10);
    }
}
