//! Small dense complex-linear-algebra engine: states, projective
//! measurements, trace-norm geometry, and the randomized verifiers for the
//! measurement-theoretic inequalities used in the soundness analysis.
//!
//! Dimensions are desk scale (`d <= 512`); everything is dense `f64`
//! complex. Structural invariants are enforced at `1e-10`, bound checks at
//! `1e-9`.

pub mod game;
pub mod random;
pub mod verify;

use crate::error::{CoreError, Result};
use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Tolerance for structural invariants (hermiticity, idempotence, norms).
pub const STRUCT_TOL: f64 = 1e-10;
/// Tolerance for inequality checks.
pub const BOUND_TOL: f64 = 1e-9;

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

/// Largest absolute entry of a matrix, used as the cheap operator-distance
/// proxy in invariant checks.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn trace(m: &CMat) -> C64 {
    m.diagonal().sum()
}

pub fn trace_re(m: &CMat) -> f64 {
    trace(m).re
}

/// Embed `op` (acting on subsystem `site` of `dims`) into the full tensor
/// product space.
pub fn lift(op: &CMat, dims: &[usize], site: usize) -> CMat {
    let mut out = CMat::identity(1, 1);
    for (i, &d) in dims.iter().enumerate() {
        let factor = if i == site {
            op.clone()
        } else {
            CMat::identity(d, d)
        };
        out = out.kronecker(&factor);
    }
    out
}

/// Eigenvalues of a Hermitian matrix (symmetrized first for numerical
/// stability).
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = nalgebra::linalg::SymmetricEigen::new(h);
    eig.eigenvalues.iter().copied().collect()
}

/// Schatten-1 norm of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &CMat) -> f64 {
    hermitian_eigenvalues(m).iter().map(|l| l.abs()).sum()
}

/// `||rho - sigma||_1` without the conventional 1/2 factor.
pub fn trace_norm_distance(rho: &CMat, sigma: &CMat) -> Result<f64> {
    if rho.shape() != sigma.shape() {
        return Err(CoreError::Dimension(format!(
            "trace distance of {:?} vs {:?}",
            rho.shape(),
            sigma.shape()
        )));
    }
    Ok(trace_norm_hermitian(&(rho - sigma)))
}

/// Positive-semidefinite square root via eigendecomposition; negative
/// eigenvalues within tolerance are clamped to zero.
pub fn psd_sqrt(m: &CMat) -> Result<CMat> {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = nalgebra::linalg::SymmetricEigen::new(h);
    for l in eig.eigenvalues.iter() {
        if *l < -1e-8 {
            return Err(CoreError::Operator(format!(
                "matrix is not PSD (eigenvalue {l})"
            )));
        }
    }
    let d = CMat::from_diagonal(&eig.eigenvalues.map(|l| C64::new(l.max(0.0).sqrt(), 0.0)));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.adjoint())
}

/// A normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(CVec);

impl StateVector {
    pub fn new(v: CVec) -> Result<Self> {
        let n = v.norm();
        if (n - 1.0).abs() > 1e-8 {
            return Err(CoreError::Operator(format!("state norm {n} != 1")));
        }
        Ok(StateVector(v))
    }

    /// Normalize a nonzero vector.
    pub fn normalized(v: CVec) -> Result<Self> {
        let n = v.norm();
        if n < 1e-12 {
            return Err(CoreError::Operator("cannot normalize zero vector".into()));
        }
        Ok(StateVector(v.unscale(n)))
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = CVec::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        StateVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn vector(&self) -> &CVec {
        &self.0
    }

    pub fn into_vector(self) -> CVec {
        self.0
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator(&self.0 * self.0.adjoint())
    }
}

/// A trace-one positive-semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator(CMat);

impl DensityOperator {
    pub fn new(m: CMat) -> Result<Self> {
        if !m.is_square() {
            return Err(CoreError::Dimension("density operator must be square".into()));
        }
        if max_abs(&(&m - m.adjoint())) > 1e-8 {
            return Err(CoreError::Operator("density operator is not Hermitian".into()));
        }
        let t = trace_re(&m);
        if (t - 1.0).abs() > 1e-8 {
            return Err(CoreError::Operator(format!("trace {t} != 1")));
        }
        if hermitian_eigenvalues(&m).iter().any(|l| *l < -STRUCT_TOL) {
            return Err(CoreError::Operator("density operator is not PSD".into()));
        }
        Ok(DensityOperator(m))
    }

    /// Wrap without validation; for intermediate states produced by
    /// operations that preserve the invariants by construction.
    pub(crate) fn from_raw(m: CMat) -> Self {
        DensityOperator(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    /// Partial trace over `site` of a tensor-product space with factor
    /// dimensions `dims`.
    pub fn partial_trace(&self, dims: &[usize], site: usize) -> DensityOperator {
        let total: usize = dims.iter().product();
        assert_eq!(total, self.dim());
        let keep: Vec<usize> = (0..dims.len()).filter(|&i| i != site).collect();
        let keep_dim: usize = keep.iter().map(|&i| dims[i]).product();
        let mut out = CMat::zeros(keep_dim, keep_dim);
        // Row-major multi-index over the factors.
        let strides: Vec<usize> = {
            let mut s = vec![1usize; dims.len()];
            for i in (0..dims.len() - 1).rev() {
                s[i] = s[i + 1] * dims[i + 1];
            }
            s
        };
        let keep_strides: Vec<usize> = {
            let mut s = vec![1usize; keep.len()];
            for i in (0..keep.len().saturating_sub(1)).rev() {
                s[i] = s[i + 1] * dims[keep[i + 1]];
            }
            s
        };
        for row in 0..total {
            for col in 0..total {
                let ridx: Vec<usize> = strides.iter().zip(dims).map(|(s, d)| row / s % d).collect();
                let cidx: Vec<usize> = strides.iter().zip(dims).map(|(s, d)| col / s % d).collect();
                if ridx[site] != cidx[site] {
                    continue;
                }
                let r_out: usize = keep.iter().zip(&keep_strides).map(|(&f, s)| ridx[f] * s).sum();
                let c_out: usize = keep.iter().zip(&keep_strides).map(|(&f, s)| cidx[f] * s).sum();
                out[(r_out, c_out)] += self.0[(row, col)];
            }
        }
        DensityOperator(out)
    }
}

/// An orthogonal projector decomposition `{W^s}`.
///
/// The summed operator `W = sum_s W^s` must itself be a projector; it need
/// not be the identity (the bound verifiers use incomplete families), but
/// measurement requires completeness.
#[derive(Debug, Clone)]
pub struct ProjectorFamily {
    projectors: Vec<CMat>,
}

impl ProjectorFamily {
    pub fn new(projectors: Vec<CMat>) -> Result<Self> {
        let fam = ProjectorFamily { projectors };
        fam.validate()?;
        Ok(fam)
    }

    /// Skip validation; for deliberately malformed instances used as
    /// negative controls.
    pub fn new_unchecked(projectors: Vec<CMat>) -> Self {
        ProjectorFamily { projectors }
    }

    pub fn validate(&self) -> Result<()> {
        if self.projectors.is_empty() {
            return Err(CoreError::Operator("empty projector family".into()));
        }
        let dim = self.projectors[0].nrows();
        for (s, w) in self.projectors.iter().enumerate() {
            if w.shape() != (dim, dim) {
                return Err(CoreError::Dimension("projector dimensions differ".into()));
            }
            if max_abs(&(w - w.adjoint())) > STRUCT_TOL {
                return Err(CoreError::Operator(format!("W^{s} is not Hermitian")));
            }
            if max_abs(&(w * w - w)) > STRUCT_TOL {
                return Err(CoreError::Operator(format!("W^{s} is not idempotent")));
            }
        }
        for s in 0..self.projectors.len() {
            for t in (s + 1)..self.projectors.len() {
                if max_abs(&(&self.projectors[s] * &self.projectors[t])) > STRUCT_TOL {
                    return Err(CoreError::Operator(format!(
                        "W^{s} and W^{t} are not orthogonal"
                    )));
                }
            }
        }
        let sum = self.sum();
        if max_abs(&(&sum * &sum - &sum)) > STRUCT_TOL {
            return Err(CoreError::Operator("family sum is not a projector".into()));
        }
        Ok(())
    }

    /// Require `sum_s W^s = Id` in addition to [`validate`](Self::validate).
    pub fn validate_complete(&self) -> Result<()> {
        self.validate()?;
        let dim = self.dim();
        if max_abs(&(self.sum() - identity(dim))) > STRUCT_TOL {
            return Err(CoreError::Operator("family does not sum to identity".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].nrows()
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn projector(&self, s: usize) -> &CMat {
        &self.projectors[s]
    }

    pub fn iter(&self) -> impl Iterator<Item = &CMat> {
        self.projectors.iter()
    }

    /// `W = sum_s W^s`.
    pub fn sum(&self) -> CMat {
        let dim = self.dim();
        self.projectors
            .iter()
            .fold(CMat::zeros(dim, dim), |acc, w| acc + w)
    }
}

/// Result of a sampled projective measurement.
#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    pub outcome: usize,
    pub probability: f64,
    pub post_state: DensityOperator,
}

/// Born-rule probabilities `Tr[W^s rho]` for each outcome.
pub fn outcome_probabilities(state: &DensityOperator, family: &ProjectorFamily) -> Vec<f64> {
    family
        .iter()
        .map(|w| trace_re(&(w * state.matrix())).max(0.0))
        .collect()
}

/// Post-measurement state for a specific outcome. Requesting a
/// zero-probability branch is an error.
pub fn collapse(
    state: &DensityOperator,
    family: &ProjectorFamily,
    outcome: usize,
) -> Result<(DensityOperator, f64)> {
    let w = family.projector(outcome);
    let unnorm = w * state.matrix() * w;
    let p = trace_re(&unnorm);
    if p <= STRUCT_TOL {
        return Err(CoreError::Domain(format!(
            "outcome {outcome} has probability {p}"
        )));
    }
    Ok((DensityOperator::from_raw(unnorm.unscale(p)), p))
}

/// Sample a complete projective measurement.
pub fn measure_projective<R: Rng>(
    state: &DensityOperator,
    family: &ProjectorFamily,
    rng: &mut R,
) -> Result<MeasurementOutcome> {
    family.validate_complete()?;
    let probs = outcome_probabilities(state, family);
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(CoreError::Operator(format!(
            "outcome probabilities sum to {total}"
        )));
    }
    let mut draw: f64 = rng.gen::<f64>() * total;
    let mut outcome = probs.len() - 1;
    for (s, p) in probs.iter().enumerate() {
        if draw < *p {
            outcome = s;
            break;
        }
        draw -= p;
    }
    // Walk back from a zero-probability tail outcome if the draw landed there.
    while probs[outcome] <= STRUCT_TOL {
        outcome -= 1;
    }
    let (post_state, probability) = collapse(state, family, outcome)?;
    Ok(MeasurementOutcome {
        outcome,
        probability,
        post_state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::stream_rng;
    use approx::assert_relative_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn qubit_family() -> ProjectorFamily {
        let zero = CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        let one = CMat::from_row_slice(2, 2, &[c(0.0), c(0.0), c(0.0), c(1.0)]);
        ProjectorFamily::new(vec![zero, one]).unwrap()
    }

    fn plus_state() -> StateVector {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::new(CVec::from_vec(vec![c(s), c(s)])).unwrap()
    }

    #[test]
    fn plus_measured_in_computational_basis() {
        let fam = qubit_family();
        let rho = plus_state().density();
        let probs = outcome_probabilities(&rho, &fam);
        assert_relative_eq!(probs[0], 0.5, epsilon = 1e-12);
        assert_relative_eq!(probs[1], 0.5, epsilon = 1e-12);
        let (post0, _) = collapse(&rho, &fam, 0).unwrap();
        let expected = StateVector::basis(2, 0).density();
        assert!(max_abs(&(post0.matrix() - expected.matrix())) < 1e-12);
    }

    #[test]
    fn eigenstate_is_undisturbed() {
        let fam = qubit_family();
        let rho = StateVector::basis(2, 1).density();
        let out = measure_projective(&rho, &fam, &mut stream_rng(3, 0)).unwrap();
        assert_eq!(out.outcome, 1);
        assert_relative_eq!(out.probability, 1.0, epsilon = 1e-12);
        assert!(max_abs(&(out.post_state.matrix() - rho.matrix())) < 1e-12);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let fam = qubit_family();
        let rho = plus_state().density();
        let total: f64 = outcome_probabilities(&rho, &fam).iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_probability_branch_is_an_error() {
        let fam = qubit_family();
        let rho = StateVector::basis(2, 0).density();
        assert!(collapse(&rho, &fam, 1).is_err());
    }

    #[test]
    fn trace_norm_examples() {
        let rho = StateVector::basis(2, 0).density();
        assert_relative_eq!(
            trace_norm_distance(rho.matrix(), rho.matrix()).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        let sig = StateVector::basis(2, 1).density();
        assert_relative_eq!(
            trace_norm_distance(rho.matrix(), sig.matrix()).unwrap(),
            2.0,
            epsilon = 1e-10
        );
        let half = CMat::from_diagonal(&CVec::from_vec(vec![c(0.5), c(0.5)]));
        assert_relative_eq!(
            trace_norm_distance(rho.matrix(), &half).unwrap(),
            1.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn partial_trace_of_bell_pair_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell =
            StateVector::new(CVec::from_vec(vec![c(s), c(0.0), c(0.0), c(s)])).unwrap();
        let reduced = bell.density().partial_trace(&[2, 2], 1);
        let mixed = CMat::from_diagonal(&CVec::from_vec(vec![c(0.5), c(0.5)]));
        assert!(max_abs(&(reduced.matrix() - mixed)) < 1e-12);
    }

    #[test]
    fn family_validation_rejects_overlap() {
        let zero = CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        let bad = ProjectorFamily::new(vec![zero.clone(), zero]);
        assert!(bad.is_err());
    }
}
