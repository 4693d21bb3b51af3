//! Random instance generation for the verifier suites: Haar-distributed
//! unitaries conjugating fixed-rank coordinate projectors, Ginibre density
//! operators, and symmetrized tripartite states. Covers degenerate and
//! generic cases without biasing toward commuting families.

use super::{CMat, CVec, C64, DensityOperator, ProjectorFamily, StateVector};
use rand::Rng;
use rand_distr::StandardNormal;

fn ginibre<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed unitary via QR of a Ginibre matrix with the standard
/// phase correction.
pub fn haar_unitary<R: Rng>(dim: usize, rng: &mut R) -> CMat {
    let g = ginibre(dim, dim, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / C64::new(d.norm(), 0.0)
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_pure_state<R: Rng>(dim: usize, rng: &mut R) -> StateVector {
    let v = CVec::from_fn(dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    StateVector::normalized(v).expect("Gaussian vector is nonzero almost surely")
}

/// Full-rank random density operator (normalized Ginibre `G G^dagger`).
pub fn random_density<R: Rng>(dim: usize, rng: &mut R) -> DensityOperator {
    let g = ginibre(dim, dim, rng);
    let m = &g * g.adjoint();
    let t = super::trace_re(&m);
    DensityOperator::from_raw(m.unscale(t))
}

/// Random orthogonal projector family: a Haar unitary conjugating
/// coordinate projectors whose ranks split `total_rank` into `outcomes`
/// nonempty parts. With `total_rank == dim` the family is complete.
pub fn random_projector_family<R: Rng>(
    dim: usize,
    outcomes: usize,
    total_rank: usize,
    rng: &mut R,
) -> ProjectorFamily {
    assert!(outcomes >= 1 && total_rank <= dim && outcomes <= total_rank);
    // Random composition of total_rank into `outcomes` positive parts.
    let mut cuts: Vec<usize> = (1..total_rank).collect();
    // Partial Fisher-Yates to pick outcomes-1 distinct cut points.
    for i in 0..outcomes.saturating_sub(1) {
        let j = rng.gen_range(i..cuts.len());
        cuts.swap(i, j);
    }
    let mut picks: Vec<usize> = cuts[..outcomes - 1].to_vec();
    picks.sort_unstable();
    picks.push(total_rank);
    let u = haar_unitary(dim, rng);
    let mut projectors = Vec::with_capacity(outcomes);
    let mut start = 0usize;
    for end in picks {
        let mut p = CMat::zeros(dim, dim);
        for k in start..end {
            let col = u.column(k);
            p += &col * col.adjoint();
        }
        projectors.push(p);
        start = end;
    }
    ProjectorFamily::new_unchecked(projectors)
}

/// Random effect `0 <= X <= Id`: Haar basis with uniform spectrum in [0,1].
pub fn random_effect<R: Rng>(dim: usize, rng: &mut R) -> CMat {
    let u = haar_unitary(dim, rng);
    let d = CMat::from_diagonal(&CVec::from_fn(dim, |_, _| C64::new(rng.gen::<f64>(), 0.0)));
    &u * d * u.adjoint()
}

/// Permutation-symmetric random pure state on three `local_dim` factors.
pub fn random_symmetric_tripartite<R: Rng>(local_dim: usize, rng: &mut R) -> StateVector {
    let d = local_dim;
    let raw = random_pure_state(d * d * d, rng);
    let v = raw.vector();
    let mut sym = CVec::zeros(d * d * d);
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    for (idx, amp) in v.iter().enumerate() {
        let trits = [idx / (d * d), idx / d % d, idx % d];
        for p in perms {
            let target = trits[p[0]] * d * d + trits[p[1]] * d + trits[p[2]];
            sym[target] += amp / C64::new(6.0, 0.0);
        }
    }
    StateVector::normalized(sym).expect("symmetrization of a generic state is nonzero")
}
