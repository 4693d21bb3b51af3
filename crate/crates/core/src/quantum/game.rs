//! Two-party entangled games with a binary second player, and the coupling
//! construction in which that player answers both of its possible
//! questions by consecutive measurement.

use super::{CMat, ProjectorFamily, StateVector, BOUND_TOL};
use crate::error::{CoreError, Result};
use serde::Serialize;

/// A two-player one-round game. The first player receives `x` from a
/// uniform question set, the second a uniform bit `y`; they answer `a` and
/// `b` and win when the predicate accepts. The strategy (shared state plus
/// per-question projective measurements) is part of the spec so the
/// evaluator can compute exact winning probabilities.
pub struct GameSpec {
    pub num_x: usize,
    pub num_a: usize,
    pub num_b: usize,
    /// `predicate[((x * 2 + y) * num_a + a) * num_b + b]`.
    pub predicate: Vec<bool>,
    pub state: StateVector,
    /// One complete family per `x`, on the first factor.
    pub alice: Vec<ProjectorFamily>,
    /// One complete family per `y` in {0, 1}, on the second factor.
    pub bob: [ProjectorFamily; 2],
}

impl GameSpec {
    pub fn accepts(&self, x: usize, y: usize, a: usize, b: usize) -> bool {
        self.predicate[((x * 2 + y) * self.num_a + a) * self.num_b + b]
    }

    fn accepted_responses(&self, x: usize, y: usize, a: usize) -> Vec<usize> {
        (0..self.num_b).filter(|&b| self.accepts(x, y, a, b)).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.alice.len() != self.num_x {
            return Err(CoreError::Dimension("one Alice family per question".into()));
        }
        let da = self.alice[0].dim();
        let db = self.bob[0].dim();
        if self.state.dim() != da * db {
            return Err(CoreError::Dimension("state must live on dA x dB".into()));
        }
        for fam in self.alice.iter().chain(self.bob.iter()) {
            fam.validate_complete()?;
            if fam.len() > self.num_a.max(self.num_b) {
                return Err(CoreError::Dimension("family has too many outcomes".into()));
            }
        }
        Ok(())
    }
}

/// Exact game and coupling-game values for one strategy, with the
/// quadratic lower bound `omega_coup >= (2/|S_max|)(omega - 1/2)^2`.
#[derive(Debug, Clone, Serialize)]
pub struct CouplingCheck {
    pub omega: f64,
    pub omega_coup: f64,
    pub s_max: usize,
    pub rhs: f64,
    pub applicable: bool,
    pub holds: bool,
}

pub fn coupling_game_eval(spec: &GameSpec) -> Result<CouplingCheck> {
    spec.validate()?;
    let da = spec.alice[0].dim();
    let db = spec.bob[0].dim();
    let dims = [da, db];
    let psi = spec.state.vector();

    let mut s_max = 0usize;
    for x in 0..spec.num_x {
        for y in 0..2 {
            for a in 0..spec.num_a {
                s_max = s_max.max(spec.accepted_responses(x, y, a).len());
            }
        }
    }

    let weight = 1.0 / (2.0 * spec.num_x as f64);
    let mut omega = 0.0;
    let mut omega_coup = 0.0;
    for x in 0..spec.num_x {
        let fam_a = &spec.alice[x];
        for a in 0..fam_a.len().min(spec.num_a) {
            let wa = super::lift(fam_a.projector(a), &dims, 0);
            let after_a = &wa * psi;
            if after_a.norm_squared() < 1e-14 {
                continue;
            }
            for y in 0..2usize {
                let fam_b = &spec.bob[y];
                let fam_b2 = &spec.bob[1 - y];
                for b in spec.accepted_responses(x, y, a) {
                    if b >= fam_b.len() {
                        continue;
                    }
                    let wb = super::lift(fam_b.projector(b), &dims, 1);
                    let after_b = &wb * &after_a;
                    omega += weight * after_b.norm_squared();
                    for b2 in spec.accepted_responses(x, 1 - y, a) {
                        if b2 >= fam_b2.len() {
                            continue;
                        }
                        let wb2 = super::lift(fam_b2.projector(b2), &dims, 1);
                        omega_coup += weight * (&wb2 * &after_b).norm_squared();
                    }
                }
            }
        }
    }

    let applicable = omega > 0.5 && s_max > 0;
    let rhs = if s_max > 0 {
        (2.0 / s_max as f64) * (omega - 0.5).powi(2)
    } else {
        0.0
    };
    let holds = !applicable || omega_coup >= rhs - BOUND_TOL;
    Ok(CouplingCheck {
        omega,
        omega_coup,
        s_max,
        rhs,
        applicable,
        holds,
    })
}

/// Constant-winner game for boundary tests: the second player wins with a
/// fixed answer regardless of questions.
pub fn fixed_answer_game(db_accepting: usize) -> GameSpec {
    use super::{identity, CVec, C64};
    let zero = CMat::from_row_slice(2, 2, &[
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
    ]);
    let one = identity(2) - &zero;
    let fam = ProjectorFamily::new(vec![zero, one]).unwrap();
    let mut predicate = vec![false; 2 * 2 * 2];
    for x in 0..1 {
        for y in 0..2 {
            for a in 0..2 {
                predicate[((x * 2 + y) * 2 + a) * 2 + db_accepting] = true;
            }
        }
    }
    let mut v = CVec::zeros(4);
    v[db_accepting] = C64::new(1.0, 0.0);
    GameSpec {
        num_x: 1,
        num_a: 2,
        num_b: 2,
        predicate,
        state: StateVector::new(v).unwrap(),
        alice: vec![fam.clone()],
        bob: [fam.clone(), fam],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fixed_answer_game_saturates() {
        // One accepted answer everywhere: omega = 1, |S_max| = 1, rhs = 0.5.
        let spec = fixed_answer_game(0);
        let chk = coupling_game_eval(&spec).unwrap();
        assert_relative_eq!(chk.omega, 1.0, epsilon = 1e-10);
        assert_relative_eq!(chk.omega_coup, 1.0, epsilon = 1e-10);
        assert_eq!(chk.s_max, 1);
        assert_relative_eq!(chk.rhs, 0.5, epsilon = 1e-10);
        assert!(chk.holds);
    }

    #[test]
    fn half_value_strategy_is_vacuous() {
        // Accept only y = 0 runs: omega = 1/2 exactly.
        let mut spec = fixed_answer_game(0);
        for x in 0..1 {
            for a in 0..2 {
                for b in 0..2 {
                    spec.predicate[((x * 2 + 1) * 2 + a) * 2 + b] = false;
                    spec.predicate[((x * 2) * 2 + a) * 2 + b] = true;
                }
            }
        }
        let chk = coupling_game_eval(&spec).unwrap();
        assert_relative_eq!(chk.omega, 0.5, epsilon = 1e-10);
        assert!(!chk.applicable);
        assert!(chk.holds);
    }
}
