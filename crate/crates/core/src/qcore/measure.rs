use super::{
    scatter, validate_targets, Operator, StateVector, Subsystem, ALGEBRAIC_TOL, C64, MAX_DIM, ZERO,
};
use crate::{Error, Result};

/// Below this probability a branch is reported as impossible.
const ZERO_BRANCH: f64 = 1e-14;

/// One outcome of a projective measurement.
#[derive(Debug, Clone)]
pub struct MeasurementBranch {
    pub probability: f64,
    /// Normalized post-measurement state; `None` for a zero-probability outcome.
    pub state: Option<StateVector>,
}

fn check_projector_family(projectors: &[Operator], dim: usize) -> Result<()> {
    if projectors.is_empty() || projectors.iter().any(|p| p.dim() != dim) {
        return Err(Error::IncompleteProjectors);
    }
    let mut total = Operator::zeros(dim);
    for p in projectors {
        if !p.is_hermitian(ALGEBRAIC_TOL) || (p * p).max_deviation(p) > ALGEBRAIC_TOL {
            return Err(Error::IncompleteProjectors);
        }
        total = &total + p;
    }
    if total.max_deviation(&Operator::identity(dim)) > ALGEBRAIC_TOL {
        return Err(Error::IncompleteProjectors);
    }
    Ok(())
}

/// Measures the target qubits of `s` with a complete family of orthogonal projectors.
pub fn projective_measure(
    s: &StateVector,
    targets: &[usize],
    projectors: &[Operator],
) -> Result<Vec<MeasurementBranch>> {
    validate_targets(targets, s.num_qubits())?;
    check_projector_family(projectors, 1 << targets.len())?;
    Ok(projectors
        .iter()
        .map(|p| {
            let collapsed = p.apply_raw(targets, s);
            let probability = collapsed.norm_sqr();
            if probability < ZERO_BRANCH {
                MeasurementBranch {
                    probability: 0.0,
                    state: None,
                }
            } else {
                let state = StateVector::normalized(collapsed.amplitudes(), s.labels()).ok();
                MeasurementBranch { probability, state }
            }
        })
        .collect())
}

/// Contracts the target qubits of `s` with `outcome`, returning the probability
/// `‖(⟨outcome| ⊗ I)|s⟩‖²` and the normalized state of the remaining qubits.
pub fn conditional_state(
    s: &StateVector,
    targets: &[usize],
    outcome: &StateVector,
) -> Result<(f64, Option<StateVector>)> {
    let n = s.num_qubits();
    validate_targets(targets, n)?;
    if outcome.num_qubits() != targets.len() || targets.len() == n {
        return Err(Error::BadTargets(targets.to_vec()));
    }
    let rest: Vec<usize> = (0..n).filter(|q| !targets.contains(q)).collect();
    let mut amps = [ZERO; MAX_DIM];
    let src = s.amplitudes();
    for (r, slot) in amps.iter_mut().enumerate().take(1 << rest.len()) {
        let base = scatter(0, r, &rest, n);
        *slot = outcome
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(t, m)| m.conj() * src[scatter(base, t, targets, n)])
            .sum::<C64>();
    }
    let amps = &amps[..1 << rest.len()];
    let probability: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let labels: Vec<Subsystem> = rest.iter().map(|&q| s.labels()[q]).collect();
    if probability < ZERO_BRANCH {
        return Ok((0.0, None));
    }
    Ok((probability, Some(StateVector::normalized(amps, &labels)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::testutil::random_state;
    use crate::qcore::{bell_projectors, BellState};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn z_basis() -> [Operator; 2] {
        let zero = StateVector::basis(0, &[Subsystem::Anon]).unwrap();
        let one = StateVector::basis(1, &[Subsystem::Anon]).unwrap();
        [Operator::outer(&zero), Operator::outer(&one)]
    }

    #[test]
    fn z_measurement_of_plus() {
        let plus =
            StateVector::qubit(C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)).unwrap();
        let branches = projective_measure(&plus, &[0], &z_basis()).unwrap();
        assert_abs_diff_eq!(branches[0].probability, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(branches[1].probability, 0.5, epsilon = 1e-15);
        assert_eq!(
            branches[0].state.unwrap(),
            StateVector::basis(0, &[Subsystem::Anon]).unwrap()
        );
        assert_eq!(
            branches[1].state.unwrap(),
            StateVector::basis(1, &[Subsystem::Anon]).unwrap()
        );
    }

    #[test]
    fn zero_probability_branch_is_flagged() {
        let zero = StateVector::basis(0, &[Subsystem::Anon]).unwrap();
        let branches = projective_measure(&zero, &[0], &z_basis()).unwrap();
        assert_eq!(branches[1].probability, 0.0);
        assert!(branches[1].state.is_none());
    }

    #[test]
    fn incomplete_family_rejected() {
        let zero = StateVector::basis(0, &[Subsystem::Anon]).unwrap();
        let [p0, _] = z_basis();
        assert_eq!(
            projective_measure(&zero, &[0], &[p0]).unwrap_err(),
            Error::IncompleteProjectors
        );
        let bell = bell_projectors();
        assert!(projective_measure(&zero, &[0], &bell).is_err());
    }

    #[test]
    fn probabilities_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let bell = bell_projectors();
        for _ in 0..1000 {
            let s = random_state(&mut rng, 3);
            let a = rng.random_range(0..3);
            let b = (a + rng.random_range(1..3)) % 3;
            let total: f64 = projective_measure(&s, &[a, b], &bell)
                .unwrap()
                .iter()
                .map(|br| br.probability)
                .sum();
            assert!((total - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn conditional_state_agrees_with_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = random_state(&mut rng, 3);
        let branches = projective_measure(&s, &[0, 1], &bell_projectors()).unwrap();
        for (bell, branch) in BellState::ALL.iter().zip(&branches) {
            let (p, bob) = conditional_state(&s, &[0, 1], &bell.state()).unwrap();
            assert_abs_diff_eq!(p, branch.probability, epsilon = 1e-14);
            // the collapsed register is |bell⟩ ⊗ |bob⟩
            let expected = crate::qcore::tensor(&bell.state(), &bob.unwrap()).unwrap();
            let overlap = expected.overlap(&branch.state.unwrap()).unwrap();
            assert_abs_diff_eq!(overlap, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn conditional_on_middle_qubit() {
        // |1⟩_0 |0⟩_1 |1⟩_2 conditioned on qubit 1 = |0⟩ leaves |11⟩
        let s = StateVector::basis(
            0b101,
            &[Subsystem::Ancilla, Subsystem::Alice, Subsystem::Bob],
        )
        .unwrap();
        let zero = StateVector::basis(0, &[Subsystem::Anon]).unwrap();
        let (p, rest) = conditional_state(&s, &[1], &zero).unwrap();
        assert_eq!(p, 1.0);
        let rest = rest.unwrap();
        assert_eq!(rest.labels(), &[Subsystem::Ancilla, Subsystem::Bob]);
        assert_eq!(rest.amplitudes()[3], C64::new(1.0, 0.0));
    }
}
