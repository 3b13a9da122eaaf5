//! Hybrid distances, measurement distances and distinguishability verdicts.

use serde::Serialize;

use crate::adversary::Interval;
use crate::error::{Error, Result};
use crate::query::{prefix_states, resume, run_full, QueryAlgorithm, ThresholdInput};
use crate::state::StateVector;
use crate::{DISTINGUISH_DISTANCE, HYBRID_BOUND, NORM_TOL};

/// Hybrid analysis of the adjacent pair `(lm − 1, lm)` for an interval.
///
/// Hybrid `i` answers the first `i` queries with `O_{lm}` and the rest with
/// `O_{lm−1}`; hybrid `T` is the run on `lm`, hybrid `0` the run on `lm − 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HybridReport {
    /// `lm`, answering the early queries.
    pub k_early: usize,
    /// `lm − 1`, answering the late queries.
    pub k_late: usize,
    pub s: usize,
    /// `‖hybrid_i − hybrid_{i−1}‖`, `i = 1..=T`.
    pub per_step_distance: Vec<f64>,
    /// `(1 − 1/q)/(5 q^{s−i})`.
    pub per_step_bound: Vec<f64>,
    /// `‖ψ_i‖`: prefix state under `O_{lm}` projected onto the interval.
    pub per_step_psi: Vec<f64>,
    pub total_distance: f64,
    pub triangle_sum: f64,
    /// `Σ_i per_step_bound[i]`, never above `1/5`.
    pub total_bound: f64,
    /// Success probability on `lm − 1`.
    pub success_lo: f64,
    /// Success probability on `lm` (zero when `lm = n`).
    pub success_hi: f64,
    pub variational: f64,
}

impl HybridReport {
    pub fn triangle_holds(&self) -> bool {
        self.total_distance <= self.triangle_sum + NORM_TOL
    }

    /// `‖hybrid_i − hybrid_{i−1}‖ <= 2‖ψ_i‖` for every `i`.
    pub fn perturbation_holds(&self) -> bool {
        self.per_step_distance
            .iter()
            .zip(&self.per_step_psi)
            .all(|(d, psi)| *d <= 2.0 * psi + NORM_TOL)
    }

    pub fn per_step_bounds_hold(&self) -> bool {
        self.per_step_distance
            .iter()
            .zip(&self.per_step_bound)
            .all(|(d, b)| *d <= b + NORM_TOL)
    }

    pub fn total_within_hybrid_bound(&self) -> bool {
        self.total_distance <= HYBRID_BOUND + NORM_TOL
    }
}

/// Computes every hybrid between the runs on `lm` and `lm − 1`.
///
/// `s` is the adversary's final query step and must cover all `T` queries.
pub fn hybrid_profile(
    alg: &QueryAlgorithm,
    interval: Interval,
    s: usize,
    q: f64,
) -> Result<HybridReport> {
    let queries = alg.queries();
    if s < queries {
        return Err(Error::Regime {
            queries,
            covered: s,
        });
    }
    let n = alg.layout().n();
    let early = ThresholdInput::new(n, interval.hi())?;
    let late = ThresholdInput::new(n, interval.hi() - 1)?;

    let prefix = prefix_states(alg, &early, queries)?;
    let mut hybrids = Vec::with_capacity(queries + 1);
    for (i, state) in prefix.iter().enumerate() {
        hybrids.push(resume(alg, state.clone(), i + 1, &late)?);
    }
    hybrids.push(run_full(alg, &early)?);

    let per_step_distance = hybrids
        .windows(2)
        .map(|w| w[1].l2_distance(&w[0]))
        .collect::<Result<Vec<f64>>>()?;
    let per_step_bound: Vec<f64> = (1..=queries)
        .map(|i| (1.0 - 1.0 / q) / (5.0 * q.powi((s - i) as i32)))
        .collect();
    let per_step_psi = prefix
        .iter()
        .map(|st| st.range_norm(interval.lo(), interval.hi()))
        .collect::<Result<Vec<f64>>>()?;

    let first = &hybrids[0];
    let last = &hybrids[queries];
    let dist_lo = first.measure_index_distribution();
    let dist_hi = last.measure_index_distribution();
    Ok(HybridReport {
        k_early: early.k(),
        k_late: late.k(),
        s,
        total_distance: first.l2_distance(last)?,
        triangle_sum: per_step_distance.iter().sum(),
        total_bound: per_step_bound.iter().sum(),
        per_step_distance,
        per_step_bound,
        per_step_psi,
        success_lo: late
            .designated_answer()
            .map_or(0.0, |k| dist_lo.probabilities()[k]),
        success_hi: early
            .designated_answer()
            .map_or(0.0, |k| dist_hi.probabilities()[k]),
        variational: dist_lo.variational_distance(&dist_hi)?,
    })
}

/// Euclidean distance of two unit states and the variational distance of
/// their index-register distributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BvGap {
    pub l2: f64,
    pub variational: f64,
}

impl BvGap {
    /// `variational <= constant · l2`.
    pub fn satisfies(&self, constant: f64) -> bool {
        self.variational <= constant * self.l2 + NORM_TOL
    }

    pub fn ratio(&self) -> Option<f64> {
        (self.l2 > 0.0).then(|| self.variational / self.l2)
    }
}

pub fn bv_gap(psi: &StateVector, phi: &StateVector) -> Result<BvGap> {
    for (name, s) in [("psi", psi), ("phi", phi)] {
        let norm = s.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "{name} has norm {norm}, expected 1"
            )));
        }
    }
    Ok(BvGap {
        l2: psi.l2_distance(phi)?,
        variational: psi
            .measure_index_distribution()
            .variational_distance(&phi.measure_index_distribution())?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub distinguishable: bool,
    pub reason: String,
    pub k_lo: usize,
    pub k_hi: usize,
    pub l2_distance: f64,
    pub variational: f64,
    pub success_lo: f64,
    pub success_hi: f64,
    pub threshold: f64,
    /// The final states are within `1/5`; no correct algorithm allows that.
    pub contradiction: bool,
}

/// Decides whether `alg` tells apart the adjacent inputs `k_lo` and `k_hi = k_lo + 1`.
///
/// Distinguishable means both success probabilities reach `threshold` and
/// the final states are at least `1/4` apart.
pub fn verdict(
    alg: &QueryAlgorithm,
    k_lo: &ThresholdInput,
    k_hi: &ThresholdInput,
    threshold: f64,
) -> Result<Verdict> {
    if k_hi.k() != k_lo.k() + 1 || k_lo.n() != k_hi.n() {
        return Err(Error::NotAdjacent {
            lo: k_lo.k(),
            hi: k_hi.k(),
        });
    }
    let final_lo = run_full(alg, k_lo)?;
    let final_hi = run_full(alg, k_hi)?;
    let dist_lo = final_lo.measure_index_distribution();
    let dist_hi = final_hi.measure_index_distribution();
    let success = |d: &crate::state::IndexDistribution, input: &ThresholdInput| {
        input
            .designated_answer()
            .map_or(0.0, |k| d.probabilities()[k])
    };
    let success_lo = success(&dist_lo, k_lo);
    let success_hi = success(&dist_hi, k_hi);
    let l2 = final_lo.l2_distance(&final_hi)?;

    let far_apart = l2 >= DISTINGUISH_DISTANCE;
    let both_succeed = success_lo >= threshold && success_hi >= threshold;
    let reason = match (far_apart, both_succeed) {
        (true, true) => format!(
            "final states {l2:.6} apart (>= 1/4) and both inputs answered with probability >= {threshold}"
        ),
        (false, _) => format!("final states only {l2:.6} apart (< 1/4)"),
        (true, false) => format!(
            "success probabilities {success_lo:.6} and {success_hi:.6} do not both reach {threshold}"
        ),
    };
    Ok(Verdict {
        distinguishable: far_apart && both_succeed,
        reason,
        k_lo: k_lo.k(),
        k_hi: k_hi.k(),
        l2_distance: l2,
        variational: dist_lo.variational_distance(&dist_hi)?,
        success_lo,
        success_hi,
        threshold,
        contradiction: l2 <= HYBRID_BOUND,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{lifted_binary_search, random_algorithm, zero_query};
    use crate::state::{random_unit_state, BasisLayout};
    use crate::DEFAULT_SUCCESS_THRESHOLD;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identical_inputs_give_zero_distances() {
        // A one-element interval at lm = 1 with the zero-query algorithm.
        let alg = zero_query(8).unwrap();
        let r = hybrid_profile(&alg, Interval::new(8, 1, 1).unwrap(), 1, 18.3).unwrap();
        assert!(r.per_step_distance.is_empty());
        assert_eq!(r.total_distance, 0.0);
        assert_eq!(r.variational, 0.0);
    }

    #[test]
    fn random_algorithm_hybrids() {
        for seed in 0..5 {
            let alg = random_algorithm(16, 3, 1, seed).unwrap();
            for l in [1usize, 7, 16] {
                let r = hybrid_profile(&alg, Interval::new(16, l, 1).unwrap(), 3, 18.3).unwrap();
                assert_eq!(r.per_step_distance.len(), 3);
                assert!(r.triangle_holds());
                assert!(r.perturbation_holds());
                assert!(r.total_bound <= HYBRID_BOUND);
            }
        }
        let alg = random_algorithm(16, 3, 1, 0).unwrap();
        assert!(matches!(
            hybrid_profile(&alg, Interval::new(16, 2, 1).unwrap(), 2, 18.3),
            Err(Error::Regime { .. })
        ));
    }

    #[test]
    fn bv_examples() {
        let l = BasisLayout::new(4, 0).unwrap();
        let a = StateVector::basis_state(l, 1, false, 0).unwrap();
        let b = StateVector::basis_state(l, 3, false, 0).unwrap();
        assert_eq!(
            bv_gap(&a, &a).unwrap(),
            BvGap {
                l2: 0.0,
                variational: 0.0
            }
        );
        let g = bv_gap(&a, &b).unwrap();
        assert!((g.l2 - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(g.variational, 2.0);
        assert!(g.satisfies(4.0));
        assert!(bv_gap(&a, &StateVector::null(l)).is_err());
    }

    #[test]
    fn bv_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let l = BasisLayout::new(16, 0).unwrap();
        for _ in 0..200 {
            let a = random_unit_state(l, &mut rng);
            let b = random_unit_state(l, &mut rng);
            assert!(bv_gap(&a, &b).unwrap().satisfies(4.0));
        }
    }

    #[test]
    fn lifted_search_distinguishes_adjacent_inputs() {
        let alg = lifted_binary_search(8).unwrap();
        for k in 1..8 {
            let v = verdict(
                &alg,
                &ThresholdInput::new(8, k - 1).unwrap(),
                &ThresholdInput::new(8, k).unwrap(),
                DEFAULT_SUCCESS_THRESHOLD,
            )
            .unwrap();
            assert!(v.distinguishable, "{v:?}");
            assert_eq!((v.success_lo, v.success_hi), (1.0, 1.0));
            assert!((v.l2_distance - 2f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_query_is_never_distinguishable() {
        let alg = zero_query(8).unwrap();
        let v = verdict(
            &alg,
            &ThresholdInput::new(8, 0).unwrap(),
            &ThresholdInput::new(8, 1).unwrap(),
            DEFAULT_SUCCESS_THRESHOLD,
        )
        .unwrap();
        assert!(!v.distinguishable);
        assert_eq!(v.variational, 0.0);
        assert!(v.contradiction);
        assert!(verdict(
            &alg,
            &ThresholdInput::new(8, 0).unwrap(),
            &ThresholdInput::new(8, 2).unwrap(),
            0.75
        )
        .is_err());
    }
}
