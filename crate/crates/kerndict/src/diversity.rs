//! The four diversity measures of a kernel dictionary.
//!
//! For a dictionary with Gram matrix `K` and atoms `x_1, ..., x_n`:
//!
//! * distance measure `delta_d`: square root of the smallest scaled
//!   projection residual over ordered pairs,
//!   `delta_d^2 = min_{i != j} ( K[i][i] - K[i][j]^2 / K[j][j] )`;
//! * approximation measure `delta_a`: square root of the smallest
//!   leave-one-out residual,
//!   `delta_a^2 = min_i ( K[i][i] - kappa_{\i}(x_i)^T K_{\i}^{-1} kappa_{\i}(x_i) )`;
//! * coherence `gamma`: largest normalized correlation,
//!   `gamma = max_{i != j} |K[i][j]| / sqrt(K[i][i] K[j][j])`;
//! * Babel measure `gamma_B`: largest absolute off-diagonal row sum,
//!   `gamma_B = max_i sum_{j != i} |K[i][j]|`.
//!
//! The Babel measure is kept unnormalized; its normalized variant is only
//! reachable through the box `[gamma_B / R^2, gamma_B / r^2]` in the bounds
//! module. Projecting an atom onto the span of all the others can only
//! shrink the residual relative to projecting onto a single atom, so
//! `delta_a <= delta_d` always.
//!
//! All measures need at least two atoms; round-off can push a residual
//! slightly negative for near-duplicate atoms, and such values are clamped
//! to zero before the square root.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gram::{build_gram, loo_projection_sq, Dictionary, GramMatrix};

// ==== report ==============================================================

/// All four measures of one dictionary, plus bookkeeping.
#[derive(Debug, Clone, Serialize)]
pub struct DiversityReport {
    /// Number of atoms.
    pub cardinality: usize,
    /// Distance measure `delta_d`.
    pub distance_delta: f64,
    /// Approximation measure `delta_a`.
    pub approximation_delta: f64,
    /// Coherence `gamma`, in `[0, 1]`.
    pub coherence_gamma: f64,
    /// Babel measure `gamma_B`, unnormalized.
    pub babel_gamma: f64,
    /// Largest diagonal jitter any leave-one-out factorization needed;
    /// zero when every factorization succeeded unregularized.
    pub jitter_used: f64,
}

// ==== individual measures =================================================

/// Distance measure: smallest scaled projection distance over atom pairs.
pub fn distance_measure(k: &GramMatrix) -> Result<f64> {
    Ok(distance_sq_min(k)?.max(0.0).sqrt())
}

/// Approximation measure: smallest leave-one-out projection residual, with
/// `jitter` as the requested diagonal regularization for the solves.
pub fn approximation_measure(k: &GramMatrix, jitter: f64) -> Result<f64> {
    Ok(approximation_detail(k, jitter)?.delta)
}

/// Coherence: largest normalized correlation between distinct atoms.
pub fn coherence(k: &GramMatrix) -> Result<f64> {
    let n = require_pair(k)?;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let corr = k.get(i, j).abs() / (k.diag(i) * k.diag(j)).sqrt();
            worst = worst.max(corr);
        }
    }
    Ok(worst)
}

/// Babel measure: largest absolute off-diagonal row sum.
pub fn babel(k: &GramMatrix) -> Result<f64> {
    let n = require_pair(k)?;
    let mut worst = 0.0f64;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            if j != i {
                row += k.get(i, j).abs();
            }
        }
        worst = worst.max(row);
    }
    Ok(worst)
}

/// Measures a dictionary end to end: builds the Gram matrix once and
/// bundles all four measures. Field values agree bit-exactly with the
/// individual operations on the same Gram matrix.
pub fn diversity_report(dict: &Dictionary, jitter: f64) -> Result<DiversityReport> {
    let k = build_gram(dict)?;
    diversity_report_from_gram(&k, jitter)
}

/// [`diversity_report`] for an already-built Gram matrix, which is what the
/// certificate workflow on imported Gram CSV files uses.
pub fn diversity_report_from_gram(k: &GramMatrix, jitter: f64) -> Result<DiversityReport> {
    let detail = approximation_detail(k, jitter)?;
    Ok(DiversityReport {
        cardinality: k.n(),
        distance_delta: distance_measure(k)?,
        approximation_delta: detail.delta,
        coherence_gamma: coherence(k)?,
        babel_gamma: babel(k)?,
        jitter_used: detail.jitter_used,
    })
}

// ==== internal detail for bound and floor computations ====================

/// Approximation measure plus the per-atom projection energies the solves
/// produce along the way.
pub(crate) struct ApproximationDetail {
    pub delta: f64,
    pub jitter_used: f64,
    /// `projections_sq[i]` is the squared norm of the projection of atom
    /// `i` onto the span of the others.
    pub projections_sq: Vec<f64>,
}

/// Runs the `n` leave-one-out solves with one reused scratch buffer.
pub(crate) fn approximation_detail(k: &GramMatrix, jitter: f64) -> Result<ApproximationDetail> {
    let n = require_pair(k)?;
    let mut mat = Vec::new();
    let mut rhs = Vec::new();
    let mut min_residual = f64::INFINITY;
    let mut jitter_used = 0.0f64;
    let mut projections_sq = Vec::with_capacity(n);
    for i in 0..n {
        let (proj_sq, jit) = loo_projection_sq(k, i, jitter, &mut mat, &mut rhs)?;
        let proj_sq = proj_sq.max(0.0);
        projections_sq.push(proj_sq);
        jitter_used = jitter_used.max(jit);
        min_residual = min_residual.min(k.diag(i) - proj_sq);
    }
    Ok(ApproximationDetail {
        delta: min_residual.max(0.0).sqrt(),
        jitter_used,
        projections_sq,
    })
}

/// The squared complement `R^2 - delta_d^2`, evaluated as
/// `max_{i != j} ( (R^2 - K[i][i]) + K[i][j]^2 / K[j][j] )`.
///
/// Recovering the complement from an already-rounded `delta_d^2` destroys
/// it entirely when `delta_d^2` rounds to `R^2`: near that point one unit
/// in the last place of the measure corresponds to a jump of about `1e-8`
/// in `sqrt(R^2 - delta_d^2)`. The form above is a sum of nonnegative
/// terms, so it keeps full relative precision in exactly the regime where
/// the subtraction loses everything.
pub(crate) fn distance_complement_sq(k: &GramMatrix, big_r2: f64) -> Result<f64> {
    let n = require_pair(k)?;
    let mut worst = 0.0f64;
    for i in 0..n {
        let slack = (big_r2 - k.diag(i)).max(0.0);
        for j in 0..n {
            if j != i {
                let term = slack + k.get(i, j) * k.get(i, j) / k.diag(j);
                worst = worst.max(term);
            }
        }
    }
    Ok(worst)
}

/// The squared complement `R^2 - delta_a^2`, evaluated cancellation-free as
/// `max_i ( (R^2 - K[i][i]) + projection_sq[i] )` from the leave-one-out
/// projection energies.
pub(crate) fn approximation_complement_sq(
    k: &GramMatrix,
    big_r2: f64,
    detail: &ApproximationDetail,
) -> f64 {
    let mut worst = 0.0f64;
    for (i, proj_sq) in detail.projections_sq.iter().enumerate() {
        worst = worst.max((big_r2 - k.diag(i)).max(0.0) + proj_sq);
    }
    worst
}

/// Smallest pairwise feature-space distance,
/// `min_{i < j} sqrt( K[i][i] - 2 K[i][j] + K[j][j] )`.
pub fn min_feature_distance(k: &GramMatrix) -> Result<f64> {
    let n = require_pair(k)?;
    let mut min_sq = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            let d_sq = k.diag(i) - 2.0 * k.get(i, j) + k.diag(j);
            min_sq = min_sq.min(d_sq);
        }
    }
    Ok(min_sq.max(0.0).sqrt())
}

fn distance_sq_min(k: &GramMatrix) -> Result<f64> {
    let n = require_pair(k)?;
    let mut min_sq = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            if j != i {
                let residual = k.diag(i) - k.get(i, j) * k.get(i, j) / k.diag(j);
                min_sq = min_sq.min(residual);
            }
        }
    }
    Ok(min_sq)
}

fn require_pair(k: &GramMatrix) -> Result<usize> {
    let n = k.n();
    if n < 2 {
        return Err(Error::PairwiseUndefined { n });
    }
    Ok(n)
}

// ==== tests ===============================================================

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelSpec;
    use approx::assert_abs_diff_eq;

    fn gaussian_dict(points: &[f64]) -> Dictionary {
        let atoms = points.iter().map(|&x| vec![x]).collect();
        Dictionary::new(atoms, KernelSpec::gaussian(1.0).unwrap()).unwrap()
    }

    fn orthonormal_pair() -> Dictionary {
        Dictionary::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], KernelSpec::linear()).unwrap()
    }

    #[test]
    fn duplicate_atoms_have_zero_distance() {
        let k = build_gram(&gaussian_dict(&[0.3, 0.3])).unwrap();
        assert_eq!(distance_measure(&k).unwrap(), 0.0);
    }

    #[test]
    fn two_gaussian_atoms_distance_hand_value() {
        let k = build_gram(&gaussian_dict(&[0.0, 1.0])).unwrap();
        let expected = (1.0 - (-1.0f64).exp()).sqrt();
        assert_abs_diff_eq!(distance_measure(&k).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(distance_measure(&k).unwrap(), 0.7950601, epsilon = 1e-7);
    }

    #[test]
    fn orthonormal_atoms_have_unit_distance() {
        let k = build_gram(&orthonormal_pair()).unwrap();
        assert_eq!(distance_measure(&k).unwrap(), 1.0);
        assert_eq!(approximation_measure(&k, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn two_atom_approximation_equals_distance() {
        let k = build_gram(&gaussian_dict(&[0.0, 1.0])).unwrap();
        let dist = distance_measure(&k).unwrap();
        let approx = approximation_measure(&k, 0.0).unwrap();
        assert_abs_diff_eq!(approx, dist, epsilon = 1e-12);
        assert_abs_diff_eq!(approx, 0.7950601, epsilon = 1e-7);
    }

    #[test]
    fn approximation_never_exceeds_distance() {
        let k = build_gram(&gaussian_dict(&[0.0, 0.1, 1.0])).unwrap();
        let dist = distance_measure(&k).unwrap();
        let approx = approximation_measure(&k, 0.0).unwrap();
        assert!(
            approx <= dist + 1e-12,
            "approximation {approx} must not exceed distance {dist}"
        );
    }

    #[test]
    fn coherence_of_orthonormal_and_duplicate_pairs() {
        let k_orth = build_gram(&orthonormal_pair()).unwrap();
        assert_eq!(coherence(&k_orth).unwrap(), 0.0);
        let k_dup = build_gram(&gaussian_dict(&[0.5, 0.5])).unwrap();
        assert_eq!(coherence(&k_dup).unwrap(), 1.0);
    }

    #[test]
    fn two_gaussian_atoms_coherence_hand_value() {
        let k = build_gram(&gaussian_dict(&[0.0, 1.0])).unwrap();
        assert_abs_diff_eq!(coherence(&k).unwrap(), 0.6065307, epsilon = 1e-7);
    }

    #[test]
    fn babel_of_orthonormal_pair_vanishes() {
        let k = build_gram(&orthonormal_pair()).unwrap();
        assert_eq!(babel(&k).unwrap(), 0.0);
    }

    #[test]
    fn two_gaussian_atoms_babel_is_the_single_correlation() {
        let k = build_gram(&gaussian_dict(&[0.0, 1.0])).unwrap();
        assert_abs_diff_eq!(babel(&k).unwrap(), 0.6065307, epsilon = 1e-7);
    }

    #[test]
    fn babel_matches_a_direct_row_sum() {
        let k = build_gram(&gaussian_dict(&[0.0, 0.4, 1.3])).unwrap();
        let mut expected = 0.0f64;
        for i in 0..3 {
            let row: f64 = (0..3).filter(|&j| j != i).map(|j| k.get(i, j).abs()).sum();
            expected = expected.max(row);
        }
        assert_eq!(babel(&k).unwrap(), expected);
    }

    #[test]
    fn babel_dominates_coherence_for_unit_norm_kernels() {
        let k = build_gram(&gaussian_dict(&[0.0, 0.4, 1.3])).unwrap();
        assert!(babel(&k).unwrap() >= coherence(&k).unwrap() - 1e-12);
    }

    #[test]
    fn single_atom_measures_are_errors() {
        let k = build_gram(&gaussian_dict(&[0.0])).unwrap();
        for result in [
            distance_measure(&k),
            approximation_measure(&k, 0.0),
            coherence(&k),
            babel(&k),
        ] {
            let err = result.unwrap_err();
            assert!(
                err.to_string().contains("pairwise measure undefined"),
                "unexpected error: {err}"
            );
        }
        let dict = gaussian_dict(&[0.0]);
        assert!(diversity_report(&dict, 0.0).is_err());
    }

    #[test]
    fn report_matches_individual_operations_bit_exactly() {
        let dict = gaussian_dict(&[0.0, 0.6, 1.7, 2.1]);
        let k = build_gram(&dict).unwrap();
        let report = diversity_report(&dict, 0.0).unwrap();
        assert_eq!(report.cardinality, 4);
        assert_eq!(report.distance_delta, distance_measure(&k).unwrap());
        assert_eq!(report.approximation_delta, approximation_measure(&k, 0.0).unwrap());
        assert_eq!(report.coherence_gamma, coherence(&k).unwrap());
        assert_eq!(report.babel_gamma, babel(&k).unwrap());
    }

    #[test]
    fn orthonormal_pair_report_values() {
        let report = diversity_report(&orthonormal_pair(), 0.0).unwrap();
        assert_eq!(report.cardinality, 2);
        assert_eq!(report.distance_delta, 1.0);
        assert_eq!(report.approximation_delta, 1.0);
        assert_eq!(report.coherence_gamma, 0.0);
        assert_eq!(report.babel_gamma, 0.0);
        assert_eq!(report.jitter_used, 0.0);
    }

    #[test]
    fn duplicate_pair_report_values() {
        let report = diversity_report(&gaussian_dict(&[0.2, 0.2]), 0.0).unwrap();
        assert_eq!(report.distance_delta, 0.0);
        assert_eq!(report.approximation_delta, 0.0);
        assert_eq!(report.coherence_gamma, 1.0);
        assert_eq!(report.babel_gamma, 1.0);
    }

    #[test]
    fn report_serializes_to_a_flat_json_object() {
        let report = diversity_report(&gaussian_dict(&[0.0, 1.0]), 0.0).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        let obj = json.as_object().expect("report must serialize to an object");
        for field in [
            "cardinality",
            "distance_delta",
            "approximation_delta",
            "coherence_gamma",
            "babel_gamma",
            "jitter_used",
        ] {
            assert!(obj.contains_key(field), "missing field {field}");
        }
        assert_eq!(obj.len(), 6);
    }

    #[test]
    fn complements_match_their_direct_forms_when_well_separated() {
        let k = build_gram(&gaussian_dict(&[0.0, 0.8, 2.0])).unwrap();
        let delta_d = distance_measure(&k).unwrap();
        let comp_d = distance_complement_sq(&k, 1.0).unwrap();
        assert_abs_diff_eq!(comp_d, 1.0 - delta_d * delta_d, epsilon = 1e-12);
        let detail = approximation_detail(&k, 0.0).unwrap();
        let comp_a = approximation_complement_sq(&k, 1.0, &detail);
        assert_abs_diff_eq!(comp_a, 1.0 - detail.delta * detail.delta, epsilon = 1e-12);
    }

    #[test]
    fn complements_keep_precision_for_nearly_orthogonal_atoms() {
        let k = build_gram(&gaussian_dict(&[0.0, 9.0, 20.0])).unwrap();
        let gamma = coherence(&k).unwrap();
        assert!(gamma > 0.0, "atoms are correlated, if only barely");
        let comp_d = distance_complement_sq(&k, 1.0).unwrap();
        assert!(
            comp_d.sqrt() >= gamma,
            "stable complement root {} must dominate coherence {gamma}",
            comp_d.sqrt()
        );
        let detail = approximation_detail(&k, 0.0).unwrap();
        let comp_a = approximation_complement_sq(&k, 1.0, &detail);
        assert!(
            comp_a.sqrt() >= gamma - 1e-15,
            "projection-based complement root {} must dominate coherence {gamma}",
            comp_a.sqrt()
        );
    }

    #[test]
    fn min_feature_distance_hand_value() {
        let k = build_gram(&gaussian_dict(&[0.0, 1.0])).unwrap();
        let expected = (2.0 - 2.0 * (-0.5f64).exp()).sqrt();
        assert_abs_diff_eq!(min_feature_distance(&k).unwrap(), expected, epsilon = 1e-12);
    }
}
