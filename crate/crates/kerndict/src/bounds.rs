//! Cross-measure bounds and feature-space distance floors, packaged as
//! checkable certificates.
//!
//! The diversity measures constrain each other. With `n` atoms, norm
//! extremes `r^2 <= kappa(x, x) <= R^2`, coherence `gamma`, Babel measure
//! `gamma_B`, and approximation measure `delta_a`:
//!
//! * `gamma_B <= (n - 1) * gamma * R^2`, since each of the `n - 1` row
//!   terms is at most `gamma * R^2`;
//! * `gamma <= gamma_B / r^2`, since the largest correlation appears as one
//!   Babel summand;
//! * `gamma_B <= (n - 1) * R * sqrt(R^2 - delta_a^2)` and
//!   `gamma <= sqrt(R^2 - delta_a^2) / R`: projecting atom `i` onto the
//!   span of the others keeps at least the component along any single
//!   atom, so `|K[i][j]| / sqrt(K[j][j]) <= sqrt(R^2 - delta_a^2)` for
//!   every pair. Both caps are tight for two atoms.
//!
//! Each diversity measure also floors the pairwise feature distance
//! `||kappa(x_i, .) - kappa(x_j, .)||`:
//!
//! * approximation: the distance is at least `delta_a`;
//! * Babel, requiring `gamma_B < r^2`: at least `sqrt(2 r^2 - 2 gamma_B)`;
//! * coherence, requiring `gamma < 1`: at least `sqrt(2 r^2 (1 - gamma))`,
//!   the minimum of `u^2 - 2 gamma u v + v^2` over norms `u, v` in
//!   `[r, R]`, attained at `u = v = r`.
//!
//! [`certify`] measures a dictionary and emits one [`BoundCertificate`] per
//! applicable bound; bounds whose precondition fails are reported as
//! skipped with the reason. Satisfaction uses a fixed absolute tolerance of
//! `1e-9`, appropriate for quantities assembled from `O(n^2)` additions of
//! order-one 64-bit values.

use serde::Serialize;

use crate::diversity::{
    approximation_complement_sq, approximation_detail, babel, coherence, min_feature_distance,
};
use crate::error::{Error, Result};
use crate::gram::{build_gram, Dictionary, GramMatrix};
use crate::kernels::{NormBounds, Provenance};

/// Absolute tolerance deciding whether a certificate is satisfied.
pub const CERTIFICATE_TOLERANCE: f64 = 1e-9;

// ==== certificate types ===================================================

/// Whether the bound caps the measured value from above or floors it from
/// below.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Upper,
    Lower,
}

/// One measured quantity against one bound.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCertificate {
    pub name: &'static str,
    pub bound_value: f64,
    pub measured_value: f64,
    pub direction: Direction,
    pub satisfied: bool,
    pub provenance: Provenance,
}

impl BoundCertificate {
    fn new(
        name: &'static str,
        measured_value: f64,
        bound_value: f64,
        direction: Direction,
        provenance: Provenance,
    ) -> Self {
        let satisfied = match direction {
            Direction::Upper => measured_value <= bound_value + CERTIFICATE_TOLERANCE,
            Direction::Lower => measured_value >= bound_value - CERTIFICATE_TOLERANCE,
        };
        BoundCertificate { name, bound_value, measured_value, direction, satisfied, provenance }
    }
}

/// A bound that did not apply to this dictionary, and why.
#[derive(Debug, Clone, Serialize)]
pub struct SkippedBound {
    pub name: &'static str,
    pub reason: String,
}

/// Everything [`certify`] produces for one dictionary.
#[derive(Debug, Clone, Serialize)]
pub struct Certification {
    pub certificates: Vec<BoundCertificate>,
    pub skipped: Vec<SkippedBound>,
}

impl Certification {
    pub fn all_satisfied(&self) -> bool {
        self.certificates.iter().all(|c| c.satisfied)
    }
}

// ==== standalone bound evaluations ========================================

/// Babel cap implied by coherence: `(n - 1) * gamma * R^2`.
pub fn babel_bound_from_coherence(gamma: f64, n: usize, big_r2: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&gamma) || !gamma.is_finite() {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: format!("coherence must lie in [0, 1], got {gamma}"),
        });
    }
    if n < 2 {
        return Err(Error::PairwiseUndefined { n });
    }
    if !(big_r2.is_finite() && big_r2 > 0.0) {
        return Err(Error::InvalidParameter {
            name: "R2",
            reason: format!("squared norm supremum must be positive, got {big_r2}"),
        });
    }
    Ok((n - 1) as f64 * gamma * big_r2)
}

/// Coherence cap implied by the Babel measure: `gamma_B / r^2`.
pub fn coherence_bound_from_babel(gamma_b: f64, r2: f64) -> Result<f64> {
    if !(gamma_b.is_finite() && gamma_b >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "gamma_b",
            reason: format!("Babel measure must be nonnegative, got {gamma_b}"),
        });
    }
    if r2 == 0.0 {
        return Err(Error::ZeroNormInfimum);
    }
    if !(r2.is_finite() && r2 > 0.0) {
        return Err(Error::InvalidParameter {
            name: "r2",
            reason: format!("squared norm infimum must be positive, got {r2}"),
        });
    }
    Ok(gamma_b / r2)
}

/// Direct evaluation of the complement pair
/// `(R^2 - delta^2, (R^2 - delta^2) / r^2)` for an approximation measure
/// `delta`.
///
/// The returned values are reference quantities, not certified caps: a
/// dictionary's Babel measure and coherence can exceed them even when
/// `delta` is the dictionary's own approximation measure (two gaussian
/// atoms at unit separation already do). [`certify`] therefore derives its
/// approximation-based caps with the extra `(n - 1) * R` and `1 / R`
/// factors documented at the module level.
pub fn bounds_from_approximation(delta: f64, r2: f64, big_r2: f64) -> Result<(f64, f64)> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: format!("approximation measure must be nonnegative, got {delta}"),
        });
    }
    if r2 == 0.0 {
        return Err(Error::ZeroNormInfimum);
    }
    if delta * delta > big_r2 {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: format!(
                "delta^2 = {} exceeds the squared norm supremum {big_r2}; inconsistent inputs",
                delta * delta
            ),
        });
    }
    let complement = big_r2 - delta * delta;
    Ok((complement, complement / r2))
}

/// Which diversity measure a feature-distance floor is derived from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FloorMeasure {
    Approximation,
    Coherence,
    Babel,
}

/// Floor `epsilon` on every pairwise feature distance implied by one
/// measure value. Errors with "floor degenerate" when the Babel measure
/// reaches `r^2` or the coherence reaches 1, where the floor collapses.
pub fn feature_distance_floor(
    measure: FloorMeasure,
    value: f64,
    r2: f64,
    big_r2: f64,
) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::InvalidParameter {
            name: "value",
            reason: format!("measure value must be finite, got {value}"),
        });
    }
    match measure {
        FloorMeasure::Approximation => {
            if value < 0.0 || value * value > big_r2 * (1.0 + 1e-12) {
                return Err(Error::InvalidParameter {
                    name: "value",
                    reason: format!(
                        "approximation measure {value} outside [0, sqrt(R^2)] for R^2 = {big_r2}"
                    ),
                });
            }
            Ok(value)
        }
        FloorMeasure::Babel => {
            if value < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "value",
                    reason: format!("Babel measure must be nonnegative, got {value}"),
                });
            }
            if value >= r2 {
                return Err(Error::FloorDegenerate {
                    reason: format!(
                        "babel measure {value} at or above the squared norm infimum {r2}"
                    ),
                });
            }
            Ok((2.0 * r2 - 2.0 * value).sqrt())
        }
        FloorMeasure::Coherence => {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidParameter {
                    name: "value",
                    reason: format!("coherence must lie in [0, 1], got {value}"),
                });
            }
            if value >= 1.0 {
                return Err(Error::FloorDegenerate {
                    reason: format!("coherence {value} leaves no room between atoms"),
                });
            }
            Ok((2.0 * r2 * (1.0 - value)).sqrt())
        }
    }
}

// ==== certification =======================================================

/// Measures the dictionary and checks every applicable bound.
///
/// `jitter` is the requested regularization for the leave-one-out solves
/// behind the approximation measure. All returned certificates hold for
/// any valid dictionary; a certificate that fails indicates a broken Gram
/// matrix (asymmetry, indefiniteness beyond round-off) rather than an
/// unlucky input.
pub fn certify(dict: &Dictionary, jitter: f64) -> Result<Certification> {
    let k = build_gram(dict)?;
    let nb = dict.spec().norm_bounds(Some(dict.atoms()))?;
    certify_gram(&k, &nb, jitter)
}

/// [`certify`] against an already-built Gram matrix and norm bounds.
pub fn certify_gram(k: &GramMatrix, nb: &NormBounds, jitter: f64) -> Result<Certification> {
    let n = k.n();
    if n < 2 {
        return Err(Error::PairwiseUndefined { n });
    }
    let gamma = coherence(k)?;
    let gamma_b = babel(k)?;
    let detail = approximation_detail(k, jitter)?;
    let min_fd = min_feature_distance(k)?;
    let comp_a = approximation_complement_sq(k, nb.big_r2, &detail);
    let big_r = nb.big_r();
    let prov = nb.provenance;

    let mut certificates = vec![
        BoundCertificate::new(
            "babel_from_coherence",
            gamma_b,
            babel_bound_from_coherence(gamma.min(1.0), n, nb.big_r2)?,
            Direction::Upper,
            prov,
        ),
        BoundCertificate::new(
            "coherence_from_babel",
            gamma,
            coherence_bound_from_babel(gamma_b, nb.r2)?,
            Direction::Upper,
            prov,
        ),
        BoundCertificate::new(
            "babel_from_approximation",
            gamma_b,
            (n - 1) as f64 * big_r * comp_a.sqrt(),
            Direction::Upper,
            prov,
        ),
        BoundCertificate::new(
            "coherence_from_approximation",
            gamma,
            comp_a.sqrt() / big_r,
            Direction::Upper,
            prov,
        ),
        BoundCertificate::new(
            "feature_floor_from_approximation",
            min_fd,
            detail.delta,
            Direction::Lower,
            prov,
        ),
    ];
    let mut skipped = Vec::new();

    match feature_distance_floor(FloorMeasure::Babel, gamma_b, nb.r2, nb.big_r2) {
        Ok(floor) => certificates.push(BoundCertificate::new(
            "feature_floor_from_babel",
            min_fd,
            floor,
            Direction::Lower,
            prov,
        )),
        Err(Error::FloorDegenerate { reason }) => {
            skipped.push(SkippedBound { name: "feature_floor_from_babel", reason });
        }
        Err(e) => return Err(e),
    }
    match feature_distance_floor(FloorMeasure::Coherence, gamma.min(1.0), nb.r2, nb.big_r2) {
        Ok(floor) => certificates.push(BoundCertificate::new(
            "feature_floor_from_coherence",
            min_fd,
            floor,
            Direction::Lower,
            prov,
        )),
        Err(Error::FloorDegenerate { reason }) => {
            skipped.push(SkippedBound { name: "feature_floor_from_coherence", reason });
        }
        Err(e) => return Err(e),
    }

    Ok(Certification { certificates, skipped })
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

    #[test]
    fn babel_bound_hand_values() {
        assert_abs_diff_eq!(
            babel_bound_from_coherence(0.5, 5, 1.0).unwrap(),
            2.0,
            epsilon = 1e-12
        );
        assert_eq!(babel_bound_from_coherence(0.0, 7, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn babel_bound_is_tight_for_two_atoms() {
        let dict = gaussian_dict(&[0.0, 1.0]);
        let k = build_gram(&dict).unwrap();
        let gamma = coherence(&k).unwrap();
        let bound = babel_bound_from_coherence(gamma, 2, 1.0).unwrap();
        assert_abs_diff_eq!(bound, babel(&k).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn babel_bound_rejects_bad_domains() {
        assert!(babel_bound_from_coherence(1.5, 3, 1.0).is_err());
        assert!(babel_bound_from_coherence(0.5, 1, 1.0).is_err());
        assert!(babel_bound_from_coherence(0.5, 3, 0.0).is_err());
    }

    #[test]
    fn coherence_bound_hand_values() {
        assert_abs_diff_eq!(coherence_bound_from_babel(0.3, 1.0).unwrap(), 0.3, epsilon = 1e-12);
        assert_eq!(coherence_bound_from_babel(0.0, 0.5).unwrap(), 0.0);
        assert!(matches!(
            coherence_bound_from_babel(0.3, 0.0).unwrap_err(),
            Error::ZeroNormInfimum
        ));
    }

    #[test]
    fn coherence_bound_is_tight_for_two_unit_norm_atoms() {
        let k = build_gram(&gaussian_dict(&[0.0, 1.0])).unwrap();
        let bound = coherence_bound_from_babel(babel(&k).unwrap(), 1.0).unwrap();
        assert_abs_diff_eq!(bound, coherence(&k).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn bounds_from_approximation_hand_values() {
        assert_eq!(bounds_from_approximation(1.0, 1.0, 1.0).unwrap(), (0.0, 0.0));
        assert_eq!(bounds_from_approximation(0.0, 1.0, 1.0).unwrap(), (1.0, 1.0));
        assert!(bounds_from_approximation(1.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn direct_complement_is_not_a_babel_cap() {
        let dict = gaussian_dict(&[0.0, 1.0]);
        let k = build_gram(&dict).unwrap();
        let delta = crate::diversity::approximation_measure(&k, 0.0).unwrap();
        let (babel_ref, _) = bounds_from_approximation(delta, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(babel_ref, 0.3678794, epsilon = 1e-7);
        let measured = babel(&k).unwrap();
        assert!(
            measured > babel_ref,
            "the two-atom dictionary exceeds the direct complement: {measured} vs {babel_ref}"
        );
        let cert = certify(&dict, 0.0).unwrap();
        assert!(cert.all_satisfied(), "the certified caps must still hold");
    }

    #[test]
    fn feature_floor_hand_values() {
        let from_babel = feature_distance_floor(FloorMeasure::Babel, 0.32, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(from_babel, 1.36f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(from_babel, 1.1661904, epsilon = 1e-7);
        let from_approx =
            feature_distance_floor(FloorMeasure::Approximation, 0.5, 1.0, 1.0).unwrap();
        assert_eq!(from_approx, 0.5);
        let from_coherence =
            feature_distance_floor(FloorMeasure::Coherence, 0.5, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(from_coherence, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_floors_error_with_the_floor_degenerate_message() {
        let err = feature_distance_floor(FloorMeasure::Babel, 1.2, 1.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("floor degenerate"), "got: {err}");
        let err = feature_distance_floor(FloorMeasure::Coherence, 1.0, 1.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("floor degenerate"), "got: {err}");
    }

    #[test]
    fn orthonormal_pair_certificates_all_hold() {
        let dict = Dictionary::new(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            KernelSpec::linear(),
        )
        .unwrap();
        let cert = certify(&dict, 0.0).unwrap();
        assert!(cert.all_satisfied());
        assert!(cert.skipped.is_empty());
        let babel_cert = cert
            .certificates
            .iter()
            .find(|c| c.name == "babel_from_coherence")
            .expect("babel certificate present");
        assert_eq!(babel_cert.measured_value, 0.0);
        assert_eq!(babel_cert.bound_value, 0.0);
        assert!(babel_cert.satisfied, "a bound met with equality is satisfied");
    }

    #[test]
    fn duplicate_atoms_skip_the_degenerate_floors() {
        let cert = certify(&gaussian_dict(&[0.4, 0.4]), 0.0).unwrap();
        assert!(cert.all_satisfied());
        let skipped: Vec<&str> = cert.skipped.iter().map(|s| s.name).collect();
        assert!(skipped.contains(&"feature_floor_from_coherence"));
        assert!(skipped.contains(&"feature_floor_from_babel"));
        for s in &cert.skipped {
            assert!(!s.reason.is_empty(), "skip must carry a reason");
        }
    }

    #[test]
    fn certificates_carry_the_norm_bound_provenance() {
        let dict = Dictionary::new(vec![vec![1.0], vec![2.0]], KernelSpec::linear()).unwrap();
        let cert = certify(&dict, 0.0).unwrap();
        assert!(cert.certificates.iter().all(|c| c.provenance == Provenance::Empirical));
        assert!(cert.all_satisfied());
    }

    #[test]
    fn two_atom_caps_are_tight() {
        let dict = gaussian_dict(&[0.0, 1.0]);
        let cert = certify(&dict, 0.0).unwrap();
        let by_name = |name: &str| {
            cert.certificates
                .iter()
                .find(|c| c.name == name)
                .unwrap_or_else(|| panic!("{name} missing"))
        };
        let cap_b = by_name("babel_from_approximation");
        assert_abs_diff_eq!(cap_b.bound_value, cap_b.measured_value, epsilon = 1e-9);
        let cap_c = by_name("coherence_from_approximation");
        assert_abs_diff_eq!(cap_c.bound_value, cap_c.measured_value, epsilon = 1e-9);
    }
}
