//! Positive definite kernel families and their norm bounds.
//!
//! A positive definite kernel `kappa` maps a point `x` to the feature-space
//! element `kappa(x, .)`, and inner products between features reduce to plain
//! kernel evaluations: `<kappa(x, .), kappa(y, .)> = kappa(x, y)`. Every
//! diversity measure in this crate is built from such evaluations.
//!
//! Six families are supported:
//!
//! | family                  | expression                          |
//! |-------------------------|-------------------------------------|
//! | linear                  | `<x, y>`                            |
//! | polynomial              | `(<x, y> + c)^p`                    |
//! | projective-exponential  | `exp(<x, y>)`                       |
//! | inverse-multiquadratic  | `(||x - y||^2 + sigma)^(-p)`        |
//! | radial-exponential      | `exp(-||x - y|| / sigma)`           |
//! | gaussian                | `exp(-||x - y||^2 / (2 sigma^2))`   |
//!
//! The squared feature norm of a point is `kappa(x, x)`. Its infimum `r^2`
//! and supremum `R^2` over the working domain appear in most bounds, so
//! [`KernelSpec::norm_bounds`] computes them analytically where the family
//! has a constant diagonal (gaussian and radial-exponential are unit-norm,
//! the inverse-multiquadratic diagonal is `sigma^(-p)`) and empirically over
//! a supplied point set otherwise.

use serde::Serialize;

use crate::error::{Error, Result};

// ==== families ===========================================================

/// The supported kernel families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelFamily {
    Linear,
    Polynomial,
    ProjectiveExponential,
    InverseMultiquadratic,
    RadialExponential,
    Gaussian,
}

impl KernelFamily {
    /// Canonical lowercase name, as used in configuration strings.
    pub fn name(&self) -> &'static str {
        match self {
            KernelFamily::Linear => "linear",
            KernelFamily::Polynomial => "polynomial",
            KernelFamily::ProjectiveExponential => "projective-exponential",
            KernelFamily::InverseMultiquadratic => "inverse-multiquadratic",
            KernelFamily::RadialExponential => "radial-exponential",
            KernelFamily::Gaussian => "gaussian",
        }
    }

    /// Whether the kernel depends on `x` and `y` only through `||x - y||`.
    pub fn is_radial(&self) -> bool {
        matches!(
            self,
            KernelFamily::InverseMultiquadratic
                | KernelFamily::RadialExponential
                | KernelFamily::Gaussian
        )
    }

    /// Whether `kappa(x, x) = 1` for every point.
    pub fn is_unit_norm(&self) -> bool {
        matches!(self, KernelFamily::RadialExponential | KernelFamily::Gaussian)
    }
}

// ==== kernel specification ===============================================

/// A fully parameterized kernel.
///
/// Fields not used by the selected family are ignored by evaluation but are
/// still validated when constructed through [`KernelSpec::new`] or parsed
/// from a configuration string.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    /// Bandwidth for the gaussian and radial-exponential families; additive
    /// offset for the inverse-multiquadratic family.
    pub sigma: f64,
    /// Exponent for the polynomial and inverse-multiquadratic families.
    pub p: f64,
    /// Additive constant for the polynomial family.
    pub c: f64,
}

impl KernelSpec {
    /// Builds a spec and validates the parameters relevant to the family.
    pub fn new(family: KernelFamily, sigma: f64, p: f64, c: f64) -> Result<Self> {
        let spec = KernelSpec { family, sigma, p, c };
        spec.validate()?;
        Ok(spec)
    }

    pub fn linear() -> Self {
        KernelSpec { family: KernelFamily::Linear, sigma: 1.0, p: 1.0, c: 0.0 }
    }

    pub fn polynomial(p: f64, c: f64) -> Result<Self> {
        KernelSpec::new(KernelFamily::Polynomial, 1.0, p, c)
    }

    pub fn projective_exponential() -> Self {
        KernelSpec { family: KernelFamily::ProjectiveExponential, sigma: 1.0, p: 1.0, c: 0.0 }
    }

    pub fn inverse_multiquadratic(sigma: f64, p: f64) -> Result<Self> {
        KernelSpec::new(KernelFamily::InverseMultiquadratic, sigma, p, 0.0)
    }

    pub fn radial_exponential(sigma: f64) -> Result<Self> {
        KernelSpec::new(KernelFamily::RadialExponential, sigma, 1.0, 0.0)
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        KernelSpec::new(KernelFamily::Gaussian, sigma, 1.0, 0.0)
    }

    /// Checks the parameters used by the family: `sigma > 0`, `p > 0`,
    /// `c >= 0`, all finite.
    pub fn validate(&self) -> Result<()> {
        let needs_sigma = matches!(
            self.family,
            KernelFamily::Gaussian
                | KernelFamily::RadialExponential
                | KernelFamily::InverseMultiquadratic
        );
        if needs_sigma && !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma",
                reason: format!("must be a positive finite real, got {}", self.sigma),
            });
        }
        let needs_p = matches!(
            self.family,
            KernelFamily::Polynomial | KernelFamily::InverseMultiquadratic
        );
        if needs_p && !(self.p.is_finite() && self.p > 0.0) {
            return Err(Error::InvalidParameter {
                name: "p",
                reason: format!("must be a positive finite real, got {}", self.p),
            });
        }
        if self.family == KernelFamily::Polynomial && !(self.c.is_finite() && self.c >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "c",
                reason: format!("must be a nonnegative finite real, got {}", self.c),
            });
        }
        Ok(())
    }

    /// Evaluates `kappa(x, y)`.
    ///
    /// Errors on dimension mismatch, zero-dimensional points, and non-finite
    /// coordinates.
    pub fn evaluate(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_point(x)?;
        check_point(y)?;
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
        }
        Ok(match self.family {
            KernelFamily::Linear => dot(x, y),
            KernelFamily::Polynomial => (dot(x, y) + self.c).powf(self.p),
            KernelFamily::ProjectiveExponential => dot(x, y).exp(),
            KernelFamily::InverseMultiquadratic => {
                (distance_sq(x, y) + self.sigma).powf(-self.p)
            }
            KernelFamily::RadialExponential => (-distance_sq(x, y).sqrt() / self.sigma).exp(),
            KernelFamily::Gaussian => {
                (-distance_sq(x, y) / (2.0 * self.sigma * self.sigma)).exp()
            }
        })
    }

    /// Squared feature norm and its extremes over a domain.
    ///
    /// Unit-norm families and the inverse-multiquadratic family have a
    /// constant diagonal, so their bounds are analytic and `data` is
    /// ignored. The remaining families take the observed extremes of
    /// `kappa(x, x)` over the supplied points; bounds derived this way hold
    /// on the observed data and are flagged [`Provenance::Empirical`].
    ///
    /// Errors when an empirical family gets no data, and when the infimum
    /// `r^2` comes out zero (a zero vector under the linear kernel, for
    /// example), since several bounds divide by `r^2`.
    pub fn norm_bounds(&self, data: Option<&[Vec<f64>]>) -> Result<NormBounds> {
        self.validate()?;
        match self.family {
            KernelFamily::Gaussian | KernelFamily::RadialExponential => Ok(NormBounds {
                r2: 1.0,
                big_r2: 1.0,
                provenance: Provenance::Analytic,
            }),
            KernelFamily::InverseMultiquadratic => {
                let diag = self.sigma.powf(-self.p);
                Ok(NormBounds { r2: diag, big_r2: diag, provenance: Provenance::Analytic })
            }
            KernelFamily::Linear | KernelFamily::Polynomial | KernelFamily::ProjectiveExponential => {
                let points = data.unwrap_or(&[]);
                if points.is_empty() {
                    return Err(Error::DataRequired { family: self.family.name() });
                }
                let mut r2 = f64::INFINITY;
                let mut big_r2 = f64::NEG_INFINITY;
                for x in points {
                    let diag = self.evaluate(x, x)?;
                    r2 = r2.min(diag);
                    big_r2 = big_r2.max(diag);
                }
                if r2 <= 0.0 {
                    return Err(Error::ZeroNormInfimum);
                }
                Ok(NormBounds { r2, big_r2, provenance: Provenance::Empirical })
            }
        }
    }
}

// ==== configuration strings ===============================================

impl std::str::FromStr for KernelSpec {
    type Err = Error;

    /// Parses `"family[:key=value,...]"`, case-insensitively.
    ///
    /// Recognized keys per family: `sigma` (gaussian, radial-exponential,
    /// inverse-multiquadratic), `p` (polynomial, inverse-multiquadratic),
    /// `c` (polynomial). `sigma` defaults to 1, the inverse-multiquadratic
    /// `p` defaults to 1, and `c` defaults to 0; the polynomial degree `p`
    /// has no default and must be given. Keys a family does not use are
    /// rejected.
    fn from_str(input: &str) -> Result<Self> {
        let lowered = input.trim().to_ascii_lowercase();
        let (family_str, params_str) = match lowered.split_once(':') {
            Some((f, p)) => (f.trim(), Some(p)),
            None => (lowered.as_str(), None),
        };
        let family = match family_str {
            "linear" => KernelFamily::Linear,
            "polynomial" => KernelFamily::Polynomial,
            "projective-exponential" | "projective_exponential" => {
                KernelFamily::ProjectiveExponential
            }
            "inverse-multiquadratic" | "inverse_multiquadratic" => {
                KernelFamily::InverseMultiquadratic
            }
            "radial-exponential" | "radial_exponential" => KernelFamily::RadialExponential,
            "gaussian" => KernelFamily::Gaussian,
            other => {
                return Err(Error::ParseKernel {
                    input: input.to_string(),
                    reason: format!("unknown kernel family '{other}'"),
                })
            }
        };

        let mut sigma = 1.0;
        let mut p: Option<f64> = None;
        let mut c = 0.0;
        if let Some(params) = params_str {
            for pair in params.split(',') {
                let pair = pair.trim();
                if pair.is_empty() {
                    continue;
                }
                let (key, value) = pair.split_once('=').ok_or_else(|| Error::ParseKernel {
                    input: input.to_string(),
                    reason: format!("expected key=value, got '{pair}'"),
                })?;
                let value: f64 = value.trim().parse().map_err(|_| Error::ParseKernel {
                    input: input.to_string(),
                    reason: format!("'{}' is not a number", value.trim()),
                })?;
                let key = key.trim();
                let allowed = match family {
                    KernelFamily::Gaussian | KernelFamily::RadialExponential => key == "sigma",
                    KernelFamily::InverseMultiquadratic => key == "sigma" || key == "p",
                    KernelFamily::Polynomial => key == "p" || key == "c",
                    KernelFamily::Linear | KernelFamily::ProjectiveExponential => false,
                };
                if !allowed {
                    return Err(Error::ParseKernel {
                        input: input.to_string(),
                        reason: format!(
                            "kernel family {} takes no parameter '{key}'",
                            family.name()
                        ),
                    });
                }
                match key {
                    "sigma" => sigma = value,
                    "p" => p = Some(value),
                    "c" => c = value,
                    _ => unreachable!(),
                }
            }
        }
        if family == KernelFamily::Polynomial && p.is_none() {
            return Err(Error::ParseKernel {
                input: input.to_string(),
                reason: "polynomial kernel needs an explicit degree, e.g. polynomial:p=2".into(),
            });
        }
        KernelSpec::new(family, sigma, p.unwrap_or(1.0), c).map_err(|e| Error::ParseKernel {
            input: input.to_string(),
            reason: e.to_string(),
        })
    }
}

impl std::fmt::Display for KernelSpec {
    /// Canonical configuration string; parsing it back gives an equal spec.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.family {
            KernelFamily::Linear | KernelFamily::ProjectiveExponential => {
                write!(f, "{}", self.family.name())
            }
            KernelFamily::Polynomial => {
                write!(f, "{}:p={},c={}", self.family.name(), self.p, self.c)
            }
            KernelFamily::InverseMultiquadratic => {
                write!(f, "{}:sigma={},p={}", self.family.name(), self.sigma, self.p)
            }
            KernelFamily::RadialExponential | KernelFamily::Gaussian => {
                write!(f, "{}:sigma={}", self.family.name(), self.sigma)
            }
        }
    }
}

// ==== norm bounds =========================================================

/// Where a reported quantity's norm bounds came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Exact for the whole input domain.
    Analytic,
    /// Extremes of the observed data only.
    Empirical,
}

/// Extremes of the squared feature norm `kappa(x, x)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormBounds {
    /// Squared norm infimum `r^2`.
    pub r2: f64,
    /// Squared norm supremum `R^2`.
    #[serde(rename = "R2")]
    pub big_r2: f64,
    pub provenance: Provenance,
}

impl NormBounds {
    /// The norm supremum `R`.
    pub fn big_r(&self) -> f64 {
        self.big_r2.sqrt()
    }
}

// ==== shared helpers ======================================================

fn check_point(x: &[f64]) -> Result<()> {
    if x.is_empty() {
        return Err(Error::EmptyPoint);
    }
    for (index, v) in x.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteCoordinate { index });
        }
    }
    Ok(())
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn distance_sq(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

// ==== tests ===============================================================

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gaussian_diagonal_is_one() {
        let k = KernelSpec::gaussian(1.0).unwrap();
        assert_eq!(k.evaluate(&[0.0], &[0.0]).unwrap(), 1.0);
    }

    #[test]
    fn gaussian_unit_separation() {
        let k = KernelSpec::gaussian(1.0).unwrap();
        let v = k.evaluate(&[0.0], &[1.0]).unwrap();
        assert_abs_diff_eq!(v, (-0.5f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(v, 0.6065307, epsilon = 1e-7);
    }

    #[test]
    fn linear_orthogonal_vectors_vanish() {
        let k = KernelSpec::linear();
        assert_eq!(k.evaluate(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn polynomial_hand_value() {
        let k = KernelSpec::polynomial(2.0, 1.0).unwrap();
        assert_abs_diff_eq!(k.evaluate(&[1.0], &[1.0]).unwrap(), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn radial_exponential_hand_value() {
        let k = KernelSpec::radial_exponential(2.0).unwrap();
        let v = k.evaluate(&[0.0, 0.0], &[3.0, 4.0]).unwrap();
        assert_abs_diff_eq!(v, (-2.5f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn inverse_multiquadratic_hand_value() {
        let k = KernelSpec::inverse_multiquadratic(2.0, 1.5).unwrap();
        let v = k.evaluate(&[0.0], &[1.0]).unwrap();
        assert_abs_diff_eq!(v, 3.0f64.powf(-1.5), epsilon = 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let k = KernelSpec::gaussian(1.0).unwrap();
        let err = k.evaluate(&[0.0], &[0.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 1, got: 2 }));
    }

    #[test]
    fn display_round_trips_through_the_parser() {
        let specs = [
            KernelSpec::linear(),
            KernelSpec::polynomial(2.0, 1.5).unwrap(),
            KernelSpec::projective_exponential(),
            KernelSpec::inverse_multiquadratic(0.25, 1.5).unwrap(),
            KernelSpec::radial_exponential(2.0).unwrap(),
            KernelSpec::gaussian(0.7).unwrap(),
        ];
        for spec in specs {
            let round_tripped: KernelSpec = spec.to_string().parse().unwrap();
            assert_eq!(round_tripped, spec, "via '{spec}'");
        }
    }

    #[test]
    fn non_finite_coordinate_is_an_error() {
        let k = KernelSpec::linear();
        let err = k.evaluate(&[f64::NAN], &[0.0]).unwrap_err();
        assert!(matches!(err, Error::NonFiniteCoordinate { index: 0 }));
    }

    #[test]
    fn empty_point_is_an_error() {
        let k = KernelSpec::linear();
        assert!(matches!(k.evaluate(&[], &[]).unwrap_err(), Error::EmptyPoint));
    }

    #[test]
    fn unit_norm_families_have_analytic_bounds() {
        let nb = KernelSpec::gaussian(2.0).unwrap().norm_bounds(None).unwrap();
        assert_eq!((nb.r2, nb.big_r2), (1.0, 1.0));
        assert_eq!(nb.provenance, Provenance::Analytic);
    }

    #[test]
    fn inverse_multiquadratic_diagonal_bounds() {
        let nb = KernelSpec::inverse_multiquadratic(2.0, 1.0)
            .unwrap()
            .norm_bounds(None)
            .unwrap();
        assert_abs_diff_eq!(nb.r2, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(nb.big_r2, 0.5, epsilon = 1e-12);
        assert_eq!(nb.provenance, Provenance::Analytic);
    }

    #[test]
    fn linear_bounds_are_empirical_extremes() {
        let data = vec![vec![1.0], vec![2.0]];
        let nb = KernelSpec::linear().norm_bounds(Some(&data)).unwrap();
        assert_eq!((nb.r2, nb.big_r2), (1.0, 4.0));
        assert_eq!(nb.provenance, Provenance::Empirical);
    }

    #[test]
    fn empirical_bounds_require_data() {
        let err = KernelSpec::projective_exponential().norm_bounds(None).unwrap_err();
        assert!(matches!(err, Error::DataRequired { family: "projective-exponential" }));
    }

    #[test]
    fn zero_norm_infimum_is_rejected() {
        let data = vec![vec![0.0], vec![1.0]];
        let err = KernelSpec::linear().norm_bounds(Some(&data)).unwrap_err();
        assert!(matches!(err, Error::ZeroNormInfimum));
    }

    #[test]
    fn parses_gaussian_config_string() {
        let spec: KernelSpec = "gaussian:sigma=1.0".parse().unwrap();
        assert_eq!(spec.family, KernelFamily::Gaussian);
        assert_eq!(spec.sigma, 1.0);
    }

    #[test]
    fn parsing_is_case_insensitive() {
        let spec: KernelSpec = "GAUSSIAN:SIGMA=2.5".parse().unwrap();
        assert_eq!(spec.family, KernelFamily::Gaussian);
        assert_eq!(spec.sigma, 2.5);
    }

    #[test]
    fn parses_polynomial_config_string() {
        let spec: KernelSpec = "polynomial:p=2,c=1".parse().unwrap();
        assert_eq!(spec.family, KernelFamily::Polynomial);
        assert_eq!((spec.p, spec.c), (2.0, 1.0));
    }

    #[test]
    fn unknown_family_is_rejected() {
        let err = "quartic".parse::<KernelSpec>().unwrap_err();
        assert!(err.to_string().contains("unknown kernel family"));
    }

    #[test]
    fn irrelevant_key_is_rejected() {
        let err = "linear:sigma=2".parse::<KernelSpec>().unwrap_err();
        assert!(err.to_string().contains("takes no parameter"));
    }

    #[test]
    fn polynomial_without_degree_is_rejected() {
        let err = "polynomial".parse::<KernelSpec>().unwrap_err();
        assert!(err.to_string().contains("explicit degree"));
    }

    #[test]
    fn invalid_sigma_is_rejected() {
        assert!(KernelSpec::gaussian(0.0).is_err());
        assert!(KernelSpec::gaussian(-1.0).is_err());
        assert!("gaussian:sigma=0".parse::<KernelSpec>().is_err());
    }

    #[test]
    fn cauchy_schwarz_on_sample_points() {
        let specs = [
            KernelSpec::linear(),
            KernelSpec::polynomial(2.0, 1.0).unwrap(),
            KernelSpec::projective_exponential(),
            KernelSpec::inverse_multiquadratic(1.0, 1.0).unwrap(),
            KernelSpec::radial_exponential(1.0).unwrap(),
            KernelSpec::gaussian(1.0).unwrap(),
        ];
        let points = [
            vec![0.3, -1.2],
            vec![1.5, 0.4],
            vec![-0.7, 2.1],
        ];
        for spec in &specs {
            for x in &points {
                for y in &points {
                    let kxy = spec.evaluate(x, y).unwrap().abs();
                    let kxx = spec.evaluate(x, x).unwrap();
                    let kyy = spec.evaluate(y, y).unwrap();
                    assert!(
                        kxy <= (kxx * kyy).sqrt() + 1e-12,
                        "Cauchy-Schwarz violated for {}: |{kxy}| > sqrt({kxx}*{kyy})",
                        spec.family.name()
                    );
                }
            }
        }
    }
}
