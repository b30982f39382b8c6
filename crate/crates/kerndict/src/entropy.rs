//! Parzen-window entropy estimation and the entropy floors implied by the
//! diversity measures, in input space and in feature space.
//!
//! # Input space
//!
//! The Parzen estimate of the density behind a dictionary is the window
//! average `P(x) = (1/n) sum_j w(||x - x_j||)`. For the gaussian window
//! `w(u) = (sqrt(pi) sigma)^(-d) exp(-u^2 / sigma^2)`, the quadratic
//! (collision) entropy of the estimate has the closed form
//!
//! ```text
//! H_2 = (d/2) log(2 pi sigma^2) - log( (1/n^2) sum_{i,j} kappa(x_i, x_j) )
//! ```
//!
//! with `kappa` the gaussian kernel of bandwidth `sigma`, because the
//! convolution of two such windows is exactly a scaled gaussian kernel
//! evaluation. With a general kernel the same Gram-sum expression, without
//! the gaussian base term, estimates `-log ||P||^2` for the feature-space
//! mean map.
//!
//! Each diversity measure floors the quadratic entropy. In the gaussian
//! case, with `base = (d/2) log(2 pi sigma^2) + log n`:
//!
//! | measure              | floor                                       |
//! |----------------------|---------------------------------------------|
//! | Babel `gamma_B`      | `base - log(1 + gamma_B)`                   |
//! | coherence `gamma`    | `base - log(1 + (n-1) gamma)`               |
//! | distance `delta_d`   | `base - log(1 + (n-1) sqrt(1 - delta_d^2))` |
//! | approximation `delta_a` | `base - log(1 + (n-1) sqrt(1 - delta_a^2))` |
//!
//! and for a general kernel with norm supremum `R^2`:
//!
//! | measure              | floor                                                |
//! |----------------------|------------------------------------------------------|
//! | Babel                | `log n - log(R^2 + gamma_B)`                         |
//! | coherence            | `log n - log(R^2 + (n-1) gamma R^2)`                 |
//! | distance             | `log n - log(R^2 + (n-1) R sqrt(R^2 - delta_d^2))`   |
//! | approximation        | `log n - log(R^2 + (n-1) R sqrt(R^2 - delta_a^2))`   |
//!
//! The approximation floors are the distance-form floors evaluated at
//! `delta_a`; since `delta_a <= delta_d` and the floor grows with the
//! measure, they are never tighter than the distance floor and always
//! valid. The two-atom gaussian dictionary meets its Babel floor with
//! equality.
//!
//! # Feature space
//!
//! The same windows can be applied to feature distances
//! `||kappa(x_i, .) - kappa(x_j, .)||`, which the kernel trick evaluates as
//! `sqrt(kappa(x_i,x_i) - 2 kappa(x_i,x_j) + kappa(x_j,x_j))`. When every
//! pairwise feature distance is at least `epsilon`, the leave-one-out
//! plug-in at any atom is capped by `((n-1)/n) w(epsilon) < w(epsilon)`,
//! which yields closed-form floors on the plug-in Renyi entropies of order
//! `alpha > 1`. The analogous Shannon floor relies on `-u log u` being
//! increasing, which holds only for `u <= 1/e`; reports carry a flag for
//! that regime instead of asserting the Shannon direction outside it.

use serde::Serialize;

use crate::diversity::{
    approximation_complement_sq, approximation_detail, distance_complement_sq,
    diversity_report_from_gram, DiversityReport,
};
use crate::error::{Error, Result};
use crate::gram::{build_gram, Dictionary, GramMatrix};
use crate::kernels::{KernelSpec, NormBounds};

// ==== windows =============================================================

/// Radial window families usable as Parzen windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowFamily {
    Gaussian,
    RadialExponential,
    InverseMultiquadratic,
}

impl WindowFamily {
    pub fn name(&self) -> &'static str {
        match self {
            WindowFamily::Gaussian => "gaussian",
            WindowFamily::RadialExponential => "radial-exponential",
            WindowFamily::InverseMultiquadratic => "inverse-multiquadratic",
        }
    }
}

/// A normalized radial window `w(u)` over `R^d`.
///
/// Construct through [`WindowSpec::new`], which computes the normalization
/// so the window integrates to one:
///
/// * gaussian: `(sqrt(pi) sigma)^(-d) exp(-u^2 / sigma^2)`;
/// * radial-exponential: `exp(-u / sigma) / (S_{d-1} sigma^d Gamma(d))`;
/// * inverse-multiquadratic: `(u^2 + sigma)^(-p)` scaled by
///   `1 / (S_{d-1} (1/2) sigma^(d/2 - p) B(d/2, p - d/2))`, which needs
///   `2p > d` for the integral to exist;
///
/// where `S_{d-1} = 2 pi^(d/2) / Gamma(d/2)` is the unit-sphere surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowSpec {
    pub family: WindowFamily,
    /// Bandwidth (gaussian, radial-exponential) or additive offset
    /// (inverse-multiquadratic).
    pub sigma: f64,
    /// Exponent of the inverse-multiquadratic window; must satisfy
    /// `2p > dim`. Unused by the other families.
    pub p: Option<f64>,
    /// Ambient dimension the normalization integrates over.
    pub dim: usize,
    /// Scale making the window integrate to one over `R^dim`.
    pub normalization: f64,
}

impl WindowSpec {
    pub fn new(family: WindowFamily, sigma: f64, p: Option<f64>, dim: usize) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma",
                reason: format!("window bandwidth must be a positive finite real, got {sigma}"),
            });
        }
        if dim == 0 {
            return Err(Error::EmptyPoint);
        }
        let d = dim as f64;
        let normalization = match family {
            WindowFamily::Gaussian => {
                if p.is_some() {
                    return Err(Error::InvalidParameter {
                        name: "p",
                        reason: "gaussian windows take no exponent".into(),
                    });
                }
                (std::f64::consts::PI.sqrt() * sigma).powi(-(dim as i32))
            }
            WindowFamily::RadialExponential => {
                if p.is_some() {
                    return Err(Error::InvalidParameter {
                        name: "p",
                        reason: "radial-exponential windows take no exponent".into(),
                    });
                }
                let surface = unit_sphere_surface(dim);
                1.0 / (surface * sigma.powi(dim as i32) * statrs::function::gamma::gamma(d))
            }
            WindowFamily::InverseMultiquadratic => {
                let p = p.ok_or(Error::InvalidParameter {
                    name: "p",
                    reason: "inverse-multiquadratic windows need an exponent p".into(),
                })?;
                if !(p.is_finite() && 2.0 * p > d) {
                    return Err(Error::InvalidParameter {
                        name: "p",
                        reason: format!(
                            "inverse-multiquadratic windows need 2p > d for a finite integral, \
                             got p = {p} at d = {dim}"
                        ),
                    });
                }
                let surface = unit_sphere_surface(dim);
                let radial = 0.5
                    * sigma.powf(d / 2.0 - p)
                    * statrs::function::beta::beta(d / 2.0, p - d / 2.0);
                1.0 / (surface * radial)
            }
        };
        Ok(WindowSpec { family, sigma, p, dim, normalization })
    }

    /// The window value at distance `u >= 0`; positive and non-increasing
    /// in `u`.
    pub fn value(&self, u: f64) -> f64 {
        match self.family {
            WindowFamily::Gaussian => {
                self.normalization * (-(u * u) / (self.sigma * self.sigma)).exp()
            }
            WindowFamily::RadialExponential => self.normalization * (-u / self.sigma).exp(),
            WindowFamily::InverseMultiquadratic => {
                self.normalization * (u * u + self.sigma).powf(-self.p.unwrap_or(1.0))
            }
        }
    }
}

/// Surface area of the unit sphere in `R^d`: `2 pi^(d/2) / Gamma(d/2)`.
fn unit_sphere_surface(dim: usize) -> f64 {
    let d = dim as f64;
    2.0 * std::f64::consts::PI.powf(d / 2.0) / statrs::function::gamma::gamma(d / 2.0)
}

// ==== input-space estimators ==============================================

/// Parzen density estimate at `x`: `(1/n) sum_j w(||x - x_j||)`.
pub fn parzen_input(dict: &Dictionary, window: &WindowSpec, x: &[f64]) -> Result<f64> {
    if window.dim != dict.dim() {
        return Err(Error::DimensionMismatch { expected: dict.dim(), got: window.dim });
    }
    if x.len() != dict.dim() {
        return Err(Error::DimensionMismatch { expected: dict.dim(), got: x.len() });
    }
    for (index, v) in x.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteCoordinate { index });
        }
    }
    let n = dict.n() as f64;
    let mut sum = 0.0;
    for atom in dict.atoms() {
        let dist = atom
            .iter()
            .zip(x)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        sum += window.value(dist);
    }
    Ok(sum / n)
}

/// `(d/2) log(2 pi sigma^2)`, the additive constant separating the
/// gaussian-window quadratic entropy from the bare Gram-sum form.
fn gaussian_log_base(dim: usize, sigma: f64) -> f64 {
    (dim as f64 / 2.0) * (2.0 * std::f64::consts::PI * sigma * sigma).ln()
}

/// Quadratic entropy of the gaussian-window Parzen estimate, via the exact
/// Gram-sum identity. The gaussian kernel of bandwidth `sigma` is evaluated
/// over the dictionary's atoms regardless of the dictionary's own kernel.
pub fn quadratic_entropy_gaussian(dict: &Dictionary, sigma: f64) -> Result<f64> {
    let spec = KernelSpec::gaussian(sigma)?;
    let n = dict.n() as f64;
    let mut sum = 0.0;
    for i in 0..dict.n() {
        for j in 0..dict.n() {
            sum += spec.evaluate(dict.atom(i), dict.atom(j))?;
        }
    }
    Ok(gaussian_log_base(dict.dim(), sigma) - (sum / (n * n)).ln())
}

/// Gram-sum quadratic entropy `-log( (1/n^2) sum_{i,j} kappa(x_i, x_j) )`
/// under the dictionary's own kernel.
///
/// Errors when the Gram sum is not positive, which can happen for the
/// linear kernel on opposing vectors.
pub fn quadratic_entropy_general(dict: &Dictionary) -> Result<f64> {
    let k = build_gram(dict)?;
    quadratic_entropy_general_from_gram(&k)
}

/// [`quadratic_entropy_general`] for an already-built Gram matrix.
pub fn quadratic_entropy_general_from_gram(k: &GramMatrix) -> Result<f64> {
    let n = k.n() as f64;
    let sum = k.sum();
    if sum <= 0.0 {
        return Err(Error::GramSumNonPositive { sum });
    }
    Ok(-(sum / (n * n)).ln())
}

// ==== discrete generalized entropies ======================================

/// Renyi entropy of order `alpha` for plug-in values `p`.
///
/// Special orders: `alpha = 0` gives the Hartley entropy `log n` exactly,
/// `alpha = 1` takes the dedicated Shannon branch `-sum p log p`, and
/// `alpha = infinity` gives the min-entropy `min_j (-log p_j)`. Otherwise
/// the value is `(1/(1-alpha)) log( sum_j p_j^alpha )`.
///
/// Plug-in values are accepted unnormalized, matching how Parzen estimates
/// evaluated at the atoms are used; pass `renormalize = true` to scale them
/// into a probability vector first. Order monotonicity in `alpha` is only
/// meaningful for normalized values.
pub fn renyi_entropy(p: &[f64], alpha: f64, renormalize: bool) -> Result<f64> {
    let weights = checked_weights(p, renormalize)?;
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: format!("order must be nonnegative, got {alpha}"),
        });
    }
    if alpha == 0.0 {
        return Ok((weights.len() as f64).ln());
    }
    if alpha == 1.0 {
        return Ok(weights.iter().map(|&w| -w * w.ln()).sum());
    }
    if alpha.is_infinite() {
        let max = weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        return Ok(-max.ln());
    }
    let sum: f64 = weights.iter().map(|&w| w.powf(alpha)).sum();
    Ok(sum.ln() / (1.0 - alpha))
}

/// Tsallis entropy `(1/(q-1)) (1 - sum_j p_j^q)` with entropic index
/// `q != 1`.
pub fn tsallis_entropy(p: &[f64], q: f64) -> Result<f64> {
    let weights = checked_weights(p, false)?;
    if !q.is_finite() || q == 1.0 {
        return Err(Error::InvalidParameter {
            name: "q",
            reason: format!("entropic index must be finite and different from 1, got {q}"),
        });
    }
    let sum: f64 = weights.iter().map(|&w| w.powf(q)).sum();
    Ok((1.0 - sum) / (q - 1.0))
}

fn checked_weights(p: &[f64], renormalize: bool) -> Result<Vec<f64>> {
    if p.is_empty() {
        return Err(Error::InvalidProbabilities { reason: "empty plug-in vector".into() });
    }
    for (j, &v) in p.iter().enumerate() {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidProbabilities {
                reason: format!("entry {j} is {v}, need a positive finite real"),
            });
        }
    }
    if renormalize {
        let total: f64 = p.iter().sum();
        Ok(p.iter().map(|&v| v / total).collect())
    } else {
        Ok(p.to_vec())
    }
}

// ==== entropy floors from diversity measures ==============================

/// Which quadratic-entropy formula the floors accompany.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FloorContext {
    /// Gaussian-window identity with the stated dimension and bandwidth;
    /// requires a unit-norm kernel.
    Gaussian { dim: usize, sigma: f64 },
    /// Bare Gram-sum form under an arbitrary kernel.
    General,
}

/// One lower bound on the quadratic entropy, tagged by the measure that
/// produced it.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyFloor {
    pub measure: &'static str,
    pub floor: f64,
}

/// Evaluates the four floors of the module table from already-computed
/// measures.
///
/// This is a formula evaluator over the report's rounded measure values.
/// Near `delta^2 = R^2` the complement `R^2 - delta^2` loses all precision
/// to rounding in the stored measure, so floors computed here can overshoot
/// by about `(n-1) * 1e-8`; [`entropy_floors_gram`] evaluates the same
/// formulas from Gram-matrix primitives without that loss and is what the
/// verification paths use.
pub fn entropy_floors_input(
    report: &DiversityReport,
    nb: &NormBounds,
    context: &FloorContext,
) -> Result<Vec<EntropyFloor>> {
    let n = report.cardinality;
    if n < 2 {
        return Err(Error::PairwiseUndefined { n });
    }
    let delta_d_comp = measure_complement_sq(report.distance_delta, nb.big_r2, "distance_delta")?;
    let delta_a_comp =
        measure_complement_sq(report.approximation_delta, nb.big_r2, "approximation_delta")?;
    floors_from_parts(
        n,
        report.coherence_gamma,
        report.babel_gamma,
        delta_d_comp,
        delta_a_comp,
        nb,
        context,
    )
}

/// Measures the dictionary behind `k` and evaluates the same floors as
/// [`entropy_floors_input`], with the complements `R^2 - delta^2` computed
/// cancellation-free from Gram primitives.
pub fn entropy_floors_gram(
    k: &GramMatrix,
    nb: &NormBounds,
    context: &FloorContext,
    jitter: f64,
) -> Result<(DiversityReport, Vec<EntropyFloor>)> {
    let report = diversity_report_from_gram(k, jitter)?;
    let detail = approximation_detail(k, jitter)?;
    let comp_d = distance_complement_sq(k, nb.big_r2)?;
    let comp_a = approximation_complement_sq(k, nb.big_r2, &detail);
    let floors = floors_from_parts(
        k.n(),
        report.coherence_gamma,
        report.babel_gamma,
        comp_d,
        comp_a,
        nb,
        context,
    )?;
    Ok((report, floors))
}

/// `R^2 - delta^2` from a rounded measure value, clamped at zero, with the
/// domain check `delta <= R`.
fn measure_complement_sq(delta: f64, big_r2: f64, name: &'static str) -> Result<f64> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::InvalidParameter {
            name,
            reason: format!("measure must be a nonnegative finite real, got {delta}"),
        });
    }
    if delta * delta > big_r2 * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter {
            name,
            reason: format!("measure {delta} exceeds the norm supremum sqrt({big_r2})"),
        });
    }
    Ok((big_r2 - delta * delta).max(0.0))
}

fn floors_from_parts(
    n: usize,
    gamma: f64,
    gamma_b: f64,
    delta_d_complement_sq: f64,
    delta_a_complement_sq: f64,
    nb: &NormBounds,
    context: &FloorContext,
) -> Result<Vec<EntropyFloor>> {
    let nf = n as f64;
    let floors = match *context {
        FloorContext::Gaussian { dim, sigma } => {
            if !(sigma.is_finite() && sigma > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "sigma",
                    reason: format!("gaussian floor context needs a positive bandwidth, got {sigma}"),
                });
            }
            if dim == 0 {
                return Err(Error::EmptyPoint);
            }
            if (nb.big_r2 - 1.0).abs() > 1e-9 || (nb.r2 - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter {
                    name: "norm_bounds",
                    reason: "gaussian floor context requires a unit-norm kernel".into(),
                });
            }
            let base = gaussian_log_base(dim, sigma) + nf.ln();
            vec![
                EntropyFloor { measure: "babel", floor: base - (1.0 + gamma_b).ln() },
                EntropyFloor {
                    measure: "coherence",
                    floor: base - (1.0 + (nf - 1.0) * gamma).ln(),
                },
                EntropyFloor {
                    measure: "distance",
                    floor: base - (1.0 + (nf - 1.0) * delta_d_complement_sq.sqrt()).ln(),
                },
                EntropyFloor {
                    measure: "approximation",
                    floor: base - (1.0 + (nf - 1.0) * delta_a_complement_sq.sqrt()).ln(),
                },
            ]
        }
        FloorContext::General => {
            let big_r2 = nb.big_r2;
            let big_r = nb.big_r();
            vec![
                EntropyFloor { measure: "babel", floor: nf.ln() - (big_r2 + gamma_b).ln() },
                EntropyFloor {
                    measure: "coherence",
                    floor: nf.ln() - (big_r2 + (nf - 1.0) * gamma * big_r2).ln(),
                },
                EntropyFloor {
                    measure: "distance",
                    floor: nf.ln()
                        - (big_r2 + (nf - 1.0) * big_r * delta_d_complement_sq.sqrt()).ln(),
                },
                EntropyFloor {
                    measure: "approximation",
                    floor: nf.ln()
                        - (big_r2 + (nf - 1.0) * big_r * delta_a_complement_sq.sqrt()).ln(),
                },
            ]
        }
    };
    Ok(floors)
}

/// Floors on the Shannon, Hartley, and min-entropy implied by a quadratic
/// entropy floor `zeta`: the order chain gives `zeta <= H_1 <= H_0`
/// directly, and `H_2 <= 2 H_infinity` gives `zeta / 2 <= H_infinity`.
pub fn floors_from_quadratic(zeta: f64) -> (f64, f64, f64) {
    (zeta, zeta, zeta / 2.0)
}

// ==== feature-space estimators ============================================

/// Parzen estimate in feature space at the image of `x`:
/// `(1/n) sum_j w(||kappa(x, .) - kappa(x_j, .)||)`, with the feature
/// distances evaluated through the kernel trick.
///
/// Round-off can push a squared feature distance slightly negative; values
/// below `-1e-12` are treated as a real positive-semidefiniteness
/// violation and rejected, smaller ones are clamped to zero.
pub fn parzen_feature(dict: &Dictionary, window: &WindowSpec, x: &[f64]) -> Result<f64> {
    let spec = dict.spec();
    let kxx = spec.evaluate(x, x)?;
    let n = dict.n() as f64;
    let mut sum = 0.0;
    for atom in dict.atoms() {
        let kxj = spec.evaluate(x, atom)?;
        let kjj = spec.evaluate(atom, atom)?;
        sum += window.value(feature_distance(kxx, kxj, kjj)?);
    }
    Ok(sum / n)
}

/// Leave-one-out feature-space plug-ins at every atom:
/// `p_i = (1/n) sum_{j != i} w(||kappa(x_i, .) - kappa(x_j, .)||)`.
///
/// These are the values the feature-space entropy floors are stated for:
/// when every pairwise feature distance is at least `epsilon`, each `p_i`
/// is at most `((n-1)/n) w(epsilon)`, strictly below `w(epsilon)`.
pub fn feature_plug_ins_loo(k: &GramMatrix, window: &WindowSpec) -> Result<Vec<f64>> {
    let n = k.n();
    if n < 2 {
        return Err(Error::PairwiseUndefined { n });
    }
    let mut plug_ins = Vec::with_capacity(n);
    for i in 0..n {
        let mut sum = 0.0;
        for j in 0..n {
            if j != i {
                sum += window.value(feature_distance(k.diag(i), k.get(i, j), k.diag(j))?);
            }
        }
        plug_ins.push(sum / n as f64);
    }
    Ok(plug_ins)
}

fn feature_distance(kxx: f64, kxy: f64, kyy: f64) -> Result<f64> {
    let d_sq = kxx - 2.0 * kxy + kyy;
    if d_sq < -1e-12 {
        return Err(Error::PsdViolation { value: d_sq });
    }
    Ok(d_sq.max(0.0).sqrt())
}

/// Feature-space entropy floors under a minimum pairwise feature distance
/// `epsilon`.
#[derive(Debug, Clone, Serialize)]
pub struct FeatureEntropyFloors {
    /// `-n w(epsilon) log w(epsilon)`, the Shannon-form reference value.
    /// Inside the monotone regime it caps the plug-in Shannon sum from
    /// above rather than flooring it, so it is reported but never
    /// asserted as a lower bound.
    pub shannon_floor: f64,
    /// `(1/(1-alpha)) log( n w(epsilon)^alpha )`, a floor on the plug-in
    /// Renyi entropy of the requested order.
    pub renyi_floor: f64,
    /// The window value `w(epsilon)` both quantities are built from.
    pub window_value: f64,
    /// Whether `w(epsilon) <= 1/e`, the regime where `-u log u` is
    /// increasing in `u` and the cap reading of `shannon_floor` holds.
    pub monotone_regime: bool,
}

/// Evaluates both feature-space floors for `n` atoms separated by at least
/// `epsilon`, at Renyi order `alpha > 1`.
pub fn feature_entropy_floors(
    n: usize,
    epsilon: f64,
    window: &WindowSpec,
    alpha: f64,
) -> Result<FeatureEntropyFloors> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "need at least one atom".into(),
        });
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: format!("separation must be a positive finite real, got {epsilon}"),
        });
    }
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: format!("feature-space floors are stated for orders above 1, got {alpha}"),
        });
    }
    let w = window.value(epsilon);
    let nf = n as f64;
    Ok(FeatureEntropyFloors {
        shannon_floor: -nf * w * w.ln(),
        renyi_floor: (nf * w.powf(alpha)).ln() / (1.0 - alpha),
        window_value: w,
        monotone_regime: w <= 1.0 / std::f64::consts::E,
    })
}

// ==== report plumbing =====================================================

/// One floor check inside an [`EntropyReport`].
#[derive(Debug, Clone, Serialize)]
pub struct FloorCheck {
    pub measure: String,
    pub floor: f64,
    pub met: bool,
}

/// A single entropy estimate with the floors that apply to it.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyReport {
    pub estimator: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    pub space: String,
    pub value: f64,
    pub lower_bounds: Vec<FloorCheck>,
    /// Conjunction over the asserted floors; informational floors (for
    /// example a Shannon floor outside the monotone regime) do not count.
    pub all_bounds_met: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

// ==== tests ===============================================================
