//! Gram matrices, kernel vectors, and regularized leave-one-out solves.
//!
//! The Gram matrix of a dictionary `{x_1, ..., x_n}` is the symmetric n x n
//! matrix `K[i][j] = kappa(x_i, x_j)`. The approximation measure projects
//! each atom onto the span of all the others, which requires solving the
//! leave-one-out system
//!
//! ```text
//! (K_{\i} + jitter * I) xi = kappa_{\i}(x_i)
//! ```
//!
//! where `K_{\i}` deletes row and column `i` and `kappa_{\i}(x_i)` is column
//! `i` with entry `i` removed. Real dictionaries can make `K_{\i}`
//! numerically singular, so the solver never inverts: it factors with a
//! positive definite Cholesky decomposition and, when the factorization
//! fails, retries along a fixed jitter ladder as a regularized stand-in for
//! the least-squares pseudo-solution. The jitter that actually got applied
//! is reported so downstream measures can record it.

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;

/// First fallback added to the diagonal when a factorization at the
/// requested jitter fails.
pub const DEFAULT_FALLBACK_JITTER: f64 = 1e-10;

/// Escalation ladder tried after the requested jitter fails.
const JITTER_LADDER: [f64; 3] = [DEFAULT_FALLBACK_JITTER, 1e-8, 1e-6];

// ==== dictionary ==========================================================

/// An ordered set of atoms together with the kernel acting on them.
#[derive(Debug, Clone)]
pub struct Dictionary {
    atoms: Vec<Vec<f64>>,
    spec: KernelSpec,
}

impl Dictionary {
    /// Validates that there is at least one atom, that all atoms share one
    /// dimension `d >= 1`, that every coordinate is finite, and that the
    /// kernel parameters are in range.
    pub fn new(atoms: Vec<Vec<f64>>, spec: KernelSpec) -> Result<Self> {
        spec.validate()?;
        let first = atoms.first().ok_or(Error::EmptyPoint)?;
        if first.is_empty() {
            return Err(Error::EmptyPoint);
        }
        let d = first.len();
        for atom in &atoms {
            if atom.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: atom.len() });
            }
            for (index, v) in atom.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFiniteCoordinate { index });
                }
            }
        }
        Ok(Dictionary { atoms, spec })
    }

    pub fn n(&self) -> usize {
        self.atoms.len()
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].len()
    }

    pub fn atoms(&self) -> &[Vec<f64>] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &[f64] {
        &self.atoms[i]
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }
}

// ==== gram matrix =========================================================

/// Symmetric matrix of pairwise kernel evaluations, with a cached diagonal.
///
/// Immutable after construction; every accessor is read-only.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    n: usize,
    entries: Vec<f64>,
    diag: Vec<f64>,
}

impl GramMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn diag(&self, i: usize) -> f64 {
        self.diag[i]
    }

    /// Sum of all entries, the quantity behind the quadratic entropy.
    pub fn sum(&self) -> f64 {
        self.entries.iter().sum()
    }

    /// Reconstructs a Gram matrix from raw rows, as read from a CSV export.
    ///
    /// The rows must form a square matrix with a positive diagonal.
    /// Asymmetry up to `1e-9` relative to the largest entry is repaired by
    /// averaging mirrored entries; anything beyond that is an error.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyPoint);
        }
        for row in &rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
        }
        let scale = rows
            .iter()
            .flatten()
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
            .max(1.0);
        let mut entries = vec![0.0; n * n];
        let mut diag = vec![0.0; n];
        for i in 0..n {
            for (index, v) in rows[i].iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFiniteCoordinate { index });
                }
            }
            if rows[i][i] <= 0.0 {
                return Err(Error::NonPositiveDiagonal { index: i, value: rows[i][i] });
            }
            diag[i] = rows[i][i];
            entries[i * n + i] = rows[i][i];
            for j in (i + 1)..n {
                let a = rows[i][j];
                let b = rows[j][i];
                if (a - b).abs() > 1e-9 * scale {
                    return Err(Error::AsymmetricGram { i, j, a, b });
                }
                let v = 0.5 * (a + b);
                entries[i * n + j] = v;
                entries[j * n + i] = v;
            }
        }
        Ok(GramMatrix { n, entries, diag })
    }

    /// Copies the matrix out as plain rows, the inverse of [`from_rows`].
    ///
    /// [`from_rows`]: GramMatrix::from_rows
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.entries[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }
}

/// Evaluates the kernel over all atom pairs.
///
/// Each unordered pair is evaluated once and mirrored, so the result is
/// symmetric exactly, not merely up to round-off.
pub fn build_gram(dict: &Dictionary) -> Result<GramMatrix> {
    let n = dict.n();
    let mut entries = vec![0.0; n * n];
    let mut diag = vec![0.0; n];
    for i in 0..n {
        for j in i..n {
            let v = dict.spec().evaluate(dict.atom(i), dict.atom(j))?;
            entries[i * n + j] = v;
            entries[j * n + i] = v;
        }
        diag[i] = entries[i * n + i];
    }
    Ok(GramMatrix { n, entries, diag })
}

/// Evaluates the kernel between every atom and one query point: component
/// `j` is `kappa(x_j, x)`.
pub fn kernel_vector(dict: &Dictionary, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != dict.dim() {
        return Err(Error::DimensionMismatch { expected: dict.dim(), got: x.len() });
    }
    dict.atoms().iter().map(|atom| dict.spec().evaluate(atom, x)).collect()
}

// ==== regularized solves ==================================================

/// Solves the leave-one-out system `(K_{\i} + jitter * I) xi = kappa_{\i}(x_i)`.
///
/// The factorization is retried along the jitter ladder when it fails at
/// the requested value; an error is returned only when the largest ladder
/// entry still fails. Use [`loo_solve_detailed`] to learn which jitter was
/// actually applied.
pub fn loo_solve(k: &GramMatrix, i: usize, jitter: f64) -> Result<Vec<f64>> {
    loo_solve_detailed(k, i, jitter).map(|(xi, _)| xi)
}

/// [`loo_solve`] plus the jitter that made the factorization succeed.
pub fn loo_solve_detailed(k: &GramMatrix, i: usize, jitter: f64) -> Result<(Vec<f64>, f64)> {
    let n = k.n();
    if n < 2 {
        return Err(Error::PairwiseUndefined { n });
    }
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    let m = n - 1;
    let mut mat = vec![0.0; m * m];
    let mut rhs = vec![0.0; m];
    let jitter_used = factor_loo(k, i, jitter, &mut mat, &mut rhs)?;
    forward_substitute(&mat, m, &mut rhs);
    backward_substitute(&mat, m, &mut rhs);
    Ok((rhs, jitter_used))
}

/// Squared norm of the projection of atom `i` onto the span of the others,
/// `kappa_{\i}(x_i)^T (K_{\i} + jitter I)^{-1} kappa_{\i}(x_i)`, computed as
/// the squared norm of the forward-substituted right-hand side. Returns the
/// projection energy and the applied jitter.
pub(crate) fn loo_projection_sq(
    k: &GramMatrix,
    i: usize,
    jitter: f64,
    mat: &mut Vec<f64>,
    rhs: &mut Vec<f64>,
) -> Result<(f64, f64)> {
    let n = k.n();
    if n < 2 {
        return Err(Error::PairwiseUndefined { n });
    }
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    let m = n - 1;
    mat.resize(m * m, 0.0);
    rhs.resize(m, 0.0);
    let jitter_used = factor_loo(k, i, jitter, mat, rhs)?;
    forward_substitute(mat, m, rhs);
    Ok((rhs.iter().map(|z| z * z).sum(), jitter_used))
}

/// Projection energy `rhs^T (K + jitter I)^{-1} rhs` against the full Gram
/// matrix, used by the approximate-linear-dependency criterion where the
/// candidate is projected onto every current atom.
pub(crate) fn full_projection_sq(
    k: &GramMatrix,
    rhs: &[f64],
    jitter: f64,
) -> Result<(f64, f64)> {
    let n = k.n();
    if rhs.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: rhs.len() });
    }
    let mut mat = vec![0.0; n * n];
    let mut b = rhs.to_vec();
    let jitter_used = try_ladder(jitter, |jit| {
        for i in 0..n {
            for j in 0..n {
                mat[i * n + j] = k.get(i, j);
            }
            mat[i * n + i] += jit;
        }
        b.copy_from_slice(rhs);
        cholesky_in_place(&mut mat, n)
    })?;
    forward_substitute(&mat, n, &mut b);
    Ok((b.iter().map(|z| z * z).sum(), jitter_used))
}

/// Fills the deleted system for atom `i` (an index remapping, no
/// intermediate matrix is allocated) and factors it in place, escalating
/// the jitter as needed. Returns the applied jitter; `mat` holds the lower
/// Cholesky factor and `rhs` the deleted kernel column on success.
fn factor_loo(
    k: &GramMatrix,
    i: usize,
    jitter: f64,
    mat: &mut [f64],
    rhs: &mut [f64],
) -> Result<f64> {
    let n = k.n();
    let m = n - 1;
    let global = |local: usize| if local < i { local } else { local + 1 };
    try_ladder(jitter, |jit| {
        for a in 0..m {
            let ga = global(a);
            for b in 0..m {
                mat[a * m + b] = k.get(ga, global(b));
            }
            mat[a * m + a] += jit;
            rhs[a] = k.get(ga, i);
        }
        cholesky_in_place(mat, m)
    })
}

/// Runs `attempt` at the requested jitter, then at every ladder entry above
/// it, returning the first jitter that factored.
fn try_ladder(requested: f64, mut attempt: impl FnMut(f64) -> bool) -> Result<f64> {
    if attempt(requested) {
        return Ok(requested);
    }
    let mut last = requested;
    for &jit in JITTER_LADDER.iter().filter(|&&jit| jit > requested) {
        last = jit;
        if attempt(jit) {
            return Ok(jit);
        }
    }
    Err(Error::FactorizationFailed { jitter: last })
}

/// In-place lower Cholesky factorization of a symmetric matrix stored
/// row-major. Returns false when a pivot falls below the relative
/// threshold, which signals that the matrix is not numerically positive
/// definite at this jitter.
fn cholesky_in_place(a: &mut [f64], m: usize) -> bool {
    let max_diag = (0..m).fold(0.0f64, |acc, i| acc.max(a[i * m + i]));
    let tol = m as f64 * f64::EPSILON * max_diag.max(f64::MIN_POSITIVE);
    for j in 0..m {
        let mut pivot = a[j * m + j];
        for t in 0..j {
            pivot -= a[j * m + t] * a[j * m + t];
        }
        if pivot <= tol {
            return false;
        }
        let pivot = pivot.sqrt();
        a[j * m + j] = pivot;
        for i in (j + 1)..m {
            let mut v = a[i * m + j];
            for t in 0..j {
                v -= a[i * m + t] * a[j * m + t];
            }
            a[i * m + j] = v / pivot;
        }
    }
    true
}

/// Solves `L z = b` in place for lower triangular `L`.
fn forward_substitute(l: &[f64], m: usize, b: &mut [f64]) {
    for i in 0..m {
        let mut v = b[i];
        for t in 0..i {
            v -= l[i * m + t] * b[t];
        }
        b[i] = v / l[i * m + i];
    }
}

/// Solves `L^T x = z` in place for lower triangular `L`.
fn backward_substitute(l: &[f64], m: usize, b: &mut [f64]) {
    for i in (0..m).rev() {
        let mut v = b[i];
        for t in (i + 1)..m {
            v -= l[t * m + i] * b[t];
        }
        b[i] = v / l[i * m + i];
    }
}

// ==== tests ===============================================================

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn gaussian_dict(points: &[f64]) -> Dictionary {
        let atoms = points.iter().map(|&x| vec![x]).collect();
        Dictionary::new(atoms, KernelSpec::gaussian(1.0).unwrap()).unwrap()
    }

    #[test]
    fn single_atom_gram_is_scalar_one() {
        let k = build_gram(&gaussian_dict(&[0.0])).unwrap();
        assert_eq!(k.n(), 1);
        assert_eq!(k.get(0, 0), 1.0);
    }

    #[test]
    fn two_atom_gaussian_gram() {
        let k = build_gram(&gaussian_dict(&[0.0, 1.0])).unwrap();
        assert_eq!(k.get(0, 0), 1.0);
        assert_eq!(k.get(1, 1), 1.0);
        assert_abs_diff_eq!(k.get(0, 1), 0.6065307, epsilon = 1e-7);
        assert_eq!(k.get(0, 1), k.get(1, 0));
    }

    #[test]
    fn orthonormal_linear_gram_is_identity() {
        let dict = Dictionary::new(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            KernelSpec::linear(),
        )
        .unwrap();
        let k = build_gram(&dict).unwrap();
        assert_eq!(k.get(0, 0), 1.0);
        assert_eq!(k.get(1, 1), 1.0);
        assert_eq!(k.get(0, 1), 0.0);
    }

    #[test]
    fn kernel_vector_at_an_atom_reproduces_its_gram_column() {
        let dict = gaussian_dict(&[0.0, 0.7, 1.9]);
        let k = build_gram(&dict).unwrap();
        let v = kernel_vector(&dict, dict.atom(1)).unwrap();
        for j in 0..dict.n() {
            assert_eq!(v[j], k.get(j, 1), "component {j} differs from the gram column");
        }
    }

    #[test]
    fn kernel_vector_hand_value() {
        let dict = gaussian_dict(&[0.0, 1.0]);
        let v = kernel_vector(&dict, &[0.5]).unwrap();
        assert_abs_diff_eq!(v[0], 0.8824969, epsilon = 1e-7);
        assert_abs_diff_eq!(v[1], 0.8824969, epsilon = 1e-7);
    }

    #[test]
    fn kernel_vector_rejects_wrong_dimension() {
        let dict = gaussian_dict(&[0.0, 1.0]);
        assert!(matches!(
            kernel_vector(&dict, &[0.0, 0.0]).unwrap_err(),
            Error::DimensionMismatch { expected: 1, got: 2 }
        ));
    }

    #[test]
    fn loo_solve_on_identity_gram_is_zero() {
        let dict = Dictionary::new(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            KernelSpec::linear(),
        )
        .unwrap();
        let k = build_gram(&dict).unwrap();
        let xi = loo_solve(&k, 0, 0.0).unwrap();
        assert_eq!(xi, vec![0.0]);
    }

    #[test]
    fn loo_solve_two_atoms_recovers_the_correlation() {
        let k = build_gram(&gaussian_dict(&[0.0, 1.0])).unwrap();
        let xi = loo_solve(&k, 0, 0.0).unwrap();
        assert_eq!(xi.len(), 1);
        assert_abs_diff_eq!(xi[0], (-0.5f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn loo_solve_survives_duplicate_atoms_via_jitter() {
        let k = build_gram(&gaussian_dict(&[0.0, 0.0, 1.0])).unwrap();
        let (xi, jitter_used) = loo_solve_detailed(&k, 2, 1e-10).unwrap();
        assert!(xi.iter().all(|v| v.is_finite()), "solution must stay finite");
        assert!(jitter_used >= 1e-10);
    }

    #[test]
    fn loo_solve_rejects_single_atom_and_bad_index() {
        let k1 = build_gram(&gaussian_dict(&[0.0])).unwrap();
        assert!(matches!(loo_solve(&k1, 0, 0.0).unwrap_err(), Error::PairwiseUndefined { n: 1 }));
        let k2 = build_gram(&gaussian_dict(&[0.0, 1.0])).unwrap();
        assert!(matches!(
            loo_solve(&k2, 5, 0.0).unwrap_err(),
            Error::IndexOutOfRange { index: 5, n: 2 }
        ));
    }

    #[test]
    fn loo_solve_residual_is_small_for_well_conditioned_systems() {
        let dict = gaussian_dict(&[0.0, 0.9, 2.1, 3.4]);
        let k = build_gram(&dict).unwrap();
        for i in 0..dict.n() {
            let xi = loo_solve(&k, i, 0.0).unwrap();
            let global = |l: usize| if l < i { l } else { l + 1 };
            let m = dict.n() - 1;
            let mut worst = 0.0f64;
            let mut rhs_norm = 0.0f64;
            for a in 0..m {
                let mut lhs = 0.0;
                for b in 0..m {
                    lhs += k.get(global(a), global(b)) * xi[b];
                }
                let rhs = k.get(global(a), i);
                worst = worst.max((lhs - rhs).abs());
                rhs_norm += rhs * rhs;
            }
            assert!(
                worst <= 1e-8 * rhs_norm.sqrt().max(1e-30),
                "solve residual {worst} too large at atom {i}"
            );
        }
    }

    #[test]
    fn from_rows_round_trips() {
        let k = build_gram(&gaussian_dict(&[0.0, 0.5, 1.5])).unwrap();
        let k2 = GramMatrix::from_rows(k.to_rows()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(k.get(i, j), k2.get(i, j));
            }
        }
    }

    #[test]
    fn from_rows_rejects_asymmetry_and_bad_diagonal() {
        let asym = vec![vec![1.0, 0.5], vec![0.3, 1.0]];
        assert!(matches!(
            GramMatrix::from_rows(asym).unwrap_err(),
            Error::AsymmetricGram { .. }
        ));
        let bad_diag = vec![vec![0.0, 0.1], vec![0.1, 1.0]];
        assert!(matches!(
            GramMatrix::from_rows(bad_diag).unwrap_err(),
            Error::NonPositiveDiagonal { index: 0, .. }
        ));
        let ragged = vec![vec![1.0, 0.1], vec![0.1]];
        assert!(matches!(
            GramMatrix::from_rows(ragged).unwrap_err(),
            Error::DimensionMismatch { .. }
        ));
    }

    #[test]
    fn dictionary_rejects_mixed_dimensions_and_nan() {
        let spec = KernelSpec::gaussian(1.0).unwrap();
        assert!(Dictionary::new(vec![vec![0.0], vec![0.0, 1.0]], spec).is_err());
        assert!(Dictionary::new(vec![vec![f64::NAN]], spec).is_err());
        assert!(Dictionary::new(vec![], spec).is_err());
    }
}
