//! Dense complex Hermitian matrices.
//!
//! [`HermitianMatrix`] is the value type every other module computes with. Its
//! constructor symmetrizes the raw entries, so downstream spectral routines can
//! rely on exact Hermitian symmetry. Eigendecomposition uses a cyclic complex
//! Jacobi method with a fixed sweep order, which makes every derived quantity
//! (matrix functions, minimum eigenvalues, PSD verdicts) bit-reproducible.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Sweeps allowed before the eigensolver gives up.
pub const MAX_JACOBI_SWEEPS: usize = 100;

/// Off-diagonal mass (relative to `‖A‖_F`) at which the eigensolver stops.
pub const JACOBI_THRESHOLD: f64 = 1e-14;

/// Numerical slack used by PSD verdicts, reconstruction checks and the
/// power-mean branch switch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative slack: `A ⪰ 0` iff `λ_min(A) ≥ -psd_tol · max(1, ‖A‖_F)`.
    pub psd_tol: f64,
    /// Relative slack for symmetrization and reconstruction checks.
    pub recon_tol: f64,
    /// `|r|` below this selects the geometric branch of the power mean.
    pub zero_r_cutoff: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            psd_tol: 1e-8,
            recon_tol: 1e-10,
            zero_r_cutoff: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("psd_tol", self.psd_tol),
            ("recon_tol", self.recon_tol),
            ("zero_r_cutoff", self.zero_r_cutoff),
        ] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "tolerances must be finite and nonnegative",
                });
            }
        }
        Ok(())
    }

    /// Lower bound on `λ_min` for a matrix of Frobenius norm `scale` to count as PSD.
    pub fn psd_floor(&self, scale: f64) -> f64 {
        -self.psd_tol * scale.max(1.0)
    }
}

/// A dense complex Hermitian matrix in the standard coordinate basis.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    entries: CMatrix,
}

/// Replaces `raw` by `(raw + raw*)/2` after checking it is square and nearly Hermitian.
pub fn hermitize(raw: CMatrix, tol: &Tolerances) -> Result<HermitianMatrix> {
    let (rows, cols) = raw.shape();
    if rows != cols {
        return Err(Error::NonSquare { rows, cols });
    }
    if rows == 0 {
        return Err(Error::Empty);
    }
    for i in 0..rows {
        for j in 0..cols {
            let z = raw[(i, j)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    let adjoint = raw.adjoint();
    let asymmetry = (&raw - &adjoint).norm();
    let allowed = tol.recon_tol * raw.norm().max(1.0);
    if asymmetry > allowed {
        return Err(Error::NotNearlyHermitian { asymmetry, allowed });
    }
    Ok(HermitianMatrix::symmetrized(raw))
}

impl HermitianMatrix {
    /// `(m + m*)/2` without the asymmetry check; for results of computations
    /// that are Hermitian up to roundoff.
    pub(crate) fn symmetrized(m: CMatrix) -> Self {
        let n = m.nrows();
        let mut out = m;
        for i in 0..n {
            out[(i, i)] = Complex64::new(out[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let avg = (out[(i, j)] + out[(j, i)].conj()) * 0.5;
                out[(i, j)] = avg;
                out[(j, i)] = avg.conj();
            }
        }
        Self { entries: out }
    }

    pub fn from_complex_rows<R: AsRef<[Complex64]>>(rows: &[R], tol: &Tolerances) -> Result<Self> {
        let n = rows.len();
        let mut raw = CMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::NonSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            for (j, z) in row.iter().enumerate() {
                raw[(i, j)] = *z;
            }
        }
        hermitize(raw, tol)
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let complex: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_complex_rows(&complex, &Tolerances::default())
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: CMatrix::zeros(dim, dim),
        }
    }

    /// The all-ones matrix, the identity element of the Hadamard product.
    pub fn ones(dim: usize) -> Self {
        Self {
            entries: CMatrix::from_element(dim, dim, Complex64::new(1.0, 0.0)),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut entries = CMatrix::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            entries[(i, i)] = Complex64::new(v, 0.0);
        }
        Self { entries }
    }

    /// `M·M*`, positive semidefinite by construction.
    pub fn gram(m: &CMatrix) -> Self {
        Self::symmetrized(m * m.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            entries: &self.entries * Complex64::new(factor, 0.0),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            entries: &self.entries + &other.entries,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            entries: &self.entries - &other.entries,
        })
    }

    pub(crate) fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    /// `t* · self · t`. The result is Hermitian for any square or rectangular `t`.
    pub fn conjugate_by(&self, t: &CMatrix) -> Self {
        Self::symmetrized(t.adjoint() * &self.entries * t)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn spectral_decompose(&self) -> Result<SpectralDecomposition> {
        jacobi_eigen(&self.entries)
    }

    /// Gelfand functional calculus: `V·diag(f(λ))·V*`. Fails with
    /// [`Error::DomainError`] when `f` returns a non-finite value.
    pub fn apply_function<F: Fn(f64) -> f64>(&self, f: F) -> Result<Self> {
        self.spectral_decompose()?.apply(f)
    }

    /// `A^p` for positive semidefinite `A`. Roundoff-negative eigenvalues are
    /// clamped to zero; negative powers require `A` strictly positive.
    pub fn power_psd(&self, p: f64, tol: &Tolerances) -> Result<Self> {
        let decomposition = self.spectral_decompose()?;
        let scale = self.frobenius_norm();
        let min_eig = decomposition.min_eigenvalue();
        if min_eig < tol.psd_floor(scale) {
            return Err(Error::NotPositiveSemidefinite { min_eig });
        }
        if p < 0.0 && min_eig <= tol.psd_tol * scale.max(1.0) {
            return Err(Error::SingularForNegativePower { min_eig });
        }
        decomposition.apply(|x| x.max(0.0).powf(p))
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.spectral_decompose()?.min_eigenvalue())
    }

    pub fn is_psd(&self, tol: &Tolerances) -> Result<bool> {
        Ok(self.min_eigenvalue()? >= tol.psd_floor(self.frobenius_norm()))
    }

    /// `self ≤ other` in the Loewner order.
    pub fn loewner_leq(&self, other: &Self, tol: &Tolerances) -> Result<bool> {
        self.check_same_dim(other)?;
        (other - self).is_psd(tol)
    }
}

impl<'a> Add<&'a HermitianMatrix> for &'a HermitianMatrix {
    type Output = HermitianMatrix;

    /// Panics on dimension mismatch; see [`HermitianMatrix::checked_add`].
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            entries: &self.entries + &rhs.entries,
        }
    }
}

impl<'a> Sub<&'a HermitianMatrix> for &'a HermitianMatrix {
    type Output = HermitianMatrix;

    /// Panics on dimension mismatch; see [`HermitianMatrix::checked_sub`].
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            entries: &self.entries - &rhs.entries,
        }
    }
}

impl Mul<&HermitianMatrix> for f64 {
    type Output = HermitianMatrix;

    fn mul(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        rhs.scaled(self)
    }
}

impl fmt::Display for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim();
        for i in 0..n {
            write!(f, "[")?;
            for j in 0..n {
                let z = self.entries[(i, j)];
                if j > 0 {
                    write!(f, ", ")?;
                }
                if z.im == 0.0 {
                    write!(f, "{:.6}", z.re)?;
                } else {
                    write!(f, "{:.6}{:+.6}i", z.re, z.im)?;
                }
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for HermitianMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim();
        let part = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..n)
                .map(|i| (0..n).map(|j| f(&self.entries[(i, j)])).collect())
                .collect()
        };
        MatrixRepr {
            dim: n,
            re: part(|z| z.re),
            im: part(|z| z.im),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = MatrixRepr::deserialize(deserializer)?;
        let n = repr.dim;
        if repr.re.len() != n || repr.im.len() != n {
            return Err(D::Error::custom("row count does not match dim"));
        }
        let mut raw = CMatrix::zeros(n, n);
        for i in 0..n {
            if repr.re[i].len() != n || repr.im[i].len() != n {
                return Err(D::Error::custom("column count does not match dim"));
            }
            for j in 0..n {
                raw[(i, j)] = Complex64::new(repr.re[i][j], repr.im[i][j]);
            }
        }
        hermitize(raw, &Tolerances::default()).map_err(D::Error::custom)
    }
}

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("dim >= 1")
    }

    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> Result<HermitianMatrix> {
        let mut scaled = self.eigenvectors.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let value = f(lambda);
            if !value.is_finite() {
                return Err(Error::DomainError { eigenvalue: lambda });
            }
            scaled.column_mut(k).scale_mut(value);
        }
        Ok(HermitianMatrix::symmetrized(
            scaled * self.eigenvectors.adjoint(),
        ))
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.apply(|x| x).expect("eigenvalues are finite")
    }
}

/// Cyclic complex Jacobi: each rotation first rotates the phase of `a_pq` to
/// make it real, then applies the classical real rotation that annihilates it.
fn jacobi_eigen(a: &CMatrix) -> Result<SpectralDecomposition> {
    let n = a.nrows();
    let mut m = a.clone();
    let mut v = CMatrix::identity(n, n);
    let threshold = JACOBI_THRESHOLD * a.norm();

    let off_norm = |m: &CMatrix| -> f64 {
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    sum += m[(i, j)].norm_sqr();
                }
            }
        }
        sum.sqrt()
    };

    let mut converged = off_norm(&m) <= threshold;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_JACOBI_SWEEPS {
            return Err(Error::ConvergenceFailure { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let g = m[(p, q)];
                let modulus = g.norm();
                if modulus == 0.0 {
                    continue;
                }
                let phase = g / modulus;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let theta = (aqq - app) / (2.0 * modulus);
                let t = if theta.is_finite() {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                } else {
                    0.0
                };
                if t == 0.0 {
                    continue;
                }
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // W restricted to the (p, q) plane.
                let w_pp = Complex64::new(c, 0.0);
                let w_pq = Complex64::new(s, 0.0);
                let w_qp = -phase.conj() * s;
                let w_qq = phase.conj() * c;

                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * w_pp + mkq * w_qp;
                    m[(k, q)] = mkp * w_pq + mkq * w_qq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = w_pp.conj() * mpk + w_qp.conj() * mqk;
                    m[(q, k)] = w_pq.conj() * mpk + w_qq.conj() * mqk;
                }
                m[(p, q)] = Complex64::new(0.0, 0.0);
                m[(q, p)] = Complex64::new(0.0, 0.0);
                m[(p, p)] = Complex64::new(app - t * modulus, 0.0);
                m[(q, q)] = Complex64::new(aqq + t * modulus, 0.0);

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * w_pp + vkq * w_qp;
                    v[(k, q)] = vkp * w_pq + vkq * w_qq;
                }
            }
        }
        converged = off_norm(&m) <= threshold;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &v.column(src));
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}
