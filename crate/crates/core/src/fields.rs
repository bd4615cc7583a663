//! Operator fields over a finite totally ordered index set.
//!
//! A field `t ↦ A_t` is stored as strictly increasing points together with one
//! matrix per point. Paired with a [`WeightVector`] of nonnegative atoms it is
//! exactly the data of a Bochner integral against a discrete measure.

use nalgebra::Matrix2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermat::{HermitianMatrix, Tolerances};
use crate::products::hadamard;
use crate::sampling::{
    increasing_sequence, random_psd, random_strictly_positive, rng_for, FIELD_STREAM,
};

/// Exhaustive pair scans are used up to this many points.
pub const ALL_PAIRS_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorField {
    points: Vec<f64>,
    matrices: Vec<HermitianMatrix>,
}

impl OperatorField {
    pub fn new(points: Vec<f64>, matrices: Vec<HermitianMatrix>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::ShapeMismatch(
                "a field needs at least one point".into(),
            ));
        }
        if points.len() != matrices.len() {
            return Err(Error::LengthMismatch {
                left: points.len(),
                right: matrices.len(),
            });
        }
        if let Some(k) = points
            .windows(2)
            .position(|w| w[0].is_nan() || w[1].is_nan() || w[1] <= w[0])
        {
            return Err(Error::MonotonicityViolation {
                name: "points",
                expected: "strictly increasing",
                position: k + 1,
            });
        }
        let dim = matrices[0].dim();
        if let Some(bad) = matrices.iter().find(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: bad.dim(),
            });
        }
        Ok(Self { points, matrices })
    }

    /// Field indexed by `0, 1, …, n-1`.
    pub fn indexed(matrices: Vec<HermitianMatrix>) -> Result<Self> {
        let points = (0..matrices.len()).map(|k| k as f64).collect();
        Self::new(points, matrices)
    }

    pub fn constant(n: usize, m: &HermitianMatrix) -> Result<Self> {
        Self::indexed(vec![m.clone(); n])
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].dim()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn matrices(&self) -> &[HermitianMatrix] {
        &self.matrices
    }

    pub fn at(&self, k: usize) -> &HermitianMatrix {
        &self.matrices[k]
    }

    /// Applies `f` pointwise, keeping the index set.
    pub fn try_map<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&HermitianMatrix) -> Result<HermitianMatrix>,
    {
        let matrices = self.matrices.iter().map(f).collect::<Result<Vec<_>>>()?;
        Self::new(self.points.clone(), matrices)
    }

    /// `t ↦ A_t ∘ B_t`.
    pub fn hadamard_with(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let matrices = self
            .matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| hadamard(a, b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.points.clone(), matrices)
    }

    pub(crate) fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() || self.dim() != other.dim() {
            return Err(Error::ShapeMismatch(format!(
                "{} points of dim {} vs {} points of dim {}",
                self.len(),
                self.dim(),
                other.len(),
                other.dim()
            )));
        }
        Ok(())
    }
}

/// Nonnegative atoms of a discrete measure, one per field point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = values.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter {
                name: "weight",
                value: bad,
                reason: "weights must be finite and nonnegative",
            });
        }
        Ok(Self(values))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Sums `w_1, w_1 + w_2, …`.
    pub fn partial_sums(&self) -> Vec<f64> {
        self.0
            .iter()
            .scan(0.0, |acc, w| {
                *acc += w;
                Some(*acc)
            })
            .collect()
    }
}

/// `Σ_k w_k A_{t_k}`.
pub fn integrate(field: &OperatorField, weights: &WeightVector) -> Result<HermitianMatrix> {
    if field.len() != weights.len() {
        return Err(Error::LengthMismatch {
            left: field.len(),
            right: weights.len(),
        });
    }
    let mut acc = HermitianMatrix::zeros(field.dim());
    for (m, &w) in field.matrices.iter().zip(weights.values()) {
        acc = &acc + &m.scaled(w);
    }
    Ok(acc)
}

/// Frobenius residual of `∫(A_t ∘ B) dμ = (∫A_t dμ) ∘ B`.
pub fn check_hadamard_integral_identity(
    field: &OperatorField,
    b: &HermitianMatrix,
    weights: &WeightVector,
) -> Result<f64> {
    let pointwise = field.try_map(|a| hadamard(a, b))?;
    let left = integrate(&pointwise, weights)?;
    let right = hadamard(&integrate(field, weights)?, b)?;
    Ok((&left - &right).frobenius_norm())
}

/// The index pair with the least PSD slack, measured as
/// `min_eig / max(1, ‖·‖_F)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorstPair {
    pub s: usize,
    pub t: usize,
    pub min_eig: f64,
    pub scale: f64,
}

impl WorstPair {
    fn slack(&self) -> f64 {
        self.min_eig / self.scale.max(1.0)
    }

    fn keep_worse(current: Option<Self>, candidate: Self) -> Option<Self> {
        match current {
            Some(c) if c.slack() <= candidate.slack() => Some(c),
            _ => Some(candidate),
        }
    }
}

/// Outcome of the hypothesis checks. Predicates a check did not examine are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct FieldPairCertificate {
    pub synchronous_hadamard: Option<bool>,
    pub increasing: Option<bool>,
    pub positive: Option<bool>,
    pub worst_pair: Option<WorstPair>,
    /// Smallest eigenvalue over the field points (positivity check only).
    pub min_point_eig: Option<f64>,
}

impl FieldPairCertificate {
    /// True when every examined predicate holds.
    pub fn holds(&self) -> bool {
        [self.synchronous_hadamard, self.increasing, self.positive]
            .iter()
            .all(|p| p.unwrap_or(true))
    }
}

/// Checks `(A_t − A_s) ∘ (B_t − B_s) ⪰ 0` for every `s < t`.
pub fn check_synchronous_hadamard(
    f: &OperatorField,
    g: &OperatorField,
    tol: &Tolerances,
) -> Result<FieldPairCertificate> {
    f.check_same_shape(g)?;
    let mut synchronous = true;
    let mut worst = None;
    for t in 0..f.len() {
        for s in 0..t {
            let product = hadamard(&(f.at(t) - f.at(s)), &(g.at(t) - g.at(s)))?;
            let scale = product.frobenius_norm();
            let min_eig = product.min_eigenvalue()?;
            synchronous &= min_eig >= tol.psd_floor(scale);
            worst = WorstPair::keep_worse(
                worst,
                WorstPair {
                    s,
                    t,
                    min_eig,
                    scale,
                },
            );
        }
    }
    Ok(FieldPairCertificate {
        synchronous_hadamard: Some(synchronous),
        worst_pair: worst,
        ..Default::default()
    })
}

/// Checks that every `A_t` is PSD and `A_s ≤ A_t` for `s < t`. All pairs are
/// scanned up to [`ALL_PAIRS_LIMIT`] points, consecutive pairs beyond that.
pub fn check_increasing_positive(
    f: &OperatorField,
    tol: &Tolerances,
) -> Result<FieldPairCertificate> {
    let mut positive = true;
    let mut min_point_eig = f64::INFINITY;
    for m in f.matrices() {
        let e = m.min_eigenvalue()?;
        positive &= e >= tol.psd_floor(m.frobenius_norm());
        min_point_eig = min_point_eig.min(e);
    }

    let all_pairs = f.len() <= ALL_PAIRS_LIMIT;
    let mut increasing = true;
    let mut worst = None;
    for t in 1..f.len() {
        let lo = if all_pairs { 0 } else { t - 1 };
        for s in lo..t {
            let diff = f.at(t) - f.at(s);
            let scale = diff.frobenius_norm();
            let min_eig = diff.min_eigenvalue()?;
            increasing &= min_eig >= tol.psd_floor(scale);
            worst = WorstPair::keep_worse(
                worst,
                WorstPair {
                    s,
                    t,
                    min_eig,
                    scale,
                },
            );
        }
    }
    Ok(FieldPairCertificate {
        synchronous_hadamard: None,
        increasing: Some(increasing),
        positive: Some(positive),
        worst_pair: worst,
        min_point_eig: Some(min_point_eig),
    })
}

fn check_generator_shape(dim: usize, n: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::Empty);
    }
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            reason: "generators need at least two points",
        });
    }
    Ok(())
}

fn scaled_field(coefficients: &[f64], m: &HermitianMatrix) -> Result<OperatorField> {
    OperatorField::indexed(coefficients.iter().map(|&c| m.scaled(c)).collect())
}

/// `A_t = a(t) X`, `B_t = b(t) Y` with `X`, `Y` PSD and `a`, `b` positive increasing.
pub fn gen_scaled_pair(dim: usize, n: usize, seed: u64) -> Result<(OperatorField, OperatorField)> {
    check_generator_shape(dim, n)?;
    let mut rng = rng_for(seed, FIELD_STREAM);
    let x = random_psd(dim, &mut rng);
    let y = random_psd(dim, &mut rng);
    let a = increasing_sequence(n, 0.1, 0.05, 1.0, &mut rng);
    let b = increasing_sequence(n, 0.1, 0.05, 1.0, &mut rng);
    Ok((scaled_field(&a, &x)?, scaled_field(&b, &y)?))
}

/// `A_t = A0 + g(t) C`, `B_t = B0 + h(t) D` with `A0`, `B0` strictly positive,
/// `C`, `D` PSD and `g`, `h` nonnegative increasing with `g(t_1) = h(t_1) = 0`.
pub fn gen_increasing_pair(
    dim: usize,
    n: usize,
    seed: u64,
) -> Result<(OperatorField, OperatorField)> {
    check_generator_shape(dim, n)?;
    let mut rng = rng_for(seed, FIELD_STREAM);
    let field = |rng: &mut _| -> Result<OperatorField> {
        let base = random_strictly_positive(dim, rng);
        let step = random_psd(dim, rng);
        let g = increasing_sequence(n, 0.0, 0.05, 1.0, rng);
        OperatorField::indexed(g.iter().map(|&c| &base + &step.scaled(c)).collect())
    };
    let f = field(&mut rng)?;
    let g = field(&mut rng)?;
    Ok((f, g))
}

/// `A_t = a(t) X` with `a` increasing and `B_t = b(t) Y` with `b` decreasing,
/// `X`, `Y` strictly positive, so every Hadamard difference is negative definite.
pub fn gen_nonsynchronous_pair(
    dim: usize,
    n: usize,
    seed: u64,
) -> Result<(OperatorField, OperatorField)> {
    check_generator_shape(dim, n)?;
    let mut rng = rng_for(seed, FIELD_STREAM);
    let x = random_strictly_positive(dim, &mut rng);
    let y = random_strictly_positive(dim, &mut rng);
    let a = increasing_sequence(n, 0.1, 0.05, 1.0, &mut rng);
    let mut b = increasing_sequence(n, 0.1, 0.05, 1.0, &mut rng);
    b.reverse();
    Ok((scaled_field(&a, &x)?, scaled_field(&b, &y)?))
}

/// Real non-Hermitian fields `A_t = [[f1, h], [0, g1]]`, `B_t = [[f2, 0], [k, g2]]`.
///
/// These bypass [`HermitianMatrix`]: the difference products
/// `(A_t − A_s) ∘ (B_t − B_s)` are real diagonal, which is all the
/// synchronous-Hadamard check needs.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularPair {
    pub a: Vec<Matrix2<f64>>,
    pub b: Vec<Matrix2<f64>>,
}

fn require_monotone(name: &'static str, seq: &[f64], increasing: bool) -> Result<()> {
    let ok = |w: &[f64]| {
        if increasing {
            w[1] >= w[0]
        } else {
            w[1] <= w[0]
        }
    };
    if let Some(k) = seq.windows(2).position(|w| !ok(w)) {
        return Err(Error::MonotonicityViolation {
            name,
            expected: if increasing {
                "increasing"
            } else {
                "decreasing"
            },
            position: k + 1,
        });
    }
    Ok(())
}

/// Builds the triangular pair from sampled `f1, g1, h, f2, g2, k`; `f1`, `f2`
/// must be increasing and `g1`, `g2` decreasing.
pub fn gen_triangular_pair(
    f1: &[f64],
    g1: &[f64],
    h: &[f64],
    f2: &[f64],
    g2: &[f64],
    k: &[f64],
) -> Result<TriangularPair> {
    let n = f1.len();
    for seq in [g1, h, f2, g2, k] {
        if seq.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: seq.len(),
            });
        }
    }
    if n == 0 {
        return Err(Error::Empty);
    }
    require_monotone("f1", f1, true)?;
    require_monotone("f2", f2, true)?;
    require_monotone("g1", g1, false)?;
    require_monotone("g2", g2, false)?;
    let a = (0..n)
        .map(|i| Matrix2::new(f1[i], h[i], 0.0, g1[i]))
        .collect();
    let b = (0..n)
        .map(|i| Matrix2::new(f2[i], 0.0, k[i], g2[i]))
        .collect();
    Ok(TriangularPair { a, b })
}

impl TriangularPair {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `(A_t − A_s) ∘ (B_t − B_s)`.
    pub fn difference_product(&self, s: usize, t: usize) -> Matrix2<f64> {
        (self.a[t] - self.a[s]).component_mul(&(self.b[t] - self.b[s]))
    }

    /// Synchronous-Hadamard check on the diagonal difference products.
    pub fn check_synchronous(&self, tol: &Tolerances) -> FieldPairCertificate {
        let mut synchronous = true;
        let mut worst = None;
        for t in 0..self.len() {
            for s in 0..t {
                let d = self.difference_product(s, t);
                let scale = d.norm();
                synchronous &= d[(0, 1)] == 0.0 && d[(1, 0)] == 0.0;
                let min_eig = d[(0, 0)].min(d[(1, 1)]);
                synchronous &= min_eig >= tol.psd_floor(scale);
                worst = WorstPair::keep_worse(
                    worst,
                    WorstPair {
                        s,
                        t,
                        min_eig,
                        scale,
                    },
                );
            }
        }
        FieldPairCertificate {
            synchronous_hadamard: Some(synchronous),
            worst_pair: worst,
            ..Default::default()
        }
    }

    /// The pair as Hermitian diagonal fields, available when `h = k = 0`.
    pub fn hermitian_fields(&self) -> Option<(OperatorField, OperatorField)> {
        let diag = |m: &Matrix2<f64>| -> Option<HermitianMatrix> {
            (m[(0, 1)] == 0.0 && m[(1, 0)] == 0.0)
                .then(|| HermitianMatrix::diagonal(&[m[(0, 0)], m[(1, 1)]]))
        };
        let a = self.a.iter().map(diag).collect::<Option<Vec<_>>>()?;
        let b = self.b.iter().map(diag).collect::<Option<Vec<_>>>()?;
        Some((
            OperatorField::indexed(a).ok()?,
            OperatorField::indexed(b).ok()?,
        ))
    }
}
