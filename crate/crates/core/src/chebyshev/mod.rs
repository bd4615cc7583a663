//! Chebyshev-type inequalities for the Hadamard product, assembled as gap
//! matrices `LHS − RHS` whose positive semidefiniteness certifies them.

mod pointwise;
mod qchain;

pub use pointwise::{scalar_pointwise_gap, PointwiseStudy, StudyCell, StudyGrid};
pub use qchain::{q_chain, q_increment, QChain, QChainCheck};

use nalgebra::Matrix2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{
    check_increasing_positive, integrate, OperatorField, TriangularPair, WeightVector,
};
use crate::hermat::{HermitianMatrix, Tolerances};
use crate::means::{power_mean, MeanSpec};
use crate::products::hadamard;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

/// An assembled gap together with its PSD verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub name: String,
    pub gap: HermitianMatrix,
    pub min_eig: f64,
    /// Largest Frobenius norm among the assembled terms.
    pub scale: f64,
    pub verdict: Verdict,
    /// Replay handle, filled in by the campaign layer.
    pub inputs_digest: Option<String>,
}

impl GapReport {
    pub fn new(name: &str, gap: HermitianMatrix, scale: f64, tol: &Tolerances) -> Result<Self> {
        let min_eig = gap.min_eigenvalue()?;
        let verdict = if min_eig >= tol.psd_floor(scale) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Ok(Self {
            name: name.to_owned(),
            gap,
            min_eig,
            scale,
            verdict,
            inputs_digest: None,
        })
    }

    pub fn with_digest(mut self, digest: impl Into<String>) -> Self {
        self.inputs_digest = Some(digest.into());
        self
    }
}

fn max_norm(terms: &[&HermitianMatrix]) -> f64 {
    terms.iter().map(|m| m.frobenius_norm()).fold(0.0, f64::max)
}

/// Weighted Chebyshev functional `Σw · Σ w_j a_j b_j − Σ w_i a_i · Σ w_j b_j`.
pub fn scalar_chebyshev(w: &[f64], a: &[f64], b: &[f64]) -> Result<f64> {
    if w.len() != a.len() || w.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: w.len(),
            right: if w.len() != a.len() { a.len() } else { b.len() },
        });
    }
    if let Some(&bad) = w.iter().find(|x| x.is_nan() || **x < 0.0) {
        return Err(Error::InvalidParameter {
            name: "w",
            value: bad,
            reason: "weights must be nonnegative",
        });
    }
    let total: f64 = w.iter().sum();
    let wab: f64 = (0..w.len()).map(|j| w[j] * a[j] * b[j]).sum();
    let wa: f64 = (0..w.len()).map(|j| w[j] * a[j]).sum();
    let wb: f64 = (0..w.len()).map(|j| w[j] * b[j]).sum();
    Ok(total * wab - wa * wb)
}

fn check_pair(f: &OperatorField, g: &OperatorField, weights: &[&WeightVector]) -> Result<()> {
    if f.len() != g.len() || f.dim() != g.dim() {
        return Err(Error::ShapeMismatch(format!(
            "fields have {}x{} and {}x{} (points x dim)",
            f.len(),
            f.dim(),
            g.len(),
            g.dim()
        )));
    }
    for w in weights {
        if w.len() != f.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} weights for {} points",
                w.len(),
                f.len()
            )));
        }
    }
    Ok(())
}

/// Gap of the two-weight inequality for fields with the synchronous Hadamard property:
///
/// ```text
/// ∫α · ∫β (A∘B) + ∫β · ∫α (A∘B) − (∫αA) ∘ (∫βB) − (∫βA) ∘ (∫αB)
/// ```
pub fn gap_two_weight(
    f: &OperatorField,
    g: &OperatorField,
    alpha: &WeightVector,
    beta: &WeightVector,
    tol: &Tolerances,
) -> Result<GapReport> {
    let (gap, scale) = two_weight_terms(f, g, alpha, beta)?;
    GapReport::new("thm21", gap, scale, tol)
}

/// The same assembly with discrete weights `ω`, `ν`; kept as a separately
/// named report.
pub fn gap_discrete(
    f: &OperatorField,
    g: &OperatorField,
    omega: &WeightVector,
    nu: &WeightVector,
    tol: &Tolerances,
) -> Result<GapReport> {
    let (gap, scale) = two_weight_terms(f, g, omega, nu)?;
    GapReport::new("cor22", gap, scale, tol)
}

fn two_weight_terms(
    f: &OperatorField,
    g: &OperatorField,
    alpha: &WeightVector,
    beta: &WeightVector,
) -> Result<(HermitianMatrix, f64)> {
    check_pair(f, g, &[alpha, beta])?;
    let products = f.hadamard_with(g)?;
    let sum_beta_products = integrate(&products, beta)?.scaled(alpha.total());
    let sum_alpha_products = integrate(&products, alpha)?.scaled(beta.total());
    let cross_ab = hadamard(&integrate(f, alpha)?, &integrate(g, beta)?)?;
    let cross_ba = hadamard(&integrate(f, beta)?, &integrate(g, alpha)?)?;
    let scale = max_norm(&[
        &sum_beta_products,
        &sum_alpha_products,
        &cross_ab,
        &cross_ba,
    ]);
    let gap = &(&(&sum_beta_products + &sum_alpha_products) - &cross_ab) - &cross_ba;
    Ok((gap, scale))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter {
            name: "lambda",
            value: lambda,
            reason: "mean parameter must lie in [0, 1]",
        });
    }
    Ok(())
}

/// `A∘B − (A m_{r,λ} B) ∘ (A m_{r,1−λ} B)` for strictly positive `A`, `B`.
pub fn pointwise_mean_gap(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    r: f64,
    lambda: f64,
    tol: &Tolerances,
) -> Result<GapReport> {
    check_lambda(lambda)?;
    let spec = MeanSpec::new(r, lambda)?;
    let product = hadamard(a, b)?;
    let forward = power_mean(a, b, spec, tol)?;
    let backward = power_mean(a, b, spec.reversed(), tol)?;
    let mixed = hadamard(&forward, &backward)?;
    let scale = max_norm(&[&product, &mixed]);
    GapReport::new("path1", &product - &mixed, scale, tol)
}

/// Gap of the interpolational-mean inequality for positive increasing fields,
/// with one weight vector:
///
/// ```text
/// Σα · Σ α_t (A_t∘B_t) − (Σ α_t (A_t m_{r,λ} B_t)) ∘ (Σ α_s (A_s m_{r,1−λ} B_s))
/// ```
///
/// Both fields are certified positive and increasing first; a failed
/// certificate yields [`Error::HypothesisViolation`].
pub fn gap_mean(
    f: &OperatorField,
    g: &OperatorField,
    alpha: &WeightVector,
    r: f64,
    lambda: f64,
    tol: &Tolerances,
) -> Result<GapReport> {
    for (label, field) in [("A", f), ("B", g)] {
        let cert = check_increasing_positive(field, tol)?;
        if !cert.holds() {
            return Err(Error::HypothesisViolation(format!(
                "field {label} is not positive increasing ({cert:?})"
            )));
        }
    }
    assemble_mean_gap(f, g, alpha, alpha, r, lambda, tol, "thm41")
}

/// Two-weight variant `Σw · Σ ν (A∘B) − (Σ w (A m_λ B)) ∘ (Σ ν (A m_{1−λ} B))`.
/// Exploratory: no hypothesis check, and callers report rather than assert it.
pub fn gap_mean_two_weight(
    f: &OperatorField,
    g: &OperatorField,
    w: &WeightVector,
    nu: &WeightVector,
    r: f64,
    lambda: f64,
    tol: &Tolerances,
) -> Result<GapReport> {
    assemble_mean_gap(f, g, w, nu, r, lambda, tol, "cor41")
}

/// [`gap_mean`] without the hypothesis certificate; used for falsification.
pub fn gap_mean_unchecked(
    f: &OperatorField,
    g: &OperatorField,
    alpha: &WeightVector,
    r: f64,
    lambda: f64,
    tol: &Tolerances,
) -> Result<GapReport> {
    assemble_mean_gap(f, g, alpha, alpha, r, lambda, tol, "thm41")
}

#[allow(clippy::too_many_arguments)]
fn assemble_mean_gap(
    f: &OperatorField,
    g: &OperatorField,
    left_weights: &WeightVector,
    right_weights: &WeightVector,
    r: f64,
    lambda: f64,
    tol: &Tolerances,
    name: &str,
) -> Result<GapReport> {
    check_pair(f, g, &[left_weights, right_weights])?;
    check_lambda(lambda)?;
    let spec = MeanSpec::new(r, lambda)?;
    let mut forward = Vec::with_capacity(f.len());
    let mut backward = Vec::with_capacity(f.len());
    for (a, b) in f.matrices().iter().zip(g.matrices()) {
        forward.push(power_mean(a, b, spec, tol)?);
        backward.push(power_mean(a, b, spec.reversed(), tol)?);
    }
    let forward = OperatorField::new(f.points().to_vec(), forward)?;
    let backward = OperatorField::new(f.points().to_vec(), backward)?;

    let lhs = integrate(&f.hadamard_with(g)?, right_weights)?.scaled(left_weights.total());
    let rhs = hadamard(
        &integrate(&forward, left_weights)?,
        &integrate(&backward, right_weights)?,
    )?;
    let scale = max_norm(&[&lhs, &rhs]);
    GapReport::new(name, &lhs - &rhs, scale, tol)
}

/// Both sides of the two-weight inequality evaluated on the real triangular pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularExample {
    pub lhs: Matrix2<f64>,
    pub rhs: Matrix2<f64>,
}

impl TriangularExample {
    pub fn gap(&self) -> Matrix2<f64> {
        self.lhs - self.rhs
    }

    /// Diagonal gap entries; the off-diagonal entries vanish identically.
    pub fn diagonal_gaps(&self) -> [f64; 2] {
        let g = self.gap();
        [g[(0, 0)], g[(1, 1)]]
    }

    pub fn is_diagonal(&self) -> bool {
        let zero = |m: &Matrix2<f64>| m[(0, 1)] == 0.0 && m[(1, 0)] == 0.0;
        zero(&self.lhs) && zero(&self.rhs)
    }
}

/// Evaluates the two-weight assembly on the raw (non-Hermitian) triangular pair.
pub fn triangular_example(
    pair: &TriangularPair,
    alpha: &WeightVector,
    beta: &WeightVector,
) -> Result<TriangularExample> {
    let n = pair.len();
    for w in [alpha, beta] {
        if w.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: w.len(),
            });
        }
    }
    let sum = |ms: &[Matrix2<f64>], w: &WeightVector| -> Matrix2<f64> {
        ms.iter()
            .zip(w.values())
            .fold(Matrix2::zeros(), |acc, (m, &x)| acc + m * x)
    };
    let products: Vec<Matrix2<f64>> = pair
        .a
        .iter()
        .zip(&pair.b)
        .map(|(a, b)| a.component_mul(b))
        .collect();
    let lhs = sum(&products, beta) * alpha.total() + sum(&products, alpha) * beta.total();
    let rhs = sum(&pair.a, alpha).component_mul(&sum(&pair.b, beta))
        + sum(&pair.a, beta).component_mul(&sum(&pair.b, alpha));
    Ok(TriangularExample { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{gen_increasing_pair, gen_scaled_pair, gen_triangular_pair};
    use crate::sampling::{nonnegative_weights, rng_for, WEIGHT_STREAM};
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn scalar_field(values: &[f64]) -> OperatorField {
        OperatorField::indexed(
            values
                .iter()
                .map(|&x| HermitianMatrix::diagonal(&[x]))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn scalar_chebyshev_examples() {
        assert_eq!(
            scalar_chebyshev(&[0.3, 1.2, 0.5], &[2.0, 2.0, 2.0], &[1.0, -4.0, 9.0]).unwrap(),
            0.0
        );
        assert_eq!(
            scalar_chebyshev(&[1.0, 1.0], &[1.0, 2.0], &[1.0, 2.0]).unwrap(),
            1.0
        );
        assert_eq!(
            scalar_chebyshev(&[1.0, 1.0], &[1.0, 2.0], &[2.0, 1.0]).unwrap(),
            -1.0
        );
        assert!(scalar_chebyshev(&[1.0], &[1.0, 2.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn two_weight_gap_vanishes_on_constant_fields() {
        let mut rng = rng_for(3, 0);
        let a = crate::sampling::random_psd(3, &mut rng);
        let b = crate::sampling::random_psd(3, &mut rng);
        let f = OperatorField::constant(4, &a).unwrap();
        let g = OperatorField::constant(4, &b).unwrap();
        let alpha = WeightVector::new(vec![0.1, 0.7, 0.2, 1.3]).unwrap();
        let beta = WeightVector::new(vec![0.9, 0.0, 0.4, 0.3]).unwrap();
        let report = gap_two_weight(&f, &g, &alpha, &beta, &tol()).unwrap();
        assert!(report.gap.frobenius_norm() < 1e-13);
        assert!(report.verdict.is_pass());

        let f1 = OperatorField::constant(1, &a).unwrap();
        let g1 = OperatorField::constant(1, &b).unwrap();
        let w = WeightVector::new(vec![0.6]).unwrap();
        let report = gap_two_weight(&f1, &g1, &w, &w, &tol()).unwrap();
        assert!(report.gap.frobenius_norm() < 1e-14);
    }

    #[test]
    fn dim_one_gap_is_twice_scalar_chebyshev() {
        let a = [0.5, 1.0, 1.7, 3.0];
        let b = [0.2, 0.9, 1.1, 4.0];
        let w = [0.3, 1.0, 0.25, 0.6];
        let weights = WeightVector::new(w.to_vec()).unwrap();
        let report = gap_discrete(
            &scalar_field(&a),
            &scalar_field(&b),
            &weights,
            &weights,
            &tol(),
        )
        .unwrap();
        let t = scalar_chebyshev(&w, &a, &b).unwrap();
        assert_abs_diff_eq!(report.gap.entry(0, 0).re, 2.0 * t, epsilon = 1e-12);
        assert!(t > 0.0);
    }

    #[test]
    fn discrete_and_two_weight_agree() {
        let (f, g) = gen_scaled_pair(3, 5, 8).unwrap();
        let mut rng = rng_for(8, WEIGHT_STREAM);
        let omega = WeightVector::new(nonnegative_weights(5, &mut rng)).unwrap();
        let nu = WeightVector::new(nonnegative_weights(5, &mut rng)).unwrap();
        let a = gap_two_weight(&f, &g, &omega, &nu, &tol()).unwrap();
        let b = gap_discrete(&f, &g, &omega, &nu, &tol()).unwrap();
        assert_eq!(a.gap, b.gap);
        assert_eq!(a.min_eig, b.min_eig);
        assert_eq!(b.name, "cor22");
        assert!(b.verdict.is_pass());
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let (f, g) = gen_scaled_pair(2, 4, 1).unwrap();
        let w = WeightVector::uniform(3);
        assert!(matches!(
            gap_two_weight(&f, &g, &w, &w, &tol()),
            Err(Error::ShapeMismatch(_))
        ));
        let (h, _) = gen_scaled_pair(3, 4, 1).unwrap();
        let w = WeightVector::uniform(4);
        assert!(matches!(
            gap_discrete(&f, &h, &w, &w, &tol()),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn pointwise_gap_endpoints_and_idempotence() {
        let (f, g) = gen_increasing_pair(3, 2, 4).unwrap();
        let (a, b) = (f.at(1), g.at(1));
        for r in [-1.0, 0.0, 1.0] {
            let report = pointwise_mean_gap(a, b, r, 0.0, &tol()).unwrap();
            assert!(report.gap.frobenius_norm() <= 1e-12 * report.scale);
            let report = pointwise_mean_gap(a, a, r, 0.3, &tol()).unwrap();
            assert!(report.gap.frobenius_norm() <= 1e-12 * report.scale);
        }
    }

    #[test]
    fn pointwise_gap_scalar_oracle() {
        let a = HermitianMatrix::diagonal(&[1.0]);
        let b = HermitianMatrix::diagonal(&[4.0]);
        for lambda in [0.5, 0.25] {
            let report = pointwise_mean_gap(&a, &b, 0.0, lambda, &tol()).unwrap();
            assert_abs_diff_eq!(report.gap.entry(0, 0).re, 0.0, epsilon = 1e-14);
        }
        // r = 1: 4 − (1.75)(3.25) = −1.6875.
        let report = pointwise_mean_gap(&a, &b, 1.0, 0.25, &tol()).unwrap();
        assert_abs_diff_eq!(report.gap.entry(0, 0).re, -1.6875, epsilon = 1e-14);
        assert_eq!(report.verdict, Verdict::Fail);
        // r = −1: 4 − (1/(0.75 + 0.0625))(1/(0.25 + 0.1875)) = 4 − 2.8132…
        let report = pointwise_mean_gap(&a, &b, -1.0, 0.25, &tol()).unwrap();
        let expected = 4.0 - 1.0 / (0.75 + 0.25 / 4.0) / (0.25 + 0.75 / 4.0);
        assert_abs_diff_eq!(report.gap.entry(0, 0).re, expected, epsilon = 1e-13);
        assert!(report.verdict.is_pass());
    }

    #[test]
    fn mean_gap_single_point_reduces_to_pointwise() {
        let (f, g) = gen_increasing_pair(3, 2, 6).unwrap();
        let f1 = OperatorField::indexed(vec![f.at(1).clone()]).unwrap();
        let g1 = OperatorField::indexed(vec![g.at(1).clone()]).unwrap();
        let alpha = WeightVector::new(vec![1.7]).unwrap();
        let report = gap_mean(&f1, &g1, &alpha, -0.5, 0.5, &tol()).unwrap();
        let point = pointwise_mean_gap(f.at(1), g.at(1), -0.5, 0.5, &tol()).unwrap();
        let scaled = point.gap.scaled(1.7 * 1.7);
        assert!((&report.gap - &scaled).frobenius_norm() <= 1e-12 * report.scale);
    }

    #[test]
    fn mean_gap_endpoints_give_single_weight_chebyshev() {
        let (f, g) = gen_increasing_pair(3, 5, 2).unwrap();
        let alpha =
            WeightVector::new(nonnegative_weights(5, &mut rng_for(2, WEIGHT_STREAM))).unwrap();
        for r in [-1.0, 0.5, 1.0] {
            let report = gap_mean(&f, &g, &alpha, r, 0.0, &tol()).unwrap();
            let single = gap_discrete(&f, &g, &alpha, &alpha, &tol()).unwrap();
            // λ = 0: RHS = (ΣαA)∘(ΣαB), half of the symmetric two-weight gap.
            let half = single.gap.scaled(0.5);
            assert!((&report.gap - &half).frobenius_norm() <= 1e-10 * report.scale);
            assert!(report.verdict.is_pass());
        }
    }

    #[test]
    fn mean_gap_rejects_non_increasing_fields() {
        let (f, g) = gen_increasing_pair(2, 3, 2).unwrap();
        let reversed =
            OperatorField::indexed(g.matrices().iter().rev().cloned().collect()).unwrap();
        let alpha = WeightVector::uniform(3);
        assert!(matches!(
            gap_mean(&f, &reversed, &alpha, 0.0, 0.5, &tol()),
            Err(Error::HypothesisViolation(_))
        ));
        assert!(gap_mean_unchecked(&f, &reversed, &alpha, 0.0, 0.5, &tol()).is_ok());
        assert!(gap_mean(&f, &g, &alpha, 0.0, 1.5, &tol()).is_err());
    }

    #[test]
    fn triangular_example_is_diagonal_and_nonnegative() {
        let n = 16;
        let t: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
        let g: Vec<f64> = t.iter().map(|x| 1.0 - x).collect();
        let h: Vec<f64> = t.iter().map(|x| (3.0 * x).sin()).collect();
        let k: Vec<f64> = t.iter().map(|x| x * x - 2.0).collect();
        let pair = gen_triangular_pair(&t, &g, &h, &t, &g, &k).unwrap();
        let ones = WeightVector::uniform(n);
        let example = triangular_example(&pair, &ones, &ones).unwrap();
        assert!(example.is_diagonal());
        let [top, bottom] = example.diagonal_gaps();
        let scalar = |x: &[f64], y: &[f64]| 2.0 * scalar_chebyshev(&vec![1.0; n], x, y).unwrap();
        assert_abs_diff_eq!(top, scalar(&t, &t), epsilon = 1e-12);
        assert_abs_diff_eq!(bottom, scalar(&g, &g), epsilon = 1e-12);
        assert!(top > 0.0 && bottom > 0.0);
    }
}
