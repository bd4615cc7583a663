//! Power-mean interpolational paths `A m_{r,t} B`.
//!
//! ```text
//! A m_{r,t} B = A^½ ((1-t) I + t (A^-½ B A^-½)^r)^{1/r} A^½
//! ```
//!
//! `r = 1` is the weighted arithmetic mean, `r = -1` the weighted harmonic
//! mean and `r → 0` the weighted geometric mean `A ♯_t B`. The parameter `t`
//! weights `B`: `t = 0` returns `A` and `t = 1` returns `B`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermat::{CMatrix, HermitianMatrix, Tolerances};
use crate::sampling::{
    random_complex, random_psd, random_strictly_positive, rng_for, AXIOM_STREAM,
};

/// A point `(r, t)` on the power-mean family, `r ∈ [-1, 1]`, `t ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanSpec {
    r: f64,
    t: f64,
}

impl MeanSpec {
    pub fn new(r: f64, t: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&r) {
            return Err(Error::InvalidParameter {
                name: "r",
                value: r,
                reason: "power exponent must lie in [-1, 1]",
            });
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter {
                name: "t",
                value: t,
                reason: "path parameter must lie in [0, 1]",
            });
        }
        Ok(Self { r, t })
    }

    pub fn arithmetic(t: f64) -> Result<Self> {
        Self::new(1.0, t)
    }

    pub fn geometric(t: f64) -> Result<Self> {
        Self::new(0.0, t)
    }

    pub fn harmonic(t: f64) -> Result<Self> {
        Self::new(-1.0, t)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// The same exponent with the path parameter `1 - t`.
    pub fn reversed(&self) -> Self {
        Self {
            r: self.r,
            t: 1.0 - self.t,
        }
    }
}

/// Scalar representing function `F_{r,t}(x) = 1 m_{r,t} x = (1 - t + t x^r)^{1/r}`.
pub fn representing_function(spec: MeanSpec, x: f64, tol: &Tolerances) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::NonpositiveArgument(x));
    }
    let (r, t) = (spec.r, spec.t);
    if r.abs() < tol.zero_r_cutoff {
        Ok(x.powf(t))
    } else {
        Ok((1.0 - t + t * x.powf(r)).powf(1.0 / r))
    }
}

fn require_strictly_positive(operand: &'static str, min_eig: f64, floor: f64) -> Result<()> {
    if min_eig.is_nan() || min_eig <= floor {
        return Err(Error::NotStrictlyPositive { operand, min_eig });
    }
    Ok(())
}

/// `A m_{r,t} B` for strictly positive `A`, `B`.
///
/// Operands whose minimum eigenvalue is at most `psd_tol · max(1, ‖·‖_F)` are
/// rejected; use [`power_mean_regularized`] to pass PSD-but-singular data.
pub fn power_mean(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    spec: MeanSpec,
    tol: &Tolerances,
) -> Result<HermitianMatrix> {
    let floor = |m: &HermitianMatrix| tol.psd_tol * m.frobenius_norm().max(1.0);
    gated_power_mean(a, b, spec, tol, floor(a), floor(b))
}

/// `A_ε m_{r,t} B_ε` with `X_ε = X + εI`. `eps` defaults to
/// `1e-8 · max(‖A‖_F, ‖B‖_F)`; the shifted operands only need a positive spectrum.
pub fn power_mean_regularized(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    spec: MeanSpec,
    eps: Option<f64>,
    tol: &Tolerances,
) -> Result<HermitianMatrix> {
    let eps = eps.unwrap_or_else(|| 1e-8 * a.frobenius_norm().max(b.frobenius_norm()));
    let a = regularize(a, eps)?;
    let b = regularize(b, eps)?;
    gated_power_mean(&a, &b, spec, tol, 0.0, 0.0)
}

fn gated_power_mean(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    spec: MeanSpec,
    tol: &Tolerances,
    a_floor: f64,
    b_floor: f64,
) -> Result<HermitianMatrix> {
    a.check_same_dim(b)?;
    let a_spec = a.spectral_decompose()?;
    require_strictly_positive("A", a_spec.min_eigenvalue(), a_floor)?;
    require_strictly_positive("B", b.min_eigenvalue()?, b_floor)?;

    let a_half = a_spec.apply(f64::sqrt)?;
    let a_inv_half = a_spec.apply(|x| 1.0 / x.sqrt())?;
    let core = b.conjugate_by(a_inv_half.as_matrix());

    let (r, t) = (spec.r, spec.t);
    let middle = if r.abs() < tol.zero_r_cutoff {
        core.apply_function(|x| x.max(0.0).powf(t))?
    } else {
        let mixed = core.apply_function(|x| 1.0 - t + t * x.max(0.0).powf(r))?;
        mixed.apply_function(|y| y.powf(1.0 / r))?
    };
    Ok(middle.conjugate_by(a_half.as_matrix()))
}

/// `A + eps·I`, used to carry PSD-but-singular operands into [`power_mean`].
pub fn regularize(a: &HermitianMatrix, eps: f64) -> Result<HermitianMatrix> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "eps",
            value: eps,
            reason: "regularization must be positive",
        });
    }
    Ok(a + &HermitianMatrix::identity(a.dim()).scaled(eps))
}

/// Frobenius residual of `(A m_{r,p} B) m_{r,s} (A m_{r,q} B) = A m_{r,(1-s)p+sq} B`.
pub fn check_path_identity(
    r: f64,
    p: f64,
    q: f64,
    s: f64,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    tol: &Tolerances,
) -> Result<f64> {
    let left = power_mean(a, b, MeanSpec::new(r, p)?, tol)?;
    let right = power_mean(a, b, MeanSpec::new(r, q)?, tol)?;
    let combined = power_mean(&left, &right, MeanSpec::new(r, s)?, tol)?;
    let target = power_mean(a, b, MeanSpec::new(r, (1.0 - s) * p + s * q)?, tol)?;
    Ok((&combined - &target).frobenius_norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    /// `A ≤ C, B ≤ D ⟹ A σ B ≤ C σ D`.
    Monotonicity,
    /// `T*(A σ B)T ≤ (T*AT) σ (T*BT)`.
    Transformer,
    /// `I σ I = I`.
    Normalization,
}

/// A falsified axiom together with everything needed to replay it.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomFailure {
    pub trial: usize,
    pub axiom: Axiom,
    /// Minimum eigenvalue of the gap that should be PSD, or the normalization residual.
    pub witness: f64,
    pub inputs: BTreeMap<&'static str, HermitianMatrix>,
    /// Real and imaginary parts of the transformer matrix, row-major.
    pub transform: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub spec: MeanSpec,
    pub trials: usize,
    pub dim: usize,
    pub seed: u64,
    /// Least `min_eig / max(1, scale)` over the monotonicity and transformer gaps.
    pub min_relative_slack: f64,
    pub failures: Vec<AxiomFailure>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn general_rows(t: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..t.nrows())
        .map(|i| {
            (0..t.ncols())
                .map(|j| [t[(i, j)].re, t[(i, j)].im])
                .collect()
        })
        .collect()
}

/// Randomized check of the monotonicity, transformer and normalization axioms.
///
/// Each trial draws strictly positive `A`, `B`, PSD increments giving `C ≥ A`
/// and `D ≥ B`, and a transformer `T = G + 2I` with `G` uniform in the unit
/// square per entry (kept invertible so all operands stay strictly positive).
pub fn check_mean_axioms(
    spec: MeanSpec,
    trials: usize,
    dim: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<AxiomReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter {
            name: "trials",
            value: 0.0,
            reason: "at least one trial is required",
        });
    }
    if dim == 0 {
        return Err(Error::Empty);
    }
    let mut rng = rng_for(seed, AXIOM_STREAM);
    let mut failures = Vec::new();
    let mut min_relative_slack = f64::INFINITY;
    let identity = HermitianMatrix::identity(dim);

    for trial in 0..trials {
        let a = random_strictly_positive(dim, &mut rng);
        let b = random_strictly_positive(dim, &mut rng);
        let c = &a + &random_psd(dim, &mut rng);
        let d = &b + &random_psd(dim, &mut rng);
        let t = random_complex(dim, dim, &mut rng)
            + CMatrix::identity(dim, dim) * Complex64::new(2.0, 0.0);

        let ab = power_mean(&a, &b, spec, tol)?;
        let cd = power_mean(&c, &d, spec, tol)?;
        let gap = &cd - &ab;
        let min_eig = gap.min_eigenvalue()?;
        let scale = gap.frobenius_norm().max(ab.frobenius_norm());
        min_relative_slack = min_relative_slack.min(min_eig / scale.max(1.0));
        if min_eig < tol.psd_floor(scale) {
            failures.push(AxiomFailure {
                trial,
                axiom: Axiom::Monotonicity,
                witness: min_eig,
                inputs: BTreeMap::from([("A", a.clone()), ("B", b.clone()), ("C", c), ("D", d)]),
                transform: None,
            });
        }

        let outside = ab.conjugate_by(&t);
        let inside = power_mean(&a.conjugate_by(&t), &b.conjugate_by(&t), spec, tol)?;
        let gap = &inside - &outside;
        let min_eig = gap.min_eigenvalue()?;
        let scale = gap.frobenius_norm().max(outside.frobenius_norm());
        min_relative_slack = min_relative_slack.min(min_eig / scale.max(1.0));
        if min_eig < tol.psd_floor(scale) {
            failures.push(AxiomFailure {
                trial,
                axiom: Axiom::Transformer,
                witness: min_eig,
                inputs: BTreeMap::from([("A", a), ("B", b)]),
                transform: Some(general_rows(&t)),
            });
        }

        let unit = power_mean(&identity, &identity, spec, tol)?;
        let residual = (&unit - &identity).frobenius_norm();
        if residual > tol.recon_tol * dim as f64 {
            failures.push(AxiomFailure {
                trial,
                axiom: Axiom::Normalization,
                witness: residual,
                inputs: BTreeMap::new(),
                transform: None,
            });
        }
    }

    Ok(AxiomReport {
        spec,
        trials,
        dim,
        seed,
        min_relative_slack,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn rel_err(x: &HermitianMatrix, y: &HermitianMatrix) -> f64 {
        (x - y).frobenius_norm() / y.frobenius_norm().max(1e-300)
    }

    fn pair() -> (HermitianMatrix, HermitianMatrix) {
        let mut rng = rng_for(21, 0);
        (
            random_strictly_positive(3, &mut rng),
            random_strictly_positive(3, &mut rng),
        )
    }

    #[test]
    fn spec_ranges_are_enforced() {
        assert!(MeanSpec::new(1.5, 0.5).is_err());
        assert!(MeanSpec::new(0.0, -0.1).is_err());
        assert!(MeanSpec::new(-1.0, 1.0).is_ok());
        assert_eq!(MeanSpec::new(0.5, 0.25).unwrap().reversed().t(), 0.75);
    }

    #[test]
    fn path_endpoints() {
        let (a, b) = pair();
        for r in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            let at_a = power_mean(&a, &b, MeanSpec::new(r, 0.0).unwrap(), &tol()).unwrap();
            let at_b = power_mean(&a, &b, MeanSpec::new(r, 1.0).unwrap(), &tol()).unwrap();
            assert!(rel_err(&at_a, &a) < 1e-12, "r = {r}");
            assert!(rel_err(&at_b, &b) < 1e-12, "r = {r}");
        }
    }

    #[test]
    fn arithmetic_and_harmonic_closed_forms() {
        let (a, b) = pair();
        let t = 0.3;
        let arith = power_mean(&a, &b, MeanSpec::arithmetic(t).unwrap(), &tol()).unwrap();
        let expected = &a.scaled(1.0 - t) + &b.scaled(t);
        assert!(rel_err(&arith, &expected) < 1e-12);

        let harm = power_mean(&a, &b, MeanSpec::harmonic(t).unwrap(), &tol()).unwrap();
        let inv = |m: &HermitianMatrix| m.power_psd(-1.0, &tol()).unwrap();
        let expected = inv(&(&inv(&a).scaled(1.0 - t) + &inv(&b).scaled(t)));
        assert!(rel_err(&harm, &expected) < 1e-12);
    }

    #[test]
    fn commuting_geometric_mean() {
        let a = HermitianMatrix::diagonal(&[1.0, 4.0]);
        let b = HermitianMatrix::diagonal(&[9.0, 1.0]);
        let spec = MeanSpec::new(1e-12, 0.5).unwrap();
        let g = power_mean(&a, &b, spec, &tol()).unwrap();
        assert!(g.max_abs_diff(&HermitianMatrix::diagonal(&[3.0, 2.0])) < 1e-14);
    }

    #[test]
    fn strict_positivity_gate() {
        let singular = HermitianMatrix::diagonal(&[1.0, 0.0]);
        let id = HermitianMatrix::identity(2);
        let spec = MeanSpec::geometric(0.5).unwrap();
        assert!(matches!(
            power_mean(&singular, &id, spec, &tol()),
            Err(Error::NotStrictlyPositive { operand: "A", .. })
        ));
        assert!(matches!(
            power_mean(&id, &singular, spec, &tol()),
            Err(Error::NotStrictlyPositive { operand: "B", .. })
        ));
        assert!(matches!(
            power_mean(&id, &HermitianMatrix::identity(3), spec, &tol()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn representing_function_examples() {
        for r in [-1.0, -0.3, 0.0, 0.4, 1.0] {
            for t in [0.0, 0.2, 0.7, 1.0] {
                let spec = MeanSpec::new(r, t).unwrap();
                assert_relative_eq!(
                    representing_function(spec, 1.0, &tol()).unwrap(),
                    1.0,
                    max_relative = 1e-15
                );
            }
        }
        let arith = MeanSpec::arithmetic(0.3).unwrap();
        assert_relative_eq!(
            representing_function(arith, 5.0, &tol()).unwrap(),
            0.7 + 1.5,
            max_relative = 1e-15
        );
        let harm = MeanSpec::harmonic(0.5).unwrap();
        assert_relative_eq!(
            representing_function(harm, 4.0, &tol()).unwrap(),
            1.6,
            max_relative = 1e-15
        );
        assert!(matches!(
            representing_function(harm, 0.0, &tol()),
            Err(Error::NonpositiveArgument(_))
        ));
    }

    #[test]
    fn scalar_consistency() {
        let (a, b) = (2.5, 0.7);
        for r in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            let spec = MeanSpec::new(r, 0.35).unwrap();
            let m = power_mean(
                &HermitianMatrix::diagonal(&[a]),
                &HermitianMatrix::diagonal(&[b]),
                spec,
                &tol(),
            )
            .unwrap();
            let scalar = a * representing_function(spec, b / a, &tol()).unwrap();
            assert_relative_eq!(m.entry(0, 0).re, scalar, max_relative = 1e-12);
        }
    }

    #[test]
    fn path_identity_commuting_case() {
        let a = HermitianMatrix::diagonal(&[1.0, 2.0]);
        let b = HermitianMatrix::diagonal(&[3.0, 5.0]);
        let (r, p, q, s) = (0.5, 0.2, 0.8, 0.25);
        let residual = check_path_identity(r, p, q, s, &a, &b, &tol()).unwrap();
        assert!(residual <= 1e-10);

        // Scalar oracle per diagonal slot: ((1-s) u^r + s v^r)^{1/r}.
        let left = power_mean(&a, &b, MeanSpec::new(r, p).unwrap(), &tol()).unwrap();
        let right = power_mean(&a, &b, MeanSpec::new(r, q).unwrap(), &tol()).unwrap();
        let combined = power_mean(&left, &right, MeanSpec::new(r, s).unwrap(), &tol()).unwrap();
        for (k, (x, y)) in [(1.0f64, 3.0f64), (2.0, 5.0)].into_iter().enumerate() {
            let u = ((1.0 - p) * x.powf(r) + p * y.powf(r)).powf(1.0 / r);
            let v = ((1.0 - q) * x.powf(r) + q * y.powf(r)).powf(1.0 / r);
            let oracle = ((1.0 - s) * u.powf(r) + s * v.powf(r)).powf(1.0 / r);
            assert_relative_eq!(combined.entry(k, k).re, oracle, max_relative = 1e-12);
        }
    }

    #[test]
    fn path_identity_degenerate_parameters() {
        let (a, b) = pair();
        let residual = check_path_identity(-0.5, 0.4, 0.4, 0.9, &a, &b, &tol()).unwrap();
        assert!(residual <= 1e-10 * a.frobenius_norm());
    }

    #[test]
    fn regularize_shifts_spectrum() {
        assert_eq!(
            regularize(&HermitianMatrix::zeros(3), 1.0).unwrap(),
            HermitianMatrix::identity(3)
        );
        let (a, _) = pair();
        let shifted = regularize(&a, 0.25).unwrap();
        assert_relative_eq!(
            shifted.min_eigenvalue().unwrap(),
            a.min_eigenvalue().unwrap() + 0.25,
            max_relative = 1e-13
        );
        assert!(regularize(&a, 0.0).is_err());
    }

    #[test]
    fn regularized_singular_operand_converges() {
        let singular = HermitianMatrix::diagonal(&[1.0, 0.0]);
        let (_, b) = pair();
        let b = HermitianMatrix::diagonal(&[b.entry(0, 0).re, b.entry(1, 1).re]);
        let spec = MeanSpec::new(-0.5, 0.5).unwrap();
        let coarse = power_mean_regularized(&singular, &b, spec, Some(1e-6), &tol()).unwrap();
        let fine = power_mean_regularized(&singular, &b, spec, Some(1e-8), &tol()).unwrap();
        assert!(power_mean(&singular, &b, spec, &tol()).is_err());
        assert!((&coarse - &fine).frobenius_norm() <= 1e-4 * b.frobenius_norm());
    }

    #[test]
    fn axiom_checker_rejects_zero_trials() {
        let spec = MeanSpec::arithmetic(0.5).unwrap();
        assert!(check_mean_axioms(spec, 0, 2, 1, &tol()).is_err());
        let report = check_mean_axioms(spec, 5, 2, 1, &tol()).unwrap();
        assert!(report.passed());
    }
}
