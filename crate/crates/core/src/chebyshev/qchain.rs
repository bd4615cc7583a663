//! The refinement chain `Q(1) ≤ Q(2) ≤ … ≤ Q(n)` between the product side and
//! the sum side of the discrete two-weight inequality.
//!
//! The chain is built constructively: `Q(1)` is the product side and each
//! step adds
//!
//! ```text
//! Q(k) − Q(k−1) = Σ_{j<k} (ω_k ν_j + ν_k ω_j) (A_k − A_j) ∘ (B_k − B_j).
//! ```
//!
//! The last value is then checked against the closed-form sum side
//! `W_n Σ ν_j (A_j∘B_j) + V_n Σ ω_j (A_j∘B_j)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{integrate, OperatorField, WeightVector};
use crate::hermat::{HermitianMatrix, Tolerances};
use crate::products::hadamard;

/// Relative bound on `‖Q(n) − sum side‖_F`.
pub const ENDPOINT_TOL: f64 = 1e-10;

/// Increment `Q(k) − Q(k−1)` for `2 ≤ k ≤ n` (1-based, as in the chain).
pub fn q_increment(
    k: usize,
    f: &OperatorField,
    g: &OperatorField,
    omega: &WeightVector,
    nu: &WeightVector,
) -> Result<HermitianMatrix> {
    check_shapes(f, g, omega, nu)?;
    let n = f.len();
    if k < 2 || k > n {
        return Err(Error::IndexOutOfRange {
            index: k,
            lo: 2,
            hi: n,
        });
    }
    let (w, v) = (omega.values(), nu.values());
    let last = k - 1;
    let mut acc = HermitianMatrix::zeros(f.dim());
    for j in 0..last {
        let coefficient = w[last] * v[j] + v[last] * w[j];
        let product = hadamard(&(f.at(last) - f.at(j)), &(g.at(last) - g.at(j)))?;
        acc = &acc + &product.scaled(coefficient);
    }
    Ok(acc)
}

fn check_shapes(
    f: &OperatorField,
    g: &OperatorField,
    omega: &WeightVector,
    nu: &WeightVector,
) -> Result<()> {
    if f.len() != g.len() || f.dim() != g.dim() || omega.len() != f.len() || nu.len() != f.len() {
        return Err(Error::ShapeMismatch(format!(
            "fields {}x{} / {}x{}, weights {} / {}",
            f.len(),
            f.dim(),
            g.len(),
            g.dim(),
            omega.len(),
            nu.len()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QChain {
    /// `Q(1), …, Q(n)`.
    pub values: Vec<HermitianMatrix>,
    /// `Q(k) − Q(k−1)` for `k = 2..=n`.
    pub increments: Vec<HermitianMatrix>,
    /// `W_k = Σ_{j≤k} ω_j`.
    pub omega_partial_sums: Vec<f64>,
    /// `V_k = Σ_{j≤k} ν_j`.
    pub nu_partial_sums: Vec<f64>,
    /// Closed-form sum side the chain must end at.
    pub sum_side: HermitianMatrix,
    pub scale: f64,
}

/// Summary of the chain's certified properties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QChainCheck {
    pub increments_psd: bool,
    pub monotone: bool,
    pub min_increment_eig: f64,
    pub endpoint_residual: f64,
    pub telescoping_residual: f64,
    pub scale: f64,
}

impl QChainCheck {
    pub fn passed(&self) -> bool {
        self.increments_psd
            && self.monotone
            && self.endpoint_residual <= ENDPOINT_TOL * self.scale.max(1.0)
            && self.telescoping_residual <= 1e-12 * self.scale.max(1.0)
    }
}

pub fn q_chain(
    f: &OperatorField,
    g: &OperatorField,
    omega: &WeightVector,
    nu: &WeightVector,
) -> Result<QChain> {
    check_shapes(f, g, omega, nu)?;
    let n = f.len();
    let first = &hadamard(&integrate(f, omega)?, &integrate(g, nu)?)?
        + &hadamard(&integrate(f, nu)?, &integrate(g, omega)?)?;
    let mut values = vec![first];
    let mut increments = Vec::with_capacity(n.saturating_sub(1));
    for k in 2..=n {
        let step = q_increment(k, f, g, omega, nu)?;
        let next = &values[k - 2] + &step;
        values.push(next);
        increments.push(step);
    }

    let products = f.hadamard_with(g)?;
    let sum_side = &integrate(&products, nu)?.scaled(omega.total())
        + &integrate(&products, omega)?.scaled(nu.total());
    let scale = values
        .iter()
        .chain(std::iter::once(&sum_side))
        .map(HermitianMatrix::frobenius_norm)
        .fold(0.0, f64::max);

    Ok(QChain {
        values,
        increments,
        omega_partial_sums: omega.partial_sums(),
        nu_partial_sums: nu.partial_sums(),
        sum_side,
        scale,
    })
}

impl QChain {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn first(&self) -> &HermitianMatrix {
        &self.values[0]
    }

    pub fn last(&self) -> &HermitianMatrix {
        self.values.last().expect("chain has at least one value")
    }

    pub fn check(&self, tol: &Tolerances) -> Result<QChainCheck> {
        let mut increments_psd = true;
        let mut min_increment_eig = f64::INFINITY;
        for step in &self.increments {
            let e = step.min_eigenvalue()?;
            increments_psd &= e >= tol.psd_floor(self.scale);
            min_increment_eig = min_increment_eig.min(e);
        }
        let mut monotone = true;
        let mut telescoping_residual: f64 = 0.0;
        for (k, step) in self.increments.iter().enumerate() {
            let (lo, hi) = (&self.values[k], &self.values[k + 1]);
            monotone &= lo.loewner_leq(hi, tol)?;
            telescoping_residual = telescoping_residual.max((&(hi - lo) - step).frobenius_norm());
        }
        if self.increments.is_empty() {
            min_increment_eig = 0.0;
        }
        Ok(QChainCheck {
            increments_psd,
            monotone,
            min_increment_eig,
            endpoint_residual: (self.last() - &self.sum_side).frobenius_norm(),
            telescoping_residual,
            scale: self.scale,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev::gap_discrete;
    use crate::fields::gen_scaled_pair;
    use crate::sampling::{nonnegative_weights, rng_for, WEIGHT_STREAM};

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
    fn increment_examples() {
        let m = HermitianMatrix::diagonal(&[1.0, 2.0]);
        let c = OperatorField::constant(3, &m).unwrap();
        let w = WeightVector::uniform(3);
        assert_eq!(
            q_increment(3, &c, &c, &w, &w).unwrap(),
            HermitianMatrix::zeros(2)
        );

        let a = scalar_field(&[1.0, 2.0]);
        let w = WeightVector::uniform(2);
        let step = q_increment(2, &a, &a, &w, &w).unwrap();
        assert_eq!(step, HermitianMatrix::diagonal(&[2.0]));

        assert!(matches!(
            q_increment(1, &a, &a, &w, &w),
            Err(Error::IndexOutOfRange { index: 1, .. })
        ));
        assert!(q_increment(3, &a, &a, &w, &w).is_err());
    }

    #[test]
    fn single_point_chain() {
        let a = scalar_field(&[3.0]);
        let w = WeightVector::new(vec![0.5]).unwrap();
        let chain = q_chain(&a, &a, &w, &w).unwrap();
        assert_eq!(chain.len(), 1);
        assert!(chain.increments.is_empty());
        assert!(chain.check(&tol()).unwrap().passed());
    }

    #[test]
    fn chain_matches_pair_sum_oracle() {
        let (f, g) = gen_scaled_pair(3, 6, 13).unwrap();
        let mut rng = rng_for(13, WEIGHT_STREAM);
        let omega = WeightVector::new(nonnegative_weights(6, &mut rng)).unwrap();
        let nu = WeightVector::new(nonnegative_weights(6, &mut rng)).unwrap();
        let chain = q_chain(&f, &g, &omega, &nu).unwrap();
        let check = chain.check(&tol()).unwrap();
        assert!(check.passed(), "{check:?}");

        let gap = gap_discrete(&f, &g, &omega, &nu, &tol()).unwrap();
        let span = chain.last() - chain.first();
        assert!((&span - &gap.gap).frobenius_norm() <= 1e-10 * chain.scale);

        // Brute-force pair sum, independent of the chain's ordering.
        let (w, v) = (omega.values(), nu.values());
        let mut oracle = HermitianMatrix::zeros(3);
        for s in 0..6 {
            for t in 0..6 {
                let d = hadamard(&(f.at(t) - f.at(s)), &(g.at(t) - g.at(s))).unwrap();
                oracle = &oracle + &d.scaled(0.5 * (w[s] * v[t] + v[s] * w[t]));
            }
        }
        assert!((&span - &oracle).frobenius_norm() <= 1e-10 * chain.scale);
        assert!(chain.omega_partial_sums.windows(2).all(|p| p[1] >= p[0]));
    }

    #[test]
    fn equal_weights_specialization() {
        let (f, g) = gen_scaled_pair(2, 5, 4).unwrap();
        let omega =
            WeightVector::new(nonnegative_weights(5, &mut rng_for(4, WEIGHT_STREAM))).unwrap();
        let chain = q_chain(&f, &g, &omega, &omega).unwrap();
        let w = omega.values();
        for k in 2..=5 {
            let last = k - 1;
            let mut expected = HermitianMatrix::zeros(2);
            for j in 0..last {
                let d = hadamard(&(f.at(last) - f.at(j)), &(g.at(last) - g.at(j))).unwrap();
                expected = &expected + &d.scaled(2.0 * w[last] * w[j]);
            }
            assert!((&chain.increments[k - 2] - &expected).frobenius_norm() <= 1e-13 * chain.scale);
        }
    }
}
