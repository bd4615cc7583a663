//! Hadamard and Kronecker products, and the isometry `U e_j = e_j ⊗ e_j`
//! that recovers the former from the latter as `A ∘ B = U*(A ⊗ B)U`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermat::{CMatrix, HermitianMatrix};

/// Largest Kronecker product dimension the embedding check supports.
pub const MAX_KRONECKER_DIM: usize = 64;

/// Entrywise product in the standard basis.
pub fn hadamard(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    a.check_same_dim(b)?;
    // a_ij b_ij is exactly conj(a_ji b_ji), so no re-symmetrization is needed.
    Ok(HermitianMatrix::symmetrized(
        a.as_matrix().component_mul(b.as_matrix()),
    ))
}

/// Block matrix with `(i, j)` block `a_ij · B`.
pub fn kronecker(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    let dim = a.dim() * b.dim();
    if dim > MAX_KRONECKER_DIM {
        return Err(Error::DimensionTooLarge {
            dim,
            max: MAX_KRONECKER_DIM,
        });
    }
    Ok(HermitianMatrix::symmetrized(
        a.as_matrix().kronecker(b.as_matrix()),
    ))
}

/// The `dim² × dim` isometry whose column `j` is `e_j ⊗ e_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingIsometry {
    dim: usize,
    matrix: CMatrix,
}

impl EmbeddingIsometry {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Empty);
        }
        let mut matrix = CMatrix::zeros(dim * dim, dim);
        for j in 0..dim {
            matrix[(j * dim + j, j)] = Complex64::new(1.0, 0.0);
        }
        Ok(Self { dim, matrix })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `U* M U` for a `dim² × dim²` matrix `M`.
    pub fn compress(&self, m: &HermitianMatrix) -> Result<HermitianMatrix> {
        if m.dim() != self.dim * self.dim {
            return Err(Error::DimensionMismatch {
                left: m.dim(),
                right: self.dim * self.dim,
            });
        }
        Ok(m.conjugate_by(&self.matrix))
    }
}

/// `U*(A ⊗ B)U`, computed through the actual Kronecker product.
pub fn hadamard_via_embedding(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    a.check_same_dim(b)?;
    let u = EmbeddingIsometry::new(a.dim())?;
    u.compress(&kronecker(a, b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermat::Tolerances;
    use crate::sampling::{random_hermitian, random_psd, rng_for};

    fn real(rows: &[[f64; 2]; 2]) -> HermitianMatrix {
        HermitianMatrix::from_real_rows(rows).unwrap()
    }

    #[test]
    fn hadamard_examples() {
        let mut rng = rng_for(3, 0);
        let a = random_hermitian(4, &mut rng);
        let diag = hadamard(&a, &HermitianMatrix::identity(4)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j {
                    a.entry(i, i)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                assert_eq!(diag.entry(i, j), expected);
            }
        }
        assert_eq!(hadamard(&HermitianMatrix::ones(4), &a).unwrap(), a);

        let lhs = real(&[[1.0, 2.0], [2.0, 1.0]]);
        let rhs = real(&[[3.0, 4.0], [4.0, 3.0]]);
        assert_eq!(
            hadamard(&lhs, &rhs).unwrap(),
            real(&[[3.0, 8.0], [8.0, 3.0]])
        );
        assert!(matches!(
            hadamard(&lhs, &HermitianMatrix::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kronecker_examples() {
        let i2 = HermitianMatrix::identity(2);
        assert_eq!(kronecker(&i2, &i2).unwrap(), HermitianMatrix::identity(4));

        let ab = kronecker(
            &HermitianMatrix::diagonal(&[2.0, 3.0]),
            &HermitianMatrix::diagonal(&[5.0, 7.0]),
        )
        .unwrap();
        assert_eq!(ab, HermitianMatrix::diagonal(&[10.0, 14.0, 15.0, 21.0]));

        let swap = real(&[[0.0, 1.0], [1.0, 0.0]]);
        let k = kronecker(&swap, &HermitianMatrix::diagonal(&[2.0, 3.0])).unwrap();
        let expected = HermitianMatrix::from_real_rows(&[
            [0.0, 0.0, 2.0, 0.0],
            [0.0, 0.0, 0.0, 3.0],
            [2.0, 0.0, 0.0, 0.0],
            [0.0, 3.0, 0.0, 0.0],
        ])
        .unwrap();
        assert_eq!(k, expected);

        let big = HermitianMatrix::identity(9);
        assert!(matches!(
            kronecker(&big, &big),
            Err(Error::DimensionTooLarge { dim: 81, .. })
        ));
    }

    #[test]
    fn embedding_isometry_layout() {
        let u1 = EmbeddingIsometry::new(1).unwrap();
        assert_eq!(u1.matrix().shape(), (1, 1));
        assert_eq!(u1.matrix()[(0, 0)], Complex64::new(1.0, 0.0));

        for dim in [2usize, 3] {
            let u = EmbeddingIsometry::new(dim).unwrap();
            assert_eq!(u.matrix().shape(), (dim * dim, dim));
            for j in 0..dim {
                let col = u.matrix().column(j);
                let nonzero: Vec<usize> =
                    (0..dim * dim).filter(|&r| col[r].norm() != 0.0).collect();
                assert_eq!(nonzero, vec![j * dim + j]);
                assert_eq!(col[j * dim + j], Complex64::new(1.0, 0.0));
            }
            let gram = u.matrix().adjoint() * u.matrix();
            assert_eq!(gram, CMatrix::identity(dim, dim));
        }
        assert!(EmbeddingIsometry::new(0).is_err());
    }

    #[test]
    fn embedding_matches_entrywise_product() {
        let i2 = HermitianMatrix::identity(2);
        assert_eq!(hadamard_via_embedding(&i2, &i2).unwrap(), i2);
        let lhs = real(&[[1.0, 2.0], [2.0, 1.0]]);
        let rhs = real(&[[3.0, 4.0], [4.0, 3.0]]);
        assert_eq!(
            hadamard_via_embedding(&lhs, &rhs).unwrap(),
            real(&[[3.0, 8.0], [8.0, 3.0]])
        );
    }

    #[test]
    fn schur_product_of_psd_is_psd() {
        let tol = Tolerances::default();
        let mut rng = rng_for(5, 0);
        for dim in 1..6 {
            let a = random_psd(dim, &mut rng);
            let b = random_psd(dim, &mut rng);
            assert!(hadamard(&a, &b).unwrap().is_psd(&tol).unwrap());
        }
    }
}
