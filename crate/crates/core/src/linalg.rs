//! Small complex linear-algebra helpers shared by every module.
//!
//! Tensor ordering everywhere is `site (or sublattice) ⊗ coin`, so the flat
//! index of `(site i, coin c)` is `2 * i + c` with `c = 0` for H and `c = 1`
//! for V.

use nalgebra::{DMatrix, Matrix2, Matrix4, Vector2};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;
pub type Vec2 = Vector2<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn sigma_x() -> Mat2 {
    Mat2::new(ZERO, ONE, ONE, ZERO)
}

pub fn sigma_y() -> Mat2 {
    Mat2::new(ZERO, -I, I, ZERO)
}

pub fn sigma_z() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, -ONE)
}

/// Polarization rotation `[[cos φ, −i sin φ], [−i sin φ, cos φ]]`.
pub fn coin(phi: f64) -> Mat2 {
    let (s, c) = phi.sin_cos();
    Mat2::new(real(c), C64::new(0.0, -s), C64::new(0.0, -s), real(c))
}

/// Kronecker product of two 2×2 blocks, `a` acting on the outer index.
pub fn kron2(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// Assemble `[[d0, m01], [m10, d1]]` from 2×2 blocks.
pub fn block4(d0: &Mat2, m01: &Mat2, m10: &Mat2, d1: &Mat2) -> Mat4 {
    let mut out = Mat4::zeros();
    out.fixed_view_mut::<2, 2>(0, 0).copy_from(d0);
    out.fixed_view_mut::<2, 2>(0, 2).copy_from(m01);
    out.fixed_view_mut::<2, 2>(2, 0).copy_from(m10);
    out.fixed_view_mut::<2, 2>(2, 2).copy_from(d1);
    out
}

/// Largest singular value of a 4×4 block.
pub fn op_norm4(m: &Mat4) -> f64 {
    m.singular_values().max()
}

/// `‖m†m − 1‖` in the max-element norm.
pub fn unitarity_residual(m: &DMatrix<C64>) -> f64 {
    let prod = m.adjoint() * m;
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for r in 0..n {
        for c in 0..n {
            let target = if r == c { ONE } else { ZERO };
            worst = worst.max((prod[(r, c)] - target).norm());
        }
    }
    worst
}

/// Eigen-decomposition of a unitary matrix.
#[derive(Debug, Clone)]
pub struct UnitaryEigen {
    /// Eigenvalues projected onto the unit circle.
    pub values: Vec<C64>,
    /// Orthonormal eigenvectors stored as columns.
    pub vectors: DMatrix<C64>,
    /// Largest `| |λ| − 1 |` removed by the projection.
    pub projection_delta: f64,
    /// Largest off-diagonal magnitude left in the Schur factor.
    pub normality_residual: f64,
}

/// Diagonalize a unitary matrix through its complex Schur form.
///
/// A unitary matrix is normal, so its Schur factor is diagonal and the Schur
/// vectors are eigenvectors, orthonormal even inside degenerate subspaces.
pub fn unitary_eigen(m: DMatrix<C64>) -> Result<UnitaryEigen> {
    let n = m.nrows();
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 200 * n.max(4))
        .ok_or(Error::EigenFailure { at_k: None })?;
    let (q, t) = schur.unpack();

    let mut normality_residual: f64 = 0.0;
    for c in 0..n {
        for r in 0..c {
            normality_residual = normality_residual.max(t[(r, c)].norm());
        }
    }
    if normality_residual > 1e-8 {
        return Err(Error::EigenFailure { at_k: None });
    }

    let mut projection_delta: f64 = 0.0;
    let values = (0..n)
        .map(|i| {
            let lambda = t[(i, i)];
            let modulus = lambda.norm();
            projection_delta = projection_delta.max((modulus - 1.0).abs());
            lambda / modulus
        })
        .collect();

    Ok(UnitaryEigen {
        values,
        vectors: q,
        projection_delta,
        normality_residual,
    })
}

/// `⟨v|op|v⟩` for a Hermitian operator, real part only.
pub fn expectation4(op: &Mat4, v: &nalgebra::Vector4<C64>) -> f64 {
    (v.adjoint() * op * v)[(0, 0)].re
}

/// Wrap an angle into `(−π, π]`.
pub fn wrap_pi(x: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    y
}
