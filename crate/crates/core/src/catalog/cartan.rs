//! Cartan's isoparametric family with `g = 3`, `m± = 1` in `S^4`.
//!
//! `R^5` is the space of traceless symmetric 3×3 matrices with inner product
//! `Tr(XY)`, so the unit sphere is `{Tr X² = 1}`. The Cartan–Münzner
//! polynomial restricts to `F(X) = √6 Tr X³`, whose level sets
//! `F = cos 3θ` are the `SO(3)` conjugation orbits of
//! `diag(μ_0, μ_1, μ_2)`, `μ_i = (2/√6) cos(θ + 2πi/3)`.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{shape_from_level_set, spherical_gradient, AmbientField, SurfacePoint};
use crate::linalg::{self, Matrix};
use crate::sampling;
use crate::scalar::Real;

use super::Hypersurface;

/// Level `θ` of the minimal member.
pub const CARTAN_MINIMAL_THETA: f64 = PI / 6.0;

const RETRACT_MAX_ITER: usize = 50;

/// Orthonormal basis of traceless symmetric 3×3 matrices under `Tr(XY)`.
fn basis<T: Real>() -> [Matrix<T>; 5] {
    let s2 = T::lit(2f64.sqrt().recip());
    let s6 = T::lit(6f64.sqrt().recip());
    let z = T::zero();
    let m = |r: [[T; 3]; 3]| Matrix::from_fn(3, |i, j| r[i][j]);
    [
        m([[s2, z, z], [z, -s2, z], [z, z, z]]),
        m([[s6, z, z], [z, s6, z], [z, z, T::lit(-2.0) * s6]]),
        m([[z, s2, z], [s2, z, z], [z, z, z]]),
        m([[z, z, s2], [z, z, z], [s2, z, z]]),
        m([[z, z, z], [z, z, s2], [z, s2, z]]),
    ]
}

/// Matrix `X = Σ x_i E_i` of a point of `R^5`.
pub fn to_matrix<T: Real>(x: &[T]) -> Matrix<T> {
    let mut out = Matrix::zeros(3);
    for (c, e) in x.iter().zip(basis::<T>()) {
        out = out.add(&e.scale(*c));
    }
    out
}

/// Coordinates `x_i = Tr(X E_i)` of a traceless symmetric matrix.
pub fn to_coords<T: Real>(m: &Matrix<T>) -> Vec<T> {
    basis::<T>().iter().map(|e| e.frobenius_dot(m)).collect()
}

/// `√6`, the normalization making `max_{S^4} F = 1`.
fn normalization<T: Real>() -> T {
    T::lit(6f64.sqrt())
}

/// Cartan–Münzner polynomial `F(X) = √6 Tr X³` on `R^5`.
#[derive(Clone, Copy, Debug, Default)]
pub struct CartanField;

/// Evaluates the Cartan–Münzner polynomial; derivatives via [`CartanField`].
pub fn cartan_munzner_eval<T: Real>(x: &[T]) -> T {
    CartanField.value(x)
}

impl<T: Real> AmbientField<T> for CartanField {
    fn ambient_dim(&self) -> usize {
        5
    }

    fn value(&self, x: &[T]) -> T {
        let m = to_matrix(x);
        normalization::<T>() * m.mul(&m).frobenius_dot(&m)
    }

    fn gradient(&self, x: &[T]) -> Vec<T> {
        let m = to_matrix(x);
        let sq = m.mul(&m);
        let c = T::lit(3.0) * normalization::<T>();
        basis::<T>().iter().map(|e| c * sq.frobenius_dot(e)).collect()
    }

    fn hessian(&self, x: &[T]) -> Matrix<T> {
        let m = to_matrix(x);
        let es = basis::<T>();
        let me: Vec<Matrix<T>> = es.iter().map(|e| m.mul(e)).collect();
        let c = T::lit(3.0) * normalization::<T>();
        // d²F[E_i, E_j] = 3√6 (Tr(X E_i E_j) + Tr(X E_j E_i))
        Matrix::from_fn(5, |i, j| {
            c * (me[i].frobenius_dot(&es[j].transpose()) + me[j].frobenius_dot(&es[i].transpose()))
        })
    }
}

/// The level set `M_θ = {F = cos 3θ}`, `0 < θ < π/3`.
#[derive(Clone, Debug)]
pub struct CartanLevel<T> {
    theta: T,
    level: T,
}

impl<T: Real> CartanLevel<T> {
    pub fn new(theta: T) -> Result<Self> {
        let third = T::PI() / T::lit(3.0);
        let margin = T::lit(1e-6);
        if !(theta > margin && theta < third - margin) {
            return Err(Error::FocalPoint { norm: theta.to_f64_lossy() });
        }
        Ok(Self { theta, level: (T::lit(3.0) * theta).cos() })
    }

    pub fn minimal() -> Self {
        Self::new(T::lit(CARTAN_MINIMAL_THETA)).expect("interior level")
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn level(&self) -> T {
        self.level
    }

    /// Eigenvalues of the matrix points on this orbit.
    pub fn matrix_eigenvalues(&self) -> [T; 3] {
        let a = T::lit(2.0 / 6f64.sqrt());
        let step = T::lit(2.0 * PI / 3.0);
        [0, 1, 2].map(|i| a * (self.theta + step * T::of(i)).cos())
    }

    /// Principal curvatures `cot(θ + jπ/3)`, `j = 0, 1, 2`, for the normal
    /// along `∇F`.
    pub fn principal_curvatures(&self) -> [T; 3] {
        let step = T::PI() / T::lit(3.0);
        [0, 1, 2].map(|j| {
            let b = self.theta + step * T::of(j);
            b.cos() / b.sin()
        })
    }

    pub fn mean_curvature(&self) -> T {
        self.principal_curvatures().iter().copied().sum::<T>() / T::lit(3.0)
    }

    pub fn squared_norm(&self) -> T {
        self.principal_curvatures().iter().map(|&l| l * l).sum()
    }

    /// Orbit point `Q diag(μ) Q^T` in `R^5` coordinates.
    pub fn orbit_point(&self, q: &Matrix<T>) -> Vec<T> {
        let d = Matrix::from_diagonal(&self.matrix_eigenvalues());
        to_coords(&q.mul(&d).mul(&q.transpose()))
    }
}

impl<T: Real> Hypersurface<T> for CartanLevel<T> {
    fn dim(&self) -> usize {
        3
    }

    /// Volume of the orbit `SO(3)/(Z_2 × Z_2)`: `Vol(SO(3))/4 = 2π²` times
    /// the Jacobian `Π_{i<j} √2 |μ_i - μ_j|` of `Q ↦ Q D Q^T` at the identity.
    fn volume(&self) -> T {
        let mu = self.matrix_eigenvalues();
        let s2 = T::lit(2f64.sqrt());
        let jac = s2 * (mu[0] - mu[1]).abs() * s2 * (mu[0] - mu[2]).abs() * s2 * (mu[1] - mu[2]).abs();
        T::lit(2.0 * PI * PI) * jac
    }

    fn point_at(&self, x: &[T]) -> Result<SurfacePoint<T>> {
        shape_from_level_set(&CartanField, x)
    }

    fn retract(&self, p: &SurfacePoint<T>, v: &[T]) -> Result<SurfacePoint<T>> {
        let mut z = linalg::normalized(&linalg::combine(T::one(), &p.x, T::one(), v));
        let tol = T::epsilon() * T::lit(8.0);
        let mut residual = CartanField.value(&z) - self.level;
        let mut iterations = 0;
        while residual.abs() > tol {
            if iterations == RETRACT_MAX_ITER {
                return Err(Error::RetractionDiverged { iterations, residual: residual.to_f64_lossy() });
            }
            let (w, _) = spherical_gradient(&CartanField, &z);
            let w2 = linalg::dot(&w, &w);
            linalg::axpy(-residual / w2, &w, &mut z);
            z = linalg::normalized(&z);
            residual = CartanField.value(&z) - self.level;
            iterations += 1;
        }
        self.point_at(&z)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SurfacePoint<T> {
        let q = sampling::haar_so3(rng);
        let x = self.orbit_point(&q);
        self.point_at(&x).expect("orbit points of an interior level are regular")
    }

    fn quadrature(&self, _degree: usize) -> Result<Vec<(SurfacePoint<T>, T)>> {
        Err(Error::MethodMismatch { method: "quadrature".into(), surface: "cartan".into() })
    }

    fn level_field(&self) -> Box<dyn AmbientField<T> + '_> {
        Box::new(CartanField)
    }
}

/// One Haar-distributed point of `M_θ` drawn from stream 0 of `seed`.
pub fn cartan_sample<T: Real>(theta: T, seed: u64) -> Result<SurfacePoint<T>> {
    let level = CartanLevel::new(theta)?;
    Ok(level.sample(&mut sampling::chunk_rng(seed, 0)))
}
