//! Pointwise extrinsic geometry of a hypersurface `M^n` in `S^{n+1} ⊂ R^{n+2}`.
//!
//! Conventions: the shape operator is `A(X) = -∇̃_X ν` (Levi-Civita connection
//! of the sphere), `H = Tr A / n`, `S = |A|²`, `f3 = Tr A³`, and the
//! normalized scalar curvature satisfies `ρ - 1 = (n²H² - S) / (n(n-1))`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::Real;

/// A point of `R^{n+2}`. Points of the sphere have unit length.
pub type AmbientVector<T> = Vec<T>;

/// Position, unit normal, orthonormal tangent frame and shape operator at a
/// point of a hypersurface.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurfacePoint<T> {
    pub x: AmbientVector<T>,
    pub nu: AmbientVector<T>,
    /// Orthonormal basis of `T_x M`, each vector in ambient coordinates.
    pub frame: Vec<AmbientVector<T>>,
    /// Matrix of `A` in `frame`.
    pub shape: Matrix<T>,
}

impl<T: Real> SurfacePoint<T> {
    /// Assembles a point, checking unit lengths, orthogonality and symmetry.
    pub fn new(
        x: AmbientVector<T>,
        nu: AmbientVector<T>,
        frame: Vec<AmbientVector<T>>,
        shape: Matrix<T>,
    ) -> Result<Self> {
        let ambient = x.len();
        if nu.len() != ambient {
            return Err(Error::DimensionMismatch { expected: ambient, got: nu.len() });
        }
        if frame.len() + 2 != ambient || shape.dim() != frame.len() {
            return Err(Error::DimensionMismatch { expected: ambient - 2, got: frame.len() });
        }
        let p = Self { x, nu, frame, shape };
        let defect = p.frame_defect();
        if defect > T::structural_tol() {
            return Err(Error::InvalidFrame { defect: defect.to_f64_lossy() });
        }
        let asym = p.shape.asymmetry();
        if asym > T::structural_tol() {
            return Err(Error::NonSymmetricShape { asymmetry: asym.to_f64_lossy() });
        }
        Ok(p)
    }

    /// Intrinsic dimension `n`.
    pub fn dim(&self) -> usize {
        self.frame.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.x.len()
    }

    /// Largest violation of `|x| = |ν| = 1`, `<x,ν> = 0` and frame orthonormality
    /// (frame also orthogonal to `x` and `ν`).
    pub fn frame_defect(&self) -> T {
        let mut worst = (linalg::norm(&self.x) - T::one())
            .abs()
            .max((linalg::norm(&self.nu) - T::one()).abs())
            .max(linalg::dot(&self.x, &self.nu).abs());
        for (i, e) in self.frame.iter().enumerate() {
            worst = worst.max(linalg::dot(e, &self.x).abs()).max(linalg::dot(e, &self.nu).abs());
            for (j, f) in self.frame.iter().enumerate().skip(i) {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((linalg::dot(e, f) - target).abs());
            }
        }
        worst
    }

    /// Same point with the opposite orientation: `ν → -ν`, `A → -A`.
    pub fn flipped(&self) -> Self {
        Self {
            x: self.x.clone(),
            nu: linalg::scaled(-T::one(), &self.nu),
            frame: self.frame.clone(),
            shape: self.shape.scale(-T::one()),
        }
    }

    /// Frame coordinates of an ambient vector.
    pub fn to_frame(&self, v: &[T]) -> Vec<T> {
        self.frame.iter().map(|e| linalg::dot(e, v)).collect()
    }

    /// Ambient vector from frame coordinates.
    pub fn from_frame(&self, coords: &[T]) -> AmbientVector<T> {
        let mut out = vec![T::zero(); self.ambient_dim()];
        for (c, e) in coords.iter().zip(&self.frame) {
            linalg::axpy(*c, e, &mut out);
        }
        out
    }

    pub fn curvature(&self) -> Result<CurvatureSummary<T>> {
        curvature_invariants(&self.shape)
    }
}

/// Scalar curvature invariants of a shape operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvatureSummary<T> {
    /// Mean curvature `Tr A / n`.
    pub h: T,
    /// `|A|²`
    pub s: T,
    /// `Tr A³`
    pub f3: T,
    /// Normalized scalar curvature.
    pub rho: T,
    /// Scalar curvature `n(n-1)ρ`.
    pub r: T,
}

/// Orthonormal basis of the orthogonal complement of `span{x, ν}`.
///
/// Gram–Schmidt over the standard basis; candidates whose residual after
/// projection is below `1e-6` are skipped.
pub fn tangent_frame<T: Real>(x: &[T], nu: &[T]) -> Result<Vec<AmbientVector<T>>> {
    let dim = x.len();
    if nu.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: nu.len() });
    }
    if dim < 4 {
        return Err(Error::DimensionTooSmall(dim.saturating_sub(2)));
    }
    let defect =
        (linalg::norm(x) - T::one()).abs().max((linalg::norm(nu) - T::one()).abs()).max(linalg::dot(x, nu).abs());
    if defect > T::structural_tol() {
        return Err(Error::InvalidFrame { defect: defect.to_f64_lossy() });
    }

    let skip = T::lit(1e-6);
    let mut basis: Vec<AmbientVector<T>> = Vec::with_capacity(dim - 2);
    for i in 0..dim {
        if basis.len() == dim - 2 {
            break;
        }
        let mut v = linalg::basis_vector(dim, i);
        // two passes of modified Gram-Schmidt keep the result orthogonal to
        // working precision even when the candidate is nearly dependent
        for _ in 0..2 {
            for q in [x, nu].into_iter().chain(basis.iter().map(Vec::as_slice)) {
                let c = linalg::dot(q, &v);
                linalg::axpy(-c, q, &mut v);
            }
        }
        let r = linalg::norm(&v);
        if r < skip {
            continue;
        }
        basis.push(linalg::scaled(T::one() / r, &v));
    }
    debug_assert_eq!(basis.len(), dim - 2);
    Ok(basis)
}

pub fn curvature_invariants<T: Real>(shape: &Matrix<T>) -> Result<CurvatureSummary<T>> {
    let n = shape.dim();
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let asym = shape.asymmetry();
    if asym > T::structural_tol() {
        return Err(Error::NonSymmetricShape { asymmetry: asym.to_f64_lossy() });
    }
    let nt = T::of(n);
    let h = shape.trace() / nt;
    let s = shape.frobenius_sq();
    let f3 = shape.mul(shape).frobenius_dot(&shape.transpose());
    let rho = T::one() + (nt * nt * h * h - s) / (nt * (nt - T::one()));
    Ok(CurvatureSummary { h, s, f3, rho, r: nt * (nt - T::one()) * rho })
}

/// `Ric(v, v)` from the Gauss equation, `Ric = (n-1) Id + nH A - A²`,
/// with `v` in frame coordinates.
pub fn ricci_quadratic_form<T: Real>(shape: &Matrix<T>, v: &[T], h: T) -> T {
    let n = T::of(shape.dim());
    let av = shape.mul_vec(v);
    (n - T::one()) * linalg::dot(v, v) + n * h * linalg::dot(&av, v) - linalg::dot(&av, &av)
}

/// Traceless Ricci form `Ric(v,v) - (R/n)|v|²`, the integrand of the IE condition.
pub fn ricci_defect<T: Real>(shape: &Matrix<T>, v: &[T], curv: &CurvatureSummary<T>) -> T {
    let n = T::of(shape.dim());
    ricci_quadratic_form(shape, v, curv.h) - curv.r / n * linalg::dot(v, v)
}

/// A smooth function on `R^{n+2}` with exact first and second derivatives.
pub trait AmbientField<T: Real>: Sync {
    fn ambient_dim(&self) -> usize;
    fn value(&self, x: &[T]) -> T;
    fn gradient(&self, x: &[T]) -> Vec<T>;
    fn hessian(&self, x: &[T]) -> Matrix<T>;
}

/// Norm of the sphere-tangential gradient below which a point counts as focal.
pub const FOCAL_THRESHOLD: f64 = 1e-8;

/// Sphere-tangential gradient `∇F - <∇F, x> x` and the radial derivative `<∇F, x>`.
pub fn spherical_gradient<T: Real, F: AmbientField<T> + ?Sized>(field: &F, x: &[T]) -> (Vec<T>, T) {
    let grad = field.gradient(x);
    let radial = linalg::dot(&grad, x);
    let mut w = grad;
    linalg::axpy(-radial, x, &mut w);
    (w, radial)
}

/// Geometry of the level set `{F = F(x)} ∩ S^{n+1}` through `x`.
///
/// `ν` is the unit sphere-tangential gradient `w/|w|`. With `Hess^S F(X,Y) =
/// D²F(X,Y) - <∇F,x><X,Y>` on sphere-tangent vectors, the shape operator is
/// `A = -Hess^S F / |w|` restricted to the level set.
pub fn shape_from_level_set<T: Real, F: AmbientField<T> + ?Sized>(field: &F, x: &[T]) -> Result<SurfacePoint<T>> {
    if x.len() != field.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: field.ambient_dim(), got: x.len() });
    }
    let (w, radial) = spherical_gradient(field, x);
    let wn = linalg::norm(&w);
    if wn < T::lit(FOCAL_THRESHOLD) {
        return Err(Error::FocalPoint { norm: wn.to_f64_lossy() });
    }
    let nu = linalg::scaled(T::one() / wn, &w);
    let frame = tangent_frame(x, &nu)?;
    let hess = field.hessian(x);
    let hframe: Vec<Vec<T>> = frame.iter().map(|e| hess.mul_vec(e)).collect();
    let n = frame.len();
    let shape = Matrix::from_fn(n, |i, j| {
        let d2 = linalg::dot(&frame[i], &hframe[j]);
        let sph = if i == j { d2 - radial } else { d2 };
        -sph / wn
    })
    .symmetrized();
    SurfacePoint::new(x.to_vec(), nu, frame, shape)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gram_defect(frame: &[Vec<f64>]) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in frame.iter().enumerate() {
            for (j, b) in frame.iter().enumerate() {
                let t = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((linalg::dot(a, b) - t).abs());
            }
        }
        worst
    }

    #[test]
    fn frame_of_coordinate_point() {
        let x = linalg::basis_vector::<f64>(5, 0);
        let nu = linalg::basis_vector::<f64>(5, 1);
        let frame = tangent_frame(&x, &nu).unwrap();
        assert_eq!(frame.len(), 3);
        for (k, e) in frame.iter().enumerate() {
            assert_eq!(e, &linalg::basis_vector::<f64>(5, k + 2));
        }
    }

    #[test]
    fn frame_of_torus_point() {
        let (r1, r2) = (0.5_f64, 0.75_f64.sqrt());
        let x = vec![r1, 0.0, r2, 0.0, 0.0];
        let nu = vec![r2, 0.0, -r1, 0.0, 0.0];
        let frame = tangent_frame(&x, &nu).unwrap();
        assert!(gram_defect(&frame) < 1e-12);
        for e in &frame {
            assert!(linalg::dot(e, &x).abs() < 1e-12);
            assert!(linalg::dot(e, &nu).abs() < 1e-12);
        }
    }

    #[test]
    fn frame_rejects_bad_input() {
        let x = vec![1.0, 0.0, 0.0, 0.0];
        let nu = vec![0.6, 0.8, 0.0, 0.0];
        assert!(matches!(tangent_frame(&x, &nu), Err(Error::InvalidFrame { .. })));
        let short = vec![0.0, 1.0, 0.0];
        assert!(matches!(tangent_frame(&x, &short), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn equator_invariants() {
        let c = curvature_invariants(&Matrix::<f64>::zeros(4)).unwrap();
        assert_eq!((c.h, c.s, c.f3, c.rho, c.r), (0.0, 0.0, 0.0, 1.0, 12.0));
    }

    #[test]
    fn minimal_torus_invariants() {
        let k1 = 3f64.sqrt();
        let k2 = -1.0 / 3f64.sqrt();
        let c = curvature_invariants(&Matrix::from_diagonal(&[k1, k2, k2, k2])).unwrap();
        assert!(c.h.abs() < 1e-15);
        assert!((c.s - 4.0).abs() < 1e-14);
        assert!((c.f3 - 8.0 / 3f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn cartan_invariants() {
        let r3 = 3f64.sqrt();
        let c = curvature_invariants(&Matrix::from_diagonal(&[r3, 0.0, -r3])).unwrap();
        assert!((c.s - 6.0).abs() < 1e-14);
        assert!(c.f3.abs() < 1e-14);
        assert!((c.rho - 1.0 + 1.0).abs() < 1e-14); // ρ - 1 = -6/6
    }

    #[test]
    fn invariants_reject_n1_and_asymmetric() {
        assert!(matches!(curvature_invariants(&Matrix::<f64>::zeros(1)), Err(Error::DimensionTooSmall(1))));
        let mut m = Matrix::<f64>::zeros(2);
        m[(0, 1)] = 1.0;
        assert!(matches!(curvature_invariants(&m), Err(Error::NonSymmetricShape { .. })));
    }

    #[test]
    fn ricci_on_round_and_einstein_pieces() {
        // equator: Ric = n - 1
        let zero = Matrix::<f64>::zeros(4);
        let v = [0.0, 0.6, 0.0, 0.8];
        assert!((ricci_quadratic_form(&zero, &v, 0.0) - 3.0).abs() < 1e-15);

        // S²(√½) × S²(√½): principal curvatures ±1, Ric = 2, R/n = 2
        let a = Matrix::<f64>::from_diagonal(&[1.0, 1.0, -1.0, -1.0]);
        let curv = curvature_invariants(&a).unwrap();
        for v in [[1.0, 0.0, 0.0, 0.0], [0.5, 0.5, 0.5, 0.5], [0.0, 0.0, 0.6, 0.8]] {
            assert!((ricci_quadratic_form(&a, &v, curv.h) - 2.0).abs() < 1e-14);
            assert!(ricci_defect(&a, &v, &curv).abs() < 1e-14);
        }

        // minimal S¹ × S³ along the S¹ direction: 3 + 0 - 3
        let r3 = 3f64.sqrt();
        let a = Matrix::from_diagonal(&[r3, -1.0 / r3, -1.0 / r3, -1.0 / r3]);
        assert!(ricci_quadratic_form(&a, &[1.0, 0.0, 0.0, 0.0], 0.0).abs() < 1e-14);
    }

    struct Linear(Vec<f64>);

    impl AmbientField<f64> for Linear {
        fn ambient_dim(&self) -> usize {
            self.0.len()
        }
        fn value(&self, x: &[f64]) -> f64 {
            linalg::dot(&self.0, x)
        }
        fn gradient(&self, _x: &[f64]) -> Vec<f64> {
            self.0.clone()
        }
        fn hessian(&self, _x: &[f64]) -> Matrix<f64> {
            Matrix::zeros(self.0.len())
        }
    }

    #[test]
    fn linear_level_set_is_totally_geodesic() {
        let f = Linear(linalg::basis_vector(5, 0));
        let x = linalg::normalized(&[0.0, 1.0, -2.0, 0.5, 3.0]);
        let p = shape_from_level_set(&f, &x).unwrap();
        assert!(p.shape.frobenius_sq() < 1e-24);
        assert!((p.nu[0] - 1.0).abs() < 1e-15);
        assert!(p.frame_defect() < 1e-14);
    }

    #[test]
    fn focal_point_is_rejected() {
        let f = Linear(linalg::basis_vector(5, 0));
        let x = linalg::basis_vector(5, 0);
        assert!(matches!(shape_from_level_set(&f, &x), Err(Error::FocalPoint { .. })));
    }

    #[test]
    fn flipping_negates_normal_and_shape() {
        let f = Linear(vec![0.3, 0.0, 0.0, 0.4, 0.0]);
        let x = linalg::normalized(&[0.0, 1.0, 1.0, 0.0, 1.0]);
        let p = shape_from_level_set(&f, &x).unwrap();
        let q = p.flipped();
        assert_eq!(q.nu, linalg::scaled(-1.0, &p.nu));
        assert_eq!(q.flipped(), p);
    }
}
