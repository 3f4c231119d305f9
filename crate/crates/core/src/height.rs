//! Height functions `φ_a = <x, a>`, `ψ_a = <ν, a>` and their derivatives.
//!
//! With `a = a^T + φ_a x + ψ_a ν`:
//!
//! ```text
//! ∇φ_a = a^T              Hess φ_a = -φ_a Id + ψ_a A      Δφ_a = -nφ_a + nHψ_a
//! ∇ψ_a = -A a^T                                           Δψ_a = -n<∇H, a> + nHφ_a - Sψ_a
//! ```

use serde::Serialize;

use crate::catalog::Hypersurface;
use crate::error::{Error, Result};
use crate::geometry::{CurvatureSummary, SurfacePoint};
use crate::linalg::{self, Matrix};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeightData<T> {
    pub phi: T,
    pub psi: T,
    /// Tangential part of `a` in the point's frame.
    pub a_t: Vec<T>,
    /// Filled by [`analytic_derivatives`].
    pub derivatives: Option<HeightDerivatives<T>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeightDerivatives<T> {
    pub grad_phi: Vec<T>,
    pub hess_phi: Matrix<T>,
    pub lap_phi: T,
    pub grad_psi: Vec<T>,
    pub lap_psi: T,
    /// The `-n<∇H, a>` term of `Δψ_a`; always zero, only constant-H surfaces
    /// are accepted.
    pub mean_curvature_gradient_term: T,
}

impl<T: Real> HeightData<T> {
    /// `|a^T|² + φ² + ψ² - 1`
    pub fn decomposition_defect(&self) -> T {
        linalg::dot(&self.a_t, &self.a_t) + self.phi * self.phi + self.psi * self.psi - T::one()
    }
}

pub fn height_pair<T: Real>(a: &[T], p: &SurfacePoint<T>) -> HeightData<T> {
    HeightData { phi: linalg::dot(&p.x, a), psi: linalg::dot(&p.nu, a), a_t: p.to_frame(a), derivatives: None }
}

/// Values and analytic first/second derivatives of the height pair.
///
/// `constant_h` must be true: the `∇H` term of `Δψ_a` is not evaluated.
pub fn analytic_derivatives<T: Real>(
    a: &[T],
    p: &SurfacePoint<T>,
    curv: &CurvatureSummary<T>,
    constant_h: bool,
) -> Result<HeightData<T>> {
    if !constant_h {
        return Err(Error::NonConstantMeanCurvature);
    }
    let mut data = height_pair(a, p);
    let n = T::of(p.dim());
    let (phi, psi) = (data.phi, data.psi);
    let hess_phi = Matrix::identity(p.dim()).scale(-phi).add(&p.shape.scale(psi));
    let grad_psi = linalg::scaled(-T::one(), &p.shape.mul_vec(&data.a_t));
    data.derivatives = Some(HeightDerivatives {
        grad_phi: data.a_t.clone(),
        lap_phi: -n * phi + n * curv.h * psi,
        hess_phi,
        grad_psi,
        lap_psi: n * curv.h * phi - curv.s * psi,
        mean_curvature_gradient_term: T::zero(),
    });
    Ok(data)
}

/// Finite-difference Laplacian with its Richardson-extrapolated value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FdLaplacian<T> {
    /// Central-difference estimate at step `h`.
    pub raw: T,
    /// `(4 L(h) - L(2h)) / 3`.
    pub value: T,
    /// `|L(h) - L(2h)| / 3`, the truncation error estimate of `raw`.
    pub error_estimate: T,
}

pub const FD_STEP_MIN: f64 = 1e-4;
pub const FD_STEP_MAX: f64 = 1e-2;
pub const FD_STEP_DEFAULT: f64 = 1e-3;

/// `Σ_i (f(R_p(h e_i)) + f(R_p(-h e_i)) - 2 f(p)) / h²` over the frame, with
/// `R_p` the surface's metric-projection retraction.
pub fn fd_laplacian<T, S, F>(surface: &S, field: F, p: &SurfacePoint<T>, step: T) -> Result<FdLaplacian<T>>
where
    T: Real,
    S: Hypersurface<T> + ?Sized,
    F: Fn(&SurfacePoint<T>) -> T,
{
    Ok(fd_laplacians(surface, |q| vec![field(q)], p, step)?[0])
}

/// [`fd_laplacian`] for several fields sharing the same retracted points.
pub fn fd_laplacians<T, S, F>(surface: &S, fields: F, p: &SurfacePoint<T>, step: T) -> Result<Vec<FdLaplacian<T>>>
where
    T: Real,
    S: Hypersurface<T> + ?Sized,
    F: Fn(&SurfacePoint<T>) -> Vec<T>,
{
    let s = step.to_f64_lossy();
    if !(FD_STEP_MIN..=FD_STEP_MAX).contains(&s) {
        return Err(Error::StepOutOfRange(s));
    }
    let center = fields(p);
    let sum_at = |h: T| -> Result<Vec<T>> {
        let mut acc = vec![T::zero(); center.len()];
        for e in &p.frame {
            let plus = fields(&surface.retract(p, &linalg::scaled(h, e))?);
            let minus = fields(&surface.retract(p, &linalg::scaled(-h, e))?);
            for (i, a) in acc.iter_mut().enumerate() {
                *a = *a + (plus[i] + minus[i] - center[i] - center[i]);
            }
        }
        Ok(acc.into_iter().map(|a| a / (h * h)).collect())
    };
    let fine = sum_at(step)?;
    let coarse = sum_at(step + step)?;
    let three = T::lit(3.0);
    Ok(fine
        .iter()
        .zip(&coarse)
        .map(|(&f, &c)| FdLaplacian {
            raw: f,
            value: (T::lit(4.0) * f - c) / three,
            error_estimate: (f - c).abs() / three,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{CartanLevel, CliffordTorus, Equator};
    use crate::geometry::curvature_invariants;
    use crate::sampling::{chunk_rng, unit_vector};

    #[test]
    fn special_directions() {
        let t = CliffordTorus::<f64>::minimal(1, 4).unwrap();
        let p = t.sample(&mut chunk_rng(1, 0));
        let at_x = height_pair(&p.x, &p);
        assert!((at_x.phi - 1.0).abs() < 1e-15 && at_x.psi.abs() < 1e-15);
        assert!(linalg::norm(&at_x.a_t) < 1e-15);
        let at_nu = height_pair(&p.nu, &p);
        assert!(at_nu.phi.abs() < 1e-15 && (at_nu.psi - 1.0).abs() < 1e-15);
        let mut rng = chunk_rng(2, 0);
        for _ in 0..100 {
            let a: Vec<f64> = unit_vector(&mut rng, 6);
            assert!(height_pair(&a, &p).decomposition_defect().abs() < 1e-14);
        }
    }

    #[test]
    fn laplacians_on_catalog() {
        let mut rng = chunk_rng(3, 0);
        let a: Vec<f64> = unit_vector(&mut rng, 6);

        let eq = Equator::<f64>::new(4).unwrap();
        let p = eq.sample(&mut rng);
        let d = analytic_derivatives(&a, &p, &curvature_invariants(&p.shape).unwrap(), true).unwrap();
        let dv = d.derivatives.unwrap();
        assert!((dv.lap_phi + 4.0 * d.phi).abs() < 1e-15);
        assert_eq!(dv.lap_psi, 0.0);

        let t = CliffordTorus::<f64>::minimal(1, 4).unwrap();
        let p = t.sample(&mut rng);
        let d = analytic_derivatives(&a, &p, &curvature_invariants(&p.shape).unwrap(), true).unwrap();
        let dv = d.derivatives.as_ref().unwrap();
        assert!((dv.lap_phi + 4.0 * d.phi).abs() < 1e-13);
        assert!((dv.lap_psi + 4.0 * d.psi).abs() < 1e-13);
        assert!((dv.hess_phi.trace() - dv.lap_phi).abs() < 1e-12);

        let a5: Vec<f64> = unit_vector(&mut rng, 5);
        let c = CartanLevel::<f64>::minimal();
        let p = c.sample(&mut rng);
        let d = analytic_derivatives(&a5, &p, &curvature_invariants(&p.shape).unwrap(), true).unwrap();
        let dv = d.derivatives.unwrap();
        assert!((dv.lap_phi + 3.0 * d.phi).abs() < 1e-9);
        assert!((dv.lap_psi + 6.0 * d.psi).abs() < 1e-9);
    }

    #[test]
    fn refuses_non_constant_h() {
        let eq = Equator::<f64>::new(3).unwrap();
        let p = eq.sample(&mut chunk_rng(1, 1));
        let c = curvature_invariants(&p.shape).unwrap();
        assert_eq!(analytic_derivatives(&p.x.clone(), &p, &c, false), Err(Error::NonConstantMeanCurvature));
    }

    #[test]
    fn fd_step_range_enforced() {
        let eq = Equator::<f64>::new(3).unwrap();
        let p = eq.sample(&mut chunk_rng(1, 1));
        assert!(matches!(fd_laplacian(&eq, |q| q.x[1], &p, 1e-5), Err(Error::StepOutOfRange(_))));
        assert!(fd_laplacian(&eq, |q| q.x[1], &p, 1e-3).is_ok());
    }

    #[test]
    fn fd_matches_on_equator() {
        let eq = Equator::<f64>::new(4).unwrap();
        let mut rng = chunk_rng(4, 0);
        let p = eq.sample(&mut rng);
        let a: Vec<f64> = unit_vector(&mut rng, 6);
        let lap = fd_laplacian(&eq, |q| linalg::dot(&q.x, &a), &p, 1e-3).unwrap();
        let want = -4.0 * linalg::dot(&p.x, &a);
        assert!((lap.value - want).abs() < 1e-6, "{} vs {want}", lap.value);
        assert!((lap.raw - want).abs() < 1e-5);
    }

    #[test]
    fn fd_matches_on_cartan_and_torus() {
        let mut rng = chunk_rng(5, 0);
        let c = CartanLevel::<f64>::minimal();
        let p = c.sample(&mut rng);
        let a: Vec<f64> = unit_vector(&mut rng, 5);
        let lap = fd_laplacian(&c, |q| linalg::dot(&q.x, &a), &p, 1e-3).unwrap();
        let want = -3.0 * linalg::dot(&p.x, &a);
        assert!((lap.value - want).abs() < 1e-4 * want.abs().max(1e-2));

        let t = CliffordTorus::<f64>::minimal(1, 4).unwrap();
        let p = t.sample(&mut rng);
        let a: Vec<f64> = unit_vector(&mut rng, 6);
        let lap = fd_laplacian(&t, |q| linalg::dot(&q.nu, &a), &p, 1e-3).unwrap();
        let want = -4.0 * linalg::dot(&p.nu, &a);
        assert!((lap.value - want).abs() < 1e-4 * want.abs().max(1e-2));
    }
}
