use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{AmbientField, SurfacePoint};
use crate::linalg::{self, Matrix};
use crate::quadrature::{unit_sphere_volume, SphereRule};
use crate::sampling;
use crate::scalar::Real;

use super::{complement_basis, Hypersurface};

/// Totally geodesic `{x_1 = 0} ∩ S^{n+1}` with normal `e_1`.
#[derive(Clone, Debug)]
pub struct Equator<T> {
    n: usize,
    _scalar: std::marker::PhantomData<T>,
}

impl<T: Real> Equator<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        Ok(Self { n, _scalar: Default::default() })
    }

    fn point_from_sphere(&self, y: &[T]) -> SurfacePoint<T> {
        let mut x = Vec::with_capacity(self.n + 2);
        x.push(T::zero());
        x.extend_from_slice(y);
        let nu = linalg::basis_vector(self.n + 2, 0);
        let frame = complement_basis(y)
            .into_iter()
            .map(|e| {
                let mut v = Vec::with_capacity(self.n + 2);
                v.push(T::zero());
                v.extend(e);
                v
            })
            .collect();
        SurfacePoint { x, nu, frame, shape: Matrix::zeros(self.n) }
    }
}

/// `F(x) = x_1`
struct Height(usize);

impl<T: Real> AmbientField<T> for Height {
    fn ambient_dim(&self) -> usize {
        self.0
    }
    fn value(&self, x: &[T]) -> T {
        x[0]
    }
    fn gradient(&self, _x: &[T]) -> Vec<T> {
        linalg::basis_vector(self.0, 0)
    }
    fn hessian(&self, _x: &[T]) -> Matrix<T> {
        Matrix::zeros(self.0)
    }
}

impl<T: Real> Hypersurface<T> for Equator<T> {
    fn dim(&self) -> usize {
        self.n
    }

    fn volume(&self) -> T {
        T::lit(unit_sphere_volume(self.n))
    }

    fn point_at(&self, x: &[T]) -> Result<SurfacePoint<T>> {
        if x.len() != self.n + 2 {
            return Err(Error::DimensionMismatch { expected: self.n + 2, got: x.len() });
        }
        Ok(self.point_from_sphere(&linalg::normalized(&x[1..])))
    }

    fn retract(&self, p: &SurfacePoint<T>, v: &[T]) -> Result<SurfacePoint<T>> {
        let y: Vec<T> = p.x.iter().zip(v).skip(1).map(|(&a, &b)| a + b).collect();
        Ok(self.point_from_sphere(&linalg::normalized(&y)))
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SurfacePoint<T> {
        self.point_from_sphere(&sampling::unit_vector(rng, self.n + 1))
    }

    fn quadrature(&self, degree: usize) -> Result<Vec<(SurfacePoint<T>, T)>> {
        let rule = SphereRule::<T>::new(self.n, degree)?;
        Ok(rule.points.iter().zip(rule.weights).map(|(y, w)| (self.point_from_sphere(y), w)).collect())
    }

    fn level_field(&self) -> Box<dyn AmbientField<T> + '_> {
        Box::new(Height(self.n + 2))
    }
}
