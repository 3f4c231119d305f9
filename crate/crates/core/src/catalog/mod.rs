//! Concrete hypersurfaces of `S^{n+1}`: sampling, quadrature, retraction and
//! closed-form curvature.

mod cartan;
mod equator;
mod profile;
mod spec;
mod torus;

pub use cartan::{
    cartan_munzner_eval, cartan_sample, to_coords, to_matrix, CartanField, CartanLevel, CARTAN_MINIMAL_THETA,
};
pub use equator::Equator;
pub use profile::{profile_lambdas, IsoparametricProfile};
pub use spec::{HypersurfaceSpec, TorusRadius, SUPPORTED_G};
pub use torus::{torus_point, CliffordTorus, TorusField};

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{AmbientField, AmbientVector, SurfacePoint};
use crate::linalg;
use crate::scalar::Real;

/// A closed hypersurface with an explicit immersion.
pub trait Hypersurface<T: Real>: Sync {
    /// Intrinsic dimension `n`.
    fn dim(&self) -> usize;

    fn ambient_dim(&self) -> usize {
        self.dim() + 2
    }

    fn volume(&self) -> T;

    /// Completes the geometry at a point `x` lying on the surface.
    fn point_at(&self, x: &[T]) -> Result<SurfacePoint<T>>;

    /// Metric projection of `p.x + v` back onto the surface (`v` ambient,
    /// tangent at `p`).
    fn retract(&self, p: &SurfacePoint<T>, v: &[T]) -> Result<SurfacePoint<T>>;

    /// Point distributed by the normalized Riemannian measure.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SurfacePoint<T>
    where
        Self: Sized;

    /// Tensor quadrature nodes with weights summing to the volume.
    fn quadrature(&self, degree: usize) -> Result<Vec<(SurfacePoint<T>, T)>>;

    /// Ambient function whose level set through every point is this surface,
    /// with `ν` along its sphere-tangential gradient.
    fn level_field(&self) -> Box<dyn AmbientField<T> + '_>;

    /// Every catalog surface has constant mean curvature; the flag guards the
    /// constant-H Laplacian formulas.
    fn constant_mean_curvature(&self) -> bool {
        true
    }
}

/// Any catalog surface with an immersion.
#[derive(Clone, Debug)]
pub enum Surface<T> {
    Equator(Equator<T>),
    Torus(CliffordTorus<T>),
    Cartan(CartanLevel<T>),
}

impl<T: Real> Surface<T> {
    pub fn from_spec(spec: &HypersurfaceSpec) -> Result<Self> {
        spec.validate()?;
        match *spec {
            HypersurfaceSpec::Equator { n } => Ok(Self::Equator(Equator::new(n)?)),
            HypersurfaceSpec::CliffordTorus { k, n, .. } => {
                let r1 = spec.torus_r1().expect("torus radius");
                Ok(Self::Torus(CliffordTorus::new(k, n, T::lit(r1))?))
            }
            HypersurfaceSpec::CartanCubic => Ok(Self::Cartan(CartanLevel::minimal())),
            HypersurfaceSpec::IsoparametricProfile { .. } => {
                Err(Error::InvalidSurface(format!("{spec} is an analytic profile without an immersion")))
            }
        }
    }

    pub fn supports_quadrature(&self) -> bool {
        !matches!(self, Self::Cartan(_))
    }

    /// Nodes in the tensor rule of `degree` nodes per angle, if there is one.
    pub fn quadrature_nodes(&self, degree: usize) -> Option<usize> {
        let sphere = |m: usize| if m == 0 { 2 } else { degree.saturating_pow(m as u32) };
        match self {
            Self::Equator(e) => Some(sphere(e.dim())),
            Self::Torus(t) => Some(sphere(t.k).saturating_mul(sphere(t.n - t.k))),
            Self::Cartan(_) => None,
        }
    }

    pub fn is_totally_geodesic(&self) -> bool {
        matches!(self, Self::Equator(_))
    }

    /// Mean curvature, constant on every catalog surface.
    pub fn mean_curvature(&self) -> T {
        match self {
            Self::Equator(_) => T::zero(),
            Self::Torus(t) => t.mean_curvature(),
            Self::Cartan(c) => c.mean_curvature(),
        }
    }

    pub fn is_minimal(&self) -> bool {
        self.mean_curvature().abs() < T::lit(1e-12).max(T::epsilon() * T::lit(100.0))
    }

    /// `S = |A|²`, constant on every catalog surface.
    pub fn squared_norm(&self) -> T {
        match self {
            Self::Equator(_) => T::zero(),
            Self::Torus(t) => t.squared_norm(),
            Self::Cartan(c) => c.squared_norm(),
        }
    }

    /// Minimal with constant scalar curvature.
    pub fn is_minimal_csc(&self) -> bool {
        self.is_minimal()
    }

    /// Whether this is `S^1(sqrt(1/n)) × S^{n-1}(sqrt((n-1)/n))` (either factor order).
    pub fn is_minimal_s1_torus(&self) -> bool {
        match self {
            Self::Torus(t) => (t.k == 1 || t.k + 1 == t.n) && self.is_minimal(),
            _ => false,
        }
    }
}

macro_rules! dispatch {
    ($self:ident, $s:ident => $e:expr) => {
        match $self {
            Surface::Equator($s) => $e,
            Surface::Torus($s) => $e,
            Surface::Cartan($s) => $e,
        }
    };
}

impl<T: Real> Hypersurface<T> for Surface<T> {
    fn dim(&self) -> usize {
        dispatch!(self, s => s.dim())
    }
    fn volume(&self) -> T {
        dispatch!(self, s => s.volume())
    }
    fn point_at(&self, x: &[T]) -> Result<SurfacePoint<T>> {
        dispatch!(self, s => s.point_at(x))
    }
    fn retract(&self, p: &SurfacePoint<T>, v: &[T]) -> Result<SurfacePoint<T>> {
        dispatch!(self, s => s.retract(p, v))
    }
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SurfacePoint<T> {
        dispatch!(self, s => s.sample(rng))
    }
    fn quadrature(&self, degree: usize) -> Result<Vec<(SurfacePoint<T>, T)>> {
        dispatch!(self, s => s.quadrature(degree))
    }
    fn level_field(&self) -> Box<dyn AmbientField<T> + '_> {
        dispatch!(self, s => s.level_field())
    }
}

/// The same surface with the opposite unit normal.
#[derive(Clone, Debug)]
pub struct Flipped<S>(pub S);

struct Negated<'a, T>(Box<dyn AmbientField<T> + 'a>);

impl<T: Real> AmbientField<T> for Negated<'_, T> {
    fn ambient_dim(&self) -> usize {
        self.0.ambient_dim()
    }
    fn value(&self, x: &[T]) -> T {
        -self.0.value(x)
    }
    fn gradient(&self, x: &[T]) -> Vec<T> {
        linalg::scaled(-T::one(), &self.0.gradient(x))
    }
    fn hessian(&self, x: &[T]) -> linalg::Matrix<T> {
        self.0.hessian(x).scale(-T::one())
    }
}

impl<T: Real, S: Hypersurface<T>> Hypersurface<T> for Flipped<S> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn volume(&self) -> T {
        self.0.volume()
    }
    fn point_at(&self, x: &[T]) -> Result<SurfacePoint<T>> {
        self.0.point_at(x).map(|p| p.flipped())
    }
    fn retract(&self, p: &SurfacePoint<T>, v: &[T]) -> Result<SurfacePoint<T>> {
        self.0.retract(&p.flipped(), v).map(|q| q.flipped())
    }
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SurfacePoint<T> {
        self.0.sample(rng).flipped()
    }
    fn quadrature(&self, degree: usize) -> Result<Vec<(SurfacePoint<T>, T)>> {
        Ok(self.0.quadrature(degree)?.into_iter().map(|(p, w)| (p.flipped(), w)).collect())
    }
    fn level_field(&self) -> Box<dyn AmbientField<T> + '_> {
        Box::new(Negated(self.0.level_field()))
    }
    fn constant_mean_curvature(&self) -> bool {
        self.0.constant_mean_curvature()
    }
}

/// `cos(δ) x + sin(δ) ν`: moves a point a spherical distance `δ` along its
/// normal geodesic, onto the parallel hypersurface.
pub fn parallel_translate<T: Real>(p: &SurfacePoint<T>, delta: T) -> AmbientVector<T> {
    linalg::combine(delta.cos(), &p.x, delta.sin(), &p.nu)
}

/// Orthonormal basis of the orthogonal complement of a unit vector `u`.
pub(crate) fn complement_basis<T: Real>(u: &[T]) -> Vec<Vec<T>> {
    let dim = u.len();
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(dim.saturating_sub(1));
    for i in 0..dim {
        if basis.len() + 1 == dim {
            break;
        }
        let mut v = linalg::basis_vector(dim, i);
        for _ in 0..2 {
            for q in std::iter::once(u).chain(basis.iter().map(Vec::as_slice)) {
                let c = linalg::dot(q, &v);
                linalg::axpy(-c, q, &mut v);
            }
        }
        let r = linalg::norm(&v);
        if r < T::lit(1e-6) {
            continue;
        }
        basis.push(linalg::scaled(T::one() / r, &v));
    }
    basis
}
