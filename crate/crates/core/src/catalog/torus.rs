use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{AmbientField, SurfacePoint};
use crate::linalg::{self, Matrix};
use crate::quadrature::{unit_sphere_volume, SphereRule};
use crate::sampling;
use crate::scalar::Real;

use super::{complement_basis, Hypersurface};

/// `S^k(r1) × S^{n-k}(r2) ⊂ S^{n+1}`, `r1² + r2² = 1`.
///
/// Points are `x = (r1 u, r2 v)` with `u ∈ S^k ⊂ R^{k+1}`, `v ∈ S^{n-k}`. The
/// normal `ν = (-r2 u, r1 v)` makes the principal curvature of the `S^k`
/// factor positive: `κ1 = r2/r1` (multiplicity `k`), `κ2 = -r1/r2`.
#[derive(Clone, Debug)]
pub struct CliffordTorus<T> {
    pub k: usize,
    pub n: usize,
    pub r1: T,
    pub r2: T,
}

impl<T: Real> CliffordTorus<T> {
    pub fn new(k: usize, n: usize, r1: T) -> Result<Self> {
        if n < 2 || k < 1 || k >= n {
            return Err(Error::InvalidSurface(format!("clifford torus k={k}, n={n}")));
        }
        if !(r1 > T::zero() && r1 < T::one()) {
            return Err(Error::InvalidSurface(format!("torus radius {r1} not in (0, 1)")));
        }
        Ok(Self { k, n, r1, r2: (T::one() - r1 * r1).sqrt() })
    }

    /// `S^k(sqrt(k/n)) × S^{n-k}(sqrt((n-k)/n))`
    pub fn minimal(k: usize, n: usize) -> Result<Self> {
        Self::new(k, n, (T::of(k) / T::of(n)).sqrt())
    }

    pub fn kappa1(&self) -> T {
        self.r2 / self.r1
    }

    pub fn kappa2(&self) -> T {
        -self.r1 / self.r2
    }

    pub fn mean_curvature(&self) -> T {
        (T::of(self.k) * self.kappa1() + T::of(self.n - self.k) * self.kappa2()) / T::of(self.n)
    }

    pub fn squared_norm(&self) -> T {
        let (a, b) = (self.kappa1(), self.kappa2());
        T::of(self.k) * a * a + T::of(self.n - self.k) * b * b
    }

    fn split<'a>(&self, x: &'a [T]) -> (&'a [T], &'a [T]) {
        x.split_at(self.k + 1)
    }

    fn assemble(&self, u: &[T], v: &[T]) -> SurfacePoint<T> {
        let dim = self.n + 2;
        let mut x = Vec::with_capacity(dim);
        x.extend(u.iter().map(|&a| self.r1 * a));
        x.extend(v.iter().map(|&b| self.r2 * b));
        let mut nu = Vec::with_capacity(dim);
        nu.extend(u.iter().map(|&a| -self.r2 * a));
        nu.extend(v.iter().map(|&b| self.r1 * b));

        let mut frame = Vec::with_capacity(self.n);
        for e in complement_basis(u) {
            let mut w = e;
            w.resize(dim, T::zero());
            frame.push(w);
        }
        for e in complement_basis(v) {
            let mut w = vec![T::zero(); self.k + 1];
            w.extend(e);
            frame.push(w);
        }
        let mut diag = vec![self.kappa1(); self.k];
        diag.extend(std::iter::repeat_n(self.kappa2(), self.n - self.k));
        SurfacePoint { x, nu, frame, shape: Matrix::from_diagonal(&diag) }
    }
}

/// Closed-form torus point from unit vectors on the two factors.
pub fn torus_point<T: Real>(torus: &CliffordTorus<T>, u: &[T], v: &[T]) -> Result<SurfacePoint<T>> {
    if u.len() != torus.k + 1 || v.len() != torus.n - torus.k + 1 {
        return Err(Error::DimensionMismatch { expected: torus.n + 2, got: u.len() + v.len() });
    }
    let defect = (linalg::norm(u) - T::one()).abs().max((linalg::norm(v) - T::one()).abs());
    if defect > T::structural_tol() {
        return Err(Error::InvalidFrame { defect: defect.to_f64_lossy() });
    }
    Ok(torus.assemble(u, v))
}

/// `F(x) = |x_2|² - r2²` where `x_2` is the second block; its
/// sphere-tangential gradient points along the torus normal.
pub struct TorusField {
    split: usize,
    dim: usize,
}

impl<T: Real> AmbientField<T> for TorusField {
    fn ambient_dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[T]) -> T {
        x[self.split..].iter().map(|&v| v * v).sum()
    }
    fn gradient(&self, x: &[T]) -> Vec<T> {
        x.iter().enumerate().map(|(i, &v)| if i < self.split { T::zero() } else { T::lit(2.0) * v }).collect()
    }
    fn hessian(&self, _x: &[T]) -> Matrix<T> {
        Matrix::from_fn(self.dim, |i, j| if i == j && i >= self.split { T::lit(2.0) } else { T::zero() })
    }
}

impl<T: Real> Hypersurface<T> for CliffordTorus<T> {
    fn dim(&self) -> usize {
        self.n
    }

    fn volume(&self) -> T {
        let (k, m) = (self.k, self.n - self.k);
        self.r1.powi(k as i32) * self.r2.powi(m as i32) * T::lit(unit_sphere_volume(k) * unit_sphere_volume(m))
    }

    fn point_at(&self, x: &[T]) -> Result<SurfacePoint<T>> {
        if x.len() != self.n + 2 {
            return Err(Error::DimensionMismatch { expected: self.n + 2, got: x.len() });
        }
        let (a, b) = self.split(x);
        Ok(self.assemble(&linalg::normalized(a), &linalg::normalized(b)))
    }

    fn retract(&self, p: &SurfacePoint<T>, v: &[T]) -> Result<SurfacePoint<T>> {
        let y: Vec<T> = p.x.iter().zip(v).map(|(&a, &b)| a + b).collect();
        let (a, b) = self.split(&y);
        Ok(self.assemble(&linalg::normalized(a), &linalg::normalized(b)))
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SurfacePoint<T> {
        let u: Vec<T> = sampling::unit_vector(rng, self.k + 1);
        let v: Vec<T> = sampling::unit_vector(rng, self.n - self.k + 1);
        self.assemble(&u, &v)
    }

    fn quadrature(&self, degree: usize) -> Result<Vec<(SurfacePoint<T>, T)>> {
        let first = SphereRule::<T>::new(self.k, degree)?;
        let second = SphereRule::<T>::new(self.n - self.k, degree)?;
        let scale = self.r1.powi(self.k as i32) * self.r2.powi((self.n - self.k) as i32);
        let mut nodes = Vec::with_capacity(first.len() * second.len());
        for (u, wu) in first.points.iter().zip(&first.weights) {
            for (v, wv) in second.points.iter().zip(&second.weights) {
                nodes.push((self.assemble(u, v), scale * *wu * *wv));
            }
        }
        Ok(nodes)
    }

    fn level_field(&self) -> Box<dyn AmbientField<T> + '_> {
        Box::new(TorusField { split: self.k + 1, dim: self.n + 2 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{curvature_invariants, shape_from_level_set};
    use crate::sampling::chunk_rng;

    #[test]
    fn minimal_s1_s3_spectrum() {
        let t = CliffordTorus::<f64>::minimal(1, 4).unwrap();
        let p = t.sample(&mut chunk_rng(3, 0));
        let ev = p.shape.symmetric_eigenvalues();
        let r3 = 3f64.sqrt();
        let want = [-1.0 / r3, -1.0 / r3, -1.0 / r3, r3];
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
        let c = curvature_invariants(&p.shape).unwrap();
        assert!(c.h.abs() < 1e-15 && (c.s - 4.0).abs() < 1e-14);
        assert!(p.frame_defect() < 1e-14);
    }

    #[test]
    fn einstein_torus_spectrum() {
        let t = CliffordTorus::<f64>::new(2, 4, 0.5f64.sqrt()).unwrap();
        let c = curvature_invariants(&t.sample(&mut chunk_rng(1, 0)).shape).unwrap();
        assert!(c.h.abs() < 1e-15);
        assert!((c.s - 4.0).abs() < 1e-14);
        assert!(c.f3.abs() < 1e-14);
    }

    #[test]
    fn nonminimal_mean_curvature_is_constant() {
        let t = CliffordTorus::<f64>::new(1, 4, 0.3).unwrap();
        let (r1, r2) = (0.3, (1.0 - 0.09f64).sqrt());
        let want = (r2 / r1 - 3.0 * r1 / r2) / 4.0;
        let mut rng = chunk_rng(5, 0);
        for _ in 0..50 {
            let c = curvature_invariants(&t.sample(&mut rng).shape).unwrap();
            assert!((c.h - want).abs() < 1e-12);
        }
        assert!((t.mean_curvature() - want).abs() < 1e-15);
    }

    #[test]
    fn torus_point_from_coordinates() {
        let t = CliffordTorus::<f64>::minimal(1, 3).unwrap();
        let p = torus_point(&t, &[1.0, 0.0], &[0.0, 0.0, 1.0]).unwrap();
        let (r1, r2) = (3f64.sqrt().recip(), (2.0f64 / 3.0).sqrt());
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-15);
        assert!(close(&p.x, &[r1, 0.0, 0.0, 0.0, r2]));
        assert!(close(&p.nu, &[-r2, 0.0, 0.0, 0.0, r1]));
        assert!(torus_point(&t, &[1.0, 1.0], &[0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn closed_form_matches_level_set() {
        for t in [CliffordTorus::<f64>::minimal(1, 4).unwrap(), CliffordTorus::new(2, 5, 0.4).unwrap()] {
            let field = t.level_field();
            let mut rng = chunk_rng(9, 0);
            for _ in 0..100 {
                let p = t.sample(&mut rng);
                let q = shape_from_level_set(field.as_ref(), &p.x).unwrap();
                for (a, b) in p.nu.iter().zip(&q.nu) {
                    assert!((a - b).abs() < 1e-12);
                }
                // compare the ambient operators e_i A_ij e_j^T, frames differ
                let amb = |s: &SurfacePoint<f64>, a: usize, b: usize| {
                    let mut acc = 0.0;
                    for i in 0..s.dim() {
                        for j in 0..s.dim() {
                            acc += s.frame[i][a] * s.shape[(i, j)] * s.frame[j][b];
                        }
                    }
                    acc
                };
                for a in 0..t.n + 2 {
                    for b in 0..t.n + 2 {
                        assert!((amb(&p, a, b) - amb(&q, a, b)).abs() < 1e-8);
                    }
                }
            }
        }
    }

    #[test]
    fn quadrature_weights_sum_to_volume() {
        let t = CliffordTorus::<f64>::minimal(1, 4).unwrap();
        let nodes = t.quadrature(12).unwrap();
        let vol: f64 = nodes.iter().map(|(_, w)| w).sum();
        let r1 = 0.5;
        let r2 = 0.75f64.sqrt();
        let want = r1 * r2.powi(3) * 2.0 * std::f64::consts::PI * 2.0 * std::f64::consts::PI.powi(2);
        assert!((vol - want).abs() < 1e-12 * want);
        assert!((t.volume() - want).abs() < 1e-13 * want);
    }
}
