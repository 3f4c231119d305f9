use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::spec::SUPPORTED_G;

/// Principal-curvature data of the minimal member of an isoparametric family
/// with `g` distinct principal curvatures of multiplicities `m₊, m₋, m₊, …`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsoparametricProfile<T> {
    pub g: usize,
    pub m_plus: usize,
    pub m_minus: usize,
    /// Level of the minimal hypersurface, `cos(g θ₀) = (m₋ - m₊)/(m₋ + m₊)`.
    pub theta0: T,
    /// `(cot(θ₀ + (j-1)π/g), multiplicity)` for `j = 1..g`.
    pub lambdas: Vec<(T, usize)>,
}

impl<T: Real> IsoparametricProfile<T> {
    /// Intrinsic dimension, the sum of multiplicities.
    pub fn dim(&self) -> usize {
        self.lambdas.iter().map(|&(_, m)| m).sum()
    }

    /// `Σ m_j λ_j = n H`
    pub fn trace(&self) -> T {
        self.lambdas.iter().map(|&(l, m)| T::of(m) * l).sum()
    }

    /// `S = Σ m_j λ_j²`
    pub fn squared_norm(&self) -> T {
        self.lambdas.iter().map(|&(l, m)| T::of(m) * l * l).sum()
    }

    pub fn is_minimal(&self) -> bool {
        self.trace().abs() < T::lit(1e-10).max(T::epsilon().sqrt())
    }

    /// Principal curvatures listed with multiplicity.
    pub fn expanded(&self) -> Vec<T> {
        self.lambdas.iter().flat_map(|&(l, m)| std::iter::repeat_n(l, m)).collect()
    }
}

/// Builds the profile of the minimal hypersurface for `(g, m₊, m₋)`.
///
/// Only `g ∈ {1, 2, 3, 4, 6}` and positive multiplicities are checked; whether
/// a family with these multiplicities exists is the caller's concern.
pub fn profile_lambdas<T: Real>(g: usize, m_plus: usize, m_minus: usize) -> Result<IsoparametricProfile<T>> {
    if !SUPPORTED_G.contains(&g) {
        return Err(Error::UnsupportedG(g));
    }
    if m_plus == 0 || m_minus == 0 {
        return Err(Error::InvalidSurface("multiplicities must be positive".into()));
    }
    let c0 = (T::of(m_minus) - T::of(m_plus)) / (T::of(m_minus) + T::of(m_plus));
    let gt = T::of(g);
    let theta0 = c0.acos() / gt;
    let lambdas = (0..g)
        .map(|j| {
            let b = theta0 + T::of(j) * T::PI() / gt;
            let mult = if j % 2 == 0 { m_plus } else { m_minus };
            (b.cos() / b.sin(), mult)
        })
        .collect();
    Ok(IsoparametricProfile { g, m_plus, m_minus, theta0, lambdas })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::CliffordTorus;
    use std::f64::consts::PI;

    #[test]
    fn cartan_profile() {
        let p = profile_lambdas::<f64>(3, 1, 1).unwrap();
        assert!((p.theta0 - PI / 6.0).abs() < 1e-15);
        let r3 = 3f64.sqrt();
        for (&(l, m), want) in p.lambdas.iter().zip([r3, 0.0, -r3]) {
            assert_eq!(m, 1);
            assert!((l - want).abs() < 1e-14);
        }
        assert!(p.is_minimal());
        assert!((p.squared_norm() - 6.0).abs() < 1e-13);
    }

    #[test]
    fn g2_matches_minimal_torus() {
        for (k, n) in [(1, 4), (2, 4), (2, 5), (3, 7)] {
            let p = profile_lambdas::<f64>(2, k, n - k).unwrap();
            let t = CliffordTorus::<f64>::minimal(k, n).unwrap();
            assert!((p.lambdas[0].0 - t.kappa1()).abs() < 1e-13);
            assert!((p.lambdas[1].0 - t.kappa2()).abs() < 1e-13);
            assert_eq!(p.dim(), n);
            assert!(p.is_minimal());
        }
    }

    #[test]
    fn g4_profile_is_minimal_with_s_equal_3n() {
        let p = profile_lambdas::<f64>(4, 2, 2).unwrap();
        assert_eq!(p.dim(), 8);
        assert!(p.trace().abs() < 1e-10);
        assert!((p.squared_norm() - 24.0).abs() < 1e-10);
        let p = profile_lambdas::<f64>(6, 2, 2).unwrap();
        assert!((p.squared_norm() - 5.0 * 12.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_g() {
        assert!(matches!(profile_lambdas::<f64>(5, 1, 1), Err(Error::UnsupportedG(5))));
        assert!(profile_lambdas::<f64>(3, 0, 1).is_err());
    }
}
