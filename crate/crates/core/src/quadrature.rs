//! One-dimensional rules and tensor-product rules on round spheres.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest number of nodes per angle accepted by the tensor rules.
pub const MAX_DEGREE: usize = 256;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
///
/// Newton iteration on the three-term recurrence, in double precision.
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 || n > MAX_DEGREE {
        return Err(Error::DegreeOverflow(n));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pnm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        // recompute the derivative at the converged node
        let (mut p0, mut p1) = (1.0, z);
        for k in 2..=n {
            let k = k as f64;
            let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        if n > 1 {
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok((nodes, weights))
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Result<Vec<(f64, f64)>> {
    let (x, w) = gauss_legendre(n)?;
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    Ok(x.iter().zip(&w).map(|(&x, &w)| (mid + half * x, half * w)).collect())
}

/// Tensor rule on the unit sphere `S^m ⊂ R^{m+1}`: Gauss–Legendre in the
/// `m - 1` polar angles (with the `sin^p` Jacobians folded into the weights)
/// and the uniform rule `2πj/degree` in the azimuth.
///
/// Weights sum to `Vol(S^m)` up to quadrature error.
#[derive(Clone, Debug)]
pub struct SphereRule<T> {
    pub points: Vec<Vec<T>>,
    pub weights: Vec<T>,
}

impl<T: Real> SphereRule<T> {
    pub fn new(m: usize, degree: usize) -> Result<Self> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(Error::DegreeOverflow(degree));
        }
        if m == 0 {
            // S^0 = {±1} with counting measure
            return Ok(Self { points: vec![vec![T::one()], vec![-T::one()]], weights: vec![T::one(), T::one()] });
        }
        let polar = gauss_legendre_on(degree, 0.0, PI)?;
        let azimuth: Vec<f64> = (0..degree).map(|j| 2.0 * PI * j as f64 / degree as f64).collect();
        let dphi = 2.0 * PI / degree as f64;

        // start with the circle, then prepend one polar angle at a time
        let mut points: Vec<Vec<f64>> = azimuth.iter().map(|&p| vec![p.cos(), p.sin()]).collect();
        let mut weights: Vec<f64> = vec![dphi; degree];
        for p in 1..m {
            let mut next_pts = Vec::with_capacity(points.len() * degree);
            let mut next_w = Vec::with_capacity(points.len() * degree);
            for &(theta, wt) in &polar {
                let (s, c) = theta.sin_cos();
                let jac = wt * s.powi(p as i32);
                for (pt, &w) in points.iter().zip(&weights) {
                    let mut q = Vec::with_capacity(pt.len() + 1);
                    q.push(c);
                    q.extend(pt.iter().map(|&v| s * v));
                    next_pts.push(q);
                    next_w.push(w * jac);
                }
            }
            points = next_pts;
            weights = next_w;
        }
        Ok(Self {
            points: points.into_iter().map(|p| p.into_iter().map(T::lit).collect()).collect(),
            weights: weights.into_iter().map(T::lit).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// `Vol(S^m)` of the unit sphere, `2π^{(m+1)/2} / Γ((m+1)/2)`.
pub fn unit_sphere_volume(m: usize) -> f64 {
    // recurrence Vol(S^m) = 2π/(m-1) Vol(S^{m-2})
    match m {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (m as f64 - 1.0) * unit_sphere_volume(m - 2),
    }
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_KRONROD_W: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const GK_GAUSS_W: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kronrod = fc * GK_KRONROD_W[7];
    let mut gauss = fc * GK_GAUSS_W[3];
    for i in 0..7 {
        let dx = half * GK_NODES[i];
        let s = f(mid - dx) + f(mid + dx);
        kronrod += GK_KRONROD_W[i] * s;
        if i % 2 == 1 {
            gauss += GK_GAUSS_W[i / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integration on `[a, b]` to absolute
/// tolerance `tol`. Returns `(value, error estimate)`.
pub fn adaptive_integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let mut stack = vec![(a, b, tol)];
    let (mut total, mut err) = (0.0, 0.0);
    let min_width = (b - a).abs() * 1e-12;
    while let Some((lo, hi, t)) = stack.pop() {
        let (v, e) = gk15(&f, lo, hi);
        if e <= t || (hi - lo).abs() < min_width {
            total += v;
            err += e;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, 0.5 * t));
            stack.push((lo, mid, 0.5 * t));
        }
    }
    (total, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1, 2, 5, 12, 24, 64] {
            let (x, w) = gauss_legendre(n).unwrap();
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            // ∫ x^{2k} = 2/(2k+1) exact up to degree 2n-1
            for k in 0..n {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(2 * k as i32)).sum();
                assert!((got - 2.0 / (2 * k + 1) as f64).abs() < 1e-13, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn degree_guard() {
        assert!(matches!(gauss_legendre(0), Err(Error::DegreeOverflow(0))));
        assert!(SphereRule::<f64>::new(2, MAX_DEGREE + 1).is_err());
    }

    #[test]
    fn sphere_rule_volume_and_second_moments() {
        for m in 1..=4 {
            let rule = SphereRule::<f64>::new(m, 16).unwrap();
            let vol: f64 = rule.weights.iter().sum();
            assert!((vol - unit_sphere_volume(m)).abs() < 1e-12 * vol, "m={m}");
            // ∫ x_i² = Vol / (m + 1) for every coordinate
            for i in 0..=m {
                let s: f64 = rule.points.iter().zip(&rule.weights).map(|(p, w)| w * p[i] * p[i]).sum();
                assert!((s - vol / (m + 1) as f64).abs() < 1e-12 * vol);
            }
            for p in &rule.points {
                let r: f64 = p.iter().map(|v| v * v).sum();
                assert!((r - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn sphere_volumes() {
        assert!((unit_sphere_volume(2) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_volume(3) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((unit_sphere_volume(4) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_handles_kinks() {
        let (v, e) = adaptive_integrate(|x: f64| x.abs(), -1.0, 2.0, 1e-12);
        assert!((v - 2.5).abs() < 1e-11, "{v} ± {e}");
        let (v, _) = adaptive_integrate(|x: f64| (3.0 * x).sin(), 0.0, PI / 3.0, 1e-13);
        assert!((v - 2.0 / 3.0).abs() < 1e-13);
    }
}
