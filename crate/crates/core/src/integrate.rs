//! Integral functionals over catalog surfaces and the isoparametric profile
//! integrals.
//!
//! Quadrature is deterministic. Monte Carlo draws chunk `c` from stream `c` of
//! the seed and merges chunk moments in chunk order, so the result is the same
//! for any number of worker threads.

use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{Hypersurface, IsoparametricProfile};
use crate::error::{Error, Result};
use crate::geometry::{ricci_defect, SurfacePoint};
use crate::height::height_pair;
use crate::quadrature::{adaptive_integrate, unit_sphere_volume};
use crate::sampling::{self, chunk_rng, CHUNK};
use crate::scalar::Real;

/// How an integral over a surface is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    /// Tensor Gauss rule with `degree` nodes per angle.
    Quadrature {
        degree: usize,
    },
    MonteCarlo {
        samples: usize,
        seed: u64,
    },
}

impl Method {
    pub fn is_stochastic(&self) -> bool {
        matches!(self, Self::MonteCarlo { .. })
    }
}

/// An integral value with its standard error (zero for quadrature).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate<T> {
    pub value: T,
    pub stderr: T,
    /// Samples drawn, or quadrature nodes used.
    pub n_samples: usize,
    /// `None` for deterministic quadrature.
    pub seed: Option<u64>,
}

pub type MonteCarloEstimate<T> = Estimate<T>;

impl<T: Real> Estimate<T> {
    pub fn exact(value: T) -> Self {
        Self { value, stderr: T::zero(), n_samples: 0, seed: None }
    }

    pub fn scaled(self, c: T) -> Self {
        Self { value: self.value * c, stderr: self.stderr * c.abs(), ..self }
    }

    /// `|value - target| <= max(floor, 4 stderr)`.
    pub fn agrees_with(&self, target: T, floor: T) -> bool {
        (self.value - target).abs() <= floor.max(T::lit(4.0) * self.stderr)
    }
}

/// Neumaier-compensated sum.
#[derive(Clone, Copy, Debug, Default)]
struct Compensated<T> {
    sum: T,
    carry: T,
}

impl<T: Real> Compensated<T> {
    fn add(&mut self, v: T) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry = self.carry + ((self.sum - t) + v);
        } else {
            self.carry = self.carry + ((v - t) + self.sum);
        }
        self.sum = t;
    }

    fn value(&self) -> T {
        self.sum + self.carry
    }
}

/// Running mean and second central moment of a vector-valued sample.
#[derive(Clone, Debug)]
struct Moments<T> {
    count: usize,
    mean: Vec<T>,
    m2: Vec<T>,
}

impl<T: Real> Moments<T> {
    fn new(width: usize) -> Self {
        Self { count: 0, mean: vec![T::zero(); width], m2: vec![T::zero(); width] }
    }

    fn push(&mut self, x: &[T]) {
        self.count += 1;
        let c = T::of(self.count);
        for ((m, s), &v) in self.mean.iter_mut().zip(&mut self.m2).zip(x) {
            let d = v - *m;
            *m = *m + d / c;
            *s = *s + d * (v - *m);
        }
    }

    /// Chan et al. pairwise merge.
    fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        let (na, nb) = (T::of(self.count), T::of(other.count));
        let total = na + nb;
        for i in 0..self.mean.len() {
            let d = other.mean[i] - self.mean[i];
            self.mean[i] = self.mean[i] + d * nb / total;
            self.m2[i] = self.m2[i] + other.m2[i] + d * d * na * nb / total;
        }
        self.count += other.count;
    }

    fn estimates(&self, scale: T, seed: u64) -> Vec<Estimate<T>> {
        let n = T::of(self.count);
        self.mean
            .iter()
            .zip(&self.m2)
            .map(|(&m, &s)| {
                let var = if self.count > 1 { s / (n - T::one()) } else { T::zero() };
                Estimate {
                    value: m * scale,
                    stderr: (var / n).sqrt() * scale.abs(),
                    n_samples: self.count,
                    seed: Some(seed),
                }
            })
            .collect()
    }
}

/// Moments of `draw` over `samples` draws split into seeded chunks.
fn chunked_moments<T, G>(samples: usize, seed: u64, width: usize, draw: G) -> Moments<T>
where
    T: Real,
    G: Fn(&mut rand_chacha::ChaCha8Rng) -> Vec<T> + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<Moments<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c as u64);
            let len = CHUNK.min(samples - c * CHUNK);
            let mut m = Moments::new(width);
            for _ in 0..len {
                m.push(&draw(&mut rng));
            }
            m
        })
        .collect();
    let mut total = Moments::new(width);
    for m in &partial {
        total.merge(m);
    }
    total
}

/// Integrates a vector of `width` functions at once; the integrand fills one
/// value per component.
pub fn integrate_many<T, S, F>(surface: &S, method: Method, width: usize, f: F) -> Result<Vec<Estimate<T>>>
where
    T: Real,
    S: Hypersurface<T>,
    F: Fn(&SurfacePoint<T>) -> Vec<T> + Sync,
{
    match method {
        Method::Quadrature { degree } => {
            let nodes = surface.quadrature(degree)?;
            // block partial sums, merged in block order
            let blocks: Vec<Vec<Compensated<T>>> = nodes
                .par_chunks(CHUNK)
                .map(|block| {
                    let mut sums = vec![Compensated::<T>::default(); width];
                    for (p, w) in block {
                        for (s, x) in sums.iter_mut().zip(f(p)) {
                            s.add(x * *w);
                        }
                    }
                    sums
                })
                .collect();
            let mut sums = vec![Compensated::<T>::default(); width];
            for block in &blocks {
                for (s, b) in sums.iter_mut().zip(block) {
                    s.add(b.value());
                }
            }
            Ok(sums
                .iter()
                .map(|s| Estimate { value: s.value(), stderr: T::zero(), n_samples: nodes.len(), seed: None })
                .collect())
        }
        Method::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return Err(Error::InvalidSurface(format!("{samples} Monte Carlo samples")));
            }
            let m = chunked_moments(samples, seed, width, |rng| f(&surface.sample(rng)));
            Ok(m.estimates(surface.volume(), seed))
        }
    }
}

pub fn integrate<T, S, F>(surface: &S, method: Method, f: F) -> Result<Estimate<T>>
where
    T: Real,
    S: Hypersurface<T>,
    F: Fn(&SurfacePoint<T>) -> T + Sync,
{
    Ok(integrate_many(surface, method, 1, |p| vec![f(p)])?[0])
}

/// Uniform Monte Carlo over the whole sphere `S^{ambient_dim - 1}`.
pub fn integrate_sphere_many<T, F>(
    ambient_dim: usize,
    samples: usize,
    seed: u64,
    width: usize,
    f: F,
) -> Vec<Estimate<T>>
where
    T: Real,
    F: Fn(&[T]) -> Vec<T> + Sync,
{
    let m = chunked_moments(samples, seed, width, |rng| f(&sampling::unit_vector::<T, _>(rng, ambient_dim)));
    m.estimates(T::lit(unit_sphere_volume(ambient_dim - 1)), seed)
}

/// Per-direction integral functionals of one surface.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionalReport<T> {
    pub vol: Estimate<T>,
    pub int_phi2: Estimate<T>,
    pub int_psi2: Estimate<T>,
    pub int_phipsi: Estimate<T>,
    /// `∫ Ric(aᵀ,aᵀ) - (R/n)|aᵀ|²`
    pub ie_defect_curvature: Estimate<T>,
    /// `(n-1)[∫(1-(n+1)φ²-ψ²) - ∫(ρ-1)(1-φ²-(n+1)ψ²)]`
    pub ie_defect_height: Estimate<T>,
    /// Route A minus route B from the same samples.
    pub route_gap: Estimate<T>,
}

/// Pointwise integrands in the order of [`FunctionalReport`]'s fields.
fn functional_integrands<T: Real>(a: &[T], p: &SurfacePoint<T>) -> Vec<T> {
    let curv = p.curvature().expect("catalog shape operators are symmetric");
    let d = height_pair(a, p);
    let n = T::of(p.dim());
    let one = T::one();
    let (phi2, psi2) = (d.phi * d.phi, d.psi * d.psi);
    let route_a = ricci_defect(&p.shape, &d.a_t, &curv);
    let route_b = (n - one) * ((one - (n + one) * phi2 - psi2) - (curv.rho - one) * (one - phi2 - (n + one) * psi2));
    vec![one, phi2, psi2, d.phi * d.psi, route_a, route_b, route_a - route_b]
}

/// The functionals for every direction in `dirs`, sharing one pass over the
/// nodes or samples.
pub fn functionals<T, S>(surface: &S, dirs: &[Vec<T>], method: Method) -> Result<Vec<FunctionalReport<T>>>
where
    T: Real,
    S: Hypersurface<T>,
{
    const W: usize = 7;
    let est = integrate_many(surface, method, W * dirs.len(), |p| {
        dirs.iter().flat_map(|a| functional_integrands(a, p)).collect()
    })?;
    Ok(est
        .chunks(W)
        .map(|c| FunctionalReport {
            vol: c[0],
            int_phi2: c[1],
            int_psi2: c[2],
            int_phipsi: c[3],
            ie_defect_curvature: c[4],
            ie_defect_height: c[5],
            route_gap: c[6],
        })
        .collect())
}

/// IE defect of direction `a` by both routes.
pub fn ie_defect<T, S>(surface: &S, a: &[T], method: Method) -> Result<(Estimate<T>, Estimate<T>)>
where
    T: Real,
    S: Hypersurface<T>,
{
    let r = functionals(surface, &[a.to_vec()], method)?.remove(0);
    Ok((r.ie_defect_curvature, r.ie_defect_height))
}

/// Volume density of the parallel family,
/// `h(θ) = Π (cos(θ₀-θ) - sin(θ₀-θ) λ_i)`.
pub fn profile_h<T: Real>(profile: &IsoparametricProfile<T>, theta: f64) -> f64 {
    let t0 = profile.theta0.to_f64_lossy();
    let (c, s) = ((t0 - theta).cos(), (t0 - theta).sin());
    profile.lambdas.iter().map(|&(l, m)| (c - s * l.to_f64_lossy()).powi(m as i32)).product()
}

/// Absolute tolerance of the profile quadratures.
pub const PROFILE_TOL: f64 = 1e-13;

/// `∫₀^{π/g} |h(θ)| dθ`
pub fn profile_abs_integral<T: Real>(profile: &IsoparametricProfile<T>) -> f64 {
    let top = std::f64::consts::PI / profile.g as f64;
    adaptive_integrate(|t| profile_h(profile, t).abs(), 0.0, top, PROFILE_TOL).0
}

/// `α = ∫₀^{π/g} sin²(θ₀-θ) |h(θ)| dθ`
pub fn profile_alpha<T: Real>(profile: &IsoparametricProfile<T>) -> f64 {
    let top = std::f64::consts::PI / profile.g as f64;
    let t0 = profile.theta0.to_f64_lossy();
    adaptive_integrate(|t| (t0 - t).sin().powi(2) * profile_h(profile, t).abs(), 0.0, top, PROFILE_TOL).0
}

/// Predictions of `∫_M φ_a²` from the coarea identity of the parallel family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileL2 {
    pub n: usize,
    pub int_abs_h: f64,
    pub alpha: f64,
    pub vol_sphere: f64,
    /// `Vol(S^{n+1}) / ∫|h|`
    pub vol_m: f64,
    /// `∫|h| - (n+2)α`
    pub coefficient: f64,
    pub predicted_int_phi2: f64,
    /// `1 - (n+2)α`, the coefficient as it is usually printed.
    pub printed_coefficient: f64,
    pub printed_prediction: f64,
}

/// Solves `(∫|h| - (n+2)α) X + α Vol(M) = Vol(S^{n+1})/(n+2)` for `X = ∫φ²`,
/// and the variant with coefficient `1 - (n+2)α` for comparison.
pub fn l2_from_profile<T: Real>(profile: &IsoparametricProfile<T>) -> Result<ProfileL2> {
    let n = profile.dim();
    let int_abs_h = profile_abs_integral(profile);
    let alpha = profile_alpha(profile);
    let vol_sphere = unit_sphere_volume(n + 1);
    let vol_m = vol_sphere / int_abs_h;
    let np2 = (n + 2) as f64;
    let coefficient = int_abs_h - np2 * alpha;
    if coefficient.abs() < 1e-10 {
        return Err(Error::DegenerateCoefficient(coefficient));
    }
    let rhs = vol_sphere / np2 - alpha * vol_m;
    let printed_coefficient = 1.0 - np2 * alpha;
    Ok(ProfileL2 {
        n,
        int_abs_h,
        alpha,
        vol_sphere,
        vol_m,
        coefficient,
        predicted_int_phi2: rhs / coefficient,
        printed_coefficient,
        printed_prediction: rhs / printed_coefficient,
    })
}
