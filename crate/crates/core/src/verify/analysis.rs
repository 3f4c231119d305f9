use rayon::prelude::*;

use crate::catalog::{Flipped, Hypersurface, HypersurfaceSpec, Surface};
use crate::error::Result;
use crate::geometry::{ricci_defect, ricci_quadratic_form, CurvatureSummary, SurfacePoint};
use crate::height::analytic_derivatives;
use crate::integrate::{integrate_many, Estimate, Method};
use crate::linalg;
use crate::sampling::{chunk_rng, random_directions, CHUNK};

use super::VerifyConfig;

/// The ambient coordinate frame followed by `count` seeded random directions.
pub fn direction_set(ambient_dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut dirs: Vec<Vec<f64>> = (0..ambient_dim).map(|i| linalg::basis_vector(ambient_dim, i)).collect();
    dirs.extend(random_directions(seed, ambient_dim, count));
    dirs
}

/// `count` surface samples from RNG streams tagged by `salt`, disjoint from
/// the Monte Carlo integration streams.
pub fn sample_points<S: Hypersurface<f64>>(surface: &S, count: usize, seed: u64, salt: u64) -> Vec<SurfacePoint<f64>> {
    let chunks = count.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = chunk_rng(seed, (salt << 40) + c as u64);
            let len = CHUNK.min(count - c * CHUNK);
            (0..len).map(|_| surface.sample(&mut rng)).collect::<Vec<_>>()
        })
        .collect()
}

/// `sup_M <x, a>`: the best of `points`, refined by gradient ascent along
/// `aᵀ` with the surface retraction.
pub fn sup_height<S: Hypersurface<f64>>(surface: &S, points: &[SurfacePoint<f64>], a: &[f64]) -> f64 {
    let height = |p: &SurfacePoint<f64>| linalg::dot(&p.x, a);
    let Some(best) = points.iter().max_by(|p, q| height(p).total_cmp(&height(q))) else {
        return f64::NAN;
    };
    let mut p = best.clone();
    let mut value = height(&p);
    let mut step = 0.5;
    for _ in 0..200 {
        let grad = p.from_frame(&p.to_frame(a));
        if linalg::norm(&grad) < 1e-14 || step < 1e-14 {
            break;
        }
        match surface.retract(&p, &linalg::scaled(step, &grad)) {
            Ok(q) if height(&q) > value => {
                value = height(&q);
                p = q;
                step *= 1.5;
            }
            _ => step *= 0.5,
        }
    }
    value
}

/// `sup |φ_a|` and `inf φ_a` for each direction.
#[derive(Clone, Debug, PartialEq)]
pub struct Widths {
    pub sup_abs: Vec<f64>,
    pub inf: Vec<f64>,
}

/// Integrals of one direction.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionIntegrals {
    pub phi2: Estimate<f64>,
    pub psi2: Estimate<f64>,
    pub phipsi: Estimate<f64>,
    /// `1 - (n+1)φ² - ψ²`
    pub ie_lhs: Estimate<f64>,
    /// `(ρ-1)(1 - φ² - (n+1)ψ²)`
    pub ie_rhs: Estimate<f64>,
    pub ie_gap: Estimate<f64>,
    pub route_a: Estimate<f64>,
    pub route_b: Estimate<f64>,
    pub route_gap: Estimate<f64>,
    /// `1 - (n+1)φ² - ψ² + nHφψ`
    pub height_identity: Estimate<f64>,
    /// `(Δφ)² - |Hess φ|²`
    pub reilly_lhs: Estimate<f64>,
    /// `Ric(∇φ, ∇φ)`
    pub reilly_rhs: Estimate<f64>,
    pub reilly_gap: Estimate<f64>,
    /// `(φ² - ψ²) S`
    pub cheng_yau_lhs: Estimate<f64>,
    /// `φψ Tr A³`
    pub cheng_yau_rhs: Estimate<f64>,
    pub cheng_yau_gap: Estimate<f64>,
    pub s_psi2: Estimate<f64>,
    /// `|A aᵀ|²`
    pub a_at2: Estimate<f64>,
    pub deltapsi2_gap: Estimate<f64>,
    /// Route A minus `S((n+2)φ² - 1)`.
    pub mcsc_gap: Estimate<f64>,
    pub phi2_minus_psi2: Estimate<f64>,
}

const PER_DIRECTION: usize = 21;

fn direction_integrands(a: &[f64], p: &SurfacePoint<f64>, curv: &CurvatureSummary<f64>, out: &mut Vec<f64>) {
    let d = analytic_derivatives(a, p, curv, true).expect("catalog surfaces have constant H");
    let der = d.derivatives.as_ref().expect("filled by analytic_derivatives");
    let n = p.dim() as f64;
    let (phi, psi) = (d.phi, d.psi);
    let (phi2, psi2) = (phi * phi, psi * psi);
    let ie_lhs = 1.0 - (n + 1.0) * phi2 - psi2;
    let ie_rhs = (curv.rho - 1.0) * (1.0 - phi2 - (n + 1.0) * psi2);
    let route_a = ricci_defect(&p.shape, &d.a_t, curv);
    let route_b = (n - 1.0) * (ie_lhs - ie_rhs);
    let reilly_lhs = der.lap_phi * der.lap_phi - der.hess_phi.frobenius_sq();
    let reilly_rhs = ricci_quadratic_form(&p.shape, &der.grad_phi, curv.h);
    let cy_lhs = (phi2 - psi2) * curv.s;
    let cy_rhs = phi * psi * curv.f3;
    let a_at2 = linalg::dot(&der.grad_psi, &der.grad_psi);
    out.extend_from_slice(&[
        phi2,
        psi2,
        phi * psi,
        ie_lhs,
        ie_rhs,
        ie_lhs - ie_rhs,
        route_a,
        route_b,
        route_a - route_b,
        ie_lhs + n * curv.h * phi * psi,
        reilly_lhs,
        reilly_rhs,
        reilly_lhs - reilly_rhs,
        cy_lhs,
        cy_rhs,
        cy_lhs - cy_rhs,
        curv.s * psi2,
        a_at2,
        curv.s * psi2 - a_at2,
        route_a - curv.s * ((n + 2.0) * phi2 - 1.0),
        phi2 - psi2,
    ]);
}

impl DirectionIntegrals {
    fn from_slice(e: &[Estimate<f64>]) -> Self {
        Self {
            phi2: e[0],
            psi2: e[1],
            phipsi: e[2],
            ie_lhs: e[3],
            ie_rhs: e[4],
            ie_gap: e[5],
            route_a: e[6],
            route_b: e[7],
            route_gap: e[8],
            height_identity: e[9],
            reilly_lhs: e[10],
            reilly_rhs: e[11],
            reilly_gap: e[12],
            cheng_yau_lhs: e[13],
            cheng_yau_rhs: e[14],
            cheng_yau_gap: e[15],
            s_psi2: e[16],
            a_at2: e[17],
            deltapsi2_gap: e[18],
            mcsc_gap: e[19],
            phi2_minus_psi2: e[20],
        }
    }
}

/// Everything the integral checks need about one surface, computed in a
/// single pass over quadrature nodes or Monte Carlo samples.
#[derive(Clone, Debug)]
pub struct SurfaceAnalysis {
    pub spec: HypersurfaceSpec,
    pub surface: Surface<f64>,
    pub method: Method,
    pub n: usize,
    /// Closed-form volume.
    pub volume: f64,
    pub vol: Estimate<f64>,
    pub int_s: Estimate<f64>,
    pub int_s2: Estimate<f64>,
    pub int_f3: Estimate<f64>,
    /// Largest `S` over the sup sample set.
    pub sup_s: f64,
    /// Spread `max S - min S` over the sup sample set.
    pub s_spread: f64,
    pub directions: Vec<Vec<f64>>,
    pub per_direction: Vec<DirectionIntegrals>,
    /// Points used for suprema over the surface.
    pub sup_points: Vec<SurfacePoint<f64>>,
}

/// Largest tensor rule evaluated; bigger rules fall back to Monte Carlo.
pub const QUADRATURE_NODE_LIMIT: usize = 1 << 20;

/// Stream tag for the sup sample set.
const SUP_SALT: u64 = 1;

impl SurfaceAnalysis {
    pub fn new(spec: &HypersurfaceSpec, cfg: &VerifyConfig) -> Result<Self> {
        Self::oriented(spec, cfg, false)
    }

    /// Like [`Self::new`], with the unit normal reversed when `flip` is set.
    pub fn oriented(spec: &HypersurfaceSpec, cfg: &VerifyConfig, flip: bool) -> Result<Self> {
        let surface = Surface::<f64>::from_spec(spec)?;
        let within_limit =
            surface.quadrature_nodes(cfg.quadrature_degree).is_some_and(|nodes| nodes <= QUADRATURE_NODE_LIMIT);
        let method = if within_limit {
            Method::Quadrature { degree: cfg.quadrature_degree }
        } else {
            Method::MonteCarlo { samples: cfg.samples, seed: cfg.seed }
        };
        let n = surface.dim();
        let directions = direction_set(n + 2, cfg.random_directions, cfg.seed);
        let width = 4 + PER_DIRECTION * directions.len();
        let integrand = |p: &SurfacePoint<f64>| {
            let curv = p.curvature().expect("catalog shape operators are symmetric");
            let mut out = Vec::with_capacity(width);
            out.extend_from_slice(&[1.0, curv.s, curv.s * curv.s, curv.f3]);
            for a in &directions {
                direction_integrands(a, p, &curv, &mut out);
            }
            out
        };
        let est = if flip {
            integrate_many(&Flipped(surface.clone()), method, width, integrand)?
        } else {
            integrate_many(&surface, method, width, integrand)?
        };
        let per_direction = est[4..].chunks(PER_DIRECTION).map(DirectionIntegrals::from_slice).collect();
        let sup_points = sample_points(&surface, cfg.sup_samples, cfg.seed, SUP_SALT);
        let s_values: Vec<f64> = sup_points.iter().map(|p| p.curvature().map(|c| c.s)).collect::<Result<_>>()?;
        let sup_s = s_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let inf_s = s_values.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Self {
            spec: *spec,
            volume: surface.volume(),
            surface,
            method,
            n,
            vol: est[0],
            int_s: est[1],
            int_s2: est[2],
            int_f3: est[3],
            sup_s,
            s_spread: sup_s - inf_s,
            directions,
            per_direction,
            sup_points,
        })
    }

    pub fn is_stochastic(&self) -> bool {
        self.method.is_stochastic()
    }

    /// `∫φ_a² / Vol` per direction.
    pub fn phi2_ratios(&self) -> Vec<Estimate<f64>> {
        self.per_direction.iter().map(|d| d.phi2.scaled(1.0 / self.volume)).collect()
    }

    pub fn psi2_ratios(&self) -> Vec<Estimate<f64>> {
        self.per_direction.iter().map(|d| d.psi2.scaled(1.0 / self.volume)).collect()
    }

    /// Index and value of the smallest `∫φ²/Vol`.
    pub fn min_phi2_ratio(&self) -> (usize, Estimate<f64>) {
        let r = self.phi2_ratios();
        let i = (0..r.len()).min_by(|&i, &j| r[i].value.total_cmp(&r[j].value)).expect("directions");
        (i, r[i])
    }

    pub fn max_phi2_ratio(&self) -> (usize, Estimate<f64>) {
        let r = self.phi2_ratios();
        let i = (0..r.len()).max_by(|&i, &j| r[i].value.total_cmp(&r[j].value)).expect("directions");
        (i, r[i])
    }

    pub fn widths(&self) -> Widths {
        let (sup_abs, inf) = self
            .directions
            .par_iter()
            .map(|a| {
                let up = sup_height(&self.surface, &self.sup_points, a);
                let neg: Vec<f64> = a.iter().map(|v| -v).collect();
                let down = -sup_height(&self.surface, &self.sup_points, &neg);
                (up.max(-down), down)
            })
            .unzip();
        Widths { sup_abs, inf }
    }
}
